//! Edge-list text format and label CSVs.
//!
//! One edge per line, `src<TAB>dst<TAB>weight`. Lines starting with `#` are
//! comments; the writer emits `# n=<count>` first so isolated vertices
//! survive a round trip. Vertex ids are nonnegative integers, or string
//! labels resolved through a sidecar mapping file of `id<TAB>label` lines.
//!
//! Weights are written with Rust's shortest round-trip float formatting, so
//! writing and re-reading a graph reproduces it exactly.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::digraph::{MergePolicy, WeightedDigraph};
use crate::error::{Error, Result};

pub fn write_edge_list(g: &WeightedDigraph, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# n={}", g.vertex_count())?;
    for &(u, v, w) in g.edges() {
        writeln!(out, "{u}\t{v}\t{w}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an edge list. Vertex count comes from `n` if given, else from an
/// `# n=` comment, else from the largest id seen plus one. When `labels` is
/// given, non-integer tokens are resolved through it.
pub fn read_edge_list(
    path: &Path,
    n: Option<usize>,
    policy: MergePolicy,
    labels: Option<&HashMap<String, usize>>,
) -> Result<WeightedDigraph> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    let mut header_n: Option<usize> = None;
    let mut max_id = 0usize;

    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("n=") {
                header_n = v.trim().parse::<usize>().ok();
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (su, sv, sw) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected src<TAB>dst<TAB>weight, got {line:?}"),
                })
            }
        };
        let u = parse_vertex(su, labels, lineno)?;
        let v = parse_vertex(sv, labels, lineno)?;
        let w: f64 = sw.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("bad weight {sw:?}"),
        })?;
        max_id = max_id.max(u).max(v);
        triples.push((u, v, w));
    }

    let n = n
        .or(header_n)
        .or(labels.map(|m| m.len()))
        .unwrap_or(if triples.is_empty() { 0 } else { max_id + 1 });
    WeightedDigraph::from_edge_list(&triples, n, policy)
}

fn parse_vertex(
    token: &str,
    labels: Option<&HashMap<String, usize>>,
    lineno: usize,
) -> Result<usize> {
    if let Some(map) = labels {
        if let Some(&id) = map.get(token) {
            return Ok(id);
        }
    }
    token.parse::<usize>().map_err(|_| Error::Parse {
        line: lineno + 1,
        message: format!("unknown vertex {token:?}"),
    })
}

/// Writes an `id<TAB>label` sidecar in id order.
pub fn write_sidecar(labels: &[String], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (id, label) in labels.iter().enumerate() {
        writeln!(out, "{id}\t{label}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a sidecar mapping file into label -> id.
pub fn read_sidecar(path: &Path) -> Result<HashMap<String, usize>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut map = HashMap::new();
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: lineno + 1,
            message: format!("expected id<TAB>label, got {line:?}"),
        })?;
        let id: usize = id.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("bad id {id:?}"),
        })?;
        map.insert(label.to_string(), id);
    }
    Ok(map)
}
