pub mod cluster;
pub mod generate;
pub mod sweep;
pub mod trade;

use std::io::Write;
use std::path::Path;

use hermflow_core::{Clustering, Partition};

use crate::CliResult;

/// `vertex_id,label,ordered_label`; isolated vertices carry -1 in both
/// label columns (the "isolated" cluster).
pub(crate) fn write_labels_csv(path: &Path, clustering: &Clustering) -> CliResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "vertex_id,label,ordered_label")?;
    for u in 0..clustering.labels.len() {
        let raw = clustering.kmeans_labels[u].map_or(-1i64, |l| l as i64);
        let ordered = clustering.labels[u].map_or(-1i64, |l| l as i64);
        writeln!(out, "{u},{raw},{ordered}")?;
    }
    out.flush()?;
    Ok(())
}

/// `vertex_id,label` ground-truth file.
pub(crate) fn write_truth_csv(path: &Path, truth: &Partition) -> CliResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "vertex_id,label")?;
    for u in 0..truth.len() {
        let label = truth.label(u).map_or(-1i64, |l| l as i64);
        writeln!(out, "{u},{label}")?;
    }
    out.flush()?;
    Ok(())
}
