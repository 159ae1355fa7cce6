//! Trade-report CSV ingestion and net-trade graph construction.
//!
//! Every country pair is usually reported twice (the exporter's export row
//! and the importer's mirror import row) and the two rarely agree; the
//! larger value is kept. Sub-commodity rows matching the requested prefix
//! are aggregated per (reporter, partner, flow) first, then reconciled.
//! The net graph keeps one directed edge per pair, oriented along the
//! positive net flow, which guarantees nonnegative weights and at most one
//! edge between any two vertices.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::digraph::{MergePolicy, WeightedDigraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeFlow {
    Import,
    Export,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeRecord {
    pub reporter: String,
    pub partner: String,
    pub flow: TradeFlow,
    pub commodity: String,
    pub year: i32,
    pub value: f64,
}

/// Header names of the six required columns.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ColumnMap {
    pub reporter: String,
    pub partner: String,
    pub flow: String,
    pub commodity: String,
    pub year: String,
    pub value: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            reporter: "reporter".into(),
            partner: "partner".into(),
            flow: "flow".into(),
            commodity: "commodity".into(),
            year: "year".into(),
            value: "value".into(),
        }
    }
}

/// Row filter; the commodity match is prefix-based so chapter-level codes
/// select all their subheadings.
#[derive(Debug, Clone, Default)]
pub struct TradeFilter {
    pub commodity_prefix: Option<String>,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ParseDiagnostics {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_malformed: usize,
    pub rows_filtered_out: usize,
}

/// Streams one CSV, keeping validated rows that pass the filter.
/// Malformed rows are counted and skipped, never fatal.
pub fn parse_trade_csv(
    path: &Path,
    columns: &ColumnMap,
    delimiter: u8,
    filter: &TradeFilter,
) -> Result<(Vec<TradeRecord>, ParseDiagnostics)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { name: name.to_string() })
    };
    let reporter_col = col(&columns.reporter)?;
    let partner_col = col(&columns.partner)?;
    let flow_col = col(&columns.flow)?;
    let commodity_col = col(&columns.commodity)?;
    let year_col = col(&columns.year)?;
    let value_col = col(&columns.value)?;

    let mut records = Vec::new();
    let mut diag = ParseDiagnostics::default();
    for row in reader.records() {
        let row = row?;
        diag.rows_read += 1;
        let field = |i: usize| row.get(i).map(str::trim);
        let parsed = (|| -> Option<TradeRecord> {
            let reporter = field(reporter_col)?.to_string();
            let partner = field(partner_col)?.to_string();
            if reporter.is_empty() || partner.is_empty() || reporter == partner {
                return None;
            }
            let flow = match field(flow_col)? {
                f if f.eq_ignore_ascii_case("import") => TradeFlow::Import,
                f if f.eq_ignore_ascii_case("export") => TradeFlow::Export,
                _ => return None,
            };
            let commodity = field(commodity_col)?.to_string();
            let year: i32 = field(year_col)?.parse().ok()?;
            let value: f64 = field(value_col)?.parse().ok()?;
            if !value.is_finite() || value < 0.0 {
                return None;
            }
            Some(TradeRecord { reporter, partner, flow, commodity, year, value })
        })();
        let Some(record) = parsed else {
            diag.rows_malformed += 1;
            continue;
        };
        let prefix_ok = filter
            .commodity_prefix
            .as_deref()
            .is_none_or(|p| record.commodity.starts_with(p));
        let year_ok = filter.year.is_none_or(|y| record.year == y);
        if prefix_ok && year_ok {
            diag.rows_kept += 1;
            records.push(record);
        } else {
            diag.rows_filtered_out += 1;
        }
    }
    Ok((records, diag))
}

/// Bidirectional country code <-> dense vertex id map.
#[derive(Debug, Clone)]
pub struct CountryIndex {
    codes: Vec<String>,
    ids: HashMap<String, usize>,
}

impl CountryIndex {
    /// Builds from codes, sorted and deduplicated for determinism.
    pub fn from_codes(codes: impl IntoIterator<Item = String>) -> Self {
        let mut codes: Vec<String> = codes.into_iter().collect();
        codes.sort();
        codes.dedup();
        let ids = codes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Self { codes, ids }
    }

    pub fn from_records(records: &[TradeRecord]) -> Self {
        Self::from_codes(
            records
                .iter()
                .flat_map(|r| [r.reporter.clone(), r.partner.clone()]),
        )
    }

    pub fn id(&self, code: &str) -> Option<usize> {
        self.ids.get(code).copied()
    }

    pub fn code(&self, id: usize) -> &str {
        &self.codes[id]
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }
}

/// Reconciled export values: `value(j, l)` is the best estimate of the
/// flow from country j to country l.
#[derive(Debug, Clone)]
pub struct ExportMatrix {
    n: usize,
    values: Vec<f64>,
}

impl ExportMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, from: usize, to: usize) -> f64 {
        self.values[from * self.n + to]
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct ReconcileDiagnostics {
    /// Pairs where both the export report and the mirror import report
    /// were present and the larger won.
    pub reconciled_by_max: usize,
    /// Country codes seen in records but absent from the index.
    pub unknown_codes: BTreeSet<String>,
    pub records_skipped_unknown: usize,
}

/// Aggregates records into per-pair flow views and reconciles each ordered
/// pair by taking the larger of the exporter's report and the partner's
/// mirror import report. A single available view is used as-is.
pub fn reconcile_exports(
    records: &[TradeRecord],
    index: &CountryIndex,
) -> (ExportMatrix, ReconcileDiagnostics) {
    let n = index.len();
    let mut export_view = vec![0.0f64; n * n];
    let mut import_view = vec![0.0f64; n * n];
    let mut export_seen = vec![false; n * n];
    let mut import_seen = vec![false; n * n];
    let mut diag = ReconcileDiagnostics::default();

    for record in records {
        let (Some(reporter), Some(partner)) =
            (index.id(&record.reporter), index.id(&record.partner))
        else {
            if index.id(&record.reporter).is_none() {
                diag.unknown_codes.insert(record.reporter.clone());
            }
            if index.id(&record.partner).is_none() {
                diag.unknown_codes.insert(record.partner.clone());
            }
            diag.records_skipped_unknown += 1;
            continue;
        };
        match record.flow {
            // Reporter j exporting to partner l: a view of flow j -> l.
            TradeFlow::Export => {
                let cell = reporter * n + partner;
                export_view[cell] += record.value;
                export_seen[cell] = true;
            }
            // Reporter l importing from partner j: a view of flow j -> l.
            TradeFlow::Import => {
                let cell = partner * n + reporter;
                import_view[cell] += record.value;
                import_seen[cell] = true;
            }
        }
    }

    let mut values = vec![0.0f64; n * n];
    for cell in 0..n * n {
        values[cell] = match (export_seen[cell], import_seen[cell]) {
            (true, true) => {
                diag.reconciled_by_max += 1;
                export_view[cell].max(import_view[cell])
            }
            (true, false) => export_view[cell],
            (false, true) => import_view[cell],
            (false, false) => 0.0,
        };
    }
    (ExportMatrix { n, values }, diag)
}

/// One directed edge per pair along the positive net flow, weighted by the
/// absolute trade difference. Zero-net pairs get no edge, so the output
/// always satisfies the strict no-reciprocal policy.
pub fn net_trade_graph(e: &ExportMatrix) -> Result<WeightedDigraph> {
    let n = e.n();
    let mut edges = Vec::new();
    for j in 0..n {
        for l in (j + 1)..n {
            let d = e.value(j, l) - e.value(l, j);
            if d > 0.0 {
                edges.push((j, l, d));
            } else if d < 0.0 {
                edges.push((l, j, -d));
            }
        }
    }
    WeightedDigraph::from_edge_list(&edges, n, MergePolicy::Reject)
}
