use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use hermflow_core::cluster::{simple_herm, KMeansConfig};
use hermflow_core::eval::{drift_series, MatchWeight};
use hermflow_core::flow::Partition;
use hermflow_core::io::{write_edge_list, write_sidecar};
use hermflow_core::solver::SolverConfig;
use hermflow_core::trade::{
    net_trade_graph, parse_trade_csv, reconcile_exports, ColumnMap, CountryIndex, TradeFilter,
    TradeRecord,
};

use crate::config::{resolve, resolve_required, Config};
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::{CliError, CliResult};

#[derive(clap::Args)]
pub struct TradeArgs {
    /// Input CSV file(s).
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Commodity code prefix, e.g. 27 for all 27xxxx codes.
    #[arg(long)]
    commodity: Option<String>,
    /// Years as a range (2006-2009) or comma list (2006,2008).
    #[arg(long)]
    years: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV delimiter (single character).
    #[arg(long)]
    delimiter: Option<char>,
    /// Column overrides as name=header, repeatable: --column value="Trade Value".
    #[arg(long = "column")]
    columns: Vec<String>,
    /// count or volume weighting for the drift series.
    #[arg(long)]
    weight_mode: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_years(spec: &str) -> CliResult<Vec<i32>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once('-') {
        let a: i32 = a.trim().parse().map_err(|_| bad_years(spec))?;
        let b: i32 = b.trim().parse().map_err(|_| bad_years(spec))?;
        if b < a {
            return Err(bad_years(spec));
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|y| y.trim().parse().map_err(|_| bad_years(spec)))
        .collect()
}

fn bad_years(spec: &str) -> CliError {
    CliError::Input(format!("cannot parse years {spec:?} (expected 2006-2009 or 2006,2008)"))
}

fn column_map(overrides: &[String], config: &Config) -> CliResult<ColumnMap> {
    let mut map = ColumnMap::default();
    let mut apply = |key: &str, value: &str| -> CliResult<()> {
        let slot = match key {
            "reporter" => &mut map.reporter,
            "partner" => &mut map.partner,
            "flow" => &mut map.flow,
            "commodity" => &mut map.commodity,
            "year" => &mut map.year,
            "value" => &mut map.value,
            other => {
                return Err(CliError::Input(format!(
                    "unknown column name {other:?} (expected reporter|partner|flow|commodity|year|value)"
                )))
            }
        };
        *slot = value.to_string();
        Ok(())
    };
    for key in ["reporter", "partner", "flow", "commodity", "year", "value"] {
        if let Some(v) = config.get(&format!("column-{key}")) {
            apply(key, v)?;
        }
    }
    for spec in overrides {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected name=header, got {spec:?}")))?;
        apply(key.trim(), value.trim())?;
    }
    Ok(map)
}

#[derive(serde::Serialize)]
struct YearDiagnostics {
    records: usize,
    reconciled_by_max: usize,
    unknown_codes: usize,
    vertices: usize,
    edges: usize,
    isolated: usize,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    phi: Option<f64>,
    clustered: bool,
}

pub fn run(args: TradeArgs, config: &Config) -> CliResult<()> {
    if args.input.is_empty() {
        return Err(CliError::Input("at least one --input file is required".into()));
    }
    let years = parse_years(&resolve_required(args.years, config, "years")?)?;
    let k: usize = resolve(args.k, config, "k", 4)?;
    let seed: u64 = resolve(args.seed, config, "seed", 0)?;
    let commodity = match args.commodity {
        Some(c) => Some(c),
        None => config.get("commodity").cloned(),
    };
    let delimiter = resolve(args.delimiter, config, "delimiter", ',')? as u8;
    let weight_mode = resolve(args.weight_mode, config, "weight-mode", "count".to_string())?;
    let weight = match weight_mode.as_str() {
        "count" => MatchWeight::Count,
        "volume" => MatchWeight::Volume,
        other => {
            return Err(CliError::Input(format!(
                "unknown weight mode {other:?} (expected count|volume)"
            )))
        }
    };
    let columns = column_map(&args.columns, config)?;
    ensure_out_dir(&args.out)?;

    let parameters = serde_json::json!({
        "input": args.input,
        "commodity": commodity,
        "years": years,
        "k": k,
        "seed": seed,
        "delimiter": (delimiter as char).to_string(),
        "columns": columns,
        "weight_mode": weight_mode,
    });
    let mut manifest = RunManifest::new("trade", parameters, vec![seed]);

    // Single pass per file: filter by commodity, bucket by year.
    let filter = TradeFilter { commodity_prefix: commodity.clone(), year: None };
    let mut by_year: BTreeMap<i32, Vec<TradeRecord>> = BTreeMap::new();
    let mut total_parse = hermflow_core::trade::ParseDiagnostics::default();
    manifest.stage("parse", || -> CliResult<()> {
        for path in &args.input {
            let (records, diag) = parse_trade_csv(path, &columns, delimiter, &filter)?;
            total_parse.rows_read += diag.rows_read;
            total_parse.rows_kept += diag.rows_kept;
            total_parse.rows_malformed += diag.rows_malformed;
            total_parse.rows_filtered_out += diag.rows_filtered_out;
            for record in records {
                if years.contains(&record.year) {
                    by_year.entry(record.year).or_default().push(record);
                }
            }
        }
        Ok(())
    })?;
    for path in &args.input {
        manifest.input(path);
    }

    // Shared country universe across all requested years.
    let index = CountryIndex::from_codes(
        by_year
            .values()
            .flatten()
            .flat_map(|r| [r.reporter.clone(), r.partner.clone()]),
    );
    let index_path = args.out.join("index.tsv");
    write_sidecar(index.codes(), &index_path)?;
    manifest.output(&index_path);

    let solver_cfg = SolverConfig::new(seed).with_max_iterations(1_000_000);
    let kmeans_cfg = KMeansConfig::new(seed);

    let mut snapshots: Vec<(i32, Partition, hermflow_core::WeightedDigraph)> = Vec::new();
    let mut year_diags: BTreeMap<i32, YearDiagnostics> = BTreeMap::new();
    let mut skipped_years: Vec<i32> = Vec::new();

    for &year in &years {
        let records = by_year.get(&year).map(Vec::as_slice).unwrap_or(&[]);
        if records.is_empty() {
            eprintln!("warning: no records for year {year}; skipped");
            skipped_years.push(year);
            continue;
        }
        let label = format!("year_{year}");
        let (graph, reconcile_diag) = manifest.stage(&format!("{label}_build"), || {
            let (matrix, diag) = reconcile_exports(records, &index);
            net_trade_graph(&matrix).map(|g| (g, diag))
        })?;
        let edges_path = args.out.join(format!("{label}_edges.tsv"));
        write_edge_list(&graph, &edges_path)?;
        manifest.output(&edges_path);

        let active = graph.active_vertices().len();
        let mut diag = YearDiagnostics {
            records: records.len(),
            reconciled_by_max: reconcile_diag.reconciled_by_max,
            unknown_codes: reconcile_diag.unknown_codes.len(),
            vertices: graph.vertex_count(),
            edges: graph.edge_count(),
            isolated: graph.vertex_count() - active,
            lambda1: None,
            lambda2: None,
            phi: None,
            clustered: false,
        };
        if active < k {
            eprintln!("warning: year {year} has {active} connected countries, fewer than k = {k}; skipped");
            skipped_years.push(year);
            year_diags.insert(year, diag);
            continue;
        }
        let (clustering, run_diag) = manifest.stage(&format!("{label}_cluster"), || {
            simple_herm(&graph, k, &solver_cfg, &kmeans_cfg)
        })?;
        diag.lambda1 = Some(run_diag.lambda1);
        diag.lambda2 = Some(run_diag.lambda2);
        diag.phi = Some(run_diag.phi);
        diag.clustered = true;
        year_diags.insert(year, diag);

        // Choropleth-ready labels keyed by country code; the highest
        // ordered label marks the start of the trade chain.
        let labels_path = args.out.join(format!("{label}_labels.csv"));
        let mut out = std::io::BufWriter::new(std::fs::File::create(&labels_path)?);
        writeln!(out, "code,label,ordered_label")?;
        for id in 0..index.len() {
            let raw = clustering.kmeans_labels[id].map_or(-1i64, |l| l as i64);
            let ordered = clustering.labels[id].map_or(-1i64, |l| l as i64);
            writeln!(out, "{},{raw},{ordered}", index.code(id))?;
        }
        out.flush()?;
        manifest.output(&labels_path);

        snapshots.push((year, clustering.to_partition().map_err(CliError::from)?, graph));
    }

    // Drift series over consecutive clustered years; volume mode weighs by
    // the earlier year's degrees.
    let drift_path = args.out.join("drift.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&drift_path)?);
    writeln!(out, "from_year,to_year,symmetric_difference")?;
    if snapshots.len() >= 2 {
        let partitions: Vec<Partition> = snapshots.iter().map(|(_, p, _)| p.clone()).collect();
        let graphs: Vec<&hermflow_core::WeightedDigraph> =
            snapshots.iter().map(|(_, _, g)| g).collect();
        let graphs = (weight == MatchWeight::Volume).then_some(graphs.as_slice());
        let series = manifest.stage("drift", || drift_series(&partitions, weight, graphs))?;
        for (pair, value) in snapshots.windows(2).zip(series) {
            writeln!(out, "{},{},{value}", pair[0].0, pair[1].0)?;
        }
    }
    out.flush()?;
    manifest.output(&drift_path);

    let diagnostics = serde_json::json!({
        "parse": total_parse,
        "years": year_diags,
        "skipped_years": skipped_years,
        "countries": index.len(),
    });
    let diag_path = args.out.join("trade_diagnostics.json");
    std::fs::write(
        &diag_path,
        serde_json::to_string_pretty(&diagnostics).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    manifest.output(&diag_path);
    manifest.write(&args.out)
}
