use std::path::PathBuf;

use hermflow_core::cluster::{order_clusters, simple_herm, KMeansConfig};
use hermflow_core::digraph::MergePolicy;
use hermflow_core::eval::{dd_sym_baseline, herm_rw_baseline};
use hermflow_core::hermitian::HermitianLaplacian;
use hermflow_core::io::{read_edge_list, read_sidecar, write_edge_list};
use hermflow_core::solver::{bottom_eigenpair, second_eigenvalue, SolverConfig};
use hermflow_core::sparsify::{preservation_report, sparsify, SparsifierConfig};

use crate::config::{resolve, resolve_required, Config};
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::{CliError, CliResult};

#[derive(clap::Args)]
pub struct ClusterArgs {
    /// Edge-list file (`src<TAB>dst<TAB>weight`, # comments).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Optional `id<TAB>label` sidecar for string vertex ids.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// How duplicate/reciprocal pairs merge when reading: net|sum|reject.
    #[arg(long)]
    merge_policy: Option<String>,
    /// Sparsify before clustering.
    #[arg(long)]
    sparsify: bool,
    /// Sampling constant for the sparsifier.
    #[arg(long)]
    alpha_s: Option<f64>,
    /// Second eigenvalue driving the sampling probabilities; estimated
    /// from the full graph when not supplied.
    #[arg(long)]
    lambda2: Option<f64>,
    /// none | ddsym | hermrw, written to a parallel output file.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: ClusterArgs, config: &Config) -> CliResult<()> {
    let graph_path: PathBuf = resolve_required(args.graph, config, "graph")?;
    let k: usize = resolve_required(args.k, config, "k")?;
    let seed: u64 = resolve(args.seed, config, "seed", 0)?;
    let policy = resolve(args.merge_policy, config, "merge-policy", "net".to_string())?
        .parse::<MergePolicy>()
        .map_err(CliError::Input)?;
    let baseline = resolve(args.baseline, config, "baseline", "none".to_string())?;
    let alpha_s: f64 = resolve(args.alpha_s, config, "alpha-s", 1.0)?;
    ensure_out_dir(&args.out)?;

    let parameters = serde_json::json!({
        "graph": graph_path,
        "sidecar": args.sidecar,
        "k": k,
        "seed": seed,
        "merge_policy": policy,
        "sparsify": args.sparsify,
        "alpha_s": alpha_s,
        "lambda2": args.lambda2,
        "baseline": baseline,
    });
    let mut manifest = RunManifest::new("cluster", parameters, vec![seed]);
    manifest.input(&graph_path);

    let labels_map = args
        .sidecar
        .as_deref()
        .map(read_sidecar)
        .transpose()
        .map_err(CliError::from)?;
    if let Some(p) = args.sidecar.as_deref() {
        manifest.input(p);
    }
    let graph = manifest.stage("read_graph", || {
        read_edge_list(&graph_path, None, policy, labels_map.as_ref())
    })?;

    let solver_cfg = SolverConfig::new(seed).with_max_iterations(1_000_000);
    let kmeans_cfg = KMeansConfig::new(seed);

    // Optionally sparsify, then run the pipeline on the working graph.
    let mut lambda2_source = "none";
    let (working, sparsified) = if args.sparsify {
        let lambda2 = match args.lambda2 {
            Some(l) => {
                lambda2_source = "supplied";
                l
            }
            None => {
                // Estimating from the full graph forfeits the sparsifier's
                // runtime advantage; labeled in the diagnostics.
                lambda2_source = "estimated";
                manifest.stage("estimate_lambda2", || -> CliResult<f64> {
                    let op = HermitianLaplacian::new(&graph, k)?;
                    let bottom = bottom_eigenpair(&op, &solver_cfg)?;
                    Ok(second_eigenvalue(&op, &bottom, &solver_cfg)?.value)
                })?
            }
        };
        let cfg = SparsifierConfig { alpha_s, lambda2, seed };
        let h = manifest.stage("sparsify", || sparsify(&graph, &cfg))?;
        let path = args.out.join("sparsified.tsv");
        write_edge_list(&h.graph, &path)?;
        manifest.output(&path);
        (h.graph.clone(), Some(h))
    } else {
        (graph.clone(), None)
    };

    let (clustering, diagnostics) =
        manifest.stage("cluster", || simple_herm(&working, k, &solver_cfg, &kmeans_cfg))?;

    let labels_path = args.out.join("labels.csv");
    super::write_labels_csv(&labels_path, &clustering)?;
    manifest.output(&labels_path);

    let mut diag_value =
        serde_json::to_value(&diagnostics).map_err(|e| CliError::Input(e.to_string()))?;
    diag_value["lambda2_source"] = serde_json::json!(lambda2_source);

    if let Some(h) = &sparsified {
        let partition = clustering.to_partition().map_err(CliError::from)?;
        let report = manifest.stage("preservation", || {
            preservation_report(&graph, h, &partition, k, &solver_cfg)
        })?;
        let path = args.out.join("preservation.json");
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Input(e.to_string()))?,
        )?;
        manifest.output(&path);
        diag_value["sparsifier"] = serde_json::json!({
            "retained": h.retained,
            "expected_retained": h.expected_retained,
            "original_edges": graph.edge_count(),
        });
    }

    match baseline.as_str() {
        "none" => {}
        "ddsym" | "hermrw" => {
            let result = manifest.stage("baseline", || -> CliResult<_> {
                let c = match baseline.as_str() {
                    "ddsym" => dd_sym_baseline(&working, k, &kmeans_cfg)?,
                    _ => herm_rw_baseline(&working, k, &kmeans_cfg)?,
                };
                Ok(order_clusters(&working, &c)?)
            })?;
            let path = args.out.join("baseline_labels.csv");
            super::write_labels_csv(&path, &result)?;
            manifest.output(&path);
            diag_value["baseline"] = serde_json::json!(baseline);
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown baseline {other:?} (expected none|ddsym|hermrw)"
            )))
        }
    }

    let diag_path = args.out.join("diagnostics.json");
    std::fs::write(
        &diag_path,
        serde_json::to_string_pretty(&diag_value).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    manifest.output(&diag_path);
    manifest.write(&args.out)
}
