use std::path::PathBuf;

use hermflow_core::dsbm::{self, DsbmParams, DsbmVariant};
use hermflow_core::io::write_edge_list;

use crate::config::{resolve, resolve_required, Config};
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::{CliError, CliResult};

#[derive(clap::Args)]
pub struct GenerateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Intra-block edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Cross-block edge probability.
    #[arg(long)]
    q: Option<f64>,
    /// Direction bias along the chain, in [0.5, 1].
    #[arg(long)]
    eta: Option<f64>,
    /// all_pairs or path_only.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: GenerateArgs, config: &Config) -> CliResult<()> {
    let params = DsbmParams {
        n: resolve_required(args.n, config, "n")?,
        k: resolve_required(args.k, config, "k")?,
        p: resolve_required(args.p, config, "p")?,
        q: resolve_required(args.q, config, "q")?,
        eta: resolve_required(args.eta, config, "eta")?,
        variant: resolve(args.variant, config, "variant", "all_pairs".to_string())?
            .parse::<DsbmVariant>()
            .map_err(CliError::Input)?,
        seed: resolve(args.seed, config, "seed", 0)?,
    };
    params.validate().map_err(CliError::from)?;
    ensure_out_dir(&args.out)?;

    let mut manifest = RunManifest::new(
        "generate",
        serde_json::to_value(params).map_err(|e| CliError::Input(e.to_string()))?,
        vec![params.seed],
    );
    let (graph, truth) = manifest.stage("generate", || dsbm::generate(&params))?;

    let edges_path = args.out.join("edges.tsv");
    let truth_path = args.out.join("truth.csv");
    manifest.stage("write", || -> CliResult<()> {
        write_edge_list(&graph, &edges_path)?;
        super::write_truth_csv(&truth_path, &truth)?;
        Ok(())
    })?;
    manifest.output(&edges_path);
    manifest.output(&truth_path);
    manifest.write(&args.out)
}
