use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use hermflow_core::cluster::{simple_herm, KMeansConfig};
use hermflow_core::dsbm::{self, DsbmParams, DsbmVariant};
use hermflow_core::eval::{adjusted_rand_index, dd_sym_baseline, herm_rw_baseline};
use hermflow_core::rng::derive_seed;
use hermflow_core::solver::SolverConfig;

use crate::config::{resolve, resolve_required, Config};
use crate::manifest::{ensure_out_dir, RunManifest};
use crate::{CliError, CliResult};

const METHODS: [&str; 3] = ["simpleherm", "ddsym", "hermrw"];

#[derive(clap::Args)]
pub struct SweepArgs {
    /// fig1 (all-pairs grid, k=4) or fig2 (path-only grid, k=8).
    #[arg(long)]
    protocol: Option<String>,
    /// Total vertex count; defaults to the protocol's desk scale.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    num_seeds: Option<usize>,
    #[arg(long)]
    seed0: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

struct Protocol {
    k: usize,
    variant: DsbmVariant,
    p_grid: &'static [f64],
    eta_grid: &'static [f64],
    default_n: usize,
}

fn protocol(name: &str) -> CliResult<Protocol> {
    match name {
        "fig1" => Ok(Protocol {
            k: 4,
            variant: DsbmVariant::AllPairs,
            p_grid: &[0.5, 0.6, 0.7, 0.8],
            eta_grid: &[0.5, 0.55, 0.6, 0.65, 0.7],
            default_n: 200,
        }),
        "fig2" => Ok(Protocol {
            k: 8,
            variant: DsbmVariant::PathOnly,
            p_grid: &[0.05, 0.06, 0.075, 0.1],
            eta_grid: &[0.65, 0.7, 0.8, 0.9, 1.0],
            default_n: 400,
        }),
        other => Err(CliError::Input(format!("unknown protocol {other:?} (expected fig1|fig2)"))),
    }
}

pub fn run(args: SweepArgs, config: &Config) -> CliResult<()> {
    let name: String = resolve_required(args.protocol, config, "protocol")?;
    let proto = protocol(&name)?;
    let n = resolve(args.n, config, "n", proto.default_n)?;
    let num_seeds = resolve(args.num_seeds, config, "num-seeds", 5)?;
    let seed0 = resolve(args.seed0, config, "seed0", 1)?;
    if n % proto.k != 0 {
        return Err(CliError::Input(format!("n = {n} must be divisible by k = {}", proto.k)));
    }
    ensure_out_dir(&args.out)?;

    let parameters = serde_json::json!({
        "protocol": name,
        "n": n,
        "k": proto.k,
        "p_grid": proto.p_grid,
        "eta_grid": proto.eta_grid,
        "num_seeds": num_seeds,
        "seed0": seed0,
        "methods": METHODS,
    });
    let mut manifest = RunManifest::new("sweep", parameters, vec![seed0]);

    // One cell per (p, eta, seed); the three methods share the cell graph.
    let mut cells = Vec::new();
    for (pi, &p) in proto.p_grid.iter().enumerate() {
        for (ei, &eta) in proto.eta_grid.iter().enumerate() {
            for si in 0..num_seeds {
                let index = ((pi * proto.eta_grid.len() + ei) * num_seeds + si) as u64;
                cells.push((p, eta, si as u64, derive_seed(seed0, index)));
            }
        }
    }

    let results: Vec<CliResult<[f64; 3]>> = manifest.stage("sweep", || {
        cells
            .par_iter()
            .map(|&(p, eta, _, cell_seed)| -> CliResult<[f64; 3]> {
                let params = DsbmParams {
                    n,
                    k: proto.k,
                    p,
                    q: p,
                    eta,
                    variant: proto.variant,
                    seed: cell_seed,
                };
                let (g, truth) = dsbm::generate(&params)?;
                let solver_cfg =
                    SolverConfig::new(derive_seed(cell_seed, 101)).with_max_iterations(1_000_000);
                let kmeans_cfg = KMeansConfig::new(derive_seed(cell_seed, 202));
                let mut aris = [0.0f64; 3];
                let (sh, _) = simple_herm(&g, proto.k, &solver_cfg, &kmeans_cfg)?;
                aris[0] = adjusted_rand_index(&sh.to_partition()?, &truth)?;
                let dd = dd_sym_baseline(&g, proto.k, &kmeans_cfg)?;
                aris[1] = adjusted_rand_index(&dd.to_partition()?, &truth)?;
                let hr = herm_rw_baseline(&g, proto.k, &kmeans_cfg)?;
                aris[2] = adjusted_rand_index(&hr.to_partition()?, &truth)?;
                Ok(aris)
            })
            .collect()
    });

    let mut rows: Vec<(usize, f64, f64, u64, f64)> = Vec::new(); // (method, p, eta, seed, ari)
    for (cell, result) in cells.iter().zip(results) {
        let aris = result?;
        for (mi, &ari) in aris.iter().enumerate() {
            rows.push((mi, cell.0, cell.1, cell.2, ari));
        }
    }

    // Group means over seeds per (method, p, eta).
    let mean_of = |mi: usize, p: f64, eta: f64| -> f64 {
        let group: Vec<f64> = rows
            .iter()
            .filter(|r| r.0 == mi && r.1 == p && r.2 == eta)
            .map(|r| r.4)
            .collect();
        group.iter().sum::<f64>() / group.len() as f64
    };

    let csv_path = args.out.join("sweep.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(out, "method,p,eta,seed,ari,mean_ari")?;
    for &(mi, p, eta, seed, ari) in &rows {
        let mean = mean_of(mi, p, eta);
        writeln!(out, "{},{p},{eta},{seed},{ari},{mean}", METHODS[mi])?;
    }
    out.flush()?;
    manifest.output(&csv_path);
    manifest.write(&args.out)
}
