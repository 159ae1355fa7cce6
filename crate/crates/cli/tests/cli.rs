//! Command-surface tests: files, exit codes, determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hermflow"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hermflow-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn generate_writes_graph_truth_and_manifest() {
    let dir = scratch("generate");
    let out = dir.join("run");
    let status = bin()
        .args(["generate", "--n", "48", "--k", "4", "--p", "0.5", "--q", "0.5"])
        .args(["--eta", "0.9", "--seed", "1", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    for file in ["edges.tsv", "truth.csv", "manifest.json"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let manifest: serde_json::Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["parameters"]["n"], 48);
    assert!(manifest["timings_ms"]["generate"].is_number());
    // Nothing outside --out.
    let entries: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn generate_rejects_block_mismatch_with_message() {
    let dir = scratch("genbad");
    let output = bin()
        .args(["generate", "--n", "10", "--k", "4", "--p", "0.5", "--q", "0.5"])
        .args(["--eta", "0.9", "--out", dir.join("x").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("divide"), "message names the constraint: {stderr}");
}

#[test]
fn identical_flags_reproduce_outputs_byte_for_byte() {
    let dir = scratch("determinism");
    let args = |out: &Path| {
        vec![
            "generate".to_string(),
            "--n".into(),
            "60".into(),
            "--k".into(),
            "3".into(),
            "--p".into(),
            "0.4".into(),
            "--q".into(),
            "0.6".into(),
            "--eta".into(),
            "0.8".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.join("a"), dir.join("b"));
    assert!(bin().args(args(&a)).status().unwrap().success());
    assert!(bin().args(args(&b)).status().unwrap().success());
    assert_eq!(read(&a.join("edges.tsv")), read(&b.join("edges.tsv")));
    assert_eq!(read(&a.join("truth.csv")), read(&b.join("truth.csv")));

    // Cluster the generated graph twice as well.
    let (ca, cb) = (dir.join("ca"), dir.join("cb"));
    for out in [&ca, &cb] {
        let status = bin()
            .args(["cluster", "--graph", a.join("edges.tsv").to_str().unwrap()])
            .args(["--k", "3", "--seed", "5", "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&ca.join("labels.csv")), read(&cb.join("labels.csv")));
    assert_eq!(read(&ca.join("diagnostics.json")), read(&cb.join("diagnostics.json")));
}

#[test]
fn cluster_bipartite_fixture_reports_half_flow_ratio() {
    let dir = scratch("bipartite");
    let graph = dir.join("bip.tsv");
    let mut body = String::from("# n=12\n");
    for u in 0..6 {
        for v in 6..12 {
            body.push_str(&format!("{u}\t{v}\t1\n"));
        }
    }
    std::fs::write(&graph, body).unwrap();
    let out = dir.join("out");
    let status = bin()
        .args(["cluster", "--graph", graph.to_str().unwrap()])
        .args(["--k", "2", "--seed", "1", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let diag: serde_json::Value = serde_json::from_str(&read(&out.join("diagnostics.json"))).unwrap();
    assert!((diag["phi"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
    assert!(diag["lambda1"].as_f64().unwrap().abs() <= 1e-7);
    // Sources (0..6) get ordered label 1, sinks 0.
    let labels = read(&out.join("labels.csv"));
    let mut lines = labels.lines().skip(1);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[2], "1");
}

#[test]
fn cluster_sparsify_emits_report_and_smaller_graph() {
    let dir = scratch("sparsify");
    let out = dir.join("gen");
    assert!(bin()
        .args(["generate", "--n", "120", "--k", "4", "--p", "0.6", "--q", "0.6"])
        .args(["--eta", "0.9", "--seed", "2", "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let clus = dir.join("clus");
    let status = bin()
        .args(["cluster", "--graph", out.join("edges.tsv").to_str().unwrap()])
        .args(["--k", "4", "--seed", "2", "--sparsify", "--alpha-s", "0.8"])
        .args(["--out", clus.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&read(&clus.join("preservation.json"))).unwrap();
    let retained = report["edges_retained"].as_u64().unwrap();
    let original = report["edges_original"].as_u64().unwrap();
    assert!(retained < original, "retained {retained} vs original {original}");
    assert!(clus.join("sparsified.tsv").exists());
    let diag: serde_json::Value = serde_json::from_str(&read(&clus.join("diagnostics.json"))).unwrap();
    assert_eq!(diag["lambda2_source"], "estimated");
}

#[test]
fn cluster_baseline_routes_to_parallel_file() {
    let dir = scratch("baseline");
    let gen = dir.join("gen");
    assert!(bin()
        .args(["generate", "--n", "40", "--k", "2", "--p", "0.5", "--q", "0.7"])
        .args(["--eta", "0.95", "--seed", "3", "--out", gen.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let clus = dir.join("clus");
    assert!(bin()
        .args(["cluster", "--graph", gen.join("edges.tsv").to_str().unwrap()])
        .args(["--k", "2", "--seed", "3", "--baseline", "ddsym"])
        .args(["--out", clus.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    assert!(clus.join("baseline_labels.csv").exists());
    assert!(clus.join("labels.csv").exists());
}

#[test]
fn cluster_k_exceeding_vertices_is_input_error() {
    let dir = scratch("toofew");
    let graph = dir.join("tiny.tsv");
    std::fs::write(&graph, "0\t1\t1\n").unwrap();
    let output = bin()
        .args(["cluster", "--graph", graph.to_str().unwrap()])
        .args(["--k", "5", "--out", dir.join("out").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_emits_grid_with_exact_means() {
    let dir = scratch("sweep");
    let out = dir.join("out");
    let status = bin()
        .args(["sweep", "--protocol", "fig1", "--n", "80", "--num-seeds", "2"])
        .args(["--seed0", "4", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("sweep.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "method,p,eta,seed,ari,mean_ari");
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    // 4 p-values x 5 eta x 2 seeds x 3 methods.
    assert_eq!(rows.len(), 120);

    // The mean column is the exact mean of its (method, p, eta) group, and
    // eta = 0.5 rows stay in the no-signal regime for every method.
    for row in &rows {
        let (method, p, eta) = (&row[0], &row[1], &row[2]);
        let ari: f64 = row[4].parse().unwrap();
        let mean: f64 = row[5].parse().unwrap();
        let group: Vec<f64> = rows
            .iter()
            .filter(|r| &r[0] == method && &r[1] == p && &r[2] == eta)
            .map(|r| r[4].parse::<f64>().unwrap())
            .collect();
        let expect = group.iter().sum::<f64>() / group.len() as f64;
        assert!((mean - expect).abs() <= 1e-12);
        if eta == "0.5" {
            assert!(ari <= 0.1, "eta=0.5 row with ari {ari}");
        }
    }
}

fn write_trade_fixture(path: &Path, regime_change: bool) {
    let mut body = String::from("reporter,partner,flow,commodity,year,value\n");
    // 2006/2007: AAA and BBB export to CCC and DDD. With a regime change,
    // 2008 swaps BBB and CCC across the tiers, moving cluster membership
    // (a pure direction reversal would only permute labels, which the
    // optimal matching absorbs).
    for year in [2006, 2007, 2008] {
        let chain: [(&str, &str, i32); 4] = if regime_change && year == 2008 {
            [("AAA", "BBB", 90), ("AAA", "DDD", 80), ("CCC", "BBB", 70), ("CCC", "DDD", 60)]
        } else {
            [("AAA", "CCC", 90), ("AAA", "DDD", 80), ("BBB", "CCC", 70), ("BBB", "DDD", 60)]
        };
        for (exporter, importer, value) in chain {
            body.push_str(&format!("{exporter},{importer},export,270900,{year},{value}\n"));
        }
    }
    std::fs::write(path, body).unwrap();
}

#[test]
fn trade_identical_years_have_zero_drift() {
    let dir = scratch("trade0");
    let input = dir.join("trade.csv");
    write_trade_fixture(&input, false);
    let out = dir.join("out");
    let status = bin()
        .args(["trade", "--input", input.to_str().unwrap()])
        .args(["--commodity", "27", "--years", "2006-2008", "--k", "2", "--seed", "1"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let drift = read(&out.join("drift.csv"));
    for line in drift.lines().skip(1) {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(value, 0.0, "identical years must have zero drift: {line}");
    }
    assert!(out.join("index.tsv").exists());
    assert!(out.join("year_2006_labels.csv").exists());
    assert!(out.join("year_2006_edges.tsv").exists());
}

#[test]
fn trade_regime_change_spikes_drift() {
    let dir = scratch("trade1");
    let input = dir.join("trade.csv");
    write_trade_fixture(&input, true);
    let out = dir.join("out");
    assert!(bin()
        .args(["trade", "--input", input.to_str().unwrap()])
        .args(["--commodity", "27", "--years", "2006-2008", "--k", "2", "--seed", "1"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let drift = read(&out.join("drift.csv"));
    let values: Vec<f64> = drift
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert_eq!(values[0], 0.0, "2006 -> 2007 unchanged");
    assert!(values[1] > 0.0, "2007 -> 2008 rewiring must register: {values:?}");
}

#[test]
fn trade_missing_year_is_skipped_and_reported() {
    let dir = scratch("trade2");
    let input = dir.join("trade.csv");
    write_trade_fixture(&input, false);
    let out = dir.join("out");
    assert!(bin()
        .args(["trade", "--input", input.to_str().unwrap()])
        .args(["--commodity", "27", "--years", "2006,2012", "--k", "2", "--seed", "1"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let diag: serde_json::Value =
        serde_json::from_str(&read(&out.join("trade_diagnostics.json"))).unwrap();
    assert_eq!(diag["skipped_years"], serde_json::json!([2012]));
    assert!(!out.join("year_2012_labels.csv").exists());
}

#[test]
fn config_file_supplies_defaults_flags_override() {
    let dir = scratch("config");
    let config = dir.join("defaults.conf");
    std::fs::write(&config, "n=48\nk=4\np=0.5\nq=0.5\neta=0.9\nseed=6\n").unwrap();
    let out = dir.join("a");
    assert!(bin()
        .args(["generate", "--config", config.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let manifest: serde_json::Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["parameters"]["n"], 48);
    assert_eq!(manifest["parameters"]["seed"], 6);

    // Explicit flag beats the config value.
    let out2 = dir.join("b");
    assert!(bin()
        .args(["generate", "--config", config.to_str().unwrap()])
        .args(["--seed", "7", "--out", out2.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let manifest2: serde_json::Value =
        serde_json::from_str(&read(&out2.join("manifest.json"))).unwrap();
    assert_eq!(manifest2["parameters"]["seed"], 7);
}
