//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test -p hermflow-cli --test acceptance`
//! (add `-- --nocapture` to see the lines for passing criteria too).

use std::sync::Mutex;
use std::time::{Duration, Instant};

use hermflow_core::Complex64;

use hermflow_core::cluster::{center_cost_identity, simple_herm, KMeansConfig};
use hermflow_core::digraph::{MergePolicy, WeightedDigraph};
use hermflow_core::dsbm::{self, DsbmParams, DsbmVariant};
use hermflow_core::eval::{
    adjusted_rand_index, best_matching, dd_sym_baseline, herm_rw_baseline, MatchWeight,
};
use hermflow_core::flow::{
    flow_ratio, gamma_report, indicator_vector, max_flow_ratio_with_limits, BruteForceLimits,
    Partition,
};
use hermflow_core::hermitian::HermitianLaplacian;
use hermflow_core::rng::{derive_seed, SplitMix64};
use hermflow_core::solver::{
    bottom_eigenpair, dense_spectrum, second_eigenvalue, SolverConfig,
};
use hermflow_core::sparsify::{
    preservation_report, sampling_probabilities, sparsify, SparsifierConfig,
};
use hermflow_core::trade::{
    net_trade_graph, parse_trade_csv, reconcile_exports, ColumnMap, CountryIndex, TradeFilter,
    TradeFlow, TradeRecord,
};

/// Serializes the criteria so wall-clock limits are measured fairly.
static SERIAL: Mutex<()> = Mutex::new(());

fn finish(criterion: u32, description: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {criterion}: {description} ({detail})");
    assert!(pass, "criterion {criterion} failed: {description} ({detail})");
}

fn random_digraph(seed: u64, n: usize, p: f64) -> WeightedDigraph {
    dsbm::random_digraph(n, p, seed)
}

/// Random valid partition over the non-isolated vertices.
fn random_partition(g: &WeightedDigraph, k: usize, rng: &mut SplitMix64) -> Option<Partition> {
    let active = g.active_vertices();
    if active.len() < k {
        return None;
    }
    let mut labels = vec![None; g.vertex_count()];
    for (i, &u) in active.iter().enumerate() {
        let l = if i < k { i } else { rng.next_range(k) };
        labels[u] = Some(l as u32);
    }
    Partition::new(labels, k).ok()
}

#[test]
fn criterion_01_center_cost_identity() {
    let _guard = SERIAL.lock().unwrap();
    let start = Instant::now();
    let mut rng = SplitMix64::new(1001);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut seed = 0u64;
    while checked < 50 {
        seed += 1;
        let n = 20 + (seed as usize % 41); // up to 60
        let k = 2 + (seed as usize % 3); // {2, 3, 4}
        let g = random_digraph(9000 + seed, n, 0.35);
        let Some(p) = random_partition(&g, k, &mut rng) else { continue };
        if flow_ratio(&g, &p).is_err() {
            continue;
        }
        let op = HermitianLaplacian::new(&g, k).unwrap();
        let f1 = dense_spectrum(&op).unwrap().remove(0).vector;
        let y = indicator_vector(&g, &p).unwrap();
        let (lhs, rhs) = center_cost_identity(&g, &p, &f1, &y).unwrap();
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs));
        checked += 1;
    }
    let elapsed = start.elapsed();
    finish(
        1,
        "center-cost identity on 50 random digraphs",
        worst <= 1e-10 && elapsed < Duration::from_secs(30),
        format!("worst relative gap {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_bottom_eigenvalue_bound_per_partition() {
    let _guard = SERIAL.lock().unwrap();
    let start = Instant::now();
    let mut rng = SplitMix64::new(2002);
    let mut checked = 0;
    let mut violations = 0;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let n = 8 + (seed as usize % 33); // up to 40
        let k = 2 + (seed as usize % 3);
        let g = random_digraph(20_000 + seed, n, 0.4);
        let Some(p) = random_partition(&g, k, &mut rng) else { continue };
        let Ok(report) = flow_ratio(&g, &p) else { continue };
        let y = indicator_vector(&g, &p).unwrap();
        let op = HermitianLaplacian::new(&g, k).unwrap();
        let quad = op.rayleigh_quotient(&y).unwrap();
        let lambda1 = dense_spectrum(&op).unwrap()[0].value;
        if !(lambda1 <= quad + 1e-9 && quad <= report.eigenvalue_bound + 1e-9) {
            violations += 1;
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    finish(
        2,
        "lambda_1 <= y*Ly <= 1 - (4/k) phi on 200 random pairs",
        violations == 0 && elapsed < Duration::from_secs(60),
        format!("{violations} violations, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_bipartite_equality_case() {
    let _guard = SERIAL.lock().unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for side in 2..=20usize {
        let mut edges = Vec::new();
        for u in 0..side {
            for v in 0..side {
                edges.push((u, side + v, 1.0));
            }
        }
        let g = WeightedDigraph::from_edge_list(&edges, 2 * side, MergePolicy::Reject).unwrap();
        let limits = BruteForceLimits { max_vertices: 40, max_k: 2 };
        let (theta, _) = max_flow_ratio_with_limits(&g, 2, limits).unwrap();
        let op = HermitianLaplacian::new(&g, 2).unwrap();
        let lambda1 = dense_spectrum(&op).unwrap()[0].value;
        if theta != 0.5 || lambda1 > 1e-9 {
            pass = false;
            detail = format!("side {side}: theta {theta}, lambda1 {lambda1:.2e}");
            break;
        }
    }
    if detail.is_empty() {
        detail = "theta exactly 1/2 and lambda_1 <= 1e-9 for sides 2..=20".into();
    }
    finish(3, "one-direction bipartite equality case", pass, detail);
}

#[test]
fn criterion_04_indicator_alignment_bounds() {
    let _guard = SERIAL.lock().unwrap();
    let mut instances = 0;
    let mut violations = 0;
    for (k, n, p, q) in [(2usize, 12usize, 0.2, 0.9), (2, 14, 0.25, 0.85), (3, 12, 0.15, 0.9)] {
        for seed in 1u64..=12 {
            let params = DsbmParams {
                n,
                k,
                p,
                q,
                eta: 0.95,
                variant: DsbmVariant::PathOnly,
                seed,
            };
            let (g, _) = dsbm::generate(&params).unwrap();
            if g.active_vertices().len() < n {
                continue;
            }
            let limits = BruteForceLimits { max_vertices: 14, max_k: 3 };
            let (theta, best) = max_flow_ratio_with_limits(&g, k, limits).unwrap();
            let spectrum = dense_spectrum(&HermitianLaplacian::new(&g, k).unwrap()).unwrap();
            let report = gamma_report(k, theta, spectrum[0].value, spectrum[1].value);
            if report.infinite || report.gamma <= 1.0 {
                continue;
            }
            instances += 1;
            let y = indicator_vector(&g, &best).unwrap();
            let f1 = &spectrum[0].vector;
            let alpha: Complex64 = f1.iter().zip(&y).map(|(f, yi)| f.conj() * yi).sum();
            let err_y: f64 =
                y.iter().zip(f1).map(|(yi, fi)| (yi - alpha * fi).norm_sqr()).sum();
            let beta = Complex64::new(1.0, 0.0) / alpha;
            let err_f: f64 =
                f1.iter().zip(&y).map(|(fi, yi)| (fi - beta * yi).norm_sqr()).sum();
            if err_y > 1.0 / report.gamma + 1e-9 || err_f > 1.0 / (report.gamma - 1.0) + 1e-9 {
                violations += 1;
            }
        }
    }
    finish(
        4,
        "indicator/eigenvector alignment bounds on planted instances with gamma > 1",
        instances >= 20 && violations == 0,
        format!("{instances} instances with gamma > 1, {violations} violations"),
    );
}

#[test]
fn criterion_05_eigensolver_oracle_agreement() {
    let _guard = SERIAL.lock().unwrap();
    let ks = [2usize, 3, 4, 8];
    let mut worst_l1: f64 = 0.0;
    let mut worst_l2: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    for i in 0..50u64 {
        let n = 24 + (i as usize % 41); // up to 64
        let k = ks[i as usize % 4];
        let g = random_digraph(5000 + i, n, 0.35);
        let op = HermitianLaplacian::new(&g, k).unwrap();
        if op.dim() < 2 {
            continue;
        }
        let cfg = SolverConfig::new(derive_seed(77, i))
            .with_tolerance(1e-9)
            .with_max_iterations(400_000);
        let bottom = bottom_eigenpair(&op, &cfg).unwrap();
        let second = second_eigenvalue(&op, &bottom, &cfg).unwrap();
        let dense = dense_spectrum(&op).unwrap();
        worst_l1 = worst_l1.max((bottom.value - dense[0].value).abs());
        worst_l2 = worst_l2.max((second.value - dense[1].value).abs());
        worst_residual = worst_residual.max(bottom.residual).max(second.residual);
    }
    finish(
        5,
        "iterative eigensolver agrees with the dense oracle on 50 graphs",
        worst_l1 <= 1e-7 && worst_l2 <= 1e-6 && worst_residual <= 1e-8,
        format!(
            "|dl1| {worst_l1:.2e}, |dl2| {worst_l2:.2e}, residual {worst_residual:.2e}"
        ),
    );
}

fn mean_pipeline_ari(params: DsbmParams, seeds: u64) -> f64 {
    let mut total = 0.0;
    for s in 1..=seeds {
        let mut p = params;
        p.seed = derive_seed(params.seed, s);
        let (g, truth) = dsbm::generate(&p).unwrap();
        let solver_cfg = SolverConfig::new(p.seed).with_max_iterations(1_000_000);
        let kmeans_cfg = KMeansConfig::new(p.seed);
        let (c, _) = simple_herm(&g, p.k, &solver_cfg, &kmeans_cfg).unwrap();
        total += adjusted_rand_index(&c.to_partition().unwrap(), &truth).unwrap();
    }
    total / seeds as f64
}

#[test]
fn criterion_06_benchmark_recovery_curve() {
    let _guard = SERIAL.lock().unwrap();
    let start = Instant::now();
    let mut means = Vec::new();
    for eta in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let params = DsbmParams {
            n: 200,
            k: 4,
            p: 0.5,
            q: 0.5,
            eta,
            variant: DsbmVariant::AllPairs,
            seed: 6000,
        };
        means.push(mean_pipeline_ari(params, 5));
    }
    let elapsed = start.elapsed();
    let non_decreasing = means.windows(2).all(|w| w[1] >= w[0] - 0.05);
    let pass = means[0] <= 0.1
        && means[4] >= 0.8
        && non_decreasing
        && elapsed < Duration::from_secs(120);
    finish(
        6,
        "benchmark recovery curve over eta (n=200, k=4, p=q=0.5)",
        pass,
        format!("means {means:.3?}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_07_outperforms_baselines_on_path_graphs() {
    let _guard = SERIAL.lock().unwrap();
    let start = Instant::now();
    let mut sums = [0.0f64; 3];
    let seeds = 5u64;
    for s in 1..=seeds {
        let params = DsbmParams {
            n: 400,
            k: 8,
            p: 0.075,
            q: 0.075,
            eta: 0.9,
            variant: DsbmVariant::PathOnly,
            seed: derive_seed(7000, s),
        };
        let (g, truth) = dsbm::generate(&params).unwrap();
        let solver_cfg = SolverConfig::new(params.seed).with_max_iterations(1_000_000);
        let kmeans_cfg = KMeansConfig::new(params.seed);
        let (sh, _) = simple_herm(&g, 8, &solver_cfg, &kmeans_cfg).unwrap();
        sums[0] += adjusted_rand_index(&sh.to_partition().unwrap(), &truth).unwrap();
        let dd = dd_sym_baseline(&g, 8, &kmeans_cfg).unwrap();
        sums[1] += adjusted_rand_index(&dd.to_partition().unwrap(), &truth).unwrap();
        let hr = herm_rw_baseline(&g, 8, &kmeans_cfg).unwrap();
        sums[2] += adjusted_rand_index(&hr.to_partition().unwrap(), &truth).unwrap();
    }
    let means: Vec<f64> = sums.iter().map(|s| s / seeds as f64).collect();
    let elapsed = start.elapsed();
    let pass = means[0] >= means[1].max(means[2]) - 0.05 && elapsed < Duration::from_secs(300);
    finish(
        7,
        "pipeline matches or beats both baselines on the path protocol",
        pass,
        format!(
            "simpleherm {:.3} vs ddsym {:.3}, hermrw {:.3}, {elapsed:.2?}",
            means[0], means[1], means[2]
        ),
    );
}

#[test]
fn criterion_08_sparsifier_preserves_structure() {
    let _guard = SERIAL.lock().unwrap();
    let trials = 10u64;
    let mut size_ok = 0;
    let mut band_ok = 0;
    let mut l2_ok = 0;
    let mut reweight_exact = true;
    for trial in 1..=trials {
        let params = DsbmParams {
            n: 400,
            k: 4,
            p: 0.3,
            q: 0.3,
            eta: 0.9,
            variant: DsbmVariant::AllPairs,
            seed: derive_seed(8000, trial),
        };
        let (g, truth) = dsbm::generate(&params).unwrap();
        let solver_cfg = SolverConfig::new(params.seed).with_max_iterations(1_000_000);
        let op = HermitianLaplacian::new(&g, 4).unwrap();
        let bottom = bottom_eigenpair(&op, &solver_cfg).unwrap();
        let lambda2 = second_eigenvalue(&op, &bottom, &solver_cfg).unwrap().value;
        let cfg = SparsifierConfig::new(lambda2, params.seed);
        let h = sparsify(&g, &cfg).unwrap();
        if (h.retained as f64) <= 8.0 / lambda2 * 400.0 * (400.0f64).ln() {
            size_ok += 1;
        }
        for &(u, v, wh) in h.graph.edges() {
            let w = g.weight(u, v).unwrap();
            let (_, _, p_e) = sampling_probabilities(&g, u, v, &cfg).unwrap();
            if (wh * p_e - w).abs() > 1e-12 * (1.0 + w) {
                reweight_exact = false;
            }
        }
        let report = preservation_report(&g, &h, &truth, 4, &solver_cfg).unwrap();
        let in_band = report.cut_ratios.iter().flatten().all(|r| (0.5..=2.0).contains(r))
            && report.volume_ratios.iter().flatten().all(|r| (0.5..=2.0).contains(r))
            && report.cut_ratios.iter().all(Option::is_some)
            && report.volume_ratios.iter().all(Option::is_some);
        if in_band {
            band_ok += 1;
        }
        if let (Some(l2g), Some(l2h)) = (report.lambda2_original, report.lambda2_sparsified) {
            if l2h >= l2g / 4.0 {
                l2_ok += 1;
            }
        }
    }
    let pass = size_ok == trials && band_ok >= 9 && l2_ok >= 9 && reweight_exact;
    finish(
        8,
        "sparsifier size bound, cut/volume bands, eigenvalue floor, exact reweighting",
        pass,
        format!(
            "size {size_ok}/{trials}, bands {band_ok}/{trials}, lambda2 {l2_ok}/{trials}, reweight exact: {reweight_exact}"
        ),
    );
}

/// Pair-counting ARI, the independent oracle for criterion 9.
fn ari_pair_oracle(a: &Partition, b: &Partition) -> f64 {
    let n = a.len();
    let (mut ss, mut sd, mut ds, mut dd) = (0u64, 0u64, 0u64, 0u64);
    for u in 0..n {
        for v in (u + 1)..n {
            let (Some(au), Some(av)) = (a.label(u), a.label(v)) else { continue };
            let (Some(bu), Some(bv)) = (b.label(u), b.label(v)) else { continue };
            match (au == av, bu == bv) {
                (true, true) => ss += 1,
                (true, false) => sd += 1,
                (false, true) => ds += 1,
                (false, false) => dd += 1,
            }
        }
    }
    let num = 2.0 * (ss as f64 * dd as f64 - sd as f64 * ds as f64);
    let den = ((ss + sd) as f64) * ((sd + dd) as f64) + ((ss + ds) as f64) * ((ds + dd) as f64);
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

#[test]
fn criterion_09_ari_matches_pair_counting_oracle() {
    let _guard = SERIAL.lock().unwrap();
    let mut rng = SplitMix64::new(909);
    let mut worst: f64 = 0.0;
    let mut exact_symmetry = true;
    let mut exact_relabel = true;
    for _ in 0..100 {
        let n = 8 + rng.next_range(43); // up to 50
        let ka = 2 + rng.next_range(4);
        let kb = 2 + rng.next_range(4);
        let la: Vec<usize> = (0..n).map(|i| if i < ka { i } else { rng.next_range(ka) }).collect();
        let lb: Vec<usize> = (0..n).map(|i| if i < kb { i } else { rng.next_range(kb) }).collect();
        let a = Partition::from_dense(&la, ka).unwrap();
        let b = Partition::from_dense(&lb, kb).unwrap();
        let lib = adjusted_rand_index(&a, &b).unwrap();
        worst = worst.max((lib - ari_pair_oracle(&a, &b)).abs());
        let swapped = adjusted_rand_index(&b, &a).unwrap();
        exact_symmetry &= lib.to_bits() == swapped.to_bits();
        let rotated: Vec<usize> = la.iter().map(|&l| (l + 1) % ka).collect();
        let ra = Partition::from_dense(&rotated, ka).unwrap();
        exact_relabel &= adjusted_rand_index(&ra, &b).unwrap().to_bits() == lib.to_bits();
    }
    finish(
        9,
        "ARI equals the pair-counting oracle; symmetry and relabel invariance exact",
        worst <= 1e-12 && exact_symmetry && exact_relabel,
        format!("worst gap {worst:.2e}, symmetry {exact_symmetry}, relabel {exact_relabel}"),
    );
}

#[test]
fn criterion_10_matching_agrees_with_enumeration() {
    let _guard = SERIAL.lock().unwrap();
    let mut rng = SplitMix64::new(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = 2 + rng.next_range(4); // up to 5
        let n = k + 5 + rng.next_range(20);
        let la: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.next_range(k) }).collect();
        let lb: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.next_range(k) }).collect();
        let a = Partition::from_dense(&la, k).unwrap();
        let b = Partition::from_dense(&lb, k).unwrap();
        let fast = best_matching(&a, &b, MatchWeight::Count, None)
            .unwrap()
            .total_symmetric_difference;

        // Exhaustive enumeration over all k! bijections.
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best = f64::INFINITY;
        loop {
            let mut total = 0.0;
            for (ca, &cb) in perm.iter().enumerate() {
                let size_a = la.iter().filter(|&&l| l == ca).count() as f64;
                let size_b = lb.iter().filter(|&&l| l == cb).count() as f64;
                let inter =
                    (0..n).filter(|&u| la[u] == ca && lb[u] == cb).count() as f64;
                total += size_a + size_b - 2.0 * inter;
            }
            best = best.min(total);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        worst = worst.max((fast - best).abs());
    }
    finish(
        10,
        "optimal matching agrees with k! enumeration on 100 pairs",
        worst <= 1e-9,
        format!("worst gap {worst:.2e}"),
    );
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[test]
fn criterion_11_trade_ingestion_invariants() {
    let _guard = SERIAL.lock().unwrap();
    let dir = std::env::temp_dir().join(format!("hermflow-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    // Mirrored-report fixture: export 10 vs mirror import 12 must pick 12.
    let mirrored = dir.join("mirrored.csv");
    std::fs::write(
        &mirrored,
        "reporter,partner,flow,commodity,year,value\n\
         USA,CHN,export,270900,2008,10\n\
         CHN,USA,import,270900,2008,12\n\
         CHN,USA,export,271000,2008,3\n",
    )
    .unwrap();
    let filter = TradeFilter { commodity_prefix: Some("27".into()), year: Some(2008) };
    let (records, _) = parse_trade_csv(&mirrored, &ColumnMap::default(), b',', &filter).unwrap();
    let index = CountryIndex::from_records(&records);
    let (matrix, diag) = reconcile_exports(&records, &index);
    let usa = index.id("USA").unwrap();
    let chn = index.id("CHN").unwrap();
    let max_rule = matrix.value(usa, chn) == 12.0 && diag.reconciled_by_max == 1;

    // Randomized records: antisymmetry, nonnegative weights, round trip.
    let mut rng = SplitMix64::new(42);
    let codes: Vec<String> = (0..12).map(|i| format!("C{i:02}")).collect();
    let mut records = Vec::new();
    for i in 0..12usize {
        for j in 0..12usize {
            if i != j && rng.next_f64() < 0.6 {
                records.push(TradeRecord {
                    reporter: codes[i].clone(),
                    partner: codes[j].clone(),
                    flow: if rng.next_f64() < 0.5 { TradeFlow::Export } else { TradeFlow::Import },
                    commodity: "270900".into(),
                    year: 2008,
                    value: (1 + rng.next_range(1000)) as f64,
                });
            }
        }
    }
    let index = CountryIndex::from_codes(codes);
    let (matrix, _) = reconcile_exports(&records, &index);
    let g = net_trade_graph(&matrix).unwrap();
    let mut antisymmetric = true;
    let mut nonnegative = true;
    for &(u, v, w) in g.edges() {
        nonnegative &= w > 0.0;
        antisymmetric &= g.weight(v, u).is_none();
    }
    let path = dir.join("net.tsv");
    hermflow_core::io::write_edge_list(&g, &path).unwrap();
    let back = hermflow_core::io::read_edge_list(&path, None, MergePolicy::Reject, None).unwrap();
    let round_trip = back == g;

    finish(
        11,
        "trade ingestion: max rule, antisymmetry, nonnegative weights, round trip",
        max_rule && antisymmetric && nonnegative && round_trip,
        format!(
            "max rule {max_rule}, antisymmetric {antisymmetric}, nonnegative {nonnegative}, round trip {round_trip}"
        ),
    );
}

#[test]
fn criterion_12_volume_recovery_on_strong_instances() {
    let _guard = SERIAL.lock().unwrap();
    let mut good_seeds = 0;
    let seeds = 5u64;
    for s in 1..=seeds {
        let params = DsbmParams {
            n: 400,
            k: 4,
            p: 0.1,
            q: 0.5,
            eta: 0.95,
            variant: DsbmVariant::PathOnly,
            seed: derive_seed(12_000, s),
        };
        let (g, truth) = dsbm::generate(&params).unwrap();
        let solver_cfg = SolverConfig::new(params.seed).with_max_iterations(1_000_000);
        let kmeans_cfg = KMeansConfig::new(params.seed);
        let (c, _) = simple_herm(&g, 4, &solver_cfg, &kmeans_cfg).unwrap();
        let found = c.to_partition().unwrap();
        let matching = best_matching(&found, &truth, MatchWeight::Volume, Some(&g)).unwrap();
        let mut worst: f64 = 0.0;
        for (a_label, matched) in matching.permutation.iter().enumerate() {
            let b_label = matched.expect("equal cluster counts");
            let mut sym = 0.0;
            let mut vol_s = 0.0;
            for u in 0..g.vertex_count() {
                let in_a = found.label(u) == Some(a_label);
                let in_b = truth.label(u) == Some(b_label);
                if in_b {
                    vol_s += g.degree_total(u);
                }
                if in_a != in_b {
                    sym += g.degree_total(u);
                }
            }
            worst = worst.max(sym / vol_s);
        }
        if worst <= 0.1 {
            good_seeds += 1;
        }
    }
    finish(
        12,
        "per-cluster volume recovery under strong signal",
        good_seeds >= 4,
        format!("{good_seeds}/{seeds} seeds within the 10% volume band"),
    );
}

#[test]
fn criterion_13_end_to_end_performance() {
    let _guard = SERIAL.lock().unwrap();
    let dir = std::env::temp_dir().join(format!("hermflow-perf-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let params = DsbmParams {
        n: 2000,
        k: 8,
        p: 0.075,
        q: 0.075,
        eta: 0.9,
        variant: DsbmVariant::PathOnly,
        seed: 13,
    };
    let (g, _) = dsbm::generate(&params).unwrap();
    let graph_path = dir.join("big.tsv");
    hermflow_core::io::write_edge_list(&g, &graph_path).unwrap();

    let out = dir.join("out");
    let start = Instant::now();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_hermflow"))
        .args([
            "cluster",
            "--graph",
            graph_path.to_str().unwrap(),
            "--k",
            "8",
            "--seed",
            "13",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary runs");
    let elapsed = start.elapsed();

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    let timings_recorded = manifest["timings_ms"]
        .as_object()
        .is_some_and(|t| t.contains_key("cluster") && t.contains_key("read_graph"));
    let labels_exist = out.join("labels.csv").exists();

    finish(
        13,
        "end-to-end clustering of n=2000 benchmark under 10 s with timed manifest",
        status.success() && elapsed < Duration::from_secs(10) && timings_recorded && labels_exist,
        format!("exit {status}, {elapsed:.2?}, timings recorded: {timings_recorded}"),
    );
}
