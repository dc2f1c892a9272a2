use gossip_core::graph::{build_complete, build_cycle, Graph};
use gossip_core::harness::{
    emit_csv, fit_baseline_rate, fit_rate, read_csv, run_experiment, ExperimentConfig, GraphSpec,
    InitSpec, PerNode, PhiSpec, DEFAULT_TAIL_FRACTION,
};
use gossip_core::theory::GraphRates;

fn config(
    graph: GraphSpec,
    sigma2: f64,
    phi: f64,
    iterations: u64,
    seeds: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        graph,
        init: InitSpec::Uniform,
        sigma2: PerNode::Scalar(sigma2),
        phi: PhiSpec::Values(PerNode::Scalar(phi)),
        iterations,
        seeds,
        base_seed: 42,
        stride: 1,
        threads: None,
    }
}

/// Decay rate of `E|x - mean|^2` for plain gossip: the leading eigenvalue of
/// `S -> mean_e W_e S W_e` on symmetric matrices orthogonal to the ones vector.
fn second_moment_rate(g: &Graph) -> f64 {
    let n = g.n();
    let project = |s: &mut Vec<f64>| {
        let row: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| s[i * n + j]).sum::<f64>() / n as f64)
            .collect();
        let col: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| s[i * n + j]).sum::<f64>() / n as f64)
            .collect();
        let total = row.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] += total - row[i] - col[j];
            }
        }
    };
    let apply = |s: &[f64]| {
        let mut out = vec![0.0; n * n];
        for &(a, b) in g.edges() {
            let mut w = s.to_vec();
            // W = I - (e_a - e_b)(e_a - e_b)^T / 2 averages rows a, b then columns a, b.
            for j in 0..n {
                let avg = 0.5 * (w[a * n + j] + w[b * n + j]);
                w[a * n + j] = avg;
                w[b * n + j] = avg;
            }
            for i in 0..n {
                let avg = 0.5 * (w[i * n + a] + w[i * n + b]);
                w[i * n + a] = avg;
                w[i * n + b] = avg;
            }
            for (o, v) in out.iter_mut().zip(&w) {
                *o += v / g.m() as f64;
            }
        }
        out
    };
    let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut s: Vec<f64> = (0..n * n)
        .map(|k| ((k * 37 % 17) as f64 - 8.0) / 8.0)
        .collect();
    for i in 0..n {
        for j in 0..i {
            s[i * n + j] = s[j * n + i];
        }
    }
    project(&mut s);
    let mut rate = 0.0;
    for _ in 0..6000 {
        let mut next = apply(&s);
        project(&mut next);
        let len = norm(&next);
        rate = len / norm(&s);
        s = next.into_iter().map(|v| v / len).collect();
    }
    rate
}

#[test]
fn baseline_fit_tracks_second_moment_rate() {
    let g = build_cycle(10).unwrap();
    let oracle = second_moment_rate(&g);
    let rho = GraphRates::new(&g).unwrap().rho();
    assert!((oracle - 0.96345).abs() < 1e-4, "{oracle}");
    assert!(oracle < rho);

    let out = run_experiment(&config(GraphSpec::Cycle { n: 10 }, 0.0, 0.0, 20_000, 200)).unwrap();
    let fit = fit_baseline_rate(&out.trace, DEFAULT_TAIL_FRACTION);
    assert!(!fit.degenerate);
    assert!(fit.rate < 1.0);
    assert!(
        (fit.rate - oracle).abs() < 0.005,
        "fit {} oracle {oracle}",
        fit.rate
    );
}

#[test]
fn noise_driven_complete_graph_follows_noise_rate() {
    let g = build_complete(5).unwrap();
    let rates = GraphRates::new(&g).unwrap();
    let phi = 0.97;
    let predicted = rates.noise_rate(0, phi);
    let report = rates
        .rate_report(&gossip_core::engine::NoiseParams::uniform(5, 1.0, phi).unwrap())
        .unwrap();
    assert_eq!(report.regime.to_string(), "noise-driven");

    let out = run_experiment(&config(GraphSpec::Complete { n: 5 }, 1.0, phi, 20_000, 100)).unwrap();
    let fit = fit_rate(&out.trace, DEFAULT_TAIL_FRACTION);
    assert!(
        (fit.rate - predicted).abs() < 0.005,
        "fit {} predicted {predicted}",
        fit.rate
    );
}

#[test]
fn experiments_are_reproducible_and_thread_independent() {
    let mut cfg = config(GraphSpec::Cycle { n: 10 }, 1.0, 0.9, 3_000, 16);
    cfg.stride = 7;
    cfg.threads = Some(1);
    let a = run_experiment(&cfg).unwrap();
    cfg.threads = Some(4);
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.trace.rows, b.trace.rows);
    assert_eq!(a.trace.times().last(), Some(&3_000));
}

#[test]
fn zero_variance_trace_matches_baseline_column() {
    let out = run_experiment(&config(GraphSpec::Path { n: 7 }, 0.0, 0.6, 4_000, 10)).unwrap();
    for row in &out.trace.rows {
        assert_eq!(row.mean_rel_err.to_bits(), row.baseline_rel_err.to_bits());
        assert_eq!(row.mean_drift_sq, row.mean_drift_sq.abs());
    }
}

#[test]
fn csv_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config(GraphSpec::Cycle { n: 6 }, 1.0, 0.5, 500, 4)).unwrap();
    let path = dir.path().join("trace.csv");
    emit_csv(&out.trace, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.rows, out.trace.rows);
    assert_eq!(back.config, out.trace.config);
}

#[test]
fn noiseless_bound_overlay_dominates_observed_error() {
    let out = run_experiment(&config(GraphSpec::Cycle { n: 10 }, 0.0, 0.9, 1_500, 100)).unwrap();
    let rho = out.rates.rho;
    assert_eq!(out.trace.rows[0].bound, 1.0);
    for row in &out.trace.rows {
        assert!((row.bound - rho.powi(row.t as i32)).abs() <= 1e-12 * row.bound);
        assert!(row.mean_rel_err <= 1.05 * row.bound, "t={}", row.t);
    }
}

#[test]
fn noisy_bound_overlay_holds_once_averaged_well() {
    let out = run_experiment(&config(GraphSpec::Cycle { n: 10 }, 1.0, 0.9, 2_000, 400)).unwrap();
    let late = out.trace.rows.iter().filter(|r| r.t >= 10);
    assert!(late.into_iter().all(|r| r.mean_rel_err <= r.bound));
}
