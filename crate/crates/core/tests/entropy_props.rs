use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minvol::entropy::*;

/// Growth rate of non-backtracking walks on a unit-length graph, from
/// windowed walk counts (the window absorbs periodicity).
fn walk_growth(g: &MetricGraph) -> f64 {
    let edges = g.edges();
    let nd = 2 * edges.len();
    let tail = |d: usize| if d % 2 == 0 { edges[d / 2].from } else { edges[d / 2].to };
    let head = |d: usize| tail(d ^ 1);
    let mut x = vec![1.0f64; nd];
    let mut totals = Vec::new();
    let mut log_scale = 0.0;
    for _ in 0..600 {
        let y: Vec<f64> = (0..nd)
            .map(|d| (0..nd).filter(|&f| f != d ^ 1 && tail(f) == head(d)).map(|f| x[f]).sum())
            .collect();
        let norm: f64 = y.iter().sum();
        log_scale += norm.ln();
        x = y.iter().map(|v| v / norm).collect();
        totals.push(log_scale);
    }
    // average growth over the last 120 steps
    (totals[599] - totals[479]) / 120.0
}

fn random_core_graph(rng: &mut ChaCha8Rng) -> MetricGraph {
    loop {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(n + 1..=n + 4);
        let pairs: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        if let Ok(g) = MetricGraph::unit(n, &pairs) {
            return g;
        }
    }
}

#[test]
fn unit_entropy_matches_walk_growth() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..30 {
        let g = random_core_graph(&mut rng);
        let h = volume_entropy(&g, 1e-12).unwrap().h;
        let oracle = walk_growth(&g);
        assert!((h - oracle).abs() < 1e-6, "{h} vs {oracle}");
    }
}

#[test]
fn rose_entropy_matches_its_scalar_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..30 {
        let petals = rng.gen_range(2..=4);
        let lengths: Vec<f64> = (0..petals).map(|_| rng.gen_range(0.3..2.5)).collect();
        let g = rose(petals).with_lengths(&lengths).unwrap();
        // Σ 2x_i/(1+x_i) = 1 with x_i = e^{-h ℓ_i}; decreasing in h
        let f = |h: f64| lengths.iter().map(|l| 2.0 * (-h * l).exp() / (1.0 + (-h * l).exp())).sum::<f64>() - 1.0;
        let (mut lo, mut hi) = (0.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = volume_entropy(&g, 1e-13).unwrap().h;
        assert!((h - lo).abs() < 1e-9, "{h} vs {lo}");
    }
}

#[test]
fn omega_is_scale_and_subdivision_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..20 {
        let g = random_core_graph(&mut rng);
        let lengths: Vec<f64> = (0..g.edges().len()).map(|_| rng.gen_range(0.2..2.0)).collect();
        let g = g.with_lengths(&lengths).unwrap();
        let base = volume_entropy(&g, 1e-13).unwrap_or_else(|e| panic!("{e:?} {g:?}"));
        let c = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = lengths.iter().map(|l| l * c).collect();
        let s = volume_entropy(&g.with_lengths(&scaled).unwrap(), 1e-13).unwrap();
        assert!((s.h * c - base.h).abs() < 1e-9 * base.h);
        assert!((s.omega - base.omega).abs() < 1e-8);
        let i = rng.gen_range(0..g.edges().len());
        let d = volume_entropy(&g.subdivide(i), 1e-13).unwrap();
        assert!((d.omega - base.omega).abs() < 1e-8);
    }
}

#[test]
fn results_satisfy_their_contract() {
    let r = volume_entropy(&k4(), 1e-10).unwrap();
    assert!(r.residual <= 1e-10);
    assert_eq!(r.omega, r.h * r.vol);
}

#[test]
fn optimizer_equalizes_trivalent_graphs() {
    for (g, n) in [(theta(), 2.0), (k4(), 3.0)] {
        let opt = optimize_metric(&g, OptimizeOptions::default()).unwrap();
        assert!((opt.omega_star - (3.0 * n - 3.0) * 2f64.ln()).abs() < 1e-3);
        let mean = opt.lengths.iter().sum::<f64>() / opt.lengths.len() as f64;
        for l in &opt.lengths {
            assert!(((l - mean) / mean).abs() < 1e-2, "{:?}", opt.lengths);
        }
    }
}

#[test]
fn optimizer_is_deterministic_per_seed() {
    let opts = OptimizeOptions { iters: 500, seed: 9, restarts: 2, ..Default::default() };
    let a = optimize_metric(&theta(), opts).unwrap();
    let b = optimize_metric(&theta(), opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_graphs_are_rejected() {
    assert!(matches!(MetricGraph::unit(2, &[(0, 1), (0, 1)]), Err(EntropyError::DegenerateRank(1))));
    assert!(matches!(MetricGraph::unit(2, &[(0, 0), (0, 0), (0, 1)]), Err(EntropyError::NotCoreGraph(..))));
    assert!(matches!(MetricGraph::unit(2, &[(0, 0), (0, 0)]), Err(EntropyError::InvalidGraph(_))));
    let g = theta();
    assert!(g.with_lengths(&[1.0, -1.0, 1.0]).is_err());
}
