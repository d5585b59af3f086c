//! Volume entropy of metric graphs and minimization of `ω = h·vol` over
//! length functions.
//!
//! The entropy `h` of a core metric graph is the unique `s > 0` at which the
//! weighted non-backtracking matrix `M(s)[e][f] = exp(−s·ℓ_f)` has spectral
//! radius 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("invalid metric graph: {0}")]
    InvalidGraph(String),
    #[error("not a core graph: vertex `{0}` has degree {1}")]
    NotCoreGraph(String, usize),
    #[error("first Betti number is {0}; entropy needs at least 2")]
    DegenerateRank(i64),
    #[error("spectral radius did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEdge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricGraphJson", into = "MetricGraphJson")]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<MetricEdge>,
    /// `successors[d]`: directed edges that may follow `d` without backtracking.
    successors: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricGraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    #[serde(default = "unit")]
    pub length: f64,
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<MetricGraphJson> for MetricGraph {
    type Error = EntropyError;
    fn try_from(j: MetricGraphJson) -> Result<Self, EntropyError> {
        let index = |name: &str| {
            j.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| EntropyError::InvalidGraph(format!("unknown vertex `{name}`")))
        };
        let edges = j
            .edges
            .iter()
            .map(|e| {
                Ok(MetricEdge {
                    from: index(&e.from)?,
                    to: index(&e.to)?,
                    length: e.length,
                })
            })
            .collect::<Result<Vec<_>, EntropyError>>()?;
        MetricGraph::new(j.vertices, edges)
    }
}

impl From<MetricGraph> for MetricGraphJson {
    fn from(g: MetricGraph) -> Self {
        MetricGraphJson {
            edges: g
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: g.vertices[e.from].clone(),
                    to: g.vertices[e.to].clone(),
                    length: e.length,
                })
                .collect(),
            vertices: g.vertices,
        }
    }
}

impl MetricGraph {
    /// Validates connectivity, positive lengths, minimum degree 2 and rank ≥ 2.
    pub fn new(vertices: Vec<String>, edges: Vec<MetricEdge>) -> Result<Self, EntropyError> {
        let n = vertices.len();
        if n == 0 {
            return Err(EntropyError::InvalidGraph("no vertices".into()));
        }
        if let Some(e) = edges.iter().find(|e| e.from >= n || e.to >= n) {
            return Err(EntropyError::InvalidGraph(format!("edge {e:?} out of range")));
        }
        if let Some(e) = edges.iter().find(|e| !(e.length.is_finite() && e.length > 0.0)) {
            return Err(EntropyError::InvalidGraph(format!("non-positive length {}", e.length)));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|v| find(&mut parent, v) != root) {
            return Err(EntropyError::InvalidGraph("graph is disconnected".into()));
        }
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.from] += 1;
            degree[e.to] += 1;
        }
        if let Some(v) = (0..n).find(|&v| degree[v] < 2) {
            return Err(EntropyError::NotCoreGraph(vertices[v].clone(), degree[v]));
        }
        let betti = edges.len() as i64 - n as i64 + 1;
        if betti < 2 {
            return Err(EntropyError::DegenerateRank(betti));
        }
        // directed edge 2i runs from → to, 2i+1 runs back
        let tail = |d: usize| {
            let e = &edges[d / 2];
            if d % 2 == 0 {
                e.from
            } else {
                e.to
            }
        };
        let head = |d: usize| tail(d ^ 1);
        let nd = 2 * edges.len();
        let successors = (0..nd)
            .map(|d| (0..nd).filter(|&f| f != (d ^ 1) && tail(f) == head(d)).collect())
            .collect();
        Ok(MetricGraph {
            vertices,
            edges,
            successors,
        })
    }

    /// Build from `(from, to)` index pairs with unit lengths.
    pub fn unit(vertex_count: usize, pairs: &[(usize, usize)]) -> Result<Self, EntropyError> {
        let vertices = (0..vertex_count).map(|i| format!("v{i}")).collect();
        let edges = pairs
            .iter()
            .map(|&(from, to)| MetricEdge { from, to, length: 1.0 })
            .collect();
        MetricGraph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[MetricEdge] {
        &self.edges
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn volume(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Same combinatorics, new lengths.
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Self, EntropyError> {
        if lengths.len() != self.edges.len() {
            return Err(EntropyError::InvalidGraph("length count mismatch".into()));
        }
        if let Some(&l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(EntropyError::InvalidGraph(format!("non-positive length {l}")));
        }
        let mut g = self.clone();
        for (e, &l) in g.edges.iter_mut().zip(lengths) {
            e.length = l;
        }
        Ok(g)
    }

    /// Split edge `i` at its midpoint.
    pub fn subdivide(&self, i: usize) -> Self {
        let mut vertices = self.vertices.clone();
        let mid = vertices.len();
        vertices.push(format!("{}~{}", self.vertices[self.edges[i].from], mid));
        let old = self.edges[i];
        let mut edges = self.edges.clone();
        edges[i] = MetricEdge { from: old.from, to: mid, length: old.length / 2.0 };
        edges.push(MetricEdge { from: mid, to: old.to, length: old.length / 2.0 });
        MetricGraph::new(vertices, edges).expect("subdivision keeps a valid core graph")
    }

    /// Collatz–Wielandt bracket `lo ≤ ρ(M(s)) ≤ hi`, warm-started from `x`.
    /// Stops once the bracket is narrower than `tol` or excludes 1.
    fn perron_bracket(&self, s: f64, x: &mut Vec<f64>, tol: f64) -> Result<(f64, f64), EntropyError> {
        let nd = self.successors.len();
        let w: Vec<f64> = (0..nd).map(|d| (-s * self.edges[d / 2].length).exp()).collect();
        if x.len() != nd {
            *x = vec![1.0; nd];
        }
        let mut y = vec![0.0; nd];
        // Collatz–Wielandt bounds from M x; the next iterate uses M + lo·I,
        // which stays positive and damps eigenvalues other than ρ.
        for _ in 0..MAX_POWER_ITERATIONS {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for d in 0..nd {
                let acc: f64 = self.successors[d].iter().map(|&f| w[f] * x[f]).sum();
                y[d] = acc;
                let r = acc / x[d];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            // the bounds cannot separate by less than a few ulps
            if hi - lo <= tol.max(16.0 * f64::EPSILON * hi) || lo > 1.0 || hi < 1.0 {
                return Ok((lo, hi));
            }
            for (yi, xi) in y.iter_mut().zip(x.iter()) {
                *yi += lo * xi;
            }
            let norm = y.iter().cloned().fold(0.0, f64::max);
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / norm;
            }
        }
        Err(EntropyError::NoConvergence)
    }
}

const MAX_POWER_ITERATIONS: usize = 100_000;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub h: f64,
    pub vol: f64,
    pub omega: f64,
    /// Upper bound on `|ρ(M(h)) − 1|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Volume entropy by bisection on `ρ(M(s)) = 1` until `|ρ − 1| ≤ tol`.
pub fn volume_entropy(g: &MetricGraph, tol: f64) -> Result<EntropyResult, EntropyError> {
    let mut x = Vec::new();
    let rho_tol = tol.min(1e-6) / 10.0;
    let mut hi = 1.0 / g.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    while g.perron_bracket(hi, &mut x, rho_tol)?.0 > 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    let mut iterations = 0;
    let (mut h, mut residual) = (hi, f64::INFINITY);
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (rlo, rhi) = g.perron_bracket(mid, &mut x, rho_tol)?;
        let rho = 0.5 * (rlo + rhi);
        h = mid;
        residual = (rho - 1.0).abs() + 0.5 * (rhi - rlo);
        if residual <= tol || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if rho > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let vol = g.volume();
    Ok(EntropyResult {
        h,
        vol,
        omega: h * vol,
        residual,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    /// Optimal lengths, normalized to total length 1.
    pub lengths: Vec<f64>,
    pub omega_star: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Function evaluations per restart.
    pub iters: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            iters: 4000,
            seed: 0,
            restarts: 5,
            tol: 1e-11,
        }
    }
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Minimize `ω` over volume-one metrics on the combinatorial graph of `g`
/// with Nelder–Mead on softmax coordinates, keeping the best of several
/// random restarts.
pub fn optimize_metric(g: &MetricGraph, opts: OptimizeOptions) -> Result<OptimizeResult, EntropyError> {
    let n = g.edges.len();
    let mut evaluations = 0usize;
    let mut objective = |x: &[f64]| -> f64 {
        evaluations += 1;
        let lengths = softmax(x);
        match g.with_lengths(&lengths).and_then(|m| volume_entropy(&m, opts.tol)) {
            Ok(r) => r.omega,
            Err(_) => f64::INFINITY,
        }
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for restart in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (x, f) = nelder_mead(&mut objective, x0, 0.5, opts.iters);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }
    let (x, omega_star) = best.expect("at least one restart");
    Ok(OptimizeResult {
        lengths: softmax(&x),
        omega_star,
        evaluations,
    })
}

/// Standard Nelder–Mead with reflection 1, expansion 2, contraction ½ and
/// shrink ½.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: Vec<f64>, step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < 1e-13 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |t: f64| -> Vec<f64> {
            (0..n).map(|j| centroid[j] + t * (simplex[n].0[j] - centroid[j])).collect()
        };
        let xr = towards(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = towards(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = towards(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = towards(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    for j in 0..n {
                        x[j] = best[j] + 0.5 * (x[j] - best[j]);
                    }
                    *fx = f(x);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Two vertices joined by three edges.
pub fn theta() -> MetricGraph {
    MetricGraph::unit(2, &[(0, 1), (0, 1), (0, 1)]).expect("theta graph is valid")
}

/// Complete graph on four vertices.
pub fn k4() -> MetricGraph {
    MetricGraph::unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).expect("K4 is valid")
}

/// One vertex with `petals` loops.
pub fn rose(petals: usize) -> MetricGraph {
    MetricGraph::unit(1, &vec![(0, 0); petals]).expect("rose is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn closed_forms() {
        let r = volume_entropy(&theta(), 1e-12).unwrap();
        assert!((r.h - LN2).abs() < 1e-10, "{}", r.h);
        assert_eq!(r.vol, 3.0);
        let r = volume_entropy(&rose(2), 1e-12).unwrap();
        assert!((r.h - 3f64.ln()).abs() < 1e-10);
        assert!((r.omega - 2.0 * 3f64.ln()).abs() < 1e-9);
        let r = volume_entropy(&k4(), 1e-12).unwrap();
        assert!((r.omega - 6.0 * LN2).abs() < 1e-9);
    }

    #[test]
    fn scaling() {
        let g = theta().with_lengths(&[2.0, 2.0, 2.0]).unwrap();
        let r = volume_entropy(&g, 1e-12).unwrap();
        assert!((r.h - LN2 / 2.0).abs() < 1e-10);
        assert!((r.omega - 3.0 * LN2).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(matches!(MetricGraph::unit(1, &[(0, 0)]), Err(EntropyError::DegenerateRank(1))));
        assert!(matches!(
            MetricGraph::unit(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]),
            Err(EntropyError::NotCoreGraph(_, 1))
        ));
        assert!(MetricGraph::unit(3, &[(0, 1), (0, 1)]).is_err());
        assert!(theta().with_lengths(&[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn subdivision_invariance() {
        let g = theta().with_lengths(&[0.3, 1.1, 2.0]).unwrap();
        let a = volume_entropy(&g, 1e-12).unwrap();
        let b = volume_entropy(&g.subdivide(1), 1e-12).unwrap();
        assert!((a.h - b.h).abs() < 1e-9);
        assert!((a.omega - b.omega).abs() < 1e-9);
    }

    #[test]
    fn optimizer_on_theta() {
        let opts = OptimizeOptions { restarts: 2, ..Default::default() };
        let r = optimize_metric(&theta(), opts).unwrap();
        assert!((r.omega_star - 3.0 * LN2).abs() < 1e-3);
        assert!((r.lengths.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
