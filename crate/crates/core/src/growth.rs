//! Cayley ball enumeration, growth-rate estimators, and a discrete model of
//! the collapsing metrics on a tubular complex.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fbz::{make_glu, tubular_generator_images, FbzElement, FbzError, GluData, MixedLetter};
use crate::raag::SimplicialGraph;
use crate::verdict::{fbz_uniform_rate, raag_uniform_rate};
use crate::words::{FreeAut, Letter, Word};

pub const DEFAULT_FRONTIER_CAP: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("enumeration exceeded the cap of {cap} elements")]
    ResourceLimit { cap: usize },
    #[error("profile too short for rate estimates (need radius at least 2)")]
    DegenerateProfile,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Fbz(#[from] FbzError),
}

/// A group with a finite symmetric generating set and canonical element
/// representatives.
pub trait GroupModel {
    type Elem: Clone + Eq + Hash;
    fn identity(&self) -> Self::Elem;
    /// Size of the symmetric generating set.
    fn generator_count(&self) -> usize;
    /// Right multiplication by generator `i`.
    fn step(&self, x: &Self::Elem, i: usize) -> Self::Elem;
}

fn symmetric(rank: usize) -> Vec<Letter> {
    (1..=rank as Letter).flat_map(|i| [i, -i]).collect()
}

pub struct FreeModel {
    letters: Vec<Letter>,
}

impl FreeModel {
    pub fn new(rank: usize) -> Self {
        FreeModel { letters: symmetric(rank) }
    }
}

impl GroupModel for FreeModel {
    type Elem = Word;
    fn identity(&self) -> Word {
        Word::identity()
    }
    fn generator_count(&self) -> usize {
        self.letters.len()
    }
    fn step(&self, x: &Word, i: usize) -> Word {
        x.mul(&Word::letter(self.letters[i]))
    }
}

pub struct RaagModel<'a> {
    graph: &'a SimplicialGraph,
    letters: Vec<Letter>,
}

impl<'a> RaagModel<'a> {
    pub fn new(graph: &'a SimplicialGraph) -> Self {
        RaagModel {
            graph,
            letters: symmetric(graph.vertex_count()),
        }
    }
}

impl GroupModel for RaagModel<'_> {
    type Elem = Vec<Letter>;
    fn identity(&self) -> Vec<Letter> {
        Vec::new()
    }
    fn generator_count(&self) -> usize {
        self.letters.len()
    }
    fn step(&self, x: &Vec<Letter>, i: usize) -> Vec<Letter> {
        let mut w = x.clone();
        w.push(self.letters[i]);
        self.graph.normal_form_letters(&w)
    }
}

/// `G_φ` generated by the basis of `F_n` and `t`.
pub struct FbzModel<'a> {
    aut: &'a FreeAut,
    letters: Vec<MixedLetter>,
}

impl<'a> FbzModel<'a> {
    pub fn new(aut: &'a FreeAut) -> Self {
        let mut letters: Vec<MixedLetter> = symmetric(aut.rank()).into_iter().map(MixedLetter::Free).collect();
        letters.extend([MixedLetter::Stable(false), MixedLetter::Stable(true)]);
        FbzModel { aut, letters }
    }
}

impl GroupModel for FbzModel<'_> {
    type Elem = FbzElement;
    fn identity(&self) -> FbzElement {
        FbzElement::identity()
    }
    fn generator_count(&self) -> usize {
        self.letters.len()
    }
    fn step(&self, x: &FbzElement, i: usize) -> FbzElement {
        x.mul_letter(self.letters[i], self.aut)
    }
}

/// `G_φ` for GLU data, generated by the tubular vertex generators `a_v`,
/// `u_v = w_v⁻¹ t` and the edge letters `x_e`.
pub struct TubularModel {
    aut: FreeAut,
    gens: Vec<FbzElement>,
}

impl TubularModel {
    pub fn new(data: &GluData) -> Result<Self, FbzError> {
        let aut = make_glu(data)?;
        let gens = tubular_generator_images(data, &aut)
            .into_iter()
            .flat_map(|g| {
                let inv = g.inverse(&aut);
                [g, inv]
            })
            .collect();
        Ok(TubularModel { aut, gens })
    }
}

impl GroupModel for TubularModel {
    type Elem = FbzElement;
    fn identity(&self) -> FbzElement {
        FbzElement::identity()
    }
    fn generator_count(&self) -> usize {
        self.gens.len()
    }
    fn step(&self, x: &FbzElement, i: usize) -> FbzElement {
        x.mul(&self.gens[i], &self.aut)
    }
}

/// The models available from the command line.
#[derive(Debug, Clone)]
pub enum Model {
    Free(usize),
    Raag(SimplicialGraph),
    Fbz(FreeAut),
    Tubular(GluData),
}

impl Model {
    pub fn enumerate_ball(&self, radius: usize, cap: usize) -> Result<BallProfile, GrowthError> {
        match self {
            Model::Free(n) => enumerate_ball(&FreeModel::new(*n), radius, cap),
            Model::Raag(g) => enumerate_ball(&RaagModel::new(g), radius, cap),
            Model::Fbz(aut) => enumerate_ball(&FbzModel::new(aut), radius, cap),
            Model::Tubular(d) => enumerate_ball(&TubularModel::new(d)?, radius, cap),
        }
    }

    /// Uniform lower bound on the growth of exponentially growing subgroups,
    /// or `None` when the model has no such subgroups.
    pub fn uniform_bound(&self) -> Option<f64> {
        match self {
            Model::Free(n) => (*n >= 2).then(raag_uniform_rate),
            Model::Raag(g) => {
                let n = g.vertex_count();
                let non_adjacent = (0..n).any(|i| (i + 1..n).any(|j| !g.adjacent(i, j)));
                non_adjacent.then(raag_uniform_rate)
            }
            Model::Fbz(_) | Model::Tubular(_) => Some(fbz_uniform_rate()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallProfile {
    /// `counts[t] = #{g : |g| ≤ t}`.
    pub counts: Vec<u64>,
    pub weighted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_resolution: Option<f64>,
}

impl BallProfile {
    pub fn unweighted(counts: Vec<u64>) -> Self {
        BallProfile {
            counts,
            weighted: false,
            weight_resolution: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,count\n");
        for (t, b) in self.counts.iter().enumerate() {
            match self.weight_resolution {
                Some(res) => out.push_str(&format!("{},{b}\n", t as f64 * res)),
                None => out.push_str(&format!("{t},{b}\n")),
            }
        }
        out
    }
}

/// Breadth-first enumeration of the ball of radius `radius`. Fails once more
/// than `cap` elements have been seen.
pub fn enumerate_ball<M: GroupModel>(model: &M, radius: usize, cap: usize) -> Result<BallProfile, GrowthError> {
    let mut seen: HashSet<M::Elem> = HashSet::from([model.identity()]);
    let mut frontier = vec![model.identity()];
    let mut counts = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for i in 0..model.generator_count() {
                let y = model.step(x, i);
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    next.push(y);
                }
            }
            if seen.len() > cap {
                return Err(GrowthError::ResourceLimit { cap });
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
    }
    Ok(BallProfile::unweighted(counts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub t: usize,
    /// `log(b_t / b_{t-1})`.
    pub delta: f64,
    /// `log log b_t / log t`; absent for `t = 1` or `b_t ≤ 1`.
    pub nu: Option<f64>,
}

/// Per-radius growth-rate estimates for `t = 1..=T`.
pub fn rate_estimates(profile: &BallProfile) -> Result<Vec<RateRow>, GrowthError> {
    let b = &profile.counts;
    if b.len() < 3 {
        return Err(GrowthError::DegenerateProfile);
    }
    Ok((1..b.len())
        .map(|t| {
            let lb = (b[t] as f64).ln();
            RateRow {
                t,
                delta: lb - (b[t - 1] as f64).ln(),
                nu: (t >= 2 && b[t] > 1 && lb > 0.0).then(|| lb.ln() / (t as f64).ln()),
            }
        })
        .collect())
}

/// Costs of the discrete collapsing metric, in the same unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCosts {
    /// Each vertex-group generator `a_v^{±1}`, `u_v^{±1}`.
    pub letter: f64,
    /// Moving across a tree edge of the splitting.
    pub tree_crossing: f64,
    /// Moving across a plus edge, reading `x_e^{±1}`.
    pub plus_crossing: f64,
}

/// Costs are handled as integers in units of `1/COST_SCALE`.
const COST_SCALE: f64 = 1000.0;

fn scaled(c: f64) -> u64 {
    (c * COST_SCALE).round() as u64
}

/// Least weighted distance to every element of `G_φ` within `radius`, where
/// paths move through the tubular complex: vertex-group letters are read at
/// the current vertex and edges are crossed at the given costs.
pub fn weighted_distances(
    data: &GluData,
    costs: WeightedCosts,
    radius: f64,
    cap: usize,
) -> Result<HashMap<FbzElement, f64>, GrowthError> {
    let aut = make_glu(data)?;
    let s = &data.splitting;
    let nv = s.vertices().len();
    let gens = tubular_generator_images(data, &aut);
    let inv: Vec<FbzElement> = gens.iter().map(|g| g.inverse(&aut)).collect();
    // moves from each vertex: (target vertex, multiplier, cost)
    let mut moves: Vec<Vec<(usize, Option<usize>, u64)>> = vec![Vec::new(); nv];
    let letter = scaled(costs.letter);
    for v in 0..nv {
        for g in [2 * v, 2 * v + 1] {
            moves[v].push((v, Some(2 * g), letter));
            moves[v].push((v, Some(2 * g + 1), letter));
        }
    }
    for &(parent, child) in s.tree_edges() {
        let c = scaled(costs.tree_crossing);
        moves[parent].push((child, None, c));
        moves[child].push((parent, None, c));
    }
    for (j, &(o, t)) in s.plus_edges().iter().enumerate() {
        let c = scaled(costs.plus_crossing);
        let x = 2 * nv + j;
        // h_τ x⁻¹ = x⁻¹ h_o: leave τ by x⁻¹, leave o by x
        moves[t].push((o, Some(2 * x + 1), c));
        moves[o].push((t, Some(2 * x), c));
    }
    let step = |e: &FbzElement, m: usize| -> FbzElement {
        let g = if m % 2 == 0 { &gens[m / 2] } else { &inv[m / 2] };
        e.mul(g, &aut)
    };

    let limit = scaled(radius);
    let mut index: HashMap<(FbzElement, usize), usize> = HashMap::new();
    let mut states: Vec<(FbzElement, usize)> = Vec::new();
    let mut dist: Vec<u64> = Vec::new();
    let mut heap = BinaryHeap::new();
    let start = (FbzElement::identity(), s.basepoint());
    index.insert(start.clone(), 0);
    states.push(start);
    dist.push(0);
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let (elem, v) = states[i].clone();
        for &(to, mult, c) in &moves[v] {
            let nd = d + c;
            if nd > limit {
                continue;
            }
            let next = match mult {
                Some(m) => step(&elem, m),
                None => elem.clone(),
            };
            let key = (next, to);
            match index.get(&key) {
                Some(&j) if dist[j] <= nd => {}
                Some(&j) => {
                    dist[j] = nd;
                    heap.push(Reverse((nd, j)));
                }
                None => {
                    if states.len() >= cap {
                        return Err(GrowthError::ResourceLimit { cap });
                    }
                    let j = states.len();
                    index.insert(key.clone(), j);
                    states.push(key);
                    dist.push(nd);
                    heap.push(Reverse((nd, j)));
                }
            }
        }
    }
    let mut best: HashMap<FbzElement, u64> = HashMap::new();
    for ((elem, _), d) in states.into_iter().zip(dist) {
        best.entry(elem).and_modify(|b| *b = (*b).min(d)).or_insert(d);
    }
    Ok(best.into_iter().map(|(e, d)| (e, d as f64 / COST_SCALE)).collect())
}

/// Count of elements within each radius of `grid`.
pub fn weighted_counts(distances: &HashMap<FbzElement, f64>, grid: &[f64]) -> Vec<u64> {
    let mut ds: Vec<f64> = distances.values().copied().collect();
    ds.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&r| ds.partition_point(|&d| d <= r + 1e-9) as u64)
        .collect()
}

/// Grid spacing used to fit the terminal slope.
pub const DEMO_RESOLUTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub s: f64,
    pub h_hat: f64,
    pub omega_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoTable {
    pub rows: Vec<DemoRow>,
    /// Number of 2-cells: one torus per vertex, one annulus per edge.
    pub cells: usize,
    pub radius: f64,
    pub weight_resolution: f64,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Shrink the fibers by `s` and report the fitted entropy `ĥ_s` and the
/// normalized `ω̂_s = ĥ_s·(s·V̂)^{1/2}` for each `s`.
pub fn collapsing_demo(
    data: &GluData,
    s_values: &[f64],
    radius: f64,
    cap: usize,
) -> Result<DemoTable, GrowthError> {
    if radius < 3.0 {
        return Err(GrowthError::InvalidParameter("radius must be at least 3".into()));
    }
    if s_values.is_empty() || s_values.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(GrowthError::InvalidParameter("s values must lie in (0, 1]".into()));
    }
    if s_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GrowthError::InvalidParameter("s values must be strictly decreasing".into()));
    }
    let sp = &data.splitting;
    let cells = sp.vertices().len() + sp.tree_edges().len() + sp.plus_edges().len();
    // a single Z² vertex grows polynomially
    let polynomial = sp.vertices().len() == 1 && sp.plus_edges().is_empty();
    let steps = (radius / 2.0 / DEMO_RESOLUTION).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| radius / 2.0 + i as f64 * DEMO_RESOLUTION)
        .filter(|&r| r <= radius + 1e-9)
        .collect();
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let h_hat = if polynomial {
            0.0
        } else {
            let costs = WeightedCosts {
                letter: s,
                tree_crossing: 1.0,
                plus_crossing: 1.0,
            };
            let dist = weighted_distances(data, costs, radius, cap)?;
            let logs: Vec<f64> = weighted_counts(&dist, &grid).iter().map(|&c| (c as f64).ln()).collect();
            slope(&grid, &logs).max(0.0)
        };
        rows.push(DemoRow {
            s,
            h_hat,
            omega_hat: h_hat * (s * cells as f64).sqrt(),
        });
    }
    Ok(DemoTable {
        rows,
        cells,
        radius,
        weight_resolution: DEMO_RESOLUTION,
    })
}
