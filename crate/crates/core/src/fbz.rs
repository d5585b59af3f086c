//! Free-by-cyclic groups `G_φ = ⟨F_n, t | t x t⁻¹ = Φ(x)⟩`.
//!
//! Elements are kept in the normal form `t^k u` with `u ∈ F_n`. A GLU
//! certificate for `Φ` is a primitive free splitting of `F_n` (a graph with a
//! cyclic group `⟨a_v⟩` at each vertex and a stable letter `x_e` per non-tree
//! edge) together with integers `p_e`, `q_e`, `r_e`, for which
//!
//! ```text
//! Φ(a_v) = w_v a_v w_v⁻¹
//! Φ(x_e) = w_o a_o^q x_e a_τ^r w_τ⁻¹
//! ```
//!
//! where `w_v` is the product of `a_{parent}^{p_e}` along the tree path from
//! the basepoint to `v`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gog::{GogEdge, GogVertex, GraphOfGroups, GroupKind, Injection, Presentation};
use crate::snf::Abelianization;
use crate::verdict::{fbz_uniform_rate, nonvanishing_bound, Certificate, Status, Verdict};
use crate::words::{generator_name, parse_token, FreeAut, GrowthClass, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FbzError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("invalid GLU data: {0}")]
    InvalidGluData(String),
    #[error("automorphism has rank {aut} but the splitting has rank {splitting}")]
    RankMismatch { aut: usize, splitting: usize },
    #[error("automorphism is not GLU with respect to this splitting: {0}")]
    NoMatch(String),
    #[error("tubularization failed verification: {0}")]
    TubularizationInconsistent(String),
}

/// `t^k u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FbzElement {
    pub k: i64,
    pub u: Word,
}

impl FbzElement {
    pub fn identity() -> Self {
        FbzElement { k: 0, u: Word::identity() }
    }

    pub fn stable(k: i64) -> Self {
        FbzElement { k, u: Word::identity() }
    }

    pub fn fiber(u: Word) -> Self {
        FbzElement { k: 0, u }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.u.is_identity()
    }

    /// `(k,u)·(k',u') = (k+k', Φ^{-k'}(u)·u')`.
    pub fn mul(&self, other: &FbzElement, aut: &FreeAut) -> FbzElement {
        FbzElement {
            k: self.k + other.k,
            u: power_image(aut, -other.k, &self.u).mul(&other.u),
        }
    }

    /// `(k,u)⁻¹ = (−k, Φ^k(u⁻¹))`.
    pub fn inverse(&self, aut: &FreeAut) -> FbzElement {
        FbzElement {
            k: -self.k,
            u: power_image(aut, self.k, &self.u.inverse()),
        }
    }

    /// Right multiplication by a single mixed letter.
    pub fn mul_letter(&self, letter: MixedLetter, aut: &FreeAut) -> FbzElement {
        match letter {
            MixedLetter::Free(x) => FbzElement {
                k: self.k,
                u: self.u.mul(&Word::letter(x)),
            },
            MixedLetter::Stable(true) => FbzElement {
                k: self.k - 1,
                u: aut.image_unchecked(&self.u),
            },
            MixedLetter::Stable(false) => FbzElement {
                k: self.k + 1,
                u: aut.inverse_image_unchecked(&self.u),
            },
        }
    }

    pub fn display(&self) -> String {
        match (self.k, self.u.is_identity()) {
            (0, _) => self.u.to_string(),
            (k, true) => format!("t^{k}"),
            (k, false) => format!("t^{k} {}", self.u),
        }
    }
}

fn power_image(aut: &FreeAut, k: i64, w: &Word) -> Word {
    let mut out = w.clone();
    for _ in 0..k.unsigned_abs() {
        out = if k > 0 {
            aut.image_unchecked(&out)
        } else {
            aut.inverse_image_unchecked(&out)
        };
    }
    out
}

/// A letter of `G_φ`: a free generator or the stable letter `t^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixedLetter {
    Free(Letter),
    /// `Stable(true)` is `t⁻¹`.
    Stable(bool),
}

/// Parse whitespace-separated tokens; `t`/`t-` is the stable letter, so the
/// 20th free generator must be written `g20`.
pub fn parse_mixed(s: &str) -> Result<Vec<MixedLetter>, FbzError> {
    s.split_whitespace()
        .map(|tok| match tok {
            "t" => Ok(MixedLetter::Stable(false)),
            "t-" => Ok(MixedLetter::Stable(true)),
            _ => Ok(MixedLetter::Free(parse_token(tok)?)),
        })
        .collect()
}

/// Normal form `t^k u` of a word in the free generators and `t`.
pub fn fbz_normalize(aut: &FreeAut, mixed: &[MixedLetter]) -> Result<FbzElement, FbzError> {
    let rank = aut.rank();
    if let Some(&MixedLetter::Free(x)) = mixed
        .iter()
        .find(|m| matches!(m, MixedLetter::Free(x) if x.unsigned_abs() as usize > rank))
    {
        return Err(WordError::IndexOutOfRange {
            index: x.unsigned_abs() as usize,
            rank,
        }
        .into());
    }
    Ok(mixed
        .iter()
        .fold(FbzElement::identity(), |acc, &l| acc.mul_letter(l, aut)))
}

/// Presentation `⟨x_1..x_n, t | t x_i t⁻¹ Φ(x_i)⁻¹⟩`.
pub fn native_presentation(aut: &FreeAut) -> Presentation {
    let n = aut.rank();
    let t = n as Letter + 1;
    let mut generators: Vec<String> = (1..=n as u32).map(generator_name).collect();
    generators.push("t".into());
    let relators = aut
        .images()
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let mut r = vec![t, i as Letter + 1, -t];
            r.extend(img.inverse().into_letters());
            r
        })
        .collect();
    Presentation { generators, relators }
}

/// A free splitting of `F_n` with `Z` vertex groups and trivial edge groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SplittingJson", into = "SplittingJson")]
pub struct PrimitiveSplitting {
    vertices: Vec<String>,
    basepoint: usize,
    /// Tree edges oriented away from the basepoint, as `(parent, child)`.
    tree: Vec<(usize, usize)>,
    /// Non-tree edges as `(o(e), τ(e))`.
    plus: Vec<(usize, usize)>,
    /// Tree edge index leading into each vertex; `None` at the basepoint.
    parent_edge: Vec<Option<usize>>,
    /// Vertices in breadth-first order from the basepoint.
    order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingJson {
    pub vertices: Vec<String>,
    pub tree_edges: Vec<[String; 2]>,
    #[serde(default)]
    pub plus_edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
}

impl TryFrom<SplittingJson> for PrimitiveSplitting {
    type Error = FbzError;
    fn try_from(j: SplittingJson) -> Result<Self, FbzError> {
        let index = |name: &str| {
            j.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| FbzError::InvalidSplitting(format!("unknown vertex `{name}`")))
        };
        let pairs = |list: &[[String; 2]]| -> Result<Vec<(usize, usize)>, FbzError> {
            list.iter().map(|[a, b]| Ok((index(a)?, index(b)?))).collect()
        };
        let basepoint = match &j.basepoint {
            Some(b) => index(b)?,
            None => 0,
        };
        let tree = pairs(&j.tree_edges)?;
        let plus = pairs(&j.plus_edges)?;
        PrimitiveSplitting::new(j.vertices.clone(), basepoint, &tree, plus)
    }
}

impl From<PrimitiveSplitting> for SplittingJson {
    fn from(s: PrimitiveSplitting) -> Self {
        let name = |v: usize| s.vertices[v].clone();
        SplittingJson {
            tree_edges: s.tree.iter().map(|&(a, b)| [name(a), name(b)]).collect(),
            plus_edges: s.plus.iter().map(|&(a, b)| [name(a), name(b)]).collect(),
            basepoint: Some(name(s.basepoint)),
            vertices: s.vertices,
        }
    }
}

impl PrimitiveSplitting {
    /// `tree` may list its edges in either orientation; they are re-oriented
    /// away from `basepoint`.
    pub fn new(
        vertices: Vec<String>,
        basepoint: usize,
        tree: &[(usize, usize)],
        plus: Vec<(usize, usize)>,
    ) -> Result<Self, FbzError> {
        let invalid = FbzError::InvalidSplitting;
        let n = vertices.len();
        if n == 0 {
            return Err(invalid("no vertices".into()));
        }
        let distinct: HashSet<&String> = vertices.iter().collect();
        if distinct.len() != n {
            return Err(invalid("duplicate vertex names".into()));
        }
        if basepoint >= n {
            return Err(invalid("basepoint out of range".into()));
        }
        if tree.len() + 1 != n {
            return Err(invalid(format!(
                "a spanning tree on {n} vertices needs {} edges, got {}",
                n - 1,
                tree.len()
            )));
        }
        if let Some(&(a, b)) = tree.iter().chain(&plus).find(|&&(a, b)| a >= n || b >= n) {
            return Err(invalid(format!("edge ({a}, {b}) out of range")));
        }
        let mut parent_edge = vec![None; n];
        let mut oriented = tree.to_vec();
        let mut seen = vec![false; n];
        seen[basepoint] = true;
        let mut order = vec![basepoint];
        let mut queue = VecDeque::from([basepoint]);
        while let Some(v) = queue.pop_front() {
            for (i, &(a, b)) in tree.iter().enumerate() {
                let child = match (a == v, b == v) {
                    (true, false) => b,
                    (false, true) => a,
                    _ => continue,
                };
                if seen[child] {
                    continue;
                }
                seen[child] = true;
                oriented[i] = (v, child);
                parent_edge[child] = Some(i);
                order.push(child);
                queue.push_back(child);
            }
        }
        if order.len() != n {
            return Err(invalid("tree edges do not span the vertices".into()));
        }
        Ok(PrimitiveSplitting {
            vertices,
            basepoint,
            tree: oriented,
            plus,
            parent_edge,
            order,
        })
    }

    /// One vertex carrying `a` and a loop per remaining generator.
    pub fn rose(rank: usize) -> Self {
        assert!(rank >= 1);
        PrimitiveSplitting::new(vec!["v1".into()], 0, &[], vec![(0, 0); rank - 1])
            .expect("rose splitting is valid")
    }

    pub fn rank(&self) -> usize {
        self.vertices.len() + self.plus.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree
    }

    pub fn plus_edges(&self) -> &[(usize, usize)] {
        &self.plus
    }

    /// Edge ids `e1, e2, …`: tree edges first, then plus edges.
    pub fn tree_edge_id(&self, i: usize) -> String {
        format!("e{}", i + 1)
    }

    pub fn plus_edge_id(&self, j: usize) -> String {
        format!("e{}", self.tree.len() + j + 1)
    }

    /// Free generator `a_v`.
    pub fn vertex_letter(&self, v: usize) -> Letter {
        v as Letter + 1
    }

    /// Free generator `x_e` of the `j`-th plus edge.
    pub fn edge_letter(&self, j: usize) -> Letter {
        (self.vertices.len() + j) as Letter + 1
    }

    /// `w_v` for every vertex, given the tree exponents.
    fn tree_words(&self, p: &[i64]) -> Vec<Word> {
        let mut w = vec![Word::identity(); self.vertices.len()];
        for &v in &self.order[1..] {
            let e = self.parent_edge[v].expect("non-root vertex has a parent edge");
            let parent = self.tree[e].0;
            w[v] = w[parent].mul(&Word::letter_pow(self.vertex_letter(parent), p[e]));
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluData {
    pub splitting: PrimitiveSplitting,
    /// Indexed by tree edge.
    pub p: Vec<i64>,
    /// Indexed by plus edge.
    pub q: Vec<i64>,
    pub r: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluJson {
    #[serde(flatten)]
    pub splitting: SplittingJson,
    #[serde(default)]
    pub p: BTreeMap<String, i64>,
    #[serde(default)]
    pub q: BTreeMap<String, i64>,
    #[serde(default)]
    pub r: BTreeMap<String, i64>,
}

impl TryFrom<GluJson> for GluData {
    type Error = FbzError;
    fn try_from(j: GluJson) -> Result<Self, FbzError> {
        let splitting = PrimitiveSplitting::try_from(j.splitting)?;
        let tree_ids: Vec<String> = (0..splitting.tree.len()).map(|i| splitting.tree_edge_id(i)).collect();
        let plus_ids: Vec<String> = (0..splitting.plus.len()).map(|i| splitting.plus_edge_id(i)).collect();
        let take = |name: &str, map: &BTreeMap<String, i64>, ids: &[String]| {
            if let Some(extra) = map.keys().find(|k| !ids.contains(k)) {
                return Err(FbzError::InvalidGluData(format!("`{name}` has unknown edge `{extra}`")));
            }
            ids.iter()
                .map(|id| {
                    map.get(id)
                        .copied()
                        .ok_or_else(|| FbzError::InvalidGluData(format!("`{name}` is missing edge `{id}`")))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(GluData {
            p: take("p", &j.p, &tree_ids)?,
            q: take("q", &j.q, &plus_ids)?,
            r: take("r", &j.r, &plus_ids)?,
            splitting,
        })
    }
}

impl From<&GluData> for GluJson {
    fn from(d: &GluData) -> Self {
        let s = &d.splitting;
        let keyed = |ids: &mut dyn Iterator<Item = String>, vals: &[i64]| ids.zip(vals.iter().copied()).collect();
        GluJson {
            p: keyed(&mut (0..s.tree.len()).map(|i| s.tree_edge_id(i)), &d.p),
            q: keyed(&mut (0..s.plus.len()).map(|i| s.plus_edge_id(i)), &d.q),
            r: keyed(&mut (0..s.plus.len()).map(|i| s.plus_edge_id(i)), &d.r),
            splitting: s.clone().into(),
        }
    }
}

impl GluData {
    pub fn zero(splitting: PrimitiveSplitting) -> Self {
        GluData {
            p: vec![0; splitting.tree.len()],
            q: vec![0; splitting.plus.len()],
            r: vec![0; splitting.plus.len()],
            splitting,
        }
    }

    fn check(&self) -> Result<(), FbzError> {
        let s = &self.splitting;
        if self.p.len() != s.tree.len() || self.q.len() != s.plus.len() || self.r.len() != s.plus.len() {
            return Err(FbzError::InvalidGluData(format!(
                "expected {} tree and {} plus exponents, got p:{} q:{} r:{}",
                s.tree.len(),
                s.plus.len(),
                self.p.len(),
                self.q.len(),
                self.r.len()
            )));
        }
        Ok(())
    }

    fn negated(&self) -> GluData {
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect();
        GluData {
            splitting: self.splitting.clone(),
            p: neg(&self.p),
            q: neg(&self.q),
            r: neg(&self.r),
        }
    }

    fn images(&self) -> Vec<Word> {
        let s = &self.splitting;
        let w = s.tree_words(&self.p);
        let mut images: Vec<Word> = (0..s.vertices.len())
            .map(|v| w[v].conjugate(&Word::letter(s.vertex_letter(v))))
            .collect();
        for (j, &(o, t)) in s.plus.iter().enumerate() {
            let img = w[o]
                .mul(&Word::letter_pow(s.vertex_letter(o), self.q[j]))
                .mul(&Word::letter(s.edge_letter(j)))
                .mul(&Word::letter_pow(s.vertex_letter(t), self.r[j]))
                .mul(&w[t].inverse());
            images.push(img);
        }
        images
    }

    /// `w_v` for every vertex.
    pub fn tree_words(&self) -> Vec<Word> {
        self.splitting.tree_words(&self.p)
    }
}

/// The automorphism described by a GLU certificate. Its inverse is the one
/// with all exponents negated.
pub fn make_glu(data: &GluData) -> Result<FreeAut, FbzError> {
    data.check()?;
    let aut = FreeAut::new(data.splitting.rank(), data.images(), data.negated().images())?;
    Ok(aut)
}

/// Exponent `k` if `w` is exactly `x^k` for the letter `x`.
fn as_power(w: &[Letter], x: Letter) -> Option<i64> {
    match w.first() {
        None => Some(0),
        Some(&l) if l == x || l == -x => w.iter().all(|&m| m == l).then(|| l.signum() as i64 * w.len() as i64),
        _ => None,
    }
}

/// Recover the GLU exponents of `aut` relative to `splitting`.
pub fn check_glu(aut: &FreeAut, splitting: &PrimitiveSplitting) -> Result<GluData, FbzError> {
    if aut.rank() != splitting.rank() {
        return Err(FbzError::RankMismatch {
            aut: aut.rank(),
            splitting: splitting.rank(),
        });
    }
    let s = splitting;
    let images = aut.images();
    let mut p = vec![0i64; s.tree.len()];
    let mut w = vec![Word::identity(); s.vertices.len()];
    let root = s.basepoint;
    if images[root].letters() != [s.vertex_letter(root)] {
        return Err(FbzError::NoMatch(format!(
            "basepoint generator {} is not fixed",
            generator_name(s.vertex_letter(root) as u32)
        )));
    }
    for &v in &s.order[1..] {
        let e = s.parent_edge[v].expect("non-root vertex has a parent edge");
        let parent = s.tree[e].0;
        let (a_par, a_v) = (s.vertex_letter(parent), s.vertex_letter(v));
        // w_par⁻¹ Φ(a_v) w_par should be a_par^p a_v a_par^{-p}
        let y = w[parent].inverse().mul(&images[v]).mul(&w[parent]);
        let letters = y.letters();
        let mid = letters.iter().position(|&l| l == a_v);
        let matched = mid.and_then(|m| {
            let k = as_power(&letters[..m], a_par)?;
            (Word::letter_pow(a_par, k).conjugate(&Word::letter(a_v)) == y).then_some(k)
        });
        let Some(k) = matched else {
            return Err(FbzError::NoMatch(format!(
                "image of {} is {}, not a conjugate a^p {} a^-p along the tree",
                generator_name(a_v as u32),
                images[v],
                generator_name(a_v as u32)
            )));
        };
        p[e] = k;
        w[v] = w[parent].mul(&Word::letter_pow(a_par, k));
    }
    let mut q = vec![0i64; s.plus.len()];
    let mut r = vec![0i64; s.plus.len()];
    for (j, &(o, t)) in s.plus.iter().enumerate() {
        let x = s.edge_letter(j);
        let y = w[o].inverse().mul(&images[x as usize - 1]).mul(&w[t]);
        let letters = y.letters();
        let fail = || {
            FbzError::NoMatch(format!(
                "image of {} is {}, not of the form w_o a_o^q x a_t^r w_t^-1",
                generator_name(x as u32),
                images[x as usize - 1]
            ))
        };
        let m = letters.iter().position(|&l| l == x).ok_or_else(fail)?;
        q[j] = as_power(&letters[..m], s.vertex_letter(o)).ok_or_else(fail)?;
        r[j] = as_power(&letters[m + 1..], s.vertex_letter(t)).ok_or_else(fail)?;
    }
    let data = GluData {
        splitting: s.clone(),
        p,
        q,
        r,
    };
    if data.images() != images {
        return Err(FbzError::NoMatch("reconstructed images differ".into()));
    }
    Ok(data)
}

/// All freely reduced words of length ≤ `max_len` over `rank` generators, in
/// shortlex order.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
    let mut out = vec![Word::identity()];
    let mut layer = vec![Vec::<Letter>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last() != Some(&-l) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().map(|v| crate::words::reduce(v.iter().copied())));
        layer = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluCertificate {
    pub power: u32,
    pub conjugator: Word,
    pub data: GluData,
}

impl GluCertificate {
    pub fn to_certificate(&self) -> Certificate {
        Certificate::Glu {
            power: self.power,
            conjugator: self.conjugator.clone(),
            data: GluJson::from(&self.data),
        }
    }
}

/// Search `k = 1..=max_power` and conjugators `|g| ≤ conj_ball` for
/// `ad_g ∘ Φ^k` GLU relative to `splitting`. `None` proves nothing.
pub fn glu_power_search(
    aut: &FreeAut,
    splitting: &PrimitiveSplitting,
    max_power: u32,
    conj_ball: usize,
) -> Result<Option<GluCertificate>, FbzError> {
    if aut.rank() != splitting.rank() {
        return Err(FbzError::RankMismatch {
            aut: aut.rank(),
            splitting: splitting.rank(),
        });
    }
    let conjugators = reduced_words(aut.rank(), conj_ball);
    let mut phi_k = FreeAut::identity(aut.rank());
    for k in 1..=max_power {
        phi_k = aut.compose(&phi_k);
        for g in &conjugators {
            let candidate = phi_k.conjugated_by(g)?;
            if let Ok(data) = check_glu(&candidate, splitting) {
                return Ok(Some(GluCertificate {
                    power: k,
                    conjugator: g.clone(),
                    data,
                }));
            }
        }
    }
    Ok(None)
}

/// The tubular splitting of `G_φ` for a GLU automorphism: a `Z²` vertex
/// `⟨a_v, w_v⁻¹ t⟩` per splitting vertex, a `Z` edge per tree edge and an HNN
/// edge per plus edge. The result is checked against `G_φ` before returning.
pub fn tubularize(data: &GluData) -> Result<GraphOfGroups, FbzError> {
    let aut = make_glu(data)?;
    let s = &data.splitting;
    let vertices: Vec<GogVertex> = s
        .vertices
        .iter()
        .map(|id| GogVertex { id: id.clone(), kind: GroupKind::Z2 })
        .collect();
    let mut edges = Vec::new();
    for (i, &(parent, child)) in s.tree.iter().enumerate() {
        // u_child = a_parent^{-p} u_parent
        edges.push(GogEdge {
            id: s.tree_edge_id(i),
            from: parent,
            to: child,
            kind: GroupKind::Z,
            inj_from: Injection::Z2(-data.p[i], 1),
            inj_to: Injection::Z2(0, 1),
        });
    }
    for (j, &(o, t)) in s.plus.iter().enumerate() {
        // x_e (a_τ^r u_τ) x_e⁻¹ = a_o^{-q} u_o
        edges.push(GogEdge {
            id: s.plus_edge_id(j),
            from: t,
            to: o,
            kind: GroupKind::Z,
            inj_from: Injection::Z2(data.r[j], 1),
            inj_to: Injection::Z2(-data.q[j], 1),
        });
    }
    let gog = GraphOfGroups::new(vertices, edges)
        .map_err(|e| FbzError::TubularizationInconsistent(e.to_string()))?;
    verify_tubular(data, &aut, &gog)?;
    Ok(gog)
}

/// Images in `G_φ` of the tubular presentation generators: `a_v`, `u_v` per
/// vertex, then `x_e` per plus edge.
pub fn tubular_generator_images(data: &GluData, aut: &FreeAut) -> Vec<FbzElement> {
    let s = &data.splitting;
    let w = data.tree_words();
    let mut out = Vec::with_capacity(2 * s.vertices.len() + s.plus.len());
    for (v, wv) in w.iter().enumerate() {
        out.push(FbzElement::fiber(Word::letter(s.vertex_letter(v))));
        out.push(FbzElement::fiber(wv.inverse()).mul(&FbzElement::stable(1), aut));
    }
    out.extend((0..s.plus.len()).map(|j| FbzElement::fiber(Word::letter(s.edge_letter(j)))));
    out
}

fn verify_tubular(data: &GluData, aut: &FreeAut, gog: &GraphOfGroups) -> Result<(), FbzError> {
    let inconsistent = FbzError::TubularizationInconsistent;
    let tree: Vec<usize> = (0..data.splitting.tree.len()).collect();
    let pres = gog
        .presentation(&tree)
        .map_err(|e| inconsistent(e.to_string()))?;
    let images = tubular_generator_images(data, aut);
    if images.len() != pres.generators.len() {
        return Err(inconsistent("generator count mismatch".into()));
    }
    let inverses: Vec<FbzElement> = images.iter().map(|g| g.inverse(aut)).collect();
    for rel in &pres.relators {
        let value = rel.iter().fold(FbzElement::identity(), |acc, &l| {
            let i = l.unsigned_abs() as usize - 1;
            acc.mul(if l > 0 { &images[i] } else { &inverses[i] }, aut)
        });
        if !value.is_identity() {
            return Err(inconsistent(format!(
                "relator {} evaluates to {}",
                pres.format_relator(rel),
                value.display()
            )));
        }
    }
    let image_set: HashSet<&FbzElement> = images.iter().collect();
    let targets = (1..=aut.rank() as Letter)
        .map(|i| FbzElement::fiber(Word::letter(i)))
        .chain([FbzElement::stable(1)]);
    for g in targets {
        if !image_set.contains(&g) {
            return Err(inconsistent(format!("generator {} of G_φ is not hit", g.display())));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgroupClass {
    Trivial,
    Z,
    Z2,
    KleinBottle,
    ExponentialHeuristic,
    Unknown,
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn commute(g: &FbzElement, h: &FbzElement, aut: &FreeAut) -> bool {
    g.mul(h, aut) == h.mul(g, aut)
}

fn pow(g: &FbzElement, k: i64, aut: &FreeAut) -> FbzElement {
    let base = if k < 0 { g.inverse(aut) } else { g.clone() };
    (0..k.unsigned_abs()).fold(FbzElement::identity(), |acc, _| acc.mul(&base, aut))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Classify `⟨gens⟩ ≤ G_φ` where relations certify the answer, falling back
/// to ball growth up to `radius`.
pub fn subgroup_classify(aut: &FreeAut, gens: &[FbzElement], radius: usize) -> SubgroupClass {
    let gens: Vec<&FbzElement> = gens.iter().filter(|g| !g.is_identity()).collect();
    if gens.is_empty() {
        return SubgroupClass::Trivial;
    }
    let abelian = gens
        .iter()
        .enumerate()
        .all(|(i, g)| gens[i + 1..].iter().all(|h| commute(g, h, aut)));
    if abelian {
        let transverse = gens.iter().any(|g| g.k != 0);
        // elements of ⟨gens⟩ ∩ F_n spanning it rationally
        let mut kernel = gens.iter().any(|g| g.k == 0);
        for (i, g) in gens.iter().enumerate() {
            for h in &gens[i + 1..] {
                if kernel || g.k == 0 || h.k == 0 {
                    continue;
                }
                let d = gcd(g.k, h.k);
                let z = pow(g, h.k / d, aut).mul(&pow(h, -g.k / d, aut), aut);
                kernel |= !z.is_identity();
            }
        }
        return match usize::from(transverse) + usize::from(kernel) {
            2 => SubgroupClass::Z2,
            _ => SubgroupClass::Z,
        };
    }
    if let [g, h] = gens[..] {
        for (x, y) in [(g, h), (h, g)] {
            let lhs = y.mul(x, aut).mul(&y.inverse(aut), aut);
            if lhs == x.inverse(aut) {
                return SubgroupClass::KleinBottle;
            }
        }
    }
    let counts = subgroup_ball(aut, &gens, radius);
    if exceeds_cubic_envelope(&counts) {
        SubgroupClass::ExponentialHeuristic
    } else {
        SubgroupClass::Unknown
    }
}

/// Ball sizes `b_0..b_R` in the subgroup generated by `gens`.
pub fn subgroup_ball(aut: &FreeAut, gens: &[&FbzElement], radius: usize) -> Vec<u64> {
    let steps: Vec<FbzElement> = gens
        .iter()
        .flat_map(|g| [(*g).clone(), g.inverse(aut)])
        .collect();
    let mut seen: HashSet<FbzElement> = HashSet::from([FbzElement::identity()]);
    let mut frontier = vec![FbzElement::identity()];
    let mut counts = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &steps {
                let y = x.mul(s, aut);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
    }
    counts
}

/// `b_j > (b_3/27)·j³` for three consecutive radii `j > 3`.
pub fn exceeds_cubic_envelope(counts: &[u64]) -> bool {
    if counts.len() < 7 {
        return false;
    }
    let c = counts[3] as f64 / 27.0;
    let above: Vec<bool> = (4..counts.len())
        .map(|j| counts[j] as f64 > c * (j as f64).powi(3))
        .collect();
    above.windows(3).any(|w| w.iter().all(|&b| b))
}

/// Growth-profile length used for the fallback exponential test.
pub const VERDICT_GROWTH_POWER: usize = 12;

/// Vanishing via a GLU power, heuristic non-vanishing via exponential growth,
/// otherwise unknown. Without a splitting the rose splitting is tried.
pub fn fbz_verdict(
    aut: &FreeAut,
    splitting: Option<&PrimitiveSplitting>,
    max_power: u32,
    conj_ball: usize,
) -> Result<Verdict, FbzError> {
    let rose;
    let splitting = match splitting {
        Some(s) => s,
        None => {
            rose = PrimitiveSplitting::rose(aut.rank());
            &rose
        }
    };
    if let Some(cert) = glu_power_search(aut, splitting, max_power, conj_ball)? {
        return Ok(Verdict::vanishing(cert.to_certificate()));
    }
    let profile = aut.growth_profile(VERDICT_GROWTH_POWER);
    if profile.classification == GrowthClass::ExponentialHeuristic {
        return Ok(Verdict::nonvanishing(
            Status::NonVanishingHeuristic,
            nonvanishing_bound(fbz_uniform_rate()),
            Certificate::Growth(profile),
        )
        .with_note("exponential growth detected heuristically; no power of φ can be GLU"));
    }
    Ok(Verdict::without_bound(Status::Unknown, Certificate::Growth(profile))
        .with_note("no GLU power found within the search bounds and growth is not exponential"))
}

/// Abelianizations of the native `G_φ` presentation and of the tubular one.
pub fn abelianization_pair(data: &GluData) -> Result<(Abelianization, Abelianization), FbzError> {
    let aut = make_glu(data)?;
    let gog = tubularize(data)?;
    let tree: Vec<usize> = (0..data.splitting.tree.len()).collect();
    let tubular = gog
        .presentation(&tree)
        .map_err(|e| FbzError::TubularizationInconsistent(e.to_string()))?;
    Ok((native_presentation(&aut).abelianization(), tubular.abelianization()))
}
