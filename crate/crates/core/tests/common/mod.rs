//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use minvol::fbz::{GluData, MixedLetter, PrimitiveSplitting};
use minvol::gog::{GogEdge, GogVertex, GraphOfGroups, GroupKind, Injection};
use minvol::raag::SimplicialGraph;
use minvol::words::{reduce, FreeAut, Letter, Word};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read_data<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn word(s: &str) -> Word {
    Word::parse(s).unwrap()
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    reduce((0..len).map(|_| {
        let i = rng.gen_range(1..=rank as Letter);
        if rng.gen_bool(0.5) {
            i
        } else {
            -i
        }
    }))
}

/// A random automorphism built from Nielsen moves, each with a known inverse.
pub fn random_aut<R: Rng>(rng: &mut R, rank: usize, moves: usize) -> FreeAut {
    let basis: Vec<Word> = (1..=rank as Letter).map(Word::letter).collect();
    let mut aut = FreeAut::identity(rank);
    for _ in 0..moves {
        let mut images = basis.clone();
        let mut inverse = basis.clone();
        let i = rng.gen_range(0..rank);
        match rng.gen_range(0..3) {
            0 if rank > 1 => {
                // x_i ↦ x_i x_j^{±1}
                let mut j = rng.gen_range(0..rank - 1);
                if j >= i {
                    j += 1;
                }
                let xj = if rng.gen_bool(0.5) { j as Letter + 1 } else { -(j as Letter + 1) };
                images[i] = basis[i].mul(&Word::letter(xj));
                inverse[i] = basis[i].mul(&Word::letter(-xj));
            }
            1 => {
                images[i] = basis[i].inverse();
                inverse[i] = basis[i].inverse();
            }
            _ => {
                let j = rng.gen_range(0..rank);
                images.swap(i, j);
                inverse.swap(i, j);
            }
        }
        let step = FreeAut::new(rank, images, inverse).unwrap();
        aut = step.compose(&aut);
    }
    aut
}

/// Random GLU data: a random spanning tree on at most `max_vertices`
/// vertices, up to three extra edges, integers in `[-3, 3]`.
pub fn random_glu<R: Rng>(rng: &mut R, max_vertices: usize) -> GluData {
    let n = rng.gen_range(1..=max_vertices);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{}", i + 1)).collect();
    let mut tree = Vec::new();
    for child in 1..n {
        let parent = rng.gen_range(0..child);
        if rng.gen_bool(0.5) {
            tree.push((parent, child));
        } else {
            tree.push((child, parent));
        }
    }
    let plus_count = rng.gen_range(0..=3);
    let plus: Vec<(usize, usize)> = (0..plus_count)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let basepoint = rng.gen_range(0..n);
    let splitting = PrimitiveSplitting::new(vertices, basepoint, &tree, plus).unwrap();
    let mut int = |len: usize| (0..len).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>();
    let p = int(splitting.tree_edges().len());
    let q = int(splitting.plus_edges().len());
    let r = int(splitting.plus_edges().len());
    GluData { splitting, p, q, r }
}

fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    let m = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn random_injection<R: Rng>(rng: &mut R, target: GroupKind) -> Injection {
    match target {
        // bias towards ±1 so that collapsible edges are common
        GroupKind::Z => Injection::Z(if rng.gen_bool(0.6) { nonzero(rng, 1) } else { nonzero(rng, 3) }),
        GroupKind::Z2 | GroupKind::BS11 => {
            let (a, b) = loop {
                let pair = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
                if pair != (0, 0) {
                    break pair;
                }
            };
            if target == GroupKind::Z2 {
                Injection::Z2(a, b)
            } else {
                Injection::Bs(a, b)
            }
        }
        GroupKind::Trivial => Injection::Trivial,
    }
}

/// A random connected graph of groups with up to five vertices.
pub fn random_gog<R: Rng>(rng: &mut R) -> GraphOfGroups {
    let n = rng.gen_range(1..=5);
    let kinds = [GroupKind::Trivial, GroupKind::Z, GroupKind::Z, GroupKind::Z2, GroupKind::BS11];
    let vertices: Vec<GogVertex> = (0..n)
        .map(|i| GogVertex {
            id: format!("v{i}"),
            kind: *kinds.choose(rng).unwrap(),
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|c| (rng.gen_range(0..c), c)).collect();
    for _ in 0..rng.gen_range(0..=2) {
        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let (from, to) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            let both_nontrivial =
                vertices[from].kind != GroupKind::Trivial && vertices[to].kind != GroupKind::Trivial;
            let kind = if both_nontrivial && rng.gen_bool(0.75) {
                GroupKind::Z
            } else {
                GroupKind::Trivial
            };
            let (inj_from, inj_to) = if kind == GroupKind::Z {
                (
                    random_injection(rng, vertices[from].kind),
                    random_injection(rng, vertices[to].kind),
                )
            } else {
                (Injection::Trivial, Injection::Trivial)
            };
            GogEdge {
                id: format!("e{i}"),
                from,
                to,
                kind,
                inj_from,
                inj_to,
            }
        })
        .collect();
    GraphOfGroups::new(vertices, edges).unwrap()
}

pub fn random_mixed<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Vec<MixedLetter> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let i = rng.gen_range(0..2 * rank + 2);
            if i < 2 * rank {
                let l = (i / 2 + 1) as Letter;
                MixedLetter::Free(if i % 2 == 0 { l } else { -l })
            } else {
                MixedLetter::Stable(i == 2 * rank + 1)
            }
        })
        .collect()
}

/// Brute-force rewriting in `F_n ⋊ Z`: apply `x t → t Φ⁻¹(x)`,
/// `x t⁻¹ → t⁻¹ Φ(x)`, and cancellation of inverse pairs at randomly chosen
/// positions until every stable letter is at the front.
pub fn rewrite_normal_form<R: Rng>(aut: &FreeAut, word: &[MixedLetter], rng: &mut R) -> (i64, Word) {
    let mut w = word.to_vec();
    loop {
        let redexes: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| match (w[i], w[i + 1]) {
                (MixedLetter::Free(_), MixedLetter::Stable(_)) => true,
                (MixedLetter::Stable(a), MixedLetter::Stable(b)) => a != b,
                (MixedLetter::Free(x), MixedLetter::Free(y)) => x == -y,
                _ => false,
            })
            .collect();
        let Some(&i) = redexes.choose(rng) else { break };
        let replacement: Vec<MixedLetter> = match (w[i], w[i + 1]) {
            (MixedLetter::Free(x), MixedLetter::Stable(inv)) => {
                let image = if inv {
                    aut.apply(&Word::letter(x)).unwrap()
                } else {
                    aut.apply_inverse(&Word::letter(x)).unwrap()
                };
                std::iter::once(MixedLetter::Stable(inv))
                    .chain(image.letters().iter().map(|&l| MixedLetter::Free(l)))
                    .collect()
            }
            _ => Vec::new(),
        };
        w.splice(i..i + 2, replacement);
    }
    let mut k = 0i64;
    let mut free = Vec::new();
    for l in w {
        match l {
            MixedLetter::Stable(inv) => {
                assert!(free.is_empty(), "stable letter left behind a fiber letter");
                k += if inv { -1 } else { 1 };
            }
            MixedLetter::Free(x) => free.push(x),
        }
    }
    (k, reduce(free))
}

/// All graphs on `n` vertices up to isomorphism, as edge lists.
pub fn graphs_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let canonical = |mask: u32| -> u32 {
        perms
            .iter()
            .map(|p| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &(i, j))| {
                        let (a, c) = (p[i].min(p[j]), p[i].max(p[j]));
                        1u32 << pairs.iter().position(|&e| e == (a, c)).unwrap()
                    })
                    .sum::<u32>()
            })
            .min()
            .unwrap()
    };
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0..1u32 << pairs.len() {
        seen.insert(canonical(mask));
    }
    seen.into_iter()
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|&(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> SimplicialGraph {
    let labels: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
    let named: Vec<(&str, &str)> = edges.iter().map(|&(a, b)| (labels[a].as_str(), labels[b].as_str())).collect();
    SimplicialGraph::new(labels.clone(), &named).unwrap()
}

/// Dense index of the freely reduced words of length at most `max_len` over
/// `2n` letters, ordered by length and then by [`minvol::words::letter_rank`].
pub struct ReducedWordIndex {
    pub rank: usize,
    pub max_len: usize,
    offsets: Vec<u64>,
}

impl ReducedWordIndex {
    pub fn new(rank: usize, max_len: usize) -> Self {
        let mut offsets = vec![0u64];
        let mut count = 1u64;
        for len in 0..=max_len {
            offsets.push(offsets[len] + count);
            count = if len == 0 { 2 * rank as u64 } else { count * (2 * rank as u64 - 1) };
        }
        ReducedWordIndex { rank, max_len, offsets }
    }

    pub fn total(&self) -> usize {
        self.offsets[self.max_len + 1] as usize
    }

    fn letter(r: u32) -> Letter {
        let l = (r / 2 + 1) as Letter;
        if r % 2 == 0 {
            l
        } else {
            -l
        }
    }

    pub fn encode(&self, w: &[Letter]) -> usize {
        let base = 2 * self.rank as u64 - 1;
        let mut idx = 0u64;
        for (i, &l) in w.iter().enumerate() {
            let r = minvol::words::letter_rank(l) as u64;
            if i == 0 {
                idx = r;
            } else {
                let skip = minvol::words::letter_rank(-w[i - 1]) as u64;
                idx = idx * base + if r > skip { r - 1 } else { r };
            }
        }
        (self.offsets[w.len()] + idx) as usize
    }

    pub fn decode(&self, idx: usize, out: &mut Vec<Letter>) {
        let idx = idx as u64;
        let len = (0..=self.max_len).rfind(|&l| self.offsets[l] <= idx).unwrap();
        let mut rest = idx - self.offsets[len];
        let base = 2 * self.rank as u64 - 1;
        let mut digits = vec![0u64; len];
        for d in digits.iter_mut().skip(1).rev() {
            *d = rest % base;
            rest /= base;
        }
        if len > 0 {
            digits[0] = rest;
        }
        out.clear();
        for (i, &d) in digits.iter().enumerate() {
            let l = if i == 0 {
                Self::letter(d as u32)
            } else {
                let skip = minvol::words::letter_rank(-out[i - 1]) as u64;
                Self::letter(if d >= skip { d + 1 } else { d } as u32)
            };
            out.push(l);
        }
    }
}

/// Equivalence classes of reduced words of length `≤ max_len` in `A_Γ`,
/// generated by swapping adjacent commuting letters and free reduction.
/// Returns the class representative of every indexed word.
pub fn trace_classes(graph: &SimplicialGraph, index: &ReducedWordIndex) -> Vec<u32> {
    let total = index.total();
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            let up = p[p[x as usize] as usize];
            p[x as usize] = up;
            x = up;
        }
        x
    }
    let mut w = Vec::new();
    for idx in 0..total {
        index.decode(idx, &mut w);
        for i in 0..w.len().saturating_sub(1) {
            let (x, y) = (w[i], w[i + 1]);
            if x.abs() == y.abs() || !graph.adjacent(x.unsigned_abs() as usize - 1, y.unsigned_abs() as usize - 1) {
                continue;
            }
            let mut swapped = w.clone();
            swapped.swap(i, i + 1);
            let other = index.encode(reduce(swapped).letters());
            let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, other as u32));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    (0..total as u32).map(|i| find(&mut parent, i)).collect()
}
