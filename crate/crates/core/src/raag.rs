//! Right-angled Artin groups: defining graphs, reduced normal forms, the
//! two-generator dichotomy and the forest verdict.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verdict::{
    free_group_omega, nonvanishing_bound, raag_uniform_rate, Certificate, Status, Verdict,
};
use crate::words::Letter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RaagError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("letter {0} does not name a vertex")]
    LetterOutOfRange(Letter),
    #[error("two-generator classification needs nontrivial elements")]
    TrivialInput,
}

/// A finite simplicial graph. Vertex order is declaration order and doubles
/// as the alphabet order for normal forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct SimplicialGraph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<bool>>,
}

/// `{"vertices": ["a","b"], "edges": [["a","b"]]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl TryFrom<GraphJson> for SimplicialGraph {
    type Error = RaagError;
    fn try_from(j: GraphJson) -> Result<Self, RaagError> {
        let edges: Vec<(&str, &str)> = j
            .edges
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        SimplicialGraph::new(j.vertices.clone(), &edges)
    }
}

impl From<SimplicialGraph> for GraphJson {
    fn from(g: SimplicialGraph) -> Self {
        GraphJson {
            edges: g
                .edges
                .iter()
                .map(|&(a, b)| [g.labels[a].clone(), g.labels[b].clone()])
                .collect(),
            vertices: g.labels,
        }
    }
}

impl SimplicialGraph {
    pub fn new(labels: Vec<String>, edges: &[(&str, &str)]) -> Result<Self, RaagError> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.as_str(), i).is_some() {
                return Err(RaagError::InvalidGraph(format!("duplicate vertex `{l}`")));
            }
        }
        let n = labels.len();
        let mut adj = vec![vec![false; n]; n];
        let mut edge_list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let lookup = |x: &str| {
                index
                    .get(x)
                    .copied()
                    .ok_or_else(|| RaagError::InvalidGraph(format!("edge names unknown vertex `{x}`")))
            };
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(RaagError::InvalidGraph(format!("loop at `{a}`")));
            }
            if adj[i][j] {
                return Err(RaagError::InvalidGraph(format!("repeated edge {a}–{b}")));
            }
            adj[i][j] = true;
            adj[j][i] = true;
            edge_list.push((i, j));
        }
        Ok(SimplicialGraph {
            labels,
            edges: edge_list,
            adj,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_strs(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, RaagError> {
        Self::new(vertices.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(j, &a)| a.then_some(j))
    }

    /// Two letters commute in `A_Γ` when they name the same or adjacent vertices.
    pub fn letters_commute(&self, x: Letter, y: Letter) -> bool {
        let (i, j) = (x.unsigned_abs() as usize - 1, y.unsigned_abs() as usize - 1);
        i == j || self.adj[i][j]
    }

    pub fn find_triangle(&self) -> Option<[usize; 3]> {
        for &(a, b) in &self.edges {
            if let Some(c) = (0..self.vertex_count()).find(|&c| self.adj[a][c] && self.adj[b][c]) {
                let mut t = [a, b, c];
                t.sort_unstable();
                return Some(t);
            }
        }
        None
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.component_count() == self.vertex_count()
    }

    /// First cycle found by depth-first search in declaration order.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            // iterative DFS with explicit neighbor cursors
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            state[root] = 1;
            while let Some(&mut (v, ref mut cursor)) = stack.last_mut() {
                if let Some(w) = (*cursor..n).find(|&w| self.adj[v][w]) {
                    *cursor = w + 1;
                    if Some(w) == parent[v] {
                        continue;
                    }
                    match state[w] {
                        0 => {
                            parent[w] = Some(v);
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => {
                            let mut cycle = vec![v];
                            let mut cur = v;
                            while cur != w {
                                cur = parent[cur].expect("ancestor chain");
                                cycle.push(cur);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Edge sets of the biconnected components (blocks) of the graph.
    pub fn biconnected_components(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.vertex_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut time = 0;
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        let mut blocks = Vec::new();

        fn visit(
            g: &SimplicialGraph,
            v: usize,
            parent: Option<usize>,
            disc: &mut [usize],
            low: &mut [usize],
            time: &mut usize,
            edge_stack: &mut Vec<(usize, usize)>,
            blocks: &mut Vec<Vec<(usize, usize)>>,
        ) {
            disc[v] = *time;
            low[v] = *time;
            *time += 1;
            for w in g.neighbors(v).collect::<Vec<_>>() {
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    visit(g, w, Some(v), disc, low, time, edge_stack, blocks);
                    low[v] = low[v].min(low[w]);
                    if low[w] >= disc[v] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == (v, w) {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                } else if Some(w) != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            }
        }

        for v in 0..n {
            if disc[v] == usize::MAX {
                visit(
                    self,
                    v,
                    None,
                    &mut disc,
                    &mut low,
                    &mut time,
                    &mut edge_stack,
                    &mut blocks,
                );
            }
        }
        blocks
    }

    /// The same graph with vertex `i` renamed to `labels[perm[i]]`-th position:
    /// vertex `i` becomes vertex `perm[i]` of the result.
    pub fn relabeled(&self, perm: &[usize]) -> SimplicialGraph {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        let mut labels = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i].clone();
        }
        let edges: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&(a, b)| (self.labels[a].as_str(), self.labels[b].as_str()))
            .collect();
        SimplicialGraph::new(labels, &edges).expect("relabeling preserves validity")
    }

    /// Parse a word of vertex labels, `-` suffix for inverses.
    pub fn parse_word(&self, s: &str) -> Result<RaagWord, RaagError> {
        s.split_whitespace()
            .map(|tok| {
                let (name, inv) = match tok.strip_suffix('-') {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                let i = self
                    .index_of(name)
                    .ok_or_else(|| RaagError::UnknownVertex(name.to_string()))?
                    as Letter
                    + 1;
                Ok(if inv { -i } else { i })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(RaagWord)
    }

    pub fn format_word(&self, w: &RaagWord) -> String {
        w.0.iter()
            .map(|&l| {
                let name = &self.labels[l.unsigned_abs() as usize - 1];
                if l < 0 {
                    format!("{name}-")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn check_word(&self, w: &RaagWord) -> Result<(), RaagError> {
        match w.0.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > self.vertex_count()) {
            Some(&l) => Err(RaagError::LetterOutOfRange(l)),
            None => Ok(()),
        }
    }

    /// Shortlex-least reduced representative of the element `w` of `A_Γ`.
    pub fn normal_form(&self, w: &RaagWord) -> Result<RaagWord, RaagError> {
        self.check_word(w)?;
        Ok(RaagWord(self.normal_form_letters(&w.0)))
    }

    pub(crate) fn normal_form_letters(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut w = letters.to_vec();
        // Delete x … x⁻¹ pairs whose interior commutes with x.
        'cancel: loop {
            for i in 0..w.len() {
                let x = w[i];
                for j in i + 1..w.len() {
                    if w[j] == -x {
                        w.remove(j);
                        w.remove(i);
                        continue 'cancel;
                    }
                    if !self.letters_commute(x, w[j]) {
                        break;
                    }
                }
            }
            break;
        }
        // Greedy lexicographic linearisation of the trace.
        let mut out = Vec::with_capacity(w.len());
        while !w.is_empty() {
            let mut best: Option<usize> = None;
            for p in 0..w.len() {
                if !w[..p].iter().all(|&y| self.letters_commute(y, w[p])) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => crate::words::letter_rank(w[p]) < crate::words::letter_rank(w[b]),
                };
                if better {
                    best = Some(p);
                }
            }
            let p = best.expect("the first letter is always movable");
            out.push(w.remove(p));
        }
        out
    }

    pub fn multiply(&self, u: &RaagWord, v: &RaagWord) -> Result<RaagWord, RaagError> {
        let mut letters = u.0.clone();
        letters.extend_from_slice(&v.0);
        self.normal_form(&RaagWord(letters))
    }

    /// Baudisch: two elements of a RAAG generate either `Z`/`Z²` or `F₂`.
    pub fn two_generator_class(
        &self,
        g: &RaagWord,
        h: &RaagWord,
    ) -> Result<TwoGeneratorClass, RaagError> {
        let g = self.normal_form(g)?;
        let h = self.normal_form(h)?;
        if g.0.is_empty() || h.0.is_empty() {
            return Err(RaagError::TrivialInput);
        }
        let mut commutator = g.0.clone();
        commutator.extend_from_slice(&h.0);
        commutator.extend(g.inverse().0);
        commutator.extend(h.inverse().0);
        Ok(if self.normal_form_letters(&commutator).is_empty() {
            TwoGeneratorClass::Abelian
        } else {
            TwoGeneratorClass::FreeOfRankTwo
        })
    }

    pub fn label_pair(&self, (a, b): (usize, usize)) -> [String; 2] {
        [self.labels[a].clone(), self.labels[b].clone()]
    }
}

/// A word in the vertex generators of a RAAG (letters `±(i+1)` for vertex `i`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaagWord(pub Vec<Letter>);

impl RaagWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> RaagWord {
        RaagWord(self.0.iter().rev().map(|&l| -l).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoGeneratorClass {
    Abelian,
    FreeOfRankTwo,
}

/// Vanishing of `ω(A_Γ)` for triangle-free `Γ`.
pub fn raag_verdict(graph: &SimplicialGraph) -> Verdict {
    let labels = graph.labels();
    if let Some([a, b, c]) = graph.find_triangle() {
        return Verdict::without_bound(
            Status::Unsupported,
            Certificate::Triangle([labels[a].clone(), labels[b].clone(), labels[c].clone()]),
        )
        .with_note("graph contains a triangle: geometric dimension is at least 3");
    }
    let n = graph.vertex_count();
    if graph.edges().is_empty() {
        return Verdict::without_bound(
            Status::Unsupported,
            Certificate::FreeGroup {
                rank: n,
                free_group_omega: (n >= 2).then(|| free_group_omega(n)),
            },
        )
        .with_note("edgeless graph: A_Γ is free of rank n, geometric dimension at most 1");
    }
    if graph.is_forest() {
        let forest = graph.edges().iter().map(|&e| graph.label_pair(e)).collect();
        return Verdict::vanishing(Certificate::SpanningForest(forest));
    }
    let cycle = graph
        .find_cycle()
        .expect("a graph that is not a forest has a cycle");
    Verdict::nonvanishing(
        Status::NonVanishing,
        nonvanishing_bound(raag_uniform_rate()),
        Certificate::Cycle(cycle.into_iter().map(|v| labels[v].clone()).collect()),
    )
}

/// Forest test through blocks: every biconnected component is a single edge.
pub fn blocks_are_edges(graph: &SimplicialGraph) -> bool {
    graph
        .biconnected_components()
        .iter()
        .all(|b| b.len() == 1)
}

/// Set of unordered vertex pairs, for comparing edge sets.
pub fn edge_set(edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SimplicialGraph {
        SimplicialGraph::from_strs(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    fn nf(g: &SimplicialGraph, s: &str) -> String {
        let w = g.parse_word(s).unwrap();
        g.format_word(&g.normal_form(&w).unwrap())
    }

    #[test]
    fn normal_form_examples() {
        let g = path3();
        assert_eq!(nf(&g, "b a"), "a b");
        assert_eq!(nf(&g, "c a"), "c a");
        assert_eq!(nf(&g, "a b b- a-"), "");
        // cancellation through a commuting letter
        assert_eq!(nf(&g, "a b a-"), "b");
        assert_eq!(nf(&g, "a c a-"), "a c a-");
    }

    #[test]
    fn unknown_vertex() {
        let g = path3();
        assert_eq!(g.parse_word("a z"), Err(RaagError::UnknownVertex("z".into())));
        assert!(matches!(
            g.normal_form(&RaagWord(vec![4])),
            Err(RaagError::LetterOutOfRange(4))
        ));
    }

    #[test]
    fn invalid_graphs() {
        assert!(SimplicialGraph::from_strs(&["a", "a"], &[]).is_err());
        assert!(SimplicialGraph::from_strs(&["a"], &[("a", "a")]).is_err());
        assert!(SimplicialGraph::from_strs(&["a", "b"], &[("a", "b"), ("b", "a")]).is_err());
        assert!(SimplicialGraph::from_strs(&["a"], &[("a", "q")]).is_err());
    }

    #[test]
    fn baudisch_examples() {
        let edge = SimplicialGraph::from_strs(&["a", "b"], &[("a", "b")]).unwrap();
        let a = edge.parse_word("a").unwrap();
        let b = edge.parse_word("b").unwrap();
        assert_eq!(edge.two_generator_class(&a, &b), Ok(TwoGeneratorClass::Abelian));

        let free = SimplicialGraph::from_strs(&["a", "b"], &[]).unwrap();
        assert_eq!(
            free.two_generator_class(&a, &b),
            Ok(TwoGeneratorClass::FreeOfRankTwo)
        );
        let a2 = free.parse_word("a a").unwrap();
        assert_eq!(free.two_generator_class(&a, &a2), Ok(TwoGeneratorClass::Abelian));
        let e = free.parse_word("a a-").unwrap();
        assert_eq!(free.two_generator_class(&a, &e), Err(RaagError::TrivialInput));
    }

    #[test]
    fn verdict_examples() {
        let p4 = SimplicialGraph::from_strs(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d")],
        )
        .unwrap();
        let v = raag_verdict(&p4);
        assert_eq!(v.status, Status::Vanishing);
        assert_eq!(v.lower_bound, Some(0.0));

        let c4 = SimplicialGraph::from_strs(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
        .unwrap();
        let v = raag_verdict(&c4);
        assert_eq!(v.status, Status::NonVanishing);
        assert!((v.lower_bound.unwrap() - 5.493e-7).abs() < 1e-10);
        assert_eq!(
            v.certificate,
            Certificate::Cycle(vec!["a".into(), "b".into(), "c".into(), "d".into()])
        );

        let k3 = SimplicialGraph::from_strs(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c"), ("c", "a")],
        )
        .unwrap();
        assert_eq!(raag_verdict(&k3).status, Status::Unsupported);

        let empty = SimplicialGraph::from_strs(&["a", "b", "c"], &[]).unwrap();
        let v = raag_verdict(&empty);
        assert_eq!(v.status, Status::Unsupported);
        match v.certificate {
            Certificate::FreeGroup {
                rank: 3,
                free_group_omega: Some(w),
            } => assert!((w - 6.0 * 2f64.ln()).abs() < 1e-12),
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn cycle_is_a_real_cycle() {
        let g = SimplicialGraph::from_strs(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "b")],
        )
        .unwrap();
        let cyc = g.find_cycle().unwrap();
        assert!(cyc.len() >= 3);
        for i in 0..cyc.len() {
            assert!(g.adjacent(cyc[i], cyc[(i + 1) % cyc.len()]));
        }
    }

    #[test]
    fn blocks() {
        let g = SimplicialGraph::from_strs(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "b"), ("d", "e")],
        )
        .unwrap();
        let mut sizes: Vec<usize> = g.biconnected_components().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 3]);
        assert!(!blocks_are_edges(&g));
        assert!(blocks_are_edges(&path3()));
    }
}
