//! Fundamental, minimum and null-filtered minimum cycle bases.
//!
//! The minimum basis follows Horton: every vertex `v` and edge `(x, y)`
//! produce the candidate `P(v,x) ∪ (x,y) ∪ P(v,y)` from the shortest-path
//! tree rooted at `v`; candidates are sorted by length and selected
//! greedily while they stay independent over GF(2). The null-filtered
//! variant drops, before selection, every candidate whose composed
//! rotation is farther than `ε√N` from the identity.

use crate::error::{Error, Result};
use crate::geometry::RotationMetric;
use crate::gf2::{Gf2Eliminator, Gf2Vector};
use crate::graph::{Circuit, EpipolarGraph, ShortestPathTree};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// How a basis was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// Fundamental cycle basis of a spanning tree.
    Fcb,
    /// Minimum cycle basis (Horton).
    Mcb,
    /// Minimum cycle basis restricted to null circuits.
    NMcb,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Fcb => "FCB",
            BasisKind::Mcb => "MCB",
            BasisKind::NMcb => "N-MCB",
        }
    }
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fcb" => Ok(BasisKind::Fcb),
            "mcb" => Ok(BasisKind::Mcb),
            "nmcb" | "n-mcb" => Ok(BasisKind::NMcb),
            other => Err(Error::InvalidParameter(format!("unknown basis kind {other:?}"))),
        }
    }
}

/// Candidate bookkeeping for Horton-style bases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateStats {
    /// Non-degenerate candidates before deduplication.
    pub generated: usize,
    /// Distinct candidates after deduplication.
    pub unique: usize,
    /// Distinct candidates rejected by the null filter.
    pub discarded: usize,
}

/// A set of GF(2)-independent circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    pub circuits: Vec<Circuit>,
    pub kind: BasisKind,
    /// Spanning tree edge ids (FCB only).
    pub tree: Option<Vec<usize>>,
    pub stats: CandidateStats,
}

impl CycleBasis {
    #[inline]
    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    /// Total number of edges over all circuits.
    pub fn total_edges(&self) -> usize {
        self.circuits.iter().map(Circuit::len).sum()
    }

    pub fn total_length<T: Scalar>(&self, graph: &EpipolarGraph<T>) -> T {
        self.circuits
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weighted_length(graph))
    }

    /// Per edge: is it used by at least one circuit.
    pub fn covered_edges(&self, m: usize) -> Vec<bool> {
        let mut covered = vec![false; m];
        for c in &self.circuits {
            for s in c.steps() {
                covered[s.edge] = true;
            }
        }
        covered
    }

    pub fn to_gf2(&self, m: usize) -> Vec<Gf2Vector> {
        self.circuits.iter().map(|c| c.to_gf2(m)).collect()
    }
}

/// Basis induced by the non-tree edges of a spanning tree.
///
/// Uses the deterministic BFS tree when `tree` is `None`.
pub fn fundamental_cycle_basis<T: Scalar>(
    graph: &EpipolarGraph<T>,
    tree: Option<&[usize]>,
) -> Result<CycleBasis> {
    let tree = match tree {
        Some(t) => {
            let cc = graph.component_count();
            if cc != 1 {
                return Err(Error::Disconnected(cc));
            }
            graph.validate_spanning_tree(t)?;
            t.to_vec()
        }
        None => graph.spanning_tree()?,
    };
    let n = graph.n();
    let mut in_tree = vec![false; graph.m()];
    for &e in &tree {
        in_tree[e] = true;
    }

    // Root the tree at 0: parent pointers and depths.
    let mut adj = vec![Vec::new(); n];
    for &e in &tree {
        let edge = &graph.edges()[e];
        adj[edge.source].push(edge.target);
        adj[edge.target].push(edge.source);
    }
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                depth[w] = depth[v] + 1;
                stack.push(w);
            }
        }
    }

    let mut circuits = Vec::with_capacity(graph.cycle_space_dimension());
    for (id, edge) in graph.edges().iter().enumerate() {
        if in_tree[id] {
            continue;
        }
        // Tree path x → lca → y.
        let (mut a, mut b) = (edge.source, edge.target);
        let mut up = vec![a];
        let mut down = vec![b];
        while a != b {
            if depth[a] >= depth[b] {
                a = parent[a];
                up.push(a);
            } else {
                b = parent[b];
                down.push(b);
            }
        }
        down.pop();
        up.extend(down.into_iter().rev());
        circuits.push(Circuit::new(graph, up)?);
    }
    Ok(CycleBasis {
        circuits,
        kind: BasisKind::Fcb,
        tree: Some(tree),
        stats: CandidateStats::default(),
    })
}

/// A Horton candidate with its length and deduplication key.
#[derive(Debug, Clone)]
pub struct Candidate<T: Scalar> {
    pub circuit: Circuit,
    pub length: T,
    key: Vec<usize>,
}

/// Sorted, deduplicated Horton candidates.
#[derive(Debug, Clone)]
pub struct HortonCandidates<T: Scalar> {
    pub candidates: Vec<Candidate<T>>,
    /// Non-degenerate candidates before deduplication (at most `n·m`).
    pub generated: usize,
}

/// Builds the candidate circuits `C(v, x, y)`.
///
/// Degenerate candidates, where `P(v,x)` and `P(v,y)` meet outside `v`, are
/// skipped. Output is sorted by `(length, sorted edge ids)` with duplicates
/// removed. `weighted` selects edge weights instead of edge counts for
/// both the shortest paths and the lengths.
pub fn horton_candidates<T: Scalar>(
    graph: &EpipolarGraph<T>,
    weighted: bool,
) -> Result<HortonCandidates<T>> {
    if !graph.is_biconnected() {
        return Err(Error::NotBiconnected);
    }
    let per_source: Vec<Vec<Candidate<T>>> = (0..graph.n())
        .into_par_iter()
        .map(|v| {
            let tree = graph.shortest_path_tree(v, weighted)?;
            candidates_from_source(graph, &tree, weighted)
        })
        .collect::<Result<_>>()?;
    let generated = per_source.iter().map(Vec::len).sum();
    let mut candidates: Vec<Candidate<T>> = per_source.into_iter().flatten().collect();
    candidates.par_sort_by(compare_candidates);
    candidates.dedup_by(|a, b| a.key == b.key);
    Ok(HortonCandidates {
        candidates,
        generated,
    })
}

fn compare_candidates<T: Scalar>(a: &Candidate<T>, b: &Candidate<T>) -> Ordering {
    a.length
        .partial_cmp(&b.length)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.key.cmp(&b.key))
}

fn candidates_from_source<T: Scalar>(
    graph: &EpipolarGraph<T>,
    tree: &ShortestPathTree<T>,
    weighted: bool,
) -> Result<Vec<Candidate<T>>> {
    let v = tree.source;
    let n = graph.n();
    // First vertex after v on the tree path to each vertex.
    let mut branch = vec![usize::MAX; n];
    branch[v] = v;
    let mut order: Vec<usize> = (0..n).filter(|&w| tree.reachable(w)).collect();
    order.sort_by_key(|&w| tree.hops[w]);
    for &w in &order {
        if let Some((p, _)) = tree.parent[w] {
            branch[w] = if p == v { w } else { branch[p] };
        }
    }

    let mut out = Vec::new();
    for (id, edge) in graph.edges().iter().enumerate() {
        let (x, y) = edge.endpoints();
        let valid = if x == v {
            tree.parent[y].map(|(_, e)| e) != Some(id)
        } else if y == v {
            tree.parent[x].map(|(_, e)| e) != Some(id)
        } else {
            branch[x] != branch[y]
        };
        if !valid {
            continue;
        }
        let mut vertices = tree.path_to(x);
        let mut back = tree.path_to(y);
        back.reverse();
        back.pop();
        vertices.extend(back);
        let circuit = Circuit::new(graph, vertices)?;
        let length = if weighted {
            circuit.weighted_length(graph)
        } else {
            T::lit(circuit.len() as f64)
        };
        let key = circuit.edge_set();
        out.push(Candidate {
            circuit,
            length,
            key,
        });
    }
    Ok(out)
}

/// Greedy GF(2) selection over candidates already sorted by length.
///
/// Stops after `target` circuits or when the candidates run out.
pub fn select_independent<T: Scalar>(
    candidates: &[Candidate<T>],
    m: usize,
    target: usize,
) -> Vec<Circuit> {
    let mut elim = Gf2Eliminator::new(m);
    let mut chosen = Vec::with_capacity(target);
    for cand in candidates {
        if chosen.len() >= target {
            break;
        }
        if elim.insert(&cand.circuit.to_gf2(m)) {
            chosen.push(cand.circuit.clone());
        }
    }
    chosen
}

/// Horton's minimum cycle basis of a biconnected graph (unit weights).
pub fn minimum_cycle_basis<T: Scalar>(graph: &EpipolarGraph<T>) -> Result<CycleBasis> {
    minimum_cycle_basis_with(graph, false)
}

/// Horton's minimum cycle basis, optionally using edge weights as lengths.
pub fn minimum_cycle_basis_with<T: Scalar>(
    graph: &EpipolarGraph<T>,
    weighted: bool,
) -> Result<CycleBasis> {
    let cands = horton_candidates(graph, weighted)?;
    let circuits = select_independent(&cands.candidates, graph.m(), graph.cycle_space_dimension());
    Ok(CycleBasis {
        circuits,
        kind: BasisKind::Mcb,
        tree: None,
        stats: CandidateStats {
            generated: cands.generated,
            unique: cands.candidates.len(),
            discarded: 0,
        },
    })
}

/// Threshold test for null circuits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullCircuitTest {
    /// Per-edge tolerance `ε` in degrees; the circuit bound is `ε√N`.
    pub epsilon_deg: f64,
    pub metric: RotationMetric,
}

impl Default for NullCircuitTest {
    fn default() -> Self {
        Self {
            epsilon_deg: 2.0,
            metric: RotationMetric::Geodesic,
        }
    }
}

impl NullCircuitTest {
    pub fn new(epsilon_deg: f64) -> Self {
        Self {
            epsilon_deg,
            ..Self::default()
        }
    }

    /// Distance of the composed rotation from the identity, radians.
    pub fn closure_error<T: Scalar>(&self, circuit: &Circuit, graph: &EpipolarGraph<T>) -> T {
        let product = circuit.rotation_product(graph);
        self.metric
            .distance(&product, &crate::geometry::Rotation::identity())
    }

    /// `d(R₁₂ ⋯ R_N1, I) ≤ ε√N`, both sides in radians.
    pub fn accepts<T: Scalar>(&self, circuit: &Circuit, graph: &EpipolarGraph<T>) -> bool {
        let bound = self.epsilon_deg.to_radians() * (circuit.len() as f64).sqrt();
        self.closure_error(circuit, graph).as_f64() <= bound
    }
}

/// Whether `circuit` closes to the identity within `ε√N` (geodesic metric).
pub fn is_null_circuit<T: Scalar>(circuit: &Circuit, graph: &EpipolarGraph<T>, epsilon_deg: f64) -> bool {
    NullCircuitTest::new(epsilon_deg).accepts(circuit, graph)
}

/// Horton's selection restricted to null candidates.
///
/// The result usually has fewer than `m − n + 1` circuits; edges of
/// discarded candidates that never appear in a null circuit end up
/// uncovered.
pub fn null_filtered_mcb<T: Scalar>(graph: &EpipolarGraph<T>, test: &NullCircuitTest) -> Result<CycleBasis> {
    if !(test.epsilon_deg > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "null-circuit threshold must be positive, got {}",
            test.epsilon_deg
        )));
    }
    let cands = horton_candidates(graph, false)?;
    let unique = cands.candidates.len();
    let kept: Vec<Candidate<T>> = cands
        .candidates
        .into_par_iter()
        .filter(|c| test.accepts(&c.circuit, graph))
        .collect();
    let discarded = unique - kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let circuits = select_independent(&kept, graph.m(), graph.cycle_space_dimension());
    Ok(CycleBasis {
        circuits,
        kind: BasisKind::NMcb,
        tree: None,
        stats: CandidateStats {
            generated: cands.generated,
            unique,
            discarded,
        },
    })
}

/// Builds a basis of the requested kind for any graph.
///
/// FCB needs a connected graph. MCB and N-MCB run Horton on every
/// biconnected component with at least three edges and merge the results;
/// bridges stay uncovered.
pub fn compute_basis<T: Scalar>(
    graph: &EpipolarGraph<T>,
    kind: BasisKind,
    test: &NullCircuitTest,
) -> Result<CycleBasis> {
    if kind == BasisKind::Fcb {
        return fundamental_cycle_basis(graph, None);
    }
    if graph.is_biconnected() {
        return match kind {
            BasisKind::Mcb => minimum_cycle_basis(graph),
            _ => null_filtered_mcb(graph, test),
        };
    }
    let report = graph.biconnectivity();
    let mut merged = CycleBasis {
        circuits: Vec::new(),
        kind,
        tree: None,
        stats: CandidateStats::default(),
    };
    for comp in report.components.iter().filter(|c| c.len() >= 3) {
        let sub = graph.edge_subgraph(comp)?;
        let part = match kind {
            BasisKind::Mcb => minimum_cycle_basis(&sub.graph)?,
            _ => match null_filtered_mcb(&sub.graph, test) {
                Ok(b) => b,
                Err(Error::EmptyBasis) => continue,
                Err(e) => return Err(e),
            },
        };
        merged.stats.generated += part.stats.generated;
        merged.stats.unique += part.stats.unique;
        merged.stats.discarded += part.stats.discarded;
        for c in part.circuits {
            let vertices = c.vertices().iter().map(|&v| sub.vertex_map[v]).collect();
            merged.circuits.push(Circuit::new(graph, vertices)?);
        }
    }
    if kind == BasisKind::NMcb && merged.circuits.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(merged)
}
