//! Circuit compatibility constraints and the homogeneous scale system.
//!
//! Walking a circuit `(i₁, …, i_N)` and composing the scaled relative
//! motions must give the identity. Its translation part is
//!
//! ```text
//! Σ_k (R_{i₁i₂} ⋯ R_{i_{k−1}i_k}) t̂_{i_k i_{k+1}} α_{i_k i_{k+1}} = 0,
//! ```
//!
//! three homogeneous equations in the unknown edge scales. Stacking the
//! equations of a cycle basis gives `A α = 0`; the scales are the least
//! right singular vector of `A`.

pub mod eigen;
pub mod sparse;

use crate::cycle_basis::CycleBasis;
use crate::error::{Error, Result};
use crate::geometry::{baseline_versor, Rotation, UnitVector3};
use crate::graph::{Circuit, EpipolarGraph};
use crate::scalar::Scalar;
use eigen::{smallest_singular_pairs, EigenMethod, EigenOptions};
use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
pub use sparse::CsrMatrix;

/// Relative singular-value gap for certifying noise-free systems.
pub const GAP_THRESHOLD_EXACT: f64 = 1e-6;
/// Looser gap for noisy measurements.
pub const GAP_THRESHOLD_NOISY: f64 = 1e-2;

/// The three compatibility rows of one circuit, as `(edge id, coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintBlock<T: Scalar> {
    pub entries: Vec<(usize, Vector3<T>)>,
}

impl<T: Scalar> ConstraintBlock<T> {
    pub fn to_dense(&self, m: usize) -> DMatrix<T> {
        let mut out = DMatrix::zeros(3, m);
        for (e, c) in &self.entries {
            out.fixed_view_mut::<3, 1>(0, *e).copy_from(c);
        }
        out
    }

    /// `Σ coeff_e · α_e` for per-edge scales.
    pub fn apply(&self, scales: &[T]) -> Vector3<T> {
        self.entries
            .iter()
            .fold(Vector3::zeros(), |acc, (e, c)| acc + c * scales[*e])
    }
}

/// Coefficients of `circuit`'s translation closure.
///
/// The rotation prefix is accumulated left to right from the measured
/// labels; an edge walked against its stored orientation contributes
/// `(Rᵀ, −Rᵀ t̂)`.
pub fn circuit_constraint_block<T: Scalar>(
    circuit: &Circuit,
    graph: &EpipolarGraph<T>,
) -> Result<ConstraintBlock<T>> {
    let mut prefix = Rotation::identity();
    let mut entries = Vec::with_capacity(circuit.len());
    for step in circuit.steps() {
        let motion = graph.edge(step.edge)?.motion_along(step.forward);
        entries.push((step.edge, prefix.rotate(motion.direction.as_vector())));
        prefix = prefix * motion.rotation;
    }
    Ok(ConstraintBlock { entries })
}

/// Sparse `3r × m'` system over the edges covered by a basis.
///
/// `m'` is the number of covered edges; uncovered edges (bridges, or edges
/// dropped by the null filter) carry no constraint and get no column.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem<T: Scalar> {
    pub matrix: CsrMatrix<T>,
    /// Column → edge id, ascending.
    pub columns: Vec<usize>,
    /// Edge count of the underlying graph.
    pub edge_count: usize,
    /// Circuit length per 3-row block.
    pub block_lengths: Vec<usize>,
}

impl<T: Scalar> ConstraintSystem<T> {
    #[inline]
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    #[inline]
    pub fn blocks(&self) -> usize {
        self.block_lengths.len()
    }

    pub fn column_of(&self, edge: usize) -> Option<usize> {
        self.columns.binary_search(&edge).ok()
    }

    /// Edge ids without a column.
    pub fn uncovered_edges(&self) -> Vec<usize> {
        (0..self.edge_count)
            .filter(|e| self.column_of(*e).is_none())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        self.matrix.to_dense()
    }

    /// Restricts per-edge values to this system's columns.
    pub fn gather(&self, per_edge: &[T]) -> DVector<T> {
        DVector::from_iterator(self.columns.len(), self.columns.iter().map(|&e| per_edge[e]))
    }

    /// Numerical rank by dense SVD: singular values above `rel_tol · σ_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let s = self.to_dense().singular_values();
        let max = s.iter().fold(T::zero(), |a, &b| a.max(b));
        s.iter().filter(|&&x| x > max * T::lit(rel_tol)).count()
    }
}

fn covered_columns(circuits: &[Circuit], m: usize) -> Vec<usize> {
    let mut covered = vec![false; m];
    for c in circuits {
        for s in c.steps() {
            covered[s.edge] = true;
        }
    }
    (0..m).filter(|&e| covered[e]).collect()
}

fn stack_blocks<T: Scalar>(
    columns: Vec<usize>,
    m: usize,
    blocks: Vec<Vec<(usize, Vector3<T>)>>,
    block_lengths: Vec<usize>,
) -> ConstraintSystem<T> {
    let mut col_of = vec![usize::MAX; m];
    for (k, &e) in columns.iter().enumerate() {
        col_of[e] = k;
    }
    let mut rows = Vec::with_capacity(3 * blocks.len());
    for block in blocks {
        for d in 0..3 {
            rows.push(block.iter().map(|(e, c)| (col_of[*e], c[d])).collect());
        }
    }
    ConstraintSystem {
        matrix: CsrMatrix::from_rows(columns.len(), rows),
        columns,
        edge_count: m,
        block_lengths,
    }
}

/// Stacks the compatibility blocks of every basis circuit.
pub fn assemble<T: Scalar>(basis: &CycleBasis, graph: &EpipolarGraph<T>) -> Result<ConstraintSystem<T>> {
    assemble_circuits(&basis.circuits, graph)
}

pub fn assemble_circuits<T: Scalar>(
    circuits: &[Circuit],
    graph: &EpipolarGraph<T>,
) -> Result<ConstraintSystem<T>> {
    if circuits.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let blocks = circuits
        .par_iter()
        .map(|c| circuit_constraint_block(c, graph).map(|b| b.entries))
        .collect::<Result<Vec<_>>>()?;
    let columns = covered_columns(circuits, graph.m());
    let lengths = circuits.iter().map(Circuit::len).collect();
    Ok(stack_blocks(columns, graph.m(), blocks, lengths))
}

/// Bearing form `(C ⊙ B)`: column `e` of a circuit's block is the signed
/// baseline versor `±b̂_e`, computed from known absolute rotations.
///
/// Same shape and (noise-free) null space as [`assemble`].
pub fn bearing_constraint_matrix<T: Scalar>(
    absolute_rotations: &[Rotation<T>],
    graph: &EpipolarGraph<T>,
    basis: &CycleBasis,
) -> Result<ConstraintSystem<T>> {
    if absolute_rotations.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: absolute_rotations.len(),
        });
    }
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let bearings: Vec<UnitVector3<T>> = graph
        .edges()
        .iter()
        .map(|e| baseline_versor(&absolute_rotations[e.source], &e.motion))
        .collect();
    let blocks = basis
        .circuits
        .iter()
        .map(|c| {
            c.steps()
                .iter()
                .map(|s| {
                    let b = *bearings[s.edge].as_vector();
                    (s.edge, if s.forward { b } else { -b })
                })
                .collect()
        })
        .collect();
    let columns = covered_columns(&basis.circuits, graph.m());
    let lengths = basis.circuits.iter().map(Circuit::len).collect();
    Ok(stack_blocks(columns, graph.m(), blocks, lengths))
}

/// Recovered scales, one per covered edge, with spectral diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSolution<T: Scalar> {
    /// Edge id per entry of `scales`.
    pub edge_ids: Vec<usize>,
    /// Unit-norm null-vector estimate with positive entry sum.
    pub scales: Vec<T>,
    pub sigma_min: T,
    pub sigma_second: T,
    pub sigma_max: T,
    /// `‖A α‖ / ‖α‖`.
    pub residual: T,
    /// Edges whose recovered scale is not positive.
    pub anomalies: Vec<usize>,
    pub method: EigenMethod,
    pub iterations: usize,
}

impl<T: Scalar> ScaleSolution<T> {
    /// Per-edge scales for a graph with `m` edges; `None` where uncovered.
    pub fn per_edge(&self, m: usize) -> Vec<Option<T>> {
        let mut out = vec![None; m];
        for (&e, &s) in self.edge_ids.iter().zip(&self.scales) {
            out[e] = Some(s);
        }
        out
    }

    pub fn scale_of(&self, edge: usize) -> Option<T> {
        self.edge_ids
            .binary_search(&edge)
            .ok()
            .map(|k| self.scales[k])
    }
}

pub fn solve_scales<T: Scalar>(system: &ConstraintSystem<T>) -> Result<ScaleSolution<T>> {
    solve_scales_with(system, &EigenOptions::default())
}

/// Least right singular vector of `A`, sign-fixed so its entries sum
/// positive. Non-positive entries are flagged, never clamped.
pub fn solve_scales_with<T: Scalar>(
    system: &ConstraintSystem<T>,
    opts: &EigenOptions,
) -> Result<ScaleSolution<T>> {
    let spectrum = smallest_singular_pairs(&system.matrix, opts)?;
    let mut v = spectrum.null_vector;
    if v.sum() < T::zero() {
        v = -v;
    }
    let norm = v.norm();
    v /= norm;
    let residual = system.matrix.mul_vec(&v).norm();
    let anomalies = system
        .columns
        .iter()
        .zip(v.iter())
        .filter(|(_, &s)| s <= T::zero())
        .map(|(&e, _)| e)
        .collect();
    Ok(ScaleSolution {
        edge_ids: system.columns.clone(),
        scales: v.iter().copied().collect(),
        sigma_min: spectrum.sigma_min,
        sigma_second: spectrum.sigma_second,
        sigma_max: spectrum.sigma_max,
        residual,
        anomalies,
        method: spectrum.method,
        iterations: spectrum.iterations,
    })
}

/// Numerical-rank verdict on the scale system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankVerdict {
    /// Exactly one relatively negligible singular value.
    Unique,
    /// Two or more.
    Multiple,
    /// None: no exact null vector (least-squares answer only).
    Inconsistent,
}

impl RankVerdict {
    pub fn from_singular_values<T: Scalar>(sigma_min: T, sigma_second: T, sigma_max: T, gap_threshold: f64) -> Self {
        if !(sigma_max > T::zero()) {
            return RankVerdict::Multiple;
        }
        let gap = T::lit(gap_threshold);
        if sigma_second / sigma_max <= gap {
            RankVerdict::Multiple
        } else if sigma_min / sigma_max <= gap {
            RankVerdict::Unique
        } else {
            RankVerdict::Inconsistent
        }
    }
}

/// Necessary combinatorial conditions plus the numerical-rank certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityReport {
    pub n: usize,
    pub m: usize,
    pub biconnected: bool,
    pub articulation_points: Vec<usize>,
    pub bridges: Vec<usize>,
    /// `m ≥ 3n/2 − 2`.
    pub counting_condition: bool,
    pub verdict: RankVerdict,
    /// `σ_min / σ_max`.
    pub null_ratio: f64,
    /// `σ_second / σ_max`.
    pub spectral_gap: f64,
    pub gap_threshold: f64,
    /// Edges that no basis circuit constrains.
    pub uncovered_edges: Vec<usize>,
}

impl SolvabilityReport {
    pub fn from_solution<T: Scalar>(
        graph: &EpipolarGraph<T>,
        system: &ConstraintSystem<T>,
        solution: &ScaleSolution<T>,
        gap_threshold: f64,
    ) -> Self {
        let bic = graph.biconnectivity();
        let max = solution.sigma_max;
        let ratio = |s: T| if max > T::zero() { (s / max).as_f64() } else { 0.0 };
        Self {
            n: graph.n(),
            m: graph.m(),
            biconnected: graph.is_biconnected(),
            articulation_points: bic.articulation_points,
            bridges: bic.bridges,
            counting_condition: graph.satisfies_counting_condition(),
            verdict: RankVerdict::from_singular_values(
                solution.sigma_min,
                solution.sigma_second,
                solution.sigma_max,
                gap_threshold,
            ),
            null_ratio: ratio(solution.sigma_min),
            spectral_gap: ratio(solution.sigma_second),
            gap_threshold,
            uncovered_edges: system.uncovered_edges(),
        }
    }

    /// Unique verdict with every edge constrained.
    pub fn is_uniquely_solvable(&self) -> bool {
        self.verdict == RankVerdict::Unique && self.uncovered_edges.is_empty()
    }
}

pub fn check_solvability<T: Scalar>(
    graph: &EpipolarGraph<T>,
    system: &ConstraintSystem<T>,
    gap_threshold: f64,
) -> Result<SolvabilityReport> {
    let solution = solve_scales(system)?;
    Ok(SolvabilityReport::from_solution(graph, system, &solution, gap_threshold))
}

/// Closed-form ratio `α₁₂ / α₁ᵢ` for a camera triple:
/// `((R₁₂t̂₂ᵢ × t̂₁ᵢ)·(R₁₂t̂₂ᵢ × t̂₁₂)) / ‖R₁₂t̂₂ᵢ × t̂₁₂‖²`.
pub fn zeller_faugeras_ratio<T: Scalar>(
    r12: &Rotation<T>,
    t12: &UnitVector3<T>,
    t1i: &UnitVector3<T>,
    t2i: &UnitVector3<T>,
) -> Result<T> {
    let u = r12.rotate(t2i.as_vector());
    let cross_12 = u.cross(t12.as_vector());
    let denom = cross_12.norm_squared();
    if cross_12.norm() < T::tolerance(1e-10, 64.0) {
        return Err(Error::Degenerate(
            "collinear camera centers: the scale ratio is undetermined".into(),
        ));
    }
    Ok(u.cross(t1i.as_vector()).dot(&cross_12) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle_basis::{fundamental_cycle_basis, minimum_cycle_basis};
    use crate::geometry::{random_rotation, relative_from_absolute, AbsolutePose};
    use crate::graph::tests::five_circuit_graph;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poses_from_centers(centers: &[Vector3<f64>], rng: &mut ChaCha8Rng) -> Vec<AbsolutePose<f64>> {
        centers
            .iter()
            .map(|c| AbsolutePose::from_center(random_rotation(rng), *c))
            .collect()
    }

    fn labelled(
        poses: &[AbsolutePose<f64>],
        pairs: &[(usize, usize)],
    ) -> (EpipolarGraph<f64>, Vec<f64>) {
        let mut edges = Vec::new();
        let mut scales = Vec::new();
        for &(i, j) in pairs {
            let (m, a) = relative_from_absolute(&poses[i], &poses[j]).unwrap();
            edges.push((i, j, m));
            scales.push(a);
        }
        (EpipolarGraph::new(poses.len(), edges).unwrap(), scales)
    }

    fn cycle_pairs(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|k| (k, (k + 1) % n)).collect()
    }

    fn random_centers(k: usize, rng: &mut ChaCha8Rng) -> Vec<Vector3<f64>> {
        use rand::Rng;
        (0..k)
            .map(|_| Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn triangle_block_annihilates_true_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let poses = poses_from_centers(&random_centers(3, &mut rng), &mut rng);
        let (g, scales) = labelled(&poses, &cycle_pairs(3));
        for c in [Circuit::new(&g, vec![0, 1, 2]).unwrap(), Circuit::new(&g, vec![1, 0, 2]).unwrap()] {
            let block = circuit_constraint_block(&c, &g).unwrap();
            assert!(block.apply(&scales).norm() < 1e-10);
            assert_eq!(block.entries.len(), 3);
        }
    }

    #[test]
    fn single_circuit_rank_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rank = |centers: Vec<Vector3<f64>>, rng: &mut ChaCha8Rng| {
            let poses = poses_from_centers(&centers, rng);
            let (g, _) = labelled(&poses, &cycle_pairs(centers.len()));
            let c = Circuit::new(&g, (0..centers.len()).collect()).unwrap();
            let sys = assemble_circuits(&[c], &g).unwrap();
            sys.numerical_rank(1e-8)
        };
        for _ in 0..10 {
            assert_eq!(rank(random_centers(3, &mut rng), &mut rng), 2);
            assert_eq!(rank(random_centers(4, &mut rng), &mut rng), 3);
            let mut planar = random_centers(4, &mut rng);
            for c in &mut planar {
                c.z = 0.3 * c.x - 0.2 * c.y;
            }
            assert_eq!(rank(planar, &mut rng), 2);
            let line: Vec<_> = [0.0, 1.0, 2.5]
                .iter()
                .map(|&s| Vector3::new(1.0, 2.0, -1.0) * s + Vector3::new(0.1, 0.2, 0.3))
                .collect();
            assert_eq!(rank(line, &mut rng), 1);
            assert_eq!(rank(random_centers(6, &mut rng), &mut rng), 3);
        }
    }

    #[test]
    fn assemble_shapes() {
        let g = five_circuit_graph();
        let circuits: Vec<Circuit> = [vec![0, 5, 1], vec![1, 5, 6], vec![1, 6, 2], vec![0, 1, 2, 3, 4]]
            .into_iter()
            .map(|v| Circuit::new(&g, v).unwrap())
            .collect();
        let sys = assemble_circuits(&circuits, &g).unwrap();
        assert_eq!((sys.nrows(), sys.ncols()), (12, 10));
        for (k, c) in circuits.iter().enumerate() {
            for d in 0..3 {
                assert_eq!(sys.matrix.row_nnz(3 * k + d), c.len());
            }
        }
        assert!(sys.uncovered_edges().is_empty());
        assert!(assemble_circuits::<f64>(&[], &g).is_err());
    }

    #[test]
    fn symmetric_triangle_has_equal_scales() {
        let h = 3f64.sqrt() / 2.0;
        let centers = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(-0.5, h, 0.0), Vector3::new(-0.5, -h, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let poses = poses_from_centers(&centers, &mut rng);
        let (g, _) = labelled(&poses, &cycle_pairs(3));
        let basis = fundamental_cycle_basis(&g, None).unwrap();
        let sol = solve_scales(&assemble(&basis, &g).unwrap()).unwrap();
        let expected = 1.0 / 3f64.sqrt();
        for s in &sol.scales {
            assert_relative_eq!(*s, expected, epsilon = 1e-12);
        }
        assert!(sol.anomalies.is_empty());
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn verdicts_from_singular_values() {
        assert_eq!(RankVerdict::from_singular_values(1e-12, 0.3, 1.0, 1e-6), RankVerdict::Unique);
        assert_eq!(RankVerdict::from_singular_values(1e-12, 1e-9, 1.0, 1e-6), RankVerdict::Multiple);
        assert_eq!(RankVerdict::from_singular_values(0.1, 0.3, 1.0, 1e-6), RankVerdict::Inconsistent);
    }

    #[test]
    fn zeller_faugeras_matches_ground_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let poses = poses_from_centers(&random_centers(3, &mut rng), &mut rng);
            let (m12, a12) = relative_from_absolute(&poses[0], &poses[1]).unwrap();
            let (m1i, a1i) = relative_from_absolute(&poses[0], &poses[2]).unwrap();
            let (m2i, _) = relative_from_absolute(&poses[1], &poses[2]).unwrap();
            let r = zeller_faugeras_ratio(&m12.rotation, &m12.direction, &m1i.direction, &m2i.direction).unwrap();
            assert_relative_eq!(r, a12 / a1i, max_relative = 1e-10);
        }
    }

    #[test]
    fn zeller_faugeras_rejects_collinear_centers() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let centers: Vec<_> = [0.0, 1.0, 3.0].iter().map(|&s| Vector3::new(s, 2.0 * s, -s)).collect();
        let poses = poses_from_centers(&centers, &mut rng);
        let (m12, _) = relative_from_absolute(&poses[0], &poses[1]).unwrap();
        let (m1i, _) = relative_from_absolute(&poses[0], &poses[2]).unwrap();
        let (m2i, _) = relative_from_absolute(&poses[1], &poses[2]).unwrap();
        assert!(matches!(
            zeller_faugeras_ratio(&m12.rotation, &m12.direction, &m1i.direction, &m2i.direction),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bearing_rows_add_like_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let poses = poses_from_centers(&random_centers(4, &mut rng), &mut rng);
        let (g, _) = labelled(&poses, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]);
        let rots: Vec<_> = poses.iter().map(|p| p.rotation).collect();
        // (0,1,2) walks 2→0, (0,2,3) walks 0→2: the chord cancels.
        let make = |v: Vec<usize>| Circuit::new(&g, v).unwrap();
        let basis = CycleBasis {
            circuits: vec![make(vec![0, 1, 2]), make(vec![0, 2, 3]), make(vec![0, 1, 2, 3])],
            kind: crate::cycle_basis::BasisKind::Fcb,
            tree: None,
            stats: Default::default(),
        };
        let b = bearing_constraint_matrix(&rots, &g, &basis).unwrap().to_dense();
        let sum = b.rows(0, 3) + b.rows(3, 3);
        assert_eq!(sum, b.rows(6, 3).into_owned());
        assert!(matches!(
            bearing_constraint_matrix(&rots[..2], &g, &basis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bases_agree_noise_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let poses = poses_from_centers(&random_centers(7, &mut rng), &mut rng);
        let topo = five_circuit_graph();
        let pairs: Vec<_> = topo.edges().iter().map(|e| e.endpoints()).collect();
        let (g, truth) = labelled(&poses, &pairs);
        let fcb = solve_scales(&assemble(&fundamental_cycle_basis(&g, None).unwrap(), &g).unwrap()).unwrap();
        let mcb = solve_scales(&assemble(&minimum_cycle_basis(&g).unwrap(), &g).unwrap()).unwrap();
        let norm = truth.iter().map(|x| x * x).sum::<f64>().sqrt();
        for e in 0..g.m() {
            assert_relative_eq!(fcb.scale_of(e).unwrap(), truth[e] / norm, epsilon = 1e-10);
            assert_relative_eq!(mcb.scale_of(e).unwrap(), truth[e] / norm, epsilon = 1e-10);
        }
        let sys = assemble(&minimum_cycle_basis(&g).unwrap(), &g).unwrap();
        let report = check_solvability(&g, &sys, GAP_THRESHOLD_EXACT).unwrap();
        assert_eq!(report.verdict, RankVerdict::Unique);
        assert!(report.biconnected && report.counting_condition);
    }

    #[test]
    fn single_precision_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let poses = poses_from_centers(&random_centers(4, &mut rng), &mut rng);
        let (g, truth) = labelled(&poses, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let edges = g
            .edges()
            .iter()
            .map(|e| (e.source, e.target, e.motion.cast::<f32>()))
            .collect();
        let g32 = EpipolarGraph::<f32>::new(4, edges).unwrap();
        let basis = minimum_cycle_basis(&g32).unwrap();
        let sol = solve_scales(&assemble(&basis, &g32).unwrap()).unwrap();
        let norm = truth.iter().map(|x| x * x).sum::<f64>().sqrt();
        for e in 0..g.m() {
            assert!((sol.scales[e] as f64 - truth[e] / norm).abs() < 1e-4);
        }
    }
}
