//! Synthetic scenes, noise and outlier injection, error metrics and the
//! noise / outlier sweep protocols.
//!
//! Randomness is reproducible: every trial derives its own generator from
//! the master seed, the missing-data level and the trial index. Within a
//! trial the same noise draws are reused for every grid point (scaled by
//! σ, nested outlier sets), so curves along the sweep axis are paired.

use crate::cycle_basis::{compute_basis, fundamental_cycle_basis, BasisKind, CycleBasis, NullCircuitTest};
use crate::error::{Error, Result};
use crate::geometry::{
    perturb_direction, perturb_rotation, random_euler_rotation, random_rotation, random_unit_vector,
    relative_from_absolute, AbsolutePose, RelativeMotion,
};
use crate::graph::{EpipolarGraph, TreeSearch};
use crate::solver::{assemble, solve_scales, RankVerdict, SolvabilityReport, GAP_THRESHOLD_EXACT};
use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ground-truth poses, the noise-free graph and its true scales.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub poses: Vec<AbsolutePose<f64>>,
    pub graph: EpipolarGraph<f64>,
    /// `‖t_ij‖` per edge.
    pub scales: Vec<f64>,
}

impl SyntheticScene {
    /// Labels every pair from the poses, in the given orientation.
    pub fn from_poses(poses: Vec<AbsolutePose<f64>>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut scales = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            for v in [i, j] {
                if v >= poses.len() {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        n: poses.len(),
                    });
                }
            }
            let (m, a) = relative_from_absolute(&poses[i], &poses[j])?;
            edges.push((i, j, m));
            scales.push(a);
        }
        let graph = EpipolarGraph::new(poses.len(), edges)?;
        Ok(Self {
            poses,
            graph,
            scales,
        })
    }

    pub fn rotations(&self) -> Vec<crate::geometry::Rotation<f64>> {
        self.poses.iter().map(|p| p.rotation).collect()
    }
}

/// Random poses: Euler-angle rotations and standard Gaussian translations.
pub fn random_poses<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<AbsolutePose<f64>> {
    (0..n)
        .map(|_| {
            let rotation = random_euler_rotation(rng);
            let mut g = || -> f64 { StandardNormal.sample(rng) };
            let t = Vector3::new(g(), g(), g());
            AbsolutePose::new(rotation, t)
        })
        .collect()
}

/// Biconnected, meets `m ≥ 3n/2 − 2`, and certifies a unique noise-free
/// solution.
pub fn is_solvable_scene(scene: &SyntheticScene) -> bool {
    let g = &scene.graph;
    if !g.is_biconnected() || !g.satisfies_counting_condition() {
        return false;
    }
    let certify = || -> Result<bool> {
        let basis = fundamental_cycle_basis(g, None)?;
        let system = assemble(&basis, g)?;
        let solution = solve_scales(&system)?;
        let report = SolvabilityReport::from_solution(g, &system, &solution, GAP_THRESHOLD_EXACT);
        Ok(report.is_uniquely_solvable())
    };
    certify().unwrap_or(false)
}

pub const SCENE_ATTEMPTS: usize = 500;

/// Drops each pair of the complete graph independently with probability
/// `missing_fraction` and resamples until the scene is solvable.
pub fn generate_scene<R: Rng + ?Sized>(n: usize, missing_fraction: f64, rng: &mut R) -> Result<SyntheticScene> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 cameras, got {n}")));
    }
    if !(0.0..1.0).contains(&missing_fraction) {
        return Err(Error::InvalidParameter(format!(
            "missing fraction must lie in [0, 1), got {missing_fraction}"
        )));
    }
    for _ in 0..SCENE_ATTEMPTS {
        let poses = random_poses(n, rng);
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if missing_fraction == 0.0 || rng.random::<f64>() >= missing_fraction {
                    pairs.push((i, j));
                }
            }
        }
        let Ok(scene) = SyntheticScene::from_poses(poses, &pairs) else {
            continue;
        };
        if is_solvable_scene(&scene) {
            return Ok(scene);
        }
    }
    Err(Error::SceneGeneration(SCENE_ATTEMPTS))
}

/// Measurement corruption settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Standard deviation in degrees for both the spherical angles of the
    /// directions and the tangent-space rotation noise.
    pub sigma_deg: f64,
    /// Fraction of edges replaced by random motions, in `[0, 1)`.
    pub outlier_fraction: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_deg >= 0.0) {
            return Err(Error::NegativeNoise(self.sigma_deg));
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return Err(Error::InvalidParameter(format!(
                "outlier fraction must lie in [0, 1), got {}",
                self.outlier_fraction
            )));
        }
        Ok(())
    }
}

/// Corrupted edge labels plus the hidden outlier ids.
#[derive(Debug, Clone)]
pub struct Observation {
    pub graph: EpipolarGraph<f64>,
    /// Ascending edge ids that were replaced.
    pub outliers: Vec<usize>,
}

/// Perturbs every label, then replaces `⌊fraction·m⌋` uniformly chosen
/// edges by a Haar-random rotation and a uniform direction.
///
/// The draws do not depend on σ or on the outlier count, so one seed gives
/// noise that scales with σ and outlier sets that are nested.
pub fn corrupt(scene: &SyntheticScene, model: &NoiseModel) -> Result<Observation> {
    model.validate()?;
    let g = &scene.graph;
    let m = g.m();
    let mut noise_rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut outlier_rng = ChaCha8Rng::seed_from_u64(model.seed);
    outlier_rng.set_stream(1);

    let mut motions = g
        .edges()
        .iter()
        .map(|e| {
            let rotation = perturb_rotation(&e.motion.rotation, model.sigma_deg, &mut noise_rng)?;
            let direction = perturb_direction(&e.motion.direction, model.sigma_deg, &mut noise_rng)?;
            Ok(RelativeMotion::new(rotation, direction))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut outlier_rng);
    let count = (model.outlier_fraction * m as f64).floor() as usize;
    let mut outliers = Vec::with_capacity(count);
    for (k, &e) in order.iter().enumerate() {
        let replacement = RelativeMotion::new(random_rotation(&mut outlier_rng), random_unit_vector(&mut outlier_rng));
        if k < count {
            motions[e] = replacement;
            outliers.push(e);
        }
    }
    outliers.sort_unstable();
    Ok(Observation {
        graph: g.with_motions(motions)?,
        outliers,
    })
}

/// `mean |α − s α̃| / mean α` with `s` the least-squares scale.
pub fn relative_mean_error(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("empty scale vectors".into()));
    }
    let ee: f64 = estimate.iter().map(|x| x * x).sum();
    if !(ee > 0.0) {
        return Err(Error::ZeroVector);
    }
    let s = truth.iter().zip(estimate).map(|(a, b)| a * b).sum::<f64>() / ee;
    let residual: f64 = truth.iter().zip(estimate).map(|(a, b)| (a - s * b).abs()).sum();
    let total: f64 = truth.iter().sum();
    Ok(residual / total)
}

/// Fraction of true outliers still used by some basis circuit.
pub fn misclassification_rate(outliers: &[usize], basis: &CycleBasis, m: usize) -> f64 {
    if outliers.is_empty() {
        return 0.0;
    }
    let covered = basis.covered_edges(m);
    outliers.iter().filter(|&&e| covered[e]).count() as f64 / outliers.len() as f64
}

/// Solves `graph` with a basis and scores the covered edges against `truth`.
pub fn evaluate_basis(graph: &EpipolarGraph<f64>, basis: &CycleBasis, truth: &[f64]) -> Result<(f64, RankVerdict)> {
    let system = assemble(basis, graph)?;
    let solution = solve_scales(&system)?;
    let report = SolvabilityReport::from_solution(graph, &system, &solution, crate::solver::GAP_THRESHOLD_NOISY);
    let gathered: Vec<f64> = solution.edge_ids.iter().map(|&e| truth[e]).collect();
    Ok((relative_mean_error(&gathered, &solution.scales)?, report.verdict))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Error against noise level σ, no outliers.
    NoiseSweep,
    /// Error against outlier fraction at fixed σ.
    OutlierSweep,
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise" | "noise-sweep" => Ok(Protocol::NoiseSweep),
            "outlier" | "outliers" | "outlier-sweep" => Ok(Protocol::OutlierSweep),
            other => Err(Error::InvalidParameter(format!("unknown protocol {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub protocol: Protocol,
    pub n: usize,
    pub missing_levels: Vec<f64>,
    pub sigmas_deg: Vec<f64>,
    pub outlier_fractions: Vec<f64>,
    pub trials: usize,
    /// Random spanning trees averaged per FCB trial.
    pub fcb_trees: usize,
    /// Traversal used for those random trees.
    pub tree_search: TreeSearch,
    pub methods: Vec<BasisKind>,
    /// Null-circuit threshold for N-MCB, degrees.
    pub epsilon_deg: f64,
    pub seed: u64,
}

impl BenchConfig {
    /// Error vs σ ∈ {0.5°, …, 5°} for FCB and MCB.
    pub fn noise_sweep() -> Self {
        Self {
            protocol: Protocol::NoiseSweep,
            n: 100,
            missing_levels: vec![0.5, 0.75, 0.9],
            sigmas_deg: (1..=10).map(|k| 0.5 * k as f64).collect(),
            outlier_fractions: vec![0.0],
            trials: 10,
            fcb_trees: 10,
            tree_search: TreeSearch::Uniform,
            methods: vec![BasisKind::Fcb, BasisKind::Mcb],
            epsilon_deg: 2.0,
            seed: 0,
        }
    }

    /// Error vs outlier fraction 5%–50% at σ = 3° for MCB and N-MCB.
    pub fn outlier_sweep() -> Self {
        Self {
            protocol: Protocol::OutlierSweep,
            sigmas_deg: vec![3.0],
            outlier_fractions: (1..=10).map(|k| 0.05 * k as f64).collect(),
            methods: vec![BasisKind::Mcb, BasisKind::NMcb],
            epsilon_deg: 4.0,
            ..Self::noise_sweep()
        }
    }

    pub fn default_for(protocol: Protocol) -> Self {
        match protocol {
            Protocol::NoiseSweep => Self::noise_sweep(),
            Protocol::OutlierSweep => Self::outlier_sweep(),
        }
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        match self.protocol {
            Protocol::NoiseSweep => self.sigmas_deg.iter().map(|&s| (s, 0.0)).collect(),
            Protocol::OutlierSweep => {
                let sigma = self.sigmas_deg.first().copied().unwrap_or(3.0);
                self.outlier_fractions.iter().map(|&f| (sigma, f)).collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.trials == 0 || self.methods.is_empty() || self.missing_levels.is_empty() {
            return Err(Error::InvalidParameter(
                "bench needs n ≥ 4, at least one trial, method and missing level".into(),
            ));
        }
        if self.methods.contains(&BasisKind::Fcb) && self.fcb_trees == 0 {
            return Err(Error::InvalidParameter("fcb_trees must be positive".into()));
        }
        if self.grid().is_empty() {
            return Err(Error::InvalidParameter("empty sweep grid".into()));
        }
        Ok(())
    }
}

/// One (grid point, method, trial) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub missing: f64,
    pub sigma_deg: f64,
    pub outlier_fraction: f64,
    pub method: BasisKind,
    pub trial: usize,
    pub n: usize,
    pub m: usize,
    pub relative_error: Option<f64>,
    pub misclassification: Option<f64>,
    pub basis_size: Option<usize>,
    pub verdict: Option<RankVerdict>,
    pub failure: Option<String>,
}

/// Mean over the trials of one (grid point, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub missing: f64,
    pub sigma_deg: f64,
    pub outlier_fraction: f64,
    pub method: BasisKind,
    pub mean_error: Option<f64>,
    pub mean_misclassification: Option<f64>,
    pub trials_ok: usize,
    pub trials_failed: usize,
}

/// x/y data for one curve of the sweep plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub method: BasisKind,
    pub missing: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<TrialRecord>,
}

impl BenchReport {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        for row in &self.rows {
            let idx = out.iter().position(|s| {
                s.missing == row.missing
                    && s.sigma_deg == row.sigma_deg
                    && s.outlier_fraction == row.outlier_fraction
                    && s.method == row.method
            });
            let idx = idx.unwrap_or_else(|| {
                out.push(SummaryRow {
                    missing: row.missing,
                    sigma_deg: row.sigma_deg,
                    outlier_fraction: row.outlier_fraction,
                    method: row.method,
                    mean_error: None,
                    mean_misclassification: None,
                    trials_ok: 0,
                    trials_failed: 0,
                });
                out.len() - 1
            });
            let s = &mut out[idx];
            match row.relative_error {
                Some(e) => {
                    s.trials_ok += 1;
                    s.mean_error = Some(s.mean_error.unwrap_or(0.0) + e);
                    if let Some(mc) = row.misclassification {
                        s.mean_misclassification = Some(s.mean_misclassification.unwrap_or(0.0) + mc);
                    }
                }
                None => s.trials_failed += 1,
            }
        }
        for s in &mut out {
            let k = s.trials_ok as f64;
            s.mean_error = s.mean_error.map(|e| e / k);
            s.mean_misclassification = s.mean_misclassification.map(|e| e / k);
        }
        out
    }

    /// Mean error of one grid point and method.
    pub fn mean_error(&self, missing: f64, sigma_deg: f64, outlier_fraction: f64, method: BasisKind) -> Option<f64> {
        self.summary()
            .into_iter()
            .find(|s| {
                s.missing == missing
                    && s.sigma_deg == sigma_deg
                    && s.outlier_fraction == outlier_fraction
                    && s.method == method
            })
            .and_then(|s| s.mean_error)
    }

    /// One curve per (method, missing level) along the sweep axis.
    pub fn plot_series(&self) -> Vec<PlotSeries> {
        let mut series: Vec<PlotSeries> = Vec::new();
        for s in self.summary() {
            let x = match self.config.protocol {
                Protocol::NoiseSweep => s.sigma_deg,
                Protocol::OutlierSweep => s.outlier_fraction,
            };
            let Some(y) = s.mean_error else { continue };
            match series.iter_mut().find(|p| p.method == s.method && p.missing == s.missing) {
                Some(p) => {
                    p.x.push(x);
                    p.y.push(y);
                }
                None => series.push(PlotSeries {
                    method: s.method,
                    missing: s.missing,
                    x: vec![x],
                    y: vec![y],
                }),
            }
        }
        series
    }
}

/// SplitMix64 finalizer over a sequence of words.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

const PURPOSE_SCENE: u64 = 1;
const PURPOSE_NOISE: u64 = 2;
const PURPOSE_TREES: u64 = 3;

/// Runs the sweep; trials execute in parallel and failures are recorded
/// per row instead of aborting.
pub fn run_experiment(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.missing_levels.len())
        .flat_map(|l| (0..config.trials).map(move |t| (l, t)))
        .collect();
    let rows: Vec<Vec<TrialRecord>> = jobs
        .par_iter()
        .map(|&(level, trial)| run_trial(config, level, trial))
        .collect();
    let mut rows: Vec<TrialRecord> = rows.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.missing
            .total_cmp(&b.missing)
            .then(a.sigma_deg.total_cmp(&b.sigma_deg))
            .then(a.outlier_fraction.total_cmp(&b.outlier_fraction))
            .then(config.methods.iter().position(|m| *m == a.method).cmp(&config.methods.iter().position(|m| *m == b.method)))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(BenchReport {
        config: config.clone(),
        rows,
    })
}

fn run_trial(config: &BenchConfig, level: usize, trial: usize) -> Vec<TrialRecord> {
    let missing = config.missing_levels[level];
    let ids = [level as u64, trial as u64];
    let mut scene_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[ids[0], ids[1], PURPOSE_SCENE]));
    let noise_seed = derive_seed(config.seed, &[ids[0], ids[1], PURPOSE_NOISE]);
    let trees_seed = derive_seed(config.seed, &[ids[0], ids[1], PURPOSE_TREES]);
    let grid = config.grid();

    let blank = |sigma: f64, outliers: f64, method: BasisKind| TrialRecord {
        missing,
        sigma_deg: sigma,
        outlier_fraction: outliers,
        method,
        trial,
        n: config.n,
        m: 0,
        relative_error: None,
        misclassification: None,
        basis_size: None,
        verdict: None,
        failure: None,
    };

    let scene = match generate_scene(config.n, missing, &mut scene_rng) {
        Ok(s) => s,
        Err(e) => {
            return grid
                .iter()
                .flat_map(|&(s, f)| config.methods.iter().map(move |&k| (s, f, k)))
                .map(|(s, f, k)| TrialRecord {
                    failure: Some(e.to_string()),
                    ..blank(s, f, k)
                })
                .collect();
        }
    };

    let mut out = Vec::new();
    for &(sigma, outliers) in &grid {
        let model = NoiseModel {
            sigma_deg: sigma,
            outlier_fraction: outliers,
            seed: noise_seed,
        };
        let obs = corrupt(&scene, &model);
        for &method in &config.methods {
            let mut rec = TrialRecord {
                m: scene.graph.m(),
                ..blank(sigma, outliers, method)
            };
            let result = obs
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|obs| evaluate_method(config, obs, &scene, method, trees_seed));
            match result {
                Ok((error, mis, size, verdict)) => {
                    rec.relative_error = Some(error);
                    rec.misclassification = mis;
                    rec.basis_size = Some(size);
                    rec.verdict = Some(verdict);
                }
                Err(e) => rec.failure = Some(e.to_string()),
            }
            out.push(rec);
        }
    }
    out
}

fn evaluate_method(
    config: &BenchConfig,
    obs: &Observation,
    scene: &SyntheticScene,
    method: BasisKind,
    trees_seed: u64,
) -> Result<(f64, Option<f64>, usize, RankVerdict)> {
    let g = &obs.graph;
    match method {
        BasisKind::Fcb => {
            let mut rng = ChaCha8Rng::seed_from_u64(trees_seed);
            let mut total = 0.0;
            let mut verdict = RankVerdict::Unique;
            let mut size = 0;
            for _ in 0..config.fcb_trees {
                let tree = g.random_spanning_tree_with(config.tree_search, &mut rng)?;
                let basis = fundamental_cycle_basis(g, Some(&tree))?;
                let (e, v) = evaluate_basis(g, &basis, &scene.scales)?;
                total += e;
                size = basis.len();
                if v != RankVerdict::Unique {
                    verdict = v;
                }
            }
            Ok((total / config.fcb_trees as f64, None, size, verdict))
        }
        BasisKind::Mcb | BasisKind::NMcb => {
            let test = NullCircuitTest::new(config.epsilon_deg);
            let basis = compute_basis(g, method, &test)?;
            let (e, v) = evaluate_basis(g, &basis, &scene.scales)?;
            let mis = (method == BasisKind::NMcb).then(|| misclassification_rate(&obs.outliers, &basis, g.m()));
            Ok((e, mis, basis.len(), v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle_basis::minimum_cycle_basis;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn relative_mean_error_hand_values() {
        assert_eq!(relative_mean_error(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        let e = relative_mean_error(&[1.0, 2.0, 3.0], &[7.0, 14.0, 21.0]).unwrap();
        assert!(e < 1e-15);
        // s = (1·1 + 1·0)/(1) = 1 → residuals (0, 1), mean 0.5 / mean 1.
        assert!((relative_mean_error(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        // truth (2, 4), estimate (1, 1): s = 3, residuals (1, 1), mean 1 / mean 3.
        assert!((relative_mean_error(&[2.0, 4.0], &[1.0, 1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // truth (1, 2, 3), estimate (1, 1, 1): s = 2, residuals (1, 0, 1) → (2/3)/2.
        assert!((relative_mean_error(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(relative_mean_error(&[1.0], &[0.0]), Err(Error::ZeroVector));
        assert!(relative_mean_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn scene_generation() {
        let mut r = rng(1);
        let scene = generate_scene(4, 0.0, &mut r).unwrap();
        assert_eq!(scene.graph.m(), 6);
        assert!(scene.graph.satisfies_counting_condition());
        assert!(scene.scales.iter().all(|&s| s > 0.0));
        let scene = generate_scene(12, 0.5, &mut r).unwrap();
        assert!(is_solvable_scene(&scene));
        assert!(generate_scene(3, 0.0, &mut r).is_err());
        assert!(generate_scene(10, 1.0, &mut r).is_err());
    }

    #[test]
    fn corrupt_counts_and_reproducibility() {
        let scene = generate_scene(15, 0.2, &mut rng(2)).unwrap();
        let clean = corrupt(&scene, &NoiseModel { sigma_deg: 0.0, outlier_fraction: 0.0, seed: 5 }).unwrap();
        for (a, b) in clean.graph.edges().iter().zip(scene.graph.edges()) {
            assert_eq!(a.motion, b.motion);
        }
        let model = NoiseModel { sigma_deg: 3.0, outlier_fraction: 0.2, seed: 9 };
        let a = corrupt(&scene, &model).unwrap();
        let b = corrupt(&scene, &model).unwrap();
        assert_eq!(a.outliers, b.outliers);
        assert_eq!(a.outliers.len(), (0.2 * scene.graph.m() as f64).floor() as usize);
        for (x, y) in a.graph.edges().iter().zip(b.graph.edges()) {
            assert_eq!(x.motion, y.motion);
        }
        // Outlier sets are nested across fractions.
        let c = corrupt(&scene, &NoiseModel { outlier_fraction: 0.4, ..model }).unwrap();
        assert!(a.outliers.iter().all(|e| c.outliers.contains(e)));
        assert!(corrupt(&scene, &NoiseModel { outlier_fraction: 1.0, ..model }).is_err());
    }

    #[test]
    fn exactly_twenty_outliers_of_a_hundred_edges() {
        let poses = random_poses(20, &mut rng(3));
        let mut pairs = Vec::new();
        'outer: for i in 0..20 {
            for j in i + 1..20 {
                if pairs.len() == 100 {
                    break 'outer;
                }
                pairs.push((i, j));
            }
        }
        let scene = SyntheticScene::from_poses(poses, &pairs).unwrap();
        let obs = corrupt(&scene, &NoiseModel { sigma_deg: 0.0, outlier_fraction: 0.2, seed: 1 }).unwrap();
        assert_eq!(obs.outliers.len(), 20);
    }

    #[test]
    fn direction_noise_scale() {
        let scene = generate_scene(30, 0.0, &mut rng(4)).unwrap();
        let obs = corrupt(&scene, &NoiseModel { sigma_deg: 3.0, outlier_fraction: 0.0, seed: 2 }).unwrap();
        let mean: f64 = scene
            .graph
            .edges()
            .iter()
            .zip(obs.graph.edges())
            .map(|(a, b)| a.motion.direction.angle_to(&b.motion.direction))
            .sum::<f64>()
            / scene.graph.m() as f64;
        // Off the equator the azimuth term shrinks by sin(polar); the mean
        // deviation lies between σ√(π/2)·(π/4) and σ√(π/2).
        let s = 3f64.to_radians();
        assert!(mean > 0.5 * s && mean < 1.2 * s * (std::f64::consts::PI / 2.0).sqrt(), "{mean}");
    }

    #[test]
    fn misclassification_cases() {
        let scene = generate_scene(8, 0.0, &mut rng(6)).unwrap();
        let basis = minimum_cycle_basis(&scene.graph).unwrap();
        assert_eq!(misclassification_rate(&[], &basis, scene.graph.m()), 0.0);
        assert_eq!(misclassification_rate(&[0, 1], &basis, scene.graph.m()), 1.0);
        let empty = CycleBasis { circuits: vec![], ..basis };
        assert_eq!(misclassification_rate(&[0, 1], &empty, scene.graph.m()), 0.0);
    }

    #[test]
    fn zero_noise_bench_recovers_exactly() {
        let config = BenchConfig {
            n: 12,
            missing_levels: vec![0.3],
            sigmas_deg: vec![0.0],
            trials: 2,
            fcb_trees: 3,
            methods: vec![BasisKind::Fcb, BasisKind::Mcb, BasisKind::NMcb],
            ..BenchConfig::noise_sweep()
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.rows.len(), 6);
        for row in &report.rows {
            assert!(row.relative_error.unwrap() < 1e-8, "{row:?}");
        }
        let series = report.plot_series();
        assert_eq!(series.len(), 3);
        let again = run_experiment(&config).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, &[0, 1]), derive_seed(0, &[1, 0]));
        assert_eq!(derive_seed(3, &[4]), derive_seed(3, &[4]));
    }
}
