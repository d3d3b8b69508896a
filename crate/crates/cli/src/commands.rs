use crate::error::{CliError, CliResult};
use crate::io::{parse_pose_list, pose_record, write_json, GraphFile, GroundTruth, LoadReport};
use crate::{BasisArgs, BasisOpts, BenchArgs, CheckArgs, SolveArgs, Status, SynthArgs};
use episcale::solver::eigen::EigenMethod;
use episcale::synth::{
    corrupt, derive_seed, generate_scene, relative_mean_error, run_experiment, BenchConfig, NoiseModel, PlotSeries,
    Protocol, SummaryRow, SyntheticScene,
};
use episcale::{
    assemble, compute_basis, solve_scales, BasisKind, CycleBasis, EpipolarGraph, NullCircuitTest, RankVerdict,
    SolvabilityReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Largest system for which `check --rank` computes the full numerical rank.
const FULL_RANK_LIMIT: usize = 400;

fn emit<S: Serialize>(value: &S, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
            writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn say(out: &mut dyn Write, text: &str) -> CliResult<()> {
    writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn load(path: &Path) -> CliResult<(GraphFile, EpipolarGraph, LoadReport)> {
    let file = GraphFile::read(path)?;
    let (graph, report) = file.to_graph()?;
    Ok((file, graph, report))
}

fn validate_opts(opts: &BasisOpts) -> CliResult<NullCircuitTest> {
    if !(opts.epsilon > 0.0) || !opts.epsilon.is_finite() {
        return Err(CliError::Invalid(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    Ok(NullCircuitTest::new(opts.epsilon))
}

fn validate_gap(gap: f64) -> CliResult<()> {
    if !(gap > 0.0 && gap < 1.0) {
        return Err(CliError::Invalid(format!("gap threshold must lie in (0, 1), got {gap}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisStats {
    pub kind: BasisKind,
    pub circuits: usize,
    pub total_length: f64,
    pub candidates_generated: usize,
    pub candidates_unique: usize,
    /// Candidates rejected by the null-circuit test.
    pub candidates_discarded: usize,
}

impl BasisStats {
    pub fn new(basis: &CycleBasis, graph: &EpipolarGraph) -> Self {
        Self {
            kind: basis.kind,
            circuits: basis.len(),
            total_length: basis.total_length(graph),
            candidates_generated: basis.stats.generated,
            candidates_unique: basis.stats.unique,
            candidates_discarded: basis.stats.discarded,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutput {
    /// Per edge, in file order; `null` for edges no circuit constrains.
    pub scales: Vec<Option<f64>>,
    pub diagnostics: SolvabilityReport,
    /// `‖A α‖` at the returned unit vector.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_second: f64,
    pub sigma_max: f64,
    pub eigen_method: EigenMethod,
    /// Edges whose scale came out non-positive.
    pub anomalies: Vec<usize>,
    pub basis_stats: BasisStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_mean_error: Option<f64>,
    pub projected_rotations: Vec<usize>,
    pub renormalized_directions: Vec<usize>,
}

/// Runs the two-step method on a loaded graph.
pub fn solve_graph(
    graph: &EpipolarGraph,
    opts: &BasisOpts,
    gap: f64,
    truth: Option<&[f64]>,
) -> CliResult<SolveOutput> {
    let test = validate_opts(opts)?;
    validate_gap(gap)?;
    let basis = compute_basis(graph, opts.basis, &test)?;
    let system = assemble(&basis, graph)?;
    let solution = solve_scales(&system)?;
    let diagnostics = SolvabilityReport::from_solution(graph, &system, &solution, gap);
    let relative_mean_error = match truth {
        Some(t) => {
            let gathered: Vec<f64> = solution.edge_ids.iter().map(|&e| t[e]).collect();
            Some(relative_mean_error(&gathered, &solution.scales)?)
        }
        None => None,
    };
    Ok(SolveOutput {
        scales: solution.per_edge(graph.m()),
        diagnostics,
        residual: solution.residual,
        sigma_min: solution.sigma_min,
        sigma_second: solution.sigma_second,
        sigma_max: solution.sigma_max,
        eigen_method: solution.method,
        anomalies: solution.anomalies.clone(),
        basis_stats: BasisStats::new(&basis, graph),
        relative_mean_error,
        projected_rotations: Vec::new(),
        renormalized_directions: Vec::new(),
    })
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> CliResult<Status> {
    let (file, graph, load) = load(&args.input)?;
    let truth = file.truth_scales()?;
    let mut result = solve_graph(&graph, &args.basis, args.gap_threshold, truth.as_deref())?;
    result.projected_rotations = load.projected_rotations;
    result.renormalized_directions = load.renormalized_directions;
    emit(&result, args.output.as_deref(), out)?;
    let verdict = result.diagnostics.verdict;
    if verdict != RankVerdict::Unique {
        log::warn!("verdict {verdict:?}: the scales are not uniquely determined by the data");
    }
    if !result.diagnostics.uncovered_edges.is_empty() {
        log::warn!("{} edges are not constrained by any circuit", result.diagnostics.uncovered_edges.len());
    }
    Ok(if verdict == RankVerdict::Unique { Status::Ok } else { Status::Ambiguous })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCertificate {
    pub basis: BasisKind,
    pub rows: usize,
    pub columns: usize,
    /// Full numerical rank; only computed for small systems.
    pub numerical_rank: Option<usize>,
    pub verdict: RankVerdict,
    pub null_ratio: f64,
    pub spectral_gap: f64,
    pub gap_threshold: f64,
    pub uncovered_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub cycle_space_dimension: usize,
    pub biconnected: bool,
    pub articulation_points: Vec<usize>,
    /// Bridge edges as vertex pairs.
    pub bridges: Vec<(usize, usize)>,
    pub counting_condition: bool,
    /// `⌈3n/2⌉ − 2`.
    pub required_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankCertificate>,
    /// Why the rank certificate could not be computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_error: Option<String>,
}

/// Smallest edge count allowed by the counting condition.
pub fn required_edges(n: usize) -> usize {
    (3 * n).div_ceil(2).saturating_sub(2)
}

impl CheckReport {
    pub fn new(graph: &EpipolarGraph, rank: Option<(&BasisOpts, f64)>) -> CliResult<Self> {
        let bic = graph.biconnectivity();
        let bridges = bic
            .bridges
            .iter()
            .map(|&e| graph.edge(e).map(|edge| edge.endpoints()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut report = Self {
            n: graph.n(),
            m: graph.m(),
            components: graph.component_count(),
            cycle_space_dimension: graph.cycle_space_dimension(),
            biconnected: graph.is_biconnected(),
            articulation_points: bic.articulation_points,
            bridges,
            counting_condition: graph.satisfies_counting_condition(),
            required_edges: required_edges(graph.n()),
            rank: None,
            rank_error: None,
        };
        if let Some((opts, gap)) = rank {
            validate_gap(gap)?;
            let test = validate_opts(opts)?;
            let certify = || -> episcale::Result<RankCertificate> {
                let basis = compute_basis(graph, opts.basis, &test)?;
                let system = assemble(&basis, graph)?;
                let solution = solve_scales(&system)?;
                let sr = SolvabilityReport::from_solution(graph, &system, &solution, gap);
                Ok(RankCertificate {
                    basis: opts.basis,
                    rows: system.nrows(),
                    columns: system.ncols(),
                    numerical_rank: (system.ncols() <= FULL_RANK_LIMIT).then(|| system.numerical_rank(gap)),
                    verdict: sr.verdict,
                    null_ratio: sr.null_ratio,
                    spectral_gap: sr.spectral_gap,
                    gap_threshold: gap,
                    uncovered_edges: sr.uncovered_edges,
                })
            };
            match certify() {
                Ok(c) => report.rank = Some(c),
                Err(e) => report.rank_error = Some(e.to_string()),
            }
        }
        Ok(report)
    }

    /// All necessary conditions hold (and the rank certificate, if
    /// requested, shows a unique solution on every edge).
    pub fn passed(&self) -> bool {
        let combinatorial = self.components == 1 && self.biconnected && self.counting_condition;
        let rank_ok = match (&self.rank, &self.rank_error) {
            (_, Some(_)) => false,
            (Some(r), None) => r.verdict == RankVerdict::Unique && r.uncovered_edges.is_empty(),
            (None, None) => true,
        };
        combinatorial && rank_ok
    }

    pub fn render(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let list = |v: &[usize]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            }
        };
        let mut s = format!("cameras: {}\nedges: {}\ncomponents: {}\n", self.n, self.m, self.components);
        s += &format!("cycle space dimension: {}\n", self.cycle_space_dimension);
        s += &format!("biconnected: {}\n", yes(self.biconnected));
        s += &format!("articulation points: {}\n", list(&self.articulation_points));
        let bridges: Vec<String> = self.bridges.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        s += &format!(
            "bridges: {}\n",
            if bridges.is_empty() { "none".into() } else { bridges.join(", ") }
        );
        s += &format!(
            "counting condition (m >= {}): {}\n",
            self.required_edges,
            yes(self.counting_condition)
        );
        if let Some(r) = &self.rank {
            s += &format!("rank basis: {} ({} x {})\n", r.basis, r.rows, r.columns);
            if let Some(k) = r.numerical_rank {
                s += &format!("numerical rank: {k}\n");
            }
            s += &format!(
                "sigma_min/sigma_max: {:.3e}\nsigma_2/sigma_max: {:.3e}\nverdict: {:?}\n",
                r.null_ratio, r.spectral_gap, r.verdict
            );
            if !r.uncovered_edges.is_empty() {
                s += &format!("unconstrained edges: {}\n", list(&r.uncovered_edges));
            }
        }
        if let Some(e) = &self.rank_error {
            s += &format!("rank certificate unavailable: {e}\n");
        }
        s += &format!("result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

pub fn check(args: &CheckArgs, out: &mut dyn Write) -> CliResult<Status> {
    let (_, graph, _) = load(&args.input)?;
    let report = CheckReport::new(&graph, args.rank.then_some((&args.basis, args.gap_threshold)))?;
    say(out, &report.render())?;
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(if report.passed() { Status::Ok } else { Status::Ambiguous })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisOutput {
    /// Closed vertex sequences (the closing edge is implicit).
    pub circuits: Vec<Vec<usize>>,
    pub stats: BasisStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<usize>>,
}

pub fn basis_output(graph: &EpipolarGraph, opts: &BasisOpts) -> CliResult<BasisOutput> {
    let test = validate_opts(opts)?;
    let basis = compute_basis(graph, opts.basis, &test)?;
    Ok(BasisOutput {
        circuits: basis.circuits.iter().map(|c| c.vertices().to_vec()).collect(),
        stats: BasisStats::new(&basis, graph),
        tree: basis.tree.clone(),
    })
}

pub fn basis(args: &BasisArgs, out: &mut dyn Write) -> CliResult<Status> {
    let (_, graph, _) = load(&args.input)?;
    emit(&basis_output(&graph, &args.basis)?, args.output.as_deref(), out)?;
    Ok(Status::Ok)
}

/// The graph file `synth` writes: corrupted labels plus ground truth.
pub fn synth_file(args: &SynthArgs) -> CliResult<GraphFile> {
    if !(0.0..1.0).contains(&args.missing) {
        return Err(CliError::Invalid(format!("missing must lie in [0, 1), got {}", args.missing)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(args.seed, &[0]));
    let scene = match &args.poses {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let poses = parse_pose_list(&text)?;
            let n = poses.len();
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| args.missing == 0.0 || rng.random::<f64>() >= args.missing)
                .collect();
            SyntheticScene::from_poses(poses, &pairs)?
        }
        None => generate_scene(args.n, args.missing, &mut rng)?,
    };
    let model = NoiseModel {
        sigma_deg: args.sigma,
        outlier_fraction: args.outliers,
        seed: derive_seed(args.seed, &[1]),
    };
    let obs = corrupt(&scene, &model)?;
    let mut file = GraphFile::from_graph(&obs.graph);
    file.ground_truth = Some(GroundTruth {
        poses: Some(scene.poses.iter().map(pose_record).collect()),
        scales: Some(scene.scales.clone()),
        outliers: Some(obs.outliers),
    });
    Ok(file)
}

pub fn synth(args: &SynthArgs, out: &mut dyn Write) -> CliResult<Status> {
    let file = synth_file(args)?;
    file.write(&args.output)?;
    say(
        out,
        &format!("wrote {} cameras, {} edges to {}", file.n, file.edges.len(), args.output.display()),
    )?;
    Ok(Status::Ok)
}

pub fn bench_config(args: &BenchArgs) -> BenchConfig {
    let mut config = BenchConfig::default_for(args.protocol);
    if let Some(n) = args.n {
        config.n = n;
    }
    if !args.missing.is_empty() {
        config.missing_levels = args.missing.clone();
    }
    if !args.sigma.is_empty() {
        config.sigmas_deg = args.sigma.clone();
    }
    if !args.outliers.is_empty() {
        config.outlier_fractions = args.outliers.clone();
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(t) = args.fcb_trees {
        config.fcb_trees = t;
    }
    if let Some(t) = args.tree_search {
        config.tree_search = t;
    }
    if !args.basis.is_empty() {
        config.methods = args.basis.clone();
    }
    if let Some(e) = args.epsilon {
        config.epsilon_deg = e;
    }
    config.seed = args.seed;
    config
}

#[derive(Debug, Serialize)]
struct SummaryFile<'a> {
    config: &'a BenchConfig,
    summary: &'a [SummaryRow],
}

#[derive(Debug, Serialize)]
struct PlotFile<'a> {
    x_label: &'a str,
    y_label: &'a str,
    series: &'a [PlotSeries],
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<Status> {
    let config = bench_config(args);
    let report = run_experiment(&config)?;
    std::fs::create_dir_all(&args.output).map_err(|e| CliError::io(&args.output, e))?;

    let csv_path = args.output.join("trials.csv");
    let mut writer = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Parse(e.to_string()))?;
    for row in &report.rows {
        writer.serialize(row).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::io(&csv_path, e))?;

    let summary = report.summary();
    write_json(
        &args.output.join("summary.json"),
        &SummaryFile {
            config: &config,
            summary: &summary,
        },
    )?;
    let x_label = match config.protocol {
        Protocol::NoiseSweep => "sigma_deg",
        Protocol::OutlierSweep => "outlier_fraction",
    };
    write_json(
        &args.output.join("plot.json"),
        &PlotFile {
            x_label,
            y_label: "relative_mean_error",
            series: &report.plot_series(),
        },
    )?;

    say(out, "missing  sigma  outliers  method  mean_error  misclass  ok/failed")?;
    for s in &summary {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        say(
            out,
            &format!(
                "{:7.2}  {:5.2}  {:8.2}  {:6}  {:>10}  {:>8}  {}/{}",
                s.missing,
                s.sigma_deg,
                s.outlier_fraction,
                s.method.as_str(),
                fmt(s.mean_error),
                fmt(s.mean_misclassification),
                s.trials_ok,
                s.trials_failed
            ),
        )?;
    }
    Ok(Status::Ok)
}
