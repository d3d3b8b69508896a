use episcale::synth::{generate_scene, relative_mean_error, SyntheticScene};
use episcale::{
    assemble, compute_basis, solve_scales, AbsolutePose, BasisKind, EpipolarGraph, NullCircuitTest, RankVerdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KINDS: [BasisKind; 3] = [BasisKind::Fcb, BasisKind::Mcb, BasisKind::NMcb];

fn scene(seed: u64) -> SyntheticScene {
    generate_scene(25, 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn recovered(graph: &EpipolarGraph, kind: BasisKind) -> Vec<f64> {
    let basis = compute_basis(graph, kind, &NullCircuitTest::default()).unwrap();
    let system = assemble(&basis, graph).unwrap();
    let solution = solve_scales(&system).unwrap();
    solution.per_edge(graph.m()).into_iter().map(Option::unwrap).collect()
}

#[test]
fn every_basis_recovers_exact_scales() {
    for seed in 0..3 {
        let s = scene(seed);
        for kind in KINDS {
            let est = recovered(&s.graph, kind);
            let err = relative_mean_error(&s.scales, &est).unwrap();
            assert!(err < 1e-9, "seed {seed} {kind:?}: {err}");
        }
    }
}

#[test]
fn true_scales_lie_in_the_null_space() {
    let s = scene(7);
    let basis = compute_basis(&s.graph, BasisKind::Mcb, &NullCircuitTest::default()).unwrap();
    let system = assemble(&basis, &s.graph).unwrap();
    let a = system.to_dense();
    let truth = system.gather(&s.scales);
    let r = (&a * &truth).norm() / truth.norm();
    assert!(r < 1e-12, "{r}");
}

#[test]
fn recovered_scales_ignore_global_scene_scale() {
    let s = scene(11);
    let pairs: Vec<(usize, usize)> = s.graph.edges().iter().map(|e| e.endpoints()).collect();
    let grown: Vec<AbsolutePose> = s
        .poses
        .iter()
        .map(|p| AbsolutePose::new(p.rotation, p.translation * 37.5))
        .collect();
    let big = SyntheticScene::from_poses(grown, &pairs).unwrap();
    let a = recovered(&s.graph, BasisKind::Mcb);
    let b = recovered(&big.graph, BasisKind::Mcb);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn single_precision_pipeline() {
    let s = scene(5);
    let edges = s
        .graph
        .edges()
        .iter()
        .map(|e| (e.source, e.target, e.motion.cast::<f32>()))
        .collect();
    let g32 = episcale::EpipolarGraph32::new(s.graph.n(), edges).unwrap();
    for kind in KINDS {
        let basis = compute_basis(&g32, kind, &NullCircuitTest::default()).unwrap();
        let solution = solve_scales(&assemble(&basis, &g32).unwrap()).unwrap();
        let est: Vec<f64> = solution.per_edge(g32.m()).into_iter().map(|x| x.unwrap() as f64).collect();
        let err = relative_mean_error(&s.scales, &est).unwrap();
        assert!(err < 1e-4, "{kind:?}: {err}");
        let verdict = RankVerdict::from_singular_values(solution.sigma_min, solution.sigma_second, solution.sigma_max, 1e-3);
        assert_eq!(verdict, RankVerdict::Unique);
    }
}

#[test]
fn bridges_are_left_uncovered() {
    // two triangles joined by the bridge 2-3
    let pairs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)];
    let poses = episcale::synth::random_poses(6, &mut ChaCha8Rng::seed_from_u64(3));
    let s = SyntheticScene::from_poses(poses, &pairs).unwrap();
    let basis = compute_basis(&s.graph, BasisKind::Mcb, &NullCircuitTest::default()).unwrap();
    assert_eq!(basis.len(), 2);
    let covered = basis.covered_edges(s.graph.m());
    assert!(!covered[3]);
    assert_eq!(covered.iter().filter(|&&c| c).count(), 6);
    let system = assemble(&basis, &s.graph).unwrap();
    assert_eq!(system.uncovered_edges(), vec![3]);
}
