use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zcorr::arrangement::{build_arrangement, build_black_graph};
use zcorr::correlations::correlation_matrix;
use zcorr::oracle::{
    exact_correlations, formula_vs_oracle, oracle_correlations, z_invariance_check,
};
use zcorr::region::{random_region, regular_region};
use zcorr::{EllipticParameter, IsingGraph};

fn param(m: f64) -> EllipticParameter {
    EllipticParameter::new(m).unwrap()
}

#[test]
fn square_both_pipelines() {
    let r = regular_region(2).unwrap();
    for &m in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
        assert!(formula_vs_oracle(&r, &param(m), 0).unwrap() < 1e-8);
    }
}

#[test]
fn hexagon_twenty_parameters() {
    let r = regular_region(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..20 {
        let m = rng.random_range(-5.0..0.95);
        let d = formula_vs_oracle(&r, &param(m), rng.random()).unwrap();
        assert!(d < 1e-8, "m = {m}: {d}");
    }
}

#[test]
fn random_regions_up_to_five_chords() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10 {
        let r = random_region(rng.random_range(1..=5), &mut rng);
        let m = rng.random_range(-5.0..0.95);
        let d = formula_vs_oracle(&r, &param(m), rng.random()).unwrap();
        assert!(d < 1e-8, "{:?} m = {m}: {d}", r.taus());
    }
}

#[test]
fn strongly_negative_parameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let r = random_region(4, &mut rng);
    assert!(formula_vs_oracle(&r, &param(-20.0), 1).unwrap() < 1e-8);
}

#[test]
fn square_has_single_class() {
    let r = regular_region(2).unwrap();
    assert_eq!(
        z_invariance_check(&r, &param(0.3), &[0, 1, 2, 3]).unwrap(),
        0.0
    );
}

#[test]
fn random_four_chord_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..3 {
        let r = random_region(4, &mut rng);
        let seeds: Vec<u64> = (0..5).map(|_| rng.random()).collect();
        assert!(z_invariance_check(&r, &param(0.7), &seeds).unwrap() < 1e-10);
    }
}

#[test]
fn oracle_matrix_is_a_correlation_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let r = random_region(5, &mut rng);
    let p = param(0.2);
    let c = oracle_correlations(&r, &p, 9).unwrap();
    assert!(c.structure_residual() < 1e-14);
    for i in 1..=5 {
        for j in 1..=5 {
            assert!(c.get(i, j) > 0.0 && c.get(i, j) <= 1.0 + 1e-15);
        }
    }
    let f = correlation_matrix(&r, &p).unwrap();
    assert!(f.max_abs_diff(&c) < 1e-8);
}

#[test]
fn zero_coupling_disconnects() {
    let g = IsingGraph::from_couplings(3, &[(0, 1, 0.8), (1, 2, 0.0)], vec![0, 2]);
    let r = exact_correlations(&g).unwrap();
    assert!(r.correlations.get(1, 2).abs() < 1e-15);
}

#[test]
fn contracted_boundary_pairs_are_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..10 {
        let r = random_region(rng.random_range(2..=5), &mut rng);
        let arr = build_arrangement(&r, 0).unwrap();
        let g = build_black_graph(&arr, &param(0.1)).unwrap();
        let c = exact_correlations(&g).unwrap().correlations;
        for (i, j) in g.contracted_pairs() {
            assert_eq!(c.get(i, j), 1.0);
        }
    }
}

#[test]
fn coupling_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..20 {
        let v = rng.random_range(3..=8);
        let mut edges = Vec::new();
        for a in 0..v {
            for b in a + 1..v {
                if rng.random_bool(0.4) || b == a + 1 {
                    edges.push((a, b, rng.random_range(0.0..1.5)));
                }
            }
        }
        let boundary: Vec<usize> = (0..v).collect();
        let before = exact_correlations(&IsingGraph::from_couplings(v, &edges, boundary.clone()))
            .unwrap()
            .correlations;
        let k = rng.random_range(0..edges.len());
        edges[k].2 += rng.random_range(0.01..1.0);
        let after = exact_correlations(&IsingGraph::from_couplings(v, &edges, boundary))
            .unwrap()
            .correlations;
        for i in 1..=v {
            for j in 1..=v {
                assert!(after.get(i, j) >= before.get(i, j) - 1e-14);
            }
        }
    }
}
