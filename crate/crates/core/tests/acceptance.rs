//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a non-zero status if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zcorr::arrangement::{build_arrangement, build_black_graph, find_other_class};
use zcorr::correlations::{
    alternating_basis, basis_matrix, correlation_matrix, descent_transport_check, doubled_matrix,
    duality_checks, gamma,
};
use zcorr::elliptic::EllipticParameter;
use zcorr::linalg::{max_principal_angle, singular_values};
use zcorr::nearcritical::{critical_factorization_checks, gamma_expansion};
use zcorr::oracle::{exact_correlations, formula_vs_oracle, z_invariance_check};
use zcorr::region::{alternating_example, perturb_chords, random_region, regular_region};
use zcorr::Region;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn param(m: f64) -> EllipticParameter {
    EllipticParameter::new(m).expect("m in supported range")
}

fn square_closed_form() -> Outcome {
    let start = Instant::now();
    let r = regular_region(2).unwrap();
    let mut worst: f64 = 0.0;
    for &m in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
        let p = param(m);
        let kp = p.kprime();
        let expected = 1.0 / (kp.sqrt() + (1.0 + kp).sqrt());
        let got = correlation_matrix(&r, &p).unwrap().get(1, 2);
        worst = worst.max((got - expected).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max error {worst:.2e}, {elapsed:.2?}"),
    )
}

fn formula_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut regions = vec![regular_region(3).unwrap()];
    while regions.len() < 11 {
        let r = random_region(rng.random_range(2..=5), &mut rng);
        if !r.is_alternating() {
            regions.push(r);
        }
    }
    let mut worst: f64 = 0.0;
    for r in &regions {
        let p = param(rng.random_range(-5.0..0.95));
        worst = worst.max(formula_vs_oracle(r, &p, rng.random()).unwrap());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-8 && elapsed < Duration::from_secs(30),
        format!(
            "{} regions, max deviation {worst:.2e}, {elapsed:.2?}",
            regions.len()
        ),
    )
}

fn z_invariance() -> Outcome {
    let hex = regular_region(3).unwrap();
    let p = param(0.4);
    let first = build_arrangement(&hex, 0).unwrap();
    let Some(second) = find_other_class(&hex, &first.commutation_signature(), 1, 500) else {
        return outcome(false, "second commutation class not found".into());
    };
    let a = exact_correlations(&build_black_graph(&first, &p).unwrap()).unwrap();
    let b = exact_correlations(&build_black_graph(&second, &p).unwrap()).unwrap();
    let hex_dev = a.correlations.max_abs_diff(&b.correlations);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut random_dev: f64 = 0.0;
    for _ in 0..5 {
        let r = random_region(4, &mut rng);
        let p = param(rng.random_range(-3.0..0.9));
        let seeds: Vec<u64> = (0..5).map(|_| rng.random()).collect();
        random_dev = random_dev.max(z_invariance_check(&r, &p, &seeds).unwrap());
    }
    outcome(
        hex_dev <= 1e-10 && random_dev <= 1e-10,
        format!("hexagon classes {hex_dev:.2e}, random n=4 {random_dev:.2e}"),
    )
}

fn descent_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut seen = [0usize; 3];
    let mut instances = 0;
    while instances < 20 {
        // cycle through odd j, even j < 2n, and j = 2n
        let class = instances % 3;
        let n = rng.random_range(2..=5);
        let r = if rng.random_bool(0.3) {
            regular_region(n).unwrap()
        } else {
            random_region(n, &mut rng)
        };
        let len = r.len();
        let candidates: Vec<usize> = r
            .tau_descents()
            .into_iter()
            .filter(|&j| match class {
                0 => j % 2 == 1,
                1 => j % 2 == 0 && j < len,
                _ => j == len,
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let j = candidates[rng.random_range(0..candidates.len())];
        let p = param(rng.random_range(-5.0..0.95));
        let ts: Vec<f64> = (0..100).map(|_| rng.random_range(-PI..PI)).collect();
        worst = worst.max(descent_transport_check(&r, j, &p, &ts).unwrap());
        seen[class] += 1;
        instances += 1;
    }
    outcome(
        worst <= 1e-10 && seen.iter().all(|&c| c > 0),
        format!(
            "20 instances (odd {}, even {}, corner {}), max residual {worst:.2e}",
            seen[0], seen[1], seen[2]
        ),
    )
}

fn test_regions(rng: &mut ChaCha8Rng) -> Vec<Region> {
    let mut regions: Vec<Region> = (1..=5).map(|n| regular_region(n).unwrap()).collect();
    regions.push(alternating_example());
    for _ in 0..15 {
        regions.push(random_region(rng.random_range(1..=6), rng));
    }
    regions
}

fn rank_dimension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let regions = test_regions(&mut rng);
    let mut worst_gap = f64::INFINITY;
    for r in &regions {
        let n = r.n();
        let len = r.len();
        let p = param(rng.random_range(-5.0..0.95));
        let samples = 4 * n;
        let ts: Vec<f64> = (0..samples).map(|_| rng.random_range(-PI..PI)).collect();
        let g = DMatrix::from_fn(samples, len, |i, c| gamma(r, &p, ts[i]).values[c]);
        let sv = singular_values(&g);
        let gap = if n < len {
            sv[n - 1] / sv[n].max(f64::MIN_POSITIVE)
        } else {
            f64::INFINITY
        };
        worst_gap = worst_gap.min(gap);
    }
    outcome(
        worst_gap >= 1e6,
        format!(
            "{} regions, smallest gap sigma_n/sigma_(n+1) = {worst_gap:.2e}",
            regions.len()
        ),
    )
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut regions: Vec<Region> = (2..=4).map(|n| regular_region(n).unwrap()).collect();
    for _ in 0..8 {
        regions.push(random_region(rng.random_range(2..=5), &mut rng));
    }
    let (mut kw, mut spread, mut proj, mut constant) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for r in &regions {
        let p = param(rng.random_range(-5.0..0.95));
        let rep = duality_checks(r, &p, rng.random()).unwrap();
        kw = kw.max(rep.kramers_wannier);
        spread = spread.max(rep.ratio_spread);
        proj = proj.max(rep.projector_distance);
        if let Some(c) = rep.regular_constant {
            constant = constant.max(c);
        }
    }
    outcome(
        kw <= 1e-10 && spread <= 1e-9 && proj <= 1e-8 && constant <= 1e-9,
        format!("KW {kw:.2e}, ratio spread {spread:.2e}, projector {proj:.2e}, regular constant {constant:.2e}"),
    )
}

fn elliptic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut check = |v: f64| worst = worst.max(v.abs());
    for _ in 0..1000 {
        let m = rng.random_range(-10.0..0.95);
        let t = rng.random_range(-2.0 * PI..2.0 * PI);
        let s = rng.random_range(-2.0 * PI..2.0 * PI);
        let p = param(m);
        let d = p.dual();
        let kp = p.kprime();
        let f = p.eval(t);

        check(f.sn * f.sn + f.cn * f.cn - 1.0);
        check(f.dn * f.dn + m * f.sn * f.sn - 1.0);

        let neg = p.eval(-t);
        check(neg.sn + f.sn);
        check(neg.cn - f.cn);
        check(neg.dn - f.dn);
        check(neg.cd() - f.cd());
        for sign in [1.0, -1.0] {
            let q = p.eval(t + sign * FRAC_PI_2);
            check(q.sn - sign * f.cd());
            check(q.cn + sign * kp * f.sd());
            check(q.dn - kp / f.dn);
            check(q.cd() + sign * f.sn);
        }
        let h = p.eval(t + PI);
        check(h.sn + f.sn);
        check(h.cn + f.cn);
        check(h.dn - f.dn);
        check(h.cd() + f.cd());

        let g = p.eval(s);
        let sum = p.eval(t + s);
        check(f.dn * sum.sn - (f.cn * g.sn + f.sn * g.cn * sum.dn));
        check(sum.cn - (f.cn * g.cn - f.sn * g.sn * sum.dn));

        let star = d.eval(t);
        check(kp * f.sd() - star.sn);
        check(f.cd() - star.cn);
        check(1.0 / f.dn - star.dn);

        let z = EllipticParameter::critical().eval(t);
        check(z.sn - t.sin());
        check(z.cn - t.cos());
        check(z.dn - 1.0);

        let q = p.eval(FRAC_PI_4);
        check(q.sn - 1.0 / (1.0 + kp).sqrt());
        check(q.cn - (kp / (1.0 + kp)).sqrt());
        check(q.dn - kp.sqrt());
        check(p.sn(FRAC_PI_2) - 1.0);
    }
    outcome(
        worst <= 1e-10,
        format!("1000 draws, max identity residual {worst:.2e}"),
    )
}

fn expansion_residual(r: &Region, t: f64, m: f64) -> f64 {
    let e = gamma_expansion(r, t);
    let g = gamma(r, &param(m), t).values;
    (0..r.len())
        .map(|i| (g[i] - e.zeroth[i] - m * e.second_order[i]).abs())
        .fold(0.0, f64::max)
}

fn near_critical() -> Outcome {
    let ts = [0.13, 0.71, 1.9, -0.8];
    let mut ratios = Vec::new();
    let (mut vf, mut db): (f64, f64) = (0.0, 0.0);
    for n in [2, 3] {
        let r = regular_region(n).unwrap();
        for &t in &[0.37, 1.1, -2.4] {
            ratios.push(expansion_residual(&r, t, 1e-2) / expansion_residual(&r, t, 1e-3));
        }
        let rep = critical_factorization_checks(&r, &ts).unwrap();
        vf = vf.max(rep.vf_residual);
        db = db.max(rep.db_residual).max(rep.imaginary_residual);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    outcome(
        (50.0..=200.0).contains(&lo) && (50.0..=200.0).contains(&hi) && vf <= 1e-9 && db <= 1e-8,
        format!("decay ratio in [{lo:.1}, {hi:.1}], V.F residual {vf:.2e}, D.B residual {db:.2e}"),
    )
}

fn alternating() -> Outcome {
    let r = alternating_example();
    let p = param(0.3);
    let Ok(a) = alternating_basis(&r, &p) else {
        return outcome(false, "alternating basis is rank deficient".into());
    };
    let jitter = [0.0, 0.37, 0.61, 0.89];
    let angles: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let offsets: Vec<f64> = jitter.iter().map(|j| j * eps).collect();
            let perturbed = perturb_chords(&r, &offsets).unwrap();
            let b = basis_matrix(&perturbed, &p).unwrap();
            max_principal_angle(&a, &b, r.n())
        })
        .collect();
    let linear = angles
        .windows(2)
        .all(|w| (5.0..=20.0).contains(&(w[0] / w[1])));
    outcome(
        a.nrows() == r.n() && linear,
        format!(
            "rank {}, principal angles {:.2e} / {:.2e} / {:.2e}",
            a.nrows(),
            angles[0],
            angles[1],
            angles[2]
        ),
    )
}

fn structural_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let regions = test_regions(&mut rng);
    let mut doubled: f64 = 0.0;
    let mut sym: f64 = 0.0;
    for r in &regions {
        for _ in 0..3 {
            let p = param(rng.random_range(-5.0..0.95));
            doubled = doubled.max(doubled_matrix(r, &p).unwrap().structure_residual());
            sym = sym.max(correlation_matrix(r, &p).unwrap().structure_residual());
        }
    }
    outcome(
        doubled <= 1e-9 && sym <= 1e-9,
        format!(
            "{} matrices, doubled structure {doubled:.2e}, symmetry/diagonal {sym:.2e}",
            3 * regions.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("square-region closed form", square_closed_form),
        ("formula-oracle equivalence", formula_oracle),
        ("Z-invariance", z_invariance),
        ("descent transport", descent_transport),
        ("rank and dimension", rank_dimension),
        ("duality", duality),
        ("elliptic identities", elliptic_suite),
        ("near-critical expansion", near_critical),
        ("alternating regions", alternating),
        ("structural invariants", structural_invariants),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
