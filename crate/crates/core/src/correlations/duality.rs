use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::curve::{gamma, gamma_coord, CurveSample};
use super::matrix::{correlation_matrix, CorrelationMatrix};
use crate::arrangement::{
    build_arrangement, build_black_graph, build_white_graph, kramers_wannier_residual,
};
use crate::elliptic::EllipticParameter;
use crate::error::Result;
use crate::linalg::projector_distance;
use crate::region::Region;

/// Dual curve `γ*`: the curve of the relabelled region `R*` (see
/// [`Region::shifted`]) at the dual parameter.
pub fn dual_gamma(region: &Region, p: &EllipticParameter, t: f64) -> CurveSample {
    gamma(&region.shifted(), &p.dual(), t)
}

/// `S(x_1, …, x_2n) = ((-1)^{n-1} x_2n, x_1, …, x_{2n-1})`.
pub fn shift_s(v: &[f64]) -> Vec<f64> {
    let len = v.len();
    let n = len / 2;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(len);
    out.push(sign * v[len - 1]);
    out.extend_from_slice(&v[..len - 1]);
    out
}

/// Ratios `γ_p(t) / γ*_{p+1}(t)` for `p = 1, …, 2n`, or `None` when some
/// dual coordinate is too small to divide by.
pub fn duality_ratios(region: &Region, p: &EllipticParameter, t: f64) -> Option<Vec<f64>> {
    let star = region.shifted();
    let pd = p.dual();
    let g = gamma(region, p, t).values;
    let mut out = Vec::with_capacity(g.len());
    for (i, gp) in g.iter().enumerate() {
        let d = gamma_coord(&star, &pd, t, i as i64 + 2);
        if d.abs() < 1e-8 {
            return None;
        }
        out.push(gp / d);
    }
    Some(out)
}

/// Correlations of the dual model, from the dual curve.
pub fn dual_correlation_matrix(
    region: &Region,
    p: &EllipticParameter,
) -> Result<CorrelationMatrix> {
    correlation_matrix(&region.shifted(), &p.dual())
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    /// Largest relative spread of `γ_p/γ*_{p+1}` over `p`, across samples.
    pub ratio_spread: f64,
    /// Projector distance between `span(γ)·S` and `span(γ*)`.
    pub projector_distance: f64,
    /// `max_e |sinh(2J_e) sinh(2J*_e) - 1|`.
    pub kramers_wannier: f64,
    /// For regular `2n`-gons: largest deviation of `γ*_{p+1}/γ_p` from
    /// `∏_{j=n+1}^{2n-1} dn(t - α_j)`.
    pub regular_constant: Option<f64>,
}

fn is_regular(region: &Region) -> bool {
    let n = region.n();
    let step = std::f64::consts::PI / (2 * n) as f64;
    (1..=region.len()).all(|j| {
        region.tau(j) == (j + n - 1) % (2 * n) + 1
            && (region.alpha(j) - region.alpha(1) - (j - 1) as f64 * step).abs() < 1e-12
    })
}

pub fn duality_checks(region: &Region, p: &EllipticParameter, seed: u64) -> Result<DualityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = region.len();
    let n = region.n();

    let mut ratio_spread: f64 = 0.0;
    let mut regular_constant = is_regular(region).then_some(0.0_f64);
    let mut accepted = 0;
    while accepted < 50 {
        let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let Some(r) = duality_ratios(region, p, t) else {
            continue;
        };
        accepted += 1;
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let spread = r.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean.abs();
        ratio_spread = ratio_spread.max(spread);
        if let Some(worst) = regular_constant.as_mut() {
            let prod: f64 = (n + 1..len).map(|j| p.dn(t - region.alpha(j))).product();
            let dev = r.iter().map(|x| (1.0 / x - prod).abs()).fold(0.0, f64::max);
            *worst = worst.max(dev);
        }
    }

    let samples = 4 * len;
    let ts: Vec<f64> = (0..samples).map(|_| rng.random_range(-3.0..3.0)).collect();
    let a = DMatrix::from_fn(samples, len, |i, c| {
        shift_s(&gamma(region, p, ts[i]).values)[c]
    });
    let b = DMatrix::from_fn(samples, len, |i, c| dual_gamma(region, p, ts[i]).values[c]);
    let projector_distance = projector_distance(&a, &b, n);

    let arr = build_arrangement(region, seed)?;
    let kramers_wannier =
        kramers_wannier_residual(&build_black_graph(&arr, p)?, &build_white_graph(&arr, p)?);

    Ok(DualityReport {
        ratio_spread,
        projector_distance,
        kramers_wannier,
        regular_constant,
    })
}
