//! Behaviour near the critical point `m = 0`: the first-order expansion of
//! `γ` in `m = k²`, and the structure of the critical basis matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::correlations::matrix::{basis_indices, k_matrix, DoubledMatrix};
use crate::error::{Error, Result};
use crate::region::Region;

/// `γ(t, m) = zeroth + m·second_order + O(m²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionSample {
    pub t: f64,
    pub zeroth: Vec<f64>,
    pub second_order: Vec<f64>,
}

/// Uses `sn(u) = sin u (1 + (m/4) cos² u)` and
/// `dn(u)/√k' = 1 + (m/4) cos 2u` to first order in `m`.
pub fn gamma_expansion(region: &Region, t: f64) -> ExpansionSample {
    let len = region.len() as i64;
    let mut zeroth = Vec::with_capacity(len as usize);
    let mut second_order = Vec::with_capacity(len as usize);
    for idx in 1..=len {
        let lifted = region.j_set_lifted(idx);
        let prod: f64 = lifted
            .iter()
            .map(|&l| (t - region.alpha_lift(l)).sin())
            .product();
        let sn_part: f64 = lifted
            .iter()
            .map(|&l| (t - region.alpha_lift(l)).cos().powi(2))
            .sum();
        let dn_part: f64 = (1..=2 * (idx as usize / 2))
            .map(|j| (2.0 * (t - region.alpha(j))).cos())
            .sum();
        zeroth.push(prod);
        second_order.push(0.25 * prod * (sn_part + dn_part));
    }
    ExpansionSample {
        t,
        zeroth,
        second_order,
    }
}

fn sign_of(idx: usize, jp: &[usize]) -> f64 {
    if jp.iter().filter(|&&j| j < idx).count() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Elementary-symmetric-like sums `Σ_{|H| = h} ∏_H sin α ∏_{rest} cos α`.
fn mixed_symmetric(angles: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for &a in angles {
        let (s, c) = a.sin_cos();
        let mut next = vec![0.0; e.len() + 1];
        for (h, &v) in e.iter().enumerate() {
            next[h] += v * c;
            next[h + 1] += v * s;
        }
        e = next;
    }
    e
}

fn f_matrix_with(region: &Region, subset_size: impl Fn(usize) -> Option<usize>) -> DMatrix<f64> {
    let n = region.n();
    let len = region.len();
    let mut f = DMatrix::zeros(n, len);
    for p in 1..=len {
        let jp = region.j_set(p).expect("index in range");
        let angles: Vec<f64> = jp.iter().map(|&j| region.alpha(j)).collect();
        let e = mixed_symmetric(&angles);
        let sign = sign_of(p, &jp);
        for l in 1..=n {
            if let Some(h) = subset_size(l) {
                f[(l - 1, p - 1)] = sign * e.get(h).copied().unwrap_or(0.0);
            }
        }
    }
    f
}

/// `F` with `γ_p(t, 0) = Σ_l (-cos t)^{l-1} sin^{n-l}(t) F_{l,p}`, i.e.
/// `F_{l,p} = ± Σ_{H ⊂ J_p, |H| = l-1} ∏_H sin α_j ∏_{J_p∖H} cos α_j`.
pub fn critical_f_matrix(region: &Region) -> Result<DMatrix<f64>> {
    if region.has_repeated_directions() {
        return Err(Error::RepeatedDirections);
    }
    Ok(f_matrix_with(region, |l| Some(l - 1)))
}

/// Coefficients in the Fourier basis:
/// `γ_p(t, 0) = Σ_l e^{i(n+1-2l)t} F^exp_{l,p}`.
pub fn critical_f_exp(region: &Region) -> DMatrix<Complex64> {
    let n = region.n();
    let len = region.len();
    let mut f = DMatrix::from_element(n, len, Complex64::new(0.0, 0.0));
    for p in 1..=len {
        let jp = region.j_set(p).expect("index in range");
        let sign = sign_of(p, &jp);
        // coefficients of z^{-k}, …, z^{k} for k = number of factors so far
        let mut poly = vec![Complex64::new(sign, 0.0)];
        for &j in &jp {
            let a = region.alpha(j);
            // sin(t - a) = (e^{-ia} z - e^{ia} z^{-1}) / 2i
            let up = Complex64::from_polar(1.0, -a) / Complex64::new(0.0, 2.0);
            let down = -Complex64::from_polar(1.0, a) / Complex64::new(0.0, 2.0);
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 2];
            for (k, &c) in poly.iter().enumerate() {
                next[k] += c * down;
                next[k + 2] += c * up;
            }
            poly = next;
        }
        // poly[k] multiplies z^{k - (n-1)}; row l carries exponent n+1-2l
        for l in 1..=n {
            f[(l - 1, p - 1)] = poly[2 * (n - l)];
        }
    }
    f
}

/// `z_l = e^{iπ(2l-n-1)/(2n)}`.
pub fn phases(n: usize) -> Vec<Complex64> {
    (1..=n)
        .map(|l| {
            Complex64::from_polar(
                1.0,
                std::f64::consts::PI * (2.0 * l as f64 - n as f64 - 1.0) / (2 * n) as f64,
            )
        })
        .collect()
}

/// `B_{lj} = z_l^{j-1}`, `n × 2n`.
pub fn b_matrix(n: usize) -> DMatrix<Complex64> {
    let z = phases(n);
    DMatrix::from_fn(n, 2 * n, |l, j| z[l].powu(j as u32))
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    /// `‖V F - Γ(0)‖_max` with the real monomial basis.
    pub vf_residual: f64,
    /// `‖V_exp F^exp - Γ(0)‖_max` with the Fourier basis.
    pub fourier_residual: f64,
    /// `‖F^exp - D B‖_max` with `D` fitted from the first column.
    pub db_residual: f64,
    /// Largest imaginary part of `V_exp F^exp`, which must be real.
    pub imaginary_residual: f64,
}

/// Critical-point checks at the sample points `ts` (at least `n`).
pub fn critical_factorization_checks(region: &Region, ts: &[f64]) -> Result<FactorizationReport> {
    let n = region.n();
    let len = region.len();
    let f = critical_f_matrix(region)?;
    let fe = critical_f_exp(region);
    let rows = ts.len();

    let gamma0 = DMatrix::from_fn(rows, len, |i, p| gamma_expansion(region, ts[i]).zeroth[p]);
    let v = DMatrix::from_fn(rows, n, |i, l| {
        (-ts[i].cos()).powi(l as i32) * ts[i].sin().powi((n - 1 - l) as i32)
    });
    let vf_residual = (&v * &f - &gamma0).abs().max();

    let v_exp = DMatrix::from_fn(rows, n, |i, l| {
        Complex64::from_polar(1.0, (n as f64 - 1.0 - 2.0 * l as f64) * ts[i])
    });
    let recon = &v_exp * &fe;
    let mut fourier_residual: f64 = 0.0;
    let mut imaginary_residual: f64 = 0.0;
    for i in 0..rows {
        for p in 0..len {
            fourier_residual = fourier_residual.max((recon[(i, p)].re - gamma0[(i, p)]).abs());
            imaginary_residual = imaginary_residual.max(recon[(i, p)].im.abs());
        }
    }

    let b = b_matrix(n);
    let mut db_residual: f64 = 0.0;
    for l in 0..n {
        let d = fe[(l, 0)] / b[(l, 0)];
        for j in 0..len {
            db_residual = db_residual.max((fe[(l, j)] - d * b[(l, j)]).norm());
        }
    }
    Ok(FactorizationReport {
        vf_residual,
        fourier_residual,
        db_residual,
        imaginary_residual,
    })
}

/// `M̃(m) ≈ M̃₀ + m·dM̃`, from `Γ(m) ≈ Γ₀ + m·dΓ` on the value basis:
/// `dM̃ = (Γ₀K)⁻¹dΓ - (Γ₀K)⁻¹ dΓ K (Γ₀K)⁻¹ Γ₀`.
pub fn doubled_matrix_first_order(region: &Region) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if region.has_repeated_directions() {
        return Err(Error::RepeatedDirections);
    }
    let rows = basis_indices(region);
    let len = region.len();
    let n = region.n();
    let samples: Vec<ExpansionSample> = rows
        .iter()
        .map(|&j| gamma_expansion(region, region.alpha(j)))
        .collect();
    let g0 = DMatrix::from_fn(n, len, |i, c| samples[i].zeroth[c]);
    let dg = DMatrix::from_fn(n, len, |i, c| samples[i].second_order[c]);
    let k = k_matrix(n);
    let m0 = DoubledMatrix::from_basis(&g0)?.entries;
    let lu = (&g0 * &k).lu();
    let first = lu.solve(&dg).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let dm = &first - &first * &k * &m0;
    Ok((m0, dm))
}
