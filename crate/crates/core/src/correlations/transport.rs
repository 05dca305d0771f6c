use nalgebra::DMatrix;

use super::curve::gamma;
use super::matrix::basis_matrix;
use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::linalg::projector_distance;
use crate::region::Region;

/// The `2n × 2n` matrix `g_j` carrying `γ_{R·t_j}` to `γ_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub j: usize,
    pub entries: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }
}

/// For `j < 2n` the identity with the block `[[1/c, s/c], [s/c, 1/c]]` at
/// rows and columns `j, j+1`, where `s, c = sn, cn(α_{j+1} - α_j)` taken at
/// the dual parameter for odd `j`. For `j = 2n` the same shape sits on the
/// corners `1, 2n` with `s, c = sn, cn(α_1 + π - α_2n)` and off-diagonal sign
/// `(-1)^{n-1}`.
pub fn transfer_matrix(region: &Region, j: usize, p: &EllipticParameter) -> Result<TransferMatrix> {
    let len = region.len();
    if j == 0 || j > len {
        return Err(Error::IndexOutOfRange {
            index: j as i64,
            len,
        });
    }
    if region.tau_lift(j as i64) == j as i64 + 1 {
        return Err(Error::AdjacentPair(j));
    }
    let delta = region.alpha_lift(j as i64 + 1) - region.alpha_lift(j as i64);
    let q = if j % 2 == 1 { p.dual() } else { *p };
    let f = q.eval(delta);
    let (diag, off) = (1.0 / f.cn, f.sn / f.cn);
    let mut g = DMatrix::identity(len, len);
    if j < len {
        g[(j - 1, j - 1)] = diag;
        g[(j, j)] = diag;
        g[(j - 1, j)] = off;
        g[(j, j - 1)] = off;
    } else {
        let sign = if region.n() % 2 == 1 { 1.0 } else { -1.0 };
        g[(0, 0)] = diag;
        g[(len - 1, len - 1)] = diag;
        g[(0, len - 1)] = sign * off;
        g[(len - 1, 0)] = sign * off;
    }
    Ok(TransferMatrix { j, entries: g })
}

/// Scalar relating the two curves across a descent: `1` for `j < 2n`, and
/// `dn(t - α_1)/dn(t - α_2n)` for `j = 2n`, where the swap moves the first
/// angle by `-π` and so changes every product `Π_p`.
pub fn transport_scale(region: &Region, j: usize, p: &EllipticParameter, t: f64) -> f64 {
    let len = region.len();
    if j == len {
        p.dn(t - region.alpha(1)) / p.dn(t - region.alpha(len))
    } else {
        1.0
    }
}

/// `max_t ‖γ_R(t) - λ(t) γ_{R'}(t) g_j‖_∞` with `R' = R·t_j`.
pub fn descent_transport_check(
    region: &Region,
    j: usize,
    p: &EllipticParameter,
    ts: &[f64],
) -> Result<f64> {
    let next = region.apply_descent(j)?;
    let g = transfer_matrix(region, j, p)?;
    let len = region.len();
    let mut worst: f64 = 0.0;
    for &t in ts {
        let lhs = gamma(region, p, t).values;
        let lam = transport_scale(region, j, p, t);
        let rhs = DMatrix::from_row_slice(1, len, &gamma(&next, p, t).values) * &g.entries;
        for c in 0..len {
            worst = worst.max((lhs[c] - lam * rhs[(0, c)]).abs());
        }
    }
    Ok(worst)
}

/// Descents taken (always the smallest available) until no crossing is left.
#[derive(Debug, Clone)]
pub struct TransportChain {
    pub regions: Vec<Region>,
    pub steps: Vec<TransferMatrix>,
}

impl TransportChain {
    pub fn build(region: &Region, p: &EllipticParameter) -> Result<Self> {
        let mut regions = vec![region.clone()];
        let mut steps = Vec::new();
        loop {
            let current = regions.last().expect("non-empty");
            let crossings = current.crossings().len();
            if crossings == 0 {
                break;
            }
            let Some(&j) = current.tau_descents().first() else {
                return Err(Error::NoDescent(crossings));
            };
            steps.push(transfer_matrix(current, j, p)?);
            let next = current.apply_descent(j)?;
            regions.push(next);
        }
        Ok(Self { regions, steps })
    }

    /// `g_{k-1} ⋯ g_0`, mapping the crossingless end of the chain back to
    /// the start.
    pub fn product(&self) -> DMatrix<f64> {
        let len = self.regions[0].len();
        self.steps
            .iter()
            .rev()
            .fold(DMatrix::identity(len, len), |acc, g| acc * &g.entries)
    }

    /// Projector distance between `span(γ_R)` and the transported span of
    /// the crossingless end.
    pub fn span_residual(&self, p: &EllipticParameter) -> Result<f64> {
        let start = &self.regions[0];
        let end = self.regions.last().expect("non-empty");
        let a = basis_matrix(start, p)?;
        let b = basis_matrix(end, p)? * self.product();
        Ok(projector_distance(&a, &b, start.n()))
    }
}
