//! Small dense helpers over nalgebra: ranks, row spaces and subspace
//! distances.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// Ratio of the largest to the smallest singular value.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => a / b,
        _ => f64::INFINITY,
    }
}

/// Orthonormal rows spanning the dominant `rank`-dimensional row space.
pub fn row_space(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let rank = rank.min(order.len());
    DMatrix::from_fn(rank, m.ncols(), |i, j| v_t[(order[i], j)])
}

/// Orthogonal projector onto the row space of a matrix with orthonormal rows.
pub fn projector(q: &DMatrix<f64>) -> DMatrix<f64> {
    q.transpose() * q
}

/// Frobenius distance between the projectors onto the `rank`-dimensional
/// dominant row spaces of `a` and `b`.
pub fn projector_distance(a: &DMatrix<f64>, b: &DMatrix<f64>, rank: usize) -> f64 {
    (projector(&row_space(a, rank)) - projector(&row_space(b, rank))).norm()
}

/// Largest principal angle between the `rank`-dimensional dominant row
/// spaces of `a` and `b`, computed from sines for accuracy at small angles.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>, rank: usize) -> f64 {
    let qa = row_space(a, rank);
    let qb = row_space(b, rank);
    let residual = &qa - &qa * projector(&qb);
    let s = singular_values(&residual);
    s.first().copied().unwrap_or(0.0).clamp(0.0, 1.0).asin()
}

/// Errors unless `m` has numerical rank at least `expected`.
pub fn require_rank(m: &DMatrix<f64>, expected: usize) -> Result<()> {
    if numerical_rank(m, RANK_TOL) >= expected {
        Ok(())
    } else {
        Err(Error::RankDeficient {
            expected,
            singular_values: singular_values(m),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_condition() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&m, RANK_TOL), 1);
        assert!(require_rank(&m, 2).is_err());
        let id = DMatrix::<f64>::identity(3, 3) * 2.0;
        assert!((condition_number(&id) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subspace_distances() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let b = DMatrix::from_row_slice(1, 2, &[3.0, 0.0]);
        assert!(projector_distance(&a, &b, 1) < 1e-15);
        let c = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let angle = max_principal_angle(&a, &c, 1);
        assert!((angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((projector_distance(&a, &c, 1) - 1.0).abs() < 1e-12);
    }
}
