use nalgebra::DMatrix;

use super::curve::gamma_derivative;
use super::matrix::basis_indices;
use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::linalg::require_rank;
use crate::region::Region;

/// `u^{(j)} = γ^{(m_j)}(α_j)` restricted to `supp_τ(j)`.
pub fn derivative_row(region: &Region, p: &EllipticParameter, j: usize) -> Result<Vec<f64>> {
    let order = region.multiplicity(j)?;
    let support = region.supp(j)?;
    let mut row = gamma_derivative(region, p, region.alpha(j), order);
    for (idx, v) in row.iter_mut().enumerate() {
        if !support.contains(&(idx + 1)) {
            *v = 0.0;
        }
    }
    Ok(row)
}

/// Rows `u^{(j)}` for `j ∈ J_1 ∪ {1}`. Valid for every region, and required
/// when boundary directions repeat.
pub fn alternating_basis(region: &Region, p: &EllipticParameter) -> Result<DMatrix<f64>> {
    let rows = basis_indices(region);
    let len = region.len();
    let mut a = DMatrix::zeros(rows.len(), len);
    for (i, &j) in rows.iter().enumerate() {
        for (c, v) in derivative_row(region, p, j)?.into_iter().enumerate() {
            a[(i, c)] = v;
        }
    }
    require_rank(&a, region.n())?;
    Ok(a)
}

/// Divided difference `f[x, a_1, …, a_m]`, which equals the nested operator
/// `∂̄_{a_1} ∘ ⋯ ∘ ∂̄_{a_m} f` evaluated at `x`.
pub fn discrete_derivative<F: Fn(f64) -> f64>(f: F, anchors: &[f64], x: f64) -> Result<f64> {
    let mut nodes = Vec::with_capacity(anchors.len() + 1);
    nodes.push(x);
    nodes.extend_from_slice(anchors);
    for (i, &a) in nodes.iter().enumerate() {
        if nodes[..i].contains(&a) {
            return Err(Error::CoincidentAnchors(a));
        }
    }
    let mut table: Vec<f64> = nodes.iter().map(|&z| f(z)).collect();
    for level in 1..nodes.len() {
        for i in (level..nodes.len()).rev() {
            table[i] = (table[i] - table[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    Ok(table[nodes.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::matrix::basis_matrix;
    use crate::linalg::projector_distance;
    use crate::region::{alternating_example, random_region};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn divided_difference_basics() {
        let v = discrete_derivative(|t| t * t, &[0.0], 0.7).unwrap();
        assert!((v - 0.7).abs() < 1e-15);
        assert!(matches!(
            discrete_derivative(|t| t, &[0.1, 0.1], 0.0),
            Err(Error::CoincidentAnchors(_))
        ));
    }

    #[test]
    fn collapsing_anchors_give_derivatives() {
        let p = EllipticParameter::new(0.4).unwrap();
        let a0 = 0.3;
        let h = 1e-4;
        // nodes placed symmetrically about a0
        let v = discrete_derivative(|t| p.sn(t), &[a0 + h], a0 - h).unwrap();
        let exact = crate::elliptic::resc_sn_deriv(a0, &p).unwrap();
        assert!((v - exact).abs() < 1e-6);

        // second order: residual against f''/2 shrinks linearly in h
        let f2 = p.derivative(crate::elliptic::JacobiKind::Sn, 2, a0) / 2.0;
        let err = |h: f64| {
            (discrete_derivative(|t| p.sn(t), &[a0 + h, a0 + 2.0 * h], a0).unwrap() - f2).abs()
        };
        let ratio = err(1e-2) / err(1e-3);
        assert!(ratio > 5.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn agrees_with_value_basis_without_repeats() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let r = random_region(4, &mut rng);
        let p = EllipticParameter::new(-0.8).unwrap();
        let a = alternating_basis(&r, &p).unwrap();
        let b = basis_matrix(&r, &p).unwrap();
        assert!(projector_distance(&a, &b, 4) < 1e-8);
    }

    #[test]
    fn alternating_example_has_full_rank() {
        let r = alternating_example();
        let p = EllipticParameter::new(0.3).unwrap();
        let a = alternating_basis(&r, &p).unwrap();
        assert_eq!(a.nrows(), 4);
    }
}
