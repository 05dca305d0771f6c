use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::alternating::alternating_basis;
use super::curve::gamma;
use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, require_rank};
use crate::region::Region;

/// Condition numbers of `AK_n` above this are flagged.
pub const CONDITION_WARNING: f64 = 1e12;
/// Above this `AK_n` is treated as singular.
const CONDITION_SINGULAR: f64 = 1e15;

/// `2n × n` matrix with `½` at rows `2i-1, 2i` of column `i`.
pub fn k_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, n, |r, c| if r / 2 == c { 0.5 } else { 0.0 })
}

/// Rows of `J_1 ∪ {1}`, ascending.
pub fn basis_indices(region: &Region) -> Vec<usize> {
    let mut idx = region.j_set(1).expect("1 is a valid index");
    idx.push(1);
    idx.sort_unstable();
    idx
}

/// Rows `γ(α_j)` for `j ∈ J_1 ∪ {1}`.
pub fn basis_matrix(region: &Region, p: &EllipticParameter) -> Result<DMatrix<f64>> {
    if region.has_repeated_directions() {
        return Err(Error::RepeatedDirections);
    }
    let rows = basis_indices(region);
    let len = region.len();
    let mut a = DMatrix::zeros(rows.len(), len);
    for (i, &j) in rows.iter().enumerate() {
        let g = gamma(region, p, region.alpha(j)).values;
        for (c, v) in g.into_iter().enumerate() {
            a[(i, c)] = v;
        }
    }
    require_rank(&a, region.n())?;
    Ok(a)
}

/// The `n × 2n` matrix `M̃` whose row span is `φ(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledMatrix {
    pub entries: DMatrix<f64>,
    /// Condition number of `AK_n`.
    pub condition: f64,
}

impl DoubledMatrix {
    /// `M̃ = (AK_n)^{-1} A`.
    pub fn from_basis(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let ak = a * k_matrix(n);
        let condition = condition_number(&ak);
        if !condition.is_finite() || condition > CONDITION_SINGULAR {
            return Err(Error::Singular { condition });
        }
        let entries = ak.lu().solve(a).ok_or(Error::Singular { condition })?;
        Ok(Self { entries, condition })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest deviation from `m̃_{i,2i-1} = m̃_{i,2i} = 1` and
    /// `m̃_{i,2j-1} = -m̃_{i,2j}`.
    pub fn structure_residual(&self) -> f64 {
        let n = self.n();
        let e = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (e[(i, 2 * j)], e[(i, 2 * j + 1)]);
                let r = if i == j {
                    (a - 1.0).abs().max((b - 1.0).abs())
                } else {
                    (a + b).abs()
                };
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Boundary correlation matrix `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    #[serde(rename = "M")]
    pub entries: Vec<Vec<f64>>,
    /// Condition number of the solve that produced it, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition: Option<f64>,
}

impl CorrelationMatrix {
    /// `m_ij = (-1)^{i+j+[i<j]} m̃_{i,2j-1}`, unit diagonal.
    pub fn from_doubled(d: &DoubledMatrix) -> Self {
        let n = d.n();
        let entries = (1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| {
                        if i == j {
                            1.0
                        } else {
                            let e = i + j + usize::from(i < j);
                            let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
                            sign * d.entries[(i - 1, 2 * j - 2)]
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            entries,
            condition: Some(d.condition),
        }
    }

    pub fn from_rows(entries: Vec<Vec<f64>>) -> Self {
        Self {
            entries,
            condition: None,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i - 1][j - 1]
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.condition.is_some_and(|c| c > CONDITION_WARNING)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j])
    }

    /// Largest deviation from symmetry and from a unit diagonal.
    pub fn structure_residual(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max((self.entries[i][i] - 1.0).abs());
            for j in 0..n {
                worst = worst.max((self.entries[i][j] - self.entries[j][i]).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `M̃` from whichever basis applies: values of `γ` when all directions are
/// distinct, the derivative basis otherwise.
pub fn doubled_matrix(region: &Region, p: &EllipticParameter) -> Result<DoubledMatrix> {
    let a = if region.has_repeated_directions() {
        alternating_basis(region, p)?
    } else {
        basis_matrix(region, p)?
    };
    DoubledMatrix::from_basis(&a)
}

pub fn correlation_matrix(region: &Region, p: &EllipticParameter) -> Result<CorrelationMatrix> {
    Ok(CorrelationMatrix::from_doubled(&doubled_matrix(region, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numerical_rank, RANK_TOL};
    use crate::region::{random_region, regular_region};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_closed_form(m: f64) -> f64 {
        let kp = (1.0 - m).sqrt();
        1.0 / (kp.sqrt() + (1.0 + kp).sqrt())
    }

    #[test]
    fn k_matrix_pattern() {
        assert_eq!(k_matrix(1), DMatrix::from_row_slice(2, 1, &[0.5, 0.5]));
        let k2 = k_matrix(2);
        assert_eq!(
            k2,
            DMatrix::from_row_slice(4, 2, &[0.5, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.5])
        );
        for c in 0..2 {
            assert_eq!(k2.column(c).sum(), 1.0);
        }
    }

    #[test]
    fn square_basis_entries() {
        let r = regular_region(2).unwrap();
        for &m in &[0.3, -2.0] {
            let p = EllipticParameter::new(m).unwrap();
            let kp = p.kprime();
            let a = basis_matrix(&r, &p).unwrap();
            let (s, e, d) = (
                1.0 / (1.0 + kp).sqrt(),
                1.0 / (kp * (1.0 + kp)).sqrt(),
                1.0 / kp.sqrt(),
            );
            // rows are -γ(0) and -γ(π/4)
            let expect = [[s, d, e, 0.0], [0.0, e, d, s]];
            for i in 0..2 {
                for c in 0..4 {
                    assert!(
                        (a[(i, c)] + expect[i][c]).abs() < 1e-13,
                        "m = {m} ({i}, {c})"
                    );
                }
            }
        }
    }

    #[test]
    fn square_closed_form_holds() {
        let r = regular_region(2).unwrap();
        for &m in &[-0.9, -0.5, 0.0, 0.5, 0.9, -20.0] {
            let p = EllipticParameter::new(m).unwrap();
            let c = correlation_matrix(&r, &p).unwrap();
            assert!(
                (c.get(1, 2) - square_closed_form(m)).abs() < 1e-12,
                "m = {m}"
            );
        }
        let c = correlation_matrix(&r, &EllipticParameter::critical()).unwrap();
        assert!((c.get(1, 2) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn hexagon_basis_rank() {
        let r = regular_region(3).unwrap();
        let a = basis_matrix(&r, &EllipticParameter::critical()).unwrap();
        assert_eq!(numerical_rank(&a, RANK_TOL), 3);
    }

    #[test]
    fn structure_on_random_regions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let r = random_region(rng.random_range(1..=6), &mut rng);
            let p = EllipticParameter::new(rng.random_range(-5.0..0.95)).unwrap();
            let d = doubled_matrix(&r, &p).unwrap();
            assert!(d.structure_residual() < 1e-9);
            let c = CorrelationMatrix::from_doubled(&d);
            assert!(c.structure_residual() < 1e-9);
        }
    }

    #[test]
    fn row_scaling_leaves_doubled_matrix_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let r = random_region(4, &mut rng);
        let p = EllipticParameter::new(0.6).unwrap();
        let a = basis_matrix(&r, &p).unwrap();
        let mut b = a.clone();
        for (i, s) in [3.0, -0.5, 7.0, 1e-3].iter().enumerate() {
            b.row_mut(i).scale_mut(*s);
        }
        let da = DoubledMatrix::from_basis(&a).unwrap();
        let db = DoubledMatrix::from_basis(&b).unwrap();
        assert!((da.entries - db.entries).abs().max() < 1e-10);
    }

    #[test]
    fn repeated_directions_are_rejected() {
        let r = crate::region::alternating_example();
        assert!(matches!(
            basis_matrix(&r, &EllipticParameter::critical()),
            Err(Error::RepeatedDirections)
        ));
    }
}
