use crate::elliptic::{EllipticParameter, JacobiKind, JacobiPolynomial};
use crate::region::Region;

/// `γ_R(t) ∈ ℝ^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub values: Vec<f64>,
}

/// One factor `f(t - shift)` of a curve coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub kind: JacobiKind,
    pub shift: f64,
    /// `+1` for the factor itself, `-1` for its reciprocal.
    pub power: i32,
}

/// A curve coordinate written as `constant · ∏ factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredCoordinate {
    pub constant: f64,
    pub factors: Vec<Factor>,
}

/// Factors of `γ_idx` for any integer index, in the lifted form
/// `Π_idx(t) · ∏_{l ∈ J̃_idx} sn(t - α̃_l)`.
pub fn coordinate_factors(region: &Region, p: &EllipticParameter, idx: i64) -> FactoredCoordinate {
    let top = 2 * idx.div_euclid(2);
    let mut factors = Vec::new();
    let root_kp = p.kprime().sqrt();
    let constant = root_kp.powi(-(top as i32));
    if top >= 0 {
        for j in 1..=top {
            factors.push(Factor {
                kind: JacobiKind::Dn,
                shift: region.alpha_lift(j),
                power: 1,
            });
        }
    } else {
        for j in top + 1..=0 {
            factors.push(Factor {
                kind: JacobiKind::Dn,
                shift: region.alpha_lift(j),
                power: -1,
            });
        }
    }
    for l in region.j_set_lifted(idx) {
        factors.push(Factor {
            kind: JacobiKind::Sn,
            shift: region.alpha_lift(l),
            power: 1,
        });
    }
    FactoredCoordinate { constant, factors }
}

impl FactoredCoordinate {
    pub fn eval(&self, p: &EllipticParameter, t: f64) -> f64 {
        self.factors.iter().fold(self.constant, |acc, f| {
            let v = p.eval(t - f.shift).get(f.kind);
            if f.power > 0 {
                acc * v
            } else {
                acc / v
            }
        })
    }

    /// Derivatives of orders `0..=order` at `t` by the general Leibniz rule.
    /// Reciprocal factors are not differentiated; they only occur for
    /// indices `≤ 0`.
    pub fn derivatives(&self, p: &EllipticParameter, t: f64, order: usize) -> Vec<f64> {
        let mut acc = vec![0.0; order + 1];
        acc[0] = self.constant;
        for f in &self.factors {
            assert!(
                f.power > 0,
                "derivatives of reciprocal factors are not supported"
            );
            let jac = p.eval(t - f.shift);
            let mut poly = JacobiPolynomial::of(f.kind);
            let mut d = Vec::with_capacity(order + 1);
            for _ in 0..=order {
                d.push(poly.eval(&jac));
                poly = poly.derivative(p);
            }
            let mut next = vec![0.0; order + 1];
            for (k, slot) in next.iter_mut().enumerate() {
                let mut binom = 1.0;
                for a in 0..=k {
                    *slot += binom * acc[k - a] * d[a];
                    binom = binom * (k - a) as f64 / (a + 1) as f64;
                }
            }
            acc = next;
        }
        acc
    }
}

/// Lifted coordinate `γ_idx(t)` for any integer index.
pub fn gamma_coord(region: &Region, p: &EllipticParameter, t: f64, idx: i64) -> f64 {
    coordinate_factors(region, p, idx).eval(p, t)
}

pub fn gamma(region: &Region, p: &EllipticParameter, t: f64) -> CurveSample {
    let values = (1..=region.len() as i64)
        .map(|idx| gamma_coord(region, p, t, idx))
        .collect();
    CurveSample { t, values }
}

/// `d^order γ / dt^order` at `t`.
pub fn gamma_derivative(region: &Region, p: &EllipticParameter, t: f64, order: usize) -> Vec<f64> {
    (1..=region.len() as i64)
        .map(|idx| coordinate_factors(region, p, idx).derivatives(p, t, order)[order])
        .collect()
}

/// `Π_idx(t) = ∏_{j=1}^{2⌊idx/2⌋} dn(t - α̃_j)/√k'` for `idx ∈ [1, 2n]`.
pub fn pi_product(region: &Region, p: &EllipticParameter, t: f64, idx: usize) -> f64 {
    let root_kp = p.kprime().sqrt();
    (1..=2 * (idx / 2))
        .map(|j| p.dn(t - region.alpha(j)) / root_kp)
        .product()
}

/// Same product written as `∏_{j=1}^{⌊idx/2⌋} dn(t - α_{2j}) / dn(t - α̃_{τ̃(2j-1)})`.
pub fn pi_product_ratio(region: &Region, p: &EllipticParameter, t: f64, idx: usize) -> f64 {
    (1..=idx / 2)
        .map(|j| {
            let partner = region.tau_lift(2 * j as i64 - 1);
            p.dn(t - region.alpha(2 * j)) / p.dn(t - region.alpha_lift(partner))
        })
        .product()
}

/// `γ_idx(t) = (-1)^{|J_idx ∩ [idx]|} Π_idx(t) ∏_{j ∈ J_idx} sn(t - α_j)`,
/// using unlifted angles.
pub fn gamma_signed(region: &Region, p: &EllipticParameter, t: f64) -> CurveSample {
    let values = (1..=region.len())
        .map(|idx| {
            let jp = region.j_set(idx).expect("index in range");
            let sign = if jp.iter().filter(|&&j| j < idx).count() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let sn: f64 = jp.iter().map(|&j| p.sn(t - region.alpha(j))).product();
            sign * pi_product(region, p, t, idx) * sn
        })
        .collect();
    CurveSample { t, values }
}
