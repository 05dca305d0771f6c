//! Regions `(τ, α)`: a fixed-point-free involution on `[2n]` together with a
//! compatible sequence of angles.
//!
//! All public indices are 1-based. Lifted accessors extend `τ` and `α` to all
//! integers via `τ̃(j + 2n) = τ̃(j) + 2n` with `j < τ̃(j) < j + 2n`, and
//! `α̃(j + 2n) = α̃(j) + π`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance of the right-angle condition and of strict angle orderings.
pub const SHAPE_TOL: f64 = 1e-12;
/// Tolerance for deciding that two directions `e^{2iα}` coincide.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    OddLength(usize),
    LengthMismatch { tau: usize, alpha: usize },
    OutOfRange { j: usize, value: usize },
    FixedPoint { j: usize },
    NotInvolution { j: usize, image: usize },
    NonFinite { j: usize },
    RightAngle { j: usize, partner: usize, gap: f64 },
    Ordering { j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Empty => write!(f, "tau is empty"),
            Violation::OddLength(len) => write!(f, "tau has odd length {len}"),
            Violation::LengthMismatch { tau, alpha } => {
                write!(f, "tau has {tau} entries but alpha has {alpha}")
            }
            Violation::OutOfRange { j, value } => {
                write!(f, "tau({j}) = {value} is out of range")
            }
            Violation::FixedPoint { j } => write!(f, "fixed point at j = {j}"),
            Violation::NotInvolution { j, image } => {
                write!(f, "not an involution at j = {j}: tau(tau(j)) = {image}")
            }
            Violation::NonFinite { j } => write!(f, "alpha_{j} is not finite"),
            Violation::RightAngle { j, partner, gap } => write!(
                f,
                "right-angle condition fails at j = {j}: alpha_{partner} - alpha_{j} = {gap}, expected pi/2"
            ),
            Violation::Ordering { j, k } => write!(
                f,
                "ordering condition fails for crossing ({j}, {k}): need alpha_j < alpha_k < alpha_tau(j) < alpha_tau(k)"
            ),
        }
    }
}

fn involution_violations(tau: &[usize]) -> Vec<Violation> {
    let len = tau.len();
    if len == 0 {
        return vec![Violation::Empty];
    }
    let mut out = Vec::new();
    if len % 2 == 1 {
        out.push(Violation::OddLength(len));
    }
    for (idx, &v) in tau.iter().enumerate() {
        let j = idx + 1;
        if v == 0 || v > len {
            out.push(Violation::OutOfRange { j, value: v });
        } else if v == j {
            out.push(Violation::FixedPoint { j });
        } else if tau[v - 1] != j {
            out.push(Violation::NotInvolution {
                j,
                image: tau[v - 1],
            });
        }
    }
    out
}

/// A fixed-point-free involution of `[2n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Involution {
    tau: Vec<usize>,
}

impl Involution {
    pub fn new(tau: Vec<usize>) -> Result<Self> {
        let v = involution_violations(&tau);
        if v.is_empty() {
            Ok(Self { tau })
        } else {
            Err(Error::InvalidRegion(v))
        }
    }

    /// Builds from chords `(a, b)`, in any order.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let len = 2 * pairs.len();
        let mut tau = vec![0; len];
        for &(a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                if x == 0 || x > len {
                    return Err(Error::IndexOutOfRange {
                        index: x as i64,
                        len,
                    });
                }
                tau[x - 1] = y;
            }
        }
        Self::new(tau)
    }

    /// `τ(j) = j + n mod 2n`.
    pub fn regular(n: usize) -> Self {
        let len = 2 * n;
        Self {
            tau: (1..=len).map(|j| (j + n - 1) % len + 1).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut points: Vec<usize> = (1..=2 * n).collect();
        points.shuffle(rng);
        let mut tau = vec![0; 2 * n];
        for pair in points.chunks(2) {
            tau[pair[0] - 1] = pair[1];
            tau[pair[1] - 1] = pair[0];
        }
        Self { tau }
    }

    /// Every fixed-point-free involution of `[2n]`.
    pub fn all(n: usize) -> Vec<Self> {
        fn rec(tau: &mut Vec<usize>, out: &mut Vec<Involution>) {
            let Some(first) = tau.iter().position(|&v| v == 0) else {
                out.push(Involution { tau: tau.clone() });
                return;
            };
            for other in first + 1..tau.len() {
                if tau[other] == 0 {
                    tau[first] = other + 1;
                    tau[other] = first + 1;
                    rec(tau, out);
                    tau[first] = 0;
                    tau[other] = 0;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut vec![0; 2 * n], &mut out);
        out
    }

    pub fn n(&self) -> usize {
        self.tau.len() / 2
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn get(&self, j: usize) -> usize {
        self.tau[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.tau
    }

    /// Chords `(j, τ(j))` with `j < τ(j)`, ordered by `j`.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        (1..=self.len())
            .filter(|&j| j < self.get(j))
            .map(|j| (j, self.get(j)))
            .collect()
    }

    pub fn tau_lift(&self, j: i64) -> i64 {
        let len = self.len() as i64;
        let q = (j - 1).div_euclid(len);
        let r = (j - 1).rem_euclid(len) + 1;
        let d = (self.get(r as usize) as i64 - r).rem_euclid(len);
        r + d + q * len
    }

    /// Pairs `(j, k)` with `j < k < τ(j) < τ(k)`.
    pub fn crossings(&self) -> Vec<(usize, usize)> {
        let chords = self.chords();
        let mut out = Vec::new();
        for &(j, tj) in &chords {
            for &(k, tk) in &chords {
                if j < k && k < tj && tj < tk {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Indices `j ∈ [1, 2n]` with `j + 1 < τ̃(j) < τ̃(j + 1)`.
    pub fn tau_descents(&self) -> Vec<usize> {
        (1..=self.len())
            .filter(|&j| {
                let (a, b) = (self.tau_lift(j as i64), self.tau_lift(j as i64 + 1));
                (j as i64) + 1 < a && a < b
            })
            .collect()
    }
}

/// A region `(τ, α)`. Construction through [`Region::new`] validates; the
/// unchecked [`Region::from_parts`] exists so that invalid input can be
/// reported by [`Region::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    tau: Vec<usize>,
    alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub n: usize,
    pub tau: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
}

impl RegionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validated region; a missing `alpha` is filled by [`canonical_shape`].
    pub fn into_region(self) -> Result<Region> {
        if self.tau.len() != 2 * self.n {
            return Err(Error::InvalidRegion(vec![Violation::LengthMismatch {
                tau: self.tau.len(),
                alpha: 2 * self.n,
            }]));
        }
        match self.alpha {
            Some(alpha) => Region::new(self.tau, alpha),
            None => canonical_shape(&Involution::new(self.tau)?),
        }
    }
}

impl From<&Region> for RegionSpec {
    fn from(r: &Region) -> Self {
        Self {
            n: r.n(),
            tau: r.tau.clone(),
            alpha: Some(r.alpha.clone()),
        }
    }
}

fn cyclic(a: usize, b: usize, c: usize, len: usize) -> bool {
    let db = (b + len - a) % len;
    let dc = (c + len - a) % len;
    db != 0 && dc != 0 && db < dc
}

fn same_direction(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(PI);
    d < DIRECTION_TOL || PI - d < DIRECTION_TOL
}

impl Region {
    pub fn new(tau: Vec<usize>, alpha: Vec<f64>) -> Result<Self> {
        let r = Self::from_parts(tau, alpha);
        let v = r.validate();
        if v.is_empty() {
            Ok(r)
        } else {
            Err(Error::InvalidRegion(v))
        }
    }

    pub fn from_parts(tau: Vec<usize>, alpha: Vec<f64>) -> Self {
        Self { tau, alpha }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = involution_violations(&self.tau);
        if self.alpha.len() != self.tau.len() {
            out.push(Violation::LengthMismatch {
                tau: self.tau.len(),
                alpha: self.alpha.len(),
            });
        }
        if !out.is_empty() {
            return out;
        }
        for (idx, a) in self.alpha.iter().enumerate() {
            if !a.is_finite() {
                out.push(Violation::NonFinite { j: idx + 1 });
            }
        }
        if !out.is_empty() {
            return out;
        }
        let chords = self.involution().chords();
        for &(j, tj) in &chords {
            let gap = self.alpha(tj) - self.alpha(j);
            if (gap - FRAC_PI_2).abs() > SHAPE_TOL {
                out.push(Violation::RightAngle {
                    j,
                    partner: tj,
                    gap,
                });
            }
        }
        for (j, k) in self.crossings() {
            let (tj, tk) = (self.tau(j), self.tau(k));
            let a = [self.alpha(j), self.alpha(k), self.alpha(tj), self.alpha(tk)];
            if !a.windows(2).all(|w| w[0] + SHAPE_TOL < w[1]) {
                out.push(Violation::Ordering { j, k });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn n(&self) -> usize {
        self.tau.len() / 2
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn tau(&self, j: usize) -> usize {
        self.tau[j - 1]
    }

    pub fn alpha(&self, j: usize) -> f64 {
        self.alpha[j - 1]
    }

    pub fn taus(&self) -> &[usize] {
        &self.tau
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn involution(&self) -> Involution {
        Involution {
            tau: self.tau.clone(),
        }
    }

    fn check_index(&self, p: usize) -> Result<()> {
        if p == 0 || p > self.len() {
            Err(Error::IndexOutOfRange {
                index: p as i64,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Reduces an integer index to its representative in `[1, 2n]`.
    pub fn reduce(&self, j: i64) -> usize {
        ((j - 1).rem_euclid(self.len() as i64) + 1) as usize
    }

    pub fn tau_lift(&self, j: i64) -> i64 {
        let len = self.len() as i64;
        let q = (j - 1).div_euclid(len);
        let r = (j - 1).rem_euclid(len) + 1;
        let d = (self.tau(r as usize) as i64 - r).rem_euclid(len);
        r + d + q * len
    }

    pub fn alpha_lift(&self, j: i64) -> f64 {
        let len = self.len() as i64;
        let q = (j - 1).div_euclid(len);
        let r = (j - 1).rem_euclid(len) + 1;
        self.alpha(r as usize) + q as f64 * PI
    }

    /// `J_p = { j : (p, j, τ(j)) in strict cyclic order }`, ascending.
    pub fn j_set(&self, p: usize) -> Result<Vec<usize>> {
        self.check_index(p)?;
        let len = self.len();
        Ok((1..=len)
            .filter(|&j| cyclic(p, j, self.tau(j), len))
            .collect())
    }

    /// `J̃_p = { τ̃(j) : p - 2n < j < p < τ̃(j) }`, ascending, inside
    /// `(p, p + 2n)`. Accepts any integer `p`.
    pub fn j_set_lifted(&self, p: i64) -> Vec<i64> {
        let len = self.len() as i64;
        let mut out: Vec<i64> = (p - len + 1..p)
            .map(|j| self.tau_lift(j))
            .filter(|&tj| tj > p)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn crossings(&self) -> Vec<(usize, usize)> {
        self.involution().crossings()
    }

    pub fn tau_descents(&self) -> Vec<usize> {
        self.involution().tau_descents()
    }

    /// The swapped region `R·t_j` for a `τ`-descent `j`. The swap acts on
    /// lifted positions, so for `j = 2n` it exchanges `2n` and `2n + 1`.
    pub fn apply_descent(&self, j: usize) -> Result<Region> {
        if !self.tau_descents().contains(&j) {
            return Err(Error::NotADescent(j));
        }
        let len = self.len() as i64;
        let j = j as i64;
        let swap = |x: i64| -> i64 {
            let r = (x - j).rem_euclid(len);
            if r == 0 {
                x + 1
            } else if r == 1 {
                x - 1
            } else {
                x
            }
        };
        let mut tau = Vec::with_capacity(self.len());
        let mut alpha = Vec::with_capacity(self.len());
        for l in 1..=len {
            alpha.push(self.alpha_lift(swap(l)));
            tau.push(self.reduce(swap(self.tau_lift(swap(l)))));
        }
        let out = Region::from_parts(tau, alpha);
        let v = out.validate();
        if v.is_empty() {
            Ok(out)
        } else {
            Err(Error::InvalidRegion(v))
        }
    }

    /// One quadruple `i < j < k < l` with `v_i = -v_j = v_k = -v_l`,
    /// where `v = e^{2iα}`.
    pub fn alternation_witness(&self) -> Option<[usize; 4]> {
        let len = self.len();
        let a = |x: usize| self.alpha(x);
        let opposite = |x: usize, y: usize| same_direction(a(x), a(y) + FRAC_PI_2);
        for i in 1..=len {
            for j in i + 1..=len {
                if !opposite(i, j) {
                    continue;
                }
                for k in j + 1..=len {
                    if !same_direction(a(i), a(k)) {
                        continue;
                    }
                    for l in k + 1..=len {
                        if same_direction(a(j), a(l)) {
                            return Some([i, j, k, l]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_alternating(&self) -> bool {
        self.alternation_witness().is_some()
    }

    /// Indices met going from `p` to `τ(p)` counterclockwise, both included.
    pub fn supp(&self, p: usize) -> Result<Vec<usize>> {
        self.check_index(p)?;
        let len = self.len();
        let steps = (self.tau(p) + len - p) % len;
        Ok((0..=steps).map(|s| (p - 1 + s) % len + 1).collect())
    }

    /// `m_p = #{ j ∈ J_p : v_j = v_p }`.
    pub fn multiplicity(&self, p: usize) -> Result<usize> {
        let jp = self.j_set(p)?;
        Ok(jp
            .into_iter()
            .filter(|&j| same_direction(self.alpha(j), self.alpha(p)))
            .count())
    }

    /// Whether two boundary vectors point the same way.
    pub fn has_repeated_directions(&self) -> bool {
        let len = self.len();
        (1..=len).any(|i| (i + 1..=len).any(|j| same_direction(self.alpha(i), self.alpha(j))))
    }

    /// Relabelled region with `α*_l = α̃_{l-1}` and `τ*(l) = τ̃(l-1) + 1`,
    /// on which the dual curve is evaluated.
    pub fn shifted(&self) -> Region {
        let len = self.len() as i64;
        let alpha = (1..=len).map(|l| self.alpha_lift(l - 1)).collect();
        let tau = (1..=len)
            .map(|l| self.reduce(self.tau_lift(l - 1) + 1))
            .collect();
        Region::from_parts(tau, alpha)
    }
}

/// The regular `2n`-gon: `τ(j) = j + n mod 2n`, `α_j = (j - 1)π/(2n)`.
pub fn regular_region(n: usize) -> Result<Region> {
    if n == 0 {
        return Err(Error::InvalidRegion(vec![Violation::Empty]));
    }
    let step = PI / (2 * n) as f64;
    let alpha = (0..2 * n).map(|j| j as f64 * step).collect();
    Region::new(Involution::regular(n).tau, alpha)
}

/// A `τ`-shape for `inv`. The chord whose first endpoint has rank `r` among
/// first endpoints gets `α = rπ/(2n)` at that endpoint and `α + π/2` at the
/// other, so every crossing pair has `0 < α_k - α_j < π/2`.
pub fn canonical_shape(inv: &Involution) -> Result<Region> {
    let step = PI / inv.len() as f64;
    let alphas: Vec<f64> = (0..inv.n()).map(|r| r as f64 * step).collect();
    shape_from_starts(inv, &alphas)
}

/// A random `τ`-shape: start angles are increasing with random gaps and a
/// total spread below `0.45π`, so all directions are distinct.
pub fn random_shape<R: Rng + ?Sized>(inv: &Involution, rng: &mut R) -> Result<Region> {
    let n = inv.n();
    let gaps: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let offset = rng.random_range(-1.0..1.0);
    let mut acc = 0.0;
    let alphas = gaps
        .iter()
        .map(|g| {
            let a = offset + 0.45 * PI * acc / total;
            acc += g;
            a
        })
        .collect::<Vec<_>>();
    shape_from_starts(inv, &alphas)
}

fn shape_from_starts(inv: &Involution, starts: &[f64]) -> Result<Region> {
    let mut alpha = vec![0.0; inv.len()];
    for (rank, (j, tj)) in inv.chords().into_iter().enumerate() {
        alpha[j - 1] = starts[rank];
        alpha[tj - 1] = starts[rank] + FRAC_PI_2;
    }
    let r = Region::from_parts(inv.as_slice().to_vec(), alpha);
    let v = r.validate();
    if v.is_empty() {
        Ok(r)
    } else {
        Err(Error::InfeasibleShape(
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

/// A random valid region with `n` chords and pairwise distinct directions.
pub fn random_region<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Region {
    let inv = Involution::random(n, rng);
    random_shape(&inv, rng).expect("increasing starts within pi/2 always form a shape")
}

/// Smallest involution (by `n`, then lexicographically) that has crossings
/// but no `τ`-descent.
pub fn find_crossing_without_descent(max_n: usize) -> Option<Involution> {
    (1..=max_n).find_map(|n| {
        let mut all = Involution::all(n);
        all.sort_by(|a, b| a.tau.cmp(&b.tau));
        all.into_iter()
            .find(|inv| !inv.crossings().is_empty() && inv.tau_descents().is_empty())
    })
}

/// An alternating region with `n = 4`: chords `(1,3)`, `(2,4)`, `(5,6)`,
/// `(7,8)` and `v_1 = -v_2 = v_5 = -v_6`.
pub fn alternating_example() -> Region {
    let q = FRAC_PI_2 / 2.0;
    Region::new(
        vec![3, 4, 1, 2, 6, 5, 8, 7],
        vec![
            0.0,
            q,
            FRAC_PI_2,
            q + FRAC_PI_2,
            0.0,
            FRAC_PI_2,
            0.0,
            FRAC_PI_2,
        ],
    )
    .expect("alternating example is a valid shape")
}

/// Moves both endpoints of each chord by one shared offset, which keeps the
/// right-angle condition exact.
pub fn perturb_chords(region: &Region, offsets: &[f64]) -> Result<Region> {
    let mut alpha = region.alphas().to_vec();
    for (rank, (j, tj)) in region.involution().chords().into_iter().enumerate() {
        let e = offsets.get(rank).copied().unwrap_or(0.0);
        alpha[j - 1] += e;
        alpha[tj - 1] += e;
    }
    Region::new(region.taus().to_vec(), alpha)
}
