//! Straight-chord realizations of a region's traintracks inside the unit
//! disk, their cells, and the Ising graphs on black and white cells.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::region::Region;

pub const MAX_JITTER_ATTEMPTS: usize = 32;
pub const JITTER: f64 = 0.01;
/// Minimum separation required between crossings, chords and the circle.
pub const GENERIC_MARGIN: f64 = 1e-9;

type Point = [f64; 2];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let s = ((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1]);
    let s = s.clamp(0.0, 1.0);
    dist(x, [a[0] + s * ab[0], a[1] + s * ab[1]])
}

/// A chord `(start, end)` with `start < end` in boundary labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chord {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    /// Indices into the chord list, `first` being the chord whose start
    /// label is smaller.
    pub first: usize,
    pub second: usize,
    pub point: Point,
    /// Position along each chord, in `(0, 1)`.
    pub along: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct ChordArrangement {
    region: Region,
    pub seed: u64,
    /// Angles of `d_1, …, d_2n`, counterclockwise.
    pub endpoint_angles: Vec<f64>,
    pub chords: Vec<Chord>,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Per chord: `true` when the cell lies left of the chord oriented from
    /// `start` to `end`.
    pub sign: Vec<bool>,
    pub black: bool,
    pub point: Point,
}

impl ChordArrangement {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn endpoint(&self, label: usize) -> Point {
        let a = self.endpoint_angles[label - 1];
        [a.cos(), a.sin()]
    }

    fn side(&self, chord: usize, x: Point) -> f64 {
        let c = self.chords[chord];
        let (a, b) = (self.endpoint(c.start), self.endpoint(c.end));
        cross(sub(b, a), sub(x, a))
    }

    pub fn sign_vector(&self, x: Point) -> Vec<bool> {
        (0..self.chords.len())
            .map(|c| self.side(c, x) > 0.0)
            .collect()
    }

    /// Point inside the cell touching the boundary arc `(d_i, d_{i+1})`.
    pub fn arc_sample(&self, i: usize) -> Point {
        let len = self.endpoint_angles.len();
        let j = i % len + 1;
        let a = self.endpoint_angles[i - 1];
        let mut b = self.endpoint_angles[j - 1];
        if b <= a {
            b += 2.0 * PI;
        }
        let mid = 0.5 * (a + b);
        let (p, q) = (self.endpoint(i), self.endpoint(j));
        [
            0.5 * (mid.cos() + 0.5 * (p[0] + q[0])),
            0.5 * (mid.sin() + 0.5 * (p[1] + q[1])),
        ]
    }

    fn chord_direction(&self, chord: usize) -> Point {
        let c = self.chords[chord];
        let d = sub(self.endpoint(c.end), self.endpoint(c.start));
        let l = d[0].hypot(d[1]);
        [d[0] / l, d[1] / l]
    }

    /// Smallest of the distances between crossings, from crossings to other
    /// chords, and from crossings to the circle.
    fn clearance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (i, x) in self.crossings.iter().enumerate() {
            m = m.min(1.0 - x.point[0].hypot(x.point[1]));
            for y in &self.crossings[i + 1..] {
                m = m.min(dist(x.point, y.point));
            }
            for (c, chord) in self.chords.iter().enumerate() {
                if c != x.first && c != x.second {
                    m = m.min(point_segment_distance(
                        x.point,
                        self.endpoint(chord.start),
                        self.endpoint(chord.end),
                    ));
                }
            }
        }
        m
    }

    /// The four points around a crossing, one per incident cell, in the
    /// order `(+,+), (+,-), (-,-), (-,+)` along the two chord directions.
    pub fn quadrant_samples(&self, crossing: usize) -> [Point; 4] {
        let x = &self.crossings[crossing];
        let eps = 1e-4 * self.clearance().min(1.0);
        let (u, v) = (
            self.chord_direction(x.first),
            self.chord_direction(x.second),
        );
        let at = |a: f64, b: f64| {
            [
                x.point[0] + eps * (a * u[0] + b * v[0]),
                x.point[1] + eps * (a * u[1] + b * v[1]),
            ]
        };
        [at(1.0, 1.0), at(1.0, -1.0), at(-1.0, -1.0), at(-1.0, 1.0)]
    }

    /// Crossing order along each chord, as lists of the other chord's index.
    pub fn commutation_signature(&self) -> Vec<Vec<usize>> {
        (0..self.chords.len())
            .map(|c| {
                let mut hits: Vec<(f64, usize)> = self
                    .crossings
                    .iter()
                    .filter_map(|x| {
                        if x.first == c {
                            Some((x.along[0], x.second))
                        } else if x.second == c {
                            Some((x.along[1], x.first))
                        } else {
                            None
                        }
                    })
                    .collect();
                hits.sort_by(|a, b| a.0.total_cmp(&b.0));
                hits.into_iter().map(|h| h.1).collect()
            })
            .collect()
    }
}

/// Endpoints at `π(2m-1)/(2n)` plus uniform jitter of at most `0.01` rad
/// drawn from a ChaCha8 stream seeded by `seed`; redrawn up to 32 times
/// until the arrangement is generic.
pub fn build_arrangement(region: &Region, seed: u64) -> Result<ChordArrangement> {
    let violations = region.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidRegion(violations));
    }
    let len = region.len();
    let chords: Vec<Chord> = region
        .involution()
        .chords()
        .into_iter()
        .map(|(start, end)| Chord { start, end })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_JITTER_ATTEMPTS {
        let endpoint_angles: Vec<f64> = (1..=len)
            .map(|m| PI * (2 * m - 1) as f64 / len as f64 + rng.random_range(-JITTER..=JITTER))
            .collect();
        let mut arr = ChordArrangement {
            region: region.clone(),
            seed,
            endpoint_angles,
            chords: chords.clone(),
            crossings: Vec::new(),
        };
        arr.crossings = find_crossings(&arr);
        if arr.crossings.is_empty() || arr.clearance() > GENERIC_MARGIN {
            return Ok(arr);
        }
    }
    Err(Error::NotGeneric {
        seed,
        attempts: MAX_JITTER_ATTEMPTS,
    })
}

fn find_crossings(arr: &ChordArrangement) -> Vec<Crossing> {
    let mut out = Vec::new();
    for (a, ca) in arr.chords.iter().enumerate() {
        for (b, cb) in arr.chords.iter().enumerate() {
            if !(ca.start < cb.start && cb.start < ca.end && ca.end < cb.end) {
                continue;
            }
            let (p, r) = (
                arr.endpoint(ca.start),
                sub(arr.endpoint(ca.end), arr.endpoint(ca.start)),
            );
            let (q, s) = (
                arr.endpoint(cb.start),
                sub(arr.endpoint(cb.end), arr.endpoint(cb.start)),
            );
            let denom = cross(r, s);
            let u = cross(sub(q, p), s) / denom;
            let v = cross(sub(q, p), r) / denom;
            out.push(Crossing {
                first: a,
                second: b,
                point: [p[0] + u * r[0], p[1] + u * r[1]],
                along: [u, v],
            });
        }
    }
    out
}

/// All cells, identified by sign vectors. The cell at arc `(d_1, d_2)` is
/// black and colors alternate across every chord.
pub fn enumerate_cells(arr: &ChordArrangement) -> Result<Vec<Cell>> {
    let len = arr.endpoint_angles.len();
    let mut samples: Vec<Point> = (1..=len).map(|i| arr.arc_sample(i)).collect();
    for x in 0..arr.crossings.len() {
        samples.extend(arr.quadrant_samples(x));
    }
    let reference = arr.sign_vector(arr.arc_sample(1));
    let mut cells: Vec<Cell> = Vec::new();
    for pt in samples {
        let sign = arr.sign_vector(pt);
        if cells.iter().any(|c| c.sign == sign) {
            continue;
        }
        let flips = sign.iter().zip(&reference).filter(|(a, b)| a != b).count();
        cells.push(Cell {
            sign,
            black: flips % 2 == 0,
            point: pt,
        });
    }
    let expected = 1 + arr.chords.len() + arr.crossings.len();
    if cells.len() != expected {
        return Err(Error::Geometry(format!(
            "found {} cells, expected {expected}",
            cells.len()
        )));
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub crossing: usize,
    pub theta: f64,
    pub coupling: f64,
}

/// Ising graph on the cells of one color.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingGraph {
    /// Cell index of each vertex.
    pub cells: Vec<usize>,
    pub edges: Vec<Edge>,
    /// Vertex carrying each boundary spin `b_1, …, b_n`.
    pub boundary: Vec<usize>,
    pub m: f64,
}

impl IsingGraph {
    /// A graph given directly by its couplings, mainly for tests.
    pub fn from_couplings(
        vertices: usize,
        edges: &[(usize, usize, f64)],
        boundary: Vec<usize>,
    ) -> Self {
        Self {
            cells: (0..vertices).collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(u, v, coupling))| Edge {
                    u,
                    v,
                    crossing: i,
                    theta: f64::NAN,
                    coupling,
                })
                .collect(),
            boundary,
            m: f64::NAN,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    /// Pairs of boundary labels sitting on one vertex.
    pub fn contracted_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.boundary.len() {
            for j in i + 1..self.boundary.len() {
                if self.boundary[i] == self.boundary[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for e in &self.edges {
                let y = if e.u == x {
                    e.v
                } else if e.v == x {
                    e.u
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `J(θ) = ½ ln((1 + sn θ)/cn θ)`.
pub fn coupling(theta: f64, p: &EllipticParameter) -> f64 {
    let f = p.eval(theta);
    0.5 * ((1.0 + f.sn) / f.cn).ln()
}

/// Half-angle of the black edge at a crossing of the chords starting at
/// `j < k`: `α_τ(j) - α_k` when the black cells fill the wedges facing the
/// arcs `d_j → d_k` and `d_τ(j) → d_τ(k)`, `α_k - α_j` otherwise.
fn black_theta(arr: &ChordArrangement, crossing: usize, black_sign: &[bool]) -> f64 {
    let x = &arr.crossings[crossing];
    let (cj, ck) = (arr.chords[x.first], arr.chords[x.second]);
    let r = arr.region();
    let k_side = arr.side(x.first, arr.endpoint(ck.start)) > 0.0;
    let j_side = arr.side(x.second, arr.endpoint(cj.start)) > 0.0;
    let in_first = black_sign[x.first] == k_side;
    let in_second = black_sign[x.second] == j_side;
    if in_first == in_second {
        r.alpha(cj.end) - r.alpha(ck.start)
    } else {
        r.alpha(ck.start) - r.alpha(cj.start)
    }
}

fn build_graph(
    arr: &ChordArrangement,
    cells: &[Cell],
    black: bool,
    p: &EllipticParameter,
) -> Result<IsingGraph> {
    let vertex_cells: Vec<usize> = (0..cells.len())
        .filter(|&c| cells[c].black == black)
        .collect();
    let vertex_of = |sign: &[bool]| -> Result<usize> {
        vertex_cells
            .iter()
            .position(|&c| cells[c].sign == sign)
            .ok_or_else(|| Error::Geometry("sample point in an unknown cell".into()))
    };
    let mut edges = Vec::new();
    for x in 0..arr.crossings.len() {
        let signs: Vec<Vec<bool>> = arr
            .quadrant_samples(x)
            .iter()
            .map(|&pt| arr.sign_vector(pt))
            .collect();
        let colors: Vec<bool> = signs
            .iter()
            .map(|s| {
                cells
                    .iter()
                    .find(|c| &c.sign == s)
                    .map(|c| c.black)
                    .ok_or_else(|| Error::Geometry("sample point in an unknown cell".into()))
            })
            .collect::<Result<_>>()?;
        if colors.iter().filter(|&&b| b).count() != 2
            || colors[0] != colors[2]
            || colors[1] != colors[3]
        {
            return Err(Error::Geometry(format!(
                "crossing {x} is not surrounded by alternating colors"
            )));
        }
        let (a, b) = if colors[0] == black { (0, 2) } else { (1, 3) };
        let black_idx = if colors[0] { 0 } else { 1 };
        let theta_black = black_theta(arr, x, &signs[black_idx]);
        let theta = if black {
            theta_black
        } else {
            FRAC_PI_2 - theta_black
        };
        edges.push(Edge {
            u: vertex_of(&signs[a])?,
            v: vertex_of(&signs[b])?,
            crossing: x,
            theta,
            coupling: coupling(theta, p),
        });
    }
    let n = arr.chords.len();
    let boundary = (1..=n)
        .map(|i| {
            let arc = if black {
                2 * i - 1
            } else if i == 1 {
                2 * n
            } else {
                2 * i - 2
            };
            vertex_of(&arr.sign_vector(arr.arc_sample(arc)))
        })
        .collect::<Result<_>>()?;
    Ok(IsingGraph {
        cells: vertex_cells,
        edges,
        boundary,
        m: p.m(),
    })
}

/// Graph on black cells with boundary `b_i` at arc `(d_{2i-1}, d_{2i})`,
/// couplings at parameter `p`.
pub fn build_black_graph(arr: &ChordArrangement, p: &EllipticParameter) -> Result<IsingGraph> {
    let cells = enumerate_cells(arr)?;
    build_graph(arr, &cells, true, p)
}

/// Dual graph on white cells with boundary at arcs `(d_{2i-2}, d_{2i-1})`
/// (`d_0 = d_2n`), half-angles `π/2 - θ_e` and couplings at the dual of `p`.
pub fn build_white_graph(arr: &ChordArrangement, p: &EllipticParameter) -> Result<IsingGraph> {
    let cells = enumerate_cells(arr)?;
    build_graph(arr, &cells, false, &p.dual())
}

/// `max_e |sinh(2J_e) sinh(2J*_e) - 1|` over matching edges of a black
/// graph and its white dual.
pub fn kramers_wannier_residual(black: &IsingGraph, white: &IsingGraph) -> f64 {
    black
        .edges
        .iter()
        .zip(&white.edges)
        .map(|(e, f)| {
            debug_assert_eq!(e.crossing, f.crossing);
            ((2.0 * e.coupling).sinh() * (2.0 * f.coupling).sinh() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ArrangementDump {
    pub seed: u64,
    pub endpoint_angles: Vec<f64>,
    pub chords: Vec<Chord>,
    pub crossings: Vec<Crossing>,
    pub cells: Vec<Cell>,
    pub black_graph: IsingGraph,
}

pub fn dump(arr: &ChordArrangement, p: &EllipticParameter) -> Result<ArrangementDump> {
    let cells = enumerate_cells(arr)?;
    let black_graph = build_graph(arr, &cells, true, p)?;
    Ok(ArrangementDump {
        seed: arr.seed,
        endpoint_angles: arr.endpoint_angles.clone(),
        chords: arr.chords.clone(),
        crossings: arr.crossings.clone(),
        cells,
        black_graph,
    })
}

/// First seed at or after `start` whose arrangement has a commutation
/// signature different from `reference`.
pub fn find_other_class(
    region: &Region,
    reference: &[Vec<usize>],
    start: u64,
    limit: u64,
) -> Option<ChordArrangement> {
    (start..start + limit)
        .filter_map(|s| build_arrangement(region, s).ok())
        .find(|a| a.commutation_signature() != reference)
}
