//! Exact boundary correlations by summing over every spin configuration.

use serde::Serialize;

use crate::arrangement::{build_arrangement, build_black_graph, IsingGraph};
use crate::correlations::{correlation_matrix, CorrelationMatrix};
use crate::elliptic::EllipticParameter;
use crate::error::{Error, Result};
use crate::region::Region;

pub const MAX_ORACLE_VERTICES: usize = 24;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub log_z: f64,
    pub correlations: CorrelationMatrix,
}

/// `⟨σ_{b_i} σ_{b_j}⟩` under `P(σ) ∝ exp(Σ_e J_e σ_u σ_v)`, with one spin
/// fixed to `+1` (the measure is flip-symmetric).
pub fn exact_correlations(graph: &IsingGraph) -> Result<OracleResult> {
    enumerate(graph, true)
}

/// Same sum without gauge fixing; doubles the work.
pub fn exact_correlations_ungauged(graph: &IsingGraph) -> Result<OracleResult> {
    enumerate(graph, false)
}

fn enumerate(graph: &IsingGraph, gauge_fixed: bool) -> Result<OracleResult> {
    let v = graph.vertex_count();
    if v > MAX_ORACLE_VERTICES {
        return Err(Error::OracleTooLarge {
            vertices: v,
            limit: MAX_ORACLE_VERTICES,
        });
    }
    let nb = graph.boundary.len();
    if v == 0 {
        return Ok(OracleResult {
            log_z: 0.0,
            correlations: CorrelationMatrix::from_rows(vec![vec![1.0; nb]; nb]),
        });
    }

    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); v];
    for e in &graph.edges {
        adj[e.u].push((e.v, e.coupling));
        adj[e.v].push((e.u, e.coupling));
    }
    // Energies are shifted by the all-plus energy so every weight is ≤ 1
    // and the all-plus weight is exactly 1.
    let shift: f64 = graph.edges.iter().map(|e| e.coupling).sum();

    // Boundary configurations are accumulated by pattern, keyed by the
    // distinct boundary vertices.
    let mut distinct: Vec<usize> = graph.boundary.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let slot: Vec<Option<usize>> = (0..v)
        .map(|x| distinct.iter().position(|&d| d == x))
        .collect();
    let mut pattern_weight = vec![0.0_f64; 1 << distinct.len()];

    let free = if gauge_fixed { v - 1 } else { v };
    let first_free = v - free;
    let mut spin = vec![1i8; v];
    let mut energy = shift;
    let mut pattern = 0usize;
    let total: u64 = 1 << free;
    for step in 0..total {
        if step > 0 {
            let x = first_free + step.trailing_zeros() as usize;
            let local: f64 = adj[x].iter().map(|&(y, j)| j * f64::from(spin[y])).sum();
            energy -= 2.0 * f64::from(spin[x]) * local;
            spin[x] = -spin[x];
            if let Some(s) = slot[x] {
                pattern ^= 1 << s;
            }
        }
        pattern_weight[pattern] += (energy - shift).exp();
    }

    let z: f64 = pattern_weight.iter().sum();
    let rows = (0..nb)
        .map(|i| {
            (0..nb)
                .map(|j| {
                    let (a, b) = (
                        slot[graph.boundary[i]].expect("boundary vertex"),
                        slot[graph.boundary[j]].expect("boundary vertex"),
                    );
                    if a == b {
                        return 1.0;
                    }
                    let s: f64 = pattern_weight
                        .iter()
                        .enumerate()
                        .map(|(pat, w)| {
                            if ((pat >> a) ^ (pat >> b)) & 1 == 0 {
                                *w
                            } else {
                                -*w
                            }
                        })
                        .sum();
                    s / z
                })
                .collect()
        })
        .collect();
    let gauge = if gauge_fixed {
        std::f64::consts::LN_2
    } else {
        0.0
    };
    Ok(OracleResult {
        log_z: z.ln() + shift + gauge,
        correlations: CorrelationMatrix::from_rows(rows),
    })
}

/// Oracle correlations for the black graph of the arrangement at `seed`.
pub fn oracle_correlations(
    region: &Region,
    p: &EllipticParameter,
    seed: u64,
) -> Result<CorrelationMatrix> {
    let arr = build_arrangement(region, seed)?;
    let g = build_black_graph(&arr, p)?;
    Ok(exact_correlations(&g)?.correlations)
}

/// Largest entrywise spread of oracle correlations across arrangements.
pub fn z_invariance_check(region: &Region, p: &EllipticParameter, seeds: &[u64]) -> Result<f64> {
    let all: Vec<CorrelationMatrix> = seeds
        .iter()
        .map(|&s| oracle_correlations(region, p, s))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            worst = worst.max(a.max_abs_diff(b));
        }
    }
    Ok(worst)
}

/// `‖M_formula - M_oracle‖_∞`.
pub fn formula_vs_oracle(region: &Region, p: &EllipticParameter, seed: u64) -> Result<f64> {
    let formula = correlation_matrix(region, p)?;
    let oracle = oracle_correlations(region, p, seed)?;
    Ok(formula.max_abs_diff(&oracle))
}
