use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use zcorr::correlations::{
    descent_transport_check, doubled_matrix, duality_checks, TransportChain,
};
use zcorr::oracle::{formula_vs_oracle, z_invariance_check};
use zcorr::{EllipticParameter, Error, Region, Result};

#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub value: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub m: f64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|c| matches!(c.status, Status::Fail))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,status,value,tolerance\n");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skipped => "skipped",
            };
            let value = c.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
            out.push_str(&format!("{},{status},{value},{:e}\n", c.name, c.tolerance));
        }
        out
    }
}

fn record(name: impl Into<String>, tolerance: f64, value: Result<f64>) -> CheckResult {
    let name = name.into();
    match value {
        Ok(v) => CheckResult {
            name,
            status: if v <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
            value: Some(v),
            tolerance,
            note: None,
        },
        Err(
            e @ (Error::OracleTooLarge { .. } | Error::NoDescent(_) | Error::RepeatedDirections),
        ) => CheckResult {
            name,
            status: Status::Skipped,
            value: None,
            tolerance,
            note: Some(e.to_string()),
        },
        Err(e) => CheckResult {
            name,
            status: Status::Fail,
            value: None,
            tolerance,
            note: Some(e.to_string()),
        },
    }
}

pub fn run(region: &Region, p: &EllipticParameter, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    checks.push(record(
        "structure",
        1e-9,
        doubled_matrix(region, p).map(|d| d.structure_residual()),
    ));
    checks.push(record(
        "formula_vs_oracle",
        1e-8,
        formula_vs_oracle(region, p, seed),
    ));
    let seeds: Vec<u64> = (seed..seed + 5).collect();
    checks.push(record(
        "z_invariance",
        1e-10,
        z_invariance_check(region, p, &seeds),
    ));

    let ts: Vec<f64> = (0..100)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    for j in region.tau_descents() {
        checks.push(record(
            format!("transport_j{j}"),
            1e-10,
            descent_transport_check(region, j, p, &ts),
        ));
    }
    checks.push(record(
        "transport_chain",
        1e-7,
        TransportChain::build(region, p).and_then(|c| c.span_residual(p)),
    ));

    match duality_checks(region, p, seed) {
        Ok(rep) => {
            checks.push(record("duality_ratio", 1e-9, Ok(rep.ratio_spread)));
            checks.push(record("duality_span", 1e-8, Ok(rep.projector_distance)));
            checks.push(record("kramers_wannier", 1e-10, Ok(rep.kramers_wannier)));
            if let Some(c) = rep.regular_constant {
                checks.push(record("duality_regular_constant", 1e-9, Ok(c)));
            }
        }
        Err(e) => checks.push(record("duality", 0.0, Err(e))),
    }

    Report {
        m: p.m(),
        seed,
        checks,
    }
}
