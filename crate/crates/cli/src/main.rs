use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use zcorr::arrangement::{build_arrangement, dump};
use zcorr::correlations::{doubled_matrix, dual_correlation_matrix, CorrelationMatrix};
use zcorr::nearcritical::{gamma_expansion, ExpansionSample};
use zcorr::oracle::exact_correlations;
use zcorr::{build_black_graph, EllipticParameter, Error, Region, RegionSpec};

mod check;

#[derive(Parser, Debug)]
#[command(
    name = "zcorr",
    version,
    about = "Boundary correlations of Z-invariant Ising models on polygonal regions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a region file and report its combinatorics.
    Validate(Args),
    /// Correlation matrix from the curve formula.
    Correlate(Args),
    /// Correlation matrix by exhaustive enumeration on an explicit arrangement.
    Oracle(Args),
    /// Run the formula-vs-oracle, transport and duality checks.
    Check(Args),
    /// Near-critical expansion of the curve at the given points.
    Expand {
        #[command(flatten)]
        args: Args,
        /// Evaluation point; may be repeated.
        #[arg(long = "t", allow_negative_numbers = true, default_values_t = [0.0])]
        t: Vec<f64>,
    },
    /// Correlation matrix of the dual model.
    Dualize(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// Region JSON file: {"n", "tau", optional "alpha"}.
    region: PathBuf,
    /// Elliptic parameter k², any real below 1.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    m: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the chord arrangement and Ising graph in the output.
    #[arg(long)]
    dump_graph: bool,
    /// Treat ill-conditioned solves as failures.
    #[arg(long)]
    strict: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(s) | Failure::Validation(s) | Failure::Numerical(s) => s,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::ParameterOutOfRange(_) | Error::NonFinite(_) => {
                Failure::Input(e.to_string())
            }
            Error::InvalidRegion(_) | Error::InfeasibleShape(_) => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn load_region(path: &Path) -> Outcome<Region> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let spec = RegionSpec::from_json(&text)?;
    Ok(spec.into_region()?)
}

fn parameter(m: f64) -> Outcome<EllipticParameter> {
    Ok(EllipticParameter::new(m)?)
}

fn emit(args: &Args, text: &str) -> Outcome<()> {
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn matrix_csv(rows: &[Vec<f64>]) -> String {
    let n = rows.first().map_or(0, Vec::len);
    let mut out = (1..=n)
        .map(|i| format!("b_{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn conditioning(args: &Args, m: &CorrelationMatrix) -> Outcome<()> {
    if m.is_ill_conditioned() {
        let msg = format!(
            "ill-conditioned solve (condition estimate {:e})",
            m.condition.unwrap_or(f64::INFINITY)
        );
        if args.strict {
            return Err(Failure::Numerical(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn graph_dump(
    args: &Args,
    region: &Region,
    p: &EllipticParameter,
) -> Outcome<Option<serde_json::Value>> {
    if !args.dump_graph {
        return Ok(None);
    }
    let arr = build_arrangement(region, args.seed)?;
    let d = dump(&arr, p)?;
    Ok(Some(serde_json::to_value(d).expect("serializable dump")))
}

fn with_dump(mut body: serde_json::Value, dumped: Option<serde_json::Value>) -> serde_json::Value {
    if let Some(d) = dumped {
        body["arrangement"] = d;
    }
    body
}

fn validate(args: &Args) -> Outcome<()> {
    let region = load_region(&args.region)?;
    let body = json!({
        "valid": true,
        "n": region.n(),
        "crossings": region.crossings().len(),
        "tau_descents": region.tau_descents(),
        "alternating": region.is_alternating(),
        "repeated_directions": region.has_repeated_directions(),
    });
    emit(args, &to_json(&body))
}

fn correlate(args: &Args) -> Outcome<()> {
    let region = load_region(&args.region)?;
    let p = parameter(args.m)?;
    let d = doubled_matrix(&region, &p)?;
    let m = CorrelationMatrix::from_doubled(&d);
    conditioning(args, &m)?;
    let text = match args.format {
        Format::Csv => matrix_csv(&m.entries),
        Format::Json => {
            let tilde: Vec<Vec<f64>> = d
                .entries
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect();
            let body = json!({ "M": m.entries, "M_tilde": tilde, "condition": d.condition });
            to_json(&with_dump(body, graph_dump(args, &region, &p)?))
        }
    };
    emit(args, &text)
}

fn oracle(args: &Args) -> Outcome<()> {
    let region = load_region(&args.region)?;
    let p = parameter(args.m)?;
    let arr = build_arrangement(&region, args.seed)?;
    let result = exact_correlations(&build_black_graph(&arr, &p)?)?;
    let text = match args.format {
        Format::Csv => matrix_csv(&result.correlations.entries),
        Format::Json => {
            let body = json!({ "M": result.correlations.entries, "log_z": result.log_z });
            to_json(&with_dump(body, graph_dump(args, &region, &p)?))
        }
    };
    emit(args, &text)
}

fn expand(args: &Args, ts: &[f64]) -> Outcome<()> {
    let region = load_region(&args.region)?;
    let samples: Vec<ExpansionSample> = ts.iter().map(|&t| gamma_expansion(&region, t)).collect();
    let text = match args.format {
        Format::Json => to_json(&json!({ "samples": samples })),
        Format::Csv => {
            let mut out = String::from("t,order");
            for p in 1..=region.len() {
                out.push_str(&format!(",gamma_{p}"));
            }
            out.push('\n');
            for s in &samples {
                for (order, values) in [("0", &s.zeroth), ("m", &s.second_order)] {
                    out.push_str(&format!("{:.16e},{order}", s.t));
                    for v in values.iter() {
                        out.push_str(&format!(",{v:.16e}"));
                    }
                    out.push('\n');
                }
            }
            out
        }
    };
    emit(args, &text)
}

fn dualize(args: &Args) -> Outcome<()> {
    let region = load_region(&args.region)?;
    let p = parameter(args.m)?;
    let m = dual_correlation_matrix(&region, &p)?;
    conditioning(args, &m)?;
    let text = match args.format {
        Format::Csv => matrix_csv(&m.entries),
        Format::Json => {
            let body = json!({
                "M": m.entries,
                "m_dual": p.m_dual(),
                "region": RegionSpec::from(&region.shifted()),
            });
            to_json(&body)
        }
    };
    emit(args, &text)
}

fn run(cli: Cli) -> Outcome<()> {
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Correlate(a) => correlate(a),
        Command::Oracle(a) => oracle(a),
        Command::Check(a) => {
            let region = load_region(&a.region)?;
            let p = parameter(a.m)?;
            let report = check::run(&region, &p, a.seed);
            let text = match a.format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(a, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Numerical("one or more checks failed".into()))
            }
        }
        Command::Expand { args, t } => expand(args, t),
        Command::Dualize(a) => dualize(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
