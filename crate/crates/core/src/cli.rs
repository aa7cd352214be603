//! Command-line front end. Every command is a thin wrapper over library
//! calls; `dispatch` returns the process exit status.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{Mat4, Momentum};
use crate::checks::{run_suite, CheckConfig, Kind, SampleConfig, SuiteReport};
use crate::dirac::boost_matrix;
use crate::error::{Error, Result};
use crate::spincat::{Catalog, OperatorName};
use crate::zbw::{analyze, run_zbw, ZbwConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "relspin", version, about = "Relativistic spin and position operators of a massive Dirac particle")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Particle mass (natural units).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    /// Seed for the momentum sample generator.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of random momentum samples (seven special points are added).
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Tolerance for equality and commutator checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the registered identity checks.
    Check {
        /// Only run checks whose id matches this glob (`*`, `?`).
        #[arg(long)]
        filter: Option<String>,
    },
    /// Print the coefficient matrices of a catalog operator at one momentum.
    Eval {
        #[arg(long)]
        operator: String,
        /// Momentum as x,y,z.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
    },
    /// Run the wavepacket simulation.
    Zbw(ZbwArgs),
    /// Apply L(p), or L(-p) with --inverse, to a four-vector.
    Boost {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Four-vector as w0,w1,w2,w3.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Debug, Args)]
pub struct ZbwArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -6.0)]
    pub p_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 6.0)]
    pub p_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// Packet center.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub center: f64,
    /// Packet momentum width.
    #[arg(long, default_value_t = 0.2)]
    pub width: f64,
    /// Negative-energy amplitude fraction.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
}

impl ZbwArgs {
    pub fn to_config(&self, mass: f64) -> ZbwConfig {
        ZbwConfig {
            mass,
            p_min: self.p_min,
            p_max: self.p_max,
            n: self.points,
            center: self.center,
            width: self.width,
            eta: self.eta,
            t_max: self.t_max,
            n_steps: self.steps,
        }
    }
}

impl Common {
    pub fn check_config(&self) -> CheckConfig {
        CheckConfig {
            sampling: SampleConfig {
                mass: self.mass,
                count: self.samples,
                seed: self.seed,
                ..SampleConfig::default()
            },
            tolerance: self.tol,
        }
    }
}

/// Parses `n` comma-separated finite decimals.
pub fn parse_components(s: &str, n: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(Error::Parse(format!("expected {n} comma-separated values, got {}", parts.len())));
    }
    parts
        .iter()
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("not finite: {t:?}")))
            }
        })
        .collect()
}

pub fn parse_momentum(s: &str) -> Result<[f64; 3]> {
    let v = parse_components(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

pub fn parse_four_vector(s: &str) -> Result<[f64; 4]> {
    let v = parse_components(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// Renders a suite report.
pub fn emit_report(report: &SuiteReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(report)?),
        Format::Markdown => Ok(report_markdown(report)),
        Format::Csv => Err(Error::InvalidConfig("csv output is only available for zbw".into())),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn report_markdown(report: &SuiteReport) -> String {
    let m = &report.meta;
    let mut s = String::new();
    let _ = writeln!(s, "# Check report\n");
    let _ = writeln!(
        s,
        "seed {} · mass {} · samples {} · tolerance {:e} · {} · {}{}\n",
        m.seed,
        m.mass,
        m.count,
        m.tolerance,
        m.conventions.gamma_order,
        m.conventions.k_sign,
        if m.conventions.resolved { "" } else { " (conventions unresolved)" }
    );
    let _ = writeln!(s, "| id | result | residual | bound | worst sample | anchor |");
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for c in &report.checks {
        let (residual, bound) = match c.kind {
            Kind::Distinctness => (
                format!("min {:.3e}", c.min_residual.unwrap_or(f64::NAN)),
                format!(">= {:e}", c.floor.unwrap_or(f64::NAN)),
            ),
            _ => (format!("{:.3e}", c.max_residual), format!("<= {:e}", c.tolerance)),
        };
        let q = c.worst_sample.p;
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | ({:.4}, {:.4}, {:.4}) | `{}` |",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            residual,
            bound,
            q[0],
            q[1],
            q[2],
            c.anchor
        );
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(s, "\n{passed}/{} passed", report.checks.len());
    s
}

type JsonMat = Vec<Vec<[f64; 2]>>;

fn mat_json(m: &Mat4) -> JsonMat {
    m.0.iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect()).collect()
}

#[derive(Serialize)]
struct EvalComponent {
    index: usize,
    #[serde(rename = "A")]
    a: JsonMat,
    /// Coefficients of ∂/∂p¹, ∂/∂p², ∂/∂p³.
    #[serde(rename = "B")]
    b: Vec<JsonMat>,
    /// Symmetric second-order coefficients in order 11, 12, 13, 22, 23, 33.
    #[serde(rename = "C")]
    c: Vec<JsonMat>,
}

#[derive(Serialize)]
struct EvalOutput {
    operator: String,
    mass: f64,
    p: [f64; 3],
    components: Vec<EvalComponent>,
}

/// Coefficient matrices of a catalog operator at one momentum.
pub fn eval_operator(name: &str, mass: f64, p: [f64; 3], format: Format) -> Result<String> {
    let op_name: OperatorName = name.parse()?;
    let q = Momentum::new(p, mass)?;
    let cat = Catalog::with_defaults(mass)?.with_unitarity_samples(vec![q]);
    let op = cat.operator(op_name)?;
    let mut components = Vec::new();
    let mut raw = Vec::new();
    for (i, c) in op.components().into_iter().enumerate() {
        let (a, b, cc) = c.coefficient_values(&q)?;
        components.push(EvalComponent {
            index: i + 1,
            a: mat_json(&a),
            b: b.iter().map(mat_json).collect(),
            c: cc.iter().map(mat_json).collect(),
        });
        raw.push((a, b, cc));
    }
    match format {
        Format::Json => to_json(&EvalOutput {
            operator: op_name.to_string(),
            mass,
            p,
            components,
        }),
        Format::Markdown => {
            let mut s = format!("# {op_name} at p = ({}, {}, {}), m = {mass}\n", p[0], p[1], p[2]);
            const C_LABELS: [&str; 6] = ["11", "12", "13", "22", "23", "33"];
            for (i, (a, b, c)) in raw.iter().enumerate() {
                let _ = writeln!(s, "\n## component {}\n", i + 1);
                let _ = writeln!(s, "A =\n```\n{a:?}```");
                for (k, bk) in b.iter().enumerate() {
                    if !bk.is_zero() {
                        let _ = writeln!(s, "B{} =\n```\n{bk:?}```", k + 1);
                    }
                }
                for (n, cn) in c.iter().enumerate() {
                    if !cn.is_zero() {
                        let _ = writeln!(s, "C{} =\n```\n{cn:?}```", C_LABELS[n]);
                    }
                }
            }
            Ok(s)
        }
        Format::Csv => Err(Error::InvalidConfig("csv output is only available for zbw".into())),
    }
}

#[derive(Serialize)]
struct BoostOutput {
    mass: f64,
    p: [f64; 3],
    w: [f64; 4],
    inverse: bool,
    result: [f64; 4],
}

/// L(p)·w, or L(−p)·w when `inverse`.
pub fn boost_vector(mass: f64, p: [f64; 3], w: [f64; 4], inverse: bool, format: Format) -> Result<String> {
    let boost_p = if inverse { p.map(|c| -c) } else { p };
    let result = boost_matrix(mass, boost_p)?.apply(&w);
    match format {
        Format::Json => to_json(&BoostOutput {
            mass,
            p,
            w,
            inverse,
            result,
        }),
        Format::Markdown => Ok(format!(
            "| w0 | w1 | w2 | w3 |\n|---|---|---|---|\n| {} | {} | {} | {} |\n",
            result[0], result[1], result[2], result[3]
        )),
        Format::Csv => Ok(format!("w0,w1,w2,w3\n{:.16e},{:.16e},{:.16e},{:.16e}\n", result[0], result[1], result[2], result[3])),
    }
}

#[derive(Serialize)]
struct ZbwJson<'a> {
    config: &'a ZbwConfig,
    analysis: crate::zbw::ZbwAnalysis,
    rows: &'a [crate::zbw::Row],
}

pub fn zbw_output(cfg: &ZbwConfig, format: Format) -> Result<String> {
    let ts = run_zbw(cfg)?;
    match format {
        Format::Csv => Ok(ts.to_csv()),
        Format::Json => to_json(&ZbwJson {
            config: cfg,
            analysis: analyze(&ts)?,
            rows: &ts.rows,
        }),
        Format::Markdown => {
            let a = analyze(&ts)?;
            let mut s = String::from("| quantity | value |\n|---|---|\n");
            let _ = writeln!(s, "| <x> oscillation amplitude | {:.6e} |", a.dirac_amplitude);
            let _ = writeln!(s, "| <x> drift velocity | {:.6e} |", a.dirac_fit.slope);
            let _ = writeln!(s, "| dominant angular frequency | {:.6} (bin {:.6}) |", a.dominant_omega, a.bin_width);
            let _ = writeln!(s, "| <x_FW> linear-fit residual | {:.6e} |", a.fw_fit.max_deviation);
            let _ = writeln!(s, "| max discrete speed | {:.9} |", a.max_speed);
            let _ = writeln!(s, "| norm drift | {:.3e} |", a.norm_drift);
            let _ = writeln!(s, "| energy drift | {:.3e} |", a.energy_drift);
            Ok(s)
        }
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Parses arguments, runs the command and returns the exit status:
/// 0 success, 1 a check failed, 2 usage or configuration error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok((text, code)) => match write_output(&cli.common.out, &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command, returning its output and exit status.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    let c = &cli.common;
    match &cli.command {
        Command::Check { filter } => {
            let report = run_suite(&c.check_config(), filter.as_deref())?;
            let text = emit_report(&report, c.format.unwrap_or(Format::Json))?;
            if report.checks.is_empty() {
                eprintln!("error: no registered check matches the filter");
            }
            Ok((text, report.exit_code()))
        }
        Command::Eval { operator, p } => {
            let text = eval_operator(operator, c.mass, parse_momentum(p)?, c.format.unwrap_or(Format::Json))?;
            Ok((text, 0))
        }
        Command::Zbw(args) => Ok((zbw_output(&args.to_config(c.mass), c.format.unwrap_or(Format::Csv))?, 0)),
        Command::Boost { p, w, inverse } => {
            let text = boost_vector(
                c.mass,
                parse_momentum(p)?,
                parse_four_vector(w)?,
                *inverse,
                c.format.unwrap_or(Format::Json),
            )?;
            Ok((text, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_vectors() {
        assert_eq!(parse_momentum("0.3,0,0.4").unwrap(), [0.3, 0.0, 0.4]);
        assert_eq!(parse_momentum(" -1 , 2e-3,5 ").unwrap(), [-1.0, 0.002, 5.0]);
        assert!(parse_momentum("1,2").is_err());
        assert!(parse_momentum("1,2,x").is_err());
        assert!(parse_momentum("1,2,inf").is_err());
        assert!(parse_four_vector("1,2,3").is_err());
    }

    #[test]
    fn boost_example() {
        let s = boost_vector(1.0, [0.0, 0.0, 0.75], [1.25, 0.0, 0.0, 0.75], true, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["result"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(dispatch(["relspin", "frobnicate"]), 2);
        assert_eq!(dispatch(["relspin", "check", "--bogus"]), 2);
        assert_eq!(dispatch(["relspin", "eval", "--operator", "NOPE", "--p", "0,0,0"]), 2);
    }
}
