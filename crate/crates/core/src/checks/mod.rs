//! Named identity checks run over a deterministic momentum sample set.
//!
//! A mathematical failure is reported as data (`pass = false`), never as an
//! error. Errors are reserved for configuration problems and unknown ids.

mod registry;
mod sampling;

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

pub use registry::{registry, CheckSpec};
pub use sampling::{random_direction, sample_momenta, special_momenta, SampleConfig, MIN_RADIUS};

use crate::algebra::Momentum;
use crate::dirac::KSign;
use crate::error::{Error, Result};
use crate::spincat::{Catalog, Conventions, GammaOrder, Resolution};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DISTINCTNESS_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Kind {
    Equality,
    Commutator,
    Distinctness,
    Parity,
    MatrixIdentity,
}

/// Per-check tolerance: either the run-wide value or a fixed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Default,
    Fixed(f64),
}

impl Tolerance {
    pub fn resolve(self, default: f64) -> f64 {
        match self {
            Tolerance::Default => default,
            Tolerance::Fixed(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub sampling: SampleConfig,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            sampling: SampleConfig::default(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub pass: bool,
    pub max_residual: f64,
    /// Smallest separation over the designated samples (distinctness only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_residual: Option<f64>,
    pub worst_sample: Momentum,
    pub samples_used: usize,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    pub kind: Kind,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConventionReport {
    pub gamma_order: GammaOrder,
    pub k_sign: KSign,
    pub resolved: bool,
    pub gamma_residuals: Vec<(GammaOrder, f64)>,
    pub k_residuals: Vec<(KSign, f64)>,
}

impl From<&Resolution> for ConventionReport {
    fn from(r: &Resolution) -> Self {
        Self {
            gamma_order: r.conventions.gamma_order,
            k_sign: r.conventions.k_sign,
            resolved: r.resolved,
            gamma_residuals: r.gamma_residuals.clone(),
            k_residuals: r.k_residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub mass: f64,
    pub count: usize,
    pub tolerance: f64,
    pub conventions: ConventionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub meta: ReportMeta,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 when every check passes, 1 when any fails, 2 when nothing ran.
    pub fn exit_code(&self) -> i32 {
        if self.checks.is_empty() {
            2
        } else if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Shared state for one run: samples, resolved conventions and the catalog
/// built with them.
pub struct CheckContext {
    pub cfg: CheckConfig,
    pub samples: Vec<Momentum>,
    pub resolution: Resolution,
    pub catalog: Catalog,
}

impl CheckContext {
    pub fn new(cfg: &CheckConfig) -> Result<Self> {
        cfg.validate()?;
        let samples = sample_momenta(&cfg.sampling)?;
        let resolution = Conventions::resolve(cfg.sampling.mass, &samples, cfg.tolerance)?;
        let catalog = Catalog::new(cfg.sampling.mass, resolution.conventions)?
            .with_unitarity_samples(samples.clone());
        Ok(Self {
            cfg: *cfg,
            samples,
            resolution,
            catalog,
        })
    }

    pub fn mass(&self) -> f64 {
        self.cfg.sampling.mass
    }

    /// Samples with |p| ≥ m/2, plus every sample moved onto |p| = m.
    pub fn distinct_samples(&self) -> Vec<Momentum> {
        let m = self.mass();
        let mut out: Vec<Momentum> = self
            .samples
            .iter()
            .filter(|q| q.norm() >= 0.5 * m)
            .copied()
            .collect();
        out.extend(self.shell_samples());
        out
    }

    /// Every sample moved onto |p| = m (p = 0 goes to the 3-axis).
    pub fn shell_samples(&self) -> Vec<Momentum> {
        let m = self.mass();
        self.samples.iter().map(|q| q.with_radius(m)).collect()
    }

    fn meta(&self) -> ReportMeta {
        ReportMeta {
            seed: self.cfg.sampling.seed,
            mass: self.mass(),
            count: self.cfg.sampling.count,
            tolerance: self.cfg.tolerance,
            conventions: ConventionReport::from(&self.resolution),
        }
    }

    pub fn run(&self, spec: &CheckSpec) -> CheckResult {
        let tolerance = spec.tolerance.resolve(self.cfg.tolerance);
        let base = |pass, max_residual, min_residual, worst_sample, samples_used, detail| CheckResult {
            id: spec.id.to_string(),
            pass,
            max_residual,
            min_residual,
            worst_sample,
            samples_used,
            seed: self.cfg.sampling.seed,
            tolerance,
            floor: spec.floor,
            kind: spec.kind,
            anchor: spec.anchor.to_string(),
            detail,
        };
        match (spec.run)(self) {
            Ok(o) => {
                if spec.kind == Kind::Distinctness {
                    let floor = spec.floor.unwrap_or(DISTINCTNESS_FLOOR);
                    let pass = o.value >= floor;
                    base(pass, o.max, Some(o.value), o.worst, o.samples_used, o.detail)
                } else {
                    let pass = o.value <= tolerance;
                    base(pass, o.value, None, o.worst, o.samples_used, o.detail)
                }
            }
            Err(e) => base(
                false,
                f64::INFINITY,
                None,
                self.samples[0],
                0,
                Some(format!("evaluation error: {e}")),
            ),
        }
    }
}

/// The decisive statistic of one check run.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Max residual, or the min separation for distinctness checks.
    pub value: f64,
    /// Largest residual seen (equals `value` except for distinctness).
    pub max: f64,
    pub worst: Momentum,
    pub samples_used: usize,
    pub detail: Option<String>,
}

pub fn run_check(id: &str, cfg: &CheckConfig) -> Result<CheckResult> {
    let spec = registry()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownName(id.to_string()))?;
    let ctx = CheckContext::new(cfg)?;
    Ok(ctx.run(&spec))
}

/// Runs every registered check whose id matches `filter` (a glob with `*`
/// and `?`), in registry order.
pub fn run_suite(cfg: &CheckConfig, filter: Option<&str>) -> Result<SuiteReport> {
    let specs: Vec<CheckSpec> = registry()
        .into_iter()
        .filter(|s| filter.is_none_or(|f| glob_match(f, s.id)))
        .collect();
    let ctx = CheckContext::new(cfg)?;
    let checks = run_parallel(&ctx, &specs);
    Ok(SuiteReport {
        meta: ctx.meta(),
        checks,
    })
}

fn run_parallel(ctx: &CheckContext, specs: &[CheckSpec]) -> Vec<CheckResult> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(specs.len().max(1));
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<CheckResult>> = vec![None; specs.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= specs.len() {
                            break;
                        }
                        done.push((i, ctx.run(&specs[i])));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("check thread panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every check ran")).collect()
}

/// Glob match supporting `*` (any run) and `?` (one character).
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_cases() {
        assert!(glob_match("SU2_*", "SU2_BG"));
        assert!(!glob_match("SU2_*", "QE_LOCAL"));
        assert!(glob_match("*", ""));
        assert!(glob_match("Q?_*", "QE_LOCAL"));
        assert!(glob_match("*LOCAL", "QE_LOCAL"));
        assert!(!glob_match("QE_", "QE_LOCAL"));
        assert!(glob_match("a*b*c", "aXXbYYc"));
        assert!(!glob_match("a*b*c", "aXXbYY"));
    }

    #[test]
    fn exit_codes() {
        let mut r = SuiteReport {
            meta: ReportMeta {
                seed: 1,
                mass: 1.0,
                count: 1,
                tolerance: 1e-10,
                conventions: ConventionReport {
                    gamma_order: GammaOrder::G0G5,
                    k_sign: KSign::Minus,
                    resolved: true,
                    gamma_residuals: vec![],
                    k_residuals: vec![],
                },
            },
            checks: vec![],
        };
        assert_eq!(r.exit_code(), 2);
        r.checks.push(CheckResult {
            id: "A".into(),
            pass: true,
            max_residual: 0.0,
            min_residual: None,
            worst_sample: Momentum::at_rest(1.0).unwrap(),
            samples_used: 1,
            seed: 1,
            tolerance: 1e-10,
            floor: None,
            kind: Kind::Equality,
            anchor: "a".into(),
            detail: None,
        });
        assert_eq!(r.exit_code(), 0);
        r.checks[0].pass = false;
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn invalid_tolerance_rejected() {
        let cfg = CheckConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
