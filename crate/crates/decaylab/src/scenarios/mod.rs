//! The claim-to-experiment catalog: configuration types, the scenario
//! runner, the verify-everything entry point, and file emission.
//!
//! A scenario is one fully pinned experiment: equation kind, grid,
//! potential and damping profiles, initial data, march parameters, and
//! the set of checks whose outcomes decide the verdict. Outcomes are
//! three-valued: `pass`, `fail`, and `hypothesis_violated`; the last is
//! first-class because every decay claim here is conditional on a
//! weighted data integral being finite, and a run that breaks the
//! condition proves nothing either way.

mod catalog;
mod emit;

pub use catalog::{builtin_catalog, builtin_pairs, s7_reference, ContrastPair, S7Reference};
pub use emit::{csv_string, emit_csv, emit_svg, svg_string};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::evolve::{cfl_dt, run_simulation, EquationKind, Problem, RunConfig};
use crate::functionals::{
    absorption_check, heat_dissipation_check, identity_slack, lemma_chain_check,
    CheckStatus, DiagnosticSeries, CSV_COLUMNS,
};
use crate::numgrid::{Field, Grid};
use crate::potential::{DampingSpec, DataFunctionals, PotentialSpec};
use crate::ratefit::{
    boundedness_score, decay_window, fit_power, fit_sqrtlog, BoundednessVerdict, RateFit,
};
use crate::{Error, Result};

/// Grid geometry as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.half_width, self.points_per_axis)
    }
}

/// Initial-data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Zero,
    /// Product of Dirichlet sine modes, one index per axis.
    Eigenmode { modes: Vec<usize>, amplitude: f64 },
    /// `amplitude * exp(-|x - center|^2 / (2 width^2))` (full-space tails,
    /// truncated by the box).
    GaussianBump { center: Vec<f64>, width: f64, amplitude: f64 },
    /// Compactly supported mollifier bump, zero outside the given radius.
    SmoothBump { center: Vec<f64>, radius: f64, amplitude: f64 },
}

impl DataSpec {
    pub fn evaluate(&self, grid: Grid) -> Result<Field> {
        let check_center = |center: &[f64]| -> Result<()> {
            if center.len() != grid.dim() {
                return Err(Error::InvalidSpec(format!(
                    "data center has {} coordinates on a {}-d grid",
                    center.len(),
                    grid.dim()
                )));
            }
            if center.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSpec("data center must be finite".into()));
            }
            Ok(())
        };
        match self {
            DataSpec::Zero => Ok(Field::zeros(grid)),
            DataSpec::Eigenmode { modes, amplitude } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidSpec("eigenmode amplitude must be finite".into()));
                }
                let mut f = Field::eigenmode_nd(grid, modes)?;
                for v in f.values_mut() {
                    *v *= amplitude;
                }
                Ok(f)
            }
            DataSpec::GaussianBump { center, width, amplitude } => {
                check_center(center)?;
                if !(width.is_finite() && *width > 0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "gaussian bump needs width > 0 and finite amplitude, got width {width}, amplitude {amplitude}"
                    )));
                }
                let (w2, a, c) = (2.0 * width * width, *amplitude, center.clone());
                Ok(Field::from_fn(grid, move |x| {
                    let r2: f64 =
                        x.iter().zip(&c).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                    a * (-r2 / w2).exp()
                }))
            }
            DataSpec::SmoothBump { center, radius, amplitude } => {
                check_center(center)?;
                if !(radius.is_finite() && *radius > 0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "smooth bump needs radius > 0 and finite amplitude, got radius {radius}, amplitude {amplitude}"
                    )));
                }
                Ok(crate::potential::bump_field(grid, center, *radius, *amplitude))
            }
        }
    }
}

/// Which data-derived constant a boundedness check divides by. Infinite
/// scales (broken support hypotheses) turn the check into
/// `not_applicable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleChoice {
    /// Absolute: scale 1.
    Unit,
    /// Initial energy.
    E0,
    /// `|u0| + I0` with `I0^2 = int u1^2 / V` (wave bounds; use with
    /// `sqrt = true` columns).
    NormU0PlusI0,
    /// Plate analogue `|u0| + K0p`.
    NormU0PlusK0p,
    /// `E(0) + |u0|^2 + K0^2` (damped weighted-energy constant).
    DampedEnergy,
    /// `|u0|^2 + K0h^2` (heat weighted-L2 constant).
    HeatL2,
}

impl ScaleChoice {
    pub fn resolve(&self, d: &DataFunctionals) -> f64 {
        match self {
            ScaleChoice::Unit => 1.0,
            ScaleChoice::E0 => d.e0,
            ScaleChoice::NormU0PlusI0 => d.l2_u0_sq.sqrt() + d.i0_sq.sqrt(),
            ScaleChoice::NormU0PlusK0p => d.l2_u0_sq.sqrt() + d.k0p_sq.sqrt(),
            ScaleChoice::DampedEnergy => d.e0 + d.l2_u0_sq + d.k0_sq,
            ScaleChoice::HeatL2 => d.l2_u0_sq + d.k0h_sq,
        }
    }
}

/// Boundedness check on one diagnostic column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundednessCheck {
    /// Canonical CSV column name.
    pub column: String,
    /// Fit and bound `sqrt(column)` instead (norms rather than squares).
    #[serde(default)]
    pub sqrt: bool,
    /// `[t0, t1]`; defaults to the last three quarters of the run.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    pub ratio_cap: f64,
    pub scale: ScaleChoice,
}

/// Power-law exponent check on one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerFitCheck {
    pub column: String,
    #[serde(default)]
    pub sqrt: bool,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    pub beta_min: f64,
    pub beta_max: f64,
    #[serde(default)]
    pub min_r_squared: Option<f64>,
}

/// Sqrt-log growth check: the sqrt-log fit must be good while a plain
/// power fit stays flat, which is what discriminates `sqrt(log t)` growth
/// from genuine power growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqrtlogCheck {
    pub column: String,
    #[serde(default)]
    pub sqrt: bool,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    pub min_r_squared: f64,
    pub max_power_beta: f64,
}

/// Which checks a scenario runs. Everything defaults to off/empty so
/// configs state exactly what they claim.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSet {
    /// Antiderivative and energy identity residuals within the
    /// discretization slack at every sample.
    pub identities: bool,
    pub absorption: bool,
    pub lemma_chain: bool,
    pub heat_dissipation: bool,
    pub boundedness: Vec<BoundednessCheck>,
    pub power_fits: Vec<PowerFitCheck>,
    pub sqrtlog_fits: Vec<SqrtlogCheck>,
}

/// Scenario verdict (also the type of the expected verdict in configs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioOutcome {
    Pass,
    Fail,
    /// A required weighted data integral is infinite: the theorem's
    /// hypothesis does not hold, so its conclusion is not tested.
    HypothesisViolated,
}

impl std::fmt::Display for ScenarioOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioOutcome::Pass => "pass",
            ScenarioOutcome::Fail => "fail",
            ScenarioOutcome::HypothesisViolated => "hypothesis_violated",
        })
    }
}

/// One fully specified experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub title: String,
    pub kind: EquationKind,
    pub grid: GridConfig,
    pub potential: PotentialSpec,
    pub damping: DampingSpec,
    pub u0: DataSpec,
    pub u1: DataSpec,
    pub horizon: f64,
    pub safety: f64,
    pub sample_every: usize,
    /// Skip the finite-speed domain guard (needed whenever the data has
    /// full-box tails, or when wall reflections are acceptable because the
    /// checked identities hold on the box as well).
    #[serde(default)]
    pub speed_guard_override: bool,
    pub expected: ScenarioOutcome,
    #[serde(default)]
    pub checks: CheckSet,
    #[serde(default)]
    pub notes: String,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            return Err(Error::Config(format!(
                "scenario id `{}` must be nonempty and filename-safe",
                self.id
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Config(format!(
                "{}: horizon must be positive, got {}",
                self.id, self.horizon
            )));
        }
        if !(self.safety.is_finite() && self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::Config(format!(
                "{}: safety must lie in (0, 1], got {}",
                self.id, self.safety
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::Config(format!("{}: sample_every must be >= 1", self.id)));
        }
        if self.expected == ScenarioOutcome::Fail {
            return Err(Error::Config(format!(
                "{}: expected verdict must be pass or hypothesis_violated",
                self.id
            )));
        }
        for col in self.check_columns() {
            if !CSV_COLUMNS.contains(&col) {
                return Err(Error::Config(format!(
                    "{}: check references unknown column `{col}`",
                    self.id
                )));
            }
        }
        // building the problem validates grid, profiles, and data together
        self.build_problem().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(format!("{}: {other}", self.id)),
        })?;
        Ok(())
    }

    fn check_columns(&self) -> impl Iterator<Item = &str> {
        self.checks
            .boundedness
            .iter()
            .map(|c| c.column.as_str())
            .chain(self.checks.power_fits.iter().map(|c| c.column.as_str()))
            .chain(self.checks.sqrtlog_fits.iter().map(|c| c.column.as_str()))
    }

    pub fn build_problem(&self) -> Result<Problem> {
        let grid = self.grid.build()?;
        let u0 = self.u0.evaluate(grid)?;
        let u1 = self.u1.evaluate(grid)?;
        Problem::new(self.kind, grid, &self.potential, &self.damping, u0, u1)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("{}: cannot serialize config: {e}", self.id)))
    }

    pub fn from_toml(text: &str) -> Result<ScenarioConfig> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    /// SHA-256 of the canonical TOML serialization, hex-encoded. Two
    /// configs fingerprint equal exactly when every field matches.
    pub fn fingerprint(&self) -> Result<String> {
        let toml = self.to_toml()?;
        let mut hasher = Sha256::new();
        hasher.update(toml.as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(out, "{byte:02x}").expect("writing to a String cannot fail");
        }
        Ok(out)
    }
}

/// One evaluated check inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    /// Headline number (worst ratio, fitted exponent, ...), check-specific.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundednessVerdict>,
}

impl CheckResult {
    fn plain(name: &str, status: CheckStatus, detail: String, value: Option<f64>) -> CheckResult {
        CheckResult { name: name.to_string(), status, detail, value, fit: None, bound: None }
    }
}

/// Everything one scenario run produced. Serializes to the report JSON;
/// the wall clock is kept out of the serialized form so identical runs
/// produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub fingerprint: String,
    pub kind: EquationKind,
    pub expected: ScenarioOutcome,
    pub outcome: ScenarioOutcome,
    pub as_expected: bool,
    pub config: ScenarioConfig,
    pub data: DataFunctionals,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_drift: Option<f64>,
    pub warnings: Vec<String>,
    /// Emitted file names, relative to the output directory (keeping the
    /// directory itself out keeps reports byte-identical wherever they land).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
    #[serde(skip)]
    pub wall_clock_s: f64,
}

/// Where (and whether) run artifacts land on disk.
#[derive(Debug, Clone, Default)]
pub struct EmitOptions {
    /// `None` leaves everything in memory.
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl EmitOptions {
    pub fn nowhere() -> EmitOptions {
        EmitOptions::default()
    }

    pub fn into_dir(dir: &Path, svg: bool) -> EmitOptions {
        EmitOptions { out_dir: Some(dir.to_path_buf()), svg }
    }
}

fn column_series(
    series: &DiagnosticSeries,
    column: &str,
    sqrt: bool,
) -> Result<Vec<(f64, f64)>> {
    let mut col = series
        .column(column)
        .ok_or_else(|| Error::Config(format!("unknown diagnostic column `{column}`")))?;
    if sqrt {
        for p in &mut col {
            p.1 = p.1.max(0.0).sqrt();
        }
    }
    Ok(col)
}

fn identities_check(series: &DiagnosticSeries) -> CheckResult {
    let scale = series.data.e0 + series.data.l2_u0_sq;
    let mut worst = 0.0f64;
    let mut worst_t = 0.0;
    for s in &series.samples {
        let cap = identity_slack(series.dt, s.t, scale);
        let r = s.v_residual.abs().max(s.energy_residual.abs()) / cap;
        if r > worst {
            worst = r;
            worst_t = s.t;
        }
    }
    let status = if worst <= 1.0 { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckResult::plain(
        "identity_residuals",
        status,
        format!("worst |residual|/slack = {worst:.3e} at t = {worst_t:.3}"),
        Some(worst),
    )
}

fn absorption_result(problem: &Problem, series: &DiagnosticSeries) -> CheckResult {
    match absorption_check(problem, series) {
        Ok(rep) => {
            let detail = if rep.status == CheckStatus::NotApplicable {
                "weighted data integral infinite; bound says nothing".to_string()
            } else {
                format!(
                    "max LHS/RHS = {:.4} at t = {:.3}, RHS = {:.6e}",
                    rep.max_ratio, rep.worst_t, rep.rhs
                )
            };
            CheckResult::plain("absorption", rep.status, detail, Some(rep.max_ratio))
        }
        Err(e) => CheckResult::plain("absorption", CheckStatus::Fail, e.to_string(), None),
    }
}

fn lemma_chain_result(series: &DiagnosticSeries) -> CheckResult {
    match lemma_chain_check(series) {
        Ok(rep) => {
            let mut worst = 0.0f64;
            let detail = rep
                .items
                .iter()
                .map(|i| {
                    worst = worst.max(i.max_ratio);
                    format!("{} {} (ratio {:.3})", i.name, status_word(i.status), i.max_ratio)
                })
                .collect::<Vec<_>>()
                .join("; ");
            CheckResult::plain("lemma_chain", rep.status, detail, Some(worst))
        }
        Err(e) => CheckResult::plain("lemma_chain", CheckStatus::Fail, e.to_string(), None),
    }
}

fn heat_dissipation_result(series: &DiagnosticSeries) -> CheckResult {
    match heat_dissipation_check(series) {
        Ok(rep) => {
            let mut worst = 0.0f64;
            let detail = rep
                .items
                .iter()
                .map(|i| {
                    worst = worst.max(i.max_ratio);
                    format!("{} {} (ratio {:.3})", i.name, status_word(i.status), i.max_ratio)
                })
                .collect::<Vec<_>>()
                .join("; ");
            CheckResult::plain("heat_dissipation", rep.status, detail, Some(worst))
        }
        Err(e) => {
            CheckResult::plain("heat_dissipation", CheckStatus::Fail, e.to_string(), None)
        }
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::NotApplicable => "n/a",
    }
}

fn boundedness_result(check: &BoundednessCheck, series: &DiagnosticSeries) -> CheckResult {
    let name = if check.sqrt {
        format!("bounded(sqrt {})", check.column)
    } else {
        format!("bounded({})", check.column)
    };
    let scale = check.scale.resolve(&series.data);
    if !scale.is_finite() {
        return CheckResult::plain(
            &name,
            CheckStatus::NotApplicable,
            "bound scale infinite: support hypothesis violated".to_string(),
            None,
        );
    }
    let window = check.window.map(|w| (w[0], w[1])).unwrap_or(decay_window(series.horizon));
    let col = match column_series(series, &check.column, check.sqrt) {
        Ok(c) => c,
        Err(e) => return CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    };
    match boundedness_score(&col, window, scale, check.ratio_cap) {
        Ok(v) => {
            let status = if v.bounded { CheckStatus::Pass } else { CheckStatus::Fail };
            let detail = format!(
                "beta = {:.4}, sup = {:.6e} at t = {:.3}, sup/scale = {:.3} (cap {})",
                v.exponent, v.sup, v.sup_t, v.ratio, v.ratio_cap
            );
            CheckResult {
                name,
                status,
                detail,
                value: Some(v.exponent),
                fit: None,
                bound: Some(v),
            }
        }
        Err(e) => CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    }
}

fn power_fit_result(check: &PowerFitCheck, series: &DiagnosticSeries) -> CheckResult {
    let name = if check.sqrt {
        format!("power(sqrt {})", check.column)
    } else {
        format!("power({})", check.column)
    };
    let window = check.window.map(|w| (w[0], w[1])).unwrap_or(decay_window(series.horizon));
    let col = match column_series(series, &check.column, check.sqrt) {
        Ok(c) => c,
        Err(e) => return CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    };
    match fit_power(&col, window) {
        Ok(fit) => {
            let in_band = fit.exponent >= check.beta_min && fit.exponent <= check.beta_max;
            let r_ok = check.min_r_squared.map_or(true, |m| fit.r_squared >= m);
            let status =
                if in_band && r_ok { CheckStatus::Pass } else { CheckStatus::Fail };
            let detail = format!(
                "beta = {:.4} (band [{}, {}]), r^2 = {:.4}, se = {:.2e}",
                fit.exponent, check.beta_min, check.beta_max, fit.r_squared, fit.slope_se
            );
            CheckResult {
                name,
                status,
                detail,
                value: Some(fit.exponent),
                fit: Some(fit),
                bound: None,
            }
        }
        Err(e) => CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    }
}

fn sqrtlog_result(check: &SqrtlogCheck, series: &DiagnosticSeries) -> CheckResult {
    let name = if check.sqrt {
        format!("sqrtlog(sqrt {})", check.column)
    } else {
        format!("sqrtlog({})", check.column)
    };
    let window = check.window.map(|w| (w[0], w[1])).unwrap_or(decay_window(series.horizon));
    let col = match column_series(series, &check.column, check.sqrt) {
        Ok(c) => c,
        Err(e) => return CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    };
    let log_fit = match fit_sqrtlog(&col, window) {
        Ok(f) => f,
        Err(e) => return CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    };
    let power = match fit_power(&col, window) {
        Ok(f) => f,
        Err(e) => return CheckResult::plain(&name, CheckStatus::Fail, e.to_string(), None),
    };
    let ok = log_fit.r_squared >= check.min_r_squared
        && power.exponent <= check.max_power_beta;
    let detail = format!(
        "sqrtlog r^2 = {:.4} (min {}), power beta = {:.4} (max {}), slope = {:.4}",
        log_fit.r_squared,
        check.min_r_squared,
        power.exponent,
        check.max_power_beta,
        log_fit.exponent
    );
    CheckResult {
        name,
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        detail,
        value: Some(log_fit.r_squared),
        fit: Some(log_fit),
        bound: None,
    }
}

fn evaluate_checks(
    cfg: &ScenarioConfig,
    problem: &Problem,
    series: &DiagnosticSeries,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let cs = &cfg.checks;
    if cs.identities {
        out.push(identities_check(series));
    }
    if cs.absorption {
        out.push(absorption_result(problem, series));
    }
    if cs.lemma_chain {
        out.push(lemma_chain_result(series));
    }
    if cs.heat_dissipation {
        out.push(heat_dissipation_result(series));
    }
    for b in &cs.boundedness {
        out.push(boundedness_result(b, series));
    }
    for p in &cs.power_fits {
        out.push(power_fit_result(p, series));
    }
    for s in &cs.sqrtlog_fits {
        out.push(sqrtlog_result(s, series));
    }
    out
}

fn combined_outcome(checks: &[CheckResult]) -> ScenarioOutcome {
    if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        ScenarioOutcome::Fail
    } else if checks.iter().any(|c| c.status == CheckStatus::NotApplicable) {
        ScenarioOutcome::HypothesisViolated
    } else {
        ScenarioOutcome::Pass
    }
}

/// Monotonic-clock mark, or `None` on wasm targets, which have no clock;
/// browser runs then report a zero wall time instead of panicking.
#[cfg(not(target_arch = "wasm32"))]
fn clock_mark() -> Option<Instant> {
    Some(Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn clock_mark() -> Option<Instant> {
    None
}

fn clock_seconds(mark: &Option<Instant>) -> f64 {
    mark.map_or(0.0, |m| m.elapsed().as_secs_f64())
}

/// Run one scenario and also hand back its diagnostic series (`None` when
/// the march aborted on instability). Writes nothing.
pub fn run_scenario_with_series(
    cfg: &ScenarioConfig,
) -> Result<(ScenarioReport, Option<DiagnosticSeries>)> {
    cfg.validate()?;
    let started = clock_mark();
    let problem = cfg.build_problem()?;
    let dt = cfl_dt(cfg.kind, problem.grid(), problem.v_max(), cfg.safety)?;
    let rc = RunConfig {
        enforce_speed_guard: !cfg.speed_guard_override,
        ..RunConfig::new(dt, cfg.horizon, cfg.sample_every)
    };
    let fingerprint = cfg.fingerprint()?;
    let series = match run_simulation(&problem, &rc) {
        Ok(mut s) => {
            s.fingerprint = fingerprint.clone();
            s
        }
        Err(e @ Error::Instability { .. }) => {
            let data = problem.data_functionals()?;
            let checks = vec![CheckResult::plain(
                "stability",
                CheckStatus::Fail,
                e.to_string(),
                None,
            )];
            let report = ScenarioReport {
                id: cfg.id.clone(),
                fingerprint,
                kind: cfg.kind,
                expected: cfg.expected,
                outcome: ScenarioOutcome::Fail,
                as_expected: cfg.expected == ScenarioOutcome::Fail,
                config: cfg.clone(),
                data,
                checks,
                shadow_drift: None,
                warnings: vec![],
                csv_path: None,
                svg_path: None,
                wall_clock_s: clock_seconds(&started),
            };
            return Ok((report, None));
        }
        Err(e) => return Err(e),
    };
    let checks = evaluate_checks(cfg, &problem, &series);
    let outcome = combined_outcome(&checks);
    let report = ScenarioReport {
        id: cfg.id.clone(),
        fingerprint,
        kind: cfg.kind,
        expected: cfg.expected,
        outcome,
        as_expected: outcome == cfg.expected,
        config: cfg.clone(),
        data: series.data.clone(),
        checks,
        shadow_drift: series.shadow_drift,
        warnings: series.warnings.clone(),
        csv_path: None,
        svg_path: None,
        wall_clock_s: clock_seconds(&started),
    };
    Ok((report, Some(series)))
}

/// Run one scenario, emit its CSV (always, when a directory is given),
/// report JSON, and SVG (on request), and return the report.
pub fn run_scenario(cfg: &ScenarioConfig, emit: &EmitOptions) -> Result<ScenarioReport> {
    let (mut report, series) = run_scenario_with_series(cfg)?;
    if let (Some(dir), Some(series)) = (emit.out_dir.as_deref(), series.as_ref()) {
        std::fs::create_dir_all(dir)?;
        let csv = format!("{}.csv", cfg.id);
        emit_csv(series, &dir.join(&csv))?;
        report.csv_path = Some(csv);
        if emit.svg {
            let svg = format!("{}.svg", cfg.id);
            emit_svg(&report, series, &dir.join(&svg))?;
            report.svg_path = Some(svg);
        }
    }
    if let Some(dir) = emit.out_dir.as_deref() {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.report.json", cfg.id));
        std::fs::write(&path, report_json(&report)?)?;
    }
    Ok(report)
}

/// Pretty JSON for a report (stable field order, trailing newline).
pub fn report_json(report: &ScenarioReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Outcome of one contrast-pair comparison inside a verify run.
#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub baseline: String,
    pub with_potential: String,
    pub column: String,
    pub beta_baseline: f64,
    pub beta_with: f64,
    pub separation: f64,
    pub margin: f64,
    pub status: CheckStatus,
    pub detail: String,
}

/// Full verify run: reports in catalog order, pair comparisons, and the
/// aggregate flag that decides the process exit code.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub reports: Vec<ScenarioReport>,
    pub pairs: Vec<PairResult>,
    pub all_ok: bool,
}

/// Minimal glob: `*` matches any run (including empty), `?` one character;
/// everything else is literal.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0usize, 0usize);
    let mut star: Option<usize> = None;
    let mut mark = 0usize;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some(pi);
            mark = ti;
            pi += 1;
        } else if let Some(s) = star {
            pi = s + 1;
            mark += 1;
            ti = mark;
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}

/// The catalog filtered by an optional glob over scenario ids. An empty
/// match is an error (catches typos instead of silently verifying nothing).
pub fn filter_catalog(filter: Option<&str>) -> Result<Vec<ScenarioConfig>> {
    let all = builtin_catalog();
    match filter {
        None => Ok(all),
        Some(pat) => {
            let picked: Vec<ScenarioConfig> =
                all.into_iter().filter(|c| glob_match(pat, &c.id)).collect();
            if picked.is_empty() {
                Err(Error::UnknownScenario(pat.to_string()))
            } else {
                Ok(picked)
            }
        }
    }
}

/// Run the (filtered) catalog, evaluate the contrast pairs whose members
/// both ran, and aggregate. Emits per-scenario artifacts when `emit` has a
/// directory.
pub fn verify_all(filter: Option<&str>, emit: &EmitOptions) -> Result<VerifySummary> {
    let configs = filter_catalog(filter)?;
    let mut reports = Vec::with_capacity(configs.len());
    let mut series_by_id: BTreeMap<String, DiagnosticSeries> = BTreeMap::new();
    for cfg in &configs {
        let (mut report, series) = run_scenario_with_series(cfg)?;
        if let Some(series) = series {
            if let Some(dir) = emit.out_dir.as_deref() {
                std::fs::create_dir_all(dir)?;
                let csv = format!("{}.csv", cfg.id);
                emit_csv(&series, &dir.join(&csv))?;
                report.csv_path = Some(csv);
                if emit.svg {
                    let svg = format!("{}.svg", cfg.id);
                    emit_svg(&report, &series, &dir.join(&svg))?;
                    report.svg_path = Some(svg);
                }
            }
            series_by_id.insert(cfg.id.clone(), series);
        }
        if let Some(dir) = emit.out_dir.as_deref() {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.report.json", cfg.id));
            std::fs::write(&path, report_json(&report)?)?;
        }
        reports.push(report);
    }
    let mut pairs = Vec::new();
    for pair in builtin_pairs() {
        let (Some(base), Some(with)) = (
            series_by_id.get(&pair.baseline),
            series_by_id.get(&pair.with_potential),
        ) else {
            continue;
        };
        pairs.push(pair.evaluate(base, with));
    }
    let all_ok = reports.iter().all(|r| r.as_expected)
        && pairs.iter().all(|p| p.status == CheckStatus::Pass);
    Ok(VerifySummary { reports, pairs, all_ok })
}

impl ContrastPair {
    /// Fit both series on the pair's column and demand the with-potential
    /// exponent sit below the baseline exponent by at least the margin.
    pub fn evaluate(
        &self,
        baseline: &DiagnosticSeries,
        with_potential: &DiagnosticSeries,
    ) -> PairResult {
        let fit = |series: &DiagnosticSeries, window: [f64; 2]| -> Result<f64> {
            let col = column_series(series, &self.column, self.sqrt)?;
            Ok(fit_power(&col, (window[0], window[1]))?.exponent)
        };
        match (
            fit(baseline, self.window_baseline),
            fit(with_potential, self.window_with),
        ) {
            (Ok(beta_baseline), Ok(beta_with)) => {
                let separation = beta_baseline - beta_with;
                let ok = separation >= self.margin;
                PairResult {
                    baseline: self.baseline.clone(),
                    with_potential: self.with_potential.clone(),
                    column: self.column.clone(),
                    beta_baseline,
                    beta_with,
                    separation,
                    margin: self.margin,
                    status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    detail: format!(
                        "beta {:.3} (baseline) vs {:.3} (with potential): separation {:.3}, margin {}",
                        beta_baseline, beta_with, separation, self.margin
                    ),
                }
            }
            (a, b) => {
                let err = a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default();
                PairResult {
                    baseline: self.baseline.clone(),
                    with_potential: self.with_potential.clone(),
                    column: self.column.clone(),
                    beta_baseline: f64::NAN,
                    beta_with: f64::NAN,
                    separation: f64::NAN,
                    margin: self.margin,
                    status: CheckStatus::Fail,
                    detail: format!("pair fit failed: {err}"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("decaylab-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn catalog_entries_round_trip_and_validate() {
        let catalog = builtin_catalog();
        assert!(catalog.len() >= 12, "catalog holds {} entries", catalog.len());
        let mut ids = std::collections::BTreeSet::new();
        for cfg in &catalog {
            assert!(ids.insert(cfg.id.clone()), "duplicate id {}", cfg.id);
            cfg.validate().unwrap_or_else(|e| panic!("{} invalid: {e}", cfg.id));
            let text = cfg.to_toml().unwrap();
            let back = ScenarioConfig::from_toml(&text)
                .unwrap_or_else(|e| panic!("{} does not reparse: {e}", cfg.id));
            assert_eq!(&back, cfg, "{} round trip", cfg.id);
            assert_eq!(back.fingerprint().unwrap(), cfg.fingerprint().unwrap());
        }
        // the anchor entries the catalog must carry
        for want in ["S4-gaussian-potential", "S7-damped-no-potential-contrast"] {
            assert!(ids.contains(want), "missing {want}");
        }
        // pairs reference real scenarios
        for pair in builtin_pairs() {
            assert!(ids.contains(&pair.baseline), "{} unknown", pair.baseline);
            assert!(ids.contains(&pair.with_potential), "{} unknown", pair.with_potential);
        }
    }

    #[test]
    fn config_parsing_rejects_garbage() {
        let good = builtin_catalog()[0].to_toml().unwrap();
        // unknown key
        let with_extra = format!("{good}\nbogus_key = 3\n");
        assert!(matches!(ScenarioConfig::from_toml(&with_extra), Err(Error::Config(_))));
        // negative grid size never reaches a solver
        let mut cfg = builtin_catalog()[0].clone();
        cfg.grid.points_per_axis = 2;
        assert!(cfg.validate().is_err());
        cfg.grid.points_per_axis = 0;
        assert!(cfg.validate().is_err());
        // bad expected verdict
        let mut cfg = builtin_catalog()[0].clone();
        cfg.expected = ScenarioOutcome::Fail;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        // unknown check column
        let mut cfg = builtin_catalog()[0].clone();
        cfg.checks.power_fits.push(PowerFitCheck {
            column: "no_such".into(),
            sqrt: false,
            window: None,
            beta_min: 0.0,
            beta_max: 1.0,
            min_r_squared: None,
        });
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn glob_semantics() {
        assert!(glob_match("S9*", "S9-heat-decay"));
        assert!(!glob_match("S9*", "S10-heat-localized"));
        assert!(glob_match("*heat*", "S10-heat-localized"));
        assert!(glob_match("S?-free-wave-1d", "S1-free-wave-1d"));
        assert!(glob_match("*", "anything"));
        assert!(glob_match("", ""));
        assert!(!glob_match("", "x"));
        assert!(!glob_match("S1", "S1-free-wave-1d"));
        assert!(glob_match("S12*", "S12-variable-damping"));
        assert!(glob_match("S12*", "S12-damped-plate"));
    }

    #[test]
    fn filter_catches_typos() {
        assert!(matches!(
            filter_catalog(Some("no-such-scenario")),
            Err(Error::UnknownScenario(_))
        ));
        let picked = filter_catalog(Some("S3*")).unwrap();
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].id, "S3-klein-gordon");
    }

    fn quick_config() -> ScenarioConfig {
        // small Klein-Gordon box: cheap and every check passes
        let mut cfg = filter_catalog(Some("S3*")).unwrap().remove(0);
        cfg.horizon = 20.0;
        cfg
    }

    #[test]
    fn klein_gordon_scenario_passes_end_to_end() {
        let cfg = quick_config();
        let report = run_scenario(&cfg, &EmitOptions::nowhere()).unwrap();
        assert_eq!(report.outcome, ScenarioOutcome::Pass, "checks: {:#?}", report.checks);
        assert!(report.as_expected);
        assert_eq!(report.fingerprint.len(), 64);
        assert!(report.checks.len() >= 3);
        assert!(report.csv_path.is_none());
    }

    #[test]
    fn off_support_data_reports_hypothesis_violated() {
        let cfg = filter_catalog(Some("S13*")).unwrap().remove(0);
        let (report, series) = run_scenario_with_series(&cfg).unwrap();
        assert_eq!(report.outcome, ScenarioOutcome::HypothesisViolated);
        assert!(report.as_expected);
        let series = series.unwrap();
        assert!(series.data.i0_sq.is_infinite());
        // the identity check still ran and passed; only the conditional
        // bounds became not-applicable
        let id = report.checks.iter().find(|c| c.name == "identity_residuals").unwrap();
        assert_eq!(id.status, CheckStatus::Pass);
        assert!(report
            .checks
            .iter()
            .any(|c| c.status == CheckStatus::NotApplicable));
    }

    #[test]
    fn hypothesis_monotone_under_support_shrinking() {
        // shrinking the data support inside the potential bump only
        // lowers the weighted integrals and never flips the verdict
        let base = filter_catalog(Some("S5*")).unwrap().remove(0);
        let mut last_j0 = f64::INFINITY;
        for radius in [0.8, 0.5, 0.3] {
            let mut cfg = base.clone();
            cfg.horizon = 20.0;
            cfg.u1 = DataSpec::SmoothBump {
                center: vec![0.0],
                radius,
                amplitude: 1.0,
            };
            cfg.u0 = DataSpec::SmoothBump {
                center: vec![0.0],
                radius,
                amplitude: 0.5,
            };
            for b in &mut cfg.checks.boundedness {
                b.window = Some([5.0, 20.0]);
            }
            let (report, series) = run_scenario_with_series(&cfg).unwrap();
            let series = series.unwrap();
            assert_eq!(
                report.outcome,
                ScenarioOutcome::Pass,
                "radius {radius}: {:#?}",
                report.checks
            );
            assert!(series.data.j0_sq <= last_j0, "j0 must shrink with the support");
            assert!(series.data.i0_sq.is_finite());
            last_j0 = series.data.j0_sq;
        }
    }

    #[test]
    fn scenario_reruns_are_bit_identical() {
        let cfg = quick_config();
        let (r1, s1) = run_scenario_with_series(&cfg).unwrap();
        let (r2, s2) = run_scenario_with_series(&cfg).unwrap();
        assert_eq!(report_json(&r1).unwrap(), report_json(&r2).unwrap());
        let (s1, s2) = (s1.unwrap(), s2.unwrap());
        assert_eq!(csv_string(&s1), csv_string(&s2));
        assert_eq!(svg_string(&r1, &s1), svg_string(&r2, &s2));
    }

    #[test]
    fn emitted_files_land_and_are_deterministic() {
        let dir = tmp_dir("emit");
        let cfg = quick_config();
        let emit = EmitOptions::into_dir(&dir, true);
        let report = run_scenario(&cfg, &emit).unwrap();
        // recorded paths are bare file names, resolved against the out dir
        assert_eq!(report.csv_path.as_deref(), Some("S3-klein-gordon.csv"));
        let csv_file = dir.join(report.csv_path.as_ref().unwrap());
        let svg_file = dir.join(report.svg_path.as_ref().unwrap());
        let csv1 = std::fs::read(&csv_file).unwrap();
        let svg1 = std::fs::read(&svg_file).unwrap();
        let json1 =
            std::fs::read(dir.join(format!("{}.report.json", cfg.id))).unwrap();
        // second emission overwrites with identical bytes
        let _ = run_scenario(&cfg, &emit).unwrap();
        let csv2 = std::fs::read(&csv_file).unwrap();
        let svg2 = std::fs::read(&svg_file).unwrap();
        let json2 =
            std::fs::read(dir.join(format!("{}.report.json", cfg.id))).unwrap();
        assert_eq!(csv1, csv2);
        assert_eq!(svg1, svg2);
        assert_eq!(json1, json2);
        let header = String::from_utf8(csv1).unwrap();
        assert!(header.starts_with("t,l2_u_sq,energy,"));
        assert!(String::from_utf8(svg1).unwrap().starts_with("<svg"));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn zero_data_emits_flat_but_valid_artifacts() {
        let mut cfg = quick_config();
        cfg.id = "zero-data-probe".into();
        cfg.u0 = DataSpec::Zero;
        cfg.u1 = DataSpec::Zero;
        cfg.checks.boundedness.clear(); // nothing to bound against
        let (report, series) = run_scenario_with_series(&cfg).unwrap();
        let series = series.unwrap();
        assert_eq!(report.outcome, ScenarioOutcome::Pass);
        let csv = csv_string(&series);
        for line in csv.lines().skip(1) {
            let mut cols = line.split(',');
            cols.next(); // t varies
            for v in cols {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0);
            }
        }
        let svg = svg_string(&report, &series);
        assert!(svg.contains("</svg>"));
    }
}
