//! Sampled diagnostics and the identity / inequality checks built on them.
//!
//! Every check here evaluates both sides of an inequality independently
//! from the raw samples; nothing is reused across sides. The identities
//! themselves (the antiderivative-field identity per kind and the energy
//! dissipation identity) are reported as signed residuals in each sample,
//! and the inequality checks allow a slack of
//! `ABS_FLOOR + SLACK_COEFF * dt^2 * (1 + t) * (1 + scale)` because the
//! continuum identities they come from are reproduced by the march only to
//! second order in `dt`.

use serde::Serialize;

use crate::evolve::{self, EquationKind, EvolutionState, Problem};
use crate::numgrid::Field;
use crate::potential::{self, weighted_data_integral, DataFunctionals};
use crate::{Error, Result};

/// Absolute floor below which inequality violations are roundoff.
pub const ABS_FLOOR: f64 = 1e-9;

/// Coefficient of the `dt^2 (1+t)` discretization slack. Calibrated by the
/// dt-halving residual tests: the worst measured coefficient across the
/// five kinds is about 8 (plate energy residual at early times), so 16
/// leaves a factor-two margin while staying O(dt^2) tight.
pub const SLACK_COEFF: f64 = 16.0;

/// Discretization slack for an inequality with right-hand scale `scale`.
pub fn identity_slack(dt: f64, t: f64, scale: f64) -> f64 {
    ABS_FLOOR + SLACK_COEFF * dt * dt * (1.0 + t) * (1.0 + scale.abs())
}

/// One diagnostic record. The first 13 fields are the canonical CSV
/// columns, in order; the rest carry what the inequality checks need
/// beyond them.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticSample {
    pub t: f64,
    pub l2_u_sq: f64,
    pub energy: f64,
    pub l2_ut_sq: f64,
    pub grad_u_sq: f64,
    pub pot_u_sq: f64,
    pub cum_l2_u_sq: f64,
    pub cum_l2_ut_sq: f64,
    pub v_residual: f64,
    pub energy_residual: f64,
    pub weighted_energy: f64,
    pub weighted_l2: f64,
    pub boundary_activity: f64,
    /// The kind's stiffness of `u`: equals `grad_u_sq` except for plates,
    /// where it is `|lap u|^2`.
    pub stiff_u_sq: f64,
    pub v_grad_sq: f64,
    /// Stiffness of the antiderivative field (grad or `|lap v|^2`).
    pub v_stiff_sq: f64,
    pub v_pot_sq: f64,
    pub cum_stiff_pot: f64,
    pub cum_weighted_u_sq: f64,
    pub cum_weighted_ut_sq: f64,
}

/// Canonical CSV column names, in file order.
pub const CSV_COLUMNS: [&str; 13] = [
    "t",
    "l2_u_sq",
    "energy",
    "l2_ut_sq",
    "grad_u_sq",
    "pot_u_sq",
    "cum_l2_u_sq",
    "cum_l2_ut_sq",
    "v_residual",
    "energy_residual",
    "weighted_energy",
    "weighted_l2",
    "boundary_activity",
];

impl DiagnosticSample {
    /// The canonical column values, aligned with [`CSV_COLUMNS`].
    pub fn csv_values(&self) -> [f64; 13] {
        [
            self.t,
            self.l2_u_sq,
            self.energy,
            self.l2_ut_sq,
            self.grad_u_sq,
            self.pot_u_sq,
            self.cum_l2_u_sq,
            self.cum_l2_ut_sq,
            self.v_residual,
            self.energy_residual,
            self.weighted_energy,
            self.weighted_l2,
            self.boundary_activity,
        ]
    }

    /// Assemble the record for the current state. `g` is the damped-kind
    /// source `u1 + a u0` (ignored otherwise); `vel` is the velocity field
    /// the caller reconstructed (exact `u1` at `t = 0`, centered difference
    /// later, `L u` for heat).
    pub fn compute(
        problem: &Problem,
        data: &DataFunctionals,
        g: &Field,
        state: &EvolutionState,
        vel: &Field,
    ) -> DiagnosticSample {
        let kind = problem.kind();
        let u = state.u();
        let v = state.v_accum();
        let t = state.t();

        let l2_u_sq = state.l2_u_sq();
        let l2_ut_sq = vel.l2_norm_sq();
        let grad_u_sq = u.grad_norm_sq();
        let pot_u_sq = potential::quadratic_weighted(problem.potential(), u);
        let stiff_u_sq =
            if kind.is_plate() { u.laplacian().l2_norm_sq() } else { grad_u_sq };
        let energy = match kind {
            EquationKind::Heat => 0.5 * (stiff_u_sq + pot_u_sq),
            _ => 0.5 * (l2_ut_sq + stiff_u_sq + pot_u_sq),
        };

        let v_grad_sq = v.grad_norm_sq();
        let v_stiff_sq =
            if kind.is_plate() { v.laplacian().l2_norm_sq() } else { v_grad_sq };
        let v_pot_sq = potential::quadratic_weighted(problem.potential(), v);
        let inner_data_v = match kind {
            EquationKind::Heat => problem.u0().inner(v),
            EquationKind::Wave | EquationKind::Plate => problem.u1().inner(v),
            _ => g.inner(v),
        }
        .expect("fields share the problem grid");

        let v_residual = v_residual_from_terms(
            kind,
            l2_u_sq,
            v_stiff_sq,
            v_pot_sq,
            state.cum_l2_u_sq(),
            state.cum_weighted_u_sq(),
            inner_data_v,
            data.l2_u0_sq,
        );
        let energy_residual = energy_residual_from_terms(
            kind,
            energy,
            l2_u_sq,
            state.cum_weighted_ut_sq(),
            state.cum_stiff_pot(),
            data,
        );

        let layer = u.boundary_layer_max(2);
        let boundary_activity = if layer == 0.0 { 0.0 } else { layer / u.max_abs() };

        DiagnosticSample {
            t,
            l2_u_sq,
            energy,
            l2_ut_sq,
            grad_u_sq,
            pot_u_sq,
            cum_l2_u_sq: state.cum_l2_u_sq(),
            cum_l2_ut_sq: state.cum_l2_ut_sq(),
            v_residual,
            energy_residual,
            weighted_energy: (1.0 + t) * (1.0 + t) * energy,
            weighted_l2: (1.0 + t) * l2_u_sq,
            boundary_activity,
            stiff_u_sq,
            v_grad_sq,
            v_stiff_sq,
            v_pot_sq,
            cum_stiff_pot: state.cum_stiff_pot(),
            cum_weighted_u_sq: state.cum_weighted_u_sq(),
            cum_weighted_ut_sq: state.cum_weighted_ut_sq(),
        }
    }
}

/// A full simulation record: grid and march metadata, the initial-data
/// functionals, and the ordered samples (first at `t = 0`).
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticSeries {
    pub kind: EquationKind,
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub dt: f64,
    pub horizon: f64,
    pub sample_every: usize,
    /// True when the damping profile is identically one (the coefficient
    /// for which the damped lemma chain is stated).
    pub unit_damping: bool,
    /// Configuration digest, filled in by the scenario runner.
    pub fingerprint: String,
    pub data: DataFunctionals,
    pub samples: Vec<DiagnosticSample>,
    /// Relative spread of the conserved staggered energy across the run
    /// (undamped second-order kinds only).
    pub shadow_drift: Option<f64>,
    pub warnings: Vec<String>,
}

impl DiagnosticSeries {
    pub fn final_sample(&self) -> &DiagnosticSample {
        self.samples.last().expect("series always has the t = 0 sample")
    }

    /// `(t, column)` pairs for one named canonical column.
    pub fn column(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let idx = CSV_COLUMNS.iter().position(|c| *c == name)?;
        Some(self.samples.iter().map(|s| (s.t, s.csv_values()[idx])).collect())
    }
}

#[allow(clippy::too_many_arguments)]
fn v_residual_from_terms(
    kind: EquationKind,
    l2_u_sq: f64,
    v_stiff_sq: f64,
    v_pot_sq: f64,
    cum_l2_u_sq: f64,
    cum_weighted_u_sq: f64,
    inner_data_v: f64,
    l2_u0_sq: f64,
) -> f64 {
    match kind {
        EquationKind::Wave | EquationKind::Plate => {
            0.5 * l2_u_sq + 0.5 * v_stiff_sq + 0.5 * v_pot_sq
                - 0.5 * l2_u0_sq
                - inner_data_v
        }
        EquationKind::DampedWave | EquationKind::DampedPlate => {
            0.5 * l2_u_sq
                + 0.5 * v_stiff_sq
                + 0.5 * v_pot_sq
                + cum_weighted_u_sq
                - 0.5 * l2_u0_sq
                - inner_data_v
        }
        EquationKind::Heat => {
            cum_l2_u_sq + 0.5 * v_stiff_sq + 0.5 * v_pot_sq - inner_data_v
        }
    }
}

fn energy_residual_from_terms(
    kind: EquationKind,
    energy: f64,
    l2_u_sq: f64,
    cum_weighted_ut_sq: f64,
    cum_stiff_pot: f64,
    data: &DataFunctionals,
) -> f64 {
    match kind {
        EquationKind::Wave | EquationKind::Plate => energy - data.e0,
        EquationKind::DampedWave | EquationKind::DampedPlate => {
            energy + cum_weighted_ut_sq - data.e0
        }
        EquationKind::Heat => l2_u_sq + 2.0 * cum_stiff_pot - data.l2_u0_sq,
    }
}

/// Total energy `E = 1/2 (|u_t|^2 + stiffness + |sqrt(V) u|^2)` from
/// explicit fields. Heat has no kinetic energy, so the kind is rejected.
pub fn energy(kind: EquationKind, ut: &Field, u: &Field, v: &Field) -> Result<f64> {
    if kind == EquationKind::Heat {
        return Err(Error::KindNotSupported { op: "energy", kind: kind.as_str() });
    }
    if ut.grid() != u.grid() || u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let stiff = if kind.is_plate() { u.laplacian().l2_norm_sq() } else { u.grad_norm_sq() };
    Ok(0.5 * (ut.l2_norm_sq() + stiff + potential::quadratic_weighted(v, u)))
}

/// The staggered quadratic form conserved exactly by the undamped leapfrog
/// march: `1/2 |(u - u_prev)/dt|^2 + 1/2 B(u, u_prev)` with `B` the
/// stiffness-plus-potential bilinear form.
pub fn shadow_energy(problem: &Problem, state: &EvolutionState) -> Result<f64> {
    let kind = problem.kind();
    if !kind.is_second_order() || kind.is_damped() {
        return Err(Error::KindNotSupported {
            op: "shadow_energy",
            kind: kind.as_str(),
        });
    }
    let dt = state.dt();
    let diff_sq: f64 = {
        let q = problem.grid().quad_weight();
        q * crate::numgrid::csum(
            state
                .u()
                .values()
                .iter()
                .zip(state.u_prev().values())
                .map(|(a, b)| (a - b) * (a - b)),
        )
    };
    Ok(0.5 * diff_sq / (dt * dt)
        + 0.5 * evolve::mixed_stiff_pot(problem, state.u(), state.u_prev()))
}

/// Signed residual of the kind's antiderivative-field identity at the
/// current state, recomputed from scratch (independent of the sample
/// records).
pub fn v_identity_residual(problem: &Problem, state: &EvolutionState) -> f64 {
    let kind = problem.kind();
    let v = state.v_accum();
    let v_stiff_sq =
        if kind.is_plate() { v.laplacian().l2_norm_sq() } else { v.grad_norm_sq() };
    let v_pot_sq = potential::quadratic_weighted(problem.potential(), v);
    let inner_data_v = match kind {
        EquationKind::Heat => problem.u0().inner(v),
        EquationKind::Wave | EquationKind::Plate => problem.u1().inner(v),
        _ => {
            let mut g = problem.u1().clone();
            for ((gg, a), u) in g
                .values_mut()
                .iter_mut()
                .zip(problem.damping().values())
                .zip(problem.u0().values())
            {
                *gg += a * u;
            }
            g.inner(v)
        }
    }
    .expect("fields share the problem grid");
    v_residual_from_terms(
        kind,
        state.l2_u_sq(),
        v_stiff_sq,
        v_pot_sq,
        state.cum_l2_u_sq(),
        state.cum_weighted_u_sq(),
        inner_data_v,
        problem.u0().l2_norm_sq(),
    )
}

/// Largest absolute energy-identity residual across the samples of a
/// damped series.
pub fn damped_energy_identity_residual(series: &DiagnosticSeries) -> Result<f64> {
    if !series.kind.is_damped() {
        return Err(Error::KindNotSupported {
            op: "damped_energy_identity_residual",
            kind: series.kind.as_str(),
        });
    }
    Ok(series
        .samples
        .iter()
        .map(|s| s.energy_residual.abs())
        .fold(0.0, f64::max))
}

/// Outcome of an inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The right-hand side is infinite because the data sits partly
    /// outside the potential support; the bound says nothing.
    NotApplicable,
}

/// Per-inequality summary: worst ratio, worst slack-adjusted violation,
/// and where it happened.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub status: CheckStatus,
    /// max over samples of LHS/RHS (0 when both sides are 0).
    pub max_ratio: f64,
    /// max over samples of LHS - RHS - slack; &le; 0 when passing.
    pub max_violation: f64,
    pub worst_t: f64,
}

fn sweep_inequality(
    name: &str,
    dt: f64,
    samples: &[DiagnosticSample],
    mut sides: impl FnMut(&DiagnosticSample) -> (f64, f64),
) -> InequalityReport {
    let mut max_ratio = 0.0f64;
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_t = 0.0;
    let mut applicable = true;
    for s in samples {
        let (lhs, rhs) = sides(s);
        if !rhs.is_finite() {
            applicable = false;
            break;
        }
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs.abs() <= ABS_FLOOR {
            0.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        let violation = lhs - rhs - identity_slack(dt, s.t, rhs);
        if violation > max_violation {
            max_violation = violation;
            worst_t = s.t;
        }
    }
    if !applicable {
        return InequalityReport {
            name: name.to_string(),
            status: CheckStatus::NotApplicable,
            max_ratio: 0.0,
            max_violation: 0.0,
            worst_t: 0.0,
        };
    }
    InequalityReport {
        name: name.to_string(),
        status: if max_violation <= 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
        max_ratio,
        max_violation,
        worst_t,
    }
}

/// Result of the absorbed antiderivative-field inequality.
#[derive(Debug, Clone, Serialize)]
pub struct AbsorptionReport {
    pub status: CheckStatus,
    /// The constant right-hand side (infinite RHS reports NotApplicable).
    pub rhs: f64,
    pub max_ratio: f64,
    pub max_violation: f64,
    pub worst_t: f64,
}

/// Check the absorbed form of the antiderivative identity at every sample:
/// after the Schwarz-Young absorption the potential term keeps only a
/// quarter weight and the data inner product becomes the constant weighted
/// integral, so for wave kinds
/// `1/2 |u|^2 + 1/2 stiff(v) + 1/4 |sqrt(V) v|^2 <= 1/2 |u0|^2 + W`,
/// damped kinds add the cumulative damped integral on the left and use
/// `W(u1 + a u0)`, and heat reads
/// `int |u|^2 + 1/2 |grad v|^2 + 1/4 |sqrt(V) v|^2 <= W(u0)`.
pub fn absorption_check(problem: &Problem, series: &DiagnosticSeries) -> Result<AbsorptionReport> {
    let kind = series.kind;
    let w = match kind {
        EquationKind::Wave | EquationKind::Plate => {
            weighted_data_integral(problem.u1(), problem.potential())?
        }
        EquationKind::Heat => weighted_data_integral(problem.u0(), problem.potential())?,
        _ => {
            let mut g = problem.u1().clone();
            for ((gg, a), u) in g
                .values_mut()
                .iter_mut()
                .zip(problem.damping().values())
                .zip(problem.u0().values())
            {
                *gg += a * u;
            }
            weighted_data_integral(&g, problem.potential())?
        }
    };
    let rhs = match kind {
        EquationKind::Heat => w,
        _ => 0.5 * series.data.l2_u0_sq + w,
    };
    if !rhs.is_finite() {
        return Ok(AbsorptionReport {
            status: CheckStatus::NotApplicable,
            rhs,
            max_ratio: 0.0,
            max_violation: 0.0,
            worst_t: 0.0,
        });
    }
    let report = sweep_inequality("absorption", series.dt, &series.samples, |s| {
        let lhs = match kind {
            EquationKind::Wave | EquationKind::Plate => {
                0.5 * s.l2_u_sq + 0.5 * s.v_stiff_sq + 0.25 * s.v_pot_sq
            }
            EquationKind::DampedWave | EquationKind::DampedPlate => {
                0.5 * s.l2_u_sq
                    + 0.5 * s.v_stiff_sq
                    + 0.25 * s.v_pot_sq
                    + s.cum_weighted_u_sq
            }
            EquationKind::Heat => {
                s.cum_l2_u_sq + 0.5 * s.v_stiff_sq + 0.25 * s.v_pot_sq
            }
        };
        (lhs, rhs)
    });
    Ok(AbsorptionReport {
        status: report.status,
        rhs,
        max_ratio: report.max_ratio,
        max_violation: report.max_violation,
        worst_t: report.worst_t,
    })
}

/// Result of the damped-wave lemma chain.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaChainReport {
    pub status: CheckStatus,
    pub items: Vec<InequalityReport>,
}

fn combine_statuses(items: &[InequalityReport]) -> CheckStatus {
    if items.iter().any(|i| i.status == CheckStatus::Fail) {
        CheckStatus::Fail
    } else if items.iter().any(|i| i.status == CheckStatus::NotApplicable) {
        CheckStatus::NotApplicable
    } else {
        CheckStatus::Pass
    }
}

/// Evaluate the damped-wave decay chain (stated for unit damping):
///
/// 1. `|u(t)|^2 <= 4 I0^2` with `I0^2 = 3E(0) + 1/2 |u0|^2 + (u1, u0)`
/// 2. `int_0^t E ds <= I0^2 + E(0)`
/// 3. `(1+t)^2 E(t) <= 9E(0) + 6I0^2 + (u1,u0) + int_0^t |u|^2 ds`
/// 4. `(1+t)/4 |u(t)|^2 <= 6E(0) + 5I0^2 + (u1,u0) + int_0^t |u|^2 ds`
/// 5. `int_0^t |u|^2 ds <= 1/2 |u0|^2 + K0^2` (the absorbed bound; the
///    only link that needs the potential hypothesis)
pub fn lemma_chain_check(series: &DiagnosticSeries) -> Result<LemmaChainReport> {
    if series.kind != EquationKind::DampedWave {
        return Err(Error::KindNotSupported {
            op: "lemma_chain_check",
            kind: series.kind.as_str(),
        });
    }
    if !series.unit_damping {
        return Err(Error::InvalidSpec(
            "lemma_chain_check is stated for unit damping only".into(),
        ));
    }
    let d = &series.data;
    let i0_sq = d.lemma31_i0_sq;
    let dt = series.dt;
    let items = vec![
        sweep_inequality("l2_bound", dt, &series.samples, |s| {
            (s.l2_u_sq, 4.0 * i0_sq)
        }),
        sweep_inequality("energy_time_integral", dt, &series.samples, |s| {
            (0.5 * (s.cum_l2_ut_sq + s.cum_stiff_pot), i0_sq + d.e0)
        }),
        sweep_inequality("weighted_energy_bound", dt, &series.samples, |s| {
            (
                s.weighted_energy,
                9.0 * d.e0 + 6.0 * i0_sq + d.inner_u1_u0 + s.cum_l2_u_sq,
            )
        }),
        sweep_inequality("weighted_l2_bound", dt, &series.samples, |s| {
            (
                0.25 * (1.0 + s.t) * s.l2_u_sq,
                6.0 * d.e0 + 5.0 * i0_sq + d.inner_u1_u0 + s.cum_l2_u_sq,
            )
        }),
        sweep_inequality("l2_time_integral", dt, &series.samples, |s| {
            (s.cum_l2_u_sq, 0.5 * d.l2_u0_sq + d.k0_sq)
        }),
    ];
    Ok(LemmaChainReport { status: combine_statuses(&items), items })
}

/// Result of the heat decay checks.
#[derive(Debug, Clone, Serialize)]
pub struct HeatDissipationReport {
    pub status: CheckStatus,
    pub items: Vec<InequalityReport>,
}

/// Heat-kind checks: monotone L2 decay, the weighted bound
/// `(1+t)|u(t)|^2 <= |u0|^2 + int_0^t |u|^2 ds`, the absorbed time
/// integral `int_0^t |u|^2 ds <= K0h^2`, and their combination
/// `(1+t)|u(t)|^2 <= |u0|^2 + K0h^2`.
pub fn heat_dissipation_check(series: &DiagnosticSeries) -> Result<HeatDissipationReport> {
    if series.kind != EquationKind::Heat {
        return Err(Error::KindNotSupported {
            op: "heat_dissipation_check",
            kind: series.kind.as_str(),
        });
    }
    let d = &series.data;
    let dt = series.dt;

    // sample-to-sample monotonicity with 1e-12 relative slack
    let mut mono_worst = 0.0f64;
    let mut mono_t = 0.0;
    for pair in series.samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let excess = b.l2_u_sq - a.l2_u_sq * (1.0 + 1e-12);
        if excess > mono_worst {
            mono_worst = excess;
            mono_t = b.t;
        }
    }
    let monotone = InequalityReport {
        name: "l2_monotone".to_string(),
        status: if mono_worst <= 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
        max_ratio: 0.0,
        max_violation: mono_worst,
        worst_t: mono_t,
    };

    let mut items = vec![
        monotone,
        sweep_inequality("weighted_l2_vs_integral", dt, &series.samples, |s| {
            (s.weighted_l2, d.l2_u0_sq + s.cum_l2_u_sq)
        }),
        sweep_inequality("l2_time_integral", dt, &series.samples, |s| {
            (s.cum_l2_u_sq, d.k0h_sq)
        }),
        sweep_inequality("weighted_l2_combined", dt, &series.samples, |s| {
            (s.weighted_l2, d.l2_u0_sq + d.k0h_sq)
        }),
    ];
    // An infinite K0h makes the last two vacuous, not failed.
    for item in items.iter_mut().skip(2) {
        if !d.k0h_sq.is_finite() {
            item.status = CheckStatus::NotApplicable;
            item.max_ratio = 0.0;
            item.max_violation = 0.0;
        }
    }
    Ok(HeatDissipationReport { status: combine_statuses(&items), items })
}
