//! Explicit time integration for the five equation kinds.
//!
//! Everything here is an explicit Euler-family update on the Dirichlet
//! grid: leapfrog for the second-order kinds, with the damping term folded
//! in nodewise (a scalar division per node, never a linear solve), and a
//! two-stage improved Euler step for heat so the trajectory, and with it
//! every identity residual built on top of it, is second-order in `dt`
//! across all kinds. Boundaries are re-zeroed after every update.
//!
//! A committed step also advances the running integrals the identity and
//! absorption checks consume: the antiderivative field `v(t) = int_0^t u`
//! and the cumulative norms are accumulated with trapezoid / midpoint
//! rules, matching the second-order accuracy of the trajectory itself.
//!
//! Stability limits come from the sharp spectral bound
//! `rho(-lap_h) < 4 dim / h^2`:
//!
//! * wave kinds: `dt_max = 2 / sqrt(4 dim/h^2 + V_max)`
//! * heat:       `dt_max = 2 / (4 dim/h^2 + V_max)`
//! * plate kinds: `dt_max = 2 / sqrt((4 dim/h^2)^2 + V_max)`
//!
//! The heat update has amplification factor `1 - z + z^2/2` over the same
//! real interval `(0, 2]` as forward Euler's `1 - z`, so the heat limit is
//! unchanged by the two-stage step and the discrete L2 norm still decays
//! monotonically.

use serde::{Deserialize, Serialize};

use crate::numgrid::{csum, Field, Grid};
use crate::potential::{
    self, compute_data_functionals, DampingSpec, PotentialSpec,
};
use crate::functionals::{DiagnosticSample, DiagnosticSeries};
use crate::{Error, Result};

/// Which evolution equation a problem integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    Wave,
    DampedWave,
    Heat,
    Plate,
    DampedPlate,
}

impl EquationKind {
    pub const ALL: [EquationKind; 5] = [
        EquationKind::Wave,
        EquationKind::DampedWave,
        EquationKind::Heat,
        EquationKind::Plate,
        EquationKind::DampedPlate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EquationKind::Wave => "wave",
            EquationKind::DampedWave => "damped_wave",
            EquationKind::Heat => "heat",
            EquationKind::Plate => "plate",
            EquationKind::DampedPlate => "damped_plate",
        }
    }

    pub fn is_second_order(self) -> bool {
        !matches!(self, EquationKind::Heat)
    }

    pub fn is_plate(self) -> bool {
        matches!(self, EquationKind::Plate | EquationKind::DampedPlate)
    }

    pub fn is_damped(self) -> bool {
        matches!(self, EquationKind::DampedWave | EquationKind::DampedPlate)
    }

    /// How many grid cells per axis a single step can spread influence:
    /// one for the 3/5-point stencil, two when the operator is applied
    /// twice per step (biharmonic, and the two-stage heat update).
    fn cells_per_step(self) -> f64 {
        match self {
            EquationKind::Wave | EquationKind::DampedWave => 1.0,
            _ => 2.0,
        }
    }
}

impl std::fmt::Display for EquationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Largest stable time step for `kind` on `grid` with potential bound
/// `v_max` (the damping term never tightens the limit; it only adds
/// dissipation).
pub fn cfl_dt_max(kind: EquationKind, grid: Grid, v_max: f64) -> f64 {
    let p = 4.0 * grid.dim() as f64 / (grid.h() * grid.h());
    match kind {
        EquationKind::Wave | EquationKind::DampedWave => 2.0 / (p + v_max).sqrt(),
        EquationKind::Heat => 2.0 / (p + v_max),
        EquationKind::Plate | EquationKind::DampedPlate => 2.0 / (p * p + v_max).sqrt(),
    }
}

/// `safety * cfl_dt_max(..)`, validating `v_max >= 0` and
/// `safety in (0, 1]`.
pub fn cfl_dt(kind: EquationKind, grid: Grid, v_max: f64, safety: f64) -> Result<f64> {
    if !v_max.is_finite() || v_max < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "potential bound must be finite and nonnegative, got {v_max}"
        )));
    }
    if !safety.is_finite() || safety <= 0.0 || safety > 1.0 {
        return Err(Error::InvalidSpec(format!(
            "safety factor must lie in (0, 1], got {safety}"
        )));
    }
    Ok(safety * cfl_dt_max(kind, grid, v_max))
}

/// A fully evaluated initial-value problem: equation kind, potential and
/// damping profiles on the grid, and Dirichlet initial data.
#[derive(Debug, Clone)]
pub struct Problem {
    kind: EquationKind,
    grid: Grid,
    potential: Field,
    damping: Field,
    u0: Field,
    u1: Field,
    v_max: f64,
}

impl Problem {
    pub fn new(
        kind: EquationKind,
        grid: Grid,
        potential: &PotentialSpec,
        damping: &DampingSpec,
        u0: Field,
        u1: Field,
    ) -> Result<Problem> {
        let v = potential.evaluate(grid)?;
        let a = damping.evaluate(grid)?;
        Problem::from_fields(kind, v, a, u0, u1)
    }

    /// Build a problem from already-evaluated profile fields. Initial data
    /// is projected onto the Dirichlet subspace (boundary entries zeroed);
    /// the profiles are validated instead of silently fixed.
    pub fn from_fields(
        kind: EquationKind,
        potential: Field,
        damping: Field,
        mut u0: Field,
        mut u1: Field,
    ) -> Result<Problem> {
        let grid = potential.grid();
        if damping.grid() != grid || u0.grid() != grid || u1.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if potential.values().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSpec(
                "potential must be nonnegative and finite".into(),
            ));
        }
        if kind.is_damped() {
            if damping.values().iter().any(|a| !a.is_finite() || *a <= 0.0) {
                return Err(Error::InvalidSpec(
                    "damped kinds need a damping profile bounded below by a positive constant"
                        .into(),
                ));
            }
        } else if damping.values().iter().any(|a| *a != 0.0) {
            return Err(Error::InvalidSpec(format!(
                "kind `{kind}` does not take a damping profile"
            )));
        }
        if kind == EquationKind::Heat && u1.values().iter().any(|x| *x != 0.0) {
            return Err(Error::InvalidSpec(
                "heat problems have no velocity data; u1 must be zero".into(),
            ));
        }
        u0.project_dirichlet();
        u1.project_dirichlet();
        let v_max = potential.max_abs();
        Ok(Problem { kind, grid, potential, damping, u0, u1, v_max })
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn potential(&self) -> &Field {
        &self.potential
    }

    pub fn damping(&self) -> &Field {
        &self.damping
    }

    pub fn u0(&self) -> &Field {
        &self.u0
    }

    pub fn u1(&self) -> &Field {
        &self.u1
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn data_functionals(&self) -> Result<potential::DataFunctionals> {
        compute_data_functionals(&self.u0, &self.u1, &self.potential, self.kind)
    }

    /// Max-norm radius of the initial data support, or `None` for
    /// identically zero data.
    pub fn support_radius(&self) -> Option<f64> {
        let g = self.grid;
        let n = g.points_per_axis();
        let mut r: Option<f64> = None;
        for (flat, (a, b)) in self.u0.values().iter().zip(self.u1.values()).enumerate() {
            if *a == 0.0 && *b == 0.0 {
                continue;
            }
            let here = match g.dim() {
                1 => g.coord(flat).abs(),
                _ => {
                    let (i, j) = (flat / n, flat % n);
                    g.coord(i).abs().max(g.coord(j).abs())
                }
            };
            r = Some(r.map_or(here, |cur: f64| cur.max(here)));
        }
        r
    }
}

/// `L u`: `lap u - V u` for the wave and heat families, `-lap(lap u) - V u`
/// for the plate kinds. Output is Dirichlet whenever `u` is.
pub(crate) fn apply_operator(problem: &Problem, u: &Field) -> Field {
    let mut out = if problem.kind.is_plate() {
        let mut b = u.biharmonic();
        for x in b.values_mut() {
            *x = -*x;
        }
        b
    } else {
        u.laplacian()
    };
    for ((o, uu), vv) in out
        .values_mut()
        .iter_mut()
        .zip(u.values())
        .zip(problem.potential.values())
    {
        *o -= vv * uu;
    }
    out
}

/// The kind's stiffness quadratic form: `|grad u|^2` for wave and heat,
/// `|lap u|^2` for plates.
pub(crate) fn stiffness_sq(problem: &Problem, u: &Field) -> f64 {
    if problem.kind.is_plate() {
        u.laplacian().l2_norm_sq()
    } else {
        u.grad_norm_sq()
    }
}

/// Mixed stiffness-plus-potential bilinear form between two fields, the
/// pairing under which leapfrog conserves its shadow energy exactly.
pub(crate) fn mixed_stiff_pot(problem: &Problem, x: &Field, y: &Field) -> f64 {
    let s = if problem.kind.is_plate() {
        let (lx, ly) = (x.laplacian(), y.laplacian());
        let q = x.grid().quad_weight();
        q * csum(lx.values().iter().zip(ly.values()).map(|(a, b)| a * b))
    } else {
        x.grad_inner(y).expect("same grid")
    };
    s + potential::mixed_weighted(&problem.potential, x, y)
}

/// March state for one problem: the trajectory pair, the antiderivative
/// field, and the running time integrals the checks consume.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    dt: f64,
    step: u64,
    u: Field,
    u_prev: Field,
    v_accum: Field,
    cum_l2_u_sq: f64,
    cum_l2_ut_sq: f64,
    cum_weighted_u_sq: f64,
    cum_weighted_ut_sq: f64,
    cum_stiff_pot: f64,
    // functionals of the current `u`, cached for the trapezoid updates
    cache_l2_u_sq: f64,
    cache_stiff_pot: f64,
    cache_weighted_u_sq: f64,
    // shadow-energy extrema (undamped second-order kinds only)
    shadow_first: f64,
    shadow_min: f64,
    shadow_max: f64,
    blowup_threshold: f64,
}

impl EvolutionState {
    /// Set up the march at `t = 0`. For second-order kinds the virtual
    /// pre-step value `u^{-1} = u0 - dt u1 + dt^2/2 (L u0 - a u1)` seeds
    /// the leapfrog so the first committed step reproduces the order-2
    /// Taylor start exactly.
    ///
    /// `dt` is only checked for positivity here; callers own the stability
    /// bound (see [`run_simulation`], which enforces it).
    pub fn new(problem: &Problem, dt: f64) -> Result<EvolutionState> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidSpec(format!("dt must be positive, got {dt}")));
        }
        let u0 = &problem.u0;
        let u_prev = if problem.kind.is_second_order() {
            let rhs0 = apply_operator(problem, u0);
            let mut back = u0.clone();
            for (((b, u1v), r), av) in back
                .values_mut()
                .iter_mut()
                .zip(problem.u1.values())
                .zip(rhs0.values())
                .zip(problem.damping.values())
            {
                *b += -dt * u1v + 0.5 * dt * dt * (r - av * u1v);
            }
            back.project_dirichlet();
            back
        } else {
            u0.clone()
        };
        let scale = u0.l2_norm().max(problem.u1.l2_norm());
        Ok(EvolutionState {
            dt,
            step: 0,
            u: u0.clone(),
            u_prev,
            v_accum: Field::zeros(problem.grid),
            cum_l2_u_sq: 0.0,
            cum_l2_ut_sq: 0.0,
            cum_weighted_u_sq: 0.0,
            cum_weighted_ut_sq: 0.0,
            cum_stiff_pot: 0.0,
            cache_l2_u_sq: u0.l2_norm_sq(),
            cache_stiff_pot: stiffness_sq(problem, u0)
                + potential::quadratic_weighted(&problem.potential, u0),
            cache_weighted_u_sq: if problem.kind.is_damped() {
                potential::quadratic_weighted(&problem.damping, u0)
            } else {
                0.0
            },
            shadow_first: f64::NAN,
            shadow_min: f64::INFINITY,
            shadow_max: f64::NEG_INFINITY,
            blowup_threshold: 1e6 * scale,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn u(&self) -> &Field {
        &self.u
    }

    pub fn u_prev(&self) -> &Field {
        &self.u_prev
    }

    /// Trapezoid accumulation of `int_0^t u ds`.
    pub fn v_accum(&self) -> &Field {
        &self.v_accum
    }

    pub fn cum_l2_u_sq(&self) -> f64 {
        self.cum_l2_u_sq
    }

    pub fn cum_l2_ut_sq(&self) -> f64 {
        self.cum_l2_ut_sq
    }

    pub fn cum_weighted_u_sq(&self) -> f64 {
        self.cum_weighted_u_sq
    }

    pub fn cum_weighted_ut_sq(&self) -> f64 {
        self.cum_weighted_ut_sq
    }

    /// `int_0^t (stiffness + potential) ds`, trapezoid.
    pub fn cum_stiff_pot(&self) -> f64 {
        self.cum_stiff_pot
    }

    pub fn l2_u_sq(&self) -> f64 {
        self.cache_l2_u_sq
    }

    /// Relative spread of the staggered shadow energy over all committed
    /// steps; `None` before the first step or for kinds without one.
    pub fn shadow_drift(&self) -> Option<f64> {
        if self.shadow_first.is_nan() {
            return None;
        }
        let scale = self.shadow_first.abs().max(f64::MIN_POSITIVE);
        Some((self.shadow_max - self.shadow_min) / scale)
    }

    /// The uncommitted next trajectory value `u^{n+1}`. Pure with respect
    /// to the state; the run loop uses it for centered velocity sampling.
    pub fn peek_next(&self, problem: &Problem) -> Field {
        let dt = self.dt;
        let mut next = match problem.kind {
            EquationKind::Heat => {
                let k1 = apply_operator(problem, &self.u);
                let mut mid = self.u.clone();
                for (m, k) in mid.values_mut().iter_mut().zip(k1.values()) {
                    *m += dt * k;
                }
                let k2 = apply_operator(problem, &mid);
                let mut out = self.u.clone();
                for ((o, a), b) in
                    out.values_mut().iter_mut().zip(k1.values()).zip(k2.values())
                {
                    *o += 0.5 * dt * (a + b);
                }
                out
            }
            _ => {
                let rhs = apply_operator(problem, &self.u);
                let mut out = Field::zeros(problem.grid);
                if problem.kind.is_damped() {
                    let half = 0.5 * dt;
                    for ((((o, uu), up), r), av) in out
                        .values_mut()
                        .iter_mut()
                        .zip(self.u.values())
                        .zip(self.u_prev.values())
                        .zip(rhs.values())
                        .zip(problem.damping.values())
                    {
                        *o = (2.0 * uu - up + dt * dt * r + av * half * up)
                            / (1.0 + av * half);
                    }
                } else {
                    for (((o, uu), up), r) in out
                        .values_mut()
                        .iter_mut()
                        .zip(self.u.values())
                        .zip(self.u_prev.values())
                        .zip(rhs.values())
                    {
                        *o = 2.0 * uu - up + dt * dt * r;
                    }
                }
                out
            }
        };
        next.project_dirichlet();
        next
    }

    /// The velocity field a diagnostic sample should use at the current
    /// time: the exact `u1` at `t = 0`, the centered difference
    /// `(u^{n+1} - u^{n-1}) / 2dt` afterwards, and `L u` for heat.
    pub fn velocity_field(&self, problem: &Problem, u_after: Option<&Field>) -> Field {
        if problem.kind == EquationKind::Heat {
            return apply_operator(problem, &self.u);
        }
        if self.step == 0 {
            return problem.u1.clone();
        }
        let after = u_after.expect("centered velocity needs the uncommitted next value");
        let mut vel = after.clone();
        let inv = 1.0 / (2.0 * self.dt);
        for (v, p) in vel.values_mut().iter_mut().zip(self.u_prev.values()) {
            *v = (*v - p) * inv;
        }
        vel
    }

    /// Advance one step, updating the running integrals, and abort with
    /// [`Error::Instability`] if the trajectory norm exceeds a million
    /// times the initial data scale.
    pub fn step(&mut self, problem: &Problem) -> Result<()> {
        let u_next = self.peek_next(problem);
        let l2_next = u_next.l2_norm_sq();
        if !l2_next.is_finite() || l2_next.sqrt() > self.blowup_threshold {
            return Err(Error::Instability {
                t: (self.step + 1) as f64 * self.dt,
                norm: l2_next.sqrt(),
                scale: self.blowup_threshold / 1e6,
            });
        }

        let dt = self.dt;
        let half = 0.5 * dt;
        let q = problem.grid.quad_weight();

        for ((va, a), b) in self
            .v_accum
            .values_mut()
            .iter_mut()
            .zip(self.u.values())
            .zip(u_next.values())
        {
            *va += half * (a + b);
        }
        self.cum_l2_u_sq += half * (self.cache_l2_u_sq + l2_next);

        let diff_sq = q * csum(
            u_next
                .values()
                .iter()
                .zip(self.u.values())
                .map(|(a, b)| (a - b) * (a - b)),
        );
        self.cum_l2_ut_sq += diff_sq / dt;

        let mut weighted_next = 0.0;
        if problem.kind.is_damped() {
            let wdiff = q * csum(
                u_next
                    .values()
                    .iter()
                    .zip(self.u.values())
                    .zip(problem.damping.values())
                    .map(|((a, b), c)| c * (a - b) * (a - b)),
            );
            self.cum_weighted_ut_sq += wdiff / dt;
            weighted_next = potential::quadratic_weighted(&problem.damping, &u_next);
            self.cum_weighted_u_sq += half * (self.cache_weighted_u_sq + weighted_next);
        }

        let stiff_pot_next = stiffness_sq(problem, &u_next)
            + potential::quadratic_weighted(&problem.potential, &u_next);
        self.cum_stiff_pot += half * (self.cache_stiff_pot + stiff_pot_next);

        if problem.kind.is_second_order() && !problem.kind.is_damped() {
            let shadow = 0.5 * diff_sq / (dt * dt)
                + 0.5 * mixed_stiff_pot(problem, &u_next, &self.u);
            if self.shadow_first.is_nan() {
                self.shadow_first = shadow;
            }
            self.shadow_min = self.shadow_min.min(shadow);
            self.shadow_max = self.shadow_max.max(shadow);
        }

        self.u_prev = std::mem::replace(&mut self.u, u_next);
        self.step += 1;
        self.cache_l2_u_sq = l2_next;
        self.cache_stiff_pot = stiff_pot_next;
        self.cache_weighted_u_sq = weighted_next;
        Ok(())
    }
}

/// Run parameters for [`run_simulation`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Record a diagnostic sample every this many steps (plus `t = 0` and
    /// the final step). Must be at least 1.
    pub sample_every: usize,
    /// When true (the default), a wave-kind run whose influence cone can
    /// reach the boundary monitor layers is rejected instead of warned
    /// about.
    pub enforce_speed_guard: bool,
}

impl RunConfig {
    pub fn new(dt: f64, horizon: f64, sample_every: usize) -> RunConfig {
        RunConfig { dt, horizon, sample_every, enforce_speed_guard: true }
    }
}

fn step_count_for(horizon: f64, dt: f64) -> u64 {
    if horizon <= 0.0 {
        0
    } else {
        // Guard against 3.0000000000000004-style ratios adding a step.
        (horizon / dt - 1e-9).ceil().max(1.0) as u64
    }
}

/// March a problem to its horizon, recording diagnostic samples at `t = 0`,
/// every `sample_every`-th step, and the final step. Serial and
/// deterministic: identical inputs give bit-identical series.
pub fn run_simulation(problem: &Problem, rc: &RunConfig) -> Result<DiagnosticSeries> {
    if !rc.horizon.is_finite() || rc.horizon < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "horizon must be finite and nonnegative, got {}",
            rc.horizon
        )));
    }
    if rc.sample_every == 0 {
        return Err(Error::InvalidSpec("sample_every must be at least 1".into()));
    }
    let limit = cfl_dt_max(problem.kind, problem.grid, problem.v_max);
    if !rc.dt.is_finite() || rc.dt <= 0.0 || rc.dt > limit {
        return Err(Error::UnstableDt { dt: rc.dt, limit });
    }

    let n_steps = step_count_for(rc.horizon, rc.dt);
    let mut warnings = Vec::new();

    // Finite-speed guard: influence from the data support spreads at most
    // `cells_per_step` cells per step, so it stays clear of the two
    // boundary monitor layers iff R + steps * cells * h + 3h <= L.
    if let Some(radius) = problem.support_radius() {
        let g = problem.grid;
        let required =
            radius + (n_steps as f64) * problem.kind.cells_per_step() * g.h() + 3.0 * g.h();
        if required > g.half_width() {
            if problem.kind.is_second_order() && !problem.kind.is_plate() {
                if rc.enforce_speed_guard {
                    return Err(Error::SpeedGuard {
                        required,
                        half_width: g.half_width(),
                    });
                }
                warnings.push(format!(
                    "finite-speed guard disabled: boundary reflections can re-enter \
                     (needs half-width >= {required:.3}, have {:.3})",
                    g.half_width()
                ));
            } else {
                warnings.push(format!(
                    "domain may be too small for horizon {} with kind `{}`; watch \
                     boundary_activity",
                    rc.horizon, problem.kind
                ));
            }
        }
    }

    let data = problem.data_functionals()?;
    // Damped identities are written against g = u1 + a u0.
    let g_field = if problem.kind.is_damped() {
        let mut g = problem.u1.clone();
        for ((gg, a), u) in g
            .values_mut()
            .iter_mut()
            .zip(problem.damping.values())
            .zip(problem.u0.values())
        {
            *gg += a * u;
        }
        g
    } else {
        problem.u1.clone()
    };

    let mut state = EvolutionState::new(problem, rc.dt)?;
    let mut samples = Vec::with_capacity((n_steps as usize) / rc.sample_every + 2);
    let vel0 = state.velocity_field(problem, None);
    samples.push(DiagnosticSample::compute(problem, &data, &g_field, &state, &vel0));

    for n in 1..=n_steps {
        state.step(problem)?;
        if n % rc.sample_every as u64 == 0 || n == n_steps {
            let u_after = if problem.kind.is_second_order() {
                Some(state.peek_next(problem))
            } else {
                None
            };
            let vel = state.velocity_field(problem, u_after.as_ref());
            samples.push(DiagnosticSample::compute(problem, &data, &g_field, &state, &vel));
        }
    }

    if !problem.kind.is_second_order() || problem.kind.is_plate() {
        let worst = samples
            .iter()
            .map(|s| s.boundary_activity)
            .fold(0.0f64, f64::max);
        if worst > 1e-6 {
            warnings.push(format!(
                "boundary activity reached {worst:.3e}; the domain is likely too \
                 small for this horizon"
            ));
        }
    }

    Ok(DiagnosticSeries {
        kind: problem.kind,
        dim: problem.grid.dim(),
        half_width: problem.grid.half_width(),
        points_per_axis: problem.grid.points_per_axis(),
        dt: rc.dt,
        horizon: rc.horizon,
        sample_every: rc.sample_every,
        unit_damping: problem.damping.values().iter().all(|a| *a == 1.0),
        fingerprint: String::new(),
        data,
        samples,
        shadow_drift: state.shadow_drift(),
        warnings,
    })
}
