//! Potential and damping coefficient families, the weighted data integrals
//! that gate each decay theorem, and the derived data functionals.
//!
//! The weighted integral `int |data|^2 / V dx` uses the convention
//! `0/0 = 0`: nodes where the data vanishes contribute nothing even if the
//! potential vanishes there too. A node with nonzero data and zero
//! potential makes the integral `+inf`, which downstream reporting surfaces
//! as a first-class "hypothesis violated" outcome rather than an error.

use serde::{Deserialize, Serialize};

use crate::evolve::EquationKind;
use crate::numgrid::{csum, Field, Grid};
use crate::{Error, Result};

/// Nonnegative potential families. All are evaluated on grid nodes; the
/// boundary is left as evaluated (potentials need not vanish there).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// V = 0 (free evolution).
    Zero,
    /// V = m2 (mass term).
    Constant { m2: f64 },
    /// V = amplitude * exp(-|x|^2 / sigma^2).
    Gaussian { amplitude: f64, sigma: f64 },
    /// V = (1 + |x|^2)^(-alpha/2).
    InversePoly { alpha: f64 },
    /// V = k3 * (1 + |x|)^(-theta).
    NakaoPoly { k3: f64, theta: f64 },
    /// Mollifier bump: amplitude * exp(-r^2 / (r^2 - |x-c|^2)) inside the
    /// ball of radius r around `center`, exactly zero outside.
    Bump { center: Vec<f64>, radius: f64, amplitude: f64 },
    /// Explicit node values (row-major, must match the grid).
    Tabulated { values: Vec<f64> },
}

impl PotentialSpec {
    pub fn evaluate(&self, grid: Grid) -> Result<Field> {
        match self {
            PotentialSpec::Zero => Ok(Field::zeros(grid)),
            PotentialSpec::Constant { m2 } => {
                require_nonneg(*m2, "m2")?;
                Ok(Field::from_fn(grid, |_| *m2))
            }
            PotentialSpec::Gaussian { amplitude, sigma } => {
                require_nonneg(*amplitude, "amplitude")?;
                require_pos(*sigma, "sigma")?;
                let (a, s2) = (*amplitude, sigma * sigma);
                Ok(Field::from_fn(grid, |x| a * (-norm_sq(x) / s2).exp()))
            }
            PotentialSpec::InversePoly { alpha } => {
                require_pos(*alpha, "alpha")?;
                let a = *alpha;
                Ok(Field::from_fn(grid, |x| (1.0 + norm_sq(x)).powf(-a / 2.0)))
            }
            PotentialSpec::NakaoPoly { k3, theta } => {
                require_nonneg(*k3, "k3")?;
                require_nonneg(*theta, "theta")?;
                let (k, th) = (*k3, *theta);
                Ok(Field::from_fn(grid, |x| k * (1.0 + norm_sq(x).sqrt()).powf(-th)))
            }
            PotentialSpec::Bump { center, radius, amplitude } => {
                require_nonneg(*amplitude, "amplitude")?;
                require_pos(*radius, "radius")?;
                if center.len() != grid.dim() {
                    return Err(Error::InvalidSpec(format!(
                        "bump center has {} coordinates on a {}d grid",
                        center.len(),
                        grid.dim()
                    )));
                }
                Ok(bump_field(grid, center, *radius, *amplitude))
            }
            PotentialSpec::Tabulated { values } => {
                if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                    return Err(Error::InvalidSpec(
                        "tabulated potential must be nonnegative and finite".into(),
                    ));
                }
                Field::from_values(grid, values.clone())
            }
        }
    }
}

/// Damping coefficient families for the damped kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingSpec {
    /// a = 0: undamped (only valid for non-damped kinds).
    Zero,
    /// a = 1: the classical damped equation.
    Unit,
    /// Smooth variable damping a(x) = a0 + (b0 - a0) exp(-|x|^2), which
    /// satisfies 0 < a0 <= a(x) <= b0 on any grid.
    Bounded { a0: f64, b0: f64 },
    /// Explicit node values with declared bounds 0 < a0 <= a(x) <= b0.
    Tabulated { values: Vec<f64>, a0: f64, b0: f64 },
}

impl DampingSpec {
    pub fn evaluate(&self, grid: Grid) -> Result<Field> {
        match self {
            DampingSpec::Zero => Ok(Field::zeros(grid)),
            DampingSpec::Unit => Ok(Field::from_fn(grid, |_| 1.0)),
            DampingSpec::Bounded { a0, b0 } => {
                require_pos(*a0, "a0")?;
                if b0 < a0 {
                    return Err(Error::InvalidSpec(format!("need a0 <= b0, got {a0} > {b0}")));
                }
                let (a0, b0) = (*a0, *b0);
                Ok(Field::from_fn(grid, |x| a0 + (b0 - a0) * (-norm_sq(x)).exp()))
            }
            DampingSpec::Tabulated { values, a0, b0 } => {
                require_pos(*a0, "a0")?;
                if values.iter().any(|v| v < a0 || v > b0) {
                    return Err(Error::InvalidSpec(
                        "tabulated damping exits the declared [a0, b0] band".into(),
                    ));
                }
                Field::from_values(grid, values.clone())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DampingSpec::Zero)
    }
}

fn require_nonneg(v: f64, name: &str) -> Result<()> {
    if v < 0.0 || !v.is_finite() {
        return Err(Error::InvalidSpec(format!("{name} must be nonnegative, got {v}")));
    }
    Ok(())
}

fn require_pos(v: f64, name: &str) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

pub(crate) fn bump_field(grid: Grid, center: &[f64], radius: f64, amplitude: f64) -> Field {
    let r2 = radius * radius;
    Field::from_fn(grid, |x| {
        let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
        if d2 < r2 {
            amplitude * (-r2 / (r2 - d2)).exp()
        } else {
            0.0
        }
    })
}

/// `int |data|^2 / V dx` with the 0/0 = 0 convention; `+inf` when the data
/// is nonzero somewhere the potential vanishes.
/// `int w f^2` with the grid quadrature weight. Shared by the data
/// functionals and the per-sample diagnostics so both sides produce
/// bit-identical numbers for the same field.
pub(crate) fn quadratic_weighted(weight: &Field, f: &Field) -> f64 {
    let q = f.grid().quad_weight();
    q * csum(f.values().iter().zip(weight.values()).map(|(a, b)| a * a * b))
}

/// `int w x y` with the grid quadrature weight.
pub(crate) fn mixed_weighted(weight: &Field, x: &Field, y: &Field) -> f64 {
    let q = x.grid().quad_weight();
    q * csum(
        x.values()
            .iter()
            .zip(y.values())
            .zip(weight.values())
            .map(|((a, b), c)| a * b * c),
    )
}

pub fn weighted_data_integral(data: &Field, v: &Field) -> Result<f64> {
    if data.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let mut violated = false;
    let total = csum(data.values().iter().zip(v.values()).map(|(d, vv)| {
        if *d == 0.0 {
            0.0
        } else if *vv == 0.0 {
            violated = true;
            0.0
        } else {
            d * d / vv
        }
    }));
    if violated {
        Ok(f64::INFINITY)
    } else {
        Ok(data.grid().quad_weight() * total)
    }
}

/// Same integral restricted to the region where V > 0. Always finite; it is
/// the quantity that enters the bounds when the support hypothesis holds.
pub fn weighted_data_integral_on_support(data: &Field, v: &Field) -> Result<f64> {
    if data.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let total = csum(
        data.values()
            .iter()
            .zip(v.values())
            .map(|(d, vv)| if *vv > 0.0 { d * d / vv } else { 0.0 }),
    );
    Ok(data.grid().quad_weight() * total)
}

/// Outcome of checking `supp(data) subset {V > 0}` node by node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    pub satisfied: bool,
    /// Nodes with nonzero data where the potential vanishes.
    pub violating_nodes: usize,
    /// The weighted integral: finite iff satisfied.
    pub integral: f64,
}

pub fn check_support_hypothesis(data: &Field, v: &Field) -> Result<SupportReport> {
    if data.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let violating_nodes = data
        .values()
        .iter()
        .zip(v.values())
        .filter(|(d, vv)| **d != 0.0 && **vv == 0.0)
        .count();
    let integral = weighted_data_integral(data, v)?;
    Ok(SupportReport { satisfied: violating_nodes == 0, violating_nodes, integral })
}

/// Every data-derived scalar the checks need, computed once per run.
///
/// The unrestricted weighted integrals (`i0_sq`, `k0_sq`, `k0h_sq`,
/// `k0p_sq`) are `+inf` exactly when the corresponding support hypothesis
/// fails; the `{V > 0}`-restricted companions (`j0_sq`, `l0_sq`, ...) are
/// always finite and coincide with them when the hypothesis holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataFunctionals {
    pub l2_u0_sq: f64,
    pub l2_u1_sq: f64,
    pub grad_u0_sq: f64,
    /// `int V u0^2`.
    pub pot_u0_sq: f64,
    /// Initial energy with the kind's stiffness term (grad for waves,
    /// `|lap u0|^2` for plates, Dirichlet energy for heat).
    pub e0: f64,
    pub moment_u0: f64,
    pub moment_u1: f64,
    pub inner_u1_u0: f64,
    /// `int u1^2 / V` (wave theorems).
    pub i0_sq: f64,
    pub j0_sq: f64,
    /// `int (u0 + u1)^2 / V` (damped wave theorems).
    pub k0_sq: f64,
    pub l0_sq: f64,
    /// `int u0^2 / V` (heat theorems).
    pub k0h_sq: f64,
    pub j0h_sq: f64,
    /// `int u1^2 / V` (plate theorems).
    pub k0p_sq: f64,
    pub j0p_sq: f64,
    /// `3 E(0) + 1/2 |u0|^2 + (u1, u0)`: the squared amplitude constant of
    /// the damped-wave L2 bound. Distinct from `i0_sq`.
    pub lemma31_i0_sq: f64,
}

pub fn compute_data_functionals(
    u0: &Field,
    u1: &Field,
    v: &Field,
    kind: EquationKind,
) -> Result<DataFunctionals> {
    if u0.grid() != u1.grid() || u0.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let l2_u0_sq = u0.l2_norm_sq();
    let l2_u1_sq = u1.l2_norm_sq();
    let grad_u0_sq = u0.grad_norm_sq();
    let pot_u0_sq = quadratic_weighted(v, u0);
    let stiffness = if kind.is_plate() { u0.laplacian().l2_norm_sq() } else { grad_u0_sq };
    let e0 = match kind {
        EquationKind::Heat => 0.5 * (stiffness + pot_u0_sq),
        _ => 0.5 * (l2_u1_sq + stiffness + pot_u0_sq),
    };
    let inner_u1_u0 = u1.inner(u0)?;

    let mut sum_data = u0.clone();
    for (s, a) in sum_data.values_mut().iter_mut().zip(u1.values()) {
        *s += a;
    }

    Ok(DataFunctionals {
        l2_u0_sq,
        l2_u1_sq,
        grad_u0_sq,
        pot_u0_sq,
        e0,
        moment_u0: u0.integral(),
        moment_u1: u1.integral(),
        inner_u1_u0,
        i0_sq: weighted_data_integral(u1, v)?,
        j0_sq: weighted_data_integral_on_support(u1, v)?,
        k0_sq: weighted_data_integral(&sum_data, v)?,
        l0_sq: weighted_data_integral_on_support(&sum_data, v)?,
        k0h_sq: weighted_data_integral(u0, v)?,
        j0h_sq: weighted_data_integral_on_support(u0, v)?,
        k0p_sq: weighted_data_integral(u1, v)?,
        j0p_sq: weighted_data_integral_on_support(u1, v)?,
        lemma31_i0_sq: 3.0 * e0 + 0.5 * l2_u0_sq + inner_u1_u0,
    })
}
