//! Numerical laboratory for L2 boundedness and fast decay of linear waves,
//! damped waves, heat flows and plates in the presence of a nonnegative
//! potential.
//!
//! The crate is organized bottom-up:
//!
//! * [`numgrid`]: uniform Dirichlet grids on `[-L, L]^n` (n = 1, 2), fields,
//!   second-order stencils and deterministic reductions,
//! * [`potential`]: potential / damping coefficient families and the
//!   weighted data integrals that gate the decay theorems,
//! * [`evolve`]: explicit time steppers for the five equation kinds with
//!   stability limits and midpoint-accumulated time integrals,
//! * [`functionals`]: energies, the antiderivative-field identities and the
//!   per-sample diagnostic records,
//! * [`ratefit`]: log-log and sqrt-log growth/decay fits and boundedness
//!   verdicts,
//! * [`scenarios`]: the built-in experiment catalog, config (de)serialization,
//!   the runner and deterministic CSV/JSON/SVG emission.

pub mod error;
pub mod evolve;
pub mod functionals;
pub mod numgrid;
pub mod potential;
pub mod ratefit;
pub mod scenarios;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
