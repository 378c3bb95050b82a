//! Two-point rearrangement (polarization) and symmetric decreasing
//! rearrangement on three function representations:
//!
//! - [`step1d`]: exact piecewise-constant functions on the line,
//! - [`lattice`]: finitely supported functions on the integers with the spiral order,
//! - [`grid2d`]: values on a centered square grid.
//!
//! [`halfspace`] holds the geometry and the dense dyadic schedules, and
//! [`analysis`] the rearrangement inequalities and the iterated polarization
//! scheme that converges to the symmetric rearrangement.

// NaN must fail these comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod grid2d;
pub mod halfspace;
pub mod io;
pub mod lattice;
pub mod numeric;
pub mod random;
pub mod step1d;

pub use analysis::{ConvergenceSeries, IterationOrder, RadialWeight, SchemeParams, SeriesRecord};
pub use error::{Error, Result};
pub use grid2d::{GridFunction, HyperplaneDirection, LatticeHyperplane, MixedStep, SteinerAxis};
pub use halfspace::{Halfspace, Schedule, ScheduleKind, Sign};
pub use lattice::{LatticeFunction, LatticeInvolution};
pub use step1d::StepFunction;
