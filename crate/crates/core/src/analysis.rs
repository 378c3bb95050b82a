//! Rearrangement inequalities on the line and the triangular polarization scheme.
//!
//! The scheme starts from `u_0 = u` and sets `u_{n+1}` to `u_n` polarized by
//! `H_1, H_2, …, H_{n+1}` in that order, so that `n (n + 1) / 2` polarizations
//! have been applied after `n` outer steps. With a dense schedule of
//! halfspaces having the origin in their interior, `u_n` converges to the
//! symmetric decreasing rearrangement of `u`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::halfspace::{Halfspace, Schedule, ScheduleKind};
use crate::numeric::Accumulator;
use crate::step1d::StepFunction;

/// Radial, radially nonincreasing weight on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialWeight {
    /// `exp(-|x|²)`.
    Gaussian,
    /// `max(0, radius - |x|)`.
    Triangular { radius: f64 },
}

impl Default for RadialWeight {
    fn default() -> Self {
        RadialWeight::Triangular { radius: 16.0 }
    }
}

impl RadialWeight {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            RadialWeight::Gaussian => (-x * x).exp(),
            RadialWeight::Triangular { radius } => (radius - x.abs()).max(0.0),
        }
    }

    /// Adds `value * ∫_a^b w` to `acc`.
    fn accumulate(&self, acc: &mut Accumulator, a: f64, b: f64, value: f64) {
        match *self {
            RadialWeight::Gaussian => acc.add_product(gaussian_integral(a, b), value),
            RadialWeight::Triangular { radius } => {
                // w is affine on each of [-R, 0] and [0, R]
                for (lo, hi, slope) in [(-radius, 0.0, 1.0), (0.0, radius, -1.0)] {
                    let x0 = a.max(lo);
                    let x1 = b.min(hi);
                    if x1 > x0 {
                        let mid = x0 + (x1 - x0) / 2.0;
                        acc.add_triple(x1 - x0, radius + slope * mid, value);
                    }
                }
            }
        }
    }
}

/// `∫_a^b exp(-x²) dx`, using `erfc` on the tails to avoid cancellation.
fn gaussian_integral(a: f64, b: f64) -> f64 {
    let half_sqrt_pi = PI.sqrt() / 2.0;
    if a >= 0.0 {
        half_sqrt_pi * (libm::erfc(a) - libm::erfc(b))
    } else if b <= 0.0 {
        half_sqrt_pi * (libm::erfc(-b) - libm::erfc(-a))
    } else {
        half_sqrt_pi * (libm::erf(b) - libm::erf(a))
    }
}

/// `∫ u w`.
pub fn weighted_mass(u: &StepFunction, w: &RadialWeight) -> f64 {
    let mut acc = Accumulator::new();
    for (a, b, v) in u.pieces() {
        if v != 0.0 {
            w.accumulate(&mut acc, a, b, v);
        }
    }
    acc.value()
}

/// `∫ u^H w - ∫ u w`, nonnegative whenever the origin lies in `H`.
pub fn polarization_gap(u: &StepFunction, h: &Halfspace, w: &RadialWeight) -> Result<f64> {
    Ok(weighted_mass(&u.polarize(h)?, w) - weighted_mass(u, w))
}

/// `∫ u* v* - ∫ u v`.
pub fn hardy_littlewood_gap(u: &StepFunction, v: &StepFunction) -> f64 {
    u.rearrange().inner_product(&v.rearrange()) - u.inner_product(v)
}

/// `|∫ |u*|^p - ∫ |u|^p|`.
pub fn cavalieri_gap(u: &StepFunction, p: f64) -> Result<f64> {
    Ok((u.rearrange().lp_norm_pow(p)? - u.lp_norm_pow(p)?).abs())
}

/// `∫ |u - v|^p - ∫ |u* - v*|^p`.
pub fn contraction_gap(u: &StepFunction, v: &StepFunction, p: f64) -> Result<f64> {
    Ok(u.lp_distance_pow(v, p)? - u.rearrange().lp_distance_pow(&v.rearrange(), p)?)
}

/// Measure of `{|u - v| > eps}`.
pub fn deviation_measure(u: &StepFunction, v: &StepFunction, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(u.deviation_measure(v, eps))
}

/// One row of a convergence series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRecord {
    pub n: usize,
    /// `‖u_n - u*‖_p`.
    pub lp_error: f64,
    /// `∫ u_n w`.
    pub weighted_mass: f64,
    pub sup_error: f64,
    /// Measure of `{|u_n - u*| > eps}`.
    pub deviation_measure: f64,
}

/// An invariant of the scheme that failed during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvariantViolation {
    /// `‖u_n‖_p` moved away from `‖u‖_p`.
    NormDrift {
        n: usize,
        initial: f64,
        current: f64,
    },
    /// A single polarization decreased `∫ u w`.
    MassDecrease {
        n: usize,
        step: usize,
        before: f64,
        after: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceSeries {
    pub records: Vec<SeriesRecord>,
    pub violations: Vec<InvariantViolation>,
    pub polarizations: usize,
}

impl ConvergenceSeries {
    pub fn last(&self) -> Option<&SeriesRecord> {
        self.records.last()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Order in which `H_1 … H_{n+1}` are applied within an outer step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationOrder {
    /// `H_1` first.
    #[default]
    Forward,
    /// `H_{n+1}` first.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub n_max: usize,
    pub p: f64,
    pub weight: RadialWeight,
    pub eps: f64,
    pub order: IterationOrder,
    /// Slack for the norm and weighted-mass invariants.
    pub tolerance: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            n_max: 60,
            p: 1.0,
            weight: RadialWeight::default(),
            eps: 0.01,
            order: IterationOrder::Forward,
            tolerance: 1e-12,
        }
    }
}

impl SchemeParams {
    fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidExponent(self.p));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if let RadialWeight::Triangular { radius } = self.weight {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "triangular radius must be positive, got {radius}"
                )));
            }
        }
        Ok(())
    }
}

/// Runs the triangular scheme in the exact engine on the line. Row `n = 0`
/// describes the input. Norm constancy and weighted-mass monotonicity are
/// checked along the way; failures are collected in `violations`.
pub fn converge_scheme(
    u: &StepFunction,
    schedule: &Schedule,
    params: &SchemeParams,
) -> Result<ConvergenceSeries> {
    params.validate()?;
    if schedule.dim() != 1 {
        return Err(Error::DimensionMismatch(1, schedule.dim()));
    }
    let target = u.rearrange();
    let initial_norm = u.lp_norm(params.p)?;
    let halfspaces = schedule.prefix(params.n_max);

    let record = |n: usize, f: &StepFunction| -> Result<SeriesRecord> {
        Ok(SeriesRecord {
            n,
            lp_error: f.lp_distance(&target, params.p)?,
            weighted_mass: weighted_mass(f, &params.weight),
            sup_error: f.sup_distance(&target),
            deviation_measure: f.deviation_measure(&target, params.eps),
        })
    };

    let mut series = ConvergenceSeries::default();
    let mut current = u.clone();
    series.records.push(record(0, &current)?);
    for n in 1..=params.n_max {
        let prefix = &halfspaces[..n];
        let mut mass = weighted_mass(&current, &params.weight);
        for step in 0..n {
            let h = match params.order {
                IterationOrder::Forward => &prefix[step],
                IterationOrder::Reversed => &prefix[n - 1 - step],
            };
            current = current.polarize(h)?;
            series.polarizations += 1;
            let next_mass = weighted_mass(&current, &params.weight);
            if next_mass < mass - params.tolerance {
                series.violations.push(InvariantViolation::MassDecrease {
                    n,
                    step: step + 1,
                    before: mass,
                    after: next_mass,
                });
            }
            mass = next_mass;
        }
        let norm = current.lp_norm(params.p)?;
        if (norm - initial_norm).abs() > params.tolerance {
            series.violations.push(InvariantViolation::NormDrift {
                n,
                initial: initial_norm,
                current: norm,
            });
        }
        series.records.push(record(n, &current)?);
    }
    Ok(series)
}

/// [`converge_scheme`] with the dyadic schedule restricted to offsets in `(0, rho]`.
pub fn converge_restricted(
    u: &StepFunction,
    rho: f64,
    params: &SchemeParams,
) -> Result<ConvergenceSeries> {
    let schedule = Schedule::new(1, rho, ScheduleKind::RestrictedDyadic)?;
    converge_scheme(u, &schedule, params)
}

/// Final state of the scheme, for callers that need `u_n` itself.
pub fn iterate_scheme(
    u: &StepFunction,
    schedule: &Schedule,
    n_max: usize,
    order: IterationOrder,
) -> Result<StepFunction> {
    let halfspaces = schedule.prefix(n_max);
    let mut current = u.clone();
    for n in 1..=n_max {
        for step in 0..n {
            let h = match order {
                IterationOrder::Forward => &halfspaces[step],
                IterationOrder::Reversed => &halfspaces[n - 1 - step],
            };
            current = current.polarize(h)?;
        }
    }
    Ok(current)
}
