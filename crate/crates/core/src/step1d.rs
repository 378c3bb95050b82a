//! Exact engine on the line.
//!
//! A [`StepFunction`] is a nonnegative piecewise-constant function with bounded
//! support, stored in canonical form. Polarization and symmetric decreasing
//! rearrangement are computed exactly on merged breakpoint grids; every
//! integral is a finite sum over elementary intervals.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::halfspace::{Halfspace, Normal, Sign};
use crate::numeric::{abs_pow, Accumulator};

/// Nonnegative step function `u = values[i]` on `[breakpoints[i], breakpoints[i + 1])`,
/// zero outside `[breakpoints[0], breakpoints[k])`.
///
/// Canonical form: adjacent values differ, the first and last values are
/// positive, and the zero function has no breakpoints at all.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction::default()
    }

    /// Validates and canonicalizes.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Error::InvalidStepFunction(msg);
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(StepFunction::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(bad(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !b.is_finite()) {
            return Err(bad(format!("breakpoint {b} is not finite")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(bad(format!(
                "breakpoints must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(bad(format!("value {v} is not a finite nonnegative number")));
        }
        Ok(canonicalize(breakpoints, values))
    }

    /// `value` on `[a, b)`, zero elsewhere.
    pub fn indicator(a: f64, b: f64, value: f64) -> Result<Self> {
        StepFunction::new(vec![a, b], vec![value])
    }

    /// Builds a function from disjoint `(start, end, value)` pieces sorted by start.
    /// Gaps between pieces are zero.
    pub fn from_pieces(pieces: &[(f64, f64, f64)]) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(2 * pieces.len());
        let mut values = Vec::with_capacity(2 * pieces.len());
        for &(a, b, v) in pieces {
            match breakpoints.last() {
                Some(&last) if last == a => {}
                Some(&last) if last < a => {
                    values.push(0.0);
                    breakpoints.push(a);
                }
                Some(_) => {
                    return Err(Error::InvalidStepFunction(format!(
                        "piece starting at {a} overlaps its predecessor"
                    )))
                }
                None => breakpoints.push(a),
            }
            breakpoints.push(b);
            values.push(v);
        }
        StepFunction::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    /// `(start, end, value)` for each piece, zero-valued interior gaps included.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Smallest closed interval containing the support, if any.
    pub fn support_hull(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        // index of the first breakpoint strictly greater than x
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        if idx == 0 || idx == self.breakpoints.len() {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// Polarization with respect to a halfspace on the line: on each pair
    /// `{x, σ(x)}` the larger value goes to the point in `H`.
    pub fn polarize(&self, h: &Halfspace) -> Result<StepFunction> {
        let sign = match h.normal() {
            Normal::Line(sign) => sign,
            Normal::Plane { .. } => return Err(Error::DimensionMismatch(1, h.dim())),
        };
        if self.is_zero() {
            return Ok(StepFunction::zero());
        }
        let c = h.boundary_point();
        let mut grid = Vec::with_capacity(2 * self.breakpoints.len() + 1);
        grid.extend_from_slice(&self.breakpoints);
        grid.extend(self.breakpoints.iter().map(|b| 2.0 * c - b));
        grid.push(c);
        sort_dedup(&mut grid);

        let values = grid
            .windows(2)
            .map(|w| {
                let mid = midpoint(w[0], w[1]);
                let here = self.evaluate(mid);
                let there = self.evaluate(2.0 * c - mid);
                let inside = match sign {
                    Sign::Plus => mid < c,
                    Sign::Minus => mid > c,
                };
                if inside {
                    here.max(there)
                } else {
                    here.min(there)
                }
            })
            .collect();
        Ok(canonicalize(grid, values))
    }

    /// Symmetric decreasing rearrangement: superlevel sets become intervals
    /// centered at the origin with the same length.
    pub fn rearrange(&self) -> StepFunction {
        let mut levels: Vec<(f64, f64)> = self
            .pieces()
            .filter(|&(_, _, v)| v > 0.0)
            .map(|(a, b, v)| (v, b - a))
            .collect();
        if levels.is_empty() {
            return StepFunction::zero();
        }
        // stable: equal values keep left-to-right order, so the length sums are deterministic
        levels.sort_by(|x, y| y.0.total_cmp(&x.0));

        let mut distinct: Vec<f64> = Vec::new();
        let mut half_widths: Vec<f64> = Vec::new();
        let mut cumulative = 0.0;
        for (value, len) in levels {
            if distinct.last() != Some(&value) {
                if !distinct.is_empty() {
                    half_widths.push(cumulative / 2.0);
                }
                distinct.push(value);
            }
            cumulative += len;
        }
        half_widths.push(cumulative / 2.0);

        let k = distinct.len();
        let mut breakpoints = Vec::with_capacity(2 * k);
        let mut values = Vec::with_capacity(2 * k - 1);
        breakpoints.extend(half_widths.iter().rev().map(|r| -r));
        breakpoints.extend(half_widths.iter().copied());
        values.extend(distinct.iter().rev());
        values.extend(distinct.iter().skip(1));
        canonicalize(breakpoints, values)
    }

    /// Lebesgue measure of `{u > lambda}`.
    pub fn superlevel_measure(&self, lambda: f64) -> f64 {
        self.pieces()
            .filter(|&(_, _, v)| v > lambda)
            .map(|(a, b, _)| b - a)
            .collect::<Accumulator>()
            .value()
    }

    /// `∫ |u|^p`.
    pub fn lp_norm_pow(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let mut acc = Accumulator::new();
        for (a, b, v) in self.pieces() {
            acc.add_product(b - a, abs_pow(v, p));
        }
        Ok(acc.value())
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        Ok(root(self.lp_norm_pow(p)?, p))
    }

    /// `∫ |u - v|^p`.
    pub fn lp_distance_pow(&self, other: &StepFunction, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let mut acc = Accumulator::new();
        for (a, b, x, y) in self.paired_pieces(other) {
            acc.add_product(b - a, abs_pow(x - y, p));
        }
        Ok(acc.value())
    }

    pub fn lp_distance(&self, other: &StepFunction, p: f64) -> Result<f64> {
        Ok(root(self.lp_distance_pow(other, p)?, p))
    }

    pub fn sup_distance(&self, other: &StepFunction) -> f64 {
        self.paired_pieces(other)
            .map(|(_, _, x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// `∫ u v`.
    pub fn inner_product(&self, other: &StepFunction) -> f64 {
        let mut acc = Accumulator::new();
        for (a, b, x, y) in self.paired_pieces(other) {
            acc.add_triple(b - a, x, y);
        }
        acc.value()
    }

    /// Measure of `{|u - v| > eps}`.
    pub fn deviation_measure(&self, other: &StepFunction, eps: f64) -> f64 {
        self.paired_pieces(other)
            .filter(|&(_, _, x, y)| (x - y).abs() > eps)
            .map(|(a, b, _, _)| b - a)
            .collect::<Accumulator>()
            .value()
    }

    /// Union of both breakpoint sets, sorted.
    pub fn merged_grid(&self, other: &StepFunction) -> Vec<f64> {
        let mut grid = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        grid.extend_from_slice(&self.breakpoints);
        grid.extend_from_slice(&other.breakpoints);
        sort_dedup(&mut grid);
        grid
    }

    /// Elementary intervals of the merged grid with both values on each.
    pub fn paired_pieces<'a>(
        &'a self,
        other: &'a StepFunction,
    ) -> impl Iterator<Item = (f64, f64, f64, f64)> + 'a {
        let grid = self.merged_grid(other);
        (1..grid.len()).map(move |i| {
            let (a, b) = (grid[i - 1], grid[i]);
            let mid = midpoint(a, b);
            (a, b, self.evaluate(mid), other.evaluate(mid))
        })
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + (b - a) / 2.0
}

fn sort_dedup(xs: &mut Vec<f64>) {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
}

/// Merges equal neighbours and strips zero-valued ends.
fn canonicalize(breakpoints: Vec<f64>, values: Vec<f64>) -> StepFunction {
    debug_assert_eq!(breakpoints.len(), values.len() + 1);
    let mut bps = Vec::with_capacity(breakpoints.len());
    let mut vals: Vec<f64> = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        if vals.is_empty() {
            if v == 0.0 {
                continue;
            }
            bps.push(breakpoints[i]);
            vals.push(v);
        } else if *vals.last().unwrap() == v {
            // extend the current piece
        } else {
            bps.push(breakpoints[i]);
            vals.push(v);
        }
    }
    if vals.is_empty() {
        return StepFunction::zero();
    }
    // close the last piece at the right end of its run
    let mut end = breakpoints.len() - 1;
    while values[end - 1] == 0.0 {
        end -= 1;
    }
    if *vals.last().unwrap() == 0.0 {
        vals.pop();
        bps.pop();
    }
    bps.push(breakpoints[end]);
    StepFunction {
        breakpoints: bps,
        values: vals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(pieces: &[(f64, f64, f64)]) -> StepFunction {
        StepFunction::from_pieces(pieces).unwrap()
    }

    fn plus(d: f64) -> Halfspace {
        Halfspace::on_line(Sign::Plus, d)
    }

    /// Pointwise definition of the polarization.
    fn polarize_oracle(u: &StepFunction, h: &Halfspace, x: f64) -> f64 {
        let a = u.evaluate(x);
        let b = u.evaluate(h.reflect_scalar(x));
        if h.contains(&[x]) {
            a.max(b)
        } else {
            a.min(b)
        }
    }

    #[test]
    fn canonical_form() {
        let u = StepFunction::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            vec![0.0, 2.0, 2.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(u.breakpoints(), &[1.0, 3.0]);
        assert_eq!(u.values(), &[2.0]);
        let gap = step(&[(0.0, 1.0, 1.0), (2.0, 3.0, 1.0)]);
        assert_eq!(gap.values(), &[1.0, 0.0, 1.0]);
        assert!(StepFunction::new(vec![0.0, 1.0], vec![0.0])
            .unwrap()
            .is_zero());
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepFunction::new(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, f64::NAN], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let u = StepFunction::indicator(1.0, 2.0, 1.0).unwrap();
        assert_eq!(u.evaluate(1.5), 1.0);
        assert_eq!(u.evaluate(1.0), 1.0);
        assert_eq!(u.evaluate(2.0), 0.0);
        assert_eq!(StepFunction::zero().evaluate(0.3), 0.0);
    }

    #[test]
    fn polarize_moves_bump_across_origin() {
        let u = StepFunction::indicator(1.0, 2.0, 1.0).unwrap();
        let h = plus(0.0);
        let uh = u.polarize(&h).unwrap();
        assert_eq!(uh, StepFunction::indicator(-2.0, -1.0, 1.0).unwrap());
        for i in 0..10_000 {
            let x = -4.0 + 8.0 * (i as f64 + 0.5) / 10_000.0;
            if uh.breakpoints().contains(&x) {
                continue;
            }
            assert_eq!(uh.evaluate(x), polarize_oracle(&u, &h, x), "x = {x}");
        }
    }

    #[test]
    fn polarize_keeps_symmetric_decreasing() {
        let u = StepFunction::indicator(-1.0, 1.0, 1.0).unwrap();
        assert_eq!(u.polarize(&plus(0.5)).unwrap(), u);
    }

    #[test]
    fn polarize_swaps_two_levels() {
        let u = step(&[(-1.0, 0.0, 1.0), (0.0, 1.0, 2.0)]);
        let h = plus(0.0);
        let uh = u.polarize(&h).unwrap();
        assert_eq!(uh, step(&[(-1.0, 0.0, 2.0), (0.0, 1.0, 1.0)]));
        for i in 0..10_000 {
            let x = -2.0 + 4.0 * (i as f64 + 0.5) / 10_000.0;
            assert_eq!(uh.evaluate(x), polarize_oracle(&u, &h, x));
        }
    }

    #[test]
    fn polarize_with_negative_normal() {
        // H = {x >= -0.5}, reflection x -> -1 - x
        let u = StepFunction::indicator(-3.0, -2.0, 4.0).unwrap();
        let h = Halfspace::on_line(Sign::Minus, 0.5);
        assert_eq!(
            u.polarize(&h).unwrap(),
            StepFunction::indicator(1.0, 2.0, 4.0).unwrap()
        );
    }

    #[test]
    fn polarize_rejects_planar_halfspace() {
        let u = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        assert!(u.polarize(&Halfspace::in_plane(0.0, 0.0)).is_err());
    }

    #[test]
    fn rearrange_examples() {
        let u = StepFunction::indicator(1.0, 3.0, 1.0).unwrap();
        assert_eq!(
            u.rearrange(),
            StepFunction::indicator(-1.0, 1.0, 1.0).unwrap()
        );

        // layer cake: |{u > 1}| = 1, |{u > 0}| = 3
        let u = step(&[(0.0, 1.0, 2.0), (2.0, 4.0, 1.0)]);
        let expected = step(&[(-1.5, -0.5, 1.0), (-0.5, 0.5, 2.0), (0.5, 1.5, 1.0)]);
        assert_eq!(u.rearrange(), expected);
        assert_eq!(expected.rearrange(), expected);
        assert!(StepFunction::zero().rearrange().is_zero());
    }

    #[test]
    fn rearrange_merges_equal_levels() {
        let u = step(&[(-5.0, -4.0, 3.0), (0.0, 0.5, 3.0), (2.0, 2.5, 1.0)]);
        let expected = step(&[(-1.0, -0.75, 1.0), (-0.75, 0.75, 3.0), (0.75, 1.0, 1.0)]);
        assert_eq!(u.rearrange(), expected);
    }

    #[test]
    fn superlevel_examples() {
        let u = step(&[(0.0, 1.0, 2.0), (2.0, 4.0, 1.0)]);
        assert_eq!(u.superlevel_measure(1.5), 1.0);
        assert_eq!(u.superlevel_measure(0.5), 3.0);
        assert_eq!(u.superlevel_measure(2.0), 0.0);
        assert_eq!(u.superlevel_measure(0.0), 3.0);
    }

    #[test]
    fn lp_examples() {
        let u = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let v = StepFunction::indicator(0.5, 1.5, 1.0).unwrap();
        assert_eq!(u.lp_distance(&v, 1.0).unwrap(), 1.0);
        let two = StepFunction::indicator(0.0, 1.0, 2.0).unwrap();
        assert_eq!(two.lp_norm(2.0).unwrap(), 2.0);
        let w = StepFunction::indicator(3.0, 4.0, 1.0).unwrap();
        assert_eq!(u.lp_distance(&w, 1.0).unwrap(), 2.0);
        assert_eq!(u.lp_distance(&w, 0.5), Err(Error::InvalidExponent(0.5)));
        assert!(u.lp_norm(f64::NAN).is_err());
    }

    #[test]
    fn deviation_and_sup() {
        let u = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let v = StepFunction::indicator(0.0, 1.0, 0.6).unwrap();
        assert_eq!(u.deviation_measure(&u, 0.1), 0.0);
        assert_eq!(u.deviation_measure(&StepFunction::zero(), 0.5), 1.0);
        assert_eq!(u.deviation_measure(&v, 0.5), 0.0);
        assert!((u.sup_distance(&v) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn zero_function_is_inert() {
        let z = StepFunction::zero();
        assert!(z.polarize(&plus(0.3)).unwrap().is_zero());
        assert_eq!(z.lp_norm(3.0).unwrap(), 0.0);
        assert_eq!(z.superlevel_measure(0.0), 0.0);
        assert_eq!(
            z.inner_product(&StepFunction::indicator(0.0, 1.0, 1.0).unwrap()),
            0.0
        );
    }
}
