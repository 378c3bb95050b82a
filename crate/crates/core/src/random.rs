//! Seeded generators for random test inputs.
//!
//! Step functions have at most 20 pieces, breakpoints on the dyadic grid
//! `(1/8)ℤ ∩ [-8, 8]` and values in `(0, 10]` (interior gaps may be zero).

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid2d::{GridFunction, HyperplaneDirection, LatticeHyperplane};
use crate::halfspace::{Halfspace, Sign};
use crate::lattice::LatticeFunction;
use crate::step1d::StepFunction;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSampler {
    pub max_pieces: usize,
    pub half_span: f64,
    /// Breakpoints are multiples of `1 / resolution`.
    pub resolution: u32,
    pub max_value: f64,
    /// Probability that an interior piece is zero.
    pub gap_probability: f64,
}

impl Default for StepSampler {
    fn default() -> Self {
        StepSampler {
            max_pieces: 20,
            half_span: 8.0,
            resolution: 8,
            max_value: 10.0,
            gap_probability: 0.15,
        }
    }
}

impl StepSampler {
    /// A random function with at least one positive piece.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> StepFunction {
        let res = self.resolution as f64;
        let points = (2.0 * self.half_span * res) as usize + 1;
        let pieces = rng.gen_range(1..=self.max_pieces.min(points - 1));
        let mut idx = sample(rng, points, pieces + 1).into_vec();
        idx.sort_unstable();
        let breakpoints: Vec<f64> = idx
            .iter()
            .map(|&k| k as f64 / res - self.half_span)
            .collect();
        let values: Vec<f64> = (0..pieces)
            .map(|k| {
                let interior = k != 0 && k + 1 != pieces;
                if interior && rng.gen_bool(self.gap_probability) {
                    0.0
                } else {
                    self.sample_value(rng)
                }
            })
            .collect();
        StepFunction::new(breakpoints, values).expect("sampled data is valid")
    }

    /// Half of the values are integers so that ties between pieces occur.
    fn sample_value<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.gen_bool(0.5) {
            rng.gen_range(1..=self.max_value.max(1.0) as u32) as f64
        } else {
            self.max_value * (1.0 - rng.gen::<f64>())
        }
    }
}

/// Halfspace on the line with a random sign and an offset drawn from
/// `(1/64)ℤ ∩ [min_offset, max_offset]`.
pub fn line_halfspace<R: Rng + ?Sized>(rng: &mut R, min_offset: f64, max_offset: f64) -> Halfspace {
    let lo = (min_offset * 64.0).ceil() as i64;
    let hi = (max_offset * 64.0).floor() as i64;
    let offset = rng.gen_range(lo..=hi) as f64 / 64.0;
    let sign = if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Halfspace::on_line(sign, offset)
}

/// At most `max_support` sites in `[-span, span]` with integer values `1..=max_value`.
pub fn lattice_function<R: Rng + ?Sized>(
    rng: &mut R,
    max_support: usize,
    max_value: u32,
    span: i64,
) -> LatticeFunction {
    let width = (2 * span + 1) as usize;
    let size = rng.gen_range(0..=max_support.min(width));
    let sites = sample(rng, width, size);
    LatticeFunction::new(
        sites
            .into_iter()
            .map(|k| (k as i64 - span, rng.gen_range(1..=max_value) as f64)),
    )
    .expect("sampled data is valid")
}

/// Grid function whose support sits in the central `[-inner, inner]²` block.
pub fn grid_function<R: Rng + ?Sized>(rng: &mut R, m: usize, inner: usize, h: f64) -> GridFunction {
    let inner = inner.min(m) as i64;
    let density = rng.gen_range(0.1..0.9);
    let integer_values = rng.gen_bool(0.5);
    let mut values = Vec::new();
    for j in -(m as i64)..=m as i64 {
        for i in -(m as i64)..=m as i64 {
            let inside = i.abs() <= inner && j.abs() <= inner;
            let v = if inside && rng.gen_bool(density) {
                if integer_values {
                    rng.gen_range(1..=9) as f64
                } else {
                    10.0 * (1.0 - rng.gen::<f64>())
                }
            } else {
                0.0
            };
            values.push(v);
        }
    }
    GridFunction::new(m, h, values).expect("sampled data is valid")
}

/// Random grid-preserving hyperplane with `|offset| <= max_offset`.
pub fn lattice_hyperplane<R: Rng + ?Sized>(rng: &mut R, max_offset: i64) -> LatticeHyperplane {
    use HyperplaneDirection::*;
    let direction = [X, Y, DiagUp, DiagDown][rng.gen_range(0..4)];
    let twice = match direction {
        X | Y => rng.gen_range(-2 * max_offset..=2 * max_offset),
        _ => 2 * rng.gen_range(-max_offset..=max_offset),
    };
    LatticeHyperplane::from_twice_offset(direction, twice).expect("valid offset")
}
