//! Discrete engine on the integers with the spiral order `0 ≺ 1 ≺ -1 ≺ 2 ≺ -2 ≺ …`.

use std::collections::BTreeMap;

use crate::analysis::{ConvergenceSeries, IterationOrder, SeriesRecord};
use crate::error::{Error, Result};
use crate::numeric::{abs_pow, Accumulator};

/// Position of a site in the spiral order.
pub fn rank(x: i64) -> u64 {
    match x {
        0 => 0,
        x if x > 0 => 2 * x as u64 - 1,
        x => 2 * x.unsigned_abs(),
    }
}

/// Inverse of [`rank`].
pub fn site_of_rank(r: u64) -> i64 {
    if r == 0 {
        0
    } else if r % 2 == 1 {
        r.div_ceil(2) as i64
    } else {
        -((r / 2) as i64)
    }
}

/// `x ≺ y` in the spiral order.
pub fn precedes(x: i64, y: i64) -> bool {
    rank(x) < rank(y)
}

/// First `count` sites in spiral order: `0, 1, -1, 2, -2, …`.
pub fn spiral_enumeration(count: usize) -> Vec<i64> {
    (0..count as u64).map(site_of_rank).collect()
}

/// Isometric involution of the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeInvolution {
    /// `x ↦ c - x`.
    Reflection(i64),
    /// `x ↦ x`; polarizing by it changes nothing.
    Identity,
}

impl LatticeInvolution {
    pub fn apply(self, x: i64) -> i64 {
        match self {
            LatticeInvolution::Reflection(c) => c - x,
            LatticeInvolution::Identity => x,
        }
    }
}

/// Finitely supported nonnegative function on the integers. Only positive
/// values are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LatticeFunction {
    values: BTreeMap<i64, f64>,
}

impl LatticeFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Rejects negative or non-finite values and repeated sites; drops zeros.
    pub fn new<I: IntoIterator<Item = (i64, f64)>>(entries: I) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (site, v) in entries {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidLatticeFunction(format!(
                    "value {v} at site {site} is not a finite nonnegative number"
                )));
            }
            if values.insert(site, v).is_some() {
                return Err(Error::InvalidLatticeFunction(format!(
                    "site {site} appears twice"
                )));
            }
        }
        values.retain(|_, v| *v > 0.0);
        Ok(LatticeFunction { values })
    }

    fn from_map(mut values: BTreeMap<i64, f64>) -> Self {
        values.retain(|_, v| *v > 0.0);
        LatticeFunction { values }
    }

    pub fn get(&self, x: i64) -> f64 {
        self.values.get(&x).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Values sorted in decreasing order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut vs: Vec<f64> = self.values.values().copied().collect();
        vs.sort_by(|a, b| b.total_cmp(a));
        vs
    }

    /// Decreasing rearrangement along the spiral order: the `j`-th largest
    /// value goes to the site of rank `j`.
    pub fn rearrange(&self) -> LatticeFunction {
        let values = self
            .sorted_values()
            .into_iter()
            .enumerate()
            .map(|(r, v)| (site_of_rank(r as u64), v))
            .collect();
        LatticeFunction { values }
    }

    /// On each orbit `{x, i(x)}` the larger value goes to the spiral-smaller site.
    pub fn polarize(&self, involution: LatticeInvolution) -> LatticeFunction {
        let mut out = BTreeMap::new();
        for (&x, &ux) in &self.values {
            let y = involution.apply(x);
            if x == y {
                out.insert(x, ux);
                continue;
            }
            let uy = self.get(y);
            let (first, second) = if precedes(x, y) { (x, y) } else { (y, x) };
            out.insert(first, ux.max(uy));
            out.insert(second, ux.min(uy));
        }
        LatticeFunction::from_map(out)
    }

    /// True when the values never increase along the spiral order.
    pub fn is_spiral_nonincreasing(&self) -> bool {
        let mut by_rank: Vec<(u64, f64)> = self.iter().map(|(x, v)| (rank(x), v)).collect();
        by_rank.sort_by_key(|&(r, _)| r);
        by_rank.iter().enumerate().all(|(i, &(r, _))| r == i as u64)
            && by_rank.windows(2).all(|w| w[0].1 >= w[1].1)
    }

    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        self.values
            .values()
            .map(|&v| abs_pow(v, p))
            .collect::<Accumulator>()
            .value()
    }

    pub fn lp_distance_pow(&self, other: &LatticeFunction, p: f64) -> f64 {
        self.paired(other)
            .map(|(_, a, b)| abs_pow(a - b, p))
            .collect::<Accumulator>()
            .value()
    }

    pub fn sup_distance(&self, other: &LatticeFunction) -> f64 {
        self.paired(other)
            .map(|(_, a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Number of sites with `|u - v| > eps`.
    pub fn deviation_count(&self, other: &LatticeFunction, eps: f64) -> usize {
        self.paired(other)
            .filter(|&(_, a, b)| (a - b).abs() > eps)
            .count()
    }

    /// `Σ u(x) / (1 + rank(x))`, a concentration functional that polarizations never decrease.
    pub fn rank_weighted_mass(&self) -> f64 {
        let mut acc = Accumulator::new();
        for (x, v) in self.iter() {
            acc.add(v / (1.0 + rank(x) as f64));
        }
        acc.value()
    }

    fn paired<'a>(
        &'a self,
        other: &'a LatticeFunction,
    ) -> impl Iterator<Item = (i64, f64, f64)> + 'a {
        let mut sites: Vec<i64> = self
            .values
            .keys()
            .chain(other.values.keys())
            .copied()
            .collect();
        sites.sort_unstable();
        sites.dedup();
        sites
            .into_iter()
            .map(move |x| (x, self.get(x), other.get(x)))
    }
}

/// Fixed point of the alternating two-involution scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoInvolutionOutcome {
    pub fixed_point: LatticeFunction,
    /// Sweeps performed, including the final sweep that changed nothing.
    pub sweeps: usize,
}

/// Alternates `x ↦ -x` and `x ↦ 1 - x` until neither changes the function.
pub fn two_involution_scheme(
    u: &LatticeFunction,
    max_sweeps: usize,
) -> Result<TwoInvolutionOutcome> {
    two_involution_scheme_with(
        u,
        LatticeInvolution::Reflection(0),
        LatticeInvolution::Reflection(1),
        max_sweeps,
    )
}

/// One sweep polarizes by `first` and then by `second`; sweeps repeat until
/// one of them leaves the function unchanged.
pub fn two_involution_scheme_with(
    u: &LatticeFunction,
    first: LatticeInvolution,
    second: LatticeInvolution,
    max_sweeps: usize,
) -> Result<TwoInvolutionOutcome> {
    if max_sweeps == 0 {
        return Err(Error::InvalidParameter(
            "max_sweeps must be at least 1".into(),
        ));
    }
    let mut current = u.clone();
    for sweep in 1..=max_sweeps {
        let next = current.polarize(first).polarize(second);
        if next == current {
            return Ok(TwoInvolutionOutcome {
                fixed_point: current,
                sweeps: sweep,
            });
        }
        current = next;
    }
    Err(Error::NoConvergence(max_sweeps))
}

/// Triangular scheme `u_{n+1} = u_n` polarized by `i_{c_1}, …, i_{c_{n+1}}`,
/// recording the distance to the rearrangement after each outer step.
/// Row `n = 0` is the input. `centers` must hold at least `n_max` entries.
pub fn schedule_scheme_lattice(
    u: &LatticeFunction,
    centers: &[i64],
    n_max: usize,
    p: f64,
    eps: f64,
) -> Result<ConvergenceSeries> {
    schedule_scheme_lattice_ordered(u, centers, n_max, p, eps, IterationOrder::Forward)
}

/// [`schedule_scheme_lattice`] with a choice of order within each outer step.
pub fn schedule_scheme_lattice_ordered(
    u: &LatticeFunction,
    centers: &[i64],
    n_max: usize,
    p: f64,
    eps: f64,
    order: IterationOrder,
) -> Result<ConvergenceSeries> {
    if centers.len() < n_max {
        return Err(Error::InvalidParameter(format!(
            "{} reflection centers given, {} needed",
            centers.len(),
            n_max
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let target = u.rearrange();
    let record = |n: usize, f: &LatticeFunction| SeriesRecord {
        n,
        lp_error: f.lp_distance_pow(&target, p).powf(1.0 / p),
        weighted_mass: f.rank_weighted_mass(),
        sup_error: f.sup_distance(&target),
        deviation_measure: f.deviation_count(&target, eps) as f64,
    };
    let mut series = ConvergenceSeries::default();
    let mut current = u.clone();
    series.records.push(record(0, &current));
    for n in 1..=n_max {
        for k in 0..n {
            let c = match order {
                IterationOrder::Forward => centers[k],
                IterationOrder::Reversed => centers[n - 1 - k],
            };
            current = current.polarize(LatticeInvolution::Reflection(c));
            series.polarizations += 1;
        }
        series.records.push(record(n, &current));
    }
    Ok(series)
}
