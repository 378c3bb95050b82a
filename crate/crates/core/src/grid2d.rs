//! Planar engine on the centered square index lattice `[-m, m]²` with cell size `h`.
//!
//! Two polarization modes are provided. [`GridFunction::polarize_exact`] only
//! accepts the grid-preserving reflections of [`LatticeHyperplane`] and moves
//! values without ever creating new ones. [`GridFunction::polarize_interp`]
//! accepts any planar halfspace and reads the reflected value by bilinear
//! interpolation, so it is only equimeasurable up to discretization error.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::analysis::{ConvergenceSeries, IterationOrder, SeriesRecord};
use crate::error::{Error, Result};
use crate::halfspace::Halfspace;
use crate::lattice::site_of_rank;
use crate::numeric::{abs_pow, Accumulator};

/// Nonnegative values on the cells `(i, j) ∈ [-m, m]²`, cell centers at `(i h, j h)`,
/// zero outside the array. Stored row by row, `j` from `-m` to `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    m: usize,
    h: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(m: usize, h: f64) -> Result<Self> {
        let side = 2 * m + 1;
        GridFunction::new(m, h, vec![0.0; side * side])
    }

    pub fn new(m: usize, h: f64, values: Vec<f64>) -> Result<Self> {
        let side = 2 * m + 1;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGridFunction(format!(
                "cell size {h} must be positive"
            )));
        }
        if values.len() != side * side {
            return Err(Error::InvalidGridFunction(format!(
                "expected {} values for m = {m}, got {}",
                side * side,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGridFunction(format!(
                "value {v} is not a finite nonnegative number"
            )));
        }
        Ok(GridFunction { m, h, values })
    }

    pub fn from_fn(m: usize, h: f64, f: impl Fn(i64, i64) -> f64) -> Result<Self> {
        let mi = m as i64;
        let mut values = Vec::with_capacity((2 * m + 1).pow(2));
        for j in -mi..=mi {
            for i in -mi..=mi {
                values.push(f(i, j));
            }
        }
        GridFunction::new(m, h, values)
    }

    pub fn half_width(&self) -> usize {
        self.m
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index(&self, i: i64, j: i64) -> Option<usize> {
        let m = self.m as i64;
        if i.abs() > m || j.abs() > m {
            return None;
        }
        let side = 2 * m + 1;
        Some(((j + m) * side + (i + m)) as usize)
    }

    pub fn in_bounds(&self, i: i64, j: i64) -> bool {
        self.index(i, j).is_some()
    }

    pub fn get(&self, i: i64, j: i64) -> f64 {
        self.index(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn set(&mut self, i: i64, j: i64, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidGridFunction(format!(
                "value {value} is not a finite nonnegative number"
            )));
        }
        let k = self.index(i, j).ok_or(Error::GridOverflow { i, j })?;
        self.values[k] = value;
        Ok(())
    }

    /// `(i, j, value)` in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let m = self.m as i64;
        let side = 2 * m + 1;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| ((k as i64 % side) - m, (k as i64 / side) - m, v))
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut vs = self.values.clone();
        vs.sort_by(|a, b| b.total_cmp(a));
        vs
    }

    /// Exact polarization across a grid-preserving hyperplane.
    ///
    /// Fails with [`Error::GridOverflow`] when a positive value would have to
    /// move to a cell outside the array.
    pub fn polarize_exact(&self, plane: &LatticeHyperplane) -> Result<GridFunction> {
        let mut out = self.clone();
        for (i, j, v) in self.cells() {
            let side = plane.side(i, j);
            if side == 0 {
                continue;
            }
            let (ri, rj) = plane.reflect(i, j);
            if side < 0 {
                if let Some(k) = self.index(ri, rj) {
                    let w = self.values[k];
                    out.values[k] = v.min(w);
                    out.values[self.index(i, j).unwrap()] = v.max(w);
                }
            } else if v > 0.0 && !self.in_bounds(ri, rj) {
                return Err(Error::GridOverflow { i: ri, j: rj });
            }
        }
        Ok(out)
    }

    /// Polarization across an arbitrary planar halfspace, reading `u(σ(x))` by
    /// bilinear interpolation with zero extension.
    pub fn polarize_interp(&self, h: &Halfspace) -> Result<GridFunction> {
        if h.dim() != 2 {
            return Err(Error::DimensionMismatch(2, h.dim()));
        }
        let values = self
            .cells()
            .map(|(i, j, v)| {
                let x = [i as f64 * self.h, j as f64 * self.h];
                let r = h.reflect_point(x);
                let w = self.bilinear(r[0] / self.h, r[1] / self.h);
                if h.contains(&x) {
                    v.max(w)
                } else {
                    v.min(w)
                }
            })
            .collect();
        Ok(GridFunction {
            m: self.m,
            h: self.h,
            values,
        })
    }

    /// Bilinear interpolation at fractional index coordinates. Coordinates
    /// within 1e-9 of an integer are snapped so lattice points are read exactly.
    pub fn bilinear(&self, fi: f64, fj: f64) -> f64 {
        let fi = snap(fi);
        let fj = snap(fj);
        let i0 = fi.floor();
        let j0 = fj.floor();
        let (ti, tj) = (fi - i0, fj - j0);
        let (i0, j0) = (i0 as i64, j0 as i64);
        let mut acc = self.get(i0, j0) * ((1.0 - ti) * (1.0 - tj));
        if ti > 0.0 {
            acc += self.get(i0 + 1, j0) * (ti * (1.0 - tj));
        }
        if tj > 0.0 {
            acc += self.get(i0, j0 + 1) * ((1.0 - ti) * tj);
        }
        if ti > 0.0 && tj > 0.0 {
            acc += self.get(i0 + 1, j0 + 1) * (ti * tj);
        }
        acc
    }

    /// Discrete symmetric rearrangement: values in decreasing order go to the
    /// cells ordered by `(i² + j², i, j)`.
    pub fn rearrange(&self) -> GridFunction {
        let mut out = self.clone();
        for (k, v) in canonical_cell_order(self.m)
            .into_iter()
            .zip(self.sorted_values())
        {
            let idx = self.index(k.0, k.1).unwrap();
            out.values[idx] = v;
        }
        out
    }

    /// Steiner symmetrization about a coordinate axis: every line orthogonal to
    /// `axis` is rearranged about its intersection with the axis. Ties between
    /// the two sides go to the negative side first (`0, -1, 1, -2, 2, …`), the
    /// same preference as the `(i² + j², i, j)` order of [`GridFunction::rearrange`],
    /// so rearranged grids are Steiner-invariant.
    pub fn steiner(&self, axis: SteinerAxis) -> GridFunction {
        let m = self.m as i64;
        let mut out = self.clone();
        for line in -m..=m {
            let coords = |t: i64| match axis {
                // lines orthogonal to the y-axis are the rows j = line
                SteinerAxis::Y => (t, line),
                SteinerAxis::X => (line, t),
            };
            let mut vs: Vec<f64> = (-m..=m)
                .map(|t| {
                    let (i, j) = coords(t);
                    self.get(i, j)
                })
                .collect();
            vs.sort_by(|a, b| b.total_cmp(a));
            for (r, v) in vs.into_iter().enumerate() {
                let (i, j) = coords(-site_of_rank(r as u64));
                let idx = self.index(i, j).unwrap();
                out.values[idx] = v;
            }
        }
        out
    }

    pub fn lp_distance_pow(&self, other: &GridFunction, p: f64) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| abs_pow(a - b, p))
            .collect::<Accumulator>()
            .value()
    }

    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        self.values
            .iter()
            .map(|&v| abs_pow(v, p))
            .collect::<Accumulator>()
            .value()
    }

    /// `Σ u(i, j) exp(-(i² + j²) h²)`, summed in storage order.
    pub fn gaussian_weighted_mass(&self) -> f64 {
        let h2 = self.h * self.h;
        let mut acc = Accumulator::new();
        for (i, j, v) in self.cells() {
            let r2 = (i * i + j * j) as f64;
            acc.add_product(v, (-r2 * h2).exp());
        }
        acc.value()
    }
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// Cells of `[-m, m]²` sorted by `(i² + j², i, j)`.
pub fn canonical_cell_order(m: usize) -> Vec<(i64, i64)> {
    let m = m as i64;
    let mut cells: Vec<(i64, i64)> = (-m..=m)
        .flat_map(|j| (-m..=m).map(move |i| (i, j)))
        .collect();
    cells.sort_by_key(|&(i, j)| (i * i + j * j, i, j));
    cells
}

/// Direction family of a grid-preserving hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HyperplaneDirection {
    /// `{i <= s}`
    X,
    /// `{j <= s}`
    Y,
    /// `{i + j <= s}`
    DiagUp,
    /// `{i - j <= s}`
    DiagDown,
}

/// Halfspace whose reflection maps grid cells to grid cells. Offsets are in
/// index units: half-integers allowed for `X`/`Y`, integers for the diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeHyperplane {
    direction: HyperplaneDirection,
    twice_offset: i64,
}

impl LatticeHyperplane {
    pub fn new(direction: HyperplaneDirection, offset: f64) -> Result<Self> {
        let twice = 2.0 * offset;
        if twice.fract() != 0.0 || !twice.is_finite() {
            return Err(Error::InvalidHalfspace(format!(
                "lattice offset {offset} must be a half-integer"
            )));
        }
        LatticeHyperplane::from_twice_offset(direction, twice as i64)
    }

    pub fn from_twice_offset(direction: HyperplaneDirection, twice_offset: i64) -> Result<Self> {
        let diagonal = matches!(
            direction,
            HyperplaneDirection::DiagUp | HyperplaneDirection::DiagDown
        );
        if diagonal && twice_offset % 2 != 0 {
            return Err(Error::InvalidHalfspace(format!(
                "diagonal offset {} must be an integer",
                twice_offset as f64 / 2.0
            )));
        }
        Ok(LatticeHyperplane {
            direction,
            twice_offset,
        })
    }

    pub fn direction(&self) -> HyperplaneDirection {
        self.direction
    }

    pub fn offset(&self) -> f64 {
        self.twice_offset as f64 / 2.0
    }

    /// Twice the signed index-space value `ℓ(i, j) - s`; negative strictly inside.
    pub fn side(&self, i: i64, j: i64) -> i64 {
        let lhs = match self.direction {
            HyperplaneDirection::X => i,
            HyperplaneDirection::Y => j,
            HyperplaneDirection::DiagUp => i + j,
            HyperplaneDirection::DiagDown => i - j,
        };
        2 * lhs - self.twice_offset
    }

    pub fn reflect(&self, i: i64, j: i64) -> (i64, i64) {
        let t = self.twice_offset;
        let s = t / 2;
        match self.direction {
            HyperplaneDirection::X => (t - i, j),
            HyperplaneDirection::Y => (i, t - j),
            HyperplaneDirection::DiagUp => (s - j, s - i),
            HyperplaneDirection::DiagDown => (j + s, i - s),
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.twice_offset >= 0
    }

    /// The same halfspace in physical coordinates for cell size `h`.
    pub fn to_halfspace(&self, h: f64) -> Halfspace {
        let s = self.offset();
        match self.direction {
            HyperplaneDirection::X => Halfspace::in_plane(0.0, s * h),
            HyperplaneDirection::Y => Halfspace::in_plane(FRAC_PI_2, s * h),
            HyperplaneDirection::DiagUp => Halfspace::in_plane(FRAC_PI_4, s * h * FRAC_1_SQRT_2),
            HyperplaneDirection::DiagDown => Halfspace::in_plane(-FRAC_PI_4, s * h * FRAC_1_SQRT_2),
        }
    }
}

/// Symmetry axis of a Steiner symmetrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteinerAxis {
    /// Columns are centered on the x-axis.
    X,
    /// Rows are centered on the y-axis.
    Y,
}

/// One operation of a mixed schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedStep {
    Polarize(LatticeHyperplane),
    Steiner(SteinerAxis),
}

impl GridFunction {
    pub fn apply(&self, step: &MixedStep) -> Result<GridFunction> {
        match step {
            MixedStep::Polarize(plane) => self.polarize_exact(plane),
            MixedStep::Steiner(axis) => Ok(self.steiner(*axis)),
        }
    }
}

/// Triangular scheme over `steps` (repeated cyclically if shorter than
/// `n_max`), recording after each outer step the ℓ^p and sup distance to the
/// rearrangement, the Gaussian weighted mass and the number of cells with
/// `|u_n - u*| > eps`. Row `n = 0` is the input.
pub fn mixed_schedule(
    u: &GridFunction,
    steps: &[MixedStep],
    n_max: usize,
    p: f64,
    eps: f64,
) -> Result<ConvergenceSeries> {
    mixed_schedule_ordered(u, steps, n_max, p, eps, IterationOrder::Forward)
}

/// [`mixed_schedule`] with a choice of order within each outer step.
pub fn mixed_schedule_ordered(
    u: &GridFunction,
    steps: &[MixedStep],
    n_max: usize,
    p: f64,
    eps: f64,
    order: IterationOrder,
) -> Result<ConvergenceSeries> {
    if steps.is_empty() {
        return Err(Error::InvalidParameter(
            "mixed schedule needs at least one step".into(),
        ));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let target = u.rearrange();
    let record = |n: usize, f: &GridFunction| SeriesRecord {
        n,
        lp_error: f.lp_distance_pow(&target, p).powf(1.0 / p),
        weighted_mass: f.gaussian_weighted_mass(),
        sup_error: f
            .values
            .iter()
            .zip(&target.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
        deviation_measure: f
            .values
            .iter()
            .zip(&target.values)
            .filter(|(a, b)| (*a - *b).abs() > eps)
            .count() as f64,
    };
    let mut series = ConvergenceSeries::default();
    let mut current = u.clone();
    series.records.push(record(0, &current));
    for n in 1..=n_max {
        for k in 0..n {
            let k = match order {
                IterationOrder::Forward => k,
                IterationOrder::Reversed => n - 1 - k,
            };
            current = current.apply(&steps[k % steps.len()])?;
            series.polarizations += 1;
        }
        series.records.push(record(n, &current));
    }
    Ok(series)
}
