//! Closed halfspaces `H = {x : <x, ν> <= d}` on the line and in the plane,
//! their reflections, a metric between them, and the dyadic schedules that
//! drive the polarization schemes.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::format_f64;

/// Orientation of a halfspace on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Unit normal of a halfspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normal {
    /// `ν = ±1` in dimension 1.
    Line(Sign),
    /// `ν = (cos θ, sin θ)` in dimension 2.
    Plane { angle: f64 },
}

/// Position of the origin relative to a halfspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// The origin is an interior point (`offset > 0`).
    Interior0,
    /// The origin lies on the boundary hyperplane (`offset == 0`).
    Boundary0,
    /// The origin is not in the halfspace (`offset < 0`).
    Excludes0,
}

/// Closed halfspace `{x : <x, normal> <= offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    normal: Normal,
    offset: f64,
}

impl Halfspace {
    pub fn on_line(sign: Sign, offset: f64) -> Self {
        Halfspace {
            normal: Normal::Line(sign),
            offset,
        }
    }

    /// Halfspace in the plane whose outward normal has polar angle `angle` (radians).
    pub fn in_plane(angle: f64, offset: f64) -> Self {
        Halfspace {
            normal: Normal::Plane { angle },
            offset,
        }
    }

    pub fn dim(&self) -> usize {
        match self.normal {
            Normal::Line(_) => 1,
            Normal::Plane { .. } => 2,
        }
    }

    pub fn normal(&self) -> Normal {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Normal as a vector of length `dim()`.
    pub fn normal_vector(&self) -> Vec<f64> {
        match self.normal {
            Normal::Line(s) => vec![s.value()],
            Normal::Plane { angle } => {
                let (s, c) = angle.sin_cos();
                vec![c, s]
            }
        }
    }

    pub fn classify(&self) -> Classification {
        if self.offset > 0.0 {
            Classification::Interior0
        } else if self.offset == 0.0 {
            Classification::Boundary0
        } else {
            Classification::Excludes0
        }
    }

    /// Signed distance `<x, ν> - d`; nonpositive exactly on the halfspace.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension");
        let nu = self.normal_vector();
        dot(x, &nu) - self.offset
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) <= 0.0
    }

    /// On the line, the single point of the boundary (`ν·d`).
    pub fn boundary_point(&self) -> f64 {
        match self.normal {
            Normal::Line(s) => s.value() * self.offset,
            Normal::Plane { .. } => panic!("boundary_point is only defined on the line"),
        }
    }

    /// Reflection across the boundary on the line: `x ↦ 2c - x`.
    pub fn reflect_scalar(&self, x: f64) -> f64 {
        2.0 * self.boundary_point() - x
    }

    /// Reflection across the boundary in the plane.
    pub fn reflect_point(&self, p: [f64; 2]) -> [f64; 2] {
        let v = self.reflect(&p);
        [v[0], v[1]]
    }

    /// `x - 2(<x, ν> - d) ν`.
    pub fn reflect(&self, x: &[f64]) -> Vec<f64> {
        if let Normal::Line(_) = self.normal {
            assert_eq!(x.len(), 1, "point dimension");
            return vec![self.reflect_scalar(x[0])];
        }
        let nu = self.normal_vector();
        let t = 2.0 * self.signed_distance(x);
        x.iter().zip(&nu).map(|(xi, ni)| xi - t * ni).collect()
    }

    /// Angle between the normals plus the offset difference.
    pub fn distance(&self, other: &Halfspace) -> Result<f64> {
        let angle = match (self.normal, other.normal) {
            (Normal::Line(a), Normal::Line(b)) => {
                if a == b {
                    0.0
                } else {
                    PI
                }
            }
            (Normal::Plane { angle: a }, Normal::Plane { angle: b }) => {
                let diff = (a - b).rem_euclid(TAU);
                diff.min(TAU - diff)
            }
            _ => return Err(Error::DimensionMismatch(self.dim(), other.dim())),
        };
        Ok(angle + (self.offset - other.offset).abs())
    }

    /// Parses `nu=<±1 or θ>,d=<offset>` for a halfspace of dimension `dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Halfspace> {
        let bad = |msg: &str| Error::InvalidHalfspace(format!("{msg}: `{text}`"));
        let mut nu = None;
        let mut d = None;
        for field in text.trim().split(',') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad("value is not a number"))?;
            if !value.is_finite() {
                return Err(bad("value is not finite"));
            }
            match key.trim() {
                "nu" => nu = Some(value),
                "d" => d = Some(value),
                _ => return Err(bad("unknown key")),
            }
        }
        let (nu, d) = match (nu, d) {
            (Some(nu), Some(d)) => (nu, d),
            _ => return Err(bad("both nu and d are required")),
        };
        match dim {
            1 if nu == 1.0 => Ok(Halfspace::on_line(Sign::Plus, d)),
            1 if nu == -1.0 => Ok(Halfspace::on_line(Sign::Minus, d)),
            1 => Err(bad("on the line nu must be 1 or -1")),
            2 => Ok(Halfspace::in_plane(nu, d)),
            _ => Err(bad("only dimensions 1 and 2 are supported")),
        }
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nu = match self.normal {
            Normal::Line(Sign::Plus) => "1".to_string(),
            Normal::Line(Sign::Minus) => "-1".to_string(),
            Normal::Plane { angle } => format_f64(angle),
        };
        write!(f, "nu={},d={}", nu, format_f64(self.offset))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `rho` is meant to cover the support of the functions being polarized.
    FullDyadic,
    /// `rho` is small: only halfspaces whose boundary meets `B(0, rho)`.
    RestrictedDyadic,
}

/// Offsets are rounded to this dyadic grid so reflections of dyadic data stay exact.
const OFFSET_GRID: f64 = (1u64 << 40) as f64;

/// Deterministic dense enumeration of halfspaces with offsets in `(0, rho]`.
///
/// On the line the normals alternate `+1, -1` and the offsets run through the
/// dyadic fractions of `rho` breadth first: `1/2, 1/4, 3/4, 1/8, 3/8, ...`,
/// each offset appearing once per sign. In the plane the dyadic angles
/// `0, π, π/2, 3π/2, π/4, ...` are paired with the same offsets along the
/// Cantor diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    dim: usize,
    rho: f64,
    kind: ScheduleKind,
    cursor: u64,
}

impl Schedule {
    pub fn new(dim: usize, rho: f64, kind: ScheduleKind) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!(
                "schedule dimension must be 1 or 2, got {dim}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive, got {rho}"
            )));
        }
        Ok(Schedule {
            dim,
            rho,
            kind,
            cursor: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// The `n`-th halfspace, `n >= 1`.
    pub fn halfspace(&self, n: u64) -> Halfspace {
        assert!(n >= 1, "schedule indices start at 1");
        let idx = n - 1;
        match self.dim {
            1 => {
                let sign = if idx.is_multiple_of(2) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                Halfspace::on_line(sign, self.offset(idx / 2))
            }
            _ => {
                let (angle_idx, offset_idx) = cantor_unpair(idx);
                Halfspace::in_plane(dyadic_angle(angle_idx), self.offset(offset_idx))
            }
        }
    }

    /// First `count` halfspaces.
    pub fn prefix(&self, count: usize) -> Vec<Halfspace> {
        (1..=count as u64).map(|n| self.halfspace(n)).collect()
    }

    fn offset(&self, idx: u64) -> f64 {
        let (k, level) = dyadic_fraction(idx);
        let exact = self.rho * (k as f64) / (2f64).powi(level as i32);
        (exact * OFFSET_GRID).round() / OFFSET_GRID
    }
}

impl Iterator for Schedule {
    type Item = Halfspace;

    fn next(&mut self) -> Option<Halfspace> {
        self.cursor += 1;
        Some(self.halfspace(self.cursor))
    }
}

/// `idx`-th odd dyadic fraction `k / 2^level` in breadth-first order.
fn dyadic_fraction(idx: u64) -> (u64, u32) {
    let j = idx + 1;
    let level = 64 - j.leading_zeros();
    let k = 2 * (j - (1 << (level - 1))) + 1;
    (k, level)
}

/// `0, π, π/2, 3π/2, π/4, 3π/4, ...`: each dyadic angle exactly once.
fn dyadic_angle(idx: u64) -> f64 {
    if idx == 0 {
        return 0.0;
    }
    let level = 64 - idx.leading_zeros();
    let k = 2 * (idx - (1 << (level - 1))) + 1;
    TAU * (k as f64) / (2f64).powi(level as i32)
}

fn cantor_unpair(idx: u64) -> (u64, u64) {
    let mut diag = ((((8 * idx + 1) as f64).sqrt() - 1.0) / 2.0) as u64;
    while diag * (diag + 1) / 2 > idx {
        diag -= 1;
    }
    while (diag + 1) * (diag + 2) / 2 <= idx {
        diag += 1;
    }
    let r = idx - diag * (diag + 1) / 2;
    (r, diag - r)
}

/// Smallest `n <= n_max` whose schedule element is within `eps` of `target`.
pub fn density_witness(
    schedule: &Schedule,
    target: &Halfspace,
    eps: f64,
    n_max: u64,
) -> Option<u64> {
    (1..=n_max).find(|&n| {
        schedule
            .halfspace(n)
            .distance(target)
            .map(|dist| dist < eps)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(sign: Sign, d: f64) -> Halfspace {
        Halfspace::on_line(sign, d)
    }

    #[test]
    fn reflect_examples() {
        let h = line(Sign::Plus, 0.5);
        assert_eq!(h.reflect(&[3.0]), vec![-2.0]);
        assert_eq!(h.reflect(&[0.5]), vec![0.5]);
        let h = Halfspace::in_plane(PI / 2.0, 0.0);
        let r = h.reflect_point([2.0, 3.0]);
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_normal_reflects_about_minus_offset() {
        let h = line(Sign::Minus, 0.5);
        assert_eq!(h.reflect_scalar(1.0), -2.0);
        assert!(h.contains(&[-0.5]));
        assert!(!h.contains(&[-0.75]));
    }

    #[test]
    fn distance_examples() {
        let a = line(Sign::Plus, 0.5);
        assert_eq!(a.distance(&a).unwrap(), 0.0);
        assert_eq!(a.distance(&line(Sign::Minus, 0.5)).unwrap(), PI);
        let b = Halfspace::in_plane(0.0, 0.25);
        let c = Halfspace::in_plane(PI / 2.0, 0.5);
        assert!((b.distance(&c).unwrap() - (PI / 2.0 + 0.25)).abs() < 1e-15);
        assert_eq!(a.distance(&b), Err(Error::DimensionMismatch(1, 2)));
    }

    #[test]
    fn plane_angle_wraps() {
        let a = Halfspace::in_plane(0.1, 0.0);
        let b = Halfspace::in_plane(TAU - 0.1, 0.0);
        assert!((a.distance(&b).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn classification_follows_offset_sign() {
        assert_eq!(line(Sign::Plus, 0.1).classify(), Classification::Interior0);
        assert_eq!(line(Sign::Minus, 0.0).classify(), Classification::Boundary0);
        assert_eq!(
            Halfspace::in_plane(1.0, -0.1).classify(),
            Classification::Excludes0
        );
    }

    #[test]
    fn schedule_line_prefix() {
        let s = Schedule::new(1, 1.0, ScheduleKind::FullDyadic).unwrap();
        let expected = [
            (Sign::Plus, 0.5),
            (Sign::Minus, 0.5),
            (Sign::Plus, 0.25),
            (Sign::Minus, 0.25),
            (Sign::Plus, 0.75),
            (Sign::Minus, 0.75),
            (Sign::Plus, 0.125),
            (Sign::Minus, 0.125),
            (Sign::Plus, 0.375),
        ];
        for (n, (sign, d)) in expected.into_iter().enumerate() {
            assert_eq!(s.halfspace(n as u64 + 1), line(sign, d), "n = {}", n + 1);
        }
    }

    #[test]
    fn schedule_plane_starts_on_the_diagonal() {
        let s = Schedule::new(2, 1.0, ScheduleKind::FullDyadic).unwrap();
        assert_eq!(s.halfspace(1), Halfspace::in_plane(0.0, 0.5));
        assert_eq!(s.halfspace(2), Halfspace::in_plane(0.0, 0.25));
        assert_eq!(s.halfspace(3), Halfspace::in_plane(PI, 0.5));
        assert_eq!(s.halfspace(6), Halfspace::in_plane(PI / 2.0, 0.5));
    }

    #[test]
    fn cantor_unpair_enumerates_every_pair_once() {
        let mut seen = std::collections::HashSet::new();
        for idx in 0..(20 * 21 / 2) {
            let (a, b) = cantor_unpair(idx);
            assert!(a + b < 20);
            assert!(seen.insert((a, b)));
        }
    }

    #[test]
    fn dyadic_angles_are_distinct() {
        let angles: Vec<f64> = (0..64).map(dyadic_angle).collect();
        assert_eq!(&angles[..4], &[0.0, PI, PI / 2.0, 3.0 * PI / 2.0]);
        for (i, a) in angles.iter().enumerate() {
            assert!((0.0..TAU).contains(a));
            assert!(angles[..i].iter().all(|b| b != a));
        }
    }

    #[test]
    fn offsets_stay_in_range_for_non_dyadic_rho() {
        let s = Schedule::new(1, 0.1, ScheduleKind::RestrictedDyadic).unwrap();
        for h in s.take(5000) {
            assert!(h.offset() > 0.0 && h.offset() <= 0.1);
            assert_eq!(h.offset() * OFFSET_GRID, (h.offset() * OFFSET_GRID).round());
        }
    }

    #[test]
    fn density_witness_examples() {
        let s = Schedule::new(1, 1.0, ScheduleKind::FullDyadic).unwrap();
        assert_eq!(
            density_witness(&s, &line(Sign::Plus, 0.5), 1e-9, 100),
            Some(1)
        );
        // Frozen from a linear scan of the enumeration: (+,1/2) (-,1/2) (+,1/4) (-,1/4) (+,3/4) (-,3/4).
        assert_eq!(
            density_witness(&s, &line(Sign::Minus, 0.75), 1e-9, 100),
            Some(6)
        );
        let third = density_witness(&s, &line(Sign::Plus, 1.0 / 3.0), 0.01, 10_000).unwrap();
        assert!(
            s.halfspace(third)
                .distance(&line(Sign::Plus, 1.0 / 3.0))
                .unwrap()
                < 0.01
        );
        assert_eq!(density_witness(&s, &line(Sign::Plus, 0.3), 1e-12, 50), None);
    }

    #[test]
    fn text_round_trip() {
        let h = Halfspace::in_plane(1.0 / 3.0, 0.1 + 0.2);
        assert_eq!(Halfspace::parse(&h.to_string(), 2).unwrap(), h);
        assert_eq!(line(Sign::Minus, 0.5).to_string(), "nu=-1,d=0.5");
        assert_eq!(
            Halfspace::parse("nu=1,d=0", 1).unwrap(),
            line(Sign::Plus, 0.0)
        );
        assert!(Halfspace::parse("nu=0.5,d=0", 1).is_err());
        assert!(Halfspace::parse("nu=1", 1).is_err());
        assert!(Halfspace::parse("nu=x,d=1", 2).is_err());
    }
}
