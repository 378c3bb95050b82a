//! Compensated accumulation.
//!
//! Polarization and rearrangement only move pieces around, so two functions
//! related by either operation have mathematically identical integrals. The
//! accumulator below keeps a double-double running sum (error-free `two_sum`
//! and fused `two_prod`) so that those integrals also agree in floating point,
//! independent of how the support happens to be split into pieces.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Double-double accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    hi: f64,
    lo: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = two_sum(s, lo);
        self.hi = hi;
        self.lo = lo;
    }

    /// Adds `a * b` without rounding the product first.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }

    /// Adds `a * b * c`, keeping the first product exact.
    pub fn add_triple(&mut self, a: f64, b: f64, c: f64) {
        let (p, e) = two_prod(a, b);
        self.add_product(p, c);
        self.add_product(e, c);
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

impl std::iter::FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `|x|^p` with the common exponents special-cased so they stay exact where possible.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// Shortest decimal representation that parses back to the same bits.
pub fn format_f64(x: f64) -> String {
    format!("{x}")
}
