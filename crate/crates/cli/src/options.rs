use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use rearrange_lab::{IterationOrder, RadialWeight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineKind {
    Step1d,
    Lattice,
    Grid2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Order {
    #[default]
    Forward,
    Reversed,
}

impl From<Order> for IterationOrder {
    fn from(order: Order) -> Self {
        match order {
            Order::Forward => IterationOrder::Forward,
            Order::Reversed => IterationOrder::Reversed,
        }
    }
}

/// `gaussian`, `triangular` or `triangular:<radius>`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeightSpec(pub RadialWeight);

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "gaussian" {
            return Ok(WeightSpec(RadialWeight::Gaussian));
        }
        if s == "triangular" {
            return Ok(WeightSpec::default());
        }
        let radius = s
            .strip_prefix("triangular:")
            .ok_or_else(|| format!("expected `gaussian` or `triangular:<radius>`, got `{s}`"))?;
        let radius: f64 = radius
            .parse()
            .map_err(|_| format!("`{radius}` is not a radius"))?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(format!("radius must be positive, got {radius}"));
        }
        Ok(WeightSpec(RadialWeight::Triangular { radius }))
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            RadialWeight::Gaussian => write!(f, "gaussian"),
            RadialWeight::Triangular { radius } => write!(f, "triangular:{radius}"),
        }
    }
}

pub fn parse_p(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if p >= 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(format!("p must be at least 1, got {p}"))
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {x}"))
    }
}
