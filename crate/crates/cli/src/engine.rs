//! Function files of the three engines behind one type, and error-to-exit-code mapping.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use rearrange_lab::io::{self, FileKind};
use rearrange_lab::{
    Error, GridFunction, Halfspace, HyperplaneDirection, LatticeFunction, LatticeHyperplane,
    LatticeInvolution, StepFunction,
};

use crate::options::EngineKind;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }

    pub fn with_code(code: u8, error: anyhow::Error) -> Self {
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GridOverflow { .. } => 3,
            Error::NoConvergence(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Function {
    Step(StepFunction),
    Lattice(LatticeFunction),
    Grid(GridFunction),
}

impl Function {
    pub fn parse(text: &str, engine: Option<EngineKind>) -> Result<Function, Failure> {
        let engine = match engine {
            Some(e) => e,
            None => match io::detect_kind(text) {
                Some(FileKind::Step) => EngineKind::Step1d,
                Some(FileKind::Lattice) => EngineKind::Lattice,
                Some(FileKind::Grid) => EngineKind::Grid2d,
                None => {
                    return Err(Failure::usage(anyhow!(
                        "cannot tell the file format from its first line; pass --engine"
                    )))
                }
            },
        };
        Ok(match engine {
            EngineKind::Step1d => Function::Step(io::parse_step(text)?),
            EngineKind::Lattice => Function::Lattice(io::parse_lattice(text)?),
            EngineKind::Grid2d => Function::Grid(io::parse_grid(text)?),
        })
    }

    pub fn to_text(&self) -> String {
        match self {
            Function::Step(u) => io::write_step(u),
            Function::Lattice(u) => io::write_lattice(u),
            Function::Grid(u) => io::write_grid(u),
        }
    }

    pub fn rearrange(&self) -> Function {
        match self {
            Function::Step(u) => Function::Step(u.rearrange()),
            Function::Lattice(u) => Function::Lattice(u.rearrange()),
            Function::Grid(u) => Function::Grid(u.rearrange()),
        }
    }

    pub fn polarize(&self, spec: &str) -> Result<Function, Failure> {
        Ok(match self {
            Function::Step(u) => Function::Step(u.polarize(&Halfspace::parse(spec, 1)?)?),
            Function::Lattice(u) => Function::Lattice(u.polarize(parse_involution(spec)?)),
            Function::Grid(u) => {
                if spec.trim_start().starts_with("nu=") {
                    Function::Grid(u.polarize_interp(&Halfspace::parse(spec, 2)?)?)
                } else {
                    Function::Grid(u.polarize_exact(&parse_lattice_hyperplane(spec)?)?)
                }
            }
        })
    }
}

/// `c=<int>` for `x ↦ c - x`, or `identity`.
pub fn parse_involution(spec: &str) -> Result<LatticeInvolution, Error> {
    let spec = spec.trim();
    if spec == "identity" {
        return Ok(LatticeInvolution::Identity);
    }
    spec.strip_prefix("c=")
        .and_then(|c| c.trim().parse().ok())
        .map(LatticeInvolution::Reflection)
        .ok_or_else(|| {
            Error::InvalidHalfspace(format!(
                "expected `c=<integer>` or `identity`, got `{spec}`"
            ))
        })
}

/// `x=<s>`, `y=<s>`, `diag-up=<s>` or `diag-down=<s>`, offsets in index units.
pub fn parse_lattice_hyperplane(spec: &str) -> Result<LatticeHyperplane, Error> {
    let bad = || {
        Error::InvalidHalfspace(format!(
            "expected `x=`, `y=`, `diag-up=` or `diag-down=` with an offset, got `{spec}`"
        ))
    };
    let (dir, s) = spec.trim().split_once('=').ok_or_else(bad)?;
    let direction = match dir.trim() {
        "x" => HyperplaneDirection::X,
        "y" => HyperplaneDirection::Y,
        "diag-up" => HyperplaneDirection::DiagUp,
        "diag-down" => HyperplaneDirection::DiagDown,
        _ => return Err(bad()),
    };
    let s: f64 = s.trim().parse().map_err(|_| bad())?;
    LatticeHyperplane::new(direction, s)
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::usage)
}

pub fn load(path: &Path, engine: Option<EngineKind>) -> Result<Function, Failure> {
    let text = read(path)?;
    Function::parse(&text, engine).map_err(|f| Failure {
        code: f.code,
        error: f.error.context(format!("in {}", path.display())),
    })
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let result = match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to stdout"),
    };
    result.map_err(|e| Failure::with_code(1, e))
}
