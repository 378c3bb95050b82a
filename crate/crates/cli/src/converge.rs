use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use rearrange_lab::analysis::{
    converge_scheme, ConvergenceSeries, InvariantViolation, SeriesRecord,
};
use rearrange_lab::grid2d::mixed_schedule_ordered;
use rearrange_lab::io::write_series;
use rearrange_lab::lattice::{schedule_scheme_lattice_ordered, spiral_enumeration};
use rearrange_lab::{
    GridFunction, HyperplaneDirection, LatticeFunction, LatticeHyperplane, LatticeInvolution,
    MixedStep, Schedule, ScheduleKind, SchemeParams, SteinerAxis, StepFunction,
};

use crate::engine::{self, parse_lattice_hyperplane, Failure, Function};
use crate::options::{parse_p, parse_positive, EngineKind, Order, WeightSpec};

const TOLERANCE: f64 = 1e-12;

#[derive(Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineKind>,
    #[arg(long, default_value_t = 1.0, value_parser = parse_p)]
    p: f64,
    /// Offsets of the schedule lie in `(0, rho]`.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    rho: f64,
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    eps: f64,
    #[arg(long, default_value_t = WeightSpec::default())]
    weight: WeightSpec,
    #[arg(long, value_enum, default_value_t = Order::Forward)]
    order: Order,
    /// Lattice files: reflections about the spiral enumeration of centers, or
    /// sweeps of two involutions until a fixed point.
    #[arg(long, value_enum, default_value_t = LatticeScheme::Spiral)]
    lattice_scheme: LatticeScheme,
    /// First involution of each two-involution sweep; the second is `x ↦ 1 - x`.
    #[arg(long, value_enum, default_value_t = FirstInvolution::Reflect)]
    first_involution: FirstInvolution,
    /// Grid files: one step of the cycle, e.g. `x=0`, `diag-up=1`, `steiner-x`.
    /// Repeat to build the cycle.
    #[arg(long = "step", allow_hyphen_values = true)]
    steps: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeScheme {
    Spiral,
    TwoInvolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FirstInvolution {
    /// `x ↦ -x`
    Reflect,
    /// `x ↦ x`
    Identity,
}

pub fn run(args: &ConvergeArgs) -> Result<ExitCode, Failure> {
    let (series, problems) = match engine::load(&args.input, args.engine)? {
        Function::Step(u) => converge_step(&u, args)?,
        Function::Lattice(u) => match args.lattice_scheme {
            LatticeScheme::Spiral => converge_lattice_spiral(&u, args)?,
            LatticeScheme::TwoInvolution => converge_lattice_sweeps(&u, args)?,
        },
        Function::Grid(u) => converge_grid(&u, args)?,
    };
    engine::emit(args.output.as_deref(), &write_series(&series))?;
    if problems.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for p in &problems {
            eprintln!("invariant violated: {p}");
        }
        Err(Failure::with_code(
            4,
            anyhow!("{} invariant violation(s) during the run", problems.len()),
        ))
    }
}

fn converge_step(
    u: &StepFunction,
    args: &ConvergeArgs,
) -> Result<(ConvergenceSeries, Vec<String>), Failure> {
    let schedule = Schedule::new(1, args.rho, ScheduleKind::RestrictedDyadic)?;
    let params = SchemeParams {
        n_max: args.n_max as usize,
        p: args.p,
        weight: args.weight.0,
        eps: args.eps,
        order: args.order.into(),
        tolerance: TOLERANCE,
    };
    let series = converge_scheme(u, &schedule, &params)?;
    let problems = series
        .violations
        .iter()
        .map(|v| match *v {
            InvariantViolation::NormDrift {
                n,
                initial,
                current,
            } => {
                format!("norm moved from {initial} to {current} at n = {n}")
            }
            InvariantViolation::MassDecrease {
                n,
                step,
                before,
                after,
            } => {
                format!("weighted mass fell from {before} to {after} at n = {n}, step {step}")
            }
        })
        .collect();
    Ok((series, problems))
}

/// Rows whose weighted mass drops by more than the tolerance.
fn mass_drops(series: &ConvergenceSeries) -> Vec<String> {
    series
        .records
        .windows(2)
        .filter(|w| w[1].weighted_mass < w[0].weighted_mass - TOLERANCE)
        .map(|w| {
            format!(
                "weighted mass fell from {} to {} at n = {}",
                w[0].weighted_mass, w[1].weighted_mass, w[1].n
            )
        })
        .collect()
}

fn converge_lattice_spiral(
    u: &LatticeFunction,
    args: &ConvergeArgs,
) -> Result<(ConvergenceSeries, Vec<String>), Failure> {
    let n_max = args.n_max as usize;
    let centers = spiral_enumeration(n_max);
    let series =
        schedule_scheme_lattice_ordered(u, &centers, n_max, args.p, args.eps, args.order.into())?;
    let problems = mass_drops(&series);
    Ok((series, problems))
}

fn lattice_record(
    n: usize,
    f: &LatticeFunction,
    target: &LatticeFunction,
    p: f64,
    eps: f64,
) -> SeriesRecord {
    SeriesRecord {
        n,
        lp_error: f.lp_distance_pow(target, p).powf(1.0 / p),
        weighted_mass: f.rank_weighted_mass(),
        sup_error: f.sup_distance(target),
        deviation_measure: f.deviation_count(target, eps) as f64,
    }
}

/// One row per sweep; stops after the first sweep that changes nothing.
fn converge_lattice_sweeps(
    u: &LatticeFunction,
    args: &ConvergeArgs,
) -> Result<(ConvergenceSeries, Vec<String>), Failure> {
    let first = match args.first_involution {
        FirstInvolution::Reflect => LatticeInvolution::Reflection(0),
        FirstInvolution::Identity => LatticeInvolution::Identity,
    };
    let second = LatticeInvolution::Reflection(1);
    let target = u.rearrange();
    let values = u.sorted_values();
    let mut series = ConvergenceSeries::default();
    let mut problems = Vec::new();
    let mut current = u.clone();
    series
        .records
        .push(lattice_record(0, &current, &target, args.p, args.eps));
    for n in 1..=args.n_max as usize {
        let next = current.polarize(first).polarize(second);
        series.polarizations += 2;
        if next.sorted_values() != values {
            problems.push(format!("value multiset changed in sweep {n}"));
        }
        let unchanged = next == current;
        current = next;
        series
            .records
            .push(lattice_record(n, &current, &target, args.p, args.eps));
        if unchanged {
            break;
        }
    }
    problems.extend(mass_drops(&series));
    Ok((series, problems))
}

fn parse_step(spec: &str) -> Result<MixedStep, Failure> {
    match spec.trim() {
        "steiner-x" => Ok(MixedStep::Steiner(SteinerAxis::X)),
        "steiner-y" => Ok(MixedStep::Steiner(SteinerAxis::Y)),
        other => Ok(MixedStep::Polarize(parse_lattice_hyperplane(other)?)),
    }
}

fn default_grid_steps() -> Vec<MixedStep> {
    use HyperplaneDirection::*;
    let plane = |d, s| MixedStep::Polarize(LatticeHyperplane::new(d, s).expect("valid offset"));
    vec![
        plane(X, 0.0),
        plane(Y, 0.0),
        plane(DiagUp, 0.0),
        plane(DiagDown, 0.0),
        MixedStep::Steiner(SteinerAxis::X),
        MixedStep::Steiner(SteinerAxis::Y),
    ]
}

fn converge_grid(
    u: &GridFunction,
    args: &ConvergeArgs,
) -> Result<(ConvergenceSeries, Vec<String>), Failure> {
    let steps: Vec<MixedStep> = if args.steps.is_empty() {
        default_grid_steps()
    } else {
        args.steps
            .iter()
            .map(|s| parse_step(s))
            .collect::<Result<_, _>>()?
    };
    let series = mixed_schedule_ordered(
        u,
        &steps,
        args.n_max as usize,
        args.p,
        args.eps,
        args.order.into(),
    )?;
    // a step whose halfspace excludes the origin can lower the Gaussian mass
    let problems = mass_drops(&series);
    Ok((series, problems))
}
