//! Randomized property suites. Case `k` of a run with seed `s` draws its input
//! from the generator seeded with `s + k`, so results do not depend on how
//! cases are spread over worker threads.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use rearrange_lab::analysis::{
    cavalieri_gap, contraction_gap, hardy_littlewood_gap, polarization_gap,
};
use rearrange_lab::io::{write_lattice, write_step};
use rearrange_lab::lattice::two_involution_scheme;
use rearrange_lab::random::{lattice_function, line_halfspace, seeded_rng, StepSampler};
use rearrange_lab::{Halfspace, LatticeFunction, RadialWeight, StepFunction};

use crate::engine::{self, Failure, Function};
use crate::options::WeightSpec;

const SLACK: f64 = 1e-12;

#[derive(Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    cases: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight for the polarization suite.
    #[arg(long, default_value_t = WeightSpec::default())]
    weight: WeightSpec,
    /// Extra fixture checked before the random cases.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory receiving one file per counterexample input.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cavalieri,
    HardyLittlewood,
    Contraction,
    Polarization,
    LatticeFixedPoint,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Cavalieri => "cavalieri",
            Suite::HardyLittlewood => "hardy-littlewood",
            Suite::Contraction => "contraction",
            Suite::Polarization => "polarization",
            Suite::LatticeFixedPoint => "lattice-fixed-point",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Cavalieri,
                Suite::HardyLittlewood,
                Suite::Contraction,
                Suite::Polarization,
                Suite::LatticeFixedPoint,
            ],
            s => vec![s],
        }
    }
}

/// Input of one case, kept so that failures can be dumped.
#[derive(Debug, Clone)]
enum CaseInput {
    Single(StepFunction),
    Pair(StepFunction, StepFunction),
    WithHalfspace(StepFunction, Halfspace),
    Lattice(LatticeFunction),
}

impl CaseInput {
    fn files(&self) -> Vec<(&'static str, String)> {
        match self {
            CaseInput::Single(u) => vec![("u.csv", write_step(u))],
            CaseInput::Pair(u, v) => vec![("u.csv", write_step(u)), ("v.csv", write_step(v))],
            CaseInput::WithHalfspace(u, h) => {
                vec![
                    ("u.csv", write_step(u)),
                    ("halfspace.txt", format!("{h}\n")),
                ]
            }
            CaseInput::Lattice(u) => vec![("u.csv", write_lattice(u))],
        }
    }
}

#[derive(Debug)]
struct Counterexample {
    label: String,
    reason: String,
    input: CaseInput,
}

fn sample_case(suite: Suite, seed: u64) -> CaseInput {
    let mut rng = seeded_rng(seed);
    let sampler = StepSampler::default();
    match suite {
        Suite::Cavalieri => CaseInput::Single(sampler.sample(&mut rng)),
        Suite::HardyLittlewood | Suite::Contraction => {
            let u = sampler.sample(&mut rng);
            CaseInput::Pair(u, sampler.sample(&mut rng))
        }
        Suite::Polarization => {
            let u = sampler.sample(&mut rng);
            let h = line_halfspace(&mut rng, 0.0, 1.0);
            CaseInput::WithHalfspace(u, h)
        }
        Suite::LatticeFixedPoint => {
            let support = rng.gen_range(0..=50);
            CaseInput::Lattice(lattice_function(&mut rng, support, 9, 100))
        }
        Suite::All => unreachable!("expanded before sampling"),
    }
}

/// `Err(reason)` when the case violates the suite's property.
fn check_case(suite: Suite, input: &CaseInput, weight: &RadialWeight) -> Result<(), String> {
    let err = |e: rearrange_lab::Error| e.to_string();
    match (suite, input) {
        (Suite::Cavalieri, CaseInput::Single(u)) => {
            for p in [1.0, 2.0, 3.0] {
                let gap = cavalieri_gap(u, p).map_err(err)?;
                if !(gap < SLACK) {
                    return Err(format!("cavalieri gap {gap:e} at p = {p}"));
                }
            }
            Ok(())
        }
        (Suite::HardyLittlewood, CaseInput::Pair(u, v)) => {
            let gap = hardy_littlewood_gap(u, v);
            if gap >= -SLACK {
                Ok(())
            } else {
                Err(format!("hardy-littlewood gap {gap:e}"))
            }
        }
        (Suite::Contraction, CaseInput::Pair(u, v)) => {
            for p in [1.0, 2.0, 3.0] {
                let gap = contraction_gap(u, v, p).map_err(err)?;
                if !(gap >= -SLACK) {
                    return Err(format!("contraction gap {gap:e} at p = {p}"));
                }
            }
            Ok(())
        }
        (Suite::Polarization, CaseInput::WithHalfspace(u, h)) => {
            let gap = polarization_gap(u, h, weight).map_err(err)?;
            if !(gap >= -SLACK) {
                return Err(format!("polarization gap {gap:e}"));
            }
            // equality only when nothing moves
            if gap < SLACK && h.offset() > 0.0 {
                let moved = u
                    .lp_distance(&u.polarize(h).map_err(err)?, 1.0)
                    .map_err(err)?;
                if !(moved < 1e-9) {
                    return Err(format!(
                        "polarization gap {gap:e} but |u - u^H|_1 = {moved}"
                    ));
                }
            }
            Ok(())
        }
        (Suite::LatticeFixedPoint, CaseInput::Lattice(u)) => {
            let out = two_involution_scheme(u, 10_000).map_err(err)?;
            if out.fixed_point != u.rearrange() {
                return Err("fixed point differs from the rearrangement".into());
            }
            if out.fixed_point.sorted_values() != u.sorted_values() {
                return Err("value multiset changed".into());
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Cases derived from a fixture file for the suites that can use it.
fn fixture_cases(suite: Suite, f: &Function) -> Vec<CaseInput> {
    match (suite, f) {
        (Suite::Cavalieri, Function::Step(u)) => vec![CaseInput::Single(u.clone())],
        (Suite::HardyLittlewood | Suite::Contraction, Function::Step(u)) => {
            vec![CaseInput::Pair(u.clone(), u.rearrange())]
        }
        (Suite::Polarization, Function::Step(u)) => [0.0, 0.25, 0.5, 1.0]
            .iter()
            .flat_map(|&d| {
                [rearrange_lab::Sign::Plus, rearrange_lab::Sign::Minus]
                    .map(|s| CaseInput::WithHalfspace(u.clone(), Halfspace::on_line(s, d)))
            })
            .collect(),
        (Suite::LatticeFixedPoint, Function::Lattice(u)) => vec![CaseInput::Lattice(u.clone())],
        _ => Vec::new(),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("REARRANGE_LAB_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                Failure::usage(anyhow!(
                    "REARRANGE_LAB_THREADS must be a positive integer, got `{value}`"
                ))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Failure::with_code(1, anyhow!("cannot start worker threads: {e}")))
}

pub fn run(args: &CheckArgs) -> Result<ExitCode, Failure> {
    let fixture = match &args.input {
        Some(path) => Some(engine::load(path, None)?),
        None => None,
    };
    let pool = thread_pool()?;
    let weight = args.weight.0;

    let mut report = String::new();
    let mut failures: Vec<Counterexample> = Vec::new();
    for suite in args.suite.expand() {
        let mut found: Vec<Counterexample> = Vec::new();
        let mut total = 0u64;
        if let Some(f) = &fixture {
            for (k, input) in fixture_cases(suite, f).into_iter().enumerate() {
                total += 1;
                if let Err(reason) = check_case(suite, &input, &weight) {
                    found.push(Counterexample {
                        label: format!("{}-fixture-{k}", suite.name()),
                        reason,
                        input,
                    });
                }
            }
        }
        let random: Vec<Counterexample> = pool.install(|| {
            (0..args.cases)
                .into_par_iter()
                .filter_map(|k| {
                    let seed = args.seed.wrapping_add(k);
                    let input = sample_case(suite, seed);
                    check_case(suite, &input, &weight)
                        .err()
                        .map(|reason| Counterexample {
                            label: format!("{}-case-{k}-seed-{seed}", suite.name()),
                            reason,
                            input,
                        })
                })
                .collect()
        });
        total += args.cases;
        found.extend(random);
        let _ = writeln!(
            report,
            "{}: {} ({}/{} cases passed)",
            suite.name(),
            if found.is_empty() { "pass" } else { "FAIL" },
            total - found.len() as u64,
            total
        );
        failures.extend(found);
    }

    for c in &failures {
        let _ = writeln!(report, "\ncounterexample {}: {}", c.label, c.reason);
        for (name, text) in c.input.files() {
            let _ = writeln!(report, "--- {name}");
            report.push_str(&text);
        }
    }
    if let Some(dir) = &args.dump_dir {
        dump(dir, &failures).map_err(|e| Failure::with_code(1, e))?;
    }
    engine::emit(args.output.as_deref(), &report)?;
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn dump(dir: &PathBuf, failures: &[Counterexample]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for c in failures {
        for (name, text) in c.input.files() {
            let path = dir.join(format!("{}-{name}", c.label));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}
