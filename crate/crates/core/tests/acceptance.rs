//! Acceptance gate. Runs every criterion at its stated size and tolerance,
//! prints one line per criterion and exits nonzero if any of them fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rearrange_lab::analysis::{
    cavalieri_gap, contraction_gap, converge_scheme, hardy_littlewood_gap, polarization_gap,
    ConvergenceSeries,
};
use rearrange_lab::halfspace::density_witness;
use rearrange_lab::lattice::two_involution_scheme;
use rearrange_lab::random::{
    grid_function, lattice_function, lattice_hyperplane, line_halfspace, seeded_rng, StepSampler,
};
use rearrange_lab::{
    Halfspace, LatticeFunction, LatticeInvolution, RadialWeight, Schedule, ScheduleKind,
    SchemeParams, Sign, StepFunction,
};

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(message());
        }
    }
}

fn report(id: u32, name: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = run();
    let elapsed = start.elapsed();
    if elapsed > budget {
        out.failures
            .push(format!("runtime {elapsed:.2?} exceeds {budget:?}"));
    }
    let pass = out.failures.is_empty();
    println!(
        "criterion {id} [{name}]: {} ({elapsed:.2?}; {})",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    for f in out.failures.iter().take(10) {
        println!("    {f}");
    }
    if out.failures.len() > 10 {
        println!("    … {} more", out.failures.len() - 10);
    }
    pass
}

fn corpus() -> Vec<StepFunction> {
    let sampler = StepSampler::default();
    (0..50)
        .map(|k| sampler.sample(&mut seeded_rng(1000 + k)))
        .collect()
}

fn run_corpus(rho: f64, n_max: usize) -> Vec<(StepFunction, ConvergenceSeries)> {
    let schedule = Schedule::new(1, rho, ScheduleKind::RestrictedDyadic).unwrap();
    let params = SchemeParams {
        n_max,
        ..SchemeParams::default()
    };
    corpus()
        .into_iter()
        .map(|u| {
            let series = converge_scheme(&u, &schedule, &params).unwrap();
            (u, series)
        })
        .collect()
}

/// Final relative error bound plus the norm and weighted-mass invariants.
fn check_runs(runs: &[(StepFunction, ConvergenceSeries)], relative: f64, out: &mut Outcome) {
    let mut worst: f64 = 0.0;
    for (k, (u, series)) in runs.iter().enumerate() {
        let norm = u.lp_norm(1.0).unwrap();
        let last = series.last().unwrap();
        worst = worst.max(last.lp_error / norm);
        out.check(last.lp_error < relative * norm, || {
            format!("case {k}: final error {} vs |u|_1 = {norm}", last.lp_error)
        });
        out.check(series.is_clean(), || {
            format!("case {k}: invariant violations {:?}", series.violations)
        });
        for w in series.records.windows(2) {
            out.check(w[1].weighted_mass >= w[0].weighted_mass - 1e-12, || {
                format!("case {k}: weighted mass fell at n = {}", w[1].n)
            });
        }
    }
    out.detail = format!("{} runs, worst relative error {worst:.3e}", runs.len());
}

fn criterion_1(runs: &[(StepFunction, ConvergenceSeries)]) -> Outcome {
    let mut out = Outcome::new();
    check_runs(runs, 1e-3, &mut out);
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let runs = run_corpus(0.1, 200);
    check_runs(&runs, 1e-2, &mut out);
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let (r0, r1) = (
        LatticeInvolution::Reflection(0),
        LatticeInvolution::Reflection(1),
    );
    let mut max_sweeps = 0;
    for k in 0..1000u64 {
        let u = lattice_function(&mut seeded_rng(3000 + k), 50, 9, 200);
        let values = u.sorted_values();
        let mut current = u.clone();
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let half = current.polarize(r0);
            let next = half.polarize(r1);
            out.check(
                half.sorted_values() == values && next.sorted_values() == values,
                || format!("case {k}: value multiset changed in sweep {sweeps}"),
            );
            if next == current || sweeps >= 10_000 {
                break;
            }
            current = next;
        }
        max_sweeps = max_sweeps.max(sweeps);
        out.check(current == u.rearrange(), || {
            format!("case {k}: fixed point is not the rearrangement")
        });
        match two_involution_scheme(&u, 10_000) {
            Ok(o) => out.check(o.fixed_point == current && o.sweeps == sweeps, || {
                format!("case {k}: library scheme disagrees with the stepwise run")
            }),
            Err(e) => out.check(false, || format!("case {k}: {e}")),
        }
    }
    out.detail = format!("1000 cases, at most {max_sweeps} sweeps");
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let sampler = StepSampler::default();
    let mut equality_cases = 0;
    for k in 0..1000u64 {
        let mut rng = seeded_rng(4000 + k);
        let u = sampler.sample(&mut rng);
        let v = sampler.sample(&mut rng);
        for p in [1.0, 2.0, 3.0] {
            let gap = cavalieri_gap(&u, p).unwrap();
            out.check(gap < 1e-12, || {
                format!("case {k}: cavalieri gap {gap:e} at p = {p}")
            });
            let gap = contraction_gap(&u, &v, p).unwrap();
            out.check(gap >= -1e-12, || {
                format!("case {k}: contraction gap {gap:e} at p = {p}")
            });
        }
        let gap = hardy_littlewood_gap(&u, &v);
        out.check(gap >= -1e-12, || {
            format!("case {k}: hardy-littlewood gap {gap:e}")
        });

        let h = line_halfspace(&mut rng, 0.0, 1.0);
        for w in [RadialWeight::Gaussian, RadialWeight::default()] {
            let gap = polarization_gap(&u, &h, &w).unwrap();
            out.check(gap >= -1e-12, || {
                format!("case {k}: polarization gap {gap:e} ({w:?}, {h})")
            });
        }
        let gap = polarization_gap(&u, &h, &RadialWeight::Gaussian).unwrap();
        if gap < 1e-12 && h.offset() > 0.0 {
            equality_cases += 1;
            let moved = u.lp_distance(&u.polarize(&h).unwrap(), 1.0).unwrap();
            out.check(moved < 1e-9, || {
                format!(
                    "case {k}: Gaussian gap {gap:e} but |u - u^H|_1 = {moved} ({h}, support {:?})",
                    u.support_hull()
                )
            });
        }
    }
    out.detail = format!("1000 cases, {equality_cases} near-equality polarizations");
    out
}

/// Spiral precedence written out independently of the library.
fn spiral_key(x: i64) -> (i64, bool) {
    (x.abs(), x < 0)
}

fn brute_rearrange(u: &BTreeMap<i64, u32>) -> BTreeMap<i64, u32> {
    let mut values: Vec<u32> = u.values().copied().filter(|&v| v > 0).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    let mut sites: Vec<i64> = (-20..=20).collect();
    sites.sort_by_key(|&x| spiral_key(x));
    sites.into_iter().zip(values).collect()
}

fn brute_polarize(u: &BTreeMap<i64, u32>, c: i64) -> BTreeMap<i64, u32> {
    let get = |x: i64| u.get(&x).copied().unwrap_or(0);
    let mut out = BTreeMap::new();
    for x in -30..=30 {
        let y = c - x;
        let v = if x == y {
            get(x)
        } else if spiral_key(x) < spiral_key(y) {
            get(x).max(get(y))
        } else {
            get(x).min(get(y))
        };
        if v > 0 {
            out.insert(x, v);
        }
    }
    out
}

fn to_lattice(u: &BTreeMap<i64, u32>) -> LatticeFunction {
    LatticeFunction::new(u.iter().map(|(&x, &v)| (x, v as f64))).unwrap()
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let sampler = StepSampler::default();
    let mut points = 0usize;
    for k in 0..100u64 {
        let mut rng = seeded_rng(5000 + k);
        let u = sampler.sample(&mut rng);
        let h = line_halfspace(&mut rng, -2.0, 2.0);
        let uh = u.polarize(&h).unwrap();
        let us = u.rearrange();
        let near_break =
            |x: f64, f: &StepFunction| f.breakpoints().iter().any(|&b| (x - b).abs() < 1e-9);
        // superlevel measures from the raw pieces
        let pieces: Vec<(f64, f64, f64)> = u.pieces().collect();
        let measure_ge = |level: f64| -> f64 {
            pieces
                .iter()
                .filter(|p| p.2 >= level)
                .map(|p| p.1 - p.0)
                .sum()
        };
        let mut levels: Vec<f64> = pieces.iter().map(|p| p.2).filter(|&v| v > 0.0).collect();
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-10.0..10.0);
            let sx = h.reflect_scalar(x);
            if !(near_break(x, &u) || near_break(sx, &u) || near_break(x, &uh)) {
                let (a, b) = (u.evaluate(x), u.evaluate(sx));
                let expected = if h.contains(&[x]) { a.max(b) } else { a.min(b) };
                out.check(uh.evaluate(x) == expected, || {
                    format!("case {k}: polarization differs at x = {x}")
                });
                points += 1;
            }
            if !near_break(x, &us) {
                let expected = levels
                    .iter()
                    .copied()
                    .find(|&l| measure_ge(l) / 2.0 > x.abs())
                    .unwrap_or(0.0);
                let mut rearranged = 0.0;
                for &l in &levels {
                    if measure_ge(l) / 2.0 > x.abs() {
                        rearranged = l;
                        break;
                    }
                }
                out.check(expected == rearranged && us.evaluate(x) == expected, || {
                    format!("case {k}: rearrangement differs at x = {x}")
                });
            }
        }
    }

    // exhaustive lattice cases: fixed site sets, every assignment over {1, 2, 3, 4}
    let site_sets: Vec<Vec<i64>> = vec![
        vec![],
        vec![3],
        vec![-1, 2],
        vec![-4, 0, 5],
        vec![-2, -1, 1, 6],
        vec![-3, 0, 1, 2, 4],
        vec![-5, -2, -1, 0, 3, 7],
        vec![-6, -3, -1, 1, 2, 4, 8],
        vec![-4, -3, -2, -1, 0, 1, 2, 3],
        vec![-7, -5, -2, 1, 3, 6, 9, 10],
    ];
    let mut assignments = 0usize;
    for sites in &site_sets {
        let n = sites.len();
        for code in 0..4usize.pow(n as u32) {
            let mut u = BTreeMap::new();
            let mut c = code;
            for &x in sites {
                u.insert(x, (c % 4) as u32 + 1);
                c /= 4;
            }
            assignments += 1;
            let lu = to_lattice(&u);
            out.check(lu.rearrange() == to_lattice(&brute_rearrange(&u)), || {
                format!("lattice rearrangement differs for {u:?}")
            });
            for center in -3..=3 {
                out.check(
                    lu.polarize(LatticeInvolution::Reflection(center))
                        == to_lattice(&brute_polarize(&u, center)),
                    || format!("lattice polarization differs for {u:?}, c = {center}"),
                );
            }
        }
    }
    out.detail = format!("{points} step1d polarization samples, {assignments} lattice assignments");
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut origin_cases = 0;
    for k in 0..1000u64 {
        let mut rng = seeded_rng(6000 + k);
        let h = [0.25, 0.5, 1.0][k as usize % 3];
        let u = grid_function(&mut rng, 8, 4, h);
        let plane = lattice_hyperplane(&mut rng, 2);
        let exact = match u.polarize_exact(&plane) {
            Ok(g) => g,
            Err(e) => {
                out.check(false, || format!("case {k}: {e}"));
                continue;
            }
        };
        let before = u.sorted_values();
        let after = exact.sorted_values();
        out.check(
            before
                .iter()
                .zip(&after)
                .all(|(a, b)| a.to_bits() == b.to_bits()),
            || format!("case {k}: value multiset changed"),
        );
        if plane.contains_origin() {
            origin_cases += 1;
            let (m0, m1) = (u.gaussian_weighted_mass(), exact.gaussian_weighted_mass());
            out.check(m1 >= m0, || {
                format!("case {k}: Gaussian mass {m0} -> {m1} ({plane:?})")
            });
        }
        let interp = u.polarize_interp(&plane.to_halfspace(h)).unwrap();
        let diff = interp
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.check(diff == 0.0, || {
            format!("case {k}: interp differs from exact by {diff} ({plane:?}, h = {h})")
        });
    }
    out.detail = format!("1000 cases, {origin_cases} with the origin in H");
    out
}

fn criterion_7(runs: &[(StepFunction, ConvergenceSeries)]) -> Outcome {
    let mut out = Outcome::new();
    let mut reached_zero = 0;
    for (k, (_, series)) in runs.iter().enumerate() {
        let zero_at_end = series.last().unwrap().deviation_measure == 0.0;
        let chebyshev = series
            .records
            .iter()
            .all(|r| r.deviation_measure <= r.lp_error / 0.01);
        reached_zero += zero_at_end as usize;
        out.check(zero_at_end || chebyshev, || {
            format!("case {k}: deviation measure not controlled")
        });
    }
    out.detail = format!(
        "{} runs, {reached_zero} with zero final deviation",
        runs.len()
    );
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let line = Schedule::new(1, 1.0, ScheduleKind::FullDyadic).unwrap();
    let plane = Schedule::new(2, 1.0, ScheduleKind::FullDyadic).unwrap();
    let (mut worst_1, mut worst_2) = (0, 0);
    for k in 0..100u64 {
        let mut rng = seeded_rng(8000 + k);
        let d: f64 = rng.gen_range(0.0..=1.0);
        let sign = if rng.gen_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let target = Halfspace::on_line(sign, d);
        match density_witness(&line, &target, 0.05, 50_000) {
            Some(n) => worst_1 = worst_1.max(n),
            None => out.check(false, || format!("case {k}: no 1-D witness for {target}")),
        }
        let angle: f64 = rng.gen_range(-PI..PI);
        let d: f64 = rng.gen_range(0.0..=1.0);
        let target = Halfspace::in_plane(angle, d);
        match density_witness(&plane, &target, 0.05, 50_000) {
            Some(n) => worst_2 = worst_2.max(n),
            None => out.check(false, || format!("case {k}: no 2-D witness for {target}")),
        }
    }
    out.detail = format!("largest witness index {worst_1} (1-D), {worst_2} (2-D)");
    out
}

fn main() -> ExitCode {
    let mut all = true;
    let mut runs = Vec::new();
    all &= report(
        1,
        "dyadic convergence, rho = 1",
        Duration::from_secs(10),
        || {
            runs = run_corpus(1.0, 60);
            criterion_1(&runs)
        },
    );
    all &= report(
        2,
        "restricted convergence, rho = 0.1",
        Duration::from_secs(30),
        criterion_2,
    );
    all &= report(
        3,
        "lattice two-involution exactness",
        Duration::from_secs(5),
        criterion_3,
    );
    all &= report(4, "inequality suite", Duration::from_secs(10), criterion_4);
    all &= report(5, "oracle equivalence", Duration::MAX, criterion_5);
    all &= report(6, "grid engine", Duration::MAX, criterion_6);
    all &= report(7, "convergence in measure", Duration::MAX, || {
        criterion_7(&runs)
    });
    all &= report(8, "schedule density", Duration::MAX, criterion_8);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
