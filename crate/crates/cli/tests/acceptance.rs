//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use decoherence_cli::csv::read_drive_csv;
use decoherence_cli::verify::{algebra_suite, oracle_check, transform_check, InstanceDeviation};
use decoherence_cli::{run_drive, RunConfig};
use decoherence_core::coherence::{evolve, CoherenceState, DriveSource, IntegratorConfig};
use decoherence_core::drive::{
    cyclic_extend, drive_roots, synthesize_profile, uniform_grid, BranchPolicy, RootKind, DEFAULT_EPS_BETA,
};
use decoherence_core::model::{derived_rates, ModelParams};
use decoherence_core::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fig_params(delta_over_omega0: f64, k: u32) -> ModelParams {
    ModelParams::new(1.0e11, delta_over_omega0 * 1.0e11, k, 100, 1.0, 1.0).unwrap()
}

fn fig_grid() -> Vec<f64> {
    uniform_grid(2.0 * PI / (200.0 * 1.0e11), 3.0e-10).unwrap()
}

fn within(elapsed: Duration, limit: u64) -> bool {
    elapsed <= Duration::from_secs(limit)
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let rows = algebra_suite().unwrap();
    let elapsed = start.elapsed();
    let worst = rows.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).unwrap();
    let over = rows.iter().filter(|r| r.residual >= 1e-12).count();
    outcome(
        over == 0 && within(elapsed, 5),
        format!(
            "max residual {:.3e} ({}, k={} m={}, relative {:.2e}); {} of 12 relations at or above 1e-12; {:.2?}",
            worst.residual,
            worst.relation,
            worst.worst.0,
            worst.worst.1,
            worst.relative,
            over,
            elapsed
        ),
    )
}

fn interaction_picture() -> Outcome {
    let start = Instant::now();
    let worst = transform_check().unwrap();
    let elapsed = start.elapsed();
    outcome(worst <= 1e-10 && within(elapsed, 5), format!("max entrywise difference {worst:.3e}; {elapsed:.2?}"))
}

fn markoff_oracle() -> Outcome {
    let start = Instant::now();
    let levels = [128, 256, 512];
    let devs: Vec<Vec<InstanceDeviation>> = levels.iter().map(|&p| oracle_check(p).unwrap()).collect();
    let elapsed = start.elapsed();
    let at = |i: usize| devs[i].iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let decreasing = (0..devs[0].len()).all(|j| devs[1][j].1 <= devs[0][j].1 && devs[2][j].1 <= devs[1][j].1);
    let finest = at(2);
    let per: Vec<String> = devs[2].iter().map(|((k, m), d)| format!("k={k} m={m}: {d:.3e}")).collect();
    outcome(
        finest <= 1e-6 && decreasing && within(elapsed, 60),
        format!(
            "max relative deviation at 512 panels {finest:.3e} [{}]; 128/256/512: {:.3e}/{:.3e}/{:.3e}; decreasing: {decreasing}; {elapsed:.2?}",
            per.join(", "),
            at(0),
            at(1),
            finest
        ),
    )
}

fn determinant_closure() -> Outcome {
    let grid = fig_grid();
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for delta in [0.0, 0.01] {
        for k in 1..=4 {
            let p = fig_params(delta, k);
            let profile = synthesize_profile(&p, &grid, BranchPolicy::default(), DEFAULT_EPS_BETA).unwrap();
            for (s, &gated) in profile.coefficient_samples(&p).unwrap().iter().zip(&profile.gated) {
                if !gated && s.det_scale() > 0.0 {
                    worst = worst.max(s.det.abs() / s.det_scale());
                    checked += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |det|/scale {worst:.3e} over {checked} ungated points (delta 0 and 0.01, k=1..4)"))
}

fn root_feasibility() -> Outcome {
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut series_worst = 0.0f64;
    for k in 1..=3 {
        let p = fig_params(0.0, k);
        let r = derived_rates(&p).unwrap();
        let h = 3.0e-10 / 1.0e5;
        for j in 0..100_000 {
            let t = (j as f64 + 0.5) * h;
            if (p.omega0 * t).sin().abs() < 1e-6 {
                continue;
            }
            let roots = drive_roots(&p, &r, t, DEFAULT_EPS_BETA);
            let nonneg = [roots.x_plus, roots.x_minus].iter().filter(|x| x.is_some_and(|x| x >= 0.0)).count();
            if roots.kind != RootKind::Real || nonneg != 1 {
                violations += 1;
            }
            checked += 1;
        }
        let roots = drive_roots(&p, &r, 1.0e-3 / p.omega0, DEFAULT_EPS_BETA);
        let plus = (2.0 * r.g_sum + 4.0 * r.g_plus) / p.d_sq;
        let minus = 2.0 * p.g_sq * (r.r_minus - r.r_plus) / p.d_sq;
        series_worst = series_worst
            .max((roots.x_plus.unwrap() - plus).abs() / plus.abs())
            .max((roots.x_minus.unwrap() - minus).abs() / minus.abs());
    }
    outcome(
        violations == 0 && series_worst <= 1e-6,
        format!("{violations} violations over {checked} points (k=1..3); small-t series relative error {series_worst:.3e}"),
    )
}

fn closed_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut halving = 0.0f64;
    for (k, m, g_sq) in [(1, 2, 0.01), (2, 3, 0.002), (1, 100, 1.0e-4)] {
        let p = ModelParams::new(1.0, 0.0, k, m, g_sq, 1.0).unwrap();
        let r = derived_rates(&p).unwrap();
        let rho0 = CoherenceState::physical(Complex64::new(0.3, 0.2)).unwrap();
        let grid = uniform_grid(0.1, 10.0).unwrap();
        let traj = match evolve(&p, DriveSource::Zero, rho0, &grid, &IntegratorConfig::default()) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("k={k} m={m}: {e}")),
        };
        halving = halving.max(traj.halving_deviation.unwrap());
        for (t, s) in grid.iter().zip(&traj.states) {
            let re = 0.3 * ((r.r_plus - r.r_minus) * g_sq * t * t / 2.0).exp();
            let im = 0.2 * (-(3.0 * r.r_plus + r.r_minus) * g_sq * t * t / 2.0).exp();
            worst = worst.max((s.rho_mp.re - re).abs() / re).max((s.rho_mp.im - im).abs() / im);
        }
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.3e}; step-halving deviation {halving:.3e}"))
}

fn null_mode() -> Outcome {
    // First ungated interval (0, π/ω₀) at zero detuning, with a coupling
    // strong enough that the non-null mode moves appreciably.
    let p = ModelParams::new(1.0e11, 0.0, 1, 100, 5.0e18, 1.0).unwrap();
    let grid = uniform_grid(2.0 * PI / (200.0 * p.omega0), 0.95 * PI / p.omega0).unwrap();
    let source = DriveSource::Synthesized { policy: BranchPolicy::default(), eps_beta: DEFAULT_EPS_BETA };
    let rho0 = CoherenceState::physical(Complex64::new(0.3, 0.2)).unwrap();
    let traj = match evolve(&p, source, rho0, &grid, &IntegratorConfig::default()) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let reference = traj.modes[1];
    let mut null_change = 0.0f64;
    let mut other_change = 0.0f64;
    let mut det_worst = 0.0f64;
    for (m, s) in traj.modes.iter().zip(&traj.samples).skip(1) {
        null_change = null_change.max((m.null - reference.null).norm() / reference.null.norm());
        other_change = other_change.max((m.other - reference.other).norm() / reference.other.norm());
        det_worst = det_worst.max(s.det.abs() / s.det_scale());
    }
    outcome(
        null_change < 1e-3 && det_worst <= 1e-10,
        format!(
            "null-mode relative change {null_change:.3e}; other mode {other_change:.3e}; max |det|/scale {det_worst:.3e}; over {} points",
            grid.len() - 1
        ),
    )
}

fn cyclic() -> Outcome {
    let p = fig_params(0.01, 1);
    let grid = fig_grid();
    let profile = synthesize_profile(&p, &grid, BranchPolicy::default(), DEFAULT_EPS_BETA).unwrap().with_period(grid[1]);
    let Some(period) = profile.period_t else {
        return outcome(false, "no period detected");
    };
    let ext = cyclic_extend(&profile, 4.0 * period).unwrap();
    let base = profile.grid.partition_point(|&t| t < period);
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for n in 1..=3usize {
        for i in 0..base {
            let Some(j) = ext.grid.iter().position(|&t| t.to_bits() == (period * n as f64 + profile.grid[i]).to_bits()) else {
                continue;
            };
            compared += 1;
            let same = ext.e_amplitude[j].to_bits() == profile.e_amplitude[i].to_bits()
                && ext.x_chosen[j].to_bits() == profile.x_chosen[i].to_bits();
            if !same {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && compared > 3 * (base - 1),
        format!("T = {period:e} s; {compared} shifted samples compared for n=1..3, {mismatches} mismatches"),
    )
}

fn figures() -> Outcome {
    let mut problems = Vec::new();
    let fig1 = RunConfig::parse("sweep_k = 1, 2, 3, 4\n").unwrap();
    let mut spikes = 0;
    for (k, csv, _) in run_drive(&fig1).unwrap() {
        let profile = read_drive_csv(&csv).unwrap();
        if profile.period_t.is_some() {
            problems.push(format!("delta=0 k={k}: period detected"));
        }
        for i in 0..profile.len() {
            let near_node = (1.0e11 * profile.grid[i]).sin().abs() < 1e-6;
            if profile.gated[i] {
                spikes += 1;
                if !near_node {
                    problems.push(format!("delta=0 k={k}: gated away from a node at t={:e}", profile.grid[i]));
                }
            }
        }
    }
    let fig2 = RunConfig::parse("delta_over_omega0 = 0.01\n").unwrap();
    let (_, csv, summary) = run_drive(&fig2).unwrap().remove(0);
    let profile = read_drive_csv(&csv).unwrap();
    let window = profile.gated.windows(2).filter(|w| w[0] && w[1]).count();
    let ungated_after = profile
        .period_t
        .map(|t| profile.grid.iter().zip(&profile.gated).any(|(&g, &gated)| g > t && !gated))
        .unwrap_or(false);
    match summary.period_t {
        None => problems.push("delta=0.01: no period".into()),
        Some(_) if window == 0 => problems.push("delta=0.01: no finite gated window".into()),
        Some(_) if !ungated_after => problems.push("delta=0.01: gated window never closes".into()),
        Some(_) => {}
    }
    outcome(
        problems.is_empty(),
        format!(
            "delta=0: {spikes} gated points, all at nodes; delta=0.01: T = {} s, gated fraction {:.3}; {}",
            summary.period_t.map_or("none".into(), |t| format!("{t:.4e}")),
            summary.gated_fraction,
            if problems.is_empty() { "ok".into() } else { problems.join("; ") }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 operator algebra residuals", algebra),
        ("2 interaction-picture consistency", interaction_picture),
        ("3 markoff oracle equivalence", markoff_oracle),
        ("4 determinant closure", determinant_closure),
        ("5 zero-detuning root feasibility", root_feasibility),
        ("6 closed-form free evolution", closed_form),
        ("7 null-mode freezing", null_mode),
        ("8 cyclic extension exactness", cyclic),
        ("9 qualitative figure regimes", figures),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
