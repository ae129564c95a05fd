//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Runs without the libtest harness so the lines always print in order.

mod common;

use std::time::{Duration, Instant};
use thermovoid::cli::{verify_decay, RunConfig, DEFAULT_LAMBDAS};
use thermovoid::material::{epsilon_of_lambda, epsilon_residual, optimize_lambda, spectrum, zeta_of_lambda, Material};
use thermovoid::measures::*;
use thermovoid::sampling::Sampler;
use thermovoid::solver::{run, Trajectory};
use thermovoid::suite::{inequality_suite, rayleigh_suite};
use thermovoid::tolerance::TolerancePolicy;

const SEED: u64 = 20_240_601;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: String) -> Verdict {
    Verdict { ok, detail }
}

/// Criteria 5-7 share the pulse run and its measure.
struct Pulse {
    trajectory: Trajectory,
    series: MeasureSeries,
    decay: thermovoid::material::DecayParameters,
    length: f64,
    t0: f64,
    r0: f64,
    elapsed: Duration,
}

fn pulse() -> Pulse {
    let start = Instant::now();
    let sc = common::load_scenario("pulse.toml");
    let sp = spectrum(&sc.material).unwrap();
    let x0 = sc.support.unwrap();
    let geo = SupportGeometry::slab(&sc.grid, x0, 1).unwrap();
    let choice = optimize_lambda(&sp, &sc.material, geo.length, sc.horizon, 0.0, &DEFAULT_LAMBDAS).unwrap();
    let (t0, r0) = choice.window.latest(0.0).unwrap();
    let trajectory = run(&sc).unwrap();
    let series = compute_e(&trajectory, &geo, choice.decay.lambda).unwrap();
    Pulse {
        trajectory,
        series,
        decay: choice.decay,
        length: geo.length,
        t0,
        r0,
        elapsed: start.elapsed(),
    }
}

fn spectral_oracle() -> Verdict {
    let start = Instant::now();
    let checks = rayleigh_suite(SEED, 5, 10_000, 1e-9);
    let violations: usize = checks.iter().map(|c| c.violations).sum();
    // d = 1 closed forms: Q is diagonal, or has one 2×2 coupled block.
    let mut diag = Material::zeroed(1);
    diag.elastic[0][0][0][0] = 2.0;
    diag.gradient_stiffness[0][0] = 3.0;
    diag.void_stiffness = 5.0;
    diag.conductivity[0][0] = 1.0;
    let mut coupled = Material::zeroed(1);
    coupled.elastic[0][0][0][0] = 2.0;
    coupled.void_stiffness = 2.0;
    coupled.strain_void[0][0] = 1.0;
    coupled.gradient_stiffness[0][0] = 1.0;
    coupled.conductivity[0][0] = 1.0;
    let a = spectrum(&diag).unwrap();
    let b = spectrum(&coupled).unwrap();
    let exact = (a.mu_min, a.mu_max) == (2.0, 5.0) && (b.mu_min, b.mu_max) == (1.0, 3.0);
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && exact && elapsed < Duration::from_secs(5),
        format!(
            "{} quotients, {violations} outside [mu_m-1e-9, mu_M+1e-9]; closed forms ({}, {}) and ({}, {}); {elapsed:.2?}",
            checks.iter().map(|c| c.samples).sum::<usize>(),
            a.mu_min,
            a.mu_max,
            b.mu_min,
            b.mu_max
        ),
    )
}

fn inequality_suite_check() -> Verdict {
    let start = Instant::now();
    let checks = inequality_suite(SEED, 10_000, 1e-10);
    let violations: usize = checks.iter().map(|c| c.violations).sum();
    let full = checks.iter().all(|c| c.samples == 10_000);
    let worst = checks.iter().map(|c| c.worst).fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && full && elapsed < Duration::from_secs(10),
        format!("{} checks x 10000 states, {violations} violations, worst relative excess {worst:.3e}; {elapsed:.2?}", checks.len()),
    )
}

fn epsilon_zeta() -> Verdict {
    let start = Instant::now();
    let mut materials = vec![common::coupled_1d(), common::load_scenario("pulse.toml").material];
    let mut s = Sampler::new(SEED);
    materials.extend((0..6).map(|i| s.material(1 + i % 3)));
    let mut worst: f64 = 0.0;
    for m in &materials {
        let sp = spectrum(m).unwrap();
        for k in -2..=6 {
            for mant in [1.0, 2.5, 5.0] {
                let lambda = mant * 10f64.powi(k);
                if lambda > 1e6 {
                    continue;
                }
                worst = worst.max(epsilon_residual(&sp, m, lambda, epsilon_of_lambda(&sp, m, lambda)));
            }
        }
    }
    // a = ρ = μ_M = k_M = θ₀ = 1, M² = 0.
    let mut toy = Material::zeroed(1);
    toy.elastic[0][0][0][0] = 1.0;
    toy.gradient_stiffness[0][0] = 1.0;
    toy.void_stiffness = 1.0;
    toy.conductivity[0][0] = 1.0;
    let sp = spectrum(&toy).unwrap();
    let d4 = zeta_of_lambda(&sp, &toy, 4.0).unwrap();
    let big = zeta_of_lambda(&sp, &toy, 1e6).unwrap();
    let limit = (sp.k_max / (2.0 * toy.reference_temperature * toy.heat_capacity * toy.density)).sqrt();
    let asym = (big.zeta / 1e6f64.sqrt() / limit - 1.0).abs();
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && d4.epsilon == 1.0 && d4.zeta == 2f64.sqrt() && asym < 0.01 && elapsed < Duration::from_secs(1),
        format!(
            "max back-substitution residual {worst:.2e}; toy eps(4) = {}, zeta = {}; zeta/sqrt(lambda) off the limit by {:.3}%; {elapsed:.2?}",
            d4.epsilon,
            d4.zeta,
            100.0 * asym
        ),
    )
}

fn identity_convergence(mms: &mut Vec<Trajectory>) -> Verdict {
    let start = Instant::now();
    let mut residuals = Vec::new();
    for (n, steps) in [(41, 80), (81, 160), (161, 320)] {
        let tr = run(&common::mms_scenario(n, steps, 0.5, 0.05)).unwrap();
        let rep = check_energy_identity(&tr, Region::whole(&tr.scenario.grid), Weight { rate: 1.0, offset: 0.0 }).unwrap();
        residuals.push(rep.relative);
        mms.push(tr);
    }
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let elapsed = start.elapsed();
    verdict(
        ratios.iter().all(|r| (3.5..=4.5).contains(r)) && elapsed < Duration::from_secs(60),
        format!(
            "relative residuals {}, ratios {ratios:.3?}; {elapsed:.2?}",
            residuals.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn diff_inequality(p: &Pulse) -> Verdict {
    let start = Instant::now();
    let rep = check_diff_inequality(&p.series, &p.decay, TolerancePolicy::default().diff_inequality);
    let elapsed = p.elapsed + start.elapsed();
    verdict(
        rep.passed() && elapsed < Duration::from_secs(120),
        format!(
            "lambda = {}, {} samples, {} violations at slack 5e-3*scale, worst margin {:.3e}; {elapsed:.2?}",
            p.decay.lambda,
            rep.samples,
            rep.violations.len(),
            rep.worst_margin
        ),
    )
}

fn decay(p: &Pulse) -> Verdict {
    let start = Instant::now();
    let policy = TolerancePolicy::default();
    let sc = &p.trajectory.scenario;
    let rep = check_decay(&p.series, &p.decay, p.length, sc.horizon, p.t0, p.r0, policy.decay, policy.log_floor).unwrap();
    let floored = rep.samples.iter().filter(|s| s.floored).count();
    let elapsed = p.elapsed + start.elapsed();
    verdict(
        rep.passed() && elapsed < Duration::from_secs(120),
        format!(
            "t0 = {:.4}, r0 = {}, {} samples ({floored} floored), {} violations; slope {:.3} vs -lambda/zeta = {:.3}; {elapsed:.2?}",
            p.t0,
            p.r0,
            rep.samples.len(),
            rep.violations,
            rep.fitted_slope.unwrap_or(f64::NAN),
            rep.predicted_slope
        ),
    )
}

fn monotonicity(p: &Pulse, mms: &[Trajectory]) -> Verdict {
    let rel = TolerancePolicy::default().monotonicity;
    let mut series = vec![("pulse", p.series.clone())];
    for tr in mms {
        let geo = SupportGeometry::slab(&tr.scenario.grid, 0.25, 1).unwrap();
        series.push(("manufactured", compute_e(tr, &geo, 1.0).unwrap()));
    }
    let insulated = run(&common::load_scenario("insulated.toml")).unwrap();
    let geo = SupportGeometry::slab(&insulated.scenario.grid, 0.25, 1).unwrap();
    series.push(("insulated", compute_e(&insulated, &geo, 2.0).unwrap()));
    let mut checked = 0;
    let mut violations = 0;
    for (_, s) in &series {
        let rep = check_monotonicity(s, rel);
        checked += rep.checked;
        violations += rep.violations.len();
    }
    verdict(
        violations == 0,
        format!("{} trajectories, {checked} adjacent pairs, {violations} increases beyond 1e-12*E(0,t)", series.len()),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let cfg = RunConfig {
            scenario: Some(common::scenario_path("pulse.toml")),
            out: Some(dir.path().join(name)),
            ..RunConfig::default()
        };
        let o = verify_decay(&cfg).unwrap();
        let csv = std::fs::read(dir.path().join(name).join("measure.csv")).unwrap();
        let json = std::fs::read(dir.path().join(name).join("summary.json")).unwrap();
        outputs.push((o.outcome.passed, csv, json));
    }
    let same = outputs[0].1 == outputs[1].1 && outputs[0].2 == outputs[1].2;
    verdict(
        same && !outputs[0].1.is_empty(),
        format!(
            "measure.csv {} bytes, summary.json {} bytes, identical: {same}",
            outputs[0].1.len(),
            outputs[0].2.len()
        ),
    )
}

fn main() {
    let p = pulse();
    let mut mms = Vec::new();
    let results = [
        ("spectral oracle", spectral_oracle()),
        ("inequality suite", inequality_suite_check()),
        ("epsilon/zeta", epsilon_zeta()),
        ("energy identity convergence", identity_convergence(&mut mms)),
        ("differential inequality", diff_inequality(&p)),
        ("decay estimate", decay(&p)),
        ("monotonicity", monotonicity(&p, &mms)),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {} {name}: {} ({})", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
