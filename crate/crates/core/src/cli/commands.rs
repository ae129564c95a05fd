use super::summary::*;
use super::{CliError, Format, Outcome, RunConfig};
use crate::material::{
    epsilon_residual, feasibility_window, optimize_lambda, spectrum, zeta_of_lambda, DecayError, DecayParameters,
    FeasibilityWindow, Material, MaterialFile, Spectrum,
};
use crate::measures::{
    check_decay, check_diff_inequality, check_energy_identity, check_monotonicity, compute_e, write_series_csv, Float,
    MeasureSeries, Region, SupportGeometry, Weight,
};
use crate::solver::{max_error, run, stability_limits, write_binary, write_csv, Scenario, SolverError, Trajectory};
use crate::suite::{inequality_suite, rayleigh_suite};
use crate::tolerance::TolerancePolicy;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("summaries serialize")
}

fn load_material(cfg: &RunConfig) -> Result<Material, CliError> {
    if let Some(p) = &cfg.material {
        return MaterialFile::load(p).map_err(|e| CliError::invalid("material", e));
    }
    if cfg.scenario.is_some() {
        return Ok(load_scenario(cfg)?.material);
    }
    Err(CliError::invalid("config", "--material or --scenario is required"))
}

fn load_scenario(cfg: &RunConfig) -> Result<Scenario, CliError> {
    let p = cfg
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::invalid("config", "--scenario is required"))?;
    let s = Scenario::load(p).map_err(|e| CliError::invalid("scenario", e))?;
    if let Some(m) = &cfg.material {
        let mut s = s;
        s.material = MaterialFile::load(m).map_err(|e| CliError::invalid("material", e))?;
        return Ok(s);
    }
    Ok(s)
}

fn admissible_spectrum(m: &Material) -> Result<Spectrum, CliError> {
    let report = m.validate();
    if !report.is_ok() {
        let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::invalid("material", format!("inadmissible: {}", v.join("; "))));
    }
    spectrum(m).map_err(|e| CliError::invalid("spectrum", e))
}

fn out_dir(cfg: &RunConfig) -> Result<Option<&Path>, CliError> {
    match &cfg.out {
        None => Ok(None),
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| CliError::invalid("output", format!("{}: {e}", d.display())))?;
            Ok(Some(d.as_path()))
        }
    }
}

fn write_file(path: PathBuf, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let err = |e: std::io::Error| CliError::invalid("output", format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(&path).map_err(err)?);
    body(&mut w).and_then(|_| w.flush()).map_err(err)
}

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::NonFiniteField { .. } => CliError::Failed {
            stage: "simulate",
            message: e.to_string(),
        },
        other => CliError::invalid("simulate", other),
    }
}

/// Runs `f` over `items`, on scoped threads when `parallel` is set. Output
/// order is input order either way.
fn map_maybe_parallel<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if !parallel {
        return items.iter().map(f).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(|| f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn check_material(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg
        .material
        .as_ref()
        .ok_or_else(|| CliError::invalid("config", "--material is required"))?;
    let m = MaterialFile::load(p).map_err(|e| CliError::invalid("material", e))?;
    let report = m.validate();
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    let spectrum = if report.is_ok() { spectrum(&m).ok() } else { None };
    let summary = MaterialSummary {
        admissible: report.is_ok() && spectrum.is_some(),
        dim: m.dim,
        violations: violations.clone(),
        spectrum: spectrum.as_ref().map(SpectrumSummary::from),
    };
    let text = to_json(&summary);
    if let Some(d) = out_dir(cfg)? {
        write_file(d.join("material.json"), |w| writeln!(w, "{text}"))?;
    }
    if !summary.admissible {
        return Err(CliError::invalid("material", format!("inadmissible: {}", violations.join("; "))));
    }
    Ok(Outcome {
        passed: true,
        summary: text,
        warnings: Vec::new(),
    })
}

pub(super) fn spectrum_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = load_material(cfg)?;
    let sp = admissible_spectrum(&m)?;
    let mut rows = Vec::new();
    for lambda in cfg.lambda.values() {
        let d = zeta_of_lambda(&sp, &m, lambda).map_err(|e| CliError::invalid("spectrum", e))?;
        rows.push(DecaySummary::new(&d, epsilon_residual(&sp, &m, lambda, d.epsilon)));
    }
    let text = to_json(&SpectrumTable {
        spectrum: SpectrumSummary::from(&sp),
        rows,
    });
    if let Some(d) = out_dir(cfg)? {
        write_file(d.join("spectrum.json"), |w| writeln!(w, "{text}"))?;
    }
    Ok(Outcome {
        passed: true,
        summary: text,
        warnings: Vec::new(),
    })
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let base = load_scenario(cfg)?;
    let warnings = base.validate().map_err(|e| CliError::invalid("scenario", e))?;
    let levels: Vec<u32> = (0..=cfg.refine).collect();
    let runs = map_maybe_parallel(&levels, cfg.parallel, |&l| -> Result<(Scenario, Trajectory), CliError> {
        let s = base.refined(l).map_err(|e| CliError::invalid("scenario", e))?;
        let t = run(&s).map_err(solver_error)?;
        Ok((s, t))
    });
    let mut summaries: Vec<LevelSummary> = Vec::new();
    let mut trajectories = Vec::new();
    for (l, r) in levels.iter().zip(runs) {
        let (s, t) = r?;
        let budget = stability_limits(&s).map_err(solver_error)?;
        let last = t.frames.last().expect("at least the initial frame");
        let err = s.exact.as_ref().map(|_| max_error(&s, last));
        let ratio = match (summaries.last().and_then(|p| p.max_error), err) {
            (Some(Float(p)), Some(e)) if e > 0.0 => Some(Float(p / e)),
            _ => None,
        };
        summaries.push(LevelSummary {
            level: *l,
            nodes: s.grid.nodes[..s.grid.dim].to_vec(),
            dt: Float(s.dt),
            steps: s.steps(),
            frames: t.frames.len(),
            thermal_growth_factor: Float(budget.growth_factor_thermal),
            energy_initial: Float(t.energy.first().map_or(0.0, |e| e.total())),
            energy_final: Float(t.energy.last().map_or(0.0, |e| e.total())),
            max_error: err.map(Float),
            error_ratio: ratio,
        });
        trajectories.push(t);
    }
    let mut file = None;
    if let Some(d) = out_dir(cfg)? {
        let t = &trajectories[0];
        let stride = t.scenario.output.t_stride;
        let name = match cfg.format {
            Format::Csv => "trajectory.csv",
            Format::Bin => "trajectory.bin",
        };
        write_file(d.join(name), |w| match cfg.format {
            Format::Csv => write_csv(t, stride, w),
            Format::Bin => write_binary(t, stride, w),
        })?;
        file = Some(name.to_string());
    }
    let text = to_json(&SimulateSummary {
        levels: summaries,
        trajectory_file: file,
        warnings: warnings.clone(),
    });
    if let Some(d) = out_dir(cfg)? {
        write_file(d.join("summary.json"), |w| writeln!(w, "{text}"))?;
    }
    Ok(Outcome {
        passed: true,
        summary: text,
        warnings,
    })
}

/// λ, window and (t₀, r₀) for a scenario, before anything is simulated.
struct Plan {
    decay: DecayParameters,
    window: FeasibilityWindow,
    t0: f64,
    r0: f64,
}

fn infeasible(e: DecayError) -> CliError {
    match e {
        DecayError::Infeasible { .. } | DecayError::NoFeasibleLambda => CliError::Infeasible {
            stage: "window",
            message: e.to_string(),
        },
        other => CliError::invalid("window", other),
    }
}

fn plan(cfg: &RunConfig, sp: &Spectrum, m: &Material, length: f64, horizon: f64) -> Result<Plan, CliError> {
    let r0 = cfg.r0.unwrap_or(0.0);
    if !(0.0..=length).contains(&r0) {
        return Err(CliError::invalid("window", format!("r0 = {r0} must lie in [0, {length}]")));
    }
    let grid = cfg.lambda.values();
    let (decay, window) = if grid.len() == 1 {
        let d = zeta_of_lambda(sp, m, grid[0]).map_err(infeasible)?;
        (d, feasibility_window(d.zeta, length, horizon).map_err(infeasible)?)
    } else {
        let c = optimize_lambda(sp, m, length, horizon, r0, &grid).map_err(infeasible)?;
        (c.decay, c.window)
    };
    let t0 = match cfg.t0 {
        Some(t0) if window.contains(t0, r0) => t0,
        Some(t0) => {
            return Err(CliError::Infeasible {
                stage: "window",
                message: format!(
                    "t0 = {t0}, r0 = {r0} violate L <= zeta*t0 + r0 <= zeta*T (L = {length}, zeta = {}, T = {horizon})",
                    decay.zeta
                ),
            })
        }
        None => window
            .latest(r0)
            .ok_or_else(|| CliError::Infeasible {
                stage: "window",
                message: format!("no admissible t0 for r0 = {r0} (zeta = {})", decay.zeta),
            })?
            .0,
    };
    Ok(Plan { decay, window, t0, r0 })
}

fn support(s: &Scenario) -> Result<(f64, f64), CliError> {
    let x0 = s
        .support
        .ok_or_else(|| CliError::invalid("scenario", "verification needs [support] x0"))?;
    Ok((x0, s.grid.extent[0] - x0))
}

pub struct VerifyOutcome {
    pub outcome: Outcome,
    pub summary: VerifySummary,
    pub series: MeasureSeries,
}

pub fn verify_decay(cfg: &RunConfig) -> Result<VerifyOutcome, CliError> {
    let policy = TolerancePolicy::default();
    let s = load_scenario(cfg)?;
    let mut warnings = s.validate().map_err(|e| CliError::invalid("scenario", e))?;
    let sp = admissible_spectrum(&s.material)?;
    let (x0, length) = support(&s)?;
    let p = plan(cfg, &sp, &s.material, length, s.horizon)?;
    let geometry = SupportGeometry::slab(&s.grid, x0, 1).map_err(|e| CliError::invalid("measure", e))?;

    let res = policy.resolution(s.grid.h[0], s.grid.extent[0]);
    if res.limited {
        warnings.push(format!(
            "resolution-limited: h = {} exceeds the reference spacing {}; discretization slack enlarged by {}",
            s.grid.h[0],
            policy.reference_fraction * s.grid.extent[0],
            res.factor
        ));
    }

    let traj = run(&s).map_err(solver_error)?;
    let lambda = p.decay.lambda;
    let region = Region::slab(&s.grid, geometry.r_index[0]);
    let identity = check_energy_identity(&traj, region, Weight { rate: lambda, offset: 0.0 })
        .map_err(|e| CliError::invalid("measure", e))?;
    let series = compute_e(&traj, &geometry, lambda).map_err(|e| CliError::invalid("measure", e))?;

    let id_tol = policy.energy_identity_slack(res);
    let diff_tol = policy.diff_inequality_slack(res);
    let decay_tol = policy.decay_slack(res);
    let diff = check_diff_inequality(&series, &p.decay, diff_tol);
    let decay = check_decay(&series, &p.decay, length, s.horizon, p.t0, p.r0, decay_tol, policy.log_floor).map_err(|e| {
        CliError::Infeasible {
            stage: "window",
            message: e.to_string(),
        }
    })?;
    let mono = check_monotonicity(&series, policy.monotonicity);

    let (t0_min, t0_max) = p.window.t0_range(p.r0).expect("planned window admits t0");
    let identity_ok = identity.relative <= id_tol;
    let passed = identity_ok && diff.passed() && decay.passed() && mono.violations.is_empty();
    let summary = VerifySummary {
        spectrum: SpectrumSummary::from(&sp),
        decay: DecaySummary::new(&p.decay, epsilon_residual(&sp, &s.material, lambda, p.decay.epsilon)),
        window: WindowSummary {
            length: Float(length),
            horizon: Float(s.horizon),
            t0: Float(p.t0),
            r0: Float(p.r0),
            t0_min: Float(t0_min),
            t0_max: Float(t0_max),
        },
        resolution: ResolutionSummary {
            h: Float(s.grid.h[0]),
            h_reference: Float(policy.reference_fraction * s.grid.extent[0]),
            slack_factor: Float(res.factor),
            resolution_limited: res.limited,
        },
        steps: s.steps(),
        identity: IdentitySummary {
            relative_residual: Float(identity.relative),
            tolerance: Float(id_tol),
            passed: identity_ok,
        },
        diff_inequality: DiffSummary {
            samples: diff.samples,
            violations: diff.violations.len(),
            worst_margin: Float(diff.worst_margin),
            scale: Float(diff.scale),
            tolerance: Float(diff_tol),
            passed: diff.passed(),
        },
        decay_estimate: DecayCheckSummary {
            samples: decay.samples.len(),
            floored: decay.samples.iter().filter(|x| x.floored).count(),
            violations: decay.violations,
            fitted_slope: decay.fitted_slope.map(Float),
            predicted_slope: Float(decay.predicted_slope),
            tolerance: Float(decay_tol),
            passed: decay.passed(),
        },
        monotonicity: MonotonicitySummary {
            checked: mono.checked,
            violations: mono.violations.len(),
            tolerance: Float(policy.monotonicity),
            passed: mono.violations.is_empty(),
        },
        warnings: warnings.clone(),
        passed,
    };
    let text = to_json(&summary);
    if let Some(d) = out_dir(cfg)? {
        let o = s.output;
        write_file(d.join("measure.csv"), |w| write_series_csv(&series, o.r_stride, o.t_stride, w))?;
        write_file(d.join("summary.json"), |w| writeln!(w, "{text}"))?;
    }
    Ok(VerifyOutcome {
        outcome: Outcome {
            passed,
            summary: text,
            warnings,
        },
        summary,
        series,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub decay: DecayParameters,
    /// None without a scenario.
    pub feasible: Option<bool>,
    /// Fitted slope of ln E along the characteristic; feasible rows only.
    pub slope: Option<f64>,
}

/// One row per λ. With a scenario, the trajectory is simulated once and
/// every feasible row measures its slope on it.
pub fn sweep_lambda(cfg: &RunConfig) -> Result<(Outcome, Vec<SweepRow>), CliError> {
    let policy = TolerancePolicy::default();
    let scenario = match &cfg.scenario {
        Some(_) => Some(load_scenario(cfg)?),
        None => None,
    };
    let m = match &scenario {
        Some(s) => s.material.clone(),
        None => load_material(cfg)?,
    };
    let sp = admissible_spectrum(&m)?;
    let mut warnings = Vec::new();
    let setup = match &scenario {
        None => None,
        Some(s) => {
            warnings = s.validate().map_err(|e| CliError::invalid("scenario", e))?;
            let (x0, length) = support(s)?;
            let geometry = SupportGeometry::slab(&s.grid, x0, 1).map_err(|e| CliError::invalid("measure", e))?;
            Some((s, length, geometry))
        }
    };
    let traj = match &setup {
        Some((s, ..)) => Some(run(s).map_err(solver_error)?),
        None => None,
    };
    let r0 = cfg.r0.unwrap_or(0.0);
    let lambdas = cfg.lambda.values();
    let rows = map_maybe_parallel(&lambdas, cfg.parallel, |&lambda| -> Result<SweepRow, CliError> {
        let decay = zeta_of_lambda(&sp, &m, lambda).map_err(|e| CliError::invalid("spectrum", e))?;
        let (Some((s, length, geometry)), Some(traj)) = (&setup, &traj) else {
            return Ok(SweepRow {
                decay,
                feasible: None,
                slope: None,
            });
        };
        let window = feasibility_window(decay.zeta, *length, s.horizon).ok();
        let Some((t0, _)) = window.and_then(|w| w.latest(r0)) else {
            return Ok(SweepRow {
                decay,
                feasible: Some(false),
                slope: None,
            });
        };
        let series = match compute_e(traj, geometry, lambda) {
            Ok(s) => s,
            // Too large a weight to evaluate on this horizon; the row stays.
            Err(crate::measures::MeasureError::WeightOverflow { .. }) => {
                return Ok(SweepRow {
                    decay,
                    feasible: Some(true),
                    slope: None,
                })
            }
            Err(e) => return Err(CliError::invalid("measure", e)),
        };
        let rep = check_decay(&series, &decay, *length, s.horizon, t0, r0, policy.decay, policy.log_floor)
            .map_err(|e| CliError::invalid("measure", e))?;
        Ok(SweepRow {
            decay,
            feasible: Some(true),
            slope: rep.fitted_slope,
        })
    });
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_, _>>()?;
    let summary = SweepSummary {
        spectrum: SpectrumSummary::from(&sp),
        length: setup.as_ref().map(|(_, l, _)| Float(*l)),
        horizon: setup.as_ref().map(|(s, ..)| Float(s.horizon)),
        rows: rows
            .iter()
            .map(|r| SweepRowSummary {
                lambda: Float(r.decay.lambda),
                epsilon: Float(r.decay.epsilon),
                zeta: Float(r.decay.zeta),
                lambda_over_zeta: Float(r.decay.decay_rate),
                zeta_over_sqrt_lambda: Float(r.decay.zeta / r.decay.lambda.sqrt()),
                feasible: r.feasible,
                slope: r.slope.map(Float),
            })
            .collect(),
    };
    let text = to_json(&summary);
    if let Some(d) = out_dir(cfg)? {
        write_file(d.join("sweep.csv"), |w| {
            writeln!(w, "lambda,epsilon,zeta,lambda_over_zeta,zeta_over_sqrt_lambda,feasible,slope")?;
            for r in &summary.rows {
                let f = |x: &Float| crate::measures::fmt_float(x.0);
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    f(&r.lambda),
                    f(&r.epsilon),
                    f(&r.zeta),
                    f(&r.lambda_over_zeta),
                    f(&r.zeta_over_sqrt_lambda),
                    r.feasible.map_or(String::new(), |b| b.to_string()),
                    r.slope.as_ref().map_or(String::new(), f)
                )?;
            }
            Ok(())
        })?;
        write_file(d.join("sweep.json"), |w| writeln!(w, "{text}"))?;
    }
    Ok((
        Outcome {
            passed: true,
            summary: text,
            warnings,
        },
        rows,
    ))
}

/// d = 1 materials with known extreme eigenvalues.
fn closed_forms() -> Vec<(&'static str, Material, [f64; 2])> {
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
    vec![("diag(2,3,5)", diag, [2.0, 5.0]), ("coupled [[2,1],[1,2]]", coupled, [1.0, 3.0])]
}

pub fn selftest(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let policy = TolerancePolicy::default();
    let rayleigh = rayleigh_suite(cfg.seed, 5, 10_000, 1e-9);
    let ineq = inequality_suite(cfg.seed, 10_000, policy.proved);
    let closed: Vec<ClosedForm> = closed_forms()
        .into_iter()
        .map(|(name, m, expected)| {
            let computed = spectrum(&m).map_or([f64::NAN; 2], |s| [s.mu_min, s.mu_max]);
            ClosedForm {
                name: name.to_string(),
                expected: expected.map(Float),
                computed: computed.map(Float),
                passed: computed == expected,
            }
        })
        .collect();
    let passed = rayleigh.iter().all(|c| c.violations == 0)
        && ineq.iter().all(|c| c.violations == 0)
        && closed.iter().all(|c| c.passed);
    let text = to_json(&SelftestSummary {
        seed: cfg.seed,
        rayleigh: rayleigh.iter().map(RayleighSummary::from).collect(),
        closed_forms: closed,
        inequalities: ineq.iter().map(InequalitySummary::from).collect(),
        passed,
    });
    if let Some(d) = out_dir(cfg)? {
        write_file(d.join("selftest.json"), |w| writeln!(w, "{text}"))?;
    }
    Ok(Outcome {
        passed,
        summary: text,
        warnings: Vec::new(),
    })
}
