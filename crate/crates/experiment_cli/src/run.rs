//! Dispatch of a validated config to the owning library, with verdicts and artifacts.

use galerkin_solvers::{ModelParams, Solver, SpectralField};
use mode_algebra::{TrigMode, WaveVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use saturation_engine::{check_hoermander, determining_modes, euler_axis_escape_check};
use scaling_controls::{
    burst_params, control_chain, exact_projection_control, pinball_exact_time, synthesize_reach, verify_scaling,
    ComparisonEnvelope, ControlSchedule, ReachOptions, ReachPlan, ScalingCase, ScalingKind, ScalingSchedule,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Display;
use std::path::Path;
use stochastic_support::{empirical_support, gramian, gramian_monotonicity, BrownianStream};

use crate::config::{BurstKind, ExperimentConfig, ExperimentKind, ModeRef, ModelConfig};
use crate::record::{csv, now_unix, write_atomic, RunRecord, Verdict, ARTIFACT_VERSION};
use crate::CliError;

/// Result of one experiment before it is written out.
#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: Value,
    pub verdicts: Vec<Verdict>,
    /// File name and contents.
    pub artifacts: Vec<(String, String)>,
    pub diagnostics: Vec<String>,
}

type ExpResult = Result<Outcome, String>;

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

/// Directory of a run under `root`: `<kind>-<first 12 hex digits of the config hash>`.
pub fn run_dir(root: &Path, kind: &str, hash: &str) -> std::path::PathBuf {
    root.join(format!("{kind}-{}", &hash[..12.min(hash.len())]))
}

/// Runs `cfg`, writes its artifacts, config and record under `out_root`, and returns the record.
pub fn run(cfg: &ExperimentConfig, out_root: &Path) -> Result<RunRecord, CliError> {
    cfg.validate().map_err(CliError::Config)?;
    let started = now_unix();
    let outcome = match execute(cfg) {
        Ok(o) => o,
        Err(e) => Outcome {
            payload: Value::Null,
            verdicts: vec![Verdict::flag("completed", false, e.clone())],
            artifacts: Vec::new(),
            diagnostics: vec![e],
        },
    };
    let hash = cfg.config_hash();
    let dir = run_dir(out_root, cfg.kind.name(), &hash);
    let mut files = outcome.artifacts;
    files.push(("config.toml".into(), cfg.to_toml()));
    finish(cfg.kind.name(), hash, cfg.seed, started, outcome.payload, outcome.verdicts, outcome.diagnostics, files, &dir)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kind: &str,
    config_hash: String,
    seed: u64,
    started: f64,
    payload: Value,
    verdicts: Vec<Verdict>,
    diagnostics: Vec<String>,
    files: Vec<(String, String)>,
    dir: &Path,
) -> Result<RunRecord, CliError> {
    for (name, contents) in &files {
        write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    let passed = !verdicts.is_empty() && verdicts.iter().all(|v| v.passed);
    let record = RunRecord {
        kind: kind.into(),
        config_hash,
        artifact_version: ARTIFACT_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        started_unix: started,
        finished_unix: now_unix(),
        payload,
        verdicts,
        passed,
        diagnostics,
        artifacts: files.into_iter().map(|f| f.0).collect(),
    };
    write_atomic(&dir.join("record.json"), record.to_json().as_bytes())?;
    Ok(record)
}

/// Runs the experiment without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> ExpResult {
    let model = cfg.model.as_ref();
    let need = || model.ok_or_else(|| "model section missing".to_string());
    match cfg.kind {
        ExperimentKind::SpanCheck => span_check(need()?, cfg.span_check.clone().unwrap_or_default()),
        ExperimentKind::DeterminingModes => determining(need()?, cfg.determining_modes.clone().unwrap_or_default()),
        ExperimentKind::ScalingSweep => scaling_sweep(need()?, cfg.scaling_sweep.clone().unwrap_or_default(), cfg.seed),
        ExperimentKind::Reach => reach(need()?, cfg.reach.clone().unwrap_or_default()),
        ExperimentKind::ExactProjection => exact_projection(need()?, cfg.exact_projection.clone().unwrap_or_default()),
        ExperimentKind::Gramian => gramian_runs(need()?, cfg.gramian.clone().unwrap_or_default(), cfg.seed),
        ExperimentKind::SupportMc => support(need()?, cfg.support_mc.clone().unwrap_or_default(), cfg.seed),
        ExperimentKind::EnvelopeCheck => envelope(cfg.envelope_check.clone().unwrap_or_default()),
    }
}

fn span_check(m: &ModelConfig, s: crate::config::SpanCheckConfig) -> ExpResult {
    let params = m.params();
    let nl = params.nonlinearity().ok_or("span_check needs a nonlinear model")?;
    let report = check_hoermander(&m.wave_vectors(), &nl, m.cutoff, s.max_depth).map_err(err)?;
    let ok = report.satisfied_up_to_cutoff == s.expect_satisfied;
    let detail = format!("satisfied = {}, expected {}, {} modes missing", report.satisfied_up_to_cutoff, s.expect_satisfied, report.missing.len());
    let dims: Vec<Vec<f64>> = report.level_dims.iter().enumerate().map(|(i, d)| vec![i as f64, *d as f64]).collect();
    Ok(Outcome {
        payload: json!({
            "satisfied_up_to_cutoff": report.satisfied_up_to_cutoff,
            "depth": report.depth,
            "level_dims": report.level_dims,
            "missing": report.missing.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        }),
        verdicts: vec![Verdict::flag("hoermander", ok, detail)],
        artifacts: vec![("hoermander.json".into(), report.to_json()), ("level_dims.csv".into(), csv(&["level", "dim"], &dims))],
        diagnostics: Vec::new(),
    })
}

fn determining(m: &ModelConfig, s: crate::config::DeterminingModesConfig) -> ExpResult {
    let mut z = m.wave_vectors();
    let mut verdicts = Vec::new();
    if s.escape {
        let escaped = euler_axis_escape_check(&z).map_err(err)?;
        verdicts.push(Verdict::flag("axis_escape", escaped, "double brackets of the axis families contain F_(1,1,1)"));
        z.push(WaveVector::d3(1, 1, 1));
    }
    let g = determining_modes(&z, m.cutoff).map_err(err)?;
    let covers = g.covers_box();
    verdicts.push(Verdict::flag(
        "covers_box",
        covers == s.expect_cover,
        format!("covers = {covers}, expected {}, {} nodes, {} generations", s.expect_cover, g.nodes.len(), g.generations),
    ));
    let sizes: Vec<Vec<f64>> = g.generation_sizes().iter().enumerate().map(|(i, n)| vec![i as f64, *n as f64]).collect();
    Ok(Outcome {
        payload: json!({
            "covers_box": covers,
            "nodes": g.nodes.len(),
            "generations": g.generations,
            "generation_sizes": g.generation_sizes(),
        }),
        verdicts,
        artifacts: vec![("move_graph.json".into(), g.to_json()), ("generations.csv".into(), csv(&["generation", "size"], &sizes))],
        diagnostics: Vec::new(),
    })
}

/// Smooth pseudo-random state: uniform coefficients damped by `1 / (1 + |k|^2)`.
pub fn random_state(solver: &Solver, rng: &mut ChaCha8Rng, amplitude: f64) -> SpectralField {
    let mut u = solver.zero();
    for (c, m) in u.coeffs.iter_mut().zip(solver.modes()) {
        *c = amplitude * rng.random_range(-1.0..1.0) / (1.0 + m.k.norm2() as f64);
    }
    u
}

fn scaling_sweep(m: &ModelConfig, s: crate::config::ScalingSweepConfig, seed: u64) -> ExpResult {
    let solver = Solver::new(burst_params(&m.params())).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = solver.n_controls();
    let cases: Vec<ScalingCase> = (0..s.cases)
        .map(|_| ScalingCase {
            u0: random_state(&solver, &mut rng, s.amplitude),
            direction: (0..k).map(|_| rng.random_range(-1.0..1.0)).collect(),
        })
        .collect();
    let kind = match s.burst {
        BurstKind::Ray => ScalingKind::RayBurst,
        BurstKind::Bracket => ScalingKind::BracketBurst,
    };
    let table = verify_scaling(&solver, kind, &cases, s.t, &s.lambdas).map_err(err)?;
    let mut verdicts = vec![
        Verdict::flag("monotone", table.monotone, "sup error strictly decreases along the lambda grid"),
        match table.slope {
            Some(x) => Verdict::at_most("slope", x, s.max_slope),
            None => Verdict::flag("slope", false, "no slope: fewer than two finite positive errors"),
        },
    ];
    let mut shift = 0.0f64;
    if kind == ScalingKind::BracketBurst {
        for c in &cases {
            let lim = ScalingSchedule::new(kind, c.direction.clone(), s.t, 1.0).and_then(|x| x.limit(&solver, &c.u0)).map_err(err)?;
            shift = shift.max(lim.dist(&c.u0));
        }
        match table.rows.last().and_then(|r| r.error) {
            Some(e) if shift > 0.0 => verdicts.push(Verdict::below("relative_error", e / shift, s.max_relative_error)),
            _ => verdicts.push(Verdict::flag("relative_error", false, "limit displacement vanishes or last row exploded")),
        }
    }
    let rows: Vec<Vec<f64>> = table.rows.iter().filter_map(|r| r.error.map(|e| vec![r.lambda, e])).collect();
    let exploded: Vec<f64> = table.rows.iter().filter(|r| r.exploded).map(|r| r.lambda).collect();
    Ok(Outcome {
        payload: json!({ "table": table, "limit_shift": shift, "exploded_lambdas": exploded }),
        verdicts,
        artifacts: vec![
            ("scaling.csv".into(), csv(&["lambda", "sup_error"], &rows)),
            ("scaling.json".into(), serde_json::to_string_pretty(&table).map_err(err)?),
        ],
        diagnostics: Vec::new(),
    })
}

fn schedule_csv(s: &ControlSchedule) -> String {
    let k = s.segments.first().map(|x| x.1.len()).unwrap_or(0);
    let mut header = vec!["start".to_string(), "duration".to_string()];
    header.extend((0..k).map(|i| format!("alpha{i}")));
    let mut start = 0.0;
    let rows: Vec<Vec<f64>> = s
        .segments
        .iter()
        .map(|(d, a)| {
            let mut r = vec![start, *d];
            r.extend(a);
            start += d;
            r
        })
        .collect();
    csv(&header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)
}

fn plan_summary(plan: &ReachPlan) -> Value {
    json!({
        "lambda": plan.lambda,
        "achieved_error": plan.achieved_error,
        "segments": plan.schedule.len(),
        "total_time": plan.schedule.duration_sum(),
        "pinball": plan.pinball,
        "projection_error": plan.projection_error,
        "fixed_point_iterations": plan.fixed_point_iterations,
        "params_hash": plan.params_hash,
    })
}

fn reach(m: &ModelConfig, s: crate::config::ReachConfig) -> ExpResult {
    let params = m.params();
    let chain = control_chain(&params, s.depth).map_err(err)?;
    let (u0, v) = (m.field(&s.initial), m.field(&s.target));
    let opts = ReachOptions { lambda_start: s.lambda_start, lambda_cap: s.lambda_cap, delta: s.delta, ..ReachOptions::default() };
    let plan = if s.exact_time {
        let relaxed = synthesize_reach(&params, &u0, &v, s.t, s.eps / 4.0, &chain, &opts).map_err(err)?;
        pinball_exact_time(&relaxed, s.t, s.eps, &opts).map_err(err)?
    } else {
        synthesize_reach(&params, &u0, &v, s.t, s.eps, &chain, &opts).map_err(err)?
    };
    let replay = plan.replay().map_err(err)?;
    let mut verdicts = vec![
        Verdict::below("achieved_error", plan.achieved_error, s.eps),
        Verdict::at_most("replay_difference", (replay.achieved_error - plan.achieved_error).abs(), 1e-12),
    ];
    if s.exact_time {
        verdicts.push(Verdict::at_most("total_time_error", (plan.schedule.duration_sum() - s.t).abs(), 1e-12));
    } else {
        verdicts.push(Verdict::at_most("total_time", plan.schedule.duration_sum(), s.t));
    }
    Ok(Outcome {
        payload: plan_summary(&plan),
        verdicts,
        artifacts: vec![("plan.json".into(), plan.to_json()), ("schedule.csv".into(), schedule_csv(&plan.schedule))],
        diagnostics: Vec::new(),
    })
}

fn resolve(m: &ModelConfig, refs: &[ModeRef]) -> Result<Vec<TrigMode>, String> {
    refs.iter().map(|r| m.trig_mode(r)).collect()
}

fn exact_projection(m: &ModelConfig, s: crate::config::ExactProjectionConfig) -> ExpResult {
    let params = m.params();
    let chain = control_chain(&params, s.depth).map_err(err)?;
    let (u0, v) = (m.field(&s.initial), m.field(&s.target));
    let modes = resolve(m, &s.modes)?;
    let opts = ReachOptions {
        lambda_start: s.lambda_start,
        lambda_cap: s.lambda_cap,
        delta: s.delta,
        proj_tol: s.proj_tol,
        max_iters: s.max_iters,
        theta: s.theta,
    };
    let plan = exact_projection_control(&params, &u0, &v, s.t, s.eps, &modes, &chain, &opts).map_err(err)?;
    let replay = ReachPlan::from_json(&plan.to_json()).and_then(|p| p.replay()).map_err(err)?;
    let verdicts = vec![
        Verdict::below("projection_error", plan.projection_error.unwrap_or(f64::INFINITY), s.proj_tol),
        Verdict::below("achieved_error", plan.achieved_error, s.eps),
        Verdict::at_most("total_time_error", (plan.schedule.duration_sum() - s.t).abs(), 1e-12),
        Verdict::below("replay_projection_error", replay.projection_error.unwrap_or(f64::INFINITY), s.proj_tol),
        Verdict::below("replay_achieved_error", replay.achieved_error, s.eps),
    ];
    let hist: Vec<Vec<f64>> = plan.iteration_history.iter().enumerate().map(|(i, r)| vec![i as f64, *r]).collect();
    Ok(Outcome {
        payload: plan_summary(&plan),
        verdicts,
        artifacts: vec![
            ("plan.json".into(), plan.to_json()),
            ("schedule.csv".into(), schedule_csv(&plan.schedule)),
            ("iterations.csv".into(), csv(&["iteration", "projection_residual"], &hist)),
        ],
        diagnostics: Vec::new(),
    })
}

fn modes_or_controls(m: &ModelConfig, params: &ModelParams, refs: &[ModeRef]) -> Result<Vec<TrigMode>, String> {
    if refs.is_empty() {
        Ok(params.control_basis.clone())
    } else {
        resolve(m, refs)
    }
}

fn gramian_runs(m: &ModelConfig, s: crate::config::GramianConfig, seed: u64) -> ExpResult {
    let params = m.params();
    let solver = Solver::new(params.clone()).map_err(err)?;
    let modes = modes_or_controls(m, &params, &s.modes)?;
    let u0 = m.field(&s.initial);
    let stream = BrownianStream::new(seed);
    let runs: Vec<Result<_, String>> = (0..s.runs as u64)
        .into_par_iter()
        .map(|r| {
            let path = stream.path(solver.n_controls(), s.noise_dt, s.t + s.extension, r).map_err(err)?;
            let g = gramian(&solver, &u0, &path, s.t, &modes).map_err(err)?;
            let mono = if s.extension > 0.0 {
                Some(gramian_monotonicity(&solver, &u0, &path, s.t, s.extension, &modes).map_err(err)?)
            } else {
                None
            };
            Ok((g, mono))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let symmetric = runs.iter().all(|(g, _)| g.is_symmetric());
    let psd = runs.iter().all(|(g, _)| g.is_psd());
    let mut verdicts = vec![
        Verdict::flag("symmetric", symmetric, format!("{} runs", runs.len())),
        Verdict::flag("psd", psd, format!("{} runs", runs.len())),
    ];
    let violations = runs.iter().filter(|(_, m)| m.as_ref().is_some_and(|m| m.violation)).count();
    if s.extension > 0.0 {
        verdicts.push(Verdict::at_most("monotonicity_violations", violations as f64, 0.0));
    }
    let table: Vec<Vec<f64>> = runs
        .iter()
        .enumerate()
        .map(|(i, (g, _))| vec![i as f64, g.min_eigenvalue(), g.trace(), g.threshold(), g.nondegenerate() as u8 as f64])
        .collect();
    let reports: Vec<_> = runs.iter().map(|(g, m)| json!({ "eigen": g.report(), "monotonicity": m })).collect();
    Ok(Outcome {
        payload: json!({ "runs": reports, "violations": violations }),
        verdicts,
        artifacts: vec![
            ("gramian.csv".into(), runs[0].0.to_csv_string()),
            ("runs.csv".into(), csv(&["run", "lambda_min", "trace", "threshold", "nondegenerate"], &table)),
            ("eigen.json".into(), serde_json::to_string_pretty(&reports).map_err(err)?),
        ],
        diagnostics: Vec::new(),
    })
}

fn support(m: &ModelConfig, s: crate::config::SupportMcConfig, seed: u64) -> ExpResult {
    let params = m.params();
    let solver = Solver::new(params.clone()).map_err(err)?;
    let modes = modes_or_controls(m, &params, &s.modes)?;
    let (u0, v) = (m.field(&s.initial), m.field(&s.target));
    let r = empirical_support(&solver, &u0, s.t, &v, &modes, s.delta, s.samples, seed, s.noise_dt).map_err(err)?;
    let mut diagnostics = Vec::new();
    if r.exploded > 0 {
        diagnostics.push(format!("{} samples exploded and count as misses", r.exploded));
    }
    let verdict = Verdict {
        name: "frequency".into(),
        passed: r.frequency > s.min_frequency,
        value: Some(r.frequency),
        tolerance: Some(s.min_frequency),
        detail: format!("{} of {} samples within {}", r.hits, r.n_samples, s.delta),
    };
    Ok(Outcome {
        payload: json!({ "frequency": r.frequency, "hits": r.hits, "samples": r.n_samples, "exploded": r.exploded }),
        verdicts: vec![verdict],
        artifacts: vec![
            ("histogram.csv".into(), r.histogram_csv()),
            ("support.json".into(), serde_json::to_string_pretty(&r).map_err(err)?),
        ],
        diagnostics,
    })
}

fn envelope(s: crate::config::EnvelopeCheckConfig) -> ExpResult {
    let mut rows = Vec::new();
    let mut all = true;
    let mut worst = 0.0f64;
    for &p in &s.p {
        for &kappa0 in &s.kappa0 {
            for &lambda in &s.lambdas {
                let env = ComparisonEnvelope::new(s.c0, kappa0, p, lambda).map_err(err)?;
                for &x0 in &s.x0 {
                    if x0 + kappa0 == 0.0 {
                        continue;
                    }
                    let c = env.check(x0, s.fraction, s.steps);
                    all &= c.below;
                    worst = worst.max(c.max_ratio);
                    rows.push(vec![p, kappa0, lambda, x0, c.t_end, c.max_ratio, c.below as u8 as f64]);
                }
            }
        }
    }
    Ok(Outcome {
        payload: json!({ "cases": rows.len(), "max_ratio": worst, "all_below": all }),
        verdicts: vec![Verdict::flag("below_envelope", all, format!("max x/bound = {worst:.6}"))],
        artifacts: vec![("envelope.csv".into(), csv(&["p", "kappa0", "lambda", "x0", "t_end", "max_ratio", "below"], &rows))],
        diagnostics: Vec::new(),
    })
}

/// Re-solves a stored plan on a fresh solver and compares with its recorded errors.
pub fn replay_plan(plan_path: &Path, out_root: &Path, seed: u64) -> Result<RunRecord, CliError> {
    let text = std::fs::read_to_string(plan_path).map_err(|e| CliError::Io(format!("{}: {e}", plan_path.display())))?;
    let plan = ReachPlan::from_json(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", plan_path.display())))?;
    let started = now_unix();
    let hash: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let (payload, verdicts, diagnostics) = match plan.replay() {
        Ok(r) => {
            let mut v = vec![Verdict::at_most("achieved_error_difference", (r.achieved_error - plan.achieved_error).abs(), 1e-12)];
            if let (Some(a), Some(b)) = (r.projection_error, plan.projection_error) {
                v.push(Verdict::at_most("projection_error_difference", (a - b).abs(), 1e-12));
            }
            (json!({ "recorded": plan.achieved_error, "replayed": r.achieved_error, "projection_error": r.projection_error }), v, Vec::new())
        }
        Err(e) => (Value::Null, vec![Verdict::flag("completed", false, e.to_string())], vec![e.to_string()]),
    };
    let dir = run_dir(out_root, "replay", &hash);
    finish("replay", hash, seed, started, payload, verdicts, diagnostics, Vec::new(), &dir)
}
