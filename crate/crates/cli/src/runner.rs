//! Command execution: each run produces deterministic artifacts plus a
//! machine-readable summary; `replay` re-executes from the summary and
//! demands bit-identical artifact bytes.

use crate::config::ExperimentConfig;
use crate::svg::Chart;
use gauss_ot::evolution::{
    evolution_mass_1d, jacobian_interp_bound, random_intervals, reverse_evolution_mass_1d,
    DensityPair,
};
use gauss_ot::glue::build_monge_map;
use gauss_ot::measures::DiscreteMeasure;
use gauss_ot::ot::{duality_gap, solve_kantorovich};
use gauss_ot::wiener::{dimension_ladder, DensitySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Rays,
    Glue,
    VerifyEvolution,
    JacobianSweep,
    Ladder,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Solve => "solve",
            CommandKind::Rays => "rays",
            CommandKind::Glue => "glue",
            CommandKind::VerifyEvolution => "verify-evolution",
            CommandKind::JacobianSweep => "jacobian-sweep",
            CommandKind::Ladder => "ladder",
        }
    }

    pub fn parse(s: &str) -> Option<CommandKind> {
        match s {
            "solve" => Some(CommandKind::Solve),
            "rays" => Some(CommandKind::Rays),
            "glue" => Some(CommandKind::Glue),
            "verify-evolution" => Some(CommandKind::VerifyEvolution),
            "jacobian-sweep" => Some(CommandKind::JacobianSweep),
            "ladder" => Some(CommandKind::Ladder),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Pass,
    ToleranceFailure(String),
}

#[derive(Debug)]
pub struct RunOutput {
    pub command: CommandKind,
    pub status: RunStatus,
    pub metrics: BTreeMap<String, f64>,
    /// (file name, bytes) — deterministic, covered by replay
    pub artifacts: Vec<(String, Vec<u8>)>,
    /// wall-time lines, written to timings.txt and excluded from replay
    pub timings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub status: String,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<ArtifactRecord>,
    pub config_toml: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DiscreteMeasure {
    let pts = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
    let ws = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    DiscreteMeasure::probability(pts, ws).expect("generated cloud is valid")
}

/// Both marginals on one random line, all mass moving the same way — the
/// family on which rays are nontrivial.
fn collinear_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    d: usize,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let dir: Vec<f64> = {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-3);
        v.into_iter().map(|c| c / norm).collect()
    };
    let base: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let at = |s: f64| -> Vec<f64> { base.iter().zip(&dir).map(|(b, u)| b + s * u).collect() };
    let mut s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
    s.sort_by(f64::total_cmp);
    let t: Vec<f64> = s.iter().map(|&si| si + rng.gen_range(0.5..1.5)).collect();
    let mu =
        DiscreteMeasure::probability(s.iter().map(|&v| at(v)).collect(), vec![1.0; n]).unwrap();
    let nu =
        DiscreteMeasure::probability(t.iter().map(|&v| at(v)).collect(), vec![1.0; n]).unwrap();
    (mu, nu)
}

pub fn execute(command: CommandKind, cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    match command {
        CommandKind::Solve => run_solve(cfg),
        CommandKind::Rays => run_rays(cfg),
        CommandKind::Glue => run_glue(cfg),
        CommandKind::VerifyEvolution => run_verify_evolution(cfg),
        CommandKind::JacobianSweep => run_jacobian_sweep(cfg),
        CommandKind::Ladder => run_ladder(cfg),
    }
}

fn run_solve(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cost = cfg.instance.cost_kind()?;
    let mu = random_cloud(&mut rng, cfg.instance.n, cfg.instance.d);
    let nu = random_cloud(&mut rng, cfg.instance.k.max(2), cfg.instance.d);
    let start = Instant::now();
    let (plan, duals) =
        solve_kantorovich(&mu, &nu, cost).map_err(|e| RunError::Internal(e.to_string()))?;
    let gap = duality_gap(&plan, &duals);
    let rel_gap = gap.gap.abs() / (1.0 + plan.cost.abs());

    let mut metrics = BTreeMap::new();
    metrics.insert("cost".into(), plan.cost);
    metrics.insert("relative_gap".into(), rel_gap);
    metrics.insert("marginal_residual".into(), plan.marginal_residual());
    let status = if rel_gap <= cfg.tolerances.gap && gap.feasible {
        RunStatus::Pass
    } else {
        RunStatus::ToleranceFailure(format!("relative duality gap {rel_gap:.3e}"))
    };
    Ok(RunOutput {
        command: CommandKind::Solve,
        status,
        metrics,
        artifacts: vec![
            ("mu.csv".into(), mu.to_csv().into_bytes()),
            ("nu.csv".into(), nu.to_csv().into_bytes()),
            ("plan.csv".into(), plan.to_csv().into_bytes()),
        ],
        timings: vec![format!("solve: {:?}", start.elapsed())],
    })
}

fn run_rays(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mu, nu) = collinear_pair(&mut rng, cfg.instance.n, cfg.instance.d);
    let start = Instant::now();
    let (plan, _) = solve_kantorovich(&mu, &nu, cfg.instance.cost_kind()?)
        .map_err(|e| RunError::Internal(e.to_string()))?;
    let res = build_monge_map(&mu, &nu, &plan, 3)
        .map_err(|e| RunError::Internal(e.to_string()))?;

    let mut gamma_csv = String::from("w,z\n");
    for &(w, z) in &res.gamma_prime {
        let _ = writeln!(gamma_csv, "{w},{z}");
    }
    // scatter of support points in the first two coordinates, one series per
    // ray
    let coords = |id: usize| -> (f64, f64) {
        let p = &res.decomposition.points[id];
        (p[0], if p.len() > 1 { p[1] } else { 0.0 })
    };
    let mut series: Vec<(String, Vec<(f64, f64)>)> = res
        .decomposition
        .rays
        .iter()
        .enumerate()
        .map(|(k, ray)| {
            (format!("ray {k}"), ray.point_ids.iter().map(|&id| coords(id)).collect())
        })
        .collect();
    if !res.decomposition.unassigned.is_empty() {
        series.push((
            "unassigned".into(),
            res.decomposition.unassigned.iter().map(|&id| coords(id)).collect(),
        ));
    }
    let chart = Chart { title: "transport rays".into(), series, lines: true };

    let mut metrics = BTreeMap::new();
    metrics.insert("rays".into(), res.decomposition.rays.len() as f64);
    metrics.insert("interior_points".into(), res.decomposition.interior.len() as f64);
    metrics.insert("unassigned_points".into(), res.decomposition.unassigned.len() as f64);
    Ok(RunOutput {
        command: CommandKind::Rays,
        status: RunStatus::Pass,
        metrics,
        artifacts: vec![
            ("rays.csv".into(), res.decomposition.dump_csv(&mu).into_bytes()),
            ("gamma_prime.csv".into(), gamma_csv.into_bytes()),
            ("rays.svg".into(), chart.render().into_bytes()),
        ],
        timings: vec![format!("pipeline: {:?}", start.elapsed())],
    })
}

fn run_glue(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mu, nu) = collinear_pair(&mut rng, cfg.instance.n, cfg.instance.d);
    let start = Instant::now();
    let (plan, _) = solve_kantorovich(&mu, &nu, cfg.instance.cost_kind()?)
        .map_err(|e| RunError::Internal(e.to_string()))?;
    let res = build_monge_map(&mu, &nu, &plan, 3)
        .map_err(|e| RunError::Internal(e.to_string()))?;

    let ray_of_pair: BTreeMap<(usize, usize), usize> = res
        .map
        .assignment
        .iter()
        .flat_map(|(&i, targets)| {
            let support = &res.support;
            let decomp = &res.decomposition;
            targets.iter().filter_map(move |&(j, _)| {
                decomp
                    .point_to_ray
                    .get(&support.source_point[i])
                    .map(|&ray| ((i, j), ray))
            })
        })
        .collect();

    let rel_diff =
        (res.map.cost - plan.cost).abs() / (1.0 + plan.cost.abs());
    let mut metrics = BTreeMap::new();
    metrics.insert("plan_cost".into(), plan.cost);
    metrics.insert("map_cost".into(), res.map.cost);
    metrics.insert("pushforward_residual".into(), res.report.pushforward_residual);
    metrics.insert("bijective".into(), if res.report.bijective { 1.0 } else { 0.0 });
    let status = if res.report.passed() && rel_diff <= cfg.tolerances.cost_match {
        RunStatus::Pass
    } else {
        RunStatus::ToleranceFailure(format!(
            "map/plan cost difference {rel_diff:.3e} or verification failure"
        ))
    };
    Ok(RunOutput {
        command: CommandKind::Glue,
        status,
        metrics,
        artifacts: vec![
            ("map.csv".into(), res.map.to_csv(&ray_of_pair).into_bytes()),
            ("rays.csv".into(), res.decomposition.dump_csv(&mu).into_bytes()),
        ],
        timings: vec![format!("pipeline: {:?}", start.elapsed())],
    })
}

fn run_verify_evolution(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let pair = DensityPair::new(
        cfg.evolution.rho1.to_density()?,
        cfg.evolution.rho2.to_density()?,
    );
    let intervals = random_intervals(-4.0, 4.0, cfg.evolution.intervals, cfg.seed);
    let start = Instant::now();
    let fwd = evolution_mass_1d(&pair, &cfg.evolution.t_grid, &intervals)
        .map_err(|e| RunError::Internal(e.to_string()))?;
    let rev = reverse_evolution_mass_1d(&pair, &cfg.evolution.t_grid, &intervals)
        .map_err(|e| RunError::Internal(e.to_string()))?;

    // ratio vs t, one series per direction (minimum over sets at each t)
    let min_per_t = |rep: &gauss_ot::evolution::EvolutionReport| -> Vec<(f64, f64)> {
        cfg.evolution
            .t_grid
            .iter()
            .map(|&t| {
                let min = rep
                    .entries
                    .iter()
                    .filter(|e| e.t == t)
                    .map(|e| e.ratio)
                    .fold(f64::INFINITY, f64::min);
                (t, min)
            })
            .collect()
    };
    let chart = Chart {
        title: format!("min ratio vs t (1/M = {:.4})", fwd.bound),
        series: vec![("forward".into(), min_per_t(&fwd)), ("reverse".into(), min_per_t(&rev))],
        lines: true,
    };

    let slack = cfg.tolerances.evolution_slack;
    let mut metrics = BTreeMap::new();
    metrics.insert("c_hat_forward".into(), fwd.c_hat);
    metrics.insert("c_hat_reverse".into(), rev.c_hat);
    metrics.insert("bound".into(), fwd.bound);
    let status = if fwd.passes(slack) && rev.passes(slack) {
        RunStatus::Pass
    } else {
        RunStatus::ToleranceFailure(format!(
            "C forward {:.4} / reverse {:.4} below 1/M - {slack} = {:.4}",
            fwd.c_hat,
            rev.c_hat,
            fwd.bound - slack
        ))
    };
    Ok(RunOutput {
        command: CommandKind::VerifyEvolution,
        status,
        metrics,
        artifacts: vec![
            ("forward.csv".into(), fwd.to_csv().into_bytes()),
            ("reverse.csv".into(), rev.to_csv().into_bytes()),
            ("ratio.svg".into(), chart.render().into_bytes()),
        ],
        timings: vec![format!("quadrature: {:?}", start.elapsed())],
    })
}

fn run_jacobian_sweep(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ts = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut csv = String::from("case,dim,t,lhs,rhs,margin\n");
    let mut violations = 0usize;
    let mut worst_margin = f64::INFINITY;
    for case in 0..cfg.jacobian.tuples {
        let dim = rng.gen_range(1..=cfg.jacobian.max_dim.max(1));
        let eig: Vec<f64> =
            (0..dim).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
        for &t in &ts {
            let (lhs, rhs, holds) =
                jacobian_interp_bound(&eig, t).map_err(|e| RunError::Internal(e.to_string()))?;
            if !holds {
                violations += 1;
            }
            let margin = lhs - rhs;
            worst_margin = worst_margin.min(margin);
            let _ = writeln!(csv, "{case},{dim},{t},{lhs},{rhs},{margin}");
        }
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("violations".into(), violations as f64);
    metrics.insert("worst_margin".into(), worst_margin);
    let status = if violations == 0 {
        RunStatus::Pass
    } else {
        RunStatus::ToleranceFailure(format!("{violations} bound violations"))
    };
    Ok(RunOutput {
        command: CommandKind::JacobianSweep,
        status,
        metrics,
        artifacts: vec![("jacobian.csv".into(), csv.into_bytes())],
        timings: vec![],
    })
}

fn run_ladder(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let (mu_spec, nu_spec, m): (DensitySpec, DensitySpec, usize) =
        match cfg.ladder.densities.as_str() {
            "half-line" => (
                DensitySpec {
                    rho: Box::new(|x: &[f64]| if x[0] > 0.0 { 2.0 } else { 0.0 }),
                    bound: 2.0,
                },
                DensitySpec {
                    rho: Box::new(|x: &[f64]| if x[0] <= 0.0 { 2.0 } else { 0.0 }),
                    bound: 2.0,
                },
                1,
            ),
            "quadrant" => (
                DensitySpec {
                    rho: Box::new(|x: &[f64]| {
                        if x[0] > 0.0 && x[1] > 0.0 {
                            4.0
                        } else {
                            0.0
                        }
                    }),
                    bound: 4.0,
                },
                DensitySpec {
                    rho: Box::new(|x: &[f64]| {
                        if x[0] <= 0.0 && x[1] <= 0.0 {
                            4.0
                        } else {
                            0.0
                        }
                    }),
                    bound: 4.0,
                },
                2,
            ),
            other => {
                return Err(RunError::Invalid(format!("unknown ladder densities {other:?}")))
            }
        };
    let start = Instant::now();
    let report = dimension_ladder(
        &mu_spec,
        &nu_spec,
        m,
        &cfg.ladder.dims,
        cfg.ladder.ensemble,
        cfg.ladder.heads,
        cfg.ladder.tails,
        cfg.seed,
    )
    .map_err(|e| RunError::Internal(e.to_string()))?;

    let chart = Chart {
        title: format!("projected cost vs dimension (m = {m})"),
        series: vec![(
            "c_d".into(),
            report.entries.iter().map(|e| (e.d as f64, e.cost)).collect(),
        )],
        lines: true,
    };
    let mut metrics = BTreeMap::new();
    metrics.insert("monotone".into(), if report.monotone { 1.0 } else { 0.0 });
    metrics.insert("saturated".into(), if report.saturated { 1.0 } else { 0.0 });
    if let Some(last) = report.entries.last() {
        metrics.insert("final_cost".into(), last.cost);
    }
    let status = if report.monotone && report.saturated {
        RunStatus::Pass
    } else {
        RunStatus::ToleranceFailure("ladder not monotone or not saturated".into())
    };
    Ok(RunOutput {
        command: CommandKind::Ladder,
        status,
        metrics,
        artifacts: vec![
            ("ladder.csv".into(), report.to_csv().into_bytes()),
            ("ladder.svg".into(), chart.render().into_bytes()),
        ],
        timings: vec![format!("ladder ({} dims): {:?}", report.entries.len(), start.elapsed())],
    })
}

/// Writes artifacts, timings, and summary.json; returns the summary path.
pub fn persist(
    out: &RunOutput,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<PathBuf, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::Internal(e.to_string()))?;
    let mut records = Vec::new();
    for (name, bytes) in &out.artifacts {
        std::fs::write(dir.join(name), bytes).map_err(|e| RunError::Internal(e.to_string()))?;
        records.push(ArtifactRecord { name: name.clone(), sha256: sha256_hex(bytes) });
    }
    if !out.timings.is_empty() {
        // wall times are non-deterministic by nature: kept out of the
        // replayed artifact set
        std::fs::write(dir.join("timings.txt"), out.timings.join("\n") + "\n")
            .map_err(|e| RunError::Internal(e.to_string()))?;
    }
    let config_toml = cfg.to_toml();
    let summary = RunSummary {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: out.command.as_str().to_string(),
        seed: cfg.seed,
        config_hash: sha256_hex(config_toml.as_bytes()),
        status: match &out.status {
            RunStatus::Pass => "pass".to_string(),
            RunStatus::ToleranceFailure(d) => format!("tolerance-failure: {d}"),
        },
        metrics: out.metrics.clone(),
        artifacts: records,
        config_toml,
    };
    let path = dir.join("summary.json");
    let body =
        serde_json::to_string_pretty(&summary).map_err(|e| RunError::Internal(e.to_string()))?;
    std::fs::write(&path, body).map_err(|e| RunError::Internal(e.to_string()))?;
    Ok(path)
}

#[derive(Debug)]
pub struct ReplayOutcome {
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Re-runs the summarized experiment and compares every artifact byte for
/// byte against the files on disk; the first differing row is reported.
pub fn replay(summary_path: &Path) -> Result<ReplayOutcome, RunError> {
    let body = std::fs::read_to_string(summary_path)
        .map_err(|e| RunError::Invalid(format!("cannot read summary: {e}")))?;
    let summary: RunSummary = serde_json::from_str(&body)
        .map_err(|e| RunError::Invalid(format!("malformed summary: {e}")))?;
    if summary.version != env!("CARGO_PKG_VERSION") {
        return Err(RunError::Invalid(format!(
            "summary written by version {}, this binary is {}",
            summary.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    let command = CommandKind::parse(&summary.command)
        .ok_or_else(|| RunError::Invalid(format!("unknown command {:?}", summary.command)))?;
    let mut cfg = ExperimentConfig::from_toml(&summary.config_toml)?;
    cfg.seed = summary.seed;

    let rerun = execute(command, &cfg)?;
    let dir = summary_path.parent().unwrap_or_else(|| Path::new("."));
    let mut failures = Vec::new();
    for (record, (name, fresh)) in summary.artifacts.iter().zip(&rerun.artifacts) {
        if record.name != *name {
            failures.push(format!("artifact list changed: {} vs {}", record.name, name));
            continue;
        }
        let on_disk = match std::fs::read(dir.join(name)) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("{name}: missing on disk ({e})"));
                continue;
            }
        };
        if on_disk != *fresh {
            failures.push(format!("{name}: {}", first_differing_row(&on_disk, fresh)));
        } else if sha256_hex(fresh) != record.sha256 {
            failures.push(format!("{name}: recorded hash does not match regenerated bytes"));
        }
    }
    if summary.artifacts.len() != rerun.artifacts.len() {
        failures.push(format!(
            "artifact count changed: {} recorded, {} regenerated",
            summary.artifacts.len(),
            rerun.artifacts.len()
        ));
    }
    Ok(ReplayOutcome { pass: failures.is_empty(), failures })
}

fn first_differing_row(old: &[u8], new: &[u8]) -> String {
    let old_s = String::from_utf8_lossy(old);
    let new_s = String::from_utf8_lossy(new);
    for (k, (a, b)) in old_s.lines().zip(new_s.lines()).enumerate() {
        if a != b {
            return format!("first differing row {}: {:?} vs {:?}", k + 1, a, b);
        }
    }
    format!(
        "row counts differ: {} on disk vs {} regenerated",
        old_s.lines().count(),
        new_s.lines().count()
    )
}
