//! Monte Carlo harness: sample regional failures, simulate every demand under
//! a recovery scheme, splice escalations and report per-trial metrics.

mod config;
mod metrics;
mod path_splicing;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{ExperimentConfig, FailureRadius, Scheme, SpliceMode, TopologySource};
pub use metrics::{
    controller_overhead, empirical_cdf, path_stretch, quantile, recovery_ratio, TrialCounts,
};
pub use path_splicing::{path_splicing_baseline_routes, perturbation_bound, simulate_path_splicing, PathSlices};

use crate::controller::{maximal_load, splice_all, LoadLedger, SplicePolicy, SpliceRecord};
use crate::dataplane::{install_routes, Classification, simulate_flow, simulate_flow_with, DataPlane, FlowOutcome, SpliceOverlay};
use crate::error::ConfigError;
use crate::failure::{apply_failure, parse_failure_log, sample_failure, RadiusDistribution, RegionalFailure, SurvivingGraph};
use crate::mrc::{generate_backup_topologies, BackupTopologySet};
use crate::routes::{all_pairs, plan_demands, radius_schedule, RoutePlanTable};
use crate::topology::{generate_random_planar, load_topology, DeploymentArea, NetworkGraph, NodeId};

/// Everything a scheme precomputes for one topology and `k`.
pub struct SchemeContext {
    scheme: Scheme,
    base: Arc<NetworkGraph>,
    demands: Vec<(NodeId, NodeId)>,
    plans: RoutePlanTable,
    dataplane: Option<DataPlane>,
    slices: Option<PathSlices>,
    slice_seed: u64,
}

impl SchemeContext {
    /// Builds routes and switch state for `scheme` over all node pairs.
    pub fn new(scheme: Scheme, bts: &BackupTopologySet, r_a: f64, r_b: f64, slice_seed: u64) -> Result<Self, ConfigError> {
        let base = bts.base().clone();
        let demands = all_pairs(&base);
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid { key: "r_a".into(), message: e.to_string() };
        let schedule = radius_schedule(r_a, r_b, bts.k()).map_err(|e| invalid(&e))?;
        let schedule = scheme.geographic().then_some(&schedule);
        let plans = plan_demands(bts, schedule, &demands).map_err(|e| invalid(&e))?;
        let (dataplane, slices) = if scheme == Scheme::PathSplicing {
            (None, Some(path_splicing_baseline_routes(&base, bts.k(), slice_seed)))
        } else {
            let dp = install_routes(&plans, bts).map_err(|e| invalid(&e))?;
            (Some(dp), None)
        };
        Ok(Self { scheme, base, demands, plans, dataplane, slices, slice_seed })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn plans(&self) -> &RoutePlanTable {
        &self.plans
    }

    pub fn dataplane(&self) -> Option<&DataPlane> {
        self.dataplane.as_ref()
    }

    pub fn demands(&self) -> &[(NodeId, NodeId)] {
        &self.demands
    }
}

/// Result of one failure scenario under one scheme.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    /// Data-plane outcome of every demand.
    pub outcomes: Vec<FlowOutcome>,
    /// Controller decisions on the escalated demands.
    pub splices: Vec<SpliceRecord>,
    /// Final outcome of each successfully spliced demand, re-simulated with its rules.
    pub spliced: Vec<FlowOutcome>,
    pub counts: TrialCounts,
    pub ml: u32,
    /// Stretch of every delivered rerouted flow.
    pub stretch: Vec<f64>,
}

impl ScenarioResult {
    /// Flow lines followed by splice lines.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = writeln!(out, "{}", o.log_line());
        }
        for s in &self.splices {
            let _ = writeln!(out, "{}", s.log_line());
        }
        for o in &self.spliced {
            let _ = writeln!(out, "{}", o.log_line());
        }
        out
    }
}

fn mix(parts: &[u64]) -> u64 {
    // splitmix64 finalizer over the folded parts
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

/// Simulates every demand of `ctx` under `sg` and lets the controller handle escalations.
pub fn run_scenario(ctx: &SchemeContext, sg: &SurvivingGraph, mode: SpliceMode, trial_seed: u64) -> ScenarioResult {
    let g = &ctx.base;
    let outcomes: Vec<FlowOutcome> = match (&ctx.dataplane, &ctx.slices) {
        (Some(dp), _) => ctx.demands.iter().map(|&(s, t)| simulate_flow(dp, sg, s, t)).collect(),
        (None, Some(slices)) => ctx
            .demands
            .iter()
            .map(|&(s, t)| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(&[ctx.slice_seed, trial_seed, s.0 as u64, t.0 as u64]));
                simulate_path_splicing(slices, sg, s, t, &mut rng)
            })
            .collect(),
        (None, None) => unreachable!("context has a data plane or slices"),
    };
    let mut ledger = LoadLedger::from_primaries(sg, &ctx.plans);
    for o in &outcomes {
        if matches!(o.classification, Classification::DeliveredLocal(_)) {
            ledger.add_rerouted(sg, &o.path);
        }
    }
    let escalated: Vec<(NodeId, NodeId)> = outcomes
        .iter()
        .filter(|o| matches!(o.classification, Classification::Escalated { .. }))
        .map(|o| (o.source, o.dest))
        .collect();
    let (splices, spliced) = match (&ctx.dataplane, ctx.scheme.has_controller()) {
        (Some(dp), true) => {
            let policy = match mode {
                SpliceMode::LoadAware => SplicePolicy::LoadAware,
                SpliceMode::Shortest => SplicePolicy::Shortest,
            };
            let records = splice_all(sg, &ctx.plans, &mut ledger, &escalated, policy);
            let mut overlay = SpliceOverlay::new();
            for r in &records {
                if let Ok(sp) = &r.result {
                    overlay.install(&sp.actions);
                }
            }
            let mut spliced = Vec::new();
            for r in &records {
                if r.result.is_ok() {
                    let o = simulate_flow_with(dp, sg, Some(&overlay), r.flow.0, r.flow.1);
                    debug_assert!(o.classification.is_delivered(), "splice rules must deliver {:?}", r.flow);
                    spliced.push(o);
                }
            }
            (records, spliced)
        }
        _ => (Vec::new(), Vec::new()),
    };
    let counts = TrialCounts::tally(&outcomes, &splices);
    let mut trees = HashMap::new();
    let mut stretch = Vec::new();
    let rerouted = outcomes
        .iter()
        .filter(|o| matches!(o.classification, Classification::DeliveredLocal(_)))
        .chain(spliced.iter().filter(|o| o.classification.is_delivered()));
    for o in rerouted {
        let t = g.idx(o.dest).expect("demand nodes exist");
        let tree = trees.entry(t).or_insert_with(|| sg.tree_toward(t));
        let s = g.idx(o.source).expect("demand nodes exist");
        if let (Some(w), Some(best)) = (g.path_weight(&o.path), tree.distance(s)) {
            stretch.push(if best > 0.0 { w / best } else { 1.0 });
        }
    }
    ScenarioResult { ml: maximal_load(&ledger, sg), outcomes, splices, spliced, counts, stretch }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub scheme: Scheme,
    pub topology: String,
    pub k: usize,
    /// Index into the radius sweep.
    pub point: usize,
    pub radius: f64,
    pub trial: usize,
    pub counts: TrialCounts,
    pub recovery_ratio: Option<f64>,
    pub controller_overhead: Option<f64>,
    pub ml: u32,
    pub stretch: Vec<f64>,
}

impl TrialRow {
    pub fn stretch_quantile(&self, q: f64) -> Option<f64> {
        quantile(&mut self.stretch.clone(), q)
    }
}

pub const CSV_HEADER: &str = "scheme,topology,k,radius,trial,recoverable,recovered,locally_recovered,escalated,\
spliced_ok,unspliceable,recovery_ratio,controller_overhead,ml,stretch_p50,stretch_p90";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub seed: u64,
    pub rows: Vec<TrialRow>,
    /// Failures in sampling order: topology, sweep point, trial.
    pub failures: Vec<RegionalFailure>,
}

/// Aggregate of one (scheme, topology set, k, sweep point).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scheme: Scheme,
    pub k: usize,
    pub point: usize,
    pub trials: usize,
    pub mean_recovery_ratio: Option<f64>,
    pub mean_controller_overhead: Option<f64>,
    pub mean_ml: f64,
    pub stretch: Vec<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl MetricsReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = format!("# seed = {}\n{CSV_HEADER}\n", self.seed);
        for r in &self.rows {
            let c = &r.counts;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.scheme,
                r.topology,
                r.k,
                r.radius,
                r.trial,
                c.recoverable,
                c.recovered(),
                c.locally_recovered,
                c.escalated,
                c.spliced_ok,
                c.unspliceable,
                opt(r.recovery_ratio),
                opt(r.controller_overhead),
                r.ml,
                opt(r.stretch_quantile(0.5)),
                opt(r.stretch_quantile(0.9)),
            );
        }
        out
    }

    pub fn failure_log(&self) -> String {
        let mut out = format!("# seed = {}\n", self.seed);
        out += &crate::failure::emit_failure_log(&self.failures);
        out
    }

    /// Per (scheme, k, point) aggregates pooled over topologies, in first-seen order.
    pub fn summaries(&self) -> Vec<PointSummary> {
        let mut order: Vec<(Scheme, usize, usize)> = Vec::new();
        let mut groups: HashMap<(Scheme, usize, usize), Vec<&TrialRow>> = HashMap::new();
        for r in &self.rows {
            let key = (r.scheme, r.k, r.point);
            groups.entry(key).or_insert_with(|| {
                order.push(key);
                Vec::new()
            });
            groups.get_mut(&key).expect("inserted").push(r);
        }
        order
            .into_iter()
            .map(|key| {
                let rows = &groups[&key];
                PointSummary {
                    scheme: key.0,
                    k: key.1,
                    point: key.2,
                    trials: rows.len(),
                    mean_recovery_ratio: mean(rows.iter().filter_map(|r| r.recovery_ratio)),
                    mean_controller_overhead: mean(rows.iter().filter_map(|r| r.controller_overhead)),
                    mean_ml: mean(rows.iter().map(|r| r.ml as f64)).unwrap_or(0.0),
                    stretch: rows.iter().flat_map(|r| r.stretch.iter().copied()).collect(),
                }
            })
            .collect()
    }

    pub fn summary(&self, scheme: Scheme, k: usize, point: usize) -> Option<PointSummary> {
        self.summaries().into_iter().find(|s| s.scheme == scheme && s.k == k && s.point == point)
    }
}

/// Named topologies for a configuration.
pub fn load_topologies(cfg: &ExperimentConfig) -> Result<Vec<(String, Arc<NetworkGraph>)>, ConfigError> {
    match &cfg.topology {
        TopologySource::File(path) => {
            let g = load_topology(std::fs::File::open(path)?)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(vec![(name, Arc::new(g))])
        }
        TopologySource::Random { nodes, links, width, height, seeds } => {
            let area = DeploymentArea::new(*width, *height)?;
            seeds
                .iter()
                .map(|&seed| {
                    let g = generate_random_planar(*nodes, *links, area, seed)?;
                    Ok((format!("random{nodes}-{links}-s{seed}"), Arc::new(g)))
                })
                .collect()
        }
    }
}

/// Failures in log order for every topology, sweep point and trial.
pub fn sample_failures(cfg: &ExperimentConfig, areas: &[DeploymentArea]) -> Result<Vec<RegionalFailure>, ConfigError> {
    let dists: Vec<RadiusDistribution> = match &cfg.radius {
        FailureRadius::Fixed(r) => r.iter().map(|&x| RadiusDistribution::fixed(x)).collect::<Result<_, _>>()?,
        FailureRadius::Distribution(d) => vec![*d],
    };
    let mut out = Vec::with_capacity(areas.len() * dists.len() * cfg.trials);
    for (ti, area) in areas.iter().enumerate() {
        for dist in &dists {
            for trial in 0..cfg.trials {
                // the same centre per trial across sweep points keeps radii paired
                let mut rng = ChaCha8Rng::seed_from_u64(mix(&[cfg.seed, ti as u64, trial as u64]));
                out.push(sample_failure(dist, *area, &mut rng));
            }
        }
    }
    Ok(out)
}

/// Runs the configured sweep with freshly sampled failures.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<MetricsReport, ConfigError> {
    cfg.validate()?;
    let topologies = load_topologies(cfg)?;
    let areas: Vec<DeploymentArea> = topologies.iter().map(|(_, g)| g.area()).collect();
    let failures = sample_failures(cfg, &areas)?;
    run_with_failures(cfg, &topologies, failures)
}

/// Re-runs a sweep from a recorded failure log.
pub fn replay(cfg: &ExperimentConfig, log: &str) -> Result<MetricsReport, ConfigError> {
    cfg.validate()?;
    let failures = parse_failure_log(log).map_err(|(line, message)| ConfigError::Parse { line, message })?;
    let topologies = load_topologies(cfg)?;
    let needed = topologies.len() * cfg.points() * cfg.trials;
    if failures.len() < needed {
        return Err(ConfigError::ShortReplayLog(failures.len()));
    }
    run_with_failures(cfg, &topologies, failures)
}

fn run_with_failures(
    cfg: &ExperimentConfig,
    topologies: &[(String, Arc<NetworkGraph>)],
    failures: Vec<RegionalFailure>,
) -> Result<MetricsReport, ConfigError> {
    let points = cfg.points();
    let per_topology = points * cfg.trials;
    let mut rows = Vec::new();
    for &scheme in &cfg.schemes {
        for &k in &cfg.k {
            for (ti, (name, g)) in topologies.iter().enumerate() {
                let bts = generate_backup_topologies(g.clone(), k)?;
                let ctx = SchemeContext::new(scheme, &bts, cfg.r_a, cfg.r_b, mix(&[cfg.seed, ti as u64, k as u64]))?;
                let scenarios: Vec<(usize, usize)> =
                    (0..points).flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
                let mut batch: Vec<TrialRow> = scenarios
                    .par_iter()
                    .map(|&(point, trial)| {
                        let f = &failures[ti * per_topology + point * cfg.trials + trial];
                        let sg = apply_failure(g, f);
                        let res = run_scenario(&ctx, &sg, cfg.splice, mix(&[cfg.seed, ti as u64, point as u64, trial as u64]));
                        TrialRow {
                            scheme,
                            topology: name.clone(),
                            k,
                            point,
                            radius: f.radius(),
                            trial,
                            recovery_ratio: recovery_ratio(&res.counts).ok(),
                            controller_overhead: scheme
                                .has_controller()
                                .then(|| controller_overhead(&res.counts).ok())
                                .flatten(),
                            counts: res.counts,
                            ml: res.ml,
                            stretch: res.stretch,
                        }
                    })
                    .collect();
                rows.append(&mut batch);
            }
        }
    }
    Ok(MetricsReport { seed: cfg.seed, rows, failures })
}

/// One scenario on a given network, for inspection.
pub fn simulate_scenario(
    bts: &BackupTopologySet,
    scheme: Scheme,
    failure: &RegionalFailure,
    r_a: f64,
    r_b: f64,
    mode: SpliceMode,
) -> Result<(SurvivingGraph, ScenarioResult), ConfigError> {
    let ctx = SchemeContext::new(scheme, bts, r_a, r_b, 0)?;
    let sg = apply_failure(bts.base(), failure);
    let res = run_scenario(&ctx, &sg, mode, 0);
    Ok((sg, res))
}
