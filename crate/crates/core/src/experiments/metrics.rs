//! Per-trial recovery metrics.

use crate::controller::SpliceRecord;
use crate::dataplane::{Classification, FlowOutcome};
use crate::error::UndefinedRatio;
use crate::failure::SurvivingGraph;

/// Raw outcome counts of one trial.
///
/// A reconnection request is a recoverable flow whose primary route failed;
/// it is either recovered locally or escalated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialCounts {
    /// Flows with both endpoints alive and connected.
    pub recoverable: usize,
    pub locally_recovered: usize,
    pub escalated: usize,
    pub spliced_ok: usize,
    pub unspliceable: usize,
}

impl TrialCounts {
    /// Counts data-plane outcomes and the controller's decisions on the escalations.
    pub fn tally(outcomes: &[FlowOutcome], splices: &[SpliceRecord]) -> Self {
        let mut c = Self::default();
        for o in outcomes {
            match o.classification {
                Classification::NonRecoverable => continue,
                Classification::DeliveredLocal(_) => c.locally_recovered += 1,
                Classification::Escalated { .. } => c.escalated += 1,
                Classification::DeliveredPrimary | Classification::DeliveredSpliced => {}
            }
            c.recoverable += 1;
        }
        for s in splices {
            if s.result.is_ok() {
                c.spliced_ok += 1;
            } else {
                c.unspliceable += 1;
            }
        }
        c
    }

    pub fn requests(&self) -> usize {
        self.locally_recovered + self.escalated
    }

    pub fn recovered(&self) -> usize {
        self.locally_recovered + self.spliced_ok
    }
}

/// Recovered requests over reconnection requests; 1 when no recoverable flow lost its primary route.
pub fn recovery_ratio(c: &TrialCounts) -> Result<f64, UndefinedRatio> {
    if c.recoverable == 0 {
        return Err(UndefinedRatio);
    }
    if c.requests() == 0 {
        return Ok(1.0);
    }
    Ok(c.recovered() as f64 / c.requests() as f64)
}

/// Share of reconnection requests escalated to the controller.
pub fn controller_overhead(c: &TrialCounts) -> Result<f64, UndefinedRatio> {
    if c.requests() == 0 {
        return Err(UndefinedRatio);
    }
    Ok(c.escalated as f64 / c.requests() as f64)
}

/// Delivered route weight over the post-failure shortest route weight; `None` unless delivered.
pub fn path_stretch(outcome: &FlowOutcome, sg: &SurvivingGraph) -> Option<f64> {
    if !outcome.classification.is_delivered() {
        return None;
    }
    let g = sg.graph();
    let walked = g.path_weight(&outcome.path)?;
    let (s, t) = (g.idx(outcome.source).ok()?, g.idx(outcome.dest).ok()?);
    let best = sg.tree_toward(t).distance(s)?;
    Some(if best > 0.0 { walked / best } else { 1.0 })
}

/// Nearest-rank quantile of `samples`, sorting them in place.
pub fn quantile(samples: &mut [f64], q: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_by(f64::total_cmp);
    let rank = ((q * samples.len() as f64).ceil() as usize).clamp(1, samples.len());
    Some(samples[rank - 1])
}

/// Fraction of samples at or below `x`.
pub fn empirical_cdf(samples: &[f64], x: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    Some(samples.iter().filter(|&&v| v <= x).count() as f64 / samples.len() as f64)
}
