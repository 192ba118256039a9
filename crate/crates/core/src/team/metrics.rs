use serde::{Deserialize, Serialize};

use super::TeamTrace;
use crate::policy::Variant;

/// Running maximum of the feasible team-best SWR, zero before the first
/// feasible design.
pub fn cumulative_best_rswr(trace: &TeamTrace) -> Vec<f64> {
    let mut best = 0.0_f64;
    trace
        .team_best
        .iter()
        .map(|e| {
            if let Some(r) = e.rswr() {
                best = best.max(r);
            }
            best
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    /// Sample standard deviation over sqrt(n); zero when n < 2.
    pub stderr: f64,
}

impl MeanStderr {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        if values.iter().all(|v| *v == values[0]) {
            return Self { mean: values[0], stderr: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self { mean, stderr: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self { mean, stderr: (var / n as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub scenario: String,
    pub teams: usize,
    pub iteration_budget: usize,
    /// Per iteration, across teams; runs that ended early carry their last
    /// value forward.
    pub cumulative_best_rswr: Vec<MeanStderr>,
    pub final_best_rswr: MeanStderr,
    pub max_fos: MeanStderr,
    pub max_rswr: MeanStderr,
    /// Per team: mean final FOS over its agents.
    pub final_fos: MeanStderr,
    /// Per team: steps summed over its agents.
    pub total_steps: MeanStderr,
    pub feasible_teams: usize,
}

fn carried(series: &[f64], len: usize) -> Vec<f64> {
    let last = series.last().copied().unwrap_or(0.0);
    (0..len).map(|i| series.get(i).copied().unwrap_or(last)).collect()
}

/// Mean and standard error across teams. All traces should share a variant
/// and scenario; the first trace names them.
pub fn aggregate(traces: &[TeamTrace]) -> Option<VariantReport> {
    let first = traces.first()?;
    let budget = traces.iter().map(|t| t.iteration_budget).max().unwrap_or(0);
    let series: Vec<Vec<f64>> = traces.iter().map(|t| carried(&cumulative_best_rswr(t), budget)).collect();
    let per_iteration = (0..budget)
        .map(|i| MeanStderr::of(&series.iter().map(|s| s[i]).collect::<Vec<_>>()))
        .collect();
    let collect = |f: &dyn Fn(&TeamTrace) -> f64| MeanStderr::of(&traces.iter().map(f).collect::<Vec<_>>());

    let max_fos = |t: &TeamTrace| {
        t.records
            .iter()
            .filter_map(|r| match r {
                super::TraceRecord::Init { eval, .. } => Some(eval.fos),
                _ => r.step_eval().map(|e| e.fos),
            })
            .fold(0.0, f64::max)
    };
    let max_rswr = |t: &TeamTrace| cumulative_best_rswr(t).last().copied().unwrap_or(0.0);
    let final_fos = |t: &TeamTrace| t.final_evals.iter().map(|e| e.fos).sum::<f64>() / t.agents() as f64;

    Some(VariantReport {
        variant: first.variant,
        scenario: first.scenario.clone(),
        teams: traces.len(),
        iteration_budget: budget,
        cumulative_best_rswr: per_iteration,
        final_best_rswr: MeanStderr::of(&series.iter().map(|s| s.last().copied().unwrap_or(0.0)).collect::<Vec<_>>()),
        max_fos: collect(&max_fos),
        max_rswr: collect(&max_rswr),
        final_fos: collect(&final_fos),
        total_steps: collect(&|t| t.total_steps() as f64),
        feasible_teams: traces.iter().filter(|t| max_rswr(t) > 0.0).count(),
    })
}
