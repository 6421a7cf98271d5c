//! Seeded Monte Carlo estimation of `P_K` and of the information gain `I`.
//!
//! For each requested index `K` every trial draws a fresh uniform data string,
//! builds a fresh pyramid and fixes Bob's index to `K`. Trial `t` of index `K`
//! uses the key `derive(seed, [K, t])`, so results do not depend on how the
//! trials are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::Correlators;
use crate::infotheory::{ic_from_counts, information_per_bit, GuessProfile, Provenance};
use crate::protocol::{analytic_pk, run_protocol, DataString};
use crate::quantum::singlet_box;
use crate::{seed, Error, Result};

/// Cap on `2^n · trials_per_index · |K|`.
pub const MAX_WORK: u64 = 1 << 33;

pub const MAX_LEVELS: usize = 20;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Largest |z| accepted by [`compare`].
pub const Z_LIMIT: f64 = 4.0;

/// Allowed deviation of the empirical `I`, per estimated index.
pub const I_TOLERANCE_PER_INDEX: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BoxSource {
    Correlators {
        correlators: Correlators,
    },
    /// The singlet measured at CHSH-optimal settings.
    Singlet,
}

impl BoxSource {
    pub fn correlators(&self) -> Correlators {
        match self {
            BoxSource::Correlators { correlators } => *correlators,
            BoxSource::Singlet => singlet_box(),
        }
    }
}

impl From<Correlators> for BoxSource {
    fn from(correlators: Correlators) -> Self {
        BoxSource::Correlators { correlators }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub source: BoxSource,
    pub levels: usize,
    pub trials_per_index: u64,
    pub seed: u64,
    /// Indices to estimate; all `2^n` when `None`.
    pub indices: Option<Vec<usize>>,
}

impl TrialPlan {
    pub fn new(source: impl Into<BoxSource>, levels: usize, trials_per_index: u64, seed: u64) -> Self {
        Self {
            source: source.into(),
            levels,
            trials_per_index,
            seed,
            indices: None,
        }
    }

    pub fn with_indices(mut self, indices: Vec<usize>) -> Self {
        self.indices = Some(indices);
        self
    }

    fn resolved_indices(&self) -> Result<Vec<usize>> {
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return Err(Error::InvalidPlan(format!(
                "levels must be in 1..={MAX_LEVELS}, got {}",
                self.levels
            )));
        }
        if self.trials_per_index == 0 {
            return Err(Error::InvalidPlan("trials_per_index must be at least 1".into()));
        }
        let n = 1usize << self.levels;
        let indices = match &self.indices {
            None => (0..n).collect(),
            Some(list) => {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.is_empty() || sorted.len() != list.len() {
                    return Err(Error::InvalidPlan("index set must be non-empty without repeats".into()));
                }
                if let Some(&bad) = sorted.iter().find(|&&k| k >= n) {
                    return Err(Error::IndexOutOfRange { index: bad, len: n });
                }
                list.clone()
            }
        };
        let work = (n as u64)
            .saturating_mul(self.trials_per_index)
            .saturating_mul(indices.len() as u64);
        if work > MAX_WORK {
            return Err(Error::TooLarge {
                what: "simulation work 2^n·trials·|K|",
                value: usize::try_from(work).unwrap_or(usize::MAX),
                max: MAX_WORK as usize,
            });
        }
        Ok(indices)
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Binomial z-score of `p_hat` against `p`; infinite when `p` is degenerate
/// and the estimate disagrees with it.
pub fn z_score(p_hat: f64, p: f64, trials: u64) -> f64 {
    let var = p * (1.0 - p) / trials as f64;
    if var > 0.0 {
        (p_hat - p) / var.sqrt()
    } else if (p_hat - p).abs() <= 1e-15 {
        0.0
    } else {
        f64::INFINITY.copysign(p_hat - p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub index: usize,
    pub trials: u64,
    pub successes: u64,
    /// `counts[a_K][β]`.
    pub counts: [[u64; 2]; 2],
    pub p_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub analytic: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub plan: TrialPlan,
    /// Correlators the trials were run with.
    pub correlators: Correlators,
    /// Effective correlations the analytic references were computed from.
    pub reference: (f64, f64),
    pub per_index: Vec<IndexEstimate>,
    /// Plug-in `Σ_K I(a_K : β | b = K)` over the estimated indices.
    pub empirical_i: f64,
    /// `Σ_K [1 - h(P_K)]` over the estimated indices; equal to the exact `I`
    /// for the pyramid because each `β` is a binary symmetric channel output.
    pub exact_i: f64,
}

impl EstimateReport {
    /// Recomputes the analytic references and z-scores against other
    /// effective correlations, keeping the counts.
    pub fn rereference(&self, e_i: f64, e_ii: f64) -> Self {
        let mut out = self.clone();
        out.reference = (e_i, e_ii);
        for est in &mut out.per_index {
            est.analytic = analytic_pk(e_i, e_ii, self.plan.levels, est.index);
            est.z = z_score(est.p_hat, est.analytic, est.trials);
        }
        out.exact_i = exact_i(e_i, e_ii, self.plan.levels, out.per_index.iter().map(|e| e.index));
        out
    }

    /// Empirical profile; available when every index was estimated.
    pub fn profile(&self) -> Option<GuessProfile> {
        let n = 1usize << self.plan.levels;
        if self.per_index.len() != n || self.per_index.iter().enumerate().any(|(i, e)| e.index != i) {
            return None;
        }
        GuessProfile::new(
            self.plan.levels,
            self.per_index.iter().map(|e| e.p_hat).collect(),
            Provenance::Empirical {
                trials_per_index: self.plan.trials_per_index,
                intervals: self.per_index.iter().map(|e| (e.wilson_low, e.wilson_high)).collect(),
            },
        )
        .ok()
    }

    pub fn max_abs_z(&self) -> f64 {
        self.per_index.iter().map(|e| e.z.abs()).fold(0.0, f64::max)
    }
}

fn exact_i(e_i: f64, e_ii: f64, levels: usize, indices: impl Iterator<Item = usize>) -> f64 {
    indices
        .map(|k| {
            let r = k.count_ones() as i32;
            information_per_bit(e_i.powi(levels as i32 - r) * e_ii.powi(r))
        })
        .sum()
}

fn run_index(c: Correlators, levels: usize, index: usize, trials: u64, master: u64) -> Result<[[u64; 2]; 2]> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let key = seed::derive(master, &[index as u64, t]);
            let data = DataString::random(levels, &mut seed::stream(key, seed::DATA_STREAM))?;
            let tr = run_protocol(&data, index, c, key)?;
            let mut counts = [[0u64; 2]; 2];
            counts[usize::from(tr.target_bit)][usize::from(tr.guess)] = 1;
            Ok(counts)
        })
        .try_reduce(
            || [[0u64; 2]; 2],
            |a, b| {
                Ok([
                    [a[0][0] + b[0][0], a[0][1] + b[0][1]],
                    [a[1][0] + b[1][0], a[1][1] + b[1][1]],
                ])
            },
        )
}

pub fn estimate(plan: &TrialPlan) -> Result<EstimateReport> {
    let indices = plan.resolved_indices()?;
    let c = plan.source.correlators();
    let (e_i, e_ii) = c.effective_correlations();
    let mut per_index = Vec::with_capacity(indices.len());
    for &index in &indices {
        let counts = run_index(c, plan.levels, index, plan.trials_per_index, plan.seed)?;
        let successes = counts[0][0] + counts[1][1];
        let trials = plan.trials_per_index;
        let p_hat = successes as f64 / trials as f64;
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, Z_95);
        let analytic = analytic_pk(e_i, e_ii, plan.levels, index);
        per_index.push(IndexEstimate {
            index,
            trials,
            successes,
            counts,
            p_hat,
            wilson_low,
            wilson_high,
            analytic,
            z: z_score(p_hat, analytic, trials),
        });
    }
    let counts: Vec<_> = per_index.iter().map(|e| e.counts).collect();
    Ok(EstimateReport {
        plan: plan.clone(),
        correlators: c,
        reference: (e_i, e_ii),
        empirical_i: ic_from_counts(&counts)?,
        exact_i: exact_i(e_i, e_ii, plan.levels, indices.iter().copied()),
        per_index,
    })
}

/// Machine-readable outcome of [`compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub max_abs_z: f64,
    pub i_deviation: f64,
    pub i_tolerance: f64,
    pub failures: Vec<String>,
}

// negated comparisons so that NaN fails
#[allow(clippy::neg_cmp_op_on_partial_ord)]
/// Passes iff the counts are self-consistent, every `|z| ≤ 4` and the
/// empirical `I` lies within `0.05` per index of the exact value.
pub fn compare(report: &EstimateReport) -> Verdict {
    let mut failures = Vec::new();
    for e in &report.per_index {
        let total: u64 = e.counts.iter().flatten().sum();
        let successes = e.counts[0][0] + e.counts[1][1];
        if total != e.trials || successes != e.successes || e.successes > e.trials {
            failures.push(format!(
                "index {}: counts inconsistent with {} trials",
                e.index, e.trials
            ));
            continue;
        }
        if (e.p_hat - e.successes as f64 / e.trials as f64).abs() > 1e-12
            || !(e.wilson_low <= e.p_hat && e.p_hat <= e.wilson_high)
        {
            failures.push(format!("index {}: estimate inconsistent with counts", e.index));
        }
        if !(e.z.abs() <= Z_LIMIT) {
            failures.push(format!(
                "index {}: p_hat {} vs analytic {} (z = {:.2})",
                e.index, e.p_hat, e.analytic, e.z
            ));
        }
    }
    let counts: Vec<_> = report.per_index.iter().map(|e| e.counts).collect();
    let recomputed = ic_from_counts(&counts).unwrap_or(f64::NAN);
    if !((recomputed - report.empirical_i).abs() <= 1e-9) {
        failures.push("empirical I inconsistent with counts".into());
    }
    let i_tolerance = I_TOLERANCE_PER_INDEX * report.per_index.len() as f64;
    let i_deviation = (report.empirical_i - report.exact_i).abs();
    if !(i_deviation <= i_tolerance) {
        failures.push(format!(
            "empirical I {} vs exact {} (tolerance {i_tolerance})",
            report.empirical_i, report.exact_i
        ));
    }
    Verdict {
        pass: failures.is_empty(),
        max_abs_z: report.max_abs_z(),
        i_deviation,
        i_tolerance,
        failures,
    }
}
