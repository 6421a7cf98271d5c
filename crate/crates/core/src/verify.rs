//! Property sweeps backing the `verify` command.
//!
//! Each suite is deterministic for a given seed. The quantum sweeps take the
//! information measure as a parameter so that a deliberately broken measure
//! can be checked to fail.

use rayon::prelude::*;
use serde::Serialize;

use crate::boxes::Correlators;
use crate::infotheory::quadratic_entropy_gap;
use crate::protocol::{analytic_profile, exhaustive_pk};
use crate::quantum::{
    self, chain_rule_residual, classical_forwarding, data_processing_check, ic_certificate, quantum_van_dam,
    random_density_matrix, random_density_matrix_with_rank, singlet_box, DensityMatrix, QuantumChannel,
};
use crate::{seed, Result, TSIRELSON_E};

pub const SSA_TOL: f64 = 1e-9;
pub const CHAIN_TOL: f64 = 1e-10;
pub const DPI_TOL: f64 = 1e-9;
pub const PK_TOL: f64 = 1e-12;
pub const CHSH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Worst observed value of the suite's figure of merit.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub states: usize,
    pub channels: usize,
    pub gap_step: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0x1c_b0c5,
            states: 1000,
            channels: 500,
            gap_step: 1e-3,
        }
    }
}

/// Random 2x2x2 state. The rank cycles through 1..=8, and every tenth state
/// is a product state, where `I(A:B|C)` vanishes exactly.
fn tripartite(master: u64, i: usize) -> Result<DensityMatrix> {
    let mut rng = seed::stream(seed::derive(master, &[i as u64]), 0);
    if i % 10 == 9 {
        let a = random_density_matrix(&[2], &mut rng)?;
        let b = random_density_matrix(&[2], &mut rng)?;
        let c = random_density_matrix(&[2], &mut rng)?;
        return a.tensor(&b)?.tensor(&c);
    }
    random_density_matrix_with_rank(&[2, 2, 2], 1 + i % 8, &mut rng)
}

/// `I(A:B|C) ≥ -1e-9` over random 2x2x2 states, with the conditional
/// information supplied by `measure`.
pub fn strong_subadditivity_with<F>(samples: usize, master: u64, measure: F) -> Result<SuiteResult>
where
    F: Fn(&DensityMatrix) -> Result<f64> + Sync,
{
    let values = (0..samples)
        .into_par_iter()
        .map(|i| measure(&tripartite(master, i)?))
        .collect::<Result<Vec<f64>>>()?;
    let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SuiteResult {
        name: "strong_subadditivity",
        passed: worst >= -SSA_TOL,
        cases: samples,
        worst,
        detail: format!("min I(A:B|C) = {worst:.3e} over {samples} random states"),
    })
}

pub fn strong_subadditivity(samples: usize, master: u64) -> Result<SuiteResult> {
    strong_subadditivity_with(samples, master, |rho| quantum::cond_qmi(rho, &[0], &[1], &[2]))
}

pub fn chain_rule(samples: usize, master: u64) -> Result<SuiteResult> {
    let values = (0..samples)
        .into_par_iter()
        .map(|i| Ok(chain_rule_residual(&tripartite(master, i)?, &[0], &[1], &[2])?.max()))
        .collect::<Result<Vec<f64>>>()?;
    let worst = values.iter().copied().fold(0.0, f64::max);
    Ok(SuiteResult {
        name: "chain_rule",
        passed: worst <= CHAIN_TOL,
        cases: samples,
        worst,
        detail: format!("max residual = {worst:.3e} over {samples} random states"),
    })
}

/// `I(A:B') ≤ I(A:B) + 1e-9` for random 2x2 states and random channels on
/// `B` with environments of dimension 1 to 4.
pub fn data_processing(samples: usize, master: u64) -> Result<SuiteResult> {
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(seed::derive(master, &[u64::MAX, i as u64]), 0);
            let rho = random_density_matrix(&[2, 2], &mut rng)?;
            let channel = QuantumChannel::random_stinespring(2, 2, 1 + i % 4, &mut rng)?;
            let (before, after) = data_processing_check(&rho, &channel, 1)?;
            Ok(after - before)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SuiteResult {
        name: "data_processing",
        passed: worst <= DPI_TOL,
        cases: samples,
        worst,
        detail: format!("max increase I(A:B') - I(A:B) = {worst:.3e} over {samples} channels"),
    })
}

/// `1 - h((1+y)/2) ≥ y²/(2 ln 2)` on a grid of `[0, 1]`.
pub fn entropy_gap(step: f64) -> Result<SuiteResult> {
    let points = (1.0 / step).round() as usize;
    let mut worst = f64::INFINITY;
    for i in 0..=points {
        worst = worst.min(quadratic_entropy_gap((i as f64 * step).min(1.0))?);
    }
    Ok(SuiteResult {
        name: "entropy_gap",
        passed: worst >= -1e-12,
        cases: points + 1,
        worst,
        detail: format!("min gap = {worst:.3e}"),
    })
}

/// Analytic against exhaustive `P_K` on `{0, ¼, ½, ¾, 1}²` for `n ≤ 3`.
pub fn pk_agreement() -> Result<SuiteResult> {
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &e_i in &grid {
        for &e_ii in &grid {
            let c = Correlators::from_effective(e_i, e_ii)?;
            for levels in 1..=3 {
                let ex = exhaustive_pk(&c, levels)?;
                let an = analytic_profile(e_i, e_ii, levels)?;
                for (a, b) in ex.probabilities().iter().zip(an.probabilities()) {
                    worst = worst.max((a - b).abs());
                    cases += 1;
                }
            }
        }
    }
    Ok(SuiteResult {
        name: "pk_agreement",
        passed: worst <= PK_TOL,
        cases,
        worst,
        detail: format!("max |analytic - exhaustive| = {worst:.3e}"),
    })
}

/// The quantum one-bit strategy stays within `I(ā : x, B) ≤ 1`; classical
/// forwarding sits exactly on the boundary.
pub fn ic_certificates() -> Result<SuiteResult> {
    let quantum = ic_certificate(&quantum_van_dam().cq_state()?, 1)?;
    let classical = ic_certificate(&classical_forwarding().cq_state()?, 1)?;
    let boundary = (classical.i_total - 1.0).abs();
    Ok(SuiteResult {
        name: "ic_certificate",
        passed: quantum.satisfied && boundary <= 1e-9 && quantum.i_data_bob.abs() <= 1e-9,
        cases: 2,
        worst: quantum.i_total,
        detail: format!(
            "quantum I(a:x,B) = {:.12}, classical forwarding = {:.12}",
            quantum.i_total, classical.i_total
        ),
    })
}

/// Born-rule singlet statistics reach the Tsirelson value.
pub fn singlet_chsh() -> Result<SuiteResult> {
    let c = singlet_box();
    let s = c.chsh_value();
    let worst = c
        .as_array()
        .iter()
        .map(|v| (v - TSIRELSON_E).abs())
        .fold((s - (2.0 + 2f64.sqrt())).abs(), f64::max);
    Ok(SuiteResult {
        name: "singlet_chsh",
        passed: worst <= CHSH_TOL,
        cases: 1,
        worst,
        detail: format!("S = {s:.12}"),
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        strong_subadditivity(cfg.states, cfg.seed)?,
        chain_rule(cfg.states, cfg.seed)?,
        data_processing(cfg.channels, cfg.seed)?,
        entropy_gap(cfg.gap_step)?,
        pk_agreement()?,
        ic_certificates()?,
        singlet_chsh()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_suites_pass() {
        let cfg = VerifyConfig {
            states: 100,
            channels: 50,
            ..VerifyConfig::default()
        };
        for r in run_all(&cfg).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn sign_flipped_measure_is_caught() {
        let flipped = |rho: &DensityMatrix| Ok(-quantum::cond_qmi(rho, &[0], &[1], &[2])?);
        let r = strong_subadditivity_with(50, 3, flipped).unwrap();
        assert!(!r.passed);
    }
}
