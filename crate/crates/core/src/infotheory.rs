//! Classical entropies, the information gain `I` and its bounds.
//!
//! All quantities are in bits. `0·log 0` is taken as `0`, and probabilities
//! within `1e-12` of the unit interval are clamped before any logarithm.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const PROB_TOL: f64 = 1e-12;

/// Largest `n` searched by [`violation_witness`].
pub const WITNESS_MAX_LEVELS: usize = 64;

const BISECTION_CAP: usize = 200;

fn clamp_probability(x: f64) -> Result<f64> {
    if !(x.is_finite() && (-PROB_TOL..=1.0 + PROB_TOL).contains(&x)) {
        return Err(Error::InvalidDistribution(format!("probability {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

#[inline]
fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// `h(x) = -x log₂ x - (1-x) log₂(1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = clamp_probability(x)?;
    Ok(-plogp(x) - plogp(1.0 - x))
}

/// Shannon entropy of a distribution, in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| plogp(x)).sum::<f64>()
}

/// `1 - h((1 + y)/2) = [(1+y)ln(1+y) + (1-y)ln(1-y)] / (2 ln 2)`, evaluated
/// as [`quadratic_term`] plus a non-negative remainder so that no cancellation
/// occurs for small `|y|`.
pub fn information_per_bit(y: f64) -> f64 {
    let y = y.abs().min(1.0);
    if y >= 1.0 {
        return 1.0;
    }
    quadratic_term(y) + quartic_remainder(y)
}

/// `y² / (2 ln 2)`, the leading term of [`information_per_bit`].
pub fn quadratic_term(y: f64) -> f64 {
    y * y / (2.0 * LN_2)
}

/// `Σ_{k≥2} y^{2k} / (2k(2k-1) ln 2)`.
fn quartic_remainder(y: f64) -> f64 {
    if y < 0.5 {
        let t = y * y;
        let (mut power, mut sum) = (t * t, 0.0);
        for k in 2..64 {
            let k = k as f64;
            let add = power / (2.0 * k * (2.0 * k - 1.0));
            sum += add;
            if add <= sum * f64::EPSILON * 0.25 {
                break;
            }
            power *= t;
        }
        sum / LN_2
    } else {
        let direct = ((1.0 + y) * y.ln_1p() + (1.0 - y) * (-y).ln_1p()) / (2.0 * LN_2);
        (direct - quadratic_term(y)).max(0.0)
    }
}

/// Mutual information `I(X:Y) = H(X) + H(Y) - H(XY)` of a joint table
/// (rows index `X`, columns `Y`).
pub fn mutual_information<R: AsRef<[f64]>>(joint: &[R]) -> Result<f64> {
    let cols = joint.first().map(|r| r.as_ref().len()).unwrap_or(0);
    if cols == 0 {
        return Err(Error::InvalidDistribution("empty table".into()));
    }
    let mut px = Vec::with_capacity(joint.len());
    let mut py = vec![0.0; cols];
    let mut total = 0.0;
    let mut h_xy = 0.0;
    for row in joint {
        let row = row.as_ref();
        if row.len() != cols {
            return Err(Error::InvalidDistribution("ragged table".into()));
        }
        let mut row_sum = 0.0;
        for (j, &p) in row.iter().enumerate() {
            if !(p.is_finite() && p >= -PROB_TOL) {
                return Err(Error::InvalidDistribution(format!("negative entry {p}")));
            }
            let p = p.max(0.0);
            row_sum += p;
            py[j] += p;
            h_xy -= plogp(p);
        }
        total += row_sum;
        px.push(row_sum);
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok((shannon_entropy(&px) + shannon_entropy(&py) - h_xy).max(0.0))
}

/// Where the success probabilities of a [`GuessProfile`] came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Analytic,
    Exhaustive,
    Empirical {
        trials_per_index: u64,
        /// Wilson 95% interval per index.
        intervals: Vec<(f64, f64)>,
    },
}

/// Bob's per-index success probabilities `P_0 .. P_{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessProfile {
    levels: usize,
    p: Vec<f64>,
    provenance: Provenance,
}

impl GuessProfile {
    pub fn new(levels: usize, p: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if levels >= usize::BITS as usize || p.len() != 1usize << levels {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {levels} levels",
                p.len()
            )));
        }
        let p = p.into_iter().map(clamp_probability).collect::<Result<Vec<_>>>()?;
        Ok(Self { levels, p, provenance })
    }

    /// Constant profile over `2^levels` indices.
    pub fn uniform(levels: usize, p: f64) -> Result<Self> {
        Self::new(levels, vec![p; 1 << levels], Provenance::Analytic)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// `N - Σ_K h(P_K)`, a lower bound on `I` for unbiased independent data.
pub fn ic_lower_bound(gp: &GuessProfile) -> f64 {
    let n = gp.len() as f64;
    let sum: f64 = gp.p.iter().map(|&p| -plogp(p) - plogp(1.0 - p)).sum();
    n - sum
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(C(n,k), E_I^{n-k} E_II^k)` for `k = 0..=n`.
fn pyramid_terms(e_i: f64, e_ii: f64, levels: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..=levels).map(move |k| {
        let y = e_i.powi((levels - k) as i32) * e_ii.powi(k as i32);
        (binomial(levels, k), y)
    })
}

/// Closed form of [`ic_lower_bound`] for the pyramid protocol:
/// `Σ_k C(n,k) [1 - h((1 + E_I^{n-k} E_II^k)/2)]`.
pub fn ic_lower_bound_closed(e_i: f64, e_ii: f64, levels: usize) -> f64 {
    pyramid_terms(e_i, e_ii, levels)
        .map(|(w, y)| w * information_per_bit(y))
        .sum()
}

/// Plug-in estimate of `I = Σ_K I(a_K : β | b = K)` from per-index
/// contingency counts `counts[K][a_K][β]`.
pub fn ic_from_counts(counts: &[[[u64; 2]; 2]]) -> Result<f64> {
    let mut total = 0.0;
    for (k, table) in counts.iter().enumerate() {
        let n: u64 = table.iter().flatten().sum();
        if n == 0 {
            return Err(Error::InvalidDistribution(format!("no samples for index {k}")));
        }
        let joint = table.map(|row| row.map(|c| c as f64 / n as f64));
        total += mutual_information(&joint)?;
    }
    Ok(total)
}

/// Fano-type bound for `d`-ary data:
/// `N log₂ d - Σ h(P_K) - Σ (1 - P_K) log₂(d - 1)`.
pub fn fano_bound(gp: &GuessProfile, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::AlphabetTooSmall(d));
    }
    let n = gp.len() as f64;
    let log_d = (d as f64).log2();
    let log_rest = ((d - 1) as f64).log2();
    let sum: f64 =
        gp.p.iter()
            .map(|&p| -plogp(p) - plogp(1.0 - p) + (1.0 - p) * log_rest)
            .sum();
    Ok(n * log_d - sum)
}

/// Lower bound `(E_I² + E_II²)^n / (2 ln 2)` on the pyramid's `I`.
///
/// Summed over the same binomial terms as [`ic_lower_bound_closed`], so the
/// bound also holds after rounding.
pub fn chain_bound(e_i: f64, e_ii: f64, levels: usize) -> f64 {
    pyramid_terms(e_i, e_ii, levels)
        .map(|(w, y)| w * quadratic_term(y))
        .sum()
}

/// `[1 - h((1+y)/2)] - y²/(2 ln 2)`, non-negative on `[0, 1]`.
pub fn quadratic_entropy_gap(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfRange {
            name: "y",
            value: y,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(1.0 - binary_entropy((1.0 + y) / 2.0)? - y * y / (2.0 * LN_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub violates: bool,
    /// Smallest `n` at which `I_lb(n) > 1`.
    pub n_star: Option<usize>,
}

/// Decides whether boxes with effective correlations `(E_I, E_II)` violate
/// `I ≤ 1` at some pyramid depth, which happens iff `E_I² + E_II² > 1`
/// (decided with a `1e-12` margin).
pub fn violation_witness(e_i: f64, e_ii: f64) -> Result<Witness> {
    for (name, v) in [("E_I", e_i), ("E_II", e_ii)] {
        if !(v.is_finite() && v.abs() <= 1.0 + PROB_TOL) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                min: -1.0,
                max: 1.0,
            });
        }
    }
    // the Tsirelson point rounds to 1 + 2^-52
    if e_i * e_i + e_ii * e_ii <= 1.0 + PROB_TOL {
        return Ok(Witness {
            violates: false,
            n_star: None,
        });
    }
    (1..=WITNESS_MAX_LEVELS)
        .find(|&n| ic_lower_bound_closed(e_i, e_ii, n) > 1.0)
        .map(|n| Witness {
            violates: true,
            n_star: Some(n),
        })
        .ok_or(Error::NoConvergence("violation depth search", WITNESS_MAX_LEVELS))
}

/// Isotropic correlation strength `E*` at which the depth-`n` pyramid reaches
/// `I_lb = 1` exactly. Strictly decreasing in `n`, always above `1/√2`.
pub fn threshold_e(levels: usize, tol: f64) -> Result<f64> {
    if levels == 0 {
        return Err(Error::InvalidArgument("threshold needs at least one level".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let excess = |e: f64| ic_lower_bound_closed(e, e, levels) - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence("threshold bisection", BISECTION_CAP))
}

/// One evaluated grid point for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub e_i: f64,
    pub e_ii: f64,
    pub n: usize,
    pub i_lb: f64,
    pub chain_bound: f64,
    pub violates: bool,
}

impl SweepRecord {
    /// Evaluates the pyramid at `(e_i, e_ii, n)` against an `m`-bit budget.
    pub fn evaluate(e_i: f64, e_ii: f64, n: usize, m: usize) -> Self {
        let i_lb = ic_lower_bound_closed(e_i, e_ii, n);
        Self {
            e_i,
            e_ii,
            n,
            i_lb,
            chain_bound: chain_bound(e_i, e_ii, n),
            violates: i_lb > m as f64,
        }
    }
}
