//! Two-input, two-output no-signaling boxes with uniform local marginals.
//!
//! A box is fixed by four correlators `c_ab`:
//! `P(A ⊕ B = a·b | a, b) = (1 + c_ab) / 2`, while `A` and `B` are each
//! uniformly distributed whatever the inputs. Local randomization brings any
//! box to this form without changing its CHSH value, so biased marginals are
//! not modelled.
//!
//! A [`BoxInstance`] is one use of such a box. Simulation samples Alice's side
//! first and then Bob's side conditioned on it. The order is a simulation
//! convenience only: `A` is drawn without looking at any input, so the law of
//! each side is independent of the other side's input exactly as it would be
//! for a genuinely space-like separated pair.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack allowed on the `[-1, 1]` range checks.
pub const RANGE_TOL: f64 = 1e-12;

fn check_unit(name: &'static str, value: f64, min: f64) -> Result<f64> {
    if !value.is_finite() || value < min - RANGE_TOL || value > 1.0 + RANGE_TOL {
        return Err(Error::OutOfRange {
            name,
            value,
            min,
            max: 1.0,
        });
    }
    Ok(value.clamp(min, 1.0))
}

/// The four conditional correlators of a box, indexed by `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlators {
    c00: f64,
    c01: f64,
    c10: f64,
    c11: f64,
}

impl Correlators {
    pub fn new(c00: f64, c01: f64, c10: f64, c11: f64) -> Result<Self> {
        Ok(Self {
            c00: check_unit("c00", c00, -1.0)?,
            c01: check_unit("c01", c01, -1.0)?,
            c10: check_unit("c10", c10, -1.0)?,
            c11: check_unit("c11", c11, -1.0)?,
        })
    }

    /// Isotropic box: every `c_ab = e`. `e = 1` is the PR box, `e = 0` gives
    /// independent random bits.
    pub fn isotropic(e: f64) -> Result<Self> {
        let e = check_unit("E", e, 0.0)?;
        Ok(Self {
            c00: e,
            c01: e,
            c10: e,
            c11: e,
        })
    }

    /// The PR box, `A ⊕ B = a·b` with certainty.
    pub fn pr_box() -> Self {
        Self {
            c00: 1.0,
            c01: 1.0,
            c10: 1.0,
            c11: 1.0,
        }
    }

    /// Box whose effective correlations are `(e_i, e_ii)`: Bob's input
    /// selects the strength, Alice's input does not matter.
    pub fn from_effective(e_i: f64, e_ii: f64) -> Result<Self> {
        let e_i = check_unit("E_I", e_i, -1.0)?;
        let e_ii = check_unit("E_II", e_ii, -1.0)?;
        Ok(Self {
            c00: e_i,
            c01: e_ii,
            c10: e_i,
            c11: e_ii,
        })
    }

    pub fn c(&self, a: bool, b: bool) -> f64 {
        match (a, b) {
            (false, false) => self.c00,
            (false, true) => self.c01,
            (true, false) => self.c10,
            (true, true) => self.c11,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c00, self.c01, self.c10, self.c11]
    }

    /// `P(A ⊕ B = a·b | a, b)`.
    pub fn success_probability(&self, a: bool, b: bool) -> f64 {
        (1.0 + self.c(a, b)) / 2.0
    }

    /// Probability that Bob's guess is right in the one-box protocol when he
    /// wants `a_0` (`P_I`, his input 0) and `a_1` (`P_II`, his input 1),
    /// averaged over Alice's uniformly random box input.
    pub fn guess_probabilities(&self) -> (f64, f64) {
        let p_i = 0.5 * (self.success_probability(false, false) + self.success_probability(true, false));
        let p_ii = 0.5 * (self.success_probability(false, true) + self.success_probability(true, true));
        (p_i, p_ii)
    }

    /// `E_j = 2 P_j - 1`, i.e. `E_I = (c00 + c10)/2` and `E_II = (c01 + c11)/2`.
    pub fn effective_correlations(&self) -> (f64, f64) {
        (0.5 * (self.c00 + self.c10), 0.5 * (self.c01 + self.c11))
    }

    /// CHSH value `S = Σ_ab P(A ⊕ B = a·b | a, b)`, in `[0, 4]`.
    pub fn chsh_value(&self) -> f64 {
        [false, true]
            .iter()
            .flat_map(|&a| [false, true].map(|b| self.success_probability(a, b)))
            .sum()
    }

    pub fn is_pr_box(&self) -> bool {
        self.as_array().iter().all(|&c| c == 1.0)
    }
}

/// One use of a box pair: Alice's and Bob's halves plus the random stream
/// that realizes them.
#[derive(Debug, Clone)]
pub struct BoxInstance {
    id: usize,
    correlators: Correlators,
    alice_input: Option<bool>,
    alice_output: Option<bool>,
    bob_input: Option<bool>,
    bob_output: Option<bool>,
    rng: ChaCha8Rng,
}

impl BoxInstance {
    pub fn new(id: usize, correlators: Correlators, rng: ChaCha8Rng) -> Self {
        Self {
            id,
            correlators,
            alice_input: None,
            alice_output: None,
            bob_input: None,
            bob_output: None,
            rng,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn correlators(&self) -> &Correlators {
        &self.correlators
    }

    pub fn alice_input(&self) -> Option<bool> {
        self.alice_input
    }

    pub fn alice_output(&self) -> Option<bool> {
        self.alice_output
    }

    pub fn bob_input(&self) -> Option<bool> {
        self.bob_input
    }

    pub fn bob_output(&self) -> Option<bool> {
        self.bob_output
    }

    /// Alice's output: a fair coin, independent of `a_in`.
    pub fn sample_alice(&mut self, a_in: bool) -> Result<bool> {
        if self.alice_input.is_some() {
            return Err(Error::AliceRequeried(self.id));
        }
        let out: bool = self.rng.random();
        self.alice_input = Some(a_in);
        self.alice_output = Some(out);
        Ok(out)
    }

    /// Bob's output: `A ⊕ a·b` with probability `(1 + c_ab)/2`, flipped
    /// otherwise.
    pub fn sample_bob(&mut self, b_in: bool) -> Result<bool> {
        if self.bob_output.is_some() {
            return Err(Error::BobRequeried(self.id));
        }
        let (Some(a_in), Some(a_out)) = (self.alice_input, self.alice_output) else {
            return Err(Error::BobBeforeAlice(self.id));
        };
        let p_ok = self.correlators.success_probability(a_in, b_in);
        let ok = p_ok >= 1.0 || self.rng.random::<f64>() < p_ok;
        let out = a_out ^ (a_in & b_in) ^ !ok;
        self.bob_input = Some(b_in);
        self.bob_output = Some(out);
        Ok(out)
    }

    /// Whether the pair failed the box relation, `A ⊕ B ≠ a·b`. `None` until
    /// both halves were used.
    pub fn error(&self) -> Option<bool> {
        Some(self.alice_output? ^ self.bob_output? != (self.alice_input? & self.bob_input?))
    }
}
