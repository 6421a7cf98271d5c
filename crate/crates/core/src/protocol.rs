//! The one-bit random access coding protocol over a pyramid of boxes.
//!
//! Alice holds `N = 2^n` bits. Level 0 of the pyramid pairs up neighbouring
//! bits: box `(0, j)` receives `a_{2j} ⊕ a_{2j+1}` and yields the one-box
//! message `a_{2j} ⊕ A`. Every higher box `(k, j)` receives the XOR of the
//! messages of its two children `(k-1, 2j)` and `(k-1, 2j+1)` and forwards
//! `left message ⊕ A`. The top message is the single bit `x` sent to Bob.
//!
//! Bob writes his index as `b = Σ b_k 2^k`, feeds `b_{n-1}` to the top box and
//! walks down towards the half that holds `a_b`, one box per level. His guess
//! is `β = x ⊕ B_0 ⊕ … ⊕ B_{n-1}` and is right exactly when an even number of
//! the boxes on his path broke the relation `A ⊕ B = a·b`.
//!
//! Boxes are stored level-major: level `k` holds `2^{n-1-k}` boxes starting at
//! offset `N - 2^{n-k}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::{BoxInstance, Correlators};
use crate::infotheory::{GuessProfile, Provenance};
use crate::{seed, Error, Result};

/// Deepest pyramid [`exhaustive_pk`] accepts.
pub const EXHAUSTIVE_MAX_LEVELS: usize = 4;

/// Deepest pyramid [`TruthTable`] can tabulate (`2^N · N` entries).
pub const TRUTH_TABLE_MAX_LEVELS: usize = 4;

/// Alice's data, `N = 2^n` bits with `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataString {
    bits: Vec<bool>,
}

impl DataString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 2 || !bits.len().is_power_of_two() {
            return Err(Error::BadDataLength(bits.len()));
        }
        Ok(Self { bits })
    }

    /// Bit `i` is `(value >> i) & 1`.
    pub fn from_u64(levels: usize, value: u64) -> Result<Self> {
        if levels == 0 || levels > 6 {
            return Err(Error::BadDataLength(1usize.checked_shl(levels as u32).unwrap_or(0)));
        }
        Self::new((0..1usize << levels).map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn random<R: Rng + ?Sized>(levels: usize, rng: &mut R) -> Result<Self> {
        if levels == 0 || levels >= usize::BITS as usize {
            return Err(Error::BadDataLength(0));
        }
        Self::new((0..1usize << levels).map(|_| rng.random()).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.bits.len().trailing_zeros() as usize
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_u64(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| {
            self.bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
        })
    }
}

/// Bob's index `b` together with its depth `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetIndex {
    index: usize,
    levels: usize,
}

impl TargetIndex {
    pub fn new(index: usize, levels: usize) -> Result<Self> {
        if levels == 0 || levels >= usize::BITS as usize {
            return Err(Error::BadDataLength(0));
        }
        if index >> levels != 0 {
            return Err(Error::IndexOutOfRange {
                index,
                len: 1 << levels,
            });
        }
        Ok(Self { index, levels })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let index = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &b)| acc | (usize::from(b) << k));
        Self::new(index, bits.len())
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `b_k`.
    pub fn bit(&self, k: usize) -> bool {
        (self.index >> k) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.levels).map(|k| self.bit(k)).collect()
    }

    /// Number of right turns on Bob's path, `b_0 + … + b_{n-1}`.
    pub fn popcount(&self) -> usize {
        self.index.count_ones() as usize
    }
}

/// `N - 1` box instances arranged on `n` levels.
#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: usize,
    boxes: Vec<BoxInstance>,
    encoded: bool,
}

impl Pyramid {
    /// Fresh pyramid whose box `i` draws from stream `i` of `key`.
    pub fn new(levels: usize, correlators: Correlators, key: u64) -> Result<Self> {
        if levels == 0 || levels > 30 {
            return Err(Error::TooLarge {
                what: "pyramid levels",
                value: levels,
                max: 30,
            });
        }
        let boxes = (0..(1usize << levels) - 1)
            .map(|id| BoxInstance::new(id, correlators, seed::stream(key, id as u64)))
            .collect();
        Ok(Self {
            levels,
            boxes,
            encoded: false,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_encoded(&self) -> bool {
        self.encoded
    }

    pub fn boxes(&self) -> &[BoxInstance] {
        &self.boxes
    }

    /// Number of boxes on level `k`.
    pub fn width(&self, k: usize) -> usize {
        1 << (self.levels - 1 - k)
    }

    /// Flat id of box `(k, j)`.
    pub fn id(&self, k: usize, j: usize) -> usize {
        debug_assert!(k < self.levels && j < self.width(k));
        (1usize << self.levels) - (1usize << (self.levels - k)) + j
    }

    pub fn get(&self, k: usize, j: usize) -> &BoxInstance {
        &self.boxes[self.id(k, j)]
    }

    fn get_mut(&mut self, k: usize, j: usize) -> &mut BoxInstance {
        let id = self.id(k, j);
        &mut self.boxes[id]
    }

    /// Ids of the boxes Bob uses for `b`, from the top level down.
    pub fn bob_path(&self, b: &TargetIndex) -> Vec<usize> {
        (0..self.levels)
            .rev()
            .map(|k| self.id(k, b.index() >> (k + 1)))
            .collect()
    }

    pub fn alice_queries(&self) -> usize {
        self.boxes.iter().filter(|b| b.alice_output().is_some()).count()
    }

    pub fn bob_queries(&self) -> usize {
        self.boxes.iter().filter(|b| b.bob_output().is_some()).count()
    }
}

/// Alice's side: queries every box, bottom level first and left to right,
/// and returns the one-bit message.
pub fn alice_encode(data: &DataString, pyr: &mut Pyramid) -> Result<bool> {
    if data.levels() != pyr.levels {
        return Err(Error::LevelMismatch {
            pyramid: pyr.levels,
            input: data.levels(),
        });
    }
    if pyr.encoded || pyr.alice_queries() > 0 {
        return Err(Error::PyramidReused);
    }
    let mut messages = data.bits.clone();
    for k in 0..pyr.levels {
        let mut next = Vec::with_capacity(messages.len() / 2);
        for (j, pair) in messages.chunks_exact(2).enumerate() {
            let out = pyr.get_mut(k, j).sample_alice(pair[0] ^ pair[1])?;
            next.push(pair[0] ^ out);
        }
        messages = next;
    }
    pyr.encoded = true;
    Ok(messages[0])
}

/// Bob's side: walks one box per level from the top and returns his guess.
pub fn bob_decode(b: &TargetIndex, x: bool, pyr: &mut Pyramid) -> Result<bool> {
    if b.levels() != pyr.levels {
        return Err(Error::LevelMismatch {
            pyramid: pyr.levels,
            input: b.levels(),
        });
    }
    if !pyr.encoded {
        return Err(Error::DecodeBeforeEncode);
    }
    let mut guess = x;
    for k in (0..pyr.levels).rev() {
        let j = b.index() >> (k + 1);
        guess ^= pyr.get_mut(k, j).sample_bob(b.bit(k))?;
    }
    Ok(guess)
}

/// Record of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub message: bool,
    pub guess: bool,
    pub target: usize,
    pub target_bit: bool,
    /// Box ids Bob queried, top level first.
    pub bob_path: Vec<usize>,
    /// Whether each box on `bob_path` broke `A ⊕ B = a·b`.
    pub path_errors: Vec<bool>,
    pub alice_queries: usize,
}

impl ProtocolTranscript {
    pub fn correct(&self) -> bool {
        self.guess == self.target_bit
    }

    pub fn error_count(&self) -> usize {
        self.path_errors.iter().filter(|&&e| e).count()
    }
}

/// Runs the full protocol on a fresh pyramid keyed by `key`.
pub fn run_protocol(data: &DataString, b: usize, correlators: Correlators, key: u64) -> Result<ProtocolTranscript> {
    let target = TargetIndex::new(b, data.levels())?;
    let mut pyr = Pyramid::new(data.levels(), correlators, key)?;
    let message = alice_encode(data, &mut pyr)?;
    let guess = bob_decode(&target, message, &mut pyr)?;
    let bob_path = pyr.bob_path(&target);
    let path_errors = bob_path
        .iter()
        .map(|&id| {
            pyr.boxes[id]
                .error()
                .expect("box on Bob's path was queried by both sides")
        })
        .collect();
    Ok(ProtocolTranscript {
        message,
        guess,
        target: b,
        target_bit: data.bit(b),
        bob_path,
        path_errors,
        alice_queries: pyr.alice_queries(),
    })
}

/// Probability that `k` independent uses, each right with probability `p`,
/// contain an even number of errors.
pub fn q_even(k: usize, p: f64) -> f64 {
    0.5 * (1.0 + (2.0 * p - 1.0).powi(k as i32))
}

/// Complement of [`q_even`].
pub fn q_odd(k: usize, p: f64) -> f64 {
    0.5 * (1.0 - (2.0 * p - 1.0).powi(k as i32))
}

/// `P_K = ½[1 + E_I^{n-k} E_II^k]` with `k = popcount(K)`.
pub fn analytic_pk(e_i: f64, e_ii: f64, levels: usize, index: usize) -> f64 {
    let k = index.count_ones() as usize;
    debug_assert!(k <= levels);
    0.5 * (1.0 + e_i.powi((levels - k) as i32) * e_ii.powi(k as i32))
}

/// Analytic profile over all `2^n` indices.
pub fn analytic_profile(e_i: f64, e_ii: f64, levels: usize) -> Result<GuessProfile> {
    if levels > 24 {
        return Err(Error::TooLarge {
            what: "profile levels",
            value: levels,
            max: 24,
        });
    }
    let p = (0..1usize << levels)
        .map(|k| analytic_pk(e_i, e_ii, levels, k))
        .collect();
    GuessProfile::new(levels, p, Provenance::Analytic)
}

/// Joint law of (subtree message, Bob's decoded bit, target bit), indexed by
/// `x | y << 1 | t << 2`.
type SubtreeLaw = [f64; 8];

fn leaf_law(is_target: bool) -> SubtreeLaw {
    let mut law = [0.0; 8];
    for a in [0usize, 1] {
        let idx = if is_target { a | a << 1 | a << 2 } else { a };
        law[idx] += 0.5;
    }
    law
}

fn combine(c: &Correlators, left: &SubtreeLaw, right: &SubtreeLaw, bob: Option<bool>) -> SubtreeLaw {
    let mut out = [0.0; 8];
    for (li, &wl) in left.iter().enumerate().filter(|(_, w)| **w > 0.0) {
        for (ri, &wr) in right.iter().enumerate().filter(|(_, w)| **w > 0.0) {
            let (xl, xr) = (li & 1 == 1, ri & 1 == 1);
            let s = xl ^ xr;
            for alice_out in [false, true] {
                let x = xl ^ alice_out;
                let w = wl * wr * 0.5;
                let Some(bk) = bob else {
                    out[usize::from(x)] += w;
                    continue;
                };
                let child = if bk { ri } else { li };
                let child_offset = (child & 1 == 1) ^ (child & 2 == 2);
                let t = child & 4 == 4;
                let p_ok = c.success_probability(s, bk);
                for (broken, p) in [(false, p_ok), (true, 1.0 - p_ok)] {
                    let bob_out = alice_out ^ (s & bk) ^ broken;
                    let y = x ^ bob_out ^ child_offset;
                    out[usize::from(x) | usize::from(y) << 1 | usize::from(t) << 2] += w * p;
                }
            }
        }
    }
    out
}

/// Exact `P_K` for every `K` by summing over all data bits, Alice's outputs
/// and the break events on Bob's path, each box weighted by the error rate of
/// its actual input pair.
pub fn exhaustive_pk(c: &Correlators, levels: usize) -> Result<GuessProfile> {
    if levels == 0 || levels > EXHAUSTIVE_MAX_LEVELS {
        return Err(Error::TooLarge {
            what: "exhaustive enumeration levels",
            value: levels,
            max: EXHAUSTIVE_MAX_LEVELS,
        });
    }
    let n_bits = 1usize << levels;
    let p = (0..n_bits)
        .map(|target| {
            let b = TargetIndex::new(target, levels).expect("index in range");
            let mut laws: Vec<SubtreeLaw> = (0..n_bits).map(|i| leaf_law(i == target)).collect();
            for k in 0..levels {
                let on_path = target >> (k + 1);
                laws = laws
                    .chunks_exact(2)
                    .enumerate()
                    .map(|(j, pair)| {
                        let bob = (j == on_path).then(|| b.bit(k));
                        combine(c, &pair[0], &pair[1], bob)
                    })
                    .collect();
            }
            laws[0]
                .iter()
                .enumerate()
                .filter(|(i, _)| (i >> 1) & 1 == (i >> 2) & 1)
                .map(|(_, w)| w)
                .sum()
        })
        .collect();
    GuessProfile::new(levels, p, Provenance::Exhaustive)
}

/// A Boolean function `f(ā, b)` tabulated over every data string and index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    levels: usize,
    /// Entry `value(ā) · N + b`.
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(levels: usize, bits: Vec<bool>) -> Result<Self> {
        if levels == 0 || levels > TRUTH_TABLE_MAX_LEVELS {
            return Err(Error::MalformedTable(format!(
                "levels must be in 1..={TRUTH_TABLE_MAX_LEVELS}, got {levels}"
            )));
        }
        let n = 1usize << levels;
        let expected = (1usize << n) * n;
        if bits.len() != expected {
            return Err(Error::MalformedTable(format!(
                "{} entries, expected {expected}",
                bits.len()
            )));
        }
        Ok(Self { levels, bits })
    }

    pub fn from_fn(levels: usize, f: impl Fn(&DataString, usize) -> bool) -> Result<Self> {
        if levels == 0 || levels > TRUTH_TABLE_MAX_LEVELS {
            return Err(Error::MalformedTable(format!("unsupported levels {levels}")));
        }
        let n = 1usize << levels;
        let mut bits = Vec::with_capacity((1 << n) * n);
        for value in 0..1u64 << n {
            let data = DataString::from_u64(levels, value)?;
            bits.extend((0..n).map(|b| f(&data, b)));
        }
        Self::new(levels, bits)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn eval(&self, data: &DataString, b: usize) -> Result<bool> {
        let n = 1usize << self.levels;
        if data.len() != n {
            return Err(Error::LevelMismatch {
                pyramid: self.levels,
                input: data.levels(),
            });
        }
        if b >= n {
            return Err(Error::IndexOutOfRange { index: b, len: n });
        }
        let row = data.to_u64().expect("table data fits in 64 bits") as usize;
        Ok(self.bits[row * n + b])
    }
}

/// Rewrites `ā` into `ā'` with `a'_b = f(ā, b)`. Running the pyramid on `ā'`
/// lets Bob read `f(ā, b)` for whichever `b` he holds; Alice does the
/// tabulation, so Bob never needs to know `f`.
pub fn boolean_reduce(f: &TruthTable, data: &DataString) -> Result<DataString> {
    DataString::new((0..data.len()).map(|b| f.eval(data, b)).collect::<Result<Vec<_>>>()?)
}

/// [`boolean_reduce`] for a function given as a closure; no size limit.
pub fn reduce_with(data: &DataString, f: impl Fn(&DataString, usize) -> bool) -> DataString {
    DataString {
        bits: (0..data.len()).map(|b| f(data, b)).collect(),
    }
}
