//! Finite-dimensional quantum states, channels and measurements.
//!
//! Mutual informations are built from von Neumann entropies,
//! `I(A:B) = S(A) + S(B) - S(AB)` and
//! `I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C)`, with subsystems addressed by
//! position in a [`DensityMatrix`]'s factor list (first factor most
//! significant in the Kronecker ordering).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::boxes::Correlators;
use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Tolerance on hermiticity, trace, positivity and completeness.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero before taking logarithms.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Largest total Hilbert-space dimension handled.
pub const MAX_DIM: usize = 64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * real(0.5)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check_psd(m: &CMatrix) -> std::result::Result<(), String> {
    let defect = max_abs(&(m - m.adjoint()));
    if defect > STATE_TOL {
        return Err(format!("not Hermitian (defect {defect:e})"));
    }
    let min = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
    if min < -STATE_TOL {
        return Err(format!("negative eigenvalue {min:e}"));
    }
    Ok(())
}

/// A normalized, positive semidefinite operator on `⊗_k C^{dims[k]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::InvalidState(format!("{}x{} is not square", n, matrix.ncols())));
        }
        if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != n {
            return Err(Error::InvalidState(format!("factors {dims:?} do not multiply to {n}")));
        }
        if n > MAX_DIM {
            return Err(Error::TooLarge {
                what: "state dimension",
                value: n,
                max: MAX_DIM,
            });
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        check_psd(&matrix).map_err(Error::InvalidState)?;
        Ok(Self {
            matrix: hermitian_part(&matrix),
            dims,
        })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::new(psi * psi.adjoint(), dims)
    }

    /// Diagonal (classical) state with the given probabilities.
    pub fn classical(probabilities: &[f64], dims: Vec<usize>) -> Result<Self> {
        let diag = DVector::from_iterator(probabilities.len(), probabilities.iter().map(|&p| real(p)));
        Self::new(CMatrix::from_diagonal(&diag), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        Self::new(CMatrix::identity(d, d) * real(1.0 / d as f64), dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(self.matrix.kronecker(&other.matrix), dims)
    }

    /// Reduced state on the subsystems in `keep` (order of the original
    /// factors is preserved).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&k| k >= self.dims.len()) {
            return Err(Error::BadCut(format!(
                "cannot keep {keep:?} of {} factors",
                self.dims.len()
            )));
        }
        let dims = &self.dims;
        let n = self.dim();
        let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let kept: usize = kept_dims.iter().product();
        let traced = n / kept;
        // full index -> (kept index, traced index), and back
        let mut split = Vec::with_capacity(n);
        let mut join = vec![0usize; n];
        for full in 0..n {
            let (mut rem, mut ki, mut ti) = (full, 0usize, 0usize);
            let mut digits = vec![0usize; dims.len()];
            for (s, &d) in dims.iter().enumerate().rev() {
                digits[s] = rem % d;
                rem /= d;
            }
            for (s, &d) in dims.iter().enumerate() {
                if keep.contains(&s) {
                    ki = ki * d + digits[s];
                } else {
                    ti = ti * d + digits[s];
                }
            }
            split.push((ki, ti));
            join[ki * traced + ti] = full;
        }
        let mut out = CMatrix::zeros(kept, kept);
        for (row, &(ki, ti)) in split.iter().enumerate() {
            for kj in 0..kept {
                out[(ki, kj)] += self.matrix[(row, join[kj * traced + ti])];
            }
        }
        Ok(DensityMatrix {
            matrix: hermitian_part(&out),
            dims: kept_dims,
        })
    }

    /// Applies `op` (shape `d_out × dims[target]`) to one factor:
    /// `(1 ⊗ op ⊗ 1) ρ (1 ⊗ op ⊗ 1)†`, unnormalized.
    fn conjugate_on(&self, op: &CMatrix, target: usize) -> CMatrix {
        let full = embed(op, &self.dims, target);
        &full * &self.matrix * full.adjoint()
    }
}

/// `1 ⊗ op ⊗ 1` with `op` acting on factor `target` of `dims`.
fn embed(op: &CMatrix, dims: &[usize], target: usize) -> CMatrix {
    let before: usize = dims[..target].iter().product();
    let after: usize = dims[target + 1..].iter().product();
    CMatrix::identity(before, before)
        .kronecker(op)
        .kronecker(&CMatrix::identity(after, after))
}

fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

/// `S(ρ) = -Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues()).max(0.0)
}

fn check_parts(rho: &DensityMatrix, parts: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; rho.dims.len()];
    for part in parts {
        if part.is_empty() {
            return Err(Error::BadCut("empty part".into()));
        }
        for &s in *part {
            if s >= seen.len() {
                return Err(Error::BadCut(format!("subsystem {s} out of {} factors", seen.len())));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::BadCut(format!("subsystem {s} appears twice")));
            }
        }
    }
    Ok(())
}

fn entropy_of(rho: &DensityMatrix, parts: &[&[usize]]) -> Result<f64> {
    let keep: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    if keep.len() == rho.dims.len() {
        return Ok(von_neumann_entropy(rho));
    }
    Ok(von_neumann_entropy(&rho.partial_trace(&keep)?))
}

/// `I(A:B)` across disjoint groups of subsystems.
pub fn qmi(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    check_parts(rho, &[a, b])?;
    Ok(entropy_of(rho, &[a])? + entropy_of(rho, &[b])? - entropy_of(rho, &[a, b])?)
}

/// `I(A:B|C)`.
pub fn cond_qmi(rho: &DensityMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    check_parts(rho, &[a, b, c])?;
    Ok(entropy_of(rho, &[a, c])? + entropy_of(rho, &[b, c])? - entropy_of(rho, &[a, b, c])? - entropy_of(rho, &[c])?)
}

/// Residuals of the chain rule `I(A:BC) = I(A:C) + I(A:B|C)` and of its
/// mirrored form `I(A:BC) - I(A:C) = I(AC:B) - I(B:C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainResidual {
    pub chain: f64,
    pub mirrored: f64,
}

impl ChainResidual {
    pub fn max(&self) -> f64 {
        self.chain.max(self.mirrored)
    }
}

pub fn chain_rule_residual(rho: &DensityMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<ChainResidual> {
    let bc: Vec<usize> = b.iter().chain(c).copied().collect();
    let ac: Vec<usize> = a.iter().chain(c).copied().collect();
    let i_a_bc = qmi(rho, a, &bc)?;
    let i_a_c = qmi(rho, a, c)?;
    let i_ab_c = cond_qmi(rho, a, b, c)?;
    let i_ac_b = qmi(rho, &ac, b)?;
    let i_b_c = qmi(rho, b, c)?;
    Ok(ChainResidual {
        chain: (i_a_bc - i_a_c - i_ab_c).abs(),
        mirrored: ((i_a_bc - i_a_c) - (i_ac_b - i_b_c)).abs(),
    })
}

/// Completely positive trace-preserving map in operator-sum form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    d_in: usize,
    d_out: usize,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one Kraus operator".into()))?;
        let (d_out, d_in) = first.shape();
        if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::InvalidArgument("Kraus operators differ in shape".into()));
        }
        let sum = kraus
            .iter()
            .fold(CMatrix::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k);
        let defect = max_abs(&(sum - CMatrix::identity(d_in, d_in)));
        if defect > STATE_TOL {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(Self { kraus, d_in, d_out })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(d, d)],
            d_in: d,
            d_out: d,
        }
    }

    /// Replaces any input with `1/d`.
    pub fn fully_depolarizing(d: usize) -> Self {
        let scale = real(1.0 / (d as f64).sqrt());
        let kraus = (0..d)
            .flat_map(|i| {
                (0..d).map(move |j| {
                    let mut k = CMatrix::zeros(d, d);
                    k[(i, j)] = scale;
                    k
                })
            })
            .collect();
        Self {
            kraus,
            d_in: d,
            d_out: d,
        }
    }

    /// Channel from a Haar-random isometry `C^{d_in} → C^{d_out} ⊗ C^{d_env}`
    /// followed by discarding the environment.
    pub fn random_stinespring<R: Rng + ?Sized>(d_in: usize, d_out: usize, d_env: usize, rng: &mut R) -> Result<Self> {
        if d_out * d_env < d_in {
            return Err(Error::InvalidArgument(format!(
                "isometry needs d_out·d_env >= d_in ({d_out}·{d_env} < {d_in})"
            )));
        }
        let u = haar_unitary(d_out * d_env, rng);
        let kraus = (0..d_env)
            .map(|e| CMatrix::from_fn(d_out, d_in, |o, i| u[(o * d_env + e, i)]))
            .collect();
        Self::new(kraus)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn output_dim(&self) -> usize {
        self.d_out
    }

    /// Applies the channel to factor `target` of `rho`.
    pub fn apply_on(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        if target >= rho.dims.len() || rho.dims[target] != self.d_in {
            return Err(Error::BadCut(format!(
                "channel on C^{} cannot act on factor {target} of {:?}",
                self.d_in, rho.dims
            )));
        }
        let mut dims = rho.dims.clone();
        dims[target] = self.d_out;
        let out_dim: usize = dims.iter().product();
        let matrix = self.kraus.iter().fold(CMatrix::zeros(out_dim, out_dim), |acc, k| {
            acc + rho.conjugate_on(k, target)
        });
        DensityMatrix::new(matrix, dims)
    }
}

/// Mutual information between factor `target` and the rest, before and
/// after `channel` acts on `target`.
pub fn data_processing_check(rho: &DensityMatrix, channel: &QuantumChannel, target: usize) -> Result<(f64, f64)> {
    let rest: Vec<usize> = (0..rho.dims.len()).filter(|&s| s != target).collect();
    let before = qmi(rho, &rest, &[target])?;
    let after = qmi(&channel.apply_on(rho, target)?, &rest, &[target])?;
    Ok((before, after))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `d × d` unitary (QR of a Ginibre matrix with the phases
/// of `R`'s diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_iterator(
        d,
        (0..d).map(|i| {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                ONE
            }
        }),
    );
    q * CMatrix::from_diagonal(&phases)
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / real(norm)
}

/// Random mixed state on `dims`: the marginal of a Haar-random pure state on
/// `C^D ⊗ C^D` with `D = Π dims`.
pub fn random_density_matrix<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<DensityMatrix> {
    random_density_matrix_with_rank(dims, dims.iter().product(), rng)
}

/// Like [`random_density_matrix`] but purified by `C^rank`, so the state has
/// rank at most `rank`. `rank = 1` gives a Haar-random pure state.
pub fn random_density_matrix_with_rank<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if d == 0 || d > MAX_DIM || rank == 0 {
        return Err(Error::InvalidState(format!("dimension {d} with purifying rank {rank}")));
    }
    let psi = random_pure_state(d * rank, rng);
    // rows index the system, columns the purifying register
    let m = CMatrix::from_fn(d, rank, |i, j| psi[i * rank + j]);
    DensityMatrix::new(&m * m.adjoint(), dims.to_vec())
}

/// Two-qubit singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DVector::from_vec(vec![ZERO, real(s), real(-s), ZERO]);
    DensityMatrix::pure(&psi, vec![2, 2]).expect("singlet is a valid state")
}

/// Projector onto outcome `bit` of the real-plane measurement at angle
/// `theta`: outcome 0 is `cos θ|0⟩ + sin θ|1⟩`, outcome 1 its orthogonal
/// complement.
pub fn plane_projector(theta: f64, bit: bool) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let v = if bit { [-s, c] } else { [c, s] };
    CMatrix::from_fn(2, 2, |i, j| real(v[i] * v[j]))
}

/// Born-rule joint law `P(A, B | a, b)` of measuring `rho` with plane
/// measurements at the given angles; index `[a][b][A][B]`.
pub fn born_statistics(
    rho: &DensityMatrix,
    alice_angles: [f64; 2],
    bob_angles: [f64; 2],
) -> Result<[[[[f64; 2]; 2]; 2]; 2]> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidState(format!(
            "expected two qubits, got {:?}",
            rho.dims()
        )));
    }
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (a, &ta) in alice_angles.iter().enumerate() {
        for (b, &tb) in bob_angles.iter().enumerate() {
            for out_a in [false, true] {
                for out_b in [false, true] {
                    let effect = plane_projector(ta, out_a).kronecker(&plane_projector(tb, out_b));
                    p[a][b][usize::from(out_a)][usize::from(out_b)] = trace(&(rho.matrix() * effect)).re;
                }
            }
        }
    }
    Ok(p)
}

/// Alice's measurement angles for the CHSH-optimal singlet box.
pub const SINGLET_ALICE_ANGLES: [f64; 2] = [0.0, std::f64::consts::FRAC_PI_4];
/// Bob's measurement angles for the CHSH-optimal singlet box.
pub const SINGLET_BOB_ANGLES: [f64; 2] = [std::f64::consts::FRAC_PI_8, -std::f64::consts::FRAC_PI_8];

/// The box obtained by measuring the singlet at the CHSH-optimal settings,
/// Bob's outcome relabelled so all four correlators equal `+1/√2`.
pub fn singlet_box() -> Correlators {
    let p =
        born_statistics(&singlet(), SINGLET_ALICE_ANGLES, SINGLET_BOB_ANGLES).expect("singlet has two qubit factors");
    let mut c = [0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            let target = a & b;
            // Bob flips his bit, so A ⊕ B' = A ⊕ B ⊕ 1
            let success: f64 = (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .filter(|&(x, y)| x ^ y ^ 1 == target)
                .map(|(x, y)| p[a][b][x][y])
                .sum();
            c[2 * a + b] = 2.0 * success - 1.0;
        }
    }
    Correlators::new(c[0], c[1], c[2], c[3]).expect("Born-rule correlators lie in [-1, 1]")
}

/// Alice's measurement for every data string: `effects[ā][x]` acts on her
/// share of the pre-shared state and produces message `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmFamily {
    effects: Vec<Vec<CMatrix>>,
    dim: usize,
}

impl PovmFamily {
    pub fn new(effects: Vec<Vec<CMatrix>>) -> Result<Self> {
        let dim = effects
            .first()
            .and_then(|e| e.first())
            .map(|m| m.nrows())
            .ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        let outcomes = effects[0].len();
        for (data, povm) in effects.iter().enumerate() {
            if povm.len() != outcomes {
                return Err(Error::InvalidPovm(format!(
                    "data {data}: {} outcomes, expected {outcomes}",
                    povm.len()
                )));
            }
            let mut sum = CMatrix::zeros(dim, dim);
            for (x, e) in povm.iter().enumerate() {
                if e.shape() != (dim, dim) {
                    return Err(Error::InvalidPovm(format!("data {data}, outcome {x}: wrong shape")));
                }
                check_psd(e).map_err(|m| Error::InvalidPovm(format!("data {data}, outcome {x}: {m}")))?;
                sum += e;
            }
            let defect = max_abs(&(sum - CMatrix::identity(dim, dim)));
            if defect > STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "data {data}: completeness defect {defect:e}"
                )));
            }
        }
        Ok(Self { effects, dim })
    }

    pub fn data_values(&self) -> usize {
        self.effects.len()
    }

    pub fn outcomes(&self) -> usize {
        self.effects[0].len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effect(&self, data: usize, x: usize) -> &CMatrix {
        &self.effects[data][x]
    }
}

/// `(1/2^N) Σ_ā |ā⟩⟨ā|_R ⊗ Σ_x |x⟩⟨x|_X ⊗ Tr_A(ρ_AB (M_x^{(ā)} ⊗ 1))`, with
/// factors ordered `[R, X, B]`.
pub fn build_cq_state(n_bits: usize, rho_ab: &DensityMatrix, strategy: &PovmFamily, m: usize) -> Result<DensityMatrix> {
    if rho_ab.dims().len() != 2 || rho_ab.dims()[0] != strategy.dim() {
        return Err(Error::InvalidPovm(format!(
            "POVM acts on C^{} but the shared state has factors {:?}",
            strategy.dim(),
            rho_ab.dims()
        )));
    }
    let data_values = 1usize.checked_shl(n_bits as u32).unwrap_or(usize::MAX);
    let messages = 1usize.checked_shl(m as u32).unwrap_or(usize::MAX);
    if strategy.data_values() != data_values || strategy.outcomes() != messages {
        return Err(Error::InvalidPovm(format!(
            "family has {}x{} effects, need {data_values}x{messages}",
            strategy.data_values(),
            strategy.outcomes()
        )));
    }
    let d_b = rho_ab.dims()[1];
    let total = data_values.saturating_mul(messages).saturating_mul(d_b);
    if total > MAX_DIM {
        return Err(Error::TooLarge {
            what: "classical-quantum state dimension",
            value: total,
            max: MAX_DIM,
        });
    }
    let mut out = CMatrix::zeros(total, total);
    let weight = real(1.0 / data_values as f64);
    for data in 0..data_values {
        for x in 0..messages {
            let lifted = strategy.effect(data, x).kronecker(&CMatrix::identity(d_b, d_b));
            let block = reduce_to_second(&(rho_ab.matrix() * lifted), rho_ab.dims()[0], d_b);
            let base = (data * messages + x) * d_b;
            out.view_mut((base, base), (d_b, d_b))
                .copy_from(&(hermitian_part(&block) * weight));
        }
    }
    DensityMatrix::new(out, vec![data_values, messages, d_b])
}

/// `Tr_A` of an arbitrary operator on `C^{d_a} ⊗ C^{d_b}`.
fn reduce_to_second(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    CMatrix::from_fn(d_b, d_b, |i, j| (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum())
}

/// `I(ā : x, B)` for a state from [`build_cq_state`] together with the
/// intermediate terms of the argument that bounds it by `m`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IcCertificate {
    /// `I(R : XB)`.
    pub i_total: f64,
    /// `I(R : B)`; zero because the data is independent of Bob's share.
    pub i_data_bob: f64,
    /// `I(R : X | B)`.
    pub i_data_message_given_bob: f64,
    /// `I(X : RB)`.
    pub i_message_rest: f64,
    /// `I(X : B)`.
    pub i_message_bob: f64,
    /// `S(X) = I(X : X)`.
    pub message_entropy: f64,
    pub m: usize,
    pub satisfied: bool,
}

pub fn ic_certificate(cq: &DensityMatrix, m: usize) -> Result<IcCertificate> {
    if cq.dims().len() != 3 {
        return Err(Error::BadCut(format!(
            "expected [R, X, B] factors, got {:?}",
            cq.dims()
        )));
    }
    let (r, x, b) = (&[0usize][..], &[1usize][..], &[2usize][..]);
    let i_total = qmi(cq, r, &[1, 2])?;
    Ok(IcCertificate {
        i_total,
        i_data_bob: qmi(cq, r, b)?,
        i_data_message_given_bob: cond_qmi(cq, r, x, b)?,
        i_message_rest: qmi(cq, x, &[0, 2])?,
        i_message_bob: qmi(cq, x, b)?,
        message_entropy: von_neumann_entropy(&cq.partial_trace(x)?),
        m,
        satisfied: i_total <= m as f64 + 1e-9,
    })
}

/// A complete strategy for the one-bit task on `N` data bits.
#[derive(Debug, Clone)]
pub struct Strategy {
    pub n_bits: usize,
    pub shared: DensityMatrix,
    pub measurement: PovmFamily,
}

impl Strategy {
    pub fn cq_state(&self) -> Result<DensityMatrix> {
        build_cq_state(self.n_bits, &self.shared, &self.measurement, 1)
    }
}

/// Two data bits, a shared singlet: Alice measures at angle
/// `SINGLET_ALICE_ANGLES[a_0 ⊕ a_1]` and sends `x = a_0 ⊕ A`.
pub fn quantum_van_dam() -> Strategy {
    let effects = (0..4usize)
        .map(|data| {
            let (a0, a1) = (data & 1 == 1, data & 2 == 2);
            let theta = SINGLET_ALICE_ANGLES[usize::from(a0 ^ a1)];
            (0..2).map(|x| plane_projector(theta, (x == 1) ^ a0)).collect()
        })
        .collect();
    Strategy {
        n_bits: 2,
        shared: singlet(),
        measurement: PovmFamily::new(effects).expect("projective measurements are complete"),
    }
}

fn product_zero_state() -> DensityMatrix {
    DensityMatrix::classical(&[1.0, 0.0, 0.0, 0.0], vec![2, 2]).expect("valid product state")
}

/// Alice forwards `a_0`; nothing useful is shared.
pub fn classical_forwarding() -> Strategy {
    let id = CMatrix::identity(2, 2);
    let zero = CMatrix::zeros(2, 2);
    let effects = (0..4usize)
        .map(|data| {
            if data & 1 == 1 {
                vec![zero.clone(), id.clone()]
            } else {
                vec![id.clone(), zero.clone()]
            }
        })
        .collect();
    Strategy {
        n_bits: 2,
        shared: product_zero_state(),
        measurement: PovmFamily::new(effects).expect("complete"),
    }
}

/// Alice always sends 0.
pub fn constant_message() -> Strategy {
    let effects = (0..4usize)
        .map(|_| vec![CMatrix::identity(2, 2), CMatrix::zeros(2, 2)])
        .collect();
    Strategy {
        n_bits: 2,
        shared: product_zero_state(),
        measurement: PovmFamily::new(effects).expect("complete"),
    }
}
