//! Observables and error measures: computational-basis probabilities,
//! sampling, expectation values, variational distance, distortion, von
//! Neumann entropy and its per-layer growth bounds.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::circuit::ChannelKind;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::factor::LFactor;
use crate::linalg;
use crate::tolerance;

/// Computational-basis probability masses together with their raw sum.
///
/// Truncation shrinks the trace, so the raw masses may sum below 1. The raw
/// view feeds distance measures; sampling always uses the normalized view.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    masses: Vec<f64>,
    raw_sum: f64,
}

impl ProbabilityDistribution {
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        let mut clamped = masses;
        for m in &mut clamped {
            if *m < -tolerance::MASS_CLAMP {
                return Err(Error::Internal(format!(
                    "probability mass {m:e} below clamp tolerance"
                )));
            }
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        let raw_sum = clamped.iter().sum();
        Ok(Self {
            masses: clamped,
            raw_sum,
        })
    }

    /// `masses[x] = Σ_v |L_{x,v}|²`; row masses of the factor, never forming
    /// the density matrix. The raw sum equals the factor's trace.
    pub fn from_factor(l: &LFactor) -> Self {
        let dim = l.dim();
        let mut masses = vec![0.0f64; dim];
        for v in 0..l.num_cols() {
            for (x, amp) in l.column(v).iter().enumerate() {
                masses[x] += amp.norm_sqr();
            }
        }
        let raw_sum = masses.iter().sum();
        Self { masses, raw_sum }
    }

    /// Diagonal of a density matrix, clamped at zero within tolerance.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        Self::from_masses(rho.diagonal())
    }

    /// Raw (possibly sub-unit) masses.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn raw_sum(&self) -> f64 {
        self.raw_sum
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Masses rescaled to sum to 1.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        if self.raw_sum <= 0.0 {
            return Err(Error::ZeroDistribution);
        }
        Ok(self.masses.iter().map(|m| m / self.raw_sum).collect())
    }
}

/// A Hermitian observable, either dense or diagonal in the computational
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// Column-major `dim × dim` Hermitian matrix.
    Dense { dim: usize, data: Vec<Complex64> },
    /// Diagonal entries.
    Diagonal(Vec<f64>),
}

impl Observable {
    pub fn dense(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: dim * dim,
            });
        }
        let dev = linalg::hermiticity_deviation(&data, dim);
        if dev > tolerance::HERMITICITY {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Observable::Dense { dim, data })
    }

    pub fn diagonal(entries: Vec<f64>) -> Self {
        Observable::Diagonal(entries)
    }

    /// Pauli Z on one qubit of an N-qubit register, as a diagonal.
    pub fn pauli_z(num_qubits: usize, qubit: usize) -> Result<Self> {
        if qubit >= num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits,
            });
        }
        let dim = 1usize << num_qubits;
        let bit = num_qubits - 1 - qubit;
        let entries = (0..dim)
            .map(|x| if (x >> bit) & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        Ok(Observable::Diagonal(entries))
    }

    pub fn dim(&self) -> usize {
        match self {
            Observable::Dense { dim, .. } => *dim,
            Observable::Diagonal(d) => d.len(),
        }
    }
}

/// `⟨𝒪⟩ = Tr(L† 𝒪 L)`, evaluated in the factored form.
pub fn expectation(l: &LFactor, observable: &Observable) -> Result<f64> {
    if observable.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            left: observable.dim(),
            right: l.dim(),
        });
    }
    match observable {
        Observable::Diagonal(entries) => {
            let dist = ProbabilityDistribution::from_factor(l);
            Ok(entries
                .iter()
                .zip(dist.masses())
                .map(|(o, m)| o * m)
                .sum())
        }
        Observable::Dense { dim, data } => {
            let o = linalg::view(data, *dim, *dim);
            let lv = linalg::view(l.data(), *dim, l.num_cols());
            let ol = o * lv;
            let mut acc = Complex64::ZERO;
            for v in 0..l.num_cols() {
                for i in 0..*dim {
                    acc += l.column(v)[i].conj() * ol[(i, v)];
                }
            }
            if acc.im.abs() > tolerance::HERMITICITY {
                return Err(Error::Internal(format!(
                    "expectation has imaginary residue {:e}",
                    acc.im
                )));
            }
            Ok(acc.re)
        }
    }
}

/// Multinomial sample from the normalized view; deterministic per seed.
pub fn sample(dist: &ProbabilityDistribution, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let normalized = dist.normalized()?;
    let mut cumulative = Vec::with_capacity(normalized.len());
    let mut acc = 0.0;
    for m in &normalized {
        acc += m;
        cumulative.push(acc);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; normalized.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c < u).min(counts.len() - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// `T(a, b) = Σ_x |a_x − b_x|` over raw masses (no ½ factor).
pub fn variational_distance(
    a: &ProbabilityDistribution,
    b: &ProbabilityDistribution,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.masses()
        .iter()
        .zip(b.masses())
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// Truncation error scaled by the noise-induced change:
/// `T(approx, exact) / T(exact, noiseless)`.
///
/// Returns `None` when the denominator is numerically zero (no noise to
/// measure against); the ratio is undefined rather than infinite.
pub fn distortion(
    approx: &ProbabilityDistribution,
    exact: &ProbabilityDistribution,
    noiseless: &ProbabilityDistribution,
) -> Result<Option<f64>> {
    let numerator = variational_distance(approx, exact)?;
    let denominator = variational_distance(exact, noiseless)?;
    if denominator < tolerance::DISTORTION_DENOMINATOR {
        return Ok(None);
    }
    Ok(Some(numerator / denominator))
}

/// `S = −Σ λ log₂ λ` over the trace-normalized spectrum.
pub fn von_neumann_entropy(eigenvalues: &[f64]) -> f64 {
    let total: f64 = eigenvalues.iter().filter(|&&v| v > 0.0).sum();
    if total <= 0.0 {
        return 0.0;
    }
    eigenvalues
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v / total)
        .filter(|&v| v > tolerance::ENTROPY_FLOOR)
        .map(|v| -v * v.log2())
        .sum()
}

/// Entropy of a factored state, from its subspace spectrum.
pub fn entropy_of_factor(l: &LFactor) -> Result<f64> {
    Ok(von_neumann_entropy(l.eigendecomposition()?.values()))
}

/// Entropy of a dense state, from its full spectrum.
pub fn entropy_of_density(rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann_entropy(&rho.eigenvalues()?))
}

/// `2^S`: effective rank with entropy measured in bits.
pub fn effective_rank_pow2(entropy_bits: f64) -> f64 {
    entropy_bits.exp2()
}

/// `e^S`: the natural-exponential variant of the effective rank.
pub fn effective_rank_exp(entropy_bits: f64) -> f64 {
    entropy_bits.exp()
}

/// Upper bound on the per-layer entropy change when every qubit passes the
/// channel once: `−Σ_α p_α log₂ p_α` of the layer's product weight
/// distribution.
///
/// Bit flip: `−Np log₂ p − N(1−p) log₂(1−p)`, first order `N(p − p log₂ p)`.
/// Depolarizing: `−Np log₂(p/3) − N(1−p) log₂(1−p)`, first order
/// `N(p − p log₂(p/3))`.
pub fn entropy_change_bound(
    kind: ChannelKind,
    p: f64,
    num_qubits: usize,
    first_order: bool,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let n = num_qubits as f64;
    let bound = match kind {
        ChannelKind::BitFlip | ChannelKind::PhaseFlip => {
            if first_order {
                n * (p - p * p.log2())
            } else {
                -n * p * p.log2() - n * (1.0 - p) * (1.0 - p).log2()
            }
        }
        ChannelKind::Depolarizing => {
            if first_order {
                n * (p - p * (p / 3.0).log2())
            } else {
                -n * p * (p / 3.0).log2() - n * (1.0 - p) * (1.0 - p).log2()
            }
        }
        ChannelKind::AmplitudeDamping => {
            return Err(Error::Internal(
                "entropy bound is defined for probabilistic-weight channels only".into(),
            ))
        }
    };
    Ok(bound)
}

/// Per-layer effective-rank growth factor `γ = (2/p)^p − 1` of the bit-flip
/// channel.
pub fn gamma_bit_flip(p: f64) -> f64 {
    (2.0 / p).powf(p) - 1.0
}

/// Per-layer effective-rank growth factor `γ = (6/p)^p − 1` of the
/// depolarizing channel.
pub fn gamma_depolarizing(p: f64) -> f64 {
    (6.0 / p).powf(p) - 1.0
}

/// `−Σ_α w_α log₂ w_α` of a channel's weight distribution; the single-qubit
/// contribution to the concavity bound.
pub fn channel_weight_entropy(kind: ChannelKind, p: f64) -> Result<f64> {
    let channel = kind.instantiate(p)?;
    Ok(channel
        .ops()
        .iter()
        .map(|op| op.weight)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum())
}
