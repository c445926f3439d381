//! Kraus decoherence channels and their composition over qubit groups.
//!
//! A channel maps `ρ → Σ_α p_α K_α ρ K_α†` and must be trace preserving:
//! `Σ_α p_α K_α† K_α = I`. Probability weights may sit outside the matrices
//! (depolarizing, bit flip, unitary mixes) or be absorbed into them
//! (amplitude damping); consumers only ever use the products `√p_α · K_α`,
//! which makes the two conventions interchangeable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{self, unitarity_deviation};
use crate::tolerance;

const ZERO: Complex64 = Complex64::ZERO;
const ONE: Complex64 = Complex64::ONE;

/// One Kraus term: a weight `p_α` and a row-major `2^k × 2^k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOp {
    pub weight: f64,
    pub matrix: Vec<Complex64>,
}

impl KrausOp {
    /// The matrix scaled by `√p_α`, the only form the engines consume.
    pub fn weighted_matrix(&self) -> Vec<Complex64> {
        let s = self.weight.sqrt();
        self.matrix.iter().map(|z| z * s).collect()
    }
}

/// A named Kraus channel acting on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    name: String,
    arity: usize,
    ops: Vec<KrausOp>,
}

impl KrausChannel {
    fn new(name: impl Into<String>, arity: usize, ops: Vec<KrausOp>) -> Result<Self> {
        let channel = Self {
            name: name.into(),
            arity,
            ops,
        };
        if channel.ops.iter().any(|op| op.weight < 0.0) {
            return Err(Error::InvalidProbability(-1.0));
        }
        let dev = channel.completeness_deviation();
        if dev > tolerance::COMPLETENESS {
            return Err(Error::Internal(format!(
                "channel `{}` violates completeness by {dev:.3e}",
                channel.name
            )));
        }
        Ok(channel)
    }

    /// `ρ → (1−p)ρ + p/3 (XρX + YρY + ZρZ)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability(p)?;
        let ops = vec![
            KrausOp {
                weight: 1.0 - p,
                matrix: gates::pauli_i(),
            },
            KrausOp {
                weight: p / 3.0,
                matrix: gates::pauli_x(),
            },
            KrausOp {
                weight: p / 3.0,
                matrix: gates::pauli_y(),
            },
            KrausOp {
                weight: p / 3.0,
                matrix: gates::pauli_z(),
            },
        ];
        Self::new("depolarizing", 1, ops)
    }

    /// `ρ → (1−p)ρ + p XρX`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::unitary_mix_named("bitflip", p, gates::pauli_x())
    }

    /// `ρ → (1−p)ρ + p ZρZ`.
    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::unitary_mix_named("phaseflip", p, gates::pauli_z())
    }

    /// `ρ → (1−p)ρ + p UρU†` for an arbitrary one-qubit unitary.
    pub fn unitary_mix(p: f64, unitary: Vec<Complex64>) -> Result<Self> {
        Self::unitary_mix_named("unitary-mix", p, unitary)
    }

    fn unitary_mix_named(name: &str, p: f64, unitary: Vec<Complex64>) -> Result<Self> {
        check_probability(p)?;
        if unitary.len() != 4 {
            return Err(Error::DimensionMismatch {
                left: unitary.len(),
                right: 4,
            });
        }
        let dev = unitarity_deviation(&unitary, 2);
        if dev > tolerance::UNITARITY {
            return Err(Error::NotUnitary(dev));
        }
        let ops = vec![
            KrausOp {
                weight: 1.0 - p,
                matrix: gates::pauli_i(),
            },
            KrausOp {
                weight: p,
                matrix: unitary,
            },
        ];
        Self::new(name, 1, ops)
    }

    /// Energy relaxation towards |0⟩ with unit weights:
    /// `E₀ = [[1, 0], [0, √(1−p)]]`, `E₁ = [[0, √p], [0, 0]]`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        check_probability(p)?;
        let e0 = vec![ONE, ZERO, ZERO, Complex64::new((1.0 - p).sqrt(), 0.0)];
        let e1 = vec![ZERO, Complex64::new(p.sqrt(), 0.0), ZERO, ZERO];
        let ops = vec![
            KrausOp {
                weight: 1.0,
                matrix: e0,
            },
            KrausOp {
                weight: 1.0,
                matrix: e1,
            },
        ];
        Self::new("amplitude-damping", 1, ops)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix_dim(&self) -> usize {
        1 << self.arity
    }

    pub fn ops(&self) -> &[KrausOp] {
        &self.ops
    }

    pub fn num_ops(&self) -> usize {
        self.ops.len()
    }

    /// `max |Σ_α p_α K_α†K_α − I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.matrix_dim();
        let mut sum = vec![ZERO; dim * dim];
        for op in &self.ops {
            // (K†K)_{ij} = Σ_l conj(K_{li}) K_{lj}
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = ZERO;
                    for l in 0..dim {
                        acc += op.matrix[l * dim + i].conj() * op.matrix[l * dim + j];
                    }
                    sum[i * dim + j] += acc * op.weight;
                }
            }
        }
        let mut dev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { ONE } else { ZERO };
                dev = dev.max((sum[i * dim + j] - expect).norm());
            }
        }
        dev
    }

    /// k-fold tensor power of a one-qubit channel; `A^k` terms with product
    /// weights, completeness preserved.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if self.arity != 1 {
            return Err(Error::ChannelArity {
                arity: self.arity,
                targets: 1,
            });
        }
        if k == 0 {
            return Err(Error::InvalidGroupSize);
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let mut ops = vec![KrausOp {
            weight: 1.0,
            matrix: vec![ONE],
        }];
        for _ in 0..k {
            let mut next = Vec::with_capacity(ops.len() * self.ops.len());
            for acc in &ops {
                for op in &self.ops {
                    next.push(KrausOp {
                        weight: acc.weight * op.weight,
                        matrix: kron(&acc.matrix, &op.matrix),
                    });
                }
            }
            ops = next;
        }
        Self::new(format!("{}^{k}", self.name), k, ops)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Kronecker product of row-major square matrices.
pub(crate) fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let na = (a.len() as f64).sqrt() as usize;
    let nb = (b.len() as f64).sqrt() as usize;
    let n = na * nb;
    let mut out = vec![ZERO; n * n];
    for ia in 0..na {
        for ja in 0..na {
            let scale = a[ia * na + ja];
            for ib in 0..nb {
                for jb in 0..nb {
                    out[(ia * nb + ib) * n + (ja * nb + jb)] = scale * b[ib * nb + jb];
                }
            }
        }
    }
    out
}

/// Partition of qubit indices into contiguous blocks of at most `group_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPlan {
    groups: Vec<Vec<usize>>,
}

impl GroupPlan {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

/// Splits `0..num_qubits` into contiguous blocks of size `group_size`; the
/// last block is smaller when the sizes do not divide evenly.
pub fn plan_groups(num_qubits: usize, group_size: usize) -> Result<GroupPlan> {
    if group_size == 0 {
        return Err(Error::InvalidGroupSize);
    }
    let qubits: Vec<usize> = (0..num_qubits).collect();
    Ok(GroupPlan {
        groups: qubits.chunks(group_size).map(|c| c.to_vec()).collect(),
    })
}

/// Groups an explicit (ascending) qubit list into contiguous runs of at most
/// `group_size`; runs break wherever the indices are non-adjacent.
pub fn plan_groups_over(qubits: &[usize], group_size: usize) -> Result<GroupPlan> {
    if group_size == 0 {
        return Err(Error::InvalidGroupSize);
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &q in qubits {
        match groups.last_mut() {
            Some(run) if run.len() < group_size && *run.last().unwrap() + 1 == q => run.push(q),
            _ => groups.push(vec![q]),
        }
    }
    Ok(GroupPlan { groups })
}
