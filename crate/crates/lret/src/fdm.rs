//! Reference engine: direct evolution of the full density matrix.
//!
//! Ground truth for all equivalence tests. Channels are applied by strided
//! conjugation of each weighted Kraus matrix over the target qubits; the
//! `2^N × 2^N` embedding of a Kraus matrix is never built.

use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::circuit::Circuit;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::strided::TargetIndexer;

/// `ρ → Σ_α p_α K_α ρ K_α†` on the given target qubits.
pub fn apply_channel(
    channel: &KrausChannel,
    targets: &[usize],
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    if channel.arity() != targets.len() {
        return Err(Error::ChannelArity {
            arity: channel.arity(),
            targets: targets.len(),
        });
    }
    for &t in targets {
        if t >= rho.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: t,
                num_qubits: rho.num_qubits(),
            });
        }
    }
    let mut out = rho.clone();
    apply_channel_in_place(channel, targets, &mut out);
    Ok(out)
}

/// In-place blockwise form of [`apply_channel`].
///
/// Row and column target bits tile the matrix into disjoint `2^k × 2^k`
/// blocks `B`, each mapping independently to `Σ_α p_α K_α B K_α†`.
pub(crate) fn apply_channel_in_place(
    channel: &KrausChannel,
    targets: &[usize],
    rho: &mut DensityMatrix,
) {
    let n = rho.num_qubits();
    let dim = rho.dim();
    let indexer = TargetIndexer::new(n, targets);
    let m = 1usize << targets.len();
    let weighted: Vec<Vec<Complex64>> = channel.ops().iter().map(|op| op.weighted_matrix()).collect();

    let data = rho.data_mut();
    let mut rows = vec![0usize; m];
    let mut cols = vec![0usize; m];
    let mut block = vec![Complex64::ZERO; m * m];
    let mut tmp = vec![Complex64::ZERO; m * m];
    let mut acc = vec![Complex64::ZERO; m * m];

    for cb in 0..indexer.base_count {
        let cbase = indexer.base(cb);
        for (l, c) in cols.iter_mut().enumerate() {
            *c = (cbase + indexer.offsets[l]) * dim;
        }
        for rb in 0..indexer.base_count {
            let rbase = indexer.base(rb);
            for (l, r) in rows.iter_mut().enumerate() {
                *r = rbase + indexer.offsets[l];
            }
            for i in 0..m {
                for j in 0..m {
                    block[i * m + j] = data[rows[i] + cols[j]];
                }
            }
            acc.fill(Complex64::ZERO);
            for k in &weighted {
                // tmp = K · B
                for i in 0..m {
                    for j in 0..m {
                        let mut s = Complex64::ZERO;
                        for l in 0..m {
                            s += k[i * m + l] * block[l * m + j];
                        }
                        tmp[i * m + j] = s;
                    }
                }
                // acc += tmp · K†
                for i in 0..m {
                    for j in 0..m {
                        let mut s = Complex64::ZERO;
                        for l in 0..m {
                            s += tmp[i * m + l] * k[j * m + l].conj();
                        }
                        acc[i * m + j] += s;
                    }
                }
            }
            for i in 0..m {
                for j in 0..m {
                    data[rows[i] + cols[j]] = acc[i * m + j];
                }
            }
        }
    }
}

/// Evolves `|initial_basis_index⟩⟨initial_basis_index|` through the circuit:
/// per layer, gates first, then noise placements in listed order.
pub fn run(circuit: &Circuit, initial_basis_index: usize) -> Result<DensityMatrix> {
    let rho = DensityMatrix::basis_state(circuit.num_qubits, initial_basis_index)?;
    run_from(circuit, rho, 0)
}

/// Continues an evolution from an existing state, starting at `first_layer`.
pub(crate) fn run_from(
    circuit: &Circuit,
    mut rho: DensityMatrix,
    first_layer: usize,
) -> Result<DensityMatrix> {
    for layer in &circuit.layers[first_layer..] {
        for gate in &layer.gates {
            rho = gate.apply_to_density(&rho)?;
        }
        for placement in &layer.noise {
            let channel = placement.channel.instantiate(placement.p)?;
            for &q in &placement.qubits {
                if q >= rho.num_qubits() {
                    return Err(Error::QubitOutOfRange {
                        qubit: q,
                        num_qubits: rho.num_qubits(),
                    });
                }
                apply_channel_in_place(&channel, &[q], &mut rho);
            }
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ChannelKind, Layer, NoisePlacement};
    use crate::gates::Gate;

    #[test]
    fn empty_circuit_returns_initial_state() {
        let circuit = Circuit::new(2, vec![]).unwrap();
        let rho = run(&circuit, 3).unwrap();
        assert_eq!(rho.diagonal(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn amplitude_damping_weak_on_excited() {
        let ch = KrausChannel::amplitude_damping(0.001).unwrap();
        let rho = DensityMatrix::basis_state(1, 1).unwrap();
        let out = apply_channel(&ch, &[0], &rho).unwrap();
        assert!((out.entry(0, 0).re - 0.001).abs() < 1e-15);
        assert!((out.entry(1, 1).re - 0.999).abs() < 1e-15);
    }

    #[test]
    fn channel_arity_mismatch_is_rejected() {
        let ch = KrausChannel::depolarizing(0.1).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(matches!(
            apply_channel(&ch, &[0, 1], &rho),
            Err(Error::ChannelArity { .. })
        ));
    }

    #[test]
    fn two_qubit_tensor_channel_matches_sequential_single_qubit() {
        let ch = KrausChannel::depolarizing(0.1).unwrap();
        let pair = ch.tensor_power(2).unwrap();
        let h0 = Gate::standard("H", &[0], None).unwrap();
        let cnot = Gate::standard("CNOT", &[0, 1], None).unwrap();
        let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
        let rho = cnot
            .apply_to_density(&h0.apply_to_density(&rho0).unwrap())
            .unwrap();

        let grouped = apply_channel(&pair, &[0, 1], &rho).unwrap();
        let mut sequential = rho.clone();
        apply_channel_in_place(&ch, &[0], &mut sequential);
        apply_channel_in_place(&ch, &[1], &mut sequential);
        assert!(grouped.max_entry_distance(&sequential) < 1e-14);
    }

    #[test]
    fn full_noise_layer_preserves_trace() {
        let mut layers = Vec::new();
        for _ in 0..3 {
            layers.push(Layer {
                gates: vec![Gate::standard("H", &[0], None).unwrap()],
                noise: vec![NoisePlacement {
                    channel: ChannelKind::Depolarizing,
                    p: 0.05,
                    qubits: vec![0, 1, 2],
                }],
            });
        }
        let circuit = Circuit::new(3, layers).unwrap();
        let rho = run(&circuit, 0).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_deviation() < 1e-12);
    }
}
