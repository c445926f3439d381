//! Low-rank evolution with per-group eigenvalue truncation.
//!
//! Per layer the engine applies the gates to the factor, then walks the
//! layer's noise placements in groups of at most `group_size` adjacent
//! qubits. Each group multiplies the column count by the number of Kraus
//! terms (`L ← [√p₁K₁L, √p₂K₂L, …]`) and is immediately followed by a
//! truncation back to the leading eigenvectors. When the projected cost of
//! the next group — the intermediate rank — reaches the full Hilbert-space
//! dimension, compression no longer pays and the run optionally falls back
//! to dense density-matrix evolution for the remainder.

use num_complex::Complex64;

use crate::channels::{plan_groups_over, KrausChannel};
use crate::circuit::Circuit;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::factor::LFactor;
use crate::fdm;
use crate::strided::{self, TargetIndexer};

/// Engine configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LretConfig {
    /// Truncation threshold ε ∈ [0, 1): each truncation keeps the minimal
    /// leading set of eigenvalues whose trace-normalized sum reaches 1 − ε.
    pub epsilon: f64,
    /// Maximum qubits per noise group (M).
    pub group_size: usize,
    /// Switch to dense evolution once the intermediate rank reaches 2^N.
    pub fallback_enabled: bool,
    /// Record per-truncation rank statistics.
    pub rank_trace_enabled: bool,
}

impl Default for LretConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            group_size: 2,
            fallback_enabled: true,
            rank_trace_enabled: true,
        }
    }
}

impl LretConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if self.group_size == 0 {
            return Err(Error::InvalidGroupSize);
        }
        Ok(())
    }
}

/// One truncation event in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStep {
    /// Layer index (0-based).
    pub layer: usize,
    /// Group ordinal within the layer (0-based).
    pub group: usize,
    /// Columns before the group concatenation.
    pub rank_before: usize,
    /// Columns after truncation.
    pub rank_after: usize,
    /// Intermediate rank evaluated with `rank_before`.
    pub intermediate_rank: f64,
    /// Trace weight removed by this truncation.
    pub discarded_weight: f64,
}

/// Rank bookkeeping for a full run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankTrace {
    pub steps: Vec<RankStep>,
    /// Set to `(layer, group)` if the run switched to dense evolution there.
    pub fallback_at: Option<(usize, usize)>,
}

impl RankTrace {
    pub fn total_discarded(&self) -> f64 {
        self.steps.iter().map(|s| s.discarded_weight).sum()
    }

    pub fn max_intermediate_rank(&self) -> Option<f64> {
        self.steps
            .iter()
            .map(|s| s.intermediate_rank)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.steps.iter().map(|s| s.rank_after).max()
    }
}

/// Result of a low-rank run: the final factor and its rank history.
#[derive(Debug, Clone)]
pub struct LretOutcome {
    pub factor: LFactor,
    pub rank_trace: RankTrace,
    /// True if the run completed via the dense fallback engine.
    pub fell_back: bool,
}

/// Intermediate rank `V_I = (N · (4^M · V)³ / M)^(1/3)`, the per-step cost
/// scale of grouped truncation.
pub fn intermediate_rank(num_qubits: usize, group_size: usize, rank: usize) -> f64 {
    let n = num_qubits as f64;
    let m = group_size as f64;
    let width = 4f64.powi(group_size as i32) * rank as f64;
    (n * width.powi(3) / m).cbrt()
}

/// `L ← [√p₁K₁L, √p₂K₂L, …]` for one k-qubit Kraus group: each column maps
/// to one column per Kraus term, so the column count multiplies by the term
/// count while the trace is preserved.
pub fn apply_kraus_group(
    channel: &KrausChannel,
    targets: &[usize],
    l: &LFactor,
) -> Result<LFactor> {
    if channel.arity() != targets.len() {
        return Err(Error::ChannelArity {
            arity: channel.arity(),
            targets: targets.len(),
        });
    }
    for &t in targets {
        if t >= l.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: t,
                num_qubits: l.num_qubits(),
            });
        }
    }
    let dim = l.dim();
    let cols = l.num_cols();
    let indexer = TargetIndexer::new(l.num_qubits(), targets);
    let block = dim * cols;
    let mut data = vec![Complex64::ZERO; block * channel.num_ops()];
    let m = channel.matrix_dim();
    let mut scratch = vec![Complex64::ZERO; m];
    for (a, op) in channel.ops().iter().enumerate() {
        let weighted = op.weighted_matrix();
        let dst = &mut data[a * block..(a + 1) * block];
        dst.copy_from_slice(l.data());
        for col in dst.chunks_mut(dim) {
            strided::apply_to_vector(&weighted, &indexer, &mut scratch, col);
        }
    }
    let mut out = l.clone();
    out.replace_columns(cols * channel.num_ops(), data);
    Ok(out)
}

/// Runs the compressed engine from `|initial_basis_index⟩`.
pub fn run(
    circuit: &Circuit,
    config: &LretConfig,
    initial_basis_index: usize,
) -> Result<LretOutcome> {
    let initial = LFactor::basis_state(circuit.num_qubits, initial_basis_index)?;
    run_from_factor(circuit, config, initial)
}

/// Runs the compressed engine from an arbitrary factor (a basis state or a
/// sparse superposition expressed as explicit columns).
pub fn run_from_factor(
    circuit: &Circuit,
    config: &LretConfig,
    initial: LFactor,
) -> Result<LretOutcome> {
    config.validate()?;
    if initial.num_qubits() != circuit.num_qubits {
        return Err(Error::DimensionMismatch {
            left: initial.num_qubits(),
            right: circuit.num_qubits,
        });
    }
    let dim = initial.dim();
    let mut l = initial;
    let mut trace = RankTrace::default();

    for (d, layer) in circuit.layers.iter().enumerate() {
        for gate in &layer.gates {
            l = gate.apply_to_factor(&l)?;
        }
        // Gates never grow the column count; this guard only bites when an
        // oversized factor was supplied as the initial state.
        if l.num_cols() > dim {
            l = l.truncate(config.epsilon)?;
        }
        let mut group_ordinal = 0usize;
        for (pi, placement) in layer.noise.iter().enumerate() {
            let channel = placement.channel.instantiate(placement.p)?;
            let plan = plan_groups_over(&placement.qubits, config.group_size)?;
            for group in plan.groups() {
                let rank_before = l.num_cols();
                let vi = intermediate_rank(circuit.num_qubits, config.group_size, rank_before);
                if config.fallback_enabled && vi >= dim as f64 {
                    trace.fallback_at = Some((d, group_ordinal));
                    let rho = l.to_density();
                    let rho = finish_dense(circuit, rho, d, pi, group[0])?;
                    let factor = rho.eigendecomposition()?.to_factor(circuit.num_qubits)?;
                    return Ok(LretOutcome {
                        factor,
                        rank_trace: trace,
                        fell_back: true,
                    });
                }
                let grouped = channel.tensor_power(group.len())?;
                let trace_before = l.trace();
                l = apply_kraus_group(&grouped, group, &l)?;
                l = l.truncate(config.epsilon)?;
                if config.rank_trace_enabled {
                    trace.steps.push(RankStep {
                        layer: d,
                        group: group_ordinal,
                        rank_before,
                        rank_after: l.num_cols(),
                        intermediate_rank: vi,
                        discarded_weight: trace_before - l.trace(),
                    });
                }
                group_ordinal += 1;
            }
        }
    }
    Ok(LretOutcome {
        factor: l,
        rank_trace: trace,
        fell_back: false,
    })
}

/// Completes a run densely after fallback: the interrupted placement's
/// remaining qubits, the rest of the layer's noise placements, then all
/// remaining layers. Per-qubit application equals the grouped tensor channel
/// for product channels, so the dense path needs no grouping.
fn finish_dense(
    circuit: &Circuit,
    mut rho: DensityMatrix,
    layer_index: usize,
    placement_index: usize,
    resume_qubit: usize,
) -> Result<DensityMatrix> {
    let noise = &circuit.layers[layer_index].noise;
    for (pi, placement) in noise.iter().enumerate().skip(placement_index) {
        let channel = placement.channel.instantiate(placement.p)?;
        let start = if pi == placement_index {
            placement
                .qubits
                .iter()
                .position(|&q| q == resume_qubit)
                .unwrap_or(0)
        } else {
            0
        };
        for &q in &placement.qubits[start..] {
            fdm::apply_channel_in_place(&channel, &[q], &mut rho);
        }
    }
    fdm::run_from(circuit, rho, layer_index + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ChannelKind, Layer, NoisePlacement};
    use crate::gates::Gate;

    const C0: Complex64 = Complex64::ZERO;

    #[test]
    fn bit_flip_group_on_ground_state() {
        let p = 0.2;
        let ch = KrausChannel::bit_flip(p).unwrap();
        let l = LFactor::basis_state(1, 0).unwrap();
        let out = apply_kraus_group(&ch, &[0], &l).unwrap();
        assert_eq!(out.num_cols(), 2);
        let c0 = out.column(0);
        let c1 = out.column(1);
        assert!((c0[0].re - (1.0f64 - p).sqrt()).abs() < 1e-15);
        assert!(c0[1].norm() < 1e-15);
        assert!(c1[0].norm() < 1e-15);
        assert!((c1[1].re - p.sqrt()).abs() < 1e-15);
        let rho = out.to_density();
        assert!((rho.entry(0, 0).re - (1.0 - p)).abs() < 1e-14);
        assert!((rho.entry(1, 1).re - p).abs() < 1e-14);
    }

    #[test]
    fn column_count_multiplies_by_term_count() {
        // Three columns through a two-term channel give six columns.
        let s = (1.0f64 / 6.0).sqrt();
        let data = vec![Complex64::new(s, 0.0); 6];
        let l = LFactor::from_columns(1, 3, data).unwrap();
        let ch = KrausChannel::bit_flip(0.1).unwrap();
        let out = apply_kraus_group(&ch, &[0], &l).unwrap();
        assert_eq!(out.num_cols(), 6);
        assert!((out.trace() - l.trace()).abs() < 1e-12);
    }

    #[test]
    fn identity_mix_preserves_columns() {
        let ch = KrausChannel::bit_flip(0.0).unwrap();
        let l = LFactor::basis_state(2, 1).unwrap();
        let out = apply_kraus_group(&ch, &[1], &l).unwrap();
        assert_eq!(out.num_cols(), 2);
        // The p = 0 branch carries zero weight; the density is unchanged.
        assert!(l.to_density().max_entry_distance(&out.to_density()) < 1e-14);
    }

    #[test]
    fn intermediate_rank_matches_formula() {
        let vi = intermediate_rank(12, 2, 3);
        let direct = (12.0 * (48.0f64).powi(3) / 2.0).cbrt();
        assert!((vi - direct).abs() < 1e-9);
        assert!((vi - 87.22).abs() < 0.01);
    }

    #[test]
    fn intermediate_rank_single_group_reduces() {
        // One group spanning the register: V_I = 4^N · V.
        for v in [1usize, 3, 10] {
            let vi = intermediate_rank(3, 3, v);
            assert!((vi - 64.0 * v as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn intermediate_rank_monotone_in_rank() {
        let a = intermediate_rank(10, 2, 4);
        let b = intermediate_rank(10, 2, 5);
        assert!(b > a);
    }

    #[test]
    fn noiseless_run_keeps_rank_one() {
        let mut layers = Vec::new();
        for q in 0..3 {
            layers.push(Layer {
                gates: vec![Gate::standard("H", &[q], None).unwrap()],
                noise: vec![],
            });
        }
        let circuit = Circuit::new(3, layers).unwrap();
        let out = run(&circuit, &LretConfig::default(), 0).unwrap();
        assert_eq!(out.factor.num_cols(), 1);
        assert!(out.rank_trace.steps.is_empty());
        assert!(!out.fell_back);
    }

    #[test]
    fn noisy_run_matches_dense_engine_exactly() {
        let layer = Layer {
            gates: vec![
                Gate::standard("H", &[0], None).unwrap(),
                Gate::standard("RY", &[1], Some(0.7)).unwrap(),
            ],
            noise: vec![NoisePlacement {
                channel: ChannelKind::Depolarizing,
                p: 0.01,
                qubits: vec![0, 1],
            }],
        };
        let circuit = Circuit::new(2, vec![layer]).unwrap();
        let config = LretConfig {
            epsilon: 0.0,
            fallback_enabled: false,
            ..Default::default()
        };
        let out = run(&circuit, &config, 0).unwrap();
        let dense = fdm::run(&circuit, 0).unwrap();
        assert!(out.factor.to_density().frobenius_distance(&dense) < 1e-12);
    }

    #[test]
    fn fallback_matches_pure_dense_run() {
        // Small register: the intermediate rank exceeds 2^N immediately, so
        // a default-config run falls back on the first group.
        let layer = |angle: f64| Layer {
            gates: vec![
                Gate::standard("RY", &[0], Some(angle)).unwrap(),
                Gate::standard("CNOT", &[1, 2], None).unwrap(),
            ],
            noise: vec![NoisePlacement {
                channel: ChannelKind::Depolarizing,
                p: 0.05,
                qubits: vec![0, 1, 2],
            }],
        };
        let circuit = Circuit::new(3, vec![layer(0.3), layer(1.1)]).unwrap();
        let out = run(&circuit, &LretConfig::default(), 0).unwrap();
        assert!(out.fell_back);
        assert!(out.rank_trace.fallback_at.is_some());
        let dense = fdm::run(&circuit, 0).unwrap();
        assert!(out.factor.to_density().frobenius_distance(&dense) < 1e-8);
    }

    #[test]
    fn trace_bookkeeping_accounts_for_discarded_weight() {
        let mut layers = Vec::new();
        for q in 0..4 {
            layers.push(Layer {
                gates: vec![Gate::standard("H", &[q], None).unwrap()],
                noise: vec![NoisePlacement {
                    channel: ChannelKind::Depolarizing,
                    p: 0.02,
                    qubits: vec![0, 1, 2, 3],
                }],
            });
        }
        let circuit = Circuit::new(4, layers).unwrap();
        let config = LretConfig {
            epsilon: 1e-3,
            fallback_enabled: false,
            ..Default::default()
        };
        let out = run(&circuit, &config, 0).unwrap();
        let expected = 1.0 - out.rank_trace.total_discarded();
        assert!((out.factor.trace() - expected).abs() < 1e-10);
    }

    #[test]
    fn oversized_initial_factor_is_compacted_after_gates() {
        // Five redundant copies of |0⟩/√5 exceed 2^1 columns; the post-gate
        // guard compacts them to the numerical rank.
        let s = Complex64::new((0.2f64).sqrt(), 0.0);
        let data = vec![s, C0, s, C0, s, C0, s, C0, s, C0];
        let initial = LFactor::from_columns(1, 5, data).unwrap();
        let circuit = Circuit::new(
            1,
            vec![Layer {
                gates: vec![Gate::standard("H", &[0], None).unwrap()],
                noise: vec![],
            }],
        )
        .unwrap();
        let config = LretConfig {
            epsilon: 0.0,
            fallback_enabled: false,
            ..Default::default()
        };
        let out = run_from_factor(&circuit, &config, initial).unwrap();
        assert_eq!(out.factor.num_cols(), 1);
        assert!((out.factor.trace() - 1.0).abs() < 1e-12);
    }
}
