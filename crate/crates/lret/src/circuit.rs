//! Circuit data model and the three benchmark circuit families: seeded
//! random circuits, the state-preparation ladder, and amplitude-amplified
//! Hamming-weight search.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::gates::Gate;

/// Named one-qubit channel kinds that circuits can reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "depolarizing")]
    Depolarizing,
    #[serde(rename = "bitflip")]
    BitFlip,
    #[serde(rename = "phaseflip")]
    PhaseFlip,
    #[serde(rename = "amplitude-damping")]
    AmplitudeDamping,
}

impl ChannelKind {
    pub fn instantiate(&self, p: f64) -> Result<KrausChannel> {
        match self {
            ChannelKind::Depolarizing => KrausChannel::depolarizing(p),
            ChannelKind::BitFlip => KrausChannel::bit_flip(p),
            ChannelKind::PhaseFlip => KrausChannel::phase_flip(p),
            ChannelKind::AmplitudeDamping => KrausChannel::amplitude_damping(p),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::BitFlip => "bitflip",
            ChannelKind::PhaseFlip => "phaseflip",
            ChannelKind::AmplitudeDamping => "amplitude-damping",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "depolarizing" => Ok(ChannelKind::Depolarizing),
            "bitflip" => Ok(ChannelKind::BitFlip),
            "phaseflip" => Ok(ChannelKind::PhaseFlip),
            "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
            other => Err(Error::CircuitFormat(format!("unknown channel `{other}`"))),
        }
    }
}

/// A one-qubit channel applied independently to each listed qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePlacement {
    pub channel: ChannelKind,
    pub p: f64,
    pub qubits: Vec<usize>,
}

/// One time step: gates on disjoint target sets, then noise placements.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layer {
    pub gates: Vec<Gate>,
    pub noise: Vec<NoisePlacement>,
}

/// An ordered sequence of layers on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub layers: Vec<Layer>,
}

impl Circuit {
    /// Builds a circuit, validating qubit ranges and per-layer disjointness
    /// of gate targets.
    pub fn new(num_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidCircuit("need at least one qubit".into()));
        }
        for (d, layer) in layers.iter().enumerate() {
            let mut used = vec![false; num_qubits];
            for gate in &layer.gates {
                for &t in gate.targets() {
                    if t >= num_qubits {
                        return Err(Error::QubitOutOfRange {
                            qubit: t,
                            num_qubits,
                        });
                    }
                    if used[t] {
                        return Err(Error::InvalidCircuit(format!(
                            "layer {d}: qubit {t} targeted by two gates"
                        )));
                    }
                    used[t] = true;
                }
            }
            for placement in &layer.noise {
                for &q in &placement.qubits {
                    if q >= num_qubits {
                        return Err(Error::QubitOutOfRange {
                            qubit: q,
                            num_qubits,
                        });
                    }
                }
            }
        }
        Ok(Self { num_qubits, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Adds a noise placement after every layer: all qubits in `Dense` mode,
    /// only the qubits touched by that layer's gates in `Sparse` mode.
    pub fn with_noise(mut self, channel: ChannelKind, p: f64, mode: NoiseMode) -> Circuit {
        for layer in &mut self.layers {
            let qubits: Vec<usize> = match mode {
                NoiseMode::Dense => (0..self.num_qubits).collect(),
                NoiseMode::Sparse => {
                    let mut touched: Vec<usize> = layer
                        .gates
                        .iter()
                        .flat_map(|g| g.targets().iter().copied())
                        .collect();
                    touched.sort_unstable();
                    touched.dedup();
                    touched
                }
            };
            if !qubits.is_empty() {
                layer.noise.push(NoisePlacement { channel, p, qubits });
            }
        }
        self
    }
}

/// Whether every qubit receives a gate in every layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateDensity {
    Dense,
    /// Each qubit participates with the given probability per layer.
    Sparse(f64),
}

/// Which qubit pairs two-qubit gates may connect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Adjacent indices only, `(q, q+1)`, no wraparound.
    Local,
    /// Any pair.
    Global,
}

/// Whether channels follow every qubit per layer or only gated qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Dense,
    Sparse,
}

/// Parameters for the seeded random circuit family.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCircuitSpec {
    pub num_qubits: usize,
    pub depth: usize,
    pub density: GateDensity,
    pub connectivity: Connectivity,
    pub noise_mode: NoiseMode,
    pub channel: ChannelKind,
    pub p: f64,
    pub seed: u64,
}

const ONE_QUBIT_GATES: [&str; 8] = ["X", "Y", "Z", "S", "T", "RX", "RY", "RZ"];
const TWO_QUBIT_GATES: [&str; 3] = ["SWAP", "CZ", "CNOT"];

/// Generates a random circuit, deterministically for a fixed spec.
///
/// Dense circuits cover every qubit with a gate in every layer, choosing
/// one- and two-qubit gates with equal probability; sparse circuits include
/// each qubit with the given fraction per layer. Local connectivity pairs
/// adjacent indices only. Rotation angles are uniform over `[0, 2π)`.
pub fn random_circuit(spec: &RandomCircuitSpec) -> Result<Circuit> {
    if spec.num_qubits == 0 {
        return Err(Error::InvalidCircuit("need at least one qubit".into()));
    }
    if spec.depth == 0 {
        return Err(Error::InvalidCircuit("depth must be at least 1".into()));
    }
    if let GateDensity::Sparse(f) = spec.density {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidCircuit(format!(
                "sparse fraction {f} outside (0, 1]"
            )));
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut layers = Vec::with_capacity(spec.depth);
    for _ in 0..spec.depth {
        let selected: Vec<usize> = match spec.density {
            GateDensity::Dense => (0..spec.num_qubits).collect(),
            GateDensity::Sparse(f) => (0..spec.num_qubits)
                .filter(|_| rng.random::<f64>() < f)
                .collect(),
        };
        let mut gates = Vec::new();
        let mut uncovered = selected.clone();
        while let Some(q) = uncovered.first().copied() {
            uncovered.remove(0);
            let want_pair = rng.random::<bool>();
            let partner = if want_pair {
                match spec.connectivity {
                    Connectivity::Local => uncovered
                        .first()
                        .copied()
                        .filter(|&w| w == q + 1)
                        .map(|w| (0usize, w)),
                    Connectivity::Global => {
                        if uncovered.is_empty() {
                            None
                        } else {
                            let i = rng.random_range(0..uncovered.len());
                            Some((i, uncovered[i]))
                        }
                    }
                }
            } else {
                None
            };
            match partner {
                Some((i, w)) => {
                    uncovered.remove(i);
                    let name = TWO_QUBIT_GATES[rng.random_range(0..TWO_QUBIT_GATES.len())];
                    gates.push(Gate::standard(name, &[q, w], None)?);
                }
                None => {
                    let name = ONE_QUBIT_GATES[rng.random_range(0..ONE_QUBIT_GATES.len())];
                    let angle = if matches!(name, "RX" | "RY" | "RZ") {
                        Some(rng.random_range(0.0..std::f64::consts::TAU))
                    } else {
                        None
                    };
                    gates.push(Gate::standard(name, &[q], angle)?);
                }
            }
        }
        let noise_qubits: Vec<usize> = match spec.noise_mode {
            NoiseMode::Dense => (0..spec.num_qubits).collect(),
            NoiseMode::Sparse => selected.clone(),
        };
        let noise = if noise_qubits.is_empty() {
            vec![]
        } else {
            vec![NoisePlacement {
                channel: spec.channel,
                p: spec.p,
                qubits: noise_qubits,
            }]
        };
        layers.push(Layer { gates, noise });
    }
    Circuit::new(spec.num_qubits, layers)
}

/// Noiseless state-preparation ladder: `RY(θ₁)` on qubit 0, then for each
/// subsequent qubit a two-qubit `RY2Q_FY(θ)` on `(q−1, q)` followed by a CZ
/// coupler on the same pair, one gate per layer.
///
/// Angles may be given explicitly (one per qubit) or drawn uniformly from
/// `[0, 2π)` using the seed. Attach noise with [`Circuit::with_noise`].
pub fn mcvqe_state_prep(
    num_qubits: usize,
    angles: Option<&[f64]>,
    seed: Option<u64>,
) -> Result<Circuit> {
    if num_qubits == 0 {
        return Err(Error::InvalidCircuit("need at least one qubit".into()));
    }
    let angles: Vec<f64> = match angles {
        Some(a) => {
            if a.len() != num_qubits {
                return Err(Error::AngleCount {
                    expected: num_qubits,
                    got: a.len(),
                });
            }
            a.to_vec()
        }
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed.unwrap_or(0));
            (0..num_qubits)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect()
        }
    };
    let mut layers = Vec::new();
    layers.push(Layer {
        gates: vec![Gate::standard("RY", &[0], Some(angles[0]))?],
        noise: vec![],
    });
    for q in 1..num_qubits {
        layers.push(Layer {
            gates: vec![Gate::standard("RY2Q_FY", &[q - 1, q], Some(angles[q]))?],
            noise: vec![],
        });
        layers.push(Layer {
            gates: vec![Gate::standard("CZ", &[q - 1, q], None)?],
            noise: vec![],
        });
    }
    Circuit::new(num_qubits, layers)
}

/// Binomial coefficient, exact for the small arguments used here.
fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Number of basis states with Hamming weight at most `threshold`.
pub fn good_state_count(num_qubits: usize, threshold: usize) -> u64 {
    (0..=threshold).map(|w| binomial(num_qubits, w)).sum()
}

/// `⌊(π/4)·√(1/p_good)⌋` with `p_good` the good-state fraction.
pub fn grover_iteration_count(num_qubits: usize, threshold: usize) -> usize {
    let p_good = good_state_count(num_qubits, threshold) as f64 / (1u64 << num_qubits) as f64;
    (std::f64::consts::FRAC_PI_4 * (1.0 / p_good).sqrt()).floor() as usize
}

/// Noiseless amplitude-amplification circuit for states with Hamming weight
/// at most `hamming_threshold`.
///
/// One layer of H gates prepares the uniform superposition, then each
/// iterate — the phase oracle composed with the diffusion operator — is
/// applied as a single full-register unitary, one per layer. Attach noise
/// with [`Circuit::with_noise`].
pub fn grover_circuit(num_qubits: usize, hamming_threshold: usize) -> Result<Circuit> {
    if num_qubits == 0 {
        return Err(Error::InvalidCircuit("need at least one qubit".into()));
    }
    if hamming_threshold == 0 || hamming_threshold > num_qubits {
        return Err(Error::InvalidHammingThreshold {
            threshold: hamming_threshold,
            num_qubits,
        });
    }
    let mut layers = Vec::new();
    let h_layer: Vec<Gate> = (0..num_qubits)
        .map(|q| Gate::standard("H", &[q], None))
        .collect::<Result<_>>()?;
    layers.push(Layer {
        gates: h_layer,
        noise: vec![],
    });

    let iterations = grover_iteration_count(num_qubits, hamming_threshold);
    if iterations > 0 {
        let iterate = grover_iterate(num_qubits, hamming_threshold);
        let targets: Vec<usize> = (0..num_qubits).collect();
        for _ in 0..iterations {
            layers.push(Layer {
                gates: vec![Gate::custom_unchecked(
                    "GROVER_ITERATE",
                    &targets,
                    iterate.clone(),
                )],
                noise: vec![],
            });
        }
    }
    Circuit::new(num_qubits, layers)
}

/// Dense `2^N × 2^N` iterate `D·O`: the oracle `O` flips the sign of good
/// states and the diffusion `D = 2|s⟩⟨s| − I` reflects about the uniform
/// superposition. Row-major.
pub fn grover_iterate(num_qubits: usize, hamming_threshold: usize) -> Vec<Complex64> {
    let dim = 1usize << num_qubits;
    let two_over = 2.0 / dim as f64;
    let mut out = vec![Complex64::ZERO; dim * dim];
    for y in 0..dim {
        let oracle_sign = if (y as u64).count_ones() as usize <= hamming_threshold {
            -1.0
        } else {
            1.0
        };
        for x in 0..dim {
            let diffusion = if x == y { two_over - 1.0 } else { two_over };
            out[x * dim + y] = Complex64::new(diffusion * oracle_sign, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::unitarity_deviation;
    use crate::tolerance;

    fn dense_local_spec(seed: u64) -> RandomCircuitSpec {
        RandomCircuitSpec {
            num_qubits: 4,
            depth: 3,
            density: GateDensity::Dense,
            connectivity: Connectivity::Local,
            noise_mode: NoiseMode::Dense,
            channel: ChannelKind::Depolarizing,
            p: 0.01,
            seed,
        }
    }

    fn layer_coverage(layer: &Layer) -> Vec<usize> {
        let mut qs: Vec<usize> = layer
            .gates
            .iter()
            .flat_map(|g| g.targets().iter().copied())
            .collect();
        qs.sort_unstable();
        qs
    }

    #[test]
    fn dense_layers_cover_every_qubit() {
        let circuit = random_circuit(&dense_local_spec(11)).unwrap();
        for layer in &circuit.layers {
            assert_eq!(layer_coverage(layer), vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn same_seed_reproduces_circuit() {
        let a = random_circuit(&dense_local_spec(99)).unwrap();
        let b = random_circuit(&dense_local_spec(99)).unwrap();
        assert_eq!(a, b);
        let c = random_circuit(&dense_local_spec(100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn local_two_qubit_gates_are_adjacent() {
        let mut spec = dense_local_spec(7);
        spec.num_qubits = 6;
        spec.depth = 8;
        let circuit = random_circuit(&spec).unwrap();
        for layer in &circuit.layers {
            for gate in &layer.gates {
                if gate.targets().len() == 2 {
                    assert_eq!(gate.targets()[1], gate.targets()[0] + 1);
                }
            }
        }
    }

    #[test]
    fn sparse_coverage_approaches_fraction() {
        let spec = RandomCircuitSpec {
            num_qubits: 16,
            depth: 400,
            density: GateDensity::Sparse(0.5),
            connectivity: Connectivity::Local,
            noise_mode: NoiseMode::Sparse,
            channel: ChannelKind::BitFlip,
            p: 0.001,
            seed: 5,
        };
        let circuit = random_circuit(&spec).unwrap();
        let total: usize = circuit.layers.iter().map(|l| layer_coverage(l).len()).sum();
        let mean = total as f64 / (16.0 * 400.0);
        assert!((mean - 0.5).abs() < 0.02, "mean coverage {mean}");
    }

    #[test]
    fn sparse_noise_follows_gates() {
        let spec = RandomCircuitSpec {
            num_qubits: 8,
            depth: 20,
            density: GateDensity::Sparse(0.4),
            connectivity: Connectivity::Local,
            noise_mode: NoiseMode::Sparse,
            channel: ChannelKind::Depolarizing,
            p: 0.001,
            seed: 3,
        };
        let circuit = random_circuit(&spec).unwrap();
        for layer in &circuit.layers {
            let covered = layer_coverage(layer);
            if covered.is_empty() {
                assert!(layer.noise.is_empty());
            } else {
                assert_eq!(layer.noise[0].qubits, covered);
            }
        }
    }

    #[test]
    fn mcvqe_gate_count() {
        let circuit = mcvqe_state_prep(4, Some(&[0.1, 0.2, 0.3, 0.4]), None).unwrap();
        let names: Vec<&str> = circuit
            .layers
            .iter()
            .flat_map(|l| l.gates.iter().map(|g| g.name()))
            .collect();
        let ry = names.iter().filter(|n| **n == "RY").count();
        let fy = names.iter().filter(|n| **n == "RY2Q_FY").count();
        let cz = names.iter().filter(|n| **n == "CZ").count();
        assert_eq!((ry, fy, cz), (1, 3, 3));
    }

    #[test]
    fn mcvqe_angle_count_mismatch() {
        assert!(matches!(
            mcvqe_state_prep(4, Some(&[0.1]), None),
            Err(Error::AngleCount { .. })
        ));
    }

    #[test]
    fn mcvqe_random_angles_deterministic() {
        let a = mcvqe_state_prep(5, None, Some(42)).unwrap();
        let b = mcvqe_state_prep(5, None, Some(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grover_counts_for_six_qubits() {
        assert_eq!(good_state_count(6, 2), 22);
        assert_eq!(grover_iteration_count(6, 2), 1);
    }

    #[test]
    fn grover_counts_for_thirteen_qubits() {
        assert_eq!(good_state_count(13, 2), 92);
        assert_eq!(grover_iteration_count(13, 2), 7);
    }

    #[test]
    fn grover_trivial_threshold_is_single_h_layer() {
        let circuit = grover_circuit(5, 5).unwrap();
        assert_eq!(circuit.depth(), 1);
        assert_eq!(circuit.layers[0].gates.len(), 5);
        assert!(circuit.layers[0].gates.iter().all(|g| g.name() == "H"));
    }

    #[test]
    fn grover_iterate_is_unitary() {
        for n in [3, 5, 8] {
            let m = grover_iterate(n, 2);
            assert!(
                unitarity_deviation(&m, 1 << n) <= tolerance::UNITARITY,
                "n = {n}"
            );
        }
    }

    #[test]
    fn grover_threshold_range() {
        assert!(matches!(
            grover_circuit(4, 0),
            Err(Error::InvalidHammingThreshold { .. })
        ));
        assert!(matches!(
            grover_circuit(4, 5),
            Err(Error::InvalidHammingThreshold { .. })
        ));
    }

    #[test]
    fn layer_rejects_overlapping_gates() {
        let layer = Layer {
            gates: vec![
                Gate::standard("X", &[0], None).unwrap(),
                Gate::standard("CNOT", &[0, 1], None).unwrap(),
            ],
            noise: vec![],
        };
        assert!(Circuit::new(2, vec![layer]).is_err());
    }
}
