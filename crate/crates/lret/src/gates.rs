//! Gate definitions and their application to factored and dense states.
//!
//! Gates hold their own `2^k × 2^k` unitary (row-major) and are applied by
//! strided index arithmetic, never by building the `2^N × 2^N` embedding.
//! Full-register unitaries (e.g. amplitude-amplification iterates) are
//! dispatched to dense matrix products instead.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::factor::LFactor;
use crate::linalg;
use crate::strided::{self, TargetIndexer};
use crate::tolerance;

const ZERO: Complex64 = Complex64::ZERO;
const ONE: Complex64 = Complex64::ONE;

pub(crate) fn pauli_i() -> Vec<Complex64> {
    vec![ONE, ZERO, ZERO, ONE]
}

pub(crate) fn pauli_x() -> Vec<Complex64> {
    vec![ZERO, ONE, ONE, ZERO]
}

pub(crate) fn pauli_y() -> Vec<Complex64> {
    vec![ZERO, -Complex64::I, Complex64::I, ZERO]
}

pub(crate) fn pauli_z() -> Vec<Complex64> {
    vec![ONE, ZERO, ZERO, -ONE]
}

/// A named unitary acting on an ordered list of target qubits.
///
/// `targets[0]` is the most significant bit of the gate's local basis; for
/// controlled gates it is the control.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    name: String,
    targets: Vec<usize>,
    angle: Option<f64>,
    /// Row-major `2^k × 2^k` unitary.
    matrix: Vec<Complex64>,
}

impl Gate {
    /// Builds one of the standard gates.
    ///
    /// One-qubit: `X, Y, Z, S, T, H` and the rotations `RX, RY, RZ` (angle
    /// required, standard −iθ/2 generator convention). Two-qubit: `SWAP, CZ,
    /// CNOT` and the parameterized `RY2Q_FY` (identity on |00⟩ and |11⟩, a
    /// Givens rotation by θ on span{|01⟩, |10⟩}).
    pub fn standard(name: &str, targets: &[usize], angle: Option<f64>) -> Result<Gate> {
        let (arity, needs_angle) = match name {
            "X" | "Y" | "Z" | "S" | "T" | "H" => (1, false),
            "RX" | "RY" | "RZ" => (1, true),
            "SWAP" | "CZ" | "CNOT" => (2, false),
            "RY2Q_FY" => (2, true),
            _ => return Err(Error::UnknownGate(name.to_string())),
        };
        if targets.len() != arity {
            return Err(Error::GateArity {
                name: name.to_string(),
                expected: arity,
                got: targets.len(),
            });
        }
        if needs_angle && angle.is_none() {
            return Err(Error::MissingAngle(name.to_string()));
        }
        if !needs_angle && angle.is_some() {
            return Err(Error::UnexpectedAngle(name.to_string()));
        }
        check_distinct(targets)?;

        let theta = angle.unwrap_or(0.0);
        let half = theta / 2.0;
        let matrix = match name {
            "X" => pauli_x(),
            "Y" => pauli_y(),
            "Z" => pauli_z(),
            "S" => vec![ONE, ZERO, ZERO, Complex64::I],
            "T" => vec![
                ONE,
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
            "H" => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                vec![s, s, s, -s]
            }
            "RX" => {
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(0.0, -half.sin());
                vec![c, s, s, c]
            }
            "RY" => {
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(half.sin(), 0.0);
                vec![c, -s, s, c]
            }
            "RZ" => vec![
                Complex64::from_polar(1.0, -half),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, half),
            ],
            "SWAP" => vec![
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ZERO, ONE, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE,
            ],
            "CZ" => vec![
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ONE, ZERO, //
                ZERO, ZERO, ZERO, -ONE,
            ],
            "CNOT" => vec![
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE, //
                ZERO, ZERO, ONE, ZERO,
            ],
            "RY2Q_FY" => {
                let c = Complex64::new(theta.cos(), 0.0);
                let s = Complex64::new(theta.sin(), 0.0);
                vec![
                    ONE, ZERO, ZERO, ZERO, //
                    ZERO, c, -s, ZERO, //
                    ZERO, s, c, ZERO, //
                    ZERO, ZERO, ZERO, ONE,
                ]
            }
            _ => unreachable!(),
        };
        Ok(Gate {
            name: name.to_string(),
            targets: targets.to_vec(),
            angle,
            matrix,
        })
    }

    /// Wraps an arbitrary unitary as a gate, verifying unitarity.
    pub fn custom(name: &str, targets: &[usize], matrix: Vec<Complex64>) -> Result<Gate> {
        check_distinct(targets)?;
        let dim = 1usize << targets.len();
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: matrix.len(),
                right: dim * dim,
            });
        }
        let dev = unitarity_deviation(&matrix, dim);
        if dev > tolerance::UNITARITY {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Gate {
            name: name.to_string(),
            targets: targets.to_vec(),
            angle: None,
            matrix,
        })
    }

    /// Trusted constructor for unitaries that are exact by construction;
    /// skips the O(dim³) unitarity verification.
    pub(crate) fn custom_unchecked(
        name: &str,
        targets: &[usize],
        matrix: Vec<Complex64>,
    ) -> Gate {
        Gate {
            name: name.to_string(),
            targets: targets.to_vec(),
            angle: None,
            matrix,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    /// Row-major `2^k × 2^k` unitary.
    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn matrix_dim(&self) -> usize {
        1 << self.targets.len()
    }

    /// True when the gate was built by [`Gate::standard`] and can therefore
    /// be reconstructed from its name, targets and angle.
    pub fn is_standard(&self) -> bool {
        matches!(
            self.name.as_str(),
            "X" | "Y"
                | "Z"
                | "S"
                | "T"
                | "H"
                | "RX"
                | "RY"
                | "RZ"
                | "SWAP"
                | "CZ"
                | "CNOT"
                | "RY2Q_FY"
        )
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix, self.matrix_dim())
    }

    fn check_targets(&self, num_qubits: usize) -> Result<()> {
        for &t in &self.targets {
            if t >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: t,
                    num_qubits,
                });
            }
        }
        Ok(())
    }

    /// True when the gate spans the whole register in natural qubit order,
    /// in which case application is a plain dense product.
    fn covers_register(&self, num_qubits: usize) -> bool {
        self.targets.len() == num_qubits && self.targets.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// `L ← G L`; column count and trace are unchanged.
    pub fn apply_to_factor(&self, l: &LFactor) -> Result<LFactor> {
        self.check_targets(l.num_qubits())?;
        let mut out = l.clone();
        self.apply_to_columns(out.num_qubits(), out.num_cols(), out.data_mut());
        Ok(out)
    }

    /// `ρ ← G ρ G†`.
    pub fn apply_to_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_targets(rho.num_qubits())?;
        let dim = rho.dim();
        let n = rho.num_qubits();
        if self.covers_register(n) {
            let g_t = linalg::view(&self.matrix, dim, dim);
            let g = g_t.transpose();
            let rho_view = linalg::view(rho.data(), dim, dim);
            let tmp = g * rho_view;
            let out = tmp.as_ref() * g.adjoint();
            return Ok(DensityMatrix::from_raw(n, linalg::to_vec(out.as_ref())));
        }
        let mut out = rho.clone();
        let indexer = TargetIndexer::new(n, &self.targets);
        strided::apply_to_columns(&self.matrix, &indexer, dim, out.data_mut());
        strided::apply_adjoint_to_rows(&self.matrix, &indexer, dim, out.data_mut());
        Ok(out)
    }

    /// In-place application to a column-major `dim × ncols` buffer.
    pub(crate) fn apply_to_columns(&self, num_qubits: usize, ncols: usize, data: &mut [Complex64]) {
        let dim = 1usize << num_qubits;
        if self.covers_register(num_qubits) {
            let g_t = linalg::view(&self.matrix, dim, dim);
            let g = g_t.transpose();
            let state = linalg::view(data, dim, ncols);
            let out = g * state;
            data.copy_from_slice(&linalg::to_vec(out.as_ref()));
            return;
        }
        let indexer = TargetIndexer::new(num_qubits, &self.targets);
        strided::apply_to_columns(&self.matrix, &indexer, dim, data);
    }
}

fn check_distinct(targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if targets[i + 1..].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// `max |G†G − I|` for a row-major `dim × dim` matrix.
pub(crate) fn unitarity_deviation(matrix: &[Complex64], dim: usize) -> f64 {
    // Row-major data viewed column-major is the transpose; Gᵀ†Gᵀ = (GG†)ᵀ,
    // which deviates from I exactly when G†G does.
    let g_t = linalg::view(matrix, dim, dim);
    let prod = g_t.adjoint() * g_t;
    let mut dev = 0.0f64;
    for j in 0..dim {
        for i in 0..dim {
            let expect = if i == j { ONE } else { ZERO };
            dev = dev.max((prod[(i, j)] - expect).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_x_matrix() {
        let g = Gate::standard("X", &[0], None).unwrap();
        assert_eq!(g.matrix(), &[ZERO, ONE, ONE, ZERO]);
    }

    #[test]
    fn ry_at_pi() {
        let g = Gate::standard("RY", &[0], Some(std::f64::consts::PI)).unwrap();
        let m = g.matrix();
        assert!((m[0] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((m[1] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((m[2] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m[3] - c(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_swaps_upper_block() {
        let g = Gate::standard("CNOT", &[0, 1], None).unwrap();
        let m = g.matrix();
        // |10⟩ ↔ |11⟩ in the local basis.
        assert_eq!(m[2 * 4 + 3], ONE);
        assert_eq!(m[3 * 4 + 2], ONE);
        assert_eq!(m[2 * 4 + 2], ZERO);
        assert_eq!(m[3 * 4 + 3], ZERO);
    }

    #[test]
    fn standard_gates_are_unitary() {
        for (name, angle) in [
            ("X", None),
            ("Y", None),
            ("Z", None),
            ("S", None),
            ("T", None),
            ("H", None),
            ("RX", Some(0.7)),
            ("RY", Some(1.3)),
            ("RZ", Some(2.9)),
        ] {
            let g = Gate::standard(name, &[0], angle).unwrap();
            assert!(g.unitarity_deviation() <= tolerance::UNITARITY, "{name}");
        }
        for (name, angle) in [
            ("SWAP", None),
            ("CZ", None),
            ("CNOT", None),
            ("RY2Q_FY", Some(0.4)),
        ] {
            let g = Gate::standard(name, &[0, 1], angle).unwrap();
            assert!(g.unitarity_deviation() <= tolerance::UNITARITY, "{name}");
        }
    }

    #[test]
    fn arity_and_angle_errors() {
        assert!(matches!(
            Gate::standard("X", &[0, 1], None),
            Err(Error::GateArity { .. })
        ));
        assert!(matches!(
            Gate::standard("RX", &[0], None),
            Err(Error::MissingAngle(_))
        ));
        assert!(matches!(
            Gate::standard("X", &[0], Some(0.1)),
            Err(Error::UnexpectedAngle(_))
        ));
        assert!(matches!(
            Gate::standard("Q", &[0], None),
            Err(Error::UnknownGate(_))
        ));
        assert!(matches!(
            Gate::standard("SWAP", &[1, 1], None),
            Err(Error::DuplicateTarget(1))
        ));
    }

    #[test]
    fn x_flips_most_significant_bit() {
        // Qubit 0 is the MSB: X on qubit 0 maps |00⟩ to |10⟩ (index 2).
        let l = LFactor::basis_state(2, 0).unwrap();
        let g = Gate::standard("X", &[0], None).unwrap();
        let out = g.apply_to_factor(&l).unwrap();
        assert!((out.column(0)[2] - ONE).norm() < 1e-15);
        assert!(out.column(0)[0].norm() < 1e-15);
    }

    #[test]
    fn x_flips_density_diagonal() {
        let rho = DensityMatrix::basis_state(1, 0).unwrap();
        let g = Gate::standard("X", &[0], None).unwrap();
        let out = g.apply_to_density(&rho).unwrap();
        assert_eq!(out.diagonal(), vec![0.0, 1.0]);
    }

    #[test]
    fn unitary_fixes_maximally_mixed() {
        let dim = 4;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i + i * dim] = c(0.25, 0.0);
        }
        let rho = DensityMatrix::from_entries(2, data).unwrap();
        let g = Gate::standard("CNOT", &[0, 1], None).unwrap();
        let out = g.apply_to_density(&rho).unwrap();
        assert!(rho.max_entry_distance(&out) < 1e-14);
    }

    #[test]
    fn gate_preserves_trace_of_factor() {
        let l = LFactor::basis_state(3, 5).unwrap();
        let g = Gate::standard("H", &[1], None).unwrap();
        let out = g.apply_to_factor(&l).unwrap();
        assert!((out.trace() - 1.0).abs() < tolerance::TRACE_EXCESS);
        assert_eq!(out.num_cols(), 1);
    }

    #[test]
    fn custom_gate_rejects_non_unitary() {
        let m = vec![ONE, ONE, ZERO, ONE];
        assert!(matches!(
            Gate::custom("bad", &[0], m),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn target_out_of_range_at_application() {
        let g = Gate::standard("X", &[3], None).unwrap();
        let l = LFactor::basis_state(2, 0).unwrap();
        assert!(matches!(
            g.apply_to_factor(&l),
            Err(Error::QubitOutOfRange { .. })
        ));
    }
}
