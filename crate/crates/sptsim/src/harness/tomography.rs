//! Single-qubit tomography of the teleported output in the correction
//! frame.
//!
//! The teleport circuits leave the correction bits in cbits 0..4 and the
//! output-qubit measurement in cbit 4. Instead of feeding the
//! corrections forward, every shot's Pauli expectation is decoded in the
//! frame set by its correction bits: conjugating a basis operator
//! through Z^b0 X^b1 Z^b2 X^b3 at most flips its sign, so the corrected
//! per-shot value is that sign times the measured eigenvalue.

use crate::circuits::{
    teleportation_circuit, Circuit, Instruction, PerturbationKind, ShotRecord, TELEPORT_WIRE,
};
use crate::entanglement::Estimate;
use crate::error::{Error, Result};
use crate::pauli::Letter;
use crate::state::{Gate, MixedState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Sign picked up by a Pauli axis under conjugation through the
/// correction unitary encoded in cbits 0..4 of `mask`.
pub fn frame_sign(basis: Letter, mask: u64) -> f64 {
    let b = |i: u64| (mask >> i) & 1;
    let flips = match basis {
        Letter::X => b(0) + b(2),
        Letter::Y => b(0) + b(1) + b(2) + b(3),
        Letter::Z => b(1) + b(3),
        Letter::I => 0,
    };
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Frame-corrected per-shot eigenvalue of a basis measurement: the
/// frame sign times the outcome recorded in cbit 4.
pub fn frame_corrected_value(basis: Letter, mask: u64) -> f64 {
    let eigen = 1.0 - 2.0 * ((mask >> 4) & 1) as f64;
    frame_sign(basis, mask) * eigen
}

/// Teleport circuit extended with a basis measurement of the output
/// qubit: the basis rotation lands before the correction-bit
/// measurements (they act on disjoint qubits), cbit 4 records the
/// output.
pub fn teleport_tomography_circuit(
    input_prep: &[Gate<f64>],
    alpha: f64,
    beta: f64,
    kind: PerturbationKind,
    basis: Letter,
) -> Result<Circuit<f64>> {
    let suffix = match basis {
        Letter::X => "x",
        Letter::Y => "y",
        Letter::Z => "z",
        Letter::I => {
            return Err(Error::Config("tomography basis must be X, Y or Z".into()));
        }
    };
    let base = teleportation_circuit(input_prep, alpha, beta, kind)?;
    let mut circuit = Circuit::new(
        format!("{}-tomo-{suffix}", base.name()),
        base.n_qubits(),
        5,
    )?;
    let prefix = base.unitary_prefix_len();
    for instruction in &base.instructions()[..prefix] {
        if let Instruction::Gate(g) = instruction {
            circuit.gate(g.clone())?;
        }
    }
    match basis {
        Letter::X => circuit.gate(Gate::H(TELEPORT_WIRE))?,
        Letter::Y => {
            circuit.gate(Gate::Sdg(TELEPORT_WIRE))?;
            circuit.gate(Gate::H(TELEPORT_WIRE))?;
        }
        _ => {}
    }
    for instruction in &base.instructions()[prefix..] {
        if let Instruction::Measure { qubit, cbit } = instruction {
            circuit.measure(*qubit, *cbit)?;
        }
    }
    circuit.measure(TELEPORT_WIRE, 4)?;
    Ok(circuit)
}

/// Frame-corrected Pauli expectations of the output qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub x: Estimate<f64>,
    pub y: Estimate<f64>,
    pub z: Estimate<f64>,
}

impl TomographyResult {
    pub fn bloch(&self) -> [f64; 3] {
        [self.x.value, self.y.value, self.z.value]
    }

    pub fn bloch_norm(&self) -> f64 {
        let r = self.bloch();
        (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
    }

    /// Delta-method standard error of the Bloch norm; falls back to the
    /// largest component error at the origin, where the gradient
    /// degenerates.
    pub fn bloch_norm_std_error(&self) -> f64 {
        let r = self.bloch();
        let se = [self.x.std_error, self.y.std_error, self.z.std_error];
        let norm = self.bloch_norm();
        if norm < 1e-12 {
            se.into_iter().fold(0.0, f64::max)
        } else {
            r.iter()
                .zip(&se)
                .map(|(ri, si)| (ri * si) * (ri * si))
                .sum::<f64>()
                .sqrt()
                / norm
        }
    }

    /// True when the Bloch norm does not exceed 1 beyond three standard
    /// errors; larger excursions indicate a decoding defect rather than
    /// shot noise.
    pub fn bloch_norm_plausible(&self) -> bool {
        self.bloch_norm() <= 1.0 + 3.0 * self.bloch_norm_std_error()
    }

    /// Single-qubit density matrix reconstructed from the expectations.
    pub fn reconstructed_state(&self) -> Result<MixedState<f64>> {
        let [x, y, z] = self.bloch();
        let half = 0.5;
        let mat = vec![
            Complex64::new(half * (1.0 + z), 0.0),
            Complex64::new(half * x, -half * y),
            Complex64::new(half * x, half * y),
            Complex64::new(half * (1.0 - z), 0.0),
        ];
        MixedState::from_matrix(1, mat)
    }
}

fn corrected_estimate(record: &ShotRecord, basis: Letter) -> Estimate<f64> {
    let mut positive = 0usize;
    for &mask in record.masks() {
        if frame_corrected_value(basis, mask) > 0.0 {
            positive += 1;
        }
    }
    Estimate::from_sign_counts(positive, record.len())
}

/// Decodes one tomography triple (X, Y, Z basis records) into
/// frame-corrected expectations.
pub fn tomography(
    x_record: &ShotRecord,
    y_record: &ShotRecord,
    z_record: &ShotRecord,
) -> Result<TomographyResult> {
    for record in [x_record, y_record, z_record] {
        if record.width() < 5 {
            return Err(Error::Config(
                "tomography records need the four correction bits and the output bit".into(),
            ));
        }
        if record.is_empty() {
            return Err(Error::Config("tomography needs at least one shot".into()));
        }
    }
    if x_record.len() != y_record.len() || x_record.len() != z_record.len() {
        return Err(Error::InconsistentRecords);
    }
    Ok(TomographyResult {
        x: corrected_estimate(x_record, Letter::X),
        y: corrected_estimate(y_record, Letter::Y),
        z: corrected_estimate(z_record, Letter::Z),
    })
}

/// Overlap fidelity with the pure input state at Bloch vector `input`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub value: f64,
    pub std_error: f64,
}

/// Fidelity of the frame-corrected output against a pure input:
/// F = (1 + r_out . r_in) / 2 with errors propagated from the measured
/// components. The corrections are already folded into the tomography
/// estimates per shot.
pub fn corrected_fidelity(t: &TomographyResult, input: [f64; 3]) -> Fidelity {
    let r = t.bloch();
    let se = [t.x.std_error, t.y.std_error, t.z.std_error];
    let dot: f64 = r.iter().zip(&input).map(|(a, b)| a * b).sum();
    let variance: f64 = se.iter().zip(&input).map(|(s, b)| (s * b) * (s * b)).sum();
    Fidelity {
        value: 0.5 * (1.0 + dot),
        std_error: 0.5 * variance.sqrt(),
    }
}
