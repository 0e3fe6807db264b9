//! Circuit representation, the probe-circuit library and shot execution.
//!
//! Circuits are flat instruction lists: gates, measurements into classical
//! bits, and classically controlled gates that fire when a previously
//! written bit is 1. Execution is seeded and deterministic; the noiseless
//! path samples a pure state per shot, the noisy path evolves a density
//! matrix with the noise model's channels inserted after each gate.

use crate::error::{Error, Result};
use crate::noise::{flip_readout_bit, BiasVariant, NoiseModel};
use crate::pauli::{Letter, PauliString};
use crate::real::Real;
use crate::state::{Gate, MixedState, PureState, DEFAULT_MAX_QUBITS};
use crate::symmetry::{self, Boundary, ParityKind, ResourceKind};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction<T> {
    Gate(Gate<T>),
    Measure { qubit: usize, cbit: usize },
    /// Applies the gate when the classical bit reads 1.
    ControlledGate { gate: Gate<T>, control_bit: usize },
}

/// Ordered instruction list over a fixed qubit and classical register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    name: String,
    n_qubits: usize,
    n_cbits: usize,
    instructions: Vec<Instruction<T>>,
    written: Vec<bool>,
}

impl<T: Real> Circuit<T> {
    pub fn new(name: impl Into<String>, n_qubits: usize, n_cbits: usize) -> Result<Circuit<T>> {
        if n_qubits == 0 {
            return Err(Error::QubitOutOfRange {
                index: 0,
                n_qubits: 0,
            });
        }
        if n_cbits > 64 {
            return Err(Error::ClassicalBitOutOfRange {
                index: n_cbits,
                n_bits: 64,
            });
        }
        Ok(Circuit {
            name: name.into(),
            n_qubits,
            n_cbits,
            instructions: Vec::new(),
            written: vec![false; n_cbits],
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_cbits(&self) -> usize {
        self.n_cbits
    }

    pub fn instructions(&self) -> &[Instruction<T>] {
        &self.instructions
    }

    fn check_cbit(&self, cbit: usize) -> Result<()> {
        if cbit >= self.n_cbits {
            return Err(Error::ClassicalBitOutOfRange {
                index: cbit,
                n_bits: self.n_cbits,
            });
        }
        Ok(())
    }

    pub fn push(&mut self, instruction: Instruction<T>) -> Result<()> {
        match &instruction {
            Instruction::Gate(g) => g.validate(self.n_qubits)?,
            Instruction::Measure { qubit, cbit } => {
                if *qubit >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: *qubit,
                        n_qubits: self.n_qubits,
                    });
                }
                self.check_cbit(*cbit)?;
                self.written[*cbit] = true;
            }
            Instruction::ControlledGate { gate, control_bit } => {
                gate.validate(self.n_qubits)?;
                self.check_cbit(*control_bit)?;
                if !self.written[*control_bit] {
                    return Err(Error::ConditionBeforeMeasure { bit: *control_bit });
                }
            }
        }
        self.instructions.push(instruction);
        Ok(())
    }

    pub fn gate(&mut self, g: Gate<T>) -> Result<()> {
        self.push(Instruction::Gate(g))
    }

    pub fn measure(&mut self, qubit: usize, cbit: usize) -> Result<()> {
        self.push(Instruction::Measure { qubit, cbit })
    }

    pub fn controlled(&mut self, gate: Gate<T>, control_bit: usize) -> Result<()> {
        self.push(Instruction::ControlledGate { gate, control_bit })
    }

    /// Number of leading instructions that are plain gates; everything up
    /// to here can be applied once and shared across shots.
    pub fn unitary_prefix_len(&self) -> usize {
        self.instructions
            .iter()
            .take_while(|i| matches!(i, Instruction::Gate(_)))
            .count()
    }

    /// True when every instruction past the unitary prefix is a
    /// measurement, so shots can be drawn from one joint distribution.
    pub fn suffix_is_all_measurements(&self) -> bool {
        self.instructions[self.unitary_prefix_len()..]
            .iter()
            .all(|i| matches!(i, Instruction::Measure { .. }))
    }

    /// Plain-text form, one instruction per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("name {}\n", self.name));
        out.push_str(&format!("qubits {}\n", self.n_qubits));
        out.push_str(&format!("cbits {}\n", self.n_cbits));
        for instruction in &self.instructions {
            out.push_str(&instruction_to_line(instruction));
            out.push('\n');
        }
        out
    }

    /// Parses the [`Circuit::to_text`] form. Lines starting with `#` and
    /// blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Circuit<T>> {
        let mut name = String::from("circuit");
        let mut n_qubits: Option<usize> = None;
        let mut n_cbits: usize = 0;
        let mut circuit: Option<Circuit<T>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::CircuitParse {
                line: lineno,
                message,
            };
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty line");
            let rest: Vec<&str> = parts.collect();
            match head {
                "name" => {
                    if circuit.is_some() {
                        return Err(err("name must precede instructions".into()));
                    }
                    name = rest.join("-");
                }
                "qubits" | "cbits" => {
                    if circuit.is_some() {
                        return Err(err(format!("{head} must precede instructions")));
                    }
                    let value: usize = rest
                        .first()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(format!("expected a count after {head}")))?;
                    if head == "qubits" {
                        n_qubits = Some(value);
                    } else {
                        n_cbits = value;
                    }
                }
                _ => {
                    if circuit.is_none() {
                        let nq = n_qubits
                            .ok_or_else(|| err("qubits must be declared first".into()))?;
                        circuit = Some(Circuit::new(name.clone(), nq, n_cbits)?);
                    }
                    let c = circuit.as_mut().expect("just initialized");
                    let instruction = parse_instruction(head, &rest, lineno)?;
                    c.push(instruction).map_err(|e| Error::CircuitParse {
                        line: lineno,
                        message: e.to_string(),
                    })?;
                }
            }
        }
        match circuit {
            Some(c) => Ok(c),
            None => match n_qubits {
                Some(nq) => Circuit::new(name, nq, n_cbits),
                None => Err(Error::CircuitParse {
                    line: 0,
                    message: "missing qubits declaration".into(),
                }),
            },
        }
    }
}

fn gate_to_line<T: Real>(g: &Gate<T>) -> String {
    match g {
        Gate::H(q) => format!("h {q}"),
        Gate::X(q) => format!("x {q}"),
        Gate::Y(q) => format!("y {q}"),
        Gate::Z(q) => format!("z {q}"),
        Gate::S(q) => format!("s {q}"),
        Gate::Sdg(q) => format!("sdg {q}"),
        Gate::Cz(a, b) => format!("cz {a} {b}"),
        Gate::Cnot { control, target } => format!("cnot {control} {target}"),
        Gate::PauliExp { string, theta } => {
            format!("pexp {} {string}", theta.to_f64().unwrap_or(f64::NAN))
        }
    }
}

fn instruction_to_line<T: Real>(instruction: &Instruction<T>) -> String {
    match instruction {
        Instruction::Gate(g) => gate_to_line(g),
        Instruction::Measure { qubit, cbit } => format!("measure {qubit} {cbit}"),
        Instruction::ControlledGate { gate, control_bit } => {
            format!("cif {control_bit} {}", gate_to_line(gate))
        }
    }
}

fn parse_gate<T: Real>(head: &str, rest: &[&str], lineno: usize) -> Result<Gate<T>> {
    let err = |message: String| Error::CircuitParse {
        line: lineno,
        message,
    };
    let qubit_at = |i: usize| -> Result<usize> {
        rest.get(i)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(format!("expected qubit index at position {i}")))
    };
    match head {
        "h" => Ok(Gate::H(qubit_at(0)?)),
        "x" => Ok(Gate::X(qubit_at(0)?)),
        "y" => Ok(Gate::Y(qubit_at(0)?)),
        "z" => Ok(Gate::Z(qubit_at(0)?)),
        "s" => Ok(Gate::S(qubit_at(0)?)),
        "sdg" => Ok(Gate::Sdg(qubit_at(0)?)),
        "cz" => Ok(Gate::Cz(qubit_at(0)?, qubit_at(1)?)),
        "cnot" => Ok(Gate::Cnot {
            control: qubit_at(0)?,
            target: qubit_at(1)?,
        }),
        "pexp" => {
            let theta: f64 = rest
                .first()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("expected an angle after pexp".into()))?;
            let string: PauliString = rest
                .get(1)
                .ok_or_else(|| err("expected a pauli string after the angle".into()))?
                .parse()
                .map_err(|e: Error| err(e.to_string()))?;
            Ok(Gate::PauliExp {
                string,
                theta: T::of(theta),
            })
        }
        other => Err(err(format!("unknown instruction {other:?}"))),
    }
}

fn parse_instruction<T: Real>(
    head: &str,
    rest: &[&str],
    lineno: usize,
) -> Result<Instruction<T>> {
    let err = |message: String| Error::CircuitParse {
        line: lineno,
        message,
    };
    match head {
        "measure" => {
            let qubit: usize = rest
                .first()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("expected a qubit index".into()))?;
            let cbit: usize = rest
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("expected a classical bit index".into()))?;
            Ok(Instruction::Measure { qubit, cbit })
        }
        "cif" => {
            let control_bit: usize = rest
                .first()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("expected a classical bit index".into()))?;
            let gate_head = rest
                .get(1)
                .ok_or_else(|| err("expected a gate after the condition".into()))?;
            Ok(Instruction::ControlledGate {
                gate: parse_gate(gate_head, &rest[2..], lineno)?,
                control_bit,
            })
        }
        _ => Ok(Instruction::Gate(parse_gate(head, rest, lineno)?)),
    }
}

/// Classical measurement outcomes of a batch of shots, one bit mask per
/// shot, plus the master seed that reproduces them.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShotRecord {
    width: usize,
    seed: u64,
    shots: Vec<u64>,
}

impl ShotRecord {
    pub fn new(width: usize, seed: u64, shots: Vec<u64>) -> Result<ShotRecord> {
        if width > 64 {
            return Err(Error::ClassicalBitOutOfRange {
                index: width,
                n_bits: 64,
            });
        }
        Ok(ShotRecord { width, seed, shots })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn mask(&self, shot: usize) -> u64 {
        self.shots[shot]
    }

    pub fn bit(&self, shot: usize, cbit: usize) -> u8 {
        debug_assert!(cbit < self.width);
        ((self.shots[shot] >> cbit) & 1) as u8
    }

    pub fn masks(&self) -> &[u64] {
        &self.shots
    }
}

/// Stream-splitting mix so each shot gets an independent generator from
/// the master seed; splitmix64 finalizer over a golden-ratio walk.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs a circuit for `shots` repetitions. Without gate noise the state
/// stays pure and only measurements are sampled; with gate noise the
/// suffix either samples the joint diagonal (measurement-only suffixes)
/// or falls back to per-shot density-matrix trajectories. Readout bias
/// corrupts recorded bits, and classical controls fire on the corrupted
/// values, matching feed-forward from a misread register.
pub fn execute<T: Real>(
    circuit: &Circuit<T>,
    noise: Option<&NoiseModel<T>>,
    shots: usize,
    seed: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let bias = noise.map(|nm| (nm.readout_bias, nm.bias_variant));
    match noise {
        Some(nm) if nm.has_gate_noise() => execute_mixed(circuit, nm, shots, seed),
        _ => execute_pure(circuit, bias, shots, seed),
    }
}

fn biased<T: Real>(
    bit: u8,
    bias: Option<(T, BiasVariant)>,
    rng: &mut ChaCha8Rng,
) -> u8 {
    match bias {
        None => bit,
        Some((eps, variant)) => {
            if eps > T::zero() {
                flip_readout_bit(bit, eps, variant, rng)
            } else {
                bit
            }
        }
    }
}

/// Cumulative distribution and a per-shot sampler over packed outcome
/// bits shared by the two joint-sampling paths.
fn sample_joint<T: Real>(
    probabilities: Vec<T>,
    measured: &[(usize, usize)],
    bias: Option<(T, BiasVariant)>,
    shots: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0f64;
    for p in &probabilities {
        acc += p.to_f64().unwrap_or(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, shot));
            let u: f64 = rng.random::<f64>() * total;
            let idx = cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1);
            let mut mask = 0u64;
            for (j, &(_, cbit)) in measured.iter().enumerate() {
                let bit = ((idx >> j) & 1) as u8;
                let bit = biased(bit, bias, &mut rng);
                mask = (mask & !(1u64 << cbit)) | ((bit as u64) << cbit);
            }
            Ok(mask)
        })
        .collect()
}

fn execute_pure<T: Real>(
    circuit: &Circuit<T>,
    bias: Option<(T, BiasVariant)>,
    shots: usize,
    seed: u64,
) -> Result<ShotRecord> {
    let prefix_len = circuit.unitary_prefix_len();
    let mut base = PureState::<T>::zero_state(circuit.n_qubits())?;
    for instruction in &circuit.instructions()[..prefix_len] {
        if let Instruction::Gate(g) = instruction {
            base.apply_gate(g)?;
        }
    }
    let suffix = &circuit.instructions()[prefix_len..];

    if circuit.suffix_is_all_measurements() {
        let measured: Vec<(usize, usize)> = suffix
            .iter()
            .map(|i| match i {
                Instruction::Measure { qubit, cbit } => (*qubit, *cbit),
                _ => unreachable!("suffix checked to be measurements"),
            })
            .collect();
        let probabilities = joint_outcome_probabilities(
            &base.amplitudes().iter().map(|a| a.norm_sqr()).collect::<Vec<T>>(),
            circuit.n_qubits(),
            &measured,
        );
        let masks = sample_joint(probabilities, &measured, bias, shots, seed)?;
        return ShotRecord::new(circuit.n_cbits(), seed, masks);
    }

    let masks: Result<Vec<u64>> = (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, shot));
            let mut state = base.clone();
            let mut cbits = vec![0u8; circuit.n_cbits()];
            let mut mask = 0u64;
            for instruction in suffix {
                match instruction {
                    Instruction::Gate(g) => state.apply_gate(g)?,
                    Instruction::Measure { qubit, cbit } => {
                        let (bit, _) = state.measure_qubit(*qubit, &mut rng)?;
                        let bit = biased(bit, bias, &mut rng);
                        cbits[*cbit] = bit;
                        mask = (mask & !(1u64 << cbit)) | ((bit as u64) << cbit);
                    }
                    Instruction::ControlledGate { gate, control_bit } => {
                        if cbits[*control_bit] == 1 {
                            state.apply_gate(gate)?;
                        }
                    }
                }
            }
            Ok(mask)
        })
        .collect();
    ShotRecord::new(circuit.n_cbits(), seed, masks?)
}

/// Marginal distribution over the measured qubits, packed so bit `j` of
/// the outcome index is measurement `j` in program order.
fn joint_outcome_probabilities<T: Real>(
    diagonal: &[T],
    n_qubits: usize,
    measured: &[(usize, usize)],
) -> Vec<T> {
    debug_assert_eq!(diagonal.len(), 1usize << n_qubits);
    let mut out = vec![T::zero(); 1usize << measured.len()];
    for (x, &p) in diagonal.iter().enumerate() {
        let mut idx = 0usize;
        for (j, &(qubit, _)) in measured.iter().enumerate() {
            idx |= ((x >> qubit) & 1) << j;
        }
        out[idx] += p;
    }
    out
}

fn execute_mixed<T: Real>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    shots: usize,
    seed: u64,
) -> Result<ShotRecord> {
    let bias = Some((noise.readout_bias, noise.bias_variant));
    let prefix_len = circuit.unitary_prefix_len();
    let mut base = MixedState::<T>::from_pure(&PureState::zero_state(circuit.n_qubits())?);
    for instruction in &circuit.instructions()[..prefix_len] {
        if let Instruction::Gate(g) = instruction {
            base.apply_gate(g)?;
            for (channel, targets) in noise.applications_for_gate(g) {
                base.apply_kraus(&channel, &targets)?;
            }
        }
    }
    let suffix = &circuit.instructions()[prefix_len..];

    if circuit.suffix_is_all_measurements() {
        let measured: Vec<(usize, usize)> = suffix
            .iter()
            .map(|i| match i {
                Instruction::Measure { qubit, cbit } => (*qubit, *cbit),
                _ => unreachable!("suffix checked to be measurements"),
            })
            .collect();
        let probabilities = joint_outcome_probabilities(
            &base.diagonal_probabilities(),
            circuit.n_qubits(),
            &measured,
        );
        let masks = sample_joint(probabilities, &measured, bias, shots, seed)?;
        return ShotRecord::new(circuit.n_cbits(), seed, masks);
    }

    let masks: Result<Vec<u64>> = (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, shot));
            let mut state = base.clone();
            let mut cbits = vec![0u8; circuit.n_cbits()];
            let mut mask = 0u64;
            let apply_noisy = |state: &mut MixedState<T>, g: &Gate<T>| -> Result<()> {
                state.apply_gate(g)?;
                for (channel, targets) in noise.applications_for_gate(g) {
                    state.apply_kraus(&channel, &targets)?;
                }
                Ok(())
            };
            for instruction in suffix {
                match instruction {
                    Instruction::Gate(g) => apply_noisy(&mut state, g)?,
                    Instruction::Measure { qubit, cbit } => {
                        let (bit, _) = state.measure_qubit(*qubit, &mut rng)?;
                        let bit = biased(bit, bias, &mut rng);
                        cbits[*cbit] = bit;
                        mask = (mask & !(1u64 << cbit)) | ((bit as u64) << cbit);
                    }
                    Instruction::ControlledGate { gate, control_bit } => {
                        if cbits[*control_bit] == 1 {
                            apply_noisy(&mut state, gate)?;
                        }
                    }
                }
            }
            Ok(mask)
        })
        .collect();
    ShotRecord::new(circuit.n_cbits(), seed, masks?)
}

/// Exact distribution over the classical register (indexed by packed
/// cbit mask) after evolving through the circuit with any gate channels
/// and folding in readout bias analytically. Requires a measurement-only
/// suffix; conditioned gates have no exact diagonal shortcut.
pub fn exact_outcome_distribution<T: Real>(
    circuit: &Circuit<T>,
    noise: Option<&NoiseModel<T>>,
) -> Result<Vec<T>> {
    if !circuit.suffix_is_all_measurements() {
        return Err(Error::Config(
            "exact outcome distribution requires a measurement-only suffix".into(),
        ));
    }
    if circuit.n_cbits() > DEFAULT_MAX_QUBITS {
        return Err(Error::QubitLimitExceeded {
            requested: circuit.n_cbits(),
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let prefix_len = circuit.unitary_prefix_len();
    let suffix = &circuit.instructions()[prefix_len..];
    let measured: Vec<(usize, usize)> = suffix
        .iter()
        .map(|i| match i {
            Instruction::Measure { qubit, cbit } => (*qubit, *cbit),
            _ => unreachable!("suffix checked to be measurements"),
        })
        .collect();
    if measured.len() > DEFAULT_MAX_QUBITS {
        return Err(Error::QubitLimitExceeded {
            requested: measured.len(),
            max: DEFAULT_MAX_QUBITS,
        });
    }

    let diagonal: Vec<T> = match noise {
        Some(nm) if nm.has_gate_noise() => {
            let mut state =
                MixedState::<T>::from_pure(&PureState::zero_state(circuit.n_qubits())?);
            for instruction in &circuit.instructions()[..prefix_len] {
                if let Instruction::Gate(g) = instruction {
                    state.apply_gate(g)?;
                    for (channel, targets) in nm.applications_for_gate(g) {
                        state.apply_kraus(&channel, &targets)?;
                    }
                }
            }
            state.diagonal_probabilities()
        }
        _ => {
            let mut state = PureState::<T>::zero_state(circuit.n_qubits())?;
            for instruction in &circuit.instructions()[..prefix_len] {
                if let Instruction::Gate(g) = instruction {
                    state.apply_gate(g)?;
                }
            }
            state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
        }
    };
    let joint = joint_outcome_probabilities(&diagonal, circuit.n_qubits(), &measured);

    // Repack from measurement order onto cbit positions; a later
    // measurement into the same cbit overwrites the earlier bit.
    let mut out = vec![T::zero(); 1usize << circuit.n_cbits()];
    for (idx, p) in joint.iter().enumerate() {
        let mut mask = 0usize;
        for (j, &(_, cbit)) in measured.iter().enumerate() {
            let bit = (idx >> j) & 1;
            mask = (mask & !(1usize << cbit)) | (bit << cbit);
        }
        out[mask] += *p;
    }

    if let Some(nm) = noise {
        let eps = nm.readout_bias;
        if eps > T::zero() {
            let mut written: Vec<usize> = measured.iter().map(|&(_, c)| c).collect();
            written.sort_unstable();
            written.dedup();
            for cbit in written {
                let b = 1usize << cbit;
                for y0 in 0..out.len() {
                    if y0 & b != 0 {
                        continue;
                    }
                    let y1 = y0 | b;
                    match nm.bias_variant {
                        BiasVariant::Asymmetric => {
                            let moved = (eps + eps) * out[y1];
                            out[y1] -= moved;
                            out[y0] += moved;
                        }
                        BiasVariant::Symmetric => {
                            let p0 = out[y0];
                            let p1 = out[y1];
                            out[y0] = (T::one() - eps) * p0 + eps * p1;
                            out[y1] = eps * p0 + (T::one() - eps) * p1;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn slug(kind: ResourceKind, l: usize, boundary: Boundary) -> String {
    format!("{kind}-{boundary}-{l}")
}

/// Appends the resource-state preparation gates on qubits
/// `offset..offset+l`: Hadamards everywhere, then the CZ chain for the
/// cluster (plus the wrap link on a ring).
pub fn append_resource_prep<T: Real>(
    circuit: &mut Circuit<T>,
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    offset: usize,
) -> Result<()> {
    if l < 2 {
        return Err(Error::ChainTooShort(l));
    }
    for q in 0..l {
        circuit.gate(Gate::H(offset + q))?;
    }
    if kind == ResourceKind::Cluster {
        for q in 0..l - 1 {
            circuit.gate(Gate::Cz(offset + q, offset + q + 1))?;
        }
        if boundary == Boundary::Periodic {
            circuit.gate(Gate::Cz(offset + l - 1, offset))?;
        }
    }
    Ok(())
}

/// Preparation-only circuit for a resource state.
pub fn resource_circuit<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
) -> Result<Circuit<T>> {
    let mut c = Circuit::new(slug(kind, l, boundary), l, 0)?;
    append_resource_prep(&mut c, kind, l, boundary, 0)?;
    Ok(c)
}

/// Cluster-state preparation circuit.
pub fn cluster_state_circuit<T: Real>(l: usize, boundary: Boundary) -> Result<Circuit<T>> {
    resource_circuit(ResourceKind::Cluster, l, boundary)
}

fn check_l_a(l: usize, l_a: usize) -> Result<()> {
    if l_a == 0 || l_a > l {
        return Err(Error::InvalidSubsystem { l_a, l });
    }
    Ok(())
}

/// Two-copy purity interference test. Copies sit on qubits `0..l` and
/// `l..2l`; every pair `(i, l+i)` gets a CNOT plus Hadamard block and is
/// measured into classical bits `(2i, 2i+1)`. All pairs are measured so
/// one record serves every prefix size; `l_a` is validated and kept in
/// the name for report labeling.
pub fn swap_test_circuit<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    l_a: usize,
) -> Result<Circuit<T>> {
    check_l_a(l, l_a)?;
    let name = format!("swap-{}-la{}", slug(kind, l, boundary), l_a);
    let mut c = Circuit::new(name, 2 * l, 2 * l)?;
    append_resource_prep(&mut c, kind, l, boundary, 0)?;
    append_resource_prep(&mut c, kind, l, boundary, l)?;
    for i in 0..l {
        c.gate(Gate::Cnot {
            control: i,
            target: l + i,
        })?;
        c.gate(Gate::H(i))?;
    }
    for i in 0..l {
        c.measure(i, 2 * i)?;
        c.measure(l + i, 2 * i + 1)?;
    }
    Ok(c)
}

/// Letters of the parity operator the probes resolve: the full-chain
/// parity pattern of the resource state.
fn probe_parity_letters(kind: ResourceKind, l: usize, boundary: Boundary) -> Result<Vec<Letter>> {
    let parity = match kind {
        ResourceKind::Cluster => symmetry::sublattice_parity(l, boundary, ParityKind::Total)?,
        ResourceKind::Trivial => symmetry::prefix_parity(kind, l, boundary, l)?,
    };
    Ok(parity.letters().to_vec())
}

/// Appends the per-pair block that rotates into the eigenbasis of
/// `(P ⊗ I) SWAP` for parity letter P on qubits `(a, b)` with `a` in
/// copy one. Basis rotation into the Z frame, a CNOT that factors the
/// blend states onto `a`, then controlled S-dagger and controlled
/// Hadamard built from phase and Y-axis exponentials.
fn append_modified_pair_block<T: Real>(
    c: &mut Circuit<T>,
    a: usize,
    b: usize,
    letter: Letter,
) -> Result<()> {
    let n = c.n_qubits();
    let eighth = T::PI() / T::of(8.0);
    if letter == Letter::Y {
        c.gate(Gate::Sdg(a))?;
        c.gate(Gate::Sdg(b))?;
    }
    c.gate(Gate::H(a))?;
    c.gate(Gate::H(b))?;
    c.gate(Gate::Cnot {
        control: a,
        target: b,
    })?;
    // Controlled S-dagger on a (control b) as diagonal exponentials,
    // global phase dropped.
    c.gate(Gate::PauliExp {
        string: PauliString::single(n, a, Letter::Z)?,
        theta: eighth,
    })?;
    c.gate(Gate::PauliExp {
        string: PauliString::single(n, b, Letter::Z)?,
        theta: eighth,
    })?;
    c.gate(Gate::PauliExp {
        string: PauliString::from_sites(n, &[(a, Letter::Z), (b, Letter::Z)])?,
        theta: -eighth,
    })?;
    // Controlled Hadamard on a (control b): Y-axis conjugation of CZ.
    let y_a = PauliString::single(n, a, Letter::Y)?;
    c.gate(Gate::PauliExp {
        string: y_a.clone(),
        theta: eighth,
    })?;
    c.gate(Gate::Cz(a, b))?;
    c.gate(Gate::PauliExp {
        string: y_a,
        theta: -eighth,
    })?;
    Ok(())
}

/// Two-copy interference test resolving purity by parity sector. Each
/// pair gets the four-eigenvalue block that diagonalizes
/// `(P ⊗ I) SWAP` for its parity letter P, so decoded pair products
/// estimate the parity-weighted purity. Bits land like
/// [`swap_test_circuit`]; decode pairs with [`modified_pair_decode`].
pub fn modified_swap_test_circuit<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    l_a: usize,
) -> Result<Circuit<T>> {
    check_l_a(l, l_a)?;
    let letters = probe_parity_letters(kind, l, boundary)?;
    let name = format!("modswap-{}-la{}", slug(kind, l, boundary), l_a);
    let mut c = Circuit::new(name, 2 * l, 2 * l)?;
    append_resource_prep(&mut c, kind, l, boundary, 0)?;
    append_resource_prep(&mut c, kind, l, boundary, l)?;
    for (i, &letter) in letters.iter().enumerate() {
        append_modified_pair_block(&mut c, i, l + i, letter)?;
    }
    for i in 0..l {
        c.measure(i, 2 * i)?;
        c.measure(l + i, 2 * i + 1)?;
    }
    Ok(c)
}

/// Single-copy parity-basis measurement circuit: resource prep, then per
/// site S-dagger where the parity letter is Y and Hadamard everywhere,
/// then a full measurement with classical bit = site index. Prefix bit
/// parities estimate the sector probabilities.
pub fn symmetry_resolved_probability_circuit<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
) -> Result<Circuit<T>> {
    let letters = probe_parity_letters(kind, l, boundary)?;
    let name = format!("prob-{}", slug(kind, l, boundary));
    let mut c = Circuit::new(name, l, l)?;
    append_resource_prep(&mut c, kind, l, boundary, 0)?;
    for (q, letter) in letters.iter().enumerate() {
        if *letter == Letter::Y {
            c.gate(Gate::Sdg(q))?;
        }
        c.gate(Gate::H(q))?;
    }
    for q in 0..l {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// Eigenvalue decode table for one modified-test pair: entry
/// `bit_a + 2 bit_b` is the eigenvalue announced by that outcome.
///
/// The table is not hard-coded: the four analytic eigenvectors of
/// `(X ⊗ I) SWAP` are pushed through the same block the circuit applies,
/// each must land on a single computational basis state, and the
/// eigenvalue is read back from the operator itself.
pub fn modified_pair_decode<T: Real>() -> Result<[Complex<T>; 4]> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i_unit = Complex::new(T::zero(), T::one());
    // Eigenvectors in basis order b_a + 2 b_b with qubit 0 = copy one:
    // |++>, |-->, and the circular blends (|+-> +- i|-+>)/sqrt(2).
    let sqrt2_inv = T::one() / T::of(2.0).sqrt();
    let plus = [
        Complex::new(sqrt2_inv, T::zero()),
        Complex::new(sqrt2_inv, T::zero()),
    ];
    let minus = [
        Complex::new(sqrt2_inv, T::zero()),
        Complex::new(-sqrt2_inv, T::zero()),
    ];
    let kron2 = |a: &[Complex<T>; 2], b: &[Complex<T>; 2]| -> [Complex<T>; 4] {
        // Index x = bit0 + 2 bit1; qubit 0 carries `a`, qubit 1 carries `b`.
        [
            a[0] * b[0],
            a[1] * b[0],
            a[0] * b[1],
            a[1] * b[1],
        ]
    };
    let pp = kron2(&plus, &plus);
    let mm = kron2(&minus, &minus);
    let pm = kron2(&plus, &minus);
    let mp = kron2(&minus, &plus);
    let blend = |sign: Complex<T>| -> [Complex<T>; 4] {
        let mut v = [zero; 4];
        for k in 0..4 {
            v[k] = (pm[k] + sign * mp[k]) * Complex::new(sqrt2_inv, T::zero());
        }
        v
    };
    let vectors = [pp, mm, blend(i_unit), blend(-i_unit)];

    // The measured observable: swap the pair, then X on copy one.
    let swap: Vec<Complex<T>> = vec![
        one, zero, zero, zero, //
        zero, zero, one, zero, //
        zero, one, zero, zero, //
        zero, zero, zero, one,
    ];
    let x0: Vec<Complex<T>> = PauliString::from_sites(2, &[(0, Letter::X)])?.to_matrix();
    let observable = crate::linalg::matmul(&x0, &swap, 4);

    let mut table = [zero; 4];
    let mut seen = [false; 4];
    for v in &vectors {
        // Read the eigenvalue off the operator application.
        let mut image = [zero; 4];
        for r in 0..4 {
            for c in 0..4 {
                image[r] += observable[r * 4 + c] * v[c];
            }
        }
        let pivot = (0..4)
            .max_by(|&a, &b| {
                v[a].norm()
                    .partial_cmp(&v[b].norm())
                    .expect("finite amplitudes")
            })
            .expect("nonempty");
        let eigenvalue = image[pivot] / v[pivot];
        for k in 0..4 {
            if (image[k] - eigenvalue * v[k]).norm() > T::tol_strict() {
                return Err(Error::InvalidAction(
                    "decode basis vector is not an eigenvector".into(),
                ));
            }
        }
        // Push the vector through the circuit block.
        let mut state = PureState::from_amplitudes(v.to_vec())?;
        let block: Circuit<T> = modified_pair_block_circuit()?;
        for instruction in block.instructions() {
            if let Instruction::Gate(g) = instruction {
                state.apply_gate(g)?;
            }
        }
        let amps = state.amplitudes();
        let outcome = (0..4)
            .find(|&k| (amps[k].norm() - T::one()).abs() < T::of(1e-6))
            .ok_or_else(|| {
                Error::InvalidAction("block does not send eigenvectors to basis states".into())
            })?;
        if seen[outcome] {
            return Err(Error::InvalidAction(
                "two eigenvectors collide on one outcome".into(),
            ));
        }
        seen[outcome] = true;
        table[outcome] = eigenvalue;
    }
    Ok(table)
}

/// The modified-test block on a bare pair: qubit 0 is copy one, qubit 1
/// is copy two. Mirrors the per-pair gates of
/// [`modified_swap_test_circuit`] for an X-letter site; exposed so the
/// decode table can be checked against externally constructed
/// eigenvectors.
pub fn modified_pair_block_circuit<T: Real>() -> Result<Circuit<T>> {
    let mut c = Circuit::new("pair-block", 2, 0)?;
    append_modified_pair_block(&mut c, 0, 1, Letter::X)?;
    Ok(c)
}

/// Which perturbation family deforms the teleport wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// `exp(i beta Z1 X2 Z3) exp(i alpha X3)`: commutes with the wire
    /// symmetry, fidelity stays flat.
    Symmetric,
    /// `exp(i beta Z1 X2 Z3) exp(i alpha Y3)`: breaks the symmetry.
    SymmetryBreaking,
    /// Clean wire; both angles are ignored.
    None,
}

impl std::fmt::Display for PerturbationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerturbationKind::Symmetric => f.write_str("symmetric"),
            PerturbationKind::SymmetryBreaking => f.write_str("symmetry_breaking"),
            PerturbationKind::None => f.write_str("none"),
        }
    }
}

/// Number of wire sites in the teleport circuit; qubit 0 is the input,
/// qubits 1..=4 are the wire, qubit 4 carries the output.
pub const TELEPORT_WIRE: usize = 4;

/// Measurement-wire teleport circuit: the input qubit is prepared by
/// `input_prep`, CZ-coupled to a 4-site cluster wire deformed by the
/// chosen perturbation, and qubits 0..=3 are measured in the X basis
/// into bits 0..=3. Qubit 4 leaves the circuit unmeasured; the byproduct
/// correction `Z^b0 X^b1 Z^b2 X^b3` is a post-processing frame, not a
/// circuit element.
pub fn teleportation_circuit<T: Real>(
    input_prep: &[Gate<T>],
    alpha: T,
    beta: T,
    kind: PerturbationKind,
) -> Result<Circuit<T>> {
    let n = TELEPORT_WIRE + 1;
    let mut c = Circuit::new(format!("teleport-{kind}"), n, TELEPORT_WIRE)?;
    for g in input_prep {
        for q in g.targets() {
            if q != 0 {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: 1,
                });
            }
        }
        c.gate(g.clone())?;
    }
    for q in 1..=TELEPORT_WIRE {
        c.gate(Gate::H(q))?;
    }
    c.gate(Gate::Cz(0, 1))?;
    for q in 1..TELEPORT_WIRE {
        c.gate(Gate::Cz(q, q + 1))?;
    }
    let alpha_letter = match kind {
        PerturbationKind::Symmetric => Some(Letter::X),
        PerturbationKind::SymmetryBreaking => Some(Letter::Y),
        PerturbationKind::None => None,
    };
    if let Some(letter) = alpha_letter {
        c.gate(Gate::PauliExp {
            string: PauliString::single(n, 3, letter)?,
            theta: alpha,
        })?;
        c.gate(Gate::PauliExp {
            string: PauliString::from_sites(
                n,
                &[(1, Letter::Z), (2, Letter::X), (3, Letter::Z)],
            )?,
            theta: beta,
        })?;
    }
    for q in 0..=3 {
        c.gate(Gate::H(q))?;
    }
    for q in 0..=3 {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// Teleport variant that applies the byproduct correction in-circuit
/// through classically controlled gates; used to cross-check the
/// post-processing frame.
pub fn teleportation_circuit_with_corrections<T: Real>(
    input_prep: &[Gate<T>],
    alpha: T,
    beta: T,
    kind: PerturbationKind,
) -> Result<Circuit<T>> {
    let base = teleportation_circuit(input_prep, alpha, beta, kind)?;
    let mut c = Circuit::new(
        format!("{}-corrected", base.name()),
        base.n_qubits(),
        base.n_cbits(),
    )?;
    for instruction in base.instructions() {
        c.push(instruction.clone())?;
    }
    let out = TELEPORT_WIRE;
    c.controlled(Gate::Z(out), 0)?;
    c.controlled(Gate::X(out), 1)?;
    c.controlled(Gate::Z(out), 2)?;
    c.controlled(Gate::X(out), 3)?;
    Ok(c)
}

/// The six tomography input states with their preparation gates and
/// Bloch vectors (x, y, z).
pub fn input_state_preps<T: Real>() -> Vec<(String, Vec<Gate<T>>, [T; 3])> {
    let one = T::one();
    let zero = T::zero();
    vec![
        ("0".into(), vec![], [zero, zero, one]),
        ("1".into(), vec![Gate::X(0)], [zero, zero, -one]),
        ("+".into(), vec![Gate::H(0)], [one, zero, zero]),
        ("-".into(), vec![Gate::X(0), Gate::H(0)], [-one, zero, zero]),
        ("+i".into(), vec![Gate::H(0), Gate::S(0)], [zero, one, zero]),
        ("-i".into(), vec![Gate::H(0), Gate::Sdg(0)], [zero, -one, zero]),
    ]
}

/// Exact single-branch outputs of the teleport circuit: for each of the
/// 16 measurement outcomes, the branch probability and the corrected
/// output qubit state. Enumerates the post-rotation state directly, so
/// it is an oracle for the sampled protocol.
pub fn teleport_branches<T: Real>(
    input_prep: &[Gate<T>],
    alpha: T,
    beta: T,
    kind: PerturbationKind,
) -> Result<Vec<(T, MixedState<T>)>> {
    let circuit = teleportation_circuit(input_prep, alpha, beta, kind)?;
    let mut state = PureState::<T>::zero_state(circuit.n_qubits())?;
    for instruction in circuit.instructions() {
        if let Instruction::Gate(g) = instruction {
            state.apply_gate(g)?;
        }
    }
    let amps = state.amplitudes();
    let mut branches = Vec::with_capacity(16);
    for outcome in 0u32..16 {
        let bits: Vec<u8> = (0..4).map(|q| ((outcome >> q) & 1) as u8).collect();
        // Output amplitudes: qubit 4 is the free index; qubits 0..=3 are
        // pinned to the outcome bits.
        let base: usize = (0..4).map(|q| (bits[q] as usize) << q).sum();
        let mut out = vec![amps[base], amps[base | (1 << 4)]];
        let probability = out.iter().map(|a| a.norm_sqr()).sum::<T>();
        if probability <= T::zero() {
            branches.push((
                T::zero(),
                MixedState::from_pure(&PureState::zero_state(1)?),
            ));
            continue;
        }
        let norm = probability.sqrt();
        for a in &mut out {
            *a /= Complex::new(norm, T::zero());
        }
        let mut corrected = PureState::from_amplitudes(out)?;
        // Byproduct frame Z^b0 X^b1 Z^b2 X^b3, applied right to left.
        if bits[3] == 1 {
            corrected.apply_gate(&Gate::X(0))?;
        }
        if bits[2] == 1 {
            corrected.apply_gate(&Gate::Z(0))?;
        }
        if bits[1] == 1 {
            corrected.apply_gate(&Gate::X(0))?;
        }
        if bits[0] == 1 {
            corrected.apply_gate(&Gate::Z(0))?;
        }
        branches.push((probability, MixedState::from_pure(&corrected)));
    }
    Ok(branches)
}
