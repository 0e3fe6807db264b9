//! Dense statevector and density-matrix engine.
//!
//! Basis convention: qubit `k` is bit `k` of the basis index, so site 1 of
//! a physical chain is qubit 0 and `|x>` encodes site k+1 in bit k. A pure
//! state stores `2^n` amplitudes, a mixed state the full row-major
//! `2^n x 2^n` matrix. Gates and Kraus operators touch only the amplitudes
//! selected by their target bits; nothing is ever promoted to a full-space
//! matrix.

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{PauliMasks, PauliString};
use crate::real::Real;
use num_complex::Complex;
use rand::Rng;

/// Default register ceiling: two copies of an 8-site chain.
pub const DEFAULT_MAX_QUBITS: usize = 16;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Unitary gate on explicit targets.
///
/// `PauliExp { string, theta }` applies `exp(+i theta P)`; the string must
/// be hermitian (phase +1 or -1) and span the full register width.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    PauliExp { string: PauliString, theta: T },
}

impl<T: Real> Gate<T> {
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) => {
                vec![*q]
            }
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::PauliExp { string, .. } => string.support(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Gate::PauliExp { string, theta: _ } = self {
            if string.n_sites() != n_qubits {
                return Err(Error::PauliLengthMismatch {
                    left: string.n_sites(),
                    right: n_qubits,
                });
            }
            if !string.is_hermitian() {
                return Err(Error::NonHermitianPhase {
                    phase: string.phase().label().to_string(),
                });
            }
            return Ok(());
        }
        let targets = self.targets();
        for &t in &targets {
            if t >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    n_qubits,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::RepeatedTarget(targets[0]));
        }
        Ok(())
    }

    /// Dense matrix over the gate's own targets. For two-qubit gates the
    /// sub-index bit 0 is the first target (control for CNOT).
    pub fn dense_parts(&self) -> (Vec<usize>, Vec<Complex<T>>) {
        let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
        let o = cone::<T>();
        let z = czero::<T>();
        let i = Complex::new(T::zero(), T::one());
        match self {
            Gate::H(q) => (
                vec![*q],
                vec![Complex::new(h, T::zero()), Complex::new(h, T::zero()),
                     Complex::new(h, T::zero()), Complex::new(-h, T::zero())],
            ),
            Gate::X(q) => (vec![*q], vec![z, o, o, z]),
            Gate::Y(q) => (vec![*q], vec![z, -i, i, z]),
            Gate::Z(q) => (vec![*q], vec![o, z, z, -o]),
            Gate::S(q) => (vec![*q], vec![o, z, z, i]),
            Gate::Sdg(q) => (vec![*q], vec![o, z, z, -i]),
            Gate::Cz(a, b) => (
                vec![*a, *b],
                vec![
                    o, z, z, z,
                    z, o, z, z,
                    z, z, o, z,
                    z, z, z, -o,
                ],
            ),
            Gate::Cnot { control, target } => (
                vec![*control, *target],
                vec![
                    o, z, z, z,
                    z, z, z, o,
                    z, z, o, z,
                    z, o, z, z,
                ],
            ),
            Gate::PauliExp { string, theta } => {
                // Materialized only for diagnostics and tests; application
                // goes through the dedicated kernel.
                let support = string.support();
                let dim = 1usize << support.len();
                let mut compact = PauliString::identity(support.len()).with_phase(string.phase());
                for (j, &site) in support.iter().enumerate() {
                    compact.set(j, string.letter(site)).unwrap();
                }
                let m = compact.to_matrix::<T>();
                let c = Complex::new(theta.cos(), T::zero());
                let s = Complex::new(T::zero(), theta.sin());
                let mut out = linalg::identity::<T>(dim);
                for (o_e, m_e) in out.iter_mut().zip(m.iter()) {
                    *o_e = *o_e * c + *m_e * s;
                }
                (support, out)
            }
        }
    }
}

/// Applies a dense `2^k x 2^k` matrix to the amplitudes selected by
/// `targets`; sub-index bit `b` of the matrix is `targets[b]`.
fn apply_dense<T: Real>(amps: &mut [Complex<T>], targets: &[usize], m: &[Complex<T>]) {
    let k = targets.len();
    let sub = 1usize << k;
    debug_assert_eq!(m.len(), sub * sub);
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let spread: Vec<usize> = (0..sub)
        .map(|j| {
            targets
                .iter()
                .enumerate()
                .map(|(b, &t)| ((j >> b) & 1) << t)
                .sum()
        })
        .collect();
    let mut gathered = vec![czero::<T>(); sub];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (g, &sp) in gathered.iter_mut().zip(&spread) {
            *g = amps[base | sp];
        }
        for i in 0..sub {
            let row = &m[i * sub..(i + 1) * sub];
            let mut acc = czero::<T>();
            for (r, g) in row.iter().zip(&gathered) {
                acc += *r * *g;
            }
            amps[base | spread[i]] = acc;
        }
    }
}

/// Applies `exp(+i theta P)` in place using the pair structure of `P`.
fn apply_pauli_exp<T: Real>(amps: &mut [Complex<T>], masks: &PauliMasks, theta: T) {
    let c = Complex::new(theta.cos(), T::zero());
    let is = Complex::new(T::zero(), theta.sin());
    if masks.flip == 0 {
        for (x, a) in amps.iter_mut().enumerate() {
            let (_, coeff) = masks.apply_to_basis::<T>(x);
            *a *= c + is * coeff;
        }
        return;
    }
    for x in 0..amps.len() {
        let xf = x ^ masks.flip;
        if xf < x {
            continue;
        }
        let (_, cx) = masks.apply_to_basis::<T>(x);
        let (_, cxf) = masks.apply_to_basis::<T>(xf);
        let ax = amps[x];
        let af = amps[xf];
        amps[x] = ax * c + af * (is * cxf);
        amps[xf] = af * c + ax * (is * cx);
    }
}

/// Normalized pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn zero_state(n: usize) -> Result<PureState<T>> {
        if n == 0 || n > DEFAULT_MAX_QUBITS {
            return Err(Error::QubitLimitExceeded {
                requested: n,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut amps = vec![czero::<T>(); 1 << n];
        amps[0] = cone();
        Ok(PureState { n, amps })
    }

    /// Builds a state from amplitudes, normalizing; zero vectors error.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<PureState<T>> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::DimensionMismatch {
                got: len,
                expected: len.next_power_of_two().max(2),
            });
        }
        let n = len.trailing_zeros() as usize;
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::QubitLimitExceeded {
                requested: n,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut state = PureState { n, amps };
        state.renormalize()?;
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn renormalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if n2 <= T::tol_strict() * T::tol_strict() {
            return Err(Error::ZeroNorm);
        }
        let inv = T::one() / n2.sqrt();
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n)?;
        if let Gate::PauliExp { string, theta } = gate {
            apply_pauli_exp(&mut self.amps, &string.masks(), *theta);
            return Ok(());
        }
        let (targets, m) = gate.dense_parts();
        apply_dense(&mut self.amps, &targets, &m);
        Ok(())
    }

    /// Applies `exp(+i theta P)` for a hermitian full-width string.
    pub fn apply_pauli_exponential(&mut self, string: &PauliString, theta: T) -> Result<()> {
        let gate = Gate::PauliExp {
            string: string.clone(),
            theta,
        };
        self.apply_gate(&gate)
    }

    pub fn probability_of_one(&self, qubit: usize) -> Result<T> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n,
            });
        }
        let bit = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(x, _)| x & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of one qubit. Collapses in place and returns
    /// the outcome together with its pre-collapse probability.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<(u8, T)> {
        let p1 = self.probability_of_one(qubit)?;
        let norm = self.norm_sqr();
        if norm <= T::tol_strict() * T::tol_strict() {
            return Err(Error::ZeroNorm);
        }
        let u = T::of(rng.random::<f64>());
        let outcome: u8 = if u < p1 { 1 } else { 0 };
        let prob = if outcome == 1 { p1 } else { norm - p1 };
        let bit = 1usize << qubit;
        let keep = if outcome == 1 { bit } else { 0 };
        let inv = T::one() / prob.sqrt();
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & bit == keep {
                *a *= inv;
            } else {
                *a = czero();
            }
        }
        Ok((outcome, prob))
    }

    /// `<psi| P |psi>`; the imaginary part is a numerical diagnostic and
    /// vanishes for hermitian strings.
    pub fn pauli_expectation(&self, string: &PauliString) -> Result<Complex<T>> {
        if string.n_sites() != self.n {
            return Err(Error::PauliLengthMismatch {
                left: string.n_sites(),
                right: self.n,
            });
        }
        let masks = string.masks();
        let mut acc = czero::<T>();
        for (x, a) in self.amps.iter().enumerate() {
            let (xf, coeff) = masks.apply_to_basis::<T>(x);
            acc += self.amps[xf].conj() * coeff * *a;
        }
        Ok(acc)
    }

    pub fn inner(&self, other: &PureState<T>) -> Result<Complex<T>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                got: other.amps.len(),
                expected: self.amps.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Reduced density matrix over `keep`; output bit `j` encodes input
    /// qubit `keep[j]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState<T>> {
        let plan = TracePlan::new(self.n, keep)?;
        let dim = 1usize << keep.len();
        let mut mat = linalg::zeros::<T>(dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = czero::<T>();
                for e in 0..(1usize << plan.env.len()) {
                    let ia = plan.embed(a, e);
                    let ib = plan.embed(b, e);
                    acc += self.amps[ia] * self.amps[ib].conj();
                }
                mat[a * dim + b] = acc;
            }
        }
        Ok(MixedState {
            n: keep.len(),
            mat,
        })
    }

    pub fn density_matrix(&self) -> MixedState<T> {
        let dim = self.amps.len();
        let mut mat = linalg::zeros::<T>(dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        MixedState { n: self.n, mat }
    }

    /// `m` independent copies side by side; copy `c` occupies qubits
    /// `c*n .. (c+1)*n`.
    pub fn tensor_copies(&self, m: usize) -> Result<PureState<T>> {
        if m == 0 {
            return Err(Error::QubitLimitExceeded {
                requested: 0,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let total = self.n * m;
        if total > DEFAULT_MAX_QUBITS {
            return Err(Error::QubitLimitExceeded {
                requested: total,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut amps = vec![cone::<T>()];
        for _ in 0..m {
            let mut next = vec![czero::<T>(); amps.len() * self.amps.len()];
            for (hi, &a) in self.amps.iter().enumerate() {
                for (lo, &b) in amps.iter().enumerate() {
                    next[hi * amps.len() + lo] = a * b;
                }
            }
            amps = next;
        }
        Ok(PureState { n: total, amps })
    }
}

/// Index bookkeeping shared by the partial traces.
struct TracePlan {
    keep: Vec<usize>,
    env: Vec<usize>,
}

impl TracePlan {
    fn new(n: usize, keep: &[usize]) -> Result<TracePlan> {
        if keep.is_empty() {
            return Err(Error::InvalidKeepSet);
        }
        let mut seen = vec![false; n];
        for &k in keep {
            if k >= n {
                return Err(Error::QubitOutOfRange {
                    index: k,
                    n_qubits: n,
                });
            }
            if seen[k] {
                return Err(Error::InvalidKeepSet);
            }
            seen[k] = true;
        }
        let env = (0..n).filter(|&q| !seen[q]).collect();
        Ok(TracePlan {
            keep: keep.to_vec(),
            env,
        })
    }

    /// Scatters subsystem index `a` and environment index `e` into a full
    /// basis index.
    fn embed(&self, a: usize, e: usize) -> usize {
        let mut x = 0usize;
        for (j, &q) in self.keep.iter().enumerate() {
            x |= ((a >> j) & 1) << q;
        }
        for (j, &q) in self.env.iter().enumerate() {
            x |= ((e >> j) & 1) << q;
        }
        x
    }
}

/// Completely positive trace-preserving map given by Kraus operators on
/// `n_targets` qubits.
#[derive(Clone, Debug)]
pub struct KrausChannel<T> {
    n_targets: usize,
    ops: Vec<Vec<Complex<T>>>,
}

impl<T: Real> KrausChannel<T> {
    /// Validates operator shapes and the completeness sum `sum K†K = I`.
    pub fn new(n_targets: usize, ops: Vec<Vec<Complex<T>>>) -> Result<KrausChannel<T>> {
        let dim = 1usize << n_targets;
        if ops.is_empty() {
            return Err(Error::ChannelNotTracePreserving { witness: 1.0 });
        }
        for op in &ops {
            if op.len() != dim * dim {
                return Err(Error::DimensionMismatch {
                    got: op.len(),
                    expected: dim * dim,
                });
            }
        }
        let mut sum = linalg::zeros::<T>(dim);
        for op in &ops {
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = czero::<T>();
                    for k in 0..dim {
                        acc += op[k * dim + i].conj() * op[k * dim + j];
                    }
                    sum[i * dim + j] += acc;
                }
            }
        }
        let mut witness = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { cone::<T>() } else { czero::<T>() };
                witness = witness.max((sum[i * dim + j] - expect).norm());
            }
        }
        if witness > T::tol_channel() {
            return Err(Error::ChannelNotTracePreserving {
                witness: witness.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(KrausChannel { n_targets, ops })
    }

    /// Wraps a unitary as a single-operator channel.
    pub fn from_unitary(n_targets: usize, m: Vec<Complex<T>>) -> Result<KrausChannel<T>> {
        KrausChannel::new(n_targets, vec![m])
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn ops(&self) -> &[Vec<Complex<T>>] {
        &self.ops
    }

    /// The same channel expressed in a rotated frame: each operator maps
    /// to `V† K V`. Models hardware that applies `V`, suffers the channel,
    /// then is analysed in the original frame.
    pub fn conjugated_by(&self, v: &[Complex<T>]) -> Result<KrausChannel<T>> {
        let dim = 1usize << self.n_targets;
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                got: v.len(),
                expected: dim * dim,
            });
        }
        let mut vdg = linalg::zeros::<T>(dim);
        for i in 0..dim {
            for j in 0..dim {
                vdg[i * dim + j] = v[j * dim + i].conj();
            }
        }
        let ops = self
            .ops
            .iter()
            .map(|k| linalg::matmul(&vdg, &linalg::matmul(k, v, dim), dim))
            .collect();
        KrausChannel::new(self.n_targets, ops)
    }
}

/// Density matrix on `n` qubits, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState<T> {
    n: usize,
    mat: Vec<Complex<T>>,
}

impl<T: Real> MixedState<T> {
    pub fn from_pure(state: &PureState<T>) -> MixedState<T> {
        state.density_matrix()
    }

    pub fn from_matrix(n: usize, mat: Vec<Complex<T>>) -> Result<MixedState<T>> {
        let dim = 1usize << n;
        if mat.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                got: mat.len(),
                expected: dim * dim,
            });
        }
        Ok(MixedState { n, mat })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.mat[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex<T> {
        linalg::trace(&self.mat, self.dim())
    }

    /// Tr[rho^2].
    pub fn purity(&self) -> T {
        let dim = self.dim();
        let mut acc = czero::<T>();
        for i in 0..dim {
            for j in 0..dim {
                acc += self.mat[i * dim + j] * self.mat[j * dim + i];
            }
        }
        acc.re
    }

    /// Tr[rho^n] for n >= 1.
    pub fn moment(&self, n: u32) -> T {
        match n {
            1 => self.trace().re,
            2 => self.purity(),
            _ => {
                let p = linalg::matrix_power(&self.mat, self.dim(), n);
                linalg::trace(&p, self.dim()).re
            }
        }
    }

    pub fn diagonal_probabilities(&self) -> Vec<T> {
        let dim = self.dim();
        (0..dim).map(|x| self.mat[x * dim + x].re).collect()
    }

    /// Left-multiplies the targeted matrix and right-multiplies its
    /// adjoint: rho <- M rho M†.
    fn sandwich(&mut self, targets: &[usize], m: &[Complex<T>]) {
        let dim = self.dim();
        let mut buf = vec![czero::<T>(); dim];
        // Columns: rho <- M rho.
        for col in 0..dim {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = self.mat[k * dim + col];
            }
            apply_dense(&mut buf, targets, m);
            for (k, b) in buf.iter().enumerate() {
                self.mat[k * dim + col] = *b;
            }
        }
        // Rows: rho <- rho M†, using (rho M†)[i,:] = conj(M conj(rho[i,:])).
        for row in 0..dim {
            let slice = &mut self.mat[row * dim..(row + 1) * dim];
            for a in slice.iter_mut() {
                *a = a.conj();
            }
            apply_dense(slice, targets, m);
            for a in slice.iter_mut() {
                *a = a.conj();
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n)?;
        if let Gate::PauliExp { string, theta } = gate {
            let masks = string.masks();
            let dim = self.dim();
            let mut buf = vec![czero::<T>(); dim];
            for col in 0..dim {
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = self.mat[k * dim + col];
                }
                apply_pauli_exp(&mut buf, &masks, *theta);
                for (k, b) in buf.iter().enumerate() {
                    self.mat[k * dim + col] = *b;
                }
            }
            for row in 0..dim {
                let slice = &mut self.mat[row * dim..(row + 1) * dim];
                for a in slice.iter_mut() {
                    *a = a.conj();
                }
                apply_pauli_exp(slice, &masks, *theta);
                for a in slice.iter_mut() {
                    *a = a.conj();
                }
            }
            return Ok(());
        }
        let (targets, m) = gate.dense_parts();
        self.sandwich(&targets, &m);
        Ok(())
    }

    pub fn apply_pauli_exponential(&mut self, string: &PauliString, theta: T) -> Result<()> {
        let gate = Gate::PauliExp {
            string: string.clone(),
            theta,
        };
        self.apply_gate(&gate)
    }

    /// rho <- sum_i K_i rho K_i† on the given targets.
    pub fn apply_kraus(&mut self, channel: &KrausChannel<T>, targets: &[usize]) -> Result<()> {
        if targets.len() != channel.n_targets() {
            return Err(Error::ChannelArityMismatch {
                channel: channel.n_targets(),
                targets: targets.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &t in targets {
            if t >= self.n {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    n_qubits: self.n,
                });
            }
            if seen[t] {
                return Err(Error::RepeatedTarget(t));
            }
            seen[t] = true;
        }
        let mut acc = linalg::zeros::<T>(self.dim());
        for op in channel.ops() {
            let mut branch = self.clone();
            branch.sandwich(targets, op);
            for (a, b) in acc.iter_mut().zip(&branch.mat) {
                *a += *b;
            }
        }
        self.mat = acc;
        Ok(())
    }

    pub fn probability_of_one(&self, qubit: usize) -> Result<T> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n,
            });
        }
        let dim = self.dim();
        let bit = 1usize << qubit;
        Ok((0..dim)
            .filter(|x| x & bit != 0)
            .map(|x| self.mat[x * dim + x].re)
            .sum())
    }

    /// Projective measurement of one qubit, collapsing in place.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<(u8, T)> {
        let p1 = self.probability_of_one(qubit)?;
        let tr = self.trace().re;
        if tr <= T::tol_strict() {
            return Err(Error::ZeroNorm);
        }
        let u = T::of(rng.random::<f64>()) * tr;
        let outcome: u8 = if u < p1 { 1 } else { 0 };
        let prob = if outcome == 1 { p1 } else { tr - p1 };
        let dim = self.dim();
        let bit = 1usize << qubit;
        let keep = if outcome == 1 { bit } else { 0 };
        let inv = T::one() / prob;
        for i in 0..dim {
            for j in 0..dim {
                let e = &mut self.mat[i * dim + j];
                if i & bit == keep && j & bit == keep {
                    *e *= inv;
                } else {
                    *e = czero();
                }
            }
        }
        Ok((outcome, prob))
    }

    /// Tr[rho P]; the imaginary part is a diagnostic.
    pub fn pauli_expectation(&self, string: &PauliString) -> Result<Complex<T>> {
        if string.n_sites() != self.n {
            return Err(Error::PauliLengthMismatch {
                left: string.n_sites(),
                right: self.n,
            });
        }
        let masks = string.masks();
        let dim = self.dim();
        let mut acc = czero::<T>();
        for x in 0..dim {
            let (xf, coeff) = masks.apply_to_basis::<T>(x);
            acc += self.mat[x * dim + xf] * coeff;
        }
        Ok(acc)
    }

    /// Reduced density matrix over `keep`, same ordering rule as the pure
    /// version.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState<T>> {
        let plan = TracePlan::new(self.n, keep)?;
        let dim_keep = 1usize << keep.len();
        let dim = self.dim();
        let mut mat = linalg::zeros::<T>(dim_keep);
        for a in 0..dim_keep {
            for b in 0..dim_keep {
                let mut acc = czero::<T>();
                for e in 0..(1usize << plan.env.len()) {
                    acc += self.mat[plan.embed(a, e) * dim + plan.embed(b, e)];
                }
                mat[a * dim_keep + b] = acc;
            }
        }
        Ok(MixedState {
            n: keep.len(),
            mat,
        })
    }

    pub fn tensor_copies(&self, m: usize) -> Result<MixedState<T>> {
        if m == 0 {
            return Err(Error::QubitLimitExceeded {
                requested: 0,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let total = self.n * m;
        if total > DEFAULT_MAX_QUBITS {
            return Err(Error::QubitLimitExceeded {
                requested: total,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut mat = vec![cone::<T>()];
        let mut dim = 1usize;
        for _ in 0..m {
            mat = linalg::kron(&self.mat, self.dim(), &mat, dim);
            dim *= self.dim();
        }
        Ok(MixedState { n: total, mat })
    }

    /// Checks hermiticity, unit trace and positivity within the channel
    /// tolerance.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let herm = linalg::hermiticity_witness(&self.mat, dim);
        if herm > T::tol_channel() {
            return Err(Error::NonHermitian {
                witness: herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = self.trace();
        if (tr - cone::<T>()).norm() > T::tol_channel() {
            return Err(Error::InvalidProbability(tr.re.to_f64().unwrap_or(f64::NAN)));
        }
        let eig = linalg::hermitian_eigenvalues(&self.mat, dim)?;
        if let Some(&lowest) = eig.last() {
            if lowest < -T::tol_channel() {
                return Err(Error::InvalidProbability(lowest.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(())
    }
}
