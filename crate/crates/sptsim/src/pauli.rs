//! Pauli strings with exact phase tracking.
//!
//! A [`PauliString`] is a global phase in {1, i, -1, -i} times a tensor
//! product of single-site letters I, X, Y, Z. Products, commutators and
//! hermiticity are all integer arithmetic on the phase exponent, so the
//! stabilizer bookkeeping in the symmetry layer never touches floats.
//!
//! Site `k` of a string acts on qubit `k`, which is bit `k` of a basis
//! index (chain site 1 of a physical register is qubit 0).

use crate::error::{Error, Result};
use crate::real::Real;
use num_complex::Complex;
use std::fmt;

/// Single-site Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn symbol(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'I' | 'i' => Some(Letter::I),
            'X' | 'x' => Some(Letter::X),
            'Y' | 'y' => Some(Letter::Y),
            'Z' | 'z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// Product of two letters: resulting letter and i-exponent picked up.
    /// X*Y = iZ, Y*Z = iX, Z*X = iY and the reversed orders carry -i.
    fn mul(self, rhs: Letter) -> (Letter, u8) {
        use Letter::*;
        match (self, rhs) {
            (I, r) => (r, 0),
            (l, I) => (l, 0),
            (X, X) | (Y, Y) | (Z, Z) => (I, 0),
            (X, Y) => (Z, 1),
            (Y, X) => (Z, 3),
            (Y, Z) => (X, 1),
            (Z, Y) => (X, 3),
            (Z, X) => (Y, 1),
            (X, Z) => (Y, 3),
        }
    }
}

/// Phase exponent k meaning i^k, stored mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(exponent: u8) -> Phase {
        Phase(exponent % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// The phase as a complex number, exact in either scalar type.
    pub fn to_complex<T: Real>(self) -> Complex<T> {
        match self.0 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        }
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Phase times a tensor product of Pauli letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Letter>,
}

impl PauliString {
    /// Identity on `n_sites` sites.
    pub fn identity(n_sites: usize) -> PauliString {
        PauliString {
            phase: Phase::ONE,
            letters: vec![Letter::I; n_sites],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> PauliString {
        PauliString {
            phase: Phase::ONE,
            letters,
        }
    }

    /// Single non-identity letter at `site`.
    pub fn single(n_sites: usize, site: usize, letter: Letter) -> Result<PauliString> {
        let mut s = PauliString::identity(n_sites);
        s.set(site, letter)?;
        Ok(s)
    }

    /// Letters at the given sites, identity elsewhere.
    pub fn from_sites(n_sites: usize, sites: &[(usize, Letter)]) -> Result<PauliString> {
        let mut s = PauliString::identity(n_sites);
        for &(site, letter) in sites {
            s.set(site, letter)?;
        }
        Ok(s)
    }

    pub fn set(&mut self, site: usize, letter: Letter) -> Result<()> {
        if site >= self.letters.len() {
            return Err(Error::QubitOutOfRange {
                index: site,
                n_qubits: self.letters.len(),
            });
        }
        self.letters[site] = letter;
        Ok(())
    }

    pub fn with_phase(mut self, phase: Phase) -> PauliString {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, site: usize) -> Letter {
        self.letters[site]
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    /// Sites carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.letters.len())
            .filter(|&k| self.letters[k] != Letter::I)
            .collect()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::I)
    }

    /// True when the operator is hermitian, i.e. the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Exact product, including the accumulated phase.
    pub fn mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.letters.len() != rhs.letters.len() {
            return Err(Error::PauliLengthMismatch {
                left: self.letters.len(),
                right: rhs.letters.len(),
            });
        }
        let mut exponent = self.phase.exponent() + rhs.phase.exponent();
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (l, e) = a.mul(b);
                exponent += e;
                l
            })
            .collect();
        Ok(PauliString {
            phase: Phase::new(exponent),
            letters,
        })
    }

    /// Hermitian conjugate: conjugates the phase, letters are self-adjoint.
    pub fn dagger(&self) -> PauliString {
        PauliString {
            phase: self.phase.conj(),
            letters: self.letters.clone(),
        }
    }

    /// True when the strings commute. Two strings commute iff they
    /// anticommute on an even number of sites.
    pub fn commutes_with(&self, rhs: &PauliString) -> Result<bool> {
        if self.letters.len() != rhs.letters.len() {
            return Err(Error::PauliLengthMismatch {
                left: self.letters.len(),
                right: rhs.letters.len(),
            });
        }
        let anti = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .filter(|&(&a, &b)| a != Letter::I && b != Letter::I && a != b)
            .count();
        Ok(anti % 2 == 0)
    }

    /// Same string on a register of `n_total` sites starting at `offset`.
    pub fn embedded(&self, n_total: usize, offset: usize) -> Result<PauliString> {
        if offset + self.letters.len() > n_total {
            return Err(Error::QubitOutOfRange {
                index: offset + self.letters.len().saturating_sub(1),
                n_qubits: n_total,
            });
        }
        let mut s = PauliString::identity(n_total).with_phase(self.phase);
        for (k, &l) in self.letters.iter().enumerate() {
            s.letters[offset + k] = l;
        }
        Ok(s)
    }

    /// Bit masks describing the action on basis indices: `flip` collects X
    /// and Y sites, `phase_z` collects Y and Z sites, `y` the Y sites.
    pub fn masks(&self) -> PauliMasks {
        let mut flip = 0usize;
        let mut phase_z = 0usize;
        let mut y = 0usize;
        for (k, &l) in self.letters.iter().enumerate() {
            match l {
                Letter::I => {}
                Letter::X => flip |= 1 << k,
                Letter::Y => {
                    flip |= 1 << k;
                    phase_z |= 1 << k;
                    y |= 1 << k;
                }
                Letter::Z => phase_z |= 1 << k,
            }
        }
        PauliMasks {
            flip,
            phase_z,
            y_count: y.count_ones() as u8,
            base_exponent: self.phase.exponent(),
        }
    }

    /// Dense matrix of the operator, row-major, dimension `2^n`.
    pub fn to_matrix<T: Real>(&self) -> Vec<Complex<T>> {
        let n = self.letters.len();
        let dim = 1usize << n;
        let masks = self.masks();
        let mut m = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for col in 0..dim {
            let (row, coeff) = masks.apply_to_basis::<T>(col);
            m[row * dim + col] = coeff;
        }
        m
    }
}

/// Precomputed basis action of a Pauli string.
#[derive(Clone, Copy, Debug)]
pub struct PauliMasks {
    pub flip: usize,
    pub phase_z: usize,
    y_count: u8,
    base_exponent: u8,
}

impl PauliMasks {
    /// P|x> = coeff |x ^ flip>; the coefficient is a power of i.
    pub fn apply_to_basis<T: Real>(&self, x: usize) -> (usize, Complex<T>) {
        let minus = (x & self.phase_z).count_ones() as u8;
        let exponent = Phase::new(self.base_exponent + self.y_count + 2 * minus);
        (x ^ self.flip, exponent.to_complex())
    }
}

impl fmt::Display for PauliString {
    /// Compact form: phase label then one letter per site, e.g. `-iYXZI`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.label())?;
        for &l in &self.letters {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    /// Parses the compact form; the phase prefix is optional.
    fn from_str(s: &str) -> Result<PauliString> {
        let err = || Error::PauliParse(s.to_string());
        let trimmed = s.trim();
        let (phase, rest) = if let Some(r) = trimmed.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = trimmed.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = trimmed.strip_prefix('+') {
            (Phase::ONE, r)
        } else if let Some(r) = trimmed.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::ONE, trimmed)
        };
        if rest.is_empty() {
            return Err(err());
        }
        let letters = rest
            .chars()
            .map(Letter::from_symbol)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(err)?;
        Ok(PauliString { phase, letters })
    }
}
