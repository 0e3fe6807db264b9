//! Noise channels, the per-gate-class noise model and readout bias.
//!
//! Two Kraus channels cover the gate errors: pure dephasing and a decay
//! pair that relaxes |1> toward |0>. The latter travels under the name
//! "depolarizing" in configs and reports; algebraically it is an
//! amplitude-damping form, which the constructor documents rather than
//! hides. Readout bias is a classical asymmetric flip applied to outcome
//! probabilities or sampled bits, with a symmetric confusion-matrix
//! variant behind a config switch.

use crate::error::{Error, Result};
use crate::pauli::Letter;
use crate::real::Real;
use crate::state::{Gate, KrausChannel};
use crate::symmetry::{self, Boundary, ChannelApplication, ParityKind, ResourceKind};
use num_complex::Complex;
use rand::Rng;

fn check_probability<T: Real>(p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidProbability(p.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

fn check_bias<T: Real>(eps: T) -> Result<()> {
    if !(eps >= T::zero() && eps < T::of(0.5)) {
        return Err(Error::InvalidBias(eps.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Phase-flip channel: `K1 = sqrt(1-p) I`, `K2 = sqrt(p) Z`. Off-diagonal
/// elements scale by `1 - 2p`; populations are untouched.
pub fn dephasing_channel<T: Real>(p: T) -> Result<KrausChannel<T>> {
    check_probability(p)?;
    let zero = Complex::new(T::zero(), T::zero());
    let keep = Complex::new((T::one() - p).sqrt(), T::zero());
    let flip = Complex::new(p.sqrt(), T::zero());
    let k1 = vec![keep, zero, zero, keep];
    let k2 = vec![flip, zero, zero, -flip];
    KrausChannel::new(1, vec![k1, k2])
}

/// Decay channel: `K1 = diag(1, sqrt(1-p))`, `K2 = sqrt(p) |0><1|`, which
/// transfers population from |1> to |0> with probability `p`. The config
/// vocabulary calls this family `depolarizing`; the operator algebra is
/// the amplitude-damping pair, and the channel keeps density matrices
/// real, so it cannot split the parity sectors of a real resource state.
pub fn depolarizing_channel<T: Real>(p: T) -> Result<KrausChannel<T>> {
    check_probability(p)?;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let k1 = vec![one, zero, zero, Complex::new((T::one() - p).sqrt(), T::zero())];
    let k2 = vec![zero, Complex::new(p.sqrt(), T::zero()), zero, zero];
    KrausChannel::new(1, vec![k1, k2])
}

/// How sampled bits are corrupted at readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum BiasVariant {
    /// A true 1 is read as 0 with probability `2 eps`; a true 0 is always
    /// read faithfully. A uniform bit lands at `0.5 + eps` / `0.5 - eps`.
    #[default]
    Asymmetric,
    /// Both values flip with probability `eps`.
    Symmetric,
}


/// Probability of reading 1 given the true probability `p1`.
pub fn biased_probability_of_one<T: Real>(p1: T, eps: T, variant: BiasVariant) -> T {
    match variant {
        BiasVariant::Asymmetric => p1 * (T::one() - T::of(2.0) * eps),
        BiasVariant::Symmetric => p1 * (T::one() - eps) + (T::one() - p1) * eps,
    }
}

/// Applies the bias to a list of per-qubit outcome probabilities.
pub fn apply_readout_bias<T: Real>(
    probabilities: &[T],
    eps: T,
    variant: BiasVariant,
) -> Result<Vec<T>> {
    check_bias(eps)?;
    for &p in probabilities {
        check_probability(p)?;
    }
    Ok(probabilities
        .iter()
        .map(|&p| biased_probability_of_one(p, eps, variant))
        .collect())
}

/// Corrupts one sampled bit in place of the probability-level map.
pub fn flip_readout_bit<T: Real, R: Rng + ?Sized>(
    bit: u8,
    eps: T,
    variant: BiasVariant,
    rng: &mut R,
) -> u8 {
    let eps = eps.to_f64().unwrap_or(0.0);
    let u: f64 = rng.random();
    match variant {
        BiasVariant::Asymmetric => {
            if bit == 1 && u < 2.0 * eps {
                0
            } else {
                bit
            }
        }
        BiasVariant::Symmetric => {
            if u < eps {
                1 - bit
            } else {
                bit
            }
        }
    }
}

/// The asymmetric bias as a Kraus channel acting right before a Z-basis
/// measurement: amplitude decay with probability `2 eps`.
pub fn readout_bias_channel<T: Real>(eps: T) -> Result<KrausChannel<T>> {
    check_bias(eps)?;
    depolarizing_channel(T::of(2.0) * eps)
}

/// Gate-class channels plus readout bias. `None` leaves a class clean.
#[derive(Clone, Debug)]
pub struct NoiseModel<T> {
    pub one_qubit: Option<KrausChannel<T>>,
    pub two_qubit: Option<KrausChannel<T>>,
    pub readout_bias: T,
    pub bias_variant: BiasVariant,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(
        one_qubit: Option<KrausChannel<T>>,
        two_qubit: Option<KrausChannel<T>>,
        readout_bias: T,
        bias_variant: BiasVariant,
    ) -> Result<NoiseModel<T>> {
        check_bias(readout_bias)?;
        for ch in [&one_qubit, &two_qubit].into_iter().flatten() {
            if ch.n_targets() != 1 {
                return Err(Error::ChannelArityMismatch {
                    channel: ch.n_targets(),
                    targets: 1,
                });
            }
        }
        Ok(NoiseModel {
            one_qubit,
            two_qubit,
            readout_bias,
            bias_variant,
        })
    }

    /// A model that does nothing; useful as a config default.
    pub fn ideal() -> NoiseModel<T> {
        NoiseModel {
            one_qubit: None,
            two_qubit: None,
            readout_bias: T::zero(),
            bias_variant: BiasVariant::Asymmetric,
        }
    }

    pub fn has_gate_noise(&self) -> bool {
        self.one_qubit.is_some() || self.two_qubit.is_some()
    }

    pub fn has_readout_bias(&self) -> bool {
        self.readout_bias > T::zero()
    }

    /// Channel applications a gate incurs: the one-qubit channel on a
    /// single target, the two-qubit channel on every target of wider
    /// gates (including multi-site Pauli exponentials).
    pub fn applications_for_gate(&self, gate: &Gate<T>) -> Vec<ChannelApplication<T>> {
        let targets = gate.targets();
        let channel = if targets.len() == 1 {
            &self.one_qubit
        } else {
            &self.two_qubit
        };
        match channel {
            None => Vec::new(),
            Some(ch) => targets.iter().map(|&q| (ch.clone(), vec![q])).collect(),
        }
    }
}

/// Per-site basis rotations that map the measured parity onto a Z string:
/// `H S_dagger` where the parity letter is Y, `H` where it is X, identity
/// elsewhere. Site order matches the chain.
pub fn measurement_rotations<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
) -> Result<Vec<Vec<Complex<T>>>> {
    let parity = match kind {
        ResourceKind::Cluster => symmetry::sublattice_parity(l, boundary, ParityKind::Total)?,
        ResourceKind::Trivial => symmetry::prefix_parity(kind, l, boundary, l)?,
    };
    let inv_sqrt2 = T::one() / T::of(2.0).sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let r = Complex::new(inv_sqrt2, T::zero());
    let h = vec![r, r, r, -r];
    // H S_dagger = (1/sqrt 2) [[1, -i], [1, i]].
    let hsdg = vec![
        r,
        Complex::new(T::zero(), -inv_sqrt2),
        r,
        Complex::new(T::zero(), inv_sqrt2),
    ];
    let eye = vec![one, zero, zero, one];
    Ok(parity
        .letters()
        .iter()
        .map(|letter| match letter {
            Letter::Y => hsdg.clone(),
            Letter::X => h.clone(),
            Letter::I | Letter::Z => eye.clone(),
        })
        .collect())
}

/// The readout bias expressed as channels on the unrotated resource
/// state: the decay pair conjugated into the frame each site is measured
/// in. Feeding these to the channel classifier shows the bias breaking
/// the chain symmetry while the gate channels preserve it.
pub fn bias_as_state_frame_channels<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    eps: T,
) -> Result<Vec<ChannelApplication<T>>> {
    let damping = readout_bias_channel(eps)?;
    let rotations = measurement_rotations::<T>(kind, l, boundary)?;
    rotations
        .into_iter()
        .enumerate()
        .map(|(q, v)| Ok((damping.conjugated_by(&v)?, vec![q])))
        .collect()
}

/// Analytic targets for the i.i.d. biased-bit model of the two-copy
/// purity estimator at subsystem size `l_a`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BiasPredictions<T> {
    /// Per-site second-moment factor `(0.5+e)^2 + 2(0.5+e)(0.5-e) - (0.5-e)^2`.
    pub per_site_factor: T,
    /// Exact `-ln S2` for `l_a` sites under the model.
    pub neg_ln_s2_exact: T,
    /// Small-bias approximation `l_a (ln 2 - 4 eps)`.
    pub neg_ln_s2_approx: T,
    /// Parity-sector probability gap `(2 eps)^{l_a}`.
    pub sector_gap: T,
}

/// Predictions for uniformly random bits read through the asymmetric
/// bias, so each bit is 1 with probability `0.5 - eps`.
pub fn bias_model_predictions<T: Real>(eps: T, l_a: usize) -> Result<BiasPredictions<T>> {
    check_bias(eps)?;
    if l_a == 0 {
        return Err(Error::InvalidSubsystem { l_a, l: 0 });
    }
    let half = T::of(0.5);
    let p_hi = half + eps;
    let p_lo = half - eps;
    let per_site_factor = p_hi * p_hi + T::of(2.0) * p_hi * p_lo - p_lo * p_lo;
    let l_a_t = T::of(l_a as f64);
    Ok(BiasPredictions {
        per_site_factor,
        neg_ln_s2_exact: -l_a_t * per_site_factor.ln(),
        neg_ln_s2_approx: l_a_t * (T::of(2.0).ln() - T::of(4.0) * eps),
        sector_gap: (T::of(2.0) * eps).powi(l_a as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::state::{Gate, MixedState, PureState};
    use crate::symmetry::{
        classify_channel, default_commutator_tol, edge_symmetry_ops, SymmetryContext,
    };
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_state() -> MixedState<f64> {
        let mut s = PureState::<f64>::zero_state(1).unwrap();
        s.apply_gate(&Gate::H(0)).unwrap();
        s.density_matrix()
    }

    fn open_cluster(l: usize) -> MixedState<f64> {
        let mut s = PureState::<f64>::zero_state(l).unwrap();
        for q in 0..l {
            s.apply_gate(&Gate::H(q)).unwrap();
        }
        for q in 0..l - 1 {
            s.apply_gate(&Gate::Cz(q, q + 1)).unwrap();
        }
        s.density_matrix()
    }

    #[test]
    fn dephasing_scales_coherences() {
        let mut rho = plus_state();
        let ch = dephasing_channel(0.1).unwrap();
        rho.apply_kraus(&ch, &[0]).unwrap();
        assert!((rho.entry(0, 1).re - 0.4).abs() < 1e-14);
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-14);
        // p = 1 is the unitary Z limit: purity stays 1.
        let mut rho = plus_state();
        rho.apply_kraus(&dephasing_channel(1.0).unwrap(), &[0]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.entry(0, 1).re + 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_strength_channels_are_identities() {
        let mut rho = plus_state();
        let before = rho.matrix().to_vec();
        rho.apply_kraus(&dephasing_channel(0.0).unwrap(), &[0]).unwrap();
        rho.apply_kraus(&depolarizing_channel(0.0).unwrap(), &[0]).unwrap();
        for (a, b) in rho.matrix().iter().zip(&before) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn decay_channel_moves_population_toward_zero() {
        let mut s = PureState::<f64>::zero_state(1).unwrap();
        s.apply_gate(&Gate::X(0)).unwrap();
        let mut rho = s.density_matrix();
        let p = 0.3;
        rho.apply_kraus(&depolarizing_channel(p).unwrap(), &[0]).unwrap();
        // <Z> rises from -1 to -1 + 2p.
        let z = rho.pauli_expectation(&"Z".parse().unwrap()).unwrap();
        assert!((z.re - (-1.0 + 2.0 * p)).abs() < 1e-14);
        // Coherences scale by sqrt(1-p).
        let mut rho = plus_state();
        rho.apply_kraus(&depolarizing_channel(p).unwrap(), &[0]).unwrap();
        assert!((rho.entry(1, 0).re - 0.5 * (1.0 - p).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn invalid_strengths_are_rejected() {
        assert!(dephasing_channel(-0.1f64).is_err());
        assert!(dephasing_channel(1.5f64).is_err());
        assert!(bias_model_predictions(0.5f64, 2).is_err());
        assert!(apply_readout_bias(&[0.5f64], 0.7, BiasVariant::Asymmetric).is_err());
    }

    #[test]
    fn asymmetric_bias_shifts_a_uniform_bit() {
        let eps = 0.07_f64;
        let biased = apply_readout_bias(&[0.5, 0.0, 1.0], eps, BiasVariant::Asymmetric).unwrap();
        assert!((biased[0] - 0.43).abs() < 1e-15);
        assert_eq!(biased[1], 0.0);
        assert!((biased[2] - 0.86).abs() < 1e-15);
        let sym = apply_readout_bias(&[0.5, 0.0], eps, BiasVariant::Symmetric).unwrap();
        assert!((sym[0] - 0.5).abs() < 1e-15);
        assert!((sym[1] - eps).abs() < 1e-15);
    }

    #[test]
    fn sampled_flips_match_the_probability_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eps = 0.07;
        let n = 200_000;
        let mut ones = 0usize;
        for i in 0..n {
            let bit = (i % 2) as u8;
            if flip_readout_bit::<f64, _>(bit, eps, BiasVariant::Asymmetric, &mut rng) == 1 {
                ones += 1;
            }
        }
        let freq = ones as f64 / n as f64;
        let se = (0.43f64 * 0.57 / n as f64).sqrt();
        assert!((freq - 0.43).abs() < 4.0 * se, "freq {freq}");
    }

    #[test]
    fn bias_predictions_match_pinned_values() {
        let p = bias_model_predictions(0.07f64, 4).unwrap();
        assert!((p.per_site_factor - 0.6302).abs() < 1e-12);
        assert!((p.neg_ln_s2_exact / 4.0 - 0.4618).abs() < 1e-4);
        assert!((p.neg_ln_s2_approx / 4.0 - 0.4131).abs() < 1e-4);
        assert!((p.sector_gap - 0.14f64.powi(4)).abs() < 1e-15);
        // Zero bias recovers the clean values.
        let clean = bias_model_predictions(0.0f64, 3).unwrap();
        assert!((clean.neg_ln_s2_exact - 3.0 * 2.0f64.ln()).abs() < 1e-12);
        assert_eq!(clean.sector_gap, 0.0);
    }

    #[test]
    fn gate_class_routing_hits_every_target() {
        let model = NoiseModel::new(
            Some(dephasing_channel(0.1).unwrap()),
            Some(dephasing_channel(0.2).unwrap()),
            0.0,
            BiasVariant::Asymmetric,
        )
        .unwrap();
        assert_eq!(model.applications_for_gate(&Gate::H(2)).len(), 1);
        let cz = model.applications_for_gate(&Gate::Cz(0, 3));
        assert_eq!(cz.len(), 2);
        assert_eq!(cz[0].1, vec![0]);
        assert_eq!(cz[1].1, vec![3]);
        let exp = Gate::PauliExp {
            string: "ZXZ".parse().unwrap(),
            theta: 0.3,
        };
        assert_eq!(model.applications_for_gate(&exp).len(), 3);
        let quiet = NoiseModel::<f64>::ideal();
        assert!(quiet.applications_for_gate(&Gate::H(0)).is_empty());
    }

    #[test]
    fn gate_channels_preserve_the_chain_symmetry() {
        let rho = open_cluster(4);
        let ctx = SymmetryContext {
            state: &rho,
            subsystem: vec![0, 1],
            preserved_ops: edge_symmetry_ops(Boundary::Open, 2).unwrap(),
            tol: default_commutator_tol::<f64>(),
        };
        for p in [0.05, 0.1, 0.3] {
            for ch in [dephasing_channel(p).unwrap(), depolarizing_channel(p).unwrap()] {
                let apps: Vec<_> = (0..4).map(|q| (ch.clone(), vec![q])).collect();
                let c = classify_channel(&apps, &ctx).unwrap();
                assert!(c.preserving, "p={p}: witness {}", c.witness);
            }
        }
    }

    #[test]
    fn readout_bias_breaks_the_chain_symmetry() {
        let rho = open_cluster(4);
        let ctx = SymmetryContext {
            state: &rho,
            subsystem: vec![0, 1],
            preserved_ops: edge_symmetry_ops(Boundary::Open, 2).unwrap(),
            tol: default_commutator_tol::<f64>(),
        };
        let apps =
            bias_as_state_frame_channels::<f64>(ResourceKind::Cluster, 4, Boundary::Open, 0.07)
                .unwrap();
        let c = classify_channel(&apps, &ctx).unwrap();
        assert!(!c.preserving);
        assert!(c.witness > 1e-3, "witness {}", c.witness);
    }

    #[test]
    fn rotated_bias_reproduces_the_measured_marginals() {
        // Rotating, decaying and reading Z equals biasing the rotated
        // distribution directly: check the parity expectation.
        let l = 4;
        let eps = 0.07;
        let mut noisy = open_cluster(l);
        for (ch, t) in
            bias_as_state_frame_channels::<f64>(ResourceKind::Cluster, l, Boundary::Open, eps)
                .unwrap()
        {
            noisy.apply_kraus(&ch, &t).unwrap();
        }
        // Prefix parity of two sites: uniform marginal, so the gap is (2 eps)^2.
        let parity = symmetry::sublattice_parity(l, Boundary::Open, ParityKind::Subsystem(2))
            .unwrap()
            .embedded(l, 0)
            .unwrap();
        let got = noisy.pauli_expectation(&parity).unwrap();
        assert!((got.re - 0.14f64.powi(2)).abs() < 1e-12, "gap {}", got.re);
        assert!(got.im.abs() < 1e-13);
        // The full-length parity keeps its constraint-inflated value.
        let total = symmetry::sublattice_parity(l, Boundary::Open, ParityKind::Total).unwrap();
        let u = 1.0 - 4.0 * eps;
        let want = (1.0 + 6.0 * u * u + u.powi(4)) / 8.0;
        let got = noisy.pauli_expectation(&total).unwrap();
        assert!((got.re - want).abs() < 1e-12, "{} vs {want}", got.re);
    }

    #[test]
    fn measurement_rotations_diagonalize_the_parity() {
        // Conjugating each parity letter by its rotation gives Z.
        let rots = measurement_rotations::<f64>(ResourceKind::Cluster, 4, Boundary::Open).unwrap();
        let parity = symmetry::sublattice_parity(4, Boundary::Open, ParityKind::Total).unwrap();
        for (letter, v) in parity.letters().iter().zip(&rots) {
            let m = crate::pauli::PauliString::from_letters(vec![*letter]).to_matrix::<f64>();
            let vm = linalg::matmul(v, &m, 2);
            let mut vdg = vec![Complex64::default(); 4];
            for i in 0..2 {
                for j in 0..2 {
                    vdg[i * 2 + j] = v[j * 2 + i].conj();
                }
            }
            let rotated = linalg::matmul(&vm, &vdg, 2);
            let z = crate::pauli::PauliString::from_letters(vec![crate::pauli::Letter::Z])
                .to_matrix::<f64>();
            for (a, b) in rotated.iter().zip(&z) {
                assert!((a - b).norm() < 1e-14, "letter {letter:?}");
            }
        }
    }
}
