//! Entanglement oracles and shot-record estimators.
//!
//! The oracle side works on exact reduced density matrices: spectra,
//! Renyi entropies and symmetry-resolved moments. The estimator side
//! reproduces the same quantities from the measurement records of the
//! two-copy interference circuits and the parity-basis probability
//! circuit, with standard errors.

use crate::circuits::{self, ShotRecord};
use crate::error::{Error, Result};
use crate::pauli::Phase;
use crate::real::Real;
use crate::state::MixedState;
use crate::symmetry::{
    build_sector_projector, prefix_parity_action, symmetry_resolved_moment, Boundary,
    ResourceKind,
};
use crate::{linalg, symmetry};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: T,
    pub shots: usize,
}

impl<T: Real> Estimate<T> {
    /// Mean and standard error of a plus/minus-one variable from its
    /// positive count.
    pub(crate) fn from_sign_counts(positive: usize, total: usize) -> Estimate<T> {
        let n = total as f64;
        let mean = (2.0 * positive as f64 - n) / n;
        let se = if total > 1 {
            ((1.0 - mean * mean).max(0.0) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Estimate {
            value: T::of(mean),
            std_error: T::of(se),
            shots: total,
        }
    }

    pub fn scaled(self, factor: T) -> Estimate<T> {
        Estimate {
            value: self.value * factor,
            std_error: self.std_error * factor.abs(),
            shots: self.shots,
        }
    }
}

/// Mean of a complex unit-modulus product with per-component errors.
/// The real part carries the physics; the imaginary magnitude is a
/// symmetry-breaking diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate<T> {
    pub real: T,
    pub imag: T,
    pub std_error_real: T,
    pub std_error_imag: T,
    pub shots: usize,
}

impl<T: Real> ComplexEstimate<T> {
    /// Class counts over i^0..i^3 products.
    fn from_phase_counts(counts: [usize; 4], total: usize) -> ComplexEstimate<T> {
        let n = total as f64;
        let re = (counts[0] as f64 - counts[2] as f64) / n;
        let im = (counts[1] as f64 - counts[3] as f64) / n;
        let re_sq = (counts[0] + counts[2]) as f64 / n;
        let im_sq = (counts[1] + counts[3]) as f64 / n;
        let se = |sq: f64, mean: f64| -> f64 {
            if total > 1 {
                ((sq - mean * mean).max(0.0) / (n - 1.0)).sqrt()
            } else {
                0.0
            }
        };
        ComplexEstimate {
            real: T::of(re),
            imag: T::of(im),
            std_error_real: T::of(se(re_sq, re)),
            std_error_imag: T::of(se(im_sq, im)),
            shots: total,
        }
    }

    /// Rotates the estimate by a Pauli phase (its value on the i-cycle),
    /// folding the overall sign or quarter turn of the measured string.
    pub fn rotated_by(self, phase: Phase) -> ComplexEstimate<T> {
        let (real, imag, se_r, se_i) = match phase.exponent() {
            0 => (self.real, self.imag, self.std_error_real, self.std_error_imag),
            1 => (-self.imag, self.real, self.std_error_imag, self.std_error_real),
            2 => (-self.real, -self.imag, self.std_error_real, self.std_error_imag),
            _ => (self.imag, -self.real, self.std_error_imag, self.std_error_real),
        };
        ComplexEstimate {
            real,
            imag,
            std_error_real: se_r,
            std_error_imag: se_i,
            shots: self.shots,
        }
    }
}

/// Descending real spectrum of a reduced density matrix. Small negative
/// dust within tolerance is clipped to zero; anything below that is a
/// genuine defect and is left visible.
pub fn entanglement_spectrum<T: Real>(rho: &MixedState<T>) -> Result<Vec<T>> {
    let dim = rho.dim();
    let witness = linalg::hermiticity_witness(rho.matrix(), dim);
    if witness > T::tol_channel() {
        return Err(Error::NonHermitian {
            witness: witness.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut eig = linalg::hermitian_eigenvalues(rho.matrix(), dim)?;
    for lambda in &mut eig {
        if *lambda < T::zero() && *lambda >= -T::tol_channel() {
            *lambda = T::zero();
        }
    }
    Ok(eig)
}

/// Renyi entropy of order `n`: minus the log of the n-th moment for
/// n >= 2, the von Neumann entropy at n = 1.
pub fn renyi_entropy<T: Real>(rho: &MixedState<T>, n: u32) -> Result<T> {
    match n {
        0 => Err(Error::InvalidRenyiIndex(0)),
        1 => {
            let spectrum = entanglement_spectrum(rho)?;
            let mut s = T::zero();
            for lambda in spectrum {
                if lambda > T::zero() {
                    s -= lambda * lambda.ln();
                }
            }
            Ok(s)
        }
        _ => Ok(-rho.moment(n).ln()),
    }
}

fn check_pair_width(record: &ShotRecord, l_a: usize) -> Result<usize> {
    let width = record.width();
    if !width.is_multiple_of(2) || width < 2 * l_a || l_a == 0 {
        return Err(Error::RecordWidthMismatch { width, l_a });
    }
    Ok(width / 2)
}

/// Purity estimator from plain swap-test records: per shot the product
/// of pair signs over the first `l_a` pairs, where a pair reads minus
/// one exactly on outcome (1,1).
pub fn estimate_s2_from_shots<T: Real>(record: &ShotRecord, l_a: usize) -> Result<Estimate<T>> {
    check_pair_width(record, l_a)?;
    if record.is_empty() {
        return Err(Error::InconsistentRecords);
    }
    let mut positive = 0usize;
    for s in 0..record.len() {
        let mask = record.mask(s);
        let mut minus = 0u32;
        for i in 0..l_a {
            let pair = (mask >> (2 * i)) & 0b11;
            if pair == 0b11 {
                minus ^= 1;
            }
        }
        if minus == 0 {
            positive += 1;
        }
    }
    Ok(Estimate::from_sign_counts(positive, record.len()))
}

/// Parity-weighted purity estimator from modified swap-test records:
/// per shot the product of decoded pair eigenvalues over the first
/// `l_a` pairs. The complex mean is returned; its real part estimates
/// the trace of rho squared against the parity string.
pub fn estimate_modified_from_shots<T: Real>(
    record: &ShotRecord,
    l_a: usize,
) -> Result<ComplexEstimate<T>> {
    check_pair_width(record, l_a)?;
    if record.is_empty() {
        return Err(Error::InconsistentRecords);
    }
    let table = circuits::modified_pair_decode::<T>()?;
    // Map each outcome to its power of i for exact modular products.
    let mut exponents = [0u8; 4];
    for (idx, value) in table.iter().enumerate() {
        let v = Complex::new(
            value.re.to_f64().unwrap_or(f64::NAN),
            value.im.to_f64().unwrap_or(f64::NAN),
        );
        exponents[idx] = if (v - Complex::new(1.0, 0.0)).norm() < 1e-9 {
            0
        } else if (v - Complex::new(0.0, 1.0)).norm() < 1e-9 {
            1
        } else if (v + Complex::new(1.0, 0.0)).norm() < 1e-9 {
            2
        } else {
            3
        };
    }
    let mut counts = [0usize; 4];
    for s in 0..record.len() {
        let mask = record.mask(s);
        let mut k = 0u8;
        for i in 0..l_a {
            let pair = ((mask >> (2 * i)) & 0b11) as usize;
            k = (k + exponents[pair]) % 4;
        }
        counts[k as usize] += 1;
    }
    Ok(ComplexEstimate::from_phase_counts(counts, record.len()))
}

/// Prefix-parity estimator from single-copy probability records: per
/// shot plus one when the first `l_a` bits hold an even number of ones.
pub fn estimate_parity_from_shots<T: Real>(
    record: &ShotRecord,
    l_a: usize,
) -> Result<Estimate<T>> {
    if record.width() < l_a || l_a == 0 {
        return Err(Error::RecordWidthMismatch {
            width: record.width(),
            l_a,
        });
    }
    if record.is_empty() {
        return Err(Error::InconsistentRecords);
    }
    let prefix: u64 = if l_a == 64 { u64::MAX } else { (1u64 << l_a) - 1 };
    let mut positive = 0usize;
    for s in 0..record.len() {
        if (record.mask(s) & prefix).count_ones().is_multiple_of(2) {
            positive += 1;
        }
    }
    Ok(Estimate::from_sign_counts(positive, record.len()))
}

/// Sampled first and second moments of one parity sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorEstimate<T> {
    pub sector: i8,
    pub s1: Estimate<T>,
    pub s2: Estimate<T>,
}

/// Combined sector-resolved estimates from the three probe records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEstimates<T> {
    pub l_a: usize,
    pub purity: Estimate<T>,
    pub parity: Estimate<T>,
    pub weighted_purity: ComplexEstimate<T>,
    pub sectors: [SectorEstimate<T>; 2],
}

/// Combines plain, modified and probability records at one subsystem
/// size, assuming the parity string carries no overall phase. Probe
/// circuits built by this crate satisfy that for strict prefixes and
/// for even-length chains; fold any other phase with
/// [`estimate_resolved_with_phase`].
pub fn estimate_resolved_from_shots<T: Real>(
    plain: &ShotRecord,
    modified: &ShotRecord,
    prob: &ShotRecord,
    l_a: usize,
) -> Result<ResolvedEstimates<T>> {
    estimate_resolved_with_phase(plain, modified, prob, l_a, Phase::ONE)
}

/// [`estimate_resolved_from_shots`] with an explicit parity phase,
/// rotated into the weighted-purity estimate before sector splitting.
pub fn estimate_resolved_with_phase<T: Real>(
    plain: &ShotRecord,
    modified: &ShotRecord,
    prob: &ShotRecord,
    l_a: usize,
    phase: Phase,
) -> Result<ResolvedEstimates<T>> {
    let l = check_pair_width(plain, l_a)?;
    if modified.width() != plain.width() || prob.width() != l {
        return Err(Error::InconsistentRecords);
    }
    let purity = estimate_s2_from_shots::<T>(plain, l_a)?;
    let weighted = estimate_modified_from_shots::<T>(modified, l_a)?.rotated_by(phase);
    let parity = estimate_parity_from_shots::<T>(prob, l_a)?;
    let half = T::of(0.5);
    let sector = |sign: T| -> SectorEstimate<T> {
        let s1 = Estimate {
            value: (T::one() + sign * parity.value) * half,
            std_error: parity.std_error * half,
            shots: parity.shots,
        };
        let s2_se = (purity.std_error * purity.std_error
            + weighted.std_error_real * weighted.std_error_real)
            .sqrt()
            * half;
        let s2 = Estimate {
            value: (purity.value + sign * weighted.real) * half,
            std_error: s2_se,
            shots: purity.shots,
        };
        SectorEstimate {
            sector: if sign > T::zero() { 1 } else { -1 },
            s1,
            s2,
        }
    };
    Ok(ResolvedEstimates {
        l_a,
        purity,
        parity,
        weighted_purity: weighted,
        sectors: [sector(T::one()), sector(-T::one())],
    })
}

/// One resolved-moment value inside a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEntry<T> {
    pub sector: String,
    pub n: u32,
    pub value: T,
    /// Magnitude of the imaginary part discarded by the real projection.
    pub imag_magnitude: T,
    /// False when the projector failed to commute with rho within the
    /// oracle tolerance.
    pub commuting: bool,
}

/// Exact entanglement data of one subsystem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport<T> {
    pub l_a: usize,
    pub spectrum: Vec<T>,
    /// Renyi order -> entropy; order 1 is the von Neumann entropy.
    pub renyi: BTreeMap<u32, T>,
    pub resolved: Vec<ResolvedEntry<T>>,
    pub degenerate: bool,
    pub degeneracy_gap: T,
}

impl<T: Real> EntanglementReport<T> {
    /// Structural invariants: unit trace, positivity up to clipping
    /// dust, sector probabilities summing to one.
    pub fn validate(&self) -> Result<()> {
        let total: T = self.spectrum.iter().copied().sum();
        if (total - T::one()).abs() > T::tol_channel() {
            return Err(Error::DimensionMismatch {
                got: self.spectrum.len(),
                expected: self.spectrum.len(),
            });
        }
        if self.spectrum.iter().any(|&x| x < -T::tol_channel()) {
            return Err(Error::NonHermitian {
                witness: self
                    .spectrum
                    .iter()
                    .fold(T::zero(), |acc, &x| acc.min(x))
                    .to_f64()
                    .unwrap_or(f64::NAN)
                    .abs(),
            });
        }
        let s1_total: T = self
            .resolved
            .iter()
            .filter(|e| e.n == 1)
            .map(|e| e.value)
            .sum();
        if (s1_total - T::one()).abs() > T::tol_channel() {
            return Err(Error::InconsistentRecords);
        }
        Ok(())
    }
}

/// Largest difference between sectors at any moment order, with the
/// verdict against a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCheck<T> {
    pub degenerate: bool,
    pub max_gap: T,
}

/// Checks sector degeneracy across every moment order in the report.
pub fn degeneracy_check<T: Real>(report: &EntanglementReport<T>, tol: T) -> DegeneracyCheck<T> {
    let mut by_order: BTreeMap<u32, Vec<T>> = BTreeMap::new();
    for entry in &report.resolved {
        by_order.entry(entry.n).or_default().push(entry.value);
    }
    let mut max_gap = T::zero();
    for values in by_order.values() {
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                max_gap = max_gap.max((values[i] - values[j]).abs());
            }
        }
    }
    DegeneracyCheck {
        degenerate: max_gap <= tol,
        max_gap,
    }
}

/// Default oracle tolerance for calling two sectors degenerate.
pub fn default_degeneracy_tol<T: Real>() -> T {
    T::of(1e-8)
}

/// Full exact report for a prefix subsystem of a resource state:
/// spectrum, Renyi entropies up to `n_max`, and parity-resolved moments
/// for both sectors.
pub fn oracle_report<T: Real>(
    rho: &MixedState<T>,
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    l_a: usize,
    n_max: u32,
) -> Result<EntanglementReport<T>> {
    if l_a == 0 || l_a > l || rho.n_qubits() != l_a {
        return Err(Error::InvalidSubsystem { l_a, l });
    }
    let spectrum = entanglement_spectrum(rho)?;
    let mut renyi = BTreeMap::new();
    for n in 1..=n_max.max(1) {
        renyi.insert(n, renyi_entropy(rho, n)?);
    }
    let (group, action) = prefix_parity_action(kind, l, boundary, l_a)?;
    let mut resolved = Vec::new();
    for k in 0..group.order() {
        let projector = build_sector_projector::<T>(&group, k, &action)?;
        for n in 1..=n_max.max(1) {
            let moment =
                symmetry_resolved_moment(rho, &projector, n, symmetry::default_commutator_tol())?;
            resolved.push(ResolvedEntry {
                sector: group.sector_label(k),
                n,
                value: moment.value,
                imag_magnitude: moment.imag_magnitude,
                commuting: moment.commuting,
            });
        }
    }
    let mut report = EntanglementReport {
        l_a,
        spectrum,
        renyi,
        resolved,
        degenerate: false,
        degeneracy_gap: T::zero(),
    };
    let check = degeneracy_check(&report, default_degeneracy_tol());
    report.degenerate = check.degenerate;
    report.degeneracy_gap = check.max_gap;
    Ok(report)
}

/// Reduced prefix state of a resource chain, the oracle-side input.
pub fn reduced_resource_state<T: Real>(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    l_a: usize,
) -> Result<MixedState<T>> {
    if l_a == 0 || l_a > l {
        return Err(Error::InvalidSubsystem { l_a, l });
    }
    let circuit = circuits::resource_circuit::<T>(kind, l, boundary)?;
    let mut state = crate::state::PureState::<T>::zero_state(l)?;
    for instruction in circuit.instructions() {
        if let crate::circuits::Instruction::Gate(g) = instruction {
            state.apply_gate(g)?;
        }
    }
    let keep: Vec<usize> = (0..l_a).collect();
    state.partial_trace(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{
        execute, modified_swap_test_circuit, swap_test_circuit,
        symmetry_resolved_probability_circuit,
    };

    fn cluster_rho(l: usize, boundary: Boundary, l_a: usize) -> MixedState<f64> {
        reduced_resource_state(ResourceKind::Cluster, l, boundary, l_a).unwrap()
    }

    #[test]
    fn spectra_match_the_edge_state_counting() {
        let rho = cluster_rho(8, Boundary::Periodic, 4);
        let spec = entanglement_spectrum(&rho).unwrap();
        for &v in &spec[..4] {
            assert!((v - 0.25).abs() < 1e-12, "{spec:?}");
        }
        for &v in &spec[4..] {
            assert!(v.abs() < 1e-12);
        }
        let rho = cluster_rho(4, Boundary::Open, 2);
        let spec = entanglement_spectrum(&rho).unwrap();
        assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12);
        assert!(spec[2].abs() < 1e-12 && spec[3].abs() < 1e-12);
        let rho =
            reduced_resource_state::<f64>(ResourceKind::Trivial, 4, Boundary::Open, 3).unwrap();
        let spec = entanglement_spectrum(&rho).unwrap();
        assert!((spec[0] - 1.0).abs() < 1e-12);
        assert!(spec[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn renyi_entropies_follow_the_spectrum() {
        let rho = cluster_rho(4, Boundary::Open, 2);
        assert!((renyi_entropy(&rho, 2).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((renyi_entropy(&rho, 1).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((renyi_entropy(&rho, 3).unwrap() + (0.25f64).ln()).abs() < 1e-12);
        let rho = cluster_rho(8, Boundary::Periodic, 4);
        assert!((renyi_entropy(&rho, 2).unwrap() - 4f64.ln()).abs() < 1e-12);
        let pure = cluster_rho(4, Boundary::Open, 4);
        assert!(renyi_entropy(&pure, 2).unwrap().abs() < 1e-12);
        assert!(matches!(
            renyi_entropy(&pure, 0),
            Err(Error::InvalidRenyiIndex(0))
        ));
    }

    #[test]
    fn open_cluster_entropy_profile_is_flat_then_zero() {
        let want = [2f64.ln(), 2f64.ln(), 2f64.ln(), 0.0];
        for (l_a, expected) in want.iter().enumerate() {
            let rho = cluster_rho(4, Boundary::Open, l_a + 1);
            let got = renyi_entropy(&rho, 2).unwrap();
            assert!((got - expected).abs() < 1e-12, "l_a={} got {got}", l_a + 1);
        }
        for l_a in 1..=4usize {
            let rho =
                reduced_resource_state::<f64>(ResourceKind::Trivial, 4, Boundary::Open, l_a)
                    .unwrap();
            assert!(renyi_entropy(&rho, 2).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn sign_estimator_arithmetic_on_crafted_records() {
        let zeros = ShotRecord::new(8, 0, vec![0; 16]).unwrap();
        let est = estimate_s2_from_shots::<f64>(&zeros, 2).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        // Pair 0 always (1,1): estimate -1 at l_a = 1.
        let ones = ShotRecord::new(8, 0, vec![0b11; 16]).unwrap();
        let est = estimate_s2_from_shots::<f64>(&ones, 1).unwrap();
        assert_eq!(est.value, -1.0);
        assert!(estimate_s2_from_shots::<f64>(&ones, 5).is_err());
        // Modified records where every shot decodes to +i at l_a = 1:
        // outcome (0,1) sits at bits (0,1) = (0,1) -> mask 0b10.
        let blended = ShotRecord::new(8, 0, vec![0b10; 16]).unwrap();
        let est = estimate_modified_from_shots::<f64>(&blended, 1).unwrap();
        assert_eq!((est.real, est.imag), (0.0, 1.0));
        // Two such pairs multiply to i^2 = -1.
        let est = estimate_modified_from_shots::<f64>(&ShotRecord::new(
            8,
            0,
            vec![0b1010; 16],
        )
        .unwrap(), 2)
        .unwrap();
        assert_eq!((est.real, est.imag), (-1.0, 0.0));
    }

    #[test]
    fn phase_rotation_spins_the_complex_estimate() {
        let est = ComplexEstimate::<f64> {
            real: 0.5,
            imag: 0.25,
            std_error_real: 0.01,
            std_error_imag: 0.02,
            shots: 100,
        };
        let spun = est.rotated_by(Phase::I);
        assert_eq!((spun.real, spun.imag), (-0.25, 0.5));
        assert_eq!(spun.std_error_real, 0.02);
        let back = spun.rotated_by(Phase::MINUS_I);
        assert_eq!(back, est);
        assert_eq!(
            est.rotated_by(Phase::MINUS_ONE).real,
            -est.real
        );
    }

    #[test]
    fn sampled_purities_match_the_oracle_for_every_prefix() {
        let shots = 8192;
        let circuit = swap_test_circuit::<f64>(ResourceKind::Cluster, 4, Boundary::Open, 1)
            .unwrap();
        let rec = execute(&circuit, None, shots, 11).unwrap();
        for l_a in 1..=4usize {
            let rho = cluster_rho(4, Boundary::Open, l_a);
            let want = rho.purity();
            let est = estimate_s2_from_shots::<f64>(&rec, l_a).unwrap();
            assert!(
                (est.value - want).abs() < 3.0 * est.std_error.max(1e-6),
                "l_a={l_a}: {} vs {want}",
                est.value
            );
        }
    }

    #[test]
    fn resolved_estimates_reproduce_the_sector_split() {
        let shots = 8192;
        for (kind, s1_want, s2_want) in [
            (ResourceKind::Cluster, [0.5, 0.5], [0.25, 0.25]),
            (ResourceKind::Trivial, [1.0, 0.0], [1.0, 0.0]),
        ] {
            let plain = execute(
                &swap_test_circuit::<f64>(kind, 4, Boundary::Open, 2).unwrap(),
                None,
                shots,
                31,
            )
            .unwrap();
            let modified = execute(
                &modified_swap_test_circuit::<f64>(kind, 4, Boundary::Open, 2).unwrap(),
                None,
                shots,
                32,
            )
            .unwrap();
            let prob = execute(
                &symmetry_resolved_probability_circuit::<f64>(kind, 4, Boundary::Open).unwrap(),
                None,
                shots,
                33,
            )
            .unwrap();
            let resolved =
                estimate_resolved_from_shots::<f64>(&plain, &modified, &prob, 2).unwrap();
            for (k, sector) in resolved.sectors.iter().enumerate() {
                let tol1 = 3.0 * sector.s1.std_error.max(1e-6);
                let tol2 = 3.0 * sector.s2.std_error.max(1e-6);
                assert!(
                    (sector.s1.value - s1_want[k]).abs() < tol1,
                    "{kind} sector {}: s1 {} vs {}",
                    sector.sector,
                    sector.s1.value,
                    s1_want[k]
                );
                assert!(
                    (sector.s2.value - s2_want[k]).abs() < tol2,
                    "{kind} sector {}: s2 {} vs {}",
                    sector.sector,
                    sector.s2.value,
                    s2_want[k]
                );
            }
            let s1_sum: f64 = resolved.sectors.iter().map(|s| s.s1.value).sum();
            assert!((s1_sum - 1.0).abs() < 1e-12, "sector probabilities sum");
        }
    }

    #[test]
    fn full_chain_parity_is_pinned_noiselessly() {
        let prob = execute(
            &symmetry_resolved_probability_circuit::<f64>(
                ResourceKind::Cluster,
                4,
                Boundary::Open,
            )
            .unwrap(),
            None,
            2048,
            5,
        )
        .unwrap();
        let parity = estimate_parity_from_shots::<f64>(&prob, 4).unwrap();
        assert_eq!(parity.value, 1.0);
        assert_eq!(parity.std_error, 0.0);
    }

    #[test]
    fn oracle_report_flags_degeneracy_correctly() {
        let rho = cluster_rho(4, Boundary::Open, 2);
        let report =
            oracle_report(&rho, ResourceKind::Cluster, 4, Boundary::Open, 2, 3).unwrap();
        report.validate().unwrap();
        assert!(report.degenerate, "gap {}", report.degeneracy_gap);
        assert!(report.resolved.iter().all(|e| e.commuting));
        // Sector moments additivity at n = 2.
        let s2_sum: f64 = report
            .resolved
            .iter()
            .filter(|e| e.n == 2)
            .map(|e| e.value)
            .sum();
        assert!((s2_sum - rho.purity()).abs() < 1e-12);

        let trivial =
            reduced_resource_state::<f64>(ResourceKind::Trivial, 4, Boundary::Open, 2).unwrap();
        let report =
            oracle_report(&trivial, ResourceKind::Trivial, 4, Boundary::Open, 2, 2).unwrap();
        report.validate().unwrap();
        assert!(!report.degenerate);
        assert!((report.degeneracy_gap - 1.0).abs() < 1e-12, "trivial gap at n=1");
    }

    #[test]
    fn degeneracy_check_tolerance_boundary() {
        let mut report = EntanglementReport::<f64> {
            l_a: 1,
            spectrum: vec![1.0],
            renyi: BTreeMap::new(),
            resolved: vec![
                ResolvedEntry {
                    sector: "+1".into(),
                    n: 1,
                    value: 0.6,
                    imag_magnitude: 0.0,
                    commuting: true,
                },
                ResolvedEntry {
                    sector: "-1".into(),
                    n: 1,
                    value: 0.4,
                    imag_magnitude: 0.0,
                    commuting: true,
                },
            ],
            degenerate: false,
            degeneracy_gap: 0.0,
        };
        let check = degeneracy_check(&report, 0.1);
        assert!(!check.degenerate);
        assert!((check.max_gap - 0.2).abs() < 1e-15);
        let loose = degeneracy_check(&report, 0.2);
        assert!(loose.degenerate);
        report.resolved[1].value = 0.6;
        assert!(degeneracy_check(&report, 1e-12).degenerate);
    }

    #[test]
    fn report_validation_rejects_broken_invariants() {
        let report = EntanglementReport::<f64> {
            l_a: 1,
            spectrum: vec![0.7, 0.7],
            renyi: BTreeMap::new(),
            resolved: Vec::new(),
            degenerate: true,
            degeneracy_gap: 0.0,
        };
        assert!(report.validate().is_err());
    }
}
