//! Experiment runners.
//!
//! Each runner executes the probe circuits dictated by the config,
//! folds the shot records into estimates (standard errors across runs
//! when `runs > 1`, within-run otherwise), and attaches two kinds of
//! reference values: estimand oracles (the exact expectation of the
//! estimator under the exact register distribution, noise and bias
//! folded in) and state oracles (exact density-matrix properties of the
//! evolved resource). Sampled columns converge to the estimand oracle;
//! the state oracle is the physical quantity behind it.

use crate::circuits::{
    derive_seed, exact_outcome_distribution, execute, modified_pair_decode,
    modified_swap_test_circuit, resource_circuit, swap_test_circuit,
    symmetry_resolved_probability_circuit, teleport_branches, Circuit, Instruction, ShotRecord,
};
use crate::entanglement::{
    estimate_parity_from_shots, estimate_resolved_with_phase, estimate_s2_from_shots,
    oracle_report, ComplexEstimate, EntanglementReport, Estimate, ResolvedEstimates,
    SectorEstimate,
};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::oracle::{expectation_estimand, parity_estimand, purity_estimand, weighted_estimand};
use crate::harness::tomography::{
    corrected_fidelity, frame_corrected_value, teleport_tomography_circuit, tomography, Fidelity,
    TomographyResult,
};
use crate::noise::{
    bias_as_state_frame_channels, bias_model_predictions, BiasPredictions, BiasVariant, NoiseModel,
};
use crate::pauli::Letter;
use crate::state::{MixedState, PureState};
use crate::symmetry::{
    classify_channel, default_commutator_tol, edge_symmetry_ops, prefix_parity, ResourceKind,
    SymmetryContext,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn require_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config selects experiment {}, runner expects {kind}",
            cfg.experiment
        )));
    }
    Ok(())
}

/// Mean of per-run means; the standard error is across runs when there
/// is more than one, within the single run otherwise.
fn aggregate_estimates(per_run: &[Estimate<f64>]) -> Estimate<f64> {
    if per_run.len() == 1 {
        return per_run[0];
    }
    let n = per_run.len() as f64;
    let mean = per_run.iter().map(|e| e.value).sum::<f64>() / n;
    let var = per_run
        .iter()
        .map(|e| (e.value - mean) * (e.value - mean))
        .sum::<f64>()
        / (n * (n - 1.0));
    Estimate {
        value: mean,
        std_error: var.sqrt(),
        shots: per_run.iter().map(|e| e.shots).sum(),
    }
}

fn aggregate_complex(per_run: &[ComplexEstimate<f64>]) -> ComplexEstimate<f64> {
    if per_run.len() == 1 {
        return per_run[0];
    }
    let reals: Vec<Estimate<f64>> = per_run
        .iter()
        .map(|e| Estimate {
            value: e.real,
            std_error: e.std_error_real,
            shots: e.shots,
        })
        .collect();
    let imags: Vec<Estimate<f64>> = per_run
        .iter()
        .map(|e| Estimate {
            value: e.imag,
            std_error: e.std_error_imag,
            shots: e.shots,
        })
        .collect();
    let re = aggregate_estimates(&reals);
    let im = aggregate_estimates(&imags);
    ComplexEstimate {
        real: re.value,
        imag: im.value,
        std_error_real: re.std_error,
        std_error_imag: im.std_error,
        shots: re.shots,
    }
}

/// Negative log of a purity estimate, propagated by the delta method;
/// `None` when the estimate is nonpositive and the log undefined.
fn neg_ln_estimate(purity: &Estimate<f64>) -> Option<Estimate<f64>> {
    if purity.value <= 0.0 {
        return None;
    }
    Some(Estimate {
        value: -purity.value.ln(),
        std_error: purity.std_error / purity.value,
        shots: purity.shots,
    })
}

/// Evolves the resource-preparation circuit as a density matrix with the
/// model's per-gate channels.
fn evolved_resource_state(
    kind: ResourceKind,
    l: usize,
    boundary: crate::symmetry::Boundary,
    noise: Option<&NoiseModel<f64>>,
) -> Result<MixedState<f64>> {
    let circuit: Circuit<f64> = resource_circuit(kind, l, boundary)?;
    let mut state = MixedState::from_pure(&PureState::zero_state(l)?);
    for instruction in circuit.instructions() {
        if let Instruction::Gate(g) = instruction {
            state.apply_gate(g)?;
            if let Some(nm) = noise {
                for (channel, targets) in nm.applications_for_gate(g) {
                    state.apply_kraus(&channel, &targets)?;
                }
            }
        }
    }
    Ok(state)
}

/// State-level reference for readout bias: the damping channel rotated
/// into each site's measurement frame, applied after gate noise. Only
/// the asymmetric flip model has this channel form; symmetric confusion
/// stays a readout effect and is not folded into state references.
fn apply_bias_frame(
    state: &mut MixedState<f64>,
    kind: ResourceKind,
    l: usize,
    boundary: crate::symmetry::Boundary,
    noise: Option<&NoiseModel<f64>>,
) -> Result<()> {
    if let Some(nm) = noise {
        if nm.has_readout_bias() && nm.bias_variant == BiasVariant::Asymmetric {
            for (channel, targets) in
                bias_as_state_frame_channels(kind, l, boundary, nm.readout_bias)?
            {
                state.apply_kraus(&channel, &targets)?;
            }
        }
    }
    Ok(())
}

fn unit_phase(exponent: u8) -> Complex64 {
    match exponent % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// One subsystem size of the entropy report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub l_a: usize,
    /// Sampled two-copy purity.
    pub purity: Estimate<f64>,
    /// Sampled -ln S2; absent when the purity estimate is nonpositive.
    pub neg_ln_s2: Option<Estimate<f64>>,
    /// Exact expectation of the purity estimator, noise and bias folded.
    pub oracle_purity: f64,
    pub oracle_neg_ln_s2: Option<f64>,
    /// Tr rho_A^2 of the gate-noise-evolved resource state; readout bias
    /// is a measurement effect and deliberately excluded here.
    pub state_purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub rows: Vec<EntropyRow>,
}

/// Runs the two-copy purity scan. One executed circuit serves every
/// subsystem size: all pairs are measured and the estimator consumes
/// prefixes of the pair register.
pub fn run_entropy_experiment(cfg: &ExperimentConfig) -> Result<EntropyReport> {
    require_kind(cfg, ExperimentKind::Entropy)?;
    let noise = cfg.noise_model()?;
    let circuit = swap_test_circuit::<f64>(cfg.resource, cfg.l, cfg.boundary, cfg.l)?;
    let records: Vec<ShotRecord> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|r| execute(&circuit, noise.as_ref(), cfg.shots, derive_seed(cfg.seed, r)))
        .collect::<Result<_>>()?;

    let distribution = exact_outcome_distribution(&circuit, noise.as_ref())?;
    let evolved = evolved_resource_state(cfg.resource, cfg.l, cfg.boundary, noise.as_ref())?;

    let mut rows = Vec::with_capacity(cfg.l);
    for l_a in 1..=cfg.l {
        let per_run: Vec<Estimate<f64>> = records
            .iter()
            .map(|rec| estimate_s2_from_shots(rec, l_a))
            .collect::<Result<_>>()?;
        let purity = aggregate_estimates(&per_run);
        let oracle_purity = purity_estimand(&distribution, l_a);
        let keep: Vec<usize> = (0..l_a).collect();
        let state_purity = evolved.partial_trace(&keep)?.purity();
        rows.push(EntropyRow {
            l_a,
            purity,
            neg_ln_s2: neg_ln_estimate(&purity),
            oracle_purity,
            oracle_neg_ln_s2: (oracle_purity > 0.0).then(|| -oracle_purity.ln()),
            state_purity,
        });
    }
    Ok(EntropyReport { rows })
}

/// Exact sector targets of the sampled sector estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedOracleSector {
    pub sector: i8,
    pub s1: f64,
    pub s2: f64,
}

/// One subsystem size of the resolved report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRow {
    pub estimates: ResolvedEstimates<f64>,
    pub oracle_purity: f64,
    pub oracle_parity: f64,
    /// Real and imaginary part of the weighted-purity estimand after the
    /// parity-phase rotation.
    pub oracle_weighted: [f64; 2],
    pub oracle_sectors: [ResolvedOracleSector; 2],
    /// Exact reference for the evolved state: gate channels plus the
    /// readout bias folded in as a state-frame channel.
    pub state: EntanglementReport<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedReport {
    pub rows: Vec<ResolvedRow>,
    /// Sector degeneracy across strict prefixes of the state references.
    pub degenerate: bool,
    pub max_degeneracy_gap: f64,
}

/// Runs the sector-resolved scan: plain and modified two-copy circuits
/// plus the single-copy probability circuit, combined per subsystem
/// size.
pub fn run_resolved_experiment(cfg: &ExperimentConfig) -> Result<ResolvedReport> {
    require_kind(cfg, ExperimentKind::Resolved)?;
    let noise = cfg.noise_model()?;
    let plain = swap_test_circuit::<f64>(cfg.resource, cfg.l, cfg.boundary, cfg.l)?;
    let modified = modified_swap_test_circuit::<f64>(cfg.resource, cfg.l, cfg.boundary, cfg.l)?;
    let prob = symmetry_resolved_probability_circuit::<f64>(cfg.resource, cfg.l, cfg.boundary)?;

    let triples: Vec<(ShotRecord, ShotRecord, ShotRecord)> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|r| {
            let a = execute(&plain, noise.as_ref(), cfg.shots, derive_seed(cfg.seed, 3 * r))?;
            let b = execute(
                &modified,
                noise.as_ref(),
                cfg.shots,
                derive_seed(cfg.seed, 3 * r + 1),
            )?;
            let c = execute(
                &prob,
                noise.as_ref(),
                cfg.shots,
                derive_seed(cfg.seed, 3 * r + 2),
            )?;
            Ok((a, b, c))
        })
        .collect::<Result<_>>()?;

    let plain_dist = exact_outcome_distribution(&plain, noise.as_ref())?;
    let modified_dist = exact_outcome_distribution(&modified, noise.as_ref())?;
    let prob_dist = exact_outcome_distribution(&prob, noise.as_ref())?;
    let decode = modified_pair_decode::<f64>()?;

    let mut reference = evolved_resource_state(cfg.resource, cfg.l, cfg.boundary, noise.as_ref())?;
    apply_bias_frame(&mut reference, cfg.resource, cfg.l, cfg.boundary, noise.as_ref())?;

    let mut rows = Vec::with_capacity(cfg.l);
    for l_a in 1..=cfg.l {
        let phase = prefix_parity(cfg.resource, cfg.l, cfg.boundary, l_a)?.phase();
        let per_run: Vec<ResolvedEstimates<f64>> = triples
            .iter()
            .map(|(a, b, c)| estimate_resolved_with_phase(a, b, c, l_a, phase))
            .collect::<Result<_>>()?;
        let estimates = aggregate_resolved(&per_run);

        let oracle_purity = purity_estimand(&plain_dist, l_a);
        let oracle_parity = parity_estimand(&prob_dist, l_a);
        let weighted =
            weighted_estimand(&modified_dist, l_a, &decode) * unit_phase(phase.exponent());
        let sector = |sign: f64| ResolvedOracleSector {
            sector: if sign > 0.0 { 1 } else { -1 },
            s1: 0.5 * (1.0 + sign * oracle_parity),
            s2: 0.5 * (oracle_purity + sign * weighted.re),
        };

        let keep: Vec<usize> = (0..l_a).collect();
        let reduced = reference.partial_trace(&keep)?;
        let state = oracle_report(&reduced, cfg.resource, cfg.l, cfg.boundary, l_a, 3)?;

        rows.push(ResolvedRow {
            estimates,
            oracle_purity,
            oracle_parity,
            oracle_weighted: [weighted.re, weighted.im],
            oracle_sectors: [sector(1.0), sector(-1.0)],
            state,
        });
    }

    let strict = &rows[..cfg.l - 1];
    let degenerate = strict.iter().all(|r| r.state.degenerate);
    let max_degeneracy_gap = strict
        .iter()
        .map(|r| r.state.degeneracy_gap)
        .fold(0.0, f64::max);
    Ok(ResolvedReport {
        rows,
        degenerate,
        max_degeneracy_gap,
    })
}

fn aggregate_resolved(per_run: &[ResolvedEstimates<f64>]) -> ResolvedEstimates<f64> {
    let first = &per_run[0];
    if per_run.len() == 1 {
        return first.clone();
    }
    let pick = |f: &dyn Fn(&ResolvedEstimates<f64>) -> Estimate<f64>| -> Estimate<f64> {
        let v: Vec<Estimate<f64>> = per_run.iter().map(f).collect();
        aggregate_estimates(&v)
    };
    let sector = |idx: usize| -> SectorEstimate<f64> {
        SectorEstimate {
            sector: first.sectors[idx].sector,
            s1: pick(&|e| e.sectors[idx].s1),
            s2: pick(&|e| e.sectors[idx].s2),
        }
    };
    let weighted: Vec<ComplexEstimate<f64>> = per_run.iter().map(|e| e.weighted_purity).collect();
    ResolvedEstimates {
        l_a: first.l_a,
        purity: pick(&|e| e.purity),
        parity: pick(&|e| e.parity),
        weighted_purity: aggregate_complex(&weighted),
        sectors: [sector(0), sector(1)],
    }
}

/// One input state at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFidelity {
    pub label: String,
    pub fidelity: Fidelity,
    /// Exact expectation of the sampled fidelity, noise and bias folded.
    pub oracle: f64,
    /// Ideal-protocol fidelity from exact branch enumeration; present
    /// only for noiseless runs.
    pub branch_oracle: Option<f64>,
    pub tomography: TomographyResult,
}

/// One sweep point of the teleport report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportPoint {
    pub alpha: f64,
    pub beta: f64,
    pub states: Vec<StateFidelity>,
    pub f_min: Fidelity,
    pub f_min_state: String,
    pub oracle_f_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub points: Vec<TeleportPoint>,
}

/// Runs the teleport sweep: per grid point and input state, one
/// tomography triple at `shots` per basis. `runs` is not multiplied in
/// here; the per-basis shot budget alone sets the tomography errors.
pub fn run_teleport_experiment(cfg: &ExperimentConfig) -> Result<TeleportReport> {
    require_kind(cfg, ExperimentKind::Teleport)?;
    let noise = cfg.noise_model()?;
    let grid = cfg.alpha_grid();
    let preps = crate::circuits::input_state_preps::<f64>();
    let kind = cfg.teleport.kind;
    let ideal = cfg.noise.is_none();

    let points: Vec<TeleportPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(pi, &alpha)| {
            let beta = cfg.beta_for(alpha);
            let mut states = Vec::with_capacity(preps.len());
            for (si, (label, prep, bloch)) in preps.iter().enumerate() {
                let mut records = Vec::with_capacity(3);
                let mut oracle_dot = 0.0;
                for (bi, basis) in [Letter::X, Letter::Y, Letter::Z].into_iter().enumerate() {
                    let circuit = teleport_tomography_circuit(prep, alpha, beta, kind, basis)?;
                    let index = ((pi * preps.len() + si) * 3 + bi) as u64;
                    records.push(execute(
                        &circuit,
                        noise.as_ref(),
                        cfg.shots,
                        derive_seed(cfg.seed, index),
                    )?);
                    let dist = exact_outcome_distribution(&circuit, noise.as_ref())?;
                    let r = expectation_estimand(&dist, |y| {
                        Complex64::new(frame_corrected_value(basis, y), 0.0)
                    })
                    .re;
                    let weight = match basis {
                        Letter::X => bloch[0],
                        Letter::Y => bloch[1],
                        _ => bloch[2],
                    };
                    oracle_dot += r * weight;
                }
                let t = tomography(&records[0], &records[1], &records[2])?;
                let branch_oracle = if ideal {
                    Some(branch_fidelity(prep, alpha, beta, kind)?)
                } else {
                    None
                };
                states.push(StateFidelity {
                    label: label.clone(),
                    fidelity: corrected_fidelity(&t, *bloch),
                    oracle: 0.5 * (1.0 + oracle_dot),
                    branch_oracle,
                    tomography: t,
                });
            }
            let worst = states
                .iter()
                .min_by(|a, b| {
                    a.fidelity
                        .value
                        .partial_cmp(&b.fidelity.value)
                        .expect("fidelities are finite")
                })
                .expect("six input states");
            let oracle_f_min = states.iter().map(|s| s.oracle).fold(f64::INFINITY, f64::min);
            Ok(TeleportPoint {
                alpha,
                beta,
                f_min: worst.fidelity,
                f_min_state: worst.label.clone(),
                oracle_f_min,
                states,
            })
        })
        .collect::<Result<_>>()?;
    Ok(TeleportReport { points })
}

/// Ideal-protocol fidelity by branch enumeration: the probability-
/// weighted overlap of the corrected branch outputs with the input.
fn branch_fidelity(
    prep: &[crate::state::Gate<f64>],
    alpha: f64,
    beta: f64,
    kind: crate::circuits::PerturbationKind,
) -> Result<f64> {
    let mut input = PureState::<f64>::zero_state(1)?;
    for g in prep {
        input.apply_gate(g)?;
    }
    let psi = input.amplitudes();
    let mut fidelity = 0.0;
    for (p, rho) in teleport_branches(prep, alpha, beta, kind)? {
        let mut overlap = Complex64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                overlap += psi[j].conj() * rho.entry(j, k) * psi[k];
            }
        }
        fidelity += p * overlap.re;
    }
    Ok(fidelity)
}

/// Commutator witnesses of one channel at one cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutWitness {
    pub l_a: usize,
    pub preserving: bool,
    pub witness: f64,
    pub per_op: Vec<f64>,
}

/// Classification of one configured gate-class channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelClassification {
    pub gate_class: String,
    pub kind: crate::harness::config::ChannelKind,
    pub p: f64,
    pub preserving: bool,
    pub max_witness: f64,
    pub cuts: Vec<CutWitness>,
}

/// Sampled and predicted sector gap at one cut under readout bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasGapRow {
    pub l_a: usize,
    /// Sampled subsystem-parity expectation; its magnitude is the gap
    /// between the sector weights.
    pub sampled: Estimate<f64>,
    /// Exact expectation of the same estimator under the biased
    /// distribution.
    pub estimand: f64,
    pub predictions: BiasPredictions<f64>,
}

/// Classification of the configured readout bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasClassification {
    pub eps: f64,
    pub variant: BiasVariant,
    pub preserving: bool,
    pub max_witness: f64,
    pub cuts: Vec<CutWitness>,
    pub gaps: Vec<BiasGapRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tolerance: f64,
    pub channels: Vec<ChannelClassification>,
    pub bias: Option<BiasClassification>,
}

/// Classifies the configured noise model against the edge symmetries of
/// the clean resource state: per-gate-class channels applied per site,
/// readout bias as a state-frame channel, both checked at every strict
/// prefix cut. The bias verdict is backed by sampled sector gaps.
pub fn run_classification(cfg: &ExperimentConfig) -> Result<ClassificationReport> {
    require_kind(cfg, ExperimentKind::ClassifyNoise)?;
    if cfg.resource != ResourceKind::Cluster {
        return Err(Error::Config(
            "noise classification is defined against the cluster resource".into(),
        ));
    }
    let noise = cfg.noise_model()?;
    let tol = default_commutator_tol::<f64>();
    let clean = evolved_resource_state(cfg.resource, cfg.l, cfg.boundary, None)?;

    let classify_at_cuts = |applications: &[crate::symmetry::ChannelApplication<f64>]| -> Result<Vec<CutWitness>> {
        let mut cuts = Vec::with_capacity(cfg.l - 1);
        for l_a in 1..cfg.l {
            let ctx = SymmetryContext {
                state: &clean,
                subsystem: (0..l_a).collect(),
                preserved_ops: edge_symmetry_ops(cfg.boundary, l_a)?,
                tol,
            };
            let c = classify_channel(applications, &ctx)?;
            cuts.push(CutWitness {
                l_a,
                preserving: c.preserving,
                witness: c.witness,
                per_op: c.per_op,
            });
        }
        Ok(cuts)
    };

    let noise_cfg = cfg.noise.as_ref();
    let mut channels = Vec::new();
    for (gate_class, channel_cfg) in [
        ("one-qubit", noise_cfg.and_then(|n| n.one_qubit)),
        ("two-qubit", noise_cfg.and_then(|n| n.two_qubit)),
    ] {
        let Some(cc) = channel_cfg else { continue };
        let channel = cc.build()?;
        let applications: Vec<_> = (0..cfg.l).map(|q| (channel.clone(), vec![q])).collect();
        let cuts = classify_at_cuts(&applications)?;
        channels.push(ChannelClassification {
            gate_class: gate_class.into(),
            kind: cc.kind,
            p: cc.p,
            preserving: cuts.iter().all(|c| c.preserving),
            max_witness: cuts.iter().map(|c| c.witness).fold(0.0, f64::max),
            cuts,
        });
    }

    let bias = match noise.as_ref() {
        Some(nm) if nm.has_readout_bias() => {
            if nm.bias_variant != BiasVariant::Asymmetric {
                return Err(Error::Config(
                    "bias classification models the asymmetric flip; the symmetric \
                     variant has no state-frame channel or gap prediction"
                        .into(),
                ));
            }
            let eps = nm.readout_bias;
            let applications =
                bias_as_state_frame_channels(cfg.resource, cfg.l, cfg.boundary, eps)?;
            let cuts = classify_at_cuts(&applications)?;

            let bias_only = NoiseModel::new(None, None, eps, nm.bias_variant)?;
            let prob =
                symmetry_resolved_probability_circuit::<f64>(cfg.resource, cfg.l, cfg.boundary)?;
            let records: Vec<ShotRecord> = (0..cfg.runs as u64)
                .into_par_iter()
                .map(|r| execute(&prob, Some(&bias_only), cfg.shots, derive_seed(cfg.seed, r)))
                .collect::<Result<_>>()?;
            let dist = exact_outcome_distribution(&prob, Some(&bias_only))?;

            let mut gaps = Vec::with_capacity(cfg.l - 1);
            for l_a in 1..cfg.l {
                let per_run: Vec<Estimate<f64>> = records
                    .iter()
                    .map(|rec| estimate_parity_from_shots(rec, l_a))
                    .collect::<Result<_>>()?;
                gaps.push(BiasGapRow {
                    l_a,
                    sampled: aggregate_estimates(&per_run),
                    estimand: parity_estimand(&dist, l_a),
                    predictions: bias_model_predictions(eps, l_a)?,
                });
            }
            Some(BiasClassification {
                eps,
                variant: nm.bias_variant,
                preserving: cuts.iter().all(|c| c.preserving),
                max_witness: cuts.iter().map(|c| c.witness).fold(0.0, f64::max),
                cuts,
                gaps,
            })
        }
        _ => None,
    };

    Ok(ClassificationReport {
        tolerance: tol,
        channels,
        bias,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub rows: Vec<EntanglementReport<f64>>,
}

/// Exact reference data per subsystem size: spectrum, Renyi entropies
/// and resolved moments of the evolved resource state (gate channels
/// plus bias as a state-frame channel).
pub fn run_oracle_experiment(cfg: &ExperimentConfig) -> Result<OracleReport> {
    require_kind(cfg, ExperimentKind::Oracle)?;
    let noise = cfg.noise_model()?;
    let mut reference = evolved_resource_state(cfg.resource, cfg.l, cfg.boundary, noise.as_ref())?;
    apply_bias_frame(&mut reference, cfg.resource, cfg.l, cfg.boundary, noise.as_ref())?;
    let mut rows = Vec::with_capacity(cfg.l);
    for l_a in 1..=cfg.l {
        let keep: Vec<usize> = (0..l_a).collect();
        let reduced = reference.partial_trace(&keep)?;
        rows.push(oracle_report(
            &reduced,
            cfg.resource,
            cfg.l,
            cfg.boundary,
            l_a,
            3,
        )?);
    }
    Ok(OracleReport { rows })
}
