//! Doped-circuit ensembles: random global Cliffords interleaved with single
//! non-Clifford rotations, simulated as CTN states with configurable cooling.
//!
//! Every realization draws from its own ChaCha stream `(seed, realization)`,
//! and coolers never consume randomness, so runs that differ only in cooling
//! see identical circuits.

mod output;
mod stats;

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Operation};
use crate::clifford::random_clifford;
use crate::ctn::{Cooler, CoolingPolicy, CoolingReport, CtnState, HeuristicParams};
use crate::error::{CtnError, Result};
use crate::mps::{Mps, TruncationPolicy};
use crate::pauli::Pauli;

pub use output::{emit_csv, emit_fidelity_csv, read_csv, write_csv, CSV_HEADER};
pub use stats::{
    growth_rate, growth_rates_per_realization, linear_fit, max_standardized_difference, mean_and_stderr, page_bound, summarize,
    LinearFit, StepSummary,
};

/// Rotation angle of a T gate in the `exp(-iθZ/2)` convention.
pub const T_ANGLE: f64 = FRAC_PI_4;

/// Largest register for which [`fidelity_scan`] builds an exact reference.
pub const FIDELITY_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DopedT,
    CompareK,
    DepthScan,
    AngleScan,
    FidelityScan,
    VerifyTheorem,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub t_max: usize,
    /// Rotation angles for angle scans; doped-T runs always use [`T_ANGLE`].
    pub thetas: Vec<f64>,
    pub realizations: usize,
    pub cooling: CoolingPolicy,
    pub chi_max: usize,
    pub cutoff: f64,
    pub seed: u64,
    /// Record wall-clock time per step. Off by default so that output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Defaults: `t_max = 3n`, one realization, exact plus `k=2,d=2`
    /// heuristic cooling, `chi_max = 256`, `cutoff = 1e-12`.
    pub fn new(kind: ExperimentKind, n: usize) -> Self {
        ExperimentConfig {
            kind,
            n,
            t_max: 3 * n,
            thetas: vec![T_ANGLE],
            realizations: 1,
            cooling: CoolingPolicy { exact: true, heuristic: Some(HeuristicParams::default()) },
            chi_max: 256,
            cutoff: 1e-12,
            seed: 0,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(CtnError::InvalidArgument(format!("n must be at least 2, got {}", self.n)));
        }
        if self.realizations == 0 {
            return Err(CtnError::InvalidArgument("realizations must be at least 1".into()));
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(CtnError::InvalidArgument("need at least one finite rotation angle".into()));
        }
        if let Some(h) = self.cooling.heuristic {
            HeuristicParams::new(h.k, h.depth)?;
            if h.k > self.n {
                return Err(CtnError::InvalidArgument(format!("window k={} exceeds n={}", h.k, self.n)));
            }
        }
        self.truncation().map(|_| ())
    }

    pub fn truncation(&self) -> Result<TruncationPolicy> {
        TruncationPolicy::new(self.chi_max, self.cutoff)
    }
}

/// One row per non-Clifford rotation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub step: usize,
    pub t_count: usize,
    pub theta: f64,
    pub max_entropy: f64,
    pub mean_entropy: f64,
    pub max_chi: usize,
    pub method: String,
    pub exact_ok: bool,
    pub wall_ms: f64,
    pub realization: usize,
    pub n: usize,
    pub t_over_n: f64,
    /// `max_entropy / (n/2)`.
    pub s_norm: f64,
    #[serde(skip)]
    pub entropies: Vec<f64>,
}

impl TrajectoryRecord {
    fn new(seed: u64, realization: usize, step: usize, t_count: usize, theta: f64, state: &CtnState, report: &CoolingReport) -> Self {
        let n = state.n();
        let entropies = report.entropies_after.clone();
        let max_entropy = entropies.iter().copied().fold(0.0, f64::max);
        let mean_entropy = if entropies.is_empty() { 0.0 } else { entropies.iter().sum::<f64>() / entropies.len() as f64 };
        TrajectoryRecord {
            seed,
            step,
            t_count,
            theta,
            max_entropy,
            mean_entropy,
            max_chi: state.mps().max_bond_dim(),
            method: report.method.to_string(),
            exact_ok: report.succeeded,
            wall_ms: 0.0,
            realization,
            n,
            t_over_n: t_count as f64 / n as f64,
            s_norm: max_entropy / (n as f64 / 2.0),
            entropies,
        }
    }
}

/// Per-realization random stream derived from the master seed.
pub fn realization_rng(seed: u64, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization as u64);
    rng
}

/// One doped trajectory: `t_max` times a random global Clifford followed by
/// `exp(-iθZ/2)` on a random site, cooled after every rotation.
pub fn run_realization(cfg: &ExperimentConfig, theta: f64, cooler: &Cooler, realization: usize, record_ops: bool) -> Result<(Vec<TrajectoryRecord>, CtnState)> {
    let mut rng = realization_rng(cfg.seed, realization);
    let mut state = CtnState::new(cfg.n, cfg.truncation()?)?;
    if record_ops {
        state.record_mps_ops();
    }
    let mut records = Vec::with_capacity(cfg.t_max);
    for t in 1..=cfg.t_max {
        let start = Instant::now();
        state.apply_clifford(&random_clifford(cfg.n, &mut rng))?;
        let site = rng.gen_range(0..cfg.n);
        let report = state.apply_rotation(theta, Pauli::Z, site, cooler)?;
        let mut rec = TrajectoryRecord::new(cfg.seed, realization, t - 1, t, theta, &state, &report);
        if cfg.timing {
            rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        }
        records.push(rec);
    }
    Ok((records, state))
}

/// All realizations at one angle with one cooler, in realization order.
pub fn run_ensemble(cfg: &ExperimentConfig, theta: f64, cooler: &Cooler) -> Result<Vec<TrajectoryRecord>> {
    cfg.validate()?;
    let runs: Vec<Vec<TrajectoryRecord>> =
        (0..cfg.realizations).into_par_iter().map(|r| run_realization(cfg, theta, cooler, r, false).map(|(rec, _)| rec)).collect::<Result<_>>()?;
    Ok(runs.into_iter().flatten().collect())
}

/// Doped-T ensemble (T gates) or angle scan (every angle in `cfg.thetas`).
pub fn run_doped_circuit(cfg: &ExperimentConfig) -> Result<Vec<TrajectoryRecord>> {
    let thetas = match cfg.kind {
        ExperimentKind::DopedT => vec![T_ANGLE],
        ExperimentKind::AngleScan => cfg.thetas.clone(),
        other => return Err(CtnError::InvalidArgument(format!("run_doped_circuit does not handle {other:?}"))),
    };
    let cooler = Cooler::new(cfg.cooling)?;
    let mut out = Vec::new();
    for theta in thetas {
        out.extend(run_ensemble(cfg, theta, &cooler)?);
    }
    Ok(out)
}

/// Matched-seed ensembles that differ only in the cooling policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolerComparison {
    pub policies: Vec<CoolingPolicy>,
    pub summaries: Vec<Vec<StepSummary>>,
    #[serde(skip)]
    pub records: Vec<TrajectoryRecord>,
}

impl CoolerComparison {
    /// Largest standardized per-step difference between policies `a` and `b`.
    pub fn max_z(&self, a: usize, b: usize) -> f64 {
        max_standardized_difference(&self.summaries[a], &self.summaries[b])
    }
}

pub fn compare_coolers(cfg: &ExperimentConfig, policies: &[CoolingPolicy]) -> Result<CoolerComparison> {
    if policies.len() < 2 {
        return Err(CtnError::InvalidArgument("a comparison needs at least two policies".into()));
    }
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &policy in policies {
        let run_cfg = ExperimentConfig { cooling: policy, ..cfg.clone() };
        let recs = run_ensemble(&run_cfg, T_ANGLE, &Cooler::new(policy)?)?;
        summaries.push(summarize(&recs));
        records.extend(recs);
    }
    Ok(CoolerComparison { policies: policies.to_vec(), summaries, records })
}

/// `heuristic:k=2,d` versus `heuristic:k=3,d`, keeping the exact flag of `base`.
pub fn compare_k_policies(base: CoolingPolicy, depth: usize) -> Result<Vec<CoolingPolicy>> {
    [2, 3].iter().map(|&k| Ok(CoolingPolicy { exact: base.exact, heuristic: Some(HeuristicParams::new(k, depth)?) })).collect()
}

/// One policy per sweep depth with window size `k`.
pub fn depth_policies(base: CoolingPolicy, k: usize, depths: &[usize]) -> Result<Vec<CoolingPolicy>> {
    depths.iter().map(|&d| Ok(CoolingPolicy { exact: base.exact, heuristic: Some(HeuristicParams::new(k, d)?) })).collect()
}

/// Growth rate per angle with its ensemble error, and the line through them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleFit {
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub fit: LinearFit,
}

/// Fits `α(θ)` from angle-scan records.
pub fn fit_angle_growth(records: &[TrajectoryRecord], n: usize) -> Result<AngleFit> {
    let mut thetas: Vec<f64> = records.iter().map(|r| r.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let mut alphas = Vec::new();
    let mut stderrs = Vec::new();
    for &theta in &thetas {
        let subset: Vec<TrajectoryRecord> = records.iter().filter(|r| r.theta == theta).cloned().collect();
        alphas.push(growth_rate(&subset, n)?);
        stderrs.push(mean_and_stderr(&growth_rates_per_realization(&subset, n)?).1);
    }
    let fit = linear_fit(&thetas, &alphas, Some(&stderrs))?;
    Ok(AngleFit { thetas, alphas, stderrs, fit })
}

/// Fidelity of a truncated run against the exact reference.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub seed: u64,
    pub realization: usize,
    pub n: usize,
    pub t_count: usize,
    pub chi: usize,
    pub inv_chi: f64,
    pub fidelity: f64,
    pub discarded_weight: f64,
}

/// For each realization, runs an exact reference (`chi = 2^⌊n/2⌋`, cutoff
/// `0`) for `t_max` rotations while logging every MPS operation, then replays
/// the log under each `chi` in `chis`. Replaying keeps the Clifford frames
/// identical, so `F = |⟨ψ_ref|ψ_χ⟩|²` is an MPS overlap.
pub fn fidelity_scan(cfg: &ExperimentConfig, chis: &[usize]) -> Result<Vec<FidelityRecord>> {
    cfg.validate()?;
    if cfg.n > FIDELITY_LIMIT {
        return Err(CtnError::TooLarge { n: cfg.n, limit: FIDELITY_LIMIT });
    }
    if chis.is_empty() || chis.contains(&0) {
        return Err(CtnError::InvalidArgument("chi values must be positive".into()));
    }
    let full = 1usize << (cfg.n / 2);
    let ref_cfg = ExperimentConfig { chi_max: full, cutoff: 0.0, ..cfg.clone() };
    let cooler = Cooler::new(cfg.cooling)?;
    let runs: Vec<Vec<FidelityRecord>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| -> Result<Vec<FidelityRecord>> {
            let (_, reference) = run_realization(&ref_cfg, T_ANGLE, &cooler, r, true)?;
            let ops = reference.mps_ops().expect("recording enabled");
            chis.iter()
                .map(|&chi| {
                    let mut mps = Mps::zero_state(cfg.n)?;
                    mps.set_policy(TruncationPolicy::new(chi, 0.0)?);
                    for op in ops {
                        op.apply(&mut mps)?;
                    }
                    Ok(FidelityRecord {
                        seed: cfg.seed,
                        realization: r,
                        n: cfg.n,
                        t_count: cfg.t_max,
                        chi,
                        inv_chi: 1.0 / chi as f64,
                        fidelity: mps.fidelity(reference.mps())?,
                        discarded_weight: mps.total_discarded_weight(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(runs.into_iter().flatten().collect())
}

/// Runs a JSON circuit, drawing `RANDOM_CLIFFORD` layers from `seed`.
/// Returns one record per rotation and the final state.
pub fn run_circuit(circuit: &Circuit, cooler: &Cooler, truncation: TruncationPolicy, seed: u64) -> Result<(Vec<TrajectoryRecord>, CtnState)> {
    let mut rng = realization_rng(seed, 0);
    let mut state = CtnState::new(circuit.n, truncation)?;
    let mut records = Vec::new();
    for (step, op) in circuit.ops.iter().enumerate() {
        match op {
            Operation::Clifford(g) => state.apply_gate(g)?,
            Operation::RandomClifford => state.apply_clifford(&random_clifford(circuit.n, &mut rng))?,
            Operation::Rotation { pauli, theta } => {
                let report = state.apply_pauli_rotation(*theta, pauli, cooler)?;
                records.push(TrajectoryRecord::new(seed, 0, step, records.len() + 1, *theta, &state, &report));
            }
        }
    }
    Ok((records, state))
}
