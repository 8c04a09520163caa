//! The Clifford-augmented state `|ψ⟩ = C|ψ_T⟩` with gate routing and the
//! exact and heuristic entanglement coolers.
//!
//! Conventions: a physical Clifford `G` updates the frame as `C ← G·C`; a
//! rotation about `P₀` is pulled back to `P = C† P₀ C` and acts on the MPS; a
//! cooling unitary `U` applied to the MPS is compensated by `C ← C·U†`.

mod heuristic;
mod policy;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::clifford::{cascade_circuit, tableau_to_unitary, CliffordGate, CliffordTableau, Direction, SiteStabilizer, Side};
use crate::dense::{self, CMatrix, CVector};
use crate::error::{CtnError, Result};
use crate::gateclasses::entangling_classes;
use crate::mps::{Mps, TruncationPolicy};
use crate::pauli::{Pauli, PauliString};

pub use heuristic::{HeuristicTable, IMPROVEMENT_TOL};
pub use policy::{CoolingPolicy, HeuristicParams};

/// Largest register for which [`CtnState::to_statevector`] is available.
pub const STATEVECTOR_LIMIT: usize = 12;

impl HeuristicTable {
    /// Table for all entangling classes of `k` qubits, built once per process.
    pub fn shared(k: usize) -> Result<Arc<HeuristicTable>> {
        static TWO: OnceLock<Arc<HeuristicTable>> = OnceLock::new();
        static THREE: OnceLock<Arc<HeuristicTable>> = OnceLock::new();
        let cell = match k {
            2 => &TWO,
            3 => &THREE,
            _ => return Err(CtnError::InvalidArgument(format!("heuristic windows have k = 2 or 3, got {k}"))),
        };
        if let Some(t) = cell.get() {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(HeuristicTable::new(&entangling_classes(k)?)?);
        Ok(Arc::clone(cell.get_or_init(|| table)))
    }
}

/// A cooling policy together with the candidate table it needs.
#[derive(Clone, Debug)]
pub struct Cooler {
    policy: CoolingPolicy,
    table: Option<Arc<HeuristicTable>>,
}

impl Cooler {
    pub fn none() -> Self {
        Cooler { policy: CoolingPolicy::NONE, table: None }
    }

    /// Loads the shared class table when the policy asks for heuristic cooling.
    pub fn new(policy: CoolingPolicy) -> Result<Self> {
        let table = policy.heuristic.map(|h| HeuristicTable::shared(h.k)).transpose()?;
        Ok(Cooler { policy, table })
    }

    pub fn with_table(policy: CoolingPolicy, table: Arc<HeuristicTable>) -> Result<Self> {
        match policy.heuristic {
            Some(h) if h.k != table.k() => Err(CtnError::Dimension { expected: h.k, found: table.k() }),
            Some(_) => Ok(Cooler { policy, table: Some(table) }),
            None => Ok(Cooler { policy, table: None }),
        }
    }

    pub fn policy(&self) -> CoolingPolicy {
        self.policy
    }
}

/// Running totals over the lifetime of a state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtnStats {
    pub clifford_gates: usize,
    pub rotations: usize,
    pub exact_attempts: usize,
    pub exact_successes: usize,
    pub heuristic_sweeps: usize,
    pub heuristic_gates: usize,
}

/// Outcome of a rotation or cooling call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingReport {
    pub method: CoolingPolicy,
    pub entropies_before: Vec<f64>,
    pub entropies_after: Vec<f64>,
    pub gates_applied: usize,
    /// Whether the exact cooler absorbed the rotation (always false when it did not run).
    pub succeeded: bool,
}

impl CoolingReport {
    pub fn max_before(&self) -> f64 {
        self.entropies_before.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_after(&self) -> f64 {
        self.entropies_after.iter().copied().fold(0.0, f64::max)
    }
}

/// An operation applied to the MPS factor, in application order.
#[derive(Clone, Debug, PartialEq)]
pub enum MpsOp {
    /// `exp(-i angle P)`.
    Rotation { angle: f64, pauli: PauliString },
    /// A dense unitary on sites `start..start+k`.
    Local { start: usize, unitary: CMatrix },
}

impl MpsOp {
    pub fn apply(&self, mps: &mut Mps) -> Result<()> {
        match self {
            MpsOp::Rotation { angle, pauli } => mps.apply_pauli_rotation(*angle, pauli),
            MpsOp::Local { start, unitary } => mps.apply_local_unitary(unitary, *start),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CtnState {
    frame: CliffordTableau,
    mps: Mps,
    policy: TruncationPolicy,
    stats: CtnStats,
    log: Option<Vec<MpsOp>>,
}

impl CtnState {
    /// `C = I`, `|ψ_T⟩ = |0…0⟩`.
    pub fn new(n: usize, policy: TruncationPolicy) -> Result<Self> {
        if n < 2 {
            return Err(CtnError::InvalidArgument(format!("a CTN state needs at least 2 qubits, got {n}")));
        }
        let mut mps = Mps::zero_state(n)?;
        mps.set_policy(policy);
        Ok(CtnState { frame: CliffordTableau::identity(n), mps, policy, stats: CtnStats::default(), log: None })
    }

    pub fn from_parts(frame: CliffordTableau, mut mps: Mps, policy: TruncationPolicy) -> Result<Self> {
        if frame.n() != mps.n() {
            return Err(CtnError::Dimension { expected: mps.n(), found: frame.n() });
        }
        mps.set_policy(policy);
        Ok(CtnState { frame, mps, policy, stats: CtnStats::default(), log: None })
    }

    pub fn n(&self) -> usize {
        self.mps.n()
    }

    pub fn frame(&self) -> &CliffordTableau {
        &self.frame
    }

    pub fn mps(&self) -> &Mps {
        &self.mps
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn stats(&self) -> &CtnStats {
        &self.stats
    }

    /// Starts recording every operation applied to the MPS factor. Replaying
    /// the log on `|0…0⟩` under another truncation policy reproduces the same
    /// gauge choices, so the two MPS factors share one Clifford frame.
    pub fn record_mps_ops(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn mps_ops(&self) -> Option<&[MpsOp]> {
        self.log.as_deref()
    }

    fn run_mps_op(&mut self, op: MpsOp) -> Result<()> {
        op.apply(&mut self.mps)?;
        if let Some(log) = &mut self.log {
            log.push(op);
        }
        Ok(())
    }

    /// Physical gate: `C ← G·C`.
    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n())?;
        self.frame.apply_gate(gate)?;
        self.stats.clifford_gates += 1;
        Ok(())
    }

    /// Physical Clifford on all qubits: `C ← G·C`.
    pub fn apply_clifford(&mut self, g: &CliffordTableau) -> Result<()> {
        self.frame = self.frame.compose(g, Side::Left)?;
        self.stats.clifford_gates += 1;
        Ok(())
    }

    /// `exp(-iθ/2 · axis_site)`, followed by the cooler.
    pub fn apply_rotation(&mut self, theta: f64, axis: Pauli, site: usize, cooler: &Cooler) -> Result<CoolingReport> {
        if axis.is_identity() {
            return Err(CtnError::InvalidArgument("rotation axis must be X, Y or Z".into()));
        }
        if site >= self.n() {
            return Err(CtnError::SiteOutOfRange { site, n: self.n() });
        }
        self.apply_pauli_rotation(theta, &PauliString::single(self.n(), site, axis), cooler)
    }

    /// `exp(-iθ/2 · P₀)` for a Hermitian Pauli string `P₀`, followed by the cooler.
    ///
    /// With exact cooling enabled the rotation is first offered to
    /// [`CtnState::cool_exact`]; if that fails it is applied to the MPS as an
    /// MPO and the heuristic cooler (if any) runs afterwards.
    pub fn apply_pauli_rotation(&mut self, theta: f64, p0: &PauliString, cooler: &Cooler) -> Result<CoolingReport> {
        if p0.n() != self.n() {
            return Err(CtnError::Dimension { expected: self.n(), found: p0.n() });
        }
        if !p0.is_hermitian() {
            return Err(CtnError::InvalidArgument(format!("rotation generator {p0} is not Hermitian")));
        }
        let before = self.mps.entropies();
        self.stats.rotations += 1;
        let mut report = CoolingReport {
            method: cooler.policy,
            entropies_before: before.clone(),
            entropies_after: before,
            gates_applied: 0,
            succeeded: false,
        };
        if p0.is_identity_up_to_phase() {
            return Ok(report);
        }
        let p = self.frame.conjugate(p0, Direction::Backward)?;
        if cooler.policy.exact {
            let exact = self.cool_exact(theta, &p)?;
            if exact.succeeded {
                report.succeeded = true;
                report.gates_applied = exact.gates_applied;
                report.entropies_after = exact.entropies_after;
                return Ok(report);
            }
        }
        self.run_mps_op(MpsOp::Rotation { angle: theta / 2.0, pauli: p })?;
        if let (Some(h), Some(table)) = (cooler.policy.heuristic, cooler.table.as_deref()) {
            report.gates_applied += self.cool_heuristic(table, h.depth)?.gates_applied;
        }
        report.entropies_after = self.mps.entropies();
        Ok(report)
    }

    /// Sites whose MPS factor is a separable single-qubit stabilizer state.
    pub fn stabilizer_sites(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mps.detect_separable_stabilizer(i).is_some()).collect()
    }

    /// Absorbs `exp(-iθ/2 · P)` (with `P` already pulled back through the
    /// frame) using a separable stabilizer site hit non-trivially by `P`.
    ///
    /// The lowest such site `i` receives the local rotation `exp(-iθ/2 · ±P_i)`
    /// and the controlled-Pauli cascade that spreads it to the rest of `P` is
    /// absorbed into the frame. Without such a site the state is untouched.
    pub fn cool_exact(&mut self, theta: f64, p: &PauliString) -> Result<CoolingReport> {
        if p.n() != self.n() {
            return Err(CtnError::Dimension { expected: self.n(), found: p.n() });
        }
        if !p.is_hermitian() {
            return Err(CtnError::InvalidArgument(format!("rotation generator {p} is not Hermitian")));
        }
        self.stats.exact_attempts += 1;
        let before = self.mps.entropies();
        let mut report = CoolingReport {
            method: CoolingPolicy::EXACT,
            entropies_before: before.clone(),
            entropies_after: before,
            gates_applied: 0,
            succeeded: false,
        };
        let found = (0..self.n()).find_map(|i| {
            let letter = p.letter(i);
            let (basis, eigenvalue) = self.mps.detect_separable_stabilizer(i)?;
            (!letter.is_identity() && !letter.commutes_with(basis)).then_some((i, letter, SiteStabilizer::new(basis, eigenvalue)))
        });
        let Some((control, letter, stabilizer)) = found else {
            return Ok(report);
        };
        let targets: Vec<(usize, Pauli)> =
            (0..self.n()).filter(|&j| j != control && !p.letter(j).is_identity()).map(|j| (j, p.letter(j))).collect();
        let gates = cascade_circuit(control, stabilizer, &targets, letter)?;

        let local = PauliString::single(1, 0, letter);
        let angle = f64::from(p.sign()) * theta / 2.0;
        self.run_mps_op(MpsOp::Local { start: control, unitary: dense::pauli_exponential(&local, angle) })?;
        for g in gates.iter().rev() {
            self.frame.apply_gate_right(g)?;
        }
        self.stats.exact_successes += 1;
        report.succeeded = true;
        report.gates_applied = gates.len();
        report.entropies_after = self.mps.entropies();
        Ok(report)
    }

    /// Runs up to `depth` alternating sweeps of `k`-site windows, applying the
    /// best class representative in each window to the MPS and its inverse to
    /// the frame. Stops early after a sweep without changes.
    pub fn cool_heuristic(&mut self, table: &HeuristicTable, depth: usize) -> Result<CoolingReport> {
        let k = table.k();
        if depth == 0 {
            return Err(CtnError::InvalidArgument("heuristic depth must be at least 1".into()));
        }
        if self.n() < k {
            return Err(CtnError::InvalidArgument(format!("window of {k} sites does not fit {} qubits", self.n())));
        }
        let before = self.mps.entropies();
        let mut gates = 0;
        let windows = self.n() - k + 1;
        for sweep in 0..depth {
            self.stats.heuristic_sweeps += 1;
            let mut changed = false;
            for w in 0..windows {
                let start = if sweep % 2 == 0 { w } else { windows - 1 - w };
                let (dl, dr, data) = self.mps.window(start, k);
                let (choice, _) = table.choose(dl, dr, &data);
                let Some(index) = choice else { continue };
                let tableau = table.tableau(index);
                let u = tableau_to_unitary(tableau)?;
                self.run_mps_op(MpsOp::Local { start, unitary: u })?;
                let sites: Vec<usize> = (start..start + k).collect();
                self.frame.apply_local_right(&tableau.inverse(), &sites)?;
                gates += 1;
                changed = true;
            }
            if !changed {
                break;
            }
        }
        self.stats.heuristic_gates += gates;
        Ok(CoolingReport {
            method: CoolingPolicy { exact: false, heuristic: Some(HeuristicParams { k, depth }) },
            entropies_before: before,
            entropies_after: self.mps.entropies(),
            gates_applied: gates,
            succeeded: false,
        })
    }

    /// Per-cut entanglement entropies (bits) of the MPS factor.
    pub fn entropies(&self) -> Vec<f64> {
        self.mps.entropies()
    }

    pub fn max_entropy(&self) -> f64 {
        self.mps.max_entropy()
    }

    /// Physical state `C|ψ_T⟩` (`n <= 12`).
    pub fn to_statevector(&self) -> Result<CVector> {
        if self.n() > STATEVECTOR_LIMIT {
            return Err(CtnError::TooLarge { n: self.n(), limit: STATEVECTOR_LIMIT });
        }
        self.frame.apply_to_statevector(&self.mps.to_statevector()?)
    }
}

#[cfg(test)]
mod tests;
