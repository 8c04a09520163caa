//! Controlled-Pauli cascades that turn a single-site rotation into a
//! rotation about a multi-site Pauli string.

use serde::{Deserialize, Serialize};

use super::{CliffordGate, GateKind};
use crate::error::{CtnError, Result};
use crate::pauli::Pauli;

/// A single-site stabilizer `eigenvalue · basis` of the control qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteStabilizer {
    pub basis: Pauli,
    pub eigenvalue: i8,
}

impl SiteStabilizer {
    pub fn new(basis: Pauli, eigenvalue: i8) -> Self {
        SiteStabilizer { basis, eigenvalue }
    }

    /// `H (s B) H` as a signed letter.
    fn hadamard_conjugate(self) -> SiteStabilizer {
        match self.basis {
            Pauli::X => SiteStabilizer::new(Pauli::Z, self.eigenvalue),
            Pauli::Z => SiteStabilizer::new(Pauli::X, self.eigenvalue),
            Pauli::Y => SiteStabilizer::new(Pauli::Y, -self.eigenvalue),
            Pauli::I => self,
        }
    }
}

/// Gate list (application order) for
/// `K = Π+(s B) ⊗ I + Π-(s B) ⊗ R`, `R = ⊗ targets`.
///
/// On states whose control qubit is stabilized by `s B`, `K` acts
/// trivially and `K P_c = P_c R`, so `K (α I + β P_c) = (α I + β P_c R)` there.
/// When the rotation letter is `Z` the cascade is wrapped in Hadamards on the
/// control so that the controlled gates use an `X`/`Y` basis internally.
pub fn cascade_circuit(
    control: usize,
    stabilizer: SiteStabilizer,
    targets: &[(usize, Pauli)],
    rotation_letter: Pauli,
) -> Result<Vec<CliffordGate>> {
    if stabilizer.basis.is_identity() || stabilizer.eigenvalue.abs() != 1 {
        return Err(CtnError::InvalidArgument("control stabilizer must be ±X, ±Y or ±Z".into()));
    }
    if rotation_letter.is_identity() || rotation_letter.commutes_with(stabilizer.basis) {
        return Err(CtnError::InvalidArgument(format!(
            "rotation letter {rotation_letter} must anticommute with control basis {}",
            stabilizer.basis
        )));
    }
    for (i, &(site, letter)) in targets.iter().enumerate() {
        if site == control {
            return Err(CtnError::InvalidArgument(format!("control {control} listed as a target")));
        }
        if letter.is_identity() {
            return Err(CtnError::InvalidArgument(format!("identity target letter on site {site}")));
        }
        if targets[..i].iter().any(|&(s, _)| s == site) {
            return Err(CtnError::InvalidArgument(format!("site {site} listed twice")));
        }
    }
    if targets.is_empty() {
        return Ok(Vec::new());
    }

    let wrap = rotation_letter == Pauli::Z;
    let inner = if wrap { stabilizer.hadamard_conjugate() } else { stabilizer };
    let mut gates = Vec::with_capacity(2 * targets.len() + 2);
    if wrap {
        gates.push(CliffordGate::new(GateKind::H, vec![control]));
    }
    for &(site, letter) in targets {
        gates.push(CliffordGate::new(GateKind::CP { pauli: letter, basis: inner.basis }, vec![control, site]));
    }
    if inner.eigenvalue < 0 {
        for &(site, letter) in targets {
            let kind = match letter {
                Pauli::X => GateKind::X,
                Pauli::Y => GateKind::Y,
                _ => GateKind::Z,
            };
            gates.push(CliffordGate::new(kind, vec![site]));
        }
    }
    if wrap {
        gates.push(CliffordGate::new(GateKind::H, vec![control]));
    }
    Ok(gates)
}
