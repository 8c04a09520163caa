use serde::{Deserialize, Serialize};

use super::CliffordTableau;
use crate::dense::{self, c, CMatrix};
use crate::error::{CtnError, Result};
use crate::pauli::{Pauli, PauliString};

/// Elementary Clifford gates.
///
/// `CP { pauli: Q, basis: B }` is the Pauli-controlled Pauli
/// `Π+(B) ⊗ I + Π-(B) ⊗ Q`: it applies `Q` to the target when the control
/// sits in the `-1` eigenspace of `B`. `CP { X, Z }` is the ordinary CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CX,
    CZ,
    SWAP,
    CP { pauli: Pauli, basis: Pauli },
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::SWAP | GateKind::CP { .. } => 2,
            _ => 1,
        }
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            other => other,
        }
    }

    pub fn local_tableau(self) -> CliffordTableau {
        let p = |s: &str| -> PauliString { s.parse().expect("static pauli literal") };
        let t = |x: &[&str], z: &[&str]| {
            CliffordTableau::from_images_unchecked(x.iter().map(|s| p(s)).collect(), z.iter().map(|s| p(s)).collect())
        };
        match self {
            GateKind::H => t(&["Z"], &["X"]),
            GateKind::S => t(&["Y"], &["Z"]),
            GateKind::Sdg => t(&["-Y"], &["Z"]),
            GateKind::X => t(&["X"], &["-Z"]),
            GateKind::Y => t(&["-X"], &["-Z"]),
            GateKind::Z => t(&["-X"], &["Z"]),
            GateKind::CX => t(&["XX", "IX"], &["ZI", "ZZ"]),
            GateKind::CZ => t(&["XZ", "ZX"], &["ZI", "IZ"]),
            GateKind::SWAP => t(&["IX", "XI"], &["IZ", "ZI"]),
            GateKind::CP { pauli, basis } => controlled_pauli_tableau(pauli, basis),
        }
    }

    /// Dense `2^k x 2^k` matrix, first site most significant.
    pub fn matrix(self) -> CMatrix {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        match self {
            GateKind::H => dense::h_matrix(),
            GateKind::S => dense::s_matrix(),
            GateKind::Sdg => dense::s_matrix().adjoint(),
            GateKind::X => dense::pauli_1q(Pauli::X),
            GateKind::Y => dense::pauli_1q(Pauli::Y),
            GateKind::Z => dense::pauli_1q(Pauli::Z),
            GateKind::CX => GateKind::CP { pauli: Pauli::X, basis: Pauli::Z }.matrix(),
            GateKind::CZ => GateKind::CP { pauli: Pauli::Z, basis: Pauli::Z }.matrix(),
            GateKind::SWAP => CMatrix::from_row_slice(
                4,
                4,
                &[o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o],
            ),
            GateKind::CP { pauli, basis } => {
                let id = CMatrix::identity(2, 2);
                let b = dense::pauli_1q(basis);
                let plus = (&id + &b) * c(0.5, 0.0);
                let minus = (&id - &b) * c(0.5, 0.0);
                dense::kron(&plus, &id) + dense::kron(&minus, &dense::pauli_1q(pauli))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::CP { .. } => "CP",
        }
    }
}

/// Single-qubit gates (in application order) mapping `Z` to `basis`.
fn z_to(basis: Pauli) -> &'static [GateKind] {
    match basis {
        Pauli::X => &[GateKind::H],
        Pauli::Y => &[GateKind::H, GateKind::S],
        _ => &[],
    }
}

/// Single-qubit gates (in application order) mapping `X` to `pauli`.
fn x_to(pauli: Pauli) -> &'static [GateKind] {
    match pauli {
        Pauli::Y => &[GateKind::S],
        Pauli::Z => &[GateKind::H],
        _ => &[],
    }
}

/// `(V ⊗ W) CX (V ⊗ W)†` with `V Z V† = basis` and `W X W† = pauli`.
fn controlled_pauli_tableau(pauli: Pauli, basis: Pauli) -> CliffordTableau {
    let mut t = CliffordTableau::identity(2);
    let apply = |t: &mut CliffordTableau, g: GateKind, site: usize| {
        t.apply_local_left(&g.local_tableau(), &[site]).expect("site in range");
    };
    for &g in z_to(basis).iter().rev() {
        apply(&mut t, g.inverse(), 0);
    }
    for &g in x_to(pauli).iter().rev() {
        apply(&mut t, g.inverse(), 1);
    }
    t.apply_local_left(&GateKind::CX.local_tableau(), &[0, 1]).expect("two sites");
    for &g in z_to(basis) {
        apply(&mut t, g, 0);
    }
    for &g in x_to(pauli) {
        apply(&mut t, g, 1);
    }
    t
}

/// A gate bound to concrete sites. For two-qubit gates `sites[0]` is the
/// control.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordGate {
    pub kind: GateKind,
    pub sites: Vec<usize>,
}

impl CliffordGate {
    pub fn new(kind: GateKind, sites: Vec<usize>) -> Self {
        CliffordGate { kind, sites }
    }

    /// Checks arity, distinct sites, and that `CP` letters are non-identity.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.sites.len() != self.kind.arity() {
            return Err(CtnError::InvalidGate(format!(
                "{} expects {} site(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.sites.len()
            )));
        }
        for (i, &s) in self.sites.iter().enumerate() {
            if s >= n {
                return Err(CtnError::SiteOutOfRange { site: s, n });
            }
            if self.sites[..i].contains(&s) {
                return Err(CtnError::InvalidGate(format!("repeated site {s}")));
            }
        }
        if let GateKind::CP { pauli, basis } = self.kind {
            if pauli.is_identity() || basis.is_identity() {
                return Err(CtnError::InvalidGate("CP letters must be X, Y or Z".into()));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> CliffordGate {
        CliffordGate { kind: self.kind.inverse(), sites: self.sites.clone() }
    }
}
