//! Greedy gate decomposition of a tableau (not depth-optimal).

use super::{CliffordGate, CliffordTableau, GateKind};
use crate::pauli::Pauli;

struct Reducer {
    t: CliffordTableau,
    gates: Vec<CliffordGate>,
}

impl Reducer {
    fn push(&mut self, kind: GateKind, sites: Vec<usize>) {
        let g = CliffordGate::new(kind, sites);
        self.t.apply_gate(&g).expect("valid gate");
        self.gates.push(g);
    }
}

/// Returns gates in application order whose product is `t` up to a global phase.
pub(crate) fn synthesize(t: &CliffordTableau) -> Vec<CliffordGate> {
    let n = t.n();
    let mut r = Reducer { t: t.clone(), gates: Vec::new() };
    for i in 0..n {
        // Bring the image of X_i to +X_i.
        let xi = r.t.x_image(i).clone();
        for j in xi.support() {
            match xi.letter(j) {
                Pauli::Z => r.push(GateKind::H, vec![j]),
                Pauli::Y => r.push(GateKind::Sdg, vec![j]),
                _ => {}
            }
        }
        if r.t.x_image(i).letter(i) == Pauli::I {
            let j = r.t.x_image(i).support()[0];
            r.push(GateKind::SWAP, vec![i, j]);
        }
        for j in r.t.x_image(i).support() {
            if j != i {
                r.push(GateKind::CX, vec![i, j]);
            }
        }

        // Clear the image of Z_i away from site i, keeping X_i fixed.
        let zi = r.t.z_image(i).clone();
        for j in zi.support() {
            if j == i {
                continue;
            }
            match zi.letter(j) {
                Pauli::X => r.push(GateKind::H, vec![j]),
                Pauli::Y => {
                    r.push(GateKind::Sdg, vec![j]);
                    r.push(GateKind::H, vec![j]);
                }
                _ => {}
            }
            r.push(GateKind::CX, vec![j, i]);
        }
        if r.t.z_image(i).letter(i) == Pauli::Y {
            r.push(GateKind::H, vec![i]);
            r.push(GateKind::S, vec![i]);
            r.push(GateKind::H, vec![i]);
        }
        if r.t.x_image(i).sign() < 0 {
            r.push(GateKind::Z, vec![i]);
        }
        if r.t.z_image(i).sign() < 0 {
            r.push(GateKind::X, vec![i]);
        }
    }
    debug_assert_eq!(r.t, CliffordTableau::identity(n));
    r.gates.iter().rev().map(CliffordGate::inverse).collect()
}
