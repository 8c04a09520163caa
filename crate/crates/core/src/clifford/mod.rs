//! Clifford unitaries as stabilizer tableaus.
//!
//! A [`CliffordTableau`] stores, for every qubit `k`, the images
//! `C X_k C†` and `C Z_k C†` as signed Pauli strings. Everything else
//! (composition, conjugation, inversion) is derived from those `2n` images.

mod cascade;
mod gate;
mod random;
mod synth;
mod unitary;

pub use cascade::{cascade_circuit, SiteStabilizer};
pub use gate::{CliffordGate, GateKind};
pub use random::random_clifford;
pub use unitary::tableau_to_unitary;

use crate::error::{CtnError, Result};
use crate::pauli::PauliString;

/// Direction of a Pauli conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `C p C†`
    Forward,
    /// `C† p C`
    Backward,
}

/// Which side the second operand of a composition multiplies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `compose(a, b, Left) = b · a`: `b` is applied after `a`.
    Left,
    /// `compose(a, b, Right) = a · b`: `b` is applied before `a`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let x_images = (0..n).map(|k| PauliString::single(n, k, crate::pauli::Pauli::X)).collect();
        let z_images = (0..n).map(|k| PauliString::single(n, k, crate::pauli::Pauli::Z)).collect();
        CliffordTableau { n, x_images, z_images }
    }

    /// Builds a tableau from generator images, checking that they are
    /// Hermitian and satisfy the symplectic commutation pattern.
    pub fn from_images(x_images: Vec<PauliString>, z_images: Vec<PauliString>) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(CtnError::Dimension { expected: n, found: z_images.len() });
        }
        for p in x_images.iter().chain(&z_images) {
            if p.n() != n {
                return Err(CtnError::Dimension { expected: n, found: p.n() });
            }
            if !p.is_hermitian() {
                return Err(CtnError::NotSymplectic);
            }
        }
        let t = CliffordTableau { n, x_images, z_images };
        if !t.is_symplectic() {
            return Err(CtnError::NotSymplectic);
        }
        Ok(t)
    }

    pub(crate) fn from_images_unchecked(x_images: Vec<PauliString>, z_images: Vec<PauliString>) -> Self {
        CliffordTableau { n: x_images.len(), x_images, z_images }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, k: usize) -> &PauliString {
        &self.x_images[k]
    }

    pub fn z_image(&self, k: usize) -> &PauliString {
        &self.z_images[k]
    }

    /// `X'_k` anticommutes with `Z'_k` and commutes with every other image.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let expect_anti = a == b;
                if self.x_images[a].commutes_unchecked(&self.z_images[b]) == expect_anti {
                    return false;
                }
                if a < b
                    && (!self.x_images[a].commutes_unchecked(&self.x_images[b])
                        || !self.z_images[a].commutes_unchecked(&self.z_images[b]))
                {
                    return false;
                }
            }
        }
        true
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(CtnError::Dimension { expected: self.n, found: n });
        }
        Ok(())
    }

    pub fn conjugate(&self, p: &PauliString, direction: Direction) -> Result<PauliString> {
        self.check_n(p.n())?;
        Ok(match direction {
            Direction::Forward => self.forward(p),
            Direction::Backward => self.inverse().forward(p),
        })
    }

    /// `C p C†`. Writes `p = i^(phase + #Y) Π_k X_k^x Z_k^z` and maps each
    /// factor to its image.
    pub(crate) fn forward(&self, p: &PauliString) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        acc.set_phase(p.phase().wrapping_add((p.num_y() & 3) as u8));
        for k in 0..self.n {
            if p.x_bit(k) {
                acc.mul_assign_right(&self.x_images[k]);
            }
            if p.z_bit(k) {
                acc.mul_assign_right(&self.z_images[k]);
            }
        }
        acc
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // q = C† X_k C has x_j = [Z'_j has z at k], z_j = [X'_j has z at k];
        // C† Z_k C uses the x bits instead. Signs are fixed by pushing q back.
        let build = |k: usize, use_x: bool| -> PauliString {
            let mut q = PauliString::identity(n);
            for j in 0..n {
                let (zx, xx) = if use_x {
                    (self.z_images[j].x_bit(k), self.x_images[j].x_bit(k))
                } else {
                    (self.z_images[j].z_bit(k), self.x_images[j].z_bit(k))
                };
                q.set_bits(j, zx, xx);
            }
            let image = self.forward(&q);
            if image.phase() == 2 {
                q.set_phase(2);
            }
            q
        };
        let x_images = (0..n).map(|k| build(k, false)).collect();
        let z_images = (0..n).map(|k| build(k, true)).collect();
        CliffordTableau { n, x_images, z_images }
    }

    pub fn compose(&self, other: &CliffordTableau, side: Side) -> Result<CliffordTableau> {
        self.check_n(other.n)?;
        Ok(match side {
            Side::Left => other.after(self),
            Side::Right => self.after(other),
        })
    }

    /// `self · first`: the tableau of applying `first`, then `self`.
    fn after(&self, first: &CliffordTableau) -> CliffordTableau {
        CliffordTableau {
            n: self.n,
            x_images: first.x_images.iter().map(|p| self.forward(p)).collect(),
            z_images: first.z_images.iter().map(|p| self.forward(p)).collect(),
        }
    }

    /// `self <- L · self` for a `k`-qubit Clifford `local` acting on `sites`.
    pub fn apply_local_left(&mut self, local: &CliffordTableau, sites: &[usize]) -> Result<()> {
        self.check_sites(sites)?;
        local.check_n(sites.len())?;
        for p in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            conjugate_in_place(p, local, sites);
        }
        Ok(())
    }

    /// `self <- self · R` for a `k`-qubit Clifford `local` acting on `sites`.
    pub fn apply_local_right(&mut self, local: &CliffordTableau, sites: &[usize]) -> Result<()> {
        self.check_sites(sites)?;
        local.check_n(sites.len())?;
        let embed = |q: &PauliString| -> PauliString {
            let mut full = PauliString::identity(self.n);
            for (j, &s) in sites.iter().enumerate() {
                full.set_bits(s, q.x_bit(j), q.z_bit(j));
            }
            full.set_phase(q.phase());
            full
        };
        let new_x: Vec<PauliString> = (0..sites.len()).map(|j| self.forward(&embed(local.x_image(j)))).collect();
        let new_z: Vec<PauliString> = (0..sites.len()).map(|j| self.forward(&embed(local.z_image(j)))).collect();
        for (j, &s) in sites.iter().enumerate() {
            self.x_images[s] = new_x[j].clone();
            self.z_images[s] = new_z[j].clone();
        }
        Ok(())
    }

    /// `self <- G · self`.
    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        self.apply_local_left(&gate.kind.local_tableau(), &gate.sites)
    }

    /// `self <- self · G`.
    pub fn apply_gate_right(&mut self, gate: &CliffordGate) -> Result<()> {
        self.apply_local_right(&gate.kind.local_tableau(), &gate.sites)
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.n {
                return Err(CtnError::SiteOutOfRange { site: s, n: self.n });
            }
            if sites[..i].contains(&s) {
                return Err(CtnError::InvalidGate(format!("repeated site {s}")));
            }
        }
        Ok(())
    }

    /// Phase-free part as a `2n x 2n` bit matrix: column `j` holds the
    /// `(x | z)` bits of the image of the `j`-th generator, X's first.
    pub fn symplectic_columns(&self) -> Vec<(Vec<bool>, Vec<bool>)> {
        self.x_images.iter().chain(&self.z_images).map(|p| (p.x_bits(), p.z_bits())).collect()
    }

    /// Gate sequence `g_1, ..., g_m` whose product `g_m ... g_1` equals this
    /// tableau up to a global phase.
    pub fn to_gates(&self) -> Vec<CliffordGate> {
        synth::synthesize(self)
    }

    /// Applies the Clifford to a dense state vector (`n <= 20`).
    pub fn apply_to_statevector(&self, v: &crate::dense::CVector) -> Result<crate::dense::CVector> {
        if self.n > 20 {
            return Err(CtnError::TooLarge { n: self.n, limit: 20 });
        }
        if v.len() != 1 << self.n {
            return Err(CtnError::Dimension { expected: 1 << self.n, found: v.len() });
        }
        let mut out = v.clone();
        for g in self.to_gates() {
            out = crate::dense::apply_local(&g.kind.matrix(), &g.sites, self.n, &out);
        }
        Ok(out)
    }
}

/// Replaces the letters of `p` on `sites` by their image under `local`.
fn conjugate_in_place(p: &mut PauliString, local: &CliffordTableau, sites: &[usize]) {
    let restricted = p.restrict(sites);
    if restricted.is_identity_up_to_phase() {
        return;
    }
    let image = local.forward(&restricted);
    for (j, &s) in sites.iter().enumerate() {
        p.set_bits(s, image.x_bit(j), image.z_bit(j));
    }
    p.add_phase(image.phase());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::pauli::Pauli;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn gate(kind: GateKind, sites: &[usize]) -> CliffordGate {
        CliffordGate::new(kind, sites.to_vec())
    }

    fn tableau_of(n: usize, gates: &[CliffordGate]) -> CliffordTableau {
        let mut t = CliffordTableau::identity(n);
        for g in gates {
            t.apply_gate(g).unwrap();
        }
        t
    }

    fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
        let letters: Vec<Pauli> = (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]).collect();
        let mut p = PauliString::from_letters(&letters);
        p.set_phase(rng.gen_range(0..4));
        p
    }

    #[test]
    fn involutions_compose_to_identity() {
        let h = tableau_of(1, &[gate(GateKind::H, &[0])]);
        assert_eq!(h.compose(&h, Side::Left).unwrap(), CliffordTableau::identity(1));
        let s = tableau_of(1, &[gate(GateKind::S, &[0])]);
        let z = tableau_of(1, &[gate(GateKind::Z, &[0])]);
        assert_eq!(s.compose(&s, Side::Left).unwrap(), z);
    }

    #[test]
    fn compose_matches_dense_product() {
        let cx = tableau_of(2, &[gate(GateKind::CX, &[0, 1])]);
        let swap = tableau_of(2, &[gate(GateKind::SWAP, &[0, 1])]);
        // Left: swap after cx.
        let left = cx.compose(&swap, Side::Left).unwrap();
        let u = tableau_to_unitary(&swap).unwrap() * tableau_to_unitary(&cx).unwrap();
        let got = tableau_to_unitary(&left).unwrap();
        assert!(unitaries_equal_up_to_phase(&u, &got));
        let right = cx.compose(&swap, Side::Right).unwrap();
        let u = tableau_to_unitary(&cx).unwrap() * tableau_to_unitary(&swap).unwrap();
        assert!(unitaries_equal_up_to_phase(&u, &tableau_to_unitary(&right).unwrap()));
    }

    pub(crate) fn unitaries_equal_up_to_phase(a: &dense::CMatrix, b: &dense::CMatrix) -> bool {
        let tr = (a.adjoint() * b).trace();
        let phase = tr / tr.norm();
        (a * phase - b).norm() < 1e-9
    }

    #[test]
    fn conjugation_examples() {
        let h = tableau_of(1, &[gate(GateKind::H, &[0])]);
        assert_eq!(h.conjugate(&ps("Z"), Direction::Forward).unwrap(), ps("X"));
        let cx = tableau_of(2, &[gate(GateKind::CX, &[0, 1])]);
        assert_eq!(cx.conjugate(&ps("XI"), Direction::Forward).unwrap(), ps("XX"));
        assert!(cx.conjugate(&ps("XII"), Direction::Forward).is_err());
    }

    #[test]
    fn conjugation_matches_dense_for_random_cliffords() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 4] {
            for _ in 0..10 {
                let c = random_clifford(n, &mut rng);
                let u = tableau_to_unitary(&c).unwrap();
                for _ in 0..20 {
                    let p = random_pauli(n, &mut rng);
                    let fwd = c.conjugate(&p, Direction::Forward).unwrap();
                    let expect = &u * dense::pauli_matrix(&p) * u.adjoint();
                    assert!((expect - dense::pauli_matrix(&fwd)).norm() < 1e-9);
                    let bwd = c.conjugate(&p, Direction::Backward).unwrap();
                    let expect = u.adjoint() * dense::pauli_matrix(&p) * &u;
                    assert!((expect - dense::pauli_matrix(&bwd)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn random_compositions_stay_symplectic_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..1000 {
            let n = 1 + trial % 6;
            let a = random_clifford(n, &mut rng);
            let b = random_clifford(n, &mut rng);
            let ab = a.compose(&b, if trial % 2 == 0 { Side::Left } else { Side::Right }).unwrap();
            assert!(ab.is_symplectic());
            let id = ab.compose(&ab.inverse(), Side::Right).unwrap();
            assert_eq!(id, CliffordTableau::identity(n));
            let p = random_pauli(n, &mut rng);
            let q = random_pauli(n, &mut rng);
            let fp = ab.conjugate(&p, Direction::Forward).unwrap();
            let fq = ab.conjugate(&q, Direction::Forward).unwrap();
            assert_eq!(p.commutes(&q).unwrap(), fp.commutes(&fq).unwrap());
            assert_eq!(ab.conjugate(&fp, Direction::Backward).unwrap(), p);
        }
    }

    #[test]
    fn composition_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let (a, b, c) = (random_clifford(4, &mut rng), random_clifford(4, &mut rng), random_clifford(4, &mut rng));
            let lhs = a.compose(&b, Side::Right).unwrap().compose(&c, Side::Right).unwrap();
            let rhs = a.compose(&b.compose(&c, Side::Right).unwrap(), Side::Right).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn local_right_multiplication_matches_full_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let mut frame = random_clifford(5, &mut rng);
            let local = random_clifford(2, &mut rng);
            let sites = [3usize, 1];
            let mut full = CliffordTableau::identity(5);
            full.apply_local_left(&local, &sites).unwrap();
            let expect = frame.compose(&full, Side::Right).unwrap();
            frame.apply_local_right(&local, &sites).unwrap();
            assert_eq!(frame, expect);
        }
    }

    #[test]
    fn synthesized_gates_reproduce_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=7 {
            for _ in 0..20 {
                let c = random_clifford(n, &mut rng);
                let rebuilt = tableau_of(n, &c.to_gates());
                assert_eq!(rebuilt, c);
            }
        }
    }

    #[test]
    fn statevector_application_agrees_with_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let c = random_clifford(4, &mut rng);
            let v = dense::CVector::from_fn(16, |_, _| dense::c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let a = c.apply_to_statevector(&v).unwrap();
            let b = tableau_to_unitary(&c).unwrap() * &v;
            assert!(dense::distance_up_to_phase(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn rejects_non_symplectic_images() {
        let r = CliffordTableau::from_images(vec![ps("X")], vec![ps("X")]);
        assert!(matches!(r, Err(CtnError::NotSymplectic)));
        let r = CliffordTableau::from_images(vec![ps("Z")], vec![ps("X")]);
        assert!(r.is_ok());
    }
}
