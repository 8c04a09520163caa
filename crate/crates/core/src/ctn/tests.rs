use super::*;
use crate::clifford::{random_clifford, GateKind};
use crate::dense::c;
use crate::mps::stabilizer_states;
use num_complex::Complex64 as C64;
use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

fn exact(n: usize) -> CtnState {
    CtnState::new(n, TruncationPolicy::exact()).unwrap()
}

fn gate(kind: GateKind, sites: &[usize]) -> CliffordGate {
    CliffordGate::new(kind, sites.to_vec())
}

fn dense_gate(v: &CVector, g: &CliffordGate, n: usize) -> CVector {
    dense::apply_local(&g.kind.matrix(), &g.sites, n, v)
}

fn dense_rotation(v: &CVector, p: &PauliString, theta: f64) -> CVector {
    let m = dense::pauli_matrix(p);
    v * c((theta / 2.0).cos(), 0.0) - (m * v) * c(0.0, (theta / 2.0).sin())
}

fn random_gate(n: usize, rng: &mut impl Rng) -> CliffordGate {
    let kinds = [GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::CX, GateKind::CZ, GateKind::SWAP];
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let a = rng.gen_range(0..n);
    if kind.arity() == 1 {
        return gate(kind, &[a]);
    }
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    gate(kind, &[a, b])
}

fn random_hermitian_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let letters: Vec<Pauli> = (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]).collect();
        let mut p = PauliString::from_letters(&letters);
        if rng.gen() {
            p.set_phase(2);
        }
        if !p.is_identity_up_to_phase() {
            return p;
        }
    }
}

fn magic() -> [C64; 2] {
    [c(FRAC_PI_8.cos(), 0.0), c(0.0, -FRAC_PI_8.sin())]
}

#[test]
fn new_state_examples() {
    let s = exact(4);
    assert_eq!(s.mps().bond_dims(), vec![1, 1, 1]);
    assert_eq!(s.max_entropy(), 0.0);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &dense::basis_state(4, 0)) < 1e-12);
    let policy = TruncationPolicy::new(7, 1e-9).unwrap();
    assert_eq!(CtnState::new(3, policy).unwrap().policy(), policy);
    assert!(CtnState::new(1, policy).is_err());
}

#[test]
fn clifford_gates_only_touch_the_frame() {
    let mut s = exact(4);
    s.apply_gate(&gate(GateKind::H, &[0])).unwrap();
    s.apply_gate(&gate(GateKind::CX, &[0, 1])).unwrap();
    assert_eq!(s.mps().max_bond_dim(), 1);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut bell = CVector::zeros(16);
    bell[0] = c(r, 0.0);
    bell[12] = c(r, 0.0);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &bell) < 1e-12);
    assert!(s.apply_gate(&gate(GateKind::CX, &[0, 4])).is_err());
    assert!(s.apply_clifford(&CliffordTableau::identity(3)).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut t = exact(6);
    t.apply_clifford(&random_clifford(6, &mut rng)).unwrap();
    assert_eq!(t.max_entropy(), 0.0);
    assert_eq!(t.stats().clifford_gates, 1);
}

#[test]
fn clifford_circuits_match_dense_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 6;
    let mut s = exact(n);
    let mut v = dense::basis_state(n, 0);
    for _ in 0..60 {
        let g = random_gate(n, &mut rng);
        s.apply_gate(&g).unwrap();
        v = dense_gate(&v, &g, n);
    }
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-9);
}

#[test]
fn t_gate_through_hadamard_frame_makes_a_magic_site() {
    let mut s = exact(3);
    s.apply_gate(&gate(GateKind::H, &[0])).unwrap();
    let cooler = Cooler::new(CoolingPolicy::EXACT).unwrap();
    let report = s.apply_rotation(FRAC_PI_4, Pauli::Z, 0, &cooler).unwrap();
    assert!(report.succeeded);
    assert_eq!(report.gates_applied, 0);
    assert_eq!(s.mps().bond_dims(), vec![1, 1]);
    let site = CVector::from_column_slice(&s.mps().site_vector(0).unwrap());
    assert!(dense::distance_up_to_phase(&site, &CVector::from_column_slice(&magic())) < 1e-12);
    assert!(s.mps().detect_separable_stabilizer(0).is_none());

    let mut v = dense_gate(&dense::basis_state(3, 0), &gate(GateKind::H, &[0]), 3);
    v = dense_rotation(&v, &PauliString::single(3, 0, Pauli::Z), FRAC_PI_4);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-12);
}

#[test]
fn zero_angle_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = exact(4);
    s.apply_clifford(&random_clifford(4, &mut rng)).unwrap();
    let v = s.to_statevector().unwrap();
    let report = s.apply_rotation(0.0, Pauli::X, 2, &Cooler::none()).unwrap();
    assert_eq!(report.entropies_before, report.entropies_after);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-12);
    assert!(s.apply_rotation(0.1, Pauli::I, 0, &Cooler::none()).is_err());
    assert!(s.apply_rotation(0.1, Pauli::X, 4, &Cooler::none()).is_err());
}

#[test]
fn exact_and_uncooled_rotations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let exact_cooler = Cooler::new(CoolingPolicy::EXACT).unwrap();
    for _ in 0..20 {
        let c0 = random_clifford(6, &mut rng);
        let site = rng.gen_range(0..6);
        let theta = rng.gen_range(-PI..PI);
        let mut a = exact(6);
        let mut b = exact(6);
        a.apply_clifford(&c0).unwrap();
        b.apply_clifford(&c0).unwrap();
        a.apply_rotation(theta, Pauli::Z, site, &Cooler::none()).unwrap();
        let r = b.apply_rotation(theta, Pauli::Z, site, &exact_cooler).unwrap();
        assert!(r.succeeded);
        assert_eq!(b.max_entropy(), 0.0);
        assert!(dense::distance_up_to_phase(&a.to_statevector().unwrap(), &b.to_statevector().unwrap()) < 1e-9);
    }
}

#[test]
fn exact_cooler_examples() {
    let theta = 0.3;
    let mut s = exact(3);
    let p: PauliString = "XXZ".parse().unwrap();
    let report = s.cool_exact(theta, &p).unwrap();
    assert!(report.succeeded);
    assert_eq!(report.gates_applied, 2);
    assert_eq!(s.mps().bond_dims(), vec![1, 1]);
    let want = dense_rotation(&dense::basis_state(3, 0), &p, theta);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &want) < 1e-12);
    let cascade = cascade_circuit(0, SiteStabilizer::new(Pauli::Z, 1), &[(1, Pauli::X), (2, Pauli::Z)], Pauli::X).unwrap();
    assert_eq!(
        cascade,
        vec![
            gate(GateKind::CP { pauli: Pauli::X, basis: Pauli::Z }, &[0, 1]),
            gate(GateKind::CP { pauli: Pauli::Z, basis: Pauli::Z }, &[0, 2])
        ]
    );

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [c(r, 0.0), c(r, 0.0)];
    let zero = [c(1.0, 0.0), c(0.0, 0.0)];
    let mps = Mps::product_state(&[plus, zero, zero]).unwrap();
    let mut s = CtnState::from_parts(CliffordTableau::identity(3), mps, TruncationPolicy::exact()).unwrap();
    assert!(s.cool_exact(theta, &"ZII".parse().unwrap()).unwrap().succeeded);

    let mps = Mps::product_state(&[magic(); 3]).unwrap();
    let mut s = CtnState::from_parts(CliffordTableau::identity(3), mps, TruncationPolicy::exact()).unwrap();
    let v = s.to_statevector().unwrap();
    let report = s.cool_exact(theta, &"XYZ".parse().unwrap()).unwrap();
    assert!(!report.succeeded);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-14);
    assert_eq!(s.frame(), &CliffordTableau::identity(3));
}

#[test]
fn exact_cooler_needs_an_anticommuting_stabilizer_site() {
    let mut s = exact(3);
    let report = s.cool_exact(0.4, &"ZZI".parse().unwrap()).unwrap();
    assert!(!report.succeeded);
    let report = s.cool_exact(0.4, &"-ZYI".parse().unwrap()).unwrap();
    assert!(report.succeeded);
    assert_eq!(s.stabilizer_sites(), vec![0, 2]);
}

#[test]
fn every_stabilizer_control_and_letter_is_exact() {
    let theta = 0.7;
    for (basis, eig, vec) in stabilizer_states() {
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            if letter.commutes_with(basis) {
                continue;
            }
            let site = [vec[0], vec[1]];
            let mps = Mps::product_state(&[site, magic(), [c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
            let mut s = CtnState::from_parts(CliffordTableau::identity(3), mps, TruncationPolicy::exact()).unwrap();
            let v = s.to_statevector().unwrap();
            let mut p = PauliString::from_letters(&[letter, Pauli::Y, Pauli::X]);
            p.set_phase(2);
            let report = s.cool_exact(theta, &p).unwrap();
            assert!(report.succeeded, "{basis} {eig} {letter}");
            assert_eq!(s.mps().max_bond_dim(), 1);
            let want = dense_rotation(&v, &p, theta);
            assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &want) < 1e-12);
        }
    }
}

#[test]
fn heuristic_decouples_a_rotated_pair() {
    let mut mps = Mps::zero_state(2).unwrap();
    mps.apply_pauli_rotation(FRAC_PI_8, &"XX".parse().unwrap()).unwrap();
    let mut s = CtnState::from_parts(CliffordTableau::identity(2), mps, TruncationPolicy::exact()).unwrap();
    assert!(s.max_entropy() > 0.5);
    let v = s.to_statevector().unwrap();
    let table = HeuristicTable::shared(2).unwrap();
    let report = s.cool_heuristic(&table, 1).unwrap();
    assert_eq!(report.gates_applied, 1);
    assert!(s.max_entropy() < 1e-10);
    assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-12);
}

#[test]
fn heuristic_leaves_product_states_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mps = Mps::random(5, 1, &mut rng).unwrap();
    let mut s = CtnState::from_parts(CliffordTableau::identity(5), mps, TruncationPolicy::exact()).unwrap();
    let report = s.cool_heuristic(&HeuristicTable::shared(2).unwrap(), 3).unwrap();
    assert_eq!(report.gates_applied, 0);
    assert_eq!(s.stats().heuristic_sweeps, 1);
    assert_eq!(s.frame(), &CliffordTableau::identity(5));
    assert!(s.cool_heuristic(&HeuristicTable::shared(2).unwrap(), 0).is_err());
}

#[test]
fn max_entropy_matches_dense_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 8;
    let mut s = exact(n);
    for _ in 0..4 {
        s.apply_clifford(&random_clifford(n, &mut rng)).unwrap();
        s.apply_rotation(FRAC_PI_4, Pauli::Z, rng.gen_range(0..n), &Cooler::none()).unwrap();
    }
    let psi = s.mps().to_statevector().unwrap();
    let dense_max = (0..n - 1).map(|cut| dense::cut_entropy(&psi, n, cut)).fold(0.0, f64::max);
    assert!((s.max_entropy() - dense_max).abs() < 1e-9);
    assert!(s.to_statevector().is_ok());
    assert!(exact(13).to_statevector().is_err());
}

#[test]
fn cooler_table_must_match_policy() {
    let table = HeuristicTable::shared(2).unwrap();
    assert!(Cooler::with_table(CoolingPolicy::heuristic(3, 1).unwrap(), table.clone()).is_err());
    assert!(Cooler::with_table(CoolingPolicy::heuristic(2, 1).unwrap(), table).is_ok());
}

fn random_trajectory_check(seed: u64, n: usize, steps: usize) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coolers = [
        Cooler::new(CoolingPolicy::exact_then_heuristic(2, 2).unwrap()).unwrap(),
        Cooler::new(CoolingPolicy::heuristic(2, 1).unwrap()).unwrap(),
    ];
    let mut s = exact(n);
    let mut v = dense::basis_state(n, 0);
    for step in 0..steps {
        for _ in 0..3 {
            let g = random_gate(n, &mut rng);
            s.apply_gate(&g).unwrap();
            v = dense_gate(&v, &g, n);
        }
        let p = random_hermitian_pauli(n, &mut rng);
        let theta = rng.gen_range(-PI..PI);
        let max_before = s.max_entropy();
        let report = s.apply_pauli_rotation(theta, &p, &coolers[step % 2]).unwrap();
        v = dense_rotation(&v, &p, theta);
        let after = s.to_statevector().unwrap();
        let d = dense::distance_up_to_phase(&after, &v);
        if d > 1e-9 {
            return Err(format!("step {step}: distance {d}"));
        }
        if report.succeeded && s.max_entropy() > max_before + 1e-10 {
            return Err(format!("step {step}: exact cooling raised entropy"));
        }
        let probe = s.max_entropy();
        let table = HeuristicTable::shared(2).unwrap();
        let v_before = s.to_statevector().unwrap();
        s.cool_heuristic(&table, 2).unwrap();
        if s.max_entropy() > probe + 1e-10 {
            return Err(format!("step {step}: heuristic raised max entropy"));
        }
        if dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v_before) > 1e-9 {
            return Err(format!("step {step}: heuristic changed the physical state"));
        }
    }
    Ok(())
}

#[test]
fn exact_success_keeps_bonds_and_uses_one_site() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cooler = Cooler::new(CoolingPolicy::EXACT).unwrap();
    let mut s = exact(6);
    let mut successes = 0;
    for _ in 0..10 {
        s.apply_clifford(&random_clifford(6, &mut rng)).unwrap();
        let bonds = s.mps().bond_dims();
        let flags = s.stabilizer_sites().len();
        let report = s.apply_rotation(FRAC_PI_4, Pauli::Z, rng.gen_range(0..6), &cooler).unwrap();
        if report.succeeded {
            successes += 1;
            assert_eq!(s.mps().bond_dims(), bonds);
            assert_eq!(s.stabilizer_sites().len(), flags - 1);
        }
    }
    assert!(successes >= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_preserve_the_physical_state(seed in any::<u64>()) {
        let r = random_trajectory_check(seed, 5, 6);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}

#[test]
fn k3_heuristic_preserves_state_and_never_raises_entropy() {
    let table = HeuristicTable::shared(3).unwrap();
    assert_eq!(table.len(), 6720);
    assert_eq!(table.plane_counts(), vec![336, 336]);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..3 {
        let n = 6;
        let mut s = exact(n);
        for _ in 0..4 {
            s.apply_clifford(&random_clifford(n, &mut rng)).unwrap();
            s.apply_rotation(FRAC_PI_4, Pauli::Z, 0, &Cooler::none()).unwrap();
        }
        let v = s.to_statevector().unwrap();
        let before = s.entropies();
        s.cool_heuristic(&table, 2).unwrap();
        assert!(s.max_entropy() <= before.iter().copied().fold(0.0, f64::max) + 1e-10);
        assert!(dense::distance_up_to_phase(&s.to_statevector().unwrap(), &v) < 1e-9);
    }
}

#[test]
fn replaying_the_mps_log_reproduces_the_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cooler = Cooler::new(CoolingPolicy::exact_then_heuristic(2, 2).unwrap()).unwrap();
    let mut s = exact(6);
    s.record_mps_ops();
    for _ in 0..8 {
        s.apply_clifford(&random_clifford(6, &mut rng)).unwrap();
        s.apply_rotation(FRAC_PI_4, Pauli::Z, rng.gen_range(0..6), &cooler).unwrap();
    }
    let mut replay = Mps::zero_state(6).unwrap();
    for op in s.mps_ops().unwrap() {
        op.apply(&mut replay).unwrap();
    }
    assert!((replay.fidelity(s.mps()).unwrap() - 1.0).abs() < 1e-10);
    assert!(exact(3).mps_ops().is_none());
}
