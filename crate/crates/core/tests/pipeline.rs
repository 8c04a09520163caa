use std::f64::consts::PI;

use ctn_core::circuit::{Circuit, Operation};
use ctn_core::dense::{self, c, CVector};
use ctn_core::experiments::{mean_and_stderr, read_csv, run_circuit, run_doped_circuit, write_csv, ExperimentConfig, ExperimentKind, TrajectoryRecord};
use ctn_core::{CliffordGate, Cooler, CoolingPolicy, GateKind, Pauli, PauliString, TruncationPolicy};
use proptest::prelude::*;

fn mean_s_norm(records: &[TrajectoryRecord], theta: f64, t: usize) -> f64 {
    let v: Vec<f64> = records.iter().filter(|r| r.t_count == t && r.theta == theta).map(|r| r.s_norm).collect();
    mean_and_stderr(&v).0
}

#[test]
fn cooled_ensemble_mean_stays_low_below_three_quarters_n() {
    let n = 12;
    let cfg = ExperimentConfig { t_max: 9, realizations: 50, seed: 21, ..ExperimentConfig::new(ExperimentKind::DopedT, n) };
    let records = run_doped_circuit(&cfg).unwrap();
    for t in 1..=9 {
        let v: Vec<f64> = records.iter().filter(|r| r.t_count == t).map(|r| r.max_entropy).collect();
        assert!(mean_and_stderr(&v).0 < 0.05 * n as f64 / 2.0, "T={t}");
    }
}

#[test]
fn smaller_angles_delay_the_entanglement_threshold() {
    let n = 8;
    let thetas = vec![PI / 16.0, PI / 8.0, PI / 4.0];
    let t_max = 10 * n;
    let cfg = ExperimentConfig { t_max, realizations: 20, seed: 4, thetas: thetas.clone(), ..ExperimentConfig::new(ExperimentKind::AngleScan, n) };
    let records = run_doped_circuit(&cfg).unwrap();
    let threshold = |theta: f64| (1..=t_max).find(|&t| mean_s_norm(&records, theta, t) > 0.5).unwrap_or(usize::MAX);
    let ts: Vec<usize> = thetas.iter().map(|&th| threshold(th)).collect();
    assert!(ts[0] > ts[1] && ts[1] > ts[2], "{ts:?}");
}

fn gate(kind: GateKind, sites: &[usize]) -> CliffordGate {
    CliffordGate::new(kind, sites.to_vec())
}

fn dense_run(circuit: &Circuit) -> CVector {
    let mut v = dense::basis_state(circuit.n, 0);
    for op in &circuit.ops {
        v = match op {
            Operation::Clifford(g) => dense::apply_local(&g.kind.matrix(), &g.sites, circuit.n, &v),
            Operation::Rotation { pauli, theta } => {
                let m = dense::pauli_matrix(pauli);
                &v * c((theta / 2.0).cos(), 0.0) - (m * &v) * c(0.0, (theta / 2.0).sin())
            }
            Operation::RandomClifford => unreachable!(),
        };
    }
    v
}

#[test]
fn json_circuit_to_csv_round_trip() {
    let text = r#"{"n": 3, "gates": [
        {"type": "H", "q": [0]}, {"type": "CX", "q": [0, 1]}, {"type": "CX", "q": [1, 2]},
        {"type": "RZ", "q": [2], "theta": 0.7853981633974483},
        {"type": "CP", "q": [2, 0], "pauli": "Y", "basis": "X"},
        {"type": "RP", "pauli": "XYZ", "theta": 1.1}
    ]}"#;
    let circuit = Circuit::from_json(text).unwrap();
    let again = Circuit::from_json(&circuit.to_json().unwrap()).unwrap();
    assert_eq!(circuit, again);
    for policy in ["none", "exact", "heuristic:k=2,d=1", "exact+heuristic:k=3,d=1"] {
        let cooler = Cooler::new(policy.parse().unwrap()).unwrap();
        let (records, state) = run_circuit(&circuit, &cooler, TruncationPolicy::exact(), 0).unwrap();
        assert!(dense::distance_up_to_phase(&state.to_statevector().unwrap(), &dense_run(&circuit)) < 1e-10, "{policy}");
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back.iter().all(|r| r.method == policy));
    }
}

#[test]
fn ghz_plus_t_is_cooled_back_to_a_product_mps() {
    let ops = vec![
        Operation::Clifford(gate(GateKind::H, &[0])),
        Operation::Clifford(gate(GateKind::CX, &[0, 1])),
        Operation::Clifford(gate(GateKind::CX, &[1, 2])),
        Operation::Clifford(gate(GateKind::CX, &[2, 3])),
        Operation::Rotation { pauli: PauliString::single(4, 3, Pauli::Z), theta: PI / 4.0 },
    ];
    let circuit = Circuit { n: 4, ops };
    let cooler = Cooler::new(CoolingPolicy::EXACT).unwrap();
    let (records, state) = run_circuit(&circuit, &cooler, TruncationPolicy::exact(), 0).unwrap();
    assert!(records[0].exact_ok);
    assert!(state.max_entropy() < 1e-12);
    assert!(dense::distance_up_to_phase(&state.to_statevector().unwrap(), &dense_run(&circuit)) < 1e-10);
}

fn op_strategy(n: usize) -> impl Strategy<Value = Operation> {
    let kinds = [GateKind::H, GateKind::S, GateKind::Sdg, GateKind::CX, GateKind::CZ, GateKind::SWAP];
    prop_oneof![
        (0..kinds.len(), 0..n, 1..n).prop_map(move |(k, a, off)| {
            let kind = kinds[k];
            let sites = if kind.arity() == 1 { vec![a] } else { vec![a, (a + off) % n] };
            Operation::Clifford(CliffordGate::new(kind, sites))
        }),
        (prop::collection::vec(0usize..4, n), -PI..PI).prop_filter_map("identity", move |(letters, theta)| {
            let letters: Vec<Pauli> = letters.into_iter().map(|i| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i]).collect();
            let pauli = PauliString::from_letters(&letters);
            (!pauli.is_identity_up_to_phase()).then_some(Operation::Rotation { pauli, theta })
        }),
    ]
}

fn circuit_strategy() -> impl Strategy<Value = (Circuit, usize)> {
    (2usize..=5).prop_flat_map(|n| (prop::collection::vec(op_strategy(n), 1..25), 0usize..4).prop_map(move |(ops, p)| (Circuit { n, ops }, p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_cooler_preserves_the_physical_state((circuit, p) in circuit_strategy()) {
        let policy = [CoolingPolicy::NONE, CoolingPolicy::EXACT, CoolingPolicy::exact_then_heuristic(2, 2).unwrap(), CoolingPolicy::heuristic(3, 1).unwrap()][p];
        prop_assume!(circuit.n >= 3 || policy.heuristic.map_or(true, |h| h.k == 2));
        let cooler = Cooler::new(policy).unwrap();
        let (records, state) = run_circuit(&circuit, &cooler, TruncationPolicy::exact(), 0).unwrap();
        prop_assert_eq!(records.len(), circuit.rotation_count());
        prop_assert!(dense::distance_up_to_phase(&state.to_statevector().unwrap(), &dense_run(&circuit)) < 1e-9);
        for r in &records {
            prop_assert!(r.max_entropy <= circuit.n as f64 / 2.0 + 1e-9);
        }
    }
}
