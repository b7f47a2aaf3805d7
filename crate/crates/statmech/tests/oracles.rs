use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcqec_core::{BitVec, Boundary, BrickworkCircuit, CircuitCode, InputLayout, PauliOperator, Role};
use rcqec_statmech::{
    exhaustive, marginal_decode, marginal_log_partitions, minimum_weight_decode, nishimori_beta,
    LatticeTensorNetwork, SpinMode, SpinModel,
};

fn single_z_code() -> CircuitCode {
    let layout = InputLayout {
        roles: vec![Role::ZStabilizer],
        k: 0,
        padding: 0,
    };
    CircuitCode::derive(BrickworkCircuit::from_layers(1, Boundary::Open, vec![vec![]]), layout)
        .unwrap()
}

/// Small codes: at most 8 physical qubits, depth at most 2.
fn small_code(rng: &mut ChaCha8Rng) -> CircuitCode {
    match rng.random_range(0..3) {
        0 => CircuitCode::random(4, 0.25, 1, Boundary::Open, false, rng).unwrap(),
        1 => {
            let n = rng.random_range(4..=8);
            let d = rng.random_range(1..=2);
            let rate = [0.25, 1.0 / 3.0, 0.5][rng.random_range(0..3)];
            CircuitCode::random(n, rate, d, Boundary::Periodic, false, rng).unwrap()
        }
        _ => {
            let n = rng.random_range(4..=8);
            CircuitCode::random(n, 1.0 / 3.0, 2, Boundary::Periodic, true, rng).unwrap()
        }
    }
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut p = PauliOperator::identity(n);
    for q in 0..n {
        p.x_bits_mut().set(q, rng.random());
        p.z_bits_mut().set(q, rng.random());
    }
    p
}

fn depolarizing(n: usize, p: f64, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut e = PauliOperator::identity(n);
    for q in 0..n {
        if rng.random_bool(p) {
            let letter = rcqec_core::Pauli::NON_IDENTITY[rng.random_range(0..3)];
            e.set_letter(q, letter);
        }
    }
    e
}

fn random_mode(code: &CircuitCode, rng: &mut ChaCha8Rng) -> SpinMode {
    match rng.random_range(0..3) {
        0 => SpinMode::StabilizersOnly,
        1 => SpinMode::ExcludeLogical(rng.random_range(0..code.num_logicals())),
        _ => SpinMode::AllGenerators,
    }
}

#[test]
fn nishimori_values() {
    assert!(nishimori_beta(0.75).unwrap().abs() < 1e-15);
    assert!((nishimori_beta(0.1).unwrap() + 0.25 * 27f64.ln()).abs() < 1e-12);
    assert!((nishimori_beta(0.1).unwrap() - (-0.823959)).abs() < 1e-6);
    let mut prev = f64::INFINITY;
    for p in [0.7, 0.5, 0.1, 0.01, 1e-4, 1e-8] {
        let b = nishimori_beta(p).unwrap();
        assert!(b < prev);
        prev = b;
    }
    assert!(nishimori_beta(0.0).is_err());
    assert!(nishimori_beta(1.0).is_err());
}

#[test]
fn single_qubit_model() {
    let code = single_z_code();
    let id = PauliOperator::identity(1);
    let model = SpinModel::new(&code, &id, SpinMode::StabilizersOnly).unwrap();
    assert_eq!(model.terms().len(), 3);
    // H(s) = 2s + 1
    assert_eq!(model.hamiltonian(&[1]), 3.0);
    assert_eq!(model.hamiltonian(&[-1]), -1.0);
    let net = LatticeTensorNetwork::new(&model);
    let (energy, spins) = net.contract_tropical();
    assert_eq!(energy, -3.0);
    assert_eq!(spins, vec![1]);

    let p = 0.1;
    let b = nishimori_beta(p).unwrap();
    let ln_z = net.contract_partition(b).unwrap();
    let direct = ((-3.0 * b).exp() + b.exp()).ln();
    assert!((ln_z - direct).abs() < 1e-12);
    // Z ∝ P(I) + P(Z) for E = I and ∝ P(X) + P(Y) for E = X
    let x: PauliOperator = "X".parse().unwrap();
    let model_x = SpinModel::new(&code, &x, SpinMode::StabilizersOnly).unwrap();
    let ln_zx = LatticeTensorNetwork::new(&model_x).contract_partition(b).unwrap();
    let ratio = (ln_z - ln_zx).exp();
    let expected = (0.9 + 0.1 / 3.0) / (2.0 * 0.1 / 3.0);
    assert!((ratio - expected).abs() < 1e-9 * expected);
    // zero coupling counts configurations
    assert!((net.contract_partition(0.0).unwrap() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn partition_function_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..500 {
        let code = small_code(&mut rng);
        let e = random_pauli(code.num_qubits(), &mut rng);
        let mode = random_mode(&code, &mut rng);
        let model = SpinModel::new(&code, &e, mode).unwrap();
        let beta = nishimori_beta(rng.random_range(0.005..0.3)).unwrap();
        let net = LatticeTensorNetwork::new(&model);
        let ln_z = net.contract_partition(beta).unwrap();
        let oracle = exhaustive::log_partition(&model, beta);
        // relative error of Z itself
        assert!((ln_z - oracle).exp_m1().abs() < 1e-10, "{ln_z} vs {oracle}");
        let zero = net.contract_partition(0.0).unwrap();
        assert!((zero - model.num_spins() as f64 * 2f64.ln()).abs() < 1e-9);
    }
}

#[test]
fn tropical_contraction_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..500 {
        let code = small_code(&mut rng);
        let e = random_pauli(code.num_qubits(), &mut rng);
        let mode = random_mode(&code, &mut rng);
        let model = SpinModel::new(&code, &e, mode).unwrap();
        let (energy, spins) = LatticeTensorNetwork::new(&model).contract_tropical();
        let (best, argmins) = exhaustive::ground_states(&model);
        assert_eq!(energy, best);
        assert_eq!(model.ground_energy_of(&spins), best);
        assert!(argmins.contains(&spins));
    }
}

#[test]
fn trivial_syndrome_ground_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..20 {
        let code = CircuitCode::random(20, 0.25, 3, Boundary::Open, false, &mut rng).unwrap();
        let n = code.num_qubits();
        let model =
            SpinModel::new(&code, &PauliOperator::identity(n), SpinMode::AllGenerators).unwrap();
        let (energy, spins) = LatticeTensorNetwork::new(&model).contract_tropical();
        assert_eq!(energy, -3.0 * n as f64);
        assert!(spins.iter().all(|&s| s == 1));
    }
}

#[test]
fn tropical_is_the_zero_temperature_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let big = 50.0;
    for _ in 0..100 {
        let code = small_code(&mut rng);
        let e = random_pauli(code.num_qubits(), &mut rng);
        let model = SpinModel::new(&code, &e, SpinMode::StabilizersOnly).unwrap();
        let net = LatticeTensorNetwork::new(&model);
        let (energy, _) = net.contract_tropical();
        let (_, argmins) = exhaustive::ground_states(&model);
        // exp(β' H) weights, i.e. βJ = -β'
        let free = -net.contract_partition(-big).unwrap() / big;
        let degeneracy = (argmins.len() as f64).ln() / big;
        assert!((energy - (free + degeneracy)).abs() < 1e-3, "{energy} vs {free}");
    }
}

#[test]
fn flipping_a_spin_multiplies_the_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..100 {
        let code = small_code(&mut rng);
        let e = random_pauli(code.num_qubits(), &mut rng);
        let i = rng.random_range(0..code.stabilizers().len());
        let e2 = &e * &code.stabilizers()[i];
        let m1 = SpinModel::new(&code, &e, SpinMode::StabilizersOnly).unwrap();
        let m2 = SpinModel::new(&code, &e2, SpinMode::StabilizersOnly).unwrap();
        for (t1, t2) in m1.terms().iter().zip(m2.terms()) {
            assert_eq!(t1.sign != t2.sign, t1.spins.contains(&i));
        }
        let mut s: Vec<i8> = (0..m1.num_spins())
            .map(|_| if rng.random() { 1 } else { -1 })
            .collect();
        let h1 = m1.hamiltonian(&s);
        s[i] = -s[i];
        assert_eq!(m2.hamiltonian(&s), h1);
        let b = nishimori_beta(0.07).unwrap();
        let z1 = LatticeTensorNetwork::new(&m1).contract_partition(b).unwrap();
        let z2 = LatticeTensorNetwork::new(&m2).contract_partition(b).unwrap();
        assert!((z1 - z2).abs() < 1e-10);
    }
}

#[test]
fn spin_counts_per_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let code = CircuitCode::random(8, 0.25, 2, Boundary::Periodic, false, &mut rng).unwrap();
    assert_eq!(code.num_logicals(), 2);
    let e = PauliOperator::identity(8);
    let count = |mode| SpinModel::new(&code, &e, mode).unwrap().num_spins();
    assert_eq!(count(SpinMode::StabilizersOnly), 6);
    assert_eq!(count(SpinMode::ExcludeLogical(1)), 8);
    assert_eq!(count(SpinMode::AllGenerators), 10);
    assert_eq!(SpinModel::new(&code, &e, SpinMode::StabilizersOnly).unwrap().terms().len(), 24);
}

#[test]
fn nishimori_weights_are_error_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let p = 0.08;
    let b = nishimori_beta(p).unwrap();
    for _ in 0..20 {
        let code = small_code(&mut rng);
        let n = code.num_qubits();
        let mut ratio = None;
        for _ in 0..50 {
            let e = random_pauli(n, &mut rng);
            let model = SpinModel::new(&code, &e, SpinMode::StabilizersOnly).unwrap();
            let ones = vec![1i8; model.num_spins()];
            let gibbs = (-b * model.hamiltonian(&ones)).exp();
            let w = e.weight() as i32;
            let prob = (1.0 - p).powi(n as i32 - w) * (p / 3.0).powi(w);
            let r = gibbs / prob;
            let first = *ratio.get_or_insert(r);
            assert!((r - first).abs() < 1e-9 * first);
        }
    }
}

#[test]
fn network_height_is_bounded_by_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let d = 4;
    for _ in 0..100 {
        let code = CircuitCode::random(40, 0.5, d, Boundary::Open, false, &mut rng).unwrap();
        let e = PauliOperator::identity(code.num_qubits());
        let stab = SpinModel::new(&code, &e, SpinMode::StabilizersOnly).unwrap();
        assert!(LatticeTensorNetwork::new(&stab).height() <= 2 * d);
        let all = SpinModel::new(&code, &e, SpinMode::AllGenerators).unwrap();
        // each input contributes one spin, logical inputs two
        assert!(LatticeTensorNetwork::new(&all).height() <= 2 * d + d + 1);
        assert!(LatticeTensorNetwork::new(&all).frontier_width() <= 4 * d + 2);
    }
}

#[test]
fn minimum_weight_decoder_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let code = {
        let gate = rcqec_core::clifford::css_gate_set()[1];
        let circuit = BrickworkCircuit::from_layers(
            2,
            Boundary::Open,
            vec![vec![rcqec_core::code::PlacedGate { a: 0, b: 1, gate }]],
        );
        // stabilizer from qubit 1 becomes ZZ, logical X̄ = XX, Z̄ = Z on qubit 0
        let layout = InputLayout {
            roles: vec![Role::Logical, Role::ZStabilizer],
            k: 1,
            padding: 0,
        };
        CircuitCode::derive(circuit, layout).unwrap()
    };
    assert_eq!(code.stabilizers()[0], "ZZ".parse().unwrap());
    assert_eq!(code.logical_x()[0], "XX".parse().unwrap());
    let fix = minimum_weight_decode(&code, &BitVec::from_bools([true])).unwrap();
    assert_eq!(fix.weight(), 1);
    assert_eq!(code.syndrome(&fix).unwrap(), BitVec::from_bools([true]));

    for _ in 0..1000 {
        let code = small_code(&mut rng);
        let e = random_pauli(code.num_qubits(), &mut rng);
        let s = code.syndrome(&e).unwrap();
        let fix = minimum_weight_decode(&code, &s).unwrap();
        assert_eq!(code.syndrome(&fix).unwrap(), s);
        assert_eq!(fix.weight(), exhaustive::min_weight_with_syndrome(&code, &s));
    }
    let code = small_code(&mut rng);
    let zero = BitVec::zeros(code.stabilizers().len());
    assert_eq!(minimum_weight_decode(&code, &zero).unwrap().weight(), 0);
}

#[test]
fn marginal_decoder_matches_exhaustive_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut checked = 0;
    while checked < 500 {
        let code = small_code(&mut rng);
        if code.num_logicals() > 2 {
            continue;
        }
        let p = rng.random_range(0.01..0.2);
        let e = depolarizing(code.num_qubits(), p, &mut rng);
        let s = code.syndrome(&e).unwrap();
        let logs = marginal_log_partitions(&code, &s, p).unwrap();
        let oracle = exhaustive::marginals(&code, &s, p);
        let decoded = marginal_decode(&code, &s, p).unwrap();
        for j in 0..code.num_logicals() {
            // Z_{E,j}(σ) is proportional to P_j(σ) with one constant per j
            for c in 1..4 {
                let lhs = logs[j][c] - logs[j][0];
                let rhs = (oracle[j][c] / oracle[j][0]).ln();
                assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
            }
            let total: f64 = oracle[j].iter().sum();
            let best = oracle[j].iter().cloned().fold(0.0, f64::max);
            let idx = [
                rcqec_core::Pauli::I,
                rcqec_core::Pauli::X,
                rcqec_core::Pauli::Y,
                rcqec_core::Pauli::Z,
            ]
            .iter()
            .position(|&x| x == decoded[j])
            .unwrap();
            assert!(oracle[j][idx] >= best * (1.0 - 1e-12), "marginal argmax");
            assert!(total > 0.0);
        }
        checked += 1;
    }
}

#[test]
fn trivial_syndrome_decodes_to_identity_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    for _ in 0..100 {
        let code = small_code(&mut rng);
        let zero = BitVec::zeros(code.stabilizers().len());
        let classes = marginal_decode(&code, &zero, 0.01).unwrap();
        assert!(classes.iter().all(|&c| c == rcqec_core::Pauli::I));
    }
}

proptest! {
    #[test]
    fn tropical_semiring_axioms(a in -50i32..50, b in -50i32..50, c in -50i32..50) {
        let (a, b, c) = (a as f64, b as f64, c as f64);
        let add = f64::min;
        prop_assert_eq!(add(add(a, b), c), add(a, add(b, c)));
        prop_assert_eq!(a + add(b, c), add(a + b, a + c));
        prop_assert_eq!(add(a, f64::INFINITY), a);
        prop_assert_eq!(a + 0.0, a);
    }
}
