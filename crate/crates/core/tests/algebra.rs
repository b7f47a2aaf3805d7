use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcqec_core::clifford::{
    css_gate_set, sample_css_two_qubit_gate, sample_two_qubit_clifford, two_qubit_group,
};
use rcqec_core::gf2::BitVec;
use rcqec_core::state::canonicalize;
use rcqec_core::{CliffordTableau, MixedStabilizerState, Pauli, PauliOperator, TwoQubitClifford};

fn key(t: &CliffordTableau) -> (Vec<BitVec>, BitVec) {
    (t.symplectic_rows(), t.signs())
}

/// Group generated by H, S and CNOT, built by multiplying full tableaus.
fn tableau_closure() -> HashSet<(Vec<BitVec>, BitVec)> {
    let gens = [
        CliffordTableau::hadamard(2, 0),
        CliffordTableau::hadamard(2, 1),
        CliffordTableau::phase_gate(2, 0),
        CliffordTableau::phase_gate(2, 1),
        CliffordTableau::cnot(2, 0, 1),
    ];
    let mut seen = HashSet::new();
    let mut queue = vec![CliffordTableau::identity(2)];
    seen.insert(key(&queue[0]));
    while let Some(t) = queue.pop() {
        for g in &gens {
            let next = t.then(g).unwrap();
            if seen.insert(key(&next)) {
                queue.push(next);
            }
        }
    }
    seen
}

/// `MᵀΛM` with `M` holding the image of basis vector `j` in column `j`.
fn symplectic_form_preserved(t: &CliffordTableau) -> bool {
    let n = t.num_qubits();
    let rows = t.symplectic_rows();
    // image of basis element j as a 2n vector (x | z)
    let form = |u: &BitVec, v: &BitVec| {
        let mut acc = false;
        for q in 0..n {
            acc ^= (u.get(q) && v.get(n + q)) ^ (u.get(n + q) && v.get(q));
        }
        acc
    };
    for i in 0..2 * n {
        for j in 0..2 * n {
            // basis order X_0, Z_0, ...: Λ pairs 2q with 2q + 1
            let expected = i / 2 == j / 2 && i != j;
            if form(&rows[i], &rows[j]) != expected {
                return false;
            }
        }
    }
    true
}

#[test]
fn two_qubit_group_matches_tableau_closure() {
    let closure = tableau_closure();
    assert_eq!(closure.len(), 11520);
    let table: HashSet<_> = two_qubit_group().iter().map(|g| key(&g.to_tableau())).collect();
    assert_eq!(table.len(), 11520);
    assert_eq!(table, closure);
    assert!(two_qubit_group()
        .iter()
        .all(|g| symplectic_form_preserved(&g.to_tableau())));
}

#[test]
fn sampling_is_uniform() {
    let index: HashMap<(u16, u8), usize> = two_qubit_group()
        .iter()
        .enumerate()
        .map(|(i, g)| ((g.symplectic_key(), g.sign_key()), i))
        .collect();
    let mut counts = vec![0u32; index.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples = 1_000_000usize;
    for _ in 0..samples {
        let g = sample_two_qubit_clifford(&mut rng);
        counts[index[&(g.symplectic_key(), g.sign_key())]] += 1;
    }
    let expected = samples as f64 / counts.len() as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (counts.len() - 1) as f64;
    assert!((chi2 - dof).abs() < 5.0 * (2.0 * dof).sqrt(), "chi2 = {chi2}");
}

#[test]
fn css_gates_are_the_invertible_binary_matrices() {
    // every invertible 2x2 matrix over GF(2), as images of X_0 and X_1
    let mut invertible = HashSet::new();
    for m in 0u8..16 {
        let (a, b, c, d) = (m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1);
        if (a * d + b * c) % 2 == 1 {
            invertible.insert(m);
        }
    }
    assert_eq!(invertible.len(), 6);
    let x_action = |g: &TwoQubitClifford| {
        let t = g.to_tableau();
        let x0 = t.image_of_x(0).x_bits();
        let x1 = t.image_of_x(1).x_bits();
        (x0.get(0) as u8) | (x0.get(1) as u8) << 1 | (x1.get(0) as u8) << 2 | (x1.get(1) as u8) << 3
    };
    let found: HashSet<u8> = css_gate_set().iter().map(x_action).collect();
    assert_eq!(found, invertible);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xi: PauliOperator = "XI".parse().unwrap();
    let zi: PauliOperator = "ZI".parse().unwrap();
    let mut sampled = HashSet::new();
    for _ in 0..500 {
        let g = sample_css_two_qubit_gate(&mut rng);
        let mut a = xi.clone();
        g.apply(&mut a, 0, 1);
        assert!(a.z_bits().is_zero());
        let mut b = zi.clone();
        g.apply(&mut b, 0, 1);
        assert!(b.x_bits().is_zero());
        sampled.insert(x_action(&g));
    }
    assert_eq!(sampled.len(), 6);
}

fn group_elements(gens: &[PauliOperator], n: usize) -> HashSet<String> {
    let mut out = HashSet::new();
    for mask in 0u32..(1 << gens.len()) {
        let mut p = PauliOperator::identity(n);
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p.mul_assign_right(g);
            }
        }
        out.insert(p.to_string());
    }
    out
}

#[test]
fn canonicalize_preserves_the_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 6;
    for _ in 0..100 {
        let mut s = MixedStabilizerState::zero(n);
        for _ in 0..12 {
            let a = rng.random_range(0..n - 1);
            s.apply_two_qubit(&sample_two_qubit_clifford(&mut rng), a, a + 1);
        }
        // a redundant, commuting list: generators plus random products
        let mut gens: Vec<PauliOperator> = s.generators()[..4].to_vec();
        for _ in 0..3 {
            let mut p = PauliOperator::identity(n);
            for g in &s.generators()[..4] {
                if rng.random() {
                    p.mul_assign_right(g);
                }
            }
            gens.push(p);
        }
        let canon = canonicalize(&gens).unwrap();
        assert_eq!(canon.len(), 4);
        assert_eq!(group_elements(&canon, n), group_elements(&gens, n));
        assert_eq!(canonicalize(&gens).unwrap(), canon);
    }
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
    (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(letters, phase)| {
        let ls: Vec<Pauli> = letters
            .iter()
            .map(|&l| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l as usize])
            .collect();
        let mut p = PauliOperator::from_letters(&ls);
        p.add_phase(phase);
        p
    })
}

fn arb_tableau(n: usize) -> impl Strategy<Value = CliffordTableau> {
    prop::collection::vec((0usize..11520, 0usize..n, 1usize..n), 1..8).prop_map(move |gates| {
        let mut t = CliffordTableau::identity(n);
        for (g, a, off) in gates {
            let b = (a + off) % n;
            let layer = CliffordTableau::from_two_qubit(n, &two_qubit_group()[g], a, b);
            t = t.then(&layer).unwrap();
        }
        t
    })
}

proptest! {
    #[test]
    fn multiplication_is_associative(a in arb_pauli(5), b in arb_pauli(5), c in arb_pauli(5)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn inverse_gives_identity(a in arb_pauli(6)) {
        let id = &a * &a.inverse();
        prop_assert!(id.is_identity_up_to_phase());
        prop_assert_eq!(id.phase(), 0);
        prop_assert!(a.weight() <= 6);
    }

    #[test]
    fn conjugation_preserves_commutation(
        t in arb_tableau(4),
        p in arb_pauli(4),
        q in arb_pauli(4),
    ) {
        let up = t.conjugate(&p).unwrap();
        let uq = t.conjugate(&q).unwrap();
        prop_assert_eq!(up.anticommutes_with(&uq), p.anticommutes_with(&q));
        prop_assert!(symplectic_form_preserved(&t));
        prop_assert_eq!(t.inverse().conjugate(&up).unwrap(), p);
    }

    #[test]
    fn erasure_is_idempotent_and_raises_entropy(
        seed in any::<u64>(),
        erased in prop::collection::vec(0usize..6, 0..4),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = MixedStabilizerState::zero(6);
        for _ in 0..10 {
            let a = rng.random_range(0..5);
            s.apply_two_qubit(&sample_two_qubit_clifford(&mut rng), a, a + 1);
        }
        let before = s.entropy();
        s.erase(&erased);
        let once = s.canonical_generators();
        prop_assert!(s.entropy() >= before);
        s.erase(&erased);
        prop_assert_eq!(s.canonical_generators(), once);
    }
}

#[test]
fn erase_all_and_nothing() {
    let mut s = MixedStabilizerState::zero(5);
    let copy = s.clone();
    s.erase(&[]);
    assert_eq!(s, copy);
    s.erase(&[0, 1, 2, 3, 4]);
    assert_eq!(s.entropy(), 5);
}
