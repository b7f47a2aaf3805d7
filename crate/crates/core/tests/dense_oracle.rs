//! Stabilizer simulation checked against explicit density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcqec_core::clifford::sample_two_qubit_clifford;
use rcqec_core::state::Basis;
use rcqec_core::{MixedStabilizerState, PauliOperator};

type M = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

/// Qubit 0 is the most significant tensor factor.
fn pauli_matrix(p: &PauliOperator) -> M {
    let i2 = M::identity(2, 2);
    let x = M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let z = M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    let mut out = M::identity(1, 1);
    for q in 0..p.num_qubits() {
        let mut f = i2.clone();
        if p.x_bits().get(q) {
            f = &f * &x;
        }
        if p.z_bits().get(q) {
            f = &f * &z;
        }
        out = kron(&out, &f);
    }
    let phase = [c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)][p.phase() as usize];
    out * phase
}

fn density(state: &MixedStabilizerState) -> M {
    let n = state.num_qubits();
    let dim = 1usize << n;
    let mut rho = M::identity(dim, dim);
    for g in state.generators() {
        rho = &rho * (M::identity(dim, dim) + pauli_matrix(g)) * c(0.5, 0.);
    }
    let tr = rho.trace();
    rho / tr
}

fn von_neumann_bits(rho: &M) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Partial trace keeping `keep` (sorted).
fn partial_trace(rho: &M, n: usize, keep: &[usize]) -> M {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let mut out = M::zeros(dk, dk);
    let compose = |kbits: usize, tbits: usize| {
        let mut idx = 0usize;
        for (i, &q) in keep.iter().enumerate() {
            idx |= ((kbits >> (keep.len() - 1 - i)) & 1) << (n - 1 - q);
        }
        for (i, &q) in traced.iter().enumerate() {
            idx |= ((tbits >> (traced.len() - 1 - i)) & 1) << (n - 1 - q);
        }
        idx
    };
    for a in 0..dk {
        for b in 0..dk {
            let mut s = c(0., 0.);
            for t in 0..(1usize << traced.len()) {
                s += rho[(compose(a, t), compose(b, t))];
            }
            out[(a, b)] = s;
        }
    }
    out
}

fn close(a: &M, b: &M) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-9)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> MixedStabilizerState {
    let mut s = MixedStabilizerState::zero(n);
    if n == 1 {
        if rng.random() {
            s.apply_hadamard(0);
        }
        if rng.random_bool(0.3) {
            s.erase(&[0]);
        }
        return s;
    }
    for _ in 0..3 * n {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        s.apply_two_qubit(&sample_two_qubit_clifford(rng), a, b);
    }
    let erased: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.25)).collect();
    s.erase(&erased);
    for _ in 0..2 {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        s.apply_two_qubit(&sample_two_qubit_clifford(rng), a, b);
    }
    s
}

fn random_hermitian_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
    let mut p = PauliOperator::identity(n);
    for q in 0..n {
        p.x_bits_mut().set(q, rng.random());
        p.z_bits_mut().set(q, rng.random());
    }
    p.set_sign(if rng.random() { 1 } else { -1 });
    p
}

#[test]
fn entropy_matches_density_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        for _ in 0..40 {
            let s = random_state(n, &mut rng);
            let rho = density(&s);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let s_dense = von_neumann_bits(&rho);
            assert!((s_dense - s.entropy() as f64).abs() < 1e-8, "n={n}");
        }
    }
}

#[test]
fn reduced_entropy_matches_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=5 {
        for _ in 0..30 {
            let s = random_state(n, &mut rng);
            let rho = density(&s);
            let subset: Vec<usize> = (0..n).filter(|_| rng.random()).collect();
            let reduced = partial_trace(&rho, n, &subset);
            let dense = von_neumann_bits(&reduced);
            assert!(
                (dense - s.reduced_entropy(&subset) as f64).abs() < 1e-8,
                "n={n} subset={subset:?}"
            );
        }
    }
}

#[test]
fn erasing_one_ghz_qubit() {
    let ghz = MixedStabilizerState::from_generators(
        3,
        vec!["XXX".parse().unwrap(), "ZZI".parse().unwrap(), "IZZ".parse().unwrap()],
    )
    .unwrap();
    let rho = density(&ghz);
    for q in 0..3 {
        let mut s = ghz.clone();
        s.erase(&[q]);
        let keep: Vec<usize> = (0..3).filter(|&i| i != q).collect();
        let reduced = partial_trace(&rho, 3, &keep);
        // reinsert a maximally mixed qubit at position q
        let mixed = M::identity(2, 2) * c(0.5, 0.);
        let expected = match q {
            0 => kron(&mixed, &reduced),
            2 => kron(&reduced, &mixed),
            _ => {
                // reorder (0, 2, 1) -> (0, 1, 2)
                let full = kron(&reduced, &mixed);
                let perm = |i: usize| ((i >> 2) & 1) << 2 | (i & 1) << 1 | ((i >> 1) & 1);
                M::from_fn(8, 8, |a, b| full[(perm(a), perm(b))])
            }
        };
        assert!(close(&density(&s), &expected), "q={q}");
        assert!((von_neumann_bits(&density(&s)) - s.entropy() as f64).abs() < 1e-9);
    }
}

#[test]
fn measurement_follows_born_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=4 {
        for _ in 0..50 {
            let s = random_state(n, &mut rng);
            let p = random_hermitian_pauli(n, &mut rng);
            let rho = density(&s);
            let dim = 1 << n;
            let proj_plus = (M::identity(dim, dim) + pauli_matrix(&p)) * c(0.5, 0.);
            let prob_plus = (&proj_plus * &rho).trace().re;
            let mut seen = [false; 2];
            for shot in 0..64 {
                let mut t = s.clone();
                let mut shot_rng = ChaCha8Rng::seed_from_u64(shot);
                let outcome = t.measure_pauli(&p, &mut shot_rng).unwrap();
                let proj = (M::identity(dim, dim) + pauli_matrix(&p) * c(outcome as f64, 0.))
                    * c(0.5, 0.);
                let prob = (&proj * &rho).trace().re;
                assert!(prob > 1e-9, "impossible outcome");
                let post = &proj * &rho * &proj / c(prob, 0.);
                assert!(close(&post, &density(&t)));
                seen[(outcome < 0) as usize] = true;
            }
            if (prob_plus - 0.5).abs() < 1e-9 {
                assert!(seen[0] && seen[1], "uniform outcome expected");
            } else {
                assert!(prob_plus < 1e-9 || prob_plus > 1.0 - 1e-9);
            }
        }
    }
}

#[test]
fn measurement_statistics_over_many_shots() {
    // X on |0>: both outcomes with frequency close to 1/2
    let x: PauliOperator = "X".parse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let shots = 20000;
    let minus = (0..shots)
        .filter(|_| {
            let mut s = MixedStabilizerState::zero(1);
            s.measure_pauli(&x, &mut rng).unwrap() == -1
        })
        .count();
    let frac = minus as f64 / shots as f64;
    assert!((frac - 0.5).abs() < 5.0 * (0.25f64 / shots as f64).sqrt());
}

#[test]
fn measure_and_discard_matches_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in 2..=5 {
        for _ in 0..40 {
            let s = random_state(n, &mut rng);
            let rho = density(&s);
            let measured: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            let basis = if rng.random() { Basis::Z } else { Basis::X };
            let mut t = s.clone();
            let bits = t.measure_and_discard(&measured, basis, &mut rng);
            let dim = 1 << n;
            let mut proj = M::identity(dim, dim);
            for (i, &q) in measured.iter().enumerate() {
                let mut p = match basis {
                    Basis::Z => PauliOperator::z_type(n, &[q]),
                    Basis::X => PauliOperator::x_type(n, &[q]),
                };
                if bits.get(i) {
                    p.negate();
                }
                proj = &proj * (M::identity(dim, dim) + pauli_matrix(&p)) * c(0.5, 0.);
            }
            let prob = (&proj * &rho).trace().re;
            assert!(prob > 1e-9, "sampled outcome has zero probability");
            let post = &proj * &rho * &proj / c(prob, 0.);
            let keep: Vec<usize> = (0..n).filter(|q| !measured.contains(q)).collect();
            let reduced = partial_trace(&post, n, &keep);
            if keep.is_empty() {
                assert_eq!(t.num_qubits(), 0);
            } else {
                assert!(close(&reduced, &density(&t)));
            }
        }
    }
}
