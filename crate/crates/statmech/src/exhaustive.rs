//! Brute-force references for small instances.
//!
//! These enumerate spin configurations or all `4^n` Paulis directly and
//! share no code with the network contraction.

use rcqec_core::{BitVec, CircuitCode, Pauli, PauliOperator};

use crate::model::SpinModel;

/// `(x, z)` bit masks of an operator on at most 16 qubits.
fn masks(p: &PauliOperator) -> (u32, u32) {
    assert!(p.num_qubits() <= 16, "exhaustive routines need n <= 16");
    let mut x = 0u32;
    let mut z = 0u32;
    for q in 0..p.num_qubits() {
        x |= (p.x_bits().get(q) as u32) << q;
        z |= (p.z_bits().get(q) as u32) << q;
    }
    (x, z)
}

#[inline]
fn anticommute(a: (u32, u32), b: (u32, u32)) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1
}

/// `F_s`: error times the generators with `s_i = -1`, as bit masks.
fn configuration_error(model: &SpinModel, config: u64) -> (u32, u32) {
    let mut e = masks(model.error());
    for (i, g) in model.generators().iter().enumerate() {
        if config >> i & 1 == 1 {
            let m = masks(g);
            e.0 ^= m.0;
            e.1 ^= m.1;
        }
    }
    e
}

fn spins_of(config: u64, num_spins: usize) -> Vec<i8> {
    (0..num_spins)
        .map(|i| if config >> i & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// `ln Σ_s exp(-βJ H(s))` with `H(s) = 3n - 4 wt(F_s)` evaluated from the
/// Pauli weight of each configuration.
pub fn log_partition(model: &SpinModel, beta_j: f64) -> f64 {
    let n = model.error().num_qubits() as f64;
    let m = model.num_spins();
    assert!(m <= 24, "too many spins to enumerate");
    let energies: Vec<f64> = (0..1u64 << m)
        .map(|c| {
            let (x, z) = configuration_error(model, c);
            3.0 * n - 4.0 * (x | z).count_ones() as f64
        })
        .collect();
    let scale = energies
        .iter()
        .map(|&h| -beta_j * h)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = energies.iter().map(|&h| (-beta_j * h - scale).exp()).sum();
    scale + sum.ln()
}

/// Minimum of `-H(s)` over all configurations, its degeneracy and every
/// minimizing configuration.
pub fn ground_states(model: &SpinModel) -> (f64, Vec<Vec<i8>>) {
    let n = model.error().num_qubits() as f64;
    let m = model.num_spins();
    assert!(m <= 24, "too many spins to enumerate");
    let mut best = f64::INFINITY;
    let mut argmins = Vec::new();
    for c in 0..1u64 << m {
        let (x, z) = configuration_error(model, c);
        let e = 4.0 * (x | z).count_ones() as f64 - 3.0 * n;
        if e < best {
            best = e;
            argmins.clear();
        }
        if e == best {
            argmins.push(spins_of(c, m));
        }
    }
    (best, argmins)
}

fn syndrome_masks(code: &CircuitCode) -> Vec<(u32, u32)> {
    code.stabilizers().iter().map(masks).collect()
}

fn syndrome_matches(stabs: &[(u32, u32)], e: (u32, u32), s: &BitVec) -> bool {
    stabs
        .iter()
        .enumerate()
        .all(|(i, &st)| anticommute(st, e) == s.get(i))
}

/// Minimum weight over every Pauli with syndrome `s` (all `4^n` scanned).
pub fn min_weight_with_syndrome(code: &CircuitCode, s: &BitVec) -> usize {
    let n = code.num_qubits();
    assert!(n <= 10, "4^n enumeration limited to n <= 10");
    let stabs = syndrome_masks(code);
    let mut best = usize::MAX;
    for x in 0u32..1 << n {
        for z in 0u32..1 << n {
            let w = (x | z).count_ones() as usize;
            if w < best && syndrome_matches(&stabs, (x, z), s) {
                best = w;
            }
        }
    }
    best
}

/// Marginal probabilities `P_j(σ)` of each logical class relative to `C_s`,
/// under depolarizing noise of rate `p`, summed over all `4^n` Paulis.
pub fn marginals(code: &CircuitCode, s: &BitVec, p: f64) -> Vec<[f64; 4]> {
    let n = code.num_qubits();
    assert!(n <= 10, "4^n enumeration limited to n <= 10");
    let stabs = syndrome_masks(code);
    let c_s = masks(&code.canonical_error(s).expect("syndrome length matches"));
    let lx: Vec<(u32, u32)> = code.logical_x().iter().map(masks).collect();
    let lz: Vec<(u32, u32)> = code.logical_z().iter().map(masks).collect();
    let k = lx.len();
    let mut out = vec![[0.0f64; 4]; k];
    for x in 0u32..1 << n {
        for z in 0u32..1 << n {
            let e = (x, z);
            if !syndrome_matches(&stabs, e, s) {
                continue;
            }
            let w = (x | z).count_ones() as i32;
            let prob = (1.0 - p).powi(n as i32 - w) * (p / 3.0).powi(w);
            let rel = (x ^ c_s.0, z ^ c_s.1);
            for j in 0..k {
                let has_x = anticommute(rel, lz[j]);
                let has_z = anticommute(rel, lx[j]);
                let idx = match Pauli::from_bits(has_x, has_z) {
                    Pauli::I => 0,
                    Pauli::X => 1,
                    Pauli::Y => 2,
                    Pauli::Z => 3,
                };
                out[j][idx] += prob;
            }
        }
    }
    out
}
