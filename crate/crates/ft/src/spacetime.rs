//! Located Clifford circuits, fault operators and their propagation.
//!
//! Levels run `0..=Δ`. Layer `ℓ` (for `ℓ = 1..=Δ`) maps level `ℓ-1` to level
//! `ℓ`. The fault slice `ℓ` sits just after level `ℓ`, so a fault in slice
//! `ℓ` is seen by every measurement read out at slice `ℓ` or later.

use std::collections::BTreeMap;

use rcqec_core::{CliffordTableau, PauliOperator, PlacedGate};

use crate::FtError;

const NO_GATE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct LocatedCircuit {
    n: usize,
    layers: Vec<Vec<PlacedGate>>,
    /// Per layer, qubit -> index of the gate acting on it.
    gate_of: Vec<Vec<u32>>,
}

impl LocatedCircuit {
    pub fn new(n: usize, layers: Vec<Vec<PlacedGate>>) -> Result<Self, FtError> {
        let mut gate_of = Vec::with_capacity(layers.len());
        for (l, layer) in layers.iter().enumerate() {
            let mut map = vec![NO_GATE; n];
            for (i, g) in layer.iter().enumerate() {
                if g.a >= n || g.b >= n || g.a == g.b {
                    return Err(FtError::InvalidCircuit(format!(
                        "layer {}: gate on ({}, {})",
                        l + 1,
                        g.a,
                        g.b
                    )));
                }
                for q in [g.a, g.b] {
                    if map[q] != NO_GATE {
                        return Err(FtError::InvalidCircuit(format!(
                            "layer {}: qubit {q} used twice",
                            l + 1
                        )));
                    }
                    map[q] = i as u32;
                }
            }
            gate_of.push(map);
        }
        Ok(Self { n, layers, gate_of })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// `Δ`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Gates of layer `ℓ`, `1 <= ℓ <= Δ`.
    pub fn layer(&self, l: usize) -> &[PlacedGate] {
        &self.layers[l - 1]
    }

    pub fn num_locations(&self) -> usize {
        self.n * (self.depth() + 1)
    }

    /// `P <- U_ℓ P U_ℓ†`.
    pub fn apply_layer(&self, l: usize, p: &mut PauliOperator) {
        for g in &self.layers[l - 1] {
            g.gate.apply(p, g.a, g.b);
        }
    }

    /// `P <- U_ℓ† P U_ℓ`.
    pub fn apply_layer_inverse(&self, l: usize, p: &mut PauliOperator) {
        for g in &self.layers[l - 1] {
            g.gate.apply_inverse(p, g.a, g.b);
        }
    }

    /// Tableau of `U_ℓ`.
    pub fn layer_tableau(&self, l: usize) -> CliffordTableau {
        let mut t = CliffordTableau::identity(self.n);
        for g in &self.layers[l - 1] {
            let u = CliffordTableau::from_two_qubit(self.n, &g.gate, g.a, g.b);
            t = t.then(&u).expect("same size");
        }
        t
    }

    /// `U_{i,j} = U_j ··· U_{i+1}`; identity when `i == j`.
    pub fn span_tableau(&self, i: usize, j: usize) -> CliffordTableau {
        assert!(i <= j && j <= self.depth());
        let mut t = CliffordTableau::identity(self.n);
        for l in i + 1..=j {
            t = t.then(&self.layer_tableau(l)).expect("same size");
        }
        t
    }

    /// Conjugates a phase-free sparse Pauli through layer `ℓ`.
    pub fn apply_layer_sparse(&self, l: usize, p: &mut SparsePauli) {
        let map = &self.gate_of[l - 1];
        let layer = &self.layers[l - 1];
        let mut touched: Vec<u32> = p
            .bits
            .keys()
            .map(|&q| map[q])
            .filter(|&g| g != NO_GATE)
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for gi in touched {
            let g = &layer[gi as usize];
            let a = p.bits.remove(&g.a).unwrap_or(0);
            let b = p.bits.remove(&g.b).unwrap_or(0);
            let out = g.gate.map_pattern(a | b << 2);
            if out & 3 != 0 {
                p.bits.insert(g.a, out & 3);
            }
            if out >> 2 != 0 {
                p.bits.insert(g.b, out >> 2);
            }
        }
    }
}

/// Phase-free Pauli stored as `qubit -> x | z << 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePauli {
    pub bits: BTreeMap<usize, u8>,
}

impl SparsePauli {
    pub fn single(q: usize, x: bool, z: bool) -> Self {
        let mut bits = BTreeMap::new();
        let v = x as u8 | (z as u8) << 1;
        if v != 0 {
            bits.insert(q, v);
        }
        Self { bits }
    }

    pub fn is_identity(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.bits.len()
    }

    pub fn to_dense(&self, n: usize) -> PauliOperator {
        let mut p = PauliOperator::identity(n);
        for (&q, &v) in &self.bits {
            p.x_bits_mut().set(q, v & 1 == 1);
            p.z_bits_mut().set(q, v & 2 == 2);
        }
        p
    }
}

/// Pauli slices `F_ℓ`, `ℓ = 0..=Δ`, on `n` qubits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultOperator {
    pub slices: Vec<PauliOperator>,
}

impl FaultOperator {
    pub fn identity(n: usize, depth: usize) -> Self {
        Self {
            slices: vec![PauliOperator::identity(n); depth + 1],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.slices[0].num_qubits()
    }

    pub fn depth(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn weight(&self) -> usize {
        self.slices.iter().map(PauliOperator::weight).sum()
    }

    /// Parity of the slice-wise anticommutations.
    pub fn anticommutes_with(&self, other: &FaultOperator) -> bool {
        assert_eq!(self.slices.len(), other.slices.len());
        self.slices
            .iter()
            .zip(&other.slices)
            .filter(|(a, b)| a.anticommutes_with(b))
            .count()
            % 2
            == 1
    }

    pub fn mul_assign(&mut self, other: &FaultOperator) {
        for (a, b) in self.slices.iter_mut().zip(&other.slices) {
            a.mul_assign_right(b);
        }
    }
}

fn check_dims(c: &LocatedCircuit, f: &FaultOperator) -> Result<(), FtError> {
    if f.num_qubits() != c.num_qubits() || f.depth() != c.depth() {
        return Err(FtError::InvalidCircuit(format!(
            "fault of {} qubits x {} slices on a circuit of {} qubits x {} slices",
            f.num_qubits(),
            f.slices.len(),
            c.num_qubits(),
            c.depth() + 1
        )));
    }
    Ok(())
}

/// `→F_ℓ = Π_{i<=ℓ} U_{i,ℓ} F_i U_{i,ℓ}†`, computed as a running product.
pub fn cumulant(c: &LocatedCircuit, f: &FaultOperator) -> Result<FaultOperator, FtError> {
    check_dims(c, f)?;
    let mut out = Vec::with_capacity(f.slices.len());
    let mut acc = f.slices[0].clone();
    out.push(acc.clone());
    for l in 1..=c.depth() {
        c.apply_layer(l, &mut acc);
        acc.mul_assign_right(&f.slices[l]);
        out.push(acc.clone());
    }
    Ok(FaultOperator { slices: out })
}

/// `←F_ℓ = Π_{j>=ℓ} U_{ℓ,j}† F_j U_{ℓ,j}`, computed as a running product.
pub fn back_cumulant(c: &LocatedCircuit, f: &FaultOperator) -> Result<FaultOperator, FtError> {
    check_dims(c, f)?;
    let depth = c.depth();
    let mut out = vec![PauliOperator::identity(c.num_qubits()); depth + 1];
    let mut acc = f.slices[depth].clone();
    out[depth] = acc.clone();
    for l in (0..depth).rev() {
        c.apply_layer_inverse(l + 1, &mut acc);
        acc.mul_assign_right(&f.slices[l]);
        out[l] = acc.clone();
    }
    Ok(FaultOperator { slices: out })
}
