//! Mixed stabilizer states: `r <= n` independent commuting generators.

use rand::Rng;

use crate::clifford::{CliffordTableau, TwoQubitClifford};
use crate::gf2::{self, BitVec};
use crate::pauli::PauliOperator;
use crate::Error;

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

#[inline]
fn col_bit(p: &PauliOperator, col: usize, n: usize) -> bool {
    if col < n {
        p.x_bits().get(col)
    } else {
        p.z_bits().get(col - n)
    }
}

/// Gauss-Jordan elimination on the given symplectic columns (`c < n` is the
/// x-bit of qubit `c`, `c >= n` the z-bit of qubit `c - n`). Pivot rows are
/// moved to the front in column order; returns their count.
fn eliminate(rows: &mut [PauliOperator], cols: &[usize], n: usize) -> usize {
    let mut rank = 0;
    for &c in cols {
        if rank == rows.len() {
            break;
        }
        let Some(found) = (rank..rows.len()).find(|&i| col_bit(&rows[i], c, n)) else {
            continue;
        };
        rows.swap(rank, found);
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot, tail) = tail.split_first_mut().expect("pivot row exists");
        let pivot = &*pivot;
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if col_bit(row, c, n) {
                row.mul_assign_right(pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Canonical independent generating set of the group generated by `gens`.
///
/// Rows are brought to reduced echelon form with pivots on the x block first
/// and then the z block; duplicates and dependent elements are removed.
pub fn canonicalize(gens: &[PauliOperator]) -> Result<Vec<PauliOperator>, Error> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let n = first.num_qubits();
    for (i, a) in gens.iter().enumerate() {
        if a.num_qubits() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: a.num_qubits(),
            });
        }
        if !a.is_hermitian() {
            return Err(Error::InvalidArgument("generators must be Hermitian".into()));
        }
        if gens[..i].iter().any(|b| a.anticommutes_with(b)) {
            return Err(Error::AntiCommuting);
        }
    }
    let mut rows = gens.to_vec();
    let cols: Vec<usize> = (0..2 * n).collect();
    let rank = eliminate(&mut rows, &cols, n);
    if rows[rank..].iter().any(|r| r.phase() != 0) {
        return Err(Error::InvalidArgument("generators contain -I".into()));
    }
    rows.truncate(rank);
    Ok(rows)
}

/// Mixed stabilizer state `ρ ∝ Π (I + g_i)/2` on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStabilizerState {
    n: usize,
    gens: Vec<PauliOperator>,
}

impl MixedStabilizerState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            gens: (0..n).map(|q| PauliOperator::z_type(n, &[q])).collect(),
        }
    }

    /// `|+…+⟩`.
    pub fn plus(n: usize) -> Self {
        Self {
            n,
            gens: (0..n).map(|q| PauliOperator::x_type(n, &[q])).collect(),
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { n, gens: Vec::new() }
    }

    /// Product state with qubit `q` in `|0⟩` (`Basis::Z`) or `|+⟩` (`Basis::X`).
    pub fn product(bases: &[Basis]) -> Self {
        let n = bases.len();
        let gens = bases
            .iter()
            .enumerate()
            .map(|(q, b)| match b {
                Basis::Z => PauliOperator::z_type(n, &[q]),
                Basis::X => PauliOperator::x_type(n, &[q]),
            })
            .collect();
        Self { n, gens }
    }

    /// Validates that `gens` are Hermitian, commuting and independent.
    pub fn from_generators(n: usize, gens: Vec<PauliOperator>) -> Result<Self, Error> {
        if let Some(g) = gens.iter().find(|g| g.num_qubits() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: g.num_qubits(),
            });
        }
        let canon = canonicalize(&gens)?;
        if canon.len() != gens.len() {
            return Err(Error::InvalidArgument("generators are not independent".into()));
        }
        Ok(Self { n, gens })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn generators(&self) -> &[PauliOperator] {
        &self.gens
    }

    /// Number of independent generators `r`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// von Neumann entropy in bits, `n - r`.
    #[inline]
    pub fn entropy(&self) -> usize {
        self.n - self.gens.len()
    }

    pub fn canonical_generators(&self) -> Vec<PauliOperator> {
        canonicalize(&self.gens).expect("state generators are valid")
    }

    /// Entropy of the reduced state on `subset`.
    pub fn reduced_entropy(&self, subset: &[usize]) -> usize {
        let mut in_a = vec![false; self.n];
        for &q in subset {
            in_a[q] = true;
        }
        let size_a = in_a.iter().filter(|&&b| b).count();
        let comp: Vec<usize> = (0..self.n).filter(|&q| !in_a[q]).collect();
        let rows: Vec<BitVec> = self
            .gens
            .iter()
            .map(|g| g.x_bits().select(&comp).concat(&g.z_bits().select(&comp)))
            .collect();
        let rank_comp = gf2::rank(&rows);
        size_a - (self.gens.len() - rank_comp)
    }

    /// If `p` is in the group up to sign, returns that sign.
    pub fn group_sign(&self, p: &PauliOperator) -> Option<i8> {
        assert_eq!(p.num_qubits(), self.n, "Pauli size mismatch");
        let mut rows = self.gens.clone();
        let cols: Vec<usize> = (0..2 * self.n).collect();
        let rank = eliminate(&mut rows, &cols, self.n);
        let mut residual = p.clone();
        for row in &rows[..rank] {
            let pivot = (0..2 * self.n)
                .find(|&c| col_bit(row, c, self.n))
                .expect("pivot rows are nonzero");
            if col_bit(&residual, pivot, self.n) {
                residual.mul_assign_right(row);
            }
        }
        if !residual.is_identity_up_to_phase() {
            return None;
        }
        match residual.phase() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn apply_two_qubit(&mut self, gate: &TwoQubitClifford, a: usize, b: usize) {
        for g in &mut self.gens {
            gate.apply(g, a, b);
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let gate = crate::clifford::css_gate_set()[1];
        self.apply_two_qubit(&gate, control, target);
    }

    pub fn apply_hadamard(&mut self, q: usize) {
        for g in &mut self.gens {
            let x = g.x_bits().get(q);
            let z = g.z_bits().get(q);
            if x && z {
                // HYH = -Y
                g.negate();
            }
            g.x_bits_mut().set(q, z);
            g.z_bits_mut().set(q, x);
        }
    }

    pub fn apply_tableau(&mut self, u: &CliffordTableau) -> Result<(), Error> {
        for g in &mut self.gens {
            *g = u.conjugate(g)?;
        }
        Ok(())
    }

    /// Applies the Pauli `p`, flipping the signs of anticommuting generators.
    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        for g in &mut self.gens {
            if g.anticommutes_with(p) {
                g.negate();
            }
        }
    }

    /// `self ⊗ other`, with `other` on the higher-indexed qubits.
    pub fn tensor(&self, other: &MixedStabilizerState) -> MixedStabilizerState {
        let left = PauliOperator::identity(self.n);
        let right = PauliOperator::identity(other.n);
        let mut gens = Vec::with_capacity(self.gens.len() + other.gens.len());
        gens.extend(self.gens.iter().map(|g| g.tensor(&right)));
        gens.extend(other.gens.iter().map(|g| left.tensor(g)));
        MixedStabilizerState {
            n: self.n + other.n,
            gens,
        }
    }

    /// Measures the Hermitian Pauli `p`; returns `+1` or `-1`.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOperator,
        rng: &mut R,
    ) -> Result<i8, Error> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        let sign = p
            .sign()
            .ok_or_else(|| Error::InvalidArgument("measured Pauli must be Hermitian".into()))?;
        if p.is_identity_up_to_phase() {
            return Ok(sign);
        }
        if let Some(first) = self.gens.iter().position(|g| g.anticommutes_with(p)) {
            let pivot = self.gens[first].clone();
            for (i, g) in self.gens.iter_mut().enumerate() {
                if i != first && g.anticommutes_with(p) {
                    g.mul_assign_right(&pivot);
                }
            }
            let outcome: i8 = if rng.random::<bool>() { -1 } else { 1 };
            let mut new = p.clone();
            if outcome == -1 {
                new.negate();
            }
            self.gens[first] = new;
            return Ok(outcome);
        }
        if let Some(s) = self.group_sign(p) {
            return Ok(s);
        }
        let outcome: i8 = if rng.random::<bool>() { -1 } else { 1 };
        let mut new = p.clone();
        if outcome == -1 {
            new.negate();
        }
        self.gens.push(new);
        Ok(outcome)
    }

    /// Replaces the qubits in `erased` by maximally mixed qubits.
    pub fn erase(&mut self, erased: &[usize]) {
        if erased.is_empty() || self.gens.is_empty() {
            return;
        }
        let cols: Vec<usize> = erased.iter().flat_map(|&q| [q, q + self.n]).collect();
        let rank = eliminate(&mut self.gens, &cols, self.n);
        self.gens.drain(..rank);
    }

    /// Traces out `qubits`; the remaining qubits keep their relative order.
    pub fn trace_out(&mut self, qubits: &[usize]) {
        self.erase(qubits);
        let keep = self.complement(qubits);
        self.restrict_in_place(&keep);
    }

    fn complement(&self, qubits: &[usize]) -> Vec<usize> {
        let mut drop = vec![false; self.n];
        for &q in qubits {
            drop[q] = true;
        }
        (0..self.n).filter(|&q| !drop[q]).collect()
    }

    fn restrict_in_place(&mut self, keep: &[usize]) {
        for g in &mut self.gens {
            *g = g.restrict(keep);
        }
        self.n = keep.len();
    }

    /// Measures every qubit of `qubits` in `basis` and discards them.
    ///
    /// Outcome bits (`true` meaning `-1`) are returned in the order of
    /// `qubits`; the remaining qubits keep their relative order.
    pub fn measure_and_discard<R: Rng + ?Sized>(
        &mut self,
        qubits: &[usize],
        basis: Basis,
        rng: &mut R,
    ) -> BitVec {
        let n = self.n;
        let (anti_off, along_off) = match basis {
            Basis::Z => (0, n),
            Basis::X => (n, 0),
        };
        let anti_cols: Vec<usize> = qubits.iter().map(|&q| q + anti_off).collect();
        let r1 = eliminate(&mut self.gens, &anti_cols, n);
        self.gens.drain(..r1);

        let keep = self.complement(qubits);
        let keep_cols: Vec<usize> = keep.iter().flat_map(|&q| [q, q + n]).collect();
        let r0 = eliminate(&mut self.gens, &keep_cols, n);

        // rows past r0 are pure basis-type operators on the measured qubits
        let constraints: Vec<(BitVec, bool)> = self.gens[r0..]
            .iter()
            .map(|g| {
                let v = BitVec::from_bools(qubits.iter().map(|&q| col_bit(g, q + along_off, n)));
                (v, g.phase() == 2)
            })
            .collect();
        let outcomes = sample_affine(qubits.len(), constraints, rng);

        self.gens.truncate(r0);
        for g in &mut self.gens {
            let mut parity = false;
            for (i, &q) in qubits.iter().enumerate() {
                if outcomes.get(i) && col_bit(g, q + along_off, n) {
                    parity ^= true;
                }
            }
            if parity {
                g.negate();
            }
        }
        self.restrict_in_place(&keep);
        outcomes
    }

    /// Letters of the generators as strings, for diagnostics.
    pub fn describe(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.to_string()).collect()
    }

    /// `true` iff `p` (with its sign) belongs to the stabilizer group.
    pub fn is_stabilized_by(&self, p: &PauliOperator) -> bool {
        self.group_sign(p) == Some(1)
    }
}

/// Uniform sample from `{m : v·m = b for (v, b) in constraints}`.
fn sample_affine<R: Rng + ?Sized>(
    len: usize,
    constraints: Vec<(BitVec, bool)>,
    rng: &mut R,
) -> BitVec {
    let mut rows: Vec<BitVec> = constraints
        .into_iter()
        .map(|(v, b)| {
            let mut row = v;
            row.push(b);
            row
        })
        .collect();
    let pivots = gf2::row_reduce(&mut rows);
    let mut is_pivot = vec![false; len];
    for &c in &pivots {
        debug_assert!(c < len, "inconsistent measurement constraints");
        is_pivot[c] = true;
    }
    let mut m = BitVec::zeros(len);
    for (q, &pivot) in is_pivot.iter().enumerate() {
        if !pivot && rng.random::<bool>() {
            m.set(q, true);
        }
    }
    for (row, &c) in rows.iter().zip(&pivots) {
        let mut value = row.get(len);
        for q in row.iter_ones() {
            if q < len && q != c && m.get(q) {
                value ^= true;
            }
        }
        m.set(c, value);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn bell() -> MixedStabilizerState {
        MixedStabilizerState::from_generators(2, vec![p("XX"), p("ZZ")]).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&[p("ZZ"), p("ZZ")]).unwrap(), vec![p("ZZ")]);
        assert_eq!(canonicalize(&[p("ZI"), p("IZ"), p("ZZ")]).unwrap().len(), 2);
        assert_eq!(canonicalize(&[p("X"), p("Z")]), Err(Error::AntiCommuting));
    }

    #[test]
    fn entropies() {
        assert_eq!(MixedStabilizerState::zero(4).entropy(), 0);
        let mut s = MixedStabilizerState::zero(4);
        s.erase(&[2]);
        assert_eq!(s.entropy(), 1);
        assert_eq!(bell().reduced_entropy(&[0]), 1);
        assert_eq!(bell().reduced_entropy(&[0, 1]), 0);
        assert_eq!(MixedStabilizerState::zero(3).reduced_entropy(&[1, 2]), 0);
    }

    #[test]
    fn measurement_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = MixedStabilizerState::zero(1);
        assert_eq!(s.measure_pauli(&p("Z"), &mut rng).unwrap(), 1);
        assert_eq!(s, MixedStabilizerState::zero(1));
        let mut m = MixedStabilizerState::maximally_mixed(1);
        m.measure_pauli(&p("Z"), &mut rng).unwrap();
        assert_eq!(m.entropy(), 0);
        let mut b = bell();
        let a = b.measure_pauli(&p("ZI"), &mut rng).unwrap();
        assert_eq!(b.measure_pauli(&p("IZ"), &mut rng).unwrap(), a);
    }

    #[test]
    fn discard_matches_sequential_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // GHZ on 3 qubits: measuring two in Z fixes the third
        let ghz =
            MixedStabilizerState::from_generators(3, vec![p("XXX"), p("ZZI"), p("IZZ")]).unwrap();
        for _ in 0..20 {
            let mut s = ghz.clone();
            let bits = s.measure_and_discard(&[2, 0], Basis::Z, &mut rng);
            assert_eq!(bits.get(0), bits.get(1));
            assert_eq!(s.num_qubits(), 1);
            let expected = if bits.get(0) { p("-Z") } else { p("Z") };
            assert_eq!(s.generators(), &[expected]);
        }
        let mut s = ghz.clone();
        let bits = s.measure_and_discard(&[0, 1, 2], Basis::X, &mut rng);
        assert!(!(bits.get(0) ^ bits.get(1) ^ bits.get(2)));
    }

    #[test]
    fn hadamard_sign() {
        let mut s = MixedStabilizerState::from_generators(1, vec![p("Y")]).unwrap();
        s.apply_hadamard(0);
        assert_eq!(s.generators(), &[p("-Y")]);
    }
}
