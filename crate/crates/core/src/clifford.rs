//! Clifford tableaus and the two-qubit Clifford group.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::BitVec;
use crate::pauli::PauliOperator;
use crate::Error;

/// Clifford unitary stored by the images of `X_0, Z_0, X_1, Z_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    images: Vec<PauliOperator>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n);
        for q in 0..n {
            images.push(PauliOperator::x_type(n, &[q]));
            images.push(PauliOperator::z_type(n, &[q]));
        }
        Self { n, images }
    }

    /// Builds from the images `[U X_0 U†, U Z_0 U†, ...]`.
    pub fn from_images(images: Vec<PauliOperator>) -> Result<Self, Error> {
        if images.len() % 2 != 0 {
            return Err(Error::InvalidArgument("odd number of images".into()));
        }
        let n = images.len() / 2;
        for img in &images {
            if img.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: img.num_qubits(),
                });
            }
            if !img.is_hermitian() {
                return Err(Error::InvalidArgument("images must be Hermitian".into()));
            }
        }
        let t = Self { n, images };
        if !t.is_symplectic() {
            return Err(Error::InvalidArgument("images do not form a symplectic basis".into()));
        }
        Ok(t)
    }

    pub fn hadamard(n: usize, q: usize) -> Self {
        let mut t = Self::identity(n);
        t.images[2 * q] = PauliOperator::z_type(n, &[q]);
        t.images[2 * q + 1] = PauliOperator::x_type(n, &[q]);
        t
    }

    /// `S = diag(1, i)`: `X -> Y`, `Z -> Z`.
    pub fn phase_gate(n: usize, q: usize) -> Self {
        let mut t = Self::identity(n);
        t.images[2 * q] = PauliOperator::single(n, q, crate::Pauli::Y);
        t
    }

    pub fn cnot(n: usize, control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        let mut t = Self::identity(n);
        t.images[2 * control] = PauliOperator::x_type(n, &[control, target]);
        t.images[2 * target + 1] = PauliOperator::z_type(n, &[control, target]);
        t
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn image_of_x(&self, q: usize) -> &PauliOperator {
        &self.images[2 * q]
    }

    pub fn image_of_z(&self, q: usize) -> &PauliOperator {
        &self.images[2 * q + 1]
    }

    /// Rows `2i` / `2i+1` hold the `(x | z)` bits of the images of `X_i` / `Z_i`.
    pub fn symplectic_rows(&self) -> Vec<BitVec> {
        self.images
            .iter()
            .map(|p| p.x_bits().concat(p.z_bits()))
            .collect()
    }

    /// Sign bits of the images, `true` meaning `-1`.
    pub fn signs(&self) -> BitVec {
        BitVec::from_bools(self.images.iter().map(|p| p.sign() == Some(-1)))
    }

    pub fn is_symplectic(&self) -> bool {
        for i in 0..2 * self.n {
            for j in (i + 1)..2 * self.n {
                let expected = i / 2 == j / 2;
                if self.images[i].anticommutes_with(&self.images[j]) != expected {
                    return false;
                }
            }
        }
        true
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator, Error> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        let mut out = PauliOperator::identity(self.n);
        out.set_phase(p.phase());
        for q in p.x_bits().iter_ones() {
            out.mul_assign_right(&self.images[2 * q]);
        }
        for q in p.z_bits().iter_ones() {
            out.mul_assign_right(&self.images[2 * q + 1]);
        }
        Ok(out)
    }

    /// The unitary `next · self` (apply `self` first).
    pub fn then(&self, next: &CliffordTableau) -> Result<CliffordTableau, Error> {
        let images = self
            .images
            .iter()
            .map(|p| next.conjugate(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { n: self.n, images })
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        let mut images = Vec::with_capacity(2 * n);
        for q in 0..n {
            for g in [PauliOperator::x_type(n, &[q]), PauliOperator::z_type(n, &[q])] {
                let mut pre = PauliOperator::identity(n);
                for j in 0..n {
                    if self.images[2 * j + 1].anticommutes_with(&g) {
                        pre.x_bits_mut().set(j, true);
                    }
                    if self.images[2 * j].anticommutes_with(&g) {
                        pre.z_bits_mut().set(j, true);
                    }
                }
                pre.set_sign(1);
                let back = self.conjugate(&pre).expect("sizes agree");
                if back.sign() == Some(-1) {
                    pre.negate();
                }
                images.push(pre);
            }
        }
        Self { n, images }
    }

    /// Embeds a two-qubit gate acting on `(a, b)` of an `n`-qubit register.
    pub fn from_two_qubit(n: usize, gate: &TwoQubitClifford, a: usize, b: usize) -> Self {
        let mut t = Self::identity(n);
        for img in t.images.iter_mut() {
            gate.apply(img, a, b);
        }
        t
    }
}

/// Two-qubit Clifford stored as a lookup table over the 16 local patterns.
///
/// Pattern bits are `x_a | z_a << 1 | x_b << 2 | z_b << 3`; each entry holds
/// the image pattern in the low nibble and the added phase exponent in bits
/// 4..6.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoQubitClifford {
    forward: [u8; 16],
    backward: [u8; 16],
}

impl std::fmt::Debug for TwoQubitClifford {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TwoQubitClifford({:04x}/{:02x})", self.symplectic_key(), self.sign_key())
    }
}

fn pattern_of(p: &PauliOperator) -> u8 {
    (p.x_bits().get(0) as u8)
        | (p.z_bits().get(0) as u8) << 1
        | (p.x_bits().get(1) as u8) << 2
        | (p.z_bits().get(1) as u8) << 3
}

fn operator_of(pattern: u8) -> PauliOperator {
    let mut p = PauliOperator::identity(2);
    p.x_bits_mut().set(0, pattern & 1 != 0);
    p.z_bits_mut().set(0, pattern & 2 != 0);
    p.x_bits_mut().set(1, pattern & 4 != 0);
    p.z_bits_mut().set(1, pattern & 8 != 0);
    p
}

impl TwoQubitClifford {
    pub const IDENTITY: TwoQubitClifford = {
        let mut t = [0u8; 16];
        let mut i = 0;
        while i < 16 {
            t[i] = i as u8;
            i += 1;
        }
        TwoQubitClifford {
            forward: t,
            backward: t,
        }
    };

    /// Builds from a two-qubit tableau.
    pub fn from_tableau(t: &CliffordTableau) -> Result<Self, Error> {
        if t.num_qubits() != 2 {
            return Err(Error::SizeMismatch {
                expected: 2,
                found: t.num_qubits(),
            });
        }
        let mut forward = [0u8; 16];
        let mut backward = [0u8; 16];
        for pat in 0..16u8 {
            let img = t.conjugate(&operator_of(pat))?;
            let out = pattern_of(&img);
            forward[pat as usize] = out | (img.phase() << 4);
            backward[out as usize] = pat | (((4 - img.phase()) & 3) << 4);
        }
        Ok(Self { forward, backward })
    }

    pub fn to_tableau(&self) -> CliffordTableau {
        CliffordTableau::from_two_qubit(2, self, 0, 1)
    }

    pub fn hadamard(q: usize) -> Self {
        Self::from_tableau(&CliffordTableau::hadamard(2, q)).unwrap()
    }

    pub fn phase_gate(q: usize) -> Self {
        Self::from_tableau(&CliffordTableau::phase_gate(2, q)).unwrap()
    }

    /// CNOT with control on local qubit `control` (0 or 1).
    pub fn cnot(control: usize) -> Self {
        Self::from_tableau(&CliffordTableau::cnot(2, control, 1 - control)).unwrap()
    }

    pub fn swap() -> Self {
        Self::cnot(0).then(&Self::cnot(1)).then(&Self::cnot(0))
    }

    /// Gate applying `self` first, then `next`.
    pub fn then(&self, next: &TwoQubitClifford) -> TwoQubitClifford {
        let mut forward = [0u8; 16];
        let mut backward = [0u8; 16];
        for pat in 0..16usize {
            let a = self.forward[pat];
            let b = next.forward[(a & 15) as usize];
            let phase = ((a >> 4) + (b >> 4)) & 3;
            forward[pat] = (b & 15) | (phase << 4);
            backward[(b & 15) as usize] = pat as u8 | (((4 - phase) & 3) << 4);
        }
        Self { forward, backward }
    }

    pub fn inverse(&self) -> TwoQubitClifford {
        Self {
            forward: self.backward,
            backward: self.forward,
        }
    }

    #[inline]
    fn lookup(table: &[u8; 16], p: &mut PauliOperator, a: usize, b: usize) {
        let pat = (p.x_bits().get(a) as usize)
            | (p.z_bits().get(a) as usize) << 1
            | (p.x_bits().get(b) as usize) << 2
            | (p.z_bits().get(b) as usize) << 3;
        if pat == 0 {
            return;
        }
        let e = table[pat];
        p.x_bits_mut().set(a, e & 1 != 0);
        p.z_bits_mut().set(a, e & 2 != 0);
        p.x_bits_mut().set(b, e & 4 != 0);
        p.z_bits_mut().set(b, e & 8 != 0);
        p.add_phase(e >> 4);
    }

    /// `P <- G P G†` with the gate acting on qubits `(a, b)`.
    #[inline]
    pub fn apply(&self, p: &mut PauliOperator, a: usize, b: usize) {
        Self::lookup(&self.forward, p, a, b);
    }

    /// `P <- G† P G`.
    #[inline]
    pub fn apply_inverse(&self, p: &mut PauliOperator, a: usize, b: usize) {
        Self::lookup(&self.backward, p, a, b);
    }

    /// Image of a local pattern (`x_a | z_a << 1 | x_b << 2 | z_b << 3`),
    /// ignoring the phase.
    #[inline]
    pub fn map_pattern(&self, pattern: u8) -> u8 {
        self.forward[pattern as usize] & 15
    }

    #[inline]
    pub fn map_pattern_inverse(&self, pattern: u8) -> u8 {
        self.backward[pattern as usize] & 15
    }

    /// Symplectic part: image patterns of `X_a, Z_a, X_b, Z_b` packed in 16 bits.
    pub fn symplectic_key(&self) -> u16 {
        [1usize, 2, 4, 8]
            .iter()
            .enumerate()
            .map(|(i, &g)| ((self.forward[g] & 15) as u16) << (4 * i))
            .fold(0, |acc, v| acc | v)
    }

    /// Signs of the images of `X_a, Z_a, X_b, Z_b` (bit set means `-1`).
    pub fn sign_key(&self) -> u8 {
        let mut key = 0u8;
        for (i, &g) in [1usize, 2, 4, 8].iter().enumerate() {
            let e = self.forward[g];
            let y = ((e & 1) & ((e >> 1) & 1)) + (((e >> 2) & 1) & ((e >> 3) & 1));
            let sign_exp = ((e >> 4) + 4 - y) & 3;
            debug_assert!(sign_exp % 2 == 0);
            if sign_exp == 2 {
                key |= 1 << i;
            }
        }
        key
    }

    /// `true` if X-type operators map to X-type and Z-type to Z-type.
    pub fn is_css(&self) -> bool {
        let x_only = |e: u8| e & 0b1010 == 0;
        let z_only = |e: u8| e & 0b0101 == 0;
        x_only(self.forward[1])
            && x_only(self.forward[4])
            && z_only(self.forward[2])
            && z_only(self.forward[8])
    }
}

/// All 11520 two-qubit Cliffords (modulo global phase), in a fixed order.
pub fn two_qubit_group() -> &'static [TwoQubitClifford] {
    static GROUP: OnceLock<Vec<TwoQubitClifford>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = [
            TwoQubitClifford::hadamard(0),
            TwoQubitClifford::hadamard(1),
            TwoQubitClifford::phase_gate(0),
            TwoQubitClifford::phase_gate(1),
            TwoQubitClifford::cnot(0),
        ];
        let key = |g: &TwoQubitClifford| (g.symplectic_key(), g.sign_key());
        let mut seen = HashMap::new();
        let mut order = vec![TwoQubitClifford::IDENTITY];
        seen.insert(key(&order[0]), 0usize);
        let mut head = 0;
        while head < order.len() {
            let g = order[head];
            head += 1;
            for h in &gens {
                let next = g.then(h);
                let k = key(&next);
                if !seen.contains_key(&k) {
                    seen.insert(k, order.len());
                    order.push(next);
                }
            }
        }
        order
    })
}

/// The six CSS-preserving gates: identity, both CNOTs, SWAP and the two
/// products of opposite CNOTs.
pub fn css_gate_set() -> &'static [TwoQubitClifford; 6] {
    static SET: OnceLock<[TwoQubitClifford; 6]> = OnceLock::new();
    SET.get_or_init(|| {
        let c01 = TwoQubitClifford::cnot(0);
        let c10 = TwoQubitClifford::cnot(1);
        [
            TwoQubitClifford::IDENTITY,
            c01,
            c10,
            TwoQubitClifford::swap(),
            c10.then(&c01),
            c01.then(&c10),
        ]
    })
}

/// Uniform sample from the two-qubit Clifford group.
pub fn sample_two_qubit_clifford<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitClifford {
    let group = two_qubit_group();
    group[rng.random_range(0..group.len())]
}

/// Uniform sample from the CSS-preserving gate set.
pub fn sample_css_two_qubit_gate<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitClifford {
    let set = css_gate_set();
    set[rng.random_range(0..set.len())]
}
