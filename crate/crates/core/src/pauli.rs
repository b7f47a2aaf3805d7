//! n-qubit Pauli operators in binary symplectic form.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::gf2::BitVec;
use crate::Error;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase · X^x · Z^z` on `n` qubits.
///
/// The phase is kept mod 4 relative to the `X^x Z^z` ordering, so `Y` is
/// stored as `x = z = 1, phase = 1`. Hermitian operators are exactly those
/// with `phase + |x ∧ z|` even.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    /// Builds from bit vectors and a raw phase exponent (mod 4).
    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts must have the same length");
        Self { x, z, phase: phase & 3 }
    }

    /// Hermitian operator with the given letters and a `+` sign.
    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Weight-one operator `letter` on qubit `q`.
    pub fn single(n: usize, q: usize, letter: Pauli) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(q, letter);
        p
    }

    pub fn x_type(n: usize, support: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in support {
            p.x.set(q, true);
        }
        p
    }

    pub fn z_type(n: usize, support: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in support {
            p.z.set(q, true);
        }
        p
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn x_bits_mut(&mut self) -> &mut BitVec {
        &mut self.x
    }

    #[inline]
    pub fn z_bits_mut(&mut self) -> &mut BitVec {
        &mut self.z
    }

    /// Raw phase exponent `k` in `i^k X^x Z^z`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    #[inline]
    pub fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn negate(&mut self) {
        self.add_phase(2);
    }

    fn y_count(&self) -> u32 {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.y_count()) % 2 == 0
    }

    /// Sign in front of the letter string: `+1` or `-1` for Hermitian
    /// operators, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        match (self.phase as u32 + 4 - self.y_count() % 4) % 4 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Makes the operator Hermitian with the given sign, keeping its letters.
    pub fn set_sign(&mut self, sign: i8) {
        let base = self.y_count() % 4;
        let extra = if sign < 0 { 2 } else { 0 };
        self.phase = ((base + extra) % 4) as u8;
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Replaces the letter on qubit `q`, keeping the overall sign of a
    /// Hermitian operator unchanged.
    pub fn set_letter(&mut self, q: usize, letter: Pauli) {
        let old_y = self.x.get(q) && self.z.get(q);
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
        let new_y = x && z;
        match (old_y, new_y) {
            (false, true) => self.add_phase(1),
            (true, false) => self.add_phase(3),
            _ => {}
        }
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.num_qubits()).map(|q| self.letter(q)).collect()
    }

    /// Number of qubits with a non-identity letter.
    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits())
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }

    /// `true` iff the operator contains no `Z` components.
    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliOperator) {
        assert_eq!(self.num_qubits(), other.num_qubits(), "Pauli size mismatch");
        let cross = self.z.dot(&other.x) as u8;
        self.phase = (self.phase + other.phase + 2 * cross) & 3;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// `self ← other · self`.
    pub fn mul_assign_left(&mut self, other: &PauliOperator) {
        assert_eq!(self.num_qubits(), other.num_qubits(), "Pauli size mismatch");
        let cross = other.z.dot(&self.x) as u8;
        self.phase = (self.phase + other.phase + 2 * cross) & 3;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn inverse(&self) -> PauliOperator {
        let mut out = self.clone();
        let xz = self.x.dot(&self.z) as u8;
        out.phase = (4 - self.phase + 2 * xz) & 3;
        out
    }

    /// Symplectic inner product: `true` iff the operators anticommute.
    #[inline]
    pub fn anticommutes_with(&self, other: &PauliOperator) -> bool {
        assert_eq!(self.num_qubits(), other.num_qubits(), "Pauli size mismatch");
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    #[inline]
    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        !self.anticommutes_with(other)
    }

    /// Tensor product `self ⊗ other`, with `other` on the higher-indexed qubits.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        PauliOperator {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) & 3,
        }
    }

    /// Restriction to `qubits` (in the given order), keeping the phase.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        PauliOperator {
            x: self.x.select(qubits),
            z: self.z.select(qubits),
            phase: self.phase,
        }
    }

    /// Embeds into `n` qubits, sending local qubit `i` to `positions[i]`.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliOperator {
        assert_eq!(positions.len(), self.num_qubits());
        let mut out = PauliOperator::identity(n);
        for (i, &q) in positions.iter().enumerate() {
            out.x.set(q, self.x.get(i));
            out.z.set(q, self.z.get(i));
        }
        out.phase = self.phase;
        out
    }
}

/// `+1` if `p` and `q` commute, `-1` if they anticommute.
pub fn scalar_commutator(p: &PauliOperator, q: &PauliOperator) -> Result<i8, Error> {
    if p.num_qubits() != q.num_qubits() {
        return Err(Error::SizeMismatch {
            expected: p.num_qubits(),
            found: q.num_qubits(),
        });
    }
    Ok(if p.anticommutes_with(q) { -1 } else { 1 })
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;

    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match (self.phase as u32 + 4 - self.y_count() % 4) % 4 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses strings like `"XIZ"`, `"-YY"` or `"+iXZ"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let (extra, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("unexpected character {other:?} in Pauli string"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut p = PauliOperator::from_letters(&letters);
        p.add_phase(extra);
        Ok(p)
    }
}
