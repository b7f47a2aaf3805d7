//! Packed bit vectors and dense linear algebra over GF(2).
//!
//! Everything in the crate that talks about "bits" (Pauli x/z parts, parity
//! check rows, syndromes) is stored as a [`BitVec`]: little-endian words of
//! 64 bits with the unused high bits of the last word kept at zero.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Fixed-length packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// `self ^= other`.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bits at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> BitVec {
        BitVec::from_bools(indices.iter().map(|&i| self.get(i)))
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    /// Lowercase hex, least-significant nibble first (bit `i` lives in
    /// nibble `i / 4`).
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        (0..nibbles)
            .map(|k| {
                let word = self.words[(4 * k) / WORD];
                let nib = (word >> ((4 * k) % WORD)) & 0xf;
                char::from_digit(nib as u32, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(len: usize, hex: &str) -> Option<BitVec> {
        if hex.len() != len.div_ceil(4) {
            return None;
        }
        let mut v = BitVec::zeros(len);
        for (k, c) in hex.chars().enumerate() {
            let nib = c.to_digit(16)? as u64;
            for b in 0..4 {
                let i = 4 * k + b;
                if (nib >> b) & 1 == 1 {
                    if i >= len {
                        return None;
                    }
                    v.set(i, true);
                }
            }
        }
        Some(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-reduces `rows` in place to reduced row echelon form, choosing pivot
/// columns left to right and, for each column, the lowest-indexed remaining
/// row. Zero rows end up at the bottom. Returns the pivot columns.
pub fn row_reduce(rows: &mut [BitVec]) -> Vec<usize> {
    let Some(ncols) = rows.first().map(BitVec::len) else {
        return Vec::new();
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, tail) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if row.get(col) {
                row.xor_assign(pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[BitVec]) -> usize {
    let mut work = rows.to_vec();
    row_reduce(&mut work).len()
}

/// Solves `Σ_j x_j · columns[j] = rhs`.
///
/// Pivot columns are the earliest columns independent of their
/// predecessors; free variables are set to zero. Returns `None` when the
/// system is inconsistent.
pub fn solve(columns: &[BitVec], rhs: &BitVec) -> Option<BitVec> {
    let mut basis = XorBasis::new(rhs.len());
    let mut combos: Vec<BitVec> = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        let mut combo = BitVec::zeros(columns.len());
        combo.set(j, true);
        basis.insert_tracked(c.clone(), combo, &mut combos);
    }
    let (residual, combo) = basis.reduce_tracked(rhs.clone(), BitVec::zeros(columns.len()), &combos);
    residual.is_zero().then_some(combo)
}

/// Incrementally built basis of a GF(2) vector space, keyed by the lowest
/// set bit of each member. Only the first `pivot_len` bits take part in
/// pivoting; any bits beyond that are carried along as payload.
#[derive(Clone, Debug)]
pub struct XorBasis {
    pivot_len: usize,
    by_pivot: Vec<Option<usize>>,
    vectors: Vec<BitVec>,
}

impl XorBasis {
    pub fn new(pivot_len: usize) -> Self {
        Self {
            pivot_len,
            by_pivot: vec![None; pivot_len],
            vectors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn lowest_pivot_bit(&self, v: &BitVec) -> Option<usize> {
        let full_words = self.pivot_len / WORD;
        for (wi, &w) in v.words.iter().enumerate().take(full_words) {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
        }
        let rem = self.pivot_len % WORD;
        if rem != 0 {
            let w = v.words[full_words] & ((1u64 << rem) - 1);
            if w != 0 {
                return Some(full_words * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Reduces `v` against the basis; the pivot part of the result is zero
    /// iff `v` lies in the span (restricted to the pivot part).
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        while let Some(b) = self.lowest_pivot_bit(&v) {
            match self.by_pivot[b] {
                Some(i) => v.xor_assign(&self.vectors[i]),
                None => {
                    // Skip past this bit: continue reducing higher bits.
                    return self.reduce_from(v, b + 1);
                }
            }
        }
        v
    }

    fn reduce_from(&self, mut v: BitVec, start: usize) -> BitVec {
        for b in start..self.pivot_len {
            if v.get(b) {
                if let Some(i) = self.by_pivot[b] {
                    v.xor_assign(&self.vectors[i]);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current span. Returns whether it
    /// was added.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(v);
        match self.lowest_pivot_bit(&v) {
            Some(b) => {
                self.by_pivot[b] = Some(self.vectors.len());
                self.vectors.push(v);
                true
            }
            None => false,
        }
    }

    fn insert_tracked(&mut self, v: BitVec, combo: BitVec, combos: &mut Vec<BitVec>) -> bool {
        let (v, combo) = self.reduce_tracked(v, combo, combos);
        match self.lowest_pivot_bit(&v) {
            Some(b) => {
                self.by_pivot[b] = Some(self.vectors.len());
                self.vectors.push(v);
                combos.push(combo);
                true
            }
            None => false,
        }
    }

    fn reduce_tracked(&self, mut v: BitVec, mut combo: BitVec, combos: &[BitVec]) -> (BitVec, BitVec) {
        for b in 0..self.pivot_len {
            if v.get(b) {
                if let Some(i) = self.by_pivot[b] {
                    v.xor_assign(&self.vectors[i]);
                    combo.xor_assign(&combos[i]);
                }
            }
        }
        (v, combo)
    }
}
