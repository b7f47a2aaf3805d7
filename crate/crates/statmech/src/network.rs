//! Column-by-column contraction of the spin-model lattice network.
//!
//! Each spin is a horizontal chain of equality tensors that starts at the
//! first term it touches and ends at the last one; the terms are the
//! columns, in qubit order. Sweeping left to right keeps a table over the
//! spins whose chains cross the current column. Entering a column opens new
//! chains, the stacked product legs feed the boundary tensor of the term,
//! and chains that end are summed out (real semiring) or minimized out
//! (tropical semiring, with a backpointer per entry).

use crate::model::SpinModel;
use crate::StatmechError;

#[derive(Clone, Debug)]
struct Column {
    sign: i8,
    spins: Vec<usize>,
    open: Vec<usize>,
    close: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LatticeTensorNetwork {
    num_spins: usize,
    columns: Vec<Column>,
    isolated: Vec<usize>,
    frontier_width: usize,
    height: usize,
}

enum Event {
    Open { bit: usize },
    Close { bit: usize, spin: usize, choice: Vec<u64> },
}

#[inline]
fn insert_bit(idx: usize, bit: usize, value: usize) -> usize {
    let low = idx & ((1 << bit) - 1);
    let high = idx >> bit;
    low | (value << bit) | (high << (bit + 1))
}

impl LatticeTensorNetwork {
    pub fn new(model: &SpinModel) -> Self {
        let num_spins = model.num_spins();
        let terms = model.terms();
        let mut first = vec![usize::MAX; num_spins];
        let mut last = vec![0usize; num_spins];
        for (u, t) in terms.iter().enumerate() {
            for &s in &t.spins {
                if first[s] == usize::MAX {
                    first[s] = u;
                }
                last[s] = u;
            }
        }
        let mut columns: Vec<Column> = terms
            .iter()
            .map(|t| Column {
                sign: t.sign,
                spins: t.spins.clone(),
                open: Vec::new(),
                close: Vec::new(),
            })
            .collect();
        let mut isolated = Vec::new();
        for s in 0..num_spins {
            if first[s] == usize::MAX {
                isolated.push(s);
            } else {
                columns[first[s]].open.push(s);
                columns[last[s]].close.push(s);
            }
        }
        let mut width = 0usize;
        let mut frontier_width = 0;
        for c in &columns {
            width += c.open.len();
            frontier_width = frontier_width.max(width);
            width -= c.close.len();
        }
        Self {
            num_spins,
            columns,
            isolated,
            frontier_width,
            height: model.max_term_incidence(),
        }
    }

    /// Largest number of spin chains crossing one column.
    pub fn frontier_width(&self) -> usize {
        self.frontier_width
    }

    /// Largest number of chains stacked on one boundary tensor.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// `ln Z` with Boltzmann weights `exp(-βJ ⟦E,σ⟧ Π s)`.
    pub fn contract_partition(&self, beta_j: f64) -> Result<f64, StatmechError> {
        let weight = [(-beta_j).exp(), beta_j.exp()];
        let mut active: Vec<usize> = Vec::new();
        let mut table = vec![1.0f64];
        let mut log_scale = 0.0f64;
        for col in &self.columns {
            for &s in &col.open {
                let len = table.len();
                table.extend_from_within(..len);
                active.push(s);
            }
            let mask = self.mask_of(&active, &col.spins);
            // weight index 0 when sign * prod = +1
            let neg = (col.sign < 0) as u32;
            for (idx, v) in table.iter_mut().enumerate() {
                let parity = ((idx & mask).count_ones() ^ neg) & 1;
                *v *= weight[parity as usize];
            }
            for &s in &col.close {
                let bit = active.iter().position(|&a| a == s).expect("closing active spin");
                let half = table.len() / 2;
                let mut next = vec![0.0f64; half];
                for (i, slot) in next.iter_mut().enumerate() {
                    *slot = table[insert_bit(i, bit, 0)] + table[insert_bit(i, bit, 1)];
                }
                table = next;
                active.remove(bit);
            }
            let max = table.iter().cloned().fold(0.0f64, f64::max);
            if !(max.is_finite() && max > 0.0) {
                return Err(StatmechError::Overflow);
            }
            for v in table.iter_mut() {
                *v /= max;
            }
            log_scale += max.ln();
        }
        debug_assert_eq!(table.len(), 1);
        Ok(log_scale + table[0].ln() + self.isolated.len() as f64 * std::f64::consts::LN_2)
    }

    /// Minimum over configurations of `-Σ ⟦E,σ⟧ Π s` and a minimizing
    /// configuration. Ties keep the unflipped spin.
    pub fn contract_tropical(&self) -> (f64, Vec<i8>) {
        let mut active: Vec<usize> = Vec::new();
        let mut table = vec![0.0f64];
        let mut events: Vec<Event> = Vec::new();
        for col in &self.columns {
            for &s in &col.open {
                let len = table.len();
                table.extend_from_within(..len);
                events.push(Event::Open { bit: active.len() });
                active.push(s);
            }
            let mask = self.mask_of(&active, &col.spins);
            let neg = (col.sign < 0) as u32;
            for (idx, v) in table.iter_mut().enumerate() {
                let parity = ((idx & mask).count_ones() ^ neg) & 1;
                // -⟦E,σ⟧ Π s is -1 for parity 0 and +1 for parity 1
                *v += if parity == 0 { -1.0 } else { 1.0 };
            }
            for &s in &col.close {
                let bit = active.iter().position(|&a| a == s).expect("closing active spin");
                let half = table.len() / 2;
                let mut next = vec![0.0f64; half];
                let mut choice = vec![0u64; half.div_ceil(64)];
                for (i, slot) in next.iter_mut().enumerate() {
                    let a = table[insert_bit(i, bit, 0)];
                    let b = table[insert_bit(i, bit, 1)];
                    if b < a {
                        *slot = b;
                        choice[i / 64] |= 1 << (i % 64);
                    } else {
                        *slot = a;
                    }
                }
                table = next;
                active.remove(bit);
                events.push(Event::Close { bit, spin: s, choice });
            }
        }
        let energy = table[0];
        let mut spins = vec![1i8; self.num_spins];
        // walk back through the events, rebuilding the table index
        let mut idx = 0usize;
        for ev in events.iter().rev() {
            match ev {
                Event::Close { bit, spin, choice } => {
                    let c = ((choice[idx / 64] >> (idx % 64)) & 1) as usize;
                    if c == 1 {
                        spins[*spin] = -1;
                    }
                    idx = insert_bit(idx, *bit, c);
                }
                // an opened spin occupies the top bit
                Event::Open { bit } => idx &= (1 << bit) - 1,
            }
        }
        (energy, spins)
    }

    fn mask_of(&self, active: &[usize], spins: &[usize]) -> usize {
        let mut mask = 0usize;
        for &s in spins {
            let bit = active.iter().position(|&a| a == s).expect("term spin is active");
            mask |= 1 << bit;
        }
        mask
    }
}
