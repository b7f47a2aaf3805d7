//! Classical spin models attached to a code and an error.

use rcqec_core::{CircuitCode, Pauli, PauliOperator};

use crate::StatmechError;

/// Which generators carry a spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinMode {
    /// One spin per stabilizer generator.
    StabilizersOnly,
    /// Stabilizers plus `X̄_m`, `Z̄_m` for every logical `m != j`.
    ExcludeLogical(usize),
    /// Stabilizers plus both logicals of every logical qubit.
    AllGenerators,
}

/// One Hamiltonian term per single-qubit Pauli `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub qubit: usize,
    pub sigma: Pauli,
    /// `⟦E, σ⟧`.
    pub sign: i8,
    /// Spins whose generator anticommutes with `σ`, ascending.
    pub spins: Vec<usize>,
}

/// `H(s) = Σ_u J ⟦E, σ_u⟧ Π_{i ∈ u} s_i` with `J = 1`.
#[derive(Clone, Debug)]
pub struct SpinModel {
    generators: Vec<PauliOperator>,
    terms: Vec<Term>,
    error: PauliOperator,
}

impl SpinModel {
    pub fn new(code: &CircuitCode, error: &PauliOperator, mode: SpinMode) -> Result<Self, StatmechError> {
        let n = code.num_qubits();
        if error.num_qubits() != n {
            return Err(rcqec_core::Error::SizeMismatch {
                expected: n,
                found: error.num_qubits(),
            }
            .into());
        }
        let mut generators: Vec<PauliOperator> = code.stabilizers().to_vec();
        let k = code.num_logicals();
        match mode {
            SpinMode::StabilizersOnly => {}
            SpinMode::ExcludeLogical(j) => {
                if j >= k {
                    return Err(StatmechError::InvalidArgument(format!(
                        "logical index {j} out of range for k = {k}"
                    )));
                }
                for m in (0..k).filter(|&m| m != j) {
                    generators.push(code.logical_x()[m].clone());
                    generators.push(code.logical_z()[m].clone());
                }
            }
            SpinMode::AllGenerators => {
                for m in 0..k {
                    generators.push(code.logical_x()[m].clone());
                    generators.push(code.logical_z()[m].clone());
                }
            }
        }
        Ok(Self::from_generators(generators, error))
    }

    /// Model over an arbitrary list of generators (one spin each).
    pub fn from_generators(generators: Vec<PauliOperator>, error: &PauliOperator) -> Self {
        let n = error.num_qubits();
        // incidence per qubit, built from generator supports
        let mut by_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, g) in generators.iter().enumerate() {
            for q in g.support() {
                by_qubit[q].push(i);
            }
        }
        let mut terms = Vec::with_capacity(3 * n);
        for (q, incident) in by_qubit.iter().enumerate() {
            for sigma in Pauli::NON_IDENTITY {
                let op = PauliOperator::single(n, q, sigma);
                let spins = incident
                    .iter()
                    .copied()
                    .filter(|&i| generators[i].letter(q) != sigma)
                    .collect();
                let sign = if error.anticommutes_with(&op) { -1 } else { 1 };
                terms.push(Term {
                    qubit: q,
                    sigma,
                    sign,
                    spins,
                });
            }
        }
        Self {
            generators,
            terms,
            error: error.clone(),
        }
    }

    pub fn num_spins(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn error(&self) -> &PauliOperator {
        &self.error
    }

    /// Largest number of spins in one term.
    pub fn max_term_incidence(&self) -> usize {
        self.terms.iter().map(|t| t.spins.len()).max().unwrap_or(0)
    }

    /// `H(s)`; spins are `±1`.
    pub fn hamiltonian(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.num_spins());
        self.terms
            .iter()
            .map(|t| {
                let prod: i8 = t.spins.iter().map(|&i| spins[i]).product();
                (t.sign * prod) as f64
            })
            .sum()
    }

    /// Energy minimized by the tropical contraction, `-H(s)`. For a
    /// configuration it equals `4·wt(F) - 3n` where `F` is the error times
    /// the generators with flipped spins.
    pub fn ground_energy_of(&self, spins: &[i8]) -> f64 {
        -self.hamiltonian(spins)
    }

    /// Error times the generators whose spin is `-1`.
    pub fn effective_error(&self, spins: &[i8]) -> PauliOperator {
        let mut out = self.error.clone();
        for (g, &s) in self.generators.iter().zip(spins) {
            if s < 0 {
                out.mul_assign_right(g);
            }
        }
        out
    }
}

/// Nishimori coupling `βJ = -¼ ln(3(1-p)/p)`.
pub fn nishimori_beta(p: f64) -> Result<f64, StatmechError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatmechError::InvalidRate(p));
    }
    Ok(-0.25 * (3.0 * (1.0 - p) / p).ln())
}
