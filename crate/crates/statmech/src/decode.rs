//! Marginal and minimum-weight decoders.

use rcqec_core::{BitVec, CircuitCode, Pauli, PauliOperator};

use crate::model::{nishimori_beta, SpinMode, SpinModel};
use crate::network::LatticeTensorNetwork;
use crate::StatmechError;

/// Representative of class `σ` on logical `j`.
pub fn logical_representative(code: &CircuitCode, j: usize, sigma: Pauli) -> PauliOperator {
    let n = code.num_qubits();
    match sigma {
        Pauli::I => PauliOperator::identity(n),
        Pauli::X => code.logical_x()[j].clone(),
        Pauli::Z => code.logical_z()[j].clone(),
        Pauli::Y => &code.logical_x()[j] * &code.logical_z()[j],
    }
}

const CLASSES: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// `ln Z_{E,j}` for `E = L_j^σ C_s`, `σ ∈ (I, X, Y, Z)`, for every logical `j`.
pub fn marginal_log_partitions(
    code: &CircuitCode,
    syndrome: &BitVec,
    p: f64,
) -> Result<Vec<[f64; 4]>, StatmechError> {
    let beta_j = nishimori_beta(p)?;
    let c_s = code.canonical_error(syndrome)?;
    (0..code.num_logicals())
        .map(|j| {
            let mut out = [0.0; 4];
            for (slot, sigma) in out.iter_mut().zip(CLASSES) {
                let e = &logical_representative(code, j, sigma) * &c_s;
                let model = SpinModel::new(code, &e, SpinMode::ExcludeLogical(j))?;
                *slot = LatticeTensorNetwork::new(&model).contract_partition(beta_j)?;
            }
            Ok(out)
        })
        .collect()
}

/// Most likely class of each logical qubit, relative to `C_s`.
pub fn marginal_decode(
    code: &CircuitCode,
    syndrome: &BitVec,
    p: f64,
) -> Result<Vec<Pauli>, StatmechError> {
    Ok(marginal_log_partitions(code, syndrome, p)?
        .into_iter()
        .map(|z| {
            let mut best = 0;
            for i in 1..4 {
                if z[i] > z[best] {
                    best = i;
                }
            }
            CLASSES[best]
        })
        .collect())
}

/// Lowest-weight Pauli with the given syndrome.
pub fn minimum_weight_decode(
    code: &CircuitCode,
    syndrome: &BitVec,
) -> Result<PauliOperator, StatmechError> {
    let c_s = code.canonical_error(syndrome)?;
    let model = SpinModel::new(code, &c_s, SpinMode::AllGenerators)?;
    let (_, spins) = LatticeTensorNetwork::new(&model).contract_tropical();
    Ok(model.effective_error(&spins))
}
