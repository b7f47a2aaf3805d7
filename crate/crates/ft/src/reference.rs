//! Slow reference computations for the spacetime decoder: a dense Pauli
//! frame stepped layer by layer, a full stabilizer-state run of the
//! protocol, and maximum likelihood by enumerating every Pauli on the
//! erased locations. None of these use the forward-propagated columns.

use std::collections::HashMap;

use rand::Rng;
use rcqec_core::{Basis, BitVec, Pauli, PauliOperator};

use crate::outcome::{Observable, SpacetimeProtocol};
use crate::spacetime::FaultOperator;

fn events_by_slice(protocol: &SpacetimeProtocol) -> Vec<Vec<usize>> {
    let code = protocol.outcome_code();
    let mut by_slice = vec![Vec::new(); protocol.circuit().depth() + 1];
    for (e, ev) in code.events.iter().enumerate() {
        by_slice[ev.slice].push(e);
    }
    by_slice
}

fn event_flipped(obs: &Observable, frame: &PauliOperator) -> bool {
    match obs {
        Observable::Single { qubit, basis } => match basis {
            Basis::Z => frame.x_bits().get(*qubit),
            Basis::X => frame.z_bits().get(*qubit),
        },
        Observable::Pauli(op) => op.anticommutes_with(frame),
    }
}

/// Readout flips caused by `fault`, and the logical action of the final
/// frame on the data block (`X̄_0, Z̄_0, …` order, bit set on
/// anticommutation).
pub fn frame_flips(protocol: &SpacetimeProtocol, fault: &FaultOperator) -> (BitVec, BitVec) {
    let circuit = protocol.circuit();
    let code = protocol.outcome_code();
    let by_slice = events_by_slice(protocol);
    let mut flips = BitVec::zeros(code.num_events());
    let mut frame = fault.slices[0].clone();
    for s in 0..=circuit.depth() {
        if s > 0 {
            circuit.apply_layer(s, &mut frame);
            frame.mul_assign_right(&fault.slices[s]);
        }
        for &e in &by_slice[s] {
            if event_flipped(&code.events[e].observable, &frame) {
                flips.set(e, true);
            }
        }
    }
    let logical = BitVec::from_bools(
        protocol
            .payload_operators()
            .iter()
            .map(|l| l.anticommutes_with(&frame)),
    );
    (flips, logical)
}

/// `(A·flips ‖ logical action)` from [`frame_flips`].
pub fn frame_vector(protocol: &SpacetimeProtocol, fault: &FaultOperator) -> BitVec {
    let (flips, logical) = frame_flips(protocol, fault);
    protocol.outcome_code().syndrome(&flips).concat(&logical)
}

/// Runs the protocol on the stabilizer simulator with the Pauli `fault`
/// applied at its slices and returns every readout (`true` for `-1`).
pub fn simulate_outcomes<R: Rng + ?Sized>(
    protocol: &SpacetimeProtocol,
    fault: &FaultOperator,
    rng: &mut R,
) -> BitVec {
    let circuit = protocol.circuit();
    let code = protocol.outcome_code();
    let total = circuit.num_qubits();
    let by_slice = events_by_slice(protocol);
    let mut state = protocol.initial_state();
    let mut out = BitVec::zeros(code.num_events());
    for s in 0..=circuit.depth() {
        if s > 0 {
            for g in circuit.layer(s) {
                state.apply_two_qubit(&g.gate, g.a, g.b);
            }
        }
        state.apply_pauli(&fault.slices[s]);
        for &e in &by_slice[s] {
            let op = match &code.events[e].observable {
                Observable::Single { qubit, basis } => match basis {
                    Basis::Z => PauliOperator::z_type(total, &[*qubit]),
                    Basis::X => PauliOperator::x_type(total, &[*qubit]),
                },
                Observable::Pauli(op) => op.clone(),
            };
            let m = state.measure_pauli(&op, rng).expect("Hermitian observable");
            out.set(e, m < 0);
        }
    }
    out
}

/// Logical classes consistent with an observed syndrome, with the number
/// of Paulis on the erased locations in each.
#[derive(Clone, Debug)]
pub struct MlClasses {
    pub counts: HashMap<BitVec, usize>,
    pub true_class: BitVec,
}

impl MlClasses {
    /// Classes of maximal weight.
    pub fn best(&self) -> Vec<&BitVec> {
        let max = self.counts.values().copied().max().unwrap_or(0);
        self.counts
            .iter()
            .filter(|(_, &c)| c == max)
            .map(|(k, _)| k)
            .collect()
    }

    /// Whether maximum likelihood recovers the true class unambiguously.
    pub fn unique_success(&self) -> bool {
        let best = self.best();
        best.len() == 1 && *best[0] == self.true_class
    }
}

/// Enumerates all `4^|erased|` Paulis on the erased locations and groups
/// those matching the syndrome of `truth` by logical class.
pub fn brute_force_ml(
    protocol: &SpacetimeProtocol,
    erased: &[(usize, usize)],
    truth: &[Pauli],
) -> MlClasses {
    assert_eq!(erased.len(), truth.len());
    assert!(erased.len() <= 10, "enumeration limited to 10 locations");
    let total = protocol.circuit().num_qubits();
    let depth = protocol.circuit().depth();
    let checks = protocol.num_checks();
    // per location, the vector of X and of Z
    let single = |slice: usize, qubit: usize, pauli: Pauli| {
        let mut f = FaultOperator::identity(total, depth);
        f.slices[slice] = PauliOperator::single(total, qubit, pauli);
        frame_vector(protocol, &f)
    };
    let basis: Vec<(BitVec, BitVec)> = erased
        .iter()
        .map(|&(s, q)| (single(s, q, Pauli::X), single(s, q, Pauli::Z)))
        .collect();
    let width = checks + protocol.payload_len();
    let vector_of = |assign: &[Pauli]| {
        let mut v = BitVec::zeros(width);
        for (p, (vx, vz)) in assign.iter().zip(&basis) {
            let (x, z) = p.bits();
            if x {
                v.xor_assign(vx);
            }
            if z {
                v.xor_assign(vz);
            }
        }
        v
    };
    let syn_idx: Vec<usize> = (0..checks).collect();
    let log_idx: Vec<usize> = (checks..width).collect();
    let truth_v = vector_of(truth);
    let target = truth_v.select(&syn_idx);
    let mut counts: HashMap<BitVec, usize> = HashMap::new();
    let m = erased.len();
    let mut assign = vec![Pauli::I; m];
    for code in 0..1usize << (2 * m) {
        for (i, a) in assign.iter_mut().enumerate() {
            let c = code >> (2 * i) & 3;
            *a = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c];
        }
        let v = vector_of(&assign);
        if v.select(&syn_idx) == target {
            *counts.entry(v.select(&log_idx)).or_insert(0) += 1;
        }
    }
    MlClasses {
        counts,
        true_class: truth_v.select(&log_idx),
    }
}
