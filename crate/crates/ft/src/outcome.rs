//! The full error-correction protocol as one located circuit, its outcome
//! code, and optimal erasure decoding over spacetime locations.
//!
//! Schedule of one round, starting at level `L`: both ancilla trees are
//! born at `L`, encoded over layers `L+1..=L+d`, checked over
//! `L+d+1..=L+d+q`, and the surviving ancillas meet the data block in the
//! two Steane layers `L+d+q+1` and `L+d+q+2`. Each round uses fresh ancilla
//! qubits. After the last round the data stabilizers are measured
//! perfectly at the final slice.
//!
//! Columns of the decoding matrix come from forward propagation: a Pauli
//! at one location is pushed through the remaining layers and every
//! readout it flips is recorded, which gives `⟦S_i, →E⟧ = ⟦←S_i, E⟧`
//! without materializing the spacetime stabilizers.

use std::collections::HashMap;

use rand::Rng;
use rcqec_core::clifford::css_gate_set;
use rcqec_core::{
    gf2, Basis, BitVec, CircuitCode, MixedStabilizerState, Pauli, PauliOperator, PlacedGate, Role,
    XorBasis,
};

use crate::protocol::{encoder_inputs, LogicalBasis};
use crate::spacetime::{back_cumulant, FaultOperator, LocatedCircuit, SparsePauli};
use crate::FtError;

/// Which parities of a block readout become checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSet {
    /// Every parity fixed by the ideal ancilla state: the stabilizers of
    /// the readout basis, and for the ancilla's own basis also its
    /// logicals (`Z̄` for `|0̄⟩` bit checks, `X̄` for `|+̄⟩` phase checks).
    StateStabilizers,
    /// Only the code stabilizers of the readout basis.
    CodeStabilizers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observable {
    Single { qubit: usize, basis: Basis },
    Pauli(PauliOperator),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementEvent {
    pub slice: usize,
    pub observable: Observable,
}

/// Parity checks over the measurement record: check `i` is the XOR of the
/// events listed in `checks[i]`.
#[derive(Clone, Debug, Default)]
pub struct OutcomeCode {
    pub events: Vec<MeasurementEvent>,
    pub checks: Vec<Vec<usize>>,
}

impl OutcomeCode {
    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    /// `A·m`.
    pub fn syndrome(&self, outcomes: &BitVec) -> BitVec {
        assert_eq!(outcomes.len(), self.events.len());
        BitVec::from_bools(
            self.checks
                .iter()
                .map(|c| c.iter().filter(|&&e| outcomes.get(e)).count() % 2 == 1),
        )
    }
}

/// A single-qubit Pauli at one location.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocatedPauli {
    pub slice: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Rows flipped by the x and the z part of a Pauli at one location.
#[derive(Clone, Debug, Default)]
struct Flips {
    by_x: Vec<u32>,
    by_z: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct SpacetimeProtocol {
    code: CircuitCode,
    q: usize,
    rounds: usize,
    circuit: LocatedCircuit,
    outcome: OutcomeCode,
    exposed: Vec<Vec<usize>>,
    births: Vec<(usize, Basis)>,
    readout_at: Vec<Vec<usize>>,
    flips: Vec<HashMap<usize, Flips>>,
    payload: Vec<PauliOperator>,
}

/// Lays out `rounds` Steane rounds with ancillas distilled over `q` rounds.
pub fn build_protocol(
    code: &CircuitCode,
    q: usize,
    rounds: usize,
    rows: RowSet,
) -> Result<SpacetimeProtocol, FtError> {
    if !code.is_css() {
        return Err(FtError::NotCss);
    }
    if q == 0 || q > 12 {
        return Err(FtError::InvalidArgument(format!("q = {q} outside 1..=12")));
    }
    let n = code.num_qubits();
    let d = code.circuit().depth();
    let blocks = 1usize << q;
    let per_round = d + q + 2;
    let depth = rounds * per_round;
    let total = n + rounds * 2 * blocks * n;
    let cnot = css_gate_set()[1];

    let z_stabs: Vec<&PauliOperator> = code.stabilizers_of(Role::ZStabilizer);
    let x_stabs: Vec<&PauliOperator> = code.stabilizers_of(Role::XStabilizer);
    let with_logicals = rows == RowSet::StateStabilizers;

    let mut layers: Vec<Vec<PlacedGate>> = vec![Vec::new(); depth];
    let mut exposed: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    let mut births = Vec::new();
    let mut outcome = OutcomeCode::default();

    // adds the readout events of a block and one check per row operator
    let readout = |outcome: &mut OutcomeCode,
                       slice: usize,
                       base: usize,
                       basis: Basis,
                       row_ops: &[&PauliOperator]| {
        let first = outcome.events.len();
        for i in 0..n {
            outcome.events.push(MeasurementEvent {
                slice,
                observable: Observable::Single {
                    qubit: base + i,
                    basis,
                },
            });
        }
        for op in row_ops {
            let bits = match basis {
                Basis::Z => op.z_bits(),
                Basis::X => op.x_bits(),
            };
            outcome.checks.push(bits.iter_ones().map(|i| first + i).collect());
        }
    };

    let data: Vec<usize> = (0..n).collect();
    for r in 0..rounds {
        let start = r * per_round;
        let zero_base = n + r * 2 * blocks * n;
        let plus_base = zero_base + blocks * n;
        let trees = [
            (zero_base, LogicalBasis::Zero),
            (plus_base, LogicalBasis::Plus),
        ];
        for &(base, basis) in &trees {
            let inputs = encoder_inputs(code, basis);
            for b in 0..blocks {
                for (i, &bb) in inputs.iter().enumerate() {
                    births.push((base + b * n + i, bb));
                }
            }
        }
        for (l, layer) in code.circuit().layers().iter().enumerate() {
            let level = start + l + 1;
            for &(base, _) in &trees {
                for b in 0..blocks {
                    let off = base + b * n;
                    layers[level - 1].extend(layer.iter().map(|g| PlacedGate {
                        a: off + g.a,
                        b: off + g.b,
                        gate: g.gate,
                    }));
                }
                exposed[level].extend(base..base + blocks * n);
            }
        }
        for j in 1..=q {
            let level = start + d + j;
            let bit_check = j % 2 == 1;
            let stride = 1usize << (j - 1);
            for &(base, basis) in &trees {
                for keep in (0..blocks).step_by(2 * stride) {
                    let meas = keep + stride;
                    let kb = base + keep * n;
                    let mb = base + meas * n;
                    for i in 0..n {
                        let (a, b) = if bit_check { (kb + i, mb + i) } else { (mb + i, kb + i) };
                        layers[level - 1].push(PlacedGate { a, b, gate: cnot });
                    }
                    exposed[level].extend(kb..kb + n);
                    exposed[level].extend(mb..mb + n);
                    let mut row_ops: Vec<&PauliOperator> =
                        if bit_check { z_stabs.clone() } else { x_stabs.clone() };
                    if with_logicals {
                        match (basis, bit_check) {
                            (LogicalBasis::Zero, true) => row_ops.extend(code.logical_z()),
                            (LogicalBasis::Plus, false) => row_ops.extend(code.logical_x()),
                            _ => {}
                        }
                    }
                    let rb = if bit_check { Basis::Z } else { Basis::X };
                    readout(&mut outcome, level, mb, rb, &row_ops);
                }
            }
        }
        // Steane gadget with the survivors (block 0 of each tree)
        let first = start + d + q + 1;
        let second = first + 1;
        for i in 0..n {
            layers[first - 1].push(PlacedGate {
                a: i,
                b: plus_base + i,
                gate: cnot,
            });
            layers[second - 1].push(PlacedGate {
                a: zero_base + i,
                b: i,
                gate: cnot,
            });
        }
        for level in [first, second] {
            exposed[level].extend(data.iter().copied());
            exposed[level].extend(plus_base..plus_base + n);
            exposed[level].extend(zero_base..zero_base + n);
        }
        readout(&mut outcome, second, plus_base, Basis::Z, &z_stabs);
        readout(&mut outcome, second, zero_base, Basis::X, &x_stabs);
    }
    for s in code.stabilizers() {
        let mut op = s.embed(total, &data);
        op.set_sign(1);
        outcome.checks.push(vec![outcome.events.len()]);
        outcome.events.push(MeasurementEvent {
            slice: depth,
            observable: Observable::Pauli(op),
        });
    }

    let circuit = LocatedCircuit::new(total, layers)?;
    let mut payload = Vec::with_capacity(2 * code.num_logicals());
    for (lx, lz) in code.logical_x().iter().zip(code.logical_z()) {
        payload.push(lx.embed(total, &data));
        payload.push(lz.embed(total, &data));
    }

    let mut proto = SpacetimeProtocol {
        code: code.clone(),
        q,
        rounds,
        circuit,
        outcome,
        exposed,
        births,
        readout_at: vec![Vec::new(); depth + 1],
        flips: vec![HashMap::new(); depth + 1],
        payload,
    };
    proto.index_flips();
    Ok(proto)
}

impl SpacetimeProtocol {
    fn index_flips(&mut self) {
        let mut event_checks: Vec<Vec<u32>> = vec![Vec::new(); self.outcome.events.len()];
        for (c, evs) in self.outcome.checks.iter().enumerate() {
            for &e in evs {
                event_checks[e].push(c as u32);
            }
        }
        let flips = &mut self.flips;
        let mut add = |slice: usize, qubit: usize, ox: bool, oz: bool, rows: &[u32]| {
            let f = flips[slice].entry(qubit).or_default();
            if oz {
                f.by_x.extend_from_slice(rows);
            }
            if ox {
                f.by_z.extend_from_slice(rows);
            }
        };
        for (e, ev) in self.outcome.events.iter().enumerate() {
            match &ev.observable {
                Observable::Single { qubit, basis } => {
                    self.readout_at[ev.slice].push(*qubit);
                    let (ox, oz) = match basis {
                        Basis::Z => (false, true),
                        Basis::X => (true, false),
                    };
                    add(ev.slice, *qubit, ox, oz, &event_checks[e]);
                }
                Observable::Pauli(op) => {
                    for qubit in op.support() {
                        let (ox, oz) = op.letter(qubit).bits();
                        add(ev.slice, qubit, ox, oz, &event_checks[e]);
                    }
                }
            }
        }
        let offset = self.outcome.num_checks() as u32;
        let last = self.circuit.depth();
        for (i, op) in self.payload.iter().enumerate() {
            let row = [offset + i as u32];
            for qubit in op.support() {
                let (ox, oz) = op.letter(qubit).bits();
                add(last, qubit, ox, oz, &row);
            }
        }
    }

    pub fn code(&self) -> &CircuitCode {
        &self.code
    }

    pub fn distillation_rounds(&self) -> usize {
        self.q
    }

    pub fn ec_rounds(&self) -> usize {
        self.rounds
    }

    pub fn circuit(&self) -> &LocatedCircuit {
        &self.circuit
    }

    pub fn outcome_code(&self) -> &OutcomeCode {
        &self.outcome
    }

    pub fn num_checks(&self) -> usize {
        self.outcome.num_checks()
    }

    /// Number of logical bits appended to each column, `2k`.
    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    /// Data-block logicals on the full register: `X̄_0, Z̄_0, X̄_1, …`.
    pub fn payload_operators(&self) -> &[PauliOperator] {
        &self.payload
    }

    pub fn data_qubits(&self) -> std::ops::Range<usize> {
        0..self.code.num_qubits()
    }

    /// Qubits exposed to erasure at `slice`.
    pub fn exposed(&self, slice: usize) -> &[usize] {
        &self.exposed[slice]
    }

    pub fn num_exposed_locations(&self) -> usize {
        self.exposed.iter().map(Vec::len).sum()
    }

    /// Initial product state of every ancilla qubit.
    pub fn births(&self) -> &[(usize, Basis)] {
        &self.births
    }

    /// Encoded `|0̄⟩^k` on the data block and every ancilla in its birth
    /// state.
    pub fn initial_state(&self) -> MixedStabilizerState {
        let total = self.circuit.num_qubits();
        let mut bases = vec![Basis::Z; total];
        for (i, b) in encoder_inputs(&self.code, LogicalBasis::Zero).into_iter().enumerate() {
            bases[i] = b;
        }
        for &(qubit, b) in &self.births {
            bases[qubit] = b;
        }
        let mut state = MixedStabilizerState::product(&bases);
        for layer in self.code.circuit().layers() {
            for g in layer {
                state.apply_two_qubit(&g.gate, g.a, g.b);
            }
        }
        state
    }

    /// Samples erased locations: each exposed `(slice, qubit)` with
    /// probability `p`, in slice then qubit-list order.
    pub fn sample_erasures<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (slice, qubits) in self.exposed.iter().enumerate() {
            for &q in qubits {
                if rng.random::<f64>() < p {
                    out.push((slice, q));
                }
            }
        }
        out
    }

    fn flip_rows(&self, slice: usize, p: &SparsePauli, v: &mut BitVec) {
        let table = &self.flips[slice];
        if table.is_empty() {
            return;
        }
        for (q, &bits) in &p.bits {
            if let Some(f) = table.get(q) {
                if bits & 1 == 1 {
                    for &r in &f.by_x {
                        v.flip(r as usize);
                    }
                }
                if bits & 2 == 2 {
                    for &r in &f.by_z {
                        v.flip(r as usize);
                    }
                }
            }
        }
    }

    /// `(syndrome ‖ logical action)` of a Pauli with parts `(x, z)` at one
    /// location, by forward propagation.
    pub fn column(&self, slice: usize, qubit: usize, x: bool, z: bool) -> BitVec {
        let mut v = BitVec::zeros(self.num_checks() + self.payload_len());
        let mut p = SparsePauli::single(qubit, x, z);
        self.flip_rows(slice, &p, &mut v);
        self.drop_readouts(slice, &mut p);
        for s in slice + 1..=self.circuit.depth() {
            if p.is_identity() {
                break;
            }
            self.circuit.apply_layer_sparse(s, &mut p);
            self.flip_rows(s, &p, &mut v);
            self.drop_readouts(s, &mut p);
        }
        v
    }

    fn drop_readouts(&self, slice: usize, p: &mut SparsePauli) {
        for q in &self.readout_at[slice] {
            p.bits.remove(q);
        }
    }

    /// `(syndrome ‖ logical action)` of a set of located Paulis.
    pub fn fault_vector(&self, faults: &[LocatedPauli]) -> BitVec {
        let mut v = BitVec::zeros(self.num_checks() + self.payload_len());
        for f in faults {
            let (x, z) = f.pauli.bits();
            v.xor_assign(&self.column(f.slice, f.qubit, x, z));
        }
        v
    }

    /// Splits a column into its syndrome and logical parts.
    pub fn split(&self, v: &BitVec) -> (BitVec, BitVec) {
        let c = self.num_checks();
        let syn: Vec<usize> = (0..c).collect();
        let log: Vec<usize> = (c..c + self.payload_len()).collect();
        (v.select(&syn), v.select(&log))
    }

    /// Dense fault operator from located Paulis.
    pub fn to_fault_operator(&self, faults: &[LocatedPauli]) -> FaultOperator {
        let mut f = FaultOperator::identity(self.circuit.num_qubits(), self.circuit.depth());
        for lp in faults {
            let slice = &mut f.slices[lp.slice];
            let (x, z) = lp.pauli.bits();
            if x {
                slice.x_bits_mut().flip(lp.qubit);
            }
            if z {
                slice.z_bits_mut().flip(lp.qubit);
            }
        }
        f
    }

    /// `{←S_i}` for every check, followed by the back-propagated data
    /// logicals of the payload. Dense; meant for small protocols.
    pub fn spacetime_stabilizers(&self) -> Result<Vec<FaultOperator>, FtError> {
        let total = self.circuit.num_qubits();
        let depth = self.circuit.depth();
        let mut out = Vec::with_capacity(self.num_checks() + self.payload_len());
        for evs in &self.outcome.checks {
            let mut f = FaultOperator::identity(total, depth);
            for &e in evs {
                let ev = &self.outcome.events[e];
                let op = match &ev.observable {
                    Observable::Single { qubit, basis } => match basis {
                        Basis::Z => PauliOperator::z_type(total, &[*qubit]),
                        Basis::X => PauliOperator::x_type(total, &[*qubit]),
                    },
                    Observable::Pauli(op) => op.clone(),
                };
                f.slices[ev.slice].mul_assign_right(&op);
            }
            out.push(back_cumulant(&self.circuit, &f)?);
        }
        for op in &self.payload {
            let mut f = FaultOperator::identity(total, depth);
            f.slices[depth] = op.clone();
            out.push(back_cumulant(&self.circuit, &f)?);
        }
        Ok(out)
    }
}

/// Column of a location computed from dense spacetime stabilizers.
pub fn dense_column(stabilizers: &[FaultOperator], slice: usize, qubit: usize, x: bool, z: bool) -> BitVec {
    BitVec::from_bools(stabilizers.iter().map(|s| {
        let op = &s.slices[slice];
        (x && op.z_bits().get(qubit)) ^ (z && op.x_bits().get(qubit))
    }))
}

/// Any fault on the erased locations whose syndrome is `syndrome`, with
/// free variables set to zero; `None` if no such fault exists.
pub fn erasure_decode(
    protocol: &SpacetimeProtocol,
    syndrome: &BitVec,
    erased: &[(usize, usize)],
) -> Option<Vec<LocatedPauli>> {
    if syndrome.len() != protocol.num_checks() {
        return None;
    }
    let mut columns = Vec::with_capacity(2 * erased.len());
    for &(slice, qubit) in erased {
        for (x, z) in [(true, false), (false, true)] {
            let (syn, _) = protocol.split(&protocol.column(slice, qubit, x, z));
            columns.push(syn);
        }
    }
    let combo = gf2::solve(&columns, syndrome)?;
    Some(
        erased
            .iter()
            .enumerate()
            .filter_map(|(i, &(slice, qubit))| {
                let pauli = Pauli::from_bits(combo.get(2 * i), combo.get(2 * i + 1));
                (pauli != Pauli::I).then_some(LocatedPauli { slice, qubit, pauli })
            })
            .collect(),
    )
}

/// Outcome of [`decode_trial`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub erased: usize,
    pub failed: bool,
}

/// Logical part of `truth × decoded`, where `truth` places `paulis[i]` at
/// `erased[i]` and the decoded fault combines the pivot columns of the
/// erased locations. Zero iff decoding succeeds.
pub fn decode_residual(
    protocol: &SpacetimeProtocol,
    erased: &[(usize, usize)],
    paulis: &[Pauli],
) -> BitVec {
    assert_eq!(erased.len(), paulis.len());
    let checks = protocol.num_checks();
    let mut basis = XorBasis::new(checks);
    let mut truth = BitVec::zeros(checks + protocol.payload_len());
    for (&(slice, qubit), &pauli) in erased.iter().zip(paulis) {
        let cx = protocol.column(slice, qubit, true, false);
        let cz = protocol.column(slice, qubit, false, true);
        let (x, z) = pauli.bits();
        if x {
            truth.xor_assign(&cx);
        }
        if z {
            truth.xor_assign(&cz);
        }
        basis.insert(cx);
        basis.insert(cz);
    }
    let residual = basis.reduce(truth);
    debug_assert!((0..checks).all(|i| !residual.get(i)));
    protocol.split(&residual).1
}

/// One decoding trial: erasures sampled at rate `p` with a uniformly random
/// non-identity Pauli at each. Fails iff the residual acts nontrivially on
/// a data logical.
pub fn decode_trial<R: Rng + ?Sized>(
    protocol: &SpacetimeProtocol,
    p: f64,
    rng: &mut R,
) -> TrialOutcome {
    let erased = protocol.sample_erasures(p, rng);
    let paulis: Vec<Pauli> = erased
        .iter()
        .map(|_| Pauli::NON_IDENTITY[rng.random_range(0..3usize)])
        .collect();
    let residual = decode_residual(protocol, &erased, &paulis);
    TrialOutcome {
        erased: erased.len(),
        failed: !residual.is_zero(),
    }
}
