//! Exact mixed-state simulation of noisy encoding, distillation and Steane
//! error correction. Erasures replace qubits by maximally mixed ones.
//!
//! Exposure model: every qubit of a block being encoded is exposed after
//! each encoding layer; both blocks of a check are exposed once between the
//! transversal CNOT and the readout; the data block and both ancillas are
//! exposed after each of the two CNOT levels of a Steane round. Ancillas
//! are distilled off line, so the data block is not exposed while they are
//! prepared, and a block is no longer exposed once it is read out.

use rand::Rng;
use rcqec_core::{
    Basis, BitVec, Boundary, CircuitCode, MixedStabilizerState, PauliOperator, Role,
};

use crate::FtError;

/// Encoded state prepared by the distillation circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalBasis {
    /// `|0̄⟩^k`
    Zero,
    /// `|+̄⟩^k`
    Plus,
}

/// Erasure at the slice following level `step` of the operation's own
/// schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ErasureEvent {
    pub step: usize,
    pub qubit: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErasureRecord {
    pub events: Vec<ErasureEvent>,
}

impl ErasureRecord {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

fn sample_erasures<R: Rng + ?Sized>(
    qubits: impl IntoIterator<Item = usize>,
    p: f64,
    rng: &mut R,
) -> Vec<usize> {
    qubits
        .into_iter()
        .filter(|_| rng.random::<f64>() < p)
        .collect()
}

fn check_rate(p: f64) -> Result<(), FtError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(FtError::InvalidArgument(format!("erasure rate {p} outside [0, 1]")));
    }
    Ok(())
}

/// Input product state of the encoder: `|+⟩` on X-stabilizer inputs, `|0⟩`
/// on Z-stabilizer inputs, and the logical inputs in `basis`.
pub fn encoder_inputs(code: &CircuitCode, basis: LogicalBasis) -> Vec<Basis> {
    code.layout()
        .roles
        .iter()
        .map(|r| match r {
            Role::XStabilizer => Basis::X,
            Role::ZStabilizer => Basis::Z,
            Role::Logical => match basis {
                LogicalBasis::Zero => Basis::Z,
                LogicalBasis::Plus => Basis::X,
            },
        })
        .collect()
}

/// Encodes with an erasure opportunity on every qubit after each layer.
pub fn prepare_noisy_encoded_state<R: Rng + ?Sized>(
    code: &CircuitCode,
    basis: LogicalBasis,
    p: f64,
    rng: &mut R,
) -> Result<(MixedStabilizerState, ErasureRecord), FtError> {
    if !code.is_css() {
        return Err(FtError::NotCss);
    }
    check_rate(p)?;
    let n = code.num_qubits();
    let mut state = MixedStabilizerState::product(&encoder_inputs(code, basis));
    let mut record = ErasureRecord::default();
    for (l, layer) in code.circuit().layers().iter().enumerate() {
        for g in layer {
            state.apply_two_qubit(&g.gate, g.a, g.b);
        }
        let erased = sample_erasures(0..n, p, rng);
        state.erase(&erased);
        record
            .events
            .extend(erased.into_iter().map(|qubit| ErasureEvent { step: l + 1, qubit }));
    }
    Ok((state, record))
}

/// Result of one transversal check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub block: MixedStabilizerState,
    /// Readout of the measured block, `true` for outcome `-1`.
    pub bits: BitVec,
    /// Erased qubits; the kept block is `0..n`, the measured one `n..2n`.
    pub erasures: Vec<usize>,
}

fn transversal_check<R: Rng + ?Sized>(
    keep: &MixedStabilizerState,
    measure: &MixedStabilizerState,
    bit_check: bool,
    p: f64,
    rng: &mut R,
) -> Result<CheckOutcome, FtError> {
    let n = keep.num_qubits();
    if measure.num_qubits() != n {
        return Err(rcqec_core::Error::SizeMismatch {
            expected: n,
            found: measure.num_qubits(),
        }
        .into());
    }
    check_rate(p)?;
    let mut s = keep.tensor(measure);
    for i in 0..n {
        if bit_check {
            s.apply_cnot(i, n + i);
        } else {
            s.apply_cnot(n + i, i);
        }
    }
    let erasures = sample_erasures(0..2 * n, p, rng);
    s.erase(&erasures);
    let measured: Vec<usize> = (n..2 * n).collect();
    let basis = if bit_check { Basis::Z } else { Basis::X };
    let bits = s.measure_and_discard(&measured, basis, rng);
    Ok(CheckOutcome {
        block: s,
        bits,
        erasures,
    })
}

/// Transversal CNOT from `keep` onto `measure`, then Z readout of `measure`.
pub fn bit_flip_check<R: Rng + ?Sized>(
    keep: &MixedStabilizerState,
    measure: &MixedStabilizerState,
    p: f64,
    rng: &mut R,
) -> Result<CheckOutcome, FtError> {
    transversal_check(keep, measure, true, p, rng)
}

/// Transversal CNOT from `measure` onto `keep`, then X readout of `measure`.
pub fn phase_flip_check<R: Rng + ?Sized>(
    keep: &MixedStabilizerState,
    measure: &MixedStabilizerState,
    p: f64,
    rng: &mut R,
) -> Result<CheckOutcome, FtError> {
    transversal_check(keep, measure, false, p, rng)
}

/// Everything a distillation run produced besides the survivor.
#[derive(Clone, Debug)]
pub struct ProtocolState {
    /// Surviving blocks; a single one once all rounds have run.
    pub blocks: Vec<MixedStabilizerState>,
    /// Pauli frame of each surviving block.
    pub frame: Vec<PauliOperator>,
    /// Readouts of every check, per round.
    pub transcript: Vec<Vec<BitVec>>,
    /// Erasures with qubit `b·n + i` for qubit `i` of prepared block `b`.
    /// Steps `1..=d` are encoding layers, `d + r` is check round `r`.
    pub erasures: ErasureRecord,
}

/// Prepares `2^q` noisy blocks and runs `q` rounds of pairwise checks; odd
/// rounds are bit checks and even rounds phase checks. Adjacent survivors
/// are paired and the even one is kept.
pub fn distill<R: Rng + ?Sized>(
    code: &CircuitCode,
    basis: LogicalBasis,
    q: usize,
    p: f64,
    rng: &mut R,
) -> Result<(MixedStabilizerState, ProtocolState), FtError> {
    distill_with(code, basis, q, p, rng, |_, _| {})
}

/// [`distill`] calling `observe(r, survivor)` after every round `r`, where
/// `survivor` is the block that descends from prepared block 0.
pub fn distill_with<R, F>(
    code: &CircuitCode,
    basis: LogicalBasis,
    q: usize,
    p: f64,
    rng: &mut R,
    mut observe: F,
) -> Result<(MixedStabilizerState, ProtocolState), FtError>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &MixedStabilizerState),
{
    if q == 0 {
        return Err(FtError::InvalidArgument("distillation needs q >= 1".into()));
    }
    if q > 20 {
        return Err(FtError::InvalidArgument(format!("q = {q} is too large")));
    }
    let n = code.num_qubits();
    let d = code.circuit().depth();
    let mut erasures = ErasureRecord::default();
    // (origin block index, state)
    let mut blocks: Vec<(usize, MixedStabilizerState)> = Vec::with_capacity(1 << q);
    for b in 0..1usize << q {
        let (state, rec) = prepare_noisy_encoded_state(code, basis, p, rng)?;
        erasures.events.extend(rec.events.into_iter().map(|e| ErasureEvent {
            step: e.step,
            qubit: b * n + e.qubit,
        }));
        blocks.push((b, state));
    }
    let mut transcript = Vec::with_capacity(q);
    for r in 1..=q {
        let bit_check = r % 2 == 1;
        let mut next = Vec::with_capacity(blocks.len() / 2);
        let mut readouts = Vec::with_capacity(blocks.len() / 2);
        let mut iter = blocks.into_iter();
        while let (Some((ka, keep)), Some((kb, measure))) = (iter.next(), iter.next()) {
            let out = transversal_check(&keep, &measure, bit_check, p, rng)?;
            for &e in &out.erasures {
                let qubit = if e < n { ka * n + e } else { kb * n + e - n };
                erasures.events.push(ErasureEvent { step: d + r, qubit });
            }
            readouts.push(out.bits);
            next.push((ka, out.block));
        }
        blocks = next;
        transcript.push(readouts);
        observe(r, &blocks[0].1);
    }
    let blocks: Vec<MixedStabilizerState> = blocks.into_iter().map(|(_, s)| s).collect();
    let frame = blocks.iter().map(|s| pauli_frame(code, basis, s)).collect();
    let survivor = blocks[0].clone();
    Ok((
        survivor,
        ProtocolState {
            blocks,
            frame,
            transcript,
            erasures,
        },
    ))
}

/// Pauli that, applied to `state`, makes every code stabilizer and every
/// logical of `basis` found in the state's group appear with sign `+1`.
pub fn pauli_frame(
    code: &CircuitCode,
    basis: LogicalBasis,
    state: &MixedStabilizerState,
) -> PauliOperator {
    let n = code.num_qubits();
    let mut frame = PauliOperator::identity(n);
    for (s, partner) in code.stabilizers().iter().zip(code.partners()) {
        if state.group_sign(s) == Some(-1) {
            frame.mul_assign_right(partner);
        }
    }
    let (fixed, flip) = match basis {
        LogicalBasis::Zero => (code.logical_z(), code.logical_x()),
        LogicalBasis::Plus => (code.logical_x(), code.logical_z()),
    };
    for (l, partner) in fixed.iter().zip(flip) {
        if state.group_sign(l) == Some(-1) {
            frame.mul_assign_right(partner);
        }
    }
    frame
}

#[derive(Clone, Debug)]
pub struct SteaneTranscript {
    /// Z readout of the `|+̄⟩` ancilla.
    pub plus_bits: BitVec,
    /// X readout of the `|0̄⟩` ancilla.
    pub zero_bits: BitVec,
    /// Erasures during the gadget; step 1 follows the first CNOT level and
    /// step 2 the second. Qubits `0..N` are the register, then the `|+̄⟩`
    /// and `|0̄⟩` ancillas.
    pub erasures: ErasureRecord,
    pub plus_prep: ProtocolState,
    pub zero_prep: ProtocolState,
}

/// One Steane round on the code block at positions `data` of `state`, with
/// both ancillas distilled over `q` rounds.
pub fn steane_ec_round<R: Rng + ?Sized>(
    state: &mut MixedStabilizerState,
    data: &[usize],
    code: &CircuitCode,
    q: usize,
    p: f64,
    rng: &mut R,
) -> Result<SteaneTranscript, FtError> {
    let (plus, plus_prep) = distill(code, LogicalBasis::Plus, q, p, rng)?;
    let (zero, zero_prep) = distill(code, LogicalBasis::Zero, q, p, rng)?;
    steane_with_ancillas(state, data, &plus, &zero, p, rng).map(|(plus_bits, zero_bits, erasures)| {
        SteaneTranscript {
            plus_bits,
            zero_bits,
            erasures,
            plus_prep,
            zero_prep,
        }
    })
}

/// Steane round with the given ancillas; returns the two readouts and the
/// gadget's erasures.
pub fn steane_with_ancillas<R: Rng + ?Sized>(
    state: &mut MixedStabilizerState,
    data: &[usize],
    plus: &MixedStabilizerState,
    zero: &MixedStabilizerState,
    p: f64,
    rng: &mut R,
) -> Result<(BitVec, BitVec, ErasureRecord), FtError> {
    let n = data.len();
    if plus.num_qubits() != n || zero.num_qubits() != n {
        return Err(rcqec_core::Error::SizeMismatch {
            expected: n,
            found: plus.num_qubits().max(zero.num_qubits()),
        }
        .into());
    }
    if data.iter().any(|&q| q >= state.num_qubits()) {
        return Err(FtError::InvalidArgument("data qubit outside the register".into()));
    }
    check_rate(p)?;
    let base = state.num_qubits();
    let mut s = state.tensor(plus).tensor(zero);
    let exposed: Vec<usize> = data.iter().copied().chain(base..base + 2 * n).collect();
    let mut record = ErasureRecord::default();
    for (i, &dq) in data.iter().enumerate() {
        s.apply_cnot(dq, base + i);
    }
    let erased = sample_erasures(exposed.iter().copied(), p, rng);
    s.erase(&erased);
    record
        .events
        .extend(erased.into_iter().map(|qubit| ErasureEvent { step: 1, qubit }));
    for (i, &dq) in data.iter().enumerate() {
        s.apply_cnot(base + n + i, dq);
    }
    let erased = sample_erasures(exposed.iter().copied(), p, rng);
    s.erase(&erased);
    record
        .events
        .extend(erased.into_iter().map(|qubit| ErasureEvent { step: 2, qubit }));
    let plus_qubits: Vec<usize> = (base..base + n).collect();
    let plus_bits = s.measure_and_discard(&plus_qubits, Basis::Z, rng);
    // the zero ancilla has shifted down into the freed positions
    let zero_bits = s.measure_and_discard(&plus_qubits, Basis::X, rng);
    *state = s;
    Ok((plus_bits, zero_bits, record))
}

/// `k` encoded EPR pairs between block A (`0..n`) and block B (`n..2n`),
/// prepared without noise.
pub fn encoded_epr_pairs(code: &CircuitCode) -> MixedStabilizerState {
    let n = code.num_qubits();
    let mut gens = Vec::with_capacity(2 * n);
    for (i, role) in code.layout().roles.iter().enumerate() {
        match role {
            Role::XStabilizer => {
                gens.push(PauliOperator::x_type(2 * n, &[i]));
                gens.push(PauliOperator::x_type(2 * n, &[n + i]));
            }
            Role::ZStabilizer => {
                gens.push(PauliOperator::z_type(2 * n, &[i]));
                gens.push(PauliOperator::z_type(2 * n, &[n + i]));
            }
            Role::Logical => {
                gens.push(PauliOperator::x_type(2 * n, &[i, n + i]));
                gens.push(PauliOperator::z_type(2 * n, &[i, n + i]));
            }
        }
    }
    let mut state = MixedStabilizerState::from_generators(2 * n, gens).expect("valid EPR inputs");
    for layer in code.circuit().layers() {
        for g in layer {
            state.apply_two_qubit(&g.gate, g.a, g.b);
            state.apply_two_qubit(&g.gate, n + g.a, n + g.b);
        }
    }
    state
}

/// Measures every stabilizer generator of the block at `offset`.
pub fn measure_stabilizers<R: Rng + ?Sized>(
    state: &mut MixedStabilizerState,
    code: &CircuitCode,
    offset: usize,
    rng: &mut R,
) -> Result<Vec<i8>, FtError> {
    let total = state.num_qubits();
    let positions: Vec<usize> = (offset..offset + code.num_qubits()).collect();
    code.stabilizers()
        .iter()
        .map(|s| {
            let mut op = s.embed(total, &positions);
            op.set_sign(1);
            state.measure_pauli(&op, rng).map_err(FtError::from)
        })
        .collect()
}

/// One entropy-density trial: a fresh periodic CSS code, then distillation
/// of `|0̄⟩^k` over `q_max` rounds. Returns the survivor's entropy after
/// each round listed in `report`, in that order.
pub fn entropy_trial<R: Rng + ?Sized>(
    n: usize,
    rate: f64,
    d: usize,
    q_max: usize,
    report: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<Vec<usize>, FtError> {
    if let Some(&r) = report.iter().find(|&&r| r == 0 || r > q_max) {
        return Err(FtError::InvalidArgument(format!(
            "reported round {r} outside 1..={q_max}"
        )));
    }
    let code = CircuitCode::random(n, rate, d, Boundary::Periodic, true, rng)?;
    let mut out = vec![0usize; report.len()];
    distill_with(&code, LogicalBasis::Zero, q_max, p, rng, |r, s| {
        for (slot, &want) in out.iter_mut().zip(report) {
            if want == r {
                *slot = s.entropy();
            }
        }
    })?;
    Ok(out)
}

/// One mutual-information trial: encoded EPR pairs, `rounds` Steane rounds
/// on block A, perfect stabilizer measurement of both blocks, then
/// `I(A:B)` in bits.
pub fn mutual_info_trial<R: Rng + ?Sized>(
    n: usize,
    rate: f64,
    d: usize,
    q: usize,
    rounds: usize,
    p: f64,
    rng: &mut R,
) -> Result<usize, FtError> {
    let code = CircuitCode::random(n, rate, d, Boundary::Periodic, true, rng)?;
    let mut state = encoded_epr_pairs(&code);
    let m = code.num_qubits();
    let data: Vec<usize> = (0..m).collect();
    for _ in 0..rounds {
        steane_ec_round(&mut state, &data, &code, q, p, rng)?;
    }
    measure_stabilizers(&mut state, &code, 0, rng)?;
    measure_stabilizers(&mut state, &code, m, rng)?;
    Ok(mutual_information(&state, m))
}

/// `S_A + S_B - S_AB` with A the first `size_a` qubits.
pub fn mutual_information(state: &MixedStabilizerState, size_a: usize) -> usize {
    let total = state.num_qubits();
    let a: Vec<usize> = (0..size_a).collect();
    let b: Vec<usize> = (size_a..total).collect();
    state.reduced_entropy(&a) + state.reduced_entropy(&b) - state.entropy()
}
