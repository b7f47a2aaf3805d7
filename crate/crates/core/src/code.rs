//! Brickwork random-circuit codes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{sample_css_two_qubit_gate, sample_two_qubit_clifford, TwoQubitClifford};
use crate::gf2::BitVec;
use crate::pauli::PauliOperator;
use crate::rng::seeded;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// A two-qubit gate placed on qubits `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlacedGate {
    pub a: usize,
    pub b: usize,
    pub gate: TwoQubitClifford,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrickworkCircuit {
    n: usize,
    boundary: Boundary,
    css: bool,
    layers: Vec<Vec<PlacedGate>>,
}

/// Qubit pairs of brickwork layer `layer`.
///
/// Open boundary: `(i, i+1)` with `i ≡ layer (mod 2)`. Periodic: pairs start
/// at `layer` and wrap, so for odd `n` the idle qubit moves each layer.
pub fn brickwork_pairs(n: usize, layer: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Open => (layer % 2..n.saturating_sub(1))
            .step_by(2)
            .map(|i| (i, i + 1))
            .collect(),
        Boundary::Periodic => {
            if n == 2 {
                return vec![(0, 1)];
            }
            (0..n / 2)
                .map(|j| ((layer + 2 * j) % n, (layer + 2 * j + 1) % n))
                .collect()
        }
    }
}

impl BrickworkCircuit {
    /// Samples `d` brickwork layers of random two-qubit gates on `n` qubits.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        d: usize,
        boundary: Boundary,
        css: bool,
        rng: &mut R,
    ) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 qubits, got {n}")));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("depth must be positive".into()));
        }
        let layers = (0..d)
            .map(|layer| {
                brickwork_pairs(n, layer, boundary)
                    .into_iter()
                    .map(|(a, b)| PlacedGate {
                        a,
                        b,
                        gate: if css {
                            sample_css_two_qubit_gate(rng)
                        } else {
                            sample_two_qubit_clifford(rng)
                        },
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            boundary,
            css,
            layers,
        })
    }

    /// Circuit with explicit layers; used for hand-built examples.
    pub fn from_layers(n: usize, boundary: Boundary, layers: Vec<Vec<PlacedGate>>) -> Self {
        let css = layers.iter().flatten().all(|g| g.gate.is_css());
        Self {
            n,
            boundary,
            css,
            layers,
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_css(&self) -> bool {
        self.css
    }

    pub fn layers(&self) -> &[Vec<PlacedGate>] {
        &self.layers
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &mut PauliOperator) {
        for layer in &self.layers {
            for g in layer {
                g.gate.apply(p, g.a, g.b);
            }
        }
    }

    /// `U† P U`.
    pub fn conjugate_inverse(&self, p: &mut PauliOperator) {
        for layer in self.layers.iter().rev() {
            for g in layer {
                g.gate.apply_inverse(p, g.a, g.b);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    ZStabilizer,
    XStabilizer,
    Logical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputLayout {
    pub roles: Vec<Role>,
    pub k: usize,
    /// Extra stabilizer roles on each side.
    pub padding: usize,
}

impl InputLayout {
    /// Evenly spaced logical inputs among `n` core qubits, plus `2d`
    /// stabilizer roles on each side for an open boundary. CSS layouts
    /// alternate X- and Z-stabilizer roles, starting with X.
    pub fn assign(
        n: usize,
        rate: f64,
        d: usize,
        boundary: Boundary,
        css: bool,
    ) -> Result<Self, Error> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::IncompatibleRate { n, rate });
        }
        let k = (n as f64 * rate + 1e-9).floor() as usize;
        if k == 0 || k >= n {
            return Err(Error::IncompatibleRate { n, rate });
        }
        let padding = match boundary {
            Boundary::Open => 2 * d,
            Boundary::Periodic => 0,
        };
        let total = n + 2 * padding;
        let mut logical = vec![false; total];
        for j in 0..k {
            let pos = ((2 * j + 1) * n) / (2 * k);
            logical[padding + pos] = true;
        }
        let mut next_x = true;
        let roles = logical
            .into_iter()
            .map(|is_logical| {
                if is_logical {
                    Role::Logical
                } else if css {
                    let r = if next_x { Role::XStabilizer } else { Role::ZStabilizer };
                    next_x = !next_x;
                    r
                } else {
                    Role::ZStabilizer
                }
            })
            .collect();
        Ok(Self { roles, k, padding })
    }

    pub fn num_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn logical_inputs(&self) -> Vec<usize> {
        self.inputs_with(Role::Logical)
    }

    fn inputs_with(&self, role: Role) -> Vec<usize> {
        (0..self.roles.len()).filter(|&i| self.roles[i] == role).collect()
    }
}

/// Stabilizer code defined by an encoding circuit and input roles.
#[derive(Clone, Debug)]
pub struct CircuitCode {
    circuit: BrickworkCircuit,
    layout: InputLayout,
    stabilizers: Vec<PauliOperator>,
    stabilizer_roles: Vec<Role>,
    stabilizer_inputs: Vec<usize>,
    partners: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
}

impl CircuitCode {
    /// Stabilizers `U Z_i U†` (or `U X_i U†` for X roles) and logicals
    /// `U X_i U†`, `U Z_i U†`, with generators listed in input order.
    pub fn derive(circuit: BrickworkCircuit, layout: InputLayout) -> Result<Self, Error> {
        let n = circuit.num_qubits();
        if layout.num_qubits() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: layout.num_qubits(),
            });
        }
        if !circuit.is_css() && layout.roles.contains(&Role::XStabilizer) {
            return Err(Error::NotCss);
        }
        let push = |q: usize, x: bool| {
            let mut p = if x {
                PauliOperator::x_type(n, &[q])
            } else {
                PauliOperator::z_type(n, &[q])
            };
            circuit.conjugate(&mut p);
            p
        };
        let mut code = Self {
            circuit: circuit.clone(),
            layout: layout.clone(),
            stabilizers: Vec::new(),
            stabilizer_roles: Vec::new(),
            stabilizer_inputs: Vec::new(),
            partners: Vec::new(),
            logical_x: Vec::new(),
            logical_z: Vec::new(),
        };
        for (q, &role) in layout.roles.iter().enumerate() {
            match role {
                Role::ZStabilizer => {
                    code.stabilizers.push(push(q, false));
                    code.partners.push(push(q, true));
                }
                Role::XStabilizer => {
                    code.stabilizers.push(push(q, true));
                    code.partners.push(push(q, false));
                }
                Role::Logical => {
                    code.logical_x.push(push(q, true));
                    code.logical_z.push(push(q, false));
                    continue;
                }
            }
            code.stabilizer_roles.push(role);
            code.stabilizer_inputs.push(q);
        }
        Ok(code)
    }

    /// Samples a random code: layout, then circuit on the padded register.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        rate: f64,
        d: usize,
        boundary: Boundary,
        css: bool,
        rng: &mut R,
    ) -> Result<Self, Error> {
        let layout = InputLayout::assign(n, rate, d, boundary, css)?;
        let circuit = BrickworkCircuit::random(layout.num_qubits(), d, boundary, css, rng)?;
        Self::derive(circuit, layout)
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn num_logicals(&self) -> usize {
        self.logical_x.len()
    }

    pub fn circuit(&self) -> &BrickworkCircuit {
        &self.circuit
    }

    pub fn layout(&self) -> &InputLayout {
        &self.layout
    }

    pub fn is_css(&self) -> bool {
        self.circuit.is_css()
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    /// Role of each stabilizer (X or Z type for CSS codes).
    pub fn stabilizer_roles(&self) -> &[Role] {
        &self.stabilizer_roles
    }

    /// Input qubit that each stabilizer originates from.
    pub fn stabilizer_inputs(&self) -> &[usize] {
        &self.stabilizer_inputs
    }

    /// `partners[i]` anticommutes with stabilizer `i` only and commutes
    /// with every logical.
    pub fn partners(&self) -> &[PauliOperator] {
        &self.partners
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    /// Stabilizers of the given type (CSS codes).
    pub fn stabilizers_of(&self, role: Role) -> Vec<&PauliOperator> {
        self.stabilizers
            .iter()
            .zip(&self.stabilizer_roles)
            .filter(|(_, &r)| r == role)
            .map(|(s, _)| s)
            .collect()
    }

    /// Bit `i` is set iff `e` anticommutes with stabilizer `i`.
    pub fn syndrome(&self, e: &PauliOperator) -> Result<BitVec, Error> {
        if e.num_qubits() != self.num_qubits() {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits(),
                found: e.num_qubits(),
            });
        }
        Ok(BitVec::from_bools(
            self.stabilizers.iter().map(|s| s.anticommutes_with(e)),
        ))
    }

    /// Product of the partners of the set syndrome bits.
    pub fn canonical_error(&self, s: &BitVec) -> Result<PauliOperator, Error> {
        if s.len() != self.stabilizers.len() {
            return Err(Error::SizeMismatch {
                expected: self.stabilizers.len(),
                found: s.len(),
            });
        }
        let mut out = PauliOperator::identity(self.num_qubits());
        for i in s.iter_ones() {
            out.mul_assign_right(&self.partners[i]);
        }
        Ok(out)
    }

    /// Bits `(x_m, z_m)` per logical: whether `e` anticommutes with `Z̄_m`
    /// (an X flip) and with `X̄_m` (a Z flip).
    pub fn logical_action(&self, e: &PauliOperator) -> Vec<(bool, bool)> {
        self.logical_x
            .iter()
            .zip(&self.logical_z)
            .map(|(lx, lz)| (e.anticommutes_with(lz), e.anticommutes_with(lx)))
            .collect()
    }

    /// Hex dump of all generators as `x|z` rows, stabilizers first.
    pub fn generator_dump(&self) -> GeneratorDump {
        let row = |p: &PauliOperator| GeneratorRow {
            x: p.x_bits().to_hex(),
            z: p.z_bits().to_hex(),
            sign: p.sign().unwrap_or(1),
        };
        GeneratorDump {
            n: self.num_qubits(),
            stabilizers: self.stabilizers.iter().map(row).collect(),
            logical_x: self.logical_x.iter().map(row).collect(),
            logical_z: self.logical_z.iter().map(row).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRow {
    pub x: String,
    pub z: String,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDump {
    pub n: usize,
    pub stabilizers: Vec<GeneratorRow>,
    pub logical_x: Vec<GeneratorRow>,
    pub logical_z: Vec<GeneratorRow>,
}

/// Enough to regenerate a code deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    /// Core qubits, excluding boundary padding.
    pub n: usize,
    pub d: usize,
    pub rate: f64,
    pub boundary: Boundary,
    pub css: bool,
    pub seed: u64,
    pub layout: InputLayout,
}

impl CodeDescriptor {
    pub fn new(
        n: usize,
        d: usize,
        rate: f64,
        boundary: Boundary,
        css: bool,
        seed: u64,
    ) -> Result<Self, Error> {
        let layout = InputLayout::assign(n, rate, d, boundary, css)?;
        Ok(Self {
            n,
            d,
            rate,
            boundary,
            css,
            seed,
            layout,
        })
    }

    pub fn build(&self) -> Result<CircuitCode, Error> {
        let mut rng = seeded(self.seed);
        let circuit = BrickworkCircuit::random(
            self.layout.num_qubits(),
            self.d,
            self.boundary,
            self.css,
            &mut rng,
        )?;
        CircuitCode::derive(circuit, self.layout.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brickwork_layouts() {
        assert_eq!(brickwork_pairs(4, 0, Boundary::Open), vec![(0, 1), (2, 3)]);
        assert_eq!(brickwork_pairs(4, 1, Boundary::Open), vec![(1, 2)]);
        assert_eq!(brickwork_pairs(4, 1, Boundary::Periodic), vec![(1, 2), (3, 0)]);
        assert_eq!(brickwork_pairs(5, 1, Boundary::Periodic), vec![(1, 2), (3, 4)]);
        assert_eq!(brickwork_pairs(5, 2, Boundary::Periodic), vec![(2, 3), (4, 0)]);
    }

    #[test]
    fn css_layout_pattern() {
        let l = InputLayout::assign(51, 1.0 / 3.0, 6, Boundary::Periodic, true).unwrap();
        assert_eq!(l.k, 17);
        for chunk in l.roles.chunks(3) {
            assert_eq!(chunk, &[Role::XStabilizer, Role::Logical, Role::ZStabilizer]);
        }
        let one = InputLayout::assign(50, 1.0 / 50.0, 4, Boundary::Periodic, false).unwrap();
        assert_eq!(one.k, 1);
        assert!(InputLayout::assign(50, 0.001, 4, Boundary::Open, false).is_err());
    }

    #[test]
    fn cnot_code() {
        // control on the logical input, target on the stabilizer input
        let gate = crate::clifford::css_gate_set()[2];
        let circuit = BrickworkCircuit::from_layers(
            2,
            Boundary::Open,
            vec![vec![PlacedGate { a: 0, b: 1, gate }]],
        );
        let layout = InputLayout {
            roles: vec![Role::ZStabilizer, Role::Logical],
            k: 1,
            padding: 0,
        };
        let code = CircuitCode::derive(circuit, layout).unwrap();
        assert_eq!(code.stabilizers(), &["ZZ".parse::<PauliOperator>().unwrap()]);
    }
}
