//! Checkerboard ansatz: alternating layers of nearest-neighbour two-qubit gates.
//!
//! Odd layers (1st, 3rd, ...) act on `(0,1), (2,3), ...` and even layers on
//! `(1,2), (3,4), ...`. With an even qubit count the even layers close the ring
//! with `(n-1, 0)`, so every layer holds `n/2` gates. With an odd count one
//! qubit idles per layer, cycling through `n-1, 0, 1, 2, ...`, and the
//! remaining qubits are paired in ring order starting after the idle one.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{StateVector, TwoQubitGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateFamily {
    /// Particle-conserving two-parameter gate acting on the `{|01>, |10>}` block.
    MatchGate,
    /// `R_y x R_y`, then `exp(-i t/2 Z x Z)`, then `R_y x R_y`; five parameters.
    GenericEntangler,
}

impl GateFamily {
    pub fn arity(self) -> usize {
        match self {
            GateFamily::MatchGate => 2,
            GateFamily::GenericEntangler => 5,
        }
    }

    pub fn gate(self, params: &[f64]) -> Result<TwoQubitGate> {
        if params.len() != self.arity() {
            return Err(Error::ParameterCount {
                expected: self.arity(),
                actual: params.len(),
            });
        }
        Ok(match self {
            GateFamily::MatchGate => match_gate(params[0], params[1]),
            GateFamily::GenericEntangler => {
                generic_entangler([params[0], params[1], params[2], params[3], params[4]])
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    /// Zero-based layer index.
    pub layer: usize,
    /// `(qa, qb)`; `qa` is the gate's low-order input.
    pub qubits: (usize, usize),
    pub params: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    n_qubits: usize,
    n_layers: usize,
    family: GateFamily,
    placements: Vec<Placement>,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize, family: GateFamily) -> Result<Self> {
        let layout = checkerboard_layout(n_qubits, n_layers)?;
        let arity = family.arity();
        let placements = layout
            .into_iter()
            .enumerate()
            .flat_map(|(layer, pairs)| pairs.into_iter().map(move |q| (layer, q)))
            .enumerate()
            .map(|(k, (layer, qubits))| Placement {
                layer,
                qubits,
                params: k * arity..(k + 1) * arity,
            })
            .collect();
        Ok(Self {
            n_qubits,
            n_layers,
            family,
            placements,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn family(&self) -> GateFamily {
        self.family
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn gates_per_layer(&self) -> usize {
        self.n_qubits / 2
    }

    pub fn n_params(&self) -> usize {
        self.family.arity() * self.n_layers * self.gates_per_layer()
    }

    /// Apply every placement to `state` in layer order.
    pub fn apply(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::ParameterCount {
                expected: self.n_params(),
                actual: params.len(),
            });
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: state.n_qubits(),
            });
        }
        for p in &self.placements {
            let gate = self.family.gate(&params[p.params.clone()])?;
            state.apply_gate(&gate, p.qubits.0, p.qubits.1)?;
        }
        Ok(())
    }
}

/// Qubit pairs of each layer; see the module docs for the rule.
pub fn checkerboard_layout(n_qubits: usize, n_layers: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if n_qubits < 2 {
        return Err(Error::InvalidAnsatz(format!(
            "checkerboard layout needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let n = n_qubits;
    let layers = (0..n_layers)
        .map(|layer| {
            if n == 2 {
                return vec![(0, 1)];
            }
            let start = if n % 2 == 1 {
                // idle qubit is (n - 1 + layer) mod n; pairing starts right after it
                layer % n
            } else {
                layer % 2
            };
            (0..n / 2)
                .map(|k| ((start + 2 * k) % n, (start + 2 * k + 1) % n))
                .collect()
        })
        .collect();
    Ok(layers)
}

/// Two-parameter match gate on `|00>, |01>, |10>, |11>`:
///
/// ```text
/// [ 1      0                 0               0 ]
/// [ 0      cos t1            e^{i t2} sin t1 0 ]
/// [ 0      e^{-i t2} sin t1  -cos t1         0 ]
/// [ 0      0                 0               1 ]
/// ```
pub fn match_gate(theta1: f64, theta2: f64) -> TwoQubitGate {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (s, c) = theta1.sin_cos();
    let phase = Complex64::from_polar(1.0, theta2);
    TwoQubitGate::from_unitary([
        [one, z, z, z],
        [z, Complex64::new(c, 0.0), phase * s, z],
        [z, phase.conj() * s, Complex64::new(-c, 0.0), z],
        [z, z, z, one],
    ])
}

fn ry(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, -s], [s, c]]
}

/// Product `a` on `qa` and `b` on `qb` in the gate's `bit(qa) + 2 bit(qb)` indexing.
fn product(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = Complex64::new(a[r & 1][c & 1] * b[r >> 1][c >> 1], 0.0);
        }
    }
    m
}

/// `(R_y(t4) x R_y(t5)) exp(-i t3/2 Z x Z) (R_y(t1) x R_y(t2))`, with `t1`, `t4` on `qa`.
pub fn generic_entangler(theta: [f64; 5]) -> TwoQubitGate {
    let first = TwoQubitGate::from_unitary(product(ry(theta[0]), ry(theta[1])));
    let last = TwoQubitGate::from_unitary(product(ry(theta[3]), ry(theta[4])));
    let mut zz = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, row) in zz.iter_mut().enumerate() {
        // Z x Z eigenvalue is +1 on even parity, -1 on odd parity
        let parity = if (k & 1) ^ (k >> 1) == 0 { 1.0 } else { -1.0 };
        row[k] = Complex64::from_polar(1.0, -theta[2] / 2.0 * parity);
    }
    last.mul(&TwoQubitGate::from_unitary(zz)).mul(&first)
}

/// Basis state with `initial_occupations` set, then all placements in layer order.
pub fn prepare_state(
    spec: &AnsatzSpec,
    params: &[f64],
    initial_occupations: &[usize],
) -> Result<StateVector> {
    let mut state = StateVector::basis_state(spec.n_qubits, initial_occupations)?;
    spec.apply(&mut state, params)?;
    Ok(state)
}

/// `k` particles on alternating sites `0, 2, 4, ...`, wrapping onto odd sites once
/// the even ones are full.
pub fn alternating_occupations(n_qubits: usize, k: usize) -> Result<Vec<usize>> {
    if k > n_qubits {
        return Err(Error::InvalidAnsatz(format!(
            "cannot place {k} particles on {n_qubits} sites"
        )));
    }
    let mut sites: Vec<usize> = (0..n_qubits)
        .step_by(2)
        .chain((1..n_qubits).step_by(2))
        .take(k)
        .collect();
    sites.sort_unstable();
    Ok(sites)
}
