//! Dense statevector simulation.
//!
//! Amplitude `b` belongs to the basis state whose qubit `j` is bit `j` of `b`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Normalization tolerance for states built from raw amplitudes.
pub const NORM_TOL: f64 = 1e-10;
/// Largest imaginary residue accepted from an expectation value.
pub const IMAG_TOL: f64 = 1e-10;
/// Largest deviation from `U U^dagger = I` accepted for a gate.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 4x4 unitary acting on an ordered qubit pair `(qa, qb)`.
///
/// Row/column index `k` of the matrix is `bit(qa) + 2 * bit(qb)`, so `qa`
/// is the lower-order input of the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitGate {
    m: [[Complex64; 4]; 4],
}

impl TwoQubitGate {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self> {
        let gate = Self { m };
        let dev = gate.unitarity_defect();
        if !(dev <= UNITARY_TOL) {
            return Err(Error::NonUnitary(dev));
        }
        Ok(gate)
    }

    /// Skip the unitarity check for matrices that are unitary by construction.
    pub(crate) fn from_unitary(m: [[Complex64; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = ONE;
        }
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.m[c][r].conj();
            }
        }
        Self { m }
    }

    pub fn mul(&self, other: &TwoQubitGate) -> TwoQubitGate {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[r][k] * other.m[k][c]).sum();
            }
        }
        TwoQubitGate { m }
    }

    /// Max-entry deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mul(&self.adjoint());
        let mut dev = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let target = if r == c { ONE } else { ZERO };
                dev = dev.max((p.m[r][c] - target).norm());
            }
        }
        dev
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 26;

fn insert_zero_bit(x: usize, bit: usize) -> usize {
    ((x >> bit) << (bit + 1)) | (x & ((1 << bit) - 1))
}

impl StateVector {
    /// Computational basis state with `|1>` exactly on the listed qubits.
    pub fn basis_state(n_qubits: usize, occupied: &[usize]) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_SIM_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut index = 0usize;
        for &q in occupied {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    len: n_qubits,
                    what: "qubits",
                });
            }
            index |= 1 << q;
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wrap raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_SIM_QUBITS {
            return Err(Error::Invalid(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm * norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_qubits(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: n,
            });
        }
        Ok(())
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: q,
                len: self.n_qubits,
                what: "qubits",
            });
        }
        Ok(())
    }

    /// Apply `gate` in place on qubits `(qa, qb)`, `qa` being the gate's low-order input.
    pub fn apply_gate(&mut self, gate: &TwoQubitGate, qa: usize, qb: usize) -> Result<()> {
        self.check_index(qa)?;
        self.check_index(qb)?;
        if qa == qb {
            return Err(Error::QubitClash(qa));
        }
        let (lo, hi) = (qa.min(qb), qa.max(qb));
        let (ma, mb) = (1usize << qa, 1usize << qb);
        let m = &gate.m;
        for r in 0..self.amps.len() >> 2 {
            let base = insert_zero_bit(insert_zero_bit(r, lo), hi);
            let idx = [base, base | ma, base | mb, base | ma | mb];
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (row, &i) in m.iter().zip(&idx) {
                self.amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
        Ok(())
    }

    /// `H|psi>` as raw amplitudes.
    pub fn apply_pauli_sum(&self, obs: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_qubits(obs.n_qubits())?;
        let mut out = vec![ZERO; self.amps.len()];
        for p in obs.strings() {
            let x = p.x_mask() as usize;
            let c = p.coeff();
            for (b, &a) in self.amps.iter().enumerate() {
                out[b ^ x] += c * p.basis_phase(b) * a;
            }
        }
        Ok(out)
    }

    /// `<psi|obs|psi>` for a Hermitian observable.
    pub fn expectation(&self, obs: &PauliSum) -> Result<f64> {
        self.check_qubits(obs.n_qubits())?;
        let mut total = ZERO;
        for p in obs.strings() {
            let x = p.x_mask() as usize;
            let z = p.z_mask() as usize;
            let mut acc = ZERO;
            if x == 0 {
                for (b, a) in self.amps.iter().enumerate() {
                    let w = a.norm_sqr();
                    acc.re += if (b & z).count_ones() & 1 == 0 { w } else { -w };
                }
            } else {
                for (b, &a) in self.amps.iter().enumerate() {
                    let t = self.amps[b ^ x].conj() * a;
                    acc += if (b & z).count_ones() & 1 == 0 { t } else { -t };
                }
            }
            // basis_phase(0) is i^{n_Y}
            total += p.coeff() * p.basis_phase(0) * acc;
        }
        if total.im.abs() > IMAG_TOL {
            return Err(Error::NonHermitian(total.im.abs()));
        }
        Ok(total.re)
    }

    /// `<H^2> - <H>^2`, clamped at zero.
    pub fn energy_variance(&self, h: &PauliSum) -> Result<f64> {
        let image = self.apply_pauli_sum(h)?;
        let mean: Complex64 = self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum();
        if mean.im.abs() > IMAG_TOL {
            return Err(Error::NonHermitian(mean.im.abs()));
        }
        let second: f64 = image.iter().map(|a| a.norm_sqr()).sum();
        Ok((second - mean.re * mean.re).max(0.0))
    }

    /// `<n_j>` with `n_j = (I - Z_j)/2`.
    pub fn density(&self, j: usize) -> Result<f64> {
        self.check_index(j)?;
        let mask = 1usize << j;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `<n_j n_k>`.
    pub fn pair_density(&self, j: usize, k: usize) -> Result<f64> {
        self.check_index(j)?;
        self.check_index(k)?;
        let mask = (1usize << j) | (1usize << k);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask == mask)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Probability mass on basis states whose Hamming weight is not `k`.
    pub fn mass_outside_sector(&self, k: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b.count_ones() as usize != k)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Functional form of [`StateVector::apply_gate`].
pub fn apply_two_qubit_gate(
    state: &StateVector,
    gate: &TwoQubitGate,
    qa: usize,
    qb: usize,
) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gate(gate, qa, qb)?;
    Ok(out)
}

pub fn expectation(state: &StateVector, obs: &PauliSum) -> Result<f64> {
    state.expectation(obs)
}

pub fn energy_variance(state: &StateVector, h: &PauliSum) -> Result<f64> {
    state.energy_variance(h)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    /// Haar-ish random two-qubit unitary via Gram-Schmidt of a random complex matrix.
    pub fn random_unitary(seed: u64) -> TwoQubitGate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols: Vec<[Complex64; 4]> = Vec::new();
        while cols.len() < 4 {
            let mut v = [ZERO; 4];
            for x in &mut v {
                *x = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            for u in &cols {
                let proj: Complex64 = (0..4).map(|k| u[k].conj() * v[k]).sum();
                for k in 0..4 {
                    v[k] -= proj * u[k];
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols.push(v.map(|x| x / norm));
            }
        }
        let mut m = [[ZERO; 4]; 4];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..4 {
                m[r][c] = col[r];
            }
        }
        TwoQubitGate::new(m).unwrap()
    }
}
