//! Lattice Hamiltonians: spinless fermions with nearest- and
//! next-nearest-neighbour interactions, and the transverse-field Ising chain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{encode, Encoding, FermionOperator, LadderFactor};
use crate::pauli::{PauliAxis, PauliString, PauliSum};

/// Imaginary residue tolerated on encoded Hermitian models.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardNnnParams {
    pub n_sites: usize,
    /// Hopping energy.
    pub t: f64,
    /// Nearest-neighbour density coupling.
    pub v1: f64,
    /// Next-nearest-neighbour density coupling.
    pub v2: f64,
    pub periodic: bool,
}

impl HubbardNnnParams {
    /// `t = 1`, `V1 = 2`, `V2 = 1`, periodic.
    pub fn frustrated(n_sites: usize) -> Self {
        Self {
            n_sites,
            t: 1.0,
            v1: 2.0,
            v2: 1.0,
            periodic: true,
        }
    }

    fn validate(&self) -> Result<()> {
        validate_chain(self.n_sites, self.periodic)?;
        if ![self.t, self.v1, self.v2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n_sites: usize,
    /// Transverse field.
    pub h: f64,
    pub periodic: bool,
}

impl TfimParams {
    fn validate(&self) -> Result<()> {
        validate_chain(self.n_sites, self.periodic)?;
        if !self.h.is_finite() {
            return Err(Error::InvalidModel("field must be finite".into()));
        }
        Ok(())
    }
}

fn validate_chain(n_sites: usize, periodic: bool) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidModel("chain needs at least one site".into()));
    }
    if periodic && n_sites < 3 {
        return Err(Error::InvalidModel(format!(
            "periodic chain needs at least 3 sites, got {n_sites}"
        )));
    }
    Ok(())
}

/// Site pairs `(i, i + offset)`, wrapping modulo `n` when periodic.
fn bonds(n: usize, offset: usize, periodic: bool) -> Vec<(usize, usize)> {
    if periodic {
        (0..n).map(|i| (i, (i + offset) % n)).collect()
    } else {
        (0..n.saturating_sub(offset))
            .map(|i| (i, i + offset))
            .collect()
    }
}

/// `-t sum (c+_i c_j + c+_j c_i) + V1 sum n_i n_{i+1} + V2 sum n_i n_{i+2}`.
///
/// Zero couplings contribute no terms.
pub fn build_hubbard_nnn(p: &HubbardNnnParams) -> Result<FermionOperator> {
    p.validate()?;
    let n = p.n_sites;
    let mut op = FermionOperator::new(n)?;
    if p.t != 0.0 {
        let hop = Complex64::new(-p.t, 0.0);
        for (i, j) in bonds(n, 1, p.periodic) {
            op.add_term(
                hop,
                vec![LadderFactor::create(i), LadderFactor::annihilate(j)],
            )?;
            op.add_term(
                hop,
                vec![LadderFactor::create(j), LadderFactor::annihilate(i)],
            )?;
        }
    }
    for (offset, v) in [(1, p.v1), (2, p.v2)] {
        if v == 0.0 {
            continue;
        }
        for (i, j) in bonds(n, offset, p.periodic) {
            op.add_term(
                Complex64::new(v, 0.0),
                vec![
                    LadderFactor::create(i),
                    LadderFactor::annihilate(i),
                    LadderFactor::create(j),
                    LadderFactor::annihilate(j),
                ],
            )?;
        }
    }
    Ok(op)
}

/// `sum Z_i Z_{i+1} + h sum X_i`, built directly on qubits.
pub fn build_tfim(p: &TfimParams) -> Result<PauliSum> {
    p.validate()?;
    let n = p.n_sites;
    let mut s = PauliSum::new(n)?;
    let one = Complex64::new(1.0, 0.0);
    for (i, j) in bonds(n, 1, p.periodic) {
        s.add_string(&PauliString::from_masks(n, 0, (1 << i) | (1 << j), one)?)?;
    }
    if p.h != 0.0 {
        for i in 0..n {
            s.add_string(&PauliString::single(
                n,
                i,
                PauliAxis::X,
                Complex64::new(p.h, 0.0),
            )?)?;
        }
    }
    Ok(s)
}

/// Encode a Hermitian fermionic model and strip its (checked) imaginary residue.
pub fn to_qubit_hamiltonian(model: &FermionOperator, encoding: Encoding) -> Result<PauliSum> {
    encode(model, encoding)?.into_real(REAL_TOL)
}

/// `sum_j (I - Z_j)/2`, the total particle number in the computational basis.
pub fn number_operator(n_qubits: usize) -> Result<PauliSum> {
    let mut s = PauliSum::new(n_qubits)?;
    s.add_string(&PauliString::identity(
        n_qubits,
        Complex64::new(n_qubits as f64 / 2.0, 0.0),
    )?)?;
    for j in 0..n_qubits {
        s.add_string(&PauliString::single(
            n_qubits,
            j,
            PauliAxis::Z,
            Complex64::new(-0.5, 0.0),
        )?)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::FermionTerm;

    fn relabel(terms: &[FermionTerm], shift: usize, n: usize) -> Vec<String> {
        let mut v: Vec<String> = terms
            .iter()
            .map(|t| {
                let f: Vec<String> = t
                    .factors
                    .iter()
                    .map(|f| {
                        format!(
                            "{}{}",
                            (f.mode + shift) % n,
                            if f.dagger { "+" } else { "" }
                        )
                    })
                    .collect();
                format!("{} {}", t.coeff, f.join(" "))
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn zero_couplings_give_zero_operator() {
        let p = HubbardNnnParams {
            n_sites: 5,
            t: 0.0,
            v1: 0.0,
            v2: 0.0,
            periodic: true,
        };
        let op = build_hubbard_nnn(&p).unwrap();
        assert!(op.is_empty());
        assert!(to_qubit_hamiltonian(&op, Encoding::JordanWigner)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn v2_zero_has_no_next_nearest_terms() {
        let mut p = HubbardNnnParams::frustrated(6);
        p.v2 = 0.0;
        let op = build_hubbard_nnn(&p).unwrap();
        assert_eq!(op.len(), 12 + 6);
        assert!(op.terms().iter().all(|t| {
            t.factors.len() == 2 || {
                let (a, b) = (t.factors[0].mode, t.factors[2].mode);
                (a + 1) % 6 == b || (b + 1) % 6 == a
            }
        }));
    }

    #[test]
    fn term_count_n4_periodic() {
        let op = build_hubbard_nnn(&HubbardNnnParams::frustrated(4)).unwrap();
        let hops = op.terms().iter().filter(|t| t.factors.len() == 2).count();
        assert_eq!(hops, 8);
        assert_eq!(op.len(), 8 + 4 + 4);
    }

    #[test]
    fn open_chain_bond_counts() {
        let mut p = HubbardNnnParams::frustrated(5);
        p.periodic = false;
        assert_eq!(build_hubbard_nnn(&p).unwrap().len(), 8 + 4 + 3);
        let t = build_tfim(&TfimParams {
            n_sites: 2,
            h: 0.5,
            periodic: false,
        })
        .unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn periodic_guard() {
        let mut p = HubbardNnnParams::frustrated(2);
        assert!(build_hubbard_nnn(&p).is_err());
        p.periodic = false;
        assert!(build_hubbard_nnn(&p).is_ok());
        assert!(build_tfim(&TfimParams {
            n_sites: 2,
            h: 1.0,
            periodic: true
        })
        .is_err());
    }

    #[test]
    fn tfim_three_site_ring() {
        let s = build_tfim(&TfimParams {
            n_sites: 3,
            h: 0.0,
            periodic: true,
        })
        .unwrap();
        assert_eq!(s.len(), 3);
        use PauliAxis::*;
        for axes in [[Z, Z, I], [I, Z, Z], [Z, I, Z]] {
            assert_eq!(s.coeff_of(&axes), Complex64::new(1.0, 0.0));
        }
        let s = build_tfim(&TfimParams {
            n_sites: 3,
            h: 0.1,
            periodic: true,
        })
        .unwrap();
        assert_eq!(s.coeff_of(&[I, X, I]), Complex64::new(0.1, 0.0));
    }

    #[test]
    fn builders_are_hermitian() {
        for n in 3..=5 {
            for enc in [Encoding::JordanWigner, Encoding::BravyiKitaev] {
                let h = to_qubit_hamiltonian(
                    &build_hubbard_nnn(&HubbardNnnParams::frustrated(n)).unwrap(),
                    enc,
                )
                .unwrap();
                let m = h.to_dense_matrix().unwrap();
                assert!(crate::testutil::max_abs(&(&m - m.adjoint())) < 1e-12);
            }
            let t = build_tfim(&TfimParams {
                n_sites: n,
                h: 1.0,
                periodic: true,
            })
            .unwrap();
            let m = t.to_dense_matrix().unwrap();
            assert!(crate::testutil::max_abs(&(&m - m.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn jw_image_conserves_particle_number() {
        for n in 3..=8 {
            let h = to_qubit_hamiltonian(
                &build_hubbard_nnn(&HubbardNnnParams::frustrated(n)).unwrap(),
                Encoding::JordanWigner,
            )
            .unwrap();
            let comm = h.commutator(&number_operator(n).unwrap()).unwrap();
            assert!(comm.one_norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn translation_invariance() {
        for n in 3..=7 {
            let op = build_hubbard_nnn(&HubbardNnnParams::frustrated(n)).unwrap();
            let base = relabel(op.terms(), 0, n);
            for shift in 1..n {
                assert_eq!(relabel(op.terms(), shift, n), base);
            }
            let t = build_tfim(&TfimParams {
                n_sites: n,
                h: 0.3,
                periodic: true,
            })
            .unwrap();
            let terms: Vec<_> = t.strings().collect();
            for shift in 1..n {
                let rotated: Vec<_> = terms
                    .iter()
                    .map(|p| {
                        let rot = |m: u64| ((m << shift) | (m >> (n - shift))) & ((1 << n) - 1);
                        PauliString::from_masks(n, rot(p.x_mask()), rot(p.z_mask()), p.coeff())
                            .unwrap()
                    })
                    .collect();
                assert_eq!(PauliSum::from_strings(n, &rotated).unwrap(), t);
            }
        }
    }
}
