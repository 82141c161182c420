//! Exact diagonalization: ground energies and spaces, particle-number
//! sectors, density correlations and infidelity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::number_operator;
use crate::pauli::{PauliSum, DENSE_QUBIT_LIMIT};
use crate::simulator::StateVector;

/// Eigenvalues within this distance of the lowest are grouped into the ground space.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest `[H, N]` one-norm accepted as number conserving.
pub const COMMUTATOR_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GroundSolution {
    pub energy: f64,
    pub degeneracy: usize,
    /// Orthonormal basis of the ground space, embedded in the full register.
    pub basis: Vec<StateVector>,
    /// Distance to the next distinct eigenvalue of the diagonalized block.
    pub gap: Option<f64>,
}

impl GroundSolution {
    pub fn n_qubits(&self) -> usize {
        self.basis[0].n_qubits()
    }

    /// Ground-space average of `f`, i.e. `tr(P f) / d`.
    fn averaged(&self, f: impl Fn(&StateVector) -> Result<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for v in &self.basis {
            acc += f(v)?;
        }
        Ok(acc / self.degeneracy as f64)
    }
}

struct Eigen {
    values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`; ascending order.
    vectors: Vec<Vec<Complex64>>,
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn hermitian_eigen(m: DMatrix<Complex64>) -> Eigen {
    let dim = m.nrows();
    let (values, columns): (Vec<f64>, Vec<Vec<Complex64>>) = if is_real(&m) {
        let e = m.map(|z| z.re).symmetric_eigen();
        let cols = (0..dim)
            .map(|k| {
                e.eigenvectors
                    .column(k)
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect()
            })
            .collect();
        (e.eigenvalues.iter().copied().collect(), cols)
    } else {
        let e = m.symmetric_eigen();
        let cols = (0..dim)
            .map(|k| e.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (e.eigenvalues.iter().copied().collect(), cols)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Eigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order.iter().map(|&k| columns[k].clone()).collect(),
    }
}

fn ground_from(
    eigen: Eigen,
    embed: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> Result<GroundSolution> {
    let energy = eigen.values[0];
    let degeneracy = eigen
        .values
        .iter()
        .take_while(|&&e| e - energy <= DEGENERACY_TOL)
        .count();
    let gap = eigen.values.get(degeneracy).map(|e| e - energy);
    let basis = eigen.vectors[..degeneracy]
        .iter()
        .map(|v| StateVector::normalized(embed(v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundSolution {
        energy,
        degeneracy,
        basis,
        gap,
    })
}

/// Lowest eigenvalue of `h` and its full eigenspace.
pub fn exact_ground(h: &PauliSum) -> Result<GroundSolution> {
    let m = h.to_dense_matrix()?;
    ground_from(hermitian_eigen(m), |v| v.to_vec())
}

/// All eigenvalues of `h`, ascending.
pub fn spectrum(h: &PauliSum) -> Result<Vec<f64>> {
    let m = h.to_dense_matrix()?;
    let mut values: Vec<f64> = if is_real(&m) {
        m.map(|z| z.re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Basis indices with exactly `k` bits set, ascending.
pub fn sector_basis(n_qubits: usize, k: usize) -> Vec<usize> {
    (0..1usize << n_qubits)
        .filter(|b| b.count_ones() as usize == k)
        .collect()
}

/// `h` restricted to the span of `basis`; `h` must leave that span invariant.
fn block_matrix(h: &PauliSum, basis: &[usize]) -> DMatrix<Complex64> {
    let dim = basis.len();
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    let index = |b: usize| basis.binary_search(&b).ok();
    for p in h.strings() {
        let x = p.x_mask() as usize;
        for (col, &b) in basis.iter().enumerate() {
            if let Some(row) = index(b ^ x) {
                m[(row, col)] += p.coeff() * p.basis_phase(b);
            }
        }
    }
    m
}

/// Ground solution of `h` within the Hamming-weight-`k` subspace.
///
/// `h` is checked symbolically to commute with the total number operator.
pub fn sector_ground(h: &PauliSum, k: usize) -> Result<GroundSolution> {
    let n = h.n_qubits();
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: n + 1,
            what: "particle count",
        });
    }
    if n > 2 * DENSE_QUBIT_LIMIT {
        return Err(Error::DenseLimit {
            n_qubits: n,
            limit: 2 * DENSE_QUBIT_LIMIT,
        });
    }
    let comm = h.commutator(&number_operator(n)?)?.one_norm();
    if comm >= COMMUTATOR_TOL {
        return Err(Error::NotNumberConserving(comm));
    }
    let basis = sector_basis(n, k);
    if basis.len() > 1 << DENSE_QUBIT_LIMIT {
        return Err(Error::DenseLimit {
            n_qubits: n,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    let eigen = hermitian_eigen(block_matrix(h, &basis));
    ground_from(eigen, |v| {
        let mut full = vec![ZERO; 1 << n];
        for (&b, &a) in basis.iter().zip(v) {
            full[b] = a;
        }
        full
    })
}

/// `C(m) = <n_0 n_m> - <n_0><n_m>` in `state`.
pub fn correlation(state: &StateVector, m: usize) -> Result<f64> {
    Ok(state.pair_density(0, m)? - state.density(0)? * state.density(m)?)
}

/// `C(m)` for `m = 0..n` in `state`.
pub fn correlation_profile(state: &StateVector) -> Result<Vec<f64>> {
    (0..state.n_qubits())
        .map(|m| correlation(state, m))
        .collect()
}

/// `C(m)` on the ground space. A degenerate space is replaced by its
/// normalized projector, so each expectation is averaged over the basis.
pub fn exact_correlation(ground: &GroundSolution, m: usize) -> Result<f64> {
    let pair = ground.averaged(|v| v.pair_density(0, m))?;
    let n0 = ground.averaged(|v| v.density(0))?;
    let nm = ground.averaged(|v| v.density(m))?;
    Ok(pair - n0 * nm)
}

pub fn exact_correlation_profile(ground: &GroundSolution) -> Result<Vec<f64>> {
    (0..ground.n_qubits())
        .map(|m| exact_correlation(ground, m))
        .collect()
}

/// `1 - <psi|P|psi>` with `P` the ground-space projector.
pub fn infidelity(state: &StateVector, ground: &GroundSolution) -> Result<f64> {
    let mut overlap = 0.0;
    for v in &ground.basis {
        overlap += v.inner(state)?.norm_sqr();
    }
    Ok((1.0 - overlap).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::Encoding;
    use crate::models::{
        build_hubbard_nnn, build_tfim, to_qubit_hamiltonian, HubbardNnnParams, TfimParams,
    };
    use crate::pauli::{PauliAxis, PauliString};
    use crate::simulator::test_support::random_state;

    fn hubbard(n: usize, enc: Encoding) -> PauliSum {
        to_qubit_hamiltonian(
            &build_hubbard_nnn(&HubbardNnnParams::frustrated(n)).unwrap(),
            enc,
        )
        .unwrap()
    }

    fn check_eigenpairs(h: &PauliSum, g: &GroundSolution) {
        for (i, v) in g.basis.iter().enumerate() {
            let hv = v.apply_pauli_sum(h).unwrap();
            let resid: f64 = hv
                .iter()
                .zip(v.amplitudes())
                .map(|(a, b)| (a - b * g.energy).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-8, "{resid}");
            for w in &g.basis[..i] {
                assert!(w.inner(v).unwrap().norm() < 1e-10);
            }
            assert!((v.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_z() {
        let h = PauliString::single(1, 0, PauliAxis::Z, Complex64::new(1.0, 0.0))
            .unwrap()
            .to_sum();
        let g = exact_ground(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        assert_eq!(g.degeneracy, 1);
        assert!((g.basis[0].amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        assert_eq!(g.gap, Some(2.0));
    }

    #[test]
    fn identity_is_fully_degenerate() {
        let g = exact_ground(&PauliSum::identity(2).unwrap()).unwrap();
        assert!((g.energy - 1.0).abs() < 1e-12);
        assert_eq!(g.degeneracy, 4);
        assert_eq!(g.gap, None);
        check_eigenpairs(&PauliSum::identity(2).unwrap(), &g);
    }

    /// The 8x8 TFIM matrix written out from bit arithmetic, diagonalized
    /// without the Pauli machinery.
    #[test]
    fn tfim_three_site_matches_hand_built_matrix() {
        let h = build_tfim(&TfimParams {
            n_sites: 3,
            h: 1.0,
            periodic: true,
        })
        .unwrap();
        let mut m = DMatrix::<f64>::zeros(8, 8);
        for b in 0..8usize {
            let spin = |j: usize| if b >> j & 1 == 0 { 1.0 } else { -1.0 };
            m[(b, b)] = spin(0) * spin(1) + spin(1) * spin(2) + spin(2) * spin(0);
            for j in 0..3 {
                m[(b ^ (1 << j), b)] += 1.0;
            }
        }
        let reference = m
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let g = exact_ground(&h).unwrap();
        assert!((g.energy - reference).abs() < 1e-12);
        check_eigenpairs(&h, &g);
        let spec = spectrum(&h).unwrap();
        assert_eq!(spec.len(), 8);
        assert!((spec[0] - reference).abs() < 1e-12);
    }

    #[test]
    fn dense_guard() {
        let h = PauliSum::identity(DENSE_QUBIT_LIMIT + 1).unwrap();
        assert!(matches!(exact_ground(&h), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn sector_extremes() {
        for n in 3..=6 {
            let h = hubbard(n, Encoding::JordanWigner);
            let vacuum = sector_ground(&h, 0).unwrap();
            assert!(vacuum.energy.abs() < 1e-12);
            let full = sector_ground(&h, n).unwrap();
            assert!((full.energy - (2.0 * n as f64 + n as f64)).abs() < 1e-10);
            assert_eq!(full.basis[0].amplitudes()[(1 << n) - 1].norm(), 1.0);
        }
        assert!(sector_ground(&hubbard(4, Encoding::JordanWigner), 5).is_err());
    }

    #[test]
    fn sector_minimum_is_global_minimum() {
        for n in [4, 6] {
            for enc in [Encoding::JordanWigner, Encoding::BravyiKitaev] {
                let h = hubbard(n, enc);
                let global = exact_ground(&h).unwrap().energy;
                if enc == Encoding::JordanWigner {
                    let best = (0..=n)
                        .map(|k| sector_ground(&h, k).unwrap().energy)
                        .fold(f64::INFINITY, f64::min);
                    assert!((best - global).abs() < 1e-10);
                }
                let g = sector_ground(&hubbard(n, Encoding::JordanWigner), n / 2).unwrap();
                assert!(g.energy >= global - 1e-10);
            }
        }
    }

    #[test]
    fn sector_half_filling_matches_brute_force_projection() {
        let n = 6;
        let h = hubbard(n, Encoding::JordanWigner);
        let g = sector_ground(&h, 3).unwrap();
        check_eigenpairs(&h, &g);
        // brute force: lowest full-space eigenvalue whose eigenvector lives in the sector
        let m = h.to_dense_matrix().unwrap();
        let e = hermitian_eigen(m);
        let brute = e
            .values
            .iter()
            .zip(&e.vectors)
            .find(|(_, v)| {
                v.iter()
                    .enumerate()
                    .filter(|(b, _)| b.count_ones() != 3)
                    .map(|(_, a)| a.norm_sqr())
                    .sum::<f64>()
                    < 1e-12
            })
            .map(|(&val, _)| val)
            .unwrap();
        assert!((g.energy - brute).abs() < 1e-10);
    }

    #[test]
    fn sector_rejects_non_conserving() {
        let h = build_tfim(&TfimParams {
            n_sites: 4,
            h: 1.0,
            periodic: true,
        })
        .unwrap();
        assert!(matches!(
            sector_ground(&h, 2),
            Err(Error::NotNumberConserving(_))
        ));
        // BK images do not conserve Hamming weight
        assert!(sector_ground(&hubbard(4, Encoding::BravyiKitaev), 2).is_err());
    }

    #[test]
    fn correlation_basics() {
        let product = StateVector::basis_state(6, &[0, 2, 4]).unwrap();
        let c = correlation_profile(&product).unwrap();
        assert!(c.iter().all(|x| x.abs() < 1e-15));

        let psi = random_state(5, 3);
        let n0 = psi.density(0).unwrap();
        assert!((correlation(&psi, 0).unwrap() - (n0 - n0 * n0)).abs() < 1e-14);
    }

    #[test]
    fn exact_correlation_reflection_symmetry() {
        let h = hubbard(6, Encoding::JordanWigner);
        let g = sector_ground(&h, 3).unwrap();
        assert_eq!(g.degeneracy, 1);
        let c = exact_correlation_profile(&g).unwrap();
        for m in 1..6 {
            assert!((c[m] - c[6 - m]).abs() < 1e-9, "{c:?}");
        }
        let n0 = g.basis[0].density(0).unwrap();
        assert!((c[0] - (n0 - n0 * n0)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_correlation_uses_projector_average() {
        // H = I on two qubits: the averaged state is maximally mixed, so C = 0 off site
        let g = exact_ground(&PauliSum::identity(2).unwrap()).unwrap();
        assert!(exact_correlation(&g, 1).unwrap().abs() < 1e-12);
        assert!((exact_correlation(&g, 0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn infidelity_limits() {
        let h = hubbard(4, Encoding::JordanWigner);
        let g = sector_ground(&h, 2).unwrap();
        assert!(infidelity(&g.basis[0], &g).unwrap() < 1e-12);
        let outside = StateVector::basis_state(4, &[0]).unwrap();
        assert!((infidelity(&outside, &g).unwrap() - 1.0).abs() < 1e-12);
        for seed in 0..10 {
            let f = infidelity(&random_state(4, seed), &g).unwrap();
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn variational_floor() {
        for (n, h) in [
            (4, hubbard(4, Encoding::JordanWigner)),
            (5, hubbard(5, Encoding::BravyiKitaev)),
            (
                5,
                build_tfim(&TfimParams {
                    n_sites: 5,
                    h: 1.0,
                    periodic: true,
                })
                .unwrap(),
            ),
        ] {
            let e0 = exact_ground(&h).unwrap().energy;
            for seed in 0..100 {
                let e = random_state(n, seed).expectation(&h).unwrap();
                assert!(e >= e0 - 1e-9);
            }
        }
    }

    #[test]
    fn jw_and_bk_share_spectra() {
        for n in 2..=6 {
            let mut p = HubbardNnnParams::frustrated(n);
            p.periodic = n >= 3;
            let op = build_hubbard_nnn(&p).unwrap();
            let a = spectrum(&to_qubit_hamiltonian(&op, Encoding::JordanWigner).unwrap()).unwrap();
            let b = spectrum(&to_qubit_hamiltonian(&op, Encoding::BravyiKitaev).unwrap()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10, "n={n}");
            }
        }
    }
}
