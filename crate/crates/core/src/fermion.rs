//! Fermionic ladder operators and their qubit encodings.
//!
//! Both encodings use the occupied-is-`|1>` convention: the all-zeros basis
//! state is the vacuum, creation raises `|0>` to `|1>`, and under
//! Jordan-Wigner the number operator becomes `(I - Z_j)/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, DEFAULT_DROP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderFactor {
    pub mode: usize,
    /// `true` for a creation operator.
    pub dagger: bool,
}

impl LadderFactor {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }
}

/// A coefficient times an ordered product of ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coeff: Complex64,
    pub factors: Vec<LadderFactor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > crate::pauli::MAX_QUBITS {
            return Err(Error::QubitCount(n_modes));
        }
        Ok(Self {
            n_modes,
            terms: Vec::new(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: Complex64, factors: Vec<LadderFactor>) -> Result<()> {
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(Error::NonFiniteCoefficient(coeff.to_string()));
        }
        if let Some(f) = factors.iter().find(|f| f.mode >= self.n_modes) {
            return Err(Error::IndexOutOfRange {
                index: f.mode,
                len: self.n_modes,
                what: "modes",
            });
        }
        self.terms.push(FermionTerm { coeff, factors });
        Ok(())
    }

    /// Add `coeff * n_j`.
    pub fn add_number(&mut self, coeff: f64, j: usize) -> Result<()> {
        self.add_term(
            Complex64::new(coeff, 0.0),
            vec![LadderFactor::create(j), LadderFactor::annihilate(j)],
        )
    }

    /// Hermitian conjugate: reverse each product, conjugate each factor and coefficient.
    pub fn adjoint(&self) -> FermionOperator {
        FermionOperator {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().rev().map(|f| f.adjoint()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Encoding {
    JordanWigner,
    BravyiKitaev,
}

/// Encode `op` on `op.n_modes()` qubits and simplify.
pub fn encode(op: &FermionOperator, encoding: Encoding) -> Result<PauliSum> {
    let n = op.n_modes;
    let images: Vec<[PauliSum; 2]> = (0..n)
        .map(|j| {
            Ok([
                ladder_image(LadderFactor::annihilate(j), n, encoding)?,
                ladder_image(LadderFactor::create(j), n, encoding)?,
            ])
        })
        .collect::<Result<_>>()?;
    let mut out = PauliSum::new(n)?;
    for term in &op.terms {
        let mut acc = PauliString::identity(n, term.coeff)?.to_sum();
        for f in &term.factors {
            let image = &images[f.mode][f.dagger as usize];
            acc = acc.multiply(image)?;
        }
        for p in acc.strings() {
            out.add_string(&p)?;
        }
    }
    Ok(out.simplify(DEFAULT_DROP_TOL))
}

pub fn jordan_wigner(op: &FermionOperator) -> Result<PauliSum> {
    encode(op, Encoding::JordanWigner)
}

pub fn bravyi_kitaev(op: &FermionOperator) -> Result<PauliSum> {
    encode(op, Encoding::BravyiKitaev)
}

/// Qubit image of a single ladder operator on `n_modes` modes.
pub fn ladder_image(factor: LadderFactor, n_modes: usize, encoding: Encoding) -> Result<PauliSum> {
    if factor.mode >= n_modes {
        return Err(Error::IndexOutOfRange {
            index: factor.mode,
            len: n_modes,
            what: "modes",
        });
    }
    let j = factor.mode;
    let (update, parity, remainder) = match encoding {
        Encoding::JordanWigner => {
            let below: Vec<usize> = (0..j).collect();
            (Vec::new(), below.clone(), below)
        }
        Encoding::BravyiKitaev => {
            let sets = bk_index_sets(j, n_modes)?;
            let remainder = sets.remainder();
            (sets.update, sets.parity, remainder)
        }
    };
    let bit = |q: &usize| 1u64 << q;
    let update_mask: u64 = update.iter().map(bit).sum();
    let parity_mask: u64 = parity.iter().map(bit).sum();
    let remainder_mask: u64 = remainder.iter().map(bit).sum();
    let jb = 1u64 << j;
    // Majorana pair: c = X_U X_j Z_P, d = X_U Y_j Z_R.
    // Creation is (c - i d)/2, annihilation (c + i d)/2.
    let half = Complex64::new(0.5, 0.0);
    let d_coeff = if factor.dagger {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let c = PauliString::from_masks(n_modes, update_mask | jb, parity_mask, half)?;
    let d = PauliString::from_masks(n_modes, update_mask | jb, remainder_mask | jb, d_coeff)?;
    PauliSum::from_strings(n_modes, &[c, d])
}

/// Update, parity and flip sets of one mode in the Bravyi-Kitaev encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BkIndexSets {
    /// Qubits other than `j` whose stored parity includes mode `j`.
    pub update: Vec<usize>,
    /// Qubits whose stored parities combine to the parity of modes `0..j`.
    pub parity: Vec<usize>,
    /// Qubits whose parities, together with qubit `j`, give the occupation of mode `j`.
    pub flip: Vec<usize>,
}

impl BkIndexSets {
    /// Parity set minus flip set.
    pub fn remainder(&self) -> Vec<usize> {
        self.parity
            .iter()
            .copied()
            .filter(|q| !self.flip.contains(q))
            .collect()
    }
}

/// Fenwick tree on `n` nodes where node `k` stores the parity of modes `[lo_k, k]`.
struct FenwickTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl FenwickTree {
    fn new(n: usize) -> Self {
        let mut tree = FenwickTree {
            parent: vec![None; n],
            children: vec![Vec::new(); n],
        };
        if n > 0 {
            tree.split(0, n - 1);
        }
        tree
    }

    // Node `hi` covers [lo, hi]; its first child is the midpoint, which covers
    // [lo, mid], and the rest of its children come from [mid + 1, hi].
    fn split(&mut self, lo: usize, hi: usize) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        self.parent[mid] = Some(hi);
        self.children[hi].push(mid);
        self.split(lo, mid);
        self.split(mid + 1, hi);
    }

    fn ancestors(&self, j: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut node = self.parent[j];
        while let Some(a) = node {
            out.push(a);
            node = self.parent[a];
        }
        out
    }
}

pub fn bk_index_sets(j: usize, n: usize) -> Result<BkIndexSets> {
    if j >= n {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: n,
            what: "modes",
        });
    }
    let tree = FenwickTree::new(n);
    let update = tree.ancestors(j);
    let mut flip = tree.children[j].clone();
    flip.sort_unstable();
    let mut parity = flip.clone();
    for &a in &update {
        parity.extend(tree.children[a].iter().copied().filter(|&c| c < j));
    }
    parity.sort_unstable();
    Ok(BkIndexSets {
        update,
        parity,
        flip,
    })
}
