//! Pauli strings and weighted sums of Pauli strings.
//!
//! Qubit `j` is bit `j` of a computational-basis index, so index 0 is the
//! lowest-order bit. A string is stored in symplectic form as an X mask and a
//! Z mask (Y sets both bits). The textual form lists qubit 0 leftmost:
//!
//! ```text
//! (0.5+0i) * "XYZI"
//! ```
//!
//! The coefficient is written with `num_complex`'s `Display` and parsed back
//! with its `FromStr`, so the format round-trips exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default magnitude below which simplified terms are dropped.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;
/// Largest register a `PauliString` can describe.
pub const MAX_QUBITS: usize = 64;
/// Largest register for which a dense matrix will be built.
pub const DENSE_QUBIT_LIMIT: usize = 14;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliAxis::I,
            (true, false) => PauliAxis::X,
            (true, true) => PauliAxis::Y,
            (false, true) => PauliAxis::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            PauliAxis::I => (false, false),
            PauliAxis::X => (true, false),
            PauliAxis::Y => (true, true),
            PauliAxis::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliAxis::I),
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// Single-qubit product `self * other = i^k * axis`, returned as `(k, axis)`.
    fn mul(self, other: Self) -> (u8, PauliAxis) {
        use PauliAxis::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    Ok(())
}

fn check_finite(c: Complex64) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteCoefficient(c.to_string()))
    }
}

fn full_mask(n_qubits: usize) -> u64 {
    if n_qubits == 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

/// A weighted tensor product of single-qubit Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    coeff: Complex64,
}

impl PauliString {
    pub fn new(coeff: Complex64, axes: &[PauliAxis]) -> Result<Self> {
        check_qubits(axes.len())?;
        check_finite(coeff)?;
        let (mut x, mut z) = (0u64, 0u64);
        for (q, axis) in axes.iter().enumerate() {
            let (bx, bz) = axis.bits();
            x |= (bx as u64) << q;
            z |= (bz as u64) << q;
        }
        Ok(Self {
            n_qubits: axes.len(),
            x,
            z,
            coeff,
        })
    }

    /// Identity on `n_qubits` with the given coefficient.
    pub fn identity(n_qubits: usize, coeff: Complex64) -> Result<Self> {
        Self::from_masks(n_qubits, 0, 0, coeff)
    }

    /// Build from symplectic masks: bit `q` of `x`/`z` marks an X/Z factor on qubit `q`.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64, coeff: Complex64) -> Result<Self> {
        check_qubits(n_qubits)?;
        check_finite(coeff)?;
        let mask = full_mask(n_qubits);
        if (x | z) & !mask != 0 {
            return Err(Error::IndexOutOfRange {
                index: (64 - (x | z).leading_zeros()) as usize - 1,
                len: n_qubits,
                what: "qubits",
            });
        }
        Ok(Self {
            n_qubits,
            x,
            z,
            coeff,
        })
    }

    /// A single-axis string, e.g. `Z` on qubit 3.
    pub fn single(
        n_qubits: usize,
        qubit: usize,
        axis: PauliAxis,
        coeff: Complex64,
    ) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                len: n_qubits,
                what: "qubits",
            });
        }
        let (bx, bz) = axis.bits();
        Self::from_masks(n_qubits, (bx as u64) << qubit, (bz as u64) << qubit, coeff)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn with_coeff(mut self, coeff: Complex64) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn axis(&self, qubit: usize) -> PauliAxis {
        PauliAxis::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn axes(&self) -> Vec<PauliAxis> {
        (0..self.n_qubits).map(|q| self.axis(q)).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Number of Y factors; the string acts on basis states with phase `i^n_y`.
    pub(crate) fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Operator product `self * other` with the accumulated phase folded
    /// into the coefficient.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        let (x, z, phase) = mul_masks(self.x, self.z, other.x, other.z);
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            coeff: self.coeff * other.coeff * I_POW[phase as usize],
        })
    }

    /// Action on a basis state: `P|b> = phase * |b ^ x>`.
    #[inline]
    pub(crate) fn basis_phase(&self, b: usize) -> Complex64 {
        let sign = ((b as u64 & self.z).count_ones() & 1) * 2;
        I_POW[((self.y_count() + sign) & 3) as usize]
    }

    pub fn to_sum(&self) -> PauliSum {
        let mut s = PauliSum::new(self.n_qubits).expect("string has a valid qubit count");
        s.add_string(self).expect("same qubit count");
        s
    }
}

/// Multiply two symplectic strings, returning the product masks and the power of `i`.
fn mul_masks(ax: u64, az: u64, bx: u64, bz: u64) -> (u64, u64, u8) {
    let mut phase = 0u8;
    let mut active = ax | az | bx | bz;
    while active != 0 {
        let q = active.trailing_zeros();
        active &= active - 1;
        let a = PauliAxis::from_bits(ax >> q & 1 == 1, az >> q & 1 == 1);
        let b = PauliAxis::from_bits(bx >> q & 1 == 1, bz >> q & 1 == 1);
        phase = (phase + a.mul(b).0) & 3;
    }
    (ax ^ bx, az ^ bz, phase)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes: String = (0..self.n_qubits).map(|q| self.axis(q).as_char()).collect();
        write!(f, "({}) * \"{}\"", self.coeff, axes)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let (coeff, axes) = s.trim().rsplit_once('*').ok_or_else(bad)?;
        let coeff = coeff.trim();
        let coeff = coeff
            .strip_prefix('(')
            .and_then(|c| c.strip_suffix(')'))
            .unwrap_or(coeff);
        let coeff = Complex64::from_str(coeff.trim()).map_err(|_| bad())?;
        let axes = axes
            .trim()
            .strip_prefix('"')
            .and_then(|a| a.strip_suffix('"'))
            .ok_or_else(bad)?;
        let axes = axes
            .chars()
            .map(PauliAxis::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        PauliString::new(coeff, &axes)
    }
}

/// A canonical weighted sum of Pauli strings on a fixed register.
///
/// Terms are keyed by their axes, so adding a string whose axes are already
/// present accumulates into the existing coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Ok(PauliString::identity(n_qubits, Complex64::new(1.0, 0.0))?.to_sum())
    }

    pub fn from_strings<'a>(
        n_qubits: usize,
        strings: impl IntoIterator<Item = &'a PauliString>,
    ) -> Result<Self> {
        let mut s = Self::new(n_qubits)?;
        for p in strings {
            s.add_string(p)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_string(&mut self, p: &PauliString) -> Result<()> {
        if p.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: p.n_qubits,
            });
        }
        *self
            .terms
            .entry((p.x, p.z))
            .or_insert(Complex64::new(0.0, 0.0)) += p.coeff;
        Ok(())
    }

    /// Terms in canonical (mask) order.
    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(move |(&(x, z), &coeff)| PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            coeff,
        })
    }

    /// Coefficient of the string with the given axes (zero when absent).
    pub fn coeff_of(&self, axes: &[PauliAxis]) -> Complex64 {
        let Ok(p) = PauliString::new(Complex64::new(1.0, 0.0), axes) else {
            return Complex64::new(0.0, 0.0);
        };
        self.terms
            .get(&(p.x, p.z))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Merge duplicates and drop terms with `|coeff| < drop_tol`.
    pub fn simplify(&self, drop_tol: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= drop_tol)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            *out.terms.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(out.simplify(DEFAULT_DROP_TOL))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(&k, &c)| (k, c * factor)).collect(),
        }
    }

    /// Canonical product `self * other`, simplified with the default tolerance.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum::new(self.n_qubits)?;
        for (&(ax, az), &ca) in &self.terms {
            for (&(bx, bz), &cb) in &other.terms {
                let (x, z, phase) = mul_masks(ax, az, bx, bz);
                *out.terms.entry((x, z)).or_insert(Complex64::new(0.0, 0.0)) +=
                    ca * cb * I_POW[phase as usize];
            }
        }
        Ok(out.simplify(DEFAULT_DROP_TOL))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.add(&ba.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(&k, &c)| (k, c.conj())).collect(),
        }
    }

    /// Sum of coefficient magnitudes, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest imaginary coefficient magnitude.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Drop imaginary parts after checking they are below `tol`.
    pub fn into_real(self, tol: f64) -> Result<PauliSum> {
        let worst = self.max_imag();
        if worst > tol {
            return Err(Error::NonHermitian(worst));
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .into_iter()
                .map(|(k, c)| (k, Complex64::new(c.re, 0.0)))
                .collect(),
        })
    }

    /// Largest number of non-identity factors over all terms.
    pub fn max_weight(&self) -> usize {
        self.strings().map(|p| p.weight()).max().unwrap_or(0)
    }

    /// Dense `2^n x 2^n` matrix; entry `(r, c)` is `<r|H|c>` with qubit `j` as bit `j`.
    pub fn to_dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::DenseLimit {
                n_qubits: self.n_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for p in self.strings() {
            for col in 0..dim {
                let row = col ^ p.x as usize;
                m[(row, col)] += p.coeff * p.basis_phase(col);
            }
        }
        Ok(m)
    }

    /// One term per line in the `PauliString` text format.
    pub fn to_text(&self) -> String {
        self.strings()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parse the output of [`PauliSum::to_text`]; blank lines and `#` comments are ignored.
    pub fn parse(n_qubits: usize, text: &str) -> Result<PauliSum> {
        let mut s = PauliSum::new(n_qubits)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            s.add_string(&line.parse()?)?;
        }
        Ok(s)
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ps(coeff: Complex64, s: &str) -> PauliString {
        let axes: Vec<_> = s
            .chars()
            .map(|ch| PauliAxis::from_char(ch).unwrap())
            .collect();
        PauliString::new(coeff, &axes).unwrap()
    }

    fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a.kronecker(b)
    }

    fn single_matrix(axis: PauliAxis) -> DMatrix<Complex64> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        match axis {
            PauliAxis::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            PauliAxis::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            PauliAxis::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            PauliAxis::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    /// Kronecker-product oracle: qubit n-1 is the leftmost factor, so qubit j is bit j.
    fn kron_oracle(p: &PauliString) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, p.coeff());
        for q in (0..p.n_qubits()).rev() {
            m = kron(&m, &single_matrix(p.axis(q)));
        }
        m
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn xy_is_iz() {
        let p = ps(c(1.0, 0.0), "X")
            .multiply(&ps(c(1.0, 0.0), "Y"))
            .unwrap();
        assert_eq!(p.axes(), vec![PauliAxis::Z]);
        assert_eq!(p.coeff(), c(0.0, 1.0));
    }

    #[test]
    fn identity_and_involution() {
        let p = ps(c(2.0, 1.0), "II")
            .multiply(&ps(c(0.5, 0.0), "YX"))
            .unwrap();
        assert_eq!(p, ps(c(1.0, 0.5), "YX"));
        let zz = ps(c(1.0, 0.0), "Z")
            .multiply(&ps(c(1.0, 0.0), "Z"))
            .unwrap();
        assert_eq!(zz, ps(c(1.0, 0.0), "I"));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let err = ps(c(1.0, 0.0), "X").multiply(&ps(c(1.0, 0.0), "XX"));
        assert!(matches!(err, Err(Error::QubitMismatch { .. })));
        let a = PauliSum::identity(1).unwrap();
        let b = PauliSum::identity(2).unwrap();
        assert!(a.multiply(&b).is_err());
    }

    #[test]
    fn x_plus_z_squared_is_two() {
        let s = PauliSum::from_strings(1, &[ps(c(1.0, 0.0), "X"), ps(c(1.0, 0.0), "Z")]).unwrap();
        let sq = s.multiply(&s).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.coeff_of(&[PauliAxis::I]), c(2.0, 0.0));
    }

    #[test]
    fn multiply_by_identity_and_strings_square_to_identity() {
        let h = PauliSum::from_strings(
            3,
            &[
                ps(c(0.3, 0.0), "XZY"),
                ps(c(-1.0, 0.0), "ZZI"),
                ps(c(2.0, 0.0), "IIX"),
            ],
        )
        .unwrap();
        assert_eq!(h.multiply(&PauliSum::identity(3).unwrap()).unwrap(), h);
        let zz = ps(c(-1.0, 0.0), "ZZI").to_sum();
        assert_eq!(zz.multiply(&zz).unwrap(), PauliSum::identity(3).unwrap());
    }

    #[test]
    fn simplify_cancels_merges_and_drops() {
        let s = PauliSum::from_strings(1, &[ps(c(1.0, 0.0), "X"), ps(c(-1.0, 0.0), "X")]).unwrap();
        assert!(s.simplify(DEFAULT_DROP_TOL).is_empty());
        let s = PauliSum::from_strings(1, &[ps(c(0.5, 0.0), "Z"), ps(c(0.5, 0.0), "Z")]).unwrap();
        let s = s.simplify(DEFAULT_DROP_TOL);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff_of(&[PauliAxis::Z]), c(1.0, 0.0));
        let s = ps(c(1e-15, 0.0), "Y").to_sum();
        assert!(s.simplify(1e-12).is_empty());
    }

    #[test]
    fn dense_matrix_conventions() {
        let z = ps(c(1.0, 0.0), "Z").to_sum().to_dense_matrix().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));
        // "XI": X on qubit 0 flips bit 0 of the index.
        let x0 = ps(c(1.0, 0.0), "XI").to_sum().to_dense_matrix().unwrap();
        for col in 0..4usize {
            for row in 0..4usize {
                let expected = if row == col ^ 1 { 1.0 } else { 0.0 };
                assert_eq!(x0[(row, col)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn dense_guard_refuses_large_registers() {
        let s = PauliSum::identity(DENSE_QUBIT_LIMIT + 1).unwrap();
        let err = s.to_dense_matrix().unwrap_err();
        assert!(err.to_string().contains("15-qubit"));
    }

    #[test]
    fn text_format_example() {
        let p = ps(c(0.5, -0.25), "XYZI");
        assert_eq!(p.to_string(), "(0.5-0.25i) * \"XYZI\"");
        assert_eq!("(0.5-0.25i) * \"XYZI\"".parse::<PauliString>().unwrap(), p);
        assert!("0.5 * XYZ".parse::<PauliString>().is_err());
        assert!("1 * \"XQ\"".parse::<PauliString>().is_err());
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        assert!(PauliString::new(c(f64::NAN, 0.0), &[PauliAxis::X]).is_err());
        assert!(PauliString::new(c(1.0, f64::INFINITY), &[PauliAxis::X]).is_err());
    }

    fn axis_strategy() -> impl Strategy<Value = PauliAxis> {
        prop_oneof![
            Just(PauliAxis::I),
            Just(PauliAxis::X),
            Just(PauliAxis::Y),
            Just(PauliAxis::Z)
        ]
    }

    fn string_strategy(n: usize) -> impl Strategy<Value = PauliString> {
        (
            prop::collection::vec(axis_strategy(), n),
            -2.0..2.0f64,
            -2.0..2.0f64,
        )
            .prop_map(|(axes, re, im)| PauliString::new(Complex64::new(re, im), &axes).unwrap())
    }

    fn sum_strategy(n: usize, real: bool) -> impl Strategy<Value = PauliSum> {
        prop::collection::vec(string_strategy(n), 0..6).prop_map(move |v| {
            let v: Vec<_> = v
                .into_iter()
                .map(|p| {
                    if real {
                        p.with_coeff(Complex64::new(p.coeff().re, 0.0))
                    } else {
                        p
                    }
                })
                .collect();
            PauliSum::from_strings(n, &v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrix_product(
            (a, b) in (1usize..=4).prop_flat_map(|n| (string_strategy(n), string_strategy(n)))
        ) {
            let prod = a.multiply(&b).unwrap().to_sum().to_dense_matrix().unwrap();
            let oracle = kron_oracle(&a) * kron_oracle(&b);
            prop_assert!(max_diff(&prod, &oracle) < 1e-12);
        }

        #[test]
        fn dense_matrix_matches_kronecker_oracle(p in (1usize..=4).prop_flat_map(string_strategy)) {
            let m = p.to_sum().to_dense_matrix().unwrap();
            prop_assert!(max_diff(&m, &kron_oracle(&p)) < 1e-15);
        }

        #[test]
        fn simplify_is_idempotent(s in (1usize..=4).prop_flat_map(|n| sum_strategy(n, false)), tol in 0.0..1.0f64) {
            let once = s.simplify(tol);
            prop_assert_eq!(once.simplify(tol), once);
        }

        #[test]
        fn sum_multiply_is_associative(
            (a, b, c) in (1usize..=3).prop_flat_map(|n| (sum_strategy(n, false), sum_strategy(n, false), sum_strategy(n, false)))
        ) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap().to_dense_matrix().unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap().to_dense_matrix().unwrap();
            prop_assert!(max_diff(&left, &right) < 1e-10);
        }

        #[test]
        fn real_coefficients_give_hermitian_matrices(s in (1usize..=4).prop_flat_map(|n| sum_strategy(n, true))) {
            let m = s.to_dense_matrix().unwrap();
            prop_assert!(max_diff(&m, &m.adjoint()) < 1e-14);
        }

        #[test]
        fn text_round_trips(s in (1usize..=5).prop_flat_map(|n| sum_strategy(n, false))) {
            let n = s.n_qubits();
            prop_assert_eq!(PauliSum::parse(n, &s.to_text()).unwrap(), s);
        }
    }
}
