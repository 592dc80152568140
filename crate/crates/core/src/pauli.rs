//! Pauli-string expansion of multi-qubit operators.
//!
//! Coefficients are raw multipliers of σ_S: an operator equal to
//! `(1/4)(I + ZZZI)` decomposes to `{"IIII": 0.25, "ZZZI": 0.25}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Matrix, Operator, ONE, ZERO};
use crate::TOL;

/// Coefficients below this magnitude are not stored.
pub const COEFF_CUTOFF: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// σ|b⟩ = phase · |b'⟩
    fn act(self, bit: usize) -> (usize, Complex64) {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => (bit, ONE),
            Pauli::X => (bit ^ 1, ONE),
            Pauli::Y => (bit ^ 1, if bit == 0 { i } else { -i }),
            Pauli::Z => (bit, if bit == 0 { ONE } else { -ONE }),
        }
    }

    pub fn matrix(self) -> Operator {
        let mut m = Matrix::zeros(2, 2);
        for col in 0..2 {
            let (row, phase) = self.act(col);
            m[(row, col)] = phase;
        }
        Operator::new(m, vec![2]).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self(letters)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// All 4^n strings in I,X,Y,Z lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(n as u32)).map(move |mut k| {
            let mut letters = vec![Pauli::I; n];
            for slot in letters.iter_mut().rev() {
                *slot = Pauli::ALL[k % 4];
                k /= 4;
            }
            PauliString(letters)
        })
    }

    /// Image of basis column `col`: σ_S|col⟩ = phase · |row⟩.
    fn act(&self, col: usize) -> (usize, Complex64) {
        let n = self.0.len();
        let mut row = 0;
        let mut phase = ONE;
        for (q, p) in self.0.iter().enumerate() {
            let shift = n - 1 - q;
            let (b, ph) = p.act((col >> shift) & 1);
            row |= b << shift;
            phase *= ph;
        }
        (row, phase)
    }

    pub fn matrix(&self) -> Operator {
        let n = self.0.len();
        let side = 1usize << n;
        let mut m = Matrix::zeros(side, side);
        for col in 0..side {
            let (row, phase) = self.act(col);
            m[(row, col)] = phase;
        }
        Operator::new(m, vec![2; n.max(1)]).unwrap()
    }

    /// `Tr[op · σ_S]` using the monomial structure of σ_S.
    pub fn trace_with(&self, op: &Operator) -> Complex64 {
        let side = op.side();
        debug_assert_eq!(side, 1 << self.0.len());
        let mut acc = ZERO;
        for col in 0..side {
            let (row, phase) = self.act(col);
            acc += op.get(col, row) * phase;
        }
        acc
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidPauliString(s.to_string()));
        }
        s.chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .map(PauliString)
            .ok_or_else(|| Error::InvalidPauliString(s.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliDecomposition {
    coeffs: BTreeMap<PauliKey, f64>,
}

/// Map key kept as a validated string so the JSON form is a plain object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliKey(PauliString);

impl TryFrom<String> for PauliKey {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse().map(PauliKey)
    }
}

impl From<PauliKey> for String {
    fn from(k: PauliKey) -> String {
        k.0.to_string()
    }
}

impl PauliDecomposition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(string, coefficient)` pairs; repeated strings accumulate.
    pub fn from_terms<S: AsRef<str>>(terms: &[(S, f64)]) -> Result<Self> {
        let mut dec = Self::new();
        for (s, c) in terms {
            let ps: PauliString = s.as_ref().parse()?;
            dec.add(ps, *c)?;
        }
        Ok(dec)
    }

    pub fn add(&mut self, s: PauliString, c: f64) -> Result<()> {
        if let Some(n) = self.num_qubits() {
            if n != s.len() {
                return Err(Error::InvalidPauliString(format!(
                    "{s} has length {}, expected {n}",
                    s.len()
                )));
            }
        }
        *self.coeffs.entry(PauliKey(s)).or_insert(0.0) += c;
        Ok(())
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.coeffs.keys().next().map(|k| k.0.len())
    }

    pub fn get(&self, s: &str) -> f64 {
        s.parse::<PauliString>()
            .ok()
            .and_then(|ps| self.coeffs.get(&PauliKey(ps)).copied())
            .unwrap_or(0.0)
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.coeffs.get(&PauliKey(s.clone())).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.coeffs.iter().map(|(k, &c)| (&k.0, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Expand a Hermitian qubit operator as Σ_S coef(S) σ_S.
pub fn pauli_decompose(op: &Operator) -> Result<PauliDecomposition> {
    if op.dims().iter().any(|&d| d != 2) {
        return Err(Error::NotQubits(op.dims().to_vec()));
    }
    let n = op.num_subsystems();
    let norm = (1u64 << n) as f64;
    let mut coeffs = BTreeMap::new();
    let mut worst_imag = 0.0_f64;
    for s in PauliString::all(n) {
        let c = s.trace_with(op) / norm;
        worst_imag = worst_imag.max(c.im.abs());
        if c.re.abs() > COEFF_CUTOFF {
            coeffs.insert(PauliKey(s), c.re);
        }
    }
    if worst_imag > TOL {
        return Err(Error::NotHermitian(worst_imag));
    }
    Ok(PauliDecomposition { coeffs })
}

pub fn pauli_compose(dec: &PauliDecomposition, n_qubits: usize) -> Result<Operator> {
    // deserialized decompositions skip the length check in `add`
    if let Some((s, _)) = dec.iter().find(|(s, _)| s.len() != n_qubits) {
        return Err(Error::WrongDims {
            expected: vec![2; n_qubits],
            got: vec![2; s.len()],
        });
    }
    let side = 1usize << n_qubits;
    let mut mat = Matrix::zeros(side, side);
    for (s, c) in dec.iter() {
        for col in 0..side {
            let (row, phase) = s.act(col);
            mat[(row, col)] += phase * c;
        }
    }
    Operator::new(mat, vec![2; n_qubits])
}

/// Shorthand: `Σ c·σ_S` for the given terms, all strings of equal length.
pub fn operator_from_terms(terms: &[(&str, f64)]) -> Result<Operator> {
    let dec = PauliDecomposition::from_terms(terms)?;
    let n = dec
        .num_qubits()
        .ok_or_else(|| Error::InvalidPauliString(String::new()))?;
    pauli_compose(&dec, n)
}
