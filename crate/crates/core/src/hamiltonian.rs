//! Pauli-sum qubit Hamiltonians.
//!
//! A Hamiltonian is a real-weighted sum of n-qubit Pauli strings
//!
//!   H = Σ_l c_l P_l
//!
//! plus an optional constant energy shift that is carried along for
//! reporting but never enters the qubit operator. Letter `q` of a string
//! acts on qubit `q`, and qubit 0 is the most significant bit of a
//! computational-basis index (tensor products read left to right).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on qubit count for dense operations.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Coefficients with magnitude at or below this are dropped on merge.
pub const MERGE_TOLERANCE: f64 = 1e-15;

/// Tolerance on `⟨ψ|ψ⟩ − 1` accepted as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

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

    /// True for X and Y (letters that flip the computational bit).
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// True for Z and Y (letters that carry a bit-dependent sign).
    pub fn phases(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product of two letters with the phase discarded.
    pub fn mul_unphased(self, other: Pauli) -> Pauli {
        let x = self.flips() ^ other.flips();
        let z = self.phases() ^ other.phases();
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// A tensor product of single-qubit Pauli letters, one per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits.max(1)],
        }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Bit masks (flip mask, sign mask) in the basis-index convention.
    pub fn masks(&self) -> (usize, usize) {
        let n = self.letters.len();
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        for (q, p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.flips() {
                xmask |= bit;
            }
            if p.phases() {
                zmask |= bit;
            }
        }
        (xmask, zmask)
    }

    fn y_count(&self) -> usize {
        self.letters.iter().filter(|p| **p == Pauli::Y).count()
    }

    /// Applies `coeff · P` to `input` and accumulates into `out`.
    pub fn apply_accumulate(&self, coeff: f64, input: &[Complex64], out: &mut [Complex64]) {
        let (xmask, zmask) = self.masks();
        let base = i_power(self.y_count()) * coeff;
        for (j, amp) in input.iter().enumerate() {
            let sign = if (j & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[j ^ xmask] += base * sign * amp;
        }
    }

    /// Permutes letters: new letter at position `perm[q]` is old letter `q`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut letters = vec![Pauli::I; self.letters.len()];
        for (q, p) in self.letters.iter().enumerate() {
            letters[perm[q]] = *p;
        }
        Self { letters }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad Pauli letter '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

fn i_power(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Canonical weighted sum of Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    terms: Vec<(f64, PauliString)>,
    n_qubits: usize,
    constant_shift: f64,
}

impl PauliSum {
    /// Builds a canonical sum: sorted by letters, duplicates merged,
    /// near-zero coefficients removed.
    pub fn new(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
        constant_shift: f64,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("n_qubits must be positive".into()));
        }
        if !constant_shift.is_finite() {
            return Err(Error::InvalidArgument("non-finite constant shift".into()));
        }
        let mut raw: Vec<(f64, PauliString)> = Vec::new();
        for (c, s) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient for {s}")));
            }
            if s.n_qubits() != n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "string {s} has {} letters, expected {n_qubits}",
                    s.n_qubits()
                )));
            }
            raw.push((c, s));
        }
        raw.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(f64, PauliString)> = Vec::with_capacity(raw.len());
        for (c, s) in raw {
            match merged.last_mut() {
                Some((acc, last)) if *last == s => *acc += c,
                _ => merged.push((c, s)),
            }
        }
        merged.retain(|(c, _)| c.abs() > MERGE_TOLERANCE);
        Ok(Self {
            terms: merged,
            n_qubits,
            constant_shift,
        })
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn constant_shift(&self) -> f64 {
        self.constant_shift
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ |c_l|, an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, s)| (c * factor, s.clone())).collect(),
            n_qubits: self.n_qubits,
            constant_shift: self.constant_shift * factor,
        }
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_qubits];
        if perm.len() != self.n_qubits {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        for &p in perm {
            if p >= self.n_qubits || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        Self::new(
            self.n_qubits,
            self.terms.iter().map(|(c, s)| (*c, s.relabel(perm))),
            self.constant_shift,
        )
    }

    /// H|ψ⟩ without forming the dense matrix.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: psi.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (c, s) in &self.terms {
            s.apply_accumulate(*c, psi, &mut out);
        }
        Ok(out)
    }

    /// Serializes back to the text file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.constant_shift != 0.0 {
            out.push_str(&format!("shift {}\n", self.constant_shift));
        }
        for (c, s) in &self.terms {
            out.push_str(&format!("{c} {s}\n"));
        }
        out
    }
}

/// Parses the line-oriented Hamiltonian format.
///
/// Each non-blank line is `<coefficient> <letters>`; `#` starts a comment;
/// an optional `shift <value>` line sets the constant energy offset.
pub fn parse_hamiltonian(text: &str) -> Result<PauliSum> {
    let mut terms = Vec::new();
    let mut shift = 0.0;
    let mut n_qubits: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let first = fields.next().unwrap_or_default();
        let second = fields.next();
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected two fields".into(),
            });
        }
        if first.eq_ignore_ascii_case("shift") {
            let v = second.ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "missing shift value".into(),
            })?;
            shift = parse_coefficient(v, line_no)?;
            continue;
        }
        let coeff = parse_coefficient(first, line_no)?;
        let letters = second.ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "missing Pauli letters".into(),
        })?;
        let string: PauliString = letters.parse().map_err(|e: Error| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        match n_qubits {
            None => n_qubits = Some(string.n_qubits()),
            Some(n) if n != string.n_qubits() => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!(
                        "inconsistent string length {} (expected {n})",
                        string.n_qubits()
                    ),
                })
            }
            _ => {}
        }
        terms.push((coeff, string));
    }
    let n = n_qubits.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "no Hamiltonian terms found".into(),
    })?;
    PauliSum::new(n, terms, shift)
}

fn parse_coefficient(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("malformed coefficient '{s}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite coefficient '{s}'"),
        });
    }
    Ok(v)
}

pub fn check_qubit_limit(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits > limit {
        return Err(Error::Capacity {
            what: "qubits for dense representation",
            value: n_qubits,
            limit,
        });
    }
    Ok(())
}

/// Dense 2^n × 2^n matrix of `h`.
pub fn to_dense(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    to_dense_with_limit(h, DEFAULT_MAX_QUBITS)
}

pub fn to_dense_with_limit(h: &PauliSum, max_qubits: usize) -> Result<DMatrix<Complex64>> {
    check_qubit_limit(h.n_qubits(), max_qubits)?;
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, s) in h.terms() {
        let (xmask, zmask) = s.masks();
        let base = i_power(s.y_count()) * *c;
        for j in 0..dim {
            let sign = if (j & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(j ^ xmask, j)] += base * sign;
        }
    }
    Ok(m)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues and reference-state overlaps of a Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub tau: f64,
}

impl SpectralDecomposition {
    /// Eigenvalues of τH.
    pub fn scaled_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l * self.tau).collect()
    }

    /// g_k = Σ p_i e^{−iτλ_i k}.
    pub fn g(&self, k: i64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.overlaps)
            .map(|(l, p)| Complex64::from_polar(*p, -self.tau * l * k as f64))
            .sum()
    }
}

pub fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let n2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (n2 - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// Exact spectral measure of `psi` under `h`.
pub fn spectral_measure(h: &PauliSum, tau: f64, psi: &[Complex64]) -> Result<SpectralDecomposition> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let m = to_dense(h)?;
    if psi.len() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: psi.len(),
        });
    }
    check_normalized(psi)?;
    let (values, vectors) = eigh(&m);
    let overlaps = (0..values.len())
        .map(|i| {
            vectors
                .column(i)
                .iter()
                .zip(psi)
                .map(|(v, a)| v.conj() * a)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues: values,
        overlaps,
        tau,
    })
}

/// τ = bound / Σ|c_l|, so that ‖τH‖ ≤ bound.
pub fn select_tau(h: &PauliSum, bound: f64) -> Result<f64> {
    if !(bound > 0.0 && bound <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(Error::Domain(format!("bound must lie in (0, π/2], got {bound}")));
    }
    let norm = h.one_norm();
    if norm == 0.0 {
        return Err(Error::Domain("zero Hamiltonian".into()));
    }
    Ok(bound / norm)
}

/// e^{−i t H} via dense diagonalization.
pub fn evolution_operator(h: &PauliSum, t: f64) -> Result<DMatrix<Complex64>> {
    let m = to_dense(h)?;
    let (values, vectors) = eigh(&m);
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|l| Complex64::from_polar(1.0, -t * l)),
    ));
    Ok(&vectors * phases * vectors.adjoint())
}

/// Computational basis state from a bit string such as `"01"`.
pub fn basis_state(bits: &str) -> Result<Vec<Complex64>> {
    let n = bits.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty bit string".into()));
    }
    let mut index = 0usize;
    for c in bits.chars() {
        index <<= 1;
        match c {
            '0' => {}
            '1' => index |= 1,
            _ => return Err(Error::InvalidArgument(format!("bad bit '{c}'"))),
        }
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[index] = Complex64::new(1.0, 0.0);
    Ok(psi)
}
