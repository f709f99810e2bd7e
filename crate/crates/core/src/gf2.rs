//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as packed `u64` words. Callers only see value semantics:
//! every operation behaves as if on a plain `{0,1}` matrix.

use std::fmt;
use std::ops::BitXor;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("column order is not a permutation of 0..{cols}")]
    InvalidPermutation { cols: usize },
    #[error("entry {value} at ({row}, {col}) is not 0 or 1")]
    InvalidEntry { row: usize, col: usize, value: u8 },
    #[error("linear system has no solution")]
    NoSolution,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    /// Builds a vector with ones at the given positions.
    ///
    /// Panics if a position is out of range.
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        bits.iter().copied().collect()
    }

    /// Builds a vector from `0`/`1` bytes, rejecting anything else.
    pub fn from_u8s(bits: &[u8]) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => v.set(i, true),
                value => return Err(Gf2Error::InvalidEntry { row: 0, col: i, value }),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// In-place `self ^= other`. Panics on a length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn to_u8s(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Compares as bit sequences starting from index 0.
    pub fn lex_cmp(&self, other: &BitVector) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in iter {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { words, len }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// A GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows: vec![BitVector::zeros(cols); rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { rows, cols })
    }

    /// Builds a matrix from nested `0`/`1` rows. `cols` is needed for the
    /// zero-row case.
    pub fn from_dense(rows: &[Vec<u8>], cols: usize) -> Result<Self, Gf2Error> {
        let mut out = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Gf2Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            let v = BitVector::from_u8s(row).map_err(|e| match e {
                Gf2Error::InvalidEntry { col, value, .. } => Gf2Error::InvalidEntry { row: r, col, value },
                other => other,
            })?;
            out.push(v);
        }
        Ok(Self { rows: out, cols })
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(BitVector::to_u8s).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn column(&self, c: usize) -> BitVector {
        self.rows.iter().map(|r| r.get(c)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · other^T`, computed row-against-row.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut out = BitMatrix::zeros(self.rows(), other.rows());
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if a.dot(b) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Returns a copy with `extra` appended as the last row.
    pub fn with_row(&self, extra: &BitVector) -> Result<BitMatrix, Gf2Error> {
        if extra.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, found: extra.len() });
        }
        let mut rows = self.rows.clone();
        rows.push(extra.clone());
        Ok(BitMatrix { rows, cols: self.cols })
    }

    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        mat_vec_mul(self, v)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// `H · v` over GF(2).
pub fn mat_vec_mul(h: &BitMatrix, v: &BitVector) -> Result<BitVector, Gf2Error> {
    if h.cols != v.len() {
        return Err(Gf2Error::DimensionMismatch { expected: h.cols, found: v.len() });
    }
    Ok(h.rows.iter().map(|row| row.dot(v)).collect())
}

/// Reduced row-echelon form of a matrix together with the row operations
/// that produced it (`reduced == transform · original`).
#[derive(Debug, Clone)]
pub struct Echelon {
    reduced: BitMatrix,
    transform: BitMatrix,
    pivots: Vec<usize>,
}

impl Echelon {
    /// Eliminates columns in natural order.
    pub fn new(h: &BitMatrix) -> Self {
        let order: Vec<usize> = (0..h.cols()).collect();
        Self::with_order_unchecked(h, &order)
    }

    /// Eliminates columns in the given visiting order. The first independent
    /// columns met in that order become pivots.
    pub fn with_order(h: &BitMatrix, column_order: &[usize]) -> Result<Self, Gf2Error> {
        if !is_permutation(column_order, h.cols()) {
            return Err(Gf2Error::InvalidPermutation { cols: h.cols() });
        }
        Ok(Self::with_order_unchecked(h, column_order))
    }

    fn with_order_unchecked(h: &BitMatrix, column_order: &[usize]) -> Self {
        let m = h.rows();
        let mut rows = h.rows.clone();
        let mut transform = BitMatrix::identity(m).rows;
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in column_order {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            transform.swap(r, p);
            let (pivot_row, pivot_t) = (rows[r].clone(), transform[r].clone());
            for i in 0..m {
                if i != r && rows[i].get(c) {
                    rows[i].xor_assign(&pivot_row);
                    transform[i].xor_assign(&pivot_t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Self { reduced: BitMatrix { rows, cols: h.cols() }, transform: BitMatrix { rows: transform, cols: m }, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Pivot columns; pivot `r` owns row `r` of the reduced matrix.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduced(&self) -> &BitMatrix {
        &self.reduced
    }

    pub fn transform(&self) -> &BitMatrix {
        &self.transform
    }

    /// Non-pivot columns in the order they appear in `column_order`.
    pub fn free_columns(&self, column_order: &[usize]) -> Vec<usize> {
        let mut is_pivot = vec![false; self.reduced.cols()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        column_order.iter().copied().filter(|&c| !is_pivot[c]).collect()
    }

    /// Solves `H v = s` with non-pivot entries taken from `fill` (zero when
    /// `None`). Pivot entries of `fill` are ignored.
    pub fn solve_coset(&self, s: &BitVector, fill: Option<&BitVector>) -> Result<BitVector, Gf2Error> {
        let m = self.reduced.rows();
        let n = self.reduced.cols();
        if s.len() != m {
            return Err(Gf2Error::DimensionMismatch { expected: m, found: s.len() });
        }
        let mut v = match fill {
            Some(f) if f.len() != n => {
                return Err(Gf2Error::DimensionMismatch { expected: n, found: f.len() });
            }
            Some(f) => f.clone(),
            None => BitVector::zeros(n),
        };
        for &p in &self.pivots {
            v.set(p, false);
        }
        // t = T·s ⊕ R·v_free
        let mut t = mat_vec_mul(&self.transform, s)?;
        t.xor_assign(&mat_vec_mul(&self.reduced, &v)?);
        if (self.rank()..m).any(|r| t.get(r)) {
            return Err(Gf2Error::NoSolution);
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            v.set(p, t.get(r));
        }
        Ok(v)
    }

    /// Whether `r` lies in the row space of the original matrix.
    pub fn contains_row(&self, r: &BitVector) -> Result<bool, Gf2Error> {
        if r.len() != self.reduced.cols() {
            return Err(Gf2Error::DimensionMismatch { expected: self.reduced.cols(), found: r.len() });
        }
        let mut rest = r.clone();
        for (i, &p) in self.pivots.iter().enumerate() {
            if rest.get(p) {
                rest.xor_assign(self.reduced.row(i));
            }
        }
        Ok(rest.is_zero())
    }

    /// Basis of the right kernel `{v : H v = 0}`; one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let n = self.reduced.cols();
        let natural: Vec<usize> = (0..n).collect();
        self.free_columns(&natural)
            .into_iter()
            .map(|f| {
                let mut v = BitVector::zeros(n);
                v.set(f, true);
                for (r, &p) in self.pivots.iter().enumerate() {
                    if self.reduced.get(r, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Row-reduces `h` visiting columns in `column_order`.
pub fn row_reduce(h: &BitMatrix, column_order: &[usize]) -> Result<Echelon, Gf2Error> {
    Echelon::with_order(h, column_order)
}

/// Solves `H v = s` using a precomputed echelon form of `H`.
pub fn solve_coset(echelon: &Echelon, s: &BitVector, fill: Option<&BitVector>) -> Result<BitVector, Gf2Error> {
    echelon.solve_coset(s, fill)
}

pub fn in_row_space(h: &BitMatrix, r: &BitVector) -> Result<bool, Gf2Error> {
    Echelon::new(h).contains_row(r)
}

/// Single-qubit Pauli operator, ignoring phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliSymbol {
    I,
    X,
    Y,
    Z,
}

impl PauliSymbol {
    pub const ALL: [PauliSymbol; 4] = [PauliSymbol::I, PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliSymbol::I,
            (true, false) => PauliSymbol::X,
            (true, true) => PauliSymbol::Y,
            (false, true) => PauliSymbol::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, PauliSymbol::X | PauliSymbol::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, PauliSymbol::Z | PauliSymbol::Y)
    }
}

/// 0 when the two Paulis commute, 1 otherwise.
pub fn symplectic_product(a: PauliSymbol, b: PauliSymbol) -> u8 {
    u8::from((a.x_bit() & b.z_bit()) ^ (a.z_bit() & b.x_bit()))
}
