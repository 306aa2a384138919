//! Dense exact linear algebra over a prime field GF(p).
//!
//! Everything downstream (algebras, modules, resolutions, Tor) reduces to
//! rank and kernel computations performed here. Matrices are dense and
//! row-major. Elimination always chooses the first row carrying a nonzero
//! entry in the current column, so echelon forms and kernel bases are
//! reproducible.
//!
//! Row operations accumulate into `u64` without reducing: every entry
//! starts below `p < 2^16` and receives at most one product `< p^2` per
//! pivot, so no overflow is possible before the final reduction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field GF(p) for a prime `p < 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 16 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in GF({})", self.p);
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        t0.rem_euclid(self.p as i64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Canonical representative of an arbitrary integer.
    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn reduce_u64(self, a: u64) -> u32 {
        (a % self.p as u64) as u32
    }

    pub fn scalar(self, value: i64) -> Scalar {
        Scalar {
            value: self.reduce(value),
            field: self,
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// A field element carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u32,
    field: PrimeField,
}

impl Scalar {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Scalar> {
        (self.value != 0).then(|| Scalar {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }

    fn check(self, other: Scalar) {
        assert_eq!(
            self.field, other.field,
            "arithmetic on scalars with different moduli"
        );
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Gauss–Jordan elimination on a dense row-major buffer whose entries are
/// congruence classes mod `p` (not necessarily reduced).
///
/// On return the first `pivots.len()` rows hold reduced, normalised pivot
/// rows; the remaining rows are zero mod `p`. With `full = false` only the
/// rows below each pivot are cleared (row echelon form, enough for rank).
pub(crate) fn eliminate(
    field: PrimeField,
    data: &mut [u64],
    rows: usize,
    cols: usize,
    full: bool,
) -> Vec<usize> {
    debug_assert_eq!(data.len(), rows * cols);
    let p = field.modulus() as u64;
    let mut pivots = Vec::new();
    let mut prow: Vec<u32> = Vec::with_capacity(cols);
    let mut nz: Vec<usize> = Vec::with_capacity(cols);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(r) = (rank..rows).find(|&r| data[r * cols + c] % p != 0) else {
            continue;
        };
        if r != rank {
            for j in c..cols {
                data.swap(r * cols + j, rank * cols + j);
            }
        }
        let base = rank * cols;
        let inv = field.inv((data[base + c] % p) as u32) as u64;
        prow.clear();
        nz.clear();
        for j in c..cols {
            let v = (data[base + j] % p) * inv % p;
            data[base + j] = v;
            prow.push(v as u32);
            if v != 0 && j > c {
                nz.push(j - c);
            }
        }
        let sparse = nz.len() * 4 < cols - c;
        let start = if full { 0 } else { rank + 1 };
        for r2 in start..rows {
            if r2 == rank {
                continue;
            }
            let off = r2 * cols;
            let e = data[off + c] % p;
            if e == 0 {
                continue;
            }
            let coef = p - e;
            data[off + c] = 0;
            let row = &mut data[off + c..off + cols];
            if sparse {
                for &j in &nz {
                    row[j] += coef * prow[j] as u64;
                }
            } else {
                for (x, &y) in row.iter_mut().zip(prow.iter()).skip(1) {
                    *x += coef * y as u64;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// A dense matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form of a matrix.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rank: usize,
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    /// Basis of `{v : m v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Subspace {
        let cols = self.reduced.cols;
        let field = self.reduced.field;
        let mut is_pivot = vec![false; cols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Matrix::zeros(field, free.len(), cols);
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, 1);
            for (r, &pc) in self.pivots.iter().enumerate() {
                let v = self.reduced.get(r, f);
                if v != 0 {
                    basis.set(k, pc, field.neg(v));
                }
            }
        }
        Subspace {
            field,
            ambient: cols,
            basis,
            pivots: free,
        }
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from a row-major buffer of residues.
    pub fn from_flat(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let p = field.modulus();
        let data = data.into_iter().map(|v| v % p).collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix whose rows are the given residue vectors.
    pub fn from_row_vecs(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row vectors");
            data.extend_from_slice(r);
        }
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given residue vectors.
    pub fn from_col_vecs(field: PrimeField, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged column vectors");
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.modulus() as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                for (x, &b) in acc.iter_mut().zip(other.row(k)) {
                    *x += a * b as u64;
                }
            }
            for (j, &x) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (x % p) as u32;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let p = self.field.modulus() as u64;
        (0..self.rows)
            .map(|r| {
                let s: u64 = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix difference".into()));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
            ..*self
        }
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, s: u32, other: &Matrix) {
        assert!(self.rows == other.rows && self.cols == other.cols);
        if s == 0 {
            return;
        }
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(s, b));
        }
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(
            self.field,
            self.rows + other.rows,
            self.cols + other.cols,
        );
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        let mut m = Matrix::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b != 0 {
                            m.set(i * other.rows + k, j * other.cols + l, f.mul(a, b));
                        }
                    }
                }
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.data[r * cols.len() + k] = self.get(r, c);
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    fn widened(&self) -> Vec<u64> {
        self.data.iter().map(|&v| v as u64).collect()
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate along the shorter side
        let (m, rows, cols) = if self.rows > self.cols {
            (self.transpose(), self.cols, self.rows)
        } else {
            (self.clone(), self.rows, self.cols)
        };
        let mut buf = m.widened();
        eliminate(self.field, &mut buf, rows, cols, false).len()
    }

    pub fn rref(&self) -> Rref {
        let mut buf = self.widened();
        let pivots = eliminate(self.field, &mut buf, self.rows, self.cols, true);
        let p = self.field.modulus() as u64;
        let data = buf.into_iter().map(|v| (v % p) as u32).collect();
        Rref {
            rank: pivots.len(),
            reduced: Matrix {
                field: self.field,
                rows: self.rows,
                cols: self.cols,
                data,
            },
            pivots,
        }
    }

    pub fn kernel(&self) -> Subspace {
        self.rref().kernel()
    }

    /// Some `x` with `self · x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let aug = self
            .hstack(&Matrix::from_col_vecs(self.field, self.rows, &[b.to_vec()]))
            .expect("same field");
        let rr = aug.rref();
        if rr.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &c) in rr.pivots.iter().enumerate() {
            x[c] = rr.reduced.get(r, self.cols);
        }
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let rr = self
            .hstack(&Matrix::identity(self.field, n))
            .expect("same field")
            .rref();
        if rr.rank < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(rr.reduced.select_cols(&cols))
    }
}

/// A subspace of GF(p)^ambient given by a pivot-reduced basis: row `i` has
/// a 1 in column `pivots[i]` and every other row has a 0 there. Pivots are
/// strictly increasing. Bases produced by [`Subspace::from_spanning`] are in
/// reduced row echelon form; [`Subspace::echelon`] canonicalises any basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// The span of the standard basis vectors with the given indices.
    pub fn coordinate(field: PrimeField, ambient: usize, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut basis = Matrix::zeros(field, idx.len(), ambient);
        for (r, &c) in idx.iter().enumerate() {
            basis.set(r, c, 1);
        }
        Subspace {
            field,
            ambient,
            basis,
            pivots: idx,
        }
    }

    /// Span of the rows of `m`, in reduced row echelon form.
    pub fn from_spanning(m: &Matrix) -> Self {
        let rr = m.rref();
        let keep: Vec<usize> = (0..rr.rank).collect();
        Subspace {
            field: m.field,
            ambient: m.cols,
            basis: rr.reduced.select_rows(&keep),
            pivots: rr.pivots,
        }
    }

    /// Span of the given vectors.
    pub fn span(field: PrimeField, ambient: usize, vectors: &[Vec<u32>]) -> Self {
        Subspace::from_spanning(&Matrix::from_row_vecs(field, ambient, vectors))
    }

    /// Builds a subspace from a basis that is already pivot-reduced.
    pub(crate) fn from_reduced_parts(basis: Matrix, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(basis.rows(), pivots.len());
        Subspace {
            field: basis.field,
            ambient: basis.cols,
            basis,
            pivots,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vector(&self, i: usize) -> &[u32] {
        self.basis.row(i)
    }

    /// Canonical reduced row echelon basis of the same subspace.
    pub fn echelon(&self) -> Subspace {
        Subspace::from_spanning(&self.basis)
    }

    /// Subtracts basis multiples so that `v` vanishes on every pivot; the
    /// result is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let p = f.modulus() as u64;
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = (acc[pc] % p) as u32;
            if c == 0 {
                continue;
            }
            let coef = (f.modulus() - c) as u64;
            for (a, &b) in acc.iter_mut().zip(self.basis.row(i)) {
                *a += coef * b as u64;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in this basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let c: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        self.contains(v).then_some(c)
    }

    /// Coordinates of a vector known to lie in the subspace.
    #[inline]
    pub fn coordinates_unchecked(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&pc| v[pc]).collect()
    }

    /// The vector with the given coordinates.
    pub fn combine(&self, coords: &[u32]) -> Vec<u32> {
        assert_eq!(coords.len(), self.dim());
        let p = self.field.modulus() as u64;
        let mut acc = vec![0u64; self.ambient];
        for (i, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (a, &b) in acc.iter_mut().zip(self.basis.row(i)) {
                *a += c as u64 * b as u64;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of GF(p)^{} and GF(p)^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace::from_spanning(
            &self.basis.vstack(&other.basis).expect("checked"),
        ))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        Ok(self.meet_join(other)?.0)
    }

    /// Intersection and sum at once (Zassenhaus): reduce `[[U, U], [V, 0]]`;
    /// rows with vanishing left half carry the intersection on the right.
    pub fn meet_join(&self, other: &Subspace) -> Result<(Subspace, Subspace)> {
        self.check_compatible(other)?;
        let n = self.ambient;
        let f = self.field;
        let top = self.basis.hstack(&self.basis).expect("same field");
        let bottom = other
            .basis
            .hstack(&Matrix::zeros(f, other.dim(), n))
            .expect("same field");
        let rr = top.vstack(&bottom).expect("same width").rref();
        let left: Vec<usize> = (0..n).collect();
        let right: Vec<usize> = (n..2 * n).collect();
        let split = rr.pivots.iter().take_while(|&&c| c < n).count();
        let sum_rows: Vec<usize> = (0..split).collect();
        let meet_rows: Vec<usize> = (split..rr.rank).collect();
        let sum = Subspace {
            field: f,
            ambient: n,
            basis: rr.reduced.select_rows(&sum_rows).select_cols(&left),
            pivots: rr.pivots[..split].to_vec(),
        };
        let meet_basis = rr.reduced.select_rows(&meet_rows).select_cols(&right);
        let meet = Subspace {
            field: f,
            ambient: n,
            basis: meet_basis,
            pivots: rr.pivots[split..].iter().map(|&c| c - n).collect(),
        };
        Ok((meet, sum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn field_rejects_composites_and_large() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(65537).is_err());
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn inverses() {
        let f = gf(65521);
        for a in [1u32, 2, 3, 1000, 65520] {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        let s = f.scalar(-3);
        assert_eq!((s * s.inv().unwrap()).value(), 1);
        assert_eq!((s + (-s)).value(), 0);
    }

    #[test]
    fn empty_matrix() {
        let m = Matrix::zeros(gf(5), 0, 0);
        let rr = m.rref();
        assert_eq!(rr.rank, 0);
        assert_eq!(rr.kernel().dim(), 0);
    }

    #[test]
    fn identity_has_full_rank() {
        let m = Matrix::identity(gf(5), 3);
        let rr = m.rref();
        assert_eq!(rr.rank, 3);
        assert_eq!(rr.kernel().dim(), 0);
    }

    #[test]
    fn rank_one_kernel() {
        let m = Matrix::from_rows(gf(5), &[[1, 2], [2, 4]]).unwrap();
        let rr = m.rref();
        assert_eq!(rr.rank, 1);
        let k = rr.kernel();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.vector(0), &[3, 1]);
        assert_eq!(m.mul_vec(k.vector(0)), vec![0, 0]);
    }

    #[test]
    fn solve_inconsistent() {
        let m = Matrix::from_rows(gf(7), &[[1, 1], [2, 2]]).unwrap();
        assert!(m.solve(&[1, 3]).is_none());
        let x = m.solve(&[1, 2]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![1, 2]);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = gf(11);
        let m = Matrix::from_rows(f, &[[2, 1, 0], [0, 3, 1], [1, 0, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f, 3));
        let sing = Matrix::from_rows(f, &[[1, 2], [2, 4]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn mismatched_moduli_rejected() {
        let a = Matrix::identity(gf(5), 2);
        let b = Matrix::identity(gf(7), 2);
        assert_eq!(a.mul(&b), Err(Error::ModulusMismatch(5, 7)));
    }

    #[test]
    fn meet_join_identities() {
        let f = gf(5);
        let u = Subspace::span(f, 3, &[vec![1, 2, 0], vec![0, 1, 4]]);
        let (m, j) = u.meet_join(&u).unwrap();
        assert_eq!(m, u.echelon());
        assert_eq!(j, u.echelon());

        let e1 = Subspace::coordinate(f, 3, &[0]);
        let e23 = Subspace::coordinate(f, 3, &[1, 2]);
        let (m, j) = e1.meet_join(&e23).unwrap();
        assert_eq!(m.dim(), 0);
        assert_eq!(j.dim(), 3);

        let other = Subspace::zero(f, 4);
        assert!(matches!(
            e1.meet_join(&other),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kernel_basis_is_pivot_reduced() {
        let f = gf(7);
        let m = Matrix::from_rows(f, &[[1, 2, 3, 4, 5], [0, 0, 1, 1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 3);
        for i in 0..k.dim() {
            assert!(m.mul_vec(k.vector(i)).iter().all(|&x| x == 0));
            for (j, &pc) in k.pivots().iter().enumerate() {
                assert_eq!(k.vector(i)[pc], u32::from(i == j));
            }
        }
    }
}
