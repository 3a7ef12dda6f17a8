//! Matrices of truncated power series.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::linalg::Matrix;
use crate::series::{mul, QContext, Series};

/// An `rows x cols` matrix whose entries are series sharing one precision.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    prec: usize,
    entries: Vec<Series>,
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SeriesMatrix {}x{} prec {}", self.rows, self.cols, self.prec)?;
        for r in 0..self.rows {
            let row: Vec<_> = (0..self.cols).map(|c| format!("{:?}", self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl SeriesMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize, prec: usize) -> Self {
        SeriesMatrix { field, rows, cols, prec, entries: vec![Series::zero(field, prec); rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize, prec: usize) -> Self {
        Self::constant(&Matrix::identity(field, n), prec)
    }

    /// A constant matrix viewed as series.
    pub fn constant(m: &Matrix, prec: usize) -> Self {
        let f = *m.field();
        let entries = m.data().iter().map(|&c| Series::constant(f, c, prec)).collect();
        SeriesMatrix { field: f, rows: m.rows(), cols: m.cols(), prec, entries }
    }

    /// Entries given row-major; they are brought to precision `prec`,
    /// treating each stored representative as exact.
    pub fn from_entries(field: PrimeField, rows: usize, cols: usize, prec: usize, entries: Vec<Series>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let entries = entries.into_iter().map(|s| s.lift(prec)).collect();
        SeriesMatrix { field, rows, cols, prec, entries }
    }

    /// Builds `sum_j M_j x^j` from coefficient matrices.
    pub fn from_coefficients(field: PrimeField, rows: usize, cols: usize, coeffs: &[Matrix], prec: usize) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = coeffs.iter().map(|m| m.get(r, c)).collect();
                entries.push(Series::new(field, v, prec));
            }
        }
        SeriesMatrix { field, rows, cols, prec, entries }
    }

    /// Single column from a list of series.
    pub fn column_vector(field: PrimeField, prec: usize, entries: Vec<Series>) -> Self {
        let n = entries.len();
        Self::from_entries(field, n, 1, prec, entries)
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn prec(&self) -> usize {
        self.prec
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Series {
        &self.entries[r * self.cols + c]
    }

    /// Replaces an entry, bringing it to this matrix's precision.
    pub fn set(&mut self, r: usize, c: usize, s: Series) {
        self.entries[r * self.cols + c] = s.lift(self.prec);
    }

    pub fn entries(&self) -> &[Series] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Series::is_zero)
    }

    /// The constant matrix of degree-`j` coefficients.
    pub fn coefficient_matrix(&self, j: usize) -> Matrix {
        let data = self.entries.iter().map(|s| s.coeff(j)).collect();
        Matrix::from_vec(self.field, self.rows, self.cols, data)
    }

    /// One past the largest stored degree over all entries.
    pub fn len(&self) -> usize {
        self.entries.iter().map(Series::len).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn map(&self, prec: usize, g: impl Fn(&Series) -> Series) -> SeriesMatrix {
        SeriesMatrix { entries: self.entries.iter().map(g).collect(), prec, ..*self }
    }

    fn zip(&self, other: &SeriesMatrix, op: &'static str, g: impl Fn(&Series, &Series) -> Series) -> Result<SeriesMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        let prec = self.prec.min(other.prec);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| g(a, b)).collect();
        Ok(SeriesMatrix { entries, prec, ..*self })
    }

    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.zip(other, "add", Series::add)
    }

    pub fn sub(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.zip(other, "sub", Series::sub)
    }

    pub fn neg(&self) -> SeriesMatrix {
        self.map(self.prec, Series::neg)
    }

    pub fn scale(&self, c: FieldElement) -> SeriesMatrix {
        self.map(self.prec, |s| s.scale(c))
    }

    /// Reduces modulo `x^n` (precision never rises).
    pub fn truncate(&self, n: usize) -> SeriesMatrix {
        let prec = n.min(self.prec);
        self.map(prec, |s| s.truncate(prec))
    }

    /// Views the stored polynomials as exact, modulo `x^n`.
    pub fn lift(&self, n: usize) -> SeriesMatrix {
        self.map(n, |s| s.lift(n))
    }

    /// Coefficients `lo..hi`, shifted down to start at degree 0.
    pub fn window(&self, lo: usize, hi: usize) -> SeriesMatrix {
        let prec = hi.min(self.prec).saturating_sub(lo);
        self.map(prec, |s| s.window(lo, hi))
    }

    /// Product modulo `x^n`.
    pub fn mul_trunc(&self, other: &SeriesMatrix, n: usize) -> Result<SeriesMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { op: "mul_trunc", left: self.shape(), right: other.shape() });
        }
        let f = self.field;
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: Vec<FieldElement> = Vec::new();
                for t in 0..self.cols {
                    let (a, b) = (self.get(r, t), other.get(t, c));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let prod = mul::mul_trunc(&f, a.coeffs(), b.coeffs(), n);
                    add_into(&f, &mut acc, &prod);
                }
                entries.push(Series::new(f, acc, n));
            }
        }
        Ok(SeriesMatrix { field: f, rows: self.rows, cols: other.cols, prec: n, entries })
    }

    /// Product at the smaller precision of the two factors.
    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.mul_trunc(other, self.prec.min(other.prec))
    }

    /// Coefficients `lo..hi` of the product, as a matrix of precision
    /// `hi - lo` starting at degree 0.
    pub fn mul_window(&self, other: &SeriesMatrix, lo: usize, hi: usize) -> Result<SeriesMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { op: "mul_window", left: self.shape(), right: other.shape() });
        }
        let f = self.field;
        let prec = hi.saturating_sub(lo);
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: Vec<FieldElement> = Vec::new();
                for t in 0..self.cols {
                    let (a, b) = (self.get(r, t), other.get(t, c));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    add_into(&f, &mut acc, &mul::mul_window(&f, a.coeffs(), b.coeffs(), lo, hi));
                }
                entries.push(Series::new(f, acc, prec));
            }
        }
        Ok(SeriesMatrix { field: f, rows: self.rows, cols: other.cols, prec, entries })
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul_const(&self, m: &Matrix) -> Result<SeriesMatrix> {
        SeriesMatrix::constant(m, self.prec).mul_trunc(self, self.prec)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul_const(&self, m: &Matrix) -> Result<SeriesMatrix> {
        self.mul_trunc(&SeriesMatrix::constant(m, self.prec), self.prec)
    }

    /// Entrywise `delta`; precision drops by one.
    pub fn delta(&self, ctx: &QContext) -> SeriesMatrix {
        self.map(self.prec.saturating_sub(1), |s| s.delta(ctx))
    }

    /// Entrywise `sigma`.
    pub fn sigma(&self, ctx: &QContext) -> SeriesMatrix {
        self.map(self.prec, |s| s.sigma(ctx))
    }

    /// Multiplication by `x^m`; precision rises by `m`.
    pub fn shift_up(&self, m: usize) -> SeriesMatrix {
        self.map(self.prec + m, |s| s.shift_up(m))
    }

    /// Division by `x^m`; precision drops by `m`. With `strict`, nonzero
    /// coefficients below `x^m` are an error instead of being dropped.
    pub fn shift_down(&self, m: usize, strict: bool) -> Result<SeriesMatrix> {
        let entries = self.entries.iter().map(|s| s.shift_down(m, strict)).collect::<Result<Vec<_>>>()?;
        Ok(SeriesMatrix { entries, prec: self.prec.saturating_sub(m), ..*self })
    }

    /// Columns `lo..hi`.
    pub fn columns(&self, lo: usize, hi: usize) -> SeriesMatrix {
        let mut entries = Vec::with_capacity(self.rows * (hi - lo));
        for r in 0..self.rows {
            entries.extend_from_slice(&self.entries[r * self.cols + lo..r * self.cols + hi]);
        }
        SeriesMatrix { entries, cols: hi - lo, ..*self }
    }

    pub fn column(&self, c: usize) -> SeriesMatrix {
        self.columns(c, c + 1)
    }

    /// `[self | other]` at the smaller precision.
    pub fn hstack(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { op: "hstack", left: self.shape(), right: other.shape() });
        }
        let prec = self.prec.min(other.prec);
        let mut entries = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries.push(self.get(r, c).truncate(prec));
            }
            for c in 0..other.cols {
                entries.push(other.get(r, c).truncate(prec));
            }
        }
        Ok(SeriesMatrix { field: self.field, rows: self.rows, cols: self.cols + other.cols, prec, entries })
    }

    /// Overwrites the columns starting at `at` with `block`.
    pub fn set_columns(&mut self, at: usize, block: &SeriesMatrix) {
        assert_eq!(self.rows, block.rows, "row mismatch");
        for r in 0..self.rows {
            for c in 0..block.cols {
                self.set(r, at + c, block.get(r, c).clone());
            }
        }
    }

    /// Inverse modulo `x^n` by Newton iteration `X <- X (2 Id - A X)`.
    pub fn inv_newton(&self, n: usize) -> Result<SeriesMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { op: "inv_newton", left: self.shape(), right: self.shape() });
        }
        let x0 = self.coefficient_matrix(0).inverse()?;
        self.refine_inverse(&SeriesMatrix::constant(&x0, 1), n)
    }

    /// Lifts an inverse known modulo `x^t` (its precision) to one modulo
    /// `x^n`, doubling the precision at each step.
    pub fn refine_inverse(&self, x: &SeriesMatrix, n: usize) -> Result<SeriesMatrix> {
        let f = self.field;
        let mut x = x.clone();
        let mut t = x.prec.max(1);
        if t >= n {
            return Ok(x.truncate(n));
        }
        while t < n {
            t = (2 * t).min(n);
            let xl = x.lift(t);
            let e = self.mul_trunc(&xl, t)?;
            let mut two_minus = e.neg();
            for i in 0..self.rows {
                let d = two_minus.get(i, i).add(&Series::constant(f, f.elem(2), t));
                two_minus.set(i, i, d);
            }
            x = xl.mul_trunc(&two_minus, t)?;
        }
        Ok(x)
    }
}

fn add_into(f: &PrimeField, acc: &mut Vec<FieldElement>, v: &[FieldElement]) {
    if acc.len() < v.len() {
        acc.resize(v.len(), FieldElement::ZERO);
    }
    for (a, &b) in acc.iter_mut().zip(v) {
        *a = f.add(*a, b);
    }
}
