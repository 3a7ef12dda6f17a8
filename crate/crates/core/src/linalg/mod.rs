//! Dense exact linear algebra over a prime field.

mod stream;
mod sylvester;

pub use stream::StreamingRref;
pub use sylvester::{sylvester_solve, KroneckerSylvester, SylvesterSolver};

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::opcount;
use crate::upoly::Poly;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<FieldElement>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { field, rows, cols, data }
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    pub fn from_i64_rows(field: PrimeField, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&v| field.from_i64(v))
            })
            .collect();
        Matrix { field, rows: r, cols: c, data }
    }

    pub fn diagonal(field: PrimeField, diag: &[FieldElement]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// A column vector.
    pub fn column(field: PrimeField, v: Vec<FieldElement>) -> Self {
        let n = v.len();
        Self::from_vec(field, n, 1, v)
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix add shape mismatch");
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Matrix { data, ..*self }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sub shape mismatch");
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Matrix { data, ..*self }
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix { data: self.data.iter().map(|&a| f.neg(a)).collect(), ..*self }
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let f = self.field;
        opcount::add(self.data.len() as u64);
        Matrix { data: self.data.iter().map(|&a| f.mul_raw(a, c)).collect(), ..*self }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = self.field;
        let p = f.modulus() as u128;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: u128 = 0;
                for t in 0..self.cols {
                    acc += self.get(r, t).0 as u128 * other.get(t, c).0 as u128;
                }
                out.set(r, c, FieldElement((acc % p) as u64));
            }
        }
        opcount::add((self.rows * self.cols * other.cols) as u64);
        out
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Matrix { field: self.field, rows: self.rows, cols, data }
    }

    /// Columns `lo..hi`.
    pub fn columns(&self, lo: usize, hi: usize) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * (hi - lo));
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[lo..hi]);
        }
        Matrix { field: self.field, rows: self.rows, cols: hi - lo, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `row[dst] -= factor * row[src]`, touching columns `from..`.
    fn axpy_row(&mut self, dst: usize, src: usize, factor: FieldElement, from: usize) {
        let f = self.field;
        let cols = self.cols;
        let mut n = 0;
        for c in from..cols {
            let s = self.data[src * cols + c];
            if !s.is_zero() {
                let d = &mut self.data[dst * cols + c];
                *d = f.sub(*d, f.mul_raw(factor, s));
                n += 1;
            }
        }
        opcount::add(n);
    }

    fn scale_row(&mut self, r: usize, factor: FieldElement, from: usize) {
        let f = self.field;
        for c in from..self.cols {
            let d = &mut self.data[r * self.cols + c];
            *d = f.mul_raw(*d, factor);
        }
        opcount::add((self.cols - from) as u64);
    }

    /// Reduced row echelon form; returns the pivot column of each nonzero
    /// row, in order. Pivots are the first nonzero entry scanning rows top
    /// to bottom, so the result is deterministic.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, piv);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            m.scale_row(row, inv, col);
            for r in 0..m.rows {
                if r != row {
                    let factor = m.get(r, col);
                    if !factor.is_zero() {
                        m.axpy_row(r, row, factor, col);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel in standard RREF form: one column per free
    /// variable, with a 1 at that variable.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        kernel_from_rref(&r, &pivots, self.cols)
    }

    pub fn det(&self) -> FieldElement {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = self.field;
        let mut m = self.clone();
        let n = m.rows;
        let mut det = f.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return f.zero();
            };
            if piv != col {
                m.swap_rows(col, piv);
                det = f.neg(det);
            }
            let d = m.get(col, col);
            det = f.mul(det, d);
            let inv = f.inv(d).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = m.get(r, col);
                if !factor.is_zero() {
                    m.axpy_row(r, col, f.mul(factor, inv), col);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { op: "inverse", left: self.shape(), right: self.shape() });
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        Ok(r.columns(n, 2 * n))
    }

    /// `det(x Id - self)`, monic of degree n, via reduction to Hessenberg
    /// form.
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut h = self.clone();
        // similarity transform to upper Hessenberg form
        for j in 0..n.saturating_sub(2) {
            let Some(piv) = (j + 1..n).find(|&r| !h.get(r, j).is_zero()) else {
                continue;
            };
            if piv != j + 1 {
                h.swap_rows(piv, j + 1);
                for r in 0..n {
                    h.data.swap(r * n + piv, r * n + j + 1);
                }
            }
            let inv = f.inv(h.get(j + 1, j)).expect("pivot is nonzero");
            for r in j + 2..n {
                let u = f.mul(h.get(r, j), inv);
                if u.is_zero() {
                    continue;
                }
                // row_r -= u row_{j+1}; col_{j+1} += u col_r
                for c in 0..n {
                    let v = f.sub(h.get(r, c), f.mul(u, h.get(j + 1, c)));
                    h.set(r, c, v);
                }
                for rr in 0..n {
                    let v = f.add(h.get(rr, j + 1), f.mul(u, h.get(rr, r)));
                    h.set(rr, j + 1, v);
                }
            }
        }
        // p_{m+1} = (x - h_mm) p_m - sum_{i=1..m} (prod_{j=m-i+1..m} h_{j,j-1}) h_{m-i,m} p_{m-i}
        let mut polys: Vec<Poly> = vec![Poly::one(f)];
        for m in 0..n {
            let mut next = Poly::linear(f, f.neg(h.get(m, m))).mul(&polys[m]);
            let mut t = f.one();
            for i in 1..=m {
                t = f.mul(t, h.get(m - i + 1, m - i));
                let coef = f.mul(t, h.get(m - i, m));
                if !coef.is_zero() {
                    let term = Poly::new(f, polys[m - i].coeffs().iter().map(|&c| f.mul(c, coef)).collect());
                    next = next.sub(&term);
                }
            }
            polys.push(next);
        }
        polys.pop().expect("at least p_0")
    }

    /// Evaluates a polynomial at this (square) matrix by Horner's rule.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        let f = self.field;
        let n = self.rows;
        let mut acc = Matrix::zeros(f, n, n);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                acc.set(i, i, f.add(acc.get(i, i), c));
            }
        }
        acc
    }
}

fn kernel_from_rref(r: &Matrix, pivots: &[usize], ncols: usize) -> Matrix {
    let f = *r.field();
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
    let mut k = Matrix::zeros(f, ncols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k.set(fc, j, f.one());
        for (row, &pc) in pivots.iter().enumerate() {
            k.set(pc, j, f.neg(r.get(row, fc)));
        }
    }
    k
}

/// Result of `LinSolve(U X = V)`: either no solution, or a particular
/// solution together with a basis of the kernel of `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Inconsistent,
    Solved { particular: Matrix, nullspace: Matrix },
}

impl AffineSolution {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, AffineSolution::Inconsistent)
    }

    pub fn particular(&self) -> Option<&Matrix> {
        match self {
            AffineSolution::Solved { particular, .. } => Some(particular),
            AffineSolution::Inconsistent => None,
        }
    }

    pub fn nullspace(&self) -> Option<&Matrix> {
        match self {
            AffineSolution::Solved { nullspace, .. } => Some(nullspace),
            AffineSolution::Inconsistent => None,
        }
    }
}

/// Solves `U X = V` for a column `V` by Gauss-Jordan elimination. Free
/// variables are set to zero in the particular solution; the kernel basis
/// is the standard one read off the RREF.
pub fn lin_solve(u: &Matrix, v: &Matrix) -> Result<AffineSolution> {
    if v.cols() != 1 || v.rows() != u.rows() {
        return Err(Error::DimensionMismatch { op: "lin_solve", left: u.shape(), right: v.shape() });
    }
    let f = *u.field();
    let n = u.cols();
    let (r, pivots) = u.hstack(v).rref();
    if pivots.last() == Some(&n) {
        return Ok(AffineSolution::Inconsistent);
    }
    let mut particular = Matrix::zeros(f, n, 1);
    for (row, &pc) in pivots.iter().enumerate() {
        particular.set(pc, 0, r.get(row, n));
    }
    let nullspace = kernel_from_rref(&r.columns(0, n), &pivots, n);
    Ok(AffineSolution::Solved { particular, nullspace })
}

/// Inverse of a square matrix.
pub fn mat_inv(u: &Matrix) -> Result<Matrix> {
    u.inverse()
}

/// Characteristic polynomial `det(x Id - U)`.
pub fn char_poly(u: &Matrix) -> Poly {
    u.char_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    pub(crate) fn random_matrix(f: PrimeField, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_vec(f, r, c, (0..r * c).map(|_| f.elem(rng.gen_range(0..f.modulus()))).collect())
    }

    fn check_affine(u: &Matrix, v: &Matrix, sol: &AffineSolution) {
        if let AffineSolution::Solved { particular, nullspace } = sol {
            assert_eq!(&u.mul(particular), v);
            assert!(u.mul(nullspace).is_zero());
            assert_eq!(nullspace.rank(), nullspace.cols());
            assert_eq!(nullspace.cols() + u.rank(), u.cols());
        }
    }

    #[test]
    fn lin_solve_examples() {
        let f = f7();
        let id = Matrix::identity(f, 2);
        let v = Matrix::from_i64_rows(f, &[&[3], &[4]]);
        let sol = lin_solve(&id, &v).unwrap();
        assert_eq!(sol.particular().unwrap(), &v);
        assert_eq!(sol.nullspace().unwrap().cols(), 0);

        let zero = Matrix::zeros(f, 1, 1);
        let sol = lin_solve(&zero, &Matrix::zeros(f, 1, 1)).unwrap();
        assert_eq!(sol.particular().unwrap(), &Matrix::zeros(f, 1, 1));
        assert_eq!(sol.nullspace().unwrap(), &Matrix::identity(f, 1));

        let one = Matrix::from_i64_rows(f, &[&[1]]);
        assert_eq!(lin_solve(&zero, &one).unwrap(), AffineSolution::Inconsistent);
    }

    #[test]
    fn lin_solve_random_residuals_and_determinism() {
        let f = PrimeField::new(DEFAULT_PRIME).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..7 {
            for rank_cut in 0..n {
                // build a matrix of rank n - rank_cut
                let a = random_matrix(f, &mut rng, n, n - rank_cut);
                let b = random_matrix(f, &mut rng, n - rank_cut, n);
                let u = a.mul(&b);
                let consistent_rhs = u.mul(&random_matrix(f, &mut rng, n, 1));
                let random_rhs = random_matrix(f, &mut rng, n, 1);
                for v in [consistent_rhs, random_rhs] {
                    let sol = lin_solve(&u, &v).unwrap();
                    check_affine(&u, &v, &sol);
                    assert_eq!(sol, lin_solve(&u, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let f = f7();
        assert_eq!(mat_inv(&Matrix::identity(f, 3)).unwrap(), Matrix::identity(f, 3));
        let d = Matrix::from_i64_rows(f, &[&[2, 0], &[0, 3]]);
        assert_eq!(mat_inv(&d).unwrap(), Matrix::from_i64_rows(f, &[&[4, 0], &[0, 5]]));
        let s = Matrix::from_i64_rows(f, &[&[1, 1], &[1, 1]]);
        assert_eq!(mat_inv(&s), Err(Error::SingularMatrix));
    }

    #[test]
    fn char_poly_examples() {
        let f = PrimeField::new(101).unwrap();
        let d = Matrix::from_i64_rows(f, &[&[1, 0], &[0, 2]]);
        assert_eq!(char_poly(&d), Poly::from_i64s(f, &[2, -3, 1]));
        assert_eq!(char_poly(&Matrix::zeros(f, 2, 2)), Poly::from_i64s(f, &[0, 0, 1]));
        // companion matrix of x^2 + 3x + 5
        let c = Matrix::from_i64_rows(f, &[&[0, -5], &[1, -3]]);
        assert_eq!(char_poly(&c), Poly::from_i64s(f, &[5, 3, 1]));
    }

    #[test]
    fn char_poly_matches_determinant_and_cayley_hamilton() {
        let f = PrimeField::new(97).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=5 {
            for _ in 0..10 {
                let mut u = random_matrix(f, &mut rng, n, n);
                // sprinkle zeros so the Hessenberg pivot search gets exercised
                for i in 0..n {
                    if rng.gen_bool(0.3) {
                        u.set(i, 0, f.zero());
                    }
                }
                let chi = char_poly(&u);
                assert_eq!(chi.degree(), Some(n));
                assert_eq!(chi.leading(), f.one());
                assert!(u.eval_poly(&chi).is_zero());
                // brute force: chi(t) = det(t Id - U) at every t
                for t in 0..97 {
                    let t = f.elem(t);
                    let tid = Matrix::identity(f, n).scale(t);
                    assert_eq!(chi.eval(t), tid.sub(&u).det());
                }
            }
        }
    }

    #[test]
    fn kernel_is_kernel() {
        let f = f7();
        let u = Matrix::from_i64_rows(f, &[&[1, 2, 3], &[2, 4, 6]]);
        let k = u.kernel();
        assert_eq!(k.cols(), 2);
        assert!(u.mul(&k).is_zero());
    }
}
