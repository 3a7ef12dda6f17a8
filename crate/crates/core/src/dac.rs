//! Divide-and-conquer solver for `x^k delta(F) = A sigma(F) + C mod x^N`.
//!
//! Coefficients are determined in a binary recursion on the precision. At
//! the indices where the indicial matrix `R_i` is singular, the unknown
//! coefficient is replaced by a vector of formal parameters; once the
//! recursion is done, the leftover constraints at those indices form a small
//! linear system in the parameters.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{lin_solve, AffineSolution, Matrix};
use crate::polymat::SeriesMatrix;
use crate::series::QContext;
use crate::solution::SolutionSpace;
use crate::spectrum::{indicial_matrix, singular_indices};

/// `phi_0 + phi_1 F_{j_1} + ... + phi_r F_{j_r}`, stored as the
/// `n x (1 + r n)` series matrix `[phi_0 | phi_1 | ... | phi_r]`. Each
/// `F_{j_l}` is a vector of `n` formal constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricVector {
    blocks: Vec<usize>,
    mat: SeriesMatrix,
}

impl ParametricVector {
    pub fn new(blocks: Vec<usize>, mat: SeriesMatrix) -> Self {
        assert!(blocks.windows(2).all(|w| w[0] < w[1]), "block indices must increase");
        assert_eq!(mat.cols(), 1 + blocks.len() * mat.rows(), "width does not match the block count");
        ParametricVector { blocks, mat }
    }

    pub fn zero(field: PrimeField, n: usize, blocks: &[usize], prec: usize) -> Self {
        Self::new(blocks.to_vec(), SeriesMatrix::zeros(field, n, 1 + blocks.len() * n, prec))
    }

    /// A parameter-free vector.
    pub fn from_vector(c: &SeriesMatrix, blocks: &[usize]) -> Self {
        let mut pv = Self::zero(*c.field(), c.rows(), blocks, c.prec());
        pv.mat.set_columns(0, c);
        pv
    }

    /// The vector `F_{j_l}` of fresh parameters for block `l`.
    pub fn fresh(field: PrimeField, n: usize, blocks: &[usize], l: usize, prec: usize) -> Self {
        let mut pv = Self::zero(field, n, blocks, prec);
        pv.mat.set_columns(1 + l * n, &SeriesMatrix::identity(field, n, prec));
        pv
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_params(&self) -> usize {
        self.blocks.len() * self.n()
    }

    pub fn prec(&self) -> usize {
        self.mat.prec()
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.mat
    }

    pub fn phi0(&self) -> SeriesMatrix {
        self.mat.column(0)
    }

    pub fn block(&self, l: usize) -> SeriesMatrix {
        let n = self.n();
        self.mat.columns(1 + l * n, 1 + (l + 1) * n)
    }

    /// `[phi_1 | ... | phi_r]`
    pub fn parameter_part(&self) -> SeriesMatrix {
        self.mat.columns(1, self.mat.cols())
    }

    /// Degree-`j` coefficient as an `n x (1 + r n)` matrix.
    pub fn coefficient(&self, j: usize) -> Matrix {
        self.mat.coefficient_matrix(j)
    }

    fn with(&self, mat: SeriesMatrix) -> Self {
        ParametricVector { blocks: self.blocks.clone(), mat }
    }

    fn check_blocks(&self, other: &Self) -> Result<()> {
        if self.blocks != other.blocks || self.n() != other.n() {
            return Err(Error::DimensionMismatch { op: "parametric vector", left: self.mat.shape(), right: other.mat.shape() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_blocks(other)?;
        Ok(self.with(self.mat.add(&other.mat)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_blocks(other)?;
        Ok(self.with(self.mat.sub(&other.mat)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.mat.neg())
    }

    /// Left multiplication by a constant `n x n` matrix.
    pub fn left_mul_const(&self, m: &Matrix) -> Result<Self> {
        Ok(self.with(self.mat.left_mul_const(m)?))
    }

    /// Left multiplication by a series matrix, modulo `x^n`.
    pub fn left_mul(&self, a: &SeriesMatrix, n: usize) -> Result<Self> {
        Ok(self.with(a.mul_trunc(&self.mat, n)?))
    }

    pub fn shift_up(&self, m: usize) -> Self {
        self.with(self.mat.shift_up(m))
    }

    /// Division by `x^m`, dropping lower coefficients.
    pub fn shift_down(&self, m: usize) -> Self {
        self.with(self.mat.shift_down(m, false).expect("non-strict shift cannot fail"))
    }

    pub fn truncate(&self, n: usize) -> Self {
        self.with(self.mat.truncate(n))
    }

    pub fn lift(&self, n: usize) -> Self {
        self.with(self.mat.lift(n))
    }

    pub fn window(&self, lo: usize, hi: usize) -> Self {
        self.with(self.mat.window(lo, hi))
    }

    /// Parameters are constants, so `delta` and `sigma` act column by column.
    pub fn delta(&self, ctx: &QContext) -> Self {
        self.with(self.mat.delta(ctx))
    }

    pub fn sigma(&self, ctx: &QContext) -> Self {
        self.with(self.mat.sigma(ctx))
    }

    /// Substitutes values (an `r n x 1` matrix) for the parameters.
    pub fn specialize(&self, values: &Matrix) -> Result<SeriesMatrix> {
        if self.num_params() == 0 {
            return Ok(self.phi0());
        }
        self.phi0().add(&self.parameter_part().right_mul_const(values)?)
    }
}

/// `E(F, C, i) = x^k delta(F) - ((q^i A - gamma_i x^(k-1) Id) sigma(F) + C) mod x^n`.
pub fn pv_e(
    f: &ParametricVector,
    c: &ParametricVector,
    i: usize,
    ctx: &QContext,
    a: &SeriesMatrix,
    n: usize,
) -> Result<ParametricVector> {
    e_window(f, c, i, ctx, a, 0, n)
}

/// Coefficients `lo..hi` of `E(F, C, i)`, shifted to start at degree 0.
/// `F` is treated as an exact polynomial.
fn e_window(
    f: &ParametricVector,
    c: &ParametricVector,
    i: usize,
    ctx: &QContext,
    a: &SeriesMatrix,
    lo: usize,
    hi: usize,
) -> Result<ParametricVector> {
    f.check_blocks(c)?;
    let k = ctx.k();
    let fl = f.lift(hi);
    let sf = fl.sigma(ctx);
    let xkdf = fl.delta(ctx).shift_up(k).window(lo, hi);
    let asf = a.mul_window(&sf.mat, lo, hi)?.scale(ctx.q_pow(i));
    let mut e = xkdf.mat.sub(&asf)?;
    let g = ctx.gamma(i);
    if !g.is_zero() {
        e = e.add(&sf.shift_up(k - 1).window(lo, hi).mat.scale(g))?;
    }
    e = e.sub(&c.mat.window(lo, hi))?;
    Ok(f.with(e))
}

struct Rdac<'a> {
    a: &'a SeriesMatrix,
    a0: Matrix,
    ctx: &'a QContext,
    blocks: &'a [usize],
    check: bool,
}

impl Rdac<'_> {
    fn run(&self, c: &ParametricVector, i: usize, n: usize) -> Result<ParametricVector> {
        let field = *self.a.field();
        let dim = self.a.rows();
        if n == 1 {
            if let Ok(l) = self.blocks.binary_search(&i) {
                return Ok(ParametricVector::fresh(field, dim, self.blocks, l, 1));
            }
            let inv = indicial_matrix(&self.a0, self.ctx, i).inverse()?;
            let f0 = inv.mul(&c.coefficient(0)).neg();
            return Ok(c.with(SeriesMatrix::constant(&f0, 1)));
        }
        let m = n.div_ceil(2);
        let h = self.run(&c.truncate(m), i, m)?;
        let d = e_window(&h, c, i, self.ctx, self.a, m, n)?.neg();
        let k = self.run(&d, i + m, n - m)?;
        let f = h.lift(n).add(&k.shift_up(m))?;
        if self.check {
            let e = pv_e(&f, c, i, self.ctx, self.a, n)?;
            for j in 0..n {
                if self.blocks.binary_search(&(i + j)).is_err() {
                    assert!(e.coefficient(j).is_zero(), "E does not vanish at offset {j} (i = {i})");
                }
            }
        }
        Ok(f)
    }
}

/// One recursive call: returns `F` with `E(F, C, i)` vanishing at every
/// offset `j < n` with `i + j` outside `blocks`.
pub fn rdac(
    a: &SeriesMatrix,
    c: &ParametricVector,
    i: usize,
    n: usize,
    ctx: &QContext,
) -> Result<ParametricVector> {
    let r = Rdac { a, a0: a.coefficient_matrix(0), ctx, blocks: c.blocks(), check: false };
    r.run(c, i, n)
}

fn rdac_checked(a: &SeriesMatrix, c: &ParametricVector, i: usize, n: usize, ctx: &QContext, check: bool) -> Result<ParametricVector> {
    let r = Rdac { a, a0: a.coefficient_matrix(0), ctx, blocks: c.blocks(), check };
    r.run(c, i, n)
}

/// Generators of the solutions of `x^k delta(F) = A sigma(F) + C mod x^N`.
pub fn dac_solve(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize, ctx: &QContext) -> Result<SolutionSpace> {
    dac_solve_inner(a, c, n_prec, ctx, false)
}

fn dac_solve_inner(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize, ctx: &QContext, check: bool) -> Result<SolutionSpace> {
    let field = *a.field();
    let dim = a.rows();
    let k = ctx.k();
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1; reduce k = 0 instances first".into()));
    }
    if a.rows() != a.cols() || c.shape() != (dim, 1) {
        return Err(Error::DimensionMismatch { op: "dac_solve", left: a.shape(), right: c.shape() });
    }
    if a.prec() < n_prec || c.prec() < n_prec {
        return Err(Error::Precondition(format!("inputs must be known modulo x^{n_prec}")));
    }
    if n_prec == 0 {
        return Ok(SolutionSpace::Affine {
            particular: SeriesMatrix::zeros(field, dim, 1, 0),
            basis: SeriesMatrix::zeros(field, dim, 0, 0),
        });
    }
    let a = a.truncate(n_prec);
    let a0 = a.coefficient_matrix(0);
    let blocks = singular_indices(&a0, ctx, n_prec);
    let cpv = ParametricVector::from_vector(&c.truncate(n_prec), &blocks);
    let f = rdac_checked(&a, &cpv, 0, n_prec, ctx, check)?;
    if blocks.is_empty() {
        return Ok(SolutionSpace::Affine { particular: f.phi0(), basis: SeriesMatrix::zeros(field, dim, 0, n_prec) });
    }

    // constraints left at the singular indices: T_i = 0 for i in R
    let w = f.matrix().cols();
    let nparams = f.num_params();
    let fc: Vec<Matrix> = (0..=*blocks.last().expect("nonempty")).map(|j| f.coefficient(j)).collect();
    let mut u = Matrix::zeros(field, blocks.len() * dim, nparams);
    let mut v = Matrix::zeros(field, blocks.len() * dim, 1);
    for (b, &i) in blocks.iter().enumerate() {
        let mut t = Matrix::zeros(field, dim, w);
        if i + 1 >= k {
            t = fc[i + 1 - k].scale(ctx.gamma(i + 1 - k));
        }
        for (j, fj) in fc.iter().enumerate().take(i + 1) {
            let aij = a.coefficient_matrix(i - j);
            if aij.is_zero() {
                continue;
            }
            t = t.sub(&aij.mul(fj).scale(ctx.q_pow(j)));
        }
        for row in 0..dim {
            let ci = c.get(row, 0).coeff(i);
            v.set(b * dim + row, 0, field.neg(field.sub(t.get(row, 0), ci)));
            for p in 0..nparams {
                u.set(b * dim + row, p, t.get(row, 1 + p));
            }
        }
    }
    match lin_solve(&u, &v)? {
        AffineSolution::Inconsistent => Ok(SolutionSpace::Bottom),
        AffineSolution::Solved { particular, nullspace } => {
            let m = f.parameter_part();
            Ok(SolutionSpace::Affine {
                particular: f.phi0().add(&m.right_mul_const(&particular)?)?,
                basis: m.right_mul_const(&nullspace)?,
            })
        }
    }
}
