//! Newton-iteration solver.
//!
//! A gauge transformation `F = W Y` turns the equation into one whose
//! matrix `B` is a polynomial of degree `< k`, which is then solved
//! coefficient by coefficient. `W` solves the associated equation
//! `x^k delta(W) = A sigma(W) - W B` and is lifted by a Newton iteration
//! whose correction step is a matrix equation of Sylvester type.

use crate::error::{Error, Result};
use crate::linalg::{lin_solve, sylvester_solve, AffineSolution, Matrix};
use crate::polymat::SeriesMatrix;
use crate::series::{QContext, Series};
use crate::solution::SolutionSpace;
use crate::spectrum::{diagonalize, good_spectrum};

/// `B` and `V`, both polynomial of degree `< k`, with
/// `A sigma(V) = V B mod x^k` and `V_0` invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociatedData {
    pub b: SeriesMatrix,
    pub v: SeriesMatrix,
}

/// Solves `x^k delta(Y) = P sigma(Y) + Q mod x^N` for `P` of degree `< k`,
/// one coefficient at a time.
pub fn pol_coeffs_de(p: &SeriesMatrix, q: &SeriesMatrix, n_prec: usize, ctx: &QContext) -> Result<SolutionSpace> {
    let f = *p.field();
    let n = p.rows();
    let k = ctx.k();
    if p.cols() != n || q.shape() != (n, 1) {
        return Err(Error::DimensionMismatch { op: "pol_coeffs_de", left: p.shape(), right: q.shape() });
    }
    let pl: Vec<Matrix> = (0..k).map(|l| p.coefficient_matrix(l)).collect();
    let mut y: Vec<Matrix> = Vec::with_capacity(n_prec);
    let mut kernel: Vec<(usize, Matrix)> = Vec::new();
    for i in 0..n_prec {
        let mut c = q.coefficient_matrix(i);
        for l in 1..k.min(i + 1) {
            if !pl[l].is_zero() {
                c = c.add(&pl[l].mul(&y[i - l]).scale(ctx.q_pow(i - l)));
            }
        }
        let mut u = pl[0].scale(ctx.q_pow(i)).neg();
        if k == 1 {
            let g = ctx.gamma(i);
            for d in 0..n {
                u.set(d, d, f.add(u.get(d, d), g));
            }
        } else if i + 1 >= k {
            c = c.sub(&y[i + 1 - k].scale(ctx.gamma(i + 1 - k)));
        }
        match lin_solve(&u, &c)? {
            AffineSolution::Inconsistent => return Ok(SolutionSpace::Bottom),
            AffineSolution::Solved { particular, nullspace } => {
                if nullspace.cols() > 0 {
                    if k > 1 {
                        return Err(Error::Precondition(format!(
                            "coefficient system at index {i} is singular with k = {k}"
                        )));
                    }
                    kernel.push((i, nullspace));
                }
                y.push(particular);
            }
        }
    }
    let particular = SeriesMatrix::from_coefficients(f, n, 1, &y, n_prec);
    let t: usize = kernel.iter().map(|(_, m)| m.cols()).sum();
    let mut basis = SeriesMatrix::zeros(f, n, t, n_prec);
    let mut col = 0;
    for (i, m) in &kernel {
        for j in 0..m.cols() {
            for r in 0..n {
                basis.set(r, col, Series::monomial(f, m.get(r, j), *i, n_prec));
            }
            col += 1;
        }
    }
    Ok(SolutionSpace::Affine { particular, basis })
}

/// The splitting construction for `q = 1`, `k > 1`: diagonal `B` and `V`
/// with `V_0` invertible and `A V = V B mod x^k`.
pub fn splitting_lemma(a: &SeriesMatrix, ctx: &QContext) -> Result<AssociatedData> {
    let f = *a.field();
    let n = a.rows();
    let k = ctx.k();
    let (p, d) = diagonalize(&a.coefficient_matrix(0))?;
    let pinv = p.inverse()?;
    let at: Vec<Matrix> = (0..k).map(|j| pinv.mul(&a.coefficient_matrix(j)).mul(&p)).collect();
    let roots: Vec<_> = (0..n).map(|i| d.get(i, i)).collect();
    let mut bs = vec![d.clone()];
    let mut vs = vec![Matrix::identity(f, n)];
    for i in 1..k {
        let mut delta = Matrix::zeros(f, n, n);
        for j in 1..i {
            delta = delta.add(&vs[i - j].mul(&bs[j]));
        }
        for j in 1..=i {
            delta = delta.sub(&at[j].mul(&vs[i - j]));
        }
        let mut bi = Matrix::zeros(f, n, n);
        let mut vi = Matrix::zeros(f, n, n);
        for l in 0..n {
            bi.set(l, l, f.neg(delta.get(l, l)));
            for m in 0..n {
                if l != m {
                    vi.set(l, m, f.div(delta.get(l, m), f.sub(roots[l], roots[m]))?);
                }
            }
        }
        bs.push(bi);
        vs.push(vi);
    }
    let vs: Vec<Matrix> = vs.iter().map(|v| p.mul(v)).collect();
    Ok(AssociatedData {
        b: SeriesMatrix::from_coefficients(f, n, n, &bs, k),
        v: SeriesMatrix::from_coefficients(f, n, n, &vs, k),
    })
}

/// `B = A mod x^k, V = Id` when `k = 1` or `q != 1`. Otherwise `B` comes
/// from the splitting construction and `V` is its output times a diagonal
/// polynomial, chosen so that the Newton lift keeps `W = V mod x^k`.
pub fn choose_associated(a: &SeriesMatrix, ctx: &QContext) -> Result<AssociatedData> {
    let k = ctx.k();
    if k == 1 || !ctx.q_is_one() {
        return Ok(AssociatedData { b: a.truncate(k).lift(k), v: SeriesMatrix::identity(*a.field(), a.rows(), k) });
    }
    let s = splitting_lemma(a, ctx)?;
    // The diagonal integration in the first steps writes below x^k. Any
    // solution of the associated equation mod x^(2k-1), cut at x^k, is still
    // a valid V and is left alone by later steps.
    let pre = 2 * k - 1;
    let a_pre = a.truncate(pre).lift(pre);
    let it = NewtonAe { a: &a_pre, b: &s.b, v: &s.v, ctx, check: false };
    let v = it.run(pre)?.0.truncate(k);
    Ok(AssociatedData { b: s.b, v })
}

/// Solves `x^k delta(U) = B sigma(U) - U B + Gamma mod x^N` for
/// `Gamma = 0 mod x^m`, via one Sylvester equation per coefficient
/// (`k = 1` or `q != 1`).
pub fn diff_sylvester(gamma: &SeriesMatrix, b: &SeriesMatrix, m: usize, n_prec: usize, ctx: &QContext) -> Result<SeriesMatrix> {
    let f = *b.field();
    let n = b.rows();
    let k = ctx.k();
    let bl: Vec<Matrix> = (0..k).map(|l| b.coefficient_matrix(l)).collect();
    let v = bl[0].neg();
    let mut u: Vec<Matrix> = vec![Matrix::zeros(f, n, n); n_prec];
    for i in m..n_prec {
        let mut c = gamma.coefficient_matrix(i);
        for l in 1..k.min(i + 1) {
            if i - l < m || bl[l].is_zero() {
                continue;
            }
            let prev = &u[i - l];
            c = c.add(&bl[l].mul(prev).scale(ctx.q_pow(i - l))).sub(&prev.mul(&bl[l]));
        }
        let mut y = bl[0].scale(ctx.q_pow(i)).neg();
        if k == 1 {
            let g = ctx.gamma(i);
            for d in 0..n {
                y.set(d, d, f.add(y.get(d, d), g));
            }
        } else if i + 1 >= k && i + 1 - k >= m {
            c = c.sub(&u[i + 1 - k].scale(ctx.gamma(i + 1 - k)));
        }
        u[i] = sylvester_solve(&y, &v, &c)?;
    }
    Ok(SeriesMatrix::from_coefficients(f, n, n, &u, n_prec))
}

/// The same equation for `q = 1`, `k > 1` and diagonal `B`: entrywise
/// integration on the diagonal, scalar coefficient solves elsewhere.
pub fn diff_sylvester_differential(
    gamma: &SeriesMatrix,
    b: &SeriesMatrix,
    m: usize,
    n_prec: usize,
    ctx: &QContext,
) -> Result<SeriesMatrix> {
    let f = *b.field();
    let n = b.rows();
    let k = ctx.k();
    if m < k {
        return Err(Error::Precondition(format!("correction needs m >= k (m = {m}, k = {k})")));
    }
    let mut u = SeriesMatrix::zeros(f, n, n, n_prec);
    for i in 0..n {
        for j in 0..n {
            let g = gamma.get(i, j).truncate(n_prec);
            let entry = if i == j {
                // x^k U' = G  gives  U = integral of x^-k G
                g.shift_down(k, true)?.q_integrate(ctx)?.lift(n_prec)
            } else {
                let p = SeriesMatrix::from_entries(f, 1, 1, k, vec![b.get(i, i).sub(b.get(j, j))]);
                let q = SeriesMatrix::from_entries(f, 1, 1, n_prec, vec![g]);
                match pol_coeffs_de(&p, &q, n_prec, ctx)? {
                    SolutionSpace::Affine { particular, .. } => particular.get(0, 0).clone(),
                    SolutionSpace::Bottom => return Err(Error::SylvesterSingular),
                }
            };
            u.set(i, j, entry);
        }
    }
    Ok(u)
}

/// `x^k delta(W) - A sigma(W) + W B mod x^N`; zero iff `W` solves the
/// associated equation.
pub fn associated_residual(a: &SeriesMatrix, b: &SeriesMatrix, w: &SeriesMatrix, n_prec: usize, ctx: &QContext) -> Result<SeriesMatrix> {
    let w = w.lift(n_prec);
    let xkdw = w.delta(ctx).shift_up(ctx.k()).truncate(n_prec);
    let asw = a.mul_trunc(&w.sigma(ctx), n_prec)?;
    let wb = w.mul_trunc(&b.lift(n_prec), n_prec)?;
    xkdw.sub(&asw)?.add(&wb)
}

struct NewtonAe<'a> {
    a: &'a SeriesMatrix,
    b: &'a SeriesMatrix,
    v: &'a SeriesMatrix,
    ctx: &'a QContext,
    check: bool,
}

impl NewtonAe<'_> {
    /// Returns `W` modulo `x^N` and an inverse of it modulo some `x^t`.
    fn run(&self, n_prec: usize) -> Result<(SeriesMatrix, SeriesMatrix)> {
        let k = self.ctx.k();
        if n_prec <= k {
            let w = self.v.truncate(n_prec);
            let x0 = self.v.coefficient_matrix(0).inverse()?;
            return Ok((w, SeriesMatrix::constant(&x0, 1)));
        }
        let m = (n_prec + k) / 2;
        let (h, hinv) = self.run(m)?;
        let hinv = h.refine_inverse(&hinv, n_prec - m)?;
        let hl = h.lift(n_prec);

        // R = x^k delta(H) - A sigma(H) + H B, supported on [m, N)
        let xkdh = hl.delta(self.ctx).shift_up(k).window(m, n_prec);
        let ash = self.a.mul_window(&hl.sigma(self.ctx), m, n_prec)?;
        let hb = hl.mul_window(&self.b.lift(n_prec), m, n_prec)?;
        let r = xkdh.sub(&ash)?.add(&hb)?;
        if self.check {
            let full = associated_residual(self.a, self.b, &h, m, self.ctx)?;
            assert!(full.is_zero(), "H does not solve the associated equation mod x^{m}");
        }
        let gamma = hinv.mul_trunc(&r, n_prec - m)?.neg().shift_up(m);
        let u = if k == 1 || !self.ctx.q_is_one() {
            diff_sylvester(&gamma, self.b, m, n_prec, self.ctx)?
        } else {
            diff_sylvester_differential(&gamma, self.b, m, n_prec, self.ctx)?
        };
        let w = hl.add(&hl.mul_trunc(&u, n_prec)?)?;
        if self.check {
            let low = m + 1 - k;
            assert!(u.truncate(low).is_zero(), "U is not 0 mod x^{low}");
            assert!(!w.coefficient_matrix(0).det().is_zero(), "H + HU is singular at order 0");
        }
        // U = 0 mod x^(m-k+1), so W^-1 agrees with H^-1 that far
        let t = hinv.prec().min(m + 1 - k);
        Ok((w, hinv.truncate(t)))
    }
}

/// Lifts a solution `V` of the associated equation mod `x^k` to one mod
/// `x^N`.
pub fn newton_ae(a: &SeriesMatrix, assoc: &AssociatedData, n_prec: usize, ctx: &QContext) -> Result<SeriesMatrix> {
    let it = NewtonAe { a, b: &assoc.b, v: &assoc.v, ctx, check: false };
    Ok(it.run(n_prec)?.0)
}

/// Everything the Newton solver computed on the way.
#[derive(Clone, Debug)]
pub struct NewtonOutput {
    pub space: SolutionSpace,
    pub assoc: AssociatedData,
    pub w: SeriesMatrix,
}

/// Generators of the solutions of `x^k delta(F) = A sigma(F) + C mod x^N`.
/// Requires `A_0` to have good spectrum at precision `N`.
pub fn newton_solve(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize, ctx: &QContext) -> Result<SolutionSpace> {
    Ok(newton_solve_detailed(a, c, n_prec, ctx)?.space)
}

pub fn newton_solve_detailed(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize, ctx: &QContext) -> Result<NewtonOutput> {
    newton_solve_inner(a, c, n_prec, ctx, false)
}

fn newton_solve_inner(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize, ctx: &QContext, check: bool) -> Result<NewtonOutput> {
    let f = *a.field();
    let n = a.rows();
    if ctx.k() == 0 {
        return Err(Error::Precondition("k must be at least 1; reduce k = 0 instances first".into()));
    }
    if a.cols() != n || c.shape() != (n, 1) {
        return Err(Error::DimensionMismatch { op: "newton_solve", left: a.shape(), right: c.shape() });
    }
    if a.prec() < n_prec || c.prec() < n_prec {
        return Err(Error::Precondition(format!("inputs must be known modulo x^{n_prec}")));
    }
    let a = a.truncate(n_prec);
    let report = good_spectrum(&a.coefficient_matrix(0), ctx, n_prec);
    if let Some(v) = report.reason {
        return Err(Error::Spectrum(v));
    }
    let assoc = choose_associated(&a, ctx)?;
    let it = NewtonAe { a: &a, b: &assoc.b, v: &assoc.v, ctx, check };
    let (w, winv) = it.run(n_prec)?;
    let winv = w.refine_inverse(&winv, n_prec)?;
    let gamma = winv.mul_trunc(&c.truncate(n_prec), n_prec)?;
    let space = match pol_coeffs_de(&assoc.b, &gamma, n_prec, ctx)? {
        SolutionSpace::Bottom => SolutionSpace::Bottom,
        SolutionSpace::Affine { particular, basis } => {
            let basis = if basis.cols() == 0 { SeriesMatrix::zeros(f, n, 0, n_prec) } else { w.mul_trunc(&basis, n_prec)? };
            SolutionSpace::Affine { particular: w.mul_trunc(&particular, n_prec)?, basis }
        }
    };
    Ok(NewtonOutput { space, assoc, w })
}
