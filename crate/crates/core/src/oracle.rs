//! Reference machinery: problem instances, the dense `nN`-dimensional
//! solver, residuals, comparison of solution spaces and random instances.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dac::dac_solve;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField, DEFAULT_PRIME};
use crate::linalg::{AffineSolution, Matrix, StreamingRref};
use crate::newton::newton_solve;
use crate::opcount;
use crate::polymat::SeriesMatrix;
use crate::series::{QContext, Series};
use crate::solution::SolutionSpace;
use crate::spectrum::good_spectrum;

/// `x^k delta(F) = A sigma(F) + C mod x^N` with `k >= 1`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    ctx: QContext,
    n: usize,
    n_prec: usize,
    a: SeriesMatrix,
    c: SeriesMatrix,
}

impl ProblemInstance {
    /// Validates and normalizes an instance; `k = 0` is rewritten with
    /// [`reduce_k0`].
    pub fn new(field: PrimeField, q: FieldElement, k: usize, n_prec: usize, a: SeriesMatrix, c: SeriesMatrix) -> Result<Self> {
        let n = a.rows();
        if n == 0 {
            return Err(Error::InvalidInstance("n must be positive".into()));
        }
        if n_prec == 0 {
            return Err(Error::InvalidInstance("N must be positive".into()));
        }
        if a.cols() != n || c.shape() != (n, 1) {
            return Err(Error::InvalidInstance(format!("A is {:?} and C is {:?}", a.shape(), c.shape())));
        }
        if a.field() != &field || c.field() != &field {
            return Err(Error::InvalidInstance("entries live in a different field".into()));
        }
        if a.prec() < n_prec || c.prec() < n_prec {
            return Err(Error::InvalidInstance(format!("A and C must be known modulo x^{n_prec}")));
        }
        let (a, c, n_prec, k) = if k == 0 {
            let (a, c, n1) = reduce_k0(&a, &c, n_prec);
            (a, c, n1, 1)
        } else {
            (a.truncate(n_prec), c.truncate(n_prec), n_prec, k)
        };
        if q == field.one() && field.modulus() as usize <= n_prec {
            return Err(Error::InvalidInstance(format!(
                "q = 1 needs p > N (p = {}, N = {n_prec})",
                field.modulus()
            )));
        }
        let ctx = QContext::new(field, q, k, n_prec)?;
        Ok(ProblemInstance { ctx, n, n_prec, a, c })
    }

    pub fn field(&self) -> &PrimeField {
        self.ctx.field()
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn q(&self) -> FieldElement {
        self.ctx.q()
    }

    pub fn k(&self) -> usize {
        self.ctx.k()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_prec(&self) -> usize {
        self.n_prec
    }

    pub fn a(&self) -> &SeriesMatrix {
        &self.a
    }

    pub fn c(&self) -> &SeriesMatrix {
        &self.c
    }
}

/// `delta(F) = A sigma(F) + C mod x^N` has the same solutions as
/// `x delta(F) = xA sigma(F) + xC mod x^(N+1)`.
pub fn reduce_k0(a: &SeriesMatrix, c: &SeriesMatrix, n_prec: usize) -> (SeriesMatrix, SeriesMatrix, usize) {
    (a.truncate(n_prec).shift_up(1), c.truncate(n_prec).shift_up(1), n_prec + 1)
}

/// `x^k delta(F) - A sigma(F) - C mod x^N`.
pub fn residual(f: &SeriesMatrix, inst: &ProblemInstance) -> Result<SeriesMatrix> {
    let n = inst.n_prec;
    if f.prec() < n {
        return Err(Error::Precondition(format!("solution known modulo x^{} only, need x^{n}", f.prec())));
    }
    if f.shape() != (inst.n, 1) {
        return Err(Error::DimensionMismatch { op: "residual", left: f.shape(), right: (inst.n, 1) });
    }
    homogeneous_residual(f, inst)?.sub(&inst.c)
}

/// `x^k delta(F) - A sigma(F) mod x^N`, for any number of columns.
pub fn homogeneous_residual(f: &SeriesMatrix, inst: &ProblemInstance) -> Result<SeriesMatrix> {
    let n = inst.n_prec;
    let ctx = &inst.ctx;
    let f = f.truncate(n);
    let lhs = f.delta(ctx).shift_up(ctx.k()).truncate(n);
    lhs.sub(&inst.a.mul_trunc(&f.sigma(ctx), n)?)
}

/// Solves the instance as a linear system on the `nN` coefficients of `F`,
/// unknowns ordered coefficient-major. Makes no assumption on `A_0`.
pub fn dense_solve(inst: &ProblemInstance) -> SolutionSpace {
    let f = *inst.field();
    let (n, big_n, k) = (inst.n, inst.n_prec, inst.k());
    let ctx = &inst.ctx;
    let a: Vec<Matrix> = (0..big_n).map(|j| inst.a.coefficient_matrix(j)).collect();
    let mut sys = StreamingRref::new(f, n * big_n);
    let mut row = Vec::new();
    for i in 0..big_n {
        let rhs_i = inst.c.coefficient_matrix(i);
        for r in 0..n {
            row.clear();
            row.resize((i + 1) * n, f.zero());
            let mut muls = 0u64;
            for j in 0..=i {
                let aij = &a[i - j];
                let qj = f.neg(ctx.q_pow(j));
                for b in 0..n {
                    let v = aij.get(r, b);
                    if !v.is_zero() {
                        row[j * n + b] = f.mul_raw(qj, v);
                        muls += 1;
                    }
                }
            }
            opcount::add(muls);
            if i + 1 >= k {
                let col = (i + 1 - k) * n + r;
                row[col] = f.add(row[col], ctx.gamma(i + 1 - k));
            }
            sys.push_row(&mut row, rhs_i.get(r, 0));
            if sys.is_inconsistent() {
                return SolutionSpace::Bottom;
            }
        }
    }
    match sys.finish() {
        AffineSolution::Inconsistent => SolutionSpace::Bottom,
        AffineSolution::Solved { particular, nullspace } => SolutionSpace::Affine {
            particular: unflatten(&particular, n, big_n),
            basis: unflatten(&nullspace, n, big_n),
        },
    }
}

/// Coefficient-major `nN x t` matrix to an `n x t` series matrix.
fn unflatten(m: &Matrix, n: usize, big_n: usize) -> SeriesMatrix {
    let f = *m.field();
    let coeffs: Vec<Matrix> = (0..big_n)
        .map(|j| {
            let mut c = Matrix::zeros(f, n, m.cols());
            for r in 0..n {
                for t in 0..m.cols() {
                    c.set(r, t, m.get(j * n + r, t));
                }
            }
            c
        })
        .collect();
    SeriesMatrix::from_coefficients(f, n, m.cols(), &coeffs, big_n)
}

/// `n x t` series matrix to its `nN x t` coefficient-major matrix.
fn flatten(s: &SeriesMatrix, big_n: usize) -> Matrix {
    let f = *s.field();
    let n = s.rows();
    let mut m = Matrix::zeros(f, n * big_n, s.cols());
    for r in 0..n {
        for t in 0..s.cols() {
            for (j, &v) in s.get(r, t).coeffs().iter().take(big_n).enumerate() {
                m.set(j * n + r, t, v);
            }
        }
    }
    m
}

/// Canonical form of an affine solution set at precision `N`: the reduced
/// row echelon basis of the direction space (one row per generator) and the
/// particular solution reduced modulo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSpace {
    pub basis_rref: Matrix,
    pub particular: Vec<FieldElement>,
}

pub fn canonical_form(s: &SolutionSpace, big_n: usize) -> Option<CanonicalSpace> {
    let SolutionSpace::Affine { particular, basis } = s else {
        return None;
    };
    let f = *particular.field();
    let b = flatten(basis, big_n).transpose();
    let (rref, pivots) = b.rref();
    let rank = pivots.len();
    let width = b.cols();
    let data: Vec<FieldElement> = (0..rank).flat_map(|r| rref.row(r).to_vec()).collect();
    let basis_rref = Matrix::from_vec(f, rank, width, data);
    let mut p = flatten(particular, big_n).col(0);
    for (r, &pc) in pivots.iter().enumerate() {
        let c = p[pc];
        if !c.is_zero() {
            for (x, &y) in p.iter_mut().zip(basis_rref.row(r)) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
    Some(CanonicalSpace { basis_rref, particular: p })
}

/// True iff both are `Bottom` or both describe the same affine set modulo
/// `x^N`, where `N` is the smaller of the two precisions.
pub fn spaces_equal(s1: &SolutionSpace, s2: &SolutionSpace) -> bool {
    match (s1, s2) {
        (SolutionSpace::Bottom, SolutionSpace::Bottom) => true,
        (SolutionSpace::Affine { particular: p1, .. }, SolutionSpace::Affine { particular: p2, .. }) => {
            if p1.rows() != p2.rows() {
                return false;
            }
            let big_n = p1.prec().min(p2.prec());
            canonical_form(s1, big_n) == canonical_form(s2, big_n)
        }
        _ => false,
    }
}

/// The three solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Dense,
    Dac,
    Newton,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Dense, Engine::Dac, Engine::Newton];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Dense => "dense",
            Engine::Dac => "dac",
            Engine::Newton => "newton",
        }
    }

    pub fn solve(self, inst: &ProblemInstance) -> Result<SolutionSpace> {
        match self {
            Engine::Dense => Ok(dense_solve(inst)),
            Engine::Dac => dac_solve(&inst.a, &inst.c, inst.n_prec, &inst.ctx),
            Engine::Newton => newton_solve(&inst.a, &inst.c, inst.n_prec, &inst.ctx),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Engine::Dense),
            "dac" => Ok(Engine::Dac),
            "newton" => Ok(Engine::Newton),
            _ => Err(Error::InvalidInstance(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMode {
    One,
    /// Uniform in `[2, p)`.
    Random,
    Fixed(u64),
}

const RETRY_BUDGET: usize = 1000;

/// Deterministic random instance over the default prime.
pub fn random_instance(seed: u64, n: usize, n_prec: usize, k: usize, q_mode: QMode, require_good_spectrum: bool) -> Result<ProblemInstance> {
    random_instance_in(PrimeField::new(DEFAULT_PRIME)?, seed, n, n_prec, k, q_mode, require_good_spectrum)
}

pub fn random_instance_in(
    field: PrimeField,
    seed: u64,
    n: usize,
    n_prec: usize,
    k: usize,
    q_mode: QMode,
    require_good_spectrum: bool,
) -> Result<ProblemInstance> {
    if n == 0 || n_prec == 0 {
        return Err(Error::InvalidInstance("n and N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = draw_q(&field, &mut rng, q_mode)?;
    let ctx = QContext::new(field, q, k.max(1), n_prec + 1)?;
    for _ in 0..RETRY_BUDGET {
        let a = random_series_matrix(&field, &mut rng, n, n, n_prec);
        if require_good_spectrum {
            let kk = if k == 0 { 1 } else { k };
            let nn = if k == 0 { n_prec + 1 } else { n_prec };
            let a0 = if k == 0 { Matrix::zeros(field, n, n) } else { a.coefficient_matrix(0) };
            if !good_spectrum(&a0, &ctx.with_k(kk), nn).good {
                continue;
            }
        }
        let c = random_series_matrix(&field, &mut rng, n, 1, n_prec);
        return ProblemInstance::new(field, q, k, n_prec, a, c);
    }
    Err(Error::RetryBudgetExhausted { tries: RETRY_BUDGET })
}

/// Random `k = 1` instance whose constant coefficient makes `R_r` singular
/// for a random `1 <= r < N`. For `n >= 2` a second eigenvalue
/// `q^s lambda - gamma_s` also breaks the good-spectrum condition.
pub fn random_resonant_instance(seed: u64, n: usize, n_prec: usize, q_mode: QMode, homogeneous: bool) -> Result<(ProblemInstance, usize)> {
    let field = PrimeField::new(DEFAULT_PRIME)?;
    if n == 0 || n_prec < 2 {
        return Err(Error::InvalidInstance("need n >= 1 and N >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = draw_q(&field, &mut rng, q_mode)?;
    let ctx = QContext::new(field, q, 1, n_prec)?;
    let r = rng.gen_range(1..n_prec);
    // R_r = q^r A_0 - gamma_r Id is singular iff gamma_r / q^r is an eigenvalue
    let lambda = field.div(ctx.gamma(r), ctx.q_pow(r))?;
    for _ in 0..RETRY_BUDGET {
        let p = random_matrix(&field, &mut rng, n, n);
        let Ok(pinv) = p.inverse() else { continue };
        let mut d: Vec<FieldElement> = (0..n).map(|_| random_elem(&field, &mut rng)).collect();
        d[0] = lambda;
        if n >= 2 {
            let s = rng.gen_range(1..n_prec);
            d[1] = field.sub(field.mul(ctx.q_pow(s), lambda), ctx.gamma(s));
        }
        let a0 = p.mul(&Matrix::diagonal(field, &d)).mul(&pinv);
        let mut a = random_series_matrix(&field, &mut rng, n, n, n_prec);
        let rest = a.sub(&SeriesMatrix::constant(&a.coefficient_matrix(0), n_prec))?;
        a = rest.add(&SeriesMatrix::constant(&a0, n_prec))?;
        let c = if homogeneous {
            SeriesMatrix::zeros(field, n, 1, n_prec)
        } else {
            random_series_matrix(&field, &mut rng, n, 1, n_prec)
        };
        return Ok((ProblemInstance::new(field, q, 1, n_prec, a, c)?, r));
    }
    Err(Error::RetryBudgetExhausted { tries: RETRY_BUDGET })
}

fn draw_q(field: &PrimeField, rng: &mut ChaCha8Rng, q_mode: QMode) -> Result<FieldElement> {
    let p = field.modulus();
    match q_mode {
        QMode::One => Ok(field.one()),
        QMode::Random if p > 2 => Ok(field.elem(rng.gen_range(2..p))),
        QMode::Random => Err(Error::InvalidInstance("no q != 1 available in F_2".into())),
        QMode::Fixed(q) => {
            let q = field.elem(q);
            if q.is_zero() {
                Err(Error::InvalidInstance("q must be nonzero".into()))
            } else {
                Ok(q)
            }
        }
    }
}

fn random_elem(field: &PrimeField, rng: &mut ChaCha8Rng) -> FieldElement {
    field.elem(rng.gen_range(0..field.modulus()))
}

fn random_matrix(field: &PrimeField, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| random_elem(field, rng)).collect();
    Matrix::from_vec(*field, rows, cols, data)
}

fn random_series_matrix(field: &PrimeField, rng: &mut ChaCha8Rng, rows: usize, cols: usize, prec: usize) -> SeriesMatrix {
    let entries = (0..rows * cols)
        .map(|_| Series::new(*field, (0..prec).map(|_| random_elem(field, rng)).collect(), prec))
        .collect();
    SeriesMatrix::from_entries(*field, rows, cols, prec, entries)
}
