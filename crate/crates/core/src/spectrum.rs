//! Spectral conditions on the constant coefficient `A_0`, the indicial
//! index set, and diagonalization over the base field.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;
use crate::series::QContext;
use crate::upoly::Poly;

/// The first clause of the good-spectrum condition that fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `Spec A_0` meets `q^i Spec A_0 - gamma_i` (k = 1).
    ShiftedOverlap { index: usize },
    /// `A_0` is singular (k > 1).
    SingularConstant,
    /// `Spec A_0` meets `q^i Spec A_0` (k > 1, q != 1).
    ScaledOverlap { index: usize },
    /// `gamma_i = 0` for some `1 <= i <= N - k` (k > 1, q = 1).
    GammaZero { index: usize },
    /// `A_0` has a repeated eigenvalue (k > 1, q = 1).
    RepeatedEigenvalue,
    /// Some eigenvalue of `A_0` lies outside the base field (k > 1, q = 1).
    EigenvalueNotInField,
}

impl Violation {
    /// Offending index, when the clause is indexed.
    pub fn index(&self) -> Option<usize> {
        match *self {
            Violation::ShiftedOverlap { index }
            | Violation::ScaledOverlap { index }
            | Violation::GammaZero { index } => Some(index),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShiftedOverlap { index } => {
                write!(f, "Spec A₀ ∩ (q^i Spec A₀ − γ_i) = ∅ fails at i = {index}")
            }
            Violation::SingularConstant => write!(f, "A₀ invertible fails"),
            Violation::ScaledOverlap { index } => write!(f, "Spec A₀ ∩ q^i Spec A₀ = ∅ fails at i = {index}"),
            Violation::GammaZero { index } => write!(f, "γ_i ≠ 0 fails at i = {index}"),
            Violation::RepeatedEigenvalue => write!(f, "|Spec A₀| = n fails"),
            Violation::EigenvalueNotInField => write!(f, "Spec A₀ ⊂ K fails"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    pub good: bool,
    pub reason: Option<Violation>,
    /// Sorted indices `i < N` with `det R_i = 0`.
    pub singular_indices: Vec<usize>,
}

/// `R_i`: `q^i A_0 - gamma_i Id` for k = 1, `q^i A_0` for k > 1.
pub fn indicial_matrix(a0: &Matrix, ctx: &QContext, i: usize) -> Matrix {
    let f = ctx.field();
    let mut r = a0.scale(ctx.q_pow(i));
    if ctx.k() == 1 {
        let g = ctx.gamma(i);
        for d in 0..r.rows() {
            r.set(d, d, f.sub(r.get(d, d), g));
        }
    }
    r
}

pub fn singular_indices(a0: &Matrix, ctx: &QContext, n_prec: usize) -> Vec<usize> {
    if ctx.k() > 1 {
        return if a0.det().is_zero() { (0..n_prec).collect() } else { Vec::new() };
    }
    (0..n_prec).filter(|&i| indicial_matrix(a0, ctx, i).det().is_zero()).collect()
}

fn first_violation(a0: &Matrix, ctx: &QContext, n_prec: usize) -> Option<Violation> {
    let chi = a0.char_poly();
    let coprime = |m: &Matrix| chi.gcd(&m.char_poly()).degree() == Some(0);
    if ctx.k() == 1 {
        return (1..n_prec).find(|&i| !coprime(&indicial_matrix(a0, ctx, i))).map(|index| Violation::ShiftedOverlap { index });
    }
    if a0.det().is_zero() {
        return Some(Violation::SingularConstant);
    }
    if !ctx.q_is_one() {
        return (1..n_prec).find(|&i| !coprime(&a0.scale(ctx.q_pow(i)))).map(|index| Violation::ScaledOverlap { index });
    }
    if let Some(index) = (1..=n_prec.saturating_sub(ctx.k())).find(|&i| ctx.gamma(i).is_zero()) {
        return Some(Violation::GammaZero { index });
    }
    if !chi.is_squarefree() {
        return Some(Violation::RepeatedEigenvalue);
    }
    if !chi.splits_squarefree() {
        return Some(Violation::EigenvalueNotInField);
    }
    None
}

/// Evaluates the good-spectrum condition at precision `n_prec` for the
/// singularity order carried by `ctx`.
pub fn good_spectrum(a0: &Matrix, ctx: &QContext, n_prec: usize) -> SpectrumReport {
    let reason = first_violation(a0, ctx, n_prec);
    SpectrumReport { good: reason.is_none(), reason, singular_indices: singular_indices(a0, ctx, n_prec) }
}

/// Distinct roots of a squarefree polynomial that splits into linear
/// factors, sorted. Uses random splitting `gcd((x + a)^((p-1)/2) - 1, g)`.
pub fn roots_split(chi: &Poly, seed: u64) -> Vec<FieldElement> {
    let f = *chi.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots = Vec::new();
    let mut stack = vec![chi.monic()];
    while let Some(g) = stack.pop() {
        match g.degree() {
            None | Some(0) => {}
            Some(1) => roots.push(f.neg(g.coeffs()[0])),
            Some(d) => loop {
                let a = f.elem(rng.gen_range(0..f.modulus()));
                let h = Poly::linear(f, a).pow_mod((f.modulus() - 1) / 2, &g).sub(&Poly::one(f));
                let h = g.gcd(&h);
                let dh = h.degree().unwrap_or(0);
                if dh > 0 && dh < d {
                    stack.push(g.div_rem(&h).0);
                    stack.push(h);
                    break;
                }
            },
        }
    }
    roots.sort();
    roots
}

/// `P` and diagonal `D` with `P^-1 A_0 P = D`, eigenvalues sorted.
pub fn diagonalize(a0: &Matrix) -> Result<(Matrix, Matrix)> {
    diagonalize_seeded(a0, 0x5eed)
}

pub fn diagonalize_seeded(a0: &Matrix, seed: u64) -> Result<(Matrix, Matrix)> {
    let f = *a0.field();
    let n = a0.rows();
    let chi = a0.char_poly();
    if !chi.is_squarefree() {
        return Err(Error::NotDiagonalizable("repeated eigenvalue"));
    }
    if !chi.splits_squarefree() {
        return Err(Error::NotDiagonalizable("eigenvalue outside the base field"));
    }
    let roots = roots_split(&chi, seed);
    debug_assert_eq!(roots.len(), n);
    let mut p = Matrix::zeros(f, n, n);
    for (j, &r) in roots.iter().enumerate() {
        let shifted = a0.sub(&Matrix::identity(f, n).scale(r));
        let k = shifted.kernel();
        debug_assert_eq!(k.cols(), 1);
        for i in 0..n {
            p.set(i, j, k.get(i, 0));
        }
    }
    let d = Matrix::diagonal(f, &roots);
    if p.mul(&d) != a0.mul(&p) {
        return Err(Error::NotDiagonalizable("eigenvector check failed"));
    }
    Ok((p, d))
}
