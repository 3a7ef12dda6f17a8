//! Truncated power series over a prime field and the q-calculus acting on
//! them.
//!
//! The setting is `delta(x) = 1`, `sigma: x -> q x`, so that
//! `delta(x^i) = gamma_i x^(i-1)` with `gamma_i = 1 + q + ... + q^(i-1)`.
//! For `q = 1` this is the ordinary derivative; for `q != 1` it is the
//! q-difference operator `(f(qx) - f(x)) / (x (q - 1))`.

pub mod mul;

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// The pair `(q, k)` together with memoized `q^i` and `gamma_i`.
///
/// Both tables are filled at construction up to `capacity`; indices past the
/// table are computed on the fly in O(log i), so the context is read-only
/// and can be shared freely between threads.
#[derive(Clone, Debug)]
pub struct QContext {
    field: PrimeField,
    q: FieldElement,
    k: usize,
    qpow: Vec<FieldElement>,
    gamma: Vec<FieldElement>,
}

impl QContext {
    pub fn new(field: PrimeField, q: FieldElement, k: usize, capacity: usize) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidInstance("q must be nonzero".into()));
        }
        let cap = capacity + 2;
        let mut qpow = Vec::with_capacity(cap);
        let mut gamma = Vec::with_capacity(cap);
        let mut qp = field.one();
        let mut g = field.zero();
        for _ in 0..cap {
            qpow.push(qp);
            gamma.push(g);
            // gamma_{i+1} = q gamma_i + 1
            g = field.add(field.mul_raw(q, g), field.one());
            qp = field.mul_raw(qp, q);
        }
        Ok(QContext { field, q, k, qpow, gamma })
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn q(&self) -> FieldElement {
        self.q
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q_is_one(&self) -> bool {
        self.q == FieldElement::ONE
    }

    /// The same `q` with a different singularity order.
    pub fn with_k(&self, k: usize) -> QContext {
        QContext { k, ..self.clone() }
    }

    #[inline]
    pub fn q_pow(&self, i: usize) -> FieldElement {
        match self.qpow.get(i) {
            Some(&v) => v,
            None => self.field.pow(self.q, i as u64),
        }
    }

    #[inline]
    pub fn gamma(&self, i: usize) -> FieldElement {
        match self.gamma.get(i) {
            Some(&v) => v,
            None => {
                let f = &self.field;
                if self.q_is_one() {
                    f.elem(i as u64)
                } else {
                    let num = f.sub(f.pow(self.q, i as u64), f.one());
                    let den = f.inv(f.sub(self.q, f.one())).expect("q != 1");
                    f.mul(num, den)
                }
            }
        }
    }
}

/// A power series known modulo `x^prec`.
///
/// Only the first `prec` coefficients are meaningful; `coeffs` never holds
/// more than `prec` entries and carries no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
    prec: usize,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i > 0 && self.coeffs[..i].iter().any(|c| !c.is_zero()) {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        write!(f, " + O(x^{})", self.prec)
    }
}

impl Series {
    pub fn new(field: PrimeField, mut coeffs: Vec<FieldElement>, prec: usize) -> Self {
        coeffs.truncate(prec);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Series { field, coeffs, prec }
    }

    pub fn from_u64s(field: PrimeField, coeffs: &[u64], prec: usize) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.elem(c)).collect(), prec)
    }

    pub fn from_i64s(field: PrimeField, coeffs: &[i64], prec: usize) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect(), prec)
    }

    pub fn zero(field: PrimeField, prec: usize) -> Self {
        Series { field, coeffs: Vec::new(), prec }
    }

    pub fn constant(field: PrimeField, c: FieldElement, prec: usize) -> Self {
        Self::new(field, vec![c], prec)
    }

    pub fn one(field: PrimeField, prec: usize) -> Self {
        Self::constant(field, field.one(), prec)
    }

    /// `c x^deg`
    pub fn monomial(field: PrimeField, c: FieldElement, deg: usize, prec: usize) -> Self {
        let mut v = vec![FieldElement::ZERO; deg + 1];
        v[deg] = c;
        Self::new(field, v, prec)
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn prec(&self) -> usize {
        self.prec
    }

    #[inline]
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; zero past the stored polynomial.
    #[inline]
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Number of stored coefficients (degree + 1 of the representative).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Reduces modulo `x^n`; the precision can only go down.
    pub fn truncate(&self, n: usize) -> Series {
        Series::new(self.field, self.coeffs.clone(), n.min(self.prec))
    }

    /// Treats the stored polynomial as exact and views it modulo `x^n`.
    /// This can raise the precision; callers use it where the value is
    /// known to be a polynomial (e.g. a partial solution of degree < m).
    pub fn lift(&self, n: usize) -> Series {
        Series::new(self.field, self.coeffs.clone(), n)
    }

    pub fn set_coeff(&mut self, i: usize, c: FieldElement) {
        if i >= self.prec {
            return;
        }
        if i >= self.coeffs.len() {
            if c.is_zero() {
                return;
            }
            self.coeffs.resize(i + 1, FieldElement::ZERO);
        }
        self.coeffs[i] = c;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn zip_with(&self, other: &Series, op: impl Fn(FieldElement, FieldElement) -> FieldElement) -> Series {
        let prec = self.prec.min(other.prec);
        let len = self.coeffs.len().max(other.coeffs.len()).min(prec);
        let v = (0..len).map(|i| op(self.coeff(i), other.coeff(i))).collect();
        Series::new(self.field, v, prec)
    }

    pub fn add(&self, other: &Series) -> Series {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Series) -> Series {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> Series {
        let f = self.field;
        Series::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect(), self.prec)
    }

    pub fn scale(&self, c: FieldElement) -> Series {
        let f = self.field;
        if c.is_zero() {
            return Series::zero(f, self.prec);
        }
        crate::opcount::add(self.coeffs.len() as u64);
        Series::new(f, self.coeffs.iter().map(|&a| f.mul_raw(a, c)).collect(), self.prec)
    }

    /// Product modulo `x^n`, with `n` as the result precision.
    pub fn mul_trunc(&self, other: &Series, n: usize) -> Series {
        Series::new(self.field, mul::mul_trunc(&self.field, &self.coeffs, &other.coeffs, n), n)
    }

    /// Product at the smaller of the two precisions.
    pub fn mul(&self, other: &Series) -> Series {
        self.mul_trunc(other, self.prec.min(other.prec))
    }

    /// `delta(f)`; the precision drops by one.
    pub fn delta(&self, ctx: &QContext) -> Series {
        let f = self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul_raw(ctx.gamma(i), c))
            .collect();
        crate::opcount::add(self.coeffs.len().saturating_sub(1) as u64);
        Series::new(f, v, self.prec.saturating_sub(1))
    }

    /// `sigma(f) = f(q x)`.
    pub fn sigma(&self, ctx: &QContext) -> Series {
        if ctx.q_is_one() {
            return self.clone();
        }
        let f = self.field;
        crate::opcount::add(self.coeffs.len() as u64);
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul_raw(ctx.q_pow(i), c))
            .collect();
        Series::new(f, v, self.prec)
    }

    /// The unique `g` with `g_0 = 0` and `delta(g) = f`; precision rises by
    /// one. Requires `gamma_1 .. gamma_prec` to be nonzero.
    pub fn q_integrate(&self, ctx: &QContext) -> Result<Series> {
        let f = self.field;
        if let Some(index) = (1..=self.prec).find(|&i| ctx.gamma(i).is_zero()) {
            return Err(Error::GammaVanishes { index });
        }
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(FieldElement::ZERO);
        for (i, &c) in self.coeffs.iter().enumerate() {
            v.push(f.mul(c, f.inv(ctx.gamma(i + 1))?));
        }
        Ok(Series::new(f, v, self.prec + 1))
    }

    /// Multiplicative inverse modulo `x^n` by Newton iteration.
    pub fn inv(&self, n: usize) -> Result<Series> {
        let f = self.field;
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::SeriesNotInvertible);
        }
        let mut g = Series::constant(f, f.inv(c0)?, 1);
        let mut t = 1;
        while t < n {
            t = (2 * t).min(n);
            // g <- g (2 - self g)
            let e = self.mul_trunc(&g, t);
            let two_minus = Series::constant(f, f.elem(2), t).sub(&e.lift(t));
            g = g.mul_trunc(&two_minus, t);
        }
        Ok(g.lift(n))
    }

    /// Multiplication by `x^m`.
    pub fn shift_up(&self, m: usize) -> Series {
        let mut v = vec![FieldElement::ZERO; m];
        v.extend_from_slice(&self.coeffs);
        Series::new(self.field, v, self.prec + m)
    }

    /// Division by `x^m`. With `strict`, fails if a coefficient below
    /// `x^m` is nonzero; otherwise those coefficients are dropped.
    pub fn shift_down(&self, m: usize, strict: bool) -> Result<Series> {
        if strict {
            if let Some(d) = self.coeffs.iter().take(m).position(|c| !c.is_zero()) {
                return Err(Error::NonzeroLowCoefficients { shift: m, degree: d });
            }
        }
        let v = self.coeffs.iter().skip(m).copied().collect();
        Ok(Series::new(self.field, v, self.prec.saturating_sub(m)))
    }

    /// Coefficients `lo..hi` as a series of precision `hi - lo`.
    pub fn window(&self, lo: usize, hi: usize) -> Series {
        let hi = hi.min(self.prec);
        let v = self.coeffs.iter().skip(lo).take(hi.saturating_sub(lo)).copied().collect();
        Series::new(self.field, v, hi.saturating_sub(lo))
    }
}
