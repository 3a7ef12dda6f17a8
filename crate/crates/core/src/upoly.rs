//! Dense univariate polynomials over a prime field: the small toolkit the
//! spectrum tests need (gcd, squarefreeness, modular powering, roots).

use std::fmt;

use crate::field::{FieldElement, PrimeField};
use crate::series::mul::mul_full;

/// Coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(field: PrimeField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_i64s(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: PrimeField) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::new(field, vec![field.one()])
    }

    /// `x + a`
    pub fn linear(field: PrimeField, a: FieldElement) -> Self {
        Self::new(field, vec![a, field.one()])
    }

    pub fn x(field: PrimeField) -> Self {
        Self::linear(field, field.zero())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, &c| f.mul_add(c, acc, x))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.get(i), other.get(i))).collect();
        Poly::new(self.field, v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.get(i), other.get(i))).collect();
        Poly::new(self.field, v)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        Poly::new(self.field, mul_full(&self.field, &self.coeffs, &other.coeffs))
    }

    fn get(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.elem(i as u64), c))
            .collect();
        Poly::new(self.field, v)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let f = &self.field;
        let inv = f.inv(self.leading()).expect("nonzero leading coefficient");
        Poly::new(self.field, self.coeffs.iter().map(|&c| f.mul(c, inv)).collect())
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let f = &self.field;
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(self.field), self.clone());
        }
        let mut q = vec![FieldElement::ZERO; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            q[i - dd] = c;
            for j in 0..=dd {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, d.coeffs[j]));
            }
        }
        r.truncate(dd);
        (Poly::new(self.field, q), Poly::new(self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// True when the polynomial is a product of linear factors over the
    /// base field, i.e. it divides `x^p - x` (for squarefree input).
    pub fn splits_squarefree(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return true;
        }
        let xp = Poly::x(self.field).pow_mod(self.field.modulus(), self);
        self.is_squarefree() && xp.sub(&Poly::x(self.field)).rem(self).is_zero()
    }
}
