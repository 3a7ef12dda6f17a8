//! Polynomial multiplication kernels over a prime field.
//!
//! Schoolbook for short operands, Karatsuba in the middle range, and a
//! three-prime NTT with CRT reconstruction for long operands. All three sit
//! behind [`mul_full`] / [`mul_trunc`]; callers never pick an algorithm.

use crate::field::{FieldElement, PrimeField};
use crate::opcount;

const SCHOOLBOOK_MAX: usize = 32;
const NTT_MIN: usize = 160;

/// Full product, length `a.len() + b.len() - 1` (empty if either is empty).
pub fn mul_full(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let short = a.len().min(b.len());
    if short <= SCHOOLBOOK_MAX {
        schoolbook(f, a, b, a.len() + b.len() - 1)
    } else if short >= NTT_MIN {
        ntt_mul(f, a, b)
    } else {
        karatsuba(f, a, b)
    }
}

/// Product truncated to its first `n` coefficients.
pub fn mul_trunc(f: &PrimeField, a: &[FieldElement], b: &[FieldElement], n: usize) -> Vec<FieldElement> {
    let a = &a[..a.len().min(n)];
    let b = &b[..b.len().min(n)];
    if a.is_empty() || b.is_empty() || n == 0 {
        return Vec::new();
    }
    if a.len().min(b.len()) <= SCHOOLBOOK_MAX {
        return schoolbook(f, a, b, n.min(a.len() + b.len() - 1));
    }
    let mut out = mul_full(f, a, b);
    out.truncate(n);
    out
}

/// Coefficients `lo..hi` of the product (a "middle product" window).
pub fn mul_window(
    f: &PrimeField,
    a: &[FieldElement],
    b: &[FieldElement],
    lo: usize,
    hi: usize,
) -> Vec<FieldElement> {
    if hi <= lo {
        return Vec::new();
    }
    let a = &a[..a.len().min(hi)];
    let b = &b[..b.len().min(hi)];
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let full_len = a.len() + b.len() - 1;
    if full_len <= lo {
        return Vec::new();
    }
    if a.len().min(b.len()) <= SCHOOLBOOK_MAX {
        return schoolbook_window(f, a, b, lo, hi.min(full_len));
    }
    let prod = mul_trunc(f, a, b, hi);
    if prod.len() <= lo {
        Vec::new()
    } else {
        prod[lo..].to_vec()
    }
}

fn schoolbook(f: &PrimeField, a: &[FieldElement], b: &[FieldElement], n: usize) -> Vec<FieldElement> {
    schoolbook_window(f, a, b, 0, n)
}

fn schoolbook_window(
    f: &PrimeField,
    a: &[FieldElement],
    b: &[FieldElement],
    lo: usize,
    hi: usize,
) -> Vec<FieldElement> {
    let p = f.modulus() as u128;
    let mut out = Vec::with_capacity(hi.saturating_sub(lo));
    let mut count = 0u64;
    for i in lo..hi {
        let j_lo = i.saturating_sub(b.len() - 1);
        let j_hi = i.min(a.len() - 1);
        let mut acc: u128 = 0;
        if j_lo <= j_hi {
            for j in j_lo..=j_hi {
                acc += a[j].0 as u128 * b[i - j].0 as u128;
            }
            count += (j_hi - j_lo + 1) as u64;
        }
        out.push(FieldElement((acc % p) as u64));
    }
    opcount::add(count);
    out
}

fn add_into(f: &PrimeField, dst: &mut [FieldElement], src: &[FieldElement]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = f.add(*d, *s);
    }
}

fn sub_into(f: &PrimeField, dst: &mut [FieldElement], src: &[FieldElement]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = f.sub(*d, *s);
    }
}

fn karatsuba(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let (la, lb) = (a.len(), b.len());
    if la.min(lb) <= SCHOOLBOOK_MAX {
        return schoolbook(f, a, b, la + lb - 1);
    }
    let (long, short) = if la >= lb { (a, b) } else { (b, a) };
    if 2 * short.len() <= long.len() {
        // unbalanced: cut the long operand into short-sized chunks
        let mut out = vec![FieldElement::ZERO; la + lb - 1];
        for (c, chunk) in long.chunks(short.len()).enumerate() {
            let part = karatsuba(f, chunk, short);
            let off = c * short.len();
            add_into(f, &mut out[off..off + part.len()], &part);
        }
        return out;
    }
    let h = long.len().div_ceil(2);
    let (a0, a1) = long.split_at(h);
    let (b0, b1) = short.split_at(h.min(short.len()));
    let z0 = karatsuba(f, a0, b0);
    let z2 = if b1.is_empty() { Vec::new() } else { karatsuba(f, a1, b1) };
    let mut sa = a0.to_vec();
    add_into(f, &mut sa, a1);
    let mut sb = b0.to_vec();
    add_into(f, &mut sb, b1);
    let mut z1 = karatsuba(f, &sa, &sb);
    sub_into(f, &mut z1, &z0);
    sub_into(f, &mut z1, &z2);

    let mut out = vec![FieldElement::ZERO; la + lb - 1];
    add_into(f, &mut out[..z0.len()], &z0);
    let end = (h + z1.len()).min(out.len());
    add_into(f, &mut out[h..end], &z1[..end - h]);
    if !z2.is_empty() {
        add_into(f, &mut out[2 * h..2 * h + z2.len()], &z2);
    }
    out
}

// --- number-theoretic transform -------------------------------------------

const P1: u64 = 998_244_353; // 119 * 2^23 + 1
const P2: u64 = 167_772_161; // 5 * 2^25 + 1
const P3: u64 = 469_762_049; // 7 * 2^26 + 1
const G: u64 = 3; // primitive root for all three

const fn pow_const<const P: u64>(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    a %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % P;
        }
        a = a * a % P;
        e >>= 1;
    }
    r
}

fn ntt<const P: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_const::<P>(G, (P - 1) / len as u64);
        if invert {
            w = pow_const::<P>(w, P - 2);
        }
        let half = len / 2;
        let mut roots = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            roots.push(cur);
            cur = cur * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &r) in lo.iter_mut().zip(hi.iter_mut()).zip(&roots) {
                let x = *u;
                let y = *v * r % P;
                *u = if x + y >= P { x + y - P } else { x + y };
                *v = if x >= y { x - y } else { x + P - y };
            }
        }
        len <<= 1;
    }
    if invert {
        let ninv = pow_const::<P>(n as u64, P - 2);
        for x in a.iter_mut() {
            *x = *x * ninv % P;
        }
    }
}

fn convolve_mod<const P: u64>(a: &[FieldElement], b: &[FieldElement], size: usize) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (d, s) in fa.iter_mut().zip(a) {
        *d = s.0 % P;
    }
    for (d, s) in fb.iter_mut().zip(b) {
        *d = s.0 % P;
    }
    ntt::<P>(&mut fa, false);
    ntt::<P>(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % P;
    }
    ntt::<P>(&mut fa, true);
    fa
}

fn ntt_mul(f: &PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let logn = size.trailing_zeros() as u64;
    // three transforms of size/2 * log butterflies, pointwise and scaling,
    // per prime; then about six multiplications per output for the CRT
    opcount::add(3 * (3 * (size as u64 / 2) * logn + 2 * size as u64) + 6 * out_len as u64);

    let r1 = convolve_mod::<P1>(a, b, size);
    let r2 = convolve_mod::<P2>(a, b, size);
    let r3 = convolve_mod::<P3>(a, b, size);

    let p = f.modulus() as u128;
    let inv_p1_mod_p2 = pow_const::<P2>(P1, P2 - 2);
    let p1p2_mod_p3 = (P1 as u128 * P2 as u128 % P3 as u128) as u64;
    let inv_p1p2_mod_p3 = pow_const::<P3>(p1p2_mod_p3, P3 - 2);
    let p1p2 = P1 as u128 * P2 as u128;

    (0..out_len)
        .map(|i| {
            // Garner: x = x1 + P1*t2 + P1*P2*t3
            let x1 = r1[i];
            let t2 = ((r2[i] + P2 - x1 % P2) % P2) * inv_p1_mod_p2 % P2;
            let x12 = x1 as u128 + P1 as u128 * t2 as u128; // < P1*P2
            let x12_mod_p3 = (x12 % P3 as u128) as u64;
            let t3 = ((r3[i] + P3 - x12_mod_p3) % P3) * inv_p1p2_mod_p3 % P3;
            let v = (x12 % p + (p1p2 % p) * (t3 as u128 % p)) % p;
            FieldElement(v as u64)
        })
        .collect()
}
