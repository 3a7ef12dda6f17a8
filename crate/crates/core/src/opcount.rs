//! Per-thread counter of field multiplications.
//!
//! Every multiplication performed through [`crate::field::PrimeField::mul`]
//! and every multiplication done inside the bulk kernels (convolution, NTT,
//! elimination) is added here. The benchmark harness resets the counter
//! before a solve and reads it afterwards, which gives a deterministic cost
//! measure that does not depend on the machine.

use std::cell::Cell;

thread_local! {
    static MULS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn add(n: u64) {
    MULS.with(|c| c.set(c.get().wrapping_add(n)));
}

pub fn reset() {
    MULS.with(|c| c.set(0));
}

pub fn get() -> u64 {
    MULS.with(|c| c.get())
}

/// Runs `f` and returns its output with the number of multiplications it
/// performed on this thread.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = get();
    let out = f();
    (out, get().wrapping_sub(before))
}
