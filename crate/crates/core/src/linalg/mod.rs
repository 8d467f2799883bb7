//! Dense complex linear algebra over small labeled tensor-product spaces.
//!
//! # Basis convention
//!
//! Composite indices are lexicographic with the **left factor most
//! significant**: for factor dimensions `[d0, d1, .., dk]` the digit tuple
//! `(i0, i1, .., ik)` sits at `((i0 * d1 + i1) * d2 + i2) ...`. `kron(a, b)`
//! therefore places `a` in the leading slots. Every module in the crate uses
//! this single convention.

mod circuit;
mod measure;
mod operator;
mod state;

pub use circuit::{Gate, LocalCircuit};
pub(crate) use measure::sample_index;
pub use measure::{
    measure_projective, measure_slot, BornSampler, MeasurementOutcome, ProjectiveMeasurement, SlotOutcome,
};
pub use operator::{Operator, OperatorKind};
pub use state::StateVector;

pub use num_complex::Complex64;

/// Tolerance for structural checks (unitarity, projector families, normalization).
pub const STRUCT_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities evaluated in double precision.
pub const ALGEBRA_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Tensor product under the crate's basis convention.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

pub fn kron<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

/// Kronecker product of a non-empty sequence, left to right.
pub fn kron_all<'a, T: Kron + Clone + 'a>(items: impl IntoIterator<Item = &'a T>) -> Option<T> {
    let mut iter = items.into_iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, x| acc.kron(x)))
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Digit tuple of a composite index.
pub fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Composite index of a digit tuple.
pub fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

pub(crate) fn check_slots(slots: &[usize], factors: usize) -> crate::Result<()> {
    for (k, &s) in slots.iter().enumerate() {
        if s >= factors {
            return Err(crate::Error::SlotOutOfRange { slot: s, factors });
        }
        if slots[..k].contains(&s) {
            return Err(crate::Error::SlotCollision(s));
        }
    }
    Ok(())
}
