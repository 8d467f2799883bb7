use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_slots, digits_of, index_of, strides, Kron, STRUCT_TOL, ZERO};
use crate::{Error, Result};

/// Complex amplitude vector over a tensor-product basis.
///
/// Normalization is not enforced: CSL evolution is norm-decreasing on
/// individual trajectories and the protocol code builds unnormalized
/// branches on purpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    factor_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis_labels: Option<Vec<Vec<String>>>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, factor_dims: Vec<usize>) -> Result<Self> {
        let product: usize = factor_dims.iter().product();
        if factor_dims.is_empty() || factor_dims.contains(&0) || product != amplitudes.len() {
            return Err(Error::FactorDims { dims: factor_dims, len: amplitudes.len() });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes, factor_dims, basis_labels: None })
    }

    /// Single-factor state.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        Self::new(amplitudes, vec![n])
    }

    pub fn zeros(factor_dims: &[usize]) -> Self {
        let n = factor_dims.iter().product();
        Self { amplitudes: vec![ZERO; n], factor_dims: factor_dims.to_vec(), basis_labels: None }
    }

    /// Product basis state with the given digit in each factor.
    pub fn basis(factor_dims: &[usize], digits: &[usize]) -> Result<Self> {
        if digits.len() != factor_dims.len() {
            return Err(Error::DimensionMismatch { expected: factor_dims.len(), found: digits.len() });
        }
        if let Some(k) = digits.iter().zip(factor_dims).position(|(d, n)| d >= n) {
            return Err(Error::SlotOutOfRange { slot: digits[k], factors: factor_dims[k] });
        }
        let mut s = Self::zeros(factor_dims);
        s.amplitudes[index_of(digits, factor_dims)] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Attach per-factor basis labels (one label per index of each factor).
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.factor_dims.len() || labels.iter().zip(&self.factor_dims).any(|(l, &d)| l.len() != d) {
            return Err(Error::InvalidParameter("basis labels do not match factor dimensions".into()));
        }
        self.basis_labels = Some(labels);
        Ok(self)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amplitudes[index_of(digits, &self.factor_dims)]
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn basis_labels(&self) -> Option<&[Vec<String>]> {
        self.basis_labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= STRUCT_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a *= factor);
        out
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched states");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest amplitude-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Unit phase `p` minimizing `|self - p * other|`, if the overlap is nonzero.
    pub fn relative_phase(&self, other: &Self) -> Option<Complex64> {
        let ov = other.inner(self);
        (ov.norm() > 0.0).then(|| ov / ov.norm())
    }

    /// Amplitude-wise deviation after removing one global phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &Self) -> f64 {
        match self.relative_phase(other) {
            Some(p) => self.max_abs_diff(&other.scaled(p)),
            None => self
                .max_abs_diff(&Self::zeros(&self.factor_dims))
                .max(other.max_abs_diff(&Self::zeros(&other.factor_dims))),
        }
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.max_abs_diff_up_to_phase(other) <= tol
    }

    /// Copy with the global phase fixed so the first amplitude of modulus
    /// above `tol` is real and positive.
    pub fn canonical_phase(&self, tol: f64) -> Self {
        match self.amplitudes.iter().find(|a| a.norm() > tol) {
            Some(a) => self.scaled(a.conj() / a.norm()),
            None => self.clone(),
        }
    }

    /// Probability of each basis value of factor `slot`, relative to the
    /// state's own norm.
    pub fn slot_marginal(&self, slot: usize) -> Result<Vec<f64>> {
        check_slots(&[slot], self.factor_dims.len())?;
        let d = self.factor_dims[slot];
        let stride = strides(&self.factor_dims)[slot];
        let mut out = vec![0.0; d];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[(i / stride) % d] += a.norm_sqr();
        }
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroNorm);
        }
        out.iter_mut().for_each(|p| *p /= total);
        Ok(out)
    }

    /// Joint distribution of the listed factors, indexed by the composite
    /// index of their digits (in the order given).
    pub fn joint_marginal(&self, slots: &[usize]) -> Result<Vec<f64>> {
        check_slots(slots, self.factor_dims.len())?;
        let sub_dims: Vec<usize> = slots.iter().map(|&s| self.factor_dims[s]).collect();
        let mut out = vec![0.0; sub_dims.iter().product()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = digits_of(i, &self.factor_dims);
            let sub: Vec<usize> = slots.iter().map(|&s| d[s]).collect();
            out[index_of(&sub, &sub_dims)] += a.norm_sqr();
        }
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroNorm);
        }
        out.iter_mut().for_each(|p| *p /= total);
        Ok(out)
    }

    /// Unnormalized projection onto `value` of factor `slot`.
    pub fn project_slot(&self, slot: usize, value: usize) -> Result<Self> {
        self.project_slots(&[slot], &[value])
    }

    /// Unnormalized projection onto fixed values of several factors.
    pub fn project_slots(&self, slots: &[usize], values: &[usize]) -> Result<Self> {
        check_slots(slots, self.factor_dims.len())?;
        if slots.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: slots.len(), found: values.len() });
        }
        for (&s, &v) in slots.iter().zip(values) {
            if v >= self.factor_dims[s] {
                return Err(Error::SlotOutOfRange { slot: v, factors: self.factor_dims[s] });
            }
        }
        let st = strides(&self.factor_dims);
        let mut out = self.clone();
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            let keep = slots.iter().zip(values).all(|(&s, &v)| (i / st[s]) % self.factor_dims[s] == v);
            if !keep {
                *a = ZERO;
            }
        }
        Ok(out)
    }

    /// Split a state of the form `|digits>_{slots} ⊗ |rest>` into its basis
    /// digits and the remaining factor (factors kept in their original order).
    ///
    /// Fails when more than `tol` of the norm lies outside a single basis
    /// configuration of `slots`.
    pub fn split_basis_factor(&self, slots: &[usize], tol: f64) -> Result<(Vec<usize>, Self)> {
        let marg = self.joint_marginal(slots)?;
        let sub_dims: Vec<usize> = slots.iter().map(|&s| self.factor_dims[s]).collect();
        let (best, p) =
            marg.iter().copied().enumerate().fold((0, f64::MIN), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
        if p < 1.0 - tol {
            return Err(Error::NotProductState(format!("largest basis weight {p}")));
        }
        let digits = digits_of(best, &sub_dims);
        let rest_slots: Vec<usize> = (0..self.factor_dims.len()).filter(|s| !slots.contains(s)).collect();
        let rest_dims: Vec<usize> = rest_slots.iter().map(|&s| self.factor_dims[s]).collect();
        let mut rest = Self::zeros(&rest_dims);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = digits_of(i, &self.factor_dims);
            if slots.iter().zip(&digits).all(|(&s, &v)| d[s] == v) {
                let rd: Vec<usize> = rest_slots.iter().map(|&s| d[s]).collect();
                rest.amplitudes[index_of(&rd, &rest_dims)] = *a;
            }
        }
        Ok((digits, rest))
    }

    /// Amplitudes of the remaining factors with `slots` pinned to `values`
    /// (unnormalized). For a state `|v>_{slots} ⊗ |rest>` this returns `|rest>`.
    pub fn slice(&self, slots: &[usize], values: &[usize]) -> Result<Self> {
        check_slots(slots, self.factor_dims.len())?;
        if slots.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: slots.len(), found: values.len() });
        }
        let st = strides(&self.factor_dims);
        let mut base = 0;
        for (&s, &v) in slots.iter().zip(values) {
            if v >= self.factor_dims[s] {
                return Err(Error::SlotOutOfRange { slot: v, factors: self.factor_dims[s] });
            }
            base += v * st[s];
        }
        let rest_slots: Vec<usize> = (0..self.factor_dims.len()).filter(|s| !slots.contains(s)).collect();
        if rest_slots.is_empty() {
            return Err(Error::InvalidParameter("slice must leave at least one factor".into()));
        }
        let rest_dims: Vec<usize> = rest_slots.iter().map(|&s| self.factor_dims[s]).collect();
        let n: usize = rest_dims.iter().product();
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            let mut rem = r;
            let mut off = base;
            for (k, &s) in rest_slots.iter().enumerate().rev() {
                off += (rem % rest_dims[k]) * st[s];
                rem /= rest_dims[k];
            }
            out.push(self.amplitudes[off]);
        }
        Ok(Self::from_parts(out, rest_dims))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.factor_dims != other.factor_dims {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let mut out = self.clone();
        out.amplitudes.iter_mut().zip(&other.amplitudes).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub(crate) fn from_parts(amplitudes: Vec<Complex64>, factor_dims: Vec<usize>) -> Self {
        debug_assert_eq!(amplitudes.len(), factor_dims.iter().product::<usize>());
        Self { amplitudes, factor_dims, basis_labels: None }
    }
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amps.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        let basis_labels = match (&self.basis_labels, &other.basis_labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Self { amplitudes: amps, factor_dims: dims, basis_labels }
    }
}

impl Add for StateVector {
    type Output = StateVector;
    fn add(self, rhs: StateVector) -> StateVector {
        self.try_add(&rhs).expect("adding states of different shape")
    }
}

impl Sub for StateVector {
    type Output = StateVector;
    fn sub(self, rhs: StateVector) -> StateVector {
        self.try_add(&(-rhs)).expect("subtracting states of different shape")
    }
}

impl Neg for StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self.scaled(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<StateVector> for Complex64 {
    type Output = StateVector;
    fn mul(self, rhs: StateVector) -> StateVector {
        rhs.scaled(self)
    }
}

impl Mul<StateVector> for f64 {
    type Output = StateVector;
    fn mul(self, rhs: StateVector) -> StateVector {
        rhs.scaled(Complex64::new(self, 0.0))
    }
}
