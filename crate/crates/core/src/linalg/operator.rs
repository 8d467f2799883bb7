use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_slots, digits_of, strides, Kron, StateVector, ONE, ZERO};
use crate::exec::for_each_row_mut;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    General,
    Unitary,
    Hermitian,
    Projector,
}

/// Dense complex square matrix, row-major, over a tensor-product basis.
///
/// The `kind` flag is a checked claim: [`Operator::with_kind`] validates it at
/// [`STRUCT_TOL`](super::STRUCT_TOL). Products, embeddings and tensor
/// products propagate the flag algebraically without re-checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    entries: Vec<Complex64>,
    dim: usize,
    factor_dims: Vec<usize>,
    kind: OperatorKind,
}

impl Operator {
    pub fn from_entries(factor_dims: Vec<usize>, entries: Vec<Complex64>) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if factor_dims.is_empty() || dim == 0 || entries.len() != dim * dim {
            return Err(Error::FactorDims { dims: factor_dims, len: entries.len() });
        }
        Ok(Self { entries, dim, factor_dims, kind: OperatorKind::General })
    }

    /// Single-factor operator from rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("operator rows must form a square matrix".into()));
        }
        Self::from_entries(vec![n], rows.concat())
    }

    /// Single-factor operator from real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(factor_dims: &[usize], f: impl Fn(usize, usize) -> Complex64) -> Self {
        let dim: usize = factor_dims.iter().product();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { entries, dim, factor_dims: factor_dims.to_vec(), kind: OperatorKind::General }
    }

    pub fn identity(factor_dims: &[usize]) -> Self {
        let mut op = Self::from_fn(factor_dims, |i, j| if i == j { ONE } else { ZERO });
        op.kind = OperatorKind::Projector;
        op
    }

    pub fn zeros(factor_dims: &[usize]) -> Self {
        Self::from_fn(factor_dims, |_, _| ZERO)
    }

    pub fn diagonal(factor_dims: &[usize], diag: &[Complex64]) -> Result<Self> {
        let dim: usize = factor_dims.iter().product();
        if diag.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: diag.len() });
        }
        Ok(Self::from_fn(factor_dims, |i, j| if i == j { diag[i] } else { ZERO }))
    }

    pub fn real_diagonal(factor_dims: &[usize], diag: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut op = Self::diagonal(factor_dims, &d)?;
        op.kind = OperatorKind::Hermitian;
        Ok(op)
    }

    /// `|ket><bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        let (k, b) = (ket.amplitudes(), bra.amplitudes());
        Self::from_fn(ket.factor_dims(), |i, j| k[i] * b[j].conj())
    }

    /// Orthogonal projector onto the ray of `state` (normalized internally).
    pub fn projector_onto(state: &StateVector) -> Result<Self> {
        let s = state.normalized()?;
        let mut p = Self::outer(&s, &s);
        p.kind = OperatorKind::Projector;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// Flag the operator, validating the claim at `STRUCT_TOL`.
    pub fn with_kind(mut self, kind: OperatorKind) -> Result<Self> {
        let tol = super::STRUCT_TOL;
        match kind {
            OperatorKind::General => {}
            OperatorKind::Unitary => {
                let d = self.unitarity_defect();
                if d > tol {
                    return Err(Error::KindViolation { kind: "unitary", deviation: d });
                }
            }
            OperatorKind::Hermitian => {
                let d = self.hermiticity_defect();
                if d > tol {
                    return Err(Error::KindViolation { kind: "hermitian", deviation: d });
                }
            }
            OperatorKind::Projector => {
                let d = self.hermiticity_defect().max(self.idempotency_defect());
                if d > tol {
                    return Err(Error::KindViolation { kind: "a projector", deviation: d });
                }
            }
        }
        self.kind = kind;
        Ok(self)
    }

    /// Same matrix re-tagged with different factor dimensions of equal product.
    pub fn reshaped(mut self, factor_dims: &[usize]) -> Result<Self> {
        if factor_dims.iter().product::<usize>() != self.dim {
            return Err(Error::FactorDims { dims: factor_dims.to_vec(), len: self.dim });
        }
        self.factor_dims = factor_dims.to_vec();
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self { entries, dim: n, factor_dims: self.factor_dims.clone(), kind: self.kind }
    }

    /// Matrix product `self · other`. Zero entries of `self` are skipped, so
    /// products of the sparse slot-embedded protocol factors stay cheap even
    /// at dimension 2916.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for_each_row_mut(&mut entries, n, |i, out| {
            for (k, a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        });
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            _ => OperatorKind::General,
        };
        Ok(Self { entries, dim: n, factor_dims: self.factor_dims.clone(), kind })
    }

    /// Matrix-vector product. Normalization is not enforced.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: state.dim() });
        }
        let v = state.amplitudes();
        let out: Vec<Complex64> = (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| a.re != 0.0 || a.im != 0.0).map(|(a, b)| a * b).sum())
            .collect();
        Ok(StateVector::from_parts(out, state.factor_dims().to_vec()))
    }

    /// Apply this (small) operator to the listed tensor slots of `state`,
    /// acting as the identity elsewhere. Costs `O(dim(state) · dim(self))`.
    pub fn apply_on(&self, slots: &[usize], state: &StateVector) -> Result<StateVector> {
        let dims = state.factor_dims();
        check_slots(slots, dims.len())?;
        let local_dims: Vec<usize> = slots.iter().map(|&s| dims[s]).collect();
        let local: usize = local_dims.iter().product();
        if local != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: local });
        }
        let st = strides(dims);
        let offsets: Vec<usize> =
            (0..local).map(|c| digits_of(c, &local_dims).iter().zip(slots).map(|(d, &s)| d * st[s]).sum()).collect();
        let v = state.amplitudes();
        let mut out = vec![ZERO; v.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let mut row = 0;
            let mut base = idx;
            for (&s, &ld) in slots.iter().zip(&local_dims) {
                let d = (idx / st[s]) % dims[s];
                row = row * ld + d;
                base -= d * st[s];
            }
            let r = self.row(row);
            let mut acc = ZERO;
            for (a, off) in r.iter().zip(&offsets) {
                if a.re != 0.0 || a.im != 0.0 {
                    acc += a * v[base + off];
                }
            }
            *o = acc;
        }
        Ok(StateVector::from_parts(out, dims.to_vec()))
    }

    /// Lift this operator onto `slots` of a space with factor dimensions
    /// `full_dims`, identity on the remaining factors.
    pub fn embed(&self, slots: &[usize], full_dims: &[usize]) -> Result<Self> {
        check_slots(slots, full_dims.len())?;
        let local_dims: Vec<usize> = slots.iter().map(|&s| full_dims[s]).collect();
        let local: usize = local_dims.iter().product();
        if local != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: local });
        }
        let n: usize = full_dims.iter().product();
        let st = strides(full_dims);
        let offsets: Vec<usize> =
            (0..local).map(|c| digits_of(c, &local_dims).iter().zip(slots).map(|(d, &s)| d * st[s]).sum()).collect();
        let mut entries = vec![ZERO; n * n];
        for_each_row_mut(&mut entries, n, |idx, out| {
            let mut row = 0;
            let mut base = idx;
            for (&s, &ld) in slots.iter().zip(&local_dims) {
                let d = (idx / st[s]) % full_dims[s];
                row = row * ld + d;
                base -= d * st[s];
            }
            for (a, off) in self.row(row).iter().zip(&offsets) {
                out[base + off] = *a;
            }
        });
        Ok(Self { entries, dim: n, factor_dims: full_dims.to_vec(), kind: self.kind })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|a| *a *= factor);
        out.kind = OperatorKind::General;
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        out.entries.iter_mut().zip(&other.entries).for_each(|(a, b)| *a += b);
        out.kind = match (self.kind, other.kind) {
            (OperatorKind::Hermitian | OperatorKind::Projector, OperatorKind::Hermitian | OperatorKind::Projector) => {
                OperatorKind::Hermitian
            }
            _ => OperatorKind::General,
        };
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.try_add(&ba.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// `‖U†U − 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        // (U†U)_{ij} = Σ_k conj(U_ki) U_kj, accumulated over the nonzeros of
        // each row k so sparse protocol operators cost Σ_k nnz_k².
        let n = self.dim;
        let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
        for k in 0..n {
            let nz: Vec<(usize, Complex64)> = self
                .row(k)
                .iter()
                .enumerate()
                .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
                .map(|(i, a)| (i, *a))
                .collect();
            for &(i, a) in &nz {
                for &(j, b) in &nz {
                    *gram.entry((i, j)).or_insert(ZERO) += a.conj() * b;
                }
            }
        }
        let off = gram.iter().map(|(&(i, j), g)| if i == j { (g - ONE).norm() } else { g.norm() });
        let missing_diagonal = (0..n).any(|i| !gram.contains_key(&(i, i)));
        off.fold(if missing_diagonal { 1.0 } else { 0.0 }, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn idempotency_defect(&self) -> f64 {
        self.matmul(self).expect("square").max_abs_diff(self)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol && self.idempotency_defect() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.entry(i, j).norm() <= tol))
    }

    /// `<a|self|b>`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<Complex64> {
        Ok(a.inner(&self.apply(b)?))
    }

    /// `<s|self|s> / <s|s>`.
    /// `⟨s|O|s⟩ / ⟨s|s⟩`.
    pub fn expectation(&self, s: &StateVector) -> Result<f64> {
        let n = s.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.matrix_element(s, s)?.re / n)
    }
}

impl Kron for Operator {
    fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let nm = n * m;
        let mut entries = vec![ZERO; nm * nm];
        for i in 0..n {
            for j in 0..n {
                let a = self.entry(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * nm + j * m;
                    for l in 0..m {
                        entries[row + l] = a * other.entry(k, l);
                    }
                }
            }
        }
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        let kind = if self.kind == other.kind { self.kind } else { OperatorKind::General };
        Self { entries, dim: nm, factor_dims: dims, kind }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs).expect("multiplying operators of different dimension")
    }
}

impl Mul<&StateVector> for &Operator {
    type Output = StateVector;
    fn mul(self, rhs: &StateVector) -> StateVector {
        self.apply(rhs).expect("applying operator to state of different dimension")
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("adding operators of different dimension")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_add(&rhs.scaled(Complex64::new(-1.0, 0.0))).expect("subtracting operators of different dimension")
    }
}
