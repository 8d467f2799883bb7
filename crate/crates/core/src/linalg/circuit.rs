use super::{check_slots, Operator, StateVector};
use crate::{Error, Result};

/// A small operator acting on a subset of tensor slots.
#[derive(Debug, Clone)]
pub struct Gate {
    pub op: Operator,
    pub slots: Vec<usize>,
}

/// Ordered product of slot-local gates over fixed factor dimensions.
///
/// Gates apply in insertion order, so the dense operator is
/// `G_n ⋯ G_2 G_1`. Applying to a vector never materializes the full matrix.
#[derive(Debug, Clone)]
pub struct LocalCircuit {
    dims: Vec<usize>,
    gates: Vec<Gate>,
}

impl LocalCircuit {
    pub fn new(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec(), gates: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, op: Operator, slots: &[usize]) -> Result<()> {
        check_slots(slots, self.dims.len())?;
        let local: usize = slots.iter().map(|&s| self.dims[s]).product();
        if local != op.dim() {
            return Err(Error::DimensionMismatch { expected: local, found: op.dim() });
        }
        self.gates.push(Gate { op, slots: slots.to_vec() });
        Ok(())
    }

    /// `other` applied after `self`.
    pub fn then(mut self, other: &LocalCircuit) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.iter().product(),
                found: other.dims.iter().product(),
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.factor_dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch { expected: self.dims.iter().product(), found: state.dim() });
        }
        self.gates.iter().try_fold(state.clone(), |s, g| g.op.apply_on(&g.slots, &s))
    }

    /// Dense matrix of the whole circuit.
    pub fn to_operator(&self) -> Result<Operator> {
        let mut gates = self.gates.iter();
        let Some(first) = gates.next() else {
            return Ok(Operator::identity(&self.dims));
        };
        let mut acc = first.op.embed(&first.slots, &self.dims)?;
        for g in gates {
            acc = g.op.embed(&g.slots, &self.dims)?.matmul(&acc)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{r, Kron};

    #[test]
    fn dense_matches_vector_application() {
        let x = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let h =
            Operator::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).unwrap().scaled(r(std::f64::consts::FRAC_1_SQRT_2));
        let mut c = LocalCircuit::new(&[2, 2, 2]);
        c.push(h.clone(), &[0]).unwrap();
        c.push(x.kron(&h), &[2, 1]).unwrap();
        c.push(x, &[1]).unwrap();
        let amps: Vec<_> = (0..8).map(|k| r((k * k) as f64 - 3.0)).collect();
        let s = StateVector::new(amps, vec![2, 2, 2]).unwrap();
        let a = c.apply(&s).unwrap();
        let b = c.to_operator().unwrap().apply(&s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}
