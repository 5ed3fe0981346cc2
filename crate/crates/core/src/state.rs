//! State vectors over a constrained basis.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::ConstrainedBasis;
use crate::error::{Error, Result};

/// Norm slack allowed at construction; evolution itself preserves the norm
/// far more tightly.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Complex amplitudes over a [`ConstrainedBasis`], unit norm.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<ConstrainedBasis>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes after checking length and unit norm.
    pub fn new(basis: Arc<ConstrainedBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Consistency(format!(
                "{} amplitudes for a {}-dimensional basis",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Consistency(format!(
                "state norm {norm} is not 1 within {NORM_TOLERANCE:e}"
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Unit vector on the basis configuration at `index`.
    pub fn basis_state(basis: &Arc<ConstrainedBasis>, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            basis: Arc::clone(basis),
            amplitudes,
        }
    }

    /// Normalized superposition of basis configurations.
    pub fn superposition(
        basis: &Arc<ConstrainedBasis>,
        terms: &[(usize, Complex64)],
    ) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for &(index, weight) in terms {
            if index >= basis.dim() {
                return Err(Error::Consistency(format!(
                    "basis index {index} out of range for dimension {}",
                    basis.dim()
                )));
            }
            amplitudes[index] += weight;
        }
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::Validation("superposition has zero norm".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            basis: Arc::clone(basis),
            amplitudes,
        })
    }

    pub fn basis(&self) -> &Arc<ConstrainedBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[cfg(test)]
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Builds without the norm check; evolution code keeps the invariant.
    pub(crate) fn from_parts(basis: Arc<ConstrainedBasis>, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { basis, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !self.basis.compatible(other.basis()) {
            return Err(Error::Consistency(
                "inner product between different bases".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

pub(crate) fn l2_norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::NamedState;

    #[test]
    fn rejects_wrong_length_and_bad_norm() {
        let basis = Arc::new(ConstrainedBasis::enumerate(4, 2).unwrap());
        assert!(matches!(
            StateVector::new(Arc::clone(&basis), vec![Complex64::new(1.0, 0.0); 3]),
            Err(Error::Consistency(_))
        ));
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amps[0] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            StateVector::new(basis, amps),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn inner_product_and_superposition() {
        let basis = Arc::new(ConstrainedBasis::enumerate(4, 2).unwrap());
        let z2 = basis.index_of(NamedState::Z2.pattern(4)).unwrap();
        let z2p = basis.index_of(NamedState::Z2Prime.pattern(4)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let cat = StateVector::superposition(&basis, &[(z2, one), (z2p, one)]).unwrap();
        assert!((cat.norm() - 1.0).abs() < 1e-12);
        let point = StateVector::basis_state(&basis, z2);
        let overlap = point.inner(&cat).unwrap();
        assert!((overlap.re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }
}
