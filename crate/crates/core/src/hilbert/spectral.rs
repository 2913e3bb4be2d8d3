use faer::{c64, Mat};

use super::{Operator, StateVector};
use crate::linalg::{self, ZERO};
use crate::Result;

/// Eigen-decomposition `M = V diag(values) V†` of a Hermitian operator.
///
/// Diagonal operators skip the factorization and keep `V = I`, which keeps
/// number-operator evolution cheap at any truncation.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Option<Mat<c64>>,
}

impl Spectrum {
    pub fn of(op: &Operator) -> Result<Self> {
        op.require_hermitian()?;
        if op.is_diagonal() {
            let values = (0..op.dimension()).map(|i| op.get(i, i).re).collect();
            return Ok(Spectrum {
                values,
                vectors: None,
            });
        }
        let (values, vectors) = linalg::hermitian_eigen(&op.to_dense()?)?;
        Ok(Spectrum {
            values,
            vectors: Some(vectors),
        })
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues; ascending unless the operator was diagonal, in which case
    /// they follow the basis order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn vectors(&self) -> Option<&Mat<c64>> {
        self.vectors.as_ref()
    }

    /// Coordinates `V† ψ` in the eigenbasis.
    pub fn coefficients(&self, psi: &[c64]) -> Vec<c64> {
        match &self.vectors {
            Some(v) => linalg::adjoint_matvec(v, psi),
            None => psi.to_vec(),
        }
    }

    /// Map eigenbasis coordinates back, `V c`.
    pub fn synthesize(&self, coeffs: &[c64]) -> Vec<c64> {
        match &self.vectors {
            Some(v) => linalg::matvec(v, coeffs),
            None => coeffs.to_vec(),
        }
    }

    /// Born-rule weights `|⟨m_k|ψ⟩|²`, aligned with [`Spectrum::values`].
    pub fn probabilities(&self, state: &StateVector) -> Vec<f64> {
        self.coefficients(state.amplitudes())
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    }

    /// `e^{iMφ} ψ`.
    pub fn exp_i(&self, psi: &[c64], phi: f64) -> Vec<c64> {
        let mut c = self.coefficients(psi);
        for (ck, &e) in c.iter_mut().zip(&self.values) {
            *ck *= c64::cis(e * phi);
        }
        self.synthesize(&c)
    }

    /// `e^{iMφ_k} ψ` for every `φ_k`, as the columns of one matrix.
    pub fn exp_i_batch(&self, psi: &[c64], phis: &[f64]) -> Mat<c64> {
        let c = self.coefficients(psi);
        let phased = Mat::from_fn(self.dimension(), phis.len(), |i, k| {
            c[i] * c64::cis(self.values[i] * phis[k])
        });
        match &self.vectors {
            Some(v) => v * &phased,
            None => phased,
        }
    }

    /// Dense `V diag(f(values)) V†`.
    pub fn function(&self, f: impl Fn(f64) -> c64) -> Mat<c64> {
        let d = self.dimension();
        match &self.vectors {
            None => Mat::from_fn(d, d, |i, j| if i == j { f(self.values[i]) } else { ZERO }),
            Some(v) => {
                let scaled = Mat::from_fn(d, d, |i, k| v[(i, k)] * f(self.values[k]));
                &scaled * v.adjoint()
            }
        }
    }
}
