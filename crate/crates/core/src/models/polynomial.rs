//! Polynomial densities `L = b.A + A^T Q A / 2 + lambda |A|^4 + kappa s |A|^2`.

use nalgebra::{DMatrix, DVector};

use crate::dual::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub linear: DVector<f64>,
    pub quadratic: DMatrix<f64>,
    pub quartic: f64,
    pub entropy_coupling: f64,
}

impl Polynomial {
    /// `Q` is symmetrized on construction.
    pub fn new(linear: DVector<f64>, quadratic: DMatrix<f64>) -> Self {
        let q = (&quadratic + quadratic.transpose()) * 0.5;
        Polynomial {
            linear,
            quadratic: q,
            quartic: 0.0,
            entropy_coupling: 0.0,
        }
    }

    pub fn quadratic_form(q: DMatrix<f64>) -> Self {
        let n = q.nrows();
        Polynomial::new(DVector::zeros(n), q)
    }

    pub fn with_quartic(mut self, lambda: f64) -> Self {
        self.quartic = lambda;
        self
    }

    pub fn with_entropy_coupling(mut self, kappa: f64) -> Self {
        self.entropy_coupling = kappa;
        self
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn density<S: Scalar>(&self, a: &[S], s: S) -> S {
        let n = a.len();
        let mut lin = S::zero();
        let mut quad = S::zero();
        let mut r2 = S::zero();
        for i in 0..n {
            lin += a[i] * self.linear[i];
            r2 += a[i] * a[i];
            let mut row = S::zero();
            for j in 0..n {
                row += a[j] * self.quadratic[(i, j)];
            }
            quad += a[i] * row;
        }
        lin + quad * 0.5 + r2 * r2 * self.quartic + s * r2 * self.entropy_coupling
    }

    pub fn gradient(&self, a: &[f64], s: f64) -> Vec<f64> {
        let av = DVector::from_column_slice(a);
        let r2 = av.norm_squared();
        let g = &self.linear
            + &self.quadratic * &av
            + &av * (4.0 * self.quartic * r2 + 2.0 * self.entropy_coupling * s);
        g.iter().copied().collect()
    }
}
