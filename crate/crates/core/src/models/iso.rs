//! Isotropic densities of a 1-form, `L = l(u, |A|)`, with the entropy slot
//! standing in for the scalar `u`.

use crate::dual::Scalar;
use crate::error::{Error, Result};

/// Radial profile `base(r)`; the density is `exp(coupling * u) * base(|A|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IsoProfile {
    /// `r^2 / 2`
    Quadratic,
    /// `r^m / m`
    Power(f64),
    /// `sqrt(1 + r^2)`, the non-parametric minimal surface.
    MinimalSurface,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Isotropic {
    pub dim: usize,
    pub profile: IsoProfile,
    pub coupling: f64,
}

impl Isotropic {
    pub fn new(dim: usize, profile: IsoProfile) -> Self {
        Isotropic {
            dim,
            profile,
            coupling: 0.0,
        }
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    fn base_of_r2<S: Scalar>(&self, r2: S) -> S {
        match self.profile {
            IsoProfile::Quadratic => r2 * 0.5,
            IsoProfile::Power(m) => r2.powf(0.5 * m) / m,
            IsoProfile::MinimalSurface => (r2 + 1.0).sqrt(),
        }
    }

    /// `l(u, r)`.
    pub fn profile_value(&self, u: f64, r: f64) -> f64 {
        (self.coupling * u).exp() * self.base_of_r2(r * r)
    }

    /// `dl/dr (u, r)`.
    pub fn profile_slope(&self, u: f64, r: f64) -> f64 {
        let base = match self.profile {
            IsoProfile::Quadratic => r,
            IsoProfile::Power(m) => {
                if m == 1.0 {
                    1.0
                } else {
                    r.powf(m - 1.0)
                }
            }
            IsoProfile::MinimalSurface => r / (1.0 + r * r).sqrt(),
        };
        (self.coupling * u).exp() * base
    }

    pub fn density<S: Scalar>(&self, a: &[S], s: S) -> S {
        let mut r2 = S::zero();
        for &x in a {
            r2 += x * x;
        }
        (s * self.coupling).exp() * self.base_of_r2(r2)
    }

    /// `(dl/dr) A / |A|`; at `A = 0` this is 0 when the slope vanishes there
    /// and singular otherwise.
    pub fn gradient(&self, a: &[f64], u: f64) -> Result<Vec<f64>> {
        let r = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r == 0.0 {
            let slope = self.profile_slope(u, 0.0);
            if slope != 0.0 {
                return Err(Error::SingularGradient { slope });
            }
            return Ok(vec![0.0; a.len()]);
        }
        let factor = self.profile_slope(u, r) / r;
        Ok(a.iter().map(|x| factor * x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_surface_at_rest() {
        let m = Isotropic::new(3, IsoProfile::MinimalSurface);
        assert_eq!(m.density(&[0.0, 0.0, 0.0], 0.0), 1.0);
        assert_eq!(m.gradient(&[0.0, 0.0, 0.0], 0.0).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn quadratic_profile() {
        let m = Isotropic::new(2, IsoProfile::Quadratic);
        assert_eq!(m.density(&[3.0, 4.0], 0.0), 12.5);
        assert_eq!(m.gradient(&[3.0, 4.0], 0.0).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn linear_growth_is_singular_at_origin() {
        let m = Isotropic::new(2, IsoProfile::Power(1.0));
        assert!(matches!(
            m.gradient(&[0.0, 0.0], 0.0),
            Err(Error::SingularGradient { .. })
        ));
        let g = m.gradient(&[0.0, 2.0], 0.0).unwrap();
        assert_eq!(g, vec![0.0, 1.0]);
    }
}
