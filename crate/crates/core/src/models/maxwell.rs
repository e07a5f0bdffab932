//! Electromagnetic densities `L(E, B)` on closed 2-forms of `R^{1+3}`.

use crate::dual::Scalar;
use crate::error::Result;
use crate::exterior::PFormValue;
use crate::models::encoding;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxwellLaw {
    /// `(|E|^2 - |B|^2) / 2`
    Linear,
    /// `X + k (4 X^2 + 7 Y^2)` with `X = (|E|^2 - |B|^2) / 2`, `Y = E . B`.
    /// A function of the two Lorentz invariants (weak-field Euler-Heisenberg form).
    EulerHeisenberg { coupling: f64 },
    /// `|E|^2`, not Lorentz invariant.
    Anisotropic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EMState {
    pub e: [f64; 3],
    pub b: [f64; 3],
}

impl EMState {
    pub fn new(e: [f64; 3], b: [f64; 3]) -> Self {
        EMState { e, b }
    }

    pub fn encode(&self) -> PFormValue {
        encoding::encode_maxwell(self.e, self.b)
    }

    pub fn decode(alpha: &PFormValue) -> Result<Self> {
        let (e, b) = encoding::maxwell_fields(alpha)?;
        Ok(EMState { e, b })
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Auxiliary fields `D = dL/dE`, `H = -dL/dB`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constitutive {
    pub d: [f64; 3],
    pub h: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Maxwell {
    pub law: MaxwellLaw,
}

impl Maxwell {
    pub fn new(law: MaxwellLaw) -> Self {
        Maxwell { law }
    }

    pub fn is_lorentz_form(&self) -> bool {
        !matches!(self.law, MaxwellLaw::Anisotropic)
    }

    pub fn eval_fields<S: Scalar>(&self, e: [S; 3], b: [S; 3]) -> S {
        let e2 = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
        let b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        match self.law {
            MaxwellLaw::Linear => (e2 - b2) * 0.5,
            MaxwellLaw::EulerHeisenberg { coupling } => {
                let x = (e2 - b2) * 0.5;
                let y = e[0] * b[0] + e[1] * b[1] + e[2] * b[2];
                x + (x * x * 4.0 + y * y * 7.0) * coupling
            }
            MaxwellLaw::Anisotropic => e2,
        }
    }

    pub fn density<S: Scalar>(&self, a: &[S], _s: S) -> S {
        let (e, b) = encoding::decode_maxwell(a);
        self.eval_fields(e, b)
    }

    pub fn lagrangian(&self, st: &EMState) -> f64 {
        self.eval_fields(st.e, st.b)
    }

    pub fn constitutive(&self, st: &EMState) -> Constitutive {
        let (e, b) = (st.e, st.b);
        match self.law {
            MaxwellLaw::Linear => Constitutive { d: e, h: b },
            MaxwellLaw::EulerHeisenberg { coupling } => {
                let x = 0.5 * (dot(e, e) - dot(b, b));
                let y = dot(e, b);
                let fx = 1.0 + 8.0 * coupling * x;
                let fy = 14.0 * coupling * y;
                Constitutive {
                    d: [0, 1, 2].map(|k| fx * e[k] + fy * b[k]),
                    h: [0, 1, 2].map(|k| fx * b[k] - fy * e[k]),
                }
            }
            MaxwellLaw::Anisotropic => Constitutive {
                d: e.map(|x| 2.0 * x),
                h: [0.0; 3],
            },
        }
    }

    /// Energy density `W = E . D - L`.
    pub fn energy_density(&self, st: &EMState) -> f64 {
        dot(st.e, self.constitutive(st).d) - self.lagrangian(st)
    }

    /// Energy flux `E x H`.
    pub fn poynting(&self, st: &EMState) -> [f64; 3] {
        cross(st.e, self.constitutive(st).h)
    }

    pub fn coefficient_gradient(&self, st: &EMState) -> Vec<f64> {
        let c = self.constitutive(st);
        encoding::maxwell_gradient_to_coeffs(c.d, c.h.map(|x| -x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_vacuum_values() {
        let m = Maxwell::new(MaxwellLaw::Linear);
        let st = EMState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let c = m.constitutive(&st);
        assert_eq!(c.d, st.e);
        assert_eq!(c.h, st.b);
        assert_eq!(m.energy_density(&st), 1.0);
    }

    #[test]
    fn zero_field_energy() {
        for law in [
            MaxwellLaw::Linear,
            MaxwellLaw::EulerHeisenberg { coupling: 0.3 },
            MaxwellLaw::Anisotropic,
        ] {
            let m = Maxwell::new(law);
            let st = EMState::new([0.0; 3], [0.0; 3]);
            assert_eq!(m.energy_density(&st), -m.lagrangian(&st));
        }
    }

    #[test]
    fn cross_product_orientation() {
        assert_eq!(cross([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
        assert_eq!(cross([0.0, 1.0, 0.0], [1.0, 0.0, 0.0]), [0.0, 0.0, -1.0]);
    }
}
