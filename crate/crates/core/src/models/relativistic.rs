//! Relativistic gas on the 3-form of particle-number conservation in `R^{1+3}`.
//!
//! The density depends on the particle number density
//! `rho = sqrt(-m^T Lambda m)` with `Lambda = diag(-c^2, 1, 1, 1)`.

use nalgebra::DMatrix;

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::exterior::PFormValue;
use crate::models::encoding;

/// `L_rho(rho, s)`, written in terms of `rho^2` so the limit law stays polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityLaw {
    /// `exp(s) rho^kappa`
    PowerLaw { kappa: f64 },
    /// `rho^2`, whose waves all travel at light speed.
    Limit,
    /// `rho^2 / 2 + exp(s) rho^kappa`
    TwoTerm { kappa: f64 },
}

impl DensityLaw {
    pub fn eval_rho2<S: Scalar>(&self, rho2: S, s: S) -> S {
        match *self {
            DensityLaw::PowerLaw { kappa } => s.exp() * rho2.powf(0.5 * kappa),
            DensityLaw::Limit => rho2,
            DensityLaw::TwoTerm { kappa } => rho2 * 0.5 + s.exp() * rho2.powf(0.5 * kappa),
        }
    }

    pub fn value(&self, rho: f64, s: f64) -> f64 {
        self.eval_rho2(rho * rho, s)
    }

    /// `dL/drho`.
    pub fn d_rho(&self, rho: f64, s: f64) -> f64 {
        match *self {
            DensityLaw::PowerLaw { kappa } => kappa * s.exp() * rho.powf(kappa - 1.0),
            DensityLaw::Limit => 2.0 * rho,
            DensityLaw::TwoTerm { kappa } => rho + kappa * s.exp() * rho.powf(kappa - 1.0),
        }
    }
}

/// `Lambda = diag(-c^2, 1, 1, 1)`.
pub fn minkowski(c: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-c * c, 1.0, 1.0, 1.0]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativisticState {
    pub m: [f64; 4],
    pub c: f64,
    pub s: f64,
}

impl RelativisticState {
    pub fn new(m: [f64; 4], c: f64, s: f64) -> Self {
        RelativisticState { m, c, s }
    }

    /// `c^2 m_0^2 - |m_spatial|^2`.
    pub fn rho_squared(&self) -> f64 {
        let [m0, m1, m2, m3] = self.m;
        self.c * self.c * m0 * m0 - (m1 * m1 + m2 * m2 + m3 * m3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::Domain(format!("light speed c = {} must be positive", self.c)));
        }
        if !(self.m[0] > 0.0) || !(self.rho_squared() > 0.0) {
            return Err(Error::Domain(format!(
                "4-momentum {:?} is not strictly sub-luminal for c = {}",
                self.m, self.c
            )));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.rho_squared().sqrt()
    }

    /// 4-velocity `u = m / rho`, normalized by `u^T Lambda u = -1`.
    pub fn velocity(&self) -> [f64; 4] {
        let rho = self.rho();
        self.m.map(|x| x / rho)
    }

    pub fn encode(&self) -> PFormValue {
        encoding::encode_nform(&self.m).with_entropy(self.s)
    }

    pub fn decode(alpha: &PFormValue, c: f64) -> Result<Self> {
        alpha.check_layout(4, 3)?;
        let m = encoding::decode_nform(alpha.coeffs());
        Ok(RelativisticState::new([m[0], m[1], m[2], m[3]], c, alpha.s()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativisticGas {
    pub c: f64,
    pub law: DensityLaw,
}

impl RelativisticGas {
    pub fn new(c: f64, law: DensityLaw) -> Self {
        RelativisticGas { c, law }
    }

    pub fn lambda(&self) -> DMatrix<f64> {
        minkowski(self.c)
    }

    pub fn density<S: Scalar>(&self, a: &[S], s: S) -> S {
        let m = encoding::decode_nform(a);
        let rho2 = m[0] * m[0] * (self.c * self.c) - (m[1] * m[1] + m[2] * m[2] + m[3] * m[3]);
        self.law.eval_rho2(rho2, s)
    }

    pub fn lagrangian(&self, state: &RelativisticState) -> f64 {
        self.law.eval_rho2(state.rho_squared(), state.s)
    }

    /// `e = L / c^2`.
    pub fn energy_density(&self, state: &RelativisticState) -> f64 {
        self.lagrangian(state) / (self.c * self.c)
    }

    /// `p = rho dL/drho - L`.
    pub fn pressure(&self, state: &RelativisticState) -> f64 {
        let rho = state.rho();
        rho * self.law.d_rho(rho, state.s) - self.lagrangian(state)
    }

    /// `dL/dm = -(dL/drho) Lambda m / rho`.
    pub fn momentum_gradient(&self, state: &RelativisticState) -> Result<Vec<f64>> {
        state.validate()?;
        let rho = state.rho();
        let factor = -self.law.d_rho(rho, state.s) / rho;
        let c2 = self.c * self.c;
        let [m0, m1, m2, m3] = state.m;
        Ok(vec![factor * (-c2 * m0), factor * m1, factor * m2, factor * m3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_is_unit_timelike() {
        let st = RelativisticState::new([1.3, 0.4, -0.2, 0.7], 1.7, 0.0);
        st.validate().unwrap();
        let u = st.velocity();
        let norm = -st.c * st.c * u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
        assert!((norm + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rest_state_of_limit_law() {
        let gas = RelativisticGas::new(1.0, DensityLaw::Limit);
        let st = RelativisticState::new([1.0, 0.0, 0.0, 0.0], 1.0, 0.0);
        assert_eq!(st.rho(), 1.0);
        assert_eq!(gas.lagrangian(&st), 1.0);
        assert_eq!(st.velocity(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ultrarelativistic_pressure() {
        let gas = RelativisticGas::new(1.0, DensityLaw::PowerLaw { kappa: 4.0 / 3.0 });
        let st = RelativisticState::new([1.0, 0.0, 0.0, 0.0], 1.0, 0.0);
        assert!((gas.energy_density(&st) - 1.0).abs() < 1e-15);
        assert!((gas.pressure(&st) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_luminal_states() {
        let st = RelativisticState::new([1.0, 1.0, 0.0, 0.0], 1.0, 0.0);
        assert!(st.validate().is_err());
        let st = RelativisticState::new([-2.0, 0.0, 0.0, 0.0], 1.0, 0.0);
        assert!(st.validate().is_err());
    }
}
