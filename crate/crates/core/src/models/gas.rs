//! Classical gas dynamics, `L(rho, q, s) = |q|^2 / (2 rho) - g(rho, s)`, on
//! the `n`-form of mass conservation in space-time `R^{1+n}`.

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::exterior::PFormValue;
use crate::models::encoding;

/// Internal energy per unit volume `g(rho, s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalEnergy {
    /// `exp(s) rho^gamma / (gamma (gamma - 1))`, so `p = exp(s) rho^gamma / gamma`.
    Polytropic { gamma: f64 },
    /// `a^2 rho ln(rho) + s rho`, so `p = a^2 rho` does not depend on `s`.
    Isothermal { sound_speed: f64 },
}

impl InternalEnergy {
    pub fn eval<S: Scalar>(&self, rho: S, s: S) -> S {
        match *self {
            InternalEnergy::Polytropic { gamma } => {
                s.exp() * rho.powf(gamma) / (gamma * (gamma - 1.0))
            }
            InternalEnergy::Isothermal { sound_speed } => {
                rho * rho.ln() * (sound_speed * sound_speed) + s * rho
            }
        }
    }

    pub fn value(&self, rho: f64, s: f64) -> f64 {
        self.eval(rho, s)
    }

    /// `dg/drho`.
    pub fn d_rho(&self, rho: f64, s: f64) -> f64 {
        match *self {
            InternalEnergy::Polytropic { gamma } => s.exp() * rho.powf(gamma - 1.0) / (gamma - 1.0),
            InternalEnergy::Isothermal { sound_speed } => {
                sound_speed * sound_speed * (rho.ln() + 1.0) + s
            }
        }
    }

    /// `p = rho dg/drho - g`.
    pub fn pressure(&self, rho: f64, s: f64) -> f64 {
        rho * self.d_rho(rho, s) - self.value(rho, s)
    }

    /// `dp/ds`, the entropy-transport nondegeneracy factor of this model.
    pub fn pressure_d_s(&self, rho: f64, s: f64) -> f64 {
        match *self {
            InternalEnergy::Polytropic { .. } => self.pressure(rho, s),
            InternalEnergy::Isothermal { .. } => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub q: Vec<f64>,
    pub s: f64,
}

impl GasState {
    pub fn new(rho: f64, q: Vec<f64>, s: f64) -> Self {
        GasState { rho, q, s }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::Domain(format!("mass density rho = {} must be positive", self.rho)));
        }
        Ok(())
    }

    /// `m = (rho, q)`.
    pub fn momentum(&self) -> Vec<f64> {
        let mut m = Vec::with_capacity(1 + self.q.len());
        m.push(self.rho);
        m.extend_from_slice(&self.q);
        m
    }

    pub fn from_momentum(m: &[f64], s: f64) -> Self {
        GasState {
            rho: m[0],
            q: m[1..].to_vec(),
            s,
        }
    }

    pub fn encode(&self) -> PFormValue {
        encoding::encode_nform(&self.momentum()).with_entropy(self.s)
    }

    pub fn decode(alpha: &PFormValue) -> Result<Self> {
        let m = encoding::nform_momentum(alpha)?;
        Ok(GasState::from_momentum(&m, alpha.s()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasDynamics {
    pub n: usize,
    pub energy: InternalEnergy,
}

impl GasDynamics {
    pub fn new(n: usize, energy: InternalEnergy) -> Self {
        GasDynamics { n, energy }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn density<S: Scalar>(&self, a: &[S], s: S) -> S {
        let m = encoding::decode_nform(a);
        let rho = m[0];
        let mut q2 = S::zero();
        for &qi in &m[1..] {
            q2 += qi * qi;
        }
        q2 / (rho * 2.0) - self.energy.eval(rho, s)
    }

    pub fn lagrangian(&self, state: &GasState) -> f64 {
        let q2: f64 = state.q.iter().map(|x| x * x).sum();
        q2 / (2.0 * state.rho) - self.energy.value(state.rho, state.s)
    }

    /// `dL/dm = (-|q|^2 / (2 rho^2) - dg/drho, q / rho)`.
    pub fn momentum_gradient(&self, state: &GasState) -> Result<Vec<f64>> {
        state.validate()?;
        let rho = state.rho;
        let q2: f64 = state.q.iter().map(|x| x * x).sum();
        let mut g = Vec::with_capacity(1 + self.n);
        g.push(-q2 / (2.0 * rho * rho) - self.energy.d_rho(rho, state.s));
        g.extend(state.q.iter().map(|qi| qi / rho));
        Ok(g)
    }

    pub fn pressure(&self, state: &GasState) -> f64 {
        self.energy.pressure(state.rho, state.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho_squared_half() -> GasDynamics {
        GasDynamics::new(1, InternalEnergy::Polytropic { gamma: 2.0 })
    }

    #[test]
    fn one_dimensional_hand_values() {
        let gas = rho_squared_half();
        let st = GasState::new(1.0, vec![1.0], 0.0);
        assert_eq!(gas.lagrangian(&st), 0.0);
        assert_eq!(gas.momentum_gradient(&st).unwrap(), vec![-1.5, 1.0]);
    }

    #[test]
    fn static_state_and_pressure() {
        let gas = rho_squared_half();
        let st = GasState::new(2.0, vec![0.0], 0.0);
        assert_eq!(gas.lagrangian(&st), -2.0);
        assert_eq!(gas.pressure(&st), 2.0);
    }

    #[test]
    fn density_via_coefficients_matches_state_form() {
        let gas = GasDynamics::new(2, InternalEnergy::Polytropic { gamma: 1.4 });
        let st = GasState::new(1.3, vec![0.4, -0.7], 0.2);
        let alpha = st.encode();
        let via_a: f64 = gas.density(alpha.coeffs(), alpha.s());
        assert!((via_a - gas.lagrangian(&st)).abs() < 1e-15);
        assert_eq!(GasState::decode(&alpha).unwrap(), st);
    }

    #[test]
    fn rejects_vacuum() {
        let gas = rho_squared_half();
        assert!(gas
            .momentum_gradient(&GasState::new(0.0, vec![1.0], 0.0))
            .is_err());
    }

    #[test]
    fn isothermal_pressure_ignores_entropy() {
        let g = InternalEnergy::Isothermal { sound_speed: 0.8 };
        assert!((g.pressure(1.7, 0.0) - g.pressure(1.7, 3.0)).abs() < 1e-14);
        assert!((g.pressure(1.7, 0.0) - 0.64 * 1.7).abs() < 1e-14);
    }
}
