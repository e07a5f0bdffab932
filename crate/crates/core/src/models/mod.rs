//! Lagrangian densities `L(A, s)` and their coefficient gradients.

pub mod encoding;
pub mod gas;
pub mod iso;
pub mod maxwell;
pub mod polynomial;
pub mod registry;
pub mod relativistic;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::exterior::{canonicalize, subset_rank, PFormValue};
use crate::expr::ExprDensity;

pub use gas::{GasDynamics, GasState, InternalEnergy};
pub use iso::{IsoProfile, Isotropic};
pub use maxwell::{Constitutive, EMState, Maxwell, MaxwellLaw};
pub use polynomial::Polynomial;
pub use relativistic::{minkowski, DensityLaw, RelativisticGas, RelativisticState};

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Isotropic(Isotropic),
    Gas(GasDynamics),
    Relativistic(RelativisticGas),
    Maxwell(Maxwell),
    Polynomial(Polynomial),
    Expr(ExprDensity),
}

/// A named density over the coefficients of a `p`-form on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianModel {
    pub name: String,
    pub dim: usize,
    pub degree: usize,
    pub kind: ModelKind,
    pub metric_hint: Option<DMatrix<f64>>,
}

impl LagrangianModel {
    pub fn isotropic(iso: Isotropic) -> Self {
        let d = iso.dim;
        LagrangianModel {
            name: "iso-p1".into(),
            dim: d,
            degree: 1,
            kind: ModelKind::Isotropic(iso),
            metric_hint: Some(DMatrix::identity(d, d)),
        }
    }

    pub fn gas(gas: GasDynamics) -> Self {
        let d = gas.dim();
        LagrangianModel {
            name: "gas".into(),
            dim: d,
            degree: d - 1,
            kind: ModelKind::Gas(gas),
            metric_hint: None,
        }
    }

    pub fn relativistic(rel: RelativisticGas) -> Self {
        let lambda = rel.lambda();
        LagrangianModel {
            name: "relativistic".into(),
            dim: 4,
            degree: 3,
            kind: ModelKind::Relativistic(rel),
            metric_hint: Some(lambda),
        }
    }

    pub fn maxwell(m: Maxwell) -> Self {
        LagrangianModel {
            name: "maxwell".into(),
            dim: 4,
            degree: 2,
            kind: ModelKind::Maxwell(m),
            metric_hint: Some(minkowski(1.0)),
        }
    }

    pub fn polynomial(dim: usize, degree: usize, poly: Polynomial) -> Result<Self> {
        if degree > dim {
            return Err(Error::InvalidLayout { d: dim, p: degree });
        }
        let n = crate::exterior::binomial(dim, degree);
        if poly.len() != n || poly.quadratic.nrows() != n || poly.quadratic.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: poly.len(),
            });
        }
        Ok(LagrangianModel {
            name: "polynomial".into(),
            dim,
            degree,
            kind: ModelKind::Polynomial(poly),
            metric_hint: None,
        })
    }

    pub fn expression(density: ExprDensity) -> Self {
        LagrangianModel {
            name: "user-expr".into(),
            dim: density.dim(),
            degree: density.degree(),
            kind: ModelKind::Expr(density),
            metric_hint: None,
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_metric_hint(mut self, s: Option<DMatrix<f64>>) -> Self {
        self.metric_hint = s;
        self
    }

    pub fn n_coeffs(&self) -> usize {
        crate::exterior::binomial(self.dim, self.degree)
    }

    pub fn uses_entropy(&self) -> bool {
        match &self.kind {
            ModelKind::Isotropic(m) => m.coupling != 0.0,
            ModelKind::Gas(_) | ModelKind::Relativistic(_) => true,
            ModelKind::Maxwell(_) => false,
            ModelKind::Polynomial(p) => p.entropy_coupling != 0.0,
            ModelKind::Expr(e) => e.uses_entropy(),
        }
    }

    pub fn as_gas(&self) -> Option<&GasDynamics> {
        match &self.kind {
            ModelKind::Gas(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_relativistic(&self) -> Option<&RelativisticGas> {
        match &self.kind {
            ModelKind::Relativistic(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_maxwell(&self) -> Option<&Maxwell> {
        match &self.kind {
            ModelKind::Maxwell(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_isotropic(&self) -> Option<&Isotropic> {
        match &self.kind {
            ModelKind::Isotropic(m) => Some(m),
            _ => None,
        }
    }

    /// The density on raw coefficients, generic over the scalar type.
    /// No domain checks.
    pub fn density<S: Scalar>(&self, a: &[S], s: S) -> S {
        match &self.kind {
            ModelKind::Isotropic(m) => m.density(a, s),
            ModelKind::Gas(m) => m.density(a, s),
            ModelKind::Relativistic(m) => m.density(a, s),
            ModelKind::Maxwell(m) => m.density(a, s),
            ModelKind::Polynomial(m) => m.density(a, s),
            ModelKind::Expr(m) => m.eval(a, s),
        }
    }

    pub fn check_form(&self, alpha: &PFormValue) -> Result<()> {
        alpha.check_layout(self.dim, self.degree)
    }

    pub fn check_domain(&self, alpha: &PFormValue) -> Result<()> {
        self.check_form(alpha)?;
        match &self.kind {
            ModelKind::Gas(_) => GasState::decode(alpha)?.validate(),
            ModelKind::Relativistic(r) => RelativisticState::decode(alpha, r.c)?.validate(),
            _ => Ok(()),
        }
    }

    pub fn admissible(&self, alpha: &PFormValue) -> bool {
        self.check_domain(alpha).is_ok()
    }

    pub fn evaluate(&self, alpha: &PFormValue) -> Result<f64> {
        self.check_domain(alpha)?;
        let v = self.density(alpha.coeffs(), alpha.s());
        if !v.is_finite() {
            return Err(Error::Domain(format!("{} evaluates to {v}", self.name)));
        }
        Ok(v)
    }

    /// Closed-form gradient when the model has one.
    pub fn closed_gradient(&self, alpha: &PFormValue) -> Option<Result<Vec<f64>>> {
        if let Err(e) = self.check_domain(alpha) {
            return Some(Err(e));
        }
        let a = alpha.coeffs();
        let s = alpha.s();
        let g = match &self.kind {
            ModelKind::Isotropic(m) => m.gradient(a, s),
            ModelKind::Gas(m) => GasState::decode(alpha)
                .and_then(|st| m.momentum_gradient(&st))
                .map(|g| encoding::nform_gradient_to_coeffs(&g)),
            ModelKind::Relativistic(m) => RelativisticState::decode(alpha, m.c)
                .and_then(|st| m.momentum_gradient(&st))
                .map(|g| encoding::nform_gradient_to_coeffs(&g)),
            ModelKind::Maxwell(m) => {
                EMState::decode(alpha).map(|st| m.coefficient_gradient(&st))
            }
            ModelKind::Polynomial(p) => Ok(p.gradient(a, s)),
            ModelKind::Expr(_) => return None,
        };
        Some(g)
    }

    /// Forward-mode gradient, one dual pass per coefficient.
    pub fn ad_gradient(&self, alpha: &PFormValue) -> Result<Vec<f64>> {
        self.check_domain(alpha)?;
        let a = alpha.coeffs();
        let s = Dual::constant(alpha.s());
        let mut seeds: Vec<Dual> = a.iter().map(|&x| Dual::constant(x)).collect();
        let mut out = Vec::with_capacity(a.len());
        for k in 0..a.len() {
            seeds[k].eps = 1.0;
            let v = self.density(&seeds, s);
            seeds[k].eps = 0.0;
            if !v.re.is_finite() || !v.eps.is_finite() {
                return Err(Error::Domain(format!(
                    "{}: derivative along coefficient {k} is not finite",
                    self.name
                )));
            }
            out.push(v.eps);
        }
        Ok(out)
    }

    /// Central differences with step `1e-6 (1 + |A_J|)`.
    pub fn fd_gradient(&self, alpha: &PFormValue) -> Result<Vec<f64>> {
        self.check_domain(alpha)?;
        let s = alpha.s();
        let mut a = alpha.coeffs().to_vec();
        let mut out = Vec::with_capacity(a.len());
        for k in 0..a.len() {
            let x = a[k];
            let h = 1e-6 * (1.0 + x.abs());
            a[k] = x + h;
            let up: f64 = self.density(&a, s);
            a[k] = x - h;
            let down: f64 = self.density(&a, s);
            a[k] = x;
            out.push((up - down) / (2.0 * h));
        }
        Ok(out)
    }

    /// `dL/dA_J` in storage order: closed form if available, AD otherwise.
    pub fn gradient(&self, alpha: &PFormValue) -> Result<Vec<f64>> {
        match self.closed_gradient(alpha) {
            Some(g) => g,
            None => self.ad_gradient(alpha),
        }
    }

    /// `dL/dA_H` for an arbitrary tuple `H`, with the reordering sign applied.
    pub fn gradient_at(&self, alpha: &PFormValue, raw: &[usize]) -> Result<f64> {
        if raw.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: raw.len(),
            });
        }
        let (canon, parity) = canonicalize(raw, self.dim)?;
        if parity.as_i8() == 0 {
            return Ok(0.0);
        }
        let g = self.gradient(alpha)?;
        Ok(parity.sign() * g[subset_rank(self.dim, canon.entries())])
    }

    /// `dL/ds`, zero for entropy-free densities.
    pub fn entropy_derivative(&self, alpha: &PFormValue) -> Result<f64> {
        self.check_domain(alpha)?;
        let a: Vec<Dual> = alpha.coeffs().iter().map(|&x| Dual::constant(x)).collect();
        let v = self.density(&a, Dual::variable(alpha.s()));
        if !v.eps.is_finite() {
            return Err(Error::Domain(format!("{}: dL/ds is not finite", self.name)));
        }
        Ok(v.eps)
    }

    /// A random admissible state, with entropy attached iff the model uses it.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> PFormValue {
        let mut normal = |scale: f64| -> f64 {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        };
        let mut alpha = match &self.kind {
            ModelKind::Gas(g) => {
                let rho = 0.5 + 1.5 * normal(1.0).abs().min(1.0);
                let q: Vec<f64> = (0..g.n).map(|_| normal(0.8)).collect();
                GasState::new(rho, q, 0.0).encode()
            }
            ModelKind::Relativistic(r) => {
                let rho = 0.5 + normal(1.0).abs().min(2.0);
                let sp = [normal(0.6), normal(0.6), normal(0.6)];
                let sp2 = sp.iter().map(|x| x * x).sum::<f64>();
                let m0 = (rho * rho + sp2).sqrt() / r.c;
                RelativisticState::new([m0, sp[0], sp[1], sp[2]], r.c, 0.0).encode()
            }
            _ => {
                let coeffs = (0..self.n_coeffs()).map(|_| normal(1.0)).collect();
                PFormValue::from_coeffs(self.dim, self.degree, coeffs).expect("layout")
            }
        };
        let s = if self.uses_entropy() { Some(normal(0.3)) } else { None };
        alpha.set_entropy(s);
        alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn ad_of_a_square() {
        let e = ExprDensity::parse("A1^2", 2, 1).unwrap();
        let m = LagrangianModel::expression(e);
        let alpha = PFormValue::from_coeffs(2, 1, vec![0.3, -1.5]).unwrap();
        assert_eq!(m.ad_gradient(&alpha).unwrap(), vec![0.0, -3.0]);
        assert!(m.closed_gradient(&alpha).is_none());
    }

    #[test]
    fn gas_gradient_three_ways() {
        let model = LagrangianModel::gas(GasDynamics::new(3, InternalEnergy::Polytropic { gamma: 1.4 }));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let alpha = model.sample_state(&mut rng);
            let closed = model.closed_gradient(&alpha).unwrap().unwrap();
            let ad = model.ad_gradient(&alpha).unwrap();
            let fd = model.fd_gradient(&alpha).unwrap();
            assert!(close(&ad, &closed, 1e-12));
            assert!(close(&fd, &closed, 1e-6));
        }
    }

    #[test]
    fn gradient_reindexing_flips_sign() {
        let model = LagrangianModel::maxwell(Maxwell::new(MaxwellLaw::EulerHeisenberg { coupling: 0.1 }));
        let alpha = EMState::new([0.3, -0.2, 0.9], [1.1, 0.4, -0.5]).encode();
        for (i, j) in [(0, 1), (1, 3), (2, 3)] {
            let fwd = model.gradient_at(&alpha, &[i, j]).unwrap();
            let back = model.gradient_at(&alpha, &[j, i]).unwrap();
            assert_eq!(fwd, -back);
        }
        assert_eq!(model.gradient_at(&alpha, &[2, 2]).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let model = LagrangianModel::gas(GasDynamics::new(1, InternalEnergy::Polytropic { gamma: 2.0 }));
        let bad = GasState::new(-1.0, vec![0.0], 0.0).encode();
        assert!(model.evaluate(&bad).is_err());
        assert!(model.ad_gradient(&bad).is_err());
        let wrong = PFormValue::zeros(3, 1);
        assert!(model.evaluate(&wrong).is_err());
    }

    #[test]
    fn entropy_derivative_of_polytropic_gas() {
        let model = LagrangianModel::gas(GasDynamics::new(1, InternalEnergy::Polytropic { gamma: 2.0 }));
        let alpha = GasState::new(2.0, vec![0.0], 0.0).encode();
        // dL/ds = -g = -rho^2 / 2
        assert!((model.entropy_derivative(&alpha).unwrap() + 2.0).abs() < 1e-14);
    }
}
