//! Built-in models by name.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::*;

/// `key=value` pairs from a `k=v,k=v` string.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelParams(pub BTreeMap<String, String>);

impl ModelParams {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("parameter `{item}` is not of the form key=value")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ModelParams(map))
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.0.get(key).map(String::as_str).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => parse_real(v)
                .ok_or_else(|| Error::Input(format!("parameter {key}={v} is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Input(format!("parameter {key}={v} is not a non-negative integer"))),
        }
    }

    /// Rejects keys outside `known`; `owner` names the model or flag in the message.
    pub fn check_known(&self, owner: &str, known: &[&str]) -> Result<()> {
        for k in self.0.keys() {
            if !known.contains(&k.as_str()) {
                return Err(Error::Input(format!(
                    "{owner} has no parameter `{k}` (accepted: {})",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// Reals, plus fractions such as `4/3`.
fn parse_real(v: &str) -> Option<f64> {
    if let Some((a, b)) = v.split_once('/') {
        return Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?);
    }
    v.parse().ok()
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub degree: String,
    pub dim: String,
    pub metric_hint: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const MODEL_NAMES: [&str; 12] = [
    "iso-p1",
    "minimal-surface",
    "gas",
    "gas-polytropic",
    "relativistic",
    "relativistic-powerlaw",
    "relativistic-limit",
    "maxwell-linear",
    "maxwell-lorentz",
    "maxwell-anisotropic",
    "polynomial",
    "user-expr",
];

pub fn catalog() -> Vec<ModelInfo> {
    let info = |name, degree: &str, dim: &str, metric_hint, params, summary| ModelInfo {
        name,
        degree: degree.to_string(),
        dim: dim.to_string(),
        metric_hint,
        params,
        summary,
    };
    vec![
        info("iso-p1", "1", "d", "euclidean", "d=3, profile=quadratic|power|minimal, m=2, coupling=0", "exp(coupling s) l(|A|)"),
        info("minimal-surface", "1", "d", "euclidean", "d=2", "sqrt(1 + |A|^2)"),
        info("gas", "n", "n+1", "none", "n=1, g=polytropic|isothermal, gamma=2, a=1", "|q|^2/(2 rho) - g(rho, s)"),
        info("gas-polytropic", "n", "n+1", "none", "n=3, gamma=1.4", "|q|^2/(2 rho) - exp(s) rho^gamma/(gamma (gamma-1))"),
        info("relativistic", "3", "4", "lambda", "c=1, kappa=1.5", "rho^2/2 + exp(s) rho^kappa"),
        info("relativistic-powerlaw", "3", "4", "lambda", "c=1, kappa=4/3", "exp(s) rho^kappa"),
        info("relativistic-limit", "3", "4", "lambda", "c=1", "rho^2"),
        info("maxwell-linear", "2", "4", "minkowski", "", "(|E|^2 - |B|^2)/2"),
        info("maxwell-lorentz", "2", "4", "minkowski", "coupling=0.1", "X + k(4X^2 + 7Y^2), X=(|E|^2-|B|^2)/2, Y=E.B"),
        info("maxwell-anisotropic", "2", "4", "minkowski", "", "|E|^2"),
        info("polynomial", "p", "d", "none", "d=3, p=1, seed=0, quartic=0, coupling=0", "b.A + A^T Q A/2 + quartic |A|^4 + coupling s |A|^2, seeded b, Q"),
        info("user-expr", "p", "d", "none", "d, p, expr", "expression over A<indices> and s"),
    ]
}

/// Builds a registered model from its name and parameters.
pub fn build(name: &str, params: &ModelParams) -> Result<LagrangianModel> {
    let model = match name {
        "iso-p1" => {
            params.check_known(name, &["d", "profile", "m", "coupling"])?;
            let d = params.usize_or("d", 3)?;
            let profile = match params.str_or("profile", "quadratic") {
                "quadratic" => IsoProfile::Quadratic,
                "power" => IsoProfile::Power(params.f64_or("m", 2.0)?),
                "minimal" => IsoProfile::MinimalSurface,
                other => return Err(Error::Input(format!("unknown isotropic profile `{other}`"))),
            };
            if d == 0 {
                return Err(Error::Input("d must be at least 1".into()));
            }
            LagrangianModel::isotropic(
                Isotropic::new(d, profile).with_coupling(params.f64_or("coupling", 0.0)?),
            )
        }
        "minimal-surface" => {
            params.check_known(name, &["d"])?;
            let d = params.usize_or("d", 2)?;
            if d == 0 {
                return Err(Error::Input("d must be at least 1".into()));
            }
            LagrangianModel::isotropic(Isotropic::new(d, IsoProfile::MinimalSurface))
        }
        "gas" | "gas-polytropic" => {
            let polytropic_only = name == "gas-polytropic";
            params.check_known(name, &["n", "g", "gamma", "a"])?;
            let n = params.usize_or("n", if polytropic_only { 3 } else { 1 })?;
            if n == 0 {
                return Err(Error::Input("n must be at least 1".into()));
            }
            let gamma = params.f64_or("gamma", if polytropic_only { 1.4 } else { 2.0 })?;
            let energy = match params.str_or("g", "polytropic") {
                "polytropic" => {
                    if !(gamma > 1.0) {
                        return Err(Error::Input(format!("gamma = {gamma} must exceed 1")));
                    }
                    InternalEnergy::Polytropic { gamma }
                }
                "isothermal" if !polytropic_only => InternalEnergy::Isothermal {
                    sound_speed: params.f64_or("a", 1.0)?,
                },
                other => return Err(Error::Input(format!("unknown internal energy `{other}`"))),
            };
            LagrangianModel::gas(GasDynamics::new(n, energy))
        }
        "relativistic" | "relativistic-powerlaw" | "relativistic-limit" => {
            let c = params.f64_or("c", 1.0)?;
            if !(c > 0.0) {
                return Err(Error::Input(format!("c = {c} must be positive")));
            }
            let law = match name {
                "relativistic" => {
                    params.check_known(name, &["c", "kappa"])?;
                    DensityLaw::TwoTerm {
                        kappa: params.f64_or("kappa", 1.5)?,
                    }
                }
                "relativistic-powerlaw" => {
                    params.check_known(name, &["c", "kappa"])?;
                    DensityLaw::PowerLaw {
                        kappa: params.f64_or("kappa", 4.0 / 3.0)?,
                    }
                }
                _ => {
                    params.check_known(name, &["c"])?;
                    DensityLaw::Limit
                }
            };
            LagrangianModel::relativistic(RelativisticGas::new(c, law))
        }
        "maxwell-linear" => {
            params.check_known(name, &[])?;
            LagrangianModel::maxwell(Maxwell::new(MaxwellLaw::Linear))
        }
        "maxwell-lorentz" => {
            params.check_known(name, &["coupling"])?;
            LagrangianModel::maxwell(Maxwell::new(MaxwellLaw::EulerHeisenberg {
                coupling: params.f64_or("coupling", 0.1)?,
            }))
        }
        "maxwell-anisotropic" => {
            params.check_known(name, &[])?;
            LagrangianModel::maxwell(Maxwell::new(MaxwellLaw::Anisotropic))
        }
        "polynomial" => {
            params.check_known(name, &["d", "p", "seed", "quartic", "coupling"])?;
            let d = params.usize_or("d", 3)?;
            let p = params.usize_or("p", 1)?;
            if p > d {
                return Err(Error::InvalidLayout { d, p });
            }
            let seed = params.usize_or("seed", 0)? as u64;
            let poly = random_polynomial(d, p, seed)
                .with_quartic(params.f64_or("quartic", 0.0)?)
                .with_entropy_coupling(params.f64_or("coupling", 0.0)?);
            LagrangianModel::polynomial(d, p, poly)?
        }
        "user-expr" => {
            params.check_known(name, &["d", "p", "expr"])?;
            let d = params.usize_or("d", 0)?;
            let p = params.usize_or("p", 0)?;
            if d == 0 || p > d {
                return Err(Error::Input("user-expr needs d >= 1 and 0 <= p <= d".into()));
            }
            let source = params
                .0
                .get("expr")
                .ok_or_else(|| Error::Input("user-expr needs an expression (expr=...)".into()))?;
            LagrangianModel::expression(crate::expr::ExprDensity::parse(source, d, p)?)
        }
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    Ok(model.named(name))
}

/// Seeded `b ~ N(0, 1)` and symmetric `Q ~ N(0, 1)`.
pub fn random_polynomial(d: usize, p: usize, seed: u64) -> Polynomial {
    use rand::SeedableRng;
    let n = crate::exterior::binomial(d, p);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let b = nalgebra::DVector::from_fn(n, |_, _| normal());
    let q = DMatrix::from_fn(n, n, |_, _| normal());
    Polynomial::new(b, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_name_builds() {
        for name in MODEL_NAMES {
            let params = if name == "user-expr" {
                ModelParams::default().set("d", "2").set("p", "1").set("expr", "A0*A1")
            } else {
                ModelParams::default()
            };
            let m = build(name, &params).unwrap();
            assert_eq!(m.name, name);
        }
        assert_eq!(catalog().len(), MODEL_NAMES.len());
    }

    #[test]
    fn unknown_names_and_params() {
        assert!(matches!(
            build("ether", &ModelParams::default()),
            Err(Error::UnknownModel(_))
        ));
        let p = ModelParams::parse("colour=red").unwrap();
        assert!(build("gas", &p).is_err());
        assert!(ModelParams::parse("gamma").is_err());
    }

    #[test]
    fn parameter_parsing() {
        let p = ModelParams::parse("g=polytropic, gamma=2,kappa=4/3").unwrap();
        assert_eq!(p.str_or("g", ""), "polytropic");
        assert_eq!(p.f64_or("gamma", 0.0).unwrap(), 2.0);
        assert!((p.f64_or("kappa", 0.0).unwrap() - 4.0 / 3.0).abs() < 1e-16);
        let gas = build("gas", &ModelParams::parse("g=polytropic,gamma=2,n=2").unwrap()).unwrap();
        assert_eq!((gas.dim, gas.degree), (3, 2));
    }
}
