//! Fields with known behavior under the discrete checks.

use super::{GridField, GridSpec, ScalarGrid};
use crate::error::{Error, Result};
use crate::exterior::PFormValue;
use crate::models::registry::{build, ModelParams};
use crate::models::{EMState, GasState, InternalEnergy, LagrangianModel, RelativisticState};

/// What the checks should report on a case, up to discretization error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub closed: bool,
    pub divergence_free: bool,
    /// `None` when the field carries no entropy.
    pub entropy_transported: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Case {
    pub name: &'static str,
    pub summary: &'static str,
    pub model: LagrangianModel,
    pub field: GridField,
    pub expect: Expectation,
}

pub const CASE_NAMES: [&str; 10] = [
    "maxwell-plane-wave",
    "maxwell-oblique-wave",
    "gas-uniform",
    "relativistic-uniform",
    "maxwell-uniform",
    "gas-static-nonuniform",
    "entropy-advected",
    "entropy-counterexample",
    "exact-form",
    "non-closed-form",
];

/// Off the grid diagonal, so central differences do not cancel exactly.
pub const ADVECTION_SPEED: f64 = 0.7;

const OBLIQUE_K: [f64; 3] = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];

/// Unequal spacings per axis for the oblique wave.
pub const OBLIQUE_STRETCH: [f64; 4] = [0.9, 1.0, 1.1, 1.2];

/// Grid of the oblique plane wave with `n` cells per axis.
pub fn oblique_grid(n: usize) -> Result<GridSpec> {
    let dims = vec![n + 1; 4];
    let spacing = OBLIQUE_STRETCH.iter().map(|s| s / n as f64).collect();
    GridSpec::new(dims, spacing, vec![0.0; 4])
}

/// `E = E0 cos(k.x - t)`, `B = (k x E0) cos(k.x - t)` with unit `k = (1, 2, 2) / 3`.
pub fn oblique_wave(y: &[f64]) -> EMState {
    let k = OBLIQUE_K;
    let e0 = [2.0 / 5f64.sqrt(), -1.0 / 5f64.sqrt(), 0.0];
    let b0 = crate::models::maxwell::cross(k, e0);
    let phase = (k[0] * y[1] + k[1] * y[2] + k[2] * y[3] - y[0]).cos();
    EMState::new(e0.map(|v| v * phase), b0.map(|v| v * phase))
}

fn unit(n: usize, d: usize) -> Result<GridSpec> {
    GridSpec::cube(d, n, 0.0, 1.0)
}

fn defaults(name: &str, params: &str) -> Result<LagrangianModel> {
    build(name, &ModelParams::parse(params)?)
}

/// Builds case `name` with `n` cells per axis.
pub fn case(name: &str, n: usize) -> Result<Case> {
    let both = Expectation {
        closed: true,
        divergence_free: true,
        entropy_transported: None,
    };
    let out = match name {
        "maxwell-plane-wave" => Case {
            name: "maxwell-plane-wave",
            summary: "E = (0, cos(x - t), 0), B = (0, 0, cos(x - t)) under linear electromagnetism",
            model: defaults("maxwell-linear", "")?,
            field: GridField::sample(unit(n, 4)?, 2, |y| {
                let c = (y[1] - y[0]).cos();
                EMState::new([0.0, c, 0.0], [0.0, 0.0, c]).encode()
            })?,
            expect: both,
        },
        "maxwell-oblique-wave" => Case {
            name: "maxwell-oblique-wave",
            summary: "plane wave along (1, 2, 2) / 3 on a grid with unequal spacings",
            model: defaults("maxwell-linear", "")?,
            field: GridField::sample(oblique_grid(n)?, 2, |y| oblique_wave(y).encode())?,
            expect: both,
        },
        "gas-uniform" => Case {
            name: "gas-uniform",
            summary: "constant gas state in 1 + 2 dimensions",
            model: defaults("gas", "n=2")?,
            field: GridField::sample(unit(n, 3)?, 2, |_| GasState::new(1.2, vec![0.3, -0.5], 0.2).encode())?,
            expect: Expectation {
                entropy_transported: Some(true),
                ..both
            },
        },
        "relativistic-uniform" => Case {
            name: "relativistic-uniform",
            summary: "constant timelike momentum in 1 + 3 dimensions",
            model: defaults("relativistic", "")?,
            field: GridField::sample(unit(n, 4)?, 3, |_| {
                RelativisticState::new([1.5, 0.2, -0.1, 0.3], 1.0, 0.1).encode()
            })?,
            expect: Expectation {
                entropy_transported: Some(true),
                ..both
            },
        },
        "maxwell-uniform" => Case {
            name: "maxwell-uniform",
            summary: "constant fields under the Euler-Heisenberg correction",
            model: defaults("maxwell-lorentz", "")?,
            field: GridField::sample(unit(n, 4)?, 2, |_| {
                EMState::new([0.3, -0.2, 0.5], [0.1, 0.4, -0.6]).encode()
            })?,
            expect: both,
        },
        "gas-static-nonuniform" => Case {
            name: "gas-static-nonuniform",
            summary: "rho = 1 + x^2 at rest; row 1 of Div T is 2x(1 + x^2)",
            model: defaults("gas", "")?,
            field: GridField::sample(unit(n, 2)?, 1, |y| GasState::new(1.0 + y[1] * y[1], vec![0.0], 0.0).encode())?,
            expect: Expectation {
                closed: true,
                divergence_free: false,
                entropy_transported: Some(true),
            },
        },
        "entropy-advected" => Case {
            name: "entropy-advected",
            summary: "contact wave at speed 0.7: rho(x - 0.7 t) with s chosen to keep p constant",
            model: defaults("gas", "")?,
            field: GridField::sample(unit(n, 2)?, 1, |y| {
                let rho = 1.0 + 0.5 * (2.0 * (y[1] - ADVECTION_SPEED * y[0])).sin();
                // p = exp(s) rho^2 / 2 = 1
                let s = (2.0 / (rho * rho)).ln();
                GasState::new(rho, vec![ADVECTION_SPEED * rho], s).encode()
            })?,
            expect: Expectation {
                entropy_transported: Some(true),
                ..both
            },
        },
        "entropy-counterexample" => Case {
            name: "entropy-counterexample",
            summary: "m = (1, 1) with s = x, so m . grad s = 1",
            model: defaults("gas", "")?,
            field: GridField::sample(unit(n, 2)?, 1, |y| GasState::new(1.0, vec![1.0], y[1]).encode())?,
            expect: Expectation {
                closed: true,
                divergence_free: false,
                entropy_transported: Some(false),
            },
        },
        "exact-form" => Case {
            name: "exact-form",
            summary: "gradient of x0^2 x1 + x1 x2^2 + x0 x1 x2",
            model: defaults("iso-p1", "")?,
            field: GridField::sample(unit(n, 3)?, 1, |y| {
                let (a, b, c) = (y[0], y[1], y[2]);
                PFormValue::from_coeffs(3, 1, vec![2.0 * a * b + b * c, a * a + c * c + a * c, 2.0 * b * c + a * b])
                    .expect("layout")
            })?,
            expect: Expectation {
                closed: true,
                divergence_free: false,
                entropy_transported: None,
            },
        },
        "non-closed-form" => Case {
            name: "non-closed-form",
            summary: "(x1, -x0, 0), whose exterior derivative is constant",
            model: defaults("iso-p1", "")?,
            field: GridField::sample(unit(n, 3)?, 1, |y| {
                PFormValue::from_coeffs(3, 1, vec![y[1], -y[0], 0.0]).expect("layout")
            })?,
            expect: Expectation {
                closed: false,
                divergence_free: false,
                entropy_transported: None,
            },
        },
        other => return Err(Error::Input(format!("unknown case `{other}`; known: {}", CASE_NAMES.join(", ")))),
    };
    Ok(out)
}

/// Potential flow `psi = phi(x) - E t` on `[0, 1]^(1+n)` with `rho` solving
/// `dg/drho = E - |grad phi|^2 / 2` for the `gamma = 2` polytropic gas.
pub struct BernoulliCase {
    pub energy: InternalEnergy,
    pub psi: ScalarGrid,
    pub rho: ScalarGrid,
    pub entropy: ScalarGrid,
}

pub fn bernoulli_case(space_dim: usize, n: usize) -> Result<BernoulliCase> {
    let spec = unit(n, 1 + space_dim)?;
    let total = 4.0;
    let s0: f64 = 0.1;
    let phi = |x: &[f64]| -> f64 {
        0.4 * x[0] + 0.5 * x.iter().enumerate().map(|(k, v)| (k as f64 - 0.5) * v * v).sum::<f64>()
    };
    let grad2 = |x: &[f64]| -> f64 {
        x.iter()
            .enumerate()
            .map(|(k, v)| (if k == 0 { 0.4 } else { 0.0 } + (k as f64 - 0.5) * v).powi(2))
            .sum()
    };
    let psi = ScalarGrid::sample(spec.clone(), |y| phi(&y[1..]) - total * y[0]);
    // exp(s) rho = E - |v|^2 / 2
    let rho = ScalarGrid::sample(spec.clone(), |y| (total - 0.5 * grad2(&y[1..])) * (-s0).exp());
    Ok(BernoulliCase {
        energy: InternalEnergy::Polytropic { gamma: 2.0 },
        psi,
        rho,
        entropy: ScalarGrid::constant(spec, s0),
    })
}

/// `alpha(y) = alpha_0 + sum_m a_m sin(k_m . y + phi_m)` around a random admissible
/// state, with the amplitude shrunk until the model admits every probe point.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSmoothForm {
    base: PFormValue,
    amplitudes: Vec<Vec<f64>>,
    waves: Vec<(Vec<f64>, f64)>,
    entropy_amplitude: f64,
}

const MODES: usize = 2;

/// Admissible after pullback by every `I +- 0.25 E_ab`, the kind of
/// deformation a flow applies.
fn robustly_admissible(model: &LagrangianModel, alpha: &PFormValue) -> bool {
    let d = model.dim;
    model.admissible(alpha)
        && (0..d * d).all(|k| {
            [0.25, -0.25].iter().all(|&t| {
                let mut m = nalgebra::DMatrix::identity(d, d);
                m[(k / d, k % d)] += t;
                crate::exterior::pullback(&crate::exterior::LinearMap(m), alpha)
                    .is_ok_and(|b| model.admissible(&b))
            })
        })
}

impl RandomSmoothForm {
    pub fn new(model: &LagrangianModel, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = model.dim;
        let base = (0..100)
            .map(|_| model.sample_state(&mut rng))
            .find(|a| robustly_admissible(model, a))
            .ok_or_else(|| Error::Domain(format!("no robust base state for {}", model.name)))?;
        let n = base.coeffs().len();
        let scale = 0.2 * (1.0 + base.norm());
        let waves = (0..MODES)
            .map(|_| {
                let k = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                (k, rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let amplitudes: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..MODES).map(|_| scale * rng.random_range(-1.0..1.0)).collect())
            .collect();
        let entropy_amplitude = if model.uses_entropy() { 0.1 * rng.random_range(-1.0..1.0) } else { 0.0 };
        let probes: Vec<Vec<f64>> = (0..1000).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
        let mut form = RandomSmoothForm {
            base,
            amplitudes,
            waves,
            entropy_amplitude,
        };
        for _ in 0..30 {
            // probing at twice the amplitude leaves room between the samples
            let doubled = form.with_amplitude_factor(2.0);
            if probes.iter().all(|y| model.admissible(&doubled.eval(y))) {
                return Ok(form);
            }
            for row in &mut form.amplitudes {
                row.iter_mut().for_each(|a| *a *= 0.5);
            }
        }
        Err(Error::Domain(format!("no admissible smooth field found for {}", model.name)))
    }

    fn with_amplitude_factor(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.amplitudes {
            row.iter_mut().for_each(|a| *a *= factor);
        }
        out
    }

    pub fn eval(&self, y: &[f64]) -> PFormValue {
        let phases: Vec<f64> = self
            .waves
            .iter()
            .map(|(k, phi)| (k.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + phi).sin())
            .collect();
        let mut out = self.base.clone();
        for (c, amps) in out.coeffs_mut().iter_mut().zip(&self.amplitudes) {
            *c += amps.iter().zip(&phases).map(|(a, s)| a * s).sum::<f64>();
        }
        if let Some(s) = self.base.entropy() {
            out.set_entropy(Some(s + self.entropy_amplitude * phases[0]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::verify::{bernoulli_check, closedness_residual, div_t_residual, entropy_transport_residual};

    #[test]
    fn catalog_expectations_hold() {
        for name in CASE_NAMES {
            let c = case(name, 8).unwrap();
            let closed = closedness_residual(&c.field).unwrap();
            let div = div_t_residual(&c.model, &c.field).unwrap().max;
            assert_eq!(closed < 1e-2, c.expect.closed, "{name}: closedness {closed}");
            assert_eq!(div < 5e-2, c.expect.divergence_free, "{name}: divergence {div}");
            if let Some(t) = c.expect.entropy_transported {
                let r = entropy_transport_residual(&c.model, &c.field).unwrap().residual;
                assert_eq!(r < 5e-2, t, "{name}: transport {r}");
            }
        }
    }

    #[test]
    fn static_gas_divergence_is_exact_up_to_h2() {
        let c = case("gas-static-nonuniform", 16).unwrap();
        let div = div_t_residual(&c.model, &c.field).unwrap();
        assert!(div.rows[0] < 1e-13);
        // 2x(1 + x^2) peaks at the last interior sample x = 15/16
        let x = 15.0 / 16.0;
        assert!((div.rows[1] - 2.0 * x * (1.0 + x * x)).abs() < 1e-2);
    }

    #[test]
    fn bernoulli_manufactured_is_exact() {
        let b = bernoulli_case(2, 6).unwrap();
        let r = bernoulli_check(&b.energy, &b.psi, &b.rho, Some(&b.entropy)).unwrap();
        assert!(r.bernoulli < 1e-12, "{}", r.bernoulli);
        assert!(r.curl.unwrap() < 1e-12);
    }

    #[test]
    fn random_smooth_forms_are_admissible() {
        for name in ["gas", "relativistic", "maxwell-lorentz", "minimal-surface"] {
            let model = defaults(name, "").unwrap();
            let form = RandomSmoothForm::new(&model, 3).unwrap();
            let y = vec![0.25; model.dim];
            assert!(model.admissible(&form.eval(&y)), "{name}");
        }
    }

    #[test]
    fn unknown_case() {
        assert!(matches!(case("nope", 4), Err(Error::Input(_))));
    }
}
