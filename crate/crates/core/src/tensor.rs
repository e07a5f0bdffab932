//! Assembly of the divergence-free tensor `T` and its symmetrized variants.
//!
//! See [`crate::conventions`] for how `T` relates to other printed forms.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{binomial, enumerate_subsets, subset_rank, PFormValue};
use crate::models::maxwell::{cross, dot};
use crate::models::{encoding, EMState, GasDynamics, GasState, LagrangianModel, Maxwell};
use crate::models::{RelativisticGas, RelativisticState};

/// A `d x d` tensor with an optional attached metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorValue {
    #[serde(serialize_with = "serialize_rows")]
    pub entries: DMatrix<f64>,
    #[serde(serialize_with = "serialize_opt_rows")]
    pub metric: Option<DMatrix<f64>>,
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    rows_of(m).serialize(s)
}

fn serialize_opt_rows<S: serde::Serializer>(
    m: &Option<DMatrix<f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(rows_of).serialize(s)
}

impl TensorValue {
    pub fn new(entries: DMatrix<f64>) -> Self {
        TensorValue {
            entries,
            metric: None,
        }
    }

    pub fn with_metric(mut self, s: Option<DMatrix<f64>>) -> Self {
        self.metric = s;
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        rows_of(&self.entries)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    /// `S^{-1} T` for the attached metric.
    pub fn symmetrized(&self) -> Result<Option<DMatrix<f64>>> {
        match &self.metric {
            None => Ok(None),
            Some(s) => Ok(Some(metric_inverse(s)? * &self.entries)),
        }
    }
}

/// For each `(p-1)`-tuple `K` and axis `i`, the storage slot and sign of `A_{iK}`.
#[derive(Clone, Debug)]
pub struct Incidence {
    dim: usize,
    degree: usize,
    /// `rows[k][i] = Some((slot, sign))` when `i` is not in `K_k`.
    rows: Vec<Vec<Option<(usize, f64)>>>,
}

impl Incidence {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if degree > dim {
            return Err(Error::InvalidLayout { d: dim, p: degree });
        }
        if degree == 0 {
            return Ok(Incidence {
                dim,
                degree,
                rows: Vec::new(),
            });
        }
        let rows = enumerate_subsets(dim, degree - 1)
            .into_iter()
            .map(|k| {
                (0..dim)
                    .map(|i| {
                        if k.contains(i) {
                            return None;
                        }
                        let before = k.entries().iter().filter(|&&x| x < i).count();
                        let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
                        let slot = subset_rank(dim, k.insert_sorted(i).entries());
                        Some((slot, sign))
                    })
                    .collect()
            })
            .collect();
        Ok(Incidence { dim, degree, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `L delta_ij - sum_K A_{iK} g_{jK}` from raw coefficients and gradient.
    pub fn tensor(&self, l: f64, a: &[f64], g: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let mut t = DMatrix::from_diagonal_element(d, d, l);
        for row in &self.rows {
            for i in 0..d {
                let Some((si, ei)) = row[i] else { continue };
                let ai = ei * a[si];
                if ai == 0.0 {
                    continue;
                }
                for j in 0..d {
                    if let Some((sj, ej)) = row[j] {
                        t[(i, j)] -= ai * ej * g[sj];
                    }
                }
            }
        }
        t
    }
}

/// `T` for any model, read off its coefficient gradient.
pub fn assemble_general(model: &LagrangianModel, alpha: &PFormValue) -> Result<TensorValue> {
    let inc = Incidence::new(model.dim, model.degree)?;
    assemble_with(&inc, model, alpha)
}

/// [`assemble_general`] with a precomputed [`Incidence`].
pub fn assemble_with(inc: &Incidence, model: &LagrangianModel, alpha: &PFormValue) -> Result<TensorValue> {
    if inc.dim != model.dim || inc.degree != model.degree {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: inc.dim,
        });
    }
    let l = model.evaluate(alpha)?;
    let g = model.gradient(alpha)?;
    Ok(TensorValue::new(inc.tensor(l, alpha.coeffs(), &g)).with_metric(model.metric_hint.clone()))
}

/// `T = dL/dm (x) m + (L - m.dL/dm) I` for a model of an `(d-1)`-form.
pub fn assemble_nform(model: &LagrangianModel, m: &[f64], s: Option<f64>) -> Result<TensorValue> {
    let d = m.len();
    if model.dim != d || model.degree + 1 != d {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: d,
        });
    }
    let mut alpha = encoding::encode_nform(m);
    alpha.set_entropy(s);
    let l = model.evaluate(&alpha)?;
    let dl_dm = encoding::decode_nform(&model.gradient(&alpha)?);
    Ok(TensorValue::new(nform_tensor(l, m, &dl_dm)).with_metric(model.metric_hint.clone()))
}

fn nform_tensor(l: f64, m: &[f64], dl_dm: &[f64]) -> DMatrix<f64> {
    let d = m.len();
    let scalar = l - m.iter().zip(dl_dm).map(|(a, b)| a * b).sum::<f64>();
    DMatrix::from_fn(d, d, |i, j| dl_dm[i] * m[j] + if i == j { scalar } else { 0.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasTensor {
    pub t: TensorValue,
    /// `T` with its first row replaced by `m = (rho, q)`.
    pub t_prime: TensorValue,
    pub pressure: f64,
}

/// Block form of the classical gas tensor.
pub fn assemble_gas(gas: &GasDynamics, state: &GasState) -> Result<GasTensor> {
    state.validate()?;
    let n = gas.n;
    if state.q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.q.len(),
        });
    }
    let (rho, q, s) = (state.rho, &state.q, state.s);
    let q2: f64 = q.iter().map(|x| x * x).sum();
    let g = gas.energy.value(rho, s);
    let g_rho = gas.energy.d_rho(rho, s);
    let p = rho * g_rho - g;
    let top = -q2 / (2.0 * rho * rho) - g_rho;
    let mut t = DMatrix::zeros(n + 1, n + 1);
    t[(0, 0)] = -q2 / (2.0 * rho) - g;
    for j in 0..n {
        t[(0, j + 1)] = top * q[j];
        t[(j + 1, 0)] = q[j];
        for i in 0..n {
            t[(i + 1, j + 1)] = q[i] * q[j] / rho + if i == j { p } else { 0.0 };
        }
    }
    let mut tp = t.clone();
    tp[(0, 0)] = rho;
    for j in 0..n {
        tp[(0, j + 1)] = q[j];
    }
    Ok(GasTensor {
        t: TensorValue::new(t),
        t_prime: TensorValue::new(tp),
        pressure: p,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativisticTensor {
    pub t: TensorValue,
    /// `-Lambda^{-1} T = rho L_rho u (x) u + (rho L_rho - L) Lambda^{-1}`.
    pub t_prime: TensorValue,
    /// `(e c^2 + p) u (x) u + p Lambda^{-1}`.
    pub t_prime_fluid: DMatrix<f64>,
    /// Max-norm gap between the two forms of `T'`.
    pub forms_gap: f64,
    pub energy_density: f64,
    pub pressure: f64,
}

/// Both forms of the relativistic tensor, checked against each other.
pub fn assemble_relativistic(gas: &RelativisticGas, state: &RelativisticState) -> Result<RelativisticTensor> {
    state.validate()?;
    if (state.c - gas.c).abs() > 0.0 {
        return Err(Error::Input(format!(
            "state light speed {} differs from the model's {}",
            state.c, gas.c
        )));
    }
    let rho = state.rho();
    let u = state.velocity();
    let l = gas.lagrangian(state);
    let rl = rho * gas.law.d_rho(rho, state.s);
    let lambda = gas.lambda();
    let lambda_inv = DMatrix::from_diagonal(&lambda.diagonal().map(|x| 1.0 / x));
    let t = DMatrix::from_fn(4, 4, |i, j| {
        -rl * lambda[(i, i)] * u[i] * u[j] + if i == j { l - rl } else { 0.0 }
    });
    let uu = DMatrix::from_fn(4, 4, |i, j| u[i] * u[j]);
    let t_prime = &uu * rl + &lambda_inv * (rl - l);
    let e = gas.energy_density(state);
    let p = gas.pressure(state);
    let c2 = gas.c * gas.c;
    let fluid = &uu * (e * c2 + p) + &lambda_inv * p;
    let forms_gap = (&t_prime - &fluid).amax();
    Ok(RelativisticTensor {
        t: TensorValue::new(t).with_metric(Some(lambda)),
        t_prime: TensorValue::new(t_prime),
        t_prime_fluid: fluid,
        forms_gap,
        energy_density: e,
        pressure: p,
    })
}

/// `rho L_rho [[c^2 u0^2, c^2 u0 v^T], [-u0 v, -v (x) v]] + (L - rho L_rho) I`,
/// with `v` the spatial part of `u`.
pub fn relativistic_block_display(gas: &RelativisticGas, state: &RelativisticState) -> Result<DMatrix<f64>> {
    state.validate()?;
    let rho = state.rho();
    let u = state.velocity();
    let rl = rho * gas.law.d_rho(rho, state.s);
    let l = gas.lagrangian(state);
    let c2 = gas.c * gas.c;
    Ok(DMatrix::from_fn(4, 4, |i, j| {
        let block = match (i, j) {
            (0, 0) => c2 * u[0] * u[0],
            (0, _) => c2 * u[0] * u[j],
            (_, 0) => -u[0] * u[i],
            _ => -u[i] * u[j],
        };
        rl * block + if i == j { l - rl } else { 0.0 }
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellTensor {
    pub t: TensorValue,
    /// `diag(-1, 1, 1, 1) T`.
    pub t_tilde: TensorValue,
    pub energy_density: f64,
    pub poynting: [f64; 3],
}

/// `T = [[L - E.D, H x E], [D x B, (L + B.H) I - E (x) D - H (x) B]]`.
pub fn assemble_maxwell(model: &Maxwell, state: &EMState) -> Result<MaxwellTensor> {
    let l = model.lagrangian(state);
    let c = model.constitutive(state);
    let (e, b, d, h) = (state.e, state.b, c.d, c.h);
    let mut t = DMatrix::zeros(4, 4);
    t[(0, 0)] = l - dot(e, d);
    let hxe = cross(h, e);
    let dxb = cross(d, b);
    let diag = l + dot(b, h);
    for i in 0..3 {
        t[(0, i + 1)] = hxe[i];
        t[(i + 1, 0)] = dxb[i];
        for j in 0..3 {
            t[(i + 1, j + 1)] = if i == j { diag } else { 0.0 } - e[i] * d[j] - h[i] * b[j];
        }
    }
    let eta = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
    let t_tilde = &eta * &t;
    Ok(MaxwellTensor {
        t: TensorValue::new(t).with_metric(Some(eta)),
        t_tilde: TensorValue::new(t_tilde),
        energy_density: model.energy_density(state),
        poynting: model.poynting(state),
    })
}

/// Inverse of a symmetric non-degenerate metric.
pub fn metric_inverse(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !s.is_square() {
        return Err(Error::SingularMetric);
    }
    let scale = s.amax().max(1.0);
    if (s - s.transpose()).amax() > 1e-14 * scale {
        return Err(Error::SingularMetric);
    }
    let inv = s.clone().try_inverse().ok_or(Error::SingularMetric)?;
    if !inv.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularMetric);
    }
    Ok(inv)
}

/// `max |S^{-1} T - (S^{-1} T)^T|`.
pub fn symmetry_defect(t: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<f64> {
    if s.nrows() != t.nrows() {
        return Err(Error::DimensionMismatch {
            expected: t.nrows(),
            got: s.nrows(),
        });
    }
    let st = metric_inverse(s)? * t;
    Ok((&st - st.transpose()).amax())
}

/// Number of `(p-1)`-tuples summed over per entry.
pub fn terms_per_entry(dim: usize, degree: usize) -> usize {
    if degree == 0 {
        0
    } else {
        binomial(dim, degree - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gas1() -> GasDynamics {
        GasDynamics::new(1, InternalEnergy::Polytropic { gamma: 2.0 })
    }

    #[test]
    fn constant_density_gives_scalar_tensor() {
        let e = crate::expr::ExprDensity::parse("2.5", 3, 2).unwrap();
        let m = LagrangianModel::expression(e);
        let alpha = PFormValue::from_coeffs(3, 2, vec![1.0, -2.0, 0.5]).unwrap();
        let t = assemble_general(&m, &alpha).unwrap();
        assert_eq!(t.entries, DMatrix::from_diagonal_element(3, 3, 2.5));
    }

    #[test]
    fn gas_hand_values() {
        let expected = DMatrix::from_row_slice(2, 2, &[-1.0, -1.5, 1.0, 1.5]);
        let st = GasState::new(1.0, vec![1.0], 0.0);
        let model = LagrangianModel::gas(gas1());
        let general = assemble_general(&model, &st.encode()).unwrap();
        assert!((&general.entries - &expected).amax() < 1e-15);
        let nform = assemble_nform(&model, &[1.0, 1.0], Some(0.0)).unwrap();
        assert!((&nform.entries - &expected).amax() < 1e-15);
        let block = assemble_gas(&gas1(), &st).unwrap();
        assert!((&block.t.entries - &expected).amax() < 1e-15);
        let tp = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.5]);
        assert!((&block.t_prime.entries - &tp).amax() < 1e-15);
    }

    #[test]
    fn static_gas_is_diagonal() {
        let gas = GasDynamics::new(2, InternalEnergy::Polytropic { gamma: 1.4 });
        let st = GasState::new(1.7, vec![0.0, 0.0], 0.3);
        let out = assemble_gas(&gas, &st).unwrap();
        let g = gas.energy.value(1.7, 0.3);
        let p = gas.pressure(&st);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-g, p, p]));
        assert!((&out.t.entries - &d).amax() < 1e-14);
    }

    #[test]
    fn maxwell_hand_values() {
        let m = Maxwell::new(MaxwellLaw::Linear);
        let st = EMState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let out = assemble_maxwell(&m, &st).unwrap();
        assert_eq!(out.t.entries[(0, 0)], -1.0);
        assert_eq!(
            [out.t.entries[(0, 1)], out.t.entries[(0, 2)], out.t.entries[(0, 3)]],
            [0.0, 0.0, -1.0]
        );
        let zero = EMState::new([0.0; 3], [0.0; 3]);
        let out = assemble_maxwell(&m, &zero).unwrap();
        assert_eq!(out.t.entries, DMatrix::zeros(4, 4));
    }

    #[test]
    fn general_matches_specializations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mx = LagrangianModel::maxwell(Maxwell::new(MaxwellLaw::EulerHeisenberg { coupling: 0.2 }));
        let rel = LagrangianModel::relativistic(RelativisticGas::new(1.3, DensityLaw::TwoTerm { kappa: 1.7 }));
        for _ in 0..20 {
            let a = mx.sample_state(&mut rng);
            let st = EMState::decode(&a).unwrap();
            let g = assemble_general(&mx, &a).unwrap().entries;
            let b = assemble_maxwell(mx.as_maxwell().unwrap(), &st).unwrap().t.entries;
            assert!((&g - &b).amax() < 1e-12 * (1.0 + b.amax()));

            let a = rel.sample_state(&mut rng);
            let st = RelativisticState::decode(&a, 1.3).unwrap();
            let g = assemble_general(&rel, &a).unwrap().entries;
            let out = assemble_relativistic(rel.as_relativistic().unwrap(), &st).unwrap();
            assert!((&g - &out.t.entries).amax() < 1e-12 * (1.0 + g.amax()));
            assert!(out.forms_gap < 1e-12 * (1.0 + g.amax()));
            let blocks = relativistic_block_display(rel.as_relativistic().unwrap(), &st).unwrap();
            assert!((&g - &blocks).amax() < 1e-12 * (1.0 + g.amax()));
        }
    }

    #[test]
    fn isotropic_matches_gradient_display() {
        let model = LagrangianModel::isotropic(Isotropic::new(3, IsoProfile::MinimalSurface));
        let alpha = PFormValue::from_coeffs(3, 1, vec![0.3, -1.2, 0.8]).unwrap();
        let t = assemble_general(&model, &alpha).unwrap().entries;
        let l = model.evaluate(&alpha).unwrap();
        let g = model.gradient(&alpha).unwrap();
        let display = crate::conventions::gradient_display(alpha.coeffs(), &g, l);
        assert!((crate::conventions::from_gradient_display(&display) - t).amax() < 1e-15);
    }

    #[test]
    fn singular_metric_is_rejected() {
        let t = DMatrix::identity(2, 2);
        assert!(matches!(
            symmetry_defect(&t, &DMatrix::zeros(2, 2)),
            Err(Error::SingularMetric)
        ));
    }

    #[test]
    fn anisotropic_maxwell_is_not_symmetric() {
        let m = Maxwell::new(MaxwellLaw::Anisotropic);
        let st = EMState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let out = assemble_maxwell(&m, &st).unwrap();
        let defect = symmetry_defect(&out.t.entries, &minkowski(1.0)).unwrap();
        assert!(defect > 0.1, "{defect}");
    }
}
