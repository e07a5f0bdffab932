//! Orthogonal invariance of a density versus symmetry of `S^{-1} T`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{binomial, compound_matrix, infinitesimal_pullback, pullback, LinearMap, PFormValue};
use crate::models::{LagrangianModel, Polynomial};
use crate::tensor::{assemble_with, metric_inverse, symmetry_defect, Incidence};

/// Below this a defect counts as zero.
pub const INVARIANT_TOL: f64 = 1e-10;
/// Above this a defect counts as a genuine violation.
pub const VIOLATION_TOL: f64 = 1e-2;

/// A symmetric non-degenerate `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSignature {
    s: DMatrix<f64>,
    s_inv: DMatrix<f64>,
}

impl MetricSignature {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        let s_inv = metric_inverse(&s)?;
        Ok(MetricSignature { s, s_inv })
    }

    pub fn euclidean(d: usize) -> Self {
        MetricSignature::new(DMatrix::identity(d, d)).expect("identity")
    }

    /// `diag(-c^2, 1, ..., 1)`.
    pub fn minkowski(d: usize, c: f64) -> Result<Self> {
        let mut diag = vec![1.0; d];
        diag[0] = -c * c;
        MetricSignature::new(DMatrix::from_diagonal(&DVector::from_vec(diag)))
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.s_inv
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        MetricSignature::new(&self.s * factor)
    }
}

/// Basis of `{N : N^T S + S N = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraBasis {
    pub generators: Vec<DMatrix<f64>>,
    /// `(a, b)` with `a < b` for each generator.
    pub labels: Vec<(usize, usize)>,
}

impl LieAlgebraBasis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `max |N^T S + S N|` over the basis.
    pub fn constraint_residual(&self, metric: &MetricSignature) -> f64 {
        let s = metric.matrix();
        self.generators
            .iter()
            .map(|n| (n.transpose() * s + s * n).amax())
            .fold(0.0, f64::max)
    }

    /// Coordinates of an algebra element: `(S X)_{ab}` scaled to the normalized generators.
    pub fn coordinates(&self, metric: &MetricSignature, x: &DMatrix<f64>) -> Vec<f64> {
        let sx = metric.matrix() * x;
        self.labels
            .iter()
            .zip(&self.generators)
            .map(|(&(a, b), n)| {
                let sn = metric.matrix() * n;
                sx[(a, b)] / sn[(a, b)]
            })
            .collect()
    }

    /// Largest distance from a commutator `[N_a, N_b]` to its projection on the span.
    pub fn closure_residual(&self, metric: &MetricSignature) -> f64 {
        let mut worst: f64 = 0.0;
        for x in &self.generators {
            for y in &self.generators {
                let z = x * y - y * x;
                let coords = self.coordinates(metric, &z);
                let mut back = DMatrix::zeros(z.nrows(), z.ncols());
                for (c, n) in coords.iter().zip(&self.generators) {
                    back += n * *c;
                }
                worst = worst.max((&z - back).amax());
            }
        }
        worst
    }
}

/// `N^(ab) = S^{-1} (E_ab - E_ba)` for `a < b`, Frobenius-normalized.
pub fn lie_basis(metric: &MetricSignature) -> LieAlgebraBasis {
    let d = metric.dim();
    let mut generators = Vec::with_capacity(d * (d.saturating_sub(1)) / 2);
    let mut labels = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let mut e = DMatrix::zeros(d, d);
            e[(a, b)] = 1.0;
            e[(b, a)] = -1.0;
            let n = metric.inverse() * e;
            let norm = n.norm();
            generators.push(n / norm);
            labels.push((a, b));
        }
    }
    LieAlgebraBasis { generators, labels }
}

/// Fixed sign patterns `A_J = +-1` (at most 64) that the model admits.
pub fn sign_states(model: &LagrangianModel) -> Vec<PFormValue> {
    let n = model.n_coeffs();
    let count = if n >= 6 { 64 } else { 1usize << n };
    let mut out = Vec::new();
    for mask in 0..count {
        let coeffs: Vec<f64> = (0..n)
            .map(|k| if (mask >> (k % 64)) & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let mut alpha = PFormValue::from_coeffs(model.dim, model.degree, coeffs).expect("layout");
        if model.uses_entropy() {
            alpha.set_entropy(Some(0.1));
        }
        if model.admissible(&alpha) {
            out.push(alpha);
        }
    }
    out
}

/// Sign patterns followed by `n_random` seeded random admissible states.
pub fn sample_states(model: &LagrangianModel, n_random: usize, seed: u64) -> Vec<PFormValue> {
    let mut states = sign_states(model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        states.push(model.sample_state(&mut rng));
    }
    states
}

/// `|d/dt L((e^{tN})^* alpha)|_{t=0}| / (|dL/dA| |alpha|)`.
pub fn invariance_derivative(model: &LagrangianModel, n: &DMatrix<f64>, alpha: &PFormValue) -> Result<f64> {
    let g = model.gradient(alpha)?;
    let da = infinitesimal_pullback(n, alpha)?;
    let num: f64 = g.iter().zip(da.coeffs()).map(|(x, y)| x * y).sum();
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let denom = gnorm * alpha.norm();
    Ok(if denom > 0.0 { num.abs() / denom } else { num.abs() })
}

/// Worst normalized invariance derivative over the basis and the given states.
pub fn invariance_defect_on(model: &LagrangianModel, metric: &MetricSignature, states: &[PFormValue]) -> Result<f64> {
    check_metric(model, metric)?;
    let basis = lie_basis(metric);
    let mut worst: f64 = 0.0;
    for alpha in states {
        for n in &basis.generators {
            worst = worst.max(invariance_derivative(model, n, alpha)?);
        }
    }
    Ok(worst)
}

/// [`invariance_defect_on`] over sign patterns plus 100 random states.
pub fn invariance_defect(model: &LagrangianModel, metric: &MetricSignature, seed: u64) -> Result<f64> {
    invariance_defect_on(model, metric, &sample_states(model, 100, seed))
}

/// Worst `|S^{-1} T - (S^{-1} T)^T|` over the given states.
pub fn symmetry_defect_on(model: &LagrangianModel, metric: &MetricSignature, states: &[PFormValue]) -> Result<f64> {
    check_metric(model, metric)?;
    let inc = Incidence::new(model.dim, model.degree)?;
    let mut worst: f64 = 0.0;
    for alpha in states {
        let t = assemble_with(&inc, model, alpha)?;
        worst = worst.max(symmetry_defect(&t.entries, metric.matrix())?);
    }
    Ok(worst)
}

/// `max |Tr(S^{-1} A (L I - T^T))|` over the skew basis `A = E_ab - E_ba`.
pub fn trace_identity(model: &LagrangianModel, metric: &MetricSignature, alpha: &PFormValue) -> Result<f64> {
    check_metric(model, metric)?;
    let d = model.dim;
    let t = crate::tensor::assemble_general(model, alpha)?.entries;
    let l = model.evaluate(alpha)?;
    let x = DMatrix::from_diagonal_element(d, d, l) - t.transpose();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in a + 1..d {
            let mut skew = DMatrix::zeros(d, d);
            skew[(a, b)] = 1.0;
            skew[(b, a)] = -1.0;
            worst = worst.max((metric.inverse() * skew * &x).trace().abs());
        }
    }
    Ok(worst)
}

/// `|L(M^* alpha) - L(alpha)|`.
pub fn pullback_change(model: &LagrangianModel, m: &LinearMap, alpha: &PFormValue) -> Result<f64> {
    let moved = pullback(m, alpha)?;
    Ok((model.evaluate(&moved)? - model.evaluate(alpha)?).abs())
}

fn check_metric(model: &LagrangianModel, metric: &MetricSignature) -> Result<()> {
    if metric.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: metric.dim(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Zero,
    Violated,
    Inconclusive,
}

impl Classification {
    pub fn of(defect: f64) -> Self {
        if defect <= INVARIANT_TOL {
            Classification::Zero
        } else if defect >= VIOLATION_TOL {
            Classification::Violated
        } else {
            Classification::Inconclusive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub invariance_defect: f64,
    pub symmetry_defect: f64,
    pub verdict: String,
    pub agree: bool,
    pub seed: u64,
    pub n_states: usize,
}

impl EquivalenceReport {
    pub fn invariance(&self) -> Classification {
        Classification::of(self.invariance_defect)
    }

    pub fn symmetry(&self) -> Classification {
        Classification::of(self.symmetry_defect)
    }
}

/// Both sides of the equivalence, measured on the same states.
pub fn equivalence_check(model: &LagrangianModel, metric: &MetricSignature, n_states: usize, seed: u64) -> Result<EquivalenceReport> {
    let states = sample_states(model, n_states, seed);
    equivalence_on(model, metric, &states, seed)
}

pub fn equivalence_on(model: &LagrangianModel, metric: &MetricSignature, states: &[PFormValue], seed: u64) -> Result<EquivalenceReport> {
    let inv = invariance_defect_on(model, metric, states)?;
    let sym = symmetry_defect_on(model, metric, states)?;
    let (ci, cs) = (Classification::of(inv), Classification::of(sym));
    let verdict = match (ci, cs) {
        (Classification::Zero, Classification::Zero) => "invariant & symmetric",
        (Classification::Violated, Classification::Violated) => "not invariant & not symmetric",
        (Classification::Inconclusive, _) | (_, Classification::Inconclusive) => "inconclusive",
        (Classification::Zero, Classification::Violated) => "invariant but not symmetric",
        (Classification::Violated, Classification::Zero) => "symmetric but not invariant",
    };
    Ok(EquivalenceReport {
        invariance_defect: inv,
        symmetry_defect: sym,
        verdict: verdict.to_string(),
        agree: ci == cs && ci != Classification::Inconclusive,
        seed,
        n_states: states.len(),
    })
}

/// Pfaffian of a 2-form on `R^4` as a symmetric quadratic form on the coefficients.
pub fn pfaffian_form() -> DMatrix<f64> {
    // pf = a01 a23 - a02 a13 + a03 a12 in storage slots 0..6
    let mut q = DMatrix::zeros(6, 6);
    for (i, j, v) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
        q[(i, j)] = v;
        q[(j, i)] = v;
    }
    q
}

/// `c A^T C_p(S^{-1}) A` (plus a Pfaffian term for 2-forms on `R^4`), invariant under
/// the neutral component of `O(S)`; with `perturb`, a generic symmetric term is added.
pub fn random_quadratic<R: Rng + ?Sized>(
    metric: &MetricSignature,
    degree: usize,
    perturb: bool,
    rng: &mut R,
) -> Result<LagrangianModel> {
    let d = metric.dim();
    let n = binomial(d, degree);
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let induced = compound_matrix(&LinearMap(metric.inverse().clone()), degree);
    let mut q = induced * (1.0 + normal().abs());
    if d == 4 && degree == 2 {
        q += pfaffian_form() * normal();
    }
    if perturb {
        let r = DMatrix::from_fn(n, n, |_, _| normal());
        q += (&r + r.transpose()) * 0.5;
    }
    let poly = Polynomial::quadratic_form(q);
    Ok(LagrangianModel::polynomial(d, degree, poly)?
        .named(if perturb { "quadratic-generic" } else { "quadratic-invariant" })
        .with_metric_hint(Some(metric.matrix().clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::registry::{build, ModelParams};

    #[test]
    fn basis_counts_and_constraint() {
        let e3 = MetricSignature::euclidean(3);
        let b = lie_basis(&e3);
        assert_eq!(b.len(), 3);
        for n in &b.generators {
            assert!((n + n.transpose()).amax() < 1e-15);
        }
        let m = MetricSignature::minkowski(4, 1.7).unwrap();
        let b = lie_basis(&m);
        assert_eq!(b.len(), 6);
        assert!(b.constraint_residual(&m) < 1e-13);
        assert!(b.closure_residual(&m) < 1e-10);
    }

    #[test]
    fn hyperbolic_boost_in_two_dimensions() {
        let m = MetricSignature::minkowski(2, 1.0).unwrap();
        let b = lie_basis(&m);
        assert_eq!(b.len(), 1);
        let n = &b.generators[0];
        assert!((n[(0, 1)] - n[(1, 0)]).abs() < 1e-15);
        assert_eq!(n[(0, 0)], 0.0);
        assert!(n[(0, 1)].abs() > 0.5);
    }

    #[test]
    fn singular_metric() {
        assert!(MetricSignature::new(DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn isotropic_is_rotation_invariant() {
        let model = build("iso-p1", &ModelParams::default()).unwrap();
        let report = equivalence_check(&model, &MetricSignature::euclidean(3), 50, 1).unwrap();
        assert!(report.agree, "{report:?}");
        assert_eq!(report.invariance(), Classification::Zero);
    }

    #[test]
    fn anisotropic_maxwell_witness() {
        let model = build("maxwell-anisotropic", &ModelParams::default()).unwrap();
        let metric = MetricSignature::minkowski(4, 1.0).unwrap();
        let bare = crate::models::EMState::new([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]).encode();
        assert!(invariance_defect_on(&model, &metric, &[bare]).unwrap() < 1e-15);
        let witness = crate::models::EMState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).encode();
        assert!(invariance_defect_on(&model, &metric, std::slice::from_ref(&witness)).unwrap() > 1e-2);
        assert!(symmetry_defect_on(&model, &metric, &[witness]).unwrap() > 1e-2);
    }

    #[test]
    fn random_quadratics_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let metric = MetricSignature::minkowski(4, 1.0).unwrap();
        for degree in 1..4 {
            for perturb in [false, true] {
                let model = random_quadratic(&metric, degree, perturb, &mut rng).unwrap();
                let r = equivalence_check(&model, &metric, 30, 9).unwrap();
                assert!(r.agree, "p = {degree}, perturb = {perturb}: {r:?}");
                assert_eq!(r.invariance() == Classification::Zero, !perturb);
            }
        }
    }
}
