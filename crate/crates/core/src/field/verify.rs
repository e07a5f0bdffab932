//! Discrete checks on sampled fields. All derivatives are second-order central
//! differences; residual maxima run over interior samples only.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{FieldSource, GridSpec, ScalarGrid};
use crate::error::{Error, Result};
use crate::exterior::{enumerate_subsets, pullback, subset_rank, LinearMap, PFormValue};
use crate::models::{encoding, DensityLaw, InternalEnergy, LagrangianModel, RelativisticGas};
use crate::tensor::{assemble_general, assemble_with, Incidence};

/// Center values and central differences of a vector quantity at one interior sample.
pub struct Stencil<'a> {
    pub index: &'a [usize],
    pub point: &'a [f64],
    pub center: &'a [f64],
    grad: &'a [f64],
    width: usize,
}

impl Stencil<'_> {
    /// Central difference of component `comp` along `axis`.
    pub fn d(&self, axis: usize, comp: usize) -> f64 {
        self.grad[axis * self.width + comp]
    }
}

/// Evaluates `compute` once per sample, streaming three slabs along axis 0, and
/// calls `visit` at every interior sample.
pub fn stream_interior<C, V>(spec: &GridSpec, width: usize, mut compute: C, mut visit: V) -> Result<()>
where
    C: FnMut(&[usize], &[f64], &mut [f64]) -> Result<()>,
    V: FnMut(&Stencil) -> Result<()>,
{
    spec.require_stencil()?;
    let d = spec.dim();
    let dims = spec.dims();
    let h = spec.spacing();
    let slab_len: usize = dims[1..].iter().product();
    let strides: Vec<usize> = (0..d).map(|k| dims[k + 1..].iter().product()).collect();
    let mut idx = vec![0; d];
    let mut fill = |i0: usize, buf: &mut Vec<f64>| -> Result<()> {
        let mut idx = vec![0; d];
        for r in 0..slab_len {
            spec.unflat(i0 * slab_len + r, &mut idx);
            let point = spec.point(&idx);
            compute(&idx, &point, &mut buf[r * width..(r + 1) * width])?;
        }
        Ok(())
    };
    let mut prev = vec![0.0; slab_len * width];
    let mut cur = vec![0.0; slab_len * width];
    let mut next = vec![0.0; slab_len * width];
    fill(0, &mut prev)?;
    fill(1, &mut cur)?;
    let mut grad = vec![0.0; d * width];
    for i0 in 1..dims[0] - 1 {
        fill(i0 + 1, &mut next)?;
        'cells: for r in 0..slab_len {
            spec.unflat(i0 * slab_len + r, &mut idx);
            for k in 1..d {
                if idx[k] == 0 || idx[k] + 1 == dims[k] {
                    continue 'cells;
                }
            }
            for c in 0..width {
                grad[c] = (next[r * width + c] - prev[r * width + c]) / (2.0 * h[0]);
            }
            for k in 1..d {
                let (up, down) = (r + strides[k], r - strides[k]);
                for c in 0..width {
                    grad[k * width + c] = (cur[up * width + c] - cur[down * width + c]) / (2.0 * h[k]);
                }
            }
            let point = spec.point(&idx);
            visit(&Stencil {
                index: &idx,
                point: &point,
                center: &cur[r * width..(r + 1) * width],
                grad: &grad,
                width,
            })?;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(())
}

/// `max |(d alpha)_J'|` over interior samples and `(p+1)`-tuples `J'`.
pub fn closedness_residual<S: FieldSource + ?Sized>(src: &S) -> Result<f64> {
    let spec = src.spec();
    spec.require_stencil()?;
    let (d, p) = (src.dim(), src.degree());
    if p >= d {
        return Ok(0.0);
    }
    // (axis, slot of J' minus that axis, sign) for each J'
    let terms: Vec<Vec<(usize, usize, f64)>> = enumerate_subsets(d, p + 1)
        .iter()
        .map(|jp| {
            jp.entries()
                .iter()
                .enumerate()
                .map(|(k, &axis)| {
                    let rest = jp.without(axis);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    (axis, subset_rank(d, rest.entries()), sign)
                })
                .collect()
        })
        .collect();
    let width = crate::exterior::binomial(d, p);
    let mut worst: f64 = 0.0;
    stream_interior(
        spec,
        width,
        |idx, _, out| {
            out.copy_from_slice(src.value_at(idx).coeffs());
            Ok(())
        },
        |st| {
            for comp in &terms {
                let v: f64 = comp.iter().map(|&(axis, slot, sign)| sign * st.d(axis, slot)).sum();
                worst = worst.max(v.abs());
            }
            Ok(())
        },
    )?;
    Ok(worst)
}

/// Per-row maxima of the discrete divergence of a tensor field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceResidual {
    pub rows: Vec<f64>,
    pub max: f64,
    pub interior_samples: usize,
}

/// Discrete `sum_j d_j T_ij` of any per-sample `d x d` tensor.
pub fn divergence_of<S, F>(src: &S, mut tensor: F) -> Result<DivergenceResidual>
where
    S: FieldSource + ?Sized,
    F: FnMut(&PFormValue) -> Result<DMatrix<f64>>,
{
    let d = src.dim();
    let mut rows = vec![0.0f64; d];
    let mut count = 0;
    stream_interior(
        src.spec(),
        d * d,
        |idx, _, out| {
            let t = tensor(&src.value_at(idx))?;
            for i in 0..d {
                for j in 0..d {
                    out[i * d + j] = t[(i, j)];
                }
            }
            Ok(())
        },
        |st| {
            count += 1;
            for (i, row) in rows.iter_mut().enumerate() {
                let v: f64 = (0..d).map(|j| st.d(j, i * d + j)).sum();
                *row = row.max(v.abs());
            }
            Ok(())
        },
    )?;
    let max = rows.iter().copied().fold(0.0, f64::max);
    Ok(DivergenceResidual {
        rows,
        max,
        interior_samples: count,
    })
}

/// Row-wise residual of `Div T = 0` for `T` assembled from `model`.
pub fn div_t_residual<S: FieldSource + ?Sized>(model: &LagrangianModel, src: &S) -> Result<DivergenceResidual> {
    check_source(model, src)?;
    let inc = Incidence::new(model.dim, model.degree)?;
    divergence_of(src, |alpha| Ok(assemble_with(&inc, model, alpha)?.entries))
}

/// `max |(Div T)_0 + d_t W + div(E x H)|` and `max |d_t W + div(E x H)|`
/// for an electromagnetic model, both from the same stencil.
pub fn poynting_consistency<S: FieldSource + ?Sized>(model: &LagrangianModel, src: &S) -> Result<(f64, f64)> {
    check_source(model, src)?;
    let mx = model
        .as_maxwell()
        .ok_or_else(|| Error::Input(format!("{} is not an electromagnetic model", model.name)))?;
    let inc = Incidence::new(4, 2)?;
    let (mut gap, mut poynting): (f64, f64) = (0.0, 0.0);
    stream_interior(
        src.spec(),
        8,
        |idx, _, out| {
            let alpha = src.value_at(idx);
            let t = assemble_with(&inc, model, &alpha)?.entries;
            let st = crate::models::EMState::decode(&alpha)?;
            for j in 0..4 {
                out[j] = t[(0, j)];
            }
            out[4] = mx.energy_density(&st);
            out[5..8].copy_from_slice(&mx.poynting(&st));
            Ok(())
        },
        |st| {
            let div0: f64 = (0..4).map(|j| st.d(j, j)).sum();
            let pw = st.d(0, 4) + (1..4).map(|k| st.d(k, 4 + k)).sum::<f64>();
            gap = gap.max((div0 + pw).abs());
            poynting = poynting.max(pw.abs());
            Ok(())
        },
    )?;
    Ok((gap, poynting))
}

fn check_source<S: FieldSource + ?Sized>(model: &LagrangianModel, src: &S) -> Result<()> {
    if src.dim() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: src.dim(),
        });
    }
    if src.degree() != model.degree {
        return Err(Error::DegreeMismatch {
            expected: model.degree,
            got: src.degree(),
        });
    }
    Ok(())
}

/// `log2(coarse / fine)`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// A compactly supported smooth vector field
/// `xi_i(y) = (a_i + sum_k b_ik (y_k - c_k)) prod_k (1 - u_k^2)^6`, `u_k = (y_k - c_k) / r_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationField {
    spec: GridSpec,
    center: Vec<f64>,
    radius: Vec<f64>,
    amplitude: Vec<f64>,
    slope: DMatrix<f64>,
    samples: Vec<f64>,
}

/// Required zero layer of `xi` at the grid boundary, in samples.
pub const SUPPORT_MARGIN: usize = 2;

fn bump(u: f64) -> (f64, f64) {
    if u.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let w = 1.0 - u * u;
    let w5 = w.powi(5);
    (w5 * w, -12.0 * u * w5)
}

impl VariationField {
    pub fn bump(
        spec: GridSpec,
        center: Vec<f64>,
        radius: Vec<f64>,
        amplitude: Vec<f64>,
        slope: DMatrix<f64>,
    ) -> Result<Self> {
        let d = spec.dim();
        if center.len() != d || radius.len() != d || amplitude.len() != d || slope.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: center.len(),
            });
        }
        let mut xi = VariationField {
            spec,
            center,
            radius,
            amplitude,
            slope,
            samples: Vec::new(),
        };
        xi.resample()?;
        Ok(xi)
    }

    pub fn zero(spec: GridSpec) -> Self {
        let d = spec.dim();
        let n = spec.n_points();
        VariationField {
            center: spec.origin().to_vec(),
            radius: vec![0.0; d],
            amplitude: vec![0.0; d],
            slope: DMatrix::zeros(d, d),
            samples: vec![0.0; n * d],
            spec,
        }
    }

    /// Random amplitude and slope, support radius `0.3` of the extent around its center.
    pub fn random<R: rand::Rng + ?Sized>(spec: GridSpec, rng: &mut R) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        let d = spec.dim();
        let extent: Vec<f64> = (0..d)
            .map(|k| (spec.dims()[k] - 1) as f64 * spec.spacing()[k])
            .collect();
        let center = (0..d).map(|k| spec.origin()[k] + 0.5 * extent[k]).collect();
        let radius = extent.iter().map(|e| 0.3 * e).collect();
        let mut normal = || -> f64 { StandardNormal.sample(rng) };
        let amplitude = (0..d).map(|_| normal()).collect();
        let slope = DMatrix::from_fn(d, d, |_, _| normal());
        VariationField::bump(spec, center, radius, amplitude, slope)
    }

    /// The same analytic field on another grid.
    pub fn on(&self, spec: GridSpec) -> Result<Self> {
        VariationField::bump(
            spec,
            self.center.clone(),
            self.radius.clone(),
            self.amplitude.clone(),
            self.slope.clone(),
        )
    }

    fn resample(&mut self) -> Result<()> {
        let d = self.spec.dim();
        for k in 0..d {
            if self.radius[k] < 0.0 {
                return Err(Error::Input("support radius must be non-negative".into()));
            }
            let lo = self.spec.origin()[k] + SUPPORT_MARGIN as f64 * self.spec.spacing()[k];
            let hi = self.spec.origin()[k]
                + (self.spec.dims()[k] - 1 - SUPPORT_MARGIN.min(self.spec.dims()[k] - 1)) as f64
                    * self.spec.spacing()[k];
            if self.center[k] - self.radius[k] < lo || self.center[k] + self.radius[k] > hi {
                return Err(Error::Input(format!(
                    "support of xi on axis {k} leaves the {SUPPORT_MARGIN}-sample margin"
                )));
            }
        }
        let n = self.spec.n_points();
        let mut samples = vec![0.0; n * d];
        let mut idx = vec![0; d];
        for flat in 0..n {
            self.spec.unflat(flat, &mut idx);
            let (v, _) = self.eval(&self.spec.point(&idx));
            samples[flat * d..(flat + 1) * d].copy_from_slice(&v);
        }
        self.samples = samples;
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// `xi(y)` and its Jacobian `d xi_i / d y_j`.
    pub fn eval(&self, y: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let d = y.len();
        let mut b = vec![0.0; d];
        let mut db = vec![0.0; d];
        for k in 0..d {
            if self.radius[k] == 0.0 {
                return (vec![0.0; d], DMatrix::zeros(d, d));
            }
            let (v, dv) = bump((y[k] - self.center[k]) / self.radius[k]);
            b[k] = v;
            db[k] = dv / self.radius[k];
        }
        let prod: f64 = b.iter().product();
        if prod == 0.0 && db.iter().all(|x| *x == 0.0) {
            return (vec![0.0; d], DMatrix::zeros(d, d));
        }
        let lin: Vec<f64> = (0..d)
            .map(|i| self.amplitude[i] + (0..d).map(|k| self.slope[(i, k)] * (y[k] - self.center[k])).sum::<f64>())
            .collect();
        let xi = lin.iter().map(|l| l * prod).collect();
        let jac = DMatrix::from_fn(d, d, |i, j| {
            let others: f64 = (0..d).filter(|&k| k != j).map(|k| b[k]).product();
            self.slope[(i, j)] * prod + lin[i] * db[j] * others
        });
        (xi, jac)
    }

    pub fn at(&self, index: &[usize]) -> &[f64] {
        let d = self.spec.dim();
        let flat = self.spec.flat(index);
        &self.samples[flat * d..(flat + 1) * d]
    }

    pub fn max_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// True when every sample within the margin of the boundary is exactly zero.
    pub fn margin_holds(&self) -> bool {
        let d = self.spec.dim();
        let mut idx = vec![0; d];
        (0..self.spec.n_points()).all(|flat| {
            self.spec.unflat(flat, &mut idx);
            self.spec.depth(&idx) >= SUPPORT_MARGIN || self.samples[flat * d..(flat + 1) * d].iter().all(|x| *x == 0.0)
        })
    }

    /// Distance from the support box to the grid boundary.
    pub fn support_margin(&self) -> f64 {
        (0..self.spec.dim())
            .map(|k| {
                let lo = self.spec.origin()[k];
                let hi = lo + (self.spec.dims()[k] - 1) as f64 * self.spec.spacing()[k];
                (self.center[k] - self.radius[k] - lo).min(hi - self.center[k] - self.radius[k])
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `(y, G)` with `y = phi_{-eps}(z)` and `G = D phi_{-eps}(z)`, by RK4.
    pub fn backward_flow(&self, z: &[f64], eps: f64, substeps: usize) -> (Vec<f64>, DMatrix<f64>) {
        let d = z.len();
        let dt = -eps / substeps as f64;
        let mut y = z.to_vec();
        let mut g = DMatrix::identity(d, d);
        let rhs = |y: &[f64], g: &DMatrix<f64>| -> (Vec<f64>, DMatrix<f64>) {
            let (xi, jac) = self.eval(y);
            (xi, jac * g)
        };
        for _ in 0..substeps {
            let (k1, m1) = rhs(&y, &g);
            let y2: Vec<f64> = (0..d).map(|i| y[i] + 0.5 * dt * k1[i]).collect();
            let (k2, m2) = rhs(&y2, &(&g + &m1 * (0.5 * dt)));
            let y3: Vec<f64> = (0..d).map(|i| y[i] + 0.5 * dt * k2[i]).collect();
            let (k3, m3) = rhs(&y3, &(&g + &m2 * (0.5 * dt)));
            let y4: Vec<f64> = (0..d).map(|i| y[i] + dt * k3[i]).collect();
            let (k4, m4) = rhs(&y4, &(&g + &m3 * dt));
            for i in 0..d {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            g += (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (dt / 6.0);
        }
        (y, g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstVariation {
    /// `(F(eps) - F(-eps)) / (2 eps)` along the flow of `xi`.
    pub numeric_derivative: f64,
    /// `-sum T_ij d_j xi_i` times the cell volume, with the exact Jacobian of `xi`.
    pub tensor_pairing: f64,
    /// `sum xi_i (Div T)_i` times the cell volume, `Div T` by central differences.
    pub divergence_pairing: f64,
    pub epsilon: f64,
    pub h: f64,
}

/// RK4 substeps used by [`first_variation`].
pub const FLOW_SUBSTEPS: usize = 8;

/// Compares the derivative of the discretized functional along the flow of `xi`
/// with the pairing of `T` against `D xi`. The two differ by `O(eps^2)`;
/// `tensor_pairing` and `divergence_pairing` differ by `O(h^2)`.
pub fn first_variation<S: FieldSource + ?Sized>(
    model: &LagrangianModel,
    src: &S,
    xi: &VariationField,
    eps: f64,
) -> Result<FirstVariation> {
    check_source(model, src)?;
    let spec = src.spec();
    if spec != xi.spec() {
        return Err(Error::Input("xi is sampled on a different grid".into()));
    }
    spec.require_stencil()?;
    if !(eps != 0.0 && eps.is_finite()) {
        return Err(Error::Input(format!("epsilon = {eps} must be finite and nonzero")));
    }
    let reach = eps.abs() * xi.max_norm();
    let margin = xi.support_margin();
    if reach > margin {
        return Err(Error::FlowExitsGrid { reach, margin });
    }
    let d = spec.dim();
    let vol = spec.cell_volume();
    let h = spec.spacing().iter().copied().fold(0.0, f64::max);
    let n = spec.n_points();

    // index box holding every nonzero sample of xi, widened by one
    let mut lo = vec![usize::MAX; d];
    let mut hi = vec![0usize; d];
    let mut idx = vec![0; d];
    let mut any = false;
    for flat in 0..n {
        spec.unflat(flat, &mut idx);
        if xi.at(&idx).iter().any(|v| *v != 0.0) {
            any = true;
            for k in 0..d {
                lo[k] = lo[k].min(idx[k]);
                hi[k] = hi[k].max(idx[k]);
            }
        }
    }
    if !any {
        return Ok(FirstVariation {
            numeric_derivative: 0.0,
            tensor_pairing: 0.0,
            divergence_pairing: 0.0,
            epsilon: eps,
            h,
        });
    }
    for k in 0..d {
        lo[k] -= 1;
        hi[k] += 1;
    }
    let box_dims: Vec<usize> = (0..d).map(|k| hi[k] - lo[k] + 1).collect();
    let box_spec = GridSpec::new(box_dims, vec![1.0; d], vec![0.0; d])?;
    let to_global = |b: &[usize], out: &mut [usize]| {
        for k in 0..d {
            out[k] = b[k] + lo[k];
        }
    };

    let inc = Incidence::new(model.dim, model.degree)?;
    let mut tensors: Vec<f64> = Vec::with_capacity(box_spec.n_points() * d * d);
    let (mut f_plus, mut f_minus, mut tensor_pairing) = (0.0, 0.0, 0.0);
    let mut b = vec![0; d];
    for bflat in 0..box_spec.n_points() {
        box_spec.unflat(bflat, &mut b);
        to_global(&b, &mut idx);
        let alpha = src.value_at(&idx);
        let t = assemble_with(&inc, model, &alpha)?.entries;
        for i in 0..d {
            for j in 0..d {
                tensors.push(t[(i, j)]);
            }
        }
        let z = spec.point(&idx);
        let (xz, jac) = xi.eval(&z);
        if xz.iter().all(|v| *v == 0.0) && jac.iter().all(|v| *v == 0.0) {
            continue;
        }
        tensor_pairing -= t.component_mul(&jac).sum();
        let l0 = model.evaluate(&alpha)?;
        for (sign, acc) in [(1.0, &mut f_plus), (-1.0, &mut f_minus)] {
            let (_, g) = xi.backward_flow(&z, sign * eps, FLOW_SUBSTEPS);
            let g_inv = g.clone().try_inverse().ok_or_else(|| {
                Error::Domain("flow Jacobian became singular; reduce epsilon".into())
            })?;
            let moved = pullback(&LinearMap(g_inv), &alpha)?;
            *acc += model.evaluate(&moved)? * g.determinant() - l0;
        }
    }
    let numeric_derivative = (f_plus - f_minus) * vol / (2.0 * eps);

    let box_flat = |b: &[usize]| box_spec.flat(b);
    let hs = spec.spacing();
    let mut divergence_pairing = 0.0;
    let mut nb = vec![0; d];
    for bflat in 0..box_spec.n_points() {
        box_spec.unflat(bflat, &mut b);
        to_global(&b, &mut idx);
        let interior_box = (0..d).all(|k| b[k] > 0 && b[k] + 1 < box_spec.dims()[k]);
        if interior_box {
            let x = xi.at(&idx);
            if x.iter().all(|v| *v == 0.0) {
                continue;
            }
            for i in 0..d {
                let mut div = 0.0;
                for j in 0..d {
                    nb.copy_from_slice(&b);
                    nb[j] += 1;
                    let tu = tensors[box_flat(&nb) * d * d + i * d + j];
                    nb[j] -= 2;
                    let td = tensors[box_flat(&nb) * d * d + i * d + j];
                    div += (tu - td) / (2.0 * hs[j]);
                }
                divergence_pairing += x[i] * div;
            }
        }
    }
    Ok(FirstVariation {
        numeric_derivative,
        tensor_pairing: tensor_pairing * vol,
        divergence_pairing: divergence_pairing * vol,
        epsilon: eps,
        h,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyTransport {
    /// `max |m . grad s|`.
    pub residual: f64,
    /// Range of `d/ds (L - A . dL/dA)` over interior samples.
    pub factor_min: f64,
    pub factor_max: f64,
}

/// `d/ds (L - A . dL/dA)` by a central difference in `s` over exact gradients.
pub fn entropy_factor(model: &LagrangianModel, alpha: &PFormValue) -> Result<f64> {
    let s = alpha.s();
    let h = 1e-6 * (1.0 + s.abs());
    let f = |s: f64| -> Result<f64> {
        let mut a = alpha.clone();
        a.set_entropy(Some(s));
        let l = model.evaluate(&a)?;
        let g = model.gradient(&a)?;
        Ok(l - a.coeffs().iter().zip(&g).map(|(x, y)| x * y).sum::<f64>())
    };
    Ok((f(s + h)? - f(s - h)?) / (2.0 * h))
}

/// Transport of the entropy carried by an `n`-form field along `m`.
pub fn entropy_transport_residual<S: FieldSource + ?Sized>(model: &LagrangianModel, src: &S) -> Result<EntropyTransport> {
    check_source(model, src)?;
    let d = src.dim();
    if src.degree() + 1 != d {
        return Err(Error::DegreeMismatch {
            expected: d - 1,
            got: src.degree(),
        });
    }
    let mut residual: f64 = 0.0;
    let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
    stream_interior(
        src.spec(),
        d + 2,
        |idx, _, out| {
            let alpha = src.value_at(idx);
            let s = alpha
                .entropy()
                .ok_or_else(|| Error::Input("field carries no entropy".into()))?;
            out[..d].copy_from_slice(&encoding::decode_nform(alpha.coeffs()));
            out[d] = s;
            out[d + 1] = entropy_factor(model, &alpha)?;
            Ok(())
        },
        |st| {
            let v: f64 = (0..d).map(|k| st.center[k] * st.d(k, d)).sum();
            residual = residual.max(v.abs());
            fmin = fmin.min(st.center[d + 1]);
            fmax = fmax.max(st.center[d + 1]);
            Ok(())
        },
    )?;
    Ok(EntropyTransport {
        residual,
        factor_min: fmin,
        factor_max: fmax,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliResiduals {
    /// `max |d_i v_j - d_j v_i|` for `v = grad_x psi`; absent when `n = 1`.
    pub curl: Option<f64>,
    /// `max |d_t psi + |grad_x psi|^2 / 2 + dg/drho|`.
    pub bernoulli: f64,
}

fn central(grid: &ScalarGrid, idx: &[usize], axis: usize) -> f64 {
    let mut up = idx.to_vec();
    let mut down = idx.to_vec();
    up[axis] += 1;
    down[axis] -= 1;
    (grid.at(&up) - grid.at(&down)) / (2.0 * grid.spec.spacing()[axis])
}

/// Irrotationality and the Bernoulli relation for a potential `psi` and density `rho`.
pub fn bernoulli_check(
    energy: &InternalEnergy,
    psi: &ScalarGrid,
    rho: &ScalarGrid,
    entropy: Option<&ScalarGrid>,
) -> Result<BernoulliResiduals> {
    let spec = &psi.spec;
    if &rho.spec != spec || entropy.is_some_and(|s| &s.spec != spec) {
        return Err(Error::Input("psi, rho and s must share one grid".into()));
    }
    spec.require_stencil()?;
    let d = spec.dim();
    if d < 2 {
        return Err(Error::Input("needs a time axis and at least one space axis".into()));
    }
    let mut idx = vec![0; d];
    let mut bern: f64 = 0.0;
    let mut curl: f64 = 0.0;
    for flat in 0..spec.n_points() {
        spec.unflat(flat, &mut idx);
        let depth = spec.depth(&idx);
        if depth < 1 {
            continue;
        }
        let s = entropy.map_or(0.0, |g| g.at(&idx));
        let r = rho.at(&idx);
        let v2: f64 = (1..d).map(|k| central(psi, &idx, k).powi(2)).sum();
        bern = bern.max((central(psi, &idx, 0) + 0.5 * v2 + energy.d_rho(r, s)).abs());
        if depth >= 2 {
            for i in 1..d {
                for j in i + 1..d {
                    let dv = |a: usize, b: usize| {
                        let mut up = idx.clone();
                        let mut down = idx.clone();
                        up[a] += 1;
                        down[a] -= 1;
                        (central(psi, &up, b) - central(psi, &down, b)) / (2.0 * spec.spacing()[a])
                    };
                    curl = curl.max((dv(i, j) - dv(j, i)).abs());
                }
            }
        }
    }
    Ok(BernoulliResiduals {
        curl: (d > 2).then_some(curl),
        bernoulli: bern,
    })
}

/// A planar interface with unit normal `nu` between two constant states.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpInterface {
    nu: Vec<f64>,
    pub left: PFormValue,
    pub right: PFormValue,
}

impl JumpInterface {
    /// `nu` is normalized here.
    pub fn new(nu: Vec<f64>, left: PFormValue, right: PFormValue) -> Result<Self> {
        let norm = nu.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Input("interface normal must be nonzero".into()));
        }
        if nu.len() != left.dim() || left.dim() != right.dim() || left.degree() != right.degree() {
            return Err(Error::DimensionMismatch {
                expected: nu.len(),
                got: left.dim(),
            });
        }
        Ok(JumpInterface {
            nu: nu.iter().map(|x| x / norm).collect(),
            left,
            right,
        })
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpReport {
    /// `|([T] nu)_i|` per row.
    pub rows: Vec<f64>,
    pub max: f64,
    /// `[m . nu]` for `n`-form models.
    pub mass_flux_jump: Option<f64>,
    /// `nu^T Lambda^{-1} nu` for the light-speed limit law.
    pub nu_lambda_inv_nu: Option<f64>,
}

/// `[T] nu` across the interface.
pub fn rankine_hugoniot(model: &LagrangianModel, jump: &JumpInterface) -> Result<JumpReport> {
    let tl = assemble_general(model, &jump.left)?.entries;
    let tr = assemble_general(model, &jump.right)?.entries;
    let d = model.dim;
    let nu = &jump.nu;
    let rows: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|j| (tr[(i, j)] - tl[(i, j)]) * nu[j]).sum::<f64>().abs())
        .collect();
    let max = rows.iter().copied().fold(0.0, f64::max);
    let mass_flux_jump = (model.degree + 1 == d).then(|| {
        let ml = encoding::decode_nform(jump.left.coeffs());
        let mr = encoding::decode_nform(jump.right.coeffs());
        (0..d).map(|k| (mr[k] - ml[k]) * nu[k]).sum()
    });
    let nu_lambda_inv_nu = model
        .as_relativistic()
        .filter(|r| r.law == DensityLaw::Limit)
        .map(|r| lambda_inv_norm(r.c, nu));
    Ok(JumpReport {
        rows,
        max,
        mass_flux_jump,
        nu_lambda_inv_nu,
    })
}

/// `nu^T Lambda^{-1} nu = -nu_0^2 / c^2 + |nu_x|^2`.
pub fn lambda_inv_norm(c: f64, nu: &[f64]) -> f64 {
    -nu[0] * nu[0] / (c * c) + nu[1..].iter().map(|x| x * x).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpSearch {
    pub best_lambda: f64,
    pub best_residual: f64,
    pub rho_jump: f64,
    pub mass_flux_jump: f64,
    pub nu_lambda_inv_nu: f64,
    pub candidates: usize,
}

/// Scans `m_R = m_L + lambda w` with `w` the part of `Lambda^{-1} nu` orthogonal
/// to `nu`, so that `[m . nu] = 0` along the whole family, and keeps the
/// admissible candidate with `|[rho]| >= min_rho_jump` of smallest `|[T] nu|`.
pub fn limit_jump_search(
    gas: &RelativisticGas,
    m_left: [f64; 4],
    s: f64,
    nu: [f64; 4],
    lambdas: &[f64],
    min_rho_jump: f64,
) -> Result<JumpSearch> {
    let model = LagrangianModel::relativistic(gas.clone());
    let left = crate::models::RelativisticState::new(m_left, gas.c, s);
    left.validate()?;
    let norm2: f64 = nu.iter().map(|x| x * x).sum();
    let c2 = gas.c * gas.c;
    let lin = [-nu[0] / c2, nu[1], nu[2], nu[3]];
    let along: f64 = lin.iter().zip(&nu).map(|(a, b)| a * b).sum::<f64>() / norm2;
    let w: Vec<f64> = (0..4).map(|k| lin[k] - along * nu[k]).collect();
    let mut best: Option<JumpSearch> = None;
    let mut candidates = 0;
    for &lam in lambdas {
        let m_right = [0, 1, 2, 3].map(|k| m_left[k] + lam * w[k]);
        let right = crate::models::RelativisticState::new(m_right, gas.c, s);
        if right.validate().is_err() {
            continue;
        }
        let rho_jump = right.rho() - left.rho();
        if rho_jump.abs() < min_rho_jump {
            continue;
        }
        candidates += 1;
        let jump = JumpInterface::new(nu.to_vec(), left.encode(), right.encode())?;
        let report = rankine_hugoniot(&model, &jump)?;
        if best.as_ref().is_none_or(|b| report.max < b.best_residual) {
            best = Some(JumpSearch {
                best_lambda: lam,
                best_residual: report.max,
                rho_jump,
                mass_flux_jump: report.mass_flux_jump.unwrap_or(f64::NAN),
                nu_lambda_inv_nu: lambda_inv_norm(gas.c, jump.nu()),
                candidates: 0,
            });
        }
    }
    let mut out = best.ok_or_else(|| {
        Error::Domain("no admissible candidate with a genuine density jump".into())
    })?;
    out.candidates = candidates;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalyticField, GridField};
    use crate::models::registry::{build, ModelParams};
    use crate::models::{EMState, GasState};

    #[test]
    fn constant_field_is_closed_and_divergence_free() {
        let spec = GridSpec::cube(3, 4, 0.0, 1.0).unwrap();
        let model = build("gas", &ModelParams::parse("n=2").unwrap()).unwrap();
        let state = GasState::new(1.3, vec![0.2, -0.4], 0.1).encode();
        let f = GridField::sample(spec, 2, |_| state.clone()).unwrap();
        assert_eq!(closedness_residual(&f).unwrap(), 0.0);
        assert!(div_t_residual(&model, &f).unwrap().max <= 1e-13);
    }

    #[test]
    fn tiny_grid_is_rejected() {
        let spec = GridSpec::new(vec![2, 5], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let f = GridField::sample(spec, 1, |_| PFormValue::zeros(2, 1)).unwrap();
        assert!(matches!(closedness_residual(&f), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn exact_one_form_is_closed() {
        // alpha = d(beta) with beta = t^2 x + x^3, exact for quadratic coefficients
        let spec = GridSpec::cube(2, 6, -1.0, 1.0).unwrap();
        let f = AnalyticField::new(spec, 1, |y: &[f64]| {
            let (t, x) = (y[0], y[1]);
            PFormValue::from_coeffs(2, 1, vec![2.0 * t * x, t * t + 3.0 * x * x]).unwrap()
        });
        assert!(closedness_residual(&f).unwrap() < 1e-12);
    }

    #[test]
    fn maxwell_row_zero_is_poynting() {
        let spec = GridSpec::cube(4, 4, 0.0, 1.0).unwrap();
        let model = build("maxwell-lorentz", &ModelParams::default()).unwrap();
        let f = AnalyticField::new(spec, 2, |y: &[f64]| {
            EMState::new(
                [y[1].sin() + y[0], 0.3 * y[2] * y[3], y[0].cos()],
                [0.2 * y[3], y[1] * y[2], (y[0] - y[3]).sin()],
            )
            .encode()
        });
        let (gap, scale) = poynting_consistency(&model, &f).unwrap();
        assert!(scale > 1e-3);
        assert!(gap <= 1e-13 * (1.0 + scale), "{gap}");
    }

    #[test]
    fn zero_variation_field() {
        let spec = GridSpec::cube(2, 8, 0.0, 1.0).unwrap();
        let model = build("iso-p1", &ModelParams::parse("d=2").unwrap()).unwrap();
        let f = AnalyticField::new(spec.clone(), 1, |y: &[f64]| {
            PFormValue::from_coeffs(2, 1, vec![y[0].sin(), y[1]]).unwrap()
        });
        let out = first_variation(&model, &f, &VariationField::zero(spec), 0.01).unwrap();
        assert_eq!(out.numeric_derivative, 0.0);
        assert_eq!(out.tensor_pairing, 0.0);
    }

    #[test]
    fn variation_margin_and_flow_exit() {
        use rand::SeedableRng;
        let spec = GridSpec::cube(2, 20, 0.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let xi = VariationField::random(spec.clone(), &mut rng).unwrap();
        assert!(xi.margin_holds());
        let model = build("iso-p1", &ModelParams::parse("d=2").unwrap()).unwrap();
        let f = AnalyticField::new(spec.clone(), 1, |_| PFormValue::zeros(2, 1));
        assert!(matches!(
            first_variation(&model, &f, &xi, 1e3),
            Err(Error::FlowExitsGrid { .. })
        ));
        let too_wide = VariationField::bump(
            spec,
            vec![0.5, 0.5],
            vec![0.49, 0.3],
            vec![1.0, 1.0],
            DMatrix::zeros(2, 2),
        );
        assert!(too_wide.is_err());
    }

    #[test]
    fn flow_jacobian_matches_finite_differences() {
        use rand::SeedableRng;
        let spec = GridSpec::cube(3, 10, 0.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let xi = VariationField::random(spec, &mut rng).unwrap();
        let z = [0.45, 0.52, 0.48];
        let (_, g) = xi.backward_flow(&z, 0.05, 16);
        let h = 1e-6;
        for j in 0..3 {
            let mut up = z;
            let mut down = z;
            up[j] += h;
            down[j] -= h;
            let (yu, _) = xi.backward_flow(&up, 0.05, 16);
            let (yd, _) = xi.backward_flow(&down, 0.05, 16);
            for i in 0..3 {
                assert!(((yu[i] - yd[i]) / (2.0 * h) - g[(i, j)]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn entropy_counterexample() {
        let spec = GridSpec::cube(2, 8, 0.0, 1.0).unwrap();
        let model = build("gas", &ModelParams::default()).unwrap();
        let f = AnalyticField::new(spec, 1, |y: &[f64]| GasState::new(1.0, vec![1.0], y[1]).encode());
        let out = entropy_transport_residual(&model, &f).unwrap();
        assert!((out.residual - 1.0).abs() < 1e-12);
        // L - A.dL/dA is the pressure exp(s) rho^2 / 2
        assert!((out.factor_min - 0.5 * (0.125f64).exp()).abs() < 1e-6);
        assert!((out.factor_max - 0.5 * (0.875f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn gradients_are_curl_free() {
        let spec = GridSpec::cube(3, 6, -1.0, 1.0).unwrap();
        let psi = ScalarGrid::sample(spec.clone(), |y| y[1] * y[1] + y[1] * y[2] - y[0] * y[2].sin());
        let rho = ScalarGrid::constant(spec, 1.0);
        let out = bernoulli_check(&InternalEnergy::Polytropic { gamma: 2.0 }, &psi, &rho, None).unwrap();
        assert!(out.curl.unwrap() <= 1e-13);
    }

    #[test]
    fn classical_contact_jump() {
        let model = build("gas", &ModelParams::default()).unwrap();
        let jump = JumpInterface::new(
            vec![1.0, 0.0],
            GasState::new(1.0, vec![0.0], 0.0).encode(),
            GasState::new(2.0, vec![0.0], 0.0).encode(),
        )
        .unwrap();
        let r = rankine_hugoniot(&model, &jump).unwrap();
        assert!((r.rows[0] - 1.5).abs() < 1e-15);
        assert_eq!(r.rows[1], 0.0);
        let same = JumpInterface::new(vec![0.3, 0.7], jump.left.clone(), jump.left.clone()).unwrap();
        assert_eq!(rankine_hugoniot(&model, &same).unwrap().max, 0.0);
    }
}
