//! Identifications between physical variables and form coefficients.
//!
//! Every sign convention tying a physical field to the coefficients `A_J`
//! lives here:
//!
//! * `n`-forms on `R^{1+n}`: `A_î = (-1)^i m_i`, where `î` is the increasing
//!   tuple omitting `i`, `m_0 = rho` and `m_i = q_i`.
//! * 2-forms on `R^4`: `A_{j0} = E_j` and `A_{ij} = eps(ijk) B_k`, i.e.
//!   `A_{0j} = -E_j`, `A_{23} = B_1`, `A_{13} = -B_2`, `A_{12} = B_3`.
//!
//! The generic decoders are written over [`Scalar`] so densities can be
//! differentiated through them.

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::exterior::PFormValue;

fn alternating(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Storage slot of `î` among the `(d-1)`-subsets of `0..d`.
pub fn hat_slot(dim: usize, i: usize) -> usize {
    dim - 1 - i
}

/// `m -> A` for an `(d-1)`-form on `R^d`, `d = m.len()`.
pub fn encode_nform(m: &[f64]) -> PFormValue {
    let d = m.len();
    let mut coeffs = vec![0.0; d];
    for (i, &mi) in m.iter().enumerate() {
        coeffs[hat_slot(d, i)] = alternating(i) * mi;
    }
    PFormValue::from_coeffs(d, d - 1, coeffs).expect("n-form layout")
}

pub fn decode_nform<S: Scalar>(a: &[S]) -> Vec<S> {
    let d = a.len();
    (0..d).map(|i| a[hat_slot(d, i)] * alternating(i)).collect()
}

/// Maps `dL/dm` to `dL/dA` (the identification is its own inverse up to slot order).
pub fn nform_gradient_to_coeffs(dl_dm: &[f64]) -> Vec<f64> {
    let d = dl_dm.len();
    let mut g = vec![0.0; d];
    for (i, &v) in dl_dm.iter().enumerate() {
        g[hat_slot(d, i)] = alternating(i) * v;
    }
    g
}

pub fn nform_momentum(alpha: &PFormValue) -> Result<Vec<f64>> {
    if alpha.degree() + 1 != alpha.dim() {
        return Err(Error::DegreeMismatch {
            expected: alpha.dim() - 1,
            got: alpha.degree(),
        });
    }
    Ok(decode_nform(alpha.coeffs()))
}

/// `(E, B) -> A` on `R^4` in storage order `01, 02, 03, 12, 13, 23`.
pub fn encode_maxwell(e: [f64; 3], b: [f64; 3]) -> PFormValue {
    PFormValue::from_coeffs(4, 2, vec![-e[0], -e[1], -e[2], b[2], -b[1], b[0]])
        .expect("maxwell layout")
}

pub fn decode_maxwell<S: Scalar>(a: &[S]) -> ([S; 3], [S; 3]) {
    ([-a[0], -a[1], -a[2]], [a[5], -a[4], a[3]])
}

/// `(dL/dE, dL/dB) -> dL/dA`.
pub fn maxwell_gradient_to_coeffs(dl_de: [f64; 3], dl_db: [f64; 3]) -> Vec<f64> {
    vec![-dl_de[0], -dl_de[1], -dl_de[2], dl_db[2], -dl_db[1], dl_db[0]]
}

pub fn maxwell_fields(alpha: &PFormValue) -> Result<([f64; 3], [f64; 3])> {
    alpha.check_layout(4, 2)?;
    Ok(decode_maxwell(alpha.coeffs()))
}
