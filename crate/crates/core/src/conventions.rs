//! Sign conventions.
//!
//! The tensor computed everywhere in this crate is
//!
//! ```text
//! T_ij = L delta_ij - sum_K A_{iK} dL/dA_{jK}
//! ```
//!
//! with `K` running over increasing `(p-1)`-tuples avoiding `i` and `j`.
//! Other common ways of writing the same object differ from it as follows.
//!
//! | display                                          | relation to `T`        |
//! |--------------------------------------------------|------------------------|
//! | `p (x) dL/dp - L I` for `p = grad u` (`p = 1`)   | equals `-T`            |
//! | `dL/dm (x) m + (L - m.dL/dm) I` (`n`-forms)      | equals `T`             |
//! | `-Lambda^{-1} T` (relativistic gas)              | symmetric variant `T'` |
//! | `diag(-1, 1, 1, 1) T` (electromagnetism)         | symmetric variant      |
//!
//! Row 0 of `Div T` is the energy balance. For electromagnetism it equals
//! `-(d_t W + div(E x H))` with `W = E.D - L`.
//!
//! Coefficients of `n`-forms and of electromagnetic 2-forms are tied to
//! physical variables in [`crate::models::encoding`].

use nalgebra::DMatrix;

/// `p (x) dL/dp - L I`, entries `(i, j) = A_i g_j - L delta_ij`.
pub fn gradient_display(a: &[f64], grad: &[f64], l: f64) -> DMatrix<f64> {
    let d = a.len();
    DMatrix::from_fn(d, d, |i, j| a[i] * grad[j] - if i == j { l } else { 0.0 })
}

/// Converts [`gradient_display`] to the tensor used throughout the crate.
pub fn from_gradient_display(display: &DMatrix<f64>) -> DMatrix<f64> {
    -display
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_form_display_is_the_negative() {
        let m = gradient_display(&[1.0, 2.0], &[3.0, 4.0], 5.0);
        let t = from_gradient_display(&m);
        assert_eq!(t[(0, 0)], 2.0);
        assert_eq!(t[(0, 1)], -4.0);
        assert_eq!(t[(1, 0)], -6.0);
    }
}
