//! Pulling constant forms back along linear maps.
//!
//! ```bash
//! cargo run --example pullbacks
//! ```

use formtensor::exterior::{infinitesimal_pullback, pfaffian_2form, pullback, LinearMap, PFormValue};
use formtensor::Result;
use nalgebra::DMatrix;

fn main() -> Result<()> {
    // A 2-form on R^4 with coefficients over 01, 02, 03, 12, 13, 23.
    let omega = PFormValue::from_coeffs(4, 2, vec![1.0, 0.0, 0.5, -2.0, 0.0, 3.0])?;
    let m = LinearMap::from_row_slice(4, &[
        1.0, 2.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 1.0, //
        0.5, 0.0, 2.0, 0.0, //
        0.0, 0.0, 1.0, 1.0,
    ]);
    let pulled = pullback(&m, &omega)?;
    println!("omega      = {:?}", omega.coeffs());
    println!("M^* omega  = {:?}", pulled.coeffs());

    // The Pfaffian scales by det M.
    let det = m.matrix().determinant();
    println!("Pf(M^* omega) = {:.12}", pfaffian_2form(&pulled)?);
    println!("det M Pf(omega) = {:.12}", det * pfaffian_2form(&omega)?);

    // Composition reverses order.
    let n = LinearMap::exp_of(&DMatrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.1), 1.0);
    let lhs = pullback(&m.compose(&n), &omega)?;
    let rhs = pullback(&n, &pullback(&m, &omega)?)?;
    let gap = lhs.plus(&rhs.scaled(-1.0))?.norm();
    println!("|(MN)^* - N^* M^*| = {gap:.3e}");

    // The derivative of t -> exp(tN)^* omega at t = 0.
    let gen = DMatrix::from_fn(4, 4, |i, j| if i + 1 == j { 1.0 } else { 0.0 });
    println!("d/dt exp(tN)^* omega = {:?}", infinitesimal_pullback(&gen, &omega)?.coeffs());
    Ok(())
}
