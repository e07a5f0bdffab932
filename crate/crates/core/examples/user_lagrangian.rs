//! A density typed in as an expression, differentiated with dual numbers.
//!
//! ```bash
//! cargo run --example user_lagrangian
//! ```

use formtensor::exterior::PFormValue;
use formtensor::models::registry::{build, ModelParams};
use formtensor::symmetry::{equivalence_check, MetricSignature};
use formtensor::tensor::assemble_general;
use formtensor::Result;

fn main() -> Result<()> {
    // A 2-form on R^3; A10 would mean -A01.
    let params = ModelParams::parse("d=3,p=2")?.set("expr", "sqrt(1 + A01^2 + A02^2 + A12^2) + 0.1 * A01 * A12");
    let model = build("user-expr", &params)?;
    let alpha = PFormValue::from_coeffs(3, 2, vec![0.3, -0.7, 1.1])?;

    println!("L = {:.12}", model.evaluate(&alpha)?);
    println!("dual numbers:    {:?}", model.ad_gradient(&alpha)?);
    println!("central diffs:   {:?}", model.fd_gradient(&alpha)?);
    for row in assemble_general(&model, &alpha)?.rows() {
        println!("  {row:?}");
    }

    let rep = equivalence_check(&model, &MetricSignature::euclidean(3), 50, 0)?;
    println!("euclidean invariance {:.2e}, symmetry {:.2e}: {}", rep.invariance_defect, rep.symmetry_defect, rep.verdict);
    Ok(())
}
