//! The derivative of the action under a compactly supported domain variation,
//! compared with the pairing of the tensor against the variation field.
//!
//! ```bash
//! cargo run --release --example first_variation
//! ```

use formtensor::field::manufactured::RandomSmoothForm;
use formtensor::field::verify::{first_variation, VariationField};
use formtensor::field::{AnalyticField, GridSpec};
use formtensor::models::registry::{build, ModelParams};
use formtensor::Result;
use rand::SeedableRng;

fn main() -> Result<()> {
    let model = build("minimal-surface", &ModelParams::parse("d=2")?)?;
    let form = RandomSmoothForm::new(&model, 11)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let xi0 = VariationField::random(GridSpec::cube(2, 10, 0.0, 1.0)?, &mut rng)?;

    println!("{:>4} {:>22} {:>22} {:>10} {:>10}", "n", "dF/de", "-sum T:Dxi", "gap", "by parts");
    for n in [10, 20, 40, 80] {
        let spec = GridSpec::cube(2, n, 0.0, 1.0)?;
        let field = AnalyticField::new(spec.clone(), model.degree, |y: &[f64]| form.eval(y));
        let fv = first_variation(&model, &field, &xi0.on(spec)?, 0.25 / n as f64)?;
        println!(
            "{n:>4} {:>22.15e} {:>22.15e} {:>10.2e} {:>10.2e}",
            fv.numeric_derivative,
            fv.tensor_pairing,
            (fv.numeric_derivative - fv.tensor_pairing).abs(),
            (fv.tensor_pairing - fv.divergence_pairing).abs(),
        );
    }
    Ok(())
}
