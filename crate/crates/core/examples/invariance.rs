//! Invariance under a metric's isometries against symmetry of the tensor.
//!
//! ```bash
//! cargo run --example invariance
//! ```

use formtensor::models::registry::{build, ModelParams};
use formtensor::symmetry::{equivalence_check, MetricSignature};
use formtensor::Result;

fn main() -> Result<()> {
    let minkowski = MetricSignature::minkowski(4, 1.0)?;
    for name in ["maxwell-linear", "maxwell-lorentz", "maxwell-anisotropic"] {
        let model = build(name, &ModelParams::default())?;
        let rep = equivalence_check(&model, &minkowski, 100, 0)?;
        println!(
            "{name:<20} invariance {:.2e}  symmetry {:.2e}  -> {}",
            rep.invariance_defect, rep.symmetry_defect, rep.verdict
        );
    }

    for name in ["iso-p1", "minimal-surface", "polynomial"] {
        let model = build(name, &ModelParams::default())?;
        let metric = MetricSignature::euclidean(model.dim);
        let rep = equivalence_check(&model, &metric, 100, 0)?;
        println!(
            "{name:<20} invariance {:.2e}  symmetry {:.2e}  -> {}",
            rep.invariance_defect, rep.symmetry_defect, rep.verdict
        );
    }
    Ok(())
}
