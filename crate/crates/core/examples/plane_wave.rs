//! Discrete closedness and divergence residuals of catalog fields under refinement.
//!
//! ```bash
//! cargo run --release --example plane_wave
//! ```

use formtensor::field::manufactured;
use formtensor::field::verify::{closedness_residual, div_t_residual, observed_order};
use formtensor::Result;

fn main() -> Result<()> {
    for name in ["maxwell-plane-wave", "maxwell-oblique-wave", "non-closed-form"] {
        let c = manufactured::case(name, 8)?;
        println!("{name}: {}", c.summary);
        let mut prev: Option<(f64, f64)> = None;
        for n in [8, 16, 32] {
            let c = manufactured::case(name, n)?;
            let closed = closedness_residual(&c.field)?;
            let div = div_t_residual(&c.model, &c.field)?.max;
            let orders = prev
                .filter(|&(pc, pd)| pc > 0.0 && pd > 0.0)
                .map(|(pc, pd)| format!("  orders {:.2} {:.2}", observed_order(pc, closed), observed_order(pd, div)))
                .unwrap_or_default();
            println!("  n = {n:>2}  |d alpha| = {closed:.3e}  |div T| = {div:.3e}{orders}");
            prev = Some((closed, div));
        }
    }
    Ok(())
}
