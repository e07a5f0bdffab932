//! Entropy transport along the mass flux, and the Bernoulli relation for
//! potential flow.
//!
//! ```bash
//! cargo run --example entropy
//! ```

use formtensor::field::manufactured;
use formtensor::field::verify::{bernoulli_check, div_t_residual, entropy_transport_residual};
use formtensor::Result;

fn main() -> Result<()> {
    for name in ["entropy-advected", "entropy-counterexample"] {
        println!("{name}");
        for n in [16, 32] {
            let c = manufactured::case(name, n)?;
            let et = entropy_transport_residual(&c.model, &c.field)?;
            let div = div_t_residual(&c.model, &c.field)?.max;
            println!(
                "  n = {n:>2}  |m . grad s| = {:.3e}  |div T| = {div:.3e}  factor in [{:.4}, {:.4}]",
                et.residual, et.factor_min, et.factor_max
            );
        }
    }

    for space in [1, 2, 3] {
        let c = manufactured::bernoulli_case(space, 8)?;
        let r = bernoulli_check(&c.energy, &c.psi, &c.rho, Some(&c.entropy))?;
        println!("potential flow in {space}+1: bernoulli {:.2e}, curl {:?}", r.bernoulli, r.curl);
    }
    Ok(())
}
