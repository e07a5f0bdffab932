//! Assembling the tensor for a gas, an electromagnetic field and a relativistic fluid.
//!
//! ```bash
//! cargo run --example stress_tensor
//! ```

use formtensor::models::registry::{build, ModelParams};
use formtensor::models::{EMState, GasState, RelativisticState};
use formtensor::tensor;
use formtensor::Result;

fn show(label: &str, rows: &[Vec<f64>]) {
    println!("{label}");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:>10.5}")).collect();
        println!("  [{}]", cells.join(" "));
    }
}

fn main() -> Result<()> {
    // One-dimensional gas at rest density 1 with momentum 1.
    let gas = build("gas", &ModelParams::parse("n=1,g=polytropic,gamma=2")?)?;
    let state = GasState::new(1.0, vec![1.0], 0.0);
    let t = tensor::assemble_gas(gas.as_gas().unwrap(), &state)?;
    show("gas T", &t.t.rows());
    show("gas T' (mass row on top)", &t.t_prime.rows());
    println!("  pressure = {}", t.pressure);

    let mx = build("maxwell-linear", &ModelParams::default())?;
    let em = EMState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let t = tensor::assemble_maxwell(mx.as_maxwell().unwrap(), &em)?;
    show("electromagnetic T", &t.t.rows());
    println!("  energy density = {}, Poynting = {:?}", t.energy_density, t.poynting);

    let rel = build("relativistic", &ModelParams::parse("c=1")?)?;
    let gas = rel.as_relativistic().unwrap();
    let st = RelativisticState::new([1.2, 0.3, 0.1, 0.0], 1.0, 0.0);
    let t = tensor::assemble_relativistic(gas, &st)?;
    show("relativistic T'", &t.t_prime.rows());
    println!("  e = {:.6}, p = {:.6}, gap to fluid form = {:.2e}", t.energy_density, t.pressure, t.forms_gap);
    Ok(())
}
