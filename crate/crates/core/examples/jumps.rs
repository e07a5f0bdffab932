//! Jump conditions across planar interfaces.
//!
//! ```bash
//! cargo run --example jumps
//! ```

use formtensor::field::verify::{lambda_inv_norm, limit_jump_search, rankine_hugoniot, JumpInterface};
use formtensor::models::registry::{build, ModelParams};
use formtensor::models::GasState;
use formtensor::Result;

fn main() -> Result<()> {
    // A contact: same velocity and pressure, different density and entropy.
    let gas = build("gas", &ModelParams::parse("n=2,g=polytropic,gamma=2")?)?;
    let v = [0.3, 0.2];
    let n = [0.6, 0.8];
    let state = |rho: f64, s: f64| GasState::new(rho, vec![rho * v[0], rho * v[1]], s).encode();
    let nu = vec![-(v[0] * n[0] + v[1] * n[1]), n[0], n[1]];
    let contact = JumpInterface::new(nu.clone(), state(1.0, 0.0), state(2.0, 0.25f64.ln()))?;
    let rep = rankine_hugoniot(&gas, &contact)?;
    println!("contact:      |[T] nu| = {:.2e}, [m.nu] = {:.2e}", rep.max, rep.mass_flux_jump.unwrap());

    let broken = JumpInterface::new(nu, state(1.0, 0.0), state(2.0, 0.0))?;
    println!("pressure gap: rows {:?}", rankine_hugoniot(&gas, &broken)?.rows);

    // The light-speed limit law only admits density jumps on null interfaces.
    let limit = build("relativistic-limit", &ModelParams::parse("c=1")?)?;
    let rel = limit.as_relativistic().unwrap();
    let lambdas: Vec<f64> = (-2000..=2000).map(|k| k as f64 * 1e-3).collect();
    let m = [1.5, 0.4, 0.0, 0.0];
    for nu in [[1.0, 1.0, 0.0, 0.0], [0.5, 1.0, 0.0, 0.0], [1.0, 0.3, 0.0, 0.0]] {
        let found = limit_jump_search(rel, m, 0.0, nu, &lambdas, 0.1)?;
        println!(
            "nu = {nu:?}: nu.L^-1.nu = {:+.3}, best residual {:.3e} at lambda {:.3}",
            lambda_inv_norm(rel.c, &nu),
            found.best_residual,
            found.best_lambda,
        );
    }
    Ok(())
}
