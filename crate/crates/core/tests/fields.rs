use formtensor::field::manufactured::{self, RandomSmoothForm};
use formtensor::field::verify::{self, JumpInterface, VariationField};
use formtensor::field::{AnalyticField, GridSpec, ScalarGrid};
use formtensor::models::registry::{build, ModelParams};
use formtensor::models::{GasState, InternalEnergy};
use rand::SeedableRng;

#[test]
fn uniform_flow_satisfies_bernoulli() {
    // psi = -1.5 t + x1 with rho = 1: d_t psi = -1.5, |v|^2 / 2 = 0.5, g'(1) = 1.
    let energy = InternalEnergy::Polytropic { gamma: 2.0 };
    for space in [1, 2] {
        let spec = GridSpec::cube(1 + space, 8, 0.0, 1.0).unwrap();
        let psi = ScalarGrid::sample(spec.clone(), |y| -1.5 * y[0] + y[1]);
        let rho = ScalarGrid::constant(spec, 1.0);
        let r = verify::bernoulli_check(&energy, &psi, &rho, None).unwrap();
        assert!(r.bernoulli < 1e-13, "{r:?}");
        assert!(r.curl.unwrap_or(0.0) < 1e-12);
    }
}

#[test]
fn quadratic_potential_is_exact_on_the_grid() {
    for space in [1, 2, 3] {
        let c = manufactured::bernoulli_case(space, 8).unwrap();
        let r = verify::bernoulli_check(&c.energy, &c.psi, &c.rho, Some(&c.entropy)).unwrap();
        assert!(r.bernoulli < 1e-13, "{r:?}");
        assert!(r.curl.unwrap_or(0.0) < 1e-12, "{r:?}");
    }
}

#[test]
fn oblique_contact_has_no_flux_jump() {
    let gas = build("gas", &ModelParams::parse("n=2,g=polytropic,gamma=2").unwrap()).unwrap();
    let v = [0.3, 0.2];
    let n = [0.6, 0.8];
    let state = |rho: f64, s: f64| GasState::new(rho, vec![rho * v[0], rho * v[1]], s).encode();
    let nu = vec![-(v[0] * n[0] + v[1] * n[1]), n[0], n[1]];
    // Equal pressure e^s rho^2 / 2 on both sides.
    let contact = JumpInterface::new(nu.clone(), state(1.0, 0.0), state(2.0, 0.25f64.ln())).unwrap();
    let r = verify::rankine_hugoniot(&gas, &contact).unwrap();
    assert!(r.max < 1e-14, "{r:?}");
    assert!(r.mass_flux_jump.unwrap().abs() < 1e-14);

    let unbalanced = JumpInterface::new(nu, state(1.0, 0.0), state(2.0, 0.0)).unwrap();
    let r = verify::rankine_hugoniot(&gas, &unbalanced).unwrap();
    // [p] n / |nu| in the momentum rows, with [p] = 2 - 0.5.
    let scale = 1.5 / (1.0 + 0.34f64.powi(2)).sqrt();
    assert!((r.rows[1] - scale * 0.6).abs() < 1e-13, "{r:?}");
    assert!((r.rows[2] - scale * 0.8).abs() < 1e-13, "{r:?}");
}

#[test]
fn summation_by_parts_gap_is_second_order() {
    let model = build("iso-p1", &ModelParams::parse("d=2").unwrap()).unwrap();
    let form = RandomSmoothForm::new(&model, 3).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let xi0 = VariationField::random(GridSpec::cube(2, 16, 0.0, 1.0).unwrap(), &mut rng).unwrap();
    let gaps: Vec<f64> = [16, 32]
        .iter()
        .map(|&n| {
            let spec = GridSpec::cube(2, n, 0.0, 1.0).unwrap();
            let field = AnalyticField::new(spec.clone(), 1, |y: &[f64]| form.eval(y));
            let xi = xi0.on(spec).unwrap();
            let fv = verify::first_variation(&model, &field, &xi, 0.25 / n as f64).unwrap();
            (fv.tensor_pairing - fv.divergence_pairing).abs()
        })
        .collect();
    assert!(verify::observed_order(gaps[0], gaps[1]) > 1.8, "{gaps:?}");
}

#[test]
fn static_gas_balances_pressure() {
    let c = manufactured::case("gas-uniform", 8).unwrap();
    let r = verify::div_t_residual(&c.model, &c.field).unwrap();
    assert!(r.max < 1e-12, "{r:?}");
    let c = manufactured::case("gas-static-nonuniform", 8).unwrap();
    let r = verify::div_t_residual(&c.model, &c.field).unwrap();
    assert!(r.max > 1e-3, "{r:?}");
}
