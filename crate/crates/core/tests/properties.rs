use formtensor::exterior::{
    between_sign, canonicalize, enumerate_subsets, infinitesimal_pullback, pullback, LinearMap, MultiIndex, PFormValue,
};
use formtensor::models::registry::{build, ModelParams};
use formtensor::models::{encoding, GasState, RelativisticState};
use formtensor::symmetry::{lie_basis, pullback_change, MetricSignature};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;

fn layout() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4).prop_flat_map(|d| (Just(d), 0usize..=d))
}

fn form(d: usize, p: usize) -> impl Strategy<Value = PFormValue> {
    let n = enumerate_subsets(d, p).len();
    prop::collection::vec(-3.0f64..3.0, n).prop_map(move |c| PFormValue::from_coeffs(d, p, c).unwrap())
}

fn matrix(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, d * d).prop_map(move |v| DMatrix::from_row_slice(d, d, &v))
}

fn close(a: &PFormValue, b: &PFormValue, tol: f64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pullback_reverses_composition(
        (d, p, a, m1, m2) in layout().prop_flat_map(|(d, p)| (Just(d), Just(p), form(d, p), matrix(d), matrix(d)))
    ) {
        let (m1, m2) = (LinearMap(m1), LinearMap(m2));
        let lhs = pullback(&m1.compose(&m2), &a).unwrap();
        let rhs = pullback(&m2, &pullback(&m1, &a).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10), "d={d} p={p}");
    }

    #[test]
    fn pullback_is_linear(
        (a, b, m, t) in layout().prop_flat_map(|(d, p)| (form(d, p), form(d, p), matrix(d), -2.0f64..2.0))
    ) {
        let m = LinearMap(m);
        let lhs = pullback(&m, &a.plus(&b.scaled(t)).unwrap()).unwrap();
        let rhs = pullback(&m, &a).unwrap().plus(&pullback(&m, &b).unwrap().scaled(t)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn infinitesimal_pullback_is_the_derivative(
        (a, n) in layout().prop_flat_map(|(d, p)| (form(d, p), matrix(d)))
    ) {
        let d = a.dim();
        let t = 1e-5;
        let plus = pullback(&LinearMap(DMatrix::identity(d, d) + &n * t), &a).unwrap();
        let minus = pullback(&LinearMap(DMatrix::identity(d, d) - &n * t), &a).unwrap();
        let fd = plus.plus(&minus.scaled(-1.0)).unwrap().scaled(0.5 / t);
        prop_assert!(close(&fd, &infinitesimal_pullback(&n, &a).unwrap(), 1e-7));
    }

    #[test]
    fn between_sign_is_symmetric(i in 0usize..6, j in 0usize..6, mask in 0u32..64) {
        prop_assume!(i != j);
        let k: Vec<usize> = (0..6).filter(|&x| x != i && x != j && mask & (1 << x) != 0).collect();
        let k = MultiIndex::new(k);
        prop_assert_eq!(between_sign(i, j, &k).unwrap(), between_sign(j, i, &k).unwrap());
    }

    #[test]
    fn transposition_flips_parity(
        (mut raw, a, b) in prop::sample::subsequence((0usize..7).collect::<Vec<_>>(), 2..=5)
            .prop_shuffle()
            .prop_flat_map(|raw| {
                let len = raw.len();
                (Just(raw), 0..len, 1..len).prop_map(move |(r, a, k)| (r, a, (a + k) % len))
            })
    ) {
        let (_, before) = canonicalize(&raw, 7).unwrap();
        raw.swap(a, b);
        let (sorted, after) = canonicalize(&raw, 7).unwrap();
        prop_assert!(sorted.is_canonical());
        prop_assert_eq!(before.sign(), -after.sign());
    }

    #[test]
    fn gradients_agree(seed in any::<u64>(), which in 0usize..6) {
        let name = ["iso-p1", "gas", "relativistic", "maxwell-lorentz", "minimal-surface", "polynomial"][which];
        let m = build(name, &ModelParams::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let alpha = m.sample_state(&mut rng);
        let ad = m.ad_gradient(&alpha).unwrap();
        let fd = m.fd_gradient(&alpha).unwrap();
        let closed = m.closed_gradient(&alpha).unwrap().unwrap();
        for k in 0..ad.len() {
            prop_assert!((closed[k] - ad[k]).abs() <= 1e-12 * (1.0 + ad[k].abs()), "{name}");
            prop_assert!((fd[k] - ad[k]).abs() <= 1e-6 * (1.0 + ad[k].abs()), "{name}");
        }
    }

    #[test]
    fn four_velocity_is_normalized(seed in any::<u64>(), c in 0.5f64..3.0) {
        let m = build("relativistic", &ModelParams::default().set("c", &c.to_string())).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let st = RelativisticState::decode(&m.sample_state(&mut rng), c).unwrap();
        let u = st.velocity();
        let norm = -c * c * u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
        prop_assert!((norm + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gas_legendre_gap_is_pressure(seed in any::<u64>(), gamma in 1.1f64..3.0) {
        let params = ModelParams::parse("n=2,g=polytropic").unwrap().set("gamma", &gamma.to_string());
        let m = build("gas", &params).unwrap();
        let gas = m.as_gas().unwrap().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut alpha = m.sample_state(&mut rng);
        alpha.set_entropy(Some(0.2));
        let st = GasState::decode(&alpha).unwrap();
        let mom = encoding::nform_momentum(&alpha).unwrap();
        let dl_dm = gas.momentum_gradient(&st).unwrap();
        let legendre = m.evaluate(&alpha).unwrap() - mom.iter().zip(&dl_dm).map(|(a, b)| a * b).sum::<f64>();
        let p = gas.pressure(&st);
        prop_assert!((legendre - p).abs() <= 1e-12 * (1.0 + p.abs()));
    }

    #[test]
    fn euler_heisenberg_is_lorentz_invariant(seed in any::<u64>(), t in -1.0f64..1.0, k in 0usize..6) {
        let m = build("maxwell-lorentz", &ModelParams::default()).unwrap();
        let metric = MetricSignature::minkowski(4, 1.0).unwrap();
        let basis = lie_basis(&metric);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let alpha = m.sample_state(&mut rng);
        let map = LinearMap::exp_of(&basis.generators[k], t);
        let scale = 1.0 + m.evaluate(&alpha).unwrap().abs() + alpha.norm().powi(4);
        prop_assert!(pullback_change(&m, &map, &alpha).unwrap() <= 1e-12 * scale);
    }
}
