use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use proptest::prelude::*;
use statewalk::hilbert::{
    fs_distance, inner, kron, normalize, schmidt_coefficients, schmidt_entropy, tangent_project, Ray, StateVector,
};
use statewalk::rng::{random_state, rng_from_seed};

fn ray(n: usize, seed: u64) -> Ray {
    Ray::new(&random_state(n, &mut rng_from_seed(seed)).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_a_metric(n in 2usize..40, s in any::<u64>()) {
        let (a, b, c) = (ray(n, s), ray(n, s ^ 1), ray(n, s ^ 2));
        let ab = fs_distance(&a, &b).unwrap();
        prop_assert!((0.0..=FRAC_PI_2).contains(&ab));
        prop_assert!((ab - fs_distance(&b, &a).unwrap()).abs() < 1e-14);
        prop_assert!(fs_distance(&a, &c).unwrap() <= ab + fs_distance(&b, &c).unwrap() + 1e-12);
        prop_assert!(fs_distance(&a, &a).unwrap() < 1e-7);
    }

    #[test]
    fn ray_operations_ignore_global_phase(n in 2usize..20, s in any::<u64>(), phi in 0.0..6.3f64) {
        let (a, b) = (ray(n, s), ray(n, s.wrapping_add(7)));
        let rotated = Ray::new(&b.representative().scaled(Complex64::from_polar(1.0, phi))).unwrap();
        prop_assert!((fs_distance(&a, &b).unwrap() - fs_distance(&a, &rotated).unwrap()).abs() < 1e-12);
        prop_assert!((a.overlap(&b).unwrap() - a.overlap(&rotated).unwrap()).abs() < 1e-12);
        let t1 = tangent_project(&b, a.representative()).unwrap();
        let t2 = tangent_project(&rotated, a.representative()).unwrap();
        prop_assert!((t1.norm() - t2.norm()).abs() < 1e-12);
    }

    #[test]
    fn tangent_projection_is_orthogonal(n in 2usize..30, s in any::<u64>()) {
        let base = ray(n, s);
        let v = random_state(n, &mut rng_from_seed(s ^ 99)).unwrap();
        let t = tangent_project(&base, &v).unwrap();
        prop_assert!(inner(base.representative(), &t.direction).unwrap().norm() < 1e-13);
    }

    #[test]
    fn product_states_have_zero_entropy(na in 2usize..8, nb in 2usize..8, s in any::<u64>()) {
        let a = random_state(na, &mut rng_from_seed(s)).unwrap();
        let b = random_state(nb, &mut rng_from_seed(s ^ 5)).unwrap();
        let psi = kron(&a, &b);
        prop_assert!((psi.norm() - 1.0).abs() < 1e-13);
        prop_assert!(schmidt_entropy(&psi, na, nb).unwrap() < 1e-10);
    }

    #[test]
    fn schmidt_weights_sum_to_one(na in 2usize..7, nb in 2usize..7, s in any::<u64>()) {
        let psi = random_state(na * nb, &mut rng_from_seed(s)).unwrap();
        let c = schmidt_coefficients(&psi, na, nb).unwrap();
        let total: f64 = c.iter().map(|x| x * x).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let h = schmidt_entropy(&psi, na, nb).unwrap();
        prop_assert!(h >= -1e-12 && h <= (na.min(nb) as f64).ln() + 1e-12);
    }
}

#[test]
fn orthogonal_states_are_a_right_angle_apart() {
    let a = Ray::new(&StateVector::basis(4, 0).unwrap()).unwrap();
    let b = Ray::new(&StateVector::basis(4, 3).unwrap()).unwrap();
    assert_eq!(fs_distance(&a, &b).unwrap(), FRAC_PI_2);
}

#[test]
fn known_angle() {
    let a = Ray::new(&StateVector::from_real(&[1.0, 0.0]).unwrap()).unwrap();
    let b = Ray::new(&StateVector::from_real(&[0.6f64.cos(), 0.6f64.sin()]).unwrap()).unwrap();
    assert!((fs_distance(&a, &b).unwrap() - 0.6).abs() < 1e-15);
}

#[test]
fn bell_state_entropy_is_ln2() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = StateVector::from_real(&[s, 0.0, 0.0, s]).unwrap();
    assert!((schmidt_entropy(&psi, 2, 2).unwrap() - std::f64::consts::LN_2).abs() < 1e-14);
}

#[test]
fn degenerate_and_mismatched_inputs_are_rejected() {
    assert!(normalize(&StateVector::zeros(3).unwrap()).is_err());
    let a = StateVector::basis(2, 0).unwrap();
    let b = StateVector::basis(3, 0).unwrap();
    assert!(inner(&a, &b).is_err());
    assert!(StateVector::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
}
