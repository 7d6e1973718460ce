use proptest::prelude::*;
use statewalk::gue::{semicircle_cdf, semicircle_ks, unitary_invariance_check, GueSampler, HermitianMatrix};
use statewalk::rng::{haar_unitary, rng_from_seed, unitarity_defect};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn draws_are_exactly_hermitian(n in 2usize..24, scale in 0.1..5.0f64, seed in any::<u64>()) {
        let mut s = GueSampler::new(n, scale, seed).unwrap();
        let h = s.sample();
        prop_assert!(h.is_hermitian());
        prop_assert!(HermitianMatrix::new(h.entries().clone()).is_ok());
    }

    #[test]
    fn same_seed_same_stream(n in 2usize..12, seed in any::<u64>()) {
        let mut a = GueSampler::new(n, 1.0, seed).unwrap();
        let mut b = GueSampler::new(n, 1.0, seed).unwrap();
        for _ in 0..3 {
            prop_assert_eq!(a.sample(), b.sample());
        }
    }

    #[test]
    fn eigenvalues_sum_to_the_trace(n in 2usize..16, seed in any::<u64>()) {
        let h = GueSampler::new(n, 1.0, seed).unwrap().sample();
        let sum: f64 = h.eigenvalues().unwrap().iter().sum();
        prop_assert!((sum - h.trace()).abs() < 1e-10);
    }
}

#[test]
fn entry_second_moments_equal_scale_squared() {
    let (n, s, draws) = (6, 1.7, 20_000);
    let mut sampler = GueSampler::new(n, s, 11).unwrap();
    let mut diag = 0.0;
    let mut off = 0.0;
    for _ in 0..draws {
        let h = sampler.sample();
        diag += h.entries()[(2, 2)].norm_sqr();
        off += h.entries()[(1, 4)].norm_sqr();
    }
    let s2 = s * s;
    // Standard errors: √2 s² and s² per draw.
    assert!((diag / draws as f64 - s2).abs() < 4.0 * 2f64.sqrt() * s2 / (draws as f64).sqrt());
    assert!((off / draws as f64 - s2).abs() < 4.0 * s2 / (draws as f64).sqrt());
}

#[test]
fn spectrum_follows_the_semicircle() {
    let mut s = GueSampler::new(64, 2.0, 5).unwrap();
    assert!(semicircle_ks(&mut s, 40).unwrap().p_value > 0.01);
}

#[test]
fn semicircle_cdf_shape() {
    assert_eq!(semicircle_cdf(-3.0), 0.0);
    assert_eq!(semicircle_cdf(2.5), 1.0);
    assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
    assert!((semicircle_cdf(1.0) + semicircle_cdf(-1.0) - 1.0).abs() < 1e-15);
}

#[test]
fn ensemble_is_unitarily_invariant() {
    let u = haar_unitary(5, &mut rng_from_seed(3));
    assert!(unitarity_defect(&u) < 1e-12);
    let r = unitary_invariance_check(&mut GueSampler::new(5, 1.0, 4).unwrap(), &u, 20_000).unwrap();
    assert!(r.first_moment_discrepancy < 5.0 * r.first_moment_se * 2f64.sqrt());
    assert!(r.second_moment_discrepancy < 5.0 * r.second_moment_se * 2f64.sqrt());
}

#[test]
fn invalid_samplers_are_rejected() {
    assert!(GueSampler::new(1, 1.0, 0).is_err());
    assert!(GueSampler::new(4, 0.0, 0).is_err());
    assert!(GueSampler::new(4, f64::NAN, 0).is_err());
}
