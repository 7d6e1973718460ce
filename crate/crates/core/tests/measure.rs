use statewalk::dynamics::StepConfig;
use statewalk::gue::GueSampler;
use statewalk::hilbert::{Ray, StateVector};
use statewalk::measure::{
    born_weights, constrained_position_walk, run_trial_outcomes, run_trials, DetectorSet, Outcome, TrialStats,
};
use statewalk::packets::{Grid, ManifoldKind, ManifoldSpec};
use statewalk::Error;

fn ray(v: &[f64]) -> Ray {
    Ray::new(&StateVector::from_real(v).unwrap()).unwrap()
}

#[test]
fn outcomes_do_not_depend_on_the_thread_count() {
    let psi = ray(&[0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()]);
    let det = DetectorSet::full_basis(3, 0.2).unwrap();
    let cfg = StepConfig::new(0.15, 1.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_trial_outcomes(64, &psi, &det, &cfg, 100_000, 77).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn detector_sets_validate_their_geometry() {
    assert!(matches!(DetectorSet::new(vec![], 0.1), Err(Error::EmptyDetectors)));
    assert!(DetectorSet::full_basis(3, 0.0).is_err());
    assert!(DetectorSet::full_basis(3, 1.6).is_err());
    // Targets 0.3 rad apart cannot carry ε = 0.1 caps 5ε apart.
    let close = vec![ray(&[1.0, 0.0]), ray(&[0.3f64.cos(), 0.3f64.sin()])];
    assert!(DetectorSet::new(close, 0.1).is_err());
}

#[test]
fn walks_starting_inside_a_cap_hit_at_once() {
    let det = DetectorSet::full_basis(2, 0.15).unwrap();
    let cfg = StepConfig::new(0.1, 1.0).unwrap();
    let mut s = GueSampler::new(2, 1.0, 1).unwrap();
    let out = statewalk::measure::run_walk(&ray(&[1.0, 0.05]), &det, &cfg, &mut s, 10).unwrap();
    assert_eq!(out.result, Outcome::Hit(0));
    assert_eq!(out.steps, 0);
}

#[test]
fn censoring_is_reported() {
    let det = DetectorSet::full_basis(4, 0.05).unwrap();
    let cfg = StepConfig::new(0.01, 1.0).unwrap();
    let stats = run_trials(20, &ray(&[0.5, 0.5, 0.5, 0.5]), &det, &cfg, 5, 3).unwrap();
    assert_eq!(stats.censored, 20);
    assert_eq!(stats.censored_fraction(), 1.0);
    assert!(stats.mean_steps_to_hit.is_nan());
}

#[test]
fn born_weights_renormalize_over_targets() {
    let det = DetectorSet::full_basis(3, 0.1).unwrap();
    let w = born_weights(&ray(&[0.6, 0.0, 0.8]), &det).unwrap();
    assert!((w.weights[0] - 0.36).abs() < 1e-15 && (w.weights[2] - 0.64).abs() < 1e-15);
    assert!(!w.renormalized);
    let partial = DetectorSet::new(vec![ray(&[1.0, 0.0, 0.0]), ray(&[0.0, 1.0, 0.0])], 0.1).unwrap();
    let w = born_weights(&ray(&[0.5, 0.5, 0.5f64.sqrt()]), &partial).unwrap();
    assert!(w.renormalized);
    assert!((w.weights[0] - 0.5).abs() < 1e-15);
}

#[test]
fn stats_from_outcomes() {
    use statewalk::measure::WalkOutcome;
    let o = |r, steps| WalkOutcome {
        result: r,
        steps,
        final_distance: 0.0,
    };
    let s = TrialStats::from_outcomes(&[o(Outcome::Hit(1), 10), o(Outcome::Hit(0), 30), o(Outcome::Censored, 99)], 2, 5);
    assert_eq!(s.counts, vec![1, 1]);
    assert_eq!(s.frequencies, vec![1.0 / 3.0, 1.0 / 3.0]);
    assert_eq!(s.conditioned_frequencies, vec![0.5, 0.5]);
    assert_eq!(s.mean_steps_to_hit, 20.0);
}

/// On CP¹ the walk is Brownian motion on the Bloch sphere, so the chance of
/// reaching the cap around `e₀` first is the harmonic measure
/// `(L(π/2 − ε) − L(θ)) / (L(π/2 − ε) − L(ε))`, `L = ln tan`, where θ is the
/// FS distance from the start to `e₀`. For unequal weights this differs from
/// `|c₀|²`.
#[test]
fn two_level_walk_follows_harmonic_measure() {
    let (w0, eps) = (0.3f64, 0.15f64);
    let theta = w0.sqrt().acos();
    let l = |x: f64| x.tan().ln();
    let h = std::f64::consts::FRAC_PI_2 - eps;
    let harmonic = (l(h) - l(theta)) / (l(h) - l(eps));
    let det = DetectorSet::full_basis(2, eps).unwrap();
    let cfg = StepConfig::new(0.02, 1.0).unwrap();
    let n = 2000;
    let stats = run_trials(n, &ray(&[w0.sqrt(), (1.0 - w0).sqrt()]), &det, &cfg, 10_000_000, 8).unwrap();
    let se = (harmonic * (1.0 - harmonic) / n as f64).sqrt();
    let f = stats.frequencies[0];
    assert!((f - harmonic).abs() < 4.0 * se, "frequency {f}, harmonic measure {harmonic}");
    assert!((f - w0).abs() > 4.0 * se, "frequency {f} unexpectedly at |c0|^2");
}

#[test]
fn constrained_walk_stays_on_the_manifold_grid() {
    let g = Grid::line(16, -8.0, 8.0).unwrap();
    let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
    let cfg = StepConfig::new(0.03, 1.0).unwrap();
    let mut s = GueSampler::new(16, 1.0, 4).unwrap();
    let a = constrained_position_walk(&[0.0], &spec, &cfg, 50, &mut s).unwrap();
    assert!(a[0].abs() < 3.0);
    let mut s = GueSampler::new(16, 1.0, 4).unwrap();
    assert_eq!(constrained_position_walk(&[0.0], &spec, &cfg, 50, &mut s).unwrap(), a);
}
