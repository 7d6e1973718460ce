//! Measurement as an absorbing random walk: detector neighborhoods, trials,
//! hitting statistics and the constrained classical walk.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{constrained_step, random_step, StepConfig};
use crate::error::{param_err, Error, Result};
use crate::gue::GueSampler;
use crate::hilbert::{fs_distance, inner, Ray, StateVector};
use crate::packets::{ManifoldKind, ManifoldSpec};
use crate::rng::derive_seed;
use crate::stats::{chi_square_homogeneity, wilson_interval, ChiSquareResult, Z95};

/// Absorbing `epsilon`-balls (Fubini-Study radius) around target rays.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSet {
    targets: Vec<Ray>,
    epsilon: f64,
    cos_epsilon: f64,
}

impl DetectorSet {
    /// Targets must share a dimension and be at least `5 ε` apart.
    pub fn new(targets: Vec<Ray>, epsilon: f64) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyDetectors);
        }
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < std::f64::consts::FRAC_PI_2) {
            return Err(param_err("epsilon", format!("must lie in (0, π/2), got {epsilon}")));
        }
        let dim = targets[0].dim();
        for t in &targets {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: t.dim(),
                    right: dim,
                });
            }
        }
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                let d = fs_distance(&targets[i], &targets[j])?;
                if d < 5.0 * epsilon {
                    return Err(param_err(
                        "epsilon",
                        format!("targets {i} and {j} are {d:.4} rad apart, closer than 5ε = {:.4}", 5.0 * epsilon),
                    ));
                }
            }
        }
        Ok(Self {
            targets,
            epsilon,
            cos_epsilon: epsilon.cos(),
        })
    }

    /// Detectors on every computational basis state of `C^n`.
    pub fn full_basis(n: usize, epsilon: f64) -> Result<Self> {
        let targets = (0..n)
            .map(|k| Ray::new(&StateVector::basis(n, k)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets, epsilon)
    }

    pub fn targets(&self) -> &[Ray] {
        &self.targets
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.targets[0].dim()
    }

    /// Index of the closest target and its distance.
    pub fn nearest(&self, psi: &StateVector) -> Result<(usize, f64)> {
        let (idx, overlap) = self.best_overlap(psi)?;
        Ok((idx, overlap.clamp(0.0, 1.0).acos()))
    }

    fn best_overlap(&self, psi: &StateVector) -> Result<(usize, f64)> {
        let norm = psi.norm();
        let mut best = (0, -1.0);
        for (i, t) in self.targets.iter().enumerate() {
            let c = inner(t.representative(), psi)?.norm() / norm;
            if c > best.1 {
                best = (i, c);
            }
        }
        Ok(best)
    }

    /// The target whose ball contains `psi`, if any.
    pub fn hit(&self, psi: &StateVector) -> Result<Option<usize>> {
        let (idx, overlap) = self.best_overlap(psi)?;
        Ok((overlap >= self.cos_epsilon).then_some(idx))
    }
}

/// Born weights over a detector set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BornWeights {
    pub weights: Vec<f64>,
    /// `Σ_j |⟨target_j, ψ0⟩|²` before renormalization.
    pub raw_sum: f64,
    /// Set when the raw weights did not sum to one and were rescaled.
    pub renormalized: bool,
}

pub fn born_weights(psi0: &Ray, detectors: &DetectorSet) -> Result<BornWeights> {
    let raw: Vec<f64> = detectors
        .targets()
        .iter()
        .map(|t| t.overlap(psi0).map(|c| c * c))
        .collect::<Result<_>>()?;
    let raw_sum: f64 = raw.iter().sum();
    if !(raw_sum > 0.0) {
        return Err(Error::DegenerateState);
    }
    let renormalized = (raw_sum - 1.0).abs() > 1e-12;
    let weights = if renormalized {
        raw.iter().map(|w| w / raw_sum).collect()
    } else {
        raw
    };
    Ok(BornWeights {
        weights,
        raw_sum,
        renormalized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Hit(usize),
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    pub result: Outcome,
    pub steps: u64,
    /// Distance to the nearest target when the walk stopped.
    pub final_distance: f64,
}

/// Steps until the first detector hit or `max_steps`; also returns the final
/// state.
pub fn run_walk_with_state(
    psi0: &Ray,
    detectors: &DetectorSet,
    cfg: &StepConfig,
    sampler: &mut GueSampler,
    max_steps: u64,
) -> Result<(WalkOutcome, StateVector)> {
    if psi0.dim() != detectors.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: detectors.dim(),
        });
    }
    let mut psi = psi0.representative().clone();
    let mut steps = 0;
    loop {
        if let Some(idx) = detectors.hit(&psi)? {
            let d = detectors.nearest(&psi)?.1;
            let out = WalkOutcome {
                result: Outcome::Hit(idx),
                steps,
                final_distance: d,
            };
            return Ok((out, psi));
        }
        if steps >= max_steps {
            let d = detectors.nearest(&psi)?.1;
            let out = WalkOutcome {
                result: Outcome::Censored,
                steps,
                final_distance: d,
            };
            return Ok((out, psi));
        }
        psi = random_step(&psi, sampler, cfg)?;
        steps += 1;
    }
}

pub fn run_walk(
    psi0: &Ray,
    detectors: &DetectorSet,
    cfg: &StepConfig,
    sampler: &mut GueSampler,
    max_steps: u64,
) -> Result<WalkOutcome> {
    run_walk_with_state(psi0, detectors, cfg, sampler, max_steps).map(|(o, _)| o)
}

/// Runs `f(trial_index, trial_seed)` for every trial in parallel. The seed of
/// trial `i` is [`derive_seed`]`(master, i)`; results come back in trial
/// order regardless of scheduling.
pub fn parallel_trials<T, F>(n: u64, master_seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(i, derive_seed(master_seed, i)))
        .collect()
}

/// Aggregated hit statistics of a batch of walks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub counts: Vec<u64>,
    pub censored: u64,
    pub total: u64,
    /// `counts / total` (censored trials count in the denominator).
    pub frequencies: Vec<f64>,
    /// `counts / (total − censored)`.
    pub conditioned_frequencies: Vec<f64>,
    /// Wilson 95% intervals of `frequencies`.
    pub intervals: Vec<(f64, f64)>,
    /// Mean number of steps over hit trials.
    pub mean_steps_to_hit: f64,
    pub master_seed: u64,
}

impl TrialStats {
    pub fn from_outcomes(outcomes: &[WalkOutcome], targets: usize, master_seed: u64) -> Self {
        let mut counts = vec![0u64; targets];
        let mut censored = 0;
        let mut hit_steps = 0u64;
        for o in outcomes {
            match o.result {
                Outcome::Hit(i) => {
                    counts[i] += 1;
                    hit_steps += o.steps;
                }
                Outcome::Censored => censored += 1,
            }
        }
        let total = outcomes.len() as u64;
        let hits = total - censored;
        let frac = |k: u64, n: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        Self {
            frequencies: counts.iter().map(|&k| frac(k, total)).collect(),
            conditioned_frequencies: counts.iter().map(|&k| frac(k, hits)).collect(),
            intervals: counts.iter().map(|&k| wilson_interval(k, total, Z95)).collect(),
            mean_steps_to_hit: if hits == 0 { f64::NAN } else { hit_steps as f64 / hits as f64 },
            counts,
            censored,
            total,
            master_seed,
        }
    }

    pub fn censored_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.censored as f64 / self.total as f64
        }
    }
}

/// All `n` walk outcomes, trial `i` driven by a sampler seeded with
/// `derive_seed(master_seed, i)`.
pub fn run_trial_outcomes(
    n: u64,
    psi0: &Ray,
    detectors: &DetectorSet,
    cfg: &StepConfig,
    max_steps: u64,
    master_seed: u64,
) -> Result<Vec<WalkOutcome>> {
    cfg.validate()?;
    cfg.check_angle(psi0.dim());
    parallel_trials(n, master_seed, |_, seed| {
        let mut sampler = GueSampler::new(psi0.dim(), cfg.gue_scale, seed)?;
        run_walk(psi0, detectors, cfg, &mut sampler, max_steps)
    })
}

pub fn run_trials(
    n: u64,
    psi0: &Ray,
    detectors: &DetectorSet,
    cfg: &StepConfig,
    max_steps: u64,
    master_seed: u64,
) -> Result<TrialStats> {
    if n == 0 {
        return Err(param_err("trials", "need at least one trial"));
    }
    let outcomes = run_trial_outcomes(n, psi0, detectors, cfg, max_steps, master_seed)?;
    Ok(TrialStats::from_outcomes(&outcomes, detectors.len(), master_seed))
}

/// Positions of a constrained walker on a position manifold after each
/// checkpoint step count (ascending).
pub fn constrained_position_walk_checkpoints(
    start: &[f64],
    spec: &ManifoldSpec,
    cfg: &StepConfig,
    checkpoints: &[usize],
    sampler: &mut GueSampler,
) -> Result<Vec<Vec<f64>>> {
    if spec.kind != ManifoldKind::Position {
        return Err(param_err("kind", "the classical walk runs on a position manifold"));
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(param_err("steps", "checkpoints must be ascending"));
    }
    let grid = spec.grid;
    if let Some(&bad) = start.iter().find(|&&a| !grid.in_support(a, spec.sigma)) {
        return Err(Error::SupportMargin { position: vec![bad] });
    }
    let mut params = start.to_vec();
    let mut psi = spec.member(&params)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut done = 0;
    for &target in checkpoints {
        while done < target {
            let (next, p) = constrained_step(&psi, |v| random_step(v, sampler, cfg), spec, &params)?;
            if p.iter().any(|&a| !grid.in_support(a, spec.sigma)) {
                return Err(Error::SupportMargin { position: p });
            }
            psi = next;
            params = p;
            done += 1;
        }
        out.push(params.clone());
    }
    Ok(out)
}

/// Final classical position after `steps` constrained random steps.
pub fn constrained_position_walk(
    start: &[f64],
    spec: &ManifoldSpec,
    cfg: &StepConfig,
    steps: usize,
    sampler: &mut GueSampler,
) -> Result<Vec<f64>> {
    constrained_position_walk_checkpoints(start, spec, cfg, &[steps], sampler).map(|mut v| v.remove(0))
}

/// Pearson chi-square homogeneity of two hit-count vectors (censored trials
/// excluded).
pub fn chi_square_uniformity(a: &TrialStats, b: &TrialStats) -> Result<ChiSquareResult> {
    if a.counts.len() != b.counts.len() {
        return Err(Error::DimensionMismatch {
            left: a.counts.len(),
            right: b.counts.len(),
        });
    }
    let r = chi_square_homogeneity(&a.counts, &b.counts);
    if !r.valid() {
        warn!(
            "chi-square expected cell count {:.2} below 5; the p-value is unreliable",
            r.min_expected
        );
    }
    Ok(r)
}
