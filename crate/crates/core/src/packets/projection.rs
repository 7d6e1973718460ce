//! Nearest-point projection onto packet manifolds.
//!
//! Maximizes `log f(θ) = ln |⟨m(θ), ψ⟩|² - Σ_modes ln N_mode(θ)` where `m(θ)`
//! is the unnormalized tensor product of per-mode packet samples. The
//! derivatives are analytic, and overlaps are contracted one mode at a time
//! so a joint vector is never materialized per trial point.
//!
//! Cold start: each mode's coordinates are scanned on a lattice (spacing
//! σ/2 in position and in `b`, 1/4σ in `p`) with the other modes held at
//! their current values, sweeping until nothing changes. Candidates are
//! visited in ascending order and only a strictly larger value replaces the
//! incumbent, so exact ties resolve to the lexicographically smallest
//! coordinate. A damped Newton ascent then polishes the best lattice point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::manifold::{ManifoldKind, ManifoldSpec, ModeJet};
use crate::error::{param_err, Error, Result};
use crate::hilbert::{kron, normalize, StateVector};

const MAX_ITERATIONS: usize = 500;
const STEP_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 6;
const TIE_TOL: f64 = 1e-9;

/// Result of [`project_to_manifold`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub params: Vec<f64>,
    pub member: StateVector,
    /// Fubini-Study distance from the input ray to `member`.
    pub distance: f64,
    pub iterations: usize,
}

/// Result of [`project_last_factor`].
#[derive(Debug, Clone, PartialEq)]
pub struct FactorProjection {
    pub params: Vec<f64>,
    /// Normalized optimal state of the leading factor.
    pub other: StateVector,
    /// Normalized manifold point on the trailing factor.
    pub member: StateVector,
    /// `other ⊗ member`.
    pub product: StateVector,
    pub distance: f64,
    pub iterations: usize,
}

/// `⟨v_0 ⊗ … ⊗ v_{M-1}, ψ⟩` for per-mode vectors of length `n`.
fn contract(psi: &[Complex64], n: usize, modes: &[&[Complex64]]) -> Complex64 {
    let mut cur: Vec<Complex64> = psi.to_vec();
    for w in modes.iter().rev() {
        cur = contract_back(&cur, n, w);
    }
    debug_assert_eq!(cur.len(), 1);
    cur[0]
}

fn contract_back(cur: &[Complex64], n: usize, w: &[Complex64]) -> Vec<Complex64> {
    cur.chunks_exact(n)
        .map(|row| row.iter().zip(w).map(|(c, v)| v.conj() * c).sum())
        .collect()
}

fn contract_front(cur: &[Complex64], n: usize, w: &[Complex64]) -> Vec<Complex64> {
    let rest = cur.len() / n;
    let mut out = vec![Complex64::new(0.0, 0.0); rest];
    for (k, v) in w.iter().enumerate() {
        let c = v.conj();
        for (o, x) in out.iter_mut().zip(&cur[k * rest..(k + 1) * rest]) {
            *o += c * x;
        }
    }
    out
}

/// Contracts every mode except `skip`, leaving a length-`n` vector.
fn contract_except(psi: &[Complex64], n: usize, modes: &[&[Complex64]], skip: usize) -> Vec<Complex64> {
    let mut cur = psi.to_vec();
    for w in modes[skip + 1..].iter().rev() {
        cur = contract_back(&cur, n, w);
    }
    for w in &modes[..skip] {
        cur = contract_front(&cur, n, w);
    }
    cur
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

struct Jet {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<Vec<f64>>,
}

/// Per-mode norm `N`, its gradient and Hessian over local indices.
fn mode_norm_jet(jet: &ModeJet) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let l = jet.d.len();
    let n = norm_sqr(&jet.v);
    let g: Vec<f64> = jet.d.iter().map(|d| 2.0 * dot(&jet.v, d).re).collect();
    let h = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| 2.0 * (dot(&jet.d[i], &jet.d[j]).re + dot(&jet.v, &jet.dd[i][j]).re))
                .collect()
        })
        .collect();
    (n, g, h)
}

/// Objective with gradient and Hessian, or just the value when `value_only`.
fn manifold_jet(spec: &ManifoldSpec, psi: &[Complex64], params: &[f64], value_only: bool) -> Jet {
    let n = spec.grid.points();
    let modes = spec.modes();
    let jets: Vec<ModeJet> = (0..modes).map(|m| spec.mode_jet(m, params)).collect();
    let norms: Vec<(f64, Vec<f64>, Vec<Vec<f64>>)> = jets.iter().map(mode_norm_jet).collect();
    let base: Vec<&[Complex64]> = jets.iter().map(|j| j.v.as_slice()).collect();
    let amp = contract(psi, n, &base);
    let s = amp.norm_sqr();
    let value = s.ln() - norms.iter().map(|(nm, _, _)| nm.ln()).sum::<f64>();
    let p = spec.param_len();
    if value_only {
        return Jet {
            value,
            grad: vec![],
            hess: vec![],
        };
    }

    // owner[i] = (mode, local index)
    let mut owner = vec![(0usize, 0usize); p];
    for m in 0..modes {
        for (l, &g) in spec.local_indices(m).iter().enumerate() {
            owner[g] = (m, l);
        }
    }
    let first: Vec<Complex64> = (0..p)
        .map(|i| {
            let (m, l) = owner[i];
            let mut vs = base.clone();
            vs[m] = &jets[m].d[l];
            contract(psi, n, &vs)
        })
        .collect();
    let s_grad: Vec<f64> = first.iter().map(|ai| 2.0 * (amp.conj() * ai).re).collect();
    let mut grad = vec![0.0; p];
    let mut hess = vec![vec![0.0; p]; p];
    for i in 0..p {
        let (mi, li) = owner[i];
        let (nm, ng, _) = &norms[mi];
        grad[i] = s_grad[i] / s - ng[li] / nm;
    }
    for i in 0..p {
        for j in i..p {
            let (mi, li) = owner[i];
            let (mj, lj) = owner[j];
            let mut vs = base.clone();
            if mi == mj {
                vs[mi] = &jets[mi].dd[li][lj];
            } else {
                vs[mi] = &jets[mi].d[li];
                vs[mj] = &jets[mj].d[lj];
            }
            let aij = contract(psi, n, &vs);
            let s_ij = 2.0 * ((first[j].conj() * first[i]).re + (amp.conj() * aij).re);
            let mut h = s_ij / s - s_grad[i] * s_grad[j] / (s * s);
            if mi == mj {
                let (nm, ng, nh) = &norms[mi];
                h -= nh[li][lj] / nm - ng[li] * ng[lj] / (nm * nm);
            }
            hess[i][j] = h;
            hess[j][i] = h;
        }
    }
    Jet { value, grad, hess }
}

struct Ascent {
    params: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Damped Newton ascent with a unit trust region in natural scale units and
/// a halving line search; falls back to a scaled gradient step whenever the
/// Hessian is not negative definite.
fn ascend(
    mut eval: impl FnMut(&[f64], bool) -> Jet,
    start: Vec<f64>,
    scales: &[f64],
    units: &[f64],
) -> Ascent {
    let p = start.len();
    let mut theta = start;
    let mut jet = eval(&theta, false);
    for iter in 1..=MAX_ITERATIONS {
        if !jet.value.is_finite() {
            return Ascent {
                params: theta,
                value: jet.value,
                iterations: iter,
                converged: false,
            };
        }
        let neg_h = DMatrix::from_fn(p, p, |i, j| -jet.hess[i][j] * scales[i] * scales[j]);
        let g_scaled = DVector::from_fn(p, |i, _| jet.grad[i] * scales[i]);
        let newton = neg_h.cholesky().map(|c| c.solve(&g_scaled));
        let gradient_step = || -> Vec<f64> { (0..p).map(|i| g_scaled[i] * scales[i]).collect() };
        let mut directions: Vec<Vec<f64>> = Vec::with_capacity(2);
        if let Some(z) = newton {
            directions.push((0..p).map(|i| z[i] * scales[i]).collect());
        }
        directions.push(gradient_step());

        let mut moved = false;
        for mut delta in directions {
            let ratio = (0..p).map(|i| (delta[i] / scales[i]).abs()).fold(0.0, f64::max);
            if ratio > 1.0 {
                delta.iter_mut().for_each(|d| *d /= ratio);
            }
            let full = (0..p).map(|i| (delta[i] / units[i]).abs()).fold(0.0, f64::max);
            if full < STEP_TOL {
                for i in 0..p {
                    theta[i] += delta[i];
                }
                return Ascent {
                    value: eval(&theta, true).value,
                    params: theta,
                    iterations: iter,
                    converged: true,
                };
            }
            let mut t = 1.0;
            for _ in 0..40 {
                let trial: Vec<f64> = (0..p).map(|i| theta[i] + t * delta[i]).collect();
                let v = eval(&trial, true).value;
                if v >= jet.value {
                    let step = (0..p).map(|i| (t * delta[i] / units[i]).abs()).fold(0.0, f64::max);
                    theta = trial;
                    if step < STEP_TOL {
                        return Ascent {
                            value: v,
                            params: theta,
                            iterations: iter,
                            converged: true,
                        };
                    }
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            // Neither direction improves the objective at any resolvable
            // step length: a numerical maximum.
            return Ascent {
                value: jet.value,
                params: theta,
                iterations: iter,
                converged: true,
            };
        }
        jet = eval(&theta, false);
    }
    Ascent {
        value: jet.value,
        params: theta,
        iterations: MAX_ITERATIONS,
        converged: false,
    }
}

/// Lattice of candidate local coordinates for the cold-start scan.
fn candidates(spec: &ManifoldSpec) -> Vec<Vec<f64>> {
    let grid = spec.grid.axis();
    let sigma = spec.sigma;
    let symmetric = |step: f64, limit: f64| -> Vec<f64> {
        if limit <= 0.0 {
            return vec![0.0];
        }
        let j = (limit / step).floor() as i64;
        (-j..=j).map(|k| k as f64 * step).collect()
    };
    let positions = || -> Vec<f64> {
        let (lo, hi) = grid.support_window(sigma);
        if lo > hi {
            return vec![grid.center()];
        }
        let step = 0.5 * sigma;
        let count = ((hi - lo) / step).floor() as usize;
        (0..=count).map(|k| lo + k as f64 * step).collect()
    };
    match spec.kind {
        ManifoldKind::Position => positions().into_iter().map(|a| vec![a]).collect(),
        ManifoldKind::PhaseSpace => {
            let ps = symmetric(0.25 / sigma, grid.band_limit() - 1.5 / sigma - 0.25 / sigma);
            let mut out = Vec::new();
            for a in positions() {
                for &p in &ps {
                    out.push(vec![a, p]);
                }
            }
            out
        }
        ManifoldKind::Momentum => symmetric(0.5 * sigma, grid.band_limit() - 5.0 * sigma)
            .into_iter()
            .map(|b| vec![b])
            .collect(),
    }
}

/// `|⟨c, r⟩|² / ‖c‖²` maximized over the lattice, scanning in ascending order.
fn scan_mode(spec: &ManifoldSpec, reduced: &[Complex64], template: &[f64], m: usize) -> (Vec<f64>, f64) {
    let idx = spec.local_indices(m);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut params = template.to_vec();
    for cand in candidates(spec) {
        for (&g, &c) in idx.iter().zip(&cand) {
            params[g] = c;
        }
        let v = spec.mode_jet(m, &params).v;
        let value = dot(&v, reduced).norm_sqr() / norm_sqr(&v);
        let better = match &best {
            None => true,
            Some((_, b)) => value > b * (1.0 + TIE_TOL),
        };
        if better {
            best = Some((cand, value));
        }
    }
    best.expect("candidate lattice is never empty")
}

/// Marginal density of `psi` along mode `m`.
fn marginal(psi: &[Complex64], n: usize, modes: usize, m: usize) -> Vec<f64> {
    let stride = n.pow((modes - 1 - m) as u32);
    let mut out = vec![0.0; n];
    for (idx, z) in psi.iter().enumerate() {
        out[(idx / stride) % n] += z.norm_sqr();
    }
    out
}

fn cold_start(spec: &ManifoldSpec, psi: &[Complex64]) -> Vec<f64> {
    let n = spec.grid.points();
    let modes = spec.modes();
    let grid = spec.grid.axis();
    let mut params = vec![0.0; spec.param_len()];
    if matches!(spec.kind, ManifoldKind::Position | ManifoldKind::PhaseSpace) {
        let (lo, hi) = grid.support_window(spec.sigma);
        for m in 0..modes {
            let dens = marginal(psi, n, modes, m);
            let mut k_best = 0;
            for (k, &d) in dens.iter().enumerate() {
                if d > dens[k_best] {
                    k_best = k;
                }
            }
            let x = grid.node(k_best);
            params[m] = if lo <= hi { x.clamp(lo, hi) } else { grid.center() };
        }
    }
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for m in 0..modes {
            let jets: Vec<Vec<Complex64>> = (0..modes).map(|k| spec.mode_jet(k, &params).v).collect();
            let views: Vec<&[Complex64]> = jets.iter().map(|v| v.as_slice()).collect();
            let reduced = contract_except(psi, n, &views, m);
            let (cand, _) = scan_mode(spec, &reduced, &params, m);
            for (&g, &c) in spec.local_indices(m).iter().zip(&cand) {
                if params[g] != c {
                    params[g] = c;
                    changed = true;
                }
            }
        }
        if !changed || modes == 1 {
            break;
        }
    }
    params
}

fn check_input(psi: &StateVector, expected: usize) -> Result<()> {
    if psi.len() != expected {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: expected,
        });
    }
    if !(psi.norm_sqr() > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok(())
}

/// Finds the manifold point nearest (in Fubini-Study distance) to `psi`.
///
/// `warm_start`, when given, replaces the lattice scan; the dynamics pass the
/// previous step's coordinates here.
pub fn project_to_manifold(
    psi: &StateVector,
    spec: &ManifoldSpec,
    warm_start: Option<&[f64]>,
) -> Result<Projection> {
    check_input(psi, spec.joint_dim())?;
    let psi_n = normalize(psi)?;
    let amps = psi_n.as_slice();
    let start = match warm_start {
        Some(w) => {
            spec.check_params(w)?;
            w.to_vec()
        }
        None => cold_start(spec, amps),
    };
    let out = ascend(
        |theta, value_only| manifold_jet(spec, amps, theta, value_only),
        start,
        &spec.natural_scales(),
        &spec.resolution(),
    );
    let distance = out.value.min(0.0).exp().sqrt().clamp(0.0, 1.0).acos();
    if !out.converged {
        return Err(Error::ProjectionFailure {
            params: out.params,
            distance,
            iterations: out.iterations,
        });
    }
    let member = spec.member_unchecked(&out.params)?;
    Ok(Projection {
        params: out.params,
        member,
        distance,
        iterations: out.iterations,
    })
}

fn factor_jet(spec: &ManifoldSpec, psi: &[Complex64], params: &[f64], value_only: bool) -> Jet {
    let n = spec.grid.points();
    let jet = spec.mode_jet(0, params);
    let (nm, ng, nh) = mode_norm_jet(&jet);
    let amp = contract_back(psi, n, &jet.v);
    let s = norm_sqr(&amp);
    let value = s.ln() - nm.ln();
    if value_only {
        return Jet {
            value,
            grad: vec![],
            hess: vec![],
        };
    }
    let p = jet.d.len();
    let first: Vec<Vec<Complex64>> = jet.d.iter().map(|d| contract_back(psi, n, d)).collect();
    let sg: Vec<f64> = first.iter().map(|a| 2.0 * dot(&amp, a).re).collect();
    let grad = (0..p).map(|i| sg[i] / s - ng[i] / nm).collect();
    let mut hess = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let second = contract_back(psi, n, &jet.dd[i][j]);
            let sij = 2.0 * (dot(&first[j], &first[i]).re + dot(&amp, &second).re);
            let h = sij / s - sg[i] * sg[j] / (s * s) - (nh[i][j] / nm - ng[i] * ng[j] / (nm * nm));
            hess[i][j] = h;
            hess[j][i] = h;
        }
    }
    Jet { value, grad, hess }
}

/// Best product approximation `χ ⊗ m(θ)` of a bipartite state whose trailing
/// factor is restricted to a single-mode manifold.
///
/// `psi` is read as a `(len / n) × n` row-major array with `n` the manifold
/// dimension. `χ` is optimized in closed form, leaving a search over `θ`
/// only.
pub fn project_last_factor(
    psi: &StateVector,
    spec: &ManifoldSpec,
    warm_start: Option<&[f64]>,
) -> Result<FactorProjection> {
    if spec.modes() != 1 {
        return Err(param_err("factors", "factor projection needs a single-mode manifold"));
    }
    let n = spec.joint_dim();
    if psi.len() % n != 0 || psi.len() / n < 2 {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: n,
        });
    }
    check_input(psi, psi.len())?;
    let psi_n = normalize(psi)?;
    let amps = psi_n.as_slice();
    let start = match warm_start {
        Some(w) => {
            spec.check_params(w)?;
            w.to_vec()
        }
        None => {
            let mut best: Option<(Vec<f64>, f64)> = None;
            for cand in candidates(spec) {
                let value = factor_jet(spec, amps, &cand, true).value;
                let better = match &best {
                    None => true,
                    Some((_, b)) => value > b + TIE_TOL * b.abs().max(1e-300),
                };
                if better {
                    best = Some((cand, value));
                }
            }
            best.expect("candidate lattice is never empty").0
        }
    };
    let out = ascend(
        |theta, value_only| factor_jet(spec, amps, theta, value_only),
        start,
        &spec.natural_scales(),
        &spec.resolution(),
    );
    let distance = out.value.min(0.0).exp().sqrt().clamp(0.0, 1.0).acos();
    if !out.converged {
        return Err(Error::ProjectionFailure {
            params: out.params,
            distance,
            iterations: out.iterations,
        });
    }
    let member = spec.member_unchecked(&out.params)?;
    let other = normalize(&StateVector::new(contract_back(amps, n, member.as_slice()))?)?;
    let product = kron(&other, &member);
    Ok(FactorProjection {
        params: out.params,
        other,
        member,
        product,
        distance,
        iterations: out.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fs_distance, Ray};
    use crate::packets::{make_phase_packet, make_position_packet, momentum_member, Grid};

    fn line() -> Grid {
        Grid::line(128, -16.0, 16.0).unwrap()
    }

    #[test]
    fn contract_except_matches_direct_sum() {
        let n = 16;
        let psi: Vec<Complex64> = (0..n * n * n)
            .map(|k| Complex64::new((k as f64 * 0.3).sin(), (k as f64 * 0.7).cos()))
            .collect();
        let w: Vec<Vec<Complex64>> = (0..3)
            .map(|m| (0..n).map(|k| Complex64::new((k + m) as f64, 1.0 - k as f64)).collect())
            .collect();
        let views: Vec<&[Complex64]> = w.iter().map(|v| v.as_slice()).collect();
        let r = contract_except(&psi, n, &views, 1);
        for (j, rj) in r.iter().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for k in 0..n {
                    direct += w[0][i].conj() * w[2][k].conj() * psi[i * n * n + j * n + k];
                }
            }
            assert!((direct - rj).norm() < 1e-9 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn member_projects_to_itself() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
        let psi = make_position_packet(&g, &[1.37], 1.0).unwrap();
        let proj = project_to_manifold(&psi, &spec, None).unwrap();
        assert!((proj.params[0] - 1.37).abs() < 1e-8);
        assert!(proj.distance < 1e-6);
    }

    #[test]
    fn phase_space_projection_recovers_both_coordinates() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::PhaseSpace, g, 1.0, 1).unwrap();
        let psi = make_phase_packet(&g, &[-2.3], &[0.9], 1.0).unwrap();
        let proj = project_to_manifold(&psi, &spec, None).unwrap();
        assert!((proj.params[0] + 2.3).abs() < 1e-8, "{:?}", proj.params);
        assert!((proj.params[1] - 0.9).abs() < 1e-8, "{:?}", proj.params);
    }

    #[test]
    fn momentum_projection_recovers_b() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::Momentum, g, 0.5, 1).unwrap();
        let psi = momentum_member(&g, &[0.8], 0.5).unwrap();
        let proj = project_to_manifold(&psi, &spec, None).unwrap();
        assert!((proj.params[0] - 0.8).abs() < 1e-8, "{:?}", proj.params);
    }

    #[test]
    fn wider_packet_projects_to_its_center() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
        let psi = make_position_packet(&g, &[0.6], 2.0).unwrap();
        let proj = project_to_manifold(&psi, &spec, None).unwrap();
        assert!((proj.params[0] - 0.6).abs() < 1e-8);
        let expected = overlap(2.0, 1.0).acos();
        assert!((proj.distance - expected).abs() < 1e-8);
    }

    fn overlap(d: f64, s: f64) -> f64 {
        crate::packets::overlap_centered(d, s, 1).unwrap()
    }

    #[test]
    fn symmetric_superposition_breaks_tie_toward_smaller_center() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
        let l = make_position_packet(&g, &[-4.0], 1.0).unwrap();
        let r = make_position_packet(&g, &[4.0], 1.0).unwrap();
        let cat = l.add_scaled(Complex64::new(1.0, 0.0), &r).unwrap();
        let proj = project_to_manifold(&cat, &spec, None).unwrap();
        // The far lobe drags the optimum a few thousandths inward.
        assert!((proj.params[0] + 4.0).abs() < 1e-2, "{:?}", proj.params);
    }

    #[test]
    fn two_factor_projection_and_reported_distance_agree() {
        let g = Grid::line(32, -8.0, 8.0).unwrap();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 2).unwrap();
        let a = make_position_packet(&g, &[-1.2], 1.0).unwrap();
        let b = make_position_packet(&g, &[0.8], 1.3).unwrap();
        let psi = kron(&a, &b);
        let proj = project_to_manifold(&psi, &spec, None).unwrap();
        assert!((proj.params[0] + 1.2).abs() < 1e-7 && (proj.params[1] - 0.8).abs() < 1e-7);
        let direct = fs_distance(&Ray::new(&psi).unwrap(), &Ray::new(&proj.member).unwrap()).unwrap();
        assert!((direct - proj.distance).abs() < 1e-8);
    }

    #[test]
    fn factor_projection_of_a_product_is_exact() {
        let g = Grid::line(32, -8.0, 8.0).unwrap();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
        let chi = make_phase_packet(&g, &[1.0], &[0.5], 0.7).unwrap();
        let dev = make_position_packet(&g, &[-0.4], 1.0).unwrap();
        let proj = project_last_factor(&kron(&chi, &dev), &spec, None).unwrap();
        assert!((proj.params[0] + 0.4).abs() < 1e-7);
        assert!(proj.distance < 1e-6);
    }

    #[test]
    fn dimension_errors() {
        let g = line();
        let spec = ManifoldSpec::new(ManifoldKind::Position, g, 1.0, 1).unwrap();
        let psi = StateVector::basis(10, 0).unwrap();
        assert!(matches!(
            project_to_manifold(&psi, &spec, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
