//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss–Kronrod 7/15 panel: (Kronrod estimate, |K15 − G7|).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on G7–K15 panels until the local error estimate drops
/// below `tol` (absolute, split across panels).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 40)
}

/// 1D normalized Gaussian amplitude of width `s` centred at 0.
pub fn gauss(x: f64, s: f64) -> f64 {
    (2.0 * std::f64::consts::PI * s * s).powf(-0.25) * (-x * x / (4.0 * s * s)).exp()
}

/// `⟨φ_d, g_σ⟩` by quadrature: on the line for `dims = 1`, radially in 3D
/// for `dims = 3`.
pub fn overlap_quadrature(d: f64, sigma: f64, dims: u32) -> f64 {
    let width = 1.0 / (1.0 / (sigma * sigma) + 1.0 / (d * d)).sqrt();
    let cut = 60.0 * width;
    match dims {
        1 => 2.0 * integrate(|x| gauss(x, sigma) * gauss(x, d), 0.0, cut, 1e-16),
        3 => {
            let amp = |r: f64, s: f64| (2.0 * std::f64::consts::PI * s * s).powf(-0.75) * (-r * r / (4.0 * s * s)).exp();
            integrate(
                |r| 4.0 * std::f64::consts::PI * r * r * amp(r, sigma) * amp(r, d),
                0.0,
                cut,
                1e-16,
            )
        }
        _ => panic!("oracle covers dims 1 and 3"),
    }
}
