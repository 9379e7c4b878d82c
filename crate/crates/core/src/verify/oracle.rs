//! Independent reference computations used by the verification suites.
//!
//! Nothing here calls the closed forms it is used to check.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{generalized_uql, q_susceptibilities, QSusceptibilities};
use crate::linresp::GenericDetector;
use crate::schemes::DetectorParams;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Minimum of a unimodal function on `[lo, hi]` by golden-section search.
/// Returns `(argmin, min)`.
pub fn golden_section(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> (f64, f64) {
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - GOLDEN * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + GOLDEN * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    if flo.signum() == f(hi).signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Every sign change of `f` along `grid`, refined by bisection.
pub fn roots_on_grid(f: impl Fn(f64) -> f64, grid: &[f64]) -> Vec<f64> {
    grid.windows(2)
        .filter_map(|w| bisect(&f, w[0], w[1]))
        .collect()
}

pub const ETA_SCAN_LIMIT: f64 = 1e3;
pub const ETA_SCAN_POINTS: usize = 4000;

/// Generalized UQL minimized over `eta` by brute force: a scan over
/// `eta in [-1e3, 1e3]` (uniform in `asinh eta`) followed by golden-section
/// refinement between the neighbours of the best scan point.
///
/// Returns `(eta, value)`; `None` if the scan minimum sits on the boundary.
pub fn eta_scan(params: &DetectorParams, omega: f64) -> Option<(f64, f64)> {
    let f = |eta: f64| {
        q_susceptibilities(params, eta, omega)
            .and_then(|q| generalized_uql(&q))
            .unwrap_or(f64::INFINITY)
    };
    let t_max = ETA_SCAN_LIMIT.asinh();
    let ts: Vec<f64> = (0..=ETA_SCAN_POINTS)
        .map(|i| -t_max + 2.0 * t_max * i as f64 / ETA_SCAN_POINTS as f64)
        .collect();
    let best = (0..ts.len()).min_by(|&a, &b| f(ts[a].sinh()).total_cmp(&f(ts[b].sinh())))?;
    if best == 0 || best == ts.len() - 1 {
        return None;
    }
    let g = |t: f64| f(t.sinh());
    let (t, v) = golden_section(g, ts[best - 1], ts[best + 1], 200);
    Some((t.sinh(), v))
}

/// `min_g S'_f` by golden-section search in `ln g` over `[1e-7, 1e7]`.
/// `S'_f` is convex in `ln g^2`.
pub fn min_over_coupling(det: &GenericDetector) -> (f64, f64) {
    let f =
        |lg: f64| crate::linresp::sprime_f(&det.with_coupling(lg.exp())).unwrap_or(f64::INFINITY);
    let (lg, v) = golden_section(f, -16.0, 16.0, 300);
    (lg.exp(), v)
}

fn uniform_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// A random detector obeying the spectral uncertainty relation, with
/// `S_FF` set `extra / S_ZZ` above saturation.
pub fn random_detector(rng: &mut ChaCha8Rng) -> GenericDetector {
    let chi_ff = uniform_c(rng, 2.0);
    let s_zz = rng.gen_range(0.05..3.0);
    let s_zf = uniform_c(rng, 1.0);
    let b = chi_ff.im * s_zz + s_zf.im;
    let extra = rng.gen_range(0.0..1.0);
    let s_ff = (s_zf.norm_sqr() + b.abs() + 0.25 + extra) / s_zz;
    let omega = 10f64.powf(rng.gen_range(-2.0..1.0));
    GenericDetector {
        omega,
        chi_ff,
        s_ff,
        s_zz,
        s_zf,
        q: QSusceptibilities {
            omega,
            chi_qq: uniform_c(rng, 3.0),
            chi_qx: uniform_c(rng, 3.0),
        },
        g: rng.gen_range(0.1..4.0),
    }
}

/// Random rates: `Omega in [0.05, 2]`, `Gamma in [0.01, 1]`,
/// `gamma in [0.5, 5]`, `g in ±[0.1, 3]`, `Delta` from `detuning`.
pub fn random_params(rng: &mut ChaCha8Rng, detuning: std::ops::Range<f64>) -> DetectorParams {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let delta = if detuning.is_empty() {
        detuning.start
    } else {
        rng.gen_range(detuning)
    };
    DetectorParams::new(
        rng.gen_range(0.05..2.0),
        rng.gen_range(0.01..1.0),
        rng.gen_range(0.5..5.0),
        delta,
        sign * rng.gen_range(0.1..3.0),
    )
    .expect("sampled rates are valid")
}

/// Log-uniform frequency in `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}
