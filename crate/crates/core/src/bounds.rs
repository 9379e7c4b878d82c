//! Mechanical and cavity susceptibilities and the quantum-limit bounds on
//! the force noise `S_f`.
//!
//! | bound            | value                                   |
//! |------------------|-----------------------------------------|
//! | SQL              | `1/|chi_a|`                             |
//! | UQL              | `|Im(1/chi_a)| = omega Gamma / Omega`   |
//! | generalized UQL  | `|Im chi_qq| / |chi_qx|^2`              |
//! | optimal UQL      | generalized UQL minimized over `eta`    |

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schemes::DetectorParams;

/// Denominators below this magnitude are treated as exact zeros.
const TINY: f64 = 1e-300;

/// `1/chi_a = ((Gamma/2 - i omega)^2 + Omega^2) / Omega`. Always finite.
pub fn inverse_chi_a(params: &DetectorParams, omega: f64) -> Complex64 {
    let s = Complex64::new(params.mech_damping / 2.0, -omega);
    (s * s + params.mech_frequency * params.mech_frequency) / params.mech_frequency
}

/// Mechanical susceptibility `chi_a = Omega / ((Gamma/2 - i omega)^2 + Omega^2)`.
pub fn chi_a(params: &DetectorParams, omega: f64) -> Result<Complex64> {
    let s = Complex64::new(params.mech_damping / 2.0, -omega);
    let den = s * s + params.mech_frequency * params.mech_frequency;
    if den.norm() < TINY {
        return Err(Error::MechanicalResonanceSingularity { omega });
    }
    Ok(params.mech_frequency / den)
}

/// Resonant cavity susceptibility `chi_b = 1/(gamma/2 - i omega)`.
pub fn chi_b(params: &DetectorParams, omega: f64) -> Complex64 {
    1.0 / Complex64::new(params.cavity_decay / 2.0, -omega)
}

/// Detuned cavity pair `(chi_r, chi_delta) = (r, Delta) / (r^2 + Delta^2)`,
/// `r = gamma/2 - i omega`.
pub fn detuned_cavity_susceptibilities(
    params: &DetectorParams,
    omega: f64,
) -> (Complex64, Complex64) {
    let r = Complex64::new(params.cavity_decay / 2.0, -omega);
    let den = r * r + params.detuning * params.detuning;
    (r / den, params.detuning / den)
}

pub fn sql(params: &DetectorParams, omega: f64) -> Result<f64> {
    Ok(1.0 / chi_a(params, omega)?.norm())
}

pub fn uql(params: &DetectorParams, omega: f64) -> f64 {
    (omega * params.mech_damping / params.mech_frequency).abs()
}

/// Susceptibilities of the coupling operator `q = x + eta p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSusceptibilities {
    pub omega: f64,
    /// Response of `q` to a force conjugate to `q`.
    pub chi_qq: Complex64,
    /// Response of `q` to the signal force, which couples through `x`.
    pub chi_qx: Complex64,
}

pub fn q_susceptibilities(
    params: &DetectorParams,
    eta: f64,
    omega: f64,
) -> Result<QSusceptibilities> {
    let ca = chi_a(params, omega)?;
    let s = Complex64::new(params.mech_damping / 2.0, -omega);
    Ok(QSusceptibilities {
        omega,
        chi_qq: (1.0 + eta * eta) * ca,
        chi_qx: (1.0 + eta * s / params.mech_frequency) * ca,
    })
}

/// `|Im chi_qq| / |chi_qx|^2`.
pub fn generalized_uql(q: &QSusceptibilities) -> Result<f64> {
    let denom = q.chi_qx.norm_sqr();
    if q.chi_qx.norm() < TINY || denom == 0.0 {
        return Err(Error::ZeroResponseSusceptibility { omega: q.omega });
    }
    Ok(q.chi_qq.im.abs() / denom)
}

/// Generalized UQL minimized over every linear coupling `q = x + eta p`:
///
/// `(Gamma / 2 omega Omega) [Gamma^2/4 + omega^2 + Omega^2
///   - sqrt((Gamma^2/4 + omega^2 - Omega^2)^2 + Gamma^2 Omega^2)]`.
///
/// Evaluated in the rationalized form `2 Gamma omega Omega / (a + sqrt(b))`
/// (the bracket is `(a^2 - b)/(a + sqrt b)` with `a^2 - b = 4 omega^2 Omega^2`),
/// which avoids cancellation and returns 0 at `omega = 0`.
pub fn optimal_uql(params: &DetectorParams, omega: f64) -> f64 {
    let om = params.mech_frequency;
    let gm = params.mech_damping;
    let w = omega.abs();
    let q = gm * gm / 4.0 + w * w;
    let a = q + om * om;
    let b = (q - om * om).powi(2) + gm * gm * om * om;
    let den = a + b.sqrt();
    if den == 0.0 {
        return 0.0;
    }
    2.0 * gm * w * om / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsys::{ChannelKind, DriftMatrix, LinearModel, NoiseChannel};
    use crate::noise::QuadratureSpectrum;
    use proptest::prelude::*;

    fn params(om: f64, gm: f64) -> DetectorParams {
        DetectorParams::new(om, gm, 3.0, 0.0, 1.0).unwrap()
    }

    /// Golden-section minimum of a unimodal function on `[lo, hi]`.
    fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - ratio * (hi - lo);
        let mut d = lo + ratio * (hi - lo);
        for _ in 0..200 {
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - ratio * (hi - lo);
            d = lo + ratio * (hi - lo);
        }
        f(0.5 * (lo + hi))
    }

    #[test]
    fn zero_frequency_values() {
        let p = params(2.0, 0.0);
        assert!((chi_b(&p, 0.0) - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((chi_a(&p, 0.0).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((sql(&p, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(uql(&p, 0.0), 0.0);
        assert_eq!(optimal_uql(&params(1.0, 1.0), 0.0), 0.0);
    }

    #[test]
    fn undamped_resonance_is_singular() {
        let p = params(1.0, 0.0);
        assert!(matches!(
            chi_a(&p, 1.0),
            Err(Error::MechanicalResonanceSingularity { .. })
        ));
        // SQL closes in on zero approaching the resonance.
        let near = sql(&p, 1.0 - 1e-6).unwrap();
        assert!(near < 1e-5);
    }

    #[test]
    fn uql_equals_frequency_when_damping_matches_resonance() {
        let p = params(0.01, 0.01);
        for w in [1e-3, 0.02, 3.0] {
            assert!((uql(&p, w) - w).abs() < 1e-18);
        }
    }

    #[test]
    fn q_susceptibilities_special_cases() {
        let p = params(1.3, 0.4);
        let w = 0.9;
        let ca = chi_a(&p, w).unwrap();
        let q0 = q_susceptibilities(&p, 0.0, w).unwrap();
        assert_eq!(q0.chi_qq, ca);
        assert_eq!(q0.chi_qx, ca);
        let q1 = q_susceptibilities(&p, 1.0, w).unwrap();
        assert!((q1.chi_qq - 2.0 * ca).norm() < 1e-15);
        let s = Complex64::new(0.2, -w);
        assert!((q1.chi_qx - (1.0 + s / 1.3) * ca).norm() < 1e-15);
    }

    #[test]
    fn generalized_uql_at_eta_zero_is_uql() {
        let p = params(0.7, 0.3);
        for w in [0.01, 0.5, 2.0, 30.0] {
            let q = q_susceptibilities(&p, 0.0, w).unwrap();
            let g = generalized_uql(&q).unwrap();
            assert!((g - uql(&p, w)).abs() <= 1e-12 * uql(&p, w));
        }
    }

    #[test]
    fn generalized_uql_reference_point() {
        // eta = 1, Gamma = Omega = omega = 1: 2 / ((1 + 1/2)^2 + 1) = 2/3.25.
        let p = params(1.0, 1.0);
        let q = q_susceptibilities(&p, 1.0, 1.0).unwrap();
        let direct = 2.0 / (1.5f64.powi(2) + 1.0);
        assert!((generalized_uql(&q).unwrap() - direct).abs() < 1e-14);
        assert!((direct - 0.615_384_615_384_615_4).abs() < 1e-15);
    }

    #[test]
    fn generalized_uql_beats_uql_for_matched_damping() {
        let p = params(1.0, 1.0);
        for i in 0..200 {
            let w = 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0);
            let q = q_susceptibilities(&p, 1.0, w).unwrap();
            let ratio = generalized_uql(&q).unwrap() / uql(&p, w);
            assert!((ratio - 2.0 / (2.25 + w * w)).abs() < 1e-12);
            assert!(ratio < 1.0);
        }
    }

    #[test]
    fn zero_chi_qx_reported() {
        let q = QSusceptibilities {
            omega: 0.5,
            chi_qq: Complex64::new(0.0, 1.0),
            chi_qx: Complex64::new(0.0, 0.0),
        };
        assert!(matches!(
            generalized_uql(&q),
            Err(Error::ZeroResponseSusceptibility { .. })
        ));
    }

    #[test]
    fn optimal_uql_printed_form_and_reference_point() {
        let p = params(1.0, 1.0);
        let printed = 0.5 * (2.25 - 1.0625f64.sqrt());
        assert!((optimal_uql(&p, 1.0) - printed).abs() < 1e-14);
        assert!((printed - 0.609_611_796_797_792).abs() < 1e-12);
        let q = q_susceptibilities(&p, 1.0, 1.0).unwrap();
        assert!(optimal_uql(&p, 1.0) <= generalized_uql(&q).unwrap());
    }

    #[test]
    fn optimal_uql_high_frequency_limit() {
        let p = params(1.0, 1.0);
        let w = 100.0;
        let ratio = optimal_uql(&p, w) * w / (p.mech_damping * p.mech_frequency);
        assert!((ratio - 1.0).abs() < 0.01);
    }

    #[test]
    fn optimal_uql_matches_eta_minimization() {
        let cases = [
            (1.0, 1.0, 1.0),
            (1.0, 0.1, 0.3),
            (2.0, 0.5, 4.0),
            (0.5, 1.5, 0.05),
        ];
        for (om, gm, w) in cases {
            let p = params(om, gm);
            let f = |eta: f64| generalized_uql(&q_susceptibilities(&p, eta, w).unwrap()).unwrap();
            // Coarse scan to bracket, then golden section.
            let grid: Vec<f64> = (0..=4000).map(|i| -1e3 + 2e3 * i as f64 / 4000.0).collect();
            let best = grid
                .iter()
                .copied()
                .min_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            let step = 2e3 / 4000.0;
            let found = golden_min(f, best - step, best + step);
            let closed = optimal_uql(&p, w);
            assert!(
                (found - closed).abs() <= 1e-8 * closed,
                "{om} {gm} {w}: scan {found} vs closed {closed}"
            );
        }
    }

    #[test]
    fn sql_is_minimum_over_coupling_of_resonant_sf() {
        let p = DetectorParams::new(0.01, 0.01, 3.0, 0.0, 1.0).unwrap();
        for w in [0.003, 0.01, 0.2, 2.0] {
            let ca = chi_a(&p, w).unwrap().norm();
            let cb = chi_b(&p, w).norm();
            let sf = |log_g: f64| {
                let g2 = (2.0 * log_g).exp();
                0.5 * (g2 * 3.0 * cb * cb + 1.0 / (g2 * 3.0 * ca * ca * cb * cb))
            };
            let min = golden_min(sf, -20.0, 20.0);
            let bound = sql(&p, w).unwrap();
            assert!((min - bound).abs() <= 1e-9 * bound, "{w}: {min} vs {bound}");
        }
    }

    #[test]
    fn chi_qx_matches_driven_mechanical_model() {
        // Perturb H_m -> H_m - f_q q - f_x x in a bare damped oscillator and
        // read q = x + eta p from the frequency-domain solve.
        let (om, gm) = (1.2, 0.35);
        let p = params(om, gm);
        let drift = DriftMatrix::from_rows(
            ["x", "p", "b1", "b2"],
            [
                [-gm / 2.0, om, 0.0, 0.0],
                [-om, -gm / 2.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
            ],
        )
        .unwrap();
        let channels = vec![NoiseChannel {
            id: "port".into(),
            kind: ChannelKind::Readout,
            rate: 2.0,
            rows: (2, 3),
            spectrum: QuadratureSpectrum::vacuum(),
        }];
        let model = LinearModel::new(drift, channels, 1, 0.0).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        for eta in [-2.0, 0.0, 0.5, 3.0] {
            for w in [0.1, 1.0, 4.0] {
                let f_x = vec![zero, Complex64::new(1.0, 0.0), zero, zero];
                let f_q = vec![
                    Complex64::new(-eta, 0.0),
                    Complex64::new(1.0, 0.0),
                    zero,
                    zero,
                ];
                let x1 = crate::linsys::solve_frequency(&model, w, &f_x).unwrap();
                let x2 = crate::linsys::solve_frequency(&model, w, &f_q).unwrap();
                let chi_qx = x1[0] + eta * x1[1];
                let chi_qq = x2[0] + eta * x2[1];
                let q = q_susceptibilities(&p, eta, w).unwrap();
                assert!((chi_qx - q.chi_qx).norm() <= 1e-8 * q.chi_qx.norm());
                assert!((chi_qq - q.chi_qq).norm() <= 1e-8 * q.chi_qq.norm());
            }
        }
    }

    proptest! {
        #[test]
        fn imag_inverse_chi_a(om in 0.01f64..10.0, gm in 0.0f64..5.0, w in 0.0f64..20.0) {
            let p = params(om, gm);
            let inv = 1.0 / chi_a(&p, w).unwrap();
            prop_assert!((inv.im + w * gm / om).abs() <= 1e-12 * (1.0 + inv.norm()));
            prop_assert!((inverse_chi_a(&p, w) - inv).norm() <= 1e-12 * inv.norm());
        }

        #[test]
        fn sql_times_chi_a_is_one(om in 0.01f64..10.0, gm in 0.0f64..5.0, w in 0.0f64..20.0) {
            let p = params(om, gm);
            if let Ok(ca) = chi_a(&p, w) {
                prop_assert!((sql(&p, w).unwrap() * ca.norm() - 1.0).abs() < 1e-14);
            }
        }

        #[test]
        fn optimal_is_below_every_eta(
            om in 0.05f64..5.0, gm in 0.01f64..3.0, w in 0.01f64..10.0, eta in -50.0f64..50.0,
        ) {
            let p = params(om, gm);
            let q = q_susceptibilities(&p, eta, w).unwrap();
            let opt = optimal_uql(&p, w);
            prop_assert!(opt >= 0.0);
            prop_assert!(generalized_uql(&q).unwrap() - opt >= -1e-10 * opt);
            prop_assert!(uql(&p, w) - opt >= -1e-10 * opt);
        }

        #[test]
        fn bounds_scale_with_frequency_unit(
            om in 0.05f64..5.0, gm in 0.01f64..3.0, w in 0.01f64..10.0,
            eta in -5.0f64..5.0, lambda in 0.01f64..100.0,
        ) {
            let p = params(om, gm);
            let mut ps = p;
            ps.mech_frequency *= lambda;
            ps.mech_damping *= lambda;
            ps.cavity_decay *= lambda;
            let ws = w * lambda;
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1e-300);
            prop_assert!(close(sql(&ps, ws).unwrap(), lambda * sql(&p, w).unwrap()));
            prop_assert!(close(uql(&ps, ws), lambda * uql(&p, w)));
            prop_assert!(close(optimal_uql(&ps, ws), lambda * optimal_uql(&p, w)));
            let g = generalized_uql(&q_susceptibilities(&p, eta, w).unwrap()).unwrap();
            let gs = generalized_uql(&q_susceptibilities(&ps, eta, ws).unwrap()).unwrap();
            prop_assert!(close(gs, lambda * g));
        }
    }
}
