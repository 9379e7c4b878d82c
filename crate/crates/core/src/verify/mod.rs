//! Numerical verification suites.
//!
//! Each check compares a measured quantity against a pinned threshold and
//! reports both. Randomized checks draw from a ChaCha8 stream seeded by the
//! suite seed mixed with the criterion number, so every criterion is
//! reproducible on its own.

pub mod oracle;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, chi_a, chi_b};
use crate::error::{Error, Result};
use crate::linresp::{
    self, combined_quantities, feedback_added_noise, g_optimized_bound, uncertainty_check,
    GenericDetector,
};
use crate::linsys::{transfer, Mat2};
use crate::noise::{force_noise, sensitivity_spectrum, squeeze_spectrum, QuadratureSpectrum};
use crate::presets;
use crate::schemes::{build, closed_form_transfer, cqnc_closed_form, SchemeConfig};

pub const DEFAULT_SEED: u64 = 20_140_923;

/// Relative slack allowed below a lower bound.
pub const BOUND_SLACK: f64 = 1e-9;
pub const SQL_GAP: f64 = 1e-9;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const BACKACTION_TOLERANCE: f64 = 1e-12;
pub const CQNC_LIMIT_TOLERANCE: f64 = 0.01;
pub const CQNC_LARGE_COUPLING: f64 = 1e3;
pub const NEAR_ATTAINMENT: f64 = 1.1;
pub const OPTIMAL_UQL_TOLERANCE: f64 = 1e-8;
pub const HIGH_FREQUENCY_TOLERANCE: f64 = 0.01;
pub const FEEDBACK_TOLERANCE: f64 = 1e-9;
pub const DOMINANCE_RUNTIME_S: f64 = 5.0;
pub const FEEDBACK_GAINS: [f64; 5] = [0.0, 0.5, -0.5, 5.0, -5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn less(criterion: u8, name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            relation: Relation::Less,
            threshold,
            passed: measured < threshold,
            detail: String::new(),
        }
    }

    fn at_least(criterion: u8, name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            threshold,
            passed: measured >= threshold,
            detail: String::new(),
        }
    }

    fn failed(criterion: u8, name: impl Into<String>, err: &Error) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured: f64::NAN,
            relation: Relation::Less,
            threshold: f64::NAN,
            passed: false,
            detail: err.to_string(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Less => "<",
            Relation::AtLeast => ">=",
        };
        write!(
            f,
            "[{}] {:>2} {}: measured {:.6e} {} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.measured,
            rel,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    UqlDominance,
    Identities,
    Cqnc,
    Bounds,
    Linresp,
    Feedback,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::UqlDominance,
        Suite::Identities,
        Suite::Cqnc,
        Suite::Bounds,
        Suite::Linresp,
        Suite::Feedback,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::UqlDominance => "uql-dominance",
            Suite::Identities => "identities",
            Suite::Cqnc => "cqnc",
            Suite::Bounds => "bounds",
            Suite::Linresp => "linresp",
            Suite::Feedback => "feedback",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .chain([Suite::All].iter())
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite `{s}`")))
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::UqlDominance => [uql_dominance(), sql_attainment()].concat(),
        Suite::Identities => [closed_form_equivalence(seed), corrected_identities(seed)].concat(),
        Suite::Cqnc => cqnc_cancellation(),
        Suite::Bounds => [toy_generalized_uql(), optimal_uql(seed)].concat(),
        Suite::Linresp => linear_response_chain(seed),
        Suite::Feedback => feedback_invariance(seed),
        Suite::All => Suite::ALL
            .iter()
            .flat_map(|s| run_suite(*s, seed))
            .collect(),
    }
}

fn rng_for(seed: u64, criterion: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (u64::from(criterion) << 56))
}

fn fig2a_omegas() -> Vec<f64> {
    presets::fig2a_grid().omegas().expect("valid preset grid")
}

/// Criterion 1: every fig2a curve stays above the UQL.
pub fn uql_dominance() -> Vec<Check> {
    let start = Instant::now();
    let grid = fig2a_omegas();
    let mut checks = Vec::new();
    for (name, cfg) in presets::fig2a_curves() {
        let label = format!("{name} S_f / UQL minimum");
        match sensitivity_spectrum(&cfg, &grid) {
            Ok(s) => {
                let min = (0..s.len())
                    .map(|i| s.s_f[i] / s.uql[i])
                    .fold(f64::INFINITY, f64::min);
                checks.push(Check::at_least(1, label, min, 1.0 - BOUND_SLACK));
            }
            Err(e) => checks.push(Check::failed(1, label, &e)),
        }
    }
    checks.push(Check::less(
        1,
        "fig2a sweep runtime [s]",
        start.elapsed().as_secs_f64(),
        DOMINANCE_RUNTIME_S,
    ));
    checks
}

/// Criterion 2: the standard curve touches the SQL where shot noise and
/// backaction balance; variational readout and detuning dip below it.
pub fn sql_attainment() -> Vec<Check> {
    let grid = fig2a_omegas();
    let mut checks = Vec::new();
    let curves = presets::fig2a_curves();
    let standard = &curves[0].1;
    match sensitivity_spectrum(standard, &grid) {
        Ok(s) => {
            let min = (0..s.len())
                .map(|i| s.s_f[i] / s.sql[i])
                .fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(
                2,
                "standard S_f / SQL minimum",
                min,
                1.0 - BOUND_SLACK,
            ));
        }
        Err(e) => checks.push(Check::failed(2, "standard S_f / SQL minimum", &e)),
    }

    // Balance: g^2 gamma |chi_b|^2 |chi_a| = 1.
    let p = standard.params;
    let balance = |w: f64| {
        let ca = chi_a(&p, w).map(|c| c.norm()).unwrap_or(f64::INFINITY);
        let cb = chi_b(&p, w).norm_sqr();
        (p.coupling * p.coupling * p.cavity_decay * cb * ca).ln()
    };
    let roots = oracle::roots_on_grid(balance, &grid);
    let gap = build(standard).and_then(|model| {
        if roots.is_empty() {
            return Err(Error::InvalidConfig(
                "no balance frequency on the grid".into(),
            ));
        }
        let mut worst: f64 = 0.0;
        for &w in &roots {
            let sql = bounds::sql(&p, w)?;
            worst = worst.max((force_noise(&model, w)? / sql - 1.0).abs());
        }
        Ok(worst)
    });
    match gap {
        Ok(gap) => checks.push(
            Check::less(2, "standard SQL gap at balance frequency", gap, SQL_GAP).with_detail(
                format!(
                    "omega* = {}",
                    roots
                        .iter()
                        .map(|w| format!("{w:.10}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            ),
        ),
        Err(e) => checks.push(Check::failed(
            2,
            "standard SQL gap at balance frequency",
            &e,
        )),
    }

    for (name, cfg) in &curves[1..3] {
        let label = format!("{name} S_f / SQL minimum");
        match sensitivity_spectrum(cfg, &grid) {
            Ok(s) => {
                let (i, min) = (0..s.len())
                    .map(|i| (i, s.s_f[i] / s.sql[i]))
                    .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
                checks.push(
                    Check::less(2, label, min, 1.0)
                        .with_detail(format!("at omega = {:.6e}", s.omegas[i])),
                );
            }
            Err(e) => checks.push(Check::failed(2, label, &e)),
        }
    }
    checks
}

fn max_entry_error(num: &Mat2, cf: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for (rn, rc) in num.iter().zip(cf) {
        for (a, b) in rn.iter().zip(rc) {
            worst = worst.max(entry_error(*a, *b));
        }
    }
    worst
}

/// Relative error of one entry; exact zeros are compared absolutely.
fn entry_error(num: Complex64, cf: Complex64) -> f64 {
    let scale = cf.norm();
    if scale == 0.0 {
        num.norm()
    } else {
        (num - cf).norm() / scale
    }
}

/// Criterion 3: matrix-solve transfer equals the closed-form blocks.
pub fn closed_form_equivalence(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    let mut rejected = 0;
    let mut error = None;
    while draws < 100 {
        let p = oracle::random_params(&mut rng, -5.0..5.0);
        let omega = oracle::log_uniform(&mut rng, 1e-2, 10.0);
        let Ok(model) = build(&SchemeConfig::standard(p)) else {
            rejected += 1;
            continue;
        };
        let result = transfer(&model, omega).and_then(|num| {
            let cf = closed_form_transfer(&p, omega)?;
            let m = max_entry_error(&num.m, &cf.m());
            let v = entry_error(num.v[0], cf.v[0]).max(entry_error(num.v[1], cf.v[1]));
            Ok(m.max(v))
        });
        match result {
            Ok(e) => worst = worst.max(e),
            Err(e) => {
                error = Some(e);
                break;
            }
        }
        draws += 1;
    }
    let name = "numeric vs closed-form transfer, max entrywise relative error";
    match error {
        Some(e) => vec![Check::failed(3, name, &e)],
        None => vec![Check::less(3, name, worst, CLOSED_FORM_TOLERANCE)
            .with_detail(format!("100 stable draws, {rejected} unstable rejected"))],
    }
}

/// Criterion 4: the two algebraic identities behind the combined-scheme bound.
pub fn corrected_identities(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 4);
    let mut cross: f64 = 0.0;
    let mut det: f64 = 0.0;
    for i in 0..200 {
        let p = oracle::random_params(&mut rng, -5.0..5.0);
        let omega = oracle::log_uniform(&mut rng, 1e-2, 10.0);
        let xi = rand::Rng::gen_range(&mut rng, -20.0..20.0);
        let input = if i % 4 == 0 {
            QuadratureSpectrum::vacuum()
        } else {
            squeeze_spectrum(
                rand::Rng::gen_range(&mut rng, 0.0..1.5),
                rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::PI),
            )
        };
        match combined_quantities(&p, omega, xi, input, p.coupling) {
            Ok(q) => {
                cross = cross.max(q.cross_identity_residual());
                det = det.max(q.determinant_identity_residual());
            }
            Err(e) => return vec![Check::failed(4, "combined identities", &e)],
        }
    }
    vec![
        Check::less(
            4,
            "|EX - DY - |C|^2| / |C|^2 maximum",
            cross,
            IDENTITY_TOLERANCE,
        ),
        Check::less(
            4,
            "|KL - H^2 - (uv - w^2)| maximum",
            det,
            IDENTITY_TOLERANCE,
        ),
    ]
}

/// `Gamma/(2 Omega^2) (omega^2 + Omega^2 + Gamma^2/4)`.
pub fn cqnc_limit(params: &crate::schemes::DetectorParams, omega: f64) -> f64 {
    let om = params.mech_frequency;
    let gm = params.mech_damping;
    gm / (2.0 * om * om) * (omega * omega + om * om + gm * gm / 4.0)
}

/// Criterion 5: the ancilla removes backaction, and strong coupling reaches
/// the ancilla-limited density.
pub fn cqnc_cancellation() -> Vec<Check> {
    let grid = fig2a_omegas();
    let base = presets::fig2a_params();
    let mut checks = Vec::new();
    for g in [base.coupling, CQNC_LARGE_COUPLING] {
        let p = base.with_coupling(g);
        let name = format!("backaction block magnitude, g = {g}");
        let result = build(&SchemeConfig::cqnc(p)).and_then(|model| {
            let mut worst: f64 = 0.0;
            for &w in &grid {
                let num = transfer(&model, w)?;
                let shot = cqnc_closed_form(&p, w)?.m;
                for (rn, rs) in num.m.iter().zip(&shot) {
                    for (a, b) in rn.iter().zip(rs) {
                        worst = worst.max((a - b).norm());
                    }
                }
            }
            Ok(worst)
        });
        checks.push(match result {
            Ok(v) => Check::less(5, name, v, BACKACTION_TOLERANCE),
            Err(e) => Check::failed(5, name, &e),
        });
    }

    let p = base.with_coupling(CQNC_LARGE_COUPLING);
    let name = format!("|S_f / ancilla limit - 1| maximum, g = {CQNC_LARGE_COUPLING}");
    let result = build(&SchemeConfig::cqnc(p)).and_then(|model| {
        let mut worst: (f64, f64) = (0.0, 0.0);
        for &w in &grid {
            let dev = (force_noise(&model, w)? / cqnc_limit(&p, w) - 1.0).abs();
            if dev > worst.0 {
                worst = (dev, w);
            }
        }
        Ok(worst)
    });
    checks.push(match result {
        Ok((dev, w)) => Check::less(5, name, dev, CQNC_LIMIT_TOLERANCE)
            .with_detail(format!("worst at omega = {w:.6e}")),
        Err(e) => Check::failed(5, name, &e),
    });
    checks
}

/// Criterion 6: the toy detector respects, and nearly reaches, its
/// generalized UQL, which lies below the usual UQL.
pub fn toy_generalized_uql() -> Vec<Check> {
    let grid = presets::fig2b_grid().omegas().expect("valid preset grid");
    match sensitivity_spectrum(&presets::fig2b_config(), &grid) {
        Ok(s) => {
            let (i, min) = (0..s.len())
                .map(|i| (i, s.s_f[i] / s.guql[i]))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let below = (0..s.len())
                .map(|i| s.guql[i] / s.uql[i])
                .fold(f64::NEG_INFINITY, f64::max);
            vec![
                Check::at_least(6, "toy S_f / gUQL minimum", min, 1.0 - BOUND_SLACK),
                Check::less(6, "toy S_f / gUQL near-attainment", min, NEAR_ATTAINMENT)
                    .with_detail(format!("at omega = {:.6e}", s.omegas[i])),
                Check::less(6, "gUQL / UQL maximum", below, 1.0),
            ]
        }
        Err(e) => vec![Check::failed(6, "toy spectrum", &e)],
    }
}

/// Criterion 7: closed-form optimal UQL against a brute-force minimization
/// over `eta`, and its high-frequency limit.
pub fn optimal_uql(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 7);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut rejected = 0;
    while done < 50 {
        let p = oracle::random_params(&mut rng, 0.0..0.0);
        let omega = oracle::log_uniform(&mut rng, 1e-2, 10.0);
        let Some((_, scan)) = oracle::eta_scan(&p, omega) else {
            rejected += 1;
            continue;
        };
        let closed = bounds::optimal_uql(&p, omega);
        worst = worst.max((closed - scan).abs() / scan);
        done += 1;
    }
    let p = crate::schemes::DetectorParams::new(1.0, 1.0, 1.0, 0.0, 1.0).expect("valid");
    let w = 100.0 * p.mech_frequency;
    let limit = (bounds::optimal_uql(&p, w) * w / (p.mech_damping * p.mech_frequency) - 1.0).abs();
    vec![
        Check::less(
            7,
            "optimal UQL vs eta scan, max relative error",
            worst,
            OPTIMAL_UQL_TOLERANCE,
        )
        .with_detail(format!("50 draws, {rejected} with optimum beyond the scan")),
        Check::less(
            7,
            "|opt_uql omega / (Gamma Omega) - 1| at omega = 100 Omega",
            limit,
            HIGH_FREQUENCY_TOLERANCE,
        ),
    ]
}

/// Criterion 8: `min_g S'_f >= g-optimized bound >= |chi_qq^I|` for random
/// detectors, and the standard detector obeys the uncertainty relation.
pub fn linear_response_chain(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 8);
    let mut gap_min = f64::INFINITY;
    let mut floor_min = f64::INFINITY;
    let mut slack_min = f64::INFINITY;
    for _ in 0..100 {
        let det = oracle::random_detector(&mut rng);
        slack_min = slack_min.min(uncertainty_check(&det).slack);
        let (_, min) = oracle::min_over_coupling(&det);
        let bound = g_optimized_bound(&det);
        let scale = bound.abs().max(f64::MIN_POSITIVE);
        gap_min = gap_min.min((min - bound) / scale);
        floor_min = floor_min.min((bound - det.q.chi_qq.im.abs()) / scale);
    }
    let mut checks = vec![
        Check::at_least(
            8,
            "(min_g S'_f - bound) / bound minimum",
            gap_min,
            -BOUND_SLACK,
        ),
        Check::at_least(
            8,
            "(bound - |chi_qq^I|) / bound minimum",
            floor_min,
            -BOUND_SLACK,
        ),
        Check::at_least(
            8,
            "random detector uncertainty slack minimum",
            slack_min,
            -linresp::CHAIN_TOLERANCE,
        ),
    ];

    let grid = fig2a_omegas();
    let mut std_slack = f64::INFINITY;
    let mut error = None;
    'outer: for (name, cfg) in presets::fig2a_curves().into_iter().take(3) {
        for &w in &grid {
            match GenericDetector::from_scheme(&cfg, w) {
                Ok(det) => std_slack = std_slack.min(uncertainty_check(&det).slack),
                Err(e) => {
                    error = Some((name, e));
                    break 'outer;
                }
            }
        }
    }
    let name = "standard-detector uncertainty slack minimum";
    checks.push(match error {
        Some((curve, e)) => Check::failed(8, name, &e).with_detail(format!("{curve}: {e}")),
        None => Check::at_least(8, name, std_slack, -linresp::CHAIN_TOLERANCE)
            .with_detail("standard, vm, cd over the fig2a grid"),
    });
    checks
}

/// Criterion 9: direct output feedback leaves `S_f` unchanged.
pub fn feedback_invariance(seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let det = oracle::random_detector(&mut rng);
        let open = match linresp::force_noise(&det) {
            Ok(v) => v,
            Err(e) => return vec![Check::failed(9, "feedback invariance", &e)],
        };
        for k in 0..20 {
            let w = 10f64.powf(-2.0 + 3.0 * k as f64 / 19.0);
            for lp in FEEDBACK_GAINS {
                match feedback_added_noise(&det, lp, w) {
                    Ok(v) => worst = worst.max((v - open).abs() / open),
                    Err(e) => return vec![Check::failed(9, "feedback invariance", &e)],
                }
            }
        }
    }
    vec![Check::less(
        9,
        "feedback S_f max relative deviation",
        worst,
        FEEDBACK_TOLERANCE,
    )
    .with_detail("20 detectors x 20 frequencies x 5 gains")]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn check_display() {
        let c = Check::less(4, "x", 1e-12, 1e-10);
        assert!(c.passed);
        assert!(c
            .to_string()
            .starts_with("[PASS]  4 x: measured 1.000000e-12 < 1.000e-10"));
        assert!(!Check::at_least(1, "y", 0.5, 1.0).passed);
    }

    fn cqnc_deviation(g: f64, omega_max: f64) -> f64 {
        let p = presets::fig2a_params().with_coupling(g);
        let model = build(&SchemeConfig::cqnc(p)).unwrap();
        fig2a_omegas()
            .into_iter()
            .filter(|&w| w <= omega_max)
            .map(|w| (force_noise(&model, w).unwrap() / cqnc_limit(&p, w) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ancilla_limit_approached_as_coupling_grows() {
        // The residual is the shot-noise term, falling like 1/g^2.
        assert!(cqnc_deviation(1e3, 1.0) < CQNC_LIMIT_TOLERANCE);
        assert!(cqnc_deviation(1e4, 10.0) < CQNC_LIMIT_TOLERANCE);
        let devs: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
            .iter()
            .map(|&g| cqnc_deviation(g, 10.0))
            .collect();
        for w in devs.windows(2) {
            assert!(w[1] < 0.02 * w[0], "{devs:?}");
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        assert_eq!(feedback_invariance(7), feedback_invariance(7));
        assert_eq!(corrected_identities(7), corrected_identities(7));
    }
}
