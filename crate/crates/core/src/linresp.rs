//! Detector-agnostic linear response.
//!
//! A detector couples to the oscillator through `H_int = -g F q`. With the
//! unperturbed (`g = 0`) operators `F_0`, `Z_0` the closed loop reads
//!
//! ```text
//! q = q_0 + chi_qx f + g chi_qq F
//! F = F_0 + g chi_FF q
//! Z = Z_0 + g q
//! ```
//!
//! where `Z` is the measured output rescaled by its response to `F`, so that
//! `chi_ZF = 1` and `chi_ZZ = chi_FZ = 0`. Normalizing `Z` by its force
//! response gives the added noise `(G_F F_0 + G_Z Z_0) / chi_qx` with
//! `G_F = g chi_qq` and `G_Z = (1 - g^2 chi_qq chi_FF) / g`; the intrinsic
//! mechanical noise `q_0` is dropped.

use num_complex::Complex64;

use crate::bounds::{inverse_chi_a, QSusceptibilities};
use crate::error::{Error, Result};
use crate::linsys::dense::DenseLu;
use crate::linsys::FrequencySolver;
use crate::noise::QuadratureSpectrum;
use crate::schemes::{build, DetectorParams, SchemeConfig, Variant};

/// Slack allowed on the bound chain and the uncertainty relation.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericDetector {
    pub omega: f64,
    /// Self-susceptibility of the detector input operator `F`.
    pub chi_ff: Complex64,
    pub s_ff: f64,
    pub s_zz: f64,
    /// Symmetrized cross spectrum of `Z_0` and `F_0`.
    pub s_zf: Complex64,
    pub q: QSusceptibilities,
    pub g: f64,
}

impl GenericDetector {
    /// `A = -chi_FF^R S_ZZ + S_ZF^R`.
    pub fn a(&self) -> f64 {
        -self.chi_ff.re * self.s_zz + self.s_zf.re
    }

    /// `B = chi_FF^I S_ZZ + S_ZF^I`.
    pub fn b(&self) -> f64 {
        self.chi_ff.im * self.s_zz + self.s_zf.im
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    /// Reads the detector quantities off a concrete scheme: the cavity's
    /// unperturbed (`g = 0`) dynamics give `chi_FF`, `S_FF`, `S_ZZ`, `S_ZF`
    /// for the configured input spectrum and readout angle, the bare
    /// oscillator gives `chi_qq`, `chi_qx`.
    ///
    /// The position-coupled scheme has `F = b1`, `q = x`; the toy scheme has
    /// `F = b1 + b2`, `q = x + eta p`.
    pub fn from_scheme(config: &SchemeConfig, omega: f64) -> Result<Self> {
        let (f_op, q_op) = match config.variant {
            Variant::Standard => (
                Quadratures {
                    rows: (2, 3),
                    coeffs: (1.0, 0.0),
                },
                Quadratures {
                    rows: (0, 1),
                    coeffs: (1.0, 0.0),
                },
            ),
            Variant::Toy => (
                Quadratures {
                    rows: (2, 3),
                    coeffs: (1.0, 1.0),
                },
                Quadratures {
                    rows: (0, 1),
                    coeffs: (1.0, config.eta),
                },
            ),
            Variant::Cqnc => {
                return Err(Error::InvalidConfig(
                    "the ancilla scheme has no single-operator detector mapping".into(),
                ))
            }
        };
        let mut bare = *config;
        bare.params.coupling = 0.0;
        let model = build(&bare)?;
        let n = model.drift().dim();
        let solver = FrequencySolver::new(model.drift(), omega)?;
        let readout = model.readout();
        let kappa = readout.rate.sqrt();
        let (r1, r2) = readout.rows;
        let d = model.readout_vector();

        let chi_ff_state = solver.solve(&f_op.drive(n));
        let chi_ff = f_op.read(&chi_ff_state);
        let chi_out_f = kappa * (d[0] * chi_ff_state[r1] + d[1] * chi_ff_state[r2]);

        let chi_qq = q_op.read(&solver.solve(&q_op.drive(n)));
        let mut force = vec![ZERO; n];
        force[model.force_row()] = ONE;
        let chi_qx = q_op.read(&solver.solve(&force));

        let mut c_f = [ZERO; 2];
        let mut c_z = [ZERO; 2];
        for (k, &row) in [r1, r2].iter().enumerate() {
            let mut w = vec![ZERO; n];
            w[row] = Complex64::new(kappa, 0.0);
            let x = solver.solve(&w);
            c_f[k] = f_op.read(&x);
            let out = [
                kappa * x[r1] - if k == 0 { ONE } else { ZERO },
                kappa * x[r2] - if k == 1 { ONE } else { ZERO },
            ];
            c_z[k] = (d[0] * out[0] + d[1] * out[1]) / chi_out_f;
        }
        if !chi_out_f.is_finite() || chi_out_f.norm() == 0.0 {
            return Err(Error::ZeroResponse {
                omega,
                norm: chi_out_f.norm(),
            });
        }
        let s = &config.input;
        Ok(Self {
            omega,
            chi_ff,
            s_ff: s.quadratic_form(c_f),
            s_zz: s.quadratic_form(c_z),
            s_zf: cross_spectrum(s, c_z, c_f),
            q: QSusceptibilities {
                omega,
                chi_qq,
                chi_qx,
            },
            g: config.params.coupling,
        })
    }
}

/// Linear combination `alpha X + beta P` of one conjugate quadrature pair.
struct Quadratures {
    rows: (usize, usize),
    coeffs: (f64, f64),
}

impl Quadratures {
    /// Input vector produced by `H' = -h (alpha X + beta P)` at unit `h`.
    fn drive(&self, n: usize) -> Vec<Complex64> {
        let mut w = vec![ZERO; n];
        w[self.rows.0] = Complex64::new(-self.coeffs.1, 0.0);
        w[self.rows.1] = Complex64::new(self.coeffs.0, 0.0);
        w
    }

    fn read(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs.0 * x[self.rows.0] + self.coeffs.1 * x[self.rows.1]
    }
}

/// `a S b^dagger` for the symmetric real spectral matrix `S`.
fn cross_spectrum(s: &QuadratureSpectrum, a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0] * b[0].conj() * s.u
        + a[1] * b[1].conj() * s.v
        + (a[0] * b[1].conj() + a[1] * b[0].conj()) * s.w
}

/// Scaled added-noise density `S'_f = S_f |chi_qx|^2`.
pub fn sprime_f(det: &GenericDetector) -> Result<f64> {
    if det.g == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let g = det.g;
    let chi_qq = det.q.chi_qq;
    let g_f = g * chi_qq;
    let g_z = (1.0 - g * g * chi_qq * det.chi_ff) / g;
    Ok(g_f.norm_sqr() * det.s_ff
        + g_z.norm_sqr() * det.s_zz
        + 2.0 * (g_f.conj() * g_z * det.s_zf).re)
}

/// Added-noise density `S_f = S'_f / |chi_qx|^2`.
pub fn force_noise(det: &GenericDetector) -> Result<f64> {
    let denom = det.q.chi_qx.norm_sqr();
    if denom == 0.0 {
        return Err(Error::ZeroResponseSusceptibility { omega: det.omega });
    }
    Ok(sprime_f(det)? / denom)
}

/// Minimum of `S'_f` over the coupling strength:
///
/// `2 (A chi_qq^R + B chi_qq^I)
///   + 2 |chi_qq| sqrt(S_ZZ (S_FF + |chi_FF|^2 S_ZZ - 2 chi_FF^R S_ZF^R + 2 chi_FF^I S_ZF^I))`.
///
/// `S'_f` is `t a + S_ZZ / t + const` in `t = g^2`, so this is attained at
/// `t = sqrt(S_ZZ / a)`.
pub fn g_optimized_bound(det: &GenericDetector) -> f64 {
    let chi = det.chi_ff;
    let s = det.s_zf;
    let chi_qq = det.q.chi_qq;
    let inner = det.s_ff + chi.norm_sqr() * det.s_zz - 2.0 * chi.re * s.re + 2.0 * chi.im * s.im;
    let radicand = (det.s_zz * inner).max(0.0);
    2.0 * (det.a() * chi_qq.re + det.b() * chi_qq.im) + 2.0 * chi_qq.norm() * radicand.sqrt()
}

/// Coupling that attains [`g_optimized_bound`] (positive root).
pub fn optimal_coupling(det: &GenericDetector) -> Option<f64> {
    let chi = det.chi_ff;
    let s = det.s_zf;
    let inner = det.s_ff + chi.norm_sqr() * det.s_zz - 2.0 * chi.re * s.re + 2.0 * chi.im * s.im;
    let a = det.q.chi_qq.norm_sqr() * inner;
    if !(a > 0.0 && det.s_zz > 0.0) {
        return None;
    }
    Some((det.s_zz / a).sqrt().sqrt())
}

/// Symmetrized spectra and susceptibilities of two operators, with the
/// positivity of `M_jk = S_jk - i (chi_jk - chi_kj^*)/2` and of its
/// reversed-order partner `S_jk + i (chi_jk - chi_kj^*)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPair {
    pub s11: f64,
    pub s22: f64,
    pub s21: Complex64,
    pub chi11: Complex64,
    pub chi22: Complex64,
    pub chi21: Complex64,
    pub chi12: Complex64,
}

impl SpectralPair {
    /// `(F, Z)` with the output conventions `chi_ZZ = chi_FZ = 0`, `chi_ZF = 1`.
    pub fn from_detector(det: &GenericDetector) -> Self {
        Self {
            s11: det.s_ff,
            s22: det.s_zz,
            s21: det.s_zf,
            chi11: det.chi_ff,
            chi22: ZERO,
            chi21: ONE,
            chi12: ZERO,
        }
    }

    fn commutator_part(&self) -> Complex64 {
        Complex64::new(0.0, 0.5) * (self.chi21 - self.chi12.conj())
    }

    /// Smallest eigenvalues of the two Hermitian 2x2 matrices.
    pub fn min_eigenvalues(&self) -> [f64; 2] {
        let k = self.commutator_part();
        let min_eig = |a: f64, d: f64, off: Complex64| {
            0.5 * (a + d) - (0.25 * (a - d).powi(2) + off.norm_sqr()).sqrt()
        };
        [
            min_eig(
                self.s11 + self.chi11.im,
                self.s22 + self.chi22.im,
                self.s21 - k,
            ),
            min_eig(
                self.s11 - self.chi11.im,
                self.s22 - self.chi22.im,
                self.s21 + k,
            ),
        ]
    }

    pub fn positive_by_eigenvalues(&self, tol: f64) -> bool {
        self.min_eigenvalues().iter().all(|&l| l >= -tol)
    }

    /// The six scalar spectral uncertainty relations.
    pub fn positive_by_scalar_relations(&self, tol: f64) -> bool {
        let k = self.commutator_part();
        let (c1, c2) = (self.chi11.im, self.chi22.im);
        self.s11 >= -c1 - tol
            && self.s22 >= -c2 - tol
            && (self.s11 + c1) * (self.s22 + c2) - (self.s21 - k).norm_sqr() >= -tol
            && self.s11 >= c1 - tol
            && self.s22 >= c2 - tol
            && (self.s11 - c1) * (self.s22 - c2) - (self.s21 + k).norm_sqr() >= -tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// `slack >= -CHAIN_TOLERANCE`.
    pub holds: bool,
    /// `S_FF S_ZZ - |S_ZF|^2 - |B| - 1/4`.
    pub slack: f64,
    /// Both `M_jk` forms positive semidefinite (within the same tolerance).
    pub mjk_positive: bool,
    pub mjk_min_eigenvalues: [f64; 2],
}

pub fn uncertainty_check(det: &GenericDetector) -> UncertaintyReport {
    let slack = det.s_ff * det.s_zz - det.s_zf.norm_sqr() - det.b().abs() - 0.25;
    let pair = SpectralPair::from_detector(det);
    UncertaintyReport {
        holds: slack >= -CHAIN_TOLERANCE,
        slack,
        mjk_positive: pair.positive_by_eigenvalues(CHAIN_TOLERANCE),
        mjk_min_eigenvalues: pair.min_eigenvalues(),
    }
}

/// Real decomposition of the added noise of the detuned, variationally read,
/// squeezed-input detector:
/// `f_add = ((D/chi_a + E) b1_in + (X/chi_a + Y) b2_in) / C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedProofQuantities {
    pub d: f64,
    pub e: f64,
    pub x: f64,
    pub y: f64,
    pub c: Complex64,
    pub h: f64,
    pub k: f64,
    pub l: f64,
    /// `1/chi_a`.
    pub chi_a_inv: Complex64,
    pub input: QuadratureSpectrum,
}

impl CombinedProofQuantities {
    /// `S_f = 2 Re(1/chi_a) H + K + |1/chi_a|^2 L`.
    pub fn force_noise(&self) -> f64 {
        2.0 * self.chi_a_inv.re * self.h + self.k + self.chi_a_inv.norm_sqr() * self.l
    }

    /// `|EX - DY - |C|^2| / |C|^2`.
    pub fn cross_identity_residual(&self) -> f64 {
        let c2 = self.c.norm_sqr();
        (self.e * self.x - self.d * self.y - c2).abs() / c2
    }

    /// `|KL - H^2 - (uv - w^2)|`.
    ///
    /// `KL` and `H^2` grow like `(xi Delta)^2` and cancel to `O(1)`, so the
    /// difference is formed from the unscaled numerators in double-double
    /// arithmetic before dividing by `|C|^4`.
    pub fn determinant_identity_residual(&self) -> f64 {
        let (d, e, x, y) = (self.d, self.e, self.x, self.y);
        let QuadratureSpectrum { u, v, w } = self.input;
        let k = Dd::prod3(e, e, u) + Dd::prod3(2.0 * e, y, w) + Dd::prod3(y, y, v);
        let l = Dd::prod3(d, d, u) + Dd::prod3(2.0 * d, x, w) + Dd::prod3(x, x, v);
        let h = Dd::prod3(d, e, u) + Dd::prod3(e, x, w) + Dd::prod3(d, y, w) + Dd::prod3(x, y, v);
        let numerator = k * l - h * h;
        let c2 = Dd::prod(self.c.re, self.c.re) + Dd::prod(self.c.im, self.c.im);
        let det = Dd::prod(u, v) - Dd::prod(w, w);
        (numerator.value() / (c2 * c2).value() - det.value()).abs()
    }

    /// Lower bounds descending from `S_f` to the UQL:
    /// `2 chibar^R H + 2|chibar| sqrt(KL)`, `2 chibar^R H + 2|chibar| sqrt(H^2 + 1/4)`,
    /// and `|chibar^I|`.
    pub fn uql_chain(&self) -> [f64; 3] {
        let inv = self.chi_a_inv;
        let base = 2.0 * inv.re * self.h;
        [
            base + 2.0 * inv.norm() * (self.k * self.l).max(0.0).sqrt(),
            base + 2.0 * inv.norm() * (self.h * self.h + 0.25).sqrt(),
            inv.im.abs(),
        ]
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn prod3(a: f64, b: f64, c: f64) -> Self {
        Self::prod(a, b) * Dd { hi: c, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;

    fn add(self, rhs: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, rhs.hi);
        let t = Dd::two_sum(self.lo, rhs.lo);
        let u = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(u.hi, u.lo + t.lo)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;

    fn sub(self, rhs: Dd) -> Dd {
        self + Dd {
            hi: -rhs.hi,
            lo: -rhs.lo,
        }
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;

    fn mul(self, rhs: Dd) -> Dd {
        let p = Dd::prod(self.hi, rhs.hi);
        let lo = p.lo + (self.hi * rhs.lo + self.lo * rhs.hi);
        Dd::two_sum(p.hi, lo)
    }
}

pub fn combined_quantities(
    params: &DetectorParams,
    omega: f64,
    xi: f64,
    input: QuadratureSpectrum,
    g: f64,
) -> Result<CombinedProofQuantities> {
    let gamma = params.cavity_decay;
    let de = params.detuning;
    let r = Complex64::new(gamma / 2.0, -omega);
    let r2 = r.norm_sqr();
    let g2 = g * g;

    let d = xi * (r2 - de * de) - gamma * de;
    let e = g2 * (gamma + xi * de);
    let x = r2 - de * de + xi * gamma * de;
    let y = g2 * de;
    let c = g * gamma.sqrt() * (r + xi * de);
    let c2 = c.norm_sqr();
    if c2 == 0.0 || !c2.is_finite() {
        return Err(Error::DegenerateReadout { omega });
    }
    let (u, v, w) = (input.u, input.v, input.w);
    Ok(CombinedProofQuantities {
        d,
        e,
        x,
        y,
        c,
        h: (d * e * u + e * x * w + d * y * w + x * y * v) / c2,
        k: (e * e * u + 2.0 * e * y * w + y * y * v) / c2,
        l: (d * d * u + 2.0 * d * x * w + x * x * v) / c2,
        chi_a_inv: inverse_chi_a(params, omega),
        input,
    })
}

/// Added-noise density with direct feedback of the measured output onto the
/// oscillator, `q_fb = i lambda' Z / omega`.
///
/// Solves the closed loop for `(q, F, Z)` driven separately by the force and
/// by `F_0`, `Z_0`, normalizes the output by its force response and returns
/// the resulting density. The feedback gain drops out of the estimator.
pub fn feedback_added_noise(det: &GenericDetector, lambda_prime: f64, omega: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequencyFeedback);
    }
    if det.g == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let g = det.g;
    let fb = Complex64::new(0.0, lambda_prime / omega);
    #[rustfmt::skip]
    let system = vec![
        ONE,               -g * det.q.chi_qq, -fb,
        -g * det.chi_ff,    ONE,               ZERO,
        Complex64::new(-g, 0.0), ZERO,         ONE,
    ];
    let lu = DenseLu::factor(3, system).ok_or(Error::SingularAtFrequency {
        omega,
        condition: f64::INFINITY,
    })?;
    let z_of = |src: [Complex64; 3]| lu.solve(&src)[2];
    let z_force = z_of([det.q.chi_qx, ZERO, ZERO]);
    if z_force.norm() == 0.0 {
        return Err(Error::ZeroResponse { omega, norm: 0.0 });
    }
    let a_f = z_of([ZERO, ONE, ZERO]) / z_force;
    let a_z = z_of([ZERO, ZERO, ONE]) / z_force;
    Ok(a_f.norm_sqr() * det.s_ff
        + a_z.norm_sqr() * det.s_zz
        + 2.0 * (a_f.conj() * a_z * det.s_zf).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{q_susceptibilities, uql};
    use crate::noise::{force_noise as pipeline_noise, squeeze_spectrum};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn detector(
        chi_ff: Complex64,
        s_ff: f64,
        s_zz: f64,
        s_zf: Complex64,
        chi_qq: Complex64,
        g: f64,
    ) -> GenericDetector {
        GenericDetector {
            omega: 1.0,
            chi_ff,
            s_ff,
            s_zz,
            s_zf,
            q: QSusceptibilities {
                omega: 1.0,
                chi_qq,
                chi_qx: c(1.0, 0.0),
            },
            g,
        }
    }

    /// Random detector saturating the uncertainty relation up to `extra`.
    fn random_detector(rng: &mut ChaCha8Rng) -> GenericDetector {
        let chi_ff = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let s_zz = rng.gen_range(0.05..3.0);
        let s_zf = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = chi_ff.im * s_zz + s_zf.im;
        let extra = rng.gen_range(0.0..1.0);
        let s_ff = (s_zf.norm_sqr() + b.abs() + 0.25 + extra) / s_zz;
        GenericDetector {
            omega: rng.gen_range(0.1..5.0),
            chi_ff,
            s_ff,
            s_zz,
            s_zf,
            q: QSusceptibilities {
                omega: 1.0,
                chi_qq: c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                chi_qx: c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
            },
            g: rng.gen_range(0.1..4.0),
        }
    }

    fn min_over_coupling(det: &GenericDetector) -> f64 {
        // Golden section in log g; S'_f depends on g only through g^2.
        let f = |lg: f64| sprime_f(&det.with_coupling(lg.exp())).unwrap();
        let (mut lo, mut hi) = (-15.0f64, 15.0f64);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..300 {
            let a = hi - ratio * (hi - lo);
            let b = lo + ratio * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        f(0.5 * (lo + hi))
    }

    fn fig_a() -> DetectorParams {
        DetectorParams::new(0.01, 0.01, 3.0, 0.0, -10.0).unwrap()
    }

    #[test]
    fn decoupled_backaction_and_shot() {
        let det = detector(ZERO, 0.8, 0.3, ZERO, c(0.4, -0.7), 1.7);
        let g: f64 = 1.7;
        let want = g * g * det.q.chi_qq.norm_sqr() * 0.8 + 0.3 / (g * g);
        assert!((sprime_f(&det).unwrap() - want).abs() < 1e-14);
        assert!(matches!(
            sprime_f(&det.with_coupling(0.0)),
            Err(Error::ZeroCoupling)
        ));
    }

    #[test]
    fn minimum_uncertainty_detector_reaches_chi_qq_magnitude() {
        // Two-term AM-GM: min over g of g^2|chi|^2 S_FF + S_ZZ/g^2 = 2|chi| sqrt(S_FF S_ZZ).
        let det = detector(ZERO, 2.0, 0.125, ZERO, c(0.6, 0.8), 1.0);
        assert!((g_optimized_bound(&det) - 1.0).abs() < 1e-14);
        assert!((min_over_coupling(&det) - 1.0).abs() < 1e-12);
        let g_opt = optimal_coupling(&det).unwrap();
        assert!((sprime_f(&det.with_coupling(g_opt)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn uncertainty_examples() {
        let vac = detector(ZERO, 0.5, 0.5, ZERO, ONE, 1.0);
        let r = uncertainty_check(&vac);
        assert!(r.holds && r.mjk_positive);
        assert!(r.slack.abs() < 1e-15);

        let sub = detector(ZERO, 0.1, 0.1, ZERO, ONE, 1.0);
        let r = uncertainty_check(&sub);
        assert!(!r.holds && !r.mjk_positive);
        assert!((r.slack + 0.24).abs() < 1e-15);
    }

    #[test]
    fn random_detectors_obey_bound_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let det = random_detector(&mut rng);
            assert!(uncertainty_check(&det).holds);
            let min = min_over_coupling(&det);
            let bound = g_optimized_bound(&det);
            let floor = det.q.chi_qq.im.abs();
            let scale = bound.abs().max(1.0);
            assert!(min - bound >= -1e-9 * scale, "{min} < {bound}");
            assert!(bound - floor >= -1e-9 * scale, "{bound} < {floor}");
        }
    }

    #[test]
    fn standard_detector_matches_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 60 {
            let p = DetectorParams::new(
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.01..1.0),
                rng.gen_range(0.5..5.0),
                rng.gen_range(-2.0..0.5),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let input = squeeze_spectrum(rng.gen_range(0.0..1.0), rng.gen_range(0.0..3.2));
            let cfg = SchemeConfig::standard(p)
                .with_readout_angle(rng.gen_range(-1.2..1.2))
                .with_input(input);
            let Ok(model) = build(&cfg) else { continue };
            let w = 10f64.powf(rng.gen_range(-2.0..1.0));
            let det = GenericDetector::from_scheme(&cfg, w).unwrap();
            let q = q_susceptibilities(&p, 0.0, w).unwrap();
            assert!((det.q.chi_qq - q.chi_qq).norm() <= 1e-10 * q.chi_qq.norm());
            assert!((det.q.chi_qx - q.chi_qx).norm() <= 1e-10 * q.chi_qx.norm());
            let generic = force_noise(&det).unwrap();
            let direct = pipeline_noise(&model, w).unwrap();
            assert!(
                (generic - direct).abs() <= 1e-9 * direct,
                "{generic} vs {direct}"
            );
            assert!(
                uncertainty_check(&det).holds,
                "{:?}",
                uncertainty_check(&det)
            );
            checked += 1;
        }
    }

    #[test]
    fn vacuum_standard_detector_saturates_uncertainty() {
        let cfg = SchemeConfig::standard(fig_a());
        for w in [1e-3, 0.01, 1.0] {
            let det = GenericDetector::from_scheme(&cfg, w).unwrap();
            assert!(det.chi_ff.norm() < 1e-15);
            assert!(uncertainty_check(&det).slack.abs() < 1e-12);
        }
    }

    #[test]
    fn toy_detector_matches_pipeline() {
        let p = DetectorParams::new(1.0, 1.0, 100.0, 0.0, 5.0).unwrap();
        for eta in [0.0, 1.0, -0.5] {
            let cfg = SchemeConfig::toy(p, eta);
            let model = build(&cfg).unwrap();
            for w in [0.05, 1.0, 1.8, 20.0] {
                let det = GenericDetector::from_scheme(&cfg, w).unwrap();
                let q = q_susceptibilities(&p, eta, w).unwrap();
                assert!((det.q.chi_qq - q.chi_qq).norm() <= 1e-10 * q.chi_qq.norm());
                assert!((det.q.chi_qx - q.chi_qx).norm() <= 1e-10 * q.chi_qx.norm());
                let generic = force_noise(&det).unwrap();
                let direct = pipeline_noise(&model, w).unwrap();
                assert!((generic - direct).abs() <= 1e-9 * direct);
                assert!(uncertainty_check(&det).holds);
            }
        }
    }

    #[test]
    fn ancilla_scheme_has_no_mapping() {
        assert!(GenericDetector::from_scheme(&SchemeConfig::cqnc(fig_a()), 0.1).is_err());
    }

    #[test]
    fn resonant_combined_quantities() {
        let p = fig_a();
        let w = 0.4;
        let q = combined_quantities(&p, w, 0.0, QuadratureSpectrum::vacuum(), -10.0).unwrap();
        assert_eq!(q.d, 0.0);
        assert_eq!(q.y, 0.0);
        let r2 = 1.5f64.powi(2) + w * w;
        let want = 100.0 * 3.0 * r2;
        assert!((q.e * q.x - q.d * q.y - want).abs() <= 1e-12 * want);
        assert!((q.c.norm_sqr() - want).abs() <= 1e-12 * want);
        assert!(matches!(
            combined_quantities(&p, w, 0.0, QuadratureSpectrum::vacuum(), 0.0),
            Err(Error::DegenerateReadout { .. })
        ));
    }

    #[test]
    fn corrected_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = DetectorParams::new(
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.01..1.0),
                rng.gen_range(0.5..5.0),
                rng.gen_range(-5.0..5.0),
                1.0,
            )
            .unwrap();
            let input = squeeze_spectrum(rng.gen_range(0.0..1.5), rng.gen_range(0.0..3.2));
            let q = combined_quantities(
                &p,
                10f64.powf(rng.gen_range(-2.0..1.0)),
                rng.gen_range(-20.0..20.0),
                input,
                rng.gen_range(-5.0..5.0),
            )
            .unwrap();
            assert!(q.cross_identity_residual() < 1e-10);
            assert!(q.determinant_identity_residual() < 1e-10 * (q.k * q.l).abs().max(1.0));
            let [lb1, lb2, floor] = q.uql_chain();
            let sf = q.force_noise();
            let scale = sf.abs().max(1.0);
            assert!(sf - lb1 >= -1e-9 * scale);
            assert!(lb1 - lb2 >= -1e-9 * scale);
            assert!(lb2 - floor >= -1e-9 * scale);
        }
    }

    #[test]
    fn combined_noise_matches_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 50 {
            let p = DetectorParams::new(
                rng.gen_range(0.05..2.0),
                rng.gen_range(0.01..1.0),
                rng.gen_range(0.5..5.0),
                rng.gen_range(-3.0..1.0),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let xi: f64 = rng.gen_range(-20.0..20.0);
            let input = squeeze_spectrum(rng.gen_range(0.0..1.0), rng.gen_range(0.0..3.2));
            let cfg = SchemeConfig::standard(p).with_xi(xi).with_input(input);
            let Ok(model) = build(&cfg) else { continue };
            let w = 10f64.powf(rng.gen_range(-2.0..1.0));
            let q = combined_quantities(&p, w, xi, input, p.coupling).unwrap();
            let direct = pipeline_noise(&model, w).unwrap();
            assert!((q.force_noise() - direct).abs() <= 1e-9 * direct);
            checked += 1;
        }
    }

    #[test]
    fn double_double_keeps_cancelled_digits() {
        let a = Dd::prod(1.0 + 2f64.powi(-40), 1.0 + 2f64.powi(-40));
        let b = Dd::prod(1.0, 1.0 + 2f64.powi(-39));
        // (1 + e)^2 - (1 + 2e) = e^2 exactly.
        assert_eq!((a - b).value(), 2f64.powi(-80));
        let big = Dd::prod(1e8, 1e8) * Dd::prod(3.0, 1.0 / 3.0);
        assert!((big.value() - 1e16).abs() <= 2.0);
    }

    #[test]
    fn feedback_gain_drops_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let det = random_detector(&mut rng);
            let base = force_noise(&det).unwrap();
            for lp in [0.0, 0.5, -0.5, 5.0, -5.0, 10.0] {
                for w in [0.01, 0.3, 2.0] {
                    let fb = feedback_added_noise(&det, lp, w).unwrap();
                    assert!((fb - base).abs() <= 1e-9 * base, "{lp} {w}: {fb} vs {base}");
                }
            }
        }
        let det = random_detector(&mut rng);
        assert!(matches!(
            feedback_added_noise(&det, 1.0, 0.0),
            Err(Error::ZeroFrequencyFeedback)
        ));
        assert!(matches!(
            feedback_added_noise(&det.with_coupling(0.0), 1.0, 1.0),
            Err(Error::ZeroCoupling)
        ));
    }

    #[test]
    fn feedback_on_standard_detector_reproduces_resonant_density() {
        let p = fig_a();
        let cfg = SchemeConfig::standard(p);
        for w in [2e-3, 0.05, 1.0] {
            let det = GenericDetector::from_scheme(&cfg, w).unwrap();
            let fb = feedback_added_noise(&det, 1.0, w).unwrap();
            let ca = crate::bounds::chi_a(&p, w).unwrap().norm();
            let cb = crate::bounds::chi_b(&p, w).norm();
            let want = 0.5 * (300.0 * cb * cb + 1.0 / (300.0 * ca * ca * cb * cb));
            assert!((fb - want).abs() <= 1e-9 * want);
            assert!(fb >= uql(&p, w));
        }
    }

    proptest! {
        #[test]
        fn eigen_and_scalar_positivity_agree(
            s11 in 0.0f64..2.0, s22 in 0.0f64..2.0,
            a in -1.0f64..1.0, b in -1.0f64..1.0,
            c11 in -1.0f64..1.0, c22 in -1.0f64..1.0,
            c21r in -1.0f64..1.0, c21i in -1.0f64..1.0,
            c12r in -1.0f64..1.0, c12i in -1.0f64..1.0,
        ) {
            let pair = SpectralPair {
                s11, s22,
                s21: c(a, b),
                chi11: c(0.3, c11),
                chi22: c(-0.2, c22),
                chi21: c(c21r, c21i),
                chi12: c(c12r, c12i),
            };
            let eig = pair.min_eigenvalues();
            // Skip draws sitting on the boundary.
            prop_assume!(eig.iter().all(|l| l.abs() > 1e-9));
            prop_assert_eq!(pair.positive_by_eigenvalues(0.0), pair.positive_by_scalar_relations(0.0));
        }

        #[test]
        fn detector_uncertainty_matches_mjk(
            chi_r in -1.0f64..1.0, chi_i in -1.0f64..1.0,
            s_ff in 0.0f64..2.0, s_zz in 0.0f64..2.0,
            zr in -1.0f64..1.0, zi in -1.0f64..1.0,
        ) {
            let det = detector(c(chi_r, chi_i), s_ff, s_zz, c(zr, zi), ONE, 1.0);
            let r = uncertainty_check(&det);
            prop_assume!(s_zz > 1e-6);
            prop_assume!(r.slack.abs() > 1e-9 && r.mjk_min_eigenvalues.iter().all(|l| l.abs() > 1e-9));
            prop_assert_eq!(r.holds, r.mjk_positive);
        }
    }
}
