//! Concrete detection schemes and their linearized models.
//!
//! State ordering is `(x, p, b1, b2)` for the single-cavity detectors and
//! `(x, p, b1, b2, c1, c2)` when the ancilla cavity is present. Quadratures
//! are normalized so that `a = (x + i p)/sqrt(2)` and `b = (b1 + i b2)/sqrt(2)`.
//!
//! Variational readout, squeezed input and cavity detuning are settings of
//! [`Variant::Standard`] (readout angle, input spectrum, `detuning`).

use num_complex::Complex64;

use crate::bounds::{chi_a, chi_b, detuned_cavity_susceptibilities};
use crate::error::{Error, Result};
use crate::linsys::{ChannelKind, DriftMatrix, LinearModel, Mat2, NoiseChannel};
use crate::noise::QuadratureSpectrum;

/// Physical rates in one shared frequency unit.
///
/// `coupling` is the effective optomechanical coupling; the intracavity
/// amplitude is already absorbed into it, so it may carry either sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    /// Mechanical resonance frequency `Omega`.
    pub mech_frequency: f64,
    /// Mechanical energy decay rate `Gamma`.
    pub mech_damping: f64,
    /// Cavity decay rate `gamma`.
    pub cavity_decay: f64,
    /// Cavity detuning `Delta`.
    pub detuning: f64,
    /// Effective coupling `g`.
    pub coupling: f64,
    /// Thermal occupancy of the mechanical bath. Carried by the model's
    /// intrinsic channel but not summed into `S_f`.
    pub n_th: f64,
}

impl DetectorParams {
    pub fn new(
        mech_frequency: f64,
        mech_damping: f64,
        cavity_decay: f64,
        detuning: f64,
        coupling: f64,
    ) -> Result<Self> {
        let params = Self {
            mech_frequency,
            mech_damping,
            cavity_decay,
            detuning,
            coupling,
            n_th: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_n_th(mut self, n_th: f64) -> Result<Self> {
        self.n_th = n_th;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mech_frequency,
            self.mech_damping,
            self.cavity_decay,
            self.detuning,
            self.coupling,
            self.n_th,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "detector parameters must be finite".into(),
            ));
        }
        if self.mech_frequency <= 0.0 {
            return Err(Error::InvalidConfig("Omega must be positive".into()));
        }
        if self.cavity_decay <= 0.0 {
            return Err(Error::InvalidConfig("gamma must be positive".into()));
        }
        if self.mech_damping < 0.0 {
            return Err(Error::InvalidConfig("Gamma must be non-negative".into()));
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidConfig("n_th must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Position coupling `-g x b1`.
    Standard,
    /// Standard coupling plus a negative-mass ancilla cavity `c` coupled
    /// through `-g b1 c1`.
    Cqnc,
    /// Coupling `-g (x + eta p)(b1 + b2)`.
    Toy,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Cqnc => "cqnc",
            Variant::Toy => "toy",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Variant::Standard),
            "cqnc" => Ok(Variant::Cqnc),
            "toy" => Ok(Variant::Toy),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub variant: Variant,
    pub params: DetectorParams,
    /// Readout quadrature angle `phi`; the photodiode reports
    /// `b1_out sin(phi) + b2_out cos(phi)`.
    pub readout_angle: f64,
    /// Input spectrum of the readout port.
    pub input: QuadratureSpectrum,
    /// Mixing of the toy coupling operator `q = x + eta p`. Ignored by the
    /// other variants, which couple to `x` alone.
    pub eta: f64,
}

impl SchemeConfig {
    pub fn standard(params: DetectorParams) -> Self {
        Self {
            variant: Variant::Standard,
            params,
            readout_angle: 0.0,
            input: QuadratureSpectrum::vacuum(),
            eta: 0.0,
        }
    }

    pub fn cqnc(params: DetectorParams) -> Self {
        Self {
            variant: Variant::Cqnc,
            ..Self::standard(params)
        }
    }

    pub fn toy(params: DetectorParams, eta: f64) -> Self {
        Self {
            variant: Variant::Toy,
            eta,
            ..Self::standard(params)
        }
    }

    pub fn with_readout_angle(mut self, phi: f64) -> Self {
        self.readout_angle = phi;
        self
    }

    /// Sets the readout angle from `xi = tan(phi)`.
    pub fn with_xi(self, xi: f64) -> Self {
        self.with_readout_angle(xi.atan())
    }

    pub fn with_input(mut self, input: QuadratureSpectrum) -> Self {
        self.input = input;
        self
    }

    pub fn xi(&self) -> f64 {
        self.readout_angle.tan()
    }

    /// Coupling mix actually used by the model (`0` outside the toy variant).
    pub fn coupling_eta(&self) -> f64 {
        match self.variant {
            Variant::Toy => self.eta,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.readout_angle.is_finite() || !self.eta.is_finite() {
            return Err(Error::InvalidConfig(
                "readout angle and eta must be finite".into(),
            ));
        }
        if self.variant == Variant::Cqnc && self.params.detuning != 0.0 {
            return Err(Error::InvalidConfig(
                "the ancilla scheme is defined for a resonant cavity (Delta = 0)".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the drift matrix and noise wiring for a scheme.
pub fn build(config: &SchemeConfig) -> Result<LinearModel> {
    config.validate()?;
    let p = &config.params;
    let om = p.mech_frequency;
    let hg = p.mech_damping / 2.0;
    let hc = p.cavity_decay / 2.0;
    let g = p.coupling;
    let de = p.detuning;

    let drift = match config.variant {
        Variant::Standard => DriftMatrix::from_rows(
            ["x", "p", "b1", "b2"],
            [
                [-hg, om, 0.0, 0.0],
                [-om, -hg, g, 0.0],
                [0.0, 0.0, -hc, de],
                [g, 0.0, -de, -hc],
            ],
        )?,
        Variant::Cqnc => DriftMatrix::from_rows(
            ["x", "p", "b1", "b2", "c1", "c2"],
            [
                [-hg, om, 0.0, 0.0, 0.0, 0.0],
                [-om, -hg, g, 0.0, 0.0, 0.0],
                [0.0, 0.0, -hc, 0.0, 0.0, 0.0],
                [g, 0.0, 0.0, -hc, g, 0.0],
                [0.0, 0.0, 0.0, 0.0, -hg, -om],
                [0.0, 0.0, g, 0.0, om, -hg],
            ],
        )?,
        Variant::Toy => {
            let ge = g * config.eta;
            DriftMatrix::from_rows(
                ["x", "p", "b1", "b2"],
                [
                    [-hg, om, -ge, -ge],
                    [-om, -hg, g, g],
                    [-g, -ge, -hc, de],
                    [g, ge, -de, -hc],
                ],
            )?
        }
    };

    let mut channels = vec![
        NoiseChannel {
            id: "mechanical".into(),
            kind: ChannelKind::Intrinsic,
            rate: p.mech_damping,
            rows: (0, 1),
            spectrum: QuadratureSpectrum::thermal(p.n_th),
        },
        NoiseChannel {
            id: "cavity".into(),
            kind: ChannelKind::Readout,
            rate: p.cavity_decay,
            rows: (2, 3),
            spectrum: config.input,
        },
    ];
    if config.variant == Variant::Cqnc {
        // Ancilla linewidth is taken equal to the mechanical one.
        channels.push(NoiseChannel {
            id: "ancilla".into(),
            kind: ChannelKind::Ancilla,
            rate: p.mech_damping,
            rows: (4, 5),
            spectrum: QuadratureSpectrum::vacuum(),
        });
    }

    LinearModel::new(drift, channels, 1, config.readout_angle)
}

/// Closed-form input-output blocks of the standard detector at arbitrary
/// detuning: `M = m_shot + m_back`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTransfer {
    pub m_shot: Mat2,
    pub m_back: Mat2,
    pub v: [Complex64; 2],
}

impl ClosedFormTransfer {
    pub fn m(&self) -> Mat2 {
        let mut m = self.m_shot;
        for (row, back) in m.iter_mut().zip(&self.m_back) {
            for (a, b) in row.iter_mut().zip(back) {
                *a += b;
            }
        }
        m
    }
}

/// Threshold on `|1 - g^2 chi_a chi_delta|` below which the detuned cavity
/// response diverges.
pub const PARAMETRIC_DIVERGENCE: f64 = 1e-14;

pub fn closed_form_transfer(params: &DetectorParams, omega: f64) -> Result<ClosedFormTransfer> {
    let ca = chi_a(params, omega)?;
    let (cr, cd) = detuned_cavity_susceptibilities(params, omega);
    let g = params.coupling;
    let gamma = params.cavity_decay;
    let one = Complex64::new(1.0, 0.0);

    let den = one - g * g * ca * cd;
    if den.norm() < PARAMETRIC_DIVERGENCE {
        return Err(Error::ParametricDivergence { omega });
    }

    let m_shot = [
        [-one + gamma * cr, gamma * cd],
        [-gamma * cd, -one + gamma * cr],
    ];
    let back = g * g * gamma * ca / den;
    let m_back = [
        [back * cr * cd, back * cd * cd],
        [back * cr * cr, back * cr * cd],
    ];
    let force = g * gamma.sqrt() * ca / den;
    let v = [force * cd, force * cr];
    Ok(ClosedFormTransfer { m_shot, m_back, v })
}

/// Closed form of the ancilla-assisted detector (resonant cavity): the
/// readout sees `e^{i theta} b_in` plus the force and the ancilla noise
/// `sqrt(Gamma) [c1_in (Gamma/2 - i omega)/Omega - c2_in]`, both carried by
/// `g sqrt(gamma) chi_a chi_b (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqncClosedForm {
    pub m: Mat2,
    pub v: [Complex64; 2],
    pub ancilla: Mat2,
}

pub fn cqnc_closed_form(params: &DetectorParams, omega: f64) -> Result<CqncClosedForm> {
    let ca = chi_a(params, omega)?;
    let cb = chi_b(params, omega);
    let zero = Complex64::new(0.0, 0.0);
    let phase = cb / cb.conj();
    let carrier = params.coupling * params.cavity_decay.sqrt() * ca * cb;
    let s = Complex64::new(params.mech_damping / 2.0, -omega);
    let root_gamma = params.mech_damping.sqrt();
    Ok(CqncClosedForm {
        m: [[phase, zero], [zero, phase]],
        v: [zero, carrier],
        ancilla: [
            [zero, zero],
            [
                carrier * root_gamma * s / params.mech_frequency,
                -carrier * root_gamma,
            ],
        ],
    })
}
