//! Input noise spectra, added-noise coefficients and the force noise power
//! spectral density `S_f`.
//!
//! The estimator normalizes the measured quadrature `y = d^T b_out`,
//! `d = (sin phi, cos phi)`, by its force response `d^T v`, leaving the added
//! noise `f_add = sum_c (c1 in_1 + c2 in_2)` over the input channels. For a
//! channel with symmetrized spectrum `S = [[u, w], [w, v]]` the contribution
//! to `S_f` is `(c1, c2) S (c1, c2)^dagger`.

use num_complex::Complex64;

use crate::bounds;
use crate::error::{Error, Result};
use crate::linsys::{transfer, FrequencyResponse, LinearModel};
use crate::schemes::{build, SchemeConfig};

/// Slack allowed on the Heisenberg constraint `uv - w^2 >= 1/4`.
pub const HEISENBERG_TOLERANCE: f64 = 1e-12;

/// `|d^T v|` at or below this value means the force is invisible.
pub const ZERO_RESPONSE: f64 = 1e-14;

/// Symmetrized spectral matrix `[[u, w], [w, v]]` of one channel's input
/// quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpectrum {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl QuadratureSpectrum {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        let s = Self { u, v, w };
        if !(u > 0.0 && v > 0.0 && w.is_finite() && u.is_finite() && v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "quadrature spectrum needs finite u, v > 0 (got u = {u}, v = {v}, w = {w})"
            )));
        }
        if s.determinant() < 0.25 - HEISENBERG_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "quadrature spectrum violates uv - w^2 >= 1/4 (uv - w^2 = {})",
                s.determinant()
            )));
        }
        Ok(s)
    }

    pub fn vacuum() -> Self {
        Self {
            u: 0.5,
            v: 0.5,
            w: 0.0,
        }
    }

    /// Thermal state with mean occupancy `n_th`.
    pub fn thermal(n_th: f64) -> Self {
        Self {
            u: n_th + 0.5,
            v: n_th + 0.5,
            w: 0.0,
        }
    }

    pub fn squeezed(s: f64, theta: f64) -> Self {
        squeeze_spectrum(s, theta)
    }

    /// `uv - w^2`.
    pub fn determinant(&self) -> f64 {
        self.u * self.v - self.w * self.w
    }

    /// `(c1, c2) S (c1, c2)^dagger`.
    pub fn quadratic_form(&self, c: [Complex64; 2]) -> f64 {
        c[0].norm_sqr() * self.u + c[1].norm_sqr() * self.v + 2.0 * (c[0] * c[1].conj()).re * self.w
    }
}

/// Pure squeezed vacuum with squeezing factor `s` and angle `theta`:
/// `u = (cosh 2s - sinh 2s cos 2theta)/2`, `v = (cosh 2s + sinh 2s cos 2theta)/2`,
/// `w = -(sinh 2s sin 2theta)/2`, saturating `uv - w^2 = 1/4`.
pub fn squeeze_spectrum(s: f64, theta: f64) -> QuadratureSpectrum {
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    QuadratureSpectrum {
        u: 0.5 * (ch - sh * c2),
        v: 0.5 * (ch + sh * c2),
        w: -0.5 * sh * s2,
    }
}

/// Added-noise coefficients at one frequency, one pair per model channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AddedNoiseCoeffs {
    pub omega: f64,
    /// `d^T v`, the force response of the measured quadrature.
    pub norm: Complex64,
    /// Indexed like [`LinearModel::channels`].
    pub channels: Vec<[Complex64; 2]>,
    pub readout_channel: usize,
}

impl AddedNoiseCoeffs {
    pub fn readout(&self) -> [Complex64; 2] {
        self.channels[self.readout_channel]
    }
}

pub fn added_noise(resp: &FrequencyResponse, phi: f64) -> Result<AddedNoiseCoeffs> {
    let d = [phi.sin(), phi.cos()];
    let norm = d[0] * resp.v[0] + d[1] * resp.v[1];
    if norm.norm() <= ZERO_RESPONSE {
        return Err(Error::ZeroResponse {
            omega: resp.omega,
            norm: norm.norm(),
        });
    }
    let project = |block: &[[Complex64; 2]; 2]| -> [Complex64; 2] {
        [
            (d[0] * block[0][0] + d[1] * block[1][0]) / norm,
            (d[0] * block[0][1] + d[1] * block[1][1]) / norm,
        ]
    };
    let n_channels = resp.cross.len() + 1;
    let mut channels = vec![[Complex64::new(0.0, 0.0); 2]; n_channels];
    channels[resp.readout_channel] = project(&resp.m);
    for cb in &resp.cross {
        channels[cb.channel] = project(&cb.block);
    }
    Ok(AddedNoiseCoeffs {
        omega: resp.omega,
        norm,
        channels,
        readout_channel: resp.readout_channel,
    })
}

/// `S_f = sum_c (c1, c2) S_c (c1, c2)^dagger` over channels with a spectrum;
/// `None` entries are left out.
pub fn power_density(coeffs: &AddedNoiseCoeffs, spectra: &[Option<QuadratureSpectrum>]) -> f64 {
    assert_eq!(
        coeffs.channels.len(),
        spectra.len(),
        "one spectrum slot per channel"
    );
    coeffs
        .channels
        .iter()
        .zip(spectra)
        .filter_map(|(c, s)| s.map(|s| s.quadratic_form(*c)))
        .sum()
}

/// `S_f` of a built model at one frequency.
pub fn force_noise(model: &LinearModel, omega: f64) -> Result<f64> {
    let resp = transfer(model, omega)?;
    let coeffs = added_noise(&resp, model.readout_angle())?;
    Ok(power_density(&coeffs, &model.noise_spectra()))
}

/// `S_f` together with all bound columns on a frequency grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensitivitySpectrum {
    pub omegas: Vec<f64>,
    pub s_f: Vec<f64>,
    pub sql: Vec<f64>,
    pub uql: Vec<f64>,
    pub guql: Vec<f64>,
    pub opt_uql: Vec<f64>,
}

impl SensitivitySpectrum {
    pub const CSV_HEADER: &'static str = "omega,s_f,sql,uql,guql,opt_uql";

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn row(&self, i: usize) -> [f64; 6] {
        [
            self.omegas[i],
            self.s_f[i],
            self.sql[i],
            self.uql[i],
            self.guql[i],
            self.opt_uql[i],
        ]
    }

    /// Writes `# key = value` metadata lines, the header and one row per
    /// frequency, LF-terminated, 12 significant digits.
    pub fn write_csv<W: std::io::Write>(
        &self,
        mut out: W,
        metadata: &[(String, String)],
    ) -> std::io::Result<()> {
        for (k, v) in metadata {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            let row: Vec<String> = self.row(i).iter().map(|x| format_sig12(*x)).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// 12 significant digits; scientific notation once the decimal exponent
/// reaches 6 in magnitude.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // The exponent after rounding, so 999999.9999999 reads as 1e6.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if exp.abs() >= 6 {
        sci
    } else {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Evaluates `S_f` and every bound along `grid` (strictly positive,
/// strictly increasing).
///
/// The generalized UQL column uses the scheme's coupling mix (`eta = 0`, the
/// usual UQL, for position-coupled variants).
pub fn sensitivity_spectrum(config: &SchemeConfig, grid: &[f64]) -> Result<SensitivitySpectrum> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty frequency grid".into()));
    }
    if grid.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidConfig(
            "frequency grid must be strictly positive".into(),
        ));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidConfig(
            "frequency grid must be strictly increasing".into(),
        ));
    }
    let model = build(config)?;
    let params = &config.params;
    let eta = config.coupling_eta();
    let mut out = SensitivitySpectrum {
        omegas: grid.to_vec(),
        ..Default::default()
    };
    for &omega in grid {
        out.s_f.push(force_noise(&model, omega)?);
        out.sql.push(bounds::sql(params, omega)?);
        out.uql.push(bounds::uql(params, omega));
        let q = bounds::q_susceptibilities(params, eta, omega)?;
        out.guql.push(bounds::generalized_uql(&q)?);
        out.opt_uql.push(bounds::optimal_uql(params, omega));
    }
    Ok(out)
}
