//! Linear stochastic systems `d/dt x = A x + w` in the frequency domain.
//!
//! Fourier convention: `d/dt -> -i omega`, so the stationary solution is
//! `x(omega) = -(A + i omega I)^-1 w(omega)`. With this sign the cavity
//! susceptibility reads `chi_b = 1 / (gamma/2 - i omega)`.
//!
//! Output fields follow `b_out = sqrt(kappa) b - b_in`, with `kappa` the
//! decay rate of the readout channel.

pub mod dense;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::QuadratureSpectrum;
use dense::DenseLu;

/// 2x2 complex block, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Largest eigenvalue real part still considered stable.
pub const STABILITY_TOLERANCE: f64 = 1e-12;

/// Condition estimate above which `A + i omega I` is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Real drift matrix with named state variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    n: usize,
    entries: Vec<f64>,
    labels: Vec<String>,
}

impl DriftMatrix {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = rows.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "drift dimension must be even and positive, got {n}"
            )));
        }
        if labels.len() != n {
            return Err(Error::InvalidConfig(format!(
                "{} labels for a {n}x{n} drift matrix",
                labels.len()
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "drift row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "non-finite drift entry {bad} in row {i}"
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { n, entries, labels })
    }

    pub fn from_rows<const N: usize>(labels: [&str; N], rows: [[f64; N]; N]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::new(labels, &rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub eigenvalues: Vec<Complex64>,
    pub max_real: f64,
}

/// Eigenvalues of the drift matrix and the stability verdict
/// (all real parts at most [`STABILITY_TOLERANCE`]).
pub fn stability_check(drift: &DriftMatrix) -> StabilityReport {
    let n = drift.dim();
    let m = nalgebra::DMatrix::from_row_slice(n, n, &drift.entries);
    let eigenvalues: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let max_real = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        stable: max_real <= STABILITY_TOLERANCE,
        eigenvalues,
        max_real,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Intrinsic mechanical bath. Wired into the model but left out of `S_f`.
    Intrinsic,
    /// The cavity port whose output quadrature is measured.
    Readout,
    /// Any other bath whose noise reaches the readout (e.g. an ancilla cavity).
    Ancilla,
}

/// One bosonic input port driving a pair of state quadratures with
/// `sqrt(rate) * (in_1, in_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    pub id: String,
    pub kind: ChannelKind,
    pub rate: f64,
    pub rows: (usize, usize),
    pub spectrum: QuadratureSpectrum,
}

impl NoiseChannel {
    pub fn is_readout(&self) -> bool {
        self.kind == ChannelKind::Readout
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    drift: DriftMatrix,
    channels: Vec<NoiseChannel>,
    readout: usize,
    force_row: usize,
    readout_angle: f64,
}

impl LinearModel {
    /// Validates the wiring and rejects unstable drift matrices.
    pub fn new(
        drift: DriftMatrix,
        channels: Vec<NoiseChannel>,
        force_row: usize,
        readout_angle: f64,
    ) -> Result<Self> {
        let n = drift.dim();
        if force_row >= n {
            return Err(Error::InvalidConfig(format!(
                "force row {force_row} out of range for dimension {n}"
            )));
        }
        if !readout_angle.is_finite() {
            return Err(Error::InvalidConfig("readout angle must be finite".into()));
        }
        for ch in &channels {
            let (a, b) = ch.rows;
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidConfig(format!(
                    "channel {} drives invalid rows ({a}, {b})",
                    ch.id
                )));
            }
            if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "channel {} has invalid rate {}",
                    ch.id, ch.rate
                )));
            }
        }
        let readouts: Vec<usize> = channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_readout())
            .map(|(i, _)| i)
            .collect();
        let readout = match readouts.as_slice() {
            [i] => *i,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "exactly one readout channel required, found {}",
                    readouts.len()
                )))
            }
        };
        let report = stability_check(&drift);
        if !report.stable {
            return Err(Error::UnstableModel {
                max_real: report.max_real,
            });
        }
        Ok(Self {
            drift,
            channels,
            readout,
            force_row,
            readout_angle,
        })
    }

    pub fn drift(&self) -> &DriftMatrix {
        &self.drift
    }

    pub fn channels(&self) -> &[NoiseChannel] {
        &self.channels
    }

    pub fn readout_index(&self) -> usize {
        self.readout
    }

    pub fn readout(&self) -> &NoiseChannel {
        &self.channels[self.readout]
    }

    pub fn force_row(&self) -> usize {
        self.force_row
    }

    pub fn readout_angle(&self) -> f64 {
        self.readout_angle
    }

    /// Readout vector `d = (sin phi, cos phi)`.
    pub fn readout_vector(&self) -> [f64; 2] {
        [self.readout_angle.sin(), self.readout_angle.cos()]
    }

    /// Per-channel spectra entering `S_f`; intrinsic channels are `None`.
    pub fn noise_spectra(&self) -> Vec<Option<QuadratureSpectrum>> {
        self.channels
            .iter()
            .map(|c| match c.kind {
                ChannelKind::Intrinsic => None,
                _ => Some(c.spectrum),
            })
            .collect()
    }
}

/// Factorization of `A + i omega I` at one frequency.
#[derive(Debug, Clone)]
pub struct FrequencySolver {
    omega: f64,
    lu: DenseLu,
}

impl FrequencySolver {
    pub fn new(drift: &DriftMatrix, omega: f64) -> Result<Self> {
        let n = drift.dim();
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let diag = if i == j { omega } else { 0.0 };
                a.push(Complex64::new(drift.get(i, j), diag));
            }
        }
        let singular = |condition| Error::SingularAtFrequency { omega, condition };
        let lu = DenseLu::factor(n, a).ok_or_else(|| singular(f64::INFINITY))?;
        let condition = lu.condition_1();
        if condition.is_nan() || condition > SINGULAR_CONDITION {
            return Err(singular(condition));
        }
        Ok(Self { omega, lu })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `x = -(A + i omega I)^-1 w`.
    pub fn solve(&self, w: &[Complex64]) -> Vec<Complex64> {
        let rhs: Vec<Complex64> = w.iter().map(|z| -z).collect();
        self.lu.solve(&rhs)
    }

    /// `(A + i omega I) x + w`, computed in compensated arithmetic.
    pub fn residual(&self, x: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
        let rhs: Vec<Complex64> = w.iter().map(|z| -z).collect();
        self.lu.residual(x, &rhs).into_iter().map(|z| -z).collect()
    }
}

/// Frequency-domain state response to the input vector `w`.
pub fn solve_frequency(model: &LinearModel, omega: f64, w: &[Complex64]) -> Result<Vec<Complex64>> {
    if w.len() != model.drift.dim() {
        return Err(Error::InvalidConfig(format!(
            "input vector has length {}, expected {}",
            w.len(),
            model.drift.dim()
        )));
    }
    Ok(FrequencySolver::new(&model.drift, omega)?.solve(w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossBlock {
    /// Index into [`LinearModel::channels`].
    pub channel: usize,
    /// Columns: the channel's two input quadratures; rows: the readout
    /// channel's two output quadratures.
    pub block: Mat2,
}

/// Input-output transfer at one frequency:
/// `b_out = M b_in + v f + sum_c cross_c c_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub omega: f64,
    pub m: Mat2,
    pub v: [Complex64; 2],
    pub cross: Vec<CrossBlock>,
    pub readout_channel: usize,
}

impl FrequencyResponse {
    pub fn cross_block(&self, channel: usize) -> Option<&Mat2> {
        self.cross
            .iter()
            .find(|c| c.channel == channel)
            .map(|c| &c.block)
    }
}

/// Drives every input quadrature (and the force row) with a unit source and
/// reads the readout channel's output quadratures.
pub fn transfer(model: &LinearModel, omega: f64) -> Result<FrequencyResponse> {
    let n = model.drift.dim();
    let solver = FrequencySolver::new(&model.drift, omega)?;
    let readout = model.readout();
    let kappa_sqrt = readout.rate.sqrt();
    let (r1, r2) = readout.rows;

    let respond = |row: usize, amplitude: f64| -> [Complex64; 2] {
        let mut w = vec![ZERO; n];
        w[row] = Complex64::new(amplitude, 0.0);
        let x = solver.solve(&w);
        [x[r1] * kappa_sqrt, x[r2] * kappa_sqrt]
    };

    let mut m = [[ZERO; 2]; 2];
    for (j, &row) in [r1, r2].iter().enumerate() {
        let out = respond(row, kappa_sqrt);
        for k in 0..2 {
            m[k][j] = out[k] - if k == j { ONE } else { ZERO };
        }
    }

    let v = respond(model.force_row, 1.0);

    let mut cross = Vec::new();
    for (idx, ch) in model.channels.iter().enumerate() {
        if idx == model.readout {
            continue;
        }
        let amp = ch.rate.sqrt();
        let mut block = [[ZERO; 2]; 2];
        for (j, &row) in [ch.rows.0, ch.rows.1].iter().enumerate() {
            let out = respond(row, amp);
            block[0][j] = out[0];
            block[1][j] = out[1];
        }
        cross.push(CrossBlock {
            channel: idx,
            block,
        });
    }

    Ok(FrequencyResponse {
        omega,
        m,
        v,
        cross,
        readout_channel: model.readout,
    })
}
