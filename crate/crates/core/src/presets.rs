//! Preset parameter sets and frequency grids behind the `fig2a` and `fig2b`
//! commands.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::schemes::{DetectorParams, SchemeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(Error::InvalidConfig(format!("unknown spacing `{s}`"))),
        }
    }
}

pub const MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn log(omega_min: f64, omega_max: f64, points: usize) -> Self {
        Self {
            omega_min,
            omega_max,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min.is_finite() && self.omega_min > 0.0) {
            return Err(Error::InvalidConfig("omega_min must be positive".into()));
        }
        if !(self.omega_max.is_finite() && self.omega_max > self.omega_min) {
            return Err(Error::InvalidConfig(
                "omega_max must exceed omega_min".into(),
            ));
        }
        if self.points < 2 || self.points > MAX_POINTS {
            return Err(Error::InvalidConfig(format!(
                "points must lie in [2, {MAX_POINTS}], got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Endpoints are exact.
    pub fn omegas(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.points;
        let last = (n - 1) as f64;
        let mut out: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / last)
                .collect(),
            Spacing::Log => {
                let (a, b) = (self.omega_min.ln(), self.omega_max.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / last).exp())
                    .collect()
            }
        };
        out[0] = self.omega_min;
        out[n - 1] = self.omega_max;
        Ok(out)
    }
}

/// `gamma = 3`, `Gamma = Omega = 0.01`, `g = -10`, resonant cavity.
pub fn fig2a_params() -> DetectorParams {
    DetectorParams::new(0.01, 0.01, 3.0, 0.0, -10.0).expect("valid preset")
}

pub const FIG2A_XI: f64 = 20.0;
pub const FIG2A_DETUNING: f64 = -7.0;

/// Standard, variational (`xi = 20`), detuned (`Delta = -7`) and ancilla curves.
pub fn fig2a_curves() -> Vec<(&'static str, SchemeConfig)> {
    let p = fig2a_params();
    vec![
        ("standard", SchemeConfig::standard(p)),
        ("vm", SchemeConfig::standard(p).with_xi(FIG2A_XI)),
        (
            "cd",
            SchemeConfig::standard(p.with_detuning(FIG2A_DETUNING)),
        ),
        ("cqnc", SchemeConfig::cqnc(p)),
    ]
}

pub fn fig2a_grid() -> Grid {
    Grid::log(1e-3, 10.0, 400)
}

/// `gamma = 100`, `Gamma = Omega = 1`, `g = 5`.
pub fn fig2b_params() -> DetectorParams {
    DetectorParams::new(1.0, 1.0, 100.0, 0.0, 5.0).expect("valid preset")
}

pub const FIG2B_ETA: f64 = 1.0;

pub fn fig2b_config() -> SchemeConfig {
    SchemeConfig::toy(fig2b_params(), FIG2B_ETA)
}

pub fn fig2b_grid() -> Grid {
    let om = fig2b_params().mech_frequency;
    Grid::log(1e-2 * om, 1e2 * om, 400)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::build;

    #[test]
    fn grids() {
        let g = fig2a_grid().omegas().unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!((g[0], g[399]), (1e-3, 10.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let lin = Grid {
            spacing: Spacing::Linear,
            ..Grid::log(1.0, 2.0, 3)
        };
        assert_eq!(lin.omegas().unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(Grid::log(1.0, 2.0, 1).omegas().is_err());
        assert!(Grid::log(0.0, 2.0, 5).omegas().is_err());
        assert!(Grid::log(3.0, 2.0, 5).omegas().is_err());
    }

    #[test]
    fn presets_are_stable() {
        for (_, cfg) in fig2a_curves() {
            build(&cfg).unwrap();
        }
        build(&fig2b_config()).unwrap();
    }
}
