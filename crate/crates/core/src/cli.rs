//! Command-line front end: spectrum sweeps, figure presets and verification.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 configuration or
//! usage error, 3 unstable model, 4 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::noise::{sensitivity_spectrum, squeeze_spectrum, SensitivitySpectrum};
use crate::presets::{self, Grid};
use crate::schemes::{DetectorParams, SchemeConfig, Variant};
use crate::verify::{run_suite, Suite, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "forcenoise",
    version,
    about = "Force-noise spectra and quantum limits of linear detectors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Sweep S_f and every bound over a frequency grid and write CSV.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Resonant, variational, detuned and ancilla curves of the position-coupled detector.
    Fig2a(FigureArgs),
    /// Toy detector against its generalized and optimal UQL.
    Fig2b(FigureArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
pub struct SpectrumArgs {
    /// Read `key = value` settings from a file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the resolved configuration to a file and exit.
    #[arg(long, value_name = "PATH")]
    pub dump_config: Option<PathBuf>,
    /// standard | cqnc | toy
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long = "Omega")]
    pub omega_m: Option<f64>,
    #[arg(long = "Gamma")]
    pub damping: Option<f64>,
    #[arg(long = "gamma")]
    pub decay: Option<f64>,
    #[arg(long = "Delta")]
    pub detuning: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long = "n-th")]
    pub n_th: Option<f64>,
    /// Readout angle in radians.
    #[arg(long, conflicts_with = "xi")]
    pub phi: Option<f64>,
    /// Readout angle as `tan(phi)`.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Squeezing parameter of the readout input.
    #[arg(long = "squeeze-s")]
    pub squeeze_s: Option<f64>,
    #[arg(long = "squeeze-theta")]
    pub squeeze_theta: Option<f64>,
    #[arg(long = "omega-min")]
    pub omega_min: Option<f64>,
    #[arg(long = "omega-max")]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// linear | log
    #[arg(long)]
    pub spacing: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Directory receiving one CSV per curve.
    #[arg(long, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// uql-dominance | identities | cqnc | bounds | linresp | feedback | all
    pub suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// A fully resolved spectrum run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: Variant,
    pub params: DetectorParams,
    pub phi: f64,
    pub eta: f64,
    pub squeeze_s: f64,
    pub squeeze_theta: f64,
    pub grid: Grid,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    /// Resonant position-coupled detector on the fig2a grid.
    fn default() -> Self {
        Self {
            variant: Variant::Standard,
            params: presets::fig2a_params(),
            phi: 0.0,
            eta: 0.0,
            squeeze_s: 0.0,
            squeeze_theta: 0.0,
            grid: presets::fig2a_grid(),
            output: None,
        }
    }
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, Error> {
    value
        .parse()
        .map_err(|_| config_error(format!("`{key}`: not a number: `{value}`")))
}

impl RunConfig {
    pub fn scheme(&self) -> Result<SchemeConfig, Error> {
        let mut cfg = match self.variant {
            Variant::Standard => SchemeConfig::standard(self.params),
            Variant::Cqnc => SchemeConfig::cqnc(self.params),
            Variant::Toy => SchemeConfig::toy(self.params, self.eta),
        };
        if self.variant != Variant::Toy && self.eta != 0.0 {
            return Err(config_error("eta only applies to the toy scheme"));
        }
        cfg = cfg
            .with_readout_angle(self.phi)
            .with_input(squeeze_spectrum(self.squeeze_s, self.squeeze_theta));
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses the `[scheme]` / `[grid]` / `[output]` key-value format.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "scheme" | "grid" | "output") {
                    return Err(config_error(format!(
                        "line {}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| {
                    config_error(format!("line {}: expected `key = value`", lineno + 1))
                })?;
            cfg.set(&section, key, value)
                .map_err(|e| config_error(format!("line {}: {}", lineno + 1, strip_prefix(&e))))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), Error> {
        let p = &mut self.params;
        match (section, key) {
            ("scheme", "scheme") => self.variant = value.parse()?,
            ("scheme", "Omega") => p.mech_frequency = parse_f64(key, value)?,
            ("scheme", "Gamma") => p.mech_damping = parse_f64(key, value)?,
            ("scheme", "gamma") => p.cavity_decay = parse_f64(key, value)?,
            ("scheme", "Delta") => p.detuning = parse_f64(key, value)?,
            ("scheme", "g") => p.coupling = parse_f64(key, value)?,
            ("scheme", "n_th") => p.n_th = parse_f64(key, value)?,
            ("scheme", "phi") => self.phi = parse_f64(key, value)?,
            ("scheme", "xi") => self.phi = parse_f64(key, value)?.atan(),
            ("scheme", "eta") => self.eta = parse_f64(key, value)?,
            ("scheme", "squeeze_s") => self.squeeze_s = parse_f64(key, value)?,
            ("scheme", "squeeze_theta") => self.squeeze_theta = parse_f64(key, value)?,
            ("grid", "omega_min") => self.grid.omega_min = parse_f64(key, value)?,
            ("grid", "omega_max") => self.grid.omega_max = parse_f64(key, value)?,
            ("grid", "points") => {
                self.grid.points = value
                    .parse()
                    .map_err(|_| config_error(format!("`points`: not a count: `{value}`")))?
            }
            ("grid", "spacing") => self.grid.spacing = value.parse()?,
            ("output", "path") => self.output = Some(PathBuf::from(value)),
            ("output", "format") if value == "csv" => {}
            ("output", "format") => {
                return Err(config_error(format!("unsupported format `{value}`")))
            }
            ("", _) => return Err(config_error(format!("`{key}` outside a section"))),
            _ => return Err(config_error(format!("unknown key `{key}` in [{section}]"))),
        }
        Ok(())
    }

    fn apply(&mut self, a: &SpectrumArgs) -> Result<(), Error> {
        if let Some(s) = &a.scheme {
            self.variant = s.parse()?;
        }
        let p = &mut self.params;
        let pairs = [
            (a.omega_m, &mut p.mech_frequency),
            (a.damping, &mut p.mech_damping),
            (a.decay, &mut p.cavity_decay),
            (a.detuning, &mut p.detuning),
            (a.g, &mut p.coupling),
            (a.n_th, &mut p.n_th),
            (a.phi, &mut self.phi),
            (a.eta, &mut self.eta),
            (a.squeeze_s, &mut self.squeeze_s),
            (a.squeeze_theta, &mut self.squeeze_theta),
            (a.omega_min, &mut self.grid.omega_min),
            (a.omega_max, &mut self.grid.omega_max),
        ];
        for (flag, slot) in pairs {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(xi) = a.xi {
            self.phi = xi.atan();
        }
        if let Some(n) = a.points {
            self.grid.points = n;
        }
        if let Some(s) = &a.spacing {
            self.grid.spacing = s.parse()?;
        }
        if let Some(o) = &a.output {
            self.output = Some(o.clone());
        }
        Ok(())
    }

    /// Key-value pairs in file order; floats use the shortest exact form.
    pub fn entries(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let f = |x: f64| format!("{x:?}");
        vec![
            ("scheme".into(), self.variant.name().into()),
            ("Omega".into(), f(p.mech_frequency)),
            ("Gamma".into(), f(p.mech_damping)),
            ("gamma".into(), f(p.cavity_decay)),
            ("Delta".into(), f(p.detuning)),
            ("g".into(), f(p.coupling)),
            ("n_th".into(), f(p.n_th)),
            ("phi".into(), f(self.phi)),
            ("eta".into(), f(self.eta)),
            ("squeeze_s".into(), f(self.squeeze_s)),
            ("squeeze_theta".into(), f(self.squeeze_theta)),
            ("omega_min".into(), f(self.grid.omega_min)),
            ("omega_max".into(), f(self.grid.omega_max)),
            ("points".into(), self.grid.points.to_string()),
            ("spacing".into(), self.grid.spacing.to_string()),
        ]
    }

    pub fn to_file_string(&self) -> String {
        let entries = self.entries();
        let mut out = String::from("# forcenoise spectrum configuration\n[scheme]\n");
        for (k, v) in &entries[..11] {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str("\n[grid]\n");
        for (k, v) in &entries[11..] {
            let _ = writeln!(out, "{k} = {v}");
        }
        if let Some(path) = &self.output {
            let _ = write!(out, "\n[output]\npath = {}\nformat = csv\n", path.display());
        }
        out
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::InvalidConfig(msg) => msg.clone(),
        other => other.to_string(),
    }
}

/// Maps a library error to an exit code and reports it.
fn fail(err: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {err}");
    match err {
        Error::InvalidConfig(_) => EXIT_CONFIG,
        Error::UnstableModel { .. } => EXIT_UNSTABLE,
        _ => {
            if let Some(w) = err.omega() {
                let _ = writeln!(stderr, "offending omega = {w:?}");
            }
            EXIT_NUMERICAL
        }
    }
}

fn write_spectrum(
    spectrum: &SensitivitySpectrum,
    metadata: &[(String, String)],
    path: Option<&Path>,
    stdout: &mut dyn Write,
) -> std::io::Result<()> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            spectrum.write_csv(&mut buf, metadata)?;
            fs::write(p, buf)
        }
        None => spectrum.write_csv(stdout, metadata),
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut cfg = match &args.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => match RunConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return fail(&e, stderr),
            },
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
        None => RunConfig::default(),
    };
    if let Err(e) = cfg.apply(args) {
        return fail(&e, stderr);
    }
    run_config(&cfg, args.dump_config.as_deref(), stdout, stderr)
}

/// Validates `cfg`, optionally dumps it, and writes its spectrum.
pub fn run_config(
    cfg: &RunConfig,
    dump: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let scheme = match cfg.scheme() {
        Ok(s) => s,
        Err(e) => return fail(&e, stderr),
    };
    let grid = match cfg.grid.omegas() {
        Ok(g) => g,
        Err(e) => return fail(&e, stderr),
    };
    if let Some(path) = dump {
        if let Err(e) = fs::write(path, cfg.to_file_string()) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG;
        }
        return EXIT_OK;
    }
    let spectrum = match sensitivity_spectrum(&scheme, &grid) {
        Ok(s) => s,
        Err(e) => return fail(&e, stderr),
    };
    match write_spectrum(&spectrum, &cfg.entries(), cfg.output.as_deref(), stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            EXIT_CONFIG
        }
    }
}

fn write_figure(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    if let Err(e) = fs::create_dir_all(dir) {
        let _ = writeln!(stderr, "error: cannot create {}: {e}", dir.display());
        return EXIT_CONFIG;
    }
    let path = dir.join(format!("{name}.csv"));
    let cfg = RunConfig {
        output: Some(path.clone()),
        ..cfg.clone()
    };
    let code = run_config(&cfg, None, stdout, stderr);
    if code == EXIT_OK {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    code
}

pub fn cmd_fig2a(args: &FigureArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let base = RunConfig::default();
    for (name, scheme) in presets::fig2a_curves() {
        let cfg = RunConfig {
            variant: scheme.variant,
            params: scheme.params,
            phi: scheme.readout_angle,
            grid: presets::fig2a_grid(),
            ..base.clone()
        };
        let code = write_figure(&args.output, &format!("fig2a_{name}"), &cfg, stdout, stderr);
        if code != EXIT_OK {
            return code;
        }
    }
    EXIT_OK
}

pub fn cmd_fig2b(args: &FigureArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let scheme = presets::fig2b_config();
    let cfg = RunConfig {
        variant: scheme.variant,
        params: scheme.params,
        eta: scheme.eta,
        grid: presets::fig2b_grid(),
        ..RunConfig::default()
    };
    write_figure(&args.output, "fig2b_toy", &cfg, stdout, stderr)
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let suite: Suite = match args.suite.parse() {
        Ok(s) => s,
        Err(e) => return fail(&e, stderr),
    };
    let checks = run_suite(suite, args.seed);
    for c in &checks {
        let _ = writeln!(stdout, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(
        stdout,
        "{}: {} checks, {} failed (seed {})",
        suite.name(),
        checks.len(),
        failed,
        args.seed
    );
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, stdout, stderr),
        Command::Fig2a(a) => cmd_fig2a(a, stdout, stderr),
        Command::Fig2b(a) => cmd_fig2b(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    }
}
