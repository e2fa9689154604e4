//! Flat `section.key=value` experiment configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are an
//! error. `frame.Lw` accepts either a sample count or `L/n`, so a roll-off
//! tied to the pilot length follows a pilot-length sweep.

use crate::error::{Error, Result};
use crate::model::{DDGridSpec, FrameSpec};
use crate::sim::{ChannelDrawConfig, DopplerModel, GainModel};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Window used by a solver run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowKind {
    /// Raised cosine with the configured roll-off.
    Rcos,
    /// No windowing, `L_w = 0`.
    Rect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DaOmp,
    Omp,
}

/// Solver identifier such as `da_omp_rcos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SolverId {
    pub algorithm: Algorithm,
    pub window: WindowKind,
}

impl SolverId {
    pub const DA_OMP_RCOS: Self = Self { algorithm: Algorithm::DaOmp, window: WindowKind::Rcos };
    pub const DA_OMP_RECT: Self = Self { algorithm: Algorithm::DaOmp, window: WindowKind::Rect };
    pub const OMP_RCOS: Self = Self { algorithm: Algorithm::Omp, window: WindowKind::Rcos };
    pub const OMP_RECT: Self = Self { algorithm: Algorithm::Omp, window: WindowKind::Rect };

    pub fn all() -> Vec<Self> {
        vec![Self::DA_OMP_RCOS, Self::DA_OMP_RECT, Self::OMP_RCOS, Self::OMP_RECT]
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.algorithm {
            Algorithm::DaOmp => "da_omp",
            Algorithm::Omp => "omp",
        };
        let w = match self.window {
            WindowKind::Rcos => "rcos",
            WindowKind::Rect => "rect",
        };
        write!(f, "{a}_{w}")
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "da_omp_rcos" => Ok(Self::DA_OMP_RCOS),
            "da_omp_rect" => Ok(Self::DA_OMP_RECT),
            "omp_rcos" => Ok(Self::OMP_RCOS),
            "omp_rect" => Ok(Self::OMP_RECT),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

pub fn parse_solver_list(s: &str) -> Result<Vec<SolverId>> {
    let list: Vec<SolverId> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::Config("solver list is empty".into()));
    }
    Ok(list)
}

/// Stopping rule of the standard-OMP baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineRule {
    /// `‖r‖² <= L'σ²`
    Threshold,
    /// As many atoms as true paths.
    FixedPaths,
}

/// Roll-off given either absolutely or as a fraction of L.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RollOff {
    Samples(usize),
    /// `L / n`
    Fraction(usize),
}

impl RollOff {
    pub fn resolve(&self, pilot_len: usize) -> usize {
        match *self {
            RollOff::Samples(n) => n,
            RollOff::Fraction(d) => {
                let v = pilot_len / d;
                v - v % 2
            }
        }
    }
}

impl fmt::Display for RollOff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RollOff::Samples(n) => write!(f, "{n}"),
            RollOff::Fraction(d) => write!(f, "L/{d}"),
        }
    }
}

impl FromStr for RollOff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(d) = s.strip_prefix("L/") {
            let d: usize = parse_num(d, "frame.Lw")?;
            if d == 0 {
                return Err(Error::Config("frame.Lw: division by zero".into()));
            }
            Ok(RollOff::Fraction(d))
        } else {
            Ok(RollOff::Samples(parse_num(s, "frame.Lw")?))
        }
    }
}

/// Parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    SnrDb,
    RollOff,
    Oversampling,
    PilotLen,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::SnrDb => "snr_db",
            SweepVar::RollOff => "Lw",
            SweepVar::Oversampling => "u_nu",
            SweepVar::PilotLen => "L",
        })
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "snr_db" => Ok(SweepVar::SnrDb),
            "Lw" => Ok(SweepVar::RollOff),
            "u_nu" => Ok(SweepVar::Oversampling),
            "L" => Ok(SweepVar::PilotLen),
            other => Err(Error::Config(format!("unknown sweep variable '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub pilot_len: usize,
    pub roll_off: RollOff,
    /// ℓ_max; defaults to G_τ.
    pub max_delay: Option<usize>,
    pub delay_bins: usize,
    pub doppler_bins: usize,
    pub oversampling: usize,
    /// When set, the channel's Doppler span is fixed to `[0, span]` and
    /// G_ν is recomputed from u_ν as `ceil(u_ν·span) + 1`.
    pub doppler_span: Option<f64>,
    pub paths_min: usize,
    pub paths_max: usize,
    pub gain_model: GainModel,
    pub doppler_model: DopplerModel,
    /// `f64::INFINITY` for noiseless runs.
    pub snr_db: f64,
    pub sweep_var: SweepVar,
    pub sweep_values: Vec<f64>,
    pub solvers: Vec<SolverId>,
    pub baseline: BaselineRule,
    pub cap: Option<usize>,
    pub normalize_columns: bool,
    pub interference_delay: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// 0 means one worker per core.
    pub workers: usize,
    pub out_dir: PathBuf,
    pub name: String,
}

impl Default for ExperimentConfig {
    /// NMSE vs SNR with `L = 128`, `L_w = L/2`, `G_τ = 4`, `G_ν = 16`, `u_ν = 2`.
    fn default() -> Self {
        Self {
            pilot_len: 128,
            roll_off: RollOff::Fraction(2),
            max_delay: None,
            delay_bins: 4,
            doppler_bins: 16,
            oversampling: 2,
            doppler_span: None,
            paths_min: 5,
            paths_max: 8,
            gain_model: GainModel::ComplexUniformMag,
            doppler_model: DopplerModel::Fractional,
            snr_db: 20.0,
            sweep_var: SweepVar::SnrDb,
            sweep_values: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            solvers: SolverId::all(),
            baseline: BaselineRule::Threshold,
            cap: None,
            normalize_columns: false,
            interference_delay: None,
            trials: 1000,
            seed: 1,
            workers: 0,
            out_dir: PathBuf::from("out"),
            name: "sweep".into(),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{}'", s.trim())))
}

fn parse_f64(s: &str, key: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        other => parse_num(other, key),
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn parse_opt<T: FromStr>(s: &str, key: &str) -> Result<Option<T>> {
    match s.trim() {
        "" | "none" | "auto" => Ok(None),
        v => parse_num(v, key).map(Some),
    }
}

fn fmt_opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl ExperimentConfig {
    /// Parses the text format on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key; used by the parser and for CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "frame.L" => self.pilot_len = parse_num(value, key)?,
            "frame.Lw" => self.roll_off = value.parse()?,
            "frame.ell_max" => self.max_delay = parse_opt(value, key)?,
            "grid.G_tau" => self.delay_bins = parse_num(value, key)?,
            "grid.G_nu" => self.doppler_bins = parse_num(value, key)?,
            "grid.u_nu" => self.oversampling = parse_num(value, key)?,
            "grid.doppler_span" => self.doppler_span = parse_opt(value, key)?,
            "channel.paths_min" => self.paths_min = parse_num(value, key)?,
            "channel.paths_max" => self.paths_max = parse_num(value, key)?,
            "channel.gain" => {
                self.gain_model = match value {
                    "complex_uniform_mag" => GainModel::ComplexUniformMag,
                    "real_uniform" => GainModel::RealUniform,
                    _ => return Err(Error::Config(format!("{key}: unknown gain model '{value}'"))),
                }
            }
            "channel.doppler" => {
                self.doppler_model = match value {
                    "fractional" => DopplerModel::Fractional,
                    "on_grid" => DopplerModel::OnGrid,
                    _ => return Err(Error::Config(format!("{key}: unknown Doppler model '{value}'"))),
                }
            }
            "noise.snr_db" => self.snr_db = parse_f64(value, key)?,
            "sweep.var" => self.sweep_var = value.parse()?,
            "sweep.values" => {
                self.sweep_values = value
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| parse_f64(t, key))
                    .collect::<Result<_>>()?
            }
            "solver.list" => self.solvers = parse_solver_list(value)?,
            "solver.baseline" => {
                self.baseline = match value {
                    "threshold" => BaselineRule::Threshold,
                    "fixed_p" => BaselineRule::FixedPaths,
                    _ => return Err(Error::Config(format!("{key}: unknown baseline rule '{value}'"))),
                }
            }
            "solver.cap" => self.cap = parse_opt(value, key)?,
            "solver.normalize" => self.normalize_columns = parse_num(value, key)?,
            "solver.interference_delay" => self.interference_delay = parse_opt(value, key)?,
            "run.trials" => self.trials = parse_num(value, key)?,
            "run.seed" => self.seed = parse_num(value, key)?,
            "run.workers" => self.workers = parse_num(value, key)?,
            "output.dir" => self.out_dir = PathBuf::from(value),
            "output.name" => self.name = value.to_string(),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("run.trials must be >= 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::Config("sweep.values is empty".into()));
        }
        if self.sweep_values.iter().any(|v| v.is_nan()) {
            return Err(Error::Config("sweep.values contains NaN".into()));
        }
        if self.sweep_var != SweepVar::SnrDb
            && self.sweep_values.iter().any(|v| !v.is_finite() || *v < 0.0 || v.fract() != 0.0)
        {
            return Err(Error::Config(format!(
                "sweep over {} needs non-negative integer values",
                self.sweep_var
            )));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("solver.list is empty".into()));
        }
        if self.paths_min > self.paths_max {
            return Err(Error::Config("channel.paths_min > channel.paths_max".into()));
        }
        if let Some(span) = self.doppler_span {
            if !(span >= 0.0 && span.is_finite()) {
                return Err(Error::Config("grid.doppler_span must be finite and >= 0".into()));
            }
        }
        for v in &self.sweep_values {
            self.at_point(*v)?.geometry()?;
        }
        Ok(())
    }

    /// The configuration with the sweep variable set to `value`.
    pub fn at_point(&self, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match self.sweep_var {
            SweepVar::SnrDb => c.snr_db = value,
            SweepVar::RollOff => c.roll_off = RollOff::Samples(value as usize),
            SweepVar::Oversampling => c.oversampling = value as usize,
            SweepVar::PilotLen => c.pilot_len = value as usize,
        }
        Ok(c)
    }

    /// Frame, grid and channel ensemble of this (point-resolved) config.
    pub fn geometry(&self) -> Result<(FrameSpec, DDGridSpec, ChannelDrawConfig)> {
        let doppler_bins = match self.doppler_span {
            Some(span) => (self.oversampling as f64 * span - 1e-9).ceil().max(0.0) as usize + 1,
            None => self.doppler_bins,
        };
        let grid = DDGridSpec::new(self.delay_bins, doppler_bins, self.oversampling)?;
        let max_delay = self.max_delay.unwrap_or(self.delay_bins);
        if max_delay + 1 < self.delay_bins {
            return Err(Error::Config(format!(
                "frame.ell_max={max_delay} cannot cover delays up to {}",
                self.delay_bins - 1
            )));
        }
        let frame = FrameSpec::new(self.pilot_len, self.roll_off.resolve(self.pilot_len), max_delay)?;
        let channel = ChannelDrawConfig {
            path_count: (self.paths_min, self.paths_max),
            gain_model: self.gain_model,
            delay_range: (0, grid.delay_bins() - 1),
            doppler_range: (0.0, self.doppler_span.unwrap_or(grid.max_doppler())),
            doppler_model: self.doppler_model,
        };
        channel.validate(&grid)?;
        Ok((frame, grid, channel))
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let gain = match self.gain_model {
            GainModel::ComplexUniformMag => "complex_uniform_mag",
            GainModel::RealUniform => "real_uniform",
        };
        let doppler = match self.doppler_model {
            DopplerModel::Fractional => "fractional",
            DopplerModel::OnGrid => "on_grid",
        };
        let baseline = match self.baseline {
            BaselineRule::Threshold => "threshold",
            BaselineRule::FixedPaths => "fixed_p",
        };
        let values: Vec<String> = self.sweep_values.iter().map(|v| fmt_f64(*v)).collect();
        let solvers: Vec<String> = self.solvers.iter().map(|s| s.to_string()).collect();
        [
            format!("frame.L={}", self.pilot_len),
            format!("frame.Lw={}", self.roll_off),
            format!("frame.ell_max={}", fmt_opt(&self.max_delay)),
            format!("grid.G_tau={}", self.delay_bins),
            format!("grid.G_nu={}", self.doppler_bins),
            format!("grid.u_nu={}", self.oversampling),
            format!("grid.doppler_span={}", fmt_opt(&self.doppler_span)),
            format!("channel.paths_min={}", self.paths_min),
            format!("channel.paths_max={}", self.paths_max),
            format!("channel.gain={gain}"),
            format!("channel.doppler={doppler}"),
            format!("noise.snr_db={}", fmt_f64(self.snr_db)),
            format!("sweep.var={}", self.sweep_var),
            format!("sweep.values={}", values.join(",")),
            format!("solver.list={}", solvers.join(",")),
            format!("solver.baseline={baseline}"),
            format!("solver.cap={}", fmt_opt(&self.cap)),
            format!("solver.normalize={}", self.normalize_columns),
            format!("solver.interference_delay={}", fmt_opt(&self.interference_delay)),
            format!("run.trials={}", self.trials),
            format!("run.seed={}", self.seed),
            format!("run.workers={}", self.workers),
            format!("output.dir={}", self.out_dir.display()),
            format!("output.name={}", self.name),
        ]
        .join("\n")
            + "\n"
    }

    /// Hash of everything that affects results (worker count and output
    /// location excluded).
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.workers = 0;
        c.out_dir = PathBuf::from("-");
        c.name = "-".into();
        let digest = Sha256::digest(c.to_text().as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }
}
