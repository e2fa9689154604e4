//! Sample-level pilot transmission through a multipath channel with
//! fractional Doppler, AWGN, and the receiver front end.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{
    build_window, doppler_phasor, extend, grid_cell, DDGridSpec, Extension, FrameSpec, Path,
    PathSet, WindowVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed from a master seed and a counter path, e.g.
/// `[sweep_point, trial, stream]`. The result depends only on its inputs, so
/// trials can run in any order on any number of workers.
pub fn sub_seed(master: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(splitmix64(master), |s, &c| splitmix64(s ^ splitmix64(c)))
}

/// BPSK pseudo-noise pilot.
#[derive(Clone, Debug, PartialEq)]
pub struct PilotSequence {
    pub x: Vec<C64>,
    pub seed: u64,
}

pub fn gen_pilot(len: usize, seed: u64) -> PilotSequence {
    let mut r = rng(seed);
    let x = (0..len)
        .map(|_| C64::new(if r.random::<bool>() { 1.0 } else { -1.0 }, 0.0))
        .collect();
    PilotSequence { x, seed }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GainModel {
    /// `g·e^{jθ}`, `g ~ U(0,1)`, `θ ~ U(0,2π)`.
    ComplexUniformMag,
    /// `g ~ U(0,1)`, real.
    RealUniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DopplerModel {
    /// Uniform real value, integer and fractional parts.
    Fractional,
    /// Uniform over the grid points `k/u_ν` inside the range.
    OnGrid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDrawConfig {
    /// Inclusive path-count range.
    pub path_count: (usize, usize),
    pub gain_model: GainModel,
    /// Inclusive delay range in samples.
    pub delay_range: (usize, usize),
    /// Inclusive normalized-Doppler range.
    pub doppler_range: (f64, f64),
    pub doppler_model: DopplerModel,
}

impl ChannelDrawConfig {
    /// The reference ensemble: 5 to 8 paths, delays over the whole grid,
    /// Dopplers over the whole grid span.
    pub fn for_grid(grid: &DDGridSpec) -> Self {
        Self {
            path_count: (5, 8),
            gain_model: GainModel::ComplexUniformMag,
            delay_range: (0, grid.delay_bins() - 1),
            doppler_range: (0.0, grid.max_doppler()),
            doppler_model: DopplerModel::Fractional,
        }
    }

    pub fn validate(&self, grid: &DDGridSpec) -> Result<()> {
        let (pmin, pmax) = self.path_count;
        if pmin > pmax {
            return Err(Error::ChannelDraw(format!("empty path-count range {pmin}..={pmax}")));
        }
        let (dlo, dhi) = self.delay_range;
        if dlo > dhi || dhi >= grid.delay_bins() {
            return Err(Error::ChannelDraw(format!(
                "delay range {dlo}..={dhi} outside grid 0..{}",
                grid.delay_bins()
            )));
        }
        let (klo, khi) = self.doppler_range;
        if !(klo >= 0.0 && klo <= khi && khi <= grid.max_doppler() + 1e-12) {
            return Err(Error::ChannelDraw(format!(
                "Doppler range [{klo}, {khi}] outside grid [0, {}]",
                grid.max_doppler()
            )));
        }
        Ok(())
    }

    fn cell_capacity(&self, grid: &DDGridSpec) -> usize {
        let delays = self.delay_range.1 - self.delay_range.0 + 1;
        let lo = grid_cell(self.doppler_range.0, grid);
        let hi = grid_cell(self.doppler_range.1, grid);
        let doppler_cells = match self.doppler_model {
            DopplerModel::OnGrid => {
                let u = grid.oversampling() as f64;
                let first = (self.doppler_range.0 * u).ceil() as i64;
                let last = (self.doppler_range.1 * u + 1e-9).floor() as i64;
                (last - first + 1).max(0) as usize
            }
            DopplerModel::Fractional => (hi - lo + 1) as usize,
        };
        delays * doppler_cells
    }
}

/// Draws a random channel; paths landing in an occupied grid cell are
/// redrawn.
pub fn draw_channel(cfg: &ChannelDrawConfig, grid: &DDGridSpec, rng: &mut impl Rng) -> Result<PathSet> {
    cfg.validate(grid)?;
    let count = rng.random_range(cfg.path_count.0..=cfg.path_count.1);
    if count > cfg.cell_capacity(grid) {
        return Err(Error::ChannelDraw(format!(
            "{count} paths do not fit in {} distinct grid cells",
            cfg.cell_capacity(grid)
        )));
    }
    let u = grid.oversampling() as f64;
    let mut paths: Vec<Path> = Vec::with_capacity(count);
    let mut cells = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while paths.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::ChannelDraw("could not place paths in distinct cells".into()));
        }
        let delay = rng.random_range(cfg.delay_range.0..=cfg.delay_range.1);
        let (lo, hi) = cfg.doppler_range;
        let doppler = match cfg.doppler_model {
            DopplerModel::Fractional => {
                if hi > lo {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                }
            }
            DopplerModel::OnGrid => {
                let first = (lo * u).ceil() as usize;
                let last = (hi * u + 1e-9).floor() as usize;
                rng.random_range(first..=last) as f64 / u
            }
        };
        let cell = (delay, grid_cell(doppler, grid));
        if cells.contains(&cell) {
            continue;
        }
        let gain = match cfg.gain_model {
            GainModel::ComplexUniformMag => {
                let g: f64 = rng.random();
                let theta: f64 = rng.random::<f64>() * TAU;
                C64::from_polar(g, theta)
            }
            GainModel::RealUniform => C64::new(rng.random(), 0.0),
        };
        cells.push(cell);
        paths.push(Path { gain, delay, doppler });
    }
    Ok(PathSet::new(paths))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    /// `f64::INFINITY` means noiseless.
    pub snr_db: f64,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self { snr_db: f64::INFINITY }
    }

    pub fn from_snr_db(snr_db: f64) -> Self {
        Self { snr_db }
    }

    /// `σ² = 10^{-SNR/10}` for a unit-power pilot.
    pub fn sigma2(&self) -> f64 {
        if self.snr_db.is_infinite() && self.snr_db > 0.0 {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma2() == 0.0
    }
}

/// Transmits the cyclically extended pilot through `paths` and adds noise.
///
/// Output sample `i` corresponds to time `n = i - L_cp`. Delays act linearly
/// on the frame; samples before the frame start contribute nothing, which
/// only touches the first `ℓ_max` samples the receiver discards.
pub fn propagate(
    pilot: &PilotSequence,
    frame: &FrameSpec,
    paths: &PathSet,
    noise: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<Vec<C64>> {
    if let Some(d) = paths.max_delay() {
        if d > frame.max_delay() {
            return Err(Error::InvalidPaths(format!(
                "path delay {d} exceeds the frame's maximum delay {}",
                frame.max_delay()
            )));
        }
    }
    let tx = extend(frame, Extension::Full, &pilot.x)?;
    let l = frame.pilot_len();
    let cp = frame.cp_len() as i64;
    let mut r = vec![C64::new(0.0, 0.0); tx.len()];
    for p in &paths.paths {
        for (i, out) in r.iter_mut().enumerate() {
            let src = i as i64 - p.delay as i64;
            if src < 0 {
                continue;
            }
            let t = i as i64 - cp - p.delay as i64;
            *out += p.gain * doppler_phasor(p.doppler, t, l) * tx[src as usize];
        }
    }
    let sigma2 = noise.sigma2();
    if sigma2 > 0.0 {
        let s = (sigma2 / 2.0).sqrt();
        for z in r.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += C64::new(re * s, im * s);
        }
    }
    Ok(r)
}

/// Drops the first `ℓ_max` samples and applies the window, covering
/// `n ∈ [-L_w/2, L + L_w/2 - 1]`.
pub fn receiver_front_end(r: &[C64], frame: &FrameSpec, window: &WindowVector) -> Result<Vec<C64>> {
    if r.len() != frame.total_len() {
        return Err(Error::DimensionMismatch {
            expected: frame.total_len(),
            got: r.len(),
        });
    }
    if window.len() != frame.window_len() {
        return Err(Error::DimensionMismatch {
            expected: frame.window_len(),
            got: window.len(),
        });
    }
    Ok(r[frame.max_delay()..]
        .iter()
        .zip(&window.w)
        .map(|(z, &w)| z * w)
        .collect())
}

/// `propagate` followed by `receiver_front_end` with the frame's own window.
pub fn observe(
    pilot: &PilotSequence,
    frame: &FrameSpec,
    paths: &PathSet,
    noise: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<Vec<C64>> {
    let r = propagate(pilot, frame, paths, noise, rng)?;
    receiver_front_end(&r, frame, &build_window(frame))
}
