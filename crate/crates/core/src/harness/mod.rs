//! Monte-Carlo NMSE experiments.
//!
//! Every trial is a pure function of `(master seed, trial index)`: the
//! channel and the noise realization are drawn from seeds derived by
//! [`sub_seed`] from `[stream, trial]`, so the same trial sees the same
//! channel at every sweep point and for every solver, and results do not
//! depend on the worker count.

pub mod config;
pub mod output;
pub mod trace;

pub use config::{
    Algorithm, BaselineRule, ExperimentConfig, RollOff, SolverId, SweepVar, WindowKind,
};

use crate::dictionary::{DictionaryOptions, WindowedDictionary};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{build_window, channel_matrix, DDGridSpec, FrameSpec, PathSet};
use crate::sim::{draw_channel, gen_pilot, observe, rng, sub_seed, ChannelDrawConfig, NoiseConfig, PilotSequence};
use crate::solver::{pursue, reconstruct_channel, SolveOptions, SparseEstimate, StopReason, StoppingRule};

/// Seed streams.
pub const STREAM_PILOT: u64 = 0;
pub const STREAM_CHANNEL: u64 = 1;
pub const STREAM_NOISE: u64 = 2;

/// `‖H̃ - H‖²_F / ‖H‖²_F`
pub fn nmse(estimate: &CMatrix, truth: &CMatrix) -> Result<f64> {
    if (estimate.rows(), estimate.cols()) != (truth.rows(), truth.cols()) {
        return Err(Error::DimensionMismatch {
            expected: truth.rows() * truth.cols(),
            got: estimate.rows() * estimate.cols(),
        });
    }
    let denom = truth.frobenius_norm_sqr();
    if denom == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let num: f64 = estimate
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(num / denom)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub point: usize,
    pub value: f64,
    pub trial: usize,
    pub solver: SolverId,
    /// `None` when the trial failed.
    pub nmse: Option<f64>,
    pub q: usize,
    pub stop: Option<StopReason>,
    pub channel_seed: u64,
    pub paths: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub var: SweepVar,
    pub value: f64,
    pub solver: SolverId,
    pub nmse_mean: f64,
    pub nmse_median: f64,
    pub nmse_stderr: f64,
    /// Trials that completed.
    pub trials: usize,
    pub mean_q: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub fingerprint: String,
    pub summaries: Vec<PointSummary>,
    pub trials: Vec<TrialResult>,
}

impl SweepResult {
    pub fn summary(&self, solver: SolverId, value: f64) -> Option<&PointSummary> {
        self.summaries
            .iter()
            .find(|s| s.solver == solver && s.value == value)
    }

    /// `(value, mean NMSE)` series of one solver in sweep order.
    pub fn series(&self, solver: SolverId) -> Vec<(f64, f64)> {
        self.summaries
            .iter()
            .filter(|s| s.solver == solver)
            .map(|s| (s.value, s.nmse_mean))
            .collect()
    }
}

/// Everything shared by the trials of one sweep point.
pub struct PointContext {
    pub config: ExperimentConfig,
    pub frame: FrameSpec,
    pub grid: DDGridSpec,
    pub channel: ChannelDrawConfig,
    pub noise: NoiseConfig,
    pub pilot: PilotSequence,
    /// `(window, frame, dictionary)` for every window a solver needs.
    pub dictionaries: Vec<(WindowKind, FrameSpec, WindowedDictionary)>,
}

impl PointContext {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let (frame, grid, channel) = config.geometry()?;
        let pilot = gen_pilot(frame.pilot_len(), sub_seed(config.seed, &[STREAM_PILOT]));
        let opts = DictionaryOptions {
            normalize_columns: config.normalize_columns,
            interference_delay: config.interference_delay,
        };
        let mut dictionaries = Vec::new();
        for kind in [WindowKind::Rcos, WindowKind::Rect] {
            if !config.solvers.iter().any(|s| s.window == kind) {
                continue;
            }
            let f = match kind {
                WindowKind::Rcos => frame,
                WindowKind::Rect => frame.with_roll_off(0)?,
            };
            let d = WindowedDictionary::build_with(&pilot.x, &f, &grid, &build_window(&f), opts)?;
            dictionaries.push((kind, f, d));
        }
        Ok(Self {
            noise: NoiseConfig::from_snr_db(config.snr_db),
            config,
            frame,
            grid,
            channel,
            pilot,
            dictionaries,
        })
    }

    pub fn dictionary(&self, kind: WindowKind) -> Option<(&FrameSpec, &WindowedDictionary)> {
        self.dictionaries
            .iter()
            .find(|(k, _, _)| *k == kind)
            .map(|(_, f, d)| (f, d))
    }

    pub fn draw(&self, trial: usize) -> Result<(u64, PathSet)> {
        let seed = sub_seed(self.config.seed, &[STREAM_CHANNEL, trial as u64]);
        Ok((seed, draw_channel(&self.channel, &self.grid, &mut rng(seed))?))
    }

    pub fn rule_for(&self, solver: SolverId, paths: &PathSet) -> StoppingRule {
        match (solver.algorithm, self.config.baseline) {
            (Algorithm::DaOmp, _) => StoppingRule::InterferenceAdaptive,
            (Algorithm::Omp, BaselineRule::FixedPaths) => StoppingRule::FixedIterations(paths.len()),
            (Algorithm::Omp, BaselineRule::Threshold) => StoppingRule::ResidualThreshold {
                sigma2: self.noise.sigma2().max(f64::MIN_POSITIVE),
            },
        }
    }

    /// Runs one solver on one trial and returns its estimate and NMSE.
    pub fn solve(
        &self,
        solver: SolverId,
        trial: usize,
        paths: &PathSet,
        opts: SolveOptions,
    ) -> Result<(SparseEstimate, f64)> {
        let (frame, dict) = self
            .dictionary(solver.window)
            .ok_or_else(|| Error::Config(format!("no dictionary for {solver}")))?;
        let noise_seed = sub_seed(self.config.seed, &[STREAM_NOISE, trial as u64]);
        let y = observe(&self.pilot, frame, paths, &self.noise, &mut rng(noise_seed))?;
        let opts = SolveOptions { cap: opts.cap.or(self.config.cap), ..opts };
        let est = pursue(dict, &y, self.rule_for(solver, paths), opts)?;
        let l = frame.pilot_len();
        let h_true = channel_matrix(paths, l, l, 0)?;
        let h_est = reconstruct_channel(&est, &self.grid, l)?;
        // a path-free channel has no defined NMSE
        let e = match nmse(&h_est, &h_true) {
            Err(Error::ZeroChannel) => f64::NAN,
            other => other?,
        };
        Ok((est, e))
    }

    pub fn run_trial(&self, point: usize, value: f64, trial: usize) -> Vec<TrialResult> {
        let drawn = self.draw(trial);
        self.config
            .solvers
            .iter()
            .map(|&solver| {
                let mut r = TrialResult {
                    point,
                    value,
                    trial,
                    solver,
                    nmse: None,
                    q: 0,
                    stop: None,
                    channel_seed: 0,
                    paths: 0,
                };
                if let Ok((seed, paths)) = &drawn {
                    r.channel_seed = *seed;
                    r.paths = paths.len();
                    if let Ok((est, e)) = self.solve(solver, trial, paths, SolveOptions::default()) {
                        r.nmse = Some(e).filter(|v| !v.is_nan());
                        r.q = est.q();
                        r.stop = Some(est.stop);
                    }
                }
                r
            })
            .collect()
    }
}

fn summarize(var: SweepVar, value: f64, solver: SolverId, rows: &[&TrialResult]) -> PointSummary {
    let mut vals: Vec<f64> = rows.iter().filter_map(|r| r.nmse).collect();
    let n = vals.len();
    let mean = if n > 0 { vals.iter().sum::<f64>() / n as f64 } else { f64::NAN };
    let stderr = if n > 1 {
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        f64::NAN
    };
    vals.sort_by(f64::total_cmp);
    let median = match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => vals[n / 2],
        _ => 0.5 * (vals[n / 2 - 1] + vals[n / 2]),
    };
    let completed: Vec<_> = rows.iter().filter(|r| r.nmse.is_some()).collect();
    let mean_q = if n > 0 {
        completed.iter().map(|r| r.q as f64).sum::<f64>() / n as f64
    } else {
        f64::NAN
    };
    PointSummary {
        var,
        value,
        solver,
        nmse_mean: mean,
        nmse_median: median,
        nmse_stderr: stderr,
        trials: n,
        mean_q,
    }
}

#[cfg(feature = "parallel")]
fn map_trials<F>(workers: usize, n: usize, f: F) -> Result<Vec<Vec<TrialResult>>>
where
    F: Fn(usize) -> Vec<TrialResult> + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 1 {
        return Ok((0..n).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_trials<F>(_workers: usize, n: usize, f: F) -> Result<Vec<Vec<TrialResult>>>
where
    F: Fn(usize) -> Vec<TrialResult>,
{
    Ok((0..n).map(f).collect())
}

/// Runs every sweep point and aggregates per `(point, solver)`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut summaries = Vec::new();
    let mut trials = Vec::new();
    for (point, &value) in cfg.sweep_values.iter().enumerate() {
        let ctx = PointContext::new(cfg.at_point(value)?)?;
        let rows: Vec<TrialResult> = map_trials(cfg.workers, cfg.trials, |t| ctx.run_trial(point, value, t))?
            .into_iter()
            .flatten()
            .collect();
        for &solver in &cfg.solvers {
            let mine: Vec<&TrialResult> = rows.iter().filter(|r| r.solver == solver).collect();
            summaries.push(summarize(cfg.sweep_var, value, solver, &mine));
        }
        trials.extend(rows);
    }
    Ok(SweepResult {
        config: cfg.clone(),
        fingerprint: cfg.fingerprint(),
        summaries,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn nmse_examples() {
        let h = CMatrix::from_columns(&[
            vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.5, 0.0), C64::new(3.0, 1.0)],
        ]);
        assert_eq!(nmse(&h, &h).unwrap(), 0.0);
        assert_eq!(nmse(&CMatrix::zeros(2, 2), &h).unwrap(), 1.0);
        let mut h2 = CMatrix::zeros(2, 2);
        h2.add_scaled(C64::new(2.0, 0.0), &h);
        assert!((nmse(&h2, &h).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(nmse(&h, &CMatrix::zeros(2, 2)), Err(Error::ZeroChannel)));
        assert!(nmse(&CMatrix::zeros(3, 3), &h).is_err());
    }

    #[test]
    fn summary_statistics() {
        let mk = |nmse| TrialResult {
            point: 0,
            value: 0.0,
            trial: 0,
            solver: SolverId::DA_OMP_RCOS,
            nmse,
            q: 2,
            stop: None,
            channel_seed: 0,
            paths: 5,
        };
        let rows = [mk(Some(1.0)), mk(Some(3.0)), mk(None), mk(Some(2.0)), mk(Some(10.0))];
        let refs: Vec<_> = rows.iter().collect();
        let s = summarize(SweepVar::SnrDb, 0.0, SolverId::DA_OMP_RCOS, &refs);
        assert_eq!(s.trials, 4);
        assert_eq!(s.nmse_mean, 4.0);
        assert_eq!(s.nmse_median, 2.5);
        assert_eq!(s.mean_q, 2.0);
        // sample sd of [1,3,2,10] is sqrt(50/3)
        assert!((s.nmse_stderr - (50.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_sweep_is_deterministic_and_worker_independent() {
        let cfg = ExperimentConfig {
            trials: 6,
            sweep_values: vec![10.0, 30.0],
            workers: 1,
            ..Default::default()
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&ExperimentConfig { workers: 3, ..cfg.clone() }).unwrap();
        assert_eq!(a.summaries, b.summaries);
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.summaries.len(), 2 * 4);
        for s in &a.summaries {
            assert_eq!(s.trials, 6);
            assert!(s.nmse_mean >= 0.0);
        }
    }
}
