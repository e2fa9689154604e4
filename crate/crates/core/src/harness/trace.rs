//! Single-realization correlation dumps: `|Ψ^H r_i|` at every delay-aware
//! OMP iteration, for the raised-cosine and the rectangular dictionary.

use super::config::{ExperimentConfig, RollOff, SolverId, SweepVar, WindowKind};
use super::output::LinePlot;
use super::PointContext;
use crate::error::Result;
use crate::model::PathSet;
use crate::solver::{SolveOptions, SparseEstimate};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Two paths at delay 0, `G_τ = 1`, `G_ν = 128`, `u_ν = 1`, `L_w = L/2`,
/// SNR 20 dB.
pub fn interference_demo_config() -> ExperimentConfig {
    ExperimentConfig {
        pilot_len: 128,
        roll_off: RollOff::Fraction(2),
        delay_bins: 1,
        doppler_bins: 128,
        oversampling: 1,
        paths_min: 2,
        paths_max: 2,
        snr_db: 20.0,
        sweep_var: SweepVar::SnrDb,
        sweep_values: vec![20.0],
        solvers: vec![SolverId::DA_OMP_RCOS, SolverId::DA_OMP_RECT],
        trials: 1,
        name: "trace".into(),
        ..Default::default()
    }
}

#[derive(Clone, Debug)]
pub struct WindowTrace {
    pub window: WindowKind,
    pub estimate: SparseEstimate,
    pub nmse: f64,
}

impl WindowTrace {
    /// Iteration index at which the loop exited.
    pub fn stop_iteration(&self) -> usize {
        self.estimate.q()
    }
}

#[derive(Clone, Debug)]
pub struct TraceDump {
    pub config: ExperimentConfig,
    pub trial: usize,
    pub paths: PathSet,
    /// Size of `I_S`; columns from here on are the interference block.
    pub signal_columns: usize,
    pub windows: Vec<WindowTrace>,
}

/// Runs delay-aware OMP on trial `trial` of `cfg` (its first sweep point)
/// with both window settings, keeping every correlation vector.
pub fn trace_experiment(cfg: &ExperimentConfig, trial: usize) -> Result<TraceDump> {
    let point = cfg.at_point(cfg.sweep_values.first().copied().unwrap_or(cfg.snr_db))?;
    let point = ExperimentConfig {
        solvers: vec![SolverId::DA_OMP_RCOS, SolverId::DA_OMP_RECT],
        ..point
    };
    let ctx = PointContext::new(point)?;
    let (_, paths) = ctx.draw(trial)?;
    let mut windows = Vec::new();
    for solver in [SolverId::DA_OMP_RCOS, SolverId::DA_OMP_RECT] {
        let (estimate, nmse) = ctx.solve(
            solver,
            trial,
            &paths,
            SolveOptions { record_correlations: true, ..Default::default() },
        )?;
        windows.push(WindowTrace { window: solver.window, estimate, nmse });
    }
    Ok(TraceDump {
        config: ctx.config.clone(),
        trial,
        paths,
        signal_columns: ctx.grid.signal_columns(),
        windows,
    })
}

fn window_name(w: WindowKind) -> &'static str {
    match w {
        WindowKind::Rcos => "rcos",
        WindowKind::Rect => "rect",
    }
}

impl TraceDump {
    /// Long-format CSV `window,iteration,d,correlation`.
    pub fn correlations_csv(&self) -> String {
        let mut s = String::from("window,iteration,d,correlation\n");
        for w in &self.windows {
            for (i, c) in w.estimate.correlations.iter().enumerate() {
                for (d, v) in c.iter().enumerate() {
                    let _ = writeln!(s, "{},{i},{d},{v}", window_name(w.window));
                }
            }
        }
        s
    }

    /// `window,stop_iteration,Q,stop_reason,exit_beta,exit_gamma,nmse,signal_columns`
    pub fn summary_csv(&self) -> String {
        let mut s = String::from(
            "window,stop_iteration,Q,stop_reason,exit_beta,exit_gamma,nmse,signal_columns\n",
        );
        for w in &self.windows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                window_name(w.window),
                w.stop_iteration(),
                w.estimate.q(),
                w.estimate.stop,
                w.estimate.exit_beta,
                w.estimate.exit_gamma,
                w.nmse,
                self.signal_columns
            );
        }
        s
    }

    /// Correlation at the first and at the exit iteration for one window.
    pub fn plot(&self, window: WindowKind) -> Option<LinePlot> {
        let w = self.windows.iter().find(|w| w.window == window)?;
        let first = w.estimate.correlations.first()?;
        let last = w.estimate.correlations.last()?;
        let line = |c: &Vec<f64>| c.iter().enumerate().map(|(d, &v)| (d as f64, v)).collect();
        Some(LinePlot {
            title: format!(
                "|Psi^H r_i| ({}), stop at i = {}, I_I starts at d = {}",
                window_name(window),
                w.stop_iteration(),
                self.signal_columns
            ),
            x_label: "dictionary column d".into(),
            y_label: "correlation".into(),
            log_y: false,
            markers: false,
            series: vec![
                ("i = 0".into(), line(first)),
                (format!("i = {}", w.stop_iteration()), line(last)),
            ],
            description: self.config.to_text(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let name = &self.config.name;
        let mut out = Vec::new();
        let p = dir.join(format!("{name}_correlations.csv"));
        std::fs::write(&p, self.correlations_csv())?;
        out.push(p);
        let p = dir.join(format!("{name}_summary.csv"));
        std::fs::write(&p, self.summary_csv())?;
        out.push(p);
        for w in [WindowKind::Rcos, WindowKind::Rect] {
            if let Some(plot) = self.plot(w) {
                let p = dir.join(format!("{name}_{}.svg", window_name(w)));
                std::fs::write(&p, plot.to_svg())?;
                out.push(p);
            }
        }
        for w in &self.windows {
            let p = dir.join(format!("{name}_{}_trace.csv", window_name(w.window)));
            w.estimate.write_trace_csv(&p)?;
            out.push(p);
        }
        Ok(out)
    }
}
