//! Browser bindings: the receiver window, a single-realization correlation
//! trace, and a small NMSE comparison of the four estimators.

use ddce::harness::trace::{interference_demo_config, trace_experiment};
use ddce::harness::{run_sweep, BaselineRule, ExperimentConfig, RollOff, SolverId, WindowKind};
use ddce::model::{build_window, FrameSpec};
use wasm_bindgen::prelude::*;

/// Window weights over the `L + L_w` receive samples.
pub fn window_weights(pilot_len: usize, roll_off: usize) -> Result<Vec<f64>, String> {
    let frame = FrameSpec::new(pilot_len, roll_off, 0).map_err(|e| e.to_string())?;
    Ok(build_window(&frame).w)
}

/// Correlation magnitudes of one window setting at the first and the exit
/// iteration.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct CorrelationTrace {
    first: Vec<f64>,
    last: Vec<f64>,
    stop_iteration: usize,
    signal_columns: usize,
    nmse: f64,
}

#[wasm_bindgen]
impl CorrelationTrace {
    pub fn first(&self) -> Vec<f64> {
        self.first.clone()
    }

    pub fn last(&self) -> Vec<f64> {
        self.last.clone()
    }

    #[wasm_bindgen(getter, js_name = stopIteration)]
    pub fn stop_iteration(&self) -> usize {
        self.stop_iteration
    }

    #[wasm_bindgen(getter, js_name = signalColumns)]
    pub fn signal_columns(&self) -> usize {
        self.signal_columns
    }

    #[wasm_bindgen(getter)]
    pub fn nmse(&self) -> f64 {
        self.nmse
    }
}

/// Two paths at delay 0 on a `G_ν = L` grid; `rcos` picks the windowed
/// dictionary, otherwise the rectangular one.
pub fn correlation_trace(
    roll_off_div: usize,
    snr_db: f64,
    seed: u64,
    rcos: bool,
) -> Result<CorrelationTrace, String> {
    let cfg = ExperimentConfig {
        roll_off: RollOff::Fraction(roll_off_div),
        snr_db,
        sweep_values: vec![snr_db],
        seed,
        ..interference_demo_config()
    };
    let dump = trace_experiment(&cfg, 0).map_err(|e| e.to_string())?;
    let kind = if rcos { WindowKind::Rcos } else { WindowKind::Rect };
    let w = dump
        .windows
        .iter()
        .find(|w| w.window == kind)
        .ok_or("missing window trace")?;
    let corr = &w.estimate.correlations;
    Ok(CorrelationTrace {
        first: corr.first().cloned().unwrap_or_default(),
        last: corr.last().cloned().unwrap_or_default(),
        stop_iteration: w.stop_iteration(),
        signal_columns: dump.signal_columns,
        nmse: w.nmse,
    })
}

/// Mean NMSE of `[DA-OMP rcos, DA-OMP rect, OMP rcos, OMP rect]` at one SNR
/// on the `L = 128`, `G_ν = 16`, `u_ν = 2` grid. The OMP baselines run the
/// true path count.
pub fn compare_estimators(
    snr_db: f64,
    roll_off_div: usize,
    delay_bins: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let order = [SolverId::DA_OMP_RCOS, SolverId::DA_OMP_RECT, SolverId::OMP_RCOS, SolverId::OMP_RECT];
    let cfg = ExperimentConfig {
        roll_off: RollOff::Fraction(roll_off_div),
        delay_bins,
        snr_db,
        sweep_values: vec![snr_db],
        solvers: order.to_vec(),
        baseline: BaselineRule::FixedPaths,
        trials,
        seed,
        workers: 1,
        ..Default::default()
    };
    cfg.validate().map_err(|e| e.to_string())?;
    let r = run_sweep(&cfg).map_err(|e| e.to_string())?;
    Ok(order
        .iter()
        .map(|&s| r.summary(s, snr_db).map_or(f64::NAN, |p| p.nmse_mean))
        .collect())
}

#[wasm_bindgen(js_name = windowWeights)]
pub fn window_weights_js(pilot_len: usize, roll_off: usize) -> Result<Vec<f64>, JsError> {
    window_weights(pilot_len, roll_off).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = correlationTrace)]
pub fn correlation_trace_js(
    roll_off_div: usize,
    snr_db: f64,
    seed: u32,
    rcos: bool,
) -> Result<CorrelationTrace, JsError> {
    correlation_trace(roll_off_div, snr_db, seed.into(), rcos).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = compareEstimators)]
pub fn compare_estimators_js(
    snr_db: f64,
    roll_off_div: usize,
    delay_bins: usize,
    trials: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    compare_estimators(snr_db, roll_off_div, delay_bins, trials, seed.into()).map_err(|e| JsError::new(&e))
}
