//! Greedy sparse recovery over a [`WindowedDictionary`].
//!
//! [`da_omp`] stops by itself: each iteration measures the leakage level as
//! the peak correlation of the residual with the interference block, and the
//! loop ends once the best signal-block correlation no longer exceeds it.
//! [`omp_baseline`] is plain OMP over the signal block with either a fixed
//! atom count or a noise-variance residual threshold.

mod lsq;

pub use lsq::{least_squares, IncrementalLeastSquares, RANK_TOL};

use crate::dictionary::{column_cell, WindowedDictionary};
use crate::error::{Error, Result};
use crate::linalg::{norm, CMatrix, C64};
use crate::model::{accumulate_component, DDGridSpec};
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Residual norm, relative to `‖y‖`, treated as an exact fit.
pub const NUMERICAL_ZERO: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StoppingRule {
    /// Stop once `β_i <= γ_i` (delay-aware OMP).
    InterferenceAdaptive,
    /// Select exactly `K` atoms.
    FixedIterations(usize),
    /// Stop once `‖r_i‖² <= L'·σ²`.
    ResidualThreshold { sigma2: f64 },
}

impl StoppingRule {
    // `!(x > y)` is deliberate: NaN must land on the rejecting side.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        match *self {
            StoppingRule::ResidualThreshold { sigma2 } if !(sigma2 > 0.0) => Err(
                Error::Config(format!("residual threshold needs sigma2 > 0, got {sigma2}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Hard iteration cap; `None` means `min(L', G_τ·G_ν)`.
    pub cap: Option<usize>,
    /// Keep `|Ψ^H r_i|` for every visited residual.
    pub record_correlations: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `β_i <= γ_i`
    InterferenceDominates,
    FixedIterations,
    ResidualThreshold,
    /// Residual reached round-off level (exact fit).
    NumericalZero,
    Cap,
    /// The next atom was linearly dependent on the selected ones; the
    /// previous iterate is returned.
    RankDeficient,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::InterferenceDominates => "interference",
            StopReason::FixedIterations => "fixed",
            StopReason::ResidualThreshold => "threshold",
            StopReason::NumericalZero => "zero_residual",
            StopReason::Cap => "cap",
            StopReason::RankDeficient => "rank_deficient",
        };
        f.write_str(s)
    }
}

/// One completed iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Selected column `d_i`.
    pub selected: usize,
    /// `β_i`: best signal-block correlation of `r_i`.
    pub beta: f64,
    /// `γ_i`: best interference-block correlation of `r_i` (0 at `i = 0`).
    pub gamma: f64,
    /// `‖r_{i+1}‖` after the least-squares update.
    pub residual_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseEstimate {
    /// Selected column indices in selection order.
    pub support: Vec<usize>,
    /// Least-squares coefficients on `support`, in dictionary units.
    pub coefficients: Vec<C64>,
    /// Coefficients rescaled to unit-gain atoms (equal to `coefficients`
    /// for an unnormalized dictionary).
    pub gains: Vec<C64>,
    pub trace: Vec<TraceRow>,
    /// `β` and `γ` of the residual the loop stopped on.
    pub exit_beta: f64,
    pub exit_gamma: f64,
    pub stop: StopReason,
    /// `|Ψ^H r_i|` for `i = 0..=Q` when recorded.
    pub correlations: Vec<Vec<f64>>,
}

impl SparseEstimate {
    /// Number of atoms in the returned solution.
    pub fn q(&self) -> usize {
        self.support.len()
    }

    pub fn hit_cap(&self) -> bool {
        self.stop == StopReason::Cap
    }

    /// Writes the trace as CSV with header `i,d,beta,gamma,residual_norm`.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "i,d,beta,gamma,residual_norm")?;
        for t in &self.trace {
            writeln!(
                f,
                "{},{},{:e},{:e},{:e}",
                t.iteration, t.selected, t.beta, t.gamma, t.residual_norm
            )?;
        }
        f.flush()?;
        Ok(())
    }
}

fn argmax(values: &[f64]) -> (usize, f64) {
    // strict `>` keeps the smallest index on ties
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().cloned().fold(0.0, f64::max)
}

/// Delay-aware OMP.
pub fn da_omp(dict: &WindowedDictionary, y: &[C64], opts: SolveOptions) -> Result<SparseEstimate> {
    pursue(dict, y, StoppingRule::InterferenceAdaptive, opts)
}

/// Standard OMP restricted to the signal block.
pub fn omp_baseline(
    dict: &WindowedDictionary,
    y: &[C64],
    rule: StoppingRule,
    opts: SolveOptions,
) -> Result<SparseEstimate> {
    pursue(dict, y, rule, opts)
}

/// Shared greedy loop; the rule decides when to stop.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN correlation stops the loop
pub fn pursue(
    dict: &WindowedDictionary,
    y: &[C64],
    rule: StoppingRule,
    opts: SolveOptions,
) -> Result<SparseEstimate> {
    rule.validate()?;
    if y.len() != dict.rows() {
        return Err(Error::DimensionMismatch {
            expected: dict.rows(),
            got: y.len(),
        });
    }
    let signal = dict.signal_indices();
    let interference = dict.interference_indices();
    let cap = opts
        .cap
        .unwrap_or_else(|| dict.rows().min(signal.len()))
        .min(signal.len());
    if cap == 0 {
        return Err(Error::Config("iteration cap must be >= 1".into()));
    }
    let y_norm = norm(y);
    let threshold = match rule {
        StoppingRule::ResidualThreshold { sigma2 } => dict.rows() as f64 * sigma2,
        _ => f64::INFINITY,
    };

    let mut ls = IncrementalLeastSquares::new(y);
    let mut support: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let mut correlations = Vec::new();
    let mut corr = vec![0.0; dict.psi().cols()];
    let mut residual_norm = y_norm;

    dict.correlate_into(y, &mut corr)?;
    let (mut best, mut beta) = argmax(&corr[signal.clone()]);
    let mut gamma = 0.0;

    let stop = loop {
        if opts.record_correlations {
            correlations.push(corr.clone());
        }
        match rule {
            StoppingRule::InterferenceAdaptive if !(beta > gamma) => {
                break StopReason::InterferenceDominates
            }
            StoppingRule::FixedIterations(k) if support.len() >= k => {
                break StopReason::FixedIterations
            }
            StoppingRule::ResidualThreshold { .. } if residual_norm * residual_norm <= threshold => {
                break StopReason::ResidualThreshold
            }
            _ => {}
        }
        if support.len() >= cap {
            break StopReason::Cap;
        }
        if residual_norm <= NUMERICAL_ZERO * y_norm || support.contains(&best) {
            break StopReason::NumericalZero;
        }
        if ls.push_column(dict.column(best)).is_err() {
            break StopReason::RankDeficient;
        }
        support.push(best);
        let r = ls.residual();
        residual_norm = norm(&r);
        trace.push(TraceRow {
            iteration: trace.len(),
            selected: best,
            beta,
            gamma,
            residual_norm,
        });
        dict.correlate_into(&r, &mut corr)?;
        (best, beta) = argmax(&corr[signal.clone()]);
        gamma = max_of(&corr[interference.clone()]);
    };

    let coefficients = ls.coefficients();
    let gains = support
        .iter()
        .zip(&coefficients)
        .map(|(&d, &c)| c / dict.column_scale(d))
        .collect();
    Ok(SparseEstimate {
        support,
        coefficients,
        gains,
        trace,
        exit_beta: beta,
        exit_gamma: gamma,
        stop,
        correlations,
    })
}

/// `H̃ = Σ_q ĥ_q Γ(l_q, k_q/u_ν)` at size L with time origin at the first
/// core-block sample.
pub fn reconstruct_channel(est: &SparseEstimate, grid: &DDGridSpec, pilot_len: usize) -> Result<CMatrix> {
    let mut h = CMatrix::zeros(pilot_len, pilot_len);
    for (&d, &g) in est.support.iter().zip(&est.gains) {
        if d >= grid.signal_columns() {
            return Err(Error::OutOfRange(format!(
                "support index {d} is outside the signal block"
            )));
        }
        let (l, k) = column_cell(d, grid);
        if l >= pilot_len {
            return Err(Error::OutOfRange(format!("delay {l} exceeds pilot length")));
        }
        accumulate_component(&mut h, g, l, grid.doppler_of(k), pilot_len, 0);
    }
    Ok(h)
}
