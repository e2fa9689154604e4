//! Dense-algebra oracles shared by the integration tests and the
//! acceptance runner. Each returns the worst deviation it observed.

#![allow(dead_code)]

use ddce::dictionary::WindowedDictionary;
use ddce::linalg::{C64, CMatrix};
use ddce::model::{build_window, channel_matrix, DDGridSpec, FrameSpec, Path, PathSet};
use ddce::sim::{gen_pilot, propagate, rng, NoiseConfig};
use ddce::solver::{least_squares, IncrementalLeastSquares};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

type Dense = DMatrix<Complex<f64>>;

fn unit(on: bool) -> Complex<f64> {
    Complex::new(if on { 1.0 } else { 0.0 }, 0.0)
}

/// `W · S · Z_ℓ · D_κ · C · x` built as explicit dense matrices:
/// `C` prepends `L_cp` and appends `L_cs` periodic samples, `D_κ` is the
/// Doppler diagonal at the transmit time, `Z_ℓ` a linear (zero-filling)
/// delay, `S` keeps the window span after the first `ℓ_max` samples and
/// `W` is the window diagonal.
pub fn dense_column(x: &[C64], frame: &FrameSpec, delay: usize, doppler: f64) -> DVector<Complex<f64>> {
    let l = frame.pilot_len();
    let cp = frame.cp_len();
    let tot = frame.total_len();
    let rows = frame.window_len();
    let c = Dense::from_fn(tot, l, |i, j| unit((i as i64 - cp as i64).rem_euclid(l as i64) as usize == j));
    let d = Dense::from_fn(tot, tot, |i, j| {
        if i == j {
            Complex::from_polar(1.0, 2.0 * PI * doppler * (i as f64 - cp as f64) / l as f64)
        } else {
            unit(false)
        }
    });
    let z = Dense::from_fn(tot, tot, |i, j| unit(i == j + delay));
    let s = Dense::from_fn(rows, tot, |i, j| unit(j == i + frame.max_delay()));
    let w = build_window(frame);
    let wd = Dense::from_fn(rows, rows, |i, j| if i == j { Complex::new(w.w[i], 0.0) } else { unit(false) });
    wd * s * z * d * c * DVector::from_iterator(l, x.iter().copied())
}

/// Worst entry-wise gap between dictionary columns and [`dense_column`]
/// over several frame/grid shapes, every column including the
/// interference block.
pub fn dictionary_oracle_error() -> f64 {
    let mut worst: f64 = 0.0;
    for (l, lw, gt, gn, u) in [(32, 16, 3, 8, 2), (64, 16, 4, 10, 3), (48, 0, 2, 6, 1), (128, 64, 4, 16, 2)] {
        let frame = FrameSpec::new(l, lw, gt).unwrap();
        let grid = DDGridSpec::new(gt, gn, u).unwrap();
        let pilot = gen_pilot(l, 5 + l as u64);
        let dict = WindowedDictionary::build(&pilot.x, &frame, &grid, &build_window(&frame)).unwrap();
        for ell in 0..=gt {
            for k in 0..gn {
                let oracle = dense_column(&pilot.x, &frame, ell, grid.doppler_of(k));
                let col = dict.column(ell * gn + k);
                for (a, b) in col.iter().zip(oracle.iter()) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    worst
}

fn random_c64(r: &mut impl Rng) -> C64 {
    C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)
}

/// Worst relative gap, over random tall systems, between the batch and
/// incremental least-squares solvers and an SVD pseudo-inverse.
pub fn least_squares_oracle_error(trials: usize) -> f64 {
    let mut r = rng(77);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let rows = 8 + trial % 57;
        let cols = 1 + trial % rows.min(12);
        let columns: Vec<Vec<C64>> = (0..cols).map(|_| (0..rows).map(|_| random_c64(&mut r)).collect()).collect();
        let a = CMatrix::from_columns(&columns);
        let y: Vec<C64> = (0..rows).map(|_| random_c64(&mut r)).collect();
        let dense = Dense::from_fn(rows, cols, |i, j| a[(i, j)]);
        let oracle = dense.pseudo_inverse(1e-14).unwrap() * DVector::from_iterator(rows, y.iter().copied());
        let scale = oracle.norm();
        let rel = |v: &[C64]| {
            v.iter().zip(oracle.iter()).map(|(g, o)| (g - o).norm_sqr()).sum::<f64>().sqrt() / scale
        };
        worst = worst.max(rel(&least_squares(&a, &y).unwrap()));
        let mut inc = IncrementalLeastSquares::new(&y);
        for col in &columns {
            inc.push_column(col).unwrap();
        }
        worst = worst.max(rel(&inc.coefficients()));
    }
    worst
}

pub fn random_paths(grid: &DDGridSpec, count: usize, r: &mut impl Rng) -> PathSet {
    PathSet::new(
        (0..count)
            .map(|_| Path {
                gain: C64::from_polar(r.random::<f64>(), 2.0 * PI * r.random::<f64>()),
                delay: r.random_range(0..grid.delay_bins()),
                doppler: r.random::<f64>() * grid.max_doppler(),
            })
            .collect(),
    )
}

/// Worst gap between the simulator's CP-stripped core block and the
/// circular channel matrix applied to the pilot.
pub fn propagation_oracle_error() -> f64 {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for (l, lw, gt) in [(64, 32, 4), (128, 64, 8), (50, 10, 1)] {
        let frame = FrameSpec::new(l, lw, gt).unwrap();
        let grid = DDGridSpec::new(gt, 8, 2).unwrap();
        let pilot = gen_pilot(l, 11);
        for _ in 0..20 {
            let paths = random_paths(&grid, 6, &mut r);
            let rx = propagate(&pilot, &frame, &paths, &NoiseConfig::noiseless(), &mut r).unwrap();
            let core = &rx[frame.cp_len()..frame.cp_len() + l];
            let circ = channel_matrix(&paths, l, l, 0).unwrap().mul_vec(&pilot.x);
            for (a, b) in core.iter().zip(&circ) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    worst
}
