//! Windowed block dictionary `Ψ = [Φ_S Φ_I]`.
//!
//! Column `d = l·G_ν + k` is the windowed response of the pilot to a single
//! path at delay `l` and grid Doppler `k/u_ν`, observed over the receiver
//! window. The delay is applied linearly to the cyclically extended pilot,
//! which is what the channel does physically when the cyclic prefix covers it;
//! on rows `m >= l` this coincides with `W·Π^l·Δ̃^k·x̃`.
//!
//! The last `G_ν` columns (`I_I`) use a delay no physical path can have and
//! only ever pick up leakage. Their peak correlation is the interference
//! level that stops delay-aware OMP.

use crate::error::{Error, Result};
use crate::linalg::{dot_conj, norm, CMatrix, C64};
use crate::model::{doppler_phasor, DDGridSpec, FrameSpec, WindowVector};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::ops::Range;
use std::path::Path;

/// Build options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DictionaryOptions {
    /// Scale every column to unit norm (generic-OMP style). Off by default.
    pub normalize_columns: bool,
    /// Delay of the interference block; `None` means `G_τ`.
    pub interference_delay: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct WindowedDictionary {
    psi: CMatrix,
    grid: DDGridSpec,
    frame: FrameSpec,
    interference_delay: usize,
    normalized: bool,
    /// Norm each column was divided by (all ones when unnormalized).
    scales: Vec<f64>,
    pilot_id: String,
}

/// `d = l·G_ν + k`; `l = G_τ` addresses the interference block.
pub fn column_index(l: usize, k: usize, grid: &DDGridSpec) -> Result<usize> {
    if l > grid.delay_bins() || k >= grid.doppler_bins() {
        return Err(Error::OutOfRange(format!(
            "(l={l}, k={k}) outside delay 0..={} / Doppler 0..{}",
            grid.delay_bins(),
            grid.doppler_bins()
        )));
    }
    Ok(l * grid.doppler_bins() + k)
}

/// Inverse of [`column_index`].
pub fn column_cell(d: usize, grid: &DDGridSpec) -> (usize, usize) {
    (d / grid.doppler_bins(), d % grid.doppler_bins())
}

/// Short hex fingerprint of a pilot sequence.
pub fn pilot_fingerprint(pilot: &[C64]) -> String {
    let mut h = Sha256::new();
    for z in pilot {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// One dictionary atom: windowed pilot response to delay `delay` and
/// normalized Doppler `doppler`.
pub fn atom(
    pilot: &[C64],
    frame: &FrameSpec,
    window: &WindowVector,
    delay: usize,
    doppler: f64,
) -> Vec<C64> {
    let l = pilot.len();
    let t0 = frame.window_start();
    window
        .w
        .iter()
        .enumerate()
        .map(|(m, &wm)| {
            let t = m as i64 + t0 - delay as i64;
            let x = pilot[t.rem_euclid(l as i64) as usize];
            doppler_phasor(doppler, t, l) * x * wm
        })
        .collect()
}

impl WindowedDictionary {
    pub fn build(
        pilot: &[C64],
        frame: &FrameSpec,
        grid: &DDGridSpec,
        window: &WindowVector,
    ) -> Result<Self> {
        Self::build_with(pilot, frame, grid, window, DictionaryOptions::default())
    }

    pub fn build_with(
        pilot: &[C64],
        frame: &FrameSpec,
        grid: &DDGridSpec,
        window: &WindowVector,
        opts: DictionaryOptions,
    ) -> Result<Self> {
        if pilot.len() != frame.pilot_len() {
            return Err(Error::DimensionMismatch {
                expected: frame.pilot_len(),
                got: pilot.len(),
            });
        }
        if window.len() != frame.window_len() {
            return Err(Error::DimensionMismatch {
                expected: frame.window_len(),
                got: window.len(),
            });
        }
        if pilot.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::InvalidFrame("pilot is all zeros".into()));
        }
        let interference_delay = opts.interference_delay.unwrap_or(grid.delay_bins());
        if interference_delay < grid.delay_bins() {
            return Err(Error::InvalidGrid(format!(
                "interference delay {interference_delay} overlaps the signal delays 0..{}",
                grid.delay_bins()
            )));
        }

        let gn = grid.doppler_bins();
        let mut columns = Vec::with_capacity((grid.delay_bins() + 1) * gn);
        let mut scales = Vec::with_capacity(columns.capacity());
        for l in 0..=grid.delay_bins() {
            let delay = if l == grid.delay_bins() { interference_delay } else { l };
            for k in 0..gn {
                let mut col = atom(pilot, frame, window, delay, grid.doppler_of(k));
                let mut scale = 1.0;
                if opts.normalize_columns {
                    let n = norm(&col);
                    if n > 0.0 {
                        col.iter_mut().for_each(|z| *z /= n);
                        scale = n;
                    }
                }
                columns.push(col);
                scales.push(scale);
            }
        }
        Ok(Self {
            psi: CMatrix::from_columns(&columns),
            grid: *grid,
            frame: *frame,
            interference_delay,
            normalized: opts.normalize_columns,
            scales,
            pilot_id: pilot_fingerprint(pilot),
        })
    }

    pub fn psi(&self) -> &CMatrix {
        &self.psi
    }

    pub fn column(&self, d: usize) -> &[C64] {
        self.psi.column(d)
    }

    pub fn grid(&self) -> &DDGridSpec {
        &self.grid
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn pilot_id(&self) -> &str {
        &self.pilot_id
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Factor mapping a coefficient on column `d` back to a path gain.
    pub fn column_scale(&self, d: usize) -> f64 {
        self.scales[d]
    }

    pub fn interference_delay(&self) -> usize {
        self.interference_delay
    }

    /// Number of rows, L'.
    pub fn rows(&self) -> usize {
        self.psi.rows()
    }

    /// `I_S`
    pub fn signal_indices(&self) -> Range<usize> {
        0..self.grid.signal_columns()
    }

    /// `I_I`
    pub fn interference_indices(&self) -> Range<usize> {
        self.grid.signal_columns()..self.psi.cols()
    }

    /// `|Ψ^H r|`
    pub fn correlate(&self, residual: &[C64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.psi.cols()];
        self.correlate_into(residual, &mut out)?;
        Ok(out)
    }

    pub fn correlate_into(&self, residual: &[C64], out: &mut [f64]) -> Result<()> {
        if residual.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: residual.len(),
            });
        }
        for (j, o) in out.iter_mut().enumerate().take(self.psi.cols()) {
            *o = dot_conj(self.psi.column(j), residual).norm();
        }
        Ok(())
    }

    /// Writes Ψ as CSV: `#` header lines with the geometry, then one line per
    /// row holding `re,im` pairs for every column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "# rows={} G_tau={} G_nu={} u_nu={} L={} L_w={} interference_delay={} normalized={} pilot={}",
            self.rows(),
            self.grid.delay_bins(),
            self.grid.doppler_bins(),
            self.grid.oversampling(),
            self.frame.pilot_len(),
            self.frame.roll_off(),
            self.interference_delay,
            self.normalized,
            self.pilot_id
        )?;
        writeln!(f, "# layout=row-major, each entry re,im; columns d = l*G_nu + k")?;
        for i in 0..self.rows() {
            let mut line = String::new();
            for j in 0..self.psi.cols() {
                if j > 0 {
                    line.push(',');
                }
                let z = self.psi[(i, j)];
                line.push_str(&format!("{:e},{:e}", z.re, z.im));
            }
            writeln!(f, "{line}")?;
        }
        f.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cis_turns;
    use crate::model::{build_window, permutation_power, doppler_matrix, extend, Extension};

    fn pn(l: usize, seed: u64) -> Vec<C64> {
        let mut s = seed | 1;
        (0..l)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                C64::new(if s & 1 == 0 { 1.0 } else { -1.0 }, 0.0)
            })
            .collect()
    }

    fn setup(l: usize, lw: usize, gt: usize, gn: usize, u: usize) -> (Vec<C64>, FrameSpec, DDGridSpec, WindowVector) {
        let frame = FrameSpec::new(l, lw, gt).unwrap();
        let grid = DDGridSpec::new(gt, gn, u).unwrap();
        let window = build_window(&frame);
        (pn(l, 7), frame, grid, window)
    }

    #[test]
    fn column_index_examples() {
        let g = DDGridSpec::new(4, 16, 2).unwrap();
        assert_eq!(column_index(0, 0, &g).unwrap(), 0);
        assert_eq!(column_index(2, 3, &g).unwrap(), 35);
        assert_eq!(column_index(4, 0, &g).unwrap(), 64);
        assert!(column_index(5, 0, &g).is_err());
        assert!(column_index(0, 16, &g).is_err());
        assert_eq!(column_cell(35, &g), (2, 3));
    }

    #[test]
    fn layout_and_partition() {
        let (x, f, g, w) = setup(32, 8, 3, 5, 2);
        let d = WindowedDictionary::build(&x, &f, &g, &w).unwrap();
        assert_eq!(d.psi().cols(), 20);
        assert_eq!(d.rows(), 40);
        assert_eq!(d.signal_indices(), 0..15);
        assert_eq!(d.interference_indices(), 15..20);
        assert_eq!(d.interference_delay(), 3);
    }

    #[test]
    fn zero_delay_zero_doppler_is_windowed_pilot() {
        let (x, f, g, w) = setup(32, 8, 3, 5, 2);
        let d = WindowedDictionary::build(&x, &f, &g, &w).unwrap();
        let xt = extend(&f, Extension::WindowTrimmed, &x).unwrap();
        for (m, z) in d.column(0).iter().enumerate() {
            assert_eq!(*z, xt[m] * w.w[m]);
        }
    }

    #[test]
    fn rectangular_integer_grid_column() {
        let (x, f, g, w) = setup(16, 0, 1, 16, 1);
        let d = WindowedDictionary::build(&x, &f, &g, &w).unwrap();
        for k in 0..16 {
            let col = d.column(column_index(0, k, &g).unwrap());
            for n in 0..16 {
                let want = cis_turns((n * k) as f64 / 16.0) * x[n % 16];
                assert!((col[n] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn matches_paper_product_on_unwrapped_rows() {
        let (x, f, g, w) = setup(64, 16, 4, 8, 2);
        let d = WindowedDictionary::build(&x, &f, &g, &w).unwrap();
        let xt = extend(&f, Extension::WindowTrimmed, &x).unwrap();
        let lp = f.window_len();
        for l in 0..=4 {
            for k in 0..8 {
                let v = permutation_power(lp, l)
                    .unwrap()
                    .mul(&doppler_matrix(lp, g.doppler_of(k), 64, f.window_start()))
                    .mul_vec(&xt);
                let col = d.column(column_index(l, k, &g).unwrap());
                for m in l..lp {
                    assert!((col[m] - v[m] * w.w[m]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn correlate_examples() {
        let (x, f, g, w) = setup(32, 8, 2, 6, 2);
        let d = WindowedDictionary::build_with(
            &x,
            &f,
            &g,
            &w,
            DictionaryOptions { normalize_columns: true, interference_delay: None },
        )
        .unwrap();
        for j in 0..d.psi().cols() {
            let c = d.correlate(d.column(j)).unwrap();
            let best = c
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            assert_eq!(best.0, j);
        }
        let zero = vec![C64::new(0.0, 0.0); d.rows()];
        assert!(d.correlate(&zero).unwrap().iter().all(|&v| v == 0.0));
        assert!(d.correlate(&zero[1..]).is_err());
    }

    #[test]
    fn build_rejects_mismatch() {
        let (x, f, g, w) = setup(32, 8, 2, 6, 2);
        assert!(WindowedDictionary::build(&x[1..], &f, &g, &w).is_err());
        let f2 = FrameSpec::new(32, 4, 2).unwrap();
        assert!(WindowedDictionary::build(&x, &f2, &g, &w).is_err());
        let zeros = vec![C64::new(0.0, 0.0); 32];
        assert!(WindowedDictionary::build(&zeros, &f, &g, &w).is_err());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let (x, f, g, w) = setup(8, 2, 1, 2, 1);
        let d = WindowedDictionary::build(&x, &f, &g, &w).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("psi.csv");
        d.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# rows=10 G_tau=1 G_nu=2 u_nu=1"));
        assert_eq!(lines.len(), 2 + 10);
        assert_eq!(lines[2].split(',').count(), 2 * 4);
    }
}
