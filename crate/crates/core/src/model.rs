//! Frame and grid geometry, the multipath description, the receiver window,
//! and the dense builders for shift, Doppler and channel matrices.
//!
//! Time origin: sample index `n = 0` is the first sample of the core pilot
//! block (after the cyclic prefix). The receiver window covers
//! `n ∈ [-L_w/2, L + L_w/2 - 1]`, which is what the `start_offset` argument of
//! [`doppler_matrix`] and [`component_matrix`] expresses.

use crate::error::{Error, Result};
use crate::linalg::{cis_turns, CMatrix, C64};
use std::f64::consts::PI;

/// Pilot frame layout: `[CP | pilot | CS]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrameSpec {
    pilot_len: usize,
    roll_off: usize,
    max_delay: usize,
}

impl FrameSpec {
    /// `pilot_len` = L, `roll_off` = L_w (even, at most L), `max_delay` = ℓ_max.
    pub fn new(pilot_len: usize, roll_off: usize, max_delay: usize) -> Result<Self> {
        if pilot_len == 0 {
            return Err(Error::InvalidFrame("pilot length must be positive".into()));
        }
        if !roll_off.is_multiple_of(2) {
            return Err(Error::InvalidFrame(format!(
                "roll-off length {roll_off} must be even"
            )));
        }
        if roll_off > pilot_len {
            return Err(Error::InvalidFrame(format!(
                "roll-off length {roll_off} exceeds pilot length {pilot_len}"
            )));
        }
        Ok(Self {
            pilot_len,
            roll_off,
            max_delay,
        })
    }

    /// L
    pub fn pilot_len(&self) -> usize {
        self.pilot_len
    }

    /// L_w
    pub fn roll_off(&self) -> usize {
        self.roll_off
    }

    /// ℓ_max
    pub fn max_delay(&self) -> usize {
        self.max_delay
    }

    /// L_cp = ℓ_max + L_w/2
    pub fn cp_len(&self) -> usize {
        self.max_delay + self.roll_off / 2
    }

    /// L_cs = L_w/2
    pub fn cs_len(&self) -> usize {
        self.roll_off / 2
    }

    /// L_tot = L + L_cp + L_cs
    pub fn total_len(&self) -> usize {
        self.pilot_len + self.cp_len() + self.cs_len()
    }

    /// L' = L_tot - ℓ_max = L + L_w
    pub fn window_len(&self) -> usize {
        self.total_len() - self.max_delay
    }

    /// Time index of the first retained receiver sample, `-L_w/2`.
    pub fn window_start(&self) -> i64 {
        -((self.roll_off / 2) as i64)
    }

    /// Same frame with a different roll-off; used to pair `rcos` and `rect`.
    pub fn with_roll_off(&self, roll_off: usize) -> Result<Self> {
        Self::new(self.pilot_len, roll_off, self.max_delay)
    }
}

/// Delay-Doppler grid with Doppler oversampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DDGridSpec {
    delay_bins: usize,
    doppler_bins: usize,
    oversampling: usize,
}

impl DDGridSpec {
    pub fn new(delay_bins: usize, doppler_bins: usize, oversampling: usize) -> Result<Self> {
        if delay_bins == 0 || doppler_bins == 0 || oversampling == 0 {
            return Err(Error::InvalidGrid(format!(
                "G_tau={delay_bins}, G_nu={doppler_bins}, u_nu={oversampling} must all be >= 1"
            )));
        }
        Ok(Self {
            delay_bins,
            doppler_bins,
            oversampling,
        })
    }

    /// G_τ
    pub fn delay_bins(&self) -> usize {
        self.delay_bins
    }

    /// G_ν
    pub fn doppler_bins(&self) -> usize {
        self.doppler_bins
    }

    /// u_ν
    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    /// Normalized Doppler of grid index `k`.
    pub fn doppler_of(&self, k: usize) -> f64 {
        k as f64 / self.oversampling as f64
    }

    /// Largest normalized Doppler on the grid, `(G_ν - 1)/u_ν`.
    pub fn max_doppler(&self) -> f64 {
        self.doppler_of(self.doppler_bins - 1)
    }

    /// Number of on-grid (signal) columns, `G_τ·G_ν`.
    pub fn signal_columns(&self) -> usize {
        self.delay_bins * self.doppler_bins
    }
}

/// One propagation path in normalized units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Path {
    pub gain: C64,
    /// Integer delay in samples.
    pub delay: usize,
    /// Normalized Doppler (multiples of Δν), possibly fractional.
    pub doppler: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Self {
        Self { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn max_delay(&self) -> Option<usize> {
        self.paths.iter().map(|p| p.delay).max()
    }

    /// Checks the path set against the grid: delays and Dopplers within the
    /// grid span and no two paths in the same grid cell.
    pub fn validate(&self, grid: &DDGridSpec) -> Result<()> {
        let tol = 1e-12;
        let mut cells = Vec::with_capacity(self.paths.len());
        for (i, p) in self.paths.iter().enumerate() {
            if p.delay >= grid.delay_bins() {
                return Err(Error::InvalidPaths(format!(
                    "path {i}: delay {} outside [0, {}]",
                    p.delay,
                    grid.delay_bins() - 1
                )));
            }
            if !(p.doppler >= -tol && p.doppler <= grid.max_doppler() + tol) {
                return Err(Error::InvalidPaths(format!(
                    "path {i}: Doppler {} outside [0, {}]",
                    p.doppler,
                    grid.max_doppler()
                )));
            }
            let cell = (p.delay, grid_cell(p.doppler, grid));
            if cells.contains(&cell) {
                return Err(Error::InvalidPaths(format!(
                    "path {i} shares grid cell {cell:?} with an earlier path"
                )));
            }
            cells.push(cell);
        }
        Ok(())
    }
}

/// Nearest Doppler grid index, `round(u_ν·κ)`.
pub fn grid_cell(doppler: f64, grid: &DDGridSpec) -> i64 {
    (doppler * grid.oversampling() as f64).round() as i64
}

/// Raised-cosine receiver window of length L'.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowVector {
    pub w: Vec<f64>,
    pub roll_off: usize,
}

impl WindowVector {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn is_rectangular(&self) -> bool {
        self.roll_off == 0
    }
}

/// Half-sine pulse `c[n] = π/(2 L_w) sin(π n / L_w)` on `n = 0..=L_w`.
pub fn half_sine_pulse(roll_off: usize) -> Vec<f64> {
    if roll_off == 0 {
        return vec![1.0];
    }
    let lw = roll_off as f64;
    (0..=roll_off)
        .map(|n| PI / (2.0 * lw) * (PI * n as f64 / lw).sin())
        .collect()
}

/// Builds the length-L' window: rectangle of length L convolved with the
/// half-sine pulse, rescaled to a flat top of exactly one.
///
/// The rising ramp is the normalized running sum of the pulse; the falling
/// ramp is its mirror image, so the window is exactly symmetric.
pub fn build_window(frame: &FrameSpec) -> WindowVector {
    let lw = frame.roll_off();
    let len = frame.window_len();
    let mut w = vec![1.0; len];
    if lw > 0 {
        let pulse = half_sine_pulse(lw);
        let total: f64 = pulse.iter().sum();
        let mut acc = 0.0;
        for m in 0..lw {
            acc += pulse[m];
            let v = (acc / total).clamp(0.0, 1.0);
            w[m] = v;
            w[len - 1 - m] = v;
        }
    }
    WindowVector { w, roll_off: lw }
}

/// Which cyclic extension to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// `[G_cp; I_L; G_cs]`, L_tot × L: the transmitted frame.
    Full,
    /// `[G_w; I_L; G_cs]`, L' × L: what remains after dropping ℓ_max samples.
    WindowTrimmed,
}

impl Extension {
    fn prefix_len(self, frame: &FrameSpec) -> usize {
        match self {
            Extension::Full => frame.cp_len(),
            Extension::WindowTrimmed => frame.cp_len() - frame.max_delay(),
        }
    }
}

/// Row-selection map of a cyclic extension: output row `r` copies input
/// sample `map[r]`.
pub fn extension_rows(pilot_len: usize, prefix: usize, suffix: usize) -> Vec<usize> {
    let l = pilot_len as i64;
    (-(prefix as i64)..(l + suffix as i64))
        .map(|t| t.rem_euclid(l) as usize)
        .collect()
}

/// Dense cyclic-extension matrix.
pub fn cyclic_extension(frame: &FrameSpec, variant: Extension) -> CMatrix {
    let rows = extension_rows(frame.pilot_len(), variant.prefix_len(frame), frame.cs_len());
    let mut t = CMatrix::zeros(rows.len(), frame.pilot_len());
    for (r, &c) in rows.iter().enumerate() {
        t[(r, c)] = C64::new(1.0, 0.0);
    }
    t
}

/// Applies a cyclic extension by row selection.
pub fn extend(frame: &FrameSpec, variant: Extension, x: &[C64]) -> Result<Vec<C64>> {
    if x.len() != frame.pilot_len() {
        return Err(Error::DimensionMismatch {
            expected: frame.pilot_len(),
            got: x.len(),
        });
    }
    Ok(
        extension_rows(frame.pilot_len(), variant.prefix_len(frame), frame.cs_len())
            .into_iter()
            .map(|i| x[i])
            .collect(),
    )
}

/// `Π^ℓ`: `(Π^ℓ v)[n] = v[(n - ℓ) mod size]`.
pub fn permutation_power(size: usize, ell: usize) -> Result<CMatrix> {
    if ell >= size {
        return Err(Error::OutOfRange(format!(
            "shift {ell} must be below size {size}"
        )));
    }
    let mut p = CMatrix::zeros(size, size);
    for n in 0..size {
        p[(n, (n + size - ell) % size)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// Doppler phasor `e^{j2π κ t / L}` at signed time index `t`.
#[inline]
pub fn doppler_phasor(doppler: f64, t: i64, pilot_len: usize) -> C64 {
    cis_turns(doppler * t as f64 / pilot_len as f64)
}

/// `diag{ e^{j2π (n + start_offset) κ / L} }`, `n = 0..size`.
pub fn doppler_matrix(size: usize, doppler: f64, pilot_len: usize, start_offset: i64) -> CMatrix {
    let diag: Vec<C64> = (0..size as i64)
        .map(|n| doppler_phasor(doppler, n + start_offset, pilot_len))
        .collect();
    CMatrix::from_diagonal(&diag)
}

/// Delay-Doppler component `Γ(ℓ, κ)`: row `n` holds `e^{j2πκ(n-ℓ+off)/L}` at
/// column `(n - ℓ) mod size`.
///
/// On rows `n >= ℓ` this is exactly `Π^ℓ · Δ(κ)`. On the first ℓ rows the
/// phase keeps the unwrapped time index, so the size-L matrix reproduces the
/// received-signal model with the cyclic prefix covering the delay.
pub fn component_matrix(
    size: usize,
    ell: usize,
    doppler: f64,
    pilot_len: usize,
    start_offset: i64,
) -> Result<CMatrix> {
    if ell >= size {
        return Err(Error::OutOfRange(format!(
            "shift {ell} must be below size {size}"
        )));
    }
    if pilot_len == 0 {
        return Err(Error::InvalidFrame("pilot length must be positive".into()));
    }
    let mut g = CMatrix::zeros(size, size);
    accumulate_component(&mut g, C64::new(1.0, 0.0), ell, doppler, pilot_len, start_offset);
    Ok(g)
}

/// `out += gain · Γ(ℓ, κ)` without materializing Γ.
pub(crate) fn accumulate_component(
    out: &mut CMatrix,
    gain: C64,
    ell: usize,
    doppler: f64,
    pilot_len: usize,
    start_offset: i64,
) {
    let size = out.rows();
    for n in 0..size {
        let col = (n + size - ell % size) % size;
        let t = n as i64 - ell as i64 + start_offset;
        out[(n, col)] += gain * doppler_phasor(doppler, t, pilot_len);
    }
}

/// `H = Σ_p h_p Γ(ℓ_p, κ_p)`.
pub fn channel_matrix(
    paths: &PathSet,
    size: usize,
    pilot_len: usize,
    start_offset: i64,
) -> Result<CMatrix> {
    let mut h = CMatrix::zeros(size, size);
    for p in &paths.paths {
        if p.delay >= size {
            return Err(Error::OutOfRange(format!(
                "path delay {} must be below size {size}",
                p.delay
            )));
        }
        accumulate_component(&mut h, p.gain, p.delay, p.doppler, pilot_len, start_offset);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn symbols(n: usize) -> Vec<C64> {
        (0..n).map(|i| c(i as f64 + 1.0, -(i as f64) * 0.5)).collect()
    }

    #[test]
    fn frame_sizes() {
        let f = FrameSpec::new(128, 64, 4).unwrap();
        assert_eq!(f.cp_len(), 36);
        assert_eq!(f.cs_len(), 32);
        assert_eq!(f.total_len(), 128 + 4 + 64);
        assert_eq!(f.window_len(), 192);
        assert_eq!(f.window_start(), -32);
    }

    #[test]
    fn frame_rejects_bad_roll_off() {
        assert!(FrameSpec::new(8, 3, 0).is_err());
        assert!(FrameSpec::new(8, 10, 0).is_err());
        assert!(FrameSpec::new(0, 0, 0).is_err());
    }

    #[test]
    fn grid_rejects_zero() {
        assert!(DDGridSpec::new(0, 16, 2).is_err());
        assert!(DDGridSpec::new(4, 16, 0).is_err());
        let g = DDGridSpec::new(4, 16, 2).unwrap();
        assert_eq!(g.max_doppler(), 7.5);
    }

    #[test]
    fn rectangular_window() {
        let w = build_window(&FrameSpec::new(8, 0, 0).unwrap());
        assert_eq!(w.w, vec![1.0; 8]);
    }

    /// Direct discrete convolution of a length-L rectangle with the
    /// half-sine pulse, peak-normalized.
    fn convolution_oracle(l: usize, lw: usize) -> Vec<f64> {
        let pulse: Vec<f64> = (0..=lw)
            .map(|n| PI / (2.0 * lw as f64) * (PI * n as f64 / lw as f64).sin())
            .collect();
        let out_len = l + lw;
        let mut out = vec![0.0; out_len];
        for (m, o) in out.iter_mut().enumerate() {
            for (j, &cj) in pulse.iter().enumerate() {
                if m >= j && m - j < l {
                    *o += cj;
                }
            }
        }
        let peak = out.iter().cloned().fold(0.0, f64::max);
        out.iter().map(|v| v / peak).collect()
    }

    #[test]
    fn raised_cosine_matches_convolution() {
        let w = build_window(&FrameSpec::new(8, 4, 0).unwrap());
        let oracle = convolution_oracle(8, 4);
        assert_eq!(w.len(), 12);
        for (a, b) in w.w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
        // Pulse is π/8·[0, √2/2, 1, √2/2, 0]; the ramp is its normalized running sum.
        let expect = [0.0, 1.0 - 0.5f64.sqrt(), 0.5f64.sqrt(), 1.0];
        for (m, e) in expect.iter().enumerate() {
            assert!((w.w[m] - e).abs() < 1e-14);
            assert!((w.w[11 - m] - e).abs() < 1e-14);
        }
    }

    #[test]
    fn extension_examples() {
        let x = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        // L=4, L_cp=2, L_cs=1: ℓ_max=1, L_w=2.
        let f = FrameSpec::new(4, 2, 1).unwrap();
        let full = extend(&f, Extension::Full, &x).unwrap();
        let expect: Vec<C64> = [3.0, 4.0, 1.0, 2.0, 3.0, 4.0, 1.0]
            .iter()
            .map(|&v| c(v, 0.0))
            .collect();
        assert_eq!(full, expect);
        assert_eq!(cyclic_extension(&f, Extension::Full).mul_vec(&x), expect);

        let trimmed = extend(&f, Extension::WindowTrimmed, &x).unwrap();
        let expect: Vec<C64> = [4.0, 1.0, 2.0, 3.0, 4.0, 1.0]
            .iter()
            .map(|&v| c(v, 0.0))
            .collect();
        assert_eq!(trimmed, expect);
        assert_eq!(
            cyclic_extension(&f, Extension::WindowTrimmed).mul_vec(&x),
            expect
        );

        let bare = FrameSpec::new(4, 0, 0).unwrap();
        assert_eq!(cyclic_extension(&bare, Extension::Full), CMatrix::identity(4));
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_power(5, 0).unwrap(), CMatrix::identity(5));
        let v = symbols(4);
        let shifted = permutation_power(4, 1).unwrap().mul_vec(&v);
        assert_eq!(shifted, vec![v[3], v[0], v[1], v[2]]);
        assert!(permutation_power(4, 4).is_err());
    }

    #[test]
    fn permutation_group_property() {
        for a in 0..6 {
            for b in 0..6 {
                let lhs = permutation_power(6, a)
                    .unwrap()
                    .mul(&permutation_power(6, b).unwrap());
                assert_eq!(lhs, permutation_power(6, (a + b) % 6).unwrap());
            }
        }
    }

    #[test]
    fn doppler_examples() {
        assert_eq!(doppler_matrix(5, 0.0, 5, 0), CMatrix::identity(5));
        let d = doppler_matrix(4, 1.0, 4, 0);
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (i, e) in expect.iter().enumerate() {
            assert!((d[(i, i)] - e).norm() < 1e-15);
        }
        // Windowed grid convention: first entry e^{-j2π(L_w/2)k/(L u)}.
        let (l, lw, u, k) = (128usize, 64usize, 2usize, 3usize);
        let d = doppler_matrix(l + lw, k as f64 / u as f64, l, -((lw / 2) as i64));
        let theta = -2.0 * PI * (lw as f64 / 2.0) * k as f64 / (l as f64 * u as f64);
        assert!((d[(0, 0)] - c(theta.cos(), theta.sin())).norm() < 1e-14);
        // Last entry: exponent (L' - 1 - L_w/2).
        let theta = 2.0 * PI * (l + lw / 2 - 1) as f64 * k as f64 / (l as f64 * u as f64);
        assert!((d[(l + lw - 1, l + lw - 1)] - c(theta.cos(), theta.sin())).norm() < 1e-12);
    }

    #[test]
    fn component_examples() {
        assert_eq!(component_matrix(6, 0, 0.0, 6, 0).unwrap(), CMatrix::identity(6));
        assert_eq!(
            component_matrix(4, 1, 0.0, 4, 0).unwrap(),
            permutation_power(4, 1).unwrap()
        );
    }

    #[test]
    fn component_applied_matches_scalar_loop() {
        let l = 16;
        let s = symbols(l);
        for &(ell, kappa) in &[(0usize, 0.3), (3, 2.75), (7, 11.5), (15, 0.01)] {
            let got = component_matrix(l, ell, kappa, l, 0).unwrap().mul_vec(&s);
            for n in 0..l {
                let t = n as f64 - ell as f64;
                let ph = 2.0 * PI * kappa * t / l as f64;
                let want = c(ph.cos(), ph.sin()) * s[(n + l - ell) % l];
                assert!((got[n] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn composition_with_factors() {
        let (size, l) = (12, 12);
        for &(ell, kappa, off) in &[(0usize, 1.25, 0i64), (3, 0.5, 0), (5, 2.0, -2), (11, 3.7, 4)] {
            let g = component_matrix(size, ell, kappa, l, off).unwrap();
            let prod = permutation_power(size, ell)
                .unwrap()
                .mul(&doppler_matrix(size, kappa, l, off));
            for n in 0..size {
                let col = (n + size - ell) % size;
                if n >= ell {
                    assert_eq!(g[(n, col)], prod[(n, col)]);
                } else {
                    // wrapped rows differ from the product by e^{-j2πκ size/L}
                    let wrap = cis_turns(-kappa * size as f64 / l as f64);
                    assert!((g[(n, col)] - prod[(n, col)] * wrap).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn channel_matrix_examples() {
        let empty = PathSet::default();
        assert_eq!(channel_matrix(&empty, 5, 5, 0).unwrap(), CMatrix::zeros(5, 5));
        let one = PathSet::new(vec![Path {
            gain: c(1.0, 0.0),
            delay: 0,
            doppler: 0.0,
        }]);
        assert_eq!(channel_matrix(&one, 5, 5, 0).unwrap(), CMatrix::identity(5));

        let a = Path { gain: c(0.3, -0.2), delay: 2, doppler: 1.5 };
        let b = Path { gain: c(-0.7, 0.1), delay: 5, doppler: 0.25 };
        let h = channel_matrix(&PathSet::new(vec![a, b]), 10, 10, 0).unwrap();
        let mut oracle = CMatrix::zeros(10, 10);
        for p in [a, b] {
            for n in 0..10 {
                let t = n as f64 - p.delay as f64;
                let ph = 2.0 * PI * p.doppler * t / 10.0;
                oracle[(n, (n + 10 - p.delay) % 10)] += p.gain * c(ph.cos(), ph.sin());
            }
        }
        assert!(h.max_abs_diff(&oracle) < 1e-14);
    }

    #[test]
    fn path_set_validation() {
        let g = DDGridSpec::new(4, 16, 2).unwrap();
        let p = |delay, doppler| Path { gain: c(1.0, 0.0), delay, doppler };
        assert!(PathSet::new(vec![p(0, 0.0), p(3, 7.5)]).validate(&g).is_ok());
        assert!(PathSet::new(vec![p(4, 0.0)]).validate(&g).is_err());
        assert!(PathSet::new(vec![p(0, 7.6)]).validate(&g).is_err());
        assert!(PathSet::new(vec![p(1, 2.0), p(1, 2.1)]).validate(&g).is_err());
    }

    proptest! {
        #[test]
        fn window_shape(half in 0usize..40, extra in 0usize..60) {
            let lw = 2 * half;
            let l = lw + extra.max(1);
            let frame = FrameSpec::new(l, lw, 0).unwrap();
            let w = build_window(&frame).w;
            prop_assert_eq!(w.len(), l + lw);
            for n in 0..w.len() {
                prop_assert!((0.0..=1.0).contains(&w[n]));
                prop_assert_eq!(w[n], w[w.len() - 1 - n]);
            }
            for v in &w[lw..w.len() - lw] {
                prop_assert_eq!(*v, 1.0);
            }
        }

        #[test]
        fn component_preserves_energy(
            size in 2usize..40,
            ell_frac in 0.0f64..1.0,
            kappa in 0.0f64..20.0,
            off in -10i64..10,
            seed in any::<u64>(),
        ) {
            let ell = ((size as f64 - 1.0) * ell_frac) as usize;
            let g = component_matrix(size, ell, kappa, size.max(1), off).unwrap();
            let v: Vec<C64> = (0..size)
                .map(|i| {
                    let a = (seed.wrapping_mul(i as u64 + 1) % 1000) as f64 / 500.0 - 1.0;
                    c(a, 1.0 - a * a)
                })
                .collect();
            let gv = g.mul_vec(&v);
            let (n0, n1) = (crate::linalg::norm(&v), crate::linalg::norm(&gv));
            prop_assert!((n0 - n1).abs() <= 1e-12 * n0.max(1.0));
        }
    }
}
