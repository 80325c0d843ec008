//! Sampled signals on uniform grids, intervals, quadrature and DFT-based
//! multiplier application.
//!
//! The quadrature rule throughout is the left-endpoint rectangle rule: it is
//! exact for cell-aligned indicators and for periodic trigonometric
//! polynomials below Nyquist, which keeps the cancellation identities of the
//! decomposition exact at the discrete level.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Relative slack when mapping real interval endpoints to grid indices.
const GRID_SNAP: f64 = 1e-9;

/// A half-open real interval `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints must satisfy a < b, got [{a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// The dilate `cI` with the same center and `c` times the length.
    pub fn dilate(&self, c: f64) -> Self {
        let half = 0.5 * c * self.len();
        let mid = self.center();
        Self {
            a: mid - half,
            b: mid + half,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x < self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.a < other.b && other.a < self.b
    }
}

/// A dyadic interval `[2^k n, 2^k (n+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    pub k: i32,
    pub n: i64,
}

impl DyadicInterval {
    pub fn interval(&self) -> Interval {
        let len = (self.k as f64).exp2();
        Interval {
            a: len * self.n as f64,
            b: len * (self.n + 1) as f64,
        }
    }

    /// The dyadic interval of length `2^k` containing frequency `xi`.
    pub fn containing(xi: f64, k: i32) -> Self {
        let len = (k as f64).exp2();
        Self {
            k,
            n: (xi / len).floor() as i64,
        }
    }
}

/// A strictly increasing set of real frequencies, in `e^{2πiξx}` units.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    xi: Vec<f64>,
}

impl FrequencySet {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidParameter(
                "frequency set must be nonempty".into(),
            ));
        }
        for (i, w) in xi.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::FrequenciesNotIncreasing(i + 1));
            }
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite frequency".into()));
        }
        Ok(Self { xi })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.xi
    }

    pub fn min_gap(&self) -> f64 {
        self.xi
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Frequencies scaled by `s` (strict ordering is preserved for `s > 0`).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.xi.iter().map(|x| x * s).collect())
    }
}

/// Complex samples on a uniform grid over `[x0, x0 + len·dx)`.
///
/// The signal is identically 0 outside its domain for quadrature, and
/// periodic with period `len·dx` for DFT operations.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    pub x0: f64,
    pub dx: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<Complex64>, x0: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid requires finite x0 and dx > 0, got x0 = {x0}, dx = {dx}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidParameter("signal must be nonempty".into()));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        Ok(Self { samples, x0, dx })
    }

    pub fn zeros(len: usize, x0: f64, dx: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], x0, dx)
    }

    /// Build a signal by evaluating `f` at the grid points of `[x0, x0+len·dx)`.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(
        len: usize,
        x0: f64,
        dx: f64,
        mut f: F,
    ) -> Result<Self> {
        let samples = (0..len).map(|i| f(x0 + i as f64 * dx)).collect();
        Self::new(samples, x0, dx)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn domain(&self) -> Interval {
        Interval {
            a: self.x0,
            b: self.x0 + self.samples.len() as f64 * self.dx,
        }
    }

    /// Indices `i` with grid point `x_i ∈ J`, clamped to the domain,
    /// returned as a half-open range.
    pub fn index_range(&self, j: &Interval) -> std::ops::Range<usize> {
        let n = self.samples.len();
        let ta = snap((j.a - self.x0) / self.dx);
        let tb = snap((j.b - self.x0) / self.dx);
        let lo = ta.ceil().max(0.0).min(n as f64) as usize;
        let hi = tb.ceil().max(0.0).min(n as f64) as usize;
        lo..hi.max(lo)
    }

    /// Left-endpoint rectangle quadrature of the signal over `J ∩ domain`.
    pub fn integrate(&self, j: &Interval) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in self.index_range(j) {
            acc += self.samples[i];
        }
        acc * self.dx
    }

    /// Discrete `L^p(J)` norm; `p = ∞` is the max over grid points in `J`.
    pub fn lp_norm(&self, j: &Interval, p: f64) -> Result<f64> {
        if p.is_infinite() {
            return Ok(self
                .index_range(j)
                .map(|i| self.samples[i].norm())
                .fold(0.0, f64::max));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "L^p norm requires p >= 1 or p = inf, got {p}"
            )));
        }
        let sum: f64 = self
            .index_range(j)
            .map(|i| self.samples[i].norm().powf(p))
            .sum();
        Ok((self.dx * sum).powf(1.0 / p))
    }

    pub fn l1(&self) -> f64 {
        self.lp_norm(&self.domain(), 1.0).expect("p = 1 is valid")
    }

    pub fn l2(&self) -> f64 {
        self.lp_norm(&self.domain(), 2.0).expect("p = 2 is valid")
    }

    /// Same grid, samples zeroed outside `J`.
    pub fn restrict(&self, j: &Interval) -> SampledSignal {
        let range = self.index_range(j);
        let samples = (0..self.samples.len())
            .map(|i| {
                if range.contains(&i) {
                    self.samples[i]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SampledSignal {
            samples,
            x0: self.x0,
            dx: self.dx,
        }
    }

    /// The signed DFT frequency (in physical units) of bin `idx`,
    /// `ν_m = m/(len·dx)` with `m ∈ [-len/2, len/2)`.
    pub fn bin_frequency(&self, idx: usize) -> f64 {
        let n = self.samples.len();
        let m = if idx <= (n - 1) / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        };
        m as f64 / (n as f64 * self.dx)
    }

    /// Forward DFT in physical units: `F(ν_m) = dx·Σ f(x_i) e^{-2πi ν_m x_i}`,
    /// returned in FFT bin order (use [`bin_frequency`](Self::bin_frequency)).
    pub fn dft(&self) -> Vec<Complex64> {
        let n = self.samples.len();
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        for (idx, c) in buf.iter_mut().enumerate() {
            let nu = self.bin_frequency(idx);
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * nu * self.x0);
            *c *= self.dx * phase;
        }
        buf
    }

    /// Inverse of [`dft`](Self::dft) onto the same grid.
    pub fn idft(coeffs: &[Complex64], x0: f64, dx: f64) -> Result<SampledSignal> {
        let n = coeffs.len();
        let mut buf: Vec<Complex64> = coeffs.to_vec();
        // Undo the physical-units phase and weight first.
        let probe = SampledSignal::zeros(n, x0, dx)?;
        for (idx, c) in buf.iter_mut().enumerate() {
            let nu = probe.bin_frequency(idx);
            let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * nu * x0);
            *c *= phase / dx;
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        SampledSignal::new(buf, x0, dx)
    }

    /// Fourier multiplication: inverse DFT of `symbol(ν_m)·DFT(f)(ν_m)`.
    ///
    /// The signal is treated as periodic; the symbol is evaluated at the
    /// signed physical frequencies of the DFT bins.
    pub fn apply_multiplier<F: FnMut(f64) -> Complex64>(&self, mut symbol: F) -> SampledSignal {
        let n = self.samples.len();
        let mut buf = self.samples.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut buf);
        for (idx, c) in buf.iter_mut().enumerate() {
            *c *= symbol(self.bin_frequency(idx));
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        SampledSignal {
            samples: buf,
            x0: self.x0,
            dx: self.dx,
        }
    }

    /// Extend with `left` zero cells on the left and `right` on the right.
    pub fn zero_padded(&self, left: usize, right: usize) -> SampledSignal {
        let mut samples = vec![Complex64::new(0.0, 0.0); left];
        samples.extend_from_slice(&self.samples);
        samples.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(right));
        SampledSignal {
            samples,
            x0: self.x0 - left as f64 * self.dx,
            dx: self.dx,
        }
    }
}

impl std::ops::Sub for &SampledSignal {
    type Output = SampledSignal;

    fn sub(self, other: &SampledSignal) -> SampledSignal {
        assert_eq!(self.len(), other.len(), "grid length mismatch");
        assert!(
            (self.x0 - other.x0).abs() <= GRID_SNAP * self.dx
                && (self.dx - other.dx).abs() <= GRID_SNAP * self.dx,
            "grid mismatch"
        );
        SampledSignal {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
            x0: self.x0,
            dx: self.dx,
        }
    }
}

impl std::ops::Add for &SampledSignal {
    type Output = SampledSignal;

    fn add(self, other: &SampledSignal) -> SampledSignal {
        assert_eq!(self.len(), other.len(), "grid length mismatch");
        SampledSignal {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            x0: self.x0,
            dx: self.dx,
        }
    }
}

fn snap(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= GRID_SNAP * (1.0 + t.abs()) {
        r
    } else {
        t
    }
}
