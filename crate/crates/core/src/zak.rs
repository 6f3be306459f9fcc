//! Discrete Zak transform (DZT) on `KL`-periodic sequences.
//!
//! For a sequence `x` of period `N = K * L` the DZT is
//!
//! ```text
//! Z[n, k] = 1/sqrt(K) * sum_{l=0}^{K-1} x[n + lL] e^{-j 2 pi k l / K}
//! ```
//!
//! i.e. for every delay index `n` it is the unitary length-`K` DFT of the
//! `L`-fold subsampled sequence starting at `n`. Only the fundamental rectangle
//! `0 <= n < L`, `0 <= k < K` is stored; everything outside it is reached
//! through [`ZakGrid::eval_extended`], which applies periodicity in `k` and
//! quasi-periodicity in `n`:
//!
//! ```text
//! Z[n, k + mK] = Z[n, k]
//! Z[n + mL, k] = e^{j 2 pi k m / K} Z[n, k]
//! ```

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OtfsError, Result};
use crate::fft::{dd_to_tf, tf_to_dd, twiddle, UnitaryDft};

/// Factorization `N = K * L` of a sequence period.
///
/// `l` is the number of delay bins (the quasi-period) and `k` the number of
/// Doppler bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    k: usize,
    l: usize,
}

impl GridShape {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(OtfsError::InvalidShape { k, l });
        }
        Ok(Self { k, l })
    }

    /// Number of Doppler bins `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of delay bins `L`.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Sequence period `N = K L`.
    pub fn period(&self) -> usize {
        self.k * self.l
    }

    pub(crate) fn ensure_same(&self, other: &GridShape) -> Result<()> {
        if self != other {
            return Err(OtfsError::ShapeMismatch {
                left: (self.k, self.l),
                right: (other.k, other.l),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_period(&self, what: &'static str, len: usize) -> Result<()> {
        if len != self.period() {
            return Err(OtfsError::Dimension {
                what,
                expected: self.period(),
                found: len,
            });
        }
        Ok(())
    }
}

/// One period of a periodic complex sequence. Indexing with any integer wraps
/// modulo the period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSequence {
    samples: Vec<Complex64>,
}

impl PeriodicSequence {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(OtfsError::Dimension {
                what: "sequence period",
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { samples })
    }

    pub fn zeros(period: usize) -> Self {
        Self {
            samples: vec![Complex64::default(); period.max(1)],
        }
    }

    pub fn from_fn(period: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            samples: (0..period.max(1)).map(f).collect(),
        }
    }

    /// Kronecker delta at `n0` (taken modulo the period).
    pub fn impulse(period: usize, n0: i64) -> Self {
        let mut seq = Self::zeros(period);
        let idx = n0.rem_euclid(seq.period() as i64) as usize;
        seq.samples[idx] = Complex64::new(1.0, 0.0);
        seq
    }

    pub fn period(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `x[n mod N]` for any integer `n`.
    pub fn at(&self, n: i64) -> Complex64 {
        self.samples[n.rem_euclid(self.samples.len() as i64) as usize]
    }

    /// Circular delay: `y[n] = x[n - m]`.
    pub fn delayed(&self, m: i64) -> Self {
        Self::from_fn(self.period(), |n| self.at(n as i64 - m))
    }

    /// `<self, other> = sum_n self[n] conj(other[n])` over one period.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same_period(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.samples, &other.samples)
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub(crate) fn ensure_same_period(&self, other: &Self) -> Result<()> {
        if self.period() != other.period() {
            return Err(OtfsError::Dimension {
                what: "sequence period",
                expected: self.period(),
                found: other.period(),
            });
        }
        Ok(())
    }
}

impl std::ops::Add for &PeriodicSequence {
    type Output = PeriodicSequence;

    fn add(self, rhs: Self) -> PeriodicSequence {
        assert_eq!(
            self.period(),
            rhs.period(),
            "period mismatch in sequence addition"
        );
        PeriodicSequence::from_fn(self.period(), |n| self.samples[n] + rhs.samples[n])
    }
}

/// Unitary DFT coefficients of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(OtfsError::Dimension {
                what: "spectrum length",
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { coefficients })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.coefficients, &other.coefficients)
    }
}

/// DZT values on the fundamental rectangle, stored `[n][k]` (`L x K`).
#[derive(Debug, Clone, PartialEq)]
pub struct ZakGrid {
    shape: GridShape,
    values: Array2<Complex64>,
}

impl ZakGrid {
    pub fn new(shape: GridShape, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (shape.l(), shape.k()) {
            return Err(OtfsError::Dimension {
                what: "Zak grid entries",
                expected: shape.period(),
                found: values.len(),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: GridShape) -> Self {
        Self {
            shape,
            values: Array2::zeros((shape.l(), shape.k())),
        }
    }

    pub fn from_fn(shape: GridShape, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            shape,
            values: Array2::from_shape_fn((shape.l(), shape.k()), |(n, k)| f(n, k)),
        }
    }

    /// Single unit symbol at `(n0, k0)`.
    pub fn one_hot(shape: GridShape, n0: usize, k0: usize) -> Result<Self> {
        check_in_rectangle(shape, n0 as i64, k0 as i64)?;
        let mut grid = Self::zeros(shape);
        grid.values[[n0, k0]] = Complex64::new(1.0, 0.0);
        Ok(grid)
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    /// Value on the fundamental rectangle. Panics outside it.
    pub fn get(&self, n: usize, k: usize) -> Complex64 {
        self.values[[n, k]]
    }

    /// `Z[n, k]` for arbitrary integers, using `k`-periodicity and the
    /// quasi-periodic phase `e^{j 2 pi (k/K) floor(n/L)}` in `n`.
    pub fn eval_extended(&self, n: i64, k: i64) -> Complex64 {
        let l = self.shape.l() as i64;
        let kk = self.shape.k() as i64;
        let m = n.div_euclid(l);
        let n0 = n.rem_euclid(l) as usize;
        let k0 = k.rem_euclid(kk);
        let v = self.values[[n0, k0 as usize]];
        if m == 0 {
            v
        } else {
            v * twiddle(k0 * m.rem_euclid(kk), kk)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            shape: self.shape,
            values: self.values.mapv(f),
        }
    }

    /// Entrywise product with another grid of the same shape.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape,
            values: &self.values * &other.values,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|v| v * factor)
    }

    /// Sum of `|Z[n,k]|^2` over the fundamental rectangle.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn magnitude(&self) -> Array2<f64> {
        self.values.mapv(|v| v.norm())
    }

    /// Principal-value phase in `[-pi, pi)`.
    pub fn phase(&self) -> Array2<f64> {
        self.values.mapv(|v| {
            let p = v.arg();
            if p >= std::f64::consts::PI {
                p - std::f64::consts::TAU
            } else {
                p
            }
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape, other.shape, "shape mismatch in grid comparison");
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &ZakGrid {
    type Output = ZakGrid;

    fn add(self, rhs: Self) -> ZakGrid {
        assert_eq!(self.shape, rhs.shape, "shape mismatch in grid addition");
        ZakGrid {
            shape: self.shape,
            values: &self.values + &rhs.values,
        }
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in comparison");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_in_rectangle(shape: GridShape, n: i64, k: i64) -> Result<()> {
    if n < 0 || k < 0 || n >= shape.l() as i64 || k >= shape.k() as i64 {
        return Err(OtfsError::OutsideRectangle {
            n,
            k,
            l: shape.l(),
            k_bins: shape.k(),
        });
    }
    Ok(())
}

/// Forward DZT of one period of `x`.
pub fn dzt(x: &PeriodicSequence, shape: GridShape) -> Result<ZakGrid> {
    shape.ensure_period("sequence period", x.period())?;
    let (k_len, l_len) = (shape.k(), shape.l());
    let plan = UnitaryDft::new(k_len);
    let mut grid = ZakGrid::zeros(shape);
    let mut buf = vec![Complex64::default(); k_len];
    for n in 0..l_len {
        for (l, b) in buf.iter_mut().enumerate() {
            *b = x.samples[n + l * l_len];
        }
        plan.forward(&mut buf);
        grid.values
            .row_mut(n)
            .iter_mut()
            .zip(&buf)
            .for_each(|(z, v)| *z = *v);
    }
    Ok(grid)
}

/// Inverse DZT: `x[n + lL] = 1/sqrt(K) sum_k Z[n,k] e^{j 2 pi k l / K}`.
pub fn idzt(z: &ZakGrid) -> PeriodicSequence {
    let (k_len, l_len) = (z.shape.k(), z.shape.l());
    let plan = UnitaryDft::new(k_len);
    let mut samples = vec![Complex64::default(); z.shape.period()];
    let mut buf = vec![Complex64::default(); k_len];
    for n in 0..l_len {
        buf.iter_mut()
            .zip(z.values.row(n))
            .for_each(|(b, v)| *b = *v);
        plan.inverse(&mut buf);
        for (l, v) in buf.iter().enumerate() {
            samples[n + l * l_len] = *v;
        }
    }
    PeriodicSequence { samples }
}

/// Unitary DFT of one period.
pub fn dft(x: &PeriodicSequence) -> Spectrum {
    let mut coefficients = x.samples.clone();
    UnitaryDft::new(coefficients.len()).forward(&mut coefficients);
    Spectrum { coefficients }
}

/// Unitary inverse DFT.
pub fn idft(spectrum: &Spectrum) -> PeriodicSequence {
    let mut samples = spectrum.coefficients.clone();
    UnitaryDft::new(samples.len()).inverse(&mut samples);
    PeriodicSequence { samples }
}

/// DZT computed from the DFT of the sequence:
/// `Z[n,k] = 1/sqrt(L) sum_l X[k + lK] e^{j 2 pi (k + lK) n / (KL)}`.
pub fn dzt_from_dft(spectrum: &Spectrum, shape: GridShape) -> Result<ZakGrid> {
    shape.ensure_period("spectrum length", spectrum.len())?;
    let (k_len, l_len) = (shape.k(), shape.l());
    let period = shape.period() as i64;
    let plan = UnitaryDft::new(l_len);
    let mut grid = ZakGrid::zeros(shape);
    let mut buf = vec![Complex64::default(); l_len];
    for k in 0..k_len {
        for (l, b) in buf.iter_mut().enumerate() {
            *b = spectrum.coefficients[k + l * k_len];
        }
        plan.inverse(&mut buf);
        for (n, v) in buf.iter().enumerate() {
            grid.values[[n, k]] = v * twiddle((k * n) as i64, period);
        }
    }
    Ok(grid)
}

/// DFT recovered from the DZT (a Cooley-Tukey style factorization):
/// `X[k] = 1/sqrt(L) sum_n Z[n, k mod K] e^{-j 2 pi k n / (KL)}`.
pub fn dft_from_dzt(z: &ZakGrid) -> Spectrum {
    let (k_len, l_len) = (z.shape.k(), z.shape.l());
    let period = z.shape.period() as i64;
    let plan = UnitaryDft::new(l_len);
    let mut coefficients = vec![Complex64::default(); z.shape.period()];
    let mut buf = vec![Complex64::default(); l_len];
    for k in 0..k_len {
        for (n, b) in buf.iter_mut().enumerate() {
            *b = z.values[[n, k]] * twiddle(-((k * n) as i64), period);
        }
        plan.forward(&mut buf);
        for (l, v) in buf.iter().enumerate() {
            coefficients[k + l * k_len] = *v;
        }
    }
    Spectrum { coefficients }
}

/// Free-function form of [`ZakGrid::eval_extended`].
pub fn eval_extended(z: &ZakGrid, n: i64, k: i64) -> Complex64 {
    z.eval_extended(n, k)
}

/// The sequence carried by a single DZT coefficient at `(n0, k0)`:
/// a delayed impulse train with spacing `L`, amplitude `1/sqrt(K)` and
/// per-replica phase `e^{j 2 pi k0 l / K}`.
pub fn basis_sequence(n0: usize, k0: usize, shape: GridShape) -> Result<PeriodicSequence> {
    check_in_rectangle(shape, n0 as i64, k0 as i64)?;
    let (k_len, l_len) = (shape.k(), shape.l());
    let amp = 1.0 / (k_len as f64).sqrt();
    let mut seq = PeriodicSequence::zeros(shape.period());
    for l in 0..k_len {
        seq.samples[n0 + l * l_len] = twiddle((k0 * l) as i64, k_len as i64) * amp;
    }
    Ok(seq)
}

/// Fundamental-rectangle representation of `Z[n - m, k]` (the DZT of `x[n - m]`).
pub fn shift_in_zak(z: &ZakGrid, m: i64) -> ZakGrid {
    ZakGrid::from_fn(z.shape, |n, k| z.eval_extended(n as i64 - m, k as i64))
}

/// DZT of an elementwise product, computed in the Zak domain:
/// `Zz[n,k] = 1/sqrt(K) sum_l Zx[n,l] Zy[n, k - l]`.
pub fn zak_modulate(zx: &ZakGrid, zy: &ZakGrid) -> Result<ZakGrid> {
    zx.shape.ensure_same(&zy.shape)?;
    let (k_len, l_len) = (zx.shape.k(), zx.shape.l());
    let scale = 1.0 / (k_len as f64).sqrt();
    let mut out = ZakGrid::zeros(zx.shape);
    for n in 0..l_len {
        let x_row = zx.values.row(n);
        let y_row = zy.values.row(n);
        for (l, &xv) in x_row.iter().enumerate() {
            if xv == Complex64::default() {
                continue;
            }
            for k in 0..k_len {
                let idx = (k + k_len - l) % k_len;
                out.values[[n, k]] += xv * y_row[idx];
            }
        }
    }
    out.values.mapv_inplace(|v| v * scale);
    Ok(out)
}

/// DZT of a circular convolution, computed in the Zak domain:
/// `Zz[n,k] = sqrt(K) sum_{m=0}^{L-1} Zx[m,k] Zy[n - m, k]`, where `n - m < 0`
/// is resolved through the quasi-periodic extension of `Zy`.
pub fn zak_convolve(zx: &ZakGrid, zy: &ZakGrid) -> Result<ZakGrid> {
    zx.shape.ensure_same(&zy.shape)?;
    let (k_len, l_len) = (zx.shape.k(), zx.shape.l());
    let scale = (k_len as f64).sqrt();
    // Extended copy of Zy for delay offsets d = n - m in -(L-1)..=L-1, stored at d + L - 1.
    let ext = Array2::from_shape_fn((2 * l_len - 1, k_len), |(i, k)| {
        zy.eval_extended(i as i64 - (l_len as i64 - 1), k as i64)
    });
    let mut out = ZakGrid::zeros(zx.shape);
    for m in 0..l_len {
        for k in 0..k_len {
            let xv = zx.values[[m, k]];
            if xv == Complex64::default() {
                continue;
            }
            for n in 0..l_len {
                out.values[[n, k]] += xv * ext[[n + l_len - 1 - m, k]];
            }
        }
    }
    out.values.mapv_inplace(|v| v * scale);
    Ok(out)
}

/// Expansion coefficients `<x, y_{m,l}>` with `y_{m,l}[n] = y[n - mL] e^{j 2 pi l n / L}`,
/// computed from the Zak product:
/// `c[m,l] = sum_n sum_k Zx[n,k] conj(Zy[n,k]) e^{j 2 pi (m k / K - l n / L)}`.
///
/// The result is `K x L`, indexed `[m][l]`.
pub fn expansion_coefficients(
    x: &PeriodicSequence,
    y: &PeriodicSequence,
    shape: GridShape,
) -> Result<Array2<Complex64>> {
    x.ensure_same_period(y)?;
    let zx = dzt(x, shape)?;
    let zy = dzt(y, shape)?;
    let product = &zx.values * &zy.values.mapv(|v| v.conj());
    let scale = (shape.period() as f64).sqrt();
    Ok(dd_to_tf(&product).mapv(|v| v * scale))
}

/// Inverse of [`expansion_coefficients`]: recovers `Zx[n,k] conj(Zy[n,k])` from the
/// `K x L` coefficient matrix.
pub fn zak_product_from_coefficients(
    coefficients: &Array2<Complex64>,
    shape: GridShape,
) -> Result<ZakGrid> {
    if coefficients.dim() != (shape.k(), shape.l()) {
        return Err(OtfsError::Dimension {
            what: "expansion coefficient matrix",
            expected: shape.period(),
            found: coefficients.len(),
        });
    }
    let scale = 1.0 / (shape.period() as f64).sqrt();
    ZakGrid::new(shape, tf_to_dd(coefficients).mapv(|v| v * scale))
}
