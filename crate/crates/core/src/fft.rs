//! Thin unitary wrappers over `rustfft`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plans of one length, scaled to be unitary.
pub(crate) struct UnitaryDft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl UnitaryDft {
    pub(crate) fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            scale: 1.0 / (len as f64).sqrt(),
        }
    }

    /// `X[k] = 1/sqrt(N) sum x[n] e^{-j 2 pi k n / N}`, in place.
    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// `x[n] = 1/sqrt(N) sum X[k] e^{+j 2 pi k n / N}`, in place.
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }
}

/// `e^{j 2 pi num / den}` with the ratio reduced first so large products keep full precision.
pub(crate) fn twiddle(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / den as f64)
}

/// Unitary symplectic transform from an `L x K` delay-Doppler array to a `K x L`
/// time-frequency array: `a[m,l] = 1/sqrt(KL) sum_n sum_k z[n,k] e^{j2pi(mk/K - ln/L)}`.
pub(crate) fn dd_to_tf(z: &ndarray::Array2<Complex64>) -> ndarray::Array2<Complex64> {
    let (l_len, k_len) = z.dim();
    let dft_k = UnitaryDft::new(k_len);
    let dft_l = UnitaryDft::new(l_len);
    // Inverse DFT along k for every delay row gives rows indexed by m.
    let mut tmp = ndarray::Array2::<Complex64>::zeros((l_len, k_len));
    let mut row = vec![Complex64::default(); k_len];
    for n in 0..l_len {
        row.iter_mut().zip(z.row(n)).for_each(|(r, v)| *r = *v);
        dft_k.inverse(&mut row);
        tmp.row_mut(n)
            .iter_mut()
            .zip(&row)
            .for_each(|(t, v)| *t = *v);
    }
    let mut out = ndarray::Array2::<Complex64>::zeros((k_len, l_len));
    let mut col = vec![Complex64::default(); l_len];
    for m in 0..k_len {
        col.iter_mut().zip(tmp.column(m)).for_each(|(c, v)| *c = *v);
        dft_l.forward(&mut col);
        out.row_mut(m)
            .iter_mut()
            .zip(&col)
            .for_each(|(o, v)| *o = *v);
    }
    out
}

/// Inverse of [`dd_to_tf`]: `z[n,k] = 1/sqrt(KL) sum_l sum_m a[m,l] e^{-j2pi(km/K - nl/L)}`.
pub(crate) fn tf_to_dd(a: &ndarray::Array2<Complex64>) -> ndarray::Array2<Complex64> {
    let (k_len, l_len) = a.dim();
    let dft_k = UnitaryDft::new(k_len);
    let dft_l = UnitaryDft::new(l_len);
    let mut tmp = ndarray::Array2::<Complex64>::zeros((k_len, l_len));
    let mut row = vec![Complex64::default(); l_len];
    for m in 0..k_len {
        row.iter_mut().zip(a.row(m)).for_each(|(r, v)| *r = *v);
        dft_l.inverse(&mut row);
        tmp.row_mut(m)
            .iter_mut()
            .zip(&row)
            .for_each(|(t, v)| *t = *v);
    }
    let mut out = ndarray::Array2::<Complex64>::zeros((l_len, k_len));
    let mut col = vec![Complex64::default(); k_len];
    for n in 0..l_len {
        col.iter_mut().zip(tmp.column(n)).for_each(|(c, v)| *c = *v);
        dft_k.forward(&mut col);
        out.row_mut(n)
            .iter_mut()
            .zip(&col)
            .for_each(|(o, v)| *o = *v);
    }
    out
}
