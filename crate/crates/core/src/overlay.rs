//! OTFS as an overlay on pulse-shaping OFDM: ISFFT/SFFT between the
//! delay-Doppler and time-frequency domains, the OFDM synthesis/analysis
//! filter banks, and biorthogonality checks.
//!
//! With rectangular pulses the chain `ofdm_modulate(isfft(Z), g)` is exactly
//! `idzt(Z)`. For any pulse pair the full overlay round trip equals the
//! entrywise product `KL * Z * Z_g * conj(Z_gamma)` on the Zak grid.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{OtfsError, Result};
use crate::fft::{dd_to_tf, tf_to_dd, twiddle, UnitaryDft};
use crate::zak::{dzt, idzt, GridShape, PeriodicSequence, ZakGrid};

/// Below this magnitude a Zak-domain pulse is considered to vanish and has no dual.
pub const DUAL_THRESHOLD: f64 = 1e-8;

/// `K x L` time-frequency symbols, indexed `[m][l]`: `K` OFDM symbols by `L` subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct TfFrame {
    shape: GridShape,
    symbols: Array2<Complex64>,
}

impl TfFrame {
    pub fn new(shape: GridShape, symbols: Array2<Complex64>) -> Result<Self> {
        if symbols.dim() != (shape.k(), shape.l()) {
            return Err(OtfsError::Dimension {
                what: "time-frequency frame entries",
                expected: shape.period(),
                found: symbols.len(),
            });
        }
        Ok(Self { shape, symbols })
    }

    pub fn zeros(shape: GridShape) -> Self {
        Self {
            shape,
            symbols: Array2::zeros((shape.k(), shape.l())),
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn symbols(&self) -> &Array2<Complex64> {
        &self.symbols
    }

    pub fn get(&self, m: usize, l: usize) -> Complex64 {
        self.symbols[[m, l]]
    }

    pub fn energy(&self) -> f64 {
        self.symbols.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.shape, other.shape,
            "shape mismatch in frame comparison"
        );
        self.symbols
            .iter()
            .zip(other.symbols.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Delay-Doppler to time-frequency:
/// `a[m,l] = 1/sqrt(KL) sum_n sum_k Z[n,k] e^{j 2 pi (m k / K - l n / L)}`.
pub fn isfft(z: &ZakGrid) -> TfFrame {
    TfFrame {
        shape: z.shape(),
        symbols: dd_to_tf(z.values()),
    }
}

/// Time-frequency to delay-Doppler:
/// `Z[n,k] = 1/sqrt(KL) sum_l sum_m a[m,l] e^{-j 2 pi (k m / K - n l / L)}`.
pub fn sfft(frame: &TfFrame) -> ZakGrid {
    ZakGrid::new(frame.shape, tf_to_dd(&frame.symbols)).expect("sfft preserves the frame shape")
}

/// Pulse-shaping OFDM synthesis:
/// `s[n] = sum_m sum_l a[m,l] g[n - mL] e^{j 2 pi l n / L}` over one period.
pub fn ofdm_modulate(frame: &TfFrame, pulse: &PeriodicSequence) -> Result<PeriodicSequence> {
    let shape = frame.shape;
    shape.ensure_period("transmit pulse period", pulse.period())?;
    let (k_len, l_len) = (shape.k(), shape.l());
    let plan = UnitaryDft::new(l_len);
    let gain = (l_len as f64).sqrt();
    let mut out = vec![Complex64::default(); shape.period()];
    let mut carriers = vec![Complex64::default(); l_len];
    for m in 0..k_len {
        // Sum over subcarriers for symbol m, evaluated at n mod L.
        carriers
            .iter_mut()
            .zip(frame.symbols.row(m))
            .for_each(|(c, a)| *c = *a);
        plan.inverse(&mut carriers);
        for (n, s) in out.iter_mut().enumerate() {
            let g = pulse.at(n as i64 - (m * l_len) as i64);
            if g != Complex64::default() {
                *s += g * carriers[n % l_len] * gain;
            }
        }
    }
    PeriodicSequence::new(out)
}

/// Pulse-shaping OFDM analysis: `a[m,l] = <r, gamma_{m,l}>` with
/// `gamma_{m,l}[n] = gamma[n - mL] e^{j 2 pi l n / L}`.
pub fn ofdm_demodulate(
    received: &PeriodicSequence,
    pulse: &PeriodicSequence,
    shape: GridShape,
) -> Result<TfFrame> {
    shape.ensure_period("received sequence period", received.period())?;
    received.ensure_same_period(pulse)?;
    let (k_len, l_len) = (shape.k(), shape.l());
    let plan = UnitaryDft::new(l_len);
    let gain = (l_len as f64).sqrt();
    let mut frame = TfFrame::zeros(shape);
    let mut folded = vec![Complex64::default(); l_len];
    for m in 0..k_len {
        folded.iter_mut().for_each(|v| *v = Complex64::default());
        for (n, r) in received.samples().iter().enumerate() {
            let g = pulse.at(n as i64 - (m * l_len) as i64);
            folded[n % l_len] += r * g.conj();
        }
        plan.forward(&mut folded);
        frame
            .symbols
            .row_mut(m)
            .iter_mut()
            .zip(&folded)
            .for_each(|(a, v)| *a = v * gain);
    }
    Ok(frame)
}

/// How far a pulse pair is from biorthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthogonalityDefect {
    /// `max_{m,l} |<g, gamma_{m,l}> - delta[m] delta[l]|`.
    pub inner_product: f64,
    /// `max_{n,k} |KL Z_g[n,k] conj(Z_gamma[n,k]) - 1|`.
    pub zak_product: f64,
}

pub fn biorthogonality_defect(
    g: &PeriodicSequence,
    gamma: &PeriodicSequence,
    shape: GridShape,
) -> Result<BiorthogonalityDefect> {
    let frame = ofdm_demodulate(g, gamma, shape)?;
    let inner_product = frame
        .symbols
        .indexed_iter()
        .map(|((m, l), v)| {
            let target = if m == 0 && l == 0 { 1.0 } else { 0.0 };
            (v - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    let zg = dzt(g, shape)?;
    let zgamma = dzt(gamma, shape)?;
    let scale = shape.period() as f64;
    let zak_product = zg
        .values()
        .iter()
        .zip(zgamma.values().iter())
        .map(|(a, b)| (a * b.conj() * scale - 1.0).norm())
        .fold(0.0, f64::max);
    Ok(BiorthogonalityDefect {
        inner_product,
        zak_product,
    })
}

/// Biorthogonal dual of `g` from Zak-domain inversion,
/// `Z_gamma = 1 / (KL conj(Z_g))`. Fails when `Z_g` has (near) zeros.
pub fn dual_pulse(g: &PeriodicSequence, shape: GridShape) -> Result<PeriodicSequence> {
    let zg = dzt(g, shape)?;
    let min_magnitude = zg
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if min_magnitude < DUAL_THRESHOLD {
        return Err(OtfsError::NoDual {
            min_magnitude,
            threshold: DUAL_THRESHOLD,
        });
    }
    let scale = shape.period() as f64;
    Ok(idzt(&zg.map(|v| 1.0 / (v.conj() * scale))))
}

/// `sfft(ofdm_demodulate(ofdm_modulate(isfft(Z), g), gamma))`.
pub fn overlay_roundtrip(
    z: &ZakGrid,
    g: &PeriodicSequence,
    gamma: &PeriodicSequence,
) -> Result<ZakGrid> {
    let s = ofdm_modulate(&isfft(z), g)?;
    Ok(sfft(&ofdm_demodulate(&s, gamma, z.shape())?))
}

/// Closed form of the overlay chain: `KL * Z * Z_g * conj(Z_gamma)` entrywise.
pub fn overlay_product(
    z: &ZakGrid,
    g: &PeriodicSequence,
    gamma: &PeriodicSequence,
) -> Result<ZakGrid> {
    let shape = z.shape();
    let zg = dzt(g, shape)?;
    let zgamma = dzt(gamma, shape)?.map(|v| v.conj());
    let scale = Complex64::new(shape.period() as f64, 0.0);
    Ok(z.hadamard(&zg)?.hadamard(&zgamma)?.scale(scale))
}

/// Time-frequency shifted pulse `g[n - mL] e^{j 2 pi l n / L}`.
pub fn tf_shifted(
    pulse: &PeriodicSequence,
    m: usize,
    l: usize,
    shape: GridShape,
) -> PeriodicSequence {
    let l_len = shape.l() as i64;
    PeriodicSequence::from_fn(pulse.period(), |n| {
        pulse.at(n as i64 - m as i64 * l_len) * twiddle(l as i64 * n as i64, l_len)
    })
}
