//! Nyquist and square-root Nyquist pulses, and the sampled, fractionally
//! delayed pulse sequence `h_p` seen by each channel path.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, OtfsError, Result};
use crate::zak::{GridShape, PeriodicSequence};

/// Offsets closer than this to an integer are treated as exact integers.
pub const INTEGER_TOLERANCE: f64 = 1e-12;

const SINGULARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseFamily {
    /// Rectangular transmit pulse; its matched cascade is a triangle.
    Rectangular,
    RaisedCosine,
    /// Square-root raised cosine transmit pulse; the matched cascade is the raised cosine.
    RootRaisedCosine,
}

/// Transmit pulse family, roll-off and modulation interval `T` (seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    family: PulseFamily,
    rolloff: f64,
    symbol_period: f64,
}

impl PulseSpec {
    pub fn new(family: PulseFamily, rolloff: f64, symbol_period: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(invalid("rolloff", format!("{rolloff} is outside [0, 1]")));
        }
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(invalid(
                "symbol_period",
                format!("{symbol_period} must be finite and positive"),
            ));
        }
        Ok(Self {
            family,
            rolloff,
            symbol_period,
        })
    }

    pub fn raised_cosine(rolloff: f64, symbol_period: f64) -> Result<Self> {
        Self::new(PulseFamily::RaisedCosine, rolloff, symbol_period)
    }

    pub fn family(&self) -> PulseFamily {
        self.family
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// Nyquist pulse `h(uT)` of the transmit/matched-filter cascade.
    pub fn nyquist_value(&self, u: f64) -> f64 {
        match self.family {
            PulseFamily::Rectangular => (1.0 - u.abs()).max(0.0),
            PulseFamily::RaisedCosine | PulseFamily::RootRaisedCosine => {
                raised_cosine_value(u, self.rolloff)
            }
        }
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Raised cosine pulse at `u = t / T`:
/// `sinc(u) cos(beta pi u) / (1 - (2 beta u)^2)`.
///
/// Exactly 1 at `u = 0` and exactly 0 at every other integer. At
/// `|2 beta u| = 1` the analytic limit `(pi / 4) sinc(1 / (2 beta))` is used.
pub fn raised_cosine_value(u: f64, rolloff: f64) -> f64 {
    if u == 0.0 {
        return 1.0;
    }
    if u.fract() == 0.0 {
        return 0.0;
    }
    let denom = 1.0 - (2.0 * rolloff * u).powi(2);
    if denom.abs() < SINGULARITY_TOLERANCE {
        return PI / 4.0 * sinc(1.0 / (2.0 * rolloff));
    }
    sinc(u) * (rolloff * PI * u).cos() / denom
}

/// Root raised cosine pulse at `u = t / T`, scaled to unit energy per symbol
/// (`int p(t)^2 dt = T`).
pub fn root_raised_cosine_value(u: f64, rolloff: f64) -> f64 {
    let b = rolloff;
    if u == 0.0 {
        return 1.0 - b + 4.0 * b / PI;
    }
    if b > 0.0 && (1.0 - (4.0 * b * u).powi(2)).abs() < SINGULARITY_TOLERANCE {
        let arg = PI / (4.0 * b);
        return b * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * u * (1.0 - b)).sin() + 4.0 * b * u * (PI * u * (1.0 + b)).cos();
    num / (PI * u * (1.0 - (4.0 * b * u).powi(2)))
}

/// Truncated, delayed Nyquist pulse `h_p[n] = h(nT - tau)` for
/// `-LT/2 <= nT - tau < LT/2`, zero elsewhere, periodized with period `KL`.
///
/// A delay that is an integer multiple of `T` yields an exact Kronecker delta.
pub fn sample_delayed_nyquist(
    spec: &PulseSpec,
    delay: f64,
    shape: GridShape,
) -> Result<PeriodicSequence> {
    let period = shape.period();
    let offset = delay / spec.symbol_period;
    if !offset.is_finite() || offset.abs() >= period as f64 {
        return Err(OtfsError::DelayOutOfWindow {
            delay_samples: offset,
            period,
        });
    }
    let mut seq = PeriodicSequence::zeros(period);
    for (n, value) in delayed_nyquist_taps(spec, offset, shape.l()) {
        let idx = n.rem_euclid(period as i64) as usize;
        seq.samples_mut()[idx] = Complex64::new(value, 0.0);
    }
    Ok(seq)
}

/// Non-periodized taps `(n, h(n - offset))` inside the truncation window of
/// `window` samples. An integer offset gives the single tap `(offset, 1)`.
pub fn delayed_nyquist_taps(spec: &PulseSpec, offset: f64, window: usize) -> Vec<(i64, f64)> {
    let rounded = offset.round();
    if (offset - rounded).abs() < INTEGER_TOLERANCE {
        return vec![(rounded as i64, 1.0)];
    }
    let half = window as f64 / 2.0;
    let first = (offset - half).ceil() as i64;
    (first..first + window as i64)
        .filter(|&n| {
            let rel = n as f64 - offset;
            rel >= -half && rel < half
        })
        .map(|n| (n, spec.nyquist_value(n as f64 - offset)))
        .collect()
}

/// `1/sqrt(L)` on the first `L` samples of the period, zero elsewhere.
pub fn rectangular_pulse(shape: GridShape) -> PeriodicSequence {
    let amp = Complex64::new(1.0 / (shape.l() as f64).sqrt(), 0.0);
    PeriodicSequence::from_fn(shape.period(), |n| {
        if n < shape.l() {
            amp
        } else {
            Complex64::default()
        }
    })
}

/// Gaussian window `f[n] = exp(-((n - L/2) / (sigma L / 2))^2 / 2)` on the first
/// `L` samples of the period, zero elsewhere.
pub fn gaussian_window(shape: GridShape, sigma: f64) -> PeriodicSequence {
    let l = shape.l() as f64;
    PeriodicSequence::from_fn(shape.period(), |n| {
        if n < shape.l() {
            let z = (n as f64 - l / 2.0) / (sigma * l / 2.0);
            Complex64::new((-0.5 * z * z).exp(), 0.0)
        } else {
            Complex64::default()
        }
    })
}

/// Sampled root raised cosine filter spanning `L` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct RrcTaps {
    taps: Vec<f64>,
    oversampling: usize,
}

impl RrcTaps {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    /// `sum_i p[i] p[i + lag]`, the matched-filter output at `lag / oversampling` symbols.
    pub fn autocorrelation(&self, lag: i64) -> f64 {
        let lag = lag.unsigned_abs() as usize;
        if lag >= self.taps.len() {
            return 0.0;
        }
        self.taps
            .iter()
            .zip(&self.taps[lag..])
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Root raised cosine taps at `oversampling` samples per symbol over `L` symbols,
/// scaled so that the autocorrelation at lag 0 approximates 1.
pub fn root_raised_cosine_sampled(
    spec: &PulseSpec,
    shape: GridShape,
    oversampling: usize,
) -> Result<RrcTaps> {
    if spec.rolloff() <= 0.0 {
        return Err(invalid(
            "rolloff",
            "root raised cosine taps need rolloff > 0",
        ));
    }
    if oversampling == 0 {
        return Err(invalid("oversampling", "must be at least 1"));
    }
    let half = (shape.l() * oversampling / 2) as i64;
    let scale = 1.0 / (oversampling as f64).sqrt();
    let taps = (-half..=half)
        .map(|i| root_raised_cosine_value(i as f64 / oversampling as f64, spec.rolloff()) * scale)
        .collect();
    Ok(RrcTaps { taps, oversampling })
}
