//! Discrete time-frequency dispersive channel.
//!
//! A channel is a finite set of scatterers, each with a complex gain, a delay
//! and a Doppler shift. After matched filtering and sampling every `T` seconds,
//! path `p` contributes
//!
//! ```text
//! y_p[m] = alpha_p e^{j 2 pi nu_p tau_p} sum_n x[n] e^{j 2 pi k_p n / (KL)} h_p[m - n]
//! ```
//!
//! where `k_p = nu_p K L T` and `h_p` is the delayed, truncated Nyquist pulse.
//! The constant phase `e^{j 2 pi nu_p tau_p}` is kept separate from `alpha_p`
//! (see [`Scatterer::effective_gain`]).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, OtfsError, Result};
use crate::fft::twiddle;
use crate::modem::FrameConfig;
use crate::pulses::{delayed_nyquist_taps, PulseSpec, INTEGER_TOLERANCE};
use crate::zak::PeriodicSequence;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// ChaCha stream used for per-tap Doppler draws.
pub const DOPPLER_STREAM: u64 = 1;
/// ChaCha stream used for additive noise.
pub const NOISE_STREAM: u64 = 2;
/// ChaCha stream used for per-tap phases.
pub const PHASE_STREAM: u64 = 3;
/// ChaCha stream used for random data symbols.
pub const SYMBOL_STREAM: u64 = 4;

/// Seeded generator for one of the named streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScattererRecord", into = "ScattererRecord")]
pub struct Scatterer {
    gain: Complex64,
    delay: f64,
    doppler: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScattererRecord {
    gain_re: f64,
    gain_im: f64,
    delay_s: f64,
    doppler_hz: f64,
}

impl TryFrom<ScattererRecord> for Scatterer {
    type Error = OtfsError;

    fn try_from(r: ScattererRecord) -> Result<Self> {
        Scatterer::new(
            Complex64::new(r.gain_re, r.gain_im),
            r.delay_s,
            r.doppler_hz,
        )
    }
}

impl From<Scatterer> for ScattererRecord {
    fn from(s: Scatterer) -> Self {
        Self {
            gain_re: s.gain.re,
            gain_im: s.gain.im,
            delay_s: s.delay,
            doppler_hz: s.doppler,
        }
    }
}

impl Scatterer {
    pub fn new(gain: Complex64, delay: f64, doppler: f64) -> Result<Self> {
        if !(gain.re.is_finite() && gain.im.is_finite()) {
            return Err(invalid("gain", "must be finite"));
        }
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(invalid("delay", format!("{delay} must be finite and >= 0")));
        }
        if !doppler.is_finite() {
            return Err(invalid("doppler", "must be finite"));
        }
        Ok(Self {
            gain,
            delay,
            doppler,
        })
    }

    /// Scatterer at integer delay `n_p T` and integer Doppler bin `k_p` of `cfg`.
    pub fn on_grid(
        gain: Complex64,
        delay_bins: f64,
        doppler_bins: f64,
        cfg: &FrameConfig,
    ) -> Result<Self> {
        Self::new(
            gain,
            delay_bins * cfg.symbol_period(),
            doppler_bins * cfg.doppler_resolution(),
        )
    }

    pub fn gain(&self) -> Complex64 {
        self.gain
    }

    /// Delay in seconds.
    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Doppler shift in Hz.
    pub fn doppler(&self) -> f64 {
        self.doppler
    }

    /// `alpha_p e^{j 2 pi nu_p tau_p}`: the gain with the constant path phase folded in.
    pub fn effective_gain(&self) -> Complex64 {
        self.gain * Complex64::from_polar(1.0, TAU * self.doppler * self.delay)
    }
}

/// Scatterers plus the noise variance per complex sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRecord")]
pub struct ChannelSpec {
    pub scatterers: Vec<Scatterer>,
    pub n0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRecord {
    scatterers: Vec<Scatterer>,
    #[serde(default)]
    n0: f64,
}

impl TryFrom<ChannelRecord> for ChannelSpec {
    type Error = OtfsError;

    fn try_from(r: ChannelRecord) -> Result<Self> {
        ChannelSpec::new(r.scatterers, r.n0)
    }
}

impl ChannelSpec {
    pub fn new(scatterers: Vec<Scatterer>, n0: f64) -> Result<Self> {
        if !(n0.is_finite() && n0 >= 0.0) {
            return Err(invalid("n0", format!("{n0} must be finite and >= 0")));
        }
        Ok(Self { scatterers, n0 })
    }

    /// Single unit path with no delay or Doppler.
    pub fn identity() -> Self {
        Self {
            scatterers: vec![Scatterer {
                gain: Complex64::new(1.0, 0.0),
                delay: 0.0,
                doppler: 0.0,
            }],
            n0: 0.0,
        }
    }

    pub fn max_delay(&self) -> f64 {
        self.scatterers.iter().map(|s| s.delay).fold(0.0, f64::max)
    }

    pub fn max_abs_doppler(&self) -> f64 {
        self.scatterers
            .iter()
            .map(|s| s.doppler.abs())
            .fold(0.0, f64::max)
    }
}

/// Doppler shift `v f_c / c` for relative velocity `v` (m/s) at carrier `f_c` (Hz).
pub fn doppler_from_velocity(velocity: f64, carrier_frequency: f64) -> f64 {
    doppler_from_velocity_with_c(velocity, carrier_frequency, SPEED_OF_LIGHT)
}

pub fn doppler_from_velocity_with_c(velocity: f64, carrier_frequency: f64, c: f64) -> f64 {
    velocity * carrier_frequency / c
}

/// Doppler shift in units of the Doppler resolution `1 / (KLT)`; may be fractional.
pub fn doppler_index(doppler: f64, cfg: &FrameConfig) -> f64 {
    doppler * cfg.shape().period() as f64 * cfg.symbol_period()
}

fn ensure_matching_period(pulse: &PulseSpec, cfg: &FrameConfig) -> Result<()> {
    let (a, b) = (pulse.symbol_period(), cfg.symbol_period());
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(invalid(
            "symbol_period",
            format!("pulse uses T = {a} s but the frame uses T = {b} s"),
        ));
    }
    Ok(())
}

/// `e^{j 2 pi k_p n / N}`, exact for integer `k_p`.
pub(crate) fn doppler_phasor(k_p: f64, n: i64, period: usize) -> Complex64 {
    let rounded = k_p.round();
    if (k_p - rounded).abs() < INTEGER_TOLERANCE {
        twiddle(rounded as i64 * n, period as i64)
    } else {
        Complex64::from_polar(1.0, TAU * k_p * n as f64 / period as f64)
    }
}

/// Response of a single path with the circular (cyclic-prefix) model, noiseless.
pub fn path_response_circular(
    x: &PeriodicSequence,
    scatterer: &Scatterer,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
) -> Result<PeriodicSequence> {
    let shape = cfg.shape();
    shape.ensure_period("transmit sequence period", x.period())?;
    ensure_matching_period(pulse, cfg)?;
    let period = shape.period();
    let offset = scatterer.delay / cfg.symbol_period();
    if offset >= period as f64 {
        return Err(OtfsError::DelayOutOfWindow {
            delay_samples: offset,
            period,
        });
    }
    let k_p = doppler_index(scatterer.doppler, cfg);
    let modulated: Vec<Complex64> = x
        .samples()
        .iter()
        .enumerate()
        .map(|(n, v)| v * doppler_phasor(k_p, n as i64, period))
        .collect();
    let taps = delayed_nyquist_taps(pulse, offset, shape.l());
    let gain = scatterer.effective_gain();
    let mut out = vec![Complex64::default(); period];
    for (j, h) in taps {
        let shift = j.rem_euclid(period as i64) as usize;
        let w = gain * h;
        for (m, y) in out.iter_mut().enumerate() {
            *y += w * modulated[(m + period - shift) % period];
        }
    }
    PeriodicSequence::new(out)
}

/// Circular channel model: superposition of all paths, plus AWGN when
/// `spec.n0 > 0` and a seed is given.
pub fn apply_channel_circular(
    x: &PeriodicSequence,
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
    seed: Option<u64>,
) -> Result<PeriodicSequence> {
    cfg.shape()
        .ensure_period("transmit sequence period", x.period())?;
    let mut y = PeriodicSequence::zeros(x.period());
    for s in &spec.scatterers {
        y = &y + &path_response_circular(x, s, pulse, cfg)?;
    }
    match seed {
        Some(seed) if spec.n0 > 0.0 => Ok(add_awgn(&y, spec.n0, seed)),
        _ => Ok(y),
    }
}

/// Cyclic prefix a path needs for [`apply_channel_linear`]: the largest causal
/// tap offset of its sampled pulse (at least `ceil(tau / T)`).
pub fn required_prefix(scatterer: &Scatterer, pulse: &PulseSpec, cfg: &FrameConfig) -> usize {
    let offset = scatterer.delay / cfg.symbol_period();
    let causal = delayed_nyquist_taps(pulse, offset, cfg.shape().l())
        .iter()
        .map(|(j, _)| *j)
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let delay = (offset - INTEGER_TOLERANCE).ceil().max(0.0) as usize;
    causal.max(delay)
}

/// Linear-convolution channel model on a frame with its cyclic prefix.
///
/// `x_cp` holds `KL + Lcp` samples (`x[-Lcp..KL-1]`); the output is the
/// `KL` samples taken after the prefix. The pulse is not periodized, so
/// contributions that would need samples past the end of the frame are absent.
pub fn apply_channel_linear(
    x_cp: &[Complex64],
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
) -> Result<Vec<Complex64>> {
    ensure_matching_period(pulse, cfg)?;
    let period = cfg.shape().period();
    let cp = cfg.cp_len();
    if x_cp.len() != period + cp {
        return Err(OtfsError::Dimension {
            what: "frame with cyclic prefix",
            expected: period + cp,
            found: x_cp.len(),
        });
    }
    let required = spec
        .scatterers
        .iter()
        .map(|s| required_prefix(s, pulse, cfg))
        .max()
        .unwrap_or(0);
    if required > cp {
        return Err(OtfsError::CyclicPrefixTooShort {
            required,
            available: cp,
        });
    }
    let mut out = vec![Complex64::default(); period];
    for s in &spec.scatterers {
        let k_p = doppler_index(s.doppler, cfg);
        let gain = s.effective_gain();
        let offset = s.delay / cfg.symbol_period();
        for (j, h) in delayed_nyquist_taps(pulse, offset, cfg.shape().l()) {
            let w = gain * h;
            for (m, y) in out.iter_mut().enumerate() {
                let n = m as i64 - j;
                if n < -(cp as i64) || n >= period as i64 {
                    continue;
                }
                let xv = x_cp[(n + cp as i64) as usize];
                *y += w * xv * doppler_phasor(k_p, n, period);
            }
        }
    }
    Ok(out)
}

/// Adds circularly symmetric complex Gaussian noise of variance `n0` per sample.
pub fn add_awgn(y: &PeriodicSequence, n0: f64, seed: u64) -> PeriodicSequence {
    if n0 <= 0.0 {
        return y.clone();
    }
    let mut rng = stream_rng(seed, NOISE_STREAM);
    let normal = Normal::new(0.0, (n0 / 2.0).sqrt()).expect("finite noise deviation");
    PeriodicSequence::from_fn(y.period(), |n| {
        y.samples()[n] + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
    })
}

/// One entry of a power-delay profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileTap {
    /// Delay normalized to the RMS delay spread of the profile's source table.
    pub normalized_delay: f64,
    pub power_db: f64,
}

const fn tap(normalized_delay: f64, power_db: f64) -> ProfileTap {
    ProfileTap {
        normalized_delay,
        power_db,
    }
}

/// The 13 scattered (Rayleigh) taps of the 3GPP TR 38.901 TDL-E profile,
/// taps 2 to 14. The LOS component is added separately.
pub const TDL_E_SCATTERERS: [ProfileTap; 13] = [
    tap(0.5133, -15.8),
    tap(0.5440, -18.1),
    tap(0.5630, -19.8),
    tap(0.5440, -22.9),
    tap(0.7112, -22.4),
    tap(1.9092, -18.6),
    tap(1.9293, -20.8),
    tap(1.9589, -22.6),
    tap(2.6426, -22.3),
    tap(3.7136, -25.6),
    tap(5.4524, -20.2),
    tap(12.0034, -29.8),
    tap(20.6519, -29.2),
];

/// LOS power of the TDL-E table in dB.
pub const TDL_E_LOS_POWER_DB: f64 = -0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdlEParams {
    pub carrier_frequency: f64,
    /// Maximum relative velocity, m/s.
    pub max_velocity: f64,
    pub sample_rate: f64,
    pub rms_delay_spread: f64,
    #[serde(default = "default_los_power")]
    pub los_power_db: f64,
    #[serde(default = "default_profile")]
    pub profile: Vec<ProfileTap>,
}

fn default_los_power() -> f64 {
    TDL_E_LOS_POWER_DB
}

fn default_profile() -> Vec<ProfileTap> {
    TDL_E_SCATTERERS.to_vec()
}

impl TdlEParams {
    /// 28 GHz carrier, 150 km/h, 50 MHz sampling, 300 ns RMS delay spread.
    pub fn mmwave_rural() -> Self {
        Self {
            carrier_frequency: 28e9,
            max_velocity: 150.0 / 3.6,
            sample_rate: 50e6,
            rms_delay_spread: 300e-9,
            los_power_db: TDL_E_LOS_POWER_DB,
            profile: default_profile(),
        }
    }

    pub fn max_doppler(&self) -> f64 {
        doppler_from_velocity(self.max_velocity, self.carrier_frequency)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("carrier_frequency", self.carrier_frequency),
            ("max_velocity", self.max_velocity),
            ("sample_rate", self.sample_rate),
            ("rms_delay_spread", self.rms_delay_spread),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("{v} must be finite and positive")));
            }
        }
        if self.profile.is_empty() {
            return Err(invalid("profile", "needs at least one scattered tap"));
        }
        if self
            .profile
            .iter()
            .any(|t| !(t.normalized_delay >= 0.0 && t.power_db.is_finite()))
        {
            return Err(invalid("profile", "delays must be >= 0 and powers finite"));
        }
        if profile_rms(&self.profile) <= 0.0 {
            return Err(invalid("profile", "scattered taps have zero delay spread"));
        }
        Ok(())
    }
}

/// Power-weighted RMS delay spread of a set of `(delay, linear power)` pairs.
pub fn rms_delay_spread(taps: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut p, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (d, w) in taps {
        p += w;
        m1 += w * d;
        m2 += w * d * d;
    }
    let mean = m1 / p;
    (m2 / p - mean * mean).max(0.0).sqrt()
}

fn profile_rms(profile: &[ProfileTap]) -> f64 {
    rms_delay_spread(
        profile
            .iter()
            .map(|t| (t.normalized_delay, db_to_linear(t.power_db))),
    )
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// TDL-E style scenario: a LOS path at zero delay and Doppler, then one path
/// per profile tap with delays scaled to the requested RMS delay spread,
/// uniform Doppler in `[-nu_max, nu_max]` and uniform phase. Total power is 1.
pub fn tdl_e_scenario(seed: u64, params: &TdlEParams) -> Result<ChannelSpec> {
    params.validate()?;
    let scale = params.rms_delay_spread / profile_rms(&params.profile);
    let nu_max = params.max_doppler();
    let mut doppler_rng = stream_rng(seed, DOPPLER_STREAM);
    let mut phase_rng = stream_rng(seed, PHASE_STREAM);

    let los_power = db_to_linear(params.los_power_db);
    let total: f64 = los_power
        + params
            .profile
            .iter()
            .map(|t| db_to_linear(t.power_db))
            .sum::<f64>();

    let mut scatterers = Vec::with_capacity(params.profile.len() + 1);
    scatterers.push(Scatterer::new(
        Complex64::new((los_power / total).sqrt(), 0.0),
        0.0,
        0.0,
    )?);
    for t in &params.profile {
        let amplitude = (db_to_linear(t.power_db) / total).sqrt();
        let phase = phase_rng.random_range(0.0..TAU);
        let doppler = doppler_rng.random_range(-nu_max..=nu_max);
        scatterers.push(Scatterer::new(
            Complex64::from_polar(amplitude, phase),
            t.normalized_delay * scale,
            doppler,
        )?);
    }
    ChannelSpec::new(scatterers, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c, random_sequence};
    use crate::zak::GridShape;

    fn cfg(k: usize, l: usize, cp: usize) -> FrameConfig {
        FrameConfig::new(GridShape::new(k, l).unwrap(), 1e-6, cp).unwrap()
    }

    #[test]
    fn doppler_from_velocity_values() {
        assert_eq!(doppler_from_velocity(0.0, 28e9), 0.0);
        let v = 150.0 / 3.6;
        assert!((doppler_from_velocity(v, 28e9) - 3891.6).abs() < 0.05);
        assert!((doppler_from_velocity_with_c(v, 28e9, 3e8) - 3888.9).abs() < 0.05);
        assert_eq!(
            doppler_from_velocity(-v, 28e9),
            -doppler_from_velocity(v, 28e9)
        );
    }

    #[test]
    fn doppler_index_values() {
        let cfg = cfg(4, 8, 0);
        assert!((doppler_index(cfg.doppler_resolution(), &cfg) - 1.0).abs() < 1e-12);
        assert_eq!(doppler_index(0.0, &cfg), 0.0);
        let tdl = FrameConfig::new(GridShape::new(32, 128).unwrap(), 1.0 / 50e6, 0).unwrap();
        assert!((tdl.doppler_resolution() - 12207.03125).abs() < 1e-6);
    }

    #[test]
    fn identity_channel_is_identity() {
        let cfg = cfg(4, 6, 0);
        let pulse = PulseSpec::raised_cosine(0.5, 1e-6).unwrap();
        let x = random_sequence(24, 1);
        let y = apply_channel_circular(&x, &ChannelSpec::identity(), &pulse, &cfg, None).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn superposition_of_paths() {
        let cfg = cfg(4, 6, 0);
        let pulse = PulseSpec::raised_cosine(0.3, 1e-6).unwrap();
        let x = random_sequence(24, 2);
        let a = Scatterer::on_grid(c(0.7, -0.2), 1.3, 0.4, &cfg).unwrap();
        let b = Scatterer::on_grid(c(-0.1, 0.5), 4.0, -1.7, &cfg).unwrap();
        let both = ChannelSpec::new(vec![a, b], 0.0).unwrap();
        let ya = apply_channel_circular(
            &x,
            &ChannelSpec::new(vec![a], 0.0).unwrap(),
            &pulse,
            &cfg,
            None,
        )
        .unwrap();
        let yb = apply_channel_circular(
            &x,
            &ChannelSpec::new(vec![b], 0.0).unwrap(),
            &pulse,
            &cfg,
            None,
        )
        .unwrap();
        let y = apply_channel_circular(&x, &both, &pulse, &cfg, None).unwrap();
        assert!(y.max_abs_diff(&(&ya + &yb)) < 1e-12);
    }

    #[test]
    fn integer_path_is_delay_and_modulation() {
        let cfg = cfg(4, 6, 0);
        let pulse = PulseSpec::raised_cosine(0.3, 1e-6).unwrap();
        let x = random_sequence(24, 3);
        let s = Scatterer::on_grid(c(1.0, 0.0), 5.0, 3.0, &cfg).unwrap();
        let y = path_response_circular(&x, &s, &pulse, &cfg).unwrap();
        for m in 0..24i64 {
            let expected =
                s.effective_gain() * x.at(m - 5) * twiddle(3 * (m - 5).rem_euclid(24), 24);
            assert!((y.at(m) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_matches_circular_for_integer_paths() {
        let cfg = cfg(4, 6, 5);
        let pulse = PulseSpec::raised_cosine(0.3, 1e-6).unwrap();
        let x = random_sequence(24, 4);
        let mut x_cp = x.samples()[19..].to_vec();
        x_cp.extend_from_slice(x.samples());
        let spec = ChannelSpec::new(
            vec![
                Scatterer::on_grid(c(1.0, 0.0), 0.0, 0.0, &cfg).unwrap(),
                Scatterer::on_grid(c(0.3, 0.1), 5.0, -2.0, &cfg).unwrap(),
            ],
            0.0,
        )
        .unwrap();
        let lin = apply_channel_linear(&x_cp, &spec, &pulse, &cfg).unwrap();
        let circ = apply_channel_circular(&x, &spec, &pulse, &cfg, None).unwrap();
        assert!(crate::zak::max_abs_diff(&lin, circ.samples()) < 1e-13);
    }

    #[test]
    fn linear_rejects_short_prefix() {
        let cfg = cfg(4, 6, 2);
        let pulse = PulseSpec::raised_cosine(0.3, 1e-6).unwrap();
        let spec = ChannelSpec::new(
            vec![Scatterer::on_grid(c(1.0, 0.0), 3.0, 0.0, &cfg).unwrap()],
            0.0,
        )
        .unwrap();
        let x_cp = vec![c(0.0, 0.0); 26];
        assert_eq!(
            apply_channel_linear(&x_cp, &spec, &pulse, &cfg),
            Err(OtfsError::CyclicPrefixTooShort {
                required: 3,
                available: 2
            })
        );
        // Fractional delays also need the causal half of the pulse window.
        let frac = ChannelSpec::new(
            vec![Scatterer::on_grid(c(1.0, 0.0), 0.5, 0.0, &cfg).unwrap()],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            apply_channel_linear(&x_cp, &frac, &pulse, &cfg),
            Err(OtfsError::CyclicPrefixTooShort { required: 3, .. })
        ));
    }

    #[test]
    fn empty_channel_is_silent() {
        let cfg = cfg(2, 4, 1);
        let pulse = PulseSpec::raised_cosine(0.3, 1e-6).unwrap();
        let spec = ChannelSpec::new(vec![], 0.0).unwrap();
        let out = apply_channel_linear(&[c(1.0, 1.0); 9], &spec, &pulse, &cfg).unwrap();
        assert!(out.iter().all(|v| *v == Complex64::default()));
    }

    #[test]
    fn awgn_is_seeded_and_scaled() {
        let y = PeriodicSequence::zeros(100_000);
        assert_eq!(add_awgn(&y, 0.0, 7), y);
        let a = add_awgn(&y, 0.5, 7);
        assert_eq!(a, add_awgn(&y, 0.5, 7));
        assert_ne!(a, add_awgn(&y, 0.5, 8));
        let var = a.energy() / 100_000.0;
        assert!((var / 0.5 - 1.0).abs() < 0.03, "variance {var}");
        let re: f64 = a.samples().iter().map(|v| v.re * v.re).sum::<f64>() / 100_000.0;
        assert!((re / 0.25 - 1.0).abs() < 0.03);
    }

    #[test]
    fn mismatched_symbol_period_is_rejected() {
        let cfg = cfg(2, 4, 0);
        let pulse = PulseSpec::raised_cosine(0.3, 2e-6).unwrap();
        let x = PeriodicSequence::zeros(8);
        assert!(apply_channel_circular(&x, &ChannelSpec::identity(), &pulse, &cfg, None).is_err());
    }

    #[test]
    fn scatterer_validation_and_json() {
        assert!(Scatterer::new(c(1.0, 0.0), -1e-9, 0.0).is_err());
        let json = r#"{"scatterers":[{"gain_re":0.5,"gain_im":-0.5,"delay_s":1e-7,"doppler_hz":-120.0}],"n0":0.01}"#;
        let spec: ChannelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.scatterers[0].gain(), c(0.5, -0.5));
        assert_eq!(spec.scatterers[0].doppler(), -120.0);
        let back: ChannelSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"scatterers":[{"gain_re":1,"gain_im":0,"delay_s":-1,"doppler_hz":0}]}"#;
        assert!(serde_json::from_str::<ChannelSpec>(bad).is_err());
        let unknown = r#"{"scatterers":[],"n0":0,"extra":1}"#;
        assert!(serde_json::from_str::<ChannelSpec>(unknown).is_err());
    }

    #[test]
    fn tdl_e_scenario_shape() {
        let params = TdlEParams::mmwave_rural();
        let spec = tdl_e_scenario(11, &params).unwrap();
        assert_eq!(spec.scatterers.len(), 14);
        assert_eq!(spec, tdl_e_scenario(11, &params).unwrap());
        assert_ne!(spec, tdl_e_scenario(12, &params).unwrap());
        let los = spec.scatterers[0];
        assert_eq!((los.delay(), los.doppler()), (0.0, 0.0));
        let nu_max = params.max_doppler();
        assert!(spec.scatterers.iter().all(|s| s.doppler().abs() <= nu_max));
        let power: f64 = spec.scatterers.iter().map(|s| s.gain().norm_sqr()).sum();
        assert!((power - 1.0).abs() < 1e-12);
        let rms = rms_delay_spread(
            spec.scatterers[1..]
                .iter()
                .map(|s| (s.delay(), s.gain().norm_sqr())),
        );
        assert!((rms / 300e-9 - 1.0).abs() < 0.01);
    }
}
