//! OTFS transmit/receive chain and the closed-form delay-Doppler input-output
//! relation.
//!
//! The transmitter maps a DD grid to samples with the IDZT and prepends a
//! cyclic prefix; the receiver applies the DZT to the prefix-stripped samples.
//! For a channel of scatterers `(alpha_p, tau_p, nu_p)` the received grid is
//!
//! ```text
//! Z_y = sum_p alpha_p e^{j 2 pi nu_p tau_p} (Z_x (*)_k Z_{u_p}) (*)_n Z_{h_p}
//! ```
//!
//! with `u_p[n] = e^{j 2 pi k_p n / (KL)}` and `h_p` the sampled, delayed pulse.
//! [`DdChannel`] evaluates that relation without leaving the Zak domain.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::channel::{
    add_awgn, doppler_index, doppler_phasor, stream_rng, ChannelSpec, SYMBOL_STREAM,
};
use crate::error::{invalid, OtfsError, Result};
use crate::pulses::{sample_delayed_nyquist, PulseSpec, INTEGER_TOLERANCE};
use crate::zak::{dzt, idzt, zak_convolve, zak_modulate, GridShape, PeriodicSequence, ZakGrid};

/// Default display floor for spread maps, in dB.
pub const DEFAULT_DB_FLOOR: f64 = -60.0;

/// Frame geometry: grid shape, modulation interval `T` and cyclic prefix length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRecord", into = "FrameRecord")]
pub struct FrameConfig {
    shape: GridShape,
    symbol_period: f64,
    cp_len: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRecord {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "T_s")]
    t_s: f64,
    #[serde(rename = "Lcp", default)]
    lcp: usize,
}

impl TryFrom<FrameRecord> for FrameConfig {
    type Error = OtfsError;

    fn try_from(r: FrameRecord) -> Result<Self> {
        FrameConfig::new(GridShape::new(r.k, r.l)?, r.t_s, r.lcp)
    }
}

impl From<FrameConfig> for FrameRecord {
    fn from(c: FrameConfig) -> Self {
        Self {
            k: c.shape.k(),
            l: c.shape.l(),
            t_s: c.symbol_period,
            lcp: c.cp_len,
        }
    }
}

impl FrameConfig {
    pub fn new(shape: GridShape, symbol_period: f64, cp_len: usize) -> Result<Self> {
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(invalid(
                "symbol_period",
                format!("{symbol_period} must be positive"),
            ));
        }
        if cp_len >= shape.period() {
            return Err(invalid(
                "cp_len",
                format!("{cp_len} must be below the frame length {}", shape.period()),
            ));
        }
        Ok(Self {
            shape,
            symbol_period,
            cp_len,
        })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// `1 / (KLT)` in Hz.
    pub fn doppler_resolution(&self) -> f64 {
        1.0 / (self.shape.period() as f64 * self.symbol_period)
    }

    /// `T` in seconds.
    pub fn delay_resolution(&self) -> f64 {
        self.symbol_period
    }

    pub fn with_cp_len(&self, cp_len: usize) -> Result<Self> {
        Self::new(self.shape, self.symbol_period, cp_len)
    }
}

/// IDZT of the DD grid with the last `Lcp` samples copied in front.
pub fn transmit(z: &ZakGrid, cfg: &FrameConfig) -> Result<Vec<Complex64>> {
    z.shape().ensure_same(&cfg.shape)?;
    let x = idzt(z);
    let body = x.samples();
    let n = body.len();
    let mut out = Vec::with_capacity(n + cfg.cp_len);
    out.extend_from_slice(&body[n - cfg.cp_len..]);
    out.extend_from_slice(body);
    Ok(out)
}

/// Unit-energy QPSK symbols on every DD bin, drawn from the symbol stream of `seed`.
pub fn random_qpsk(shape: GridShape, seed: u64) -> ZakGrid {
    let mut rng = stream_rng(seed, SYMBOL_STREAM);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    ZakGrid::from_fn(shape, |_, _| {
        let re = if rng.random::<bool>() { a } else { -a };
        let im = if rng.random::<bool>() { a } else { -a };
        Complex64::new(re, im)
    })
}

/// DZT of prefix-stripped samples.
pub fn receive(y: &PeriodicSequence, cfg: &FrameConfig) -> Result<ZakGrid> {
    dzt(y, cfg.shape)
}

/// Periodic sinc `V[d] = 1/sqrt(K) sum_{l<K} e^{-j 2 pi d l / K}`.
///
/// Integer arguments are exact: `sqrt(K)` when `d` is a multiple of `K` and
/// zero otherwise.
pub fn dirichlet(delta: f64, k: usize) -> Complex64 {
    let kf = k as f64;
    let rounded = delta.round();
    if (delta - rounded).abs() < INTEGER_TOLERANCE {
        let r = rounded as i64;
        return if r.rem_euclid(k as i64) == 0 {
            Complex64::new(kf.sqrt(), 0.0)
        } else {
            Complex64::default()
        };
    }
    let ratio = reduced_sin_pi(delta) / reduced_sin_pi(delta / kf);
    let phase = -PI * (kf - 1.0) * delta.rem_euclid(2.0 * kf) / kf;
    Complex64::from_polar(ratio / kf.sqrt(), phase)
}

/// `sin(pi x)` evaluated after removing the nearest integer, so that zeros
/// at integer `x` stay accurate for large arguments.
fn reduced_sin_pi(x: f64) -> f64 {
    let r = x.round();
    let s = (PI * (x - r)).sin();
    if (r as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// `V[k - k_p]` for `k = 0..K`.
pub fn doppler_kernel(k_p: f64, k: usize) -> Vec<Complex64> {
    (0..k).map(|i| dirichlet(i as f64 - k_p, k)).collect()
}

/// Closed-form DZT of `u_p[n] = e^{j 2 pi k_p n / (KL)}`:
/// `Z[n,k] = e^{j 2 pi k_p n / (KL)} V[k - k_p]`.
pub fn doppler_spread_dzt(k_p: f64, shape: GridShape) -> ZakGrid {
    let kernel = doppler_kernel(k_p, shape.k());
    let period = shape.period();
    ZakGrid::from_fn(shape, |n, k| {
        doppler_phasor(k_p, n as i64, period) * kernel[k]
    })
}

#[derive(Debug, Clone)]
struct PathKernel {
    gain: Complex64,
    doppler: ZakGrid,
    delay: ZakGrid,
}

/// Per-scatterer Zak-domain kernels, computed once and applied to any number of
/// input grids.
#[derive(Debug, Clone)]
pub struct DdChannel {
    cfg: FrameConfig,
    paths: Vec<PathKernel>,
}

impl DdChannel {
    pub fn new(spec: &ChannelSpec, pulse: &PulseSpec, cfg: &FrameConfig) -> Result<Self> {
        let (a, b) = (pulse.symbol_period(), cfg.symbol_period);
        if (a - b).abs() > 1e-12 * a.max(b) {
            return Err(invalid(
                "symbol_period",
                format!("pulse uses T = {a} s but the frame uses T = {b} s"),
            ));
        }
        let paths = spec
            .scatterers
            .iter()
            .map(|s| {
                let h = sample_delayed_nyquist(pulse, s.delay(), cfg.shape)?;
                Ok(PathKernel {
                    gain: s.effective_gain(),
                    doppler: doppler_spread_dzt(doppler_index(s.doppler(), cfg), cfg.shape),
                    delay: dzt(&h, cfg.shape)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cfg: *cfg, paths })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    /// Zak-domain Doppler kernel `Z_{u_p}` of path `p`.
    pub fn doppler_grid(&self, p: usize) -> &ZakGrid {
        &self.paths[p].doppler
    }

    /// Zak-domain delay kernel `Z_{h_p}` of path `p`.
    pub fn delay_grid(&self, p: usize) -> &ZakGrid {
        &self.paths[p].delay
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Noiseless DD output for input grid `z`.
    pub fn apply(&self, z: &ZakGrid) -> Result<ZakGrid> {
        z.shape().ensure_same(&self.cfg.shape)?;
        let mut out = ZakGrid::zeros(self.cfg.shape);
        for p in 0..self.paths.len() {
            out = &out + &self.apply_path(z, p)?;
        }
        Ok(out)
    }

    /// Contribution of path `p` alone.
    pub fn apply_path(&self, z: &ZakGrid, p: usize) -> Result<ZakGrid> {
        let path = &self.paths[p];
        let modulated = zak_modulate(z, &path.doppler)?;
        Ok(zak_convolve(&modulated, &path.delay)?.scale(path.gain))
    }
}

/// Noiseless DD-domain channel output.
pub fn dd_response(
    z: &ZakGrid,
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
) -> Result<ZakGrid> {
    DdChannel::new(spec, pulse, cfg)?.apply(z)
}

/// DD output with noise drawn in the time domain (variance `spec.n0` per
/// sample) and mapped through the DZT.
pub fn dd_response_noisy(
    z: &ZakGrid,
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
    seed: u64,
) -> Result<ZakGrid> {
    let clean = dd_response(z, spec, pulse, cfg)?;
    if spec.n0 <= 0.0 {
        return Ok(clean);
    }
    let noise = add_awgn(&PeriodicSequence::zeros(cfg.shape.period()), spec.n0, seed);
    Ok(&clean + &dzt(&noise, cfg.shape)?)
}

/// DD response to a single unit symbol, in linear and dB form.
#[derive(Debug, Clone)]
pub struct SpreadMap {
    pub probe: (usize, usize),
    pub response: ZakGrid,
    /// `L x K`, `20 log10 |Z|` clamped below at the floor.
    pub db: Array2<f64>,
    pub floor_db: f64,
}

pub fn dd_spread_map(
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
    probe: (usize, usize),
    floor_db: f64,
) -> Result<SpreadMap> {
    let input = ZakGrid::one_hot(cfg.shape, probe.0, probe.1)?;
    let response = dd_response(&input, spec, pulse, cfg)?;
    let db = response.magnitude().mapv(|m| to_db(m, floor_db));
    Ok(SpreadMap {
        probe,
        response,
        db,
        floor_db,
    })
}

fn to_db(magnitude: f64, floor_db: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(floor_db)
    } else {
        floor_db
    }
}

/// Energy per delay bin (summed over Doppler), length `L`.
pub fn delay_energy_profile(z: &ZakGrid) -> Vec<f64> {
    z.values()
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|v| v.norm_sqr()).sum())
        .collect()
}

/// Energy per Doppler bin (summed over delay), length `K`, in storage order.
pub fn doppler_energy_profile(z: &ZakGrid) -> Vec<f64> {
    z.values()
        .columns()
        .into_iter()
        .map(|col| col.iter().map(|v| v.norm_sqr()).sum())
        .collect()
}

/// Signed Doppler bin for display: indices above `K/2` map to `k - K`.
pub fn centered_doppler_bin(k: usize, k_len: usize) -> i64 {
    if k > k_len / 2 {
        k as i64 - k_len as i64
    } else {
        k as i64
    }
}

/// Circular distance between delay bins on a ring of `L` bins.
pub fn delay_distance(a: usize, b: usize, l_len: usize) -> usize {
    let d = a.abs_diff(b) % l_len;
    d.min(l_len - d)
}

/// Energy of `z` in delay rows farther than `half_width` bins from `center`.
pub fn delay_interference_energy(z: &ZakGrid, center: usize, half_width: usize) -> f64 {
    let l_len = z.shape().l();
    delay_energy_profile(z)
        .iter()
        .enumerate()
        .filter(|(n, _)| delay_distance(*n, center, l_len) > half_width)
        .map(|(_, e)| e)
        .sum()
}

/// Delay-domain interference of a one-hot probe, evaluated path by path: each
/// path's response is centred on `probe.0 + round(tau_p / T)` and its energy
/// beyond `half_width` delay bins is summed over paths.
pub fn per_path_delay_interference(
    spec: &ChannelSpec,
    pulse: &PulseSpec,
    cfg: &FrameConfig,
    probe: (usize, usize),
    half_width: usize,
) -> Result<f64> {
    let channel = DdChannel::new(spec, pulse, cfg)?;
    let input = ZakGrid::one_hot(cfg.shape, probe.0, probe.1)?;
    let l_len = cfg.shape.l() as i64;
    let mut total = 0.0;
    for (p, s) in spec.scatterers.iter().enumerate() {
        let response = channel.apply_path(&input, p)?;
        let shift = (s.delay() / cfg.symbol_period).round() as i64;
        let center = (probe.0 as i64 + shift).rem_euclid(l_len) as usize;
        total += delay_interference_energy(&response, center, half_width);
    }
    Ok(total)
}
