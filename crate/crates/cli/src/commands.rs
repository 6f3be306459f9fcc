use std::path::{Path, PathBuf};

use num_complex::Complex64;
use otfs_core::channel::{apply_channel_circular, apply_channel_linear, doppler_index};
use otfs_core::modem::{
    centered_doppler_bin, dd_response, dd_spread_map, delay_energy_profile, dirichlet,
    doppler_energy_profile, random_qpsk, receive, transmit,
};
use otfs_core::overlay::{
    biorthogonality_defect, dual_pulse, isfft, ofdm_modulate, overlay_product, overlay_roundtrip,
    sfft,
};
use otfs_core::pulses::{gaussian_window, rectangular_pulse};
use otfs_core::zak::{dzt, idzt};
use otfs_core::{GridShape, PeriodicSequence, TfFrame, ZakGrid};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{OverlayPulse, ReceivePulse, RunConfig, SimulateMode, SymbolSource};
use crate::csvio::{
    cells_to_array, matrix_rows, read_complex_table, sequence_rows, write_csv, ComplexTable,
};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Direction {
    Dzt,
    Idzt,
    Isfft,
    Sfft,
}

impl Direction {
    fn name(self) -> &'static str {
        match self {
            Direction::Dzt => "dzt",
            Direction::Idzt => "idzt",
            Direction::Isfft => "isfft",
            Direction::Sfft => "sfft",
        }
    }
}

fn db(magnitude: f64, floor: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(floor)
    } else {
        floor
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn transform(
    input: &Path,
    direction: Direction,
    shape: GridShape,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let bytes = std::fs::read(input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
    let hash = hex::encode(Sha256::digest(
        serde_json::to_vec(&json!({
            "command": "transform",
            "direction": direction.name(),
            "K": shape.k(),
            "L": shape.l(),
            "input_sha256": hex::encode(Sha256::digest(&bytes)),
        }))
        .expect("hash input serializes"),
    ));
    let table = read_complex_table(input)?;
    let path = out.join(format!("{}.csv", direction.name()));
    match (direction, table) {
        (Direction::Dzt, ComplexTable::Sequence(samples)) => {
            let z = dzt(&PeriodicSequence::new(samples)?, shape)?;
            write_csv(
                &path,
                &hash,
                &["n", "k", "re", "im"],
                matrix_rows(z.values()),
            )?;
        }
        (Direction::Idzt, ComplexTable::Grid(cells)) => {
            let z = ZakGrid::new(shape, cells_to_array(&cells, shape.l(), shape.k())?)?;
            write_csv(
                &path,
                &hash,
                &["n", "re", "im"],
                sequence_rows(idzt(&z).samples()),
            )?;
        }
        (Direction::Isfft, ComplexTable::Grid(cells)) => {
            let z = ZakGrid::new(shape, cells_to_array(&cells, shape.l(), shape.k())?)?;
            write_csv(
                &path,
                &hash,
                &["m", "l", "re", "im"],
                matrix_rows(isfft(&z).symbols()),
            )?;
        }
        (Direction::Sfft, ComplexTable::Frame(cells)) => {
            let frame = TfFrame::new(shape, cells_to_array(&cells, shape.k(), shape.l())?)?;
            write_csv(
                &path,
                &hash,
                &["n", "k", "re", "im"],
                matrix_rows(sfft(&frame).values()),
            )?;
        }
        (d, _) => {
            let expected = match d {
                Direction::Dzt => "a sequence (n,re,im)",
                Direction::Idzt | Direction::Isfft => "a grid (n,k,re,im)",
                Direction::Sfft => "a frame (m,l,re,im)",
            };
            return Err(CliError::Config(format!("{} expects {expected}", d.name())));
        }
    }
    Ok(vec![path])
}

#[derive(Serialize)]
struct ScattererSummary {
    gain_re: f64,
    gain_im: f64,
    delay_s: f64,
    doppler_hz: f64,
    delay_bins: f64,
    k_p: f64,
}

#[derive(Serialize)]
struct SpreadSummary {
    config_sha256: String,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    doppler_resolution_hz: f64,
    delay_resolution_s: f64,
    max_doppler_hz: f64,
    probe: (usize, usize),
    scatterers: Vec<ScattererSummary>,
    /// Energy per delay row, `n = 0..L`.
    delay_energy: Vec<f64>,
    /// `(k, energy)` in centered Doppler order.
    doppler_energy: Vec<(i64, f64)>,
    total_energy: f64,
    cells_above_floor: usize,
    db_floor: f64,
}

fn centered_order(k_len: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..k_len).collect();
    order.sort_by_key(|&k| centered_doppler_bin(k, k_len));
    order
}

pub fn spread(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let hash = cfg.hash();
    let frame = &cfg.frame;
    let shape = frame.shape();
    let spec = cfg.channel_spec()?;
    let pulse = cfg.pulse_spec()?;
    let probe = cfg.probe();
    let map = dd_spread_map(&spec, &pulse, frame, probe, cfg.db_floor)?;
    let order = centered_order(shape.k());

    let map_path = out.join("spread_map.csv");
    let rows = (0..shape.l()).flat_map(|n| {
        let map = &map;
        order.iter().map(move |&k| {
            vec![
                n.to_string(),
                centered_doppler_bin(k, shape.k()).to_string(),
                map.db[[n, k]].to_string(),
            ]
        })
    });
    write_csv(&map_path, &hash, &["n", "k", "db"], rows)?;

    let os = cfg.dirichlet.oversample.max(1);
    let kernel_path = out.join("dirichlet.csv");
    let kernel_rows = (0..shape.k() * os).map(|i| {
        let delta = i as f64 / os as f64;
        vec![
            delta.to_string(),
            db(dirichlet(delta, shape.k()).norm(), cfg.db_floor).to_string(),
        ]
    });
    write_csv(&kernel_path, &hash, &["delta", "db"], kernel_rows)?;

    let doppler = doppler_energy_profile(&map.response);
    let summary = SpreadSummary {
        config_sha256: hash.clone(),
        k: shape.k(),
        l: shape.l(),
        doppler_resolution_hz: frame.doppler_resolution(),
        delay_resolution_s: frame.delay_resolution(),
        max_doppler_hz: cfg.max_doppler(&spec),
        probe,
        scatterers: spec
            .scatterers
            .iter()
            .map(|s| ScattererSummary {
                gain_re: s.gain().re,
                gain_im: s.gain().im,
                delay_s: s.delay(),
                doppler_hz: s.doppler(),
                delay_bins: s.delay() / frame.symbol_period(),
                k_p: doppler_index(s.doppler(), frame),
            })
            .collect(),
        delay_energy: delay_energy_profile(&map.response),
        doppler_energy: order
            .iter()
            .map(|&k| (centered_doppler_bin(k, shape.k()), doppler[k]))
            .collect(),
        total_energy: map.response.energy(),
        cells_above_floor: map.db.iter().filter(|v| **v > cfg.db_floor).count(),
        db_floor: cfg.db_floor,
    };
    let summary_path = out.join("spread_summary.json");
    write_json(&summary_path, &summary)?;
    Ok(vec![map_path, kernel_path, summary_path])
}

#[derive(Serialize)]
struct SimulateReport {
    config_sha256: String,
    mode: SimulateMode,
    seed: u64,
    n0: f64,
    /// `max |Z_y - dd_response|` for the noiseless circular channel.
    oracle_residual: f64,
    residual_tolerance: f64,
    /// `max |y_linear - y_circular|` over time samples, when the linear path ran.
    linear_vs_circular: Option<f64>,
    linear_tolerance: f64,
    cp_len: usize,
    /// Mean signal energy per DD bin divided by `N0`, in dB.
    mean_snr_db: Option<f64>,
    /// Per-bin `|dd_response|^2 / N0` in dB, row-major `L x K`.
    per_bin_snr_db: Option<Vec<f64>>,
    /// Measured mean `|Z_y - dd_response|^2` over the grid.
    measured_noise_variance: f64,
    signal_energy: f64,
}

pub fn simulate(cfg: &RunConfig, out: &Path, strict: bool) -> Result<Vec<PathBuf>, CliError> {
    let hash = cfg.hash();
    let frame = &cfg.frame;
    let shape = frame.shape();
    let spec = cfg.channel_spec()?;
    let pulse = cfg.pulse_spec()?;
    let sim = &cfg.simulate;
    let z = match sim.symbols {
        SymbolSource::Qpsk => random_qpsk(shape, cfg.seed),
        SymbolSource::Probe => {
            let (n, k) = cfg.probe();
            ZakGrid::one_hot(shape, n, k)?
        }
    };
    let reference = dd_response(&z, &spec, &pulse, frame)?;
    let x = idzt(&z);
    let clean = apply_channel_circular(&x, &spec, &pulse, frame, None)?;
    let oracle_residual = receive(&clean, frame)?.max_abs_diff(&reference);

    let linear = match sim.mode {
        SimulateMode::Circular => None,
        SimulateMode::Linear | SimulateMode::Both => Some(apply_channel_linear(
            &transmit(&z, frame)?,
            &spec,
            &pulse,
            frame,
        )?),
    };
    let linear_vs_circular = linear.as_ref().map(|y| max_abs_diff(y, clean.samples()));

    let noisy = apply_channel_circular(&x, &spec, &pulse, frame, Some(cfg.seed))?;
    let received_time = match (sim.mode, &linear) {
        (SimulateMode::Linear, Some(y)) => {
            let noise: Vec<Complex64> = noisy
                .samples()
                .iter()
                .zip(clean.samples())
                .map(|(a, b)| a - b)
                .collect();
            PeriodicSequence::new(y.iter().zip(&noise).map(|(a, b)| a + b).collect())?
        }
        _ => noisy,
    };
    let received = receive(&received_time, frame)?;
    let bins = shape.period() as f64;
    let measured_noise_variance = received
        .values()
        .iter()
        .zip(reference.values().iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / bins;
    let n0 = spec.n0;
    let (mean_snr_db, per_bin_snr_db) = if n0 > 0.0 {
        (
            Some(10.0 * (reference.energy() / bins / n0).log10()),
            Some(
                reference
                    .values()
                    .iter()
                    .map(|v| 10.0 * (v.norm_sqr() / n0).log10())
                    .collect(),
            ),
        )
    } else {
        (None, None)
    };
    let report = SimulateReport {
        config_sha256: hash.clone(),
        mode: sim.mode,
        seed: cfg.seed,
        n0,
        oracle_residual,
        residual_tolerance: sim.residual_tolerance,
        linear_vs_circular,
        linear_tolerance: sim.linear_tolerance,
        cp_len: frame.cp_len(),
        mean_snr_db,
        per_bin_snr_db,
        measured_noise_variance,
        signal_energy: reference.energy(),
    };
    let report_path = out.join("simulate_report.json");
    write_json(&report_path, &report)?;
    let grid_path = out.join("received.csv");
    write_csv(
        &grid_path,
        &hash,
        &["n", "k", "re", "im"],
        matrix_rows(received.values()),
    )?;

    if strict {
        if oracle_residual > sim.residual_tolerance {
            return Err(CliError::Contract(format!(
                "DD relation residual {oracle_residual:e} exceeds {:e}",
                sim.residual_tolerance
            )));
        }
        if let Some(d) = linear_vs_circular.filter(|d| *d > sim.linear_tolerance) {
            return Err(CliError::Contract(format!(
                "linear and circular channels differ by {d:e} (limit {:e})",
                sim.linear_tolerance
            )));
        }
    }
    Ok(vec![report_path, grid_path])
}

fn overlay_pulse(p: OverlayPulse, shape: GridShape) -> Result<PeriodicSequence, CliError> {
    match p {
        OverlayPulse::Rectangular => Ok(rectangular_pulse(shape)),
        OverlayPulse::Gaussian { sigma } if sigma.is_finite() && sigma > 0.0 => {
            Ok(gaussian_window(shape, sigma))
        }
        OverlayPulse::Gaussian { sigma } => Err(CliError::Config(format!(
            "gaussian sigma {sigma} must be positive"
        ))),
    }
}

#[derive(Serialize)]
struct OverlayReport {
    config_sha256: String,
    inner_product_defect: f64,
    zak_product_defect: f64,
    /// `max |overlay chain - K L Z Z_g conj(Z_gamma)|`.
    chain_residual: f64,
    /// `max |overlay chain - Z|`.
    recovery_residual: f64,
    /// `max |ofdm_modulate(isfft(Z), g) - idzt(Z)|`.
    idzt_equivalence_residual: f64,
    biorthogonal: bool,
    tolerance: f64,
}

pub fn overlay_check(cfg: &RunConfig, out: &Path, strict: bool) -> Result<Vec<PathBuf>, CliError> {
    let hash = cfg.hash();
    let shape = cfg.frame.shape();
    let settings = &cfg.overlay;
    let g = overlay_pulse(settings.transmit, shape)?;
    let gamma = match settings.receive {
        ReceivePulse::Matched => g.clone(),
        ReceivePulse::Dual => dual_pulse(&g, shape)?,
        ReceivePulse::Rectangular => rectangular_pulse(shape),
        ReceivePulse::Gaussian { sigma } => overlay_pulse(OverlayPulse::Gaussian { sigma }, shape)?,
    };
    let z = random_qpsk(shape, cfg.seed);
    let defect = biorthogonality_defect(&g, &gamma, shape)?;
    let chain = overlay_roundtrip(&z, &g, &gamma)?;
    let report = OverlayReport {
        config_sha256: hash,
        inner_product_defect: defect.inner_product,
        zak_product_defect: defect.zak_product,
        chain_residual: chain.max_abs_diff(&overlay_product(&z, &g, &gamma)?),
        recovery_residual: chain.max_abs_diff(&z),
        idzt_equivalence_residual: ofdm_modulate(&isfft(&z), &g)?.max_abs_diff(&idzt(&z)),
        biorthogonal: defect.inner_product <= settings.tolerance,
        tolerance: settings.tolerance,
    };
    let path = out.join("overlay_report.json");
    write_json(&path, &report)?;
    if strict {
        if report.chain_residual > settings.tolerance {
            return Err(CliError::Contract(format!(
                "overlay chain deviates from the Zak product by {:e}",
                report.chain_residual
            )));
        }
        let expects_recovery =
            matches!(settings.receive, ReceivePulse::Dual) || report.biorthogonal;
        if expects_recovery && report.recovery_residual > settings.tolerance {
            return Err(CliError::Contract(format!(
                "biorthogonal pair fails to recover the symbols: residual {:e}",
                report.recovery_residual
            )));
        }
    }
    Ok(vec![path])
}
