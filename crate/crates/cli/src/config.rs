use std::path::{Path, PathBuf};

use otfs_core::channel::tdl_e_scenario;
use otfs_core::modem::DEFAULT_DB_FLOOR;
use otfs_core::{ChannelSpec, FrameConfig, PulseFamily, PulseSpec, TdlEParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// JSON run description shared by `spread`, `simulate` and `overlay-check`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub frame: FrameConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    /// Parameters for `"channel": "tdl-e"`; defaults to the 28 GHz rural setup.
    #[serde(default, rename = "tdl-e")]
    pub tdl_e: Option<TdlEParams>,
    #[serde(default)]
    pub probe: Option<(usize, usize)>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_floor")]
    pub db_floor: f64,
    #[serde(default)]
    pub dirichlet: DirichletConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub overlay: OverlayConfig,
}

fn default_floor() -> f64 {
    DEFAULT_DB_FLOOR
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub family: PulseFamily,
    #[serde(default)]
    pub beta: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            family: PulseFamily::RaisedCosine,
            beta: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelConfig {
    Named(String),
    Inline(ChannelSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletConfig {
    /// Fractional Doppler offsets per bin in the exported kernel.
    pub oversample: usize,
}

impl Default for DirichletConfig {
    fn default() -> Self {
        Self { oversample: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulateMode {
    Circular,
    Linear,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolSource {
    Qpsk,
    Probe,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: SimulateMode,
    pub symbols: SymbolSource,
    pub residual_tolerance: f64,
    pub linear_tolerance: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            mode: SimulateMode::Circular,
            symbols: SymbolSource::Qpsk,
            residual_tolerance: 1e-10,
            linear_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OverlayPulse {
    Rectangular,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReceivePulse {
    /// Same pulse as the transmitter.
    Matched,
    /// Biorthogonal dual constructed from the transmit pulse.
    Dual,
    Rectangular,
    Gaussian {
        sigma: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    pub transmit: OverlayPulse,
    pub receive: ReceivePulse,
    pub tolerance: f64,
}

impl Default for OverlayConfig {
    fn default() -> Self {
        Self {
            transmit: OverlayPulse::Rectangular,
            receive: ReceivePulse::Matched,
            tolerance: 1e-10,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn pulse_spec(&self) -> Result<PulseSpec, CliError> {
        Ok(PulseSpec::new(
            self.pulse.family,
            self.pulse.beta,
            self.frame.symbol_period(),
        )?)
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec, CliError> {
        match &self.channel {
            None => Ok(ChannelSpec::identity()),
            Some(ChannelConfig::Inline(spec)) => Ok(spec.clone()),
            Some(ChannelConfig::Named(name)) if name == "tdl-e" => {
                let params = self.tdl_e.clone().unwrap_or_else(TdlEParams::mmwave_rural);
                Ok(tdl_e_scenario(self.seed, &params)?)
            }
            Some(ChannelConfig::Named(name)) => Err(CliError::Config(format!(
                "unknown channel model `{name}` (expected \"tdl-e\" or an inline scatterer list)"
            ))),
        }
    }

    /// Maximum Doppler the channel model was built for: the TDL-E bound when
    /// that model is used, otherwise the largest scatterer Doppler.
    pub fn max_doppler(&self, spec: &ChannelSpec) -> f64 {
        match &self.channel {
            Some(ChannelConfig::Named(_)) => self
                .tdl_e
                .clone()
                .unwrap_or_else(TdlEParams::mmwave_rural)
                .max_doppler(),
            _ => spec.max_abs_doppler(),
        }
    }

    pub fn probe(&self) -> (usize, usize) {
        self.probe.unwrap_or((self.frame.shape().l() / 2, 0))
    }

    /// SHA-256 of the effective configuration as canonical JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration serializes");
        hex::encode(Sha256::digest(json))
    }
}
