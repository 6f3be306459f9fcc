//! Delay-Doppler signal processing built on the discrete Zak transform.
//!
//! The crate covers the transform itself ([`zak`]), Nyquist and windowed
//! pulses ([`pulses`]), the OTFS-over-OFDM overlay ([`overlay`]), a discrete
//! time-frequency dispersive channel ([`channel`]) and the OTFS modem with its
//! closed-form delay-Doppler input-output relation ([`modem`]).

pub mod channel;
pub mod error;
mod fft;
pub mod modem;
pub mod overlay;
pub mod pulses;
pub mod zak;

#[cfg(test)]
mod testutil;

pub use channel::{ChannelSpec, Scatterer, TdlEParams};
pub use error::{OtfsError, Result};
pub use modem::{DdChannel, FrameConfig, SpreadMap};
pub use overlay::TfFrame;
pub use pulses::{PulseFamily, PulseSpec};
pub use zak::{GridShape, PeriodicSequence, Spectrum, ZakGrid};
