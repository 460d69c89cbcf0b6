//! Simulation of single-carrier links over mediumband multipath channels.
//!
//! The signal-processing core (pulses, channel model, timing search,
//! waveform synthesis and detection) is generic over the floating-point
//! type; the Monte Carlo [`harness`] works in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod detection;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod scalar;
pub mod timing;
pub mod waveform;

pub use channel::{classify_band, BandClass, MultipathChannel};
pub use detection::{build_channel_matrix, ChannelMatrix, DetectionResult, MmseSolver};
pub use dsp::PulseConfig;
pub use error::{Error, Result};
pub use scalar::Real;
pub use timing::{
    desired_fading_factor, estimate_offsets, find_offset, FadingFactor, SearchParams, TimingMode, TimingOffsets,
};
pub use waveform::{Constellation, Frame, Modulation, ReceivedFrame};

pub type C64 = num_complex::Complex<f64>;
pub type PulseConfig64 = PulseConfig<f64>;
pub type MultipathChannel64 = MultipathChannel<f64>;
pub type ChannelMatrix64 = ChannelMatrix<f64>;
pub type Frame64 = Frame<f64>;
pub type Constellation64 = Constellation<f64>;
