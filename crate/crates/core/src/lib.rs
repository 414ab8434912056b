//! Threshold-inverter-quantization (TIQ) flash ADC toolkit.
//!
//! The crate sizes a bank of `2^n - 1` inverter comparators from the
//! square-law switching-threshold equation, builds the one-hot generator and
//! fat-tree encoder as gate netlists, simulates the analog-in/binary-out
//! pipeline and reports converter metrics.
//!
//! Module map:
//!
//! - [`devices`]: process parameters, inverter threshold, VTC solver, gain,
//!   temperature scaling
//! - [`synthesis`]: reference ladder and transistor width search
//! - [`codes`]: thermometer / one-hot / binary codes and the fat-tree encoder
//! - [`simulator`]: stimulus generation and end-to-end conversion traces
//! - [`metrics`]: DNL/INL, full-scale range, temperature drift, latency bound
//! - [`netlist_io`]: SPICE emission, design JSON, gate-netlist text format

pub mod codes;
pub mod devices;
mod error;
pub mod metrics;
pub mod netlist_io;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
