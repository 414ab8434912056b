//! Persistence and interchange formats.
//!
//! | extension | content                        |
//! |-----------|--------------------------------|
//! | `.cir`    | SPICE netlist of the bank      |
//! | `.json`   | sized comparator bank          |
//! | `.fnet`   | gate netlist of the encoder    |
//! | `.csv`    | traces and reports             |

mod design;
mod gates;
mod spice;

pub use design::{load_design, save_design};
pub use gates::{netlist_from_text, netlist_to_text};
pub use spice::{emit_spice, GateStyle, SpiceEmitOptions};

/// Extension of SPICE netlists.
pub const SPICE_EXT: &str = "cir";
/// Extension of design documents.
pub const DESIGN_EXT: &str = "json";
/// Extension of gate netlists.
pub const GATE_NETLIST_EXT: &str = "fnet";
