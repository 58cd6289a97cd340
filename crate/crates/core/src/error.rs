use thiserror::Error;

use crate::cells::{CellKind, OutputPort};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input to {kind}: {reason}")]
    InvalidInput { kind: CellKind, reason: &'static str },

    #[error("{kind} has no {port} output")]
    InvalidOutput { kind: CellKind, port: OutputPort },

    #[error("malformed netlist `{netlist}`: {reason}")]
    Netlist { netlist: String, reason: String },

    #[error("width {0} is outside 1..=64")]
    InvalidWidth(u32),

    #[error("value {bits:#x} does not fit in {width} bits")]
    ValueOutOfRange { width: u32, bits: u64 },

    #[error("operand widths differ ({left} vs {right})")]
    WidthMismatch { left: u32, right: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell at position {position} produced a second carry bit, which a ripple chain cannot propagate")]
    UnsupportedConfiguration { position: u32 },

    #[error("exhaustive domain of 2^{log2_size} inputs exceeds the 2^26 limit; use Monte Carlo")]
    DomainTooLarge { log2_size: u32 },

    #[error("argument {value} is outside the hyperbolic convergence range ±{bound}")]
    Domain { value: f64, bound: f64 },
}
