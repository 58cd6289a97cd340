//! Round-half-to-even right shift with the increment on the hybrid adder.

use crate::chains::{hoaa_add, mask, rca_add, BitWord, ChainConfig, Mode};
use crate::error::{Error, Result};

/// `x / 2^k` rounded to nearest, ties to even.
///
/// The guard/sticky decision is exact. Only the conditional `+1` goes
/// through the adder: the LSB plus-one cell in overestimate mode, or a
/// second full-adder pass in accurate mode.
pub fn round_to_even(x: &BitWord, k: u32, cfg: &ChainConfig, mode: Mode) -> Result<BitWord> {
    if cfg.m != 1 {
        return Err(Error::Config(format!(
            "rounding needs exactly one plus-one cell, got m = {}",
            cfg.m
        )));
    }
    if x.width() != cfg.width {
        return Err(Error::WidthMismatch { left: x.width(), right: cfg.width });
    }
    if k == 0 || k >= x.width() {
        return Err(Error::Config(format!(
            "shift {k} must be in 1..{} for a {}-bit word",
            x.width(),
            x.width()
        )));
    }
    let truncated = BitWord::new(x.width(), x.bits() >> k)?;
    let rest = x.bits() & mask(k);
    let half = 1u64 << (k - 1);
    let round_up = rest > half || (rest == half && truncated.bit(0));
    if !round_up {
        return Ok(truncated);
    }
    let zero = BitWord::zero(x.width())?;
    let incremented = match mode {
        Mode::Overestimate => hoaa_add(cfg, mode, &truncated, &zero, false)?,
        Mode::Accurate => rca_add(&truncated, &zero, true)?,
    };
    Ok(incremented.sum)
}

/// Arithmetic reference through `f64::round_ties_even`; exact for `x < 2^53`.
pub fn round_ties_even_reference(x: u64, k: u32) -> u64 {
    (x as f64 / (k as f64).exp2()).round_ties_even() as u64
}
