//! Word-level ripple chains built from single-bit cells.
//!
//! Every chain here is simulated cell by cell through the cell truth
//! tables, so an approximate cell's local error propagates through the
//! carries exactly as it would in hardware.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cells::{self, Bit, CellKind};
use crate::error::{Error, Result};

pub const MAX_WIDTH: u32 = 64;

#[inline]
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Fixed-width unsigned bit vector, LSB at position 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitWord {
    width: u32,
    bits: u64,
}

impl BitWord {
    pub fn new(width: u32, bits: u64) -> Result<Self> {
        check_width(width)?;
        if bits & !mask(width) != 0 {
            return Err(Error::ValueOutOfRange { width, bits });
        }
        Ok(BitWord { width, bits })
    }

    /// Keeps the low `width` bits of `bits`.
    pub fn wrapping(width: u32, bits: u64) -> Result<Self> {
        check_width(width)?;
        Ok(BitWord { width, bits: bits & mask(width) })
    }

    pub fn zero(width: u32) -> Result<Self> {
        BitWord::new(width, 0)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: u32) -> Bit {
        i < self.width && (self.bits >> i) & 1 == 1
    }

    pub fn msb(&self) -> Bit {
        self.bit(self.width - 1)
    }

    /// Bitwise complement within the word's width.
    pub fn not(&self) -> BitWord {
        BitWord { width: self.width, bits: !self.bits & mask(self.width) }
    }
}

fn check_width(width: u32) -> Result<()> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(width))
    }
}

fn same_width(a: &BitWord, b: &BitWord) -> Result<u32> {
    if a.width != b.width {
        return Err(Error::WidthMismatch { left: a.width, right: b.width });
    }
    Ok(a.width)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Accurate,
    Overestimate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Accurate => "accurate",
            Mode::Overestimate => "overestimate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "accurate" => Ok(Mode::Accurate),
            "overestimate" => Ok(Mode::Overestimate),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Which plus-one cell fills the reconfigurable positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum P1aVariant {
    AccurateP1a,
    ApproxP1a,
}

impl P1aVariant {
    pub const ALL: [P1aVariant; 2] = [P1aVariant::ApproxP1a, P1aVariant::AccurateP1a];

    pub fn cell(self) -> CellKind {
        match self {
            P1aVariant::AccurateP1a => CellKind::AccurateP1a,
            P1aVariant::ApproxP1a => CellKind::ApproxP1a,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.cell().as_str()
    }
}

impl fmt::Display for P1aVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for P1aVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.parse::<CellKind>()? {
            CellKind::AccurateP1a => Ok(P1aVariant::AccurateP1a),
            CellKind::ApproxP1a => Ok(P1aVariant::ApproxP1a),
            other => Err(format!("`{other}` is not a plus-one adder variant")),
        }
    }
}

/// One HOAA(N, m) instance: `m` reconfigurable LSB cells under `N - m` FAs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainConfig {
    pub width: u32,
    pub m: u32,
    pub variant: P1aVariant,
    /// Recorded only; gating the idle plus-one cells has no functional effect.
    #[serde(default)]
    pub power_gate_idle: bool,
}

impl ChainConfig {
    pub fn new(width: u32, m: u32, variant: P1aVariant) -> Result<Self> {
        check_width(width)?;
        if m > width {
            return Err(Error::Config(format!("m = {m} exceeds width {width}")));
        }
        Ok(ChainConfig { width, m, variant, power_gate_idle: false })
    }

    pub fn validate(&self) -> Result<()> {
        ChainConfig::new(self.width, self.m, self.variant).map(|_| ())
    }

    /// Cell used at `position` under `mode`.
    pub fn cell_at(&self, position: u32, mode: Mode) -> CellKind {
        match mode {
            Mode::Overestimate if position < self.m => self.variant.cell(),
            _ => CellKind::Fa,
        }
    }

    fn check_operands(&self, a: &BitWord, b: &BitWord) -> Result<()> {
        let w = same_width(a, b)?;
        if w != self.width {
            return Err(Error::WidthMismatch { left: w, right: self.width });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResult {
    pub sum: BitWord,
    pub carry_out: Bit,
    /// `carry_out * 2^N + sum`.
    pub value: u128,
}

impl ChainResult {
    fn new(sum: BitWord, carry_out: Bit) -> Self {
        let value = ((carry_out as u128) << sum.width) | sum.bits as u128;
        ChainResult { sum, carry_out, value }
    }
}

fn ripple(
    a: &BitWord,
    b: &BitWord,
    cin: Bit,
    cell_at: impl Fn(u32) -> CellKind,
) -> Result<ChainResult> {
    let width = same_width(a, b)?;
    let mut carry = cin;
    let mut sum = 0u64;
    for pos in 0..width {
        let kind = cell_at(pos);
        let out = cells::lookup(kind, a.bit(pos), b.bit(pos), carry)
            .expect("chains only place cells that take a carry-in");
        if out.cout2 == Some(true) {
            return Err(Error::UnsupportedConfiguration { position: pos });
        }
        sum |= (out.sum as u64) << pos;
        carry = out.cout;
    }
    Ok(ChainResult::new(BitWord { width, bits: sum }, carry))
}

/// Exact ripple-carry addition through a chain of full adders.
pub fn rca_add(a: &BitWord, b: &BitWord, cin: Bit) -> Result<ChainResult> {
    ripple(a, b, cin, |_| CellKind::Fa)
}

/// Reconfigurable hybrid adder.
///
/// In [`Mode::Accurate`] every position is a full adder. In
/// [`Mode::Overestimate`] positions `0..m` use the configured plus-one
/// cell with plain ripple carries, approximating `a + b + cin + 2^m - 1`.
pub fn hoaa_add(
    cfg: &ChainConfig,
    mode: Mode,
    a: &BitWord,
    b: &BitWord,
    cin: Bit,
) -> Result<ChainResult> {
    cfg.check_operands(a, b)?;
    ripple(a, b, cin, |pos| cfg.cell_at(pos, mode))
}

/// Result of a two's-complement subtraction.
///
/// `borrow` is the inverted carry-out of the final cell: 1 when the
/// subtraction wrapped below zero (for an exact subtractor, `a < b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subtraction {
    pub result: BitWord,
    pub borrow: Bit,
}

/// `a - b` as `a + !b + 1`.
///
/// In overestimate mode the `+1` comes from the LSB plus-one cell in the
/// same pass. In accurate mode it takes a second full-adder pass.
pub fn subtract(cfg: &ChainConfig, mode: Mode, a: &BitWord, b: &BitWord) -> Result<Subtraction> {
    if cfg.m != 1 {
        return Err(Error::Config(format!(
            "subtraction needs exactly one plus-one cell, got m = {}",
            cfg.m
        )));
    }
    cfg.check_operands(a, b)?;
    let nb = b.not();
    let (result, carry) = match mode {
        Mode::Overestimate => {
            let r = hoaa_add(cfg, mode, a, &nb, false)?;
            (r.sum, r.carry_out)
        }
        Mode::Accurate => {
            let first = hoaa_add(cfg, mode, a, &nb, false)?;
            let second = rca_add(&first.sum, &BitWord::zero(cfg.width)?, true)?;
            (second.sum, first.carry_out | second.carry_out)
        }
    };
    Ok(Subtraction { result, borrow: !carry })
}

/// Lower-part OR adder.
///
/// The low `m` bits are `a | b`; the upper `width - m` bits are an exact
/// ripple chain whose carry-in is `a[m-1] & b[m-1]`.
pub fn loa_add(width: u32, m: u32, a: &BitWord, b: &BitWord) -> Result<ChainResult> {
    check_width(width)?;
    let w = same_width(a, b)?;
    if w != width {
        return Err(Error::WidthMismatch { left: w, right: width });
    }
    if m > width {
        return Err(Error::Config(format!("m = {m} exceeds width {width}")));
    }
    if m == 0 {
        return rca_add(a, b, false);
    }
    let low = (a.bits | b.bits) & mask(m);
    let carry = a.bit(m - 1) & b.bit(m - 1);
    if m == width {
        return Ok(ChainResult::new(BitWord { width, bits: low }, carry));
    }
    let upper_width = width - m;
    let ua = BitWord { width: upper_width, bits: a.bits >> m };
    let ub = BitWord { width: upper_width, bits: b.bits >> m };
    let upper = rca_add(&ua, &ub, carry)?;
    let sum = BitWord { width, bits: (upper.sum.bits << m) | low };
    Ok(ChainResult::new(sum, upper.carry_out))
}

/// Chooses the adder mode for an operand pair at run time.
pub trait ModeStrategy {
    fn select(&self, a: &BitWord, b: &BitWord) -> Mode;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinStrategy {
    /// Always the given mode.
    Explicit(Mode),
    /// Overestimate iff both operand MSBs are set.
    MsbAnd,
}

impl Default for BuiltinStrategy {
    fn default() -> Self {
        BuiltinStrategy::Explicit(Mode::Accurate)
    }
}

impl ModeStrategy for BuiltinStrategy {
    fn select(&self, a: &BitWord, b: &BitWord) -> Mode {
        match self {
            BuiltinStrategy::Explicit(mode) => *mode,
            BuiltinStrategy::MsbAnd if a.msb() && b.msb() => Mode::Overestimate,
            BuiltinStrategy::MsbAnd => Mode::Accurate,
        }
    }
}

impl<F: Fn(&BitWord, &BitWord) -> Mode> ModeStrategy for F {
    fn select(&self, a: &BitWord, b: &BitWord) -> Mode {
        self(a, b)
    }
}

/// Operands are expected to share a width; each word's own MSB is used.
pub fn select_mode(a: &BitWord, b: &BitWord, strategy: &impl ModeStrategy) -> Mode {
    strategy.select(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(width: u32, bits: u64) -> BitWord {
        BitWord::new(width, bits).unwrap()
    }

    #[test]
    fn bitword_bounds() {
        assert!(BitWord::new(0, 0).is_err());
        assert!(BitWord::new(65, 0).is_err());
        assert!(BitWord::new(8, 256).is_err());
        assert_eq!(BitWord::new(64, u64::MAX).unwrap().not().bits(), 0);
        assert_eq!(BitWord::wrapping(4, 0x1f).unwrap().bits(), 0xf);
    }

    #[test]
    fn rca_examples() {
        assert_eq!(rca_add(&w(8, 0), &w(8, 0), false).unwrap().value, 0);
        let r = rca_add(&w(8, 0xff), &w(8, 1), false).unwrap();
        assert_eq!((r.sum.bits(), r.carry_out), (0, true));
        assert_eq!(rca_add(&w(8, 0x2a), &w(8, 0x15), true).unwrap().value, 64);
        assert!(rca_add(&w(8, 1), &w(4, 1), false).is_err());
    }

    #[test]
    fn rca_full_width() {
        let r = rca_add(&w(64, u64::MAX), &w(64, u64::MAX), true).unwrap();
        assert_eq!(r.value, 2 * u64::MAX as u128 + 1);
    }

    #[test]
    fn hoaa_examples() {
        let cfg = ChainConfig::new(8, 1, P1aVariant::ApproxP1a).unwrap();
        assert_eq!(hoaa_add(&cfg, Mode::Overestimate, &w(8, 4), &w(8, 2), false).unwrap().value, 7);
        assert_eq!(hoaa_add(&cfg, Mode::Overestimate, &w(8, 1), &w(8, 0), false).unwrap().value, 1);
        let cfg0 = ChainConfig::new(8, 0, P1aVariant::ApproxP1a).unwrap();
        assert_eq!(hoaa_add(&cfg0, Mode::Overestimate, &w(8, 200), &w(8, 100), true).unwrap().value, 301);
    }

    #[test]
    fn accurate_p1a_second_carry_is_reported() {
        let cfg = ChainConfig::new(4, 2, P1aVariant::AccurateP1a).unwrap();
        // position 0: (1,1,0) -> 3, carry 1 into position 1: (1,1,1) -> cout2
        let err = hoaa_add(&cfg, Mode::Overestimate, &w(4, 3), &w(4, 3), false).unwrap_err();
        assert_eq!(err, Error::UnsupportedConfiguration { position: 1 });
    }

    #[test]
    fn config_checks() {
        assert!(ChainConfig::new(4, 5, P1aVariant::ApproxP1a).is_err());
        let cfg = ChainConfig::new(8, 2, P1aVariant::ApproxP1a).unwrap();
        assert!(subtract(&cfg, Mode::Accurate, &w(8, 1), &w(8, 1)).is_err());
        assert!(hoaa_add(&cfg, Mode::Accurate, &w(4, 1), &w(4, 1), false).is_err());
    }

    #[test]
    fn subtract_examples() {
        let cfg = ChainConfig::new(8, 1, P1aVariant::ApproxP1a).unwrap();
        let s = subtract(&cfg, Mode::Accurate, &w(8, 5), &w(8, 3)).unwrap();
        assert_eq!((s.result.bits(), s.borrow), (2, false));
        let s = subtract(&cfg, Mode::Accurate, &w(8, 3), &w(8, 5)).unwrap();
        assert_eq!((s.result.bits(), s.borrow), (254, true));
        assert_eq!(subtract(&cfg, Mode::Overestimate, &w(8, 5), &w(8, 5)).unwrap().result.bits(), 0xff);
        assert_eq!(subtract(&cfg, Mode::Overestimate, &w(8, 6), &w(8, 2)).unwrap().result.bits(), 4);
    }

    #[test]
    fn loa_examples() {
        assert_eq!(loa_add(8, 0, &w(8, 10), &w(8, 20)).unwrap().value, 30);
        assert_eq!(loa_add(4, 2, &w(4, 0b0011), &w(4, 0b0001)).unwrap().value, 3);
        assert_eq!(loa_add(4, 2, &w(4, 0b0010), &w(4, 0b0010)).unwrap().value, 6);
        assert_eq!(loa_add(4, 4, &w(4, 0b1000), &w(4, 0b1001)).unwrap().value, 0b1_1001);
        assert!(loa_add(4, 5, &w(4, 0), &w(4, 0)).is_err());
    }

    #[test]
    fn strategies() {
        let any = w(8, 0x12);
        assert_eq!(select_mode(&any, &any, &BuiltinStrategy::Explicit(Mode::Accurate)), Mode::Accurate);
        assert_eq!(select_mode(&w(8, 0x80), &w(8, 0x80), &BuiltinStrategy::MsbAnd), Mode::Overestimate);
        assert_eq!(select_mode(&w(8, 0x7f), &w(8, 0xff), &BuiltinStrategy::MsbAnd), Mode::Accurate);
        let custom = |a: &BitWord, _: &BitWord| if a.bit(0) { Mode::Overestimate } else { Mode::Accurate };
        assert_eq!(select_mode(&w(8, 1), &any, &custom), Mode::Overestimate);
    }
}
