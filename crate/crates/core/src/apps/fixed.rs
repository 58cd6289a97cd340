use serde::{Deserialize, Serialize};

use crate::chains::{mask, BitWord};
use crate::error::{Error, Result};

/// Signed two's-complement Q format with `total_bits` bits, `frac_bits`
/// of them fractional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPointFormat {
    total_bits: u32,
    frac_bits: u32,
}

impl Default for FixedPointFormat {
    /// Q3.12 in 16 bits.
    fn default() -> Self {
        FixedPointFormat { total_bits: 16, frac_bits: 12 }
    }
}

impl FixedPointFormat {
    pub fn new(total_bits: u32, frac_bits: u32) -> Result<Self> {
        if !(2..=32).contains(&total_bits) || frac_bits >= total_bits {
            return Err(Error::Config(format!(
                "fixed-point format needs 2 <= W <= 32 and 0 <= F < W, got W={total_bits} F={frac_bits}"
            )));
        }
        Ok(FixedPointFormat { total_bits, frac_bits })
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << (self.total_bits - 1))
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << (self.total_bits - 1)) - 1
    }

    pub fn one_raw(&self) -> i64 {
        1i64 << self.frac_bits
    }

    pub fn ulp(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn saturate(&self, raw: i64) -> (i64, bool) {
        let clamped = raw.clamp(self.min_raw(), self.max_raw());
        (clamped, clamped != raw)
    }

    /// Reinterprets the low `W` bits of `raw` as a signed value.
    pub fn wrap(&self, raw: i64) -> i64 {
        let shift = 64 - self.total_bits;
        (raw << shift) >> shift
    }

    pub fn quantize(&self, value: f64) -> Fixed {
        let raw = (value * self.one_raw() as f64).round();
        let raw = raw.clamp(self.min_raw() as f64, self.max_raw() as f64) as i64;
        Fixed { raw, format: *self }
    }

    pub fn from_raw(&self, raw: i64) -> Result<Fixed> {
        if raw < self.min_raw() || raw > self.max_raw() {
            return Err(Error::Config(format!(
                "raw value {raw} does not fit Q{}.{}",
                self.total_bits - 1 - self.frac_bits,
                self.frac_bits
            )));
        }
        Ok(Fixed { raw, format: *self })
    }

    pub(crate) fn to_word(self, raw: i64) -> BitWord {
        BitWord::new(self.total_bits, raw as u64 & mask(self.total_bits))
            .expect("masked to format width")
    }

    pub(crate) fn raw_of(self, word: &BitWord) -> i64 {
        self.wrap(word.bits() as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fixed {
    pub raw: i64,
    pub format: FixedPointFormat,
}

impl Fixed {
    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.ulp()
    }
}
