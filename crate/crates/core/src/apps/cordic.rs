//! Hyperbolic CORDIC and the sigmoid/tanh activation built on it.
//!
//! Every x/y/z update and both exponential-stage additions run on the
//! W-bit hybrid adder. Additions use the chain in accurate mode;
//! subtractions (`a + !b + 1`) use the configured adder mode, which is
//! where the plus-one cell supplies the `+1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fixed::{Fixed, FixedPointFormat};
use crate::chains::{hoaa_add, subtract, ChainConfig, Mode, P1aVariant};
use crate::error::{Error, Result};

/// Largest |z| handled without range extension.
pub const CONVERGENCE_BOUND: f64 = 1.1182;

/// Iterations that must be repeated for hyperbolic convergence (3k+1).
pub const STANDARD_REPEATS: [u32; 3] = [4, 13, 40];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CordicConfig {
    pub format: FixedPointFormat,
    pub iterations: u32,
    pub repeated_iterations: BTreeSet<u32>,
    /// Raw fixed-point `1/K_h`, loaded into x before the first rotation.
    pub gain_correction: i64,
    pub adder_mode: Mode,
    pub p1a_variant: P1aVariant,
}

impl Default for CordicConfig {
    /// Q3.12, 12 iterations with iteration 4 repeated.
    fn default() -> Self {
        CordicConfig::new(FixedPointFormat::default(), 12).expect("default CORDIC config is valid")
    }
}

impl CordicConfig {
    /// Standard repeats within `1..=iterations`, gain computed for that
    /// sequence, accurate adders with the approximate plus-one cell.
    pub fn new(format: FixedPointFormat, iterations: u32) -> Result<Self> {
        let repeats = STANDARD_REPEATS
            .into_iter()
            .filter(|&i| i <= iterations)
            .collect();
        CordicConfig::with_repeats(format, iterations, repeats)
    }

    pub fn with_repeats(
        format: FixedPointFormat,
        iterations: u32,
        repeated_iterations: BTreeSet<u32>,
    ) -> Result<Self> {
        if iterations == 0 || iterations >= format.total_bits() {
            return Err(Error::Config(format!(
                "iterations must be in 1..{}, got {iterations}",
                format.total_bits()
            )));
        }
        if let Some(bad) = repeated_iterations.iter().find(|&&i| i == 0 || i > iterations) {
            return Err(Error::Config(format!("repeated iteration {bad} is outside 1..={iterations}")));
        }
        let mut cfg = CordicConfig {
            format,
            iterations,
            repeated_iterations,
            gain_correction: 0,
            adder_mode: Mode::Accurate,
            p1a_variant: P1aVariant::ApproxP1a,
        };
        let gain: f64 = cfg
            .shift_sequence()
            .map(|i| (1.0 - (-2.0 * i as f64).exp2()).sqrt())
            .product();
        cfg.gain_correction = format.quantize(1.0 / gain).raw;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.adder_mode = mode;
        self
    }

    pub fn with_variant(mut self, variant: P1aVariant) -> Self {
        self.p1a_variant = variant;
        self
    }

    /// Shift amounts in execution order, repeats included.
    pub fn shift_sequence(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=self.iterations).flat_map(move |i| {
            let n = if self.repeated_iterations.contains(&i) { 2 } else { 1 };
            std::iter::repeat_n(i, n)
        })
    }

    fn chain(&self) -> ChainConfig {
        ChainConfig::new(self.format.total_bits(), 1, self.p1a_variant)
            .expect("format width is a valid chain width")
    }
}

/// The hybrid adder datapath for one CORDIC configuration.
struct Datapath {
    chain: ChainConfig,
    format: FixedPointFormat,
    mode: Mode,
}

impl Datapath {
    fn new(cfg: &CordicConfig) -> Self {
        Datapath { chain: cfg.chain(), format: cfg.format, mode: cfg.adder_mode }
    }

    fn add(&self, a: i64, b: i64) -> Result<i64> {
        let (fa, fb) = (self.format.to_word(a), self.format.to_word(b));
        let r = hoaa_add(&self.chain, Mode::Accurate, &fa, &fb, false)?;
        Ok(self.format.raw_of(&r.sum))
    }

    fn sub(&self, a: i64, b: i64) -> Result<i64> {
        let (fa, fb) = (self.format.to_word(a), self.format.to_word(b));
        let r = subtract(&self.chain, self.mode, &fa, &fb)?;
        Ok(self.format.raw_of(&r.result))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinhCosh {
    pub sinh: Fixed,
    pub cosh: Fixed,
}

fn check_argument(z: &Fixed, cfg: &CordicConfig) -> Result<()> {
    if z.format != cfg.format {
        return Err(Error::Config("argument format differs from the CORDIC format".into()));
    }
    let value = z.to_f64();
    if value.abs() > CONVERGENCE_BOUND {
        return Err(Error::Domain { value, bound: CONVERGENCE_BOUND });
    }
    Ok(())
}

/// Rotation-mode hyperbolic CORDIC.
///
/// Rotates by `|z|` and negates sinh for negative arguments, so the
/// floor bias of the arithmetic shifts cannot break odd symmetry.
pub fn cordic_sinh_cosh(z: &Fixed, cfg: &CordicConfig) -> Result<SinhCosh> {
    check_argument(z, cfg)?;
    let dp = Datapath::new(cfg);
    let fmt = cfg.format;
    let mut x = cfg.gain_correction;
    let mut y = 0i64;
    let mut angle = z.raw.abs();
    for i in cfg.shift_sequence() {
        let step = fmt.quantize((-(i as f64)).exp2().atanh()).raw;
        let (dx, dy) = (y >> i, x >> i);
        if angle >= 0 {
            x = dp.add(x, dx)?;
            y = dp.add(y, dy)?;
            angle = dp.sub(angle, step)?;
        } else {
            x = dp.sub(x, dx)?;
            y = dp.sub(y, dy)?;
            angle = dp.add(angle, step)?;
        }
    }
    if z.raw < 0 {
        y = dp.sub(0, y)?;
    }
    Ok(SinhCosh {
        sinh: Fixed { raw: y, format: fmt },
        cosh: Fixed { raw: x, format: fmt },
    })
}

/// Truncating non-restoring division of unsigned integers.
///
/// Returns `(quotient, remainder)`. Panics if `divisor` is zero.
pub fn nonrestoring_divide(dividend: u64, divisor: u64) -> (u64, u64) {
    assert!(divisor != 0, "division by zero");
    let d = divisor as i128;
    let mut rem: i128 = 0;
    let mut quotient = 0u64;
    for bit in (0..64 - dividend.leading_zeros()).rev() {
        let next = ((dividend >> bit) & 1) as i128;
        rem = if rem >= 0 { (rem << 1 | next) - d } else { (rem << 1 | next) + d };
        quotient = quotient << 1 | (rem >= 0) as u64;
    }
    if rem < 0 {
        rem += d;
    }
    (quotient, rem as u64)
}

/// `num / den` in the format, truncated toward zero and saturated.
fn fixed_divide(num: i64, den: i64, fmt: FixedPointFormat) -> (i64, bool) {
    let negative = (num < 0) != (den < 0);
    if den == 0 {
        let raw = if negative { fmt.min_raw() } else { fmt.max_raw() };
        return (raw, true);
    }
    let (q, _) = nonrestoring_divide(num.unsigned_abs() << fmt.frac_bits(), den.unsigned_abs());
    let q = i64::try_from(q).unwrap_or(i64::MAX);
    fmt.saturate(if negative { -q } else { q })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AfSelect {
    Sigmoid,
    Tanh,
}

impl AfSelect {
    pub fn as_str(self) -> &'static str {
        match self {
            AfSelect::Sigmoid => "sigmoid",
            AfSelect::Tanh => "tanh",
        }
    }

    pub fn reference(self, z: f64) -> f64 {
        match self {
            AfSelect::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            AfSelect::Tanh => z.tanh(),
        }
    }
}

impl fmt::Display for AfSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AfSelect {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(AfSelect::Sigmoid),
            "tanh" => Ok(AfSelect::Tanh),
            _ => Err(format!("unknown activation `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activation {
    pub value: Fixed,
    /// The quotient was clamped to the format range.
    pub saturated: bool,
}

/// Sigmoid as `e^z / (e^z + 1)` with `e^z = cosh + sinh`, or tanh as
/// `sinh / cosh`.
pub fn activation(z: &Fixed, sel: AfSelect, cfg: &CordicConfig) -> Result<Activation> {
    let sc = cordic_sinh_cosh(z, cfg)?;
    let fmt = cfg.format;
    let (raw, saturated) = match sel {
        AfSelect::Sigmoid => {
            let dp = Datapath::new(cfg);
            let exp = dp.add(sc.cosh.raw, sc.sinh.raw)?;
            let den = dp.add(exp, fmt.one_raw())?;
            fixed_divide(exp, den, fmt)
        }
        AfSelect::Tanh => fixed_divide(sc.sinh.raw, sc.cosh.raw, fmt),
    };
    Ok(Activation { value: Fixed { raw, format: fmt }, saturated })
}

/// One row of a grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub z: f64,
    pub sel: AfSelect,
    pub mode: Mode,
    pub value: f64,
    pub oracle: f64,
    pub abs_err: f64,
}

impl GridPoint {
    pub const CSV_COLUMNS: [&'static str; 6] = ["z", "sel", "mode", "value", "oracle", "abs_err"];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.z.to_string(),
            self.sel.to_string(),
            self.mode.to_string(),
            self.value.to_string(),
            self.oracle.to_string(),
            self.abs_err.to_string(),
        ]
    }
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Evaluates the activation at each point after quantizing it to the
/// format; the oracle is evaluated at the quantized argument.
pub fn evaluate_grid(cfg: &CordicConfig, sel: AfSelect, points: &[f64]) -> Result<Vec<GridPoint>> {
    points
        .iter()
        .map(|&p| {
            let z = cfg.format.quantize(p);
            let value = activation(&z, sel, cfg)?.value.to_f64();
            let oracle = sel.reference(z.to_f64());
            Ok(GridPoint {
                z: z.to_f64(),
                sel,
                mode: cfg.adder_mode,
                value,
                oracle,
                abs_err: (value - oracle).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sequence_repeats_four() {
        let cfg = CordicConfig::default();
        let seq: Vec<_> = cfg.shift_sequence().collect();
        assert_eq!(seq, vec![1, 2, 3, 4, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
        // 1/K_h for this sequence is about 1.2075
        assert!((cfg.gain_correction as f64 / 4096.0 - 1.2075).abs() < 1e-3);
    }

    #[test]
    fn repeats_must_be_in_range() {
        let fmt = FixedPointFormat::default();
        assert!(CordicConfig::with_repeats(fmt, 12, [13].into()).is_err());
        assert!(CordicConfig::with_repeats(fmt, 0, BTreeSet::new()).is_err());
        assert_eq!(CordicConfig::new(fmt, 14).unwrap().repeated_iterations, [4, 13].into());
    }

    #[test]
    fn argument_outside_convergence_is_rejected() {
        let cfg = CordicConfig::default();
        let z = cfg.format.quantize(1.2);
        assert!(matches!(cordic_sinh_cosh(&z, &cfg), Err(Error::Domain { .. })));
    }

    #[test]
    fn division_matches_native() {
        for (n, d) in [(0, 1), (7, 2), (1 << 40, 3), (u64::MAX, 1), (u64::MAX, u64::MAX), (5, 9)] {
            assert_eq!(nonrestoring_divide(n, d), (n / d, n % d), "{n}/{d}");
        }
    }

    #[test]
    fn fixed_divide_signs_and_saturation() {
        let fmt = FixedPointFormat::default();
        assert_eq!(fixed_divide(-2048, 4096, fmt), (-2048, false));
        assert_eq!(fixed_divide(4096, 0, fmt), (fmt.max_raw(), true));
        assert_eq!(fixed_divide(16 * 4096, 4096, fmt), (fmt.max_raw(), true));
    }

    #[test]
    fn zero_argument_identities() {
        let cfg = CordicConfig::default();
        let z = cfg.format.quantize(0.0);
        let sc = cordic_sinh_cosh(&z, &cfg).unwrap();
        let ulp = cfg.format.ulp();
        assert!(sc.sinh.to_f64().abs() <= ulp, "sinh(0) = {}", sc.sinh.to_f64());
        assert!((sc.cosh.to_f64() - 1.0).abs() <= ulp, "cosh(0) = {}", sc.cosh.to_f64());
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(-1.0, 1.0, 256);
        assert_eq!((g.len(), g[0], g[255]), (256, -1.0, 1.0));
    }
}
