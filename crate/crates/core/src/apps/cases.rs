//! Ready-made operator/oracle pairs for the error-metrics engine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cordic::{activation, AfSelect, CordicConfig};
use super::rounding::{round_ties_even_reference, round_to_even};
use crate::chains::{hoaa_add, loa_add, mask, subtract, BitWord, ChainConfig, Mode, P1aVariant};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, Domain, ErrorReport, TrialPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStudy {
    /// `a - b mod 2^N` via the hybrid subtractor.
    Subtract,
    /// Round-to-even of `x >> k`, `k` in 1..=4.
    Round,
    /// Sigmoid/tanh against the same datapath in accurate mode.
    Activation,
    /// HOAA(N, m) against its overestimation target `a + b + cin + 2^m - 1`.
    Hoaa,
    /// Lower-part OR adder against exact addition.
    Loa,
}

impl CaseStudy {
    pub const ALL: [CaseStudy; 5] = [
        CaseStudy::Subtract,
        CaseStudy::Round,
        CaseStudy::Activation,
        CaseStudy::Hoaa,
        CaseStudy::Loa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseStudy::Subtract => "subtract",
            CaseStudy::Round => "round",
            CaseStudy::Activation => "af",
            CaseStudy::Hoaa => "hoaa",
            CaseStudy::Loa => "loa",
        }
    }
}

impl fmt::Display for CaseStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseStudy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "subtract" | "sub" => Ok(CaseStudy::Subtract),
            "round" | "rounding" => Ok(CaseStudy::Round),
            "af" | "activation" => Ok(CaseStudy::Activation),
            "hoaa" | "add" => Ok(CaseStudy::Hoaa),
            "loa" => Ok(CaseStudy::Loa),
            _ => Err(format!("unknown case study `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub width: u32,
    pub m: u32,
    pub variant: P1aVariant,
    pub mode: Mode,
    /// Draw the chain carry-in as a random operand (addition cases only).
    pub include_cin: bool,
    /// Datapath for [`CaseStudy::Activation`]; its mode is overridden by `mode`.
    pub cordic: CordicConfig,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            width: 8,
            m: 1,
            variant: P1aVariant::ApproxP1a,
            mode: Mode::Overestimate,
            include_cin: false,
            cordic: CordicConfig::default(),
        }
    }
}

impl CaseParams {
    fn chain(&self) -> Result<ChainConfig> {
        ChainConfig::new(self.width, self.m, self.variant)
    }

    fn add_domain(&self) -> Result<Domain> {
        let mut widths = vec![self.width, self.width];
        if self.include_cin {
            widths.push(1);
        }
        Domain::new(widths)
    }

    /// Input domain and the result width used to normalize NMED.
    pub fn domain(&self, case: CaseStudy) -> Result<(Domain, u32)> {
        match case {
            CaseStudy::Subtract => Ok((Domain::new(vec![self.width, self.width])?, self.width)),
            CaseStudy::Round => {
                if self.width < 5 {
                    return Err(Error::Config("rounding case needs width >= 5 for k up to 4".into()));
                }
                Ok((Domain::new(vec![self.width, 2])?, self.width))
            }
            CaseStudy::Activation => {
                let fmt = self.cordic.format;
                // signed F+1 bit codes cover [-1, 1)
                Ok((Domain::new(vec![1, fmt.frac_bits() + 1])?, fmt.total_bits()))
            }
            CaseStudy::Hoaa => Ok((self.add_domain()?, self.width)),
            CaseStudy::Loa => Ok((Domain::new(vec![self.width, self.width])?, self.width)),
        }
    }
}

fn word(width: u32, bits: u64) -> Result<BitWord> {
    BitWord::new(width, bits)
}

fn activation_code(cfg: &CordicConfig, mode: Mode, x: &[u64]) -> Result<i128> {
    let sel = if x[0] == 0 { AfSelect::Sigmoid } else { AfSelect::Tanh };
    let bits = cfg.format.frac_bits() + 1;
    let shift = 64 - bits;
    let raw = ((x[1] << shift) as i64) >> shift;
    let z = cfg.format.from_raw(raw)?;
    let cfg = cfg.clone().with_mode(mode);
    Ok(activation(&z, sel, &cfg)?.value.raw as i128)
}

/// Builds and runs the operator/oracle pair for `case`. The plan's width
/// is replaced by the case's result width.
pub fn case_report(case: CaseStudy, params: &CaseParams, plan: &TrialPlan) -> Result<ErrorReport> {
    let (domain, result_width) = params.domain(case)?;
    let plan = TrialPlan {
        width: result_width,
        modular_ed: case == CaseStudy::Subtract,
        ..*plan
    };
    let n = params.width;
    let cin = |x: &[u64]| x.get(2).copied().unwrap_or(0);
    match case {
        CaseStudy::Subtract => {
            let cfg = params.chain()?;
            evaluate(
                |x| Ok(subtract(&cfg, params.mode, &word(n, x[0])?, &word(n, x[1])?)?.result.bits() as i128),
                |x| Ok((x[0].wrapping_sub(x[1]) & mask(n)) as i128),
                &domain,
                &plan,
            )
        }
        CaseStudy::Round => {
            let cfg = params.chain()?;
            evaluate(
                |x| Ok(round_to_even(&word(n, x[0])?, x[1] as u32 + 1, &cfg, params.mode)?.bits() as i128),
                |x| Ok(round_ties_even_reference(x[0], x[1] as u32 + 1) as i128),
                &domain,
                &plan,
            )
        }
        CaseStudy::Activation => {
            let cfg = params.cordic.clone().with_variant(params.variant);
            evaluate(
                |x| activation_code(&cfg, params.mode, x),
                |x| activation_code(&cfg, Mode::Accurate, x),
                &domain,
                &plan,
            )
        }
        CaseStudy::Hoaa => {
            let cfg = params.chain()?;
            let excess = match params.mode {
                Mode::Overestimate => (1i128 << params.m) - 1,
                Mode::Accurate => 0,
            };
            evaluate(
                |x| {
                    let r = hoaa_add(&cfg, params.mode, &word(n, x[0])?, &word(n, x[1])?, cin(x) == 1)?;
                    Ok(r.value as i128)
                },
                |x| Ok(x[0] as i128 + x[1] as i128 + cin(x) as i128 + excess),
                &domain,
                &plan,
            )
        }
        CaseStudy::Loa => evaluate(
            |x| Ok(loa_add(n, params.m, &word(n, x[0])?, &word(n, x[1])?)?.value as i128),
            |x| Ok(x[0] as i128 + x[1] as i128),
            &domain,
            &plan,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in CaseStudy::ALL {
            assert_eq!(c.as_str().parse::<CaseStudy>().unwrap(), c);
        }
    }

    #[test]
    fn accurate_subtract_is_exact() {
        let params = CaseParams { mode: Mode::Accurate, ..CaseParams::default() };
        let r = case_report(CaseStudy::Subtract, &params, &TrialPlan::exhaustive(8)).unwrap();
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.n_samples, 65536);
    }

    #[test]
    fn subtract_requires_single_plus_one_cell() {
        let params = CaseParams { m: 2, ..CaseParams::default() };
        assert!(case_report(CaseStudy::Subtract, &params, &TrialPlan::exhaustive(8)).is_err());
    }

    #[test]
    fn round_case_needs_room_for_shift() {
        let params = CaseParams { width: 4, ..CaseParams::default() };
        assert!(case_report(CaseStudy::Round, &params, &TrialPlan::exhaustive(4)).is_err());
    }

    #[test]
    fn loa_with_no_lower_part_is_exact() {
        let params = CaseParams { m: 0, ..CaseParams::default() };
        let r = case_report(CaseStudy::Loa, &params, &TrialPlan::exhaustive(8)).unwrap();
        assert_eq!(r.max_abs_ed, 0);
    }
}
