//! Single-bit adder cells.
//!
//! Each [`CellKind`] has one canonical gate netlist. Cell evaluation is
//! defined by simulating that netlist; the results are cached as an
//! 8-row truth table per kind so word-level chains can look them up.

mod netlist;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use netlist::{CellNetlist, Gate, GateKind};

pub type Bit = bool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    /// Conventional full adder.
    Fa,
    /// Textbook half adder (no carry-in).
    Ha,
    /// OR-based approximate full adder: `(A | Cin) ^ B`, `(A | Cin) & B`.
    Hadd,
    /// Exact `A + B + Cin + 1`, needing a third output bit.
    AccurateP1a,
    /// Three-gate plus-one adder with two erroneous rows.
    ApproxP1a,
}

impl CellKind {
    pub const ALL: [CellKind; 5] = [
        CellKind::Fa,
        CellKind::Ha,
        CellKind::Hadd,
        CellKind::AccurateP1a,
        CellKind::ApproxP1a,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Fa => "fa",
            CellKind::Ha => "ha",
            CellKind::Hadd => "hadd",
            CellKind::AccurateP1a => "accurate-p1a",
            CellKind::ApproxP1a => "approx-p1a",
        }
    }

    pub fn has_carry_in(self) -> bool {
        self != CellKind::Ha
    }

    pub fn has_cout2(self) -> bool {
        self == CellKind::AccurateP1a
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CellKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CellKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s) || k.as_str().replace('-', "_") == s)
            .ok_or_else(|| format!("unknown cell kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OutputPort {
    Sum,
    Cout,
    Cout2,
}

impl OutputPort {
    fn net(self) -> &'static str {
        match self {
            OutputPort::Sum => "Sum",
            OutputPort::Cout => "Cout",
            OutputPort::Cout2 => "Cout2",
        }
    }
}

impl fmt::Display for OutputPort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputPort::Sum => "SUM",
            OutputPort::Cout => "COUT",
            OutputPort::Cout2 => "COUT2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellOutput {
    pub sum: Bit,
    pub cout: Bit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cout2: Option<Bit>,
}

impl CellOutput {
    /// `4*cout2 + 2*cout + sum`.
    pub fn value(&self) -> u8 {
        4 * self.cout2.unwrap_or(false) as u8 + 2 * self.cout as u8 + self.sum as u8
    }
}

fn nets(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn canonical_netlist(kind: CellKind) -> CellNetlist {
    use GateKind::*;
    let abc = nets(&["A", "B", "Cin"]);
    let (inputs, gates, outputs) = match kind {
        CellKind::Fa => (
            abc,
            vec![
                Gate::new(Xor2, &["A", "B"], "p"),
                Gate::new(Xor2, &["p", "Cin"], "Sum"),
                Gate::new(And2, &["A", "B"], "g"),
                Gate::new(And2, &["Cin", "p"], "t"),
                Gate::new(Or2, &["g", "t"], "Cout"),
            ],
            nets(&["Sum", "Cout"]),
        ),
        CellKind::Ha => (
            nets(&["A", "B"]),
            vec![
                Gate::new(Xor2, &["A", "B"], "Sum"),
                Gate::new(And2, &["A", "B"], "Cout"),
            ],
            nets(&["Sum", "Cout"]),
        ),
        CellKind::Hadd => (
            abc,
            vec![
                Gate::new(Or2, &["A", "Cin"], "t"),
                Gate::new(Xor2, &["t", "B"], "Sum"),
                Gate::new(And2, &["t", "B"], "Cout"),
            ],
            nets(&["Sum", "Cout"]),
        ),
        // `sop` is the printed sum-of-products (majority OR all-zero).
        // It and the plain OR carry are both wrong on (1,1,1), where the
        // true value 4 lives entirely in Cout2, so both are masked by !Cout2.
        CellKind::AccurateP1a => (
            abc,
            vec![
                Gate::new(And2, &["A", "B"], "ab"),
                Gate::new(And2, &["A", "Cin"], "ac"),
                Gate::new(And2, &["B", "Cin"], "bc"),
                Gate::new(Or2, &["ab", "ac"], "m1"),
                Gate::new(Or2, &["m1", "bc"], "maj"),
                Gate::new(Or2, &["A", "B"], "o1"),
                Gate::new(Or2, &["o1", "Cin"], "any"),
                Gate::new(Not, &["any"], "none"),
                Gate::new(Or2, &["maj", "none"], "sop"),
                Gate::new(And3, &["A", "B", "Cin"], "Cout2"),
                Gate::new(Not, &["Cout2"], "ncout2"),
                Gate::new(And2, &["sop", "ncout2"], "Sum"),
                Gate::new(And2, &["any", "ncout2"], "Cout"),
            ],
            nets(&["Sum", "Cout", "Cout2"]),
        ),
        CellKind::ApproxP1a => (
            abc,
            vec![
                Gate::new(Xnor2, &["B", "Cin"], "t"),
                Gate::new(Or2, &["A", "t"], "Sum"),
                Gate::new(Or2, &["B", "Cin"], "Cout"),
            ],
            nets(&["Sum", "Cout"]),
        ),
    };
    CellNetlist::new(kind.as_str(), inputs, gates, outputs)
        .expect("canonical cell netlists are well formed")
}

struct Library {
    netlists: Vec<CellNetlist>,
    tables: Vec<[Option<CellOutput>; 8]>,
}

fn library() -> &'static Library {
    static LIB: OnceLock<Library> = OnceLock::new();
    LIB.get_or_init(|| {
        let netlists: Vec<_> = CellKind::ALL.iter().map(|&k| canonical_netlist(k)).collect();
        let tables = CellKind::ALL
            .iter()
            .zip(&netlists)
            .map(|(&kind, net)| {
                let mut table = [None; 8];
                for (row, slot) in table.iter_mut().enumerate() {
                    let (a, b, cin) = unpack_row(row);
                    if !kind.has_carry_in() && cin {
                        continue;
                    }
                    let ins: &[bool] = if kind.has_carry_in() { &[a, b, cin] } else { &[a, b] };
                    let outs = net.evaluate(ins).expect("input count matches");
                    *slot = Some(CellOutput {
                        sum: outs[0],
                        cout: outs[1],
                        cout2: outs.get(2).copied(),
                    });
                }
                table
            })
            .collect();
        Library { netlists, tables }
    })
}

/// Row index in Table-II order: `a` is the most significant bit.
pub fn unpack_row(row: usize) -> (Bit, Bit, Bit) {
    (row & 4 != 0, row & 2 != 0, row & 1 != 0)
}

pub fn netlist(kind: CellKind) -> &'static CellNetlist {
    &library().netlists[kind.index()]
}

pub fn build_cell(kind: CellKind) -> CellNetlist {
    netlist(kind).clone()
}

#[inline]
pub(crate) fn lookup(kind: CellKind, a: Bit, b: Bit, cin: Bit) -> Option<CellOutput> {
    let row = (a as usize) << 2 | (b as usize) << 1 | cin as usize;
    library().tables[kind.index()][row]
}

pub fn eval_cell(kind: CellKind, a: Bit, b: Bit, cin: Bit) -> Result<CellOutput> {
    lookup(kind, a, b, cin).ok_or(Error::InvalidInput {
        kind,
        reason: "half adder has no carry-in; cin must be 0",
    })
}

/// Longest input-to-output path in unit gate delays.
pub fn critical_path(kind: CellKind, port: OutputPort) -> Result<u32> {
    let invalid = Error::InvalidOutput { kind, port };
    if port == OutputPort::Cout2 && !kind.has_cout2() {
        return Err(invalid);
    }
    netlist(kind).depth(port.net()).ok_or(invalid)
}

/// Worst path over every output of the cell.
pub fn worst_path(kind: CellKind) -> u32 {
    let net = netlist(kind);
    net.outputs()
        .iter()
        .filter_map(|o| net.depth(o))
        .max()
        .unwrap_or(0)
}

/// Transistor cost per gate kind.
///
/// Defaults are static-CMOS textbook figures. They do not reproduce the
/// 16T/28T numbers quoted for the plus-one adder and mirror full adder,
/// which come from transistor-level designs; those are kept in
/// [`crate::reference`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub not: u32,
    pub and2: u32,
    pub or2: u32,
    pub xor2: u32,
    pub xnor2: u32,
    pub and3: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            not: 2,
            and2: 6,
            or2: 6,
            xor2: 8,
            xnor2: 8,
            and3: 8,
        }
    }
}

impl CostModel {
    pub fn cost(&self, kind: GateKind) -> u32 {
        match kind {
            GateKind::Not => self.not,
            GateKind::And2 => self.and2,
            GateKind::Or2 => self.or2,
            GateKind::Xor2 => self.xor2,
            GateKind::Xnor2 => self.xnor2,
            GateKind::And3 => self.and3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match GateKind::ALL.iter().find(|&&k| self.cost(k) == 0) {
            Some(k) => Err(Error::Config(format!("{k} must have a positive transistor cost"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCost {
    pub gate_count: usize,
    pub transistor_count: u32,
}

pub fn cell_cost(kind: CellKind, model: &CostModel) -> CellCost {
    let net = netlist(kind);
    CellCost {
        gate_count: net.gate_count(),
        transistor_count: net.gates().iter().map(|g| model.cost(g.kind)).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> impl Iterator<Item = (bool, bool, bool)> {
        (0..8).map(unpack_row)
    }

    #[test]
    fn accurate_p1a_is_plus_one() {
        for (a, b, c) in rows() {
            let out = eval_cell(CellKind::AccurateP1a, a, b, c).unwrap();
            assert_eq!(out.value(), a as u8 + b as u8 + c as u8 + 1, "row {a}{b}{c}");
            assert_eq!(out.cout2, Some(a & b & c));
        }
    }

    #[test]
    fn approx_p1a_errs_on_two_rows() {
        for (a, b, c) in rows() {
            let out = eval_cell(CellKind::ApproxP1a, a, b, c).unwrap();
            let exact = a as u8 + b as u8 + c as u8;
            let starred = (a, b, c) == (true, false, false) || (a, b, c) == (true, true, true);
            let expected = if starred { exact } else { exact + 1 };
            assert_eq!(out.value(), expected, "row {a}{b}{c}");
            assert_eq!(out.cout2, None);
        }
    }

    #[test]
    fn accurate_sop_matches_printed_form_off_the_all_ones_row() {
        let net = netlist(CellKind::AccurateP1a);
        for (a, b, c) in rows() {
            let printed = (a & c) | (b & a) | (b & c) | (!a & !b & !c);
            assert_eq!(net.probe(&[a, b, c], "sop").unwrap(), printed);
            let sum = eval_cell(CellKind::AccurateP1a, a, b, c).unwrap().sum;
            assert_eq!(sum == printed, !(a & b & c));
        }
    }

    #[test]
    fn fa_and_hadd_match_their_equations() {
        for (a, b, c) in rows() {
            let fa = eval_cell(CellKind::Fa, a, b, c).unwrap();
            assert_eq!(fa.sum, a ^ b ^ c);
            assert_eq!(fa.cout, (a & b) | (c & (a ^ b)));
            let hadd = eval_cell(CellKind::Hadd, a, b, c).unwrap();
            assert_eq!(hadd.sum, (a | c) ^ b);
            assert_eq!(hadd.cout, (a | c) & b);
        }
        let mismatches = rows()
            .filter(|&(a, b, c)| {
                let fa = eval_cell(CellKind::Fa, a, b, c).unwrap().value();
                fa != eval_cell(CellKind::Hadd, a, b, c).unwrap().value()
            })
            .count();
        assert_eq!(mismatches, 2);
    }

    #[test]
    fn half_adder_rejects_carry_in() {
        assert!(matches!(
            eval_cell(CellKind::Ha, true, false, true),
            Err(Error::InvalidInput { kind: CellKind::Ha, .. })
        ));
        assert_eq!(eval_cell(CellKind::Ha, true, true, false).unwrap().value(), 2);
    }

    #[test]
    fn gate_counts() {
        let m = CostModel::default();
        assert_eq!(cell_cost(CellKind::ApproxP1a, &m).gate_count, 3);
        assert_eq!(cell_cost(CellKind::Fa, &m).gate_count, 5);
        assert_eq!(cell_cost(CellKind::Fa, &m).transistor_count, 34);
        assert_eq!(cell_cost(CellKind::ApproxP1a, &m).transistor_count, 20);
    }

    #[test]
    fn cost_model_rejects_zero() {
        let m = CostModel { not: 0, ..CostModel::default() };
        assert!(m.validate().is_err());
        assert!(CostModel::default().validate().is_ok());
    }

    #[test]
    fn cout2_only_on_accurate_p1a() {
        assert!(critical_path(CellKind::Fa, OutputPort::Cout2).is_err());
        assert_eq!(critical_path(CellKind::AccurateP1a, OutputPort::Cout2).unwrap(), 1);
    }

    #[test]
    fn kind_names_parse() {
        for k in CellKind::ALL {
            assert_eq!(k.as_str().parse::<CellKind>().unwrap(), k);
        }
        assert_eq!("approx_p1a".parse::<CellKind>().unwrap(), CellKind::ApproxP1a);
        assert!("xyz".parse::<CellKind>().is_err());
    }
}
