//! Boolean gate netlists for single-bit cells.
//!
//! A [`CellNetlist`] is a small combinational DAG. Gates are stored in
//! topological order: every gate input must be a primary input or the
//! output of an earlier gate. Construction validates this and resolves
//! net names to slot indices once, so evaluation is a single linear pass.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Not,
    And2,
    Or2,
    Xor2,
    Xnor2,
    And3,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Not,
        GateKind::And2,
        GateKind::Or2,
        GateKind::Xor2,
        GateKind::Xnor2,
        GateKind::And3,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::And3 => 3,
            _ => 2,
        }
    }

    fn apply(self, ins: &[bool]) -> bool {
        match self {
            GateKind::Not => !ins[0],
            GateKind::And2 => ins[0] & ins[1],
            GateKind::Or2 => ins[0] | ins[1],
            GateKind::Xor2 => ins[0] ^ ins[1],
            GateKind::Xnor2 => !(ins[0] ^ ins[1]),
            GateKind::And3 => ins[0] & ins[1] & ins[2],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Not => "NOT",
            GateKind::And2 => "AND2",
            GateKind::Or2 => "OR2",
            GateKind::Xor2 => "XOR2",
            GateKind::Xnor2 => "XNOR2",
            GateKind::And3 => "AND3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub output: String,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: &[&str], output: &str) -> Self {
        Gate {
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct RawNetlist {
    name: String,
    inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<String>,
}

impl TryFrom<RawNetlist> for CellNetlist {
    type Error = Error;

    fn try_from(raw: RawNetlist) -> Result<Self> {
        CellNetlist::new(raw.name, raw.inputs, raw.gates, raw.outputs)
    }
}

/// A validated, topologically ordered gate netlist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNetlist")]
pub struct CellNetlist {
    name: String,
    inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<String>,
    #[serde(skip)]
    wiring: Vec<Vec<usize>>,
    #[serde(skip)]
    output_slots: Vec<usize>,
}

impl CellNetlist {
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        gates: Vec<Gate>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        let fail = |reason: String| Error::Netlist {
            netlist: name.clone(),
            reason,
        };

        let mut slots: HashMap<&str, usize> = HashMap::new();
        for (i, net) in inputs.iter().enumerate() {
            if slots.insert(net.as_str(), i).is_some() {
                return Err(fail(format!("duplicate primary input `{net}`")));
            }
        }

        let mut wiring = Vec::with_capacity(gates.len());
        for (g, gate) in gates.iter().enumerate() {
            if gate.inputs.len() != gate.kind.arity() {
                return Err(fail(format!(
                    "{} driving `{}` has {} inputs, expected {}",
                    gate.kind,
                    gate.output,
                    gate.inputs.len(),
                    gate.kind.arity()
                )));
            }
            let mut ins = Vec::with_capacity(gate.inputs.len());
            for net in &gate.inputs {
                match slots.get(net.as_str()) {
                    Some(&slot) => ins.push(slot),
                    None => {
                        return Err(fail(format!(
                            "net `{net}` used by `{}` before it is defined",
                            gate.output
                        )))
                    }
                }
            }
            if slots.insert(gate.output.as_str(), inputs.len() + g).is_some() {
                return Err(fail(format!("net `{}` is driven twice", gate.output)));
            }
            wiring.push(ins);
        }

        let output_slots = outputs
            .iter()
            .map(|net| {
                slots
                    .get(net.as_str())
                    .copied()
                    .ok_or_else(|| fail(format!("output `{net}` is never driven")))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(CellNetlist {
            name,
            inputs,
            gates,
            outputs,
            wiring,
            output_slots,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn slot_of(&self, net: &str) -> Option<usize> {
        if let Some(i) = self.inputs.iter().position(|n| n == net) {
            return Some(i);
        }
        self.gates
            .iter()
            .position(|g| g.output == net)
            .map(|g| self.inputs.len() + g)
    }

    fn simulate(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::Netlist {
                netlist: self.name.clone(),
                reason: format!(
                    "expected {} input values, got {}",
                    self.inputs.len(),
                    inputs.len()
                ),
            });
        }
        let mut values = Vec::with_capacity(self.inputs.len() + self.gates.len());
        values.extend_from_slice(inputs);
        let mut scratch = [false; 3];
        for (gate, ins) in self.gates.iter().zip(&self.wiring) {
            for (s, &slot) in scratch.iter_mut().zip(ins) {
                *s = values[slot];
            }
            values.push(gate.kind.apply(&scratch[..ins.len()]));
        }
        Ok(values)
    }

    /// Evaluates the netlist, returning output values in declaration order.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let values = self.simulate(inputs)?;
        Ok(self.output_slots.iter().map(|&s| values[s]).collect())
    }

    /// Evaluates the netlist and returns the value of an arbitrary net.
    pub fn probe(&self, inputs: &[bool], net: &str) -> Result<bool> {
        let slot = self.slot_of(net).ok_or_else(|| Error::Netlist {
            netlist: self.name.clone(),
            reason: format!("no net named `{net}`"),
        })?;
        Ok(self.simulate(inputs)?[slot])
    }

    /// Longest path, in gates, from any primary input to `net`.
    ///
    /// Every gate contributes one unit regardless of kind. A primary input
    /// has depth 0.
    pub fn depth(&self, net: &str) -> Option<u32> {
        let slot = self.slot_of(net)?;
        let mut arrival = vec![0u32; self.inputs.len()];
        for ins in &self.wiring {
            let latest = ins.iter().map(|&s| arrival[s]).max().unwrap_or(0);
            arrival.push(latest + 1);
        }
        Some(arrival[slot])
    }

    pub fn gate_histogram(&self) -> Vec<(GateKind, usize)> {
        GateKind::ALL
            .iter()
            .map(|&k| (k, self.gates.iter().filter(|g| g.kind == k).count()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nets(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rejects_use_before_definition() {
        let gates = vec![
            Gate::new(GateKind::Or2, &["A", "t"], "y"),
            Gate::new(GateKind::Not, &["A"], "t"),
        ];
        let err = CellNetlist::new("bad", nets(&["A"]), gates, nets(&["y"])).unwrap_err();
        assert!(matches!(err, Error::Netlist { .. }));
    }

    #[test]
    fn rejects_wrong_arity() {
        let gates = vec![Gate::new(GateKind::And3, &["A", "B"], "y")];
        assert!(CellNetlist::new("bad", nets(&["A", "B"]), gates, nets(&["y"])).is_err());
    }

    #[test]
    fn rejects_double_driver() {
        let gates = vec![
            Gate::new(GateKind::Not, &["A"], "y"),
            Gate::new(GateKind::Not, &["A"], "y"),
        ];
        assert!(CellNetlist::new("bad", nets(&["A"]), gates, nets(&["y"])).is_err());
    }

    #[test]
    fn rejects_undriven_output() {
        let gates = vec![Gate::new(GateKind::Not, &["A"], "y")];
        assert!(CellNetlist::new("bad", nets(&["A"]), gates, nets(&["z"])).is_err());
    }

    #[test]
    fn depth_counts_gates() {
        let gates = vec![
            Gate::new(GateKind::Not, &["A"], "n"),
            Gate::new(GateKind::And2, &["n", "B"], "y"),
            Gate::new(GateKind::Or2, &["A", "B"], "z"),
        ];
        let n = CellNetlist::new("t", nets(&["A", "B"]), gates, nets(&["y", "z"])).unwrap();
        assert_eq!(n.depth("y"), Some(2));
        assert_eq!(n.depth("z"), Some(1));
        assert_eq!(n.depth("A"), Some(0));
        assert_eq!(n.depth("nope"), None);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let gates = vec![Gate::new(GateKind::Xnor2, &["A", "B"], "y")];
        let n = CellNetlist::new("t", nets(&["A", "B"]), gates, nets(&["y"])).unwrap();
        let json = serde_json::to_string(&n).unwrap();
        assert!(json.contains(r#""kind":"XNOR2","in":["A","B"],"out":"y""#));
        let back: CellNetlist = serde_json::from_str(&json).unwrap();
        assert_eq!(back, n);
        assert_eq!(back.evaluate(&[true, true]).unwrap(), vec![true]);

        let broken = json.replace(r#""out":"y""#, r#""out":"w""#);
        assert!(serde_json::from_str::<CellNetlist>(&broken).is_err());
    }
}
