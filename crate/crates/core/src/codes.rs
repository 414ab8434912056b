//! Digital back end: code types, the 1-out-of-n generator and the fat-tree
//! encoder.
//!
//! With `m = 2^n - 1` comparators, thermometer bit `i` is the output of the
//! comparator with the `i`-th lowest threshold. The one-hot generator
//! computes `a[i] = t[i] AND NOT t[i+1]` (with `t[m] = 0`), and output bit
//! `k` of the encoder is the OR of every leaf `a[j-1]` whose code `j` has bit
//! `k` set, built as a balanced tree of 2-input ORs.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Comparator outputs, lowest threshold first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThermometerCode {
    pub bits: Vec<bool>,
}

impl ThermometerCode {
    pub fn new(bits: Vec<bool>) -> Self {
        ThermometerCode { bits }
    }

    /// Well-formed code of width `m` with the lowest `level` bits set.
    pub fn from_level(m: usize, level: usize) -> Self {
        ThermometerCode {
            bits: (0..m).map(|i| i < level).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Index of the first set bit lying above a cleared bit.
    pub fn first_bubble(&self) -> Option<usize> {
        let first_clear = self.bits.iter().position(|&b| !b)?;
        self.bits[first_clear..]
            .iter()
            .position(|&b| b)
            .map(|p| p + first_clear)
    }

    pub fn validate(&self) -> Result<()> {
        match self.first_bubble() {
            Some(index) => Err(Error::Bubble { index }),
            None => Ok(()),
        }
    }
}

/// 1-out-of-m code: at most one bit set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneHotCode {
    pub bits: Vec<bool>,
}

impl OneHotCode {
    /// Unchecked constructor; see [`OneHotCode::validate`].
    pub fn new(bits: Vec<bool>) -> Self {
        OneHotCode { bits }
    }

    /// Width-`m` code with `hot` set, or all clear for `None`.
    pub fn from_index(m: usize, hot: Option<usize>) -> Self {
        OneHotCode {
            bits: (0..m).map(|i| Some(i) == hot).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn hot_index(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b)
    }

    pub fn validate(&self) -> Result<()> {
        let set = self.bits.iter().filter(|&&b| b).count();
        if set > 1 {
            return Err(Error::InvalidOneHot { set });
        }
        Ok(())
    }
}

/// An `n_bits`-wide unsigned output code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryCode {
    pub value: u32,
    pub n_bits: u32,
}

impl BinaryCode {
    pub fn new(value: u32, n_bits: u32) -> Result<Self> {
        if n_bits == 0 || n_bits > 31 || value >= (1u32 << n_bits) {
            return Err(Error::InvalidParams(format!(
                "value {value} does not fit in {n_bits} bits"
            )));
        }
        Ok(BinaryCode { value, n_bits })
    }

    pub fn bit(&self, k: u32) -> bool {
        (self.value >> k) & 1 == 1
    }
}

/// Number of comparators (and one-hot leaves) of an `n`-bit converter.
pub fn leaf_count(n_bits: u32) -> usize {
    (1usize << n_bits) - 1
}

/// One-hot generator: `a[i] = t[i] AND NOT t[i+1]`.
pub fn one_hot_from_thermometer(t: &ThermometerCode) -> Result<OneHotCode> {
    t.validate()?;
    let m = t.len();
    Ok(OneHotCode {
        bits: (0..m)
            .map(|i| t.bits[i] && !t.bits.get(i + 1).copied().unwrap_or(false))
            .collect(),
    })
}

/// Reference ROM encoder: leaf `i` set encodes `i + 1`, no leaf encodes 0.
pub fn rom_encoder_oracle(a: &OneHotCode, n_bits: u32) -> Result<BinaryCode> {
    check_bits(n_bits)?;
    let m = leaf_count(n_bits);
    if a.len() != m {
        return Err(Error::Arity {
            expected: m,
            got: a.len(),
        });
    }
    a.validate()?;
    let value = a.hot_index().map_or(0, |i| i as u32 + 1);
    BinaryCode::new(value, n_bits)
}

fn check_bits(n_bits: u32) -> Result<()> {
    if n_bits < 2 {
        return Err(Error::DegenerateResolution);
    }
    if n_bits > 16 {
        return Err(Error::InvalidParams("resolution must be <= 16".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Or2,
    And2,
    Not,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Or2 | GateKind::And2 => 2,
            GateKind::Not => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Or2 => "OR2",
            GateKind::And2 => "AND2",
            GateKind::Not => "NOT",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "OR2" => Some(GateKind::Or2),
            "AND2" => Some(GateKind::And2),
            "NOT" => Some(GateKind::Not),
            _ => None,
        }
    }
}

/// A netlist signal: a primary input or the output of an earlier gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<Signal>,
}

/// Combinational DAG in topological order. Gate ids are positions in
/// `gates`; `outputs[k]` drives `Bit_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateNetlist {
    pub n_inputs: usize,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Signal>,
}

impl GateNetlist {
    pub fn validate(&self) -> Result<()> {
        let ok = |s: Signal, before: usize| match s {
            Signal::Input(i) => i < self.n_inputs,
            Signal::Gate(g) => g < before,
        };
        for (id, gate) in self.gates.iter().enumerate() {
            if gate.inputs.len() != gate.kind.arity() {
                return Err(Error::Arity {
                    expected: gate.kind.arity(),
                    got: gate.inputs.len(),
                });
            }
            if let Some(bad) = gate.inputs.iter().find(|&&s| !ok(s, id)) {
                return Err(Error::InvalidParams(format!(
                    "gate G{id} input {bad:?} does not precede it"
                )));
            }
        }
        if let Some(bad) = self.outputs.iter().find(|&&s| !ok(s, self.gates.len())) {
            return Err(Error::InvalidParams(format!("output {bad:?} is undefined")));
        }
        Ok(())
    }

    /// Evaluates every output bit for the given primary inputs.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.n_inputs {
            return Err(Error::Arity {
                expected: self.n_inputs,
                got: inputs.len(),
            });
        }
        let mut values = Vec::with_capacity(self.gates.len());
        let read = |values: &[bool], s: Signal| match s {
            Signal::Input(i) => inputs[i],
            Signal::Gate(g) => values[g],
        };
        for gate in &self.gates {
            let v = match gate.kind {
                GateKind::Or2 => read(&values, gate.inputs[0]) || read(&values, gate.inputs[1]),
                GateKind::And2 => read(&values, gate.inputs[0]) && read(&values, gate.inputs[1]),
                GateKind::Not => !read(&values, gate.inputs[0]),
            };
            values.push(v);
        }
        Ok(self.outputs.iter().map(|&s| read(&values, s)).collect())
    }

    /// Evaluates and packs the outputs into a binary code.
    pub fn evaluate_code(&self, inputs: &[bool]) -> Result<BinaryCode> {
        let bits = self.evaluate(inputs)?;
        let value = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, &b)| acc | (u32::from(b) << k));
        BinaryCode::new(value, bits.len() as u32)
    }
}

fn push(gates: &mut Vec<Gate>, kind: GateKind, inputs: Vec<Signal>) -> Signal {
    gates.push(Gate { kind, inputs });
    Signal::Gate(gates.len() - 1)
}

/// Appends one balanced OR tree per output bit over `leaves` (leaf `i`
/// encodes code `i + 1`) and returns the roots, `Bit_0` first.
fn append_or_trees(gates: &mut Vec<Gate>, leaves: &[Signal], n_bits: u32) -> Vec<Signal> {
    let mut roots = vec![Signal::Input(0); n_bits as usize];
    for k in (0..n_bits).rev() {
        // Descending leaf order, paired left to right.
        let mut level: Vec<Signal> = (1..=leaves.len())
            .rev()
            .filter(|j| (j >> k) & 1 == 1)
            .map(|j| leaves[j - 1])
            .collect();
        assert!(
            level.len().is_power_of_two(),
            "OR tree for bit {k} has {} leaves",
            level.len()
        );
        while level.len() > 1 {
            level = level
                .chunks(2)
                .map(|pair| push(gates, GateKind::Or2, pair.to_vec()))
                .collect();
        }
        roots[k as usize] = level[0];
    }
    roots
}

/// Fat-tree encoder whose inputs are the `2^n - 1` one-hot leaves.
pub fn build_fat_tree(n_bits: u32) -> Result<GateNetlist> {
    check_bits(n_bits)?;
    let m = leaf_count(n_bits);
    let leaves: Vec<Signal> = (0..m).map(Signal::Input).collect();
    let mut gates = Vec::new();
    let outputs = append_or_trees(&mut gates, &leaves, n_bits);
    Ok(GateNetlist {
        n_inputs: m,
        gates,
        outputs,
    })
}

/// One-hot generator fused in front of the fat tree; inputs are the
/// thermometer bits.
pub fn build_fused_encoder(n_bits: u32) -> Result<GateNetlist> {
    check_bits(n_bits)?;
    let m = leaf_count(n_bits);
    let mut gates = Vec::new();
    let mut leaves = Vec::with_capacity(m);
    for i in 0..m - 1 {
        let upper_low = push(&mut gates, GateKind::Not, vec![Signal::Input(i + 1)]);
        leaves.push(push(
            &mut gates,
            GateKind::And2,
            vec![Signal::Input(i), upper_low],
        ));
    }
    // t[m] is a constant 0, so the top leaf is the top thermometer bit.
    leaves.push(Signal::Input(m - 1));
    let outputs = append_or_trees(&mut gates, &leaves, n_bits);
    Ok(GateNetlist {
        n_inputs: m,
        gates,
        outputs,
    })
}

/// Fat-tree output for a one-hot input.
pub fn eval_netlist(net: &GateNetlist, a: &OneHotCode) -> Result<BinaryCode> {
    net.evaluate_code(&a.bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetlistStats {
    pub gate_count: usize,
    pub or_count: usize,
    pub and_count: usize,
    pub not_count: usize,
    /// OR levels from the leaves to each output, `Bit_0` first.
    pub or_depth_per_output: Vec<usize>,
    /// OR gates in the cone of each output, `Bit_0` first.
    pub or_gates_per_output: Vec<usize>,
    /// True when the AND/NOT one-hot stage is part of the netlist; it adds
    /// one level in front of the OR depth.
    pub leaf_stage: bool,
}

impl NetlistStats {
    pub fn max_or_depth(&self) -> usize {
        self.or_depth_per_output.iter().copied().max().unwrap_or(0)
    }
}

pub fn netlist_stats(net: &GateNetlist) -> NetlistStats {
    let mut or_depth = Vec::with_capacity(net.gates.len());
    let depth_of = |d: &[usize], s: Signal| match s {
        Signal::Input(_) => 0,
        Signal::Gate(g) => d[g],
    };
    for gate in &net.gates {
        let base = gate
            .inputs
            .iter()
            .map(|&s| depth_of(&or_depth, s))
            .max()
            .unwrap_or(0);
        or_depth.push(base + usize::from(gate.kind == GateKind::Or2));
    }
    let count = |k: GateKind| net.gates.iter().filter(|g| g.kind == k).count();
    let cone_ors = |root: Signal| {
        let mut seen = vec![false; net.gates.len()];
        let mut stack = vec![root];
        let mut n = 0;
        while let Some(s) = stack.pop() {
            if let Signal::Gate(g) = s {
                if !std::mem::replace(&mut seen[g], true) {
                    n += usize::from(net.gates[g].kind == GateKind::Or2);
                    stack.extend(net.gates[g].inputs.iter().copied());
                }
            }
        }
        n
    };
    NetlistStats {
        gate_count: net.gates.len(),
        or_count: count(GateKind::Or2),
        and_count: count(GateKind::And2),
        not_count: count(GateKind::Not),
        or_depth_per_output: net
            .outputs
            .iter()
            .map(|&s| depth_of(&or_depth, s))
            .collect(),
        or_gates_per_output: net.outputs.iter().map(|&s| cone_ors(s)).collect(),
        leaf_stage: net.gates.iter().any(|g| g.kind != GateKind::Or2),
    }
}
