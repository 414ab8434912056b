//! SPICE netlist emission.
//!
//! Each comparator becomes `.SUBCKT TIQ_COMP_<i> IN OUT VDD VSS` holding
//! the two cascaded inverters (and optionally the two booster inverters).
//! The inter-inverter node of comparator `i` is `N<i>_MID`.

use crate::codes::{self, GateKind, Signal};
use crate::devices::{DeviceParams, DEFAULT_LENGTH_UM};
use crate::synthesis::ComparatorBank;
use crate::{Error, Result};

/// Mapping of the encoder logic onto gate subcircuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateStyle {
    /// OR2, AND2 and INV cells.
    #[default]
    Or2,
    /// Only NAND2 and INV cells: `a + b = NAND(!a, !b)`, `a b = !NAND(a, b)`.
    NandMapped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiceEmitOptions {
    pub model_name_n: String,
    pub model_name_p: String,
    pub include_boosters: bool,
    pub booster_wp: f64,
    pub booster_wn: f64,
    pub booster_l: f64,
    /// Also emit the one-hot generator, fat-tree encoder and a top-level
    /// `TIQ_ADC` subcircuit.
    pub include_encoder: bool,
    pub gate_style: GateStyle,
    /// Emit level-1 `.MODEL` cards from these parameters.
    pub model_card: Option<DeviceParams>,
}

impl Default for SpiceEmitOptions {
    fn default() -> Self {
        SpiceEmitOptions {
            model_name_n: "NMOS_TIQ".into(),
            model_name_p: "PMOS_TIQ".into(),
            include_boosters: false,
            booster_wp: 0.5,
            booster_wn: 0.5,
            booster_l: DEFAULT_LENGTH_UM,
            include_encoder: false,
            gate_style: GateStyle::Or2,
            model_card: None,
        }
    }
}

impl SpiceEmitOptions {
    pub fn validate(&self) -> Result<()> {
        for name in [&self.model_name_n, &self.model_name_p] {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidIdentifier(name.clone()));
            }
        }
        for v in [self.booster_wp, self.booster_wn, self.booster_l] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidGeometry(
                    "booster dimensions must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

const LOGIC_WN: f64 = 0.5;
const LOGIC_WP: f64 = 1.0;

struct Writer<'a> {
    out: String,
    opts: &'a SpiceEmitOptions,
    device: usize,
}

impl Writer<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn mos(&mut self, d: &str, g: &str, s: &str, pmos: bool, w: f64, l: f64) {
        self.device += 1;
        let model = if pmos {
            &self.opts.model_name_p
        } else {
            &self.opts.model_name_n
        };
        let line = format!(
            "M{} {d} {g} {s} {s} {model} W={w:.4}u L={l:.4}u",
            self.device
        );
        self.line(line);
    }

    fn inverter(&mut self, out: &str, inp: &str, wp: f64, wn: f64, l: f64) {
        self.mos(out, inp, "VDD", true, wp, l);
        self.mos(out, inp, "VSS", false, wn, l);
    }

    fn begin(&mut self, header: &str) {
        self.device = 0;
        self.line(format!(".SUBCKT {header}"));
    }
}

/// Renders the bank as a SPICE netlist ending in `.END`.
pub fn emit_spice(bank: &ComparatorBank, opts: &SpiceEmitOptions) -> Result<String> {
    opts.validate()?;
    bank.validate()?;
    let mut w = Writer {
        out: String::new(),
        opts,
        device: 0,
    };
    let m = bank.designs.len();
    w.line(format!(
        "* TIQ flash ADC comparator bank: {} bits, {m} comparators, VDD = {} V",
        bank.n_bits,
        bank.vdd()
    ));
    if let Some(p) = &opts.model_card {
        w.line(format!(
            ".MODEL {} NMOS (LEVEL=1 VTO={} KP={}u LAMBDA={} UO={})",
            opts.model_name_n, p.vtn, p.kprime_n, p.lambda_n, p.mu_n
        ));
        w.line(format!(
            ".MODEL {} PMOS (LEVEL=1 VTO={} KP={}u LAMBDA={} UO={})",
            opts.model_name_p, -p.vtp_mag, p.kprime_p, p.lambda_p, p.mu_p
        ));
    }

    for (i, d) in bank.designs.iter().enumerate() {
        w.line("");
        w.begin(&format!("TIQ_COMP_{i} IN OUT VDD VSS"));
        let mid = format!("N{i}_MID");
        if opts.include_boosters {
            let cmp = format!("N{i}_CMP");
            let bst = format!("N{i}_BST");
            w.inverter(&mid, "IN", d.wp, d.wn, d.l);
            w.inverter(&cmp, &mid, d.wp, d.wn, d.l);
            w.inverter(&bst, &cmp, opts.booster_wp, opts.booster_wn, opts.booster_l);
            w.inverter(
                "OUT",
                &bst,
                opts.booster_wp,
                opts.booster_wn,
                opts.booster_l,
            );
        } else {
            w.inverter(&mid, "IN", d.wp, d.wn, d.l);
            w.inverter("OUT", &mid, d.wp, d.wn, d.l);
        }
        w.line(format!(".ENDS TIQ_COMP_{i}"));
    }

    if opts.include_encoder {
        emit_encoder(&mut w, bank.n_bits)?;
    }
    w.line("");
    w.line(".END");
    Ok(w.out)
}

fn emit_cells(w: &mut Writer, style: GateStyle) {
    let l = DEFAULT_LENGTH_UM;
    w.line("");
    w.begin("INV A Y VDD VSS");
    w.inverter("Y", "A", LOGIC_WP, LOGIC_WN, l);
    w.line(".ENDS INV");

    w.line("");
    w.begin("NAND2 A B Y VDD VSS");
    w.mos("Y", "A", "VDD", true, LOGIC_WP, l);
    w.mos("Y", "B", "VDD", true, LOGIC_WP, l);
    nmos_stack(w, "Y", "A", "B", l);
    w.line(".ENDS NAND2");

    if style == GateStyle::Or2 {
        w.line("");
        w.begin("AND2 A B Y VDD VSS");
        w.mos("NY", "A", "VDD", true, LOGIC_WP, l);
        w.mos("NY", "B", "VDD", true, LOGIC_WP, l);
        nmos_stack(w, "NY", "A", "B", l);
        w.inverter("Y", "NY", LOGIC_WP, LOGIC_WN, l);
        w.line(".ENDS AND2");

        w.line("");
        w.begin("OR2 A B Y VDD VSS");
        pmos_stack(w, "NY", "A", "B", l);
        w.mos("NY", "A", "VSS", false, LOGIC_WN, l);
        w.mos("NY", "B", "VSS", false, LOGIC_WN, l);
        w.inverter("Y", "NY", LOGIC_WP, LOGIC_WN, l);
        w.line(".ENDS OR2");
    }
}

fn nmos_stack(w: &mut Writer, out: &str, a: &str, b: &str, l: f64) {
    w.device += 1;
    let n = &w.opts.model_name_n;
    let first = format!(
        "M{} {out} {a} X1 VSS {n} W={LOGIC_WN:.4}u L={l:.4}u",
        w.device
    );
    w.device += 1;
    let second = format!(
        "M{} X1 {b} VSS VSS {n} W={LOGIC_WN:.4}u L={l:.4}u",
        w.device
    );
    w.line(first);
    w.line(second);
}

fn pmos_stack(w: &mut Writer, out: &str, a: &str, b: &str, l: f64) {
    w.device += 1;
    let p = &w.opts.model_name_p;
    let first = format!(
        "M{} X1 {a} VDD VDD {p} W={LOGIC_WP:.4}u L={l:.4}u",
        w.device
    );
    w.device += 1;
    let second = format!(
        "M{} {out} {b} X1 VDD {p} W={LOGIC_WP:.4}u L={l:.4}u",
        w.device
    );
    w.line(first);
    w.line(second);
}

fn emit_encoder(w: &mut Writer, n_bits: u32) -> Result<()> {
    let style = w.opts.gate_style;
    emit_cells(w, style);
    let net = codes::build_fused_encoder(n_bits)?;
    let m = net.n_inputs;

    let mut net_name: Vec<String> = (0..net.gates.len()).map(|g| format!("E{g}")).collect();
    for (bit, &s) in net.outputs.iter().enumerate() {
        if let Signal::Gate(g) = s {
            net_name[g] = format!("B{bit}");
        }
    }
    let name_of = |s: Signal| match s {
        Signal::Input(i) => format!("T{i}"),
        Signal::Gate(g) => net_name[g].clone(),
    };

    let bits: Vec<String> = (0..n_bits).rev().map(|b| format!("B{b}")).collect();
    w.line("");
    w.line(format!(".SUBCKT TIQ_ADC VIN {} VDD VSS", bits.join(" ")));
    for i in 0..m {
        w.line(format!("XC{i} VIN T{i} VDD VSS TIQ_COMP_{i}"));
    }
    for (id, g) in net.gates.iter().enumerate() {
        let ins: Vec<String> = g.inputs.iter().map(|&s| name_of(s)).collect();
        let y = &net_name[id];
        match (style, g.kind) {
            (_, GateKind::Not) => w.line(format!("XG{id} {} {y} VDD VSS INV", ins[0])),
            (GateStyle::Or2, GateKind::Or2) => {
                w.line(format!("XG{id} {} {} {y} VDD VSS OR2", ins[0], ins[1]))
            }
            (GateStyle::Or2, GateKind::And2) => {
                w.line(format!("XG{id} {} {} {y} VDD VSS AND2", ins[0], ins[1]))
            }
            (GateStyle::NandMapped, GateKind::Or2) => {
                w.line(format!("XG{id}A {} E{id}_A VDD VSS INV", ins[0]));
                w.line(format!("XG{id}B {} E{id}_B VDD VSS INV", ins[1]));
                w.line(format!("XG{id} E{id}_A E{id}_B {y} VDD VSS NAND2"));
            }
            (GateStyle::NandMapped, GateKind::And2) => {
                w.line(format!(
                    "XG{id}N {} {} E{id}_N VDD VSS NAND2",
                    ins[0], ins[1]
                ));
                w.line(format!("XG{id} E{id}_N {y} VDD VSS INV"));
            }
        }
    }
    w.line(".ENDS TIQ_ADC");
    Ok(())
}
