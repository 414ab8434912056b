//! Gate-netlist text format, one statement per line:
//!
//! ```text
//! I<index>                      primary input (all inputs first)
//! G<id> <KIND> <in1> [<in2>]    gate, KIND in OR2 | AND2 | NOT
//! O<bit> <ref>                  output, highest bit first
//! ```
//!
//! `<ref>` is `I<index>` or `G<id>`.

use std::fmt::Write as _;

use crate::codes::{Gate, GateKind, GateNetlist, Signal};
use crate::{Error, Result};

fn fmt_ref(s: Signal) -> String {
    match s {
        Signal::Input(i) => format!("I{i}"),
        Signal::Gate(g) => format!("G{g}"),
    }
}

pub fn netlist_to_text(net: &GateNetlist) -> String {
    let mut out = String::new();
    for i in 0..net.n_inputs {
        writeln!(out, "I{i}").unwrap();
    }
    for (id, g) in net.gates.iter().enumerate() {
        write!(out, "G{id} {}", g.kind.name()).unwrap();
        for &s in &g.inputs {
            write!(out, " {}", fmt_ref(s)).unwrap();
        }
        out.push('\n');
    }
    for (bit, &s) in net.outputs.iter().enumerate().rev() {
        writeln!(out, "O{bit} {}", fmt_ref(s)).unwrap();
    }
    out
}

fn index(tok: &str, prefix: char, line: usize) -> Result<usize> {
    tok.strip_prefix(prefix)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse {
            path: format!("line {line}"),
            message: format!("expected {prefix}<number>, found `{tok}`"),
        })
}

fn parse_ref(tok: &str, line: usize) -> Result<Signal> {
    if tok.starts_with('I') {
        index(tok, 'I', line).map(Signal::Input)
    } else {
        index(tok, 'G', line).map(Signal::Gate)
    }
}

/// Parses the text format and validates the resulting DAG.
pub fn netlist_from_text(text: &str) -> Result<GateNetlist> {
    let mut n_inputs = 0;
    let mut gates = Vec::new();
    let mut outputs: Vec<(usize, Signal)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let err = |message: String| Error::Parse {
            path: format!("line {line}"),
            message,
        };
        match toks.first().and_then(|t| t.chars().next()) {
            None => continue,
            Some('I') if toks.len() == 1 => {
                if index(toks[0], 'I', line)? != n_inputs || !gates.is_empty() {
                    return Err(err("inputs must be declared first and in order".into()));
                }
                n_inputs += 1;
            }
            Some('G') if toks.len() >= 3 => {
                if index(toks[0], 'G', line)? != gates.len() || !outputs.is_empty() {
                    return Err(err("gates must be numbered in order before outputs".into()));
                }
                let kind = GateKind::from_name(toks[1])
                    .ok_or_else(|| err(format!("unknown gate kind `{}`", toks[1])))?;
                let inputs = toks[2..]
                    .iter()
                    .map(|t| parse_ref(t, line))
                    .collect::<Result<Vec<_>>>()?;
                gates.push(Gate { kind, inputs });
            }
            Some('O') if toks.len() == 2 => {
                outputs.push((index(toks[0], 'O', line)?, parse_ref(toks[1], line)?));
            }
            _ => return Err(err(format!("unrecognized statement `{raw}`"))),
        }
    }
    outputs.sort_by_key(|&(bit, _)| bit);
    if outputs.iter().enumerate().any(|(k, &(bit, _))| k != bit) {
        return Err(Error::Parse {
            path: "outputs".into(),
            message: "output bits must be 0..n without gaps".into(),
        });
    }
    let net = GateNetlist {
        n_inputs,
        gates,
        outputs: outputs.into_iter().map(|(_, s)| s).collect(),
    };
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_fat_tree, build_fused_encoder};

    #[test]
    fn two_bit_text() {
        let text = netlist_to_text(&build_fat_tree(2).unwrap());
        assert_eq!(
            text,
            "I0\nI1\nI2\nG0 OR2 I2 I1\nG1 OR2 I2 I0\nO1 G0\nO0 G1\n"
        );
    }

    #[test]
    fn parse_back() {
        for net in [build_fat_tree(4).unwrap(), build_fused_encoder(3).unwrap()] {
            assert_eq!(netlist_from_text(&netlist_to_text(&net)).unwrap(), net);
        }
    }

    #[test]
    fn parse_errors_name_line() {
        let e = netlist_from_text("I0\nI1\nG0 XOR2 I0 I1\nO0 G0\n").unwrap_err();
        assert!(
            matches!(e, Error::Parse { ref path, .. } if path == "line 3"),
            "{e}"
        );
        assert!(netlist_from_text("I0\nG0 OR2 I0 G1\nO0 G0\n").is_err());
    }
}
