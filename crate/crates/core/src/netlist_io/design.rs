use serde::{Deserialize, Serialize};

use crate::synthesis::{ComparatorBank, ComparatorDesign, ReferenceLadder, MAX_BITS};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignDoc {
    n_bits: u32,
    vdd: f64,
    ladder: LadderDoc,
    designs: Vec<DesignRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderDoc {
    v_low: f64,
    v_high: f64,
    v_lsb: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignRow {
    wp: f64,
    wn: f64,
    l: f64,
    v_ref_achieved: f64,
    v_ref_ideal: f64,
}

/// Serializes a bank. Floats use the shortest representation that parses
/// back to the identical value.
pub fn save_design(bank: &ComparatorBank) -> String {
    let doc = DesignDoc {
        n_bits: bank.n_bits,
        vdd: bank.vdd(),
        ladder: LadderDoc {
            v_low: bank.ladder.v_low,
            v_high: bank.ladder.v_high,
            v_lsb: bank.ladder.v_lsb,
        },
        designs: bank
            .designs
            .iter()
            .map(|d| DesignRow {
                wp: d.wp,
                wn: d.wn,
                l: d.l,
                v_ref_achieved: d.v_ref_achieved,
                v_ref_ideal: d.v_ref_ideal,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("design document always serializes");
    s.push('\n');
    s
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates a design document. Errors name the JSON path of
/// the offending value.
pub fn load_design(text: &str) -> Result<ComparatorBank> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: DesignDoc = serde_path_to_error::deserialize(de)
        .map_err(|e| parse_err(e.path().to_string(), e.inner().to_string()))?;

    if !(2..=MAX_BITS).contains(&doc.n_bits) {
        return Err(parse_err("n_bits", format!("must lie in [2, {MAX_BITS}]")));
    }
    if doc.vdd.is_nan() || doc.vdd <= 0.0 {
        return Err(parse_err("vdd", "must be > 0"));
    }
    let expected = (1usize << doc.n_bits) - 1;
    if doc.designs.len() != expected {
        return Err(parse_err(
            "designs",
            format!("expected {expected} entries, found {}", doc.designs.len()),
        ));
    }
    for (i, row) in doc.designs.iter().enumerate() {
        for (name, v) in [("wp", row.wp), ("wn", row.wn), ("l", row.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(parse_err(format!("designs[{i}].{name}"), "must be > 0"));
            }
        }
        if i > 0 && row.v_ref_achieved <= doc.designs[i - 1].v_ref_achieved {
            return Err(parse_err(
                format!("designs[{i}].v_ref_achieved"),
                "thresholds must be strictly increasing",
            ));
        }
    }

    let designs: Vec<ComparatorDesign> = doc
        .designs
        .iter()
        .map(|r| ComparatorDesign::new(r.wp, r.wn, r.l, r.v_ref_achieved, r.v_ref_ideal))
        .collect();
    Ok(ComparatorBank {
        n_bits: doc.n_bits,
        ladder: ReferenceLadder {
            n_bits: doc.n_bits,
            vdd: doc.vdd,
            v_low: doc.ladder.v_low,
            v_high: doc.ladder.v_high,
            v_lsb: doc.ladder.v_lsb,
            ideal_refs: designs.iter().map(|d| d.v_ref_ideal).collect(),
        },
        designs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_bank() -> ComparatorBank {
        let refs = vec![1.0, 1.25, 1.5];
        ComparatorBank {
            n_bits: 2,
            ladder: ReferenceLadder {
                n_bits: 2,
                vdd: 2.5,
                v_low: 1.0,
                v_high: 1.5,
                v_lsb: 0.25,
                ideal_refs: refs.clone(),
            },
            designs: refs
                .iter()
                .enumerate()
                .map(|(i, &v)| ComparatorDesign::new(1.0 + i as f64, 1.0, 0.25, v, v))
                .collect(),
        }
    }

    #[test]
    fn round_trip() {
        let b = exact_bank();
        assert_eq!(load_design(&save_design(&b)).unwrap(), b);
    }

    #[test]
    fn missing_designs_names_path() {
        let mut v: serde_json::Value = serde_json::from_str(&save_design(&exact_bank())).unwrap();
        v.as_object_mut().unwrap().remove("designs");
        match load_design(&v.to_string()).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("designs"), "{message}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn wrong_type_names_nested_path() {
        let text = save_design(&exact_bank()).replacen("\"wn\": 1.0", "\"wn\": \"wide\"", 1);
        match load_design(&text).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "designs[0].wn"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_monotone_rejected() {
        let mut b = exact_bank();
        b.designs[2].v_ref_achieved = 1.1;
        match load_design(&save_design(&b)).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "designs[2].v_ref_achieved"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn wrong_count_rejected() {
        let mut b = exact_bank();
        b.designs.pop();
        assert!(
            matches!(load_design(&save_design(&b)), Err(Error::Parse { path, .. }) if path == "designs")
        );
    }
}
