//! Replays the checked-in fuzz seeds through the same entry points as the
//! fuzz targets, so a seed that panics is caught on stable.

use std::fs;
use std::path::Path;

use causal_work::expected::ExpectedTable;
use causal_work::io::{
    instrument_to_value, operator_to_value, parse_document, parse_grid, parse_instrument, parse_operator, Document,
    OperatorForm,
};
use causal_work::pauli::PauliString;
use causal_work::process::validate;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn operator_seeds() {
    let mut ok = 0;
    for (_, text) in seeds("operator_json") {
        if let Ok(op) = parse_operator(&text) {
            let v = operator_to_value(&op, OperatorForm::Dense).unwrap();
            assert_eq!(parse_operator(&v.to_string()).unwrap().dims(), op.dims());
            ok += 1;
        }
    }
    assert!(ok >= 3);
}

#[test]
fn instrument_seeds() {
    let results: Vec<bool> = seeds("instrument_json")
        .into_iter()
        .map(|(_, text)| match parse_instrument(&text) {
            Ok(inst) => {
                let v = instrument_to_value(&inst, OperatorForm::Dense).unwrap();
                parse_instrument(&v.to_string()).unwrap();
                true
            }
            Err(_) => false,
        })
        .collect();
    assert_eq!(results, [true, true, false, false]);
}

#[test]
fn document_seeds() {
    for (name, text) in seeds("document_json") {
        match parse_document(&text) {
            Ok(Document::Operator(op)) => {
                let _ = validate(&op);
            }
            Ok(Document::Instrument(_)) => assert_eq!(name, "instrument"),
            Err(_) => assert!(name == "not_object" || name == "mixed_lengths", "{name}"),
        }
    }
}

#[test]
fn grid_seeds() {
    for (name, text) in seeds("grid_spec") {
        let r = parse_grid(&text);
        assert_eq!(r.is_err(), name == "missing_count", "{name}");
    }
}

#[test]
fn pauli_seeds() {
    for (name, text) in seeds("pauli_string") {
        match text.parse::<PauliString>() {
            Ok(s) => assert_eq!(s.to_string(), text),
            Err(_) => assert_eq!(name, "lowercase"),
        }
    }
}

#[test]
fn expected_table_seeds() {
    for (name, text) in seeds("expected_table") {
        assert_eq!(
            ExpectedTable::parse(&text).is_err(),
            name == "bad_version.toml",
            "{name}"
        );
    }
}
