#![no_main]

use libfuzzer_sys::fuzz_target;
use qtherm_cli::catalog::Experiment;
use qtherm_cli::config::{parse_document, parse_set, set_path, validate};

const BASE: &str = "experiment = \"otto\"\n[parameters]\nomega_a = 2.0\nomega_b = 1.0\nt_h = 4.0\nt_c = 1.0\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut doc = parse_document(BASE).expect("base config parses");
    for arg in text.lines() {
        let Ok((path, value)) = parse_set(arg) else { continue };
        if set_path(&mut doc, &path, value.clone()).is_err() {
            continue;
        }
        // the value lands where the key says
        let stored = match path.as_slice() {
            [key] => doc.get(key),
            [section, key] => doc.get(section).and_then(|t| t.get(key)),
            _ => None,
        };
        assert_eq!(stored, Some(&value));
    }
    let _ = validate(&doc, Some(Experiment::Otto));
});
