#![no_main]

use libfuzzer_sys::fuzz_target;
use qtherm_cli::config::{parse_document, validate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    let Ok(cfg) = validate(&doc, None) else { return };
    assert_eq!(cfg.hash(), cfg.hash());
    if let Some(sweep) = &cfg.sweep {
        if sweep.steps <= 10_000 {
            let pts = sweep.points();
            assert_eq!(pts.len(), sweep.steps);
            assert!(pts.iter().all(|p| p.as_f64().is_some_and(f64::is_finite)));
        }
    }
});
