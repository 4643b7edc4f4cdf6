#![no_main]
use libfuzzer_sys::fuzz_target;
use trefoil_core::hexknot::{classify_hexagon, parse_hexagon};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(hex) = parse_hexagon(text) {
        let c = classify_hexagon(&hex);
        assert!(!c.margin.is_nan());
    }
});
