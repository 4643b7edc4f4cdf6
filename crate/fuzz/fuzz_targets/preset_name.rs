#![no_main]
use libfuzzer_sys::fuzz_target;
use trefoil_core::curve::{preset, Preset};

fuzz_target!(|data: &[u8]| {
    let Ok(name) = std::str::from_utf8(data) else { return };
    if let Ok(p) = name.parse::<Preset>() {
        assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        assert!(preset(name).is_ok());
    }
});
