#![no_main]
use libfuzzer_sys::fuzz_target;
use trefoil_core::curve::{CurveSpec, SpaceCurve};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = CurveSpec::from_json_bytes(data) else { return };
    let again = CurveSpec::from_json_str(&spec.to_json()).expect("own output parses");
    assert_eq!(again, spec);
    if let Ok(curve) = spec.to_curve() {
        let _ = curve.s3_model().point(0.25);
    }
});
