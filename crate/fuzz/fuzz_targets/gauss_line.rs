#![no_main]
use libfuzzer_sys::fuzz_target;
use trefoil_core::gauss::{a2, GaussDiagram};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    let Ok(d) = line.parse::<GaussDiagram>() else { return };
    let again: GaussDiagram = d.to_string().parse().expect("own output parses");
    assert_eq!(again.to_string(), d.to_string());
    assert_eq!(a2(&again), a2(&d));
});
