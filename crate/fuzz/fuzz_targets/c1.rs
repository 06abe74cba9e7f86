#![no_main]

use cfdim::construction::C1;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(c) = s.parse::<C1>() else { return };
    assert_eq!(c.to_string().parse::<C1>().unwrap(), c);
    assert!(c.to_real(64).is_positive());
});
