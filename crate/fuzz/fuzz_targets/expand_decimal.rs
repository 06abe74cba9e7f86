#![no_main]

use cfdim::cf::expand_decimal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(w) = expand_decimal(s, 64) {
        assert!(w.len() <= 64);
        assert!(w.digits().iter().all(|&a| a >= 1));
    }
});
