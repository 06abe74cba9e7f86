#![no_main]

use cfdim::exact::{format_rational, parse_exact, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_exact(s) {
        assert_eq!(parse_exact(&format_rational(&r)).unwrap(), r);
    }
    let _ = parse_rational(s);
});
