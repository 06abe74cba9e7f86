#![no_main]

use cfdim::sequences::{parse_list_contents, parse_list_inline};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_list_contents(s) {
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
    let _ = parse_list_inline(s);
});
