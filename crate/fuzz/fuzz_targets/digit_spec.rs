#![no_main]

use cfdim::sequences::{parse_digit_set, tau};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(d) = parse_digit_set(s) else { return };
    for a in d.members_up_to(1000) {
        assert!(d.contains(a));
    }
    let _ = tau(&d);
});
