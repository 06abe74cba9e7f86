#![no_main]

use cfdim::sequences::parse_sequence;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(seq) = parse_sequence(s) else { return };
    let mut prev = 0;
    for n in [1, 10, 100, 1000] {
        let c = seq.count(n);
        assert!(c >= prev && c <= n);
        prev = c;
    }
    assert_eq!(parse_sequence(&seq.spec_string()).unwrap().count(1000), prev);
});
