#![no_main]

use cfdim::construction::{phi, PhiSchedule};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = serde_json::from_slice::<PhiSchedule>(data) else { return };
    let text = serde_json::to_string(&s).unwrap();
    let back: PhiSchedule = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    if let Some(&first) = s.breakpoints.first() {
        assert_eq!(phi(&s, first).unwrap(), 1);
    }
});
