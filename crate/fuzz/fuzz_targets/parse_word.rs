#![no_main]

use cfdim::cf::{evaluate, expand_rational};
use cfdim::PartialQuotients;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(w) = s.parse::<PartialQuotients>() else { return };
    if w.is_empty() || w.len() > 64 {
        return;
    }
    let x = evaluate(&w).expect("valid word evaluates");
    // [1] is the only word reaching 1, outside the open unit interval.
    if w.digits() == [1] {
        return;
    }
    let back = expand_rational(&x).expect("value in (0,1)");
    // Expansions are unique once a trailing 1 is folded in.
    if *w.digits().last().unwrap() > 1 || w.len() == 1 {
        assert_eq!(back, w);
    }
    assert_eq!(evaluate(&back).unwrap(), x);
});
