#![no_main]

use libfuzzer_sys::fuzz_target;
use ncwb_core::linalg::{format_rational, parse_rational};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(s) {
        let again = parse_rational(&format_rational(&r)).expect("formatted rationals parse");
        assert_eq!(again, r);
    }
});
