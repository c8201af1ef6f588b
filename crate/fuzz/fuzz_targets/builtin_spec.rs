#![no_main]

use libfuzzer_sys::fuzz_target;
use ncwb_core::builtins::{builtin, parse_builtin_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok((name, params)) = parse_builtin_spec(s) {
        let _ = builtin(&name, &params);
    }
});
