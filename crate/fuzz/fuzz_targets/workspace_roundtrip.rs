#![no_main]

use libfuzzer_sys::fuzz_target;
use ncwb_cli::document::{parse_document, render_document};
use ncwb_cli::workspace::load;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    let Ok(ws) = load(&doc) else { return };
    let canonical = render_document(&ws.export());
    let reparsed = parse_document(&canonical).expect("exported documents parse");
    let again = load(&reparsed).expect("exported documents load");
    assert_eq!(render_document(&again.export()), canonical);
});
