#![no_main]

use libfuzzer_sys::fuzz_target;
use ncwb_cli::analysis::analyze_all;
use ncwb_cli::document::parse_document;
use ncwb_cli::workspace::load;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    let Ok(ws) = load(&doc) else { return };
    // keep the per-input cost bounded
    if ws.items.iter().any(|(_, item)| matches!(item, ncwb_cli::workspace::Item::Algebra(a) if a.dim() > 6)) {
        return;
    }
    let all: Vec<usize> = (0..ws.items.len()).collect();
    let _ = analyze_all(&ws, &all, false);
});
