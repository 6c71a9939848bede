#![no_main]
use libfuzzer_sys::fuzz_target;

// The first byte picks the signed or unsigned category.
fuzz_target!(|data: &[u8]| {
    if let Some((flag, rest)) = data.split_first() {
        if let Ok(text) = std::str::from_utf8(rest) {
            let _ = koszul_core::brauer::parse_morphism(text, flag & 1 == 1);
        }
    }
});
