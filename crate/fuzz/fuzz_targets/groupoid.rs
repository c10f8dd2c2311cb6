#![no_main]
use gpdlab::json::{parse, render};
use gpdlab::FinGroupoid;
use libfuzzer_sys::fuzz_target;

// Accepted input must re-render to a fixed point.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse::<FinGroupoid>(text) {
        let once = render(&x);
        let again = parse::<FinGroupoid>(&once).expect("rendered output parses");
        assert_eq!(once, render(&again));
    }
});
