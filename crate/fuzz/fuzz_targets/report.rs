#![no_main]
use gpdlab::json::{parse, render};
use gpdlab::laws::SuiteReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = parse::<SuiteReport>(text) {
        let once = render(&report);
        let again = parse::<SuiteReport>(&once).expect("rendered report parses");
        assert_eq!(once, render(&again));
        let _ = report.exit_code();
    }
});
