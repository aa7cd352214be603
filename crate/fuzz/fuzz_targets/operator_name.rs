#![no_main]
use libfuzzer_sys::fuzz_target;
use relspin::dirac::{Generator, PLMode};
use relspin::spincat::OperatorName;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(name) = s.parse::<OperatorName>() {
        assert_eq!(name.as_str().parse::<OperatorName>().ok(), Some(name));
    }
    let _ = s.parse::<Generator>();
    let _ = s.parse::<PLMode>();
});
