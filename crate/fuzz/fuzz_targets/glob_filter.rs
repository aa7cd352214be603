#![no_main]
use libfuzzer_sys::fuzz_target;
use relspin::checks::glob_match;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let (pattern, text) = s.split_once('\n').unwrap_or((s, ""));
    let hit = glob_match(pattern, text);
    if !pattern.contains(['*', '?']) {
        assert_eq!(hit, pattern == text);
    }
    assert!(glob_match("*", text));
    assert!(glob_match(&format!("*{pattern}"), text) || !hit);
});
