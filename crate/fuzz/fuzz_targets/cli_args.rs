#![no_main]
use clap::Parser;
use libfuzzer_sys::fuzz_target;
use relspin::cli::Cli;

// Argument parsing only; commands are not run.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("relspin").chain(s.split('\0'));
    let _ = Cli::try_parse_from(args);
});
