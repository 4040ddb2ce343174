//! Batch scenario lines: shell-style splitting, then the full command
//! grammar. Nothing is executed.

#![no_main]

use libfuzzer_sys::fuzz_target;
use singmin_cli::{parse_args, split_scenario_line};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for line in text.lines() {
        if let Ok(Some(argv)) = split_scenario_line(line) {
            assert!(!argv.is_empty());
            let _ = parse_args(&argv);
        }
    }
});
