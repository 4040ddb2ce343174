#![no_main]

use libfuzzer_sys::fuzz_target;
use singmin_cli::parse_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((nx, ny)) = parse_grid(s) {
        assert!(nx > 0 && ny.is_none_or(|n| n > 0));
        let canonical = match ny {
            Some(ny) => format!("{nx},{ny}"),
            None => nx.to_string(),
        };
        assert_eq!(parse_grid(&canonical), Ok((nx, ny)));
    }
});
