#![no_main]

use libfuzzer_sys::fuzz_target;
use singmin::io::{read_profile_csv, write_profile_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(samples) = read_profile_csv(data) else {
        return;
    };
    for w in samples.windows(2) {
        assert!(w[1].x > w[0].x);
    }
    assert!(samples.iter().all(|s| s.f > 0.0 && s.x.is_finite() && s.fp.is_finite()));
    // Whatever was accepted must survive a write and reread unchanged.
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &samples).unwrap();
    assert_eq!(read_profile_csv(buf.as_slice()).unwrap(), samples);
});
