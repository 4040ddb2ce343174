#![no_main]

use libfuzzer_sys::fuzz_target;
use singmin::io::{read_obj, write_obj};

fuzz_target!(|data: &[u8]| {
    let Ok(mesh) = read_obj(data) else {
        return;
    };
    let n = mesh.vertices().len();
    assert!(mesh.triangles().iter().flatten().all(|&v| v < n));
    let mut buf = Vec::new();
    write_obj(&mut buf, &mesh).unwrap();
    let again = read_obj(buf.as_slice()).unwrap();
    assert_eq!(again.vertices(), mesh.vertices());
    assert_eq!(again.triangles(), mesh.triangles());
});
