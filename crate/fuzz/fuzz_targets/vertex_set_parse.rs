#![no_main]

use libfuzzer_sys::fuzz_target;

use cutlink::VertexSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Some(set) = VertexSet::from_hex(s) {
        assert_eq!(VertexSet::from_hex(&set.to_hex()), Some(set));
    }
    if let Ok(set) = cutlink_cli::parse_set(s) {
        assert_eq!(cutlink_cli::parse_set(&set.to_string()), Ok(set));
    }
});
