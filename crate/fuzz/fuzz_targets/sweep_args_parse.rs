#![no_main]

use libfuzzer_sys::fuzz_target;

use cutlink_harness::{Generator, Property};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = s.parse::<Generator>() {
        let again: Generator = g.to_string().parse().expect("display parses back");
        assert_eq!(g.to_string(), again.to_string());
    }
    if let Ok(p) = s.parse::<Property>() {
        assert_eq!(p.name().parse::<Property>(), Ok(p));
    }
});
