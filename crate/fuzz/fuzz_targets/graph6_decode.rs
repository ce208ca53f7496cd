#![no_main]

use libfuzzer_sys::fuzz_target;

use cutlink::graph6;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = graph6::decode_bytes(data) {
        let encoded = graph6::encode(&g);
        let again = graph6::decode(&encoded).expect("re-decoding an encoded graph");
        assert_eq!(g, again);
        assert_eq!(encoded, graph6::encode(&again));
    }
});
