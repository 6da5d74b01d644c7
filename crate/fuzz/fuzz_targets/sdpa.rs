#![no_main]

use libfuzzer_sys::fuzz_target;
use polyopt::sdp::{parse_sdpa, write_sdpa};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_sdpa(text) {
        // Writing may refuse non-finite data; anything written must read back identically.
        if let Ok(out) = write_sdpa(&p) {
            let q = parse_sdpa(&out).expect("written SDPA parses");
            assert_eq!(write_sdpa(&q).unwrap(), out);
        }
    }
});
