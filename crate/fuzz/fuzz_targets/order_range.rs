#![no_main]

use libfuzzer_sys::fuzz_target;
use polyopt_cli::parse_order_range;
use polyopt_cli::problem::parse_sense;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((lo, hi)) = parse_order_range(text) {
        assert!(1 <= lo && lo <= hi);
    }
    let _ = parse_sense(text);
});
