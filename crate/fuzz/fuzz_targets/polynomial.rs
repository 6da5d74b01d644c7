#![no_main]

use libfuzzer_sys::fuzz_target;
use polyopt::polyring::parse_polynomial;

// First line: whitespace-separated variable names. Rest: the polynomial.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 4096 {
        return;
    }
    let (head, body) = text.split_once('\n').unwrap_or(("x y z", text));
    let names: Vec<String> = head.split_whitespace().map(str::to_string).collect();
    if let Ok(p) = parse_polynomial(body, &names) {
        let printed = p.to_text(&names);
        let again = parse_polynomial(&printed, &names).expect("printed form parses");
        assert_eq!(p, again, "{printed}");
    }
});
