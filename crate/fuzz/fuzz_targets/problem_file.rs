#![no_main]

use libfuzzer_sys::fuzz_target;
use polyopt_cli::ProblemFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 16 * 1024 {
        return;
    }
    if let Ok(file) = ProblemFile::from_json(text) {
        if let Ok(problem) = file.parse() {
            let _ = problem.search_box(10.0);
        }
    }
});
