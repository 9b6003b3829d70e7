#![no_main]

use caysum::formats::{parse_group_spec, GroupSpecFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_group_spec(text) {
        // whatever parses must describe itself identically
        let echo = serde_json::to_string(&GroupSpecFile::from_group(&g)).unwrap();
        let again = parse_group_spec(&echo).unwrap();
        assert_eq!(again.id(), g.id());
    }
});
