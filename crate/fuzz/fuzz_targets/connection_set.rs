#![no_main]

use caysum::catalog::CATALOG;
use caysum::formats::parse_connection_set;
use caysum::graph::{subgroup_profile_fast, subgroup_profile_slow};
use caysum::subgroup::enumerate_all_subgroups;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let g = CATALOG[pick as usize % CATALOG.len()].build().unwrap();
    let Ok(s) = parse_connection_set(&g, text) else { return };
    if !s.is_valid() {
        assert!(s.require_valid().is_err());
        return;
    }
    let subs = enumerate_all_subgroups(&g, 128).unwrap();
    let k = &subs[pick as usize % subs.len()];
    let fast = subgroup_profile_fast(&g, &s, k).unwrap();
    let slow = subgroup_profile_slow(&g, &s, k).unwrap();
    assert_eq!(fast.pair(), slow.pair());
});
