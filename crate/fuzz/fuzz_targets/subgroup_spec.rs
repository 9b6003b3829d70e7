#![no_main]

use caysum::catalog::CATALOG;
use caysum::formats::{parse_subgroup_spec, SubgroupSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let g = CATALOG[pick as usize % CATALOG.len()].build().unwrap();
    if let Ok(k) = parse_subgroup_spec(&g, text) {
        assert_eq!(g.order() % k.order(), 0);
        assert_eq!(SubgroupSpec::from_subgroup(&k).build(&g).unwrap(), k);
    }
});
