#![no_main]

use caysum::catalog::CATALOG;
use caysum::construct::construct_s;
use caysum::graph::subgroup_profile_slow;
use caysum::subgroup::enumerate_all_subgroups;
use libfuzzer_sys::fuzz_target;

// [group, subgroup, alpha, beta]
fuzz_target!(|data: &[u8]| {
    let &[gi, ki, alpha, beta, ..] = data else { return };
    let g = CATALOG[gi as usize % CATALOG.len()].build().unwrap();
    let subs = enumerate_all_subgroups(&g, 128).unwrap();
    let k = &subs[ki as usize % subs.len()];
    if let Ok(w) = construct_s(&g, k, alpha as usize, beta as usize) {
        let p = subgroup_profile_slow(&g, &w.set, k).unwrap().pair().unwrap();
        assert_eq!((p.alpha, p.beta), (alpha as usize, beta as usize));
    }
});
