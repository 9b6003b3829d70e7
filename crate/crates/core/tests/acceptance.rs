//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Some criteria fail for reasons that are understood (see the comments on
//! `KNOWN_RED`). The process exits nonzero when the observed failures, or the
//! exact list of violations behind them, differ from what is pinned here —
//! so both a new failure and an unexpected fix are reported.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use caysum::abelian::{coset_ids, enumerate_subgroups, DEFAULT_SUBGROUP_CAP_A};
use caysum::catalog::catalog_groups;
use caysum::graph::{subgroup_profile_fast, subgroup_profile_slow, RegularityPair};
use caysum::construct::construct_s;
use caysum::group::{connection_set_from_indices, DicyclicGroup};
use caysum::oracle::{composed_region, region, stated_region};
use caysum::subgroup::{
    core_numbers, enumerate_all_subgroups, projection_invariants, script_l, script_l_closed_form,
    square_clause, Subgroup, SubgroupKind, DEFAULT_SUBGROUP_CAP_G,
};
use caysum::verify::{
    brute_conjugacy_classes, brute_involutions, brute_squares, crosscheck, CrosscheckOptions,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const LIMIT_FACTS: Duration = Duration::from_secs(1);
const LIMIT_COUNTING: Duration = Duration::from_secs(5);
const LIMIT_CROSSCHECK: Duration = Duration::from_secs(300);
const LIMIT_ROUNDTRIP: Duration = Duration::from_secs(120);
const RANDOM_SETS_PER_GROUP: usize = 200;
const RNG_SEED: u64 = 0x5eed_ca75;

/// Criteria expected to fail. The pins below list the key (text before the
/// first `:`) of every expected violation.
///
/// - `2`: the counting identities read `L`, `m`, `r` off the coordinate
///   projections; that reading breaks for subgroups not aligned with the
///   cyclic decomposition, e.g. `<[0,2],[1,1]>` in `Z2 x Z4`.
/// - `3`: two sources. (a) The closed-form `<H,zb>` region admits odd
///   `alpha` in clauses where the `A`-part `eta` must be even; brute force
///   agrees with the composed region there. (b) In `Z4 x Z4` with
///   `H = <[1,0]>` or `<[1,2]>`, both forms predict `(0, zeta)` for odd
///   `zeta`, but the coset `H[0,2]` is self-inverse and has a non-square
///   inverse pair and no non-square involution, so no normal set meets it
///   an odd number of times.
/// - `4`: exactly the unreachable pairs of 3(b); nothing can realise them.
/// - `5a`: the same closed-form parity omission as 3(a), plus 3(b).
const KNOWN_RED: &[&str] = &["2", "3", "4", "5a"];

const PINNED_2: &[&str] = &[
    "Z2xZ4/b2=a2^2 <[1,2]>",
    "Z2xZ4/b2=a2^2 <[0,2],[1,1]>",
    "Z2xZ4/b2=a1 <[1,2]>",
    "Z2xZ4/b2=a1 <[0,2],[1,1]>",
    "Z2^3 <[0,1,1]>",
    "Z2^3 <[1,0,1]>",
    "Z2^3 <[1,1,0]>",
    "Z2^3 <[1,1,1]>",
    "Z2^3 <[0,0,1],[1,1,0]>",
    "Z2^3 <[0,1,0],[1,0,1]>",
    "Z2^3 <[0,1,1],[1,0,0]>",
    "Z2^3 <[0,1,1],[1,0,1]>",
    "Z4xZ4 <[2,2]>",
    "Z4xZ4 <[0,2],[2,1]>",
    "Z4xZ4 <[1,1]>",
    "Z4xZ4 <[1,2]>",
    "Z4xZ4 <[1,3]>",
    "Z4xZ4 <[0,2],[1,1]>",
    "Z2xZ8 <[1,4]>",
    "Z2xZ8 <[0,4],[1,2]>",
    "Z2xZ8 <[0,2],[1,1]>",
];
const PINNED_3: &[&str] = &[
    "Z2xZ4/b2=a2^2 <[0,1],[0,0]b> zb(5)",
    "Z2xZ4/b2=a2^2 <[0,1],[1,0]b> zb(5)",
    "Z2xZ4/b2=a2^2 <[0,2],[1,1],[0,0]b> zb(5)",
    "Z2xZ4/b2=a2^2 <[0,2],[1,1],[0,1]b> zb(5)",
    "Z12 <[1,0],[0,0]b> zb(5)",
    "Z12 <[1,0],[0,1]b> zb(5)",
    "Z12 <[1,0],[0,2]b> zb(5)",
    "Z4xZ4 <[1,0],[0,0]b> zb(5)",
    "Z4xZ4 <[1,0],[0,1]b> zb(5)",
    "Z4xZ4 <[1,0],[0,2]b> zb(5)",
    "Z4xZ4 <[1,0],[0,3]b> zb(5)",
    "Z4xZ4 <[1,2],[0,0]b> zb(5)",
    "Z4xZ4 <[1,2],[0,1]b> zb(5)",
    "Z4xZ4 <[1,2],[0,2]b> zb(5)",
    "Z4xZ4 <[1,2],[0,3]b> zb(5)",
    "Z2xZ8 <[0,4],[1,2],[0,0]b> zb(5)",
    "Z2xZ8 <[0,4],[1,2],[0,1]b> zb(5)",
    "Z2xZ8 <[0,4],[1,2],[0,2]b> zb(5)",
    "Z2xZ8 <[0,4],[1,2],[0,3]b> zb(5)",
    "Z2xZ8 <[0,1],[0,0]b> zb(5)",
    "Z2xZ8 <[0,1],[1,0]b> zb(5)",
    "Z2xZ8 <[0,2],[1,1],[0,0]b> zb(5)",
    "Z2xZ8 <[0,2],[1,1],[0,1]b> zb(5)",
];
const PINNED_4: &[&str] = &[
    "Z4xZ4 <[1,0],[0,0]b> (0,1)",
    "Z4xZ4 <[1,0],[0,0]b> (2,1)",
    "Z4xZ4 <[1,0],[0,0]b> (2,3)",
    "Z4xZ4 <[1,0],[0,0]b> (4,3)",
    "Z4xZ4 <[1,0],[0,0]b> (4,5)",
    "Z4xZ4 <[1,0],[0,0]b> (6,5)",
    "Z4xZ4 <[1,0],[0,1]b> (0,1)",
    "Z4xZ4 <[1,0],[0,1]b> (2,1)",
    "Z4xZ4 <[1,0],[0,1]b> (2,3)",
    "Z4xZ4 <[1,0],[0,1]b> (4,3)",
    "Z4xZ4 <[1,0],[0,1]b> (4,5)",
    "Z4xZ4 <[1,0],[0,1]b> (6,5)",
    "Z4xZ4 <[1,0],[0,2]b> (0,1)",
    "Z4xZ4 <[1,0],[0,2]b> (2,1)",
    "Z4xZ4 <[1,0],[0,2]b> (2,3)",
    "Z4xZ4 <[1,0],[0,2]b> (4,3)",
    "Z4xZ4 <[1,0],[0,2]b> (4,5)",
    "Z4xZ4 <[1,0],[0,2]b> (6,5)",
    "Z4xZ4 <[1,0],[0,3]b> (0,1)",
    "Z4xZ4 <[1,0],[0,3]b> (2,1)",
    "Z4xZ4 <[1,0],[0,3]b> (2,3)",
    "Z4xZ4 <[1,0],[0,3]b> (4,3)",
    "Z4xZ4 <[1,0],[0,3]b> (4,5)",
    "Z4xZ4 <[1,0],[0,3]b> (6,5)",
    "Z4xZ4 <[1,2],[0,0]b> (0,1)",
    "Z4xZ4 <[1,2],[0,0]b> (2,1)",
    "Z4xZ4 <[1,2],[0,0]b> (2,3)",
    "Z4xZ4 <[1,2],[0,0]b> (4,3)",
    "Z4xZ4 <[1,2],[0,0]b> (4,5)",
    "Z4xZ4 <[1,2],[0,0]b> (6,5)",
    "Z4xZ4 <[1,2],[0,1]b> (0,1)",
    "Z4xZ4 <[1,2],[0,1]b> (2,1)",
    "Z4xZ4 <[1,2],[0,1]b> (2,3)",
    "Z4xZ4 <[1,2],[0,1]b> (4,3)",
    "Z4xZ4 <[1,2],[0,1]b> (4,5)",
    "Z4xZ4 <[1,2],[0,1]b> (6,5)",
    "Z4xZ4 <[1,2],[0,2]b> (0,1)",
    "Z4xZ4 <[1,2],[0,2]b> (2,1)",
    "Z4xZ4 <[1,2],[0,2]b> (2,3)",
    "Z4xZ4 <[1,2],[0,2]b> (4,3)",
    "Z4xZ4 <[1,2],[0,2]b> (4,5)",
    "Z4xZ4 <[1,2],[0,2]b> (6,5)",
    "Z4xZ4 <[1,2],[0,3]b> (0,1)",
    "Z4xZ4 <[1,2],[0,3]b> (2,1)",
    "Z4xZ4 <[1,2],[0,3]b> (2,3)",
    "Z4xZ4 <[1,2],[0,3]b> (4,3)",
    "Z4xZ4 <[1,2],[0,3]b> (4,5)",
    "Z4xZ4 <[1,2],[0,3]b> (6,5)",
];
const PINNED_5A: &[&str] = &[
    "Z2xZ4/b2=a2^2 <[0,1],[0,0]b>",
    "Z2xZ4/b2=a2^2 <[0,1],[1,0]b>",
    "Z2xZ4/b2=a2^2 <[0,2],[1,1],[0,0]b>",
    "Z2xZ4/b2=a2^2 <[0,2],[1,1],[0,1]b>",
    "Z12 <[1,0],[0,0]b>",
    "Z12 <[1,0],[0,1]b>",
    "Z12 <[1,0],[0,2]b>",
    "Z4xZ4 <[1,0],[0,0]b>",
    "Z4xZ4 <[1,0],[0,1]b>",
    "Z4xZ4 <[1,0],[0,2]b>",
    "Z4xZ4 <[1,0],[0,3]b>",
    "Z4xZ4 <[1,2],[0,0]b>",
    "Z4xZ4 <[1,2],[0,1]b>",
    "Z4xZ4 <[1,2],[0,2]b>",
    "Z4xZ4 <[1,2],[0,3]b>",
    "Z2xZ8 <[0,4],[1,2],[0,0]b>",
    "Z2xZ8 <[0,4],[1,2],[0,1]b>",
    "Z2xZ8 <[0,4],[1,2],[0,2]b>",
    "Z2xZ8 <[0,4],[1,2],[0,3]b>",
    "Z2xZ8 <[0,1],[0,0]b>",
    "Z2xZ8 <[0,1],[1,0]b>",
    "Z2xZ8 <[0,2],[1,1],[0,0]b>",
    "Z2xZ8 <[0,2],[1,1],[0,1]b>",
];

struct Outcome {
    id: &'static str,
    title: &'static str,
    violations: Vec<String>,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.violations.is_empty() && self.limit.is_none_or(|l| self.elapsed <= l)
    }
}

fn timed(
    id: &'static str,
    title: &'static str,
    limit: Option<Duration>,
    f: impl FnOnce() -> Vec<String>,
) -> Outcome {
    let start = Instant::now();
    let violations = f();
    Outcome { id, title, violations, elapsed: start.elapsed(), limit }
}

fn subgroups(g: &DicyclicGroup) -> Vec<Subgroup> {
    enumerate_all_subgroups(g, DEFAULT_SUBGROUP_CAP_G).expect("catalog groups are small")
}

fn facts(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    for (name, g) in groups {
        let sq: BTreeSet<usize> = g.square_set().iter().map(|x| g.index_of(x)).collect();
        if sq != brute_squares(g) {
            v.push(format!("{name}: squares"));
        }
        let inv: BTreeSet<usize> = g.involution_set().iter().map(|x| g.index_of(x)).collect();
        if inv != brute_involutions(g) {
            v.push(format!("{name}: involutions"));
        }
        if g.class_indices() != brute_conjugacy_classes(g).as_slice() {
            v.push(format!("{name}: conjugacy classes"));
        }
    }
    v
}

/// The counting identities, with `L`, `m`, `r` taken from the coordinate
/// projections exactly as defined.
fn counting(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    for (name, g) in groups {
        let spec = g.spec();
        let b = g.b_subgroup();
        let ap = g.a_prime();
        let (bcoset, nq) = coset_ids(spec, b);
        for h in enumerate_subgroups(spec, DEFAULT_SUBGROUP_CAP_A).expect("small") {
            let p = projection_invariants(g, &h);
            let l = p.l_set.len() as u32;
            let tag = format!("{name} {}", h.label());
            let hb = h.intersection_count(b);
            let ha = h.intersection_count(ap);
            let hab = h.indices().iter().filter(|&&x| b.contains_idx(x) && ap.contains_idx(x)).count();
            if hb * (1 << l) != h.order() {
                v.push(format!("{tag}: |H n B| = {hb}, |H|/2^|L| = {}/{}", h.order(), 1 << l));
            }
            if ha != 1 << p.m {
                v.push(format!("{tag}: |H n A'| = {ha}, 2^m = {}", 1 << p.m));
            }
            if hab != 1 << (p.m - p.r) {
                v.push(format!("{tag}: |H n A' n B| = {hab}, 2^(m-r) = {}", 1 << (p.m - p.r)));
            }
            if p.m > l && (h.order() >> l) % 2 == 1 {
                v.push(format!("{tag}: m > |L| but |H|/2^|L| odd"));
            }
            // a_{L'} for L' <= L, and a_{T'} for T' <= T
            let gen_prod = |set: &[usize], mask: usize| {
                let mut x = spec.identity();
                for (j, &i) in set.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        x = spec.mul(&x, &spec.generator(i).expect("in range"));
                    }
                }
                spec.index_of(&x)
            };
            let mut seen = BTreeSet::new();
            for lm in 0..1usize << p.l_set.len() {
                for tm in 0..1usize << p.t_set.len() {
                    let x = spec.add_idx(gen_prod(&p.l_set, lm), gen_prod(&p.t_set, tm));
                    seen.insert(bcoset[x]);
                }
            }
            if seen.len() != nq || nq != 1 << spec.lambda() {
                v.push(format!("{tag}: B a_L' a_T' is not a partition of A"));
            }
            let mut covered = BTreeSet::new();
            let mut disjoint = true;
            for lm in 0..1usize << p.l_set.len() {
                let a = gen_prod(&p.l_set, lm);
                for &c in h.indices().iter().filter(|&&c| b.contains_idx(c)) {
                    disjoint &= covered.insert(spec.add_idx(c, a));
                }
            }
            if !disjoint || covered.iter().copied().collect::<Vec<_>>() != h.indices() {
                v.push(format!("{tag}: (H n B) a_L' is not a partition of H"));
            }
            let k = Subgroup::type_a(g, h.clone()).expect("subgroup of A");
            let brute = script_l(g, &k);
            let mut c = core_numbers(g, &h);
            c.l = l;
            c.unit = h.order() >> l;
            let closed = script_l_closed_form(&c, square_clause(g, &h));
            if brute != closed {
                v.push(format!("{tag}: script L brute {brute}, closed form {closed}"));
            }
        }
    }
    v
}

/// Same identities with intrinsic `l`, `m`, `r`; expected to hold always.
fn counting_intrinsic(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    for (name, g) in groups {
        for h in enumerate_subgroups(g.spec(), DEFAULT_SUBGROUP_CAP_A).expect("small") {
            let c = core_numbers(g, &h);
            let k = Subgroup::type_a(g, h.clone()).expect("subgroup of A");
            if c.m > c.l && c.unit % 2 == 1 {
                v.push(format!("{name} {}: m > l but unit odd", h.label()));
            }
            if script_l(g, &k) != script_l_closed_form(&c, square_clause(g, &h)) {
                v.push(format!("{name} {}: script L", h.label()));
            }
        }
    }
    v
}

fn crosscheck_all(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    for (name, g) in groups {
        let report = crosscheck(g, &CrosscheckOptions::default()).expect("within caps");
        for s in report.failures() {
            let extra: Vec<RegularityPair> = s.extra.iter().map(|e| e.pair).collect();
            let stated_note = if s.stated_equal { "" } else { "; closed form differs" };
            v.push(format!(
                "{name} {} {}: missing {} extra {}{stated_note}",
                s.label,
                s.case_label,
                fmt_pairs(&s.missing),
                fmt_pairs(&extra)
            ));
        }
    }
    v
}

fn round_trip(groups: &[(&str, DicyclicGroup)]) -> (Vec<String>, usize) {
    let mut v = Vec::new();
    let mut triples = 0;
    for (name, g) in groups {
        for k in subgroups(g) {
            for p in composed_region(g, &k).pairs {
                triples += 1;
                let tag = format!("{name} {} {p}", k.label());
                let w = match construct_s(g, &k, p.alpha, p.beta) {
                    Ok(w) => w,
                    Err(e) => {
                        v.push(format!("{tag}: {}", short_error(&e)));
                        continue;
                    }
                };
                let fast = subgroup_profile_fast(g, &w.set, &k).ok().and_then(|x| x.pair());
                let slow = subgroup_profile_slow(g, &w.set, &k).ok().and_then(|x| x.pair());
                if fast != Some(p) || slow != Some(p) {
                    v.push(format!("{tag}: fast {fast:?} slow {slow:?}"));
                }
            }
        }
    }
    (v, triples)
}

fn fmt_pairs(p: &[RegularityPair]) -> String {
    let v: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("{{{}}}", v.join(" "))
}

fn short_error(e: &caysum::Error) -> &'static str {
    match e {
        caysum::Error::RecipeUnavailable(_) => "recipe unavailable",
        caysum::Error::Infeasible { .. } => "infeasible",
        _ => "other error",
    }
}

fn literal_vs_composed(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    for (name, g) in groups {
        for k in subgroups(g).into_iter().filter(|k| k.kind() == SubgroupKind::TypeZb) {
            let Some(stated) = stated_region(g, &k) else { continue };
            let composed = composed_region(g, &k).pairs;
            if stated != composed {
                let only_s = stated.difference(&composed).count();
                let only_c = composed.difference(&stated).count();
                let odd_alpha = stated.difference(&composed).all(|p| p.alpha % 2 == 1);
                v.push(format!(
                    "{name} {}: {only_s} closed-form-only (all odd alpha: {odd_alpha}), {only_c} composed-only",
                    k.label()
                ));
            }
        }
    }
    v
}

fn fast_vs_slow(groups: &[(&str, DicyclicGroup)]) -> Vec<String> {
    let mut v = Vec::new();
    let mut rng = StdRng::seed_from_u64(RNG_SEED);
    for (name, g) in groups {
        let classes = g.non_square_classes();
        let subs = subgroups(g);
        for _ in 0..RANDOM_SETS_PER_GROUP {
            let idx: Vec<usize> = classes
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .flat_map(|&c| g.class_indices()[c].iter().copied())
                .collect();
            let s = connection_set_from_indices(g, idx);
            if !s.is_valid() {
                v.push(format!("{name}: random class union failed validation"));
                continue;
            }
            for k in &subs {
                let fast = subgroup_profile_fast(g, &s, k).expect("valid").pair();
                let slow = subgroup_profile_slow(g, &s, k).expect("valid").pair();
                if fast != slow {
                    v.push(format!("{name} {}: fast {fast:?} slow {slow:?}", k.label()));
                }
            }
        }
    }
    v
}

fn q8_goldens() -> Vec<String> {
    let g = caysum::catalog::by_name("Q8").expect("catalog").build().expect("valid");
    let grid: BTreeSet<RegularityPair> = [0, 2]
        .iter()
        .flat_map(|&a| [0, 2, 4].map(|b| RegularityPair::new(a, b)))
        .filter(|p| !p.is_zero())
        .collect();
    let expect = [
        ("<[2]>", BTreeSet::from([RegularityPair::new(0, 2)])),
        ("<[1]>", grid.clone()),
        ("<[2],[0]b>", grid),
        ("<>", BTreeSet::new()),
    ];
    let subs = subgroups(&g);
    let mut v = Vec::new();
    for (label, want) in expect {
        match subs.iter().find(|k| k.label() == label) {
            None => v.push(format!("{label}: not enumerated")),
            Some(k) => match region(&g, k) {
                Ok(r) if r.pairs == want => {}
                Ok(r) => v.push(format!("{label}: got {:?}", r.pairs)),
                Err(e) => v.push(format!("{label}: {e}")),
            },
        }
    }
    v
}

fn pinned(id: &str) -> Option<&'static [&'static str]> {
    match id {
        "2" => Some(PINNED_2),
        "3" => Some(PINNED_3),
        "4" => Some(PINNED_4),
        "5a" => Some(PINNED_5A),
        _ => None,
    }
}

fn main() -> ExitCode {
    let groups = catalog_groups();
    let mut outcomes = vec![
        timed("1", "closed-form squares, involutions, classes vs brute force", Some(LIMIT_FACTS), || {
            facts(&groups)
        }),
        timed("2", "counting identities with projection L, m, r", Some(LIMIT_COUNTING), || counting(&groups)),
        timed("2i", "counting identities with intrinsic l, m, r", Some(LIMIT_COUNTING), || {
            counting_intrinsic(&groups)
        }),
        timed("3", "crosscheck: achieved \\ {(0,0)} == region, all subgroups", Some(LIMIT_CROSSCHECK), || {
            crosscheck_all(&groups)
        }),
    ];
    let mut triples = 0;
    outcomes.push(timed("4", "constructor round-trip over every region pair", Some(LIMIT_ROUNDTRIP), || {
        let (v, n) = round_trip(&groups);
        triples = n;
        v
    }));
    outcomes.push(timed("5a", "closed-form <H,zb> region == composed region", None, || {
        literal_vs_composed(&groups)
    }));
    outcomes.push(timed("5b", "fast profile == definition-level profile", None, || fast_vs_slow(&groups)));
    outcomes.push(timed("6", "Q8 golden regions", None, q8_goldens));

    let mut surprise = false;
    for o in &outcomes {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        let limit = o.limit.map_or(String::new(), |l| format!(" (limit {:.0}s)", l.as_secs_f64()));
        println!(
            "{verdict} criterion {}: {} [{} violations, {:.2}s{limit}]",
            o.id,
            o.title,
            o.violations.len(),
            o.elapsed.as_secs_f64()
        );
        for x in &o.violations {
            println!("    {x}");
        }
        let expected_red = KNOWN_RED.contains(&o.id);
        if expected_red != !o.passed() {
            println!("    ^ unexpected: known-red = {expected_red}");
            surprise = true;
        }
        if let Some(pins) = pinned(o.id) {
            let got: BTreeSet<&str> = o.violations.iter().map(|v| v.split(':').next().unwrap_or(v)).collect();
            let want: BTreeSet<&str> = pins.iter().copied().collect();
            if got != want {
                println!("    ^ violations differ from the pinned list");
                surprise = true;
            }
        }
    }
    println!("round-trip covered {triples} (subgroup, alpha, beta) triples");
    if surprise {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
