use std::sync::Arc;

use idealpack::expr::{materialize, Catalog};
use idealpack::group::{Universe, Window};
use idealpack::ideal::{make_ideal, Ideal, IdealSpec};
use idealpack::largeness::{is_small, LargeBounds, SmallBounds};
use idealpack::packing::{candidate_translators, pack_exact, CandidateSpec, PackOptions};
use idealpack::set::MaterializedSet;
use proptest::prelude::*;

fn cyclic(order: u64) -> Arc<Universe> {
    Arc::new(Universe::cyclic(order).unwrap())
}

fn set_of(u: &Arc<Universe>, mask: u32) -> MaterializedSet {
    MaterializedSet::from_predicate(u, |i| mask >> i & 1 == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // A larger ideal can only make more families conflict-free.
    #[test]
    fn pack_grows_with_the_ideal(mask in 0u32..1 << 12) {
        let u = cyclic(12);
        let a = set_of(&u, mask);
        let cands = candidate_translators(&u, &CandidateSpec::All).unwrap();
        let small = Ideal::trivial(&u);
        let big = make_ideal(
            &IdealSpec::Generated {
                base: Box::new(IdealSpec::Trivial),
                generators: vec![idealpack::expr::parse_set_expr("list{0, 1}").unwrap()],
                max_translates: 1,
                shift_range: None,
            },
            &u,
        )
        .unwrap();
        let opts = PackOptions::default();
        let v0 = pack_exact(&a, &small, &cands, 2, &opts).unwrap().value;
        let v1 = pack_exact(&a, &big, &cands, 2, &opts).unwrap().value;
        prop_assert!(v0 <= v1);
    }

    // Rotating the set on Z_N does not change its packing index.
    #[test]
    fn pack_is_rotation_invariant(mask in 0u32..1 << 10, r in 0usize..10) {
        let u = cyclic(10);
        let a = set_of(&u, mask);
        let rotated = MaterializedSet::from_predicate(&u, |i| a.bits().contains((i + 10 - r) % 10));
        let cands = candidate_translators(&u, &CandidateSpec::All).unwrap();
        let triv = Ideal::trivial(&u);
        let opts = PackOptions::default();
        for n in [2, 3] {
            let x = pack_exact(&a, &triv, &cands, n, &opts).unwrap().value;
            let y = pack_exact(&rotated, &triv, &cands, n, &opts).unwrap().value;
            prop_assert_eq!(x, y);
        }
    }

    // Subsets of small sets are small.
    #[test]
    fn smallness_is_antitone(seed in any::<u64>(), keep in any::<u64>()) {
        let u = Arc::new(Universe::integers(Window::with_core(0, 600, 12).unwrap()));
        let b = MaterializedSet::from_predicate(&u, |i| (seed.rotate_left(i as u32 % 64) ^ i as u64).is_multiple_of(7));
        let a = MaterializedSet::from_predicate(&u, |i| b.bits().contains(i) && keep >> (i % 64) & 1 == 1);
        let bounds = SmallBounds::new(2, 4, LargeBounds::new(8, 8));
        let sb = is_small(&b, &bounds).unwrap();
        let sa = is_small(&a, &bounds).unwrap();
        prop_assert!(!sb.is_small() || sa.is_small());
    }
}

#[test]
fn shipped_catalog_materializes_everywhere() {
    let cat = Catalog::shipped();
    let universes = [
        Arc::new(Universe::integers(Window::with_core(-50, 500, 10).unwrap())),
        cyclic(30),
    ];
    for u in &universes {
        for (name, expr) in cat.entries() {
            let e = cat.resolve(expr).unwrap();
            let s = materialize(&e, u).unwrap_or_else(|err| panic!("{name}: {err}"));
            assert!(s.count() <= u.size());
        }
    }
}
