use std::collections::BTreeMap;

use proptest::prelude::*;
use ultraframe::fo::eval_fo;
use ultraframe::gen::{random_bounded_frame, rng};
use ultraframe::{canonical_form, hull, hull_formula, rooted_iso, Frame, RootedGraph};

fn is_rooted_iso(h1: &RootedGraph, h2: &RootedGraph, map: &[usize]) -> bool {
    let (g1, g2) = (h1.graph(), h2.graph());
    map.len() == g1.len()
        && g1.len() == g2.len()
        && map[h1.root()] == h2.root()
        && g1.vertices().all(|a| g1.vertices().all(|b| g1.has_edge(a, b) == g2.has_edge(map[a], map[b])))
}

fn formula_holds(h: &RootedGraph, frame: &Frame, v: usize) -> bool {
    let asg = BTreeMap::from([("x".to_string(), v)]);
    eval_fo(frame, &hull_formula(h), &asg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn hulls_grow_monotonically(seed in any::<u64>(), n in 3usize..10) {
        let f = random_bounded_frame(&mut rng(seed), n, 3);
        for w in f.vertices() {
            let mut last: Vec<usize> = Vec::new();
            let mut stable = false;
            for depth in 0..=n {
                let mut now = hull(&f, w, depth).unwrap().origin().to_vec();
                now.sort();
                prop_assert!(last.iter().all(|v| now.contains(v)));
                if stable {
                    prop_assert_eq!(&now, &last);
                }
                stable = now == last;
                last = now;
            }
        }
    }

    #[test]
    fn hull_size_is_bounded_by_degree(seed in any::<u64>(), n in 3usize..10, m in 1usize..4) {
        let f = random_bounded_frame(&mut rng(seed), n, m);
        for w in f.vertices() {
            for depth in 0..3u32 {
                let bound: usize = (0..=depth).map(|i| m.pow(i)).sum();
                prop_assert!(hull(&f, w, depth as usize).unwrap().len() <= bound);
            }
        }
    }

    #[test]
    fn certificate_iso_and_formula_agree(seed in any::<u64>(), n1 in 1usize..=10, n2 in 1usize..=10, depth in 0usize..=2) {
        let mut r = rng(seed);
        let (f1, f2) = (random_bounded_frame(&mut r, n1, 3), random_bounded_frame(&mut r, n2, 3));
        for w in f1.vertices() {
            let h1 = hull(&f1, w, depth).unwrap();
            let c1 = canonical_form(&h1);
            for v in f2.vertices() {
                let h2 = hull(&f2, v, depth).unwrap();
                let same_cert = c1 == canonical_form(&h2);
                let iso = rooted_iso(&h1, &h2);
                if let Some(map) = &iso {
                    prop_assert!(is_rooted_iso(&h1, &h2, map));
                }
                prop_assert_eq!(same_cert, iso.is_some());
                prop_assert_eq!(same_cert, formula_holds(&h1, &f2, v));
            }
        }
    }
}
