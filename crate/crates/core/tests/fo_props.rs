mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use ultraframe::fo::{
    distinguishing_sentence, ef_equivalent, eval_fo, los_like_check, parse_fo, satisfies, ultraproduct, FOFormula,
};
use ultraframe::gen::{random_fo, random_sentence, rng};
use ultraframe::{Frame, Limits, Ultrafilter, VertexSet};

fn relabelled(f: &Frame, perm: &[usize]) -> Frame {
    Frame::numbered(f.len(), f.edges().map(|(a, b)| (perm[a], perm[b]))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn a_frame_is_ef_equivalent_to_itself(f in common::frame(4), k in 0usize..4) {
        prop_assert!(ef_equivalent(&f, &f, k, &Limits::default()).unwrap());
    }

    #[test]
    fn ef_agrees_with_sentence_search(f1 in common::frame(3), f2 in common::frame(3), k in 1usize..3) {
        let limits = Limits::default();
        let ef = ef_equivalent(&f1, &f2, k, &limits).unwrap();
        let found = distinguishing_sentence(&f1, &f2, k, &limits).unwrap();
        prop_assert_eq!(ef, found.is_none());
        if let Some(s) = found {
            prop_assert!(s.is_sentence() && s.quantifier_rank() <= k && s.is_nnf());
            prop_assert!(satisfies(&f1, &s).unwrap());
            prop_assert!(!satisfies(&f2, &s).unwrap());
        }
    }

    #[test]
    fn ef_equivalent_frames_agree_on_sentences(f1 in common::frame(4), f2 in common::frame(4), seed in any::<u64>()) {
        let limits = Limits::default();
        if ef_equivalent(&f1, &f2, 2, &limits).unwrap() {
            let mut r = rng(seed);
            for _ in 0..20 {
                let s = random_sentence(&mut r, 2);
                prop_assert_eq!(satisfies(&f1, &s).unwrap(), satisfies(&f2, &s).unwrap());
            }
        }
    }

    #[test]
    fn isomorphic_copies_agree(f in common::frame(4), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..f.len()).collect();
        let mut r = rng(seed);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let g = relabelled(&f, &perm);
        prop_assert!(ef_equivalent(&f, &g, 3, &Limits::default()).unwrap());
    }

    #[test]
    fn los_holds_on_ultraproducts(
        fs in proptest::collection::vec(common::frame(4), 1..=4),
        pick in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let limits = Limits::default();
        let d = Ultrafilter::on_indices(fs.len(), pick.index(fs.len())).unwrap();
        let up = ultraproduct(&fs, &d, &limits).unwrap();
        let mut r = rng(seed);
        for _ in 0..6 {
            let s = random_sentence(&mut r, 2);
            let members = VertexSet::from_iter_in(fs.len(), (0..fs.len()).filter(|&i| satisfies(&fs[i], &s).unwrap()));
            prop_assert_eq!(satisfies(&up.frame, &s).unwrap(), d.contains(&members));

            // one free variable, read through the class representatives
            let phi = random_fo(&mut r, &mut vec!["x1".to_string()], 1, 3);
            for (c, rep) in up.representatives.iter().enumerate() {
                let asg = BTreeMap::from([("x1".to_string(), c)]);
                let holds = (0..fs.len()).filter(|&i| {
                    let a = BTreeMap::from([("x1".to_string(), rep[i])]);
                    eval_fo(&fs[i], &phi, &a).unwrap()
                });
                let members = VertexSet::from_iter_in(fs.len(), holds);
                prop_assert_eq!(eval_fo(&up.frame, &phi, &asg).unwrap(), d.contains(&members));
            }
        }
    }

    #[test]
    fn los_like_holds_on_finite_frames(f in common::frame(5), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut r = rng(seed);
        let phi = random_fo(&mut r, &mut vec!["x1".to_string()], 2, 3);
        prop_assume!(phi.free_vars().len() == 1);
        let u = Ultrafilter::principal(&f, pick.index(f.len())).unwrap();
        prop_assert!(los_like_check(&f, &phi, &u, &Limits::default()).unwrap());
    }

    #[test]
    fn printed_sentences_parse_back(seed in any::<u64>()) {
        let s: FOFormula = random_sentence(&mut rng(seed), 3);
        prop_assert_eq!(parse_fo(&s.to_string()).unwrap(), s);
    }
}
