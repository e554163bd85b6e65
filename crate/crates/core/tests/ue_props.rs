mod common;

use proptest::prelude::*;
use ultraframe::gen::{all_frames, random_modal, rng};
use ultraframe::modal::{frame_valid, truth_membership_check, Model, UEModel};
use ultraframe::{
    build_ue, distinguishing_elements, enumerate_ultrafilters, eta_is_isomorphism, roads_between, ue_related,
    ultrafilter_road_delta, Frame, Limits, Road, UeMode, VertexSet,
};

fn modes_agree(f: &Frame) {
    let limits = Limits::default();
    let ufs = enumerate_ultrafilters(f);
    for u in &ufs {
        for v in &ufs {
            let a = ue_related(f, u, v, UeMode::A, &limits).unwrap();
            let b = ue_related(f, u, v, UeMode::B, &limits).unwrap();
            let c = ue_related(f, u, v, UeMode::C, &limits).unwrap();
            assert!(a == b && b == c, "{f:?}: {u:?} {v:?}");
        }
    }
}

fn sorted_edges(f: &Frame) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = f.edges().collect();
    e.sort();
    e
}

/// Degree and reflexivity transfer, checked against membership.
fn transfer_laws(f: &Frame) {
    let ue = build_ue(f, &Limits::default()).unwrap();
    let n = f.len();
    let deg: Vec<usize> = f.vertices().map(|w| f.successors(w).len()).collect();
    for u in ue.ultrafilters() {
        for k in 0..=n {
            let capped = VertexSet::from_iter_in(n, f.vertices().filter(|&w| deg[w] <= k));
            if u.contains(&capped) {
                assert!(ue.deg_plus(u) <= k);
            }
            let exact = VertexSet::from_iter_in(n, f.vertices().filter(|&w| deg[w] == k));
            assert_eq!(ue.deg_plus(u) == k, u.contains(&exact));
        }
        let loops = VertexSet::from_iter_in(n, f.vertices().filter(|&w| f.has_edge(w, w)));
        assert_eq!(ue.related(u, u), u.contains(&loops));
    }
}

fn inverse_commutes(f: &Frame) {
    let limits = Limits::default();
    let up = build_ue(&f.reverse(), &limits).unwrap();
    let down = build_ue(f, &limits).unwrap();
    assert_eq!(sorted_edges(up.as_frame()), sorted_edges(&down.as_frame().reverse()));
}

#[test]
fn three_vertex_corpus_laws() {
    for n in 1..=3 {
        for f in all_frames(n) {
            modes_agree(&f);
            let ue = build_ue(&f, &Limits::default()).unwrap();
            assert!(eta_is_isomorphism(&f, &ue));
            transfer_laws(&f);
            inverse_commutes(&f);
        }
    }
}

#[test]
fn modal_validity_is_preserved_by_the_extension() {
    let limits = Limits::default();
    let mut r = rng(11);
    for f in all_frames(2).chain(all_frames(3).step_by(7)) {
        let ue = build_ue(&f, &limits).unwrap();
        for _ in 0..4 {
            let phi = random_modal(&mut r, 2, 1);
            let a = frame_valid(&f, &phi, &limits).unwrap().valid;
            let b = frame_valid(ue.as_frame(), &phi, &limits).unwrap().valid;
            assert_eq!(a, b, "{phi} on {f:?}");
        }
    }
}

#[test]
fn road_images_end_in_the_last_waypoint() {
    let limits = Limits::default();
    for f in all_frames(3) {
        let ue = build_ue(&f, &limits).unwrap();
        let ufs = enumerate_ultrafilters(&f);
        for s in f.vertices() {
            for t in f.vertices().filter(|&t| t != s) {
                for road in roads_between(&f, s, t, 2).unwrap() {
                    let way: Vec<_> = road.waypoints().iter().map(|&w| ufs[w]).collect();
                    let lifted = Road::new(way.clone(), road.directions().to_vec()).unwrap();
                    assert!(lifted.holds_in(&ue));
                    let d = distinguishing_elements(&way).unwrap();
                    let x = f.set_of([s]);
                    let delta = ultrafilter_road_delta(&ue, &x, &lifted, &d).unwrap();
                    assert!(way.last().unwrap().contains(&delta));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn laws_on_random_frames(f in common::frame(6)) {
        modes_agree(&f);
        let ue = build_ue(&f, &Limits::default()).unwrap();
        prop_assert!(eta_is_isomorphism(&f, &ue));
        transfer_laws(&f);
        inverse_commutes(&f);
    }

    #[test]
    fn truth_is_membership(f in common::frame(5), seed in any::<u64>()) {
        let mut r = rng(seed);
        let valuation = ultraframe::gen::random_valuation(&mut r, &f, 2);
        let model = Model::new(f.clone(), valuation).unwrap();
        let ue = build_ue(&f, &Limits::default()).unwrap();
        let um = UEModel::new(ue, model).unwrap();
        for _ in 0..10 {
            let phi = random_modal(&mut r, 3, 2);
            prop_assert!(truth_membership_check(&um, &phi), "{}", phi);
        }
    }
}
