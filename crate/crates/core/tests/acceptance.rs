//! End-to-end acceptance run: one line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use ultraframe::census::{
    generated_substructure_verdict, hull_census, modal_logic_coincides, reflexive_point_in_ue, ue_skeleton,
    FamilyPresentation, GeneratedVerdict, Multiplicity, ReflexiveEvidence, ReflexiveVerdict,
};
use ultraframe::fo::{
    distinguishing_sentence, ef_equivalent, eval_fo, minimal_distinguishing_rounds, parse_fo, satisfies, ultraproduct,
};
use ultraframe::gen::{all_frames, random_bounded_frame, random_frame, random_modal, random_sentence, random_valuation, rng};
use ultraframe::modal::{truth_membership_check, Model, UEModel};
use ultraframe::{
    build_ue, canonical_embedding, canonical_form, enumerate_ultrafilters, hull, hull_formula, rooted_iso, ue_related,
    Frame, Limits, UeMode, Ultrafilter, VertexSet,
};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn family(name: &str) -> FamilyPresentation {
    FamilyPresentation::from_json(&fixture(name)).unwrap()
}

/// All 512 labelled digraphs on 3 vertices, then 500 random ones on ≤ 6.
fn corpus() -> Vec<Frame> {
    let mut out: Vec<Frame> = all_frames(3).collect();
    let mut r = rng(1);
    for _ in 0..500 {
        let n = r.random_range(1..=6);
        let p = r.random_range(0.1..0.7);
        out.push(random_frame(&mut r, n, p));
    }
    out
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(start: Instant, cap: Duration) -> Result<(), String> {
    check(start.elapsed() < cap, || format!("took {:?}, limit {cap:?}", start.elapsed()))
}

fn three_definitions() -> Result<String, String> {
    let start = Instant::now();
    let limits = Limits::default();
    let mut pairs = 0;
    let corpus = corpus();
    for f in &corpus {
        let ufs = enumerate_ultrafilters(f);
        for u in &ufs {
            for v in &ufs {
                let a = ue_related(f, u, v, UeMode::A, &limits).map_err(|e| e.to_string())?;
                let b = ue_related(f, u, v, UeMode::B, &limits).map_err(|e| e.to_string())?;
                let c = ue_related(f, u, v, UeMode::C, &limits).map_err(|e| e.to_string())?;
                check(a == b && b == c, || format!("{f:?}: A={a} B={b} C={c} on {u:?}, {v:?}"))?;
                pairs += 1;
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} frames, {pairs} pairs", corpus.len()))
}

fn eta_isomorphism() -> Result<String, String> {
    let limits = Limits::default();
    let corpus = corpus();
    for f in &corpus {
        let ue = build_ue(f, &limits).map_err(|e| e.to_string())?;
        let eta = canonical_embedding(f);
        check(eta.len() == ue.ultrafilters().len(), || format!("{f:?}: η is not onto"))?;
        for a in f.vertices() {
            for b in f.vertices() {
                check(f.has_edge(a, b) == ue.related(&eta[a], &eta[b]), || format!("{f:?}: η breaks ({a}, {b})"))?;
            }
        }
    }
    Ok(format!("{} frames", corpus.len()))
}

fn truth_membership() -> Result<String, String> {
    let limits = Limits::default();
    let mut r = rng(3);
    let mut checks = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=6);
        let letters = r.random_range(1..=3);
        let p = r.random_range(0.1..0.6);
        let f = random_frame(&mut r, n, p);
        let model = Model::new(f.clone(), random_valuation(&mut r, &f, letters)).unwrap();
        let um = UEModel::new(build_ue(&f, &limits).unwrap(), model).unwrap();
        for _ in 0..50 {
            let phi = random_modal(&mut r, 4, letters);
            check(truth_membership_check(&um, &phi), || format!("{phi} on {f:?}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} formula checks on 200 models"))
}

fn degree_transfer() -> Result<String, String> {
    let limits = Limits::default();
    let mut r = rng(4);
    let sampled: Vec<Frame> = (0..300).map(|_| { let n = r.random_range(1..=6); random_frame(&mut r, n, 0.35) }).collect();
    let mut frames = 0;
    for f in all_frames(3).chain(sampled) {
        let ue = build_ue(&f, &limits).unwrap();
        let n = f.len();
        let deg: Vec<usize> = f.vertices().map(|w| f.successors(w).len()).collect();
        for u in ue.ultrafilters() {
            for k in 0..=n {
                let capped = VertexSet::from_iter_in(n, f.vertices().filter(|&w| deg[w] <= k));
                check(!u.contains(&capped) || ue.deg_plus(u) <= k, || format!("cap {k} fails at {u:?} in {f:?}"))?;
                let exact = VertexSet::from_iter_in(n, f.vertices().filter(|&w| deg[w] == k));
                check((ue.deg_plus(u) == k) == u.contains(&exact), || format!("exactness {k} fails at {u:?} in {f:?}"))?;
            }
        }
        frames += 1;
    }
    Ok(format!("{frames} frames"))
}

fn reflexivity() -> Result<String, String> {
    let limits = Limits::default();
    for f in all_frames(3) {
        let ue = build_ue(&f, &limits).unwrap();
        let loops = VertexSet::from_iter_in(3, f.vertices().filter(|&w| f.has_edge(w, w)));
        for u in ue.ultrafilters() {
            check(ue.related(u, u) == u.contains(&loops), || format!("{u:?} in {f:?}"))?;
        }
    }
    Ok("512 frames".into())
}

fn inverse_commutation() -> Result<String, String> {
    let limits = Limits::default();
    let corpus = corpus();
    for f in &corpus {
        let mut up: Vec<_> = build_ue(&f.reverse(), &limits).unwrap().as_frame().edges().collect();
        let mut down: Vec<_> = build_ue(f, &limits).unwrap().as_frame().reverse().edges().collect();
        up.sort();
        down.sort();
        check(up == down, || format!("{f:?}"))?;
    }
    Ok(format!("{} frames", corpus.len()))
}

/// The integers `-n..=n` under successor.
fn z_window(n: usize) -> Frame {
    Frame::numbered(2 * n + 1, (0..2 * n).map(|i| (i, i + 1))).unwrap()
}

fn nat_succ_fixture() -> Result<String, String> {
    let start = Instant::now();
    let fam = family("nat_succ.json");
    let mut seams = Vec::new();
    for n in 1..=3 {
        let census = hull_census(&fam, n).map_err(|e| e.to_string())?;
        let omega: Vec<_> = census.omega_types().collect();
        check(omega.len() == 1, || format!("depth {n}: {} omega types", omega.len()))?;
        let finite: usize = census
            .entries
            .values()
            .filter(|e| !e.multiplicity.is_omega())
            .map(|e| match e.multiplicity {
                Multiplicity::Finite(k) => Ok(k),
                m => Err(format!("depth {n}: non-exact multiplicity {}", m.label())),
            })
            .sum::<Result<usize, String>>()?;
        seams.push(finite);

        let skel = ue_skeleton(&fam, n, None).map_err(|e| e.to_string())?;
        check(skel.representative_roots.len() == 1, || format!("depth {n}: skeleton has {} representatives", skel.representative_roots.len()))?;
        let rep = hull(&skel.frame, skel.representative_roots[0], n).unwrap();
        let window = hull(&z_window(n), n, n).unwrap();
        check(rooted_iso(&rep, &window).is_some(), || format!("depth {n}: representative is not a Z-window"))?;
    }
    for n in 0..=3 {
        let report = modal_logic_coincides(&fam, n, None).map_err(|e| e.to_string())?;
        check(report.coincides, || format!("depth {n}: unmatched {:?}", report.unmatched))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("one omega type per depth, origin-seam types {seams:?}"))
}

fn chains_fixture() -> Result<String, String> {
    let start = Instant::now();
    let verdict = reflexive_point_in_ue(&family("chains_lt.json"), 10).map_err(|e| e.to_string())?;
    let detail = match verdict {
        ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::Chromatic { component, lower_bound, .. } } => {
            check(component <= 11 && lower_bound > 10, || format!("component {component}, bound {lower_bound}"))?;
            format!("Yes at component {component} (chromatic bound {lower_bound})")
        }
        other => return Err(format!("chains: {other:?}")),
    };
    match reflexive_point_in_ue(&family("nat_succ.json"), 10).map_err(|e| e.to_string())? {
        ReflexiveVerdict::No { witness } => check(witness.colors == 2, || format!("{} colours", witness.colors))?,
        other => return Err(format!("successor: {other:?}")),
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{detail}; successor No with 2 colours"))
}

fn nat_lt_fixture() -> Result<String, String> {
    let fam = family("nat_lt.json");
    match generated_substructure_verdict(&fam).map_err(|e| e.to_string())? {
        GeneratedVerdict::No { witness, .. } => check(witness == "g:0", || format!("witness {witness}"))?,
        other => return Err(format!("generated: {other:?}")),
    }
    let (frame_sentence, extension_sentence) = match reflexive_point_in_ue(&fam, 10).map_err(|e| e.to_string())? {
        ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::Chromatic { frame_sentence, extension_sentence, .. } } => {
            (frame_sentence, extension_sentence)
        }
        other => return Err(format!("reflexive: {other:?}")),
    };
    check(frame_sentence == "forall x. ~R(x,x)" && extension_sentence == "exists x. R(x,x)", || {
        format!("sentences {frame_sentence:?} / {extension_sentence:?}")
    })?;
    let truncation = ultraframe::census::expand(&fam, 12).unwrap();
    check(satisfies(&truncation, &parse_fo(&frame_sentence).unwrap()).unwrap(), || "frame sentence fails".into())?;
    println!("    evidence: \"{frame_sentence}\" / \"{extension_sentence}\"");
    Ok("No at vertex 0; reflexive Yes; sentence pair emitted".into())
}

fn finite_los() -> Result<String, String> {
    let limits = Limits::default();
    let mut r = rng(10);
    let mut checks = 0;
    for _ in 0..100 {
        let k = r.random_range(1..=4);
        let fs: Vec<Frame> = (0..k).map(|_| { let n = r.random_range(1..=5); random_frame(&mut r, n, 0.4) }).collect();
        let d = Ultrafilter::on_indices(k, r.random_range(0..k)).unwrap();
        let up = ultraproduct(&fs, &d, &limits).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let s = random_sentence(&mut r, 2);
            let holds = VertexSet::from_iter_in(k, (0..k).filter(|&i| satisfies(&fs[i], &s).unwrap()));
            check(satisfies(&up.frame, &s).unwrap() == d.contains(&holds), || format!("{s}"))?;
            checks += 1;
        }
    }
    Ok(format!("100 ultraproducts, {checks} sentences"))
}

fn ef_oracle() -> Result<String, String> {
    let limits = Limits::default();
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.random_range(1..=4);
        let f = random_frame(&mut r, n, 0.4);
        let mut perm: Vec<usize> = f.vertices().collect();
        perm.shuffle(&mut r);
        let g = Frame::numbered(f.len(), f.edges().map(|(a, b)| (perm[a], perm[b]))).unwrap();
        for k in 0..=4 {
            check(ef_equivalent(&f, &g, k, &limits).unwrap(), || format!("copy of {f:?} told apart at {k}"))?;
        }
    }
    let (l3, l4) = (Frame::from_json(&fixture("order3.json")).unwrap(), Frame::from_json(&fixture("order4.json")).unwrap());
    let k = minimal_distinguishing_rounds(&l3, &l4, 4, &limits)
        .map_err(|e| e.to_string())?
        .ok_or("orders 3 and 4 not distinguished within 4 rounds")?;
    let found = distinguishing_sentence(&l3, &l4, k, &limits).map_err(|e| e.to_string())?;
    let sentence = found.ok_or_else(|| format!("no sentence of rank {k}"))?;
    check(satisfies(&l3, &sentence).unwrap() && !satisfies(&l4, &sentence).unwrap(), || "sentence check".into())?;
    let below = distinguishing_sentence(&l3, &l4, k - 1, &limits).map_err(|e| e.to_string())?;
    check(below.is_none(), || format!("search finds rank {} sentence", k - 1))?;
    Ok(format!("orders 3 vs 4 split at k={k} by {sentence}"))
}

fn hull_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut r = rng(12);
    let mut pairs = 0;
    let frames: Vec<Frame> = (0..1000).map(|_| { let n = r.random_range(1..=10); random_bounded_frame(&mut r, n, 3) }).collect();
    for (i, f1) in frames.iter().enumerate() {
        let f2 = &frames[(i + 1) % frames.len()];
        for depth in 0..=2 {
            let h2s: Vec<_> = f2.vertices().map(|v| hull(f2, v, depth).unwrap()).collect();
            let c2s: Vec<_> = h2s.iter().map(canonical_form).collect();
            for w in f1.vertices() {
                let h1 = hull(f1, w, depth).unwrap();
                let c1 = canonical_form(&h1);
                let formula = hull_formula(&h1);
                for v in f2.vertices() {
                    let same = c1 == c2s[v];
                    let iso = rooted_iso(&h1, &h2s[v]).is_some();
                    let asg = BTreeMap::from([("x".to_string(), v)]);
                    let sat = eval_fo(f2, &formula, &asg).unwrap();
                    check(same == iso && iso == sat, || format!("depth {depth}: cert {same}, iso {iso}, formula {sat}"))?;
                    pairs += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("1000 frames, {pairs} hull pairs"))
}

type Criterion = (&'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 12] = [
        ("three-definition agreement", three_definitions),
        ("eta-isomorphism", eta_isomorphism),
        ("truth-membership", truth_membership),
        ("degree transfer", degree_transfer),
        ("reflexivity transfer", reflexivity),
        ("inverse commutation", inverse_commutation),
        ("successor fixture", nat_succ_fixture),
        ("chains fixture", chains_fixture),
        ("natural order fixture", nat_lt_fixture),
        ("finite Los", finite_los),
        ("EF solver oracle", ef_oracle),
        ("hull cross-oracle", hull_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
