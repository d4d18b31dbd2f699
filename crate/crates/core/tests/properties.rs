//! Invariants as properties over random preorders, random finite-set
//! categories, the small-category enumeration, and random dynamical systems.

use std::sync::Arc;

use proptest::prelude::*;

use commacat::constructions::{arrow_category, corner_categories, map_c, slice};
use commacat::instances::{set_category, universe_from_arg, DynSystemData};
use commacat::io::CategoryFile;
use commacat::limits::{enumerate_functors, equalizer, limit, small_categories, Diagram};
use commacat::limpre::{is_limit_preserving, lim_pre, orbit_functor};
use commacat::{CategoryBuilder, FinCategory, FunctorData, Ob};

/// The reflexive-transitive closure of `edges` on `n` points, as a category.
fn preorder(n: usize, edges: &[bool]) -> FinCategory {
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        le[i][i] = true;
        for j in 0..n {
            le[i][j] |= edges[i * n + j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                le[i][j] |= le[i][k] && le[k][j];
            }
        }
    }
    let mut b = CategoryBuilder::new("P");
    let obs: Vec<Ob> = (0..n).map(|i| b.add_object(format!("p{i}"))).collect();
    let mut mor = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if le[i][j] {
                mor[i][j] = Some(b.add_morphism(format!("p{i}<=p{j}"), obs[i], obs[j]));
            }
        }
    }
    for i in 0..n {
        b.set_identity(obs[i], mor[i][i].unwrap());
        for j in 0..n {
            for k in 0..n {
                if let (Some(f), Some(g)) = (mor[i][j], mor[j][k]) {
                    b.set_composite(g, f, mor[i][k].unwrap());
                }
            }
        }
    }
    b.build().unwrap()
}

fn arb_preorder() -> impl Strategy<Value = FinCategory> {
    (1usize..=5).prop_flat_map(|n| proptest::collection::vec(proptest::bool::weighted(0.3), n * n).prop_map(move |e| preorder(n, &e)))
}

/// A full subcategory of finite sets over {a,b,c} on a random family of subsets.
fn arb_setcat() -> impl Strategy<Value = commacat::instances::SetCategory> {
    proptest::collection::btree_set(0u32..8, 1..=4)
        .prop_map(|sets| set_category("S", &universe_from_arg("abc"), &sets.into_iter().collect::<Vec<_>>()).unwrap())
}

fn arb_category() -> impl Strategy<Value = Arc<FinCategory>> {
    prop_oneof![
        arb_preorder().prop_map(Arc::new),
        arb_setcat().prop_map(|s| s.cat),
        (0usize..12).prop_map(|i| small_categories(4)[i].clone()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn identities_are_isos(c in arb_category()) {
        for x in c.objects() {
            let i = c.id(x);
            prop_assert!(c.is_mono(i) && c.is_epi(i) && c.is_iso(i));
        }
    }

    #[test]
    fn isos_are_mono_and_epi(c in arb_category()) {
        for f in c.morphisms() {
            if c.is_iso(f) {
                prop_assert!(c.is_mono(f) && c.is_epi(f));
            }
        }
    }

    #[test]
    fn preorder_arrows_are_mono_and_epi(c in arb_preorder()) {
        prop_assert!(c.is_thin());
        for f in c.morphisms() {
            prop_assert!(c.is_mono(f) && c.is_epi(f));
        }
    }

    #[test]
    fn initial_object_has_one_arrow_everywhere(c in arb_category()) {
        if let Some(z) = c.find_initial() {
            for y in c.objects() {
                prop_assert_eq!(c.hom(z, y).len(), 1);
            }
        }
    }

    #[test]
    fn surjective_right_cancellation(s in arb_setcat()) {
        let c = &s.cat;
        for (g, f) in c.composable_pairs() {
            if c.is_epi(f) && c.is_epi(c.compose(g, f)) {
                prop_assert!(c.is_epi(g), "{} after {}", c.mor_name(g), c.mor_name(f));
            }
        }
    }

    #[test]
    fn mono_matches_injectivity(s in arb_setcat()) {
        for f in s.cat.morphisms() {
            let dom = s.sets[s.cat.dom(f).ix()];
            let injective = s.image(f, dom).count_ones() == dom.count_ones();
            prop_assert_eq!(s.cat.is_mono(f), injective);
        }
    }

    #[test]
    fn functor_composites_revalidate(i in 0usize..12, j in 0usize..12, k in 0usize..12, pick in any::<prop::sample::Index>()) {
        let cats = small_categories(4);
        let (a, b, c) = (&cats[i], &cats[j], &cats[k]);
        let fs = enumerate_functors(a, b);
        let gs = enumerate_functors(b, c);
        if !fs.is_empty() && !gs.is_empty() {
            let f = &fs[pick.index(fs.len())];
            let g = &gs[pick.index(gs.len())];
            let h = g.after(f).unwrap();
            let again = FunctorData::new("h", a.clone(), c.clone(), h.object_map().to_vec(), h.morphism_map().to_vec());
            prop_assert!(again.is_ok());
        }
    }

    #[test]
    fn arrow_category_counts_and_faithful_forgetfuls(c in arb_category()) {
        prop_assume!(c.morphism_count() <= 16);
        let arr = arrow_category(&c).unwrap();
        prop_assert_eq!(arr.base.object_count(), c.morphism_count());
        let mut seen = std::collections::HashSet::new();
        for m in arr.base.morphisms() {
            let key = (arr.base.dom(m), arr.base.cod(m), arr.forget1.mor(m), arr.forget2.mor(m));
            prop_assert!(seen.insert(key));
        }
    }

    #[test]
    fn preorder_slice_is_down_set(c in arb_preorder(), pick in any::<prop::sample::Index>()) {
        let c = Arc::new(c);
        let x = Ob(pick.index(c.object_count()) as u32);
        let sl = slice(&c, x).unwrap();
        let down = c.objects().filter(|&y| !c.hom(y, x).is_empty()).count();
        prop_assert_eq!(sl.base.object_count(), down);
    }

    #[test]
    fn map_c_marginal_and_corners_revalidate(c in arb_preorder()) {
        prop_assume!(c.morphism_count() <= 10);
        let c = Arc::new(c);
        let id = FunctorData::identity(&c);
        let cc = commacat::constructions::comma(&id, &id).unwrap();
        let (dl, ur) = corner_categories(&cc).unwrap();
        prop_assert!(CategoryFile::from_category(&dl.base).build().is_ok());
        prop_assert!(CategoryFile::from_category(&ur.base).build().is_ok());
        for x in cc.base.objects() {
            let sl = slice(cc.a_cat(), cc.provenance(x).a).unwrap();
            let m = map_c(&cc, x, &sl, &dl).unwrap();
            prop_assert!(dl.forget1.after(&m).unwrap().same_as(&sl.forget1));
        }
    }

    #[test]
    fn equalizer_legs_are_mono(s in arb_setcat()) {
        let c = &s.cat;
        for x in c.objects() {
            for y in c.objects() {
                let h = c.hom(x, y);
                for &f in h.iter().take(4) {
                    for &g in h.iter().take(4) {
                        if let Some(e) = equalizer(c, f, g).unwrap() {
                            prop_assert!(e.leg_is_mono);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn limit_ties_are_isomorphic(c in arb_category(), i in 0usize..12) {
        let j = small_categories(3).get(i % 4).unwrap().clone();
        for f in enumerate_functors(&j, &c).into_iter().take(16) {
            let d = Diagram::new(f).unwrap();
            if let Some(l) = limit(&d).unwrap() {
                for t in &l.ties {
                    let iso = c.hom(t.apex, l.cone.apex).iter().any(|&m| c.is_iso(m));
                    prop_assert!(iso);
                }
            }
        }
    }

    #[test]
    fn identity_preserves_limits_and_lim_pre_is_identity(c in arb_preorder()) {
        let c = Arc::new(c);
        let id = FunctorData::identity(&c);
        prop_assert!(is_limit_preserving(&id, 3).unwrap().preserving);
        let k = lim_pre(&id, &id).unwrap();
        for y in c.objects() {
            let z = k.functor.ob(y);
            prop_assert!(!c.hom(z, y).is_empty() && !c.hom(y, z).is_empty());
        }
    }

    #[test]
    fn category_files_round_trip(c in arb_category()) {
        let text = CategoryFile::from_category(&c).to_json();
        let back = CategoryFile::parse(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(&back.build().unwrap(), &*c);
    }

    #[test]
    fn orbit_laws(n in 1usize..=4, gens in proptest::collection::vec(proptest::collection::vec(0usize..4, 4), 0..=2), t in 0usize..=3) {
        let gens: Vec<Vec<usize>> = gens.into_iter().map(|g| g[..n].iter().map(|v| v % n).collect()).collect();
        let omega: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let sys = DynSystemData::new(omega, gens, t.max(1)).unwrap();
        let orb = orbit_functor(&sys).unwrap();
        let full = (1u32 << n) - 1;
        for s in 0..=full {
            let o = orb.orbit(s);
            prop_assert_eq!(s & !o, 0);
            prop_assert_eq!(orb.orbit(o), o);
            for g in &sys.generators {
                prop_assert_eq!(DynSystemData::image(g, o) & !o, 0);
            }
            for s2 in 0..=full {
                if s & !s2 == 0 {
                    prop_assert_eq!(o & !orb.orbit(s2), 0);
                }
            }
        }
    }
}
