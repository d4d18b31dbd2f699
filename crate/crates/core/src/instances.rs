//! Builders for the example categories: power-set preorders, categories of
//! finite sets and functions, their mono subcategories, the inclusion
//! ι: 2^U → FinSet(U), and finite dynamical systems.
//!
//! Subsets of a universe are bitmasks; power-set objects are numbered by
//! mask, so `Ob(mask)` is the subset `mask`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::category::{CategoryBuilder, FinCategory, Mor, Ob};
use crate::error::{Error, Result};
use crate::functor::FunctorData;

/// Universe sizes above this are refused outright; masks are `u32`.
pub const MAX_UNIVERSE: usize = 16;

pub fn subset_name(universe: &[String], mask: u32) -> String {
    let parts: Vec<&str> = universe
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.as_str())
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Parses "{a,b}" (or "a,b") against a universe.
pub fn parse_subset(universe: &[String], text: &str) -> Result<u32> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut mask = 0;
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i = universe
            .iter()
            .position(|u| u == part)
            .ok_or_else(|| Error::UnknownObject { id: part.to_string() })?;
        mask |= 1 << i;
    }
    Ok(mask)
}

fn check_universe(universe: &[String]) -> Result<()> {
    if universe.len() > MAX_UNIVERSE {
        return Err(Error::SizeGuardExceeded { what: "universe".into(), count: universe.len(), guard: MAX_UNIVERSE });
    }
    let distinct: BTreeSet<&String> = universe.iter().collect();
    if distinct.len() != universe.len() {
        let dup = universe.iter().find(|u| universe.iter().filter(|v| v == u).count() > 1).unwrap();
        return Err(Error::DuplicateId { id: dup.clone() });
    }
    Ok(())
}

/// 2^U ordered by inclusion; object `Ob(mask)`, morphisms "S<=T".
pub fn powerset_preorder(universe: &[String]) -> Result<FinCategory> {
    check_universe(universe)?;
    let n = 1u32 << universe.len();
    let mut b = CategoryBuilder::new(format!("2^{}", subset_name(universe, n - 1)));
    for m in 0..n {
        b.add_object(subset_name(universe, m));
    }
    let mut arrow = HashMap::new();
    for s in 0..n {
        for t in 0..n {
            if s & !t == 0 {
                let f = b.add_morphism(
                    format!("{}<={}", subset_name(universe, s), subset_name(universe, t)),
                    Ob(s),
                    Ob(t),
                );
                arrow.insert((s, t), f);
                if s == t {
                    b.set_identity(Ob(s), f);
                }
            }
        }
    }
    for (&(s, t), &f) in &arrow {
        for v in 0..n {
            if let Some(&g) = arrow.get(&(t, v)) {
                b.set_composite(g, f, arrow[&(s, v)]);
            }
        }
    }
    b.build()
}

/// A full subcategory of finite sets and all functions, with the function
/// tables kept alongside for oracles.
#[derive(Clone, Debug)]
pub struct SetCategory {
    pub cat: Arc<FinCategory>,
    pub universe: Vec<String>,
    /// Subset of each object.
    pub sets: Vec<u32>,
    /// Per morphism: image of each universe element in the domain, indexed by
    /// universe position; `usize::MAX` outside the domain.
    pub functions: Vec<Vec<usize>>,
}

impl SetCategory {
    /// Direct image of `a` (a subset of the domain) under morphism `f`.
    pub fn image(&self, f: Mor, a: u32) -> u32 {
        self.functions[f.ix()]
            .iter()
            .enumerate()
            .filter(|&(i, &v)| a >> i & 1 == 1 && v != usize::MAX)
            .fold(0, |acc, (_, &v)| acc | 1 << v)
    }

    /// The morphism with the given table, if present.
    pub fn function(&self, dom: Ob, cod: Ob, table: &[usize]) -> Option<Mor> {
        self.cat.hom(dom, cod).iter().copied().find(|&f| self.functions[f.ix()] == table)
    }

    pub fn object_of(&self, mask: u32) -> Option<Ob> {
        self.sets.iter().position(|&s| s == mask).map(|i| Ob(i as u32))
    }
}

fn elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Finite sets `sets` (subsets of `universe`) and all functions between them.
pub fn set_category(name: &str, universe: &[String], sets: &[u32]) -> Result<SetCategory> {
    check_universe(universe)?;
    let mut b = CategoryBuilder::new(name);
    for &s in sets {
        b.add_object(subset_name(universe, s));
    }
    let mut functions = Vec::new();
    let mut lookup: HashMap<(usize, usize, Vec<usize>), Mor> = HashMap::new();
    let guard = crate::category::size_guard();
    for (si, &s) in sets.iter().enumerate() {
        for (ti, &t) in sets.iter().enumerate() {
            let dom = elements(s);
            let cod = elements(t);
            if !dom.is_empty() && cod.is_empty() {
                continue;
            }
            let count = cod.len().checked_pow(dom.len() as u32).unwrap_or(usize::MAX);
            if functions.len().saturating_add(count) > guard {
                return Err(Error::SizeGuardExceeded { what: name.to_string(), count: functions.len() + count, guard });
            }
            for k in 0..count {
                let mut table = vec![usize::MAX; universe.len()];
                let mut rest = k;
                let mut parts = Vec::with_capacity(dom.len());
                for &x in &dom {
                    let y = cod[rest % cod.len()];
                    rest /= cod.len();
                    table[x] = y;
                    parts.push(format!("{}:{}", universe[x], universe[y]));
                }
                let id = format!(
                    "{}->{}[{}]",
                    subset_name(universe, s),
                    subset_name(universe, t),
                    parts.join(",")
                );
                let f = b.add_morphism(id, Ob(si as u32), Ob(ti as u32));
                if si == ti && dom.iter().all(|&x| table[x] == x) {
                    b.set_identity(Ob(si as u32), f);
                }
                lookup.insert((si, ti, table.clone()), f);
                functions.push(table);
            }
        }
    }
    for f in 0..functions.len() {
        let fm = Mor(f as u32);
        let (fs, ft) = (b.dom(fm).ix(), b.cod(fm).ix());
        for g in 0..functions.len() {
            let gm = Mor(g as u32);
            if b.dom(gm).ix() != ft {
                continue;
            }
            let gt = b.cod(gm).ix();
            let table: Vec<usize> = functions[f]
                .iter()
                .map(|&y| if y == usize::MAX { usize::MAX } else { functions[g][y] })
                .collect();
            b.set_composite(gm, fm, lookup[&(fs, gt, table)]);
        }
    }
    Ok(SetCategory { cat: Arc::new(b.build()?), universe: universe.to_vec(), sets: sets.to_vec(), functions })
}

/// All subsets of `universe` and all functions between them.
pub fn finite_set_category(universe: &[String]) -> Result<SetCategory> {
    check_universe(universe)?;
    let all: Vec<u32> = (0..1u32 << universe.len()).collect();
    set_category(&format!("FinSet{}", subset_name(universe, all.len() as u32 - 1)), universe, &all)
}

/// The wide subcategory of monomorphisms.
pub fn mono_subcategory(cat: &FinCategory) -> Result<FinCategory> {
    let all: Vec<Ob> = cat.objects().collect();
    let (sub, _, _) = cat.subcategory(&format!("{}_mono", cat.name()), &all, |f| cat.is_mono(f))?;
    Ok(sub)
}

/// ι: 2^U → FinSet(U) together with both categories.
#[derive(Clone, Debug)]
pub struct Iota {
    pub powerset: Arc<FinCategory>,
    pub finset: SetCategory,
    pub functor: FunctorData,
}

/// Sends each subset to itself and each inclusion to the inclusion function.
pub fn inclusion_iota(universe: &[String]) -> Result<Iota> {
    let powerset = Arc::new(powerset_preorder(universe)?);
    let finset = finite_set_category(universe)?;
    let mut mors = Vec::with_capacity(powerset.morphism_count());
    for f in powerset.morphisms() {
        let (s, t) = (powerset.dom(f), powerset.cod(f));
        let mut table = vec![usize::MAX; universe.len()];
        for x in elements(s.0) {
            table[x] = x;
        }
        mors.push(finset.function(s, t, &table).expect("inclusion function"));
    }
    let functor = FunctorData::new("iota", powerset.clone(), finset.cat.clone(), powerset.objects().collect(), mors)?;
    Ok(Iota { powerset, finset, functor })
}

/// a → b with one non-identity arrow "u".
pub fn interval_category() -> FinCategory {
    let mut b = CategoryBuilder::new("Interval");
    let x = b.add_object("a");
    let y = b.add_object("b");
    let i = b.add_morphism("id_a", x, x);
    let j = b.add_morphism("id_b", y, y);
    b.add_morphism("u", x, y);
    b.set_identity(x, i);
    b.set_identity(y, j);
    b.build().expect("interval")
}

/// Objects `labels`, identities only.
pub fn discrete_category(name: &str, labels: &[String]) -> Result<FinCategory> {
    let mut b = CategoryBuilder::new(name);
    for l in labels {
        let x = b.add_object(l.clone());
        let i = b.add_morphism(format!("id_{l}"), x, x);
        b.set_identity(x, i);
    }
    b.build()
}

/// Splits "abc" into single characters and "x,y,z" on commas.
pub fn universe_from_arg(arg: &str) -> Vec<String> {
    let arg = arg.trim().trim_start_matches('{').trim_end_matches('}');
    if arg.contains(',') {
        arg.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    } else {
        arg.chars().map(|c| c.to_string()).collect()
    }
}

// ---------------------------------------------------------------------------
// Finite dynamical systems

/// Self-maps of a finite state set, generating a semigroup truncated at
/// words of length `truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynSystemData {
    pub omega: Vec<String>,
    /// Each generator lists the image index of every state.
    pub generators: Vec<Vec<usize>>,
    pub truncation: usize,
}

/// One element of the truncated time set: the shortest word (generator
/// indices, applied left to right) realizing `map`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeWord {
    pub word: Vec<usize>,
    pub map: Vec<usize>,
}

impl TimeWord {
    pub fn label(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|g| format!("g{g}")).collect::<Vec<_>>().join(".")
        }
    }
}

impl DynSystemData {
    pub fn new(omega: Vec<String>, generators: Vec<Vec<usize>>, truncation: usize) -> Result<DynSystemData> {
        check_universe(&omega)?;
        for (gi, g) in generators.iter().enumerate() {
            if g.len() != omega.len() {
                let point = omega.get(g.len()).cloned().unwrap_or_default();
                return Err(Error::NotTotal { generator: format!("g{gi}"), point });
            }
            if let Some(p) = g.iter().position(|&v| v >= omega.len()) {
                return Err(Error::NotTotal { generator: format!("g{gi}"), point: omega[p].clone() });
            }
        }
        if truncation == 0 && !generators.is_empty() {
            return Err(Error::ZeroTruncation);
        }
        Ok(DynSystemData { omega, generators, truncation })
    }

    /// Distinct maps realized by words of length ≤ truncation, breadth
    /// first; the empty word comes first.
    pub fn time_words(&self) -> Vec<TimeWord> {
        let id: Vec<usize> = (0..self.omega.len()).collect();
        let mut out = vec![TimeWord { word: vec![], map: id }];
        let mut frontier = vec![0usize];
        for _ in 0..self.truncation {
            let mut next = Vec::new();
            for &wi in &frontier {
                for (gi, g) in self.generators.iter().enumerate() {
                    let map: Vec<usize> = out[wi].map.iter().map(|&x| g[x]).collect();
                    if out.iter().any(|w| w.map == map) {
                        continue;
                    }
                    let mut word = out[wi].word.clone();
                    word.push(gi);
                    out.push(TimeWord { word, map });
                    next.push(out.len() - 1);
                }
            }
            frontier = next;
        }
        out
    }

    pub fn image(map: &[usize], mask: u32) -> u32 {
        map.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).fold(0, |acc, (_, &v)| acc | 1 << v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DynSystemReport {
    pub omega: Vec<String>,
    pub time: Vec<String>,
    /// action[t][S] = Dyn_{Φ^t}(S), as subset names.
    pub action: Vec<Vec<String>>,
    pub matches_direct_image: bool,
    pub action_law_pairs_checked: usize,
    pub action_laws_hold: bool,
    pub product_functor_valid: bool,
}

/// Dyn∘Φ over the truncated time set, computed with τ on Comma(ι,ι), and the
/// product form 2^Ω × T → 2^Ω. Checks Dyn_{Φ^s∘Φ^t} = Dyn_{Φ^s}∘Dyn_{Φ^t}.
pub fn dyn_system_comma(sys: &DynSystemData) -> Result<DynSystemReport> {
    use crate::constructions::comma;
    use crate::induced::InducedSetup;

    let iota = inclusion_iota(&sys.omega)?;
    let cc = Arc::new(comma(&iota.functor, &iota.functor)?);
    let full = (1u32 << sys.omega.len()) - 1;
    let words = sys.time_words();
    let fs = &iota.finset;
    let dyn_of = |map: &[usize]| -> Result<Vec<u32>> {
        let mut table = vec![usize::MAX; sys.omega.len()];
        table[..map.len()].copy_from_slice(map);
        let phi = fs.function(Ob(full), Ob(full), &table).expect("self-map present");
        let x = cc.object_of(Ob(full), Ob(full), phi).expect("comma object");
        let setup = InducedSetup::new(cc.clone(), x)?;
        let bt = setup.bar_tau_and_dyn(None)?;
        let mut by_mask = vec![0u32; full as usize + 1];
        for (f, img) in crate::induced::dyn_images(&bt).into_iter().enumerate() {
            by_mask[setup.slice_a.provenance(Ob(f as u32)).a.0 as usize] = img.0;
        }
        Ok(by_mask)
    };
    let mut action = Vec::with_capacity(words.len());
    let mut matches = true;
    for w in &words {
        let imgs = dyn_of(&w.map)?;
        for (s, &img) in imgs.iter().enumerate() {
            matches &= img == DynSystemData::image(&w.map, s as u32);
        }
        action.push(imgs);
    }
    let mut pairs = 0;
    let mut laws = true;
    for (si, s) in words.iter().enumerate() {
        for (ti, t) in words.iter().enumerate() {
            // Φ^s∘Φ^t: first t, then s.
            let comp: Vec<usize> = t.map.iter().map(|&x| s.map[x]).collect();
            let lhs = match words.iter().position(|w| w.map == comp) {
                Some(ci) => action[ci].clone(),
                None => dyn_of(&comp)?,
            };
            for sub in 0..=full {
                pairs += 1;
                laws &= lhs[sub as usize] == action[si][action[ti][sub as usize] as usize];
            }
        }
    }
    // The product functor 2^Ω × T_disc → 2^Ω.
    let labels: Vec<String> = words.iter().map(TimeWord::label).collect();
    let t_cat = discrete_category("T", &labels)?;
    let prod = Arc::new(crate::constructions::product_category(&iota.powerset, &t_cat)?);
    let product_functor_valid = product_action_functor(&iota.powerset, &prod, &action).is_ok();
    Ok(DynSystemReport {
        omega: sys.omega.clone(),
        time: labels,
        action: action
            .iter()
            .map(|row| row.iter().map(|&m| subset_name(&sys.omega, m)).collect())
            .collect(),
        matches_direct_image: matches,
        action_law_pairs_checked: pairs,
        action_laws_hold: laws,
        product_functor_valid,
    })
}

/// (S, t) ↦ action[t][S] on 2^Ω × T_disc, where object (S, t) is numbered
/// S·|T| + t as built by `product_category`.
pub fn product_action_functor(
    powerset: &Arc<FinCategory>,
    prod: &Arc<FinCategory>,
    action: &[Vec<u32>],
) -> Result<FunctorData> {
    let nt = action.len() as u32;
    let obs: Vec<Ob> = prod.objects().map(|x| Ob(action[(x.0 % nt) as usize][(x.0 / nt) as usize])).collect();
    let mut mors = Vec::with_capacity(prod.morphism_count());
    for f in prod.morphisms() {
        let (s, t) = (obs[prod.dom(f).ix()], obs[prod.cod(f).ix()]);
        let m = powerset.hom(s, t).first().copied().ok_or_else(|| Error::NotCompositionPreserving {
            g: prod.mor_name(f).to_string(),
            f: "monotonicity".to_string(),
        })?;
        mors.push(m);
    }
    FunctorData::new("PhiTilde", prod.clone(), powerset.clone(), obs, mors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> Vec<String> {
        universe_from_arg(s)
    }

    #[test]
    fn powerset_counts() {
        let p = powerset_preorder(&u("ab")).unwrap();
        assert_eq!((p.object_count(), p.morphism_count()), (4, 9));
        assert_eq!(powerset_preorder(&[]).unwrap().object_count(), 1);
        assert_eq!(p.find_initial(), Some(Ob(0)));
    }

    #[test]
    fn finset_counts() {
        let f = finite_set_category(&u("a")).unwrap();
        assert_eq!((f.cat.object_count(), f.cat.morphism_count()), (2, 3));
        let f = finite_set_category(&u("ab")).unwrap();
        assert_eq!(f.cat.hom(Ob(3), Ob(3)).len(), 4);
        assert_eq!(f.cat.find_initial(), Some(Ob(0)));
        assert_eq!(finite_set_category(&u("abc")).unwrap().cat.morphism_count(), 170);
    }

    #[test]
    fn iota_flags() {
        let i = inclusion_iota(&u("ab")).unwrap();
        let fl = i.functor.flags();
        assert!(fl.injective_on_objects);
        assert_eq!(fl.maps_initial_to_initial, Some(true));
    }

    #[test]
    fn time_words_dedup() {
        let s = DynSystemData::new(u("012"), vec![vec![1, 2, 0]], 5).unwrap();
        // Rotation of order 3: e, g0, g0.g0.
        assert_eq!(s.time_words().len(), 3);
        assert!(matches!(DynSystemData::new(u("01"), vec![vec![0]], 1), Err(Error::NotTotal { .. })));
    }
}
