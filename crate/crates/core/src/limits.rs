//! Brute-force finite limits.
//!
//! Limits are found by listing every cone and testing terminality. Small
//! finite categories rarely contain genuine products, so building limits from
//! products and equalizers would fail where cone search does not.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::category::{size_guard, CategoryBuilder, FinCategory, Mor, Ob};
use crate::error::{Error, Result};
use crate::functor::{same_category, FunctorData};
use crate::limpre::{is_limit_preserving, PreservationReport};

/// Cone lists longer than this are refused.
pub const MAX_CONES: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct Diagram {
    pub functor: FunctorData,
}

impl Diagram {
    pub fn new(functor: FunctorData) -> Result<Diagram> {
        let guard = size_guard();
        let n = functor.source().morphism_count();
        if n > guard {
            return Err(Error::SizeGuardExceeded { what: "diagram index".into(), count: n, guard });
        }
        Ok(Diagram { functor })
    }

    pub fn index(&self) -> &Arc<FinCategory> {
        self.functor.source()
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        self.functor.target()
    }

    pub fn witness(&self) -> DiagramWitness {
        DiagramWitness::of(&self.functor)
    }
}

/// Serializable description of a diagram, used as a failure witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramWitness {
    pub index: String,
    pub objects: Vec<(String, String)>,
    pub morphisms: Vec<(String, String)>,
}

impl DiagramWitness {
    pub fn of(f: &FunctorData) -> DiagramWitness {
        DiagramWitness {
            index: f.source().name().to_string(),
            objects: f.object_map_names().into_iter().collect(),
            morphisms: f.morphism_map_names().into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    pub apex: Ob,
    /// One leg per index object, apex → D(i).
    pub legs: Vec<Mor>,
}

#[derive(Clone, Debug)]
pub struct LimitResult {
    pub cone: Cone,
    pub cones_checked: usize,
    /// Apex and unique mediator for every cone, in enumeration order.
    pub transcript: Vec<(Ob, Mor)>,
    /// Other terminal cones; their mediators into `cone` are isos.
    pub ties: Vec<Cone>,
}

/// Per-index-object plan for cone search: a leg forced by an earlier leg,
/// and the commutation checks that become decidable at this object.
struct ConePlan {
    forced: Vec<Option<(Mor, usize)>>,
    checks: Vec<Vec<(Mor, usize, usize)>>,
}

impl ConePlan {
    fn new(d: &Diagram) -> ConePlan {
        let j = d.index();
        let n = j.object_count();
        let mut forced = vec![None; n];
        let mut checks = vec![Vec::new(); n];
        for u in j.morphisms() {
            if j.is_identity(u) {
                continue;
            }
            let (s, t) = (j.dom(u).ix(), j.cod(u).ix());
            let du = d.functor.mor(u);
            if s < t && forced[t].is_none() {
                forced[t] = Some((du, s));
            }
            checks[s.max(t)].push((du, s, t));
        }
        ConePlan { forced, checks }
    }
}

fn cone_search(
    c: &FinCategory,
    d: &Diagram,
    plan: &ConePlan,
    apex: Ob,
    k: usize,
    legs: &mut Vec<Mor>,
    visit: &mut dyn FnMut(&[Mor]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = plan.forced.len();
    if k == n {
        return visit(legs);
    }
    let try_leg = |legs: &mut Vec<Mor>, leg: Mor| -> bool {
        legs.push(leg);
        let ok = plan.checks[k].iter().all(|&(du, s, t)| c.compose(du, legs[s]) == legs[t]);
        if !ok {
            legs.pop();
        }
        ok
    };
    match plan.forced[k] {
        Some((du, s)) => {
            let leg = c.compose(du, legs[s]);
            if try_leg(legs, leg) {
                cone_search(c, d, plan, apex, k + 1, legs, visit)?;
                legs.pop();
            }
        }
        None => {
            let target = d.functor.ob(Ob(k as u32));
            for &leg in c.hom(apex, target) {
                if try_leg(legs, leg) {
                    cone_search(c, d, plan, apex, k + 1, legs, visit)?;
                    legs.pop();
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Calls `visit` on every cone, apexes in object order.
pub fn for_each_cone(d: &Diagram, mut visit: impl FnMut(Ob, &[Mor]) -> ControlFlow<()>) {
    let c = d.target().clone();
    let plan = ConePlan::new(d);
    let mut legs = Vec::with_capacity(plan.forced.len());
    for apex in c.objects() {
        let flow = cone_search(&c, d, &plan, apex, 0, &mut legs, &mut |l| visit(apex, l));
        if flow.is_break() {
            return;
        }
    }
}

/// All cones over `d`, deterministic order.
pub fn enumerate_cones(d: &Diagram) -> Result<Vec<Cone>> {
    let mut cones = Vec::new();
    let mut overflow = false;
    for_each_cone(d, |apex, legs| {
        if cones.len() >= MAX_CONES {
            overflow = true;
            return ControlFlow::Break(());
        }
        cones.push(Cone { apex, legs: legs.to_vec() });
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(Error::SizeGuardExceeded { what: "cone list".into(), count: MAX_CONES + 1, guard: MAX_CONES });
    }
    Ok(cones)
}

/// Morphisms m: from.apex → to.apex with to.legs[i]∘m = from.legs[i] for all i.
pub fn mediators<'a>(c: &'a FinCategory, from: &'a Cone, to: &'a Cone) -> impl Iterator<Item = Mor> + 'a {
    c.hom(from.apex, to.apex)
        .iter()
        .copied()
        .filter(move |&m| to.legs.iter().zip(&from.legs).all(|(&l, &k)| c.compose(l, m) == k))
}

/// Exactly one mediator, or `None`.
pub fn unique_mediator(c: &FinCategory, from: &Cone, to: &Cone) -> Option<Mor> {
    let mut it = mediators(c, from, to);
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

/// The terminal cone over `d`, first in enumeration order, or `None`.
pub fn limit(d: &Diagram) -> Result<Option<LimitResult>> {
    let cones = enumerate_cones(d)?;
    Ok(limit_from_cones(d.target(), cones))
}

fn limit_from_cones(c: &FinCategory, cones: Vec<Cone>) -> Option<LimitResult> {
    // Cones that refuted earlier candidates are tried first against later ones.
    let mut refuters: Vec<usize> = Vec::new();
    let mut found = None;
    'candidates: for (ci, cand) in cones.iter().enumerate() {
        for r in 0..refuters.len() {
            let k = refuters[r];
            if unique_mediator(c, &cones[k], cand).is_none() {
                refuters[..=r].rotate_right(1);
                continue 'candidates;
            }
        }
        for (ki, k) in cones.iter().enumerate() {
            if unique_mediator(c, k, cand).is_none() {
                refuters.insert(0, ki);
                continue 'candidates;
            }
        }
        found = Some(ci);
        break;
    }
    let li = found?;
    let cone = cones[li].clone();
    let mut transcript = Vec::with_capacity(cones.len());
    let mut ties = Vec::new();
    for (ki, k) in cones.iter().enumerate() {
        let m = unique_mediator(c, k, &cone).expect("terminal cone");
        if ki != li && c.is_iso(m) {
            ties.push(k.clone());
        }
        transcript.push((k.apex, m));
    }
    Some(LimitResult { cone, cones_checked: cones.len(), transcript, ties })
}

/// Whether `cone` is terminal among cones over `d`.
pub fn is_limit_cone(d: &Diagram, cone: &Cone) -> Result<bool> {
    let c = d.target().clone();
    let mut ok = true;
    for_each_cone(d, |apex, legs| {
        let k = Cone { apex, legs: legs.to_vec() };
        if unique_mediator(&c, &k, cone).is_none() {
            ok = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(ok)
}

/// The colimit, computed as a limit in the opposite category. Legs of the
/// returned cone run D(i) → apex in the original category.
pub fn colimit(d: &Diagram) -> Result<Option<LimitResult>> {
    let op = Diagram::new(d.functor.opposite())?;
    limit(&op)
}

/// Image of a cone under a functor.
pub fn map_cone(h: &FunctorData, cone: &Cone) -> Cone {
    Cone { apex: h.ob(cone.apex), legs: cone.legs.iter().map(|&l| h.mor(l)).collect() }
}

/// The parallel pair s ⇉ t with arrows "f" and "g".
pub fn parallel_pair() -> FinCategory {
    let mut b = CategoryBuilder::new("ParallelPair");
    let s = b.add_object("s");
    let t = b.add_object("t");
    let is = b.add_morphism("id_s", s, s);
    let it = b.add_morphism("id_t", t, t);
    b.add_morphism("f", s, t);
    b.add_morphism("g", s, t);
    b.set_identity(s, is);
    b.set_identity(t, it);
    b.build().expect("parallel pair")
}

/// The cospan x → z ← y with arrows "f" and "g".
pub fn cospan() -> FinCategory {
    let mut b = CategoryBuilder::new("Cospan");
    let x = b.add_object("x");
    let y = b.add_object("y");
    let z = b.add_object("z");
    for (o, n) in [(x, "id_x"), (y, "id_y"), (z, "id_z")] {
        let i = b.add_morphism(n, o, o);
        b.set_identity(o, i);
    }
    b.add_morphism("f", x, z);
    b.add_morphism("g", y, z);
    b.build().expect("cospan")
}

#[derive(Clone, Debug)]
pub struct EqualizerResult {
    pub limit: LimitResult,
    /// The equalizing morphism apex → dom f.
    pub leg: Mor,
    pub leg_is_mono: bool,
}

pub fn equalizer(cat: &Arc<FinCategory>, f: Mor, g: Mor) -> Result<Option<EqualizerResult>> {
    if cat.dom(f) != cat.dom(g) || cat.cod(f) != cat.cod(g) {
        return Err(Error::NotParallel { f: cat.mor_name(f).to_string(), g: cat.mor_name(g).to_string() });
    }
    let j = Arc::new(parallel_pair());
    let functor = FunctorData::new(
        format!("pair({},{})", cat.mor_name(f), cat.mor_name(g)),
        j,
        cat.clone(),
        vec![cat.dom(f), cat.cod(f)],
        vec![cat.id(cat.dom(f)), cat.id(cat.cod(f)), f, g],
    )?;
    let d = Diagram::new(functor)?;
    Ok(limit(&d)?.map(|limit| {
        let leg = limit.cone.legs[0];
        EqualizerResult { leg_is_mono: cat.is_mono(leg), leg, limit }
    }))
}

/// Pullback of f: x → z ← y: g. Legs are indexed x, y, z.
pub fn pullback(cat: &Arc<FinCategory>, f: Mor, g: Mor) -> Result<Option<LimitResult>> {
    if cat.cod(f) != cat.cod(g) {
        return Err(Error::TargetMismatch { left: cat.mor_name(f).to_string(), right: cat.mor_name(g).to_string() });
    }
    let j = Arc::new(cospan());
    let (x, y, z) = (cat.dom(f), cat.dom(g), cat.cod(f));
    let functor = FunctorData::new(
        format!("cospan({},{})", cat.mor_name(f), cat.mor_name(g)),
        j,
        cat.clone(),
        vec![x, y, z],
        vec![cat.id(x), cat.id(y), cat.id(z), f, g],
    )?;
    limit(&Diagram::new(functor)?)
}

// ---------------------------------------------------------------------------
// Small index categories

/// Endpoints of extra (non-identity) morphisms plus the composition of every
/// composable pair, with identities 0..n and extras n..n+e.
#[derive(Clone)]
struct RawSmall {
    n: usize,
    ends: Vec<(usize, usize)>,
}

impl RawSmall {
    fn m(&self) -> usize {
        self.n + self.ends.len()
    }
    fn dom(&self, f: usize) -> usize {
        if f < self.n { f } else { self.ends[f - self.n].0 }
    }
    fn cod(&self, f: usize) -> usize {
        if f < self.n { f } else { self.ends[f - self.n].1 }
    }
    fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.m()).filter(|&f| self.dom(f) == x && self.cod(f) == y).collect()
    }
}

/// Composition tables over `raw`, associativity pruned during search.
fn small_tables(raw: &RawSmall, out: &mut Vec<HashMap<(usize, usize), usize>>) {
    let n = raw.n;
    let m = raw.m();
    let pairs: Vec<(usize, usize)> = (n..m)
        .flat_map(|g| (n..m).map(move |f| (g, f)))
        .filter(|&(g, f)| raw.cod(f) == raw.dom(g))
        .collect();
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for f in 0..m {
        table.insert((raw.cod(f), f), f);
        table.insert((f, raw.dom(f)), f);
    }
    fn assoc_ok(raw: &RawSmall, table: &HashMap<(usize, usize), usize>) -> bool {
        let m = raw.m();
        for f in 0..m {
            for g in 0..m {
                if raw.cod(f) != raw.dom(g) {
                    continue;
                }
                let Some(&gf) = table.get(&(g, f)) else { continue };
                for h in 0..m {
                    if raw.cod(g) != raw.dom(h) {
                        continue;
                    }
                    let (Some(&hg), Some(&h_gf)) = (table.get(&(h, g)), table.get(&(h, gf))) else { continue };
                    let Some(&hg_f) = table.get(&(hg, f)) else { continue };
                    if h_gf != hg_f {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn go(
        raw: &RawSmall,
        pairs: &[(usize, usize)],
        k: usize,
        table: &mut HashMap<(usize, usize), usize>,
        out: &mut Vec<HashMap<(usize, usize), usize>>,
    ) {
        if k == pairs.len() {
            out.push(table.clone());
            return;
        }
        let (g, f) = pairs[k];
        for h in raw.hom(raw.dom(f), raw.cod(g)) {
            table.insert((g, f), h);
            if assoc_ok(raw, table) {
                go(raw, pairs, k + 1, table, out);
            }
            table.remove(&(g, f));
        }
    }
    go(raw, &pairs, 0, &mut table, out);
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

type SmallKey = (usize, Vec<(usize, usize)>, Vec<((usize, usize), usize)>);

fn canonical_key(raw: &RawSmall, table: &HashMap<(usize, usize), usize>) -> SmallKey {
    let n = raw.n;
    let e = raw.ends.len();
    let mut best: Option<SmallKey> = None;
    for po in permutations(n) {
        for pm in permutations(e) {
            // Morphism relabelling: identities follow objects, extras follow pm.
            let mor = |f: usize| if f < n { po[f] } else { n + pm[f - n] };
            let mut ends = vec![(0, 0); e];
            for (i, &(s, t)) in raw.ends.iter().enumerate() {
                ends[pm[i]] = (po[s], po[t]);
            }
            let mut comp: Vec<((usize, usize), usize)> =
                table.iter().map(|(&(g, f), &h)| ((mor(g), mor(f)), mor(h))).collect();
            comp.sort();
            let key = (n, ends, comp);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("at least one permutation")
}

fn build_small(raw: &RawSmall, table: &HashMap<(usize, usize), usize>, name: String) -> FinCategory {
    let mut b = CategoryBuilder::new(name);
    let obs: Vec<Ob> = (0..raw.n).map(|i| b.add_object(format!("j{i}"))).collect();
    let mut mors = Vec::new();
    for i in 0..raw.n {
        let f = b.add_morphism(format!("id_j{i}"), obs[i], obs[i]);
        b.set_identity(obs[i], f);
        mors.push(f);
    }
    for (k, &(s, t)) in raw.ends.iter().enumerate() {
        mors.push(b.add_morphism(format!("m{k}"), obs[s], obs[t]));
    }
    for (&(g, f), &h) in table {
        b.set_composite(mors[g], mors[f], mors[h]);
    }
    b.build().expect("enumerated index category is valid")
}

fn multisets(universe: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for x in start..universe {
        cur.push(x);
        multisets(universe, k, x, cur, out);
        cur.pop();
    }
}

/// Every finite category with objects + morphisms ≤ `max_size`, one per
/// isomorphism class, ordered by size.
pub fn small_categories(max_size: usize) -> Vec<Arc<FinCategory>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<Arc<FinCategory>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache").get(&max_size) {
        return v.clone();
    }
    let mut found: Vec<(usize, SmallKey, FinCategory)> = Vec::new();
    let mut seen: HashSet<SmallKey> = HashSet::new();
    for n in 0..=max_size / 2 {
        for e in 0..=(max_size - 2 * n) {
            if n == 0 && e > 0 {
                continue;
            }
            let mut shapes = Vec::new();
            multisets(n * n, e, 0, &mut Vec::new(), &mut shapes);
            for shape in shapes {
                let raw = RawSmall { n, ends: shape.iter().map(|&p| (p / n, p % n)).collect() };
                let mut tables = Vec::new();
                small_tables(&raw, &mut tables);
                for t in tables {
                    let key = canonical_key(&raw, &t);
                    if seen.insert(key.clone()) {
                        let cat = build_small(&raw, &t, String::new());
                        found.push((2 * n + e, key, cat));
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let cats: Vec<Arc<FinCategory>> = found
        .into_iter()
        .enumerate()
        .map(|(i, (size, _, c))| Arc::new(c.with_name(format!("J{size}.{i}"))))
        .collect();
    cache.lock().expect("cache").insert(max_size, cats.clone());
    cats
}

/// Calls `visit` on every functor j → c.
pub fn for_each_functor(
    j: &Arc<FinCategory>,
    c: &Arc<FinCategory>,
    mut visit: impl FnMut(FunctorData) -> ControlFlow<()>,
) {
    let n = j.object_count();
    let extras: Vec<Mor> = j.morphisms().filter(|&f| !j.is_identity(f)).collect();
    let mut obs = vec![Ob(0); n];
    let mut mors = vec![Mor(0); j.morphism_count()];

    fn assign_objects(
        j: &Arc<FinCategory>,
        c: &Arc<FinCategory>,
        extras: &[Mor],
        k: usize,
        obs: &mut Vec<Ob>,
        mors: &mut Vec<Mor>,
        visit: &mut dyn FnMut(FunctorData) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if k == obs.len() {
            for x in j.objects() {
                mors[j.id(x).ix()] = c.id(obs[x.ix()]);
            }
            return assign_morphisms(j, c, extras, 0, obs, mors, visit);
        }
        for y in c.objects() {
            obs[k] = y;
            assign_objects(j, c, extras, k + 1, obs, mors, visit)?;
        }
        ControlFlow::Continue(())
    }

    fn consistent(j: &FinCategory, c: &FinCategory, extras: &[Mor], upto: usize, mors: &[Mor]) -> bool {
        let assigned = |f: Mor| j.is_identity(f) || extras[..upto].contains(&f);
        for &g in &extras[..upto] {
            for &f in &extras[..upto] {
                if j.cod(f) != j.dom(g) {
                    continue;
                }
                let h = j.compose(g, f);
                if assigned(h) && mors[h.ix()] != c.compose(mors[g.ix()], mors[f.ix()]) {
                    return false;
                }
            }
        }
        true
    }

    fn assign_morphisms(
        j: &Arc<FinCategory>,
        c: &Arc<FinCategory>,
        extras: &[Mor],
        k: usize,
        obs: &mut Vec<Ob>,
        mors: &mut Vec<Mor>,
        visit: &mut dyn FnMut(FunctorData) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if k == extras.len() {
            let f = FunctorData::trusted(
                format!("D:{}", j.name()),
                j.clone(),
                c.clone(),
                obs.clone(),
                mors.clone(),
            );
            return visit(f);
        }
        let u = extras[k];
        let (s, t) = (obs[j.dom(u).ix()], obs[j.cod(u).ix()]);
        for &m in c.hom(s, t) {
            mors[u.ix()] = m;
            if consistent(j, c, extras, k + 1, mors) {
                assign_morphisms(j, c, extras, k + 1, obs, mors, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    let _ = assign_objects(j, c, &extras, 0, &mut obs, &mut mors, &mut visit);
}

/// Every functor j → c, in deterministic order.
pub fn enumerate_functors(j: &Arc<FinCategory>, c: &Arc<FinCategory>) -> Vec<FunctorData> {
    let mut out = Vec::new();
    for_each_functor(j, c, |f| {
        out.push(f);
        ControlFlow::Continue(())
    });
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub category: String,
    pub max_index_size: usize,
    pub index_categories: usize,
    pub diagrams_checked: usize,
    /// "complete up to size k" when true.
    pub complete: bool,
    pub witness: Option<DiagramWitness>,
}

/// Checks that every diagram from an index category of size ≤ `max_index_size`
/// has a limit. Stops at the first diagram without one.
pub fn probe_completeness(cat: &Arc<FinCategory>, max_index_size: usize) -> Result<CompletenessReport> {
    let indices = small_categories(max_index_size);
    let mut diagrams_checked = 0;
    let mut witness = None;
    let mut err = None;
    for j in &indices {
        for_each_functor(j, cat, |f| {
            diagrams_checked += 1;
            let d = Diagram { functor: f };
            match limit(&d) {
                Ok(Some(_)) => ControlFlow::Continue(()),
                Ok(None) => {
                    witness = Some(d.witness());
                    ControlFlow::Break(())
                }
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if witness.is_some() {
            break;
        }
    }
    Ok(CompletenessReport {
        category: cat.name().to_string(),
        max_index_size,
        index_categories: indices.len(),
        diagrams_checked,
        complete: witness.is_none(),
        witness,
    })
}

// ---------------------------------------------------------------------------
// Adjunctions

#[derive(Clone, Debug, Serialize)]
pub struct AdjunctionReport {
    pub left: String,
    pub right: String,
    /// (p, η_p) for every object p of the source of L.
    pub unit: Vec<(String, String)>,
    /// (q, ε_q) for every object q of the source of R.
    pub counit: Vec<(String, String)>,
    pub hom_pairs_checked: usize,
    pub triangles_hold: bool,
    pub rapl: Option<PreservationReport>,
}

/// Verifies L ⊣ R for L: P → Q and R: Q → P by constructing universal
/// units, deriving counits, and checking naturality and both triangle
/// identities. With `probe`, also checks that R preserves every probed limit.
pub fn verify_adjunction(l: &FunctorData, r: &FunctorData, probe: Option<usize>) -> Result<AdjunctionReport> {
    let (p, q) = (l.source().clone(), l.target().clone());
    if !same_category(r.source(), &q) {
        return Err(Error::SourceMismatch { left: l.target().name().to_string(), right: r.source().name().to_string() });
    }
    if !same_category(r.target(), &p) {
        return Err(Error::TargetMismatch { left: l.source().name().to_string(), right: r.target().name().to_string() });
    }
    let not_adjoint = |detail: String, po: Ob, qo: Option<Ob>| Error::NotAdjoint {
        detail,
        left_object: p.ob_name(po).to_string(),
        right_object: qo.map(|x| q.ob_name(x).to_string()).unwrap_or_default(),
    };
    let mut hom_pairs_checked = 0;
    let mut unit = Vec::with_capacity(p.object_count());
    for x in p.objects() {
        let lx = l.ob(x);
        for y in q.objects() {
            let (a, b) = (q.hom(lx, y).len(), p.hom(x, r.ob(y)).len());
            if a != b {
                return Err(not_adjoint(format!("|Hom(Lp,q)| = {a} but |Hom(p,Rq)| = {b}"), x, Some(y)));
            }
        }
        let universal = p.hom(x, r.ob(lx)).iter().copied().find(|&eta| {
            q.objects().all(|y| {
                let images: HashSet<Mor> = q.hom(lx, y).iter().map(|&g| p.compose(r.mor(g), eta)).collect();
                images.len() == q.hom(lx, y).len()
            })
        });
        match universal {
            Some(eta) => unit.push(eta),
            None => return Err(not_adjoint("no universal arrow p → RLp".into(), x, None)),
        }
        hom_pairs_checked += q.object_count();
    }
    for h in p.morphisms() {
        let (x, x2) = (p.dom(h), p.cod(h));
        if p.compose(r.mor(l.mor(h)), unit[x.ix()]) != p.compose(unit[x2.ix()], h) {
            return Err(not_adjoint(format!("unit is not natural at {}", p.mor_name(h)), x, None));
        }
    }
    let mut counit = Vec::with_capacity(q.object_count());
    for y in q.objects() {
        let ry = r.ob(y);
        let eps = q
            .hom(l.ob(ry), y)
            .iter()
            .copied()
            .find(|&g| p.compose(r.mor(g), unit[ry.ix()]) == p.id(ry))
            .ok_or_else(|| not_adjoint("no counit component".into(), ry, Some(y)))?;
        counit.push(eps);
    }
    for k in q.morphisms() {
        let (y, y2) = (q.dom(k), q.cod(k));
        if q.compose(k, counit[y.ix()]) != q.compose(counit[y2.ix()], l.mor(r.mor(k))) {
            return Err(not_adjoint(format!("counit is not natural at {}", q.mor_name(k)), r.ob(y), Some(y)));
        }
    }
    for x in p.objects() {
        if q.compose(counit[l.ob(x).ix()], l.mor(unit[x.ix()])) != q.id(l.ob(x)) {
            return Err(not_adjoint("triangle εL∘Lη = id fails".into(), x, Some(l.ob(x))));
        }
    }
    for y in q.objects() {
        if p.compose(r.mor(counit[y.ix()]), unit[r.ob(y).ix()]) != p.id(r.ob(y)) {
            return Err(not_adjoint("triangle Rε∘ηR = id fails".into(), r.ob(y), Some(y)));
        }
    }
    let rapl = match probe {
        Some(k) => Some(is_limit_preserving(r, k)?),
        None => None,
    };
    Ok(AdjunctionReport {
        left: l.name().to_string(),
        right: r.name().to_string(),
        unit: p.objects().map(|x| (p.ob_name(x).to_string(), p.mor_name(unit[x.ix()]).to_string())).collect(),
        counit: q.objects().map(|y| (q.ob_name(y).to_string(), q.mor_name(counit[y.ix()]).to_string())).collect(),
        hom_pairs_checked,
        triangles_hold: true,
        rapl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> Arc<FinCategory> {
        let mut b = CategoryBuilder::new("I");
        let x = b.add_object("a");
        let y = b.add_object("b");
        let i = b.add_morphism("id_a", x, x);
        let j = b.add_morphism("id_b", y, y);
        b.add_morphism("u", x, y);
        b.set_identity(x, i);
        b.set_identity(y, j);
        Arc::new(b.build().unwrap())
    }

    fn discrete2() -> Arc<FinCategory> {
        let mut b = CategoryBuilder::new("D2");
        for n in ["x", "y"] {
            let o = b.add_object(n);
            let i = b.add_morphism(format!("id_{n}"), o, o);
            b.set_identity(o, i);
        }
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn small_category_counts() {
        // Sizes: 0 → empty; 2 → point; 3 → two monoids of order 2;
        // 4 → discrete pair, seven monoids of order 3.
        let by_size = |k: usize| small_categories(k).len();
        assert_eq!(by_size(0), 1);
        assert_eq!(by_size(2), 2);
        assert_eq!(by_size(3), 4);
        assert_eq!(by_size(4), 4 + 1 + 7);
    }

    #[test]
    fn interval_complete_discrete_not() {
        let r = probe_completeness(&interval(), 4).unwrap();
        assert!(r.complete, "{r:?}");
        let r = probe_completeness(&discrete2(), 4).unwrap();
        assert!(!r.complete);
        assert_eq!(r.witness.unwrap().objects.len(), 0);
    }

    #[test]
    fn identity_adjunction() {
        let i = interval();
        let id = FunctorData::identity(&i);
        let rep = verify_adjunction(&id, &id, Some(3)).unwrap();
        assert!(rep.triangles_hold);
        assert!(rep.rapl.unwrap().preserving);
    }

    #[test]
    fn functor_enumeration_counts() {
        let i = interval();
        // Functors I → I are monotone maps of a 2-chain: 3.
        assert_eq!(enumerate_functors(&i, &i).len(), 3);
        let pair = Arc::new(parallel_pair());
        // Pairs of parallel arrows in I: (a,a), (b,b), (a,b) with u twice.
        assert_eq!(enumerate_functors(&pair, &i).len(), 3);
    }
}
