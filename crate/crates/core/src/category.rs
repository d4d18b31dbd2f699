//! Explicit finite categories.
//!
//! A [`FinCategory`] stores its composition as a total table over composable
//! pairs, so every law check and every downstream search is lookup only.
//! Objects and morphisms are addressed by dense indices ([`Ob`], [`Mor`]);
//! text identifiers are kept for files and reports.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_SIZE_GUARD: usize = 20_000;

static SIZE_GUARD: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_GUARD);

/// Maximum morphism count accepted by [`CategoryBuilder::build`].
pub fn size_guard() -> usize {
    SIZE_GUARD.load(Ordering::Relaxed)
}

pub fn set_size_guard(limit: usize) {
    SIZE_GUARD.store(limit, Ordering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ob(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mor(pub u32);

impl Ob {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

impl Mor {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismRecord {
    pub id: String,
    pub dom: Ob,
    pub cod: Ob,
}

#[derive(Clone, Debug)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    object_ix: HashMap<String, Ob>,
    morphisms: Vec<MorphismRecord>,
    morphism_ix: HashMap<String, Mor>,
    identity: Vec<Mor>,
    outgoing: Vec<Vec<Mor>>,
    incoming: Vec<Vec<Mor>>,
    /// Position of each morphism inside `incoming[cod]`.
    in_pos: Vec<u32>,
    hom: HashMap<(Ob, Ob), Vec<Mor>>,
    /// `table[g][in_pos[f]] = g∘f` for every f with cod f = dom g.
    table: Vec<Vec<Mor>>,
}

/// Structural equality: same ids in the same order, same endpoints,
/// identities and composition. The name is ignored.
impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identity == other.identity
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

impl fmt::Display for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} objects, {} morphisms)",
            self.name,
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

impl FinCategory {
    /// The category with one object and only its identity.
    pub fn point() -> FinCategory {
        let mut b = CategoryBuilder::new("*");
        let x = b.add_object("*");
        let id = b.add_morphism("id_*", x, x);
        b.set_identity(x, id);
        b.build().expect("point category")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Ob> + '_ {
        (0..self.objects.len() as u32).map(Ob)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = Mor> + '_ {
        (0..self.morphisms.len() as u32).map(Mor)
    }

    pub fn ob_name(&self, x: Ob) -> &str {
        &self.objects[x.ix()]
    }

    pub fn mor_name(&self, f: Mor) -> &str {
        &self.morphisms[f.ix()].id
    }

    pub fn object_ids(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_records(&self) -> &[MorphismRecord] {
        &self.morphisms
    }

    pub fn ob(&self, id: &str) -> Result<Ob> {
        self.object_ix
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownObject { id: id.to_string() })
    }

    pub fn mor(&self, id: &str) -> Result<Mor> {
        self.morphism_ix
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism { id: id.to_string() })
    }

    #[inline]
    pub fn dom(&self, f: Mor) -> Ob {
        self.morphisms[f.ix()].dom
    }

    #[inline]
    pub fn cod(&self, f: Mor) -> Ob {
        self.morphisms[f.ix()].cod
    }

    #[inline]
    pub fn id(&self, x: Ob) -> Mor {
        self.identity[x.ix()]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identity[self.dom(f).ix()] == f
    }

    pub fn hom(&self, x: Ob, y: Ob) -> &[Mor] {
        self.hom.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outgoing(&self, x: Ob) -> &[Mor] {
        &self.outgoing[x.ix()]
    }

    pub fn incoming(&self, x: Ob) -> &[Mor] {
        &self.incoming[x.ix()]
    }

    /// `g∘f`. Panics when cod f ≠ dom g.
    #[inline]
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        assert_eq!(self.cod(f), self.dom(g), "compose: not composable");
        self.table[g.ix()][self.in_pos[f.ix()] as usize]
    }

    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        (self.cod(f) == self.dom(g)).then(|| self.table[g.ix()][self.in_pos[f.ix()] as usize])
    }

    /// Composite of a path listed in diagrammatic order (first arrow first).
    pub fn compose_path(&self, path: &[Mor]) -> Option<Mor> {
        let (&first, rest) = path.split_first()?;
        rest.iter().try_fold(first, |acc, &g| self.try_compose(g, acc))
    }

    pub fn is_thin(&self) -> bool {
        self.hom.values().all(|h| h.len() <= 1)
    }

    pub fn is_mono(&self, f: Mor) -> bool {
        self.mono_witness(f).is_none()
    }

    /// Two distinct g, g' with f∘g = f∘g', if any.
    pub fn mono_witness(&self, f: Mor) -> Option<(Mor, Mor)> {
        let d = self.dom(f);
        for x in self.objects() {
            let mut seen: HashMap<Mor, Mor> = HashMap::new();
            for &g in self.hom(x, d) {
                if let Some(other) = seen.insert(self.compose(f, g), g) {
                    return Some((other, g));
                }
            }
        }
        None
    }

    pub fn is_epi(&self, f: Mor) -> bool {
        self.epi_witness(f).is_none()
    }

    /// Two distinct g, g' with g∘f = g'∘f, if any.
    pub fn epi_witness(&self, f: Mor) -> Option<(Mor, Mor)> {
        let c = self.cod(f);
        for y in self.objects() {
            let mut seen: HashMap<Mor, Mor> = HashMap::new();
            for &g in self.hom(c, y) {
                if let Some(other) = seen.insert(self.compose(g, f), g) {
                    return Some((other, g));
                }
            }
        }
        None
    }

    pub fn inverse(&self, f: Mor) -> Option<Mor> {
        let (d, c) = (self.dom(f), self.cod(f));
        self.hom(c, d)
            .iter()
            .copied()
            .find(|&g| self.compose(g, f) == self.id(d) && self.compose(f, g) == self.id(c))
    }

    pub fn is_iso(&self, f: Mor) -> bool {
        self.inverse(f).is_some()
    }

    /// A morphism that is mono and epi but not iso, if any.
    pub fn balanced_witness(&self) -> Option<Mor> {
        self.morphisms()
            .find(|&f| self.is_mono(f) && self.is_epi(f) && !self.is_iso(f))
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced_witness().is_none()
    }

    /// First object (in order) with exactly one morphism to every object.
    pub fn find_initial(&self) -> Option<Ob> {
        self.objects()
            .find(|&x| self.objects().all(|y| self.hom(x, y).len() == 1))
    }

    /// First object (in order) with exactly one morphism from every object.
    pub fn find_terminal(&self) -> Option<Ob> {
        self.objects()
            .find(|&y| self.objects().all(|x| self.hom(x, y).len() == 1))
    }

    /// Same ids, reversed arrows. Indices are preserved.
    pub fn opposite(&self) -> FinCategory {
        let n = self.objects.len();
        let morphisms: Vec<MorphismRecord> = self
            .morphisms
            .iter()
            .map(|m| MorphismRecord { id: m.id.clone(), dom: m.cod, cod: m.dom })
            .collect();
        let (outgoing, incoming, in_pos, hom) = adjacency(n, &morphisms);
        let mut table = Vec::with_capacity(morphisms.len());
        for g in self.morphisms() {
            // op: g∘f with cod_op f = dom_op g, i.e. dom f = cod g here.
            let row = incoming[morphisms[g.ix()].dom.ix()]
                .iter()
                .map(|&f| self.compose(f, g))
                .collect();
            table.push(row);
        }
        FinCategory {
            name: format!("{}^op", self.name),
            objects: self.objects.clone(),
            object_ix: self.object_ix.clone(),
            morphisms,
            morphism_ix: self.morphism_ix.clone(),
            identity: self.identity.clone(),
            outgoing,
            incoming,
            in_pos,
            hom,
            table,
        }
    }

    /// The subcategory on the given morphisms (and all objects they touch,
    /// plus `objects`). Fails unless the selection is closed.
    pub fn subcategory(
        &self,
        name: &str,
        objects: &[Ob],
        keep: impl Fn(Mor) -> bool,
    ) -> Result<(FinCategory, Vec<Ob>, Vec<Mor>)> {
        let mut b = CategoryBuilder::new(name);
        let mut ob_map = vec![None; self.object_count()];
        for &x in objects {
            if ob_map[x.ix()].is_none() {
                ob_map[x.ix()] = Some(b.add_object(self.ob_name(x)));
            }
        }
        let mut mor_map = vec![None; self.morphism_count()];
        let mut kept_mors = Vec::new();
        for f in self.morphisms() {
            let (d, c) = (self.dom(f), self.cod(f));
            if ob_map[d.ix()].is_none() || ob_map[c.ix()].is_none() || !keep(f) {
                continue;
            }
            let nf = b.add_morphism(self.mor_name(f), ob_map[d.ix()].unwrap(), ob_map[c.ix()].unwrap());
            mor_map[f.ix()] = Some(nf);
            kept_mors.push(f);
        }
        for &x in objects {
            let nx = ob_map[x.ix()].unwrap();
            match mor_map[self.id(x).ix()] {
                Some(i) => b.set_identity(nx, i),
                None => {
                    return Err(Error::MissingIdentity { object: self.ob_name(x).to_string() })
                }
            }
        }
        for &f in &kept_mors {
            for &g in self.outgoing(self.cod(f)) {
                if let Some(ng) = mor_map[g.ix()] {
                    let h = self.compose(g, f);
                    match mor_map[h.ix()] {
                        Some(nh) => b.set_composite(ng, mor_map[f.ix()].unwrap(), nh),
                        None => {
                            return Err(Error::MissingComposite {
                                g: self.mor_name(g).to_string(),
                                f: self.mor_name(f).to_string(),
                            })
                        }
                    }
                }
            }
        }
        let cat = b.build()?;
        let mut kept_obs: Vec<Ob> = Vec::new();
        let mut seen = vec![false; self.object_count()];
        for &x in objects {
            if !seen[x.ix()] {
                seen[x.ix()] = true;
                kept_obs.push(x);
            }
        }
        Ok((cat, kept_obs, kept_mors))
    }

    /// Full subcategory on `objects`, in the given order.
    pub fn full_subcategory(&self, name: &str, objects: &[Ob]) -> Result<(FinCategory, Vec<Ob>, Vec<Mor>)> {
        let mut inside = vec![false; self.object_count()];
        for &x in objects {
            inside[x.ix()] = true;
        }
        self.subcategory(name, objects, |f| inside[self.dom(f).ix()] && inside[self.cod(f).ix()])
    }

    /// All composable pairs (g, f), i.e. cod f = dom g.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (Mor, Mor)> + '_ {
        self.morphisms()
            .flat_map(move |f| self.outgoing(self.cod(f)).iter().map(move |&g| (g, f)))
    }
}

type Adjacency = (Vec<Vec<Mor>>, Vec<Vec<Mor>>, Vec<u32>, HashMap<(Ob, Ob), Vec<Mor>>);

fn adjacency(n: usize, morphisms: &[MorphismRecord]) -> Adjacency {
    let mut outgoing = vec![Vec::new(); n];
    let mut incoming: Vec<Vec<Mor>> = vec![Vec::new(); n];
    let mut in_pos = Vec::with_capacity(morphisms.len());
    let mut hom: HashMap<(Ob, Ob), Vec<Mor>> = HashMap::new();
    for (i, m) in morphisms.iter().enumerate() {
        let f = Mor(i as u32);
        outgoing[m.dom.ix()].push(f);
        in_pos.push(incoming[m.cod.ix()].len() as u32);
        incoming[m.cod.ix()].push(f);
        hom.entry((m.dom, m.cod)).or_default().push(f);
    }
    (outgoing, incoming, in_pos, hom)
}

/// Incremental constructor; all laws are checked in [`CategoryBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    name: String,
    objects: Vec<String>,
    object_ix: HashMap<String, Ob>,
    morphisms: Vec<MorphismRecord>,
    morphism_ix: HashMap<String, Mor>,
    identity: Vec<Option<Mor>>,
    composites: HashMap<(Mor, Mor), Mor>,
    first_error: Option<Error>,
}

impl CategoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryBuilder { name: name.into(), ..Default::default() }
    }

    fn note(&mut self, e: Error) {
        if self.first_error.is_none() {
            self.first_error = Some(e);
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    /// Adds an object. A duplicate id is recorded and reported by `build`.
    pub fn add_object(&mut self, id: impl Into<String>) -> Ob {
        let id = id.into();
        let x = Ob(self.objects.len() as u32);
        if self.object_ix.insert(id.clone(), x).is_some() {
            self.note(Error::DuplicateId { id: id.clone() });
        }
        self.objects.push(id);
        self.identity.push(None);
        x
    }

    pub fn add_morphism(&mut self, id: impl Into<String>, dom: Ob, cod: Ob) -> Mor {
        let id = id.into();
        let f = Mor(self.morphisms.len() as u32);
        if self.morphism_ix.insert(id.clone(), f).is_some() {
            self.note(Error::DuplicateId { id: id.clone() });
        }
        self.morphisms.push(MorphismRecord { id, dom, cod });
        f
    }

    pub fn set_identity(&mut self, x: Ob, f: Mor) {
        self.identity[x.ix()] = Some(f);
    }

    /// Records `g∘f = h`.
    pub fn set_composite(&mut self, g: Mor, f: Mor, h: Mor) {
        self.composites.insert((g, f), h);
    }

    pub fn object_by_id(&self, id: &str) -> Result<Ob> {
        self.object_ix
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownObject { id: id.to_string() })
    }

    pub fn morphism_by_id(&self, id: &str) -> Result<Mor> {
        self.morphism_ix
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism { id: id.to_string() })
    }

    pub fn dom(&self, f: Mor) -> Ob {
        self.morphisms[f.ix()].dom
    }

    pub fn cod(&self, f: Mor) -> Ob {
        self.morphisms[f.ix()].cod
    }

    /// Fills every composite involving an identity that was not set
    /// explicitly. `build` calls this; explicit entries still face the
    /// identity-law check.
    pub fn imply_identity_composites(&mut self) {
        for i in 0..self.morphisms.len() {
            let f = Mor(i as u32);
            let (d, c) = (self.morphisms[i].dom, self.morphisms[i].cod);
            if let Some(idc) = self.identity[c.ix()] {
                self.composites.entry((idc, f)).or_insert(f);
            }
            if let Some(idd) = self.identity[d.ix()] {
                self.composites.entry((f, idd)).or_insert(f);
            }
        }
    }

    fn mname(&self, f: Mor) -> String {
        self.morphisms[f.ix()].id.clone()
    }

    /// Validates identity laws, closure, endpoints, associativity, unique ids
    /// and the size guard, in that order of precedence.
    pub fn build(self) -> Result<FinCategory> {
        self.build_with_guard(size_guard())
    }

    pub fn build_with_guard(mut self, guard: usize) -> Result<FinCategory> {
        if self.morphisms.len() > guard {
            return Err(Error::SizeGuardExceeded {
                what: self.name.clone(),
                count: self.morphisms.len(),
                guard,
            });
        }
        if let Some(e) = self.first_error.clone() {
            return Err(e);
        }
        self.imply_identity_composites();
        let n = self.objects.len();
        let mut identity = Vec::with_capacity(n);
        for (i, id) in self.identity.iter().enumerate() {
            match id {
                Some(f) if self.morphisms[f.ix()].dom.ix() == i && self.morphisms[f.ix()].cod.ix() == i => {
                    identity.push(*f)
                }
                Some(f) => {
                    return Err(Error::BadEndpoints { g: self.mname(*f), f: self.mname(*f) })
                }
                None => return Err(Error::MissingIdentity { object: self.objects[i].clone() }),
            }
        }
        for (&(g, f), &h) in &self.composites {
            let (gm, fm, hm) = (&self.morphisms[g.ix()], &self.morphisms[f.ix()], &self.morphisms[h.ix()]);
            if fm.cod != gm.dom || hm.dom != fm.dom || hm.cod != gm.cod {
                return Err(Error::BadEndpoints { g: self.mname(g), f: self.mname(f) });
            }
        }
        let (outgoing, incoming, in_pos, hom) = adjacency(n, &self.morphisms);
        let mut table = Vec::with_capacity(self.morphisms.len());
        for (gi, gm) in self.morphisms.iter().enumerate() {
            let g = Mor(gi as u32);
            let mut row = Vec::with_capacity(incoming[gm.dom.ix()].len());
            for &f in &incoming[gm.dom.ix()] {
                match self.composites.get(&(g, f)) {
                    Some(&h) => row.push(h),
                    None => {
                        return Err(Error::MissingComposite { g: self.mname(g), f: self.mname(f) })
                    }
                }
            }
            table.push(row);
        }
        let cat = FinCategory {
            name: self.name,
            objects: self.objects,
            object_ix: self.object_ix,
            morphisms: self.morphisms,
            morphism_ix: self.morphism_ix,
            identity,
            outgoing,
            incoming,
            in_pos,
            hom,
            table,
        };
        for f in cat.morphisms() {
            let idc = cat.id(cat.cod(f));
            let idd = cat.id(cat.dom(f));
            if cat.compose(idc, f) != f {
                return Err(Error::IdentityLaw {
                    identity: cat.mor_name(idc).to_string(),
                    morphism: cat.mor_name(f).to_string(),
                });
            }
            if cat.compose(f, idd) != f {
                return Err(Error::IdentityLaw {
                    identity: cat.mor_name(idd).to_string(),
                    morphism: cat.mor_name(f).to_string(),
                });
            }
        }
        for f in cat.morphisms() {
            for &g in cat.outgoing(cat.cod(f)) {
                if cat.is_identity(g) {
                    continue;
                }
                let gf = cat.compose(g, f);
                for &h in cat.outgoing(cat.cod(g)) {
                    if cat.compose(h, gf) != cat.compose(cat.compose(h, g), f) {
                        return Err(Error::NonAssociative {
                            h: cat.mor_name(h).to_string(),
                            g: cat.mor_name(g).to_string(),
                            f: cat.mor_name(f).to_string(),
                        });
                    }
                }
            }
        }
        Ok(cat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> FinCategory {
        let mut b = CategoryBuilder::new("interval");
        let a = b.add_object("a");
        let c = b.add_object("b");
        let ia = b.add_morphism("id_a", a, a);
        let ib = b.add_morphism("id_b", c, c);
        let u = b.add_morphism("u", a, c);
        b.set_identity(a, ia);
        b.set_identity(c, ib);
        b.imply_identity_composites();
        let _ = u;
        b.build().unwrap()
    }

    #[test]
    fn point_is_valid() {
        let p = FinCategory::point();
        assert_eq!(p.object_count(), 1);
        assert_eq!(p.morphism_count(), 1);
        assert!(p.is_balanced());
    }

    #[test]
    fn interval_laws_and_predicates() {
        let c = interval();
        let u = c.mor("u").unwrap();
        assert!(c.is_mono(u) && c.is_epi(u) && !c.is_iso(u));
        assert!(!c.is_balanced());
        assert_eq!(c.find_initial(), Some(c.ob("a").unwrap()));
        assert_eq!(c.find_terminal(), Some(c.ob("b").unwrap()));
        assert_eq!(c.opposite().find_initial(), Some(c.ob("b").unwrap()));
    }

    #[test]
    fn bad_endpoints_rejected() {
        let mut b = CategoryBuilder::new("bad");
        let a = b.add_object("a");
        let c = b.add_object("b");
        let ia = b.add_morphism("id_a", a, a);
        let ib = b.add_morphism("id_b", c, c);
        let u = b.add_morphism("u", a, c);
        b.set_identity(a, ia);
        b.set_identity(c, ib);
        b.set_composite(ib, u, ib);
        b.imply_identity_composites();
        assert!(matches!(b.build(), Err(Error::BadEndpoints { .. })));
    }

    #[test]
    fn missing_identity_and_duplicates() {
        let mut b = CategoryBuilder::new("x");
        b.add_object("a");
        assert!(matches!(b.build(), Err(Error::MissingIdentity { .. })));
        let mut b = CategoryBuilder::new("x");
        let a = b.add_object("a");
        let i = b.add_morphism("i", a, a);
        b.add_morphism("i", a, a);
        b.set_identity(a, i);
        assert!(matches!(b.build(), Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn non_associative_rejected() {
        // One object, endomorphisms {1, x, y}; x∘x = y, y∘x = x, x∘y = y, y∘y = y.
        let mut b = CategoryBuilder::new("m");
        let o = b.add_object("o");
        let one = b.add_morphism("1", o, o);
        let x = b.add_morphism("x", o, o);
        let y = b.add_morphism("y", o, o);
        b.set_identity(o, one);
        b.imply_identity_composites();
        b.set_composite(x, x, y);
        b.set_composite(y, x, x);
        b.set_composite(x, y, y);
        b.set_composite(y, y, y);
        assert!(matches!(b.build(), Err(Error::NonAssociative { .. })));
    }

    #[test]
    fn size_guard_applies() {
        let mut b = CategoryBuilder::new("big");
        for i in 0..5 {
            let x = b.add_object(format!("x{i}"));
            let f = b.add_morphism(format!("id{i}"), x, x);
            b.set_identity(x, f);
        }
        b.imply_identity_composites();
        let r = b.clone().build_with_guard(4);
        assert!(matches!(r, Err(Error::SizeGuardExceeded { count: 5, guard: 4, .. })));
        assert!(b.build().is_ok());
    }
}
