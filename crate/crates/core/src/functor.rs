//! Functors and natural transformations between finite categories.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::category::{FinCategory, Mor, Ob};
use crate::error::{Error, Result};

/// A validated functor. Source and target are shared so that composites
/// and comparisons need no copying.
#[derive(Clone, Debug)]
pub struct FunctorData {
    name: String,
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    object_map: Vec<Ob>,
    morphism_map: Vec<Mor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorFlags {
    pub injective_on_objects: bool,
    /// `None` when the source has no initial object.
    pub maps_initial_to_initial: Option<bool>,
}

/// Same categories are either the same allocation or structurally equal.
pub fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FunctorData {
    /// Checks endpoints, identities and composition, in that order.
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<Ob>,
        morphism_map: Vec<Mor>,
    ) -> Result<FunctorData> {
        let fd = FunctorData { name: name.into(), source, target, object_map, morphism_map };
        fd.validate()?;
        Ok(fd)
    }

    fn validate(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        if self.object_map.len() != s.object_count() {
            let missing = s.objects().nth(self.object_map.len()).map(|x| s.ob_name(x).to_string());
            return Err(Error::IncompleteMap { id: missing.unwrap_or_default() });
        }
        if self.morphism_map.len() != s.morphism_count() {
            let missing = s.morphisms().nth(self.morphism_map.len()).map(|f| s.mor_name(f).to_string());
            return Err(Error::IncompleteMap { id: missing.unwrap_or_default() });
        }
        for x in s.objects() {
            if self.object_map[x.ix()].ix() >= t.object_count() {
                return Err(Error::UnknownObject { id: format!("image of {}", s.ob_name(x)) });
            }
        }
        for f in s.morphisms() {
            let m = self.morphism_map[f.ix()];
            if m.ix() >= t.morphism_count()
                || t.dom(m) != self.ob(s.dom(f))
                || t.cod(m) != self.ob(s.cod(f))
            {
                return Err(Error::FunctorEndpoints { morphism: s.mor_name(f).to_string() });
            }
        }
        for x in s.objects() {
            if self.mor(s.id(x)) != t.id(self.ob(x)) {
                return Err(Error::NotIdentityPreserving { object: s.ob_name(x).to_string() });
            }
        }
        for (g, f) in s.composable_pairs() {
            if self.mor(s.compose(g, f)) != t.compose(self.mor(g), self.mor(f)) {
                return Err(Error::NotCompositionPreserving {
                    g: s.mor_name(g).to_string(),
                    f: s.mor_name(f).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Builds a functor from id-keyed maps, as read from a file.
    pub fn from_names(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: &BTreeMap<String, String>,
        morphism_map: &BTreeMap<String, String>,
    ) -> Result<FunctorData> {
        for k in object_map.keys() {
            source.ob(k)?;
        }
        for k in morphism_map.keys() {
            source.mor(k)?;
        }
        let mut obs = Vec::with_capacity(source.object_count());
        for x in source.objects() {
            let img = object_map
                .get(source.ob_name(x))
                .ok_or_else(|| Error::IncompleteMap { id: source.ob_name(x).to_string() })?;
            obs.push(target.ob(img)?);
        }
        let mut mors = Vec::with_capacity(source.morphism_count());
        for f in source.morphisms() {
            let img = morphism_map
                .get(source.mor_name(f))
                .ok_or_else(|| Error::IncompleteMap { id: source.mor_name(f).to_string() })?;
            mors.push(target.mor(img)?);
        }
        FunctorData::new(name, source, target, obs, mors)
    }

    pub fn identity(cat: &Arc<FinCategory>) -> FunctorData {
        FunctorData {
            name: format!("Id_{}", cat.name()),
            source: cat.clone(),
            target: cat.clone(),
            object_map: cat.objects().collect(),
            morphism_map: cat.morphisms().collect(),
        }
    }

    /// The functor ⋆ → cat picking out `x`.
    pub fn select(cat: &Arc<FinCategory>, x: Ob) -> FunctorData {
        FunctorData {
            name: format!("select_{}", cat.ob_name(x)),
            source: Arc::new(FinCategory::point()),
            target: cat.clone(),
            object_map: vec![x],
            morphism_map: vec![cat.id(x)],
        }
    }

    /// The unique functor into ⋆.
    pub fn to_point(cat: &Arc<FinCategory>, point: &Arc<FinCategory>) -> FunctorData {
        FunctorData {
            name: format!("!_{}", cat.name()),
            source: cat.clone(),
            target: point.clone(),
            object_map: vec![Ob(0); cat.object_count()],
            morphism_map: vec![Mor(0); cat.morphism_count()],
        }
    }

    /// Internal constructor for maps already known to be functorial.
    pub(crate) fn trusted(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<Ob>,
        morphism_map: Vec<Mor>,
    ) -> FunctorData {
        let fd = FunctorData { name: name.into(), source, target, object_map, morphism_map };
        debug_assert!(fd.validate().is_ok(), "trusted functor {} fails validation", fd.name);
        fd
    }

    /// No validation at all; for pointwise comparisons of maps.
    pub(crate) fn trusted_unchecked(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<Ob>,
        morphism_map: Vec<Mor>,
    ) -> FunctorData {
        FunctorData { name: name.into(), source, target, object_map, morphism_map }
    }

    /// `self ∘ first`; revalidated.
    pub fn after(&self, first: &FunctorData) -> Result<FunctorData> {
        if !same_category(&first.target, &self.source) {
            return Err(Error::TargetMismatch {
                left: first.target.name().to_string(),
                right: self.source.name().to_string(),
            });
        }
        FunctorData::new(
            format!("{}∘{}", self.name, first.name),
            first.source.clone(),
            self.target.clone(),
            first.object_map.iter().map(|&x| self.ob(x)).collect(),
            first.morphism_map.iter().map(|&f| self.mor(f)).collect(),
        )
    }

    /// The same functor between opposite categories.
    pub fn opposite(&self) -> FunctorData {
        FunctorData {
            name: format!("{}^op", self.name),
            source: Arc::new(self.source.opposite()),
            target: Arc::new(self.target.opposite()),
            object_map: self.object_map.clone(),
            morphism_map: self.morphism_map.clone(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    #[inline]
    pub fn ob(&self, x: Ob) -> Ob {
        self.object_map[x.ix()]
    }

    #[inline]
    pub fn mor(&self, f: Mor) -> Mor {
        self.morphism_map[f.ix()]
    }

    pub fn object_map(&self) -> &[Ob] {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &[Mor] {
        &self.morphism_map
    }

    /// Strict equality of maps between structurally equal categories.
    pub fn same_as(&self, other: &FunctorData) -> bool {
        self.object_map == other.object_map
            && self.morphism_map == other.morphism_map
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }

    /// First source object or morphism where `self` and `other` differ.
    pub fn first_difference(&self, other: &FunctorData) -> Option<String> {
        let s = &self.source;
        for x in s.objects() {
            if self.ob(x) != other.ob(x) {
                return Some(format!("object {}", s.ob_name(x)));
            }
        }
        for f in s.morphisms() {
            if self.mor(f) != other.mor(f) {
                return Some(format!("morphism {}", s.mor_name(f)));
            }
        }
        None
    }

    pub fn flags(&self) -> FunctorFlags {
        let mut seen = vec![false; self.target.object_count()];
        let injective_on_objects = self.object_map.iter().all(|y| !std::mem::replace(&mut seen[y.ix()], true));
        let maps_initial_to_initial = self.source.find_initial().map(|z| {
            let fz = self.ob(z);
            self.target.objects().all(|y| self.target.hom(fz, y).len() == 1)
        });
        FunctorFlags { injective_on_objects, maps_initial_to_initial }
    }

    pub fn object_map_names(&self) -> BTreeMap<String, String> {
        self.source
            .objects()
            .map(|x| (self.source.ob_name(x).to_string(), self.target.ob_name(self.ob(x)).to_string()))
            .collect()
    }

    pub fn morphism_map_names(&self) -> BTreeMap<String, String> {
        self.source
            .morphisms()
            .map(|f| (self.source.mor_name(f).to_string(), self.target.mor_name(self.mor(f)).to_string()))
            .collect()
    }
}

/// A validated natural transformation `source_functor ⇒ target_functor`.
#[derive(Clone, Debug)]
pub struct NatTransData {
    pub source_functor: FunctorData,
    pub target_functor: FunctorData,
    pub components: Vec<Mor>,
}

impl NatTransData {
    pub fn new(source_functor: FunctorData, target_functor: FunctorData, components: Vec<Mor>) -> Result<Self> {
        if !same_category(source_functor.source(), target_functor.source()) {
            return Err(Error::SourceMismatch {
                left: source_functor.name().to_string(),
                right: target_functor.name().to_string(),
            });
        }
        if !same_category(source_functor.target(), target_functor.target()) {
            return Err(Error::TargetMismatch {
                left: source_functor.name().to_string(),
                right: target_functor.name().to_string(),
            });
        }
        let (j, c) = (source_functor.source().clone(), source_functor.target().clone());
        if components.len() != j.object_count() {
            return Err(Error::IncompleteMap { id: "components".into() });
        }
        for x in j.objects() {
            let m = components[x.ix()];
            if m.ix() >= c.morphism_count()
                || c.dom(m) != source_functor.ob(x)
                || c.cod(m) != target_functor.ob(x)
            {
                return Err(Error::NotNatural { at: format!("component at {} has wrong endpoints", j.ob_name(x)) });
            }
        }
        for f in j.morphisms() {
            let (x, y) = (j.dom(f), j.cod(f));
            let lhs = c.compose(components[y.ix()], source_functor.mor(f));
            let rhs = c.compose(target_functor.mor(f), components[x.ix()]);
            if lhs != rhs {
                return Err(Error::NotNatural { at: format!("morphism {}", j.mor_name(f)) });
            }
        }
        Ok(NatTransData { source_functor, target_functor, components })
    }

    pub fn is_iso(&self) -> bool {
        let c = self.source_functor.target();
        self.components.iter().all(|&m| c.is_iso(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryBuilder;

    fn chain() -> Arc<FinCategory> {
        let mut b = CategoryBuilder::new("chain");
        let x: Vec<Ob> = ["a", "b", "c"].iter().map(|n| b.add_object(*n)).collect();
        for (i, &o) in x.iter().enumerate() {
            let id = b.add_morphism(format!("id{i}"), o, o);
            b.set_identity(o, id);
        }
        let u = b.add_morphism("u", x[0], x[1]);
        let v = b.add_morphism("v", x[1], x[2]);
        let w = b.add_morphism("w", x[0], x[2]);
        b.set_composite(v, u, w);
        Arc::new(b.build().unwrap())
    }

    fn idempotent() -> Arc<FinCategory> {
        let mut b = CategoryBuilder::new("idem");
        let o = b.add_object("o");
        let one = b.add_morphism("1", o, o);
        let e = b.add_morphism("e", o, o);
        b.set_identity(o, one);
        b.set_composite(e, e, e);
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn identity_functor_and_flags() {
        let c = chain();
        let id = FunctorData::identity(&c);
        assert!(id.validate().is_ok());
        let fl = id.flags();
        assert!(fl.injective_on_objects);
        assert_eq!(fl.maps_initial_to_initial, Some(true));
    }

    #[test]
    fn collapse_breaks_composition() {
        let (c, m) = (chain(), idempotent());
        let (one, e) = (m.mor("1").unwrap(), m.mor("e").unwrap());
        let mors = c
            .morphisms()
            .map(|f| match c.mor_name(f) {
                "u" | "v" => e,
                _ => one,
            })
            .collect();
        let r = FunctorData::new("collapse", c.clone(), m, vec![Ob(0); 3], mors);
        assert!(matches!(r, Err(Error::NotCompositionPreserving { .. })), "{r:?}");
    }

    #[test]
    fn naturality_checked() {
        let c = chain();
        let id = FunctorData::identity(&c);
        let comps: Vec<Mor> = c.objects().map(|x| c.id(x)).collect();
        assert!(NatTransData::new(id.clone(), id.clone(), comps).unwrap().is_iso());
        // Constant functor at c with components into it: natural.
        let top = c.ob("c").unwrap();
        let konst = FunctorData::new(
            "const_c",
            c.clone(),
            c.clone(),
            vec![top; 3],
            vec![c.id(top); c.morphism_count()],
        )
        .unwrap();
        let comps = vec![c.mor("w").unwrap(), c.mor("v").unwrap(), c.id(top)];
        let nt = NatTransData::new(id, konst, comps).unwrap();
        assert!(!nt.is_iso());
    }
}
