//! Comma categories and everything built from them: slices, arrow
//! categories, the four corner categories of an arrow category of a comma
//! category, the fiber Comma(Forget₂, b), and induced functors between comma
//! categories.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{size_guard, CategoryBuilder, FinCategory, Mor, Ob};
use crate::error::{Error, Result};
use crate::functor::{same_category, FunctorData};

/// Provenance of a comma object: φ: α(a) → β(b).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommaObject {
    pub a: Ob,
    pub b: Ob,
    pub phi: Mor,
}

#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub base: Arc<FinCategory>,
    pub left: FunctorData,
    pub right: FunctorData,
    pub forget1: FunctorData,
    pub forget2: FunctorData,
    provenance: Vec<CommaObject>,
    object_lookup: HashMap<CommaObject, Ob>,
    parts: Vec<(Mor, Mor)>,
    part_lookup: HashMap<(Ob, Ob, Mor, Mor), Mor>,
}

impl CommaCategory {
    /// Domain of α.
    pub fn a_cat(&self) -> &Arc<FinCategory> {
        self.left.source()
    }

    /// Domain of β.
    pub fn b_cat(&self) -> &Arc<FinCategory> {
        self.right.source()
    }

    /// Common codomain of α and β.
    pub fn c_cat(&self) -> &Arc<FinCategory> {
        self.left.target()
    }

    pub fn provenance(&self, x: Ob) -> CommaObject {
        self.provenance[x.ix()]
    }

    pub fn provenance_table(&self) -> &[CommaObject] {
        &self.provenance
    }

    /// The (A, B) components of a comma morphism.
    pub fn parts(&self, m: Mor) -> (Mor, Mor) {
        self.parts[m.ix()]
    }

    pub fn object_of(&self, a: Ob, b: Ob, phi: Mor) -> Option<Ob> {
        self.object_lookup.get(&CommaObject { a, b, phi }).copied()
    }

    /// The comma morphism src → dst with components (f, g), if the square commutes.
    pub fn morphism_of(&self, src: Ob, dst: Ob, f: Mor, g: Mor) -> Option<Mor> {
        self.part_lookup.get(&(src, dst, f, g)).copied()
    }
}

/// Comma(α, β). Objects (a, b, φ: αa → βb); morphisms (f, g) with
/// βg∘φ = φ'∘αf.
pub fn comma(left: &FunctorData, right: &FunctorData) -> Result<CommaCategory> {
    if !same_category(left.target(), right.target()) {
        return Err(Error::TargetMismatch {
            left: left.target().name().to_string(),
            right: right.target().name().to_string(),
        });
    }
    let name = format!("Comma({},{})", left.name(), right.name());
    let (ca, cb, cc) = (left.source().clone(), right.source().clone(), left.target().clone());
    let guard = size_guard();
    let mut builder = CategoryBuilder::new(name.clone());
    let mut provenance = Vec::new();
    let mut object_lookup = HashMap::new();
    for a in ca.objects() {
        for b in cb.objects() {
            for &phi in cc.hom(left.ob(a), right.ob(b)) {
                let x = builder.add_object(format!(
                    "({}|{}|{})",
                    ca.ob_name(a),
                    cb.ob_name(b),
                    cc.mor_name(phi)
                ));
                let p = CommaObject { a, b, phi };
                provenance.push(p);
                object_lookup.insert(p, x);
            }
        }
    }
    let mut parts = Vec::new();
    let mut part_lookup = HashMap::new();
    let mut out: Vec<Vec<Mor>> = vec![Vec::new(); provenance.len()];
    for (si, s) in provenance.iter().enumerate() {
        for (ti, t) in provenance.iter().enumerate() {
            let fs = ca.hom(s.a, t.a);
            let gs = cb.hom(s.b, t.b);
            if fs.is_empty() || gs.is_empty() {
                continue;
            }
            for &f in fs {
                let lhs_f = cc.compose(t.phi, left.mor(f));
                for &g in gs {
                    if cc.compose(right.mor(g), s.phi) != lhs_f {
                        continue;
                    }
                    if parts.len() >= guard {
                        return Err(Error::SizeGuardExceeded { what: name, count: parts.len() + 1, guard });
                    }
                    let m = builder.add_morphism(
                        format!(
                            "({}|{}|{}|{})",
                            ca.mor_name(f),
                            cb.mor_name(g),
                            cc.mor_name(s.phi),
                            cc.mor_name(t.phi)
                        ),
                        Ob(si as u32),
                        Ob(ti as u32),
                    );
                    parts.push((f, g));
                    part_lookup.insert((Ob(si as u32), Ob(ti as u32), f, g), m);
                    out[si].push(m);
                }
            }
        }
    }
    for (xi, p) in provenance.iter().enumerate() {
        let x = Ob(xi as u32);
        let id = part_lookup[&(x, x, ca.id(p.a), cb.id(p.b))];
        builder.set_identity(x, id);
    }
    for m1 in 0..parts.len() {
        let m1 = Mor(m1 as u32);
        let (s, t) = (builder.dom(m1), builder.cod(m1));
        let (f1, g1) = parts[m1.ix()];
        for &m2 in &out[t.ix()] {
            let (f2, g2) = parts[m2.ix()];
            let key = (s, builder.cod(m2), ca.compose(f2, f1), cb.compose(g2, g1));
            let h = part_lookup[&key];
            builder.set_composite(m2, m1, h);
        }
    }
    let base = Arc::new(builder.build()?);
    let forget1 = FunctorData::new(
        format!("Forget1[{name}]"),
        base.clone(),
        ca.clone(),
        provenance.iter().map(|p| p.a).collect(),
        parts.iter().map(|p| p.0).collect(),
    )?;
    let forget2 = FunctorData::new(
        format!("Forget2[{name}]"),
        base.clone(),
        cb.clone(),
        provenance.iter().map(|p| p.b).collect(),
        parts.iter().map(|p| p.1).collect(),
    )?;
    Ok(CommaCategory {
        base,
        left: left.clone(),
        right: right.clone(),
        forget1,
        forget2,
        provenance,
        object_lookup,
        parts,
        part_lookup,
    })
}

/// The left slice Comma(cat, x) = Comma(Id, select x).
pub fn slice(cat: &Arc<FinCategory>, x: Ob) -> Result<CommaCategory> {
    if x.ix() >= cat.object_count() {
        return Err(Error::UnknownObject { id: format!("#{}", x.0) });
    }
    comma(&FunctorData::identity(cat), &FunctorData::select(cat, x))
}

/// Arr(cat) = Comma(Id, Id).
pub fn arrow_category(cat: &Arc<FinCategory>) -> Result<CommaCategory> {
    let id = FunctorData::identity(cat);
    comma(&id, &id)
}

/// (DL, UR) = (Comma(Id_A, Forget₁), Comma(Forget₂, Id_B)).
pub fn corner_categories(cc: &CommaCategory) -> Result<(CommaCategory, CommaCategory)> {
    let dl = comma(&FunctorData::identity(cc.a_cat()), &cc.forget1)?;
    let ur = comma(&cc.forget2, &FunctorData::identity(cc.b_cat()))?;
    Ok((dl, ur))
}

/// UL = Comma(Forget₁, Id_A).
pub fn upper_left(cc: &CommaCategory) -> Result<CommaCategory> {
    comma(&cc.forget1, &FunctorData::identity(cc.a_cat()))
}

/// DR = Comma(Id_B, Forget₂).
pub fn lower_right(cc: &CommaCategory) -> Result<CommaCategory> {
    comma(&FunctorData::identity(cc.b_cat()), &cc.forget2)
}

/// The six projections out of Arr(cc). An arrow object s: G₁ → G₂ with
/// components (u₁, u₂) goes to G₁ (U), G₂ (D), (G₁, a₂, u₁) (UL),
/// (G₁, b₂, u₂) (UR), (a₁, G₂, u₁) (DL) and (b₁, G₂, u₂) (DR).
#[derive(Clone, Debug)]
pub struct CornerProjections {
    pub u: FunctorData,
    pub d: FunctorData,
    pub ul: FunctorData,
    pub ur: FunctorData,
    pub dl: FunctorData,
    pub dr: FunctorData,
}

#[derive(Clone, Copy)]
enum Corner {
    UL,
    UR,
    DL,
    DR,
}

fn corner_projection(
    cc: &CommaCategory,
    arr: &CommaCategory,
    target: &CommaCategory,
    corner: Corner,
) -> Result<FunctorData> {
    let mut obs = Vec::with_capacity(arr.base.object_count());
    for s in arr.base.objects() {
        let p = arr.provenance(s);
        let (g1, g2) = (p.a, p.b);
        let (u1, u2) = cc.parts(p.phi);
        let (pa, pb, pc) = match corner {
            Corner::UL => (g1, cc.provenance(g2).a, u1),
            Corner::UR => (g1, cc.provenance(g2).b, u2),
            Corner::DL => (cc.provenance(g1).a, g2, u1),
            Corner::DR => (cc.provenance(g1).b, g2, u2),
        };
        let x = target
            .object_of(pa, pb, pc)
            .ok_or_else(|| Error::UnknownObject { id: arr.base.ob_name(s).to_string() })?;
        obs.push(x);
    }
    let mut mors = Vec::with_capacity(arr.base.morphism_count());
    for m in arr.base.morphisms() {
        let (p, q) = arr.parts(m);
        let (f, g) = match corner {
            Corner::UL => (p, cc.forget1.mor(q)),
            Corner::UR => (p, cc.forget2.mor(q)),
            Corner::DL => (cc.forget1.mor(p), q),
            Corner::DR => (cc.forget2.mor(p), q),
        };
        let (s, t) = (arr.base.dom(m), arr.base.cod(m));
        let x = target
            .morphism_of(obs[s.ix()], obs[t.ix()], f, g)
            .ok_or_else(|| Error::UnknownMorphism { id: arr.base.mor_name(m).to_string() })?;
        mors.push(x);
    }
    let name = match corner {
        Corner::UL => "UL",
        Corner::UR => "UR",
        Corner::DL => "DL",
        Corner::DR => "DR",
    };
    FunctorData::new(name, arr.base.clone(), target.base.clone(), obs, mors)
}

/// Projections from `arr` = Arr(cc.base) into cc and the four corners.
pub fn corner_projections(
    cc: &CommaCategory,
    arr: &CommaCategory,
    ul: &CommaCategory,
    ur: &CommaCategory,
    dl: &CommaCategory,
    dr: &CommaCategory,
) -> Result<CornerProjections> {
    if !same_category(arr.c_cat(), &cc.base) {
        return Err(Error::TargetMismatch {
            left: arr.base.name().to_string(),
            right: cc.base.name().to_string(),
        });
    }
    let u = arr.forget1.clone().with_name("U");
    let d = arr.forget2.clone().with_name("D");
    Ok(CornerProjections {
        u,
        d,
        ul: corner_projection(cc, arr, ul, Corner::UL)?,
        ur: corner_projection(cc, arr, ur, Corner::UR)?,
        dl: corner_projection(cc, arr, dl, Corner::DL)?,
        dr: corner_projection(cc, arr, dr, Corner::DR)?,
    })
}

/// Comma(Forget₂, b) with Restrict onto slice(B, b) and, when UR is
/// supplied, the inclusion into UR.
#[derive(Clone, Debug)]
pub struct CommaFiber {
    pub fiber: CommaCategory,
    pub slice: CommaCategory,
    pub restrict: FunctorData,
    pub inclusion: Option<FunctorData>,
    pub b: Ob,
}

pub fn comma_fiber(cc: &CommaCategory, b: Ob, ur: Option<&CommaCategory>) -> Result<CommaFiber> {
    let cb = cc.b_cat();
    if b.ix() >= cb.object_count() {
        return Err(Error::UnknownObject { id: format!("#{}", b.0) });
    }
    let select = FunctorData::select(cb, b);
    let fiber = comma(&cc.forget2, &select)?;
    let sl = comma(&FunctorData::identity(cb), &select)?;
    let star = Ob(0);
    let mut obs = Vec::new();
    for x in fiber.base.objects() {
        let p = fiber.provenance(x);
        let bg = cc.forget2.ob(p.a);
        obs.push(sl.object_of(bg, star, p.phi).expect("slice object"));
    }
    let mut mors = Vec::new();
    for m in fiber.base.morphisms() {
        let (u, v) = fiber.parts(m);
        let (s, t) = (fiber.base.dom(m), fiber.base.cod(m));
        mors.push(
            sl.morphism_of(obs[s.ix()], obs[t.ix()], cc.forget2.mor(u), v)
                .expect("slice morphism"),
        );
    }
    let restrict = FunctorData::new("Restrict", fiber.base.clone(), sl.base.clone(), obs, mors)?;
    let inclusion = match ur {
        None => None,
        Some(ur) => {
            if !same_category(ur.a_cat(), &cc.base) {
                return Err(Error::TargetMismatch {
                    left: ur.base.name().to_string(),
                    right: cc.base.name().to_string(),
                });
            }
            let mut obs = Vec::new();
            for x in fiber.base.objects() {
                let p = fiber.provenance(x);
                obs.push(ur.object_of(p.a, b, p.phi).expect("UR object"));
            }
            let mut mors = Vec::new();
            for m in fiber.base.morphisms() {
                let (u, _) = fiber.parts(m);
                let (s, t) = (fiber.base.dom(m), fiber.base.cod(m));
                mors.push(ur.morphism_of(obs[s.ix()], obs[t.ix()], u, cb.id(b)).expect("UR morphism"));
            }
            Some(FunctorData::new("Include", fiber.base.clone(), ur.base.clone(), obs, mors)?)
        }
    };
    Ok(CommaFiber { fiber, slice: sl, restrict, inclusion, b })
}

fn check_square(outer: &FunctorData, first: &FunctorData, second: &FunctorData, label: &str) -> Result<()> {
    // outer∘first vs second, compared as maps.
    let s = first.source();
    for x in s.objects() {
        if outer.ob(first.ob(x)) != second.ob(x) {
            return Err(Error::SquareDoesNotCommute { at: format!("{label}: object {}", s.ob_name(x)) });
        }
    }
    for f in s.morphisms() {
        if outer.mor(first.mor(f)) != second.mor(f) {
            return Err(Error::SquareDoesNotCommute { at: format!("{label}: morphism {}", s.mor_name(f)) });
        }
    }
    Ok(())
}

fn require_same(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> Result<()> {
    if same_category(a, b) {
        Ok(())
    } else {
        Err(Error::TargetMismatch { left: a.name().to_string(), right: b.name().to_string() })
    }
}

/// Map(I, J, K): Comma(F, G) → Comma(F', G') sending (a, c, φ) to
/// (Ia, Kc, Jφ). Requires J∘F = F'∘I and J∘G = G'∘K strictly.
pub fn induced_comma_functor(
    i: &FunctorData,
    j: &FunctorData,
    k: &FunctorData,
    src: &CommaCategory,
    dst: &CommaCategory,
) -> Result<FunctorData> {
    require_same(i.source(), src.a_cat())?;
    require_same(i.target(), dst.a_cat())?;
    require_same(j.source(), src.c_cat())?;
    require_same(j.target(), dst.c_cat())?;
    require_same(k.source(), src.b_cat())?;
    require_same(k.target(), dst.b_cat())?;
    // J∘F against F'∘I, and J∘G against G'∘K, evaluated pointwise.
    let jf = compose_maps(j, &src.left);
    let fi = compose_maps(&dst.left, i);
    check_square(&FunctorData::identity(dst.c_cat()), &jf, &fi, "J∘F = F'∘I")?;
    let jg = compose_maps(j, &src.right);
    let gk = compose_maps(&dst.right, k);
    check_square(&FunctorData::identity(dst.c_cat()), &jg, &gk, "J∘G = G'∘K")?;
    let mut obs = Vec::with_capacity(src.base.object_count());
    for x in src.base.objects() {
        let p = src.provenance(x);
        let y = dst
            .object_of(i.ob(p.a), k.ob(p.b), j.mor(p.phi))
            .expect("image of a comma object is a comma object");
        obs.push(y);
    }
    let mut mors = Vec::with_capacity(src.base.morphism_count());
    for m in src.base.morphisms() {
        let (f, g) = src.parts(m);
        let (s, t) = (src.base.dom(m), src.base.cod(m));
        mors.push(
            dst.morphism_of(obs[s.ix()], obs[t.ix()], i.mor(f), k.mor(g))
                .expect("image of a commuting square commutes"),
        );
    }
    FunctorData::new(
        format!("Map({},{},{})", i.name(), j.name(), k.name()),
        src.base.clone(),
        dst.base.clone(),
        obs,
        mors,
    )
}

/// Unvalidated pointwise composite `outer∘inner`, for comparisons only.
fn compose_maps(outer: &FunctorData, inner: &FunctorData) -> FunctorData {
    FunctorData::trusted_unchecked(
        format!("{}∘{}", outer.name(), inner.name()),
        inner.source().clone(),
        outer.target().clone(),
        inner.object_map().iter().map(|&x| outer.ob(x)).collect(),
        inner.morphism_map().iter().map(|&f| outer.mor(f)).collect(),
    )
}

/// Φ_F: slice(A, a) → DL, sending f: a' → a to the L-diagram (a', F, f).
/// `sl` must be slice(A, a) for a = Forget₁(F) and `dl` the DL corner of cc.
pub fn map_c(cc: &CommaCategory, big_f: Ob, sl: &CommaCategory, dl: &CommaCategory) -> Result<FunctorData> {
    if big_f.ix() >= cc.base.object_count() {
        return Err(Error::UnknownObject { id: format!("#{}", big_f.0) });
    }
    let ida = FunctorData::identity(cc.a_cat());
    let k = FunctorData::select(&cc.base, big_f);
    induced_comma_functor(&ida, &ida, &k, sl, dl).map(|f| f.with_name(format!("MapC[{}]", cc.base.ob_name(big_f))))
}

/// The left adjoint of Forget₂: b ↦ (0_A, b, !), g ↦ (id, g). Needs an
/// initial 0_A with α(0_A) initial in C.
pub fn initial_completion(cc: &CommaCategory) -> Result<FunctorData> {
    let ca = cc.a_cat();
    let cb = cc.b_cat();
    let cc_ = cc.c_cat();
    let zero = ca.find_initial().ok_or_else(|| Error::AssumptionFailure {
        failed: vec![format!("{} has no initial object", ca.name())],
    })?;
    let az = cc.left.ob(zero);
    let mut obs = Vec::new();
    for b in cb.objects() {
        let h = cc_.hom(az, cc.right.ob(b));
        if h.len() != 1 {
            return Err(Error::AssumptionFailure {
                failed: vec![format!("α({}) is not initial", ca.ob_name(zero))],
            });
        }
        obs.push(cc.object_of(zero, b, h[0]).expect("completion object"));
    }
    let mut mors = Vec::new();
    for g in cb.morphisms() {
        let (s, t) = (cb.dom(g), cb.cod(g));
        mors.push(cc.morphism_of(obs[s.ix()], obs[t.ix()], ca.id(zero), g).expect("completion morphism"));
    }
    FunctorData::new("InitialCompletion", cb.clone(), cc.base.clone(), obs, mors)
}

/// The left adjoint of Forget₁: UR → Comma: G ↦ (G, b_G, id), u ↦ (u, Forget₂ u).
pub fn identity_completion(cc: &CommaCategory, ur: &CommaCategory) -> Result<FunctorData> {
    require_same(ur.a_cat(), &cc.base)?;
    let cb = cc.b_cat();
    let mut obs = Vec::new();
    for g in cc.base.objects() {
        let b = cc.provenance(g).b;
        obs.push(ur.object_of(g, b, cb.id(b)).expect("identity completion"));
    }
    let mut mors = Vec::new();
    for u in cc.base.morphisms() {
        let (s, t) = (cc.base.dom(u), cc.base.cod(u));
        mors.push(
            ur.morphism_of(obs[s.ix()], obs[t.ix()], u, cc.forget2.mor(u))
                .expect("identity completion morphism"),
        );
    }
    FunctorData::new("IdentityCompletion", cc.base.clone(), ur.base.clone(), obs, mors)
}

/// A × B with objects "(x,y)" and morphisms "(f,g)".
pub fn product_category(a: &FinCategory, b: &FinCategory) -> Result<FinCategory> {
    let mut builder = CategoryBuilder::new(format!("{}×{}", a.name(), b.name()));
    let nb = b.object_count() as u32;
    for x in a.objects() {
        for y in b.objects() {
            builder.add_object(format!("({},{})", a.ob_name(x), b.ob_name(y)));
        }
    }
    let mb = b.morphism_count() as u32;
    let ob = |x: Ob, y: Ob| Ob(x.0 * nb + y.0);
    let mor = |f: Mor, g: Mor| Mor(f.0 * mb + g.0);
    for f in a.morphisms() {
        for g in b.morphisms() {
            builder.add_morphism(
                format!("({},{})", a.mor_name(f), b.mor_name(g)),
                ob(a.dom(f), b.dom(g)),
                ob(a.cod(f), b.cod(g)),
            );
        }
    }
    for x in a.objects() {
        for y in b.objects() {
            builder.set_identity(ob(x, y), mor(a.id(x), b.id(y)));
        }
    }
    for (f2, f1) in a.composable_pairs() {
        for (g2, g1) in b.composable_pairs() {
            builder.set_composite(mor(f2, g2), mor(f1, g1), mor(a.compose(f2, f1), b.compose(g2, g1)));
        }
    }
    builder.build()
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

    #[test]
    fn arrow_of_interval() {
        let arr = arrow_category(&interval()).unwrap();
        assert_eq!(arr.base.object_count(), 3);
        assert_eq!(arr.base.morphism_count(), 6);
    }

    #[test]
    fn arrow_of_point_is_point() {
        let p = Arc::new(FinCategory::point());
        let arr = arrow_category(&p).unwrap();
        assert_eq!((arr.base.object_count(), arr.base.morphism_count()), (1, 1));
        let (dl, ur) = corner_categories(&arr).unwrap();
        assert_eq!((dl.base.object_count(), dl.base.morphism_count()), (1, 1));
        assert_eq!((ur.base.object_count(), ur.base.morphism_count()), (1, 1));
    }

    #[test]
    fn target_mismatch() {
        let i = interval();
        let p = Arc::new(FinCategory::point());
        let r = comma(&FunctorData::identity(&i), &FunctorData::identity(&p));
        assert!(matches!(r, Err(Error::TargetMismatch { .. })));
    }

    #[test]
    fn slice_and_fiber_of_interval() {
        let i = interval();
        let b = i.ob("b").unwrap();
        assert_eq!(slice(&i, b).unwrap().base.object_count(), 2);
        assert_eq!(slice(&i, i.ob("a").unwrap()).unwrap().base.object_count(), 1);
        let arr = arrow_category(&i).unwrap();
        let (_, ur) = corner_categories(&arr).unwrap();
        let fib = comma_fiber(&arr, b, Some(&ur)).unwrap();
        // Pairs (arrow F into x, x → b): F ∈ {id_a, u, id_b}, cod F ∈ {a, b}, each one map to b.
        assert_eq!(fib.fiber.base.object_count(), 3);
        assert!(fib.inclusion.is_some());
    }

    #[test]
    fn identity_induced_functor_is_identity() {
        let i = interval();
        let arr = arrow_category(&i).unwrap();
        let id = FunctorData::identity(&i);
        let m = induced_comma_functor(&id, &id, &id, &arr, &arr).unwrap();
        assert!(m.same_as(&FunctorData::identity(&arr.base)));
    }

    #[test]
    fn non_commuting_square_detected() {
        let i = interval();
        let arr = arrow_category(&i).unwrap();
        let id = FunctorData::identity(&i);
        let b = i.ob("b").unwrap();
        let konst = FunctorData::new(
            "const_b",
            i.clone(),
            i.clone(),
            vec![b, b],
            vec![i.id(b); 3],
        )
        .unwrap();
        let r = induced_comma_functor(&konst, &id, &id, &arr, &arr);
        assert!(matches!(r, Err(Error::SquareDoesNotCommute { .. })));
    }
}
