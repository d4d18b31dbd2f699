//! Induced slice functors.
//!
//! Fix a comma object F = (a, b, φ: αa → βb) of Comma(α, β). Every slice
//! object f: a' → a gives an L-shaped diagram (αf, φ). Its completions into
//! commuting squares form the category Z(f, F): objects are comma morphisms
//! s = (f, g): G → F whose first component is exactly f, morphisms are comma
//! morphisms u: G₁ → G₂ with Forget₁(u) = id and s₂∘u = s₁. The projection
//! ζ_{f,F}: Z(f, F) → Comma(α, β), (G, s) ↦ G, has a limit τ_F(f), the
//! minimal completion.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::category::{CategoryBuilder, FinCategory, Mor, Ob};
use crate::constructions::{
    arrow_category, comma, comma_fiber, corner_categories, map_c, slice, CommaCategory, CommaFiber,
};
use crate::error::{Error, Result};
use crate::functor::{same_category, FunctorData, NatTransData};
use crate::limits::{equalizer, limit, probe_completeness, unique_mediator, Cone, Diagram, LimitResult};
use crate::limpre::{is_limit_preserving, pre_diagram_under};

#[derive(Clone, Debug)]
pub struct InducedSetup {
    pub comma: Arc<CommaCategory>,
    /// The chosen comma object F.
    pub object: Ob,
    pub a: Ob,
    pub b: Ob,
    pub phi: Mor,
    /// slice(A, a).
    pub slice_a: Arc<CommaCategory>,
    /// slice(B, b).
    pub slice_b: Arc<CommaCategory>,
}

/// ζ_{f,F} with its index category. `members[z]` is the pair (G, s).
#[derive(Clone, Debug)]
pub struct ZetaDiagram {
    pub diagram: Diagram,
    pub members: Vec<(Ob, Mor)>,
    /// The identity completion ((a', b, φ∘αf), (f, id_b)), terminal in Z.
    pub terminal: Ob,
}

/// τ_F(f) with the square data: ψ = τ_F(f) runs αa' → βb', g: b' → b.
#[derive(Clone, Debug)]
pub struct TauValue {
    pub slice_object: Ob,
    pub comma_object: Ob,
    pub psi: Mor,
    pub b_prime: Ob,
    pub g: Mor,
    pub zeta: ZetaDiagram,
    pub limit: LimitResult,
    /// The selected terminal cone (the limit cone or one of its ties).
    pub cone: Cone,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionCheck {
    pub holds: bool,
    pub witness: Option<String>,
}

impl AssumptionCheck {
    fn pass() -> Self {
        AssumptionCheck { holds: true, witness: None }
    }
    fn fail(w: impl Into<String>) -> Self {
        AssumptionCheck { holds: false, witness: Some(w.into()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionReport {
    pub probe: usize,
    /// α and β are the same functor ι.
    pub iota_setup: bool,
    pub a1: AssumptionCheck,
    pub a2: AssumptionCheck,
    pub a3: AssumptionCheck,
    pub a4: AssumptionCheck,
    pub a5: AssumptionCheck,
}

impl AssumptionReport {
    pub fn failed(&self, names: &[&str]) -> Vec<String> {
        names
            .iter()
            .filter(|n| !self.get(n).holds)
            .map(|n| n.to_string())
            .collect()
    }

    pub fn get(&self, name: &str) -> &AssumptionCheck {
        match name {
            "A1" => &self.a1,
            "A2" => &self.a2,
            "A3" => &self.a3,
            "A4" => &self.a4,
            "A5" => &self.a5,
            _ => panic!("unknown assumption {name}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalReport {
    pub mediators: Vec<String>,
    pub exists: bool,
    pub unique: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EpiVerdict {
    Epi,
    NotEpi,
    Unsupported,
}

/// Per parallel pair (u, v) out of cod ψ with u∘ψ = v∘ψ and u ≠ v: the
/// equalizer leg and whether ψ factors through it.
#[derive(Clone, Debug, Serialize)]
pub struct EqualizerStep {
    pub u: String,
    pub v: String,
    pub leg: Option<String>,
    pub leg_is_mono: bool,
    pub psi_factors: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpiReport {
    pub verdict: EpiVerdict,
    pub psi: Option<String>,
    pub pairs_checked: usize,
    pub trace: Vec<EqualizerStep>,
}

/// τ_F, bar-τ_F and Dyn_F with the strict commutation checks.
#[derive(Clone, Debug)]
pub struct BarTauDyn {
    pub tau: FunctorData,
    pub bar_tau: FunctorData,
    pub dyn_f: FunctorData,
    pub fiber: CommaFiber,
    pub values: Vec<TauValue>,
    /// (name, holds) for each strict functor equation checked.
    pub checks: Vec<(String, bool)>,
}

impl InducedSetup {
    pub fn new(comma: Arc<CommaCategory>, object: Ob) -> Result<InducedSetup> {
        if object.ix() >= comma.base.object_count() {
            return Err(Error::UnknownObject { id: format!("#{}", object.0) });
        }
        let p = comma.provenance(object);
        let slice_a = Arc::new(slice(comma.a_cat(), p.a)?);
        let slice_b = Arc::new(slice(comma.b_cat(), p.b)?);
        Ok(InducedSetup { comma, object, a: p.a, b: p.b, phi: p.phi, slice_a, slice_b })
    }

    pub fn by_name(comma: Arc<CommaCategory>, id: &str) -> Result<InducedSetup> {
        let x = comma.base.ob(id)?;
        InducedSetup::new(comma, x)
    }

    fn slice_mor(&self, f: Ob) -> Result<(Ob, Mor)> {
        if f.ix() >= self.slice_a.base.object_count() {
            return Err(Error::UnknownObject { id: format!("slice object #{}", f.0) });
        }
        let p = self.slice_a.provenance(f);
        Ok((p.a, p.phi))
    }

    /// The diagram ζ_{f,F}: Z(f, F) → Comma(α, β).
    pub fn zeta_diagram(&self, f: Ob) -> Result<ZetaDiagram> {
        let cc = &self.comma;
        let cb = cc.b_cat();
        let (a1, fm) = self.slice_mor(f)?;
        let mut members = Vec::new();
        let mut b = CategoryBuilder::new(format!("Z({},{})", self.slice_a.base.ob_name(f), cc.base.ob_name(self.object)));
        for g in cc.base.objects() {
            let pg = cc.provenance(g);
            if pg.a != a1 {
                continue;
            }
            for &gm in cb.hom(pg.b, self.b) {
                if let Some(s) = cc.morphism_of(g, self.object, fm, gm) {
                    b.add_object(cc.base.mor_name(s).to_string());
                    members.push((g, s));
                }
            }
        }
        let by_s: HashMap<Mor, Ob> = members.iter().enumerate().map(|(i, &(_, s))| (s, Ob(i as u32))).collect();
        let ida1 = cc.a_cat().id(a1);
        let mut z_mors: Vec<(Mor, Ob, Ob)> = Vec::new();
        for (i, &(g1, s1)) in members.iter().enumerate() {
            for (k, &(g2, s2)) in members.iter().enumerate() {
                for &u in cc.base.hom(g1, g2) {
                    if cc.parts(u).0 == ida1 && cc.base.compose(s2, u) == s1 {
                        let m = b.add_morphism(
                            format!("{}@{}", cc.base.mor_name(u), cc.base.mor_name(s2)),
                            Ob(i as u32),
                            Ob(k as u32),
                        );
                        debug_assert_eq!(m.ix(), z_mors.len());
                        z_mors.push((u, Ob(i as u32), Ob(k as u32)));
                    }
                }
            }
        }
        let lookup: HashMap<(Mor, Ob, Ob), Mor> =
            z_mors.iter().enumerate().map(|(i, &key)| (key, Mor(i as u32))).collect();
        for (i, &(g1, _)) in members.iter().enumerate() {
            let id = lookup[&(cc.base.id(g1), Ob(i as u32), Ob(i as u32))];
            b.set_identity(Ob(i as u32), id);
        }
        for (m1, &(u1, s, t)) in z_mors.iter().enumerate() {
            for (m2, &(u2, s2, t2)) in z_mors.iter().enumerate() {
                if s2 == t {
                    let h = lookup[&(cc.base.compose(u2, u1), s, t2)];
                    b.set_composite(Mor(m2 as u32), Mor(m1 as u32), h);
                }
            }
        }
        let index = Arc::new(b.build()?);
        let functor = FunctorData::new(
            "zeta",
            index.clone(),
            cc.base.clone(),
            members.iter().map(|&(g, _)| g).collect(),
            z_mors.iter().map(|&(u, _, _)| u).collect(),
        )?;
        let c = cc.c_cat();
        let t_obj = cc
            .object_of(a1, self.b, c.compose(self.phi, cc.left.mor(fm)))
            .expect("identity completion is a comma object");
        let t_s = cc
            .morphism_of(t_obj, self.object, fm, cb.id(self.b))
            .expect("identity completion square");
        Ok(ZetaDiagram { diagram: Diagram::new(functor)?, terminal: by_s[&t_s], members })
    }

    /// τ_F(f) = lim ζ_{f,F}. Among tied terminal cones the first whose leg
    /// to the identity completion has first component id is chosen, so
    /// Forget₁(τ_F(f)) = a' strictly.
    pub fn tau(&self, f: Ob) -> Result<TauValue> {
        let cc = &self.comma;
        let zeta = self.zeta_diagram(f)?;
        let lim = limit(&zeta.diagram)?.ok_or_else(|| Error::MissingLimit {
            at: format!("ζ({},{})", self.slice_a.base.ob_name(f), cc.base.ob_name(self.object)),
        })?;
        let (a1, _) = self.slice_mor(f)?;
        let ida1 = cc.a_cat().id(a1);
        let t = zeta.terminal.ix();
        let cone = std::iter::once(&lim.cone)
            .chain(lim.ties.iter())
            .find(|k| cc.parts(k.legs[t]).0 == ida1)
            .cloned()
            .ok_or_else(|| Error::MissingLimit {
                at: format!("no limit of ζ({}) over a'", self.slice_a.base.ob_name(f)),
            })?;
        let x = cone.apex;
        let p = cc.provenance(x);
        let g = cc.parts(cone.legs[t]).1;
        Ok(TauValue {
            slice_object: f,
            comma_object: x,
            psi: p.phi,
            b_prime: p.b,
            g,
            zeta,
            limit: lim,
            cone,
        })
    }

    pub fn tau_all(&self) -> Result<Vec<TauValue>> {
        self.slice_a.base.objects().map(|f| self.tau(f)).collect()
    }

    /// τ_F on a slice morphism h: f₁ → f₂: every completion (G₂, (f₂, g₂))
    /// of f₂ pulls back to the completion (G₂∘αh, (f₁, g₂)) of f₁; pushing
    /// the τ_F(f₁) cone forward along (h, id) gives a cone over ζ_{f₂}, and
    /// the mediator into τ_F(f₂) is τ_F(h).
    fn tau_on_morphism(&self, h: Mor, values: &[TauValue]) -> Result<Mor> {
        let cc = &self.comma;
        let (ca, cb, c) = (cc.a_cat(), cc.b_cat(), cc.c_cat());
        let sl = &self.slice_a;
        let (f1, f2) = (sl.base.dom(h), sl.base.cod(h));
        let hm = sl.parts(h).0;
        let (v1, v2) = (&values[f1.ix()], &values[f2.ix()]);
        let z1: HashMap<Mor, usize> = v1.zeta.members.iter().enumerate().map(|(i, &(_, s))| (s, i)).collect();
        let (_, fm1) = self.slice_mor(f1)?;
        let mut legs = Vec::with_capacity(v2.zeta.members.len());
        for &(g2, s2) in &v2.zeta.members {
            let p2 = cc.provenance(g2);
            let g2b = cc.parts(s2).1;
            let lifted = cc
                .object_of(ca.dom(hm), p2.b, c.compose(p2.phi, cc.left.mor(hm)))
                .expect("lifted completion");
            let s_lift = cc.morphism_of(lifted, self.object, fm1, g2b).expect("lifted square");
            let leg1 = v1.cone.legs[z1[&s_lift]];
            let push = cc.morphism_of(lifted, g2, hm, cb.id(p2.b)).expect("push square");
            legs.push(cc.base.compose(push, leg1));
        }
        let pushed = Cone { apex: v1.comma_object, legs };
        unique_mediator(&cc.base, &pushed, &v2.cone).ok_or_else(|| Error::MissingLimit {
            at: format!("mediator for {}", sl.base.mor_name(h)),
        })
    }

    /// τ_F: slice(A, a) → Comma(α, β), validated.
    pub fn tau_functor(&self) -> Result<(FunctorData, Vec<TauValue>)> {
        let values = self.tau_all()?;
        let sl = &self.slice_a;
        let mors = sl.base.morphisms().map(|h| self.tau_on_morphism(h, &values)).collect::<Result<Vec<_>>>()?;
        let obs = values.iter().map(|v| v.comma_object).collect();
        let f = FunctorData::new(
            format!("tau[{}]", self.comma.base.ob_name(self.object)),
            sl.base.clone(),
            self.comma.base.clone(),
            obs,
            mors,
        )?;
        Ok((f, values))
    }

    /// bar-τ_F into Comma(Forget₂, b) and Dyn_F = Restrict∘bar-τ_F. With
    /// `ur` the inclusion into UR is built and Forget₁∘incl∘bar-τ = τ is
    /// checked as well.
    pub fn bar_tau_and_dyn(&self, ur: Option<&CommaCategory>) -> Result<BarTauDyn> {
        let cc = &self.comma;
        let (tau, values) = self.tau_functor()?;
        let fiber = comma_fiber(cc, self.b, ur)?;
        let sl = &self.slice_a;
        let star = Ob(0);
        let obs: Vec<Ob> = values
            .iter()
            .map(|v| fiber.fiber.object_of(v.comma_object, star, v.g).expect("fiber object"))
            .collect();
        let mut mors = Vec::with_capacity(sl.base.morphism_count());
        for h in sl.base.morphisms() {
            let (s, t) = (sl.base.dom(h), sl.base.cod(h));
            let m = fiber
                .fiber
                .morphism_of(obs[s.ix()], obs[t.ix()], tau.mor(h), Mor(0))
                .ok_or_else(|| Error::SquareDoesNotCommute {
                    at: format!("bar-tau on {}", sl.base.mor_name(h)),
                })?;
            mors.push(m);
        }
        let bar_tau = FunctorData::new("barTau", sl.base.clone(), fiber.fiber.base.clone(), obs, mors)?;
        let dyn_f = fiber.restrict.after(&bar_tau)?.with_name(format!("Dyn[{}]", cc.base.ob_name(self.object)));
        let mut checks = Vec::new();
        let lhs = cc.forget1.after(&tau)?;
        checks.push(("Forget1∘tau = Forget1[slice]".to_string(), lhs.same_as(&sl.forget1)));
        let lhs = fiber.slice.forget1.after(&dyn_f)?;
        let rhs = cc.forget2.after(&tau)?;
        checks.push(("Forget1[slice B]∘Dyn = Forget2∘tau".to_string(), lhs.same_as(&rhs)));
        if let (Some(incl), Some(ur)) = (&fiber.inclusion, ur) {
            let lhs = ur.forget1.after(&incl.after(&bar_tau)?)?;
            checks.push(("Forget1[UR]∘incl∘barTau = tau".to_string(), lhs.same_as(&tau)));
        }
        Ok(BarTauDyn { tau, bar_tau, dyn_f, fiber, values, checks })
    }

    /// Mediators φ: b' → b'' with βφ∘τ_F(f) = F̃ and g''∘φ = g'.
    pub fn verify_universal_square(&self, f: Ob, b2: Ob, g2: Mor, ftilde: Mor) -> Result<UniversalReport> {
        let cc = &self.comma;
        let (cb, c) = (cc.b_cat(), cc.c_cat());
        let (a1, fm) = self.slice_mor(f)?;
        if cb.dom(g2) != b2 || cb.cod(g2) != self.b {
            return Err(Error::NotASquare { detail: format!("g'' = {} does not run b'' → b", cb.mor_name(g2)) });
        }
        if c.dom(ftilde) != cc.left.ob(a1) || c.cod(ftilde) != cc.right.ob(b2) {
            return Err(Error::NotASquare { detail: format!("F~ = {} does not run αa' → βb''", c.mor_name(ftilde)) });
        }
        if c.compose(cc.right.mor(g2), ftilde) != c.compose(self.phi, cc.left.mor(fm)) {
            return Err(Error::NotASquare { detail: "βg''∘F~ ≠ F∘αf".into() });
        }
        let t = self.tau(f)?;
        let meds: Vec<Mor> = cb
            .hom(t.b_prime, b2)
            .iter()
            .copied()
            .filter(|&m| c.compose(cc.right.mor(m), t.psi) == ftilde && cb.compose(g2, m) == t.g)
            .collect();
        Ok(UniversalReport {
            mediators: meds.iter().map(|&m| cb.mor_name(m).to_string()).collect(),
            exists: !meds.is_empty(),
            unique: meds.len() == 1,
        })
    }

    /// Every candidate (b'', g'', F̃) over f that forms a commuting square.
    pub fn candidate_squares(&self, f: Ob) -> Result<Vec<(Ob, Mor, Mor)>> {
        let cc = &self.comma;
        let (cb, c) = (cc.b_cat(), cc.c_cat());
        let (a1, fm) = self.slice_mor(f)?;
        let target = c.compose(self.phi, cc.left.mor(fm));
        let mut out = Vec::new();
        for b2 in cb.objects() {
            for &g2 in cb.hom(b2, self.b) {
                for &ft in c.hom(cc.left.ob(a1), cc.right.ob(b2)) {
                    if c.compose(cc.right.mor(g2), ft) == target {
                        out.push((b2, g2, ft));
                    }
                }
            }
        }
        Ok(out)
    }

    /// is_epi of τ_F(f), gated on A3.
    pub fn check_tau_epi(&self, f: Ob, a3_holds: bool, with_trace: bool) -> Result<EpiReport> {
        if !a3_holds {
            return Ok(EpiReport { verdict: EpiVerdict::Unsupported, psi: None, pairs_checked: 0, trace: vec![] });
        }
        let c = self.comma.c_cat();
        let t = self.tau(f)?;
        let psi = t.psi;
        let verdict = if c.is_epi(psi) { EpiVerdict::Epi } else { EpiVerdict::NotEpi };
        let mut trace = Vec::new();
        let mut pairs_checked = 0;
        if with_trace {
            let y = c.cod(psi);
            for z in c.objects() {
                let hom = c.hom(y, z);
                for (i, &u) in hom.iter().enumerate() {
                    for &v in &hom[i + 1..] {
                        pairs_checked += 1;
                        if c.compose(u, psi) != c.compose(v, psi) {
                            continue;
                        }
                        let eq = equalizer(c, u, v)?;
                        let (leg, mono, factors) = match &eq {
                            Some(e) => (
                                Some(c.mor_name(e.leg).to_string()),
                                e.leg_is_mono,
                                c.hom(c.dom(psi), c.dom(e.leg)).iter().any(|&m| c.compose(e.leg, m) == psi),
                            ),
                            None => (None, false, false),
                        };
                        trace.push(EqualizerStep {
                            u: c.mor_name(u).to_string(),
                            v: c.mor_name(v).to_string(),
                            leg,
                            leg_is_mono: mono,
                            psi_factors: factors,
                        });
                    }
                }
            }
        }
        Ok(EpiReport { verdict, psi: Some(c.mor_name(psi).to_string()), pairs_checked, trace })
    }

    /// Second route: γ_F(d) = lim U over (d ↓ DL-projection) with d = MapC(f),
    /// compared with τ_F(f) through the embedding z ↦ (z, id_d). Returns the
    /// canonical mediator from the route-2 apex to τ_F(f) and whether it is
    /// an iso.
    pub fn tau_via_limpre(&self, f: Ob, route: &LimPreRoute) -> Result<(Ob, Mor, bool)> {
        let cc = &self.comma;
        let t = self.tau(f)?;
        let mapc = map_c(cc, self.object, &self.slice_a, &route.dl)?;
        let d = mapc.ob(f);
        let pre = pre_diagram_under(&route.dl_proj, &route.u, d)?;
        let lim2 = limit(&pre.diagram)?.ok_or_else(|| Error::MissingLimit {
            at: format!("LimPre at {}", route.dl.base.ob_name(d)),
        })?;
        let idd = route.dl.base.id(d);
        // Restrict the route-2 cone to Z(f, F) and mediate into τ_F(f).
        let mut legs = Vec::with_capacity(t.zeta.members.len());
        for &(_, s) in &t.zeta.members {
            let k = pre.index.object_of(Ob(0), route.arrow_object(s), idd).ok_or_else(|| {
                Error::MissingLimit { at: format!("embedding of {}", cc.base.mor_name(s)) }
            })?;
            legs.push(lim2.cone.legs[k.ix()]);
        }
        let restricted = Cone { apex: lim2.cone.apex, legs };
        let m = unique_mediator(&cc.base, &restricted, &t.cone).ok_or_else(|| Error::MissingLimit {
            at: "canonical mediator between the two routes".into(),
        })?;
        Ok((lim2.cone.apex, m, cc.base.is_iso(m)))
    }
}

/// Data for the second τ route, shared by all F and f of one comma category.
#[derive(Clone, Debug)]
pub struct LimPreRoute {
    pub arrow: CommaCategory,
    pub dl: CommaCategory,
    pub dl_proj: FunctorData,
    pub u: FunctorData,
    arrow_by_morphism: Vec<Ob>,
}

impl LimPreRoute {
    pub fn new(cc: &CommaCategory) -> Result<LimPreRoute> {
        let arrow = arrow_category(&cc.base)?;
        let (dl, _) = corner_categories(cc)?;
        // DL projection out of Arr(cc): s: G₁ → G₂ ↦ (a₁, G₂, u₁).
        let mut obs = Vec::new();
        for s in arrow.base.objects() {
            let p = arrow.provenance(s);
            let (u1, _) = cc.parts(p.phi);
            obs.push(dl.object_of(cc.provenance(p.a).a, p.b, u1).expect("DL object"));
        }
        let mut mors = Vec::new();
        for m in arrow.base.morphisms() {
            let (p, q) = arrow.parts(m);
            let (s, t) = (arrow.base.dom(m), arrow.base.cod(m));
            mors.push(dl.morphism_of(obs[s.ix()], obs[t.ix()], cc.forget1.mor(p), q).expect("DL morphism"));
        }
        let dl_proj = FunctorData::new("DL", arrow.base.clone(), dl.base.clone(), obs, mors)?;
        let u = arrow.forget1.clone().with_name("U");
        let mut arrow_by_morphism = vec![Ob(0); cc.base.morphism_count()];
        for s in arrow.base.objects() {
            arrow_by_morphism[arrow.provenance(s).phi.ix()] = s;
        }
        Ok(LimPreRoute { arrow, dl, dl_proj, u, arrow_by_morphism })
    }

    /// The arrow-category object of a comma morphism.
    pub fn arrow_object(&self, s: Mor) -> Ob {
        self.arrow_by_morphism[s.ix()]
    }
}

/// Checks A1–A5 for the cospan of `cc`, reading ι as β and Y as C.
pub fn check_assumptions(cc: &CommaCategory, probe: usize) -> Result<AssumptionReport> {
    let (ca, cb, c) = (cc.a_cat(), cc.b_cat(), cc.c_cat());
    let iota = &cc.right;
    let iota_setup = cc.left.same_as(&cc.right);

    let flags = iota.flags();
    let a1 = if !flags.injective_on_objects {
        AssumptionCheck::fail("ι is not injective on objects")
    } else {
        match (cb.find_initial(), c.find_initial()) {
            (None, _) => AssumptionCheck::fail(format!("{} has no initial object", cb.name())),
            (_, None) => AssumptionCheck::fail(format!("{} has no initial object", c.name())),
            (Some(z), Some(_)) if flags.maps_initial_to_initial != Some(true) => {
                AssumptionCheck::fail(format!("ι({}) is not initial", cb.ob_name(z)))
            }
            _ => AssumptionCheck::pass(),
        }
    };

    let a2 = (|| -> Result<AssumptionCheck> {
        for cat in [ca, cb] {
            let r = probe_completeness(cat, probe)?;
            if !r.complete {
                return Ok(AssumptionCheck::fail(format!(
                    "{} has no limit for {}",
                    cat.name(),
                    serde_json::to_string(&r.witness).unwrap_or_default()
                )));
            }
        }
        let r = is_limit_preserving(&cc.right, probe)?;
        if !r.preserving {
            return Ok(AssumptionCheck::fail(format!(
                "β does not preserve the limit of {}",
                serde_json::to_string(&r.witness).unwrap_or_default()
            )));
        }
        let Some(z) = ca.find_initial() else {
            return Ok(AssumptionCheck::fail(format!("{} has no initial object", ca.name())));
        };
        if c.find_initial().is_none() {
            return Ok(AssumptionCheck::fail(format!("{} has no initial object", c.name())));
        }
        if cc.left.flags().maps_initial_to_initial != Some(true) {
            return Ok(AssumptionCheck::fail(format!("α({}) is not initial", ca.ob_name(z))));
        }
        Ok(AssumptionCheck::pass())
    })()?;

    // Monos f of Y factor as ι(h)∘g with h in X and g an iso of Y.
    let a3 = {
        let mut w = None;
        for f in c.morphisms() {
            if !c.is_mono(f) {
                continue;
            }
            let found = cb.morphisms().any(|h| {
                let ih = iota.mor(h);
                c.cod(ih) == c.cod(f)
                    && c.hom(c.dom(f), c.dom(ih)).iter().any(|&g| c.is_iso(g) && c.compose(ih, g) == f)
            });
            if !found {
                w = Some(format!("mono {} has no factorization ι(h)∘iso", c.mor_name(f)));
                break;
            }
        }
        w.map_or_else(AssumptionCheck::pass, AssumptionCheck::fail)
    };

    let a4 = cb
        .morphisms()
        .find(|&h| !c.is_mono(iota.mor(h)))
        .map_or_else(AssumptionCheck::pass, |h| {
            AssumptionCheck::fail(format!("ι({}) = {} is not mono", cb.mor_name(h), c.mor_name(iota.mor(h))))
        });

    let a5 = c.balanced_witness().map_or_else(AssumptionCheck::pass, |f| {
        AssumptionCheck::fail(format!("{} is mono and epi but not iso", c.mor_name(f)))
    });

    Ok(AssumptionReport { probe, iota_setup, a1, a2, a3, a4, a5 })
}

/// Theorem 4 at one slice object: the unique φ with β(φ)∘τ_{F'F}(f) =
/// τ_{F'}(g_F)∘τ_F(f) and g₂∘φ = g'' where τ_{F'F}(f) has codomain data
/// (b'', g''). Returns φ and whether it is an iso.
pub fn composition_mediator(
    first: &InducedSetup,
    second: &InducedSetup,
    composite: &InducedSetup,
    f: Ob,
) -> Result<(Mor, bool)> {
    let cc = &first.comma;
    let (cb, c) = (cc.b_cat(), cc.c_cat());
    let t1 = first.tau(f)?;
    let g_obj = second
        .slice_a
        .object_of(t1.b_prime, Ob(0), t1.g)
        .ok_or_else(|| Error::UnknownObject { id: "Dyn_F(f) in the next slice".into() })?;
    let t2 = second.tau(g_obj)?;
    let t12 = composite.tau(f)?;
    let route = c.compose(t2.psi, t1.psi);
    let meds: Vec<Mor> = cb
        .hom(t12.b_prime, t2.b_prime)
        .iter()
        .copied()
        .filter(|&m| c.compose(cc.right.mor(m), t12.psi) == route && cb.compose(t2.g, m) == t12.g)
        .collect();
    match meds.as_slice() {
        [m] => Ok((*m, cb.is_iso(*m))),
        _ => Err(Error::MissingLimit { at: format!("{} composition mediators", meds.len()) }),
    }
}

/// Dyn over a comma category of ι with itself: one slice per object of X, one
/// Dyn_F per comma object, and the composition isomorphisms.
#[derive(Clone, Debug)]
pub struct DynGlobal {
    pub report: AssumptionReport,
    pub dyn_functors: Vec<FunctorData>,
    pub compositions: Vec<CompositionWitness>,
}

#[derive(Clone, Debug)]
pub struct CompositionWitness {
    pub first: Ob,
    pub second: Ob,
    pub composite: Ob,
    /// Dyn_{F'∘F} ⇒ Dyn_{F'}∘Dyn_F, components in the target slice.
    pub transformation: NatTransData,
    pub is_iso: bool,
}

/// Dyn on Comma(ι, ι), gated on A1, A4 and A5.
pub fn dyn_global(cc: &Arc<CommaCategory>, probe: usize) -> Result<DynGlobal> {
    if !cc.left.same_as(&cc.right) {
        return Err(Error::SourceMismatch { left: cc.left.name().to_string(), right: cc.right.name().to_string() });
    }
    let report = check_assumptions(cc, probe)?;
    let failed = report.failed(&["A1", "A4", "A5"]);
    if !failed.is_empty() {
        return Err(Error::AssumptionFailure { failed });
    }
    let setups: Vec<InducedSetup> =
        cc.base.objects().map(|x| InducedSetup::new(cc.clone(), x)).collect::<Result<_>>()?;
    let dyns: Vec<BarTauDyn> = setups.iter().map(|s| s.bar_tau_and_dyn(None)).collect::<Result<_>>()?;
    let c = cc.c_cat();
    let mut compositions = Vec::new();
    for x in cc.base.objects() {
        let px = cc.provenance(x);
        for y in cc.base.objects() {
            let py = cc.provenance(y);
            if py.a != px.b {
                continue;
            }
            let z = cc.object_of(px.a, py.b, c.compose(py.phi, px.phi)).expect("composite comma object");
            let (s1, s2, s12) = (&setups[x.ix()], &setups[y.ix()], &setups[z.ix()]);
            let target_slice = &s12.slice_b;
            let mut comps = Vec::new();
            for f in s1.slice_a.base.objects() {
                let (m, _) = composition_mediator(s1, s2, s12, f)?;
                let src = dyns[z.ix()].dyn_f.ob(f);
                let mid = dyns[x.ix()].dyn_f.ob(f);
                let dst = dyns[y.ix()].dyn_f.ob(mid);
                comps.push(
                    target_slice
                        .morphism_of(src, dst, m, Mor(0))
                        .ok_or_else(|| Error::NotNatural { at: format!("component at {}", s1.slice_a.base.ob_name(f)) })?,
                );
            }
            let composed = dyns[y.ix()].dyn_f.after(&dyns[x.ix()].dyn_f)?;
            let nt = NatTransData::new(dyns[z.ix()].dyn_f.clone(), composed, comps)?;
            let is_iso = nt.is_iso();
            compositions.push(CompositionWitness { first: x, second: y, composite: z, transformation: nt, is_iso });
        }
    }
    Ok(DynGlobal { report, dyn_functors: dyns.into_iter().map(|d| d.dyn_f).collect(), compositions })
}

/// Reads the α-side object of each Dyn_F image as an X object, for the
/// power-set instance where objects are subsets.
pub fn dyn_images(bt: &BarTauDyn) -> Vec<Ob> {
    bt.dyn_f.object_map().iter().map(|&y| bt.fiber.slice.provenance(y).a).collect()
}

/// Whether two categories coincide; re-exported for callers comparing slices.
pub fn same(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    same_category(a, b)
}

/// Comma(ι, ι) for an inclusion functor, shared by the CLI and tests.
pub fn iota_comma(iota: &FunctorData) -> Result<Arc<CommaCategory>> {
    Ok(Arc::new(comma(iota, iota)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{inclusion_iota, universe_from_arg};

    fn setup(u: &str) -> (crate::instances::Iota, Arc<CommaCategory>) {
        let iota = inclusion_iota(&universe_from_arg(u)).unwrap();
        let cc = iota_comma(&iota.functor).unwrap();
        (iota, cc)
    }

    #[test]
    fn dyn_is_direct_image_on_ab() {
        let (iota, cc) = setup("ab");
        for x in cc.base.objects() {
            let s = InducedSetup::new(cc.clone(), x).unwrap();
            let bt = s.bar_tau_and_dyn(None).unwrap();
            assert!(bt.checks.iter().all(|c| c.1), "{:?}", bt.checks);
            for (f, img) in dyn_images(&bt).into_iter().enumerate() {
                let a = s.slice_a.provenance(Ob(f as u32)).a.0;
                assert_eq!(img.0, iota.finset.image(s.phi, a));
            }
        }
    }

    #[test]
    fn tau_keeps_domain_and_is_universal() {
        let (_, cc) = setup("ab");
        for x in cc.base.objects() {
            let s = InducedSetup::new(cc.clone(), x).unwrap();
            for f in s.slice_a.base.objects() {
                let t = s.tau(f).unwrap();
                assert_eq!(cc.provenance(t.comma_object).a, s.slice_a.provenance(f).a);
                for (b2, g2, ft) in s.candidate_squares(f).unwrap() {
                    assert!(s.verify_universal_square(f, b2, g2, ft).unwrap().unique);
                }
            }
        }
    }

    #[test]
    fn non_square_candidate_rejected() {
        let (iota, cc) = setup("ab");
        let fs = &iota.finset;
        // F: {a,b} → {a,b} constant a; candidate B'' = {b} cannot contain F(A).
        let full = Ob(3);
        let phi = fs.function(full, full, &[0, 0]).unwrap();
        let x = cc.object_of(full, full, phi).unwrap();
        let s = InducedSetup::new(cc.clone(), x).unwrap();
        let f = s.slice_a.object_of(full, Ob(0), iota.powerset.id(full)).unwrap();
        let b2 = Ob(2);
        let g2 = iota.powerset.hom(b2, full)[0];
        let ft = fs.cat.hom(full, b2)[0];
        assert!(matches!(s.verify_universal_square(f, b2, g2, ft), Err(Error::NotASquare { .. })));
    }

    #[test]
    fn assumptions_on_powerset_instance() {
        let (_, cc) = setup("ab");
        let r = check_assumptions(&cc, 3).unwrap();
        assert!(r.a1.holds && r.a3.holds && r.a4.holds && r.a5.holds, "{r:?}");
        assert!(!r.a2.holds);
    }

    #[test]
    fn dyn_global_composition_isos() {
        let (_, cc) = setup("ab");
        let g = dyn_global(&cc, 2).unwrap();
        assert!(!g.compositions.is_empty());
        assert!(g.compositions.iter().all(|c| c.is_iso));
    }

    #[test]
    fn dyn_global_gated_at_one_point() {
        let (_, cc) = setup("a");
        match dyn_global(&cc, 2) {
            Err(Error::AssumptionFailure { failed }) => assert_eq!(failed, vec!["A5".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn routes_agree_on_one_point() {
        let (_, cc) = setup("a");
        let route = LimPreRoute::new(&cc).unwrap();
        for x in cc.base.objects() {
            let s = InducedSetup::new(cc.clone(), x).unwrap();
            for f in s.slice_a.base.objects() {
                assert!(s.tau_via_limpre(f, &route).unwrap().2);
            }
        }
    }
}
