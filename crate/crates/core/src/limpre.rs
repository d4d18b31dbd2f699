//! Pointwise Kan extensions over slices, limit preservation, and the orbit
//! functor of a finite dynamical system.
//!
//! For F: X → Y and G: X → Z, `lim_pre` sends y to the limit of G over the
//! under-slice (y ↓ F), which is the pointwise right Kan extension of G along
//! F. `colim_pre` takes the colimit over the over-slice (F ↓ y), the left Kan
//! extension. The literal over-slice diagram is still available through
//! [`pre_diagram`].

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;

use crate::category::{FinCategory, Mor, Ob};
use crate::constructions::{comma, product_category, CommaCategory};
use crate::error::{Error, Result};
use crate::functor::{same_category, FunctorData};
use crate::instances::{discrete_category, powerset_preorder, DynSystemData, TimeWord};
use crate::limits::{
    colimit, for_each_functor, is_limit_cone, limit, map_cone, small_categories, unique_mediator, Cone,
    Diagram, DiagramWitness, LimitResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SliceSide {
    /// Comma(F, y): objects F(x) → y.
    Over,
    /// Comma(y, F): objects y → F(x).
    Under,
}

#[derive(Clone, Debug)]
pub struct PreDiagram {
    pub side: SliceSide,
    pub y: Ob,
    pub index: CommaCategory,
    pub diagram: Diagram,
}

fn check_span(f: &FunctorData, g: &FunctorData) -> Result<()> {
    if !same_category(f.source(), g.source()) {
        return Err(Error::SourceMismatch { left: f.name().to_string(), right: g.name().to_string() });
    }
    Ok(())
}

fn check_object(cat: &FinCategory, y: Ob) -> Result<()> {
    if y.ix() >= cat.object_count() {
        return Err(Error::UnknownObject { id: format!("#{}", y.0) });
    }
    Ok(())
}

/// G∘Forget₁ on Comma(F, y).
pub fn pre_diagram(f: &FunctorData, g: &FunctorData, y: Ob) -> Result<PreDiagram> {
    check_span(f, g)?;
    check_object(f.target(), y)?;
    let index = comma(f, &FunctorData::select(f.target(), y))?;
    let functor = g.after(&index.forget1)?;
    Ok(PreDiagram { side: SliceSide::Over, y, diagram: Diagram::new(functor)?, index })
}

/// G∘Forget₂ on Comma(y, F).
pub fn pre_diagram_under(f: &FunctorData, g: &FunctorData, y: Ob) -> Result<PreDiagram> {
    check_span(f, g)?;
    check_object(f.target(), y)?;
    let index = comma(&FunctorData::select(f.target(), y), f)?;
    let functor = g.after(&index.forget2)?;
    Ok(PreDiagram { side: SliceSide::Under, y, diagram: Diagram::new(functor)?, index })
}

/// A pointwise Kan extension with the per-object limit data behind it.
#[derive(Clone, Debug)]
pub struct KanExtension {
    pub functor: FunctorData,
    pub pre: Vec<PreDiagram>,
    pub limits: Vec<LimitResult>,
}

/// y ↦ lim (G over (y ↓ F)); ψ: y → y' acts by the mediator from the
/// restricted cone. Functoriality is revalidated.
pub fn lim_pre(f: &FunctorData, g: &FunctorData) -> Result<KanExtension> {
    check_span(f, g)?;
    let (y_cat, z_cat) = (f.target().clone(), g.target().clone());
    let mut pre = Vec::with_capacity(y_cat.object_count());
    let mut limits = Vec::with_capacity(y_cat.object_count());
    for y in y_cat.objects() {
        let p = pre_diagram_under(f, g, y)?;
        let l = limit(&p.diagram)?.ok_or_else(|| Error::MissingLimit { at: y_cat.ob_name(y).to_string() })?;
        pre.push(p);
        limits.push(l);
    }
    let mut mors = Vec::with_capacity(y_cat.morphism_count());
    for psi in y_cat.morphisms() {
        let (y, y2) = (y_cat.dom(psi), y_cat.cod(psi));
        // (x, h: y2 → Fx) ↦ (x, h∘ψ) embeds (y2 ↓ F) into (y ↓ F).
        let (src, dst) = (&pre[y.ix()], &pre[y2.ix()]);
        let legs = dst
            .index
            .base
            .objects()
            .map(|k| {
                let p = dst.index.provenance(k);
                let at = src
                    .index
                    .object_of(Ob(0), p.b, y_cat.compose(p.phi, psi))
                    .expect("precomposed slice object");
                limits[y.ix()].cone.legs[at.ix()]
            })
            .collect();
        let restricted = Cone { apex: limits[y.ix()].cone.apex, legs };
        let m = unique_mediator(&z_cat, &restricted, &limits[y2.ix()].cone)
            .ok_or_else(|| Error::MissingLimit { at: format!("mediator for {}", y_cat.mor_name(psi)) })?;
        mors.push(m);
    }
    let obs = limits.iter().map(|l| l.cone.apex).collect();
    let functor = FunctorData::new(format!("Ran[{}]{}", f.name(), g.name()), y_cat, z_cat, obs, mors)?;
    Ok(KanExtension { functor, pre, limits })
}

/// y ↦ colim (G over (F ↓ y)); ψ: y → y' acts by the mediator out of the
/// colimit into the restricted cocone. Functoriality is revalidated.
pub fn colim_pre(f: &FunctorData, g: &FunctorData) -> Result<KanExtension> {
    check_span(f, g)?;
    let (y_cat, z_cat) = (f.target().clone(), g.target().clone());
    let mut pre = Vec::with_capacity(y_cat.object_count());
    let mut limits = Vec::with_capacity(y_cat.object_count());
    for y in y_cat.objects() {
        let p = pre_diagram(f, g, y)?;
        let l = colimit(&p.diagram)?.ok_or_else(|| Error::MissingLimit { at: y_cat.ob_name(y).to_string() })?;
        pre.push(p);
        limits.push(l);
    }
    let mut mors = Vec::with_capacity(y_cat.morphism_count());
    for psi in y_cat.morphisms() {
        let (y, y2) = (y_cat.dom(psi), y_cat.cod(psi));
        // (x, h: Fx → y) ↦ (x, ψ∘h) embeds (F ↓ y) into (F ↓ y2).
        let (src, dst) = (&pre[y.ix()], &pre[y2.ix()]);
        let legs: Vec<Mor> = src
            .index
            .base
            .objects()
            .map(|k| {
                let p = src.index.provenance(k);
                let at = dst
                    .index
                    .object_of(p.a, Ob(0), y_cat.compose(psi, p.phi))
                    .expect("postcomposed slice object");
                limits[y2.ix()].cone.legs[at.ix()]
            })
            .collect();
        let from = &limits[y.ix()].cone;
        let m = z_cat
            .hom(from.apex, limits[y2.ix()].cone.apex)
            .iter()
            .copied()
            .filter(|&m| from.legs.iter().zip(&legs).all(|(&l, &k)| z_cat.compose(m, l) == k))
            .collect::<Vec<_>>();
        if m.len() != 1 {
            return Err(Error::MissingLimit { at: format!("mediator for {}", y_cat.mor_name(psi)) });
        }
        mors.push(m[0]);
    }
    let obs = limits.iter().map(|l| l.cone.apex).collect();
    let functor = FunctorData::new(format!("Lan[{}]{}", f.name(), g.name()), y_cat, z_cat, obs, mors)?;
    Ok(KanExtension { functor, pre, limits })
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub functor: String,
    pub probe: usize,
    pub diagrams_checked: usize,
    pub diagrams_with_limit: usize,
    pub preserving: bool,
    pub witness: Option<DiagramWitness>,
}

/// For every diagram D from an index category of size ≤ `probe` that has a
/// limit, checks that H(lim D) is a limit of H∘D.
pub fn is_limit_preserving(h: &FunctorData, probe: usize) -> Result<PreservationReport> {
    let mut diagrams_checked = 0;
    let mut diagrams_with_limit = 0;
    let mut witness = None;
    let mut err = None;
    for j in small_categories(probe) {
        for_each_functor(&j, h.source(), |d| {
            diagrams_checked += 1;
            let dd = Diagram { functor: d };
            let outcome = (|| -> Result<bool> {
                let Some(l) = limit(&dd)? else { return Ok(true) };
                diagrams_with_limit += 1;
                let hd = Diagram::new(h.after(&dd.functor)?)?;
                is_limit_cone(&hd, &map_cone(h, &l.cone))
            })();
            match outcome {
                Ok(true) => ControlFlow::Continue(()),
                Ok(false) => {
                    witness = Some(dd.witness());
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
    Ok(PreservationReport {
        functor: h.name().to_string(),
        probe,
        diagrams_checked,
        diagrams_with_limit,
        preserving: witness.is_none(),
        witness,
    })
}

// ---------------------------------------------------------------------------
// Orbits

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KanSide {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct OrbitFunctor {
    pub lattice: Arc<FinCategory>,
    pub functor: FunctorData,
    pub time: Vec<TimeWord>,
    /// Aggregation rounds needed per subset to reach the fixpoint.
    pub rounds: Vec<usize>,
}

impl OrbitFunctor {
    pub fn orbit(&self, mask: u32) -> u32 {
        self.functor.ob(Ob(mask)).0
    }
}

/// One left-Kan aggregation step along proj₁: 2^Ω × T → 2^Ω. The comma
/// (proj₁ ↓ S) has objects (S', t) with S' ⊆ S; its colimit in the lattice is
/// the join of the Φ^t(S').
pub fn lan_step(time: &[TimeWord], mask: u32) -> u32 {
    let mut acc = 0;
    let mut sub = mask;
    loop {
        for t in time {
            acc |= DynSystemData::image(&t.map, sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    acc
}

/// The orbit functor 2^Ω → 2^Ω: the left-Kan aggregation iterated to its
/// fixpoint. Revalidated as a functor.
pub fn orbit_functor(sys: &DynSystemData) -> Result<OrbitFunctor> {
    let lattice = Arc::new(powerset_preorder(&sys.omega)?);
    orbit_functor_on(sys, &lattice)
}

/// As [`orbit_functor`], reusing a prebuilt power-set lattice of `sys.omega`.
pub fn orbit_functor_on(sys: &DynSystemData, lattice: &Arc<FinCategory>) -> Result<OrbitFunctor> {
    let time = sys.time_words();
    let n = 1u32 << sys.omega.len();
    if lattice.object_count() != n as usize {
        return Err(Error::TargetMismatch { left: lattice.name().to_string(), right: "2^Ω".into() });
    }
    let mut obs = Vec::with_capacity(n as usize);
    let mut rounds = Vec::with_capacity(n as usize);
    for s in 0..n {
        let mut cur = s;
        let mut r = 0;
        loop {
            let next = lan_step(&time, cur);
            r += 1;
            if next == cur {
                break;
            }
            cur = next;
        }
        obs.push(Ob(cur));
        rounds.push(r);
    }
    let mut mors = Vec::with_capacity(lattice.morphism_count());
    for f in lattice.morphisms() {
        let (s, t) = (obs[lattice.dom(f).ix()], obs[lattice.cod(f).ix()]);
        let m = lattice.hom(s, t).first().copied().ok_or_else(|| Error::NotCompositionPreserving {
            g: lattice.mor_name(f).to_string(),
            f: "monotonicity".into(),
        })?;
        mors.push(m);
    }
    let functor = FunctorData::new("Orbit", lattice.clone(), lattice.clone(), obs, mors)?;
    Ok(OrbitFunctor { lattice: lattice.clone(), functor, time, rounds })
}

/// One aggregation step computed with real categories: 2^Ω × T_disc,
/// proj₁ and Φ̃ are materialized and the pointwise Kan extension of Φ̃
/// along proj₁ is taken on the requested side.
pub fn kan_step_materialized(sys: &DynSystemData, side: KanSide) -> Result<FunctorData> {
    let lattice = Arc::new(powerset_preorder(&sys.omega)?);
    let time = sys.time_words();
    let labels: Vec<String> = time.iter().map(TimeWord::label).collect();
    let t_cat = discrete_category("T", &labels)?;
    let prod = Arc::new(product_category(&lattice, &t_cat)?);
    let nt = time.len() as u32;
    let proj1 = FunctorData::new(
        "proj1",
        prod.clone(),
        lattice.clone(),
        prod.objects().map(|x| Ob(x.0 / nt)).collect(),
        prod.morphisms().map(|f| Mor(f.0 / t_cat.morphism_count() as u32)).collect(),
    )?;
    let action: Vec<Vec<u32>> =
        time.iter().map(|t| (0..1u32 << sys.omega.len()).map(|s| DynSystemData::image(&t.map, s)).collect()).collect();
    let phi = crate::instances::product_action_functor(&lattice, &prod, &action)?;
    let kan = match side {
        KanSide::Left => colim_pre(&proj1, &phi)?,
        KanSide::Right => lim_pre(&proj1, &phi)?,
    };
    Ok(kan.functor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::universe_from_arg;

    #[test]
    fn lim_pre_identity_on_lattice() {
        let p = Arc::new(powerset_preorder(&universe_from_arg("ab")).unwrap());
        let id = FunctorData::identity(&p);
        let k = lim_pre(&id, &id).unwrap();
        assert_eq!(k.functor.object_map(), id.object_map());
        let k = colim_pre(&id, &id).unwrap();
        assert_eq!(k.functor.object_map(), id.object_map());
    }

    #[test]
    fn orbit_examples() {
        let s = DynSystemData::new(universe_from_arg("012"), vec![vec![1, 2, 0]], 1).unwrap();
        assert_eq!(orbit_functor(&s).unwrap().orbit(0b001), 0b111);
        let s = DynSystemData::new(universe_from_arg("01"), vec![vec![1, 1]], 1).unwrap();
        assert_eq!(orbit_functor(&s).unwrap().orbit(0b01), 0b11);
        let s = DynSystemData::new(universe_from_arg("01"), vec![vec![0, 1]], 3).unwrap();
        assert_eq!(orbit_functor(&s).unwrap().orbit(0b01), 0b01);
    }

    #[test]
    fn materialized_left_step_matches_lattice_step() {
        let s = DynSystemData::new(universe_from_arg("012"), vec![vec![1, 2, 0], vec![0, 0, 2]], 2).unwrap();
        let lan = kan_step_materialized(&s, KanSide::Left).unwrap();
        let time = s.time_words();
        for m in 0..8u32 {
            assert_eq!(lan.ob(Ob(m)).0, lan_step(&time, m));
        }
    }
}
