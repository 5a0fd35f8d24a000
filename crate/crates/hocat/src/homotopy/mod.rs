//! The two homotopy categories of a model structure and their localization
//! properties.
//!
//! Both categories are quotients by the homotopy relation: hom-sets are
//! homotopy classes of morphisms between fibrant-cofibrant images, with
//! composition on representatives. Well-definedness of that composition is
//! verified during construction, never assumed. The Kan-style category
//! keeps only fibrant-cofibrant objects; the Quillen-style category keeps
//! every object and replaces behind the scenes, either through the supplied
//! replacement functors (Q route) or through the lifted local replacements
//! (C-tilde route). When both routes are available they are compared and
//! must agree up to an isomorphism of categories over the identity on
//! objects.
//!
//! Zigzags are evaluated directly into the built category, which decides
//! word equality exactly; rewriting-based localization stays reserved for
//! inputs without model data.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::battery::Battery;
use crate::error::{EngineError, Meter};
use crate::fincat::{
    enumerate_functors, full_subcategory, validate_functor, CatRef, FinCategory, Functor, MorId,
    MorphismClass, ObjId, Subcategory,
};
use crate::localization::{
    check_l1_faint, check_l1prime_strong, check_l2prime, sends_w_to_isos, witness, CheckEvidence,
    Flag, LocalizationWitness, Step, Zigzag,
};
use crate::model::{
    cylinders, homotopy_classes, lift_fcf, local_cofibrant_replace, local_fibrant_replace,
    solve_lifting, ModelData, Partition, Square,
};

#[cfg(test)]
mod tests;

/// A category of homotopy classes: objects index into `img`, and
/// Hom(i, j) is the homotopy partition of hom(img[i], img[j]).
pub(crate) struct Quotient {
    pub(crate) cat: CatRef,
    /// Representative morphism of the underlying category per quotient
    /// morphism, in canonical (least-member) order.
    pub(crate) reps: Vec<MorId>,
    offset: BTreeMap<(u32, u32), u32>,
    parts: BTreeMap<(u32, u32), Partition>,
}

impl Quotient {
    /// Quotient morphism holding `m`, for `m` in hom(img[i], img[j]).
    pub(crate) fn class_id(&self, i: ObjId, j: ObjId, m: MorId) -> MorId {
        let key = (i.0, j.0);
        MorId(self.offset[&key] + self.parts[&key].class_of(m) as u32)
    }
}

/// Builds the quotient category over the given object images. Each image
/// must be fibrant-cofibrant; composition of classes is verified to be
/// independent of the chosen representatives.
fn build_quotient(
    md: &ModelData,
    label: &str,
    names: Vec<String>,
    img: &[ObjId],
    meter: &Meter,
) -> Result<Quotient, EngineError> {
    let c = &md.cat;
    let n = img.len();
    for &x in img {
        if !md.is_fibrant_cofibrant(x) {
            return Err(EngineError::Inconsistency(format!(
                "homotopy classes need fibrant-cofibrant images, {} is not one",
                c.obj_name(x)
            )));
        }
    }
    let mut by_pair: BTreeMap<(ObjId, ObjId), Partition> = BTreeMap::new();
    for &x in img {
        for &y in img {
            if !by_pair.contains_key(&(x, y)) {
                by_pair.insert((x, y), homotopy_classes(md, x, y, meter)?);
            }
        }
    }
    let parts: BTreeMap<(u32, u32), Partition> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ((i as u32, j as u32), by_pair[&(img[i], img[j])].clone()))
        .collect();

    // distinct images keep the bare class name; repeated images need the
    // object pair to keep names unique
    let qualify = img.iter().collect::<std::collections::BTreeSet<_>>().len() < n;
    let mut offset = BTreeMap::new();
    let mut reps = Vec::new();
    let mut morphisms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            offset.insert((i as u32, j as u32), morphisms.len() as u32);
            for class in &parts[&(i as u32, j as u32)].classes {
                let rep = class[0];
                let name = if qualify {
                    format!("{}>{}[{}]", names[i], names[j], c.mor_name(rep))
                } else {
                    format!("[{}]", c.mor_name(rep))
                };
                reps.push(rep);
                morphisms.push((name, i as u32, j as u32));
            }
        }
    }
    let identities: Vec<u32> = (0..n)
        .map(|i| {
            let key = (i as u32, i as u32);
            offset[&key] + parts[&key].class_of(c.identity(img[i])) as u32
        })
        .collect();

    let mut comp = Vec::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            for k in 0..n as u32 {
                let (pij, pjk, pik) = (&parts[&(i, j)], &parts[&(j, k)], &parts[&(i, k)]);
                let hom_ij = c.hom(img[i as usize], img[j as usize]);
                let hom_jk = c.hom(img[j as usize], img[k as usize]);
                meter.charge((hom_ij.len() * hom_jk.len()) as u64 + 1)?;
                for &u in hom_ij {
                    for &v in hom_jk {
                        let raw = pik.class_of(c.comp(v, u));
                        let rep_u = pij.classes[pij.class_of(u)][0];
                        let rep_v = pjk.classes[pjk.class_of(v)][0];
                        if raw != pik.class_of(c.comp(rep_v, rep_u)) {
                            return Err(EngineError::Inconsistency(format!(
                                "composition of homotopy classes depends on representatives at ({}, {})",
                                c.mor_name(u),
                                c.mor_name(v)
                            )));
                        }
                    }
                }
                for (p, cu) in pij.classes.iter().enumerate() {
                    for (q, cv) in pjk.classes.iter().enumerate() {
                        let gf = pik.class_of(c.comp(cv[0], cu[0])) as u32;
                        comp.push((
                            offset[&(j, k)] + q as u32,
                            offset[&(i, j)] + p as u32,
                            offset[&(i, k)] + gf,
                        ));
                    }
                }
            }
        }
    }
    let cat = Arc::new(
        FinCategory::new(label, names, morphisms, identities, &comp)
            .map_err(|e| EngineError::Inconsistency(format!("quotient shape: {e}")))?,
    );
    Ok(Quotient { cat, reps, offset, parts })
}

/// The homotopy category on fibrant-cofibrant objects, with its
/// localization functor (object images are the local replacements).
pub struct HoKCategory {
    /// Underlying fibrant-cofibrant object per category object.
    pub fc: Vec<ObjId>,
    /// The localization functor from the model's category.
    pub l: Functor,
    quo: Quotient,
}

impl HoKCategory {
    pub fn cat(&self) -> &CatRef {
        &self.quo.cat
    }

    /// Representative underlying morphism of a class.
    pub fn rep(&self, m: MorId) -> MorId {
        self.quo.reps[m.0 as usize]
    }

    /// The class of an underlying morphism in hom(fc[i], fc[j]).
    pub fn class_of(&self, i: ObjId, j: ObjId, m: MorId) -> MorId {
        self.quo.class_id(i, j, m)
    }
}

/// Both local replacements chained: X -> C-tilde X -> F-tilde C-tilde X.
fn fc_image(md: &ModelData, x: ObjId) -> ObjId {
    let (cx, _) = local_cofibrant_replace(md, x);
    local_fibrant_replace(md, cx).0
}

pub fn build_hok(
    md: &ModelData,
    meter: &Meter,
) -> Result<(HoKCategory, LocalizationWitness), EngineError> {
    let c = &md.cat;
    let fc = md.fc_objects();
    let names = fc.iter().map(|&x| c.obj_name(x).to_string()).collect();
    let quo = build_quotient(md, &format!("hok_{}", c.label()), names, &fc, meter)?;
    let index: BTreeMap<ObjId, u32> =
        fc.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let mut obj_map = Vec::new();
    for x in c.objects() {
        let fcx = fc_image(md, x);
        let &i = index.get(&fcx).ok_or_else(|| {
            EngineError::Inconsistency(format!(
                "replacement image {} is not fibrant-cofibrant",
                c.obj_name(fcx)
            ))
        })?;
        obj_map.push(ObjId(i));
    }
    let mut mor_map = Vec::new();
    for f in c.morphisms() {
        let lf = lift_fcf(md, f)?;
        let (i, j) = (obj_map[c.dom(f).0 as usize], obj_map[c.cod(f).0 as usize]);
        mor_map.push(quo.class_id(i, j, lf));
    }
    let l = Functor::new(c.clone(), quo.cat.clone(), obj_map, mor_map)
        .map_err(|e| EngineError::Inconsistency(format!("localization functor shape: {e}")))?;
    if !validate_functor(&l).is_valid() {
        return Err(EngineError::Inconsistency(
            "replacement lifts do not respect composition up to homotopy".into(),
        ));
    }
    let wit = witness(c.clone(), md.w.clone(), quo.cat.clone(), l.clone())?;
    Ok((HoKCategory { fc, l, quo }, wit))
}

/// Which replacement chain realizes the all-objects homotopy category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HoRoute {
    /// Through the supplied replacement functors: image = R(Q(X)).
    Q,
    /// Through the local lifted replacements: image = F-tilde C-tilde X.
    CTilde,
}

/// The homotopy category on all objects.
pub struct HoCategory {
    pub route: HoRoute,
    /// Fibrant-cofibrant image per object.
    pub img: Vec<ObjId>,
    pub gamma: Functor,
    quo: Quotient,
}

impl HoCategory {
    pub fn cat(&self) -> &CatRef {
        &self.quo.cat
    }

    pub fn rep(&self, m: MorId) -> MorId {
        self.quo.reps[m.0 as usize]
    }

    /// The class of an underlying morphism in hom(img[i], img[j]).
    pub fn class_of(&self, i: ObjId, j: ObjId, m: MorId) -> MorId {
        self.quo.class_id(i, j, m)
    }
}

pub fn build_ho_route(
    md: &ModelData,
    route: HoRoute,
    meter: &Meter,
) -> Result<(HoCategory, LocalizationWitness), EngineError> {
    let c = &md.cat;
    let (img, lifts): (Vec<ObjId>, Vec<MorId>) = match route {
        HoRoute::Q => {
            let (Some(qr), Some(rr)) = (&md.qfun, &md.rfun) else {
                return Err(EngineError::MissingQ);
            };
            let rq = Functor::compose(&rr.fun, &qr.fun)?;
            (rq.obj_map().to_vec(), rq.mor_map().to_vec())
        }
        HoRoute::CTilde => {
            let img = c.objects().map(|x| fc_image(md, x)).collect();
            let lifts = c.morphisms().map(|m| lift_fcf(md, m)).collect::<Result<_, _>>()?;
            (img, lifts)
        }
    };
    let names = c.objects().map(|x| c.obj_name(x).to_string()).collect();
    let quo = build_quotient(md, &format!("ho_{}", c.label()), names, &img, meter)?;
    let obj_map = c.objects().collect();
    let mor_map = c
        .morphisms()
        .map(|m| quo.class_id(c.dom(m), c.cod(m), lifts[m.0 as usize]))
        .collect();
    let gamma = Functor::new(c.clone(), quo.cat.clone(), obj_map, mor_map)
        .map_err(|e| EngineError::Inconsistency(format!("localization functor shape: {e}")))?;
    if !validate_functor(&gamma).is_valid() {
        return Err(EngineError::Inconsistency(
            "replacement images do not respect composition up to homotopy".into(),
        ));
    }
    let wit = witness(c.clone(), md.w.clone(), quo.cat.clone(), gamma.clone())?;
    Ok((HoCategory { route, img, gamma, quo }, wit))
}

/// Builds the homotopy category through the replacement functors when both
/// are supplied, else through the local replacements. When both routes are
/// available the two results are verified to be isomorphic over the
/// identity on objects.
pub fn build_ho(
    md: &ModelData,
    meter: &Meter,
) -> Result<(HoCategory, LocalizationWitness), EngineError> {
    if md.qfun.is_some() && md.rfun.is_some() {
        let (hoq, wit) = build_ho_route(md, HoRoute::Q, meter)?;
        let (hoc, _) = build_ho_route(md, HoRoute::CTilde, meter)?;
        compare_ho_routes(md, &hoc, &hoq, meter)?;
        Ok((hoq, wit))
    } else {
        build_ho_route(md, HoRoute::CTilde, meter)
    }
}

/// The homotopy category of the full subcategory on the given parent
/// objects, with a localization witness over that subcategory at the
/// restriction of the marked class. Images go through the local
/// replacements, so every chosen object needs a fibrant-cofibrant image.
pub fn build_ho_on(
    md: &ModelData,
    objs: &[ObjId],
    meter: &Meter,
) -> Result<(Subcategory, HoCategory, LocalizationWitness), EngineError> {
    let c = &md.cat;
    let sub = full_subcategory(c, objs);
    let img: Vec<ObjId> = objs.iter().map(|&x| fc_image(md, x)).collect();
    let lifts: Vec<MorId> = sub
        .cat
        .morphisms()
        .map(|m| lift_fcf(md, sub.inclusion.on_mor(m)))
        .collect::<Result<_, _>>()?;
    let names = objs.iter().map(|&x| c.obj_name(x).to_string()).collect();
    let quo = build_quotient(md, &format!("ho_{}_sub", c.label()), names, &img, meter)?;
    let obj_map = sub.cat.objects().collect();
    let mor_map = sub
        .cat
        .morphisms()
        .map(|m| quo.class_id(sub.cat.dom(m), sub.cat.cod(m), lifts[m.0 as usize]))
        .collect();
    let gamma = Functor::new(sub.cat.clone(), quo.cat.clone(), obj_map, mor_map)
        .map_err(|e| EngineError::Inconsistency(format!("localization functor shape: {e}")))?;
    if !validate_functor(&gamma).is_valid() {
        return Err(EngineError::Inconsistency(
            "replacement images do not respect composition up to homotopy".into(),
        ));
    }
    let w_sub = MorphismClass::new(
        &sub.cat,
        sub.cat
            .morphisms()
            .filter(|&m| md.w.contains(sub.inclusion.on_mor(m))),
    );
    let wit = witness(sub.cat.clone(), w_sub, quo.cat.clone(), gamma.clone())?;
    Ok((sub, HoCategory { route: HoRoute::CTilde, img, gamma, quo }, wit))
}

/// The canonical comparison F-tilde C-tilde X -> R(Q(X)): a lift of the
/// cofibrant replacements against q_X, pushed forward to the fibrant
/// replacements.
fn route_comparison_map(md: &ModelData, x: ObjId) -> Result<MorId, EngineError> {
    let c = &md.cat;
    let (qr, rr) = (md.qfun.as_ref().unwrap(), md.rfun.as_ref().unwrap());
    let (cx, c_x) = local_cofibrant_replace(md, x);
    let qx = qr.fun.on_obj(x);
    let phi = solve_lifting(
        md,
        Square {
            top: md.init_to(qx),
            left: md.init_to(cx),
            bottom: c_x,
            right: qr.nat.component(x),
        },
    )?;
    let (fcx, f_cx) = local_fibrant_replace(md, cx);
    let rqx = rr.fun.on_obj(qx);
    solve_lifting(
        md,
        Square {
            top: c.comp(rr.nat.component(qx), phi),
            left: f_cx,
            bottom: md.to_term(fcx),
            right: md.to_term(rqx),
        },
    )
}

/// Verifies the two route results are isomorphic over the identity on
/// objects, compatibly with both localization functors: conjugating by the
/// canonical comparison maps must send each C-tilde-route class to exactly
/// one Q-route class, bijectively and functorially.
fn compare_ho_routes(
    md: &ModelData,
    hoc: &HoCategory,
    hoq: &HoCategory,
    meter: &Meter,
) -> Result<(), EngineError> {
    let c = &md.cat;
    let n = c.n_objects();
    let h: Vec<MorId> =
        c.objects().map(|x| route_comparison_map(md, x)).collect::<Result<_, _>>()?;
    let mut mixed: BTreeMap<(ObjId, ObjId), Partition> = BTreeMap::new();
    let mut mor_map = Vec::with_capacity(hoc.cat().n_morphisms());
    for s in hoc.cat().morphisms() {
        let (i, j) = (hoc.cat().dom(s), hoc.cat().cod(s));
        let u = hoc.rep(s);
        let key = (hoc.img[i.0 as usize], hoq.img[j.0 as usize]);
        if !mixed.contains_key(&key) {
            mixed.insert(key, homotopy_classes(md, key.0, key.1, meter)?);
        }
        let part = &mixed[&key];
        let want = part.class_of(c.comp(h[j.0 as usize], u));
        let hits: Vec<MorId> = hoq
            .cat()
            .hom(i, j)
            .iter()
            .copied()
            .filter(|&t| part.class_of(c.comp(hoq.rep(t), h[i.0 as usize])) == want)
            .collect();
        meter.charge(hoq.cat().hom(i, j).len() as u64 + 1)?;
        if hits.len() != 1 {
            return Err(EngineError::Inconsistency(format!(
                "route comparison is not a bijection on classes at {}",
                hoc.cat().mor_name(s)
            )));
        }
        mor_map.push(hits[0]);
    }
    let phi = Functor::new(
        hoc.cat().clone(),
        hoq.cat().clone(),
        (0..n as u32).map(ObjId).collect(),
        mor_map,
    )
    .map_err(|e| EngineError::Inconsistency(format!("route comparison shape: {e}")))?;
    if !validate_functor(&phi).is_valid() || !phi.is_bijective() {
        return Err(EngineError::Inconsistency(
            "route comparison is not an isomorphism of categories".into(),
        ));
    }
    let via = Functor::compose(&phi, &hoc.gamma)?;
    if via.obj_map() != hoq.gamma.obj_map() || via.mor_map() != hoq.gamma.mor_map() {
        return Err(EngineError::Inconsistency(
            "route comparison does not commute with the localization functors".into(),
        ));
    }
    Ok(())
}

/// Evaluates a zigzag into a witness's localized category: forward steps
/// through the functor, backward steps through the inverse of the functor
/// image. Works for any witness, in particular those built on
/// subcategories.
pub fn evaluate_zigzag(wit: &LocalizationWitness, z: &Zigzag) -> Result<MorId, EngineError> {
    z.validate(&wit.base, &wit.w)?;
    let loc = &wit.loc;
    let mut acc = loc.identity(wit.l.on_obj(z.start));
    for step in &z.word {
        let v = match *step {
            Step::Fwd(m) => wit.l.on_mor(m),
            Step::Inv(w) => loc.inverse_of(wit.l.on_mor(w)).ok_or_else(|| {
                EngineError::Inconsistency(
                    "witness image of a marked morphism is not invertible".into(),
                )
            })?,
        };
        acc = loc.comp(v, acc);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaIsoReport {
    pub checked: u64,
    pub ok: bool,
    pub counterexamples: Vec<String>,
}

/// Checks both directions of "the localization image is invertible exactly
/// on weak equivalences", morphism by morphism.
pub fn gamma_iso_iff_we(md: &ModelData, ho: &HoCategory) -> GammaIsoReport {
    let c = &md.cat;
    let mut counterexamples = Vec::new();
    for f in c.morphisms() {
        let we = md.w.contains(f);
        let iso = ho.cat().is_iso(ho.gamma.on_mor(f));
        if we != iso {
            counterexamples.push(format!(
                "{}: weak equivalence {}, image invertible {}",
                c.mor_name(f),
                we,
                iso
            ));
        }
    }
    GammaIsoReport {
        checked: c.n_morphisms() as u64,
        ok: counterexamples.is_empty(),
        counterexamples,
    }
}

/// Evidence of one two-condition check against one battery member.
#[derive(Debug, Clone, Serialize)]
pub struct PairEvidence {
    pub d_label: String,
    pub first: CheckEvidence,
    pub second: CheckEvidence,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocReport {
    pub battery_id: String,
    pub flag: Flag,
    pub evidence: Vec<PairEvidence>,
}

fn flag_from(battery: &Battery, evidence: &[PairEvidence]) -> Flag {
    for e in evidence {
        for check in [&e.first, &e.second] {
            if !check.ok {
                return Flag::Refuted {
                    counterexample: check
                        .counterexample
                        .clone()
                        .unwrap_or_else(|| format!("failure against {}", e.d_label)),
                };
            }
        }
    }
    Flag::Verified { battery_id: battery.id.clone() }
}

/// Battery-relative weak-localization check of the fibrant-cofibrant
/// homotopy category, plus the collapse identities: the localization
/// functor sends every replacement comparison map to an identity class,
/// and fixes classes of morphisms with fibrant-cofibrant endpoints.
pub fn check_hok_weak(
    md: &ModelData,
    battery: &Battery,
    meter: &Meter,
) -> Result<LocReport, EngineError> {
    let c = &md.cat;
    let (hok, wit) = build_hok(md, meter)?;
    for x in c.objects() {
        let (cx, c_x) = local_cofibrant_replace(md, x);
        let (_, f_cx) = local_fibrant_replace(md, cx);
        for m in [c_x, f_cx] {
            if !hok.cat().is_identity(hok.l.on_mor(m)) {
                return Err(EngineError::Inconsistency(format!(
                    "localization image of the replacement map {} is not an identity class",
                    c.mor_name(m)
                )));
            }
        }
    }
    for f in c.morphisms() {
        let (x, y) = (c.dom(f), c.cod(f));
        if md.is_fibrant_cofibrant(x) && md.is_fibrant_cofibrant(y) {
            let direct = hok.class_of(hok.l.on_obj(x), hok.l.on_obj(y), f);
            if hok.l.on_mor(f) != direct {
                return Err(EngineError::Inconsistency(format!(
                    "lifted class of {} differs from its own class on fibrant-cofibrant endpoints",
                    c.mor_name(f)
                )));
            }
        }
    }
    let mut evidence = Vec::new();
    for d in &battery.members {
        evidence.push(PairEvidence {
            d_label: d.label().to_string(),
            first: check_l1_faint(&wit, d, meter)?,
            second: check_l2prime(&wit, d, meter)?,
        });
    }
    Ok(LocReport { battery_id: battery.id.clone(), flag: flag_from(battery, &evidence), evidence })
}

/// The same weak-localization check for the subcategory of cofibrant
/// objects, localized by the restricted functor. Every cofibrant object's
/// cylinders are enumerated first, which asserts their cofibrancy; objects
/// without a self-coproduct are skipped, as no cylinder exists to check.
pub fn check_hok_on_mc(
    md: &ModelData,
    battery: &Battery,
    meter: &Meter,
) -> Result<LocReport, EngineError> {
    let c = &md.cat;
    let (hok, _) = build_hok(md, meter)?;
    let cofs: Vec<ObjId> = c.objects().filter(|&x| md.is_cofibrant(x)).collect();
    for &x in &cofs {
        match cylinders(md, x) {
            Ok(_) | Err(EngineError::NoCoproduct { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let sub = full_subcategory(&c.clone(), &cofs);
    let w_sub = MorphismClass::new(
        &sub.cat,
        sub.cat.morphisms().filter(|&m| md.w.contains(sub.inclusion.on_mor(m))),
    );
    let restricted = Functor::compose(&hok.l, &sub.inclusion)?;
    let wit = witness(sub.cat.clone(), w_sub, hok.cat().clone(), restricted)?;
    let mut evidence = Vec::new();
    for d in &battery.members {
        evidence.push(PairEvidence {
            d_label: d.label().to_string(),
            first: check_l1_faint(&wit, d, meter)?,
            second: check_l2prime(&wit, d, meter)?,
        });
    }
    Ok(LocReport { battery_id: battery.id.clone(), flag: flag_from(battery, &evidence), evidence })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictLocReport {
    pub battery_id: String,
    pub flag: Flag,
    /// Component families swept by the naturality-transfer check.
    pub families_checked: u64,
    pub evidence: Vec<PairEvidence>,
}

/// Objects this small keep the component-family sweep exhaustive yet cheap.
const FAMILY_SWEEP_MAX_OBJECTS: usize = 3;

/// Battery-relative strict-localization check of the all-objects homotopy
/// category, plus the naturality-transfer lemma: a component family
/// between functors out of it is natural iff it is natural after
/// pre-composing with the localization functor.
pub fn check_ho_strict(
    md: &ModelData,
    battery: &Battery,
    meter: &Meter,
) -> Result<StrictLocReport, EngineError> {
    let (ho, wit) = build_ho(md, meter)?;
    let mut evidence = Vec::new();
    for d in &battery.members {
        evidence.push(PairEvidence {
            d_label: d.label().to_string(),
            first: check_l1prime_strong(&wit, d, meter)?,
            second: check_l2prime(&wit, d, meter)?,
        });
    }
    let mut families_checked = 0u64;
    for d in &battery.members {
        if d.n_objects() > FAMILY_SWEEP_MAX_OBJECTS {
            continue;
        }
        families_checked += naturality_transfer_sweep(md, &ho, d, meter)?;
    }
    Ok(StrictLocReport {
        battery_id: battery.id.clone(),
        flag: flag_from(battery, &evidence),
        families_checked,
        evidence,
    })
}

/// For every functor pair F, G out of the homotopy category and every
/// component family between them: natural against all class morphisms iff
/// natural against the localization images only.
fn naturality_transfer_sweep(
    md: &ModelData,
    ho: &HoCategory,
    d: &CatRef,
    meter: &Meter,
) -> Result<u64, EngineError> {
    let hc = ho.cat();
    let funs = enumerate_functors(hc, d, meter)?;
    let all_mors: Vec<MorId> = hc.morphisms().collect();
    let image_mors: Vec<MorId> = md.cat.morphisms().map(|m| ho.gamma.on_mor(m)).collect();
    let mut checked = 0u64;
    for f in &funs {
        for g in &funs {
            let slots: Vec<&[MorId]> =
                hc.objects().map(|x| d.hom(f.on_obj(x), g.on_obj(x))).collect();
            if slots.iter().any(|s| s.is_empty()) {
                continue;
            }
            let mut pick = vec![0usize; slots.len()];
            loop {
                meter.charge(hc.n_morphisms() as u64 + 1)?;
                let fam: Vec<MorId> =
                    pick.iter().zip(&slots).map(|(&i, s)| s[i]).collect();
                let natural_for = |ms: &[MorId]| {
                    ms.iter().all(|&s| {
                        let (x, y) = (hc.dom(s), hc.cod(s));
                        d.comp(g.on_mor(s), fam[x.0 as usize])
                            == d.comp(fam[y.0 as usize], f.on_mor(s))
                    })
                };
                let on_all = natural_for(&all_mors);
                let on_images = natural_for(&image_mors);
                if on_all != on_images {
                    return Err(EngineError::Inconsistency(
                        "naturality differs between class morphisms and localization images"
                            .into(),
                    ));
                }
                checked += 1;
                let mut carry = 0;
                while carry < pick.len() {
                    pick[carry] += 1;
                    if pick[carry] < slots[carry].len() {
                        break;
                    }
                    pick[carry] = 0;
                    carry += 1;
                }
                if carry == pick.len() {
                    break;
                }
            }
        }
    }
    Ok(checked)
}

/// The unique strict factorization of a W-inverting functor through a
/// strict localization witness, computed by saturating images of the
/// generating morphisms and their inverses.
pub fn strict_factor(
    wit: &LocalizationWitness,
    f: &Functor,
    meter: &Meter,
) -> Result<Functor, EngineError> {
    if f.source().tag() != wit.base.tag() {
        return Err(EngineError::Mismatch("factorization needs a functor off the witness base".into()));
    }
    if let Err(m) = sends_w_to_isos(f, &wit.w) {
        return Err(EngineError::PreconditionFailed(format!(
            "functor does not invert the marked morphism {}",
            wit.base.mor_name(m)
        )));
    }
    let loc = &wit.loc;
    let tgt = f.target();
    let mut objs: Vec<Option<ObjId>> = vec![None; loc.n_objects()];
    for x in wit.base.objects() {
        let slot = &mut objs[wit.l.on_obj(x).0 as usize];
        match slot {
            None => *slot = Some(f.on_obj(x)),
            Some(prev) if *prev != f.on_obj(x) => {
                return Err(EngineError::NoFactorization(
                    "objects with one localization image have different target images".into(),
                ))
            }
            _ => {}
        }
    }
    let obj_map: Vec<ObjId> = objs
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| {
            EngineError::NoFactorization("witness functor is not surjective on objects".into())
        })?;

    let m = loc.n_morphisms();
    let mut mors: Vec<Option<MorId>> = vec![None; m];
    fn assign(
        mors: &mut [Option<MorId>],
        at: MorId,
        v: MorId,
    ) -> Result<bool, EngineError> {
        match mors[at.0 as usize] {
            None => {
                mors[at.0 as usize] = Some(v);
                Ok(true)
            }
            Some(prev) if prev != v => Err(EngineError::NoFactorization(
                "generated images conflict, no strict factorization exists".into(),
            )),
            _ => Ok(false),
        }
    }
    for o in loc.objects() {
        assign(&mut mors, loc.identity(o), tgt.identity(obj_map[o.0 as usize]))?;
    }
    for b in wit.base.morphisms() {
        assign(&mut mors, wit.l.on_mor(b), f.on_mor(b))?;
    }
    for w in wit.w.members() {
        let lw = wit.l.on_mor(w);
        let inv = loc.inverse_of(lw).ok_or_else(|| {
            EngineError::Inconsistency("witness image of a marked morphism is not invertible".into())
        })?;
        let f_inv = tgt.inverse_of(f.on_mor(w)).expect("checked W-inverting above");
        assign(&mut mors, inv, f_inv)?;
    }
    loop {
        meter.charge((m * m) as u64 + 1)?;
        let mut changed = false;
        for a in 0..m as u32 {
            let Some(va) = mors[a as usize] else { continue };
            for b in 0..m as u32 {
                let Some(vb) = mors[b as usize] else { continue };
                if loc.cod(MorId(a)) != loc.dom(MorId(b)) {
                    continue;
                }
                let ba = loc.comp(MorId(b), MorId(a));
                changed |= assign(&mut mors, ba, tgt.comp(vb, va))?;
            }
        }
        if !changed {
            break;
        }
    }
    let mor_map: Vec<MorId> = mors.into_iter().collect::<Option<_>>().ok_or_else(|| {
        EngineError::NoFactorization(
            "localized category is not generated by images and inverses".into(),
        )
    })?;
    let h = Functor::new(loc.clone(), tgt.clone(), obj_map, mor_map)
        .map_err(|e| EngineError::NoFactorization(format!("factorization is mistyped: {e}")))?;
    if !validate_functor(&h).is_valid() {
        return Err(EngineError::NoFactorization("factorization is not functorial".into()));
    }
    let back = Functor::compose(&h, &wit.l)?;
    if back.obj_map() != f.obj_map() || back.mor_map() != f.mor_map() {
        return Err(EngineError::NoFactorization("factorization does not restrict to the functor".into()));
    }
    Ok(h)
}
