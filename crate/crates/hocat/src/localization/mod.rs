//! Localization witnesses and the four notions of inverting a class of
//! morphisms.
//!
//! A witness packages a functor L: base -> loc that sends the marked class W
//! to isomorphisms. Four graded universal properties are checked against a
//! battery of finite test categories:
//!
//! - faint: every W-inverting F factors as F ~ Ftilde . L up to natural iso
//!   (L1), with a unique comparison iso between any two factorizations (L2);
//! - weak: L1 plus pre-composition with L fully faithful (L2');
//! - strong: every W-inverting F factors through L strictly and uniquely
//!   (L1');
//! - strict: L1' plus L2'.
//!
//! Quantification over "every category D" is undecidable here, so verdicts
//! are battery-relative and record the battery id. Refuted verdicts carry a
//! minimal counterexample in canonical order.

mod rewrite;

use serde::Serialize;

use crate::battery::Battery;
use crate::error::{EngineError, Meter};
use crate::fincat::{
    enumerate_functors, enumerate_nat_transformations, enumerate_natural_isos, CatRef, Functor,
    MorId, MorphismClass, NatTransformation, ObjId,
};

pub use rewrite::localize_by_rewriting;

/// One step of a zigzag: a morphism taken forwards, or a marked morphism
/// traversed backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    Fwd(MorId),
    Inv(MorId),
}

/// A composable word of steps from `start` to `end`; the empty word stands
/// for the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zigzag {
    pub start: ObjId,
    pub end: ObjId,
    pub word: Vec<Step>,
}

impl Zigzag {
    /// Checks endpoints, step composability and membership of every
    /// backwards step in `w`.
    pub fn validate(&self, c: &CatRef, w: &MorphismClass) -> Result<(), EngineError> {
        let mut at = self.start;
        for step in &self.word {
            at = match *step {
                Step::Fwd(m) => {
                    if c.dom(m) != at {
                        return Err(EngineError::MalformedZigzag(format!(
                            "step {} starts at {}, word is at {}",
                            c.mor_name(m),
                            c.obj_name(c.dom(m)),
                            c.obj_name(at)
                        )));
                    }
                    c.cod(m)
                }
                Step::Inv(m) => {
                    if !w.contains(m) {
                        return Err(EngineError::MalformedZigzag(format!(
                            "{} is reversed but not marked",
                            c.mor_name(m)
                        )));
                    }
                    if c.cod(m) != at {
                        return Err(EngineError::MalformedZigzag(format!(
                            "reversed step {} ends at {}, word is at {}",
                            c.mor_name(m),
                            c.obj_name(c.cod(m)),
                            c.obj_name(at)
                        )));
                    }
                    c.dom(m)
                }
            };
        }
        if at != self.end {
            return Err(EngineError::MalformedZigzag(format!(
                "word ends at {}, declared end is {}",
                c.obj_name(at),
                c.obj_name(self.end)
            )));
        }
        Ok(())
    }
}

/// Verdict for one localization notion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Flag {
    Verified { battery_id: String },
    Refuted { counterexample: String },
    Unknown,
}

impl Flag {
    pub fn is_verified(&self) -> bool {
        matches!(self, Flag::Verified { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Flags {
    pub faint: Flag,
    pub weak: Flag,
    pub strong: Flag,
    pub strict: Flag,
}

impl Flags {
    fn unknown() -> Flags {
        Flags { faint: Flag::Unknown, weak: Flag::Unknown, strong: Flag::Unknown, strict: Flag::Unknown }
    }
}

/// Outcome of one condition check against one battery member.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEvidence {
    pub d_label: String,
    pub ok: bool,
    /// Number of universally quantified items examined (functors or pairs).
    pub checked: u64,
    /// Per-check certificate data, bounded in size.
    pub certificates: serde_json::Value,
    pub counterexample: Option<String>,
}

/// All evidence gathered for one battery member.
#[derive(Debug, Clone, Serialize)]
pub struct DEvidence {
    pub d_label: String,
    /// |[base, d]_W|: functors from base to d sending W to isomorphisms.
    pub w_functors: u64,
    /// |Fun(loc, d)|.
    pub loc_functors: u64,
    pub l1: CheckEvidence,
    pub l2: CheckEvidence,
    pub l1p: CheckEvidence,
    pub l2p: CheckEvidence,
}

/// A functor L: base -> loc inverting W, with battery-relative verdicts.
#[derive(Debug, Clone)]
pub struct LocalizationWitness {
    pub base: CatRef,
    pub w: MorphismClass,
    pub loc: CatRef,
    pub l: Functor,
    pub flags: Flags,
    pub evidence: Vec<DEvidence>,
}

/// First member of `w` that `f` fails to send to an isomorphism.
pub fn sends_w_to_isos(f: &Functor, w: &MorphismClass) -> Result<(), MorId> {
    for m in w.members() {
        if !f.target().is_iso(f.on_mor(m)) {
            return Err(m);
        }
    }
    Ok(())
}

/// Wraps (base, W, loc, L) as a witness, enforcing the hard precondition
/// that L inverts W.
pub fn witness(
    base: CatRef,
    w: MorphismClass,
    loc: CatRef,
    l: Functor,
) -> Result<LocalizationWitness, EngineError> {
    w.check_parent(&base)?;
    if l.source().tag() != base.tag() || l.target().tag() != loc.tag() {
        return Err(EngineError::Mismatch("witness functor endpoints".into()));
    }
    if let Err(m) = sends_w_to_isos(&l, &w) {
        return Err(EngineError::NotLocalization(format!(
            "L({}) is not an isomorphism",
            base.mor_name(m)
        )));
    }
    Ok(LocalizationWitness { base, w, loc, l, flags: Flags::unknown(), evidence: Vec::new() })
}

/// The identity functor as a localization at the identities.
pub fn identity_witness(c: &CatRef) -> LocalizationWitness {
    witness(
        c.clone(),
        MorphismClass::identities(c),
        c.clone(),
        Functor::identity(c.clone()),
    )
    .expect("identity inverts identities")
}

/// Shared per-battery-member enumeration state for the four checkers.
struct DCtx {
    d: CatRef,
    /// Functors base -> d sending W to isos, canonical order.
    w_funs: Vec<Functor>,
    /// Functors loc -> d, canonical order.
    loc_funs: Vec<Functor>,
    /// composite[i] = loc_funs[i] . L.
    composite: Vec<Functor>,
}

impl DCtx {
    fn build(wit: &LocalizationWitness, d: &CatRef, meter: &Meter) -> Result<DCtx, EngineError> {
        let all = enumerate_functors(&wit.base, d, meter)?;
        let w_funs: Vec<Functor> =
            all.into_iter().filter(|f| sends_w_to_isos(f, &wit.w).is_ok()).collect();
        let loc_funs = enumerate_functors(&wit.loc, d, meter)?;
        let composite = loc_funs
            .iter()
            .map(|f| Functor::compose(f, &wit.l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DCtx { d: d.clone(), w_funs, loc_funs, composite })
    }

    /// All factorizations of w_funs[i]: pairs (j, eta) with
    /// eta: w_funs[i] => loc_funs[j] . L a natural isomorphism.
    fn factorizations(
        &self,
        i: usize,
        meter: &Meter,
    ) -> Result<Vec<(usize, NatTransformation)>, EngineError> {
        let f = &self.w_funs[i];
        let mut out = Vec::new();
        for (j, comp) in self.composite.iter().enumerate() {
            if comp.obj_map().iter().zip(f.obj_map()).any(|(&a, &b)| {
                self.d.hom(b, a).is_empty() || self.d.hom(a, b).is_empty()
            }) {
                continue;
            }
            for eta in enumerate_natural_isos(f, comp, meter)? {
                out.push((j, eta));
            }
        }
        Ok(out)
    }
}

fn functor_json(f: &Functor) -> serde_json::Value {
    serde_json::json!({
        "obj": f.obj_map().iter().map(|x| x.0).collect::<Vec<_>>(),
        "mor": f.mor_map().iter().map(|m| m.0).collect::<Vec<_>>(),
    })
}

fn components_json(t: &NatTransformation) -> serde_json::Value {
    serde_json::Value::from(t.components().iter().map(|m| m.0).collect::<Vec<_>>())
}

const CERTIFICATE_CAP: usize = 16;

/// L1: every W-inverting F: base -> d factors through L up to natural iso.
fn l1_check(ctx: &DCtx, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    let mut certs = Vec::new();
    for (i, f) in ctx.w_funs.iter().enumerate() {
        let fact = ctx.factorizations(i, meter)?;
        match fact.first() {
            Some((j, eta)) => {
                if certs.len() < CERTIFICATE_CAP {
                    certs.push(serde_json::json!({
                        "functor": functor_json(f),
                        "through": functor_json(&ctx.loc_funs[*j]),
                        "iso": components_json(eta),
                    }));
                }
            }
            None => {
                return Ok(CheckEvidence {
                    d_label: ctx.d.label().to_string(),
                    ok: false,
                    checked: i as u64 + 1,
                    certificates: serde_json::Value::Array(certs),
                    counterexample: Some(format!(
                        "no factorization up to iso for functor #{i} into {}",
                        ctx.d.label()
                    )),
                });
            }
        }
    }
    Ok(CheckEvidence {
        d_label: ctx.d.label().to_string(),
        ok: true,
        checked: ctx.w_funs.len() as u64,
        certificates: serde_json::Value::Array(certs),
        counterexample: None,
    })
}

/// L2: between any two factorizations (Ftilde, eta), (Ftilde', eta') of the
/// same F there is exactly one natural iso e: Ftilde => Ftilde' with
/// (e whiskered by L) . eta = eta'.
fn l2_check(wit: &LocalizationWitness, ctx: &DCtx, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    let mut pairs_checked = 0u64;
    for i in 0..ctx.w_funs.len() {
        let fact = ctx.factorizations(i, meter)?;
        for (j1, eta1) in &fact {
            for (j2, eta2) in &fact {
                pairs_checked += 1;
                meter.charge(1)?;
                let mut hits = 0u32;
                for eps in enumerate_natural_isos(&ctx.loc_funs[*j1], &ctx.loc_funs[*j2], meter)? {
                    let whisker_ok = wit.base.objects().all(|x| {
                        let lx = wit.l.on_obj(x);
                        ctx.d.comp(eps.component(lx), eta1.component(x)) == eta2.component(x)
                    });
                    if whisker_ok {
                        hits += 1;
                        if hits > 1 {
                            break;
                        }
                    }
                }
                if hits != 1 {
                    return Ok(CheckEvidence {
                        d_label: ctx.d.label().to_string(),
                        ok: false,
                        checked: pairs_checked,
                        certificates: serde_json::Value::Null,
                        counterexample: Some(format!(
                            "functor #{i} into {}: factorization pair has {hits} comparison isos",
                            ctx.d.label()
                        )),
                    });
                }
            }
        }
    }
    Ok(CheckEvidence {
        d_label: ctx.d.label().to_string(),
        ok: true,
        checked: pairs_checked,
        certificates: serde_json::Value::Null,
        counterexample: None,
    })
}

/// L1': every W-inverting F factors through L strictly (F = Ftilde . L) and
/// uniquely.
fn l1p_check(ctx: &DCtx) -> Result<CheckEvidence, EngineError> {
    let mut certs = Vec::new();
    for (i, f) in ctx.w_funs.iter().enumerate() {
        let hits: Vec<usize> = ctx
            .composite
            .iter()
            .enumerate()
            .filter(|(_, comp)| *comp == f)
            .map(|(j, _)| j)
            .collect();
        if hits.len() != 1 {
            return Ok(CheckEvidence {
                d_label: ctx.d.label().to_string(),
                ok: false,
                checked: i as u64 + 1,
                certificates: serde_json::Value::Array(certs),
                counterexample: Some(format!(
                    "functor #{i} into {} has {} strict factorizations",
                    ctx.d.label(),
                    hits.len()
                )),
            });
        }
        if certs.len() < CERTIFICATE_CAP {
            certs.push(serde_json::json!({
                "functor": functor_json(f),
                "through": functor_json(&ctx.loc_funs[hits[0]]),
            }));
        }
    }
    Ok(CheckEvidence {
        d_label: ctx.d.label().to_string(),
        ok: true,
        checked: ctx.w_funs.len() as u64,
        certificates: serde_json::Value::Array(certs),
        counterexample: None,
    })
}

/// L2': pre-composition with L is fully faithful, i.e. whiskering is a
/// bijection Hom(F, G) -> Hom(F.L, G.L) for all F, G: loc -> d.
fn l2p_check(wit: &LocalizationWitness, ctx: &DCtx, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    let mut pairs_checked = 0u64;
    for (i, f) in ctx.loc_funs.iter().enumerate() {
        for (j, g) in ctx.loc_funs.iter().enumerate() {
            pairs_checked += 1;
            meter.charge(1)?;
            let upstairs = enumerate_nat_transformations(f, g, meter)?;
            let downstairs = enumerate_nat_transformations(&ctx.composite[i], &ctx.composite[j], meter)?;
            let mut images = std::collections::BTreeSet::new();
            for t in &upstairs {
                let whiskered: Vec<MorId> =
                    wit.base.objects().map(|x| t.component(wit.l.on_obj(x))).collect();
                if !images.insert(whiskered) {
                    return Ok(CheckEvidence {
                        d_label: ctx.d.label().to_string(),
                        ok: false,
                        checked: pairs_checked,
                        certificates: serde_json::Value::Null,
                        counterexample: Some(format!(
                            "whiskering not injective on Hom(#{i}, #{j}) into {}",
                            ctx.d.label()
                        )),
                    });
                }
            }
            if images.len() != downstairs.len() {
                return Ok(CheckEvidence {
                    d_label: ctx.d.label().to_string(),
                    ok: false,
                    checked: pairs_checked,
                    certificates: serde_json::Value::Null,
                    counterexample: Some(format!(
                        "whiskering Hom(#{i}, #{j}) into {}: {} of {} transformations hit",
                        ctx.d.label(),
                        images.len(),
                        downstairs.len()
                    )),
                });
            }
            debug_assert!(downstairs
                .iter()
                .all(|t| images.contains(&t.components().to_vec())));
        }
    }
    Ok(CheckEvidence {
        d_label: ctx.d.label().to_string(),
        ok: true,
        checked: pairs_checked,
        certificates: serde_json::Value::Null,
        counterexample: None,
    })
}

pub fn check_l1_faint(wit: &LocalizationWitness, d: &CatRef, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    l1_check(&DCtx::build(wit, d, meter)?, meter)
}

pub fn check_l2_faint(wit: &LocalizationWitness, d: &CatRef, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    l2_check(wit, &DCtx::build(wit, d, meter)?, meter)
}

pub fn check_l1prime_strong(wit: &LocalizationWitness, d: &CatRef, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    l1p_check(&DCtx::build(wit, d, meter)?)
}

pub fn check_l2prime(wit: &LocalizationWitness, d: &CatRef, meter: &Meter) -> Result<CheckEvidence, EngineError> {
    l2p_check(wit, &DCtx::build(wit, d, meter)?, meter)
}

/// Runs the four condition checks over every battery member and fills the
/// witness flags. The implication lattice strict => strong and weak,
/// weak => faint is asserted on the computed verdicts; a violation is an
/// engine bug, reported as an inconsistency.
pub fn classify(
    wit: &mut LocalizationWitness,
    battery: &Battery,
    meter: &Meter,
) -> Result<(), EngineError> {
    let mut evidence = Vec::new();
    let mut first_fail: [Option<String>; 4] = [None, None, None, None];
    for d in &battery.members {
        let ctx = DCtx::build(wit, d, meter)?;
        let l1 = l1_check(&ctx, meter)?;
        let l2 = l2_check(wit, &ctx, meter)?;
        let l1p = l1p_check(&ctx)?;
        let l2p = l2p_check(wit, &ctx, meter)?;
        for (slot, ev) in [(0, &l1), (1, &l2), (2, &l1p), (3, &l2p)] {
            if !ev.ok && first_fail[slot].is_none() {
                first_fail[slot] =
                    Some(ev.counterexample.clone().unwrap_or_else(|| ctx.d.label().to_string()));
            }
        }
        evidence.push(DEvidence {
            d_label: d.label().to_string(),
            w_functors: ctx.w_funs.len() as u64,
            loc_functors: ctx.loc_funs.len() as u64,
            l1,
            l2,
            l1p,
            l2p,
        });
    }
    let verified = || Flag::Verified { battery_id: battery.id.clone() };
    let flag = |fails: &[&Option<String>]| -> Flag {
        match fails.iter().find_map(|f| f.as_ref()) {
            Some(c) => Flag::Refuted { counterexample: c.clone() },
            None => verified(),
        }
    };
    let [f1, f2, f1p, f2p] = first_fail;
    wit.flags = Flags {
        faint: flag(&[&f1, &f2]),
        weak: flag(&[&f1, &f2p]),
        strong: flag(&[&f1p]),
        strict: flag(&[&f1p, &f2p]),
    };
    wit.evidence = evidence;

    let f = &wit.flags;
    let implied = |a: &Flag, b: &Flag| !a.is_verified() || b.is_verified();
    if !(implied(&f.strict, &f.strong)
        && implied(&f.strict, &f.weak)
        && implied(&f.weak, &f.faint))
    {
        return Err(EngineError::Inconsistency(
            "verdict implication lattice violated".into(),
        ));
    }
    Ok(())
}

/// The two comparison functors and four isomorphisms relating two
/// localizations of the same (base, W).
#[derive(Debug, Clone)]
pub struct Comparison {
    /// loc1 -> loc2.
    pub to2: Functor,
    /// loc2 -> loc1.
    pub to1: Functor,
    /// L1 => to1 . L2.
    pub eta1: NatTransformation,
    /// L2 => to2 . L1.
    pub eta2: NatTransformation,
    /// to1 . to2 => id_loc1.
    pub round1: NatTransformation,
    /// to2 . to1 => id_loc2.
    pub round2: NatTransformation,
    /// True when both witnesses are strong: functors are mutually inverse
    /// isomorphisms of categories and all four transformations are
    /// identities.
    pub strict: bool,
}

pub(crate) fn find_factorization(
    l_from: &Functor,
    wit_through: &LocalizationWitness,
    meter: &Meter,
) -> Result<(Functor, NatTransformation), EngineError> {
    // Factor l_from: base -> locA through wit_through.l: base -> locB, i.e.
    // find G: locB -> locA and iso eta: l_from => G . wit_through.l.
    let funs = enumerate_functors(&wit_through.loc, l_from.target(), meter)?;
    for g in &funs {
        let comp = Functor::compose(g, &wit_through.l)?;
        if let Some(eta) = enumerate_natural_isos(l_from, &comp, meter)?.into_iter().next() {
            return Ok((g.clone(), eta));
        }
    }
    Err(EngineError::Inconsistency(
        "no comparison factorization found between localization witnesses".into(),
    ))
}

/// Builds the equivalence (or isomorphism) between two localization
/// witnesses over the same base and class.
pub fn compare_localizations(
    w1: &LocalizationWitness,
    w2: &LocalizationWitness,
    meter: &Meter,
) -> Result<Comparison, EngineError> {
    if w1.base.tag() != w2.base.tag() || w1.w != w2.w {
        return Err(EngineError::Mismatch("witnesses over different (base, W)".into()));
    }
    if !w1.flags.faint.is_verified() || !w2.flags.faint.is_verified() {
        return Err(EngineError::NotLocalization(
            "compare_localizations needs both witnesses at least faint-verified".into(),
        ));
    }

    if w1.flags.strong.is_verified() && w2.flags.strong.is_verified() {
        // Strict route: unique on-the-nose factorizations, mutually inverse.
        let to2 = unique_strict_factor(&w2.l, w1, meter)?;
        let to1 = unique_strict_factor(&w1.l, w2, meter)?;
        let round1 = Functor::compose(&to1, &to2)?;
        let round2 = Functor::compose(&to2, &to1)?;
        if !round1.is_identity() || !round2.is_identity() {
            return Err(EngineError::Inconsistency(
                "strict comparison functors are not mutually inverse".into(),
            ));
        }
        return Ok(Comparison {
            eta1: NatTransformation::identity(&Functor::compose(&to1, &w2.l)?),
            eta2: NatTransformation::identity(&Functor::compose(&to2, &w1.l)?),
            round1: NatTransformation::identity(&round1),
            round2: NatTransformation::identity(&round2),
            to2,
            to1,
            strict: true,
        });
    }

    let (to2, eta2) = find_factorization(&w2.l, w1, meter)?;
    let (to1, eta1) = find_factorization(&w1.l, w2, meter)?;

    // round1: to1 . to2 => id with (round1 * L1) . (to1 * eta2) . eta1 = id.
    let round1 = find_round_iso(w1, &to1, &to2, &eta1, &eta2, meter)?;
    let round2 = find_round_iso(w2, &to2, &to1, &eta2, &eta1, meter)?;
    Ok(Comparison { to2, to1, eta1, eta2, round1, round2, strict: false })
}

fn unique_strict_factor(
    l_from: &Functor,
    wit_through: &LocalizationWitness,
    meter: &Meter,
) -> Result<Functor, EngineError> {
    let funs = enumerate_functors(&wit_through.loc, l_from.target(), meter)?;
    let mut hit = None;
    for g in funs {
        if &Functor::compose(&g, &wit_through.l)? == l_from {
            if hit.is_some() {
                return Err(EngineError::Inconsistency(
                    "strict factorization not unique".into(),
                ));
            }
            hit = Some(g);
        }
    }
    hit.ok_or_else(|| EngineError::Inconsistency("strict factorization missing".into()))
}

/// Finds the natural iso back . fwd => id_{wa.loc} compatible with the
/// factorization isos on every base object.
fn find_round_iso(
    wa: &LocalizationWitness,
    back: &Functor,
    fwd: &Functor,
    eta_a: &NatTransformation,
    eta_b: &NatTransformation,
    meter: &Meter,
) -> Result<NatTransformation, EngineError> {
    let composite = Functor::compose(back, fwd)?;
    let ident = Functor::identity(wa.loc.clone());
    for alpha in enumerate_natural_isos(&composite, &ident, meter)? {
        let ok = wa.base.objects().all(|x| {
            // alpha_{L x} . back(eta_b_x) . eta_a_x = id_{L x}
            let lx = wa.l.on_obj(x);
            let lhs = wa.loc.comp(
                alpha.component(lx),
                wa.loc.comp(back.on_mor(eta_b.component(x)), eta_a.component(x)),
            );
            wa.loc.is_identity(lhs)
        });
        if ok {
            return Ok(alpha);
        }
    }
    Err(EngineError::Inconsistency(
        "no round-trip isomorphism compatible with the factorization isos".into(),
    ))
}
