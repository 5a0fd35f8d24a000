//! Cylinder and path objects, the left/right homotopy relations, homotopy
//! partitions on fibrant-cofibrant pairs, and the classical consequences.
//!
//! The engine implements the definitions literally: a homotopy may run
//! through ANY cylinder factorization of the fold map, so all of them are
//! enumerated. The relation being an equivalence, and left agreeing with
//! right on fibrant-cofibrant pairs, are verified on the data rather than
//! assumed; a failure is reported as inconsistent model data.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{EngineError, Meter};
use crate::fincat::{copair, find_coproduct, Coproduct, MorId, ObjId, Product};

use super::{opposite_model, ModelData};

/// A factorization of the fold map X⨿X -> X into a cofibration followed by
/// a weak equivalence.
#[derive(Debug, Clone)]
pub struct CylinderWitness {
    pub x: ObjId,
    pub coprod: Coproduct,
    pub fold: MorId,
    pub z: ObjId,
    pub i: MorId,
    pub w: MorId,
}

/// A factorization of the diagonal X -> X×X into a weak equivalence
/// followed by a fibration.
#[derive(Debug, Clone)]
pub struct PathWitness {
    pub x: ObjId,
    pub prod: Product,
    pub diag: MorId,
    pub z: ObjId,
    pub w: MorId,
    pub j: MorId,
}

/// Every cylinder factorization of the fold map of `x`, in canonical
/// order. When `x` is cofibrant each cylinder object must be cofibrant
/// too; table data violating that is rejected.
pub fn cylinders(md: &ModelData, x: ObjId) -> Result<Vec<CylinderWitness>, EngineError> {
    let c = &md.cat;
    let coprod = find_coproduct(c, x, x).ok_or_else(|| EngineError::NoCoproduct {
        x: c.obj_name(x).to_string(),
        y: c.obj_name(x).to_string(),
    })?;
    let fold = copair(c, &coprod, c.identity(x), c.identity(x))
        .ok_or_else(|| EngineError::Inconsistency("coproduct without a fold map".into()))?;
    let mut out = Vec::new();
    for z in c.objects() {
        for &i in c.hom(coprod.apex, z) {
            if !md.cof.contains(i) {
                continue;
            }
            for &w in c.hom(z, x) {
                if md.w.contains(w) && c.comp(w, i) == fold {
                    if md.is_cofibrant(x) && !md.is_cofibrant(z) {
                        return Err(EngineError::Inconsistency(format!(
                            "cylinder {} of cofibrant {} is not cofibrant",
                            c.obj_name(z),
                            c.obj_name(x)
                        )));
                    }
                    out.push(CylinderWitness { x, coprod, fold, z, i, w });
                }
            }
        }
    }
    Ok(out)
}

/// Every path factorization of the diagonal of `x`: the dual construction,
/// computed on the opposite model.
pub fn paths(md: &ModelData, x: ObjId) -> Result<Vec<PathWitness>, EngineError> {
    let op = opposite_model(md);
    let witnesses = cylinders(&op, x).map_err(|e| match e {
        EngineError::NoCoproduct { x, y } => EngineError::NoProduct { x, y },
        other => other,
    })?;
    Ok(witnesses
        .into_iter()
        .map(|cw| PathWitness {
            x,
            prod: Product { apex: cw.coprod.apex, proj1: cw.coprod.inj1, proj2: cw.coprod.inj2 },
            diag: cw.fold,
            z: cw.z,
            w: cw.w,
            j: cw.i,
        })
        .collect())
}

/// Index positions of `hom(x, y)` by morphism id.
fn hom_index(md: &ModelData, x: ObjId, y: ObjId) -> BTreeMap<MorId, usize> {
    md.cat.hom(x, y).iter().enumerate().map(|(i, &m)| (m, i)).collect()
}

/// Relation matrix of left homotopy on hom(x, y): entry (f, g) is set iff
/// some cylinder of x and H: Z -> y realize f on one end and g on the
/// other.
fn left_matrix(md: &ModelData, x: ObjId, y: ObjId, meter: &Meter) -> Result<Vec<Vec<bool>>, EngineError> {
    let c = &md.cat;
    let idx = hom_index(md, x, y);
    let n = idx.len();
    let mut rel = vec![vec![false; n]; n];
    for cw in cylinders(md, x)? {
        let end1 = c.comp(cw.i, cw.coprod.inj1);
        let end2 = c.comp(cw.i, cw.coprod.inj2);
        meter.charge(c.hom(cw.z, y).len() as u64 + 1)?;
        for &h in c.hom(cw.z, y) {
            let f = c.comp(h, end1);
            let g = c.comp(h, end2);
            rel[idx[&f]][idx[&g]] = true;
        }
    }
    Ok(rel)
}

/// True iff f and g are left homotopic: f⨿g factors through some cylinder.
pub fn left_homotopic(md: &ModelData, f: MorId, g: MorId) -> Result<bool, EngineError> {
    let c = &md.cat;
    if c.dom(f) != c.dom(g) || c.cod(f) != c.cod(g) {
        return Err(EngineError::Mismatch("homotopy needs parallel morphisms".into()));
    }
    let meter = Meter::default();
    let rel = left_matrix(md, c.dom(f), c.cod(f), &meter)?;
    let idx = hom_index(md, c.dom(f), c.cod(f));
    Ok(rel[idx[&f]][idx[&g]])
}

/// True iff f and g are right homotopic: (f, g) factors through some path
/// object.
pub fn right_homotopic(md: &ModelData, f: MorId, g: MorId) -> Result<bool, EngineError> {
    let op = opposite_model(md);
    left_homotopic(&op, f, g).map_err(|e| match e {
        EngineError::NoCoproduct { x, y } => EngineError::NoProduct { x, y },
        other => other,
    })
}

/// A partition of one hom-set into homotopy classes, in canonical order
/// (classes ordered by least member).
#[derive(Debug, Clone)]
pub struct Partition {
    pub classes: Vec<Vec<MorId>>,
    class_of: BTreeMap<MorId, usize>,
}

impl Partition {
    fn from_relation(members: &[MorId], rel: &[Vec<bool>]) -> Partition {
        let mut classes: Vec<Vec<MorId>> = Vec::new();
        let mut class_of = BTreeMap::new();
        for (i, &m) in members.iter().enumerate() {
            if class_of.contains_key(&m) {
                continue;
            }
            let class: Vec<MorId> =
                members.iter().enumerate().filter(|&(j, _)| rel[i][j]).map(|(_, &g)| g).collect();
            let id = classes.len();
            for &g in &class {
                class_of.insert(g, id);
            }
            classes.push(class);
        }
        Partition { classes, class_of }
    }

    pub fn class_of(&self, m: MorId) -> usize {
        self.class_of[&m]
    }

    pub fn same_class(&self, f: MorId, g: MorId) -> bool {
        self.class_of(f) == self.class_of(g)
    }
}

fn check_equivalence(rel: &[Vec<bool>]) -> Result<(), String> {
    let n = rel.len();
    for i in 0..n {
        if !rel[i][i] {
            return Err("not reflexive".into());
        }
        for j in 0..n {
            if rel[i][j] != rel[j][i] {
                return Err("not symmetric".into());
            }
            for k in 0..n {
                if rel[i][j] && rel[j][k] && !rel[i][k] {
                    return Err("not transitive".into());
                }
            }
        }
    }
    Ok(())
}

/// Left-homotopy partition of hom(x, y) for cofibrant x; the relation is
/// verified to be an equivalence, as the theory promises for cofibrant
/// sources.
fn left_partition(md: &ModelData, x: ObjId, y: ObjId, meter: &Meter) -> Result<Partition, EngineError> {
    let rel = left_matrix(md, x, y, meter)?;
    check_equivalence(&rel).map_err(|why| {
        EngineError::Inconsistency(format!(
            "left homotopy on hom({}, {}) is {} though the source is cofibrant",
            md.cat.obj_name(x),
            md.cat.obj_name(y),
            why
        ))
    })?;
    Ok(Partition::from_relation(md.cat.hom(x, y), &rel))
}

/// Homotopy partition of hom(x, y) for fibrant-cofibrant x and y. Checks
/// en route that left and right homotopy agree here and form an
/// equivalence relation.
pub fn homotopy_classes(
    md: &ModelData,
    x: ObjId,
    y: ObjId,
    meter: &Meter,
) -> Result<Partition, EngineError> {
    for v in [x, y] {
        if !md.is_fibrant_cofibrant(v) {
            return Err(EngineError::NotFibrantCofibrant(md.cat.obj_name(v).to_string()));
        }
    }
    let left = left_matrix(md, x, y, meter)?;
    let op = opposite_model(md);
    let right = left_matrix(&op, y, x, meter).map_err(|e| match e {
        EngineError::NoCoproduct { x, y } => EngineError::NoProduct { x, y },
        other => other,
    })?;
    if left != right {
        return Err(EngineError::Inconsistency(format!(
            "left and right homotopy disagree on hom({}, {}) though both objects are fibrant-cofibrant",
            md.cat.obj_name(x),
            md.cat.obj_name(y)
        )));
    }
    check_equivalence(&left).map_err(|why| {
        EngineError::Inconsistency(format!(
            "homotopy on hom({}, {}) is {}",
            md.cat.obj_name(x),
            md.cat.obj_name(y),
            why
        ))
    })?;
    Ok(Partition::from_relation(md.cat.hom(x, y), &left))
}

/// Homotopy partitions for every fibrant-cofibrant pair, built once.
#[derive(Debug, Clone)]
pub struct HomotopyTable {
    pub fc: Vec<ObjId>,
    parts: BTreeMap<(ObjId, ObjId), Partition>,
}

impl HomotopyTable {
    pub fn build(md: &ModelData, meter: &Meter) -> Result<HomotopyTable, EngineError> {
        let fc = md.fc_objects();
        let mut parts = BTreeMap::new();
        for &x in &fc {
            for &y in &fc {
                parts.insert((x, y), homotopy_classes(md, x, y, meter)?);
            }
        }
        Ok(HomotopyTable { fc, parts })
    }

    pub fn partition(&self, x: ObjId, y: ObjId) -> &Partition {
        &self.parts[&(x, y)]
    }

    pub fn homotopic(&self, md: &ModelData, f: MorId, g: MorId) -> bool {
        self.partition(md.cat.dom(f), md.cat.cod(f)).same_class(f, g)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WhiteheadReport {
    pub checked: u64,
    pub ok: bool,
    pub counterexamples: Vec<String>,
}

/// For every morphism between fibrant-cofibrant objects: marked as a weak
/// equivalence iff it is a homotopy equivalence.
pub fn check_whitehead(md: &ModelData, meter: &Meter) -> Result<WhiteheadReport, EngineError> {
    let c = &md.cat;
    let table = HomotopyTable::build(md, meter)?;
    let mut checked = 0u64;
    let mut counterexamples = Vec::new();
    for &x in &table.fc {
        for &y in &table.fc {
            for &f in c.hom(x, y) {
                checked += 1;
                meter.charge(c.hom(y, x).len() as u64 + 1)?;
                let fwd_ids = table.partition(x, x);
                let bwd_ids = table.partition(y, y);
                let is_hequiv = c.hom(y, x).iter().any(|&g| {
                    fwd_ids.same_class(c.comp(g, f), c.identity(x))
                        && bwd_ids.same_class(c.comp(f, g), c.identity(y))
                });
                if md.w.contains(f) != is_hequiv {
                    counterexamples.push(format!(
                        "{}: marked {}, homotopy equivalence {}",
                        c.mor_name(f),
                        md.w.contains(f),
                        is_hequiv
                    ));
                }
            }
        }
    }
    Ok(WhiteheadReport { checked, ok: counterexamples.is_empty(), counterexamples })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceReport {
    pub checked: u64,
    pub ok: bool,
    pub counterexamples: Vec<String>,
}

/// For every cofibrant x and trivial fibration γ: y -> z, post-composition
/// by γ must descend to a bijection between the left-homotopy classes of
/// hom(x, y) and hom(x, z).
pub fn check_trivfib_correspondence(
    md: &ModelData,
    meter: &Meter,
) -> Result<CorrespondenceReport, EngineError> {
    let c = &md.cat;
    let mut checked = 0u64;
    let mut counterexamples = Vec::new();
    for x in c.objects() {
        if !md.is_cofibrant(x) {
            continue;
        }
        for gamma in c.morphisms() {
            if !md.is_trivial_fibration(gamma) {
                continue;
            }
            checked += 1;
            let (y, z) = (c.dom(gamma), c.cod(gamma));
            let src = left_partition(md, x, y, meter)?;
            let dst = left_partition(md, x, z, meter)?;
            // well-defined: constant on classes
            let mut images: Vec<Option<usize>> = vec![None; src.classes.len()];
            let mut fail = None;
            for &u in c.hom(x, y) {
                let ci = src.class_of(u);
                let im = dst.class_of(c.comp(gamma, u));
                match images[ci] {
                    None => images[ci] = Some(im),
                    Some(prev) if prev != im => {
                        fail = Some("not well defined on classes".to_string());
                        break;
                    }
                    _ => {}
                }
            }
            if fail.is_none() {
                let mut seen = vec![false; dst.classes.len()];
                for im in images.iter().flatten() {
                    if seen[*im] {
                        fail = Some("not injective on classes".to_string());
                        break;
                    }
                    seen[*im] = true;
                }
                if fail.is_none() && seen.iter().any(|s| !s) {
                    fail = Some("not surjective on classes".to_string());
                }
            }
            if let Some(why) = fail {
                counterexamples.push(format!(
                    "x = {}, γ = {}: {}",
                    c.obj_name(x),
                    c.mor_name(gamma),
                    why
                ));
            }
        }
    }
    Ok(CorrespondenceReport { checked, ok: counterexamples.is_empty(), counterexamples })
}
