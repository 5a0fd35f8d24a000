//! Model-structure data on a finite category: axiom validation,
//! (co)fibrant replacements, lifting solvers, cylinder and path objects,
//! homotopy relations and the classical consequences (Whitehead, the
//! trivial-fibration correspondence on homotopy classes).
//!
//! Everything right-handed is computed by running the left-handed
//! construction on the opposite category with the cofibration and fibration
//! classes swapped; morphism and object ids are shared between the two
//! presentations, so results transfer back verbatim.

mod htpy;

use serde::Serialize;

use crate::error::{EngineError, Meter};
use crate::fincat::{
    find_initial, find_terminal, opposite, validate_functor, CatRef, Functor, InstanceData,
    MorId, MorphismClass, NatTransformation, ObjId,
};

pub use htpy::{
    check_trivfib_correspondence, check_whitehead, cylinders, homotopy_classes, left_homotopic,
    paths, right_homotopic, CorrespondenceReport, CylinderWitness, HomotopyTable, Partition,
    PathWitness, WhiteheadReport,
};

/// One replacement functor with its comparison transformation: for the
/// cofibrant side `to_id: fun => id`, for the fibrant side `to_id: id =>
/// fun` (stored in that direction by the loader).
#[derive(Debug, Clone)]
pub struct Replacement {
    pub fun: Functor,
    pub nat: NatTransformation,
}

/// A candidate model structure given entirely by tables.
#[derive(Debug, Clone)]
pub struct ModelData {
    pub cat: CatRef,
    pub w: MorphismClass,
    pub cof: MorphismClass,
    pub fib: MorphismClass,
    pub init: ObjId,
    pub term: ObjId,
    /// Per morphism: (a, b) with b∘a = f, a a cofibration, b a trivial
    /// fibration.
    pub fact1: Vec<(MorId, MorId)>,
    /// Per morphism: (a, b) with b∘a = f, a a trivial cofibration, b a
    /// fibration.
    pub fact2: Vec<(MorId, MorId)>,
    pub qfun: Option<Replacement>,
    pub rfun: Option<Replacement>,
}

impl ModelData {
    pub fn from_instance(inst: &InstanceData) -> Result<ModelData, EngineError> {
        let sec = inst.model.as_ref().ok_or_else(|| {
            EngineError::PreconditionFailed(format!("instance {} has no model data", inst.label))
        })?;
        let cat = inst.cat.clone();
        let build_rep = |obj_map: &Vec<ObjId>,
                         mor_map: &Vec<MorId>,
                         comps: &Vec<MorId>,
                         to_id: bool|
         -> Result<Replacement, EngineError> {
            let fun = Functor::new(cat.clone(), cat.clone(), obj_map.clone(), mor_map.clone())
                .map_err(|e| EngineError::Inconsistency(format!("replacement functor: {e}")))?;
            let ident = Functor::identity(cat.clone());
            let nat = if to_id {
                NatTransformation::new(fun.clone(), ident, comps.clone())
            } else {
                NatTransformation::new(ident, fun.clone(), comps.clone())
            }
            .map_err(|e| EngineError::Inconsistency(format!("replacement transformation: {e}")))?;
            Ok(Replacement { fun, nat })
        };
        let qfun = match &sec.q {
            Some(r) => Some(build_rep(&r.obj_map, &r.mor_map, &r.components, true)?),
            None => None,
        };
        let rfun = match &sec.r {
            Some(r) => Some(build_rep(&r.obj_map, &r.mor_map, &r.components, false)?),
            None => None,
        };
        Ok(ModelData {
            cat,
            w: sec.w.clone(),
            cof: sec.cof.clone(),
            fib: sec.fib.clone(),
            init: sec.initial,
            term: sec.terminal,
            fact1: sec.fact1.clone(),
            fact2: sec.fact2.clone(),
            qfun,
            rfun,
        })
    }

    /// The unique morphism from the initial object.
    pub fn init_to(&self, x: ObjId) -> MorId {
        *self.cat.hom(self.init, x).first().expect("declared initial object has a map everywhere")
    }

    /// The unique morphism to the terminal object.
    pub fn to_term(&self, x: ObjId) -> MorId {
        *self.cat.hom(x, self.term).first().expect("declared terminal object has a map from everywhere")
    }

    pub fn is_cofibrant(&self, x: ObjId) -> bool {
        self.cof.contains(self.init_to(x))
    }

    pub fn is_fibrant(&self, x: ObjId) -> bool {
        self.fib.contains(self.to_term(x))
    }

    pub fn is_fibrant_cofibrant(&self, x: ObjId) -> bool {
        self.is_cofibrant(x) && self.is_fibrant(x)
    }

    pub fn is_trivial_fibration(&self, m: MorId) -> bool {
        self.fib.contains(m) && self.w.contains(m)
    }

    pub fn is_trivial_cofibration(&self, m: MorId) -> bool {
        self.cof.contains(m) && self.w.contains(m)
    }

    /// Objects that are both fibrant and cofibrant, in canonical order.
    pub fn fc_objects(&self) -> Vec<ObjId> {
        self.cat.objects().filter(|&x| self.is_fibrant_cofibrant(x)).collect()
    }
}

/// The same data presented over the opposite category: cofibrations and
/// fibrations swap, initial and terminal swap, the two factorization tables
/// swap with their halves reversed, and the replacement functors trade
/// places.
pub fn opposite_model(md: &ModelData) -> ModelData {
    let op = opposite(&md.cat);
    let flip_class = |cls: &MorphismClass| MorphismClass::new(&op, cls.members());
    let flip_rep = |rep: &Replacement, to_id: bool| -> Replacement {
        let fun = Functor::new(
            op.clone(),
            op.clone(),
            rep.fun.obj_map().to_vec(),
            rep.fun.mor_map().to_vec(),
        )
        .expect("opposite functor maps carry over");
        let ident = Functor::identity(op.clone());
        let comps = rep.nat.components().to_vec();
        let nat = if to_id {
            NatTransformation::new(fun.clone(), ident, comps)
        } else {
            NatTransformation::new(ident, fun.clone(), comps)
        }
        .expect("opposite transformation components carry over");
        Replacement { fun, nat }
    };
    ModelData {
        cat: op.clone(),
        w: flip_class(&md.w),
        cof: flip_class(&md.fib),
        fib: flip_class(&md.cof),
        init: md.term,
        term: md.init,
        fact1: md.fact2.iter().map(|&(a, b)| (b, a)).collect(),
        fact2: md.fact1.iter().map(|&(a, b)| (b, a)).collect(),
        qfun: md.rfun.as_ref().map(|r| flip_rep(r, true)),
        rfun: md.qfun.as_ref().map(|r| flip_rep(r, false)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub ok: bool,
    pub checked: u64,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidityReport {
    pub items: Vec<AxiomCheck>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.items.iter().find(|i| !i.ok)
    }
}

struct Checker<'a> {
    md: &'a ModelData,
    meter: &'a Meter,
    items: Vec<AxiomCheck>,
    /// Both declared universal objects check out; replacement checks need
    /// the maps in and out of them, so they are skipped otherwise.
    uni_ok: bool,
}

impl<'a> Checker<'a> {
    fn push(&mut self, name: &str, checked: u64, counterexample: Option<String>) {
        self.items.push(AxiomCheck {
            name: name.to_string(),
            ok: counterexample.is_none(),
            checked,
            counterexample,
        });
    }

    fn universal_objects(&mut self) -> Result<(), EngineError> {
        let c = &self.md.cat;
        self.meter.charge(c.n_objects() as u64 * 2)?;
        let init_ok = find_initial(c).map(|u| u.iso_class.contains(&self.md.init)).unwrap_or(false)
            && c.objects().all(|x| c.hom(self.md.init, x).len() == 1);
        self.push(
            "initial_object",
            c.n_objects() as u64,
            (!init_ok).then(|| format!("{} is not initial", c.obj_name(self.md.init))),
        );
        let term_ok = find_terminal(c).map(|u| u.iso_class.contains(&self.md.term)).unwrap_or(false)
            && c.objects().all(|x| c.hom(x, self.md.term).len() == 1);
        self.push(
            "terminal_object",
            c.n_objects() as u64,
            (!term_ok).then(|| format!("{} is not terminal", c.obj_name(self.md.term))),
        );
        self.uni_ok = init_ok && term_ok;
        Ok(())
    }

    fn isos_in_classes(&mut self) -> Result<(), EngineError> {
        let c = &self.md.cat;
        let isos = c.isos();
        self.meter.charge(isos.len() as u64)?;
        let bad = isos.iter().find(|&&m| {
            !(self.md.w.contains(m) && self.md.cof.contains(m) && self.md.fib.contains(m))
        });
        self.push(
            "classes_contain_isos",
            isos.len() as u64,
            bad.map(|&m| format!("iso {} missing from some class", c.mor_name(m))),
        );
        Ok(())
    }

    fn two_out_of_three(&mut self) -> Result<(), EngineError> {
        let c = &self.md.cat;
        let mut checked = 0u64;
        let mut bad = None;
        'outer: for f in c.morphisms() {
            for g in c.morphisms() {
                if c.cod(f) != c.dom(g) {
                    continue;
                }
                checked += 1;
                let h = c.comp(g, f);
                let m = [self.md.w.contains(f), self.md.w.contains(g), self.md.w.contains(h)];
                let count = m.iter().filter(|&&b| b).count();
                if count == 2 {
                    bad = Some(format!(
                        "{} then {}: two of (f, g, g∘f) marked, third is not",
                        c.mor_name(f),
                        c.mor_name(g)
                    ));
                    break 'outer;
                }
            }
        }
        self.meter.charge(checked)?;
        self.push("two_out_of_three", checked, bad);
        Ok(())
    }

    fn retract_closure(&mut self, name: &str, cls: &MorphismClass) -> Result<(), EngineError> {
        let c = &self.md.cat;
        // section/retraction pairs per object pair, computed once
        let n = c.n_objects() as usize;
        let mut sections: Vec<Vec<(MorId, MorId)>> = vec![Vec::new(); n * n];
        for x in c.objects() {
            for x2 in c.objects() {
                let mut pairs = Vec::new();
                for &i in c.hom(x, x2) {
                    for &r in c.hom(x2, x) {
                        if c.is_identity(c.comp(r, i)) {
                            pairs.push((i, r));
                        }
                    }
                }
                sections[(x.0 as usize) * n + x2.0 as usize] = pairs;
            }
        }
        let mut checked = 0u64;
        let mut bad = None;
        'outer: for g in cls.members() {
            for f in c.morphisms() {
                if cls.contains(f) {
                    continue;
                }
                let (x, y) = (c.dom(f), c.cod(f));
                let (x2, y2) = (c.dom(g), c.cod(g));
                for &(i, r) in &sections[(x.0 as usize) * n + x2.0 as usize] {
                    for &(j, s) in &sections[(y.0 as usize) * n + y2.0 as usize] {
                        checked += 1;
                        if c.comp(g, i) == c.comp(j, f) && c.comp(s, g) == c.comp(f, r) {
                            bad = Some(format!(
                                "{} is a retract of {} but not in the class",
                                c.mor_name(f),
                                c.mor_name(g)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        self.meter.charge(checked.max(1))?;
        self.push(name, checked, bad);
        Ok(())
    }

    fn lifting(&mut self, name: &str, left_trivial: bool) -> Result<(), EngineError> {
        let c = &self.md.cat;
        let lefts: Vec<MorId> = c
            .morphisms()
            .filter(|&m| {
                if left_trivial {
                    self.md.is_trivial_cofibration(m)
                } else {
                    self.md.cof.contains(m)
                }
            })
            .collect();
        let rights: Vec<MorId> = c
            .morphisms()
            .filter(|&m| {
                if left_trivial {
                    self.md.fib.contains(m)
                } else {
                    self.md.is_trivial_fibration(m)
                }
            })
            .collect();
        let mut checked = 0u64;
        let mut bad = None;
        'outer: for &l in &lefts {
            for &r in &rights {
                let (a, b) = (c.dom(l), c.cod(l));
                let (x, y) = (c.dom(r), c.cod(r));
                for &top in c.hom(a, x) {
                    for &bottom in c.hom(b, y) {
                        if c.comp(r, top) != c.comp(bottom, l) {
                            continue;
                        }
                        checked += 1;
                        let filler = c
                            .hom(b, x)
                            .iter()
                            .find(|&&h| c.comp(h, l) == top && c.comp(r, h) == bottom);
                        if filler.is_none() {
                            bad = Some(format!(
                                "square (top {}, left {}, bottom {}, right {}) has no filler",
                                c.mor_name(top),
                                c.mor_name(l),
                                c.mor_name(bottom),
                                c.mor_name(r)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        self.meter.charge(checked.max(1))?;
        self.push(name, checked, bad);
        Ok(())
    }

    fn factorizations(
        &mut self,
        name: &str,
        table: &[(MorId, MorId)],
        first_trivial: bool,
    ) -> Result<(), EngineError> {
        let c = &self.md.cat;
        let mut bad = None;
        if table.len() != c.n_morphisms() {
            bad = Some(format!("table covers {} of {} morphisms", table.len(), c.n_morphisms()));
        } else {
            for f in c.morphisms() {
                let (a, b) = table[f.0 as usize];
                let a_ok = if first_trivial {
                    self.md.is_trivial_cofibration(a)
                } else {
                    self.md.cof.contains(a)
                };
                let b_ok = if first_trivial {
                    self.md.fib.contains(b)
                } else {
                    self.md.is_trivial_fibration(b)
                };
                let composes = c.cod(a) == c.dom(b) && c.comp(b, a) == f;
                if !(a_ok && b_ok && composes) {
                    bad = Some(format!("factorization of {} violates the axiom", c.mor_name(f)));
                    break;
                }
            }
        }
        self.meter.charge(c.n_morphisms() as u64)?;
        self.push(name, c.n_morphisms() as u64, bad);
        Ok(())
    }

    fn replacement(&mut self, name: &str, cofibrant_side: bool) -> Result<(), EngineError> {
        let rep = if cofibrant_side { &self.md.qfun } else { &self.md.rfun };
        let Some(rep) = rep else {
            return Ok(());
        };
        if !self.uni_ok {
            self.push(name, 0, Some("not checkable without universal objects".into()));
            return Ok(());
        }
        let c = &self.md.cat;
        let mut bad = None;
        if !validate_functor(&rep.fun).is_valid() {
            bad = Some("replacement is not a functor".into());
        } else if !rep.nat.is_natural() {
            bad = Some("replacement comparison is not natural".into());
        } else {
            for x in c.objects() {
                let rx = rep.fun.on_obj(x);
                let comp_ok = if cofibrant_side {
                    self.md.is_cofibrant(rx) && self.md.is_trivial_fibration(rep.nat.component(x))
                } else {
                    self.md.is_fibrant(rx) && self.md.is_trivial_cofibration(rep.nat.component(x))
                };
                if !comp_ok {
                    bad = Some(format!("replacement fails at {}", c.obj_name(x)));
                    break;
                }
            }
        }
        self.meter.charge(c.n_objects() as u64)?;
        self.push(name, c.n_objects() as u64, bad);
        Ok(())
    }
}

/// Runs every axiom check and reports them itemized, with a minimal
/// counterexample for each failure.
pub fn validate_model(md: &ModelData, meter: &Meter) -> Result<ValidityReport, EngineError> {
    for cls in [&md.w, &md.cof, &md.fib] {
        cls.check_parent(&md.cat)?;
    }
    let mut ck = Checker { md, meter, items: Vec::new(), uni_ok: true };
    ck.universal_objects()?;
    ck.isos_in_classes()?;
    ck.two_out_of_three()?;
    let (w, cof, fib) = (md.w.clone(), md.cof.clone(), md.fib.clone());
    ck.retract_closure("retract_closure_w", &w)?;
    ck.retract_closure("retract_closure_cof", &cof)?;
    ck.retract_closure("retract_closure_fib", &fib)?;
    ck.lifting("lifting_cof_trivfib", false)?;
    ck.lifting("lifting_trivcof_fib", true)?;
    ck.factorizations("factorization_cof_trivfib", &md.fact1, false)?;
    ck.factorizations("factorization_trivcof_fib", &md.fact2, true)?;
    ck.replacement("q_replacement", true)?;
    ck.replacement("r_replacement", false)?;
    Ok(ValidityReport { items: ck.items })
}

/// Cofibrant replacement: through the supplied functor when present, else
/// the middle of the cofibration / trivial-fibration factorization of the
/// map out of the initial object. Returns (QX, q_X: QX -> X).
pub fn cofibrant_replace(md: &ModelData, x: ObjId) -> (ObjId, MorId) {
    if let Some(rep) = &md.qfun {
        return (rep.fun.on_obj(x), rep.nat.component(x));
    }
    let (a, b) = md.fact1[md.init_to(x).0 as usize];
    (md.cat.cod(a), b)
}

/// Fibrant replacement. Returns (RX, r_X: X -> RX).
pub fn fibrant_replace(md: &ModelData, x: ObjId) -> (ObjId, MorId) {
    if let Some(rep) = &md.rfun {
        return (rep.fun.on_obj(x), rep.nat.component(x));
    }
    let (a, _) = md.fact2[md.to_term(x).0 as usize];
    (md.cat.cod(a), a)
}

/// Identity on objects that are already cofibrant.
pub fn local_cofibrant_replace(md: &ModelData, x: ObjId) -> (ObjId, MorId) {
    if md.is_cofibrant(x) {
        (x, md.cat.identity(x))
    } else {
        cofibrant_replace(md, x)
    }
}

/// Identity on objects that are already fibrant.
pub fn local_fibrant_replace(md: &ModelData, x: ObjId) -> (ObjId, MorId) {
    if md.is_fibrant(x) {
        (x, md.cat.identity(x))
    } else {
        fibrant_replace(md, x)
    }
}

/// A commuting lifting square: left: A -> B and right: X -> Y vertical,
/// top: A -> X, bottom: B -> Y, right∘top = bottom∘left. A filler is
/// h: B -> X with h∘left = top and right∘h = bottom.
#[derive(Debug, Clone, Copy)]
pub struct Square {
    pub top: MorId,
    pub left: MorId,
    pub bottom: MorId,
    pub right: MorId,
}

/// Least filler of a valid lifting square. A missing filler on validated
/// model data is a contradiction and is reported as such.
pub fn solve_lifting(md: &ModelData, sq: Square) -> Result<MorId, EngineError> {
    let c = &md.cat;
    let classes_ok = (md.cof.contains(sq.left) && md.is_trivial_fibration(sq.right))
        || (md.is_trivial_cofibration(sq.left) && md.fib.contains(sq.right));
    if !classes_ok {
        return Err(EngineError::InvalidSquare(format!(
            "left {} / right {} do not match either lifting axiom",
            c.mor_name(sq.left),
            c.mor_name(sq.right)
        )));
    }
    let typed = c.dom(sq.top) == c.dom(sq.left)
        && c.cod(sq.top) == c.dom(sq.right)
        && c.dom(sq.bottom) == c.cod(sq.left)
        && c.cod(sq.bottom) == c.cod(sq.right);
    if !typed || c.comp(sq.right, sq.top) != c.comp(sq.bottom, sq.left) {
        return Err(EngineError::InvalidSquare("square does not commute".into()));
    }
    c.hom(c.cod(sq.left), c.dom(sq.right))
        .iter()
        .copied()
        .find(|&h| c.comp(h, sq.left) == sq.top && c.comp(sq.right, h) == sq.bottom)
        .ok_or_else(|| {
            EngineError::Inconsistency(
                "no filler for a square the lifting axiom covers; model data is invalid".into(),
            )
        })
}

/// The lift of f: X -> Y to local cofibrant replacements:
/// C̃f: C̃X -> C̃Y with c_Y∘C̃f = f∘c_X.
pub fn lift_cf(md: &ModelData, f: MorId) -> Result<MorId, EngineError> {
    let c = &md.cat;
    let (cx, c_x) = local_cofibrant_replace(md, c.dom(f));
    let (cy, c_y) = local_cofibrant_replace(md, c.cod(f));
    solve_lifting(
        md,
        Square {
            top: md.init_to(cy),
            left: md.init_to(cx),
            bottom: c.comp(f, c_x),
            right: c_y,
        },
    )
    .map_err(|e| match e {
        // the outer square always satisfies the axiom here
        EngineError::InvalidSquare(d) => EngineError::Inconsistency(d),
        other => other,
    })
}

/// The further lift of C̃f to local fibrant replacements:
/// F̃C̃f: F̃C̃X -> F̃C̃Y with F̃C̃f∘f_{C̃X} = f_{C̃Y}∘C̃f.
pub fn lift_fcf(md: &ModelData, f: MorId) -> Result<MorId, EngineError> {
    let c = &md.cat;
    let cf = lift_cf(md, f)?;
    let (fcx, f_cx) = local_fibrant_replace(md, c.dom(cf));
    let (fcy, f_cy) = local_fibrant_replace(md, c.cod(cf));
    solve_lifting(
        md,
        Square {
            top: c.comp(f_cy, cf),
            left: f_cx,
            bottom: md.to_term(fcx),
            right: md.to_term(fcy),
        },
    )
    .map_err(|e| match e {
        EngineError::InvalidSquare(d) => EngineError::Inconsistency(d),
        other => other,
    })
}

#[cfg(test)]
mod tests;
