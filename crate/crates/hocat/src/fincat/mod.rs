//! Finite categories as explicit total composition tables.
//!
//! Objects and morphisms are dense integer ids into immutable tables, and
//! every categorical query is a table lookup. A category is built once,
//! shape-checked, and then shared through [`CatRef`]; a session-unique tag on
//! each category catches accidental mixing of ids across categories.
//!
//! Construction rejects malformed tables (non-dense ids, partial or
//! over-defined composition, mistyped entries). The algebraic laws are not
//! part of construction: [`validate_category`] reports violations as data so
//! that a caller can show the offending triple instead of failing opaquely.

mod functor;
mod io;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use functor::{
    validate_functor, FunctorLaw, FunctorReport, Functor, NatTransformation,
};
pub use io::{
    load_instance, parse_instance, serialize_instance, FunctorFile, InstanceData, LoadError,
    ModelSection, ReplacementSection,
};
pub use search::{
    enumerate_functors, enumerate_functors_with_fixed_objects, enumerate_nat_transformations,
    enumerate_natural_isos, find_isomorphism,
};

use crate::error::EngineError;

/// Shared handle to an immutable finite category.
pub type CatRef = Arc<FinCategory>;

/// Object id, dense in `0..n_objects` within one category.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ObjId(pub u32);

/// Morphism id, dense in `0..n_morphisms` within one category.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MorId(pub u32);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

const NO_MOR: u32 = u32::MAX;

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

/// Structural defects that make a table unusable as a category.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("morphism `{0}` refers to a missing object id")]
    BadEndpoint(String),
    #[error("object `{0}` has a mistyped or missing identity morphism")]
    BadIdentity(String),
    #[error("composition entry ({g} after {f}) is not composable")]
    NotComposable { g: String, f: String },
    #[error("composition entry ({g} after {f}) given twice")]
    DuplicateComposition { g: String, f: String },
    #[error("composition table is partial: no entry for ({g} after {f})")]
    PartialComposition { g: String, f: String },
    #[error("composite of ({g} after {f}) has the wrong endpoints")]
    MistypedComposite { g: String, f: String },
    #[error("map has wrong length: expected {expected}, got {got}")]
    BadMapLength { expected: usize, got: usize },
    #[error("map entry is not a valid id")]
    BadMapEntry,
    #[error("mistyped map entry: {0}")]
    MistypedMapEntry(String),
}

/// An immutable finite category.
pub struct FinCategory {
    tag: u64,
    label: String,
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<MorId>,
    /// Row-major `n_mor x n_mor` table; `comp[g][f]` is `g after f`.
    comp: Vec<u32>,
    /// `hom[x][y]`, morphism ids sorted ascending.
    hom: Vec<Vec<MorId>>,
    /// Morphisms with the given domain, sorted ascending.
    outgoing: Vec<Vec<MorId>>,
    /// Morphisms with the given codomain, sorted ascending.
    incoming: Vec<Vec<MorId>>,
}

impl FinCategory {
    /// Builds a category from raw tables and shape-checks it.
    ///
    /// `morphisms` lists `(name, dom, cod)` in id order, `identities` gives
    /// the identity morphism id per object, and `compositions` lists
    /// `(g, f, g_after_f)` triples that must cover the composable pairs
    /// exactly once.
    pub fn new(
        label: impl Into<String>,
        obj_names: Vec<String>,
        morphisms: Vec<(String, u32, u32)>,
        identities: Vec<u32>,
        compositions: &[(u32, u32, u32)],
    ) -> Result<FinCategory, ShapeError> {
        let n = obj_names.len();
        let m = morphisms.len();
        let mut seen = BTreeSet::new();
        for name in &obj_names {
            if !seen.insert(name.clone()) {
                return Err(ShapeError::DuplicateName(name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut mor_names = Vec::with_capacity(m);
        let mut dom = Vec::with_capacity(m);
        let mut cod = Vec::with_capacity(m);
        for (name, d, c) in morphisms {
            if !seen.insert(name.clone()) {
                return Err(ShapeError::DuplicateName(name.clone()));
            }
            if d as usize >= n || c as usize >= n {
                return Err(ShapeError::BadEndpoint(name));
            }
            mor_names.push(name);
            dom.push(ObjId(d));
            cod.push(ObjId(c));
        }
        if identities.len() != n {
            return Err(ShapeError::BadMapLength { expected: n, got: identities.len() });
        }
        let mut identity = Vec::with_capacity(n);
        for (x, &i) in identities.iter().enumerate() {
            let ok = (i as usize) < m && dom[i as usize] == ObjId(x as u32) && cod[i as usize] == ObjId(x as u32);
            if !ok {
                return Err(ShapeError::BadIdentity(obj_names[x].clone()));
            }
            identity.push(MorId(i));
        }
        let mut comp = vec![NO_MOR; m * m];
        for &(g, f, gf) in compositions {
            let (g, f, gf) = (g as usize, f as usize, gf as usize);
            if g >= m || f >= m || gf >= m {
                return Err(ShapeError::BadMapEntry);
            }
            if cod[f] != dom[g] {
                return Err(ShapeError::NotComposable {
                    g: mor_names[g].clone(),
                    f: mor_names[f].clone(),
                });
            }
            if comp[g * m + f] != NO_MOR {
                return Err(ShapeError::DuplicateComposition {
                    g: mor_names[g].clone(),
                    f: mor_names[f].clone(),
                });
            }
            if dom[gf] != dom[f] || cod[gf] != cod[g] {
                return Err(ShapeError::MistypedComposite {
                    g: mor_names[g].clone(),
                    f: mor_names[f].clone(),
                });
            }
            comp[g * m + f] = gf as u32;
        }
        for g in 0..m {
            for f in 0..m {
                if cod[f] == dom[g] && comp[g * m + f] == NO_MOR {
                    return Err(ShapeError::PartialComposition {
                        g: mor_names[g].clone(),
                        f: mor_names[f].clone(),
                    });
                }
            }
        }
        let mut hom = vec![Vec::new(); n * n];
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for i in 0..m {
            hom[dom[i].0 as usize * n + cod[i].0 as usize].push(MorId(i as u32));
            outgoing[dom[i].0 as usize].push(MorId(i as u32));
            incoming[cod[i].0 as usize].push(MorId(i as u32));
        }
        Ok(FinCategory {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            label: label.into(),
            obj_names,
            mor_names,
            dom,
            cod,
            identity,
            comp,
            hom,
            outgoing,
            incoming,
        })
    }

    pub fn into_ref(self) -> CatRef {
        Arc::new(self)
    }

    /// Session-unique identity of this category value.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    /// Display label, not part of structural equality.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_objects(&self) -> usize {
        self.obj_names.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.mor_names.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.n_objects() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        (0..self.n_morphisms() as u32).map(MorId)
    }

    pub fn obj_name(&self, x: ObjId) -> &str {
        &self.obj_names[x.0 as usize]
    }

    pub fn mor_name(&self, m: MorId) -> &str {
        &self.mor_names[m.0 as usize]
    }

    pub fn obj_by_name(&self, name: &str) -> Option<ObjId> {
        self.obj_names.iter().position(|n| n == name).map(|i| ObjId(i as u32))
    }

    pub fn mor_by_name(&self, name: &str) -> Option<MorId> {
        self.mor_names.iter().position(|n| n == name).map(|i| MorId(i as u32))
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.dom[m.0 as usize]
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.cod[m.0 as usize]
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identity[x.0 as usize]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.dom(m).0 as usize] == m
    }

    /// `g after f` if composable.
    pub fn try_comp(&self, g: MorId, f: MorId) -> Option<MorId> {
        let m = self.n_morphisms();
        let v = self.comp[g.0 as usize * m + f.0 as usize];
        if v == NO_MOR {
            None
        } else {
            Some(MorId(v))
        }
    }

    /// `g after f`; panics on non-composable ids (an engine bug, not input).
    pub fn comp(&self, g: MorId, f: MorId) -> MorId {
        self.try_comp(g, f).unwrap_or_else(|| {
            panic!(
                "non-composable pair in {}: {} after {}",
                self.label,
                self.mor_name(g),
                self.mor_name(f)
            )
        })
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.hom[x.0 as usize * self.n_objects() + y.0 as usize]
    }

    pub fn outgoing(&self, x: ObjId) -> &[MorId] {
        &self.outgoing[x.0 as usize]
    }

    pub fn incoming(&self, y: ObjId) -> &[MorId] {
        &self.incoming[y.0 as usize]
    }

    /// Two-sided inverse of `f`, if any.
    pub fn inverse_of(&self, f: MorId) -> Option<MorId> {
        let (x, y) = (self.dom(f), self.cod(f));
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.comp(g, f) == self.identity(x) && self.comp(f, g) == self.identity(y))
    }

    pub fn is_iso(&self, f: MorId) -> bool {
        self.inverse_of(f).is_some()
    }

    /// All isomorphisms, sorted.
    pub fn isos(&self) -> Vec<MorId> {
        self.morphisms().filter(|&f| self.is_iso(f)).collect()
    }

    /// Composes a path given in diagrammatic order (first step first),
    /// starting at `start`; the empty path yields the identity.
    pub fn comp_path(&self, start: ObjId, path: &[MorId]) -> Option<MorId> {
        let mut acc = self.identity(start);
        for &step in path {
            acc = self.try_comp(step, acc)?;
        }
        Some(acc)
    }
}

impl PartialEq for FinCategory {
    /// Structural equality of the tables; labels and tags are ignored.
    fn eq(&self, other: &FinCategory) -> bool {
        self.obj_names == other.obj_names
            && self.mor_names == other.mor_names
            && self.dom == other.dom
            && self.cod == other.cod
            && self.identity == other.identity
            && self.comp == other.comp
    }
}

impl Eq for FinCategory {}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCategory({}, {} objects, {} morphisms)",
            self.label,
            self.n_objects(),
            self.n_morphisms()
        )
    }
}

/// A violated category law, with the witnessing ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryLaw {
    LeftIdentity { f: MorId },
    RightIdentity { f: MorId },
    Associativity { h: MorId, g: MorId, f: MorId },
}

/// Outcome of [`validate_category`]; violations are data, not errors.
#[derive(Debug, Clone, Default)]
pub struct CategoryReport {
    pub violations: Vec<CategoryLaw>,
}

impl CategoryReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the unit and associativity laws over the whole table.
///
/// Exactness of the table (entries on exactly the composable pairs) is
/// already enforced by construction.
pub fn validate_category(c: &FinCategory) -> CategoryReport {
    let mut violations = Vec::new();
    for f in c.morphisms() {
        if c.comp(c.identity(c.cod(f)), f) != f {
            violations.push(CategoryLaw::LeftIdentity { f });
        }
        if c.comp(f, c.identity(c.dom(f))) != f {
            violations.push(CategoryLaw::RightIdentity { f });
        }
    }
    for f in c.morphisms() {
        for &g in c.outgoing(c.cod(f)) {
            let gf = c.comp(g, f);
            for &h in c.outgoing(c.cod(g)) {
                if c.comp(h, gf) != c.comp(c.comp(h, g), f) {
                    violations.push(CategoryLaw::Associativity { h, g, f });
                }
            }
        }
    }
    CategoryReport { violations }
}

/// A set of morphisms of one category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismClass {
    parent: u64,
    members: BTreeSet<MorId>,
}

impl MorphismClass {
    pub fn new(parent: &FinCategory, members: impl IntoIterator<Item = MorId>) -> MorphismClass {
        MorphismClass { parent: parent.tag(), members: members.into_iter().collect() }
    }

    pub fn empty(parent: &FinCategory) -> MorphismClass {
        MorphismClass { parent: parent.tag(), members: BTreeSet::new() }
    }

    /// All identities of `parent`.
    pub fn identities(parent: &FinCategory) -> MorphismClass {
        MorphismClass::new(parent, parent.objects().map(|x| parent.identity(x)))
    }

    /// All isomorphisms of `parent`.
    pub fn isos(parent: &FinCategory) -> MorphismClass {
        MorphismClass::new(parent, parent.isos())
    }

    pub fn parent_tag(&self) -> u64 {
        self.parent
    }

    pub fn contains(&self, m: MorId) -> bool {
        self.members.contains(&m)
    }

    pub fn members(&self) -> impl Iterator<Item = MorId> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn intersect(&self, other: &MorphismClass) -> MorphismClass {
        assert_eq!(self.parent, other.parent, "classes from different categories");
        MorphismClass {
            parent: self.parent,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    /// Checks that the ids belong to `c`.
    pub fn check_parent(&self, c: &FinCategory) -> Result<(), EngineError> {
        if self.parent != c.tag() {
            return Err(EngineError::Mismatch(format!(
                "morphism class does not belong to category {}",
                c.label()
            )));
        }
        Ok(())
    }
}

/// The opposite category: same ids and names, arrows reversed.
///
/// Applying it twice returns a category structurally equal to the input,
/// with identical ids.
pub fn opposite(c: &FinCategory) -> CatRef {
    let m = c.n_morphisms();
    let mut compositions = Vec::new();
    for g in 0..m as u32 {
        for f in 0..m as u32 {
            // In the opposite, (g after f) is defined when dom(f) = cod(g)
            // in the original, and equals the original (f after g).
            if let Some(fg) = c.try_comp(MorId(f), MorId(g)) {
                compositions.push((g, f, fg.0));
            }
        }
    }
    let label = match c.label().strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{}^op", c.label()),
    };
    Arc::new(
        FinCategory::new(
            label,
            c.obj_names.clone(),
            c.morphisms()
                .map(|i| (c.mor_name(i).to_string(), c.cod(i).0, c.dom(i).0))
                .collect(),
            c.identity.iter().map(|i| i.0).collect(),
            &compositions,
        )
        .expect("opposite of a well-shaped category is well-shaped"),
    )
}

/// An initial or terminal object together with its isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalObject {
    /// Least object with the property.
    pub obj: ObjId,
    /// Every object with the property, ascending; isomorphic to `obj`.
    pub iso_class: Vec<ObjId>,
}

/// Least initial object (unique morphism to every object), if any.
pub fn find_initial(c: &FinCategory) -> Option<UniversalObject> {
    let all: Vec<ObjId> = c
        .objects()
        .filter(|&x| c.objects().all(|y| c.hom(x, y).len() == 1))
        .collect();
    all.first().map(|&obj| UniversalObject { obj, iso_class: all.clone() })
}

/// Least terminal object (unique morphism from every object), if any.
pub fn find_terminal(c: &FinCategory) -> Option<UniversalObject> {
    let all: Vec<ObjId> = c
        .objects()
        .filter(|&y| c.objects().all(|x| c.hom(x, y).len() == 1))
        .collect();
    all.first().map(|&obj| UniversalObject { obj, iso_class: all.clone() })
}

/// A verified binary coproduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coproduct {
    pub apex: ObjId,
    pub inj1: MorId,
    pub inj2: MorId,
}

/// A verified binary product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Product {
    pub apex: ObjId,
    pub proj1: MorId,
    pub proj2: MorId,
}

fn is_coproduct(c: &FinCategory, x: ObjId, y: ObjId, apex: ObjId, i1: MorId, i2: MorId) -> bool {
    // h -> (h i1, h i2) must be a bijection hom(apex, w) -> hom(x, w) x hom(y, w).
    c.objects().all(|w| {
        let mediators = c.hom(apex, w);
        if mediators.len() != c.hom(x, w).len() * c.hom(y, w).len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        mediators.iter().all(|&h| seen.insert((c.comp(h, i1), c.comp(h, i2))))
    })
}

/// Least verified coproduct of `x` and `y` in canonical order
/// (apex, then first injection, then second), if any exists.
pub fn find_coproduct(c: &FinCategory, x: ObjId, y: ObjId) -> Option<Coproduct> {
    for apex in c.objects() {
        for &i1 in c.hom(x, apex) {
            for &i2 in c.hom(y, apex) {
                if is_coproduct(c, x, y, apex, i1, i2) {
                    return Some(Coproduct { apex, inj1: i1, inj2: i2 });
                }
            }
        }
    }
    None
}

fn is_product(c: &FinCategory, x: ObjId, y: ObjId, apex: ObjId, p1: MorId, p2: MorId) -> bool {
    c.objects().all(|w| {
        let mediators = c.hom(w, apex);
        if mediators.len() != c.hom(w, x).len() * c.hom(w, y).len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        mediators.iter().all(|&h| seen.insert((c.comp(p1, h), c.comp(p2, h))))
    })
}

/// Least verified product of `x` and `y`, dual to [`find_coproduct`].
pub fn find_product(c: &FinCategory, x: ObjId, y: ObjId) -> Option<Product> {
    for apex in c.objects() {
        for &p1 in c.hom(apex, x) {
            for &p2 in c.hom(apex, y) {
                if is_product(c, x, y, apex, p1, p2) {
                    return Some(Product { apex, proj1: p1, proj2: p2 });
                }
            }
        }
    }
    None
}

/// The unique mediator out of a verified coproduct for the cocone `(g1, g2)`.
pub fn copair(c: &FinCategory, cp: &Coproduct, g1: MorId, g2: MorId) -> Option<MorId> {
    let w = c.cod(g1);
    if c.cod(g2) != w {
        return None;
    }
    c.hom(cp.apex, w)
        .iter()
        .copied()
        .find(|&h| c.comp(h, cp.inj1) == g1 && c.comp(h, cp.inj2) == g2)
}

/// A full subcategory together with its inclusion functor.
#[derive(Debug, Clone)]
pub struct Subcategory {
    pub cat: CatRef,
    /// Inclusion into the parent; injective on objects and morphisms.
    pub inclusion: Functor,
}

impl Subcategory {
    /// Preimage of a parent object under the inclusion.
    pub fn obj_down(&self, parent_obj: ObjId) -> Option<ObjId> {
        self.inclusion
            .obj_map()
            .iter()
            .position(|&x| x == parent_obj)
            .map(|i| ObjId(i as u32))
    }

    /// Preimage of a parent morphism under the inclusion.
    pub fn mor_down(&self, parent_mor: MorId) -> Option<MorId> {
        self.inclusion
            .mor_map()
            .iter()
            .position(|&m| m == parent_mor)
            .map(|i| MorId(i as u32))
    }
}

/// The full subcategory on `objects` (sorted, deduplicated), with names kept.
pub fn full_subcategory(c: &CatRef, objects: &[ObjId]) -> Subcategory {
    let mut objs: Vec<ObjId> = objects.to_vec();
    objs.sort();
    objs.dedup();
    let in_sub: Vec<Option<u32>> = {
        let mut v = vec![None; c.n_objects()];
        for (i, &x) in objs.iter().enumerate() {
            v[x.0 as usize] = Some(i as u32);
        }
        v
    };
    let mors: Vec<MorId> = c
        .morphisms()
        .filter(|&m| in_sub[c.dom(m).0 as usize].is_some() && in_sub[c.cod(m).0 as usize].is_some())
        .collect();
    let mor_down: Vec<Option<u32>> = {
        let mut v = vec![None; c.n_morphisms()];
        for (i, &m) in mors.iter().enumerate() {
            v[m.0 as usize] = Some(i as u32);
        }
        v
    };
    let mut compositions = Vec::new();
    for (gi, &g) in mors.iter().enumerate() {
        for (fi, &f) in mors.iter().enumerate() {
            if let Some(gf) = c.try_comp(g, f) {
                compositions.push((gi as u32, fi as u32, mor_down[gf.0 as usize].unwrap()));
            }
        }
    }
    let sub = FinCategory::new(
        format!("{}|full", c.label()),
        objs.iter().map(|&x| c.obj_name(x).to_string()).collect(),
        mors.iter()
            .map(|&m| {
                (
                    c.mor_name(m).to_string(),
                    in_sub[c.dom(m).0 as usize].unwrap(),
                    in_sub[c.cod(m).0 as usize].unwrap(),
                )
            })
            .collect(),
        objs.iter().map(|&x| mor_down[c.identity(x).0 as usize].unwrap()).collect(),
        &compositions,
    )
    .expect("full subcategory of a well-shaped category is well-shaped")
    .into_ref();
    let inclusion = Functor::new(sub.clone(), c.clone(), objs, mors)
        .expect("inclusion of a full subcategory is well-typed");
    Subcategory { cat: sub, inclusion }
}

#[cfg(test)]
mod tests;
