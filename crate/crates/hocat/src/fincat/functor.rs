//! Functors and natural transformations between table categories.

use std::fmt;

use super::{CatRef, MorId, ObjId, ShapeError};
use crate::error::EngineError;

/// A functor given by total object and morphism maps.
///
/// Construction checks typing (endpoint coherence of the morphism map);
/// the functor laws are checked by [`validate_functor`], and the search
/// routines only ever produce law-abiding functors.
#[derive(Clone)]
pub struct Functor {
    source: CatRef,
    target: CatRef,
    obj_map: Vec<ObjId>,
    mor_map: Vec<MorId>,
}

impl Functor {
    pub fn new(
        source: CatRef,
        target: CatRef,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Functor, ShapeError> {
        if obj_map.len() != source.n_objects() {
            return Err(ShapeError::BadMapLength {
                expected: source.n_objects(),
                got: obj_map.len(),
            });
        }
        if mor_map.len() != source.n_morphisms() {
            return Err(ShapeError::BadMapLength {
                expected: source.n_morphisms(),
                got: mor_map.len(),
            });
        }
        if obj_map.iter().any(|x| x.0 as usize >= target.n_objects())
            || mor_map.iter().any(|m| m.0 as usize >= target.n_morphisms())
        {
            return Err(ShapeError::BadMapEntry);
        }
        for m in source.morphisms() {
            let fm = mor_map[m.0 as usize];
            if target.dom(fm) != obj_map[source.dom(m).0 as usize]
                || target.cod(fm) != obj_map[source.cod(m).0 as usize]
            {
                return Err(ShapeError::MistypedMapEntry(source.mor_name(m).to_string()));
            }
        }
        Ok(Functor { source, target, obj_map, mor_map })
    }

    pub fn identity(c: CatRef) -> Functor {
        Functor {
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
            source: c.clone(),
            target: c,
        }
    }

    /// `g after f`; the categories must match by tag.
    pub fn compose(g: &Functor, f: &Functor) -> Result<Functor, EngineError> {
        if f.target.tag() != g.source.tag() {
            return Err(EngineError::Mismatch(format!(
                "cannot compose functor out of {} with functor into {}",
                g.source.label(),
                f.target.label()
            )));
        }
        Ok(Functor {
            source: f.source.clone(),
            target: g.target.clone(),
            obj_map: f.obj_map.iter().map(|&x| g.on_obj(x)).collect(),
            mor_map: f.mor_map.iter().map(|&m| g.on_mor(m)).collect(),
        })
    }

    pub fn source(&self) -> &CatRef {
        &self.source
    }

    pub fn target(&self) -> &CatRef {
        &self.target
    }

    pub fn on_obj(&self, x: ObjId) -> ObjId {
        self.obj_map[x.0 as usize]
    }

    pub fn on_mor(&self, m: MorId) -> MorId {
        self.mor_map[m.0 as usize]
    }

    pub fn obj_map(&self) -> &[ObjId] {
        &self.obj_map
    }

    pub fn mor_map(&self) -> &[MorId] {
        &self.mor_map
    }

    pub fn is_identity(&self) -> bool {
        self.source.tag() == self.target.tag()
            && self.obj_map.iter().enumerate().all(|(i, x)| x.0 as usize == i)
            && self.mor_map.iter().enumerate().all(|(i, m)| m.0 as usize == i)
    }

    /// Bijective on objects and morphisms.
    pub fn is_bijective(&self) -> bool {
        let mut objs = vec![false; self.target.n_objects()];
        for x in &self.obj_map {
            objs[x.0 as usize] = true;
        }
        let mut mors = vec![false; self.target.n_morphisms()];
        for m in &self.mor_map {
            mors[m.0 as usize] = true;
        }
        self.obj_map.len() == self.target.n_objects()
            && self.mor_map.len() == self.target.n_morphisms()
            && objs.into_iter().all(|b| b)
            && mors.into_iter().all(|b| b)
    }

    /// Inverse functor when bijective.
    pub fn inverse(&self) -> Option<Functor> {
        if !self.is_bijective() {
            return None;
        }
        let mut obj_map = vec![ObjId(0); self.target.n_objects()];
        for (i, &x) in self.obj_map.iter().enumerate() {
            obj_map[x.0 as usize] = ObjId(i as u32);
        }
        let mut mor_map = vec![MorId(0); self.target.n_morphisms()];
        for (i, &m) in self.mor_map.iter().enumerate() {
            mor_map[m.0 as usize] = MorId(i as u32);
        }
        Some(Functor {
            source: self.target.clone(),
            target: self.source.clone(),
            obj_map,
            mor_map,
        })
    }

    /// Key used for the canonical ordering of functors.
    pub fn order_key(&self) -> (Vec<u32>, Vec<u32>) {
        (
            self.obj_map.iter().map(|x| x.0).collect(),
            self.mor_map.iter().map(|m| m.0).collect(),
        )
    }
}

impl PartialEq for Functor {
    fn eq(&self, other: &Functor) -> bool {
        self.source.tag() == other.source.tag()
            && self.target.tag() == other.target.tag()
            && self.obj_map == other.obj_map
            && self.mor_map == other.mor_map
    }
}

impl Eq for Functor {}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor({} -> {}, obj {:?})", self.source.label(), self.target.label(), self.obj_map)
    }
}

/// A violated functor law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorLaw {
    Identity { x: ObjId },
    Composition { g: MorId, f: MorId },
}

#[derive(Debug, Clone, Default)]
pub struct FunctorReport {
    pub violations: Vec<FunctorLaw>,
}

impl FunctorReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks identity and composition preservation; typing is already enforced
/// by construction.
pub fn validate_functor(f: &Functor) -> FunctorReport {
    let (c, d) = (f.source(), f.target());
    let mut violations = Vec::new();
    for x in c.objects() {
        if f.on_mor(c.identity(x)) != d.identity(f.on_obj(x)) {
            violations.push(FunctorLaw::Identity { x });
        }
    }
    for m in c.morphisms() {
        for &g in c.outgoing(c.cod(m)) {
            let gm = c.comp(g, m);
            if f.on_mor(gm) != d.comp(f.on_mor(g), f.on_mor(m)) {
                violations.push(FunctorLaw::Composition { g, f: m });
            }
        }
    }
    FunctorReport { violations }
}

/// A natural transformation candidate: a component family between two
/// parallel functors. Naturality is a query, not a construction invariant,
/// so that failed naturality can be reported as evidence.
#[derive(Clone)]
pub struct NatTransformation {
    f: Functor,
    g: Functor,
    components: Vec<MorId>,
}

impl NatTransformation {
    pub fn new(f: Functor, g: Functor, components: Vec<MorId>) -> Result<NatTransformation, ShapeError> {
        assert_eq!(f.source().tag(), g.source().tag(), "parallel functors required");
        assert_eq!(f.target().tag(), g.target().tag(), "parallel functors required");
        if components.len() != f.source().n_objects() {
            return Err(ShapeError::BadMapLength {
                expected: f.source().n_objects(),
                got: components.len(),
            });
        }
        let d = f.target();
        for x in f.source().objects() {
            let c = components[x.0 as usize];
            if c.0 as usize >= d.n_morphisms() {
                return Err(ShapeError::BadMapEntry);
            }
            if d.dom(c) != f.on_obj(x) || d.cod(c) != g.on_obj(x) {
                return Err(ShapeError::MistypedMapEntry(f.source().obj_name(x).to_string()));
            }
        }
        Ok(NatTransformation { f, g, components })
    }

    pub fn identity(f: &Functor) -> NatTransformation {
        let components = f
            .source()
            .objects()
            .map(|x| f.target().identity(f.on_obj(x)))
            .collect();
        NatTransformation { f: f.clone(), g: f.clone(), components }
    }

    pub fn from(&self) -> &Functor {
        &self.f
    }

    pub fn to(&self) -> &Functor {
        &self.g
    }

    pub fn component(&self, x: ObjId) -> MorId {
        self.components[x.0 as usize]
    }

    pub fn components(&self) -> &[MorId] {
        &self.components
    }

    pub fn is_natural(&self) -> bool {
        self.naturality_violations().is_empty()
    }

    /// Morphisms of the source category whose naturality square fails.
    pub fn naturality_violations(&self) -> Vec<MorId> {
        let c = self.f.source();
        let d = self.f.target();
        c.morphisms()
            .filter(|&u| {
                let lhs = d.comp(self.g.on_mor(u), self.components[c.dom(u).0 as usize]);
                let rhs = d.comp(self.components[c.cod(u).0 as usize], self.f.on_mor(u));
                lhs != rhs
            })
            .collect()
    }

    pub fn is_iso(&self) -> bool {
        let d = self.f.target();
        self.components.iter().all(|&m| d.is_iso(m))
    }

    /// Componentwise inverse when every component is invertible.
    pub fn inverse(&self) -> Option<NatTransformation> {
        let d = self.f.target();
        let components = self
            .components
            .iter()
            .map(|&m| d.inverse_of(m))
            .collect::<Option<Vec<_>>>()?;
        Some(NatTransformation { f: self.g.clone(), g: self.f.clone(), components })
    }

    /// Vertical composite `later . first` (first, then later).
    pub fn vcomp(later: &NatTransformation, first: &NatTransformation) -> Result<NatTransformation, EngineError> {
        if later.f != first.g {
            return Err(EngineError::Mismatch("vertical composition of non-adjacent transformations".into()));
        }
        let d = first.f.target();
        let components = first
            .f
            .source()
            .objects()
            .map(|x| d.comp(later.component(x), first.component(x)))
            .collect();
        Ok(NatTransformation { f: first.f.clone(), g: later.g.clone(), components })
    }

    /// Right whiskering `self . k`: precompose both functors with `k`,
    /// taking the component at `x` to be the component at `k(x)`.
    pub fn whisker_pre(&self, k: &Functor) -> Result<NatTransformation, EngineError> {
        if k.target().tag() != self.f.source().tag() {
            return Err(EngineError::Mismatch("whiskering functor does not land in the source".into()));
        }
        Ok(NatTransformation {
            f: Functor::compose(&self.f, k)?,
            g: Functor::compose(&self.g, k)?,
            components: k.source().objects().map(|x| self.component(k.on_obj(x))).collect(),
        })
    }

    /// Left whiskering `h . self`: apply `h` to every component.
    pub fn whisker_post(&self, h: &Functor) -> Result<NatTransformation, EngineError> {
        if self.f.target().tag() != h.source().tag() {
            return Err(EngineError::Mismatch("whiskering functor does not start at the target".into()));
        }
        Ok(NatTransformation {
            f: Functor::compose(h, &self.f)?,
            g: Functor::compose(h, &self.g)?,
            components: self.components.iter().map(|&m| h.on_mor(m)).collect(),
        })
    }

    pub fn order_key(&self) -> Vec<u32> {
        self.components.iter().map(|m| m.0).collect()
    }
}

impl PartialEq for NatTransformation {
    fn eq(&self, other: &NatTransformation) -> bool {
        self.f == other.f && self.g == other.g && self.components == other.components
    }
}

impl Eq for NatTransformation {}

impl fmt::Debug for NatTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatTransformation({:?})", self.components)
    }
}
