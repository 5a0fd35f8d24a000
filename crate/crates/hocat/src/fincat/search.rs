//! Exhaustive, budgeted enumeration of functors and natural transformations.
//!
//! All searches are depth-first in the canonical order (least candidate id
//! first) with forward constraint propagation, so results come out in
//! lexicographic order of their map vectors and the first hit of any search
//! is the canonical least witness.

use super::{CatRef, Functor, MorId, NatTransformation, ObjId};
use crate::error::{EngineError, Meter};

const UNSET: u32 = u32::MAX;

/// Composable-pair tables for one category, precomputed once per search.
struct CompPairs {
    /// `after[a]`: pairs `(b, ba)` with `ba = b after a`.
    after: Vec<Vec<(u32, u32)>>,
    /// `before[a]`: pairs `(b, ab)` with `ab = a after b`.
    before: Vec<Vec<(u32, u32)>>,
}

impl CompPairs {
    fn new(c: &CatRef) -> CompPairs {
        let m = c.n_morphisms();
        let mut after = vec![Vec::new(); m];
        let mut before = vec![Vec::new(); m];
        for a in 0..m as u32 {
            for &b in c.outgoing(c.cod(MorId(a))) {
                after[a as usize].push((b.0, c.comp(b, MorId(a)).0));
            }
            for &b in c.incoming(c.dom(MorId(a))) {
                before[a as usize].push((b.0, c.comp(MorId(a), b).0));
            }
        }
        CompPairs { after, before }
    }
}

/// Enumerates every morphism map extending `obj_map` to a functor.
///
/// The trail-based DFS assigns images in morphism-id order, propagating
/// composition constraints eagerly. The callback returns `false` to stop
/// the enumeration early.
fn enumerate_mor_maps(
    c: &CatRef,
    d: &CatRef,
    obj_map: &[ObjId],
    pairs: &CompPairs,
    meter: &Meter,
    out: &mut dyn FnMut(&[u32]) -> Result<bool, EngineError>,
) -> Result<bool, EngineError> {
    let m = c.n_morphisms();
    let mut img = vec![UNSET; m];
    let mut trail: Vec<u32> = Vec::new();

    // Identities are forced.
    for x in c.objects() {
        let id = c.identity(x).0 as usize;
        img[id] = d.identity(obj_map[x.0 as usize]).0;
    }

    // Assigns `value` to `a` and closes under composition with everything
    // already assigned. Returns false (after recording undo info) on clash.
    fn propagate(
        d: &CatRef,
        pairs: &CompPairs,
        img: &mut [u32],
        trail: &mut Vec<u32>,
        meter: &Meter,
        a: usize,
        value: u32,
    ) -> Result<bool, EngineError> {
        let mut queue = vec![(a, value)];
        while let Some((a, v)) = queue.pop() {
            if img[a] != UNSET {
                if img[a] != v {
                    return Ok(false);
                }
                continue;
            }
            meter.charge(1)?;
            img[a] = v;
            trail.push(a as u32);
            for &(b, ba) in &pairs.after[a] {
                if img[b as usize] != UNSET {
                    let t = d
                        .try_comp(MorId(img[b as usize]), MorId(v))
                        .expect("typing guarantees composability of images");
                    queue.push((ba as usize, t.0));
                }
            }
            for &(b, ab) in &pairs.before[a] {
                if img[b as usize] != UNSET {
                    let t = d
                        .try_comp(MorId(v), MorId(img[b as usize]))
                        .expect("typing guarantees composability of images");
                    queue.push((ab as usize, t.0));
                }
            }
        }
        Ok(true)
    }

    fn undo(img: &mut [u32], trail: &mut Vec<u32>, mark: usize) {
        while trail.len() > mark {
            let a = trail.pop().unwrap();
            img[a as usize] = UNSET;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        c: &CatRef,
        d: &CatRef,
        obj_map: &[ObjId],
        pairs: &CompPairs,
        img: &mut Vec<u32>,
        trail: &mut Vec<u32>,
        meter: &Meter,
        from: usize,
        out: &mut dyn FnMut(&[u32]) -> Result<bool, EngineError>,
    ) -> Result<bool, EngineError> {
        let m = c.n_morphisms();
        let mut a = from;
        while a < m && img[a] != UNSET {
            a += 1;
        }
        if a == m {
            return out(img);
        }
        let (x, y) = (c.dom(MorId(a as u32)), c.cod(MorId(a as u32)));
        let candidates = d.hom(obj_map[x.0 as usize], obj_map[y.0 as usize]).to_vec();
        for cand in candidates {
            meter.charge(1)?;
            let mark = trail.len();
            let mut keep_going = true;
            if propagate(d, pairs, img, trail, meter, a, cand.0)? {
                keep_going = dfs(c, d, obj_map, pairs, img, trail, meter, a + 1, out)?;
            }
            undo(img, trail, mark);
            if !keep_going {
                return Ok(false);
            }
        }
        Ok(true)
    }

    dfs(c, d, obj_map, pairs, &mut img, &mut trail, meter, 0, out)
}

fn obj_assignment_consistent(c: &CatRef, d: &CatRef, obj_map: &[u32], upto: usize) -> bool {
    // A functor needs a nonempty target hom-set wherever the source has one.
    for i in 0..=upto {
        for j in 0..=upto {
            if !c.hom(ObjId(i as u32), ObjId(j as u32)).is_empty()
                && d.hom(ObjId(obj_map[i]), ObjId(obj_map[j])).is_empty()
            {
                return false;
            }
        }
    }
    true
}

/// Enumerates all functors `c -> d` in canonical (lexicographic) order.
pub fn enumerate_functors(c: &CatRef, d: &CatRef, meter: &Meter) -> Result<Vec<Functor>, EngineError> {
    let pairs = CompPairs::new(c);
    let n = c.n_objects();
    let mut obj_map = vec![0u32; n];
    let mut result = Vec::new();

    fn obj_dfs(
        c: &CatRef,
        d: &CatRef,
        pairs: &CompPairs,
        obj_map: &mut Vec<u32>,
        meter: &Meter,
        at: usize,
        result: &mut Vec<Functor>,
    ) -> Result<(), EngineError> {
        if at == c.n_objects() {
            let objs: Vec<ObjId> = obj_map.iter().map(|&x| ObjId(x)).collect();
            enumerate_mor_maps(c, d, &objs, pairs, meter, &mut |img| {
                let mors = img.iter().map(|&m| MorId(m)).collect();
                result.push(
                    Functor::new(c.clone(), d.clone(), objs.clone(), mors)
                        .expect("search produces well-typed functors"),
                );
                Ok(true)
            })?;
            return Ok(());
        }
        for y in 0..d.n_objects() as u32 {
            meter.charge(1)?;
            obj_map[at] = y;
            if obj_assignment_consistent(c, d, obj_map, at) {
                obj_dfs(c, d, pairs, obj_map, meter, at + 1, result)?;
            }
        }
        Ok(())
    }

    if n == 0 {
        let f = Functor::new(c.clone(), d.clone(), Vec::new(), Vec::new())
            .expect("empty functor is well-typed");
        return Ok(vec![f]);
    }
    obj_dfs(c, d, &pairs, &mut obj_map, meter, 0, &mut result)?;
    debug_assert!(result.windows(2).all(|w| w[0].order_key() <= w[1].order_key()));
    Ok(result)
}

/// Enumerates all functors with a fixed object assignment.
pub fn enumerate_functors_with_fixed_objects(
    c: &CatRef,
    d: &CatRef,
    obj_map: &[ObjId],
    meter: &Meter,
) -> Result<Vec<Functor>, EngineError> {
    assert_eq!(obj_map.len(), c.n_objects());
    let pairs = CompPairs::new(c);
    let mut result = Vec::new();
    let raw: Vec<u32> = obj_map.iter().map(|x| x.0).collect();
    if !obj_assignment_consistent(c, d, &raw, c.n_objects().saturating_sub(1)) {
        return Ok(result);
    }
    enumerate_mor_maps(c, d, obj_map, &pairs, meter, &mut |img| {
        let mors = img.iter().map(|&m| MorId(m)).collect();
        result.push(
            Functor::new(c.clone(), d.clone(), obj_map.to_vec(), mors)
                .expect("search produces well-typed functors"),
        );
        Ok(true)
    })?;
    Ok(result)
}

fn enumerate_component_families(
    f: &Functor,
    g: &Functor,
    iso_only: bool,
    meter: &Meter,
) -> Result<Vec<NatTransformation>, EngineError> {
    assert_eq!(f.source().tag(), g.source().tag(), "parallel functors required");
    assert_eq!(f.target().tag(), g.target().tag(), "parallel functors required");
    let c = f.source();
    let d = f.target();
    let n = c.n_objects();
    let mut comp = vec![UNSET; n];
    let mut result = Vec::new();

    // Morphisms whose naturality square closes as soon as object `i` is
    // assigned (the other endpoint is already assigned).
    let squares_at: Vec<Vec<MorId>> = (0..n)
        .map(|i| {
            c.morphisms()
                .filter(|&u| {
                    let (a, b) = (c.dom(u).0 as usize, c.cod(u).0 as usize);
                    a.max(b) == i
                })
                .collect()
        })
        .collect();

    fn dfs(
        c: &CatRef,
        d: &CatRef,
        f: &Functor,
        g: &Functor,
        squares_at: &[Vec<MorId>],
        comp: &mut Vec<u32>,
        iso_only: bool,
        meter: &Meter,
        at: usize,
        result: &mut Vec<NatTransformation>,
    ) -> Result<(), EngineError> {
        if at == c.n_objects() {
            let components = comp.iter().map(|&m| MorId(m)).collect();
            result.push(
                NatTransformation::new(f.clone(), g.clone(), components)
                    .expect("search produces well-typed families"),
            );
            return Ok(());
        }
        let x = ObjId(at as u32);
        for &cand in d.hom(f.on_obj(x), g.on_obj(x)) {
            meter.charge(1)?;
            if iso_only && !d.is_iso(cand) {
                continue;
            }
            comp[at] = cand.0;
            let ok = squares_at[at].iter().all(|&u| {
                let (a, b) = (c.dom(u).0 as usize, c.cod(u).0 as usize);
                d.comp(MorId(comp[b]), f.on_mor(u)) == d.comp(g.on_mor(u), MorId(comp[a]))
            });
            if ok {
                dfs(c, d, f, g, squares_at, comp, iso_only, meter, at + 1, result)?;
            }
            comp[at] = UNSET;
        }
        Ok(())
    }

    dfs(c, d, f, g, &squares_at, &mut comp, iso_only, meter, 0, &mut result)?;
    debug_assert!(result.windows(2).all(|w| w[0].order_key() <= w[1].order_key()));
    Ok(result)
}

/// Enumerates all natural transformations `f => g` in canonical order.
pub fn enumerate_nat_transformations(
    f: &Functor,
    g: &Functor,
    meter: &Meter,
) -> Result<Vec<NatTransformation>, EngineError> {
    enumerate_component_families(f, g, false, meter)
}

/// Enumerates the natural isomorphisms `f => g` in canonical order.
pub fn enumerate_natural_isos(
    f: &Functor,
    g: &Functor,
    meter: &Meter,
) -> Result<Vec<NatTransformation>, EngineError> {
    enumerate_component_families(f, g, true, meter)
}

/// Finds the canonical least isomorphism of categories `c -> d`, if any.
pub fn find_isomorphism(c: &CatRef, d: &CatRef, meter: &Meter) -> Result<Option<Functor>, EngineError> {
    if c.n_objects() != d.n_objects() || c.n_morphisms() != d.n_morphisms() {
        return Ok(None);
    }
    let pairs = CompPairs::new(c);
    let n = c.n_objects();
    let mut obj_map = vec![0u32; n];
    let mut used = vec![false; n];
    let mut found: Option<Functor> = None;

    #[allow(clippy::too_many_arguments)]
    fn obj_dfs(
        c: &CatRef,
        d: &CatRef,
        pairs: &CompPairs,
        obj_map: &mut Vec<u32>,
        used: &mut Vec<bool>,
        meter: &Meter,
        at: usize,
        found: &mut Option<Functor>,
    ) -> Result<(), EngineError> {
        if found.is_some() {
            return Ok(());
        }
        if at == c.n_objects() {
            let objs: Vec<ObjId> = obj_map.iter().map(|&x| ObjId(x)).collect();
            // Hom-set sizes must match exactly for a bijective functor.
            for i in c.objects() {
                for j in c.objects() {
                    if c.hom(i, j).len()
                        != d.hom(objs[i.0 as usize], objs[j.0 as usize]).len()
                    {
                        return Ok(());
                    }
                }
            }
            let mut take: Option<Vec<u32>> = None;
            enumerate_mor_maps(c, d, &objs, pairs, meter, &mut |img| {
                // Injectivity on morphisms suffices: counts are equal.
                let mut seen = vec![false; img.len()];
                let injective = img.iter().all(|&m| {
                    let fresh = !seen[m as usize];
                    seen[m as usize] = true;
                    fresh
                });
                if injective {
                    take = Some(img.to_vec());
                }
                Ok(!injective)
            })?;
            if let Some(img) = take {
                let mors = img.iter().map(|&m| MorId(m)).collect();
                *found = Some(
                    Functor::new(c.clone(), d.clone(), objs, mors)
                        .expect("search produces well-typed functors"),
                );
            }
            return Ok(());
        }
        for y in 0..d.n_objects() as u32 {
            if used[y as usize] {
                continue;
            }
            meter.charge(1)?;
            obj_map[at] = y;
            used[y as usize] = true;
            if obj_assignment_consistent(c, d, obj_map, at) {
                obj_dfs(c, d, pairs, obj_map, used, meter, at + 1, found)?;
            }
            used[y as usize] = false;
            if found.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }

    if n == 0 {
        return Ok(Some(
            Functor::new(c.clone(), d.clone(), Vec::new(), Vec::new())
                .expect("empty functor is well-typed"),
        ));
    }
    obj_dfs(c, d, &pairs, &mut obj_map, &mut used, meter, 0, &mut found)?;
    Ok(found)
}
