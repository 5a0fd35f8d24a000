//! Shipped categories and instances.
//!
//! Everything on disk under `instances/` and `battery/` is generated from the
//! builders here; a test asserts the files are byte-identical with the
//! builders' output, so the code is the source of truth.
//!
//! Naming scheme: identities are `id_<obj>`; in thin categories the unique
//! non-identity morphism x -> y is `<x>_<y>`.

use std::sync::Arc;

use crate::fincat::{
    CatRef, FinCategory, InstanceData, ModelSection, MorId, MorphismClass, ObjId,
    ReplacementSection,
};

/// Builds a thin category: at most one morphism x -> y, present iff `leq`.
///
/// `leq` must be reflexive and transitive on index pairs; the composition
/// table is derived from it. Identities come first in morphism order, then
/// the non-identity arrows in lexicographic (dom, cod) order.
pub fn build_thin(label: &str, objs: &[&str], leq: impl Fn(usize, usize) -> bool) -> CatRef {
    let n = objs.len();
    let mut names = Vec::new();
    let mut mor = Vec::new();
    let mut idx = vec![vec![None; n]; n];
    for (i, o) in objs.iter().enumerate() {
        assert!(leq(i, i), "leq must be reflexive");
        idx[i][i] = Some(mor.len() as u32);
        names.push(format!("id_{o}"));
        mor.push((i as u32, i as u32));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && leq(i, j) {
                idx[i][j] = Some(mor.len() as u32);
                names.push(format!("{}_{}", objs[i], objs[j]));
                mor.push((i as u32, j as u32));
            }
        }
    }
    let identities: Vec<u32> = (0..n).map(|i| idx[i][i].unwrap()).collect();
    let mut comp = Vec::new();
    for (g, &(gd, gc)) in mor.iter().enumerate() {
        for (f, &(fd, fc)) in mor.iter().enumerate() {
            if fc == gd {
                let gf = idx[fd as usize][gc as usize].expect("leq must be transitive");
                comp.push((g as u32, f as u32, gf));
            }
        }
    }
    let morphisms = names
        .into_iter()
        .zip(mor)
        .map(|(name, (d, c))| (name, d, c))
        .collect();
    let objs = objs.iter().map(|s| s.to_string()).collect();
    Arc::new(FinCategory::new(label, objs, morphisms, identities, &comp).expect("thin corpus"))
}

/// One object, one morphism.
pub fn point() -> CatRef {
    build_thin("point", &["pt"], |_, _| true)
}

/// Two objects, identities only.
pub fn disc2() -> CatRef {
    build_thin("disc2", &["a", "b"], |i, j| i == j)
}

/// Two objects and one arrow a -> b.
pub fn arrow() -> CatRef {
    build_thin("arrow", &["a", "b"], |i, j| i <= j)
}

/// Two isomorphic objects x ~ y (four morphisms).
pub fn iso2() -> CatRef {
    build_thin("iso2", &["x", "y"], |_, _| true)
}

/// Three objects in a chain x0 -> x1 -> x2 (with the composite).
pub fn chain3() -> CatRef {
    build_thin("chain3", &["x0", "x1", "x2"], |i, j| i <= j)
}

/// The poset bot < {x, y} < top; x and y are incomparable.
pub fn diamond() -> CatRef {
    build_thin("diamond", &["bot", "x", "y", "top"], |i, j| {
        i == j || i == 0 || j == 3
    })
}

/// The order-2 group as a one-object category: s . s = id.
pub fn z2() -> CatRef {
    Arc::new(
        FinCategory::new(
            "z2",
            vec!["g".into()],
            vec![("id_g".into(), 0, 0), ("s".into(), 0, 0)],
            vec![0],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
        )
        .expect("z2 corpus"),
    )
}

/// Underlying preorder of `qshift`: z below a ~ b below t.
pub fn qshift_cat() -> CatRef {
    build_thin("qshift", &["z", "a", "b", "t"], |i, j| {
        i == j || i == 0 || j == 3 || (i >= 1 && i <= 2 && j >= 1 && j <= 2)
    })
}

/// The order-2 group with an initial object, a terminal object and the
/// binary self-coproduct of the group object.
///
/// Concretely: the full subcategory of sets-with-involution on the empty set
/// `z`, the free orbit `g`, two free orbits `gg` and the fixed point `t`.
/// `gg` is g + g (and also g x g); no self-coproduct of `gg` exists here, so
/// the category is a boundary case for cylinder search. Morphisms are all
/// involution-preserving functions, composition is function composition; the
/// table is generated, not hand-written.
pub fn z2plus() -> CatRef {
    // Objects as involutions: element i is swapped with inv[obj][i].
    let objs = ["z", "g", "gg", "t"];
    let inv: [&[usize]; 4] = [&[], &[1, 0], &[1, 0, 3, 2], &[0]];

    // (name, dom, cod, graph); order fixes the morphism ids.
    let mut mors: Vec<(String, usize, usize, Vec<usize>)> = vec![
        ("id_z".into(), 0, 0, vec![]),
        ("id_g".into(), 1, 1, vec![0, 1]),
        ("s".into(), 1, 1, vec![1, 0]),
        ("id_gg".into(), 2, 2, vec![0, 1, 2, 3]),
        ("id_t".into(), 3, 3, vec![0]),
        ("zg".into(), 0, 1, vec![]),
        ("zgg".into(), 0, 2, vec![]),
        ("zt".into(), 0, 3, vec![]),
        ("i1".into(), 1, 2, vec![0, 1]),
        ("i2".into(), 1, 2, vec![2, 3]),
        ("i1s".into(), 1, 2, vec![1, 0]),
        ("i2s".into(), 1, 2, vec![3, 2]),
        ("gt".into(), 1, 3, vec![0, 0]),
        ("ggt".into(), 2, 3, vec![0, 0, 0, 0]),
    ];
    // gg -> g: copairings c<a><b> with a, b in {e, s} acting coordinatewise.
    let g_end = [("e", [0usize, 1]), ("s", [1, 0])];
    for (an, ag) in g_end {
        for (bn, bg) in g_end {
            mors.push((
                format!("c{an}{bn}"),
                2,
                1,
                vec![ag[0], ag[1], bg[0], bg[1]],
            ));
        }
    }
    // gg -> gg: copairings d_<p>_<q> with p, q in Hom(g, gg); d_i1_i2 = id_gg.
    let g_gg = [
        ("i1", [0usize, 1]),
        ("i2", [2, 3]),
        ("i1s", [1, 0]),
        ("i2s", [3, 2]),
    ];
    for (pn, pg) in g_gg {
        for (qn, qg) in g_gg {
            if (pn, qn) == ("i1", "i2") {
                continue;
            }
            mors.push((
                format!("d_{pn}_{qn}"),
                2,
                2,
                vec![pg[0], pg[1], qg[0], qg[1]],
            ));
        }
    }

    for (name, d, c, graph) in &mors {
        assert_eq!(graph.len(), inv[*d].len(), "{name}: wrong arity");
        for (i, &fi) in graph.iter().enumerate() {
            assert_eq!(
                graph[inv[*d][i]], inv[*c][fi],
                "{name}: not involution-preserving"
            );
        }
    }

    let find = |d: usize, c: usize, graph: &[usize]| -> u32 {
        mors.iter()
            .position(|(_, md, mc, mg)| *md == d && *mc == c && mg == graph)
            .expect("composite graph must be a listed morphism") as u32
    };
    let mut comp = Vec::new();
    for (gi, (_, gd, gc, gg_)) in mors.iter().enumerate() {
        for (fi, (_, fd, fc, fg)) in mors.iter().enumerate() {
            if fc == gd {
                let graph: Vec<usize> = fg.iter().map(|&x| gg_[x]).collect();
                comp.push((gi as u32, fi as u32, find(*fd, *gc, &graph)));
            }
        }
    }
    let identities = vec![0, 1, 3, 4];
    let morphisms = mors
        .iter()
        .map(|(n, d, c, _)| (n.clone(), *d as u32, *c as u32))
        .collect();
    let objs = objs.iter().map(|s| s.to_string()).collect();
    Arc::new(FinCategory::new("z2plus", objs, morphisms, identities, &comp).expect("z2plus"))
}

fn all_class(cat: &FinCategory) -> MorphismClass {
    MorphismClass::new(cat, cat.morphisms())
}

fn identity_replacement(cat: &FinCategory) -> ReplacementSection {
    ReplacementSection {
        obj_map: cat.objects().collect(),
        mor_map: cat.morphisms().collect(),
        components: cat.objects().map(|x| cat.identity(x)).collect(),
    }
}

/// The minimal model data on a category with initial and terminal objects:
/// weak equivalences are the isomorphisms, everything is a cofibration and a
/// fibration, f factors as (f, id) and (id, f), Q = R = identity.
pub fn triv_model(cat: &CatRef, initial: &str, terminal: &str) -> ModelSection {
    let fact1 = cat.morphisms().map(|f| (f, cat.identity(cat.cod(f)))).collect();
    let fact2 = cat.morphisms().map(|f| (cat.identity(cat.dom(f)), f)).collect();
    ModelSection {
        w: MorphismClass::isos(cat),
        cof: all_class(cat),
        fib: all_class(cat),
        initial: cat.obj_by_name(initial).unwrap(),
        terminal: cat.obj_by_name(terminal).unwrap(),
        fact1,
        fact2,
        q: Some(identity_replacement(cat)),
        r: Some(identity_replacement(cat)),
    }
}

fn instance(label: &str, cat: CatRef, w: Option<Vec<&str>>, model: Option<ModelSection>) -> InstanceData {
    let w = w.map(|names| {
        MorphismClass::new(
            &cat,
            names.iter().map(|n| cat.mor_by_name(n).expect("corpus W name")),
        )
    });
    InstanceData { label: label.to_string(), cat, w, model }
}

/// Diamond poset with the minimal model structure.
pub fn triv_diamond() -> InstanceData {
    let cat = diamond();
    let model = triv_model(&cat, "bot", "top");
    instance("triv_diamond", cat, None, Some(model))
}

/// Diamond poset with everything a weak equivalence and only isomorphisms
/// fibrant: the whole category contracts to `top`.
pub fn collapse_diamond() -> InstanceData {
    let cat = diamond();
    let top = cat.obj_by_name("top").unwrap();
    let fact1: Vec<(MorId, MorId)> =
        cat.morphisms().map(|f| (f, cat.identity(cat.cod(f)))).collect();
    let to_top = |x: ObjId| -> MorId {
        cat.hom(x, top)[0]
    };
    let r = ReplacementSection {
        obj_map: cat.objects().map(|_| top).collect(),
        mor_map: cat.morphisms().map(|_| cat.identity(top)).collect(),
        components: cat.objects().map(to_top).collect(),
    };
    let model = ModelSection {
        w: all_class(&cat),
        cof: all_class(&cat),
        fib: MorphismClass::isos(&cat),
        initial: cat.obj_by_name("bot").unwrap(),
        terminal: top,
        fact1: fact1.clone(),
        fact2: fact1,
        q: Some(identity_replacement(&cat)),
        r: Some(r),
    };
    instance("collapse_diamond", cat, None, Some(model))
}

/// Minimal model data on the z-a-b-t preorder, except that the supplied
/// cofibrant replacement moves `a` to the isomorphic object `b`. Every
/// object is already cofibrant, so the local replacement is the identity
/// while Q is not: the two derived-functor routes differ by a canonical
/// isomorphism instead of coinciding on the nose.
pub fn qshift() -> InstanceData {
    let cat = qshift_cat();
    let b = cat.obj_by_name("b").unwrap();
    let mut model = triv_model(&cat, "z", "t");
    let on_obj = |x: ObjId| if cat.obj_name(x) == "a" { b } else { x };
    let q = ReplacementSection {
        obj_map: cat.objects().map(on_obj).collect(),
        mor_map: cat
            .morphisms()
            .map(|m| {
                let (d, c) = (on_obj(cat.dom(m)), on_obj(cat.cod(m)));
                *cat.hom(d, c).first().expect("qshift is thin with a~b")
            })
            .collect(),
        components: cat
            .objects()
            .map(|x| *cat.hom(on_obj(x), x).first().expect("q component"))
            .collect(),
    };
    model.q = Some(q);
    instance("qshift", cat, None, Some(model))
}

/// z2plus with its isomorphisms marked; no model data (the ambient category
/// lacks the self-coproduct of `gg`, so cylinder search cannot cover it).
pub fn triv_z2plus() -> InstanceData {
    let cat = z2plus();
    let isos = MorphismClass::isos(&cat);
    InstanceData { label: "triv_z2plus".into(), cat, w: Some(isos), model: None }
}

/// The arrow category with its only non-identity morphism marked.
pub fn arrow_w() -> InstanceData {
    instance("arrow_w", arrow(), Some(vec!["a_b"]), None)
}

/// The three-chain with the first step marked.
pub fn chain3_w() -> InstanceData {
    instance("chain3_w", chain3(), Some(vec!["x0_x1"]), None)
}

/// Two isomorphic objects with one direction of the isomorphism marked.
pub fn iso2_w() -> InstanceData {
    instance("iso2_w", iso2(), Some(vec!["x_y"]), None)
}

/// All shipped instances, in file order.
pub fn shipped_instances() -> Vec<InstanceData> {
    vec![
        arrow_w(),
        chain3_w(),
        collapse_diamond(),
        iso2_w(),
        qshift(),
        triv_diamond(),
        triv_z2plus(),
    ]
}

/// The shipped instances that carry model data.
pub fn shipped_model_instances() -> Vec<InstanceData> {
    shipped_instances().into_iter().filter(|i| i.is_model()).collect()
}

/// The shipped battery categories, in file order.
pub fn shipped_battery() -> Vec<InstanceData> {
    [point(), disc2(), arrow(), iso2(), z2()]
        .into_iter()
        .map(|cat| InstanceData {
            label: cat.label().to_string(),
            cat,
            w: None,
            model: None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{parse_instance, serialize_instance, validate_category};

    #[test]
    fn corpus_categories_are_valid() {
        for cat in [point(), disc2(), arrow(), iso2(), chain3(), diamond(), z2(), qshift_cat(), z2plus()] {
            let report = validate_category(&cat);
            assert!(report.is_valid(), "{}: {:?}", cat.label(), report.violations);
        }
    }

    #[test]
    fn z2plus_shape() {
        let c = z2plus();
        assert_eq!(c.n_objects(), 4);
        assert_eq!(c.n_morphisms(), 33);
        let g = c.obj_by_name("g").unwrap();
        let gg = c.obj_by_name("gg").unwrap();
        let t = c.obj_by_name("t").unwrap();
        let z = c.obj_by_name("z").unwrap();
        assert_eq!(c.hom(g, g).len(), 2);
        assert_eq!(c.hom(g, gg).len(), 4);
        assert_eq!(c.hom(gg, g).len(), 4);
        assert_eq!(c.hom(gg, gg).len(), 16);
        assert_eq!(c.hom(t, g).len(), 0);
        assert_eq!(c.hom(z, gg).len(), 1);
        // s is an involution; exactly 12 isomorphisms in total.
        let s = c.mor_by_name("s").unwrap();
        assert_eq!(c.comp(s, s), c.mor_by_name("id_g").unwrap());
        assert_eq!(MorphismClass::isos(&c).len(), 12);
    }

    #[test]
    fn z2plus_has_gg_as_self_coproduct_of_g_but_none_for_gg() {
        let c = z2plus();
        let g = c.obj_by_name("g").unwrap();
        let gg = c.obj_by_name("gg").unwrap();
        let cop = crate::fincat::find_coproduct(&c, g, g).expect("g + g exists");
        assert_eq!(cop.apex, gg);
        assert!(crate::fincat::find_coproduct(&c, gg, gg).is_none());
    }

    #[test]
    fn shipped_instances_round_trip() {
        for inst in shipped_instances().iter().chain(shipped_battery().iter()) {
            let text = serialize_instance(inst);
            let back = parse_instance(&inst.label, &text).expect("round trip parse");
            assert_eq!(&back.cat, &inst.cat, "{}", inst.label);
            assert_eq!(serialize_instance(&back), text, "{}", inst.label);
        }
    }
}
