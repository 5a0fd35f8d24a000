use std::sync::Arc;

use super::*;
use crate::corpus::{arrow, chain3, diamond, disc2, iso2, point, z2};
use crate::error::Meter;

fn meter() -> Meter {
    Meter::default()
}

/// Reference enumerator: try every object map and every morphism map, keep
/// the ones that type-check and satisfy the functor laws. Exponential, only
/// for cross-checking the propagating search on small inputs.
fn brute_force_functors(c: &CatRef, d: &CatRef) -> Vec<Functor> {
    let mut found = Vec::new();
    let n = c.n_objects();
    let m = c.n_morphisms();
    let mut obj = vec![0u32; n];
    loop {
        let obj_map: Vec<ObjId> = obj.iter().map(|&i| ObjId(i)).collect();
        let mut mor = vec![0u32; m];
        'mor: loop {
            let mor_map: Vec<MorId> = mor.iter().map(|&i| MorId(i)).collect();
            if let Ok(f) = Functor::new(c.clone(), d.clone(), obj_map.clone(), mor_map) {
                if validate_functor(&f).is_valid() {
                    found.push(f);
                }
            }
            for digit in mor.iter_mut() {
                *digit += 1;
                if (*digit as usize) < d.n_morphisms() {
                    continue 'mor;
                }
                *digit = 0;
            }
            break;
        }
        let mut carried = false;
        for digit in obj.iter_mut() {
            *digit += 1;
            if (*digit as usize) < d.n_objects() {
                carried = true;
                break;
            }
            *digit = 0;
        }
        if !carried {
            break;
        }
    }
    found.sort_by_key(|f| f.order_key());
    found
}

fn brute_force_nat(f: &Functor, g: &Functor) -> Vec<NatTransformation> {
    let d = f.target();
    let n = f.source().n_objects();
    let choices: Vec<&[MorId]> = f
        .source()
        .objects()
        .map(|x| d.hom(f.on_obj(x), g.on_obj(x)))
        .collect();
    if choices.iter().any(|h| h.is_empty()) {
        return Vec::new();
    }
    let mut found = Vec::new();
    let mut pick = vec![0usize; n];
    loop {
        let comps: Vec<MorId> = (0..n).map(|i| choices[i][pick[i]]).collect();
        let t = NatTransformation::new(f.clone(), g.clone(), comps).unwrap();
        if t.is_natural() {
            found.push(t);
        }
        let mut carried = false;
        for i in 0..n {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                carried = true;
                break;
            }
            pick[i] = 0;
        }
        if !carried {
            break;
        }
    }
    found
}

#[test]
fn functor_enumeration_matches_brute_force() {
    let cases: Vec<(CatRef, CatRef)> = vec![
        (z2(), z2()),
        (arrow(), z2()),
        (chain3(), z2()),
        (disc2(), arrow()),
        (arrow(), iso2()),
        (chain3(), iso2()),
        (diamond(), arrow()),
        (point(), diamond()),
        (z2(), iso2()),
    ];
    for (c, d) in cases {
        let fast = enumerate_functors(&c, &d, &meter()).unwrap();
        let slow = brute_force_functors(&c, &d);
        assert_eq!(
            fast, slow,
            "{} -> {}: {} vs {}",
            c.label(),
            d.label(),
            fast.len(),
            slow.len()
        );
        let mut keys: Vec<_> = fast.iter().map(|f| f.order_key()).collect();
        let sorted = keys.clone();
        keys.sort();
        assert_eq!(keys, sorted, "canonical order");
    }
}

#[test]
fn hand_counted_functor_totals() {
    // One object, two morphisms with s.s = id: the identity and the collapse.
    assert_eq!(enumerate_functors(&z2(), &z2(), &meter()).unwrap().len(), 2);
    // Images of the two chain steps are free in the group; composite forced.
    assert_eq!(enumerate_functors(&chain3(), &z2(), &meter()).unwrap().len(), 4);
    // A functor from the point picks an object.
    assert_eq!(enumerate_functors(&point(), &diamond(), &meter()).unwrap().len(), 4);
    // Monotone maps: any of the two objects for each of the two points.
    assert_eq!(enumerate_functors(&disc2(), &arrow(), &meter()).unwrap().len(), 4);
}

#[test]
fn nat_transformation_enumeration_matches_brute_force() {
    let pairs: Vec<(CatRef, CatRef)> =
        vec![(z2(), z2()), (arrow(), iso2()), (arrow(), arrow()), (chain3(), z2())];
    for (c, d) in pairs {
        let funs = enumerate_functors(&c, &d, &meter()).unwrap();
        for f in &funs {
            for g in &funs {
                let fast = enumerate_nat_transformations(f, g, &meter()).unwrap();
                let slow = brute_force_nat(f, g);
                assert_eq!(fast.len(), slow.len(), "{} -> {}", c.label(), d.label());
                for t in &fast {
                    assert!(slow.iter().any(|s| s.components() == t.components()));
                }
                let isos = enumerate_natural_isos(f, g, &meter()).unwrap();
                let slow_isos: Vec<_> = slow.iter().filter(|t| t.is_iso()).collect();
                assert_eq!(isos.len(), slow_isos.len());
            }
        }
    }
}

#[test]
fn z2_endo_transformations() {
    // Both components of Hom(g, g) are natural from id to id: the group is
    // commutative, so conjugation fixes everything.
    let c = z2();
    let funs = enumerate_functors(&c, &c, &meter()).unwrap();
    let id = funs.iter().find(|f| f.is_identity()).unwrap();
    assert_eq!(enumerate_nat_transformations(id, id, &meter()).unwrap().len(), 2);
}

#[test]
fn diamond_universal_objects() {
    let c = diamond();
    let bot = c.obj_by_name("bot").unwrap();
    let top = c.obj_by_name("top").unwrap();
    let x = c.obj_by_name("x").unwrap();
    let y = c.obj_by_name("y").unwrap();

    let init = find_initial(&c).unwrap();
    assert_eq!(init.obj, bot);
    assert_eq!(init.iso_class, vec![bot]);
    let term = find_terminal(&c).unwrap();
    assert_eq!(term.obj, top);

    // The join of the two incomparable middles is the top.
    let cop = find_coproduct(&c, x, y).unwrap();
    assert_eq!(cop.apex, top);
    assert_eq!(cop.inj1, c.mor_by_name("x_top").unwrap());
    assert_eq!(cop.inj2, c.mor_by_name("y_top").unwrap());
    assert_eq!(copair(&c, &cop, cop.inj1, cop.inj2), Some(c.identity(top)));
    let prod = find_product(&c, x, y).unwrap();
    assert_eq!(prod.apex, bot);

    // Self-coproducts in a poset are the object itself.
    assert_eq!(find_coproduct(&c, x, x).unwrap().apex, x);

    assert!(find_initial(&disc2()).is_none());
    let both = find_initial(&iso2()).unwrap();
    assert_eq!(both.iso_class.len(), 2);
}

#[test]
fn opposite_is_an_involution() {
    for c in [point(), disc2(), arrow(), iso2(), chain3(), diamond(), z2()] {
        let op = opposite(&c);
        assert!(validate_category(&op).is_valid());
        assert_eq!(*opposite(&op), *c, "{}", c.label());
        for m in c.morphisms() {
            assert_eq!(c.dom(m), op.cod(m));
            assert_eq!(c.cod(m), op.dom(m));
        }
    }
    let op = opposite(&arrow());
    let (a, b) = (op.obj_by_name("a").unwrap(), op.obj_by_name("b").unwrap());
    assert_eq!(op.hom(b, a).len(), 1);
    assert_eq!(op.hom(a, b).len(), 0);
}

#[test]
fn full_subcategory_of_diamond() {
    let c = diamond();
    let x = c.obj_by_name("x").unwrap();
    let top = c.obj_by_name("top").unwrap();
    let sub = full_subcategory(&c, &[top, x, x]);
    assert_eq!(sub.cat.n_objects(), 2);
    assert_eq!(sub.cat.n_morphisms(), 3);
    assert!(validate_functor(&sub.inclusion).is_valid());
    assert_eq!(sub.obj_down(top), Some(ObjId(1)));
    let jx = c.mor_by_name("x_top").unwrap();
    let down = sub.mor_down(jx).unwrap();
    assert_eq!(sub.inclusion.on_mor(down), jx);
    assert!(sub.mor_down(c.mor_by_name("bot_x").unwrap()).is_none());
}

#[test]
fn isomorphism_search() {
    // The diamond with relabeled, permuted objects is found isomorphic.
    let permuted = crate::corpus::build_thin("diamond_p", &["p", "q", "r", "w"], |i, j| {
        i == j || i == 1 || j == 2
    });
    let iso = find_isomorphism(&diamond(), &permuted, &meter()).unwrap().unwrap();
    assert!(iso.is_bijective());
    assert!(validate_functor(&iso).is_valid());
    assert_eq!(iso.on_obj(ObjId(0)), permuted.obj_by_name("q").unwrap());

    assert!(find_isomorphism(&arrow(), &iso2(), &meter()).unwrap().is_none());
    assert!(find_isomorphism(&disc2(), &arrow(), &meter()).unwrap().is_none());
    // Same counts, different structure: the arrow versus the group next to
    // an isolated point is caught only by the hom tables.
    let z2_point = Arc::new(
        FinCategory::new(
            "z2_point",
            vec!["g".into(), "p".into()],
            vec![("id_g".into(), 0, 0), ("s".into(), 0, 0), ("id_p".into(), 1, 1)],
            vec![0, 2],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (2, 2, 2)],
        )
        .unwrap(),
    );
    assert_eq!(arrow().n_morphisms(), z2_point.n_morphisms());
    assert!(find_isomorphism(&arrow(), &z2_point, &meter()).unwrap().is_none());
}

#[test]
fn invalid_composition_tables_are_reported() {
    // Shape-valid but non-associative: (a.a).a = b.a = b, a.(a.a) = a.b = a.
    let broken = FinCategory::new(
        "broken",
        vec!["x".into()],
        vec![("id".into(), 0, 0), ("a".into(), 0, 0), ("b".into(), 0, 0)],
        vec![0],
        &[
            (0, 0, 0),
            (0, 1, 1),
            (0, 2, 2),
            (1, 0, 1),
            (2, 0, 2),
            (1, 1, 2),
            (1, 2, 1),
            (2, 1, 2),
            (2, 2, 2),
        ],
    )
    .unwrap();
    let report = validate_category(&broken);
    assert!(!report.is_valid());
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, CategoryLaw::Associativity { .. })));

    // A left-identity violation: id.a redirected to b.
    let bad_id = FinCategory::new(
        "bad_id",
        vec!["x".into()],
        vec![("id".into(), 0, 0), ("a".into(), 0, 0), ("b".into(), 0, 0)],
        vec![0],
        &[
            (0, 0, 0),
            (0, 1, 2),
            (0, 2, 2),
            (1, 0, 1),
            (2, 0, 2),
            (1, 1, 1),
            (1, 2, 1),
            (2, 1, 2),
            (2, 2, 2),
        ],
    )
    .unwrap();
    assert!(!validate_category(&bad_id).is_valid());
}

#[test]
fn shape_errors() {
    let dup = FinCategory::new(
        "dup",
        vec!["x".into()],
        vec![("id".into(), 0, 0), ("a".into(), 0, 0)],
        vec![0],
        &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)],
    );
    assert!(matches!(dup, Err(ShapeError::DuplicateComposition { .. })));

    let partial = FinCategory::new(
        "partial",
        vec!["x".into()],
        vec![("id".into(), 0, 0), ("a".into(), 0, 0)],
        vec![0],
        &[(0, 0, 0), (0, 1, 1), (1, 0, 1)],
    );
    assert!(matches!(partial, Err(ShapeError::PartialComposition { .. })));

    let bad_identity = FinCategory::new(
        "bad",
        vec!["x".into(), "y".into()],
        vec![("id_x".into(), 0, 0), ("f".into(), 0, 1)],
        vec![0, 1],
        &[],
    );
    assert!(matches!(bad_identity, Err(ShapeError::BadIdentity { .. })));
}

#[test]
fn functor_validation_catches_law_violations() {
    let c = chain3();
    let d = z2();
    let s = d.mor_by_name("s").unwrap();
    // All three steps to s: the composite must then be s.s = id, not s.
    let f = Functor::new(
        c.clone(),
        d.clone(),
        vec![ObjId(0); 3],
        c.morphisms()
            .map(|m| if c.is_identity(m) { d.identity(ObjId(0)) } else { s })
            .collect(),
    )
    .unwrap();
    let report = validate_functor(&f);
    assert!(!report.is_valid());
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, FunctorLaw::Composition { .. })));
}

#[test]
fn composition_paths() {
    let c = chain3();
    let x0 = c.obj_by_name("x0").unwrap();
    let a = c.mor_by_name("x0_x1").unwrap();
    let b = c.mor_by_name("x1_x2").unwrap();
    assert_eq!(c.comp_path(x0, &[a, b]), Some(c.mor_by_name("x0_x2").unwrap()));
    assert_eq!(c.comp_path(x0, &[]), Some(c.identity(x0)));
    assert_eq!(c.comp_path(x0, &[b]), None);
}

#[test]
fn morphism_class_helpers() {
    let c = iso2();
    assert_eq!(MorphismClass::isos(&c).len(), 4);
    assert_eq!(MorphismClass::identities(&c).len(), 2);
    let c = arrow();
    assert_eq!(MorphismClass::isos(&c).len(), 2);
    let ids = MorphismClass::identities(&c);
    let isos = MorphismClass::isos(&c);
    assert_eq!(ids.intersect(&isos).len(), 2);
    assert!(ids.check_parent(&c).is_ok());
    assert!(ids.check_parent(&iso2()).is_err());
}

#[test]
fn transformation_algebra() {
    let c = arrow();
    let d = iso2();
    let funs = enumerate_functors(&c, &d, &meter()).unwrap();
    for f in &funs {
        for g in &funs {
            for t in enumerate_nat_transformations(f, g, &meter()).unwrap() {
                if let Some(inv) = t.inverse() {
                    let round = NatTransformation::vcomp(&inv, &t).unwrap();
                    assert!(round.components().iter().copied().eq(c
                        .objects()
                        .map(|x| d.identity(f.on_obj(x)))));
                }
                // Whiskering with identity functors changes nothing.
                let idc = Functor::identity(c.clone());
                let idd = Functor::identity(d.clone());
                assert_eq!(t.whisker_pre(&idc).unwrap().components(), t.components());
                assert_eq!(t.whisker_post(&idd).unwrap().components(), t.components());
            }
        }
    }
}

#[test]
fn budget_is_enforced() {
    let tight = Meter::new(3);
    let err = enumerate_functors(&diamond(), &diamond(), &tight).unwrap_err();
    assert!(matches!(err, crate::EngineError::BudgetExceeded { .. }));
}

#[test]
fn functor_composition_and_inverse() {
    let c = arrow();
    let funs = enumerate_functors(&c, &c, &meter()).unwrap();
    let id = Functor::identity(c.clone());
    assert!(funs.contains(&id));
    for f in &funs {
        assert_eq!(&Functor::compose(f, &id).unwrap(), f);
        assert_eq!(&Functor::compose(&id, f).unwrap(), f);
    }
    let iso = find_isomorphism(&iso2(), &iso2(), &meter()).unwrap().unwrap();
    let inv = iso.inverse().unwrap();
    assert!(Functor::compose(&inv, &iso).unwrap().is_identity());
}

#[test]
fn parse_rejects_malformed_instances() {
    let text = r#"{
      "objects": ["x"],
      "morphisms": [{"id": "id_x", "dom": "x", "cod": "x"}],
      "identities": {"x": "id_x"},
      "composition": []
    }"#;
    assert!(matches!(
        parse_instance("t", text),
        Err(LoadError::Shape(ShapeError::PartialComposition { .. }))
    ));

    let text = r#"{
      "objects": ["x"],
      "morphisms": [{"id": "id_x", "dom": "x", "cod": "x"}],
      "identities": {"x": "id_x"},
      "composition": [{"g": "id_x", "f": "id_x", "gf": "id_x"}],
      "classes": {"W": ["nope"]}
    }"#;
    assert!(matches!(parse_instance("t", text), Err(LoadError::UnknownMorphism(_))));

    let text = r#"{
      "objects": ["x"],
      "morphisms": [{"id": "id_x", "dom": "x", "cod": "x"}],
      "identities": {"x": "id_x"},
      "composition": [{"g": "id_x", "f": "id_x", "gf": "id_x"}],
      "initial": "x"
    }"#;
    assert!(matches!(parse_instance("t", text), Err(LoadError::IncompleteModel(_))));
}

#[test]
fn functor_files_round_trip() {
    let c = arrow();
    let d = iso2();
    for f in enumerate_functors(&c, &d, &meter()).unwrap() {
        let file = FunctorFile::of(&f);
        let text = serde_json::to_string(&file).unwrap();
        let back = FunctorFile::parse(&text).unwrap().resolve(&c, &d).unwrap();
        assert_eq!(back, f);
    }
}

#[test]
fn empty_category_is_handled() {
    let empty = Arc::new(FinCategory::new("empty", vec![], vec![], vec![], &[]).unwrap());
    assert!(validate_category(&empty).is_valid());
    assert_eq!(enumerate_functors(&empty, &diamond(), &meter()).unwrap().len(), 1);
    assert_eq!(enumerate_functors(&diamond(), &empty, &meter()).unwrap().len(), 0);
    assert_eq!(enumerate_functors(&empty, &empty, &meter()).unwrap().len(), 1);
}
