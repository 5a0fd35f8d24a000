use super::*;
use crate::corpus::{collapse_diamond, diamond, disc2, point, qshift, triv_diamond};
use crate::fincat::InstanceData;
use crate::model::{local_fibrant_replace, opposite_model};

fn meter() -> Meter {
    Meter::default()
}

fn model(inst: &InstanceData) -> ModelData {
    ModelData::from_instance(inst).expect("instance carries model data")
}

fn obj_ids(n: u32) -> Vec<ObjId> {
    (0..n).map(ObjId).collect()
}

fn mor_ids(n: u32) -> Vec<MorId> {
    (0..n).map(MorId).collect()
}

#[test]
fn extension_along_the_identity_returns_the_base() {
    let d = diamond();
    let p = Functor::identity(d.clone());
    let f = Functor::identity(d.clone());
    let pair = right_kan_extension(&p, &f, &meter())
        .unwrap()
        .expect("identity extension always exists");
    assert_eq!(pair.ext, f);
    assert!(pair.counit.components().iter().all(|&m| d.is_identity(m)));
    // rivals with a comparison into the identity sit pointwise below it;
    // the diamond has nine monotone self-maps below the identity
    assert_eq!(pair.certificate.len(), 9);
}

#[test]
fn extension_to_the_point_computes_the_meet() {
    let (c2, pt, d) = (disc2(), point(), diamond());
    let p = Functor::new(c2.clone(), pt, vec![ObjId(0); 2], vec![MorId(0); 2]).unwrap();
    let x = d.obj_by_name("x").unwrap();
    let y = d.obj_by_name("y").unwrap();
    let f = Functor::new(c2, d.clone(), vec![x, y], vec![d.identity(x), d.identity(y)]).unwrap();
    let pair = right_kan_extension(&p, &f, &meter())
        .unwrap()
        .expect("the diamond has binary meets");
    assert_eq!(d.obj_name(pair.ext.on_obj(ObjId(0))), "bot");
    let legs: Vec<&str> = pair.counit.components().iter().map(|&m| d.mor_name(m)).collect();
    assert_eq!(legs, ["bot_x", "bot_y"]);
    // only the constant-at-bot rival admits a comparison into both legs
    assert_eq!(pair.certificate.len(), 1);
}

#[test]
fn extension_without_limits_is_reported_absent() {
    let (c2, pt) = (disc2(), point());
    let p = Functor::new(c2.clone(), pt, vec![ObjId(0); 2], vec![MorId(0); 2]).unwrap();
    let f = Functor::identity(c2);
    assert!(right_kan_extension(&p, &f, &meter()).unwrap().is_none());
}

#[test]
fn deriving_the_trivial_identity_changes_nothing() {
    let md = model(&triv_diamond());
    let idf = Functor::identity(md.cat.clone());
    for route in [HoRoute::Q, HoRoute::CTilde] {
        let dk = derive_k_quillen(&idf, &md, &md, route, &meter()).unwrap();
        assert_eq!(dk.pair.ext.obj_map(), obj_ids(4));
        assert_eq!(dk.pair.ext.mor_map(), mor_ids(9));
        assert!(dk
            .pair
            .counit
            .components()
            .iter()
            .all(|&m| dk.n_wit.loc.is_identity(m)));
        assert_eq!(dk.pair.certificate.len(), 9);
    }

    let df = derive_f(&idf, &md, &md, &meter()).unwrap();
    assert_eq!(df.functor.obj_map(), obj_ids(4));
    assert_eq!(df.functor.mor_map(), mor_ids(9));
    // with every object cofibrant the replacement comparisons are
    // identities and the weak comparison collapses onto iota
    assert_eq!(df.weak.components(), df.iota.components());

    let ds = derive_s(&idf, &md, &md, &meter()).unwrap();
    assert_eq!(ds.functor.obj_map(), obj_ids(4));
    assert_eq!(ds.functor.mor_map(), mor_ids(9));
    assert_eq!(ds.checked, 9);
    assert!(ds.weak.components().iter().all(|&m| ds.n_wit.loc.is_identity(m)));
}

#[test]
fn deriving_the_collapse_identity_is_certified_in_singleton_classes() {
    let md = model(&collapse_diamond());
    let idf = Functor::identity(md.cat.clone());
    let dk = derive_k_quillen(&idf, &md, &md, HoRoute::Q, &meter()).unwrap();
    // every hom-set of the quotient is a single class, so every of the
    // 4^4 object assignments is a rival and pairs with one comparison
    assert_eq!(dk.pair.certificate.len(), 256);
    assert!(dk
        .pair
        .counit
        .components()
        .iter()
        .all(|&m| dk.n_wit.loc.is_identity(m)));

    // both fibrant-cofibrant quotients are points
    let kan = derive_k_kan(&idf, &md, &md, &meter()).unwrap();
    assert_eq!(kan.pair.ext.source().n_morphisms(), 1);
    assert_eq!(kan.pair.certificate.len(), 1);
}

#[test]
fn deriving_a_constant_functor_keeps_the_terminal_value() {
    let mdc = model(&collapse_diamond());
    let mdt = model(&triv_diamond());
    let top = mdt.cat.obj_by_name("top").unwrap();
    let f = Functor::new(
        mdc.cat.clone(),
        mdt.cat.clone(),
        vec![top; 4],
        vec![mdt.cat.identity(top); 9],
    )
    .unwrap();
    let dk = derive_k_quillen(&f, &mdc, &mdt, HoRoute::Q, &meter()).unwrap();
    assert!(dk.pair.ext.obj_map().iter().all(|&x| x == top));
    // functors out of the codiscrete quotient are constant, and each of
    // the four admits exactly one comparison into the constant base
    assert_eq!(dk.pair.certificate.len(), 4);

    let kf = compare_kf(&f, &mdc, &mdt, &meter()).unwrap();
    assert!(kf.equal);
    assert_eq!(kf.kan.pair.certificate.len(), 4);
}

#[test]
fn kan_reading_and_faint_factorization_agree() {
    for inst in [triv_diamond(), collapse_diamond(), qshift()] {
        let md = model(&inst);
        let idf = Functor::identity(md.cat.clone());
        let kf = compare_kf(&idf, &md, &md, &meter()).unwrap();
        assert!(kf.equal, "{}", md.cat.label());
        assert!(!kf.kan.pair.certificate.is_empty(), "{}", md.cat.label());
    }
}

#[test]
fn certified_pair_matches_the_pointwise_extension() {
    for inst in [triv_diamond(), collapse_diamond()] {
        let md = model(&inst);
        let idf = Functor::identity(md.cat.clone());
        let kan = derive_k_kan(&idf, &md, &md, &meter()).unwrap();
        let pw = right_kan_extension(&kan.pair.along, &kan.pair.base, &meter())
            .unwrap()
            .expect("pointwise extension exists");
        // the pointwise pair is one of the enumerated rivals and its
        // mediator into the certified extension is invertible
        let row = kan
            .pair
            .certificate
            .iter()
            .find(|r| r.rival == pw.ext && r.zeta == pw.counit)
            .expect("pointwise pair is enumerated");
        assert!(row.mediator.is_iso(), "{}", md.cat.label());
    }
}

#[test]
fn subcategory_route_lands_on_the_replacement_composite() {
    let md = model(&qshift());
    let idf = Functor::identity(md.cat.clone());
    let ds = derive_s(&idf, &md, &md, &meter()).unwrap();
    let names: Vec<&str> = ds.functor.obj_map().iter().map(|&x| md.cat.obj_name(x)).collect();
    assert_eq!(names, ["z", "b", "b", "t"]);
    assert_eq!(ds.checked, 11);
    // the weak comparison is the localized replacement comparison, an
    // identity everywhere except at the shifted object
    let a = md.cat.obj_by_name("a").unwrap();
    for x in md.cat.objects() {
        let ident = ds.n_wit.loc.is_identity(ds.weak.component(x));
        assert_eq!(ident, x != a);
    }
}

#[test]
fn replacement_routes_coincide_when_replacement_is_the_identity() {
    for inst in [triv_diamond(), collapse_diamond()] {
        let md = model(&inst);
        let idf = Functor::identity(md.cat.clone());
        let ks = compare_ks(&idf, &md, &md, &meter()).unwrap();
        assert!(ks.routes_coincide, "{}", md.cat.label());
        assert_eq!(ks.k_local.pair.ext, ks.k_replacement.pair.ext);
        assert_eq!(ks.k_replacement.pair.ext, ks.s.functor);
    }
}

#[test]
fn replacement_routes_differ_by_the_lifted_comparison_on_the_shifted_instance() {
    let md = model(&qshift());
    let idf = Functor::identity(md.cat.clone());
    let ks = compare_ks(&idf, &md, &md, &meter()).unwrap();
    let names = |f: &Functor| -> Vec<&str> {
        f.obj_map().iter().map(|&x| md.cat.obj_name(x)).collect()
    };
    // the local route keeps every object in place, the replacement route
    // moves a to the isomorphic b, and the two stay isomorphic
    assert_eq!(names(&ks.k_local.pair.ext), ["z", "a", "b", "t"]);
    assert_eq!(names(&ks.k_replacement.pair.ext), ["z", "b", "b", "t"]);
    assert_eq!(names(&ks.s.functor), ["z", "b", "b", "t"]);
    assert!(!ks.routes_coincide);
    assert!(ks.cross_iso.is_iso());
    let a = md.cat.obj_by_name("a").unwrap();
    let loc = &ks.k_local.n_wit.loc;
    let nontrivial: Vec<ObjId> = md
        .cat
        .objects()
        .filter(|&x| !loc.is_identity(ks.cross_iso.component(x)))
        .collect();
    assert_eq!(nontrivial, vec![a]);
    assert_eq!(ks.checked, 33);
}

#[test]
fn explicit_quasi_inverse_shifts_the_derived_functor_by_an_isomorphism() {
    let md = model(&qshift());
    let idf = Functor::identity(md.cat.clone());
    let s = derive_s(&idf, &md, &md, &meter()).unwrap();
    // every object is cofibrant, so the inclusion inverts on the nose and
    // induces a second quasi-inverse that keeps the shifted object fixed
    let back = s.sub.inclusion.inverse().expect("subcategory on every object");
    let keep = strict_factor(
        &s.m_wit,
        &Functor::compose(&s.mc_wit.l, &back).unwrap(),
        &meter(),
    )
    .unwrap();
    assert_ne!(keep, s.quasi_inverse);
    let ex = derive_s_with_quasi_inverse(&s, &keep, &meter()).unwrap();
    assert_ne!(ex.functor, s.functor);
    assert_eq!(ex.kappa.from(), &ex.functor);
    assert_eq!(ex.kappa.to(), &s.functor);
    assert!(ex.kappa.is_iso());
    let a = md.cat.obj_by_name("a").unwrap();
    assert!(!s.n_wit.loc.is_identity(ex.kappa.component(a)));
}

#[test]
fn derivations_reject_functors_that_break_equivalences() {
    let mdc = model(&collapse_diamond());
    let mdt = model(&triv_diamond());
    // identity-shaped between the instances: sends collapsed weak
    // equivalences to plain non-invertible morphisms
    let f = Functor::new(
        mdc.cat.clone(),
        mdt.cat.clone(),
        mdc.cat.objects().collect(),
        mdc.cat.morphisms().collect(),
    )
    .unwrap();
    for err in [
        derive_k_quillen(&f, &mdc, &mdt, HoRoute::Q, &meter()).unwrap_err(),
        derive_f(&f, &mdc, &mdt, &meter()).unwrap_err(),
        derive_s(&f, &mdc, &mdt, &meter()).unwrap_err(),
    ] {
        assert!(matches!(err, EngineError::PreconditionFailed(_)), "{err}");
    }
}

#[test]
fn replacement_routes_need_the_replacement_functor() {
    let mut md = model(&triv_diamond());
    md.qfun = None;
    md.rfun = None;
    let idf = Functor::identity(md.cat.clone());
    assert!(matches!(
        derive_k_quillen(&idf, &md, &md, HoRoute::Q, &meter()),
        Err(EngineError::MissingQ)
    ));
    assert!(matches!(derive_s(&idf, &md, &md, &meter()), Err(EngineError::MissingQ)));
    // the local route lifts its own replacements
    assert!(derive_k_quillen(&idf, &md, &md, HoRoute::CTilde, &meter()).is_ok());
}

#[test]
fn opposite_model_derives_through_the_mirrored_replacement() {
    let md = model(&collapse_diamond());
    let op = opposite_model(&md);
    let idf = Functor::identity(op.cat.clone());
    let dk = derive_k_quillen(&idf, &op, &op, HoRoute::Q, &meter()).unwrap();
    // object and morphism ids are shared with the original, so the
    // opposite's cofibrant replacement is the original's fibrant one
    for x in md.cat.objects() {
        let (fx, rx) = local_fibrant_replace(&md, x);
        assert_eq!(dk.pair.ext.on_obj(x), fx);
        assert_eq!(dk.phi[x.0 as usize], rx);
    }
}
