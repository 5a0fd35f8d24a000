use super::*;
use crate::battery::Battery;
use crate::corpus::{
    collapse_diamond, diamond, disc2, point, qshift, triv_diamond, triv_model, z2plus,
};
use crate::fincat::InstanceData;
use crate::localization::{classify, compare_localizations, identity_witness};
use crate::model::ModelData;

fn meter() -> Meter {
    Meter::default()
}

fn model(inst: &InstanceData) -> ModelData {
    ModelData::from_instance(inst).expect("instance carries model data")
}

#[test]
fn triv_diamond_quotients_are_the_diamond_itself() {
    // with only isomorphisms marked, both quotients keep every hom-set
    let md = model(&triv_diamond());
    let (hok, _) = build_hok(&md, &meter()).unwrap();
    assert_eq!(hok.cat().n_objects(), 4);
    assert_eq!(hok.cat().n_morphisms(), 9);
    assert!(hok.l.is_bijective());
    assert_eq!(hok.fc, md.cat.objects().collect::<Vec<_>>());

    let (ho, _) = build_ho(&md, &meter()).unwrap();
    assert_eq!(ho.route, HoRoute::Q);
    assert_eq!(ho.cat().n_objects(), 4);
    assert_eq!(ho.cat().n_morphisms(), 9);
    assert!(ho.gamma.is_bijective());
}

#[test]
fn collapse_diamond_quotients_match_their_object_sets() {
    let md = model(&collapse_diamond());

    // one fibrant-cofibrant object, one class
    let (hok, _) = build_hok(&md, &meter()).unwrap();
    assert_eq!(hok.fc, vec![md.cat.obj_by_name("top").unwrap()]);
    assert_eq!(hok.cat().n_objects(), 1);
    assert_eq!(hok.cat().n_morphisms(), 1);

    // all four objects survive, with exactly one class between any two
    let (ho, _) = build_ho(&md, &meter()).unwrap();
    assert_eq!(ho.route, HoRoute::Q);
    assert_eq!(ho.cat().n_objects(), 4);
    assert_eq!(ho.cat().n_morphisms(), 16);
    for i in ho.cat().objects() {
        for j in ho.cat().objects() {
            assert_eq!(ho.cat().hom(i, j).len(), 1);
        }
    }
    assert!(ho.cat().morphisms().all(|m| ho.cat().is_iso(m)));
}

#[test]
fn qshift_routes_agree_up_to_the_canonical_comparison() {
    let md = model(&qshift());
    let b = md.cat.obj_by_name("b").unwrap();

    // the supplied replacement moves a to b, the local lift stays put
    let (hoq, _) = build_ho_route(&md, HoRoute::Q, &meter()).unwrap();
    let (hoc, _) = build_ho_route(&md, HoRoute::CTilde, &meter()).unwrap();
    assert_eq!(hoq.img[1], b);
    assert_eq!(hoc.img, md.cat.objects().collect::<Vec<_>>());
    assert_eq!(hoq.cat().n_morphisms(), 11);
    assert_eq!(hoc.cat().n_morphisms(), 11);

    // build_ho runs the comparison internally and keeps the supplied route
    let (ho, _) = build_ho(&md, &meter()).unwrap();
    assert_eq!(ho.route, HoRoute::Q);
    assert!(ho.gamma.is_bijective());
}

#[test]
fn gamma_inverts_exactly_the_marked_morphisms() {
    for inst in [triv_diamond(), collapse_diamond(), qshift()] {
        let md = model(&inst);
        let (ho, _) = build_ho(&md, &meter()).unwrap();
        let report = gamma_iso_iff_we(&md, &ho);
        assert!(report.ok, "{}: {:?}", inst.label, report.counterexamples);
        assert_eq!(report.checked, md.cat.n_morphisms() as u64);
    }
}

#[test]
fn zigzag_evaluation_collapses_formal_inverses() {
    let md = model(&collapse_diamond());
    let (_, wit) = build_ho(&md, &meter()).unwrap();
    let c = &md.cat;
    let bot = c.obj_by_name("bot").unwrap();
    let top = c.obj_by_name("top").unwrap();
    let bot_x = c.mor_by_name("bot_x").unwrap();
    let x_top = c.mor_by_name("x_top").unwrap();
    let bot_top = c.mor_by_name("bot_top").unwrap();

    let round = Zigzag { start: bot, end: bot, word: vec![Step::Fwd(bot_x), Step::Inv(bot_x)] };
    let id_bot = wit.loc.identity(wit.l.on_obj(bot));
    assert_eq!(evaluate_zigzag(&wit, &round).unwrap(), id_bot);

    // inverses compose contravariantly: (x_top . bot_x)^-1 = bot_x^-1 . x_top^-1
    let stepwise =
        Zigzag { start: top, end: bot, word: vec![Step::Inv(x_top), Step::Inv(bot_x)] };
    let direct = Zigzag { start: top, end: bot, word: vec![Step::Inv(bot_top)] };
    assert_eq!(
        evaluate_zigzag(&wit, &stepwise).unwrap(),
        evaluate_zigzag(&wit, &direct).unwrap()
    );

    // reversing an unmarked morphism is rejected before evaluation
    let md_triv = model(&triv_diamond());
    let (_, wit_triv) = build_ho(&md_triv, &meter()).unwrap();
    let bad = Zigzag { start: top, end: bot, word: vec![Step::Inv(bot_top)] };
    assert!(matches!(
        evaluate_zigzag(&wit_triv, &bad),
        Err(EngineError::MalformedZigzag(_))
    ));
}

#[test]
fn fc_quotient_is_a_weak_localization_on_shipped_models() {
    let battery = Battery::shipped();
    for inst in [triv_diamond(), collapse_diamond(), qshift()] {
        let md = model(&inst);
        let report = check_hok_weak(&md, &battery, &meter()).unwrap();
        assert_eq!(
            report.flag,
            Flag::Verified { battery_id: battery.id.clone() },
            "{}: {:?}",
            inst.label,
            report.evidence
        );
        assert_eq!(report.evidence.len(), battery.members.len());
    }
}

#[test]
fn cofibrant_restriction_is_still_a_weak_localization() {
    let battery = Battery::shipped();
    for inst in [triv_diamond(), collapse_diamond(), qshift()] {
        let md = model(&inst);
        let report = check_hok_on_mc(&md, &battery, &meter()).unwrap();
        assert_eq!(
            report.flag,
            Flag::Verified { battery_id: battery.id.clone() },
            "{}",
            inst.label
        );
    }
}

#[test]
fn full_quotient_is_a_strict_localization_on_shipped_models() {
    let battery = Battery::shipped();
    for inst in [triv_diamond(), collapse_diamond(), qshift()] {
        let md = model(&inst);
        let report = check_ho_strict(&md, &battery, &meter()).unwrap();
        assert_eq!(
            report.flag,
            Flag::Verified { battery_id: battery.id.clone() },
            "{}: {:?}",
            inst.label,
            report.evidence
        );
        assert!(report.families_checked > 0, "{}", inst.label);
    }
}

#[test]
fn the_two_quotients_are_equivalent_but_not_always_isomorphic() {
    let battery = Battery::shipped();
    let m = Meter::new(100_000_000);

    // point versus codiscrete square: equivalent, not isomorphic
    let md = model(&collapse_diamond());
    let (_, mut wk) = build_hok(&md, &m).unwrap();
    let (_, mut wh) = build_ho(&md, &m).unwrap();
    classify(&mut wk, &battery, &m).unwrap();
    classify(&mut wh, &battery, &m).unwrap();
    assert!(wk.flags.weak.is_verified());
    assert!(!wk.flags.strong.is_verified());
    assert!(wh.flags.strict.is_verified());
    let cmp = compare_localizations(&wk, &wh, &m).unwrap();
    assert!(!cmp.strict);
    assert_eq!(cmp.to2.source().tag(), wk.loc.tag());
    assert_eq!(cmp.to2.target().tag(), wh.loc.tag());

    // when both quotients are strong the comparison is an isomorphism
    let md = model(&qshift());
    let (_, mut wk) = build_hok(&md, &m).unwrap();
    let (_, mut wh) = build_ho(&md, &m).unwrap();
    classify(&mut wk, &battery, &m).unwrap();
    classify(&mut wh, &battery, &m).unwrap();
    assert!(wk.flags.strong.is_verified());
    assert!(wh.flags.strong.is_verified());
    let cmp = compare_localizations(&wk, &wh, &m).unwrap();
    assert!(cmp.strict);
}

#[test]
fn strict_factorization_recovers_functors_through_the_witness() {
    // through the identity witness the factorization is the functor itself
    let c = diamond();
    let wit = identity_witness(&c);
    let f = Functor::identity(c.clone());
    let h = strict_factor(&wit, &f, &meter()).unwrap();
    assert_eq!(h.obj_map(), f.obj_map());
    assert_eq!(h.mor_map(), f.mor_map());

    // a localization functor factors through its own witness as the identity
    let md = model(&collapse_diamond());
    let (_, wit) = build_ho(&md, &meter()).unwrap();
    let h = strict_factor(&wit, &wit.l, &meter()).unwrap();
    assert!(h.is_identity());

    let md = model(&qshift());
    let (_, wit) = build_ho(&md, &meter()).unwrap();
    let h = strict_factor(&wit, &wit.l, &meter()).unwrap();
    assert!(h.is_identity());
}

#[test]
fn strict_factorization_rejects_non_inverting_functors() {
    let md = model(&collapse_diamond());
    let (_, wit) = build_ho(&md, &meter()).unwrap();
    let f = Functor::identity(md.cat.clone());
    assert!(matches!(
        strict_factor(&wit, &f, &meter()),
        Err(EngineError::PreconditionFailed(_))
    ));
}

#[test]
fn strict_factorization_reports_witness_defects() {
    // a witness that misses an object: nothing can factor through it
    let pt = point();
    let two = disc2();
    let id0 = two.identity(ObjId(0));
    let l = Functor::new(pt.clone(), two.clone(), vec![ObjId(0)], vec![id0]).unwrap();
    let wit = witness(pt.clone(), MorphismClass::identities(&pt), two.clone(), l).unwrap();
    let err = strict_factor(&wit, &Functor::identity(pt.clone()), &meter()).unwrap_err();
    assert!(matches!(err, EngineError::NoFactorization(ref s) if s.contains("surjective")));

    // a witness that merges objects the functor keeps apart
    let two = disc2();
    let pt = point();
    let id_pt = pt.identity(ObjId(0));
    let l = Functor::new(
        two.clone(),
        pt.clone(),
        vec![ObjId(0), ObjId(0)],
        vec![id_pt, id_pt],
    )
    .unwrap();
    let wit = witness(two.clone(), MorphismClass::identities(&two), pt.clone(), l).unwrap();
    let err = strict_factor(&wit, &Functor::identity(two.clone()), &meter()).unwrap_err();
    assert!(matches!(err, EngineError::NoFactorization(ref s) if s.contains("different target")));
}

#[test]
fn quotients_refuse_categories_without_the_needed_cylinders() {
    // the group object has no coproduct or product with itself, so the
    // homotopy relation on hom-sets touching it is not computable
    let cat = z2plus();
    let sec = triv_model(&cat, "z", "t");
    let inst = InstanceData { label: "triv_z2plus_model".into(), cat, w: None, model: Some(sec) };
    let md = model(&inst);
    assert!(matches!(
        build_hok(&md, &meter()),
        Err(EngineError::NoCoproduct { .. } | EngineError::NoProduct { .. })
    ));
    assert!(matches!(
        build_ho(&md, &meter()),
        Err(EngineError::NoCoproduct { .. } | EngineError::NoProduct { .. })
    ));
}
