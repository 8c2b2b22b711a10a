use super::etale::{etale_space, generated_topology_oracle, projection_image};
use super::*;
use crate::corpus::presheaves::presheaf_corpus;
use crate::corpus::spaces::{all_spaces_up_to, discrete, sierpinski};
use crate::space::CoverMode;
use std::collections::BTreeSet;

fn budgets() -> Budgets {
    Budgets::default()
}

/// Two independent sections everywhere on a discrete 2-point space, with
/// identity restrictions except the stated table for `X → {i}`.
fn two_point_presheaf(top: &[&str], res_to_0: Vec<u32>, res_to_1: Vec<u32>) -> Presheaf {
    let s = discrete(2);
    let opens = s.opens().unwrap().to_vec();
    let full = s.full_set();
    let o0 = IndexSet::from_indices(2, [0]);
    let o1 = IndexSet::from_indices(2, [1]);
    let empty = s.empty_set();
    let mut sections = BTreeMap::new();
    sections.insert(empty.clone(), vec!["ε".to_string()]);
    sections.insert(o0.clone(), vec!["a".to_string()]);
    sections.insert(o1.clone(), vec!["b".to_string()]);
    sections.insert(full.clone(), top.iter().map(|s| s.to_string()).collect());
    let mut res = BTreeMap::new();
    for u in &opens {
        res.insert((u.clone(), empty.clone()), vec![0; sections[u].len()]);
        res.insert((u.clone(), u.clone()), (0..sections[u].len() as u32).collect());
    }
    res.insert((full.clone(), o0.clone()), res_to_0);
    res.insert((full.clone(), o1.clone()), res_to_1);
    Presheaf::new(s, sections, res)
}

#[test]
fn constant_presheaf_is_clean_and_a_sheaf_on_singletons() {
    let s = discrete(2);
    let p = Presheaf::constant(&s, &["*"]).unwrap();
    assert!(p.check().unwrap().is_clean());
    assert!(p.is_sheaf(CoverMode::Canonical, &budgets()).unwrap().is_sheaf);
    assert!(p.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf);
}

#[test]
fn broken_identity_restriction_is_reported() {
    let s = sierpinski();
    let mut p = Presheaf::constant(&s, &["a", "b"]).unwrap();
    let full = s.full_set();
    p.res.insert((full.clone(), full.clone()), vec![1, 0]);
    let report = p.check().unwrap();
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, PresheafViolation::IdentityViolated { .. })));
}

#[test]
fn swapped_composite_on_a_chain_breaks_functoriality() {
    // Chain ∅ ⊂ {1} ⊂ X in the Sierpinski space: route X → ∅ directly as a
    // swap while both steps are identities.
    let s = sierpinski();
    let opens = s.opens().unwrap().to_vec();
    let mut sections = BTreeMap::new();
    for u in &opens {
        sections.insert(u.clone(), vec!["a".to_string(), "b".to_string()]);
    }
    let mut res = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if v.is_subset(u) {
                res.insert((u.clone(), v.clone()), vec![0, 1]);
            }
        }
    }
    res.insert((s.full_set(), s.empty_set()), vec![1, 0]);
    let p = Presheaf::new(s, sections, res);
    let report = p.check().unwrap();
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, PresheafViolation::FunctorialityViolated { .. })));
}

#[test]
fn singleton_everywhere_is_a_sheaf() {
    let p = two_point_presheaf(&["c"], vec![0], vec![0]);
    assert!(p.check().unwrap().is_clean());
    assert!(p.is_sheaf(CoverMode::Canonical, &budgets()).unwrap().is_sheaf);
}

#[test]
fn two_sections_gluing_one_family_is_not_a_sheaf() {
    let p = two_point_presheaf(&["c", "d"], vec![0, 0], vec![0, 0]);
    assert!(p.check().unwrap().is_clean());
    let verdict = p.is_sheaf(CoverMode::Canonical, &budgets()).unwrap();
    assert!(!verdict.is_sheaf);
    let failure = verdict.failure.unwrap();
    assert_eq!(failure.gluings.len(), 2);
}

#[test]
fn skyscrapers_are_sheaves_exhaustively() {
    for s in all_spaces_up_to(3) {
        for &x in s.points() {
            let p = skyscraper(&s, x, &["u", "v", "w"]).unwrap();
            assert!(p.check().unwrap().is_clean());
            assert!(p.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf);
        }
    }
}

#[test]
fn empty_skyscraper_stalk_is_rejected() {
    let s = discrete(2);
    assert!(matches!(
        skyscraper(&s, crate::space::Point(0), &[]),
        Err(PresheafError::EmptyStalkRejected)
    ));
}

#[test]
fn skyscraper_sections_follow_the_support() {
    let s = sierpinski();
    let p1 = skyscraper(&s, crate::space::Point(1), &["a", "b"]).unwrap();
    let o1 = IndexSet::from_indices(2, [1]);
    assert_eq!(p1.n_sections(&o1), 2);
    assert_eq!(p1.n_sections(&s.full_set()), 2);
    assert_eq!(p1.n_sections(&s.empty_set()), 1);
    let p0 = skyscraper(&s, crate::space::Point(0), &["a", "b"]).unwrap();
    assert_eq!(p0.n_sections(&o1), 1);
    assert_eq!(p0.n_sections(&s.full_set()), 2);
}

#[test]
fn stalk_of_skyscraper_at_support_is_the_stalk_set() {
    let s = sierpinski();
    for &x in s.points() {
        let p = skyscraper(&s, x, &["a", "b", "c"]).unwrap();
        let (_, ids) = p.stalk(x).unwrap();
        assert_eq!(ids.len(), 3);
    }
}

#[test]
fn stalks_on_sierpinski_constant_presheaf() {
    let s = sierpinski();
    let p = Presheaf::constant(&s, &["a", "b"]).unwrap();
    let (u0, ids0) = p.stalk(crate::space::Point(0)).unwrap();
    assert_eq!(u0, s.full_set());
    assert_eq!(ids0.len(), 2);
    let (u1, ids1) = p.stalk(crate::space::Point(1)).unwrap();
    assert_eq!(u1.indices(), vec![1]);
    assert_eq!(ids1.len(), 2);
}

#[test]
fn stalk_matches_colimit_quotient_oracle_on_corpus() {
    let spaces = all_spaces_up_to(3);
    for p in presheaf_corpus(&spaces, 11, 1) {
        for &x in p.space().points() {
            let (_, ids) = p.stalk(x).unwrap();
            let classes = p.stalk_colimit_oracle(x).unwrap();
            assert_eq!(classes.len(), ids.len(), "{p:?} at {x}");
            // Each class must contain exactly one representative over U_x.
            let ux = p.space().min_open(p.space().index_of(x).unwrap()).clone();
            let mut seen = BTreeSet::new();
            for class in &classes {
                let reps: Vec<u32> = class
                    .iter()
                    .filter(|(u, _)| u == &ux)
                    .map(|&(_, sid)| sid)
                    .collect();
                assert_eq!(reps.len(), 1);
                seen.insert(reps[0]);
            }
            assert_eq!(seen.len(), ids.len());
        }
    }
}

#[test]
fn canonical_and_exhaustive_sheaf_checks_agree_on_corpus() {
    let spaces = all_spaces_up_to(3);
    for p in presheaf_corpus(&spaces, 3, 2) {
        let canonical = p.is_sheaf(CoverMode::Canonical, &budgets()).unwrap().is_sheaf;
        let exhaustive = p.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf;
        assert_eq!(canonical, exhaustive, "{p:?}");
    }
}

#[test]
fn etale_space_of_constant_singleton_is_the_base() {
    for s in all_spaces_up_to(3) {
        let p = Presheaf::constant(&s, &["*"]).unwrap();
        let bundle = etale_space(&p).unwrap();
        assert_eq!(bundle.total.n_points(), s.n_points());
        // One germ per point and the projection is a homeomorphism: check
        // that minimal opens correspond under the projection.
        for g in 0..bundle.total.n_points() {
            let (x, _) = bundle.germs[g];
            let proj_min: BTreeSet<usize> = bundle
                .total
                .min_open(g)
                .iter()
                .map(|h| bundle.germs[h].0)
                .collect();
            let base_min: BTreeSet<usize> = s.min_open(x).iter().collect();
            assert_eq!(proj_min, base_min);
        }
        assert!(bundle.projection.is_local_homeo().ok);
    }
}

#[test]
fn etale_space_of_two_section_constant_on_discrete_is_four_isolated_germs() {
    let s = discrete(2);
    let p = Presheaf::constant(&s, &["a", "b"]).unwrap();
    let bundle = etale_space(&p).unwrap();
    assert_eq!(bundle.total.n_points(), 4);
    assert!(bundle.total.is_t1());
    assert!(bundle.projection.is_local_homeo().ok);
}

#[test]
fn projection_of_basic_open_is_its_defining_open() {
    let spaces = all_spaces_up_to(3);
    for p in presheaf_corpus(&spaces, 5, 1) {
        let bundle = etale_space(&p).unwrap();
        for u in p.space().opens().unwrap() {
            for sid in 0..p.n_sections(u) as u32 {
                let basic = bundle.basic_open(&p, u, sid);
                assert_eq!(&projection_image(&bundle, &basic), u);
            }
        }
    }
}

#[test]
fn etale_projection_is_local_homeo_even_for_non_sheaves() {
    let spaces = all_spaces_up_to(3);
    for p in presheaf_corpus(&spaces, 9, 2) {
        let bundle = etale_space(&p).unwrap();
        assert!(bundle.projection.is_local_homeo().ok, "{p:?}");
    }
}

#[test]
fn generated_topology_matches_minimal_open_construction() {
    let spaces = all_spaces_up_to(2);
    for p in presheaf_corpus(&spaces, 13, 1) {
        let bundle = etale_space(&p).unwrap();
        if bundle.total.n_points() > 8 {
            continue;
        }
        let from_min: BTreeSet<IndexSet> =
            bundle.total.opens().unwrap().iter().cloned().collect();
        let oracle: BTreeSet<IndexSet> = generated_topology_oracle(&bundle).into_iter().collect();
        assert_eq!(from_min, oracle, "{p:?}");
    }
}

#[test]
fn product_of_one_presheaf_is_isomorphic_to_it() {
    let s = sierpinski();
    let p = Presheaf::constant(&s, &["a", "b"]).unwrap();
    let prod = product_presheaf(&s, &[&p]).unwrap();
    for u in s.opens().unwrap() {
        assert_eq!(prod.presheaf.n_sections(u), p.n_sections(u));
    }
}

#[test]
fn product_of_skyscrapers_multiplies_section_counts() {
    let s = discrete(2);
    let p0 = skyscraper(&s, crate::space::Point(0), &["a", "b"]).unwrap();
    let p1 = skyscraper(&s, crate::space::Point(1), &["x", "y", "z"]).unwrap();
    let prod = product_presheaf(&s, &[&p0, &p1]).unwrap();
    assert_eq!(prod.presheaf.n_sections(&s.full_set()), 6);
    assert!(prod.presheaf.check().unwrap().is_clean());
    assert!(prod.presheaf.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf);
}

#[test]
fn empty_product_is_the_constant_singleton() {
    let s = sierpinski();
    let prod = product_presheaf(&s, &[]).unwrap();
    for u in s.opens().unwrap() {
        assert_eq!(prod.presheaf.n_sections(u), 1);
    }
}

#[test]
fn sheafify_of_a_sheaf_has_bijective_unit() {
    let s = discrete(2);
    let p = skyscraper(&s, crate::space::Point(0), &["a", "b"]).unwrap();
    let sh = sheafify(&p).unwrap();
    for u in s.opens().unwrap() {
        assert!(sh.unit.is_bijective_at(u, &p, &sh.sheaf));
    }
}

#[test]
fn sheafify_identifies_indistinguishable_sections() {
    // P(X) = {c, d} both restricting to (a, b): the sheafification has one
    // section over X.
    let p = two_point_presheaf(&["c", "d"], vec![0, 0], vec![0, 0]);
    let sh = sheafify(&p).unwrap();
    assert_eq!(sh.sheaf.n_sections(&p.space().full_set()), 1);
    assert!(sh.sheaf.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf);
}

#[test]
fn sheafify_results_are_sheaves_with_stalk_preserving_units_on_corpus() {
    let spaces = all_spaces_up_to(3);
    for p in presheaf_corpus(&spaces, 17, 2) {
        let sh = sheafify(&p).unwrap();
        assert!(
            sh.sheaf.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf,
            "{p:?}"
        );
        assert!(sh.unit_is_stalkwise_bijective(&p), "{p:?}");
        assert!(sh.unit.check(&p, &sh.sheaf).unwrap().natural);
        // Idempotence up to isomorphism: sheafifying the sheaf again gives
        // a bijective unit everywhere.
        let again = sheafify(&sh.sheaf).unwrap();
        for u in p.space().opens().unwrap() {
            assert!(again.unit.is_bijective_at(u, &sh.sheaf, &again.sheaf));
        }
    }
}

#[test]
fn stalkwise_iso_checks() {
    let s = discrete(2);
    let p = skyscraper(&s, crate::space::Point(0), &["a", "b"]).unwrap();
    let id = PresheafMorphism::identity(&p);
    let report = check_morphism_stalkwise_iso(&id, &p, &p, &budgets()).unwrap();
    assert!(report.stalkwise_iso && report.openwise_iso && report.equivalence_holds);

    let sh = sheafify(&p).unwrap();
    let report =
        check_morphism_stalkwise_iso(&sh.unit, &p, &sh.sheaf, &budgets()).unwrap();
    assert!(report.stalkwise_iso && report.openwise_iso && report.equivalence_holds);
}

#[test]
fn sheaf_inclusion_into_sharp_fails_stalkwise_on_a_non_t1_space() {
    // On the Sierpinski space the constant sheaf {a, b} embeds into the
    // product of skyscrapers with a 4-element section set over X = U_0, so
    // the inclusion is not a stalk isomorphism at 0.
    let s = sierpinski();
    let p = Presheaf::constant(&s, &["a", "b"]).unwrap();
    let sh = sheafify(&p).unwrap();
    assert_eq!(sh.sheaf.n_sections(&s.full_set()), 2);
    assert_eq!(sh.sharp.n_sections(&s.full_set()), 4);
    let report =
        check_morphism_stalkwise_iso(&sh.inclusion(), &sh.sheaf, &sh.sharp, &budgets()).unwrap();
    assert!(!report.stalkwise_iso);
    assert!(report.equivalence_holds);
}

#[test]
fn check_morphism_requires_sheaves() {
    let p = two_point_presheaf(&["c", "d"], vec![0, 0], vec![0, 0]);
    let id = PresheafMorphism::identity(&p);
    assert!(matches!(
        check_morphism_stalkwise_iso(&id, &p, &p, &budgets()),
        Err(PresheafError::NotASheaf)
    ));
}

#[test]
fn universal_property_on_a_non_sheaf() {
    // P has a doubled top section; G = its sheafification; φ = unit. The
    // factorization must be the identity and unique.
    let p = two_point_presheaf(&["c", "d"], vec![0, 0], vec![0, 0]);
    let sh = sheafify(&p).unwrap();
    let (psi, _) =
        factor_through_sheafification(&sh, &p, &sh.sheaf, &sh.unit, &budgets()).unwrap();
    for u in p.space().opens().unwrap() {
        for t in 0..sh.sheaf.n_sections(u) as u32 {
            assert_eq!(psi.apply(u, t), t);
        }
    }
}

#[test]
fn universal_property_holds_with_unique_factorization_on_corpus_triples() {
    let spaces = all_spaces_up_to(2);
    let mut triples = 0;
    for p in presheaf_corpus(&spaces, 23, 1) {
        let sh = sheafify(&p).unwrap();
        let g = &sh.sheaf;
        let candidates = all_presheaf_morphisms(&p, g, 4096);
        let Ok(morphisms) = candidates else { continue };
        for phi in morphisms.into_iter().take(3) {
            let (psi, _) =
                factor_through_sheafification(&sh, &p, g, &phi, &budgets()).unwrap();
            // ψ ∘ unit = φ re-checked here.
            for u in p.space().opens().unwrap() {
                for sid in 0..p.n_sections(u) as u32 {
                    assert_eq!(psi.apply(u, sh.unit.apply(u, sid)), phi.apply(u, sid));
                }
            }
            triples += 1;
        }
    }
    assert!(triples >= 20, "only {triples} triples exercised");
}
