//! End-to-end pipelines: building groupoids out of pseudogroup sheaves,
//! round-tripping in both directions, sheafifying pre-pseudogroups, and
//! the universal property with uniqueness certificates.

use etale::budget::Budgets;
use etale::corpus::groupoids::{group_bundle, pair_groupoid};
use etale::corpus::groups::{cyclic, trivial};
use etale::corpus::pseudogroups::{homeo_l_without, ppg_corpus, pseudogroup_sheaf_corpus};
use etale::corpus::spaces::{chain, discrete, sierpinski};
use etale::groupoid::{
    check_groupoid, check_prop11, groupoid_from_pseudogroup, is_etale, roundtrip_groupoid,
    roundtrip_pseudogroup, sections_category, transport_morphism, unit_groupoid,
};
use etale::pseudogroup::{
    build_homeo_l, constant_group_sheaf, from_group_sheaf, Dialect, MorId, PrePseudogroup,
};
use etale::report::all_pass;
use etale::sheafify::{
    check_ppg_morphism, check_prop45, check_universality, ppg_sharp, ppg_sheafify, PpgMorphism,
};

fn budgets() -> Budgets {
    Budgets::default()
}

#[test]
fn groupoid_of_homeo_l_on_discrete_two_points_is_the_pair_groupoid() {
    let c = build_homeo_l(&discrete(2)).unwrap();
    let built = groupoid_from_pseudogroup(&c, Dialect::T1).unwrap();
    assert_eq!(built.groupoid.n_arrows(), 4);
    assert!(all_pass(&check_groupoid(&built.groupoid)));
    assert!(is_etale(&built.groupoid).etale);
    // Exactly one arrow per ordered pair of points.
    for x in 0..2 {
        for y in 0..2 {
            let count = (0..4)
                .filter(|&a| {
                    built.groupoid.source_of(a) == x && built.groupoid.target_of(a) == y
                })
                .count();
            assert_eq!(count, 1);
        }
    }
}

#[test]
fn groupoid_of_the_trivial_group_sheaf_is_the_unit_groupoid() {
    for space in [discrete(2), sierpinski(), chain(3)] {
        let dialect = if space.is_t1() { Dialect::T1 } else { Dialect::NonT1 };
        let c = from_group_sheaf(constant_group_sheaf(&space, &trivial()).unwrap()).unwrap();
        let built = groupoid_from_pseudogroup(&c, dialect).unwrap();
        assert_eq!(built.groupoid.n_arrows(), space.n_points());
        assert!(all_pass(&check_groupoid(&built.groupoid)));
        assert!(is_etale(&built.groupoid).etale);
        for a in 0..built.groupoid.n_arrows() {
            assert_eq!(built.groupoid.source_of(a), built.groupoid.target_of(a));
        }
    }
}

#[test]
fn groupoid_of_the_z2_group_sheaf_is_a_disjoint_union_of_vertex_groups() {
    let c = from_group_sheaf(constant_group_sheaf(&discrete(2), &cyclic(2)).unwrap()).unwrap();
    let built = groupoid_from_pseudogroup(&c, Dialect::T1).unwrap();
    assert_eq!(built.groupoid.n_arrows(), 4);
    assert!(built.groupoid.arrows.is_t1());
    for a in 0..4 {
        assert_eq!(built.groupoid.source_of(a), built.groupoid.target_of(a));
    }
    assert!(all_pass(&check_groupoid(&built.groupoid)));
    assert!(is_etale(&built.groupoid).etale);
}

#[test]
fn every_corpus_pseudogroup_sheaf_yields_a_clean_etale_groupoid() {
    for (name, c, dialect) in pseudogroup_sheaf_corpus() {
        let built = groupoid_from_pseudogroup(&c, dialect)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let checks = check_groupoid(&built.groupoid);
        assert!(all_pass(&checks), "{name}: {checks:?}");
        assert!(is_etale(&built.groupoid).etale, "{name}");
    }
}

#[test]
fn roundtrip_through_sections_recovers_small_groupoids() {
    let z2_over_point = group_bundle(&discrete(1), &cyclic(2));
    for (name, g) in [
        ("unit/discrete2", unit_groupoid(&discrete(2))),
        ("unit/sierpinski", unit_groupoid(&sierpinski())),
        ("pair/2", pair_groupoid(2)),
        ("z2_over_point", z2_over_point),
        ("z3_bundle_over_chain", group_bundle(&chain(2), &cyclic(3))),
    ] {
        let witness = roundtrip_groupoid(&g, &budgets()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(all_pass(&witness.checks), "{name}: {:?}", witness.checks);
        assert_eq!(witness.arrow_map.len(), g.n_arrows());
        assert_eq!(witness.rebuilt.groupoid.n_arrows(), g.n_arrows());
    }
}

#[test]
fn roundtrip_pseudogroup_matches_section_counts() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    let witness = roundtrip_pseudogroup(&c, Dialect::T1, &budgets()).unwrap();
    assert!(all_pass(&witness.checks));
    let full = s.full_set();
    assert_eq!(witness.sections.hom_len(&full, &full), 4);

    let z2 = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    let witness = roundtrip_pseudogroup(&z2, Dialect::T1, &budgets()).unwrap();
    assert_eq!(witness.sections.hom_len(&full, &full), 4);
}

#[test]
fn roundtrip_pseudogroup_covers_the_corpus_including_non_t1() {
    for (name, c, dialect) in pseudogroup_sheaf_corpus() {
        let witness = roundtrip_pseudogroup(&c, dialect, &budgets())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(all_pass(&witness.checks), "{name}");
    }
}

#[test]
fn prop11_passes_for_section_categories_of_rebuilt_groupoids() {
    let c = from_group_sheaf(constant_group_sheaf(&sierpinski(), &cyclic(2)).unwrap()).unwrap();
    let built = groupoid_from_pseudogroup(&c, Dialect::NonT1).unwrap();
    let sections = sections_category(&built.groupoid).unwrap();
    let report = check_prop11(&sections, &budgets()).unwrap();
    assert!(report.passed(), "{:?}", report.checks);
}

#[test]
fn sharp_hom_sets_are_products_of_germ_hom_sets() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    let (sharp, unit) = ppg_sharp(&c).unwrap();
    let full = s.full_set();
    // Two germs per point into X, so 2 × 2 families; the unit is bijective
    // there because the category is already a sheaf.
    assert_eq!(sharp.hom_len(&full, &full), 4);
    let table = &unit.maps[&(full.clone(), full.clone())];
    let mut sorted = table.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), table.len());
    assert!(all_pass(&check_ppg_morphism(&unit, &c, &sharp, &budgets()).unwrap()));
}

#[test]
fn sheafifying_a_sheaf_gives_a_bijective_unit() {
    for (name, c, _dialect) in pseudogroup_sheaf_corpus() {
        if !c.space().is_t1() {
            continue;
        }
        let sh = ppg_sheafify(&c, &budgets()).unwrap();
        for u in c.opens().to_vec() {
            for v in c.opens().to_vec() {
                let table = &sh.unit.maps[&(u.clone(), v.clone())];
                let mut sorted = table.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), table.len(), "{name} not injective at {u:?},{v:?}");
                assert_eq!(
                    table.len(),
                    sh.hat.hom_len(&u, &v),
                    "{name} not surjective at {u:?},{v:?}"
                );
            }
        }
    }
}

#[test]
fn sheafification_restores_the_truncated_local_homeomorphism() {
    let s = discrete(2);
    let c = homeo_l_without(&s, &s.full_set(), &s.full_set(), "[0↦1;1↦0]").unwrap();
    assert_eq!(c.hom_len(&s.full_set(), &s.full_set()), 3);
    let sh = ppg_sheafify(&c, &budgets()).unwrap();
    assert_eq!(sh.hat.hom_len(&s.full_set(), &s.full_set()), 4);
    assert!(sh.unit_germ_bijective(&c));
}

#[test]
fn sheafification_output_is_a_pseudogroup_sheaf_on_the_t1_corpus() {
    use etale::pseudogroup::is_pseudogroup_sheaf;
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        let sh = ppg_sheafify(&c, &budgets()).unwrap();
        let checks = is_pseudogroup_sheaf(&sh.hat, Dialect::T1, &budgets()).unwrap();
        assert!(all_pass(&checks), "{name}: {checks:?}");
        assert!(sh.unit_germ_bijective(&c), "{name}");
        assert!(
            all_pass(&check_ppg_morphism(&sh.unit, &c, &sh.hat, &budgets()).unwrap()),
            "{name}"
        );
    }
}

#[test]
fn prop45_agreement_and_order_independence_on_the_t1_corpus() {
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        let sh = ppg_sheafify(&c, &budgets()).unwrap();
        let report = check_prop45(&c, &sh).unwrap();
        assert!(report.agrees, "{name}: {:?}", report.witness);
        assert!(report.order_independent, "{name}");
    }
}

#[test]
fn universality_with_identity_factorization() {
    let s = discrete(2);
    let c = homeo_l_without(&s, &s.full_set(), &s.full_set(), "[0↦1;1↦0]").unwrap();
    let sh = ppg_sheafify(&c, &budgets()).unwrap();
    let (psi, _) = check_universality(&c, &sh, &sh.hat, &sh.unit, &budgets()).unwrap();
    for (key, table) in &psi.maps {
        for (f, &v) in table.iter().enumerate() {
            assert_eq!(v as usize, f, "ψ is not the identity at {key:?}");
        }
    }
}

/// The inclusion of the truncated category into the full one, matched by
/// morphism labels.
fn inclusion_by_labels(c: &PrePseudogroup, d: &PrePseudogroup) -> PpgMorphism {
    let mut maps = std::collections::BTreeMap::new();
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let table: Vec<MorId> = (0..c.hom_len(&u, &v) as MorId)
                .map(|f| {
                    let label = c.hom_label(&u, &v, f);
                    (0..d.hom_len(&u, &v) as MorId)
                        .find(|&g| d.hom_label(&u, &v, g) == label)
                        .expect("label present in the larger category")
                })
                .collect();
            maps.insert((u.clone(), v.clone()), table);
        }
    }
    PpgMorphism { maps }
}

#[test]
fn universality_against_the_full_local_homeomorphism_category() {
    let s = discrete(2);
    let c = homeo_l_without(&s, &s.full_set(), &s.full_set(), "[0↦1;1↦0]").unwrap();
    let d = build_homeo_l(&s).unwrap();
    let phi = inclusion_by_labels(&c, &d);
    assert!(all_pass(&check_ppg_morphism(&phi, &c, &d, &budgets()).unwrap()));
    let sh = ppg_sheafify(&c, &budgets()).unwrap();
    let (psi, _) = check_universality(&c, &sh, &d, &phi, &budgets()).unwrap();
    // The factorization is a hom-by-hom bijection: Ĉ ≅ the full category.
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let table = &psi.maps[&(u.clone(), v.clone())];
            let mut sorted = table.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), d.hom_len(&u, &v));
        }
    }
}

#[test]
fn transported_identity_is_the_identity_functor() {
    let c = build_homeo_l(&discrete(2)).unwrap();
    let built = groupoid_from_pseudogroup(&c, Dialect::T1).unwrap();
    let phi = PpgMorphism::identity(&c);
    let t = transport_morphism(&phi, &c, &built, &built).unwrap();
    assert!(all_pass(&t.checks));
    for (i, &a) in t.arrow_map.iter().enumerate() {
        assert_eq!(i, a);
    }
}

#[test]
fn transported_unit_embedding_preserves_structure() {
    // Trivial group sheaf → local homeomorphisms: unit-section embedding.
    let s = discrete(2);
    let c = from_group_sheaf(constant_group_sheaf(&s, &trivial()).unwrap()).unwrap();
    let d = build_homeo_l(&s).unwrap();
    // The inclusion sends the unique morphism of C(U, V) to the open
    // inclusion map.
    let mut maps = std::collections::BTreeMap::new();
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let table: Vec<MorId> = if u.is_subset(&v) && c.hom_len(&u, &v) == 1 {
                vec![d.incl(&u, &v).unwrap()]
            } else {
                Vec::new()
            };
            maps.insert((u.clone(), v.clone()), table);
        }
    }
    let phi = PpgMorphism { maps };
    assert!(all_pass(&check_ppg_morphism(&phi, &c, &d, &budgets()).unwrap()));
    let c_gpd = groupoid_from_pseudogroup(&c, Dialect::T1).unwrap();
    let d_gpd = groupoid_from_pseudogroup(&d, Dialect::T1).unwrap();
    let t = transport_morphism(&phi, &c, &c_gpd, &d_gpd).unwrap();
    assert!(all_pass(&t.checks), "{:?}", t.checks);
}

#[test]
fn homeo_l_satisfies_all_but_decomposition_on_every_small_space() {
    use etale::corpus::spaces::all_spaces_up_to;
    use etale::pseudogroup::{check_decomposition, is_pseudogroup_sheaf};
    // Conditions (objects, groupoid germs, sheaf hom-presheaves) hold on
    // every space; the coproduct decomposition holds exactly on the T1
    // ones. Both directions checked.
    for space in all_spaces_up_to(2).into_iter().chain([chain(3)]) {
        let c = build_homeo_l(&space).unwrap();
        let checks = is_pseudogroup_sheaf(&c, Dialect::NonT1, &budgets()).unwrap();
        assert!(all_pass(&checks), "{space:?}: {checks:?}");
        let decomposition = check_decomposition(&c).unwrap();
        assert_eq!(decomposition.holds(), space.is_t1(), "{space:?}");
    }
}

#[test]
fn germ_family_category_is_always_a_pseudogroup_sheaf() {
    use etale::pseudogroup::is_pseudogroup_sheaf;
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        let (sharp, _unit) = ppg_sharp(&c).unwrap();
        let checks = is_pseudogroup_sheaf(&sharp, Dialect::T1, &budgets()).unwrap();
        assert!(all_pass(&checks), "{name}: {checks:?}");
    }
}

#[test]
fn germ_composition_is_representative_independent_on_the_corpus() {
    use etale::pseudogroup::check_germ_functoriality;
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        assert_eq!(check_germ_functoriality(&c).unwrap(), None, "{name}");
    }
}
