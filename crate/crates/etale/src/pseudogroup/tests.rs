use super::*;
use crate::budget::Budgets;
use crate::corpus::groups::{cyclic, trivial};
use crate::corpus::spaces::{all_spaces_up_to, discrete, sierpinski};
use crate::report::all_pass;
use crate::space::{all_point_maps, CoverMode, Point};

fn budgets() -> Budgets {
    Budgets::default()
}

/// Independent oracle: count local homeomorphisms `X → X` by filtering all
/// self-maps through the exhaustive neighborhood-search checker.
fn count_self_local_homeos_oracle(space: &crate::space::Space) -> usize {
    let full = space.full_open();
    all_point_maps(&full, &full)
        .into_iter()
        .filter(|m| m.is_local_homeo_exhaustive().unwrap())
        .count()
}

#[test]
fn homeo_l_on_discrete_two_points_has_four_top_morphisms() {
    let s = discrete(2);
    let oracle = count_self_local_homeos_oracle(&s);
    assert_eq!(oracle, 4);
    let c = build_homeo_l(&s).unwrap();
    let full = s.full_set();
    assert_eq!(c.hom_len(&full, &full), oracle);
}

#[test]
fn homeo_l_on_sierpinski_has_exactly_the_identity_on_top() {
    // Of the four self-maps, the two constants and the swap all fail to be
    // local homeomorphisms; the oracle pins the count before the build.
    let s = sierpinski();
    let oracle = count_self_local_homeos_oracle(&s);
    assert_eq!(oracle, 1);
    let c = build_homeo_l(&s).unwrap();
    let full = s.full_set();
    assert_eq!(c.hom_len(&full, &full), oracle);
}

#[test]
fn empty_domain_hom_sets_are_singletons() {
    let s = sierpinski();
    let c = build_homeo_l(&s).unwrap();
    let empty = s.empty_set();
    for v in c.opens().to_vec() {
        assert_eq!(c.hom_len(&empty, &v), 1);
    }
}

#[test]
fn homeo_l_is_a_pseudogroup_sheaf_on_discrete_spaces() {
    for n in 1..=2 {
        let s = discrete(n);
        let c = build_homeo_l(&s).unwrap();
        let checks = is_pseudogroup_sheaf(&c, Dialect::T1, &budgets()).unwrap();
        assert!(all_pass(&checks), "{checks:?}");
    }
}

#[test]
fn homeo_l_t1_dialect_rejects_non_t1_spaces() {
    let c = build_homeo_l(&sierpinski()).unwrap();
    assert!(matches!(
        check_pre_pseudogroup(&c, Dialect::T1, &budgets()),
        Err(PpgError::NotT1Space)
    ));
}

#[test]
fn homeo_l_on_sierpinski_satisfies_all_but_decomposition() {
    // Conditions (1), (3), (4) hold on any space; the coproduct
    // decomposition (2) needs T1.
    let c = build_homeo_l(&sierpinski()).unwrap();
    let checks = is_pseudogroup_sheaf(&c, Dialect::NonT1, &budgets()).unwrap();
    assert!(all_pass(&checks), "{checks:?}");
    let decomposition = check_decomposition(&c).unwrap();
    assert!(!decomposition.holds());
    assert!(decomposition.overlap.is_some());
}

#[test]
fn group_sheaf_z2_on_discrete_two_points() {
    let s = discrete(2);
    let gs = constant_group_sheaf(&s, &cyclic(2)).unwrap();
    // The constant sheaf on a two-component space has F(X) = Z2 × Z2.
    assert_eq!(gs.presheaf.n_sections(&s.full_set()), 4);
    let c = from_group_sheaf(gs).unwrap();
    let full = s.full_set();
    assert_eq!(c.hom_len(&full, &full), 4);
    let o0 = s.open_from_points(&[0]).unwrap().set().clone();
    assert_eq!(c.hom_len(&o0, &full), 2);
    assert_eq!(c.hom_len(&full, &o0), 0);
    let checks = is_pseudogroup_sheaf(&c, Dialect::T1, &budgets()).unwrap();
    assert!(all_pass(&checks), "{checks:?}");
}

#[test]
fn germ_groupoid_of_group_sheaf_is_a_union_of_vertex_groups() {
    let s = discrete(2);
    let c = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    let g = build_germ_groupoid(&c, Dialect::T1).unwrap();
    assert!(g.is_groupoid());
    assert_eq!(g.n_arrows(), 4);
    assert_eq!(g.hom(0, 0).len(), 2);
    assert_eq!(g.hom(1, 1).len(), 2);
    assert!(g.hom(0, 1).is_empty() && g.hom(1, 0).is_empty());
}

#[test]
fn germ_groupoid_of_homeo_l_is_the_pair_groupoid() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    let g = build_germ_groupoid(&c, Dialect::T1).unwrap();
    assert!(g.is_groupoid());
    assert_eq!(g.n_arrows(), 4);
    for x in 0..2 {
        for y in 0..2 {
            assert_eq!(g.hom(x, y).len(), 1);
        }
    }
}

#[test]
fn germ_target_hom_sets_on_discrete_spaces() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    // C_x^y = hom({x}, {y}), one local homeomorphism each.
    for x in 0..2usize {
        for y in 0..2usize {
            let (ux, uy) = (s.min_open(x).clone(), s.min_open(y).clone());
            assert_eq!(c.hom_len(&ux, &uy), 1);
        }
    }
    let gs = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    let (u0, u1) = (s.min_open(0).clone(), s.min_open(1).clone());
    assert_eq!(gs.hom_len(&u0, &u0), 2);
    assert_eq!(gs.hom_len(&u0, &u1), 0);
}

#[test]
fn inverse_limit_oracle_matches_minimal_open_realization() {
    let instances: Vec<PrePseudogroup> = vec![
        build_homeo_l(&discrete(2)).unwrap(),
        build_homeo_l(&sierpinski()).unwrap(),
        build_homeo_l(&crate::corpus::spaces::chain(3)).unwrap(),
        from_group_sheaf(constant_group_sheaf(&discrete(2), &cyclic(2)).unwrap()).unwrap(),
        from_group_sheaf(constant_group_sheaf(&sierpinski(), &cyclic(3)).unwrap()).unwrap(),
    ];
    for c in &instances {
        let space = c.space().clone();
        for x in 0..space.n_points() {
            for y in 0..space.n_points() {
                let threads = germ_target_hom_oracle(c, x, y).unwrap();
                let realized = c.hom_len(space.min_open(x), space.min_open(y));
                assert_eq!(threads.len(), realized, "x={x} y={y}");
            }
        }
    }
}

#[test]
fn decomposition_holds_for_valid_t1_instances() {
    let s = discrete(2);
    for c in [
        build_homeo_l(&s).unwrap(),
        from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap(),
        from_group_sheaf(constant_group_sheaf(&s, &trivial()).unwrap()).unwrap(),
    ] {
        assert!(check_decomposition(&c).unwrap().holds());
    }
}

#[test]
fn underlying_maps_of_homeo_l_recover_the_maps_themselves() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            for f in 0..c.hom_len(&u, &v) as MorId {
                let bar = underlying_map(&c, &u, &v, f).unwrap();
                let intrinsic = c.intrinsic_underlying(&u, &v, f).unwrap().unwrap();
                assert_eq!(bar, intrinsic);
            }
        }
    }
}

#[test]
fn underlying_maps_of_group_sheaves_are_inclusions() {
    let s = discrete(2);
    let c = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    let checks = underlying_functor_laws(&c, &budgets()).unwrap();
    assert!(all_pass(&checks), "{checks:?}");
    let full = s.full_set();
    for f in 0..c.hom_len(&full, &full) as MorId {
        let bar = underlying_map(&c, &full, &full, f).unwrap();
        assert_eq!(bar, crate::space::PointMap::identity(&s.full_open()));
    }
}

#[test]
fn underlying_functor_laws_hold_on_t1_corpus() {
    for s in all_spaces_up_to(2).into_iter().filter(|s| s.is_t1()) {
        let c = build_homeo_l(&s).unwrap();
        assert!(all_pass(&underlying_functor_laws(&c, &budgets()).unwrap()));
    }
}

#[test]
fn dialects_agree_on_t1_spaces() {
    let s = discrete(2);
    for c in [
        build_homeo_l(&s).unwrap(),
        from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap(),
    ] {
        assert_eq!(germ_sets_agree_across_dialects(&c).unwrap(), None);
    }
}

#[test]
fn germ_functoriality_holds_on_small_instances() {
    let s = discrete(2);
    for c in [
        build_homeo_l(&s).unwrap(),
        from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap(),
    ] {
        assert_eq!(check_germ_functoriality(&c).unwrap(), None);
    }
}

#[test]
fn group_presheaf_that_is_not_a_sheaf_fails_only_condition_four() {
    let s = discrete(2);
    let gs = examples::constant_group_presheaf(&s, &cyclic(2)).unwrap();
    let c = from_group_sheaf(gs).unwrap();
    let pre = check_pre_pseudogroup(&c, Dialect::T1, &budgets()).unwrap();
    assert!(all_pass(&pre), "{pre:?}");
    let full = is_pseudogroup_sheaf(&c, Dialect::T1, &budgets()).unwrap();
    assert!(!all_pass(&full));
    let sheaf_check = full.iter().find(|c| c.name == "hom_presheaves_are_sheaves").unwrap();
    assert!(!sheaf_check.passed());
}

#[test]
fn non_t1_group_sheaf_is_a_pseudogroup_sheaf_in_the_non_t1_dialect() {
    let s = sierpinski();
    let c = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    let checks = is_pseudogroup_sheaf(&c, Dialect::NonT1, &budgets()).unwrap();
    assert!(all_pass(&checks), "{checks:?}");
    let g = build_germ_groupoid(&c, Dialect::NonT1).unwrap();
    assert!(g.is_groupoid());
    // Sierpinski is connected: the stalk group everywhere is Z2.
    assert_eq!(g.hom(0, 0).len(), 2);
    assert_eq!(g.hom(1, 1).len(), 2);
    assert!(g.hom(0, 1).is_empty() && g.hom(1, 0).is_empty());
}

#[test]
fn non_invertible_idempotent_fails_the_groupoid_condition() {
    // A table-built category on the one-point space whose top hom-set is
    // the two-element monoid {id, e} with e ∘ e = e.
    let s = discrete(1);
    let c = crate::corpus::pseudogroups::flabby_monoid(&s);
    let pre = check_pre_pseudogroup(&c, Dialect::T1, &budgets()).unwrap();
    assert!(!all_pass(&pre));
    assert!(matches!(
        build_germ_groupoid(&c, Dialect::T1),
        Err(PpgError::NotAGroupoid { .. })
    ));
}

#[test]
fn is_concrete_separates_the_examples() {
    let s = discrete(2);
    assert!(is_concrete(&build_homeo_l(&s).unwrap()).unwrap());
    assert!(!is_concrete(
        &from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap()
    )
    .unwrap());
    assert!(is_concrete(
        &from_group_sheaf(constant_group_sheaf(&s, &trivial()).unwrap()).unwrap()
    )
    .unwrap());
}

#[test]
fn classical_pseudogroup_of_homeo_l_contains_the_bijections() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    let h = classical_pseudogroup(&c, &budgets()).unwrap();
    // Top-level: the two bijections X → X; plus identities and the four
    // singleton maps and the empty map.
    let top: Vec<_> = h
        .maps
        .iter()
        .filter(|m| m.domain().len() == 2 && m.codomain().len() == 2)
        .collect();
    assert_eq!(top.len(), 2);
    // Identities of every open are present.
    for u in s.opens().unwrap() {
        let id = crate::space::PointMap::identity(&s.open_set(u.clone()).unwrap());
        assert!(h.contains(&id));
    }
}

#[test]
fn classical_pseudogroup_of_trivial_group_sheaf_is_identities_only() {
    let s = discrete(2);
    let c = from_group_sheaf(constant_group_sheaf(&s, &trivial()).unwrap()).unwrap();
    let h = classical_pseudogroup(&c, &budgets()).unwrap();
    for m in &h.maps {
        assert_eq!(m.domain().set(), m.codomain().set());
        for (x, fx) in m.graph() {
            assert_eq!(x, fx);
        }
    }
    assert_eq!(h.maps.len(), s.n_opens().unwrap());
}

#[test]
fn classical_pseudogroup_rejects_non_concrete_inputs() {
    let s = discrete(2);
    let c = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).unwrap()).unwrap();
    assert!(matches!(
        classical_pseudogroup(&c, &budgets()),
        Err(PpgError::NotConcrete)
    ));
}

#[test]
fn classical_to_concrete_on_identities_matches_the_trivial_group_sheaf() {
    let s = discrete(2);
    let identities: Vec<crate::space::PointMap> = s
        .opens()
        .unwrap()
        .iter()
        .map(|u| crate::space::PointMap::identity(&s.open_set(u.clone()).unwrap()))
        .collect();
    let h = ClassicalPseudogroup { space: s.clone(), maps: identities };
    let c = classical_to_concrete(&h, &budgets()).unwrap();
    let reference = from_group_sheaf(constant_group_sheaf(&s, &trivial()).unwrap()).unwrap();
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            assert_eq!(c.hom_len(&u, &v), reference.hom_len(&u, &v), "{u:?} {v:?}");
        }
    }
}

#[test]
fn classical_to_concrete_on_singleton_bijections_matches_homeo_l() {
    let s = discrete(2);
    let c0 = build_homeo_l(&s).unwrap();
    // H = all partial homeomorphisms of the discrete 2-point space, i.e.
    // the empty map, identities, singleton bijections and the two
    // bijections (closure of the singleton bijections under gluing).
    let h = classical_pseudogroup(&c0, &budgets()).unwrap();
    let rebuilt = classical_to_concrete(&h, &budgets()).unwrap();
    for u in c0.opens().to_vec() {
        for v in c0.opens().to_vec() {
            assert_eq!(rebuilt.hom_len(&u, &v), c0.hom_len(&u, &v), "{u:?} {v:?}");
        }
    }
    // Round trip: the classical pseudogroup of the rebuilt category
    // contains every original element.
    let again = classical_pseudogroup(&rebuilt, &budgets()).unwrap();
    for m in &h.maps {
        assert!(again.contains(m), "{m:?} lost in the round trip");
    }
}

#[test]
fn hom_presheaf_restrictions_are_precomposition_with_inclusions() {
    let s = discrete(2);
    let c = build_homeo_l(&s).unwrap();
    let full = s.full_set();
    let p = hom_presheaf(&c, &full).unwrap();
    assert!(p.check().unwrap().is_clean());
    assert!(p.is_sheaf(CoverMode::Exhaustive, &budgets()).unwrap().is_sheaf);
}

#[test]
fn skyscraper_group_sheaf_is_valid() {
    let s = sierpinski();
    let gs = skyscraper_group_sheaf(&s, Point(1), &cyclic(2)).unwrap();
    gs.validate().unwrap();
    let c = from_group_sheaf(gs).unwrap();
    let checks = is_pseudogroup_sheaf(&c, Dialect::NonT1, &budgets()).unwrap();
    assert!(all_pass(&checks), "{checks:?}");
}
