//! Pre-pseudogroup generators: the canonical constructions over small
//! spaces, deliberate non-sheaves (truncations, constant group presheaves),
//! table-built negatives, and a materializer for turning any backend into
//! explicit tables (the corruption target for mutation tests).

use crate::bitset::IndexSet;
use crate::corpus::groups::{cyclic, trivial, GroupTable};
use crate::corpus::spaces::{all_spaces_up_to, chain, discrete, sierpinski};
use crate::pseudogroup::{
    build_homeo_l, constant_group_sheaf, from_group_sheaf, skyscraper_group_sheaf, Backend,
    Dialect, MapsData, MorId, PpgError, PrePseudogroup, TableData,
};
use std::collections::BTreeMap;

/// Materializes any pre-pseudogroup into explicit composition tables.
pub fn materialize_table(c: &PrePseudogroup) -> Result<PrePseudogroup, PpgError> {
    let opens = c.opens().to_vec();
    let mut labels = BTreeMap::new();
    let mut compose = BTreeMap::new();
    let mut incl = BTreeMap::new();
    let mut underlying: BTreeMap<(IndexSet, IndexSet), Vec<crate::space::PointMap>> =
        BTreeMap::new();
    let mut have_underlying = true;
    for u in &opens {
        for v in &opens {
            let n = c.hom_len(u, v);
            labels.insert(
                (u.clone(), v.clone()),
                (0..n as MorId).map(|f| c.hom_label(u, v, f)).collect::<Vec<String>>(),
            );
            let mut maps = Vec::new();
            for f in 0..n as MorId {
                match c.intrinsic_underlying(u, v, f)? {
                    Some(m) => maps.push(m),
                    None => have_underlying = false,
                }
            }
            if have_underlying {
                underlying.insert((u.clone(), v.clone()), maps);
            }
            if u.is_subset(v) {
                incl.insert((u.clone(), v.clone()), c.incl(u, v)?);
            }
        }
    }
    for u in &opens {
        for v in &opens {
            let nf = c.hom_len(u, v);
            if nf == 0 {
                continue;
            }
            for w in &opens {
                let ng = c.hom_len(v, w);
                if ng == 0 {
                    continue;
                }
                let mut table = Vec::with_capacity(ng);
                for g in 0..ng as MorId {
                    let mut row = Vec::with_capacity(nf);
                    for f in 0..nf as MorId {
                        row.push(c.compose(u, v, w, g, f)?);
                    }
                    table.push(row);
                }
                compose.insert((u.clone(), v.clone(), w.clone()), table);
            }
        }
    }
    PrePseudogroup::from_backend(
        c.space().clone(),
        labels,
        Backend::Table(TableData {
            compose,
            incl,
            underlying: have_underlying.then_some(underlying),
        }),
    )
}

/// Rebuilds a table-backed pre-pseudogroup with one compose entry replaced.
pub fn with_compose_entry(
    c: &PrePseudogroup,
    key: (&IndexSet, &IndexSet, &IndexSet),
    g: MorId,
    f: MorId,
    value: MorId,
) -> Result<PrePseudogroup, PpgError> {
    let table = materialize_table(c)?;
    let Backend::Table(mut data) = take_table(table)? else { unreachable!() };
    let entry = data
        .compose
        .get_mut(&(key.0.clone(), key.1.clone(), key.2.clone()))
        .ok_or_else(|| PpgError::Internal("no such composition table".into()))?;
    entry[g as usize][f as usize] = value;
    rebuilt_from(c, data)
}

/// Rebuilds with one inclusion entry replaced.
pub fn with_incl_entry(
    c: &PrePseudogroup,
    key: (&IndexSet, &IndexSet),
    value: MorId,
) -> Result<PrePseudogroup, PpgError> {
    let table = materialize_table(c)?;
    let Backend::Table(mut data) = take_table(table)? else { unreachable!() };
    data.incl.insert((key.0.clone(), key.1.clone()), value);
    rebuilt_from(c, data)
}

fn take_table(c: PrePseudogroup) -> Result<Backend, PpgError> {
    // The materialized value is never shared; rebuild the backend by
    // re-materializing (tables are small).
    let opens = c.opens().to_vec();
    let mut compose = BTreeMap::new();
    let mut incl = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if u.is_subset(v) {
                incl.insert((u.clone(), v.clone()), c.incl(u, v)?);
            }
            let nf = c.hom_len(u, v);
            if nf == 0 {
                continue;
            }
            for w in &opens {
                let ng = c.hom_len(v, w);
                if ng == 0 {
                    continue;
                }
                let mut table = Vec::with_capacity(ng);
                for g in 0..ng as MorId {
                    let mut row = Vec::with_capacity(nf);
                    for f in 0..nf as MorId {
                        row.push(c.compose(u, v, w, g, f)?);
                    }
                    table.push(row);
                }
                compose.insert((u.clone(), v.clone(), w.clone()), table);
            }
        }
    }
    let mut underlying = BTreeMap::new();
    let mut have = true;
    for u in &opens {
        for v in &opens {
            let mut maps = Vec::new();
            for f in 0..c.hom_len(u, v) as MorId {
                match c.intrinsic_underlying(u, v, f)? {
                    Some(m) => maps.push(m),
                    None => have = false,
                }
            }
            if have {
                underlying.insert((u.clone(), v.clone()), maps);
            }
        }
    }
    Ok(Backend::Table(TableData { compose, incl, underlying: have.then_some(underlying) }))
}

fn rebuilt_from(original: &PrePseudogroup, data: TableData) -> Result<PrePseudogroup, PpgError> {
    let opens = original.opens().to_vec();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            labels.insert(
                (u.clone(), v.clone()),
                (0..original.hom_len(u, v) as MorId)
                    .map(|f| original.hom_label(u, v, f))
                    .collect::<Vec<String>>(),
            );
        }
    }
    PrePseudogroup::from_backend(original.space().clone(), labels, Backend::Table(data))
}

/// The local-homeomorphism category with one morphism removed, checking
/// that the remainder is still closed under composition.
pub fn homeo_l_without(
    space: &crate::space::Space,
    u: &IndexSet,
    v: &IndexSet,
    label_contains: &str,
) -> Result<PrePseudogroup, PpgError> {
    let full = build_homeo_l(space)?;
    let Backend::Maps(_) = full.backend() else { unreachable!() };
    let mut maps: BTreeMap<(IndexSet, IndexSet), Vec<crate::space::PointMap>> = BTreeMap::new();
    for a in full.opens().to_vec() {
        for b in full.opens().to_vec() {
            let mut list = Vec::new();
            for f in 0..full.hom_len(&a, &b) as MorId {
                let keep = !(&a == u
                    && &b == v
                    && full.hom_label(&a, &b, f).contains(label_contains));
                if keep {
                    if let Some(m) = full.intrinsic_underlying(&a, &b, f)? {
                        list.push(m);
                    }
                }
            }
            maps.insert((a.clone(), b.clone()), list);
        }
    }
    let labels = maps
        .iter()
        .map(|(k, list)| {
            (k.clone(), list.iter().map(|m| format!("{m:?}")).collect::<Vec<String>>())
        })
        .collect();
    let c = PrePseudogroup::from_backend(
        space.clone(),
        labels,
        Backend::Maps(MapsData { maps }),
    )?;
    // Closure sanity: every composite must still be present.
    for a in c.opens().to_vec() {
        for b in c.opens().to_vec() {
            for w in c.opens().to_vec() {
                for f in 0..c.hom_len(&a, &b) as MorId {
                    for g in 0..c.hom_len(&b, &w) as MorId {
                        c.compose(&a, &b, &w, g, f)?;
                    }
                }
            }
        }
    }
    Ok(c)
}

/// A table-built category on the one-point space whose top hom-set is the
/// two-element monoid `{id, e}` with `e ∘ e = e`: a non-invertible germ.
pub fn flabby_monoid(space: &crate::space::Space) -> PrePseudogroup {
    assert_eq!(space.n_points(), 1);
    let empty = space.empty_set();
    let full = space.full_set();
    let mut labels = BTreeMap::new();
    labels.insert((empty.clone(), empty.clone()), vec!["ε".to_string()]);
    labels.insert((empty.clone(), full.clone()), vec!["ε↪X".to_string()]);
    labels.insert((full.clone(), empty.clone()), Vec::new());
    labels.insert((full.clone(), full.clone()), vec!["id".to_string(), "e".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((empty.clone(), empty.clone(), empty.clone()), vec![vec![0]]);
    compose.insert((empty.clone(), empty.clone(), full.clone()), vec![vec![0]]);
    compose.insert((empty.clone(), full.clone(), full.clone()), vec![vec![0], vec![0]]);
    compose.insert(
        (full.clone(), full.clone(), full.clone()),
        vec![vec![0, 1], vec![1, 1]],
    );
    let mut incl = BTreeMap::new();
    incl.insert((empty.clone(), empty.clone()), 0);
    incl.insert((empty.clone(), full.clone()), 0);
    incl.insert((full.clone(), full.clone()), 0);
    PrePseudogroup::from_backend(space.clone(), labels, Backend::Table(TableData {
        compose,
        incl,
        underlying: None,
    }))
    .unwrap()
}

/// A deterministic corpus of pre-pseudogroups with their natural dialect.
/// Every entry satisfies the dialect's category axioms; sheaf-ness varies.
pub fn ppg_corpus() -> Vec<(String, PrePseudogroup, Dialect)> {
    let mut out: Vec<(String, PrePseudogroup, Dialect)> = Vec::new();
    for space in all_spaces_up_to(2) {
        let dialect = if space.is_t1() { Dialect::T1 } else { Dialect::NonT1 };
        out.push((format!("homeo_l/{space:?}"), build_homeo_l(&space).unwrap(), dialect));
    }
    out.push((
        "homeo_l/discrete3".into(),
        build_homeo_l(&discrete(3)).unwrap(),
        Dialect::T1,
    ));
    out.push(("homeo_l/chain3".into(), build_homeo_l(&chain(3)).unwrap(), Dialect::NonT1));
    let groups: Vec<GroupTable> = vec![trivial(), cyclic(2), cyclic(3)];
    for space in [discrete(1), discrete(2), sierpinski(), chain(3), discrete(3)] {
        let dialect = if space.is_t1() { Dialect::T1 } else { Dialect::NonT1 };
        for g in &groups {
            let gs = constant_group_sheaf(&space, g).unwrap();
            out.push((
                format!("group_sheaf/{}/{space:?}", g.name),
                from_group_sheaf(gs).unwrap(),
                dialect,
            ));
        }
        for &p in space.points() {
            let gs = skyscraper_group_sheaf(&space, p, &cyclic(2)).unwrap();
            out.push((
                format!("skyscraper_group/{p}/{space:?}", p = p.0),
                from_group_sheaf(gs).unwrap(),
                dialect,
            ));
        }
    }
    // Deliberate non-sheaves satisfying the pre-pseudogroup conditions.
    for n in [2usize, 3] {
        let gs = crate::pseudogroup::constant_group_presheaf(&discrete(n), &cyclic(2)).unwrap();
        out.push((
            format!("nonsheaf_constant_presheaf/discrete{n}"),
            from_group_sheaf(gs).unwrap(),
            Dialect::T1,
        ));
    }
    let s2 = discrete(2);
    out.push((
        "nonsheaf_truncated_homeo_l/discrete2".into(),
        homeo_l_without(&s2, &s2.full_set(), &s2.full_set(), "[0↦1;1↦0]").unwrap(),
        Dialect::T1,
    ));
    out
}

/// The subset of the corpus passing all four pseudogroup-sheaf conditions.
pub fn pseudogroup_sheaf_corpus() -> Vec<(String, PrePseudogroup, Dialect)> {
    use crate::budget::Budgets;
    use crate::pseudogroup::is_pseudogroup_sheaf;
    use crate::report::all_pass;
    let budgets = Budgets::default();
    ppg_corpus()
        .into_iter()
        .filter(|(_, c, dialect)| {
            is_pseudogroup_sheaf(c, *dialect, &budgets).map(|r| all_pass(&r)).unwrap_or(false)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budgets;
    use crate::pseudogroup::check_pre_pseudogroup;
    use crate::report::all_pass;

    #[test]
    fn corpus_members_satisfy_their_dialect_pre_conditions() {
        for (name, c, dialect) in ppg_corpus() {
            if name.starts_with("nonsheaf") {
                continue;
            }
            let checks = check_pre_pseudogroup(&c, dialect, &Budgets::default()).unwrap();
            assert!(all_pass(&checks), "{name}: {checks:?}");
        }
    }

    #[test]
    fn truncated_homeo_l_really_lost_the_swap() {
        let s = discrete(2);
        let c = homeo_l_without(&s, &s.full_set(), &s.full_set(), "[0↦1;1↦0]").unwrap();
        assert_eq!(c.hom_len(&s.full_set(), &s.full_set()), 3);
    }

    #[test]
    fn materialized_tables_behave_identically() {
        let c = build_homeo_l(&discrete(2)).unwrap();
        let t = materialize_table(&c).unwrap();
        for u in c.opens().to_vec() {
            for v in c.opens().to_vec() {
                assert_eq!(c.hom_len(&u, &v), t.hom_len(&u, &v));
                for w in c.opens().to_vec() {
                    for f in 0..c.hom_len(&u, &v) as MorId {
                        for g in 0..c.hom_len(&v, &w) as MorId {
                            assert_eq!(
                                c.compose(&u, &v, &w, g, f).unwrap(),
                                t.compose(&u, &v, &w, g, f).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sheaf_corpus_is_a_strict_subset() {
        let all = ppg_corpus().len();
        let sheaves = pseudogroup_sheaf_corpus().len();
        assert!(sheaves > 0 && sheaves < all, "{sheaves} of {all}");
    }
}
