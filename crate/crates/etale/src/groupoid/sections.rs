//! The category of local sections of an etale groupoid.
//!
//! For opens `U`, `V` of the base, a morphism is a continuous map
//! `f : U → t⁻¹(V)` with `s ∘ f = id`; composition feeds the target of the
//! first section into the second: `(g ∘ f)(x) = comp(g(t(f(x))), f(x))`,
//! the unique law keeping `s ∘ (g ∘ f) = id`. Inclusions are unit sections.

use super::{is_etale, GroupoidError, TopGroupoid};
use crate::pseudogroup::{Backend, PpgError, PrePseudogroup, SectionsData};
use crate::space::map_cmp;
use std::collections::BTreeMap;
use std::sync::Arc;

const SECTION_CAP: usize = 1 << 16;

/// Enumerates the section category of an etale groupoid.
pub fn sections_category(gpd: &TopGroupoid) -> Result<PrePseudogroup, PpgError> {
    let report = is_etale(gpd);
    if !report.etale {
        return Err(PpgError::Internal(
            GroupoidError::NotEtale(format!(
                "s fails at {:?}, t fails at {:?}",
                report.s_failures, report.t_failures
            ))
            .to_string(),
        ));
    }
    let base = gpd.base.clone();
    let opens = base.opens()?.to_vec();
    let mut sections = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let t_inv = gpd.target_preimage(v);
            let cod = gpd.arrows.open_set(t_inv.clone()).map_err(PpgError::Space)?;
            let dom = base.open_set(u.clone()).map_err(PpgError::Space)?;
            // Candidate values per point: arrows with the right source and
            // target inside v.
            let candidates: Vec<Vec<usize>> = u
                .iter()
                .map(|x| {
                    (0..gpd.n_arrows())
                        .filter(|&a| gpd.source_of(a) == x && t_inv.contains(a))
                        .collect()
                })
                .collect();
            let mut found = Vec::new();
            let mut stack = vec![Vec::<usize>::new()];
            while let Some(partial) = stack.pop() {
                if partial.len() == candidates.len() {
                    let vals: Vec<u32> = partial.iter().map(|&a| a as u32).collect();
                    let map = crate::space::PointMap::from_indices(dom.clone(), cod.clone(), vals);
                    if map.check_continuous().continuous {
                        found.push(map);
                    }
                    continue;
                }
                let i = partial.len();
                for &a in &candidates[i] {
                    let mut next = partial.clone();
                    next.push(a);
                    stack.push(next);
                }
                if stack.len() + found.len() > SECTION_CAP {
                    return Err(PpgError::EnumerationBudget(format!(
                        "more than {SECTION_CAP} section candidates over ({:?}, {:?})",
                        base.external_ids(u),
                        base.external_ids(v)
                    )));
                }
            }
            found.sort_by(map_cmp);
            labels.insert(
                (u.clone(), v.clone()),
                found.iter().map(|m| format!("{m:?}")).collect::<Vec<String>>(),
            );
            sections.insert((u.clone(), v.clone()), found);
        }
    }
    PrePseudogroup::from_backend(
        base,
        labels,
        Backend::Sections(SectionsData { groupoid: Arc::new(clone_groupoid(gpd)), sections }),
    )
}

/// Groupoids are plain data; clone through the structural accessors.
pub(crate) fn clone_groupoid(g: &TopGroupoid) -> TopGroupoid {
    let n = g.n_arrows();
    let comp = g
        .composable_pairs()
        .into_iter()
        .filter_map(|(a, b)| g.compose(a, b).map(|c| ((a, b), c)))
        .collect();
    TopGroupoid::from_indices(
        g.base.clone(),
        g.arrows.clone(),
        (0..n).map(|a| g.source_of(a)).collect(),
        (0..n).map(|a| g.target_of(a)).collect(),
        (0..g.base.n_points()).map(|x| g.identity_of(x)).collect(),
        (0..n).map(|a| g.inverse_of(a)).collect(),
        comp,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::groupoids::pair_groupoid;
    use crate::corpus::spaces::{discrete, sierpinski};
    use crate::groupoid::unit_groupoid;

    #[test]
    fn unit_groupoid_sections_mirror_the_open_poset() {
        for space in [discrete(2), sierpinski()] {
            let g = unit_groupoid(&space);
            let c = sections_category(&g).unwrap();
            for u in c.opens().to_vec() {
                for v in c.opens().to_vec() {
                    let expected = if u.is_subset(&v) { 1 } else { 0 };
                    assert_eq!(c.hom_len(&u, &v), expected, "{u:?} {v:?}");
                }
            }
        }
    }

    #[test]
    fn pair_groupoid_sections_count_all_target_choices() {
        let g = pair_groupoid(2);
        let c = sections_category(&g).unwrap();
        let full = c.space().full_set();
        assert_eq!(c.hom_len(&full, &full), 4);
        let empty = c.space().empty_set();
        assert_eq!(c.hom_len(&empty, &full), 1);
    }

    #[test]
    fn non_etale_groupoid_is_rejected() {
        let base = discrete(2);
        let arrows = crate::corpus::spaces::indiscrete(2);
        let comp = (0..2).map(|x| ((x, x), x)).collect();
        let g = TopGroupoid::from_indices(
            base,
            arrows,
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            comp,
        );
        assert!(sections_category(&g).is_err());
    }
}
