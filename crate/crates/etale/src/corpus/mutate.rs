//! Seeded single-table mutations of valid instances, used to confirm that
//! the verification suites actually reject broken structures. Each mutant
//! corrupts exactly one table entry (or drops exactly one element) of a
//! valid instance; each must be caught by at least one suite.

use crate::budget::Budgets;
use crate::corpus::groupoids::pair_groupoid;
use crate::corpus::groups::cyclic;
use crate::corpus::pseudogroups::{homeo_l_without, with_compose_entry, with_incl_entry};
use crate::corpus::spaces::{discrete, sierpinski};
use crate::groupoid::{check_groupoid, unit_groupoid, TopGroupoid};
use crate::presheaf::{skyscraper, Presheaf};
use crate::pseudogroup::{
    build_germ_groupoid, check_pre_pseudogroup, constant_group_sheaf, from_group_sheaf,
    is_pseudogroup_sheaf, Dialect, PrePseudogroup,
};
use crate::report::all_pass;
use crate::space::CoverMode;
use std::collections::BTreeMap;

pub enum Mutant {
    Groupoid(TopGroupoid),
    Presheaf(Presheaf),
    Ppg(PrePseudogroup, Dialect),
}

pub struct MutationCase {
    pub name: &'static str,
    pub mutant: Mutant,
}

impl MutationCase {
    /// Runs the suites relevant to the mutant's kind; true when at least
    /// one rejects it.
    pub fn detected(&self, budgets: &Budgets) -> bool {
        match &self.mutant {
            Mutant::Groupoid(g) => !all_pass(&check_groupoid(g)),
            Mutant::Presheaf(p) => {
                let structurally_broken =
                    p.check().map(|r| !r.is_clean()).unwrap_or(true);
                let not_a_sheaf = p
                    .is_sheaf(CoverMode::Canonical, budgets)
                    .map(|v| !v.is_sheaf)
                    .unwrap_or(true);
                structurally_broken || not_a_sheaf
            }
            Mutant::Ppg(c, dialect) => {
                let pre_broken = match check_pre_pseudogroup(c, *dialect, budgets) {
                    Ok(checks) => !all_pass(&checks),
                    Err(_) => true,
                };
                let sheaf_broken = match is_pseudogroup_sheaf(c, *dialect, budgets) {
                    Ok(checks) => !all_pass(&checks),
                    Err(_) => true,
                };
                let germ_broken = build_germ_groupoid(c, *dialect)
                    .map(|g| !g.is_groupoid())
                    .unwrap_or(true);
                pre_broken || sheaf_broken || germ_broken
            }
        }
    }
}

fn rebuild_groupoid(
    g: &TopGroupoid,
    s: Vec<usize>,
    t: Vec<usize>,
    i: Vec<usize>,
    inv: Vec<usize>,
    comp: BTreeMap<(usize, usize), usize>,
) -> TopGroupoid {
    TopGroupoid::from_indices(g.base.clone(), g.arrows.clone(), s, t, i, inv, comp)
}

type GroupoidParts =
    (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>, BTreeMap<(usize, usize), usize>);

fn parts(g: &TopGroupoid) -> GroupoidParts {
    let n = g.n_arrows();
    (
        (0..n).map(|a| g.source_of(a)).collect(),
        (0..n).map(|a| g.target_of(a)).collect(),
        (0..g.base.n_points()).map(|x| g.identity_of(x)).collect(),
        (0..n).map(|a| g.inverse_of(a)).collect(),
        g.composable_pairs()
            .into_iter()
            .filter_map(|(a, b)| g.compose(a, b).map(|c| ((a, b), c)))
            .collect(),
    )
}

/// The ten standard mutants.
pub fn standard_mutations() -> Vec<MutationCase> {
    let mut out = Vec::new();

    // 1. Broken composition entry in the pair groupoid.
    {
        let g = pair_groupoid(2);
        let (s, t, i, inv, mut comp) = parts(&g);
        let ((a, b), original) = comp.iter().map(|(&k, &v)| (k, v)).next().unwrap();
        let replacement = (0..g.n_arrows()).find(|&c| c != original).unwrap();
        comp.insert((a, b), replacement);
        out.push(MutationCase {
            name: "groupoid_composition_entry",
            mutant: Mutant::Groupoid(rebuild_groupoid(&g, s, t, i, inv, comp)),
        });
    }

    // 2. Broken inverse in the pair groupoid.
    {
        let g = pair_groupoid(2);
        let (s, t, i, mut inv, comp) = parts(&g);
        let off = (0..g.n_arrows()).find(|&a| g.source_of(a) != g.target_of(a)).unwrap();
        inv[off] = off;
        out.push(MutationCase {
            name: "groupoid_inverse_entry",
            mutant: Mutant::Groupoid(rebuild_groupoid(&g, s, t, i, inv, comp)),
        });
    }

    // 3. Corrupted source value in a unit groupoid.
    {
        let g = unit_groupoid(&sierpinski());
        let (mut s, t, i, inv, comp) = parts(&g);
        s[0] = 1;
        out.push(MutationCase {
            name: "groupoid_source_entry",
            mutant: Mutant::Groupoid(rebuild_groupoid(&g, s, t, i, inv, comp)),
        });
    }

    // 4. Swapped restriction breaking functoriality on the Sierpinski
    //    constant presheaf.
    {
        let space = sierpinski();
        let p = Presheaf::constant(&space, &["a", "b"]).unwrap();
        let mut sections = p.sections_map().clone();
        let mut res = p.res_map().clone();
        res.insert((space.full_set(), space.empty_set()), vec![1, 0]);
        sections.entry(space.empty_set()).or_default();
        out.push(MutationCase {
            name: "presheaf_restriction_entry",
            mutant: Mutant::Presheaf(Presheaf::new(space, sections, res)),
        });
    }

    // 5. Dropped gluing: a skyscraper sheaf on the discrete 2-point space
    //    loses one global section, so one matching family no longer glues.
    {
        let space = discrete(2);
        let p = skyscraper(&space, crate::space::Point(0), &["s", "t"]).unwrap();
        let mut sections = p.sections_map().clone();
        let mut res = p.res_map().clone();
        sections.insert(space.full_set(), vec!["s".to_string()]);
        for v in space.opens().unwrap() {
            if v != &space.full_set() {
                let table = res.get_mut(&(space.full_set(), v.clone())).unwrap();
                table.truncate(1);
            }
        }
        res.insert((space.full_set(), space.full_set()), vec![0]);
        out.push(MutationCase {
            name: "presheaf_dropped_section",
            mutant: Mutant::Presheaf(Presheaf::new(space, sections, res)),
        });
    }

    // 6. Skyscraper with a collapsed restriction: two global sections
    //    become indistinguishable on the cover, giving a double gluing.
    //    (On the Sierpinski space this mutation would be invisible — every
    //    nonempty open is a minimal neighborhood, so its canonical cover
    //    contains the open itself — hence the discrete base.)
    {
        let space = discrete(2);
        let p = skyscraper(&space, crate::space::Point(0), &["s", "t"]).unwrap();
        let mut sections = p.sections_map().clone();
        let mut res = p.res_map().clone();
        let o0 = space.open_from_points(&[0]).unwrap().set().clone();
        res.insert((space.full_set(), o0), vec![0, 0]);
        sections.entry(space.empty_set()).or_default();
        out.push(MutationCase {
            name: "skyscraper_collapsed_restriction",
            mutant: Mutant::Presheaf(Presheaf::new(space, sections, res)),
        });
    }

    // 7. Corrupted composition entry in a group-sheaf category.
    {
        let space = discrete(2);
        let c = from_group_sheaf(constant_group_sheaf(&space, &cyclic(2)).unwrap()).unwrap();
        let full = space.full_set();
        let mutated = with_compose_entry(&c, (&full, &full, &full), 1, 1, 1).unwrap();
        out.push(MutationCase {
            name: "pseudogroup_composition_entry",
            mutant: Mutant::Ppg(mutated, Dialect::T1),
        });
    }

    // 8. Corrupted inclusion: a non-identity group element marked as the
    //    inclusion.
    {
        let space = discrete(2);
        let c = from_group_sheaf(constant_group_sheaf(&space, &cyclic(2)).unwrap()).unwrap();
        let o0 = space.open_from_points(&[0]).unwrap().set().clone();
        let mutated = with_incl_entry(&c, (&o0, &o0), 1).unwrap();
        out.push(MutationCase {
            name: "pseudogroup_inclusion_entry",
            mutant: Mutant::Ppg(mutated, Dialect::T1),
        });
    }

    // 9. Dropped gluable morphism: the local-homeomorphism category minus
    //    the swap.
    {
        let space = discrete(2);
        let c =
            homeo_l_without(&space, &space.full_set(), &space.full_set(), "[0↦1;1↦0]").unwrap();
        out.push(MutationCase {
            name: "pseudogroup_dropped_gluing",
            mutant: Mutant::Ppg(c, Dialect::T1),
        });
    }

    // 10. Non-invertible germ: the one-point Z2 category turned into the
    //     two-element monoid by one table entry.
    {
        let space = discrete(1);
        let c = from_group_sheaf(constant_group_sheaf(&space, &cyclic(2)).unwrap()).unwrap();
        let full = space.full_set();
        let mutated = with_compose_entry(&c, (&full, &full, &full), 1, 1, 1).unwrap();
        out.push(MutationCase {
            name: "pseudogroup_non_invertible_germ",
            mutant: Mutant::Ppg(mutated, Dialect::T1),
        });
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_standard_mutation_is_detected() {
        let budgets = Budgets::default();
        let cases = standard_mutations();
        assert_eq!(cases.len(), 10);
        for case in &cases {
            assert!(case.detected(&budgets), "{} went undetected", case.name);
        }
    }

    #[test]
    fn the_unmutated_bases_pass_their_suites() {
        let budgets = Budgets::default();
        assert!(all_pass(&check_groupoid(&pair_groupoid(2))));
        let p = skyscraper(&discrete(2), crate::space::Point(0), &["s", "t"]).unwrap();
        assert!(p.is_sheaf(CoverMode::Canonical, &budgets).unwrap().is_sheaf);
        let c = from_group_sheaf(constant_group_sheaf(&discrete(2), &cyclic(2)).unwrap()).unwrap();
        assert!(all_pass(&is_pseudogroup_sheaf(&c, Dialect::T1, &budgets).unwrap()));
    }
}
