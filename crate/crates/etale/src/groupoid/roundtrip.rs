//! Round trips between etale groupoids and their section categories.
//!
//! Groupoid side: an arrow maps to the germ, at its source, of the unique
//! local section through it (the inverse of the source map on the arrow's
//! minimal neighborhood); the resulting map to the germ groupoid of the
//! section category is verified to be a homeomorphism preserving all five
//! structure maps. Pseudogroup side: a morphism maps to the section listing
//! its germs; the canonical functor is verified bijective per hom-set.

use super::from_ppg::{groupoid_from_pseudogroup, GroupoidFromPpg};
use super::sections::sections_category;
use super::{is_etale, GroupoidError, TopGroupoid};
use crate::budget::Budgets;
use crate::bitset::IndexSet;
use crate::pseudogroup::{Backend, Dialect, MorId, PpgError, PrePseudogroup};
use crate::report::{all_pass, Check};
use crate::space::PointMap;
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RoundtripError {
    #[error("groupoid is not etale: {0}")]
    NotEtale(String),
    #[error(transparent)]
    Ppg(#[from] PpgError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("isomorphism witness failed: {equation}")]
    WitnessFailed { equation: String, checks: Vec<Check> },
}

/// A verified isomorphism between a groupoid and the germ groupoid of its
/// section category.
pub struct GroupoidIsoWitness {
    pub sections: PrePseudogroup,
    pub rebuilt: GroupoidFromPpg,
    /// Arrow of the rebuilt groupoid per arrow of the original.
    pub arrow_map: Vec<usize>,
    pub inverse_map: Vec<usize>,
    pub checks: Vec<Check>,
}

fn dialect_for(base: &crate::space::Space) -> Dialect {
    if base.is_t1() {
        Dialect::T1
    } else {
        Dialect::NonT1
    }
}

pub fn roundtrip_groupoid(
    g: &TopGroupoid,
    _budgets: &Budgets,
) -> Result<GroupoidIsoWitness, RoundtripError> {
    let etale = is_etale(g);
    if !etale.etale {
        return Err(RoundtripError::NotEtale(format!(
            "s fails at {:?}, t fails at {:?}",
            etale.s_failures, etale.t_failures
        )));
    }
    let sections = sections_category(g)?;
    let dialect = dialect_for(&g.base);
    let rebuilt = groupoid_from_pseudogroup(&sections, dialect)?;
    let full = g.base.full_set();

    // Arrow map: germ at s(a) of the inverse of s restricted to U_a.
    let Backend::Sections(sd) = sections.backend() else {
        return Err(RoundtripError::Ppg(PpgError::Internal("expected a section backend".into())));
    };
    let mut arrow_map = Vec::with_capacity(g.n_arrows());
    for a in 0..g.n_arrows() {
        let x = g.source_of(a);
        let ux = g.base.min_open(x).clone();
        let ua = g.arrows.min_open(a);
        let mut assign: BTreeMap<usize, usize> = BTreeMap::new();
        for x2 in ux.iter() {
            let through: Vec<usize> =
                ua.iter().filter(|&b| g.source_of(b) == x2).collect();
            if through.len() != 1 {
                return Err(RoundtripError::Groupoid(GroupoidError::NoSectionThroughArrow(
                    g.arrows.point(a).0,
                )));
            }
            assign.insert(x2, through[0]);
        }
        let list = &sd.sections[&(ux.clone(), full.clone())];
        let vals: Vec<u32> = ux.iter().map(|x2| assign[&x2] as u32).collect();
        let mor = list
            .iter()
            .position(|m| m.graph().iter().map(|&(_, v)| v as u32).collect::<Vec<_>>() == vals)
            .ok_or_else(|| {
                RoundtripError::Groupoid(GroupoidError::NoSectionThroughArrow(g.arrows.point(a).0))
            })? as MorId;
        arrow_map.push(rebuilt.germ_index[&(x, mor)]);
    }

    let mut checks = Vec::new();

    // Section independence: every section passing through an arrow has the
    // same germ at its source.
    let mut witness = None;
    'independence: for (a, &mapped) in arrow_map.iter().enumerate() {
        let x = g.source_of(a);
        let ux = g.base.min_open(x).clone();
        let expected =
            &sd.sections[&(ux.clone(), full.clone())][rebuilt.germs[mapped].1 as usize];
        for ((u, _v), list) in &sd.sections {
            if !u.contains(x) {
                continue;
            }
            for sec in list {
                let at_x = sec.graph().iter().find(|&&(xi, _)| xi == x).map(|&(_, v)| v);
                if at_x != Some(a) {
                    continue;
                }
                let same = ux.iter().all(|x2| {
                    let s1 = sec.graph().iter().find(|&&(xi, _)| xi == x2).map(|&(_, v)| v);
                    let s2 =
                        expected.graph().iter().find(|&&(xi, _)| xi == x2).map(|&(_, v)| v);
                    s1 == s2
                });
                if !same {
                    witness = Some(json!({ "arrow": g.arrows.point(a).0 }));
                    break 'independence;
                }
            }
        }
    }
    checks.push(Check::of("section_independence", witness.is_none(), witness));

    // Inverse map: evaluate the germ's section at its base point.
    let mut inverse_map = Vec::with_capacity(rebuilt.germs.len());
    for &(x, mor) in &rebuilt.germs {
        let ux = g.base.min_open(x).clone();
        let sec = &sd.sections[&(ux, full.clone())][mor as usize];
        let a = sec.graph().iter().find(|&&(xi, _)| xi == x).map(|&(_, v)| v).unwrap();
        inverse_map.push(a);
    }

    let bijective = (0..g.n_arrows()).all(|a| inverse_map[arrow_map[a]] == a)
        && (0..rebuilt.germs.len()).all(|m| arrow_map[inverse_map[m]] == m);
    checks.push(Check::of(
        "arrow_map_bijective",
        bijective,
        Some(json!({ "arrows": g.n_arrows(), "germs": rebuilt.germs.len() })),
    ));

    let h = &rebuilt.groupoid;
    let forward = PointMap::from_indices(
        g.arrows.full_open(),
        h.arrows.full_open(),
        arrow_map.iter().map(|&a| a as u32).collect(),
    );
    let backward = PointMap::from_indices(
        h.arrows.full_open(),
        g.arrows.full_open(),
        inverse_map.iter().map(|&a| a as u32).collect(),
    );
    let fw = forward.check_continuous();
    let bw = backward.check_continuous();
    checks.push(Check::of(
        "arrow_map_homeomorphism",
        fw.continuous && bw.continuous,
        Some(json!({ "forward": fw.continuous, "backward": bw.continuous })),
    ));

    let s_ok = (0..g.n_arrows()).all(|a| h.source_of(arrow_map[a]) == g.source_of(a));
    checks.push(Check::of("preserves_s", s_ok, None));
    let t_ok = (0..g.n_arrows()).all(|a| h.target_of(arrow_map[a]) == g.target_of(a));
    checks.push(Check::of("preserves_t", t_ok, None));
    let i_ok = (0..g.base.n_points()).all(|x| arrow_map[g.identity_of(x)] == h.identity_of(x));
    checks.push(Check::of("preserves_i", i_ok, None));
    let inv_ok =
        (0..g.n_arrows()).all(|a| arrow_map[g.inverse_of(a)] == h.inverse_of(arrow_map[a]));
    checks.push(Check::of("preserves_inv", inv_ok, None));
    let comp_ok = g.composable_pairs().into_iter().all(|(a, b)| {
        match (g.compose(a, b), h.compose(arrow_map[a], arrow_map[b])) {
            (Some(ab), Some(hab)) => arrow_map[ab] == hab,
            _ => false,
        }
    });
    checks.push(Check::of("preserves_comp", comp_ok, None));

    if !all_pass(&checks) {
        let first = checks.iter().find(|c| !c.passed()).unwrap().name.clone();
        return Err(RoundtripError::WitnessFailed { equation: first, checks });
    }
    Ok(GroupoidIsoWitness { sections, rebuilt, arrow_map, inverse_map, checks })
}

/// A verified per-hom bijection between a pseudogroup sheaf and the section
/// category of its groupoid.
pub struct PpgIsoWitness {
    pub rebuilt_groupoid: GroupoidFromPpg,
    pub sections: PrePseudogroup,
    /// Per hom-set: the section id of each morphism.
    pub tables: BTreeMap<(IndexSet, IndexSet), Vec<MorId>>,
    pub checks: Vec<Check>,
}

pub fn roundtrip_pseudogroup(
    c: &PrePseudogroup,
    dialect: Dialect,
    budgets: &Budgets,
) -> Result<PpgIsoWitness, RoundtripError> {
    let space = c.space().clone();
    let full = space.full_set();
    let g = groupoid_from_pseudogroup(c, dialect)?;
    let d = sections_category(&g.groupoid)?;

    // φ(f ∈ C(U, V)) = the section x ↦ germ_x(ι_{V→X} f).
    let mut tables = BTreeMap::new();
    let mut checks = Vec::new();
    let mut witness = None;
    let Backend::Sections(sd) = d.backend() else {
        return Err(RoundtripError::Ppg(PpgError::Internal("expected a section backend".into())));
    };
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let mut table = Vec::with_capacity(c.hom_len(&u, &v));
            for f in 0..c.hom_len(&u, &v) as MorId {
                let f_top = c.compose(&u, &v, &full, c.incl(&v, &full)?, f)?;
                let vals: Vec<u32> = u
                    .iter()
                    .map(|x| {
                        let ux = space.min_open(x).clone();
                        let inc = c.incl(&ux, &u)?;
                        let germ = c.compose(&ux, &u, &full, f_top, inc)?;
                        Ok(g.germ_index[&(x, germ)] as u32)
                    })
                    .collect::<Result<_, PpgError>>()?;
                let list = &sd.sections[&(u.clone(), v.clone())];
                match list.iter().position(|m| {
                    m.graph().iter().map(|&(_, a)| a as u32).collect::<Vec<_>>() == vals
                }) {
                    Some(id) => table.push(id as MorId),
                    None => {
                        witness.get_or_insert(json!({
                            "hom": [space.external_ids(&u), space.external_ids(&v)],
                            "mor": c.hom_label(&u, &v, f),
                            "reason": "image is not a section",
                        }));
                        table.push(0);
                    }
                }
            }
            tables.insert((u.clone(), v.clone()), table);
        }
    }
    checks.push(Check::of("canonical_map_lands_in_sections", witness.is_none(), witness));

    // Bijectivity per hom-set.
    let mut witness = None;
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let table = &tables[&(u.clone(), v.clone())];
            let mut seen = vec![false; d.hom_len(&u, &v)];
            let mut ok = table.len() == d.hom_len(&u, &v);
            for &id in table {
                if seen[id as usize] {
                    ok = false;
                }
                seen[id as usize] = true;
            }
            if !(ok && seen.iter().all(|&b| b)) {
                witness.get_or_insert(json!({
                    "hom": [space.external_ids(&u), space.external_ids(&v)],
                    "side": table.len(),
                    "sections": d.hom_len(&u, &v),
                }));
            }
        }
    }
    checks.push(Check::of("per_hom_bijective", witness.is_none(), witness));

    // Functoriality: inclusions and (budgeted) composition.
    let mut witness = None;
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            if !u.is_subset(&v) {
                continue;
            }
            let lhs = tables[&(u.clone(), v.clone())][c.incl(&u, &v)? as usize];
            if lhs != d.incl(&u, &v)? {
                witness.get_or_insert(json!({
                    "pair": [space.external_ids(&u), space.external_ids(&v)],
                }));
            }
        }
    }
    checks.push(Check::of("preserves_inclusions", witness.is_none(), witness));

    let mut witness = None;
    let mut budget = budgets.max_assoc_tuples;
    'comp: for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            for w in c.opens().to_vec() {
                for f in 0..c.hom_len(&u, &v) as MorId {
                    for gmor in 0..c.hom_len(&v, &w) as MorId {
                        if budget == 0 {
                            break 'comp;
                        }
                        budget -= 1;
                        let gf = c.compose(&u, &v, &w, gmor, f)?;
                        let lhs = tables[&(u.clone(), w.clone())][gf as usize];
                        let rhs = d.compose(
                            &u,
                            &v,
                            &w,
                            tables[&(v.clone(), w.clone())][gmor as usize],
                            tables[&(u.clone(), v.clone())][f as usize],
                        )?;
                        if lhs != rhs {
                            witness.get_or_insert(json!({
                                "opens": [
                                    space.external_ids(&u),
                                    space.external_ids(&v),
                                    space.external_ids(&w)
                                ],
                            }));
                            break 'comp;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("preserves_composition", witness.is_none(), witness));

    if !all_pass(&checks) {
        let first = checks.iter().find(|c| !c.passed()).unwrap().name.clone();
        return Err(RoundtripError::WitnessFailed { equation: first, checks });
    }
    Ok(PpgIsoWitness { rebuilt_groupoid: g, sections: d, tables, checks })
}
