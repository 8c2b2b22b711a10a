//! The minimal sub-pseudogroup-sheaf of the germ-family category
//! containing the image of the germ map: alternating closure under gluing
//! (over canonical covers, per hom-presheaf) and under composition, to a
//! joint fixpoint. The two single-operator-first schedules are exposed so
//! their agreement can be verified rather than assumed.

use super::sharp::ppg_sharp;
use super::PpgMorphism;
use crate::bitset::IndexSet;
use crate::budget::Budgets;
use crate::pseudogroup::{Backend, MorId, PpgError, PrePseudogroup, SubData};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosureOrder {
    GlueFirst,
    ComposeFirst,
}

pub struct PpgSheafification {
    pub sharp: PrePseudogroup,
    pub hat: PrePseudogroup,
    /// Germ map `C → Ĉ`.
    pub unit: PpgMorphism,
    /// Germ map `C → C^#`.
    pub unit_sharp: PpgMorphism,
    /// Sharp ids of the members of each hom-set of `Ĉ`.
    pub members: BTreeMap<(IndexSet, IndexSet), Vec<MorId>>,
}

/// One gluing pass: add any family whose restrictions to the canonical
/// cover members are already present. Returns whether anything was added.
fn glue_pass(
    sharp: &PrePseudogroup,
    members: &mut BTreeMap<(IndexSet, IndexSet), BTreeSet<MorId>>,
) -> Result<bool, PpgError> {
    let space = sharp.space().clone();
    let mut scan: Vec<IndexSet> = sharp.opens().to_vec();
    scan.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut grew = false;
    for u in &scan {
        let cover = space.canonical_cover(u);
        for v in sharp.opens().to_vec() {
            for t in 0..sharp.hom_len(u, &v) as MorId {
                if members[&(u.clone(), v.clone())].contains(&t) {
                    continue;
                }
                let mut gluable = true;
                for m in &cover {
                    let inc = sharp.incl(m, u)?;
                    let restricted = sharp.compose(m, u, &v, t, inc)?;
                    if !members[&(m.clone(), v.clone())].contains(&restricted) {
                        gluable = false;
                        break;
                    }
                }
                if gluable {
                    members.get_mut(&(u.clone(), v.clone())).unwrap().insert(t);
                    grew = true;
                }
            }
        }
    }
    Ok(grew)
}

/// One composition pass: close the member sets under the sharp composition.
fn compose_pass(
    sharp: &PrePseudogroup,
    members: &mut BTreeMap<(IndexSet, IndexSet), BTreeSet<MorId>>,
) -> Result<bool, PpgError> {
    let opens = sharp.opens().to_vec();
    let mut grew = false;
    for u in &opens {
        for v in &opens {
            let fs: Vec<MorId> = members[&(u.clone(), v.clone())].iter().copied().collect();
            if fs.is_empty() {
                continue;
            }
            for w in &opens {
                let gs: Vec<MorId> = members[&(v.clone(), w.clone())].iter().copied().collect();
                for &g in &gs {
                    for &f in &fs {
                        let h = sharp.compose(u, v, w, g, f)?;
                        if members.get_mut(&(u.clone(), w.clone())).unwrap().insert(h) {
                            grew = true;
                        }
                    }
                }
            }
        }
    }
    Ok(grew)
}

/// Computes the member sets of the closure for a given schedule.
pub type ClosureSets = BTreeMap<(IndexSet, IndexSet), BTreeSet<MorId>>;

pub fn closure_members(
    c: &PrePseudogroup,
    order: ClosureOrder,
) -> Result<(PrePseudogroup, PpgMorphism, ClosureSets), PpgError> {
    let (sharp, unit_sharp) = ppg_sharp(c)?;
    let opens = sharp.opens().to_vec();
    let mut members: BTreeMap<(IndexSet, IndexSet), BTreeSet<MorId>> = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let image: BTreeSet<MorId> =
                unit_sharp.maps[&(u.clone(), v.clone())].iter().copied().collect();
            members.insert((u.clone(), v.clone()), image);
        }
    }
    loop {
        let grew = match order {
            ClosureOrder::GlueFirst => {
                let a = glue_pass(&sharp, &mut members)?;
                let b = compose_pass(&sharp, &mut members)?;
                a || b
            }
            ClosureOrder::ComposeFirst => {
                let a = compose_pass(&sharp, &mut members)?;
                let b = glue_pass(&sharp, &mut members)?;
                a || b
            }
        };
        if !grew {
            break;
        }
    }
    Ok((sharp, unit_sharp, members))
}

/// Sheafification of a pre-pseudogroup: the minimal substructure of the
/// germ-family category that contains the image of the germ map, is closed
/// under composition and inclusions, and is a subsheaf of every
/// hom-presheaf.
pub fn ppg_sheafify(c: &PrePseudogroup, _budgets: &Budgets) -> Result<PpgSheafification, PpgError> {
    let (sharp, unit_sharp, member_sets) = closure_members(c, ClosureOrder::GlueFirst)?;
    let members: BTreeMap<(IndexSet, IndexSet), Vec<MorId>> = member_sets
        .iter()
        .map(|(k, set)| (k.clone(), set.iter().copied().collect::<Vec<MorId>>()))
        .collect();
    let labels = members
        .iter()
        .map(|(k, ids)| {
            let l: Vec<String> = ids.iter().map(|&t| sharp.hom_label(&k.0, &k.1, t)).collect();
            (k.clone(), l)
        })
        .collect();
    let hat = PrePseudogroup::from_backend(
        c.space().clone(),
        labels,
        Backend::Sub(SubData { parent: sharp.clone(), members: members.clone() }),
    )?;
    let unit_maps = unit_sharp
        .maps
        .iter()
        .map(|(k, table)| {
            let local = table
                .iter()
                .map(|t| members[k].iter().position(|m| m == t).unwrap() as MorId)
                .collect();
            (k.clone(), local)
        })
        .collect();
    Ok(PpgSheafification {
        sharp,
        hat,
        unit: PpgMorphism { maps: unit_maps },
        unit_sharp,
        members,
    })
}

impl PpgSheafification {
    /// Germ bijectivity of the unit: at every minimal open, the unit is a
    /// bijection onto the hat hom-set.
    pub fn unit_germ_bijective(&self, c: &PrePseudogroup) -> bool {
        let space = c.space();
        (0..space.n_points()).all(|x| {
            let ux = space.min_open(x).clone();
            c.opens().to_vec().iter().all(|v| {
                let table = &self.unit.maps[&(ux.clone(), v.clone())];
                let distinct: BTreeSet<MorId> = table.iter().copied().collect();
                distinct.len() == table.len() && table.len() == self.hat.hom_len(&ux, v)
            })
        })
    }
}
