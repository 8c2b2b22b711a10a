//! Morphisms of pre-pseudogroups and the sheafification pipeline: the
//! category of germ families with its classified composition, the minimal
//! sub-pseudogroup-sheaf containing the image of the germ map, the
//! universal property with enumeration certificates, and the per-hom
//! comparison against presheaf sheafification.

mod hat;
mod prop45;
mod sharp;
mod universal;

pub use hat::{ppg_sheafify, ClosureOrder, PpgSheafification};
pub use prop45::{check_prop45, Prop45Report};
pub use sharp::ppg_sharp;
pub use universal::{check_universality, PpgUniversalityError};

use crate::bitset::IndexSet;
use crate::budget::Budgets;
use crate::pseudogroup::{MorId, PpgError, PrePseudogroup};
use crate::report::Check;
use serde_json::json;
use std::collections::BTreeMap;

/// A morphism of pre-pseudogroups over a common space: one function per
/// hom-set, preserving composition and inclusions.
#[derive(Clone, Debug)]
pub struct PpgMorphism {
    pub maps: BTreeMap<(IndexSet, IndexSet), Vec<MorId>>,
}

impl PpgMorphism {
    pub fn identity(c: &PrePseudogroup) -> PpgMorphism {
        let mut maps = BTreeMap::new();
        for u in c.opens().to_vec() {
            for v in c.opens().to_vec() {
                maps.insert(
                    (u.clone(), v.clone()),
                    (0..c.hom_len(&u, &v) as MorId).collect(),
                );
            }
        }
        PpgMorphism { maps }
    }

    pub fn apply(&self, u: &IndexSet, v: &IndexSet, f: MorId) -> MorId {
        self.maps[&(u.clone(), v.clone())][f as usize]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PpgMorphism) -> PpgMorphism {
        let maps = self
            .maps
            .iter()
            .map(|(k, table)| {
                (k.clone(), table.iter().map(|&f| other.maps[k][f as usize]).collect())
            })
            .collect();
        PpgMorphism { maps }
    }
}

/// Functor laws of a pre-pseudogroup morphism: well-typed components,
/// inclusion preservation, and (budgeted) composition preservation.
pub fn check_ppg_morphism(
    phi: &PpgMorphism,
    c: &PrePseudogroup,
    d: &PrePseudogroup,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    let mut checks = Vec::new();
    let space = c.space().clone();
    let ids = |s: &IndexSet| space.external_ids(s);
    let opens = c.opens().to_vec();

    let mut witness = None;
    for u in &opens {
        for v in &opens {
            match phi.maps.get(&(u.clone(), v.clone())) {
                Some(t)
                    if t.len() == c.hom_len(u, v)
                        && t.iter().all(|&f| (f as usize) < d.hom_len(u, v)) => {}
                _ => {
                    witness.get_or_insert(json!({ "hom": [ids(u), ids(v)] }));
                }
            }
        }
    }
    checks.push(Check::of("components_well_typed", witness.is_none(), witness.clone()));
    if witness.is_some() {
        return Ok(checks);
    }

    let mut witness = None;
    for u in &opens {
        for v in &opens {
            if !u.is_subset(v) {
                continue;
            }
            if phi.apply(u, v, c.incl(u, v)?) != d.incl(u, v)? {
                witness.get_or_insert(json!({ "pair": [ids(u), ids(v)] }));
            }
        }
    }
    checks.push(Check::of("preserves_inclusions", witness.is_none(), witness));

    let mut witness = None;
    let mut budget = budgets.max_assoc_tuples;
    'outer: for u in &opens {
        for v in &opens {
            for w in &opens {
                for f in 0..c.hom_len(u, v) as MorId {
                    for g in 0..c.hom_len(v, w) as MorId {
                        if budget == 0 {
                            break 'outer;
                        }
                        budget -= 1;
                        let lhs = phi.apply(u, w, c.compose(u, v, w, g, f)?);
                        let rhs =
                            d.compose(u, v, w, phi.apply(v, w, g), phi.apply(u, v, f))?;
                        if lhs != rhs {
                            witness = Some(json!({
                                "opens": [ids(u), ids(v), ids(w)],
                                "pair": [g, f],
                            }));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("preserves_composition", witness.is_none(), witness));
    Ok(checks)
}

/// Enumerates all morphisms `C → D`, capped; used for uniqueness
/// certificates on small instances.
pub fn all_ppg_morphisms(
    c: &PrePseudogroup,
    d: &PrePseudogroup,
    budgets: &Budgets,
    cap: usize,
) -> Result<Vec<PpgMorphism>, PpgError> {
    let opens = c.opens().to_vec();
    let mut keys: Vec<(IndexSet, IndexSet)> = Vec::new();
    for u in &opens {
        for v in &opens {
            keys.push((u.clone(), v.clone()));
        }
    }
    let mut partials: Vec<BTreeMap<(IndexSet, IndexSet), Vec<MorId>>> = vec![BTreeMap::new()];
    for key in &keys {
        let n_c = c.hom_len(&key.0, &key.1);
        let n_d = d.hom_len(&key.0, &key.1);
        if n_c > 0 && n_d == 0 {
            return Ok(Vec::new());
        }
        let mut next = Vec::new();
        for partial in &partials {
            let mut table = vec![0 as MorId; n_c];
            'assign: loop {
                let mut m = partial.clone();
                m.insert(key.clone(), table.clone());
                next.push(m);
                if next.len() > cap {
                    return Err(PpgError::EnumerationBudget(format!(
                        "more than {cap} morphism candidates"
                    )));
                }
                if n_c == 0 {
                    break;
                }
                let mut i = 0;
                loop {
                    table[i] += 1;
                    if (table[i] as usize) < n_d {
                        break;
                    }
                    table[i] = 0;
                    i += 1;
                    if i == n_c {
                        break 'assign;
                    }
                }
            }
        }
        partials = next;
    }
    let mut out = Vec::new();
    for maps in partials {
        let phi = PpgMorphism { maps };
        if crate::report::all_pass(&check_ppg_morphism(&phi, c, d, budgets)?) {
            out.push(phi);
        }
    }
    Ok(out)
}
