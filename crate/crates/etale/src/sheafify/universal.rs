//! The universal property of pseudogroup sheafification: every morphism to
//! a pseudogroup sheaf factors uniquely through the unit. The factorization
//! is built germwise (units are germ-bijective, targets are sheaves, so
//! each image is pinned by its germs) and uniqueness is certified by
//! enumerating all candidates consistent with the forced germ maps.

use super::{check_ppg_morphism, PpgMorphism, PpgSheafification};
use crate::bitset::IndexSet;
use crate::budget::Budgets;
use crate::pseudogroup::{MorId, PpgError, PrePseudogroup};
use crate::report::all_pass;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpgUniversalityError {
    #[error("no factorization through the sheafification")]
    NoFactorization,
    #[error("factorization not unique: {0} candidates")]
    NotUnique(usize),
    #[error("enumeration budget exceeded ({0} combinations)")]
    EnumerationBudgetExceeded(usize),
    #[error(transparent)]
    Ppg(#[from] PpgError),
}

/// Finds the unique `ψ : Ĉ → D` with `ψ ∘ unit = φ` and certifies its
/// uniqueness.
pub fn check_universality(
    c: &PrePseudogroup,
    sh: &PpgSheafification,
    d: &PrePseudogroup,
    phi: &PpgMorphism,
    budgets: &Budgets,
) -> Result<(PpgMorphism, usize), PpgUniversalityError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();

    // Forced germ maps ψ_{U_x, V} = φ_{U_x, V} ∘ unit⁻¹.
    let mut forced: BTreeMap<(IndexSet, IndexSet), BTreeMap<MorId, MorId>> = BTreeMap::new();
    for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        for v in &opens {
            let key = (ux.clone(), v.clone());
            if forced.contains_key(&key) {
                continue;
            }
            let unit_table = &sh.unit.maps[&key];
            let mut inverse: BTreeMap<MorId, MorId> = BTreeMap::new();
            for (cid, &hid) in unit_table.iter().enumerate() {
                if inverse.insert(hid, cid as MorId).is_some() {
                    return Err(PpgUniversalityError::NoFactorization);
                }
            }
            if inverse.len() != sh.hat.hom_len(&ux, v) {
                return Err(PpgUniversalityError::NoFactorization);
            }
            let map = inverse
                .into_iter()
                .map(|(hid, cid)| (hid, phi.apply(&ux, v, cid)))
                .collect();
            forced.insert(key, map);
        }
    }

    // Candidates per element of Ĉ: D-morphisms with the forced germs.
    let mut candidates: BTreeMap<(IndexSet, IndexSet), Vec<Vec<MorId>>> = BTreeMap::new();
    let mut combinations: usize = 1;
    for u in &opens {
        for v in &opens {
            let mut per_elem = Vec::new();
            for t in 0..sh.hat.hom_len(u, v) as MorId {
                let mut cands = Vec::new();
                'd: for dm in 0..d.hom_len(u, v) as MorId {
                    for x in u.iter() {
                        let ux = space.min_open(x).clone();
                        let inc_hat = sh.hat.incl(&ux, u)?;
                        let hat_germ = sh.hat.compose(&ux, u, v, t, inc_hat)?;
                        let want = forced[&(ux.clone(), v.clone())][&hat_germ];
                        let inc_d = d.incl(&ux, u)?;
                        if d.compose(&ux, u, v, dm, inc_d)? != want {
                            continue 'd;
                        }
                    }
                    cands.push(dm);
                }
                if cands.is_empty() {
                    return Err(PpgUniversalityError::NoFactorization);
                }
                combinations = combinations.saturating_mul(cands.len());
                if combinations > budgets.max_morphism_candidates {
                    return Err(PpgUniversalityError::EnumerationBudgetExceeded(combinations));
                }
                per_elem.push(cands);
            }
            candidates.insert((u.clone(), v.clone()), per_elem);
        }
    }

    // Enumerate all combinations; keep those that are morphisms factoring φ.
    let keys: Vec<(IndexSet, IndexSet)> = candidates.keys().cloned().collect();
    let mut choice: BTreeMap<(IndexSet, IndexSet), Vec<usize>> = keys
        .iter()
        .map(|k| (k.clone(), vec![0usize; candidates[k].len()]))
        .collect();
    let mut valid: Vec<PpgMorphism> = Vec::new();
    'enumerate: loop {
        let maps: BTreeMap<(IndexSet, IndexSet), Vec<MorId>> = keys
            .iter()
            .map(|k| {
                let table = candidates[k]
                    .iter()
                    .zip(&choice[k])
                    .map(|(cands, &i)| cands[i])
                    .collect();
                (k.clone(), table)
            })
            .collect();
        let psi = PpgMorphism { maps };
        let is_morphism = all_pass(&check_ppg_morphism(&psi, &sh.hat, d, budgets)?);
        let factors = is_morphism
            && keys.iter().all(|k| {
                (0..c.hom_len(&k.0, &k.1) as MorId).all(|f| {
                    psi.apply(&k.0, &k.1, sh.unit.apply(&k.0, &k.1, f))
                        == phi.apply(&k.0, &k.1, f)
                })
            });
        if factors {
            valid.push(psi);
        }
        for k in &keys {
            let per_elem = &candidates[k];
            let ch = choice.get_mut(k).unwrap();
            for i in 0..ch.len() {
                ch[i] += 1;
                if ch[i] < per_elem[i].len() {
                    continue 'enumerate;
                }
                ch[i] = 0;
            }
        }
        break;
    }
    match valid.len() {
        0 => Err(PpgUniversalityError::NoFactorization),
        1 => Ok((valid.into_iter().next().unwrap(), combinations)),
        n => Err(PpgUniversalityError::NotUnique(n)),
    }
}
