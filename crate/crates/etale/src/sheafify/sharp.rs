//! The germ-family category: `hom(U, V)` is the product over `x ∈ U` of the
//! germ hom-sets `C_x(V)`, with composition classifying each germ to its
//! target and composing representatives between minimal opens. Its
//! hom-presheaves are products of skyscrapers, hence sheaves.

use super::PpgMorphism;
use crate::pseudogroup::{Backend, MorId, PpgError, PrePseudogroup, SharpData};
use std::collections::BTreeMap;

const FAMILY_CAP: usize = 1 << 16;

fn digits(mut id: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; radices.len()];
    for (i, &r) in radices.iter().enumerate().rev() {
        out[i] = id % r;
        id /= r;
    }
    out
}

/// Builds `C^#` together with the canonical germ map `C → C^#`.
pub fn ppg_sharp(c: &PrePseudogroup) -> Result<(PrePseudogroup, PpgMorphism), PpgError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();
    let mut families = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let radices: Vec<usize> =
                u.iter().map(|x| c.hom_len(space.min_open(x), v)).collect();
            let total: usize = radices.iter().product();
            if total > FAMILY_CAP {
                return Err(PpgError::EnumerationBudget(format!(
                    "{total} germ families over ({:?}, {:?})",
                    space.external_ids(u),
                    space.external_ids(v)
                )));
            }
            let mut fams = Vec::with_capacity(total);
            let mut labs = Vec::with_capacity(total);
            for id in 0..total {
                let ds = digits(id, &radices);
                let fam: Vec<MorId> = ds.iter().map(|&d| d as MorId).collect();
                let parts: Vec<String> = u
                    .iter()
                    .zip(&fam)
                    .map(|(x, &m)| c.hom_label(space.min_open(x), v, m))
                    .collect();
                labs.push(format!("({})", parts.join(";")));
                fams.push(fam);
            }
            families.insert((u.clone(), v.clone()), fams);
            labels.insert((u.clone(), v.clone()), labs);
        }
    }
    let sharp = PrePseudogroup::from_backend(
        space.clone(),
        labels,
        Backend::Sharp(SharpData { parent: c.clone(), families }),
    )?;

    // Unit: a morphism goes to its family of germs.
    let mut maps = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let radices: Vec<usize> =
                u.iter().map(|x| c.hom_len(space.min_open(x), v)).collect();
            let mut table = Vec::with_capacity(c.hom_len(u, v));
            for f in 0..c.hom_len(u, v) as MorId {
                let mut id = 0usize;
                for (pos, x) in u.iter().enumerate() {
                    let ux = space.min_open(x).clone();
                    let inc = c.incl(&ux, u)?;
                    let germ = c.compose(&ux, u, v, f, inc)?;
                    id = id * radices[pos] + germ as usize;
                }
                table.push(id as MorId);
            }
            maps.insert((u.clone(), v.clone()), table);
        }
    }
    Ok((sharp, PpgMorphism { maps }))
}
