//! Hom-by-hom agreement of pseudogroup sheafification with presheaf
//! sheafification: for every target open `V`, the sections of `Ĉ(-, V)`
//! must coincide with the presheaf sheafification of `C(-, V)` inside the
//! common ambient product of skyscrapers, and the units must match. This
//! verifies, rather than assumes, that the composition closure adds
//! nothing beyond the gluing closure.

use super::{ClosureOrder, PpgSheafification};
use crate::presheaf::sheafify as presheaf_sheafify;
use crate::pseudogroup::{hom_presheaf, MorId, PpgError, PrePseudogroup};
use serde_json::json;
use std::collections::BTreeSet;

#[derive(Debug)]
pub struct Prop45Report {
    pub agrees: bool,
    pub witness: Option<serde_json::Value>,
    /// Whether the two closure schedules reach the same fixpoint.
    pub order_independent: bool,
}

pub fn check_prop45(
    c: &PrePseudogroup,
    sh: &PpgSheafification,
) -> Result<Prop45Report, PpgError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();
    let mut witness = None;

    for v in &opens {
        let p = hom_presheaf(c, v)?;
        let psh = presheaf_sheafify(&p)
            .map_err(|e| PpgError::Internal(format!("presheaf sheafification failed: {e}")))?;
        for u in &opens {
            // Both constructions realize sections over `u` as germ tuples
            // indexed by the points of `u` in ascending order, in the same
            // mixed-radix encoding; ids are directly comparable.
            let from_presheaf: BTreeSet<MorId> =
                psh.include[u].iter().copied().collect();
            let from_ppg: BTreeSet<MorId> =
                sh.members[&(u.clone(), v.clone())].iter().copied().collect();
            if from_presheaf != from_ppg {
                witness.get_or_insert(json!({
                    "U": space.external_ids(u),
                    "V": space.external_ids(v),
                    "presheaf_route": from_presheaf.len(),
                    "pseudogroup_route": from_ppg.len(),
                }));
            }
            // Units must agree element by element.
            let unit_p = &psh.unit_sharp.maps[u];
            let unit_c = &sh.unit_sharp.maps[&(u.clone(), v.clone())];
            if unit_p != unit_c {
                witness.get_or_insert(json!({
                    "U": space.external_ids(u),
                    "V": space.external_ids(v),
                    "reason": "units differ",
                }));
            }
        }
    }

    let (_, _, glue_first) = super::hat::closure_members(c, ClosureOrder::GlueFirst)?;
    let (_, _, compose_first) = super::hat::closure_members(c, ClosureOrder::ComposeFirst)?;
    let order_independent = glue_first == compose_first;

    Ok(Prop45Report { agrees: witness.is_none(), witness, order_independent })
}
