//! Germ-level laws satisfied by every section category: injectivity of the
//! embeddings out of target-classified germ sets, joint surjectivity onto
//! the germ hom-sets, monotonicity along specialization with the membership
//! biconditional, and the sheaf condition on every hom-presheaf.
//!
//! On a T1 base the three germ laws together are equivalent to the
//! coproduct decomposition of the germ hom-sets; both sides are computed
//! and the equivalence itself is recorded as a check.

use crate::budget::Budgets;
use crate::pseudogroup::{check_decomposition, hom_presheaf, PpgError, PrePseudogroup};
use crate::report::{all_pass, Check};
use crate::space::CoverMode;
use serde_json::json;
use std::collections::BTreeSet;

#[derive(Debug)]
pub struct Prop11Report {
    pub checks: Vec<Check>,
    /// The coproduct form of the germ decomposition; equivalent to the germ
    /// laws on T1 bases, typically false otherwise.
    pub coproduct_form: bool,
}

impl Prop11Report {
    pub fn passed(&self) -> bool {
        all_pass(&self.checks)
    }
}

pub fn check_prop11(c: &PrePseudogroup, budgets: &Budgets) -> Result<Prop11Report, PpgError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();
    let mut checks = Vec::new();

    // (1) Objects of the category are exactly the opens; structural in this
    // encoding, recorded for the report.
    checks.push(Check::pass("objects_are_opens"));

    // Germ embeddings ι_y : hom(U_x, U_y) → hom(U_x, V) for y ∈ V.
    let mut inj_witness = None;
    let mut surj_witness = None;
    for x in 0..space.n_points() {
        for v in &opens {
            let n_germs = c.germ_hom(x, v);
            let mut covered: BTreeSet<u32> = BTreeSet::new();
            for y in v.iter() {
                let uy = space.min_open(y).clone();
                let mut seen = BTreeSet::new();
                for f in 0..c.hom_len(space.min_open(x), &uy) as u32 {
                    let image = c.postcompose_incl(x, &uy, v, f)?;
                    if !seen.insert(image) && inj_witness.is_none() {
                        inj_witness = Some(json!({
                            "x": space.point(x).0,
                            "y": space.point(y).0,
                            "V": space.external_ids(v),
                        }));
                    }
                    covered.insert(image);
                }
            }
            if covered.len() != n_germs && surj_witness.is_none() {
                surj_witness = Some(json!({
                    "x": space.point(x).0,
                    "V": space.external_ids(v),
                    "germs": n_germs,
                    "covered": covered.len(),
                }));
            }
        }
    }
    checks.push(Check::of("germ_projections_injective", inj_witness.is_none(), inj_witness));
    checks.push(Check::of("germ_union_surjective", surj_witness.is_none(), surj_witness));

    // Monotonicity: y → z forces Im(C_x^y) ⊆ Im(C_x^z) inside C_x(V).
    let mut mono_witness = None;
    for x in 0..space.n_points() {
        for y in 0..space.n_points() {
            for z in 0..space.n_points() {
                if !space.min_open(z).contains(y) {
                    continue; // not y → z
                }
                let (uy, uz) = (space.min_open(y).clone(), space.min_open(z).clone());
                for v in &opens {
                    if !v.contains(z) || !uy.is_subset(v) {
                        continue;
                    }
                    for f in 0..c.hom_len(space.min_open(x), &uy) as u32 {
                        let via_y = c.postcompose_incl(x, &uy, v, f)?;
                        let through_z = c.postcompose_incl(x, &uy, &uz, f)?;
                        let via_z = c.postcompose_incl(x, &uz, v, through_z)?;
                        if via_y != via_z && mono_witness.is_none() {
                            mono_witness = Some(json!({
                                "x": space.point(x).0,
                                "y": space.point(y).0,
                                "z": space.point(z).0,
                                "V": space.external_ids(v),
                            }));
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("germ_sets_monotone_in_target", mono_witness.is_none(), mono_witness));

    // Membership biconditional: a germ lies in the image of C_x^y exactly
    // when its underlying target specializes to y. Needs underlying data.
    let mut bicond_witness = None;
    let mut bicond_available = true;
    'outer: for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        for v in &opens {
            for f in 0..c.hom_len(&ux, v) as u32 {
                let Some(map) = c.intrinsic_underlying(&ux, v, f)? else {
                    bicond_available = false;
                    break 'outer;
                };
                let fx = space.index_of(map.apply(space.point(x)).map_err(PpgError::Space)?)?;
                for y in v.iter() {
                    let uy = space.min_open(y).clone();
                    let member = (0..c.hom_len(&ux, &uy) as u32)
                        .map(|l| c.postcompose_incl(x, &uy, v, l))
                        .collect::<Result<Vec<_>, _>>()?
                        .contains(&f);
                    let specializes = space.min_open(y).contains(fx);
                    if member != specializes {
                        bicond_witness = Some(json!({
                            "x": space.point(x).0,
                            "y": space.point(y).0,
                            "V": space.external_ids(v),
                            "germ": c.hom_label(&ux, v, f),
                            "member": member,
                            "target_specializes": specializes,
                        }));
                        break 'outer;
                    }
                }
            }
        }
    }
    if bicond_available {
        checks.push(Check::of(
            "membership_matches_specialization",
            bicond_witness.is_none(),
            bicond_witness,
        ));
    } else {
        checks.push(Check::skipped(
            "membership_matches_specialization",
            "no underlying maps available",
        ));
    }

    // Sheaf condition for every hom-presheaf.
    let mut sheaf_witness = None;
    for v in &opens {
        let p = hom_presheaf(c, v)?;
        let verdict = p.is_sheaf(CoverMode::Canonical, budgets).map_err(|e| {
            PpgError::Internal(format!("sheaf check failed to run: {e}"))
        })?;
        if !verdict.is_sheaf && sheaf_witness.is_none() {
            sheaf_witness = Some(json!({
                "V": space.external_ids(v),
                "failure": verdict.failure,
            }));
        }
    }
    checks.push(Check::of("hom_presheaves_are_sheaves", sheaf_witness.is_none(), sheaf_witness));

    // Coproduct form, and its equivalence with the germ laws on T1 bases.
    let decomposition = check_decomposition(c)?;
    let coproduct_form = decomposition.holds();
    if space.is_t1() {
        let germ_laws = checks[1].passed() && checks[2].passed() && checks[3].passed();
        checks.push(Check::of(
            "t1_equivalence_of_coproduct_and_germ_laws",
            germ_laws == coproduct_form,
            Some(json!({ "germ_laws": germ_laws, "coproduct_form": coproduct_form })),
        ));
    }

    Ok(Prop11Report { checks, coproduct_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::groupoids::{group_bundle, pair_groupoid};
    use crate::corpus::groups::cyclic;
    use crate::corpus::spaces::{chain, discrete, sierpinski};
    use crate::groupoid::{sections_category, unit_groupoid};

    #[test]
    fn discrete_section_categories_pass_with_coproduct_form() {
        for g in [pair_groupoid(2), unit_groupoid(&discrete(3))] {
            let c = sections_category(&g).unwrap();
            let report = check_prop11(&c, &Budgets::default()).unwrap();
            assert!(report.passed(), "{:?}", report.checks);
            assert!(report.coproduct_form);
        }
    }

    #[test]
    fn sierpinski_unit_groupoid_passes_but_coproduct_form_fails() {
        let g = unit_groupoid(&sierpinski());
        let c = sections_category(&g).unwrap();
        let report = check_prop11(&c, &Budgets::default()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
        assert!(!report.coproduct_form);
    }

    #[test]
    fn bundles_over_chains_pass() {
        let g = group_bundle(&chain(3), &cyclic(2));
        let c = sections_category(&g).unwrap();
        let report = check_prop11(&c, &Budgets::default()).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
    }
}
