//! Dialect-aware validity checks for pre-pseudogroups and the sheaf
//! condition on hom-presheaves.
//!
//! The T1 dialect checks the coproduct decomposition of germ hom-sets and
//! invertibility of the germ category. The nonT1 dialect instead validates
//! the underlying-map functor into local homeomorphisms (inclusions must
//! map to set inclusions) and the target-filtered germ category.

use super::germs::{build_germ_category, check_decomposition};
use super::{MorId, PpgError, PrePseudogroup};
use crate::budget::Budgets;
use crate::presheaf::Presheaf;
use crate::report::Check;
use crate::space::{CoverMode, PointMap};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dialect {
    T1,
    NonT1,
}

/// The hom-presheaf `C(-, V)`: sections over `U` are `hom(U, V)`,
/// restriction is pre-composition with the inclusion.
pub fn hom_presheaf(c: &PrePseudogroup, v: &crate::bitset::IndexSet) -> Result<Presheaf, PpgError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();
    let mut sections = BTreeMap::new();
    let mut res = BTreeMap::new();
    for u in &opens {
        let labels: Vec<String> =
            (0..c.hom_len(u, v) as MorId).map(|f| c.hom_label(u, v, f)).collect();
        sections.insert(u.clone(), labels);
    }
    for u in &opens {
        for u2 in &opens {
            if !u2.is_subset(u) {
                continue;
            }
            let inc = c.incl(u2, u)?;
            let table: Vec<u32> = (0..c.hom_len(u, v) as MorId)
                .map(|f| c.compose(u2, u, v, f, inc))
                .collect::<Result<_, _>>()?;
            res.insert((u.clone(), u2.clone()), table);
        }
    }
    Ok(Presheaf::new(space, sections, res))
}

/// Category and dialect axioms. Associativity is exhaustive within the
/// budget and deterministically sampled beyond it.
pub fn check_pre_pseudogroup(
    c: &PrePseudogroup,
    dialect: Dialect,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    if dialect == Dialect::T1 && !c.space().is_t1() {
        return Err(PpgError::NotT1Space);
    }
    let mut checks = Vec::new();
    let opens = c.opens().to_vec();
    let space = c.space().clone();
    let ids = |s: &crate::bitset::IndexSet| space.external_ids(s);

    // Objects are exactly the opens — structural in this encoding.
    checks.push(Check::pass("objects_are_opens"));

    // Inclusion identities are two-sided units.
    let mut witness = None;
    'identity: for u in &opens {
        let id_u = c.incl(u, u)?;
        for v in &opens {
            for f in 0..c.hom_len(u, v) as MorId {
                if c.compose(u, u, v, f, id_u)? != f {
                    witness = Some(json!({ "open": ids(u), "side": "right" }));
                    break 'identity;
                }
            }
            if !v.is_subset(u) {
                continue;
            }
        }
        for w in &opens {
            let id_w = c.incl(w, w)?;
            for f in 0..c.hom_len(u, w) as MorId {
                if c.compose(u, w, w, id_w, f)? != f {
                    witness = Some(json!({ "open": ids(w), "side": "left" }));
                    break 'identity;
                }
            }
        }
    }
    checks.push(Check::of("identity_laws", witness.is_none(), witness));

    // Inclusions compose to inclusions.
    let mut witness = None;
    'incl: for u in &opens {
        for v in &opens {
            if !u.is_subset(v) {
                continue;
            }
            for w in &opens {
                if !v.is_subset(w) {
                    continue;
                }
                let via = c.compose(u, v, w, c.incl(v, w)?, c.incl(u, v)?)?;
                if via != c.incl(u, w)? {
                    witness = Some(json!({ "chain": [ids(u), ids(v), ids(w)] }));
                    break 'incl;
                }
            }
        }
    }
    checks.push(Check::of("inclusion_functoriality", witness.is_none(), witness));

    // Associativity.
    let mut total: usize = 0;
    for u in &opens {
        for v in &opens {
            let uv = c.hom_len(u, v);
            if uv == 0 {
                continue;
            }
            for w in &opens {
                let vw = c.hom_len(v, w);
                if vw == 0 {
                    continue;
                }
                for z in &opens {
                    total = total.saturating_add(uv * vw * c.hom_len(w, z));
                }
            }
        }
    }
    let exhaustive = total <= budgets.max_assoc_tuples;
    let mut witness = None;
    if exhaustive {
        'outer: for u in &opens {
            for v in &opens {
                for w in &opens {
                    for z in &opens {
                        for f in 0..c.hom_len(u, v) as MorId {
                            for g in 0..c.hom_len(v, w) as MorId {
                                for h in 0..c.hom_len(w, z) as MorId {
                                    let left = c.compose(u, w, z, h, c.compose(u, v, w, g, f)?)?;
                                    let right = c.compose(u, v, z, c.compose(v, w, z, h, g)?, f)?;
                                    if left != right {
                                        witness = Some(json!({
                                            "opens": [ids(u), ids(v), ids(w), ids(z)],
                                            "triple": [h, g, f],
                                        }));
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA55E55);
        let mut tried = 0usize;
        while tried < budgets.max_assoc_tuples {
            let u = &opens[rng.gen_range(0..opens.len())];
            let v = &opens[rng.gen_range(0..opens.len())];
            let w = &opens[rng.gen_range(0..opens.len())];
            let z = &opens[rng.gen_range(0..opens.len())];
            let (a, b, d) = (c.hom_len(u, v), c.hom_len(v, w), c.hom_len(w, z));
            if a == 0 || b == 0 || d == 0 {
                tried += 1;
                continue;
            }
            let f = rng.gen_range(0..a) as MorId;
            let g = rng.gen_range(0..b) as MorId;
            let h = rng.gen_range(0..d) as MorId;
            let left = c.compose(u, w, z, h, c.compose(u, v, w, g, f)?)?;
            let right = c.compose(u, v, z, c.compose(v, w, z, h, g)?, f)?;
            if left != right {
                witness = Some(json!({ "opens": [ids(u), ids(v), ids(w), ids(z)] }));
                break;
            }
            tried += 1;
        }
    }
    let assoc_name =
        if exhaustive { "associativity" } else { "associativity_sampled" };
    checks.push(Check::of(assoc_name, witness.is_none(), witness));

    match dialect {
        Dialect::T1 => {
            let decomposition = check_decomposition(c)?;
            checks.push(Check::of(
                "germ_decomposition",
                decomposition.holds(),
                Some(decomposition.witness()),
            ));
            match build_germ_category(c, Dialect::T1) {
                Ok((cat, report)) => {
                    checks.push(Check::of(
                        "germ_category_axioms",
                        report.associative && report.unital && report.well_defined,
                        report.witness.clone().map(|w| json!({ "witness": w })),
                    ));
                    checks.push(Check::of(
                        "germ_category_is_groupoid",
                        cat.is_groupoid(),
                        cat.inverse.iter().position(|i| i.is_none()).map(|fi| {
                            let a = &cat.arrows[fi];
                            json!({ "src": space.point(a.src).0, "tgt": space.point(a.tgt).0 })
                        }),
                    ));
                }
                Err(e) => {
                    checks.push(Check::fail(
                        "germ_category_is_groupoid",
                        json!({ "error": e.to_string() }),
                    ));
                }
            }
        }
        Dialect::NonT1 => {
            checks.extend(check_underlying_functor(c, budgets)?);
            match build_germ_category(c, Dialect::NonT1) {
                Ok((cat, report)) => {
                    checks.push(Check::of(
                        "germ_category_axioms",
                        report.associative && report.unital && report.well_defined,
                        report.witness.clone().map(|w| json!({ "witness": w })),
                    ));
                    checks.push(Check::of(
                        "germ_category_is_groupoid",
                        cat.is_groupoid(),
                        cat.inverse.iter().position(|i| i.is_none()).map(|fi| {
                            let a = &cat.arrows[fi];
                            json!({ "src": space.point(a.src).0, "tgt": space.point(a.tgt).0 })
                        }),
                    ));
                }
                Err(e) => {
                    checks.push(Check::fail(
                        "germ_category_is_groupoid",
                        json!({ "error": e.to_string() }),
                    ));
                }
            }
        }
    }
    Ok(checks)
}

/// NonT1 functor checks: every morphism has an underlying local
/// homeomorphism, functoriality holds, and inclusions map to set
/// inclusions.
fn check_underlying_functor(
    c: &PrePseudogroup,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    let mut checks = Vec::new();
    let opens = c.opens().to_vec();
    let space = c.space().clone();
    let ids = |s: &crate::bitset::IndexSet| space.external_ids(s);

    let mut missing = None;
    let mut not_lh = None;
    for u in &opens {
        for v in &opens {
            for f in 0..c.hom_len(u, v) as MorId {
                match c.intrinsic_underlying(u, v, f)? {
                    None => {
                        missing.get_or_insert(json!({ "hom": [ids(u), ids(v)], "id": f }));
                    }
                    Some(map) => {
                        if !map.is_local_homeo().ok {
                            not_lh.get_or_insert(json!({
                                "hom": [ids(u), ids(v)],
                                "mor": c.hom_label(u, v, f),
                            }));
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("underlying_maps_present", missing.is_none(), missing));
    checks.push(Check::of("underlying_maps_local_homeo", not_lh.is_none(), not_lh));

    // Inclusions go to set inclusions (the embedding of the open poset
    // composed with the functor is the inclusion functor).
    let mut witness = None;
    'incl: for u in &opens {
        for v in &opens {
            if !u.is_subset(v) {
                continue;
            }
            let inc = c.incl(u, v)?;
            if let Some(map) = c.intrinsic_underlying(u, v, inc)? {
                let uo = space.open_set(u.clone())?;
                let vo = space.open_set(v.clone())?;
                let expected = PointMap::inclusion(&uo, &vo).map_err(PpgError::Space)?;
                if map != expected {
                    witness = Some(json!({ "pair": [ids(u), ids(v)] }));
                    break 'incl;
                }
            }
        }
    }
    checks.push(Check::of("inclusion_underlying_is_inclusion", witness.is_none(), witness));

    // Functoriality of the underlying assignment, budgeted like
    // associativity.
    let mut witness = None;
    let mut count = 0usize;
    'func: for u in &opens {
        for v in &opens {
            for w in &opens {
                for f in 0..c.hom_len(u, v) as MorId {
                    for g in 0..c.hom_len(v, w) as MorId {
                        if count >= budgets.max_assoc_tuples {
                            break 'func;
                        }
                        count += 1;
                        let gf = c.compose(u, v, w, g, f)?;
                        let (mf, mg, mgf) = (
                            c.intrinsic_underlying(u, v, f)?,
                            c.intrinsic_underlying(v, w, g)?,
                            c.intrinsic_underlying(u, w, gf)?,
                        );
                        if let (Some(mf), Some(mg), Some(mgf)) = (mf, mg, mgf) {
                            let composed = mf.then(&mg).map_err(PpgError::Space)?;
                            if composed != mgf {
                                witness = Some(json!({
                                    "opens": [ids(u), ids(v), ids(w)],
                                    "pair": [g, f],
                                }));
                                break 'func;
                            }
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("underlying_functorial", witness.is_none(), witness));
    Ok(checks)
}

/// Underlying maps derived through germ classification (the T1 route):
/// totality, continuity, local-homeomorphism, and the functor laws. This is
/// the executable content of the continuity/local-homeomorphism claim for
/// underlying maps.
pub fn underlying_functor_laws(
    c: &PrePseudogroup,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    let opens = c.opens().to_vec();
    let space = c.space().clone();
    let ids = |s: &crate::bitset::IndexSet| space.external_ids(s);
    let mut checks = Vec::new();

    let mut bars: BTreeMap<(crate::bitset::IndexSet, crate::bitset::IndexSet), Vec<PointMap>> =
        BTreeMap::new();
    let mut total_witness = None;
    let mut cont_witness = None;
    let mut lh_witness = None;
    for u in &opens {
        for v in &opens {
            let mut maps = Vec::new();
            for f in 0..c.hom_len(u, v) as MorId {
                match super::germs::underlying_map(c, u, v, f) {
                    Ok(map) => {
                        if !map.check_continuous().continuous {
                            cont_witness.get_or_insert(json!({
                                "hom": [ids(u), ids(v)],
                                "mor": c.hom_label(u, v, f),
                            }));
                        }
                        if !map.is_local_homeo().ok {
                            lh_witness.get_or_insert(json!({
                                "hom": [ids(u), ids(v)],
                                "mor": c.hom_label(u, v, f),
                            }));
                        }
                        maps.push(map);
                    }
                    Err(e) => {
                        total_witness.get_or_insert(json!({
                            "hom": [ids(u), ids(v)],
                            "error": e.to_string(),
                        }));
                    }
                }
            }
            bars.insert((u.clone(), v.clone()), maps);
        }
    }
    checks.push(Check::of("underlying_total", total_witness.is_none(), total_witness));
    checks.push(Check::of("underlying_continuous", cont_witness.is_none(), cont_witness));
    checks.push(Check::of("underlying_local_homeo", lh_witness.is_none(), lh_witness));

    // Identity law: inclusions become set inclusions.
    let mut witness = None;
    for u in &opens {
        for v in &opens {
            if !u.is_subset(v) {
                continue;
            }
            let inc = c.incl(u, v)?;
            let uo = space.open_set(u.clone())?;
            let vo = space.open_set(v.clone())?;
            let expected = PointMap::inclusion(&uo, &vo).map_err(PpgError::Space)?;
            if bars[&(u.clone(), v.clone())].get(inc as usize) != Some(&expected) {
                witness.get_or_insert(json!({ "pair": [ids(u), ids(v)] }));
            }
        }
    }
    checks.push(Check::of("underlying_inclusion_law", witness.is_none(), witness));

    // Composition law, budgeted.
    let mut witness = None;
    let mut count = 0usize;
    'func: for u in &opens {
        for v in &opens {
            for w in &opens {
                for f in 0..c.hom_len(u, v) as MorId {
                    for g in 0..c.hom_len(v, w) as MorId {
                        if count >= budgets.max_assoc_tuples {
                            break 'func;
                        }
                        count += 1;
                        let gf = c.compose(u, v, w, g, f)?;
                        let composed = bars[&(u.clone(), v.clone())][f as usize]
                            .then(&bars[&(v.clone(), w.clone())][g as usize])
                            .map_err(PpgError::Space)?;
                        if composed != bars[&(u.clone(), w.clone())][gf as usize] {
                            witness = Some(json!({ "opens": [ids(u), ids(v), ids(w)] }));
                            break 'func;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of("underlying_composition_law", witness.is_none(), witness));
    Ok(checks)
}

/// Full pseudogroup-sheaf report: pre-pseudogroup conditions plus the sheaf
/// condition of every hom-presheaf.
pub fn is_pseudogroup_sheaf(
    c: &PrePseudogroup,
    dialect: Dialect,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    let mut checks = check_pre_pseudogroup(c, dialect, budgets)?;
    let space = c.space().clone();
    let mut presheaf_witness = None;
    let mut sheaf_witness = None;
    for v in c.opens().to_vec() {
        let p = hom_presheaf(c, &v)?;
        let report = p.check().map_err(PpgError::Space)?;
        if !report.is_clean() {
            presheaf_witness.get_or_insert(json!({
                "V": space.external_ids(&v),
                "violations": report.violations,
            }));
            continue;
        }
        let verdict = p
            .is_sheaf(CoverMode::Canonical, budgets)
            .map_err(|e| PpgError::Internal(e.to_string()))?;
        if !verdict.is_sheaf {
            sheaf_witness.get_or_insert(json!({
                "V": space.external_ids(&v),
                "failure": verdict.failure,
            }));
        }
    }
    checks.push(Check::of(
        "hom_presheaves_valid",
        presheaf_witness.is_none(),
        presheaf_witness,
    ));
    checks.push(Check::of(
        "hom_presheaves_are_sheaves",
        sheaf_witness.is_none(),
        sheaf_witness,
    ));
    Ok(checks)
}

/// The four defining conditions of a pseudogroup sheaf reported one by
/// one, regardless of which fail: objects are the opens, germ hom-sets
/// decompose as coproducts over targets, the germ category is a groupoid,
/// and every hom-presheaf is a sheaf. The germ category uses target
/// classification on T1 spaces and underlying maps otherwise.
pub fn def21_conditions(
    c: &PrePseudogroup,
    budgets: &Budgets,
) -> Result<Vec<Check>, PpgError> {
    let dialect = if c.space().is_t1() { Dialect::T1 } else { Dialect::NonT1 };
    let mut checks = vec![Check::pass("condition_1_objects_are_opens")];

    let decomposition = check_decomposition(c)?;
    checks.push(Check::of(
        "condition_2_germ_decomposition",
        decomposition.holds(),
        Some(decomposition.witness()),
    ));

    match build_germ_category(c, dialect) {
        Ok((cat, report)) => {
            let ok = cat.is_groupoid() && report.associative && report.unital && report.well_defined;
            checks.push(Check::of(
                "condition_3_germ_groupoid",
                ok,
                report.witness.map(|w| json!({ "witness": w })),
            ));
        }
        Err(e) => checks.push(Check::fail(
            "condition_3_germ_groupoid",
            json!({ "error": e.to_string() }),
        )),
    }

    let space = c.space().clone();
    let mut witness = None;
    for v in c.opens().to_vec() {
        let p = hom_presheaf(c, &v)?;
        let clean = p.check().map_err(PpgError::Space)?.is_clean();
        let verdict = clean
            && p.is_sheaf(CoverMode::Canonical, budgets)
                .map_err(|e| PpgError::Internal(e.to_string()))?
                .is_sheaf;
        if !verdict {
            witness.get_or_insert(json!({ "V": space.external_ids(&v) }));
        }
    }
    checks.push(Check::of("condition_4_hom_sheaves", witness.is_none(), witness));
    Ok(checks)
}

/// On a T1 space with intrinsic underlying data, the limit-style germ sets
/// (morphisms between minimal opens, embedded into `C_x(X)`) must coincide
/// with the target-filtered ones. Returns the first disagreement.
pub fn germ_sets_agree_across_dialects(c: &PrePseudogroup) -> Result<Option<String>, PpgError> {
    let space = c.space().clone();
    if !space.is_t1() {
        return Ok(None);
    }
    let full = space.full_set();
    for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        for y in 0..space.n_points() {
            let uy = space.min_open(y).clone();
            let mut limit_side: Vec<MorId> = Vec::new();
            for f in 0..c.hom_len(&ux, &uy) as MorId {
                limit_side.push(c.postcompose_incl(x, &uy, &full, f)?);
            }
            limit_side.sort_unstable();
            let mut filtered: Vec<MorId> = Vec::new();
            for f in 0..c.hom_len(&ux, &full) as MorId {
                if let Some(map) = c.intrinsic_underlying(&ux, &full, f)? {
                    let fx = space.index_of(map.apply(space.point(x)).map_err(PpgError::Space)?)?;
                    if fx == y {
                        filtered.push(f);
                    }
                } else {
                    return Ok(None);
                }
            }
            if limit_side != filtered {
                return Ok(Some(format!(
                    "germ sets differ at x={} y={}: limit {:?} vs filtered {:?}",
                    space.point(x),
                    space.point(y),
                    limit_side,
                    filtered
                )));
            }
        }
    }
    Ok(None)
}
