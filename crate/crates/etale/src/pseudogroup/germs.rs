//! Germ hom-sets, the germ category/groupoid, and underlying maps.
//!
//! Germ hom-sets are attained at minimal opens: the germs of morphisms into
//! `V` at `x` are the morphisms `hom(U_x, V)`, and the target-classified
//! germ set from `x` to `y` is realized as `hom(U_x, U_y)` with its
//! embedding into every `hom(U_x, V)`, `V ∋ y`, by post-composition with
//! inclusions. A literal inverse-limit oracle (compatible families over all
//! neighborhoods of the target) cross-checks the realization.

use super::{Dialect, MorId, PpgError, PrePseudogroup};
use crate::bitset::IndexSet;
use crate::space::{PointMap};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    /// First injectivity failure `(x, V, y)`.
    pub injectivity: Option<(u32, Vec<u32>, u32)>,
    /// First overlap `(x, V, germ, y1, y2)`.
    pub overlap: Option<(u32, Vec<u32>, String, u32, u32)>,
    /// First orphaned germ `(x, V, germ)`.
    pub orphan: Option<(u32, Vec<u32>, String)>,
}

impl DecompositionReport {
    pub fn holds(&self) -> bool {
        self.injectivity.is_none() && self.overlap.is_none() && self.orphan.is_none()
    }

    pub fn witness(&self) -> serde_json::Value {
        json!({
            "injectivity": self.injectivity,
            "overlap": self.overlap,
            "orphan": self.orphan,
        })
    }
}

/// The coproduct decomposition of germ hom-sets: for every point `x` and
/// open `V`, the embeddings of the target-classified germ sets over `y ∈ V`
/// must be injective, pairwise disjoint, and jointly exhaustive.
pub fn check_decomposition(c: &PrePseudogroup) -> Result<DecompositionReport, PpgError> {
    let space = c.space().clone();
    let mut report = DecompositionReport { injectivity: None, overlap: None, orphan: None };
    for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        for v in c.opens().to_vec() {
            let n = c.hom_len(&ux, &v);
            let mut hit: Vec<Option<usize>> = vec![None; n];
            for y in v.iter() {
                let uy = space.min_open(y).clone();
                let mut seen = vec![false; n];
                for f in 0..c.hom_len(&ux, &uy) as MorId {
                    let image = c.postcompose_incl(x, &uy, &v, f)? as usize;
                    if seen[image] {
                        report.injectivity.get_or_insert((
                            space.point(x).0,
                            space.external_ids(&v),
                            space.point(y).0,
                        ));
                    }
                    seen[image] = true;
                    match hit[image] {
                        None => hit[image] = Some(y),
                        Some(y0) if y0 != y => {
                            report.overlap.get_or_insert((
                                space.point(x).0,
                                space.external_ids(&v),
                                c.hom_label(&ux, &v, image as MorId),
                                space.point(y0).0,
                                space.point(y).0,
                            ));
                        }
                        _ => {
                            // Same y twice is the injectivity failure above.
                        }
                    }
                }
            }
            if let Some(orphan) = hit.iter().position(|h| h.is_none()) {
                report.orphan.get_or_insert((
                    space.point(x).0,
                    space.external_ids(&v),
                    c.hom_label(&ux, &v, orphan as MorId),
                ));
            }
        }
    }
    Ok(report)
}

/// Literal inverse-limit realization of the target-classified germ set:
/// compatible families `(a_V ∈ hom(U_x, V))_{V ∋ y}` under post-composition
/// with inclusions. Returns the families; each is indexed by the opens
/// containing `y` in canonical order.
pub fn germ_target_hom_oracle(
    c: &PrePseudogroup,
    x: usize,
    y: usize,
) -> Result<Vec<Vec<MorId>>, PpgError> {
    let space = c.space().clone();
    let ux = space.min_open(x).clone();
    let neighborhoods: Vec<IndexSet> =
        c.opens().iter().filter(|v| v.contains(y)).cloned().collect();
    let mut families: Vec<Vec<MorId>> = vec![Vec::new()];
    for (i, v) in neighborhoods.iter().enumerate() {
        let mut next = Vec::new();
        for family in &families {
            'candidate: for f in 0..c.hom_len(&ux, v) as MorId {
                // Compatible with every already-chosen component.
                for (j, w) in neighborhoods.iter().enumerate().take(i) {
                    if w.is_subset(v) {
                        // component at w must map to f under ι_{w → v}
                        if c.postcompose_incl(x, w, v, family[j])? != f {
                            continue 'candidate;
                        }
                    }
                    if v.is_subset(w) && c.postcompose_incl(x, v, w, f)? != family[j] {
                        continue 'candidate;
                    }
                }
                let mut extended = family.clone();
                extended.push(f);
                next.push(extended);
            }
        }
        families = next;
    }
    Ok(families)
}

/// An arrow of the germ category: a morphism between minimal opens for the
/// T1 realization, or a germ of `hom(U_x, X)` filtered by its underlying
/// target for the nonT1 dialect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermArrow {
    pub src: usize,
    pub tgt: usize,
    pub mor: MorId,
}

/// The germ category with objects the points of the space. Composition is
/// computed at minimal opens; whether every arrow is invertible is what
/// distinguishes a groupoid.
pub struct GermGroupoid {
    pub dialect: Dialect,
    pub arrows: Vec<GermArrow>,
    pub by_pair: BTreeMap<(usize, usize), Vec<usize>>,
    pub comp: BTreeMap<(usize, usize), usize>,
    pub identity_at: Vec<usize>,
    pub inverse: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub struct GermCategoryReport {
    pub associative: bool,
    pub unital: bool,
    pub well_defined: bool,
    pub witness: Option<String>,
}

impl GermGroupoid {
    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        self.by_pair.get(&(x, y)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn is_groupoid(&self) -> bool {
        self.inverse.iter().all(|i| i.is_some())
    }
}

/// Builds the germ category of a pre-pseudogroup under the given dialect,
/// together with a report on the category axioms (checked even when the
/// invertibility condition fails).
pub fn build_germ_category(
    c: &PrePseudogroup,
    dialect: Dialect,
) -> Result<(GermGroupoid, GermCategoryReport), PpgError> {
    let space = c.space().clone();
    let n = space.n_points();
    if dialect == Dialect::T1 && !space.is_t1() {
        return Err(PpgError::NotT1Space);
    }

    let mut arrows = Vec::new();
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    match dialect {
        Dialect::T1 => {
            for x in 0..n {
                for y in 0..n {
                    let (ux, uy) = (space.min_open(x).clone(), space.min_open(y).clone());
                    for f in 0..c.hom_len(&ux, &uy) as MorId {
                        by_pair.entry((x, y)).or_default().push(arrows.len());
                        arrows.push(GermArrow { src: x, tgt: y, mor: f });
                    }
                }
            }
        }
        Dialect::NonT1 => {
            let full = space.full_set();
            for x in 0..n {
                let ux = space.min_open(x).clone();
                for f in 0..c.hom_len(&ux, &full) as MorId {
                    let map = c
                        .intrinsic_underlying(&ux, &full, f)?
                        .ok_or_else(|| PpgError::Internal("nonT1 dialect needs underlying maps".into()))?;
                    let y = space.index_of(map.apply(space.point(x)).map_err(PpgError::Space)?)?;
                    by_pair.entry((x, y)).or_default().push(arrows.len());
                    arrows.push(GermArrow { src: x, tgt: y, mor: f });
                }
            }
        }
    }

    // Identities: the germ of the inclusion.
    let mut identity_at = Vec::with_capacity(n);
    for x in 0..n {
        let ux = space.min_open(x).clone();
        let id_mor = match dialect {
            Dialect::T1 => c.incl(&ux, &ux)?,
            Dialect::NonT1 => c.incl(&ux, &space.full_set())?,
        };
        let idx = arrows
            .iter()
            .position(|a| a.src == x && a.tgt == x && a.mor == id_mor)
            .ok_or_else(|| PpgError::Internal("identity germ not among arrows".into()))?;
        identity_at.push(idx);
    }

    // Composition.
    let mut comp = BTreeMap::new();
    let mut well_defined = true;
    let mut witness = None;
    for (fi, f) in arrows.iter().enumerate() {
        for (gi, g) in arrows.iter().enumerate() {
            if g.src != f.tgt {
                continue;
            }
            match germ_compose(c, dialect, f, g) {
                Ok(mor) => {
                    let hi = arrows
                        .iter()
                        .position(|a| a.src == f.src && a.tgt == g.tgt && a.mor == mor)
                        .ok_or_else(|| PpgError::Internal("composite germ missing".into()))?;
                    comp.insert((gi, fi), hi);
                }
                Err(PpgError::IllDefinedComposition(msg)) => {
                    well_defined = false;
                    witness.get_or_insert(msg);
                }
                Err(e) => return Err(e),
            }
        }
    }

    // Category axioms.
    let mut unital = true;
    for (fi, f) in arrows.iter().enumerate() {
        let left = comp.get(&(identity_at[f.tgt], fi));
        let right = comp.get(&(fi, identity_at[f.src]));
        if left != Some(&fi) || right != Some(&fi) {
            unital = false;
            witness.get_or_insert(format!("unit law fails on arrow {fi}"));
        }
    }
    let mut associative = true;
    'assoc: for (fi, f) in arrows.iter().enumerate() {
        for (gi, g) in arrows.iter().enumerate() {
            if g.src != f.tgt {
                continue;
            }
            for (hi, h) in arrows.iter().enumerate() {
                if h.src != g.tgt {
                    continue;
                }
                let left = comp.get(&(gi, fi)).and_then(|gf| comp.get(&(hi, *gf)));
                let right = comp.get(&(hi, gi)).and_then(|hg| comp.get(&(*hg, fi)));
                if left != right || left.is_none() {
                    associative = false;
                    witness.get_or_insert(format!("associativity fails on ({hi},{gi},{fi})"));
                    break 'assoc;
                }
            }
        }
    }

    // Inverses.
    let inverse: Vec<Option<usize>> = arrows
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            by_pair.get(&(f.tgt, f.src)).and_then(|candidates| {
                candidates
                    .iter()
                    .copied()
                    .find(|&gi| {
                        comp.get(&(gi, fi)) == Some(&identity_at[f.src])
                            && comp.get(&(fi, gi)) == Some(&identity_at[f.tgt])
                    })
            })
        })
        .collect();

    let report = GermCategoryReport { associative, unital, well_defined, witness };
    Ok((GermGroupoid { dialect, arrows, by_pair, comp, identity_at, inverse }, report))
}

/// Builds the germ groupoid, failing with a witness if some arrow has no
/// two-sided inverse.
pub fn build_germ_groupoid(
    c: &PrePseudogroup,
    dialect: Dialect,
) -> Result<GermGroupoid, PpgError> {
    let (cat, report) = build_germ_category(c, dialect)?;
    if !report.well_defined {
        return Err(PpgError::IllDefinedComposition(report.witness.unwrap_or_default()));
    }
    if let Some(fi) = cat.inverse.iter().position(|i| i.is_none()) {
        let a = &cat.arrows[fi];
        let space = c.space();
        let label = match dialect {
            Dialect::T1 => c.hom_label(space.min_open(a.src), space.min_open(a.tgt), a.mor),
            Dialect::NonT1 => c.hom_label(space.min_open(a.src), &space.full_set(), a.mor),
        };
        return Err(PpgError::NotAGroupoid {
            x: space.point(a.src).0,
            y: space.point(a.tgt).0,
            arrow: label,
        });
    }
    Ok(cat)
}

/// Germ composition. T1: both arrows are morphisms between minimal opens
/// and compose directly. NonT1: the first arrow is lifted along the
/// embedding `hom(U_x, U_y) → hom(U_x, X)`; a lift must exist and all lifts
/// must give the same composite.
fn germ_compose(
    c: &PrePseudogroup,
    dialect: Dialect,
    f: &GermArrow,
    g: &GermArrow,
) -> Result<MorId, PpgError> {
    let space = c.space();
    let (ux, uy) = (space.min_open(f.src).clone(), space.min_open(f.tgt).clone());
    match dialect {
        Dialect::T1 => {
            let uz = space.min_open(g.tgt).clone();
            c.compose(&ux, &uy, &uz, g.mor, f.mor)
        }
        Dialect::NonT1 => {
            let full = space.full_set();
            let lifts: Vec<MorId> = (0..c.hom_len(&ux, &uy) as MorId)
                .filter_map(|l| match c.postcompose_incl(f.src, &uy, &full, l) {
                    Ok(img) if img == f.mor => Some(Ok(l)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<_, _>>()?;
            if lifts.is_empty() {
                return Err(PpgError::IllDefinedComposition(format!(
                    "germ `{}` at {} has no representative into {:?}",
                    c.hom_label(&ux, &full, f.mor),
                    space.point(f.src),
                    space.external_ids(&uy),
                )));
            }
            let composites: Vec<MorId> = lifts
                .iter()
                .map(|&l| c.compose(&ux, &uy, &full, g.mor, l))
                .collect::<Result<_, _>>()?;
            if composites.windows(2).any(|w| w[0] != w[1]) {
                return Err(PpgError::IllDefinedComposition(format!(
                    "germ composition at {} depends on the lift",
                    space.point(f.src)
                )));
            }
            Ok(composites[0])
        }
    }
}

/// The underlying map of a morphism under the T1 dialect: each point goes
/// to the unique target its germ classifies to. Fails with the
/// decomposition witness when classification is ambiguous.
pub fn underlying_map(
    c: &PrePseudogroup,
    u: &IndexSet,
    v: &IndexSet,
    f: MorId,
) -> Result<PointMap, PpgError> {
    let space = c.space().clone();
    let dom = space.open_set(u.clone())?;
    let cod = space.open_set(v.clone())?;
    let mut assign = BTreeMap::new();
    for x in u.iter() {
        let ux = space.min_open(x).clone();
        let inc = c.incl(&ux, u)?;
        let germ = c.compose(&ux, u, v, f, inc)?;
        let (y, _) = c.classify_germ(x, v, germ)?;
        assign.insert(space.point(x), space.point(y));
    }
    PointMap::new(dom, cod, &assign).map_err(PpgError::Space)
}

/// Representative independence of germ composition: composing germs of
/// arbitrary representatives through arbitrary ambient opens agrees with
/// the composite's own germ. This is the executable content of the
/// coproduct-distribution step used by germ-family composition.
pub fn check_germ_functoriality(c: &PrePseudogroup) -> Result<Option<String>, PpgError> {
    let space = c.space().clone();
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            for w in c.opens().to_vec() {
                for f in 0..c.hom_len(&u, &v) as MorId {
                    for g in 0..c.hom_len(&v, &w) as MorId {
                        let gf = c.compose(&u, &v, &w, g, f)?;
                        for x in u.iter() {
                            let ux = space.min_open(x).clone();
                            let inc_u = c.incl(&ux, &u)?;
                            let germ_f = c.compose(&ux, &u, &v, f, inc_u)?;
                            let (y, lift) = match c.classify_germ(x, &v, germ_f) {
                                Ok(r) => r,
                                Err(PpgError::DecompositionViolated { .. }) => continue,
                                Err(e) => return Err(e),
                            };
                            let uy = space.min_open(y).clone();
                            let inc_v = c.incl(&uy, &v)?;
                            let germ_g = c.compose(&uy, &v, &w, g, inc_v)?;
                            let composed = c.compose(&ux, &uy, &w, germ_g, lift)?;
                            let direct = c.compose(&ux, &u, &w, gf, inc_u)?;
                            if composed != direct {
                                return Ok(Some(format!(
                                    "germ of composite differs at x={} for ({:?},{:?},{:?})",
                                    space.point(x),
                                    space.external_ids(&u),
                                    space.external_ids(&v),
                                    space.external_ids(&w),
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
