//! The topological groupoid of a pseudogroup sheaf: arrows are the germs
//! of morphisms into the whole space, topologized as the etale space of
//! the hom-presheaf `C(-, X)`; source is the germ projection, target is
//! the germ's classified (or underlying) image point, composition lifts
//! the first germ to a representative between minimal opens and composes
//! in the category.

use super::TopGroupoid;
use crate::bitset::IndexSet;
use crate::presheaf::{etale_space, EtaleBundle};
use crate::pseudogroup::{hom_presheaf, Dialect, MorId, PpgError, PrePseudogroup};
use crate::sheafify::PpgMorphism;
use crate::space::PointMap;
use serde_json::json;
use std::collections::BTreeMap;

/// Public view of the classified target of a top-level germ.
pub fn arrow_target_of(
    c: &PrePseudogroup,
    dialect: Dialect,
    x: usize,
    f: MorId,
) -> Result<usize, PpgError> {
    arrow_target(c, dialect, x, f)
}

pub struct GroupoidFromPpg {
    pub groupoid: TopGroupoid,
    /// Germ per arrow index: `(base point index, id in hom(U_x, X))`.
    pub germs: Vec<(usize, MorId)>,
    pub germ_index: BTreeMap<(usize, MorId), usize>,
    /// Basic opens of the arrow topology, for reports and graph export.
    pub basics: Vec<(IndexSet, String)>,
}

/// Composition of top-level germs: `f` at `x` with classified target `y`,
/// `g ∈ hom(U_y, X)`. The first germ is lifted to a representative in
/// `hom(U_x, U_y)`; under the T1 dialect the decomposition makes the lift
/// unique, under the nonT1 dialect every lift must give the same result.
pub(crate) fn arrow_compose(
    c: &PrePseudogroup,
    dialect: Dialect,
    x: usize,
    f: MorId,
    y: usize,
    g: MorId,
) -> Result<MorId, PpgError> {
    let space = c.space();
    let full = space.full_set();
    let (ux, uy) = (space.min_open(x).clone(), space.min_open(y).clone());
    match dialect {
        Dialect::T1 => {
            let (y2, lift) = c.classify_germ(x, &full, f)?;
            if y2 != y {
                return Err(PpgError::IllDefinedComposition(format!(
                    "germ classifies to {} but was composed at {}",
                    space.point(y2),
                    space.point(y)
                )));
            }
            c.compose(&ux, &uy, &full, g, lift)
        }
        Dialect::NonT1 => {
            let lifts: Vec<MorId> = (0..c.hom_len(&ux, &uy) as MorId)
                .filter_map(|l| match c.postcompose_incl(x, &uy, &full, l) {
                    Ok(img) if img == f => Some(Ok(l)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<_, _>>()?;
            if lifts.is_empty() {
                return Err(PpgError::IllDefinedComposition(format!(
                    "no representative of germ `{}` into {:?}",
                    c.hom_label(&ux, &full, f),
                    space.external_ids(&uy)
                )));
            }
            let composites: Vec<MorId> = lifts
                .iter()
                .map(|&l| c.compose(&ux, &uy, &full, g, l))
                .collect::<Result<_, _>>()?;
            if composites.windows(2).any(|w| w[0] != w[1]) {
                return Err(PpgError::IllDefinedComposition(
                    "composite depends on the chosen lift".into(),
                ));
            }
            Ok(composites[0])
        }
    }
}

/// Target point of a top-level germ under the given dialect.
pub(crate) fn arrow_target(
    c: &PrePseudogroup,
    dialect: Dialect,
    x: usize,
    f: MorId,
) -> Result<usize, PpgError> {
    let space = c.space();
    let full = space.full_set();
    match dialect {
        Dialect::T1 => Ok(c.classify_germ(x, &full, f)?.0),
        Dialect::NonT1 => {
            let ux = space.min_open(x).clone();
            let map = c
                .intrinsic_underlying(&ux, &full, f)?
                .ok_or_else(|| PpgError::Internal("nonT1 dialect needs underlying maps".into()))?;
            let p = map.apply(space.point(x)).map_err(PpgError::Space)?;
            Ok(space.index_of(p)?)
        }
    }
}

pub fn groupoid_from_pseudogroup(
    c: &PrePseudogroup,
    dialect: Dialect,
) -> Result<GroupoidFromPpg, PpgError> {
    let space = c.space().clone();
    let full = space.full_set();
    let presheaf = hom_presheaf(c, &full)?;
    let bundle: EtaleBundle = etale_space(&presheaf).map_err(PpgError::Space)?;
    let germs = bundle.germs.clone();
    let germ_index = bundle.germ_index.clone();
    let n = germs.len();

    let s: Vec<usize> = germs.iter().map(|&(x, _)| x).collect();
    let mut t = Vec::with_capacity(n);
    for &(x, f) in &germs {
        t.push(arrow_target(c, dialect, x, f)?);
    }
    let mut i = Vec::with_capacity(space.n_points());
    for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        let id_germ = c.incl(&ux, &full)?;
        i.push(germ_index[&(x, id_germ)]);
    }

    let mut comp = BTreeMap::new();
    for (fi, &(x, f)) in germs.iter().enumerate() {
        let y = t[fi];
        for (gi, &(y2, g)) in germs.iter().enumerate() {
            if y2 != y {
                continue;
            }
            let h = arrow_compose(c, dialect, x, f, y, g)?;
            comp.insert((gi, fi), germ_index[&(x, h)]);
        }
    }

    let mut inv = Vec::with_capacity(n);
    for (fi, &(x, f)) in germs.iter().enumerate() {
        let y = t[fi];
        let candidate = germs
            .iter()
            .enumerate()
            .find(|&(gi, &(y2, _))| {
                y2 == y
                    && t[gi] == x
                    && comp.get(&(gi, fi)) == Some(&i[x])
                    && comp.get(&(fi, gi)) == Some(&i[y])
            })
            .map(|(gi, _)| gi);
        match candidate {
            Some(gi) => inv.push(gi),
            None => {
                let ux = space.min_open(x).clone();
                return Err(PpgError::NotAGroupoid {
                    x: space.point(x).0,
                    y: space.point(y).0,
                    arrow: c.hom_label(&ux, &full, f),
                });
            }
        }
    }

    let groupoid =
        TopGroupoid::from_indices(space, bundle.total.clone(), s, t, i, inv, comp);
    Ok(GroupoidFromPpg { groupoid, germs, germ_index, basics: bundle.basics })
}

pub struct TransportedFunctor {
    pub arrow_map: Vec<usize>,
    pub checks: Vec<crate::report::Check>,
}

/// Transports a morphism of pseudogroup sheaves to a continuous functor
/// between their groupoids, germ by germ, and verifies functoriality and
/// continuity.
pub fn transport_morphism(
    phi: &PpgMorphism,
    c: &PrePseudogroup,
    c_gpd: &GroupoidFromPpg,
    d_gpd: &GroupoidFromPpg,
) -> Result<TransportedFunctor, PpgError> {
    use crate::report::Check;
    let space = c.space().clone();
    let full = space.full_set();
    let mut arrow_map = Vec::with_capacity(c_gpd.germs.len());
    for &(x, f) in &c_gpd.germs {
        let ux = space.min_open(x).clone();
        let image = phi.apply(&ux, &full, f);
        arrow_map.push(*d_gpd
            .germ_index
            .get(&(x, image))
            .ok_or_else(|| PpgError::Internal("transported germ missing".into()))?);
    }
    let mut checks = Vec::new();
    let map = PointMap::from_indices(
        c_gpd.groupoid.arrows.full_open(),
        d_gpd.groupoid.arrows.full_open(),
        arrow_map.iter().map(|&a| a as u32).collect(),
    );
    let cont = map.check_continuous();
    checks.push(Check::of(
        "transport_continuous",
        cont.continuous,
        cont.witness.map(|w| json!({ "open": w.point_ids() })),
    ));
    let g = &c_gpd.groupoid;
    let h = &d_gpd.groupoid;
    let s_ok = (0..g.n_arrows()).all(|a| h.source_of(arrow_map[a]) == g.source_of(a));
    let t_ok = (0..g.n_arrows()).all(|a| h.target_of(arrow_map[a]) == g.target_of(a));
    checks.push(Check::of("transport_preserves_s", s_ok, None));
    checks.push(Check::of("transport_preserves_t", t_ok, None));
    let i_ok =
        (0..g.base.n_points()).all(|x| arrow_map[g.identity_of(x)] == h.identity_of(x));
    checks.push(Check::of("transport_preserves_i", i_ok, None));
    let inv_ok = (0..g.n_arrows()).all(|a| arrow_map[g.inverse_of(a)] == h.inverse_of(arrow_map[a]));
    checks.push(Check::of("transport_preserves_inv", inv_ok, None));
    let comp_ok = g.composable_pairs().into_iter().all(|(a, b)| {
        match (g.compose(a, b), h.compose(arrow_map[a], arrow_map[b])) {
            (Some(ab), Some(hab)) => arrow_map[ab] == hab,
            _ => false,
        }
    });
    checks.push(Check::of("transport_preserves_comp", comp_ok, None));
    Ok(TransportedFunctor { arrow_map, checks })
}
