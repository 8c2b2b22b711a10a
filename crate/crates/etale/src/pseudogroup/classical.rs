//! Classical pseudogroups: sets of partial homeomorphisms between opens,
//! closed under composition, inverse, restriction and gluing. A concrete
//! pseudogroup sheaf (faithful underlying-map functor) yields one through
//! its invertible morphisms, and every classical pseudogroup produces a
//! concrete pseudogroup sheaf by viewing its elements into larger
//! codomains and sheafifying.

use super::germs::underlying_map;
use super::{Backend, MapsData, MorId, PpgError, PrePseudogroup};
use crate::bitset::IndexSet;
use crate::sheafify::ppg_sheafify;
use crate::budget::Budgets;
use crate::space::{all_point_maps, map_cmp, PointMap, Space};
use std::collections::{BTreeMap, BTreeSet};

/// A set of partial homeomorphisms; each element's codomain is exactly its
/// image.
pub struct ClassicalPseudogroup {
    pub space: Space,
    pub maps: Vec<PointMap>,
}

impl ClassicalPseudogroup {
    pub fn contains(&self, m: &PointMap) -> bool {
        self.maps.contains(m)
    }

    /// Closure and sheaf-property validation.
    pub fn validate(&self) -> Result<(), PpgError> {
        let space = &self.space;
        let err = |msg: String| Err(PpgError::NotAPseudogroup(msg));

        for m in &self.maps {
            if m.domain().space() != space || m.codomain().space() != space {
                return err("element lives on a different space".into());
            }
            if !m.is_injective() || m.image() != *m.codomain().set() {
                return err(format!("{m:?} is not a homeomorphism onto its codomain"));
            }
            if !m.check_continuous().continuous || !m.is_local_homeo().ok {
                return err(format!("{m:?} is not continuous with continuous inverse"));
            }
            if !self.contains(&invert(m)?) {
                return err(format!("inverse of {m:?} missing"));
            }
        }
        for u in space.opens()? {
            let id = PointMap::identity(&space.open_set(u.clone())?);
            if !self.contains(&id) {
                return err(format!("identity of {:?} missing", space.external_ids(u)));
            }
        }
        // Restriction closure.
        for m in &self.maps {
            for u in space.opens()? {
                if u.is_subset(m.domain().set()) && u != m.domain().set() {
                    let restricted = restrict_to_image(m, u, space)?;
                    if !self.contains(&restricted) {
                        return err(format!(
                            "restriction of {m:?} to {:?} missing",
                            space.external_ids(u)
                        ));
                    }
                }
            }
        }
        // Composition closure on the matched part of the domains.
        for f in &self.maps {
            for g in &self.maps {
                let overlap = f.image().intersect(g.domain().set());
                let mut pre = space.empty_set();
                for (x, fx) in f.graph() {
                    if overlap.contains(fx) {
                        pre.insert(x);
                    }
                }
                // The preimage of an open under a homeomorphism is open.
                let f_part = restrict_to_image(f, &pre, space)?;
                let g_part = restrict_to_image(g, f_part.codomain().set(), space)?;
                let composed = f_part.then(&g_part).map_err(PpgError::Space)?;
                if !self.contains(&composed) {
                    return err(format!("composite of {f:?} and {g:?} missing"));
                }
            }
        }
        // Gluing: a homeomorphism whose restrictions to the canonical cover
        // of its domain all belong to the set must itself belong.
        for u in space.opens()? {
            for v in space.opens()? {
                let uo = space.open_set(u.clone())?;
                let vo = space.open_set(v.clone())?;
                for cand in all_point_maps(&uo, &vo) {
                    if !cand.is_injective()
                        || cand.image() != *v
                        || !cand.check_continuous().continuous
                        || !cand.is_local_homeo().ok
                    {
                        continue;
                    }
                    let member = self.contains(&cand);
                    let pieces_in = space.canonical_cover(u).iter().all(|m| {
                        restrict_to_image(&cand, m, space)
                            .map(|piece| self.contains(&piece))
                            .unwrap_or(false)
                    });
                    if member != pieces_in {
                        return err(format!(
                            "gluing property fails for {cand:?}: member={member}, pieces={pieces_in}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn invert(m: &PointMap) -> Result<PointMap, PpgError> {
    let mut assign = BTreeMap::new();
    for (x, fx) in m.graph() {
        assign.insert(m.codomain().space().point(fx), m.domain().space().point(x));
    }
    PointMap::new(m.codomain().clone(), m.domain().clone(), &assign).map_err(PpgError::Space)
}

fn restrict_to_image(m: &PointMap, u: &IndexSet, space: &Space) -> Result<PointMap, PpgError> {
    let uo = space.open_set(u.clone()).map_err(PpgError::Space)?;
    let restricted = m.restrict(&uo).map_err(PpgError::Space)?;
    let image = restricted.image();
    let image_open = space.open_set(image).map_err(PpgError::Space)?;
    restricted.narrow_codomain(&image_open).map_err(PpgError::Space)
}

/// Whether the underlying-map functor is faithful: distinct morphisms in
/// each hom-set must have distinct underlying maps.
pub fn is_concrete(c: &PrePseudogroup) -> Result<bool, PpgError> {
    for u in c.opens().to_vec() {
        for v in c.opens().to_vec() {
            let mut seen: BTreeSet<String> = BTreeSet::new();
            for f in 0..c.hom_len(&u, &v) as MorId {
                let bar = underlying_map(c, &u, &v, f)?;
                if !seen.insert(format!("{bar:?}")) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The underlying maps of the invertible morphisms of a concrete
/// pseudogroup sheaf, normalized onto their images. Fails with
/// `NotConcrete` when the underlying-map functor is not faithful.
pub fn classical_pseudogroup(
    c: &PrePseudogroup,
    _budgets: &Budgets,
) -> Result<ClassicalPseudogroup, PpgError> {
    let space = c.space().clone();
    let opens = c.opens().to_vec();
    // Faithfulness first.
    let mut bars: BTreeMap<(IndexSet, IndexSet), Vec<PointMap>> = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let mut list = Vec::new();
            for f in 0..c.hom_len(u, v) as MorId {
                list.push(underlying_map(c, u, v, f)?);
            }
            let distinct: BTreeSet<_> = list.iter().map(|m| format!("{m:?}")).collect();
            if distinct.len() != list.len() {
                return Err(PpgError::NotConcrete);
            }
            bars.insert((u.clone(), v.clone()), list);
        }
    }
    let mut maps: Vec<PointMap> = Vec::new();
    for u in &opens {
        for v in &opens {
            for f in 0..c.hom_len(u, v) as MorId {
                let invertible = (0..c.hom_len(v, u) as MorId).any(|g| {
                    c.compose(u, v, u, g, f).ok() == c.incl(u, u).ok()
                        && c.compose(v, u, v, f, g).ok() == c.incl(v, v).ok()
                });
                if invertible {
                    let bar = &bars[&(u.clone(), v.clone())][f as usize];
                    if !maps.contains(bar) {
                        maps.push(bar.clone());
                    }
                }
            }
        }
    }
    maps.sort_by(map_cmp);
    let result = ClassicalPseudogroup { space, maps };
    result.validate()?;
    Ok(result)
}

/// Builds the concrete pre-pseudogroup of a classical pseudogroup — the
/// elements with domain `U` and image inside `V` form `hom(U, V)` — and
/// sheafifies it.
pub fn classical_to_concrete(
    h: &ClassicalPseudogroup,
    budgets: &Budgets,
) -> Result<PrePseudogroup, PpgError> {
    h.validate()?;
    let space = h.space.clone();
    let opens = space.opens()?.to_vec();
    let mut maps = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let vo = space.open_set(v.clone())?;
            let mut list: Vec<PointMap> = h
                .maps
                .iter()
                .filter(|m| m.domain().set() == u && m.image().is_subset(v))
                .map(|m| m.widen_codomain(&vo).map_err(PpgError::Space))
                .collect::<Result<_, _>>()?;
            list.sort_by(map_cmp);
            labels.insert(
                (u.clone(), v.clone()),
                list.iter().map(|m| format!("{m:?}")).collect::<Vec<String>>(),
            );
            maps.insert((u.clone(), v.clone()), list);
        }
    }
    let raw =
        PrePseudogroup::from_backend(space, labels, Backend::Maps(MapsData { maps }))?;
    let sheafified = ppg_sheafify(&raw, budgets)?;
    Ok(sheafified.hat)
}
