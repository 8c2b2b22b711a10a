//! Open sets and point maps between them.
//!
//! A `PointMap` is a total function from an open of one space to an open of
//! another, both carrying the subspace topology. Since an open subspace of a
//! finite space keeps the ambient minimal opens, continuity reduces to
//! preservation of specialization; the extensional definition (preimages of
//! relatively open sets are relatively open) is kept as a separate oracle
//! and the two are checked against each other in the tests.

use super::{lex_cmp, Point, Space, SpaceError};
use crate::bitset::IndexSet;
use std::collections::BTreeMap;
use std::fmt;

/// An open subset of a specific space.
#[derive(Clone, PartialEq, Eq)]
pub struct OpenSet {
    space: Space,
    set: IndexSet,
}

impl OpenSet {
    pub(crate) fn new_unchecked(space: Space, set: IndexSet) -> Self {
        debug_assert!(space.is_open(&set));
        OpenSet { space, set }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn contains(&self, p: Point) -> bool {
        self.space.index_of(p).map(|i| self.set.contains(i)).unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.set.iter().map(|i| self.space.point(i)).collect()
    }

    pub fn point_ids(&self) -> Vec<u32> {
        self.space.external_ids(&self.set)
    }
}

impl fmt::Debug for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O{:?}", self.point_ids())
    }
}

/// Outcome of a continuity check; on failure carries a relatively open
/// subset of the codomain whose preimage is not relatively open.
#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub continuous: bool,
    pub witness: Option<OpenSet>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LocalHomeoReason {
    NotContinuous,
    NotInjectiveOnMinimalOpen,
    ImageOfMinimalOpenNotOpen,
    InverseNotContinuous,
}

#[derive(Clone, Debug)]
pub struct LocalHomeoFailure {
    pub point: Point,
    pub reason: LocalHomeoReason,
}

#[derive(Clone, Debug)]
pub struct LocalHomeoReport {
    pub ok: bool,
    pub failures: Vec<LocalHomeoFailure>,
}

/// A total map between open sets of (possibly different) spaces.
#[derive(Clone, PartialEq, Eq)]
pub struct PointMap {
    dom: OpenSet,
    cod: OpenSet,
    /// Codomain-space point index per domain point, aligned with the
    /// ascending indices of the domain set.
    vals: Vec<u32>,
}

impl PointMap {
    pub fn new(
        dom: OpenSet,
        cod: OpenSet,
        assignment: &BTreeMap<Point, Point>,
    ) -> Result<PointMap, SpaceError> {
        let mut vals = Vec::with_capacity(dom.len());
        for i in dom.set.iter() {
            let p = dom.space.point(i);
            let q = *assignment.get(&p).ok_or(SpaceError::UnknownPoint(p.0))?;
            let qi = cod.space.index_of(q)?;
            if !cod.set.contains(qi) {
                return Err(SpaceError::UnknownPoint(q.0));
            }
            vals.push(qi as u32);
        }
        Ok(PointMap { dom, cod, vals })
    }

    /// Builds from codomain-space indices aligned with the domain set.
    pub(crate) fn from_indices(dom: OpenSet, cod: OpenSet, vals: Vec<u32>) -> PointMap {
        debug_assert_eq!(vals.len(), dom.len());
        debug_assert!(vals.iter().all(|&v| cod.set.contains(v as usize)));
        PointMap { dom, cod, vals }
    }

    pub fn identity(open: &OpenSet) -> PointMap {
        let vals = open.set.iter().map(|i| i as u32).collect();
        PointMap { dom: open.clone(), cod: open.clone(), vals }
    }

    /// The inclusion of `u` into a larger open `v` of the same space.
    pub fn inclusion(u: &OpenSet, v: &OpenSet) -> Result<PointMap, SpaceError> {
        if u.space != v.space {
            return Err(SpaceError::SpaceMismatch);
        }
        if !u.set.is_subset(&v.set) {
            return Err(SpaceError::NonOpenSubset(u.point_ids()));
        }
        let vals = u.set.iter().map(|i| i as u32).collect();
        Ok(PointMap { dom: u.clone(), cod: v.clone(), vals })
    }

    pub fn domain(&self) -> &OpenSet {
        &self.dom
    }

    pub fn codomain(&self) -> &OpenSet {
        &self.cod
    }

    /// Value on a domain-space point index.
    pub fn apply_index(&self, i: usize) -> usize {
        let pos = self.dom.set.indices().iter().position(|&x| x == i).expect("not in domain");
        self.vals[pos] as usize
    }

    pub fn apply(&self, p: Point) -> Result<Point, SpaceError> {
        let i = self.dom.space.index_of(p)?;
        if !self.dom.set.contains(i) {
            return Err(SpaceError::UnknownPoint(p.0));
        }
        Ok(self.cod.space.point(self.apply_index(i)))
    }

    /// Pairs `(domain index, codomain index)` in ascending domain order.
    pub fn graph(&self) -> Vec<(usize, usize)> {
        self.dom.set.iter().zip(self.vals.iter().map(|&v| v as usize)).collect()
    }

    pub fn image(&self) -> IndexSet {
        let mut img = IndexSet::empty(self.cod.space.n_points());
        for &v in &self.vals {
            img.insert(v as usize);
        }
        img
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = IndexSet::empty(self.cod.space.n_points());
        for &v in &self.vals {
            if seen.contains(v as usize) {
                return false;
            }
            seen.insert(v as usize);
        }
        true
    }

    /// `g ∘ self`, defined when the codomain of `self` equals the domain of
    /// `g` as an open of the same space.
    pub fn then(&self, g: &PointMap) -> Result<PointMap, SpaceError> {
        if self.cod.space != g.dom.space || self.cod.set != g.dom.set {
            return Err(SpaceError::SpaceMismatch);
        }
        let g_dom = g.dom.set.indices();
        let vals = self
            .vals
            .iter()
            .map(|&v| g.vals[g_dom.iter().position(|&x| x == v as usize).unwrap()])
            .collect();
        Ok(PointMap { dom: self.dom.clone(), cod: g.cod.clone(), vals })
    }

    /// Restricts the map to a smaller open of the domain space.
    pub fn restrict(&self, u: &OpenSet) -> Result<PointMap, SpaceError> {
        if u.space != self.dom.space {
            return Err(SpaceError::SpaceMismatch);
        }
        if !u.set.is_subset(&self.dom.set) {
            return Err(SpaceError::NonOpenSubset(u.point_ids()));
        }
        let dom_idx = self.dom.set.indices();
        let vals = u
            .set
            .iter()
            .map(|i| self.vals[dom_idx.iter().position(|&x| x == i).unwrap()])
            .collect();
        Ok(PointMap { dom: u.clone(), cod: self.cod.clone(), vals })
    }

    /// Reinterprets the map with a larger codomain open of the same space.
    pub fn widen_codomain(&self, v: &OpenSet) -> Result<PointMap, SpaceError> {
        if v.space != self.cod.space {
            return Err(SpaceError::SpaceMismatch);
        }
        if !self.cod.set.is_subset(&v.set) {
            return Err(SpaceError::NonOpenSubset(self.cod.point_ids()));
        }
        Ok(PointMap { dom: self.dom.clone(), cod: v.clone(), vals: self.vals.clone() })
    }

    /// Reinterprets the map with a smaller codomain, when the image fits.
    pub fn narrow_codomain(&self, v: &OpenSet) -> Result<PointMap, SpaceError> {
        if v.space != self.cod.space {
            return Err(SpaceError::SpaceMismatch);
        }
        if !self.image().is_subset(&v.set) {
            return Err(SpaceError::NonOpenSubset(v.point_ids()));
        }
        Ok(PointMap { dom: self.dom.clone(), cod: v.clone(), vals: self.vals.clone() })
    }

    /// Continuity via specialization: the map is continuous iff it is
    /// monotone for the specialization preorder. On failure the returned
    /// witness is the minimal open of an offending image point — a
    /// relatively open set of the codomain whose preimage is not open.
    pub fn check_continuous(&self) -> ContinuityReport {
        let dspace = &self.dom.space;
        let cspace = &self.cod.space;
        let dom_idx = self.dom.set.indices();
        for (pos, &x) in dom_idx.iter().enumerate() {
            let fx = self.vals[pos] as usize;
            // Domain is open, so the subspace minimal open of x is U_x.
            for x2 in dspace.min_open(x).iter() {
                let pos2 = dom_idx.iter().position(|&i| i == x2).unwrap();
                let fx2 = self.vals[pos2] as usize;
                if !cspace.min_open(fx).contains(fx2) {
                    let witness =
                        OpenSet::new_unchecked(cspace.clone(), cspace.min_open(fx).clone());
                    return ContinuityReport { continuous: false, witness: Some(witness) };
                }
            }
        }
        ContinuityReport { continuous: true, witness: None }
    }

    /// Definitional continuity check: enumerates every relatively open
    /// subset of the codomain and tests its preimage. Exponential in the
    /// codomain topology; used as an oracle against `check_continuous`.
    pub fn check_continuous_exhaustive(&self) -> Result<ContinuityReport, SpaceError> {
        let cspace = &self.cod.space;
        for w in cspace.opens_within(&self.cod.set)? {
            let mut pre = IndexSet::empty(self.dom.space.n_points());
            for (pos, &x) in self.dom.set.indices().iter().enumerate() {
                if w.contains(self.vals[pos] as usize) {
                    pre.insert(x);
                }
            }
            if !self.dom.space.is_open(&pre) {
                let witness = OpenSet::new_unchecked(cspace.clone(), w);
                return Ok(ContinuityReport { continuous: false, witness: Some(witness) });
            }
        }
        Ok(ContinuityReport { continuous: true, witness: None })
    }

    /// Local homeomorphism check. A point passes iff the map restricted to
    /// its minimal open is injective, the image of that minimal open is
    /// open, and the inverse of the restriction is continuous. Checking the
    /// minimal open suffices: any witnessing neighborhood restricts to it.
    pub fn is_local_homeo(&self) -> LocalHomeoReport {
        let mut failures = Vec::new();
        let cont = self.check_continuous();
        if !cont.continuous {
            return LocalHomeoReport {
                ok: false,
                failures: vec![LocalHomeoFailure {
                    point: self.dom.space.point(self.dom.set.indices()[0]),
                    reason: LocalHomeoReason::NotContinuous,
                }],
            };
        }
        let dspace = &self.dom.space;
        let cspace = &self.cod.space;
        let dom_idx = self.dom.set.indices();
        let value_at = |i: usize| -> usize {
            self.vals[dom_idx.iter().position(|&x| x == i).unwrap()] as usize
        };
        for &x in &dom_idx {
            let u = dspace.min_open(x);
            let mut img = IndexSet::empty(cspace.n_points());
            let mut injective = true;
            for x2 in u.iter() {
                let v = value_at(x2);
                if img.contains(v) {
                    injective = false;
                }
                img.insert(v);
            }
            if !injective {
                failures.push(LocalHomeoFailure {
                    point: dspace.point(x),
                    reason: LocalHomeoReason::NotInjectiveOnMinimalOpen,
                });
                continue;
            }
            if !cspace.is_open(&img) {
                failures.push(LocalHomeoFailure {
                    point: dspace.point(x),
                    reason: LocalHomeoReason::ImageOfMinimalOpenNotOpen,
                });
                continue;
            }
            // Inverse continuity: the inverse is monotone on the image.
            let back: BTreeMap<usize, usize> = u.iter().map(|x2| (value_at(x2), x2)).collect();
            let mut inverse_ok = true;
            'outer: for (&y, &gy) in &back {
                for y2 in cspace.min_open(y).iter() {
                    // Image is open, so its subspace minimal opens are ambient.
                    let gy2 = back[&y2];
                    if !dspace.min_open(gy).contains(gy2) {
                        inverse_ok = false;
                        break 'outer;
                    }
                }
            }
            if !inverse_ok {
                failures.push(LocalHomeoFailure {
                    point: dspace.point(x),
                    reason: LocalHomeoReason::InverseNotContinuous,
                });
            }
        }
        LocalHomeoReport { ok: failures.is_empty(), failures }
    }

    /// Definitional local-homeomorphism oracle: searches every relatively
    /// open neighborhood of every point for a homeomorphic restriction.
    pub fn is_local_homeo_exhaustive(&self) -> Result<bool, SpaceError> {
        if !self.check_continuous().continuous {
            return Ok(false);
        }
        let dspace = &self.dom.space;
        let cspace = &self.cod.space;
        let dom_opens = dspace.opens_within(&self.dom.set)?;
        let dom_idx = self.dom.set.indices();
        let value_at = |i: usize| -> usize {
            self.vals[dom_idx.iter().position(|&x| x == i).unwrap()] as usize
        };
        'points: for &x in &dom_idx {
            for w in &dom_opens {
                if !w.contains(x) {
                    continue;
                }
                let mut img = IndexSet::empty(cspace.n_points());
                let mut injective = true;
                for x2 in w.iter() {
                    let v = value_at(x2);
                    if img.contains(v) {
                        injective = false;
                        break;
                    }
                    img.insert(v);
                }
                if !injective || !cspace.is_open(&img) {
                    continue;
                }
                let back: BTreeMap<usize, usize> = w.iter().map(|x2| (value_at(x2), x2)).collect();
                let inverse_ok = back.iter().all(|(&y, &gy)| {
                    cspace
                        .min_open(y)
                        .intersect(&img)
                        .iter()
                        .all(|y2| dspace.min_open(gy).contains(back[&y2]))
                });
                if inverse_ok {
                    continue 'points;
                }
            }
            return Ok(false);
        }
        Ok(true)
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .dom
            .set
            .iter()
            .zip(&self.vals)
            .map(|(i, &v)| {
                format!("{}↦{}", self.dom.space.point(i), self.cod.space.point(v as usize))
            })
            .collect();
        write!(f, "[{}]", pairs.join(";"))
    }
}

/// Deterministic order for collections of maps sharing domain and codomain.
pub(crate) fn map_cmp(a: &PointMap, b: &PointMap) -> std::cmp::Ordering {
    lex_cmp(&a.dom.set, &b.dom.set)
        .then_with(|| lex_cmp(&a.cod.set, &b.cod.set))
        .then_with(|| a.vals.cmp(&b.vals))
}

/// Enumerates all total maps `u → v` (not only continuous ones) in a
/// deterministic order.
pub fn all_point_maps(u: &OpenSet, v: &OpenSet) -> Vec<PointMap> {
    let dom_size = u.len();
    let cod_idx = v.set.indices();
    if dom_size == 0 {
        return vec![PointMap::from_indices(u.clone(), v.clone(), Vec::new())];
    }
    if cod_idx.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut counters = vec![0usize; dom_size];
    loop {
        let vals: Vec<u32> = counters.iter().map(|&c| cod_idx[c] as u32).collect();
        out.push(PointMap::from_indices(u.clone(), v.clone(), vals));
        let mut k = 0;
        loop {
            counters[k] += 1;
            if counters[k] < cod_idx.len() {
                break;
            }
            counters[k] = 0;
            k += 1;
            if k == dom_size {
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::spaces::{all_spaces_up_to, discrete, sierpinski};

    fn self_map(space: &Space, assign: &[(u32, u32)]) -> PointMap {
        let full = space.full_open();
        let map: BTreeMap<Point, Point> =
            assign.iter().map(|&(a, b)| (Point(a), Point(b))).collect();
        PointMap::new(full.clone(), full, &map).unwrap()
    }

    #[test]
    fn identity_is_continuous_on_every_open() {
        for s in all_spaces_up_to(3) {
            for o in s.opens().unwrap() {
                let open = s.open_set(o.clone()).unwrap();
                let id = PointMap::identity(&open);
                assert!(id.check_continuous().continuous);
                assert!(id.is_local_homeo().ok);
            }
        }
    }

    #[test]
    fn sierpinski_constant_zero_is_continuous_but_not_local_homeo() {
        let s = sierpinski();
        let c0 = self_map(&s, &[(0, 0), (1, 0)]);
        assert!(c0.check_continuous().continuous);
        let report = c0.is_local_homeo();
        assert!(!report.ok);
        // Both points fail; the germ of the failure at 1 is that every
        // neighborhood of 1 maps onto {0}, which is not open.
        let points: Vec<u32> = report.failures.iter().map(|f| f.point.0).collect();
        assert!(points.contains(&1));
    }

    #[test]
    fn sierpinski_swap_is_discontinuous_with_witness() {
        let s = sierpinski();
        let swap = self_map(&s, &[(0, 1), (1, 0)]);
        let report = swap.check_continuous();
        assert!(!report.continuous);
        assert_eq!(report.witness.unwrap().point_ids(), vec![1]);
    }

    #[test]
    fn discrete_maps_between_any_opens_are_all_local_homeos() {
        for n in 1..=3usize {
            let s = discrete(n);
            let opens: Vec<_> = s.opens().unwrap().to_vec();
            for u in &opens {
                for v in &opens {
                    let uo = s.open_set(u.clone()).unwrap();
                    let vo = s.open_set(v.clone()).unwrap();
                    for m in all_point_maps(&uo, &vo) {
                        assert!(m.is_local_homeo().ok, "{m:?} on discrete({n})");
                    }
                }
            }
        }
    }

    #[test]
    fn preorder_continuity_agrees_with_definitional_oracle() {
        for s in all_spaces_up_to(3) {
            let opens: Vec<_> = s.opens().unwrap().to_vec();
            for u in &opens {
                for v in &opens {
                    let uo = s.open_set(u.clone()).unwrap();
                    let vo = s.open_set(v.clone()).unwrap();
                    for m in all_point_maps(&uo, &vo) {
                        assert_eq!(
                            m.check_continuous().continuous,
                            m.check_continuous_exhaustive().unwrap().continuous,
                            "{m:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn local_homeo_agrees_with_exhaustive_oracle() {
        for s in all_spaces_up_to(3) {
            let full = s.full_open();
            for m in all_point_maps(&full, &full) {
                assert_eq!(m.is_local_homeo().ok, m.is_local_homeo_exhaustive().unwrap(), "{m:?}");
            }
        }
    }

    #[test]
    fn composition_of_local_homeos_is_local_homeo() {
        for s in all_spaces_up_to(3) {
            let full = s.full_open();
            let homeos: Vec<PointMap> = all_point_maps(&full, &full)
                .into_iter()
                .filter(|m| m.is_local_homeo().ok)
                .collect();
            for f in &homeos {
                for g in &homeos {
                    let gf = f.then(g).unwrap();
                    assert!(gf.is_local_homeo().ok, "{f:?};{g:?}");
                }
            }
        }
    }

    #[test]
    fn continuity_witness_preimage_is_not_open() {
        for s in all_spaces_up_to(3) {
            let full = s.full_open();
            for m in all_point_maps(&full, &full) {
                let rep = m.check_continuous();
                if let Some(w) = rep.witness {
                    let mut pre = s.empty_set();
                    for (i, fi) in m.graph() {
                        if w.set().contains(fi) {
                            pre.insert(i);
                        }
                    }
                    assert!(!s.is_open(&pre));
                }
            }
        }
    }
}
