//! Finite topological spaces.
//!
//! A finite space is stored two ways at once: as the extensional family of
//! open sets (what gets validated and serialized) and as the minimal open
//! neighborhood of each point. On a finite space arbitrary intersections of
//! opens are open, so every point `x` has a least open neighborhood `U_x`
//! and the whole topology is recovered as the family of unions of minimal
//! opens. Derived spaces (etale spaces, fiber products) can be too large to
//! enumerate extensionally, so the minimal-open form is the one every
//! predicate is computed from; the extensional family is materialized on
//! demand behind a budget.

mod maps;

pub use maps::{
    all_point_maps, ContinuityReport, LocalHomeoFailure, LocalHomeoReason, LocalHomeoReport,
    OpenSet, PointMap,
};
pub(crate) use maps::map_cmp;

use crate::bitset::IndexSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

/// External identifier of a point of some space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Point(pub u32);

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("the empty set or the full point set is missing from the opens")]
    MissingEmptyOrFull,
    #[error("opens not closed under union: {a:?} ∪ {b:?} absent")]
    NotClosedUnderUnion { a: Vec<u32>, b: Vec<u32> },
    #[error("opens not closed under intersection: {a:?} ∩ {b:?} absent")]
    NotClosedUnderIntersection { a: Vec<u32>, b: Vec<u32> },
    #[error("unknown point {0}")]
    UnknownPoint(u32),
    #[error("duplicate point {0}")]
    DuplicatePoint(u32),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(u32),
    #[error("relation is not transitive: {x} → {y} → {z} but not {x} → {z}")]
    NotTransitive { x: u32, y: u32, z: u32 },
    #[error("subset {0:?} is not open")]
    NonOpenSubset(Vec<u32>),
    #[error("cover enumeration budget exceeded: space has {opens} opens, budget {budget}")]
    CoverBudgetExceeded { opens: usize, budget: usize },
    #[error("open family too large to materialize (budget {budget})")]
    OpenFamilyBudgetExceeded { budget: usize },
    #[error("operands belong to different spaces")]
    SpaceMismatch,
}

/// Hard cap on extensional open-family materialization. A discrete space on
/// 20 points already has 2^20 opens; anything past this is only ever handled
/// through minimal opens.
pub(crate) const OPEN_FAMILY_CAP: usize = 1 << 20;

struct SpaceData {
    /// Sorted external point ids; the position of an id is its index.
    points: Vec<Point>,
    /// Minimal open neighborhood per point index.
    min_open: Vec<IndexSet>,
    /// Extensional opens, canonically sorted. `None` = over budget.
    opens: OnceLock<Option<Vec<IndexSet>>>,
}

/// A validated finite topological space. Cheap to clone.
#[derive(Clone)]
pub struct Space {
    data: Arc<SpaceData>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.points == other.data.points && self.data.min_open == other.data.min_open)
    }
}
impl Eq for Space {}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Space({} points, {} opens)",
            self.n_points(),
            self.opens()
                .map(|o| o.len().to_string())
                .unwrap_or_else(|_| "many".into())
        )
    }
}

/// Lexicographic order on subsets viewed as ascending index lists; this is
/// the canonical order for opens in reports and files.
pub(crate) fn lex_cmp(a: &IndexSet, b: &IndexSet) -> std::cmp::Ordering {
    a.indices().cmp(&b.indices())
}

impl Space {
    /// Validates an explicit family of opens and builds the space.
    pub fn build(points: &[u32], opens: &[Vec<u32>]) -> Result<Space, SpaceError> {
        let mut ids = points.to_vec();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(SpaceError::DuplicatePoint(w[0]));
            }
        }
        let n = ids.len();
        let index_of = |p: u32| ids.binary_search(&p).map_err(|_| SpaceError::UnknownPoint(p));

        let mut family: BTreeSet<IndexSet> = BTreeSet::new();
        for open in opens {
            let mut set = IndexSet::empty(n);
            for &p in open {
                set.insert(index_of(p)?);
            }
            family.insert(set);
        }
        if !family.contains(&IndexSet::empty(n)) || !family.contains(&IndexSet::full(n)) {
            return Err(SpaceError::MissingEmptyOrFull);
        }
        let listed: Vec<IndexSet> = family.iter().cloned().collect();
        let ext = |s: &IndexSet| s.iter().map(|i| ids[i]).collect::<Vec<u32>>();
        for a in &listed {
            for b in &listed {
                if !family.contains(&a.union(b)) {
                    return Err(SpaceError::NotClosedUnderUnion { a: ext(a), b: ext(b) });
                }
                if !family.contains(&a.intersect(b)) {
                    return Err(SpaceError::NotClosedUnderIntersection { a: ext(a), b: ext(b) });
                }
            }
        }

        let min_open: Vec<IndexSet> = (0..n)
            .map(|i| {
                let mut acc = IndexSet::full(n);
                for o in &listed {
                    if o.contains(i) {
                        acc = acc.intersect(o);
                    }
                }
                acc
            })
            .collect();
        // Closure under finite intersections forces U_x into the family.
        debug_assert!(min_open.iter().all(|m| family.contains(m)));

        let mut sorted: Vec<IndexSet> = listed;
        sorted.sort_by(lex_cmp);
        let data = SpaceData {
            points: ids.into_iter().map(Point).collect(),
            min_open,
            opens: OnceLock::new(),
        };
        let _ = data.opens.set(Some(sorted));
        Ok(Space { data: Arc::new(data) })
    }

    /// Builds the space whose opens are exactly the sets closed downward
    /// under the given specialization relation; `(x, y)` means `x → y`
    /// (every open around `y` contains `x`). The relation must be a
    /// preorder.
    pub fn from_preorder(points: &[u32], arrows: &[(u32, u32)]) -> Result<Space, SpaceError> {
        let mut ids = points.to_vec();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(SpaceError::DuplicatePoint(w[0]));
            }
        }
        let n = ids.len();
        let index_of = |p: u32| ids.binary_search(&p).map_err(|_| SpaceError::UnknownPoint(p));
        let mut min_open: Vec<IndexSet> = (0..n).map(|i| IndexSet::singleton(n, i)).collect();
        for &(x, y) in arrows {
            let (xi, yi) = (index_of(x)?, index_of(y)?);
            min_open[yi].insert(xi);
        }
        let points: Vec<Point> = ids.into_iter().map(Point).collect();
        Self::from_min_opens(points, min_open)
    }

    /// Internal constructor from minimal-open data; validates preorder laws.
    pub(crate) fn from_min_opens(
        points: Vec<Point>,
        min_open: Vec<IndexSet>,
    ) -> Result<Space, SpaceError> {
        let n = points.len();
        debug_assert_eq!(min_open.len(), n);
        for y in 0..n {
            if !min_open[y].contains(y) {
                return Err(SpaceError::NotReflexive(points[y].0));
            }
        }
        for z in 0..n {
            for y in min_open[z].indices() {
                if !min_open[y].is_subset(&min_open[z]) {
                    let x = min_open[y].difference(&min_open[z]).indices()[0];
                    return Err(SpaceError::NotTransitive {
                        x: points[x].0,
                        y: points[y].0,
                        z: points[z].0,
                    });
                }
            }
        }
        Ok(Space {
            data: Arc::new(SpaceData { points, min_open, opens: OnceLock::new() }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.data.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.data.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.data.points[index]
    }

    pub fn index_of(&self, p: Point) -> Result<usize, SpaceError> {
        self.data
            .points
            .binary_search(&p)
            .map_err(|_| SpaceError::UnknownPoint(p.0))
    }

    /// Minimal open neighborhood of the point with the given index.
    pub fn min_open(&self, index: usize) -> &IndexSet {
        &self.data.min_open[index]
    }

    /// `U_x` as a public open set.
    pub fn minimal_open(&self, p: Point) -> Result<OpenSet, SpaceError> {
        let i = self.index_of(p)?;
        Ok(OpenSet::new_unchecked(self.clone(), self.min_open(i).clone()))
    }

    /// `x → y`: every open containing `y` contains `x`.
    pub fn specializes(&self, x: Point, y: Point) -> Result<bool, SpaceError> {
        let (xi, yi) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.data.min_open[yi].contains(xi))
    }

    /// A finite space is T1 exactly when specialization is trivial, i.e.
    /// every minimal open is a singleton (the space is discrete).
    pub fn is_t1(&self) -> bool {
        self.data.min_open.iter().all(|m| m.len() == 1)
    }

    /// A subset is open iff it contains the minimal open of each of its
    /// points. Works for any subset without enumerating the open family.
    pub fn is_open(&self, set: &IndexSet) -> bool {
        set.iter().all(|x| self.data.min_open[x].is_subset(set))
    }

    pub fn empty_set(&self) -> IndexSet {
        IndexSet::empty(self.n_points())
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.n_points())
    }

    pub fn full_open(&self) -> OpenSet {
        OpenSet::new_unchecked(self.clone(), self.full_set())
    }

    pub fn open_set(&self, set: IndexSet) -> Result<OpenSet, SpaceError> {
        if !self.is_open(&set) {
            return Err(SpaceError::NonOpenSubset(self.external_ids(&set)));
        }
        Ok(OpenSet::new_unchecked(self.clone(), set))
    }

    pub fn open_from_points(&self, pts: &[u32]) -> Result<OpenSet, SpaceError> {
        let mut set = self.empty_set();
        for &p in pts {
            set.insert(self.index_of(Point(p))?);
        }
        self.open_set(set)
    }

    pub(crate) fn external_ids(&self, set: &IndexSet) -> Vec<u32> {
        set.iter().map(|i| self.data.points[i].0).collect()
    }

    /// The full open family, canonically sorted. Errors if the family is
    /// larger than the materialization cap.
    pub fn opens(&self) -> Result<&[IndexSet], SpaceError> {
        let cached = self.data.opens.get_or_init(|| self.enumerate_opens(OPEN_FAMILY_CAP));
        match cached {
            Some(v) => Ok(v),
            None => Err(SpaceError::OpenFamilyBudgetExceeded { budget: OPEN_FAMILY_CAP }),
        }
    }

    fn enumerate_opens(&self, cap: usize) -> Option<Vec<IndexSet>> {
        // Opens are exactly the unions of minimal opens; close upward from ∅.
        let mut seen: BTreeSet<IndexSet> = BTreeSet::new();
        let empty = self.empty_set();
        seen.insert(empty.clone());
        let mut queue = vec![empty];
        let distinct_min: BTreeSet<IndexSet> = self.data.min_open.iter().cloned().collect();
        while let Some(o) = queue.pop() {
            for m in &distinct_min {
                let u = o.union(m);
                if !seen.contains(&u) {
                    if seen.len() >= cap {
                        return None;
                    }
                    seen.insert(u.clone());
                    queue.push(u);
                }
            }
        }
        let mut v: Vec<IndexSet> = seen.into_iter().collect();
        v.sort_by(lex_cmp);
        Some(v)
    }

    /// Number of opens, if materializable.
    pub fn n_opens(&self) -> Result<usize, SpaceError> {
        Ok(self.opens()?.len())
    }

    /// All opens contained in `u` — the subspace topology of an open set.
    pub fn opens_within(&self, u: &IndexSet) -> Result<Vec<IndexSet>, SpaceError> {
        Ok(self.opens()?.iter().filter(|o| o.is_subset(u)).cloned().collect())
    }

    /// The canonical cover `{U_x : x ∈ u}` (deduplicated).
    pub fn canonical_cover(&self, u: &IndexSet) -> Vec<IndexSet> {
        let set: BTreeSet<IndexSet> = u.iter().map(|x| self.data.min_open[x].clone()).collect();
        let mut v: Vec<IndexSet> = set.into_iter().collect();
        v.sort_by(lex_cmp);
        v
    }

    /// All covers of `u` by opens in which no member is contained in the
    /// union of the others.
    pub fn irredundant_covers(
        &self,
        u: &IndexSet,
        max_opens: usize,
    ) -> Result<Vec<Vec<IndexSet>>, SpaceError> {
        let opens = self.opens()?;
        if opens.len() > max_opens {
            return Err(SpaceError::CoverBudgetExceeded { opens: opens.len(), budget: max_opens });
        }
        let candidates: Vec<&IndexSet> =
            opens.iter().filter(|o| !o.is_empty() && o.is_subset(u)).collect();
        let k = candidates.len();
        let mut covers = Vec::new();
        for mask in 0u64..(1 << k) {
            let chosen: Vec<&IndexSet> =
                (0..k).filter(|i| mask >> i & 1 == 1).map(|i| candidates[i]).collect();
            let mut union = self.empty_set();
            for c in &chosen {
                union = union.union(c);
            }
            if union != *u {
                continue;
            }
            let irredundant = (0..chosen.len()).all(|i| {
                let mut rest = self.empty_set();
                for (j, c) in chosen.iter().enumerate() {
                    if j != i {
                        rest = rest.union(c);
                    }
                }
                !chosen[i].is_subset(&rest)
            });
            if irredundant {
                covers.push(chosen.into_iter().cloned().collect());
            }
        }
        Ok(covers)
    }

    /// Connected components of a subset: classes of the undirected
    /// comparability graph of specialization restricted to the subset.
    pub fn connected_components(&self, set: &IndexSet) -> Vec<IndexSet> {
        let idx = set.indices();
        let mut comp: Vec<Option<usize>> = vec![None; self.n_points()];
        let mut comps: Vec<IndexSet> = Vec::new();
        for &start in &idx {
            if comp[start].is_some() {
                continue;
            }
            let id = comps.len();
            let mut member = self.empty_set();
            let mut stack = vec![start];
            comp[start] = Some(id);
            member.insert(start);
            while let Some(x) = stack.pop() {
                for &y in &idx {
                    if comp[y].is_none()
                        && (self.data.min_open[x].contains(y) || self.data.min_open[y].contains(x))
                    {
                        comp[y] = Some(id);
                        member.insert(y);
                        stack.push(y);
                    }
                }
            }
            comps.push(member);
        }
        comps
    }

    /// The specialization preorder as explicit arrows `(x, y)` with `x → y`.
    pub fn specialization_arrows(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for y in 0..self.n_points() {
            for x in self.data.min_open[y].iter() {
                out.push((self.data.points[x].0, self.data.points[y].0));
            }
        }
        out
    }
}

/// Which covers a sheaf-style check ranges over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CoverMode {
    /// Only the canonical cover `{U_x : x ∈ U}`.
    Canonical,
    /// Every irredundant cover by opens.
    Exhaustive,
}

/// Enumerates covers of an open set per the requested mode.
pub fn enumerate_covers(
    space: &Space,
    u: &OpenSet,
    mode: CoverMode,
    max_opens: usize,
) -> Result<Vec<Vec<IndexSet>>, SpaceError> {
    debug_assert_eq!(space, u.space());
    match mode {
        CoverMode::Canonical => Ok(vec![space.canonical_cover(u.set())]),
        CoverMode::Exhaustive => space.irredundant_covers(u.set(), max_opens),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::spaces::{all_spaces_up_to, discrete, sierpinski};

    #[test]
    fn sierpinski_is_valid_and_minimal_opens_are_right() {
        let s = sierpinski();
        assert_eq!(s.n_points(), 2);
        assert_eq!(s.minimal_open(Point(1)).unwrap().point_ids(), vec![1]);
        assert_eq!(s.minimal_open(Point(0)).unwrap().point_ids(), vec![0, 1]);
        assert_eq!(s.n_opens().unwrap(), 3);
    }

    #[test]
    fn discrete_space_is_valid() {
        let s = discrete(2);
        assert_eq!(s.n_opens().unwrap(), 4);
        assert_eq!(s.minimal_open(Point(0)).unwrap().point_ids(), vec![0]);
    }

    #[test]
    fn missing_full_set_is_rejected() {
        let err = Space::build(&[0, 1], &[vec![], vec![0], vec![1]]).unwrap_err();
        assert_eq!(err, SpaceError::MissingEmptyOrFull);
    }

    #[test]
    fn union_closure_is_enforced() {
        // {0} and {1} but not {0,1}... full set present, so break closure
        // on a 3-point space instead: {0}, {1} present, {0,1} absent.
        let err = Space::build(
            &[0, 1, 2],
            &[vec![], vec![0], vec![1], vec![0, 1, 2]],
        )
        .unwrap_err();
        matches!(err, SpaceError::NotClosedUnderUnion { .. })
            .then_some(())
            .expect("expected union-closure failure");
    }

    #[test]
    fn intersection_closure_is_enforced() {
        let err = Space::build(
            &[0, 1, 2],
            &[vec![], vec![0, 1], vec![1, 2], vec![0, 1, 2]],
        )
        .unwrap_err();
        matches!(err, SpaceError::NotClosedUnderIntersection { .. })
            .then_some(())
            .expect("expected intersection-closure failure");
    }

    #[test]
    fn unknown_point_in_open_is_rejected() {
        let err = Space::build(&[0, 1], &[vec![], vec![7], vec![0, 1]]).unwrap_err();
        assert_eq!(err, SpaceError::UnknownPoint(7));
    }

    #[test]
    fn specialization_on_sierpinski() {
        let s = sierpinski();
        assert!(s.specializes(Point(1), Point(0)).unwrap());
        assert!(!s.specializes(Point(0), Point(1)).unwrap());
        assert!(s.specializes(Point(0), Point(0)).unwrap());
    }

    #[test]
    fn t1_detection() {
        assert!(discrete(3).is_t1());
        assert!(!sierpinski().is_t1());
        assert!(discrete(1).is_t1());
    }

    #[test]
    fn canonical_covers() {
        let s = sierpinski();
        let cover = s.canonical_cover(&s.full_set());
        let as_ids: Vec<Vec<u32>> = cover.iter().map(|c| s.external_ids(c)).collect();
        assert_eq!(as_ids, vec![vec![0, 1], vec![1]]);
        let d = discrete(2);
        let cover = d.canonical_cover(&d.full_set());
        let as_ids: Vec<Vec<u32>> = cover.iter().map(|c| d.external_ids(c)).collect();
        assert_eq!(as_ids, vec![vec![0], vec![1]]);
    }

    #[test]
    fn canonical_cover_unions_to_the_open() {
        for s in all_spaces_up_to(3) {
            for u in s.opens().unwrap() {
                let mut union = s.empty_set();
                for c in s.canonical_cover(u) {
                    union = union.union(&c);
                }
                assert_eq!(&union, u);
            }
        }
    }

    #[test]
    fn irredundant_cover_of_empty_open_is_the_empty_cover() {
        let s = discrete(2);
        let covers = s.irredundant_covers(&s.empty_set(), 12).unwrap();
        assert_eq!(covers, vec![Vec::<IndexSet>::new()]);
    }

    #[test]
    fn irredundant_covers_never_contain_absorbed_members() {
        for s in all_spaces_up_to(3) {
            for u in s.opens().unwrap() {
                for cover in s.irredundant_covers(u, 12).unwrap() {
                    let mut union = s.empty_set();
                    for c in &cover {
                        union = union.union(c);
                    }
                    assert_eq!(&union, u);
                    for i in 0..cover.len() {
                        let mut rest = s.empty_set();
                        for (j, c) in cover.iter().enumerate() {
                            if i != j {
                                rest = rest.union(c);
                            }
                        }
                        assert!(!cover[i].is_subset(&rest));
                    }
                }
            }
        }
    }

    #[test]
    fn preorder_roundtrip_is_identity() {
        for s in all_spaces_up_to(3) {
            let ids: Vec<u32> = s.points().iter().map(|p| p.0).collect();
            let rebuilt = Space::from_preorder(&ids, &s.specialization_arrows()).unwrap();
            assert_eq!(s.opens().unwrap(), rebuilt.opens().unwrap());
        }
    }

    #[test]
    fn opens_are_exactly_down_closed_sets() {
        // U open ⟺ for every y ∈ U, U_y ⊆ U; checked by full enumeration.
        for s in all_spaces_up_to(3) {
            let opens: BTreeSet<IndexSet> = s.opens().unwrap().iter().cloned().collect();
            let n = s.n_points();
            for mask in 0u32..(1 << n) {
                let set = IndexSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1));
                let closed = set.iter().all(|y| s.min_open(y).is_subset(&set));
                assert_eq!(opens.contains(&set), closed);
                assert_eq!(s.is_open(&set), closed);
            }
        }
    }

    #[test]
    fn t1_iff_identity_specialization() {
        for s in all_spaces_up_to(3) {
            let trivial = s.points().iter().all(|&x| {
                s.points()
                    .iter()
                    .all(|&y| !s.specializes(x, y).unwrap() || x == y)
            });
            assert_eq!(s.is_t1(), trivial);
        }
    }

    #[test]
    fn not_a_preorder_is_rejected() {
        let err = Space::from_preorder(&[0, 1, 2], &[(0, 1), (1, 2)]).unwrap_err();
        matches!(err, SpaceError::NotTransitive { .. })
            .then_some(())
            .expect("expected transitivity failure");
    }

    #[test]
    fn minimal_open_contains_point_and_is_open() {
        for s in all_spaces_up_to(3) {
            for &p in s.points() {
                let u = s.minimal_open(p).unwrap();
                assert!(u.contains(p));
                assert!(s.is_open(u.set()));
            }
        }
    }
}
