//! Presheaves of finite sets on the opens of a finite space.
//!
//! Sections are identified by dense ids with display labels; restriction
//! maps are total tables per pair of nested opens. Stalks are attained at
//! minimal open neighborhoods, so the stalk at `x` is just the section set
//! of `U_x`; a brute-force colimit-quotient oracle is kept alongside and the
//! two are compared on the corpus.

mod etale;
mod sheafify;

pub use etale::{etale_space, generated_topology_oracle, projection_image, EtaleBundle};
pub use sheafify::{
    all_presheaf_morphisms, factor_through_sheafification, sheafify, Sheafification,
    UniversalityError,
};

use crate::bitset::IndexSet;
use crate::budget::Budgets;
use crate::space::{lex_cmp, CoverMode, Point, Space, SpaceError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Canonical sentinel label for the singleton sections of a skyscraper away
/// from its supporting point.
pub const SENTINEL: &str = "•";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("a skyscraper stalk must be non-empty")]
    EmptyStalkRejected,
    #[error("matching-family enumeration budget exceeded ({0} families)")]
    FamilyBudgetExceeded(usize),
    #[error("presheaf is structurally invalid: {0}")]
    Invalid(String),
    #[error("operand is not a sheaf")]
    NotASheaf,
    #[error("presheaves live on different spaces")]
    SpaceMismatch,
}

/// A presheaf: a finite set of sections per open plus restriction tables.
/// The raw data may violate the presheaf laws; `check` reports violations.
#[derive(Clone, PartialEq, Eq)]
pub struct Presheaf {
    space: Space,
    sections: BTreeMap<IndexSet, Vec<String>>,
    /// `(U, U') ↦ table`, `U' ⊆ U`, table indexed by section id of `U`.
    res: BTreeMap<(IndexSet, IndexSet), Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum PresheafViolation {
    MissingSectionSet { open: Vec<u32> },
    MissingRestriction { from: Vec<u32>, to: Vec<u32> },
    RestrictionOutOfRange { from: Vec<u32>, to: Vec<u32>, section: String },
    IdentityViolated { open: Vec<u32>, section: String },
    FunctorialityViolated { chain: [Vec<u32>; 3], section: String },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PresheafReport {
    pub violations: Vec<PresheafViolation>,
}

impl PresheafReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Witness for a failed sheaf condition: a matching family over a cover
/// with a number of gluings different from one.
#[derive(Clone, Debug, Serialize)]
pub struct SheafFailure {
    pub open: Vec<u32>,
    pub cover: Vec<Vec<u32>>,
    pub family: Vec<(Vec<u32>, String)>,
    pub gluings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SheafVerdict {
    pub is_sheaf: bool,
    pub failure: Option<SheafFailure>,
}

impl Presheaf {
    /// Raw constructor; the data is taken as given and validated separately.
    pub fn new(
        space: Space,
        sections: BTreeMap<IndexSet, Vec<String>>,
        res: BTreeMap<(IndexSet, IndexSet), Vec<u32>>,
    ) -> Presheaf {
        Presheaf { space, sections, res }
    }

    /// The constant presheaf `U ↦ labels` with identity restrictions.
    pub fn constant(space: &Space, labels: &[&str]) -> Result<Presheaf, SpaceError> {
        let opens = space.opens()?.to_vec();
        let mut sections = BTreeMap::new();
        let mut res = BTreeMap::new();
        for u in &opens {
            sections.insert(u.clone(), labels.iter().map(|s| s.to_string()).collect());
        }
        for u in &opens {
            for v in &opens {
                if v.is_subset(u) {
                    res.insert((u.clone(), v.clone()), (0..labels.len() as u32).collect());
                }
            }
        }
        Ok(Presheaf { space: space.clone(), sections, res })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn section_labels(&self, u: &IndexSet) -> &[String] {
        self.sections.get(u).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn n_sections(&self, u: &IndexSet) -> usize {
        self.section_labels(u).len()
    }

    pub fn label(&self, u: &IndexSet, id: u32) -> &str {
        &self.section_labels(u)[id as usize]
    }

    /// Restriction of section `id` of `u` to the sub-open `v`.
    pub fn restrict(&self, u: &IndexSet, v: &IndexSet, id: u32) -> u32 {
        if u == v {
            return id;
        }
        self.res
            .get(&(u.clone(), v.clone()))
            .unwrap_or_else(|| panic!("missing restriction table"))[id as usize]
    }

    pub fn restriction_table(&self, u: &IndexSet, v: &IndexSet) -> Option<&Vec<u32>> {
        self.res.get(&(u.clone(), v.clone()))
    }

    pub(crate) fn sections_map(&self) -> &BTreeMap<IndexSet, Vec<String>> {
        &self.sections
    }

    pub(crate) fn res_map(&self) -> &BTreeMap<(IndexSet, IndexSet), Vec<u32>> {
        &self.res
    }

    /// Checks the presheaf laws: every open carries a section set, every
    /// nested pair carries a total restriction, restriction along `U ⊆ U`
    /// is the identity, and restrictions compose along chains.
    pub fn check(&self) -> Result<PresheafReport, SpaceError> {
        let mut violations = Vec::new();
        let opens = self.space.opens()?.to_vec();
        let ids = |s: &IndexSet| self.space.external_ids(s);
        for u in &opens {
            if !self.sections.contains_key(u) {
                violations.push(PresheafViolation::MissingSectionSet { open: ids(u) });
            }
        }
        for u in &opens {
            for v in &opens {
                if !v.is_subset(u) {
                    continue;
                }
                let table = match self.res.get(&(u.clone(), v.clone())) {
                    Some(t) => t,
                    None => {
                        if u != v {
                            violations.push(PresheafViolation::MissingRestriction {
                                from: ids(u),
                                to: ids(v),
                            });
                        }
                        continue;
                    }
                };
                if table.len() != self.n_sections(u) {
                    violations.push(PresheafViolation::MissingRestriction {
                        from: ids(u),
                        to: ids(v),
                    });
                    continue;
                }
                for (sid, &t) in table.iter().enumerate() {
                    if t as usize >= self.n_sections(v) {
                        violations.push(PresheafViolation::RestrictionOutOfRange {
                            from: ids(u),
                            to: ids(v),
                            section: self.label(u, sid as u32).to_string(),
                        });
                    } else if u == v && t != sid as u32 {
                        violations.push(PresheafViolation::IdentityViolated {
                            open: ids(u),
                            section: self.label(u, sid as u32).to_string(),
                        });
                    }
                }
            }
        }
        if violations.is_empty() {
            for u in &opens {
                for v in &opens {
                    if !v.is_subset(u) || v == u {
                        continue;
                    }
                    for w in &opens {
                        if !w.is_subset(v) || w == v {
                            continue;
                        }
                        for sid in 0..self.n_sections(u) as u32 {
                            let direct = self.restrict(u, w, sid);
                            let via = self.restrict(v, w, self.restrict(u, v, sid));
                            if direct != via {
                                violations.push(PresheafViolation::FunctorialityViolated {
                                    chain: [ids(u), ids(v), ids(w)],
                                    section: self.label(u, sid).to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(PresheafReport { violations })
    }

    /// The stalk at `x`, attained at the minimal open neighborhood: the
    /// section ids of `U_x` together with that open.
    pub fn stalk(&self, x: Point) -> Result<(IndexSet, Vec<u32>), SpaceError> {
        let i = self.space.index_of(x)?;
        let u = self.space.min_open(i).clone();
        let ids = (0..self.n_sections(&u) as u32).collect();
        Ok((u, ids))
    }

    /// Brute-force stalk: the set of pairs `(U ∋ x, s)` modulo agreement on
    /// a smaller neighborhood, computed by an explicit quotient. Returns
    /// the equivalence classes. Used as an oracle for `stalk`.
    pub fn stalk_colimit_oracle(&self, x: Point) -> Result<Vec<Vec<(IndexSet, u32)>>, SpaceError> {
        let xi = self.space.index_of(x)?;
        let opens: Vec<IndexSet> = self
            .space
            .opens()?
            .iter()
            .filter(|u| u.contains(xi))
            .cloned()
            .collect();
        let mut elems: Vec<(IndexSet, u32)> = Vec::new();
        for u in &opens {
            for sid in 0..self.n_sections(u) as u32 {
                elems.push((u.clone(), sid));
            }
        }
        // Union-find over germs equivalent on some common smaller open.
        let mut parent: Vec<usize> = (0..elems.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for i in 0..elems.len() {
            for j in (i + 1)..elems.len() {
                let (u, s) = &elems[i];
                let (v, t) = &elems[j];
                let equal_on_some = opens.iter().any(|w| {
                    w.is_subset(u)
                        && w.is_subset(v)
                        && self.restrict(u, w, *s) == self.restrict(v, w, *t)
                });
                if equal_on_some {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<(IndexSet, u32)>> = BTreeMap::new();
        for (i, elem) in elems.iter().enumerate() {
            let r = find(&mut parent, i);
            classes.entry(r).or_default().push(elem.clone());
        }
        Ok(classes.into_values().collect())
    }

    /// Equalizer-style sheaf condition over the covers selected by `mode`:
    /// every matching family on a cover must glue to exactly one section.
    pub fn is_sheaf(&self, mode: CoverMode, budgets: &Budgets) -> Result<SheafVerdict, PresheafError> {
        let opens = self.space.opens()?.to_vec();
        for u in &opens {
            let covers = match mode {
                CoverMode::Canonical => vec![self.space.canonical_cover(u)],
                CoverMode::Exhaustive => {
                    self.space.irredundant_covers(u, budgets.max_opens_for_irredundant)?
                }
            };
            for cover in covers {
                if let Some(failure) = self.check_cover(u, &cover, budgets)? {
                    return Ok(SheafVerdict { is_sheaf: false, failure: Some(failure) });
                }
            }
        }
        Ok(SheafVerdict { is_sheaf: true, failure: None })
    }

    fn check_cover(
        &self,
        u: &IndexSet,
        cover: &[IndexSet],
        budgets: &Budgets,
    ) -> Result<Option<SheafFailure>, PresheafError> {
        let families = self.matching_families(cover, budgets)?;
        // Restriction tuple of each section of `u` over the cover.
        let mut glue: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
        for sid in 0..self.n_sections(u) as u32 {
            let tuple: Vec<u32> = cover.iter().map(|m| self.restrict(u, m, sid)).collect();
            glue.entry(tuple).or_default().push(sid);
        }
        for family in families {
            let n = glue.get(&family).map(|v| v.len()).unwrap_or(0);
            if n != 1 {
                let ids = |s: &IndexSet| self.space.external_ids(s);
                return Ok(Some(SheafFailure {
                    open: ids(u),
                    cover: cover.iter().map(ids).collect(),
                    family: cover
                        .iter()
                        .zip(&family)
                        .map(|(m, &sid)| (ids(m), self.label(m, sid).to_string()))
                        .collect(),
                    gluings: glue
                        .get(&family)
                        .map(|v| v.iter().map(|&sid| self.label(u, sid).to_string()).collect())
                        .unwrap_or_default(),
                }));
            }
        }
        Ok(None)
    }

    /// All matching families over a cover: one section per member, agreeing
    /// under restriction on every pairwise intersection.
    pub fn matching_families(
        &self,
        cover: &[IndexSet],
        budgets: &Budgets,
    ) -> Result<Vec<Vec<u32>>, PresheafError> {
        let k = cover.len();
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut partial: Vec<u32> = Vec::new();
        self.extend_family(cover, &mut partial, &mut out, budgets)?;
        debug_assert!(out.iter().all(|f| f.len() == k));
        Ok(out)
    }

    fn extend_family(
        &self,
        cover: &[IndexSet],
        partial: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        budgets: &Budgets,
    ) -> Result<(), PresheafError> {
        if partial.len() == cover.len() {
            if out.len() >= budgets.max_matching_families {
                return Err(PresheafError::FamilyBudgetExceeded(out.len()));
            }
            out.push(partial.clone());
            return Ok(());
        }
        let i = partial.len();
        for sid in 0..self.n_sections(&cover[i]) as u32 {
            let compatible = (0..i).all(|j| {
                let w = cover[i].intersect(&cover[j]);
                self.restrict(&cover[i], &w, sid) == self.restrict(&cover[j], &w, partial[j])
            });
            if compatible {
                partial.push(sid);
                self.extend_family(cover, partial, out, budgets)?;
                partial.pop();
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (u, labels) in &self.sections {
            parts.push(format!("{:?}↦{}", self.space.external_ids(u), labels.len()));
        }
        write!(f, "Presheaf{{{}}}", parts.join(", "))
    }
}

/// The skyscraper sheaf at `x`: the stalk over opens containing `x`, a
/// fixed singleton elsewhere.
pub fn skyscraper(space: &Space, x: Point, stalk: &[&str]) -> Result<Presheaf, PresheafError> {
    if stalk.is_empty() {
        return Err(PresheafError::EmptyStalkRejected);
    }
    Ok(skyscraper_unchecked(space, x, stalk)?)
}

/// Skyscraper construction that tolerates an empty stalk. The public
/// constructor rejects that case; the sheafification pipeline needs it when
/// a presheaf has no sections near a point.
pub(crate) fn skyscraper_unchecked(
    space: &Space,
    x: Point,
    stalk: &[&str],
) -> Result<Presheaf, SpaceError> {
    let xi = space.index_of(x)?;
    let opens = space.opens()?.to_vec();
    let mut sections = BTreeMap::new();
    let mut res = BTreeMap::new();
    for u in &opens {
        let labels: Vec<String> = if u.contains(xi) {
            stalk.iter().map(|s| s.to_string()).collect()
        } else {
            vec![SENTINEL.to_string()]
        };
        sections.insert(u.clone(), labels);
    }
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let table: Vec<u32> = if v.contains(xi) {
                (0..stalk.len() as u32).collect()
            } else if u.contains(xi) {
                vec![0; stalk.len()]
            } else {
                vec![0]
            };
            res.insert((u.clone(), v.clone()), table);
        }
    }
    Ok(Presheaf { space: space.clone(), sections, res })
}

/// Componentwise product of presheaves on a common space. Tuple ids are
/// mixed-radix numbers over the factor ids, most significant factor first.
pub struct ProductPresheaf {
    pub presheaf: Presheaf,
    radices: BTreeMap<IndexSet, Vec<usize>>,
}

impl ProductPresheaf {
    pub fn tuple_of(&self, u: &IndexSet, id: u32) -> Vec<u32> {
        let radices = &self.radices[u];
        let mut rest = id as usize;
        let mut out = vec![0u32; radices.len()];
        for (i, &r) in radices.iter().enumerate().rev() {
            out[i] = (rest % r) as u32;
            rest /= r;
        }
        out
    }

    pub fn id_of(&self, u: &IndexSet, tuple: &[u32]) -> u32 {
        let radices = &self.radices[u];
        let mut id = 0usize;
        for (i, &r) in radices.iter().enumerate() {
            id = id * r + tuple[i] as usize;
        }
        id as u32
    }
}

pub fn product_presheaf(space: &Space, factors: &[&Presheaf]) -> Result<ProductPresheaf, PresheafError> {
    for f in factors {
        if f.space() != space {
            return Err(PresheafError::SpaceMismatch);
        }
    }
    let opens = space.opens()?.to_vec();
    let mut sections = BTreeMap::new();
    let mut radices = BTreeMap::new();
    for u in &opens {
        let rad: Vec<usize> = factors.iter().map(|f| f.n_sections(u)).collect();
        let total: usize = rad.iter().product();
        let mut labels = Vec::with_capacity(total);
        for id in 0..total {
            let mut rest = id;
            let mut digits = vec![0usize; rad.len()];
            for (i, &r) in rad.iter().enumerate().rev() {
                digits[i] = rest % r;
                rest /= r;
            }
            let parts: Vec<&str> = factors
                .iter()
                .zip(&digits)
                .map(|(f, &d)| f.label(u, d as u32))
                .collect();
            labels.push(format!("({})", parts.join(",")));
        }
        sections.insert(u.clone(), labels);
        radices.insert(u.clone(), rad);
    }
    let mut res = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let rad_u = &radices[u];
            let rad_v = &radices[v];
            let total: usize = rad_u.iter().product();
            let mut table = Vec::with_capacity(total);
            for id in 0..total {
                let mut rest = id;
                let mut digits = vec![0usize; rad_u.len()];
                for (i, &r) in rad_u.iter().enumerate().rev() {
                    digits[i] = rest % r;
                    rest /= r;
                }
                let mut target = 0usize;
                for (i, &r) in rad_v.iter().enumerate() {
                    let restricted = factors[i].restrict(u, v, digits[i] as u32) as usize;
                    target = target * r + restricted;
                }
                table.push(target as u32);
            }
            res.insert((u.clone(), v.clone()), table);
        }
    }
    Ok(ProductPresheaf {
        presheaf: Presheaf { space: space.clone(), sections, res },
        radices,
    })
}

/// A morphism of presheaves on a common space: one function per open.
#[derive(Clone, Debug)]
pub struct PresheafMorphism {
    pub maps: BTreeMap<IndexSet, Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismReport {
    pub natural: bool,
    pub violations: Vec<String>,
}

impl PresheafMorphism {
    pub fn identity(p: &Presheaf) -> PresheafMorphism {
        let maps = p
            .sections_map()
            .iter()
            .map(|(u, labels)| (u.clone(), (0..labels.len() as u32).collect()))
            .collect();
        PresheafMorphism { maps }
    }

    pub fn apply(&self, u: &IndexSet, id: u32) -> u32 {
        self.maps[u][id as usize]
    }

    /// Naturality: `φ_{U'} ∘ res_P = res_G ∘ φ_U` for every nested pair.
    pub fn check(&self, p: &Presheaf, g: &Presheaf) -> Result<MorphismReport, PresheafError> {
        if p.space() != g.space() {
            return Err(PresheafError::SpaceMismatch);
        }
        let mut violations = Vec::new();
        let opens = p.space().opens()?.to_vec();
        for u in &opens {
            let map = match self.maps.get(u) {
                Some(m) if m.len() == p.n_sections(u) => m,
                _ => {
                    violations.push(format!(
                        "missing or ill-sized component at {:?}",
                        p.space().external_ids(u)
                    ));
                    continue;
                }
            };
            if map.iter().any(|&v| v as usize >= g.n_sections(u)) {
                violations.push(format!(
                    "component out of range at {:?}",
                    p.space().external_ids(u)
                ));
            }
        }
        if violations.is_empty() {
            for u in &opens {
                for v in &opens {
                    if !v.is_subset(u) || v == u {
                        continue;
                    }
                    for sid in 0..p.n_sections(u) as u32 {
                        let via_p = self.apply(v, p.restrict(u, v, sid));
                        let via_g = g.restrict(u, v, self.apply(u, sid));
                        if via_p != via_g {
                            violations.push(format!(
                                "naturality broken at {:?} ⊆ {:?} on section {}",
                                p.space().external_ids(v),
                                p.space().external_ids(u),
                                p.label(u, sid)
                            ));
                        }
                    }
                }
            }
        }
        Ok(MorphismReport { natural: violations.is_empty(), violations })
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &PresheafMorphism) -> PresheafMorphism {
        let maps = self
            .maps
            .iter()
            .map(|(u, table)| {
                (u.clone(), table.iter().map(|&v| other.maps[u][v as usize]).collect())
            })
            .collect();
        PresheafMorphism { maps }
    }

    pub fn is_bijective_at(&self, u: &IndexSet, p: &Presheaf, g: &Presheaf) -> bool {
        let table = &self.maps[u];
        if table.len() != g.n_sections(u) || p.n_sections(u) != g.n_sections(u) {
            return false;
        }
        let distinct: BTreeSet<u32> = table.iter().copied().collect();
        distinct.len() == table.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StalkwiseIsoReport {
    pub stalkwise_iso: bool,
    pub openwise_iso: bool,
    /// The two notions must agree for sheaves; recorded so callers can
    /// assert it rather than trust it.
    pub equivalence_holds: bool,
}

/// For a morphism between sheaves: bijectivity of the induced stalk maps,
/// of the per-open components, and agreement of the two.
pub fn check_morphism_stalkwise_iso(
    phi: &PresheafMorphism,
    p: &Presheaf,
    g: &Presheaf,
    budgets: &Budgets,
) -> Result<StalkwiseIsoReport, PresheafError> {
    if !p.is_sheaf(CoverMode::Canonical, budgets)?.is_sheaf
        || !g.is_sheaf(CoverMode::Canonical, budgets)?.is_sheaf
    {
        return Err(PresheafError::NotASheaf);
    }
    let space = p.space();
    let stalkwise = (0..space.n_points()).all(|x| {
        let u = space.min_open(x).clone();
        phi.is_bijective_at(&u, p, g)
    });
    let openwise = space
        .opens()
        .map(|opens| opens.iter().all(|u| phi.is_bijective_at(u, p, g)))
        .unwrap_or(false);
    Ok(StalkwiseIsoReport {
        stalkwise_iso: stalkwise,
        openwise_iso: openwise,
        equivalence_holds: stalkwise == openwise,
    })
}

/// Orders opens by decreasing size, then lexicographically; the scan order
/// of the gluing fixpoint.
pub(crate) fn decreasing_size_order(opens: &[IndexSet]) -> Vec<IndexSet> {
    let mut v = opens.to_vec();
    v.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| lex_cmp(a, b)));
    v
}

#[cfg(test)]
mod tests;
