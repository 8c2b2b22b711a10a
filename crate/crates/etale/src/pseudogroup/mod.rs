//! Pre-pseudogroups: small categories whose objects are the opens of a
//! finite space, containing the poset of opens via distinguished inclusion
//! morphisms.
//!
//! Morphisms are opaque ids per hom-set. Composition is computed by the
//! backend that produced the category — an explicit table, a category of
//! local homeomorphisms, a group-sheaf construction, the section category
//! of a topological groupoid, a category of germ families, or a
//! sub-category of another pre-pseudogroup — so hom-presheaves and germ
//! data can never drift from the underlying structure.

mod checks;
mod classical;
mod examples;
mod germs;
#[cfg(test)]
mod tests;

pub use checks::{
    check_pre_pseudogroup, def21_conditions, germ_sets_agree_across_dialects, hom_presheaf,
    is_pseudogroup_sheaf, underlying_functor_laws, Dialect,
};
pub use classical::{classical_pseudogroup, classical_to_concrete, is_concrete, ClassicalPseudogroup};
pub use examples::{
    build_homeo_l, constant_group_presheaf, constant_group_sheaf, from_group_sheaf,
    skyscraper_group_sheaf, GroupSheaf,
};
pub use germs::{
    build_germ_category, build_germ_groupoid, check_decomposition, check_germ_functoriality,
    germ_target_hom_oracle, underlying_map, DecompositionReport, GermArrow, GermGroupoid,
};

use crate::bitset::IndexSet;
use crate::groupoid::TopGroupoid;
use crate::space::{PointMap, Space, SpaceError};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

pub type MorId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PpgError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("T1 dialect requires a T1 space")]
    NotT1Space,
    #[error("hom-set ({0:?}, {1:?}) has no morphism with id {2}")]
    NoSuchMorphism(Vec<u32>, Vec<u32>, MorId),
    #[error("no inclusion morphism for non-nested opens {0:?} ⊄ {1:?}")]
    NotNested(Vec<u32>, Vec<u32>),
    #[error("composite target missing from hom-set: {0}")]
    NotClosed(String),
    #[error("germ decomposition violated at point {x}: germ `{germ}` of C_{x}({v:?}) has {targets} targets")]
    DecompositionViolated { x: u32, v: Vec<u32>, germ: String, targets: usize },
    #[error("germ category is not a groupoid: arrow `{arrow}` from {x} to {y} has no two-sided inverse")]
    NotAGroupoid { x: u32, y: u32, arrow: String },
    #[error("germ composition is not well-defined: {0}")]
    IllDefinedComposition(String),
    #[error("pre-pseudogroup is not a pseudogroup sheaf: {0}")]
    NotAPseudogroupSheaf(String),
    #[error("underlying-map functor is not faithful")]
    NotConcrete,
    #[error("classical pseudogroup axioms violated: {0}")]
    NotAPseudogroup(String),
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
    #[error("backend invariant broken: {0}")]
    Internal(String),
}

/// Table-backed data: everything explicit, as loaded from a file or built
/// by hand.
pub struct TableData {
    /// `(U, V, W) ↦ table[g][f]` for `g ∈ hom(V, W)`, `f ∈ hom(U, V)`.
    pub compose: BTreeMap<(IndexSet, IndexSet, IndexSet), Vec<Vec<MorId>>>,
    pub incl: BTreeMap<(IndexSet, IndexSet), MorId>,
    pub underlying: Option<BTreeMap<(IndexSet, IndexSet), Vec<PointMap>>>,
}

/// Morphisms are point maps composed as functions (local homeomorphism
/// categories, classical pseudogroups viewed into larger codomains).
pub struct MapsData {
    pub maps: BTreeMap<(IndexSet, IndexSet), Vec<PointMap>>,
}

/// The group-sheaf construction: `hom(U, V) = F(U)` when `U ⊆ V`, empty
/// otherwise; composition restricts the left factor and multiplies.
pub struct GroupData {
    pub sheaf: GroupSheaf,
}

/// The category of local sections of a topological groupoid:
/// `hom(U, V) = { f : U → t⁻¹(V) | s ∘ f = id }`.
pub struct SectionsData {
    pub groupoid: Arc<TopGroupoid>,
    /// Sections stored as maps into the full arrow space.
    pub sections: BTreeMap<(IndexSet, IndexSet), Vec<PointMap>>,
}

/// Families of germs `(a_x ∈ C_x(V))_{x ∈ U}`, composition through germ
/// classification in the parent.
pub struct SharpData {
    pub parent: PrePseudogroup,
    /// Family per morphism: parent ids in `hom(U_x, V)`, one per point of
    /// `U` in ascending order.
    pub families: BTreeMap<(IndexSet, IndexSet), Vec<Vec<MorId>>>,
}

/// A sub-pre-pseudogroup: a subset of each parent hom-set, closed under
/// composition and containing the inclusions.
pub struct SubData {
    pub parent: PrePseudogroup,
    pub members: BTreeMap<(IndexSet, IndexSet), Vec<MorId>>,
}

pub enum Backend {
    Table(TableData),
    Maps(MapsData),
    Group(GroupData),
    Sections(SectionsData),
    Sharp(SharpData),
    Sub(SubData),
}

struct PpgData {
    space: Space,
    opens: Vec<IndexSet>,
    labels: BTreeMap<(IndexSet, IndexSet), Vec<String>>,
    backend: Backend,
    /// Germ-classification cache: `(x, V) ↦` for each `f ∈ hom(U_x, V)` the
    /// points `y ∈ V` whose germ hom embeds onto it, with the preimages.
    classify_cache: Mutex<BTreeMap<(usize, IndexSet), Arc<ClassifyTable>>>,
}

/// For one `(x, V)`: `targets[f]` lists `(y, lift)` pairs with
/// `ι(lift) = f` for `lift ∈ hom(U_x, U_y)`.
pub(crate) struct ClassifyTable {
    pub targets: Vec<Vec<(usize, MorId)>>,
}

#[derive(Clone)]
pub struct PrePseudogroup {
    data: Arc<PpgData>,
}

impl PrePseudogroup {
    pub(crate) fn from_backend(
        space: Space,
        labels: BTreeMap<(IndexSet, IndexSet), Vec<String>>,
        backend: Backend,
    ) -> Result<PrePseudogroup, PpgError> {
        let opens = space.opens()?.to_vec();
        Ok(PrePseudogroup {
            data: Arc::new(PpgData {
                space,
                opens,
                labels,
                backend,
                classify_cache: Mutex::new(BTreeMap::new()),
            }),
        })
    }

    pub fn space(&self) -> &Space {
        &self.data.space
    }

    pub fn opens(&self) -> &[IndexSet] {
        &self.data.opens
    }

    pub(crate) fn backend(&self) -> &Backend {
        &self.data.backend
    }

    pub fn hom_len(&self, u: &IndexSet, v: &IndexSet) -> usize {
        self.data.labels.get(&(u.clone(), v.clone())).map(|l| l.len()).unwrap_or(0)
    }

    pub fn hom_label(&self, u: &IndexSet, v: &IndexSet, f: MorId) -> String {
        self.data.labels[&(u.clone(), v.clone())][f as usize].clone()
    }

    /// Total morphism count, for budgeting decisions.
    pub fn total_morphisms(&self) -> usize {
        self.data.labels.values().map(|l| l.len()).sum()
    }

    fn ids(&self, s: &IndexSet) -> Vec<u32> {
        self.data.space.external_ids(s)
    }

    fn guard(&self, u: &IndexSet, v: &IndexSet, f: MorId) -> Result<(), PpgError> {
        if (f as usize) < self.hom_len(u, v) {
            Ok(())
        } else {
            Err(PpgError::NoSuchMorphism(self.ids(u), self.ids(v), f))
        }
    }

    /// `g ∘ f` for `g ∈ hom(V, W)`, `f ∈ hom(U, V)`.
    pub fn compose(
        &self,
        u: &IndexSet,
        v: &IndexSet,
        w: &IndexSet,
        g: MorId,
        f: MorId,
    ) -> Result<MorId, PpgError> {
        self.guard(v, w, g)?;
        self.guard(u, v, f)?;
        match &self.data.backend {
            Backend::Table(t) => {
                let table = t
                    .compose
                    .get(&(u.clone(), v.clone(), w.clone()))
                    .ok_or_else(|| PpgError::NotClosed(format!(
                        "no composition table for {:?}→{:?}→{:?}",
                        self.ids(u), self.ids(v), self.ids(w)
                    )))?;
                Ok(table[g as usize][f as usize])
            }
            Backend::Maps(m) => {
                let fm = &m.maps[&(u.clone(), v.clone())][f as usize];
                let gm = &m.maps[&(v.clone(), w.clone())][g as usize];
                let composed = fm.then(gm).map_err(PpgError::Space)?;
                let list = &m.maps[&(u.clone(), w.clone())];
                list.iter()
                    .position(|h| h == &composed)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed(format!("{composed:?} not in hom-set")))
            }
            Backend::Group(gd) => {
                // g ∈ F(V), f ∈ F(U), U ⊆ V ⊆ W: restrict g to U, multiply.
                let sheaf = &gd.sheaf;
                let g_restr = sheaf.presheaf.restrict(v, u, g);
                let table = &sheaf.groups[u];
                Ok(table.mul(g_restr, f))
            }
            Backend::Sections(sd) => {
                let fm = &sd.sections[&(u.clone(), v.clone())][f as usize];
                let gm = &sd.sections[&(v.clone(), w.clone())][g as usize];
                let composed = compose_sections(&sd.groupoid, fm, gm)?;
                let list = &sd.sections[&(u.clone(), w.clone())];
                list.iter()
                    .position(|h| h == &composed)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed(format!("{composed:?} not a section")))
            }
            Backend::Sharp(sh) => {
                let fa = &sh.families[&(u.clone(), v.clone())][f as usize];
                let ga = &sh.families[&(v.clone(), w.clone())][g as usize];
                let composed = compose_families(&sh.parent, u, v, w, fa, ga)?;
                let list = &sh.families[&(u.clone(), w.clone())];
                list.iter()
                    .position(|h| h == &composed)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("family not present".into()))
            }
            Backend::Sub(sb) => {
                let key_uv = (u.clone(), v.clone());
                let key_vw = (v.clone(), w.clone());
                let pf = sb.members[&key_uv][f as usize];
                let pg = sb.members[&key_vw][g as usize];
                let composed = sb.parent.compose(u, v, w, pg, pf)?;
                sb.members[&(u.clone(), w.clone())]
                    .iter()
                    .position(|&h| h == composed)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("composite left the sub-category".into()))
            }
        }
    }

    /// The distinguished inclusion morphism in `hom(U, V)` for `U ⊆ V`.
    pub fn incl(&self, u: &IndexSet, v: &IndexSet) -> Result<MorId, PpgError> {
        if !u.is_subset(v) {
            return Err(PpgError::NotNested(self.ids(u), self.ids(v)));
        }
        match &self.data.backend {
            Backend::Table(t) => t
                .incl
                .get(&(u.clone(), v.clone()))
                .copied()
                .ok_or_else(|| PpgError::NotClosed("missing inclusion".into())),
            Backend::Maps(m) => {
                let uo = self.data.space.open_set(u.clone())?;
                let vo = self.data.space.open_set(v.clone())?;
                let inc = PointMap::inclusion(&uo, &vo)?;
                m.maps[&(u.clone(), v.clone())]
                    .iter()
                    .position(|h| h == &inc)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("inclusion map not present".into()))
            }
            Backend::Group(_) => Ok(0), // the group identity
            Backend::Sections(sd) => {
                let unit = unit_section(&sd.groupoid, u, v)?;
                sd.sections[&(u.clone(), v.clone())]
                    .iter()
                    .position(|h| h == &unit)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("unit section not present".into()))
            }
            Backend::Sharp(sh) => {
                let fam = incl_family(&sh.parent, u, v)?;
                sh.families[&(u.clone(), v.clone())]
                    .iter()
                    .position(|h| h == &fam)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("inclusion family not present".into()))
            }
            Backend::Sub(sb) => {
                let parent_incl = sb.parent.incl(u, v)?;
                sb.members[&(u.clone(), v.clone())]
                    .iter()
                    .position(|&h| h == parent_incl)
                    .map(|i| i as MorId)
                    .ok_or_else(|| PpgError::NotClosed("inclusion left the sub-category".into()))
            }
        }
    }

    /// The underlying point map of a morphism, where the backend carries
    /// one: explicit tables with underlying data, map-backed and
    /// section-backed categories (where it is `t ∘ f`), group sheaves
    /// (inclusions), and derived backends that delegate. Returns `None` for
    /// backends without intrinsic underlying data.
    pub fn intrinsic_underlying(
        &self,
        u: &IndexSet,
        v: &IndexSet,
        f: MorId,
    ) -> Result<Option<PointMap>, PpgError> {
        self.guard(u, v, f)?;
        match &self.data.backend {
            Backend::Table(t) => Ok(t
                .underlying
                .as_ref()
                .and_then(|m| m.get(&(u.clone(), v.clone())))
                .map(|maps| maps[f as usize].clone())),
            Backend::Maps(m) => Ok(Some(m.maps[&(u.clone(), v.clone())][f as usize].clone())),
            Backend::Group(_) => {
                let uo = self.data.space.open_set(u.clone())?;
                let vo = self.data.space.open_set(v.clone())?;
                Ok(Some(PointMap::inclusion(&uo, &vo)?))
            }
            Backend::Sections(sd) => {
                let sec = &sd.sections[&(u.clone(), v.clone())][f as usize];
                Ok(Some(section_underlying(&sd.groupoid, sec, v)?))
            }
            Backend::Sharp(sh) => {
                // Families over a T1-style parent: classify each germ.
                let fam = &sh.families[&(u.clone(), v.clone())][f as usize];
                family_underlying(&sh.parent, u, v, fam).map(Some)
            }
            Backend::Sub(sb) => {
                let pid = sb.members[&(u.clone(), v.clone())][f as usize];
                sb.parent.intrinsic_underlying(u, v, pid)
            }
        }
    }

    /// Minimal open of a point index.
    pub(crate) fn min_open(&self, x: usize) -> &IndexSet {
        self.data.space.min_open(x)
    }

    /// Germ hom-set `C_x(V)`, attained at the minimal open: the ids of
    /// `hom(U_x, V)`.
    pub fn germ_hom(&self, x: usize, v: &IndexSet) -> usize {
        self.hom_len(self.min_open(x), v)
    }

    /// Embeds `C_x(V) → C_x(V')` for `V ⊆ V'` by post-composition with the
    /// inclusion.
    pub fn postcompose_incl(
        &self,
        x: usize,
        v: &IndexSet,
        v2: &IndexSet,
        f: MorId,
    ) -> Result<MorId, PpgError> {
        let ux = self.min_open(x).clone();
        let inc = self.incl(v, v2)?;
        self.compose(&ux, v, v2, inc, f)
    }

    pub(crate) fn classify_table(
        &self,
        x: usize,
        v: &IndexSet,
    ) -> Result<Arc<ClassifyTable>, PpgError> {
        if let Some(t) = self.data.classify_cache.lock().unwrap().get(&(x, v.clone())) {
            return Ok(t.clone());
        }
        let ux = self.min_open(x).clone();
        let n = self.hom_len(&ux, v);
        let mut targets: Vec<Vec<(usize, MorId)>> = vec![Vec::new(); n];
        for y in v.iter() {
            let uy = self.min_open(y).clone();
            if !uy.is_subset(v) {
                return Err(PpgError::Internal("minimal open escapes its open".into()));
            }
            for lift in 0..self.hom_len(&ux, &uy) as MorId {
                let image = self.postcompose_incl(x, &uy, v, lift)?;
                targets[image as usize].push((y, lift));
            }
        }
        let table = Arc::new(ClassifyTable { targets });
        self.data
            .classify_cache
            .lock()
            .unwrap()
            .insert((x, v.clone()), table.clone());
        Ok(table)
    }

    /// The unique `y ∈ V` with `f ∈ Im(C_x^y → C_x(V))`, together with the
    /// unique lift. Errors when the decomposition fails to make the target
    /// unique.
    pub fn classify_germ(
        &self,
        x: usize,
        v: &IndexSet,
        f: MorId,
    ) -> Result<(usize, MorId), PpgError> {
        let table = self.classify_table(x, v)?;
        let hits = &table.targets[f as usize];
        // Several (y, lift) pairs may share one y only if lifts collide;
        // distinct ys mean the coproduct decomposition is broken.
        let mut ys: Vec<usize> = hits.iter().map(|&(y, _)| y).collect();
        ys.dedup();
        if ys.len() != 1 || hits.len() != 1 {
            return Err(PpgError::DecompositionViolated {
                x: self.data.space.point(x).0,
                v: self.ids(v),
                germ: self.hom_label(self.min_open(x), v, f),
                targets: hits.len(),
            });
        }
        Ok(hits[0])
    }

    /// Germ-level target point of `f ∈ hom(U, V)` at `x ∈ U`, through the
    /// nonT1 underlying functor when present, through classification
    /// otherwise.
    pub fn germ_target_point(
        &self,
        u: &IndexSet,
        v: &IndexSet,
        f: MorId,
        x: usize,
    ) -> Result<usize, PpgError> {
        let ux = self.min_open(x).clone();
        let inc = self.incl(&ux, u)?;
        let germ = self.compose(&ux, u, v, f, inc)?;
        if let Some(map) = self.intrinsic_underlying(&ux, v, germ)? {
            let p = map.apply(self.data.space.point(x)).map_err(PpgError::Space)?;
            return Ok(self.data.space.index_of(p)?);
        }
        Ok(self.classify_germ(x, v, germ)?.0)
    }
}

/// Composition law of a section category:
/// `(g ∘ f)(x) = comp(g(t(f(x))), f(x))`.
pub(crate) fn compose_sections(
    gpd: &TopGroupoid,
    f: &PointMap,
    g: &PointMap,
) -> Result<PointMap, PpgError> {
    let mut assign = BTreeMap::new();
    for (xi, ai) in f.graph() {
        let x = f.domain().space().point(xi);
        let t_f_x = gpd.target_of(ai);
        let g_at = g.apply(gpd.base.point(t_f_x)).map_err(PpgError::Space)?;
        let gi = gpd.arrows.index_of(g_at)?;
        let composed = gpd
            .compose(gi, ai)
            .ok_or_else(|| PpgError::Internal("section composition hit a non-composable pair".into()))?;
        assign.insert(x, gpd.arrows.point(composed));
    }
    let dom = f.domain().clone();
    let cod = g.codomain().clone();
    PointMap::new(dom, cod, &assign).map_err(PpgError::Space)
}

/// The unit section `x ↦ i(x)` of `U` viewed into `t⁻¹(V)`, for `U ⊆ V`.
pub(crate) fn unit_section(
    gpd: &TopGroupoid,
    u: &IndexSet,
    v: &IndexSet,
) -> Result<PointMap, PpgError> {
    let t_inv = gpd.target_preimage(v);
    let dom = gpd.base.open_set(u.clone())?;
    let cod = gpd.arrows.open_set(t_inv)?;
    let mut assign = BTreeMap::new();
    for x in u.iter() {
        assign.insert(gpd.base.point(x), gpd.arrows.point(gpd.identity_of(x)));
    }
    PointMap::new(dom, cod, &assign).map_err(PpgError::Space)
}

/// `t ∘ f` of a section, as a map `U → V`.
pub(crate) fn section_underlying(
    gpd: &TopGroupoid,
    sec: &PointMap,
    v: &IndexSet,
) -> Result<PointMap, PpgError> {
    let dom = sec.domain().clone();
    let cod = gpd.base.open_set(v.clone())?;
    let mut assign = BTreeMap::new();
    for (xi, ai) in sec.graph() {
        assign.insert(dom.space().point(xi), gpd.base.point(gpd.target_of(ai)));
    }
    PointMap::new(dom, cod, &assign).map_err(PpgError::Space)
}

/// Composition of germ families through classification in the parent:
/// `(b ∘ a)_x = b_y ∘ lift(a_x)` where `a_x` classifies to `y`.
pub(crate) fn compose_families(
    parent: &PrePseudogroup,
    u: &IndexSet,
    v: &IndexSet,
    w: &IndexSet,
    a: &[MorId],
    b: &[MorId],
) -> Result<Vec<MorId>, PpgError> {
    let v_points = v.indices();
    let mut out = Vec::with_capacity(a.len());
    for (pos, x) in u.iter().enumerate() {
        let (y, lift) = parent.classify_germ(x, v, a[pos])?;
        let b_y = b[v_points.iter().position(|&p| p == y).unwrap()];
        let ux = parent.min_open(x).clone();
        let uy = parent.min_open(y).clone();
        out.push(parent.compose(&ux, &uy, w, b_y, lift)?);
    }
    Ok(out)
}

/// The inclusion family: the germ of `incl(U, V)` at each point of `U`,
/// i.e. `incl(U_x, V)`.
pub(crate) fn incl_family(
    parent: &PrePseudogroup,
    u: &IndexSet,
    v: &IndexSet,
) -> Result<Vec<MorId>, PpgError> {
    u.iter().map(|x| parent.incl(parent.min_open(x), v)).collect()
}

/// Underlying map of a germ family via classification.
pub(crate) fn family_underlying(
    parent: &PrePseudogroup,
    u: &IndexSet,
    v: &IndexSet,
    fam: &[MorId],
) -> Result<PointMap, PpgError> {
    let space = parent.space().clone();
    let dom = space.open_set(u.clone())?;
    let cod = space.open_set(v.clone())?;
    let mut assign = BTreeMap::new();
    for (pos, x) in u.iter().enumerate() {
        let (y, _) = parent.classify_germ(x, v, fam[pos])?;
        assign.insert(space.point(x), space.point(y));
    }
    PointMap::new(dom, cod, &assign).map_err(PpgError::Space)
}
