//! The two canonical pre-pseudogroup constructions: the category of local
//! homeomorphisms between opens, and the category built from a sheaf (or
//! presheaf) of groups with `hom(U, V) = F(U)` for `U ⊆ V`.

use super::{Backend, GroupData, MapsData, PpgError, PrePseudogroup};
use crate::bitset::IndexSet;
use crate::corpus::groups::GroupTable;
use crate::presheaf::Presheaf;
use crate::space::{all_point_maps, map_cmp, Point, Space};
use std::collections::BTreeMap;

const MAP_ENUM_CAP: usize = 1 << 20;

/// All local homeomorphisms between all pairs of opens, composed as maps.
pub fn build_homeo_l(space: &Space) -> Result<PrePseudogroup, PpgError> {
    let opens = space.opens()?.to_vec();
    let mut estimated: usize = 0;
    for u in &opens {
        for v in &opens {
            estimated = estimated
                .saturating_add((v.len().max(1)).saturating_pow(u.len() as u32));
        }
    }
    if estimated > MAP_ENUM_CAP {
        return Err(PpgError::EnumerationBudget(format!(
            "about {estimated} candidate maps exceed the cap {MAP_ENUM_CAP}"
        )));
    }
    let mut maps = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let uo = space.open_set(u.clone())?;
            let vo = space.open_set(v.clone())?;
            let mut found: Vec<crate::space::PointMap> = all_point_maps(&uo, &vo)
                .into_iter()
                .filter(|m| m.is_local_homeo().ok)
                .collect();
            found.sort_by(map_cmp);
            labels.insert(
                (u.clone(), v.clone()),
                found.iter().map(|m| format!("{m:?}")).collect::<Vec<String>>(),
            );
            maps.insert((u.clone(), v.clone()), found);
        }
    }
    PrePseudogroup::from_backend(space.clone(), labels, Backend::Maps(MapsData { maps }))
}

/// A presheaf of groups: group structure per open with restrictions as
/// homomorphisms. Identity element is id 0 by convention.
pub struct GroupSheaf {
    pub presheaf: Presheaf,
    pub groups: BTreeMap<IndexSet, GroupTable>,
}

impl GroupSheaf {
    /// Group axioms per open plus the homomorphism property of every
    /// restriction.
    pub fn validate(&self) -> Result<(), PpgError> {
        let space = self.presheaf.space().clone();
        let report = self.presheaf.check()?;
        if !report.is_clean() {
            return Err(PpgError::Internal(format!(
                "group presheaf is invalid: {:?}",
                report.violations
            )));
        }
        let opens = space.opens()?.to_vec();
        for u in &opens {
            let g = self
                .groups
                .get(u)
                .ok_or_else(|| PpgError::Internal("missing group table".into()))?;
            if g.order() != self.presheaf.n_sections(u) || !g.is_valid() {
                return Err(PpgError::Internal(format!(
                    "invalid group at {:?}",
                    space.external_ids(u)
                )));
            }
        }
        for u in &opens {
            for v in &opens {
                if !v.is_subset(u) {
                    continue;
                }
                let (gu, gv) = (&self.groups[u], &self.groups[v]);
                let res = |a: u32| self.presheaf.restrict(u, v, a);
                if res(0) != 0 {
                    return Err(PpgError::Internal("restriction does not fix identity".into()));
                }
                for a in 0..gu.order() as u32 {
                    for b in 0..gu.order() as u32 {
                        if res(gu.mul(a, b)) != gv.mul(res(a), res(b)) {
                            return Err(PpgError::Internal(format!(
                                "restriction {:?} → {:?} is not a homomorphism",
                                space.external_ids(u),
                                space.external_ids(v)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `hom(U, V) = F(U)` for `U ⊆ V`, empty otherwise; composition restricts
/// the left factor to the smaller open and multiplies there; the inclusion
/// is the group identity.
pub fn from_group_sheaf(sheaf: GroupSheaf) -> Result<PrePseudogroup, PpgError> {
    sheaf.validate()?;
    let space = sheaf.presheaf.space().clone();
    let opens = space.opens()?.to_vec();
    let mut labels = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            let l: Vec<String> = if u.is_subset(v) {
                sheaf.presheaf.section_labels(u).to_vec()
            } else {
                Vec::new()
            };
            labels.insert((u.clone(), v.clone()), l);
        }
    }
    PrePseudogroup::from_backend(space, labels, Backend::Group(GroupData { sheaf }))
}

/// Mixed-radix helpers shared by the locally-constant construction.
fn digits(mut id: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; radices.len()];
    for (i, &r) in radices.iter().enumerate().rev() {
        out[i] = id % r;
        id /= r;
    }
    out
}

fn compose_id(ds: &[usize], radices: &[usize]) -> usize {
    ds.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

/// The constant sheaf of a group: sections over `U` are locally constant
/// functions `U → G`, i.e. one group element per connected component.
pub fn constant_group_sheaf(space: &Space, group: &GroupTable) -> Result<GroupSheaf, PpgError> {
    let opens = space.opens()?.to_vec();
    let comps: BTreeMap<IndexSet, Vec<IndexSet>> = opens
        .iter()
        .map(|u| (u.clone(), space.connected_components(u)))
        .collect();
    let k = group.order();
    let mut sections = BTreeMap::new();
    let mut groups = BTreeMap::new();
    for u in &opens {
        let n_comp = comps[u].len();
        let radices = vec![k; n_comp];
        let total = k.pow(n_comp as u32);
        let labels: Vec<String> = (0..total)
            .map(|id| {
                let ds = digits(id, &radices);
                if ds.is_empty() {
                    "()".into()
                } else {
                    ds.iter().map(|d| format!("g{d}")).collect::<Vec<_>>().join("|")
                }
            })
            .collect();
        sections.insert(u.clone(), labels);
        // Pointwise group structure on tuples.
        let mul = (0..total)
            .map(|a| {
                let da = digits(a, &radices);
                (0..total)
                    .map(|b| {
                        let db = digits(b, &radices);
                        let prod: Vec<usize> = da
                            .iter()
                            .zip(&db)
                            .map(|(&x, &y)| group.mul(x as u32, y as u32) as usize)
                            .collect();
                        compose_id(&prod, &radices) as u32
                    })
                    .collect()
            })
            .collect();
        groups.insert(u.clone(), GroupTable { name: format!("{}^{}", group.name, n_comp), mul });
    }
    let mut res = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let radices_u = vec![k; comps[u].len()];
            let radices_v = vec![k; comps[v].len()];
            // Each component of v sits inside exactly one component of u.
            let parent: Vec<usize> = comps[v]
                .iter()
                .map(|cv| {
                    comps[u]
                        .iter()
                        .position(|cu| cv.is_subset(cu))
                        .expect("components nest")
                })
                .collect();
            let total = k.pow(comps[u].len() as u32);
            let table = (0..total)
                .map(|id| {
                    let ds = digits(id, &radices_u);
                    let sub: Vec<usize> = parent.iter().map(|&p| ds[p]).collect();
                    compose_id(&sub, &radices_v) as u32
                })
                .collect();
            res.insert((u.clone(), v.clone()), table);
        }
    }
    let presheaf = Presheaf::new(space.clone(), sections, res);
    Ok(GroupSheaf { presheaf, groups })
}

/// The skyscraper sheaf of a group at a point.
pub fn skyscraper_group_sheaf(
    space: &Space,
    at: Point,
    group: &GroupTable,
) -> Result<GroupSheaf, PpgError> {
    let xi = space.index_of(at)?;
    let opens = space.opens()?.to_vec();
    let trivial = GroupTable { name: "1".into(), mul: vec![vec![0]] };
    let mut sections = BTreeMap::new();
    let mut groups = BTreeMap::new();
    for u in &opens {
        if u.contains(xi) {
            sections.insert(
                u.clone(),
                (0..group.order()).map(|g| format!("g{g}")).collect::<Vec<String>>(),
            );
            groups.insert(u.clone(), group.clone());
        } else {
            sections.insert(u.clone(), vec!["()".to_string()]);
            groups.insert(u.clone(), trivial.clone());
        }
    }
    let mut res = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let table: Vec<u32> = if v.contains(xi) {
                (0..group.order() as u32).collect()
            } else {
                vec![0; sections[u].len()]
            };
            res.insert((u.clone(), v.clone()), table);
        }
    }
    let presheaf = Presheaf::new(space.clone(), sections, res);
    Ok(GroupSheaf { presheaf, groups })
}

/// A group presheaf that deliberately fails the sheaf condition: the plain
/// constant presheaf `U ↦ G` (not locally constant) on a disconnected
/// space.
pub fn constant_group_presheaf(space: &Space, group: &GroupTable) -> Result<GroupSheaf, PpgError> {
    let opens = space.opens()?.to_vec();
    let mut sections = BTreeMap::new();
    let mut groups = BTreeMap::new();
    for u in &opens {
        sections.insert(
            u.clone(),
            (0..group.order()).map(|g| format!("g{g}")).collect::<Vec<String>>(),
        );
        groups.insert(u.clone(), group.clone());
    }
    let mut res = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if v.is_subset(u) {
                res.insert((u.clone(), v.clone()), (0..group.order() as u32).collect::<Vec<u32>>());
            }
        }
    }
    // The empty open must still carry the trivial group for the sheaf
    // condition at the empty cover to stand a chance; leaving the full
    // group there is exactly the deliberate failure.
    let presheaf = Presheaf::new(space.clone(), sections, res);
    Ok(GroupSheaf { presheaf, groups })
}
