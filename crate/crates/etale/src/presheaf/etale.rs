//! The etale space of a presheaf: the bundle of all germs, topologized by
//! the basic sets `[f, U] = { germ of f at x : x ∈ U }`.

use super::Presheaf;
use crate::bitset::IndexSet;
use crate::space::{OpenSet, Point, PointMap, Space, SpaceError};
use std::collections::BTreeMap;

/// The total space of germs with its projection to the base.
pub struct EtaleBundle {
    pub total: Space,
    pub base: Space,
    /// Germ per total-space point index: `(base point index, stalk id)`.
    pub germs: Vec<(usize, u32)>,
    /// Inverse of `germs`.
    pub germ_index: BTreeMap<(usize, u32), usize>,
    /// The projection sending a germ to its base point.
    pub projection: PointMap,
    /// Deduplicated basic opens with a display label `[f, U]`.
    pub basics: Vec<(IndexSet, String)>,
}

impl EtaleBundle {
    pub fn germ_point(&self, base_index: usize, stalk_id: u32) -> Point {
        self.total.point(self.germ_index[&(base_index, stalk_id)])
    }

    /// The basic open `[f, U]` as a germ-index set.
    pub fn basic_open(&self, p: &Presheaf, u: &IndexSet, sid: u32) -> IndexSet {
        let mut set = IndexSet::empty(self.germs.len());
        for x in u.iter() {
            let ux = self.base.min_open(x);
            let germ = p.restrict(u, ux, sid);
            set.insert(self.germ_index[&(x, germ)]);
        }
        set
    }
}

/// Builds the etale space of a presheaf. Points of the total space are all
/// germs `(x, s ∈ P(U_x))`; the topology is generated by the basic opens,
/// which on a finite space means each germ's minimal neighborhood is the
/// intersection of the basics containing it.
pub fn etale_space(p: &Presheaf) -> Result<EtaleBundle, SpaceError> {
    let base = p.space().clone();
    let mut germs: Vec<(usize, u32)> = Vec::new();
    for x in 0..base.n_points() {
        let ux = base.min_open(x);
        for sid in 0..p.n_sections(ux) as u32 {
            germs.push((x, sid));
        }
    }
    let germ_index: BTreeMap<(usize, u32), usize> =
        germs.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let n = germs.len();

    let mut basics: BTreeMap<IndexSet, String> = BTreeMap::new();
    for u in base.opens()? {
        for sid in 0..p.n_sections(u) as u32 {
            let mut set = IndexSet::empty(n);
            for x in u.iter() {
                let ux = base.min_open(x);
                set.insert(germ_index[&(x, p.restrict(u, ux, sid))]);
            }
            basics
                .entry(set)
                .or_insert_with(|| format!("[{},{:?}]", p.label(u, sid), base.external_ids(u)));
        }
    }

    let min_open: Vec<IndexSet> = (0..n)
        .map(|g| {
            let mut acc = IndexSet::full(n);
            let mut hit = false;
            for b in basics.keys() {
                if b.contains(g) {
                    acc = acc.intersect(b);
                    hit = true;
                }
            }
            // Every germ lies in the basic open of its own representative.
            debug_assert!(hit);
            acc
        })
        .collect();

    let total = Space::from_min_opens((0..n as u32).map(Point).collect(), min_open)?;
    let vals: Vec<u32> = germs.iter().map(|&(x, _)| x as u32).collect();
    let projection = PointMap::from_indices(total.full_open(), base.full_open(), vals);
    Ok(EtaleBundle {
        total,
        base,
        germs,
        germ_index,
        projection,
        basics: basics.into_iter().collect(),
    })
}

/// Test oracle: the generated topology computed literally, as the closure
/// of the basic opens together with `∅` and the full set under pairwise
/// unions and intersections.
pub fn generated_topology_oracle(bundle: &EtaleBundle) -> Vec<IndexSet> {
    let n = bundle.germs.len();
    let mut family: std::collections::BTreeSet<IndexSet> = std::collections::BTreeSet::new();
    family.insert(IndexSet::empty(n));
    family.insert(IndexSet::full(n));
    for (b, _) in &bundle.basics {
        family.insert(b.clone());
    }
    loop {
        let snapshot: Vec<IndexSet> = family.iter().cloned().collect();
        let before = family.len();
        for a in &snapshot {
            for b in &snapshot {
                family.insert(a.union(b));
                family.insert(a.intersect(b));
            }
        }
        if family.len() == before {
            break;
        }
    }
    family.into_iter().collect()
}

/// Helper: the image of a basic open under the projection is its defining
/// open (used by the tests).
pub fn projection_image(bundle: &EtaleBundle, basic: &IndexSet) -> IndexSet {
    let mut img = IndexSet::empty(bundle.base.n_points());
    for g in basic.iter() {
        img.insert(bundle.germs[g].0);
    }
    img
}

#[allow(dead_code)]
fn open_set_of(bundle: &EtaleBundle, set: IndexSet) -> OpenSet {
    bundle.total.open_set(set).expect("open in total space")
}
