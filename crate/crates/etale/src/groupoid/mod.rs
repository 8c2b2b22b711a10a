//! Topological groupoids over finite spaces.
//!
//! A groupoid is a pair of finite spaces (base and arrows) with source,
//! target, identity, inversion and composition data. The structural report
//! checks all algebraic axioms and all continuity conditions, including
//! continuity of composition against an explicitly constructed fiber
//! product: the subspace of the product topology on composable pairs,
//! whose minimal opens are the rectangle traces `(U_g × U_f) ∩ G₁ ×ₓ G₁`.

mod from_ppg;
mod prop11;
mod roundtrip;
mod sections;

pub use from_ppg::{arrow_target_of, groupoid_from_pseudogroup, transport_morphism, GroupoidFromPpg, TransportedFunctor};
pub use prop11::{check_prop11, Prop11Report};
pub use roundtrip::{
    roundtrip_groupoid, roundtrip_pseudogroup, GroupoidIsoWitness, PpgIsoWitness, RoundtripError,
};
pub use sections::sections_category;

use crate::bitset::IndexSet;
use crate::report::{Check, CheckStatus};
use crate::space::{Point, PointMap, Space, SpaceError};
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("map `{0}` must be total on {1}")]
    NotTotal(String, String),
    #[error("groupoid is not etale: {0}")]
    NotEtale(String),
    #[error("no local section through arrow {0}")]
    NoSectionThroughArrow(u32),
}

/// A topological groupoid. Arrow and base points are indexed densely; the
/// structure maps are stored as index vectors plus a composition table on
/// exactly the composable pairs.
pub struct TopGroupoid {
    pub base: Space,
    pub arrows: Space,
    s: Vec<usize>,
    t: Vec<usize>,
    i: Vec<usize>,
    inv: Vec<usize>,
    comp: BTreeMap<(usize, usize), usize>,
}

impl TopGroupoid {
    pub fn new(
        base: Space,
        arrows: Space,
        s: BTreeMap<Point, Point>,
        t: BTreeMap<Point, Point>,
        i: BTreeMap<Point, Point>,
        inv: BTreeMap<Point, Point>,
        comp: BTreeMap<(Point, Point), Point>,
    ) -> Result<TopGroupoid, GroupoidError> {
        let arrow_index = |p: Point| arrows.index_of(p).map_err(GroupoidError::Space);
        let base_index = |p: Point| base.index_of(p).map_err(GroupoidError::Space);
        let mut sv = Vec::new();
        let mut tv = Vec::new();
        for &a in arrows.points() {
            let sp = *s.get(&a).ok_or_else(|| GroupoidError::NotTotal("s".into(), "arrows".into()))?;
            let tp = *t.get(&a).ok_or_else(|| GroupoidError::NotTotal("t".into(), "arrows".into()))?;
            sv.push(base_index(sp)?);
            tv.push(base_index(tp)?);
        }
        let mut iv = Vec::new();
        for &x in base.points() {
            let ip = *i.get(&x).ok_or_else(|| GroupoidError::NotTotal("i".into(), "base".into()))?;
            iv.push(arrow_index(ip)?);
        }
        let mut invv = Vec::new();
        for &a in arrows.points() {
            let ia =
                *inv.get(&a).ok_or_else(|| GroupoidError::NotTotal("inv".into(), "arrows".into()))?;
            invv.push(arrow_index(ia)?);
        }
        let mut compv = BTreeMap::new();
        for (&(g, f), &h) in &comp {
            compv.insert((arrow_index(g)?, arrow_index(f)?), arrow_index(h)?);
        }
        Ok(TopGroupoid { base, arrows, s: sv, t: tv, i: iv, inv: invv, comp: compv })
    }

    pub(crate) fn from_indices(
        base: Space,
        arrows: Space,
        s: Vec<usize>,
        t: Vec<usize>,
        i: Vec<usize>,
        inv: Vec<usize>,
        comp: BTreeMap<(usize, usize), usize>,
    ) -> TopGroupoid {
        TopGroupoid { base, arrows, s, t, i, inv, comp }
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.n_points()
    }

    pub fn source_of(&self, arrow: usize) -> usize {
        self.s[arrow]
    }

    pub fn target_of(&self, arrow: usize) -> usize {
        self.t[arrow]
    }

    pub fn identity_of(&self, base_point: usize) -> usize {
        self.i[base_point]
    }

    pub fn inverse_of(&self, arrow: usize) -> usize {
        self.inv[arrow]
    }

    /// `comp(g, f)` when `s(g) = t(f)`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_arrows();
        let mut out = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if self.s[g] == self.t[f] {
                    out.push((g, f));
                }
            }
        }
        out
    }

    /// Arrows whose target lies in the given base subset.
    pub fn target_preimage(&self, v: &IndexSet) -> IndexSet {
        let mut out = IndexSet::empty(self.n_arrows());
        for a in 0..self.n_arrows() {
            if v.contains(self.t[a]) {
                out.insert(a);
            }
        }
        out
    }

    pub fn source_preimage(&self, v: &IndexSet) -> IndexSet {
        let mut out = IndexSet::empty(self.n_arrows());
        for a in 0..self.n_arrows() {
            if v.contains(self.s[a]) {
                out.insert(a);
            }
        }
        out
    }

    pub fn source_map(&self) -> PointMap {
        let vals = self.s.iter().map(|&x| x as u32).collect();
        PointMap::from_indices(self.arrows.full_open(), self.base.full_open(), vals)
    }

    pub fn target_map(&self) -> PointMap {
        let vals = self.t.iter().map(|&x| x as u32).collect();
        PointMap::from_indices(self.arrows.full_open(), self.base.full_open(), vals)
    }

    pub fn identity_map(&self) -> PointMap {
        let vals = self.i.iter().map(|&a| a as u32).collect();
        PointMap::from_indices(self.base.full_open(), self.arrows.full_open(), vals)
    }

    pub fn inversion_map(&self) -> PointMap {
        let vals = self.inv.iter().map(|&a| a as u32).collect();
        PointMap::from_indices(self.arrows.full_open(), self.arrows.full_open(), vals)
    }

    /// The fiber product `G₁ ×ₓ G₁` of composable pairs with the subspace
    /// topology of the product: minimal opens are rectangle traces. Returns
    /// the space together with the pair carried by each point.
    pub fn fiber_product(&self) -> (Space, Vec<(usize, usize)>) {
        let pairs = self.composable_pairs();
        let n = pairs.len();
        let min_open: Vec<IndexSet> = pairs
            .iter()
            .map(|&(g, f)| {
                let ug = self.arrows.min_open(g);
                let uf = self.arrows.min_open(f);
                let mut m = IndexSet::empty(n);
                for (j, &(g2, f2)) in pairs.iter().enumerate() {
                    if ug.contains(g2) && uf.contains(f2) {
                        m.insert(j);
                    }
                }
                m
            })
            .collect();
        let space =
            Space::from_min_opens((0..n as u32).map(Point).collect(), min_open).expect("preorder");
        (space, pairs)
    }

    /// Composition as a point map from the explicit fiber product.
    pub fn composition_map(&self) -> Option<(PointMap, Space)> {
        let (fp, pairs) = self.fiber_product();
        let mut vals = Vec::with_capacity(pairs.len());
        for &(g, f) in &pairs {
            vals.push(self.compose(g, f)? as u32);
        }
        Some((
            PointMap::from_indices(fp.full_open(), self.arrows.full_open(), vals),
            fp,
        ))
    }
}

/// Structural report: algebraic groupoid axioms plus continuity of all five
/// structure maps, composition checked against the explicit fiber product.
pub fn check_groupoid(g: &TopGroupoid) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name: &str, ok: bool, witness: Option<serde_json::Value>| {
        checks.push(Check {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            witness: if ok { None } else { witness },
        });
    };

    let n = g.n_arrows();
    let arrow_id = |a: usize| g.arrows.point(a).0;
    let base_id = |x: usize| g.base.point(x).0;

    // Identities are units with the right endpoints.
    let mut bad = None;
    for x in 0..g.base.n_points() {
        let ia = g.identity_of(x);
        if g.source_of(ia) != x || g.target_of(ia) != x {
            bad = Some(json!({ "point": base_id(x) }));
        }
    }
    push("identity_endpoints", bad.is_none(), bad);

    let mut bad = None;
    for f in 0..n {
        let left = g.compose(g.identity_of(g.target_of(f)), f);
        let right = g.compose(f, g.identity_of(g.source_of(f)));
        if left != Some(f) || right != Some(f) {
            bad = Some(json!({ "arrow": arrow_id(f) }));
        }
    }
    push("unit_laws", bad.is_none(), bad);

    // comp total on composable pairs and nowhere else.
    let mut bad = None;
    for pair in g.comp.keys() {
        if g.source_of(pair.0) != g.target_of(pair.1) {
            bad = Some(json!({ "pair": [arrow_id(pair.0), arrow_id(pair.1)], "reason": "not composable" }));
        }
    }
    for (gg, ff) in g.composable_pairs() {
        if g.compose(gg, ff).is_none() {
            bad = Some(json!({ "pair": [arrow_id(gg), arrow_id(ff)], "reason": "missing composite" }));
        }
    }
    push("composition_totality", bad.is_none(), bad);

    let mut bad = None;
    'assoc: for (gg, ff) in g.composable_pairs() {
        for h in 0..n {
            if g.source_of(h) != g.target_of(gg) {
                continue;
            }
            let left = g.compose(h, gg).and_then(|hg| g.compose(hg, ff));
            let right = g.compose(gg, ff).and_then(|gf| g.compose(h, gf));
            if left != right || left.is_none() {
                bad = Some(json!({ "triple": [arrow_id(h), arrow_id(gg), arrow_id(ff)] }));
                break 'assoc;
            }
        }
    }
    push("associativity", bad.is_none(), bad);

    let mut bad = None;
    for (gg, ff) in g.composable_pairs() {
        if let Some(h) = g.compose(gg, ff) {
            if g.source_of(h) != g.source_of(ff) || g.target_of(h) != g.target_of(gg) {
                bad = Some(json!({ "pair": [arrow_id(gg), arrow_id(ff)] }));
            }
        }
    }
    push("composite_endpoints", bad.is_none(), bad);

    let mut bad = None;
    for f in 0..n {
        let fi = g.inverse_of(f);
        let endpoints_ok = g.source_of(fi) == g.target_of(f) && g.target_of(fi) == g.source_of(f);
        let left = g.compose(fi, f) == Some(g.identity_of(g.source_of(f)));
        let right = g.compose(f, fi) == Some(g.identity_of(g.target_of(f)));
        if !(endpoints_ok && left && right) {
            bad = Some(json!({ "arrow": arrow_id(f) }));
        }
    }
    push("inverse_laws", bad.is_none(), bad);

    // Continuity of the structure maps.
    let cont = |name: &str, m: &PointMap, checks: &mut Vec<Check>| {
        let rep = m.check_continuous();
        checks.push(Check {
            name: format!("continuity_{name}"),
            status: if rep.continuous { CheckStatus::Pass } else { CheckStatus::Fail },
            witness: rep.witness.map(|w| json!({ "open": w.point_ids() })),
        });
    };
    cont("s", &g.source_map(), &mut checks);
    cont("t", &g.target_map(), &mut checks);
    cont("i", &g.identity_map(), &mut checks);
    cont("inv", &g.inversion_map(), &mut checks);
    match g.composition_map() {
        Some((comp_map, _)) => cont("comp", &comp_map, &mut checks),
        None => checks.push(Check {
            name: "continuity_comp".into(),
            status: CheckStatus::Fail,
            witness: Some(json!({ "reason": "composition not total" })),
        }),
    }
    checks
}

#[derive(Clone, Debug)]
pub struct EtaleReport {
    pub etale: bool,
    pub s_failures: Vec<u32>,
    pub t_failures: Vec<u32>,
}

/// A groupoid is etale when source and target are local homeomorphisms.
pub fn is_etale(g: &TopGroupoid) -> EtaleReport {
    let s = g.source_map().is_local_homeo();
    let t = g.target_map().is_local_homeo();
    EtaleReport {
        etale: s.ok && t.ok,
        s_failures: s.failures.iter().map(|f| f.point.0).collect(),
        t_failures: t.failures.iter().map(|f| f.point.0).collect(),
    }
}

/// The unit groupoid of a space: one identity arrow per point, arrow space
/// homeomorphic to the base.
pub fn unit_groupoid(space: &Space) -> TopGroupoid {
    let n = space.n_points();
    let arrows = space.clone();
    let comp = (0..n).map(|x| ((x, x), x)).collect();
    TopGroupoid::from_indices(
        space.clone(),
        arrows,
        (0..n).collect(),
        (0..n).collect(),
        (0..n).collect(),
        (0..n).collect(),
        comp,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::groupoids::{pair_groupoid, product_basis_oracle};
    use crate::corpus::spaces::{discrete, indiscrete, sierpinski};
    use crate::report::all_pass;

    #[test]
    fn unit_groupoid_is_clean_and_etale() {
        for s in [discrete(2), sierpinski(), discrete(1)] {
            let g = unit_groupoid(&s);
            assert!(all_pass(&check_groupoid(&g)));
            assert!(is_etale(&g).etale);
        }
    }

    #[test]
    fn pair_groupoid_on_discrete_base_is_clean_and_etale() {
        let g = pair_groupoid(2);
        assert_eq!(g.n_arrows(), 4);
        assert!(all_pass(&check_groupoid(&g)));
        assert!(is_etale(&g).etale);
    }

    #[test]
    fn breaking_inv_is_reported() {
        let g = pair_groupoid(2);
        // Swap the inverse of one non-loop arrow to itself.
        let bad = {
            let mut inv = (0..4).map(|a| g.inverse_of(a)).collect::<Vec<_>>();
            let off_diag =
                (0..4).find(|&a| g.source_of(a) != g.target_of(a)).unwrap();
            inv[off_diag] = off_diag;
            TopGroupoid::from_indices(
                g.base.clone(),
                g.arrows.clone(),
                (0..4).map(|a| g.source_of(a)).collect(),
                (0..4).map(|a| g.target_of(a)).collect(),
                (0..2).map(|x| g.identity_of(x)).collect(),
                inv,
                g.comp.clone(),
            )
        };
        let checks = check_groupoid(&bad);
        let inverse_check = checks.iter().find(|c| c.name == "inverse_laws").unwrap();
        assert!(matches!(inverse_check.status, CheckStatus::Fail));
    }

    #[test]
    fn indiscrete_arrow_space_is_not_etale() {
        // Unit groupoid shape, but G1 carries the indiscrete topology over
        // a discrete 2-point base: s is not even continuous, hence not a
        // local homeomorphism.
        let base = discrete(2);
        let arrows = indiscrete(2);
        let comp = (0..2).map(|x| ((x, x), x)).collect();
        let g = TopGroupoid::from_indices(
            base,
            arrows,
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            comp,
        );
        assert!(!is_etale(&g).etale);
        assert!(!all_pass(&check_groupoid(&g)));
    }

    #[test]
    fn fiber_product_minimal_opens_match_rectangle_oracle() {
        // On small instances, the subspace-of-product topology generated by
        // rectangle opens must agree with the rectangle-trace minimal opens.
        for g in [unit_groupoid(&sierpinski()), pair_groupoid(2), unit_groupoid(&discrete(2))] {
            let (fp, pairs) = g.fiber_product();
            let oracle = product_basis_oracle(&g, &pairs);
            let ours: Vec<IndexSet> = (0..fp.n_points()).map(|p| fp.min_open(p).clone()).collect();
            for (j, orc) in oracle.iter().enumerate() {
                assert_eq!(&ours[j], orc, "pair {:?}", pairs[j]);
            }
        }
    }
}
