//! Etale-groupoid generators.
//!
//! Over a discrete base every etale groupoid has a discrete arrow space, so
//! the exhaustive catalog enumerates the algebraic possibilities: a
//! partition of the base into connected components and a group per
//! component, realized as `pairs × group`. Over non-T1 bases the generators
//! produce unit groupoids, trivial-action group bundles, and action
//! groupoids of self-homeomorphism subgroups, all with explicit product
//! topologies on the arrow space.

use crate::bitset::IndexSet;
use crate::corpus::groups::{groups_of_order_up_to, GroupTable};
use crate::corpus::spaces::discrete;
use crate::groupoid::{unit_groupoid, TopGroupoid};
use crate::space::{all_point_maps, Point, PointMap, Space};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// The pair groupoid on a discrete base: one arrow per ordered pair.
pub fn pair_groupoid(n: usize) -> TopGroupoid {
    let base = discrete(n);
    let arrows = discrete(n * n);
    let idx = |x: usize, y: usize| x * n + y; // arrow x → y
    let s = (0..n * n).map(|a| a / n).collect();
    let t = (0..n * n).map(|a| a % n).collect();
    let i = (0..n).map(|x| idx(x, x)).collect();
    let inv = (0..n * n).map(|a| idx(a % n, a / n)).collect();
    let mut comp = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                comp.insert((idx(y, z), idx(x, y)), idx(x, z));
            }
        }
    }
    TopGroupoid::from_indices(base, arrows, s, t, i, inv, comp)
}

/// Arrow space `X × Γ` with `Γ` discrete acting trivially: every arrow is a
/// loop, fibers carry the group.
pub fn group_bundle(space: &Space, group: &GroupTable) -> TopGroupoid {
    let n = space.n_points();
    let k = group.order();
    let idx = |x: usize, g: usize| x * k + g;
    // Product topology: minimal open of (x, g) is U_x × {g}.
    let min_open = (0..n * k)
        .map(|a| {
            let (x, g) = (a / k, a % k);
            let mut m = IndexSet::empty(n * k);
            for x2 in space.min_open(x).iter() {
                m.insert(idx(x2, g));
            }
            m
        })
        .collect();
    let arrows =
        Space::from_min_opens((0..(n * k) as u32).map(Point).collect(), min_open).unwrap();
    let s = (0..n * k).map(|a| a / k).collect();
    let t = (0..n * k).map(|a| a / k).collect();
    let i = (0..n).map(|x| idx(x, 0)).collect();
    let inv = (0..n * k).map(|a| idx(a / k, group.inverse((a % k) as u32) as usize)).collect();
    let mut comp = BTreeMap::new();
    for x in 0..n {
        for g in 0..k {
            for h in 0..k {
                comp.insert(
                    (idx(x, h), idx(x, g)),
                    idx(x, group.mul(h as u32, g as u32) as usize),
                );
            }
        }
    }
    TopGroupoid::from_indices(space.clone(), arrows, s, t, i, inv, comp)
}

/// All self-homeomorphisms of a space.
pub fn self_homeomorphisms(space: &Space) -> Vec<PointMap> {
    let full = space.full_open();
    all_point_maps(&full, &full)
        .into_iter()
        .filter(|m| {
            m.is_injective() && m.check_continuous().continuous && {
                // The inverse must be continuous as well.
                let inverse: BTreeMap<Point, Point> = m
                    .graph()
                    .into_iter()
                    .map(|(i, v)| (space.point(v), space.point(i)))
                    .collect();
                PointMap::new(full.clone(), full.clone(), &inverse)
                    .map(|inv| inv.check_continuous().continuous)
                    .unwrap_or(false)
            }
        })
        .collect()
}

/// The action groupoid of a finite group of self-homeomorphisms: arrows are
/// `Γ × X` with `s(γ, x) = x`, `t(γ, x) = γ(x)`.
pub fn action_groupoid(space: &Space, homeos: &[PointMap]) -> TopGroupoid {
    let n = space.n_points();
    let k = homeos.len();
    let idx = |g: usize, x: usize| g * n + x;
    let apply = |g: usize, x: usize| -> usize {
        space.index_of(homeos[g].apply(space.point(x)).unwrap()).unwrap()
    };
    let min_open = (0..k * n)
        .map(|a| {
            let (g, x) = (a / n, a % n);
            let mut m = IndexSet::empty(k * n);
            for x2 in space.min_open(x).iter() {
                m.insert(idx(g, x2));
            }
            m
        })
        .collect();
    let arrows =
        Space::from_min_opens((0..(k * n) as u32).map(Point).collect(), min_open).unwrap();
    let s = (0..k * n).map(|a| a % n).collect();
    let t = (0..k * n).map(|a| apply(a / n, a % n)).collect();
    let identity_pos = homeos
        .iter()
        .position(|h| h == &PointMap::identity(&space.full_open()))
        .expect("identity homeomorphism present");
    let i = (0..n).map(|x| idx(identity_pos, x)).collect();
    let inverse_of = |g: usize| -> usize {
        (0..k)
            .find(|&h| (0..n).all(|x| apply(h, apply(g, x)) == x))
            .expect("closed under inverses")
    };
    let inv = (0..k * n).map(|a| {
        let (g, x) = (a / n, a % n);
        idx(inverse_of(g), apply(g, x))
    });
    let mut comp = BTreeMap::new();
    for g in 0..k {
        for x in 0..n {
            for h in 0..k {
                // (h, γ(x)) ∘ (g, x) = (h∘g, x)
                let hg = (0..k)
                    .find(|&u| (0..n).all(|y| apply(u, y) == apply(h, apply(g, y))))
                    .expect("closed under composition");
                comp.insert((idx(h, apply(g, x)), idx(g, x)), idx(hg, x));
            }
        }
    }
    TopGroupoid::from_indices(space.clone(), arrows, s, t, i, inv.collect(), comp)
}

/// Set partitions of `0..n` as restricted-growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(i: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for b in 0..=max {
            current[i] = b;
            rec(i + 1, max.max(b + 1), current, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 1, &mut current, &mut out);
    out
}

/// A connected-component description: base-point blocks with a group each,
/// realized as `pairs(block) × group`.
pub fn assembled_groupoid(n: usize, blocks: &[Vec<usize>], groups: &[GroupTable]) -> TopGroupoid {
    let base = discrete(n);
    let mut arrow_info: Vec<(usize, usize, u32, usize)> = Vec::new(); // (x, y, g, block)
    for (b, block) in blocks.iter().enumerate() {
        for &x in block {
            for &y in block {
                for g in 0..groups[b].order() as u32 {
                    arrow_info.push((x, y, g, b));
                }
            }
        }
    }
    let m = arrow_info.len();
    let arrows = discrete(m);
    let find =
        |x: usize, y: usize, g: u32, b: usize| -> usize {
            arrow_info.iter().position(|&a| a == (x, y, g, b)).unwrap()
        };
    let s = arrow_info.iter().map(|&(x, _, _, _)| x).collect();
    let t = arrow_info.iter().map(|&(_, y, _, _)| y).collect();
    let block_of = |x: usize| blocks.iter().position(|bl| bl.contains(&x)).unwrap();
    let i = (0..n).map(|x| find(x, x, 0, block_of(x))).collect();
    let inv = arrow_info
        .iter()
        .map(|&(x, y, g, b)| find(y, x, groups[b].inverse(g), b))
        .collect();
    let mut comp = BTreeMap::new();
    for (a1, &(x, y, g, b)) in arrow_info.iter().enumerate() {
        for (a2, &(y2, z, h, b2)) in arrow_info.iter().enumerate() {
            if y2 == y && b2 == b {
                comp.insert((a2, a1), find(x, z, groups[b].mul(h, g), b));
            }
        }
    }
    TopGroupoid::from_indices(base, arrows, s, t, i, inv, comp)
}

/// Exhaustive catalog of etale groupoids over discrete bases with at most
/// `max_points` points and at most `max_arrows` arrows: every partition of
/// the base, every group assignment within the arrow budget.
pub fn all_etale_groupoids_discrete(max_points: usize, max_arrows: usize) -> Vec<TopGroupoid> {
    let mut out = Vec::new();
    for n in 1..=max_points {
        for rgs in set_partitions(n) {
            let n_blocks = rgs.iter().max().map(|&b| b + 1).unwrap_or(0);
            let blocks: Vec<Vec<usize>> = (0..n_blocks)
                .map(|b| (0..n).filter(|&i| rgs[i] == b).collect())
                .collect();
            // Group choices per block, pruned by the arrow budget.
            let catalog = groups_of_order_up_to(max_arrows);
            let mut assignments: Vec<Vec<&GroupTable>> = vec![Vec::new()];
            for block in &blocks {
                let sq = block.len() * block.len();
                let mut next = Vec::new();
                for partial in &assignments {
                    let used: usize = partial
                        .iter()
                        .zip(blocks.iter())
                        .map(|(g, bl)| bl.len() * bl.len() * g.order())
                        .sum();
                    for g in &catalog {
                        if used + sq * g.order() <= max_arrows {
                            let mut v = partial.clone();
                            v.push(g);
                            next.push(v);
                        }
                    }
                }
                assignments = next;
            }
            for assign in assignments {
                let groups: Vec<GroupTable> = assign.into_iter().cloned().collect();
                out.push(assembled_groupoid(n, &blocks, &groups));
            }
        }
    }
    out
}

/// A seeded random etale groupoid over the given base: over discrete bases
/// a random partition with random groups; over non-T1 bases a unit
/// groupoid, a group bundle, or an action groupoid of a cyclic subgroup of
/// self-homeomorphisms.
pub fn random_etale_groupoid(
    base: &Space,
    max_arrows: usize,
    rng: &mut ChaCha8Rng,
) -> TopGroupoid {
    let n = base.n_points();
    if base.is_t1() {
        let parts = set_partitions(n);
        let rgs = parts[rng.gen_range(0..parts.len())].clone();
        let n_blocks = rgs.iter().max().map(|&b| b + 1).unwrap_or(0);
        let blocks: Vec<Vec<usize>> = (0..n_blocks)
            .map(|b| (0..n).filter(|&i| rgs[i] == b).collect())
            .collect();
        let catalog = groups_of_order_up_to(4);
        let mut groups = Vec::new();
        let mut used = 0usize;
        for block in &blocks {
            let sq = block.len() * block.len();
            let fits: Vec<&GroupTable> = catalog
                .iter()
                .filter(|g| used + sq * g.order() <= max_arrows)
                .collect();
            let g = if fits.is_empty() {
                &catalog[0]
            } else {
                fits[rng.gen_range(0..fits.len())]
            };
            used += sq * g.order();
            groups.push(g.clone());
        }
        assembled_groupoid(n, &blocks, &groups)
    } else {
        match rng.gen_range(0..3) {
            0 => unit_groupoid(base),
            1 => {
                let catalog = groups_of_order_up_to((max_arrows / n).clamp(1, 4));
                let g = &catalog[rng.gen_range(0..catalog.len())];
                group_bundle(base, g)
            }
            _ => {
                let homeos = self_homeomorphisms(base);
                let pick = &homeos[rng.gen_range(0..homeos.len())];
                // Cyclic subgroup generated by the pick.
                let id = PointMap::identity(&base.full_open());
                let mut subgroup = vec![id.clone()];
                let mut cur = pick.clone();
                while cur != id {
                    subgroup.push(cur.clone());
                    cur = cur.then(pick).unwrap();
                }
                if subgroup.len() * n > max_arrows {
                    unit_groupoid(base)
                } else {
                    action_groupoid(base, &subgroup)
                }
            }
        }
    }
}

/// Test oracle for the fiber-product topology: the minimal open of each
/// composable pair computed literally as the intersection of all rectangle
/// traces `(A × B) ∩ pairs` containing it, with `A`, `B` ranging over the
/// opens of the arrow space.
pub fn product_basis_oracle(g: &TopGroupoid, pairs: &[(usize, usize)]) -> Vec<IndexSet> {
    let opens = g.arrows.opens().expect("small arrow space").to_vec();
    let n = pairs.len();
    (0..n)
        .map(|j| {
            let (a, b) = pairs[j];
            let mut acc = IndexSet::full(n);
            for oa in &opens {
                if !oa.contains(a) {
                    continue;
                }
                for ob in &opens {
                    if !ob.contains(b) {
                        continue;
                    }
                    let mut trace = IndexSet::empty(n);
                    for (k, &(x, y)) in pairs.iter().enumerate() {
                        if oa.contains(x) && ob.contains(y) {
                            trace.insert(k);
                        }
                    }
                    acc = acc.intersect(&trace);
                }
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::spaces::{chain, sierpinski};
    use crate::groupoid::{check_groupoid, is_etale};
    use crate::report::all_pass;

    #[test]
    fn exhaustive_catalog_members_are_valid_etale_groupoids() {
        let all = all_etale_groupoids_discrete(3, 9);
        assert!(all.len() >= 40, "catalog has {} members", all.len());
        for g in &all {
            assert!(all_pass(&check_groupoid(g)));
            assert!(is_etale(g).etale);
            assert!(g.n_arrows() <= 9);
        }
    }

    #[test]
    fn bundles_and_actions_over_non_t1_bases_are_valid() {
        use crate::corpus::groups::cyclic;
        for base in [sierpinski(), chain(3)] {
            let g = group_bundle(&base, &cyclic(2));
            assert!(all_pass(&check_groupoid(&g)), "bundle over {base:?}");
            assert!(is_etale(&g).etale);
            let homeos = self_homeomorphisms(&base);
            let a = action_groupoid(&base, &homeos);
            assert!(all_pass(&check_groupoid(&a)));
            assert!(is_etale(&a).etale);
        }
    }

    #[test]
    fn random_generator_is_deterministic_and_valid() {
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        for base in [discrete(3), sierpinski(), chain(3)] {
            let a = random_etale_groupoid(&base, 12, &mut r1);
            let b = random_etale_groupoid(&base, 12, &mut r2);
            assert_eq!(a.n_arrows(), b.n_arrows());
            assert!(all_pass(&check_groupoid(&a)));
            assert!(is_etale(&a).etale);
        }
    }
}
