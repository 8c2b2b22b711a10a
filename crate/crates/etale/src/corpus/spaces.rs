//! Finite-space generators: named small spaces and the exhaustive catalog
//! of all topologies on up to four labeled points (via preorders).

use crate::space::Space;

/// Points `{0, 1}` with opens `∅, {1}, {0,1}`; the minimal non-T1 space.
pub fn sierpinski() -> Space {
    Space::build(&[0, 1], &[vec![], vec![1], vec![0, 1]]).unwrap()
}

/// Discrete topology on `n` points `0..n`.
pub fn discrete(n: usize) -> Space {
    let points: Vec<u32> = (0..n as u32).collect();
    let mut arrows = Vec::new();
    for &p in &points {
        arrows.push((p, p));
    }
    Space::from_preorder(&points, &arrows).unwrap()
}

/// Indiscrete topology on `n` points: only `∅` and the full set are open.
pub fn indiscrete(n: usize) -> Space {
    let points: Vec<u32> = (0..n as u32).collect();
    let mut arrows = Vec::new();
    for &p in &points {
        for &q in &points {
            arrows.push((p, q));
        }
    }
    Space::from_preorder(&points, &arrows).unwrap()
}

/// Chain topology on `n` points: opens are the upward suffixes
/// `∅ ⊂ {n-1} ⊂ {n-2, n-1} ⊂ … ⊂ {0, …, n-1}`, so `x → y` iff `x ≥ y`.
pub fn chain(n: usize) -> Space {
    let points: Vec<u32> = (0..n as u32).collect();
    let mut arrows = Vec::new();
    for x in 0..n as u32 {
        for y in 0..=x {
            arrows.push((x, y));
        }
    }
    Space::from_preorder(&points, &arrows).unwrap()
}

/// Every topology on exactly `n` labeled points `0..n`, enumerated through
/// reflexive transitive relations, in a deterministic order.
pub fn all_spaces_on(n: usize) -> Vec<Space> {
    assert!(n <= 5, "exhaustive space enumeration is meant for tiny n");
    let points: Vec<u32> = (0..n as u32).collect();
    if n == 0 {
        return vec![Space::build(&[], &[vec![]]).unwrap()];
    }
    // Off-diagonal bit per ordered pair (x, y), x != y, meaning x → y.
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|x| (0..n as u32).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut arrows: Vec<(u32, u32)> = (0..n as u32).map(|p| (p, p)).collect();
        for (i, &pq) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                arrows.push(pq);
            }
        }
        let rel = |a: u32, b: u32| a == b || arrows.contains(&(a, b));
        let transitive = (0..n as u32).all(|x| {
            (0..n as u32).all(|y| {
                (0..n as u32).all(|z| !(rel(x, y) && rel(y, z)) || rel(x, z))
            })
        });
        if transitive {
            out.push(Space::from_preorder(&points, &arrows).unwrap());
        }
    }
    out
}

/// Every topology on `1..=n` labeled points.
pub fn all_spaces_up_to(n: usize) -> Vec<Space> {
    (1..=n).flat_map(all_spaces_on).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_the_labeled_topology_numbers() {
        // Known counts of labeled topologies: 1, 4, 29, 355.
        assert_eq!(all_spaces_on(1).len(), 1);
        assert_eq!(all_spaces_on(2).len(), 4);
        assert_eq!(all_spaces_on(3).len(), 29);
        assert_eq!(all_spaces_on(4).len(), 355);
    }

    #[test]
    fn named_spaces_are_what_they_say() {
        assert_eq!(sierpinski().n_opens().unwrap(), 3);
        assert_eq!(discrete(3).n_opens().unwrap(), 8);
        assert_eq!(indiscrete(3).n_opens().unwrap(), 2);
        assert_eq!(chain(3).n_opens().unwrap(), 4);
        assert!(!chain(3).is_t1());
    }
}
