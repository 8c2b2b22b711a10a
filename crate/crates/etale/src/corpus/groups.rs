//! Multiplication tables for the small groups used by corpus generators.

/// A finite group given by its multiplication table; element 0 is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub name: String,
    pub mul: Vec<Vec<u32>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize][b as usize]
    }

    pub fn inverse(&self, a: u32) -> u32 {
        (0..self.order() as u32).find(|&b| self.mul(a, b) == 0).expect("group inverse")
    }

    pub fn is_valid(&self) -> bool {
        let n = self.order() as u32;
        let in_range = self.mul.iter().all(|row| row.len() == n as usize)
            && self.mul.iter().flatten().all(|&v| v < n);
        if !in_range {
            return false;
        }
        let identity_ok = (0..n).all(|a| self.mul(0, a) == a && self.mul(a, 0) == a);
        let assoc = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))))
        });
        let inverses = (0..n).all(|a| (0..n).any(|b| self.mul(a, b) == 0 && self.mul(b, a) == 0));
        identity_ok && assoc && inverses
    }
}

pub fn trivial() -> GroupTable {
    GroupTable { name: "1".into(), mul: vec![vec![0]] }
}

pub fn cyclic(k: usize) -> GroupTable {
    let mul = (0..k)
        .map(|a| (0..k).map(|b| ((a + b) % k) as u32).collect())
        .collect();
    GroupTable { name: format!("Z{k}"), mul }
}

pub fn product(g: &GroupTable, h: &GroupTable) -> GroupTable {
    let (n, m) = (g.order(), h.order());
    let idx = |a: usize, b: usize| (a * m + b) as u32;
    let mul = (0..n * m)
        .map(|x| {
            let (a1, b1) = (x / m, x % m);
            (0..n * m)
                .map(|y| {
                    let (a2, b2) = (y / m, y % m);
                    idx(g.mul(a1 as u32, a2 as u32) as usize, h.mul(b1 as u32, b2 as u32) as usize)
                })
                .collect()
        })
        .collect();
    GroupTable { name: format!("{}x{}", g.name, h.name), mul }
}

/// Symmetric group on 3 letters, elements as permutations in one-line
/// notation ordered lexicographically with the identity first.
pub fn s3() -> GroupTable {
    let perms: Vec<[usize; 3]> =
        vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap() as u32;
    let mul = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    // (a ∘ b)(i) = a[b[i]]
                    let c = [a[b[0]], a[b[1]], a[b[2]]];
                    find(&c)
                })
                .collect()
        })
        .collect();
    GroupTable { name: "S3".into(), mul }
}

/// The groups (up to isomorphism) of each order up to `max`, as tables.
pub fn groups_of_order_up_to(max: usize) -> Vec<GroupTable> {
    let mut out = Vec::new();
    for k in 1..=max {
        match k {
            1 => out.push(trivial()),
            4 => {
                out.push(cyclic(4));
                out.push(product(&cyclic(2), &cyclic(2)));
            }
            6 => {
                out.push(cyclic(6));
                out.push(s3());
            }
            8 => {
                out.push(cyclic(8));
                out.push(product(&cyclic(4), &cyclic(2)));
                out.push(product(&cyclic(2), &product(&cyclic(2), &cyclic(2))));
            }
            9 => {
                out.push(cyclic(9));
                out.push(product(&cyclic(3), &cyclic(3)));
            }
            _ => out.push(cyclic(k)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tables_are_groups() {
        for g in groups_of_order_up_to(9) {
            assert!(g.is_valid(), "{}", g.name);
        }
    }

    #[test]
    fn s3_is_nonabelian() {
        let g = s3();
        assert!((0..6).any(|a| (0..6).any(|b| g.mul(a, b) != g.mul(b, a))));
    }
}
