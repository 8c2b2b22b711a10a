//! Presheaf generators.
//!
//! Random presheaves are drawn as restriction-closed subfamilies of the
//! "master" presheaf `U ↦ (functions U → T)` whose restriction maps are
//! literal function restrictions — this guarantees functoriality by
//! construction while covering both sheaf failure modes: a missing gluing
//! (the pointwise union of a matching family is absent) and a non-unique
//! gluing (a duplicated section with an identical restriction row).

use crate::bitset::IndexSet;
use crate::presheaf::{skyscraper, Presheaf};
use crate::space::Space;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// All functions from the points of `u` to `0..t`, as digit vectors aligned
/// with ascending point indices.
fn all_functions(u: &IndexSet, t: usize) -> Vec<Vec<u8>> {
    let k = u.len();
    let mut out = Vec::new();
    let mut digits = vec![0u8; k];
    loop {
        out.push(digits.clone());
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            digits[i] += 1;
            if (digits[i] as usize) < t {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn restrict_function(u: &IndexSet, f: &[u8], v: &IndexSet) -> Vec<u8> {
    let pts = u.indices();
    v.iter().map(|x| f[pts.iter().position(|&y| y == x).unwrap()]).collect()
}

/// A restriction-closed random subfamily of the function presheaf, with an
/// optional duplicated top section to break separatedness.
pub fn random_function_presheaf(
    space: &Space,
    t: usize,
    rng: &mut ChaCha8Rng,
    keep_probability: f64,
    duplicate_top: bool,
) -> Presheaf {
    let opens = space.opens().expect("corpus spaces are small").to_vec();
    let mut chosen: BTreeMap<IndexSet, Vec<Vec<u8>>> = BTreeMap::new();
    let mut scan = opens.clone();
    scan.sort_by_key(|s| std::cmp::Reverse(s.len()));
    for u in &scan {
        let mut fns: Vec<Vec<u8>> = all_functions(u, t)
            .into_iter()
            .filter(|_| rng.gen_bool(keep_probability))
            .collect();
        // Close downward: restrictions of sections chosen above must exist.
        for (v, chosen_v) in chosen.iter() {
            if u.is_subset(v) {
                for f in chosen_v {
                    let r = restrict_function(v, f, u);
                    if !fns.contains(&r) {
                        fns.push(r);
                    }
                }
            }
        }
        fns.sort();
        fns.dedup();
        chosen.insert(u.clone(), fns);
    }

    let mut sections: BTreeMap<IndexSet, Vec<String>> = BTreeMap::new();
    let mut dup: Option<(IndexSet, usize)> = None;
    for (u, fns) in &chosen {
        let mut labels: Vec<String> = fns
            .iter()
            .map(|f| {
                if f.is_empty() {
                    "ε".to_string()
                } else {
                    f.iter().map(|d| d.to_string()).collect::<String>()
                }
            })
            .collect();
        if duplicate_top && u == &space.full_set() && !fns.is_empty() {
            let pick = rng.gen_range(0..fns.len());
            labels.push(format!("{}'", labels[pick]));
            dup = Some((u.clone(), pick));
        }
        sections.insert(u.clone(), labels);
    }

    let mut res: BTreeMap<(IndexSet, IndexSet), Vec<u32>> = BTreeMap::new();
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let mut table: Vec<u32> = chosen[u]
                .iter()
                .map(|f| {
                    let r = restrict_function(u, f, v);
                    chosen[v].iter().position(|g| g == &r).unwrap() as u32
                })
                .collect();
            if let Some((du, pick)) = &dup {
                if u == du {
                    if v == du {
                        // Identity restriction sends the duplicate to itself.
                        table.push(table.len() as u32);
                    } else {
                        // Elsewhere the duplicate restricts as its original.
                        let copy = table[*pick];
                        table.push(copy);
                    }
                }
            }
            res.insert((u.clone(), v.clone()), table);
        }
    }
    Presheaf::new(space.clone(), sections, res)
}

/// A deterministic corpus of presheaves over the given spaces: constants,
/// skyscrapers, and seeded random function presheaves of both flavors.
pub fn presheaf_corpus(spaces: &[Space], seed: u64, random_per_space: usize) -> Vec<Presheaf> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for space in spaces {
        out.push(Presheaf::constant(space, &["*"]).unwrap());
        out.push(Presheaf::constant(space, &["a", "b"]).unwrap());
        for &p in space.points() {
            out.push(skyscraper(space, p, &["s", "t"]).unwrap());
        }
        for k in 0..random_per_space {
            let t = 1 + k % 3;
            out.push(random_function_presheaf(space, t + 1, &mut rng, 0.6, false));
            out.push(random_function_presheaf(space, t + 1, &mut rng, 0.5, true));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::spaces::all_spaces_up_to;

    #[test]
    fn corpus_presheaves_are_structurally_valid() {
        let spaces = all_spaces_up_to(3);
        for p in presheaf_corpus(&spaces, 7, 2) {
            let report = p.check().unwrap();
            assert!(report.is_clean(), "{:?}: {:?}", p, report.violations);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let spaces = all_spaces_up_to(2);
        let a = presheaf_corpus(&spaces, 42, 3);
        let b = presheaf_corpus(&spaces, 42, 3);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
    }
}
