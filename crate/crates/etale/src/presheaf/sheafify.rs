//! Presheaf sheafification.
//!
//! The sheafification is computed inside the product of skyscrapers: for a
//! presheaf `P`, the sheaf `P^#` has as sections over `U` the tuples of
//! stalk elements indexed by the points of `U`, and the sheafification is
//! the smallest gluing-closed subfamily of `P^#` containing the image of
//! the canonical germ map `P → P^#`.

use super::{decreasing_size_order, Presheaf, PresheafError, PresheafMorphism};
use crate::bitset::IndexSet;
use crate::budget::Budgets;
use crate::space::CoverMode;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Result of sheafifying a presheaf.
pub struct Sheafification {
    /// The ambient product of skyscrapers `P^#`.
    pub sharp: Presheaf,
    /// The sheafification `P̂` itself.
    pub sheaf: Presheaf,
    /// Germ map `P → P̂`.
    pub unit: PresheafMorphism,
    /// Germ map `P → P^#`.
    pub unit_sharp: PresheafMorphism,
    /// Per open: the `P^#` id of each `P̂` section.
    pub include: BTreeMap<IndexSet, Vec<u32>>,
    /// Stalk sizes per point index.
    pub stalk_sizes: Vec<usize>,
}

impl Sheafification {
    /// The inclusion `P̂ → P^#` as a presheaf morphism.
    pub fn inclusion(&self) -> PresheafMorphism {
        PresheafMorphism { maps: self.include.clone() }
    }

    /// Whether the unit is bijective on every stalk, i.e. at each minimal
    /// open neighborhood.
    pub fn unit_is_stalkwise_bijective(&self, p: &Presheaf) -> bool {
        let space = p.space();
        (0..space.n_points()).all(|x| {
            let u = space.min_open(x).clone();
            self.unit.is_bijective_at(&u, p, &self.sheaf)
        })
    }
}

/// Mixed-radix decomposition helpers for tuple sections.
fn digits(mut id: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; radices.len()];
    for (i, &r) in radices.iter().enumerate().rev() {
        out[i] = id % r;
        id /= r;
    }
    out
}

fn compose_id(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0usize, |acc, (&d, &r)| acc * r + d)
}

/// Builds `P^#` and the sheafification as its gluing closure over canonical
/// covers, scanning opens in decreasing size order until a fixpoint.
pub fn sheafify(p: &Presheaf) -> Result<Sheafification, PresheafError> {
    let report = p.check()?;
    if !report.is_clean() {
        return Err(PresheafError::Invalid(format!("{:?}", report.violations)));
    }
    let space = p.space().clone();
    let opens = space.opens()?.to_vec();
    let stalk_sizes: Vec<usize> =
        (0..space.n_points()).map(|x| p.n_sections(space.min_open(x))).collect();

    // P^#: tuples of stalk elements over the points of each open.
    let radices_of = |u: &IndexSet| -> Vec<usize> { u.iter().map(|x| stalk_sizes[x]).collect() };
    let mut sharp_sections: BTreeMap<IndexSet, Vec<String>> = BTreeMap::new();
    for u in &opens {
        let radices = radices_of(u);
        let total: usize = radices.iter().product();
        let pts = u.indices();
        let labels = (0..total)
            .map(|id| {
                let ds = digits(id, &radices);
                let parts: Vec<&str> = pts
                    .iter()
                    .zip(&ds)
                    .map(|(&x, &d)| p.label(space.min_open(x), d as u32))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        sharp_sections.insert(u.clone(), labels);
    }
    let mut sharp_res: BTreeMap<(IndexSet, IndexSet), Vec<u32>> = BTreeMap::new();
    for u in &opens {
        let ru = radices_of(u);
        let pts_u = u.indices();
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let rv = radices_of(v);
            let positions: Vec<usize> = v
                .iter()
                .map(|x| pts_u.iter().position(|&y| y == x).unwrap())
                .collect();
            let total: usize = ru.iter().product();
            let table = (0..total)
                .map(|id| {
                    let ds = digits(id, &ru);
                    let sub: Vec<usize> = positions.iter().map(|&i| ds[i]).collect();
                    compose_id(&sub, &rv) as u32
                })
                .collect();
            sharp_res.insert((u.clone(), v.clone()), table);
        }
    }
    let sharp = Presheaf::new(space.clone(), sharp_sections, sharp_res);

    // Germ map P → P^#.
    let mut unit_sharp_maps: BTreeMap<IndexSet, Vec<u32>> = BTreeMap::new();
    for u in &opens {
        let radices = radices_of(u);
        let table = (0..p.n_sections(u) as u32)
            .map(|sid| {
                let ds: Vec<usize> = u
                    .iter()
                    .map(|x| p.restrict(u, space.min_open(x), sid) as usize)
                    .collect();
                compose_id(&ds, &radices) as u32
            })
            .collect();
        unit_sharp_maps.insert(u.clone(), table);
    }
    let unit_sharp = PresheafMorphism { maps: unit_sharp_maps };

    // Gluing closure of the image inside P^#.
    let mut sub: BTreeMap<IndexSet, BTreeSet<u32>> = opens
        .iter()
        .map(|u| (u.clone(), unit_sharp.maps[u].iter().copied().collect()))
        .collect();
    let scan = decreasing_size_order(&opens);
    loop {
        let mut grew = false;
        for u in &scan {
            let cover = space.canonical_cover(u);
            let n_sharp = sharp.n_sections(u) as u32;
            for t in 0..n_sharp {
                if sub[u].contains(&t) {
                    continue;
                }
                let gluable =
                    cover.iter().all(|m| sub[m].contains(&sharp.restrict(u, m, t)));
                if gluable {
                    sub.get_mut(u).unwrap().insert(t);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }

    // Package the closure as a presheaf of its own.
    let include: BTreeMap<IndexSet, Vec<u32>> =
        sub.iter().map(|(u, ids)| (u.clone(), ids.iter().copied().collect())).collect();
    let mut sheaf_sections = BTreeMap::new();
    let mut sheaf_res = BTreeMap::new();
    for u in &opens {
        let labels = include[u]
            .iter()
            .map(|&t| sharp.label(u, t).to_string())
            .collect::<Vec<_>>();
        sheaf_sections.insert(u.clone(), labels);
    }
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) {
                continue;
            }
            let table = include[u]
                .iter()
                .map(|&t| {
                    let rv = sharp.restrict(u, v, t);
                    include[v]
                        .iter()
                        .position(|&s| s == rv)
                        .expect("gluing closure is restriction-closed") as u32
                })
                .collect();
            sheaf_res.insert((u.clone(), v.clone()), table);
        }
    }
    let sheaf = Presheaf::new(space.clone(), sheaf_sections, sheaf_res);
    let unit_maps = opens
        .iter()
        .map(|u| {
            let table = unit_sharp.maps[u]
                .iter()
                .map(|&t| include[u].iter().position(|&s| s == t).unwrap() as u32)
                .collect();
            (u.clone(), table)
        })
        .collect();
    Ok(Sheafification {
        sharp,
        sheaf,
        unit: PresheafMorphism { maps: unit_maps },
        unit_sharp,
        include,
        stalk_sizes,
    })
}

#[derive(Debug, Error)]
pub enum UniversalityError {
    #[error("target is not a sheaf")]
    NotASheaf,
    #[error("no factorization through the sheafification exists")]
    NoFactorization,
    #[error("factorization is not unique: {0} candidates pass")]
    NotUnique(usize),
    #[error("candidate enumeration budget exceeded ({0})")]
    EnumerationBudgetExceeded(usize),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

/// Given `φ : P → G` with `G` a sheaf, finds the unique `ψ : P̂ → G` with
/// `ψ ∘ unit = φ` and certifies uniqueness by enumerating every candidate
/// morphism consistent with the forced germ maps.
pub fn factor_through_sheafification(
    sh: &Sheafification,
    p: &Presheaf,
    g: &Presheaf,
    phi: &PresheafMorphism,
    budgets: &Budgets,
) -> Result<(PresheafMorphism, usize), UniversalityError> {
    if !g.is_sheaf(CoverMode::Canonical, budgets)?.is_sheaf {
        return Err(UniversalityError::NotASheaf);
    }
    let space = p.space();
    let opens = space.opens().map_err(PresheafError::from)?.to_vec();

    // Forced germ maps ψ_x = φ_{U_x} ∘ unit_{U_x}^{-1} (the unit is
    // stalkwise bijective; bail out if not, since ψ would be unconstrained).
    let mut stalk_map: BTreeMap<IndexSet, BTreeMap<u32, u32>> = BTreeMap::new();
    for x in 0..space.n_points() {
        let ux = space.min_open(x).clone();
        if stalk_map.contains_key(&ux) {
            continue;
        }
        let unit_table = &sh.unit.maps[&ux];
        let mut inverse: BTreeMap<u32, u32> = BTreeMap::new();
        for (pid, &fid) in unit_table.iter().enumerate() {
            if inverse.insert(fid, pid as u32).is_some() {
                return Err(UniversalityError::NoFactorization);
            }
        }
        if inverse.len() != sh.sheaf.n_sections(&ux) {
            return Err(UniversalityError::NoFactorization);
        }
        let map = inverse
            .into_iter()
            .map(|(fid, pid)| (fid, phi.apply(&ux, pid)))
            .collect();
        stalk_map.insert(ux, map);
    }

    // Candidate images per element: sections of G with the forced germs.
    let mut candidates: BTreeMap<IndexSet, Vec<Vec<u32>>> = BTreeMap::new();
    let mut combinations: usize = 1;
    for u in &opens {
        let mut per_elem: Vec<Vec<u32>> = Vec::new();
        for t in 0..sh.sheaf.n_sections(u) as u32 {
            let mut cands = Vec::new();
            'g: for gid in 0..g.n_sections(u) as u32 {
                for x in u.iter() {
                    let ux = space.min_open(x).clone();
                    let want = stalk_map[&ux][&sh.sheaf.restrict(u, &ux, t)];
                    if g.restrict(u, &ux, gid) != want {
                        continue 'g;
                    }
                }
                cands.push(gid);
            }
            if cands.is_empty() {
                return Err(UniversalityError::NoFactorization);
            }
            combinations = combinations.saturating_mul(cands.len());
            if combinations > budgets.max_morphism_candidates {
                return Err(UniversalityError::EnumerationBudgetExceeded(combinations));
            }
            per_elem.push(cands);
        }
        candidates.insert(u.clone(), per_elem);
    }

    // Enumerate every combination and keep the ones that are natural and
    // factor φ.
    let mut valid: Vec<PresheafMorphism> = Vec::new();
    let mut choice: BTreeMap<IndexSet, Vec<usize>> =
        opens.iter().map(|u| (u.clone(), vec![0usize; candidates[u].len()])).collect();
    'enumerate: loop {
        let maps: BTreeMap<IndexSet, Vec<u32>> = opens
            .iter()
            .map(|u| {
                let table = candidates[u]
                    .iter()
                    .zip(&choice[u])
                    .map(|(c, &i)| c[i])
                    .collect();
                (u.clone(), table)
            })
            .collect();
        let psi = PresheafMorphism { maps };
        let natural = psi.check(&sh.sheaf, g)?.natural;
        let factors = natural
            && opens.iter().all(|u| {
                (0..p.n_sections(u) as u32)
                    .all(|sid| psi.apply(u, sh.unit.apply(u, sid)) == phi.apply(u, sid))
            });
        if factors {
            valid.push(psi);
        }
        // Odometer step.
        for u in &opens {
            let per_elem = &candidates[u];
            let ch = choice.get_mut(u).unwrap();
            for i in 0..ch.len() {
                ch[i] += 1;
                if ch[i] < per_elem[i].len() {
                    continue 'enumerate;
                }
                ch[i] = 0;
            }
        }
        break;
    }
    match valid.len() {
        0 => Err(UniversalityError::NoFactorization),
        1 => Ok((valid.into_iter().next().unwrap(), combinations)),
        n => Err(UniversalityError::NotUnique(n)),
    }
}

/// Enumerates every natural transformation `P → G`, capped.
pub fn all_presheaf_morphisms(
    p: &Presheaf,
    g: &Presheaf,
    cap: usize,
) -> Result<Vec<PresheafMorphism>, PresheafError> {
    let space = p.space();
    let opens = decreasing_size_order(space.opens()?);
    let mut results: Vec<BTreeMap<IndexSet, Vec<u32>>> = vec![BTreeMap::new()];
    for u in &opens {
        let n_p = p.n_sections(u);
        let n_g = g.n_sections(u);
        if n_p > 0 && n_g == 0 {
            return Ok(Vec::new());
        }
        let mut next = Vec::new();
        for partial in &results {
            let mut table = vec![0u32; n_p];
            'assign: loop {
                // Check naturality against every already-assigned superset.
                let consistent = partial.iter().all(|(v, tv)| {
                    if !u.is_subset(v) || u == v {
                        return true;
                    }
                    (0..p.n_sections(v) as u32).all(|sid| {
                        table[p.restrict(v, u, sid) as usize]
                            == g.restrict(v, u, tv[sid as usize])
                    })
                });
                if consistent {
                    let mut m = partial.clone();
                    m.insert(u.clone(), table.clone());
                    next.push(m);
                    if next.len() > cap {
                        return Err(PresheafError::FamilyBudgetExceeded(next.len()));
                    }
                }
                // Odometer over the function table.
                if n_p == 0 {
                    break;
                }
                let mut i = 0;
                loop {
                    table[i] += 1;
                    if (table[i] as usize) < n_g {
                        break;
                    }
                    table[i] = 0;
                    i += 1;
                    if i == n_p {
                        break 'assign;
                    }
                }
            }
        }
        results = next;
    }
    Ok(results.into_iter().map(|maps| PresheafMorphism { maps }).collect())
}
