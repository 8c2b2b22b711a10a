//! The full verification battery over generated corpora. Each function
//! covers one family of structural laws and returns one check per
//! instance, so the corpus runner and the acceptance suite share a single
//! source of truth.

use crate::budget::Budgets;
use crate::corpus::groupoids::{all_etale_groupoids_discrete, random_etale_groupoid};
use crate::corpus::mutate::standard_mutations;
use crate::corpus::presheaves::presheaf_corpus;
use crate::corpus::pseudogroups::{ppg_corpus, pseudogroup_sheaf_corpus};
use crate::corpus::spaces::{all_spaces_up_to, chain, sierpinski};
use crate::groupoid::{
    check_groupoid, check_prop11, groupoid_from_pseudogroup, is_etale, roundtrip_groupoid,
    roundtrip_pseudogroup, sections_category, TopGroupoid,
};
use crate::presheaf::{all_presheaf_morphisms, factor_through_sheafification, sheafify};
use crate::pseudogroup::{
    germ_sets_agree_across_dialects, germ_target_hom_oracle, underlying_functor_laws, Dialect,
    MorId,
};
use crate::report::{all_pass, Check};
use crate::sheafify::{check_ppg_morphism, check_prop45, check_universality, ppg_sheafify, PpgMorphism};
use crate::space::CoverMode;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Clone, Copy, Debug)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Random bases use up to this many points (capped at 4).
    pub max_points: usize,
    pub n_random_groupoids: usize,
    pub budgets: Budgets,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: 0xE7A1E,
            max_points: 4,
            n_random_groupoids: 200,
            budgets: Budgets::default(),
        }
    }
}

/// The groupoid corpus: the exhaustive discrete catalog (≤ 3 base points,
/// ≤ 9 arrows) plus seeded random instances over bases of up to
/// `max_points` points with at most 12 arrows.
pub fn groupoid_corpus(cfg: &BatteryConfig) -> Vec<(String, TopGroupoid)> {
    let mut out: Vec<(String, TopGroupoid)> = all_etale_groupoids_discrete(3, 9)
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("exhaustive/{i:03}"), g))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bases: Vec<crate::space::Space> = all_spaces_up_to(cfg.max_points.min(4));
    for i in 0..cfg.n_random_groupoids {
        let base = &bases[rng.gen_range(0..bases.len())];
        let g = random_etale_groupoid(base, 12, &mut rng);
        out.push((format!("random/{i:03}"), g));
    }
    out
}

/// Germ-law suite over every corpus groupoid's section category.
pub fn prop11_battery(cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, g) in groupoid_corpus(cfg) {
        let outcome = sections_category(&g)
            .and_then(|c| check_prop11(&c, &cfg.budgets))
            .map(|r| (r.passed(), r.checks));
        match outcome {
            Ok((true, _)) => checks.push(Check::pass(format!("prop11/{name}"))),
            Ok((false, inner)) => checks.push(Check::fail(
                format!("prop11/{name}"),
                json!({ "failed": inner.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>() }),
            )),
            Err(e) => checks.push(Check::fail(format!("prop11/{name}"), json!({ "error": e.to_string() }))),
        }
    }
    checks
}

/// Underlying-map suite over every corpus pre-pseudogroup satisfying the
/// decomposition condition (the T1 entries).
pub fn prop24_battery(cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        match underlying_functor_laws(&c, &cfg.budgets) {
            Ok(inner) if all_pass(&inner) => {
                checks.push(Check::pass(format!("prop24/{name}")))
            }
            Ok(inner) => checks.push(Check::fail(
                format!("prop24/{name}"),
                json!({ "failed": inner.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>() }),
            )),
            Err(e) => {
                checks.push(Check::fail(format!("prop24/{name}"), json!({ "error": e.to_string() })))
            }
        }
    }
    checks
}

/// Claim-level identity used by the groupoid-construction suite: on every
/// basic open, the target of a germ equals the underlying map of its
/// representative applied to the source.
fn claim_target_matches_underlying(
    c: &crate::pseudogroup::PrePseudogroup,
    dialect: Dialect,
    built: &crate::groupoid::GroupoidFromPpg,
) -> Result<bool, crate::pseudogroup::PpgError> {
    let space = c.space().clone();
    let full = space.full_set();
    for u in c.opens().to_vec() {
        for f in 0..c.hom_len(&u, &full) as MorId {
            for x in u.iter() {
                let ux = space.min_open(x).clone();
                let inc = c.incl(&ux, &u)?;
                let germ = c.compose(&ux, &u, &full, f, inc)?;
                let arrow = built.germ_index[&(x, germ)];
                let expected =
                    crate::groupoid::arrow_target_of(c, dialect, x, germ)?;
                if built.groupoid.target_of(arrow) != expected {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Groupoid-construction suite: every corpus pseudogroup sheaf yields a
/// structurally clean etale groupoid, composition continuous against the
/// explicit fiber product, targets matching underlying maps on every basic
/// open.
pub fn prop25_battery(_cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, c, dialect) in pseudogroup_sheaf_corpus() {
        let verdict = (|| {
            let built = groupoid_from_pseudogroup(&c, dialect)?;
            let structure = check_groupoid(&built.groupoid);
            let etale = is_etale(&built.groupoid);
            let claim = claim_target_matches_underlying(&c, dialect, &built)?;
            Ok::<_, crate::pseudogroup::PpgError>((all_pass(&structure), etale.etale, claim, structure))
        })();
        match verdict {
            Ok((true, true, true, _)) => checks.push(Check::pass(format!("prop25/{name}"))),
            Ok((structure, etale, claim, inner)) => checks.push(Check::fail(
                format!("prop25/{name}"),
                json!({
                    "structure": structure,
                    "etale": etale,
                    "target_claim": claim,
                    "failed": inner.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>(),
                }),
            )),
            Err(e) => {
                checks.push(Check::fail(format!("prop25/{name}"), json!({ "error": e.to_string() })))
            }
        }
    }
    checks
}

/// Round trips in both directions over the full corpus, plus the non-T1
/// variant instances.
pub fn roundtrip_battery(cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, g) in groupoid_corpus(cfg) {
        match roundtrip_groupoid(&g, &cfg.budgets) {
            Ok(w) if all_pass(&w.checks) => {
                checks.push(Check::pass(format!("roundtrip_groupoid/{name}")))
            }
            Ok(w) => checks.push(Check::fail(
                format!("roundtrip_groupoid/{name}"),
                json!({ "failed": w.checks.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>() }),
            )),
            Err(e) => checks.push(Check::fail(
                format!("roundtrip_groupoid/{name}"),
                json!({ "error": e.to_string() }),
            )),
        }
    }
    for (name, c, dialect) in pseudogroup_sheaf_corpus() {
        match roundtrip_pseudogroup(&c, dialect, &cfg.budgets) {
            Ok(w) if all_pass(&w.checks) => {
                checks.push(Check::pass(format!("roundtrip_pseudogroup/{name}")))
            }
            Ok(w) => checks.push(Check::fail(
                format!("roundtrip_pseudogroup/{name}"),
                json!({ "failed": w.checks.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>() }),
            )),
            Err(e) => checks.push(Check::fail(
                format!("roundtrip_pseudogroup/{name}"),
                json!({ "error": e.to_string() }),
            )),
        }
    }
    // Dedicated non-T1 round trips over the named non-T1 bases.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5EC7);
    let mut count = 0usize;
    let bases = [sierpinski(), chain(3), chain(2)];
    while count < 20 {
        let base = &bases[count % bases.len()];
        let g = random_etale_groupoid(base, 12, &mut rng);
        match roundtrip_groupoid(&g, &cfg.budgets) {
            Ok(w) if all_pass(&w.checks) => {
                checks.push(Check::pass(format!("roundtrip_non_t1/{count:02}")))
            }
            Ok(w) => checks.push(Check::fail(
                format!("roundtrip_non_t1/{count:02}"),
                json!({ "failed": w.checks.iter().filter(|c| !c.passed()).map(|c| c.name.clone()).collect::<Vec<_>>() }),
            )),
            Err(e) => checks.push(Check::fail(
                format!("roundtrip_non_t1/{count:02}"),
                json!({ "error": e.to_string() }),
            )),
        }
        count += 1;
    }
    checks
}

/// Sheafification suite: presheaf level (sheaf output, stalk-preserving
/// units, universal property) and pseudogroup level (four conditions,
/// germ-bijective units, per-hom agreement, unique factorization).
pub fn sheafification_battery(cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let spaces = all_spaces_up_to(3);
    let presheaves = presheaf_corpus(&spaces, cfg.seed, 2);
    let mut universality_triples = 0usize;
    for (i, p) in presheaves.iter().enumerate() {
        let name = format!("sheafify_presheaf/{i:03}");
        let verdict = (|| {
            let sh = sheafify(p)?;
            let is_sheaf = sh.sheaf.is_sheaf(CoverMode::Canonical, &cfg.budgets)?.is_sheaf;
            let stalkwise = sh.unit_is_stalkwise_bijective(p);
            Ok::<_, crate::presheaf::PresheafError>((is_sheaf, stalkwise, sh))
        })();
        match verdict {
            Ok((true, true, sh)) => {
                checks.push(Check::pass(&name));
                // Universal property on a sample of morphism triples.
                if universality_triples < 50 {
                    if let Ok(morphisms) = all_presheaf_morphisms(p, &sh.sheaf, 512) {
                        for phi in morphisms.into_iter().take(2) {
                            let ok = factor_through_sheafification(
                                &sh,
                                p,
                                &sh.sheaf,
                                &phi,
                                &cfg.budgets,
                            )
                            .is_ok();
                            checks.push(Check::of(
                                format!("presheaf_universality/{universality_triples:03}"),
                                ok,
                                Some(json!({ "presheaf": i })),
                            ));
                            universality_triples += 1;
                        }
                    }
                }
            }
            Ok((is_sheaf, stalkwise, _)) => checks.push(Check::fail(
                &name,
                json!({ "is_sheaf": is_sheaf, "stalkwise_unit": stalkwise }),
            )),
            Err(e) => checks.push(Check::fail(&name, json!({ "error": e.to_string() }))),
        }
    }

    let mut ppg_triples = 0usize;
    for (name, c, dialect) in ppg_corpus() {
        if dialect != Dialect::T1 {
            continue;
        }
        let full_name = format!("ppg_sheafify/{name}");
        let verdict = (|| {
            let sh = ppg_sheafify(&c, &cfg.budgets)?;
            let four = crate::pseudogroup::is_pseudogroup_sheaf(&sh.hat, Dialect::T1, &cfg.budgets)?;
            let germ_bij = sh.unit_germ_bijective(&c);
            let prop45 = check_prop45(&c, &sh)?;
            Ok::<_, crate::pseudogroup::PpgError>((all_pass(&four), germ_bij, prop45, sh))
        })();
        match verdict {
            Ok((true, true, prop45, sh)) if prop45.agrees && prop45.order_independent => {
                checks.push(Check::pass(&full_name));
                if ppg_triples < 20 {
                    let phi = sh.unit.clone();
                    let ok = check_universality(&c, &sh, &sh.hat, &phi, &cfg.budgets).is_ok();
                    checks.push(Check::of(
                        format!("ppg_universality/{ppg_triples:02}"),
                        ok,
                        Some(json!({ "instance": name })),
                    ));
                    ppg_triples += 1;
                }
            }
            Ok((four, germ_bij, prop45, _)) => checks.push(Check::fail(
                &full_name,
                json!({
                    "conditions": four,
                    "unit_germ_bijective": germ_bij,
                    "prop45": prop45.agrees,
                    "order_independent": prop45.order_independent,
                }),
            )),
            Err(e) => checks.push(Check::fail(&full_name, json!({ "error": e.to_string() }))),
        }
    }
    checks
}

/// Oracle agreements: attained stalks against the brute-force colimit
/// quotient, canonical against exhaustive sheaf checking, minimal-open
/// germ realizations against the inverse-limit threads, and the two germ
/// dialects on T1 spaces.
pub fn oracle_battery(cfg: &BatteryConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let spaces = all_spaces_up_to(3);
    for (i, p) in presheaf_corpus(&spaces, cfg.seed, 1).iter().enumerate() {
        let verdict = (|| {
            for &x in p.space().points() {
                let (_, ids) = p.stalk(x)?;
                let classes = p.stalk_colimit_oracle(x)?;
                if classes.len() != ids.len() {
                    return Ok(false);
                }
            }
            Ok::<_, crate::space::SpaceError>(true)
        })();
        checks.push(match verdict {
            Ok(true) => Check::pass(format!("oracle_stalk/{i:03}")),
            Ok(false) => Check::fail(format!("oracle_stalk/{i:03}"), json!({})),
            Err(e) => {
                Check::fail(format!("oracle_stalk/{i:03}"), json!({ "error": e.to_string() }))
            }
        });
        let verdict = (|| {
            let canonical = p.is_sheaf(CoverMode::Canonical, &cfg.budgets)?.is_sheaf;
            let exhaustive = p.is_sheaf(CoverMode::Exhaustive, &cfg.budgets)?.is_sheaf;
            Ok::<_, crate::presheaf::PresheafError>(canonical == exhaustive)
        })();
        checks.push(match verdict {
            Ok(true) => Check::pass(format!("oracle_covers/{i:03}")),
            Ok(false) => Check::fail(format!("oracle_covers/{i:03}"), json!({})),
            Err(e) => Check::fail(
                format!("oracle_covers/{i:03}"),
                json!({ "error": e.to_string() }),
            ),
        });
    }
    for (name, c, _dialect) in ppg_corpus() {
        let verdict = (|| {
            let space = c.space().clone();
            for x in 0..space.n_points() {
                for y in 0..space.n_points() {
                    let threads = germ_target_hom_oracle(&c, x, y)?;
                    if threads.len() != c.hom_len(space.min_open(x), space.min_open(y)) {
                        return Ok(false);
                    }
                }
            }
            Ok::<_, crate::pseudogroup::PpgError>(true)
        })();
        checks.push(match verdict {
            Ok(true) => Check::pass(format!("oracle_limit/{name}")),
            Ok(false) => Check::fail(format!("oracle_limit/{name}"), json!({})),
            Err(e) => {
                Check::fail(format!("oracle_limit/{name}"), json!({ "error": e.to_string() }))
            }
        });
        match germ_sets_agree_across_dialects(&c) {
            Ok(None) => checks.push(Check::pass(format!("oracle_dialects/{name}"))),
            Ok(Some(w)) => {
                checks.push(Check::fail(format!("oracle_dialects/{name}"), json!({ "witness": w })))
            }
            Err(e) => checks.push(Check::fail(
                format!("oracle_dialects/{name}"),
                json!({ "error": e.to_string() }),
            )),
        }
    }
    checks
}

/// Exact-count regressions for the canonical examples.
pub fn example_battery(cfg: &BatteryConfig) -> Vec<Check> {
    use crate::corpus::groups::cyclic;
    use crate::corpus::spaces::discrete;
    use crate::pseudogroup::{build_germ_groupoid, build_homeo_l, constant_group_sheaf, from_group_sheaf, is_pseudogroup_sheaf};
    let mut checks = Vec::new();
    let run = |name: &str, result: Result<bool, String>, checks: &mut Vec<Check>| match result {
        Ok(true) => checks.push(Check::pass(name)),
        Ok(false) => checks.push(Check::fail(name, json!({}))),
        Err(e) => checks.push(Check::fail(name, json!({ "error": e }))),
    };

    run(
        "example/homeo_l_discrete2_top_count",
        (|| {
            let s = discrete(2);
            let c = build_homeo_l(&s).map_err(|e| e.to_string())?;
            Ok(c.hom_len(&s.full_set(), &s.full_set()) == 4)
        })(),
        &mut checks,
    );
    run(
        "example/homeo_l_discrete2_is_pseudogroup_sheaf",
        (|| {
            let s = discrete(2);
            let c = build_homeo_l(&s).map_err(|e| e.to_string())?;
            let r = is_pseudogroup_sheaf(&c, Dialect::T1, &cfg.budgets).map_err(|e| e.to_string())?;
            Ok(all_pass(&r))
        })(),
        &mut checks,
    );
    run(
        "example/homeo_l_sierpinski_top_count",
        (|| {
            let s = sierpinski();
            let c = build_homeo_l(&s).map_err(|e| e.to_string())?;
            Ok(c.hom_len(&s.full_set(), &s.full_set()) == 1)
        })(),
        &mut checks,
    );
    run(
        "example/homeo_l_sierpinski_non_t1_conditions",
        (|| {
            let s = sierpinski();
            let c = build_homeo_l(&s).map_err(|e| e.to_string())?;
            let r = is_pseudogroup_sheaf(&c, Dialect::NonT1, &cfg.budgets).map_err(|e| e.to_string())?;
            let decomposition = crate::pseudogroup::check_decomposition(&c).map_err(|e| e.to_string())?;
            Ok(all_pass(&r) && !decomposition.holds())
        })(),
        &mut checks,
    );
    run(
        "example/z2_group_sheaf_counts_and_vertex_groups",
        (|| {
            let s = discrete(2);
            let c = from_group_sheaf(constant_group_sheaf(&s, &cyclic(2)).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let full = s.full_set();
            let counts = c.hom_len(&full, &full) == 4;
            let sheaf = all_pass(
                &is_pseudogroup_sheaf(&c, Dialect::T1, &cfg.budgets).map_err(|e| e.to_string())?,
            );
            let g = build_germ_groupoid(&c, Dialect::T1).map_err(|e| e.to_string())?;
            let vertex_only = g.arrows.iter().all(|a| a.src == a.tgt);
            Ok(counts && sheaf && vertex_only && g.n_arrows() == 4)
        })(),
        &mut checks,
    );
    checks
}

/// The ten standard mutations, each of which must be rejected by a suite.
pub fn mutation_battery(cfg: &BatteryConfig) -> Vec<Check> {
    standard_mutations()
        .iter()
        .map(|case| {
            Check::of(
                format!("mutation/{}", case.name),
                case.detected(&cfg.budgets),
                Some(json!({ "expected": "detected" })),
            )
        })
        .collect()
}

/// Morphism transport sanity (a sampled fragment of functoriality of the
/// correspondence).
pub fn transport_battery(cfg: &BatteryConfig) -> Vec<Check> {
    use crate::groupoid::transport_morphism;
    let mut checks = Vec::new();
    for (name, c, dialect) in pseudogroup_sheaf_corpus().into_iter().take(8) {
        let verdict = (|| {
            let built = groupoid_from_pseudogroup(&c, dialect)?;
            let phi = PpgMorphism::identity(&c);
            let morphism_ok = all_pass(&check_ppg_morphism(&phi, &c, &c, &cfg.budgets)?);
            let t = transport_morphism(&phi, &c, &built, &built)?;
            Ok::<_, crate::pseudogroup::PpgError>(morphism_ok && all_pass(&t.checks))
        })();
        checks.push(match verdict {
            Ok(true) => Check::pass(format!("transport/{name}")),
            Ok(false) => Check::fail(format!("transport/{name}"), json!({})),
            Err(e) => Check::fail(format!("transport/{name}"), json!({ "error": e.to_string() })),
        });
    }
    checks
}
