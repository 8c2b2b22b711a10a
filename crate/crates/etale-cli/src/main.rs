//! Command-line front end.
//!
//! Subcommands: `validate` (structural checks on one instance file),
//! `check` (named verification suites), `roundtrip` (both directions of
//! the groupoid/section-category correspondence), `corpus` (generated
//! corpora through the full battery), `dot` (graph export). Exit codes:
//! 0 all checks passed, 1 some check failed, 2 the input was unusable.
//! Budgets can be overridden through `ETALE_*` environment variables.

use clap::{Parser, Subcommand, ValueEnum};
use etale::battery::{self, BatteryConfig};
use etale::budget::Budgets;
use etale::groupoid::{
    check_groupoid, check_prop11, groupoid_from_pseudogroup, is_etale, roundtrip_groupoid,
    roundtrip_pseudogroup, sections_category,
};
use etale::io::dot;
use etale::io::json::{parse_instance, Instance, JsonError};
use etale::pseudogroup::{
    check_pre_pseudogroup, underlying_functor_laws, Dialect, PrePseudogroup,
};
use etale::report::{all_pass, Check, CheckStatus, Report};
use etale::sheafify::{check_prop45, check_universality, ppg_sheafify};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "etale", version, about = "Finite-space sheaf and groupoid verification kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Human-readable rendering instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Prop11,
    Def21,
    Prop24,
    Prop25,
    Prop45,
    Universality,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// groupoid → section category → groupoid
    G2p2g,
    /// pseudogroup → groupoid → section category
    P2g2p,
}

#[derive(Clone, Copy, ValueEnum)]
enum DotKind {
    Space,
    Etale,
    Groupoid,
}

#[derive(Subcommand)]
enum Command {
    /// Structural validation of a space, presheaf, pseudogroup or groupoid
    /// file.
    Validate { file: PathBuf },
    /// Run a named verification suite against an instance file.
    Check {
        file: PathBuf,
        #[arg(long)]
        suite: Suite,
    },
    /// Execute a round trip and record the isomorphism witness.
    Roundtrip {
        file: PathBuf,
        #[arg(long)]
        direction: Direction,
    },
    /// Generate corpora and run the full invariant battery.
    Corpus {
        #[arg(long, default_value_t = 0xE7A1E)]
        seed: u64,
        #[arg(long = "max-points", default_value_t = 4)]
        max_points: usize,
        #[arg(long, default_value_t = 200)]
        random: usize,
    },
    /// Write a DOT graph for an instance file.
    Dot {
        file: PathBuf,
        #[arg(long)]
        kind: DotKind,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budgets = Budgets::from_env();
    let started = Instant::now();
    let outcome = run(&cli, &budgets);
    match outcome {
        Ok((instance, checks)) => {
            let report = Report::new(instance, checks, started.elapsed().as_millis());
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> anyhow::Result<()> {
    let body = if cli.pretty {
        let mut lines = vec![format!("instance: {}", report.instance)];
        for check in &report.checks {
            let status = match &check.status {
                CheckStatus::Pass => "PASS".to_string(),
                CheckStatus::Fail => "FAIL".to_string(),
                CheckStatus::Skipped(reason) => format!("SKIP ({reason})"),
            };
            let witness = check
                .witness
                .as_ref()
                .map(|w| format!("  {w}"))
                .unwrap_or_default();
            lines.push(format!("{status:>6}  {}{witness}", check.name));
        }
        lines.push(format!(
            "{} checks, {} failed, digest {}",
            report.checks.len(),
            report.n_failed(),
            &report.digest[..16]
        ));
        lines.join("\n") + "\n"
    } else {
        serde_json::to_string_pretty(report)? + "\n"
    };
    match &cli.output {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn read_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| match e {
        JsonError::Parse(p) => anyhow::anyhow!("parse error in {}: {p}", path.display()),
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })
}

/// Dialect selection: T1 spaces use the classified-germ dialect, non-T1
/// spaces need intrinsic underlying maps.
fn dialect_of(c: &PrePseudogroup) -> anyhow::Result<Dialect> {
    if c.space().is_t1() {
        Ok(Dialect::T1)
    } else {
        let full = c.space().full_set();
        let opens = c.opens().to_vec();
        let has_underlying = opens.iter().all(|u| {
            (0..c.hom_len(u, &full) as etale::pseudogroup::MorId)
                .all(|f| matches!(c.intrinsic_underlying(u, &full, f), Ok(Some(_))))
        });
        if has_underlying {
            Ok(Dialect::NonT1)
        } else {
            anyhow::bail!("suite unavailable: non-T1 space without underlying maps")
        }
    }
}

fn run(cli: &Cli, budgets: &Budgets) -> anyhow::Result<(String, Vec<Check>)> {
    match &cli.command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", file.display()))?;
            let instance = match parse_instance(&text) {
                Ok(instance) => instance,
                // A structurally invalid instance is a failed check, not an
                // unusable input: report it with its witness.
                Err(JsonError::Structure(msg)) => {
                    return Ok((
                        format!("validate:{}", file.display()),
                        vec![Check::fail("structure_valid", json!({ "error": msg }))],
                    ));
                }
                Err(e) => anyhow::bail!("{}: {e}", file.display()),
            };
            let name = format!("validate:{}:{}", instance.kind(), file.display());
            let checks = match &instance {
                Instance::Space(_) => vec![Check::pass("space_valid")],
                Instance::Presheaf(p) => {
                    let report = p.check()?;
                    if report.is_clean() {
                        vec![Check::pass("presheaf_valid")]
                    } else {
                        vec![Check::fail("presheaf_valid", json!(report.violations))]
                    }
                }
                Instance::Pseudogroup(c) => match dialect_of(c) {
                    Ok(dialect) => check_pre_pseudogroup(c, dialect, budgets)?,
                    Err(_) => {
                        // Category axioms still checkable without a dialect.
                        let mut checks =
                            check_pre_pseudogroup(c, Dialect::NonT1, budgets).unwrap_or_default();
                        checks.push(Check::skipped(
                            "dialect_conditions",
                            "non-T1 space without underlying maps",
                        ));
                        checks
                    }
                },
                Instance::Groupoid(g) => check_groupoid(g),
            };
            Ok((name, checks))
        }
        Command::Check { file, suite } => {
            let instance = read_instance(file)?;
            let name = format!("check:{}", file.display());
            let checks = match (suite, instance) {
                (Suite::Prop11, Instance::Groupoid(g)) => {
                    let sections = sections_category(&g)?;
                    check_prop11(&sections, budgets)?.checks
                }
                (Suite::Def21, Instance::Pseudogroup(c)) => {
                    // Condition-by-condition report; non-T1 spaces need
                    // underlying maps for the germ category.
                    if !c.space().is_t1() {
                        dialect_of(&c)?;
                    }
                    let mut checks = check_pre_pseudogroup(
                        &c,
                        dialect_of(&c)?,
                        budgets,
                    )
                    .map(|cs| {
                        cs.into_iter()
                            .filter(|ck| {
                                matches!(
                                    ck.name.as_str(),
                                    "identity_laws" | "inclusion_functoriality"
                                ) || ck.name.starts_with("associativity")
                            })
                            .collect::<Vec<_>>()
                    })?;
                    checks.extend(etale::pseudogroup::def21_conditions(&c, budgets)?);
                    checks
                }
                (Suite::Prop24, Instance::Pseudogroup(c)) => {
                    if !c.space().is_t1() {
                        anyhow::bail!("suite unavailable: prop24 needs a T1 space");
                    }
                    underlying_functor_laws(&c, budgets)?
                }
                (Suite::Prop25, Instance::Pseudogroup(c)) => {
                    let dialect = dialect_of(&c)?;
                    let mut checks = etale::pseudogroup::is_pseudogroup_sheaf(&c, dialect, budgets)?;
                    if all_pass(&checks) {
                        let built = groupoid_from_pseudogroup(&c, dialect)?;
                        checks.extend(check_groupoid(&built.groupoid));
                        let etale_report = is_etale(&built.groupoid);
                        checks.push(Check::of(
                            "built_groupoid_etale",
                            etale_report.etale,
                            Some(json!({
                                "s_failures": etale_report.s_failures,
                                "t_failures": etale_report.t_failures,
                            })),
                        ));
                    }
                    checks
                }
                (Suite::Prop45, Instance::Pseudogroup(c)) => {
                    if !c.space().is_t1() {
                        anyhow::bail!("suite unavailable: prop45 needs a T1 space");
                    }
                    let sh = ppg_sheafify(&c, budgets)?;
                    let report = check_prop45(&c, &sh)?;
                    vec![
                        Check::of(
                            "hom_sheafifications_agree",
                            report.agrees,
                            report.witness.clone(),
                        ),
                        Check::of("closure_order_independent", report.order_independent, None),
                    ]
                }
                (Suite::Universality, Instance::Pseudogroup(c)) => {
                    if !c.space().is_t1() {
                        anyhow::bail!("suite unavailable: universality needs a T1 space");
                    }
                    let sh = ppg_sheafify(&c, budgets)?;
                    match check_universality(&c, &sh, &sh.hat, &sh.unit, budgets) {
                        Ok((_, combinations)) => vec![Check::of(
                            "unique_factorization",
                            true,
                            Some(json!({ "candidates_enumerated": combinations })),
                        )],
                        Err(e) => {
                            vec![Check::fail("unique_factorization", json!({ "error": e.to_string() }))]
                        }
                    }
                }
                (_, other) => anyhow::bail!(
                    "suite unavailable for a {} file",
                    other.kind()
                ),
            };
            Ok((name, checks))
        }
        Command::Roundtrip { file, direction } => {
            let instance = read_instance(file)?;
            let name = format!("roundtrip:{}", file.display());
            let checks = match (direction, instance) {
                (Direction::G2p2g, Instance::Groupoid(g)) => match roundtrip_groupoid(&g, budgets) {
                    Ok(witness) => witness.checks,
                    Err(etale::groupoid::RoundtripError::WitnessFailed { checks, .. }) => checks,
                    Err(e) => vec![Check::fail("roundtrip", json!({ "error": e.to_string() }))],
                },
                (Direction::P2g2p, Instance::Pseudogroup(c)) => {
                    let dialect = dialect_of(&c)?;
                    match roundtrip_pseudogroup(&c, dialect, budgets) {
                        Ok(witness) => witness.checks,
                        Err(etale::groupoid::RoundtripError::WitnessFailed { checks, .. }) => checks,
                        Err(e) => vec![Check::fail("roundtrip", json!({ "error": e.to_string() }))],
                    }
                }
                (_, other) => anyhow::bail!(
                    "direction incompatible with a {} file",
                    other.kind()
                ),
            };
            Ok((name, checks))
        }
        Command::Corpus { seed, max_points, random } => {
            let cfg = BatteryConfig {
                seed: *seed,
                max_points: *max_points,
                n_random_groupoids: *random,
                budgets: *budgets,
            };
            let mut checks = Vec::new();
            let groups: Vec<(&str, Vec<Check>)> = vec![
                ("prop11", battery::prop11_battery(&cfg)),
                ("prop24", battery::prop24_battery(&cfg)),
                ("prop25", battery::prop25_battery(&cfg)),
                ("roundtrips", battery::roundtrip_battery(&cfg)),
                ("sheafification", battery::sheafification_battery(&cfg)),
                ("oracles", battery::oracle_battery(&cfg)),
                ("examples", battery::example_battery(&cfg)),
                ("mutations", battery::mutation_battery(&cfg)),
                ("transport", battery::transport_battery(&cfg)),
            ];
            for (label, group) in groups {
                let passed = group.iter().filter(|c| c.passed()).count();
                eprintln!("{label:>16}: {passed}/{} pass", group.len());
                checks.extend(group);
            }
            Ok((format!("corpus:seed={seed}:max_points={max_points}"), checks))
        }
        Command::Dot { file, kind, out } => {
            let instance = read_instance(file)?;
            let mut checks = vec![Check::pass("dot_written")];
            let body = match (kind, instance) {
                (DotKind::Space, Instance::Space(s)) => dot::space_dot(&s),
                (DotKind::Etale, Instance::Presheaf(p)) => {
                    // The etale space travels as the total-space JSON plus
                    // the DOT rendering.
                    let bundle = etale::presheaf::etale_space(&p)?;
                    let json_path = out.with_extension("json");
                    let value = etale::io::json::space_to_value(&bundle.total)?;
                    std::fs::write(&json_path, serde_json::to_string_pretty(&value)? + "\n")?;
                    checks.push(Check::pass("total_space_json_written"));
                    dot::etale_dot(&p)?
                }
                (DotKind::Groupoid, Instance::Groupoid(g)) => dot::groupoid_dot(&g),
                (_, other) => anyhow::bail!("kind incompatible with a {} file", other.kind()),
            };
            std::fs::write(out, &body)?;
            Ok((format!("dot:{}", file.display()), checks))
        }
    }
}
