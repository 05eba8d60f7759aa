//! Command-line front end: consistency checks, structural analysis, the
//! Beauville oracle and classifier, quotients, corpus construction, and
//! the classifier-versus-oracle verification harness.
//!
//! Exit codes: 0 completed analysis (any verdict), 2 input error,
//! 3 budget exhausted / indeterminate, 4 invariant violation detected.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use beauville_core::beauville::{
    beauville_oracle, beauville_oracle_assembled, classify_fast, good_power_criterion, tame_wild,
    BeauvilleError, Decision, OracleConfig, OracleMode,
};
use beauville_core::forge::search::{
    metabelian_search, MetabelianSearchSpec, SearchBounds, TargetFilter,
};
use beauville_core::forge::{construct_abelian, construct_pquotient};
use beauville_core::group::{enumerate, ConcreteGroup};
use beauville_core::harness::{verify_corpus_dir, CheckStatus, VerifyOptions};
use beauville_core::maxclass::{maximal_class_profile, BranchVerify, MaxClassOutcome};
use beauville_core::pc::{parse_presentation, PcPresentation};
use beauville_core::record::{
    append_record, comparisons_from_fast, decision_name, Comparisons, CorpusRecord, ResultRecord,
};

#[derive(Parser)]
#[command(name = "beauville", version, about = "Beauville property decisions for finite p-groups")]
struct Cli {
    /// Results file (one JSON record per line, append-only).
    #[arg(long, global = true, default_value = "results.jsonl")]
    results: PathBuf,
    /// Do not append a record to the results file.
    #[arg(long, global = true)]
    no_record: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Socle,
}

impl From<ModeArg> for OracleMode {
    fn from(m: ModeArg) -> OracleMode {
        match m {
            ModeArg::Naive => OracleMode::Naive,
            ModeArg::Socle => OracleMode::Socle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation file and run the consistency certificate.
    Check { path: PathBuf },
    /// Profile a group: order, series, maximal-class invariants.
    Analyze { path: PathBuf },
    /// Decide the Beauville property by definition. With several files,
    /// the groups are treated as coprime abelian components of a product.
    Oracle {
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "socle")]
        mode: ModeArg,
        /// Cap on generating pairs examined.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Classify a maximal-class group by its branch profile.
    Classify { path: PathBuf },
    /// Quotient by the center or a lower-central term and write the
    /// resulting presentation.
    Quotient {
        path: PathBuf,
        /// center | gamma:<k>
        #[arg(long)]
        by: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build corpus groups.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Run the full verification matrix over a directory of .pres files.
    VerifyTheorem {
        corpusdir: PathBuf,
        /// Run the oracle only up to this order.
        #[arg(long)]
        oracle_cap: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Finite quotient of the pro-p group of maximal class, order p^{m+1}.
    Pquotient {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
    /// C_{n1} x C_{n2} for powers of a common prime.
    Abelian {
        n1: u64,
        n2: u64,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
    /// Structure-constant search for metabelian maximal-class groups.
    MetabelianSearch {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        /// Comma-separated: mu=K, bg1=p|p2, xbranches=K, exp=p.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Maximum number of emissions.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        comm_window: Option<usize>,
        #[arg(long)]
        pow2_window: Option<usize>,
        #[arg(long)]
        max_candidates: Option<u64>,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    });
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn load(path: &Path) -> anyhow::Result<PcPresentation> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_presentation(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn write_record(cli_results: &Path, no_record: bool, record: &ResultRecord) -> anyhow::Result<()> {
    if no_record {
        return Ok(());
    }
    append_record(cli_results, record)
        .with_context(|| format!("appending to {}", cli_results.display()))
}

fn enumerate_loaded(pres: &PcPresentation) -> anyhow::Result<ConcreteGroup> {
    enumerate(pres).map_err(|e| anyhow!("{e}"))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check { ref path } => {
            let pres = load(path)?;
            let mut record =
                ResultRecord::new("check", CorpusRecord::of(&pres, &path.display().to_string()));
            record.volatile.timestamp_ms = now_ms();
            let started = std::time::Instant::now();
            let outcome = pres.check_consistency().map_err(|e| anyhow!("{e}"))?;
            record.volatile.elapsed_ms = started.elapsed().as_millis() as u64;
            let code = match outcome {
                beauville_core::pc::Consistency::Ok { order } => {
                    println!(
                        "{}: consistent, order {order}, id {}",
                        path.display(),
                        record.group.id
                    );
                    record.note = Some(format!("consistent, order {order}"));
                    0
                }
                beauville_core::pc::Consistency::Violation(v) => {
                    println!("{}: INCONSISTENT: {v}", path.display());
                    record.note = Some(format!("inconsistent: {v}"));
                    4
                }
            };
            write_record(&cli.results, cli.no_record, &record)?;
            Ok(code)
        }

        Command::Analyze { ref path } => {
            let pres = load(path)?;
            let mut record =
                ResultRecord::new("analyze", CorpusRecord::of(&pres, &path.display().to_string()));
            record.volatile.timestamp_ms = now_ms();
            let started = std::time::Instant::now();
            let g = enumerate_loaded(&pres)?;
            println!(
                "{}: order {} = {}^{}, d(G) = {}, exp = {}^{}",
                path.display(),
                g.order(),
                g.prime(),
                g.length(),
                g.is_two_generated().1,
                g.prime(),
                g.exponent_exp()
            );
            match maximal_class_profile(&g, BranchVerify::Auto).map_err(|e| anyhow!("{e}"))? {
                MaxClassOutcome::Profile(profile) => {
                    let summary = profile.summary(true);
                    println!(
                        "maximal class: class {}; ell = {:?}; mu = {:?}; metabelian = {}; G_1 abelian = {:?}",
                        summary.class, summary.ell, summary.mu, summary.metabelian, summary.g1_abelian
                    );
                    println!(
                        "branch order exponents by direction: {:?} (G_1 at {:?})",
                        summary.branch_order_exps, summary.g1_direction
                    );
                    record.profile = Some(summary);
                }
                MaxClassOutcome::NotMaximalClass { n, class } => {
                    println!("not maximal class: class {class} at n = {n}");
                    record.note = Some(format!("not maximal class (class {class}, n {n})"));
                }
            }
            if let Ok((value, agemo)) = good_power_criterion(&g) {
                println!("good power structure: {value} (|G^(p^(e-1))| = {agemo})");
                record.comparisons = Some(Comparisons {
                    good_power_value: Some(value),
                    good_power_agemo_order: Some(agemo),
                    ..Comparisons::default()
                });
            }
            record.volatile.elapsed_ms = started.elapsed().as_millis() as u64;
            write_record(&cli.results, cli.no_record, &record)?;
            Ok(0)
        }

        Command::Oracle { ref paths, mode, budget } => {
            if paths.is_empty() {
                return Err(anyhow!("oracle needs at least one presentation file"));
            }
            let config = OracleConfig {
                mode: mode.into(),
                budget_pairs: budget.unwrap_or(u64::MAX),
                workers: beauville_core::beauville::default_workers(),
            };
            if paths.len() == 1 {
                let path = &paths[0];
                let pres = load(path)?;
                let mut record = ResultRecord::new(
                    "oracle",
                    CorpusRecord::of(&pres, &path.display().to_string()),
                );
                record.volatile.timestamp_ms = now_ms();
                let g = enumerate_loaded(&pres)?;
                match beauville_oracle(&g, &config) {
                    Ok(report) => {
                        let report = if report.decision == Decision::Beauville {
                            tame_wild(&g, &report).map_err(|e| anyhow!("{e}"))?
                        } else {
                            report
                        };
                        println!("{}: {}", path.display(), decision_name(report.decision));
                        if let Some(w) = &report.witness {
                            println!(
                                "witness: S1 = {{{}, {}}}, S2 = {{{}, {}}} (socle classes {:?} | {:?}, naive re-verified: {})",
                                w.s1.0, w.s1.1, w.s2.0, w.s2.1, w.classes1, w.classes2, w.naive_verified
                            );
                        }
                        if let Some(l) = &report.wild_lift {
                            println!(
                                "failing lift: shared socle class {} over direction triples {:?} / {:?}",
                                l.shared_socle_class, l.triple1, l.triple2
                            );
                        }
                        if let Some(o) = &report.obstruction {
                            println!("obstruction: {o}");
                        }
                        record.volatile.elapsed_ms = report.elapsed_ms;
                        record.beauville = Some(report);
                        write_record(&cli.results, cli.no_record, &record)?;
                        Ok(0)
                    }
                    Err(BeauvilleError::Indeterminate { reason, pairs_examined }) => {
                        println!(
                            "{}: indeterminate ({reason}, {pairs_examined} pairs examined)",
                            path.display()
                        );
                        record.note = Some(format!("indeterminate: {reason}"));
                        write_record(&cli.results, cli.no_record, &record)?;
                        Ok(3)
                    }
                    Err(e) => Err(anyhow!("{e}")),
                }
            } else {
                let presentations: Vec<PcPresentation> =
                    paths.iter().map(|p| load(p)).collect::<Result<_, _>>()?;
                let groups: Vec<ConcreteGroup> =
                    presentations.iter().map(enumerate_loaded).collect::<Result<_, _>>()?;
                let refs: Vec<&ConcreteGroup> = groups.iter().collect();
                let report =
                    beauville_oracle_assembled(&refs, &config).map_err(|e| anyhow!("{e}"))?;
                for (p, d) in &report.components {
                    println!("component p = {p}: {}", decision_name(*d));
                }
                println!(
                    "assembled product: {}",
                    if report.beauville { "beauville" } else { "not-beauville" }
                );
                let mut record = ResultRecord::new(
                    "oracle-assembled",
                    CorpusRecord::of(&presentations[0], "assembled"),
                );
                record.volatile.timestamp_ms = now_ms();
                record.note = Some(format!(
                    "assembled: {} over {} components",
                    if report.beauville { "beauville" } else { "not-beauville" },
                    report.components.len()
                ));
                write_record(&cli.results, cli.no_record, &record)?;
                Ok(0)
            }
        }

        Command::Classify { ref path } => {
            let pres = load(path)?;
            let mut record =
                ResultRecord::new("classify", CorpusRecord::of(&pres, &path.display().to_string()));
            record.volatile.timestamp_ms = now_ms();
            let g = enumerate_loaded(&pres)?;
            let profile =
                match maximal_class_profile(&g, BranchVerify::Auto).map_err(|e| anyhow!("{e}"))? {
                    MaxClassOutcome::Profile(p) => p,
                    MaxClassOutcome::NotMaximalClass { n, class } => {
                        return Err(anyhow!(
                            "classifier needs a maximal-class group; class {class} at n = {n}"
                        ));
                    }
                };
            let fast = classify_fast(&g, &profile).map_err(|e| anyhow!("{e}"))?;
            record.profile = Some(profile.summary(true));
            match fast.agreed {
                Some(decision) => {
                    let case = match (fast.small_order_rule, decision) {
                        (true, _) => "exponent rule at order <= p^p".to_string(),
                        (false, Decision::BeauvilleTame) => "case X = G \\ G_1".to_string(),
                        (false, Decision::BeauvilleWild) => {
                            "case X = two maximal branches".to_string()
                        }
                        _ => "outside both cases".to_string(),
                    };
                    println!("{}: {} ({case})", path.display(), decision_name(decision));
                    if let Some(tag) = &fast.negative_tag {
                        println!("note: {tag}");
                    }
                }
                None => {
                    println!(
                        "{}: readings disagree: x-form {:?} vs mu-form {:?} (oracle adjudication required)",
                        path.display(),
                        fast.x_form,
                        fast.mu_form
                    );
                }
            }
            record.comparisons = Some(comparisons_from_fast(&fast));
            record.beauville = fast.to_report();
            write_record(&cli.results, cli.no_record, &record)?;
            Ok(0)
        }

        Command::Quotient { ref path, ref by, ref out } => {
            let pres = load(path)?;
            let g = enumerate_loaded(&pres)?;
            let nsub = if by == "center" {
                g.center()
            } else if let Some(k) = by.strip_prefix("gamma:") {
                let k: usize = k.parse().context("gamma index")?;
                let lcs = g.lower_central_series();
                if k < 2 || k > lcs.terms.len() {
                    return Err(anyhow!("gamma:{k} out of range 2..={}", lcs.terms.len()));
                }
                lcs.terms[k - 1].clone()
            } else {
                return Err(anyhow!("--by must be 'center' or 'gamma:<k>'"));
            };
            let q = g.quotient(&nsub).map_err(|e| anyhow!("{e}"))?;
            let text = q.group.presentation().canonical_text();
            let out_path = out.clone().unwrap_or_else(|| {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("group");
                path.with_file_name(format!("{stem}.quot.pres"))
            });
            if let Some(parent) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&out_path, &text)
                .with_context(|| format!("writing {}", out_path.display()))?;
            println!(
                "{}: quotient by {by} has order {}, written to {}",
                path.display(),
                q.group.order(),
                out_path.display()
            );
            let mut record =
                ResultRecord::new("quotient", CorpusRecord::of(&pres, &path.display().to_string()));
            record.volatile.timestamp_ms = now_ms();
            record.note = Some(format!(
                "quotient by {by}: order {}, id {}",
                q.group.order(),
                q.group.presentation().content_id()
            ));
            write_record(&cli.results, cli.no_record, &record)?;
            Ok(0)
        }

        Command::Construct { kind } => construct(kind),

        Command::VerifyTheorem { ref corpusdir, oracle_cap } => {
            let opts = VerifyOptions {
                oracle_order_cap: oracle_cap.unwrap_or(beauville_core::beauville::SOCLE_ORDER_CAP),
                ..VerifyOptions::default()
            };
            let rows = verify_corpus_dir(corpusdir, &opts)
                .with_context(|| format!("reading {}", corpusdir.display()))?;
            if rows.is_empty() {
                return Err(anyhow!("no .pres files in {}", corpusdir.display()));
            }
            let mut any_failure = false;
            for row in &rows {
                let flag = if row.failed() { "FAIL" } else { "ok" };
                any_failure |= row.failed();
                println!(
                    "[{flag}] {} (p={}, n={}, maximal class: {})",
                    row.group.source, row.group.p, row.group.n, row.is_maximal_class
                );
                if let Some(e) = &row.error {
                    println!("    error: {e}");
                }
                for c in &row.checks {
                    let s = match c.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "FAIL",
                        CheckStatus::NotApplicable => "n/a ",
                    };
                    println!("    {s} {:<24} {}", c.name, c.detail);
                }
                if let Some(adj) = &row.comparisons.forms_disagree_oracle_adjudicated {
                    println!("    flag: classifier readings disagree; oracle adjudicated: {adj}");
                }
                let mut record = ResultRecord::new("verify-theorem", row.group.clone());
                record.volatile.timestamp_ms = now_ms();
                record.profile = row.profile.clone();
                record.comparisons = Some(row.comparisons.clone());
                record.note = Some(format!(
                    "{}: {} checks, {} failed",
                    if row.failed() { "fail" } else { "ok" },
                    row.checks.len(),
                    row.checks.iter().filter(|c| c.status == CheckStatus::Fail).count()
                ));
                write_record(&cli.results, cli.no_record, &record)?;
            }
            let failures = rows.iter().filter(|r| r.failed()).count();
            println!("verified {} groups, {} failures", rows.len(), failures);
            Ok(if any_failure { 4 } else { 0 })
        }
    }
}

fn construct(kind: ConstructKind) -> anyhow::Result<i32> {
    match kind {
        ConstructKind::Pquotient { p, m, outdir } => {
            std::fs::create_dir_all(&outdir)?;
            let q = construct_pquotient(p, m).map_err(|e| anyhow!("{e}"))?;
            let text = q.presentation.canonical_text();
            let id = q.presentation.content_id();
            let file = outdir.join(format!("pquotient_p{p}_m{m}.pres"));
            std::fs::write(&file, &text)?;
            let manifest = serde_json::json!({
                "kind": "pquotient",
                "p": p,
                "m": m,
                "order": q.presentation.order(),
                "files": [{ "path": file.display().to_string(), "id": id }],
                "tool_version": env!("CARGO_PKG_VERSION"),
            });
            let mpath = outdir.join(format!("pquotient_p{p}_m{m}.manifest.json"));
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "wrote {} (order {}), manifest {}",
                file.display(),
                q.presentation.order(),
                mpath.display()
            );
            Ok(0)
        }
        ConstructKind::Abelian { n1, n2, outdir } => {
            std::fs::create_dir_all(&outdir)?;
            let pres = construct_abelian(n1, n2).map_err(|e| anyhow!("{e}"))?;
            let file = outdir.join(format!("abelian_{n1}x{n2}.pres"));
            std::fs::write(&file, pres.canonical_text())?;
            let manifest = serde_json::json!({
                "kind": "abelian",
                "n1": n1,
                "n2": n2,
                "order": pres.order(),
                "files": [{ "path": file.display().to_string(), "id": pres.content_id() }],
                "tool_version": env!("CARGO_PKG_VERSION"),
            });
            let mpath = outdir.join(format!("abelian_{n1}x{n2}.manifest.json"));
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "wrote {} (order {}), manifest {}",
                file.display(),
                pres.order(),
                mpath.display()
            );
            Ok(0)
        }
        ConstructKind::MetabelianSearch {
            p,
            n,
            filter,
            seed,
            limit,
            comm_window,
            pow2_window,
            max_candidates,
            outdir,
        } => {
            std::fs::create_dir_all(&outdir)?;
            let mut bounds = SearchBounds::default();
            if let Some(w) = comm_window {
                bounds.comm_window = w;
            }
            if let Some(w) = pow2_window {
                bounds.pow2_window = w;
            }
            if let Some(c) = max_candidates {
                bounds.max_candidates = c;
            }
            if let Some(l) = limit {
                bounds.max_emissions = l;
            }
            let filter = TargetFilter::parse(&filter).map_err(|e| anyhow!("{e}"))?;
            let spec = MetabelianSearchSpec { p, n, bounds, seed, filter };
            let out = metabelian_search(&spec).map_err(|e| anyhow!("{e}"))?;
            let mut files = Vec::new();
            for (i, e) in out.emissions.iter().enumerate() {
                let file = outdir
                    .join(format!("metabelian_p{p}_n{n}_{i:02}_{}.pres", &e.canonical_id[..8]));
                std::fs::write(&file, e.presentation.canonical_text())?;
                println!(
                    "wrote {} (mu = {:?}, branch orders {:?})",
                    file.display(),
                    e.summary.mu,
                    e.summary.branch_order_exps
                );
                files.push(serde_json::json!({
                    "path": file.display().to_string(),
                    "id": e.presentation.content_id(),
                    "canonical_id": e.canonical_id,
                    "mu": e.summary.mu,
                    "ell": e.summary.ell,
                    "branch_order_exps": e.summary.branch_order_exps,
                }));
            }
            if out.emissions.is_empty() {
                println!(
                    "no emissions within the search envelope (scanned {} of {} candidates)",
                    out.stats.candidates_scanned, out.stats.candidates_total
                );
            }
            let manifest = serde_json::json!({
                "kind": "metabelian-search",
                "spec": spec,
                "stats": out.stats,
                "files": files,
                "tool_version": env!("CARGO_PKG_VERSION"),
            });
            let mpath = outdir.join(format!("metabelian_p{p}_n{n}_seed{seed}.manifest.json"));
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)?;
            println!("manifest {}", mpath.display());
            Ok(0)
        }
    }
}
