//! `delegate`: batch front end over the exact delegation solvers.
//!
//! Every subcommand reads and writes JSON documents (instances, menus,
//! reports) on files or stdin/stdout, so generators, solvers and verifiers
//! compose with ordinary shell pipes. All numbers are exact rationals;
//! `--format table` renders reports for humans, with decimal
//! approximations clearly marked. Exit codes: 0 success, 1 usage or input
//! error, 2 infeasible input or failed verification, 3 size guard.

use std::fs;
use std::io::{Read, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use delegation::continuous::{solve_continuous, ContinuousActionFamily};
use delegation::generators::{gen_hardness, gen_random, gen_randomized_gap, gen_single_bad, GraphSpec};
use delegation::instance::DeterministicMenu;
use delegation::oracle::{brute_force_opt_k, verify_menu};
use delegation::pricing::{
    restrict_to_selected, solution_from_json_str, solution_to_json_string, solve_menu_k,
    SolveOptions,
};
use delegation::randomized::{recover_menu, regularize, solve_randomized_lp, verify_randomized, RandomizedMenu};
use delegation::rational::{format_approx, format_rat, parse_rat};
use delegation::robust::{robustify, verify_approx, RobustnessParams};
use delegation::{DelegationInstance, Error, Rat};

#[derive(Parser)]
#[command(
    name = "delegate",
    version,
    about = "Exact menus of outcome-contingent payments for delegated decisions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Where to write the result ("-" for stdout).
    #[arg(short, long, global = true, default_value = "-")]
    output: String,
    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a built-in instance family as JSON.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Solve for an exactly optimal menu of k priced items.
    SolveDet {
        #[command(flatten)]
        io: InstanceArg,
        /// Menu size.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Price-floor relaxation level (rational).
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Solve the randomized relaxation and recover an exact randomized menu.
    SolveRand {
        #[command(flatten)]
        io: InstanceArg,
    },
    /// Discretize a continuous action family and run the full pipeline.
    SolveCont {
        /// Built-in family name.
        #[arg(long, default_value = "toy", conflicts_with = "family_file")]
        family: String,
        /// Tabulated family JSON (overrides --family).
        #[arg(long)]
        family_file: Option<String>,
        /// Grid spacing (rational in (0, 1]).
        #[arg(long)]
        delta: String,
    },
    /// Discount and prune a solved menu so it survives estimation error.
    Robustify {
        #[command(flatten)]
        io: InstanceArg,
        /// Menu document ("-" for stdin).
        #[arg(short, long)]
        menu: String,
        /// User-side slack the input menu must tolerate (rational).
        #[arg(long)]
        delta: String,
        /// Floor level the input prices respect (default: the menu's own).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Check a menu document against an instance.
    Verify {
        #[command(flatten)]
        io: InstanceArg,
        /// Menu document ("-" for stdin).
        #[arg(short, long)]
        menu: String,
        /// Accepted user-side slack for priced menus (rational).
        #[arg(long, default_value = "0")]
        delta: String,
        /// Accepted provider-side slack (default: the menu's own eps).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Brute-force reference optimum for a menu of k items.
    Oracle {
        #[command(flatten)]
        io: InstanceArg,
        /// Menu size.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Tabulate deterministic optima for k = 1..min(n, l) plus the randomized value.
    Compare {
        #[command(flatten)]
        io: InstanceArg,
    },
}

#[derive(Args)]
struct InstanceArg {
    /// Instance JSON ("-" for stdin).
    #[arg(short, long, default_value = "-")]
    instance: String,
}

#[derive(Subcommand)]
enum Family {
    /// Diagonal family: action i yields outcome i, valued only by type i.
    SingleBad {
        #[arg(long)]
        n: usize,
    },
    /// Weighted family separating randomized from deterministic menus.
    Gap {
        #[arg(long)]
        n: usize,
    },
    /// Seeded random instance on a coarse rational grid.
    Random {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Independent-set reduction on a graph.
    Hardness {
        /// Number of vertices.
        #[arg(long)]
        vertices: usize,
        /// Comma-separated 1-indexed edges, e.g. "2-1,3-2".
        #[arg(long, default_value = "")]
        edges: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SizeGuard { .. } => 3,
            Error::InfeasibleProgram(_)
            | Error::UnexpectedUnbounded
            | Error::NotIc { .. }
            | Error::Precondition(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished report: a JSON document, its table rendering, and the exit
/// code (verification failures exit 2 after reporting).
struct Report {
    doc: Value,
    table: Vec<String>,
    code: u8,
}

impl Report {
    fn ok(doc: Value, table: Vec<String>) -> Self {
        Report { doc, table, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if benign { 0 } else { 1 });
        }
    };
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("error: thread pool already initialized");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(report) => {
            let rendered = match cli.format {
                Format::Json => format!("{:#}", report.doc),
                Format::Table => report.table.join("\n"),
            };
            if let Err(e) = write_output(&cli.output, &rendered) {
                eprintln!("error: {}", e.message);
                return ExitCode::from(e.code);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {path}: {e}")))
    }
}

fn write_output(path: &str, text: &str) -> Result<(), Failure> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        match writeln!(out, "{text}").and_then(|()| out.flush()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
                // Downstream closed the pipe (e.g. `| head`); not our error.
                std::process::exit(0);
            }
            other => other.map_err(|e| Failure::usage(format!("writing stdout: {e}"))),
        }
    } else {
        fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::usage(format!("writing {path}: {e}")))
    }
}

fn load_instance(io: &InstanceArg) -> Result<DelegationInstance, Failure> {
    Ok(DelegationInstance::from_json_str(&read_input(&io.instance)?)?)
}

fn rational(flag: &str, text: &str) -> Result<Rat, Failure> {
    parse_rat(text).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

/// Menu documents may arrive bare or wrapped in a solver report under a
/// "menu" key; returns the inner document and its kind tag.
fn menu_payload(text: &str) -> Result<(String, Value), Failure> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Failure::usage(format!("menu JSON: {e}")))?;
    let inner = match doc.get("menu") {
        Some(menu) => menu.clone(),
        None => doc,
    };
    let kind = inner
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::usage("menu document lacks a \"kind\" field"))?
        .to_string();
    Ok((kind, inner))
}

fn value_cell(x: &Rat) -> String {
    format!("{} ({})", format_rat(x), format_approx(x))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.cmd {
        Cmd::Gen { family } => gen_cmd(family),
        Cmd::SolveDet { io, k, eps } => solve_det_cmd(io, *k, eps),
        Cmd::SolveRand { io } => solve_rand_cmd(io),
        Cmd::SolveCont {
            family,
            family_file,
            delta,
        } => solve_cont_cmd(family, family_file.as_deref(), delta),
        Cmd::Robustify {
            io,
            menu,
            delta,
            eps,
        } => robustify_cmd(io, menu, delta, eps.as_deref()),
        Cmd::Verify {
            io,
            menu,
            delta,
            eps,
        } => verify_cmd(io, menu, delta, eps.as_deref()),
        Cmd::Oracle { io, k } => oracle_cmd(io, *k),
        Cmd::Compare { io } => compare_cmd(io),
    }
}

fn gen_cmd(family: &Family) -> Result<Report, Failure> {
    let inst = match family {
        Family::SingleBad { n } => gen_single_bad(*n)?,
        Family::Gap { n } => gen_randomized_gap(*n)?,
        Family::Random { n, m, l, seed } => gen_random(*n, *m, *l, *seed)?,
        Family::Hardness { vertices, edges } => {
            let parsed = parse_edges(edges)?;
            let graph = GraphSpec::new(*vertices, parsed)?;
            gen_hardness(&graph)?.0
        }
    };
    let doc: Value = serde_json::from_str(&inst.to_json_string())
        .expect("instance serialization is valid JSON");
    let table = [format!(
        "instance: {} types, {} outcomes, {} actions",
        inst.num_types(),
        inst.num_outcomes(),
        inst.num_actions()
    )];
    // Instances always pipe as JSON so gen composes with the solvers.
    Ok(Report {
        doc: doc.clone(),
        table: vec![format!("{doc:#}"), table[0].clone()],
        code: 0,
    })
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let mut edges = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (v, w) = part
            .trim()
            .split_once('-')
            .ok_or_else(|| Failure::usage(format!("--edges: expected v-w, found {part:?}")))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--edges: bad vertex {v:?}")))?;
        let w = w
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--edges: bad vertex {w:?}")))?;
        edges.push((v, w));
    }
    Ok(edges)
}

fn solve_det_cmd(io: &InstanceArg, k: usize, eps: &str) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let opts = SolveOptions {
        eps: rational("eps", eps)?,
        ..SolveOptions::default()
    };
    let report = solve_menu_k(&inst, k, &opts)?;
    let menu_doc: Value =
        serde_json::from_str(&solution_to_json_string(&inst, &report.solution))
            .expect("solution serialization is valid JSON");
    let mut table = vec![
        format!("value {}", value_cell(&report.value)),
        format!(
            "searched {} action tuples, {} candidate menus",
            report.tuples, report.candidates
        ),
    ];
    for (i, item) in report.solution.items.iter().enumerate() {
        table.push(match item.action {
            Some(a) => format!(
                "item {i}: action {} at price {}",
                inst.actions[a],
                value_cell(&item.q)
            ),
            None => format!("item {i}: opt out"),
        });
    }
    for (t, entry) in report.selection.iter().enumerate() {
        table.push(match entry.item {
            Some(i) => format!("type {} -> item {i}", inst.types[t]),
            None => format!("type {} -> opts out", inst.types[t]),
        });
    }
    Ok(Report::ok(
        json!({
            "kind": "solve_det_report",
            "value": format_rat(&report.value),
            "tuples": report.tuples,
            "candidates": report.candidates,
            "menu": menu_doc,
        }),
        table,
    ))
}

fn solve_rand_cmd(io: &InstanceArg) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let relaxed = solve_randomized_lp(&inst)?;
    let regular = regularize(&inst, &relaxed)?;
    let menu = recover_menu(&inst, &regular)?;
    let menu_doc: Value = serde_json::from_str(&menu.to_json_string(&inst))
        .expect("menu serialization is valid JSON");
    let mut table = vec![format!("value {}", value_cell(&relaxed.value))];
    table.extend(randomized_table(&inst, &menu));
    Ok(Report::ok(
        json!({
            "kind": "solve_rand_report",
            "value": format_rat(&relaxed.value),
            "menu": menu_doc,
        }),
        table,
    ))
}

fn randomized_table(inst: &DelegationInstance, menu: &RandomizedMenu) -> Vec<String> {
    let mut lines = Vec::new();
    for t in 0..inst.num_types() {
        let mut parts = Vec::new();
        if !menu.opt_out[t].is_zero() {
            parts.push(format!("opts out w.p. {}", format_rat(&menu.opt_out[t])));
        }
        for a in 0..inst.num_actions() {
            if menu.phi[t][a].is_zero() {
                continue;
            }
            let expected = (0..inst.num_outcomes()).fold(Rat::zero(), |acc, w| {
                &acc + &(&inst.outcome_dists[a][w] * &menu.payments[t][a][w])
            });
            parts.push(format!(
                "plays {} w.p. {} paying {} on average",
                inst.actions[a],
                format_rat(&menu.phi[t][a]),
                format_rat(&expected)
            ));
        }
        lines.push(format!("type {}: {}", inst.types[t], parts.join("; ")));
    }
    lines
}

fn solve_cont_cmd(
    family: &str,
    family_file: Option<&str>,
    delta: &str,
) -> Result<Report, Failure> {
    let fam = match family_file {
        Some(path) => ContinuousActionFamily::from_json_str(&read_input(path)?)?,
        None => match family {
            "toy" => ContinuousActionFamily::toy(),
            other => {
                return Err(Failure::usage(format!(
                    "--family: unknown family {other:?} (built-in: toy; or pass --family-file)"
                )))
            }
        },
    };
    let delta = rational("delta", delta)?;
    let report = solve_continuous(&fam, &delta)?;
    let inst = &report.program.instance;
    let menu_doc: Value = serde_json::from_str(&solution_to_json_string(inst, report.solution()))
        .expect("solution serialization is valid JSON");
    let inst_doc: Value =
        serde_json::from_str(&inst.to_json_string()).expect("instance serialization is valid JSON");
    let table = vec![
        format!(
            "family {} on a grid of {} actions (spacing {})",
            fam.name,
            report.program.grid.len(),
            format_rat(&delta)
        ),
        format!("relaxed optimum {}", value_cell(&report.relaxed_value)),
        format!("guarantee {}", value_cell(report.guarantee())),
        format!("provider slack {}", value_cell(&report.provider_slack)),
        format!(
            "kept {} item(s), dropped {}",
            report.robust.kept.len(),
            report.robust.dropped.len()
        ),
    ];
    Ok(Report::ok(
        json!({
            "kind": "solve_cont_report",
            "relaxed_value": format_rat(&report.relaxed_value),
            "guarantee": format_rat(report.guarantee()),
            "provider_slack": format_rat(&report.provider_slack),
            "kept": report.robust.kept,
            "dropped": report.robust.dropped,
            "warnings": report.robust.warnings,
            "menu": menu_doc,
            "instance": inst_doc,
        }),
        table,
    ))
}

fn robustify_cmd(
    io: &InstanceArg,
    menu: &str,
    delta: &str,
    eps: Option<&str>,
) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let (kind, payload) = menu_payload(&read_input(menu)?)?;
    if kind != "pricing" {
        return Err(Failure::usage(format!(
            "robustify expects a priced menu document, found kind {kind:?}"
        )));
    }
    let sol = solution_from_json_str(&payload.to_string(), &inst)?;
    let eps = match eps {
        Some(text) => rational("eps", text)?,
        None => sol.eps.clone(),
    };
    let params = RobustnessParams::new(rational("delta", delta)?, eps)?;
    let out = robustify(&inst, &sol, &params)?;
    let menu_doc: Value = serde_json::from_str(&solution_to_json_string(&inst, &out.solution))
        .expect("solution serialization is valid JSON");
    let mut table = vec![
        format!("assumed value {}", value_cell(&out.assumed_value)),
        format!("guarantee {}", value_cell(&out.guarantee)),
        format!(
            "kept {} item(s), dropped {}; discount rate {}, margin threshold {}",
            out.kept.len(),
            out.dropped.len(),
            format_rat(&out.alpha),
            format_rat(&out.threshold)
        ),
        format!("provider slack after discount {}", value_cell(&out.eps_out)),
    ];
    table.extend(out.warnings.iter().map(|w| format!("warning: {w}")));
    Ok(Report::ok(
        json!({
            "kind": "robustify_report",
            "assumed_value": format_rat(&out.assumed_value),
            "guarantee": format_rat(&out.guarantee),
            "alpha": format_rat(&out.alpha),
            "threshold": format_rat(&out.threshold),
            "eps_out": format_rat(&out.eps_out),
            "kept": out.kept,
            "dropped": out.dropped,
            "warnings": out.warnings,
            "menu": menu_doc,
        }),
        table,
    ))
}

fn verify_cmd(
    io: &InstanceArg,
    menu: &str,
    delta: &str,
    eps: Option<&str>,
) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let (kind, payload) = menu_payload(&read_input(menu)?)?;
    let delta = rational("delta", delta)?;
    match kind.as_str() {
        "deterministic" => {
            let parsed = DeterministicMenu::from_json_str(&payload.to_string(), &inst)?;
            let report = verify_menu(&inst, &parsed);
            let mut table = vec![
                format!("value {}", value_cell(&report.value)),
                format!("provider IC: {}", if report.scheme_checks.iter().all(|c| c.provider_ok) { "ok" } else { "violated" }),
            ];
            for check in report.scheme_checks.iter().filter(|c| !c.provider_ok) {
                table.push(format!(
                    "scheme {}: deviation gains {}",
                    check.scheme,
                    check
                        .gain
                        .as_ref()
                        .map(format_rat)
                        .unwrap_or_else(|| "?".into())
                ));
            }
            for (t, other) in &report.user_ic_violations {
                table.push(format!("type {t} prefers scheme {other}"));
            }
            for t in &report.user_ir_violations {
                table.push(format!("type {t} is better off opting out"));
            }
            for s in &report.provider_ir_violations {
                table.push(format!("scheme {s} runs at a loss"));
            }
            table.push(if report.ok { "ok".into() } else { "violated".into() });
            let doc = json!({
                "kind": "verify_report",
                "menu_kind": "deterministic",
                "ok": report.ok,
                "value": format_rat(&report.value),
                "provider_violations": report.scheme_checks.iter().enumerate()
                    .filter(|(_, c)| !c.provider_ok)
                    .map(|(i, _)| i).collect::<Vec<_>>(),
                "user_ic_violations": report.user_ic_violations,
                "user_ir_violations": report.user_ir_violations,
                "provider_ir_violations": report.provider_ir_violations,
            });
            Ok(Report {
                code: if report.ok { 0 } else { 2 },
                doc,
                table,
            })
        }
        "randomized" => {
            let parsed = RandomizedMenu::from_json_str(&payload.to_string(), &inst)?;
            let report = verify_randomized(&inst, &parsed);
            let ok = report.ok;
            let doc = json!({
                "kind": "verify_report",
                "menu_kind": "randomized",
                "ok": ok,
                "value": format_rat(&report.value),
                "provider_ic_slack": format_rat(&report.provider_ic_slack),
                "user_ic_slack": format_rat(&report.user_ic_slack),
                "user_ir_slack": format_rat(&report.user_ir_slack),
            });
            let table = vec![
                format!("value {}", value_cell(&report.value)),
                format!(
                    "slacks: provider {} user IC {} user IR {}",
                    format_rat(&report.provider_ic_slack),
                    format_rat(&report.user_ic_slack),
                    format_rat(&report.user_ir_slack)
                ),
                if ok { "ok".into() } else { "violated".into() },
            ];
            Ok(Report {
                code: if ok { 0 } else { 2 },
                doc,
                table,
            })
        }
        "pricing" => {
            let sol = solution_from_json_str(&payload.to_string(), &inst)?;
            let eps = match eps {
                Some(text) => rational("eps", text)?,
                None => sol.eps.clone(),
            };
            let report = verify_approx(&inst, &sol, None)?;
            let ok = report.within(&delta, &eps) && report.unpriceable.is_empty();
            let doc = json!({
                "kind": "verify_report",
                "menu_kind": "pricing",
                "ok": ok,
                "user_ic_slack": format_rat(&report.user_ic_slack),
                "user_ir_slack": format_rat(&report.user_ir_slack),
                "provider_slack": format_rat(&report.provider_slack),
                "unpriceable_items": report.unpriceable,
                "accepted_delta": format_rat(&delta),
                "accepted_eps": format_rat(&eps),
            });
            let table = vec![
                format!(
                    "slacks: user IC {} user IR {} provider {}",
                    format_rat(&report.user_ic_slack),
                    format_rat(&report.user_ir_slack),
                    format_rat(&report.provider_slack)
                ),
                format!(
                    "accepted: user {} provider {}",
                    format_rat(&delta),
                    format_rat(&eps)
                ),
                if ok { "ok".into() } else { "violated".into() },
            ];
            Ok(Report {
                code: if ok { 0 } else { 2 },
                doc,
                table,
            })
        }
        other => Err(Failure::usage(format!(
            "cannot verify menu documents of kind {other:?}"
        ))),
    }
}

fn oracle_cmd(io: &InstanceArg, k: usize) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let result = brute_force_opt_k(&inst, k)?;
    let witness = result.witness.solution();
    let menu_doc: Value = serde_json::from_str(&solution_to_json_string(&inst, &witness))
        .expect("solution serialization is valid JSON");
    let table = vec![
        format!("value {}", value_cell(&result.value)),
        format!("searched {} (menu, assignment) pairs", result.pairs),
    ];
    Ok(Report::ok(
        json!({
            "kind": "oracle_report",
            "value": format_rat(&result.value),
            "pairs": result.pairs,
            "menu": menu_doc,
        }),
        table,
    ))
}

fn compare_cmd(io: &InstanceArg) -> Result<Report, Failure> {
    let inst = load_instance(io)?;
    let cap = inst.num_types().min(inst.num_actions());
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for k in 1..=cap {
        let solved = solve_menu_k(&inst, k, &SolveOptions::default())?;
        let restricted = restrict_to_selected(&inst, &solved.solution);
        table.push(format!(
            "k={k}  {}  ({} item(s) sold)",
            value_cell(&solved.value),
            restricted.items.len()
        ));
        rows.push(json!({
            "k": k,
            "value": format_rat(&solved.value),
        }));
    }
    let relaxed = solve_randomized_lp(&inst)?;
    table.push(format!("randomized  {}", value_cell(&relaxed.value)));
    Ok(Report::ok(
        json!({
            "kind": "compare_report",
            "deterministic": rows,
            "randomized": format_rat(&relaxed.value),
        }),
        table,
    ))
}
