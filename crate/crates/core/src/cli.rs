//! Command-line surface. [`run`] parses arguments, dispatches, and returns
//! the exit code and rendered output instead of touching the process, so
//! the whole surface is testable in-process.
//!
//! Exit codes: 0 success, 1 mathematical negative (a certificate fails, a
//! contradiction or merge is found, a classification has issues), 2 usage
//! or input error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certs::{verify_instance_with, CayleyTable, VerifyOptions};
use crate::classify::{
    classify, family_in_orbit, phase1_eliminate, phase2_eliminate, ClassificationReport, Limits, OrbitStatus,
    Phase1Verdict,
};
use crate::rewrite::{congruence_ball, default_probes, is_consequence, probe_eliminate, ProbeLimits, ProbeVerdict};
use crate::typespace::{burnside_count, canonical_rep, closed_pairs, orbits, to_canonical, TypeTuple};
use crate::words::{instantiate_family, parse_presentation, Family, Params, Presentation, Word};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "monogenic", version, about = "Classify disjoint unions of free monogenic semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Bounds {
    /// Exponent bound for phase-2 elimination.
    #[arg(long, default_value_t = 3)]
    exp_bound: u32,
    /// Derivation depth of probe searches.
    #[arg(long, default_value_t = 24)]
    depth: usize,
    /// Longest word a bidirectional search may visit.
    #[arg(long, default_value_t = 10)]
    word_cap: usize,
}

impl Bounds {
    fn probe_limits(&self) -> ProbeLimits {
        ProbeLimits {
            depth: self.depth,
            maxlen: self.word_cap,
            ..ProbeLimits::default()
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Instance {
    /// Family id, e.g. 3-vii.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters, e.g. i=2,j=2,k=2.
    #[arg(long)]
    params: Option<String>,
    /// File holding a presentation (`letters a b; ab=a^2; ...`).
    #[arg(long)]
    presentation: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full classification.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        copies: u8,
        #[command(flatten)]
        bounds: Bounds,
        /// Worker threads for phase 2.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// List the symmetry orbits of types.
    Orbits {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
        copies: u8,
        #[arg(long)]
        json: bool,
    },
    /// Check the certificate bundle of a family instance.
    Verify {
        #[command(flatten)]
        instance: Instance,
        /// Replacement quotient table.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Canonical form of a type under relabelling and reversal.
    Normalize {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        json: bool,
    },
    /// Search for a derivation between two words.
    Consequence {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Longest intermediate word.
        #[arg(long, default_value_t = 10)]
        word_cap: usize,
        /// Most words visited.
        #[arg(long, default_value_t = 200_000)]
        max_nodes: usize,
        #[arg(long)]
        json: bool,
    },
    /// Congruence classes of all words up to a length.
    Ball {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 8)]
        length: usize,
        #[arg(long)]
        json: bool,
    },
    /// Look for contradictions: probe derivations for a presentation, or
    /// both elimination phases for a type.
    Eliminate {
        #[command(flatten)]
        instance: Instance,
        #[arg(long = "type")]
        ty: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        json: bool,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

struct Report {
    negative: bool,
    invocation: Value,
    result: Value,
    text: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let json = match &cli.command {
        Command::Classify { json, .. }
        | Command::Orbits { json, .. }
        | Command::Verify { json, .. }
        | Command::Normalize { json, .. }
        | Command::Consequence { json, .. }
        | Command::Ball { json, .. }
        | Command::Eliminate { json, .. } => *json,
    };
    match dispatch(cli.command) {
        Err(msg) => Outcome::usage(msg),
        Ok(report) => {
            let stdout = if json {
                let doc = json!({
                    "version": SCHEMA_VERSION,
                    "invocation": report.invocation,
                    "result": report.result,
                });
                serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
            } else {
                report.text
            };
            Outcome {
                code: i32::from(report.negative),
                stdout,
                stderr: String::new(),
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_instance(inst: &Instance) -> Result<Presentation, String> {
    match (&inst.family, &inst.presentation) {
        (Some(_), Some(_)) => Err("give either --family or --presentation, not both".into()),
        (None, None) => Err("an instance is required: --family <id> [--params ...] or --presentation <path>".into()),
        (None, Some(path)) => {
            if inst.params.is_some() {
                return Err("--params only applies to --family".into());
            }
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_presentation(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
        (Some(id), None) => {
            let family = Family::from_label(id).ok_or_else(|| format!("unknown family '{id}'"))?;
            let params = match &inst.params {
                Some(s) => Params::parse(s)?,
                None => Params::new(),
            };
            instantiate_family(family, &params).map_err(|e| e.to_string())
        }
    }
}

fn instance_echo(inst: &Instance) -> Value {
    json!({
        "family": inst.family,
        "params": inst.params,
        "presentation": inst.presentation.as_ref().map(|p| p.display().to_string()),
    })
}

fn parse_word(p: &Presentation, s: &str, flag: &str) -> Result<Word, String> {
    let w = Word::parse(s).map_err(|e| format!("{flag}: {e}"))?;
    if !p.is_over_alphabet(&w) {
        return Err(format!("{flag}: word {w} uses letters outside the alphabet"));
    }
    Ok(w)
}

fn dispatch(cmd: Command) -> Result<Report, String> {
    match cmd {
        Command::Classify {
            copies,
            bounds,
            threads,
            ..
        } => {
            if threads == Some(0) {
                return Err("--threads must be positive".into());
            }
            if bounds.exp_bound == 0 || bounds.depth == 0 || bounds.word_cap == 0 {
                return Err("--exp-bound, --depth and --word-cap must be positive".into());
            }
            let limits = Limits {
                exp_bound: bounds.exp_bound,
                probe: bounds.probe_limits(),
                threads,
                ..Limits::default()
            };
            let report = classify(copies as usize, &limits).map_err(|e| e.to_string())?;
            Ok(Report {
                negative: !report.is_clean(),
                invocation: json!({
                    "subcommand": "classify",
                    "copies": copies,
                    "exp_bound": bounds.exp_bound,
                    "depth": bounds.depth,
                    "word_cap": bounds.word_cap,
                    "forward_word_cap": limits.probe.forward_maxlen,
                    "max_nodes": limits.probe.max_nodes,
                    "landing_cap": limits.landing_cap,
                }),
                text: classify_text(&report),
                result: to_value(&report),
            })
        }
        Command::Orbits { copies, .. } => {
            let gens = copies as usize;
            let list = orbits(gens);
            let (burnside, fixed) = burnside_count(gens);
            let agree = burnside == list.len();
            let mut text = format!(
                "{} types, {} orbits (Burnside: {burnside}{})\n",
                TypeTuple::all(gens).len(),
                list.len(),
                if agree { ", agrees" } else { ", MISMATCH" }
            );
            for o in &list {
                let _ = writeln!(text, "{} size {}", o.representative, o.size);
            }
            Ok(Report {
                negative: !agree,
                invocation: json!({ "subcommand": "orbits", "copies": copies }),
                result: json!({
                    "types": TypeTuple::all(gens).len(),
                    "orbit_count": list.len(),
                    "burnside_count": burnside,
                    "fixed_points": fixed,
                    "orbits": list,
                }),
                text,
            })
        }
        Command::Verify { instance, table, .. } => {
            let p = load_instance(&instance)?;
            let table_echo = table.as_ref().map(|t| t.display().to_string());
            if p.family().is_none() {
                return Err("verify needs a family instance (use --family)".into());
            }
            let table = match &table {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    Some(CayleyTable::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?)
                }
                None => None,
            };
            let opts = VerifyOptions {
                table,
                ..VerifyOptions::default()
            };
            let mut invocation = json!({ "subcommand": "verify", "maxweight": opts.maxweight });
            invocation["instance"] = instance_echo(&instance);
            invocation["table"] = json!(table_echo);
            let (negative, result, text) = match verify_instance_with(&p, &opts) {
                Ok(bundle) => {
                    let label = format!("{} {}", bundle.family, bundle.params);
                    let mut text = format!("{}: verified\n", label.trim_end());
                    for e in &bundle.infinite {
                        let gens: String = e.generators.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
                        let _ = writeln!(text, "  infinite {gens} via {}", e.witness);
                    }
                    for d in &bundle.disjoint {
                        let _ = writeln!(text, "  disjoint via {}", to_value(d)["kind"].as_str().unwrap_or("?"));
                    }
                    (false, json!({ "verified": true, "bundle": bundle }), text)
                }
                Err(e) => (
                    true,
                    json!({ "verified": false, "error": e.to_string() }),
                    format!("verification failed: {e}\n"),
                ),
            };
            Ok(Report {
                negative,
                invocation,
                result,
                text,
            })
        }
        Command::Normalize { ty, .. } => {
            let t = TypeTuple::parse(&ty).map_err(|e| e.to_string())?;
            let canon = canonical_rep(&t);
            let g = to_canonical(&t);
            let family = family_in_orbit(&t);
            let closed: Vec<String> = closed_pairs(&t)
                .iter()
                .map(|&(x, y)| format!("{}{}", (b'a' + x as u8) as char, (b'a' + y as u8) as char))
                .collect();
            let text = format!(
                "{t} -> {canon} via {}\nclosed pairs: {}\nfamily: {}\n",
                g.cycle_string(),
                if closed.is_empty() { "none".into() } else { closed.join(" ") },
                family.map_or("none".to_string(), |(f, ft)| format!("{f} ({ft})"))
            );
            Ok(Report {
                negative: false,
                invocation: json!({ "subcommand": "normalize", "type": ty }),
                result: json!({
                    "type": t,
                    "canonical": canon,
                    "symmetry": g.cycle_string(),
                    "closed_pairs": closed,
                    "family": family.map(|(f, _)| f),
                    "family_type": family.map(|(_, ft)| ft),
                }),
                text,
            })
        }
        Command::Consequence {
            instance,
            from,
            to,
            word_cap,
            max_nodes,
            ..
        } => {
            let p = load_instance(&instance)?;
            let u = parse_word(&p, &from, "--from")?;
            let v = parse_word(&p, &to, "--to")?;
            let verdict = is_consequence(&u, &v, &p, word_cap, max_nodes).map_err(|e| e.to_string())?;
            let text = match &verdict {
                crate::rewrite::Consequence::Derivable { path } => {
                    let mut s = format!("{u} = {v}: derivable in {} steps\n", path.len());
                    for step in path {
                        let _ = writeln!(s, "  {} -> {}", step.source, step.target);
                    }
                    s
                }
                crate::rewrite::Consequence::UnknownWithinBounds { visited, exhausted } => format!(
                    "{u} = {v}: not found ({visited} words visited{})\n",
                    if *exhausted { ", class exhausted" } else { "" }
                ),
            };
            let mut invocation = json!({
                "subcommand": "consequence", "from": from, "to": to,
                "word_cap": word_cap, "max_nodes": max_nodes,
            });
            invocation["instance"] = instance_echo(&instance);
            Ok(Report {
                negative: !verdict.is_derivable(),
                invocation,
                result: json!({ "presentation": p.render(), "consequence": verdict }),
                text,
            })
        }
        Command::Ball { instance, length, .. } => {
            let p = load_instance(&instance)?;
            let (ball, merges) = congruence_ball(&p, length).map_err(|e| e.to_string())?;
            let classes: Vec<Vec<String>> = ball
                .classes()
                .iter()
                .map(|c| c.iter().map(Word::to_power_string).collect())
                .collect();
            let mut text = format!("{} words, {} classes\n", ball.num_words(), ball.num_classes());
            for c in &merges.collisions {
                let _ = writeln!(text, "merge {} ~ {} ({} steps)", c.left, c.right, c.witness.len());
            }
            let mut invocation = json!({ "subcommand": "ball", "length": length });
            invocation["instance"] = instance_echo(&instance);
            Ok(Report {
                negative: !merges.is_empty(),
                invocation,
                result: json!({
                    "presentation": p.render(),
                    "words": ball.num_words(),
                    "class_count": ball.num_classes(),
                    "classes": classes,
                    "merges": merges,
                }),
                text,
            })
        }
        Command::Eliminate {
            instance, ty, bounds, ..
        } => {
            if bounds.exp_bound == 0 || bounds.depth == 0 || bounds.word_cap == 0 {
                return Err("--exp-bound, --depth and --word-cap must be positive".into());
            }
            let limits = bounds.probe_limits();
            let mut invocation = json!({
                "subcommand": "eliminate",
                "exp_bound": bounds.exp_bound,
                "depth": bounds.depth,
                "word_cap": bounds.word_cap,
                "forward_word_cap": limits.forward_maxlen,
                "max_nodes": limits.max_nodes,
            });
            match ty {
                Some(ty) => {
                    if instance.family.is_some() || instance.presentation.is_some() {
                        return Err("give either --type or an instance, not both".into());
                    }
                    let t = TypeTuple::parse(&ty).map_err(|e| e.to_string())?;
                    invocation["type"] = json!(ty);
                    let cap = Limits::default().landing_cap;
                    let phase1 = phase1_eliminate(&t, cap);
                    let survivors = match phase1 {
                        Phase1Verdict::Eliminated { .. } => None,
                        Phase1Verdict::Inconclusive => {
                            Some(phase2_eliminate(&t, bounds.exp_bound, &limits).map_err(|e| e.to_string())?)
                        }
                    };
                    let text = match (&phase1, &survivors) {
                        (Phase1Verdict::Eliminated { probe, left, right }, _) => format!(
                            "{t}: eliminated on {probe}: {} lands in {:?}, {} in {:?}\n",
                            left.strategy, left.outcomes, right.strategy, right.outcomes
                        ),
                        (_, Some(s)) => format!("{t}: {} exponent assignments survive up to {}\n", s.len(), bounds.exp_bound),
                        _ => unreachable!(),
                    };
                    Ok(Report {
                        negative: survivors.as_ref().is_none_or(Vec::is_empty),
                        invocation,
                        result: json!({ "type": t, "phase1": phase1, "phase2_survivors": survivors }),
                        text,
                    })
                }
                None => {
                    let p = load_instance(&instance)?;
                    invocation["instance"] = instance_echo(&instance);
                    let verdict = probe_eliminate(&p, &default_probes(p.alphabet()), &limits).map_err(|e| e.to_string())?;
                    let text = match &verdict {
                        ProbeVerdict::Contradiction { probe, left, right, path } => {
                            format!("contradiction from {probe}: {left} = {right} ({} steps)\n", path.len())
                        }
                        ProbeVerdict::NoneFound => "no contradiction within bounds\n".to_string(),
                    };
                    Ok(Report {
                        negative: verdict.is_contradiction(),
                        invocation,
                        result: json!({ "presentation": p.render(), "verdict": verdict }),
                        text,
                    })
                }
            }
        }
    }
}

fn classify_text(r: &ClassificationReport) -> String {
    let mut s = format!(
        "{} copies, exponents <= {}: {} orbits\n",
        r.copies,
        r.limits.exp_bound,
        r.orbits.len()
    );
    for o in &r.orbits {
        let _ = match &o.status {
            OrbitStatus::EliminatedPhase1(Phase1Verdict::Eliminated { probe, .. }) => {
                writeln!(s, "{} eliminated (landing conflict on {probe})", o.representative)
            }
            OrbitStatus::EliminatedPhase1(Phase1Verdict::Inconclusive) => Ok(()),
            OrbitStatus::EliminatedPhase2 { .. } => writeln!(s, "{} eliminated (all exponents)", o.representative),
            OrbitStatus::Survivor {
                family,
                family_type,
                instances,
            } => {
                let params: Vec<String> = instances.iter().map(|i| format!("[{}]", i.params)).collect();
                writeln!(
                    s,
                    "{} SURVIVES as {family} ({family_type}): {}",
                    o.representative,
                    params.join(" ")
                )
            }
            OrbitStatus::Inconclusive { family, family_type } => writeln!(
                s,
                "{} inconclusive: {family} ({family_type}) has no parameters within the bound",
                o.representative
            ),
        };
    }
    for issue in &r.issues {
        let _ = writeln!(s, "ISSUE: {}", to_value(issue));
    }
    s
}
