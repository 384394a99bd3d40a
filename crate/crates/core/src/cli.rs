//! Command-line front end. [`run`] returns the exit code together with the
//! text written to stdout, so the binary is a thin wrapper and tests can
//! drive every subcommand in-process.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::conditions::{check, Condition, Verdict};
use crate::constructions::{self, Witness};
use crate::cylinder::{self, display_clopen};
use crate::error::{Result, UgkError};
use crate::fullgroup;
use crate::oracle;
use crate::script::{self, Session, ORDER_CAP};
use crate::ultragraph::Ultragraph;

pub const REPORT_SCHEMA: &str = "ugk-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ugk", version, about = "Ultragraph groupoids and their topological full groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Ultragraph presentation file.
    pub file: PathBuf,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide graph conditions.
    Check {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list drawn from L,K,T,ND,INF,W.
        #[arg(long, value_delimiter = ',', default_value = "L,K,T,ND,INF,W")]
        conditions: Vec<String>,
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
    /// List the minimal infinite emitters.
    Mie {
        #[command(flatten)]
        common: Common,
    },
    /// Check that every range is a finite union of minimal infinite emitters
    /// and vertices.
    Rfum {
        #[command(flatten)]
        common: Common,
    },
    /// Construct and verify a full-group witness.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: WitnessKind,
        /// Target clopen set, e.g. `D(; mie#0) + D(e1; r(e1))`.
        #[arg(long)]
        set: String,
        /// Point for `f1`.
        #[arg(long)]
        point: Option<String>,
        /// Involution for `f2`, as a group word.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
    /// Evaluate a group-word script.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Script file; `-` reads the script from `--expr`.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Inline script; `;;` separates statements.
        #[arg(long, short = 'e')]
        expr: Option<String>,
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
    /// Differential test of the cylinder algebra against brute force.
    OracleDiff {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vertex and edge-index cutoff; chosen automatically when absent.
        #[arg(long)]
        truncate: Option<u64>,
        #[arg(long, default_value_t = 6)]
        complexity: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    F1,
    F2,
    F3,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Outcome {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

fn color(enabled: bool, verdict: Verdict, text: &str) -> String {
    if !enabled {
        return text.to_string();
    }
    let c = match verdict {
        Verdict::Holds => "32",
        Verdict::Fails => "31",
        Verdict::Unknown => "33",
    };
    format!("\x1b[{c}m{text}\x1b[0m")
}

fn color_enabled() -> bool {
    matches!(std::env::var("UGK_COLOR").as_deref(), Ok("1" | "always" | "yes"))
}

fn exit_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::Fails => return EXIT_FAILS,
            Verdict::Unknown => code = EXIT_UNKNOWN,
            Verdict::Holds => {}
        }
    }
    code
}

fn report(command: &str, common: &Common, code: i32, body: Value) -> String {
    let mut v = json!({
        "schema": REPORT_SCHEMA,
        "command": command,
        "input": common.file.display().to_string(),
        "exit": code,
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    serde_json::to_string_pretty(&v).expect("reports serialise") + "\n"
}

fn input_error(common: Option<&Common>, e: &UgkError) -> Outcome {
    match common {
        Some(c) if c.json => Outcome::out(
            EXIT_INPUT,
            report("error", c, EXIT_INPUT, json!({ "error": e.to_string() })),
        ),
        _ => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load(common: &Common) -> Result<Ultragraph> {
    let text = fs::read_to_string(&common.file)
        .map_err(|e| UgkError::InvalidPresentation(format!("{}: {e}", common.file.display())))?;
    Ultragraph::parse(&text)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) if e.use_stderr() => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: e.render().to_string(),
        },
        Err(e) => Outcome::out(EXIT_OK, e.render().to_string()),
    }
}

pub fn execute(cmd: Command) -> Outcome {
    let common = match &cmd {
        Command::Check { common, .. }
        | Command::Mie { common }
        | Command::Rfum { common }
        | Command::Witness { common, .. }
        | Command::Eval { common, .. }
        | Command::OracleDiff { common, .. } => common.clone(),
    };
    let g = match load(&common) {
        Ok(g) => g,
        Err(UgkError::RfumViolation { edge, remainder }) if matches!(cmd, Command::Rfum { .. }) => {
            return rfum_failure(&common, &edge, &remainder.to_string());
        }
        Err(e) => return input_error(Some(&common), &e),
    };
    let r = match cmd {
        Command::Check { conditions, bound, .. } => run_check(&g, &common, &conditions, bound),
        Command::Mie { .. } => Ok(run_mie(&g, &common)),
        Command::Rfum { .. } => run_rfum(&g, &common),
        Command::Witness {
            kind,
            set,
            point,
            tau,
            bound,
            ..
        } => run_witness(&g, &common, kind, &set, point.as_deref(), tau.as_deref(), bound),
        Command::Eval {
            script: path,
            expr,
            bound,
            ..
        } => run_eval(&g, &common, path, expr, bound),
        Command::OracleDiff {
            trials,
            seed,
            truncate,
            complexity,
            ..
        } => run_oracle(&g, &common, trials, seed, truncate, complexity),
    };
    r.unwrap_or_else(|e| input_error(Some(&common), &e))
}

fn run_check(g: &Ultragraph, common: &Common, names: &[String], bound: usize) -> Result<Outcome> {
    let mut conds = Vec::new();
    for n in names {
        conds.push(
            Condition::parse(n.trim())
                .ok_or_else(|| UgkError::InvalidPresentation(format!("unknown condition '{n}'")))?,
        );
    }
    let reports: Vec<_> = conds.iter().map(|&c| check(g, c, bound)).collect();
    let code = exit_for(reports.iter().map(|r| r.verdict));
    let stdout = if common.json {
        let results: Vec<Value> = reports.iter().map(|r| r.to_json(g)).collect();
        report("check", common, code, json!({ "bound": bound, "results": results }))
    } else {
        let on = color_enabled();
        reports
            .iter()
            .map(|r| {
                let s = r.summary(g);
                let name = r.verdict.name();
                s.replacen(name, &color(on, r.verdict, name), 1) + "\n"
            })
            .collect()
    };
    Ok(Outcome::out(code, stdout))
}

fn run_mie(g: &Ultragraph, common: &Common) -> Outcome {
    let mies: Vec<String> = g.mies().iter().map(|m| m.to_string()).collect();
    let stdout = if common.json {
        report(
            "mie",
            common,
            EXIT_OK,
            json!({
                "mies": mies,
                "infinite_emitter_vertices": g.ie_vertices().to_string(),
            }),
        )
    } else {
        let mut s = format!("{} minimal infinite emitter(s)\n", mies.len());
        for (k, m) in mies.iter().enumerate() {
            s.push_str(&format!("mie#{k} = {m}\n"));
        }
        s
    };
    Outcome::out(EXIT_OK, stdout)
}

fn run_rfum(g: &Ultragraph, common: &Common) -> Result<Outcome> {
    let mut rows = Vec::new();
    for s in g.schemas() {
        let set = if s.family { s.range_const.clone() } else { s.range_at(0) };
        let d = g.rfum_decompose(&set)?;
        let mies: Vec<String> = d.mies.iter().map(|k| format!("mie#{k}")).collect();
        rows.push(json!({
            "edge": s.name,
            "family": s.family,
            "set": set.to_string(),
            "mies": mies,
            "finite": d.finite.to_string(),
        }));
    }
    let stdout = if common.json {
        report("rfum", common, EXIT_OK, json!({ "rfum": "ok", "ranges": rows }))
    } else {
        let mut s = String::from("RFUM ok\n");
        for r in &rows {
            let mut parts: Vec<String> = r["mies"]
                .as_array()
                .map(|a| a.iter().filter_map(|m| m.as_str().map(String::from)).collect())
                .unwrap_or_default();
            let finite = r["finite"].as_str().unwrap_or_default();
            if finite != "{}" || parts.is_empty() {
                parts.push(finite.to_string());
            }
            let label = if r["family"].as_bool() == Some(true) { "constant part of r" } else { "r" };
            s.push_str(&format!(
                "{label}({}) = {} = {}\n",
                r["edge"].as_str().unwrap_or_default(),
                r["set"].as_str().unwrap_or_default(),
                parts.join(" | ")
            ));
        }
        s
    };
    Ok(Outcome::out(EXIT_OK, stdout))
}

fn rfum_failure(common: &Common, edge: &str, remainder: &str) -> Outcome {
    let stdout = if common.json {
        report(
            "rfum",
            common,
            EXIT_FAILS,
            json!({ "rfum": "fails", "certificate": { "edge": edge, "remainder": remainder } }),
        )
    } else {
        format!("RFUM fails: r({edge}) leaves the infinite remainder {remainder}\n")
    };
    Outcome::out(EXIT_FAILS, stdout)
}

/// Checks the postconditions of a witness with the group and cylinder
/// algebra; returns the transcript and whether every check passed.
pub fn verify_witness(
    g: &Ultragraph,
    kind: WitnessKind,
    w: &Witness,
    set: &[cylinder::Cylinder],
    point: Option<&crate::path::Point>,
    tau: Option<&fullgroup::FullGroupElement>,
) -> Result<(Value, bool)> {
    let el = &w.element;
    let supp = el.support(g)?;
    let mut checks = Vec::new();
    let mut push = |name: &str, ok: bool| checks.push(json!({ "check": name, "ok": ok }));
    match kind {
        WitnessKind::F3 => {
            let ord = fullgroup::order(g, el, 10)?;
            push("order = 3", ord == Some(3));
            push("support inside set", cylinder::is_subset(g, &supp, set)?);
        }
        WitnessKind::F1 => {
            push("involution", fullgroup::is_involution(g, el)?);
            if let Some(x) = point {
                push("point in support", cylinder::clopen_contains(g, &supp, x));
            }
            push("support inside set", cylinder::is_subset(g, &supp, set)?);
        }
        WitnessKind::F2 => {
            push("involution", fullgroup::is_involution(g, el)?);
            if let Some(t) = tau {
                let mut target = set.to_vec();
                target.extend(constructions::image(g, t, set)?);
                push("support inside set and its image", cylinder::is_subset(g, &supp, &target)?);
                let rest = fullgroup::compose(g, &t.inverse(), el)?;
                let moved = rest.support(g)?;
                push(
                    "agrees with tau on support",
                    cylinder::clopen_intersect(g, &moved, &supp).iter().all(|c| c.is_empty(g)),
                );
            }
        }
    }
    let ok = checks.iter().all(|c| c["ok"] == json!(true));
    let transcript = json!({
        "element": el.display(g),
        "support": display_clopen(g, &supp),
        "notes": w.notes,
        "checks": checks,
        "verified": ok,
    });
    Ok((transcript, ok))
}

fn run_witness(
    g: &Ultragraph,
    common: &Common,
    kind: WitnessKind,
    set: &str,
    point: Option<&str>,
    tau: Option<&str>,
    bound: usize,
) -> Result<Outcome> {
    let a = script::parse_clopen(g, set)?;
    let x = point.map(|p| script::parse_point(g, p)).transpose()?;
    let t = match tau {
        Some(word) => {
            let mut s = Session::new(g, bound);
            s.run(&format!("tau = {word}"))?;
            Some(s.vars.remove("tau").expect("bound above"))
        }
        None => None,
    };
    let built = match kind {
        WitnessKind::F3 => constructions::f3_witness(g, &a, bound),
        WitnessKind::F1 => {
            let x = x
                .as_ref()
                .ok_or_else(|| UgkError::PreconditionViolated("f1 needs --point".into()))?;
            constructions::f1_witness(g, x, &a, bound)
        }
        WitnessKind::F2 => {
            let t = t
                .as_ref()
                .ok_or_else(|| UgkError::PreconditionViolated("f2 needs --tau".into()))?;
            constructions::f2_witness(g, t, &a, bound)
        }
    };
    let name = format!("{kind:?}").to_lowercase();
    let w = match built {
        Ok(w) => w,
        Err(e @ (UgkError::WitnessNotFound { .. } | UgkError::InsufficientLoops { .. })) => {
            let stdout = if common.json {
                report(
                    "witness",
                    common,
                    EXIT_UNKNOWN,
                    json!({ "kind": name, "bound": bound, "verdict": "unknown", "note": e.to_string() }),
                )
            } else {
                format!("unknown: {e}\n")
            };
            return Ok(Outcome::out(EXIT_UNKNOWN, stdout));
        }
        Err(e) => return Err(e),
    };
    let (transcript, ok) = verify_witness(g, kind, &w, &a, x.as_ref(), t.as_ref())?;
    let code = if ok { EXIT_OK } else { EXIT_FAILS };
    let text = script::witness_script(g, &w);
    let stdout = if common.json {
        report(
            "witness",
            common,
            code,
            json!({ "kind": name, "bound": bound, "script": text, "transcript": transcript }),
        )
    } else {
        format!(
            "{text}# verified: {}\n",
            transcript["verified"].as_bool().unwrap_or(false)
        )
    };
    Ok(Outcome::out(code, stdout))
}

fn run_eval(
    g: &Ultragraph,
    common: &Common,
    path: Option<PathBuf>,
    expr: Option<String>,
    bound: usize,
) -> Result<Outcome> {
    let text = match (path, expr) {
        (Some(p), _) if p.as_os_str() != "-" => fs::read_to_string(&p)
            .map_err(|e| UgkError::InvalidPresentation(format!("{}: {e}", p.display())))?,
        (_, Some(e)) => e.replace(";;", "\n"),
        _ => return Err(UgkError::PreconditionViolated("eval needs --script or --expr".into())),
    };
    let lines = Session::new(g, bound).run(&text)?;
    let stdout = if common.json {
        report(
            "eval",
            common,
            EXIT_OK,
            json!({ "bound": bound, "order_cap": ORDER_CAP, "output": lines }),
        )
    } else {
        lines.iter().map(|l| format!("{l}\n")).collect()
    };
    Ok(Outcome::out(EXIT_OK, stdout))
}

fn run_oracle(
    g: &Ultragraph,
    common: &Common,
    trials: usize,
    seed: u64,
    truncate: Option<u64>,
    complexity: usize,
) -> Result<Outcome> {
    let n = truncate.unwrap_or_else(|| oracle::auto_truncation(g, complexity, 4000));
    let rep = oracle::diff_test(g, seed, trials, n, complexity)?;
    let code = if rep.divergences == 0 { EXIT_OK } else { EXIT_FAILS };
    let stdout = if common.json {
        report(
            "oracle-diff",
            common,
            code,
            json!({ "truncate": n, "complexity": complexity, "seed": seed, "report": rep }),
        )
    } else {
        let mut s = format!(
            "{} trials, {} points, {} checks, {} divergences (truncate {n}, complexity {complexity})\n",
            rep.trials, rep.points, rep.checks, rep.divergences
        );
        for f in &rep.first {
            s.push_str(&format!("  {f}\n"));
        }
        s
    };
    Ok(Outcome::out(code, stdout))
}
