//! Command-line front end.

pub mod io;
pub mod parse;
pub mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::charclass::{a_hat_eval, ch_g_glr_eval, ch_g_star_eval, oneloop_compare, Cochain};
use crate::correlate::{Correlator, LieElement};
use crate::exactnum::ScalarK;
use crate::forms::Form;
use crate::model::Model;
use crate::simplex::{weight, wheel_coefficient};
use crate::weyl::MatrixWeyl;
use io::{args_from_str, chain_from_str, model_from_str, read_file, InputError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "orbtqm", version, about = "Exact twisted correlation maps and universal traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub chain: Option<String>,
    #[arg(long, global = true)]
    pub args: Option<String>,
    #[arg(long = "hbar-trunc", global = true, value_parser = clap::value_parser!(i64).range(1..))]
    pub hbar_trunc: Option<i64>,
    #[arg(long = "weight-trunc", global = true, value_parser = clap::value_parser!(i64).range(1..))]
    pub weight_trunc: Option<i64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moyal product of the observables in the argument file, left to right.
    Moyal,
    /// Free correlation ⟨c⟩ of a chain.
    CorrelateFree,
    /// Interactive correlation of a chain with Lie algebra arguments.
    CorrelateInt,
    /// Universal trace of a chain with Lie algebra arguments.
    Trace,
    /// Wheel coefficient C(k).
    Wheel { k: usize },
    /// Configuration-space weight of an edge set, e.g. `weight 3 0-1 1-2`.
    Weight {
        positions: usize,
        edges: Vec<String>,
    },
    /// Characteristic class evaluators and the one-loop comparison.
    Charclass,
    /// Run a verification suite: arith, chains, intertwine, trace, wheels, oneloop, all.
    Verify { suite: String },
}

#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

fn scalar_json(s: &ScalarK) -> Value {
    let terms: Vec<Value> = s
        .iter_terms()
        .map(|(u, h, c)| json!({ "coef": c.to_string(), "h": h, "u": u, "text": ScalarK::monomial(c.clone(), h, u).to_string() }))
        .collect();
    json!({ "text": s.to_string(), "terms": terms, "hbar_trunc": trunc_json(s.trunc()) })
}

fn trunc_json(t: i64) -> Value {
    if t >= crate::exactnum::EXACT / 2 {
        Value::Null
    } else {
        json!(t)
    }
}

fn form_json(f: &Form, m: &Model) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(k, c)| {
            let mut one = Form::zero(f.nvars(), f.wtrunc(), f.htrunc());
            one.add_term(k.clone(), c.clone());
            json!({ "coef": c.to_string(), "exps": k.exps, "dvars": dvars(k.gm), "h": k.h, "u": k.u, "text": one.render(m) })
        })
        .collect();
    json!({ "text": f.render(m), "terms": terms })
}

fn dvars(gm: u64) -> Vec<usize> {
    (0..64).filter(|i| gm >> i & 1 == 1).collect()
}

fn matrix_json(w: &MatrixWeyl, m: &Model) -> Value {
    let entries: Vec<Value> = w
        .entries()
        .filter(|(_, _, e)| !e.is_zero())
        .map(|(i, j, e)| {
            let terms: Vec<Value> = e
                .terms()
                .map(|(mono, c)| json!({ "coef": c.to_string(), "exps": mono.exps, "h": mono.h }))
                .collect();
            json!({ "row": i, "col": j, "text": e.render(m), "terms": terms })
        })
        .collect();
    json!({ "text": w.render(m), "entries": entries })
}

fn need<'a>(opt: &'a Option<String>, flag: &str) -> Result<&'a str, InputError> {
    opt.as_deref().ok_or_else(|| InputError::Invalid(format!("missing --{flag} <file>")))
}

fn load_model(cli: &Cli) -> Result<Model, InputError> {
    model_from_str(&read_file(need(&cli.model, "model")?)?, cli.hbar_trunc, cli.weight_trunc)
}

fn load_args(cli: &Cli, m: &Model, warnings: &mut Vec<String>) -> Result<Vec<MatrixWeyl>, InputError> {
    match &cli.args {
        None => Ok(Vec::new()),
        Some(p) => args_from_str(&read_file(p)?, m, warnings),
    }
}

fn lie_args(m: &Model, args: &[MatrixWeyl]) -> Result<Vec<LieElement>, InputError> {
    args.iter()
        .enumerate()
        .map(|(i, a)| LieElement::new(m, a.clone()).map_err(|e| InputError::Invalid(format!("argument {i}: {e}"))))
        .collect()
}

fn header(m: &Model, seed: u64) -> String {
    format!("model {} hbar_trunc={} weight_trunc={} seed={}\n", verify::model_label(m), m.hbar_trunc, m.weight_trunc, seed)
}

fn model_json(m: &Model, seed: u64) -> Value {
    json!({ "n": m.n, "k": m.k, "r": m.r, "N": m.order, "perp_eigs": m.perp_eigs, "twisted": m.twisted,
            "hbar_trunc": m.hbar_trunc, "weight_trunc": m.weight_trunc, "seed": seed })
}

fn warn_text(w: &[String]) -> String {
    w.iter().map(|s| format!("warning: {s}\n")).collect()
}

fn parse_edges(src: &[String], positions: usize) -> Result<Vec<(usize, usize)>, InputError> {
    src.iter()
        .map(|e| {
            let (a, b) = e.split_once('-').ok_or_else(|| InputError::Invalid(format!("edge '{e}': expected a-b")))?;
            let p = |s: &str| {
                s.trim().parse::<usize>().map_err(|_| InputError::Invalid(format!("edge '{e}': bad position '{s}'")))
            };
            let (a, b) = (p(a)?, p(b)?);
            if a >= positions || b >= positions || a == b {
                return Err(InputError::Invalid(format!("edge '{e}': positions must be distinct and below {positions}")));
            }
            Ok((a, b))
        })
        .collect()
}

fn cochain_text(name: &str, c: &Cochain) -> String {
    format!("{name} = {}\n", c.full())
}

/// Runs one command; Err is an input or usage problem.
pub fn execute(cli: &Cli) -> Result<Output, InputError> {
    let mut warnings = Vec::new();
    match &cli.command {
        Command::Wheel { k } => {
            if *k == 0 {
                return Err(InputError::Invalid("wheel needs k ≥ 1".into()));
            }
            let c = wheel_coefficient(*k);
            Ok(Output { text: format!("C({k}) = {c}\n"), json: json!({ "k": k, "value": c.to_string() }), ok: true })
        }
        Command::Weight { positions, edges } => {
            if *positions == 0 {
                return Err(InputError::Invalid("need at least one position".into()));
            }
            let es = parse_edges(edges, *positions)?;
            let w: BigRational = weight(*positions, &es);
            Ok(Output {
                text: format!("weight = {w}\n"),
                json: json!({ "positions": positions, "edges": es, "value": w.to_string() }),
                ok: true,
            })
        }
        Command::Verify { suite } => {
            let r = verify::run_suite(suite, cli.seed).ok_or_else(|| {
                InputError::Invalid(format!("unknown suite '{suite}'; expected one of {}", verify::SUITES.join(", ")))
            })?;
            let json = serde_json::to_value(&r).expect("serializable report");
            Ok(Output { text: r.render_text(), json, ok: r.pass() })
        }
        Command::Moyal => {
            let m = load_model(cli)?;
            let args = load_args(cli, &m, &mut warnings)?;
            let mut acc = MatrixWeyl::identity(&m);
            for a in &args {
                acc = acc.try_moyal(&m, a).map_err(|e| InputError::Invalid(e.to_string()))?;
            }
            Ok(Output {
                text: format!("{}{}{}\n", header(&m, cli.seed), warn_text(&warnings), acc.render(&m)),
                json: json!({ "model": model_json(&m, cli.seed), "warnings": warnings, "product": matrix_json(&acc, &m) }),
                ok: true,
            })
        }
        Command::CorrelateFree | Command::CorrelateInt | Command::Trace => {
            let m = load_model(cli)?;
            let c = chain_from_str(&read_file(need(&cli.chain, "chain")?)?, &m, &mut warnings)?;
            let args = load_args(cli, &m, &mut warnings)?;
            let cor = Correlator::new(&m);
            let head = format!("{}{}", header(&m, cli.seed), warn_text(&warnings));
            let bad = |e: crate::correlate::CorrelateError| InputError::Invalid(e.to_string());
            match &cli.command {
                Command::CorrelateFree => {
                    let f = cor.free_correlation(&c).map_err(bad)?;
                    Ok(Output {
                        text: format!("{head}{}\n", f.render(&m)),
                        json: json!({ "model": model_json(&m, cli.seed), "warnings": warnings, "form": form_json(&f, &m) }),
                        ok: true,
                    })
                }
                Command::CorrelateInt => {
                    let la = lie_args(&m, &args)?;
                    let f = cor.interactive_correlation(&c, &la).map_err(bad)?;
                    Ok(Output {
                        text: format!("{head}{}\n", f.render(&m)),
                        json: json!({ "model": model_json(&m, cli.seed), "warnings": warnings, "form": form_json(&f, &m) }),
                        ok: true,
                    })
                }
                _ => {
                    let la = lie_args(&m, &args)?;
                    let s = cor.universal_trace(&c, &la).map_err(bad)?;
                    Ok(Output {
                        text: format!("{head}{s}\n"),
                        json: json!({ "model": model_json(&m, cli.seed), "warnings": warnings, "trace": scalar_json(&s) }),
                        ok: true,
                    })
                }
            }
        }
        Command::Charclass => {
            let m = load_model(cli)?;
            let args = load_args(cli, &m, &mut warnings)?;
            let cor = Correlator::new(&m);
            let bad = |e: crate::charclass::CharClassError| InputError::Invalid(e.to_string());
            let a = a_hat_eval(&m, &args).map_err(bad)?;
            let s = ch_g_star_eval(&cor, &args).map_err(bad)?;
            let g = ch_g_glr_eval(&m, &args).map_err(bad)?;
            let r = oneloop_compare(&cor, &args).map_err(bad)?;
            let mut text = format!("{}{}", header(&m, cli.seed), warn_text(&warnings));
            text.push_str(&cochain_text("A_hat", &a));
            text.push_str(&cochain_text("Ch_g_star", &s));
            text.push_str(&cochain_text("Ch_g", &g));
            text.push_str(&format!("trace = {}\nrhs = {}\ndefect = {}\noneloop: {}\n", r.lhs, r.rhs, r.defect, if r.pass { "pass" } else { "FAIL" }));
            let json = json!({
                "model": model_json(&m, cli.seed),
                "warnings": warnings,
                "A_hat": scalar_json(&a.full()),
                "Ch_g_star": scalar_json(&s.full()),
                "Ch_g": scalar_json(&g.full()),
                "oneloop": { "trace": scalar_json(&r.lhs), "rhs": scalar_json(&r.rhs), "defect": scalar_json(&r.defect), "pass": r.pass },
            });
            Ok(Output { text, json, ok: r.pass })
        }
    }
}

pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
            };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().write_all(body.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
