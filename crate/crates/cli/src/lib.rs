//! Command-line front end for the `guessability` crate.
//!
//! Every command writes to caller-supplied streams and returns a process exit
//! code, so the binary is a thin wrapper around [`run`].

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use guessability::adversary::{
    cantor_adversary, diagonalize, permutation_adversary, AdversaryError, ContainsZero, ExtensionOracles, FlipStatus,
    FlipTrace, InfinitelyManyZeros,
};
use guessability::lang::{parse, LangError, Registry, RegistryEntry};
use guessability::semantics::{eval_bounded, eval_qf, Assignment, EvalError};
use guessability::synth::{
    contains_zero_guesser, delta2_from_topology, guesser_from_delta2, register_mu_prime, sentences_from_guesser,
    sigma2_from_countable_family, sigma2_from_overguesser, CountableFamily, Delta2Spec, GuessTrace, Guesser,
    Overguesser, SynthError, TopologySpec,
};
use guessability::{FinitePrefix, Formula, PairingCodec, Pi2Sentence, SequenceSpec, Sigma2Sentence, Signature};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DENSITY: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("density violation: {0}")]
    Density(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Density(_) => EXIT_DENSITY,
            _ => EXIT_INPUT,
        }
    }
}

impl From<AdversaryError> for CliError {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::ExtensionUnavailable(_) => CliError::Density(e.to_string()),
            AdversaryError::Guess(s) => CliError::Synth(s),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(source: std::io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<stream>"),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "guess", version, about = "Evaluate sentences over sequences, run guessers and adversaries")]
pub struct Cli {
    /// Signature file adding symbols to the standard signature.
    #[arg(long, global = true)]
    pub sig: Option<PathBuf>,
    /// Structured JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a sentence on a sequence.
    Eval(EvalArgs),
    /// Run a guesser on growing prefixes of a sequence.
    Guess(GuessArgs),
    /// Overguesser of an `exists x. forall y.` sentence on growing prefixes.
    Mu(MuArgs),
    /// Play an adversary against a guesser.
    Adversary(AdversaryArgs),
    /// Synthesize sentences.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Enter numbers one at a time and watch guessers react.
    Play(PlayArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub seq: SequenceSpec,
    /// Variable values, `name=value`.
    #[arg(long = "assign", value_parser = parse_assignment)]
    pub assign: Vec<(String, u64)>,
    /// Restrict quantifiers to `0..=B` (approximate).
    #[arg(long)]
    pub bound: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GuessArgs {
    /// Guesser reference (see `resolve_guesser`); ignored when `--pi2` is given.
    #[arg(long, default_value = "contains-zero")]
    pub guesser: String,
    /// `forall x. exists y.` half of a two-sided description.
    #[arg(long, requires = "sigma2")]
    pub pi2: Option<PathBuf>,
    /// `exists x. forall y.` half of a two-sided description.
    #[arg(long, requires = "pi2")]
    pub sigma2: Option<PathBuf>,
    #[arg(long)]
    pub seq: SequenceSpec,
    #[arg(long, default_value_t = 40)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    pub sigma2: PathBuf,
    #[arg(long)]
    pub seq: SequenceSpec,
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryKind {
    Diagonal,
    Permutation,
    Cantor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Extenders {
    /// Zeros tail inside, ones tail outside.
    InfZeros,
    /// Sequences containing a zero.
    ContainsZero,
}

#[derive(Debug, Args)]
pub struct AdversaryArgs {
    #[arg(long)]
    pub guesser: String,
    #[arg(long, value_enum, default_value = "diagonal")]
    pub kind: AdversaryKind,
    /// Extension oracles for `diagonal`.
    #[arg(long, value_enum, default_value = "inf-zeros")]
    pub ext: Extenders,
    #[arg(long, default_value_t = 10)]
    pub flips: usize,
    /// Entries allowed per phase.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// "Eventually 1" / "infinitely often 1" sentences for a sequence symbol.
    Guesser {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sentence from the overguesser of an `exists forall` sentence file.
    Overguesser {
        sigma2: PathBuf,
        /// Symbol to declare for the shifted overguesser.
        #[arg(long, default_value = "Mu")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sentence for a countable family given by a binary registry function.
    Family {
        key: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided description from topology tables for a set and its complement.
    Topology {
        set_table: PathBuf,
        complement_table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[arg(long = "guesser", default_values_t = vec!["contains-zero".to_string()])]
    pub guessers: Vec<String>,
}

fn parse_assignment(text: &str) -> Result<(String, u64), String> {
    let (name, value) = text.split_once('=').ok_or("expected name=value")?;
    let value = value.trim().parse().map_err(|_| format!("`{value}` is not a natural number"))?;
    Ok((name.trim().to_string(), value))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Standard signature plus the declarations of `--sig`.
pub fn load_signature(path: Option<&Path>) -> Result<Signature, CliError> {
    let mut sig = Signature::standard();
    if let Some(p) = path {
        sig.apply_declarations(&read(p)?, &Registry::builtin())?;
    }
    Ok(sig)
}

pub fn parse_file(path: &Path, sig: &Signature) -> Result<Formula, CliError> {
    let text = read(path)?;
    parse(&text, sig).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub const BUILTIN_GUESSERS: [&str; 7] = [
    "contains-zero",
    "parity",
    "initial-segment",
    "last-is-5",
    "const-0",
    "const-1",
    "delta2-contains-zero",
];

/// Resolves a guesser reference:
///
/// * a builtin name from [`BUILTIN_GUESSERS`],
/// * `seq:NAME`, a sequence symbol of `sig` read as 1 iff nonzero,
/// * `delta2:PI2_FILE,SIGMA2_FILE`, the guesser of a two-sided description.
pub fn resolve_guesser(reference: &str, sig: &Signature) -> Result<Guesser, CliError> {
    if let Some(name) = reference.strip_prefix("seq:") {
        let host = sig
            .seq_function(name)
            .ok_or_else(|| CliError::Input(format!("`{name}` is not a sequence symbol")))?
            .clone();
        return Ok(Guesser::new(reference, move |p| {
            host(p.entries())
                .map(|v| v != 0)
                .map_err(|e| SynthError::Eval(EvalError::Host(e)))
        }));
    }
    if let Some(files) = reference.strip_prefix("delta2:") {
        let (pi2, sigma2) = files
            .split_once(',')
            .ok_or_else(|| CliError::Input("expected delta2:PI2_FILE,SIGMA2_FILE".into()))?;
        let spec = load_delta2(Path::new(pi2), Path::new(sigma2), sig)?;
        return Ok(guesser_from_delta2(&spec, sig)?);
    }
    Ok(match reference {
        "contains-zero" => contains_zero_guesser(),
        "parity" => Guesser::even_length(),
        "initial-segment" => Guesser::initial_segment(),
        "last-is-5" => Guesser::last_entry_is(5),
        "const-0" => Guesser::constant(false),
        "const-1" => Guesser::constant(true),
        "delta2-contains-zero" => guesser_from_delta2(&Delta2Spec::contains_zero(), sig)?,
        other => {
            return Err(CliError::Input(format!(
                "unknown guesser `{other}`; expected one of {}, seq:NAME or delta2:PI2,SIGMA2",
                BUILTIN_GUESSERS.join(", ")
            )))
        }
    })
}

fn load_delta2(pi2: &Path, sigma2: &Path, sig: &Signature) -> Result<Delta2Spec, CliError> {
    let p = parse_file(pi2, sig)?;
    let s = parse_file(sigma2, sig)?;
    Ok(Delta2Spec {
        pi2: Pi2Sentence::from_formula(&p)?,
        sigma2: Sigma2Sentence::from_formula(&s)?,
    })
}

fn bit(b: bool) -> u8 {
    u8::from(b)
}

fn bits(gs: &[bool]) -> String {
    gs.iter().map(|g| bit(*g).to_string()).collect::<Vec<_>>().join(" ")
}

fn opt_text<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

/// Parses the arguments and runs the command, reporting errors on `err`.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli, input, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut sig = load_signature(cli.sig.as_deref())?;
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, &sig, cli.json, out, err),
        Command::Guess(a) => cmd_guess(a, &sig, cli.json, out),
        Command::Mu(a) => cmd_mu(a, &sig, cli.json, out),
        Command::Adversary(a) => cmd_adversary(a, &sig, cli.json, out),
        Command::Synth(s) => cmd_synth(s, &mut sig, out),
        Command::Play(a) => cmd_play(a, &sig, input, out),
    }
}

pub fn cmd_eval(a: &EvalArgs, sig: &Signature, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let phi = parse_file(&a.file, sig)?;
    let oracle = a.seq.to_oracle();
    let s: Assignment = a.assign.iter().cloned().collect();
    if phi.is_quantifier_free() {
        let r = eval_qf(&phi, &oracle, &s, sig)?;
        let max = r.queries.max_queried();
        if json {
            let queries: Vec<u64> = r.queries.queried().iter().copied().collect();
            writeln!(out, "{}", json!({"value": r.value, "max_queried": max, "queries": queries}))?;
        } else {
            writeln!(out, "{} (max_queried={})", r.value, opt_text(max))?;
        }
        return Ok(EXIT_OK);
    }
    let bound = a
        .bound
        .ok_or_else(|| CliError::Input("quantified sentences need --bound B (the result is then approximate)".into()))?;
    let value = eval_bounded(&phi, &oracle, &s, sig, bound)?;
    writeln!(
        err,
        "warning: quantifiers restricted to 0..={bound}; the answer may differ from the true value"
    )?;
    if json {
        writeln!(out, "{}", json!({"value": value, "bounded": bound}))?;
    } else {
        writeln!(out, "{value} (bounded)")?;
    }
    Ok(EXIT_OK)
}

pub fn write_trace(trace: &GuessTrace, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if json {
        let t: Vec<u8> = trace.guesses.iter().map(|g| bit(*g)).collect();
        writeln!(
            out,
            "{}",
            json!({"trace": t, "stable_from": trace.stable_from, "final": trace.final_guess().map(bit)})
        )?;
    } else {
        writeln!(out, "trace: {}", bits(&trace.guesses))?;
        writeln!(out, "stable_from: {}", opt_text(trace.stable_from))?;
        writeln!(out, "final: {}", opt_text(trace.final_guess().map(bit)))?;
    }
    Ok(())
}

pub fn cmd_guess(a: &GuessArgs, sig: &Signature, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.horizon == 0 {
        return Err(CliError::Input("--horizon must be at least 1".into()));
    }
    let g = match (&a.pi2, &a.sigma2) {
        (Some(p), Some(s)) => guesser_from_delta2(&load_delta2(p, s, sig)?, sig)?,
        _ => resolve_guesser(&a.guesser, sig)?,
    };
    let trace = GuessTrace::run(&g, &a.seq.to_oracle(), a.horizon)?;
    write_trace(&trace, json, out)?;
    Ok(EXIT_OK)
}

pub fn cmd_mu(a: &MuArgs, sig: &Signature, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let sentence = Sigma2Sentence::from_formula(&parse_file(&a.sigma2, sig)?)?;
    let mu = Overguesser::from_sigma2(&sentence, sig)?;
    let f = a.seq.to_oracle();
    let mut prefix = FinitePrefix::empty();
    let mut values = Vec::new();
    for k in 0..a.horizon {
        prefix.push(f.value(k as u64));
        values.push(mu.evaluate(&prefix)?);
    }
    if json {
        let v: Vec<serde_json::Value> = values
            .iter()
            .map(|v| v.finite().map_or(json!("inf"), |n| json!(n)))
            .collect();
        writeln!(out, "{}", json!({"trace": v, "final": v.last()}))?;
    } else {
        let text: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(out, "trace: {}", text.join(" "))?;
    }
    Ok(EXIT_OK)
}

fn write_flips(trace: &FlipTrace, prefix: &FinitePrefix, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SequenceSpec::ZeroPadded(prefix.entries().to_vec());
    if json {
        let guesses: Vec<u8> = trace.guesses.iter().map(|g| bit(*g)).collect();
        writeln!(
            out,
            "{}",
            json!({"flips": trace.flips, "guesses": guesses, "status": trace.status.to_string(), "prefix": spec.to_string()})
        )?;
    } else {
        writeln!(out, "{trace}")?;
        writeln!(out, "prefix: {spec}")?;
    }
    Ok(())
}

pub fn cmd_adversary(a: &AdversaryArgs, sig: &Signature, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = resolve_guesser(&a.guesser, sig)?;
    let ext: &dyn ExtensionOracles = match a.ext {
        Extenders::InfZeros => &InfinitelyManyZeros,
        Extenders::ContainsZero => &ContainsZero,
    };
    let (prefix, trace) = match a.kind {
        AdversaryKind::Diagonal => diagonalize(&g, ext, a.flips, a.budget)?,
        AdversaryKind::Permutation => permutation_adversary(&g, a.flips, a.budget)?,
        AdversaryKind::Cantor => cantor_adversary(&g, a.flips, a.budget)?,
    };
    write_flips(&trace, &prefix, json, out)?;
    Ok(match trace.status {
        FlipStatus::Completed { .. } => EXIT_OK,
        FlipStatus::BudgetExhausted { .. } => EXIT_BUDGET,
    })
}

/// Prints, checks and optionally writes synthesized sentences.
fn emit(sentences: &[(&str, Formula)], stem: &str, out_dir: Option<&Path>, sig: &Signature, out: &mut dyn Write) -> Result<i32, CliError> {
    for (kind, f) in sentences {
        let text = f.to_string();
        let back = parse(&text, sig)?;
        if &back != f {
            return Err(CliError::Input(format!("printed sentence does not reparse: {text}")));
        }
        match out_dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
                let path = dir.join(format!("{stem}.{kind}.lg"));
                fs::write(&path, format!("{text}\n")).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                writeln!(out, "{kind}: {}", path.display())?;
            }
            None => writeln!(out, "{kind}: {text}")?,
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_synth(cmd: &SynthCommand, sig: &mut Signature, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        SynthCommand::Guesser { name, out: dir } => {
            let spec = sentences_from_guesser(name, sig)?;
            emit(
                &[("pi2", spec.pi2.to_formula()), ("sigma2", spec.sigma2.to_formula())],
                name,
                dir.as_deref(),
                sig,
                out,
            )
        }
        SynthCommand::Overguesser { sigma2, name, out: dir } => {
            let sentence = Sigma2Sentence::from_formula(&parse_file(sigma2, sig)?)?;
            let mu = Overguesser::from_sigma2(&sentence, sig)?;
            register_mu_prime(sig, name, &mu)?;
            let s = sigma2_from_overguesser(name, &PairingCodec::diagonal(), sig)?;
            emit(&[("sigma2", s.to_formula())], name, dir.as_deref(), sig, out)
        }
        SynthCommand::Family { key, out: dir } => {
            let host = match Registry::builtin().get(key) {
                Some(RegistryEntry::Function(2, host)) => host.clone(),
                _ => return Err(CliError::Input(format!("`{key}` is not a binary registry function"))),
            };
            // registry functions are total, so the error arm is unreachable in practice
            let fam = CountableFamily::new(key.clone(), move |m, n| host(&[m, n]).unwrap_or(0));
            let s = sigma2_from_countable_family(&fam, sig)?;
            emit(&[("sigma2", s.to_formula())], key, dir.as_deref(), sig, out)
        }
        SynthCommand::Topology {
            set_table,
            complement_table,
            out: dir,
        } => {
            let for_s = TopologySpec::parse(&read(set_table)?)?;
            let for_c = TopologySpec::parse(&read(complement_table)?)?;
            let spec = delta2_from_topology(&for_s, &for_c, sig)?;
            emit(
                &[("pi2", spec.pi2.to_formula()), ("sigma2", spec.sigma2.to_formula())],
                "topology",
                dir.as_deref(),
                sig,
                out,
            )
        }
    }
}

/// Interactive game: read naturals from `input`, show every guesser's
/// current guess after each one.
pub fn cmd_play(a: &PlayArgs, sig: &Signature, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, CliError> {
    let guessers = a
        .guessers
        .iter()
        .map(|r| resolve_guesser(r, sig).map(|g| (r.clone(), g)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut prefix = FinitePrefix::empty();
    let mut history: Vec<Vec<bool>> = vec![Vec::new(); guessers.len()];
    writeln!(out, "enter natural numbers one per line; :trace shows the guesses so far, :quit ends")?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        match line.trim() {
            ":quit" => break,
            ":trace" => {
                for ((name, _), gs) in guessers.iter().zip(&history) {
                    let t = GuessTrace::from_guesses(gs.clone());
                    writeln!(out, "{name}: trace: {} stable_from: {}", bits(&t.guesses), opt_text(t.stable_from))?;
                }
            }
            text => match text.parse::<u64>() {
                Ok(v) => {
                    prefix.push(v);
                    let mut shown = Vec::new();
                    for ((name, g), gs) in guessers.iter().zip(history.iter_mut()) {
                        let guess = g.guess(&prefix)?;
                        gs.push(guess);
                        shown.push(format!("{name}={}", bit(guess)));
                    }
                    writeln!(out, "guesses: {}", shown.join(" "))?;
                }
                Err(_) => writeln!(out, "`{text}` is not a natural number; try again")?,
            },
        }
    }
    let finals: Vec<String> = guessers
        .iter()
        .zip(&history)
        .map(|((name, _), gs)| format!("{name}={}", opt_text(gs.last().map(|g| bit(*g)))))
        .collect();
    writeln!(out, "summary: {} entries {prefix}; final guesses {}", prefix.len(), finals.join(" "))?;
    Ok(EXIT_OK)
}
