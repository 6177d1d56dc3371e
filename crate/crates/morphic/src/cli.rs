//! Command-line front end: input parsing, subcommand dispatch, output
//! formatting, and exit codes.
//!
//! Problems arrive either as a JSON document (`--doc FILE`, `-` for standard
//! input) or as plain-text rule files (`--g FILE [--h FILE] --letter a`).
//! Every subcommand writes human-readable text by default and structured
//! JSON with `--format json`. Exit codes are stable: 0 success/equal,
//! 1 not equal (or a negative reference-check finding), 2 precondition
//! failure, 3 resource limit, 4 input error.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::json;

use crate::analysis::{omega_exists, period, profile};
use crate::balance::{BalanceInstance, LetterBalanceReport};
use crate::decide::{
    build_f1_f2, decide_equality, DecisionConfig, NotEqualReason, Verdict,
};
use crate::engine::LayeredWordSpec;
use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::oracle::{
    mixed_composition, naive_bal, naive_comp_member, naive_equal_up_to, vector_cycle_bal_finite,
    OracleReport, DEFAULT_ORACLE_BUDGET,
};
use crate::words::{Alphabet, Letter, Morphism, MorphismTower};

/// A parsed and validated problem statement.
#[derive(Clone, Debug)]
pub struct ProblemDocument {
    pub alphabet: Alphabet,
    pub g: Morphism,
    /// Absent for single-morphism commands.
    pub h: Option<Morphism>,
    /// Absent when the command does not need a seed.
    pub letter: Option<Letter>,
    pub config: DocumentConfig,
}

/// Optional overrides carried by a document's `config` object.
#[derive(Clone, Default, Debug)]
pub struct DocumentConfig {
    pub overflow_cap: Option<usize>,
    pub a_multiplier: Option<BigRational>,
    pub materialization_budget: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    alphabet: Vec<String>,
    g: BTreeMap<String, String>,
    h: Option<BTreeMap<String, String>>,
    letter: Option<String>,
    config: Option<RawConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    overflow_cap: Option<usize>,
    a_multiplier: Option<serde_json::Value>,
    materialization_budget: Option<usize>,
}

/// Parse and validate a JSON problem document.
///
/// The format: `alphabet` is an array of single-character strings in order;
/// `g` and `h` are objects mapping each letter to its image string; `letter`
/// names the seed; the optional `config` object may set `overflow_cap`,
/// `a_multiplier` (integer or `"p/q"` string), and `materialization_budget`.
pub fn parse_document(text: &str) -> Result<ProblemDocument> {
    let raw: RawDocument = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed document: {e}")))?;
    let mut symbols = Vec::with_capacity(raw.alphabet.len());
    for entry in &raw.alphabet {
        let mut chars = entry.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => symbols.push(c),
            _ => {
                return Err(Error::Input(format!(
                    "field alphabet: each entry must be a single character, got \"{entry}\""
                )))
            }
        }
    }
    let alphabet = Alphabet::new(symbols).map_err(|e| Error::Input(format!("field alphabet: {e}")))?;
    let g = morphism_from_map(&alphabet, &raw.g, "g")?;
    let h = match &raw.h {
        Some(map) => Some(morphism_from_map(&alphabet, map, "h")?),
        None => None,
    };
    let letter = match &raw.letter {
        Some(s) => {
            let mut chars = s.chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Input(format!(
                        "field letter: must be a single character, got \"{s}\""
                    )))
                }
            };
            Some(alphabet.letter_of(c).ok_or_else(|| {
                Error::Input(format!("field letter: symbol '{c}' is not in the alphabet"))
            })?)
        }
        None => None,
    };
    let config = match raw.config {
        Some(rc) => DocumentConfig {
            overflow_cap: rc.overflow_cap,
            a_multiplier: rc
                .a_multiplier
                .map(|v| multiplier_from_value(&v))
                .transpose()?,
            materialization_budget: rc.materialization_budget,
        },
        None => DocumentConfig::default(),
    };
    Ok(ProblemDocument { alphabet, g, h, letter, config })
}

fn morphism_from_map(
    alphabet: &Alphabet,
    map: &BTreeMap<String, String>,
    field: &str,
) -> Result<Morphism> {
    for key in map.keys() {
        let mut chars = key.chars();
        let ok = matches!((chars.next(), chars.next()), (Some(c), None) if alphabet.letter_of(c).is_some());
        if !ok {
            return Err(Error::Input(format!(
                "field {field}: rule for undeclared symbol \"{key}\""
            )));
        }
    }
    let mut images = Vec::with_capacity(alphabet.len());
    for l in alphabet.letters() {
        let sym = alphabet.symbol(l);
        let image = map.get(&sym.to_string()).ok_or_else(|| {
            Error::Input(format!("field {field}: missing rule for symbol '{sym}'"))
        })?;
        images.push(
            alphabet
                .parse_word(image)
                .map_err(|e| Error::Input(format!("field {field}, rule for '{sym}': {e}")))?,
        );
    }
    Morphism::new(alphabet.clone(), images)
}

fn multiplier_from_value(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(n) if n.is_u64() || n.is_i64() => {
            Ok(BigRational::from_integer(BigInt::from(n.as_i64().unwrap())))
        }
        serde_json::Value::String(s) => parse_multiplier(s),
        _ => Err(Error::Input(
            "field config.a_multiplier: expected an integer or a \"p/q\" string".into(),
        )),
    }
}

fn parse_multiplier(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim())
            .map_err(|_| Error::Input(format!("invalid multiplier component \"{t}\"")))
    };
    let ratio = match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Input("multiplier denominator is zero".into()));
            }
            BigRational::new(parse_int(num)?, den)
        }
        None => BigRational::from_integer(parse_int(s)?),
    };
    Ok(ratio)
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "morphic",
    version,
    about = "Decide whether two primitive morphisms generate the same infinite word",
    max_term_width = 100
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

/// Shared input flags: a JSON document or plain-text rule files.
#[derive(Args, Clone)]
struct InputArgs {
    /// JSON problem document; use `-` for standard input.
    #[arg(long, value_name = "FILE")]
    doc: Option<PathBuf>,
    /// Rule file for the first morphism (`a -> ab` lines).
    #[arg(long, value_name = "FILE", conflicts_with = "doc")]
    g: Option<PathBuf>,
    /// Rule file for the second morphism.
    #[arg(long, value_name = "FILE", conflicts_with = "doc", requires = "g")]
    h: Option<PathBuf>,
    /// Seed letter (overrides the document's `letter`).
    #[arg(long)]
    letter: Option<char>,
    /// Cap on the comparison engine's unmatched surplus.
    #[arg(long, value_name = "N")]
    overflow_cap: Option<usize>,
    /// Prefix-exponent multiplier, an integer or `p/q` (at least 1).
    #[arg(long, value_name = "RATIO")]
    a_multiplier: Option<String>,
    /// Cap on materialized letter images.
    #[arg(long, value_name = "N")]
    materialization_budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the two iteration words from the seed are equal.
    Decide {
        #[command(flatten)]
        input: InputArgs,
        /// On a balance failure, also search for an explicit mismatch.
        #[arg(long)]
        locate_mismatch: bool,
    },
    /// Per-letter annihilators and the finiteness verdict of the balance test.
    Balance {
        #[command(flatten)]
        input: InputArgs,
        /// Test the decision procedure's composed towers instead of (g, h).
        #[arg(long)]
        composed: bool,
    },
    /// Structural facts about the first morphism.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Smallest period of a word.
    Period {
        /// The word, as a string of symbols.
        #[arg(long)]
        word: String,
    },
    /// Print a prefix of the first morphism's iteration word.
    Stream {
        #[command(flatten)]
        input: InputArgs,
        /// Number of letters to emit.
        #[arg(long, value_name = "L")]
        length: usize,
    },
    /// Slow reference checks, for cross-validation.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Compare the two iteration words letter by letter up to a length.
    Equal {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "L")]
        length: usize,
        /// Ceiling on materialized word length.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: usize,
    },
    /// Largest image-length difference across iteration depths 0..=DEPTH.
    Bal {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "DEPTH")]
        depth: usize,
    },
    /// Are g(w) and h(w) prefix-comparable for the given word?
    Member {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        word: String,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: usize,
    },
    /// Apply a mixed composition sequence (digits 1 and 2, left to right).
    Compose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        seq: String,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: usize,
    },
    /// Does the length-difference row revisit itself (finite balance)?
    Cycle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "N", default_value_t = 300)]
        cap: usize,
    },
}

/// Run the command line and report the exit code, writing to the process's
/// standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] against caller-supplied output streams (used by the tests).
pub fn run_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests parse as "errors" with exit code 0.
            if e.exit_code() == 0 {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 4;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// A loaded problem with all defaults and overrides resolved.
struct LoadedProblem {
    g: Morphism,
    h: Option<Morphism>,
    letter: Option<Letter>,
    config: DecisionConfig,
}

impl LoadedProblem {
    fn require_h(&self) -> Result<&Morphism> {
        self.h
            .as_ref()
            .ok_or_else(|| Error::Input("this command needs a second morphism (field h or --h)".into()))
    }

    fn require_letter(&self) -> Result<Letter> {
        self.letter
            .ok_or_else(|| Error::Input("this command needs a seed letter (--letter or document field)".into()))
    }
}

fn read_input_file(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Input(format!("cannot read standard input: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

/// Rebuild `m` over `target`, which must contain exactly the same symbols.
/// Plain-text rule files derive letter order from their own rule order, so
/// the second file is aligned to the first's alphabet here.
fn align_alphabet(m: &Morphism, target: &Alphabet) -> Result<Morphism> {
    if m.alphabet() == target {
        return Ok(m.clone());
    }
    if m.alphabet().len() != target.len() {
        return Err(Error::Input("the two rule files declare different alphabets".into()));
    }
    let mut rules: Vec<(char, String)> = Vec::with_capacity(target.len());
    for l in target.letters() {
        let sym = target.symbol(l);
        let src = m.alphabet().letter_of(sym).ok_or_else(|| {
            Error::Input("the two rule files declare different alphabets".into())
        })?;
        rules.push((sym, m.alphabet().format_word(m.image(src))));
    }
    let borrowed: Vec<(char, &str)> = rules.iter().map(|(c, s)| (*c, s.as_str())).collect();
    Morphism::from_rules(target, &borrowed)
}

fn load(input: &InputArgs) -> Result<LoadedProblem> {
    let (g, h, doc_letter, doc_config) = if let Some(path) = &input.doc {
        let doc = parse_document(&read_input_file(path)?)?;
        (doc.g, doc.h, doc.letter, doc.config)
    } else if let Some(g_path) = &input.g {
        let g = Morphism::parse(&read_input_file(g_path)?)?;
        let h = match &input.h {
            Some(h_path) => {
                let parsed = Morphism::parse(&read_input_file(h_path)?)?;
                Some(align_alphabet(&parsed, g.alphabet())?)
            }
            None => None,
        };
        (g, h, None, DocumentConfig::default())
    } else {
        return Err(Error::Input("provide a problem via --doc FILE or --g FILE".into()));
    };

    let letter = match input.letter {
        Some(c) => Some(g.alphabet().letter_of(c).ok_or_else(|| {
            Error::Input(format!("seed symbol '{c}' is not in the alphabet"))
        })?),
        None => doc_letter,
    };

    let defaults = DecisionConfig::default();
    let a_multiplier = match &input.a_multiplier {
        Some(s) => parse_multiplier(s)?,
        None => doc_config.a_multiplier.unwrap_or(defaults.a_multiplier),
    };
    if a_multiplier < BigRational::one() {
        return Err(Error::Input("the prefix-exponent multiplier must be at least 1".into()));
    }
    let config = DecisionConfig {
        overflow_cap: input
            .overflow_cap
            .or(doc_config.overflow_cap)
            .unwrap_or(defaults.overflow_cap),
        a_multiplier,
        materialization_budget: input
            .materialization_budget
            .or(doc_config.materialization_budget)
            .unwrap_or(defaults.materialization_budget),
        ..defaults
    };
    Ok(LoadedProblem { g, h, letter, config })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let emit = |out: &mut dyn Write, value: serde_json::Value| -> Result<()> {
        writeln!(out, "{:#}", value).map_err(|e| Error::Input(format!("cannot write output: {e}")))
    };
    match &cli.command {
        Command::Decide { input, locate_mismatch } => {
            let mut problem = load(input)?;
            problem.config.locate_mismatch_on_balance_failure = *locate_mismatch;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let x = problem.require_letter()?;
            let decision = decide_equality(&g, &h, x, &problem.config)?;
            let alphabet = g.alphabet();
            let (code, verdict_text, reason, mismatch) = match &decision.verdict {
                Verdict::Equal => (0, "equal", None, None),
                Verdict::NotEqual(NotEqualReason::BalanceInfinite { witness }) => {
                    (1, "not equal", Some("balance-infinite"), witness.clone())
                }
                Verdict::NotEqual(NotEqualReason::PrefixMismatch { witness }) => {
                    (1, "not equal", Some("prefix-mismatch"), Some(witness.clone()))
                }
            };
            let d = &decision.diagnostics;
            match cli.format {
                Format::Text => {
                    match reason {
                        None => writeln!(out, "verdict: equal"),
                        Some(r) => writeln!(out, "verdict: not equal ({r})"),
                    }
                    .ok();
                    if let Some(w) = &mismatch {
                        writeln!(out, "mismatch position: {}", w.position).ok();
                        writeln!(
                            out,
                            "mismatch letters: {} vs {}",
                            alphabet.symbol(w.left),
                            alphabet.symbol(w.right)
                        )
                        .ok();
                    }
                    writeln!(out, "alphabet size: {}", d.alphabet_size).ok();
                    writeln!(out, "tower layers: {}", d.tower_layers).ok();
                    writeln!(out, "prefix exponent: {}", d.prefix_exponent).ok();
                    match d.balance_finite {
                        Some(b) => writeln!(out, "balance finite: {b}").ok(),
                        None => writeln!(out, "balance finite: skipped (identical morphisms)").ok(),
                    };
                    if let Some(s) = &d.compare_stats {
                        writeln!(
                            out,
                            "comparison: {} leaves, {} memo entries, {} memo hits, max tail {}",
                            s.leaves_processed, s.memo_entries, s.memo_hits, s.max_tail_len
                        )
                        .ok();
                    }
                }
                Format::Json => {
                    let value = json!({
                        "verdict": verdict_text,
                        "reason": reason,
                        "mismatch": mismatch.as_ref().map(|w| json!({
                            "position": w.position.to_string(),
                            "left": alphabet.symbol(w.left).to_string(),
                            "right": alphabet.symbol(w.right).to_string(),
                        })),
                        "diagnostics": {
                            "alphabet_size": d.alphabet_size,
                            "tower_layers": d.tower_layers,
                            "prefix_exponent": d.prefix_exponent.to_string(),
                            "balance_finite": d.balance_finite,
                            "theoretical_overflow_cap":
                                d.theoretical_overflow_cap.as_ref().map(|c| c.to_string()),
                            "compare": d.compare_stats.as_ref().map(|s| json!({
                                "leaves_processed": s.leaves_processed,
                                "memo_entries": s.memo_entries,
                                "memo_hits": s.memo_hits,
                                "max_tail_len": s.max_tail_len,
                            })),
                        },
                    });
                    emit(out, value)?;
                }
            }
            Ok(code)
        }
        Command::Balance { input, composed } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let (first, second) = if *composed {
                build_f1_f2(&g, &h)?
            } else {
                (MorphismTower::single(g.clone()), MorphismTower::single(h.clone()))
            };
            let instance = BalanceInstance::new(&first, &second)?;
            let alphabet = g.alphabet();
            let reports: Vec<LetterBalanceReport> =
                alphabet.letters().map(|l| instance.letter_report(l)).collect();
            let finite = reports.iter().all(|r| r.unity_period.is_some());
            match cli.format {
                Format::Text => {
                    for r in &reports {
                        let period = match &r.unity_period {
                            Some(p) => p.to_string(),
                            None => "none".into(),
                        };
                        writeln!(
                            out,
                            "letter {}: annihilator {}, transient {}, persistent {}, period {}",
                            alphabet.symbol(r.letter),
                            r.annihilator,
                            r.transient_degree,
                            r.persistent,
                            period
                        )
                        .ok();
                    }
                    writeln!(out, "balance: {}", if finite { "finite" } else { "infinite" }).ok();
                }
                Format::Json => {
                    let value = json!({
                        "composed": composed,
                        "letters": reports.iter().map(|r| json!({
                            "letter": alphabet.symbol(r.letter).to_string(),
                            "annihilator": r.annihilator.to_string(),
                            "transient_degree": r.transient_degree,
                            "persistent": r.persistent.to_string(),
                            "unity_period": r.unity_period.as_ref().map(|p| p.to_string()),
                        })).collect::<Vec<_>>(),
                        "finite": finite,
                    });
                    emit(out, value)?;
                }
            }
            Ok(if finite { 0 } else { 1 })
        }
        Command::Analyze { input } => {
            let problem = load(input)?;
            let g = &problem.g;
            let alphabet = g.alphabet();
            let p = profile(g);
            let omega = problem.letter.map(|l| omega_exists(g, l));
            match cli.format {
                Format::Text => {
                    let symbols: String = alphabet.letters().map(|l| alphabet.symbol(l)).collect();
                    writeln!(out, "alphabet: {symbols}").ok();
                    writeln!(out, "rules:").ok();
                    for l in alphabet.letters() {
                        writeln!(
                            out,
                            "  {} -> {}",
                            alphabet.symbol(l),
                            alphabet.format_word(g.image(l))
                        )
                        .ok();
                    }
                    writeln!(out, "primitive: {}", p.primitive).ok();
                    writeln!(out, "growing: {}", p.growing).ok();
                    let cyclic: Vec<String> = p
                        .cyclic_letters
                        .iter()
                        .map(|&l| alphabet.symbol(l).to_string())
                        .collect();
                    writeln!(
                        out,
                        "cyclic letters: {}",
                        if cyclic.is_empty() { "none".into() } else { cyclic.join(", ") }
                    )
                    .ok();
                    writeln!(out, "max image length: {}", p.max_image_len).ok();
                    if let (Some(l), Some(exists)) = (problem.letter, omega) {
                        writeln!(
                            out,
                            "iteration word from '{}': {}",
                            alphabet.symbol(l),
                            if exists { "exists" } else { "does not exist" }
                        )
                        .ok();
                    }
                }
                Format::Json => {
                    let value = json!({
                        "alphabet": alphabet.letters().map(|l| alphabet.symbol(l).to_string()).collect::<Vec<_>>(),
                        "rules": alphabet.letters().map(|l| json!({
                            "letter": alphabet.symbol(l).to_string(),
                            "image": alphabet.format_word(g.image(l)),
                        })).collect::<Vec<_>>(),
                        "primitive": p.primitive,
                        "growing": p.growing,
                        "cyclic_letters": p.cyclic_letters.iter().map(|&l| alphabet.symbol(l).to_string()).collect::<Vec<_>>(),
                        "max_image_length": p.max_image_len,
                        "iteration_word_exists": omega,
                    });
                    emit(out, value)?;
                }
            }
            Ok(0)
        }
        Command::Period { word } => {
            let symbols: Vec<char> = {
                let mut seen = Vec::new();
                for c in word.chars() {
                    if !seen.contains(&c) {
                        seen.push(c);
                    }
                }
                seen
            };
            let alphabet = Alphabet::new(symbols)
                .map_err(|_| Error::Input("the word must not be empty".into()))?;
            let w = alphabet.parse_word(word)?;
            let p = period(&w)?;
            match cli.format {
                Format::Text => {
                    writeln!(out, "period: {p}").ok();
                }
                Format::Json => emit(out, json!({ "word": word, "period": p }))?,
            }
            Ok(0)
        }
        Command::Stream { input, length } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let x = problem.require_letter()?;
            let alphabet = g.alphabet();
            if !omega_exists(&g, x) {
                return Err(Error::Precondition(format!(
                    "the morphism has no infinite iteration word from '{}'",
                    alphabet.symbol(x)
                )));
            }
            // Find the first iterate at least as long as the request; the
            // iteration word extends every earlier iterate.
            let m = IncidenceMatrix::of_morphism(&g);
            let mut v = vec![num_bigint::BigUint::zero(); alphabet.len()];
            v[x.index()] = num_bigint::BigUint::one();
            let target = num_bigint::BigUint::from(*length);
            let mut depth = 0usize;
            while v.iter().sum::<num_bigint::BigUint>() < target {
                v = m.times_col(&v);
                depth += 1;
            }
            let tower = MorphismTower::single(g.clone());
            let spec = if depth == 0 {
                LayeredWordSpec::new(alphabet.clone(), Vec::new(), x)?
            } else {
                LayeredWordSpec::from_tower_power(&tower, depth, x)?
            };
            let prefix = spec.stream_prefix(*length);
            match cli.format {
                Format::Text => {
                    writeln!(out, "{}", alphabet.format_word(&prefix)).ok();
                }
                Format::Json => emit(
                    out,
                    json!({ "length": prefix.len(), "word": alphabet.format_word(&prefix) }),
                )?,
            }
            Ok(0)
        }
        Command::Oracle { op } => run_oracle(cli, op, out, emit),
    }
}

fn run_oracle(
    cli: &Cli,
    op: &OracleOp,
    out: &mut dyn Write,
    emit: impl Fn(&mut dyn Write, serde_json::Value) -> Result<()>,
) -> Result<i32> {
    match op {
        OracleOp::Equal { input, length, budget } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let x = problem.require_letter()?;
            let report = naive_equal_up_to(&g, &h, x, *length, *budget)?;
            let alphabet = g.alphabet();
            match (&report, cli.format) {
                (OracleReport::NoMismatchWithin(l), Format::Text) => {
                    writeln!(out, "no mismatch within {l} letters").ok();
                }
                (OracleReport::MismatchAt { position, left, right }, Format::Text) => {
                    writeln!(
                        out,
                        "mismatch at {position}: {} vs {}",
                        alphabet.symbol(*left),
                        alphabet.symbol(*right)
                    )
                    .ok();
                }
                (OracleReport::NoMismatchWithin(l), Format::Json) => {
                    emit(out, json!({ "outcome": "no-mismatch-within", "length": l }))?;
                }
                (OracleReport::MismatchAt { position, left, right }, Format::Json) => {
                    emit(
                        out,
                        json!({
                            "outcome": "mismatch",
                            "position": position.to_string(),
                            "left": alphabet.symbol(*left).to_string(),
                            "right": alphabet.symbol(*right).to_string(),
                        }),
                    )?;
                }
            }
            Ok(match report {
                OracleReport::NoMismatchWithin(_) => 0,
                OracleReport::MismatchAt { .. } => 1,
            })
        }
        OracleOp::Bal { input, depth } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let value = naive_bal(
                &MorphismTower::single(g.clone()),
                &MorphismTower::single(h),
                *depth,
            )?;
            match cli.format {
                Format::Text => {
                    writeln!(out, "largest difference through depth {depth}: {value}").ok();
                }
                Format::Json => {
                    emit(out, json!({ "depth": depth, "largest_difference": value.to_string() }))?;
                }
            }
            Ok(0)
        }
        OracleOp::Member { input, word, budget } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let w = g.alphabet().parse_word(word)?;
            let member = naive_comp_member(
                &MorphismTower::single(g.clone()),
                &MorphismTower::single(h),
                &w,
                *budget,
            )?;
            match cli.format {
                Format::Text => {
                    writeln!(out, "{}", if member { "comparable" } else { "not comparable" }).ok();
                }
                Format::Json => emit(out, json!({ "word": word, "comparable": member }))?,
            }
            Ok(if member { 0 } else { 1 })
        }
        OracleOp::Compose { input, seq, budget } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let x = problem.require_letter()?;
            let selectors: Vec<u8> = seq
                .chars()
                .map(|c| match c {
                    '1' => Ok(1u8),
                    '2' => Ok(2u8),
                    _ => Err(Error::Input(format!(
                        "composition sequence must use digits 1 and 2, got '{c}'"
                    ))),
                })
                .collect::<Result<_>>()?;
            let w = mixed_composition(&selectors, &g, &h, x, *budget)?;
            let rendered = g.alphabet().format_word(&w);
            match cli.format {
                Format::Text => {
                    writeln!(out, "{rendered}").ok();
                }
                Format::Json => emit(out, json!({ "sequence": seq, "word": rendered }))?,
            }
            Ok(0)
        }
        OracleOp::Cycle { input, cap } => {
            let problem = load(input)?;
            let g = problem.g.clone();
            let h = problem.require_h()?.clone();
            let finite = vector_cycle_bal_finite(
                &MorphismTower::single(g),
                &MorphismTower::single(h),
                *cap,
            )?;
            match cli.format {
                Format::Text => {
                    writeln!(
                        out,
                        "{}",
                        if finite {
                            "difference row cycles: balance finite"
                        } else {
                            "no cycle found: balance looks unbounded"
                        }
                    )
                    .ok();
                }
                Format::Json => emit(out, json!({ "cap": cap, "finite": finite }))?,
            }
            Ok(if finite { 0 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TM_DOC: &str = r#"{
        "alphabet": ["a", "b"],
        "g": {"a": "ab", "b": "ba"},
        "h": {"a": "ab", "b": "aa"},
        "letter": "a"
    }"#;

    #[test]
    fn document_round_trip() {
        let doc = parse_document(TM_DOC).unwrap();
        assert_eq!(doc.alphabet.len(), 2);
        let a = doc.alphabet.letter_of('a').unwrap();
        assert_eq!(doc.alphabet.format_word(doc.g.image(a)), "ab");
        let h = doc.h.unwrap();
        let b = doc.alphabet.letter_of('b').unwrap();
        assert_eq!(doc.alphabet.format_word(h.image(b)), "aa");
        assert_eq!(doc.letter, Some(a));
    }

    #[test]
    fn document_rejects_undeclared_symbols() {
        let text = r#"{"alphabet": ["a", "b"], "g": {"a": "ac", "b": "a"}}"#;
        match parse_document(text) {
            Err(Error::Input(msg)) => assert!(msg.contains('c'), "{msg}"),
            other => panic!("expected input error, got {other:?}"),
        }
    }

    #[test]
    fn document_rejects_missing_rules() {
        let text = r#"{"alphabet": ["a", "b"], "g": {"a": "ab"}}"#;
        match parse_document(text) {
            Err(Error::Input(msg)) => assert!(msg.contains('b'), "{msg}"),
            other => panic!("expected input error, got {other:?}"),
        }
    }

    #[test]
    fn document_accepts_rational_multiplier() {
        let text = r#"{
            "alphabet": ["a", "b"],
            "g": {"a": "ab", "b": "a"},
            "config": {"a_multiplier": "3/2", "overflow_cap": 500}
        }"#;
        let doc = parse_document(text).unwrap();
        assert_eq!(
            doc.config.a_multiplier,
            Some(BigRational::new(BigInt::from(3), BigInt::from(2)))
        );
        assert_eq!(doc.config.overflow_cap, Some(500));
    }

    fn run_capture(args: &[&str], stdin_doc: Option<&str>) -> (i32, String, String) {
        assert!(stdin_doc.is_none(), "stdin not supported in tests");
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_to(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn with_doc(doc: &str, f: impl FnOnce(&str)) {
        let dir = std::env::temp_dir().join(format!("morphic-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!(
            "doc-{:x}.json",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::write(&path, doc).unwrap();
        f(path.to_str().unwrap());
        let _ = std::fs::remove_file(&path);
    }

    #[test]
    fn decide_reports_the_known_mismatch() {
        with_doc(TM_DOC, |path| {
            let (code, out, _) = run_capture(&["morphic", "decide", "--doc", path], None);
            assert_eq!(code, 1);
            assert!(out.contains("mismatch position: 2"), "{out}");
            assert!(out.contains("b vs a"), "{out}");
        });
    }

    #[test]
    fn decide_json_round_trips() {
        with_doc(TM_DOC, |path| {
            let (code, out, _) =
                run_capture(&["morphic", "decide", "--doc", path, "--format", "json"], None);
            assert_eq!(code, 1);
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["verdict"], "not equal");
            assert_eq!(v["reason"], "prefix-mismatch");
            assert_eq!(v["mismatch"]["position"], "2");
            assert_eq!(v["mismatch"]["left"], "b");
            assert_eq!(v["mismatch"]["right"], "a");
            assert_eq!(v["diagnostics"]["prefix_exponent"], "84");
        });
    }

    #[test]
    fn decide_equal_exit_zero() {
        let doc = r#"{
            "alphabet": ["a", "b"],
            "g": {"a": "ab", "b": "a"},
            "h": {"a": "ab", "b": "a"},
            "letter": "a"
        }"#;
        with_doc(doc, |path| {
            let (code, out, _) = run_capture(&["morphic", "decide", "--doc", path], None);
            assert_eq!(code, 0);
            assert!(out.starts_with("verdict: equal"), "{out}");
        });
    }

    #[test]
    fn decide_precondition_exit_two() {
        let doc = r#"{
            "alphabet": ["a", "b"],
            "g": {"a": "ab", "b": "b"},
            "h": {"a": "ab", "b": "b"},
            "letter": "a"
        }"#;
        with_doc(doc, |path| {
            let (code, _, err) = run_capture(&["morphic", "decide", "--doc", path], None);
            assert_eq!(code, 2);
            assert!(err.contains("primitive"), "{err}");
        });
    }

    #[test]
    fn missing_letter_is_an_input_error() {
        let doc = r#"{
            "alphabet": ["a", "b"],
            "g": {"a": "ab", "b": "ba"},
            "h": {"a": "ab", "b": "aa"}
        }"#;
        with_doc(doc, |path| {
            let (code, _, err) = run_capture(&["morphic", "decide", "--doc", path], None);
            assert_eq!(code, 4);
            assert!(err.contains("seed letter"), "{err}");
        });
    }

    #[test]
    fn unknown_flag_is_an_input_error() {
        let (code, _, err) = run_capture(&["morphic", "decide", "--bogus"], None);
        assert_eq!(code, 4);
        assert!(!err.is_empty());
    }

    #[test]
    fn period_command() {
        let (code, out, _) = run_capture(&["morphic", "period", "--word", "abaab"], None);
        assert_eq!(code, 0);
        assert_eq!(out, "period: 3\n");
        let (code, out, _) =
            run_capture(&["morphic", "period", "--word", "abab", "--format", "json"], None);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["period"], 2);
    }

    #[test]
    fn stream_emits_the_prefix() {
        with_doc(TM_DOC, |path| {
            let (code, out, _) =
                run_capture(&["morphic", "stream", "--doc", path, "--length", "8"], None);
            assert_eq!(code, 0);
            assert_eq!(out, "abbabaab\n");
        });
    }

    #[test]
    fn balance_reports_infinite_for_fib_vs_square() {
        let doc = r#"{
            "alphabet": ["a", "b"],
            "g": {"a": "ab", "b": "a"},
            "h": {"a": "aba", "b": "ab"}
        }"#;
        with_doc(doc, |path| {
            let (code, out, _) = run_capture(&["morphic", "balance", "--doc", path], None);
            assert_eq!(code, 1);
            assert!(out.contains("balance: infinite"), "{out}");
            assert!(out.contains("z^2 - z - 1"), "{out}");
        });
    }

    #[test]
    fn oracle_equal_matches_decide() {
        with_doc(TM_DOC, |path| {
            let (code, out, _) = run_capture(
                &["morphic", "oracle", "equal", "--doc", path, "--length", "100"],
                None,
            );
            assert_eq!(code, 1);
            assert!(out.contains("mismatch at 2"), "{out}");
        });
    }

    #[test]
    fn oracle_compose_applies_left_to_right() {
        with_doc(TM_DOC, |path| {
            let (code, out, _) = run_capture(
                &["morphic", "oracle", "compose", "--doc", path, "--seq", "12"],
                None,
            );
            assert_eq!(code, 0);
            assert_eq!(out, "abaa\n");
        });
    }
}
