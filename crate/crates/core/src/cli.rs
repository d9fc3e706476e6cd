//! The `mql` command line.
//!
//! Every subcommand prints records, one JSON object per line by default or
//! CSV rows with `--format csv`. Each record carries `subcommand`, `input` and
//! `version`. Exit codes: 0 success, 1 usage or parse error, 2 verification
//! failure, 3 budget exhausted, 4 precondition violated.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serializer;
use serde_json::{json, Map, Value};

use crate::coords::{
    horocyclic_to_quad, in_fundamental_domain, lambda_to_quad, mcg_apply, quad_to_horocyclic, quad_to_lambda,
    HorocyclicCoords, LambdaCoords, McgWord,
};
use crate::error::Error;
use crate::integral::{classify, enumerate_fundamental, enumerate_integral_below, int_flip, IntegerQuad};
use crate::mcshane::{check_bq, default_schedule, mcshane_partial, mcshane_verify, Verdict};
use crate::quad::{
    build_representation, format_complex, klein_sequence, klein_sequence_exact, Matrix2, MarkoffQuad, Slot, C64,
    DEFAULT_TOL,
};
use crate::spectra::{growth_exponent, one_sided_spectrum, systole_with, two_sided_spectrum, CellRef, SpectrumEntry};
use crate::tree::{reduce_to_sink, ExploreOptions};
use crate::DEFAULT_MAX_CELLS;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "mql", version, about = "Markoff quads, simple length spectra and McShane sums")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Write records to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative tolerance for the quad relation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Worker threads for tree enumeration (output is identical for any value).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Cell budget for tree enumeration.
    #[arg(long = "max-cells", global = true, env = "MQL_MAX_CELLS")]
    pub max_cells: Option<usize>,
    /// Force exact integer arithmetic; non-integer input is an error.
    #[arg(long, global = true)]
    pub exact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoordSystem {
    Lambda,
    Horocyclic,
}

/// Quads are written `a,b,c,d`; entries are `x`, `x+yi`, `x-yi` or `yi`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative residual of (a+b+c+d)^2 = abcd. Fields: residual, tol, valid.
    Verify {
        #[arg(allow_hyphen_values = true)]
        quad: String,
    },
    /// Flip one entry. Fields: index, output.
    Flip {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        /// Slot to flip, 1..4.
        #[arg(short = 'i', long = "index", value_parser = clap::value_parser!(u8).range(1..=4))]
        index: u8,
    },
    /// Reduce to the sink (complex input) or to the fundamental root (integer
    /// input). Fields: output, word.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        quad: String,
    },
    /// Simple length spectrum, one record per curve. Fields: kind, trace,
    /// length, cell, word.
    Spectrum {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        #[arg(short = 'L', long = "length")]
        length: f64,
        /// Two-sided curves instead of one-sided ones.
        #[arg(long)]
        two_sided: bool,
    },
    /// Shortest simple closed curve. Fields: length, kind, trace, cell, word, sink.
    Systole {
        #[arg(allow_hyphen_values = true)]
        quad: String,
    },
    /// McShane sum. With --cutoff a single partial sum, otherwise the cutoff
    /// is raised until the target tolerance is met.
    Mcshane {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        #[arg(long, conflicts_with = "target_tol")]
        cutoff: Option<f64>,
        #[arg(long = "target-tol")]
        target_tol: Option<f64>,
        /// Cell budget (overrides --max-cells).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Bounded BQ check. Fields: faces, faces4, violations, cells_below2, budget_hit.
    BqCheck {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        #[arg(short = 'k', long = "cutoff")]
        k: f64,
    },
    /// The reduced positive integer quads, one per record.
    Fundamental,
    /// Every positive integer quad with largest entry at most B, sorted.
    EnumerateIntegral {
        #[arg(short = 'B', long = "bound")]
        bound: String,
    },
    /// Fit s(L) ~ L^m on geometric shells.
    Growth {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        #[arg(long)]
        lmin: f64,
        #[arg(long)]
        lmax: f64,
        #[arg(long, default_value_t = 8)]
        shells: usize,
    },
    /// Convert to or from lambda-length or horocyclic coordinates. With
    /// --from, INPUT lists the coordinates (6 or 4 numbers).
    Coords {
        #[arg(allow_hyphen_values = true)]
        input: String,
        #[arg(long, conflicts_with = "from", required_unless_present = "from")]
        to: Option<CoordSystem>,
        #[arg(long)]
        from: Option<CoordSystem>,
    },
    /// Apply a mapping class word (letters f1..f4, phi1..phi3, right to left).
    Mcg {
        #[arg(allow_hyphen_values = true)]
        quad: String,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Klein-bottle trace sequence a_{i+1} = A a_i - a_{i-1}.
    Klein {
        #[arg(short = 'A', allow_hyphen_values = true)]
        big_a: String,
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
    },
    /// Explicit representation matrices. Fields: m1, m2, m3, max_deviation.
    Represent {
        #[arg(allow_hyphen_values = true)]
        quad: String,
    },
}

/// Serialises a complex number as a JSON number when it is real and as
/// `x+yi` text otherwise.
pub fn ser_complex<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if z.im == 0.0 {
        s.serialize_f64(z.re)
    } else {
        s.serialize_str(&format_complex(*z))
    }
}

fn cval(z: C64) -> Value {
    ser_complex(&z, serde_json::value::Serializer).unwrap_or(Value::Null)
}

/// Parses `x`, `x+yi`, `x-yi`, `yi`, `i` or `-i`.
pub fn parse_complex(s: &str) -> Result<C64, Error> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |x: &str| -> Result<f64, Error> {
        let v: f64 = match x {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => x.parse().map_err(|_| bad())?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        if t.eq_ignore_ascii_case("nan") || t.to_ascii_lowercase().contains("inf") {
            return Err(Error::NonFinite);
        }
        return Ok(C64::new(num(&t)?, 0.0));
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = &body[..k];
            if re.is_empty() {
                return Err(bad());
            }
            Ok(C64::new(num(re)?, num(&body[k..])?))
        }
        None => Ok(C64::new(0.0, num(body)?)),
    }
}

/// Integer quads go to exact arithmetic.
pub enum QuadInput {
    Exact(IntegerQuad),
    Float(MarkoffQuad),
}

fn split4(s: &str) -> Result<Vec<&str>, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("expected four comma-separated entries, got {s:?}")));
    }
    Ok(parts)
}

pub fn parse_quad(s: &str) -> Result<MarkoffQuad, Error> {
    let p = split4(s)?;
    Ok(MarkoffQuad::new(parse_complex(p[0])?, parse_complex(p[1])?, parse_complex(p[2])?, parse_complex(p[3])?))
}

/// Positive integer entries select the exact path unless the caller forbids
/// it; `exact` makes anything else a parse error.
pub fn parse_quad_input(s: &str, exact: bool) -> Result<QuadInput, Error> {
    let p = split4(s)?;
    let integral = p.iter().all(|x| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit()));
    if integral {
        let q: IntegerQuad = s.parse()?;
        if exact || q.is_positive() {
            return Ok(QuadInput::Exact(q));
        }
    } else if exact {
        return Err(Error::Parse(format!("--exact needs nonnegative integer entries, got {s:?}")));
    }
    Ok(QuadInput::Float(parse_quad(s)?))
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a real number: {x:?}"))))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(Error::Parse(format!("expected {n} comma-separated numbers, got {}", v.len())));
    }
    Ok(v)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            let n: BigInt = n.trim().parse().ok()?;
            (d != BigInt::from(0)).then(|| BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Outcome of one subcommand: records plus the exit status to report.
struct Outcome {
    records: Vec<Map<String, Value>>,
    status: i32,
}

struct Ctx<'a> {
    cli: &'a Cli,
    name: &'static str,
    input: String,
}

impl Ctx<'_> {
    fn record(&self, fields: Value) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("subcommand".into(), json!(self.name));
        m.insert("input".into(), json!(self.input));
        m.insert("version".into(), json!(VERSION));
        if let Value::Object(f) = fields {
            m.extend(f);
        }
        m
    }

    fn opts(&self) -> ExploreOptions {
        ExploreOptions {
            max_cells: self.cli.max_cells.unwrap_or(DEFAULT_MAX_CELLS),
            threads: self.cli.threads.max(1),
            tol: self.cli.tol,
        }
    }
}

fn word_json(w: &[Slot]) -> Value {
    json!(w.iter().map(|s| s.number()).collect::<Vec<_>>())
}

fn cell_json(c: &CellRef) -> Value {
    match c {
        CellRef::Cell(id) => json!(id.0),
        CellRef::Face(x, y) => json!([x.0, y.0]),
    }
}

fn spectrum_json(e: &SpectrumEntry) -> Value {
    json!({
        "kind": e.kind,
        "trace": cval(e.trace),
        "length": cval(e.length),
        "cell": cell_json(&e.cell),
        "word": word_json(&e.word),
    })
}

fn matrix_json(m: &Matrix2) -> Value {
    json!(m.m.iter().map(|row| row.iter().map(|z| cval(*z)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 1,
        e if e.is_budget() => 3,
        _ => 4,
    }
}

fn float_quad(input: &QuadInput) -> MarkoffQuad {
    match input {
        QuadInput::Exact(q) => q.to_markoff(),
        QuadInput::Float(q) => *q,
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let one = |records: Vec<Map<String, Value>>| Ok(Outcome { records, status: 0 });
    match &cli.command {
        Command::Verify { quad } => {
            let ctx = Ctx { cli, name: "verify", input: quad.clone() };
            let (residual, exact) = match parse_quad_input(quad, cli.exact)? {
                QuadInput::Exact(q) => (if q.is_valid() { 0.0 } else { q.to_markoff().residual() }, true),
                QuadInput::Float(q) => {
                    if !q.is_finite() {
                        return Err(Error::NonFinite);
                    }
                    (q.residual(), false)
                }
            };
            let valid = residual <= cli.tol;
            let rec = ctx.record(json!({"residual": residual, "tol": cli.tol, "valid": valid, "exact": exact}));
            Ok(Outcome { records: vec![rec], status: if valid { 0 } else { 2 } })
        }
        Command::Flip { quad, index } => {
            let ctx = Ctx { cli, name: "flip", input: quad.clone() };
            let slot = Slot::from_number(*index).ok_or_else(|| Error::Parse("index must be 1..4".into()))?;
            let output = match parse_quad_input(quad, cli.exact)? {
                QuadInput::Exact(q) => {
                    if !q.is_valid() {
                        return Err(Error::Domain(format!("{q} does not satisfy (a+b+c+d)^2 = abcd")));
                    }
                    int_flip(&q, slot).to_string()
                }
                QuadInput::Float(q) => q.validated(cli.tol)?.flip(slot).to_string(),
            };
            one(vec![ctx.record(json!({"index": index, "output": output}))])
        }
        Command::Reduce { quad } => {
            let ctx = Ctx { cli, name: "reduce", input: quad.clone() };
            let rec = match parse_quad_input(quad, cli.exact)? {
                QuadInput::Exact(q) => {
                    let (root, word) = classify(&q)?;
                    ctx.record(json!({"output": root.to_string(), "word": word_json(&word), "exact": true}))
                }
                QuadInput::Float(q) => {
                    let (sink, word) = reduce_to_sink(&q.validated(cli.tol)?, crate::spectra::REDUCE_STEPS)?;
                    ctx.record(json!({"output": sink.to_string(), "word": word_json(&word), "exact": false}))
                }
            };
            one(vec![rec])
        }
        Command::Spectrum { quad, length, two_sided } => {
            let ctx = Ctx { cli, name: "spectrum", input: quad.clone() };
            let q = float_quad(&parse_quad_input(quad, false)?);
            let entries = if *two_sided {
                two_sided_spectrum(&q, *length, &ctx.opts())?
            } else {
                one_sided_spectrum(&q, *length, &ctx.opts())?
            };
            one(entries.iter().map(|e| ctx.record(spectrum_json(e))).collect())
        }
        Command::Systole { quad } => {
            let ctx = Ctx { cli, name: "systole", input: quad.clone() };
            let q = float_quad(&parse_quad_input(quad, false)?);
            let s = systole_with(&q, &ctx.opts())?;
            let mut fields = spectrum_json(&s.witness);
            fields["sink"] = json!(s.sink.to_string());
            one(vec![ctx.record(fields)])
        }
        Command::Mcshane { quad, cutoff, target_tol, budget } => {
            let ctx = Ctx { cli, name: "mcshane", input: quad.clone() };
            let q = float_quad(&parse_quad_input(quad, false)?);
            let mut opts = ctx.opts();
            if let Some(b) = budget {
                opts.max_cells = *b;
            }
            if let Some(c) = cutoff {
                let r = mcshane_partial(&q, *c, &opts)?;
                let status = if r.verdict == Verdict::BudgetExceeded { 3 } else { 0 };
                let rec = ctx.record(serde_json::to_value(&r).map_err(|e| Error::Domain(e.to_string()))?);
                return Ok(Outcome { records: vec![rec], status });
            }
            let tol = target_tol.unwrap_or(1e-3);
            let v = mcshane_verify(&q, tol, &default_schedule(16), &opts)?;
            let status = match (v.pass, v.report.verdict) {
                (true, _) => 0,
                (false, Verdict::BudgetExceeded) => 3,
                (false, _) => 2,
            };
            let rec = ctx.record(serde_json::to_value(&v).map_err(|e| Error::Domain(e.to_string()))?);
            Ok(Outcome { records: vec![rec], status })
        }
        Command::BqCheck { quad, k } => {
            let ctx = Ctx { cli, name: "bq-check", input: quad.clone() };
            let q = float_quad(&parse_quad_input(quad, false)?);
            let r = check_bq(&q, *k, &ctx.opts())?;
            let status = if !r.violations.is_empty() {
                2
            } else if r.budget_hit {
                3
            } else {
                0
            };
            let rec = ctx.record(serde_json::to_value(&r).map_err(|e| Error::Domain(e.to_string()))?);
            Ok(Outcome { records: vec![rec], status })
        }
        Command::Fundamental => {
            let ctx = Ctx { cli, name: "fundamental", input: String::new() };
            one(enumerate_fundamental().iter().map(|q| ctx.record(json!({"quad": q.to_string()}))).collect())
        }
        Command::EnumerateIntegral { bound } => {
            let ctx = Ctx { cli, name: "enumerate-integral", input: bound.clone() };
            let b = bound.trim().parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {bound:?}")))?;
            one(enumerate_integral_below(&b).iter().map(|q| ctx.record(json!({"quad": q.to_string()}))).collect())
        }
        Command::Growth { quad, lmin, lmax, shells } => {
            let ctx = Ctx { cli, name: "growth", input: quad.clone() };
            let q = float_quad(&parse_quad_input(quad, false)?);
            let fit = growth_exponent(&q, *lmin, *lmax, *shells, &ctx.opts())?;
            one(vec![ctx.record(serde_json::to_value(&fit).map_err(|e| Error::Domain(e.to_string()))?)])
        }
        Command::Coords { input, to, from } => {
            let ctx = Ctx { cli, name: "coords", input: input.clone() };
            let fields = match (to, from) {
                (Some(CoordSystem::Lambda), _) => {
                    let l = quad_to_lambda(&parse_quad(input)?.validated(cli.tol)?)?;
                    let worst = l.simplex_residuals().into_iter().fold(0.0, f64::max);
                    json!({"lambda": l.lambda, "mu": l.mu, "simplex_residual": worst})
                }
                (Some(CoordSystem::Horocyclic), _) => {
                    let h = quad_to_horocyclic(&parse_quad(input)?.validated(cli.tol)?)?;
                    let d = in_fundamental_domain(&h, cli.tol);
                    json!({"h": h.h, "inside": d.inside, "walls": d.walls})
                }
                (None, Some(CoordSystem::Lambda)) => {
                    let v = parse_reals(input, 6)?;
                    let q = lambda_to_quad(&LambdaCoords { lambda: [v[0], v[1], v[2]], mu: [v[3], v[4], v[5]] })?;
                    json!({"output": q.to_string(), "residual": q.residual()})
                }
                (None, Some(CoordSystem::Horocyclic)) => {
                    let v = parse_reals(input, 4)?;
                    let q = horocyclic_to_quad(&HorocyclicCoords { h: [v[0], v[1], v[2], v[3]] }, cli.tol)?;
                    json!({"output": q.to_string(), "residual": q.residual()})
                }
                (None, None) => return Err(Error::Parse("one of --to or --from is required".into())),
            };
            one(vec![ctx.record(fields)])
        }
        Command::Mcg { quad, word } => {
            let ctx = Ctx { cli, name: "mcg", input: quad.clone() };
            let w: McgWord = word.parse()?;
            let q = parse_quad(quad)?.validated(cli.tol)?;
            let out = mcg_apply(&w, &q);
            one(vec![ctx.record(json!({"word": w.to_string(), "output": out.to_string(), "residual": out.residual()}))])
        }
        Command::Klein { big_a, seed, n } => {
            let ctx = Ctx { cli, name: "klein", input: format!("A={big_a} seed={seed}") };
            let parts: Vec<&str> = seed.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("seed must be a0,a1, got {seed:?}")));
            }
            let a = parse_complex(big_a)?;
            let (a0, a1) = (parse_complex(parts[0])?, parse_complex(parts[1])?);
            let seq = klein_sequence(a, a0, a1, *n, cli.tol)?;
            // rational inputs also get the exact check
            let exact = match (parse_rational(big_a), parse_rational(parts[0]), parse_rational(parts[1])) {
                (Some(x), Some(y), Some(z)) => Some(klein_sequence_exact(&x, &y, &z, *n).is_ok()),
                _ => None,
            };
            one(vec![ctx.record(json!({
                "terms": seq.terms.iter().map(|z| cval(*z)).collect::<Vec<_>>(),
                "lambda_plus": cval(seq.lambda_plus),
                "lambda_minus": cval(seq.lambda_minus),
                "max_residual": seq.max_residual(),
                "exact_check": exact,
            }))])
        }
        Command::Represent { quad } => {
            let ctx = Ctx { cli, name: "represent", input: quad.clone() };
            let q = parse_quad(quad)?;
            let rep = build_representation(&q, cli.tol)?;
            one(vec![ctx.record(json!({
                "m1": matrix_json(&rep.m1),
                "m2": matrix_json(&rep.m2),
                "m3": matrix_json(&rep.m3),
                "max_deviation": rep.max_deviation(&q),
            }))])
        }
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_records(records: &[Map<String, Value>], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let Some(first) = records.first() else { return Ok(()) };
            let header: Vec<&String> = first.keys().collect();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header.iter().map(|s| s.as_str()))?;
            for r in records {
                w.write_record(header.iter().map(|k| r.get(*k).map(cell_text).unwrap_or_default()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| write_records(&outcome.records, cli.format, &mut f)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_records(&outcome.records, cli.format, &mut lock)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    outcome.status
}
