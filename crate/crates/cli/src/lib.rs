//! The `twoadic` command line: symbols of Gram matrices, canonical forms,
//! sign walks, invariants, random lattices and the brute-force oracle.
//!
//! Everything goes through [`run`], which returns the exit code and both
//! output streams instead of touching the process, so tests can drive it
//! directly.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read as _;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;

use twoadic::oracle::{isometric_mod, random_lattice, OracleAnswer, Precision};
use twoadic::{
    adjusted_oddity, canonical_form, delta, from_json, invariant_vector, isometric_symbols, parse,
    print, signways, to_records, two_adic_symbol_of, DeltaMove, Error, Gram, Rational, Scalar,
    TermType, TwoAdicSymbol,
};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// Malformed input, illegal symbol or illegal move.
    Input = 1,
    /// Singular Gram matrix.
    Degenerate = 2,
    /// `equiv` or `oracle` found the inputs distinct.
    Distinct = 3,
    /// The randomized oracle ran out of budget.
    Unknown = 4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            exit: Exit::Ok,
            stdout,
            stderr: String::new(),
        }
    }

    fn with(exit: Exit, stdout: String) -> Self {
        Outcome {
            exit,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(exit: Exit, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        stderr.push('\n');
        Outcome {
            exit,
            stdout: String::new(),
            stderr,
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Degenerate => Exit::Degenerate,
            _ => Exit::Input,
        };
        Outcome::fail(exit, format!("error: {e}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    /// JSON, with symbols as term records.
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "twoadic", version, about = "2-adic symbols of lattices")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the 2-adic symbol of a Gram file (`-` reads standard input).
    Symbol { gram: String },
    /// Print the canonical form of a symbol.
    Canonical { symbol: String },
    /// Decide whether two symbols (or two Gram files, with --gram) are isometric.
    Equiv {
        a: String,
        b: String,
        #[arg(long)]
        gram: bool,
    },
    /// Walk the signs of the terms at two scales, e.g. `walk SYMBOL 2 4`.
    Walk {
        symbol: String,
        i: String,
        j: String,
    },
    /// Report the complete invariants of a symbol.
    Invariants { symbol: String },
    /// Print a seeded random Gram file.
    Random {
        #[arg(long)]
        dim: u32,
        /// Largest scale exponent.
        #[arg(long, default_value_t = 3)]
        max_scale_exp: i32,
        /// Smallest scale exponent.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        min_scale_exp: i32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for an isometry between two Gram files modulo 2^k.
    Oracle {
        a: String,
        b: String,
        /// Defaults to val2(det) + 3.
        #[arg(long)]
        precision: Option<u32>,
    },
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, A>(args: I) -> Outcome
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(Exit::Input, text.trim_end()),
            };
        }
    };
    let format = cli.format;
    match cli.command {
        Command::Symbol { gram } => cmd_symbol(&gram, format),
        Command::Canonical { symbol } => cmd_canonical(&symbol, format),
        Command::Equiv { a, b, gram } => cmd_equiv(&a, &b, gram, format),
        Command::Walk { symbol, i, j } => cmd_walk(&symbol, &i, &j, format),
        Command::Invariants { symbol } => cmd_invariants(&symbol, format),
        Command::Random {
            dim,
            max_scale_exp,
            min_scale_exp,
            seed,
        } => cmd_random(dim, min_scale_exp, max_scale_exp, seed),
        Command::Oracle { a, b, precision } => cmd_oracle(&a, &b, precision, format),
    }
    .unwrap_or_else(|o| o)
}

type CmdResult = Result<Outcome, Outcome>;

/// A Gram matrix on disk: the true Gram is `2^(-denom_exp) · entries`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramFile {
    pub dim: usize,
    pub entries: Vec<Vec<i64>>,
    #[serde(default)]
    pub denom_exp: u32,
}

impl GramFile {
    pub fn to_gram(&self) -> twoadic::Result<Gram> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Shape {
                expected: self.dim * self.dim,
                got: self.entries.iter().map(Vec::len).sum(),
            });
        }
        let scale = Rational::pow2(-(self.denom_exp as i32));
        let rows = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| Rational::from_int(v) * scale.clone())
                    .collect()
            })
            .collect();
        let g = Gram::from_rows(rows)?;
        if g.determinant() == Rational::from_int(0) {
            return Err(Error::Degenerate);
        }
        Ok(g)
    }

    /// Smallest `denom_exp` that makes `g` integral, or `None` when some
    /// denominator is not a power of 2 or an entry overflows `i64`.
    pub fn from_gram(g: &Gram) -> Option<GramFile> {
        let mut denom_exp = 0u32;
        for x in g.entries() {
            let d = x.denom();
            if d.trailing_zeros() != Some(d.bits() - 1) {
                return None;
            }
            denom_exp = denom_exp.max(d.bits() as u32 - 1);
        }
        let scale = Rational::pow2(denom_exp as i32);
        let entries = g
            .rows()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let v = (x.clone() * scale.clone()).to_integer();
                        i64::try_from(v).ok()
                    })
                    .collect::<Option<Vec<i64>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GramFile {
            dim: g.dim(),
            entries,
            denom_exp,
        })
    }
}

fn read_source(path: &str) -> Result<String, Outcome> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| {
            Outcome::fail(Exit::Input, format!("error: reading standard input: {e}"))
        })?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Outcome::fail(Exit::Input, format!("error: reading {path}: {e}")))
    }
}

pub fn read_gram_file(path: &str) -> Result<Gram, Outcome> {
    let text = read_source(path)?;
    let file: GramFile = serde_json::from_str(&text).map_err(|e| {
        Outcome::fail(
            Exit::Input,
            format!("error: malformed Gram file {path}: {e}"),
        )
    })?;
    Ok(file.to_gram()?)
}

/// A symbol argument: notation text, or a JSON record list.
fn read_symbol(arg: &str) -> Result<TwoAdicSymbol, Outcome> {
    let s = if arg.trim_start().starts_with('[') && arg.contains('{') {
        from_json(arg)?
    } else {
        parse(arg)?
    };
    Ok(s)
}

fn render_symbol(s: &TwoAdicSymbol, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", print(s)),
        Format::Structured => format!("{}\n", twoadic::to_json(s)),
    }
}

fn cmd_symbol(path: &str, format: Format) -> CmdResult {
    let g = read_gram_file(path)?;
    let s = two_adic_symbol_of(&g)?;
    Ok(Outcome::ok(render_symbol(&s, format)))
}

fn cmd_canonical(arg: &str, format: Format) -> CmdResult {
    let s = read_symbol(arg)?;
    Ok(Outcome::ok(render_symbol(&canonical_form(&s), format)))
}

fn cmd_equiv(a: &str, b: &str, gram: bool, format: Format) -> CmdResult {
    let (sa, sb) = if gram {
        let (ga, gb) = (read_gram_file(a)?, read_gram_file(b)?);
        (two_adic_symbol_of(&ga)?, two_adic_symbol_of(&gb)?)
    } else {
        (read_symbol(a)?, read_symbol(b)?)
    };
    let same = isometric_symbols(&sa, &sb);
    let word = if same { "isometric" } else { "distinct" };
    let exit = if same { Exit::Ok } else { Exit::Distinct };
    let out = match format {
        Format::Text => format!("{word}\n"),
        Format::Structured => {
            let doc = json!({
                "result": word,
                "canonical": [to_records(&canonical_form(&sa)), to_records(&canonical_form(&sb))],
            });
            format!("{doc}\n")
        }
    };
    Ok(Outcome::with(exit, out))
}

/// Scale argument: a power of two such as `128`, or `1/4`.
pub fn parse_scale(text: &str) -> Result<i32, String> {
    let bad = || format!("scale {text} is not a power of two");
    let power = |t: &str| -> Result<i32, String> {
        let v: BigInt = t.trim().parse().map_err(|_| bad())?;
        let bits = v.bits();
        if v.sign() != num_bigint::Sign::Plus || v.trailing_zeros() != Some(bits - 1) {
            return Err(bad());
        }
        i32::try_from(bits - 1).map_err(|_| bad())
    };
    match text.split_once('/') {
        Some((num, den)) if num.trim() == "1" => Ok(-power(den)?),
        Some(_) => Err(bad()),
        None => power(text),
    }
}

fn cmd_walk(arg: &str, i: &str, j: &str, format: Format) -> CmdResult {
    let s = read_symbol(arg)?;
    let i = parse_scale(i).map_err(|m| Outcome::fail(Exit::Input, format!("error: {m}")))?;
    let j = parse_scale(j).map_err(|m| Outcome::fail(Exit::Input, format!("error: {m}")))?;
    let walked = delta(&s, DeltaMove::new(i, j))?;
    Ok(Outcome::ok(render_symbol(&walked, format)))
}

#[derive(Serialize)]
struct TermReport {
    scale_exp: i32,
    dim: u32,
    #[serde(rename = "type")]
    ty: TermType,
}

#[derive(Serialize)]
struct CompartmentReport {
    scale_exps: Vec<i32>,
    oddity: u8,
    adjusted_oddity: u8,
}

#[derive(Serialize)]
struct SignwayReport {
    scale_exps: Vec<i32>,
    sign: twoadic::Sign,
}

#[derive(Serialize)]
struct InvariantReport {
    terms: Vec<TermReport>,
    compartments: Vec<CompartmentReport>,
    signways: Vec<SignwayReport>,
    total_dim: u32,
    total_oddity: u8,
    det_val2: i64,
    det_unit_mod8: u8,
}

fn invariant_report(s: &TwoAdicSymbol) -> InvariantReport {
    let v = invariant_vector(s);
    let ways = signways(s);
    let total = s.total_invariants();
    InvariantReport {
        terms: v
            .profile
            .iter()
            .map(|p| TermReport {
                scale_exp: p.scale_exp,
                dim: p.dim,
                ty: p.ty,
            })
            .collect(),
        compartments: s
            .compartments()
            .iter()
            .enumerate()
            .map(|(c, comp)| CompartmentReport {
                scale_exps: s.terms()[comp.range.clone()]
                    .iter()
                    .map(|t| t.scale_exp)
                    .collect(),
                oddity: comp.oddity.value(),
                adjusted_oddity: adjusted_oddity(s, c).value(),
            })
            .collect(),
        signways: ways
            .signways
            .iter()
            .zip(&v.signway_signs)
            .map(|(w, &sign)| SignwayReport {
                scale_exps: w.clone(),
                sign,
            })
            .collect(),
        total_dim: total.total_dim,
        total_oddity: total.total_oddity.value(),
        det_val2: total.det_val,
        det_unit_mod8: total.det_unit.value(),
    }
}

fn scale_list(exps: &[i32]) -> String {
    let scales: Vec<String> = exps.iter().map(|&e| twoadic::format_scale(e)).collect();
    format!("{{{}}}", scales.join(","))
}

fn cmd_invariants(arg: &str, format: Format) -> CmdResult {
    let s = read_symbol(arg)?;
    let r = invariant_report(&s);
    if format == Format::Structured {
        return Ok(Outcome::ok(format!(
            "{}\n",
            serde_json::to_string(&r).expect("report serializes")
        )));
    }
    let mut out = String::new();
    let terms: Vec<String> = r
        .terms
        .iter()
        .map(|t| {
            let ty = if t.ty == TermType::I { "I" } else { "II" };
            format!("{}:{}:{}", twoadic::format_scale(t.scale_exp), t.dim, ty)
        })
        .collect();
    let comps: Vec<String> = r
        .compartments
        .iter()
        .map(|c| {
            format!(
                "{} oddity {} adjusted {}",
                scale_list(&c.scale_exps),
                c.oddity,
                c.adjusted_oddity
            )
        })
        .collect();
    let ways: Vec<String> = r
        .signways
        .iter()
        .map(|w| format!("{} {}", scale_list(&w.scale_exps), w.sign))
        .collect();
    let _ = writeln!(out, "terms: {}", terms.join(" "));
    let _ = writeln!(out, "compartments: {}", comps.join("; "));
    let _ = writeln!(out, "signways: {}", ways.join("; "));
    let _ = writeln!(out, "total dimension: {}", r.total_dim);
    let _ = writeln!(out, "total oddity: {}", r.total_oddity);
    let _ = writeln!(
        out,
        "determinant: 2^{} * u, u = {} mod 8",
        r.det_val2, r.det_unit_mod8
    );
    Ok(Outcome::ok(out))
}

fn cmd_random(dim: u32, min_exp: i32, max_exp: i32, seed: u64) -> CmdResult {
    if dim == 0 || min_exp > max_exp {
        return Err(Outcome::fail(
            Exit::Input,
            "error: need dim >= 1 and min-scale-exp <= max-scale-exp",
        ));
    }
    let g = random_lattice(dim, min_exp, max_exp, seed);
    let file = GramFile::from_gram(&g).ok_or_else(|| {
        Outcome::fail(
            Exit::Input,
            "error: random lattice entries overflow 64 bits",
        )
    })?;
    Ok(Outcome::ok(format!(
        "{}\n",
        serde_json::to_string(&file).expect("Gram file serializes")
    )))
}

fn cmd_oracle(a: &str, b: &str, precision: Option<u32>, format: Format) -> CmdResult {
    let (ga, gb) = (read_gram_file(a)?, read_gram_file(b)?);
    let k = match precision {
        Some(k) => Precision::new(k)?,
        None => Precision::for_gram(&ga)?,
    };
    let report = isometric_mod(&ga, &gb, k)?;
    let (word, exit) = match report.answer {
        OracleAnswer::Isometric => ("isometric", Exit::Ok),
        OracleAnswer::NotIsometric => ("distinct", Exit::Distinct),
        OracleAnswer::Unknown => ("unknown", Exit::Unknown),
    };
    let out = match format {
        Format::Text => format!("{word}\n"),
        Format::Structured => {
            let n = ga.dim();
            let witness = report
                .witness
                .map(|w| w.chunks(n).map(<[u64]>::to_vec).collect::<Vec<_>>());
            let doc = json!({
                "result": word,
                "precision_used": report.precision_used,
                "exhaustive": report.exhaustive,
                "witness": witness,
            });
            format!("{doc}\n")
        }
    };
    Ok(Outcome::with(exit, out))
}
