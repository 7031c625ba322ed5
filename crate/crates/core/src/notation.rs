//! ASCII spelling of 2-adic and Jordan symbols.
//!
//! ```text
//! symbol := item*
//! item   := term | '[' term+ ']' '_' int
//! term   := scale '^' [sign] [dim] ['_' sub]
//! scale  := power of two | '1/' power of two
//! sub    := 'II' | int
//! ```
//!
//! Whitespace between tokens is optional. A run of digits directly followed
//! by `^` or `/` starts the next term, so `[1^+2^-]_0` reads as two
//! 1-dimensional terms. Bare type I terms carry a subscript, bracketed
//! terms do not, and type II is always written `_II`. Adjacent type I pieces
//! are merged into one compartment whose oddity is the sum of the pieces.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::TermType;
use crate::error::{Error, Result};
use crate::padic::{Mod8, Sign};
use crate::symbols::{
    compartment_assignment_exists, compartment_runs, is_legal_term, JordanConstituent,
    JordanSymbol, Term, TwoAdicSymbol,
};

/// A syntax or legality error, with the 1-based column where it was found.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

/// Decimal spelling of `2^e`, or `1/2^-e` for negative `e`.
pub fn format_scale(e: i32) -> String {
    let p = BigUint::one() << e.unsigned_abs();
    if e >= 0 {
        p.to_string()
    } else {
        format!("1/{p}")
    }
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "",
        Sign::Minus => "-",
    }
}

fn bare_term(t: &Term) -> String {
    format!(
        "{}^{}{}",
        format_scale(t.scale_exp),
        sign_str(t.sign),
        t.dim
    )
}

pub(crate) fn format_compartment_shape(terms: &[Term]) -> String {
    let parts: Vec<String> = terms.iter().map(bare_term).collect();
    format!("[{}]", parts.join(" "))
}

/// Deterministic spelling: no `+`, dimensions always shown, one-term
/// compartments without brackets, oddities in `-3..=4`.
pub fn print(s: &TwoAdicSymbol) -> String {
    let mut items = Vec::new();
    let mut k = 0;
    while k < s.terms().len() {
        let t = &s.terms()[k];
        match s.compartment_of(k) {
            None => {
                items.push(format!("{}_II", bare_term(t)));
                k += 1;
            }
            Some(c) => {
                let comp = &s.compartments()[c];
                let members = &s.terms()[comp.range.clone()];
                if members.len() == 1 {
                    items.push(format!("{}_{}", bare_term(t), comp.oddity));
                } else {
                    items.push(format!(
                        "{}_{}",
                        format_compartment_shape(members),
                        comp.oddity
                    ));
                }
                k = comp.range.end;
            }
        }
    }
    items.join(" ")
}

/// Every constituent with its own subscript.
pub fn print_jordan(j: &JordanSymbol) -> String {
    let parts: Vec<String> = j
        .constituents()
        .iter()
        .map(|c| {
            let sub = c.oddity.map_or_else(|| "II".to_string(), |t| t.to_string());
            format!(
                "{}^{}{}_{}",
                format_scale(c.scale_exp),
                sign_str(c.sign),
                c.dim,
                sub
            )
        })
        .collect();
    parts.join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sub {
    II,
    Odd(Mod8),
}

#[derive(Clone, Copy, Debug)]
struct RawTerm {
    column: usize,
    scale_exp: i32,
    sign: Sign,
    dim: u32,
    sub: Option<Sub>,
}

enum Piece {
    Bare(RawTerm),
    Bracket {
        column: usize,
        terms: Vec<RawTerm>,
        oddity: Mod8,
    },
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(
        &self,
        column_pos: usize,
        message: impl Into<String>,
    ) -> std::result::Result<T, ParseError> {
        Err(ParseError {
            column: column_pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &str) -> std::result::Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.describe_here();
            self.err(self.pos, format!("expected {what}, found {found}"))
        }
    }

    fn describe_here(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{}'", c as char),
            None => "end of input".into(),
        }
    }

    /// Digits without skipping whitespace inside the number.
    fn digits(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
            (start, s)
        })
    }

    /// True when a digit run starts here and is immediately followed by `^` or `/`.
    fn at_scale(&mut self) -> bool {
        self.skip_ws();
        let mut p = self.pos;
        while p < self.text.len() && self.text[p].is_ascii_digit() {
            p += 1;
        }
        p > self.pos && matches!(self.text.get(p), Some(b'^') | Some(b'/'))
    }

    fn power_of_two(
        &self,
        column_pos: usize,
        digits: &str,
    ) -> std::result::Result<u32, ParseError> {
        let n: BigUint = digits.parse().expect("digits");
        if n.is_zero() || (&n & (&n - 1u8)) != BigUint::zero() {
            return self.err(column_pos, format!("scale {digits} is not a power of two"));
        }
        Ok((n.bits() - 1) as u32)
    }

    fn scale(&mut self) -> std::result::Result<(usize, i32), ParseError> {
        let Some((start, num)) = self.digits() else {
            let found = self.describe_here();
            return self.err(self.pos, format!("expected a scale, found {found}"));
        };
        let mut e = self.power_of_two(start, num)? as i64;
        if self.text.get(self.pos) == Some(&b'/') {
            if num != "1" {
                return self.err(start, "a fractional scale must be written 1/2^k");
            }
            self.pos += 1;
            let Some((s2, den)) = self.digits() else {
                return self.err(self.pos, "expected a power of two after '1/'");
            };
            e = -(self.power_of_two(s2, den)? as i64);
        }
        let e = i32::try_from(e).or_else(|_| self.err(start, "scale is too large"))?;
        Ok((start, e))
    }

    fn small_int(&self, column_pos: usize, digits: &str) -> std::result::Result<u32, ParseError> {
        digits
            .parse::<u32>()
            .or_else(|_| self.err(column_pos, format!("number {digits} is too large")))
    }

    fn term(&mut self, bracketed: bool) -> std::result::Result<RawTerm, ParseError> {
        let (column, scale_exp) = self.scale()?;
        self.expect(b'^', "'^'")?;
        let sign = if self.eat(b'-') {
            Sign::Minus
        } else {
            self.eat(b'+');
            Sign::Plus
        };
        let dim = if self.at_scale() {
            1
        } else if let Some((p, d)) = self.digits() {
            self.small_int(p, d)?
        } else {
            1
        };
        let sub = if !bracketed && self.eat(b'_') {
            Some(self.subscript()?)
        } else {
            None
        };
        Ok(RawTerm {
            column,
            scale_exp,
            sign,
            dim,
            sub,
        })
    }

    fn subscript(&mut self) -> std::result::Result<Sub, ParseError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(b"II") {
            self.pos += 2;
            return Ok(Sub::II);
        }
        Ok(Sub::Odd(self.int()?))
    }

    fn int(&mut self) -> std::result::Result<Mod8, ParseError> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let Some((_, d)) = self.digits() else {
            let found = self.describe_here();
            return self.err(
                self.pos,
                format!("expected an integer subscript, found {found}"),
            );
        };
        let mut r = 0i64;
        for c in d.bytes() {
            r = (r * 10 + (c - b'0') as i64) % 8;
        }
        Ok(Mod8::new(if negative { -r } else { r }))
    }

    fn pieces(&mut self) -> std::result::Result<Vec<Piece>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c == b'[' {
                let column = self.pos;
                self.pos += 1;
                let mut terms = Vec::new();
                while self.peek() != Some(b']') {
                    if self.peek().is_none() {
                        return self.err(column, "unclosed '['");
                    }
                    terms.push(self.term(true)?);
                    if self.peek() == Some(b'_') {
                        return self.err(self.pos, "terms inside brackets carry no subscript");
                    }
                }
                self.pos += 1;
                if terms.is_empty() {
                    return self.err(column, "empty compartment");
                }
                self.expect(b'_', "'_' and the compartment oddity")?;
                if self.peek() == Some(b'I') {
                    return self.err(self.pos, "a compartment oddity must be an integer");
                }
                let oddity = self.int()?;
                out.push(Piece::Bracket {
                    column,
                    terms,
                    oddity,
                });
            } else {
                out.push(Piece::Bare(self.term(false)?));
            }
        }
        Ok(out)
    }
}

fn parse_err(column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        column: column + 1,
        message: message.into(),
    }
}

fn term_text(t: &RawTerm) -> String {
    let sub = match t.sub {
        Some(Sub::II) => "_II".to_string(),
        Some(Sub::Odd(x)) => format!("_{x}"),
        None => String::new(),
    };
    format!(
        "{}^{}{}{}",
        format_scale(t.scale_exp),
        sign_str(t.sign),
        t.dim,
        sub
    )
}

/// Check one bare term; `None` for a dropped trivial term.
fn bare_constituent(t: &RawTerm) -> std::result::Result<Option<JordanConstituent>, ParseError> {
    let c = match t.sub {
        None => {
            return Err(parse_err(
                t.column,
                format!(
                    "term {} needs a subscript (an integer, or II)",
                    term_text(t)
                ),
            ))
        }
        Some(Sub::II) => JordanConstituent::even(t.scale_exp, t.dim, t.sign),
        Some(Sub::Odd(x)) => JordanConstituent::odd(t.scale_exp, t.dim, t.sign, x),
    };
    if !is_legal_term(&c) {
        return Err(parse_err(
            t.column,
            format!("illegal term {}", term_text(t)),
        ));
    }
    Ok((c.dim > 0).then_some(c))
}

fn check_duplicates(scales: &mut [(i32, usize)]) -> std::result::Result<(), ParseError> {
    scales.sort();
    for w in scales.windows(2) {
        if w[0].0 == w[1].0 {
            let col = w[0].1.max(w[1].1);
            return Err(parse_err(
                col,
                format!("duplicate scale {}", format_scale(w[0].0)),
            ));
        }
    }
    Ok(())
}

/// Parse a 2-adic symbol.
pub fn parse(text: &str) -> Result<TwoAdicSymbol> {
    Ok(parse_symbol(text)?)
}

fn parse_symbol(text: &str) -> std::result::Result<TwoAdicSymbol, ParseError> {
    let pieces = Cursor::new(text).pieces()?;
    // (term, contribution to its compartment's oddity)
    let mut terms: Vec<(Term, Mod8)> = Vec::new();
    let mut scales = Vec::new();
    for piece in &pieces {
        match piece {
            Piece::Bare(t) => {
                scales.push((t.scale_exp, t.column));
                if let Some(c) = bare_constituent(t)? {
                    terms.push((
                        Term {
                            scale_exp: c.scale_exp,
                            dim: c.dim,
                            sign: c.sign,
                            ty: c.ty(),
                        },
                        c.oddity.unwrap_or_default(),
                    ));
                }
            }
            Piece::Bracket {
                column,
                terms: members,
                oddity,
            } => {
                for (k, t) in members.iter().enumerate() {
                    scales.push((t.scale_exp, t.column));
                    if t.dim == 0 {
                        return Err(parse_err(
                            t.column,
                            format!("illegal term {} in a compartment", term_text(t)),
                        ));
                    }
                    if k > 0 && t.scale_exp != members[k - 1].scale_exp + 1 {
                        return Err(parse_err(
                            t.column,
                            "compartment scales are not consecutive powers of two",
                        ));
                    }
                }
                let shape: Vec<(u32, Sign)> = members.iter().map(|t| (t.dim, t.sign)).collect();
                if !compartment_assignment_exists(&shape, *oddity) {
                    let spelled: Vec<Term> = members
                        .iter()
                        .map(|t| Term {
                            scale_exp: t.scale_exp,
                            dim: t.dim,
                            sign: t.sign,
                            ty: TermType::I,
                        })
                        .collect();
                    return Err(parse_err(
                        *column,
                        format!(
                            "no subscript assignment gives compartment {} oddity {}",
                            format_compartment_shape(&spelled),
                            oddity
                        ),
                    ));
                }
                for (k, t) in members.iter().enumerate() {
                    let term = Term {
                        scale_exp: t.scale_exp,
                        dim: t.dim,
                        sign: t.sign,
                        ty: TermType::I,
                    };
                    terms.push((term, if k == 0 { *oddity } else { Mod8::ZERO }));
                }
            }
        }
    }
    check_duplicates(&mut scales)?;
    terms.sort_by_key(|(t, _)| t.scale_exp);
    let runs = compartment_runs(
        &terms
            .iter()
            .map(|(t, _)| (t.scale_exp, t.ty))
            .collect::<Vec<_>>(),
    );
    let oddities = runs
        .into_iter()
        .map(|r| Mod8::sum(terms[r].iter().map(|(_, x)| *x)))
        .collect();
    TwoAdicSymbol::new(terms.into_iter().map(|(t, _)| t).collect(), oddities)
        .map_err(|e| parse_err(0, e.to_string()))
}

/// Parse a Jordan symbol: bare terms only, each with its own subscript.
pub fn parse_jordan(text: &str) -> Result<JordanSymbol> {
    let pieces = Cursor::new(text).pieces()?;
    let mut out = Vec::new();
    let mut scales = Vec::new();
    for piece in &pieces {
        match piece {
            Piece::Bare(t) => {
                scales.push((t.scale_exp, t.column));
                out.extend(bare_constituent(t)?);
            }
            Piece::Bracket { column, .. } => {
                return Err(parse_err(*column, "a Jordan symbol has no compartments").into());
            }
        }
    }
    check_duplicates(&mut scales)?;
    JordanSymbol::new(out)
}

/// One term of a symbol in structured form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub scale_exp: i32,
    pub dim: u32,
    #[serde(rename = "type")]
    pub ty: TermType,
    pub sign: Sign,
    /// Index of the compartment, `None` for type II.
    pub compartment_id: Option<usize>,
    /// `0..=7`, `None` for type II.
    pub compartment_oddity: Option<u8>,
}

pub fn to_records(s: &TwoAdicSymbol) -> Vec<TermRecord> {
    s.terms()
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let c = s.compartment_of(k);
            TermRecord {
                scale_exp: t.scale_exp,
                dim: t.dim,
                ty: t.ty,
                sign: t.sign,
                compartment_id: c,
                compartment_oddity: c.map(|c| s.compartments()[c].oddity.value()),
            }
        })
        .collect()
}

pub fn from_records(records: &[TermRecord]) -> Result<TwoAdicSymbol> {
    let mut records = records.to_vec();
    records.sort_by_key(|r| r.scale_exp);
    let terms: Vec<Term> = records
        .iter()
        .map(|r| Term {
            scale_exp: r.scale_exp,
            dim: r.dim,
            sign: r.sign,
            ty: r.ty,
        })
        .collect();
    let runs = compartment_runs(
        &terms
            .iter()
            .map(|t| (t.scale_exp, t.ty))
            .collect::<Vec<_>>(),
    );
    let mut oddities = Vec::with_capacity(runs.len());
    for (id, range) in runs.iter().enumerate() {
        let members = &records[range.clone()];
        let oddity = members[0].compartment_oddity;
        if members
            .iter()
            .any(|r| r.compartment_id != Some(id) || r.compartment_oddity != oddity)
        {
            return Err(Error::Record(format!(
                "compartment {id} is recorded inconsistently"
            )));
        }
        match oddity {
            Some(x) if x < 8 => oddities.push(Mod8::new(x as i64)),
            _ => {
                return Err(Error::Record(format!(
                    "compartment {id} needs an oddity in 0..=7"
                )))
            }
        }
    }
    if let Some(r) = records.iter().find(|r| {
        r.ty == TermType::II && (r.compartment_id.is_some() || r.compartment_oddity.is_some())
    }) {
        return Err(Error::Record(format!(
            "type II term at scale {} cannot belong to a compartment",
            format_scale(r.scale_exp)
        )));
    }
    TwoAdicSymbol::new(terms, oddities)
}

pub fn to_json(s: &TwoAdicSymbol) -> String {
    serde_json::to_string_pretty(&to_records(s)).expect("records serialize")
}

pub fn from_json(text: &str) -> Result<TwoAdicSymbol> {
    let records: Vec<TermRecord> =
        serde_json::from_str(text).map_err(|e| Error::Record(e.to_string()))?;
    from_records(&records)
}

impl std::str::FromStr for TwoAdicSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl fmt::Display for JordanSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_jordan(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "1^2_II [2^-2 4^3]_3 16^1_1 32^2_II 64^-2_II [128^1 256^1]_0 512^-4_II";

    fn message(text: &str) -> String {
        match parse(text) {
            Err(Error::Parse(e)) => e.to_string(),
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        }
    }

    #[test]
    fn running_example_round_trip() {
        let s = parse(RUNNING).unwrap();
        assert_eq!(print(&s), RUNNING);
        assert_eq!(s.terms().len(), 9);
        assert_eq!(s.compartments().len(), 3);
    }

    #[test]
    fn shorthand_and_whitespace() {
        let s = parse("[1^+2^-]_2").unwrap();
        assert_eq!(print(&s), "[1^1 2^-1]_2");
        assert_eq!(
            parse("1^2_II[2^-2 4^3]_3").unwrap(),
            parse("1^2_II [2^-2 4^3]_3").unwrap()
        );
        assert_eq!(print(&parse(" 2^-_ -3 ").unwrap()), "2^-1_-3");
        assert_eq!(print(&parse("1^1_9").unwrap()), "1^1_1");
        assert_eq!(print(&parse("").unwrap()), "");
    }

    #[test]
    fn merges_adjacent_pieces() {
        let s = parse("1^1_1 [2^1 4^1]_2").unwrap();
        assert_eq!(print(&s), "[1^1 2^1 4^1]_3");
        let s = parse("2^1_1 1^1_1").unwrap();
        assert_eq!(print(&s), "[1^1 2^1]_2");
    }

    #[test]
    fn trivial_terms_are_dropped() {
        assert_eq!(print(&parse("1^0_II 2^1_1").unwrap()), "2^1_1");
        assert!(message("1^-0_II").contains("illegal term"));
    }

    #[test]
    fn negative_scales() {
        let s = parse("1/4^1_1 1/2^-2_II").unwrap();
        assert_eq!(print(&s), "1/4^1_1 1/2^-2_II");
        assert_eq!(s.terms()[0].scale_exp, -2);
    }

    #[test]
    fn malformed_inputs() {
        assert!(message("[1^+2^-]_0").contains("no subscript assignment"));
        assert!(message("1^-2_0").contains("illegal term"));
        assert!(message("3^1_1").contains("not a power of two"));
        assert!(message("1^1_1 1^2_II").contains("duplicate scale 1"));
        assert!(message("[1^1 4^1]_2").contains("not consecutive"));
        assert!(message("[1^1_1 2^1]_2").contains("no subscript"));
        assert!(message("1^1").contains("needs a subscript"));
        assert!(message("[1^1 2^1]").contains("expected '_'"));
        assert!(message("[1^1 2^1_").contains("no subscript"));
        assert!(message("1^2_II ]").contains("expected a scale"));
    }

    #[test]
    fn error_columns() {
        let e = match parse("1^2_II 5^1_1") {
            Err(Error::Parse(e)) => e,
            other => panic!("{other:?}"),
        };
        assert_eq!(e.column, 8);
    }

    #[test]
    fn jordan_spelling() {
        let j = parse_jordan("1^2_II 2^-2_6 4^3_-3").unwrap();
        assert_eq!(print_jordan(&j), "1^2_II 2^-2_-2 4^3_-3");
        assert_eq!(parse_jordan(&print_jordan(&j)).unwrap(), j);
        assert!(parse_jordan("[1^1 2^1]_2").is_err());
    }

    #[test]
    fn records_round_trip() {
        let s = parse(RUNNING).unwrap();
        let records = to_records(&s);
        assert_eq!(records[0].compartment_id, None);
        assert_eq!(records[1].compartment_id, Some(0));
        assert_eq!(records[1].compartment_oddity, Some(3));
        assert_eq!(from_records(&records).unwrap(), s);
        assert_eq!(from_json(&to_json(&s)).unwrap(), s);
        let json = to_json(&parse("2^-1_3").unwrap());
        assert!(json.contains("\"type\": \"I\""));
        assert!(json.contains("\"sign\": \"-\""));
    }

    #[test]
    fn inconsistent_records() {
        let s = parse("[1^1 2^1]_2").unwrap();
        let mut records = to_records(&s);
        records[1].compartment_oddity = Some(4);
        assert!(matches!(from_records(&records), Err(Error::Record(_))));
    }

    #[test]
    fn scale_spelling() {
        assert_eq!(format_scale(0), "1");
        assert_eq!(format_scale(9), "512");
        assert_eq!(format_scale(-3), "1/8");
        assert_eq!(format_scale(70), "1180591620717411303424");
    }
}
