//! The rewriting calculus on fine, Jordan and 2-adic symbols.
//!
//! Every move maps a symbol to another symbol of an isometric lattice. Fine
//! moves address terms by their index in [`FineSymbol::terms`]; 2-adic moves
//! address terms by scale exponent.

use std::collections::BTreeSet;
use std::fmt;

use crate::decompose::{FineKind, FineSymbol, FineTerm, TermType};
use crate::error::{Error, Result};
use crate::padic::{Mod8, Sign, Unit8};
use crate::symbols::{
    compartment_runs, is_legal_term, JordanConstituent, JordanSymbol, TwoAdicSymbol,
};

/// Giver/receiver status of a 1-dimensional term `q<t>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GiverReceiver {
    /// `t ≡ 1 mod 4`
    Giver,
    /// `t ≡ 3 mod 4`
    Receiver,
}

impl GiverReceiver {
    pub fn of(t: Unit8) -> GiverReceiver {
        if t.value() % 4 == 1 {
            GiverReceiver::Giver
        } else {
            GiverReceiver::Receiver
        }
    }
}

/// Which sign-walking rule a fine walk uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkCase {
    /// Two terms of the same scale.
    SameScale,
    /// Adjacent scales, one odd term and one even plane.
    MixedNeighbors,
    /// Adjacent scales, two odd terms that are both givers or both receivers.
    AlikeNeighbors,
    /// Two odd terms whose scales differ by a factor of 4.
    Jump,
}

impl WalkCase {
    pub fn from_index(case: u8) -> Option<WalkCase> {
        Some(match case {
            0 => WalkCase::SameScale,
            1 => WalkCase::MixedNeighbors,
            2 => WalkCase::AlikeNeighbors,
            3 => WalkCase::Jump,
            _ => return None,
        })
    }
}

fn fine_term(f: &FineSymbol, index: usize) -> Result<FineTerm> {
    f.terms()
        .get(index)
        .copied()
        .ok_or(Error::IndexOutOfRange(index))
}

fn shift_by_four(t: FineTerm) -> FineTerm {
    match t.kind {
        FineKind::Odd(u) => FineTerm::odd(t.scale_exp, u * Unit8::FIVE),
        FineKind::Even(s) => FineTerm::even(t.scale_exp, -s),
    }
}

/// `1 ↔ 3` and `5 ↔ 7`: flips both the sign and the giver/receiver status.
fn flip_status_and_sign(u: Unit8) -> Unit8 {
    u * Unit8::THREE
}

/// `1 ↔ 7` and `5 ↔ 3`: flips the giver/receiver status, keeps the sign.
fn flip_status(u: Unit8) -> Unit8 {
    u * Unit8::SEVEN
}

fn replace(f: &FineSymbol, changes: &[(usize, FineTerm)]) -> FineSymbol {
    let mut terms = f.terms().to_vec();
    for &(i, t) in changes {
        terms[i] = t;
    }
    FineSymbol::new(terms).expect("moves keep each scale's kind")
}

/// Negate the signs of terms `a` and `b` by the given rule.
pub fn fine_sign_walk(f: &FineSymbol, a: usize, b: usize, case: WalkCase) -> Result<FineSymbol> {
    let (ta, tb) = (fine_term(f, a)?, fine_term(f, b)?);
    if a == b {
        return Err(Error::IllegalSignWalk(
            "a term cannot walk with itself".into(),
        ));
    }
    let gap = (ta.scale_exp - tb.scale_exp).abs();
    let illegal = |why: &str| Err(Error::IllegalSignWalk(format!("{ta} and {tb}: {why}")));
    match case {
        WalkCase::SameScale => {
            if gap != 0 {
                return illegal("scales differ");
            }
            Ok(replace(
                f,
                &[(a, shift_by_four(ta)), (b, shift_by_four(tb))],
            ))
        }
        WalkCase::MixedNeighbors => {
            if gap != 1 || ta.ty() == tb.ty() {
                return illegal("need adjacent scales and different types");
            }
            Ok(replace(
                f,
                &[(a, shift_by_four(ta)), (b, shift_by_four(tb))],
            ))
        }
        WalkCase::AlikeNeighbors => match (ta.kind, tb.kind) {
            (FineKind::Odd(u), FineKind::Odd(v)) if gap == 1 => {
                if GiverReceiver::of(u) != GiverReceiver::of(v) {
                    return illegal("one giver and one receiver");
                }
                Ok(replace(
                    f,
                    &[
                        (a, FineTerm::odd(ta.scale_exp, flip_status_and_sign(u))),
                        (b, FineTerm::odd(tb.scale_exp, flip_status_and_sign(v))),
                    ],
                ))
            }
            _ => illegal("need two 1-dimensional terms at adjacent scales"),
        },
        WalkCase::Jump => {
            if gap != 2 || ta.ty() != TermType::I || tb.ty() != TermType::I {
                return illegal("need two 1-dimensional terms with scales a factor 4 apart");
            }
            Ok(replace(
                f,
                &[(a, shift_by_four(ta)), (b, shift_by_four(tb))],
            ))
        }
    }
}

/// Compartment index (in scale order) of each type I scale of a fine symbol.
fn fine_compartment(f: &FineSymbol, index: usize) -> Option<usize> {
    let mut scales: Vec<(i32, TermType)> =
        f.terms().iter().map(|t| (t.scale_exp, t.ty())).collect();
    scales.dedup();
    let target = f.terms()[index].scale_exp;
    let pos = scales.iter().position(|s| s.0 == target)?;
    compartment_runs(&scales)
        .iter()
        .position(|r| r.contains(&pos))
}

fn same_compartment(f: &FineSymbol, indices: &[usize]) -> Result<()> {
    for &i in indices {
        let t = fine_term(f, i)?;
        if t.ty() != TermType::I {
            return Err(Error::IllegalMove(format!(
                "{t} is not a 1-dimensional term"
            )));
        }
    }
    let first = fine_compartment(f, indices[0]);
    if indices.iter().any(|&i| fine_compartment(f, i) != first) {
        return Err(Error::IllegalMove(
            "terms lie in different compartments".into(),
        ));
    }
    Ok(())
}

/// Exchange giver/receiver status between two terms of one compartment,
/// keeping both signs.
pub fn giver_permute(f: &FineSymbol, a: usize, b: usize) -> Result<FineSymbol> {
    same_compartment(f, &[a, b])?;
    let (ta, tb) = (f.terms()[a], f.terms()[b]);
    let (u, v) = (ta.unit().expect("odd"), tb.unit().expect("odd"));
    if a == b || GiverReceiver::of(u) == GiverReceiver::of(v) {
        return Ok(f.clone());
    }
    Ok(replace(
        f,
        &[
            (a, FineTerm::odd(ta.scale_exp, flip_status(u))),
            (b, FineTerm::odd(tb.scale_exp, flip_status(v))),
        ],
    ))
}

/// Turn four givers of one compartment into receivers, or vice versa.
pub fn giver_convert(f: &FineSymbol, indices: [usize; 4]) -> Result<FineSymbol> {
    if indices.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(Error::IllegalMove(
            "giver conversion needs four distinct terms".into(),
        ));
    }
    same_compartment(f, &indices)?;
    let status: BTreeSet<GiverReceiver> = indices
        .iter()
        .map(|&i| GiverReceiver::of(f.terms()[i].unit().expect("odd")))
        .collect();
    if status.len() != 1 {
        return Err(Error::IllegalMove("mixed givers and receivers".into()));
    }
    let changes: Vec<(usize, FineTerm)> = indices
        .iter()
        .map(|&i| {
            let t = f.terms()[i];
            (
                i,
                FineTerm::odd(t.scale_exp, flip_status(t.unit().expect("odd"))),
            )
        })
        .collect();
    Ok(replace(f, &changes))
}

/// Reassign the subscripts of one compartment of a Jordan symbol, keeping
/// every term legal and the total unchanged.
pub fn oddity_fuse(
    j: &JordanSymbol,
    compartment: usize,
    oddities: &[Mod8],
) -> Result<JordanSymbol> {
    let runs = j.compartments();
    let range = runs
        .get(compartment)
        .cloned()
        .ok_or(Error::IndexOutOfRange(compartment))?;
    if range.len() != oddities.len() {
        return Err(Error::IllegalFusion(format!(
            "compartment has {} terms, got {} subscripts",
            range.len(),
            oddities.len()
        )));
    }
    let old = Mod8::sum(
        j.constituents()[range.clone()]
            .iter()
            .filter_map(|c| c.oddity),
    );
    let new = Mod8::sum(oddities.iter().copied());
    if old != new {
        return Err(Error::IllegalFusion(format!(
            "oddity changes from {old} to {new}"
        )));
    }
    let mut out = j.constituents().to_vec();
    for (k, &t) in range.zip(oddities) {
        let c = JordanConstituent::odd(out[k].scale_exp, out[k].dim, out[k].sign, t);
        if !is_legal_term(&c) {
            return Err(Error::IllegalFusion(format!(
                "illegal term {}^{}{}_{}",
                crate::notation::format_scale(c.scale_exp),
                if c.sign == Sign::Minus { "-" } else { "" },
                c.dim,
                t
            )));
        }
        out[k] = c;
    }
    JordanSymbol::new(out)
}

/// A sign walk between the terms of scales `2^i` and `2^j` of a 2-adic
/// symbol, `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaMove {
    pub i: i32,
    pub j: i32,
}

impl DeltaMove {
    /// Orders the two scales.
    pub fn new(a: i32, b: i32) -> DeltaMove {
        DeltaMove {
            i: a.min(b),
            j: a.max(b),
        }
    }
}

impl fmt::Display for DeltaMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::notation::format_scale;
        write!(f, "Δ({}, {})", format_scale(self.i), format_scale(self.j))
    }
}

/// Whether signs can walk between the terms of scales `2^i` and `2^j`.
pub fn can_walk_2adic(s: &TwoAdicSymbol, i: i32, j: i32) -> bool {
    let (i, j) = (i.min(j), i.max(j));
    let (Some(a), Some(b)) = (s.term_index(i), s.term_index(j)) else {
        return false;
    };
    let (ta, tb) = (s.terms()[a], s.terms()[b]);
    match j - i {
        1 if ta.ty != tb.ty => true,
        1 if ta.ty == TermType::I => {
            let c = s
                .compartment_of(a)
                .expect("type I terms lie in a compartment");
            let odd = s.compartments()[c].oddity.value();
            s.compartment_dim(c) > 2 || odd == 2 || odd == 6
        }
        2 => ta.ty == TermType::I && tb.ty == TermType::I && s.term_at(i + 1).is_none(),
        _ => false,
    }
}

/// Every legal sign walk of `s`, ascending.
pub fn legal_deltas(s: &TwoAdicSymbol) -> Vec<DeltaMove> {
    let mut out = Vec::new();
    for (k, t) in s.terms().iter().enumerate() {
        for u in &s.terms()[k + 1..] {
            if u.scale_exp - t.scale_exp > 2 {
                break;
            }
            if can_walk_2adic(s, t.scale_exp, u.scale_exp) {
                out.push(DeltaMove::new(t.scale_exp, u.scale_exp));
            }
        }
    }
    out
}

/// Negate both signs and add 4 to the oddity of each compartment involved
/// (once, even when both terms share it).
pub fn delta(s: &TwoAdicSymbol, m: DeltaMove) -> Result<TwoAdicSymbol> {
    if !can_walk_2adic(s, m.i, m.j) {
        use crate::notation::format_scale;
        return Err(Error::IllegalSignWalk(format!(
            "no sign walk is possible between the terms of scales {} and {}",
            format_scale(m.i),
            format_scale(m.j)
        )));
    }
    let a = s.term_index(m.i).expect("checked");
    let b = s.term_index(m.j).expect("checked");
    let mut out = s.clone();
    let involved: BTreeSet<usize> = [a, b].iter().filter_map(|&k| s.compartment_of(k)).collect();
    for k in [a, b] {
        let t = &mut out.terms_mut()[k];
        t.sign = -t.sign;
    }
    for c in involved {
        let comp = &mut out.compartments_mut()[c];
        comp.oddity = comp.oddity + Mod8::FOUR;
    }
    Ok(out)
}
