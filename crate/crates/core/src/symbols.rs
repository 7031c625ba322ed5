//! Jordan symbols, 2-adic symbols and the operations between them.
//!
//! A Jordan constituent `q^{±n}_t` or `q^{±n}_II` is a unimodular lattice of
//! dimension `n` scaled by `q = 2^e`. A 2-adic symbol forgets the individual
//! subscripts inside each compartment (a maximal run of type I constituents
//! at consecutive scales) and keeps only their sum.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::decompose::{
    choose_fine_units, fine_symbol_of, FineKind, FineSymbol, FineTerm, TermType,
};
use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::padic::{legendre2, Mod8, Scalar, Sign, Unit8};

/// A scaled unimodular constituent with an explicit subscript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JordanConstituent {
    pub scale_exp: i32,
    pub dim: u32,
    pub sign: Sign,
    /// `None` for type II.
    pub oddity: Option<Mod8>,
}

impl JordanConstituent {
    pub fn odd(scale_exp: i32, dim: u32, sign: Sign, oddity: Mod8) -> Self {
        JordanConstituent {
            scale_exp,
            dim,
            sign,
            oddity: Some(oddity),
        }
    }

    pub fn even(scale_exp: i32, dim: u32, sign: Sign) -> Self {
        JordanConstituent {
            scale_exp,
            dim,
            sign,
            oddity: None,
        }
    }

    pub fn ty(&self) -> TermType {
        if self.oddity.is_some() {
            TermType::I
        } else {
            TermType::II
        }
    }
}

/// Whether `q^{±n}_t` / `q^{±n}_II` names an actual lattice.
pub fn is_legal_term(c: &JordanConstituent) -> bool {
    let n = c.dim;
    match c.oddity {
        None => (n == 0 && c.sign == Sign::Plus) || (n > 0 && n.is_multiple_of(2)),
        Some(t) => {
            let t = t.value();
            match (n, c.sign) {
                (0, _) => false,
                (1, Sign::Plus) => t == 1 || t == 7,
                (1, Sign::Minus) => t == 3 || t == 5,
                (2, Sign::Plus) => matches!(t, 0 | 2 | 6),
                (2, Sign::Minus) => matches!(t, 4 | 2 | 6),
                _ => (t as u32) % 2 == n % 2,
            }
        }
    }
}

/// Subscripts that make `q^{sign dim}_t` legal.
pub fn legal_oddities(dim: u32, sign: Sign) -> Vec<Mod8> {
    Mod8::all()
        .filter(|&t| is_legal_term(&JordanConstituent::odd(0, dim, sign, t)))
        .collect()
}

/// A witness subscript for each `(dim, sign)` making every term legal and the
/// sum equal to `oddity`, if one exists. Deterministic (smallest residues
/// first, earliest term first).
pub fn compartment_assignment(terms: &[(u32, Sign)], oddity: Mod8) -> Option<Vec<Mod8>> {
    let options: Vec<Vec<Mod8>> = terms.iter().map(|&(n, s)| legal_oddities(n, s)).collect();
    // reachable[i] = set of sums achievable by terms i.. (bitmask over Z/8)
    let mut reachable = vec![0u8; terms.len() + 1];
    reachable[terms.len()] = 1;
    for i in (0..terms.len()).rev() {
        let mut mask = 0u8;
        for t in &options[i] {
            for s in 0..8u8 {
                if reachable[i + 1] & (1 << s) != 0 {
                    mask |= 1 << ((s + t.value()) % 8);
                }
            }
        }
        reachable[i] = mask;
    }
    if reachable[0] & (1 << oddity.value()) == 0 {
        return None;
    }
    let mut need = oddity;
    let mut out = Vec::with_capacity(terms.len());
    for i in 0..terms.len() {
        let t = *options[i]
            .iter()
            .find(|&&t| reachable[i + 1] & (1 << (need - t).value()) != 0)?;
        out.push(t);
        need = need - t;
    }
    Some(out)
}

/// Exhaustive subset-sum test: can the compartment come from a fine symbol?
pub fn compartment_assignment_exists(terms: &[(u32, Sign)], oddity: Mod8) -> bool {
    compartment_assignment(terms, oddity).is_some()
}

/// Index ranges of maximal runs of type I entries at consecutive scales.
pub(crate) fn compartment_runs(items: &[(i32, TermType)]) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if items[i].1 != TermType::I {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < items.len()
            && items[i + 1].1 == TermType::I
            && items[i + 1].0 == items[i].0 + 1
        {
            i += 1;
        }
        runs.push(start..i + 1);
        i += 1;
    }
    runs
}

/// Constituents at distinct scales, ascending, each with its own subscript.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JordanSymbol {
    constituents: Vec<JordanConstituent>,
}

impl JordanSymbol {
    /// Sorts by scale; rejects duplicate scales and illegal terms.
    pub fn new(mut constituents: Vec<JordanConstituent>) -> Result<Self> {
        constituents.sort_by_key(|c| c.scale_exp);
        for w in constituents.windows(2) {
            if w[0].scale_exp == w[1].scale_exp {
                return Err(Error::IllegalSymbol(format!(
                    "duplicate scale 2^{}",
                    w[0].scale_exp
                )));
            }
        }
        if let Some(bad) = constituents.iter().find(|c| !is_legal_term(c)) {
            return Err(Error::IllegalSymbol(format!("illegal term {bad:?}")));
        }
        Ok(JordanSymbol { constituents })
    }

    pub fn constituents(&self) -> &[JordanConstituent] {
        &self.constituents
    }

    /// Compartments as index ranges over the nontrivial constituents.
    pub fn compartments(&self) -> Vec<Range<usize>> {
        let items: Vec<(i32, TermType)> = self
            .constituents
            .iter()
            .map(|c| {
                if c.dim == 0 {
                    (c.scale_exp, TermType::II)
                } else {
                    (c.scale_exp, c.ty())
                }
            })
            .collect();
        compartment_runs(&items)
    }

    pub(crate) fn with_constituents(constituents: Vec<JordanConstituent>) -> Self {
        JordanSymbol { constituents }
    }
}

/// Per scale: dimensions add, signs multiply, subscripts add, `II + II = II`,
/// `II + t = t`.
pub fn fine_to_jordan(f: &FineSymbol) -> JordanSymbol {
    let mut by_scale: BTreeMap<i32, JordanConstituent> = BTreeMap::new();
    for t in f.terms() {
        let c = by_scale
            .entry(t.scale_exp)
            .or_insert_with(|| JordanConstituent::even(t.scale_exp, 0, Sign::Plus));
        *c = add_constituents(c, &term_constituent(t));
    }
    JordanSymbol::with_constituents(by_scale.into_values().collect())
}

fn term_constituent(t: &FineTerm) -> JordanConstituent {
    match t.kind {
        FineKind::Odd(u) => JordanConstituent::odd(t.scale_exp, 1, legendre2(u), u.into()),
        FineKind::Even(s) => JordanConstituent::even(t.scale_exp, 2, s),
    }
}

fn add_constituents(a: &JordanConstituent, b: &JordanConstituent) -> JordanConstituent {
    let oddity = match (a.oddity, b.oddity) {
        (None, None) => None,
        (x, y) => Some(x.unwrap_or_default() + y.unwrap_or_default()),
    };
    JordanConstituent {
        scale_exp: a.scale_exp,
        dim: a.dim + b.dim,
        sign: a.sign * b.sign,
        oddity,
    }
}

/// A constituent of a 2-adic symbol, without its own subscript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub scale_exp: i32,
    pub dim: u32,
    pub sign: Sign,
    pub ty: TermType,
}

/// A compartment: consecutive terms `range` sharing a fused oddity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Compartment {
    pub range: Range<usize>,
    pub oddity: Mod8,
}

/// A 2-adic symbol.
///
/// Only nontrivial terms are stored; a scale with no term is a trivial
/// constituent. Terms are ascending by scale and compartments are derived
/// from the terms, so two symbols are equal exactly when they print the same.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TwoAdicSymbol {
    terms: Vec<Term>,
    compartments: Vec<Compartment>,
}

impl TwoAdicSymbol {
    /// Build from terms and one oddity per compartment (in scale order).
    ///
    /// Trivial `q^{+0}_II` terms are dropped. Fails on unsorted or duplicate
    /// scales, illegal dimensions, a wrong oddity count, or a compartment
    /// oddity no subscript assignment can realize.
    pub fn new(terms: Vec<Term>, oddities: Vec<Mod8>) -> Result<Self> {
        let mut kept = Vec::with_capacity(terms.len());
        for t in terms {
            match (t.dim, t.ty) {
                (0, TermType::II) if t.sign == Sign::Plus => continue,
                (0, _) => {
                    return Err(Error::IllegalSymbol(format!(
                        "0-dimensional term at scale 2^{} must be {}^+0_II",
                        t.scale_exp, t.scale_exp
                    )))
                }
                (n, TermType::II) if n % 2 == 1 => {
                    return Err(Error::IllegalSymbol(format!(
                        "type II term at scale 2^{} has odd dimension {n}",
                        t.scale_exp
                    )))
                }
                _ => kept.push(t),
            }
        }
        for w in kept.windows(2) {
            if w[0].scale_exp >= w[1].scale_exp {
                return Err(Error::IllegalSymbol(format!(
                    "scales must be distinct and ascending (2^{} then 2^{})",
                    w[0].scale_exp, w[1].scale_exp
                )));
            }
        }
        let runs = compartment_runs(&kept.iter().map(|t| (t.scale_exp, t.ty)).collect::<Vec<_>>());
        if runs.len() != oddities.len() {
            return Err(Error::IllegalSymbol(format!(
                "{} compartments but {} oddities",
                runs.len(),
                oddities.len()
            )));
        }
        let compartments: Vec<Compartment> = runs
            .into_iter()
            .zip(oddities)
            .map(|(range, oddity)| Compartment { range, oddity })
            .collect();
        let s = TwoAdicSymbol {
            terms: kept,
            compartments,
        };
        for (i, c) in s.compartments.iter().enumerate() {
            if !compartment_assignment_exists(&s.compartment_shape(i), c.oddity) {
                return Err(Error::IllegalSymbol(format!(
                    "no subscript assignment gives compartment {} oddity {}",
                    crate::notation::format_compartment_shape(&s.terms[c.range.clone()]),
                    c.oddity
                )));
            }
        }
        Ok(s)
    }

    pub fn empty() -> Self {
        TwoAdicSymbol::default()
    }

    pub(crate) fn from_parts_unchecked(terms: Vec<Term>, compartments: Vec<Compartment>) -> Self {
        TwoAdicSymbol {
            terms,
            compartments,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn compartments(&self) -> &[Compartment] {
        &self.compartments
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> u32 {
        self.terms.iter().map(|t| t.dim).sum()
    }

    pub fn term_index(&self, scale_exp: i32) -> Option<usize> {
        self.terms
            .binary_search_by_key(&scale_exp, |t| t.scale_exp)
            .ok()
    }

    pub fn term_at(&self, scale_exp: i32) -> Option<&Term> {
        self.term_index(scale_exp).map(|i| &self.terms[i])
    }

    /// Index of the compartment containing term `index`.
    pub fn compartment_of(&self, index: usize) -> Option<usize> {
        self.compartments
            .iter()
            .position(|c| c.range.contains(&index))
    }

    pub fn compartment_dim(&self, compartment: usize) -> u32 {
        self.terms[self.compartments[compartment].range.clone()]
            .iter()
            .map(|t| t.dim)
            .sum()
    }

    pub(crate) fn compartment_shape(&self, compartment: usize) -> Vec<(u32, Sign)> {
        self.terms[self.compartments[compartment].range.clone()]
            .iter()
            .map(|t| (t.dim, t.sign))
            .collect()
    }

    pub(crate) fn terms_mut(&mut self) -> &mut [Term] {
        &mut self.terms
    }

    pub(crate) fn compartments_mut(&mut self) -> &mut [Compartment] {
        &mut self.compartments
    }

    /// A Jordan symbol with this 2-adic symbol, using the deterministic
    /// witness subscripts of [`compartment_assignment`].
    pub fn to_jordan(&self) -> JordanSymbol {
        let mut out: Vec<JordanConstituent> = self
            .terms
            .iter()
            .map(|t| JordanConstituent {
                scale_exp: t.scale_exp,
                dim: t.dim,
                sign: t.sign,
                oddity: None,
            })
            .collect();
        for (i, c) in self.compartments.iter().enumerate() {
            let witness = compartment_assignment(&self.compartment_shape(i), c.oddity)
                .expect("compartments are assignable by construction");
            for (k, t) in c.range.clone().zip(witness) {
                out[k].oddity = Some(t);
            }
        }
        JordanSymbol::with_constituents(out)
    }

    /// A fine symbol refining [`Self::to_jordan`].
    pub fn to_fine(&self) -> FineSymbol {
        jordan_to_fine(&self.to_jordan()).expect("witness constituents are legal")
    }

    pub fn total_invariants(&self) -> TotalInvariants {
        total_invariants(&self.to_fine())
    }
}

/// Refine each constituent into fine terms.
pub fn jordan_to_fine(j: &JordanSymbol) -> Result<FineSymbol> {
    let mut terms = Vec::new();
    for c in j.constituents() {
        match c.oddity {
            Some(t) => terms.extend(
                choose_fine_units(c.dim, c.sign, t)?
                    .into_iter()
                    .map(|u| FineTerm::odd(c.scale_exp, u)),
            ),
            None => {
                if !is_legal_term(c) {
                    return Err(Error::IllegalSymbol(format!("illegal type II term {c:?}")));
                }
                for k in 0..c.dim / 2 {
                    let sign = if k == 0 { c.sign } else { Sign::Plus };
                    terms.push(FineTerm::even(c.scale_exp, sign));
                }
            }
        }
    }
    FineSymbol::new(terms)
}

/// Bracket each compartment and fuse its subscripts.
pub fn jordan_to_2adic(j: &JordanSymbol) -> TwoAdicSymbol {
    let nontrivial: Vec<&JordanConstituent> =
        j.constituents().iter().filter(|c| c.dim > 0).collect();
    let terms: Vec<Term> = nontrivial
        .iter()
        .map(|c| Term {
            scale_exp: c.scale_exp,
            dim: c.dim,
            sign: c.sign,
            ty: c.ty(),
        })
        .collect();
    let runs = compartment_runs(
        &terms
            .iter()
            .map(|t| (t.scale_exp, t.ty))
            .collect::<Vec<_>>(),
    );
    let compartments = runs
        .into_iter()
        .map(|range| Compartment {
            oddity: Mod8::sum(nontrivial[range.clone()].iter().filter_map(|c| c.oddity)),
            range,
        })
        .collect();
    TwoAdicSymbol::from_parts_unchecked(terms, compartments)
}

/// 2-adic symbol of a nondegenerate form.
pub fn two_adic_symbol_of<T: Scalar>(g: &GramMatrix<T>) -> Result<TwoAdicSymbol> {
    Ok(jordan_to_2adic(&fine_to_jordan(&fine_symbol_of(g)?)))
}

/// Symbol of an orthogonal direct sum.
pub fn direct_sum(a: &TwoAdicSymbol, b: &TwoAdicSymbol) -> TwoAdicSymbol {
    let mut merged: BTreeMap<i32, JordanConstituent> = BTreeMap::new();
    for j in [a.to_jordan(), b.to_jordan()] {
        for c in j.constituents() {
            merged
                .entry(c.scale_exp)
                .and_modify(|m| *m = add_constituents(m, c))
                .or_insert(*c);
        }
    }
    jordan_to_2adic(&JordanSymbol::with_constituents(
        merged.into_values().collect(),
    ))
}

/// Dual lattice: every scale replaced by its reciprocal.
pub fn dual(s: &TwoAdicSymbol) -> TwoAdicSymbol {
    let n = s.terms().len();
    let terms: Vec<Term> = s
        .terms()
        .iter()
        .rev()
        .map(|t| Term {
            scale_exp: -t.scale_exp,
            ..*t
        })
        .collect();
    let mut compartments: Vec<Compartment> = s
        .compartments()
        .iter()
        .rev()
        .map(|c| Compartment {
            range: n - c.range.end..n - c.range.start,
            oddity: c.oddity,
        })
        .collect();
    compartments.sort_by_key(|c| c.range.start);
    TwoAdicSymbol::from_parts_unchecked(terms, compartments)
}

/// Multiply all inner products by `2^k`.
pub fn scale_by_two(s: &TwoAdicSymbol, k: i32) -> TwoAdicSymbol {
    let terms = s
        .terms()
        .iter()
        .map(|t| Term {
            scale_exp: t.scale_exp + k,
            ..*t
        })
        .collect();
    TwoAdicSymbol::from_parts_unchecked(terms, s.compartments().to_vec())
}

/// Multiply all inner products by an odd unit `u`.
///
/// A 1-dimensional `<t>` becomes `<ut>`. An even plane keeps its sign for
/// every unit, because scaling a 2×2 block multiplies its determinant by
/// `u^2 ≡ 1 mod 8`.
pub fn rescale_by_unit(f: &FineSymbol, u: Unit8) -> FineSymbol {
    let terms = f
        .terms()
        .iter()
        .map(|t| match t.kind {
            FineKind::Odd(x) => FineTerm::odd(t.scale_exp, x * u),
            FineKind::Even(_) => *t,
        })
        .collect();
    FineSymbol::new(terms).expect("rescaling preserves the fine invariant")
}

/// Isometry invariants of the whole lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TotalInvariants {
    pub total_dim: u32,
    /// Valuation of the determinant.
    pub det_val: i64,
    /// Odd part of the determinant mod 8.
    pub det_unit: Unit8,
    /// Oddity of the rational quadratic space.
    pub total_oddity: Mod8,
}

pub fn total_invariants(f: &FineSymbol) -> TotalInvariants {
    let mut total_dim = 0;
    let mut det_val = 0i64;
    let mut det_unit = Unit8::ONE;
    let mut total_oddity = Mod8::ZERO;
    for t in f.terms() {
        let odd_scale = t.scale_exp.rem_euclid(2) == 1;
        total_dim += t.dim();
        det_val += t.scale_exp as i64 * t.dim() as i64;
        match t.kind {
            FineKind::Odd(u) => {
                det_unit = det_unit * u;
                total_oddity = total_oddity + Mod8::from(u);
                if odd_scale && legendre2(u) == Sign::Minus {
                    total_oddity = total_oddity + Mod8::FOUR;
                }
            }
            FineKind::Even(s) => {
                det_unit = det_unit
                    * match s {
                        Sign::Plus => Unit8::SEVEN,
                        Sign::Minus => Unit8::THREE,
                    };
                if odd_scale && s == Sign::Minus {
                    total_oddity = total_oddity + Mod8::FOUR;
                }
            }
        }
    }
    TotalInvariants {
        total_dim,
        det_val,
        det_unit,
        total_oddity,
    }
}

impl fmt::Display for TwoAdicSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::notation::print(self))
    }
}
