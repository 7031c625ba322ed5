//! From Gram matrices to fine symbols.
//!
//! [`jordan_split`] peels off 1-dimensional pieces and even 2-dimensional
//! pieces by exact orthogonal projection. Each piece is then classified, and
//! scales that mix the two kinds are rewritten as a pure sum of
//! 1-dimensional terms with the same dimension, sign and oddity.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::padic::{legendre2, Mod8, Scalar, Sign, Unit8};
use crate::symbols::{is_legal_term, JordanConstituent};

/// One orthogonal piece of a split: a 1×1 or 2×2 block at scale `2^scale_exp`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock<T> {
    pub scale_exp: i32,
    /// The block as it sits in the original lattice (not divided by the scale).
    pub block: GramMatrix<T>,
}

impl<T: Scalar> JordanBlock<T> {
    /// The block divided by `2^scale_exp`.
    pub fn unimodular(&self) -> GramMatrix<T> {
        self.block.scaled(&T::pow2(-self.scale_exp))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermType {
    I,
    II,
}

impl fmt::Display for TermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermType::I => "I",
            TermType::II => "II",
        })
    }
}

/// Dimension, type, sign and (type I only) oddity of a unimodular block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnimodularClass {
    pub dim: u32,
    pub ty: TermType,
    pub sign: Sign,
    pub oddity: Option<Mod8>,
}

/// Orthogonal splitting of a nondegenerate Gram matrix into 1×1 blocks and
/// even 2×2 blocks.
///
/// Pivot choice: among entries of minimal valuation take a diagonal entry if
/// one exists (lowest index), otherwise the off-diagonal entry with lowest
/// row then column.
pub fn jordan_split<T: Scalar>(g: &GramMatrix<T>) -> Result<Vec<JordanBlock<T>>> {
    let mut a: Vec<Vec<T>> = g.rows().map(|r| r.to_vec()).collect();
    let mut blocks = Vec::new();
    while !a.is_empty() {
        let n = a.len();
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..n {
            for j in i..n {
                if a[i][j].is_zero() {
                    continue;
                }
                let v = a[i][j].val2()?;
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => {
                        let diag = i == j;
                        let bdiag = bi == bj;
                        v < bv
                            || (v == bv && diag && !bdiag)
                            || (v == bv && diag == bdiag && (i, j) < (bi, bj))
                    }
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((m, p, q)) = best else {
            return Err(Error::Degenerate);
        };
        let scale_exp = m as i32;
        if p == q {
            let pivot = a[p][p].clone();
            let rest: Vec<usize> = (0..n).filter(|&k| k != p).collect();
            let next: Vec<Vec<T>> = rest
                .iter()
                .map(|&x| {
                    rest.iter()
                        .map(|&y| {
                            a[x][y].clone() - a[x][p].clone() * a[p][y].clone() / pivot.clone()
                        })
                        .collect()
                })
                .collect();
            blocks.push(JordanBlock {
                scale_exp,
                block: GramMatrix::new(1, vec![pivot])?,
            });
            a = next;
        } else {
            let (x11, x12, x22) = (a[p][p].clone(), a[p][q].clone(), a[q][q].clone());
            let det = x11.clone() * x22.clone() - x12.clone() * x12.clone();
            let rest: Vec<usize> = (0..n).filter(|&k| k != p && k != q).collect();
            // complement entries: a_xy - [a_xp a_xq] B^{-1} [a_py a_qy]ᵀ
            let next: Vec<Vec<T>> = rest
                .iter()
                .map(|&x| {
                    rest.iter()
                        .map(|&y| {
                            let left = a[x][p].clone()
                                * (x22.clone() * a[p][y].clone() - x12.clone() * a[q][y].clone())
                                + a[x][q].clone()
                                    * (x11.clone() * a[q][y].clone()
                                        - x12.clone() * a[p][y].clone());
                            a[x][y].clone() - left / det.clone()
                        })
                        .collect()
                })
                .collect();
            blocks.push(JordanBlock {
                scale_exp,
                block: GramMatrix::new(2, vec![x11, x12.clone(), x12, x22])?,
            });
            a = next;
        }
    }
    Ok(blocks)
}

/// Classify a unimodular 1×1 block `<u>` or an even unimodular 2×2 block.
pub fn classify_unimodular_block<T: Scalar>(block: &GramMatrix<T>) -> Result<UnimodularClass> {
    match block.dim() {
        1 => {
            let x = block.get(0, 0);
            if x.is_zero() || x.val2()? != 0 {
                return Err(Error::NotUnimodular(format!(
                    "1x1 entry {x} is not a 2-adic unit"
                )));
            }
            let u = x.unit_part_mod8()?;
            Ok(UnimodularClass {
                dim: 1,
                ty: TermType::I,
                sign: legendre2(u),
                oddity: Some(u.into()),
            })
        }
        2 => {
            let even_diag = |x: &T| x.is_zero() || x.val2().map(|v| v >= 1).unwrap_or(false);
            let off = block.get(0, 1);
            if !even_diag(block.get(0, 0))
                || !even_diag(block.get(1, 1))
                || off.is_zero()
                || off.val2()? != 0
            {
                return Err(Error::NotUnimodular(
                    "2x2 block must have even diagonal and unit off-diagonal".into(),
                ));
            }
            // det ≡ -1 (sign +) or 3 (sign -) mod 8
            let det = block.determinant();
            let u = det.unit_part_mod8()?;
            Ok(UnimodularClass {
                dim: 2,
                ty: TermType::II,
                sign: legendre2(u),
                oddity: None,
            })
        }
        n => Err(Error::NotUnimodular(format!(
            "blocks have dimension 1 or 2, got {n}"
        ))),
    }
}

/// A term of a fine symbol: `2^e <t>` or `2^e` times one of the two even
/// unimodular planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FineKind {
    /// 1-dimensional `<t>`; its sign is `legendre2(t)`.
    Odd(Unit8),
    /// `(0 1; 1 0)` for `+`, `(2 1; 1 2)` for `-`.
    Even(Sign),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FineTerm {
    pub scale_exp: i32,
    pub kind: FineKind,
}

impl FineTerm {
    pub fn odd(scale_exp: i32, t: Unit8) -> FineTerm {
        FineTerm {
            scale_exp,
            kind: FineKind::Odd(t),
        }
    }

    pub fn even(scale_exp: i32, sign: Sign) -> FineTerm {
        FineTerm {
            scale_exp,
            kind: FineKind::Even(sign),
        }
    }

    pub fn dim(&self) -> u32 {
        match self.kind {
            FineKind::Odd(_) => 1,
            FineKind::Even(_) => 2,
        }
    }

    pub fn sign(&self) -> Sign {
        match self.kind {
            FineKind::Odd(t) => legendre2(t),
            FineKind::Even(s) => s,
        }
    }

    pub fn unit(&self) -> Option<Unit8> {
        match self.kind {
            FineKind::Odd(t) => Some(t),
            FineKind::Even(_) => None,
        }
    }

    pub fn ty(&self) -> TermType {
        match self.kind {
            FineKind::Odd(_) => TermType::I,
            FineKind::Even(_) => TermType::II,
        }
    }
}

impl fmt::Display for FineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = crate::notation::format_scale(self.scale_exp);
        match self.kind {
            FineKind::Odd(t) => write!(f, "{scale}^{}1_{}", sign_prefix(legendre2(t)), t.signed()),
            FineKind::Even(s) => write!(f, "{scale}^{}2_II", sign_prefix(s)),
        }
    }
}

fn sign_prefix(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "",
        Sign::Minus => "-",
    }
}

/// A multiset of fine terms in which no scale mixes 1-dimensional terms with
/// even planes. Terms are kept sorted, so equality is multiset equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FineSymbol {
    terms: Vec<FineTerm>,
}

impl FineSymbol {
    pub fn new(mut terms: Vec<FineTerm>) -> Result<FineSymbol> {
        terms.sort();
        let mut kinds: BTreeMap<i32, TermType> = BTreeMap::new();
        for t in &terms {
            if let Some(prev) = kinds.insert(t.scale_exp, t.ty()) {
                if prev != t.ty() {
                    return Err(Error::IllegalSymbol(format!(
                        "scale 2^{} mixes 1-dimensional terms with even planes",
                        t.scale_exp
                    )));
                }
            }
        }
        Ok(FineSymbol { terms })
    }

    pub fn terms(&self) -> &[FineTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> u32 {
        self.terms.iter().map(FineTerm::dim).sum()
    }

    /// Concatenation, i.e. orthogonal direct sum.
    pub fn direct_sum(&self, other: &FineSymbol) -> Result<FineSymbol> {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        FineSymbol::new(terms)
    }
}

impl fmt::Display for FineSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Fine symbol of a nondegenerate Gram matrix.
pub fn fine_symbol_of<T: Scalar>(g: &GramMatrix<T>) -> Result<FineSymbol> {
    let mut by_scale: BTreeMap<i32, Vec<FineTerm>> = BTreeMap::new();
    for b in jordan_split(g)? {
        let class = classify_unimodular_block(&b.unimodular())?;
        let kind = match class.oddity {
            Some(t) => FineKind::Odd(Unit8::try_from(t)?),
            None => FineKind::Even(class.sign),
        };
        by_scale.entry(b.scale_exp).or_default().push(FineTerm {
            scale_exp: b.scale_exp,
            kind,
        });
    }
    let mut terms = Vec::new();
    for (e, group) in by_scale {
        let has_odd = group.iter().any(|t| t.ty() == TermType::I);
        let has_even = group.iter().any(|t| t.ty() == TermType::II);
        if has_odd && has_even {
            let n: u32 = group.iter().map(FineTerm::dim).sum();
            let sign = Sign::product(group.iter().map(FineTerm::sign));
            let oddity = Mod8::sum(group.iter().filter_map(|t| t.unit().map(Mod8::from)));
            terms.extend(
                choose_fine_units(n, sign, oddity)?
                    .into_iter()
                    .map(|u| FineTerm::odd(e, u)),
            );
        } else {
            terms.extend(group);
        }
    }
    FineSymbol::new(terms)
}

/// Units `t_1..t_n` with `Σ t ≡ oddity` and `Π (t/2) = sign`.
///
/// Deterministic: the sorted sequence is lexicographically smallest in the
/// order `1 < 7 < 3 < 5`.
pub fn choose_fine_units(n: u32, sign: Sign, oddity: Mod8) -> Result<Vec<Unit8>> {
    let legal = JordanConstituent::odd(0, n, sign, oddity);
    if n == 0 || !is_legal_term(&legal) {
        return Err(Error::IllegalSymbol(format!(
            "no unimodular lattice of dimension {n}, sign {sign}, oddity {oddity}"
        )));
    }
    // counts of 1, 7, 3, 5: more leading ones first, then sevens, then threes.
    for c1 in (0..=n).rev() {
        for c7 in (0..=n - c1).rev() {
            for c3 in (0..=n - c1 - c7).rev() {
                let c5 = n - c1 - c7 - c3;
                let sum = Mod8::new(c1 as i64 + 7 * c7 as i64 + 3 * c3 as i64 + 5 * c5 as i64);
                if sum == oddity && Sign::from_parity((c3 + c5) as usize) == sign {
                    let mut out = Vec::with_capacity(n as usize);
                    out.extend(std::iter::repeat_n(Unit8::ONE, c1 as usize));
                    out.extend(std::iter::repeat_n(Unit8::SEVEN, c7 as usize));
                    out.extend(std::iter::repeat_n(Unit8::THREE, c3 as usize));
                    out.extend(std::iter::repeat_n(Unit8::FIVE, c5 as usize));
                    return Ok(out);
                }
            }
        }
    }
    unreachable!("legal type I triple always has a unit assignment")
}

/// Block-diagonal representative of a fine symbol.
pub fn gram_of<T: Scalar>(f: &FineSymbol) -> Result<GramMatrix<T>> {
    if f.is_empty() {
        return Err(Error::Shape {
            expected: 1,
            got: 0,
        });
    }
    let blocks = f
        .terms()
        .iter()
        .map(|t| {
            let q = T::pow2(t.scale_exp);
            match t.kind {
                FineKind::Odd(u) => GramMatrix::new(1, vec![q * T::from_int(u.value() as i64)]),
                FineKind::Even(s) => {
                    let d = match s {
                        Sign::Plus => 0,
                        Sign::Minus => 2,
                    };
                    GramMatrix::from_int_rows(&[&[d, 1], &[1, d]]).map(|b| b.scaled(&q))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GramMatrix::block_diagonal(&blocks)
}
