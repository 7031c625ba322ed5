//! Signways, canonical forms and the isometry decision.
//!
//! Signs of a 2-adic symbol can only move along legal sign walks. The
//! connected components of the walk graph are the signways; within one
//! signway every sign pattern with the same product is reachable, so the
//! canonical form pushes all minus signs onto the smallest scale of each
//! signway, where they cancel in pairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::decompose::TermType;
use crate::error::Result;
use crate::gram::GramMatrix;
use crate::moves::{delta, legal_deltas, DeltaMove};
use crate::padic::{Mod8, Scalar, Sign};
use crate::symbols::{two_adic_symbol_of, Compartment, Term, TwoAdicSymbol};

/// The occupied scales of a symbol grouped into signways, each ascending,
/// ordered by their smallest scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignwayPartition {
    pub signways: Vec<Vec<i32>>,
}

impl SignwayPartition {
    pub fn heads(&self) -> impl Iterator<Item = i32> + '_ {
        self.signways.iter().map(|w| w[0])
    }

    pub fn signway_of(&self, scale_exp: i32) -> Option<usize> {
        self.signways.iter().position(|w| w.contains(&scale_exp))
    }
}

pub fn signways(s: &TwoAdicSymbol) -> SignwayPartition {
    let scales: Vec<i32> = s.terms().iter().map(|t| t.scale_exp).collect();
    let mut parent: Vec<usize> = (0..scales.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut x = x;
        while parent[x] != root {
            let next = parent[x];
            parent[x] = root;
            x = next;
        }
        root
    }
    for m in legal_deltas(s) {
        let a = find(&mut parent, s.term_index(m.i).expect("occupied"));
        let b = find(&mut parent, s.term_index(m.j).expect("occupied"));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: BTreeMap<usize, Vec<i32>> = BTreeMap::new();
    for (k, &scale) in scales.iter().enumerate() {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(scale);
    }
    SignwayPartition {
        signways: groups.into_values().collect(),
    }
}

/// The sign walks that carry `s` to its canonical form, ascending.
pub fn canonical_moves(s: &TwoAdicSymbol) -> Vec<DeltaMove> {
    let partition = signways(s);
    let edges = legal_deltas(s);
    let mut neighbors: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for m in &edges {
        neighbors.entry(m.i).or_default().push(m.j);
        neighbors.entry(m.j).or_default().push(m.i);
    }
    let sign_at = |e: i32| s.term_at(e).expect("occupied").sign;
    let mut used: BTreeSet<DeltaMove> = BTreeSet::new();
    for way in &partition.signways {
        let head = way[0];
        let mut parent: BTreeMap<i32, i32> = BTreeMap::new();
        let mut queue = VecDeque::from([head]);
        while let Some(x) = queue.pop_front() {
            for &y in neighbors.get(&x).into_iter().flatten() {
                if y != head && !parent.contains_key(&y) {
                    parent.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        for &x in &way[1..] {
            if sign_at(x) == Sign::Plus {
                continue;
            }
            let mut node = x;
            while node != head {
                let up = parent[&node];
                let m = DeltaMove::new(node, up);
                if !used.remove(&m) {
                    used.insert(m);
                }
                node = up;
            }
        }
    }
    used.into_iter().collect()
}

/// The unique symbol in the sign-walk orbit of `s` whose minus signs sit
/// only on signway heads.
pub fn canonical_form(s: &TwoAdicSymbol) -> TwoAdicSymbol {
    canonical_moves(s).into_iter().fold(s.clone(), |acc, m| {
        delta(&acc, m).expect("walk edges stay legal")
    })
}

pub fn isometric_symbols(a: &TwoAdicSymbol, b: &TwoAdicSymbol) -> bool {
    canonical_form(a) == canonical_form(b)
}

/// Decide 2-adic isometry of two nondegenerate forms.
pub fn isometric_grams<T: Scalar>(a: &GramMatrix<T>, b: &GramMatrix<T>) -> Result<bool> {
    Ok(isometric_symbols(
        &two_adic_symbol_of(a)?,
        &two_adic_symbol_of(b)?,
    ))
}

/// Dimension and type of the term at one scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScaleProfile {
    pub scale_exp: i32,
    pub dim: u32,
    pub ty: TermType,
}

/// Numbers that are constant on a sign-walk orbit and pin down its
/// canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantVector {
    pub profile: Vec<ScaleProfile>,
    /// One per compartment, in scale order.
    pub adjusted_oddities: Vec<Mod8>,
    /// One per signway, ordered by head.
    pub signway_signs: Vec<Sign>,
}

/// Oddity plus 4 for each minus sign in an odd position of the compartment,
/// where every minus sign at a larger scale counts as sitting in the
/// position just past the compartment.
pub fn adjusted_oddity(s: &TwoAdicSymbol, compartment: usize) -> Mod8 {
    let c = &s.compartments()[compartment];
    let members = &s.terms()[c.range.clone()];
    let inside = members
        .iter()
        .step_by(2)
        .filter(|t| t.sign == Sign::Minus)
        .count();
    let after = if members.len().is_multiple_of(2) {
        s.terms()[c.range.end..]
            .iter()
            .filter(|t| t.sign == Sign::Minus)
            .count()
    } else {
        0
    };
    c.oddity + Mod8::FOUR * ((inside + after) % 2) as u8
}

pub fn invariant_vector(s: &TwoAdicSymbol) -> InvariantVector {
    let profile = s
        .terms()
        .iter()
        .map(|t| ScaleProfile {
            scale_exp: t.scale_exp,
            dim: t.dim,
            ty: t.ty,
        })
        .collect();
    let adjusted_oddities = (0..s.compartments().len())
        .map(|c| adjusted_oddity(s, c))
        .collect();
    let signway_signs = signways(s)
        .signways
        .iter()
        .map(|w| Sign::product(w.iter().map(|&e| s.term_at(e).expect("occupied").sign)))
        .collect();
    InvariantVector {
        profile,
        adjusted_oddities,
        signway_signs,
    }
}

/// The canonical symbol with the given invariants, if one exists.
pub fn from_invariants(v: &InvariantVector) -> Result<TwoAdicSymbol> {
    use crate::error::Error;
    let mut terms: Vec<Term> = v
        .profile
        .iter()
        .map(|p| Term {
            scale_exp: p.scale_exp,
            dim: p.dim,
            sign: Sign::Plus,
            ty: p.ty,
        })
        .collect();
    // Walk legality only depends on oddities mod 4, which adjusting keeps.
    let runs = crate::symbols::compartment_runs(
        &terms
            .iter()
            .map(|t| (t.scale_exp, t.ty))
            .collect::<Vec<_>>(),
    );
    if runs.len() != v.adjusted_oddities.len() {
        return Err(Error::IllegalSymbol(format!(
            "{} compartments but {} adjusted oddities",
            runs.len(),
            v.adjusted_oddities.len()
        )));
    }
    let provisional = TwoAdicSymbol::from_parts_unchecked(
        terms.clone(),
        runs.iter()
            .zip(&v.adjusted_oddities)
            .map(|(r, &oddity)| Compartment {
                range: r.clone(),
                oddity,
            })
            .collect(),
    );
    let partition = signways(&provisional);
    if partition.signways.len() != v.signway_signs.len() {
        return Err(Error::IllegalSymbol(format!(
            "{} signways but {} signway signs",
            partition.signways.len(),
            v.signway_signs.len()
        )));
    }
    for (head, &sign) in partition.heads().zip(&v.signway_signs) {
        let k = provisional.term_index(head).expect("occupied");
        terms[k].sign = sign;
    }
    let signed =
        TwoAdicSymbol::from_parts_unchecked(terms.clone(), provisional.compartments().to_vec());
    // adjusted_oddity is affine in the oddity, so read off the correction.
    let oddities = (0..runs.len())
        .map(|c| {
            let correction = adjusted_oddity(&signed, c) - signed.compartments()[c].oddity;
            v.adjusted_oddities[c] - correction
        })
        .collect();
    TwoAdicSymbol::new(terms, oddities)
}
