//! Brute-force isometry testing at finite 2-adic precision, and seeded
//! random lattices.
//!
//! The oracle knows nothing about symbols. It searches for a change of basis
//! `X` with odd determinant and `Xᵀ G1 X ≡ G2 (mod 2^k)`, one column at a
//! time and one bit at a time, rejecting partial columns as soon as an inner
//! product is wrong modulo the bits already fixed.
//!
//! Precision is capped at `t + 3`, where `2^t G2⁻¹` is integral. Write the
//! error as `XᵀG1X - G2 = U + Uᵀ`. If off-diagonal entries agree modulo
//! `2^(t+2)` and diagonal ones modulo `2^(t+3)`, then `U ≡ 0 (mod 2^(t+2))`
//! and the Newton step `X ↦ X (I - B⁻¹ U)` squares the error away, so an
//! exact 2-adic isometry exists. The search therefore fixes columns only
//! modulo `2^(t+2)`, and one Newton step turns the result into a witness
//! modulo `2^(t+3)`.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decompose::{gram_of, FineSymbol, FineTerm, TermType};
use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::padic::{Scalar, Sign, Unit8};
use crate::symbols::{fine_to_jordan, jordan_to_2adic, TwoAdicSymbol};
use crate::Rational;

/// Work modulo `2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const MAX: u32 = 62;

    pub fn new(k: u32) -> Result<Precision> {
        if (1..=Self::MAX).contains(&k) {
            Ok(Precision(k))
        } else {
            Err(Error::Precision(k))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `val2(det G) + 3`, the conclusive precision for `g`.
    pub fn for_gram<T: Scalar>(g: &GramMatrix<T>) -> Result<Precision> {
        let det = g.determinant();
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let v = det.val2()?;
        Precision::new(u32::try_from(v.max(0) + 3).map_err(|_| Error::Precision(u32::MAX))?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleAnswer {
    Isometric,
    NotIsometric,
    /// The randomized search ran out of budget.
    Unknown,
}

/// Outcome of a search, with the witness when one was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub answer: OracleAnswer,
    /// Row-major `X` modulo `2^precision_used` with `Xᵀ G1 X ≡ G2`.
    pub witness: Option<Vec<u64>>,
    /// Precision actually searched (after scaling out common powers of 2
    /// and capping at the lifting bound).
    pub precision_used: u32,
    pub exhaustive: bool,
}

/// How hard to search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest effective precision searched exhaustively, indexed by dimension.
    pub exhaustive_up_to: [u32; 4],
    /// Node budget for the randomized search, split across partitions.
    pub budget: u64,
    pub seed: u64,
    /// Answer "not isometric" without searching when the determinants
    /// differ by more than an odd square (only at the lifting bound).
    pub determinant_filter: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            exhaustive_up_to: [0, 62, 10, 7],
            budget: 5_000_000,
            seed: 0x2adc,
            determinant_filter: true,
        }
    }
}

impl OracleConfig {
    fn exhaustive(&self, dim: usize, k: u32) -> bool {
        dim < self.exhaustive_up_to.len() && k <= self.exhaustive_up_to[dim]
    }
}

pub fn isometric_mod<T: Scalar>(
    g1: &GramMatrix<T>,
    g2: &GramMatrix<T>,
    k: Precision,
) -> Result<OracleReport> {
    isometric_mod_with(g1, g2, k, &OracleConfig::default())
}

/// Convenience: search at `val2(det G1) + 3`.
pub fn isometric<T: Scalar>(g1: &GramMatrix<T>, g2: &GramMatrix<T>) -> Result<OracleReport> {
    isometric_mod(g1, g2, Precision::for_gram(g1)?)
}

pub fn isometric_mod_with<T: Scalar>(
    g1: &GramMatrix<T>,
    g2: &GramMatrix<T>,
    k: Precision,
    config: &OracleConfig,
) -> Result<OracleReport> {
    let n = g1.dim();
    if g2.dim() != n {
        return Err(Error::DimensionMismatch(n, g2.dim()));
    }
    for x in g1.entries().iter().chain(g2.entries()) {
        if !x.is_zero() && x.residue_mod_pow2(1).is_none() {
            return Err(Error::NotIntegral(x.to_string()));
        }
    }
    // Common powers of 2 scale out of both sides exactly.
    let shift = g1
        .entries()
        .iter()
        .chain(g2.entries())
        .filter(|x| !x.is_zero())
        .map(|x| x.val2().expect("nonzero"))
        .min()
        .unwrap_or(0)
        .clamp(0, k.bits() as i64 - 1) as i32;
    let (g1, g2) = (g1.scaled(&T::pow2(-shift)), g2.scaled(&T::pow2(-shift)));
    let mut bits = k.bits() - shift as u32;
    let inverse = inverse(&g2);
    let capped = match &inverse {
        Some((_, t)) if bits >= t + 3 => {
            bits = t + 3;
            true
        }
        _ => false,
    };
    // An exact isometry scales the determinant by an odd square.
    if capped && config.determinant_filter && !same_square_class(&g1, &g2) {
        return Ok(OracleReport {
            answer: OracleAnswer::NotIsometric,
            witness: None,
            precision_used: bits,
            exhaustive: true,
        });
    }
    let lin_bits = if capped { bits - 1 } else { bits };
    let exhaustive = config.exhaustive(n, lin_bits);
    let mask = low_mask(bits);
    let residues = |g: &GramMatrix<T>| -> Vec<u64> {
        g.entries()
            .iter()
            .map(|x| x.residue_mod_pow2(bits).expect("checked integral") & mask)
            .collect()
    };
    let problem = Problem {
        n,
        bits: lin_bits,
        diag_bits: bits,
        a: residues(&g1),
        b: residues(&g2),
    };
    let (answer, mut witness) = problem.solve(exhaustive, config);
    if capped {
        let (b_inv, _) = inverse.as_ref().expect("capped implies invertible");
        witness = witness.map(|x| newton_step(&g1, &g2, b_inv, &x, bits));
    }
    Ok(OracleReport {
        answer,
        witness,
        precision_used: bits,
        exhaustive,
    })
}

fn same_square_class<T: Scalar>(g1: &GramMatrix<T>, g2: &GramMatrix<T>) -> bool {
    let (d1, d2) = (g1.determinant(), g2.determinant());
    if d1.is_zero() || d2.is_zero() {
        return d1.is_zero() && d2.is_zero();
    }
    (d2 / d1).residue_mod_pow2(3).is_some_and(|r| r & 7 == 1)
}

/// `X (I - B⁻¹ U)` modulo `2^bits`, where `XᵀAX - B = U + Uᵀ` with `U`
/// upper triangular.
fn newton_step<T: Scalar>(
    a: &GramMatrix<T>,
    b: &GramMatrix<T>,
    b_inv: &[Vec<T>],
    x: &[u64],
    bits: u32,
) -> Vec<u64> {
    let n = a.dim();
    let p: Vec<T> = x.iter().map(|&v| T::from_int(v as i64)).collect();
    let lhs = a.congruent(&p).expect("square witness");
    let two = T::from_int(2);
    let u = |i: usize, j: usize| -> T {
        let d = lhs.get(i, j).clone() - b.get(i, j).clone();
        match i.cmp(&j) {
            std::cmp::Ordering::Less => d,
            std::cmp::Ordering::Equal => d / two.clone(),
            std::cmp::Ordering::Greater => T::zero(),
        }
    };
    // M = I - B⁻¹ U
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = if i == j { T::one() } else { T::zero() };
            for k in 0..n {
                acc = acc - b_inv[i][k].clone() * u(k, j);
            }
            m[i * n + j] = acc;
        }
    }
    let mask = low_mask(bits);
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + p[i * n + k].clone() * m[k * n + j].clone();
            }
            out[i * n + j] = acc
                .residue_mod_pow2(bits)
                .expect("Newton step stays integral")
                & mask;
        }
    }
    out
}

/// Smallest `t ≥ 0` with `2^t G⁻¹` integral, or `None` when singular.
#[cfg(test)]
fn inverse_bound<T: Scalar>(g: &GramMatrix<T>) -> Option<u32> {
    inverse(g).map(|(_, t)| t)
}

/// `G⁻¹` together with its bound `t`.
fn inverse<T: Scalar>(g: &GramMatrix<T>) -> Option<(Vec<Vec<T>>, u32)> {
    let n = g.dim();
    // Gauss-Jordan on [G | I].
    let mut a: Vec<Vec<T>> = g.rows().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let (x, y) = (a[col][j].clone(), inv[col][j].clone());
                a[r][j] = a[r][j].clone() - f.clone() * x;
                inv[r][j] = inv[r][j].clone() - f.clone() * y;
            }
        }
    }
    let worst = inv
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .map(|x| x.val2().expect("nonzero"))
        .min()?;
    let t = u32::try_from((-worst).max(0)).ok()?;
    Some((inv, t))
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

struct Problem {
    n: usize,
    /// Columns are fixed modulo `2^bits`, as are inner products.
    bits: u32,
    /// Norms are checked modulo `2^diag_bits`.
    diag_bits: u32,
    a: Vec<u64>,
    b: Vec<u64>,
}

enum Search {
    Found,
    NotFound,
    OutOfBudget,
}

struct Walker<'p> {
    p: &'p Problem,
    /// Completed columns.
    cols: Vec<Vec<u64>>,
    /// `x_cᵀ A` for each completed column.
    rows: Vec<Vec<u64>>,
    /// Completed columns mod 2, as bit masks, kept in echelon form.
    basis: Vec<u64>,
    budget: Option<u64>,
    rng: Option<ChaCha8Rng>,
    stop: &'p AtomicBool,
}

impl Problem {
    fn solve(&self, exhaustive: bool, config: &OracleConfig) -> (OracleAnswer, Option<Vec<u64>>) {
        let n = self.n;
        // Partition on the first column mod 2; merge by disjunction.
        let starts: Vec<u64> = (1..1u64 << n).collect();
        let share = (config.budget / starts.len() as u64).max(1);
        let stop = AtomicBool::new(false);
        let results: Vec<(Search, Option<Vec<u64>>)> = starts
            .par_iter()
            .map(|&low| {
                let mut w = Walker {
                    p: self,
                    cols: Vec::new(),
                    rows: Vec::new(),
                    basis: Vec::new(),
                    budget: (!exhaustive).then_some(share),
                    rng: (!exhaustive).then(|| ChaCha8Rng::seed_from_u64(config.seed ^ low)),
                    stop: &stop,
                };
                let x: Vec<u64> = (0..n).map(|i| (low >> i) & 1).collect();
                let r = w.column_from_low_bits(x);
                if matches!(r, Search::Found) {
                    stop.store(true, Ordering::Relaxed);
                    let mut witness = vec![0; n * n];
                    for (c, col) in w.cols.iter().enumerate() {
                        for (i, &v) in col.iter().enumerate() {
                            witness[i * n + c] = v;
                        }
                    }
                    (r, Some(witness))
                } else {
                    (r, None)
                }
            })
            .collect();
        if let Some((_, w)) = results.iter().find(|(r, _)| matches!(r, Search::Found)) {
            return (OracleAnswer::Isometric, w.clone());
        }
        if results
            .iter()
            .any(|(r, _)| matches!(r, Search::OutOfBudget))
        {
            (OracleAnswer::Unknown, None)
        } else {
            (OracleAnswer::NotIsometric, None)
        }
    }

    fn mask(&self, bits: u32) -> u64 {
        low_mask(bits.min(self.bits))
    }

    fn dot(&self, row: &[u64], x: &[u64]) -> u64 {
        row.iter()
            .zip(x)
            .fold(0u64, |acc, (&r, &v)| acc.wrapping_add(r.wrapping_mul(v)))
    }

    fn norm(&self, x: &[u64]) -> u64 {
        let n = self.n;
        let mut acc = 0u64;
        for i in 0..n {
            let mut s = 0u64;
            for j in 0..n {
                s = s.wrapping_add(self.a[i * n + j].wrapping_mul(x[j]));
            }
            acc = acc.wrapping_add(x[i].wrapping_mul(s));
        }
        acc
    }

    fn row_of(&self, x: &[u64]) -> Vec<u64> {
        let n = self.n;
        (0..n)
            .map(|j| {
                (0..n).fold(0u64, |acc, i| {
                    acc.wrapping_add(x[i].wrapping_mul(self.a[i * n + j]))
                })
            })
            .collect()
    }
}

fn reduce(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        let top = 63 - b.leading_zeros();
        if v >> top & 1 == 1 {
            v ^= b;
        }
    }
    v
}

fn insert(basis: &mut Vec<u64>, v: u64) {
    let v = reduce(basis, v);
    basis.push(v);
    basis.sort_by_key(|b| std::cmp::Reverse(*b));
}

impl Walker<'_> {
    fn tick(&mut self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        match &mut self.budget {
            Some(0) => false,
            Some(b) => {
                *b -= 1;
                true
            }
            None => true,
        }
    }

    /// `x` holds the column fixed modulo 2; check it and lift.
    fn column_from_low_bits(&mut self, x: Vec<u64>) -> Search {
        let low = x
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &v)| m | (v & 1) << i);
        if low == 0 || reduce(&self.basis, low) == 0 || !self.consistent(&x, 1) {
            return Search::NotFound;
        }
        self.lift(x, 1)
    }

    /// The current column mod `2^j` is consistent with every constraint
    /// visible at that precision.
    fn consistent(&self, x: &[u64], j: u32) -> bool {
        let p = self.p;
        let c = self.cols.len();
        let n = p.n;
        let lin = p.mask(j);
        for (a, row) in self.rows.iter().enumerate() {
            if (p.dot(row, x) ^ p.b[a * n + c]) & lin != 0 {
                return false;
            }
        }
        let sq = low_mask((j + 1).min(p.diag_bits));
        (p.norm(x) ^ p.b[c * n + c]) & sq == 0
    }

    fn lift(&mut self, x: Vec<u64>, j: u32) -> Search {
        if !self.tick() {
            return Search::OutOfBudget;
        }
        let p = self.p;
        if j == p.bits {
            return self.next_column(x);
        }
        let n = p.n;
        let mut choices: Vec<u64> = (0..1u64 << n).collect();
        if let Some(rng) = &mut self.rng {
            choices.shuffle(rng);
        }
        let mut out_of_budget = false;
        for bitsel in choices {
            let y: Vec<u64> = (0..n).map(|i| x[i] | ((bitsel >> i) & 1) << j).collect();
            if !self.consistent(&y, j + 1) {
                continue;
            }
            match self.lift(y, j + 1) {
                Search::Found => return Search::Found,
                Search::NotFound => {}
                Search::OutOfBudget => {
                    out_of_budget = true;
                    break;
                }
            }
        }
        if out_of_budget {
            Search::OutOfBudget
        } else {
            Search::NotFound
        }
    }

    fn next_column(&mut self, x: Vec<u64>) -> Search {
        let p = self.p;
        let n = p.n;
        let low = x
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &v)| m | (v & 1) << i);
        let row = p.row_of(&x);
        let saved = self.basis.clone();
        insert(&mut self.basis, low);
        self.cols.push(x);
        self.rows.push(row);
        if self.cols.len() == n {
            return Search::Found;
        }
        let mut starts: Vec<u64> = (1..1u64 << n).collect();
        if let Some(rng) = &mut self.rng {
            starts.shuffle(rng);
        }
        let mut result = Search::NotFound;
        for low in starts {
            let y: Vec<u64> = (0..n).map(|i| (low >> i) & 1).collect();
            match self.column_from_low_bits(y) {
                Search::NotFound => {}
                other => {
                    result = other;
                    break;
                }
            }
        }
        if !matches!(result, Search::Found) {
            self.cols.pop();
            self.rows.pop();
            self.basis = saved;
        }
        result
    }
}

/// Check `Xᵀ G1 X ≡ G2 (mod 2^bits)` and `det X` odd for a witness.
pub fn verify_witness<T: Scalar>(
    g1: &GramMatrix<T>,
    g2: &GramMatrix<T>,
    x: &[u64],
    bits: u32,
) -> bool {
    let n = g1.dim();
    if x.len() != n * n {
        return false;
    }
    let p: Vec<T> = x.iter().map(|&v| T::from_int(v as i64)).collect();
    let Ok(lhs) = g1.congruent(&p) else {
        return false;
    };
    let modulus = T::pow2(bits as i32);
    let det = nonsymmetric_det(&p, n);
    let odd = !det.is_zero() && det.val2().map(|v| v == 0).unwrap_or(false);
    odd && lhs.entries().iter().zip(g2.entries()).all(|(l, r)| {
        let d = l.clone() - r.clone();
        d.is_zero() || (d / modulus.clone()).residue_mod_pow2(1).is_some()
    })
}

fn nonsymmetric_det<T: Scalar>(p: &[T], n: usize) -> T {
    // `GramMatrix::determinant` needs a symmetric matrix.
    let mut a = p.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
            return T::zero();
        };
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let pv = a[col * n + col].clone();
        det = det * pv.clone();
        for r in col + 1..n {
            let f = a[r * n + col].clone() / pv.clone();
            for k in col..n {
                let v = a[col * n + k].clone();
                a[r * n + k] = a[r * n + k].clone() - f.clone() * v;
            }
        }
    }
    det
}

/// A random legal fine symbol of dimension `dim` with scales in
/// `[min_scale_exp, max_scale_exp]`.
pub fn random_fine_symbol<R: Rng>(
    rng: &mut R,
    dim: u32,
    min_scale_exp: i32,
    max_scale_exp: i32,
) -> FineSymbol {
    'restart: loop {
        let mut layout: Vec<(i32, TermType)> = Vec::new();
        let mut left = dim;
        while left > 0 {
            let e = rng.gen_range(min_scale_exp..=max_scale_exp);
            let ty = match layout.iter().find(|(s, _)| *s == e) {
                Some(&(_, ty)) => ty,
                None if left >= 2 && rng.gen_bool(0.35) => TermType::II,
                None => TermType::I,
            };
            if ty == TermType::II && left < 2 {
                // Every scale may already hold planes; then start over.
                let open = (min_scale_exp..=max_scale_exp)
                    .any(|s| layout.iter().all(|&(x, t)| x != s || t == TermType::I));
                if !open {
                    continue 'restart;
                }
                continue;
            }
            left -= if ty == TermType::II { 2 } else { 1 };
            layout.push((e, ty));
        }
        return fill_layout(rng, &layout);
    }
}

fn fill_layout<R: Rng>(rng: &mut R, layout: &[(i32, TermType)]) -> FineSymbol {
    let terms = layout
        .iter()
        .map(|&(e, ty)| match ty {
            TermType::I => FineTerm::odd(e, *Unit8::ALL.choose(rng).expect("nonempty")),
            TermType::II => FineTerm::even(e, if rng.gen() { Sign::Plus } else { Sign::Minus }),
        })
        .collect();
    FineSymbol::new(terms).expect("one kind per scale")
}

/// A random legal 2-adic symbol, via a random fine symbol.
pub fn random_symbol<R: Rng>(
    rng: &mut R,
    dim: u32,
    min_scale_exp: i32,
    max_scale_exp: i32,
) -> TwoAdicSymbol {
    jordan_to_2adic(&fine_to_jordan(&random_fine_symbol(
        rng,
        dim,
        min_scale_exp,
        max_scale_exp,
    )))
}

/// A random integer matrix with determinant ±1 and entries in `[-2, 2]`,
/// row-major.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut m = vec![0i64; n * n];
    for (i, &j) in perm.iter().enumerate() {
        m[i * n + j] = if rng.gen() { 1 } else { -1 };
    }
    if n < 2 {
        return m;
    }
    for _ in 0..4 * n * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let f = if rng.gen() { 1 } else { -1 };
        let row: Vec<i64> = (0..n).map(|k| m[i * n + k] + f * m[j * n + k]).collect();
        if row.iter().all(|v| v.abs() <= 2) {
            m[i * n..(i + 1) * n].copy_from_slice(&row);
        }
    }
    m
}

fn conjugate<R: Rng>(rng: &mut R, g: &GramMatrix<Rational>) -> GramMatrix<Rational> {
    let u: Vec<Rational> = random_unimodular(rng, g.dim())
        .into_iter()
        .map(Rational::from_int)
        .collect();
    g.congruent(&u).expect("square")
}

/// Seeded random nondegenerate lattice: a random block-diagonal form in a
/// random basis.
pub fn random_lattice(
    dim: u32,
    min_scale_exp: i32,
    max_scale_exp: i32,
    seed: u64,
) -> GramMatrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_fine_symbol(&mut rng, dim, min_scale_exp, max_scale_exp);
    conjugate(&mut rng, &gram_of(&f).expect("nonempty"))
}

/// Two seeded random lattices of the same dimension. Three times in four
/// they share the block layout and differ only in units and signs, so that
/// both isometric and near-miss pairs are common.
pub fn random_lattice_pair(
    dim: u32,
    min_scale_exp: i32,
    max_scale_exp: i32,
    seed: u64,
) -> (GramMatrix<Rational>, GramMatrix<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1 = random_fine_symbol(&mut rng, dim, min_scale_exp, max_scale_exp);
    let f2 = if rng.gen_range(0..4) < 3 {
        let layout: Vec<(i32, TermType)> =
            f1.terms().iter().map(|t| (t.scale_exp, t.ty())).collect();
        fill_layout(&mut rng, &layout)
    } else {
        random_fine_symbol(&mut rng, dim, min_scale_exp, max_scale_exp)
    };
    let g1 = conjugate(&mut rng, &gram_of(&f1).expect("nonempty"));
    let g2 = conjugate(&mut rng, &gram_of(&f2).expect("nonempty"));
    (g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::TwoAdic;
    use num_traits::Signed;

    fn d(v: &[i64]) -> GramMatrix<Rational> {
        GramMatrix::diagonal_ints(v).unwrap()
    }

    fn answer(a: &GramMatrix<Rational>, b: &GramMatrix<Rational>, k: u32) -> OracleAnswer {
        let r = isometric_mod(a, b, Precision::new(k).unwrap()).unwrap();
        if let Some(w) = &r.witness {
            assert!(verify_witness(a, b, w, r.precision_used));
        }
        r.answer
    }

    #[test]
    fn small_examples() {
        assert_eq!(answer(&d(&[1, 2]), &d(&[3, 6]), 4), OracleAnswer::Isometric);
        assert_eq!(answer(&d(&[1]), &d(&[3]), 3), OracleAnswer::NotIsometric);
        let h = GramMatrix::from_int_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(answer(&d(&[1, -1]), &h, 4), OracleAnswer::NotIsometric);
        assert_eq!(answer(&d(&[1]), &d(&[9]), 3), OracleAnswer::Isometric);
    }

    #[test]
    fn precision_bounds() {
        assert!(Precision::new(0).is_err());
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::for_gram(&d(&[1, 2])).unwrap().bits(), 4);
        assert_eq!(inverse_bound(&d(&[1, 8])), Some(3));
        assert_eq!(
            inverse_bound(&GramMatrix::<Rational>::from_int_rows(&[&[2, 1], &[1, 2]]).unwrap()),
            Some(0)
        );
    }

    #[test]
    fn rejects_bad_input() {
        let half = GramMatrix::diagonal(&[Rational::new(1.into(), 2.into())]).unwrap();
        assert!(matches!(
            isometric_mod(&half, &d(&[1]), Precision::new(3).unwrap()),
            Err(Error::NotIntegral(_))
        ));
        assert!(matches!(
            isometric_mod(&d(&[1]), &d(&[1, 1]), Precision::new(3).unwrap()),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn odd_denominators_are_integral() {
        let third = GramMatrix::diagonal(&[Rational::new(1.into(), 3.into())]).unwrap();
        assert_eq!(answer(&third, &d(&[3]), 3), OracleAnswer::Isometric);
    }

    #[test]
    fn common_scale_is_removed() {
        let r = isometric_mod(&d(&[4, 8]), &d(&[12, 24]), Precision::new(8).unwrap()).unwrap();
        assert_eq!(r.answer, OracleAnswer::Isometric);
        assert!(r.precision_used <= 4);
    }

    #[test]
    fn reflexive_and_symmetric_on_random_lattices() {
        for seed in 0..20 {
            let (a, b) = random_lattice_pair(2, 0, 2, seed);
            let k = Precision::for_gram(&a).unwrap();
            assert_eq!(
                isometric_mod(&a, &a, k).unwrap().answer,
                OracleAnswer::Isometric
            );
            let ab = isometric_mod(&a, &b, k).unwrap().answer;
            let ba = isometric_mod(&b, &a, k).unwrap().answer;
            assert_eq!(ab, ba, "seed {seed}");
        }
    }

    #[test]
    fn random_lattice_is_deterministic() {
        assert_eq!(random_lattice(3, 0, 2, 42), random_lattice(3, 0, 2, 42));
        let g = random_lattice(1, 0, 0, 7);
        assert_eq!(g.dim(), 1);
        assert_eq!(g.get(0, 0).val2().unwrap(), 0);
    }

    #[test]
    fn unimodular_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let m = random_unimodular(&mut rng, n);
            assert!(m.iter().all(|v| v.abs() <= 2));
            let det = nonsymmetric_det(
                &m.iter().map(|&v| Rational::from_int(v)).collect::<Vec<_>>(),
                n,
            );
            assert_eq!(det.abs(), Rational::from_int(1));
        }
    }
}
