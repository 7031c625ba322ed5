//! Classification of lattices over the 2-adic integers.
//!
//! A lattice is given by a Gram matrix of exact rationals. The pipeline is
//!
//! 1. [`jordan_split`] and [`fine_symbol_of`]: an orthogonal splitting into
//!    scaled 1-dimensional lattices and even planes;
//! 2. [`fine_to_jordan`] and [`jordan_to_2adic`]: the per-scale Jordan symbol
//!    and the 2-adic symbol with fused compartment oddities;
//! 3. [`canonical_form`]: the unique representative of the sign-walk orbit,
//!    so two lattices are isometric exactly when their canonical forms agree.
//!
//! The [`oracle`] module decides isometry independently by searching for a
//! change of basis modulo a power of 2.
//!
//! ```
//! use twoadic::{canonical_form, parse, print};
//!
//! let s = parse("1^2_II [2^-2 4^3]_3 16^1_1").unwrap();
//! assert_eq!(print(&canonical_form(&s)), "1^-2_II [2^2 4^3]_-1 16^1_1");
//! ```

// Matrix code reads better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod canonical;
pub mod decompose;
pub mod error;
pub mod gram;
pub mod moves;
pub mod notation;
pub mod oracle;
pub mod padic;
pub mod symbols;

pub use canonical::{
    adjusted_oddity, canonical_form, canonical_moves, from_invariants, invariant_vector,
    isometric_grams, isometric_symbols, signways, InvariantVector, ScaleProfile, SignwayPartition,
};
pub use decompose::{
    choose_fine_units, classify_unimodular_block, fine_symbol_of, gram_of, jordan_split, FineKind,
    FineSymbol, FineTerm, JordanBlock, TermType, UnimodularClass,
};
pub use error::{Error, Result};
pub use gram::GramMatrix;
pub use moves::{
    can_walk_2adic, delta, fine_sign_walk, giver_convert, giver_permute, legal_deltas, oddity_fuse,
    DeltaMove, GiverReceiver, WalkCase,
};
pub use notation::{
    format_scale, from_json, from_records, parse, parse_jordan, print, print_jordan, to_json,
    to_records, ParseError, TermRecord,
};
pub use oracle::{isometric_mod, OracleAnswer, OracleReport, Precision};
pub use padic::{
    is_antisquare, legendre2, unit_part_mod8, val2, Mod8, Scalar, Sign, TwoAdic, Unit8,
};
pub use symbols::{
    compartment_assignment, compartment_assignment_exists, direct_sum, dual, fine_to_jordan,
    is_legal_term, jordan_to_2adic, jordan_to_fine, legal_oddities, rescale_by_unit, scale_by_two,
    total_invariants, two_adic_symbol_of, Compartment, JordanConstituent, JordanSymbol, Term,
    TotalInvariants, TwoAdicSymbol,
};

/// Exact rational scalar used by default.
pub type Rational = num_rational::BigRational;
/// Gram matrix over [`Rational`].
pub type Gram = GramMatrix<Rational>;
/// Gram matrix over `i64`-backed rationals: faster, panics on overflow.
pub type SmallGram = GramMatrix<num_rational::Rational64>;
