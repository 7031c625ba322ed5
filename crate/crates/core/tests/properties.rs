use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoadic::oracle::{random_fine_symbol, random_symbol};
use twoadic::{
    canonical_form, delta, dual, fine_sign_walk, fine_to_jordan, from_invariants, giver_convert,
    giver_permute, invariant_vector, jordan_to_2adic, legal_deltas, parse, print, scale_by_two,
    signways, total_invariants, FineSymbol, GiverReceiver, TwoAdicSymbol, WalkCase,
};

fn symbol(seed: u64, dim: u32, lo: i32, hi: i32) -> TwoAdicSymbol {
    random_symbol(&mut ChaCha8Rng::seed_from_u64(seed), dim, lo, hi)
}

fn random_walk(s: &TwoAdicSymbol, seed: u64, steps: usize) -> TwoAdicSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = s.clone();
    for _ in 0..steps {
        let moves = legal_deltas(&cur);
        if moves.is_empty() {
            break;
        }
        cur = delta(&cur, moves[rng.gen_range(0..moves.len())]).unwrap();
    }
    cur
}

/// Every fine move applicable to `f`, with a flag marking jumps.
fn fine_moves(f: &FineSymbol) -> Vec<(bool, FineSymbol)> {
    let n = f.terms().len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for case in [
                WalkCase::SameScale,
                WalkCase::MixedNeighbors,
                WalkCase::AlikeNeighbors,
                WalkCase::Jump,
            ] {
                out.extend(
                    fine_sign_walk(f, a, b, case)
                        .ok()
                        .map(|g| (case == WalkCase::Jump, g)),
                );
            }
            out.extend(giver_permute(f, a, b).ok().map(|g| (false, g)));
        }
    }
    let odd: Vec<usize> = (0..n).filter(|&i| f.terms()[i].unit().is_some()).collect();
    for w in odd.windows(4) {
        out.extend(
            giver_convert(f, [w[0], w[1], w[2], w[3]])
                .ok()
                .map(|g| (false, g)),
        );
    }
    out
}

fn project(f: &FineSymbol) -> TwoAdicSymbol {
    jordan_to_2adic(&fine_to_jordan(f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(seed: u64, dim in 1u32..10, lo in -3i32..3, span in 0i32..6) {
        let s = symbol(seed, dim, lo, lo + span);
        let text = print(&s);
        prop_assert_eq!(parse(&text).unwrap(), s.clone());
        prop_assert_eq!(print(&parse(&text).unwrap()), text);
    }

    #[test]
    fn walks_preserve_invariants(seed: u64, walk: u64, dim in 1u32..9, span in 0i32..6, steps in 0usize..7) {
        let s = symbol(seed, dim, 0, span);
        let t = random_walk(&s, walk, steps);
        prop_assert_eq!(s.total_invariants(), t.total_invariants());
        let profile = |x: &TwoAdicSymbol| x.terms().iter().map(|t| (t.scale_exp, t.dim, t.ty)).collect::<Vec<_>>();
        prop_assert_eq!(profile(&s), profile(&t));
        prop_assert_eq!(signways(&s), signways(&t));
        prop_assert_eq!(invariant_vector(&s), invariant_vector(&t));
        let c = canonical_form(&s);
        prop_assert_eq!(canonical_form(&t), c.clone());
        prop_assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn invariants_rebuild_the_canonical_form(seed: u64, dim in 1u32..9, span in 0i32..6) {
        let s = symbol(seed, dim, 0, span);
        prop_assert_eq!(from_invariants(&invariant_vector(&s)).unwrap(), canonical_form(&s));
    }

    #[test]
    fn canonical_signs_sit_on_signway_heads(seed: u64, dim in 1u32..9, span in 0i32..6) {
        let s = symbol(seed, dim, 0, span);
        let c = canonical_form(&s);
        let heads: Vec<i32> = signways(&c).heads().collect();
        for t in c.terms() {
            if !heads.contains(&t.scale_exp) {
                prop_assert_eq!(t.sign, twoadic::Sign::Plus);
            }
        }
    }

    #[test]
    fn fine_moves_project_to_walks(seed: u64, dim in 1u32..7, span in 0i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fine_symbol(&mut rng, dim, 0, span);
        let s = project(&f);
        let mut neighbors = vec![s.clone()];
        neighbors.extend(legal_deltas(&s).into_iter().map(|m| delta(&s, m).unwrap()));
        for (jump, g) in fine_moves(&f) {
            prop_assert_eq!(total_invariants(&g), total_invariants(&f));
            let p = project(&g);
            if neighbors.contains(&p) {
                continue;
            }
            // A jump over an occupied scale is the two walks through it.
            prop_assert!(jump, "{} -> {} is not a single walk of {}", f, g, s);
            let two_steps = legal_deltas(&s).into_iter().any(|m| {
                let once = delta(&s, m).unwrap();
                legal_deltas(&once).into_iter().any(|n| delta(&once, n).unwrap() == p)
            });
            prop_assert!(two_steps, "{} -> {} is not two walks of {}", f, g, s);
        }
    }

    #[test]
    fn dual_and_scaling_laws(seed: u64, dim in 1u32..8, k in -4i32..5) {
        let s = symbol(seed, dim, -2, 3);
        prop_assert_eq!(dual(&dual(&s)), s.clone());
        prop_assert_eq!(dual(&scale_by_two(&s, k)), scale_by_two(&dual(&s), -k));
        prop_assert_eq!(scale_by_two(&scale_by_two(&s, k), -k), s.clone());
        prop_assert_eq!(parse(&print(&dual(&s))).unwrap(), dual(&s));
    }
}

#[test]
fn giver_status_matches_residues() {
    use twoadic::Unit8;
    assert_eq!(GiverReceiver::of(Unit8::ONE), GiverReceiver::Giver);
    assert_eq!(GiverReceiver::of(Unit8::FIVE), GiverReceiver::Giver);
    assert_eq!(GiverReceiver::of(Unit8::SEVEN), GiverReceiver::Receiver);
    assert_eq!(GiverReceiver::of(Unit8::THREE), GiverReceiver::Receiver);
}
