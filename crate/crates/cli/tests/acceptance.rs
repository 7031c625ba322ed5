//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//! Exits nonzero when any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoadic::oracle::{
    isometric_mod, random_lattice_pair, random_symbol, verify_witness, OracleAnswer, Precision,
};
use twoadic::{
    canonical_form, compartment_assignment_exists, delta, invariant_vector, is_legal_term,
    isometric_grams, legal_deltas, parse, print, signways, Error, Gram, JordanConstituent, Mod8,
    Sign, TwoAdicSymbol, Unit8,
};
use twoadic_cli::{run, Exit, GramFile};

const RUNNING: &str = "1^2_II [2^-2 4^3]_3 16^1_1 32^2_II 64^-2_II [128^1 256^1]_0 512^-4_II";
const RUNNING_CANONICAL: &str =
    "1^-2_II [2^2 4^3]_-1 16^1_1 32^2_II 64^-2_II [128^1 256^-1]_4 512^4_II";

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_gram(name: &str, file: &GramFile) -> String {
    let path = tmp_path(name);
    std::fs::write(&path, serde_json::to_string(file).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

/// The running example as an explicit block-diagonal integer Gram matrix.
fn running_example_gram() -> GramFile {
    let hyperbolic = [[0, 1], [1, 0]];
    let anti = [[2, 1], [1, 2]];
    let mut blocks: Vec<(i64, Vec<Vec<i64>>)> =
        vec![(1, hyperbolic.iter().map(|r| r.to_vec()).collect())];
    // 2·<3, 7>: sign -, oddity 2; 4·<1, 1, 7>: sign +, oddity 1.
    for (scale, u) in [(2, 3), (2, 7), (4, 1), (4, 1), (4, 7), (16, 1)] {
        blocks.push((scale, vec![vec![u]]));
    }
    blocks.push((32, hyperbolic.iter().map(|r| r.to_vec()).collect()));
    blocks.push((64, anti.iter().map(|r| r.to_vec()).collect()));
    blocks.push((128, vec![vec![1]]));
    blocks.push((256, vec![vec![7]]));
    blocks.push((512, anti.iter().map(|r| r.to_vec()).collect()));
    blocks.push((512, hyperbolic.iter().map(|r| r.to_vec()).collect()));
    let dim: usize = blocks.iter().map(|(_, b)| b.len()).sum();
    let mut entries = vec![vec![0i64; dim]; dim];
    let mut at = 0;
    for (scale, b) in &blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                entries[at + i][at + j] = scale * v;
            }
        }
        at += b.len();
    }
    GramFile {
        dim,
        entries,
        denom_exp: 0,
    }
}

fn diag(v: &[i64]) -> Gram {
    Gram::diagonal_ints(v).unwrap()
}

fn symbol(seed: u64, dim: u32, lo: i32, hi: i32) -> TwoAdicSymbol {
    random_symbol(&mut ChaCha8Rng::seed_from_u64(seed), dim, lo, hi)
}

fn golden_symbol() -> Check {
    let path = write_gram("running_example.json", &running_example_gram());
    let out = run(["twoadic", "symbol", &path]);
    ensure(out.exit == Exit::Ok, || {
        format!("exit {:?}: {}", out.exit, out.stderr)
    })?;
    let got = out.stdout.trim_end();
    ensure(got == RUNNING, || format!("got {got:?}"))?;
    Ok(format!("dim {} Gram -> {got}", running_example_gram().dim))
}

fn golden_canonical() -> Check {
    let out = run(["twoadic", "canonical", RUNNING]);
    ensure(out.exit == Exit::Ok, || {
        format!("exit {:?}: {}", out.exit, out.stderr)
    })?;
    let got = out.stdout.trim_end();
    ensure(got == RUNNING_CANONICAL, || format!("got {got:?}"))?;
    Ok(got.to_string())
}

fn golden_walks() -> Check {
    let cases = [
        (
            "1",
            "2",
            "1^-2_II [2^2 4^3]_-1 16^1_1 32^2_II 64^-2_II [128^1 256^1]_0 512^-4_II",
        ),
        (
            "2",
            "4",
            "1^2_II [2^2 4^-3]_-1 16^1_1 32^2_II 64^-2_II [128^1 256^1]_0 512^-4_II",
        ),
        (
            "4",
            "16",
            "1^2_II [2^-2 4^-3]_-1 16^-1_-3 32^2_II 64^-2_II [128^1 256^1]_0 512^-4_II",
        ),
    ];
    for (i, j, want) in cases {
        let out = run(["twoadic", "walk", RUNNING, i, j]);
        ensure(out.exit == Exit::Ok, || {
            format!("walk {i} {j}: exit {:?}: {}", out.exit, out.stderr)
        })?;
        ensure(out.stdout.trim_end() == want, || {
            format!("walk {i} {j}: got {:?}", out.stdout.trim_end())
        })?;
        let back = run(["twoadic", "walk", want, i, j]);
        ensure(back.stdout.trim_end() == RUNNING, || {
            format!("walk {i} {j} twice is not the identity")
        })?;
    }
    let bad = run(["twoadic", "walk", RUNNING, "128", "256"]);
    ensure(bad.exit == Exit::Input, || {
        format!("128/256 walk: exit {:?}", bad.exit)
    })?;
    let msg = "no sign walk is possible between the terms of scales 128 and 256";
    ensure(bad.stderr.contains(msg), || {
        format!("128/256 walk: stderr {:?}", bad.stderr)
    })?;
    Ok(format!(
        "3 walks reproduced; rejected: {}",
        bad.stderr.trim_end()
    ))
}

fn isometry_facts() -> Check {
    let pairs: [(&[i64], &[i64]); 6] = [
        (&[1, 2], &[3, 6]),
        (&[1, -6], &[3, -2]),
        (&[1, 3], &[-1, -3]),
        (&[1, -2], &[-1, 2]),
        (&[1, 6], &[-1, 10]),
        (&[1, 1, 1, 1], &[-1, -1, -1, -1]),
    ];
    let mut notes = Vec::new();
    for (a, b) in pairs {
        let (ga, gb) = (diag(a), diag(b));
        ensure(isometric_grams(&ga, &gb) == Ok(true), || {
            format!("{a:?} vs {b:?}: symbols differ")
        })?;
        let k = Precision::for_gram(&ga).map_err(|e| e.to_string())?;
        let report = isometric_mod(&ga, &gb, k).map_err(|e| e.to_string())?;
        ensure(report.answer == OracleAnswer::Isometric, || {
            format!(
                "{a:?} vs {b:?}: oracle says {:?} at k={}",
                report.answer,
                k.bits()
            )
        })?;
        let w = report
            .witness
            .as_ref()
            .ok_or("isometric without a witness")?;
        ensure(verify_witness(&ga, &gb, w, report.precision_used), || {
            format!("{a:?} vs {b:?}: witness fails to verify")
        })?;
        if !report.exhaustive {
            notes.push(format!("dim {} witness by randomized search", a.len()));
        }
    }
    // An explicit orthogonal basis of norm 7 ≡ -1 (mod 8) in <1,1,1,1>.
    let basis: [[i64; 4]; 4] = [[2, 1, 1, 1], [1, -2, 1, -1], [1, -1, -2, 1], [1, 1, -1, -2]];
    let mut x = vec![0u64; 16];
    for (c, v) in basis.iter().enumerate() {
        for (r, &e) in v.iter().enumerate() {
            x[r * 4 + c] = e.rem_euclid(8) as u64;
        }
    }
    ensure(
        verify_witness(&diag(&[1, 1, 1, 1]), &diag(&[-1, -1, -1, -1]), &x, 3),
        || "explicit basis from (2,1,1,1) fails".into(),
    )?;
    notes.push("explicit basis from (2,1,1,1) verified mod 8".into());
    Ok(format!("6 facts confirmed; {}", notes.join("; ")))
}

/// (sign, oddity) pairs realized by sums of `n` odd 1-dimensional forms.
fn realizable(n: u32) -> BTreeSet<(Sign, Mod8)> {
    let mut sums = BTreeSet::from([(Sign::Plus, Mod8::ZERO)]);
    for _ in 0..n {
        sums = sums
            .iter()
            .flat_map(|&(s, t)| {
                Unit8::ALL
                    .into_iter()
                    .map(move |u| (Sign::product([s, u.legendre()]), t + Mod8::from(u)))
            })
            .collect();
    }
    sums
}

fn legality_tables() -> Check {
    let mut checked = 0;
    for n in 0..=4u32 {
        let real = realizable(n);
        for sign in [Sign::Plus, Sign::Minus] {
            for t in Mod8::all() {
                let want = n > 0 && real.contains(&(sign, t));
                let got = is_legal_term(&JordanConstituent::odd(0, n, sign, t));
                ensure(got == want, || {
                    format!("type I n={n} sign={sign} t={t}: got {got}")
                })?;
                checked += 1;
            }
            let want = if n == 0 {
                sign == Sign::Plus
            } else {
                n % 2 == 0
            };
            let got = is_legal_term(&JordanConstituent::even(0, n, sign));
            ensure(got == want, || {
                format!("type II n={n} sign={sign}: got {got}")
            })?;
            checked += 1;
        }
    }
    let mut rejected = Vec::new();
    for s1 in [Sign::Plus, Sign::Minus] {
        for s2 in [Sign::Plus, Sign::Minus] {
            for odd in [0, 4] {
                if !compartment_assignment_exists(&[(1, s1), (1, s2)], Mod8::new(odd)) {
                    rejected.push(format!("[1^{s1}2^{s2}]_{odd}"));
                }
            }
        }
    }
    let want = ["[1^+2^+]_4", "[1^+2^-]_0", "[1^-2^+]_0", "[1^-2^-]_4"];
    ensure(rejected == want, || format!("rejected {rejected:?}"))?;
    Ok(format!(
        "{checked} table entries; rejected {}",
        rejected.join(" ")
    ))
}

fn differential() -> Check {
    let (mut iso, mut distinct, mut exhaustive) = (0, 0, 0);
    for seed in 0..200u64 {
        let dim = 1 + (seed % 3) as u32;
        let (a, b) = random_lattice_pair(dim, 0, 3, seed);
        let by_symbol = isometric_grams(&a, &b).map_err(|e| e.to_string())?;
        let k = Precision::for_gram(&a).map_err(|e| e.to_string())?;
        let report = isometric_mod(&a, &b, k).map_err(|e| e.to_string())?;
        let by_oracle = match report.answer {
            OracleAnswer::Isometric => true,
            OracleAnswer::NotIsometric => false,
            OracleAnswer::Unknown => return Err(format!("seed {seed}: oracle undecided")),
        };
        ensure(by_symbol == by_oracle, || {
            format!("seed {seed}: symbols say {by_symbol}, oracle says {by_oracle}\n{a}\n{b}")
        })?;
        if let Some(w) = &report.witness {
            ensure(verify_witness(&a, &b, w, report.precision_used), || {
                format!("seed {seed}: bad witness")
            })?;
        }
        if by_symbol {
            iso += 1;
        } else {
            distinct += 1;
        }
        exhaustive += report.exhaustive as u32;
    }
    ensure(iso > 0 && distinct > 0, || {
        "only one outcome exercised".into()
    })?;
    Ok(format!(
        "200 pairs, 0 disagreements ({iso} isometric, {distinct} distinct, {exhaustive} exhaustive)"
    ))
}

fn invariance() -> Check {
    let mut moves_applied = 0;
    for trial in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let dim = rng.gen_range(1..=10);
        let hi = rng.gen_range(0..=7);
        let s = symbol(trial ^ 0x5eed, dim, 0, hi);
        let steps = rng.gen_range(0..=6);
        let mut t = s.clone();
        for _ in 0..steps {
            let moves = legal_deltas(&t);
            if moves.is_empty() {
                break;
            }
            t = delta(&t, moves[rng.gen_range(0..moves.len())]).map_err(|e| e.to_string())?;
            moves_applied += 1;
        }
        let profile = |x: &TwoAdicSymbol| {
            x.terms()
                .iter()
                .map(|t| (t.scale_exp, t.dim, t.ty))
                .collect::<Vec<_>>()
        };
        let fail = |what: &str| {
            format!(
                "trial {trial}: {what} changed, {} -> {}",
                print(&s),
                print(&t)
            )
        };
        ensure(s.total_invariants() == t.total_invariants(), || {
            fail("total invariants")
        })?;
        ensure(profile(&s) == profile(&t), || fail("scale profile"))?;
        ensure(signways(&s) == signways(&t), || fail("signway partition"))?;
        ensure(invariant_vector(&s) == invariant_vector(&t), || {
            fail("invariant vector")
        })?;
        let c = canonical_form(&s);
        ensure(canonical_form(&t) == c, || fail("canonical form"))?;
        ensure(canonical_form(&c) == c, || {
            fail("idempotence of canonical form")
        })?;
    }
    Ok(format!("1000 trials, {moves_applied} moves"))
}

fn oddity_spot_checks() -> Check {
    let mut seen = Vec::new();
    for (text, want) in [("2^-1_3", 7), ("1^-2_II", 0), ("2^-2_II", 4)] {
        let got = parse(text)
            .map_err(|e| e.to_string())?
            .total_invariants()
            .total_oddity;
        ensure(got == Mod8::new(want), || {
            format!("{text}: total oddity {got}, want {want}")
        })?;
        seen.push(format!("{text} -> {}", got.value()));
    }
    let out = run(["twoadic", "--format=structured", "invariants", "2^-1_3"]);
    ensure(out.stdout.contains("\"total_oddity\":7"), || {
        format!("invariants report {}", out.stdout)
    })?;
    Ok(seen.join(", "))
}

fn round_trip() -> Check {
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(1..=12);
        let lo = rng.gen_range(-3..=2);
        let s = symbol(seed, dim, lo, lo + rng.gen_range(0..=8));
        let text = print(&s);
        let back = parse(&text).map_err(|e| format!("seed {seed}: {text:?}: {e}"))?;
        ensure(back == s, || {
            format!("seed {seed}: {text:?} parses to {}", print(&back))
        })?;
    }
    let malformed = [
        ("3^1_1", "not a power of two"),
        ("1^1_1 1^2_II", "duplicate scale"),
        ("1^-2_0", "illegal term"),
        ("[1^+2^-]_0", "no subscript assignment"),
    ];
    for (text, want) in malformed {
        match parse(text) {
            Err(Error::Parse(e)) => {
                ensure(e.message.contains(want) && e.column >= 1, || {
                    format!("{text:?}: {e}")
                })?;
            }
            other => return Err(format!("{text:?}: expected a parse error, got {other:?}")),
        }
        let out = run(["twoadic", "canonical", text]);
        ensure(out.exit == Exit::Input, || {
            format!("{text:?}: cli exit {:?}", out.exit)
        })?;
    }
    Ok("500 round trips; 4 malformed inputs rejected".into())
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, fn() -> Check, Option<Duration>);
    let criteria: [Criterion; 9] = [
        (
            1,
            "golden symbol pipeline",
            golden_symbol,
            Some(Duration::from_secs(1)),
        ),
        (
            2,
            "golden canonical form",
            golden_canonical,
            Some(Duration::from_secs(1)),
        ),
        (3, "golden walks", golden_walks, None),
        (
            4,
            "isometry facts",
            isometry_facts,
            Some(Duration::from_secs(30)),
        ),
        (5, "legality tables", legality_tables, None),
        (
            6,
            "differential suite",
            differential,
            Some(Duration::from_secs(300)),
        ),
        (7, "invariance suite", invariance, None),
        (8, "oddity spot checks", oddity_spot_checks, None),
        (9, "parser round trip", round_trip, None),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        let limit = limit.map(|l| format!(" (limit {l:?})")).unwrap_or_default();
        match result {
            Ok(detail) => println!("PASS {id} {name} [{elapsed:.3?}{limit}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name} [{elapsed:.3?}{limit}]: {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria fail");
        ExitCode::FAILURE
    }
}
