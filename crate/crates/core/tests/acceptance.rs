//! Acceptance suite: one line per criterion, then a nonzero exit status if
//! any criterion failed. Every check is exact; the only tolerances are the
//! wall-clock budgets below.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use latgame::board::validate_rule_set;
use latgame::games::{ex5, nim, PlayMode};
use latgame::genfun::{alpha_from_parts, is_indicator};
use latgame::linalg::Rat;
use latgame::oracle::solve_sublevel;
use latgame::strat::{compile_rational_strategy, complement_stratification, intersect_translates};
use latgame::strategy::{self, congruent, witness_holds, CongruenceOptions, Engine};
use latgame::{
    AffineSemigroup, AffineStratification, Classification, GfTerm, Label, LatticeGame, Limits, RationalGf, Stratum,
    VerdictKind,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BUDGET_NIM_GOLDEN: Duration = Duration::from_secs(1);
const BUDGET_ROUND_TRIP: Duration = Duration::from_secs(1);
const BUDGET_WINNING_MOVES: Duration = Duration::from_secs(5);
const BUDGET_HADAMARD: Duration = Duration::from_secs(30);
const BUDGET_COMPLEMENT: Duration = Duration::from_secs(5);
const BUDGET_CONGRUENCE: Duration = Duration::from_secs(2);
const BUDGET_EX5: Duration = Duration::from_secs(30);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Gens<'a> = &'a [[i64; 2]];
type Membership = Box<dyn Fn([i64; 2]) -> bool>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= budget, || format!("took {took:.2?}, budget {budget:.2?}"))
}

fn err(e: latgame::Error) -> String {
    e.to_string()
}

fn semigroup(gens: &[[i64; 2]]) -> AffineSemigroup {
    AffineSemigroup::new(2, gens.iter().map(|g| g.to_vec()).collect()).unwrap()
}

fn stratification(strata: &[(Gens, Gens)]) -> AffineStratification {
    let strata = strata
        .iter()
        .map(|(f, a)| Stratum::new(f.iter().map(|b| b.to_vec()).collect(), semigroup(a)).unwrap())
        .collect();
    AffineStratification::new(2, strata).unwrap()
}

fn two_n2() -> AffineStratification {
    stratification(&[(&[[0, 0]], &[[2, 0], [0, 2]])])
}

fn nim2_normal() -> LatticeGame {
    nim(2, PlayMode::Normal).unwrap()
}

/// Points of `Z²` with `x + 2y <= level` in a box that covers `N²`'s
/// sublevel plus a margin of off-board points.
fn box_points(level: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for y in -2..=level {
        for x in -2..=level + 4 {
            if x + 2 * y <= level {
                out.push([x, y]);
            }
        }
    }
    out
}

/// Normal-play NIM with heaps 1 and 2: `(a, b)` counts heaps of each size,
/// and a position is P exactly when the XOR of the heap sizes is 0.
fn bouton_normal(a: i64, b: i64) -> bool {
    let x = if a % 2 == 1 { 1 } else { 0 } ^ if b % 2 == 1 { 2 } else { 0 };
    x == 0
}

/// Misère NIM: with every heap of size at most 1, P iff an odd number of
/// heaps; otherwise as in normal play.
fn bouton_misere(a: i64, b: i64) -> bool {
    if b == 0 {
        a % 2 == 1
    } else {
        bouton_normal(a, b)
    }
}

fn nim_golden() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let game = nim2_normal();
    ensure(game.ell() == [1, 2], || format!("unexpected functional {:?}", game.ell()))?;
    let region = solve_sublevel(&game, 40, &limits).map_err(err)?;
    let p_set: BTreeSet<Vec<i64>> = region.positions_with(Label::P).map(<[i64]>::to_vec).collect();
    let expected: BTreeSet<Vec<i64>> = box_points(40)
        .into_iter()
        .filter(|&[a, b]| a >= 0 && b >= 0 && a % 2 == 0 && b % 2 == 0)
        .map(|p| p.to_vec())
        .collect();
    ensure(p_set == expected, || {
        format!("normal play P-set differs from 2N² at {:?}", p_set.symmetric_difference(&expected).next())
    })?;
    ensure(region.iter().all(|(p, l)| (l == Label::P) == bouton_normal(p[0], p[1])), || {
        "normal play disagrees with Bouton".into()
    })?;
    within(start, BUDGET_NIM_GOLDEN)?;

    // The misère reading differs from 2N²; pin the difference exactly.
    let misere = solve_sublevel(&nim(2, PlayMode::Misere).unwrap(), 40, &limits).map_err(err)?;
    for (p, l) in misere.iter() {
        let want = if p == [0, 0] { Label::D } else if bouton_misere(p[0], p[1]) { Label::P } else { Label::N };
        ensure(l == want, || format!("misère label at {p:?} is {l}, expected {want}"))?;
    }
    let odd_row = misere.positions_with(Label::P).filter(|p| p[1] == 0).count();
    Ok(format!(
        "normal play P = 2N² on {} points; misère P = 2N² with b > 0 plus {odd_row} points (odd, 0), D = {{0}}",
        region.len()
    ))
}

fn round_trip() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let game = nim2_normal();
    let f = compile_rational_strategy(&two_n2()).map_err(err)?;
    let map = f.expand_in_sublevel(game.ell(), 40, &limits).map_err(err)?;
    ensure(is_indicator(&map), || "compiled GF is not an indicator".into())?;
    let region = solve_sublevel(&game, 40, &limits).map_err(err)?;
    let from_gf: BTreeSet<Vec<i64>> = map.keys().cloned().collect();
    let from_oracle: BTreeSet<Vec<i64>> = region.positions_with(Label::P).map(<[i64]>::to_vec).collect();
    ensure(from_gf == from_oracle, || "expansion differs from the oracle P-set".into())?;
    let engine = Engine::new(game.clone(), None, limits.clone()).map_err(err)?;
    for (p, _) in region.iter() {
        let via_gf = strategy::is_p(&f, p, game.ell(), &limits).map_err(err)?;
        let via_oracle = engine.oracle().classify(p).map_err(err)? == Classification::P;
        ensure(via_gf == via_oracle, || format!("isP disagrees with classify at {p:?}"))?;
    }
    within(start, BUDGET_ROUND_TRIP)?;
    Ok(format!("{} points agree", region.len()))
}

fn winning_moves() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let game = nim2_normal();
    let f = compile_rational_strategy(&two_n2()).map_err(err)?;
    let region = solve_sublevel(&game, 30, &limits).map_err(err)?;
    let mut n_count = 0;
    for (q, label) in region.iter() {
        let moves = strategy::winning_moves(&game, &f, q, &limits).map_err(err)?;
        match label {
            Label::N => {
                n_count += 1;
                ensure(!moves.is_empty(), || format!("no winning move from N-position {q:?}"))?;
                for g in &moves {
                    let r: Vec<i64> = q.iter().zip(g).map(|(a, b)| a - b).collect();
                    ensure(region.label(&r) == Some(Label::P), || format!("{q:?} - {g:?} is not P"))?;
                }
            }
            Label::P => ensure(moves.is_empty(), || format!("P-position {q:?} has moves {moves:?}"))?,
            Label::D => {}
        }
    }
    within(start, BUDGET_WINNING_MOVES)?;
    Ok(format!("{n_count} N-positions, {} positions", region.len()))
}

/// Brute-force coefficient of `t^v`: flip denominators against `ℓ`, then
/// count nonnegative combinations with nested loops.
fn brute_coefficient(term: &GfTerm, v: &[i64], ell: &[i64]) -> Rat {
    let dot = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
    let mut sign = 1i64;
    let mut base = term.p.clone();
    let mut dirs = Vec::new();
    for a in &term.denoms {
        if dot(ell, a) < 0 {
            sign = -sign;
            base = base.iter().zip(a).map(|(x, y)| x - y).collect();
            dirs.push(a.iter().map(|x| -x).collect::<Vec<_>>());
        } else {
            dirs.push(a.clone());
        }
    }
    let target: Vec<i64> = v.iter().zip(&base).map(|(x, y)| x - y).collect();
    let budget = dot(ell, &target);
    if budget < 0 {
        return Rat::default();
    }
    let bounds: Vec<i64> = dirs.iter().map(|a| budget / dot(ell, a)).collect();
    let mut count = 0i64;
    let mut n = vec![0i64; dirs.len()];
    loop {
        let sum: Vec<i64> = (0..v.len()).map(|i| dirs.iter().zip(&n).map(|(a, k)| a[i] * k).sum()).collect();
        if sum == target {
            count += 1;
        }
        let mut i = 0;
        while i < n.len() && n[i] == bounds[i] {
            n[i] = 0;
            i += 1;
        }
        if i == n.len() {
            break;
        }
        n[i] += 1;
    }
    term.alpha.clone() * alpha_from_parts(sign * count, 1).unwrap()
}

fn hadamard() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut nonzero = 0;
    for case in 0..200 {
        let d = rng.random_range(1..=3usize);
        let ell: Vec<i64> = (0..d).map(|_| rng.random_range(1..=3)).collect();
        let terms: Vec<GfTerm> = (0..rng.random_range(1..=3))
            .map(|_| {
                let k = rng.random_range(0..=3usize);
                let denoms = (0..k)
                    .map(|_| loop {
                        let a: Vec<i64> = (0..d).map(|_| rng.random_range(-4..=4)).collect();
                        if a.iter().zip(&ell).map(|(x, y)| x * y).sum::<i64>() != 0 {
                            break a;
                        }
                    })
                    .collect();
                let p = (0..d).map(|_| rng.random_range(-4..=4)).collect();
                let alpha = alpha_from_parts(rng.random_range(-4..=4), rng.random_range(1..=4)).unwrap();
                GfTerm::new(alpha, p, denoms)
            })
            .collect();
        let f = RationalGf::new(d, terms).map_err(err)?;
        // Mostly aim at the support: a term's apex plus small multiples of its
        // denominators, flipped toward ℓ.
        let p: Vec<i64> = if rng.random_bool(0.75) {
            let t = &f.terms()[rng.random_range(0..f.terms().len())];
            let mut p = t.p.clone();
            for a in &t.denoms {
                let flip = a.iter().zip(&ell).map(|(x, y)| x * y).sum::<i64>() < 0;
                let n = rng.random_range(0..=2) + i64::from(flip);
                for (x, y) in p.iter_mut().zip(a) {
                    *x += if flip { -n * y } else { n * y };
                }
            }
            p
        } else {
            (0..d).map(|_| rng.random_range(-4..=8)).collect()
        };
        let expected: Rat = f.terms().iter().map(|t| brute_coefficient(t, &p, &ell)).sum();
        let h = f.hadamard_monomial(&p, &ell, &limits).map_err(err)?;
        let level = ell.iter().zip(&p).map(|(x, y)| x * y).sum::<i64>();
        let map = h.expand_in_sublevel(&ell, level + 10, &limits).map_err(err)?;
        let ok = if expected == Rat::default() {
            map.is_empty() && h.terms().is_empty()
        } else {
            nonzero += 1;
            h.terms().len() == 1 && map.len() == 1 && map.get(&p) == Some(&expected)
        };
        ensure(ok, || format!("case {case}: f = {f:?}, p = {p:?}, expected {expected}, got {:?}", h.terms()))?;
    }
    within(start, BUDGET_HADAMARD)?;
    Ok(format!("200 cases, {nonzero} nonzero coefficients"))
}

fn union_identity() -> Outcome {
    let limits = Limits::default();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let ell = [1, 1, 1];
    for case in 0..50 {
        let mut pick = |n: usize| -> BTreeSet<Vec<i64>> {
            (0..n).map(|_| (0..3).map(|_| rng.random_range(0..=5)).collect()).collect()
        };
        let a = pick(12);
        let b = if case % 2 == 0 {
            pick(12).difference(&a).cloned().collect()
        } else {
            pick(12)
        };
        let gf = |s: &BTreeSet<Vec<i64>>| RationalGf::from_points(3, s.iter()).unwrap();
        let union: BTreeSet<Vec<i64>> = a.union(&b).cloned().collect();
        let inter: BTreeSet<Vec<i64>> = a.intersection(&b).cloned().collect();
        let lhs = gf(&union);
        let rhs = gf(&a).add(&gf(&b)).and_then(|s| s.subtract(&gf(&inter))).map_err(err)?;
        for level in [5, 10, 15] {
            let l = lhs.expand_in_sublevel(&ell, level, &limits).map_err(err)?;
            let r = rhs.expand_in_sublevel(&ell, level, &limits).map_err(err)?;
            ensure(l == r, || format!("case {case}, level {level}: expansions differ"))?;
            ensure(is_indicator(&r), || format!("case {case}: not an indicator"))?;
            let members: BTreeSet<Vec<i64>> = r.keys().cloned().collect();
            let want: BTreeSet<Vec<i64>> =
                union.iter().filter(|v| v.iter().sum::<i64>() <= level).cloned().collect();
            ensure(members == want, || format!("case {case}, level {level}: support is not A ∪ B"))?;
        }
    }
    Ok("50 random pairs (25 disjoint) at levels 5, 10, 15".into())
}

fn complement() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let n2 = stratification(&[(&[[0, 0]], &[[1, 0], [0, 1]])]);
    let four = stratification(&[(&[[0, 0]], &[[4, 0], [0, 4]])]);
    fn in_n2(v: [i64; 2]) -> bool {
        v[0] >= 0 && v[1] >= 0
    }
    fn in_mult(v: [i64; 2], m: i64) -> bool {
        in_n2(v) && v[0] % m == 0 && v[1] % m == 0
    }
    let cases: [(&str, &AffineStratification, &AffineStratification, Membership); 2] = [
        ("N² ∖ 2N²", &n2, &two_n2(), Box::new(move |v| in_n2(v) && !in_mult(v, 2))),
        ("2N² ∖ 4N²", &two_n2(), &four, Box::new(move |v| in_mult(v, 2) && !in_mult(v, 4))),
    ];
    let mut summary = Vec::new();
    for (name, sa, sb, want) in &cases {
        let c = complement_stratification(sa, sb, &limits).map_err(|e| format!("{name}: {e}"))?;
        let f = compile_rational_strategy(&c).map_err(err)?;
        let map = f.expand_in_sublevel(&[1, 1], 30, &limits).map_err(err)?;
        ensure(is_indicator(&map), || format!("{name}: compiled GF is not an indicator"))?;
        let mut count = 0;
        for y in -3..=33 {
            for x in -3..=33 {
                let v = [x, y];
                let member = c.membership(&v).map_err(err)?.is_some();
                ensure(member == want(v), || format!("{name}: membership wrong at {v:?}"))?;
                if x + y <= 30 && x >= 0 && y >= 0 {
                    ensure(map.contains_key(v.as_slice()) == want(v), || format!("{name}: GF wrong at {v:?}"))?;
                    count += 1;
                }
            }
        }
        summary.push(format!("{name}: {} strata, {count} points", c.strata().len()));
    }
    within(start, BUDGET_COMPLEMENT)?;
    Ok(summary.join("; "))
}

/// Points of `b + N{gens}` with coordinate sum at most `level`, by
/// enumerating coefficient vectors.
fn translate_points(b: &[i64], gens: &[Vec<i64>], level: i64) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let mut n = vec![0i64; gens.len()];
    let bound = level + 10;
    loop {
        let v: Vec<i64> = (0..b.len()).map(|i| b[i] + gens.iter().zip(&n).map(|(g, k)| g[i] * k).sum::<i64>()).collect();
        if v.iter().sum::<i64>() <= level {
            out.insert(v);
        }
        let mut i = 0;
        while i < n.len() && n[i] == bound {
            n[i] = 0;
            i += 1;
        }
        if i == n.len() {
            break;
        }
        n[i] += 1;
    }
    out
}

fn intersections() -> Outcome {
    let limits = Limits::default();
    type Pair = (&'static str, Vec<i64>, Vec<Vec<i64>>, Vec<i64>, Vec<Vec<i64>>);
    let pairs: Vec<Pair> = vec![
        ("shifted orthants", vec![0, 0], vec![vec![1, 0], vec![0, 1]], vec![1, 2], vec![vec![1, 0], vec![0, 1]]),
        ("parity (empty)", vec![0, 0], vec![vec![2, 0], vec![0, 2]], vec![1, 0], vec![vec![2, 0], vec![0, 2]]),
        ("coprime steps", vec![0, 0], vec![vec![2, 0], vec![0, 3]], vec![0, 0], vec![vec![3, 0], vec![0, 2]]),
        ("sheared cone", vec![0, 0], vec![vec![1, 0], vec![1, 1]], vec![0, 1], vec![vec![1, 0], vec![0, 1]]),
        ("offset lattices", vec![1, 0], vec![vec![2, 0], vec![0, 1]], vec![0, 0], vec![vec![3, 0], vec![1, 1]]),
        (
            "three dimensions",
            vec![0, 0, 0],
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![1, 2, 0],
            vec![vec![2, 0, 0], vec![0, 1, 0], vec![1, 0, 2]],
        ),
    ];
    let level = 20;
    let mut summary = Vec::new();
    for (name, b1, a1, b2, a2) in &pairs {
        let d = b1.len();
        let s1 = AffineSemigroup::new(d, a1.clone()).unwrap();
        let s2 = AffineSemigroup::new(d, a2.clone()).unwrap();
        let out = intersect_translates(b1, &s1, b2, &s2, &limits).map_err(|e| format!("{name}: {e}"))?;
        let p1 = translate_points(b1, a1, level);
        let p2 = translate_points(b2, a2, level);
        let want: BTreeSet<Vec<i64>> = p1.intersection(&p2).cloned().collect();
        let strat = AffineStratification::new(d, out).map_err(err)?;
        let mut got = BTreeSet::new();
        for v in translate_points(&vec![-2; d], &(0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect::<Vec<_>>(), level) {
            if strat.membership(&v).map_err(|e| format!("{name}: {e}"))?.is_some() {
                got.insert(v);
            }
        }
        ensure(got == want, || {
            format!("{name}: differs at {:?}", got.symmetric_difference(&want).next())
        })?;
        summary.push(format!("{name} {}", want.len()));
    }
    Ok(format!("{} pairs ({})", pairs.len(), summary.join(", ")))
}

fn congruence() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let strat = two_n2();
    let f = compile_rational_strategy(&strat).map_err(err)?;
    let engine = Engine::new(nim2_normal(), Some(f), limits).map_err(err)?;
    let opts = CongruenceOptions::default();
    let same = congruent(&engine, Some(&strat), &[0, 0], &[2, 0], &opts).map_err(err)?;
    ensure(same.kind == VerdictKind::CongruentCertified, || format!("(0,0) vs (2,0): {same:?}"))?;
    let diff = congruent(&engine, Some(&strat), &[0, 0], &[1, 0], &opts).map_err(err)?;
    ensure(diff.kind == VerdictKind::Distinguished, || format!("(0,0) vs (1,0): {diff:?}"))?;
    let w = diff.witness.clone().ok_or("no witness")?;
    ensure(witness_holds(&engine, &[0, 0], &[1, 0], &w).map_err(err)?, || "witness does not verify".into())?;
    let label = |p: &[i64]| engine.oracle().classify(p);
    let a = label(&[w[0], w[1]]).map_err(err)?;
    let b = label(&[w[0] + 1, w[1]]).map_err(err)?;
    ensure(a != b, || format!("oracle labels agree at witness {w:?}"))?;
    within(start, BUDGET_CONGRUENCE)?;
    Ok(format!("(0,0) ≡ (2,0) certified; (0,0) vs (1,0) distinguished by v = {w:?} ({a} vs {b})"))
}

fn ex5_sanity() -> Outcome {
    let limits = Limits::default();
    let start = Instant::now();
    let game = ex5();
    let report = validate_rule_set(game.rules(), game.cone(), &limits).map_err(err)?;
    ensure(report.valid, || format!("validation failed: {}", report.summary()))?;
    let region = solve_sublevel(&game, 10, &limits).map_err(err)?;
    let (mut p, mut n) = (0, 0);
    for (q, label) in region.iter() {
        if label == Label::D {
            ensure(game.defeated_set().contains(q), || format!("{q:?} labelled D"))?;
            continue;
        }
        let targets: Vec<Option<Label>> = game
            .legal_moves(q)
            .map_err(err)?
            .iter()
            .map(|g| region.label(&q.iter().zip(*g).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .collect();
        ensure(targets.iter().all(Option::is_some), || format!("move from {q:?} leaves the region"))?;
        let has_p_move = targets.contains(&Some(Label::P));
        match label {
            Label::P => {
                p += 1;
                ensure(!has_p_move, || format!("P-position {q:?} has a move to P"))?;
            }
            Label::N => {
                n += 1;
                ensure(has_p_move, || format!("N-position {q:?} has no move to P"))?;
            }
            Label::D => unreachable!(),
        }
    }
    within(start, BUDGET_EX5)?;
    Ok(format!("{} points: {p} P, {n} N", region.len()))
}

fn complexity() -> Outcome {
    let game = nim(2, PlayMode::Misere).unwrap().input_complexity();
    let gf = compile_rational_strategy(&two_n2()).map_err(err)?.complexity().bits;
    let sg = semigroup(&[[2, 0], [0, 2]]).complexity();
    let st = two_n2().complexity();
    let got = [game, gf, sg, st];
    let want = [13, 9, 8, 10];
    ensure(got == want, || format!("input/gf/semigroup/strat = {got:?}, expected {want:?}"))?;
    Ok(format!("{got:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("NIM₂ golden: P = 2N² on L = 40", nim_golden),
        ("strategy pipeline round trip on L = 40", round_trip),
        ("winning moves exactly on N-positions, L = 30", winning_moves),
        ("Hadamard with a monomial, 200 random GFs", hadamard),
        ("f(A ∪ B) = f(A) + f(B) − f(A ∩ B)", union_identity),
        ("complement stratifications on L = 30", complement),
        ("intersections of translates on L = 20", intersections),
        ("congruence verdicts for NIM₂", congruence),
        ("ex5 validates and solves consistently on L = 10", ex5_sanity),
        ("complexity hand values 13, 9, 8, 10", complexity),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
