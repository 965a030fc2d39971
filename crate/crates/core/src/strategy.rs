//! Queries answered from a rational strategy: P/N status, winning moves and
//! misère congruence of two positions.

use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::board::{LatticeGame, PointClass};
use crate::error::{Error, Result};
use crate::genfun::RationalGf;
use crate::linalg;
use crate::oracle::{self, Classification, Label, Oracle};
use crate::strat::{intersect_translates, validate_stratification, AffineSemigroup, AffineStratification};
use crate::strat::{compile_rational_strategy, Stratum};
use crate::Limits;

/// Whether `p` is a P-position according to the set generating function `f`.
pub fn is_p(f: &RationalGf, p: &[i64], ell: &[i64], limits: &Limits) -> Result<bool> {
    let h = f.hadamard_monomial(p, ell, limits)?;
    let Some(term) = h.terms().first() else {
        return Ok(false);
    };
    if term.alpha.is_one() {
        Ok(true)
    } else {
        Err(Error::NotASetGf { position: p.to_vec(), coefficient: term.alpha.to_string() })
    }
}

/// Every move from `q` that lands on a P-position of `f`, in rule-set order.
pub fn winning_moves(game: &LatticeGame, f: &RationalGf, q: &[i64], limits: &Limits) -> Result<Vec<Vec<i64>>> {
    if q.len() != game.dim() {
        return Err(Error::DimensionMismatch { expected: game.dim(), found: q.len() });
    }
    if !game.board_contains(q) {
        return Err(Error::PositionOffBoard(q.to_vec()));
    }
    let mut out = Vec::new();
    for g in game.moves() {
        let r = linalg::sub(q, g);
        if game.board_contains(&r) && is_p(f, &r, game.ell(), limits)? {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// A game with its exact solver and, optionally, a rational strategy that
/// every answer is cross-checked against.
#[derive(Debug)]
pub struct Engine {
    oracle: Oracle,
    strategy: Option<RationalGf>,
}

impl Engine {
    pub fn new(game: LatticeGame, strategy: Option<RationalGf>, limits: Limits) -> Result<Self> {
        if let Some(f) = &strategy {
            if f.dim() != game.dim() {
                return Err(Error::DimensionMismatch { expected: game.dim(), found: f.dim() });
            }
        }
        Ok(Self { oracle: Oracle::with_limits(game, limits), strategy })
    }

    pub fn game(&self) -> &LatticeGame {
        self.oracle.game()
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn strategy(&self) -> Option<&RationalGf> {
        self.strategy.as_ref()
    }

    pub fn limits(&self) -> &Limits {
        self.oracle.limits()
    }

    /// Compares the strategy's expansion with the solver on the sublevel.
    pub fn verify(&self, level: i64) -> Result<()> {
        let Some(f) = &self.strategy else {
            return Ok(());
        };
        let game = self.game();
        let region = self.oracle.region(level)?;
        let expansion = f.expand_in_sublevel(game.ell(), level, self.limits())?;
        for (v, c) in &expansion {
            if !c.is_one() {
                return Err(Error::NotASetGf { position: v.clone(), coefficient: c.to_string() });
            }
            let label = region.label(v);
            if label != Some(Label::P) {
                return Err(mismatch(v, Classification::P, label.map_or(Classification::OffBoard, Into::into)));
            }
        }
        if let Some(p) = region.positions_with(Label::P).find(|p| !expansion.contains_key(*p)) {
            return Err(mismatch(p, Classification::N, Classification::P));
        }
        Ok(())
    }

    /// Solver classification, cross-checked against the strategy.
    pub fn classify(&self, p: &[i64]) -> Result<Classification> {
        let c = self.oracle.classify(p)?;
        if let (Some(f), Classification::P | Classification::N) = (&self.strategy, c) {
            let says_p = is_p(f, p, self.game().ell(), self.limits())?;
            if says_p != (c == Classification::P) {
                let claimed = if says_p { Classification::P } else { Classification::N };
                return Err(mismatch(p, claimed, c));
            }
        }
        Ok(c)
    }

    pub fn is_p(&self, p: &[i64]) -> Result<bool> {
        Ok(self.classify(p)? == Classification::P)
    }

    /// Winning moves from `q`, from the strategy when present and otherwise
    /// from the solver; nonempty exactly on N-positions.
    pub fn winning_moves(&self, q: &[i64]) -> Result<Vec<Vec<i64>>> {
        let game = self.game();
        let moves = match &self.strategy {
            Some(f) => winning_moves(game, f, q, self.limits())?,
            None => {
                if !game.board_contains(q) {
                    return Err(Error::PositionOffBoard(q.to_vec()));
                }
                let mut out = Vec::new();
                for g in game.moves() {
                    let r = linalg::sub(q, g);
                    if game.board_contains(&r) && self.oracle.is_p(&r)? {
                        out.push(g.clone());
                    }
                }
                out
            }
        };
        let c = self.oracle.classify(q)?;
        if moves.is_empty() != (c == Classification::P) {
            let claimed = if moves.is_empty() { Classification::P } else { Classification::N };
            return Err(mismatch(q, claimed, c));
        }
        Ok(moves)
    }
}

fn mismatch(p: &[i64], strategy: Classification, oracle: Classification) -> Error {
    Error::StrategyMismatch { position: p.to_vec(), strategy: strategy.to_string(), oracle: oracle.to_string() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Distinguished,
    CongruentCertified,
    CongruentProbable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    /// `ℓ`-radius of the exhaustive sweep over `v ∈ C`.
    pub radius: i64,
    /// Number of weight specializations of `f(S_p) − f(S_q)` found to vanish.
    pub specializations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceVerdict {
    pub kind: VerdictKind,
    /// For `Distinguished`: `v` with exactly one of `p + v`, `q + v` in P.
    pub witness: Option<Vec<i64>>,
    pub evidence: Evidence,
}

impl CongruenceVerdict {
    /// 0 certified, 1 distinguished, 2 probable.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            VerdictKind::CongruentCertified => 0,
            VerdictKind::Distinguished => 1,
            VerdictKind::CongruentProbable => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceOptions {
    /// Sweep radius; defaults to `4·max(ℓ·p, ℓ·q, ℓ of every stratum generator)`.
    pub radius: Option<i64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CongruenceOptions {
    fn default() -> Self {
        Self { radius: None, trials: 5, seed: 0x5eed }
    }
}

const WITNESS_SEARCH_ROUNDS: usize = 12;

/// Decides whether `(p + C) ∩ P − p` and `(q + C) ∩ P − q` coincide.
pub fn congruent(
    engine: &Engine,
    strat: Option<&AffineStratification>,
    p: &[i64],
    q: &[i64],
    opts: &CongruenceOptions,
) -> Result<CongruenceVerdict> {
    let game = engine.game();
    let limits = engine.limits();
    for x in [p, q] {
        if x.len() != game.dim() {
            return Err(Error::DimensionMismatch { expected: game.dim(), found: x.len() });
        }
        if !game.board_contains(x) {
            return Err(Error::PositionOffBoard(x.to_vec()));
        }
    }
    if p == q {
        return Ok(CongruenceVerdict {
            kind: VerdictKind::CongruentCertified,
            witness: None,
            evidence: Evidence { radius: 0, specializations: 0 },
        });
    }
    let ell = game.ell();
    let radius = opts.radius.unwrap_or_else(|| {
        let gen_max = strat
            .into_iter()
            .flat_map(|s| s.generators())
            .map(|a| linalg::dot(ell, a))
            .max()
            .unwrap_or(0);
        4 * game.level(p).max(game.level(q)).max(gen_max).max(1)
    });
    if let Some(s) = strat {
        let level = game.level(p).max(game.level(q)) + radius;
        let report = validate_stratification(s, game, level, limits)?;
        if !report.valid {
            let at = report
                .p_set_mismatch
                .map(|m| m.point)
                .or(report.strata_overlap.map(|o| o.point))
                .unwrap_or_default();
            let oracle = engine.oracle.classify(&at).unwrap_or(Classification::OffBoard);
            return Err(Error::StrategyMismatch {
                position: at,
                strategy: "stratification".into(),
                oracle: oracle.to_string(),
            });
        }
    }

    // (1) Exhaustive sweep.
    for v in oracle::sublevel_points(game, radius, limits)? {
        let a = position_is_p(engine, &linalg::add(p, &v))?;
        let b = position_is_p(engine, &linalg::add(q, &v))?;
        if a != b {
            return Ok(distinguished(v, radius, 0));
        }
    }

    // (2) Exact generating functions of the shifted sets.
    let gfs = match strat {
        Some(s) if game.cone().is_orthant() => match (shifted_gf(s, p, limits), shifted_gf(s, q, limits)) {
            (Ok(fp), Ok(fq)) => Some((fp, fq)),
            (Err(Error::UnsupportedGeometry(_)), _) | (_, Err(Error::UnsupportedGeometry(_))) => None,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        },
        _ => None,
    };
    let Some((fp, fq)) = gfs else {
        return Ok(probable(radius, 0));
    };
    if fp.sorted_terms() == fq.sorted_terms() {
        return Ok(CongruenceVerdict {
            kind: VerdictKind::CongruentCertified,
            witness: None,
            evidence: Evidence { radius, specializations: 0 },
        });
    }

    // (3) Random weight specializations of the difference.
    let diff = fp.subtract(&fq)?;
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut agreements = 0;
    while agreements < opts.trials {
        let w: Vec<i64> = (0..game.dim()).map(|_| rng.random_range(1..=997)).collect();
        let uni = match diff.weight_specialize(&w) {
            Ok(u) => u,
            Err(Error::DegenerateWeight(_)) => continue,
            Err(e) => return Err(e),
        };
        if uni.is_identically_zero_univariate()? {
            agreements += 1;
            continue;
        }
        let mut level = radius.max(1);
        for _ in 0..WITNESS_SEARCH_ROUNDS {
            level *= 2;
            if let Some(v) = fp.first_difference(&fq, ell, level, limits)? {
                return Ok(distinguished(v, level, agreements));
            }
        }
        return Err(Error::RegionTooLarge { cap: limits.point_cap });
    }
    Ok(probable(radius, agreements))
}

fn position_is_p(engine: &Engine, x: &[i64]) -> Result<bool> {
    let game = engine.game();
    if game.classify_point(x) != PointClass::Board {
        return Ok(false);
    }
    match engine.strategy() {
        Some(f) => is_p(f, x, game.ell(), engine.limits()),
        None => engine.oracle().is_p(x),
    }
}

/// `f(((x + N^d) ∩ W) − x)` from the strata of `W`.
fn shifted_gf(strat: &AffineStratification, x: &[i64], limits: &Limits) -> Result<RationalGf> {
    let d = strat.dim();
    let orthant = AffineSemigroup::orthant(d);
    let mut pieces = Vec::new();
    for s in strat.strata() {
        for b in s.base() {
            pieces.extend(intersect_translates(b, s.semigroup(), x, &orthant, limits)?);
        }
    }
    let shifted: Vec<Stratum> = pieces
        .into_iter()
        .map(|s| {
            let base = s.base().iter().map(|b| linalg::sub(b, x)).collect();
            Stratum::new(base, s.semigroup().clone())
        })
        .collect::<Result<_>>()?;
    compile_rational_strategy(&AffineStratification::new(d, shifted)?)
}

fn distinguished(v: Vec<i64>, radius: i64, specializations: usize) -> CongruenceVerdict {
    CongruenceVerdict {
        kind: VerdictKind::Distinguished,
        witness: Some(v),
        evidence: Evidence { radius, specializations },
    }
}

fn probable(radius: i64, specializations: usize) -> CongruenceVerdict {
    CongruenceVerdict {
        kind: VerdictKind::CongruentProbable,
        witness: None,
        evidence: Evidence { radius, specializations },
    }
}

/// Re-checks a distinguishing witness against the engine.
pub fn witness_holds(engine: &Engine, p: &[i64], q: &[i64], v: &[i64]) -> Result<bool> {
    Ok(position_is_p(engine, &linalg::add(p, v))? != position_is_p(engine, &linalg::add(q, v))?)
}
