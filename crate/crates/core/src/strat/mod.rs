//! Affine stratifications: finite disjoint unions of modules `F + A` over
//! simplicial affine semigroups, their validation against the exact solver,
//! and compilation into rational strategies.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::board::LatticeGame;
use crate::error::{Error, Result};
use crate::genfun::{GfTerm, RationalGf};
use crate::linalg::{self, bit_length_i64, Rat, SpanSolver};
use crate::oracle::{self, Label};
use crate::Limits;

pub mod setalg;

pub use setalg::{carve_complement, complement_stratification, intersect_translates, Region};

/// `N{a_1, …, a_n}` with linearly independent generators.
#[derive(Clone, Debug)]
pub struct AffineSemigroup {
    dim: usize,
    gens: Vec<Vec<i64>>,
    solver: SpanSolver,
}

impl PartialEq for AffineSemigroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.gens == other.gens
    }
}

impl Eq for AffineSemigroup {}

impl AffineSemigroup {
    pub fn new(dim: usize, gens: Vec<Vec<i64>>) -> Result<Self> {
        for g in &gens {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
            }
            if linalg::is_zero(g) {
                return Err(Error::UnsupportedSemigroup("zero generator".into()));
            }
        }
        // Independent generators always admit a positive functional, so
        // pointedness needs no separate check.
        let solver = SpanSolver::new(&gens, dim)
            .ok_or_else(|| Error::UnsupportedSemigroup(format!("dependent generators {gens:?}")))?;
        Ok(Self { dim, gens, solver })
    }

    /// `N{e_1, …, e_d}`.
    pub fn orthant(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(|i| linalg::unit(dim, i)).collect()).expect("unit vectors")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Vec<i64>] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.solver.in_semigroup(v)
    }

    /// Membership in the group `ZA`.
    pub fn group_contains(&self, v: &[i64]) -> bool {
        self.solver.integer_coords(v).is_some()
    }

    pub fn coords(&self, v: &[i64]) -> Option<Vec<i64>> {
        self.solver.integer_coords(v)
    }

    pub(crate) fn solver(&self) -> &SpanSolver {
        &self.solver
    }

    /// `dn + Σ bits(a_ij)`.
    pub fn complexity(&self) -> u64 {
        let bits: u64 = self.gens.iter().flatten().map(|&x| bit_length_i64(x)).sum();
        (self.dim * self.gens.len()) as u64 + bits
    }
}

/// `F + A`, a finitely generated module over `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    base: Vec<Vec<i64>>,
    semigroup: AffineSemigroup,
}

impl Stratum {
    /// Builds the stratum without checking that its translates are disjoint;
    /// see [`Stratum::overlapping_translates`].
    pub fn new(base: Vec<Vec<i64>>, semigroup: AffineSemigroup) -> Result<Self> {
        for b in &base {
            if b.len() != semigroup.dim() {
                return Err(Error::DimensionMismatch { expected: semigroup.dim(), found: b.len() });
            }
        }
        Ok(Self { base, semigroup })
    }

    pub fn dim(&self) -> usize {
        self.semigroup.dim()
    }

    /// The module generators `F`.
    pub fn base(&self) -> &[Vec<i64>] {
        &self.base
    }

    pub fn semigroup(&self) -> &AffineSemigroup {
        &self.semigroup
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.base.iter().any(|b| self.semigroup.contains(&linalg::sub(v, b)))
    }

    /// First pair `b ≠ b′` of `F` whose translates meet. With independent
    /// generators `b + A` and `b′ + A` meet exactly when `b − b′ ∈ ZA`.
    pub fn overlapping_translates(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        for (i, b) in self.base.iter().enumerate() {
            for c in &self.base[i + 1..] {
                if self.semigroup.group_contains(&linalg::sub(b, c)) {
                    return Some((b.clone(), c.clone()));
                }
            }
        }
        None
    }

    /// Members `v` with `ℓ·v <= level`, unsorted and with multiplicity when
    /// translates overlap. Every generator must be `ℓ`-positive.
    pub fn points_up_to(&self, ell: &[i64], level: i64, limits: &Limits) -> Result<Vec<Vec<i64>>> {
        let steps: Vec<i64> = self.semigroup.gens.iter().map(|a| linalg::dot(ell, a)).collect();
        if let Some(j) = steps.iter().position(|&s| s <= 0) {
            return Err(Error::DegenerateDenominator(self.semigroup.gens[j].clone()));
        }
        let mut out = Vec::new();
        for b in &self.base {
            let budget = level - linalg::dot(ell, b);
            let mut cur = b.clone();
            walk(&self.semigroup.gens, &steps, 0, budget, &mut cur, &mut out, limits.point_cap)?;
        }
        Ok(out)
    }

    fn complexity_parts(&self) -> (u64, u64, u64) {
        let bits: u64 = self.base.iter().flatten().map(|&x| bit_length_i64(x)).sum::<u64>()
            + self.semigroup.gens.iter().flatten().map(|&x| bit_length_i64(x)).sum::<u64>();
        (self.semigroup.rank() as u64, self.base.len() as u64, bits)
    }
}

fn walk(
    gens: &[Vec<i64>],
    steps: &[i64],
    j: usize,
    budget: i64,
    cur: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    cap: usize,
) -> Result<()> {
    if budget < 0 {
        return Ok(());
    }
    if j == gens.len() {
        if out.len() >= cap {
            return Err(Error::RegionTooLarge { cap });
        }
        out.push(cur.clone());
        return Ok(());
    }
    let saved = cur.clone();
    let mut left = budget;
    while left >= 0 {
        walk(gens, steps, j + 1, left, cur, out, cap)?;
        *cur = linalg::add(cur, &gens[j]);
        left -= steps[j];
    }
    *cur = saved;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineStratification {
    dim: usize,
    strata: Vec<Stratum>,
}

impl AffineStratification {
    pub fn new(dim: usize, strata: Vec<Stratum>) -> Result<Self> {
        for s in &strata {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
        }
        Ok(Self { dim, strata })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, strata: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Index of the stratum containing `v`.
    pub fn membership(&self, v: &[i64]) -> Result<Option<usize>> {
        let mut found = None;
        for (i, s) in self.strata.iter().enumerate() {
            if s.contains(v) {
                if let Some(first) = found {
                    return Err(Error::OverlappingStrata { point: v.to_vec(), first, second: i });
                }
                found = Some(i);
            }
        }
        Ok(found)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.strata.iter().any(|s| s.contains(v))
    }

    /// All semigroup generators, across strata.
    pub fn generators(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.strata.iter().flat_map(|s| s.semigroup.gens.iter())
    }

    /// Distinct members `v` with `ℓ·v <= level`, sorted `ℓ`-then-lex.
    pub fn points_up_to(&self, ell: &[i64], level: i64, limits: &Limits) -> Result<Vec<Vec<i64>>> {
        let mut set = BTreeSet::new();
        for s in &self.strata {
            set.extend(s.points_up_to(ell, level, limits)?);
        }
        let mut pts: Vec<Vec<i64>> = set.into_iter().collect();
        pts.sort_by_cached_key(|p| (linalg::dot(ell, p), p.clone()));
        Ok(pts)
    }

    /// `d(Σ n_i + Σ m_i)` plus the bit lengths of every entry of every `F_i` and `A_i`.
    pub fn complexity(&self) -> u64 {
        let d = self.dim as u64;
        self.strata
            .iter()
            .map(|s| {
                let (n, m, bits) = s.complexity_parts();
                d * (n + m) + bits
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslateOverlap {
    pub stratum: usize,
    pub first: Vec<i64>,
    pub second: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrataOverlap {
    pub point: Vec<i64>,
    pub first: usize,
    pub second: usize,
}

/// A sublevel point where the stratification and the solver disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PSetMismatch {
    pub point: Vec<i64>,
    pub in_stratification: bool,
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratificationReport {
    pub level: i64,
    pub translate_overlaps: Vec<TranslateOverlap>,
    pub strata_overlap: Option<StrataOverlap>,
    pub p_set_mismatch: Option<PSetMismatch>,
    pub valid: bool,
}

/// Checks translate disjointness exactly, and strata disjointness and the
/// P-set on the sublevel `ℓ·v <= level` against the exact solver.
pub fn validate_stratification(
    strat: &AffineStratification,
    game: &LatticeGame,
    level: i64,
    limits: &Limits,
) -> Result<StratificationReport> {
    if strat.dim() != game.dim() {
        return Err(Error::DimensionMismatch { expected: game.dim(), found: strat.dim() });
    }
    let translate_overlaps: Vec<TranslateOverlap> = strat
        .strata
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            s.overlapping_translates()
                .map(|(first, second)| TranslateOverlap { stratum: i, first, second })
        })
        .collect();

    let region = oracle::solve_sublevel(game, level, limits)?;
    let mut strata_overlap = None;
    let mut p_set_mismatch = None;
    for (p, label) in region.iter() {
        let hits: Vec<usize> = (0..strat.strata.len()).filter(|&i| strat.strata[i].contains(p)).collect();
        if hits.len() > 1 && strata_overlap.is_none() {
            strata_overlap = Some(StrataOverlap { point: p.to_vec(), first: hits[0], second: hits[1] });
        }
        let member = !hits.is_empty();
        if member != (label == Label::P) && p_set_mismatch.is_none() {
            p_set_mismatch = Some(PSetMismatch {
                point: p.to_vec(),
                in_stratification: member,
                label: Some(label),
            });
        }
    }
    // Members outside the board cone are mismatches too.
    if p_set_mismatch.is_none() {
        let ell = game.ell();
        if strat.generators().all(|a| linalg::dot(ell, a) > 0) {
            for v in strat.points_up_to(ell, level, limits)? {
                if region.label(&v).is_none() {
                    p_set_mismatch = Some(PSetMismatch { point: v, in_stratification: true, label: None });
                    break;
                }
            }
        }
    }
    let valid = translate_overlaps.is_empty() && strata_overlap.is_none() && p_set_mismatch.is_none();
    Ok(StratificationReport { level, translate_overlaps, strata_overlap, p_set_mismatch, valid })
}

/// `Σ_i Σ_{b ∈ F_i} t^b / ∏_j (1 − t^{a_ij})`.
pub fn compile_rational_strategy(strat: &AffineStratification) -> Result<RationalGf> {
    let mut terms = Vec::new();
    for s in &strat.strata {
        if let Some((b, c)) = s.overlapping_translates() {
            return Err(Error::OverlappingTranslates(b, c));
        }
        for b in &s.base {
            terms.push(GfTerm::new(Rat::from_integer(1.into()), b.clone(), s.semigroup.gens.clone()));
        }
    }
    RationalGf::new(strat.dim, terms)
}
