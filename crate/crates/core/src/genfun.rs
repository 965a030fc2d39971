//! Short rational generating functions `Σ α·t^p / ∏(1 − t^a)` with exact
//! rational coefficients.
//!
//! The representation is deliberately non-canonical: sums are term-list
//! concatenations and nothing is simplified. A generating function is read
//! as a Laurent series by expanding every geometric factor in the direction
//! of a functional `ℓ`, after flipping denominators with `ℓ·a < 0` through
//! `1/(1 − t^a) = −t^{−a}/(1 − t^{−a})`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, bit_length, Rat};
use crate::Limits;

/// `alpha · t^p / ∏_j (1 − t^{denoms[j]})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfTerm {
    pub alpha: Rat,
    pub p: Vec<i64>,
    pub denoms: Vec<Vec<i64>>,
}

impl GfTerm {
    pub fn new(alpha: Rat, p: Vec<i64>, denoms: Vec<Vec<i64>>) -> Self {
        Self { alpha, p, denoms }
    }

    pub fn monomial(alpha: Rat, p: Vec<i64>) -> Self {
        Self { alpha, p, denoms: Vec::new() }
    }

    /// Rewrites the term so that every denominator vector is `ℓ`-positive.
    pub fn normalize(&self, ell: &[i64]) -> Result<GfTerm> {
        let mut out = self.clone();
        for a in out.denoms.iter_mut() {
            let s = linalg::dot(ell, a);
            if s == 0 {
                return Err(Error::DegenerateDenominator(a.clone()));
            }
            if s < 0 {
                out.alpha = -out.alpha;
                out.p = linalg::sub(&out.p, a);
                *a = linalg::neg(a);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGf {
    dim: usize,
    terms: Vec<GfTerm>,
}

/// Coefficients on a sublevel; absent exponents have coefficient zero.
pub type CoefficientMap = BTreeMap<Vec<i64>, Rat>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GfComplexity {
    pub bits: u64,
    /// Terms have different numbers of denominator factors.
    pub mixed_k: bool,
}

impl RationalGf {
    pub fn new(dim: usize, terms: Vec<GfTerm>) -> Result<Self> {
        for t in &terms {
            if t.p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.p.len() });
            }
            for a in &t.denoms {
                if a.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: a.len() });
                }
                if linalg::is_zero(a) {
                    return Err(Error::Format("denominator vector must be nonzero".into()));
                }
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    /// The polynomial `Σ_{v ∈ points} t^v`.
    pub fn from_points<'a>(dim: usize, points: impl IntoIterator<Item = &'a Vec<i64>>) -> Result<Self> {
        let terms = points
            .into_iter()
            .map(|p| GfTerm::monomial(Rat::one(), p.clone()))
            .collect();
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GfTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn normalized(&self, ell: &[i64]) -> Result<RationalGf> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.normalize(ell))
            .collect::<Result<_>>()?;
        Ok(Self { dim: self.dim, terms })
    }

    fn check_dim(&self, other: &RationalGf) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &RationalGf) -> Result<RationalGf> {
        self.check_dim(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { dim: self.dim, terms })
    }

    pub fn subtract(&self, other: &RationalGf) -> Result<RationalGf> {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> RationalGf {
        let terms = self
            .terms
            .iter()
            .map(|t| GfTerm { alpha: &t.alpha * c, ..t.clone() })
            .collect();
        Self { dim: self.dim, terms }
    }

    /// `t^b · f`.
    pub fn shift(&self, b: &[i64]) -> Result<RationalGf> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: b.len() });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| GfTerm { p: linalg::add(&t.p, b), ..t.clone() })
            .collect();
        Ok(Self { dim: self.dim, terms })
    }

    /// Coefficient of `t^v` in the `ℓ`-expansion.
    pub fn coefficient_at(&self, v: &[i64], ell: &[i64], limits: &Limits) -> Result<Rat> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut total = Rat::zero();
        for term in &self.terms {
            let t = term.normalize(ell)?;
            let mut denoms = t.denoms.clone();
            denoms.sort_by_key(|a| std::cmp::Reverse(linalg::dot(ell, a)));
            let mut counter = RepresentationCounter {
                ell,
                denoms: &denoms,
                memo: HashMap::new(),
                cap: limits.point_cap,
            };
            let count = counter.count(0, linalg::sub(v, &t.p))?;
            if count != 0 {
                total += &t.alpha * Rat::from_integer(BigInt::from(count));
            }
        }
        Ok(total)
    }

    /// `f ⋆ t^p`: the single term `c·t^p` where `c` is the coefficient of `t^p`.
    pub fn hadamard_monomial(&self, p: &[i64], ell: &[i64], limits: &Limits) -> Result<RationalGf> {
        let c = self.coefficient_at(p, ell, limits)?;
        if c.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        Ok(Self {
            dim: self.dim,
            terms: vec![GfTerm::monomial(c, p.to_vec())],
        })
    }

    /// All nonzero coefficients at exponents `v` with `ℓ·v <= level`.
    pub fn expand_in_sublevel(&self, ell: &[i64], level: i64, limits: &Limits) -> Result<CoefficientMap> {
        let mut map = CoefficientMap::new();
        let mut visited = 0usize;
        for term in &self.terms {
            let t = term.normalize(ell)?;
            let budget = level - linalg::dot(ell, &t.p);
            if budget < 0 {
                continue;
            }
            let steps: Vec<i64> = t.denoms.iter().map(|a| linalg::dot(ell, a)).collect();
            let mut cur = t.p.clone();
            expand_term(&t, &steps, 0, budget, &mut cur, &mut map, &mut visited, limits.point_cap)?;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(map)
    }

    /// The `ℓ`-smallest (then lex-smallest) exponent where the two expansions
    /// differ on the sublevel, or `None` if they agree there.
    pub fn first_difference(
        &self,
        other: &RationalGf,
        ell: &[i64],
        level: i64,
        limits: &Limits,
    ) -> Result<Option<Vec<i64>>> {
        self.check_dim(other)?;
        let a = self.expand_in_sublevel(ell, level, limits)?;
        let b = other.expand_in_sublevel(ell, level, limits)?;
        let witness = a
            .keys()
            .chain(b.keys())
            .filter(|k| a.get(*k) != b.get(*k))
            .min_by_key(|k| (linalg::dot(ell, k), (*k).clone()))
            .cloned();
        Ok(witness)
    }

    pub fn equals_on_sublevel(&self, other: &RationalGf, ell: &[i64], level: i64, limits: &Limits) -> Result<bool> {
        Ok(self.first_difference(other, ell, level, limits)?.is_none())
    }

    /// Substitutes `t_i ← z^{w_i}`.
    pub fn weight_specialize(&self, w: &[i64]) -> Result<RationalGf> {
        if w.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: w.len() });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let denoms = t
                    .denoms
                    .iter()
                    .map(|a| match linalg::dot(w, a) {
                        0 => Err(Error::DegenerateWeight(a.clone())),
                        s => Ok(vec![s]),
                    })
                    .collect::<Result<_>>()?;
                Ok(GfTerm {
                    alpha: t.alpha.clone(),
                    p: vec![linalg::dot(w, &t.p)],
                    denoms,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { dim: 1, terms })
    }

    /// Exact zero test for a univariate function: clears denominators and
    /// checks that the numerator Laurent polynomial vanishes.
    pub fn is_identically_zero_univariate(&self) -> Result<bool> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim });
        }
        let normalized = self.normalized(&[1])?;
        // Common multiple: every binomial 1 − z^a with its maximal multiplicity.
        let mut common: BTreeMap<i64, usize> = BTreeMap::new();
        for t in &normalized.terms {
            let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
            for a in &t.denoms {
                *mult.entry(a[0]).or_default() += 1;
            }
            for (a, m) in mult {
                let e = common.entry(a).or_default();
                *e = (*e).max(m);
            }
        }
        let mut numerator: BTreeMap<i64, Rat> = BTreeMap::new();
        for t in &normalized.terms {
            let mut mult: BTreeMap<i64, usize> = BTreeMap::new();
            for a in &t.denoms {
                *mult.entry(a[0]).or_default() += 1;
            }
            let mut poly: BTreeMap<i64, Rat> = BTreeMap::from([(t.p[0], t.alpha.clone())]);
            for (&a, &m) in &common {
                for _ in mult.get(&a).copied().unwrap_or(0)..m {
                    poly = times_one_minus(&poly, a);
                }
            }
            for (e, c) in poly {
                *numerator.entry(e).or_insert_with(Rat::zero) += c;
            }
        }
        Ok(numerator.values().all(Zero::is_zero))
    }

    /// Bit complexity `Σ_i (1 + d + k_i d + bits(α') + bits(α'') + bits(p) + bits(a))`.
    pub fn complexity(&self) -> GfComplexity {
        let d = self.dim as u64;
        let mut bits = 0u64;
        for t in &self.terms {
            let k = t.denoms.len() as u64;
            bits += 1 + d + k * d;
            bits += bit_length(t.alpha.numer()) + bit_length(t.alpha.denom());
            bits += t.p.iter().map(|&x| linalg::bit_length_i64(x)).sum::<u64>();
            bits += t.denoms.iter().flatten().map(|&x| linalg::bit_length_i64(x)).sum::<u64>();
        }
        let mixed_k = self
            .terms
            .windows(2)
            .any(|w| w[0].denoms.len() != w[1].denoms.len());
        GfComplexity { bits, mixed_k }
    }

    /// Terms sorted into a canonical order, for structural comparison.
    pub fn sorted_terms(&self) -> Vec<GfTerm> {
        let mut terms: Vec<GfTerm> = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.denoms.sort();
                t
            })
            .collect();
        terms.sort_by(|a, b| (&a.p, &a.denoms, &a.alpha).cmp(&(&b.p, &b.denoms, &b.alpha)));
        terms
    }
}

fn times_one_minus(poly: &BTreeMap<i64, Rat>, a: i64) -> BTreeMap<i64, Rat> {
    let mut out = poly.clone();
    for (e, c) in poly {
        *out.entry(e + a).or_insert_with(Rat::zero) -= c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[allow(clippy::too_many_arguments)]
fn expand_term(
    t: &GfTerm,
    steps: &[i64],
    j: usize,
    budget: i64,
    cur: &mut Vec<i64>,
    map: &mut CoefficientMap,
    visited: &mut usize,
    cap: usize,
) -> Result<()> {
    if j == t.denoms.len() {
        *visited += 1;
        if *visited > cap {
            return Err(Error::RegionTooLarge { cap });
        }
        *map.entry(cur.clone()).or_insert_with(Rat::zero) += &t.alpha;
        return Ok(());
    }
    let mut spent = 0;
    let saved = cur.clone();
    while spent <= budget {
        expand_term(t, steps, j + 1, budget - spent, cur, map, visited, cap)?;
        for (c, a) in cur.iter_mut().zip(&t.denoms[j]) {
            *c += a;
        }
        spent += steps[j];
    }
    *cur = saved;
    Ok(())
}

/// Counts `n ∈ N^k` with `Σ n_j a_j = w`, pruning by the `ℓ`-budget.
struct RepresentationCounter<'a> {
    ell: &'a [i64],
    denoms: &'a [Vec<i64>],
    memo: HashMap<(usize, Vec<i64>), u128>,
    cap: usize,
}

impl RepresentationCounter<'_> {
    fn count(&mut self, j: usize, w: Vec<i64>) -> Result<u128> {
        let budget = linalg::dot(self.ell, &w);
        if budget < 0 {
            return Ok(0);
        }
        if j == self.denoms.len() {
            return Ok(linalg::is_zero(&w) as u128);
        }
        if j + 1 == self.denoms.len() {
            // Last factor: w must be a nonnegative multiple of a.
            let a = &self.denoms[j];
            let step = linalg::dot(self.ell, a);
            if budget % step != 0 {
                return Ok(0);
            }
            let n = budget / step;
            return Ok((linalg::scale(a, n) == w) as u128);
        }
        let key = (j, w);
        if let Some(&c) = self.memo.get(&key) {
            return Ok(c);
        }
        if self.memo.len() >= self.cap {
            return Err(Error::RegionTooLarge { cap: self.cap });
        }
        let a = self.denoms[j].clone();
        let step = linalg::dot(self.ell, &a);
        let mut rest = key.1.clone();
        let mut total = 0u128;
        let mut left = budget;
        while left >= 0 {
            total += self.count(j + 1, rest.clone())?;
            rest = linalg::sub(&rest, &a);
            left -= step;
        }
        self.memo.insert(key, total);
        Ok(total)
    }
}

/// Renders `α` as a reduced `[numerator, denominator]` pair of machine integers.
pub fn alpha_parts(alpha: &Rat) -> Result<[i64; 2]> {
    Ok([linalg::big_to_i64(alpha.numer())?, linalg::big_to_i64(alpha.denom())?])
}

pub fn alpha_from_parts(num: i64, den: i64) -> Result<Rat> {
    if den == 0 {
        return Err(Error::Format("alpha has a zero denominator".into()));
    }
    Ok(Rat::new(BigInt::from(num), BigInt::from(den)))
}

/// Whether every coefficient of the map is 0 or 1.
pub fn is_indicator(map: &CoefficientMap) -> bool {
    map.values().all(|c| c.is_one() || c.is_zero())
}

pub fn sign_of(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
