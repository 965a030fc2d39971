//! Desk-scale set algebra on strata: intersections of translates and
//! complements of stratified sets.
//!
//! Every intermediate set is a [`Region`], the lattice points of a pointed
//! polyhedron lying in one coset of a lattice. Regions are closed under
//! intersection and under subtraction of a translate (by splitting off one
//! violated inequality at a time), and a region with a simplicial recession
//! cone is turned into strata by extracting its minimal elements and
//! decomposing the resulting monomial up-sets into disjoint cells. Each
//! public operation checks its output pointwise on a sublevel before
//! returning it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;

use super::{AffineSemigroup, AffineStratification, Stratum};
use crate::board::positive_functional;
use crate::error::{Error, Result};
use crate::hnf::Coset;
use crate::linalg::{self, SpanSolver};
use crate::polyhedron::{for_each_in_box, Polyhedron};
use crate::Limits;

/// Largest dimension accepted by [`intersect_translates`].
pub const INTERSECT_MAX_DIM: usize = 4;
/// Largest dimension accepted by [`carve_complement`] and [`complement_stratification`].
pub const CARVE_MAX_DIM: usize = 3;

/// `poly ∩ coset`.
#[derive(Clone, Debug)]
pub struct Region {
    pub poly: Polyhedron,
    pub coset: Coset,
}

impl Region {
    /// The translate `b + A` as a region: the shifted cone over `A`
    /// intersected with `b + ZA`.
    pub fn translate(b: &[i64], a: &AffineSemigroup) -> Result<Region> {
        let d = a.dim();
        if b.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: b.len() });
        }
        let (ineqs, eqs) = a.solver().cone_rows();
        let mut poly = Polyhedron::whole_space(d);
        for h in ineqs {
            let rhs = linalg::dot(&h, b);
            poly.add_ineq(h, rhs);
        }
        for e in eqs {
            let rhs = linalg::dot(&e, b);
            poly.add_eq(e, rhs);
        }
        Ok(Region { poly, coset: Coset::new(b.to_vec(), a.gens())? })
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.poly.contains(x) && self.coset.contains(x)
    }

    pub fn intersect(&self, other: &Region) -> Result<Option<Region>> {
        Ok(self.coset.intersect(&other.coset)?.map(|coset| Region {
            poly: self.poly.intersect(&other.poly),
            coset,
        }))
    }

    /// `self ∖ other` as a list of pairwise disjoint regions.
    pub fn subtract(&self, other: &Region) -> Result<Vec<Region>> {
        let Some(common) = self.coset.intersect(&other.coset)? else {
            return Ok(vec![self.clone()]);
        };
        if self.poly.intersect(&other.poly).vertices().is_empty() {
            return Ok(vec![self.clone()]);
        }
        if common.rank() != self.coset.rank() {
            return Err(Error::UnsupportedGeometry(
                "subtracted set has lower dimension than the region".into(),
            ));
        }
        let mut out = Vec::new();
        // Cosets of the common lattice that miss `other` entirely.
        for r in self.coset.quotient_representatives(common.basis())? {
            let base = linalg::add(self.coset.base(), &r);
            if !common.contains(&base) {
                out.push(Region {
                    poly: self.poly.clone(),
                    coset: Coset::new(base, common.basis())?,
                });
            }
        }
        // Inside the common coset, split off the first violated constraint.
        let mut constraints: Vec<(Vec<i64>, i64)> = other.poly.ineqs().to_vec();
        for (e, c) in other.poly.eqs() {
            constraints.push((e.clone(), *c));
            constraints.push((linalg::neg(e), -c));
        }
        let mut rest = self.poly.clone();
        for (h, beta) in constraints {
            if holds_on_coset(&h, beta, &common) {
                continue;
            }
            let mut piece = rest.clone();
            piece.add_ineq(linalg::neg(&h), 1 - beta);
            if !piece.vertices().is_empty() {
                out.push(Region { poly: piece, coset: common.clone() });
            }
            rest.add_ineq(h, beta);
        }
        Ok(out)
    }

    /// Disjoint strata covering exactly the region.
    pub fn stratify(&self, limits: &Limits) -> Result<Vec<Stratum>> {
        let d = self.dim();
        let verts = self.poly.vertices();
        if verts.is_empty() {
            return Ok(Vec::new());
        }
        let rays = self.poly.recession_rays()?;
        if linalg::rank(&rays) != rays.len() {
            return Err(Error::UnsupportedGeometry("recession cone is not simplicial".into()));
        }
        let gens: Vec<Vec<i64>> = rays
            .iter()
            .map(|r| {
                self.coset
                    .minimal_multiple(r)
                    .ok_or_else(|| Error::UnsupportedGeometry(format!("recession ray {r:?} leaves the lattice span")))
            })
            .collect::<Result<_>>()?;
        let ell = positive_functional(&gens, d, limits)?.expect("independent vectors admit a positive functional");

        // Minimal elements have ℓ below max ℓ(vertex) + Σ ℓ(g).
        let vmax = verts
            .iter()
            .map(|v| {
                let s: linalg::Rat = v.iter().zip(&ell).map(|(x, &l)| x * linalg::rat(l)).sum();
                s.ceil().to_integer().to_i64().ok_or(Error::Overflow)
            })
            .collect::<Result<Vec<i64>>>()?
            .into_iter()
            .max()
            .expect("nonempty");
        let bound = vmax + gens.iter().map(|g| linalg::dot(&ell, g)).sum::<i64>();
        let pts = self.poly.lattice_points(&self.coset, &ell, bound, limits.point_cap)?;
        let minimal: Vec<&Vec<i64>> = pts
            .iter()
            .filter(|x| gens.iter().all(|g| !self.contains(&linalg::sub(x, g))))
            .collect();

        // Group minimal elements by class modulo Z{gens}, in generator coordinates.
        let solver = SpanSolver::new(&gens, d).expect("independent rays");
        let mut classes: Vec<(Vec<i64>, Vec<Vec<i64>>)> = Vec::new();
        for m in minimal {
            let hit = classes
                .iter_mut()
                .find_map(|(z, cs)| solver.integer_coords(&linalg::sub(m, z)).map(|c| (cs, c)));
            match hit {
                Some((cs, c)) => cs.push(c),
                None => classes.push((m.clone(), vec![vec![0; gens.len()]])),
            }
        }

        // Coordinate j is either pinned below the largest generator value or
        // free above it; membership in the up-set is constant on each cell.
        let mut by_free: BTreeMap<Vec<usize>, Vec<Vec<i64>>> = BTreeMap::new();
        for (z, coords) in &classes {
            let k = gens.len();
            let lo: Vec<i64> = (0..k).map(|j| coords.iter().map(|c| c[j]).min().unwrap_or(0)).collect();
            let hi: Vec<i64> = (0..k).map(|j| coords.iter().map(|c| c[j]).max().unwrap_or(0)).collect();
            let mut cells = 0usize;
            let mut result = Ok(());
            for_each_in_box(&lo, &hi, |corner| {
                cells += 1;
                if cells > limits.point_cap {
                    result = Err(Error::RegionTooLarge { cap: limits.point_cap });
                    return;
                }
                if !coords.iter().any(|c| c.iter().zip(corner).all(|(a, b)| a <= b)) {
                    return;
                }
                let free: Vec<usize> = (0..k).filter(|&j| corner[j] == hi[j]).collect();
                let mut point = z.clone();
                for (g, &c) in gens.iter().zip(corner) {
                    point = linalg::add(&point, &linalg::scale(g, c));
                }
                by_free.entry(free).or_default().push(point);
            });
            result?;
        }
        by_free
            .into_iter()
            .map(|(free, mut base)| {
                base.sort();
                let a = AffineSemigroup::new(d, free.iter().map(|&j| gens[j].clone()).collect())?;
                Stratum::new(base, a)
            })
            .collect()
    }
}

/// Whether `h·x >= beta` for every `x` in the coset.
fn holds_on_coset(h: &[i64], beta: i64, coset: &Coset) -> bool {
    coset.basis().iter().all(|g| linalg::dot(h, g) == 0) && linalg::dot(h, coset.base()) >= beta
}

/// Strata with identical semigroups merged into one.
fn merge(strata: Vec<Stratum>) -> Vec<Stratum> {
    let mut out: Vec<Stratum> = Vec::new();
    for s in strata {
        match out.iter_mut().find(|t| t.semigroup == s.semigroup) {
            Some(t) => {
                t.base.extend(s.base);
                t.base.sort();
            }
            None => out.push(s),
        }
    }
    out
}

fn check_dim(d: usize, max: usize) -> Result<()> {
    if d > max {
        return Err(Error::UnsupportedGeometry(format!("dimension {d} exceeds the set-algebra bound {max}")));
    }
    Ok(())
}

/// Sublevel used for the mandatory output check.
fn verification_level<'a>(
    ell: &[i64],
    bases: impl IntoIterator<Item = &'a Vec<i64>>,
    gens: impl IntoIterator<Item = &'a Vec<i64>>,
) -> i64 {
    let top = bases.into_iter().map(|b| linalg::dot(ell, b)).max().unwrap_or(0);
    let g: Vec<i64> = gens.into_iter().map(|g| linalg::dot(ell, g)).collect();
    top.max(0) + 2 * g.iter().copied().max().unwrap_or(1) * (g.len().max(1) as i64)
}

/// Checks that the strata are pairwise disjoint and cover exactly `expected`
/// on the sublevel.
pub(crate) fn verify_cover(
    out: &[Stratum],
    expected: &BTreeSet<Vec<i64>>,
    ell: &[i64],
    level: i64,
    limits: &Limits,
) -> Result<()> {
    let mut seen = BTreeSet::new();
    for s in out {
        for p in s.points_up_to(ell, level, limits)? {
            if !seen.insert(p.clone()) {
                return Err(Error::VerificationFailed(p));
            }
        }
    }
    let first_bad = seen
        .symmetric_difference(expected)
        .min_by_key(|p| (linalg::dot(ell, p), (*p).clone()));
    match first_bad {
        Some(p) => Err(Error::VerificationFailed(p.clone())),
        None => Ok(()),
    }
}

/// `(b1 + A1) ∩ (b2 + A2)` as disjoint strata.
pub fn intersect_translates(
    b1: &[i64],
    a1: &AffineSemigroup,
    b2: &[i64],
    a2: &AffineSemigroup,
    limits: &Limits,
) -> Result<Vec<Stratum>> {
    let d = a1.dim();
    if a2.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a2.dim() });
    }
    check_dim(d, INTERSECT_MAX_DIM)?;
    let r1 = Region::translate(b1, a1)?;
    let r2 = Region::translate(b2, a2)?;
    let out = match r1.intersect(&r2)? {
        Some(r) => merge(r.stratify(limits)?),
        None => Vec::new(),
    };

    let ell = positive_functional(a1.gens(), d, limits)?.expect("independent generators");
    let bases: Vec<Vec<i64>> = out.iter().flat_map(|s| s.base.clone()).chain([b1.to_vec()]).collect();
    let level = verification_level(&ell, &bases, a1.gens().iter().chain(a2.gens()));
    let s1 = Stratum::new(vec![b1.to_vec()], a1.clone())?;
    let expected: BTreeSet<Vec<i64>> = s1
        .points_up_to(&ell, level, limits)?
        .into_iter()
        .filter(|v| a2.contains(&linalg::sub(v, b2)))
        .collect();
    verify_cover(&out, &expected, &ell, level, limits)?;
    Ok(out)
}

/// `region ∖ (b + A)`, for a translate contained in the region.
pub fn carve_complement(region: &Region, b: &[i64], a: &AffineSemigroup, limits: &Limits) -> Result<Vec<Stratum>> {
    let d = region.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
    }
    check_dim(d, CARVE_MAX_DIM)?;
    let rays = region.poly.recession_rays()?;
    let ell = positive_functional(&rays, d, limits)?
        .ok_or_else(|| Error::UnsupportedGeometry("region has no positive functional".into()))?;
    let translate = Stratum::new(vec![b.to_vec()], a.clone())?;

    let out: Vec<Stratum> = region
        .subtract(&Region::translate(b, a)?)?
        .iter()
        .map(|r| r.stratify(limits))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let out = merge(out);

    let bases: Vec<Vec<i64>> = out.iter().flat_map(|s| s.base.clone()).chain([b.to_vec()]).collect();
    let level = verification_level(&ell, &bases, a.gens().iter().chain(&rays));
    for v in translate.points_up_to(&ell, level, limits)? {
        if !region.contains(&v) {
            return Err(Error::ContainmentViolated(v));
        }
    }
    let expected: BTreeSet<Vec<i64>> = region
        .poly
        .lattice_points(&region.coset, &ell, level, limits.point_cap)?
        .into_iter()
        .filter(|v| !translate.contains(v))
        .collect();
    verify_cover(&out, &expected, &ell, level, limits)?;
    Ok(out)
}

/// A stratification of `SA ∖ SB`, for `SB ⊆ SA`.
pub fn complement_stratification(
    sa: &AffineStratification,
    sb: &AffineStratification,
    limits: &Limits,
) -> Result<AffineStratification> {
    let d = sa.dim();
    if sb.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: sb.dim() });
    }
    for s in sa.strata().iter().chain(sb.strata()) {
        if let Some((x, y)) = s.overlapping_translates() {
            return Err(Error::OverlappingTranslates(x, y));
        }
    }
    if sb.strata().is_empty() {
        return Ok(sa.clone());
    }
    check_dim(d, CARVE_MAX_DIM)?;
    let all_gens: Vec<Vec<i64>> = sa.generators().chain(sb.generators()).cloned().collect();
    let ell = positive_functional(&all_gens, d, limits)?
        .ok_or_else(|| Error::UnsupportedGeometry("strata admit no common positive functional".into()))?;
    let bases: Vec<Vec<i64>> = sa.strata().iter().chain(sb.strata()).flat_map(|s| s.base.clone()).collect();
    let level = verification_level(&ell, &bases, &all_gens);
    for v in sb.points_up_to(&ell, level, limits)? {
        if !sa.contains(&v) {
            return Err(Error::ContainmentViolated(v));
        }
    }

    let removed: Vec<Region> = sb
        .strata()
        .iter()
        .flat_map(|s| s.base.iter().map(move |c| Region::translate(c, &s.semigroup)))
        .collect::<Result<_>>()?;
    let mut strata = Vec::new();
    for s in sa.strata() {
        for b in &s.base {
            let mut pieces = vec![Region::translate(b, &s.semigroup)?];
            for u in &removed {
                let mut next = Vec::new();
                for r in &pieces {
                    next.extend(r.subtract(u)?);
                }
                pieces = next;
            }
            for r in &pieces {
                strata.extend(r.stratify(limits)?);
            }
        }
    }
    let out = AffineStratification::new(d, merge(strata))?;

    let level = verification_level(&ell, out.strata().iter().flat_map(|s| &s.base).chain(&bases), &all_gens);
    let expected: BTreeSet<Vec<i64>> = sa
        .points_up_to(&ell, level, limits)?
        .into_iter()
        .filter(|v| !sb.contains(v))
        .collect();
    verify_cover(out.strata(), &expected, &ell, level, limits)?;
    Ok(out)
}
