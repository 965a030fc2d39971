//! Rational polyhedra in H-representation at desk scale: vertex and
//! extreme-ray enumeration by exhaustive subset solving, and lattice-point
//! enumeration over bounding boxes.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::hnf::Coset;
use crate::linalg::{self, Rat};

/// `{x : eq·x = b for every equation, ineq·x >= b for every inequality}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    dim: usize,
    eqs: Vec<(Vec<i64>, i64)>,
    ineqs: Vec<(Vec<i64>, i64)>,
}

impl Polyhedron {
    pub fn whole_space(dim: usize) -> Self {
        Self { dim, eqs: Vec::new(), ineqs: Vec::new() }
    }

    /// The orthant shifted to `apex`.
    pub fn shifted_orthant(apex: &[i64]) -> Self {
        let d = apex.len();
        let mut p = Self::whole_space(d);
        for (i, &a) in apex.iter().enumerate() {
            p.add_ineq(linalg::unit(d, i), a);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_eq(&mut self, row: Vec<i64>, rhs: i64) {
        debug_assert_eq!(row.len(), self.dim);
        if !self.eqs.contains(&(row.clone(), rhs)) {
            self.eqs.push((row, rhs));
        }
    }

    pub fn add_ineq(&mut self, row: Vec<i64>, rhs: i64) {
        debug_assert_eq!(row.len(), self.dim);
        if !self.ineqs.contains(&(row.clone(), rhs)) {
            self.ineqs.push((row, rhs));
        }
    }

    pub fn ineqs(&self) -> &[(Vec<i64>, i64)] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[(Vec<i64>, i64)] {
        &self.eqs
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        let mut p = self.clone();
        for (r, b) in &other.eqs {
            p.add_eq(r.clone(), *b);
        }
        for (r, b) in &other.ineqs {
            p.add_ineq(r.clone(), *b);
        }
        p
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.eqs.iter().all(|(r, b)| linalg::dot(r, x) == *b)
            && self.ineqs.iter().all(|(r, b)| linalg::dot(r, x) >= *b)
    }

    fn contains_rat(&self, x: &[Rat]) -> bool {
        let eval = |r: &[i64]| -> Rat { r.iter().zip(x).map(|(&a, xi)| linalg::rat(a) * xi).sum() };
        self.eqs.iter().all(|(r, b)| eval(r) == linalg::rat(*b))
            && self.ineqs.iter().all(|(r, b)| eval(r) >= linalg::rat(*b))
    }

    fn eq_rows(&self) -> Vec<Vec<i64>> {
        self.eqs.iter().map(|(r, _)| r.clone()).collect()
    }

    /// True when the lineality space is trivial.
    pub fn is_pointed(&self) -> bool {
        let rows: Vec<Vec<i64>> = self
            .eqs
            .iter()
            .chain(&self.ineqs)
            .map(|(r, _)| r.clone())
            .collect();
        linalg::rank(&rows) == self.dim
    }

    /// All vertices of a pointed polyhedron; empty iff the polyhedron is empty.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let d = self.dim;
        let eq_rank = linalg::rank(&self.eq_rows());
        let mut found = BTreeSet::new();
        if eq_rank > d {
            return Vec::new();
        }
        for subset in combinations(self.ineqs.len(), d - eq_rank) {
            let mut rows = self.eq_rows();
            let mut rhs: Vec<i64> = self.eqs.iter().map(|(_, b)| *b).collect();
            for &i in &subset {
                rows.push(self.ineqs[i].0.clone());
                rhs.push(self.ineqs[i].1);
            }
            if let Some(x) = linalg::solve_unique(&rows, &rhs) {
                if self.contains_rat(&x) {
                    found.insert(x);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Primitive generators of the extreme rays of the recession cone.
    pub fn recession_rays(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_pointed() {
            return Err(Error::UnsupportedGeometry("polyhedron contains a line".into()));
        }
        let d = self.dim;
        let eq_rank = linalg::rank(&self.eq_rows());
        if eq_rank >= d {
            return Ok(Vec::new());
        }
        let mut rays: Vec<Vec<i64>> = Vec::new();
        for subset in combinations(self.ineqs.len(), d - eq_rank - 1) {
            let mut rows = self.eq_rows();
            rows.extend(subset.iter().map(|&i| self.ineqs[i].0.clone()));
            let ns = linalg::nullspace(&rows, d);
            if ns.len() != 1 {
                continue;
            }
            for cand in [ns[0].clone(), linalg::neg(&ns[0])] {
                if self.ineqs.iter().all(|(r, _)| linalg::dot(r, &cand) >= 0) && !rays.contains(&cand) {
                    rays.push(cand);
                }
            }
        }
        rays.sort();
        Ok(rays)
    }

    /// Integer bounding box of `self ∩ {ell·x <= bound}`, or `None` if empty.
    /// The caller guarantees that `ell` is positive on every recession ray.
    pub fn bounding_box(&self, ell: &[i64], bound: i64) -> Result<Option<(Vec<i64>, Vec<i64>)>> {
        let mut truncated = self.clone();
        truncated.add_ineq(linalg::neg(ell), -bound);
        let verts = truncated.vertices();
        if verts.is_empty() {
            return Ok(None);
        }
        let d = self.dim;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for v in &verts {
            for i in 0..d {
                let f = v[i].floor().to_integer().to_i64().ok_or(Error::Overflow)?;
                let c = v[i].ceil().to_integer().to_i64().ok_or(Error::Overflow)?;
                lo[i] = lo[i].min(f);
                hi[i] = hi[i].max(c);
            }
        }
        Ok(Some((lo, hi)))
    }

    /// Points of `self ∩ coset` with `ell·x <= bound`, sorted by `(ell·x, x)`.
    pub fn lattice_points(&self, coset: &Coset, ell: &[i64], bound: i64, cap: usize) -> Result<Vec<Vec<i64>>> {
        let Some((lo, hi)) = self.bounding_box(ell, bound)? else {
            return Ok(Vec::new());
        };
        let volume = lo
            .iter()
            .zip(&hi)
            .try_fold(1u128, |acc, (l, h)| acc.checked_mul((h - l + 1) as u128))
            .ok_or(Error::RegionTooLarge { cap })?;
        if volume > (cap as u128).saturating_mul(64) {
            return Err(Error::RegionTooLarge { cap });
        }
        let mut out = Vec::new();
        for_each_in_box(&lo, &hi, |x| {
            if linalg::dot(ell, x) <= bound && self.contains(x) && coset.contains(x) {
                out.push(x.to_vec());
            }
        });
        if out.len() > cap {
            return Err(Error::RegionTooLarge { cap });
        }
        out.sort_by_key(|x| (linalg::dot(ell, x), x.clone()));
        Ok(out)
    }
}

/// Calls `f` on every integer point of the box `[lo, hi]`.
pub fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut x = lo.to_vec();
    loop {
        f(&x);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i];
            i += 1;
        }
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
