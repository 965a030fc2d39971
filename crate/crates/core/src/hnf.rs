//! Column Hermite normal form, integer linear systems and lattice cosets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, big_to_i64, SpanSolver};

/// Column echelon form `H = M U` of a `rows × cols` integer matrix with `U`
/// unimodular. The first `rank` columns of `H` carry the pivots, in
/// increasing pivot-row order; the remaining columns are zero.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub h: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>,
    pub pivot_rows: Vec<usize>,
}

impl ColumnHnf {
    pub fn new(m: &[Vec<i64>], cols: usize) -> Self {
        let rows = m.len();
        let mut h: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mut u: Vec<Vec<BigInt>> = (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        let mut pivot_rows = Vec::new();
        let mut c = 0;
        for i in 0..rows {
            if c == cols {
                break;
            }
            for j in c + 1..cols {
                if h[i][j].is_zero() {
                    continue;
                }
                // Combine columns c and j so that column j vanishes in row i.
                let a = h[i][c].clone();
                let b = h[i][j].clone();
                let e = a.extended_gcd(&b);
                let (g, x, y) = (e.gcd, e.x, e.y);
                let (p, q) = (&a / &g, &b / &g);
                combine_columns(&mut h, c, j, &x, &y, &p, &q);
                combine_columns(&mut u, c, j, &x, &y, &p, &q);
            }
            if h[i][c].is_zero() {
                continue;
            }
            if h[i][c].is_negative() {
                negate_column(&mut h, c);
                negate_column(&mut u, c);
            }
            // Reduce entries left of the pivot into [0, pivot).
            for k in 0..c {
                let f = h[i][k].div_floor(&h[i][c]);
                if !f.is_zero() {
                    sub_column_multiple(&mut h, k, c, &f);
                    sub_column_multiple(&mut u, k, c, &f);
                }
            }
            pivot_rows.push(i);
            c += 1;
        }
        Self { h, u, pivot_rows }
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    /// Integer solution `y` of `M y = r`, if any.
    pub fn solve(&self, r: &[i64]) -> Option<Vec<BigInt>> {
        let cols = self.u.len();
        let mut z = vec![BigInt::zero(); cols];
        for (k, &pr) in self.pivot_rows.iter().enumerate() {
            let mut acc = BigInt::from(r[pr]);
            for (j, zj) in z.iter().enumerate().take(k) {
                acc -= &self.h[pr][j] * zj;
            }
            let (q, rem) = acc.div_rem(&self.h[pr][k]);
            if !rem.is_zero() {
                return None;
            }
            z[k] = q;
        }
        // Rows without pivots must be satisfied as well.
        for (i, row) in self.h.iter().enumerate() {
            let lhs: BigInt = row.iter().zip(&z).map(|(a, b)| a * b).sum();
            if lhs != BigInt::from(r[i]) {
                return None;
            }
        }
        Some(
            (0..cols)
                .map(|i| self.u[i].iter().zip(&z).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Basis of the integer kernel of `M`.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let cols = self.u.len();
        (self.rank()..cols)
            .map(|k| (0..cols).map(|i| self.u[i][k].clone()).collect())
            .collect()
    }

    /// Nonzero columns of `H`: a basis of the lattice spanned by the columns of `M`.
    pub fn basis(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rank())
            .map(|k| self.h.iter().map(|row| big_to_i64(&row[k])).collect())
            .collect()
    }
}

fn combine_columns(
    m: &mut [Vec<BigInt>],
    c: usize,
    j: usize,
    x: &BigInt,
    y: &BigInt,
    p: &BigInt,
    q: &BigInt,
) {
    // [col_c, col_j] <- [x col_c + y col_j, -q col_c + p col_j]; determinant x p + y q = 1.
    for row in m.iter_mut() {
        let a = row[c].clone();
        let b = row[j].clone();
        row[c] = x * &a + y * &b;
        row[j] = p * &b - q * &a;
    }
}

fn negate_column(m: &mut [Vec<BigInt>], c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c].clone();
    }
}

fn sub_column_multiple(m: &mut [Vec<BigInt>], k: usize, c: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let t = f * &row[c];
        row[k] -= t;
    }
}

/// Canonical (column HNF) basis of the lattice generated by `gens` in `Z^d`.
pub fn lattice_basis(gens: &[Vec<i64>], d: usize) -> Result<Vec<Vec<i64>>> {
    let m: Vec<Vec<i64>> = (0..d).map(|i| gens.iter().map(|g| g[i]).collect()).collect();
    let hnf = ColumnHnf::new(&m, gens.len());
    hnf.basis()
}

/// A coset `base + L` of a lattice `L ⊆ Z^d` with a fixed independent basis.
#[derive(Clone, Debug)]
pub struct Coset {
    base: Vec<i64>,
    basis: Vec<Vec<i64>>,
    solver: SpanSolver,
}

impl Coset {
    pub fn new(base: Vec<i64>, gens: &[Vec<i64>]) -> Result<Self> {
        let d = base.len();
        let basis = lattice_basis(gens, d)?;
        let solver = SpanSolver::new(&basis, d).expect("HNF basis is independent");
        Ok(Self { base, basis, solver })
    }

    /// The full lattice `Z^d`.
    pub fn integer_lattice(d: usize) -> Self {
        let gens: Vec<Vec<i64>> = (0..d).map(|i| linalg::unit(d, i)).collect();
        Self::new(vec![0; d], &gens).expect("unit basis")
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.solver.integer_coords(&linalg::sub(x, &self.base)).is_some()
    }

    /// Lattice-only membership (ignoring the base point).
    pub fn lattice_contains(&self, v: &[i64]) -> bool {
        self.solver.integer_coords(v).is_some()
    }

    /// Smallest positive multiple of `r` lying in the lattice, if `r` is in its span.
    pub fn minimal_multiple(&self, r: &[i64]) -> Option<Vec<i64>> {
        let coords = self.solver.coords(r)?;
        let lcm = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let k = i64::try_from(lcm).ok()?;
        Some(linalg::scale(r, k))
    }

    /// `(self) ∩ (other)`, computed by solving the coupled integer system.
    pub fn intersect(&self, other: &Coset) -> Result<Option<Coset>> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: other.dim() });
        }
        let n1 = self.rank();
        let n2 = other.rank();
        // [B1 | -B2] (u; w) = base2 - base1
        let m: Vec<Vec<i64>> = (0..d)
            .map(|i| {
                self.basis
                    .iter()
                    .map(|b| b[i])
                    .chain(other.basis.iter().map(|b| -b[i]))
                    .collect()
            })
            .collect();
        let hnf = ColumnHnf::new(&m, n1 + n2);
        let rhs = linalg::sub(&other.base, &self.base);
        let Some(sol) = hnf.solve(&rhs) else {
            return Ok(None);
        };
        let image = |u: &[BigInt]| -> Result<Vec<i64>> {
            (0..d)
                .map(|i| {
                    let s: BigInt = self
                        .basis
                        .iter()
                        .zip(u)
                        .map(|(b, ui)| BigInt::from(b[i]) * ui)
                        .sum();
                    big_to_i64(&s)
                })
                .collect()
        };
        let offset = image(&sol[..n1])?;
        let base = linalg::add(&self.base, &offset);
        let gens: Vec<Vec<i64>> = hnf
            .kernel()
            .iter()
            .map(|k| image(&k[..n1]))
            .collect::<Result<_>>()?;
        Ok(Some(Coset::new(base, &gens)?))
    }

    /// Representatives of the cosets of the sublattice generated by `sub`
    /// (independent, full rank in this lattice's span) inside this lattice.
    pub fn quotient_representatives(&self, sub: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
        let d = self.dim();
        let solver = SpanSolver::new(sub, d)
            .ok_or_else(|| Error::UnsupportedGeometry("dependent sublattice generators".into()))?;
        // Lattice points in the half-open parallelepiped spanned by `sub`.
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for mask in 0u32..(1 << sub.len()) {
            let mut corner = vec![0i64; d];
            for (j, g) in sub.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    corner = linalg::add(&corner, g);
                }
            }
            for i in 0..d {
                lo[i] = lo[i].min(corner[i]);
                hi[i] = hi[i].max(corner[i]);
            }
        }
        let mut reps = Vec::new();
        let mut point = lo.clone();
        loop {
            if self.lattice_contains(&point) {
                if let Some(c) = solver.coords(&point) {
                    let zero = num_rational::BigRational::zero();
                    let one = num_rational::BigRational::one();
                    if c.iter().all(|x| *x >= zero && *x < one) {
                        reps.push(point.clone());
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    reps.sort();
                    return Ok(reps);
                }
                if point[i] < hi[i] {
                    point[i] += 1;
                    break;
                }
                point[i] = lo[i];
                i += 1;
            }
        }
    }
}
