//! Exact linear algebra over the rationals and small integer-vector helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[i64], k: i64) -> Vec<i64> {
    a.iter().map(|x| x * k).collect()
}

pub fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[i64]) -> bool {
    a.iter().all(|&x| x == 0)
}

pub fn unit(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

/// Divides out the gcd of the entries; the zero vector is returned as is.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

pub fn rat(x: i64) -> Rat {
    Rat::from_integer(BigInt::from(x))
}

pub fn to_rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

/// Scales a rational vector by the lcm of its denominators and returns the
/// resulting primitive integer vector (same direction, positive multiple).
pub fn clear_denominators(v: &[Rat]) -> Result<Vec<i64>> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| if g.is_zero() { big_to_i64(x) } else { big_to_i64(&(x / &g)) })
        .collect()
}

/// Returns the vector as integers if every entry is integral.
pub fn integral(v: &[Rat]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
        .collect()
}

/// Row-reduces `m` in place to reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| to_rat_vec(r)).collect();
    rref(&mut m).len()
}

/// Primitive integer basis of `{x : row · x = 0 for every row}` in dimension `d`.
pub fn nullspace(rows: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| to_rat_vec(r)).collect();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); d];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            clear_denominators(&v).expect("nullspace entries fit in i64")
        })
        .collect()
}

/// Solves `rows · x = rhs`; returns the unique solution, or `None` when the
/// system is inconsistent or underdetermined.
pub fn solve_unique(rows: &[Vec<i64>], rhs: &[i64]) -> Option<Vec<Rat>> {
    let d = rows.first()?.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row = to_rat_vec(r);
            row.push(rat(b));
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&d) || pivots.len() != d {
        return None;
    }
    Some((0..d).map(|i| m[i][d].clone()).collect())
}

/// Coordinates with respect to a fixed list of linearly independent vectors.
///
/// Precomputes an integer matrix `T` and denominator `den` such that for `v`
/// in the span, the first `n` entries of `T v / den` are the coordinates of
/// `v` and the remaining entries vanish exactly when `v` lies in the span.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    n: usize,
    transform: Vec<Vec<i128>>,
    den: i128,
}

impl SpanSolver {
    /// Fails when the vectors are dependent.
    pub fn new(gens: &[Vec<i64>], d: usize) -> Option<Self> {
        let n = gens.len();
        // Augmented [G | I] with G having the generators as columns.
        let mut m: Vec<Vec<Rat>> = (0..d)
            .map(|i| {
                let mut row: Vec<Rat> = gens.iter().map(|g| rat(g[i])).collect();
                row.extend((0..d).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..d).find(|&i| !m[i][c].is_zero())?;
            m.swap(c, p);
            let inv = m[c][c].recip();
            for x in m[c].iter_mut() {
                *x *= &inv;
            }
            let pivot = m[c].clone();
            for (i, row) in m.iter_mut().enumerate().take(d) {
                if i != c && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, p) in row[..n + d].iter_mut().zip(&pivot[..n + d]) {
                        *x -= &f * p;
                    }
                }
            }
        }
        let lcm = m
            .iter()
            .flat_map(|r| r[n..].iter())
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let transform = m
            .iter()
            .map(|r| {
                r[n..]
                    .iter()
                    .map(|x| (x * &lcm).to_integer().to_i128())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            n,
            transform,
            den: lcm.to_i128()?,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn raw(&self, v: &[i64]) -> Vec<i128> {
        self.transform
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, &b)| a * b as i128).sum())
            .collect()
    }

    /// Rational coordinates, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &[i64]) -> Option<Vec<Rat>> {
        let raw = self.raw(v);
        if raw[self.n..].iter().any(|&x| x != 0) {
            return None;
        }
        Some(
            raw[..self.n]
                .iter()
                .map(|&x| Rat::new(BigInt::from(x), BigInt::from(self.den)))
                .collect(),
        )
    }

    /// Integer coordinates, or `None` if `v` is outside the integer span.
    pub fn integer_coords(&self, v: &[i64]) -> Option<Vec<i64>> {
        let raw = self.raw(v);
        if raw[self.n..].iter().any(|&x| x != 0) {
            return None;
        }
        raw[..self.n]
            .iter()
            .map(|&x| {
                if x % self.den == 0 {
                    i64::try_from(x / self.den).ok()
                } else {
                    None
                }
            })
            .collect()
    }

    /// True iff `v` is a nonnegative integer combination of the vectors.
    pub fn in_semigroup(&self, v: &[i64]) -> bool {
        self.integer_coords(v)
            .is_some_and(|c| c.iter().all(|&x| x >= 0))
    }

    /// Integer inequality rows `h` with `h · v >= 0` iff `v`'s coordinates are
    /// nonnegative, and equality rows `e` with `e · v = 0` iff `v` is in the span.
    pub fn cone_rows(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let to_row = |r: &Vec<i128>| {
            let g = r.iter().fold(0i128, |g, x| g.gcd(x)).max(1);
            r.iter().map(|x| (x / g) as i64).collect::<Vec<i64>>()
        };
        let ineq = self.transform[..self.n].iter().map(to_row).collect();
        let eq = self.transform[self.n..]
            .iter()
            .map(to_row)
            .filter(|r: &Vec<i64>| !is_zero(r))
            .collect();
        (ineq, eq)
    }
}

pub fn ceil_rat(x: &Rat) -> Rat {
    x.ceil()
}

pub fn floor_rat(x: &Rat) -> Rat {
    x.floor()
}

/// `⌈log₂(|x| + 1)⌉`, which is the binary length of `|x|` and zero for zero.
pub fn bit_length(x: &BigInt) -> u64 {
    x.abs().bits()
}

pub fn bit_length_i64(x: i64) -> u64 {
    64 - x.unsigned_abs().leading_zeros() as u64
}
