//! Fourier–Motzkin elimination over exact rationals.
//!
//! Decides feasibility of a system `a_i · x >= b_i` and, when feasible,
//! produces a witness point by back-substitution through the stored stages.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linalg::Rat;

/// One inequality `coeffs · x >= rhs` with integer data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<BigInt>,
    rhs: BigInt,
}

impl Row {
    fn normalized(mut self) -> Self {
        let g = self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && g != BigInt::from(1) {
            for c in self.coeffs.iter_mut() {
                *c /= &g;
            }
            self.rhs /= &g;
        }
        self
    }
}

/// A feasibility problem `rows · x >= rhs` in `dim` unknowns.
#[derive(Clone, Debug)]
pub struct System {
    dim: usize,
    rows: Vec<Row>,
}

impl System {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    /// Adds `coeffs · x >= rhs`.
    pub fn push(&mut self, coeffs: &[i64], rhs: i64) {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.rows.push(
            Row {
                coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
                rhs: BigInt::from(rhs),
            }
            .normalized(),
        );
    }

    /// Returns a feasible rational point, or `None` if the system is infeasible.
    ///
    /// Back-substitution picks, for every variable, the smallest integer
    /// inside its bounds when one exists, so small feasible integer points are
    /// found directly.
    pub fn solve(&self) -> Option<Vec<Rat>> {
        let mut stages: Vec<(usize, Vec<Row>)> = Vec::with_capacity(self.dim);
        let mut current = dedup(self.rows.clone());
        let mut remaining: Vec<usize> = (0..self.dim).collect();
        if !consistent_constants(&current) {
            return None;
        }
        while !remaining.is_empty() {
            let (pos_in_remaining, var) = remaining
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| {
                    let pos = current.iter().filter(|r| r.coeffs[v].is_positive()).count();
                    let neg = current.iter().filter(|r| r.coeffs[v].is_negative()).count();
                    (pos * neg) as i64 - (pos + neg) as i64
                })
                .map(|(i, &v)| (i, v))
                .expect("nonempty");
            remaining.remove(pos_in_remaining);
            let next = eliminate(&current, var);
            stages.push((var, current));
            current = dedup(next);
            if !consistent_constants(&current) {
                return None;
            }
        }

        let mut x: Vec<Option<Rat>> = vec![None; self.dim];
        for (var, rows) in stages.iter().rev() {
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for row in rows {
                let c = &row.coeffs[*var];
                if c.is_zero() {
                    continue;
                }
                let mut rest = Rat::from_integer(row.rhs.clone());
                for (j, a) in row.coeffs.iter().enumerate() {
                    if j != *var && !a.is_zero() {
                        let xj = x[j].as_ref().expect("later variables assigned first");
                        rest -= Rat::from_integer(a.clone()) * xj;
                    }
                }
                let bound = rest / Rat::from_integer(c.clone());
                if c.is_positive() {
                    if lo.as_ref().is_none_or(|l| bound > *l) {
                        lo = Some(bound);
                    }
                } else if hi.as_ref().is_none_or(|h| bound < *h) {
                    hi = Some(bound);
                }
            }
            let candidate = match (&lo, &hi) {
                (Some(l), _) => l.ceil(),
                (None, Some(h)) if h.is_negative() => h.floor(),
                _ => Rat::zero(),
            };
            let value = match (&lo, &hi) {
                (Some(l), Some(h)) if candidate > *h => l.clone(),
                _ => candidate,
            };
            x[*var] = Some(value);
        }
        Some(x.into_iter().map(|v| v.unwrap_or_else(Rat::zero)).collect())
    }
}

fn dedup(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = HashSet::new();
    rows.into_iter()
        .filter(|r| !(r.coeffs.iter().all(Zero::is_zero) && !r.rhs.is_positive()))
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

fn consistent_constants(rows: &[Row]) -> bool {
    rows.iter()
        .all(|r| !r.coeffs.iter().all(Zero::is_zero) || !r.rhs.is_positive())
}

fn eliminate(rows: &[Row], var: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for r in rows {
        let c = &r.coeffs[var];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(r.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let alpha = p.coeffs[var].clone();
            let beta = -n.coeffs[var].clone();
            let coeffs = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(a, b)| &beta * a + &alpha * b)
                .collect();
            let rhs = &beta * &p.rhs + &alpha * &n.rhs;
            out.push(Row { coeffs, rhs }.normalized());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::integral;

    fn satisfies(rows: &[(Vec<i64>, i64)], x: &[Rat]) -> bool {
        rows.iter().all(|(a, b)| {
            let lhs: Rat = a.iter().zip(x).map(|(&ai, xi)| Rat::from_integer(ai.into()) * xi).sum();
            lhs >= Rat::from_integer((*b).into())
        })
    }

    #[test]
    fn small_feasible_system() {
        let rows = vec![(vec![1, 0], 1), (vec![0, 1], 1), (vec![-1, 1], 1)];
        let mut s = System::new(2);
        for (a, b) in &rows {
            s.push(a, *b);
        }
        let x = s.solve().unwrap();
        assert!(satisfies(&rows, &x));
        assert_eq!(integral(&x), Some(vec![1, 2]));
    }

    #[test]
    fn infeasible_system() {
        let mut s = System::new(1);
        s.push(&[1], 1);
        s.push(&[-1], 1);
        assert!(s.solve().is_none());
    }

    #[test]
    fn fractional_bounds() {
        // 2x >= 1, -2x >= -1  forces x = 1/2.
        let rows = vec![(vec![2], 1), (vec![-2], -1)];
        let mut s = System::new(1);
        for (a, b) in &rows {
            s.push(a, *b);
        }
        let x = s.solve().unwrap();
        assert!(satisfies(&rows, &x));
        assert_eq!(x[0], Rat::new(1.into(), 2.into()));
    }

    #[test]
    fn unconstrained_variable_defaults_to_zero() {
        let mut s = System::new(3);
        s.push(&[0, 1, 0], 4);
        let x = s.solve().unwrap();
        assert_eq!(integral(&x), Some(vec![0, 4, 0]));
    }
}
