//! Exact P/N labelling of sublevel regions by backward induction.
//!
//! Every move strictly lowers the validated functional `ℓ`, so the region
//! `{p ∈ Λ : ℓ·p <= L}` is closed under moves and can be solved exactly by
//! processing positions in increasing `ℓ`-order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::board::{LatticeGame, PointClass};
use crate::error::{Error, Result};
use crate::hnf::Coset;
use crate::linalg;
use crate::polyhedron::Polyhedron;
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    P,
    N,
    D,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::P => "P",
            Label::N => "N",
            Label::D => "D",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    P,
    N,
    D,
    OffBoard,
}

impl From<Label> for Classification {
    fn from(l: Label) -> Self {
        match l {
            Label::P => Classification::P,
            Label::N => Classification::N,
            Label::D => Classification::D,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::P => f.write_str("P"),
            Classification::N => f.write_str("N"),
            Classification::D => f.write_str("D"),
            Classification::OffBoard => f.write_str("OffBoard"),
        }
    }
}

/// Labels of every lattice point `p` with `ℓ·p <= level`, in `ℓ`-then-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedRegion {
    level: i64,
    ell: Vec<i64>,
    points: Vec<Vec<i64>>,
    labels: Vec<Label>,
    index: HashMap<Vec<i64>, usize>,
}

impl SolvedRegion {
    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self, p: &[i64]) -> Option<Label> {
        self.index.get(p).map(|&i| self.labels[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], Label)> {
        self.points.iter().map(Vec::as_slice).zip(self.labels.iter().copied())
    }

    pub fn positions_with(&self, label: Label) -> impl Iterator<Item = &[i64]> {
        self.iter().filter(move |(_, l)| *l == label).map(|(p, _)| p)
    }

    /// The sub-region at a lower level.
    pub fn restrict(&self, level: i64) -> SolvedRegion {
        let keep = self
            .points
            .iter()
            .take_while(|p| linalg::dot(&self.ell, p) <= level)
            .count();
        let points = self.points[..keep].to_vec();
        let labels = self.labels[..keep].to_vec();
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        SolvedRegion { level, ell: self.ell.clone(), points, labels, index }
    }

    /// One line per point: coordinates then label, separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, l) in self.iter() {
            for x in p {
                out.push_str(&x.to_string());
                out.push(' ');
            }
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

/// Lattice points of the board cone with `ℓ·p <= level`, sorted `ℓ`-then-lex.
pub fn sublevel_points(game: &LatticeGame, level: i64, limits: &Limits) -> Result<Vec<Vec<i64>>> {
    let ell = game.ell();
    let mut pts = if game.cone().is_orthant() {
        let mut out = Vec::new();
        let mut cur = vec![0i64; game.dim()];
        orthant_points(ell, 0, level, &mut cur, &mut out, limits.point_cap)?;
        out
    } else {
        let mut poly = Polyhedron::whole_space(game.dim());
        for n in game.cone().facet_normals() {
            poly.add_ineq(n.clone(), 0);
        }
        poly.lattice_points(&Coset::integer_lattice(game.dim()), ell, level, limits.point_cap)?
    };
    pts.sort_by_cached_key(|p| (linalg::dot(ell, p), p.clone()));
    Ok(pts)
}

fn orthant_points(
    ell: &[i64],
    i: usize,
    budget: i64,
    cur: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    cap: usize,
) -> Result<()> {
    if budget < 0 {
        return Ok(());
    }
    if i == ell.len() {
        if out.len() >= cap {
            return Err(Error::RegionTooLarge { cap });
        }
        out.push(cur.clone());
        return Ok(());
    }
    let mut k = 0;
    while k * ell[i] <= budget {
        cur[i] = k;
        orthant_points(ell, i + 1, budget - k * ell[i], cur, out, cap)?;
        k += 1;
    }
    cur[i] = 0;
    Ok(())
}

/// Solves the sublevel `ℓ·p <= level` from scratch.
pub fn solve_sublevel(game: &LatticeGame, level: i64, limits: &Limits) -> Result<SolvedRegion> {
    label_points(game, level, sublevel_points(game, level, limits)?, None)
}

/// Solves a higher sublevel, reusing the labels of an already solved one.
pub fn extend_region(
    game: &LatticeGame,
    region: &SolvedRegion,
    level: i64,
    limits: &Limits,
) -> Result<SolvedRegion> {
    if level <= region.level {
        return Ok(region.restrict(level));
    }
    label_points(game, level, sublevel_points(game, level, limits)?, Some(region))
}

fn label_points(
    game: &LatticeGame,
    level: i64,
    points: Vec<Vec<i64>>,
    known: Option<&SolvedRegion>,
) -> Result<SolvedRegion> {
    let index: HashMap<Vec<i64>, usize> = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let mut labels = Vec::with_capacity(points.len());
    for p in &points {
        if let Some(l) = known.and_then(|k| k.label(p)) {
            labels.push(l);
            continue;
        }
        let label = match game.classify_point(p) {
            PointClass::Defeated => Label::D,
            PointClass::OffLattice => unreachable!("sublevel points lie in the cone"),
            PointClass::Board => {
                let wins = game.moves().iter().any(|g| {
                    let q = linalg::sub(p, g);
                    game.board_contains(&q)
                        && labels[*index.get(&q).expect("move-closed sublevel")] == Label::P
                });
                if wins {
                    Label::N
                } else {
                    Label::P
                }
            }
        };
        labels.push(label);
    }
    Ok(SolvedRegion {
        level,
        ell: game.ell().to_vec(),
        points,
        labels,
        index,
    })
}

/// On-demand classifier with a memoized solved region that only grows.
#[derive(Debug)]
pub struct Oracle {
    game: LatticeGame,
    limits: Limits,
    cache: Mutex<Option<Arc<SolvedRegion>>>,
}

impl Oracle {
    pub fn new(game: LatticeGame) -> Self {
        Self::with_limits(game, Limits::default())
    }

    pub fn with_limits(game: LatticeGame, limits: Limits) -> Self {
        Self { game, limits, cache: Mutex::new(None) }
    }

    pub fn game(&self) -> &LatticeGame {
        &self.game
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// A solved region covering at least `level`.
    pub fn region(&self, level: i64) -> Result<Arc<SolvedRegion>> {
        let mut cache = self.cache.lock().expect("oracle cache poisoned");
        if let Some(r) = cache.as_ref() {
            if r.level >= level {
                return Ok(Arc::clone(r));
            }
        }
        let solved = match cache.as_ref() {
            Some(r) => extend_region(&self.game, r, level, &self.limits)?,
            None => solve_sublevel(&self.game, level, &self.limits)?,
        };
        let solved = Arc::new(solved);
        *cache = Some(Arc::clone(&solved));
        Ok(solved)
    }

    pub fn classify(&self, p: &[i64]) -> Result<Classification> {
        if p.len() != self.game.dim() {
            return Err(Error::DimensionMismatch { expected: self.game.dim(), found: p.len() });
        }
        match self.game.classify_point(p) {
            PointClass::OffLattice => Ok(Classification::OffBoard),
            PointClass::Defeated => Ok(Classification::D),
            PointClass::Board => {
                let region = self.region(self.game.level(p))?;
                Ok(region.label(p).expect("point inside solved region").into())
            }
        }
    }

    pub fn is_p(&self, p: &[i64]) -> Result<bool> {
        Ok(self.classify(p)? == Classification::P)
    }
}
