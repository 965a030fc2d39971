//! Encoders for concrete heap games.
//!
//! Coordinate `i` (zero-based) of a position counts the heaps of size `i + 1`,
//! so a move on one heap is a short integer vector.

use serde::{Deserialize, Serialize};

use crate::board::{Cone, GameBoard, LatticeGame, RuleSet};
use crate::error::{Error, Result};
use crate::linalg;

/// Largest heap size accepted by [`nim`].
pub const NIM_MAX_HEAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayMode {
    /// No defeated positions; a player without a move loses.
    Normal,
    /// The empty position is defeated, so taking the last token loses.
    Misere,
}

impl PlayMode {
    fn defeated(self, d: usize) -> Vec<Vec<i64>> {
        match self {
            PlayMode::Normal => Vec::new(),
            PlayMode::Misere => vec![vec![0; d]],
        }
    }
}

/// One way of changing a single heap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HeapMove {
    /// Take a whole heap of this size.
    Remove { heap: usize },
    /// Reduce a heap from `from` to `to` tokens, `0 < to < from`.
    Shrink { from: usize, to: usize },
    /// Replace a heap of size `from` by two nonempty heaps.
    Split { from: usize, into: [usize; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeapGameSpec {
    pub max_heap: usize,
    pub moves: Vec<HeapMove>,
    pub play_mode: PlayMode,
}

impl HeapGameSpec {
    /// Checks sizes and that no move increases the token count.
    pub fn validate(&self) -> Result<()> {
        let n = self.max_heap;
        if n == 0 {
            return Err(Error::InvalidHeapSpec("max_heap must be positive".into()));
        }
        if self.moves.is_empty() {
            return Err(Error::InvalidHeapSpec("no moves".into()));
        }
        let in_range = |h: usize| (1..=n).contains(&h);
        for m in &self.moves {
            let ok = match *m {
                HeapMove::Remove { heap } => in_range(heap),
                HeapMove::Shrink { from, to } => in_range(from) && in_range(to) && to < from,
                HeapMove::Split { from, into: [j, k] } => in_range(from) && in_range(j) && in_range(k) && j + k <= from,
            };
            if !ok {
                return Err(Error::InvalidHeapSpec(format!("{m:?} is out of range or adds tokens")));
            }
        }
        Ok(())
    }

    /// `Γ` in canonical order: removals by size, shrinks and splits lexicographically.
    pub fn rule_vectors(&self) -> Vec<Vec<i64>> {
        let mut moves = self.moves.clone();
        moves.sort();
        moves.dedup();
        let n = self.max_heap;
        let mut out: Vec<Vec<i64>> = Vec::new();
        for m in moves {
            let v = match m {
                HeapMove::Remove { heap } => linalg::unit(n, heap - 1),
                HeapMove::Shrink { from, to } => linalg::sub(&linalg::unit(n, from - 1), &linalg::unit(n, to - 1)),
                HeapMove::Split { from, into: [j, k] } => {
                    let mut v = linalg::unit(n, from - 1);
                    v[j - 1] -= 1;
                    v[k - 1] -= 1;
                    v
                }
            };
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

/// The NIM spec with heaps of size at most `n`.
pub fn nim_spec(n: usize, mode: PlayMode) -> HeapGameSpec {
    let mut moves: Vec<HeapMove> = (1..=n).map(|heap| HeapMove::Remove { heap }).collect();
    for from in 1..=n {
        for to in 1..from {
            moves.push(HeapMove::Shrink { from, to });
        }
    }
    HeapGameSpec { max_heap: n, moves, play_mode: mode }
}

/// NIM with heaps of size at most `n`.
pub fn nim(n: usize, mode: PlayMode) -> Result<LatticeGame> {
    if !(1..=NIM_MAX_HEAP).contains(&n) {
        return Err(Error::InvalidHeapSpec(format!("heap bound {n} is outside 1..={NIM_MAX_HEAP}")));
    }
    octal(&nim_spec(n, mode))
}

/// The lattice game of a heap spec; fails with the validation report when
/// the moves violate the lattice-game axioms.
pub fn octal(spec: &HeapGameSpec) -> Result<LatticeGame> {
    spec.validate()?;
    let d = spec.max_heap;
    let rules = RuleSet::new(d, spec.rule_vectors())?;
    LatticeGame::new(rules, GameBoard { cone: Cone::orthant(d), defeated_generators: spec.play_mode.defeated(d) })
}

/// The misère game on `N^5` whose eight moves are the columns of
/// ```text
///  1  0  0  0 -1  0  0  0
///  0  1  0  0  1 -1  0  0
///  0  0  0  0  0  1 -1  0
///  0  0  1  0  0  0  1 -1
///  0  0  0  1  0  0  0  1
/// ```
pub fn ex5() -> LatticeGame {
    let moves = vec![
        vec![1, 0, 0, 0, 0],
        vec![0, 1, 0, 0, 0],
        vec![0, 0, 0, 1, 0],
        vec![0, 0, 0, 0, 1],
        vec![-1, 1, 0, 0, 0],
        vec![0, -1, 1, 0, 0],
        vec![0, 0, -1, 1, 0],
        vec![0, 0, 0, -1, 1],
    ];
    LatticeGame::new(
        RuleSet::new(5, moves).expect("five-dimensional moves"),
        GameBoard { cone: Cone::orthant(5), defeated_generators: vec![vec![0; 5]] },
    )
    .expect("the example satisfies the axioms")
}
