//! Exact algorithms for lattice games.
//!
//! A lattice game is an impartial game whose positions are the integer
//! points of a pointed cone minus a finite set of defeated positions, with
//! moves given by a fixed rule set. This crate validates rule sets, solves
//! games exactly on sublevel regions, compiles rational strategies from
//! affine stratifications, answers P/N and winning-move queries through
//! generating-function coefficients, and decides misère congruence.

pub mod board;
pub mod error;
pub mod fm;
pub mod format;
pub mod games;
pub mod genfun;
pub mod hnf;
pub mod linalg;
pub mod oracle;
pub mod polyhedron;
pub mod strat;
pub mod strategy;

pub use board::{Cone, GameBoard, LatticeGame, RuleSet, ValidationReport};
pub use error::{Error, Result};
pub use genfun::{GfTerm, RationalGf};
pub use oracle::{Classification, Label, Oracle, SolvedRegion};
pub use strat::{AffineSemigroup, AffineStratification, Stratum};
pub use strategy::{CongruenceVerdict, VerdictKind};

/// Environment variable overriding [`Limits::point_cap`].
pub const POINT_CAP_ENV: &str = "LATGAME_POINT_CAP";

/// Desk-scale resource bounds shared by all enumerating operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of lattice points (or memo entries) one operation may touch.
    pub point_cap: usize,
    /// Largest dimension handed to Fourier–Motzkin elimination.
    pub max_elimination_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            point_cap: 10_000_000,
            max_elimination_dim: 8,
        }
    }
}

impl Limits {
    /// Defaults, with the point cap taken from `LATGAME_POINT_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Self::default();
        if let Ok(raw) = std::env::var(POINT_CAP_ENV) {
            limits.point_cap = raw
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("{POINT_CAP_ENV}={raw:?} is not a count")))?;
        }
        Ok(limits)
    }
}
