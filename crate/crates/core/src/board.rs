//! Rule sets, game boards and lattice games, with exact checks of the two
//! rule-set axioms: a functional positive on moves and cone, and a move in
//! the negative tangent cone along every extremal ray.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fm;
use crate::linalg::{self, bit_length_i64};
use crate::polyhedron::combinations;
use crate::Limits;

/// A full-dimensional pointed rational cone given by its extremal rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    rays: Vec<Vec<i64>>,
    facet_normals: Vec<Vec<i64>>,
    orthant: bool,
}

impl Cone {
    pub fn orthant(dim: usize) -> Self {
        let basis: Vec<Vec<i64>> = (0..dim).map(|i| linalg::unit(dim, i)).collect();
        Self {
            dim,
            rays: basis.clone(),
            facet_normals: basis,
            orthant: true,
        }
    }

    /// Builds the cone spanned by `rays`. Generators are made primitive;
    /// duplicates and non-extremal generators are dropped, input order is kept.
    pub fn from_rays(rays: &[Vec<i64>]) -> Result<Self> {
        let dim = rays
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidCone("no rays".into()))?;
        if dim == 0 {
            return Err(Error::InvalidCone("zero-dimensional ambient space".into()));
        }
        let mut prim: Vec<Vec<i64>> = Vec::new();
        for r in rays {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
            if linalg::is_zero(r) {
                return Err(Error::InvalidCone("zero ray".into()));
            }
            let p = linalg::primitive(r);
            if !prim.contains(&p) {
                prim.push(p);
            }
        }
        if linalg::rank(&prim) != dim {
            return Err(Error::InvalidCone(format!(
                "rays span a space of dimension less than {dim}"
            )));
        }
        let mut normals: Vec<Vec<i64>> = Vec::new();
        for subset in combinations(prim.len(), dim - 1) {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| prim[i].clone()).collect();
            if linalg::rank(&rows) != dim - 1 {
                continue;
            }
            let n = linalg::nullspace(&rows, dim).remove(0);
            let signs: Vec<i64> = prim.iter().map(|r| linalg::dot(&n, r).signum()).collect();
            let oriented = if signs.iter().all(|&s| s >= 0) {
                n
            } else if signs.iter().all(|&s| s <= 0) {
                linalg::neg(&n)
            } else {
                continue;
            };
            if !normals.contains(&oriented) {
                normals.push(oriented);
            }
        }
        if normals.is_empty() {
            return Err(Error::InvalidCone("cone is not pointed".into()));
        }
        let extremal: Vec<Vec<i64>> = prim
            .into_iter()
            .filter(|r| {
                let tight: Vec<Vec<i64>> = normals
                    .iter()
                    .filter(|n| linalg::dot(n, r) == 0)
                    .cloned()
                    .collect();
                linalg::rank(&tight) == dim - 1
            })
            .collect();
        let mut sys = fm::System::new(dim);
        for r in &extremal {
            sys.push(r, 1);
        }
        if sys.solve().is_none() {
            return Err(Error::InvalidCone("cone is not pointed".into()));
        }
        let orthant = extremal.len() == dim
            && (0..dim).all(|i| extremal.contains(&linalg::unit(dim, i)));
        Ok(Self {
            dim,
            rays: extremal,
            facet_normals: normals,
            orthant,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn facet_normals(&self) -> &[Vec<i64>] {
        &self.facet_normals
    }

    pub fn is_orthant(&self) -> bool {
        self.orthant
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim && self.facet_normals.iter().all(|n| linalg::dot(n, p) >= 0)
    }

    /// Whether `v` lies in the negative tangent cone along `ray`: `n·v <= 0`
    /// for every facet normal `n` of a facet containing the ray.
    pub fn in_negative_tangent_cone(&self, ray: &[i64], v: &[i64]) -> bool {
        if self.orthant {
            let i = ray.iter().position(|&x| x != 0).expect("nonzero ray");
            return v.iter().enumerate().all(|(j, &x)| j == i || x <= 0);
        }
        self.facet_normals
            .iter()
            .filter(|n| linalg::dot(n, ray) == 0)
            .all(|n| linalg::dot(n, v) <= 0)
    }
}

/// The moves of a lattice game; a move `γ` goes from `p` to `p − γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    dim: usize,
    moves: Vec<Vec<i64>>,
}

impl RuleSet {
    pub fn new(dim: usize, moves: Vec<Vec<i64>>) -> Result<Self> {
        for m in &moves {
            if m.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.len() });
            }
            if linalg::is_zero(m) {
                return Err(Error::InvalidRuleSet("the zero vector is not a move".into()));
            }
        }
        Ok(Self { dim, moves })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moves(&self) -> &[Vec<i64>] {
        &self.moves
    }
}

/// Integer `ell` with `ell·γ >= 1` on every move and `ell·r >= 1` on every
/// ray, or `None` if no such functional exists.
pub fn find_positive_functional(rules: &RuleSet, cone: &Cone, limits: &Limits) -> Result<Option<Vec<i64>>> {
    if rules.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: rules.dim() });
    }
    let vectors: Vec<Vec<i64>> = rules.moves().iter().chain(cone.rays()).cloned().collect();
    positive_functional(&vectors, cone.dim(), limits)
}

/// Integer functional that is at least one on every vector, if one exists.
pub fn positive_functional(vectors: &[Vec<i64>], dim: usize, limits: &Limits) -> Result<Option<Vec<i64>>> {
    if dim > limits.max_elimination_dim {
        return Err(Error::DimensionTooLarge { dim, max: limits.max_elimination_dim });
    }
    let mut sys = fm::System::new(dim);
    for v in vectors {
        sys.push(v, 1);
    }
    let Some(x) = sys.solve() else {
        return Ok(None);
    };
    let ell = linalg::clear_denominators(&x)?;
    debug_assert!(vectors.iter().all(|v| linalg::dot(&ell, v) >= 1));
    Ok(Some(ell))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayCheck {
    pub ray: Vec<i64>,
    /// A move in the negative tangent cone along the ray, if any.
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Positive functional, or `None` when the positivity axiom fails.
    pub functional: Option<Vec<i64>>,
    pub rays: Vec<RayCheck>,
    pub valid: bool,
}

impl ValidationReport {
    pub fn failing_rays(&self) -> impl Iterator<Item = &[i64]> {
        self.rays
            .iter()
            .filter(|r| r.witness.is_none())
            .map(|r| r.ray.as_slice())
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if self.functional.is_none() {
            parts.push("no functional is positive on the moves and the cone".to_string());
        }
        let failing: Vec<&[i64]> = self.failing_rays().collect();
        if !failing.is_empty() {
            parts.push(format!("no move in the negative tangent cone along rays {failing:?}"));
        }
        if parts.is_empty() {
            "valid".into()
        } else {
            parts.join("; ")
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

pub fn validate_rule_set(rules: &RuleSet, cone: &Cone, limits: &Limits) -> Result<ValidationReport> {
    let functional = find_positive_functional(rules, cone, limits)?;
    let rays: Vec<RayCheck> = cone
        .rays()
        .iter()
        .map(|ray| RayCheck {
            ray: ray.clone(),
            witness: rules
                .moves()
                .iter()
                .find(|g| cone.in_negative_tangent_cone(ray, g))
                .cloned(),
        })
        .collect();
    let valid = functional.is_some() && rays.iter().all(|r| r.witness.is_some());
    Ok(ValidationReport { functional, rays, valid })
}

/// The board `Λ ∖ D` with `Λ = C ∩ Z^d`, described by `C` and generators of `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameBoard {
    pub cone: Cone,
    pub defeated_generators: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Board,
    Defeated,
    OffLattice,
}

/// A validated lattice game.
#[derive(Clone, Debug)]
pub struct LatticeGame {
    rules: RuleSet,
    board: GameBoard,
    ell: Vec<i64>,
    defeated: BTreeSet<Vec<i64>>,
}

impl LatticeGame {
    pub fn new(rules: RuleSet, board: GameBoard) -> Result<Self> {
        Self::with_limits(rules, board, &Limits::default())
    }

    pub fn with_limits(rules: RuleSet, board: GameBoard, limits: &Limits) -> Result<Self> {
        let d = board.cone.dim();
        if rules.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rules.dim() });
        }
        let report = validate_rule_set(&rules, &board.cone, limits)?;
        if !report.valid {
            return Err(Error::RuleSetAxiomViolation(Box::new(report)));
        }
        let ell = report.functional.expect("valid report carries a functional");
        for g in &board.defeated_generators {
            if g.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: g.len() });
            }
            if !board.cone.contains(g) {
                return Err(Error::DefeatedOutsideBoard(g.clone()));
            }
        }
        let defeated = defeated_closure(&rules, &board);
        Ok(Self { rules, board, ell, defeated })
    }

    pub fn dim(&self) -> usize {
        self.rules.dim()
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn moves(&self) -> &[Vec<i64>] {
        self.rules.moves()
    }

    pub fn board(&self) -> &GameBoard {
        &self.board
    }

    pub fn cone(&self) -> &Cone {
        &self.board.cone
    }

    /// The validated positive functional.
    pub fn ell(&self) -> &[i64] {
        &self.ell
    }

    pub fn level(&self, p: &[i64]) -> i64 {
        linalg::dot(&self.ell, p)
    }

    /// The finite set of defeated positions.
    pub fn defeated_set(&self) -> &BTreeSet<Vec<i64>> {
        &self.defeated
    }

    pub fn classify_point(&self, p: &[i64]) -> PointClass {
        if !self.board.cone.contains(p) {
            PointClass::OffLattice
        } else if self.defeated.contains(p) {
            PointClass::Defeated
        } else {
            PointClass::Board
        }
    }

    pub fn board_contains(&self, p: &[i64]) -> bool {
        self.classify_point(p) == PointClass::Board
    }

    /// Moves `γ` with `p − γ` on the board, in rule-set order.
    pub fn legal_moves(&self, p: &[i64]) -> Result<Vec<&[i64]>> {
        Ok(self
            .legal_move_indices(p)?
            .into_iter()
            .map(|i| self.rules.moves[i].as_slice())
            .collect())
    }

    pub fn legal_move_indices(&self, p: &[i64]) -> Result<Vec<usize>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.len() });
        }
        if !self.board_contains(p) {
            return Err(Error::PositionOffBoard(p.to_vec()));
        }
        Ok(self
            .rules
            .moves
            .iter()
            .enumerate()
            .filter(|(_, g)| self.board_contains(&linalg::sub(p, g)))
            .map(|(i, _)| i)
            .collect())
    }

    /// `d(m + n)` plus the bit lengths of all move and defeated-generator entries.
    pub fn input_complexity(&self) -> u64 {
        let d = self.dim() as u64;
        let n = self.rules.moves.len() as u64;
        let m = self.board.defeated_generators.len() as u64;
        let bits: u64 = self
            .rules
            .moves
            .iter()
            .chain(&self.board.defeated_generators)
            .flatten()
            .map(|&x| bit_length_i64(x))
            .sum();
        d * (m + n) + bits
    }
}

/// Closure of the defeated generators under `p ↦ p − γ` inside `Λ`.
fn defeated_closure(rules: &RuleSet, board: &GameBoard) -> BTreeSet<Vec<i64>> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for g in &board.defeated_generators {
        if seen.insert(g.clone()) {
            queue.push_back(g.clone());
        }
    }
    while let Some(p) = queue.pop_front() {
        for g in rules.moves() {
            let q = linalg::sub(&p, g);
            if board.cone.contains(&q) && seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen
}
