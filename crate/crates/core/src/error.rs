use thiserror::Error;

use crate::board::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the elimination bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid rule set: {0}")]
    InvalidRuleSet(String),

    #[error("rule set violates the lattice-game axioms: {}", .0.summary())]
    RuleSetAxiomViolation(Box<ValidationReport>),

    #[error("defeated generator {0:?} lies outside the board")]
    DefeatedOutsideBoard(Vec<i64>),

    #[error("position {0:?} is not on the game board")]
    PositionOffBoard(Vec<i64>),

    #[error("region too large: more than {cap} points")]
    RegionTooLarge { cap: usize },

    #[error("denominator vector {0:?} is orthogonal to the expansion functional")]
    DegenerateDenominator(Vec<i64>),

    #[error("weight vector is orthogonal to denominator vector {0:?}")]
    DegenerateWeight(Vec<i64>),

    #[error("coefficient {coefficient} at {position:?} is not 0 or 1; not a set generating function")]
    NotASetGf {
        position: Vec<i64>,
        coefficient: String,
    },

    #[error("semigroup generators are linearly dependent or invalid: {0}")]
    UnsupportedSemigroup(String),

    #[error("translates {0:?} and {1:?} of one stratum overlap")]
    OverlappingTranslates(Vec<i64>, Vec<i64>),

    #[error("point {point:?} lies in strata {first} and {second}")]
    OverlappingStrata {
        point: Vec<i64>,
        first: usize,
        second: usize,
    },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("containment violated at {0:?}")]
    ContainmentViolated(Vec<i64>),

    #[error("set verification failed at {0:?}")]
    VerificationFailed(Vec<i64>),

    #[error("strategy disagrees with the exact solver at {position:?}: strategy says {strategy}, solver says {oracle}")]
    StrategyMismatch {
        position: Vec<i64>,
        strategy: String,
        oracle: String,
    },

    #[error("invalid heap game: {0}")]
    InvalidHeapSpec(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidCone(_) => "invalid_cone",
            Error::InvalidRuleSet(_) => "invalid_rule_set",
            Error::RuleSetAxiomViolation(_) => "rule_set_axiom_violation",
            Error::DefeatedOutsideBoard(_) => "defeated_outside_board",
            Error::PositionOffBoard(_) => "position_off_board",
            Error::RegionTooLarge { .. } => "region_too_large",
            Error::DegenerateDenominator(_) => "degenerate_denominator",
            Error::DegenerateWeight(_) => "degenerate_weight",
            Error::NotASetGf { .. } => "not_a_set_gf",
            Error::UnsupportedSemigroup(_) => "unsupported_semigroup",
            Error::OverlappingTranslates(_, _) => "overlapping_translates",
            Error::OverlappingStrata { .. } => "overlapping_strata",
            Error::UnsupportedGeometry(_) => "unsupported_geometry",
            Error::ContainmentViolated(_) => "containment_violated",
            Error::VerificationFailed(_) => "verification_failed",
            Error::StrategyMismatch { .. } => "strategy_mismatch",
            Error::InvalidHeapSpec(_) => "invalid_heap_spec",
            Error::Overflow => "overflow",
            Error::Format(_) => "format",
        }
    }
}
