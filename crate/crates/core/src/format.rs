//! JSON documents for games, strategies, stratifications and solved regions.
//! All numbers are exact integers.

use serde::{Deserialize, Serialize};

use crate::board::{Cone, GameBoard, LatticeGame, RuleSet};
use crate::error::{Error, Result};
use crate::genfun::{alpha_from_parts, alpha_parts, GfTerm, RationalGf};
use crate::oracle::{Label, SolvedRegion};
use crate::strat::{AffineSemigroup, AffineStratification, Stratum};
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeSpec {
    Named(String),
    Rays(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    pub d: usize,
    pub gamma: Vec<Vec<i64>>,
    pub cone_rays: ConeSpec,
    #[serde(default)]
    pub defeated_generators: Vec<Vec<i64>>,
}

impl GameDoc {
    pub fn from_game(game: &LatticeGame) -> Self {
        let cone_rays = if game.cone().is_orthant() {
            ConeSpec::Named("orthant".into())
        } else {
            ConeSpec::Rays(game.cone().rays().to_vec())
        };
        Self {
            d: game.dim(),
            gamma: game.moves().to_vec(),
            cone_rays,
            defeated_generators: game.board().defeated_generators.clone(),
        }
    }

    /// The rule set and cone, before any axiom checking.
    pub fn parts(&self) -> Result<(RuleSet, Cone)> {
        let cone = match &self.cone_rays {
            ConeSpec::Named(s) if s == "orthant" => Cone::orthant(self.d),
            ConeSpec::Named(s) => return Err(Error::Format(format!("unknown cone {s:?}"))),
            ConeSpec::Rays(rays) => {
                check_vectors(rays, self.d)?;
                Cone::from_rays(rays)?
            }
        };
        check_vectors(&self.gamma, self.d)?;
        Ok((RuleSet::new(self.d, self.gamma.clone())?, cone))
    }

    pub fn to_game(&self, limits: &Limits) -> Result<LatticeGame> {
        let (rules, cone) = self.parts()?;
        check_vectors(&self.defeated_generators, self.d)?;
        LatticeGame::with_limits(
            rules,
            GameBoard { cone, defeated_generators: self.defeated_generators.clone() },
            limits,
        )
    }
}

fn check_vectors(vs: &[Vec<i64>], d: usize) -> Result<()> {
    match vs.iter().find(|v| v.len() != d) {
        Some(v) => Err(Error::DimensionMismatch { expected: d, found: v.len() }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub alpha: [i64; 2],
    pub p: Vec<i64>,
    pub denoms: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub d: usize,
    pub terms: Vec<TermDoc>,
}

impl StrategyDoc {
    pub fn from_gf(f: &RationalGf) -> Result<Self> {
        let terms = f
            .terms()
            .iter()
            .map(|t| {
                Ok(TermDoc { alpha: alpha_parts(&t.alpha)?, p: t.p.clone(), denoms: t.denoms.clone() })
            })
            .collect::<Result<_>>()?;
        Ok(Self { d: f.dim(), terms })
    }

    pub fn to_gf(&self) -> Result<RationalGf> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(GfTerm::new(alpha_from_parts(t.alpha[0], t.alpha[1])?, t.p.clone(), t.denoms.clone())))
            .collect::<Result<_>>()?;
        RationalGf::new(self.d, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDoc {
    #[serde(rename = "F")]
    pub f: Vec<Vec<i64>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratificationDoc {
    pub d: usize,
    pub strata: Vec<StratumDoc>,
}

impl StratificationDoc {
    pub fn from_stratification(s: &AffineStratification) -> Self {
        Self {
            d: s.dim(),
            strata: s
                .strata()
                .iter()
                .map(|t| StratumDoc { f: t.base().to_vec(), a: t.semigroup().gens().to_vec() })
                .collect(),
        }
    }

    pub fn to_stratification(&self) -> Result<AffineStratification> {
        let strata = self
            .strata
            .iter()
            .map(|s| Stratum::new(s.f.clone(), AffineSemigroup::new(self.d, s.a.clone())?))
            .collect::<Result<_>>()?;
        AffineStratification::new(self.d, strata)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledPoint {
    pub pos: Vec<i64>,
    pub label: Label,
}

pub fn region_points(region: &SolvedRegion) -> Vec<LabelledPoint> {
    region
        .iter()
        .map(|(p, label)| LabelledPoint { pos: p.to_vec(), label })
        .collect()
}

/// The kind of a JSON document, recognized by its distinguishing key.
#[derive(Clone, Debug)]
pub enum Document {
    Game(GameDoc),
    Strategy(StrategyDoc),
    Stratification(StratificationDoc),
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = parse(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Format("expected a JSON object".into()))?;
    let doc = if obj.contains_key("gamma") {
        Document::Game(serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?)
    } else if obj.contains_key("terms") {
        Document::Strategy(serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?)
    } else if obj.contains_key("strata") {
        Document::Stratification(serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?)
    } else {
        return Err(Error::Format("expected a game, strategy or stratification document".into()));
    };
    Ok(doc)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}
