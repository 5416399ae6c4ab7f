//! Compilers from problem data (JSON payloads in the competition's data
//! format) to validated [`Instance`]s, one per modelled problem.

mod builder;
mod graphs;
mod puzzles;
mod scheduling;
mod selection;

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::model::Instance;

pub use graphs::{
    gen_graph_coloring, gen_mario, gen_qap, gen_subgraph_isomorphism, gen_sum_coloring, gen_tsp,
    GraphColoringData, House, MarioData, QapData, SubgraphData, SumColoringData, TspData,
};
pub use puzzles::{
    gen_bibd, gen_coloured_queens, gen_dubois, gen_golomb_ruler, gen_graceful_graph,
    gen_langford, gen_low_autocorrelation, gen_magic_hexagon, gen_magic_square,
    gen_peacable_armies, gen_still_life, still_life_rule, still_life_table, BibdData,
    GracefulGraphData, MagicHexagonData, PeacableVariant,
};
pub use scheduling::{
    gen_bacp, gen_car_sequencing, gen_mistery_shopper, gen_rcpsp, gen_social_golfers,
    gen_sports_scheduling, match_number, BacpData, BacpVariant, CarClass, CarSequencingData, Job,
    MisteryShopperData, OptionLimit, RcpspData, SocialGolfersData,
};
pub use selection::{
    gen_auction, gen_knapsack, gen_strip_packing, AuctionData, AuctionVariant, Bid, Item,
    KnapsackData, Rectangle, StripPackingData,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("unknown variant `{variant}` for {problem} (expected one of: {expected})")]
    UnknownVariant {
        problem: ProblemId,
        variant: String,
        expected: String,
    },
    #[error("payload does not match the {problem} schema: {message}")]
    SchemaMismatch { problem: ProblemId, message: String },
    #[error("magic sum {total} is not divisible by {lines}")]
    NonIntegralMagic { total: i64, lines: i64 },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

/// Optional model blocks to leave out. Decision variables are dropped by
/// `dv`, mirroring the `nodv` instance series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Omit {
    pub symmetry: bool,
    pub redundant: bool,
    pub decision: bool,
}

impl FromStr for Omit {
    type Err = GenError;

    /// Comma separated tags among `sym`, `red` and `dv`.
    fn from_str(s: &str) -> Result<Omit, GenError> {
        let mut omit = Omit::default();
        for tag in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tag {
                "sym" | "symmetry" => omit.symmetry = true,
                "red" | "redundant" => omit.redundant = true,
                "dv" | "nodv" | "decision" => omit.decision = true,
                other => {
                    return Err(GenError::BadParameter(format!(
                        "unknown tag `{other}` (expected sym, red or dv)"
                    )))
                }
            }
        }
        Ok(omit)
    }
}

macro_rules! problems {
    ($($variant:ident => $name:literal $(| $alias:literal)*,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ProblemId {
            $($variant,)*
        }

        impl ProblemId {
            pub const ALL: [ProblemId; 26] = [$(ProblemId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(ProblemId::$variant => $name,)*
                }
            }

            fn lookup(key: &str) -> Option<ProblemId> {
                $(
                    if key == $name.replace('-', "") $(|| key == $alias)* {
                        return Some(ProblemId::$variant);
                    }
                )*
                None
            }
        }
    };
}

problems! {
    Auction => "auction",
    Bacp => "bacp",
    Bibd => "bibd",
    CarSequencing => "car-sequencing",
    ColouredQueens => "coloured-queens" | "coloredqueens",
    Dubois => "dubois",
    GolombRuler => "golomb-ruler" | "golomb",
    GracefulGraph => "graceful-graph" | "graceful",
    GraphColoring => "graph-coloring" | "coloring" | "graphcolouring",
    Knapsack => "knapsack",
    Langford => "langford",
    LowAutocorrelation => "low-autocorrelation" | "lac",
    MagicHexagon => "magic-hexagon",
    MagicSquare => "magic-square",
    Mario => "mario",
    MisteryShopper => "mistery-shopper" | "mysteryshopper",
    PeacableArmies => "peacable-armies" | "peaceablearmies",
    Qap => "qap" | "quadraticassignment",
    Rcpsp => "rcpsp",
    SocialGolfers => "social-golfers",
    SportsScheduling => "sports-scheduling",
    StillLife => "still-life",
    StripPacking => "strip-packing",
    SubgraphIsomorphism => "subgraph-isomorphism" | "subisomorphism",
    SumColoring => "sum-coloring" | "sumcolouring",
    Tsp => "tsp" | "travellingsalesman" | "travelingsalesman",
}

impl ProblemId {
    /// Accepted model variants; the first is the default.
    pub fn variants(self) -> &'static [&'static str] {
        match self {
            ProblemId::Auction => &["cnt", "sum"],
            ProblemId::Bacp => &["m1", "m2"],
            ProblemId::Bibd => &["sum"],
            ProblemId::PeacableArmies => &["m1", "m2"],
            _ => &[],
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = GenError;

    /// Case, `-`, `_` and spaces are ignored.
    fn from_str(s: &str) -> Result<ProblemId, GenError> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        ProblemId::lookup(&key).ok_or_else(|| GenError::UnknownProblem(s.to_string()))
    }
}

/// One generation request.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    pub problem: ProblemId,
    pub variant: Option<String>,
    pub payload: Value,
    pub omit: Omit,
}

impl ProblemData {
    pub fn new(problem: ProblemId, payload: Value) -> ProblemData {
        ProblemData {
            problem,
            variant: None,
            payload,
            omit: Omit::default(),
        }
    }

    pub fn with_variant(mut self, variant: impl Into<String>) -> ProblemData {
        self.variant = Some(variant.into());
        self
    }

    pub fn with_omit(mut self, omit: Omit) -> ProblemData {
        self.omit = omit;
        self
    }

    fn variant(&self) -> Result<&'static str, GenError> {
        let allowed = self.problem.variants();
        match (&self.variant, allowed.first()) {
            (None, Some(&default)) => Ok(default),
            (None, None) => Ok(""),
            (Some(v), _) => allowed.iter().copied().find(|a| a == v).ok_or_else(|| {
                GenError::UnknownVariant {
                    problem: self.problem,
                    variant: v.clone(),
                    expected: if allowed.is_empty() {
                        "no variant".to_string()
                    } else {
                        allowed.join(", ")
                    },
                }
            }),
        }
    }

    fn parse<T: DeserializeOwned>(&self) -> Result<T, GenError> {
        T::deserialize(&self.payload).map_err(|e| GenError::SchemaMismatch {
            problem: self.problem,
            message: e.to_string(),
        })
    }
}

/// Builds a JSON object payload from `key=value` integer parameters.
pub fn payload_from_params<'a>(params: impl IntoIterator<Item = (&'a str, i64)>) -> Value {
    Value::Object(
        params
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::from(v)))
            .collect(),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Order {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MagicSquareData {
    n: usize,
    #[serde(default)]
    clues: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct SportsData {
    #[serde(alias = "n")]
    n_teams: usize,
}

impl MagicSquareData {
    /// JSON null and the string "null" both mean no clues.
    fn clues(&self) -> Result<Option<Vec<Vec<i64>>>, String> {
        match &self.clues {
            Value::Null => Ok(None),
            Value::String(s) if s == "null" => Ok(None),
            other => Vec::<Vec<i64>>::deserialize(other)
                .map(Some)
                .map_err(|e| e.to_string()),
        }
    }
}

/// Compiles any supported problem from its JSON payload.
pub fn gen_catalog(data: &ProblemData) -> Result<Instance, GenError> {
    let variant = data.variant()?;
    let omit = data.omit;
    match data.problem {
        ProblemId::Auction => gen_auction(
            &data.parse()?,
            if variant == "cnt" { AuctionVariant::Cnt } else { AuctionVariant::Sum },
        ),
        ProblemId::Bacp => gen_bacp(
            &data.parse()?,
            if variant == "m1" { BacpVariant::M1 } else { BacpVariant::M2 },
            omit,
        ),
        ProblemId::Bibd => gen_bibd(&data.parse()?, omit),
        ProblemId::CarSequencing => gen_car_sequencing(&data.parse()?, omit),
        ProblemId::ColouredQueens => gen_coloured_queens(data.parse::<Order>()?.n),
        ProblemId::Dubois => gen_dubois(data.parse::<Order>()?.n),
        ProblemId::GolombRuler => gen_golomb_ruler(data.parse::<Order>()?.n, omit),
        ProblemId::GracefulGraph => {
            let g: GracefulGraphData = data.parse()?;
            gen_graceful_graph(g.k, g.p)
        }
        ProblemId::GraphColoring => gen_graph_coloring(&data.parse()?),
        ProblemId::Knapsack => gen_knapsack(&data.parse()?),
        ProblemId::Langford => gen_langford(data.parse::<Order>()?.n),
        ProblemId::LowAutocorrelation => gen_low_autocorrelation(data.parse::<Order>()?.n),
        ProblemId::MagicHexagon => {
            let h: MagicHexagonData = data.parse()?;
            gen_magic_hexagon(h.n, h.s, omit)
        }
        ProblemId::MagicSquare => {
            let m: MagicSquareData = data.parse()?;
            let clues = m.clues().map_err(|message| GenError::SchemaMismatch {
                problem: data.problem,
                message,
            })?;
            gen_magic_square(m.n, clues.as_deref())
        }
        ProblemId::Mario => gen_mario(&data.parse()?),
        ProblemId::MisteryShopper => gen_mistery_shopper(&data.parse()?, omit),
        ProblemId::PeacableArmies => gen_peacable_armies(
            data.parse::<Order>()?.n,
            if variant == "m1" { PeacableVariant::M1 } else { PeacableVariant::M2 },
        ),
        ProblemId::Qap => gen_qap(&data.parse()?),
        ProblemId::Rcpsp => gen_rcpsp(&data.parse()?),
        ProblemId::SocialGolfers => gen_social_golfers(data.parse()?, omit),
        ProblemId::SportsScheduling => {
            gen_sports_scheduling(data.parse::<SportsData>()?.n_teams, omit)
        }
        ProblemId::StillLife => gen_still_life(data.parse::<Order>()?.n, omit),
        ProblemId::StripPacking => gen_strip_packing(&data.parse()?),
        ProblemId::SubgraphIsomorphism => gen_subgraph_isomorphism(&data.parse()?, omit),
        ProblemId::SumColoring => gen_sum_coloring(&data.parse()?),
        ProblemId::Tsp => gen_tsp(&data.parse::<TspData>()?.distances),
    }
}
