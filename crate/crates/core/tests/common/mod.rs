#![allow(dead_code)]

use serde_json::{json, Value};
use xcsp_mini::generators::{ProblemData, ProblemId};

/// Knapsack data from the competition's data listing.
pub fn knapsack_listed() -> Value {
    json!({
        "capacity": 10,
        "items": [
            { "weight": 2, "value": 54 },
            { "weight": 2, "value": 92 },
            { "weight": 1, "value": 62 },
            { "weight": 2, "value": 20 },
            { "weight": 2, "value": 55 }
        ]
    })
}

pub fn auction_listed() -> Value {
    json!({
        "bids": [
            { "value": 10, "items": [1, 2] },
            { "value": 20, "items": [1, 3] },
            { "value": 30, "items": [2, 4] },
            { "value": 40, "items": [2, 3, 4] },
            { "value": 14, "items": [1] }
        ]
    })
}

pub fn tsp_listed() -> Value {
    json!({
        "distances": [
            [0, 5, 6, 6, 6],
            [5, 0, 9, 8, 4],
            [6, 9, 0, 1, 7],
            [6, 8, 1, 0, 6],
            [6, 4, 7, 6, 0]
        ]
    })
}

pub fn bacp_listed() -> Value {
    json!({
        "nPeriods": 5,
        "minCredits": 6,
        "maxCredits": 15,
        "minCourses": 2,
        "maxCourses": 6,
        "credits": [2, 3, 2, 4, 1, 3, 3, 3, 3, 3, 3, 3, 2, 3, 3, 3],
        "prerequisites": [[6,0], [7,5], [10,4], [10,5], [11,10], [13,8], [14,8], [15,9]]
    })
}

pub fn car_sequencing_listed() -> Value {
    json!({
        "carClasses": [
            { "demand": 1, "options": [1, 0, 1, 1, 0] },
            { "demand": 1, "options": [0, 0, 0, 1, 0] },
            { "demand": 2, "options": [0, 1, 0, 0, 1] },
            { "demand": 2, "options": [0, 1, 0, 1, 0] },
            { "demand": 2, "options": [1, 0, 1, 0, 0] },
            { "demand": 2, "options": [1, 1, 0, 0, 0] }
        ],
        "optionLimits": [
            { "num": 1, "den": 2 },
            { "num": 2, "den": 3 },
            { "num": 1, "den": 3 },
            { "num": 2, "den": 5 },
            { "num": 1, "den": 5 }
        ]
    })
}

pub fn mistery_shopper_listed() -> Value {
    json!({ "visitorGroups": [4, 4, 4], "visiteeGroups": [3, 2, 4] })
}

/// Small hand-made RCPSP with the listing's 4 resources.
pub fn rcpsp_small() -> Value {
    json!({
        "horizon": 20,
        "resourceCapacities": [12, 13, 4, 12],
        "jobs": [
            { "duration": 0, "successors": [1, 2, 3], "requiredQuantities": [0, 0, 0, 0] },
            { "duration": 3, "successors": [4], "requiredQuantities": [4, 0, 2, 0] },
            { "duration": 2, "successors": [4], "requiredQuantities": [10, 5, 0, 0] },
            { "duration": 4, "successors": [4], "requiredQuantities": [0, 13, 3, 6] },
            { "duration": 0, "successors": [], "requiredQuantities": [0, 0, 0, 0] }
        ]
    })
}

pub fn mario_small() -> Value {
    json!({
        "marioHouse": 0,
        "luigiHouse": 1,
        "fuelLimit": 12,
        "houses": [
            { "fuelConsumption": [0, 4, 3, 5], "gold": 0 },
            { "fuelConsumption": [4, 0, 2, 6], "gold": 10 },
            { "fuelConsumption": [3, 2, 0, 3], "gold": 7 },
            { "fuelConsumption": [5, 6, 3, 0], "gold": 9 }
        ]
    })
}

pub fn qap_small() -> Value {
    json!({
        "weights": [[0, 3, 0, 2], [3, 0, 1, 0], [0, 1, 0, 4], [2, 0, 4, 0]],
        "distances": [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]
    })
}

pub fn strip_packing_small() -> Value {
    json!({
        "container": { "width": 5, "height": 4 },
        "rectangles": [
            { "width": 2, "height": 4 },
            { "width": 3, "height": 2 },
            { "width": 2, "height": 3 }
        ]
    })
}

pub fn subgraph_small() -> Value {
    json!({
        "nPatternNodes": 3,
        "nTargetNodes": 5,
        "patternEdges": [[0, 1], [1, 2], [2, 0], [1, 1]],
        "targetEdges": [[0, 1], [1, 2], [2, 0], [2, 3], [3, 4], [2, 2]]
    })
}

pub fn cycle5() -> Vec<[usize; 2]> {
    vec![[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]
}

/// One small, solvable-size payload per problem and variant.
pub fn samples() -> Vec<(String, ProblemData)> {
    use ProblemId::*;
    let mut out = Vec::new();
    let mut add = |label: &str, p: ProblemId, v: Option<&str>, payload: Value| {
        let mut d = ProblemData::new(p, payload);
        if let Some(v) = v {
            d = d.with_variant(v);
        }
        out.push((label.to_string(), d));
    };
    add("auction-cnt", Auction, Some("cnt"), auction_listed());
    add("auction-sum", Auction, Some("sum"), auction_listed());
    add("bacp-m1", Bacp, Some("m1"), bacp_listed());
    add("bacp-m2", Bacp, Some("m2"), bacp_listed());
    add("bibd", Bibd, None, json!({"v": 7, "b": 7, "r": 3, "k": 3, "lambda": 1}));
    add("car-sequencing", CarSequencing, None, car_sequencing_listed());
    add("coloured-queens", ColouredQueens, None, json!({"n": 5}));
    add("dubois", Dubois, None, json!({"n": 3}));
    add("golomb-ruler", GolombRuler, None, json!({"n": 4}));
    add("graceful-graph", GracefulGraph, None, json!({"k": 3, "p": 2}));
    add("graph-coloring", GraphColoring, None, json!({"nNodes": 5, "nColors": 4, "edges": cycle5()}));
    add("knapsack", Knapsack, None, knapsack_listed());
    add("langford", Langford, None, json!({"n": 3}));
    add("low-autocorrelation", LowAutocorrelation, None, json!({"n": 5}));
    add("magic-hexagon", MagicHexagon, None, json!({"n": 3, "s": 1}));
    add("magic-square", MagicSquare, None, json!({"n": 3, "clues": [[2, 0, 0], [0, 0, 0], [0, 0, 0]]}));
    add("mario", Mario, None, mario_small());
    add("mistery-shopper", MisteryShopper, None, mistery_shopper_listed());
    add("peacable-armies-m1", PeacableArmies, Some("m1"), json!({"n": 3}));
    add("peacable-armies-m2", PeacableArmies, Some("m2"), json!({"n": 3}));
    add("qap", Qap, None, qap_small());
    add("rcpsp", Rcpsp, None, rcpsp_small());
    add("social-golfers", SocialGolfers, None, json!({"nGroups": 2, "groupSize": 2, "nWeeks": 2}));
    add("sports-scheduling", SportsScheduling, None, json!({"nTeams": 4}));
    add("still-life", StillLife, None, json!({"n": 3}));
    add("strip-packing", StripPacking, None, strip_packing_small());
    add("subgraph-isomorphism", SubgraphIsomorphism, None, subgraph_small());
    add("sum-coloring", SumColoring, None, json!({"nNodes": 5, "edges": cycle5()}));
    add("tsp", Tsp, None, tsp_listed());
    out
}
pub mod random;
pub mod tables;
pub mod oracles;
pub mod suites;
