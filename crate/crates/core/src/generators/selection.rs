use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Deserialize;

use super::builder::{ext, sum, Builder};
use super::{GenError, Omit};
use crate::model::dsl::{add, int, le, var};
use crate::model::{
    Condition, Constraint, Domain, Instance, Objective, ObjectiveTarget, Operand, Relation, Sense,
    Table,
};

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bid {
    pub value: i64,
    pub items: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionData {
    pub bids: Vec<Bid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuctionVariant {
    /// `atMost1` as a `count` constraint.
    Cnt,
    Sum,
}

pub fn gen_auction(data: &AuctionData, variant: AuctionVariant) -> Result<Instance, GenError> {
    if data.bids.is_empty() {
        return Err(bad("auction needs at least one bid"));
    }
    if data.bids.iter().any(|b| b.value < 0) {
        return Err(bad("bid values must be non-negative"));
    }
    let items: BTreeSet<i64> = data.bids.iter().flat_map(|b| b.items.iter().copied()).collect();
    let mut b = Builder::new(Omit::default());
    let x = b.array1("b", data.bids.len(), |_| Domain::range(0, 1));
    for item in items {
        let scope: Vec<String> = data
            .bids
            .iter()
            .zip(&x)
            .filter(|(bid, _)| bid.items.contains(&item))
            .map(|(_, v)| v.clone())
            .collect();
        if scope.len() < 2 {
            continue;
        }
        b.post(match variant {
            AuctionVariant::Cnt => Constraint::Count {
                scope,
                values: vec![1],
                condition: Condition::new(Relation::Le, 1),
            },
            AuctionVariant::Sum => sum(scope, Relation::Le, 1),
        });
    }
    b.objective(Objective {
        sense: Sense::Maximize,
        target: ObjectiveTarget::Sum {
            scope: x,
            coeffs: data.bids.iter().map(|b| b.value).collect(),
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub weight: i64,
    pub value: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackData {
    pub capacity: i64,
    pub items: Vec<Item>,
}

pub fn gen_knapsack(data: &KnapsackData) -> Result<Instance, GenError> {
    if data.items.is_empty() {
        return Err(bad("knapsack needs at least one item"));
    }
    if data.capacity < 0 || data.items.iter().any(|i| i.weight < 0 || i.value < 0) {
        return Err(bad("capacity, weights and values must be non-negative"));
    }
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", data.items.len(), |_| Domain::range(0, 1));
    b.post(Constraint::Sum {
        scope: x.clone(),
        coeffs: data.items.iter().map(|i| Operand::Const(i.weight)).collect(),
        condition: Condition::new(Relation::Le, data.capacity),
    });
    b.objective(Objective {
        sense: Sense::Maximize,
        target: ObjectiveTarget::Sum {
            scope: x,
            coeffs: data.items.iter().map(|i| i.value).collect(),
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rectangle {
    pub width: i64,
    pub height: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripPackingData {
    pub container: Rectangle,
    #[serde(alias = "items")]
    pub rectangles: Vec<Rectangle>,
}

pub fn gen_strip_packing(data: &StripPackingData) -> Result<Instance, GenError> {
    let Rectangle { width: cw, height: ch } = data.container;
    let items = &data.rectangles;
    if cw < 1 || ch < 1 {
        return Err(bad("container sides must be positive"));
    }
    if items.iter().any(|r| r.width < 1 || r.height < 1) {
        return Err(bad("rectangle sides must be positive"));
    }
    let n = items.len();
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", n, |_| Domain::range(0, cw - 1));
    let y = b.array1("y", n, |_| Domain::range(0, ch - 1));
    let w = b.array1("w", n, |i| Domain::new([items[i].width, items[i].height]));
    let h = b.array1("h", n, |i| Domain::new([items[i].width, items[i].height]));
    let r = b.array1("r", n, |_| Domain::range(0, 1));
    for i in 0..n {
        b.intension(le(add(var(&x[i]), var(&w[i])), int(cw)));
    }
    for i in 0..n {
        b.intension(le(add(var(&y[i]), var(&h[i])), int(ch)));
    }
    for (i, rect) in items.iter().enumerate() {
        let table = Arc::new(Table::supports(
            3,
            vec![
                vec![0, rect.width, rect.height],
                vec![1, rect.height, rect.width],
            ],
        ));
        b.post(ext(vec![r[i].clone(), w[i].clone(), h[i].clone()], &table));
    }
    b.post(Constraint::NoOverlap {
        origins: x.iter().cloned().zip(y.iter().cloned()).collect(),
        lengths: w.iter().map(Operand::var).zip(h.iter().map(Operand::var)).collect(),
    });
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn listed_auction() -> AuctionData {
        serde_json::from_str(
            r#"{ "bids": [
                { "value": 10, "items": [1, 2] },
                { "value": 20, "items": [1, 3] },
                { "value": 30, "items": [2, 4] },
                { "value": 40, "items": [2, 3, 4] },
                { "value": 14, "items": [1] } ] }"#,
        )
        .unwrap()
    }

    #[test]
    fn auction_item_scopes() {
        for variant in [AuctionVariant::Cnt, AuctionVariant::Sum] {
            let i = gen_auction(&listed_auction(), variant).unwrap();
            let sizes: Vec<usize> = i.constraints.iter().map(|c| c.scope().len()).collect();
            assert_eq!(sizes, vec![3, 3, 2, 2]);
        }
    }

    #[test]
    fn knapsack_shape() {
        let data: KnapsackData = serde_json::from_str(
            r#"{"capacity": 10, "items": [{"weight": 2, "value": 54}]}"#,
        )
        .unwrap();
        let i = gen_knapsack(&data).unwrap();
        assert_eq!(i.variables.len(), 1);
        assert_eq!(i.constraints.len(), 1);
        assert!(i.objective.is_some());
    }

    #[test]
    fn strip_packing_accepts_items_alias() {
        let data: StripPackingData = serde_json::from_str(
            r#"{"container": {"width": 4, "height": 3},
                "items": [{"width": 2, "height": 3}, {"width": 2, "height": 2}]}"#,
        )
        .unwrap();
        let i = gen_strip_packing(&data).unwrap();
        assert_eq!(i.variables.len(), 10);
        assert_eq!(i.constraints.len(), 2 + 2 + 2 + 1);
    }
}
