use std::sync::Arc;

use serde::Deserialize;

use super::builder::{ext, sum, Builder};
use super::{GenError, Omit};
use crate::model::dsl::{eq, iff, int, ne, var};
use crate::model::{
    Constraint, Domain, Instance, Objective, ObjectiveTarget, Relation, Sense, Table,
};

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

fn check_edges(edges: &[[usize; 2]], n_nodes: usize, what: &str) -> Result<(), GenError> {
    match edges.iter().find(|e| e[0] >= n_nodes || e[1] >= n_nodes) {
        Some(e) => Err(bad(format!("{what} edge {e:?} names a node outside 0..{n_nodes}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct GraphColoringData {
    pub n_nodes: usize,
    pub n_colors: usize,
    pub edges: Vec<[usize; 2]>,
}

pub fn gen_graph_coloring(data: &GraphColoringData) -> Result<Instance, GenError> {
    if data.n_nodes < 1 || data.n_colors < 1 {
        return Err(bad("graph coloring needs at least one node and one color"));
    }
    check_edges(&data.edges, data.n_nodes, "graph")?;
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", data.n_nodes, |_| Domain::range(0, data.n_colors as i64 - 1));
    for e in &data.edges {
        b.intension(ne(var(&x[e[0]]), var(&x[e[1]])));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Maximum(x),
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SumColoringData {
    pub n_nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

pub fn gen_sum_coloring(data: &SumColoringData) -> Result<Instance, GenError> {
    if data.n_nodes < 1 {
        return Err(bad("sum coloring needs at least one node"));
    }
    check_edges(&data.edges, data.n_nodes, "graph")?;
    let mut b = Builder::new(Omit::default());
    let c = b.array1("c", data.n_nodes, |_| Domain::range(0, data.n_nodes as i64 - 1));
    for e in &data.edges {
        b.intension(ne(var(&c[e[0]]), var(&c[e[1]])));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Sum {
            coeffs: vec![1; c.len()],
            scope: c,
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SubgraphData {
    pub n_pattern_nodes: usize,
    pub n_target_nodes: usize,
    pub pattern_edges: Vec<[usize; 2]>,
    pub target_edges: Vec<[usize; 2]>,
}

/// Number of edges touching `node`; a self-loop counts once.
fn degree(edges: &[[usize; 2]], node: usize) -> usize {
    edges.iter().filter(|e| e[0] == node || e[1] == node).count()
}

pub fn gen_subgraph_isomorphism(data: &SubgraphData, omit: Omit) -> Result<Instance, GenError> {
    let (np, nt) = (data.n_pattern_nodes, data.n_target_nodes);
    if np < 1 || nt < 1 {
        return Err(bad("both graphs need at least one node"));
    }
    check_edges(&data.pattern_edges, np, "pattern")?;
    check_edges(&data.target_edges, nt, "target")?;
    let loops = |edges: &[[usize; 2]]| -> Vec<usize> {
        edges.iter().filter(|e| e[0] == e[1]).map(|e| e[0]).collect()
    };
    let (p_loops, t_loops) = (loops(&data.pattern_edges), loops(&data.target_edges));
    let t_degrees: Vec<usize> = (0..nt).map(|j| degree(&data.target_edges, j)).collect();

    let mut b = Builder::new(omit);
    let x = b.array1("x", np, |_| Domain::range(0, nt as i64 - 1));
    b.post(Constraint::AllDifferent(x.clone()));
    if !p_loops.is_empty() {
        let table = Arc::new(Table::supports(1, t_loops.iter().map(|&t| vec![t as i64])));
        for &p in &p_loops {
            b.post(ext(vec![x[p].clone()], &table));
        }
    }
    let both_ways = Arc::new(Table::supports(
        2,
        data.target_edges
            .iter()
            .flat_map(|e| [vec![e[0] as i64, e[1] as i64], vec![e[1] as i64, e[0] as i64]]),
    ));
    for e in &data.pattern_edges {
        b.post(ext(vec![x[e[0]].clone(), x[e[1]].clone()], &both_ways));
    }
    for (i, xi) in x.iter().enumerate() {
        let dp = degree(&data.pattern_edges, i);
        let conflicts: Vec<Vec<i64>> = (0..nt)
            .filter(|&j| t_degrees[j] < dp)
            .map(|j| vec![j as i64])
            .collect();
        if !conflicts.is_empty() {
            b.redundant(ext(vec![xi.clone()], &Arc::new(Table::conflicts(1, conflicts))));
        }
    }
    b.finish()
}

/// Rows `(i, j, m[i][j])` for every ordered pair `i != j`.
fn distance_table(m: &[Vec<i64>]) -> Table {
    let n = m.len();
    Table::supports(
        3,
        (0..n).flat_map(|i| {
            (0..n)
                .filter(move |&j| j != i)
                .map(move |j| vec![i as i64, j as i64, m[i][j]])
        }),
    )
}

fn check_square(m: &[Vec<i64>], what: &str) -> Result<usize, GenError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(bad(format!("{what} matrix is not square")));
    }
    Ok(n)
}

fn distinct_entries(m: &[Vec<i64>]) -> Domain {
    m.iter().flatten().copied().collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TspData {
    pub distances: Vec<Vec<i64>>,
}

pub fn gen_tsp(distances: &[Vec<i64>]) -> Result<Instance, GenError> {
    let n = check_square(distances, "distance")?;
    if n < 3 {
        return Err(bad(format!("travelling salesman needs at least 3 cities, got {n}")));
    }
    for i in 0..n {
        if distances[i][i] != 0 {
            return Err(bad(format!("distance matrix has non-zero diagonal at {i}")));
        }
        for j in 0..i {
            if distances[i][j] != distances[j][i] {
                return Err(bad(format!("distance matrix is asymmetric at ({i}, {j})")));
            }
        }
    }
    let table = Arc::new(distance_table(distances));
    let mut b = Builder::new(Omit::default());
    let c = b.array1("c", n, |_| Domain::range(0, n as i64 - 1));
    let d = b.array1("d", n, |_| distinct_entries(distances));
    b.post(Constraint::AllDifferent(c.clone()));
    for i in 0..n {
        b.post(ext(vec![c[i].clone(), c[(i + 1) % n].clone(), d[i].clone()], &table));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Sum {
            coeffs: vec![1; n],
            scope: d,
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QapData {
    pub weights: Vec<Vec<i64>>,
    pub distances: Vec<Vec<i64>>,
}

pub fn gen_qap(data: &QapData) -> Result<Instance, GenError> {
    let n = check_square(&data.weights, "weight")?;
    if check_square(&data.distances, "distance")? != n {
        return Err(bad("weight and distance matrices differ in size"));
    }
    if data.weights.iter().flatten().any(|&w| w < 0) {
        return Err(bad("weights must be non-negative"));
    }
    let flows: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| data.weights[i][j] != 0)
        .collect();
    if flows.is_empty() {
        return Err(bad("no positive weight between two facilities"));
    }
    let table = Arc::new(distance_table(&data.distances));
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", n, |_| Domain::range(0, n as i64 - 1));
    let d = b.array2_when("d", n, n, |i, j| {
        (i < j && data.weights[i][j] != 0).then(|| distinct_entries(&data.distances))
    });
    b.post(Constraint::AllDifferent(x.clone()));
    let cell = |i: usize, j: usize| d[i][j].clone().expect("flow cell");
    for &(i, j) in &flows {
        b.post(ext(vec![x[i].clone(), x[j].clone(), cell(i, j)], &table));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Sum {
            scope: flows.iter().map(|&(i, j)| cell(i, j)).collect(),
            coeffs: flows.iter().map(|&(i, j)| data.weights[i][j]).collect(),
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct House {
    #[serde(rename = "fuelConsumption", alias = "fuel")]
    pub fuel: Vec<i64>,
    pub gold: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct MarioData {
    pub mario_house: usize,
    pub luigi_house: usize,
    pub fuel_limit: i64,
    pub houses: Vec<House>,
}

pub fn gen_mario(data: &MarioData) -> Result<Instance, GenError> {
    let n = data.houses.len();
    if n < 2 {
        return Err(bad("mario needs at least two houses"));
    }
    if data.mario_house >= n || data.luigi_house >= n {
        return Err(bad("mario and luigi houses must be valid house indices"));
    }
    if data.houses.iter().any(|h| h.fuel.len() != n) {
        return Err(bad(format!("every fuel row must have {n} entries")));
    }
    let mut b = Builder::new(Omit::default());
    let s = b.array1("s", n, |_| Domain::range(0, n as i64 - 1));
    let f = b.array1("f", n, |i| data.houses[i].fuel.iter().copied().collect());
    let g = b.array1("g", n, |i| Domain::new([0, data.houses[i].gold]));
    for i in 0..n {
        let table = Arc::new(Table::supports(
            2,
            data.houses[i]
                .fuel
                .iter()
                .enumerate()
                .map(|(j, &v)| vec![j as i64, v]),
        ));
        b.post(ext(vec![s[i].clone(), f[i].clone()], &table));
    }
    b.post(sum(f.clone(), Relation::Le, data.fuel_limit));
    for i in 0..n {
        if i != data.mario_house && i != data.luigi_house {
            b.intension(iff(eq(var(&s[i]), int(i as i64)), eq(var(&g[i]), int(0))));
        }
    }
    b.post(Constraint::Circuit(s.clone()));
    b.intension(eq(var(&s[data.luigi_house]), int(data.mario_house as i64)));
    b.objective(Objective {
        sense: Sense::Maximize,
        target: ObjectiveTarget::Sum {
            coeffs: vec![1; n],
            scope: g,
        },
    });
    b.finish()
}

/// The 5-city matrix from the competition's data listing.
#[cfg(test)]
pub(crate) fn listed_tsp() -> Vec<Vec<i64>> {
    vec![
        vec![0, 5, 6, 6, 6],
        vec![5, 0, 9, 8, 4],
        vec![6, 9, 0, 1, 7],
        vec![6, 8, 1, 0, 6],
        vec![6, 4, 7, 6, 0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsp_table_rows() {
        let i = gen_tsp(&listed_tsp()).unwrap();
        let Constraint::Extension { table, .. } = &i.constraints[1] else {
            panic!("expected extension");
        };
        assert_eq!(table.rows().len(), 20);
        assert!(gen_tsp(&[vec![0, 1], vec![1, 0]]).is_err());
        assert!(gen_tsp(&[vec![0, 1, 2], vec![2, 0, 1], vec![1, 1, 0]]).is_err());
    }

    #[test]
    fn graph_coloring_shape() {
        let data = GraphColoringData {
            n_nodes: 3,
            n_colors: 3,
            edges: vec![[0, 1], [1, 2]],
        };
        let i = gen_graph_coloring(&data).unwrap();
        assert_eq!(i.constraints.len(), 2);
        assert!(matches!(
            i.objective.as_ref().unwrap().target,
            ObjectiveTarget::Maximum(_)
        ));
        let bad = GraphColoringData { edges: vec![[0, 3]], ..data };
        assert!(gen_graph_coloring(&bad).is_err());
    }

    #[test]
    fn subgraph_redundant_block() {
        let data = SubgraphData {
            n_pattern_nodes: 2,
            n_target_nodes: 3,
            pattern_edges: vec![[0, 1], [1, 1]],
            target_edges: vec![[0, 1], [1, 2], [2, 2]],
        };
        let full = gen_subgraph_isomorphism(&data, Omit::default()).unwrap();
        let lean = gen_subgraph_isomorphism(
            &data,
            Omit {
                redundant: true,
                ..Omit::default()
            },
        )
        .unwrap();
        // alldiff, one loop table, two edge tables
        assert_eq!(lean.constraints.len(), 4);
        assert!(full.constraints.len() > lean.constraints.len());
    }

    #[test]
    fn mario_accepts_fuel_alias() {
        let data: MarioData = serde_json::from_str(
            r#"{"marioHouse": 0, "luigiHouse": 1, "fuelLimit": 10,
                "houses": [{"fuel": [0, 3], "gold": 0}, {"fuelConsumption": [2, 0], "gold": 5}]}"#,
        )
        .unwrap();
        let i = gen_mario(&data).unwrap();
        assert_eq!(i.variables.len(), 6);
    }
}
