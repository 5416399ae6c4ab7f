use std::sync::Arc;

use serde::Deserialize;

use super::builder::{column, ext, flat, id3, sum, weighted_sum, Builder};
use super::{GenError, Omit};
use crate::model::dsl::{add, dist, eq, ge, int, le, lt, mul, ne, sub, var};
use crate::model::{
    Condition, Constraint, Domain, Instance, Objective, ObjectiveTarget, Operand, OrderOp, Relation, Sense,
    Slide, Table,
};

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

/// Contradictory 3-SAT instance with `3n` variables and `2n` parity clauses.
pub fn gen_dubois(n: usize) -> Result<Instance, GenError> {
    if n < 3 {
        return Err(bad(format!("dubois needs n >= 3, got {n}")));
    }
    let odd = Arc::new(Table::supports(
        3,
        vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]],
    ));
    let even = Arc::new(Table::supports(
        3,
        vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
    ));
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", 3 * n, |_| Domain::range(0, 1));
    let scope = |idx: [usize; 3]| idx.iter().map(|&i| x[i].clone()).collect::<Vec<_>>();
    b.post(ext(scope([2 * n - 2, 2 * n - 1, 0]), &odd));
    for i in 0..n - 2 {
        b.post(ext(scope([i, 2 * n + i, i + 1]), &odd));
    }
    for i in 0..2 {
        b.post(ext(scope([n - 2 + i, 3 * n - 2, 3 * n - 1]), &odd));
    }
    for i in n..2 * n - 2 {
        b.post(ext(scope([i, 4 * n - 3 - i, i - 1]), &odd));
    }
    b.post(ext(scope([2 * n - 2, 2 * n - 1, 2 * n - 3]), &even));
    b.finish()
}

pub fn gen_golomb_ruler(n: usize, omit: Omit) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(bad(format!("golomb ruler needs n >= 2, got {n}")));
    }
    let length = (n * n + 1) as i64;
    let mut b = Builder::new(omit);
    let x = b.array1("x", n, |_| Domain::range(0, length - 1));
    let y = b.array2_when("y", n, n, |i, j| (i < j).then(|| Domain::range(1, length - 1)));
    b.post(Constraint::AllDifferent(y.iter().flatten().flatten().cloned().collect()));
    for i in 0..n {
        for j in i + 1..n {
            let yij = y[i][j].clone().expect("upper triangle cell");
            b.intension(eq(var(&x[j]), add(var(&x[i]), var(yij))));
        }
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Variable(x[n - 1].clone()),
    });
    b.decision(x);
    b.finish()
}

/// Langford pairs L(2, n): positions of both occurrences of every value.
pub fn gen_langford(n: usize) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(bad("langford needs n >= 1"));
    }
    let mut b = Builder::new(Omit::default());
    let v = b.array1("v", 2 * n, |_| Domain::range(1, n as i64));
    let p = b.array1("p", 2 * n, |_| Domain::range(0, 2 * n as i64 - 1));
    for second in [0, 1] {
        for i in 0..n {
            b.post(Constraint::Element {
                list: v.clone(),
                index: p[2 * i + second].clone(),
                value: Operand::Const(i as i64 + 1),
            });
        }
    }
    for i in 0..n {
        b.intension(eq(var(&p[2 * i]), add(int(i as i64 + 2), var(&p[2 * i + 1]))));
    }
    b.finish()
}

pub fn gen_low_autocorrelation(n: usize) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(bad(format!("low autocorrelation needs n >= 2, got {n}")));
    }
    let sign = || Domain::new([-1, 1]);
    let mut b = Builder::new(Omit::default());
    let x = b.array1("x", n, |_| sign());
    let y = b.array2_when("y", n - 1, n - 1, |k, i| (i + k + 1 < n).then(sign));
    let c = b.array1("c", n - 1, |k| {
        let m = (n - k - 1) as i64;
        Domain::range(-m, m)
    });
    let s = b.array1("s", n - 1, |k| {
        let m = (n - k - 1) as i64;
        (0..=m).map(|v| v * v).collect()
    });
    let row = |k: usize| y[k].iter().flatten().cloned().collect::<Vec<_>>();
    for k in 0..n - 1 {
        for (i, yki) in row(k).iter().enumerate() {
            b.intension(eq(var(yki), mul(var(&x[i]), var(&x[i + k + 1]))));
        }
    }
    for k in 0..n - 1 {
        b.post(sum(row(k), Relation::Eq, Operand::var(&c[k])));
    }
    for k in 0..n - 1 {
        b.intension(eq(var(&s[k]), mul(var(&c[k]), var(&c[k]))));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Sum {
            coeffs: vec![1; s.len()],
            scope: s,
        },
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagicHexagonData {
    pub n: usize,
    pub s: i64,
}

/// Cells of one sloping diagonal of a hexagon stored as a ragged `d × d`
/// grid (row `i` holds `d - |d/2 - i|` cells).
fn hexagon_diagonal(x: &[Vec<Option<String>>], i: usize, right: bool) -> Vec<String> {
    let d = x.len() as i64;
    let (i, h) = (i as i64, d / 2);
    let v1 = if right { (h - i).max(0) } else { (i - h).max(0) };
    let v2 = h - v1;
    (0..d - (h - i).abs())
        .map(|j| {
            let shift = if right { v2 - j } else { j - v2 };
            let col = i - shift.max(0);
            x[(j + v1) as usize][col as usize]
                .clone()
                .expect("diagonal stays inside the hexagon")
        })
        .collect()
}

pub fn gen_magic_hexagon(n: usize, s: i64, omit: Omit) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(bad(format!("magic hexagon needs n >= 2, got {n}")));
    }
    let gap = (3 * n * n - 3 * n + 1) as i64;
    let d = 2 * n - 1;
    let total = i128::from(gap) * i128::from(s) + i128::from(gap) * i128::from(gap - 1) / 2;
    if total % d as i128 != 0 {
        return Err(GenError::NonIntegralMagic {
            total: total as i64,
            lines: d as i64,
        });
    }
    let magic = i64::try_from(total / d as i128).map_err(|_| bad("magic sum overflows"))?;
    let hi = s.checked_add(gap - 1).ok_or_else(|| bad("start value overflows"))?;
    let mut b = Builder::new(omit);
    let x = b.array2_when("x", d, d, |i, j| {
        (j < d - (d / 2).abs_diff(i)).then(|| Domain::range(s, hi))
    });
    let cells = |i: usize| x[i].iter().flatten().cloned().collect::<Vec<_>>();
    b.post(Constraint::AllDifferent(x.iter().flatten().flatten().cloned().collect()));
    for i in 0..d {
        b.post(sum(cells(i), Relation::Eq, magic));
    }
    for i in 0..d {
        b.post(sum(hexagon_diagonal(&x, i, true), Relation::Eq, magic));
    }
    for i in 0..d {
        b.post(sum(hexagon_diagonal(&x, i, false), Relation::Eq, magic));
    }
    let at = |i: usize, j: usize| var(x[i][j].clone().expect("corner cell"));
    for (a, c) in [
        ((0, 0), (0, n - 1)),
        ((0, 0), (n - 1, d - 1)),
        ((0, 0), (d - 1, n - 1)),
        ((0, 0), (d - 1, 0)),
        ((0, 0), (n - 1, 0)),
        ((0, n - 1), (n - 1, 0)),
    ] {
        b.symmetry(Constraint::Intension(lt(at(a.0, a.1), at(c.0, c.1))));
    }
    b.finish()
}

/// Pre-set cells of a magic square; 0 marks a free cell.
pub fn gen_magic_square(n: usize, clues: Option<&[Vec<i64>]>) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(bad("magic square needs n >= 1"));
    }
    if let Some(c) = clues {
        if c.len() != n || c.iter().any(|row| row.len() != n) {
            return Err(bad(format!("clues must form a {n}x{n} matrix")));
        }
    }
    let magic = (n * (n * n + 1) / 2) as i64;
    let mut b = Builder::new(Omit::default());
    let x = b.array2("x", n, n, |_, _| Domain::range(1, (n * n) as i64));
    b.post(Constraint::AllDifferent(flat(&x)));
    for row in &x {
        b.post(sum(row.clone(), Relation::Eq, magic));
    }
    for j in 0..n {
        b.post(sum(column(&x, j), Relation::Eq, magic));
    }
    b.post(sum((0..n).map(|i| x[i][i].clone()).collect(), Relation::Eq, magic));
    b.post(sum((0..n).map(|i| x[n - 1 - i][i].clone()).collect(), Relation::Eq, magic));
    if let Some(c) = clues {
        let (scope, values): (Vec<String>, Vec<i64>) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| c[i][j] != 0)
            .map(|(i, j)| (x[i][j].clone(), c[i][j]))
            .unzip();
        if !scope.is_empty() {
            b.post(Constraint::Instantiation { scope, values });
        }
    }
    b.finish()
}

/// Down diagonals (constant `j - i`) followed by up diagonals (constant
/// `i + j`), each listed from its topmost cell.
fn diagonals<T: Clone>(x: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let n = x.len();
    let mut down = Vec::new();
    for start in (0..n).rev() {
        down.push((0..n - start).map(|k| x[start + k][k].clone()).collect());
    }
    for start in 1..n {
        down.push((0..n - start).map(|k| x[k][start + k].clone()).collect());
    }
    let mut up = Vec::new();
    for s in 0..2 * n - 1 {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        up.push((lo..=hi).map(|i| x[i][s - i].clone()).collect());
    }
    (down, up)
}

pub fn gen_coloured_queens(n: usize) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(bad("coloured queens needs n >= 1"));
    }
    let mut b = Builder::new(Omit::default());
    let x = b.array2("x", n, n, |_, _| Domain::range(0, n as i64 - 1));
    let (down, up) = diagonals(&x);
    b.post(Constraint::AllDifferentMatrix(x));
    for d in down.into_iter().chain(up) {
        b.post(Constraint::AllDifferent(d));
    }
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GracefulGraphData {
    pub k: usize,
    pub p: usize,
}

/// Graceful labelling of `K_k × P_p`.
pub fn gen_graceful_graph(k: usize, p: usize) -> Result<Instance, GenError> {
    if k < 1 || p < 1 {
        return Err(bad("graceful graph needs k >= 1 and p >= 1"));
    }
    let n_edges = (k * (k - 1) * p / 2 + k * (p - 1)) as i64;
    if n_edges == 0 {
        return Err(bad("graceful graph has no edge"));
    }
    let mut b = Builder::new(Omit::default());
    let cn = b.array2("cn", p, k, |_, _| Domain::range(0, n_edges));
    let mut ce = Vec::new();
    for i in 0..p {
        for j1 in 0..k {
            for j2 in 0..k {
                if j1 < j2 {
                    let id = b.var(id3("ce", i, j1, j2), Domain::range(1, n_edges));
                    ce.push((i, j1, j2, id));
                }
            }
        }
    }
    let cp = b.array2("cp", p - 1, k, |_, _| Domain::range(1, n_edges));
    b.post(Constraint::AllDifferent(flat(&cn)));
    b.post(Constraint::AllDifferent(
        ce.iter().map(|e| e.3.clone()).chain(flat(&cp)).collect(),
    ));
    for (i, j1, j2, id) in &ce {
        b.intension(eq(var(id), dist(var(&cn[*i][*j1]), var(&cn[*i][*j2]))));
    }
    for (i, row) in cp.iter().enumerate() {
        for (j, id) in row.iter().enumerate() {
            b.intension(eq(var(id), dist(var(&cn[i][j]), var(&cn[i + 1][j]))));
        }
    }
    b.finish()
}

/// Ordered pairs of distinct cells `(i1, j1) < (i2, j2)` that share a row,
/// column or diagonal.
fn attacking_pairs(n: usize) -> Vec<((usize, usize), (usize, usize))> {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut pairs = Vec::new();
    for (a, &(i1, j1)) in cells.iter().enumerate() {
        for &(i2, j2) in &cells[a + 1..] {
            if i1 == i2 || j1 == j2 || i1.abs_diff(i2) == j1.abs_diff(j2) {
                pairs.push(((i1, j1), (i2, j2)));
            }
        }
    }
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeacableVariant {
    M1,
    M2,
}

pub fn gen_peacable_armies(n: usize, variant: PeacableVariant) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(bad(format!("peacable armies needs n >= 2, got {n}")));
    }
    let mut b = Builder::new(Omit::default());
    match variant {
        PeacableVariant::M1 => {
            let bl = b.array2("b", n, n, |_, _| Domain::range(0, 1));
            let wh = b.array2("w", n, n, |_, _| Domain::range(0, 1));
            let pairs = attacking_pairs(n);
            for i in 0..n {
                for j in 0..n {
                    b.intension(le(
                        add(var(&bl[i][j]), var(&wh[i][j])),
                        int(1),
                    ));
                    for &(_, (i2, j2)) in pairs.iter().filter(|(a, _)| *a == (i, j)) {
                        b.intension(le(
                            add(var(&bl[i][j]), var(&wh[i2][j2])),
                            int(1),
                        ));
                        b.intension(le(
                            add(var(&wh[i][j]), var(&bl[i2][j2])),
                            int(1),
                        ));
                    }
                }
            }
            let scope: Vec<String> = flat(&bl).into_iter().chain(flat(&wh)).collect();
            let coeffs = (0..2 * n * n)
                .map(|i| Operand::Const(if i < n * n { 1 } else { -1 }))
                .collect();
            b.post(weighted_sum(scope, coeffs, Relation::Eq, 0));
            b.objective(Objective {
                sense: Sense::Maximize,
                target: ObjectiveTarget::Sum {
                    coeffs: vec![1; n * n],
                    scope: flat(&bl),
                },
            });
        }
        PeacableVariant::M2 => {
            let x = b.array2("x", n, n, |_, _| Domain::range(0, 2));
            let half = (n * n / 2) as i64;
            let nb = b.var("nb", Domain::range(0, half - 1));
            let nw = b.var("nw", Domain::range(0, half - 1));
            for ((i1, j1), (i2, j2)) in attacking_pairs(n) {
                b.intension(ne(
                    add(var(&x[i1][j1]), var(&x[i2][j2])),
                    int(3),
                ));
            }
            for (value, counter) in [(1, &nb), (2, &nw)] {
                b.post(Constraint::Count {
                    scope: flat(&x),
                    values: vec![value],
                    condition: Condition::new(Relation::Eq, Operand::var(counter)),
                });
            }
            b.intension(eq(var(&nb), var(&nw)));
            b.objective(Objective {
                sense: Sense::Maximize,
                target: ObjectiveTarget::Variable(nb),
            });
        }
    }
    b.finish()
}

/// Still-life rule with wastage on a 3×3 neighbourhood `t[0..9]` (centre
/// `t[4]`) and wastage value `t[9]`.
pub fn still_life_rule(t: &[i64]) -> bool {
    let s1 = t[0] + t[1] + t[2] + t[3] + t[5] + t[6] + t[7] + t[8];
    let s2 = t[0] * t[2] + t[2] * t[8] + t[8] * t[6] + t[6] * t[0] + t[1] + t[3] + t[5] + t[7];
    let s3 = t[1] + t[3] + t[5] + t[7];
    (t[4] != 1 || s1 >= 2)
        && (t[4] != 1 || s1 <= 3)
        && (t[4] != 0 || s1 != 3)
        && (t[4] != 1 || s2 > 1 || t[9] >= 1)
        && (t[4] != 1 || s2 > 0 || t[9] >= 2)
        && (t[4] != 0 || s3 < 4 || t[9] >= 2)
        && (t[4] != 0 || s3 > 1 || t[9] >= 1)
        && (t[4] != 0 || s3 > 0 || t[9] >= 2)
}

/// Every tuple of `{0,1}^9 × {0,1,2}` accepted by [`still_life_rule`].
pub fn still_life_table() -> Table {
    let rows = (0..512i64).flat_map(|bits| {
        (0..3).filter_map(move |w| {
            let mut t: Vec<i64> = (0..9).map(|k| (bits >> (8 - k)) & 1).collect();
            t.push(w);
            still_life_rule(&t).then_some(t)
        })
    });
    Table::supports(10, rows)
}

pub fn gen_still_life(n: usize, omit: Omit) -> Result<Instance, GenError> {
    if n < 1 {
        return Err(bad("still life needs n >= 1"));
    }
    let m = n + 2;
    let mut b = Builder::new(omit);
    let x = b.array2("x", m, m, |_, _| Domain::range(0, 1));
    let w = b.array2("w", m, m, |_, _| Domain::range(0, 2));
    let ws = b.array1("ws", m, |_| Domain::range(0, 2 * (m * m) as i64));
    let z = b.var("z", Domain::range(0, (n * n) as i64));

    for scope in [x[0].clone(), x[n + 1].clone(), column(&x, 0), column(&x, n + 1)] {
        b.post(Constraint::Instantiation {
            values: vec![0; scope.len()],
            scope,
        });
    }

    let conflicts = Arc::new(Table::conflicts(3, vec![vec![1, 1, 1]]));
    let template = Constraint::Extension {
        scope: vec!["%0".into(), "%1".into(), "%2".into()],
        table: Arc::clone(&conflicts),
    };
    for list in [x[1].clone(), x[n].clone(), column(&x, 1), column(&x, n)] {
        b.post(Constraint::Slide(Slide {
            list,
            offset: 1,
            template: Box::new(template.clone()),
        }));
    }

    let rule = Arc::new(still_life_table());
    for i in 1..=n {
        for j in 1..=n {
            let mut scope: Vec<String> = (i - 1..=i + 1)
                .flat_map(|r| (j - 1..=j + 1).map(move |c| (r, c)))
                .map(|(r, c)| x[r][c].clone())
                .collect();
            scope.push(w[i][j].clone());
            b.post(ext(scope, &rule));
        }
    }

    let one = |a: &str, c: &str| eq(add(var(a), var(c)), int(1));
    for j in 1..=n {
        b.intension(one(&w[0][j], &x[1][j]));
    }
    for j in 1..=n {
        b.intension(one(&w[n + 1][j], &x[n][j]));
    }
    for i in 1..=n {
        b.intension(one(&w[i][0], &x[i][1]));
    }
    for i in 1..=n {
        b.intension(one(&w[i][n + 1], &x[i][n]));
    }

    for i in 0..m {
        let scope = if i == 0 {
            w[0].clone()
        } else {
            std::iter::once(ws[i - 1].clone()).chain(w[i].iter().cloned()).collect()
        };
        b.post(sum(scope, Relation::Eq, Operand::var(&ws[i])));
    }
    let n_ = n as i64;
    b.post(weighted_sum(
        vec![z.clone(), ws[n + 1].clone()],
        vec![Operand::Const(4), Operand::Const(1)],
        Relation::Eq,
        2 * n_ * n_ + 4 * n_,
    ));
    for i in 0..=n {
        let bound = 2 * ((n - i) / 3) as i64 + (n / 3) as i64;
        b.redundant(Constraint::Intension(ge(
            sub(var(&ws[n + 1]), var(&ws[i])),
            int(bound),
        )));
    }
    b.objective(Objective {
        sense: Sense::Maximize,
        target: ObjectiveTarget::Variable(z),
    });
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BibdData {
    pub v: usize,
    #[serde(default)]
    pub b: usize,
    #[serde(default)]
    pub r: usize,
    pub k: usize,
    pub lambda: usize,
}

/// 0/1 incidence matrix model; `b` and `r` are derived when given as 0.
pub fn gen_bibd(data: &BibdData, omit: Omit) -> Result<Instance, GenError> {
    let BibdData { v, k, lambda, .. } = *data;
    if v < 2 || k < 2 {
        return Err(bad("bibd needs v >= 2 and k >= 2"));
    }
    let nb = if data.b != 0 { data.b } else { lambda * v * (v - 1) / (k * (k - 1)) };
    let r = if data.r != 0 { data.r } else { lambda * (v - 1) / (k - 1) };
    if nb == 0 || r == 0 {
        return Err(bad("bibd parameters give an empty design"));
    }
    let mut b = Builder::new(omit);
    let x = b.array2("x", v, nb, |_, _| Domain::range(0, 1));
    for row in &x {
        b.post(sum(row.clone(), Relation::Eq, r as i64));
    }
    for j in 0..nb {
        b.post(sum(column(&x, j), Relation::Eq, k as i64));
    }
    for i in 0..v {
        for j in i + 1..v {
            let coeffs = x[j].iter().map(Operand::var).collect();
            b.post(weighted_sum(x[i].clone(), coeffs, Relation::Eq, lambda as i64));
        }
    }
    b.symmetry(Constraint::LexMatrix {
        matrix: x,
        op: OrderOp::Le,
    });
    b.finish()
}
