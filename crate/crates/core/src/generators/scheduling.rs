use std::sync::Arc;

use serde::Deserialize;

use super::builder::{column, ext, flat, sum, Builder};
use super::{GenError, Omit};
use crate::model::dsl::{add, eq, int, le, lt, mul, ne, or, var};
use crate::model::{
    Condition, Constraint, Domain, Instance, Objective, ObjectiveTarget, Occurs, Operand, OrderOp,
    Relation, Sense, Table,
};

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct BacpData {
    pub n_periods: usize,
    pub min_credits: i64,
    pub max_credits: i64,
    pub min_courses: i64,
    pub max_courses: i64,
    pub credits: Vec<i64>,
    pub prerequisites: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BacpVariant {
    /// Channeling through one table per course.
    M1,
    /// Channeling through `cp[c][p] = credits[c] * (s[c] = p)` predicates.
    M2,
}

pub fn gen_bacp(data: &BacpData, variant: BacpVariant, omit: Omit) -> Result<Instance, GenError> {
    let np = data.n_periods;
    let nc = data.credits.len();
    if np < 1 || nc < 1 {
        return Err(bad("bacp needs at least one period and one course"));
    }
    if data.credits.iter().any(|&c| c < 0) {
        return Err(bad("credits must be non-negative"));
    }
    if data.min_courses > data.max_courses || data.min_credits > data.max_credits {
        return Err(bad("minimum loads exceed maximum loads"));
    }
    if let Some(p) = data.prerequisites.iter().find(|p| p[0] >= nc || p[1] >= nc) {
        return Err(bad(format!("prerequisite {p:?} names an unknown course")));
    }
    let mut b = Builder::new(omit);
    let s = b.array1("s", nc, |_| Domain::range(0, np as i64 - 1));
    let co = b.array1("co", np, |_| Domain::range(data.min_courses, data.max_courses));
    let cr = b.array1("cr", np, |_| Domain::range(data.min_credits, data.max_credits));
    let cp = b.array2("cp", nc, np, |c, _| Domain::new([0, data.credits[c]]));

    for c in 0..nc {
        match variant {
            BacpVariant::M1 => {
                let rows = (0..np).map(|p| {
                    let mut t = vec![0; np + 1];
                    t[p] = data.credits[c];
                    t[np] = p as i64;
                    t
                });
                let table = Arc::new(Table::supports(np + 1, rows));
                let mut scope = cp[c].clone();
                scope.push(s[c].clone());
                b.post(ext(scope, &table));
            }
            BacpVariant::M2 => {
                for p in 0..np {
                    b.intension(eq(
                        var(&cp[c][p]),
                        mul(int(data.credits[c]), eq(var(&s[c]), int(p as i64))),
                    ));
                }
            }
        }
    }
    for p in 0..np {
        b.post(Constraint::Count {
            scope: s.clone(),
            values: vec![p as i64],
            condition: Condition::new(Relation::Eq, Operand::var(&co[p])),
        });
    }
    for p in 0..np {
        b.post(sum(column(&cp, p), Relation::Eq, Operand::var(&cr[p])));
    }
    for pre in &data.prerequisites {
        b.intension(lt(var(&s[pre[0]]), var(&s[pre[1]])));
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Maximum(cr),
    });
    b.decision(s);
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarClass {
    pub demand: i64,
    pub options: Vec<i64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionLimit {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct CarSequencingData {
    #[serde(alias = "classes")]
    pub car_classes: Vec<CarClass>,
    #[serde(alias = "limits")]
    pub option_limits: Vec<OptionLimit>,
}

pub fn gen_car_sequencing(data: &CarSequencingData, omit: Omit) -> Result<Instance, GenError> {
    let classes = &data.car_classes;
    let limits = &data.option_limits;
    let n_options = limits.len();
    if classes.is_empty() {
        return Err(bad("car sequencing needs at least one class"));
    }
    if classes.iter().any(|c| c.demand < 0 || c.options.len() != n_options) {
        return Err(bad(format!(
            "every class needs a non-negative demand and {n_options} options"
        )));
    }
    if classes.iter().flat_map(|c| &c.options).any(|&o| o != 0 && o != 1) {
        return Err(bad("options must be 0 or 1"));
    }
    if limits.iter().any(|l| l.den < 1 || l.num < 0) {
        return Err(bad("option limits need den >= 1 and num >= 0"));
    }
    let n_cars: i64 = classes.iter().map(|c| c.demand).sum();
    if n_cars < 1 {
        return Err(bad("no car to sequence"));
    }
    let nc = n_cars as usize;
    let mut b = Builder::new(omit);
    let c = b.array1("c", nc, |_| Domain::range(0, classes.len() as i64 - 1));
    let o = b.array2("o", nc, n_options, |_, _| Domain::range(0, 1));

    b.post(Constraint::Cardinality {
        scope: c.clone(),
        values: (0..classes.len() as i64).collect(),
        occurs: classes.iter().map(|cl| Occurs::Exact(cl.demand)).collect(),
        closed: false,
    });
    let table = Arc::new(Table::supports(
        1 + n_options,
        classes.iter().enumerate().map(|(i, cl)| {
            std::iter::once(i as i64).chain(cl.options.iter().copied()).collect()
        }),
    ));
    for i in 0..nc {
        let scope = std::iter::once(c[i].clone()).chain(o[i].iter().cloned()).collect();
        b.post(ext(scope, &table));
    }
    for (k, l) in limits.iter().enumerate() {
        let col = column(&o, k);
        let den = l.den as usize;
        for i in 0..nc {
            if i + den <= nc {
                b.post(sum(col[i..i + den].to_vec(), Relation::Le, l.num));
            }
        }
    }
    for (k, l) in limits.iter().enumerate() {
        let col = column(&o, k);
        let occurrences: i64 = classes.iter().map(|cl| cl.options[k] * cl.demand).sum();
        for i in 0..n_cars {
            let remaining = occurrences - i * l.num;
            let possible = n_cars - i * l.den;
            if remaining > 0 && possible > 0 {
                b.redundant(sum(
                    col[..possible as usize].to_vec(),
                    Relation::Ge,
                    remaining,
                ));
            }
        }
    }
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Job {
    pub duration: i64,
    pub successors: Vec<usize>,
    pub required_quantities: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RcpspData {
    pub horizon: i64,
    pub resource_capacities: Vec<i64>,
    pub jobs: Vec<Job>,
}

pub fn gen_rcpsp(data: &RcpspData) -> Result<Instance, GenError> {
    let n = data.jobs.len();
    let nr = data.resource_capacities.len();
    if n < 1 || data.horizon < 1 {
        return Err(bad("rcpsp needs at least one job and a positive horizon"));
    }
    for (i, job) in data.jobs.iter().enumerate() {
        if job.duration < 0 || job.required_quantities.iter().any(|&q| q < 0) {
            return Err(bad(format!("job {i} has a negative duration or quantity")));
        }
        if job.required_quantities.len() != nr {
            return Err(bad(format!("job {i} must list {nr} required quantities")));
        }
        if job.successors.iter().any(|&s| s >= n) {
            return Err(bad(format!("job {i} has an unknown successor")));
        }
    }
    let mut b = Builder::new(Omit::default());
    let s = b.array1("s", n, |i| {
        if i == 0 {
            Domain::new([0])
        } else {
            Domain::range(0, data.horizon - 1)
        }
    });
    for (i, job) in data.jobs.iter().enumerate() {
        for &succ in &job.successors {
            b.intension(le(add(var(&s[i]), int(job.duration)), var(&s[succ])));
        }
    }
    for (r, &capacity) in data.resource_capacities.iter().enumerate() {
        let users: Vec<usize> = (0..n)
            .filter(|&i| data.jobs[i].required_quantities[r] > 0)
            .collect();
        if users.is_empty() {
            continue;
        }
        b.post(Constraint::Cumulative {
            origins: users.iter().map(|&i| s[i].clone()).collect(),
            lengths: users.iter().map(|&i| data.jobs[i].duration).collect(),
            heights: users
                .iter()
                .map(|&i| data.jobs[i].required_quantities[r])
                .collect(),
            limit: capacity,
        });
    }
    b.objective(Objective {
        sense: Sense::Minimize,
        target: ObjectiveTarget::Variable(s[n - 1].clone()),
    });
    b.finish()
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SocialGolfersData {
    pub n_groups: usize,
    pub group_size: usize,
    pub n_weeks: usize,
}

pub fn gen_social_golfers(data: SocialGolfersData, omit: Omit) -> Result<Instance, GenError> {
    let SocialGolfersData { n_groups, group_size, n_weeks } = data;
    if n_groups < 1 || group_size < 1 || n_weeks < 1 {
        return Err(bad("social golfers needs positive groups, size and weeks"));
    }
    let np = n_groups * group_size;
    let mut b = Builder::new(omit);
    let x = b.array2("x", n_weeks, np, |_, _| Domain::range(0, n_groups as i64 - 1));
    for row in &x {
        b.post(Constraint::Cardinality {
            scope: row.clone(),
            values: (0..n_groups as i64).collect(),
            occurs: vec![Occurs::Exact(group_size as i64); n_groups],
            closed: false,
        });
    }
    for w1 in 0..n_weeks {
        for w2 in w1 + 1..n_weeks {
            for p1 in 0..np {
                for p2 in p1 + 1..np {
                    b.intension(or(
                        ne(var(&x[w1][p1]), var(&x[w1][p2])),
                        ne(var(&x[w2][p1]), var(&x[w2][p2])),
                    ));
                }
            }
        }
    }
    b.symmetry(Constraint::Instantiation {
        scope: x[0].clone(),
        values: (0..np).map(|p| (p / group_size) as i64).collect(),
    });
    if n_weeks > 1 {
        for k in 0..group_size {
            b.symmetry(Constraint::Instantiation {
                scope: column(&x, k)[1..].to_vec(),
                values: vec![k as i64; n_weeks - 1],
            });
        }
    }
    b.symmetry(Constraint::LexMatrix {
        matrix: x,
        op: OrderOp::Le,
    });
    b.finish()
}

/// Index of the match between `t1 < t2` among all pairs, ordered by `t1`
/// then `t2`.
pub fn match_number(n_teams: usize, t1: usize, t2: usize) -> i64 {
    let (n, t1, t2) = (n_teams as i64, t1 as i64, t2 as i64);
    let possible = (n - 1) * n / 2;
    possible - ((n - t1) * (n - t1 - 1)) / 2 + (t2 - t1 - 1)
}

pub fn gen_sports_scheduling(n_teams: usize, omit: Omit) -> Result<Instance, GenError> {
    if n_teams < 4 || !n_teams.is_multiple_of(2) {
        return Err(bad(format!("sports scheduling needs an even nTeams >= 4, got {n_teams}")));
    }
    let nw = n_teams - 1;
    let np = n_teams / 2;
    let n_matches = (n_teams * (n_teams - 1) / 2) as i64;
    let teams = || Domain::range(0, n_teams as i64 - 1);
    let table = Arc::new(Table::supports(
        3,
        (0..n_teams).flat_map(|t1| {
            (t1 + 1..n_teams).map(move |t2| vec![t1 as i64, t2 as i64, match_number(n_teams, t1, t2)])
        }),
    ));
    let all_teams: Vec<i64> = (0..n_teams as i64).collect();

    let mut b = Builder::new(omit);
    let h = b.array2("h", np, nw, |_, _| teams());
    let a = b.array2("a", np, nw, |_, _| teams());
    let m = b.array2("m", np, nw, |_, _| Domain::range(0, n_matches - 1));
    b.post(Constraint::AllDifferent(flat(&m)));
    for p in 0..np {
        for w in 0..nw {
            b.post(ext(vec![h[p][w].clone(), a[p][w].clone(), m[p][w].clone()], &table));
        }
    }
    for w in 0..nw {
        b.post(Constraint::AllDifferent(
            column(&h, w).into_iter().chain(column(&a, w)).collect(),
        ));
    }
    for p in 0..np {
        b.post(Constraint::Cardinality {
            scope: h[p].iter().chain(&a[p]).cloned().collect(),
            values: all_teams.clone(),
            occurs: vec![Occurs::Between(1, 2); n_teams],
            closed: false,
        });
    }
    b.symmetry(Constraint::Instantiation {
        scope: column(&m, 0),
        values: (0..np).map(|p| match_number(n_teams, 2 * p, 2 * p + 1)).collect(),
    });
    for w in 0..nw {
        b.symmetry(Constraint::Count {
            scope: column(&m, w),
            values: vec![match_number(n_teams, 0, w + 1)],
            condition: Condition::new(Relation::Eq, 1),
        });
    }

    let hd = b.array1("hd", np, |_| teams());
    let ad = b.array1("ad", np, |_| teams());
    b.post(Constraint::AllDifferent(hd.iter().chain(&ad).cloned().collect()));
    for p in 0..np {
        let scope = h[p]
            .iter()
            .chain([&hd[p], &ad[p]])
            .chain(&a[p])
            .cloned()
            .collect();
        b.post(Constraint::Cardinality {
            scope,
            values: all_teams.clone(),
            occurs: vec![Occurs::Exact(2); n_teams],
            closed: false,
        });
    }
    for p in 0..np {
        b.symmetry(Constraint::Intension(lt(var(&hd[p]), var(&ad[p]))));
    }
    b.finish()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct MisteryShopperData {
    pub visitor_groups: Vec<usize>,
    pub visitee_groups: Vec<usize>,
}

/// Rows `(group, person)` numbering persons consecutively across groups.
fn number_per(groups: &[usize]) -> Table {
    let mut rows = Vec::new();
    let mut person = 0;
    for (g, &size) in groups.iter().enumerate() {
        for _ in 0..size {
            rows.push(vec![g as i64, person]);
            person += 1;
        }
    }
    Table::supports(2, rows)
}

pub fn gen_mistery_shopper(data: &MisteryShopperData, omit: Omit) -> Result<Instance, GenError> {
    let n_visitors: usize = data.visitor_groups.iter().sum();
    let n_visitees: usize = data.visitee_groups.iter().sum();
    if n_visitors < 1 || data.visitor_groups.is_empty() {
        return Err(bad("mistery shopper needs at least one visitor"));
    }
    if n_visitees > n_visitors {
        return Err(bad(format!(
            "{n_visitees} visitees exceed {n_visitors} visitors"
        )));
    }
    let n = n_visitors;
    let n_dummies = n_visitors - n_visitees;
    let mut visitee_groups = data.visitee_groups.clone();
    if n_dummies > 0 {
        visitee_groups.push(n_dummies);
    }
    let n_weeks = data.visitor_groups.len();
    let nvr_groups = data.visitor_groups.len() as i64;
    let nve_groups = visitee_groups.len() as i64;

    let mut b = Builder::new(omit);
    let persons = || Domain::range(0, n as i64 - 1);
    let vr = b.array2("vr", n, n_weeks, |_, _| persons());
    let ve = b.array2("ve", n, n_weeks, |_, _| persons());
    let gvr = b.array2("gvr", n, n_weeks, |_, _| Domain::range(0, nvr_groups - 1));
    let gve = b.array2("gve", n, n_weeks, |_, _| Domain::range(0, nve_groups - 1));

    for w in 0..n_weeks {
        b.post(Constraint::AllDifferent(column(&vr, w)));
    }
    for w in 0..n_weeks {
        b.post(Constraint::AllDifferent(column(&ve, w)));
    }
    for row in &gvr {
        b.post(Constraint::AllDifferent(row.clone()));
    }
    for row in &gve {
        b.post(Constraint::AllDifferent(row.clone()));
    }
    for w in 0..n_weeks {
        b.post(Constraint::Channel {
            first: column(&vr, w),
            second: column(&ve, w),
        });
    }
    let visitor_table = Arc::new(number_per(&data.visitor_groups));
    let visitee_table = Arc::new(number_per(&visitee_groups));
    for i in 0..n {
        for w in 0..n_weeks {
            b.post(ext(vec![gvr[i][w].clone(), vr[i][w].clone()], &visitor_table));
        }
    }
    for i in 0..n {
        for w in 0..n_weeks {
            b.post(ext(vec![gve[i][w].clone(), ve[i][w].clone()], &visitee_table));
        }
    }
    b.symmetry(Constraint::LexMatrix {
        matrix: vr.clone(),
        op: OrderOp::Le,
    });
    if n_dummies > 0 {
        for w in 0..n_weeks {
            let col = column(&vr, w);
            for pair in col[n_visitees..].windows(2) {
                b.symmetry(Constraint::Intension(lt(var(&pair[0]), var(&pair[1]))));
            }
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_numbers() {
        assert_eq!(match_number(10, 0, 1), 0);
        assert_eq!(match_number(10, 8, 9), 44);
        let all: Vec<i64> = (0..10)
            .flat_map(|a| (a + 1..10).map(move |b| match_number(10, a, b)))
            .collect();
        assert_eq!(all, (0..45).collect::<Vec<_>>());
    }

    #[test]
    fn sports_table_rows() {
        let i = gen_sports_scheduling(10, Omit::default()).unwrap();
        let Constraint::Extension { table, .. } = &i.constraints[1] else {
            panic!("expected extension");
        };
        assert_eq!(table.rows().len(), 45);
        assert!(gen_sports_scheduling(7, Omit::default()).is_err());
    }

    #[test]
    fn bacp_channeling_rows() {
        let data = BacpData {
            n_periods: 3,
            min_credits: 0,
            max_credits: 10,
            min_courses: 0,
            max_courses: 3,
            credits: vec![2, 3],
            prerequisites: vec![[0, 1]],
        };
        let i = gen_bacp(&data, BacpVariant::M1, Omit::default()).unwrap();
        let Constraint::Extension { table, scope } = &i.constraints[0] else {
            panic!("expected extension");
        };
        assert_eq!(scope.len(), 4);
        assert!(table.accepts(&[0, 2, 0, 1]));
        assert!(!table.accepts(&[2, 0, 0, 1]));
        assert!(gen_bacp(&data, BacpVariant::M2, Omit::default()).is_ok());
    }

    #[test]
    fn car_sequencing_redundant_block() {
        let data: CarSequencingData = serde_json::from_str(
            r#"{"carClasses": [{"demand": 1, "options": [1]}, {"demand": 2, "options": [0]}],
                "optionLimits": [{"num": 1, "den": 2}]}"#,
        )
        .unwrap();
        let full = gen_car_sequencing(&data, Omit::default()).unwrap();
        // cardinality, 3 links, 2 windows, then remaining >= 1 for i = 0
        assert_eq!(full.constraints.len(), 1 + 3 + 2 + 1);
    }

    #[test]
    fn mistery_dummy_group() {
        let data = MisteryShopperData {
            visitor_groups: vec![4, 4, 4],
            visitee_groups: vec![3, 2, 4],
        };
        let i = gen_mistery_shopper(&data, Omit::default()).unwrap();
        assert_eq!(i.variable("gve[0][0]").unwrap().domain.len(), 4);
        let lts = i
            .constraints
            .iter()
            .filter(|c| matches!(c, Constraint::Intension(_)))
            .count();
        assert_eq!(lts, 3 * 2);
        let bigger = MisteryShopperData {
            visitor_groups: vec![1],
            visitee_groups: vec![2],
        };
        assert!(gen_mistery_shopper(&bigger, Omit::default()).is_err());
    }
}
