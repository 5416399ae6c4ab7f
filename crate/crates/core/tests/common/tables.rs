//! The competition ranking tables, transcribed as printed, and a builder
//! for record sets that realise their raw counts.

use xcsp_mini::harness::{Mode, RankBy, RunRecord, RunStatus};

pub struct Row {
    pub solver: &'static str,
    /// The ranking count: #solved, or #best for the fast track.
    pub count: usize,
    /// The parenthesised best-known count of the COP tables.
    pub best: Option<usize>,
    pub pct_instances: u32,
    pub pct_vbs: u32,
}

pub struct Track {
    pub name: &'static str,
    pub mode: Mode,
    pub rank_by: RankBy,
    pub n_instances: usize,
    pub vbs: usize,
    pub vbs_pct_instances: u32,
    pub rows: Vec<Row>,
}

fn row(solver: &'static str, count: usize, best: Option<usize>, pi: u32, pv: u32) -> Row {
    Row {
        solver,
        count,
        best,
        pct_instances: pi,
        pct_vbs: pv,
    }
}

pub fn tracks() -> Vec<Track> {
    vec![
        Track {
            name: "CSP sequential",
            mode: Mode::Csp,
            rank_by: RankBy::Solved,
            n_instances: 236,
            vbs: 164,
            vbs_pct_instances: 69,
            rows: vec![
                row("scop order+MapleCOMSPS", 146, None, 62, 89),
                row("scop both+MapleCOMSPS", 140, None, 59, 85),
                row("PicatSAT", 138, None, 58, 84),
                row("Mistral-2.0", 116, None, 49, 71),
                row("Choco-solver seq", 115, None, 49, 70),
                row("Concrete", 92, None, 39, 56),
                row("OscaR-Conf. Ordering+restarts", 90, None, 38, 55),
                row("Concrete-SuperNG", 84, None, 36, 51),
                row("Sat4j-CSP", 83, None, 35, 51),
                row("OscaR - Conflict Ordering", 81, None, 34, 49),
                row("cosoco", 79, None, 33, 48),
                row("BTD_12", 76, None, 32, 46),
                row("BTD", 76, None, 32, 46),
                row("macht", 66, None, 28, 40),
            ],
        },
        Track {
            name: "COP sequential",
            mode: Mode::Cop,
            rank_by: RankBy::Solved,
            n_instances: 346,
            vbs: 146,
            vbs_pct_instances: 42,
            rows: vec![
                row("PicatSAT", 132, Some(132), 38, 90),
                row("Concrete", 105, Some(148), 30, 72),
                row("Choco-solver seq", 102, Some(154), 29, 70),
                row("OscaR-Conf. Ordering+restarts", 99, Some(132), 29, 68),
                row("Concrete-SuperNG", 99, Some(139), 29, 68),
                row("cosoco", 64, Some(112), 18, 44),
                row("OscaR - Hybrid", 61, Some(132), 18, 42),
                row("Sat4j-CSP", 54, Some(86), 16, 37),
            ],
        },
        Track {
            name: "COP sequential fast",
            mode: Mode::Cop,
            rank_by: RankBy::BestKnown,
            n_instances: 346,
            vbs: 316,
            vbs_pct_instances: 91,
            rows: vec![
                row("Concrete", 151, None, 44, 48),
                row("Choco-solver seq", 146, None, 42, 46),
                row("OscaR - Hybrid", 139, None, 40, 44),
                row("OscaR - Conflict Ordering with restarts", 133, None, 38, 42),
                row("Concrete-SuperNG", 129, None, 37, 41),
                row("Mistral-2.0", 123, None, 36, 39),
                row("cosoco", 107, None, 31, 34),
                row("Sat4j-CSP", 78, None, 23, 25),
            ],
        },
        Track {
            name: "CSP parallel",
            mode: Mode::Csp,
            rank_by: RankBy::Solved,
            n_instances: 236,
            vbs: 168,
            vbs_pct_instances: 71,
            rows: vec![
                row("scop order+glucose-syrup", 151, None, 64, 90),
                row("scop both+glucose-syrup", 138, None, 58, 82),
                row("Choco-solver par", 134, None, 57, 80),
                row("OscaR - Parallel with EPS", 89, None, 38, 53),
            ],
        },
        Track {
            name: "Mini-solver CSP",
            mode: Mode::Csp,
            rank_by: RankBy::Solved,
            n_instances: 176,
            vbs: 113,
            vbs_pct_instances: 64,
            rows: vec![
                row("NACRE", 86, None, 49, 76),
                row("miniBTD_12", 79, None, 45, 70),
                row("miniBTD", 75, None, 43, 66),
                row("cosoco", 72, None, 41, 64),
                row("minimacht", 69, None, 39, 61),
                row("GG's minicp", 56, None, 32, 50),
                row("Solver of Schul & Smal", 54, None, 31, 48),
                row("MiniCPFever", 54, None, 31, 48),
                row("slowpoke", 38, None, 22, 34),
                row("chgh", 31, None, 18, 27),
                row("The dodo solver", 25, None, 14, 22),
            ],
        },
        Track {
            name: "Mini-solver COP",
            mode: Mode::Cop,
            rank_by: RankBy::Solved,
            n_instances: 188,
            vbs: 48,
            vbs_pct_instances: 26,
            rows: vec![
                row("cosoco", 46, Some(122), 24, 96),
                row("Solver of Schul & Smal", 35, Some(44), 19, 73),
                row("GG's minicp", 3, Some(22), 2, 6),
                row("MiniCPFever", 0, Some(50), 0, 0),
                row("chgh", 0, Some(23), 0, 0),
                row("The dodo solver", 0, Some(18), 0, 0),
                row("slowpoke", 0, Some(12), 0, 0),
            ],
        },
    ]
}

/// One record per (solver, instance). Counted sets are laid out cyclically
/// over the first `vbs` instances, so their union is exactly `vbs` (the
/// counts of every table sum past it). Extra best-known results of the COP
/// tables fall on instances nobody proved.
pub fn records(track: &Track) -> Vec<RunRecord> {
    let mut out = Vec::new();
    let mut start = 0;
    for (k, r) in track.rows.iter().enumerate() {
        let counted: Vec<usize> = (0..r.count).map(|j| (start + j) % track.vbs).collect();
        start = (start + r.count) % track.vbs;
        let extra = r.best.map_or(0, |b| b - r.count);
        for i in 0..track.n_instances {
            let hit = counted.contains(&i);
            let in_extra = i >= track.vbs && i - track.vbs < extra;
            let (status, bound) = match (track.mode, track.rank_by, hit, in_extra) {
                (Mode::Csp, _, true, _) => (if i % 3 == 0 { RunStatus::Unsat } else { RunStatus::Sat }, None),
                (Mode::Cop, RankBy::Solved, true, _) => (RunStatus::Optimum, Some(0)),
                (Mode::Cop, RankBy::BestKnown, true, _) => (RunStatus::Sat, Some(0)),
                (Mode::Cop, _, false, true) => (RunStatus::Sat, Some(0)),
                (Mode::Cop, _, false, false) if i < track.vbs && i % 2 == 0 => (RunStatus::Sat, Some(1 + k as i64 + 100)),
                _ => (RunStatus::Unknown, None),
            };
            out.push(RunRecord {
                instance: format!("i{i:03}"),
                solver: r.solver.to_string(),
                status,
                bound,
                elapsed: 1.0 + k as f64,
            });
        }
    }
    out
}

/// Constraint kinds per problem, from the table of selected problems.
pub fn selected_problems() -> Vec<(xcsp_mini::generators::ProblemId, Vec<xcsp_mini::model::ConstraintKind>)> {
    use xcsp_mini::generators::ProblemId::*;
    use xcsp_mini::model::ConstraintKind::*;
    vec![
        (Auction, vec![Count, Sum]),
        (Bacp, vec![Intension, Extension, Count, Sum]),
        (Bibd, vec![Sum, LexMatrix]),
        (CarSequencing, vec![Extension, Sum, Cardinality]),
        (ColouredQueens, vec![AllDifferent, AllDifferentMatrix]),
        (Dubois, vec![Extension]),
        (GolombRuler, vec![Intension, AllDifferent]),
        (GracefulGraph, vec![Intension, AllDifferent]),
        (GraphColoring, vec![Intension]),
        (Knapsack, vec![Sum]),
        (Langford, vec![Intension, Element]),
        (LowAutocorrelation, vec![Intension, Sum]),
        (MagicHexagon, vec![Intension, Sum, AllDifferent]),
        (MagicSquare, vec![AllDifferent, Sum, Instantiation]),
        (Mario, vec![Intension, Extension, Sum, Circuit]),
        (MisteryShopper, vec![Intension, Extension, AllDifferent, LexMatrix, Channel]),
        (PeacableArmies, vec![Intension, Sum, Count]),
        (Qap, vec![Extension, AllDifferent]),
        (Rcpsp, vec![Intension, Cumulative]),
        (SocialGolfers, vec![Intension, Instantiation, Cardinality, LexMatrix]),
        (SportsScheduling, vec![Intension, Extension, Instantiation, AllDifferent, Count, Cardinality]),
        (StillLife, vec![Intension, Extension, Instantiation, Sum]),
        (StripPacking, vec![Intension, Extension, NoOverlap]),
        (SubgraphIsomorphism, vec![Extension, AllDifferent]),
        (SumColoring, vec![Intension]),
        (Tsp, vec![Extension, AllDifferent]),
    ]
}

/// Problems whose generated kinds (united over the sample variants)
/// differ from their table row, with both sets.
pub fn conformance_mismatches() -> Vec<String> {
    use std::collections::BTreeSet;
    use xcsp_mini::generators::gen_catalog;
    let samples = super::samples();
    let mut out = Vec::new();
    for (problem, want) in selected_problems() {
        let mut got = BTreeSet::new();
        let mut any = false;
        for (_, data) in samples.iter().filter(|(_, d)| d.problem == problem) {
            any = true;
            match gen_catalog(data) {
                Ok(i) => got.extend(i.constraints.iter().flat_map(|c| c.effective_kinds())),
                Err(e) => out.push(format!("{problem}: {e}")),
            }
        }
        let want: BTreeSet<_> = want.into_iter().collect();
        if !any {
            out.push(format!("{problem}: no sample"));
        } else if got != want {
            out.push(format!("{problem}: generated {got:?}, table {want:?}"));
        }
    }
    out
}
