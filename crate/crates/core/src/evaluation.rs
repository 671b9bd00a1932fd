//! Localization quality: Rank, EXAM, Hit@X and PBL.
//!
//! A buggy statement's rank is its worst position among ties: the number of
//! statements scoring strictly higher plus the number scoring equal,
//! itself included. Statements missing from the list are unranked.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StatementId;
use crate::ranking::RankedList;

pub const DEFAULT_HIT_BUDGETS: [usize; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    buggy: BTreeSet<StatementId>,
}

impl GroundTruth {
    pub fn new(buggy: BTreeSet<StatementId>) -> Result<Self> {
        if buggy.is_empty() {
            return Err(Error::validation(
                "buggy",
                "ground truth must name at least one statement",
            ));
        }
        Ok(Self { buggy })
    }

    pub fn buggy(&self) -> &BTreeSet<StatementId> {
        &self.buggy
    }
}

/// Worst-among-ties rank of `s`, or `None` when `s` is not listed.
pub fn rank_of_statement(list: &RankedList, s: &str) -> Option<usize> {
    let score = list.get(s)?.score;
    Some(list.entries().iter().filter(|e| e.score >= score).count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ranks {
    /// `None` for unranked statements.
    pub per_bug: BTreeMap<StatementId, Option<usize>>,
    pub best_rank: Option<usize>,
}

pub fn rank_of(list: &RankedList, truth: &GroundTruth) -> Ranks {
    let per_bug: BTreeMap<_, _> = truth
        .buggy
        .iter()
        .map(|b| (b.clone(), rank_of_statement(list, b.as_str())))
        .collect();
    let best_rank = per_bug.values().flatten().min().copied();
    Ranks { per_bug, best_rank }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exam {
    pub percent: f64,
    pub unranked: bool,
}

/// Best rank over list length, as a percentage. 100 and flagged when no
/// buggy statement is listed.
pub fn exam(list: &RankedList, truth: &GroundTruth) -> Exam {
    match rank_of(list, truth).best_rank {
        Some(r) => Exam {
            percent: r as f64 / list.len() as f64 * 100.0,
            unranked: false,
        },
        None => Exam {
            percent: 100.0,
            unranked: true,
        },
    }
}

pub fn hit_at(list: &RankedList, truth: &GroundTruth, x: usize) -> Result<bool> {
    if x < 1 {
        return Err(Error::InvalidHitBudget);
    }
    Ok(rank_of(list, truth).best_rank.is_some_and(|r| r <= x))
}

/// Share of buggy statements ranked within the first `examined`.
pub fn pbl(list: &RankedList, truth: &GroundTruth, examined: usize) -> f64 {
    let ranks = rank_of(list, truth);
    let found = ranks
        .per_bug
        .values()
        .flatten()
        .filter(|&&r| r <= examined)
        .count();
    found as f64 / truth.buggy.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub list_length: usize,
    pub ranks: BTreeMap<StatementId, Option<usize>>,
    pub best_rank: Option<usize>,
    pub exam: f64,
    pub unranked: bool,
    pub hit_at: BTreeMap<usize, bool>,
    /// Points where the PBL step function changes, plus both ends.
    pub pbl_curve: Vec<(usize, f64)>,
}

pub fn evaluate(list: &RankedList, truth: &GroundTruth) -> EvalReport {
    let ranks = rank_of(list, truth);
    let ex = exam(list, truth);
    let hit_at = DEFAULT_HIT_BUDGETS
        .iter()
        .map(|&x| (x, ranks.best_rank.is_some_and(|r| r <= x)))
        .collect();
    let mut points: BTreeSet<usize> = ranks.per_bug.values().flatten().copied().collect();
    points.insert(0);
    points.insert(list.len());
    let pbl_curve = points.into_iter().map(|x| (x, pbl(list, truth, x))).collect();
    EvalReport {
        list_length: list.len(),
        ranks: ranks.per_bug,
        best_rank: ranks.best_rank,
        exam: ex.percent,
        unranked: ex.unranked,
        hit_at,
        pbl_curve,
    }
}

impl EvalReport {
    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let show = |r: Option<usize>| r.map_or_else(|| "unranked".to_owned(), |r| r.to_string());
        let _ = writeln!(out, "{:<12} {:>10}", "statement", "rank");
        for (s, r) in &self.ranks {
            let _ = writeln!(out, "{:<12} {:>10}", s.as_str(), show(*r));
        }
        let _ = writeln!(out, "{:<12} {:>10}", "best", show(self.best_rank));
        let _ = writeln!(
            out,
            "{:<12} {:>9.2}%{}",
            "EXAM",
            self.exam,
            if self.unranked { " (unranked)" } else { "" }
        );
        for (x, hit) in &self.hit_at {
            let _ = writeln!(out, "{:<12} {:>10}", format!("Hit@{x}"), hit);
        }
        let _ = writeln!(out, "{:<12} {:>10}", "list length", self.list_length);
        out
    }
}

/// Averages over a set of reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub mean_best_rank: f64,
    pub mean_exam: f64,
    pub hit_rate: BTreeMap<usize, f64>,
}

/// `inclusive` counts unranked cases with rank `length + 1` and EXAM 100;
/// `exclusive` drops them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summaries {
    pub inclusive: Summary,
    pub exclusive: Summary,
    pub unranked_cases: usize,
}

/// Best rank, EXAM and Hit@X of one report.
type Row<'a> = (f64, f64, &'a BTreeMap<usize, bool>);

pub fn summarize(reports: &[EvalReport]) -> Summaries {
    let build = |rows: Vec<Row>| {
        let n = rows.len();
        let mean = |f: &dyn Fn(&Row) -> f64| {
            if n == 0 {
                0.0
            } else {
                rows.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let hit_rate = DEFAULT_HIT_BUDGETS
            .iter()
            .map(|&x| (x, mean(&|r| if r.2.get(&x) == Some(&true) { 1.0 } else { 0.0 })))
            .collect();
        Summary {
            cases: n,
            mean_best_rank: mean(&|r| r.0),
            mean_exam: mean(&|r| r.1),
            hit_rate,
        }
    };
    let inclusive = reports
        .iter()
        .map(|r| {
            let rank = r.best_rank.unwrap_or(r.list_length + 1) as f64;
            (rank, r.exam, &r.hit_at)
        })
        .collect();
    let exclusive = reports
        .iter()
        .filter_map(|r| r.best_rank.map(|b| (b as f64, r.exam, &r.hit_at)))
        .collect();
    Summaries {
        inclusive: build(inclusive),
        exclusive: build(exclusive),
        unranked_cases: reports.iter().filter(|r| r.unranked).count(),
    }
}
