//! One-step and full extensions of floppy graph metrics.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::choice::{ChoiceSet, PickFailure};
use crate::error::{Bound, Error, MissedInterval, RangeViolation, Result};
use crate::metric::{tables_for, validate, DistanceTables, Doubleton, Grade, PartialMetric};
use crate::rational::Rational;

/// The range `[check/3 + 2*hat/3, hat)` of values that keep a floppy metric
/// floppy when assigned to a missing pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub closed_lo: bool,
    pub open_hi: bool,
}

impl AdmissibleInterval {
    pub fn from_bounds(check: &Rational, hat: &Rational) -> Self {
        let third = Rational::new(1, 3);
        let two_thirds = Rational::new(2, 3);
        AdmissibleInterval {
            lo: &(&third * check) + &(&two_thirds * hat),
            hi: hat.clone(),
            closed_lo: true,
            open_hi: true,
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        r >= &self.lo && r < &self.hi
    }

    pub fn is_nonempty(&self) -> bool {
        self.lo < self.hi
    }

    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }
}

/// Which range `one_step_extend` accepts for `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `lo <= r < hat`; the result is again a floppy graph metric.
    Theorem,
    /// `check <= r <= hat`; the result is a graph pseudometric.
    Proposition,
}

fn interval_ix(t: &DistanceTables, x: usize, y: usize) -> AdmissibleInterval {
    AdmissibleInterval::from_bounds(&t.check_ix(x, y), t.hat_ix(x, y))
}

fn require_floppy(t: &DistanceTables) -> Result<()> {
    let report = t.floppy_report();
    match report.worst_pair {
        Some(w) if !report.floppy => Err(Error::NotFloppy {
            pair: w.pair,
            gap: w.gap,
        }),
        _ => Ok(()),
    }
}

fn missing_pair_ix(t: &DistanceTables, xy: &Doubleton) -> Result<(usize, usize)> {
    let (x, y) = t.pair_ix(xy)?;
    if t.is_edge_ix(x, y) {
        return Err(Error::AlreadyEdge(xy.clone()));
    }
    Ok((x, y))
}

pub fn admissible_interval(m: &PartialMetric, xy: &Doubleton) -> Result<AdmissibleInterval> {
    let t = tables_for(m, Grade::Metric)?;
    let (x, y) = missing_pair_ix(&t, xy)?;
    require_floppy(&t)?;
    Ok(interval_ix(&t, x, y))
}

fn range_check(
    xy: &Doubleton,
    r: &Rational,
    lo: Rational,
    hi: Rational,
    hi_open: bool,
) -> Result<()> {
    let bound = if r < &lo {
        Bound::Lower
    } else if r > &hi || (hi_open && r == &hi) {
        Bound::Upper
    } else {
        return Ok(());
    };
    Err(Error::ROutOfRange(Box::new(RangeViolation {
        pair: xy.clone(),
        r: r.clone(),
        bound,
        lo,
        hi,
    })))
}

/// `m ∪ {xy ↦ r}` after checking the range required by `mode`.
pub fn one_step_extend(
    m: &PartialMetric,
    xy: &Doubleton,
    r: &Rational,
    mode: Mode,
) -> Result<PartialMetric> {
    match mode {
        Mode::Theorem => {
            let t = tables_for(m, Grade::Metric)?;
            let (x, y) = missing_pair_ix(&t, xy)?;
            require_floppy(&t)?;
            let iv = interval_ix(&t, x, y);
            range_check(xy, r, iv.lo, iv.hi, true)?;
            let out = m.with_edge(xy.clone(), r.clone())?;
            let after = tables_for(&out, Grade::Metric).map_err(|e| {
                Error::Postcondition(format!("extension is not a graph metric: {e}"))
            })?;
            if let Err(e) = require_floppy(&after) {
                return Err(Error::Postcondition(format!(
                    "extension is not floppy: {e}"
                )));
            }
            Ok(out)
        }
        Mode::Proposition => {
            let t = tables_for(m, Grade::Pseudometric)?;
            let (x, y) = missing_pair_ix(&t, xy)?;
            range_check(xy, r, t.check_ix(x, y), t.hat_ix(x, y).clone(), false)?;
            let out = m.with_edge(xy.clone(), r.clone())?;
            if !validate(&out).graph_pseudometric {
                return Err(Error::Postcondition(
                    "extension is not a graph pseudometric".into(),
                ));
            }
            Ok(out)
        }
    }
}

/// Values of one vertex pair before (`d`) and after (`D`) the extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairValues {
    pub u: String,
    pub v: String,
    pub hat_d: Rational,
    pub hat_big_d: Rational,
    pub check_d: Rational,
    pub check_big_d: Rational,
    pub ddot_xy_uv: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatementReport {
    pub statement: u8,
    /// Pairs on which the hypothesis of the statement held.
    pub applicable: usize,
    pub passed: usize,
    pub failures: Vec<PairValues>,
}

impl StatementReport {
    fn new(statement: u8) -> Self {
        StatementReport {
            statement,
            applicable: 0,
            passed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, holds: bool, values: impl FnOnce() -> PairValues) {
        self.applicable += 1;
        if holds {
            self.passed += 1;
        } else if self.failures.len() < 16 {
            self.failures.push(values());
        }
    }

    pub fn ok(&self) -> bool {
        self.applicable == self.passed
    }
}

/// Outcome of checking the five one-step inequalities on every vertex pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub pair: Doubleton,
    pub r: Rational,
    pub graph_pseudometric: bool,
    pub statements: Vec<StatementReport>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.graph_pseudometric && self.statements.iter().all(StatementReport::ok)
    }
}

/// Evaluates, for `D = m ∪ {xy ↦ r}` and every pair `u, v` (including
/// `u = v`):
///
/// 1. `hatD ≤ hat` and `max{check, r − ddot(xy,uv)} ≤ checkD`
/// 2. if `hat ≠ hatD`: `hat − (hat(x,y) − r) ≤ hatD = r + ddot(xy,uv)`
/// 3. if `hat ≠ hatD`: `hatD − check ≥ r − check(x,y)`
/// 4. if `check ≠ checkD ≠ r − ddot(xy,uv)` and `checkD > hat(x,y) − 2r`:
///    `checkD − check ≤ hat(x,y) − r` and `hat − checkD ≥ r − check(x,y)`
/// 5. if `check(x,y)/3 + 2·hat(x,y)/3 ≤ r ≤ hat(x,y)`:
///    `hatD − checkD ≥ min{hat − check, hat(x,y) − r, 2·ddot(xy,uv)}`
///
/// Requires `m` to be a graph pseudometric and `check(x,y) ≤ r ≤ hat(x,y)`.
pub fn verify_pstep(m: &PartialMetric, xy: &Doubleton, r: &Rational) -> Result<PropertyReport> {
    let d = tables_for(m, Grade::Pseudometric)?;
    let (x, y) = missing_pair_ix(&d, xy)?;
    let hat_xy = d.hat_ix(x, y).clone();
    let check_xy = d.check_ix(x, y);
    range_check(xy, r, check_xy.clone(), hat_xy.clone(), false)?;

    let mut big = d.clone();
    big.insert_edge_ix(x, y, r.clone());
    let graph_pseudometric = big.is_graph_pseudometric();

    let two = Rational::from_integer(2);
    let in_theorem_range = AdmissibleInterval::from_bounds(&check_xy, &hat_xy).lo <= *r;
    let mut st: Vec<StatementReport> = (1..=5).map(StatementReport::new).collect();
    let n = d.vertex_count();
    for u in 0..n {
        for v in u..n {
            let hat_d = d.hat_ix(u, v);
            let hat_big = big.hat_ix(u, v);
            let check_d = d.check_ix(u, v);
            let check_big = big.check_ix(u, v);
            let dd = d.ddot_ix(x, y, u, v);
            let r_minus_dd = r - &dd;
            let values = || PairValues {
                u: d.vertex(u).to_string(),
                v: d.vertex(v).to_string(),
                hat_d: hat_d.clone(),
                hat_big_d: hat_big.clone(),
                check_d: check_d.clone(),
                check_big_d: check_big.clone(),
                ddot_xy_uv: dd.clone(),
            };

            let s1 = hat_big <= hat_d && check_d.clone().max(r_minus_dd.clone()) <= check_big;
            st[0].record(s1, values);

            if hat_d != hat_big {
                let s2 = &(hat_d - &(&hat_xy - r)) <= hat_big && *hat_big == r + &dd;
                st[1].record(s2, values);
                let s3 = hat_big - &check_d >= r - &check_xy;
                st[2].record(s3, values);
            }

            if check_d != check_big && check_big != r_minus_dd && check_big > &hat_xy - &(&two * r)
            {
                let s4 =
                    &check_big - &check_d <= &hat_xy - r && hat_d - &check_big >= r - &check_xy;
                st[3].record(s4, values);
            }

            if in_theorem_range {
                let floor = (hat_d - &check_d).min(&hat_xy - r).min(&two * &dd);
                let s5 = hat_big - &check_big >= floor;
                st[4].record(s5, values);
            }
        }
    }
    Ok(PropertyReport {
        pair: xy.clone(),
        r: r.clone(),
        graph_pseudometric,
        statements: st,
    })
}

/// Order in which `full_extend` visits the missing pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    Lexicographic,
    /// Largest current `hat − check` first, ties broken lexicographically.
    MaxGapFirst,
    /// A seeded shuffle of the missing pairs.
    Random(u64),
}

/// How `full_extend` picks a value inside each admissible interval.
#[derive(Debug, Clone, PartialEq)]
pub enum ChoicePolicy {
    Midpoint,
    /// Pick from a per-pair choice set; chosen values are pairwise distinct.
    Sets(BTreeMap<Doubleton, ChoiceSet>),
}

/// How distances are refreshed after each insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Recompute {
    /// Relax every distance through the new edge.
    #[default]
    Incremental,
    /// Rebuild all shortest paths from scratch.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionStep {
    pub pair: Doubleton,
    pub interval: AdmissibleInterval,
    pub chosen: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionTrace {
    pub steps: Vec<ExtensionStep>,
    pub result: PartialMetric,
}

impl ExtensionTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces always serialize")
    }
}

pub fn full_extend(
    m: &PartialMetric,
    order: OrderPolicy,
    choice: &ChoicePolicy,
) -> Result<ExtensionTrace> {
    full_extend_with(m, order, choice, Recompute::Incremental)
}

/// Extends a floppy graph metric to a full metric one pair at a time, each
/// value taken from the current admissible interval.
pub fn full_extend_with(
    m: &PartialMetric,
    order: OrderPolicy,
    choice: &ChoicePolicy,
    recompute: Recompute,
) -> Result<ExtensionTrace> {
    let mut t = tables_for(m, Grade::Metric)?;
    require_floppy(&t)?;
    let mut remaining: Vec<(usize, usize)> = t.non_edges().collect();
    if let OrderPolicy::Random(seed) = order {
        remaining.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    remaining.reverse();
    let mut used = BTreeSet::new();
    let mut steps = Vec::with_capacity(remaining.len());

    while !remaining.is_empty() {
        let slot = match order {
            OrderPolicy::MaxGapFirst => {
                // remaining is reversed, so scan from the back to keep
                // lexicographic tie-breaking
                let mut best = remaining.len() - 1;
                let mut best_gap = t.gap_ix(remaining[best].0, remaining[best].1);
                for k in (0..best).rev() {
                    let gap = t.gap_ix(remaining[k].0, remaining[k].1);
                    if gap > best_gap {
                        best = k;
                        best_gap = gap;
                    }
                }
                best
            }
            _ => remaining.len() - 1,
        };
        let (i, j) = remaining.remove(slot);
        let pair = t.doubleton(i, j);
        let interval = interval_ix(&t, i, j);
        if !interval.is_nonempty() {
            return Err(Error::Postcondition(format!(
                "admissible interval for {pair} is empty"
            )));
        }
        let chosen = match choice {
            ChoicePolicy::Midpoint => interval.midpoint(),
            ChoicePolicy::Sets(sets) => {
                let set = sets
                    .get(&pair)
                    .ok_or_else(|| Error::MissingChoiceSet(pair.clone()))?;
                match set.pick_within(&interval.lo, &interval.hi, &used) {
                    Ok(r) => r,
                    Err(PickFailure::Disjoint) => {
                        return Err(Error::ChoiceSetMissesInterval(Box::new(MissedInterval {
                            pair,
                            lo: interval.lo,
                            hi: interval.hi,
                        })))
                    }
                    Err(PickFailure::Exhausted) => return Err(Error::ChoiceExhausted(pair)),
                }
            }
        };
        used.insert(chosen.clone());
        match recompute {
            Recompute::Incremental => t.insert_edge_ix(i, j, chosen.clone()),
            Recompute::Exhaustive => {
                t = DistanceTables::new(&t.source().with_edge(pair.clone(), chosen.clone())?)?
            }
        }
        steps.push(ExtensionStep {
            pair,
            interval,
            chosen,
        });
    }

    let result = t.source().clone();
    let report = validate(&result);
    if !(report.full && report.graph_metric) {
        return Err(Error::Postcondition(format!(
            "extension result is not a full metric: {report:?}"
        )));
    }
    Ok(ExtensionTrace { steps, result })
}
