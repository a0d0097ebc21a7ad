//! The metric-extending game: a referee, strategy traits, and the built-in
//! strategies for both players.
//!
//! In each inning Player I names a doubleton and offers a [`ChoiceSet`];
//! Player II answers with a value from it. Player I wins when the base metric
//! together with all answers is a full metric.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::choice::{ChoiceSet, OpenInterval};
use crate::error::{Error, Result};
use crate::extension::AdmissibleInterval;
use crate::metric::{
    tables_for, validate, DistanceTables, Doubleton, Grade, PartialMetric, ValidationReport,
    VertexId,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Move {
    pub pair: Doubleton,
    pub offered: ChoiceSet,
    pub answer: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    PlayerIWins,
    PlayerIiWins,
}

/// Why the referee ruled as it did.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The final relation is a full metric.
    FullMetric { report: ValidationReport },
    /// No value was ever assigned to this pair.
    MissingPair { pair: Doubleton },
    /// The pair received two different values.
    NonFunctional {
        pair: Doubleton,
        values: [Rational; 2],
    },
    /// `D(x,z) > D(x,y) + D(y,z)`.
    PolygonalInequality {
        pair: Doubleton,
        weight: Rational,
        path: [VertexId; 3],
        path_length: Rational,
    },
    /// Player I could not produce a legal offer.
    IllegalMoveI { inning: usize, reason: String },
    /// Player II answered outside the offered set.
    IllegalMoveIi {
        inning: usize,
        pair: Doubleton,
        answer: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTranscript {
    pub base: PartialMetric,
    pub lambda: usize,
    pub moves: Vec<Move>,
    pub verdict: Verdict,
    pub witness: Witness,
    /// Innings in which Player I named a pair that already had a value.
    pub flagged: Vec<usize>,
}

impl GameTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    /// The completed relation, when it is single-valued.
    pub fn final_relation(&self) -> Option<PartialMetric> {
        relation(&self.base, &self.moves).ok()
    }
}

/// What a strategy sees before its move.
#[derive(Debug, Clone, Copy)]
pub struct GameState<'a> {
    pub base: &'a PartialMetric,
    pub lambda: usize,
    /// Zero-based index of the current inning.
    pub inning: usize,
    pub moves: &'a [Move],
}

pub trait PlayerOne {
    /// The next doubleton and the set of values Player II may choose from.
    fn propose(
        &mut self,
        state: &GameState<'_>,
    ) -> std::result::Result<(Doubleton, ChoiceSet), String>;
}

pub trait PlayerTwo {
    fn answer(&mut self, state: &GameState<'_>, pair: &Doubleton, offered: &ChoiceSet) -> Rational;
}

/// Plays `lambda` innings on `base` and rules on the result.
pub fn play(
    base: &PartialMetric,
    lambda: usize,
    one: &mut dyn PlayerOne,
    two: &mut dyn PlayerTwo,
) -> Result<GameTranscript> {
    tables_for(base, Grade::Metric)?;
    let mut moves: Vec<Move> = Vec::with_capacity(lambda);
    let mut flagged = Vec::new();
    let mut assigned: BTreeSet<Doubleton> = base.edges().map(|(p, _)| p.clone()).collect();
    let finish = |moves: Vec<Move>, flagged, verdict, witness| GameTranscript {
        base: base.clone(),
        lambda,
        moves,
        verdict,
        witness,
        flagged,
    };

    for inning in 0..lambda {
        let state = GameState {
            base,
            lambda,
            inning,
            moves: &moves,
        };
        let (pair, offered) = match one.propose(&state) {
            Ok(offer) => offer,
            Err(reason) => {
                let w = Witness::IllegalMoveI { inning, reason };
                return Ok(finish(moves, flagged, Verdict::PlayerIiWins, w));
            }
        };
        if !(base.contains_vertex(pair.a()) && base.contains_vertex(pair.b())) {
            let w = Witness::IllegalMoveI {
                inning,
                reason: format!("pair {pair} is not a doubleton of the vertex set"),
            };
            return Ok(finish(moves, flagged, Verdict::PlayerIiWins, w));
        }
        let answer = two.answer(&state, &pair, &offered);
        if !offered.contains(&answer) {
            let w = Witness::IllegalMoveIi {
                inning,
                pair,
                answer,
            };
            return Ok(finish(moves, flagged, Verdict::PlayerIWins, w));
        }
        if !assigned.insert(pair.clone()) {
            flagged.push(inning);
        }
        moves.push(Move {
            pair,
            offered,
            answer,
        });
    }

    let (verdict, witness) = judge(base, &moves);
    Ok(finish(moves, flagged, verdict, witness))
}

/// The base plus every answer, or the first pair answered with two values.
type Conflict = Box<(Doubleton, [Rational; 2])>;

fn relation(base: &PartialMetric, moves: &[Move]) -> std::result::Result<PartialMetric, Conflict> {
    let mut values: BTreeMap<Doubleton, Rational> =
        base.edges().map(|(p, w)| (p.clone(), w.clone())).collect();
    for m in moves {
        match values.get(&m.pair) {
            Some(prev) if prev != &m.answer => {
                return Err(Box::new((m.pair.clone(), [prev.clone(), m.answer.clone()])))
            }
            _ => {
                values.insert(m.pair.clone(), m.answer.clone());
            }
        }
    }
    Ok(PartialMetric::new(base.vertices().iter().cloned(), values)
        .expect("moves only name base vertices"))
}

/// Rules on `base` together with the answers in `moves`, independently of
/// the strategies that produced them.
pub fn judge(base: &PartialMetric, moves: &[Move]) -> (Verdict, Witness) {
    let d = match relation(base, moves) {
        Ok(d) => d,
        Err(conflict) => {
            let (pair, values) = *conflict;
            return (
                Verdict::PlayerIiWins,
                Witness::NonFunctional { pair, values },
            );
        }
    };
    if let Some(pair) = d.missing_pairs().into_iter().next() {
        return (Verdict::PlayerIiWins, Witness::MissingPair { pair });
    }
    if let Some(w) = triangle_violation(&d) {
        return (Verdict::PlayerIiWins, w);
    }
    let report = validate(&d);
    debug_assert!(report.full && report.graph_metric);
    (Verdict::PlayerIWins, Witness::FullMetric { report })
}

fn triangle_violation(d: &PartialMetric) -> Option<Witness> {
    let vs = d.vertices();
    let n = vs.len();
    let w = |i: usize, j: usize| -> Rational {
        if i == j {
            Rational::zero()
        } else {
            d.weight(&Doubleton::new(vs[i].clone(), vs[j].clone()).unwrap())
                .cloned()
                .expect("relation is full")
        }
    };
    let table: Vec<Rational> = (0..n * n).map(|k| w(k / n, k % n)).collect();
    for x in 0..n {
        for z in (x + 1)..n {
            let direct = &table[x * n + z];
            for y in (0..n).filter(|&y| y != x && y != z) {
                let detour = &table[x * n + y] + &table[y * n + z];
                if direct > &detour {
                    return Some(Witness::PolygonalInequality {
                        pair: Doubleton::new(vs[x].clone(), vs[z].clone()).unwrap(),
                        weight: direct.clone(),
                        path: [vs[x].clone(), vs[y].clone(), vs[z].clone()],
                        path_length: detour,
                    });
                }
            }
        }
    }
    None
}

/// Once every missing pair has been named, keep the game going by repeating
/// an assigned pair with its own value as the only option.
fn repeat_offer(state: &GameState<'_>) -> std::result::Result<(Doubleton, ChoiceSet), String> {
    let (pair, w) = state
        .base
        .edges()
        .find(|(_, w)| w.is_positive())
        .map(|(p, w)| (p.clone(), w.clone()))
        .or_else(|| {
            state
                .moves
                .first()
                .map(|m| (m.pair.clone(), m.answer.clone()))
        })
        .ok_or_else(|| "no pair has a value to repeat".to_string())?;
    Ok((pair, ChoiceSet::point(w).map_err(|e| e.to_string())?))
}

/// Names the missing pairs in lexicographic order and offers the open
/// interval `(check/3 + 2*hat/3, hat)` of the metric built so far.
#[derive(Debug, Clone)]
pub struct WinningPlayerOne {
    tables: DistanceTables,
    pending: Vec<(usize, usize)>,
    absorbed: usize,
}

impl WinningPlayerOne {
    pub fn new(base: &PartialMetric) -> Result<Self> {
        let tables = tables_for(base, Grade::Metric)?;
        let report = tables.floppy_report();
        if let (false, Some(w)) = (report.floppy, report.worst_pair) {
            return Err(Error::NotFloppy {
                pair: w.pair,
                gap: w.gap,
            });
        }
        let mut pending: Vec<(usize, usize)> = tables.non_edges().collect();
        pending.reverse();
        Ok(WinningPlayerOne {
            tables,
            pending,
            absorbed: 0,
        })
    }

    fn absorb(&mut self, moves: &[Move]) -> std::result::Result<(), String> {
        for m in &moves[self.absorbed..] {
            let (i, j) = self.tables.pair_ix(&m.pair).map_err(|e| e.to_string())?;
            if !self.tables.is_edge_ix(i, j) {
                self.tables.insert_edge_ix(i, j, m.answer.clone());
            }
        }
        self.absorbed = moves.len();
        Ok(())
    }
}

impl PlayerOne for WinningPlayerOne {
    fn propose(
        &mut self,
        state: &GameState<'_>,
    ) -> std::result::Result<(Doubleton, ChoiceSet), String> {
        self.absorb(state.moves)?;
        while let Some(&(i, j)) = self.pending.last() {
            if self.tables.is_edge_ix(i, j) {
                self.pending.pop();
                continue;
            }
            let iv = AdmissibleInterval::from_bounds(
                &self.tables.check_ix(i, j),
                self.tables.hat_ix(i, j),
            );
            let offered = ChoiceSet::interval(iv.lo, iv.hi).map_err(|e| e.to_string())?;
            return Ok((self.tables.doubleton(i, j), offered));
        }
        repeat_offer(state)
    }
}

/// Names the missing pairs in lexicographic order and offers a fixed choice
/// set for each.
#[derive(Debug, Clone)]
pub struct FamilyPlayerOne {
    offers: Vec<(Doubleton, ChoiceSet)>,
}

impl FamilyPlayerOne {
    pub fn new(base: &PartialMetric, family: &BTreeMap<Doubleton, ChoiceSet>) -> Result<Self> {
        let offers = base
            .missing_pairs()
            .into_iter()
            .map(|p| match family.get(&p) {
                Some(f) => Ok((p, f.clone())),
                None => Err(Error::MissingChoiceSet(p)),
            })
            .collect::<Result<_>>()?;
        Ok(FamilyPlayerOne { offers })
    }
}

impl PlayerOne for FamilyPlayerOne {
    fn propose(
        &mut self,
        state: &GameState<'_>,
    ) -> std::result::Result<(Doubleton, ChoiceSet), String> {
        match self.offers.get(state.inning) {
            Some(offer) => Ok(offer.clone()),
            None => repeat_offer(state),
        }
    }
}

/// How [`RandomPlayerTwo`] samples inside an open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// `lo + (hi-lo)/1000` or `hi - (hi-lo)/1000`.
    NearEndpoints,
    Midpoint,
    /// `lo + k(hi-lo)/64` for a uniform `k` in `1..=63`.
    Grid,
    /// One of the above, chosen uniformly per answer.
    Mixed,
}

/// Answers with a seeded random legal value.
#[derive(Debug, Clone)]
pub struct RandomPlayerTwo {
    rng: ChaCha8Rng,
    sampler: Sampler,
}

impl RandomPlayerTwo {
    pub fn new(seed: u64, sampler: Sampler) -> Self {
        RandomPlayerTwo {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sampler,
        }
    }

    fn sample_interval(&mut self, i: &OpenInterval) -> Rational {
        let lo = i.lo().clone();
        // unbounded intervals are sampled on (lo, 2lo + 1)
        let hi = i
            .hi()
            .cloned()
            .unwrap_or_else(|| &(&lo + &lo) + &Rational::one());
        let width = &hi - &lo;
        let sampler = match self.sampler {
            Sampler::Mixed => [Sampler::NearEndpoints, Sampler::Midpoint, Sampler::Grid]
                [self.rng.random_range(0..3)],
            s => s,
        };
        match sampler {
            Sampler::NearEndpoints => {
                let eps = &width / &Rational::from_integer(1000);
                if self.rng.random_bool(0.5) {
                    &lo + &eps
                } else {
                    &hi - &eps
                }
            }
            Sampler::Midpoint => lo.midpoint(&hi),
            _ => {
                let k = self.rng.random_range(1..64i64);
                &lo + &(&width * &Rational::new(k, 64))
            }
        }
    }
}

impl PlayerTwo for RandomPlayerTwo {
    fn answer(&mut self, _: &GameState<'_>, _: &Doubleton, offered: &ChoiceSet) -> Rational {
        let np = offered.points().len();
        let k = self.rng.random_range(0..np + offered.intervals().len());
        if k < np {
            offered.points().iter().nth(k).cloned().unwrap()
        } else {
            self.sample_interval(&offered.intervals()[k - np])
        }
    }
}

/// Always answers the canonical least element of the offered set.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeastPlayerTwo;

impl PlayerTwo for LeastPlayerTwo {
    fn answer(&mut self, _: &GameState<'_>, _: &Doubleton, offered: &ChoiceSet) -> Rational {
        offered.canonical_answer()
    }
}

/// Answers canonically until the offered set contains a value farther from
/// an earlier answer `r'` (for pair `p'`) than `ddot(pair, p')`, then plays
/// such a value: the completed relation can then not be a metric.
#[derive(Debug, Clone)]
pub struct AdversaryPlayerTwo {
    tables: DistanceTables,
    watched: BTreeSet<Doubleton>,
    fired: Option<usize>,
}

impl AdversaryPlayerTwo {
    /// Watches the pairs that carry a choice set in `family`.
    pub fn new(base: &PartialMetric, family: &BTreeMap<Doubleton, ChoiceSet>) -> Result<Self> {
        Ok(AdversaryPlayerTwo {
            tables: tables_for(base, Grade::Metric)?,
            watched: family.keys().cloned().collect(),
            fired: None,
        })
    }

    /// The inning in which the sabotage was played, if any.
    pub fn fired(&self) -> Option<usize> {
        self.fired
    }
}

impl PlayerTwo for AdversaryPlayerTwo {
    fn answer(&mut self, state: &GameState<'_>, pair: &Doubleton, offered: &ChoiceSet) -> Rational {
        if self.fired.is_none() && self.watched.contains(pair) {
            for prior in state
                .moves
                .iter()
                .filter(|m| &m.pair != pair && self.watched.contains(&m.pair))
            {
                let Ok(dd) = self.tables.ddot(pair, &prior.pair) else {
                    continue;
                };
                if let Some(r) = offered.value_far_from(&prior.answer, &dd) {
                    self.fired = Some(state.inning);
                    return r;
                }
            }
        }
        offered.canonical_answer()
    }
}

/// Two missing pairs `p, q` and values with `|r_p - r_q| > ddot(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SabotagePlan {
    pub p: Doubleton,
    pub q: Doubleton,
    pub r_q: Rational,
    pub r_p: Rational,
    pub ddot: Rational,
}

/// Looks for missing pairs `p != q` with `3 ddot(p,q) < diam F_p` and, for
/// the first such pair in lexicographic order, values that no metric
/// extension can take.
pub fn sabotage_witness(
    base: &PartialMetric,
    family: &BTreeMap<Doubleton, ChoiceSet>,
) -> Result<Option<SabotagePlan>> {
    let t = tables_for(base, Grade::Metric)?;
    let missing = base.missing_pairs();
    let sets = missing
        .iter()
        .map(|p| {
            family
                .get(p)
                .ok_or_else(|| Error::MissingChoiceSet(p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let three = Rational::from_integer(3);
    for (pi, p) in missing.iter().enumerate() {
        let diam = sets[pi].diameter();
        for (qi, q) in missing.iter().enumerate() {
            if pi == qi {
                continue;
            }
            let dd = t.ddot(p, q)?;
            if !diam.exceeds(&(&three * &dd)) {
                continue;
            }
            let r_q = sets[qi].canonical_answer();
            let r_p = sets[pi].value_far_from(&r_q, &dd).ok_or_else(|| {
                Error::Postcondition(format!(
                    "no value of the choice set for {p} is far from {r_q}"
                ))
            })?;
            return Ok(Some(SabotagePlan {
                p: p.clone(),
                q: q.clone(),
                r_q,
                r_p,
                ddot: dd,
            }));
        }
    }
    Ok(None)
}

/// Plays the values of a [`SabotagePlan`] on its two pairs and canonical
/// answers elsewhere.
#[derive(Debug, Clone)]
pub struct PlanPlayerTwo {
    plan: SabotagePlan,
}

impl PlanPlayerTwo {
    pub fn new(plan: SabotagePlan) -> Self {
        PlanPlayerTwo { plan }
    }
}

impl PlayerTwo for PlanPlayerTwo {
    fn answer(&mut self, _: &GameState<'_>, pair: &Doubleton, offered: &ChoiceSet) -> Rational {
        let planned = if pair == &self.plan.p {
            Some(&self.plan.r_p)
        } else if pair == &self.plan.q {
            Some(&self.plan.r_q)
        } else {
            None
        };
        match planned {
            Some(r) if offered.contains(r) => r.clone(),
            _ => offered.canonical_answer(),
        }
    }
}

/// Replays a sabotage plan against a Player I who offers `family` on every
/// missing pair.
pub fn play_sabotage(
    base: &PartialMetric,
    family: &BTreeMap<Doubleton, ChoiceSet>,
    plan: SabotagePlan,
) -> Result<GameTranscript> {
    let mut one = FamilyPlayerOne::new(base, family)?;
    let mut two = PlanPlayerTwo::new(plan);
    play(base, base.missing_pairs().len(), &mut one, &mut two)
}
