//! Gluing a family of graph pseudometrics ("pieces") onto a base.
//!
//! Every piece must meet the base, agree with it on the shared vertices
//! ("gateways"), and meet any other piece only inside the base. The union
//! is then a graph pseudometric whose distances route through gateways.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{
    tables_for, DistanceTables, Doubleton, Grade, PartialMetric, VertexId, WorstPair,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Patchwork {
    pub base: PartialMetric,
    #[serde(default)]
    pub pieces: Vec<PartialMetric>,
}

impl Patchwork {
    pub fn new(base: PartialMetric, pieces: Vec<PartialMetric>) -> Self {
        Patchwork { base, pieces }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patchworks always serialize")
    }

    /// `V_f ∩ V_p` for piece `i`, sorted.
    pub fn gateways(&self, i: usize) -> Vec<VertexId> {
        self.pieces[i]
            .vertices()
            .iter()
            .filter(|v| self.base.contains_vertex(v))
            .cloned()
            .collect()
    }
}

/// One violated gluing condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum PatchworkFailure {
    BaseNotGraphPseudometric {
        detail: String,
    },
    PieceNotGraphPseudometric {
        piece: usize,
        detail: String,
    },
    /// The piece shares no vertex with the base.
    NoGateway {
        piece: usize,
    },
    /// Piece and base disagree on the distance between two gateways.
    GatewayMismatch {
        piece: usize,
        pair: Doubleton,
        piece_hat: Rational,
        base_hat: Rational,
    },
    /// Two pieces share a vertex outside the base.
    SharedOutsideBase {
        pieces: [usize; 2],
        vertex: VertexId,
    },
}

impl std::fmt::Display for PatchworkFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BaseNotGraphPseudometric { detail } => write!(f, "base: {detail}"),
            Self::PieceNotGraphPseudometric { piece, detail } => {
                write!(f, "piece {piece}: {detail}")
            }
            Self::NoGateway { piece } => write!(f, "piece {piece} shares no vertex with the base"),
            Self::GatewayMismatch {
                piece,
                pair,
                piece_hat,
                base_hat,
            } => write!(
                f,
                "piece {piece} has distance {piece_hat} on {pair}, the base has {base_hat}"
            ),
            Self::SharedOutsideBase { pieces, vertex } => write!(
                f,
                "pieces {} and {} share vertex {vertex} outside the base",
                pieces[0], pieces[1]
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatchworkReport {
    pub valid: bool,
    /// Not needed for gluing, but required by [`floppy_certificate`].
    pub base_full: bool,
    pub gateways: Vec<Vec<VertexId>>,
    pub failures: Vec<PatchworkFailure>,
}

/// Checks the gluing conditions and returns the distance tables of the base
/// and of each piece that is a graph pseudometric.
fn inspect(
    pw: &Patchwork,
) -> (
    PatchworkReport,
    Option<DistanceTables>,
    Vec<Option<DistanceTables>>,
) {
    let mut failures = Vec::new();
    let base = match tables_for(&pw.base, Grade::Pseudometric) {
        Ok(t) => Some(t),
        Err(e) => {
            failures.push(PatchworkFailure::BaseNotGraphPseudometric {
                detail: e.to_string(),
            });
            None
        }
    };
    let gateways: Vec<Vec<VertexId>> = (0..pw.pieces.len()).map(|i| pw.gateways(i)).collect();
    let mut pieces = Vec::with_capacity(pw.pieces.len());
    for (i, piece) in pw.pieces.iter().enumerate() {
        let t = match tables_for(piece, Grade::Pseudometric) {
            Ok(t) => Some(t),
            Err(e) => {
                failures.push(PatchworkFailure::PieceNotGraphPseudometric {
                    piece: i,
                    detail: e.to_string(),
                });
                None
            }
        };
        if gateways[i].is_empty() {
            failures.push(PatchworkFailure::NoGateway { piece: i });
        }
        if let (Some(t), Some(b)) = (&t, &base) {
            let gs = &gateways[i];
            'pairs: for (k, a) in gs.iter().enumerate() {
                for c in &gs[k + 1..] {
                    let piece_hat = t.hat(a, c).expect("gateway is a piece vertex");
                    let base_hat = b.hat(a, c).expect("gateway is a base vertex");
                    if piece_hat != base_hat {
                        failures.push(PatchworkFailure::GatewayMismatch {
                            piece: i,
                            pair: Doubleton::new(a.clone(), c.clone()).unwrap(),
                            piece_hat,
                            base_hat,
                        });
                        break 'pairs;
                    }
                }
            }
        }
        pieces.push(t);
    }
    for i in 0..pw.pieces.len() {
        for j in (i + 1)..pw.pieces.len() {
            let shared = pw.pieces[i]
                .vertices()
                .iter()
                .find(|v| pw.pieces[j].contains_vertex(v) && !pw.base.contains_vertex(v));
            if let Some(v) = shared {
                failures.push(PatchworkFailure::SharedOutsideBase {
                    pieces: [i, j],
                    vertex: v.clone(),
                });
            }
        }
    }
    let report = PatchworkReport {
        valid: failures.is_empty(),
        base_full: pw.base.is_full(),
        gateways,
        failures,
    };
    (report, base, pieces)
}

pub fn validate_patchwork(pw: &Patchwork) -> PatchworkReport {
    inspect(pw).0
}

/// A validated patchwork with the distance tables of every part.
#[derive(Debug, Clone)]
pub struct Glued {
    metric: PartialMetric,
    base: DistanceTables,
    pieces: Vec<DistanceTables>,
    gateways: Vec<Vec<VertexId>>,
    /// For vertices outside the base, the index of the piece holding them.
    owner: BTreeMap<VertexId, usize>,
}

impl Glued {
    pub fn new(pw: &Patchwork) -> Result<Self> {
        let (report, base, pieces) = inspect(pw);
        if let Some(f) = report.failures.first() {
            return Err(Error::InvalidPatchwork(f.to_string()));
        }
        let base = base.expect("valid patchworks have base tables");
        let pieces: Vec<DistanceTables> = pieces
            .into_iter()
            .map(|t| t.expect("valid piece"))
            .collect();

        let mut vertices: BTreeSet<VertexId> = pw.base.vertices().iter().cloned().collect();
        let mut edges: BTreeMap<Doubleton, Rational> = pw
            .base
            .edges()
            .map(|(p, w)| (p.clone(), w.clone()))
            .collect();
        let mut owner = BTreeMap::new();
        for (i, piece) in pw.pieces.iter().enumerate() {
            for v in piece.vertices() {
                if vertices.insert(v.clone()) {
                    owner.insert(v.clone(), i);
                }
            }
            for (p, w) in piece.edges() {
                if let Some(prev) = edges.insert(p.clone(), w.clone()) {
                    if &prev != w {
                        return Err(Error::Postcondition(format!(
                            "overlapping edge {p} has weights {prev} and {w}"
                        )));
                    }
                }
            }
        }
        let metric = PartialMetric::new(vertices, edges)?;
        if let Err(e) = tables_for(&metric, Grade::Pseudometric) {
            return Err(Error::Postcondition(format!("glued relation: {e}")));
        }
        Ok(Glued {
            metric,
            base,
            pieces,
            gateways: report.gateways,
            owner,
        })
    }

    pub fn metric(&self) -> &PartialMetric {
        &self.metric
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn gateways(&self, piece: usize) -> &[VertexId] {
        &self.gateways[piece]
    }

    /// The piece holding `v`, or `None` for base vertices.
    pub fn owner(&self, v: &VertexId) -> Result<Option<usize>> {
        if self.base.source().contains_vertex(v) {
            Ok(None)
        } else {
            self.owner
                .get(v)
                .copied()
                .map(Some)
                .ok_or_else(|| Error::UnknownVertex(v.to_string()))
        }
    }

    fn part(&self, owner: Option<usize>) -> &DistanceTables {
        owner.map_or(&self.base, |i| &self.pieces[i])
    }

    /// Distance through gateways: the distance inside a common part when
    /// `x` and `y` share one, and otherwise the least
    /// `hat_f(x,a) + hat_p(a,b) + hat_g(b,y)` over gateways `a` of `x`'s part and
    /// `b` of `y`'s part.
    pub fn hat(&self, x: &VertexId, y: &VertexId) -> Result<Rational> {
        let (fx, fy) = (self.owner(x)?, self.owner(y)?);
        match (fx, fy) {
            (None, None) => return self.base.hat(x, y),
            (Some(i), _) if self.pieces[i].source().contains_vertex(y) => {
                return self.pieces[i].hat(x, y)
            }
            (_, Some(j)) if self.pieces[j].source().contains_vertex(x) => {
                return self.pieces[j].hat(x, y)
            }
            _ => {}
        }
        let gates = |o: Option<usize>| -> &[VertexId] {
            o.map_or(self.base.source().vertices(), |i| &self.gateways[i])
        };
        let (f, g) = (self.part(fx), self.part(fy));
        let mut best: Option<Rational> = None;
        for a in gates(fx) {
            let xa = f.hat(x, a)?;
            for b in gates(fy) {
                let total = &(&xa + &self.base.hat(a, b)?) + &g.hat(b, y)?;
                if best.as_ref().is_none_or(|m| &total < m) {
                    best = Some(total);
                }
            }
        }
        Ok(best.expect("every part has a gateway"))
    }

    /// `min over a, b in B of hat(a,v) + hat(v,b) - hat(a,b)`, with `hat`
    /// evaluated through gateways.
    pub fn lambda(&self, v: &VertexId, b: &[VertexId]) -> Result<Rational> {
        if b.is_empty() {
            return Err(Error::EmptyB);
        }
        let to_v = b
            .iter()
            .map(|a| self.hat(a, v))
            .collect::<Result<Vec<_>>>()?;
        let mut best: Option<Rational> = None;
        for (i, a) in b.iter().enumerate() {
            for (j, c) in b.iter().enumerate().skip(i) {
                let slack = &(&to_v[i] + &to_v[j]) - &self.hat(a, c)?;
                if best.as_ref().is_none_or(|m| &slack < m) {
                    best = Some(slack);
                }
            }
        }
        Ok(best.unwrap())
    }
}

pub fn glue(pw: &Patchwork) -> Result<PartialMetric> {
    Ok(Glued::new(pw)?.metric)
}

pub fn glue_hat(pw: &Patchwork, x: &VertexId, y: &VertexId) -> Result<Rational> {
    Glued::new(pw)?.hat(x, y)
}

pub fn lambda(pw: &Patchwork, v: &VertexId, b: &[VertexId]) -> Result<Rational> {
    Glued::new(pw)?.lambda(v, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceFloppiness {
    pub piece: usize,
    pub floppy: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<WorstPair>,
}

/// A vertex whose triangle slack against a gateway set vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackFailure {
    pub piece: usize,
    pub vertex: VertexId,
    pub lambda: Rational,
}

/// Lower bound on `hat - check` for a pair split between two parts, and the
/// measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapBound {
    pub pair: Doubleton,
    /// Whether the second vertex lies in the base (bound `min{Λx, Λy/2}`) or
    /// in another piece (bound `min{Λx, Λy}`).
    pub across: Across,
    pub bound: Rational,
    pub gap: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Across {
    PieceToBase,
    PieceToPiece,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    /// All hypotheses hold; the glued relation is then floppy.
    pub certified: bool,
    pub base_full: bool,
    pub pieces: Vec<PieceFloppiness>,
    /// Pairs `x` in a piece outside the base, `y` in the base outside the
    /// piece, with `Λ(x; gateways) = 0` or `Λ(y; gateways) = 0`.
    pub cross_slack: Vec<SlackFailure>,
    /// Piece vertices outside the base with `Λ(x; gateways) = 0`, checked
    /// even when the base has no vertex outside the piece.
    pub interior_slack: Vec<SlackFailure>,
    /// The weaker hypothesis set without `interior_slack`.
    pub cross_hypotheses_hold: bool,
    /// Whether the glued relation has only positive weights.
    pub metric_grade: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub glued_floppy: Option<bool>,
    pub bounds: Vec<GapBound>,
}

impl CertReport {
    /// Every reported lower bound is met by the measured gap.
    pub fn bounds_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.gap >= b.bound)
    }
}

/// Checks the sufficient conditions for the glued relation to be floppy:
/// the base is full, each piece is floppy, and the triangle slack `Λ` of
/// non-gateway vertices against each piece's gateways is positive.
///
/// When certified, also confirms floppiness of the glued relation directly
/// and measures `hat - check` on every cross pair against its lower bound.
pub fn floppy_certificate(pw: &Patchwork) -> Result<CertReport> {
    let g = Glued::new(pw)?;
    let base_vs = pw.base.vertices();
    let pieces: Vec<PieceFloppiness> = g
        .pieces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let r = t.floppy_report();
            PieceFloppiness {
                piece: i,
                floppy: r.floppy,
                worst_pair: if r.floppy { None } else { r.worst_pair },
            }
        })
        .collect();

    // Λ of every vertex of interest against each piece's gateways.
    let mut slack: Vec<BTreeMap<VertexId, Rational>> = Vec::with_capacity(g.piece_count());
    let mut cross_slack = Vec::new();
    let mut interior_slack = Vec::new();
    for (i, piece) in pw.pieces.iter().enumerate() {
        let gates = g.gateways(i);
        let outside_base: Vec<&VertexId> = piece
            .vertices()
            .iter()
            .filter(|v| !pw.base.contains_vertex(v))
            .collect();
        let outside_piece: Vec<&VertexId> = base_vs
            .iter()
            .filter(|v| !piece.contains_vertex(v))
            .collect();
        let mut values = BTreeMap::new();
        for v in outside_base.iter().chain(&outside_piece) {
            values.insert((*v).clone(), g.lambda(v, gates)?);
        }
        let fail = |v: &VertexId| SlackFailure {
            piece: i,
            vertex: v.clone(),
            lambda: values[v].clone(),
        };
        if !outside_piece.is_empty() {
            for v in outside_base.iter().chain(&outside_piece) {
                if !values[*v].is_positive() {
                    cross_slack.push(fail(v));
                }
            }
        }
        for v in &outside_base {
            if !values[*v].is_positive() {
                interior_slack.push(fail(v));
            }
        }
        slack.push(values);
    }

    let base_full = pw.base.is_full();
    let pieces_floppy = pieces.iter().all(|p| p.floppy);
    let cross_hypotheses_hold = base_full && pieces_floppy && cross_slack.is_empty();
    let certified = cross_hypotheses_hold && interior_slack.is_empty();
    let metric_grade = g.metric.edges().all(|(_, w)| w.is_positive());

    let mut glued_floppy = None;
    let mut bounds = Vec::new();
    if certified {
        let t = tables_for(&g.metric, Grade::Pseudometric)?;
        glued_floppy = Some(t.floppy_report().floppy);
        let half = Rational::new(1, 2);
        for (i, piece) in pw.pieces.iter().enumerate() {
            for x in piece
                .vertices()
                .iter()
                .filter(|v| !pw.base.contains_vertex(v))
            {
                let (ix, lx) = (t.index(x)?, &slack[i][x]);
                for y in base_vs.iter().filter(|v| !piece.contains_vertex(v)) {
                    let bound = lx.clone().min(&half * &slack[i][y]);
                    bounds.push(gap_bound(&t, ix, t.index(y)?, Across::PieceToBase, bound));
                }
                for (j, other) in pw.pieces.iter().enumerate().skip(i + 1) {
                    for y in other
                        .vertices()
                        .iter()
                        .filter(|v| !pw.base.contains_vertex(v))
                    {
                        let bound = lx.clone().min(slack[j][y].clone());
                        bounds.push(gap_bound(&t, ix, t.index(y)?, Across::PieceToPiece, bound));
                    }
                }
            }
        }
    }
    Ok(CertReport {
        certified,
        base_full,
        pieces,
        cross_slack,
        interior_slack,
        cross_hypotheses_hold,
        metric_grade,
        glued_floppy,
        bounds,
    })
}

fn gap_bound(t: &DistanceTables, i: usize, j: usize, across: Across, bound: Rational) -> GapBound {
    GapBound {
        pair: t.doubleton(i, j),
        across,
        bound,
        gap: t.gap_ix(i, j),
    }
}
