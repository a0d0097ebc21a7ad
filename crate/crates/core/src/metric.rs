//! Partial metrics on finite vertex sets and the distance functionals derived
//! from them: the shortest-path pseudometric `hat`, the doubleton distance
//! `ddot`, and the extension lower envelope `check`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A vertex label. Labels are unique within a [`PartialMetric`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(label: impl Into<String>) -> Self {
        VertexId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// An unordered pair of distinct vertices, stored with `a < b`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Doubleton {
    a: VertexId,
    b: VertexId,
}

impl Doubleton {
    pub fn new(x: impl Into<VertexId>, y: impl Into<VertexId>) -> Result<Self> {
        let (x, y) = (x.into(), y.into());
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Doubleton { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(Doubleton { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(Error::Malformed(format!(
                "doubleton needs two distinct vertices, got {x} twice"
            ))),
        }
    }

    pub fn a(&self) -> &VertexId {
        &self.a
    }

    pub fn b(&self) -> &VertexId {
        &self.b
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        &self.a == v || &self.b == v
    }
}

impl fmt::Display for Doubleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl fmt::Debug for Doubleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

/// Parses `"x,y"`.
impl FromStr for Doubleton {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("expected a pair \"x,y\", got {s:?}")))?;
        Doubleton::new(x.trim(), y.trim())
    }
}

impl Serialize for Doubleton {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [&self.a, &self.b].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Doubleton {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y] = <[VertexId; 2]>::deserialize(deserializer)?;
        Doubleton::new(x, y).map_err(serde::de::Error::custom)
    }
}

/// JSON edge record `{"u": .., "v": .., "w": "p/q"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Rational,
}

/// The on-disk form of a [`PartialMetric`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeDoc>,
}

/// A nonnegative rational weight function on a set of doubletons.
///
/// Construction only guarantees structural well-formedness (known endpoints,
/// distinct labels, nonnegative weights); connectivity and the polygonal
/// inequality are reported by [`validate`].
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MetricDoc", into = "MetricDoc")]
pub struct PartialMetric {
    vertices: Vec<VertexId>,
    edges: BTreeMap<Doubleton, Rational>,
}

impl PartialMetric {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = (Doubleton, Rational)>,
    {
        let mut vs: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        if vs.is_empty() {
            return Err(Error::Malformed(
                "a metric needs at least one vertex".into(),
            ));
        }
        vs.sort();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Malformed(format!("duplicate vertex {}", w[0])));
        }
        let mut map = BTreeMap::new();
        for (pair, w) in edges {
            for v in [&pair.a, &pair.b] {
                if vs.binary_search(v).is_err() {
                    return Err(Error::Malformed(format!(
                        "edge {pair} has endpoint {v} outside the vertex set"
                    )));
                }
            }
            if w.is_negative() {
                return Err(Error::Malformed(format!(
                    "edge {pair} has negative weight {w}"
                )));
            }
            if let Some(prev) = map.get(&pair) {
                if prev != &w {
                    return Err(Error::Malformed(format!(
                        "edge {pair} given twice with weights {prev} and {w}"
                    )));
                }
            }
            map.insert(pair, w);
        }
        Ok(PartialMetric {
            vertices: vs,
            edges: map,
        })
    }

    /// Builds a metric from `(u, v, w)` triples, collecting vertices from the endpoints.
    pub fn from_triples<'a>(
        triples: impl IntoIterator<Item = (&'a str, &'a str, Rational)>,
    ) -> Result<Self> {
        let mut vs = std::collections::BTreeSet::new();
        let mut es = Vec::new();
        for (u, v, w) in triples {
            vs.insert(u);
            vs.insert(v);
            es.push((Doubleton::new(u, v)?, w));
        }
        PartialMetric::new(vs, es)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }

    /// Canonical JSON: vertices and edges in lexicographic order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric documents always serialize")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Doubleton, &Rational)> {
        self.edges.iter()
    }

    pub fn weight(&self, pair: &Doubleton) -> Option<&Rational> {
        self.edges.get(pair)
    }

    pub fn is_edge(&self, pair: &Doubleton) -> bool {
        self.edges.contains_key(pair)
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &VertexId) -> Result<usize> {
        self.vertices
            .binary_search(v)
            .map_err(|_| Error::UnknownVertex(v.to_string()))
    }

    /// Number of doubletons over the vertex set.
    pub fn pair_count(&self) -> usize {
        let n = self.vertices.len();
        n * n.saturating_sub(1) / 2
    }

    pub fn is_full(&self) -> bool {
        self.edges.len() == self.pair_count()
    }

    /// All doubletons that are not edges, in lexicographic order.
    pub fn missing_pairs(&self) -> Vec<Doubleton> {
        let mut out = Vec::new();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                let pair = Doubleton {
                    a: a.clone(),
                    b: b.clone(),
                };
                if !self.edges.contains_key(&pair) {
                    out.push(pair);
                }
            }
        }
        out
    }

    /// A copy with one more edge. The vertex set is unchanged.
    pub fn with_edge(&self, pair: Doubleton, w: Rational) -> Result<Self> {
        if self.edges.contains_key(&pair) {
            return Err(Error::AlreadyEdge(pair));
        }
        self.index_of(&pair.a)?;
        self.index_of(&pair.b)?;
        if w.is_negative() {
            return Err(Error::Malformed(format!(
                "edge {pair} has negative weight {w}"
            )));
        }
        let mut out = self.clone();
        out.edges.insert(pair, w);
        Ok(out)
    }

    pub(crate) fn insert_unchecked(&mut self, pair: Doubleton, w: Rational) {
        self.edges.insert(pair, w);
    }

    /// Graphviz rendering of the weighted edge set.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph metric {\n");
        for v in &self.vertices {
            out.push_str(&format!("  {:?};\n", v.as_str()));
        }
        for (p, w) in &self.edges {
            out.push_str(&format!(
                "  {:?} -- {:?} [label={:?}];\n",
                p.a.as_str(),
                p.b.as_str(),
                w.to_string()
            ));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for PartialMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialMetric")
            .field("vertices", &self.vertices)
            .field("edges", &self.edges)
            .finish()
    }
}

impl TryFrom<MetricDoc> for PartialMetric {
    type Error = Error;

    fn try_from(doc: MetricDoc) -> Result<Self> {
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Ok((Doubleton::new(e.u, e.v)?, e.w)))
            .collect::<Result<Vec<_>>>()?;
        PartialMetric::new(doc.vertices, edges)
    }
}

impl From<PartialMetric> for MetricDoc {
    fn from(m: PartialMetric) -> Self {
        MetricDoc {
            vertices: m.vertices,
            edges: m
                .edges
                .into_iter()
                .map(|(p, w)| EdgeDoc { u: p.a, v: p.b, w })
                .collect(),
        }
    }
}

/// Whether an operation needs strictly positive weights or tolerates zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Metric,
    Pseudometric,
}

/// An edge whose weight exceeds the shortest-path distance between its endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeViolation {
    pub pair: Doubleton,
    pub weight: Rational,
    pub hat: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub graph_pseudometric: bool,
    pub graph_metric: bool,
    pub full: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<EdgeViolation>,
}

/// The non-edge with the smallest `hat - check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPair {
    pub pair: Doubleton,
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloppyReport {
    pub floppy: bool,
    pub worst_pair: Option<WorstPair>,
}

/// Shortest-path distances of a connected partial metric, indexed by the
/// positions of the sorted vertex labels.
///
/// `ddot` and `check` are evaluated on demand from the `hat` table.
#[derive(Clone, Debug)]
pub struct DistanceTables {
    source: PartialMetric,
    n: usize,
    hat: Vec<Rational>,
    edges: Vec<(usize, usize, Rational)>,
    adjacent: Vec<bool>,
}

/// Strategy used to fill the `hat` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShortestPaths {
    /// Floyd–Warshall when dense, per-source Dijkstra when sparse.
    Auto,
    FloydWarshall,
    Dijkstra,
}

fn is_connected(n: usize, edges: &[(usize, usize, Rational)]) -> bool {
    if n <= 1 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(i, j, _) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

impl DistanceTables {
    pub fn new(m: &PartialMetric) -> Result<Self> {
        Self::with_algorithm(m, ShortestPaths::Auto)
    }

    pub fn with_algorithm(m: &PartialMetric, algo: ShortestPaths) -> Result<Self> {
        let n = m.vertex_count();
        let edges: Vec<(usize, usize, Rational)> = m
            .edges
            .iter()
            .map(|(p, w)| {
                // endpoints were checked at construction
                let i = m.vertices.binary_search(&p.a).unwrap();
                let j = m.vertices.binary_search(&p.b).unwrap();
                (i, j, w.clone())
            })
            .collect();
        if !is_connected(n, &edges) {
            return Err(Error::NotConnected);
        }
        let mut adjacent = vec![false; n * n];
        for &(i, j, _) in &edges {
            adjacent[i * n + j] = true;
            adjacent[j * n + i] = true;
        }
        let algo = match algo {
            ShortestPaths::Auto if edges.len() * 4 < n * n => ShortestPaths::Dijkstra,
            ShortestPaths::Auto => ShortestPaths::FloydWarshall,
            other => other,
        };
        let hat = match algo {
            ShortestPaths::Dijkstra => dijkstra_all(n, &edges),
            _ => floyd_warshall(n, &edges),
        };
        Ok(DistanceTables {
            source: m.clone(),
            n,
            hat,
            edges,
            adjacent,
        })
    }

    /// The metric these tables were computed from.
    pub fn source(&self) -> &PartialMetric {
        &self.source
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn vertex(&self, i: usize) -> &VertexId {
        &self.source.vertices[i]
    }

    pub fn index(&self, v: &VertexId) -> Result<usize> {
        self.source.index_of(v)
    }

    /// Edge list as `(i, j, weight)` with `i < j`.
    pub fn edge_list(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn is_edge_ix(&self, i: usize, j: usize) -> bool {
        self.adjacent[i * self.n + j]
    }

    pub fn hat_ix(&self, i: usize, j: usize) -> &Rational {
        &self.hat[i * self.n + j]
    }

    /// `min{hat(x,u) + hat(y,v), hat(x,v) + hat(y,u)}`.
    pub fn ddot_ix(&self, x: usize, y: usize, u: usize, v: usize) -> Rational {
        let straight = self.hat_ix(x, u) + self.hat_ix(y, v);
        let crossed = self.hat_ix(x, v) + self.hat_ix(y, u);
        straight.min(crossed)
    }

    /// `max(0, max over edges ab of d(ab) - ddot(ab, xy))`.
    pub fn check_ix(&self, x: usize, y: usize) -> Rational {
        let mut best = Rational::zero();
        for (a, b, w) in &self.edges {
            let slack = w - self.ddot_ix(*a, *b, x, y);
            if slack > best {
                best = slack;
            }
        }
        best
    }

    pub fn gap_ix(&self, x: usize, y: usize) -> Rational {
        self.hat_ix(x, y) - &self.check_ix(x, y)
    }

    pub fn hat(&self, x: &VertexId, y: &VertexId) -> Result<Rational> {
        Ok(self.hat_ix(self.index(x)?, self.index(y)?).clone())
    }

    pub fn ddot(&self, p: &Doubleton, q: &Doubleton) -> Result<Rational> {
        Ok(self.ddot_ix(
            self.index(&p.a)?,
            self.index(&p.b)?,
            self.index(&q.a)?,
            self.index(&q.b)?,
        ))
    }

    pub fn check(&self, x: &VertexId, y: &VertexId) -> Result<Rational> {
        Ok(self.check_ix(self.index(x)?, self.index(y)?))
    }

    pub fn pair_ix(&self, p: &Doubleton) -> Result<(usize, usize)> {
        Ok((self.index(&p.a)?, self.index(&p.b)?))
    }

    pub fn doubleton(&self, i: usize, j: usize) -> Doubleton {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Doubleton {
            a: self.vertex(i).clone(),
            b: self.vertex(j).clone(),
        }
    }

    /// First edge (in lexicographic order) whose weight exceeds `hat`.
    pub fn polygonal_violation(&self) -> Option<EdgeViolation> {
        self.edges
            .iter()
            .find(|(i, j, w)| w > self.hat_ix(*i, *j))
            .map(|(i, j, w)| EdgeViolation {
                pair: self.doubleton(*i, *j),
                weight: w.clone(),
                hat: self.hat_ix(*i, *j).clone(),
            })
    }

    pub fn is_graph_pseudometric(&self) -> bool {
        self.polygonal_violation().is_none()
    }

    pub fn is_graph_metric(&self) -> bool {
        self.is_graph_pseudometric() && self.edges.iter().all(|(_, _, w)| w.is_positive())
    }

    /// Index pairs `(i, j)`, `i < j`, that are not edges.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j)))
            .filter(move |&(i, j)| !self.is_edge_ix(i, j))
    }

    /// Floppiness without re-checking the graph-metric precondition.
    pub fn floppy_report(&self) -> FloppyReport {
        let mut worst: Option<(usize, usize, Rational)> = None;
        for (i, j) in self.non_edges() {
            let gap = self.gap_ix(i, j);
            if worst.as_ref().is_none_or(|(_, _, g)| gap < *g) {
                worst = Some((i, j, gap));
            }
        }
        match worst {
            None => FloppyReport {
                floppy: true,
                worst_pair: None,
            },
            Some((i, j, gap)) => FloppyReport {
                floppy: gap.is_positive(),
                worst_pair: Some(WorstPair {
                    pair: self.doubleton(i, j),
                    gap,
                }),
            },
        }
    }

    /// Adds the edge `ij` with weight `w` and relaxes every distance through it.
    ///
    /// A shortest chain uses the new edge at most once, so one pass is exact.
    pub fn insert_edge_ix(&mut self, i: usize, j: usize, w: Rational) {
        let n = self.n;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(!self.is_edge_ix(i, j));
        let mut next = self.hat.clone();
        for u in 0..n {
            for v in 0..n {
                let via_ij = &(self.hat_ix(u, i) + &w) + self.hat_ix(j, v);
                let via_ji = &(self.hat_ix(u, j) + &w) + self.hat_ix(i, v);
                let best = via_ij.min(via_ji);
                if best < next[u * n + v] {
                    next[u * n + v] = best;
                }
            }
        }
        self.hat = next;
        self.adjacent[i * n + j] = true;
        self.adjacent[j * n + i] = true;
        let pos = self.edges.partition_point(|(a, b, _)| (*a, *b) < (i, j));
        self.edges.insert(pos, (i, j, w.clone()));
        let pair = self.doubleton(i, j);
        self.source.insert_unchecked(pair, w);
    }
}

fn floyd_warshall(n: usize, edges: &[(usize, usize, Rational)]) -> Vec<Rational> {
    let mut dist: Vec<Option<Rational>> = vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(Rational::zero());
    }
    for (i, j, w) in edges {
        for (a, b) in [(*i, *j), (*j, *i)] {
            let slot = &mut dist[a * n + b];
            if slot.as_ref().is_none_or(|d| w < d) {
                *slot = Some(w.clone());
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i * n + k].clone() else {
                continue;
            };
            for j in 0..n {
                let Some(kj) = &dist[k * n + j] else { continue };
                let via = &ik + kj;
                let slot = &mut dist[i * n + j];
                if slot.as_ref().is_none_or(|d| via < *d) {
                    *slot = Some(via);
                }
            }
        }
    }
    dist.into_iter()
        .map(|d| d.expect("connectivity checked before shortest paths"))
        .collect()
}

fn dijkstra_all(n: usize, edges: &[(usize, usize, Rational)]) -> Vec<Rational> {
    let mut adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for (i, j, w) in edges {
        adj[*i].push((*j, w));
        adj[*j].push((*i, w));
    }
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), s)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &(w, len) in &adj[v] {
                let cand = &d + len;
                if dist[w].as_ref().is_none_or(|cur| cand < *cur) {
                    dist[w] = Some(cand.clone());
                    heap.push(Reverse((cand, w)));
                }
            }
        }
        out.extend(
            dist.into_iter()
                .map(|d| d.expect("connectivity checked before shortest paths")),
        );
    }
    out
}

/// Reports connectivity, the polygonal inequality on every edge, positivity,
/// and completeness.
pub fn validate(m: &PartialMetric) -> ValidationReport {
    let full = m.is_full();
    match DistanceTables::new(m) {
        Err(_) => ValidationReport {
            connected: false,
            graph_pseudometric: false,
            graph_metric: false,
            full,
            violation: None,
        },
        Ok(t) => {
            let violation = t.polygonal_violation();
            let gp = violation.is_none();
            ValidationReport {
                connected: true,
                graph_pseudometric: gp,
                graph_metric: gp && m.edges.values().all(Rational::is_positive),
                full,
                violation,
            }
        }
    }
}

/// Tables for `m`, after checking that it is a graph (pseudo)metric of the given grade.
pub fn tables_for(m: &PartialMetric, grade: Grade) -> Result<DistanceTables> {
    let t = DistanceTables::new(m)?;
    if let Some(v) = t.polygonal_violation() {
        let msg = format!("edge {} has weight {} > hat = {}", v.pair, v.weight, v.hat);
        return Err(match grade {
            Grade::Metric => Error::NotGraphMetric(msg),
            Grade::Pseudometric => Error::NotGraphPseudometric(msg),
        });
    }
    if grade == Grade::Metric {
        if let Some((p, _)) = m.edges.iter().find(|(_, w)| !w.is_positive()) {
            return Err(Error::NotGraphMetric(format!("edge {p} has zero weight")));
        }
    }
    Ok(t)
}

pub fn hat(m: &PartialMetric, x: &VertexId, y: &VertexId) -> Result<Rational> {
    m.index_of(x)?;
    m.index_of(y)?;
    DistanceTables::new(m)?.hat(x, y)
}

pub fn ddot(m: &PartialMetric, p: &Doubleton, q: &Doubleton) -> Result<Rational> {
    for v in [&p.a, &p.b, &q.a, &q.b] {
        m.index_of(v)?;
    }
    DistanceTables::new(m)?.ddot(p, q)
}

pub fn check(m: &PartialMetric, x: &VertexId, y: &VertexId) -> Result<Rational> {
    m.index_of(x)?;
    m.index_of(y)?;
    DistanceTables::new(m)?.check(x, y)
}

/// Floppiness of a graph metric: `check < hat` at every non-edge.
pub fn is_floppy(m: &PartialMetric) -> Result<FloppyReport> {
    Ok(tables_for(m, Grade::Metric)?.floppy_report())
}

/// Floppiness at pseudometric grade (zero weights allowed).
pub fn is_floppy_pseudo(m: &PartialMetric) -> Result<FloppyReport> {
    Ok(tables_for(m, Grade::Pseudometric)?.floppy_report())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalFloppyExtension {
    pub metric: PartialMetric,
    /// Passes that added at least one pair.
    pub iterations: usize,
    pub added: Vec<(Doubleton, Rational)>,
}

/// Adds every non-edge whose value is forced (`check = hat > 0`), repeating
/// until no forced pair remains.
pub fn minimal_floppy_extension(m: &PartialMetric) -> Result<MinimalFloppyExtension> {
    let mut t = tables_for(m, Grade::Metric)?;
    let n = m.vertex_count();
    let cap = (n * n).max(1);
    let mut added = Vec::new();
    let mut iterations = 0;
    loop {
        let forced: Vec<(usize, usize, Rational)> = t
            .non_edges()
            .filter_map(|(i, j)| {
                let h = t.hat_ix(i, j);
                (h.is_positive() && t.check_ix(i, j) == *h).then(|| (i, j, h.clone()))
            })
            .collect();
        if forced.is_empty() {
            break;
        }
        if iterations == cap {
            return Err(Error::ExtensionDiverged(cap));
        }
        iterations += 1;
        for (i, j, w) in forced {
            added.push((t.doubleton(i, j), w.clone()));
            t.insert_edge_ix(i, j, w);
        }
    }
    Ok(MinimalFloppyExtension {
        metric: t.source().clone(),
        iterations,
        added,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn metric(triples: &[(&str, &str, &str)]) -> PartialMetric {
        PartialMetric::from_triples(triples.iter().map(|(u, v, w)| (*u, *v, q(w)))).unwrap()
    }

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn pair(s: &str) -> Doubleton {
        s.parse().unwrap()
    }

    pub(crate) fn h_graph() -> PartialMetric {
        metric(&[("a", "b", "10"), ("a", "x", "1"), ("b", "y", "1")])
    }

    #[test]
    fn doubleton_is_unordered() {
        assert_eq!(
            Doubleton::new("b", "a").unwrap(),
            Doubleton::new("a", "b").unwrap()
        );
        assert!(Doubleton::new("a", "a").is_err());
        assert_eq!(pair("y, x").a(), &v("x"));
    }

    #[test]
    fn construction_rejects_malformed() {
        let e = PartialMetric::new(["a"], [(pair("a,b"), q("1"))]).unwrap_err();
        assert_eq!(e.code(), "REJECT_MALFORMED");
        let e = PartialMetric::new(Vec::<&str>::new(), []).unwrap_err();
        assert_eq!(e.code(), "REJECT_MALFORMED");
        assert!(PartialMetric::new(["a", "a"], []).is_err());
        assert!(PartialMetric::new(["a", "b"], [(pair("a,b"), q("-1"))]).is_err());
        assert!(
            PartialMetric::new(["a", "b"], [(pair("a,b"), q("1")), (pair("b,a"), q("2"))]).is_err()
        );
    }

    #[test]
    fn validate_examples() {
        let path = metric(&[("a", "b", "1"), ("b", "c", "1")]);
        let r = validate(&path);
        assert!(r.connected && r.graph_pseudometric && r.graph_metric && !r.full);

        let bad = metric(&[("a", "b", "1"), ("b", "c", "1"), ("a", "c", "5")]);
        let r = validate(&bad);
        assert!(!r.graph_pseudometric);
        let viol = r.violation.unwrap();
        assert_eq!((viol.weight, viol.hat), (q("5"), q("2")));

        let tri = metric(&[("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1")]);
        let r = validate(&tri);
        assert!(r.connected && r.graph_pseudometric && r.graph_metric && r.full);
    }

    #[test]
    fn degenerate_inputs() {
        let single = PartialMetric::new(["a"], []).unwrap();
        let r = validate(&single);
        assert!(r.connected && r.full && r.graph_metric);
        assert!(is_floppy(&single).unwrap().floppy);

        let split = PartialMetric::new(["a", "b", "c"], [(pair("a,b"), q("1"))]).unwrap();
        assert!(!validate(&split).connected);
        assert_eq!(
            hat(&split, &v("a"), &v("c")).unwrap_err(),
            Error::NotConnected
        );

        let zero = metric(&[("a", "b", "0"), ("b", "c", "1")]);
        let r = validate(&zero);
        assert!(r.graph_pseudometric && !r.graph_metric);
        assert_eq!(is_floppy(&zero).unwrap_err().code(), "NOT_GRAPH_METRIC");
        assert!(is_floppy_pseudo(&zero).is_ok());
    }

    #[test]
    fn hat_examples() {
        let path = metric(&[("a", "b", "1"), ("b", "c", "1")]);
        assert_eq!(hat(&path, &v("a"), &v("c")).unwrap(), q("2"));
        assert_eq!(hat(&h_graph(), &v("x"), &v("y")).unwrap(), q("12"));
        assert_eq!(
            hat(&path, &v("a"), &v("zz")).unwrap_err(),
            Error::UnknownVertex("zz".into())
        );
    }

    #[test]
    fn shortest_path_algorithms_agree() {
        let m = metric(&[
            ("a", "b", "3/2"),
            ("b", "c", "1/3"),
            ("c", "d", "2"),
            ("a", "d", "7"),
            ("b", "d", "5/2"),
            ("d", "e", "1"),
        ]);
        let fw = DistanceTables::with_algorithm(&m, ShortestPaths::FloydWarshall).unwrap();
        let dj = DistanceTables::with_algorithm(&m, ShortestPaths::Dijkstra).unwrap();
        assert_eq!(fw.hat, dj.hat);
        assert_eq!(fw.hat(&v("a"), &v("d")).unwrap(), q("23/6"));
        assert_eq!(fw.hat(&v("a"), &v("e")).unwrap(), q("29/6"));
    }

    #[test]
    fn ddot_examples() {
        let h = h_graph();
        assert_eq!(ddot(&h, &pair("a,b"), &pair("a,b")).unwrap(), q("0"));
        assert_eq!(ddot(&h, &pair("a,b"), &pair("x,y")).unwrap(), q("2"));
        let p4 = metric(&[("a", "b", "1"), ("b", "c", "1"), ("c", "d", "1")]);
        assert_eq!(ddot(&p4, &pair("a,c"), &pair("b,d")).unwrap(), q("2"));
    }

    #[test]
    fn check_examples() {
        let path = metric(&[("a", "b", "1"), ("b", "c", "1")]);
        assert_eq!(check(&path, &v("a"), &v("c")).unwrap(), q("0"));
        assert_eq!(check(&h_graph(), &v("x"), &v("y")).unwrap(), q("8"));
        // edges of a graph metric: check = hat = weight
        assert_eq!(check(&h_graph(), &v("a"), &v("b")).unwrap(), q("10"));
    }

    #[test]
    fn floppy_examples() {
        let r = is_floppy(&h_graph()).unwrap();
        assert!(r.floppy);
        // gaps: xy 4, ay 2, bx 2; worst is the first minimal pair
        assert_eq!(
            r.worst_pair,
            Some(WorstPair {
                pair: pair("a,y"),
                gap: q("2")
            })
        );
        let t = DistanceTables::new(&h_graph()).unwrap();
        assert_eq!(
            t.gap_ix(t.index(&v("b")).unwrap(), t.index(&v("x")).unwrap()),
            q("2")
        );

        let star = metric(&[("c", "u", "1"), ("c", "v", "1"), ("c", "w", "5")]);
        assert!(is_floppy(&star).unwrap().floppy);

        let tri = metric(&[("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1")]);
        assert_eq!(
            is_floppy(&tri).unwrap(),
            FloppyReport {
                floppy: true,
                worst_pair: None
            }
        );
    }

    pub(crate) fn collinear_witness() -> PartialMetric {
        metric(&[
            ("a", "b", "1"),
            ("b", "c", "1"),
            ("c", "d", "1"),
            ("a", "d", "3"),
            ("b", "d", "2"),
        ])
    }

    #[test]
    fn minimal_floppy_extension_examples() {
        let h = minimal_floppy_extension(&h_graph()).unwrap();
        assert_eq!((h.metric, h.iterations), (h_graph(), 0));

        let path = metric(&[("a", "b", "1"), ("b", "c", "1")]);
        assert_eq!(minimal_floppy_extension(&path).unwrap().metric, path);

        let w = collinear_witness();
        assert!(!is_floppy(&w).unwrap().floppy);
        let ext = minimal_floppy_extension(&w).unwrap();
        assert_eq!(ext.added, vec![(pair("a,c"), q("2"))]);
        assert_eq!(ext.iterations, 1);
        assert!(is_floppy(&ext.metric).unwrap().floppy);
    }

    #[test]
    fn incremental_insert_matches_recompute() {
        let mut t = DistanceTables::new(&h_graph()).unwrap();
        let (x, y) = t.pair_ix(&pair("x,y")).unwrap();
        t.insert_edge_ix(x, y, q("11"));
        let fresh = DistanceTables::new(t.source()).unwrap();
        assert_eq!(t.hat, fresh.hat);
        assert_eq!(t.edges, fresh.edges);
        assert_eq!(t.adjacent, fresh.adjacent);
    }

    #[test]
    fn json_roundtrip_is_canonical() {
        let doc = r#"{"vertices":["b","a","c"],"edges":[{"u":"c","v":"b","w":"2/4"},{"u":"a","v":"b","w":"3"}]}"#;
        let m = PartialMetric::from_json(doc).unwrap();
        let out = m.to_json();
        let again = PartialMetric::from_json(&out).unwrap();
        assert_eq!(m, again);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["vertices"], serde_json::json!(["a", "b", "c"]));
        assert_eq!(
            value["edges"][1],
            serde_json::json!({"u": "b", "v": "c", "w": "1/2"})
        );
        assert!(PartialMetric::from_json(
            r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","w":1.5}]}"#
        )
        .is_err());
    }
}
