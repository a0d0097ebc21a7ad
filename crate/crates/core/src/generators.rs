//! Deterministic instance factories.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::glue::{validate_patchwork, Patchwork};
use crate::metric::{is_floppy, tables_for, DistanceTables, Doubleton, Grade, PartialMetric};
use crate::rational::Rational;

/// Rejection-sampling budget for [`random_floppy`].
pub const MAX_ATTEMPTS: usize = 1000;

/// Coordinates of random points are drawn from `0..=GRID` in each of three axes.
const GRID: i64 = 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenKind {
    Cantor {
        depth: u32,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Star {
        n: usize,
    },
    Complete {
        n: usize,
    },
    RandomFloppy {
        n: usize,
        density: Rational,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GenKind,
    /// Every weight is multiplied by this factor.
    pub scale: Rational,
}

impl GenSpec {
    pub fn new(kind: GenKind) -> Self {
        GenSpec {
            kind,
            scale: Rational::one(),
        }
    }

    pub fn generate(&self) -> Result<PartialMetric> {
        if !self.scale.is_positive() {
            return Err(Error::Malformed(format!(
                "weight scale {} must be positive",
                self.scale
            )));
        }
        let m = match &self.kind {
            GenKind::Cantor { depth } => cantor_tree(*depth)?,
            GenKind::Path { n } => path(*n)?,
            GenKind::Cycle { n } => cycle(*n)?,
            GenKind::Star { n } => star(*n)?,
            GenKind::Complete { n } => complete(*n)?,
            GenKind::RandomFloppy { n, density, seed } => random_floppy(*n, density, *seed)?,
        };
        Ok(scaled(&m, &self.scale))
    }
}

fn scaled(m: &PartialMetric, s: &Rational) -> PartialMetric {
    if s == &Rational::one() {
        return m.clone();
    }
    PartialMetric::new(
        m.vertices().iter().cloned(),
        m.edges().map(|(p, w)| (p.clone(), w * s)),
    )
    .expect("scaling keeps a metric well formed")
}

/// Labels `v0 .. v{n-1}`, zero-padded to a common width so that they sort
/// numerically.
pub fn labels(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("v{i:0width$}")).collect()
}

fn need_vertices(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Malformed(
            "a metric needs at least one vertex".into(),
        ));
    }
    Ok(())
}

fn unit_graph(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<PartialMetric> {
    let ls = labels(n);
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            Ok((
                Doubleton::new(ls[i].as_str(), ls[j].as_str())?,
                Rational::one(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PartialMetric::new(ls.iter().map(String::as_str), edges)
}

pub fn path(n: usize) -> Result<PartialMetric> {
    need_vertices(n)?;
    unit_graph(n, (1..n).map(|i| (i - 1, i)))
}

pub fn cycle(n: usize) -> Result<PartialMetric> {
    need_vertices(n)?;
    let closing = (n >= 3).then(|| (n - 1, 0));
    unit_graph(n, (1..n).map(|i| (i - 1, i)).chain(closing))
}

/// `v0` joined to each of the other `n - 1` vertices.
pub fn star(n: usize) -> Result<PartialMetric> {
    need_vertices(n)?;
    unit_graph(n, (1..n).map(|i| (0, i)))
}

pub fn complete(n: usize) -> Result<PartialMetric> {
    need_vertices(n)?;
    unit_graph(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
}

/// Label of a binary string in the Cantor tree; the empty string is `root`.
pub fn cantor_label(s: &str) -> String {
    if s.is_empty() {
        "root".to_string()
    } else {
        s.to_string()
    }
}

/// Depth of a Cantor-tree label.
pub fn cantor_depth(label: &str) -> usize {
    if label == "root" {
        0
    } else {
        label.len()
    }
}

/// All binary strings of length at most `depth`, with an edge `st` of weight
/// `2^-|s| - 2^-|t|` for every proper prefix `s` of `t`.
pub fn cantor_tree(depth: u32) -> Result<PartialMetric> {
    if depth == 0 {
        return Err(Error::DepthZero);
    }
    let mut strings = vec![String::new()];
    for len in 1..=depth as usize {
        let mut next: Vec<String> = strings
            .iter()
            .filter(|s| s.len() == len - 1)
            .flat_map(|s| [format!("{s}0"), format!("{s}1")])
            .collect();
        strings.append(&mut next);
    }
    let mut edges = Vec::new();
    for t in &strings {
        for k in 0..t.len() {
            let s = &t[..k];
            let w = Rational::pow2(-(k as i32)) - Rational::pow2(-(t.len() as i32));
            edges.push((Doubleton::new(cantor_label(s), cantor_label(t))?, w));
        }
    }
    let m = PartialMetric::new(strings.iter().map(|s| cantor_label(s)), edges)?;

    let t = tables_for(&m, Grade::Metric)
        .map_err(|e| Error::Postcondition(format!("Cantor tree: {e}")))?;
    if !t.floppy_report().floppy {
        return Err(Error::Postcondition("Cantor tree is not floppy".into()));
    }
    Ok(m)
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<[i64; 3]> {
    let mut seen = BTreeSet::new();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [(); 3].map(|_| rng.random_range(0..=GRID));
        if seen.insert(p) {
            pts.push(p);
        }
    }
    pts
}

fn taxicab(p: &[i64; 3], q: &[i64; 3]) -> Rational {
    Rational::from_integer(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

type PairOrder = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Index pairs of a random spanning tree on `0..n` followed by the
/// remaining pairs in random order.
fn random_pair_order(n: usize, rng: &mut ChaCha8Rng) -> PairOrder {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        let (i, j) = (parent.min(order[k]), parent.max(order[k]));
        tree.push((i, j));
    }
    let in_tree: BTreeSet<_> = tree.iter().copied().collect();
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|p| !in_tree.contains(p))
        .collect();
    rest.shuffle(rng);
    (tree, rest)
}

/// Number of edges for a density over `n` vertices, never below a spanning tree.
fn target_edges(n: usize, density: &Rational) -> usize {
    let pairs = (n * (n - 1) / 2) as i64;
    let wanted = density * &Rational::from_integer(pairs);
    let ceil = wanted.ceil_to_i64().unwrap_or(pairs);
    (ceil.clamp(0, pairs) as usize).max(n - 1)
}

/// A floppy graph metric on `n` vertices: distances between random points of
/// a 3-dimensional integer grid under the taxicab norm, restricted to a
/// random connected edge set with about `density` of all pairs.
pub fn random_floppy(n: usize, density: &Rational, seed: u64) -> Result<PartialMetric> {
    if n < 2 {
        return Err(Error::Malformed(format!(
            "random_floppy needs n >= 2, got {n}"
        )));
    }
    if !density.is_positive() || density > &Rational::one() {
        return Err(Error::Malformed(format!(
            "density {density} is not in (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ls = labels(n);
    let m_edges = target_edges(n, density);
    for _ in 0..MAX_ATTEMPTS {
        let pts = random_points(n, &mut rng);
        let (tree, rest) = random_pair_order(n, &mut rng);
        let edges = tree.into_iter().chain(rest).take(m_edges).map(|(i, j)| {
            (
                Doubleton::new(ls[i].as_str(), ls[j].as_str()).unwrap(),
                taxicab(&pts[i], &pts[j]),
            )
        });
        let m = PartialMetric::new(ls.iter().map(String::as_str), edges)?;
        if is_floppy(&m)?.floppy {
            return Ok(m);
        }
    }
    Err(Error::GenerationExhausted(MAX_ATTEMPTS))
}

/// A random connected graph with integer weights in `1..=max_weight`; not
/// necessarily a graph metric.
pub fn random_connected(
    n: usize,
    density: &Rational,
    max_weight: i64,
    seed: u64,
) -> Result<PartialMetric> {
    if n == 0 || max_weight < 1 {
        return Err(Error::Malformed(
            "random_connected needs n >= 1 and max_weight >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ls = labels(n);
    let (tree, rest) = random_pair_order(n, &mut rng);
    let take = if n == 1 { 0 } else { target_edges(n, density) };
    let edges: Vec<_> = tree
        .into_iter()
        .chain(rest)
        .take(take)
        .map(|(i, j)| {
            let w = Rational::from_integer(rng.random_range(1..=max_weight));
            (Doubleton::new(ls[i].as_str(), ls[j].as_str()).unwrap(), w)
        })
        .collect();
    PartialMetric::new(ls.iter().map(String::as_str), edges)
}

/// A random valid patchwork: a base on 2 to 5 grid points (full or a
/// connected part of the complete graph) and up to `max_pieces` pieces of at
/// most `max_piece_vertices` vertices, all weighted by taxicab distances.
/// Each piece joins its gateways by edges of the base distance.
pub fn random_patchwork(
    max_pieces: usize,
    max_piece_vertices: usize,
    seed: u64,
) -> Result<Patchwork> {
    if max_piece_vertices < 2 {
        return Err(Error::Malformed(
            "pieces need room for at least two vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let k = rng.random_range(2..=5usize);
        let pts = random_points(k, &mut rng);
        let names: Vec<String> = (0..k).map(|i| format!("b{i}")).collect();
        let (tree, rest) = random_pair_order(k, &mut rng);
        let keep = if rng.random_bool(0.5) {
            tree.len() + rest.len()
        } else {
            tree.len() + rng.random_range(0..=rest.len())
        };
        let base = PartialMetric::new(
            names.iter().map(String::as_str),
            tree.into_iter().chain(rest).take(keep).map(|(i, j)| {
                (
                    Doubleton::new(names[i].as_str(), names[j].as_str()).unwrap(),
                    taxicab(&pts[i], &pts[j]),
                )
            }),
        )?;
        let base_tables = DistanceTables::new(&base)?;

        let mut pieces = Vec::new();
        let count = if max_pieces == 0 {
            0
        } else {
            rng.random_range(1..=max_pieces)
        };
        for f in 0..count {
            let mut gates: Vec<usize> = (0..k).collect();
            gates.shuffle(&mut rng);
            gates.truncate(rng.random_range(1..=k.min(max_piece_vertices - 1).min(3)));
            let fresh = rng.random_range(1..=max_piece_vertices - gates.len());
            let own = random_points(fresh, &mut rng);
            let mut labels: Vec<String> = gates.iter().map(|&g| names[g].clone()).collect();
            labels.extend((0..fresh).map(|j| format!("p{f}x{j}")));
            let mut coords: Vec<[i64; 3]> = gates.iter().map(|&g| pts[g]).collect();
            coords.extend(own);

            let n = labels.len();
            let (tree, rest) = random_pair_order(n, &mut rng);
            let extra = rng.random_range(0..=rest.len());
            let mut edges: Vec<(Doubleton, Rational)> = Vec::new();
            for (i, j) in tree.into_iter().chain(rest.into_iter().take(extra)) {
                let w = if i < gates.len() && j < gates.len() {
                    base_tables.hat_ix(gates[i], gates[j]).clone()
                } else {
                    taxicab(&coords[i], &coords[j])
                };
                edges.push((Doubleton::new(labels[i].as_str(), labels[j].as_str())?, w));
            }
            for a in 0..gates.len() {
                for b in (a + 1)..gates.len() {
                    let p = Doubleton::new(labels[a].as_str(), labels[b].as_str())?;
                    if !edges.iter().any(|(q, _)| q == &p) {
                        edges.push((p, base_tables.hat_ix(gates[a], gates[b]).clone()));
                    }
                }
            }
            pieces.push(PartialMetric::new(
                labels.iter().map(String::as_str),
                edges,
            )?);
        }
        let pw = Patchwork::new(base, pieces);
        if validate_patchwork(&pw).valid {
            return Ok(pw);
        }
    }
    Err(Error::GenerationExhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{check, hat, validate, VertexId};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn cantor_small() {
        assert_eq!(cantor_tree(0).unwrap_err().code(), "DEPTH_ZERO");
        let m = cantor_tree(1).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.edge_count(), 2);
        let (s0, s1) = (VertexId::from("0"), VertexId::from("1"));
        assert_eq!(check(&m, &s0, &s1).unwrap(), q("0"));
        assert_eq!(hat(&m, &s0, &s1).unwrap(), q("1"));
        let m = cantor_tree(2).unwrap();
        assert_eq!(m.vertex_count(), 7);
        assert_eq!(m.edge_count(), 10);
        assert!(is_floppy(&m).unwrap().floppy);
    }

    #[test]
    fn families() {
        assert_eq!(labels(11)[3], "v03");
        assert_eq!(path(4).unwrap().edge_count(), 3);
        assert_eq!(cycle(5).unwrap().edge_count(), 5);
        assert_eq!(cycle(2).unwrap().edge_count(), 1);
        assert_eq!(star(4).unwrap().edge_count(), 3);
        assert!(complete(4).unwrap().is_full());
        assert_eq!(path(1).unwrap().vertex_count(), 1);
        assert!(path(0).is_err());
        for m in [path(5), cycle(6), star(5), complete(5)] {
            let r = validate(&m.unwrap());
            assert!(r.connected && r.graph_metric);
        }
        let spec = GenSpec {
            kind: GenKind::Path { n: 3 },
            scale: q("3/2"),
        };
        let m = spec.generate().unwrap();
        assert!(m.edges().all(|(_, w)| w == &q("3/2")));
    }

    #[test]
    fn random_floppy_contract() {
        let m = random_floppy(2, &q("1/2"), 1).unwrap();
        assert!(m.is_full());
        let m = random_floppy(6, &q("1"), 9).unwrap();
        assert!(m.is_full());
        for seed in 0..20 {
            let a = random_floppy(8, &q("1/2"), seed).unwrap();
            let b = random_floppy(8, &q("1/2"), seed).unwrap();
            assert_eq!(a.to_json(), b.to_json());
            assert_eq!(a.edge_count(), 14);
            assert!(is_floppy(&a).unwrap().floppy);
        }
        assert!(random_floppy(1, &q("1/2"), 0).is_err());
        assert!(random_floppy(4, &q("0"), 0).is_err());
        assert!(random_floppy(4, &q("3/2"), 0).is_err());
    }

    #[test]
    fn random_patchworks_are_valid() {
        for seed in 0..30 {
            let pw = random_patchwork(4, 5, seed).unwrap();
            assert!(validate_patchwork(&pw).valid);
            assert!(pw.pieces.len() <= 4 && pw.pieces.iter().all(|p| p.vertex_count() <= 5));
        }
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..20 {
            let m = random_connected(5, &q("1/2"), 9, seed).unwrap();
            assert!(validate(&m).connected);
        }
    }
}
