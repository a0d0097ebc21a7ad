//! Brute-force reference implementations used by the integration suites.
//!
//! Nothing here goes through `DistanceTables`: distances come either from
//! enumerating simple chains or from a plain Floyd–Warshall over the edge
//! list, and `ddot`/`check` are recomputed from those tables.

#![allow(dead_code)]

use floppy_metric::{Doubleton, PartialMetric, Rational, VertexId};

/// Distances of a metric indexed by the positions of its sorted vertices.
pub struct Oracle {
    pub labels: Vec<VertexId>,
    pub n: usize,
    pub hat: Vec<Vec<Option<Rational>>>,
    pub edges: Vec<(usize, usize, Rational)>,
}

fn edge_list(m: &PartialMetric) -> (Vec<VertexId>, Vec<(usize, usize, Rational)>) {
    let labels: Vec<VertexId> = m.vertices().to_vec();
    let ix = |v: &VertexId| labels.iter().position(|l| l == v).unwrap();
    let edges = m
        .edges()
        .map(|(p, w)| (ix(p.a()), ix(p.b()), w.clone()))
        .collect();
    (labels, edges)
}

impl Oracle {
    /// Minimum weight over all simple chains; exponential, for n <= 7.
    pub fn by_chains(m: &PartialMetric) -> Self {
        let (labels, edges) = edge_list(m);
        let n = labels.len();
        let mut w: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        for (i, j, x) in &edges {
            w[*i][*j] = Some(x.clone());
            w[*j][*i] = Some(x.clone());
        }
        let mut hat = vec![vec![None; n]; n];
        for s in 0..n {
            let mut visited = vec![false; n];
            visited[s] = true;
            hat[s][s] = Some(Rational::zero());
            walk(s, &Rational::zero(), &w, &mut visited, &mut hat[s]);
        }
        Oracle {
            labels,
            n,
            hat,
            edges,
        }
    }

    pub fn by_floyd_warshall(m: &PartialMetric) -> Self {
        let (labels, edges) = edge_list(m);
        let n = labels.len();
        let mut hat: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        for (i, row) in hat.iter_mut().enumerate() {
            row[i] = Some(Rational::zero());
        }
        for (i, j, x) in &edges {
            for (a, b) in [(*i, *j), (*j, *i)] {
                if hat[a][b].as_ref().is_none_or(|h| x < h) {
                    hat[a][b] = Some(x.clone());
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (&hat[i][k], &hat[k][j]) {
                        let via = a + b;
                        if hat[i][j].as_ref().is_none_or(|h| &via < h) {
                            hat[i][j] = Some(via);
                        }
                    }
                }
            }
        }
        Oracle {
            labels,
            n,
            hat,
            edges,
        }
    }

    pub fn ix(&self, v: &VertexId) -> usize {
        self.labels.iter().position(|l| l == v).unwrap()
    }

    pub fn h(&self, i: usize, j: usize) -> Rational {
        self.hat[i][j].clone().expect("connected")
    }

    pub fn ddot(&self, x: usize, y: usize, u: usize, v: usize) -> Rational {
        (&self.h(x, u) + &self.h(y, v)).min(&self.h(x, v) + &self.h(y, u))
    }

    /// `max(0, max over edges ab of w(ab) - ddot(ab, xy))`.
    pub fn check(&self, x: usize, y: usize) -> Rational {
        self.edges
            .iter()
            .map(|(a, b, w)| w - &self.ddot(*a, *b, x, y))
            .fold(Rational::zero(), Rational::max)
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.edges
            .iter()
            .any(|(a, b, _)| (*a, *b) == (i, j) || (*a, *b) == (j, i))
    }

    pub fn is_floppy(&self) -> bool {
        (0..self.n).all(|i| {
            ((i + 1)..self.n).all(|j| self.is_edge(i, j) || self.check(i, j) < self.h(i, j))
        })
    }

    pub fn pair(&self, i: usize, j: usize) -> Doubleton {
        Doubleton::new(self.labels[i].clone(), self.labels[j].clone()).unwrap()
    }
}

fn walk(
    at: usize,
    len: &Rational,
    w: &[Vec<Option<Rational>>],
    visited: &mut [bool],
    best: &mut [Option<Rational>],
) {
    for next in 0..w.len() {
        if visited[next] {
            continue;
        }
        let Some(step) = &w[at][next] else { continue };
        let total = len + step;
        if best[next].as_ref().is_none_or(|b| &total < b) {
            best[next] = Some(total.clone());
        }
        visited[next] = true;
        walk(next, &total, w, visited, best);
        visited[next] = false;
    }
}

/// Evaluates the five one-step inequalities for `D = m ∪ {xy ↦ r}` from
/// scratch and returns the first violated one as `(statement, u, v)`.
pub fn step_inequalities(
    m: &PartialMetric,
    xy: &Doubleton,
    r: &Rational,
) -> Result<usize, (u8, String, String)> {
    let d = Oracle::by_floyd_warshall(m);
    let big = Oracle::by_floyd_warshall(&m.with_edge(xy.clone(), r.clone()).unwrap());
    let (x, y) = (d.ix(xy.a()), d.ix(xy.b()));
    let (hxy, cxy) = (d.h(x, y), d.check(x, y));
    let two = Rational::from_integer(2);
    let three = Rational::from_integer(3);
    let five_applies = &cxy + &(&two * &hxy) <= &three * r && r <= &hxy;
    let mut checked = 0;
    for u in 0..d.n {
        for v in u..d.n {
            let fail = |s: u8| Err((s, d.labels[u].to_string(), d.labels[v].to_string()));
            let (hd, hb) = (d.h(u, v), big.h(u, v));
            let (cd, cb) = (d.check(u, v), big.check(u, v));
            let dd = d.ddot(x, y, u, v);
            let r_dd = r - &dd;
            if !(hb <= hd && cd.clone().max(r_dd.clone()) <= cb) {
                return fail(1);
            }
            if hd != hb {
                if !(&hd - &(&hxy - r) <= hb && hb == r + &dd) {
                    return fail(2);
                }
                if &hb - &cd < r - &cxy {
                    return fail(3);
                }
            }
            let guard4 = cd != cb && cb != r_dd && cb > &hxy - &(&two * r);
            if guard4 && !(&cb - &cd <= &hxy - r && &hd - &cb >= r - &cxy) {
                return fail(4);
            }
            if five_applies {
                let floor = (&hd - &cd).min(&hxy - r).min(&two * &dd);
                if &hb - &cb < floor {
                    return fail(5);
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}
