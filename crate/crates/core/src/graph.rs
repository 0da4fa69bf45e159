//! Finite simple digraphs on dense vertex indices `0..n`.
//!
//! Arcs are stored in canonical sorted order, so every algorithm that walks
//! adjacency lists is deterministic. Random generators use ChaCha8 seeded
//! from a `u64`, which produces the same stream on every platform.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A finite digraph without self-loops or parallel arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    arc_count: usize,
    tournament: bool,
}

impl Digraph {
    /// Builds a digraph on `n` vertices. Duplicate arcs are collapsed.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out_adj = vec![Vec::new(); n];
        for (from, to) in arcs {
            if from >= n || to >= n {
                return Err(Error::VertexOutOfRange { from, to, n });
            }
            if from == to {
                return Err(Error::SelfLoop(from));
            }
            out_adj[from].push(to);
        }
        Ok(Self::from_out_adj(out_adj))
    }

    fn from_out_adj(mut out_adj: Vec<Vec<usize>>) -> Self {
        let n = out_adj.len();
        let mut in_degree = vec![0usize; n];
        let mut arc_count = 0;
        for succ in out_adj.iter_mut() {
            succ.sort_unstable();
            succ.dedup();
            arc_count += succ.len();
            for &v in succ.iter() {
                in_degree[v] += 1;
            }
        }
        let mut in_adj: Vec<Vec<usize>> = in_degree.into_iter().map(Vec::with_capacity).collect();
        for (u, succ) in out_adj.iter().enumerate() {
            for &v in succ {
                in_adj[v].push(u);
            }
        }
        // `in_adj` is filled in ascending order of `u`, so it is already sorted.
        let mut g = Self {
            out_adj,
            in_adj,
            arc_count,
            tournament: false,
        };
        g.tournament = g.check_tournament();
        g
    }

    fn check_tournament(&self) -> bool {
        let n = self.n();
        if self.arc_count != n * n.saturating_sub(1) / 2 {
            return false;
        }
        // With the arc count fixed, it is enough that no vertex has an
        // out-neighbour that is also an in-neighbour. Both lists are sorted.
        (0..n).all(|u| {
            let (out, inc) = (&self.out_adj[u], &self.in_adj[u]);
            let (mut i, mut j) = (0, 0);
            while i < out.len() && j < inc.len() {
                match out[i].cmp(&inc[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return false,
                }
            }
            true
        })
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_adj.iter().map(Vec::len).collect()
    }

    pub fn min_out_degree(&self) -> Option<usize> {
        self.out_adj.iter().map(Vec::len).min()
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.out_adj[from].binary_search(&to).is_ok()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    /// True when exactly one of `(u, v)`, `(v, u)` is an arc for every pair.
    pub fn is_tournament(&self) -> bool {
        self.tournament
    }
}

/// The rotational tournament on `q` vertices: `i -> (i + s) mod q` for
/// `s = 1..=(q - 1) / 2`. Every out-degree equals `(q - 1) / 2`.
pub fn regular_tournament(q: usize) -> Result<Digraph> {
    if q.is_multiple_of(2) {
        return Err(Error::EvenOrder(q));
    }
    let half = (q - 1) / 2;
    let out_adj = (0..q)
        .map(|i| (1..=half).map(|s| (i + s) % q).collect())
        .collect();
    Ok(Digraph::from_out_adj(out_adj))
}

/// A random tournament: each pair `u < v` is oriented `u -> v` with
/// probability 1/2, pairs visited in lexicographic order and oriented by
/// successive bits of the generator's 64-bit outputs.
pub fn random_tournament(n: usize, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out_adj = vec![Vec::with_capacity(n / 2 + 16); n];
    let mut bits = 0u64;
    let mut left = 0;
    for u in 0..n {
        for v in u + 1..n {
            if left == 0 {
                bits = rng.random::<u64>();
                left = 64;
            }
            let forward = bits & 1 == 1;
            bits >>= 1;
            left -= 1;
            if forward {
                out_adj[u].push(v);
            } else {
                out_adj[v].push(u);
            }
        }
    }
    Digraph::from_out_adj(out_adj)
}

/// A random regular tournament on odd `q` vertices.
///
/// Starts from the rotational tournament, reverses randomly chosen cyclic
/// triangles (which preserves every out-degree), then relabels the vertices
/// with a random permutation.
pub fn random_regular_tournament(q: usize, seed: u64) -> Result<Digraph> {
    if q.is_multiple_of(2) {
        return Err(Error::EvenOrder(q));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // adj[u * q + v] is true iff u -> v.
    let mut adj = vec![false; q * q];
    for (u, v) in regular_tournament(q)?.arcs() {
        adj[u * q + v] = true;
    }
    if q >= 3 {
        for _ in 0..q * q {
            let a = rng.random_range(0..q);
            let b = rng.random_range(0..q);
            let c = rng.random_range(0..q);
            if a == b || b == c || a == c {
                continue;
            }
            let forward = adj[a * q + b] && adj[b * q + c] && adj[c * q + a];
            let backward = adj[b * q + a] && adj[c * q + b] && adj[a * q + c];
            if forward || backward {
                for (x, y) in [(a, b), (b, c), (c, a)] {
                    adj[x * q + y] = !adj[x * q + y];
                    adj[y * q + x] = !adj[y * q + x];
                }
            }
        }
    }
    let mut label: Vec<usize> = (0..q).collect();
    label.shuffle(&mut rng);
    let mut out_adj = vec![Vec::new(); q];
    for u in 0..q {
        for v in 0..q {
            if adj[u * q + v] {
                out_adj[label[u]].push(label[v]);
            }
        }
    }
    Ok(Digraph::from_out_adj(out_adj))
}

/// Includes each ordered pair `(u, v)`, `u != v`, independently with
/// probability `p`. Pairs are visited in lexicographic order.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out_adj = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && rng.random_bool(p))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(Digraph::from_out_adj(out_adj))
}

/// Parses the edge-list format: a first line holding `n`, then one `u v`
/// arc per line. Blank lines and lines starting with `#` are ignored.
pub fn read_edge_list(text: &str) -> Result<Digraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: header_line,
        message: format!("expected vertex count, found {header:?}"),
    })?;

    let mut out_adj = vec![Vec::new(); n];
    for (line, content) in lines {
        let (u, v) = parse_pair(content).ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `u v`, found {content:?}"),
        })?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("arc ({u}, {v}) has an endpoint outside 0..{n}"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        out_adj[u].push(v);
    }
    Ok(Digraph::from_out_adj(out_adj))
}

pub(crate) fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let mut it = s.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

/// Canonical edge-list text: the vertex count then arcs in sorted order.
pub fn write_edge_list(g: &Digraph) -> String {
    let mut out = String::with_capacity(8 * (g.arc_count() + 1));
    writeln!(out, "{}", g.n()).unwrap();
    for (u, v) in g.arcs() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
