//! Exhaustive search for the fewest colours admitting a `1/k`-majority
//! colouring, for small digraphs.
//!
//! Vertices are coloured in index order and colourings are enumerated
//! lexicographically. Vertex 0 always takes colour 0 and a vertex may open
//! at most one new colour beyond those already used, which removes colour
//! permutations. Same-colour counts only grow as more vertices are coloured,
//! so a partial assignment is dropped as soon as any coloured vertex exceeds
//! `floor(d+(v) / k)`.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::verify::{allowed_same_colour, Colouring};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

struct Search<'a> {
    g: &'a Digraph,
    m: usize,
    allowed: Vec<usize>,
    colours: Vec<usize>,
    same: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn assign(&mut self, v: usize, c: usize) -> bool {
        self.colours[v] = c;
        let mut ok = true;
        for &w in self.g.out_neighbours(v) {
            if w < v && self.colours[w] == c {
                self.same[v] += 1;
            }
        }
        ok &= self.same[v] <= self.allowed[v];
        for &w in self.g.in_neighbours(v) {
            if w < v && self.colours[w] == c {
                self.same[w] += 1;
                ok &= self.same[w] <= self.allowed[w];
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colours[v];
        for &w in self.g.in_neighbours(v) {
            if w < v && self.colours[w] == c {
                self.same[w] -= 1;
            }
        }
        self.same[v] = 0;
        self.colours[v] = usize::MAX;
    }

    fn dfs(&mut self, v: usize, used: usize) -> Result<bool> {
        if v == self.g.n() {
            return Ok(true);
        }
        let limit = self.m.min(used + 1);
        for c in 0..limit {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            let ok = self.assign(v, c);
            if ok && self.dfs(v + 1, used.max(c + 1))? {
                return Ok(true);
            }
            self.unassign(v);
        }
        Ok(false)
    }
}

/// Searches for a `1/k`-majority colouring with at most `m` colours.
/// `nodes` accumulates the number of partial assignments tried.
pub fn find_majority_colouring(
    g: &Digraph,
    k: u64,
    m: usize,
    budget: u64,
    nodes: &mut u64,
) -> Result<Option<Colouring>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one colour".into()));
    }
    let n = g.n();
    let mut s = Search {
        g,
        m,
        allowed: (0..n)
            .map(|v| allowed_same_colour(g.out_degree(v), 1, k))
            .collect(),
        colours: vec![usize::MAX; n],
        same: vec![0; n],
        nodes: *nodes,
        budget,
    };
    let found = s.dfs(0, 0);
    *nodes = s.nodes;
    Ok(if found? {
        Some(Colouring::new(s.colours, m)?)
    } else {
        None
    })
}

/// Smallest `m <= m_max` for which `g` has a `1/k`-majority `m`-colouring,
/// or `None` if there is none. The node budget is shared across all `m`.
pub fn exact_min_colours(g: &Digraph, k: u64, m_max: usize, budget: u64) -> Result<Option<usize>> {
    let mut nodes = 0;
    for m in 1..=m_max {
        if find_majority_colouring(g, k, m, budget, &mut nodes)?.is_some() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_digraph, regular_tournament};
    use crate::verify::check_majority;

    /// Smallest m admitting a valid colouring, by trying all m^n colourings.
    fn brute_force_min(g: &Digraph, k: u64, m_max: usize) -> Option<usize> {
        let n = g.n();
        (1..=m_max).find(|&m| {
            (0..m.pow(n as u32)).any(|mut code| {
                let colours: Vec<usize> = (0..n)
                    .map(|_| {
                        let c = code % m;
                        code /= m;
                        c
                    })
                    .collect();
                check_majority(g, &Colouring::new(colours, m).unwrap(), k).is_empty()
            })
        })
    }

    #[test]
    fn three_cycle() {
        let g = regular_tournament(3).unwrap();
        assert_eq!(brute_force_min(&g, 2, 4), Some(3));
        assert_eq!(
            exact_min_colours(&g, 2, 4, DEFAULT_NODE_BUDGET).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn regular_five_needs_proper_colouring() {
        let g = regular_tournament(5).unwrap();
        assert_eq!(brute_force_min(&g, 3, 6), Some(5));
        assert_eq!(
            exact_min_colours(&g, 3, 6, DEFAULT_NODE_BUDGET).unwrap(),
            Some(5)
        );
        assert_eq!(
            exact_min_colours(&g, 3, 4, DEFAULT_NODE_BUDGET).unwrap(),
            None
        );
    }

    #[test]
    fn regular_tournaments_need_2k_minus_1() {
        for k in 2..=4u64 {
            let g = regular_tournament(2 * k as usize - 1).unwrap();
            let want = 2 * k as usize - 1;
            assert_eq!(
                exact_min_colours(&g, k, 2 * k as usize, DEFAULT_NODE_BUDGET).unwrap(),
                Some(want)
            );
        }
    }

    #[test]
    fn arcless() {
        let g = Digraph::new(6, []).unwrap();
        for k in 2..5 {
            assert_eq!(exact_min_colours(&g, k, 3, 1000).unwrap(), Some(1));
        }
    }

    #[test]
    fn matches_brute_force_on_small_random_digraphs() {
        for seed in 0..60u64 {
            let n = 2 + seed as usize % 6;
            let g = random_digraph(n, [0.3, 0.6, 0.9][seed as usize % 3], seed).unwrap();
            for k in 2..=3 {
                let m_max = 2 * k as usize;
                let got = exact_min_colours(&g, k, m_max, DEFAULT_NODE_BUDGET).unwrap();
                assert_eq!(got, brute_force_min(&g, k, m_max), "seed {seed} k {k}");
                // never more than 2k
                assert!(got.is_some());
            }
        }
    }

    #[test]
    fn found_colouring_is_valid() {
        let g = random_digraph(9, 0.7, 3).unwrap();
        let mut nodes = 0;
        let c = find_majority_colouring(&g, 2, 4, DEFAULT_NODE_BUDGET, &mut nodes)
            .unwrap()
            .unwrap();
        assert!(check_majority(&g, &c, 2).is_empty());
        assert!(nodes > 0);
    }

    #[test]
    fn budget_is_enforced() {
        let g = random_digraph(40, 0.9, 1).unwrap();
        assert!(matches!(
            exact_min_colours(&g, 2, 3, 1000),
            Err(Error::BudgetExceeded(1000))
        ));
        assert!(exact_min_colours(&g, 1, 3, 1000).is_err());
    }
}
