//! Colourings, list assignments and the exact checks on them.
//!
//! All majority conditions are evaluated in integers: a vertex with out-degree
//! `d` and `b` same-coloured out-neighbours meets the `num/den` threshold iff
//! `den * b <= num * d`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{parse_pair, Digraph};

/// A total map from vertices to colour ids below `palette_size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Colouring {
    colours: Vec<usize>,
    palette_size: usize,
}

impl Colouring {
    pub fn new(colours: Vec<usize>, palette_size: usize) -> Result<Self> {
        if let Some((v, &c)) = colours.iter().enumerate().find(|(_, &c)| c >= palette_size) {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} has colour {c}, palette size is {palette_size}"
            )));
        }
        Ok(Self {
            colours,
            palette_size,
        })
    }

    /// Palette size is one more than the largest colour used.
    pub fn from_colours(colours: Vec<usize>) -> Self {
        let palette_size = colours.iter().max().map_or(0, |&c| c + 1);
        Self {
            colours,
            palette_size,
        }
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// Number of colours actually used.
    pub fn colours_used(&self) -> usize {
        let mut seen = self.colours.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// One list of `m` distinct colour ids per vertex, each kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListAssignment {
    lists: Vec<Vec<usize>>,
    m: usize,
}

impl ListAssignment {
    pub fn new(m: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("list size must be positive".into()));
        }
        let mut lists = lists;
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} has {} distinct colours, expected {m}",
                    list.len()
                )));
            }
        }
        Ok(Self { lists, m })
    }

    /// Every vertex gets `{0, ..., m - 1}`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        Self::new(m, vec![(0..m).collect(); n])
    }

    pub fn list(&self, v: usize) -> &[usize] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

/// A vertex with more same-coloured out-neighbours than its threshold allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub vertex: usize,
    pub same_colour_out: usize,
    pub out_degree: usize,
    pub allowed: usize,
}

/// Number of out-neighbours of `v` coloured like `v`.
pub fn monochrome_out_count(g: &Digraph, c: &Colouring, v: usize) -> usize {
    let own = c.colour(v);
    g.out_neighbours(v)
        .iter()
        .filter(|&&w| c.colour(w) == own)
        .count()
}

/// `floor(num * d / den)`.
pub fn allowed_same_colour(d: usize, num: u64, den: u64) -> usize {
    ((num as u128 * d as u128) / den as u128) as usize
}

/// Violations of the `num/den` threshold: vertices whose same-coloured
/// out-neighbour count exceeds `floor(num * d / den)`.
///
/// Panics unless `0 < num <= den`.
pub fn check_fraction(g: &Digraph, c: &Colouring, num: u64, den: u64) -> Vec<Violation> {
    assert!(
        0 < num && num <= den,
        "threshold must satisfy 0 < num <= den"
    );
    assert_eq!(g.n(), c.len(), "colouring does not cover the digraph");
    (0..g.n())
        .filter_map(|v| {
            let d = g.out_degree(v);
            let same = monochrome_out_count(g, c, v);
            let allowed = allowed_same_colour(d, num, den);
            (same > allowed).then_some(Violation {
                vertex: v,
                same_colour_out: same,
                out_degree: d,
                allowed,
            })
        })
        .collect()
}

/// Violations of the `1/k`-majority condition. Panics if `k < 2`.
pub fn check_majority(g: &Digraph, c: &Colouring, k: u64) -> Vec<Violation> {
    assert!(k >= 2, "majority parameter k must be at least 2");
    check_fraction(g, c, 1, k)
}

/// Vertices sharing their colour with more than half of their out-neighbours.
pub fn bad_vertices(g: &Digraph, c: &Colouring) -> Vec<usize> {
    (0..g.n())
        .filter(|&v| 2 * monochrome_out_count(g, c, v) > g.out_degree(v))
        .collect()
}

/// Class index `i` with `2^(i-1) <= d < 2^i`, for `d >= 1`.
pub fn dyadic_index(d: usize) -> u32 {
    debug_assert!(d >= 1);
    usize::BITS - d.leading_zeros()
}

/// Groups the vertices of positive out-degree by dyadic out-degree class.
pub fn dyadic_classes(g: &Digraph) -> BTreeMap<u32, Vec<usize>> {
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        let d = g.out_degree(v);
        if d > 0 {
            classes.entry(dyadic_index(d)).or_default().push(v);
        }
    }
    classes
}

/// Largest size a dyadic class `i` can have in a tournament: `2^(i+1) - 1`.
pub fn dyadic_class_capacity(i: u32) -> u128 {
    (1u128 << (i + 1)) - 1
}

/// Per-class sizes with the tournament capacity and whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicClassReport {
    pub index: u32,
    pub size: usize,
    pub capacity: u128,
    pub within_capacity: bool,
}

pub fn dyadic_report(g: &Digraph) -> Vec<DyadicClassReport> {
    dyadic_classes(g)
        .into_iter()
        .map(|(index, members)| {
            let capacity = dyadic_class_capacity(index);
            DyadicClassReport {
                index,
                size: members.len(),
                capacity,
                within_capacity: members.len() as u128 <= capacity,
            }
        })
        .collect()
}

/// Chernoff upper bound `exp(-d/36)` on the probability that a vertex of
/// out-degree `d` is bad under a uniform random 3-colouring.
pub fn chernoff_bad_bound(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "out-degree must be at least 1".into(),
        ));
    }
    Ok((-(d as f64) / 36.0).exp())
}

/// The two pieces of the first-moment bound on the number of bad vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationBound {
    /// `sum_{i=1}^{10} 2^(i+1) * exp(-2^(i-1) / 36)`.
    pub head: f64,
    /// `sum_{i>=11} 2^(i+1) * 2^-(2i-7) = sum_{i>=11} 2^(8-i)`.
    pub tail: Ratio<u64>,
}

impl ExpectationBound {
    pub fn total(&self) -> f64 {
        self.head + *self.tail.numer() as f64 / *self.tail.denom() as f64
    }
}

/// Last dyadic class summed with the Chernoff bound directly; classes from
/// `HEAD_CLASSES + 1` on use `2^-(2i-7)`.
pub const HEAD_CLASSES: u32 = 10;

pub fn expectation_bound_terms() -> ExpectationBound {
    let head = (1..=HEAD_CLASSES)
        .map(|i| {
            let size = (1u64 << (i + 1)) as f64;
            size * (-((1u64 << (i - 1)) as f64) / 36.0).exp()
        })
        .sum();
    // sum_{i>=a} 2^(8-i) = 2^(9-a)
    let a = HEAD_CLASSES + 1;
    let tail = Ratio::new(1, 1u64 << (a - 9));
    ExpectationBound { head, tail }
}

/// Upper bound on the expected number of bad vertices of a uniformly random
/// 3-colouring of any tournament.
pub fn expected_bad_upper_bound() -> f64 {
    expectation_bound_terms().total()
}

/// True iff every vertex's colour appears in its list.
pub fn respects_lists(c: &Colouring, lists: &ListAssignment) -> bool {
    c.len() == lists.len()
        && c.colours()
            .iter()
            .zip(lists.lists())
            .all(|(col, list)| list.binary_search(col).is_ok())
}

/// One `v c` line per vertex.
pub fn write_colouring(c: &Colouring) -> String {
    let mut out = String::new();
    for (v, col) in c.colours().iter().enumerate() {
        writeln!(out, "{v} {col}").unwrap();
    }
    out
}

/// Parses `v c` lines; every vertex in `0..n` must appear exactly once.
pub fn read_colouring(text: &str) -> Result<Colouring> {
    let mut entries = Vec::new();
    for (line, content) in data_lines(text) {
        let (v, c) = parse_pair(content).ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `v c`, found {content:?}"),
        })?;
        entries.push((line, v, c));
    }
    let n = entries.len();
    let mut colours = vec![None; n];
    for (line, v, c) in entries {
        if v >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex {v} out of range for {n} entries"),
            });
        }
        if colours[v].replace(c).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("vertex {v} coloured twice"),
            });
        }
    }
    Ok(Colouring::from_colours(
        colours.into_iter().map(Option::unwrap).collect(),
    ))
}

/// One `v c1 c2 ... cm` line per vertex.
pub fn write_lists(lists: &ListAssignment) -> String {
    let mut out = String::new();
    for (v, list) in lists.lists().iter().enumerate() {
        write!(out, "{v}").unwrap();
        for c in list {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses `v c1 ... cm` lines; every vertex in `0..n` must appear once and
/// all lists must have the same number of distinct colours.
pub fn read_lists(text: &str) -> Result<ListAssignment> {
    let mut entries = Vec::new();
    for (line, content) in data_lines(text) {
        let nums: Option<Vec<usize>> = content.split_whitespace().map(|t| t.parse().ok()).collect();
        match nums {
            Some(nums) if nums.len() >= 2 => entries.push((line, nums[0], nums[1..].to_vec())),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `v c1 ... cm`, found {content:?}"),
                })
            }
        }
    }
    let n = entries.len();
    let m = entries.first().map_or(1, |(_, _, l)| l.len());
    let mut lists = vec![None; n];
    for (line, v, list) in entries {
        if v >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex {v} out of range for {n} entries"),
            });
        }
        if lists[v].replace(list).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("vertex {v} listed twice"),
            });
        }
    }
    ListAssignment::new(m, lists.into_iter().map(Option::unwrap).collect())
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}
