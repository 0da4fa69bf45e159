//! Partition and list colouring through Perron-weighted local search.
//!
//! For a digraph with matrix `a_ij = 1 / d+(i)` on arcs and a positive left
//! fixed vector `u`, set `b_ij = u_i a_ij`. At any assignment from which no
//! single recolouring lowers `sum_r sum_{i,j in class r} b_ij`, every vertex
//! `i` of class `r` satisfies
//! `m * sum_{j in r} (b_ij + b_ji) <= sum_j (b_ij + b_ji) = 2 u_i`,
//! hence `sum_{j in r} a_ij <= 2 / m`.
//!
//! The search runs one strongly connected component at a time, sinks of the
//! condensation first. Inside a component `C` every out-arc leaves either to
//! `C` or to vertices already coloured; the latter are folded into a virtual
//! index `z` (row `z` spreads uniformly over `C`) so the component matrix is
//! row-stochastic and irreducible. It is padded with a small uniform mix and
//! its Perron vector `u` weights the search. Arcs into coloured vertices
//! become a fixed per-colour bias `u_i (1 - lambda_i) a_ix`, which keeps the
//! inequality above intact because `b_iz` bounds their total.
//!
//! Floating point can leave a fixed point a hair off the exact inequality,
//! so each component is checked in integers; violating vertices are forced
//! to their best move and the search resumes, within a budget of
//! `repair_factor * |C|` forced moves.

use num_rational::Ratio;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::search::{LocalSearch, PairWeights, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::spectral::{
    default_max_iter, perron_left_vector, RowStochasticMatrix, DEFAULT_EPSILON, DEFAULT_TOLERANCE,
};
use crate::verify::{allowed_same_colour, Colouring, ListAssignment, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialAssignment {
    /// Every vertex starts on the smallest colour of its list.
    FirstOfList,
    /// Uniform random list entry per vertex, ChaCha8 seeded.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub epsilon: f64,
    pub tolerance: f64,
    /// `None` uses [`default_max_iter`] for each component.
    pub max_iter: Option<usize>,
    pub delta: f64,
    pub repair_factor: usize,
    pub initial: InitialAssignment,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            tolerance: DEFAULT_TOLERANCE,
            max_iter: None,
            delta: DEFAULT_DELTA,
            repair_factor: 10,
            initial: InitialAssignment::FirstOfList,
        }
    }
}

/// Counters from one solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveReport {
    pub components: usize,
    pub searched_components: usize,
    pub moves: usize,
    pub forced_moves: usize,
    /// Largest Perron residual over the searched components.
    pub max_residual: f64,
    /// Components whose power iteration stopped at `max_iter`.
    pub unconverged_components: usize,
}

pub fn uniform_capacities(t: u64) -> Vec<Ratio<u64>> {
    (0..t).map(|_| Ratio::new(1, t)).collect()
}

/// Colours `g` with `t = capacities.len()` colours so that every vertex `i`
/// of colour `r` has at most `floor(2 c_r d+(i))` out-neighbours of colour
/// `r`. With uniform capacities `1/(2k)` this is a `1/k`-majority colouring.
pub fn partition_colouring(
    g: &Digraph,
    capacities: &[Ratio<u64>],
    opts: &SolverOptions,
) -> Result<Colouring> {
    partition_colouring_with_report(g, capacities, opts).map(|(c, _)| c)
}

pub fn partition_colouring_with_report(
    g: &Digraph,
    capacities: &[Ratio<u64>],
    opts: &SolverOptions,
) -> Result<(Colouring, SolveReport)> {
    let t = capacities.len();
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two colour classes, got {t}"
        )));
    }
    if capacities.iter().any(|c| *c.numer() == 0) {
        return Err(Error::InvalidParameter(
            "capacities must be positive".into(),
        ));
    }
    let total = capacities
        .iter()
        .try_fold(Ratio::new(0u128, 1), |acc, c| {
            Some(acc + Ratio::new(*c.numer() as u128, *c.denom() as u128))
        })
        .unwrap();
    if total != Ratio::new(1, 1) {
        return Err(Error::InvalidParameter(format!(
            "capacities sum to {total}, expected 1"
        )));
    }
    let lists = vec![(0..t).collect::<Vec<_>>(); g.n()];
    let scale = |c: usize| *capacities[c].denom() as f64 / *capacities[c].numer() as f64;
    let allowed = |v: usize, c: usize| {
        let cap = capacities[c];
        allowed_same_colour(g.out_degree(v), 2 * *cap.numer(), *cap.denom())
    };
    let (colours, report) = solve(g, &lists, &scale, &allowed, opts)?;
    Ok((Colouring::new(colours, t)?, report))
}

/// A `1/k`-majority colouring with `2k` colours.
pub fn majority_colouring(g: &Digraph, k: u64, opts: &SolverOptions) -> Result<Colouring> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    partition_colouring(g, &uniform_capacities(2 * k), opts)
}

/// Colours every vertex from its list so that it shares its colour with at
/// most `floor(2 d+(v) / m)` out-neighbours.
pub fn list_colouring(
    g: &Digraph,
    lists: &ListAssignment,
    opts: &SolverOptions,
) -> Result<Colouring> {
    list_colouring_with_report(g, lists, opts).map(|(c, _)| c)
}

pub fn list_colouring_with_report(
    g: &Digraph,
    lists: &ListAssignment,
    opts: &SolverOptions,
) -> Result<(Colouring, SolveReport)> {
    if lists.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "{} lists for {} vertices",
            lists.len(),
            g.n()
        )));
    }
    let m = lists.m() as u64;
    let allowed = |v: usize, _c: usize| allowed_same_colour(g.out_degree(v), 2, m);
    let (colours, report) = solve(g, lists.lists(), &|_| 1.0, &allowed, opts)?;
    Ok((Colouring::from_colours(colours), report))
}

fn same_colour_out(g: &Digraph, colours: &[usize], v: usize) -> usize {
    g.out_neighbours(v)
        .iter()
        .filter(|&&w| colours[w] == colours[v])
        .count()
}

fn violations<'a>(
    g: &'a Digraph,
    colours: &'a [usize],
    vertices: &'a [usize],
    allowed: &'a dyn Fn(usize, usize) -> usize,
) -> impl Iterator<Item = Violation> + 'a {
    vertices.iter().filter_map(move |&v| {
        let same = same_colour_out(g, colours, v);
        let limit = allowed(v, colours[v]);
        (same > limit).then_some(Violation {
            vertex: v,
            same_colour_out: same,
            out_degree: g.out_degree(v),
            allowed: limit,
        })
    })
}

fn initial_colours(lists: &[Vec<usize>], init: InitialAssignment) -> Vec<usize> {
    match init {
        InitialAssignment::FirstOfList => lists.iter().map(|l| l[0]).collect(),
        InitialAssignment::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            lists
                .iter()
                .map(|l| l[rng.random_range(0..l.len())])
                .collect()
        }
    }
}

/// Strongly connected components, each sorted, sinks of the condensation first.
fn components_sinks_first(g: &Digraph) -> Vec<Vec<usize>> {
    let mut pg = DiGraph::<(), ()>::with_capacity(g.n(), g.arc_count());
    for _ in 0..g.n() {
        pg.add_node(());
    }
    for (u, v) in g.arcs() {
        pg.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    tarjan_scc(&pg)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

fn solve(
    g: &Digraph,
    lists: &[Vec<usize>],
    scale: &dyn Fn(usize) -> f64,
    allowed: &dyn Fn(usize, usize) -> usize,
    opts: &SolverOptions,
) -> Result<(Vec<usize>, SolveReport)> {
    let n = g.n();
    let mut sorted_lists = lists.to_vec();
    for l in &mut sorted_lists {
        l.sort_unstable();
        l.dedup();
        if l.is_empty() {
            return Err(Error::InvalidParameter("empty colour list".into()));
        }
    }
    let lists = &sorted_lists;
    let mut colours = initial_colours(lists, opts.initial);
    let components = components_sinks_first(g);
    let mut report = SolveReport {
        components: components.len(),
        ..SolveReport::default()
    };

    // component index of every vertex, assigned in processing order
    let mut comp_of = vec![usize::MAX; n];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }

    for (ci, comp) in components.iter().enumerate() {
        if let [v] = comp[..] {
            // Every out-neighbour is already coloured.
            if g.out_degree(v) > 0 {
                colours[v] = *lists[v]
                    .iter()
                    .min_by(|&&a, &&b| {
                        let ta = scale(a) * count_colour(g, &colours, v, a) as f64;
                        let tb = scale(b) * count_colour(g, &colours, v, b) as f64;
                        ta.total_cmp(&tb)
                    })
                    .unwrap();
            }
            continue;
        }
        report.searched_components += 1;
        search_component(
            g,
            comp,
            ci,
            &comp_of,
            lists,
            scale,
            allowed,
            opts,
            &mut colours,
            &mut report,
        )?;
    }

    let all: Vec<usize> = (0..n).collect();
    let remaining: Vec<Violation> = violations(g, &colours, &all, allowed).collect();
    if !remaining.is_empty() {
        return Err(Error::RepairBudgetExhausted {
            violations: remaining,
        });
    }
    Ok((colours, report))
}

fn count_colour(g: &Digraph, colours: &[usize], v: usize, c: usize) -> usize {
    g.out_neighbours(v)
        .iter()
        .filter(|&&w| colours[w] == c)
        .count()
}

#[allow(clippy::too_many_arguments)]
fn search_component(
    g: &Digraph,
    comp: &[usize],
    ci: usize,
    comp_of: &[usize],
    lists: &[Vec<usize>],
    scale: &dyn Fn(usize) -> f64,
    allowed: &dyn Fn(usize, usize) -> usize,
    opts: &SolverOptions,
    colours: &mut [usize],
    report: &mut SolveReport,
) -> Result<()> {
    let size = comp.len();
    let local = |v: usize| comp.binary_search(&v).unwrap();
    let closed = comp
        .iter()
        .all(|&v| g.out_neighbours(v).iter().all(|&w| comp_of[w] == ci));
    let dim = size + usize::from(!closed);
    let z = size;

    let mut rows: Vec<Vec<(usize, f64)>> = comp
        .iter()
        .map(|&v| {
            let d = g.out_degree(v) as f64;
            let mut row: Vec<(usize, f64)> = g
                .out_neighbours(v)
                .iter()
                .filter(|&&w| comp_of[w] == ci)
                .map(|&w| (local(w), 1.0 / d))
                .collect();
            let inside = row.len();
            if inside < g.out_degree(v) {
                row.push((z, (g.out_degree(v) - inside) as f64 / d));
            }
            row
        })
        .collect();
    if !closed {
        rows.push((0..size).map(|j| (j, 1.0 / size as f64)).collect());
    }
    let padded = RowStochasticMatrix::from_rows(rows)?
        .pad_and_perturb(opts.epsilon.min(0.5 / dim as f64))?;
    let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(dim));
    let weights = match perron_left_vector(&padded, opts.tolerance, max_iter) {
        Ok(w) => w,
        Err(Error::NotConverged { best, .. }) => {
            report.unconverged_components += 1;
            *best
        }
        Err(e) => return Err(e),
    };
    report.max_residual = report.max_residual.max(weights.residual);
    let u = &weights.u;

    let uniform = 1.0 / (dim - 1) as f64;
    let keep = |i: usize| u[i] * (1.0 - padded.mixing(i));
    let mut pairs = Vec::new();
    let mut bias = Vec::new();
    for (i, &v) in comp.iter().enumerate() {
        let a = 1.0 / g.out_degree(v) as f64;
        for &w in g.out_neighbours(v) {
            if comp_of[w] == ci {
                pairs.push((i, local(w), keep(i) * a));
            } else {
                bias.push((i, colours[w], keep(i) * a));
            }
        }
    }
    let beta: Vec<f64> = (0..size)
        .map(|i| u[i] * padded.mixing(i) * uniform)
        .collect();

    let comp_lists: Vec<Vec<usize>> = comp.iter().map(|&v| lists[v].clone()).collect();
    let initial: Vec<usize> = comp.iter().map(|&v| colours[v]).collect();
    let mut search = LocalSearch::new(PairWeights::new(size, pairs, beta), &comp_lists, &initial)
        .with_bias(bias)
        .with_colour_scale(scale)
        .with_delta(opts.delta);

    search.run_to_fixed_point();
    let budget = opts.repair_factor * size;
    let mut forced = 0;
    loop {
        for (i, &v) in comp.iter().enumerate() {
            colours[v] = search.colour_of(i);
        }
        let bad: Vec<Violation> = violations(g, colours, comp, allowed).collect();
        if bad.is_empty() {
            break;
        }
        if forced + bad.len() > budget {
            return Err(Error::RepairBudgetExhausted { violations: bad });
        }
        for viol in &bad {
            search.force_best_move(local(viol.vertex));
            forced += 1;
        }
        search.run_to_fixed_point();
    }
    debug_assert!(
        (search.potential() - search.recompute_potential()).abs() <= 1e-9,
        "tracked potential drifted"
    );
    report.moves += search.move_count();
    report.forced_moves += forced;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_digraph, random_tournament, regular_tournament};
    use crate::verify::{check_fraction, check_majority, respects_lists};

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn three_cycle_four_colours() {
        let g = regular_tournament(3).unwrap();
        let c = partition_colouring(&g, &uniform_capacities(4), &opts()).unwrap();
        assert_eq!(c.palette_size(), 4);
        assert!(check_majority(&g, &c, 2).is_empty());
    }

    #[test]
    fn arcless_digraph() {
        let g = Digraph::new(5, []).unwrap();
        let c = partition_colouring(&g, &uniform_capacities(3), &opts()).unwrap();
        assert_eq!(c.colours(), &[0, 0, 0, 0, 0]);
    }

    #[test]
    fn single_vertex_single_colour_list() {
        let g = Digraph::new(1, []).unwrap();
        let lists = ListAssignment::new(1, vec![vec![7]]).unwrap();
        let c = list_colouring(&g, &lists, &opts()).unwrap();
        assert_eq!(c.colours(), &[7]);
    }

    #[test]
    fn parameter_validation() {
        let g = regular_tournament(3).unwrap();
        assert!(partition_colouring(&g, &uniform_capacities(1), &opts()).is_err());
        let bad = [Ratio::new(1, 2), Ratio::new(1, 3)];
        assert!(partition_colouring(&g, &bad, &opts()).is_err());
        let zero = [Ratio::new(0, 1), Ratio::new(1, 1)];
        assert!(partition_colouring(&g, &zero, &opts()).is_err());
        assert!(majority_colouring(&g, 1, &opts()).is_err());
        let lists = ListAssignment::uniform(2, 3).unwrap();
        assert!(list_colouring(&g, &lists, &opts()).is_err());
    }

    #[test]
    fn majority_on_random_digraphs() {
        for seed in 0..40u64 {
            let n = 1 + (seed as usize * 37) % 120;
            let p = [0.05, 0.3, 0.9][seed as usize % 3];
            let g = random_digraph(n, p, seed).unwrap();
            for k in 2..=4 {
                let c = majority_colouring(&g, k, &opts()).unwrap();
                assert!(c.palette_size() <= 2 * k as usize);
                assert!(check_majority(&g, &c, k).is_empty(), "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn list_colouring_respects_lists_and_threshold() {
        for seed in 0..40u64 {
            let n = 2 + (seed as usize * 29) % 100;
            let g = random_digraph(n, [0.05, 0.3, 0.9][seed as usize % 3], seed).unwrap();
            for m in 2..=5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 10 + m);
                let lists: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        rand::seq::index::sample(&mut rng, 3 * m as usize, m as usize).into_vec()
                    })
                    .collect();
                let lists = ListAssignment::new(m as usize, lists).unwrap();
                let c = list_colouring(&g, &lists, &opts()).unwrap();
                assert!(respects_lists(&c, &lists));
                assert!(check_fraction(&g, &c, 2, m).is_empty(), "seed {seed} m {m}");
            }
        }
    }

    #[test]
    fn uniform_lists_match_partition_bound() {
        let g = random_tournament(60, 4);
        for t in [2u64, 3, 4, 5] {
            let lists = ListAssignment::uniform(60, t as usize).unwrap();
            let by_list = list_colouring(&g, &lists, &opts()).unwrap();
            let by_part = partition_colouring(&g, &uniform_capacities(t), &opts()).unwrap();
            assert!(check_fraction(&g, &by_list, 2, t).is_empty());
            assert!(check_fraction(&g, &by_part, 2, t).is_empty());
        }
    }

    #[test]
    fn non_uniform_capacities() {
        let caps = [
            Ratio::new(1, 2),
            Ratio::new(1, 4),
            Ratio::new(1, 8),
            Ratio::new(1, 8),
        ];
        for seed in 0..10u64 {
            let g = random_digraph(80, 0.2, seed).unwrap();
            let c = partition_colouring(&g, &caps, &opts()).unwrap();
            for v in 0..g.n() {
                let cap = caps[c.colour(v)];
                let same = same_colour_out(&g, c.colours(), v);
                assert!(
                    same * *cap.denom() as usize <= 2 * *cap.numer() as usize * g.out_degree(v)
                );
            }
        }
    }

    #[test]
    fn reducible_digraphs() {
        // two closed components that are not sinks, a periodic one, and
        // transient vertices feeding them unequally
        let g = Digraph::new(
            9,
            [
                (0, 1),
                (1, 0),
                (2, 3),
                (3, 4),
                (4, 2),
                (3, 2),
                (5, 0),
                (5, 2),
                (6, 5),
                (7, 6),
                (7, 8),
                (8, 7),
            ],
        )
        .unwrap();
        for k in 2..=3 {
            let c = majority_colouring(&g, k, &opts()).unwrap();
            assert!(check_majority(&g, &c, k).is_empty());
        }
        let (_, report) =
            partition_colouring_with_report(&g, &uniform_capacities(4), &opts()).unwrap();
        assert_eq!(report.unconverged_components, 0);
        assert!(report.max_residual <= DEFAULT_TOLERANCE);
    }

    #[test]
    fn random_initial_assignment_is_deterministic() {
        let g = random_digraph(50, 0.2, 1).unwrap();
        let o = SolverOptions {
            initial: InitialAssignment::Random(5),
            ..SolverOptions::default()
        };
        let a = majority_colouring(&g, 2, &o).unwrap();
        assert_eq!(a, majority_colouring(&g, 2, &o).unwrap());
        assert!(check_majority(&g, &a, 2).is_empty());
    }

    #[test]
    fn components_come_sinks_first() {
        let g = Digraph::new(4, [(0, 1), (1, 0), (1, 2), (2, 3)]).unwrap();
        assert_eq!(
            components_sinks_first(&g),
            vec![vec![3], vec![2], vec![0, 1]]
        );
    }
}
