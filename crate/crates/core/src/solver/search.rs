//! Potential-minimising local search over list assignments.
//!
//! Given pair weights `b_ij >= 0`, an assignment `f` with `f(i)` in the list
//! `L_i` has potential
//!
//! ```text
//! Phi(f) = sum_r s_r * ( sum_{i != j, f(i) = f(j) = r} b_ij + sum_{f(i) = r} bias_i(r) )
//! ```
//!
//! where `s_r` is a per-colour scale (1 unless capacities are non-uniform) and
//! `bias_i` is a fixed per-vertex, per-colour cost. Moving `i` from `r` to `l`
//! changes `Phi` by `s_l * T_i(l) - s_r * T_i(r)` with
//! `T_i(c) = sum_{j != i, f(j) = c} (b_ij + b_ji) + bias_i(c)`.
//!
//! The search keeps `T_i(c)` for every `c` in `L_i` up to date, so a move
//! costs `O(deg(i) * log m)` and evaluating a vertex costs `O(m)`.

/// Default improvement margin; moves must decrease the potential by more.
pub const DEFAULT_DELTA: f64 = 1e-12;

/// Symmetric pair weights `b_ij + b_ji`, as a sparse part plus a per-vertex
/// uniform part: `b_ij = sparse_ij + beta_i` for every `j != i`.
#[derive(Clone, Debug)]
pub struct PairWeights {
    nbrs: Vec<Vec<(usize, f64)>>,
    beta: Vec<f64>,
}

impl PairWeights {
    /// `entries` are directed weights `(i, j, b_ij)`; `beta` may be empty for
    /// no uniform part.
    pub fn new<I>(n: usize, entries: I, beta: Vec<f64>) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        assert!(beta.is_empty() || beta.len() == n);
        let mut nbrs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in entries {
            assert!(i != j && i < n && j < n, "bad pair weight ({i}, {j})");
            nbrs[i].push((j, w));
            nbrs[j].push((i, w));
        }
        for row in &mut nbrs {
            row.sort_by_key(|&(j, _)| j);
            row.dedup_by(|next, kept| {
                if next.0 == kept.0 {
                    kept.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }
        let beta = if beta.is_empty() { vec![0.0; n] } else { beta };
        Self { nbrs, beta }
    }

    pub fn n(&self) -> usize {
        self.nbrs.len()
    }

    /// `b_ij + b_ji`.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let sparse = self.nbrs[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |k| self.nbrs[i][k].1);
        sparse + self.beta[i] + self.beta[j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// Number of moves applied during the pass.
    Moved(usize),
    FixedPoint,
}

#[derive(Clone, Debug)]
pub struct LocalSearch {
    w: PairWeights,
    palette: Vec<usize>,
    lists: Vec<Vec<usize>>,
    bias: Vec<Vec<f64>>,
    scale: Vec<f64>,
    assign: Vec<usize>,
    table: Vec<Vec<f64>>,
    count: Vec<usize>,
    mass: Vec<f64>,
    potential: f64,
    moves: usize,
    delta: f64,
}

impl LocalSearch {
    /// `lists[i]` holds colour ids; `initial[i]` must be one of them.
    pub fn new(weights: PairWeights, lists: &[Vec<usize>], initial: &[usize]) -> Self {
        let n = weights.n();
        assert_eq!(lists.len(), n);
        assert_eq!(initial.len(), n);
        let mut palette: Vec<usize> = lists.iter().flatten().copied().collect();
        palette.sort_unstable();
        palette.dedup();
        let idx = |c: usize| palette.binary_search(&c).unwrap();
        let dense_lists: Vec<Vec<usize>> = lists
            .iter()
            .map(|l| {
                let mut d: Vec<usize> = l.iter().map(|&c| idx(c)).collect();
                d.sort_unstable();
                d.dedup();
                assert!(!d.is_empty(), "empty list");
                d
            })
            .collect();
        let assign: Vec<usize> = initial
            .iter()
            .zip(&dense_lists)
            .map(|(&c, l)| {
                let d = palette
                    .binary_search(&c)
                    .ok()
                    .filter(|d| l.binary_search(d).is_ok())
                    .unwrap_or_else(|| panic!("initial colour {c} not in list"));
                d
            })
            .collect();
        let mut s = Self {
            w: weights,
            bias: dense_lists.iter().map(|l| vec![0.0; l.len()]).collect(),
            scale: vec![1.0; palette.len()],
            palette,
            lists: dense_lists,
            assign,
            table: Vec::new(),
            count: Vec::new(),
            mass: Vec::new(),
            potential: 0.0,
            moves: 0,
            delta: DEFAULT_DELTA,
        };
        s.rebuild();
        s
    }

    /// Adds a fixed cost `bias` for vertex `v` taking `colour`.
    pub fn with_bias<I>(mut self, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        for (v, colour, b) in entries {
            if let Some(p) = self.position(v, colour) {
                self.bias[v][p] += b;
            }
        }
        self.rebuild();
        self
    }

    /// Multiplies every term of colour class `c` by `scale(c)`.
    pub fn with_colour_scale(mut self, scale: impl Fn(usize) -> f64) -> Self {
        self.scale = self.palette.iter().map(|&c| scale(c)).collect();
        self.rebuild();
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    fn position(&self, v: usize, colour: usize) -> Option<usize> {
        let d = self.palette.binary_search(&colour).ok()?;
        self.lists[v].binary_search(&d).ok()
    }

    fn rebuild(&mut self) {
        let n = self.w.n();
        let k = self.palette.len();
        self.count = vec![0; k];
        self.mass = vec![0.0; k];
        for i in 0..n {
            self.count[self.assign[i]] += 1;
            self.mass[self.assign[i]] += self.w.beta[i];
        }
        self.table = self.bias.clone();
        for i in 0..n {
            for &(j, w) in &self.w.nbrs[i] {
                if let Ok(p) = self.lists[i].binary_search(&self.assign[j]) {
                    self.table[i][p] += w;
                }
            }
        }
        self.potential = self.recompute_potential();
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    pub fn move_count(&self) -> usize {
        self.moves
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn colour_of(&self, v: usize) -> usize {
        self.palette[self.assign[v]]
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.assign.iter().map(|&d| self.palette[d]).collect()
    }

    /// `T_i(c)` at list position `p` of vertex `i`.
    fn attraction(&self, i: usize, p: usize) -> f64 {
        let c = self.lists[i][p];
        let own = usize::from(self.assign[i] == c);
        let beta = self.w.beta[i];
        self.table[i][p] + beta * (self.count[c] - own) as f64 + (self.mass[c] - own as f64 * beta)
    }

    /// Sum of `b_ij + b_ji` over the other members of class `colour`, plus
    /// the vertex's bias for that colour: the unscaled `T_v(colour)`.
    pub fn class_attraction(&self, v: usize, colour: usize) -> Option<f64> {
        self.position(v, colour).map(|p| self.attraction(v, p))
    }

    /// Potential change if `v` switched to `colour`.
    pub fn move_delta(&self, v: usize, colour: usize) -> Option<f64> {
        let p = self.position(v, colour)?;
        let cur = self.lists[v].binary_search(&self.assign[v]).unwrap();
        Some(self.delta_between(v, cur, p))
    }

    fn delta_between(&self, i: usize, cur: usize, p: usize) -> f64 {
        let to = self.scale[self.lists[i][p]] * self.attraction(i, p);
        let from = self.scale[self.lists[i][cur]] * self.attraction(i, cur);
        to - from
    }

    /// Best alternative colour for `i` as `(list position, delta)`; ties go to
    /// the smallest colour id.
    fn best_move(&self, i: usize) -> Option<(usize, f64)> {
        let cur = self.lists[i].binary_search(&self.assign[i]).unwrap();
        let mut best: Option<(usize, f64)> = None;
        for p in 0..self.lists[i].len() {
            if p == cur {
                continue;
            }
            let d = self.delta_between(i, cur, p);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((p, d));
            }
        }
        best
    }

    fn apply(&mut self, i: usize, p: usize, delta: f64) {
        let old = self.assign[i];
        let new = self.lists[i][p];
        for k in 0..self.w.nbrs[i].len() {
            let (j, w) = self.w.nbrs[i][k];
            if let Ok(q) = self.lists[j].binary_search(&old) {
                self.table[j][q] -= w;
            }
            if let Ok(q) = self.lists[j].binary_search(&new) {
                self.table[j][q] += w;
            }
        }
        let beta = self.w.beta[i];
        self.count[old] -= 1;
        self.mass[old] -= beta;
        self.count[new] += 1;
        self.mass[new] += beta;
        self.assign[i] = new;
        self.potential += delta;
        self.moves += 1;
    }

    /// One pass over the vertices in ascending order, applying each vertex's
    /// best move when it lowers the potential by more than `delta`.
    pub fn step(&mut self) -> StepOutcome {
        let mut moved = 0;
        for i in 0..self.n() {
            if let Some((p, d)) = self.best_move(i) {
                if d < -self.delta {
                    self.apply(i, p, d);
                    moved += 1;
                }
            }
        }
        if moved == 0 {
            StepOutcome::FixedPoint
        } else {
            StepOutcome::Moved(moved)
        }
    }

    /// Runs passes until one makes no move; returns the number of moves.
    pub fn run_to_fixed_point(&mut self) -> usize {
        let start = self.moves;
        let budget = (self.potential.max(0.0) / self.delta).ceil();
        while let StepOutcome::Moved(_) = self.step() {
            debug_assert!(
                ((self.moves - start) as f64) <= budget + 1.0,
                "more moves than the potential allows"
            );
        }
        self.moves - start
    }

    /// Applies the best move of `v` regardless of its sign.
    pub fn force_best_move(&mut self, v: usize) -> bool {
        match self.best_move(v) {
            Some((p, d)) => {
                self.apply(v, p, d);
                true
            }
            None => false,
        }
    }

    pub fn is_fixed_point(&self) -> bool {
        (0..self.n()).all(|i| self.best_move(i).is_none_or(|(_, d)| d >= -self.delta))
    }

    /// The potential computed from scratch.
    pub fn recompute_potential(&self) -> f64 {
        let n = self.n();
        let mut count = vec![0usize; self.palette.len()];
        for &a in &self.assign {
            count[a] += 1;
        }
        let mut phi = 0.0;
        for i in 0..n {
            let ci = self.assign[i];
            let s = self.scale[ci];
            for &(j, w) in &self.w.nbrs[i] {
                if j > i && self.assign[j] == ci {
                    phi += s * w;
                }
            }
            let p = self.lists[i].binary_search(&ci).unwrap();
            phi += s * self.bias[i][p];
            phi += s * self.w.beta[i] * (count[ci] - 1) as f64;
        }
        phi
    }
}
