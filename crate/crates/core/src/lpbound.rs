//! Exact bounds on the expected number of bad vertices of low out-degree.
//!
//! Under a uniform random 3-colouring, a vertex of out-degree `i` is bad with
//! probability
//!
//! ```text
//! p_i = sum_{j = ceil((i+1)/2)}^{i} C(i, j) (1/3)^j (2/3)^(i-j)
//! ```
//!
//! In a tournament at most `2i + 1` vertices have out-degree at most `i`, so
//! with `v_i` vertices of out-degree `i` the expected number of bad vertices
//! with degree in `[lo, hi]` is at most the optimum of
//!
//! ```text
//! maximise   sum_i p_i v_i
//! subject to sum_{j=lo}^{i} v_j <= 2i + 1   (lo <= i <= hi),   v >= 0.
//! ```
//!
//! The constraints are capacities on nested prefixes, so filling variables
//! greedily in order of decreasing `p_i` is optimal. Everything here is exact
//! rational arithmetic.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `hi - lo` accepted by [`solve_lp_reference`].
pub const REFERENCE_MAX_SPAN: u32 = 12;

fn pow3(i: u32) -> BigUint {
    BigUint::from(3u32).pow(i)
}

/// Exact probability that a vertex of out-degree `i` is bad.
pub fn bad_probability(i: u32) -> Result<BigRational> {
    if i == 0 {
        return Err(Error::InvalidParameter(
            "out-degree must be at least 1".into(),
        ));
    }
    // numerator over 3^i: sum_{j >= i/2 + 1} C(i, j) 2^(i - j)
    let first = i / 2 + 1;
    let mut binom = BigUint::one();
    let mut numer = BigUint::zero();
    for j in 0..=i {
        if j >= first {
            numer += &binom << (i - j) as usize;
        }
        binom = binom * (i - j) / (j + 1);
    }
    Ok(BigRational::new(numer.into(), pow3(i).into()))
}

/// The prefix-capacity program on out-degrees `lo..=hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance {
    lo: u32,
    hi: u32,
    objective: Vec<BigRational>,
    capacities: Vec<BigInt>,
}

impl LpInstance {
    /// Instance with custom objective coefficients (each in `[0, 1]`) and the
    /// standard capacities `2i + 1`.
    pub fn new(lo: u32, hi: u32, objective: Vec<BigRational>) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidParameter(format!(
                "degree range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        if objective.len() != (hi - lo + 1) as usize {
            return Err(Error::InvalidParameter(format!(
                "{} objective coefficients for {} variables",
                objective.len(),
                hi - lo + 1
            )));
        }
        let one = BigRational::one();
        if let Some(p) = objective.iter().find(|p| p.is_negative() || **p > one) {
            return Err(Error::InvalidParameter(format!(
                "objective coefficient {p} outside [0, 1]"
            )));
        }
        let capacities = (lo..=hi).map(|i| BigInt::from(2 * i as u64 + 1)).collect();
        Ok(Self {
            lo,
            hi,
            objective,
            capacities,
        })
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    pub fn width(&self) -> usize {
        self.objective.len()
    }

    /// `p_i` for `i` in `lo..=hi`.
    pub fn objective(&self) -> &[BigRational] {
        &self.objective
    }

    /// `2i + 1` for `i` in `lo..=hi`.
    pub fn capacities(&self) -> &[BigInt] {
        &self.capacities
    }
}

/// The program with `p_i` as objective.
pub fn build_lp(lo: u32, hi: u32) -> Result<LpInstance> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "degree range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
        )));
    }
    let objective = (lo..=hi).map(bad_probability).collect::<Result<_>>()?;
    LpInstance::new(lo, hi, objective)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    /// `v_i` for `i` in `lo..=hi`.
    pub values: Vec<BigRational>,
    pub optimum: BigRational,
}

impl LpSolution {
    fn from_values(lp: &LpInstance, values: Vec<BigInt>) -> Self {
        let values: Vec<BigRational> = values.into_iter().map(BigRational::from_integer).collect();
        let optimum = values
            .iter()
            .zip(lp.objective())
            .fold(BigRational::zero(), |acc, (v, p)| acc + v * p);
        Self { values, optimum }
    }

    /// Non-negativity and every prefix capacity, checked exactly.
    pub fn is_feasible(&self, lp: &LpInstance) -> bool {
        let mut prefix = BigRational::zero();
        self.values.len() == lp.width()
            && self.values.iter().zip(lp.capacities()).all(|(v, cap)| {
                prefix += v;
                !v.is_negative() && prefix <= BigRational::from_integer(cap.clone())
            })
    }
}

/// Greedy optimum: variables in decreasing `p_i` (ties: lower degree first),
/// each raised to the smallest remaining slack among the prefixes containing it.
pub fn solve_chain_lp(lp: &LpInstance) -> LpSolution {
    let w = lp.width();
    let mut order: Vec<usize> = (0..w).collect();
    order.sort_by(|&a, &b| lp.objective[b].cmp(&lp.objective[a]).then(a.cmp(&b)));

    let mut slack: Vec<BigInt> = lp.capacities.clone();
    let mut values = vec![BigInt::zero(); w];
    for i in order {
        let take = slack[i..].iter().min().unwrap().clone();
        if take.is_zero() {
            continue;
        }
        for s in &mut slack[i..] {
            *s -= &take;
        }
        values[i] = take;
    }
    LpSolution::from_values(lp, values)
}

/// Optimum by enumerating basic solutions: for each index either its prefix
/// capacity is tight or its variable is zero. With strictly increasing
/// capacities every vertex of the feasible region arises this way.
pub fn solve_lp_reference(lp: &LpInstance) -> Result<LpSolution> {
    if lp.hi - lp.lo > REFERENCE_MAX_SPAN {
        return Err(Error::InvalidParameter(format!(
            "reference solver handles spans up to {REFERENCE_MAX_SPAN}, got {}",
            lp.hi - lp.lo
        )));
    }
    let w = lp.width();
    let mut best: Option<(BigRational, Vec<BigInt>)> = None;
    for mask in 0u32..(1 << w) {
        let mut prefix = BigInt::zero();
        let mut values = Vec::with_capacity(w);
        let mut feasible = true;
        for k in 0..w {
            let cap = &lp.capacities[k];
            let v = if mask >> k & 1 == 1 {
                cap - &prefix
            } else {
                BigInt::zero()
            };
            if v.is_negative() || &prefix + &v > *cap {
                feasible = false;
                break;
            }
            prefix += &v;
            values.push(v);
        }
        if !feasible {
            continue;
        }
        let value = values
            .iter()
            .zip(&lp.objective)
            .fold(BigRational::zero(), |acc, (v, p)| {
                acc + BigRational::from_integer(v.clone()) * p
            });
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, values));
        }
    }
    let (_, values) = best.expect("the zero vector is always feasible");
    Ok(LpSolution::from_values(lp, values))
}

/// Optimum of `[lo, hi]` plus a tail bound, with the integer guarantee it
/// implies: some colouring has at most `floor(total)` bad vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub lo: u32,
    pub hi: u32,
    pub optimum: BigRational,
    pub tail: BigRational,
    pub total: BigRational,
    pub guarantee: BigInt,
}

pub fn bound_report(lo: u32, hi: u32, tail: &BigRational) -> Result<BoundReport> {
    if tail.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "tail bound {tail} is negative"
        )));
    }
    let lp = build_lp(lo, hi)?;
    let optimum = solve_chain_lp(&lp).optimum;
    let total = &optimum + tail;
    let guarantee = total.numer().div_floor(total.denom());
    Ok(BoundReport {
        lo,
        hi,
        optimum,
        tail: tail.clone(),
        total,
        guarantee,
    })
}

/// String-valued view of a [`BoundReport`] for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub lo: u32,
    pub hi: u32,
    pub optimum: String,
    pub optimum_decimal: f64,
    pub tail: String,
    pub total: String,
    pub total_decimal: f64,
    pub guarantee: String,
}

impl BoundReport {
    pub fn summary(&self) -> BoundSummary {
        BoundSummary {
            lo: self.lo,
            hi: self.hi,
            optimum: self.optimum.to_string(),
            optimum_decimal: self.optimum.to_f64().unwrap_or(f64::NAN),
            tail: self.tail.to_string(),
            total: self.total.to_string(),
            total_decimal: self.total.to_f64().unwrap_or(f64::NAN),
            guarantee: self.guarantee.to_string(),
        }
    }

    /// `key: value` lines.
    pub fn render_text(&self) -> String {
        let s = self.summary();
        let mut out = String::new();
        writeln!(out, "range: [{}, {}]", s.lo, s.hi).unwrap();
        writeln!(out, "optimum: {}", s.optimum).unwrap();
        writeln!(out, "optimum_decimal: {}", s.optimum_decimal).unwrap();
        writeln!(out, "tail: {}", s.tail).unwrap();
        writeln!(out, "total: {}", s.total).unwrap();
        writeln!(out, "total_decimal: {}", s.total_decimal).unwrap();
        writeln!(out, "guarantee: {}", s.guarantee).unwrap();
        out
    }
}

/// Parses `a/b` or `a` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("expected a rational `a/b`, found {s:?}"));
    let (num, den) = match s.trim().split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}
