//! Command-line front end for `majcol`.
//!
//! [`run`] parses arguments, dispatches to a subcommand and returns the
//! process exit code, so tests can drive it without spawning a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Serialize;

use majcol::graph::{
    random_digraph, random_regular_tournament, random_tournament, read_edge_list,
    regular_tournament, write_edge_list,
};
use majcol::lpbound::{bound_report, parse_ratio};
use majcol::solver::{
    exact_min_colours, list_colouring_with_report, partition_colouring_with_report,
    random_three_colouring, uniform_capacities, InitialAssignment, SolveReport, SolverOptions,
    DEFAULT_NODE_BUDGET,
};
use majcol::verify::{
    allowed_same_colour, check_fraction, dyadic_report, monochrome_out_count, read_colouring,
    read_lists, respects_lists, write_colouring, write_lists, DyadicClassReport, Violation,
};
use majcol::{Colouring, Digraph, Error, ListAssignment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "majcol", version, about = "Majority colourings of digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated digraph, or random lists, as a text file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Output file; stdout when absent.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Colour a digraph.
    Colour {
        #[command(subcommand)]
        mode: ColourMode,
    },
    /// Check a colouring against a majority threshold.
    Verify(VerifyArgs),
    /// Uniform random 3-colourings of a tournament.
    Experiment(ExperimentArgs),
    /// Exact chain LP bound on the expected number of bad vertices.
    Lp(LpArgs),
    /// Fewest colours admitting a 1/k-majority colouring, by exhaustive search.
    Exact(ExactArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Rotational regular tournament on an odd number of vertices.
    Regular {
        #[arg(long)]
        q: usize,
    },
    /// Random regular tournament on an odd number of vertices.
    RegularRandom {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Uniformly random tournament.
    Tournament {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random digraph with independent arcs.
    Digraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random lists of `m` colours drawn from `0..palette`.
    Lists {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        palette: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: PathBuf,
    /// Colouring file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
    /// Start from a seeded random assignment instead of each list's first colour.
    #[arg(long)]
    pub init_seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum ColourMode {
    /// 2k colour classes, or classes with explicit capacities summing to 1.
    Partition {
        #[arg(
            long,
            required_unless_present = "capacities",
            conflicts_with = "capacities"
        )]
        k: Option<u64>,
        /// Comma-separated capacities such as `1/4,1/4,1/2`.
        #[arg(long, value_delimiter = ',')]
        capacities: Option<Vec<String>>,
        #[command(flatten)]
        common: SolveArgs,
    },
    /// Colour from per-vertex lists.
    List {
        #[arg(long)]
        lists: PathBuf,
        #[command(flatten)]
        common: SolveArgs,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, required_unless_present_all = ["num", "den"], conflicts_with_all = ["num", "den"])]
    pub k: Option<u64>,
    #[arg(long, requires = "den")]
    pub num: Option<u64>,
    #[arg(long, requires = "num")]
    pub den: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Order of the random tournament; ignored with `--input`.
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Seeds both the tournament and the trials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tournament edge-list file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Add dyadic out-degree class sizes and their capacity check.
    #[arg(long)]
    pub min_outdeg_report: bool,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[arg(long)]
    pub lo: u32,
    #[arg(long)]
    pub hi: u32,
    /// Bound on the classes above `hi`, as `a/b`.
    #[arg(long, default_value = "1/4")]
    pub tail: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: u64,
    /// Largest colour count to try; defaults to 2k.
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub json: bool,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged { .. } | Error::RepairBudgetExhausted { .. } => EXIT_SOLVER,
            Error::BudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Generate { kind, out: path } => cmd_generate(kind, path.as_deref(), out),
        Command::Colour { mode } => cmd_colour(mode, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Experiment(a) => cmd_experiment(a, out),
        Command::Lp(a) => cmd_lp(a, out),
        Command::Exact(a) => cmd_exact(a, out),
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_digraph(path: &Path) -> std::result::Result<Digraph, Failure> {
    read_edge_list(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| usage(e.to_string())),
    }
}

fn print(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(e.to_string()))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn random_lists(n: usize, m: usize, palette: usize, seed: u64) -> majcol::Result<ListAssignment> {
    use rand::seq::index::sample;
    use rand::SeedableRng;
    if m > palette {
        return Err(Error::InvalidParameter(format!(
            "list size {m} exceeds palette size {palette}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lists = (0..n)
        .map(|_| sample(&mut rng, palette, m).into_vec())
        .collect();
    ListAssignment::new(m, lists)
}

fn cmd_generate(kind: GenerateKind, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let text = match kind {
        GenerateKind::Regular { q } => write_edge_list(&regular_tournament(q)?),
        GenerateKind::RegularRandom { q, seed } => {
            write_edge_list(&random_regular_tournament(q, seed)?)
        }
        GenerateKind::Tournament { n, seed } => write_edge_list(&random_tournament(n, seed)),
        GenerateKind::Digraph { n, p, seed } => write_edge_list(&random_digraph(n, p, seed)?),
        GenerateKind::Lists {
            n,
            m,
            palette,
            seed,
        } => write_lists(&random_lists(n, m, palette, seed)?),
    };
    emit(&text, path, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ColourSummary {
    vertices: usize,
    palette_size: usize,
    colours_used: usize,
    /// Threshold description, e.g. `1/2` or `capacities`.
    guarantee: String,
    max_monochrome_fraction: f64,
    violations: usize,
    verdict: &'static str,
    solver: SolveReport,
    colours: Vec<usize>,
}

fn max_monochrome_fraction(g: &Digraph, c: &Colouring) -> f64 {
    (0..g.n())
        .filter(|&v| g.out_degree(v) > 0)
        .map(|v| monochrome_out_count(g, c, v) as f64 / g.out_degree(v) as f64)
        .fold(0.0, f64::max)
}

/// Vertices whose class `r` holds more than `floor(2 c_r d+)` out-neighbours.
fn capacity_violations(g: &Digraph, c: &Colouring, caps: &[Ratio<u64>]) -> Vec<Violation> {
    (0..g.n())
        .filter_map(|v| {
            let cap = caps[c.colour(v)];
            let d = g.out_degree(v);
            let allowed = allowed_same_colour(d, 2 * cap.numer(), *cap.denom());
            let same = monochrome_out_count(g, c, v);
            (same > allowed).then_some(Violation {
                vertex: v,
                same_colour_out: same,
                out_degree: d,
                allowed,
            })
        })
        .collect()
}

fn cmd_colour(mode: ColourMode, out: &mut dyn Write) -> CmdResult {
    let (common, g, colouring, report, violations, guarantee) = match mode {
        ColourMode::Partition {
            k,
            capacities,
            common,
        } => {
            let g = read_digraph(&common.input)?;
            let opts = solver_options(&common);
            let (caps, guarantee) = match (k, capacities) {
                (Some(k), _) => {
                    if k < 2 {
                        return Err(usage(format!("k must be at least 2, got {k}")));
                    }
                    (uniform_capacities(2 * k), format!("1/{k}"))
                }
                (None, Some(list)) => {
                    let caps = list
                        .iter()
                        .map(|s| {
                            s.trim()
                                .parse::<Ratio<u64>>()
                                .map_err(|_| usage(format!("invalid capacity {s:?}")))
                        })
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    (caps, "capacities".to_string())
                }
                (None, None) => return Err(usage("one of --k or --capacities is required")),
            };
            let (c, report) = partition_colouring_with_report(&g, &caps, &opts)?;
            let violations = capacity_violations(&g, &c, &caps);
            (common, g, c, report, violations, guarantee)
        }
        ColourMode::List { lists, common } => {
            let g = read_digraph(&common.input)?;
            let lists = read_lists(&read_file(&lists)?)
                .map_err(|e| usage(format!("{}: {e}", lists.display())))?;
            let opts = solver_options(&common);
            let (c, report) = list_colouring_with_report(&g, &lists, &opts)?;
            let m = lists.m() as u64;
            let mut violations = check_fraction(&g, &c, 2.min(m), m);
            if !respects_lists(&c, &lists) {
                return Err(Failure {
                    code: EXIT_SOLVER,
                    message: "solver output leaves the lists".into(),
                });
            }
            violations.sort_by_key(|v| v.vertex);
            (
                common,
                g,
                c,
                report,
                violations,
                format!("{}/{m}", 2.min(m)),
            )
        }
    };
    let verdict = if violations.is_empty() {
        "PASS"
    } else {
        "FAIL"
    };
    let summary = ColourSummary {
        vertices: g.n(),
        palette_size: colouring.palette_size(),
        colours_used: colouring.colours_used(),
        guarantee,
        max_monochrome_fraction: max_monochrome_fraction(&g, &colouring),
        violations: violations.len(),
        verdict,
        solver: report,
        colours: colouring.colours().to_vec(),
    };
    if let Some(path) = &common.out {
        emit(&write_colouring(&colouring), Some(path), out)?;
    }
    if common.json {
        print(out, &json(&summary))?;
    } else {
        if common.out.is_none() {
            print(out, &write_colouring(&colouring))?;
        }
        // `#` lines keep stdout a valid colouring file.
        let text = format!(
            "# vertices: {}\n# palette_size: {}\n# colours_used: {}\n# guarantee: {}\n\
             # max_monochrome_fraction: {}\n# verdict: {}\n",
            summary.vertices,
            summary.palette_size,
            summary.colours_used,
            summary.guarantee,
            summary.max_monochrome_fraction,
            summary.verdict
        );
        print(out, &text)?;
    }
    Ok(if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn solver_options(common: &SolveArgs) -> SolverOptions {
    SolverOptions {
        initial: match common.init_seed {
            Some(s) => InitialAssignment::Random(s),
            None => InitialAssignment::FirstOfList,
        },
        ..SolverOptions::default()
    }
}

#[derive(Serialize)]
struct VerifyReport {
    verdict: &'static str,
    threshold: String,
    violations: Vec<Violation>,
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let g = read_digraph(&a.input)?;
    let c = read_colouring(&read_file(&a.colouring)?)
        .map_err(|e| usage(format!("{}: {e}", a.colouring.display())))?;
    if c.len() != g.n() {
        return Err(usage(format!(
            "colouring has {} vertices, digraph has {}",
            c.len(),
            g.n()
        )));
    }
    let (num, den) = match (a.k, a.num, a.den) {
        (Some(k), _, _) if k >= 2 => (1, k),
        (Some(k), _, _) => return Err(usage(format!("k must be at least 2, got {k}"))),
        (None, Some(num), Some(den)) if 0 < num && num <= den => (num, den),
        (None, Some(num), Some(den)) => {
            return Err(usage(format!("threshold {num}/{den} must lie in (0, 1]")))
        }
        _ => return Err(usage("give --k or both --num and --den")),
    };
    let violations = check_fraction(&g, &c, num, den);
    let report = VerifyReport {
        verdict: if violations.is_empty() {
            "PASS"
        } else {
            "FAIL"
        },
        threshold: format!("{num}/{den}"),
        violations,
    };
    if a.json {
        print(out, &json(&report))?;
    } else {
        let mut text = report.verdict.to_string();
        if !report.violations.is_empty() {
            text += &format!(": {} violating vertices", report.violations.len());
        }
        text.push('\n');
        for v in &report.violations {
            text += &format!(
                "vertex {}: {} same-colour out-neighbours of {}, allowed {}\n",
                v.vertex, v.same_colour_out, v.out_degree, v.allowed
            );
        }
        print(out, &text)?;
    }
    Ok(if report.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

#[derive(Serialize)]
struct ExperimentOutput {
    #[serde(flatten)]
    report: majcol::solver::ExperimentReport,
    min_out_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dyadic_classes: Option<Vec<DyadicClassReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dyadic_within_capacity: Option<bool>,
}

fn cmd_experiment(a: ExperimentArgs, out: &mut dyn Write) -> CmdResult {
    let t = match (&a.input, a.n) {
        (Some(path), _) => read_digraph(path)?,
        (None, Some(n)) => random_tournament(n, a.seed),
        (None, None) => return Err(usage("give --n or --input")),
    };
    let report = random_three_colouring(&t, a.trials, a.seed)?;
    let dyadic = a.min_outdeg_report.then(|| dyadic_report(&t));
    let output = ExperimentOutput {
        report,
        min_out_degree: t.min_out_degree(),
        dyadic_within_capacity: dyadic.as_ref().map(|d| d.iter().all(|c| c.within_capacity)),
        dyadic_classes: dyadic,
    };
    print(out, &json(&output))?;
    Ok(EXIT_OK)
}

fn cmd_lp(a: LpArgs, out: &mut dyn Write) -> CmdResult {
    let tail = parse_ratio(&a.tail)?;
    let report = bound_report(a.lo, a.hi, &tail)?;
    if a.json {
        print(out, &json(&report.summary()))?;
    } else {
        print(out, &report.render_text())?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ExactOutput {
    k: u64,
    m_max: usize,
    /// `null` when no `m <= m_max` works.
    min_colours: Option<usize>,
}

fn cmd_exact(a: ExactArgs, out: &mut dyn Write) -> CmdResult {
    let g = read_digraph(&a.input)?;
    if a.k < 2 {
        return Err(usage(format!("k must be at least 2, got {}", a.k)));
    }
    let m_max = a.m_max.unwrap_or(2 * a.k as usize);
    let found = exact_min_colours(&g, a.k, m_max, a.budget)?;
    if a.json {
        print(
            out,
            &json(&ExactOutput {
                k: a.k,
                m_max,
                min_colours: found,
            }),
        )?;
    } else {
        match found {
            Some(m) => print(out, &format!("{m}\n"))?,
            None => print(out, "none\n")?,
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_exit_codes() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::BudgetExceeded(5)), EXIT_BUDGET);
        assert_eq!(
            code(Error::RepairBudgetExhausted { violations: vec![] }),
            EXIT_SOLVER
        );
        let best = majcol::spectral::PerronWeights {
            u: vec![0.5, 0.5],
            residual: 1.0,
            iterations: 3,
        };
        let e = Error::NotConverged {
            iterations: 3,
            residual: 1.0,
            best: Box::new(best),
        };
        assert_eq!(code(e), EXIT_SOLVER);
        assert_eq!(code(Error::EvenOrder(4)), EXIT_USAGE);
        assert_eq!(code(Error::NotATournament), EXIT_USAGE);
    }

    #[test]
    fn random_lists_are_valid_and_seeded() {
        let a = random_lists(20, 3, 9, 4).unwrap();
        assert_eq!(a, random_lists(20, 3, 9, 4).unwrap());
        assert!(a
            .lists()
            .iter()
            .all(|l| l.len() == 3 && l.iter().all(|&c| c < 9)));
        assert!(random_lists(2, 4, 3, 0).is_err());
    }

    #[test]
    fn capacity_check_counts_per_class() {
        let g = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = Colouring::new(vec![0, 0, 1], 2).unwrap();
        let caps = [Ratio::new(1, 2), Ratio::new(1, 2)];
        // floor(2 * 1/2 * 1) = 1, so nothing violates.
        assert!(capacity_violations(&g, &c, &caps).is_empty());
        let caps = [Ratio::new(1, 4), Ratio::new(3, 4)];
        let v = capacity_violations(&g, &c, &caps);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].vertex, 0);
    }
}
