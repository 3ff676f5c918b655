//! Command-line front end: parse equation files and JSON artifacts, run the
//! solve/basis/band/graph/diagram commands, and emit JSON, DOT, and trace
//! logs.
//!
//! Exit codes: 0 success, 2 validation failure, 3 budget exceeded,
//! 4 coverage failure (uncovered solutions or a non-separable marking).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wordeq::diagrams::{
    self, decomposition_to_dot, diagram_check, family_cover_check, separability_check,
    solution_graph_to_dot, substitute, DiagramError, GraphStatus, LabelAssignment,
};
use wordeq::jsonio;
use wordeq::lattice::{positive_basis, positive_basis_family};
use wordeq::oracle::{enumerate_exhaustive, enumerate_levi, SearchBudget};
use wordeq::parse::parse_equations;
use wordeq::pseudogroup::{
    associated_graph, coverage_profile, detect_stationary, extract_generators, orbit_closure,
    run_machine, total_base_length,
};
use wordeq::rng::SplitMix64;
use wordeq::systems::is_solution;
use wordeq::words::PositiveWord;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_COVERAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wordeq",
    about = "Word-equation systems over free semigroups: oracles, positive bases, band machines, and diagram verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Exhaustive,
    Levi,
    Both,
}

#[derive(Args)]
struct BudgetArgs {
    /// Per-variable image length bound
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// Cap on the number of solutions kept
    #[arg(long, default_value_t = 1_000_000)]
    max_solutions: usize,
    /// Cap on search nodes
    #[arg(long, default_value_t = 50_000_000)]
    max_nodes: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget, String> {
        SearchBudget::new(self.max_len, self.max_solutions, self.max_nodes)
            .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all solutions of an equation system at bounded length
    Solve {
        /// Equation file (`alphabet:` header optional, one `LHS = RHS` per line)
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Enumeration strategy; `both` cross-checks the two
        #[arg(long, value_enum, default_value_t = Strategy::Both)]
        strategy: Strategy,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Compute positive bases for integer lattice instances
    Basis {
        /// Instance files `{rank, generators, lengths}`; several files run
        /// the per-functional family driver over a shared generator set
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the band machine and print the trace
    BandRun {
        file: PathBuf,
        /// Step budget
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Validate a band system and report its diagnostics
    BandCheck {
        file: PathBuf,
        /// Seed for the orbit sample diagnostic
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        /// Periodicity bound parameter for the weight classification
        #[arg(long, default_value_t = 4)]
        c_p: u32,
        #[arg(long)]
        json: bool,
    },
    /// Apply a label assignment to a solution graph
    GraphSubst {
        /// Equation file for the ambient system
        system: PathBuf,
        /// Solution graph JSON
        graph: PathBuf,
        /// Label assignment JSON `{"label": "word", ...}`
        #[arg(long)]
        assign: PathBuf,
        /// Write the graph as DOT to this path
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check one resolution's coverage of the oracle solutions
    GraphCover {
        /// Diagram JSON (`.mrd`)
        file: PathBuf,
        /// Resolution name inside the diagram
        #[arg(long)]
        resolution: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 4)]
        twist_depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check that a diagram covers every oracle solution
    DiagramCheck {
        /// Diagram JSON (`.mrd`)
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 4)]
        twist_depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Try to mark a substitution through a separable decomposition
    Separability {
        /// Equation file for the ambient system
        system: PathBuf,
        /// Decomposition JSON
        decomposition: PathBuf,
        /// Substitution JSON `{"X": "word", ...}`
        #[arg(long)]
        subst: PathBuf,
        /// Length bound for the exhaustive marker placement search
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Write the decomposition as DOT to this path
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    // die quietly on a closed pipe instead of panicking mid-print
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<ExitCode, (String, u8)>;

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Solve {
            file,
            budget,
            strategy,
            json,
        } => solve(file, budget, strategy, json),
        Command::Basis { files, json } => basis(files, json),
        Command::BandRun { file, steps, json } => band_run(file, steps, json),
        Command::BandCheck {
            file,
            seed,
            c_p,
            json,
        } => band_check(file, seed, c_p, json),
        Command::GraphSubst {
            system,
            graph,
            assign,
            dot,
            json,
        } => graph_subst(system, graph, assign, dot, json),
        Command::GraphCover {
            file,
            resolution,
            budget,
            twist_depth,
            json,
        } => graph_cover(file, resolution, budget, twist_depth, json),
        Command::DiagramCheck {
            file,
            budget,
            twist_depth,
            json,
        } => diagram_check_cmd(file, budget, twist_depth, json),
        Command::Separability {
            system,
            decomposition,
            subst,
            bound,
            dot,
            json,
        } => separability(system, decomposition, subst, bound, dot, json),
    }
}

fn validation<E: std::fmt::Display>(e: E) -> (String, u8) {
    (e.to_string(), EXIT_VALIDATION)
}

fn solve(file: PathBuf, budget: BudgetArgs, strategy: Strategy, json: bool) -> CmdResult {
    let text = read(&file).map_err(|e| (e, EXIT_VALIDATION))?;
    let sys = parse_equations(&text).map_err(validation)?;
    let b = budget.budget().map_err(|e| (e, EXIT_VALIDATION))?;
    let run_one = |levi: bool| {
        if levi {
            enumerate_levi(&sys, &b)
        } else {
            enumerate_exhaustive(&sys, &b)
        }
    };
    let set = match strategy {
        Strategy::Exhaustive => run_one(false),
        Strategy::Levi => run_one(true),
        Strategy::Both => {
            let a = run_one(false);
            let l = run_one(true);
            if let (Ok(x), Ok(y)) = (&a, &l) {
                if x != y {
                    return Err((
                        "oracle disagreement: exhaustive and Levi enumerations differ".into(),
                        EXIT_VALIDATION,
                    ));
                }
            }
            a.and(l)
        }
    };
    let set = set.map_err(|e| (e.to_string(), EXIT_BUDGET))?;
    if json {
        println!("{}", jsonio::solution_set_to_json(&set, sys.alphabet()));
    } else {
        println!(
            "{} solution(s), complete: {}",
            set.solutions.len(),
            set.complete
        );
        for s in &set.solutions {
            let parts: Vec<String> = jsonio::substitution_to_map(s, sys.alphabet())
                .into_iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            println!("  {}", parts.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn basis(files: Vec<PathBuf>, json: bool) -> CmdResult {
    if files.is_empty() {
        return Err((
            "at least one instance file required".into(),
            EXIT_VALIDATION,
        ));
    }
    let mut instances = Vec::new();
    for f in &files {
        let text = read(f).map_err(|e| (e, EXIT_VALIDATION))?;
        instances.push(jsonio::lattice_instance_from_json(&text).map_err(validation)?);
    }
    let bases = if instances.len() == 1 {
        vec![positive_basis(&instances[0]).map_err(validation)?]
    } else {
        positive_basis_family(&instances).map_err(validation)?
    };
    for (i, b) in bases.iter().enumerate() {
        if json {
            println!("{}", jsonio::positive_basis_to_json(b));
        } else {
            println!("basis {i}:");
            for row in &b.change_of_basis {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("  [{}]", cells.join(", "));
            }
            println!("  expressions:");
            for (j, expr) in b.expressions.iter().enumerate() {
                let cells: Vec<String> = expr.iter().map(|v| v.to_string()).collect();
                println!("    s{j} = [{}]", cells.join(", "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn band_run(file: PathBuf, steps: usize, json: bool) -> CmdResult {
    let text = read(&file).map_err(|e| (e, EXIT_VALIDATION))?;
    let bs = jsonio::band_system_from_json(&text).map_err(validation)?;
    let (final_system, trace) = run_machine(&bs, steps);
    let mut chi_violations = 0usize;
    let mut last_len = total_base_length(&bs);
    let mut length_violations = 0usize;
    for r in &trace {
        if r.kind.is_terminal() {
            break;
        }
        if r.chi_after < r.chi_before {
            chi_violations += 1;
        }
        if r.total_length >= last_len {
            length_violations += 1;
        }
        last_len = r.total_length.clone();
    }
    if json {
        for r in &trace {
            println!("{}", jsonio::move_record_to_json(r));
        }
    } else {
        for (i, r) in trace.iter().enumerate() {
            println!(
                "step {i}: {:?} chi {} -> {} length {}",
                r.kind,
                r.chi_before,
                r.chi_after,
                jsonio::rational_to_string(&r.total_length)
            );
        }
        println!(
            "pairs remaining: {}, chi violations: {chi_violations}, length violations: {length_violations}",
            final_system.pair_count()
        );
    }
    if chi_violations > 0 || length_violations > 0 {
        return Err((
            "machine trace violated an invariant".into(),
            EXIT_VALIDATION,
        ));
    }
    Ok(ExitCode::SUCCESS)
}

fn band_check(file: PathBuf, seed: u64, c_p: u32, json: bool) -> CmdResult {
    let text = read(&file).map_err(|e| (e, EXIT_VALIDATION))?;
    let bs = jsonio::band_system_from_json(&text).map_err(validation)?;
    bs.validate().map_err(validation)?;
    let graph = associated_graph(&bs);
    let gens = extract_generators(&bs);
    let weights = wordeq::pseudogroup::classify_weights(&gens, c_p);
    let stationary = detect_stationary(&bs, 6);
    // orbit sample diagnostic: closure sizes of a few seeded points
    let mut rng = SplitMix64::new(seed);
    let mut orbit_sizes = Vec::new();
    if let Some(comp) = bs.components().first() {
        for _ in 0..5 {
            let denom: u64 = 64;
            let span = &comp.hi - &comp.lo;
            let num = rng.below(4 * denom) as i64;
            let p = &comp.lo + &span * wordeq::pseudogroup::rat(num, (4 * denom) as i64);
            orbit_sizes.push(orbit_closure(&bs, &p, 6, 10_000).len());
        }
    }
    if json {
        let profile = coverage_profile(&bs);
        let pieces: Vec<serde_json::Value> = profile
            .pieces
            .iter()
            .map(|(iv, m)| {
                serde_json::json!([
                    jsonio::rational_to_string(&iv.lo),
                    jsonio::rational_to_string(&iv.hi),
                    m
                ])
            })
            .collect();
        let out = serde_json::json!({
            "pairs": bs.pair_count(),
            "chi": graph.euler_characteristic,
            "vertices": graph.vertices.len(),
            "generators": gens.len(),
            "weight_classes": weights.classes.len(),
            "weight_separators": weights.separators.len(),
            "longest_class_size": weights.longest_class_size,
            "longest_class_ratio": weights
                .longest_class_ratio
                .as_ref()
                .map(jsonio::rational_to_string),
            "stationary_word": stationary.as_ref().map(|w| w.word.clone()),
            "coverage": pieces,
            "orbit_sample_sizes": orbit_sizes,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!(
            "valid: {} pairs, chi = {}, {} vertices, {} generators, {} weight class(es)",
            bs.pair_count(),
            graph.euler_characteristic,
            graph.vertices.len(),
            gens.len(),
            weights.classes.len()
        );
        match &stationary {
            Some(w) => println!("stationary word detected: {:?} on {}", w.word, w.domain),
            None => println!("no stationary word at depth 6"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn graph_subst(
    system: PathBuf,
    graph: PathBuf,
    assign: PathBuf,
    dot: Option<PathBuf>,
    json: bool,
) -> CmdResult {
    let sys =
        parse_equations(&read(&system).map_err(|e| (e, EXIT_VALIDATION))?).map_err(validation)?;
    let wire: jsonio::SolutionGraphWire =
        serde_json::from_str(&read(&graph).map_err(|e| (e, EXIT_VALIDATION))?)
            .map_err(validation)?;
    let g = jsonio::solution_graph_from_wire(&wire, &sys).map_err(validation)?;
    let raw: BTreeMap<String, String> =
        serde_json::from_str(&read(&assign).map_err(|e| (e, EXIT_VALIDATION))?)
            .map_err(validation)?;
    let mut map = BTreeMap::new();
    for (label, word) in &raw {
        let mut w = PositiveWord::empty();
        for c in word.chars().filter(|c| !c.is_whitespace()) {
            let id = sys
                .alphabet()
                .lookup(&c.to_string())
                .ok_or_else(|| (format!("unknown letter {c:?}"), EXIT_VALIDATION))?;
            w.push(id);
        }
        map.insert(label.clone(), w);
    }
    let assignment = LabelAssignment::new(map).map_err(validation)?;
    let s = substitute(&g, &assignment, &sys).map_err(validation)?;
    let solves = is_solution(&s, &sys).map_err(validation)?;
    if let Some(path) = dot {
        fs::write(&path, solution_graph_to_dot(&g))
            .map_err(|e| (e.to_string(), EXIT_VALIDATION))?;
    }
    if json {
        let out = serde_json::json!({
            "substitution": jsonio::substitution_to_map(&s, sys.alphabet()),
            "is_solution": solves,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        for (k, v) in jsonio::substitution_to_map(&s, sys.alphabet()) {
            println!("{k} = {v}");
        }
        println!("is_solution: {solves}");
    }
    if solves {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_COVERAGE))
    }
}

fn graph_cover(
    file: PathBuf,
    resolution: String,
    budget: BudgetArgs,
    twist_depth: usize,
    json: bool,
) -> CmdResult {
    let m = jsonio::mr_diagram_from_json(&read(&file).map_err(|e| (e, EXIT_VALIDATION))?)
        .map_err(validation)?;
    let r = m
        .resolutions
        .iter()
        .find(|r| r.name == resolution)
        .ok_or_else(|| {
            (
                format!("no resolution named {resolution:?}"),
                EXIT_VALIDATION,
            )
        })?;
    let b = budget.budget().map_err(|e| (e, EXIT_VALIDATION))?;
    let report = match family_cover_check(r, &m.system, &b, twist_depth) {
        Ok(rep) => rep,
        Err(DiagramError::Budget(e)) => return Err((e.to_string(), EXIT_BUDGET)),
        Err(e) => return Err((e.to_string(), EXIT_VALIDATION)),
    };
    print_cover(&report, &m.system, json);
    if report.fully_covers() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_COVERAGE))
    }
}

fn print_cover(report: &diagrams::CoverageReport, sys: &wordeq::EquationSystem, json: bool) {
    let status = match report.graph_status {
        GraphStatus::FormallyValid => "formal",
        GraphStatus::EmpiricallyValid => "empirical",
        GraphStatus::Rejected => "rejected",
    };
    if json {
        let out = serde_json::json!({
            "graph_status": status,
            "covered": report.covered.len(),
            "uncovered": report.uncovered.len(),
            "enumerated": report.enumerated,
            "uncovered_solutions": report
                .uncovered
                .iter()
                .map(|s| jsonio::substitution_to_map(s, sys.alphabet()))
                .collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!(
            "graph: {status}; covered: {}; uncovered: {}",
            report.covered.len(),
            report.uncovered.len()
        );
        for s in report.uncovered.iter().take(10) {
            let parts: Vec<String> = jsonio::substitution_to_map(s, sys.alphabet())
                .into_iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            println!("  missing: {}", parts.join(", "));
        }
    }
}

fn diagram_check_cmd(
    file: PathBuf,
    budget: BudgetArgs,
    twist_depth: usize,
    json: bool,
) -> CmdResult {
    let m = jsonio::mr_diagram_from_json(&read(&file).map_err(|e| (e, EXIT_VALIDATION))?)
        .map_err(validation)?;
    let b = budget.budget().map_err(|e| (e, EXIT_VALIDATION))?;
    let report = match diagram_check(&m, &b, twist_depth) {
        Ok(rep) => rep,
        Err(DiagramError::Budget(e)) => return Err((e.to_string(), EXIT_BUDGET)),
        Err(e) => return Err((e.to_string(), EXIT_VALIDATION)),
    };
    if json {
        let out = serde_json::json!({
            "oracle": report.oracle_size,
            "oracle_complete": report.oracle_complete,
            "uncovered": report.uncovered.len(),
            "resolutions": report
                .per_resolution
                .iter()
                .map(|(name, covered, uncovered)| {
                    serde_json::json!({"name": name, "covered": covered, "uncovered": uncovered})
                })
                .collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        for (name, covered, uncovered) in &report.per_resolution {
            println!("resolution {name}: covered {covered}, uncovered {uncovered}");
        }
        println!(
            "oracle: {}; uncovered: {}",
            report.oracle_size,
            report.uncovered.len()
        );
    }
    if report.fully_covers() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_COVERAGE))
    }
}

fn separability(
    system: PathBuf,
    decomposition: PathBuf,
    subst: PathBuf,
    bound: usize,
    dot: Option<PathBuf>,
    json: bool,
) -> CmdResult {
    let sys =
        parse_equations(&read(&system).map_err(|e| (e, EXIT_VALIDATION))?).map_err(validation)?;
    let d = jsonio::decomposition_from_json(
        &read(&decomposition).map_err(|e| (e, EXIT_VALIDATION))?,
        &sys,
    )
    .map_err(validation)?;
    let s = jsonio::substitution_from_json(&read(&subst).map_err(|e| (e, EXIT_VALIDATION))?, &sys)
        .map_err(validation)?;
    if !is_solution(&s, &sys).map_err(validation)? {
        return Err((
            "substitution does not solve the system".into(),
            EXIT_VALIDATION,
        ));
    }
    if let Some(path) = dot {
        fs::write(&path, decomposition_to_dot(&d, sys.alphabet()))
            .map_err(|e| (e.to_string(), EXIT_VALIDATION))?;
    }
    match separability_check(&d, &s, &sys, bound) {
        Ok(marked) => {
            if json {
                let images: BTreeMap<String, String> = marked
                    .images
                    .iter()
                    .map(|(&g, w)| {
                        let rendered: String = w
                            .iter()
                            .map(|l| match l {
                                diagrams::MarkedLetter::Coeff(c) => {
                                    sys.alphabet().name(*c).to_string()
                                }
                                diagrams::MarkedLetter::Marker(i) => format!("<m{i}>"),
                            })
                            .collect();
                        (sys.alphabet().name(g).to_string(), rendered)
                    })
                    .collect();
                let out = serde_json::json!({ "separable": true, "marked": images });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("separable: marked substitution found");
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(DiagramError::NotSeparable(eq)) => {
            if json {
                let out = serde_json::json!({ "separable": false, "evidence_equation": eq });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("not separable: equation {eq} fails for every marking");
            }
            Ok(ExitCode::from(EXIT_COVERAGE))
        }
        Err(e) => Err((e.to_string(), EXIT_VALIDATION)),
    }
}
