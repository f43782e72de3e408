use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use teamsem::compile::{
    compile_cnf_general, compile_dualhorn, compile_split_2sat, dualhorn_clause_count,
    DualHornOptions, SplitOptions,
};
use teamsem::eval::EvalBudget;
use teamsem::formula::{classify, disjunction_width, parse, AtomKind, Formula, FragmentTag};
use teamsem::gadgets::{gadget_3sat, gadget_clique_cover, gadget_coloring, Cnf3Instance, Graph};
use teamsem::gen::{var_names, Gen, Shape};
use teamsem::model::{parse_instance, render_instance, Structure, Team};
use teamsem::pipeline::{applicable_strategies, run_check, PipelineError, Strategy};
use teamsem::satcore::{
    emit_dimacs, emit_manifest, is_2cnf, is_dual_horn, parse_dimacs, solve_2sat, solve_dpll,
    solve_dual_horn, SolveResult,
};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_FRAGMENT: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_DISAGREE: u8 = 5;

/// Model checking for dependence, independence and inclusion logic.
///
/// Exit codes: 0 success, 1 I/O error, 2 parse or input error, 3 formula
/// outside the chosen strategy's fragment, 4 budget exceeded, 5 selftest
/// disagreement.
#[derive(Parser)]
#[command(name = "teamsem", version)]
struct Cli {
    /// Largest team the search-based checker accepts.
    #[arg(long, global = true, default_value_t = 256)]
    budget_team: usize,
    /// Wall-clock limit in seconds for search-based checking.
    #[arg(long, global = true, default_value_t = 60.0)]
    budget_time: f64,
    /// Append a JSON report line to PATH (`-` for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the instance's team satisfies the formula.
    Check {
        /// Formula text, or @FILE.
        formula: String,
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Compile a model-checking query to DIMACS CNF.
    Compile {
        formula: String,
        instance: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// DIMACS output (stdout if omitted).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Variable manifest output.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Print the disjunction-width of a formula.
    Width { formula: String },
    /// Print the fragment a formula belongs to.
    Classify { formula: String },
    /// Generate a hardness instance from a 3-CNF or a graph.
    Gadget {
        #[arg(value_enum)]
        kind: GadgetKind,
        /// DIMACS file for `3sat`, graph file otherwise.
        source: PathBuf,
        /// Instance output (stdout if omitted).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Formula output (a `# formula:` line on stdout if omitted).
        #[arg(short = 'f', long)]
        formula_out: Option<PathBuf>,
        /// Number of colors for `coloring`; defaults to the square root of
        /// the vertex count.
        #[arg(short = 'n', long)]
        colors: Option<usize>,
    },
    /// Solve a DIMACS CNF.
    Solve {
        dimacs: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
    /// Run every applicable strategy on random instances and compare verdicts.
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Brute,
    Universal,
    Width2,
    Twosat,
    Dualhorn,
    Cnf,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Universal => Strategy::Universal,
            StrategyArg::Width2 => Strategy::Width2,
            StrategyArg::Twosat => Strategy::Twosat,
            StrategyArg::Dualhorn => Strategy::Dualhorn,
            StrategyArg::Cnf => Strategy::Cnf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Dualhorn,
    Cnf,
    Twosat,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetKind {
    #[value(name = "3sat")]
    Sat3,
    Cliquecover,
    Coloring,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Auto,
    Dualhorn,
    Twosat,
    Dpll,
}

struct Failure {
    code: u8,
    msg: String,
}

type Res<T> = Result<T, Failure>;

fn fail(code: u8, msg: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        msg: msg.to_string(),
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        let code = match e {
            PipelineError::Invalid(_) => EXIT_PARSE,
            PipelineError::Fragment(_) => EXIT_FRAGMENT,
            PipelineError::Budget(_) => EXIT_BUDGET,
        };
        fail(code, e)
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_formula(arg: &str) -> Res<Formula> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => arg.to_string(),
    };
    parse(&text).map_err(|e| fail(EXIT_PARSE, format!("formula: {e}")))
}

fn load_instance(path: &Path) -> Res<(Structure, Team)> {
    parse_instance(&read(path)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

struct Ctx {
    budget: EvalBudget,
    report: Option<String>,
}

impl Ctx {
    fn report(&self, line: Value) -> Res<()> {
        let Some(dest) = &self.report else {
            return Ok(());
        };
        let text = format!("{line}\n");
        if dest == "-" {
            print!("{text}");
            return Ok(());
        }
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dest)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| fail(EXIT_IO, format!("{dest}: {e}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        budget: EvalBudget {
            max_team_size: cli.budget_team,
            time_limit: Duration::from_secs_f64(cli.budget_time.max(0.0)),
            ..EvalBudget::default()
        },
        report: cli.report,
    };
    match run(&ctx, cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("teamsem: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(ctx: &Ctx, cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Check {
            formula,
            instance,
            strategy,
        } => {
            let phi = load_formula(&formula)?;
            let (a, x) = load_instance(&instance)?;
            let report = run_check(&a, &x, &phi, strategy.into(), ctx.budget)?;
            println!("{}", if report.verdict { "SAT-TEAM" } else { "NOT-SAT-TEAM" });
            ctx.report(serde_json::to_value(&report).expect("serializable"))
        }
        Cmd::Compile {
            formula,
            instance,
            target,
            output,
            map,
        } => compile(ctx, &load_formula(&formula)?, &instance, target, output, map),
        Cmd::Width { formula } => {
            println!("{}", disjunction_width(&load_formula(&formula)?));
            Ok(())
        }
        Cmd::Classify { formula } => {
            println!("{}", classify(&load_formula(&formula)?));
            Ok(())
        }
        Cmd::Gadget {
            kind,
            source,
            output,
            formula_out,
            colors,
        } => gadget(kind, &source, output, formula_out, colors),
        Cmd::Solve { dimacs, engine } => solve(ctx, &dimacs, engine),
        Cmd::Selftest { cases, seed } => selftest(ctx, cases, seed),
    }
}

fn compile(
    ctx: &Ctx,
    phi: &Formula,
    instance: &Path,
    target: Target,
    output: Option<PathBuf>,
    map: Option<PathBuf>,
) -> Res<()> {
    let (a, x) = load_instance(instance)?;
    let tag = classify(phi);
    let (cnf, vars, expected) = match target {
        Target::Dualhorn => {
            let (cnf, vars) = compile_dualhorn(&a, &x, phi).map_err(PipelineError::from)?;
            let count = dualhorn_clause_count(&a, x.vars(), phi, DualHornOptions::default())
                .map_err(PipelineError::from)?;
            (cnf, vars, Some(count))
        }
        Target::Cnf => {
            let (cnf, vars) = compile_cnf_general(&a, &x, phi).map_err(PipelineError::from)?;
            (cnf, vars, None)
        }
        Target::Twosat => {
            let (Formula::Or(l, r), FragmentTag::BcSplitIndep) = (phi, tag) else {
                return Err(fail(
                    EXIT_FRAGMENT,
                    format!("twosat needs a disjunction of two independence closure members, formula is {tag}"),
                ));
            };
            let (cnf, vars) = compile_split_2sat(&a, &x, l, r, SplitOptions::default())
                .map_err(PipelineError::from)?;
            (cnf, vars, None)
        }
    };
    let text = emit_dimacs(&cnf);
    match &output {
        Some(path) => {
            write(path, &text)?;
            println!("vars {} clauses {}", cnf.num_vars(), cnf.len());
        }
        None => {
            print!("{text}");
            eprintln!("vars {} clauses {}", cnf.num_vars(), cnf.len());
        }
    }
    if let Some(path) = &map {
        write(path, &emit_manifest(&vars))?;
    }
    ctx.report(json!({
        "command": "compile",
        "fragment": tag,
        "vars": cnf.num_vars(),
        "clauses": cnf.len(),
        "expected_clauses": expected.map(|c| c.to_string()),
    }))
}

fn gadget(
    kind: GadgetKind,
    source: &Path,
    output: Option<PathBuf>,
    formula_out: Option<PathBuf>,
    colors: Option<usize>,
) -> Res<()> {
    let text = read(source)?;
    let parsed = |e: teamsem::gadgets::GadgetError| fail(EXIT_PARSE, format!("{}: {e}", source.display()));
    let inst = match kind {
        GadgetKind::Sat3 => gadget_3sat(&Cnf3Instance::from_dimacs(&text).map_err(parsed)?),
        GadgetKind::Cliquecover => gadget_clique_cover(&Graph::parse(&text).map_err(parsed)?),
        GadgetKind::Coloring => {
            let g = Graph::parse(&text).map_err(parsed)?;
            let n = colors.unwrap_or_else(|| (g.num_vertices() as f64).sqrt().round() as usize);
            gadget_coloring(&g, n)
        }
    }
    .map_err(|e| fail(EXIT_PARSE, e))?;
    let rendered = render_instance(&inst.structure, &inst.team);
    let formula = format!("{}\n", inst.formula);
    match (&output, &formula_out) {
        (Some(o), _) => write(o, &rendered)?,
        (None, _) => print!("{rendered}"),
    }
    match (&output, &formula_out) {
        (_, Some(f)) => write(f, &formula)?,
        (None, None) => print!("# formula: {formula}"),
        (Some(_), None) => print!("{formula}"),
    }
    Ok(())
}

fn solve(ctx: &Ctx, path: &Path, engine: Engine) -> Res<()> {
    let cnf = parse_dimacs(&read(path)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let engine = match engine {
        Engine::Auto if is_dual_horn(&cnf) => Engine::Dualhorn,
        Engine::Auto if is_2cnf(&cnf) => Engine::Twosat,
        Engine::Auto => Engine::Dpll,
        e => e,
    };
    let (name, result) = match engine {
        Engine::Dualhorn => ("dualhorn", solve_dual_horn(&cnf)),
        Engine::Twosat => ("twosat", solve_2sat(&cnf)),
        _ => ("dpll", Ok(solve_dpll(&cnf))),
    };
    let result = result.map_err(|e| fail(EXIT_FRAGMENT, e))?;
    match &result {
        SolveResult::Sat(model) => {
            println!("s SATISFIABLE");
            let lits: Vec<String> = model
                .iter()
                .enumerate()
                .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                .collect();
            println!("v {} 0", lits.join(" ").trim());
        }
        SolveResult::Unsat => println!("s UNSATISFIABLE"),
    }
    ctx.report(json!({
        "command": "solve",
        "engine": name,
        "vars": cnf.num_vars(),
        "clauses": cnf.len(),
        "sat": result.is_sat(),
    }))
}

fn selftest(ctx: &Ctx, cases: usize, seed: u64) -> Res<()> {
    let mut g = Gen::new(seed);
    let vars = var_names(3);
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let (mut runs, mut skipped, mut disagreements) = (0usize, 0usize, 0usize);
    for case in 0..cases {
        let a = g.structure(3);
        let x = g.team(&a, &names, 5);
        let phi = match case % 5 {
            0 => g.formula(&Shape::inclusion(), &vars),
            1 => g.width2_dep(&vars),
            2 => Formula::or(g.bc_member(&vars, 2), g.bc_member(&vars, 2)),
            3 => g.universal_conj(&vars),
            _ => g.formula(&Shape::quantifier_free(&[AtomKind::Dep, AtomKind::Indep, AtomKind::Inc]), &vars),
        };
        let mut verdicts: Vec<(Strategy, bool)> = Vec::new();
        for s in applicable_strategies(&phi) {
            match run_check(&a, &x, &phi, s, ctx.budget) {
                Ok(r) => verdicts.push((s, r.verdict)),
                Err(PipelineError::Budget(_)) => skipped += 1,
                Err(e) => return Err(fail(EXIT_DISAGREE, format!("case {case}: {s} failed on `{phi}`: {e}"))),
            }
            runs += 1;
        }
        if verdicts.windows(2).any(|w| w[0].1 != w[1].1) {
            disagreements += 1;
            eprintln!("case {case}: `{phi}` on\n{}", render_instance(&a, &x));
            for (s, v) in &verdicts {
                eprintln!("  {s}: {v}");
            }
        }
    }
    println!("selftest: {cases} instances, {runs} strategy runs, {skipped} over budget, {disagreements} disagreements");
    ctx.report(json!({
        "command": "selftest",
        "cases": cases,
        "runs": runs,
        "skipped": skipped,
        "disagreements": disagreements,
    }))?;
    if disagreements > 0 {
        return Err(fail(EXIT_DISAGREE, format!("{disagreements} disagreements")));
    }
    Ok(())
}
