//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use teamsem::compile::{
    check_width2_D, compile_dualhorn, dualhorn_clause_count, split_2sat_verdict, DualHornOptions,
    SplitOptions,
};
use teamsem::eval::{check_brute, check_universal_conj, holds_fo, is_k_coherent_on, EvalBudget};
use teamsem::formula::{disjunction_width, free_variables, parse, AtomKind, Formula};
use teamsem::gadgets::{gadget_3sat, gadget_clique_cover, gadget_coloring, Graph};
use teamsem::gen::{all_graphs, var_names, Gen, Shape};
use teamsem::model::{render_instance, Structure, Team};
use teamsem::satcore::{is_dual_horn, solve_2sat, solve_dpll, solve_dual_horn, Cnf, SolveResult};

type Outcome = Result<String, String>;

fn brute(a: &Structure, x: &Team, phi: &Formula) -> bool {
    check_brute(a, x, phi, EvalBudget::default()).expect("within budget")
}

fn names(vars: &[String]) -> Vec<&str> {
    vars.iter().map(String::as_str).collect()
}

fn dualhorn_pipeline() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(0x1001);
    let vars = var_names(3);
    let n = 1200;
    for case in 0..n {
        let a = g.structure(3);
        let x = g.team(&a, &names(&vars), 5);
        let phi = g.formula(&Shape::inclusion(), &vars);
        let (cnf, _) = compile_dualhorn(&a, &x, &phi).map_err(|e| e.to_string())?;
        if !is_dual_horn(&cnf) {
            return Err(format!("case {case}: `{phi}` compiled to a non-dual-Horn CNF"));
        }
        let got = solve_dual_horn(&cnf).unwrap().is_sat();
        if got != brute(&a, &x, &phi) {
            return Err(format!("case {case}: `{phi}` on\n{}", render_instance(&a, &x)));
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(120) {
        return Err(format!("{n} instances took {t:.1?}"));
    }
    Ok(format!("{n} instances agree, all dual-Horn, {t:.1?}"))
}

fn ptime_scaling() -> Outcome {
    let phi = parse("E z . (inc(x;z) & inc(z;y))").unwrap();
    let mut g = Gen::new(0x2002);
    let mut notes = Vec::new();
    for (p, pad, rows) in [(2usize, 4usize, 50usize), (4, 1, 50), (8, 0, 50), (8, 1, 100)] {
        let a = Structure::with_size(p);
        let mut vars = vec!["x".to_string(), "y".to_string()];
        vars.extend((0..pad).map(|i| format!("p{i}")));
        let x = g.team_of_size(&a, &names(&vars), rows);
        assert_eq!(x.len(), rows);
        let start = Instant::now();
        let (cnf, _) = compile_dualhorn(&a, &x, &phi).map_err(|e| e.to_string())?;
        let compiled = start.elapsed();
        let solved = solve_dual_horn(&cnf).unwrap();
        let total = start.elapsed();
        let expect = dualhorn_clause_count(&a, x.vars(), &phi, DualHornOptions::default()).unwrap();
        if cnf.len() as u128 != expect {
            return Err(format!("|A|={p} |X|={rows}: {} clauses, expected {expect}", cnf.len()));
        }
        // The count depends on |A| and the column count only, not on |X|.
        let half = g.team_of_size(&a, &names(&vars), rows / 2);
        let (small, _) = compile_dualhorn(&a, &half, &phi).unwrap();
        if small.len() != cnf.len() {
            return Err(format!("|A|={p}: clause count moves with |X|"));
        }
        if rows == 50 && solved.is_sat() != brute(&a, &x, &phi) {
            return Err(format!("|A|={p}: verdict disagrees with search"));
        }
        if p == 8 && rows == 100 && total >= Duration::from_secs(1) {
            return Err(format!("|A|=8 |X|=100 took {total:?}"));
        }
        notes.push(format!("|A|={p} |X|={rows}: {} clauses in {compiled:.1?}+{:.1?}", cnf.len(), total - compiled));
    }
    Ok(notes.join("; "))
}

fn split_pipeline() -> Outcome {
    let mut g = Gen::new(0x3003);
    let vars = var_names(3);
    let n = 600;
    let mut bare_wrong = 0;
    for case in 0..n {
        let a = g.structure(3);
        let x = g.team(&a, &names(&vars), 6);
        let phi = Formula::or(g.bc_member(&vars, 3), g.bc_member(&vars, 3));
        let got = split_2sat_verdict(&a, &x, &phi, SplitOptions::default()).map_err(|e| e.to_string())?;
        let expect = brute(&a, &x, &phi);
        if got != expect {
            return Err(format!("case {case}: `{phi}` on\n{}", render_instance(&a, &x)));
        }
        let bare = split_2sat_verdict(&a, &x, &phi, SplitOptions { unit_clauses: false }).unwrap();
        bare_wrong += usize::from(bare != expect);
    }
    Ok(format!(
        "{n} instances agree; without unit clauses {bare_wrong} verdicts would be wrong"
    ))
}

fn width2_pipeline() -> Outcome {
    let mut g = Gen::new(0x4004);
    let vars = var_names(3);
    let n = 600;
    let mut width2 = 0;
    for case in 0..n {
        let a = g.structure(3);
        let x = g.team(&a, &names(&vars), 6);
        let phi = g.width2_dep(&vars);
        width2 += usize::from(disjunction_width(&phi) == 2);
        let got = check_width2_D(&a, &x, &phi).map_err(|e| e.to_string())?;
        if got != brute(&a, &x, &phi) {
            return Err(format!("case {case}: `{phi}` on\n{}", render_instance(&a, &x)));
        }
    }
    Ok(format!("{n} instances agree ({width2} of width 2)"))
}

fn gadget_roundtrips() -> Outcome {
    let mut g = Gen::new(0x5005);
    let (mut unsat, mut uncoverable) = (0, 0);
    for case in 0..100 {
        let src = g.cnf3(4, 4);
        let inst = gadget_3sat(&src).unwrap();
        let (n, m) = (src.clauses().len(), src.num_vars() as usize);
        if inst.team.len() != 6 * n + 2 * m {
            return Err(format!("3sat case {case}: {} rows, expected {}", inst.team.len(), 6 * n + 2 * m));
        }
        let sat = solve_dpll(&src.to_cnf()).is_sat();
        unsat += usize::from(!sat);
        if sat != brute(&inst.structure, &inst.team, &inst.formula) {
            return Err(format!("3sat case {case}: source\n{}", src.to_dimacs()));
        }
    }
    let mut graphs = 0;
    for k in 1..=5 {
        for gr in all_graphs(k) {
            let inst = gadget_clique_cover(&gr).unwrap();
            uncoverable += usize::from(!common::has_3_clique_cover(&gr));
            if common::has_3_clique_cover(&gr) != brute(&inst.structure, &inst.team, &inst.formula) {
                return Err(format!("clique cover disagrees on\n{}", gr.render()));
            }
            graphs += 1;
        }
    }
    for gr in all_graphs(4) {
        let inst = gadget_coloring(&gr, 2).unwrap();
        if common::is_colorable(&gr, 2) != brute(&inst.structure, &inst.team, &inst.formula) {
            return Err(format!("coloring disagrees on\n{}", gr.render()));
        }
    }
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/");
    let gr = Graph::parse(&std::fs::read_to_string(format!("{dir}coloring_n2.graph")).unwrap()).unwrap();
    let inst = gadget_coloring(&gr, 2).unwrap();
    let golden = std::fs::read_to_string(format!("{dir}coloring_n2.team")).unwrap();
    if render_instance(&inst.structure, &inst.team) != golden {
        return Err("coloring table differs from the golden file".into());
    }
    if brute(&inst.structure, &inst.team, &inst.formula) {
        return Err("triangle instance reported colorable".into());
    }
    Ok(format!(
        "100 3-CNFs ({unsat} unsatisfiable), {graphs} clique-cover graphs ({uncoverable} without cover), 64 coloring graphs, golden table matches"
    ))
}

fn semantic_properties() -> Outcome {
    let mut g = Gen::new(0x6006);
    let vars = var_names(3);
    let n = 1000;
    let empty_shape = Shape::everything();
    let dep_shape = Shape {
        atoms: vec![AtomKind::Dep],
        ..Shape::everything()
    };
    let fo_shape = Shape {
        atoms: vec![],
        ..Shape::everything()
    };
    for case in 0..n {
        let a = g.structure(3);
        let x = g.team(&a, &names(&vars), 6);
        let fail = |what: &str, phi: &Formula| Err(format!("{what}, case {case}: `{phi}` on\n{}", render_instance(&a, &x)));

        let phi = g.formula(&empty_shape, &vars);
        if !brute(&a, &Team::new(vars.iter().cloned()).unwrap(), &phi) {
            return fail("empty team", &phi);
        }

        let phi = g.formula(&dep_shape, &vars);
        if brute(&a, &x, &phi) {
            let keep: Vec<&Vec<_>> = x.rows().filter(|_| g.rng().gen_bool(0.5)).collect();
            if !brute(&a, &x.with_rows(keep), &phi) {
                return fail("downward closure", &phi);
            }
        }

        let phi = g.formula(&empty_shape, &vars);
        let free = free_variables(&phi);
        let local: Vec<&str> = vars.iter().filter(|v| free.contains(*v)).map(String::as_str).collect();
        if brute(&a, &x, &phi) != brute(&a, &x.restrict(&local).unwrap(), &phi) {
            return fail("locality", &phi);
        }

        let phi = g.formula(&fo_shape, &vars);
        let flat = x.rows().all(|s| holds_fo(&a, x.vars(), s, &phi).unwrap());
        if brute(&a, &x, &phi) != flat {
            return fail("flatness", &phi);
        }

        let k = g.rng().gen_range(0..=2);
        let cond: Vec<&str> = (0..k).map(|_| *names(&vars).choose(g.rng()).unwrap()).collect();
        let y = *names(&vars).choose(g.rng()).unwrap();
        let dep = Formula::dep(&cond, y);
        let indep = Formula::indep(&[y], &cond, &[y]);
        if brute(&a, &x, &dep) != brute(&a, &x, &indep) {
            return fail("dependence as independence", &dep);
        }

        let phi = loop {
            let f = g.formula(&Shape::quantifier_free(&[AtomKind::Dep]), &vars);
            if disjunction_width(&f) <= 1 {
                break f;
            }
        };
        if !is_k_coherent_on(&a, &x, &phi, 2, EvalBudget::default()).unwrap() {
            return fail("2-coherence", &phi);
        }
    }
    Ok(format!("{n} instances for each of six properties"))
}

fn check_model(f: &Cnf, r: &SolveResult) -> Result<(), String> {
    match r.model() {
        Some(m) if !f.satisfied_by(m) => Err("model violates a clause".into()),
        _ => Ok(()),
    }
}

fn solver_crosschecks() -> Outcome {
    let mut g = Gen::new(0x7007);
    for case in 0..1000 {
        let nv = g.rng().gen_range(1..=12);
        let nc = g.rng().gen_range(0..=30);
        let f = g.dual_horn(nv, nc);
        let (dh, dp) = (solve_dual_horn(&f).unwrap(), solve_dpll(&f));
        check_model(&f, &dh)?;
        check_model(&f, &dp)?;
        if dh.is_sat() != dp.is_sat() {
            return Err(format!("dual-Horn case {case} disagrees"));
        }
    }
    for case in 0..1000 {
        let nv = g.rng().gen_range(1..=12);
        let nc = g.rng().gen_range(0..=30);
        let f = g.kcnf(nv, nc, 2);
        let (ts, dp) = (solve_2sat(&f).unwrap(), solve_dpll(&f));
        check_model(&f, &ts)?;
        check_model(&f, &dp)?;
        if ts.is_sat() != dp.is_sat() {
            return Err(format!("2-CNF case {case} disagrees"));
        }
    }
    Ok("1000 dual-Horn and 1000 2-CNF formulas agree, all models verified".into())
}

fn universal_fast_path() -> Outcome {
    let mut g = Gen::new(0x8008);
    let vars = var_names(3);
    let n = 400;
    for case in 0..n {
        let a = g.structure(3);
        let x = g.team(&a, &names(&vars), 6);
        let phi = g.universal_conj(&vars);
        assert!(phi.quantifier_depth() <= 2);
        let (v, stats) = check_universal_conj(&a, &x, &phi).map_err(|e| e.to_string())?;
        if stats.branch_nodes != 0 {
            return Err(format!("case {case}: {} search nodes", stats.branch_nodes));
        }
        if v != brute(&a, &x, &phi) {
            return Err(format!("case {case}: `{phi}` on\n{}", render_instance(&a, &x)));
        }
    }
    Ok(format!("{n} instances agree with no search"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 dual-Horn pipeline", dualhorn_pipeline),
        ("2 polynomial scaling", ptime_scaling),
        ("3 2-CNF split pipeline", split_pipeline),
        ("4 width-2 dependence pipeline", width2_pipeline),
        ("5 gadget round-trips", gadget_roundtrips),
        ("6 semantic properties", semantic_properties),
        ("7 solver cross-checks", solver_crosschecks),
        ("8 universal fast path", universal_fast_path),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{:.1?}]", start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
