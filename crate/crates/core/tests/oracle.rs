//! The search-based checker and the propositional pipelines against the
//! enumerating oracle in `common`.

mod common;

use common::Naive;
use teamsem::compile::{compile_cnf_general, compile_dualhorn};
use teamsem::eval::{check_brute, EvalBudget};
use teamsem::formula::AtomKind;
use teamsem::gen::{var_names, Gen, Shape};
use teamsem::model::render_instance;
use teamsem::pipeline::{applicable_strategies, run_check};
use teamsem::satcore::{solve_dpll, solve_dual_horn};

fn small(shape: &Shape) -> Shape {
    Shape {
        depth: 3,
        quantifier_depth: shape.quantifier_depth.min(1),
        ..shape.clone()
    }
}

#[test]
fn search_matches_enumeration() {
    let mut g = Gen::new(11);
    let vars = var_names(2);
    let names = ["x0", "x1"];
    let shapes = [
        Shape::everything(),
        Shape::inclusion(),
        Shape::universal(),
        Shape::quantifier_free(&[AtomKind::Dep, AtomKind::Indep, AtomKind::Inc]),
    ];
    for case in 0..1500 {
        let a = g.structure(2);
        let x = g.team(&a, &names, 4);
        let phi = g.formula(&small(&shapes[case % shapes.len()]), &vars);
        let expect = Naive::new(&a).check(&x, &phi);
        let got = check_brute(&a, &x, &phi, EvalBudget::default()).unwrap();
        assert_eq!(got, expect, "case {case}: `{phi}` on\n{}", render_instance(&a, &x));
    }
}

#[test]
fn general_cnf_matches_enumeration() {
    let mut g = Gen::new(12);
    let vars = var_names(3);
    let names = ["x0", "x1", "x2"];
    let shape = Shape::quantifier_free(&[AtomKind::Dep, AtomKind::Indep, AtomKind::Inc]);
    for case in 0..1000 {
        let a = g.structure(3);
        let x = g.team(&a, &names, 4);
        let phi = g.formula(&shape, &vars);
        let (cnf, _) = compile_cnf_general(&a, &x, &phi).unwrap();
        let expect = Naive::new(&a).check(&x, &phi);
        assert_eq!(solve_dpll(&cnf).is_sat(), expect, "case {case}: `{phi}` on\n{}", render_instance(&a, &x));
    }
}

#[test]
fn quantified_cnf_matches_enumeration() {
    let mut g = Gen::new(13);
    let vars = var_names(2);
    let names = ["x0", "x1"];
    for case in 0..400 {
        let a = g.structure(2);
        let x = g.team(&a, &names, 3);
        let phi = g.formula(&small(&Shape::everything()), &vars);
        let (cnf, _) = compile_cnf_general(&a, &x, &phi).unwrap();
        let expect = Naive::new(&a).check(&x, &phi);
        assert_eq!(solve_dpll(&cnf).is_sat(), expect, "case {case}: `{phi}` on\n{}", render_instance(&a, &x));
        if phi.is_union_closed() {
            let (dh, _) = compile_dualhorn(&a, &x, &phi).unwrap();
            assert_eq!(solve_dual_horn(&dh).unwrap().is_sat(), expect);
        }
    }
}

#[test]
fn every_applicable_strategy_matches_enumeration() {
    let mut g = Gen::new(14);
    let vars = var_names(2);
    let names = ["x0", "x1"];
    for case in 0..500 {
        let a = g.structure(2);
        let x = g.team(&a, &names, 3);
        let phi = match case % 3 {
            0 => g.width2_dep(&vars),
            1 => teamsem::Formula::or(g.bc_member(&vars, 2), g.bc_member(&vars, 2)),
            _ => g.universal_conj(&vars),
        };
        let expect = Naive::new(&a).check(&x, &phi);
        for s in applicable_strategies(&phi) {
            let r = run_check(&a, &x, &phi, s, EvalBudget::default()).unwrap();
            assert_eq!(r.verdict, expect, "case {case}, {s}: `{phi}` on\n{}", render_instance(&a, &x));
        }
    }
}
