use proptest::prelude::*;

use teamsem::compile::{
    compatible, compile_dualhorn, compile_dualhorn_with, dualhorn_clause_count, normalize_bc,
    DualHornOptions,
};
use teamsem::eval::{check_brute, EvalBudget};
use teamsem::formula::{parse, render, Formula};
use teamsem::gen::{var_names, Gen, Shape};
use teamsem::model::{parse_instance, render_instance};
use teamsem::satcore::{emit_dimacs, is_dual_horn, parse_dimacs, solve_dual_horn};

const VARS: [&str; 3] = ["x0", "x1", "x2"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rendered_formulas_parse_back(seed in any::<u64>()) {
        let phi = Gen::new(seed).formula(&Shape::everything(), &var_names(3));
        prop_assert_eq!(parse(&render(&phi)).unwrap(), phi);
    }

    #[test]
    fn instances_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.structure(4);
        let x = g.team(&a, &VARS, 6);
        let text = render_instance(&a, &x);
        let (b, y) = parse_instance(&text).unwrap();
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(render_instance(&b, &y), text);
    }

    #[test]
    fn dimacs_round_trips(seed in any::<u64>(), vars in 1u32..10, clauses in 0usize..25) {
        let f = Gen::new(seed).kcnf(vars, clauses, 4);
        let back = parse_dimacs(&emit_dimacs(&f)).unwrap();
        prop_assert_eq!(back.num_vars(), f.num_vars());
        prop_assert_eq!(back.sorted_clauses(), f.sorted_clauses());
    }

    #[test]
    fn inclusion_encoding_shape_and_size(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.structure(3);
        let x = g.team(&a, &VARS, 5);
        let phi = g.formula(&Shape::inclusion(), &var_names(3));
        let (cnf, _) = compile_dualhorn(&a, &x, &phi).unwrap();
        prop_assert!(is_dual_horn(&cnf));
        let count = dualhorn_clause_count(&a, x.vars(), &phi, DualHornOptions::default()).unwrap();
        prop_assert_eq!(cnf.len() as u128, count);
    }

    #[test]
    fn pruning_keeps_verdicts(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.structure(3);
        let x = g.team(&a, &VARS, 5);
        let phi = g.formula(&Shape::inclusion(), &var_names(3));
        let full = compile_dualhorn(&a, &x, &phi).unwrap().0;
        let opts = DualHornOptions { prune_unreachable: true, ..DualHornOptions::default() };
        let pruned = compile_dualhorn_with(&a, &x, &phi, opts).unwrap().0;
        prop_assert!(pruned.len() <= full.len());
        prop_assert_eq!(
            solve_dual_horn(&pruned).unwrap().is_sat(),
            solve_dual_horn(&full).unwrap().is_sat()
        );
    }

    #[test]
    fn compatibility_is_symmetric_under_swapped_atom(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let vars = var_names(3);
        let a = g.structure(3);
        let x = g.team(&a, &VARS, 6);
        let member = g.bc_member(&vars, 2);
        let swapped = swap_atom(&member);
        let (n, m) = (normalize_bc(&member).unwrap(), normalize_bc(&swapped).unwrap());
        for s1 in x.rows() {
            for s2 in x.rows() {
                prop_assert_eq!(compatible(&a, &x, s1, s2, &n), compatible(&a, &x, s2, s1, &m));
            }
        }
    }

    #[test]
    fn normal_form_is_equivalent(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a = g.structure(3);
        let x = g.team(&a, &VARS, 5);
        let phi = g.bc_member(&var_names(3), 3);
        let back = normalize_bc(&phi).unwrap().to_formula();
        let b = EvalBudget::default();
        prop_assert_eq!(check_brute(&a, &x, &phi, b).unwrap(), check_brute(&a, &x, &back, b).unwrap());
    }
}

fn swap_atom(phi: &Formula) -> Formula {
    match phi {
        Formula::Indep { left, cond, right } => Formula::Indep {
            left: right.clone(),
            cond: cond.clone(),
            right: left.clone(),
        },
        Formula::And(a, b) => Formula::and(swap_atom(a), swap_atom(b)),
        Formula::Or(a, b) => Formula::or(swap_atom(a), swap_atom(b)),
        other => other.clone(),
    }
}
