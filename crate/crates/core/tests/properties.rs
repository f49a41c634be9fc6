use proptest::prelude::*;

use majn::axioms::{applicable_rules, inv_propagate};
use majn::frontend::{build, parse_expr, parse_netlist, write_netlist};
use majn::optimize::{alg1_optimize, OptimizeConfig, Target, Verification};
use majn::oracle::{check_equiv, evaluate, is_self_dual, random_simulate, simulate, simulate_many};
use majn::random::{random_expression, random_network, RandomConfig};
use majn::sat::solve;
use majn::{Edge, Network};

fn small() -> RandomConfig {
    RandomConfig { max_inputs: 7, max_size: 14, ..RandomConfig::default() }
}

fn target() -> impl Strategy<Value = Target> {
    prop_oneof![Just(Target::Size), Just(Target::Depth), Just(Target::FaninSum), Just(Target::SizeTimesInv)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rewrites_preserve_outputs(seed in any::<u64>()) {
        let net = random_network(&small(), seed);
        let base = simulate_many(&net, &net.output_edges()).unwrap();
        for v in net.maj_cone(&net.output_edges()) {
            for rule in applicable_rules(&net, v) {
                let mut w = net.clone();
                let e = rule.apply(&mut w, v).unwrap();
                w.substitute(v, e).unwrap();
                w.check_invariants().unwrap();
                prop_assert_eq!(&simulate_many(&w, &w.output_edges()).unwrap(), &base, "{:?}", rule);
            }
        }
    }

    #[test]
    fn inverter_propagation_is_sound(seed in any::<u64>()) {
        let net = random_network(&small(), seed);
        for v in net.maj_cone(&net.output_edges()) {
            let mut w = net.clone();
            let neg = Edge::from(v).xor(true);
            let e = inv_propagate(&mut w, neg).unwrap();
            prop_assert_eq!(simulate(&w, e).unwrap(), simulate(&net, neg).unwrap());
        }
    }

    #[test]
    fn expressions_print_and_parse(seed in any::<u64>()) {
        let expr = random_expression(&small(), seed);
        prop_assert_eq!(parse_expr(&expr.to_string()).unwrap(), expr);
    }

    #[test]
    fn netlists_round_trip(seed in any::<u64>()) {
        let net = random_network(&small(), seed);
        let text = write_netlist(&net);
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(write_netlist(&back), text);
        for (name, e) in net.outputs() {
            prop_assert!(check_equiv(&net, *e, &back, back.output(name).unwrap()).unwrap().is_equivalent());
        }
    }

    #[test]
    fn optimizer_is_monotone_and_sound(seed in any::<u64>(), t in target()) {
        let net = random_network(&small(), seed);
        let config = OptimizeConfig { target: t, seed, ..OptimizeConfig::default() };
        let r = alg1_optimize(&net, &config);
        prop_assert!(t.key(&r.after) <= t.key(&r.before));
        prop_assert_ne!(r.verification, Verification::Reverted);
        for (name, e) in net.outputs() {
            prop_assert!(check_equiv(&net, *e, &r.network, r.network.output(name).unwrap()).unwrap().is_equivalent());
        }
    }

    #[test]
    fn solver_agrees_with_tables(seed in any::<u64>()) {
        let net = random_network(&small(), seed);
        let root = net.output("f").unwrap();
        let table = simulate(&net, root).unwrap();
        let result = solve(&net, root);
        prop_assert_eq!(result.is_sat(), !table.is_const(false));
        if let Some(w) = &result.witness {
            let assignment: Vec<bool> = net.input_names().map(|n| w.iter().any(|(m, b)| m == n && *b)).collect();
            prop_assert!(evaluate(&net, root, &assignment));
        }
    }

    #[test]
    fn random_simulation_matches_tables(seed in any::<u64>()) {
        let net = random_network(&small(), seed);
        let roots = net.output_edges();
        let tables = simulate_many(&net, &roots).unwrap();
        let sim = random_simulate(&net, &roots, 300, seed);
        for v in 0..300 {
            let a = sim.assignment(v);
            for (i, t) in tables.iter().enumerate() {
                prop_assert_eq!(sim.output_bit(i, v), t.get(a));
            }
        }
    }

    #[test]
    fn constant_free_networks_are_self_dual(seed in any::<u64>()) {
        let net = random_network(&RandomConfig { max_inputs: 7, max_size: 14, ..RandomConfig::constant_free() }, seed);
        for e in net.output_edges() {
            prop_assert!(is_self_dual(&simulate(&net, e).unwrap()));
        }
    }

    #[test]
    fn simplifying_construction_is_sound(seed in any::<u64>()) {
        let expr = random_expression(&small(), seed);
        let mut exact = Network::new();
        let re = build(&mut exact, &expr, true).unwrap();
        let mut simplified = Network::new();
        let rs = build(&mut simplified, &expr, false).unwrap();
        prop_assert!(check_equiv(&exact, re, &simplified, rs).unwrap().is_equivalent());
        prop_assert!(simplified.metrics(&[rs]).size <= exact.metrics(&[re]).size);
    }
}
