//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::time::{Duration, Instant};

use majn::axioms::{applicable_rules, inv_propagate, RewriteRule};
use majn::frontend::{build, build_exact, parse_expr, parse_netlist, to_expr, write_netlist};
use majn::optimize::{alg1_optimize, rebalance_late_input, OptimizeConfig};
use majn::oracle::{check_equiv, check_self_dual, evaluate, simulate, simulate_many, TruthTable};
use majn::random::{random_expression, random_network, RandomConfig};
use majn::sat::{constant_free_fast_path, solve, SatStatus};
use majn::{Edge, Network, RuleTag};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))
}

fn expr_net(text: &str) -> (Network, Edge) {
    let mut net = Network::new();
    let f = build_exact(&mut net, text).expect("valid expression");
    net.add_output("f", f).unwrap();
    (net, f)
}

/// Brute-force table of a Boolean function of `k` inputs, input 0 least
/// significant.
fn brute(k: usize, f: impl Fn(&[bool]) -> bool) -> TruthTable {
    TruthTable::from_fn(k, |v| {
        let bits: Vec<bool> = (0..k).map(|i| (v >> i) & 1 == 1).collect();
        f(&bits)
    })
}

fn outputs_equal(a: &Network, b: &Network) -> bool {
    a.outputs().iter().all(|(name, ea)| match b.output(name) {
        Some(eb) => check_equiv(a, *ea, b, eb).map(|r| r.is_equivalent()).unwrap_or(false),
        None => false,
    })
}

fn axiom_soundness() -> Outcome {
    let t = Instant::now();
    let cfg = RandomConfig::default();
    let mut rewrites = 0usize;
    for seed in 0..1000u64 {
        let net = random_network(&cfg, seed);
        let base = simulate_many(&net, &net.output_edges()).map_err(|e| e.to_string())?;
        for v in net.maj_cone(&net.output_edges()) {
            for rule in applicable_rules(&net, v) {
                let mut w = net.clone();
                let e = rule.apply(&mut w, v).map_err(|err| format!("seed {seed}: {rule:?} at {v}: {err}"))?;
                let tables = simulate_many(&w, &[Edge::from(v), e]).map_err(|e| e.to_string())?;
                ensure(tables[0] == tables[1], || format!("seed {seed}: {rule:?} at {v} changes the function"))?;
                w.substitute(v, e).map_err(|e| e.to_string())?;
                let after = simulate_many(&w, &w.output_edges()).map_err(|e| e.to_string())?;
                ensure(after == base, || format!("seed {seed}: {rule:?} at {v} changes an output"))?;
                rewrites += 1;
            }
        }
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("1000 networks, {rewrites} rewrites bit-exact, {:.2?}", t.elapsed()))
}

fn worked_axiom_instances() -> Outcome {
    let t = Instant::now();
    let instances = [
        ("commutativity n=5", "M5(a,b,c,d,e)", "M5(b,a,c,d,e)"),
        ("commutativity n=5", "M5(a,b,c,d,e)", "M5(a,b,c,e,d)"),
        ("majority n=7", "M7(a,b,c,d,e,g,!g)", "M5(a,b,c,d,e)"),
        ("associativity n=5", "M5(a,b,c,d,M5(a,b,c,g,h))", "M5(a,b,c,g,M5(a,b,c,d,h))"),
        (
            "distributivity n=7",
            "M7(a,b,c,d,e,g,M7(x,y,z,w,k,t,v))",
            "M7(M7(a,b,c,d,e,g,x),M7(a,b,c,d,e,g,y),M7(a,b,c,d,e,g,z),M7(a,b,c,d,e,g,w),k,t,v)",
        ),
        ("inverter propagation n=9", "!M9(a,b,c,d,e,g,h,x,y)", "M9(!a,!b,!c,!d,!e,!g,!h,!x,!y)"),
    ];
    for (name, lhs, rhs) in instances {
        let mut net = Network::new();
        let l = build_exact(&mut net, lhs).map_err(|e| e.to_string())?;
        let r = build_exact(&mut net, rhs).map_err(|e| e.to_string())?;
        let tables = simulate_many(&net, &[l, r]).map_err(|e| e.to_string())?;
        ensure(tables[0] == tables[1], || format!("{name}: {lhs} != {rhs}"))?;
    }

    // The rules themselves produce the right-hand sides.
    let mut net = Network::new();
    let l = build_exact(&mut net, "M7(a,b,c,d,e,g,!g)").unwrap();
    let r = build_exact(&mut net, "M5(a,b,c,d,e)").unwrap();
    ensure(RewriteRule::MajAnnihilate.apply(&mut net, l.node()) == Ok(r), || "majority rule".into())?;
    let l = build_exact(&mut net, "M9(a,b,c,d,e,g,h,x,y)").unwrap();
    let r = build_exact(&mut net, "M9(!a,!b,!c,!d,!e,!g,!h,!x,!y)").unwrap();
    ensure(inv_propagate(&mut net, !l) == Ok(r), || "inverter propagation rule".into())?;
    let l = build_exact(&mut net, "M5(a,b,c,d,M5(a,b,c,g,h))").unwrap();
    let r = build_exact(&mut net, "M5(a,b,c,g,M5(a,b,c,d,h))").unwrap();
    let found = applicable_rules(&net, l.node())
        .into_iter()
        .filter(|rule| matches!(rule, RewriteRule::AssocSwap { .. }))
        .any(|rule| rule.apply(&mut net.clone(), l.node()) == Ok(r));
    ensure(found, || "associativity rule".into())?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("5 axiom instances bit-exact, {:.2?}", t.elapsed()))
}

fn optimization_example() -> Outcome {
    let t = Instant::now();
    let (net, _) = expr_net("M5(M3(a,b,c),M3(a,b,d),M3(a,b,e),M3(a,b,g),h)");
    let report = alg1_optimize(&net, &OptimizeConfig::default());
    ensure(report.before.size == 5, || format!("initial size {}", report.before.size))?;
    ensure(report.after.size == 4, || format!("optimized size {}", report.after.size))?;
    ensure(outputs_equal(&net, &report.network), || "result not equivalent".into())?;
    let (expected, _) = expr_net("M5(M3(a,b,c),M3(a,b,d),M3(a,b,e),g,h)");
    ensure(outputs_equal(&expected, &report.network), || "unexpected function".into())?;
    within(t, Duration::from_secs(1))?;
    let out = &report.network;
    let shown = to_expr(out, out.output("f").unwrap());
    Ok(format!("size 5 -> 4, {shown}, {:.2?}", t.elapsed()))
}

fn full_adder() -> Outcome {
    let t = Instant::now();
    let net = parse_netlist(
        ".inputs a b cin\n.outputs sum=s cout=m\nm = MAJ(a, b, cin)\np = MAJ(!a, b, cin)\ns = MAJ(a, !m, p)\n",
    )
    .map_err(|e| e.to_string())?;
    ensure(net.output_metrics().size == 3, || "initial network is not three M3".into())?;
    let report = alg1_optimize(&net, &OptimizeConfig::default());
    let m = report.after;
    ensure(m.size == 2 && m.fanin_sum == 8 && m.inverter_count == 2, || format!("got {m}"))?;
    let out = &report.network;
    let parity = brute(3, |x| x[0] ^ x[1] ^ x[2]);
    let majority = brute(3, |x| (x[0] as u8 + x[1] as u8 + x[2] as u8) >= 2);
    ensure(simulate(out, out.output("sum").unwrap()).unwrap() == parity, || "sum is not parity".into())?;
    ensure(simulate(out, out.output("cout").unwrap()).unwrap() == majority, || "cout is not majority".into())?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("size=2 fanin=8 inverters=2, sum={}, {:.2?}", to_expr(out, out.output("sum").unwrap()), t.elapsed()))
}

fn sat_example() -> Outcome {
    let t = Instant::now();
    let (net, f) = expr_net("M5(M3(a,b,c),M5(M5(a,b,c,0,0),!b,c,0,0),!a,!b,0)");
    let r = solve(&net, f);
    ensure(r.status == SatStatus::Unsat, || "solver answered SAT".into())?;
    let exhaustive = (0..8usize).all(|v| !evaluate(&net, f, &[v & 1 == 1, v & 2 == 2, v & 4 == 4]));
    ensure(exhaustive, || "exhaustive enumeration finds a model".into())?;
    let step = r.trace.iter().find(|e| e.rule == RuleTag::MajAnnihilate && e.detail.starts_with("annihilate b/!b"));
    let step = step.ok_or_else(|| "trace lacks the b/!b annihilation".to_string())?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("UNSAT, trace `{}`, {} branches, {:.2?}", step.detail, r.stats.branches, t.elapsed()))
}

fn rebalancing() -> Outcome {
    let t = Instant::now();
    let (net, y) = expr_net("M5(x1,x2,x3,x4,M5(z1,z2,z3,z4,z5))");
    let r = rebalance_late_input(&net, y, "z5").map_err(|e| e.to_string())?;
    ensure((r.before, r.after) == (2, 1), || format!("late-input depth {} -> {}", r.before, r.after))?;
    let before = simulate(&net, y).unwrap();
    let after = simulate(&r.network, r.root).unwrap();
    ensure(before.len() == 512 && before == after, || "not equivalent over 2^9 assignments".into())?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("late-input depth 2 -> 1, {}, {:.2?}", to_expr(&r.network, r.root), t.elapsed()))
}

fn fast_path() -> Outcome {
    let t = Instant::now();
    let cfg = RandomConfig::constant_free();
    let mut max_sims = 0;
    for seed in 0..500u64 {
        let net = random_network(&cfg, 10_000 + seed);
        let f = net.output("f").unwrap();
        let r = constant_free_fast_path(&net, f).ok_or_else(|| format!("seed {seed}: not applicable"))?;
        max_sims = max_sims.max(r.stats.simulations);
        ensure(r.stats.simulations <= 2, || format!("seed {seed}: {} simulations", r.stats.simulations))?;
        let w: Vec<bool> = r.witness.as_ref().unwrap().iter().map(|(_, v)| *v).collect();
        ensure(evaluate(&net, f, &w), || format!("seed {seed}: witness fails"))?;
        let satisfiable = !simulate(&net, f).unwrap().is_const(false);
        ensure(satisfiable == r.is_sat(), || format!("seed {seed}: disagrees with enumeration"))?;
    }
    Ok(format!("500/500 SAT with verified witness, at most {max_sims} simulations, {:.2?}", t.elapsed()))
}

fn and_or_collapse() -> Outcome {
    let t = Instant::now();
    let and = brute(2, |x| x[0] && x[1]);
    let or = brute(2, |x| x[0] || x[1]);
    for n in [3, 5, 7, 9] {
        let mut net = Network::new();
        let a = net.add_input("a").unwrap();
        let b = net.add_input("b").unwrap();
        let ea = net.emulate_and(a, b, n).unwrap();
        let eo = net.emulate_or(a, b, n).unwrap();
        ensure(simulate(&net, ea).unwrap() == and, || format!("M{n} AND"))?;
        ensure(simulate(&net, eo).unwrap() == or, || format!("M{n} OR"))?;
        let pad = vec!["0"; n / 2].join(",");
        let rest = vec!["a"; n - n / 2 - 2].join(",");
        let text = if rest.is_empty() { format!("M{n}({pad},a,b)") } else { format!("M{n}({pad},a,b,{rest})") };
        let e = build_exact(&mut net, &text).unwrap();
        ensure(simulate(&net, e).unwrap() == and, || format!("{text} is not AND"))?;
    }
    Ok(format!("n in 3,5,7,9 bit-exact, {:.2?}", t.elapsed()))
}

fn self_duality() -> Outcome {
    let t = Instant::now();
    let cfg = RandomConfig::constant_free();
    let mut nodes = 0;
    for seed in 0..500u64 {
        let net = random_network(&cfg, 20_000 + seed);
        for (_, e) in net.outputs() {
            ensure(check_self_dual(&net, *e).unwrap(), || format!("seed {seed}: not self-dual"))?;
        }
        for v in net.maj_cone(&net.output_edges()) {
            let mut w = net.clone();
            let e = inv_propagate(&mut w, !Edge::from(v)).map_err(|e| e.to_string())?;
            let tables = simulate_many(&w, &[!Edge::from(v), e]).unwrap();
            ensure(tables[0] == tables[1], || format!("seed {seed}: inverter propagation at {v}"))?;
            w.substitute(v, !e).unwrap();
            ensure(outputs_equal(&net, &w), || format!("seed {seed}: outputs change at {v}"))?;
            nodes += 1;
        }
    }
    Ok(format!("500 self-dual, inverter propagation at {nodes} nodes bit-exact, {:.2?}", t.elapsed()))
}

fn round_trips() -> Outcome {
    let t = Instant::now();
    let cfg = RandomConfig::default();
    for seed in 0..200u64 {
        let net = random_network(&cfg, 30_000 + seed);
        let back = parse_netlist(&write_netlist(&net)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(outputs_equal(&net, &back), || format!("seed {seed}: netlist round trip"))?;

        // Expressions have no sharing, so the printer is exercised on
        // tree-shaped terms.
        let expr = random_expression(&cfg, 40_000 + seed);
        let parsed = parse_expr(&expr.to_string()).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(parsed == expr, || format!("seed {seed}: print/parse changes the expression"))?;
        let mut a = Network::new();
        let ra = build(&mut a, &expr, true).unwrap();
        let printed = to_expr(&a, ra).to_string();
        let mut b = Network::new();
        let rb = build(&mut b, &parse_expr(&printed).map_err(|e| e.to_string())?, true).unwrap();
        ensure(check_equiv(&a, ra, &b, rb).unwrap().is_equivalent(), || format!("seed {seed}: {printed}"))?;
    }
    Ok(format!("200 netlist and 200 expression round trips, {:.2?}", t.elapsed()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("axiom soundness", axiom_soundness),
        ("worked axiom instances", worked_axiom_instances),
        ("optimization example", optimization_example),
        ("full adder", full_adder),
        ("majority SAT example", sat_example),
        ("late-input rebalancing", rebalancing),
        ("constant-free fast path", fast_path),
        ("AND/OR collapse", and_or_collapse),
        ("self-duality", self_duality),
        ("format round trips", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
