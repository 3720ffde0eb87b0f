//! Acceptance run: one PASS/FAIL line per criterion. Known failures are
//! listed in `EXPECTED_FAIL` together with the reason; the run exits
//! non-zero only if the set of failing criteria differs from it.

use std::collections::BTreeSet;
use std::time::Instant;

use maxones_core::classify::{classify, Class, ClassifyOptions, Verdict};
use maxones_core::clone::ConstraintLanguage;
use maxones_core::delta::{in_q, is_coupled, is_delta_matroid};
use maxones_core::gadget::{catalog, nand_chain, verify_catalog, verify_gadget, Gadget, LinkKind, SearchOutcome};
use maxones_core::relation::{c0, c1, eq, impl_rel, nand, neq, or2, Relation};
use maxones_core::solver::{
    cycle_reduction, drop_constants, greedy_apx, max2sat3_gadget_chain, mis_to_maxones, random, solve_exact,
    solve_ilp2, to_ilp2, Formula, Instance, Weight, WeightedGraph, GADGET_OPTIMUM,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 4: the printed A5 cycle and the printed A3, ABC3 and ABC6 implementations
/// do not verify as written; reordered scopes (and ABC5 as the target of
/// ABC6) do, and the run reports both.
/// 10: {EQ3, c0, c1} with two occurrences is listed as APX-complete, but EQ3
/// is closed under disjunction, so the first tractable case applies.
const EXPECTED_FAIL: &[usize] = &[4, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---- independent oracles ----

fn bit(c: u32, n: usize, i: usize) -> bool {
    (c >> (n - i)) & 1 == 1
}

fn oracle_delta(r: &Relation) -> bool {
    let n = r.arity();
    let codes: Vec<u32> = r.codes().collect();
    codes.iter().all(|&x| {
        codes.iter().all(|&y| {
            (1..=n).filter(|&i| bit(x, n, i) != bit(y, n, i)).all(|i| {
                let xi = x ^ (1 << (n - i));
                r.contains_code(xi)
                    || (1..=n)
                        .filter(|&j| j != i && bit(x, n, j) != bit(y, n, j))
                        .any(|j| r.contains_code(xi ^ (1 << (n - j))))
            })
        })
    })
}

fn closed3(r: &Relation, op: impl Fn(u32, u32, u32) -> u32) -> bool {
    let codes: Vec<u32> = r.codes().collect();
    codes
        .iter()
        .all(|&a| codes.iter().all(|&b| codes.iter().all(|&c| r.contains_code(op(a, b, c)))))
}

fn majority(a: u32, b: u32, c: u32) -> u32 {
    (a & b) | (a & c) | (b & c)
}

fn brute_mis(g: &WeightedGraph) -> Weight {
    let n = g.names.len();
    let mut adj = vec![0u32; n];
    for &(a, b) in &g.edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut best = Weight::from_integer(0);
    for m in 0u32..1 << n {
        if (0..n).all(|v| m >> v & 1 == 0 || adj[v] & m == 0) {
            let w: Weight = (0..n).filter(|v| m >> v & 1 == 1).map(|v| g.weights[v]).sum();
            best = best.max(w);
        }
    }
    best
}

fn opt(inst: &Instance) -> Option<Weight> {
    solve_exact(inst).expect("within budget").map(|s| s.measure)
}

fn add_constants(rng: &mut impl Rng, inst: &mut Instance, cap: usize) {
    inst.add_relation("C0", c0());
    inst.add_relation("C1", c1());
    let occ = inst.occurrences();
    for (v, &o) in occ.iter().enumerate() {
        if o < cap && rng.gen_bool(0.2) {
            let name = if rng.gen_bool(0.5) { "C0" } else { "C1" };
            inst.add_constraint(name, vec![v]).expect("valid");
        }
    }
}

// ---- criteria ----

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    for m in 2..=5 {
        if !is_delta_matroid(&nand(m)) || !oracle_delta(&nand(m)) {
            bad.push(format!("NAND{m}"));
        }
    }
    for m in 3..=5 {
        if is_delta_matroid(&eq(m)) || oracle_delta(&eq(m)) {
            bad.push(format!("EQ{m}"));
        }
    }
    if is_delta_matroid(&nand_chain()) || oracle_delta(&nand_chain()) {
        bad.push("chain".into());
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 1.0, format!("mismatches {bad:?}, {secs:.3}s"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let (mut checked, mut failures) = (0usize, 0usize);
    for n in 1..=4usize {
        for mask in 0u64..1 << (1 << n) {
            let r = Relation::from_small_mask(n, mask).expect("small arity");
            if !closed3(&r, majority) || !oracle_delta(&r) {
                continue;
            }
            checked += 1;
            if !in_q(&r).is_some_and(|q| q.reassemble() == r) {
                failures += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 300.0,
        format!("{checked} relations in ID2 with the two-step property, {failures} failures, {secs:.1}s"),
    )
}

fn criterion_3() -> Outcome {
    let (mut checked, mut failures) = (0usize, 0usize);
    for n in 1..=4usize {
        for mask in 1u64..1 << (1 << n) {
            let r = Relation::from_small_mask(n, mask).expect("small arity");
            if !closed3(&r, |a, b, c| a ^ b ^ c) {
                continue;
            }
            checked += 1;
            if is_coupled(&r).expect("affine") == oracle_delta(&r) {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checked} affine relations, {failures} failures"))
}

fn lang(rels: &[(&str, Relation)]) -> ConstraintLanguage {
    ConstraintLanguage::from_relations("env", rels.iter().cloned())
}

fn check_gadget(text: &str, target: &Relation, env: &ConstraintLanguage) -> bool {
    let g = Gadget::parse(text).expect("gadget text");
    verify_gadget(target, &g, env).unwrap_or(false)
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut printed_ok = true;
    let eq_via_neq = "gadget target=EQ2 k=3 primaries=2 aux=1\nNEQ x1 y1\nNEQ y1 x2\n";
    let impl_via = "gadget target=IMPL k=3 primaries=2 aux=1\nNAND2 x1 y1\nOR2 y1 x2\n";
    ok &= check_gadget(eq_via_neq, &eq(2), &lang(&[("NEQ", neq())]));
    ok &= check_gadget(impl_via, &impl_rel(), &lang(&[("NAND2", nand(2)), ("OR2", or2())]));

    let table: Vec<(&str, Relation)> = TABLES
        .iter()
        .map(|(n, t)| (*n, Relation::from_strs(3, &t.split_whitespace().collect::<Vec<_>>()).unwrap()))
        .collect();
    let get = |n: &str| table.iter().find(|(m, _)| *m == n).unwrap().1.clone();
    let env = |n: &str| lang(&[(n, get(n)), ("NAND2", nand(2))]);

    // A5(y_i, x_i, z_i) & NAND2(z_i, y_{i+1}), with z_i written y_{i+3}
    let a5 = |order: [usize; 3]| {
        let mut s = String::from("gadget target=EQ3 k=2 primaries=3 aux=6\n");
        for i in 1..=3 {
            let vars = [format!("y{i}"), format!("x{i}"), format!("y{}", i + 3)];
            let args: Vec<&str> = order.iter().map(|&j| vars[j].as_str()).collect();
            s.push_str(&format!("A5 {}\nNAND2 y{} y{}\n", args.join(" "), i + 3, i % 3 + 1));
        }
        s
    };
    let a5_literal = check_gadget(&a5([0, 1, 2]), &eq(3), &env("A5"));
    let a5_reordered = check_gadget(&a5([0, 2, 1]), &eq(3), &env("A5"));
    if !a5_literal {
        notes.push(format!("printed A5 cycle fails, scope order (y,z,x) {}", if a5_reordered { "ok" } else { "FAILS" }));
    }
    printed_ok &= a5_literal;
    ok &= a5_reordered;

    // (source, printed target, printed formula, accepted formula, accepted target)
    let rows = [
        ("A3", "ABC5", "A3 x1 y1 x3\nNAND2 y1 x2", "A3 x1 x3 y1\nNAND2 y1 x2", "ABC5"),
        ("AB1", "ABC5", "AB1 x1 y1 y2\nNAND2 y1 x2\nNAND2 y2 x3", "AB1 x1 y1 y2\nNAND2 y1 x2\nNAND2 y2 x3", "ABC5"),
        ("BC4", "ABC5", "BC4 x1 y1 x2\nNAND2 y1 x3", "BC4 x1 y1 x2\nNAND2 y1 x3", "ABC5"),
        ("ABC3", "ABC5", "ABC3 x1 y1 x3\nNAND2 y1 x2", "ABC3 x1 x3 y1\nNAND2 y1 x2", "ABC5"),
        ("ABC6", "ABC1", "ABC6 y1 x2 x3\nNAND2 y1 x1", "ABC6 y1 x2 x3\nNAND2 y1 x1", "ABC5"),
    ];
    for (src, printed, literal, accepted, target) in rows {
        let aux = literal.matches("NAND2").count();
        let head = |t: &str| format!("gadget target={t} k=2 primaries=3 aux={aux}\n");
        let lit_ok = check_gadget(&(head(printed) + literal), &get(printed), &env(src));
        let acc_ok = check_gadget(&(head(target) + accepted), &get(target), &env(src));
        if !lit_ok {
            notes.push(format!("printed {src} fails, reordered -> {target} {}", if acc_ok { "ok" } else { "FAILS" }));
        }
        printed_ok &= lit_ok;
        ok &= acc_ok;
    }

    let mut mismatched = Vec::new();
    for e in catalog() {
        let expected = TABLES.iter().find(|(n, _)| *n == e.name).map(|(_, t)| *t);
        if expected != Some(e.tuples) {
            mismatched.push(e.name);
        }
    }
    let report = verify_catalog();
    ok &= mismatched.is_empty() && catalog().len() == 30 && report.all_passed();
    notes.push(format!("catalog text mismatches {mismatched:?}, {}", report.summary()));
    outcome(ok && printed_ok, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut runs, mut bad) = (0, 0);
    for l in [2usize, 3, 4] {
        for _ in 0..70 {
            let n = rng.gen_range(3..=12);
            let mut inst = random::nand_instance(&mut rng, n, l);
            add_constants(&mut rng, &mut inst, l);
            runs += 1;
            let best = opt(&inst);
            match greedy_apx(&inst, l) {
                Ok(s) => {
                    let feasible = inst.satisfies(&s.assignment) && s.measure == inst.measure(&s.assignment);
                    let b = best.expect("greedy found a solution");
                    if !feasible || s.measure * Weight::from_integer(l as i64 + 1) < b {
                        bad += 1;
                    }
                }
                // infeasible instances must be reported as such by both
                Err(_) => bad += usize::from(best.is_some()),
            }
        }
    }
    outcome(bad == 0, format!("{runs} instances, {bad} violations"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut runs, mut bad) = (0, 0);
    for _ in 0..220 {
        let n = rng.gen_range(2..=12);
        let inst = random::q_instance(&mut rng, n);
        runs += 1;
        let model = to_ilp2(&inst).expect("Q instance");
        let cols_ok = model.column_sums().iter().all(|&s| s <= 2);
        let a = solve_ilp2(&model).expect("within budget").map(|s| s.measure);
        if !cols_ok || inst.max_occurrence() > 2 || a != opt(&inst) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{runs} instances, {bad} violations"))
}

fn formulas() -> Vec<Formula> {
    let mut clauses = Vec::new();
    for a in 1..=3i32 {
        for b in a + 1..=3 {
            for sa in [1, -1] {
                for sb in [1, -1] {
                    clauses.push([sa * a, sb * b]);
                }
            }
        }
    }
    let mut out = Vec::new();
    for mask in 1u32..1 << clauses.len() {
        if mask.count_ones() > 4 {
            continue;
        }
        let cs: Vec<[i32; 2]> = (0..clauses.len()).filter(|i| mask >> i & 1 == 1).map(|i| clauses[i]).collect();
        let vars = cs.iter().flatten().map(|l| l.unsigned_abs()).max().unwrap() as usize;
        let fine = (1..=vars as i32).all(|v| {
            let lits: Vec<i32> = cs.iter().flatten().copied().filter(|l| l.abs() == v).collect();
            lits.len() <= 3 && lits.contains(&v) && lits.contains(&-v)
        });
        if fine {
            out.push(Formula { vars, clauses: cs });
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let single = Formula::parse("clause 1 -1\n").expect("formula");
    let ch = max2sat3_gadget_chain(&single).expect("chain");
    let mut g = ch.graph.clone();
    g.names.truncate(21);
    g.weights.truncate(21);
    g.edges.retain(|&(a, b)| a < 21 && b < 21);
    let gadget_opt = brute_mis(&g);
    let mut ok = gadget_opt == Weight::from_integer(GADGET_OPTIMUM);

    let fs = formulas();
    let mut bad = 0;
    for f in &fs {
        let ch = max2sat3_gadget_chain(f).expect("chain");
        let opt_i = f.max_satisfied().expect("small") as i64;
        let opt_g = opt(&mis_to_maxones(&ch.graph, 3).expect("degree 3")).expect("feasible");
        if opt(&ch.instance) != Some(opt_g) {
            bad += 1;
        }
        for a in 0u32..1 << f.vars {
            let s: Vec<bool> = (0..f.vars).map(|v| a >> v & 1 == 1).collect();
            let set = ch.consistent_solution(&s);
            let back = ch.extract_assignment(&set);
            let lhs = opt_i - f.satisfied(&back) as i64;
            let rhs = opt_g - ch.graph.weight_of(&set);
            if !ch.graph.is_independent(&set) || Weight::from_integer(lhs.abs()) != num_abs(rhs) {
                bad += 1;
            }
        }
    }
    ok &= bad == 0 && !fs.is_empty();
    outcome(ok, format!("gadget optimum {gadget_opt}, {} formulas, {bad} violations", fs.len()))
}

fn num_abs(w: Weight) -> Weight {
    if w < Weight::from_integer(0) {
        -w
    } else {
        w
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = Gadget::parse("gadget target=IMPL k=3 primaries=2 aux=1\nNAND2 x1 y1\nOR2 y1 x2\n").expect("gadget");
    let env = lang(&[("NAND2", nand(2)), ("OR2", or2())]);
    let (mut runs, mut bad) = (0, 0);
    for _ in 0..60 {
        let n = rng.gen_range(2..=5);
        let inst = random::mixed_instance(&mut rng, n, 4);
        let out = cycle_reduction(&inst, LinkKind::Impl, &g, &env).expect("reduction");
        runs += 1;
        if out.max_occurrence() > 3 || opt(&inst) != opt(&out) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{runs} instances, {bad} violations"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut runs, mut bad) = (0, 0);
    while runs < 40 {
        let n = rng.gen_range(2..=6);
        let mut inst = random::nand_instance(&mut rng, n, 3);
        add_constants(&mut rng, &mut inst, 3);
        if !inst.constraints.iter().any(|c| c.relation.starts_with('C')) {
            continue;
        }
        runs += 1;
        let (out, map) = drop_constants(&inst, "NAND2").expect("NAND2 forces zeros");
        let (before, after) = (opt(&inst), opt(&out));
        let top = inst.total_weight().to_integer() + 1;
        for k in 0..=top {
            let k = Weight::from_integer(k);
            let b = before.is_some_and(|m| m >= k);
            let a = after.is_some_and(|m| m >= map.apply(k).expect("non-negative"));
            if a != b {
                bad += 1;
                break;
            }
        }
    }
    outcome(bad == 0, format!("{runs} instances, {bad} violations"))
}

fn criterion_10() -> Outcome {
    let opts = ClassifyOptions::default();
    let conservative = |rels: &[(&str, Relation)]| {
        let mut l = lang(rels);
        l.make_conservative();
        l
    };
    let apx_branch = |c: &Class| {
        matches!(c, Class::Conditional { if_not, outcome, .. }
            if **if_not == Class::ApxComplete && *outcome == SearchOutcome::Exhausted)
    };
    type Check = Box<dyn Fn(&Class) -> bool>;
    let mut cases: Vec<(String, ConstraintLanguage, usize, Check)> = vec![
        ("{IMPL,c0,c1} k=3".into(), conservative(&[("IMPL", impl_rel())]), 3, Box::new(|c| *c == Class::Po)),
        ("{NAND2,c0,c1} k=3".into(), conservative(&[("NAND2", nand(2))]), 3, Box::new(apx_branch)),
        (
            "{EQ2,NAND2,c0,c1} k=3".into(),
            conservative(&[("EQ2", eq(2)), ("NAND2", nand(2))]),
            3,
            Box::new(|c| *c == Class::PolyApxComplete),
        ),
        (
            "{EQ3,c0,c1} k=2".into(),
            conservative(&[("EQ3", eq(3))]),
            2,
            Box::new(|c| *c == Class::ApxComplete),
        ),
        ("{OR2} k=3".into(), lang(&[("OR2", or2())]), 3, Box::new(|c| *c == Class::Trivial1Valid)),
    ];
    for m in 2..=4 {
        cases.push((
            format!("{{NAND{m},IMPL,c0,c1}} k=2"),
            conservative(&[(&format!("NAND{m}"), nand(m)), ("IMPL", impl_rel())]),
            2,
            Box::new(|c| *c == Class::Po),
        ));
    }
    let mut failed = Vec::new();
    for (name, l, k, check) in &cases {
        let v: Verdict = classify(l, *k, &opts).expect("classify");
        if !check(&v.class) || !v.reverify() || v.evidence.is_empty() {
            failed.push(format!("{name} got {}", v.class));
        }
    }
    outcome(failed.is_empty(), format!("{} cases, mismatches: {failed:?}", cases.len()))
}

/// Independent transcription of the 30 non-Δ-matroid ternary relations.
const TABLES: [(&str, &str); 30] = [
    ("1", "111 000"),
    ("2", "110 001"),
    ("A1", "000 111 010"),
    ("A2", "100 011 110"),
    ("A3", "010 101 000"),
    ("A4", "110 001 100"),
    ("A5", "101 010 111"),
    ("A6", "111 000 101"),
    ("C1", "000 111 011"),
    ("C2", "100 011 111"),
    ("C3", "010 101 001"),
    ("C4", "110 001 101"),
    ("C5", "011 100 011"),
    ("C6", "111 000 100"),
    ("BC1", "000 111 001 011"),
    ("BC2", "100 011 101 111"),
    ("BC3", "010 101 011 001"),
    ("BC4", "001 110 000 010"),
    ("AB1", "000 111 010 001"),
    ("AB2", "100 011 110 101"),
    ("AB3", "010 101 000 011"),
    ("AB4", "110 001 100 111"),
    ("AB5", "011 100 001 010"),
    ("AB6", "111 000 101 110"),
    ("ABC1", "000 111 010 001 011"),
    ("ABC2", "100 011 110 101 111"),
    ("ABC3", "010 101 000 011 001"),
    ("ABC4", "110 001 100 111 101"),
    ("ABC5", "011 100 001 010 000"),
    ("ABC6", "111 000 101 110 100"),
];

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failing = BTreeSet::new();
    for (i, f) in criteria {
        let o = f();
        println!("criterion {i:>2}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failing.insert(i);
        }
    }
    let expected: BTreeSet<usize> = EXPECTED_FAIL.iter().copied().collect();
    if failing != expected {
        eprintln!("failing criteria {failing:?}, expected {expected:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} passed, known failures {expected:?}", 10 - failing.len());
}
