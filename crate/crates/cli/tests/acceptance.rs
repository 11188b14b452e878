//! Acceptance suite: every criterion runs at full size and prints one
//! PASS/FAIL line. The test fails if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coreir::exitify::{exitify_program, ExitifyMode};
use coreir::freevars::expr_free_vars;
use coreir::ir::{
    collect_args, collect_n_binders, expr_size, Alt, AltCon, Bind, CoercionAtom, CoreProgram, Expr, IdDetails,
    IdInfo, IdScope, Literal, TypeAtom, Unique, Var,
};
use coreir::lint::{
    is_join_points_valid_program, subst_extends_violation, valid_var_set_check, well_scoped, well_scoped_program,
    well_scoped_program_report, Rule,
};
use coreir::subst::uniq_away;
use coreir::sweep::{failing_seeds, map_seeds};
use coreir::syntax::{parse_program, print_program};
use coreir::testgen::{gen_binder_case, gen_program, gen_subst_pair, GenConfig};
use coreir::varset::{InScopeSet, VarSet};
use coreir_oracle as oracle;

const CASES: u64 = 10_000;

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u8, name: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { id, name, pass, detail: detail.into() }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(name: &str) -> CoreProgram {
    parse_program(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn first_seeds(seeds: &[u64]) -> String {
    let shown: Vec<String> = seeds.iter().take(5).map(u64::to_string).collect();
    format!("failing seeds {}", shown.join(", "))
}

fn program_config(seed: u64) -> GenConfig {
    GenConfig {
        size: 20 + (seed % 100) as usize,
        shadow_p: [0.0, 0.3, 1.0][(seed % 3) as usize],
        join_density: 0.5 + 0.5 * ((seed / 3) % 2) as f64,
    }
}

// ---------------------------------------------------------------------------
// Structural helpers

fn all_binders(p: &[Bind]) -> BTreeSet<Unique> {
    fn expr(e: &Expr, out: &mut BTreeSet<Unique>) {
        match e {
            Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
            Expr::App(f, a) => {
                expr(f, out);
                expr(a, out);
            }
            Expr::Lam(v, b) => {
                out.insert(v.unique());
                expr(b, out);
            }
            Expr::Cast(b, _) => expr(b, out),
            Expr::Let(b, body) => {
                bind(b, out);
                expr(body, out);
            }
            Expr::Case(s, b, _, alts) => {
                expr(s, out);
                out.insert(b.unique());
                for a in alts {
                    out.extend(a.pats.iter().map(Var::unique));
                    expr(&a.rhs, out);
                }
            }
        }
    }
    fn bind(b: &Bind, out: &mut BTreeSet<Unique>) {
        for (v, e) in coreir::ir::flatten_binds(std::slice::from_ref(b)) {
            out.insert(v.unique());
            expr(&e, out);
        }
    }
    let mut out = BTreeSet::new();
    p.iter().for_each(|b| bind(b, &mut out));
    out
}

/// Non-recursive join bindings (and the enclosing let-bodies) anywhere in `p`
/// whose binder unique does not occur in `before`.
fn new_join_binds(before: &BTreeSet<Unique>, p: &[Bind]) -> Vec<(Var, Expr, Expr)> {
    fn go(e: &Expr, before: &BTreeSet<Unique>, out: &mut Vec<(Var, Expr, Expr)>) {
        match e {
            Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
            Expr::App(f, a) => {
                go(f, before, out);
                go(a, before, out);
            }
            Expr::Lam(_, b) | Expr::Cast(b, _) => go(b, before, out),
            Expr::Let(b, body) => {
                if let Bind::NonRec(v, rhs) = &**b {
                    if v.is_join_id() && !before.contains(&v.unique()) {
                        out.push((v.clone(), rhs.clone(), (**body).clone()));
                    }
                }
                for (_, rhs) in coreir::ir::flatten_binds(std::slice::from_ref(&**b)) {
                    go(&rhs, before, out);
                }
                go(body, before, out);
            }
            Expr::Case(s, _, _, alts) => {
                go(s, before, out);
                alts.iter().for_each(|a| go(&a.rhs, before, out));
            }
        }
    }
    let mut out = Vec::new();
    for (_, rhs) in coreir::ir::flatten_binds(p) {
        go(&rhs, before, &mut out);
    }
    out
}

fn head_var(e: &Expr) -> Option<&Var> {
    match collect_args(e).0 {
        Expr::Var(v) => Some(v),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Criteria

fn substitution_theorem() -> Outcome {
    let start = Instant::now();
    let results = map_seeds(0..CASES, |seed| {
        let (s, _, e) = gen_subst_pair(seed, 1 + (seed % 60) as usize);
        let (out, warnings) = s.subst_expr("acceptance", &e);
        (well_scoped(&out, s.in_scope_vars()), warnings.len())
    });
    let violations = results.iter().filter(|(ok, _)| !ok).count();
    let warnings: usize = results.iter().map(|(_, w)| w).sum();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        1,
        "substitution preserves scoping",
        violations == 0 && warnings == 0 && secs < 120.0,
        format!("{CASES} cases, {violations} violations, {warnings} warnings, {secs:.1}s"),
    )
}

fn exitify_theorem() -> Outcome {
    let failing = failing_seeds(0..CASES, |seed| {
        let p = gen_program(seed, program_config(seed));
        match exitify_program(ExitifyMode::Fixed, &p) {
            Ok(q) => well_scoped_program(&q) && is_join_points_valid_program(&q),
            Err(_) => false,
        }
    });
    let changed = map_seeds(0..CASES, |seed| {
        let p = gen_program(seed, program_config(seed));
        exitify_program(ExitifyMode::Fixed, &p).map(|q| q != p).unwrap_or(false)
    })
    .into_iter()
    .filter(|&c| c)
    .count();
    let detail = if failing.is_empty() {
        format!("{CASES} programs, all valid after exitification ({changed} rewritten)")
    } else {
        first_seeds(&failing)
    };
    outcome(2, "exitification preserves both invariants", failing.is_empty(), detail)
}

fn bug_reproduction() -> Outcome {
    let p = load("shadowing.core");
    let before = all_binders(&p);
    let legacy = exitify_program(ExitifyMode::LegacyBug, &p).unwrap();
    let report = well_scoped_program_report(&legacy);
    let at_jump_arg = report.violations.iter().any(|v| {
        v.rule == Rule::ScopeAlmostEqual && v.path.ends_with("app.arg") && v.detail.contains("x_2:TBool")
    });
    let legacy_exits = new_join_binds(&before, &legacy);
    let legacy_abstracts_both = legacy_exits.len() == 1 && legacy_exits[0].0.join_arity() == Some(2);

    let fixed = exitify_program(ExitifyMode::Fixed, &p).unwrap();
    let fixed_ok = well_scoped_program(&fixed) && is_join_points_valid_program(&fixed);
    let fixed_exits = new_join_binds(&before, &fixed);
    let one_param = fixed_exits.len() == 1
        && fixed_exits[0].0.join_arity() == Some(1)
        && collect_n_binders(1, &fixed_exits[0].1).is_ok_and(|(ps, _)| ps[0].ty == TypeAtom::new("TInt"));
    let pass = !report.ok() && at_jump_arg && legacy_abstracts_both && fixed_ok && one_param;
    outcome(
        3,
        "shadowing bug reproduced and fixed",
        pass,
        format!(
            "legacy: {} violation(s), almostEqual at jump argument {at_jump_arg}; fixed: valid {fixed_ok}, single TInt parameter {one_param}",
            report.violations.len()
        ),
    )
}

fn worked_example() -> Outcome {
    let p = load("j_go.core");
    let before = all_binders(&p);
    let fixed = exitify_program(ExitifyMode::Fixed, &p).unwrap();
    let golden = std::fs::read_to_string(fixture("j_go.golden.core")).unwrap();
    let matches_golden = print_program(&fixed) == golden && parse_program(&golden).unwrap() == fixed;
    let exits = new_join_binds(&before, &fixed);
    let mut structural = false;
    if let [(exit, rhs, body)] = exits.as_slice() {
        let applies_t = collect_n_binders(1, rhs).is_ok_and(|(_, b)| head_var(b).is_some_and(|h| h.occ() == "t"));
        let jumps_to_exit = match body {
            Expr::Let(b, _) => match &**b {
                Bind::Rec(pairs) => pairs.iter().any(|(_, rhs)| {
                    let (_, inner) = collect_n_binders(3, rhs).unwrap();
                    match inner {
                        Expr::Case(_, _, _, alts) => alts.iter().any(|a| {
                            a.con == AltCon::Lit(Literal::Int(0)) && head_var(&a.rhs).is_some_and(|h| h == exit)
                        }),
                        _ => false,
                    }
                }),
                Bind::NonRec(..) => false,
            },
            _ => false,
        };
        structural = exit.join_arity() == Some(1) && applies_t && jumps_to_exit;
    }
    outcome(
        4,
        "worked exitification example",
        matches_golden && structural,
        format!("golden match {matches_golden}, one arity-1 exit applying t and jumped to from the loop {structural}"),
    )
}

fn random_var(rng: &mut ChaCha8Rng) -> Var {
    let n = rng.gen_range(1..30);
    let base = if rng.gen_bool(0.7) { Var::local("v", n) } else { Var::global("g", n) };
    let details = if rng.gen_bool(0.3) { IdDetails::Join(rng.gen_range(0..4)) } else { IdDetails::Vanilla };
    let mut v = base
        .with_type(TypeAtom::new(&format!("T{}", rng.gen_range(0..4))))
        .with_details(details)
        .with_info(if rng.gen_bool(0.2) { IdInfo::new("i") } else { IdInfo::default() });
    if rng.gen_bool(0.1) {
        v.scope = if v.scope == IdScope::LocalId { IdScope::GlobalId } else { IdScope::LocalId };
    }
    if rng.gen_bool(0.1) {
        v.name.unique.number += 1;
    }
    v
}

fn uniq_away_axioms() -> Outcome {
    let failing = failing_seeds(0..CASES, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(0..25);
        let iss = InScopeSet::new((0..k).map(|_| random_var(&mut rng)).collect());
        let v = random_var(&mut rng);
        let w = uniq_away(&iss, &v);
        let fresh = iss.lookup(&w).is_none();
        let sync = v.name.unique != v.unique() || w.name.unique == w.unique();
        let local_id = w.is_local_var() == v.is_local_var();
        let details = w.details == v.details;
        let scope = w.scope == v.scope;
        let same = w.unique() != v.unique() || w == v;
        let locality = w.unique().class == v.unique().class;
        fresh && sync && local_id && details && scope && same && locality
    });
    outcome(
        5,
        "fresh-name axioms",
        failing.is_empty(),
        if failing.is_empty() { format!("{CASES} pairs, 0 failures") } else { first_seeds(&failing) },
    )
}

fn well_scoped_subset() -> Outcome {
    let failing = failing_seeds(0..CASES, |seed| {
        let (_, scope, e) = gen_subst_pair(seed, 1 + (seed % 80) as usize);
        well_scoped(&e, &scope) && expr_free_vars(&e).is_subset_of(&scope)
    });
    outcome(
        6,
        "free variables lie within a scoping set",
        failing.is_empty(),
        if failing.is_empty() { format!("{CASES} cases, 0 failures") } else { first_seeds(&failing) },
    )
}

fn checker_fidelity() -> Outcome {
    let agree = |p: &CoreProgram| {
        well_scoped_program(p) == oracle::well_scoped_program(p)
            && is_join_points_valid_program(p) == oracle::join_points_valid_program(p)
    };
    let generated = failing_seeds(0..CASES, |seed| agree(&gen_program(seed, program_config(seed))));
    let mutants = failing_seeds(0..CASES, |seed| agree(&oracle::mutate(&gen_program(seed, program_config(seed)), seed)));
    let edges = oracle::edge_cases();
    let edge_failures: Vec<&str> = edges.iter().filter(|(_, p)| !agree(p)).map(|(n, _)| n.as_str()).collect();
    let pass = generated.is_empty() && mutants.is_empty() && edge_failures.is_empty() && edges.len() >= 50;
    outcome(
        7,
        "checkers agree with naive transcriptions",
        pass,
        format!(
            "{CASES} generated ({} disagree), {CASES} mutated ({} disagree), {} edge fixtures ({} disagree)",
            generated.len(),
            mutants.len(),
            edges.len(),
            edge_failures.len()
        ),
    )
}

fn subst_extends_suite() -> Outcome {
    let failing = failing_seeds(0..CASES, |seed| {
        let (s, vars) = gen_binder_case(seed);
        let (s2, out) = s.subst_bndrs("acceptance", &vars);
        let (s3, out_rec) = s.subst_rec_bndrs("acceptance", &vars);
        subst_extends_violation(&s, &vars, &s2, &out).is_none() && subst_extends_violation(&s, &vars, &s3, &out_rec).is_none()
    });
    let renamed = map_seeds(0..CASES, |seed| {
        let (s, vars) = gen_binder_case(seed);
        s.subst_bndrs("acceptance", &vars).1 != vars
    })
    .into_iter()
    .filter(|&r| r)
    .count();
    outcome(
        8,
        "binder renaming extends the substitution",
        failing.is_empty(),
        if failing.is_empty() {
            format!("{CASES} binder lists, 0 failures ({renamed} needed renaming)")
        } else {
            first_seeds(&failing)
        },
    )
}

fn var_set_validity() -> Outcome {
    let failing = failing_seeds(0..CASES, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(0..=100);
        let mut set = VarSet::new();
        for _ in 0..len {
            let other: VarSet = (0..rng.gen_range(0..4)).map(|_| random_var(&mut rng)).collect();
            let v = random_var(&mut rng);
            set = match rng.gen_range(0..8) {
                0 => set.extended(v),
                1 => set.without(&v),
                2 => set.union(&other),
                3 => set.minus(&other),
                4 => set.extended_list(other.iter().cloned()),
                5 => set.without_list(other.iter()),
                6 => {
                    let k = rng.gen_range(0..3);
                    set.filter(|w| w.unique().number % 3 != k)
                }
                _ => {
                    let mut s = set.clone();
                    s.insert(v);
                    s
                }
            };
            if !valid_var_set_check(&set) {
                return false;
            }
        }
        true
    });
    outcome(
        9,
        "variable sets stay key-consistent",
        failing.is_empty(),
        if failing.is_empty() { format!("{CASES} sequences, 0 invalid") } else { first_seeds(&failing) },
    )
}

fn size_conformance() -> Outcome {
    let x = Var::local("x", 1);
    let b = Var::local("b", 2);
    let lit = || Expr::int(1);
    let cases: Vec<(&str, Expr, usize)> = vec![
        ("var", Expr::var(x.clone()), 1),
        ("lit", Expr::int(42), 1),
        ("type", Expr::Type(TypeAtom::default()), 1),
        ("coercion", Expr::Coercion(CoercionAtom::new("Co")), 1),
        ("app", Expr::app(Expr::var(x.clone()), lit()), 2),
        ("lam", Expr::lam(x.clone(), lit()), 2),
        ("let nonrec", Expr::let_(Bind::NonRec(x.clone(), lit()), lit()), 3),
        ("let rec", Expr::let_(Bind::Rec(vec![(x.clone(), lit()), (b.clone(), lit())]), lit()), 5),
        ("cast", Expr::cast(lit(), CoercionAtom::new("Co")), 2),
        (
            "case",
            Expr::case(Expr::var(x.clone()), b.clone(), TypeAtom::default(), vec![Alt { con: AltCon::Default, pats: vec![], rhs: lit() }]),
            5,
        ),
        (
            "case with patterns",
            Expr::case(
                Expr::var(x.clone()),
                b.clone(),
                TypeAtom::default(),
                vec![
                    Alt { con: AltCon::Data("Pair".into()), pats: vec![Var::local("p", 3), Var::local("q", 4)], rhs: lit() },
                    Alt { con: AltCon::Default, pats: vec![], rhs: Expr::app(lit(), lit()) },
                ],
            ),
            8,
        ),
    ];
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(_, e, want)| expr_size(e) != *want)
        .map(|(n, e, want)| format!("{n}: got {} want {want}", expr_size(e)))
        .collect();
    outcome(
        10,
        "expression size clauses",
        wrong.is_empty(),
        if wrong.is_empty() { format!("{} clauses exact", cases.len()) } else { wrong.join("; ") },
    )
}

fn run_cli(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_coreir"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn frontend() -> Outcome {
    let round_trip = failing_seeds(0..CASES, |seed| {
        let p = gen_program(seed, program_config(seed));
        let text = print_program(&p);
        parse_program(&text).is_ok_and(|q| q == p && print_program(&q) == text)
    });

    let dir = tempfile::tempdir().unwrap();
    let mut fmt_ok = true;
    for name in ["shadowing.core", "j_go.core", "out_of_scope.core", "free_z.core"] {
        let once = run_cli(&["fmt", fixture(name).to_str().unwrap()], None);
        let tmp = dir.path().join(name);
        std::fs::write(&tmp, &once.stdout).unwrap();
        let twice = run_cli(&["fmt", tmp.to_str().unwrap()], None);
        fmt_ok &= once.status.code() == Some(0) && once.stdout == twice.stdout;
    }
    let bad = dir.path().join("bad.core");
    std::fs::write(&bad, "let f_1g = ;").unwrap();
    let bad_spec = dir.path().join("bad.subst");
    std::fs::write(&bad_spec, "inscope { } map { x_1 => ; }").unwrap();

    let f = |n: &str| fixture(n).to_str().unwrap().to_string();
    let legacy = run_cli(&["exitify", "--legacy-bug", &f("shadowing.core")], None);
    let out_of_scope = run_cli(&["lint", &f("out_of_scope.core")], None);
    let checks: Vec<(&str, Output, i32)> = vec![
        ("lint clean", run_cli(&["lint", "--join-points", &f("j_go.core")], None), 0),
        ("lint out of scope", out_of_scope.clone(), 1),
        ("lint parse error", run_cli(&["lint", bad.to_str().unwrap()], None), 2),
        ("lint missing file argument", run_cli(&["lint"], None), 3),
        ("lint unknown flag", run_cli(&["lint", "--bogus", &f("j_go.core")], None), 3),
        ("exitify fixed", run_cli(&["exitify", &f("shadowing.core")], None), 0),
        ("exitify legacy piped to lint", run_cli(&["lint", "-"], Some(&legacy.stdout)), 1),
        ("exitify malformed join", run_cli(&["exitify", &f("malformed_join.core")], None), 1),
        ("subst clean", run_cli(&["subst", &f("out_of_scope.core"), "--spec", &f("shadow.subst")], None), 0),
        ("subst with warning", run_cli(&["subst", &f("free_z.core"), "--spec", &f("shadow.subst")], None), 1),
        ("subst bad spec", run_cli(&["subst", &f("j_go.core"), "--spec", bad_spec.to_str().unwrap()], None), 2),
        ("subst missing spec", run_cli(&["subst", &f("j_go.core")], None), 3),
    ];
    let wrong: Vec<String> = checks
        .iter()
        .filter(|(_, out, want)| out.status.code() != Some(*want))
        .map(|(n, out, want)| format!("{n}: exit {:?} want {want}", out.status.code()))
        .collect();
    let names_rule = String::from_utf8_lossy(&out_of_scope.stdout).contains("WellScopedVar/None");
    let pass = round_trip.is_empty() && fmt_ok && wrong.is_empty() && names_rule && legacy.status.code() == Some(0);
    let mut detail = format!(
        "{CASES} round trips ({} failed), fmt idempotent {fmt_ok}, {} exit-code checks ({} wrong)",
        round_trip.len(),
        checks.len(),
        wrong.len()
    );
    if !wrong.is_empty() {
        detail.push_str(&format!(": {}", wrong.join("; ")));
    }
    outcome(11, "syntax round trip and command-line behaviour", pass, detail)
}

#[test]
fn acceptance() {
    let outcomes = vec![
        substitution_theorem(),
        exitify_theorem(),
        bug_reproduction(),
        worked_example(),
        uniq_away_axioms(),
        well_scoped_subset(),
        checker_fidelity(),
        subst_extends_suite(),
        var_set_validity(),
        size_conformance(),
        frontend(),
    ];
    for o in &outcomes {
        println!("criterion {:>2} {}: {} ({})", o.id, if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
