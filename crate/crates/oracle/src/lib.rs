//! Deliberately naive reference implementations of the scope and join-point
//! checkers and of free variables.
//!
//! Nothing here shares code with `coreir`'s checkers beyond the AST types:
//! scopes are association lists searched from the newest entry, and every
//! predicate is a direct recursive transcription returning `bool`.

use std::collections::BTreeSet;

use coreir::ir::{Bind, Expr, IdDetails, IdScope, ScopeClass, Unique, Var};

/// A scope as a list of bindings; later entries shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Scope(Vec<Var>);

impl Scope {
    pub fn new() -> Self {
        Scope(Vec::new())
    }

    pub fn from_vars<'a>(vs: impl IntoIterator<Item = &'a Var>) -> Self {
        Scope(vs.into_iter().cloned().collect())
    }

    fn lookup(&self, u: Unique) -> Option<&Var> {
        self.0.iter().rev().find(|v| v.unique == u)
    }

    fn with(&self, vs: &[Var]) -> Scope {
        let mut s = self.0.clone();
        s.extend(vs.iter().cloned());
        Scope(s)
    }

    fn without(&self, vs: &[Var]) -> Scope {
        Scope(self.0.iter().filter(|v| !vs.iter().any(|w| w.unique == v.unique)).cloned().collect())
    }

    fn has(&self, u: Unique) -> bool {
        self.lookup(u).is_some()
    }
}

fn is_local_var(v: &Var) -> bool {
    v.scope == IdScope::LocalId
}

fn good_var(v: &Var) -> bool {
    let unique_says_local = v.unique.class == ScopeClass::Local;
    unique_says_local == is_local_var(v) && v.unique == v.name.unique
}

fn good_local_var(v: &Var) -> bool {
    good_var(v) && is_local_var(v)
}

fn almost_equal(a: &Var, b: &Var) -> bool {
    a.name == b.name && a.unique == b.unique && a.ty == b.ty && a.scope == b.scope && a.details == b.details
}

fn join_arity(v: &Var) -> Option<usize> {
    match v.details {
        IdDetails::Join(a) => Some(a),
        IdDetails::Vanilla => None,
    }
}

fn is_join(v: &Var) -> bool {
    join_arity(v).is_some()
}

fn no_dup(vs: &[Var]) -> bool {
    let mut seen = BTreeSet::new();
    vs.iter().all(|v| seen.insert(v.unique))
}

fn binders(b: &Bind) -> Vec<Var> {
    match b {
        Bind::NonRec(v, _) => vec![v.clone()],
        Bind::Rec(ps) => ps.iter().map(|(v, _)| v.clone()).collect(),
    }
}

fn flatten(p: &[Bind]) -> Vec<(Var, Expr)> {
    p.iter()
        .flat_map(|b| match b {
            Bind::NonRec(v, e) => vec![(v.clone(), e.clone())],
            Bind::Rec(ps) => ps.clone(),
        })
        .collect()
}

pub fn well_scoped_var(v: &Var, scope: &Scope) -> bool {
    if is_local_var(v) {
        match scope.lookup(v.unique) {
            None => false,
            Some(w) => almost_equal(v, w) && good_var(v),
        }
    } else {
        good_var(v)
    }
}

pub fn well_scoped(e: &Expr, scope: &Scope) -> bool {
    match e {
        Expr::Var(v) => well_scoped_var(v, scope),
        Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => true,
        Expr::App(f, a) => well_scoped(f, scope) && well_scoped(a, scope),
        Expr::Lam(v, body) => good_local_var(v) && well_scoped(body, &scope.with(std::slice::from_ref(v))),
        Expr::Let(b, body) => well_scoped_bind(b, scope) && well_scoped(body, &scope.with(&binders(b))),
        Expr::Case(scrut, bndr, _, alts) => {
            well_scoped(scrut, scope)
                && good_local_var(bndr)
                && alts.iter().all(|alt| {
                    let mut bs = vec![bndr.clone()];
                    bs.extend(alt.pats.iter().cloned());
                    alt.pats.iter().all(good_local_var) && well_scoped(&alt.rhs, &scope.with(&bs))
                })
        }
        Expr::Cast(e, _) => well_scoped(e, scope),
    }
}

pub fn well_scoped_bind(b: &Bind, scope: &Scope) -> bool {
    match b {
        Bind::NonRec(v, rhs) => good_local_var(v) && well_scoped(rhs, scope),
        Bind::Rec(ps) => {
            let vs = binders(b);
            let inner = scope.with(&vs);
            vs.iter().all(good_local_var) && no_dup(&vs) && ps.iter().all(|(_, rhs)| well_scoped(rhs, &inner))
        }
    }
}

pub fn well_scoped_program(p: &[Bind]) -> bool {
    let all: Vec<Var> = p.iter().flat_map(binders).collect();
    // A set built from the list keeps the last binder of each unique.
    let scope = Scope::from_vars(&all);
    no_dup(&all) && flatten(p).iter().all(|(_, rhs)| well_scoped(rhs, &scope))
}

fn upd_jps(jps: &Scope, v: &Var) -> Scope {
    if is_join(v) {
        jps.with(std::slice::from_ref(v))
    } else {
        jps.without(std::slice::from_ref(v))
    }
}

fn valid_pair(v: &Var, rhs: &Expr, jps: &Scope) -> bool {
    match join_arity(v) {
        None => join_points_valid(rhs, 0, &Scope::new()),
        Some(0) => join_points_valid(rhs, 0, jps),
        Some(a) => join_rhs_aux(a, rhs, jps),
    }
}

fn join_rhs_aux(a: usize, rhs: &Expr, jps: &Scope) -> bool {
    if a < 1 {
        return false;
    }
    match rhs {
        Expr::Lam(v, e) => {
            let jps = jps.without(std::slice::from_ref(v));
            !is_join(v) && if a == 1 { join_points_valid(e, 0, &jps) } else { join_rhs_aux(a - 1, e, &jps) }
        }
        _ => false,
    }
}

pub fn join_points_valid(e: &Expr, n: usize, jps: &Scope) -> bool {
    match e {
        Expr::Var(v) => match join_arity(v) {
            None => true,
            Some(a) => is_local_var(v) && a <= n && jps.has(v.unique),
        },
        Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => true,
        Expr::App(f, a) => join_points_valid(f, n + 1, jps) && join_points_valid(a, 0, &Scope::new()),
        Expr::Lam(v, body) => !is_join(v) && join_points_valid(body, 0, &Scope::new()),
        Expr::Let(b, body) => match &**b {
            Bind::NonRec(v, rhs) => valid_pair(v, rhs, jps) && join_points_valid(body, 0, &upd_jps(jps, v)),
            Bind::Rec(ps) => {
                let all_join = ps.iter().all(|(v, _)| is_join(v));
                let none_join = ps.iter().all(|(v, _)| !is_join(v));
                let mut inner = jps.clone();
                for (v, _) in ps {
                    inner = upd_jps(&inner, v);
                }
                !ps.is_empty()
                    && (none_join || all_join)
                    && ps.iter().all(|(v, rhs)| valid_pair(v, rhs, &inner))
                    && join_points_valid(body, 0, &inner)
            }
        },
        Expr::Case(scrut, bndr, _, alts) => {
            let jps1 = jps.without(std::slice::from_ref(bndr));
            !is_join(bndr)
                && join_points_valid(scrut, 0, &Scope::new())
                && alts.iter().all(|alt| {
                    alt.pats.iter().all(|p| !is_join(p)) && join_points_valid(&alt.rhs, 0, &jps1.without(&alt.pats))
                })
        }
        Expr::Cast(e, _) => join_points_valid(e, 0, jps),
    }
}

pub fn join_points_valid_program(p: &[Bind]) -> bool {
    flatten(p).iter().all(|(v, e)| !is_join(v) && join_points_valid(e, 0, &Scope::new()))
}

/// Uniques of the free local variables of `e`.
pub fn free_uniques(e: &Expr) -> BTreeSet<Unique> {
    let minus = |mut s: BTreeSet<Unique>, vs: &[Var]| {
        for v in vs {
            s.remove(&v.unique);
        }
        s
    };
    match e {
        Expr::Var(v) if v.unique.class == ScopeClass::Local => BTreeSet::from([v.unique]),
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => BTreeSet::new(),
        Expr::App(f, a) => &free_uniques(f) | &free_uniques(a),
        Expr::Lam(v, body) => minus(free_uniques(body), std::slice::from_ref(v)),
        Expr::Let(b, body) => {
            let bs = binders(b);
            let body_fv = minus(free_uniques(body), &bs);
            match &**b {
                Bind::NonRec(_, rhs) => &free_uniques(rhs) | &body_fv,
                Bind::Rec(ps) => {
                    let rhs_fv = ps.iter().fold(BTreeSet::new(), |acc, (_, r)| &acc | &free_uniques(r));
                    &minus(rhs_fv, &bs) | &body_fv
                }
            }
        }
        Expr::Case(scrut, bndr, _, alts) => alts.iter().fold(free_uniques(scrut), |acc, alt| {
            let mut bs = vec![bndr.clone()];
            bs.extend(alt.pats.iter().cloned());
            &acc | &minus(free_uniques(&alt.rhs), &bs)
        }),
        Expr::Cast(e, _) => free_uniques(e),
    }
}

/// Hand-written edge-case programs, paired with their case names.
pub fn edge_cases() -> Vec<(String, Vec<Bind>)> {
    let src = include_str!("../edge_cases.core");
    let mut out = Vec::new();
    let mut name: Option<String> = None;
    let mut body = String::new();
    let mut flush = |name: &mut Option<String>, body: &mut String| {
        if let Some(n) = name.take() {
            let p = coreir::syntax::parse_program(body)
                .unwrap_or_else(|e| panic!("edge case {n} does not parse: {e}"));
            out.push((n, p));
        }
        body.clear();
    };
    for line in src.lines() {
        if let Some(n) = line.strip_prefix("-- case: ") {
            flush(&mut name, &mut body);
            name = Some(n.trim().to_string());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    flush(&mut name, &mut body);
    out
}

/// Applies one small random corruption to `p`, keeping it syntactically
/// valid. The result may or may not still pass the checkers.
pub fn mutate(p: &[Bind], seed: u64) -> Vec<Bind> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut q = p.to_vec();
    let total: usize = q.iter().map(count_bind_nodes).sum();
    if total == 0 {
        return q;
    }
    let target = rng.gen_range(0..total);
    let mut idx = 0;
    for b in &mut q {
        if mutate_bind(b, target, &mut idx, &mut rng) {
            break;
        }
    }
    q
}

fn count_nodes(e: &Expr) -> usize {
    1 + match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => 0,
        Expr::App(f, a) => count_nodes(f) + count_nodes(a),
        Expr::Lam(_, b) | Expr::Cast(b, _) => count_nodes(b),
        Expr::Let(b, body) => count_bind_nodes(b) + count_nodes(body),
        Expr::Case(s, _, _, alts) => count_nodes(s) + alts.iter().map(|a| count_nodes(&a.rhs)).sum::<usize>(),
    }
}

fn count_bind_nodes(b: &Bind) -> usize {
    match b {
        Bind::NonRec(_, e) => 1 + count_nodes(e),
        Bind::Rec(ps) => 1 + ps.iter().map(|(_, e)| count_nodes(e)).sum::<usize>(),
    }
}

fn mutate_var(v: &mut Var, rng: &mut impl rand::Rng) {
    match rng.gen_range(0..7) {
        0 => v.ty = coreir::ir::TypeAtom::new(&format!("T{}", rng.gen_range(1..4))),
        1 => {
            let u = Unique { class: v.unique.class, number: rng.gen_range(1..12) };
            *v = v.clone().with_unique(u);
        }
        2 => v.details = IdDetails::Join(rng.gen_range(0..3)),
        3 => v.details = IdDetails::Vanilla,
        4 => v.scope = if is_local_var(v) { IdScope::GlobalId } else { IdScope::LocalId },
        5 => v.name.unique.number += 1,
        _ => v.info = coreir::ir::IdInfo::new("mut"),
    }
}

fn mutate_bind(b: &mut Bind, target: usize, idx: &mut usize, rng: &mut impl rand::Rng) -> bool {
    if *idx == target {
        match b {
            Bind::NonRec(v, _) => mutate_var(v, rng),
            Bind::Rec(ps) => {
                if ps.len() > 1 && rng.gen_bool(0.3) {
                    let u = ps[0].0.unique;
                    ps[1].0 = ps[1].0.clone().with_unique(u);
                } else {
                    let i = rng.gen_range(0..ps.len().max(1));
                    if let Some((v, _)) = ps.get_mut(i) {
                        mutate_var(v, rng);
                    }
                }
            }
        }
        return true;
    }
    *idx += 1;
    match b {
        Bind::NonRec(_, e) => mutate_expr(e, target, idx, rng),
        Bind::Rec(ps) => ps.iter_mut().any(|(_, e)| mutate_expr(e, target, idx, rng)),
    }
}

fn mutate_expr(e: &mut Expr, target: usize, idx: &mut usize, rng: &mut impl rand::Rng) -> bool {
    if *idx == target {
        let roll = rng.gen_range(0..10);
        match e {
            Expr::Var(v) if roll < 7 => mutate_var(v, rng),
            Expr::Lam(v, _) if roll < 5 => mutate_var(v, rng),
            Expr::Case(_, b, _, alts) if roll < 5 => {
                if roll < 2 || alts.iter().all(|a| a.pats.is_empty()) {
                    mutate_var(b, rng);
                } else if let Some(a) = alts.iter_mut().find(|a| !a.pats.is_empty()) {
                    mutate_var(&mut a.pats[0], rng);
                }
            }
            Expr::App(f, _) if roll < 5 => *e = (**f).clone(),
            _ => match roll % 3 {
                0 => *e = Expr::app(e.clone(), Expr::int(0)),
                1 => *e = Expr::cast(e.clone(), coreir::ir::CoercionAtom::new("Co")),
                _ => {
                    let x = Var::local("m", rng.gen_range(1..12));
                    *e = Expr::lam(x, e.clone());
                }
            },
        }
        return true;
    }
    *idx += 1;
    match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => false,
        Expr::App(f, a) => mutate_expr(f, target, idx, rng) || mutate_expr(a, target, idx, rng),
        Expr::Lam(_, b) | Expr::Cast(b, _) => mutate_expr(b, target, idx, rng),
        Expr::Let(b, body) => mutate_bind(b, target, idx, rng) || mutate_expr(body, target, idx, rng),
        Expr::Case(s, _, _, alts) => {
            mutate_expr(s, target, idx, rng) || alts.iter_mut().any(|a| mutate_expr(&mut a.rhs, target, idx, rng))
        }
    }
}
