//! Seeded generation of well-scoped, join-point-valid programs and of
//! substitution problems, plus a shrinker for counterexamples.
//!
//! Generation is construction-correct: the generator tracks the visible
//! scope and the set of join points that may be jumped to, and only emits
//! occurrences that the checkers accept.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{
    expr_size, mk_apps, mk_lams, program_size, Alt, AltCon, Bind, CoercionAtom, CoreProgram,
    Expr, IdDetails, IdInfo, Literal, TypeAtom, Unique, Var,
};
use crate::lint::{is_join_points_valid_program, well_scoped_program};
use crate::subst::Subst;
use crate::varset::{InScopeSet, VarEnv, VarSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    /// Rough node budget for the whole program.
    pub size: usize,
    /// Probability that a new binder reuses the unique of a visible local.
    pub shadow_p: f64,
    /// Fraction of generated let-forms that are recursive join groups.
    pub join_density: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { size: 60, shadow_p: 0.2, join_density: 0.5 }
    }
}

const OCCS: &[&str] = &["a", "b", "n", "x", "y", "z", "k", "v", "w", "s"];
const JOIN_OCCS: &[&str] = &["j", "go", "loop", "jk"];
const CONS: &[&str] = &["Just", "Nothing", "Cons", "Nil", "True", "False", "Pair"];

#[derive(Clone, Default)]
struct Ctx {
    /// Visible locals; the innermost binder of each unique.
    scope: VarSet,
    /// Join points that may be jumped to from here.
    jps: VarSet,
}

impl Ctx {
    fn non_tail(&self) -> Ctx {
        Ctx { scope: self.scope.clone(), jps: VarSet::new() }
    }

    fn bind(&self, v: &Var) -> Ctx {
        let jps = if v.is_join_id() { self.jps.extended(v.clone()) } else { self.jps.without(v) };
        Ctx { scope: self.scope.extended(v.clone()), jps }
    }

    /// Binds without touching the jump targets beyond hiding shadowed ones.
    fn bind_hiding(&self, v: &Var) -> Ctx {
        Ctx { scope: self.scope.extended(v.clone()), jps: self.jps.without(v) }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    next_unique: u64,
    shadow_p: f64,
    join_density: f64,
    globals: Vec<Var>,
}

impl Gen {
    fn new(seed: u64, shadow_p: f64, join_density: f64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_unique: 1,
            shadow_p: shadow_p.clamp(0.0, 1.0),
            join_density: join_density.clamp(0.0, 1.0),
            globals: Vec::new(),
        }
    }

    fn fresh_number(&mut self) -> u64 {
        let n = self.next_unique;
        self.next_unique += 1;
        n
    }

    fn type_atom(&mut self, not: Option<&TypeAtom>) -> TypeAtom {
        loop {
            let t = TypeAtom::new(&format!("T{}", self.rng.gen_range(0..6)));
            if Some(&t) != not {
                return t;
            }
        }
    }

    fn info(&mut self) -> IdInfo {
        if self.rng.gen_bool(0.1) {
            IdInfo::new(["once", "strict", "dead"].choose(&mut self.rng).unwrap())
        } else {
            IdInfo::default()
        }
    }

    /// A new good local binder; may reuse a visible unique (never one in
    /// `avoid`).
    fn binder(&mut self, ctx: &Ctx, details: IdDetails, avoid: &[Unique]) -> Var {
        let occs = if matches!(details, IdDetails::Join(_)) { JOIN_OCCS } else { OCCS };
        let occ = *occs.choose(&mut self.rng).unwrap();
        let candidates: Vec<&Var> =
            ctx.scope.iter().filter(|v| !avoid.contains(&v.unique())).collect();
        let info = self.info();
        if !candidates.is_empty() && self.rng.gen_bool(self.shadow_p) {
            let old = (*candidates.choose(&mut self.rng).unwrap()).clone();
            let ty = self.type_atom(Some(&old.ty));
            return Var::local(occ, old.unique().number)
                .with_type(ty)
                .with_details(details)
                .with_info(info);
        }
        let n = self.fresh_number();
        let ty = self.type_atom(None);
        Var::local(occ, n).with_type(ty).with_details(details).with_info(info)
    }

    fn lit(&mut self) -> Expr {
        if self.rng.gen_bool(0.1) {
            Expr::Lit(Literal::Str(Arc::from(*["a", "ok", "x y"].choose(&mut self.rng).unwrap())))
        } else {
            Expr::int(self.rng.gen_range(-3..10))
        }
    }

    fn occurrence(&mut self, v: &Var) -> Expr {
        // Occurrences may carry different metadata than their binder.
        if self.rng.gen_bool(0.1) {
            Expr::Var(v.clone().with_info(IdInfo::new("occ")))
        } else {
            Expr::Var(v.clone())
        }
    }

    fn leaf(&mut self, ctx: &Ctx) -> Expr {
        let locals: Vec<Var> = ctx.scope.iter().filter(|v| !v.is_join_id()).cloned().collect();
        let roll = self.rng.gen_range(0..100);
        if roll < 45 && !locals.is_empty() {
            let v = locals.choose(&mut self.rng).unwrap().clone();
            return self.occurrence(&v);
        }
        if roll < 60 && !self.globals.is_empty() {
            return Expr::Var(self.globals.choose(&mut self.rng).unwrap().clone());
        }
        if roll < 64 {
            return Expr::Type(self.type_atom(None));
        }
        if roll < 66 {
            return Expr::Coercion(CoercionAtom::new("Co"));
        }
        self.lit()
    }

    fn jump(&mut self, ctx: &Ctx, target: &Var, budget: usize) -> Expr {
        let arity = target.join_arity().unwrap_or(0);
        let extra = usize::from(self.rng.gen_bool(0.05));
        let per = budget.saturating_sub(1) / (arity + extra).max(1);
        let nt = ctx.non_tail();
        let args: Vec<Expr> = (0..arity + extra).map(|_| self.expr(&nt, per.min(4))).collect();
        mk_apps(Expr::Var(target.clone()), args)
    }

    fn split(&mut self, budget: usize) -> (usize, usize) {
        let b = budget.saturating_sub(1).max(2);
        let left = self.rng.gen_range(1..b);
        (left, b - left)
    }

    fn expr(&mut self, ctx: &Ctx, budget: usize) -> Expr {
        if budget == 0 {
            return self.lit();
        }
        let jumpable: Vec<Var> = ctx.jps.iter().cloned().collect();
        if budget <= 2 {
            if !jumpable.is_empty() && self.rng.gen_bool(0.3) {
                let j = jumpable.choose(&mut self.rng).unwrap().clone();
                return self.jump(ctx, &j, budget);
            }
            return self.leaf(ctx);
        }
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=14 if !jumpable.is_empty() => {
                let j = jumpable.choose(&mut self.rng).unwrap().clone();
                self.jump(ctx, &j, budget)
            }
            0..=44 if budget >= 5 => self.let_form(ctx, budget),
            0..=64 => self.case(ctx, budget),
            65..=79 => {
                let (l, r) = self.split(budget);
                let nt = ctx.non_tail();
                let f = self.expr(&nt, l);
                let a = self.expr(&nt, r);
                Expr::app(f, a)
            }
            80..=93 => {
                let x = self.binder(ctx, IdDetails::Vanilla, &[]);
                let body = self.expr(&ctx.non_tail().bind(&x), budget - 1);
                Expr::lam(x, body)
            }
            _ => Expr::cast(self.expr(ctx, budget - 1), CoercionAtom::new("Co")),
        }
    }

    fn let_form(&mut self, ctx: &Ctx, budget: usize) -> Expr {
        if budget >= 8 && self.rng.gen_bool(self.join_density) {
            return self.rec_join_group(ctx, budget);
        }
        let roll = self.rng.gen_range(0..100);
        let (rhs_budget, body_budget) = self.split(budget);
        if roll < 40 {
            let x = self.binder(ctx, IdDetails::Vanilla, &[]);
            let rhs = self.expr(&ctx.non_tail(), rhs_budget);
            let body = self.expr(&ctx.bind(&x), body_budget);
            Expr::let_(Bind::NonRec(x, rhs), body)
        } else if roll < 75 {
            let arity = self.rng.gen_range(0..=3);
            let j = self.binder(ctx, IdDetails::Join(arity), &[]);
            let rhs = self.join_rhs(ctx, arity, rhs_budget, None);
            let inner = ctx.bind(&j);
            let body = if self.rng.gen_bool(0.5) {
                self.tail_with_jump(&inner, &j, body_budget)
            } else {
                self.expr(&inner, body_budget)
            };
            Expr::let_(Bind::NonRec(j, rhs), body)
        } else {
            let k = self.rng.gen_range(1..=2);
            let group = self.group_binders(ctx, k, |_| IdDetails::Vanilla);
            let mut inner = ctx.clone();
            for v in &group {
                inner = inner.bind(v);
            }
            let per = (rhs_budget / k).max(1);
            let nt = inner.non_tail();
            let pairs = group
                .iter()
                .map(|v| (v.clone(), self.expr(&nt, per)))
                .collect();
            let body = self.expr(&inner, body_budget);
            Expr::let_(Bind::Rec(pairs), body)
        }
    }

    fn group_binders(&mut self, ctx: &Ctx, k: usize, details: impl Fn(usize) -> IdDetails) -> Vec<Var> {
        let mut group: Vec<Var> = Vec::with_capacity(k);
        for i in 0..k {
            let taken: Vec<Unique> = group.iter().map(Var::unique).collect();
            group.push(self.binder(ctx, details(i), &taken));
        }
        group
    }

    /// `arity` lambdas (later parameters may shadow earlier ones) over a body
    /// in tail position. With `loop_ctx`, the body is a case whose branches
    /// mix exits and recursive jumps.
    fn join_rhs(&mut self, ctx: &Ctx, arity: usize, budget: usize, loop_targets: Option<&[Var]>) -> Expr {
        let mut inner = ctx.clone();
        let mut params = Vec::with_capacity(arity);
        for _ in 0..arity {
            let p = self.binder(&inner, IdDetails::Vanilla, &[]);
            inner = inner.bind_hiding(&p);
            params.push(p);
        }
        let body_budget = budget.saturating_sub(arity).max(1);
        let body = match loop_targets {
            Some(targets) => self.loop_body(&inner, targets, body_budget),
            None => self.expr(&inner, body_budget),
        };
        mk_lams(params, body)
    }

    fn loop_body(&mut self, ctx: &Ctx, targets: &[Var], budget: usize) -> Expr {
        let scrut_budget = self.rng.gen_range(1..=2);
        let scrut = self.expr(&ctx.non_tail(), scrut_budget);
        let bndr = self.binder(ctx, IdDetails::Vanilla, &[]);
        let alt_ctx = ctx.bind_hiding(&bndr);
        let visible: Vec<Var> = targets.iter().filter(|t| alt_ctx.jps.contains(t)).cloned().collect();
        let n_alts = self.rng.gen_range(2..=3);
        let per = (budget.saturating_sub(3) / n_alts).max(1);
        let mut alts = Vec::with_capacity(n_alts);
        let recursive_alt = self.rng.gen_range(0..n_alts);
        for i in 0..n_alts {
            let con = if i + 1 == n_alts { AltCon::Default } else { AltCon::Lit(Literal::Int(i as i64)) };
            let rhs = if i == recursive_alt && !visible.is_empty() {
                let j = visible.choose(&mut self.rng).unwrap().clone();
                self.jump(&alt_ctx, &j, per)
            } else {
                self.expr(&alt_ctx, per.max(3))
            };
            alts.push(Alt { con, pats: vec![], rhs });
        }
        Expr::case(scrut, bndr, TypeAtom::default(), alts)
    }

    fn tail_with_jump(&mut self, ctx: &Ctx, j: &Var, budget: usize) -> Expr {
        if self.rng.gen_bool(0.5) {
            self.jump(ctx, j, budget)
        } else {
            self.expr(ctx, budget)
        }
    }

    fn rec_join_group(&mut self, ctx: &Ctx, budget: usize) -> Expr {
        let k = if self.rng.gen_bool(0.7) { 1 } else { 2 };
        let arities: Vec<usize> = (0..k)
            .map(|_| if self.rng.gen_bool(0.15) { 0 } else { self.rng.gen_range(1..=3) })
            .collect();
        let group = self.group_binders(ctx, k, |i| IdDetails::Join(arities[i]));
        let mut inner = ctx.clone();
        for j in &group {
            inner = inner.bind(j);
        }
        let (rhs_budget, body_budget) = self.split(budget);
        let per = (rhs_budget / k).max(3);
        let mut pairs = Vec::with_capacity(k);
        for (j, &arity) in group.iter().zip(&arities) {
            let rhs = self.join_rhs(&inner, arity, per, Some(&group));
            pairs.push((j.clone(), rhs));
        }
        let target = group.choose(&mut self.rng).unwrap().clone();
        let body = self.tail_with_jump(&inner, &target, body_budget);
        Expr::let_(Bind::Rec(pairs), body)
    }

    fn case(&mut self, ctx: &Ctx, budget: usize) -> Expr {
        let scrut_budget = self.rng.gen_range(1..=3.min(budget - 1));
        let scrut = self.expr(&ctx.non_tail(), scrut_budget);
        let bndr = self.binder(ctx, IdDetails::Vanilla, &[]);
        let n_alts = self.rng.gen_range(1..=3);
        let per = (budget.saturating_sub(scrut_budget + 2) / n_alts).max(1);
        let mut alts = Vec::with_capacity(n_alts);
        for i in 0..n_alts {
            let mut alt_ctx = ctx.bind_hiding(&bndr);
            let (con, n_pats) = if i + 1 == n_alts && self.rng.gen_bool(0.5) {
                (AltCon::Default, 0)
            } else if self.rng.gen_bool(0.6) {
                (AltCon::Data(Arc::from(*CONS.choose(&mut self.rng).unwrap())), self.rng.gen_range(0..=2))
            } else {
                (AltCon::Lit(Literal::Int(i as i64)), 0)
            };
            let mut pats = Vec::with_capacity(n_pats);
            for _ in 0..n_pats {
                let p = self.binder(&alt_ctx, IdDetails::Vanilla, &[]);
                alt_ctx = alt_ctx.bind_hiding(&p);
                pats.push(p);
            }
            let rhs = self.expr(&alt_ctx, per);
            alts.push(Alt { con, pats, rhs });
        }
        Expr::case(scrut, bndr, self.type_atom(None), alts)
    }

    /// Top-level right-hand sides are often functions.
    fn top_rhs(&mut self, budget: usize) -> Expr {
        if budget < 4 || self.rng.gen_bool(0.4) {
            return self.expr(&Ctx::default(), budget);
        }
        let n = self.rng.gen_range(1..=2);
        let mut ctx = Ctx::default();
        let mut params = Vec::with_capacity(n);
        for _ in 0..n {
            let p = self.binder(&ctx, IdDetails::Vanilla, &[]);
            ctx = ctx.bind(&p);
            params.push(p);
        }
        let body = self.expr(&ctx, budget - n);
        mk_lams(params, body)
    }

    fn program(&mut self, size: usize) -> CoreProgram {
        let n_top = 1 + size / 30 + self.rng.gen_range(0..=1);
        self.globals = (1..=n_top as u64)
            .map(|i| Var::global(&format!("f{i}"), i))
            .collect();
        let per = size / n_top;
        let globals = self.globals.clone();
        let mut binds = Vec::with_capacity(n_top);
        let mut i = 0;
        while i < globals.len() {
            // Occasionally group two top-level binders recursively.
            if i + 1 < globals.len() && self.rng.gen_bool(0.2) {
                let pairs = vec![
                    (globals[i].clone(), self.top_rhs(per)),
                    (globals[i + 1].clone(), self.top_rhs(per)),
                ];
                binds.push(Bind::Rec(pairs));
                i += 2;
            } else {
                binds.push(Bind::NonRec(globals[i].clone(), self.top_rhs(per)));
                i += 1;
            }
        }
        binds
    }
}

/// A deterministic program satisfying both program checkers.
pub fn gen_program(seed: u64, config: GenConfig) -> CoreProgram {
    Gen::new(seed, config.shadow_p, config.join_density).program(config.size)
}

/// A substitution, an expression scope, and an expression such that the
/// substitution is well scoped for the scope and the expression is well
/// scoped in it.
pub fn gen_subst_pair(seed: u64, size: usize) -> (Subst, VarSet, Expr) {
    let mut g = Gen::new(seed, 0.25, 0.3);
    let n_scope = g.rng.gen_range(0..=4);
    let expr_scope: VarSet = (0..n_scope)
        .map(|_| {
            let n = g.fresh_number();
            let ty = g.type_atom(None);
            Var::local(OCCS.choose(&mut g.rng).unwrap(), n).with_type(ty)
        })
        .collect();
    let e = g.expr(&Ctx { scope: expr_scope.clone(), jps: VarSet::new() }, size);

    let empty_env = g.rng.gen_bool(0.25);
    let domain: Vec<Var> = if empty_env {
        Vec::new()
    } else {
        expr_scope.iter().filter(|_| g.rng.gen_bool(0.5)).cloned().collect()
    };
    let mut in_scope = VarSet::new();
    for v in expr_scope.iter().filter(|v| !domain.contains(v)) {
        let kept = if g.rng.gen_bool(0.2) { v.clone().with_info(IdInfo::new("scoped")) } else { v.clone() };
        in_scope.insert(kept);
    }
    let protected: Vec<Unique> = in_scope.uniques().collect();
    // Binders of `e` that are also in scope force renaming.
    let mut binders = Vec::new();
    collect_binders(&e, &mut binders);
    for b in binders {
        if !protected.contains(&b.unique()) && g.rng.gen_bool(0.5) {
            let ty = g.type_atom(None);
            in_scope.insert(b.zapped().with_type(ty).with_details(IdDetails::Vanilla));
        }
    }
    for d in &domain {
        if g.rng.gen_bool(0.3) {
            let ty = g.type_atom(Some(&d.ty));
            in_scope.insert(d.clone().with_type(ty));
        }
    }
    for _ in 0..g.rng.gen_range(0..=2) {
        let n = g.fresh_number();
        in_scope.insert(Var::local("fresh", n));
    }

    let mut env = VarEnv::new();
    let range_ctx = Ctx {
        scope: in_scope.filter(|v| !v.is_join_id()),
        jps: VarSet::new(),
    };
    for d in &domain {
        let replacement = match g.rng.gen_range(0..3) {
            0 if !range_ctx.scope.is_empty() => {
                let vs: Vec<Var> = range_ctx.scope.iter().cloned().collect();
                Expr::Var(vs.choose(&mut g.rng).unwrap().clone())
            }
            1 => {
                let x = g.binder(&range_ctx, IdDetails::Vanilla, &[]);
                Expr::lam(x.clone(), Expr::Var(x))
            }
            _ => {
                let b = g.rng.gen_range(1..=6);
                g.expr(&range_ctx, b)
            }
        };
        env.insert(d, replacement);
    }
    (Subst::new(InScopeSet::new(in_scope), env), expr_scope, e)
}

/// A substitution and a list of good local binders for it, some of which
/// collide with its scope or with each other.
pub fn gen_binder_case(seed: u64) -> (Subst, Vec<Var>) {
    let (s, _, _) = gen_subst_pair(seed, 4);
    let mut g = Gen::new(seed ^ 0x9e37_79b9_7f4a_7c15, 0.5, 0.0);
    g.next_unique = 1;
    let scope_vars: Vec<Var> = s.in_scope_vars().iter().cloned().collect();
    let n = g.rng.gen_range(0..=6);
    let mut binders: Vec<Var> = Vec::with_capacity(n);
    for _ in 0..n {
        let roll = g.rng.gen_range(0..3);
        let v = if roll == 0 && !scope_vars.is_empty() {
            let old = scope_vars.choose(&mut g.rng).unwrap();
            let ty = g.type_atom(None);
            Var::local("b", old.unique().number).with_type(ty)
        } else if roll == 1 && !binders.is_empty() {
            let old = binders.choose(&mut g.rng).unwrap().clone();
            old.with_type(TypeAtom::new("T9"))
        } else {
            let n = g.rng.gen_range(1..20);
            Var::local("b", n)
        };
        binders.push(v);
    }
    (s, binders)
}

fn collect_binders(e: &Expr, out: &mut Vec<Var>) {
    match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
        Expr::App(f, a) => {
            collect_binders(f, out);
            collect_binders(a, out);
        }
        Expr::Lam(v, b) => {
            out.push(v.clone());
            collect_binders(b, out);
        }
        Expr::Let(b, body) => {
            match &**b {
                Bind::NonRec(v, rhs) => {
                    out.push(v.clone());
                    collect_binders(rhs, out);
                }
                Bind::Rec(pairs) => {
                    for (v, rhs) in pairs {
                        out.push(v.clone());
                        collect_binders(rhs, out);
                    }
                }
            }
            collect_binders(body, out);
        }
        Expr::Case(s, b, _, alts) => {
            collect_binders(s, out);
            out.push(b.clone());
            for alt in alts {
                out.extend(alt.pats.iter().cloned());
                collect_binders(&alt.rhs, out);
            }
        }
        Expr::Cast(e, _) => collect_binders(e, out),
    }
}

// ---------------------------------------------------------------------------
// Shrinking

/// Every expression obtained by one local simplification somewhere in `e`.
fn expr_variants(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    if expr_size(e) > 1 {
        out.push(Expr::int(0));
    }
    match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
        Expr::App(f, a) => {
            out.extend(expr_variants(f).into_iter().map(|f2| Expr::app(f2, (**a).clone())));
            out.extend(expr_variants(a).into_iter().map(|a2| Expr::app((**f).clone(), a2)));
        }
        Expr::Lam(v, body) => {
            out.push((**body).clone());
            out.extend(expr_variants(body).into_iter().map(|b2| Expr::lam(v.clone(), b2)));
        }
        Expr::Let(b, body) => {
            out.push((**body).clone());
            match &**b {
                Bind::NonRec(v, rhs) => {
                    out.extend(expr_variants(rhs).into_iter().map(|r2| {
                        Expr::let_(Bind::NonRec(v.clone(), r2), (**body).clone())
                    }));
                }
                Bind::Rec(pairs) => {
                    for (i, (v, rhs)) in pairs.iter().enumerate() {
                        if pairs.len() > 1 {
                            let mut fewer = pairs.clone();
                            fewer.remove(i);
                            out.push(Expr::let_(Bind::Rec(fewer), (**body).clone()));
                        }
                        for r2 in expr_variants(rhs) {
                            let mut ps = pairs.clone();
                            ps[i] = (v.clone(), r2);
                            out.push(Expr::let_(Bind::Rec(ps), (**body).clone()));
                        }
                    }
                }
            }
            out.extend(expr_variants(body).into_iter().map(|b2| Expr::let_((**b).clone(), b2)));
        }
        Expr::Case(scrut, bndr, ty, alts) => {
            out.extend(alts.iter().map(|a| a.rhs.clone()));
            for s2 in expr_variants(scrut) {
                out.push(Expr::case(s2, bndr.clone(), ty.clone(), alts.clone()));
            }
            for i in 0..alts.len() {
                if alts.len() > 1 {
                    let mut fewer = alts.clone();
                    fewer.remove(i);
                    out.push(Expr::case((**scrut).clone(), bndr.clone(), ty.clone(), fewer));
                }
                for r2 in expr_variants(&alts[i].rhs) {
                    let mut as2 = alts.clone();
                    as2[i].rhs = r2;
                    out.push(Expr::case((**scrut).clone(), bndr.clone(), ty.clone(), as2));
                }
            }
        }
        Expr::Cast(inner, co) => {
            out.push((**inner).clone());
            out.extend(expr_variants(inner).into_iter().map(|i2| Expr::cast(i2, co.clone())));
        }
    }
    out
}

/// Smaller programs that still satisfy both program checkers.
pub fn shrink(p: &CoreProgram) -> Vec<CoreProgram> {
    let size = program_size(p);
    let mut candidates: Vec<CoreProgram> = Vec::new();
    for i in 0..p.len() {
        let mut fewer = p.clone();
        fewer.remove(i);
        candidates.push(fewer);
    }
    for (i, b) in p.iter().enumerate() {
        match b {
            Bind::NonRec(v, rhs) => {
                for r2 in expr_variants(rhs) {
                    let mut q = p.clone();
                    q[i] = Bind::NonRec(v.clone(), r2);
                    candidates.push(q);
                }
            }
            Bind::Rec(pairs) => {
                for (k, (v, rhs)) in pairs.iter().enumerate() {
                    for r2 in expr_variants(rhs) {
                        let mut ps = pairs.clone();
                        ps[k] = (v.clone(), r2);
                        let mut q = p.clone();
                        q[i] = Bind::Rec(ps);
                        candidates.push(q);
                    }
                }
            }
        }
    }
    candidates
        .into_iter()
        .filter(|q| {
            program_size(q) < size && well_scoped_program(q) && is_join_points_valid_program(q)
        })
        .collect()
}

/// Greedily shrinks `p` while `fails` keeps holding.
pub fn minimize(p: &CoreProgram, fails: impl Fn(&CoreProgram) -> bool) -> CoreProgram {
    let mut current = p.clone();
    'outer: loop {
        for q in shrink(&current) {
            if fails(&q) {
                current = q;
                continue 'outer;
            }
        }
        return current;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lint::{is_join_points_valid_program_report, well_scoped, well_scoped_program_report, well_scoped_subst};

    #[test]
    fn deterministic_in_seed() {
        let c = GenConfig::default();
        assert_eq!(gen_program(7, c), gen_program(7, c));
        assert_ne!(gen_program(7, c), gen_program(8, c));
    }

    #[test]
    fn size_zero_has_literal_bodies() {
        let p = gen_program(3, GenConfig { size: 0, ..GenConfig::default() });
        assert!(!p.is_empty());
        for (_, rhs) in crate::ir::flatten_binds(&p) {
            assert!(matches!(rhs, Expr::Lit(_)));
        }
    }

    #[test]
    fn generated_programs_lint_clean() {
        for seed in 0..300 {
            for &shadow_p in &[0.0, 0.3, 1.0] {
                let p = gen_program(seed, GenConfig { size: 80, shadow_p, join_density: 0.6 });
                let ws = well_scoped_program_report(&p);
                assert!(ws.ok(), "seed {seed}: {ws}\n{}", crate::syntax::print_program(&p));
                let jp = is_join_points_valid_program_report(&p);
                assert!(jp.ok(), "seed {seed}: {jp}\n{}", crate::syntax::print_program(&p));
            }
        }
    }

    #[test]
    fn subst_pairs_satisfy_hypotheses() {
        for seed in 0..300 {
            let (s, scope, e) = gen_subst_pair(seed, 30);
            assert!(well_scoped(&e, &scope), "seed {seed}: {e}");
            assert!(well_scoped_subst(&s, &scope), "seed {seed}: {:?}", s);
        }
    }

    #[test]
    fn shrink_of_empty_is_empty() {
        assert!(shrink(&vec![]).is_empty());
    }

    #[test]
    fn shrinks_are_valid_and_smaller() {
        let p = gen_program(11, GenConfig { size: 40, ..GenConfig::default() });
        let size = program_size(&p);
        let shrunk = shrink(&p);
        assert!(!shrunk.is_empty());
        for q in shrunk {
            assert!(program_size(&q) < size);
            assert!(well_scoped_program(&q) && is_join_points_valid_program(&q));
        }
    }
}
