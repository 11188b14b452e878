//! Invariant checkers: variable well-formedness, well-scopedness, join-point
//! validity, and the substitution invariants.
//!
//! Each checker walks the whole term and collects every violation into a
//! [`LintReport`]; the boolean entry points are `report.ok()`.

use std::fmt;

use crate::ir::{flatten_binds, Alt, Bind, CoreProgram, Expr, IdScope, Unique, Var};
use crate::subst::Subst;
use crate::varset::{minus_dom, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    GoodVar,
    GoodLocalVar,
    /// A local occurrence with no entry in scope.
    ScopeMissing,
    /// A local occurrence whose scope entry is not almost-equal to it.
    ScopeAlmostEqual,
    RecDuplicateBinder,
    ProgramDuplicateBinder,
    JoinOccurrenceNotLocal,
    JoinOccurrenceUnsaturated,
    JoinOccurrenceNotInJps,
    LamJoinBinder,
    RecEmpty,
    RecMixedJoin,
    JoinRhsTooFewLambdas,
    JoinRhsJoinParam,
    CaseJoinBinder,
    CaseJoinPattern,
    TopLevelJoinId,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::GoodVar => "GoodVar",
            Rule::GoodLocalVar => "GoodLocalVar",
            Rule::ScopeMissing => "WellScopedVar/None",
            Rule::ScopeAlmostEqual => "WellScopedVar/AlmostEqual",
            Rule::RecDuplicateBinder => "WellScopedBind/NoDup",
            Rule::ProgramDuplicateBinder => "WellScopedProgram/NoDup",
            Rule::JoinOccurrenceNotLocal => "JoinPoints/JumpNotLocal",
            Rule::JoinOccurrenceUnsaturated => "JoinPoints/JumpArity",
            Rule::JoinOccurrenceNotInJps => "JoinPoints/JumpNotTail",
            Rule::LamJoinBinder => "JoinPoints/LamJoinBinder",
            Rule::RecEmpty => "JoinPoints/RecEmpty",
            Rule::RecMixedJoin => "JoinPoints/RecMixed",
            Rule::JoinRhsTooFewLambdas => "JoinPoints/RhsLambdas",
            Rule::JoinRhsJoinParam => "JoinPoints/RhsJoinParam",
            Rule::CaseJoinBinder => "JoinPoints/CaseJoinBinder",
            Rule::CaseJoinPattern => "JoinPoints/CaseJoinPattern",
            Rule::TopLevelJoinId => "JoinPoints/TopLevelJoinId",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LintReport {
    pub violations: Vec<Violation>,
}

impl LintReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(mut self, other: LintReport) -> LintReport {
        self.violations.extend(other.violations);
        self
    }

    pub fn has_rule(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for LintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "violation {} at {}: {}", v.rule, v.path, v.detail)?;
        }
        Ok(())
    }
}

/// Breadcrumb segment into the AST.
#[derive(Clone, Debug)]
enum Seg {
    Top(String),
    Step(&'static str),
    Indexed(&'static str, usize),
}

#[derive(Default)]
struct Walker {
    path: Vec<Seg>,
    out: Vec<Violation>,
}

impl Walker {
    fn fail(&mut self, rule: Rule, detail: String) {
        let path = self
            .path
            .iter()
            .map(|s| match s {
                Seg::Top(name) => name.clone(),
                Seg::Step(s) => (*s).to_string(),
                Seg::Indexed(s, i) => format!("{s}[{i}]"),
            })
            .collect::<Vec<_>>()
            .join("/");
        self.out.push(Violation {
            path: if path.is_empty() { "<expr>".into() } else { path },
            rule,
            detail,
        });
    }

    fn at<R>(&mut self, seg: Seg, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(seg);
        let r = f(self);
        self.path.pop();
        r
    }

    fn report(self) -> LintReport {
        LintReport { violations: self.out }
    }
}

// ---------------------------------------------------------------------------
// Variables

/// The unique's locality agrees with the scope flag, and the name carries the
/// same unique as the variable.
pub fn good_var(v: &Var) -> bool {
    let scope_local = v.scope == IdScope::LocalId;
    v.unique().is_local() == scope_local && v.unique() == v.name.unique
}

pub fn good_local_var(v: &Var) -> bool {
    good_var(v) && v.is_local_var()
}

pub fn well_scoped_var(v: &Var, in_scope: &VarSet) -> bool {
    let mut w = Walker::default();
    w.var_occurrence(v, in_scope);
    w.out.is_empty()
}

impl Walker {
    fn good_var(&mut self, v: &Var) {
        if !good_var(v) {
            self.fail(Rule::GoodVar, format!("{v} is not a good variable"));
        }
    }

    fn good_local_binder(&mut self, v: &Var) {
        if !good_local_var(v) {
            self.fail(Rule::GoodLocalVar, format!("binder {v} is not a good local variable"));
        }
    }

    fn var_occurrence(&mut self, v: &Var, in_scope: &VarSet) {
        if v.is_local_var() {
            match in_scope.lookup(v) {
                None => self.fail(Rule::ScopeMissing, format!("{v} is not in scope")),
                Some(w) => {
                    if !v.almost_equal(w) {
                        self.fail(
                            Rule::ScopeAlmostEqual,
                            format!("occurrence {v} does not match binder {w} in scope"),
                        );
                    }
                    self.good_var(v);
                }
            }
        } else {
            self.good_var(v);
        }
    }
}

// ---------------------------------------------------------------------------
// Well-scopedness

/// Runs `f` with `vars` added to `scope` (later entries win), then restores
/// the previous entries.
fn with_bound<R>(
    w: &mut Walker,
    scope: &mut VarSet,
    vars: &[Var],
    f: impl FnOnce(&mut Walker, &mut VarSet) -> R,
) -> R {
    let saved: Vec<(Unique, Option<Var>)> = vars
        .iter()
        .map(|v| (v.unique(), scope.lookup(v).cloned()))
        .collect();
    scope.insert_all(vars.iter().cloned());
    let r = f(w, scope);
    for (u, old) in saved.into_iter().rev() {
        match old {
            Some(o) => scope.insert(o),
            None => scope.remove_unique(u),
        }
    }
    r
}

fn has_duplicate_uniques<'a>(vs: impl IntoIterator<Item = &'a Var>) -> Option<&'a Var> {
    let mut seen = std::collections::HashSet::new();
    vs.into_iter().find(|v| !seen.insert(v.unique()))
}

impl Walker {
    fn ws_expr(&mut self, e: &Expr, scope: &mut VarSet) {
        match e {
            Expr::Var(v) => self.var_occurrence(v, scope),
            Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
            Expr::App(f, a) => {
                self.at(Seg::Step("app.fun"), |w| w.ws_expr(f, scope));
                self.at(Seg::Step("app.arg"), |w| w.ws_expr(a, scope));
            }
            Expr::Lam(v, body) => {
                self.good_local_binder(v);
                with_bound(self, scope, std::slice::from_ref(v), |w, scope| {
                    w.at(Seg::Step("lam.body"), |w| w.ws_expr(body, scope))
                });
            }
            Expr::Let(b, body) => {
                self.ws_bind(b, scope);
                with_bound(self, scope, &b.binders(), |w, scope| {
                    w.at(Seg::Step("let.body"), |w| w.ws_expr(body, scope))
                });
            }
            Expr::Case(scrut, bndr, _, alts) => {
                self.at(Seg::Step("case.scrut"), |w| w.ws_expr(scrut, scope));
                self.good_local_binder(bndr);
                for (i, Alt { pats, rhs, .. }) in alts.iter().enumerate() {
                    self.at(Seg::Indexed("case.alt", i), |w| {
                        for p in pats {
                            w.good_local_binder(p);
                        }
                        let mut bound = Vec::with_capacity(pats.len() + 1);
                        bound.push(bndr.clone());
                        bound.extend(pats.iter().cloned());
                        with_bound(w, scope, &bound, |w, scope| w.ws_expr(rhs, scope));
                    });
                }
            }
            Expr::Cast(e, _) => self.at(Seg::Step("cast"), |w| w.ws_expr(e, scope)),
        }
    }

    fn ws_bind(&mut self, b: &Bind, scope: &mut VarSet) {
        match b {
            Bind::NonRec(v, rhs) => {
                self.good_local_binder(v);
                self.at(Seg::Step("let.rhs"), |w| w.ws_expr(rhs, scope));
            }
            Bind::Rec(pairs) => {
                for (v, _) in pairs {
                    self.good_local_binder(v);
                }
                if let Some(dup) = has_duplicate_uniques(pairs.iter().map(|(v, _)| v)) {
                    self.fail(
                        Rule::RecDuplicateBinder,
                        format!("recursive group binds unique {} twice ({dup})", dup.unique()),
                    );
                }
                let binders: Vec<Var> = pairs.iter().map(|(v, _)| v.clone()).collect();
                with_bound(self, scope, &binders, |w, scope| {
                    for (i, (_, rhs)) in pairs.iter().enumerate() {
                        w.at(Seg::Indexed("letrec.rhs", i), |w| w.ws_expr(rhs, scope));
                    }
                });
            }
        }
    }
}

pub fn well_scoped_report(e: &Expr, in_scope: &VarSet) -> LintReport {
    let mut w = Walker::default();
    w.ws_expr(e, &mut in_scope.clone());
    w.report()
}

pub fn well_scoped(e: &Expr, in_scope: &VarSet) -> bool {
    well_scoped_report(e, in_scope).ok()
}

pub fn well_scoped_bind(b: &Bind, in_scope: &VarSet) -> bool {
    let mut w = Walker::default();
    w.ws_bind(b, &mut in_scope.clone());
    w.out.is_empty()
}

pub fn well_scoped_program_report(p: &CoreProgram) -> LintReport {
    let mut w = Walker::default();
    let binders = crate::ir::binders_of_binds(p);
    if let Some(dup) = has_duplicate_uniques(&binders) {
        w.fail(
            Rule::ProgramDuplicateBinder,
            format!("top-level unique {} bound twice ({dup})", dup.unique()),
        );
    }
    let mut scope: VarSet = binders.into_iter().collect();
    for (v, rhs) in flatten_binds(p) {
        w.at(Seg::Top(v.to_string()), |w| w.ws_expr(&rhs, &mut scope));
    }
    w.report()
}

pub fn well_scoped_program(p: &CoreProgram) -> bool {
    well_scoped_program_report(p).ok()
}

// ---------------------------------------------------------------------------
// Join points

pub fn is_join_id(v: &Var) -> bool {
    v.is_join_id()
}

pub fn is_join_id_maybe(v: &Var) -> Option<usize> {
    v.join_arity()
}

/// Tracks `v` if it is a join id; otherwise a non-join binder hides any
/// tracked join id with the same unique.
pub fn upd_jps(jps: &VarSet, v: &Var) -> VarSet {
    if v.is_join_id() {
        jps.extended(v.clone())
    } else {
        jps.without(v)
    }
}

pub fn upd_jpss<'a>(jps: &VarSet, vs: impl IntoIterator<Item = &'a Var>) -> VarSet {
    vs.into_iter().fold(jps.clone(), |acc, v| upd_jps(&acc, v))
}

impl Walker {
    fn jp_expr(&mut self, e: &Expr, n: usize, jps: &VarSet) {
        match e {
            Expr::Var(v) => {
                if let Some(a) = v.join_arity() {
                    if !v.is_local_var() {
                        self.fail(Rule::JoinOccurrenceNotLocal, format!("jump to non-local {v}"));
                    }
                    if a > n {
                        self.fail(
                            Rule::JoinOccurrenceUnsaturated,
                            format!("jump to {v} of arity {a} with {n} arguments"),
                        );
                    }
                    if !jps.contains(v) {
                        self.fail(
                            Rule::JoinOccurrenceNotInJps,
                            format!("{v} occurs outside a valid tail position"),
                        );
                    }
                }
            }
            Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
            Expr::App(f, a) => {
                self.at(Seg::Step("app.fun"), |w| w.jp_expr(f, n + 1, jps));
                self.at(Seg::Step("app.arg"), |w| w.jp_expr(a, 0, &VarSet::new()));
            }
            Expr::Lam(v, body) => {
                if v.is_join_id() {
                    self.fail(Rule::LamJoinBinder, format!("lambda binds join id {v}"));
                }
                self.at(Seg::Step("lam.body"), |w| w.jp_expr(body, 0, &VarSet::new()));
            }
            Expr::Let(b, body) => match &**b {
                Bind::NonRec(v, rhs) => {
                    self.at(Seg::Step("let.rhs"), |w| w.jp_pair(v, rhs, jps));
                    let jps2 = upd_jps(jps, v);
                    self.at(Seg::Step("let.body"), |w| w.jp_expr(body, 0, &jps2));
                }
                Bind::Rec(pairs) => {
                    if pairs.is_empty() {
                        self.fail(Rule::RecEmpty, "empty recursive group".into());
                    }
                    let joins = pairs.iter().filter(|(v, _)| v.is_join_id()).count();
                    if joins != 0 && joins != pairs.len() {
                        self.fail(
                            Rule::RecMixedJoin,
                            "recursive group mixes join and non-join binders".into(),
                        );
                    }
                    let jps2 = upd_jpss(jps, pairs.iter().map(|(v, _)| v));
                    for (i, (v, rhs)) in pairs.iter().enumerate() {
                        self.at(Seg::Indexed("letrec.rhs", i), |w| w.jp_pair(v, rhs, &jps2));
                    }
                    self.at(Seg::Step("let.body"), |w| w.jp_expr(body, 0, &jps2));
                }
            },
            Expr::Case(scrut, bndr, _, alts) => {
                if bndr.is_join_id() {
                    self.fail(Rule::CaseJoinBinder, format!("case binder {bndr} is a join id"));
                }
                self.at(Seg::Step("case.scrut"), |w| w.jp_expr(scrut, 0, &VarSet::new()));
                let jps2 = jps.without(bndr);
                for (i, alt) in alts.iter().enumerate() {
                    self.at(Seg::Indexed("case.alt", i), |w| w.jp_alt(alt, &jps2));
                }
            }
            Expr::Cast(e, _) => self.at(Seg::Step("cast"), |w| w.jp_expr(e, 0, jps)),
        }
    }

    fn jp_alt(&mut self, alt: &Alt, jps: &VarSet) {
        let jps2 = jps.without_list(&alt.pats);
        for p in &alt.pats {
            if p.is_join_id() {
                self.fail(Rule::CaseJoinPattern, format!("pattern binds join id {p}"));
            }
        }
        self.jp_expr(&alt.rhs, 0, &jps2);
    }

    fn jp_pair(&mut self, v: &Var, rhs: &Expr, jps: &VarSet) {
        match v.join_arity() {
            None => self.jp_expr(rhs, 0, &VarSet::new()),
            Some(0) => self.jp_expr(rhs, 0, jps),
            Some(a) => self.jp_join_rhs(a, rhs, jps),
        }
    }

    /// `arity` leading non-join lambdas, each hiding its unique from `jps`.
    fn jp_join_rhs(&mut self, arity: usize, rhs: &Expr, jps: &VarSet) {
        if arity == 0 {
            self.fail(Rule::JoinRhsTooFewLambdas, "join arity below 1 in lambda check".into());
            return;
        }
        match rhs {
            Expr::Lam(v, e) => {
                if v.is_join_id() {
                    self.fail(Rule::JoinRhsJoinParam, format!("join parameter {v} is a join id"));
                }
                let jps2 = jps.without(v);
                self.at(Seg::Step("lam.body"), |w| {
                    if arity == 1 {
                        w.jp_expr(e, 0, &jps2)
                    } else {
                        w.jp_join_rhs(arity - 1, e, &jps2)
                    }
                });
            }
            _ => self.fail(
                Rule::JoinRhsTooFewLambdas,
                format!("join right-hand side lacks {arity} more leading lambdas"),
            ),
        }
    }
}

pub fn is_join_points_valid_report(e: &Expr, n: usize, jps: &VarSet) -> LintReport {
    let mut w = Walker::default();
    w.jp_expr(e, n, jps);
    w.report()
}

pub fn is_join_points_valid(e: &Expr, n: usize, jps: &VarSet) -> bool {
    is_join_points_valid_report(e, n, jps).ok()
}

pub fn is_join_rhs(rhs: &Expr, arity: usize, jps: &VarSet) -> bool {
    let mut w = Walker::default();
    if arity == 0 {
        w.jp_expr(rhs, 0, jps);
    } else {
        w.jp_join_rhs(arity, rhs, jps);
    }
    w.out.is_empty()
}

pub fn is_join_points_alt(alt: &Alt, jps: &VarSet) -> bool {
    let mut w = Walker::default();
    w.jp_alt(alt, jps);
    w.out.is_empty()
}

pub fn is_join_points_valid_pair(v: &Var, rhs: &Expr, jps: &VarSet) -> bool {
    let mut w = Walker::default();
    w.jp_pair(v, rhs, jps);
    w.out.is_empty()
}

/// Like [`is_join_points_valid_pair`] but requires `v` to be a join id.
pub fn is_valid_join_points_pair(v: &Var, rhs: &Expr, jps: &VarSet) -> bool {
    match v.join_arity() {
        None => false,
        Some(a) => is_join_rhs(rhs, a, jps),
    }
}

pub fn is_join_points_valid_program_report(p: &CoreProgram) -> LintReport {
    let mut w = Walker::default();
    for (v, rhs) in flatten_binds(p) {
        w.at(Seg::Top(v.to_string()), |w| {
            if v.is_join_id() {
                w.fail(Rule::TopLevelJoinId, format!("top-level binder {v} is a join id"));
            }
            w.jp_expr(&rhs, 0, &VarSet::new());
        });
    }
    w.report()
}

pub fn is_join_points_valid_program(p: &CoreProgram) -> bool {
    is_join_points_valid_program_report(p).ok()
}

// ---------------------------------------------------------------------------
// Substitutions and sets

/// Every variable of `a` has an almost-equal entry in `b`.
pub fn strong_subset(a: &VarSet, b: &VarSet) -> bool {
    a.iter()
        .all(|v| b.lookup(v).is_some_and(|w| v.almost_equal(w)))
}

pub fn strong_equal(a: &VarSet, b: &VarSet) -> bool {
    strong_subset(a, b) && strong_subset(b, a)
}

/// The in-scope set covers the expression scope outside the substitution's
/// domain, and every expression in the range is well scoped in it.
pub fn well_scoped_subst(s: &Subst, expr_scope: &VarSet) -> bool {
    let in_scope = s.in_scope().vars();
    strong_subset(&minus_dom(expr_scope, s.env()), in_scope)
        && s.env().iter().all(|(_, e)| well_scoped(e, in_scope))
}

/// Returns the number (1 to 7) of the first condition of the binder-renaming
/// relation that fails, or `None` when `(s2, vars2)` extends `(s1, vars1)`.
pub fn subst_extends_violation(
    s1: &Subst,
    vars1: &[Var],
    s2: &Subst,
    vars2: &[Var],
) -> Option<u8> {
    let scope1 = s1.in_scope().vars();
    let scope2 = s2.in_scope().vars();
    if vars1.len() != vars2.len() {
        return Some(1);
    }
    if has_duplicate_uniques(vars2).is_some() {
        return Some(2);
    }
    if !vars2.iter().all(good_local_var) {
        return Some(3);
    }
    if vars2.iter().any(|v| scope1.contains(v)) {
        return Some(4);
    }
    if !strong_equal(scope2, &scope1.extended_list(vars2.iter().cloned())) {
        return Some(5);
    }
    let widened = scope1.extended_list(vars1.iter().cloned());
    if !strong_subset(&minus_dom(&widened, s2.env()), scope2) {
        return Some(6);
    }
    let env_ok = s2.env().iter().all(|(u, e)| {
        let renamed = vars1
            .iter()
            .zip(vars2)
            .any(|(old, new)| old.unique() == u && *e == Expr::Var(new.clone()));
        renamed || s1.env().lookup_unique(u) == Some(e)
    });
    if !env_ok {
        return Some(7);
    }
    None
}

pub fn subst_extends(s1: &Subst, vars1: &[Var], s2: &Subst, vars2: &[Var]) -> bool {
    subst_extends_violation(s1, vars1, s2, vars2).is_none()
}

pub fn valid_var_set_check(vs: &VarSet) -> bool {
    vs.is_valid()
}
