//! Capture-avoiding parallel substitution.
//!
//! A [`Subst`] pairs the set of variables in scope *after* substitution with
//! an environment mapping uniques to replacement expressions. Binders that
//! would capture something in scope are renamed with [`uniq_away`].

use std::fmt;

use crate::ir::{Alt, Bind, Expr, Unique, Var};
use crate::varset::{InScopeSet, VarEnv, VarSet};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    in_scope: InScopeSet,
    env: VarEnv<Expr>,
}

/// Raised when a local occurrence is neither substituted nor in scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeWarning {
    pub doc: String,
    pub var: Var,
}

impl fmt::Display for ScopeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: variable {} is not in scope", self.doc, self.var)
    }
}

/// Returns `v` itself when its unique is free in `iss`, otherwise a copy whose
/// real and name uniques are the first of `number+1, number+2, ...` (same
/// scope class) that `iss` does not contain.
pub fn uniq_away(iss: &InScopeSet, v: &Var) -> Var {
    let u = v.unique();
    if !iss.contains_unique(u) {
        return v.clone();
    }
    let mut number = u.number;
    loop {
        number = number.checked_add(1).expect("unique space exhausted");
        let candidate = Unique { class: u.class, number };
        if !iss.contains_unique(candidate) {
            return v.clone().with_unique(candidate);
        }
    }
}

impl Subst {
    pub fn new(in_scope: InScopeSet, env: VarEnv<Expr>) -> Self {
        Subst { in_scope, env }
    }

    /// An empty environment over the given scope.
    pub fn empty(in_scope: InScopeSet) -> Self {
        Subst { in_scope, env: VarEnv::new() }
    }

    pub fn in_scope(&self) -> &InScopeSet {
        &self.in_scope
    }

    pub fn env(&self) -> &VarEnv<Expr> {
        &self.env
    }

    pub fn in_scope_vars(&self) -> &VarSet {
        self.in_scope.vars()
    }

    /// Resolves an occurrence. Globals are left alone; a local is replaced
    /// from the environment, else refined to its in-scope entry, else kept
    /// and reported.
    pub fn lookup_id(&self, doc: &str, v: &Var) -> (Expr, Option<ScopeWarning>) {
        if !v.is_local_var() {
            return (Expr::Var(v.clone()), None);
        }
        if let Some(e) = self.env.lookup(v) {
            return (e.clone(), None);
        }
        if let Some(w) = self.in_scope.lookup(v) {
            return (Expr::Var(w.clone()), None);
        }
        (
            Expr::Var(v.clone()),
            Some(ScopeWarning { doc: doc.to_string(), var: v.clone() }),
        )
    }

    pub fn subst_id_bndr(&self, _doc: &str, old_id: &Var) -> (Subst, Var) {
        let new_id = uniq_away(&self.in_scope, old_id);
        let no_change = new_id.unique() == old_id.unique();
        let env = if no_change {
            self.env.without(old_id)
        } else {
            self.env.extended(old_id, Expr::Var(new_id.clone()))
        };
        let in_scope = self.in_scope.extended(new_id.clone());
        (Subst { in_scope, env }, new_id)
    }

    pub fn subst_bndr(&self, doc: &str, v: &Var) -> (Subst, Var) {
        self.subst_id_bndr(doc, v)
    }

    /// Left-to-right accumulation of [`Subst::subst_id_bndr`].
    pub fn subst_bndrs(&self, doc: &str, vs: &[Var]) -> (Subst, Vec<Var>) {
        let mut s = self.clone();
        let mut out = Vec::with_capacity(vs.len());
        for v in vs {
            let (s2, v2) = s.subst_id_bndr(doc, v);
            s = s2;
            out.push(v2);
        }
        (s, out)
    }

    /// Same accumulation as [`Subst::subst_bndrs`]; the right-hand sides are
    /// then substituted under the returned substitution.
    pub fn subst_rec_bndrs(&self, doc: &str, vs: &[Var]) -> (Subst, Vec<Var>) {
        self.subst_bndrs(doc, vs)
    }

    pub fn subst_expr(&self, doc: &str, e: &Expr) -> (Expr, Vec<ScopeWarning>) {
        let mut warnings = Vec::new();
        let out = self.go(doc, e, &mut warnings);
        (out, warnings)
    }

    pub fn subst_bind(&self, doc: &str, b: &Bind) -> (Subst, Bind, Vec<ScopeWarning>) {
        let mut warnings = Vec::new();
        let (s, b) = self.go_bind(doc, b, &mut warnings);
        (s, b, warnings)
    }

    fn go(&self, doc: &str, e: &Expr, warnings: &mut Vec<ScopeWarning>) -> Expr {
        match e {
            Expr::Var(v) => {
                let (e, w) = self.lookup_id(doc, v);
                warnings.extend(w);
                e
            }
            Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => e.clone(),
            Expr::App(f, a) => Expr::app(self.go(doc, f, warnings), self.go(doc, a, warnings)),
            Expr::Lam(v, body) => {
                let (s, v2) = self.subst_bndr(doc, v);
                Expr::lam(v2, s.go(doc, body, warnings))
            }
            Expr::Let(b, body) => {
                let (s, b2) = self.go_bind(doc, b, warnings);
                Expr::let_(b2, s.go(doc, body, warnings))
            }
            Expr::Case(scrut, bndr, ty, alts) => {
                let scrut2 = self.go(doc, scrut, warnings);
                let (s, bndr2) = self.subst_bndr(doc, bndr);
                let alts2 = alts
                    .iter()
                    .map(|alt| {
                        let (s_alt, pats) = s.subst_bndrs(doc, &alt.pats);
                        Alt {
                            con: alt.con.clone(),
                            pats,
                            rhs: s_alt.go(doc, &alt.rhs, warnings),
                        }
                    })
                    .collect();
                Expr::case(scrut2, bndr2, ty.clone(), alts2)
            }
            Expr::Cast(inner, co) => Expr::cast(self.go(doc, inner, warnings), co.clone()),
        }
    }

    fn go_bind(&self, doc: &str, b: &Bind, warnings: &mut Vec<ScopeWarning>) -> (Subst, Bind) {
        match b {
            Bind::NonRec(v, rhs) => {
                let rhs2 = self.go(doc, rhs, warnings);
                let (s, v2) = self.subst_bndr(doc, v);
                (s, Bind::NonRec(v2, rhs2))
            }
            Bind::Rec(pairs) => {
                let binders: Vec<Var> = pairs.iter().map(|(v, _)| v.clone()).collect();
                let (s, binders2) = self.subst_rec_bndrs(doc, &binders);
                let pairs2 = binders2
                    .into_iter()
                    .zip(pairs)
                    .map(|(v2, (_, rhs))| (v2, s.go(doc, rhs, warnings)))
                    .collect();
                (s, Bind::Rec(pairs2))
            }
        }
    }
}

pub fn mk_empty_subst(iss: InScopeSet) -> Subst {
    Subst::empty(iss)
}

pub fn get_subst_in_scope_vars(s: &Subst) -> &VarSet {
    s.in_scope_vars()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{IdDetails, TypeAtom};
    use crate::lint::{good_var, subst_extends, well_scoped, well_scoped_subst};

    fn x() -> Var {
        Var::local("x", 7)
    }

    #[test]
    fn empty_subst_accessors() {
        let vs = VarSet::from_iter([x()]);
        let s = mk_empty_subst(InScopeSet::new(vs.clone()));
        assert_eq!(get_subst_in_scope_vars(&s), &vs);
        assert!(s.env().is_empty());
        assert!(well_scoped_subst(&s, &vs));
    }

    #[test]
    fn uniq_away_probes_linearly() {
        assert_eq!(uniq_away(&InScopeSet::default(), &x()), x());
        let iss = InScopeSet::new(VarSet::unit(x()));
        let fresh = uniq_away(&iss, &x());
        assert_eq!(fresh.unique(), Unique::local(8));
        assert_eq!(fresh.name.unique, Unique::local(8));
        assert_eq!(fresh.ty, x().ty);
        let iss = InScopeSet::new(VarSet::from_iter([x(), Var::local("y", 8), Var::global("g", 9)]));
        assert_eq!(uniq_away(&iss, &x()).unique(), Unique::local(9));
    }

    #[test]
    fn lookup_resolution_order() {
        let s = Subst::new(
            InScopeSet::default(),
            VarEnv::new().extended(&x(), Expr::int(1)),
        );
        assert_eq!(s.lookup_id("t", &x()), (Expr::int(1), None));

        let x2 = x().with_info(crate::ir::IdInfo::new("hot"));
        let s = Subst::empty(InScopeSet::new(VarSet::unit(x2.clone())));
        assert_eq!(s.lookup_id("t", &x()), (Expr::Var(x2), None));

        let (e, w) = Subst::default().lookup_id("here", &x());
        assert_eq!(e, Expr::Var(x()));
        assert_eq!(w, Some(ScopeWarning { doc: "here".into(), var: x() }));

        let g = Var::global("g", 1);
        assert_eq!(Subst::default().lookup_id("t", &g), (Expr::Var(g), None));
    }

    #[test]
    fn subst_id_bndr_fresh_binder_drops_env_entry() {
        let s = Subst::new(InScopeSet::default(), VarEnv::new().extended(&x(), Expr::int(3)));
        let (s2, b) = s.subst_id_bndr("t", &x());
        assert_eq!(b, x());
        assert!(s2.env().is_empty());
        assert_eq!(s2.in_scope().lookup(&x()), Some(&x()));
    }

    #[test]
    fn subst_id_bndr_renames_captured_binder() {
        let s = Subst::empty(InScopeSet::new(VarSet::unit(x())));
        let (s2, b) = s.subst_id_bndr("t", &x());
        assert_ne!(b.unique(), x().unique());
        assert!(good_var(&b));
        assert_eq!(s2.env().lookup(&x()), Some(&Expr::Var(b.clone())));
        assert!(s2.in_scope().lookup(&b).is_some());
    }

    #[test]
    fn subst_bndrs_on_fresh_binders() {
        let a = Var::local("a", 1);
        let b = Var::local("b", 2);
        let s = Subst::empty(InScopeSet::new(VarSet::unit(x())));
        let (s2, out) = s.subst_bndrs("t", &[a.clone(), b.clone()]);
        assert_eq!(out, vec![a.clone(), b.clone()]);
        assert!(s2.in_scope().lookup(&a).is_some() && s2.in_scope().lookup(&b).is_some());
        assert!(subst_extends(&s, &[a.clone(), b.clone()], &s2, &out));
        let (s3, none) = s.subst_bndrs("t", &[]);
        assert_eq!(s3, s);
        assert!(none.is_empty());
    }

    #[test]
    fn subst_expr_replaces_and_avoids_capture() {
        let s = Subst::new(
            InScopeSet::default(),
            VarEnv::new().extended(&x(), Expr::int(1)),
        );
        assert_eq!(s.subst_expr("t", &Expr::var(x())).0, Expr::int(1));

        // [x := y] (\y -> x y) must rename the inner y.
        let y = Var::local("y", 3);
        let s = Subst::new(
            InScopeSet::new(VarSet::unit(y.clone())),
            VarEnv::new().extended(&x(), Expr::var(y.clone())),
        );
        let e = Expr::lam(y.clone(), Expr::app(Expr::var(x()), Expr::var(y.clone())));
        let (out, warnings) = s.subst_expr("t", &e);
        assert!(warnings.is_empty());
        let Expr::Lam(y2, body) = &out else { panic!("expected lambda") };
        assert_ne!(y2.unique(), y.unique());
        assert_eq!(**body, Expr::app(Expr::var(y.clone()), Expr::var(y2.clone())));
        assert!(well_scoped(&out, s.in_scope_vars()));

        let t = Expr::Type(TypeAtom::new("T4"));
        assert_eq!(s.subst_expr("t", &t).0, t);
    }

    #[test]
    fn subst_bind_cases() {
        let f = Var::local("f", 1);
        let (s2, b, _) = Subst::default().subst_bind("t", &Bind::NonRec(f.clone(), Expr::int(0)));
        assert_eq!(b, Bind::NonRec(f.clone(), Expr::int(0)));
        assert!(s2.in_scope().lookup(&f).is_some());

        let g = Var::local("g", 2);
        let s = Subst::empty(InScopeSet::new(VarSet::from_iter([f.clone(), g.clone()])));
        let rec = Bind::Rec(vec![(f.clone(), Expr::var(g.clone())), (g.clone(), Expr::var(f.clone()))]);
        let (s2, b, w) = s.subst_bind("t", &rec);
        assert!(w.is_empty());
        let Bind::Rec(pairs) = &b else { panic!() };
        assert_ne!(pairs[0].0.unique(), f.unique());
        assert_eq!(pairs[0].1, Expr::Var(pairs[1].0.clone()));
        assert_eq!(pairs[1].1, Expr::Var(pairs[0].0.clone()));
        assert!(s2.env().lookup(&f).is_some());

        let (_, b, _) = s.subst_bind("t", &Bind::Rec(vec![]));
        assert_eq!(b, Bind::Rec(vec![]));
    }

    #[test]
    fn renaming_preserves_details() {
        let j = x().with_details(IdDetails::Join(2));
        let iss = InScopeSet::new(VarSet::unit(x()));
        let j2 = uniq_away(&iss, &j);
        assert_eq!(j2.details, IdDetails::Join(2));
        assert_eq!(j2.scope, j.scope);
    }
}
