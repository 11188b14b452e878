//! Free local variables of expressions.
//!
//! Locality is judged by the unique. Type and coercion payloads contribute
//! nothing. When several free occurrences share a unique, the first one met
//! in a left-to-right traversal is the one stored.

use std::collections::HashMap;

use crate::ir::{Bind, Expr, Unique, Var};
use crate::varset::VarSet;

pub fn expr_free_vars(e: &Expr) -> VarSet {
    let mut fv = FreeVars::default();
    fv.expr(e);
    fv.acc
}

pub fn bind_free_vars(b: &Bind) -> VarSet {
    let mut fv = FreeVars::default();
    fv.bind_rhss(b);
    fv.acc
}

#[derive(Default)]
struct FreeVars {
    bound: HashMap<Unique, usize>,
    acc: VarSet,
}

impl FreeVars {
    fn bind_vars<'a>(&mut self, vs: impl IntoIterator<Item = &'a Var>) {
        for v in vs {
            *self.bound.entry(v.unique()).or_default() += 1;
        }
    }

    fn unbind_vars<'a>(&mut self, vs: impl IntoIterator<Item = &'a Var>) {
        for v in vs {
            let u = v.unique();
            let n = self.bound.get_mut(&u).expect("unbalanced binder");
            *n -= 1;
            if *n == 0 {
                self.bound.remove(&u);
            }
        }
    }

    fn occurrence(&mut self, v: &Var) {
        let u = v.unique();
        if u.is_local() && !self.bound.contains_key(&u) && !self.acc.contains_unique(u) {
            self.acc.insert(v.clone());
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Var(v) => self.occurrence(v),
            Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
            Expr::App(f, a) => {
                self.expr(f);
                self.expr(a);
            }
            Expr::Lam(v, body) => {
                self.bind_vars([v]);
                self.expr(body);
                self.unbind_vars([v]);
            }
            Expr::Let(b, body) => {
                self.bind_rhss(b);
                let binders = b.binders();
                self.bind_vars(&binders);
                self.expr(body);
                self.unbind_vars(&binders);
            }
            Expr::Case(scrut, bndr, _, alts) => {
                self.expr(scrut);
                self.bind_vars([bndr]);
                for alt in alts {
                    self.bind_vars(&alt.pats);
                    self.expr(&alt.rhs);
                    self.unbind_vars(&alt.pats);
                }
                self.unbind_vars([bndr]);
            }
            Expr::Cast(e, _) => self.expr(e),
        }
    }

    /// Free variables contributed by the right-hand sides of a binding.
    fn bind_rhss(&mut self, b: &Bind) {
        match b {
            Bind::NonRec(_, rhs) => self.expr(rhs),
            Bind::Rec(pairs) => {
                let binders: Vec<&Var> = pairs.iter().map(|(v, _)| v).collect();
                self.bind_vars(binders.iter().copied());
                for (_, rhs) in pairs {
                    self.expr(rhs);
                }
                self.unbind_vars(binders.iter().copied());
            }
        }
    }
}
