//! Exitification: floats the exit paths of recursive join-point groups into
//! fresh non-recursive join points placed just before the group.
//!
//! ```text
//! let t = foo bar in                    let t = foo bar in
//! letrec go n x y =                     let exit x = t (x*x) in
//!   case n of                           letrec go n x y =
//!     0 -> t (x*x)             ==>        case n of
//!     _ -> go (n-1) (x*x) (x+y)             0 -> exit x
//! in body                                   _ -> go (n-1) (x*x) (x+y)
//!                                       in body
//! ```
//!
//! An exit expression is abstracted over the binders it captures between the
//! group and itself. [`ExitifyMode::LegacyBug`] keeps the historical choice of
//! every captured binder with a matching unique, which passes two arguments
//! for one variable when a parameter shadows another.

use thiserror::Error;

use crate::freevars::expr_free_vars;
use crate::ir::{
    collect_n_binders, mk_apps, mk_lams, mk_lets, Alt, Bind, CoreProgram, Expr, IdDetails,
    IdInfo, IdScope, IrError, Name, TypeAtom, Unique, Var,
};
use crate::subst::uniq_away;
use crate::varset::{InScopeSet, VarSet};

/// Where the exit unique supply starts.
pub const INIT_EXIT_JOIN_UNIQUE: Unique = Unique::local(1000);

pub const EXIT_OCC: &str = "exit";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExitifyMode {
    #[default]
    Fixed,
    LegacyBug,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExitifyError {
    #[error("{binder}: {source}")]
    MalformedJoinRhs {
        binder: String,
        #[source]
        source: IrError,
    },
}

/// Chooses the parameters of an exit join point.
///
/// `Fixed` walks `captured` from the innermost binder outwards and takes a
/// binder the first time its unique is seen in `fvs`. `LegacyBug` takes every
/// captured binder whose unique is in `fvs`. Both return binders in their
/// original order with `info` reset.
pub fn pick_abs_vars(mode: ExitifyMode, captured: &[Var], fvs: &VarSet) -> Vec<Var> {
    match mode {
        ExitifyMode::Fixed => {
            let mut remaining = fvs.clone();
            let mut picked: Vec<Var> = Vec::new();
            for v in captured.iter().rev() {
                if remaining.contains(v) {
                    remaining.remove(v);
                    picked.push(v.zapped());
                }
            }
            picked.reverse();
            picked
        }
        ExitifyMode::LegacyBug => captured
            .iter()
            .filter(|v| fvs.contains(v))
            .map(Var::zapped)
            .collect(),
    }
}

/// Fresh-unique supply threaded through one pass invocation.
#[derive(Clone, Debug)]
pub struct ExitSupply {
    next: u64,
    /// Every variable the minted exits must not collide with.
    avoid: InScopeSet,
}

impl ExitSupply {
    pub fn new(avoid: InScopeSet) -> Self {
        ExitSupply { next: INIT_EXIT_JOIN_UNIQUE.number, avoid }
    }

    fn mint(&mut self, arity: usize) -> Var {
        let u = Unique::local(self.next);
        let candidate = Var {
            name: Name { occ: EXIT_OCC.into(), unique: u },
            unique: u,
            ty: TypeAtom::default(),
            scope: IdScope::LocalId,
            details: IdDetails::Join(arity),
            info: IdInfo::default(),
        };
        let v = uniq_away(&self.avoid, &candidate);
        self.next = v.unique().number + 1;
        self.avoid.insert(v.clone());
        v
    }
}

/// Exit bindings created for one recursive group, in creation order.
#[derive(Clone, Debug, Default)]
pub struct ExitState {
    pub exits: Vec<(Var, Expr)>,
}

struct GroupRewriter<'a> {
    mode: ExitifyMode,
    recursive_calls: VarSet,
    supply: &'a mut ExitSupply,
    state: ExitState,
}

impl GroupRewriter<'_> {
    fn go(&mut self, captured: &mut Vec<Var>, e: &Expr) -> Result<Expr, ExitifyError> {
        let fvs = expr_free_vars(e);
        if fvs.is_disjoint(&self.recursive_calls) {
            return Ok(self.go_exit(captured, e, &fvs));
        }
        match e {
            Expr::Case(scrut, bndr, ty, alts) => {
                let mut alts2 = Vec::with_capacity(alts.len());
                for alt in alts {
                    let mark = captured.len();
                    captured.push(bndr.clone());
                    captured.extend(alt.pats.iter().cloned());
                    let rhs = self.go(captured, &alt.rhs);
                    captured.truncate(mark);
                    alts2.push(Alt { con: alt.con.clone(), pats: alt.pats.clone(), rhs: rhs? });
                }
                Ok(Expr::case((**scrut).clone(), bndr.clone(), ty.clone(), alts2))
            }
            Expr::Let(b, body) => {
                let mark = captured.len();
                let b2 = match &**b {
                    Bind::NonRec(j, rhs) if j.is_join_id() => {
                        let rhs2 = self.go_join_rhs(captured, j, rhs)?;
                        captured.push(j.clone());
                        Bind::NonRec(j.clone(), rhs2)
                    }
                    Bind::Rec(pairs) if pairs.first().is_some_and(|(j, _)| j.is_join_id()) => {
                        captured.extend(pairs.iter().map(|(j, _)| j.clone()));
                        let mut pairs2 = Vec::with_capacity(pairs.len());
                        for (j, rhs) in pairs {
                            pairs2.push((j.clone(), self.go_join_rhs(captured, j, rhs)?));
                        }
                        Bind::Rec(pairs2)
                    }
                    other => {
                        captured.extend(other.binders());
                        other.clone()
                    }
                };
                let body2 = self.go(captured, body);
                captured.truncate(mark);
                Ok(Expr::let_(b2, body2?))
            }
            _ => Ok(e.clone()),
        }
    }

    fn go_join_rhs(
        &mut self,
        captured: &mut Vec<Var>,
        j: &Var,
        rhs: &Expr,
    ) -> Result<Expr, ExitifyError> {
        let arity = j.join_arity().unwrap_or(0);
        let (params, body) = collect_n_binders(arity, rhs).map_err(|source| {
            ExitifyError::MalformedJoinRhs { binder: j.to_string(), source }
        })?;
        let mark = captured.len();
        captured.extend(params.iter().cloned());
        let body2 = self.go(captured, body);
        captured.truncate(mark);
        Ok(mk_lams(params, body2?))
    }

    fn go_exit(&mut self, captured: &[Var], e: &Expr, fvs: &VarSet) -> Expr {
        if matches!(e, Expr::Var(_) | Expr::Lit(_)) {
            return e.clone();
        }
        let captured_set: VarSet = captured.iter().cloned().collect();
        let interesting = fvs.any(|v| !captured_set.contains(v));
        if !interesting {
            return e.clone();
        }
        let abs_vars = pick_abs_vars(self.mode, captured, fvs);
        if abs_vars.iter().any(Var::is_join_id) {
            return e.clone();
        }
        let exit = self.supply.mint(abs_vars.len());
        self.state
            .exits
            .push((exit.clone(), mk_lams(abs_vars.iter().cloned(), e.clone())));
        mk_apps(Expr::Var(exit), abs_vars.into_iter().map(Expr::Var))
    }
}

fn exitify_rec_with(
    mode: ExitifyMode,
    pairs: &[(Var, Expr)],
    supply: &mut ExitSupply,
) -> Result<Vec<Bind>, ExitifyError> {
    let mut rw = GroupRewriter {
        mode,
        recursive_calls: pairs.iter().map(|(v, _)| v.clone()).collect(),
        supply,
        state: ExitState::default(),
    };
    let mut pairs2 = Vec::with_capacity(pairs.len());
    for (j, rhs) in pairs {
        let rhs2 = rw.go_join_rhs(&mut Vec::new(), j, rhs)?;
        pairs2.push((j.clone(), rhs2));
    }
    let mut binds: Vec<Bind> = rw
        .state
        .exits
        .into_iter()
        .map(|(v, rhs)| Bind::NonRec(v, rhs))
        .collect();
    binds.push(Bind::Rec(pairs2));
    Ok(binds)
}

/// Exitifies one recursive join group. Exit binders are fresh with respect to
/// `in_scope` and every variable mentioned in `pairs`. Returns the exit
/// bindings followed by the rewritten group.
pub fn exitify_rec(
    mode: ExitifyMode,
    in_scope: &InScopeSet,
    pairs: &[(Var, Expr)],
) -> Result<Vec<Bind>, ExitifyError> {
    let mut avoid = in_scope.clone();
    for (v, rhs) in pairs {
        avoid.insert(v.clone());
        collect_vars(rhs, &mut avoid);
    }
    exitify_rec_with(mode, pairs, &mut ExitSupply::new(avoid))
}

fn collect_vars(e: &Expr, acc: &mut InScopeSet) {
    match e {
        Expr::Var(v) => acc.insert(v.clone()),
        Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => {}
        Expr::App(f, a) => {
            collect_vars(f, acc);
            collect_vars(a, acc);
        }
        Expr::Lam(v, body) => {
            acc.insert(v.clone());
            collect_vars(body, acc);
        }
        Expr::Let(b, body) => {
            collect_bind_vars(b, acc);
            collect_vars(body, acc);
        }
        Expr::Case(scrut, bndr, _, alts) => {
            collect_vars(scrut, acc);
            acc.insert(bndr.clone());
            for alt in alts {
                acc.insert_all(alt.pats.iter().cloned());
                collect_vars(&alt.rhs, acc);
            }
        }
        Expr::Cast(e, _) => collect_vars(e, acc),
    }
}

fn collect_bind_vars(b: &Bind, acc: &mut InScopeSet) {
    match b {
        Bind::NonRec(v, rhs) => {
            acc.insert(v.clone());
            collect_vars(rhs, acc);
        }
        Bind::Rec(pairs) => {
            for (v, rhs) in pairs {
                acc.insert(v.clone());
                collect_vars(rhs, acc);
            }
        }
    }
}

struct ProgramRewriter {
    mode: ExitifyMode,
    supply: ExitSupply,
}

impl ProgramRewriter {
    fn expr(&mut self, in_scope: &InScopeSet, e: &Expr) -> Result<Expr, ExitifyError> {
        Ok(match e {
            Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => e.clone(),
            Expr::App(f, a) => Expr::app(self.expr(in_scope, f)?, self.expr(in_scope, a)?),
            Expr::Lam(v, body) => {
                Expr::lam(v.clone(), self.expr(&in_scope.extended(v.clone()), body)?)
            }
            Expr::Let(b, body) => match &**b {
                Bind::NonRec(v, rhs) => {
                    let rhs2 = self.expr(in_scope, rhs)?;
                    let body2 = self.expr(&in_scope.extended(v.clone()), body)?;
                    Expr::let_(Bind::NonRec(v.clone(), rhs2), body2)
                }
                Bind::Rec(pairs) => {
                    let inner = in_scope.extended_list(pairs.iter().map(|(v, _)| v.clone()));
                    let mut pairs2 = Vec::with_capacity(pairs.len());
                    for (v, rhs) in pairs {
                        pairs2.push((v.clone(), self.expr(&inner, rhs)?));
                    }
                    let body2 = self.expr(&inner, body)?;
                    if !pairs2.is_empty() && pairs2.iter().all(|(v, _)| v.is_join_id()) {
                        self.supply.avoid.insert_all(inner.vars().iter().cloned());
                        let binds = exitify_rec_with(self.mode, &pairs2, &mut self.supply)?;
                        mk_lets(binds, body2)
                    } else {
                        Expr::let_(Bind::Rec(pairs2), body2)
                    }
                }
            },
            Expr::Case(scrut, bndr, ty, alts) => {
                let scrut2 = self.expr(in_scope, scrut)?;
                let mut alts2 = Vec::with_capacity(alts.len());
                for alt in alts {
                    let scope = in_scope
                        .extended(bndr.clone())
                        .extended_list(alt.pats.iter().cloned());
                    alts2.push(Alt {
                        con: alt.con.clone(),
                        pats: alt.pats.clone(),
                        rhs: self.expr(&scope, &alt.rhs)?,
                    });
                }
                Expr::case(scrut2, bndr.clone(), ty.clone(), alts2)
            }
            Expr::Cast(inner, co) => Expr::cast(self.expr(in_scope, inner)?, co.clone()),
        })
    }
}

/// Runs exitification over every expression of a program.
pub fn exitify_program(mode: ExitifyMode, p: &CoreProgram) -> Result<CoreProgram, ExitifyError> {
    let top: InScopeSet = InScopeSet::new(crate::ir::binders_of_binds(p).into_iter().collect());
    let mut avoid = top.clone();
    for b in p {
        collect_bind_vars(b, &mut avoid);
    }
    let mut rw = ProgramRewriter { mode, supply: ExitSupply::new(avoid) };
    p.iter()
        .map(|b| {
            Ok(match b {
                Bind::NonRec(v, rhs) => Bind::NonRec(v.clone(), rw.expr(&top, rhs)?),
                Bind::Rec(pairs) => Bind::Rec(
                    pairs
                        .iter()
                        .map(|(v, rhs)| Ok((v.clone(), rw.expr(&top, rhs)?)))
                        .collect::<Result<_, ExitifyError>>()?,
                ),
            })
        })
        .collect()
}
