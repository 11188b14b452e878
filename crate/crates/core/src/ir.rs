//! The Core AST: variables with uniques, expressions, bindings and programs.
//!
//! Types and coercions are opaque atoms. Variables are compared by their
//! [`Unique`], which carries an explicit locality tag.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Locality tag of a unique. `Local` sorts before `Global`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScopeClass {
    Local,
    Global,
}

/// The identity of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unique {
    pub class: ScopeClass,
    pub number: u64,
}

impl Unique {
    pub const fn local(number: u64) -> Self {
        Unique { class: ScopeClass::Local, number }
    }

    pub const fn global(number: u64) -> Self {
        Unique { class: ScopeClass::Global, number }
    }

    pub fn is_local(self) -> bool {
        self.class == ScopeClass::Local
    }
}

impl fmt::Display for Unique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class {
            ScopeClass::Local => write!(f, "L{}", self.number),
            ScopeClass::Global => write!(f, "G{}", self.number),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Name {
    pub occ: Arc<str>,
    pub unique: Unique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdScope {
    LocalId,
    GlobalId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdDetails {
    Vanilla,
    /// A join point with the given join arity.
    Join(usize),
}

/// Uninterpreted per-variable metadata. The empty token is the zapped value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IdInfo(pub Arc<str>);

impl IdInfo {
    pub fn new(token: &str) -> Self {
        IdInfo(Arc::from(token))
    }

    pub fn is_default(&self) -> bool {
        self.0.is_empty()
    }
}

/// Opaque type atom. Never inspected by any pass.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeAtom(pub Arc<str>);

impl TypeAtom {
    pub fn new(name: &str) -> Self {
        TypeAtom(Arc::from(name))
    }

    pub fn is_default(&self) -> bool {
        &*self.0 == DEFAULT_TYPE
    }
}

impl Default for TypeAtom {
    fn default() -> Self {
        TypeAtom::new(DEFAULT_TYPE)
    }
}

pub const DEFAULT_TYPE: &str = "T0";

/// Opaque coercion atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoercionAtom(pub Arc<str>);

impl CoercionAtom {
    pub fn new(name: &str) -> Self {
        CoercionAtom(Arc::from(name))
    }
}

/// A named identifier.
///
/// `unique` and `name.unique` are expected to agree, and the locality of the
/// unique to agree with `scope`; see [`crate::lint::good_var`]. Nothing here
/// enforces it so that malformed variables can be represented and linted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: Name,
    pub unique: Unique,
    pub ty: TypeAtom,
    pub scope: IdScope,
    pub details: IdDetails,
    pub info: IdInfo,
}

impl Var {
    /// A well-formed local vanilla id with default type and info.
    pub fn local(occ: &str, number: u64) -> Self {
        Var::good(occ, Unique::local(number))
    }

    /// A well-formed global vanilla id with default type and info.
    pub fn global(occ: &str, number: u64) -> Self {
        Var::good(occ, Unique::global(number))
    }

    /// A local join id of the given arity.
    pub fn join(occ: &str, number: u64, arity: usize) -> Self {
        Var::local(occ, number).with_details(IdDetails::Join(arity))
    }

    fn good(occ: &str, unique: Unique) -> Self {
        let scope = if unique.is_local() {
            IdScope::LocalId
        } else {
            IdScope::GlobalId
        };
        Var {
            name: Name { occ: Arc::from(occ), unique },
            unique,
            ty: TypeAtom::default(),
            scope,
            details: IdDetails::Vanilla,
            info: IdInfo::default(),
        }
    }

    pub fn with_type(mut self, ty: TypeAtom) -> Self {
        self.ty = ty;
        self
    }

    pub fn with_details(mut self, details: IdDetails) -> Self {
        self.details = details;
        self
    }

    pub fn with_info(mut self, info: IdInfo) -> Self {
        self.info = info;
        self
    }

    pub fn with_scope(mut self, scope: IdScope) -> Self {
        self.scope = scope;
        self
    }

    /// Replaces both the real unique and the name's unique.
    pub fn with_unique(mut self, unique: Unique) -> Self {
        self.unique = unique;
        self.name.unique = unique;
        self
    }

    pub fn unique(&self) -> Unique {
        self.unique
    }

    pub fn occ(&self) -> &str {
        &self.name.occ
    }

    /// Reads the scope flag (not the unique).
    pub fn is_local_var(&self) -> bool {
        self.scope == IdScope::LocalId
    }

    pub fn is_join_id(&self) -> bool {
        matches!(self.details, IdDetails::Join(_))
    }

    pub fn join_arity(&self) -> Option<usize> {
        match self.details {
            IdDetails::Join(a) => Some(a),
            IdDetails::Vanilla => None,
        }
    }

    /// Equality on every field except `info`.
    pub fn almost_equal(&self, other: &Var) -> bool {
        self.name == other.name
            && self.unique == other.unique
            && self.ty == other.ty
            && self.scope == other.scope
            && self.details == other.details
    }

    /// A copy with `info` reset to the default token.
    pub fn zapped(&self) -> Var {
        self.clone().with_info(IdInfo::default())
    }
}

pub fn is_local_unique(u: Unique) -> bool {
    u.is_local()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Str(Arc<str>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AltCon {
    Data(Arc<str>),
    Lit(Literal),
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alt {
    pub con: AltCon,
    pub pats: Vec<Var>,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Var),
    Lit(Literal),
    App(Box<Expr>, Box<Expr>),
    Lam(Var, Box<Expr>),
    Let(Box<Bind>, Box<Expr>),
    Case(Box<Expr>, Var, TypeAtom, Vec<Alt>),
    Cast(Box<Expr>, CoercionAtom),
    Type(TypeAtom),
    Coercion(CoercionAtom),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[allow(clippy::large_enum_variant)]
pub enum Bind {
    NonRec(Var, Expr),
    Rec(Vec<(Var, Expr)>),
}

pub type CoreProgram = Vec<Bind>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("malformed join right-hand side: expected {expected} leading lambdas, found {found}")]
    MalformedJoinRhs { expected: usize, found: usize },
}

impl Expr {
    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Lit(Literal::Int(n))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn lam(v: Var, body: Expr) -> Expr {
        Expr::Lam(v, Box::new(body))
    }

    pub fn let_(b: Bind, body: Expr) -> Expr {
        Expr::Let(Box::new(b), Box::new(body))
    }

    pub fn case(scrut: Expr, bndr: Var, ty: TypeAtom, alts: Vec<Alt>) -> Expr {
        Expr::Case(Box::new(scrut), bndr, ty, alts)
    }

    pub fn cast(e: Expr, co: CoercionAtom) -> Expr {
        Expr::Cast(Box::new(e), co)
    }
}

impl Bind {
    pub fn binders(&self) -> Vec<Var> {
        match self {
            Bind::NonRec(v, _) => vec![v.clone()],
            Bind::Rec(pairs) => pairs.iter().map(|(v, _)| v.clone()).collect(),
        }
    }
}

pub fn binders_of(b: &Bind) -> Vec<Var> {
    b.binders()
}

pub fn binders_of_binds(p: &[Bind]) -> Vec<Var> {
    p.iter().flat_map(Bind::binders).collect()
}

pub fn flatten_binds(p: &[Bind]) -> Vec<(Var, Expr)> {
    let mut out = Vec::new();
    for b in p {
        match b {
            Bind::NonRec(v, e) => out.push((v.clone(), e.clone())),
            Bind::Rec(pairs) => out.extend(pairs.iter().cloned()),
        }
    }
    out
}

/// Peels an application spine: `f a b` becomes `(f, [a, b])`.
pub fn collect_args(e: &Expr) -> (&Expr, Vec<&Expr>) {
    let mut head = e;
    let mut args = Vec::new();
    while let Expr::App(f, a) = head {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

/// Strips exactly `n` leading lambdas.
pub fn collect_n_binders(n: usize, e: &Expr) -> Result<(Vec<Var>, &Expr), IrError> {
    let mut params = Vec::with_capacity(n);
    let mut body = e;
    while params.len() < n {
        match body {
            Expr::Lam(v, b) => {
                params.push(v.clone());
                body = b;
            }
            _ => {
                return Err(IrError::MalformedJoinRhs {
                    expected: n,
                    found: params.len(),
                })
            }
        }
    }
    Ok((params, body))
}

pub fn mk_lams(params: impl IntoIterator<Item = Var, IntoIter: DoubleEndedIterator>, body: Expr) -> Expr {
    params
        .into_iter()
        .rev()
        .fold(body, |acc, v| Expr::lam(v, acc))
}

pub fn mk_apps(f: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
    args.into_iter().fold(f, Expr::app)
}

pub fn mk_lets(binds: impl IntoIterator<Item = Bind, IntoIter: DoubleEndedIterator>, body: Expr) -> Expr {
    binds
        .into_iter()
        .rev()
        .fold(body, |acc, b| Expr::let_(b, acc))
}

/// Binder size. Constant, so an alternative's pattern list also counts once.
fn bndr_size() -> usize {
    1
}

/// Size measure; always at least 1.
pub fn expr_size(e: &Expr) -> usize {
    let alt_size = |alt: &Alt| bndr_size() + expr_size(&alt.rhs);
    match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::Type(_) | Expr::Coercion(_) => 1,
        Expr::App(f, a) => expr_size(f) + expr_size(a),
        Expr::Lam(_, body) => bndr_size() + expr_size(body),
        Expr::Let(b, body) => bind_size(b) + expr_size(body),
        Expr::Case(scrut, _, _, alts) => {
            expr_size(scrut) + bndr_size() + 1 + alts.iter().map(alt_size).sum::<usize>()
        }
        Expr::Cast(e, _) => 1 + expr_size(e),
    }
}

pub fn bind_size(b: &Bind) -> usize {
    let pair_size = |(_, e): &(Var, Expr)| bndr_size() + expr_size(e);
    match b {
        Bind::NonRec(_, e) => bndr_size() + expr_size(e),
        Bind::Rec(pairs) => pairs.iter().map(pair_size).sum(),
    }
}

/// Sum of `expr_size` over every top-level right-hand side.
pub fn program_size(p: &[Bind]) -> usize {
    p.iter()
        .map(|b| match b {
            Bind::NonRec(_, e) => expr_size(e),
            Bind::Rec(pairs) => pairs.iter().map(|(_, e)| expr_size(e)).sum(),
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var::local("x", 1)
    }

    #[test]
    fn unique_order_puts_locals_first() {
        assert!(Unique::local(100) < Unique::global(0));
        assert!(Unique::local(1) < Unique::local(2));
        assert!(Unique::local(7).is_local());
        assert!(!Unique::global(7).is_local());
    }

    #[test]
    fn locality_reads() {
        assert!(is_local_unique(Unique::local(7)));
        let g = Var::local("v", 3).with_scope(IdScope::GlobalId);
        assert!(!g.is_local_var());
        let v = Var::local("v", 3);
        assert_eq!(v.is_local_var(), is_local_unique(v.unique()));
    }

    #[test]
    fn almost_equal_ignores_only_info() {
        let v = x();
        assert!(v.almost_equal(&v));
        assert!(v.almost_equal(&v.clone().with_info(IdInfo::new("strict"))));
        assert!(!v.almost_equal(&v.clone().with_type(TypeAtom::new("T5"))));
        assert!(!v.almost_equal(&v.clone().with_details(IdDetails::Join(0))));
        let mut renamed = v.clone();
        renamed.name.occ = Arc::from("y");
        assert!(!v.almost_equal(&renamed));
    }

    #[test]
    fn binders_and_flatten() {
        let a = Var::local("a", 2);
        let b = Var::local("b", 3);
        let nr = Bind::NonRec(x(), Expr::int(1));
        let rec = Bind::Rec(vec![(a.clone(), Expr::int(2)), (b.clone(), Expr::int(3))]);
        assert_eq!(binders_of(&nr), vec![x()]);
        assert_eq!(binders_of(&rec), vec![a.clone(), b.clone()]);
        let prog = vec![nr, Bind::Rec(vec![(a.clone(), Expr::int(2))])];
        assert_eq!(
            flatten_binds(&prog),
            vec![(x(), Expr::int(1)), (a.clone(), Expr::int(2))]
        );
        assert_eq!(binders_of_binds(&prog), vec![x(), a]);
    }

    #[test]
    fn collect_args_peels_left_spine() {
        let f = Expr::var(Var::local("f", 9));
        let e = Expr::app(Expr::app(f.clone(), Expr::int(1)), Expr::int(2));
        let (head, args) = collect_args(&e);
        assert_eq!(head, &f);
        assert_eq!(args, vec![&Expr::int(1), &Expr::int(2)]);
    }

    #[test]
    fn collect_n_binders_cases() {
        let y = Var::local("y", 2);
        let body = Expr::var(x());
        let e = Expr::lam(x(), Expr::lam(y.clone(), body.clone()));
        let (ps, b) = collect_n_binders(2, &e).unwrap();
        assert_eq!(ps, vec![x(), y]);
        assert_eq!(b, &body);
        assert_eq!(
            collect_n_binders(1, &Expr::int(3)),
            Err(IrError::MalformedJoinRhs { expected: 1, found: 0 })
        );
        let three = Expr::int(3);
        let (ps, b) = collect_n_binders(0, &three).unwrap();
        assert!(ps.is_empty());
        assert_eq!(b, &Expr::int(3));
    }

    #[test]
    fn mk_lets_nests_in_order() {
        let a = Var::local("a", 2);
        let e = mk_lets(
            vec![Bind::NonRec(x(), Expr::int(1)), Bind::NonRec(a.clone(), Expr::int(2))],
            Expr::int(0),
        );
        let expected = Expr::let_(
            Bind::NonRec(x(), Expr::int(1)),
            Expr::let_(Bind::NonRec(a, Expr::int(2)), Expr::int(0)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn size_clauses() {
        assert_eq!(expr_size(&Expr::int(42)), 1);
        assert_eq!(expr_size(&Expr::app(Expr::var(x()), Expr::int(1))), 2);
        let case = Expr::case(
            Expr::var(x()),
            Var::local("b", 5),
            TypeAtom::default(),
            vec![Alt { con: AltCon::Default, pats: vec![], rhs: Expr::int(1) }],
        );
        assert_eq!(expr_size(&case), 5);
    }
}
