//! A small named-variable Core IR.
//!
//! The crate provides the syntax tree ([`ir`]), unique-keyed variable sets
//! ([`varset`]), free-variable computation ([`freevars`]), scope and
//! join-point checkers ([`lint`]), capture-avoiding substitution
//! ([`subst`]), the exitification pass ([`exitify`]), a textual syntax
//! ([`syntax`]), and seeded program generation ([`testgen`]).

pub mod exitify;
pub mod freevars;
pub mod ir;
pub mod lint;
pub mod subst;
pub mod sweep;
pub mod syntax;
pub mod testgen;
pub mod varset;

pub use ir::{Alt, AltCon, Bind, CoreProgram, Expr, Literal, Unique, Var};
pub use varset::{InScopeSet, VarEnv, VarSet};
