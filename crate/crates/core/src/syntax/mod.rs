//! Textual surface syntax for programs and substitution files.
//!
//! ```text
//! -- a comment
//! let f_1g = \x_2 -> x_2 ;
//! letrec go_3g = \n_4 -> case n_4 as c_5 of { 0 -> "done" ; DEFAULT -> go_3g n_4 } ;
//! ```
//!
//! Variables are written `name_N` with their unique number, followed by
//! optional markers: `g` (global), `g?` / `l?` (scope flag disagreeing with
//! the unique), `!jN` (join arity N), `:Tx` (type atom), `%tok` (info).

use std::fmt;

use thiserror::Error;

use crate::ir::{Expr, Var};
use crate::subst::Subst;
use crate::varset::{InScopeSet, VarEnv, VarSet};

mod lexer;
mod parser;
mod print;

pub use parser::{parse_expr, parse_program, parse_subst_spec};
pub use print::print_program;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" or "),
            self.found
        )
    }
}

/// Contents of a substitution file.
///
/// ```text
/// inscope { y_2, z_3 }
/// map { x_1 => y_2 ; w_4 => 7 ; }
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstSpec {
    pub inscope: Vec<Var>,
    pub mappings: Vec<(Var, Expr)>,
}

impl SubstSpec {
    pub fn to_subst(&self) -> Subst {
        let in_scope: VarSet = self.inscope.iter().cloned().collect();
        let mut env = VarEnv::new();
        for (v, e) in &self.mappings {
            env.insert(v, e.clone());
        }
        Subst::new(InScopeSet::new(in_scope), env)
    }
}
