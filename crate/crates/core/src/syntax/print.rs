use std::fmt::{self, Write};

use crate::ir::{Alt, AltCon, Bind, Expr, IdDetails, IdScope, Literal, ScopeClass, Var};

impl fmt::Display for Var {
    /// The variable token: defaults (type `T0`, empty info) are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.occ(), self.unique.number)?;
        match (self.unique.class, self.scope) {
            (ScopeClass::Local, IdScope::LocalId) => {}
            (ScopeClass::Global, IdScope::GlobalId) => f.write_char('g')?,
            (ScopeClass::Local, IdScope::GlobalId) => f.write_str("g?")?,
            (ScopeClass::Global, IdScope::LocalId) => f.write_str("l?")?,
        }
        if let IdDetails::Join(a) = self.details {
            write!(f, "!j{a}")?;
        }
        if !self.ty.is_default() {
            write!(f, ":{}", self.ty.0)?;
        }
        if !self.info.is_default() {
            write!(f, "%{}", self.info.0)?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Str(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        expr(&mut s, self);
        f.write_str(&s)
    }
}

pub fn print_program(p: &[Bind]) -> String {
    let mut out = String::new();
    for b in p {
        match b {
            Bind::NonRec(v, e) => {
                let _ = write!(out, "let {v} = ");
                expr(&mut out, e);
            }
            Bind::Rec(pairs) => {
                out.push_str("letrec");
                pairs_(&mut out, pairs);
            }
        }
        out.push_str(" ;\n");
    }
    out
}

fn pairs_(out: &mut String, pairs: &[(Var, Expr)]) {
    for (i, (v, e)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push_str(" and");
        }
        let _ = write!(out, " {v} = ");
        expr(out, e);
    }
}

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Lam(..) => {
            out.push('\\');
            let mut cur = e;
            while let Expr::Lam(v, body) = cur {
                let _ = write!(out, "{v} ");
                cur = body;
            }
            out.push_str("-> ");
            expr(out, cur);
        }
        Expr::Let(b, body) => {
            match &**b {
                Bind::NonRec(v, rhs) => {
                    let _ = write!(out, "let {v} = ");
                    expr(out, rhs);
                }
                Bind::Rec(pairs) => {
                    out.push_str("letrec");
                    pairs_(out, pairs);
                }
            }
            out.push_str(" in ");
            expr(out, body);
        }
        Expr::Case(scrut, bndr, ty, alts) => {
            out.push_str("case ");
            expr(out, scrut);
            let _ = write!(out, " as {bndr}");
            if !ty.is_default() {
                let _ = write!(out, " return {}", ty.0);
            }
            out.push_str(" of {");
            for (i, alt) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ;");
                }
                out.push(' ');
                alt_(out, alt);
            }
            out.push_str(" }");
        }
        Expr::App(f, a) => {
            app_head(out, f);
            out.push(' ');
            atom(out, a);
        }
        _ => atom(out, e),
    }
}

fn app_head(out: &mut String, f: &Expr) {
    match f {
        Expr::App(g, a) => {
            app_head(out, g);
            out.push(' ');
            atom(out, a);
        }
        _ => atom(out, f),
    }
}

fn atom(out: &mut String, e: &Expr) {
    match e {
        Expr::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Lit(l) => {
            let _ = write!(out, "{l}");
        }
        Expr::Type(t) => {
            let _ = write!(out, "@{}", t.0);
        }
        Expr::Coercion(c) => {
            let _ = write!(out, "@~{}", c.0);
        }
        Expr::Cast(inner, co) => {
            out.push('(');
            expr(out, inner);
            let _ = write!(out, " |> {})", co.0);
        }
        _ => {
            out.push('(');
            expr(out, e);
            out.push(')');
        }
    }
}

fn alt_(out: &mut String, alt: &Alt) {
    match &alt.con {
        AltCon::Default => out.push_str("DEFAULT"),
        AltCon::Data(c) => out.push_str(c),
        AltCon::Lit(l) => {
            let _ = write!(out, "{l}");
        }
    }
    for p in &alt.pats {
        let _ = write!(out, " {p}");
    }
    out.push_str(" -> ");
    expr(out, &alt.rhs);
}
