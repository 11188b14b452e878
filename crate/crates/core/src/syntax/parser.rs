use std::collections::HashSet;
use std::sync::Arc;

use crate::ir::{Alt, AltCon, Bind, CoercionAtom, CoreProgram, Expr, Literal, TypeAtom, Var};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SubstSpec};

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

pub fn parse_program(src: &str) -> Result<CoreProgram, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let mut binds = Vec::new();
    while !p.at(&Tok::Eof) {
        binds.push(p.top_bind()?);
        p.expect(Tok::Semi)?;
    }
    Ok(binds)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

pub fn parse_subst_spec(src: &str) -> Result<SubstSpec, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    p.expect(Tok::Inscope)?;
    p.expect(Tok::LBrace)?;
    let mut inscope = Vec::new();
    while !p.at(&Tok::RBrace) {
        inscope.push(p.var("binder")?);
        if p.at(&Tok::Comma) {
            p.pos += 1;
        }
    }
    p.expect(Tok::RBrace)?;
    p.expect(Tok::Map)?;
    p.expect(Tok::LBrace)?;
    let mut mappings = Vec::new();
    let mut seen = HashSet::new();
    while !p.at(&Tok::RBrace) {
        let (line, col) = p.here();
        let v = p.var("binder")?;
        if !seen.insert(v.unique()) {
            return Err(ParseError {
                line,
                col,
                expected: vec!["a binder not already mapped".into()],
                found: format!("duplicate mapping for unique {}", v.unique()),
            });
        }
        p.expect(Tok::FatArrow)?;
        let e = p.expr()?;
        p.expect(Tok::Semi)?;
        mappings.push((v, e));
    }
    p.expect(Tok::RBrace)?;
    p.expect(Tok::Eof)?;
    Ok(SubstSpec { inscope, mappings })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.at(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&t.describe()]))
        }
    }

    fn var(&mut self, what: &str) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn upper(&mut self, prefix: char, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Upper(w) if w.starts_with(prefix) && w.len() > 1 => {
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn top_bind(&mut self) -> Result<Bind, ParseError> {
        match self.peek() {
            Tok::Let => {
                self.pos += 1;
                let (v, e) = self.pair()?;
                Ok(Bind::NonRec(v, e))
            }
            Tok::LetRec => {
                self.pos += 1;
                Ok(Bind::Rec(self.rec_pairs(&Tok::Semi)?))
            }
            _ => Err(self.error(&["'let'", "'letrec'", "end of input"])),
        }
    }

    /// Pairs separated by `and`; an empty group is written as `letrec`
    /// directly followed by `stop`.
    fn rec_pairs(&mut self, stop: &Tok) -> Result<Vec<(Var, Expr)>, ParseError> {
        let mut pairs = Vec::new();
        if self.at(stop) {
            return Ok(pairs);
        }
        pairs.push(self.pair()?);
        while self.at(&Tok::And) {
            self.pos += 1;
            pairs.push(self.pair()?);
        }
        Ok(pairs)
    }

    fn pair(&mut self) -> Result<(Var, Expr), ParseError> {
        let v = self.var("binder")?;
        self.expect(Tok::Eq)?;
        Ok((v, self.expr()?))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Backslash => {
                self.pos += 1;
                let mut binders = vec![self.var("binder")?];
                while let Tok::Var(_) = self.peek() {
                    binders.push(self.var("binder")?);
                }
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(crate::ir::mk_lams(binders, body))
            }
            Tok::Let => {
                self.pos += 1;
                let (v, rhs) = self.pair()?;
                self.expect(Tok::In)?;
                Ok(Expr::let_(Bind::NonRec(v, rhs), self.expr()?))
            }
            Tok::LetRec => {
                self.pos += 1;
                let pairs = self.rec_pairs(&Tok::In)?;
                self.expect(Tok::In)?;
                Ok(Expr::let_(Bind::Rec(pairs), self.expr()?))
            }
            Tok::Case => self.case(),
            _ => self.app(),
        }
    }

    fn case(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::Case)?;
        let scrut = self.expr()?;
        self.expect(Tok::As)?;
        let bndr = self.var("case binder")?;
        let mut ty = TypeAtom::default();
        if self.at(&Tok::Return) {
            self.pos += 1;
            ty = TypeAtom::new(&self.upper('T', "type atom")?);
        }
        self.expect(Tok::Of)?;
        self.expect(Tok::LBrace)?;
        let mut alts = Vec::new();
        if !self.at(&Tok::RBrace) {
            alts.push(self.alt()?);
            while self.at(&Tok::Semi) {
                self.pos += 1;
                alts.push(self.alt()?);
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(Expr::case(scrut, bndr, ty, alts))
    }

    fn alt(&mut self) -> Result<Alt, ParseError> {
        let con = match self.peek().clone() {
            Tok::Default => AltCon::Default,
            Tok::Upper(w) => AltCon::Data(Arc::from(w.as_str())),
            Tok::Int(n) => AltCon::Lit(Literal::Int(n)),
            Tok::Str(s) => AltCon::Lit(Literal::Str(Arc::from(s.as_str()))),
            _ => {
                return Err(self.error(&["'DEFAULT'", "constructor", "literal"]));
            }
        };
        self.pos += 1;
        let mut pats = Vec::new();
        while let Tok::Var(_) = self.peek() {
            pats.push(self.var("pattern binder")?);
        }
        self.expect(Tok::Arrow)?;
        Ok(Alt { con, pats, rhs: self.expr()? })
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Var(_) | Tok::Int(_) | Tok::Str(_) | Tok::LParen | Tok::At | Tok::AtTilde
        )
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            e = Expr::app(e, a);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Expr::Lit(Literal::Int(n)))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Ok(Expr::Lit(Literal::Str(Arc::from(s.as_str()))))
            }
            Tok::At => {
                self.pos += 1;
                Ok(Expr::Type(TypeAtom::new(&self.upper('T', "type atom")?)))
            }
            Tok::AtTilde => {
                self.pos += 1;
                Ok(Expr::Coercion(CoercionAtom::new(&self.upper('C', "coercion atom")?)))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                if self.at(&Tok::CastArrow) {
                    self.pos += 1;
                    let co = self.upper('C', "coercion atom")?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::cast(e, CoercionAtom::new(&co)));
                }
                if !self.at(&Tok::RParen) {
                    return Err(self.error(&["')'", "'|>'"]));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.error(&["expression"])),
        }
    }
}
