use std::sync::Arc;

use crate::ir::{IdDetails, IdInfo, IdScope, Name, ScopeClass, TypeAtom, Unique, Var};

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Let,
    LetRec,
    And,
    In,
    Case,
    As,
    Return,
    Of,
    Default,
    Inscope,
    Map,
    Backslash,
    Arrow,
    FatArrow,
    Eq,
    Semi,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    CastArrow,
    At,
    AtTilde,
    Int(i64),
    Str(String),
    /// Uppercase-initial word: constructor, type atom or coercion atom.
    Upper(String),
    Var(Var),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Let => "'let'".into(),
            Tok::LetRec => "'letrec'".into(),
            Tok::And => "'and'".into(),
            Tok::In => "'in'".into(),
            Tok::Case => "'case'".into(),
            Tok::As => "'as'".into(),
            Tok::Return => "'return'".into(),
            Tok::Of => "'of'".into(),
            Tok::Default => "'DEFAULT'".into(),
            Tok::Inscope => "'inscope'".into(),
            Tok::Map => "'map'".into(),
            Tok::Backslash => "'\\'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::FatArrow => "'=>'".into(),
            Tok::Eq => "'='".into(),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::CastArrow => "'|>'".into(),
            Tok::At => "'@'".into(),
            Tok::AtTilde => "'@~'".into(),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Upper(w) => format!("'{w}'"),
            Tok::Var(v) => format!("variable {}", v.occ()),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { chars: src.chars().collect(), pos: 0, line: 1, col: 1, _src: src };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia();
        let (line, col) = (lx.line, lx.col);
        let tok = match lx.peek() {
            None => {
                out.push(Token { tok: Tok::Eof, line, col });
                return Ok(out);
            }
            Some(c) => lx.token(c)?,
        };
        out.push(Token { tok, line, col });
    }
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, expected: &[&str], found: String) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek_at(1) == Some('-') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn word(&mut self, pred: fn(char) -> bool) -> String {
        let mut w = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            w.push(c);
            self.bump();
        }
        w
    }

    fn digits(&mut self) -> String {
        self.word(|c| c.is_ascii_digit())
    }

    fn token(&mut self, c: char) -> Result<Tok, ParseError> {
        let two = |a: char, b: char, lx: &Self| lx.peek() == Some(a) && lx.peek_at(1) == Some(b);
        if two('-', '>', self) {
            self.bump();
            self.bump();
            return Ok(Tok::Arrow);
        }
        if two('=', '>', self) {
            self.bump();
            self.bump();
            return Ok(Tok::FatArrow);
        }
        if two('|', '>', self) {
            self.bump();
            self.bump();
            return Ok(Tok::CastArrow);
        }
        if two('@', '~', self) {
            self.bump();
            self.bump();
            return Ok(Tok::AtTilde);
        }
        if c == '-' || c.is_ascii_digit() {
            return self.int();
        }
        if c == '"' {
            return self.string();
        }
        let single = match c {
            '\\' => Some(Tok::Backslash),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(t) = single {
            self.bump();
            return Ok(t);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            return self.word_token();
        }
        Err(self.error(&["token"], format!("character {c:?}")))
    }

    fn int(&mut self) -> Result<Tok, ParseError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            self.bump();
            text.push('-');
        }
        let d = self.digits();
        if d.is_empty() {
            return Err(self.error(&["digit"], format!("{:?}", self.peek())));
        }
        text.push_str(&d);
        text.parse()
            .map(Tok::Int)
            .map_err(|_| self.error(&["integer literal in range"], text))
    }

    fn string(&mut self) -> Result<Tok, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(&["'\"'"], "end of input".into())),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    other => {
                        return Err(self.error(&["escape sequence"], format!("{other:?}")))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn word_token(&mut self) -> Result<Tok, ParseError> {
        let (line, col) = (self.line, self.col);
        let w = self.word(is_word_char);
        let kw = match w.as_str() {
            "let" => Some(Tok::Let),
            "letrec" => Some(Tok::LetRec),
            "and" => Some(Tok::And),
            "in" => Some(Tok::In),
            "case" => Some(Tok::Case),
            "as" => Some(Tok::As),
            "return" => Some(Tok::Return),
            "of" => Some(Tok::Of),
            "DEFAULT" => Some(Tok::Default),
            "inscope" => Some(Tok::Inscope),
            "map" => Some(Tok::Map),
            _ => None,
        };
        if let Some(k) = kw {
            return Ok(k);
        }
        if w.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Ok(Tok::Upper(w));
        }
        self.var_token(w, line, col).map(Tok::Var)
    }

    /// `ident_N` then optional `g`, `g?`, `l?`, `!jN`, `:Type`, `%info`.
    fn var_token(&mut self, w: String, line: usize, col: usize) -> Result<Var, ParseError> {
        let bad = |msg: &str| ParseError {
            line,
            col,
            expected: vec![msg.to_string()],
            found: format!("'{w}'"),
        };
        let ends_with_digit = |s: &str| s.ends_with(|c: char| c.is_ascii_digit());
        let mut core = w.as_str();
        let mut marker = None;
        if let Some(stripped) = core.strip_suffix('g') {
            if ends_with_digit(stripped) {
                core = stripped;
                marker = Some('g');
            }
        } else if let Some(stripped) = core.strip_suffix('l') {
            if ends_with_digit(stripped) && self.peek() == Some('?') {
                core = stripped;
                marker = Some('l');
            }
        }
        let (occ, num) = core
            .rsplit_once('_')
            .filter(|(occ, num)| {
                !occ.is_empty()
                    && occ.chars().all(is_ident_char)
                    && !num.is_empty()
                    && num.chars().all(|c| c.is_ascii_digit())
            })
            .ok_or_else(|| bad("variable token of the form name_N"))?;
        let number: u64 = num.parse().map_err(|_| bad("unique number in range"))?;
        let (class, scope) = match marker {
            None => (ScopeClass::Local, IdScope::LocalId),
            Some('g') => {
                if self.peek() == Some('?') {
                    self.bump();
                    (ScopeClass::Local, IdScope::GlobalId)
                } else {
                    (ScopeClass::Global, IdScope::GlobalId)
                }
            }
            Some(_) => {
                self.bump();
                (ScopeClass::Global, IdScope::LocalId)
            }
        };
        let unique = Unique { class, number };
        let mut details = IdDetails::Vanilla;
        if self.peek() == Some('!') && self.peek_at(1) == Some('j') {
            self.bump();
            self.bump();
            let d = self.digits();
            let arity = d
                .parse()
                .map_err(|_| self.error(&["join arity"], format!("{:?}", self.peek())))?;
            details = IdDetails::Join(arity);
        }
        let mut ty = TypeAtom::default();
        if self.peek() == Some(':') {
            self.bump();
            let t = self.word(is_ident_char);
            if !t.starts_with('T') || t.len() < 2 {
                return Err(self.error(&["type atom"], format!("'{t}'")));
            }
            ty = TypeAtom::new(&t);
        }
        let mut info = IdInfo::default();
        if self.peek() == Some('%') {
            self.bump();
            let i = self.word(is_ident_char);
            if i.is_empty() {
                return Err(self.error(&["info token"], format!("{:?}", self.peek())));
            }
            info = IdInfo::new(&i);
        }
        Ok(Var {
            name: Name { occ: Arc::from(occ), unique },
            unique,
            ty,
            scope,
            details,
            info,
        })
    }
}
