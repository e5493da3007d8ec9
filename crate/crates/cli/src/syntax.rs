//! Lexer and recursive-descent parser for the script language.
//!
//! Every diagnostic carries a span; a failed statement is skipped up to the
//! next `;` so one run reports as many errors as it can.

use std::fmt;

use chiral::states::{Family, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Span {
    fn to(self, end: Span) -> Span {
        if end.line != self.line {
            return self;
        }
        Span {
            len: (end.column + end.len).saturating_sub(self.column),
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {} at {}:{}", self.message, self.span.line, self.span.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    /// `|0>`
    Vac,
    Semi,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Underscore,
    Arrow,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Int(s) => return write!(f, "`{s}`"),
            Tok::Str(s) => return write!(f, "\"{s}\""),
            Tok::Vac => "|0>",
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Underscore => "_",
            Tok::Arrow => "->",
            Tok::Comma => ",",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '∂'
}

/// Splits `src` into tokens; positions start at `(line, column)` so that
/// string contents can be re-lexed in place.
pub fn lex_at(src: &str, line: usize, column: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, line, column);
    while i < chars.len() {
        let c = chars[i];
        let start = Span { line, column: col, len: 1 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let take = |tok: Tok, n: usize, out: &mut Vec<Token>| {
            out.push(Token {
                tok,
                span: Span { len: n, ..start },
            });
            n
        };
        let n = match c {
            ';' => take(Tok::Semi, 1, &mut out),
            '=' => take(Tok::Eq, 1, &mut out),
            '+' => take(Tok::Plus, 1, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => take(Tok::Arrow, 2, &mut out),
            '-' => take(Tok::Minus, 1, &mut out),
            '*' => take(Tok::Star, 1, &mut out),
            '/' => take(Tok::Slash, 1, &mut out),
            '^' => take(Tok::Caret, 1, &mut out),
            '(' => take(Tok::LParen, 1, &mut out),
            ')' => take(Tok::RParen, 1, &mut out),
            '{' => take(Tok::LBrace, 1, &mut out),
            '}' => take(Tok::RBrace, 1, &mut out),
            '_' => take(Tok::Underscore, 1, &mut out),
            ',' => take(Tok::Comma, 1, &mut out),
            '|' if chars.get(i + 1) == Some(&'0') && chars.get(i + 2) == Some(&'>') => {
                take(Tok::Vac, 3, &mut out)
            }
            '"' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if chars.get(j) != Some(&'"') {
                    return Err(Diagnostic::error("unterminated string", start));
                }
                let s: String = chars[i + 1..j].iter().collect();
                take(Tok::Str(s), j + 1 - i, &mut out)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                take(Tok::Int(chars[i..j].iter().collect()), j - i, &mut out)
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_alphanumeric()
                        || (chars[j] == '_' && chars.get(j + 1) != Some(&'{')))
                {
                    j += 1;
                }
                take(Tok::Ident(chars[i..j].iter().collect()), j - i, &mut out)
            }
            _ => return Err(Diagnostic::error(format!("unexpected character `{c}`"), start)),
        };
        i += n;
        col += n;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, column: col, len: 0 },
    });
    Ok(out)
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    lex_at(src, 1, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A rational-function expression in named variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(String, Span),
    Var(String, Span),
    /// `O(k)`: an unknown tail starting at total degree `k`.
    BigO(u32, Span),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>, Span),
    Pow(Box<Expr>, i64, Span),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeVarLit {
    pub family: Family,
    pub index: usize,
    pub mode: i32,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TermBody {
    Vars(Vec<ModeVarLit>),
    Name(String, Span),
    Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub negated: bool,
    pub coef: Option<Expr>,
    pub body: TermBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateExpr {
    pub terms: Vec<Term>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ref {
    Name(String, Span),
    Generator(ModeVarLit),
    Inline(StateExpr),
}

impl Ref {
    pub fn span(&self) -> Span {
        match self {
            Ref::Name(_, s) => *s,
            Ref::Generator(v) => v.span,
            Ref::Inline(e) => e.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrLit {
    pub value: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ring {
    /// Whatever the expressions produce.
    Natural,
    Poly,
    Rat,
    Series(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Virasoro,
    Topological,
    Borcherds,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformAction {
    CheckOpes,
    Apply(Ref),
    Structure,
}

#[derive(Clone, Debug, PartialEq)]
pub enum P1Cmd {
    Glue,
    Wakimoto,
    Sections(i32),
    Euler(i32),
    Reflect(Ref),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    System { kind: Kind, n: usize, ring: Ring },
    Let { name: String, name_span: Span, expr: StateExpr },
    Ope(Ref, Ref),
    NProduct(Ref, i64, Ref),
    Check(CheckKind),
    Cohomology(i32),
    Character(i32),
    Transform { map: StrLit, order: u32, action: TransformAction },
    P1(P1Cmd),
    Cocycle { name: StrLit, args: Vec<StrLit> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Script {
    pub stmts: Vec<Stmt>,
}

/// `a1`, `phi12` and so on: the family and index of a mode-variable head.
pub fn mode_head(s: &str) -> Option<(Family, usize)> {
    let split = s.find(|c: char| c.is_ascii_digit())?;
    let (head, digits) = s.split_at(split);
    let family = match head {
        "a" => Family::A,
        "b" => Family::B,
        "phi" => Family::Phi,
        "psi" => Family::Psi,
        _ => return None,
    };
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|i| (family, i))
}

/// `x1`, `x2`, ...: coefficient symbols inside states.
pub fn is_coordinate(s: &str) -> bool {
    s.len() > 1 && s.starts_with('x') && s[1..].chars().all(|c| c.is_ascii_digit())
}

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Inside a state, only coordinates are expression variables; elsewhere
    /// every identifier is.
    in_state: bool,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            in_state: false,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {what}, found {}", self.peek()), self.span())
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        match self.peek() {
            Tok::Ident(s) if s == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// A keyword spelled with hyphens, such as `check-opes`, with no spaces.
    fn hyphenated(&mut self, kw: &str) -> PResult<Span> {
        let start = self.span();
        let mut end = start;
        for (k, part) in kw.split('-').enumerate() {
            if k > 0 {
                let s = self.span();
                if *self.peek() != Tok::Minus || s.column != end.column + end.len {
                    return Err(Diagnostic::error(format!("expected `{kw}`"), start));
                }
                self.bump();
                end = s;
            }
            let s = self.span();
            if !self.is_keyword(part) || (k > 0 && s.column != end.column + end.len) {
                return Err(Diagnostic::error(format!("expected `{kw}`"), start));
            }
            self.bump();
            end = s;
        }
        Ok(start.to(end))
    }

    fn int(&mut self) -> PResult<(i64, Span)> {
        let neg = self.eat(&Tok::Minus);
        let start = self.prev_span();
        match self.peek().clone() {
            Tok::Int(s) => {
                let span = self.bump().span;
                let v: i64 = s
                    .parse()
                    .map_err(|_| Diagnostic::error("integer out of range", span))?;
                let span = if neg { start.to(span) } else { span };
                Ok((if neg { -v } else { v }, span))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn nonneg(&mut self, what: &str) -> PResult<(u32, Span)> {
        let (v, span) = self.int()?;
        u32::try_from(v).map(|v| (v, span)).map_err(|_| {
            Diagnostic::error(format!("{what} must be a nonnegative integer"), span)
        })
    }

    fn string(&mut self) -> PResult<StrLit> {
        match self.peek().clone() {
            Tok::Str(value) => Ok(StrLit {
                value,
                span: self.bump().span,
            }),
            _ => Err(self.unexpected("a string")),
        }
    }

    /// At `a1_{`, `phi2_{` and so on.
    fn at_mode_var(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if mode_head(s).is_some())
            && *self.peek_at(1) == Tok::Underscore
    }

    /// At an identifier that names a bound state inside a state expression.
    fn at_name(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => {
                !is_coordinate(s)
                    && !self.at_mode_var()
                    && !(s == "O" && *self.peek_at(1) == Tok::LParen)
            }
            _ => false,
        }
    }

    fn at_term_body(&self) -> bool {
        self.at_mode_var() || (self.in_state && self.at_name()) || *self.peek() == Tok::Vac
    }

    fn mode_var(&mut self) -> PResult<ModeVarLit> {
        let (head, start) = self.ident()?;
        let (family, index) =
            mode_head(&head).ok_or_else(|| Diagnostic::error("expected a mode variable", start))?;
        self.expect(Tok::Underscore)?;
        self.expect(Tok::LBrace)?;
        let (mode, _) = self.int()?;
        let end = self.expect(Tok::RBrace)?;
        let mode = i32::try_from(mode).map_err(|_| Diagnostic::error("mode out of range", start))?;
        Ok(ModeVarLit {
            family,
            index,
            mode,
            span: start.to(end),
        })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.product()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                // `x2^2 d1` inside strings
                Tok::Ident(_) | Tok::LParen if !self.in_state => {
                    let span = self.span();
                    let rhs = self.unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs), span);
                    continue;
                }
                _ => return Ok(lhs),
            };
            if self.in_state && op == BinOp::Mul {
                // `2 * a1_{-1}`: the star separates the coefficient from the monomial
                let save = self.pos;
                self.bump();
                if self.at_term_body() {
                    return Ok(lhs);
                }
                self.pos = save;
            }
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            let span = self.bump().span;
            let (k, _) = self.int()?;
            return Ok(Expr::Pow(Box::new(base), k, span));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(s) => Ok(Expr::Int(s, self.bump().span)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "O" && *self.peek_at(1) == Tok::LParen => {
                let start = self.bump().span;
                self.bump();
                let (k, _) = self.nonneg("a truncation order")?;
                let end = self.expect(Tok::RParen)?;
                if k == 0 {
                    return Err(Diagnostic::error("O(0) carries no known terms", start.to(end)));
                }
                Ok(Expr::BigO(k, start.to(end)))
            }
            Tok::Ident(s) if !self.in_state || is_coordinate(&s) => {
                Ok(Expr::Var(s, self.bump().span))
            }
            _ => Err(self.unexpected("a coefficient")),
        }
    }

    fn term(&mut self, negated: bool) -> PResult<Term> {
        let start = self.span();
        let coef = if self.at_term_body() {
            None
        } else {
            Some(self.product()?)
        };
        let body = if self.at_mode_var() {
            let mut vars = Vec::new();
            while self.at_mode_var() {
                vars.push(self.mode_var()?);
            }
            TermBody::Vars(vars)
        } else if self.at_name() {
            let (s, span) = self.ident()?;
            TermBody::Name(s, span)
        } else {
            TermBody::Scalar
        };
        self.eat(&Tok::Vac);
        Ok(Term {
            negated,
            coef,
            body,
            span: start.to(self.prev_span()),
        })
    }

    pub fn state_expr(&mut self) -> PResult<StateExpr> {
        let outer = self.in_state;
        self.in_state = true;
        let r = self.state_terms();
        self.in_state = outer;
        r
    }

    fn state_terms(&mut self) -> PResult<StateExpr> {
        let start = self.span();
        let mut terms = vec![];
        let mut negated = self.eat(&Tok::Minus);
        loop {
            terms.push(self.term(negated)?);
            negated = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
        }
        Ok(StateExpr {
            terms,
            span: start.to(self.prev_span()),
        })
    }

    fn reference(&mut self) -> PResult<Ref> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let e = self.state_expr()?;
                self.expect(Tok::RParen)?;
                Ok(Ref::Inline(e))
            }
            Tok::Ident(_) if self.at_mode_var() => Ok(Ref::Generator(self.mode_var()?)),
            Tok::Ident(_) => {
                let (s, span) = self.ident()?;
                Ok(Ref::Name(s, span))
            }
            _ => Err(self.unexpected("a state name, a mode variable or a parenthesized state")),
        }
    }

    fn wmax(&mut self) -> PResult<i32> {
        self.keyword("wmax")?;
        self.expect(Tok::Eq)?;
        let (w, _) = self.nonneg("wmax")?;
        Ok(w as i32)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let (head, head_span) = self.ident()?;
        let kind = match head.as_str() {
            "system" => {
                let (k, kspan) = self.ident()?;
                let kind = match k.as_str() {
                    "heis" => Kind::Heisenberg,
                    "cliff" => Kind::Clifford,
                    "omega" => Kind::Omega,
                    _ => {
                        return Err(Diagnostic::error(
                            "expected `heis`, `cliff` or `omega`",
                            kspan,
                        ))
                    }
                };
                self.keyword("N")?;
                self.expect(Tok::Eq)?;
                let (n, nspan) = self.nonneg("N")?;
                if n == 0 {
                    return Err(Diagnostic::error("N must be at least 1", nspan));
                }
                let ring = if self.is_keyword("ring") {
                    self.bump();
                    let (r, rspan) = self.ident()?;
                    match r.as_str() {
                        "poly" => Ring::Poly,
                        "rat" => Ring::Rat,
                        "series" => {
                            self.expect(Tok::LParen)?;
                            let (d, _) = self.nonneg("series order")?;
                            self.expect(Tok::RParen)?;
                            Ring::Series(d)
                        }
                        _ => {
                            return Err(Diagnostic::error(
                                "expected `poly`, `rat` or `series(D)`",
                                rspan,
                            ))
                        }
                    }
                } else {
                    Ring::Natural
                };
                StmtKind::System {
                    kind,
                    n: n as usize,
                    ring,
                }
            }
            "let" => {
                let (name, name_span) = self.ident()?;
                if mode_head(&name).is_some() || is_coordinate(&name) || name == "O" {
                    return Err(Diagnostic::error(
                        format!("`{name}` is reserved and cannot be bound"),
                        name_span,
                    ));
                }
                self.expect(Tok::Eq)?;
                let expr = self.state_expr()?;
                StmtKind::Let {
                    name,
                    name_span,
                    expr,
                }
            }
            "ope" => StmtKind::Ope(self.reference()?, self.reference()?),
            "nproduct" => {
                let a = self.reference()?;
                let (n, _) = self.int()?;
                StmtKind::NProduct(a, n, self.reference()?)
            }
            "check" => {
                let (k, kspan) = self.ident()?;
                StmtKind::Check(match k.as_str() {
                    "virasoro" => CheckKind::Virasoro,
                    "topological" => CheckKind::Topological,
                    "borcherds" => CheckKind::Borcherds,
                    _ => {
                        return Err(Diagnostic::error(
                            "expected `virasoro`, `topological` or `borcherds`",
                            kspan,
                        ))
                    }
                })
            }
            "cohomology" => StmtKind::Cohomology(self.wmax()?),
            "character" => StmtKind::Character(self.wmax()?),
            "transform" => {
                self.keyword("map")?;
                let map = self.string()?;
                parse_map_string(&map.value, map.span)?;
                self.keyword("order")?;
                let (order, _) = self.nonneg("order")?;
                let action = if self.is_keyword("check") {
                    self.hyphenated("check-opes")?;
                    TransformAction::CheckOpes
                } else if self.is_keyword("apply") {
                    self.bump();
                    TransformAction::Apply(self.reference()?)
                } else if self.is_keyword("structure") {
                    self.bump();
                    TransformAction::Structure
                } else {
                    return Err(self.unexpected("`check-opes`, `apply` or `structure`"));
                };
                StmtKind::Transform { map, order, action }
            }
            "p1" => {
                let (k, kspan) = self.ident()?;
                StmtKind::P1(match k.as_str() {
                    "glue" => P1Cmd::Glue,
                    "wakimoto" => P1Cmd::Wakimoto,
                    "sections" => P1Cmd::Sections(self.nonneg("weight")?.0 as i32),
                    "euler" => P1Cmd::Euler(self.nonneg("weight")?.0 as i32),
                    "reflect" => P1Cmd::Reflect(self.reference()?),
                    _ => {
                        return Err(Diagnostic::error(
                            "expected `glue`, `wakimoto`, `sections`, `euler` or `reflect`",
                            kspan,
                        ))
                    }
                })
            }
            "cocycle" => {
                let name = self.string()?;
                let mut args = Vec::new();
                while matches!(self.peek(), Tok::Str(_)) {
                    let a = self.string()?;
                    parse_string_expr(&a.value, a.span)?;
                    args.push(a);
                }
                StmtKind::Cocycle { name, args }
            }
            _ => {
                return Err(Diagnostic::error(
                    format!("unknown statement `{head}`"),
                    head_span,
                ))
            }
        };
        let end = self.expect(Tok::Semi)?;
        Ok(Stmt {
            kind,
            span: start.to(end),
        })
    }

    fn recover(&mut self) {
        while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
            self.bump();
        }
        self.eat(&Tok::Semi);
    }

    pub fn script(&mut self) -> Result<Script, Vec<Diagnostic>> {
        let mut stmts = Vec::new();
        let mut diags = Vec::new();
        while *self.peek() != Tok::Eof {
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(d) => {
                    diags.push(d);
                    self.recover();
                }
            }
        }
        if diags.is_empty() {
            Ok(Script { stmts })
        } else {
            Err(diags)
        }
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}

pub fn parse(src: &str) -> Result<Script, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    Parser::new(toks).script()
}

/// Parses a whole string as one state expression, as printed by the engine.
pub fn parse_state_expr(src: &str) -> Result<StateExpr, Diagnostic> {
    let mut p = Parser::new(lex(src)?);
    let e = p.state_expr()?;
    if !p.at_end() {
        return Err(p.unexpected("end of state"));
    }
    Ok(e)
}

/// Parses the contents of a string literal as an expression in which every
/// identifier is a variable; spans point into the script.
pub fn parse_string_expr(src: &str, at: Span) -> Result<Expr, Diagnostic> {
    let mut p = Parser::new(lex_at(src, at.line, at.column + 1)?);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

/// Splits `lhs -> rhs, lhs -> rhs` inside a string literal.
pub fn parse_map_string(src: &str, at: Span) -> Result<Vec<(String, Span, Expr)>, Diagnostic> {
    let mut p = Parser::new(lex_at(src, at.line, at.column + 1)?);
    let mut out = Vec::new();
    loop {
        let (name, span) = p.ident()?;
        p.expect(Tok::Arrow)?;
        out.push((name, span, p.expr()?));
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    if !p.at_end() {
        return Err(p.unexpected("`,` or end of map"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
