//! The atlas text format: a total parser and a canonical serializer.
//!
//! ```text
//! # one band, top glued to bottom with a flip
//! strip A {
//!   top: (-inf, +inf);
//!   bottom: (-inf, +inf);
//! }
//! glue g: A.top[0] ~ A.bottom[0] reversed;
//! ```
//!
//! Countable families are declared in blocks that bind the index `n`:
//!
//! ```text
//! family F in Z {
//!   S0.top: (0 + 1*n, 1 + 1*n);      # one interval per n
//!   S1.bottom: (0 + 1*n, 1 + 1*n);
//!   glue s: S0.top[n] ~ S1.bottom[n]; # one gluing per n
//! }
//! ```
//!
//! Interval endpoints are exact rationals (`p/q`), `-inf`/`+inf`, or — inside
//! a family block — affine (`a + b*n`) or geometric (`a + b*(r)^n`) forms.
//! Gluing ends name an interval as `Strip.side[index]` where the index is a
//! position in the side's explicit interval list, `n±c` for a member of the
//! block's own family, or `F:k` / `F:n±c` for members of a named family.
//! `#` starts a comment; parsing never panics, reports every error with a
//! source span, and `parse(serialize(a)) == a` for every atlas value.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::atlas::{
    BoundaryRef, EndpointForm, FamilyForm, Gluing, Interval, IntervalFamily, ModelStrip, Side,
    StripedAtlas, WhichInterval,
};
use crate::rat::{fmt_rat, ExtRat, Rat};

/// A half-open byte range of the source, with the 1-based line and column
/// of its first byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub offset: usize,
    pub len: usize,
    pub line: usize,
    pub col: usize,
}

impl SourceSpan {
    fn point(offset: usize, line: usize, col: usize) -> Self {
        SourceSpan { offset, len: 0, line, col }
    }
}

/// A positioned parse or resolution error. `expected` lists the token
/// classes that would have been accepted, when that is meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Tilde,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl TokKind {
    fn describe(self) -> &'static str {
        match self {
            TokKind::Ident => "identifier",
            TokKind::Int => "integer",
            TokKind::LBrace => "`{`",
            TokKind::RBrace => "`}`",
            TokKind::LParen => "`(`",
            TokKind::RParen => "`)`",
            TokKind::LBracket => "`[`",
            TokKind::RBracket => "`]`",
            TokKind::Comma => "`,`",
            TokKind::Semi => "`;`",
            TokKind::Colon => "`:`",
            TokKind::Tilde => "`~`",
            TokKind::Dot => "`.`",
            TokKind::Plus => "`+`",
            TokKind::Minus => "`-`",
            TokKind::Star => "`*`",
            TokKind::Slash => "`/`",
            TokKind::Caret => "`^`",
            TokKind::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    span: SourceSpan,
}

/// Tokenize the whole input. Unknown characters become errors and are
/// skipped, so lexing is total.
fn lex(input: &str, errors: &mut Vec<ParseError>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        let start = SourceSpan { offset, len: c.len_utf8(), line, col };
        let advance = |chars: &mut std::iter::Peekable<std::str::CharIndices>, line: &mut usize, col: &mut usize| {
            if let Some((_, ch)) = chars.next() {
                if ch == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            }
        };
        if c.is_whitespace() {
            advance(&mut chars, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while let Some(&(_, ch)) = chars.peek() {
                if ch == '\n' {
                    break;
                }
                advance(&mut chars, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let begin = offset;
            let mut end = offset;
            while let Some(&(o, ch)) = chars.peek() {
                if ch.is_ascii_alphanumeric() {
                    end = o + ch.len_utf8();
                    advance(&mut chars, &mut line, &mut col);
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokKind::Ident,
                text: input[begin..end].to_string(),
                span: SourceSpan { offset: begin, len: end - begin, ..start },
            });
            continue;
        }
        if c.is_ascii_digit() {
            let begin = offset;
            let mut end = offset;
            while let Some(&(o, ch)) = chars.peek() {
                if ch.is_ascii_digit() {
                    end = o + ch.len_utf8();
                    advance(&mut chars, &mut line, &mut col);
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokKind::Int,
                text: input[begin..end].to_string(),
                span: SourceSpan { offset: begin, len: end - begin, ..start },
            });
            continue;
        }
        let kind = match c {
            '{' => Some(TokKind::LBrace),
            '}' => Some(TokKind::RBrace),
            '(' => Some(TokKind::LParen),
            ')' => Some(TokKind::RParen),
            '[' => Some(TokKind::LBracket),
            ']' => Some(TokKind::RBracket),
            ',' => Some(TokKind::Comma),
            ';' => Some(TokKind::Semi),
            ':' => Some(TokKind::Colon),
            '~' => Some(TokKind::Tilde),
            '.' => Some(TokKind::Dot),
            '+' => Some(TokKind::Plus),
            '-' => Some(TokKind::Minus),
            '*' => Some(TokKind::Star),
            '/' => Some(TokKind::Slash),
            '^' => Some(TokKind::Caret),
            _ => None,
        };
        match kind {
            Some(kind) => {
                tokens.push(Token { kind, text: c.to_string(), span: start });
                advance(&mut chars, &mut line, &mut col);
            }
            None => {
                errors.push(ParseError {
                    span: start,
                    message: format!("unexpected character `{}`", c.escape_default()),
                    expected: vec![],
                });
                advance(&mut chars, &mut line, &mut col);
            }
        }
    }
    let end_line = line;
    let end_col = col;
    tokens.push(Token {
        kind: TokKind::Eof,
        text: String::new(),
        span: SourceSpan::point(input.len(), end_line, end_col),
    });
    tokens
}

/// One parsed endpoint expression.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Endpoint {
    NegInf,
    PosInf,
    Const(Rat),
    Affine { base: Rat, coeff: Rat },
    Geometric { base: Rat, coeff: Rat, ratio: Rat },
}

#[derive(Debug, Clone)]
struct RawInterval {
    lo: Endpoint,
    hi: Endpoint,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum RawIndex {
    Explicit(i64),
    /// `n ± offset`, resolving in the enclosing family block.
    N { offset: i64 },
    /// `F:k` — fixed member of a named family.
    Fixed { family: String, index: i64 },
    /// `F:n ± offset` — running member of a named family.
    NamedN { family: String, offset: i64 },
}

#[derive(Debug, Clone)]
struct RawRef {
    strip: String,
    side: Side,
    index: RawIndex,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
struct RawGlue {
    id: String,
    id_span: SourceSpan,
    x: RawRef,
    y: RawRef,
    reversed: bool,
    /// The enclosing family block, if any.
    scope: Option<String>,
}

#[derive(Debug, Clone)]
struct RawAttach {
    strip: String,
    side: Side,
    interval: RawInterval,
    family: String,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
struct RawStrip {
    id: String,
    id_span: SourceSpan,
    top: Vec<RawInterval>,
    bottom: Vec<RawInterval>,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    strips: Vec<RawStrip>,
    glues: Vec<RawGlue>,
    attaches: Vec<RawAttach>,
    family_blocks: Vec<(String, SourceSpan)>,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, kind: TokKind) -> bool {
        self.peek().kind == kind
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().kind == TokKind::Ident && self.peek().text == kw
    }

    fn error_here(&mut self, message: impl Into<String>, expected: Vec<String>) {
        let span = self.peek().span;
        self.errors.push(ParseError { span, message: message.into(), expected });
    }

    fn expect(&mut self, kind: TokKind) -> Option<Token> {
        if self.at(kind) {
            Some(self.bump())
        } else {
            self.error_here(
                format!("found {}", describe_token(self.peek())),
                vec![kind.describe().to_string()],
            );
            None
        }
    }

    fn expect_ident(&mut self, what: &str) -> Option<Token> {
        if self.at(TokKind::Ident) {
            Some(self.bump())
        } else {
            self.error_here(
                format!("found {} where {} was expected", describe_token(self.peek()), what),
                vec!["identifier".to_string()],
            );
            None
        }
    }

    /// Skip ahead to the next plausible top-level item.
    fn sync_top(&mut self) {
        loop {
            if self.at(TokKind::Eof) || self.at_kw("strip") || self.at_kw("glue") || self.at_kw("family") {
                return;
            }
            self.bump();
        }
    }

    /// Skip to just past the next `;`, or stop before `}` / EOF.
    fn sync_statement(&mut self) {
        loop {
            if self.at(TokKind::Eof) || self.at(TokKind::RBrace) {
                return;
            }
            if self.at(TokKind::Semi) {
                self.bump();
                return;
            }
            self.bump();
        }
    }

    fn parse_top(&mut self) {
        while !self.at(TokKind::Eof) {
            if self.at_kw("strip") {
                self.bump();
                self.parse_strip();
            } else if self.at_kw("glue") {
                self.bump();
                self.parse_glue(None);
            } else if self.at_kw("family") {
                self.bump();
                self.parse_family();
            } else {
                self.error_here(
                    format!("found {} at the top level", describe_token(self.peek())),
                    vec!["`strip`".to_string(), "`glue`".to_string(), "`family`".to_string()],
                );
                self.bump();
                self.sync_top();
            }
        }
    }

    fn parse_strip(&mut self) {
        let Some(id) = self.expect_ident("a strip id") else {
            self.sync_top();
            return;
        };
        let mut strip = RawStrip { id: id.text.clone(), id_span: id.span, top: Vec::new(), bottom: Vec::new() };
        if self.expect(TokKind::LBrace).is_none() {
            self.sync_top();
            return;
        }
        let mut seen_top = false;
        let mut seen_bottom = false;
        loop {
            if self.at(TokKind::RBrace) {
                self.bump();
                break;
            }
            if self.at(TokKind::Eof) {
                self.error_here("strip body is not closed", vec!["`}`".to_string()]);
                break;
            }
            let side = if self.at_kw("top") {
                Side::Top
            } else if self.at_kw("bottom") {
                Side::Bottom
            } else {
                self.error_here(
                    format!("found {} in a strip body", describe_token(self.peek())),
                    vec!["`top`".to_string(), "`bottom`".to_string(), "`}`".to_string()],
                );
                self.sync_statement();
                continue;
            };
            let side_tok = self.bump();
            let seen = match side {
                Side::Top => &mut seen_top,
                Side::Bottom => &mut seen_bottom,
            };
            if *seen {
                self.errors.push(ParseError {
                    span: side_tok.span,
                    message: format!("strip `{}` declares its {} side twice", strip.id, side.name()),
                    expected: vec![],
                });
            }
            *seen = true;
            if self.expect(TokKind::Colon).is_none() {
                self.sync_statement();
                continue;
            }
            let intervals = if self.at_kw("none") {
                self.bump();
                Vec::new()
            } else {
                let mut list = Vec::new();
                loop {
                    match self.parse_interval(false) {
                        Some(iv) => list.push(iv),
                        None => break,
                    }
                    if self.at(TokKind::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                list
            };
            if self.expect(TokKind::Semi).is_none() {
                self.sync_statement();
            }
            match side {
                Side::Top => strip.top = intervals,
                Side::Bottom => strip.bottom = intervals,
            }
        }
        self.strips.push(strip);
    }

    /// `( ep , ep )`. With `family_scope`, endpoint expressions may use `n`.
    fn parse_interval(&mut self, family_scope: bool) -> Option<RawInterval> {
        let open = self.expect(TokKind::LParen)?;
        let lo = self.parse_endpoint(family_scope)?;
        self.expect(TokKind::Comma)?;
        let hi = self.parse_endpoint(family_scope)?;
        let close = self.expect(TokKind::RParen)?;
        let span = SourceSpan {
            offset: open.span.offset,
            len: close.span.offset + close.span.len - open.span.offset,
            line: open.span.line,
            col: open.span.col,
        };
        Some(RawInterval { lo, hi, span })
    }

    /// A signed rational literal: `[-] INT [/ INT]`.
    fn parse_rational(&mut self) -> Option<Rat> {
        let negative = if self.at(TokKind::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let int = self.expect(TokKind::Int)?;
        let numer: BigInt = int.text.parse().expect("digits parse as BigInt");
        let denom: BigInt = if self.at(TokKind::Slash) {
            self.bump();
            let d = self.expect(TokKind::Int)?;
            let v: BigInt = d.text.parse().expect("digits parse as BigInt");
            if v.is_zero() {
                self.errors.push(ParseError {
                    span: d.span,
                    message: "zero denominator".to_string(),
                    expected: vec![],
                });
                return None;
            }
            v
        } else {
            BigInt::from(1)
        };
        let mut r = Rat::new(numer, denom);
        if negative {
            r = -r;
        }
        Some(r)
    }

    /// One term of an endpoint expression, with the sign already applied:
    /// `inf`, `n`, `RAT`, `RAT*n`, `(RAT)^n`, or `RAT*(RAT)^n`.
    fn parse_term(&mut self, sign: i32) -> Option<Term> {
        let apply = |r: Rat| if sign < 0 { -r } else { r };
        if self.at_kw("inf") {
            self.bump();
            return Some(if sign < 0 { Term::NegInf } else { Term::PosInf });
        }
        if self.at_kw("n") {
            self.bump();
            return Some(Term::N(apply(Rat::from_integer(BigInt::from(1)))));
        }
        if self.at(TokKind::LParen) {
            // (r)^n
            self.bump();
            let ratio = self.parse_rational()?;
            self.expect(TokKind::RParen)?;
            self.expect(TokKind::Caret)?;
            if !self.at_kw("n") {
                self.error_here(
                    format!("found {} as an exponent", describe_token(self.peek())),
                    vec!["`n`".to_string()],
                );
                return None;
            }
            self.bump();
            return Some(Term::Geo { coeff: apply(Rat::from_integer(BigInt::from(1))), ratio });
        }
        if self.at(TokKind::Int) {
            let r = self.parse_rational()?;
            if self.at(TokKind::Star) {
                self.bump();
                if self.at_kw("n") {
                    self.bump();
                    return Some(Term::N(apply(r)));
                }
                if self.at(TokKind::LParen) {
                    self.bump();
                    let ratio = self.parse_rational()?;
                    self.expect(TokKind::RParen)?;
                    self.expect(TokKind::Caret)?;
                    if !self.at_kw("n") {
                        self.error_here(
                            format!("found {} as an exponent", describe_token(self.peek())),
                            vec!["`n`".to_string()],
                        );
                        return None;
                    }
                    self.bump();
                    return Some(Term::Geo { coeff: apply(r), ratio });
                }
                self.error_here(
                    format!("found {} after `*`", describe_token(self.peek())),
                    vec!["`n`".to_string(), "`(`".to_string()],
                );
                return None;
            }
            return Some(Term::Const(apply(r)));
        }
        self.error_here(
            format!("found {} in an endpoint expression", describe_token(self.peek())),
            vec!["number".to_string(), "`n`".to_string(), "`inf`".to_string(), "`(`".to_string()],
        );
        None
    }

    fn parse_endpoint(&mut self, family_scope: bool) -> Option<Endpoint> {
        let start_span = self.peek().span;
        let mut terms = Vec::new();
        let mut sign = if self.at(TokKind::Minus) {
            self.bump();
            -1
        } else {
            if self.at(TokKind::Plus) {
                self.bump();
            }
            1
        };
        loop {
            terms.push(self.parse_term(sign)?);
            if self.at(TokKind::Plus) {
                self.bump();
                sign = 1;
            } else if self.at(TokKind::Minus) {
                self.bump();
                sign = -1;
            } else {
                break;
            }
        }
        // Combine the terms into one of the admissible endpoint shapes.
        let mut base = Rat::zero();
        let mut n_coeff = Rat::zero();
        let mut geo: Option<(Rat, Rat)> = None; // (ratio, coeff)
        let mut inf: Option<bool> = None; // Some(true) = +inf
        for term in terms {
            match term {
                Term::PosInf => inf = Some(inf != Some(false)),
                Term::NegInf => inf = Some(false),
                Term::Const(r) => base += r,
                Term::N(c) => n_coeff += c,
                Term::Geo { coeff, ratio } => match &mut geo {
                    None => geo = Some((ratio, coeff)),
                    Some((r0, c0)) => {
                        if *r0 != ratio {
                            self.errors.push(ParseError {
                                span: start_span,
                                message: "geometric terms with different ratios in one endpoint".to_string(),
                                expected: vec![],
                            });
                            return None;
                        }
                        *c0 += coeff;
                    }
                },
            }
        }
        if inf.is_some() && (!base.is_zero() || !n_coeff.is_zero() || geo.is_some()) {
            self.errors.push(ParseError {
                span: start_span,
                message: "an infinite endpoint cannot be combined with other terms".to_string(),
                expected: vec![],
            });
            return None;
        }
        if let Some(pos) = inf {
            return Some(if pos { Endpoint::PosInf } else { Endpoint::NegInf });
        }
        if !n_coeff.is_zero() && geo.is_some() {
            self.errors.push(ParseError {
                span: start_span,
                message: "an endpoint cannot mix affine (`n`) and geometric (`(r)^n`) terms".to_string(),
                expected: vec![],
            });
            return None;
        }
        let endpoint = if let Some((ratio, coeff)) = geo {
            Endpoint::Geometric { base, coeff, ratio }
        } else if !n_coeff.is_zero() {
            Endpoint::Affine { base, coeff: n_coeff }
        } else {
            Endpoint::Const(base)
        };
        if !family_scope && matches!(endpoint, Endpoint::Affine { .. } | Endpoint::Geometric { .. }) {
            self.errors.push(ParseError {
                span: start_span,
                message: "`n` is only available inside a family block".to_string(),
                expected: vec![],
            });
            return None;
        }
        Some(endpoint)
    }

    /// A signed integer literal (for indices and offsets).
    fn parse_signed_int(&mut self) -> Option<i64> {
        let negative = if self.at(TokKind::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.expect(TokKind::Int)?;
        match tok.text.parse::<i64>() {
            Ok(v) => Some(if negative { -v } else { v }),
            Err(_) => {
                self.errors.push(ParseError {
                    span: tok.span,
                    message: "index does not fit in 64 bits".to_string(),
                    expected: vec![],
                });
                None
            }
        }
    }

    /// `n [± INT]` after the `n` has been observed (not yet consumed).
    fn parse_n_offset(&mut self) -> Option<i64> {
        self.bump(); // the `n`
        if self.at(TokKind::Plus) {
            self.bump();
            self.parse_signed_int()
        } else if self.at(TokKind::Minus) {
            self.bump();
            self.parse_signed_int().map(|v| -v)
        } else {
            Some(0)
        }
    }

    /// `Strip.side[index]`.
    fn parse_ref(&mut self, scope: Option<&str>) -> Option<RawRef> {
        let strip = self.expect_ident("a strip id")?;
        self.expect(TokKind::Dot)?;
        let side = if self.at_kw("top") {
            self.bump();
            Side::Top
        } else if self.at_kw("bottom") {
            self.bump();
            Side::Bottom
        } else {
            self.error_here(
                format!("found {} as a side name", describe_token(self.peek())),
                vec!["`top`".to_string(), "`bottom`".to_string()],
            );
            return None;
        };
        self.expect(TokKind::LBracket)?;
        let index_span = self.peek().span;
        let index = if self.at_kw("n") {
            RawIndex::N { offset: self.parse_n_offset()? }
        } else if self.at(TokKind::Ident) {
            let family = self.bump().text;
            self.expect(TokKind::Colon)?;
            if self.at_kw("n") {
                RawIndex::NamedN { family, offset: self.parse_n_offset()? }
            } else {
                RawIndex::Fixed { family, index: self.parse_signed_int()? }
            }
        } else {
            RawIndex::Explicit(self.parse_signed_int()?)
        };
        if matches!(index, RawIndex::N { .. } | RawIndex::NamedN { .. }) && scope.is_none() {
            self.errors.push(ParseError {
                span: index_span,
                message: "`n` is only available inside a family block".to_string(),
                expected: vec![],
            });
            return None;
        }
        self.expect(TokKind::RBracket)?;
        Some(RawRef {
            strip: strip.text,
            side,
            index,
            span: SourceSpan {
                offset: strip.span.offset,
                len: index_span.offset + index_span.len - strip.span.offset,
                line: strip.span.line,
                col: strip.span.col,
            },
        })
    }

    fn parse_glue(&mut self, scope: Option<&str>) {
        let Some(id) = self.expect_ident("a gluing id") else {
            self.sync_statement();
            return;
        };
        if self.expect(TokKind::Colon).is_none() {
            self.sync_statement();
            return;
        }
        let Some(x) = self.parse_ref(scope) else {
            self.sync_statement();
            return;
        };
        if self.expect(TokKind::Tilde).is_none() {
            self.sync_statement();
            return;
        }
        let Some(y) = self.parse_ref(scope) else {
            self.sync_statement();
            return;
        };
        let reversed = if self.at_kw("reversed") {
            self.bump();
            true
        } else {
            false
        };
        if self.expect(TokKind::Semi).is_none() {
            self.sync_statement();
        }
        self.glues.push(RawGlue {
            id: id.text,
            id_span: id.span,
            x,
            y,
            reversed,
            scope: scope.map(str::to_string),
        });
    }

    fn parse_family(&mut self) {
        let Some(id) = self.expect_ident("a family id") else {
            self.sync_top();
            return;
        };
        if !self.at_kw("in") {
            self.error_here(
                format!("found {} after the family id", describe_token(self.peek())),
                vec!["`in`".to_string()],
            );
            self.sync_top();
            return;
        }
        self.bump();
        if !self.at_kw("Z") {
            self.error_here(
                format!("found {} as the family index set", describe_token(self.peek())),
                vec!["`Z`".to_string()],
            );
            self.sync_top();
            return;
        }
        self.bump();
        self.family_blocks.push((id.text.clone(), id.span));
        if self.expect(TokKind::LBrace).is_none() {
            self.sync_top();
            return;
        }
        loop {
            if self.at(TokKind::RBrace) {
                self.bump();
                break;
            }
            if self.at(TokKind::Eof) {
                self.error_here("family body is not closed", vec!["`}`".to_string()]);
                break;
            }
            if self.at_kw("glue") {
                self.bump();
                self.parse_glue(Some(&id.text));
                continue;
            }
            if self.at_kw("strip") {
                self.error_here("strips cannot be declared inside a family block", vec![]);
                self.sync_statement();
                continue;
            }
            if self.at(TokKind::Ident) {
                // Attachment: Strip.side: (ep, ep);
                let strip = self.bump();
                if self.expect(TokKind::Dot).is_none() {
                    self.sync_statement();
                    continue;
                }
                let side = if self.at_kw("top") {
                    self.bump();
                    Side::Top
                } else if self.at_kw("bottom") {
                    self.bump();
                    Side::Bottom
                } else {
                    self.error_here(
                        format!("found {} as a side name", describe_token(self.peek())),
                        vec!["`top`".to_string(), "`bottom`".to_string()],
                    );
                    self.sync_statement();
                    continue;
                };
                if self.expect(TokKind::Colon).is_none() {
                    self.sync_statement();
                    continue;
                }
                let Some(interval) = self.parse_interval(true) else {
                    self.sync_statement();
                    continue;
                };
                if self.at(TokKind::Comma) {
                    self.error_here(
                        "a family attachment declares exactly one interval per side".to_string(),
                        vec!["`;`".to_string()],
                    );
                    self.sync_statement();
                    continue;
                }
                if self.expect(TokKind::Semi).is_none() {
                    self.sync_statement();
                }
                let span = interval.span;
                self.attaches.push(RawAttach {
                    strip: strip.text,
                    side,
                    interval,
                    family: id.text.clone(),
                    span,
                });
                continue;
            }
            self.error_here(
                format!("found {} in a family body", describe_token(self.peek())),
                vec!["attachment".to_string(), "`glue`".to_string(), "`}`".to_string()],
            );
            self.sync_statement();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    PosInf,
    NegInf,
    Const(Rat),
    N(Rat),
    Geo { coeff: Rat, ratio: Rat },
}

fn describe_token(t: &Token) -> String {
    match t.kind {
        TokKind::Ident => format!("`{}`", t.text),
        TokKind::Int => format!("`{}`", t.text),
        TokKind::Eof => "end of input".to_string(),
        k => k.describe().to_string(),
    }
}

fn endpoint_to_ext(e: &Endpoint) -> Option<ExtRat> {
    match e {
        Endpoint::NegInf => Some(ExtRat::NegInf),
        Endpoint::PosInf => Some(ExtRat::PosInf),
        Endpoint::Const(r) => Some(ExtRat::Fin(r.clone())),
        _ => None,
    }
}

/// Parse an atlas description. Never panics; either the complete atlas or
/// every error found, each with a source span.
pub fn parse(input: &str) -> Result<StripedAtlas, Vec<ParseError>> {
    let mut errors = Vec::new();
    let tokens = lex(input, &mut errors);
    let mut parser = Parser {
        tokens,
        pos: 0,
        errors,
        strips: Vec::new(),
        glues: Vec::new(),
        attaches: Vec::new(),
        family_blocks: Vec::new(),
        _src: input,
    };
    parser.parse_top();
    let Parser { mut errors, strips, glues, attaches, family_blocks, .. } = parser;

    // Resolution: duplicate ids.
    for (i, s) in strips.iter().enumerate() {
        if strips[..i].iter().any(|t| t.id == s.id) {
            errors.push(ParseError {
                span: s.id_span,
                message: format!("duplicate strip id `{}`", s.id),
                expected: vec![],
            });
        }
    }
    for (i, g) in glues.iter().enumerate() {
        if glues[..i].iter().any(|h| h.id == g.id) {
            errors.push(ParseError {
                span: g.id_span,
                message: format!("duplicate gluing id `{}`", g.id),
                expected: vec![],
            });
        }
    }
    for (i, (f, span)) in family_blocks.iter().enumerate() {
        if family_blocks[..i].iter().any(|(g, _)| g == f) {
            errors.push(ParseError {
                span: *span,
                message: format!("duplicate family block id `{}`", f),
                expected: vec![],
            });
        }
    }

    // Assemble model strips; explicit intervals must have constant
    // endpoints (the grammar guarantees it — n-forms were rejected).
    let mut model_strips: Vec<ModelStrip> = Vec::new();
    for raw in &strips {
        let mut strip = ModelStrip::bare(&raw.id);
        for (side, list) in [(Side::Top, &raw.top), (Side::Bottom, &raw.bottom)] {
            for iv in list {
                let (Some(lo), Some(hi)) = (endpoint_to_ext(&iv.lo), endpoint_to_ext(&iv.hi)) else {
                    errors.push(ParseError {
                        span: iv.span,
                        message: "strip intervals must have constant endpoints".to_string(),
                        expected: vec![],
                    });
                    continue;
                };
                strip.side_mut(side).intervals.push(Interval::new(lo, hi));
            }
        }
        model_strips.push(strip);
    }

    // Attachments become interval families on their sides.
    for attach in &attaches {
        let Some(strip) = model_strips.iter_mut().find(|s| s.id == attach.strip) else {
            errors.push(ParseError {
                span: attach.span,
                message: format!("unknown strip `{}`", attach.strip),
                expected: vec![],
            });
            continue;
        };
        let to_form = |e: &Endpoint| -> (EndpointForm, Option<Rat>) {
            match e {
                Endpoint::Const(r) => (EndpointForm::constant(r.clone()), None),
                Endpoint::Affine { base, coeff } => (EndpointForm::new(base.clone(), coeff.clone()), None),
                Endpoint::Geometric { base, coeff, ratio } => {
                    (EndpointForm::new(base.clone(), coeff.clone()), Some(ratio.clone()))
                }
                Endpoint::NegInf | Endpoint::PosInf => (EndpointForm::constant(Rat::zero()), None),
            }
        };
        if matches!(attach.interval.lo, Endpoint::NegInf | Endpoint::PosInf)
            || matches!(attach.interval.hi, Endpoint::NegInf | Endpoint::PosInf)
        {
            errors.push(ParseError {
                span: attach.interval.span,
                message: "family intervals must have finite endpoints".to_string(),
                expected: vec![],
            });
            continue;
        }
        let (lo, lo_ratio) = to_form(&attach.interval.lo);
        let (hi, hi_ratio) = to_form(&attach.interval.hi);
        let is_affine = matches!(attach.interval.lo, Endpoint::Affine { .. })
            || matches!(attach.interval.hi, Endpoint::Affine { .. });
        let form = match (lo_ratio, hi_ratio) {
            (None, None) => FamilyForm::Affine { lo, hi },
            (Some(r), None) | (None, Some(r)) if !is_affine => FamilyForm::Geometric { lo, hi, ratio: r },
            (Some(r0), Some(r1)) if !is_affine && r0 == r1 => FamilyForm::Geometric { lo, hi, ratio: r0 },
            _ => {
                errors.push(ParseError {
                    span: attach.interval.span,
                    message: "family endpoints must agree: both affine or both geometric with one ratio"
                        .to_string(),
                    expected: vec![],
                });
                continue;
            }
        };
        let spec = strip.side_mut(attach.side);
        if spec.family(&attach.family).is_some() {
            errors.push(ParseError {
                span: attach.span,
                message: format!(
                    "family `{}` already attaches an interval to `{}.{}`",
                    attach.family, attach.strip, attach.side
                ),
                expected: vec![],
            });
            continue;
        }
        spec.families.push(IntervalFamily { family: attach.family.clone(), form });
    }

    // Resolve gluing references.
    let mut model_glues: Vec<Gluing> = Vec::new();
    for glue in &glues {
        let mut resolve = |r: &RawRef| -> Option<BoundaryRef> {
            let Some(strip) = model_strips.iter().find(|s| s.id == r.strip) else {
                errors.push(ParseError {
                    span: r.span,
                    message: format!("unknown strip `{}`", r.strip),
                    expected: vec![],
                });
                return None;
            };
            let spec = strip.side(r.side);
            let which = match &r.index {
                RawIndex::Explicit(i) => {
                    if *i < 0 || (*i as usize) >= spec.intervals.len() {
                        errors.push(ParseError {
                            span: r.span,
                            message: format!(
                                "`{}.{}` has {} explicit interval(s); index {} is out of range",
                                r.strip,
                                r.side,
                                spec.intervals.len(),
                                i
                            ),
                            expected: vec![],
                        });
                        return None;
                    }
                    WhichInterval::Explicit(*i as usize)
                }
                RawIndex::N { offset } => {
                    let block = glue.scope.as_deref().expect("grammar rejects bare n outside blocks");
                    if spec.family(block).is_none() {
                        errors.push(ParseError {
                            span: r.span,
                            message: format!(
                                "family `{}` attaches no interval to `{}.{}`",
                                block, r.strip, r.side
                            ),
                            expected: vec![],
                        });
                        return None;
                    }
                    WhichInterval::Member { family: block.to_string(), offset: *offset, uses_n: true }
                }
                RawIndex::Fixed { family, index } => {
                    if spec.family(family).is_none() {
                        errors.push(ParseError {
                            span: r.span,
                            message: format!(
                                "family `{}` attaches no interval to `{}.{}`",
                                family, r.strip, r.side
                            ),
                            expected: vec![],
                        });
                        return None;
                    }
                    WhichInterval::Member { family: family.clone(), offset: *index, uses_n: false }
                }
                RawIndex::NamedN { family, offset } => {
                    if spec.family(family).is_none() {
                        errors.push(ParseError {
                            span: r.span,
                            message: format!(
                                "family `{}` attaches no interval to `{}.{}`",
                                family, r.strip, r.side
                            ),
                            expected: vec![],
                        });
                        return None;
                    }
                    WhichInterval::Member { family: family.clone(), offset: *offset, uses_n: true }
                }
            };
            Some(BoundaryRef { strip: r.strip.clone(), side: r.side, which })
        };
        let x = resolve(&glue.x);
        let y = resolve(&glue.y);
        if let (Some(x), Some(y)) = (x, y) {
            model_glues.push(Gluing {
                id: glue.id.clone(),
                x,
                y,
                reversed: glue.reversed,
                family: glue.scope.clone(),
            });
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| (e.span.offset, e.message.clone()));
        return Err(errors);
    }

    match StripedAtlas::new(model_strips, model_glues) {
        Ok(atlas) => Ok(atlas),
        Err(build) => Err(vec![ParseError {
            span: SourceSpan::point(0, 1, 1),
            message: build.to_string(),
            expected: vec![],
        }]),
    }
}

fn write_ext(out: &mut String, e: &ExtRat) {
    match e {
        ExtRat::NegInf => out.push_str("-inf"),
        ExtRat::PosInf => out.push_str("+inf"),
        ExtRat::Fin(r) => out.push_str(&fmt_rat(r)),
    }
}

fn write_form_endpoint(out: &mut String, ep: &EndpointForm, geo: Option<&Rat>) {
    out.push_str(&fmt_rat(&ep.base));
    if ep.coeff.is_zero() {
        return;
    }
    if ep.coeff.is_negative() {
        out.push_str(" - ");
        out.push_str(&fmt_rat(&-ep.coeff.clone()));
    } else {
        out.push_str(" + ");
        out.push_str(&fmt_rat(&ep.coeff));
    }
    match geo {
        None => out.push_str("*n"),
        Some(r) => {
            out.push_str("*(");
            out.push_str(&fmt_rat(r));
            out.push_str(")^n");
        }
    }
}

fn write_which(out: &mut String, which: &WhichInterval, scope: Option<&str>) {
    match which {
        WhichInterval::Explicit(i) => {
            out.push_str(&i.to_string());
        }
        WhichInterval::Member { family, offset, uses_n } => {
            if *uses_n {
                if scope != Some(family.as_str()) {
                    out.push_str(family);
                    out.push(':');
                }
                out.push('n');
                if *offset > 0 {
                    out.push('+');
                    out.push_str(&offset.to_string());
                } else if *offset < 0 {
                    out.push_str(&offset.to_string());
                }
            } else {
                out.push_str(family);
                out.push(':');
                out.push_str(&offset.to_string());
            }
        }
    }
}

fn write_glue(out: &mut String, g: &Gluing, scope: Option<&str>, indent: &str) {
    out.push_str(indent);
    out.push_str("glue ");
    out.push_str(&g.id);
    out.push_str(": ");
    for (i, end) in [&g.x, &g.y].into_iter().enumerate() {
        if i == 1 {
            out.push_str(" ~ ");
        }
        out.push_str(&end.strip);
        out.push('.');
        out.push_str(end.side.name());
        out.push('[');
        write_which(out, &end.which, scope);
        out.push(']');
    }
    if g.reversed {
        out.push_str(" reversed");
    }
    out.push_str(";\n");
}

/// Canonical text form: strips (sorted), then standalone gluings (sorted),
/// then family blocks (sorted) containing their attachments and gluings.
/// `parse(serialize(a)) == a` for every atlas value.
pub fn serialize(atlas: &StripedAtlas) -> String {
    let mut out = String::new();
    for strip in atlas.strips() {
        out.push_str("strip ");
        out.push_str(&strip.id);
        out.push_str(" {\n");
        for side in [Side::Top, Side::Bottom] {
            out.push_str("  ");
            out.push_str(side.name());
            out.push_str(": ");
            let spec = strip.side(side);
            if spec.intervals.is_empty() {
                out.push_str("none");
            } else {
                for (i, iv) in spec.intervals.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push('(');
                    write_ext(&mut out, &iv.lo);
                    out.push_str(", ");
                    write_ext(&mut out, &iv.hi);
                    out.push(')');
                }
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    for g in atlas.gluings() {
        if g.family.is_none() {
            write_glue(&mut out, g, None, "");
        }
    }
    for family in atlas.family_ids() {
        out.push_str("family ");
        out.push_str(&family);
        out.push_str(" in Z {\n");
        for strip in atlas.strips() {
            for side in [Side::Top, Side::Bottom] {
                if let Some(f) = strip.side(side).family(&family) {
                    out.push_str("  ");
                    out.push_str(&strip.id);
                    out.push('.');
                    out.push_str(side.name());
                    out.push_str(": (");
                    match &f.form {
                        FamilyForm::Affine { lo, hi } => {
                            write_form_endpoint(&mut out, lo, None);
                            out.push_str(", ");
                            write_form_endpoint(&mut out, hi, None);
                        }
                        FamilyForm::Geometric { lo, hi, ratio } => {
                            write_form_endpoint(&mut out, lo, Some(ratio));
                            out.push_str(", ");
                            write_form_endpoint(&mut out, hi, Some(ratio));
                        }
                    }
                    out.push_str(");\n");
                }
            }
        }
        for g in atlas.gluings() {
            if g.family.as_deref() == Some(family.as_str()) {
                write_glue(&mut out, g, Some(&family), "  ");
            }
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn parse_ok(input: &str) -> StripedAtlas {
        match parse(input) {
            Ok(a) => a,
            Err(errors) => panic!("parse failed: {:?}", errors),
        }
    }

    #[test]
    fn parses_a_plain_strip() {
        let atlas = parse_ok("strip A { top: (0, 1), (2, +inf); bottom: none; }");
        let strip = atlas.strip("A").unwrap();
        assert_eq!(strip.top.intervals.len(), 2);
        assert_eq!(strip.top.intervals[0], Interval::finite(rat_int(0), rat_int(1)));
        assert_eq!(strip.top.intervals[1], Interval::new(ExtRat::Fin(rat_int(2)), ExtRat::PosInf));
        assert!(strip.bottom.is_none());
    }

    #[test]
    fn parses_gluings_and_reversed_flag() {
        let atlas = parse_ok(
            "strip A { top: (-inf, +inf); bottom: (-inf, +inf); }\nglue g: A.top[0] ~ A.bottom[0] reversed;",
        );
        let g = &atlas.gluings()[0];
        assert!(g.reversed);
        assert_eq!(g.x, BoundaryRef::explicit("A", Side::Top, 0));
        assert_eq!(g.y, BoundaryRef::explicit("A", Side::Bottom, 0));
    }

    #[test]
    fn parses_family_blocks() {
        let atlas = parse_ok(
            "strip S0 { top: none; bottom: none; }\nstrip S1 { top: none; bottom: none; }\nfamily F in Z {\n  S0.top: (n, n + 1);\n  S1.bottom: (n, 1 + 1*n);\n  glue s: S0.top[n] ~ S1.bottom[n];\n}",
        );
        let fam = atlas.strip("S0").unwrap().top.family("F").unwrap();
        match &fam.form {
            FamilyForm::Affine { lo, hi } => {
                assert_eq!(lo, &EndpointForm::new(rat_int(0), rat_int(1)));
                assert_eq!(hi, &EndpointForm::new(rat_int(1), rat_int(1)));
            }
            other => panic!("expected affine family, got {:?}", other),
        }
        let g = &atlas.gluings()[0];
        assert_eq!(g.family.as_deref(), Some("F"));
        assert_eq!(g.x, BoundaryRef::indexed("S0", Side::Top, "F", 0));
    }

    #[test]
    fn parses_geometric_families_and_signs() {
        let atlas = parse_ok(
            "strip A { top: (-1, 1/4); bottom: none; }\nfamily F in Z {\n  A.top: (0 + 1/2*(1/2)^n, 0 + 1*(1/2)^n);\n}",
        );
        let fam = atlas.strip("A").unwrap().top.family("F").unwrap();
        match &fam.form {
            FamilyForm::Geometric { lo, hi, ratio } => {
                assert_eq!(lo, &EndpointForm::new(rat_int(0), rat(1, 2)));
                assert_eq!(hi, &EndpointForm::new(rat_int(0), rat_int(1)));
                assert_eq!(ratio, &rat(1, 2));
            }
            other => panic!("expected geometric family, got {:?}", other),
        }
        // "1 - n" folds the sign into the coefficient.
        let atlas = parse_ok("strip B { top: none; bottom: none; }\nfamily G in Z { B.top: (-n, 1 - n); }");
        let fam = atlas.strip("B").unwrap().top.family("G").unwrap();
        match &fam.form {
            FamilyForm::Affine { lo, hi } => {
                assert_eq!(lo, &EndpointForm::new(rat_int(0), rat_int(-1)));
                assert_eq!(hi, &EndpointForm::new(rat_int(1), rat_int(-1)));
            }
            other => panic!("expected affine family, got {:?}", other),
        }
    }

    #[test]
    fn comments_and_unicode_whitespace_are_skipped() {
        let atlas = parse_ok("# heading\nstrip A { # inline\n  top: none; bottom: none;\n}\n# trailing");
        assert_eq!(atlas.strips().len(), 1);
    }

    #[test]
    fn errors_are_positioned() {
        let err = parse("strip A { top: (0, 1; bottom: none; }").unwrap_err();
        assert_eq!(err[0].span.line, 1);
        assert_eq!(err[0].span.col, 21);
        assert!(err[0].expected.iter().any(|e| e.contains(")")));

        let err = parse("strip A { top: none; bottom: none; }\nglue g: A.top[0] ~ A.bottom[0];").unwrap_err();
        assert_eq!(err[0].span.line, 2);
        assert!(err[0].message.contains("out of range"));
    }

    #[test]
    fn multiple_errors_are_collected() {
        let err = parse("strip A { top: (0 1); }\nglue g: B.top[0] ~ A.top[0];").unwrap_err();
        assert!(err.len() >= 2, "got {:?}", err);
    }

    #[test]
    fn n_forms_are_scoped_to_family_blocks() {
        let err = parse("strip A { top: (n, n + 1); bottom: none; }").unwrap_err();
        assert!(err[0].message.contains("family block"));
        let err = parse("strip A { top: (0, 1); bottom: none; }\nglue g: A.top[n] ~ A.top[0];").unwrap_err();
        assert!(err[0].message.contains("family block"));
    }

    #[test]
    fn duplicate_ids_are_rejected_with_spans() {
        let err = parse("strip A { top: none; bottom: none; }\nstrip A { top: none; bottom: none; }").unwrap_err();
        assert_eq!(err[0].span.line, 2);
        assert!(err[0].message.contains("duplicate strip"));
    }

    #[test]
    fn round_trips_canonical_and_noncanonical_text() {
        let sources = [
            "strip A { top: none; bottom: none; }",
            "strip A { top: (-inf, +inf); bottom: (-inf, +inf); }\nglue g: A.top[0] ~ A.bottom[0] reversed;",
            "strip S0 { top: none; bottom: none; }\nstrip S1 { top: none; bottom: none; }\nfamily F in Z {\n  S0.top: (n, n + 1);\n  S1.bottom: (n, n + 1);\n  glue s: S0.top[n] ~ S1.bottom[n+1] reversed;\n}",
            "strip A { top: (0,1),(2,3); bottom: none; }\nfamily F in Z { A.bottom: (5 - 2*n, 6 - 2*n); glue s: A.top[1] ~ A.bottom[F:n-3]; }",
        ];
        for src in sources {
            let atlas = parse_ok(src);
            let text = serialize(&atlas);
            let again = parse_ok(&text);
            assert_eq!(atlas, again, "round-trip changed the atlas for:\n{}\ncanonical:\n{}", src, text);
            // Serialization is idempotent on canonical text.
            assert_eq!(text, serialize(&again));
        }
    }

    #[test]
    fn serializer_prints_none_for_interval_free_sides() {
        let atlas = parse_ok("strip A { top: none; bottom: none; }");
        let text = serialize(&atlas);
        assert!(text.contains("top: none"));
        assert!(text.contains("bottom: none"));
    }

    #[test]
    fn parser_never_panics_on_garbage() {
        for input in [
            "", "strip", "strip {", "glue g: ~;", "(((((", "}}}}}", "strip A { top: (0,, 1); }",
            "family F in Q { }", "strip A { top: (1/0, 2); }", "glue g: A.top[99999999999999999999]~B.x[0];",
            "\u{00e9}\u{00e9}\u{00e9}", "# only a comment", "strip \u{1F600} { }",
        ] {
            let _ = parse(input);
        }
    }
}
