//! Recursive-descent parser with operator precedence climbing and
//! clause-level error recovery.
//!
//! On a parse error inside a clause, the parser records the error and
//! skips to the next clause-terminating `.` at bracket depth zero, so a
//! single mistake does not hide later problems.

use super::ast::{Clause, Program, Term, TermKind};
use super::error::SyntaxError;
use super::lexer;
use super::span::SourceSpan;
use super::token::{Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

/// Fixed operator table for the supported subset.
fn infix_op(name: &str) -> Option<(u16, Assoc)> {
    let op = match name {
        ":-" => (1200, Assoc::Xfx),
        ";" => (1100, Assoc::Xfy),
        "->" => (1050, Assoc::Xfy),
        "," => (1000, Assoc::Xfy),
        "=" | "\\=" | "==" | "\\==" | "is" | "=:=" | "=\\=" | "<" | ">" | "=<" | ">=" => {
            (700, Assoc::Xfx)
        }
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "/" | "//" | "mod" => (400, Assoc::Yfx),
        _ => return None,
    };
    Some(op)
}

/// Prefix operators; the `u16` is the precedence, operands may bind up to
/// the same precedence (fy).
fn prefix_op(name: &str) -> Option<u16> {
    match name {
        "\\+" => Some(900),
        "-" => Some(200),
        _ => None,
    }
}

pub(crate) fn is_operator_functor(name: &str) -> bool {
    infix_op(name).is_some() || prefix_op(name).is_some()
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    var_counter: usize,
    /// Clause-scoped variable names; `_` never enters this map.
    scope: Vec<(String, usize)>,
}

struct ParseFailure {
    error: SyntaxError,
}

type PResult<T> = Result<T, ParseFailure>;

impl<'a> Parser<'a> {
    fn new(src: &'a str, tokens: Vec<Token>) -> Self {
        Parser { src, tokens, pos: 0, var_counter: 0, scope: Vec::new() }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(t) => {
                let s = t.span;
                SourceSpan::new(s.end_offset, s.end_offset, s.end_line, s.end_col, s.end_line, s.end_col)
            }
            None => SourceSpan::new(0, 0, 1, 1, 1, 1),
        }
    }

    fn here(&self) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn fail<T>(&self, message: impl Into<String>, span: SourceSpan) -> PResult<T> {
        Err(ParseFailure { error: SyntaxError::new(self.src, message, span) })
    }

    fn fresh_var(&mut self, name: &str, span: SourceSpan) -> Term {
        // `_` is always a fresh variable; named variables are clause-scoped.
        if name == "_" {
            let id = self.var_counter;
            self.var_counter += 1;
            return Term::var("_", id, span);
        }
        if let Some((_, id)) = self.scope.iter().find(|(n, _)| n == name) {
            return Term::var(name, *id, span);
        }
        let id = self.var_counter;
        self.var_counter += 1;
        self.scope.push((name.to_string(), id));
        Term::var(name, id, span)
    }

    /// Precedence-climbing expression parser. Returns the term and the
    /// precedence of its principal operator.
    fn expr(&mut self, max_prec: u16) -> PResult<(Term, u16)> {
        let (mut left, mut left_prec) = self.primary(max_prec)?;
        loop {
            let (op_name, op_span) = match self.peek() {
                Some(Token { kind: TokenKind::Comma, span }) => (",".to_string(), *span),
                Some(Token { kind: TokenKind::Atom(a), span }) if infix_op(a).is_some() => {
                    (a.clone(), *span)
                }
                _ => break,
            };
            let (prec, assoc) = infix_op(&op_name).unwrap();
            if prec > max_prec {
                break;
            }
            let left_max = match assoc {
                Assoc::Yfx => prec,
                _ => prec - 1,
            };
            if left_prec > left_max {
                return self.fail(
                    format!("operator priority clash at `{}`", op_name),
                    op_span,
                );
            }
            self.bump();
            let right_max = match assoc {
                Assoc::Xfy => prec,
                _ => prec - 1,
            };
            let (right, _) = self.expr(right_max)?;
            let span = left.span.cover(&right.span);
            left = Term::compound(op_name, vec![left, right], span);
            left_prec = prec;
        }
        Ok((left, left_prec))
    }

    fn primary(&mut self, max_prec: u16) -> PResult<(Term, u16)> {
        let tok = match self.peek().cloned() {
            Some(t) => t,
            None => return self.fail("unexpected end of input", self.eof_span()),
        };
        match tok.kind {
            TokenKind::Int(v) => {
                self.bump();
                Ok((Term::int(v, tok.span), 0))
            }
            TokenKind::Float(v) => {
                self.bump();
                Ok((Term::float(v, tok.span), 0))
            }
            TokenKind::Var(name) => {
                self.bump();
                Ok((self.fresh_var(&name, tok.span), 0))
            }
            TokenKind::LParen => {
                self.bump();
                let (inner, _) = self.expr(1200)?;
                self.expect_rparen()?;
                Ok((inner, 0))
            }
            TokenKind::LBracket => self.list(tok.span),
            TokenKind::Atom(name) => {
                self.bump();
                // Argument list attached without layout: a compound term.
                if matches!(self.peek(), Some(Token { kind: TokenKind::CompoundOpen, .. })) {
                    self.bump();
                    let args = self.arg_list()?;
                    let close = self.expect_rparen()?;
                    let span = tok.span.cover(&close);
                    return Ok((Term::compound(name, args, span), 0));
                }
                if let Some(prec) = prefix_op(&name) {
                    if self.starts_term() {
                        if prec > max_prec {
                            return self.fail(
                                format!("prefix operator `{}` exceeds allowed priority here", name),
                                tok.span,
                            );
                        }
                        let (operand, _) = self.expr(prec)?;
                        // Fold negative numeric literals.
                        if name == "-" {
                            match operand.kind {
                                TermKind::Int(v) => {
                                    return Ok((Term::int(-v, tok.span.cover(&operand.span)), 0))
                                }
                                TermKind::Float(v) => {
                                    return Ok((Term::float(-v, tok.span.cover(&operand.span)), 0))
                                }
                                _ => {}
                            }
                        }
                        let span = tok.span.cover(&operand.span);
                        return Ok((Term::compound(name, vec![operand], span), prec));
                    }
                }
                if infix_op(&name).is_some() && !self.atom_position_ok() {
                    return self.fail(
                        format!("operator `{}` used where a term is expected", name),
                        tok.span,
                    );
                }
                Ok((Term::atom(name, tok.span), 0))
            }
            TokenKind::CompoundOpen => {
                self.fail("unexpected `(`", tok.span)
            }
            TokenKind::RParen | TokenKind::RBracket => {
                self.fail("unbalanced closing delimiter", tok.span)
            }
            TokenKind::Comma => self.fail("unexpected `,`", tok.span),
            TokenKind::Bar => self.fail("`|` is only valid inside a list", tok.span),
            TokenKind::Dot => self.fail("unexpected `.` (empty clause?)", tok.span),
        }
    }

    /// After consuming an operator atom, decide whether it stands as a
    /// plain atom (e.g. `f(+, a)` or `X = mod`).
    fn atom_position_ok(&self) -> bool {
        match self.peek().map(|t| &t.kind) {
            None => true,
            Some(TokenKind::Comma | TokenKind::RParen | TokenKind::RBracket | TokenKind::Bar
                | TokenKind::Dot) => true,
            Some(TokenKind::Atom(a)) => infix_op(a).is_some(),
            _ => false,
        }
    }

    /// Does the current token plausibly start a term? Used to decide
    /// whether a prefix operator actually has an operand.
    fn starts_term(&self) -> bool {
        matches!(
            self.peek().map(|t| &t.kind),
            Some(
                TokenKind::Int(_)
                    | TokenKind::Float(_)
                    | TokenKind::Var(_)
                    | TokenKind::Atom(_)
                    | TokenKind::LParen
                    | TokenKind::LBracket
            )
        )
    }

    fn expect_rparen(&mut self) -> PResult<SourceSpan> {
        match self.peek() {
            Some(Token { kind: TokenKind::RParen, span }) => {
                let s = *span;
                self.bump();
                Ok(s)
            }
            Some(t) => {
                let span = t.span;
                self.fail("expected `)`", span)
            }
            None => self.fail("expected `)` before end of input", self.eof_span()),
        }
    }

    fn arg_list(&mut self) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        loop {
            let (arg, _) = self.expr(999)?;
            args.push(arg);
            match self.peek() {
                Some(Token { kind: TokenKind::Comma, .. }) => {
                    self.bump();
                }
                _ => return Ok(args),
            }
        }
    }

    fn list(&mut self, open: SourceSpan) -> PResult<(Term, u16)> {
        self.bump();
        if let Some(Token { kind: TokenKind::RBracket, span }) = self.peek() {
            let close = *span;
            self.bump();
            return Ok((Term::nil(open.cover(&close)), 0));
        }
        let mut items = Vec::new();
        loop {
            let (item, _) = self.expr(999)?;
            items.push(item);
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Comma) => {
                    self.bump();
                }
                Some(TokenKind::Bar) => {
                    self.bump();
                    let (tail, _) = self.expr(999)?;
                    let close = self.expect_rbracket()?;
                    return Ok((build_list(items, tail, open.cover(&close)), 0));
                }
                Some(TokenKind::RBracket) => {
                    let close = self.expect_rbracket()?;
                    let full = open.cover(&close);
                    let nil = Term::nil(SourceSpan::new(
                        close.start_offset,
                        close.end_offset,
                        close.start_line,
                        close.start_col,
                        close.end_line,
                        close.end_col,
                    ));
                    return Ok((build_list(items, nil, full), 0));
                }
                _ => {
                    let span = self.here();
                    return self.fail("expected `,`, `|` or `]` in list", span);
                }
            }
        }
    }

    fn expect_rbracket(&mut self) -> PResult<SourceSpan> {
        match self.peek() {
            Some(Token { kind: TokenKind::RBracket, span }) => {
                let s = *span;
                self.bump();
                Ok(s)
            }
            Some(t) => {
                let span = t.span;
                self.fail("expected `]`", span)
            }
            None => self.fail("expected `]` before end of input", self.eof_span()),
        }
    }

    /// One clause or directive, up to and including its `.`.
    fn clause(&mut self) -> PResult<ClauseOrDirective> {
        self.scope.clear();
        // Leading `:-` introduces a directive.
        if let Some(Token { kind: TokenKind::Atom(a), .. }) = self.peek() {
            if a == ":-" {
                self.bump();
                let (goal, _) = self.expr(1199)?;
                self.expect_dot()?;
                return Ok(ClauseOrDirective::Directive(goal));
            }
        }
        let (term, _) = self.expr(1200)?;
        // Validate the head before consuming the terminator, so recovery
        // from a bad head does not skip past this clause's own `.`.
        match &term.kind {
            TermKind::Compound(f, args) if f == ":-" && args.len() == 2 => {
                self.check_head(&args[0])?
            }
            _ => self.check_head(&term)?,
        }
        let dot = self.expect_dot()?;
        let span = term.span.cover(&dot);
        match term.kind {
            TermKind::Compound(ref f, _) if f == ":-" && term.args().len() == 2 => {
                let mut args = match term.kind {
                    TermKind::Compound(_, args) => args,
                    _ => unreachable!(),
                };
                let body_term = args.pop().unwrap();
                let head = args.pop().unwrap();
                let body = flatten_conjunction(body_term);
                Ok(ClauseOrDirective::Clause(Clause { head, body, span }))
            }
            _ => Ok(ClauseOrDirective::Clause(Clause { head: term, body: vec![], span })),
        }
    }

    fn check_head(&self, head: &Term) -> PResult<()> {
        match head.kind {
            TermKind::Atom(_) | TermKind::Compound(..) => Ok(()),
            TermKind::Var(..) => {
                self.fail("clause head cannot be a variable", head.span)
            }
            TermKind::Int(_) | TermKind::Float(_) => {
                self.fail("clause head cannot be a number", head.span)
            }
        }
    }

    fn expect_dot(&mut self) -> PResult<SourceSpan> {
        match self.peek() {
            Some(Token { kind: TokenKind::Dot, span }) => {
                let s = *span;
                self.bump();
                Ok(s)
            }
            Some(t) => {
                let span = t.span;
                self.fail("expected `.` at end of clause", span)
            }
            None => self.fail("missing `.` at end of clause", self.eof_span()),
        }
    }

    /// Skip to just past the next `.` at bracket depth zero, counting from
    /// the current position.
    fn recover(&mut self) {
        let mut depth: usize = 0;
        while let Some(tok) = self.bump() {
            match tok.kind {
                TokenKind::CompoundOpen | TokenKind::LParen | TokenKind::LBracket => depth += 1,
                TokenKind::RParen | TokenKind::RBracket => depth = depth.saturating_sub(1),
                TokenKind::Dot if depth == 0 => return,
                _ => {}
            }
        }
    }
}

enum ClauseOrDirective {
    Clause(Clause),
    Directive(Term),
}

fn build_list(items: Vec<Term>, tail: Term, full_span: SourceSpan) -> Term {
    let end = tail.span;
    let mut term = tail;
    for (i, item) in items.into_iter().enumerate().rev() {
        let span = if i == 0 { full_span } else { item.span.cover(&end) };
        term = Term::cons(item, term, span);
    }
    term
}

fn flatten_conjunction(term: Term) -> Vec<Term> {
    match term.kind {
        TermKind::Compound(ref f, _) if f == "," && term.args().len() == 2 => {
            let mut args = match term.kind {
                TermKind::Compound(_, args) => args,
                _ => unreachable!(),
            };
            let right = args.pop().unwrap();
            let left = args.pop().unwrap();
            let mut goals = flatten_conjunction(left);
            goals.extend(flatten_conjunction(right));
            goals
        }
        _ => vec![term],
    }
}

/// Parse a program, recovering at clause boundaries so that all clauses
/// that parse cleanly are kept and every error is reported.
pub fn parse_program(source: &str) -> (Program, Vec<SyntaxError>) {
    let (tokens, mut errors) = lexer::scan(source);
    let mut parser = Parser::new(source, tokens);
    let mut clauses = Vec::new();
    let mut directives = Vec::new();
    while !parser.at_end() {
        match parser.clause() {
            Ok(ClauseOrDirective::Clause(c)) => clauses.push(c),
            Ok(ClauseOrDirective::Directive(d)) => directives.push(d),
            Err(failure) => {
                errors.push(failure.error);
                parser.recover();
            }
        }
    }
    errors.sort_by_key(|e| (e.span.start_offset, e.span.end_offset));
    (Program::from_clauses(clauses, directives), errors)
}

/// Parse a single query: a goal conjunction with no trailing `.` required.
pub fn parse_query(source: &str) -> Result<Term, SyntaxError> {
    let (tokens, errors) = lexer::scan(source);
    if let Some(first) = errors.into_iter().next() {
        return Err(first);
    }
    if tokens.is_empty() {
        return Err(SyntaxError::new(source, "empty query", SourceSpan::new(0, 0, 1, 1, 1, 1)));
    }
    let mut parser = Parser::new(source, tokens);
    let (term, _) = parser.expr(1200).map_err(|f| f.error)?;
    if matches!(parser.peek(), Some(Token { kind: TokenKind::Dot, .. })) {
        parser.bump();
    }
    if let Some(extra) = parser.peek() {
        return Err(SyntaxError::new(source, "unexpected input after query", extra.span));
    }
    Ok(term)
}
