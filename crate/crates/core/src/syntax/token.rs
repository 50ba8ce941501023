//! Token stream produced by the lexer.

use super::span::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Unquoted, quoted or symbolic atom (`foo`, `'foo bar'`, `=<`, `!`, `;`).
    Atom(String),
    /// Variable, including `_` and named `_Underscore` variables.
    Var(String),
    Int(i64),
    Float(f64),
    /// `(` that immediately follows an atom, opening an argument list.
    CompoundOpen,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    /// Clause-terminating `.` (followed by layout or end of input).
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

impl Token {
    pub fn is_atom(&self, name: &str) -> bool {
        matches!(&self.kind, TokenKind::Atom(a) if a == name)
    }
}
