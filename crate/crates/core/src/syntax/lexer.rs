//! Tokenizer for the supported Prolog subset.
//!
//! The lexer is error-collecting: invalid input produces a `SyntaxError`
//! and scanning continues, so the parser can report several problems in a
//! single pass over a file.

use super::error::SyntaxError;
use super::span::SourceSpan;
use super::token::{Token, TokenKind};

/// Characters that may form symbolic atoms such as `:-`, `=<` or `\+`.
const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&";

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col: usize,
    tokens: Vec<Token>,
    errors: Vec<SyntaxError>,
}

pub(crate) fn scan(source: &str) -> (Vec<Token>, Vec<SyntaxError>) {
    let mut lx = Lexer {
        src: source,
        chars: source.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
        errors: Vec::new(),
    };
    lx.run();
    (lx.tokens, lx.errors)
}

/// Tokenize a source text, failing if any lexical error occurred.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<SyntaxError>> {
    let (tokens, errors) = scan(source);
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.src.len())
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

    fn mark(&self) -> (usize, usize, usize) {
        (self.offset(), self.line, self.col)
    }

    fn span_from(&self, mark: (usize, usize, usize)) -> SourceSpan {
        SourceSpan::new(mark.0, self.offset(), mark.1, mark.2, self.line, self.col)
    }

    fn push(&mut self, kind: TokenKind, mark: (usize, usize, usize)) {
        let span = self.span_from(mark);
        self.tokens.push(Token { kind, span });
    }

    fn error(&mut self, message: impl Into<String>, mark: (usize, usize, usize)) {
        let span = self.span_from(mark);
        self.errors.push(SyntaxError::new(self.src, message, span));
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let mark = self.mark();
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '%' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '/' if self.peek_at(1) == Some('*') => self.block_comment(mark),
                '(' => {
                    self.bump();
                    // `f(` with no layout between opens an argument list.
                    let adjacent = matches!(
                        self.tokens.last(),
                        Some(Token { kind: TokenKind::Atom(_), span }) if span.end_offset == mark.0
                    );
                    let kind = if adjacent { TokenKind::CompoundOpen } else { TokenKind::LParen };
                    self.push(kind, mark);
                }
                ')' => {
                    self.bump();
                    self.push(TokenKind::RParen, mark);
                }
                '[' => {
                    self.bump();
                    self.push(TokenKind::LBracket, mark);
                }
                ']' => {
                    self.bump();
                    self.push(TokenKind::RBracket, mark);
                }
                ',' => {
                    self.bump();
                    self.push(TokenKind::Comma, mark);
                }
                '|' => {
                    self.bump();
                    self.push(TokenKind::Bar, mark);
                }
                '!' | ';' => {
                    self.bump();
                    self.push(TokenKind::Atom(c.to_string()), mark);
                }
                '\'' => self.quoted_atom(mark),
                '"' => {
                    self.bump();
                    while let Some(c) = self.peek() {
                        if c == '"' {
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                    self.error("double-quoted strings are not supported; use an atom or a list", mark);
                }
                '.' if self.end_dot() => {
                    self.bump();
                    self.push(TokenKind::Dot, mark);
                }
                c if c.is_ascii_digit() => self.number(mark),
                c if c.is_lowercase() && c.is_alphabetic() => {
                    let name = self.ident();
                    self.push(TokenKind::Atom(name), mark);
                }
                c if c == '_' || (c.is_uppercase() && c.is_alphabetic()) => {
                    let name = self.ident();
                    self.push(TokenKind::Var(name), mark);
                }
                c if SYMBOL_CHARS.contains(c) => {
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if SYMBOL_CHARS.contains(c) {
                            // Stop before a clause-terminating dot.
                            if c == '.' && self.end_dot() && !name.is_empty() {
                                break;
                            }
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.push(TokenKind::Atom(name), mark);
                }
                other => {
                    self.bump();
                    self.error(format!("invalid character `{}`", other), mark);
                }
            }
        }
    }

    /// A `.` terminates a clause when followed by layout, a comment or EOF.
    fn end_dot(&self) -> bool {
        match self.peek_at(1) {
            None => true,
            Some(c) => c.is_whitespace() || c == '%',
        }
    }

    fn block_comment(&mut self, mark: (usize, usize, usize)) {
        self.bump();
        self.bump();
        loop {
            match self.peek() {
                None => {
                    self.error("unterminated block comment", mark);
                    return;
                }
                Some('*') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn ident(&mut self) -> String {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        name
    }

    fn number(&mut self, mark: (usize, usize, usize)) {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let sign_len = if matches!(self.peek_at(1), Some('+') | Some('-')) { 1 } else { 0 };
            if self.peek_at(1 + sign_len).is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                text.push('e');
                self.bump();
                if sign_len == 1 {
                    text.push(self.bump().unwrap());
                }
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        if is_float {
            match text.parse::<f64>() {
                Ok(v) => self.push(TokenKind::Float(v), mark),
                Err(_) => self.error(format!("invalid float literal `{}`", text), mark),
            }
        } else {
            match text.parse::<i64>() {
                Ok(v) => self.push(TokenKind::Int(v), mark),
                Err(_) => self.error(format!("integer literal `{}` out of range", text), mark),
            }
        }
    }

    fn quoted_atom(&mut self, mark: (usize, usize, usize)) {
        self.bump();
        let mut name = String::new();
        loop {
            match self.peek() {
                None => {
                    self.error("unterminated quoted atom", mark);
                    return;
                }
                Some('\'') => {
                    self.bump();
                    // Doubled quote is an escaped quote.
                    if self.peek() == Some('\'') {
                        name.push('\'');
                        self.bump();
                        continue;
                    }
                    self.push(TokenKind::Atom(name), mark);
                    return;
                }
                Some('\\') => {
                    let esc_mark = self.mark();
                    self.bump();
                    match self.peek() {
                        Some('n') => {
                            name.push('\n');
                            self.bump();
                        }
                        Some('t') => {
                            name.push('\t');
                            self.bump();
                        }
                        Some('\\') => {
                            name.push('\\');
                            self.bump();
                        }
                        Some('\'') => {
                            name.push('\'');
                            self.bump();
                        }
                        other => {
                            self.bump();
                            self.error(
                                format!(
                                    "unsupported escape `\\{}`",
                                    other.map(String::from).unwrap_or_default()
                                ),
                                esc_mark,
                            );
                        }
                    }
                }
                Some(c) => {
                    name.push(c);
                    self.bump();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn smallest_fact() {
        assert_eq!(
            kinds("p(a)."),
            vec![
                TokenKind::Atom("p".into()),
                TokenKind::CompoundOpen,
                TokenKind::Atom("a".into()),
                TokenKind::RParen,
                TokenKind::Dot,
            ]
        );
    }

    #[test]
    fn arithmetic_body_tokens() {
        assert_eq!(
            kinds("E2 is E1 * N"),
            vec![
                TokenKind::Var("E2".into()),
                TokenKind::Atom("is".into()),
                TokenKind::Var("E1".into()),
                TokenKind::Atom("*".into()),
                TokenKind::Var("N".into()),
            ]
        );
    }

    #[test]
    fn unterminated_block_comment() {
        let errs = tokenize("/* open").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].message, "unterminated block comment");
        assert_eq!(errs[0].span.start_offset, 0);
        assert_eq!(errs[0].span.end_offset, 7);
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(kinds("a % line\n /* block */ b"), vec![
            TokenKind::Atom("a".into()),
            TokenKind::Atom("b".into()),
        ]);
    }

    #[test]
    fn symbolic_atoms_and_end_dot() {
        assert_eq!(
            kinds("X :- Y =< 2."),
            vec![
                TokenKind::Var("X".into()),
                TokenKind::Atom(":-".into()),
                TokenKind::Var("Y".into()),
                TokenKind::Atom("=<".into()),
                TokenKind::Int(2),
                TokenKind::Dot,
            ]
        );
    }

    #[test]
    fn floats_and_ints() {
        assert_eq!(kinds("1 2.5 3.0e2"), vec![
            TokenKind::Int(1),
            TokenKind::Float(2.5),
            TokenKind::Float(300.0),
        ]);
        // A dot after an integer terminates the clause instead of making a float.
        assert_eq!(kinds("7."), vec![TokenKind::Int(7), TokenKind::Dot]);
    }

    #[test]
    fn quoted_atoms_with_escapes() {
        assert_eq!(kinds(r"'a b\n' '\\'"), vec![
            TokenKind::Atom("a b\n".into()),
            TokenKind::Atom("\\".into()),
        ]);
    }

    #[test]
    fn double_quoted_strings_rejected() {
        let errs = tokenize("p(\"hi\").").unwrap_err();
        assert!(errs[0].message.contains("double-quoted strings"));
    }

    #[test]
    fn compound_open_requires_adjacency() {
        assert_eq!(kinds("f(a)"), vec![
            TokenKind::Atom("f".into()),
            TokenKind::CompoundOpen,
            TokenKind::Atom("a".into()),
            TokenKind::RParen,
        ]);
        assert_eq!(kinds("f (a)"), vec![
            TokenKind::Atom("f".into()),
            TokenKind::LParen,
            TokenKind::Atom("a".into()),
            TokenKind::RParen,
        ]);
    }

    #[test]
    fn invalid_character_reported_and_skipped() {
        let (tokens, errors) = scan("p({).");
        assert_eq!(errors.len(), 1);
        assert!(errors[0].message.contains("invalid character"));
        assert_eq!(tokens.len(), 4); // p ( ) .
    }

    #[test]
    fn spans_track_lines_and_cols() {
        let toks = tokenize("a\n  bb").unwrap();
        assert_eq!(toks[1].span.start_line, 2);
        assert_eq!(toks[1].span.start_col, 3);
        assert_eq!(toks[1].span.end_col, 5);
    }
}
