//! Tokenizer, parser and pretty printer for the supported Prolog subset.
//!
//! The subset covers recitation-level code: no modules, no DCG, no
//! double-quoted strings, integers and floats only, and a fixed standard
//! operator table.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod span;
pub mod token;

pub use ast::{Clause, PredId, Program, Term, TermKind, CONS, NIL};
pub use error::{render_error, render_errors, SyntaxError};
pub use lexer::tokenize;
pub use parser::{parse_program, parse_query};
pub use pretty::{clause_to_string, term_to_arg_string, term_to_string};
pub use span::SourceSpan;
pub use token::{Token, TokenKind};
