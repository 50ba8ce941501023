//! Term and clause rendering back to Prolog source text.
//!
//! Printing is precedence-aware so that re-parsing the output recovers a
//! structurally identical term (spans aside).

use super::ast::{Clause, Term, TermKind, CONS, NIL};
use std::fmt::Write;

fn infix_prec(name: &str) -> Option<u16> {
    match name {
        ":-" => Some(1200),
        ";" => Some(1100),
        "->" => Some(1050),
        "," => Some(1000),
        "=" | "\\=" | "==" | "\\==" | "is" | "=:=" | "=\\=" | "<" | ">" | "=<" | ">=" => Some(700),
        "+" | "-" => Some(500),
        "*" | "/" | "//" | "mod" => Some(400),
        _ => None,
    }
}

fn atom_needs_quotes(name: &str) -> bool {
    if name == "[]" || name == "!" || name == ";" {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        None => return true,
        Some(c)
            if c.is_lowercase()
                && c.is_alphabetic()
                && chars.all(|c| c.is_alphanumeric() || c == '_') =>
        {
            return false;
        }
        _ => {}
    }
    // Symbolic atoms print bare, except a lone `.` which would collide
    // with the clause terminator.
    const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&";
    if name != "." && !name.is_empty() && name.chars().all(|c| SYMBOL_CHARS.contains(c)) {
        return false;
    }
    true
}

fn write_atom(out: &mut String, name: &str) {
    if atom_needs_quotes(name) {
        out.push('\'');
        for c in name.chars() {
            match c {
                '\'' => out.push_str("\\'"),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str("\\t"),
                _ => out.push(c),
            }
        }
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

fn write_term(out: &mut String, term: &Term, max_prec: u16) {
    match &term.kind {
        TermKind::Atom(name) => write_atom(out, name),
        TermKind::Int(v) => {
            let _ = write!(out, "{}", v);
        }
        TermKind::Float(v) => {
            let _ = write!(out, "{:?}", v);
        }
        TermKind::Var(name, _) => out.push_str(name),
        TermKind::Compound(f, args) if f == CONS && args.len() == 2 => write_list(out, term),
        TermKind::Compound(f, args) => {
            if args.len() == 2 {
                if let Some(prec) = infix_prec(f) {
                    let needs_parens = prec > max_prec;
                    if needs_parens {
                        out.push('(');
                    }
                    // Associativity: `,`, `;`, `->` are xfy; arithmetic is
                    // yfx; 700-level comparisons are xfx.
                    let (lmax, rmax) = match f.as_str() {
                        "," | ";" | "->" => (prec - 1, prec),
                        "+" | "-" | "*" | "/" | "//" | "mod" => (prec, prec - 1),
                        _ => (prec - 1, prec - 1),
                    };
                    write_term(out, &args[0], lmax);
                    if f == "," {
                        out.push_str(", ");
                    } else {
                        let _ = write!(out, " {} ", f);
                    }
                    write_term(out, &args[1], rmax);
                    if needs_parens {
                        out.push(')');
                    }
                    return;
                }
            }
            // `-(1)` must not print as `- 1`, which would re-parse as the
            // folded literal -1.
            if args.len() == 1 && (f == "\\+" || (f == "-" && !args[0].is_number())) {
                let prec = if f == "\\+" { 900 } else { 200 };
                let needs_parens = prec > max_prec;
                if needs_parens {
                    out.push('(');
                }
                out.push_str(f);
                out.push(' ');
                write_term(out, &args[0], prec);
                if needs_parens {
                    out.push(')');
                }
                return;
            }
            write_atom(out, f);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, arg, 999);
            }
            out.push(')');
        }
    }
}

fn write_list(out: &mut String, term: &Term) {
    out.push('[');
    let mut cur = term;
    let mut first = true;
    loop {
        match &cur.kind {
            TermKind::Compound(f, args) if f == CONS && args.len() == 2 => {
                if !first {
                    out.push_str(", ");
                }
                write_term(out, &args[0], 999);
                first = false;
                cur = &args[1];
            }
            TermKind::Atom(a) if a == NIL => break,
            _ => {
                out.push_str(" | ");
                write_term(out, cur, 999);
                break;
            }
        }
    }
    out.push(']');
}

/// Render a term as Prolog source text.
pub fn term_to_string(term: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, term, 1200);
    out
}

/// Render a term as it would appear in an argument position (protects
/// commas and low-priority operators).
pub fn term_to_arg_string(term: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, term, 999);
    out
}

/// Render a clause, including the terminating `.`.
pub fn clause_to_string(clause: &Clause) -> String {
    let mut out = String::new();
    write_term(&mut out, &clause.head, 1199);
    if !clause.body.is_empty() {
        out.push_str(" :- ");
        for (i, goal) in clause.body.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_term(&mut out, goal, 999);
        }
    }
    out.push('.');
    out
}
