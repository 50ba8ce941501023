//! Terms, clauses and programs.
//!
//! List syntax is desugared at parse time: `[a,b|T]` becomes
//! `'.'(a, '.'(b, T))` and `[]` is the atom nil. Operators are stored as
//! ordinary compounds with their standard functor names.

use super::span::SourceSpan;
use std::collections::BTreeMap;
use std::fmt;

/// A predicate indicator: name plus arity, e.g. `mult/3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId {
    pub name: String,
    pub arity: usize,
}

impl PredId {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        PredId { name: name.into(), arity }
    }
}

impl fmt::Display for PredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermKind {
    Atom(String),
    Int(i64),
    Float(f64),
    /// A variable with its source name and a scope-unique id. Anonymous
    /// `_` variables get a fresh id per occurrence.
    Var(String, usize),
    Compound(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub span: SourceSpan,
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

impl Term {
    pub fn atom(name: impl Into<String>, span: SourceSpan) -> Self {
        Term { kind: TermKind::Atom(name.into()), span }
    }

    pub fn int(value: i64, span: SourceSpan) -> Self {
        Term { kind: TermKind::Int(value), span }
    }

    pub fn float(value: f64, span: SourceSpan) -> Self {
        Term { kind: TermKind::Float(value), span }
    }

    pub fn var(name: impl Into<String>, id: usize, span: SourceSpan) -> Self {
        Term { kind: TermKind::Var(name.into(), id), span }
    }

    pub fn compound(name: impl Into<String>, args: Vec<Term>, span: SourceSpan) -> Self {
        debug_assert!(!args.is_empty(), "compound terms have arity >= 1");
        Term { kind: TermKind::Compound(name.into(), args), span }
    }

    pub fn nil(span: SourceSpan) -> Self {
        Term::atom(NIL, span)
    }

    pub fn cons(head: Term, tail: Term, span: SourceSpan) -> Self {
        Term::compound(CONS, vec![head, tail], span)
    }

    /// Proper list from element terms.
    pub fn list(items: Vec<Term>, span: SourceSpan) -> Self {
        let mut term = Term::nil(span);
        for item in items.into_iter().rev() {
            term = Term::cons(item, term, span);
        }
        term
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(&self.kind, TermKind::Atom(a) if a == name)
    }

    pub fn is_nil(&self) -> bool {
        self.is_atom(NIL)
    }

    pub fn is_var(&self) -> bool {
        matches!(self.kind, TermKind::Var(..))
    }

    pub fn is_number(&self) -> bool {
        matches!(self.kind, TermKind::Int(_) | TermKind::Float(_))
    }

    /// `(name, arity)` for atoms (arity 0) and compounds.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match &self.kind {
            TermKind::Atom(name) => Some((name, 0)),
            TermKind::Compound(name, args) => Some((name, args.len())),
            _ => None,
        }
    }

    pub fn indicator(&self) -> Option<PredId> {
        self.functor().map(|(n, a)| PredId::new(n, a))
    }

    pub fn args(&self) -> &[Term] {
        match &self.kind {
            TermKind::Compound(_, args) => args,
            _ => &[],
        }
    }

    /// Splits a cons chain into its elements and, for improper lists, the
    /// non-nil tail. Returns `None` when the term is not a list at all.
    pub fn as_list(&self) -> Option<(Vec<&Term>, Option<&Term>)> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                TermKind::Atom(a) if a == NIL => return Some((items, None)),
                TermKind::Compound(f, args) if f == CONS && args.len() == 2 => {
                    items.push(&args[0]);
                    cur = &args[1];
                }
                _ => {
                    if items.is_empty() {
                        return None;
                    }
                    return Some((items, Some(cur)));
                }
            }
        }
    }

    /// Structural equality ignoring spans; variables compare by name.
    /// This is the source-level notion used by the parser round-trip
    /// property and the program differ.
    pub fn source_eq(&self, other: &Term) -> bool {
        match (&self.kind, &other.kind) {
            (TermKind::Atom(a), TermKind::Atom(b)) => a == b,
            (TermKind::Int(a), TermKind::Int(b)) => a == b,
            (TermKind::Float(a), TermKind::Float(b)) => a == b,
            (TermKind::Var(a, _), TermKind::Var(b, _)) => a == b,
            (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| x.source_eq(y))
            }
            _ => false,
        }
    }

    /// Number of nodes in the term tree.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// All variables in the term, in first-occurrence order, deduplicated
    /// by id.
    pub fn variables(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<(String, usize)>) {
        match &self.kind {
            TermKind::Var(name, id) => {
                if !out.iter().any(|(_, i)| i == id) {
                    out.push((name.clone(), *id));
                }
            }
            TermKind::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            _ => {}
        }
    }

    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.walk(f);
        }
    }
}

/// A fact or rule. Facts have an empty body; rule bodies are stored as the
/// flattened top-level conjunction.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
    pub span: SourceSpan,
}

impl Clause {
    pub fn indicator(&self) -> PredId {
        self.head.indicator().expect("clause heads are atoms or compounds")
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn source_eq(&self, other: &Clause) -> bool {
        self.head.source_eq(&other.head)
            && self.body.len() == other.body.len()
            && self.body.iter().zip(&other.body).all(|(a, b)| a.source_eq(b))
    }
}

/// A parsed program: clauses in source order, directives, and an index
/// from predicate indicator to clause positions.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub directives: Vec<Term>,
    pub index: BTreeMap<PredId, Vec<usize>>,
}

impl Program {
    pub fn from_clauses(clauses: Vec<Clause>, directives: Vec<Term>) -> Self {
        let mut index: BTreeMap<PredId, Vec<usize>> = BTreeMap::new();
        for (i, clause) in clauses.iter().enumerate() {
            index.entry(clause.indicator()).or_default().push(i);
        }
        Program { clauses, directives, index }
    }

    pub fn defines(&self, pred: &PredId) -> bool {
        self.index.contains_key(pred)
    }

    pub fn clause_positions(&self, pred: &PredId) -> &[usize] {
        self.index.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn clauses_for(&self, pred: &PredId) -> impl Iterator<Item = &Clause> {
        self.clause_positions(pred).iter().map(|&i| &self.clauses[i])
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredId> {
        self.index.keys()
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }
}
