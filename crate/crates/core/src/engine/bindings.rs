//! Variable binding store, trail and unification.

use crate::syntax::{Term, TermKind};

/// Slot-per-variable binding store. Variable ids index directly into the
/// slot vector; unbound slots hold `None`.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    slots: Vec<Option<Term>>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings { slots: Vec::new() }
    }

    pub fn with_capacity_for(max_var_id: usize) -> Self {
        Bindings { slots: vec![None; max_var_id + 1] }
    }

    pub fn fresh_var_id(&mut self) -> usize {
        self.slots.push(None);
        self.slots.len() - 1
    }

    fn ensure(&mut self, id: usize) {
        if id >= self.slots.len() {
            self.slots.resize(id + 1, None);
        }
    }

    pub fn lookup(&self, id: usize) -> Option<&Term> {
        self.slots.get(id).and_then(|s| s.as_ref())
    }

    pub fn bind(&mut self, id: usize, term: Term, trail: &mut Vec<usize>) {
        self.ensure(id);
        debug_assert!(self.slots[id].is_none(), "rebinding variable {id}");
        self.slots[id] = Some(term);
        trail.push(id);
    }

    pub fn undo_to(&mut self, trail: &mut Vec<usize>, mark: usize) {
        while trail.len() > mark {
            let id = trail.pop().unwrap();
            self.slots[id] = None;
        }
    }

    /// Follow variable chains until an unbound variable or a non-variable
    /// term is reached. Returns a clone of that term.
    pub fn deref(&self, term: &Term) -> Term {
        let mut cur = term;
        loop {
            match &cur.kind {
                TermKind::Var(_, id) => match self.lookup(*id) {
                    Some(next) => cur = next,
                    None => return cur.clone(),
                },
                _ => return cur.clone(),
            }
        }
    }

    /// Deep substitution: every bound variable in the term is replaced by
    /// its (recursively resolved) value. Cyclic bindings (possible only
    /// with the occurs check off) are cut at the repeated variable, and
    /// list spines are walked iteratively so long lists do not exhaust the
    /// stack.
    pub fn resolve(&self, term: &Term) -> Term {
        let mut path = Vec::new();
        self.resolve_guarded(term, &mut path)
    }

    fn deref_guarded(&self, term: Term, path: &mut Vec<usize>) -> Term {
        let mut cur = term;
        loop {
            let id = match &cur.kind {
                TermKind::Var(_, id) => *id,
                _ => return cur,
            };
            if path.contains(&id) {
                return cur;
            }
            match self.lookup(id) {
                Some(bound) => {
                    path.push(id);
                    cur = bound.clone();
                }
                None => return cur,
            }
        }
    }

    fn resolve_guarded(&self, term: &Term, path: &mut Vec<usize>) -> Term {
        use crate::syntax::ast::CONS;
        let base = path.len();
        let cur = self.deref_guarded(term.clone(), path);
        let out = match &cur.kind {
            TermKind::Compound(f, args) if f == CONS && args.len() == 2 => {
                let mut elems: Vec<(Term, crate::syntax::SourceSpan)> = Vec::new();
                let mut tail = cur.clone();
                loop {
                    match tail.kind {
                        TermKind::Compound(ref f, ref cell) if f == CONS && cell.len() == 2 => {
                            elems.push((self.resolve_guarded(&cell[0], path), tail.span));
                            let next = cell[1].clone();
                            tail = self.deref_guarded(next, path);
                        }
                        _ => break,
                    }
                }
                let mut out = self.resolve_guarded(&tail, path);
                for (e, span) in elems.into_iter().rev() {
                    out = Term::cons(e, out, span);
                }
                out
            }
            TermKind::Compound(f, args) => Term {
                kind: TermKind::Compound(
                    f.clone(),
                    args.iter().map(|a| self.resolve_guarded(a, path)).collect(),
                ),
                span: cur.span,
            },
            _ => cur,
        };
        path.truncate(base);
        out
    }

    /// Does variable `id` occur in `term` (after dereferencing)?
    pub fn occurs(&self, id: usize, term: &Term) -> bool {
        let t = self.deref(term);
        match &t.kind {
            TermKind::Var(_, vid) => *vid == id,
            TermKind::Compound(_, args) => args.iter().any(|a| self.occurs(id, a)),
            _ => false,
        }
    }

    /// Structural identity of two terms under the current bindings
    /// (`==`/2): unbound variables are identical only to themselves.
    pub fn identical(&self, a: &Term, b: &Term) -> bool {
        let (ta, tb) = (self.deref(a), self.deref(b));
        match (&ta.kind, &tb.kind) {
            (TermKind::Var(_, x), TermKind::Var(_, y)) => x == y,
            (TermKind::Atom(x), TermKind::Atom(y)) => x == y,
            (TermKind::Int(x), TermKind::Int(y)) => x == y,
            (TermKind::Float(x), TermKind::Float(y)) => x == y,
            (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| self.identical(x, y))
            }
            _ => false,
        }
    }

    /// Standard order of terms under the current bindings:
    /// Var < Number < Atom < Compound.
    pub fn compare(&self, a: &Term, b: &Term) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        fn rank(t: &TermKind) -> u8 {
            match t {
                TermKind::Var(..) => 0,
                TermKind::Float(_) | TermKind::Int(_) => 1,
                TermKind::Atom(_) => 2,
                TermKind::Compound(..) => 3,
            }
        }
        fn num_value(t: &TermKind) -> f64 {
            match t {
                TermKind::Int(v) => *v as f64,
                TermKind::Float(v) => *v,
                _ => unreachable!(),
            }
        }
        let (ta, tb) = (self.deref(a), self.deref(b));
        match rank(&ta.kind).cmp(&rank(&tb.kind)) {
            Ordering::Equal => {}
            other => return other,
        }
        match (&ta.kind, &tb.kind) {
            (TermKind::Var(_, x), TermKind::Var(_, y)) => x.cmp(y),
            (x, y) if rank(x) == 1 => {
                match num_value(x).partial_cmp(&num_value(y)).unwrap_or(Ordering::Equal) {
                    Ordering::Equal => {
                        // Equal value: floats order before integers.
                        let fx = matches!(x, TermKind::Float(_));
                        let fy = matches!(y, TermKind::Float(_));
                        fy.cmp(&fx)
                    }
                    other => other,
                }
            }
            (TermKind::Atom(x), TermKind::Atom(y)) => x.cmp(y),
            (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => fa
                .len()
                .cmp(&ga.len())
                .then_with(|| f.cmp(g))
                .then_with(|| {
                    for (x, y) in fa.iter().zip(ga) {
                        match self.compare(x, y) {
                            Ordering::Equal => continue,
                            other => return other,
                        }
                    }
                    Ordering::Equal
                }),
            _ => unreachable!(),
        }
    }
}

/// Unify two terms, extending `bindings` and recording new bindings on
/// `trail`. On failure the caller is responsible for undoing the trail to
/// its previous mark.
pub fn unify_with_trail(
    bindings: &mut Bindings,
    trail: &mut Vec<usize>,
    a: &Term,
    b: &Term,
    occurs_check: bool,
) -> bool {
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = work.pop() {
        let (tx, ty) = (bindings.deref(&x), bindings.deref(&y));
        match (&tx.kind, &ty.kind) {
            (TermKind::Var(_, i), TermKind::Var(_, j)) if i == j => {}
            (TermKind::Var(_, i), _) => {
                if occurs_check && bindings.occurs(*i, &ty) {
                    return false;
                }
                bindings.bind(*i, ty, trail);
            }
            (_, TermKind::Var(_, j)) => {
                if occurs_check && bindings.occurs(*j, &tx) {
                    return false;
                }
                bindings.bind(*j, tx, trail);
            }
            (TermKind::Atom(p), TermKind::Atom(q)) => {
                if p != q {
                    return false;
                }
            }
            (TermKind::Int(p), TermKind::Int(q)) => {
                if p != q {
                    return false;
                }
            }
            (TermKind::Float(p), TermKind::Float(q)) => {
                if p != q {
                    return false;
                }
            }
            (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return false;
                }
                for (p, q) in fa.iter().zip(ga) {
                    work.push((p.clone(), q.clone()));
                }
            }
            _ => return false,
        }
    }
    true
}

/// Most-general-unifier entry point: on failure the bindings are restored,
/// so a failed unification leaves the substitution unchanged.
pub fn unify(a: &Term, b: &Term, bindings: &mut Bindings, occurs_check: bool) -> bool {
    let mut trail = Vec::new();
    if unify_with_trail(bindings, &mut trail, a, b, occurs_check) {
        true
    } else {
        bindings.undo_to(&mut trail, 0);
        false
    }
}
