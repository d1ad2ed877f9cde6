//! Two-sorted sentence language: statistical sentences over bound variables
//! and subjective belief sentences over named constants.
//!
//! The surface syntax is line-oriented text (see [`parse_kb`]); everything is
//! parsed into the types below and validated against the declared signature.

mod lexer;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

pub use parser::{parse_kb, parse_query};
pub use printer::{format_formula, format_kb, format_prob, format_query};

/// Hard cap on predicate arity and on the length of bound-variable tuples.
pub const MAX_ARITY: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Ge,
    Le,
    Eq,
    Gt,
    Lt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Ge => ">=",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Gt => ">",
            Rel::Lt => "<",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Rel::Gt | Rel::Lt)
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Tautology. Produced for an omitted condition and by resolving closed
    /// nested statistical terms; it has no surface syntax of its own.
    True,
    False,
    Atom { pred: String, args: Vec<Term> },
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Stat(Box<StatTerm>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom { pred: pred.to_string(), args }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction that drops `True` operands.
    pub fn conj(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, x) | (x, Formula::True) => x,
            (a, b) => Formula::and(a, b),
        }
    }

    pub fn conj_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().fold(Formula::True, Formula::conj)
    }

    /// Free variables. Variables bound by a nested statistical term are
    /// removed from the union of its components' free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => {
                for t in args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Equal(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Stat(st) => out.extend(st.free_vars()),
        }
    }

    /// Constants occurring outside nested statistical terms, in order of first
    /// appearance.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_consts(&mut out, false);
        out
    }

    /// Every constant, including those inside nested statistical terms.
    pub fn all_constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_consts(&mut out, true);
        out
    }

    fn collect_consts(&self, out: &mut Vec<String>, deep: bool) {
        let mut push = |t: &Term| {
            if let Term::Const(c) = t {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(push),
            Formula::Equal(a, b) => {
                push(a);
                push(b);
            }
            Formula::Not(f) => f.collect_consts(out, deep),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_consts(out, deep);
                b.collect_consts(out, deep);
            }
            Formula::Stat(st) => {
                if deep {
                    st.phi.collect_consts(out, deep);
                    st.psi.collect_consts(out, deep);
                }
            }
        }
    }

    /// Predicate names occurring anywhere in the formula.
    pub fn predicates(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False | Formula::Equal(..) => {}
            Formula::Atom { pred, .. } => {
                out.insert(pred.clone());
            }
            Formula::Not(f) => f.predicates(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
            Formula::Stat(st) => {
                st.phi.predicates(out);
                st.psi.predicates(out);
            }
        }
    }

    pub fn contains_stat(&self) -> bool {
        match self {
            Formula::Stat(_) => true,
            Formula::Not(f) => f.contains_stat(),
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_stat() || b.contains_stat(),
            _ => false,
        }
    }

    /// Flattens a left- or right-nested conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::True => {}
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Replaces every nested statistical term using `f`.
    pub fn map_stat<E>(
        &self,
        f: &mut impl FnMut(&StatTerm) -> Result<Formula, E>,
    ) -> Result<Formula, E> {
        Ok(match self {
            Formula::Stat(st) => f(st)?,
            Formula::Not(x) => Formula::not(x.map_stat(f)?),
            Formula::And(a, b) => Formula::and(a.map_stat(f)?, b.map_stat(f)?),
            Formula::Or(a, b) => Formula::or(a.map_stat(f)?, b.map_stat(f)?),
            other => other.clone(),
        })
    }
}

/// `[phi | psi]{bound} rel p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatTerm {
    pub phi: Formula,
    pub psi: Formula,
    pub bound: Vec<String>,
    pub rel: Rel,
    pub p: BigRational,
}

impl StatTerm {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = self.phi.free_vars();
        out.extend(self.psi.free_vars());
        for v in &self.bound {
            out.remove(v);
        }
        out
    }

    /// Rewrites the term into `>=`/`>` constraints only: `<= p` becomes the
    /// negated body `>= 1 - p`, `=` becomes the pair.
    pub fn canonical(&self) -> Vec<CanonicalConstraint> {
        let pos = |strict| CanonicalConstraint {
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            strict,
            p: self.p.clone(),
        };
        let neg = |strict| CanonicalConstraint {
            phi: Formula::not(self.phi.clone()),
            psi: self.psi.clone(),
            strict,
            p: BigRational::one() - &self.p,
        };
        match self.rel {
            Rel::Ge => vec![pos(false)],
            Rel::Gt => vec![pos(true)],
            Rel::Le => vec![neg(false)],
            Rel::Lt => vec![neg(true)],
            Rel::Eq => vec![pos(false), neg(false)],
        }
    }
}

/// `[phi | psi] >= p` (or `>` when `strict`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalConstraint {
    pub phi: Formula,
    pub psi: Formula,
    pub strict: bool,
    pub p: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StatSentence {
    Stat(StatTerm),
    /// Universally closed first-order sentence, held with probability one.
    Axiom { vars: Vec<String>, matrix: Formula },
}

impl StatSentence {
    /// Number of variables the sentence ranges over.
    pub fn arity(&self) -> usize {
        match self {
            StatSentence::Stat(st) => st.bound.len(),
            StatSentence::Axiom { vars, .. } => vars.len(),
        }
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            StatSentence::Stat(st) => {
                st.phi.predicates(&mut out);
                st.psi.predicates(&mut out);
            }
            StatSentence::Axiom { matrix, .. } => matrix.predicates(&mut out),
        }
        out
    }

    pub fn constants(&self) -> Vec<String> {
        match self {
            StatSentence::Stat(st) => {
                let mut c = st.phi.all_constants();
                for x in st.psi.all_constants() {
                    if !c.contains(&x) {
                        c.push(x);
                    }
                }
                c
            }
            StatSentence::Axiom { matrix, .. } => matrix.all_constants(),
        }
    }
}

impl fmt::Display for StatSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::format_stat_sentence(self))
    }
}

/// `prob(phi | psi) rel p` with `rel` one of `>=`, `<=`, `=`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefSentence {
    pub phi: Formula,
    pub psi: Formula,
    pub rel: Rel,
    pub p: BigRational,
}

impl BeliefSentence {
    /// Subject constants in order of first appearance (phi, then psi).
    pub fn subjects(&self) -> Vec<String> {
        let mut out = self.phi.constants();
        for c in self.psi.constants() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.phi.predicates(&mut out);
        self.psi.predicates(&mut out);
        out
    }
}

impl fmt::Display for BeliefSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&printer::format_belief(self))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    /// Predicates with arities, in declaration order.
    pub predicates: Vec<(String, usize)>,
    /// Declared constants, in declaration order.
    pub constants: Vec<String>,
}

impl Signature {
    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.predicates
            .iter()
            .find(|(n, _)| n == pred)
            .map(|(_, a)| *a)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    /// Restriction to the given predicate names, keeping declaration order.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Signature {
        Signature {
            predicates: self
                .predicates
                .iter()
                .filter(|(n, _)| keep.contains(n))
                .cloned()
                .collect(),
            constants: self.constants.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub statistical: Vec<StatSentence>,
    pub beliefs: Vec<BeliefSentence>,
}

impl KnowledgeBase {
    pub fn is_empty(&self) -> bool {
        self.statistical.is_empty() && self.beliefs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Statistical,
    Subjective,
}

/// A candidate consequence whose probability is asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub phi: Formula,
    pub psi: Formula,
    /// Subject constants (subjective queries only).
    pub subjects: Vec<String>,
    /// Bound variable tuple (statistical queries only).
    pub bound: Vec<String>,
}

impl Query {
    pub fn subjective(phi: Formula, psi: Formula) -> Query {
        let mut subjects = phi.constants();
        for c in psi.constants() {
            if !subjects.contains(&c) {
                subjects.push(c);
            }
        }
        Query {
            kind: QueryKind::Subjective,
            phi,
            psi,
            subjects,
            bound: Vec::new(),
        }
    }

    pub fn statistical(phi: Formula, psi: Formula, bound: Vec<String>) -> Query {
        Query {
            kind: QueryKind::Statistical,
            phi,
            psi,
            subjects: Vec::new(),
            bound,
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_query(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

pub(crate) fn check_prob(p: &BigRational) -> bool {
    !p.is_negative() && *p <= BigRational::one()
}
