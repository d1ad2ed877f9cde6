use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::lexer::{tokenize, Spanned, Tok};
use super::{
    check_prob, BeliefSentence, Formula, KnowledgeBase, ParseError, Query, Rel,
    Signature, StatSentence, StatTerm, Term, MAX_ARITY,
};

const KEYWORDS: &[&str] = &["pred", "const", "axiom", "prob", "forall", "exists"];
const MAX_DEPTH: usize = 200;

/// Parses a knowledge-base document.
///
/// ```text
/// kb        := { decl | stat | belief | comment | blank } ;
/// decl      := "pred" name "/" ("1"|"2") | "const" name { "," name } ;
/// stat      := "[" formula [ "|" formula ] "]" "{" varlist "}" rel prob
///            | "axiom" [ "forall" varlist "." ] formula ;
/// belief    := "prob" "(" formula [ "|" formula ] ")" rel prob ;
/// ```
///
/// Inside `[...]` and `prob(...)` the first top-level `|` separates the
/// condition, so a disjunction in the conditioned formula needs parentheses.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let toks = tokenize(text)?;
    let signature = scan_declarations(&toks);
    let mut p = Parser::new(&toks, signature);
    let mut kb = KnowledgeBase::default();
    let mut stat_consts: Vec<(String, usize, usize)> = Vec::new();
    while !p.at_end() {
        let (line, col) = p.pos();
        match p.peek().cloned() {
            Some(Tok::Ident(k)) if k == "pred" => {
                p.bump();
                let name = p.name()?;
                p.expect(&Tok::Slash)?;
                let arity = p.arity()?;
                if kb.signature.arity(&name).is_some() || kb.signature.is_constant(&name) {
                    return Err(ParseError::new(line, col, format!("`{name}` declared twice")));
                }
                kb.signature.predicates.push((name, arity));
            }
            Some(Tok::Ident(k)) if k == "const" => {
                p.bump();
                loop {
                    let (l, c) = p.pos();
                    let name = p.name()?;
                    if kb.signature.arity(&name).is_some() || kb.signature.is_constant(&name) {
                        return Err(ParseError::new(l, c, format!("`{name}` declared twice")));
                    }
                    kb.signature.constants.push(name);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            Some(Tok::Ident(k)) if k == "axiom" => {
                p.bump();
                let s = p.axiom(line, col)?;
                for c in s.constants() {
                    stat_consts.push((c, line, col));
                }
                kb.statistical.push(s);
            }
            Some(Tok::Ident(k)) if k == "prob" => {
                p.bump();
                let (phi, psi) = p.prob_body()?;
                let (rel, prob) = p.rel_prob()?;
                kb.beliefs.push(p.belief(phi, psi, rel, prob, line, col)?);
            }
            Some(Tok::LBracket) => {
                p.bump();
                let st = p.stat_term(line, col)?;
                for c in st.phi.all_constants().into_iter().chain(st.psi.all_constants()) {
                    stat_consts.push((c, line, col));
                }
                kb.statistical.push(StatSentence::Stat(st));
            }
            Some(t) => return Err(p.err_here(format!("expected a sentence, found {}", t.describe()))),
            None => break,
        }
    }
    for b in &kb.beliefs {
        for s in b.subjects() {
            if let Some((c, l, col)) = stat_consts.iter().find(|(c, ..)| *c == s) {
                return Err(ParseError::new(
                    *l,
                    *col,
                    format!("constant `{c}` is a belief subject and may not occur in statistical sentences"),
                ));
            }
        }
    }
    Ok(kb)
}

/// Parses a query line against a signature: `prob(phi | psi) = ?` or
/// `[phi | psi]{vars} = ?` (the `= ?` suffix is optional).
pub fn parse_query(text: &str, signature: &Signature) -> Result<Query, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, signature.clone());
    let (line, col) = p.pos();
    let q = match p.peek().cloned() {
        Some(Tok::Ident(k)) if k == "prob" => {
            p.bump();
            let (phi, psi) = p.prob_body()?;
            p.query_suffix()?;
            let b = p.belief(phi, psi, Rel::Ge, BigRational::zero(), line, col)?;
            Query::subjective(b.phi, b.psi)
        }
        Some(Tok::LBracket) => {
            p.bump();
            let (phi, psi) = p.bracket_body()?;
            let bound = p.varlist_braced()?;
            p.query_suffix()?;
            let st = p.finish_stat(phi, psi, bound, Rel::Ge, BigRational::zero(), line, col)?;
            Query::statistical(st.phi, st.psi, st.bound)
        }
        _ => {
            return Err(ParseError::new(
                line,
                col,
                "bare formula: a query must be `prob(...)` or `[...]{...}`",
            ))
        }
    };
    if !p.at_end() {
        return Err(p.err_here("unexpected input after query"));
    }
    Ok(q)
}

/// Collects `pred` and `const` declarations ahead of the main pass so that
/// symbols may be used before they are declared.
fn scan_declarations(toks: &[Spanned]) -> Signature {
    let mut sig = Signature::default();
    let mut i = 0;
    while i < toks.len() {
        match &toks[i].tok {
            Tok::Ident(k) if k == "pred" => {
                if let (Some(Tok::Ident(n)), Some(Tok::Slash), Some(Tok::Number(a))) = (
                    toks.get(i + 1).map(|t| &t.tok),
                    toks.get(i + 2).map(|t| &t.tok),
                    toks.get(i + 3).map(|t| &t.tok),
                ) {
                    if let Ok(a) = a.parse::<usize>() {
                        if sig.arity(n).is_none() {
                            sig.predicates.push((n.clone(), a));
                        }
                    }
                }
                i += 1;
            }
            Tok::Ident(k) if k == "const" => {
                let mut j = i + 1;
                while let Some(Tok::Ident(n)) = toks.get(j).map(|t| &t.tok) {
                    if KEYWORDS.contains(&n.as_str()) {
                        break;
                    }
                    if !sig.is_constant(n) {
                        sig.constants.push(n.clone());
                    }
                    if toks.get(j + 1).map(|t| &t.tok) == Some(&Tok::Comma) {
                        j += 2;
                    } else {
                        break;
                    }
                }
                i = j.max(i + 1);
            }
            _ => i += 1,
        }
    }
    sig
}

struct Parser<'a> {
    toks: &'a [Spanned],
    i: usize,
    sig: Signature,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Spanned], sig: Signature) -> Self {
        Parser {
            toks,
            i: 0,
            sig,
            depth: 0,
        }
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn pos(&self) -> (usize, usize) {
        match self.toks.get(self.i) {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.pos();
        ParseError::new(l, c, msg)
    }

    fn bump(&mut self) {
        self.i += 1;
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|x| x.describe())
                .unwrap_or_else(|| "end of input".into());
            Err(self.err_here(format!("expected {}, found {found}", t.describe())))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(n)) if !KEYWORDS.contains(&n.as_str()) => {
                self.bump();
                Ok(n)
            }
            Some(Tok::Ident(n)) => Err(self.err_here(format!("`{n}` is a reserved word"))),
            other => Err(self.err_here(format!(
                "expected a name, found {}",
                other.map(|t| t.describe()).unwrap_or_else(|| "end of input".into())
            ))),
        }
    }

    fn arity(&mut self) -> Result<usize, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Number(n)) if n == "1" || n == "2" => {
                self.bump();
                Ok(n.parse().unwrap())
            }
            _ => Err(self.err_here(format!("predicate arity must be 1 or {MAX_ARITY}"))),
        }
    }

    fn prob(&mut self) -> Result<BigRational, ParseError> {
        let (l, c) = self.pos();
        let num = match self.peek().cloned() {
            Some(Tok::Number(n)) => {
                self.bump();
                n
            }
            _ => return Err(self.err_here("expected a probability")),
        };
        let value = if self.eat(&Tok::Slash) {
            let den = match self.peek().cloned() {
                Some(Tok::Number(d)) if !d.contains('.') => {
                    self.bump();
                    d
                }
                _ => return Err(self.err_here("expected an integer denominator")),
            };
            if num.contains('.') {
                return Err(ParseError::new(l, c, "fraction numerator must be an integer"));
            }
            let n: BigInt = num.parse().unwrap();
            let d: BigInt = den.parse().unwrap();
            if d.is_zero() {
                return Err(ParseError::new(l, c, "zero denominator"));
            }
            BigRational::new(n, d)
        } else {
            parse_decimal(&num)
        };
        if !check_prob(&value) {
            return Err(ParseError::new(l, c, "probability must lie in [0, 1]"));
        }
        Ok(value)
    }

    fn rel(&mut self) -> Result<Rel, ParseError> {
        let r = match self.peek() {
            Some(Tok::Ge) => Rel::Ge,
            Some(Tok::Le) => Rel::Le,
            Some(Tok::Eq) => Rel::Eq,
            Some(Tok::Gt) => Rel::Gt,
            Some(Tok::Lt) => Rel::Lt,
            _ => return Err(self.err_here("expected one of >=, <=, =, >, <")),
        };
        self.bump();
        Ok(r)
    }

    fn rel_prob(&mut self) -> Result<(Rel, BigRational), ParseError> {
        let r = self.rel()?;
        Ok((r, self.prob()?))
    }

    fn query_suffix(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            return Ok(());
        }
        self.expect(&Tok::Eq)?;
        self.expect(&Tok::Question)
    }

    fn varlist(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.name()?];
        while self.eat(&Tok::Comma) {
            out.push(self.name()?);
        }
        Ok(out)
    }

    fn varlist_braced(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(&Tok::LBrace)?;
        let v = self.varlist()?;
        self.expect(&Tok::RBrace)?;
        Ok(v)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err_here("formula nested too deeply"));
        }
        Ok(())
    }

    // formula := conj { "|" conj }
    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Pipe) {
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let r = if self.eat(&Tok::Bang) {
            self.unary().map(Formula::not)
        } else {
            self.primary()
        };
        self.depth -= 1;
        r
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let (line, col) = self.pos();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.bump();
                let f = self.disj()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::LBracket) => {
                self.bump();
                let (phi, psi) = self.bracket_body()?;
                let bound = self.varlist_braced()?;
                let (rel, p) = self.rel_prob()?;
                // scope is fixed up by the caller's resolution pass
                Ok(Formula::Stat(Box::new(StatTerm {
                    phi,
                    psi,
                    bound,
                    rel,
                    p,
                })))
            }
            Some(Tok::Ident(k)) if k == "prob" => {
                Err(ParseError::new(line, col, "nested prob not allowed"))
            }
            Some(Tok::Ident(k)) if k == "forall" || k == "exists" => Err(ParseError::new(
                line,
                col,
                "quantifiers are only allowed as the prefix of an axiom",
            )),
            Some(Tok::Ident(_)) => {
                let name = self.name()?;
                if self.eat(&Tok::LParen) {
                    let arity = self.sig.arity(&name).ok_or_else(|| {
                        ParseError::new(line, col, format!("undeclared predicate `{name}`"))
                    })?;
                    let mut args = vec![Term::Var(self.name()?)];
                    while self.eat(&Tok::Comma) {
                        args.push(Term::Var(self.name()?));
                    }
                    self.expect(&Tok::RParen)?;
                    if args.len() != arity {
                        return Err(ParseError::new(
                            line,
                            col,
                            format!(
                                "arity mismatch: `{name}` takes {arity} argument(s), got {}",
                                args.len()
                            ),
                        ));
                    }
                    Ok(Formula::Atom { pred: name, args })
                } else if self.eat(&Tok::EqEq) {
                    let rhs = self.name()?;
                    Ok(Formula::Equal(Term::Var(name), Term::Var(rhs)))
                } else {
                    Err(ParseError::new(
                        line,
                        col,
                        format!("expected `(` or `==` after `{name}`"),
                    ))
                }
            }
            Some(t) => Err(self.err_here(format!("expected a formula, found {}", t.describe()))),
            None => Err(self.err_here("expected a formula, found end of input")),
        }
    }

    /// `phi [ "|" psi ] "]"` after the opening bracket.
    fn bracket_body(&mut self) -> Result<(Formula, Formula), ParseError> {
        let phi = self.conj()?;
        let psi = if self.eat(&Tok::Pipe) {
            self.disj()?
        } else {
            Formula::True
        };
        self.expect(&Tok::RBracket)?;
        Ok((phi, psi))
    }

    /// `"(" phi [ "|" psi ] ")"` after `prob`.
    fn prob_body(&mut self) -> Result<(Formula, Formula), ParseError> {
        self.expect(&Tok::LParen)?;
        let phi = self.conj()?;
        let psi = if self.eat(&Tok::Pipe) {
            self.disj()?
        } else {
            Formula::True
        };
        self.expect(&Tok::RParen)?;
        Ok((phi, psi))
    }

    fn stat_term(&mut self, line: usize, col: usize) -> Result<StatTerm, ParseError> {
        let (phi, psi) = self.bracket_body()?;
        let bound = self.varlist_braced()?;
        let (rel, p) = self.rel_prob()?;
        self.finish_stat(phi, psi, bound, rel, p, line, col)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_stat(
        &self,
        phi: Formula,
        psi: Formula,
        bound: Vec<String>,
        rel: Rel,
        p: BigRational,
        line: usize,
        col: usize,
    ) -> Result<StatTerm, ParseError> {
        let err = |m: String| ParseError::new(line, col, m);
        if bound.len() > MAX_ARITY {
            return Err(err(format!("at most {MAX_ARITY} bound variables are supported")));
        }
        let mut scope = BTreeSet::new();
        for v in &bound {
            if self.sig.is_constant(v) {
                return Err(err(format!("`{v}` is a declared constant, not a variable")));
            }
            if !scope.insert(v.clone()) {
                return Err(err(format!("variable `{v}` bound twice")));
            }
        }
        let phi = self.resolve(&phi, &scope, line, col)?;
        let psi = self.resolve(&psi, &scope, line, col)?;
        let st = StatTerm {
            phi,
            psi,
            bound,
            rel,
            p,
        };
        let mut used = st.phi.free_vars();
        used.extend(st.psi.free_vars());
        for v in &st.bound {
            if !used.contains(v) {
                return Err(err(format!("bound variable `{v}` does not occur in the formula")));
            }
        }
        Ok(st)
    }

    /// Turns raw names into variables (when in scope) or declared constants.
    /// Nested statistical terms must be closed: they see only their own
    /// bound variables.
    fn resolve(
        &self,
        f: &Formula,
        scope: &BTreeSet<String>,
        line: usize,
        col: usize,
    ) -> Result<Formula, ParseError> {
        let term = |t: &Term| -> Result<Term, ParseError> {
            let n = t.name();
            if scope.contains(n) {
                Ok(Term::Var(n.to_string()))
            } else if self.sig.is_constant(n) {
                Ok(Term::Const(n.to_string()))
            } else {
                Err(ParseError::new(line, col, format!("undeclared symbol `{n}`")))
            }
        };
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(term).collect::<Result<_, _>>()?,
            },
            Formula::Equal(a, b) => Formula::Equal(term(a)?, term(b)?),
            Formula::Not(x) => Formula::not(self.resolve(x, scope, line, col)?),
            Formula::And(a, b) => Formula::and(
                self.resolve(a, scope, line, col)?,
                self.resolve(b, scope, line, col)?,
            ),
            Formula::Or(a, b) => Formula::or(
                self.resolve(a, scope, line, col)?,
                self.resolve(b, scope, line, col)?,
            ),
            Formula::Stat(st) => {
                let mut raw = st.phi.free_vars();
                raw.extend(st.psi.free_vars());
                for v in raw {
                    if !st.bound.contains(&v) && scope.contains(&v) {
                        return Err(ParseError::new(
                            line,
                            col,
                            format!(
                                "nested statistical term must be closed, but uses outer variable `{v}`"
                            ),
                        ));
                    }
                }
                let inner = self.finish_stat(
                    st.phi.clone(),
                    st.psi.clone(),
                    st.bound.clone(),
                    st.rel,
                    st.p.clone(),
                    line,
                    col,
                )?;
                if inner.phi.contains_stat() || inner.psi.contains_stat() {
                    return Err(ParseError::new(
                        line,
                        col,
                        "statistical terms may be nested one level deep only",
                    ));
                }
                Formula::Stat(Box::new(inner))
            }
        })
    }

    fn axiom(&mut self, line: usize, col: usize) -> Result<StatSentence, ParseError> {
        let mut vars = Vec::new();
        match self.peek() {
            Some(Tok::Ident(k)) if k == "forall" => {
                self.bump();
                vars = self.varlist()?;
                self.expect(&Tok::Dot)?;
            }
            Some(Tok::Ident(k)) if k == "exists" => {
                return Err(self.err_here(
                    "existential axioms are outside the supported fragment; use `forall`",
                ))
            }
            _ => {}
        }
        if vars.len() > MAX_ARITY {
            return Err(ParseError::new(
                line,
                col,
                format!("axioms may quantify at most {MAX_ARITY} variables"),
            ));
        }
        let mut scope = BTreeSet::new();
        for v in &vars {
            if self.sig.is_constant(v) {
                return Err(ParseError::new(line, col, format!("`{v}` is a declared constant, not a variable")));
            }
            if !scope.insert(v.clone()) {
                return Err(ParseError::new(line, col, format!("variable `{v}` bound twice")));
            }
        }
        let raw = self.disj()?;
        if raw.contains_stat() {
            return Err(ParseError::new(
                line,
                col,
                "statistical terms are not allowed inside axioms",
            ));
        }
        let matrix = self.resolve(&raw, &scope, line, col)?;
        Ok(StatSentence::Axiom { vars, matrix })
    }

    fn belief(
        &self,
        phi: Formula,
        psi: Formula,
        rel: Rel,
        p: BigRational,
        line: usize,
        col: usize,
    ) -> Result<BeliefSentence, ParseError> {
        if rel.is_strict() {
            return Err(ParseError::new(
                line,
                col,
                format!("relation `{rel}` is not allowed in belief sentences"),
            ));
        }
        let scope = BTreeSet::new();
        let phi = self.resolve(&phi, &scope, line, col)?;
        let psi = self.resolve(&psi, &scope, line, col)?;
        let b = BeliefSentence { phi, psi, rel, p };
        let subjects = b.subjects();
        if subjects.is_empty() {
            return Err(ParseError::new(line, col, "belief sentence mentions no constant"));
        }
        if subjects.len() > MAX_ARITY {
            return Err(ParseError::new(
                line,
                col,
                format!("belief sentences may mention at most {MAX_ARITY} constants"),
            ));
        }
        Ok(b)
    }
}

/// Exact value of a decimal literal such as `0.95` or `.5`.
pub(crate) fn parse_decimal(s: &str) -> BigRational {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits = format!("{int}{frac}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let num: BigInt = digits.parse().unwrap();
    let den = num_traits::pow(BigInt::from(10), frac.len());
    BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::QueryKind;

    const MOVIES: &str = "\
pred American/1
pred English/1
pred French/1
pred Mystery/1
pred HappyEnd/1
const f1

[HappyEnd(v) | American(v) & Mystery(v)]{v} = 0.8
prob(American(f1) & Mystery(f1)) = 0.2
";

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_statistical_and_belief_sentences() {
        let kb = parse_kb(MOVIES).unwrap();
        assert_eq!(kb.signature.predicates.len(), 5);
        let StatSentence::Stat(st) = &kb.statistical[0] else { panic!() };
        assert_eq!(st.bound, vec!["v".to_string()]);
        assert_eq!(st.rel, Rel::Eq);
        assert_eq!(st.p, r(4, 5));
        let v = || Term::Var("v".into());
        assert_eq!(st.phi, Formula::atom("HappyEnd", vec![v()]));
        assert_eq!(
            st.psi,
            Formula::and(
                Formula::atom("American", vec![v()]),
                Formula::atom("Mystery", vec![v()])
            )
        );
        let b = &kb.beliefs[0];
        assert_eq!(b.psi, Formula::True);
        assert_eq!(b.p, r(1, 5));
        assert_eq!(b.subjects(), vec!["f1".to_string()]);
    }

    #[test]
    fn empty_document() {
        let kb = parse_kb("").unwrap();
        assert!(kb.is_empty());
        assert!(parse_kb("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn nested_prob_is_rejected() {
        let e = parse_kb("pred P/1\nconst a\nprob(prob(P(a)) >= 0.5) >= 0.5").unwrap_err();
        assert!(e.message.contains("nested prob not allowed"), "{e}");
        assert_eq!(e.line, 3);
    }

    #[test]
    fn strict_beliefs_are_rejected() {
        let e = parse_kb("pred P/1\nconst a\nprob(P(a)) > 0.5").unwrap_err();
        assert!(e.message.contains("not allowed in belief"), "{e}");
    }

    #[test]
    fn arity_and_declaration_errors() {
        let e = parse_kb("pred P/1\n[P(v, w)]{v, w} >= 0.5").unwrap_err();
        assert!(e.message.contains("arity mismatch"), "{e}");
        let e = parse_kb("[Q(v)]{v} >= 0.5").unwrap_err();
        assert!(e.message.contains("undeclared predicate"), "{e}");
        let e = parse_kb("pred P/1\nprob(P(zz)) = 0.5").unwrap_err();
        assert!(e.message.contains("undeclared symbol `zz`"), "{e}");
        let e = parse_kb("pred P/3").unwrap_err();
        assert!(e.message.contains("arity"), "{e}");
    }

    #[test]
    fn bound_variable_must_occur() {
        let e = parse_kb("pred P/1\n[P(v)]{v, w} >= 0.5").unwrap_err();
        assert!(e.message.contains("does not occur"), "{e}");
    }

    #[test]
    fn subjects_may_not_appear_in_statistics() {
        let e = parse_kb("pred P/2\nconst a\n[P(v, a)]{v} >= 0.5\nprob(P(a, a)) = 1").unwrap_err();
        assert!(e.message.contains("belief subject"), "{e}");
    }

    #[test]
    fn declarations_may_follow_use() {
        let kb = parse_kb("prob(P(a)) = 1/3\nconst a\npred P/1").unwrap();
        assert_eq!(kb.beliefs[0].p, r(1, 3));
    }

    #[test]
    fn conditional_bar_binds_first() {
        let kb = parse_kb("pred A/1\npred B/1\npred C/1\n[A(v) | B(v) | C(v)]{v} >= 0.1").unwrap();
        let StatSentence::Stat(st) = &kb.statistical[0] else { panic!() };
        assert!(matches!(st.phi, Formula::Atom { .. }));
        assert!(matches!(st.psi, Formula::Or(..)));
    }

    #[test]
    fn axioms() {
        let kb = parse_kb(
            "pred B/2\naxiom forall v0 . !B(v0, v0)\naxiom forall v0, v1 . v0 == v1 | (B(v0, v1) & !B(v1, v0)) | (!B(v0, v1) & B(v1, v0))",
        )
        .unwrap();
        assert_eq!(kb.statistical.len(), 2);
        assert_eq!(kb.statistical[1].arity(), 2);
        assert!(parse_kb("pred B/1\naxiom exists v . B(v)").is_err());
    }

    #[test]
    fn nested_closed_stat_term() {
        let kb = parse_kb("pred P/1\npred Q/1\nconst a\nprob(Q(a) & [P(v)]{v} >= 0.5) = 0.3").unwrap();
        assert!(kb.beliefs[0].phi.contains_stat());
        let e = parse_kb("pred P/2\n[[P(v, w)]{w} >= 0.5]{v} >= 0.5").unwrap_err();
        assert!(e.message.contains("closed"), "{e}");
    }

    #[test]
    fn queries() {
        let kb = parse_kb(MOVIES).unwrap();
        let q = parse_query("prob(HappyEnd(f1)) = ?", &kb.signature).unwrap();
        assert_eq!(q.kind, QueryKind::Subjective);
        assert_eq!(q.psi, Formula::True);
        assert_eq!(q.subjects, vec!["f1".to_string()]);
        let q = parse_query("[HappyEnd(v) | American(v) & Mystery(v)]{v} = ?", &kb.signature).unwrap();
        assert_eq!(q.kind, QueryKind::Statistical);
        assert_eq!(q.bound, vec!["v".to_string()]);
        let e = parse_query("HappyEnd(f1)?", &kb.signature).unwrap_err();
        assert!(e.message.contains("bare formula"), "{e}");
        assert!(parse_query("prob(HappyEnd(f1)) = ? junk", &kb.signature).is_err());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.95"), r(19, 20));
        assert_eq!(parse_decimal(".5"), r(1, 2));
        assert_eq!(parse_decimal("1"), r(1, 1));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = format!("pred P/1\nconst a\nprob({}P(a){}) = 1", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_kb(&text).is_err());
        let text = format!("pred P/1\nconst a\nprob({}P(a)) = 1", "!".repeat(5000));
        assert!(parse_kb(&text).is_err());
    }
}
