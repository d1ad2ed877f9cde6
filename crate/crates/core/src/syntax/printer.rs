use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BeliefSentence, Formula, KnowledgeBase, Query, QueryKind, StatSentence, StatTerm, Term};

/// Canonical text of a knowledge base: declarations, then statistical
/// sentences, then beliefs, one per line.
pub fn format_kb(kb: &KnowledgeBase) -> String {
    let mut sections: Vec<String> = Vec::new();
    let mut decls = String::new();
    for (name, arity) in &kb.signature.predicates {
        decls.push_str(&format!("pred {name}/{arity}\n"));
    }
    if !kb.signature.constants.is_empty() {
        decls.push_str(&format!("const {}\n", kb.signature.constants.join(", ")));
    }
    sections.push(decls);
    sections.push(
        kb.statistical
            .iter()
            .map(|s| format!("{}\n", format_stat_sentence(s)))
            .collect(),
    );
    sections.push(
        kb.beliefs
            .iter()
            .map(|b| format!("{}\n", format_belief(b)))
            .collect(),
    );
    sections.retain(|s| !s.is_empty());
    sections.join("\n")
}

pub(crate) fn format_stat_sentence(s: &StatSentence) -> String {
    match s {
        StatSentence::Stat(st) => format_stat_term(st),
        StatSentence::Axiom { vars, matrix } if vars.is_empty() => {
            format!("axiom {}", format_formula(matrix))
        }
        StatSentence::Axiom { vars, matrix } => {
            format!("axiom forall {} . {}", vars.join(", "), format_formula(matrix))
        }
    }
}

pub(crate) fn format_belief(b: &BeliefSentence) -> String {
    format!("prob({}) {} {}", body(&b.phi, &b.psi), b.rel, format_prob(&b.p))
}

pub fn format_query(q: &Query) -> String {
    match q.kind {
        QueryKind::Subjective => format!("prob({}) = ?", body(&q.phi, &q.psi)),
        QueryKind::Statistical => {
            format!("[{}]{{{}}} = ?", body(&q.phi, &q.psi), q.bound.join(", "))
        }
    }
}

fn format_stat_term(st: &StatTerm) -> String {
    format!(
        "[{}]{{{}}} {} {}",
        body(&st.phi, &st.psi),
        st.bound.join(", "),
        st.rel,
        format_prob(&st.p)
    )
}

fn body(phi: &Formula, psi: &Formula) -> String {
    let mut s = String::new();
    write_formula(phi, 2, &mut s);
    if *psi != Formula::True {
        s.push_str(" | ");
        write_formula(psi, 1, &mut s);
    }
    s
}

pub fn format_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, 1, &mut s);
    s
}

fn term(t: &Term) -> &str {
    t.name()
}

// precedence: 1 = disjunction, 2 = conjunction, 3 = negation / primary
fn write_formula(f: &Formula, min_prec: u8, out: &mut String) {
    let prec = match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        // a bracketed term swallows a following `&`, so keep it parenthesized
        Formula::Stat(_) => 0,
        _ => 3,
    };
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom { pred, args } => {
            out.push_str(pred);
            out.push('(');
            out.push_str(&args.iter().map(term).collect::<Vec<_>>().join(", "));
            out.push(')');
        }
        Formula::Equal(a, b) => {
            out.push_str(term(a));
            out.push_str(" == ");
            out.push_str(term(b));
        }
        Formula::Not(x) => {
            out.push('!');
            match **x {
                Formula::Equal(..) => {
                    out.push('(');
                    write_formula(x, 1, out);
                    out.push(')');
                }
                _ => write_formula(x, 3, out),
            }
        }
        Formula::And(a, b) => {
            write_formula(a, 2, out);
            out.push_str(" & ");
            write_formula(b, 3, out);
        }
        Formula::Or(a, b) => {
            write_formula(a, 1, out);
            out.push_str(" | ");
            write_formula(b, 2, out);
        }
        Formula::Stat(st) => out.push_str(&format_stat_term(st)),
    }
    if paren {
        out.push(')');
    }
}

/// Exact decimal when the denominator divides a power of ten, `m/n` otherwise.
pub fn format_prob(p: &BigRational) -> String {
    let den = p.denom().clone();
    let mut d = den.clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", p.numer(), p.denom());
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return p.numer().to_string();
    }
    let scaled = p.numer() * num_traits::pow(BigInt::from(10), digits) / &den;
    let s = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{int}.{frac}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_kb;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn probabilities() {
        assert_eq!(format_prob(&r(4, 5)), "0.8");
        assert_eq!(format_prob(&r(19, 20)), "0.95");
        assert_eq!(format_prob(&r(1, 1)), "1");
        assert_eq!(format_prob(&r(0, 1)), "0");
        assert_eq!(format_prob(&r(16, 21)), "16/21");
        assert_eq!(format_prob(&r(1, 200)), "0.005");
    }

    #[test]
    fn equality_belief_prints_once() {
        let kb = parse_kb("pred P/1\nconst a\nprob(P(a)) = 0.3").unwrap();
        let text = format_kb(&kb);
        assert_eq!(text, "pred P/1\nconst a\n\nprob(P(a)) = 0.3\n");
    }

    #[test]
    fn empty_kb_prints_nothing() {
        assert_eq!(format_kb(&KnowledgeBase::default()), "");
    }

    #[test]
    fn disjunction_in_conditioned_part_is_parenthesized() {
        let kb = parse_kb("pred A/1\npred B/1\n[(A(v) | B(v)) & A(v) | B(v)]{v} >= 0.5").unwrap();
        let text = format_kb(&kb);
        assert!(text.contains("[(A(v) | B(v)) & A(v) | B(v)]{v} >= 0.5"), "{text}");
        assert_eq!(parse_kb(&text).unwrap(), kb);
    }
}
