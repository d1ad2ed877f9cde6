//! Structural properties of the syntax and the atom algebra.

use std::collections::HashMap;

use cekb::algebra::GroundAtom;
use cekb::syntax::{format_kb, Formula, Signature, StatSentence, Term};
use cekb::{parse_kb, AtomSet, AtomSpace};
use proptest::prelude::*;

/// Fully parenthesized surface text for a formula tree whose leaves are
/// given as text.
#[derive(Debug, Clone)]
enum Tree {
    Leaf(&'static str),
    Not(Box<Tree>),
    And(Box<Tree>, Box<Tree>),
    Or(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn text(&self, bind: &dyn Fn(&str) -> String) -> String {
        match self {
            Tree::Leaf(l) => bind(l),
            Tree::Not(a) => format!("!({})", a.text(bind)),
            Tree::And(a, b) => format!("({} & {})", a.text(bind), b.text(bind)),
            Tree::Or(a, b) => format!("({} | {})", a.text(bind), b.text(bind)),
        }
    }
}

fn tree(leaves: &'static [&'static str]) -> impl Strategy<Value = Tree> {
    let leaf = proptest::sample::select(leaves).prop_map(Tree::Leaf);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Tree::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Tree::Or(Box::new(a), Box::new(b))),
        ]
    })
}

const UNARY: &[&str] = &["P(_)", "Q(_)", "R(_)"];
const REL: &[&str] = &["=", ">=", "<=", ">", "<"];

fn over(var: &'static str) -> impl Fn(&str) -> String {
    move |l: &str| l.replace('_', var)
}

fn prob() -> impl Strategy<Value = String> {
    prop_oneof![(0..=20u32).prop_map(|n| format!("{n}/20")), (0..=100u32).prop_map(|n| format!("{}", n as f64 / 100.0))]
}

const HEADER: &str = "pred P/1\npred Q/1\npred R/1\npred B/2\nconst a\nconst b\n";

fn stat_line() -> impl Strategy<Value = String> {
    (tree(UNARY), proptest::option::of(tree(UNARY)), proptest::sample::select(REL), prob()).prop_map(|(phi, psi, rel, p)| {
        let v = over("v");
        match psi {
            Some(psi) => format!("[{} | {}]{{v}} {rel} {p}", phi.text(&v), psi.text(&v)),
            None => format!("[{}]{{v}} {rel} {p}", phi.text(&v)),
        }
    })
}

fn belief_line() -> impl Strategy<Value = String> {
    const GROUND: &[&str] = &["P(a)", "Q(b)", "R(a)", "B(a, b)", "B(b, a)", "a == b"];
    (tree(GROUND), proptest::option::of(tree(GROUND)), proptest::sample::select(&["=", ">=", "<="][..]), prob()).prop_map(
        |(phi, psi, rel, p)| {
            let id = |l: &str| l.to_string();
            match psi {
                Some(psi) => format!("prob({} | {}) {rel} {p}", phi.text(&id), psi.text(&id)),
                None => format!("prob({}) {rel} {p}", phi.text(&id)),
            }
        },
    )
}

fn axiom_line() -> impl Strategy<Value = String> {
    const BINARY: &[&str] = &["P(u)", "Q(w)", "B(u, w)", "B(w, u)", "u == w"];
    tree(BINARY).prop_map(|m| format!("axiom forall u, w . {}", m.text(&|l: &str| l.to_string())))
}

fn kb_text() -> impl Strategy<Value = String> {
    let line = prop_oneof![3 => stat_line(), 3 => belief_line(), 1 => axiom_line()];
    proptest::collection::vec(line, 0..8).prop_map(|lines| format!("{HEADER}{}\n", lines.join("\n")))
}

/// Truth of a formula in one atom of a pair space, evaluated connective by
/// connective from the atom's ground truth values.
fn holds(space: &AtomSpace, atom: usize, f: &Formula, slot: &dyn Fn(&Term) -> usize) -> bool {
    let ground = |g: GroundAtom| space.truth(atom, space.ground_index(&g).expect("ground atom in space"));
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom { pred, args } if args.len() == 1 => ground(GroundAtom::Unary { pred: pred.clone(), slot: slot(&args[0]) }),
        Formula::Atom { pred, args } => {
            ground(GroundAtom::Binary { pred: pred.clone(), first: slot(&args[0]), second: slot(&args[1]) })
        }
        Formula::Equal(x, y) => {
            let (i, j) = (slot(x), slot(y));
            i == j || ground(GroundAtom::Equal { first: i.min(j), second: i.max(j) })
        }
        Formula::Not(a) => !holds(space, atom, a, slot),
        Formula::And(a, b) => holds(space, atom, a, slot) && holds(space, atom, b, slot),
        Formula::Or(a, b) => holds(space, atom, a, slot) || holds(space, atom, b, slot),
        Formula::Stat(_) => unreachable!("no statistical terms generated"),
    }
}

fn pair_space() -> AtomSpace {
    let sig = Signature { predicates: vec![("P".into(), 1), ("Q".into(), 1), ("B".into(), 2)], constants: vec![] };
    AtomSpace::build(&sig, 2).unwrap()
}

/// Parses an axiom matrix over `x`, `y` to get a formula AST.
fn pair_formula(t: &Tree) -> Formula {
    let text = format!("pred P/1\npred Q/1\npred B/2\naxiom forall x, y . {}", t.text(&|l: &str| l.to_string()));
    let kb = parse_kb(&text).unwrap();
    match &kb.statistical[0] {
        StatSentence::Axiom { matrix, .. } => matrix.clone(),
        other => panic!("not an axiom: {other:?}"),
    }
}

const PAIR_LEAVES: &[&str] = &["P(x)", "P(y)", "Q(x)", "B(x, y)", "B(y, x)", "B(x, x)", "x == y"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_the_identity(text in kb_text()) {
        let kb = parse_kb(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        let printed = format_kb(&kb);
        let again = parse_kb(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        prop_assert_eq!(&again, &kb, "printed:\n{}", printed);
        prop_assert_eq!(format_kb(&again), printed);
    }

    #[test]
    fn upper_bounds_abbreviate_negated_lower_bounds(phi in tree(UNARY), psi in tree(UNARY), n in 0..=20i64, strict in any::<bool>()) {
        let v = over("v");
        let (phi, psi) = (phi.text(&v), psi.text(&v));
        let (le, ge) = if strict { ("<", ">") } else { ("<=", ">=") };
        let upper = parse_kb(&format!("{HEADER}[{phi} | {psi}]{{v}} {le} {n}/20")).unwrap();
        let lower = parse_kb(&format!("{HEADER}[!({phi}) | {psi}]{{v}} {ge} {}/20", 20 - n)).unwrap();
        let canon = |kb: &cekb::KnowledgeBase| match &kb.statistical[0] {
            StatSentence::Stat(st) => st.canonical(),
            other => panic!("not a statistic: {other:?}"),
        };
        prop_assert_eq!(canon(&upper), canon(&lower));
    }

    #[test]
    fn extension_is_a_boolean_homomorphism(f in tree(PAIR_LEAVES), g in tree(PAIR_LEAVES)) {
        let space = pair_space();
        let slots: HashMap<String, usize> = [("x".to_string(), 0), ("y".to_string(), 1)].into_iter().collect();
        let slot = |t: &Term| slots[t.name()];
        let (ff, gf) = (pair_formula(&f), pair_formula(&g));
        let ext = |h: &Formula| space.extension(h, &slots).unwrap();
        let truth_table = |h: &Formula| AtomSet::from_indices(space.len(), (0..space.len()).filter(|&a| holds(&space, a, h, &slot)));
        let (ef, eg) = (ext(&ff), ext(&gf));
        prop_assert_eq!(&ef, &truth_table(&ff));
        prop_assert_eq!(ext(&Formula::not(ff.clone())), ef.complement());
        prop_assert_eq!(ext(&Formula::and(ff.clone(), gf.clone())), ef.intersection(&eg));
        prop_assert_eq!(ext(&Formula::or(ff, gf)), ef.union(&eg));
    }
}
