use cekb::inference::{answer, case_split, check_kb, Options, Verdict};
use cekb::{parse_kb, parse_query, KnowledgeBase};
use num_rational::BigRational;

fn kb(name: &str) -> KnowledgeBase {
    let path = format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_kb(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn film_one_happy_end() {
    let kb = kb("kb_f1.kb");
    let query = parse_query("prob(HappyEnd(f1)) = ?", &kb.signature).unwrap();
    let r = answer(&kb, &query, &Options::default()).unwrap();
    assert_eq!(r.lo.exact, Some(q(8, 25)), "{}", r.to_text());
    assert!(r.derivation.contains(&"jeffrey".to_string()), "{:?}", r.derivation);
}

#[test]
fn film_two_given_mystery() {
    let kb = kb("kb_f2.kb");
    let query = parse_query("prob(HappyEnd(f2) | American(f2) & Mystery(f2)) = ?", &kb.signature).unwrap();
    let r = answer(&kb, &query, &Options::default()).unwrap();
    assert_eq!(r.lo.exact, Some(q(16, 21)), "{}", r.to_text());
    let c = case_split(&kb, &query, &Options::default()).unwrap().expect("case split applies");
    assert_eq!(c.lo.exact, Some(q(16, 21)), "{}", c.to_text());
}

#[test]
fn film_two_happy_end() {
    let kb = kb("kb_f2.kb");
    let query = parse_query("prob(HappyEnd(f2)) = ?", &kb.signature).unwrap();
    let r = answer(&kb, &query, &Options::default()).unwrap();
    assert_eq!(r.lo.exact, Some(q(719, 840)), "{}", r.to_text());
}

#[test]
fn better_film() {
    let kb = kb("kb_f1f2.kb");
    let query = parse_query("prob(Better(f1, f2)) = ?", &kb.signature).unwrap();
    let r = answer(&kb, &query, &Options::default()).unwrap();
    println!("{}", r.to_text());
    assert!((r.lo.value - 0.259).abs() < 0.002);
}

#[test]
fn sample_kbs_have_models() {
    for name in ["kb_f1.kb", "kb_f2.kb", "kb_f1f2.kb"] {
        let r = check_kb(&kb(name));
        assert_eq!(r.has_model, Verdict::Yes, "{name}: {}", r.to_text());
    }
}
