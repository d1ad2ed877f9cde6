//! Degree of belief in a property of one individual, from statistics and
//! partial beliefs about it.

use cekb::inference::{answer, Options};
use cekb::{parse_kb, parse_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (kb_text, query) in [
        (include_str!("kb_f1.kb"), "prob(HappyEnd(f1)) = ?"),
        (include_str!("kb_f2.kb"), "prob(HappyEnd(f2)) = ?"),
        (include_str!("kb_f2.kb"), "prob(Action(f2) | American(f2) & Mystery(f2)) = ?"),
    ] {
        let kb = parse_kb(kb_text)?;
        let r = answer(&kb, &parse_query(query, &kb.signature)?, &Options::default())?;
        println!("{}", r.to_text());
        println!("{}\n", r.to_json());
    }
    Ok(())
}
