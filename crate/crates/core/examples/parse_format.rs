//! Parse a knowledge base, print it back in canonical form, and parse a query.

use cekb::syntax::{format_kb, format_query};
use cekb::{parse_kb, parse_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb(include_str!("kb_f2.kb"))?;
    println!(
        "{} predicates, {} constants, {} statistical and {} belief sentences\n",
        kb.signature.predicates.len(),
        kb.signature.constants.len(),
        kb.statistical.len(),
        kb.beliefs.len()
    );
    print!("{}", format_kb(&kb));

    let query = parse_query("prob(HappyEnd(f2) | American(f2) & Mystery(f2)) = ?", &kb.signature)?;
    println!("\nquery: {}", format_query(&query));

    // errors carry line and column
    let err = parse_kb("pred P/1\n[P(v) | Q(v)]{v} = 0.5").unwrap_err();
    println!("error: {err}");
    Ok(())
}
