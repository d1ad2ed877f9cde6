//! Answering from the one case of a partition the condition falls in.

use cekb::inference::{answer, case_split, Options};
use cekb::{parse_kb, parse_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb(include_str!("kb_f2.kb"))?;
    let query = parse_query("prob(HappyEnd(f2) | American(f2) & Mystery(f2)) = ?", &kb.signature)?;
    let opts = Options::default();
    let full = answer(&kb, &query, &opts)?;
    println!("whole knowledge base:\n{}", full.to_text());
    match case_split(&kb, &query, &opts)? {
        Some(r) => println!("\nits case only:\n{}", r.to_text()),
        None => println!("\nthe beliefs do not split into cases"),
    }
    Ok(())
}
