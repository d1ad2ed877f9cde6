//! Individuals no belief links are updated independently; a query across
//! them combines the separate answers.

use cekb::inference::{answer, decompose_blocks, Options};
use cekb::{parse_kb, parse_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb(include_str!("kb_f1f2.kb"))?;
    println!("blocks: {:?}\n", decompose_blocks(&kb).blocks);
    for text in [
        "prob(HappyEnd(f1)) = ?",
        "prob(HappyEnd(f2)) = ?",
        "prob(HappyEnd(f1) & HappyEnd(f2)) = ?",
        "prob(Better(f1, f2)) = ?",
    ] {
        let r = answer(&kb, &parse_query(text, &kb.signature)?, &Options::default())?;
        println!("{}", r.to_text());
    }
    Ok(())
}
