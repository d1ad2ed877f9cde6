//! Bounds on statistical probabilities entailed by the statistical sentences.

use cekb::inference::{answer, Options};
use cekb::{parse_kb, parse_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb(include_str!("kb_f2.kb"))?;
    for text in [
        "[HappyEnd(v) | American(v) & Mystery(v) & Action(v)]{v} = ?",
        "[HappyEnd(v) | American(v) & Mystery(v) & !Action(v)]{v} = ?",
        // nothing constrains romances: only the trivial bounds follow
        "[HappyEnd(v) | Romance(v)]{v} = ?",
    ] {
        let r = answer(&kb, &parse_query(text, &kb.signature)?, &Options::default())?;
        println!("{}\n", r.to_text());
    }
    Ok(())
}
