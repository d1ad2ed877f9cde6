//! Deciding whether a knowledge base has a model, and naming the culprits
//! when it does not.

use cekb::inference::check_kb;
use cekb::parse_kb;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let good = parse_kb(include_str!("kb_f1f2.kb"))?;
    println!("kb_f1f2.kb\n{}", check_kb(&good).to_text());

    let statistics = parse_kb("pred P/1\npred Q/1\n[P(v)]{v} = 0.3\n[P(v) & Q(v)]{v} >= 0.5\n[Q(v)]{v} >= 0.1")?;
    println!("contradictory statistics\n{}", check_kb(&statistics).to_text());

    // the statistics are fine, but the belief needs a null event
    let beliefs = parse_kb("pred P/1\nconst a\naxiom forall v . !P(v)\nprob(P(a)) = 0.5")?;
    println!("belief in a null event\n{}", check_kb(&beliefs).to_text());
    Ok(())
}
