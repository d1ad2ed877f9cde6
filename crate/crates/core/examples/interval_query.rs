//! When the statistics leave the relevant frequencies open, point mode
//! refuses and interval mode samples statistical measures instead.

use cekb::inference::{answer, InferError, Options};
use cekb::{parse_kb, parse_query};

const KB: &str = "
pred Bird/1
pred Penguin/1
pred Flies/1
const tweety
axiom forall v . !Penguin(v) | Bird(v)
[Flies(v) | Bird(v)]{v} >= 0.8
[Flies(v) | Penguin(v)]{v} <= 0.1
[Penguin(v) | Bird(v)]{v} <= 0.2
prob(Bird(tweety)) = 1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb(KB)?;
    let query = parse_query("prob(Flies(tweety)) = ?", &kb.signature)?;
    match answer(&kb, &query, &Options::default()) {
        Err(e @ InferError::NotUnique(_)) => println!("point mode: {e}\n"),
        other => println!("point mode: {other:?}\n"),
    }
    let r = answer(&kb, &query, &Options::interval(64, 7))?;
    println!("{}", r.to_text());
    Ok(())
}
