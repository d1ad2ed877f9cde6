//! Enumerate the atoms of a signature and compute formula extensions.

use std::collections::HashMap;

use cekb::syntax::{Formula, Term};
use cekb::{parse_kb, AtomSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_kb("pred Bird/1\npred Flies/1\npred Likes/2")?;
    let unary = AtomSpace::build(&kb.signature, 1)?;
    println!("arity 1: {} atoms", unary.len());
    print!("{}", unary.dump());

    // over two slots, atoms also decide whether the slots name one element
    let pairs = AtomSpace::build(&kb.signature, 2)?;
    let slots: HashMap<String, usize> = [("x".to_string(), 0), ("y".to_string(), 1)].into_iter().collect();
    let var = |n: &str| Term::Var(n.to_string());
    let likes = Formula::atom("Likes", vec![var("x"), var("y")]);
    let mutual = Formula::and(likes.clone(), Formula::atom("Likes", vec![var("y"), var("x")]));
    let same = Formula::Equal(var("x"), var("y"));
    println!("\narity 2: {} atoms", pairs.len());
    for (name, f) in [("Likes(x, y)", likes), ("mutual", mutual), ("x == y", same)] {
        println!("{name:>12}: {} atoms", pairs.extension(&f, &slots)?.count());
    }
    Ok(())
}
