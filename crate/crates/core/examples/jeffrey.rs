//! Jeffrey's rule, and the same update found by the general projection.

use cekb::crossentropy::{ce_project, ce_project_iterative, jeffrey, CondConstraint, ConstraintRel, Distribution};
use cekb::AtomSet;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let prior = Distribution::from_exact(vec![q(1, 10), q(2, 10), q(3, 10), q(4, 10)])?;
    let blocks = [AtomSet::from_indices(4, [0, 1]), AtomSet::from_indices(4, [2, 3])];
    let weights = [q(3, 4), q(1, 4)];

    let nu = jeffrey(&prior, &blocks, &weights)?;
    println!("jeffrey:   {:?}", nu.exact.unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>());

    let rows = [CondConstraint::mass(blocks[0].clone(), ConstraintRel::Eq, weights[0].clone(), "first block")];
    let fast = ce_project(&prior, &rows, None)?;
    let slow = ce_project_iterative(&prior, &rows, None)?;
    println!("projected: {:?} via {}", fast.nu.weights, fast.method.name());
    println!("iterative: {:?} after {} sweeps", slow.nu.weights, slow.iterations);
    println!("distance:  {:e}", fast.nu.variation_distance(&slow.nu));
    Ok(())
}
