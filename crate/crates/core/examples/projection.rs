//! Minimum cross-entropy update under inequality and conditional constraints,
//! with the per-row residual trace.

use cekb::crossentropy::{cross_entropy, ce_project, CondConstraint, ConstraintRel, Distribution, TraceRecord};
use cekb::AtomSet;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let prior = Distribution::uniform(4);
    let rows = [
        // nu({0, 1}) >= 0.7
        CondConstraint::mass(AtomSet::from_indices(4, [0, 1]), ConstraintRel::Ge, q(7, 10), "at least 0.7 on {0, 1}"),
        // nu({0} | {0, 2}) = 0.2
        CondConstraint {
            phi: AtomSet::from_indices(4, [0]),
            psi: AtomSet::from_indices(4, [0, 2]),
            rel: ConstraintRel::Eq,
            p: q(2, 10),
            label: "0 is rare among {0, 2}".into(),
        },
    ];
    // one line per sweep, after its last row
    println!("sweep,residual,ce");
    let last = rows.len() - 1;
    let mut trace = |t: &TraceRecord| {
        if t.row == last {
            println!("{},{:.3e},{:.9}", t.sweep, t.residual, t.ce_value);
        }
    };
    let r = ce_project(&prior, &rows, Some(&mut trace))?;
    println!("\nposterior {:?}", r.nu.weights);
    println!("cross entropy {:.9} (recomputed {:.9}), method {}", r.ce_value, cross_entropy(&r.nu, &prior)?, r.method.name());
    Ok(())
}
