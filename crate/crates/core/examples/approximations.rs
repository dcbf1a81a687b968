// Indiscernibility classes, lower and upper approximations and rough membership.

use std::collections::BTreeSet;

use bayes_rough::granulation::GranuleSignature;
use bayes_rough::prelude::*;

fn main() -> Result<()> {
    // Eight objects described by two discretized attributes.
    let sigs: Vec<GranuleSignature> = [
        [0, 0],
        [0, 0],
        [0, 1],
        [1, 1],
        [1, 1],
        [1, 1],
        [2, 0],
        [2, 0],
    ]
    .iter()
    .map(|s| GranuleSignature(s.to_vec()))
    .collect();
    let positive: BTreeSet<usize> = [0, 1, 3, 6].into();

    let classes = EquivalenceClasses::from_signatures(&sigs, &[0, 1])?;
    for class in classes.classes() {
        println!("class {}: {:?}", class.signature, class.members);
    }
    let approx = Approximation::of(&classes, &positive);
    println!("lower {:?}", approx.lower);
    println!("upper {:?}", approx.upper);
    println!("boundary {:?}", approx.boundary());
    println!("accuracy {:.3}", approximation_accuracy(&approx));
    for x in [0, 3, 6] {
        println!(
            "membership of object {x}: {:.5}",
            rough_membership(&classes, x, &positive)
        );
    }

    let coarse = EquivalenceClasses::from_signatures(&sigs, &[1])?;
    let approx = Approximation::of(&coarse, &positive);
    println!(
        "on the second attribute alone: accuracy {:.3}",
        approximation_accuracy(&approx)
    );
    Ok(())
}
