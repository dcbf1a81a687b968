// Cut points, granule signatures and the Gaussian cut move.

use bayes_rough::granulation::granule_label;
use bayes_rough::prelude::*;
use bayes_rough::seed;

fn main() -> Result<()> {
    let schema = vec![
        AttributeSpec::numeric("mothers_age", 14.0, 50.0),
        AttributeSpec::numeric("fathers_age", 14.0, 70.0),
    ];
    let g = Granulization::from_cuts(
        &schema,
        vec![vec![20.0, 30.0, 40.0], vec![25.0, 35.0, 50.0]],
    )?;
    for age in [14.0, 19.9, 20.0, 33.0, 50.0] {
        let i = discretize_value(age, g.cuts(0));
        println!(
            "mothers_age {age:>4} -> granule {i} ({})",
            granule_label(i, 4)
        );
    }
    println!("signature of (27, 28): {}", g.signature_of(&[27.0, 28.0]));

    let mut rng = seed::rng(7, seed::stream::INIT);
    let counts = GranuleCounts::uniform(2, 4);
    let mut state = random_granulization(&schema, &counts, &mut rng)?;
    println!("random start: {}", serde_json::to_string(&state).unwrap());
    for step in 1..=5 {
        state = perturb(&state, 0.05, &mut rng)?;
        println!("step {step}: {}", serde_json::to_string(&state).unwrap());
    }
    Ok(())
}
