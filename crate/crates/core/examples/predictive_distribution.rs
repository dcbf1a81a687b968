// Average rule outputs over the retained models for new objects.

use bayes_rough::predictive::Query;
use bayes_rough::prelude::*;

fn main() -> Result<()> {
    let (table, _) = generate(&SynthSpec::checkerboard(2, 2, 0.05, 400, 9))?;
    let config = ChainConfig {
        burn_in: 50,
        retain: 100,
        ..ChainConfig::default()
    };
    let chain = run_chain(&table, &GranuleCounts::uniform(2, 2), &config)?;

    for (id, values) in [
        ("low-low", [10.0, 10.0]),
        ("low-high", [10.0, 90.0]),
        ("centre", [50.0, 50.0]),
    ] {
        let dist = predict_distribution(&chain, &Query::new(id, values.to_vec()), 8)?;
        println!(
            "{id}: mean {:+.3}, coverage {:.2}, {} abstentions",
            dist.mean,
            dist.coverage,
            dist.abstentions()
        );
        for (i, count) in dist.histogram.counts.iter().enumerate() {
            println!(
                "  [{:+.2}, {:+.2}) {}",
                dist.histogram.edges[i],
                dist.histogram.edges[i + 1],
                "#".repeat(*count as usize / 2)
            );
        }
    }
    Ok(())
}
