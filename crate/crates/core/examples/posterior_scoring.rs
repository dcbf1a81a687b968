// Score granulizations by accuracy and rule count.

use bayes_rough::posterior::ModelScorer;
use bayes_rough::prelude::*;
use bayes_rough::seed;

fn main() -> Result<()> {
    let spec = SynthSpec::checkerboard(2, 3, 0.1, 1_000, 3);
    let (table, truth) = generate(&spec)?;
    println!("best achievable accuracy {:.3}", truth.bayes_accuracy);

    for (label, config) in [
        ("training", PosteriorConfig::default()),
        (
            "holdout 30%",
            PosteriorConfig {
                accuracy_split: AccuracySplit::Holdout(0.3),
                ..PosteriorConfig::default()
            },
        ),
    ] {
        let scorer = ModelScorer::new(&table, &config, 11)?;
        let planted = scorer.score(&spec.planted_granulization()?)?;
        println!(
            "[{label}] planted cuts: accuracy {:.3}, {} rules, log posterior {:.4}",
            planted.accuracy, planted.rule_count, planted.log_posterior
        );
        let mut rng = seed::rng(5, seed::stream::INIT);
        for _ in 0..3 {
            let g = random_granulization(table.schema(), &GranuleCounts::uniform(2, 3), &mut rng)?;
            let m = scorer.score(&g)?;
            println!(
                "[{label}] random cuts:  accuracy {:.3}, {} rules, log posterior {:.4}",
                m.accuracy, m.rule_count, m.log_posterior
            );
        }
    }
    println!(
        "log posterior of A = 0.58, N = 222: {:.3}",
        log_posterior(0.58, 222, 0.001)?
    );
    Ok(())
}
