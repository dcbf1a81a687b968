// Drive the training pipeline from a JSON run configuration.

use bayes_rough::cli::{cmd_predict, cmd_train, map_rules_text, RunConfig};
use bayes_rough::prelude::*;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("bayes-rough-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (table, _) = generate(&SynthSpec::checkerboard(2, 3, 0.1, 300, 2))?;
    table.write_csv(std::fs::File::create(dir.join("train.csv")).unwrap())?;

    let config_text = r#"{
        "data": "train.csv",
        "decision_column": "decision",
        "attributes": [
            {"name": "x1", "range": [0, 100]},
            {"name": "x2", "range": [0, 100]}
        ],
        "granules": 3,
        "chain": {"burn_in": 50, "retain": 100, "seed": 3, "lambda": 0.001},
        "output_dir": "out"
    }"#;
    std::fs::write(dir.join("run.json"), config_text).unwrap();

    let config = RunConfig::from_path(&dir.join("run.json"))?;
    let run = cmd_train(&config, 1)?;
    let chain = &run.chains[0];
    println!(
        "mean accuracy {:.4}, mean rules {:.1}",
        chain.mean_accuracy(),
        chain.mean_rule_count()
    );
    print!("{}", map_rules_text(chain)?);

    let summary = cmd_predict(
        &dir.join("out/chain.json"),
        &dir.join("train.csv"),
        &dir.join("pred"),
        10,
    )?;
    println!(
        "re-scored on the training rows: {:.4}",
        summary.mean_model_accuracy.unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
