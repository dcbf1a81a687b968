// Write the report bundle and print the rules of the highest-posterior model.

use bayes_rough::predictive::Query;
use bayes_rough::prelude::*;

fn main() -> Result<()> {
    let (table, _) = generate(&SynthSpec::demographic(300, 0.1, 4))?;
    let config = ChainConfig {
        burn_in: 50,
        retain: 100,
        ..ChainConfig::default()
    };
    let chain = run_chain(&table, &GranuleCounts::uniform(6, 2), &config)?;

    let dir = std::env::temp_dir().join(format!("bayes-rough-report-{}", std::process::id()));
    let queries = vec![Query::new("first", table.row_values(0).unwrap())];
    let summary = emit_report(&chain, &queries, &dir, 10)?;
    println!("report in {}", dir.display());
    println!(
        "MAP model {} of {}: {} rules, accuracy {:.3}",
        summary.map_index, summary.retained, summary.map_rule_count, summary.map_accuracy
    );
    let rules = std::fs::read_to_string(dir.join("rules_map.txt")).unwrap();
    for line in rules.lines().take(12) {
        println!("{line}");
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
