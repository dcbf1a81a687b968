// Generate a demographic-style table with a planted rule and clean it.

use bayes_rough::prelude::*;

fn main() -> Result<()> {
    let spec = SynthSpec::demographic(2_000, 0.1, 21);
    let (table, truth) = generate(&spec)?;
    println!(
        "{} rows over {} attributes",
        table.len(),
        table.n_attributes()
    );
    println!(
        "planted cuts {}",
        serde_json::to_string(&truth.planted_cuts).unwrap()
    );
    println!(
        "{} occupied cells, Bayes accuracy {:.3}",
        truth.occupied_cells(),
        truth.bayes_accuracy
    );

    let positives = table.decisions().iter().filter(|d| **d == Some(1)).count();
    println!("{positives} positive decisions");

    let predicates = [
        ConsistencyPredicate::births_without_pregnancy("gravidity", "parity"),
        ConsistencyPredicate::parity_exceeds_gravidity("gravidity", "parity"),
    ];
    let (clean, report) = clean_table(&table, &predicates)?;
    println!(
        "{} rows survive cleaning: {:?}",
        clean.len(),
        report.per_predicate
    );

    let mut csv = Vec::new();
    clean.write_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
