// Load a decision table from CSV, then drop incomplete and inconsistent rows.

use bayes_rough::prelude::*;

const SURVEY: &str = "\
race,mothers_age,education,gravidity,parity,fathers_age,hiv
1,32,1,1,2,34,0
2,27,13,2,1,28,1
2,25,8,2,0,23,1
3,27,4,3,1,22,0
1,19,?,1,0,21,0
4,31,10,0,2,35,1
";

fn main() -> Result<()> {
    let schema = vec![
        AttributeSpec::categorical("race", 1.0, 4.0),
        AttributeSpec::numeric("mothers_age", 14.0, 50.0),
        AttributeSpec::categorical("education", 0.0, 13.0),
        AttributeSpec::categorical("gravidity", 0.0, 12.0),
        AttributeSpec::categorical("parity", 0.0, 12.0),
        AttributeSpec::numeric("fathers_age", 14.0, 70.0),
    ];
    let mut options = LoadOptions::new("hiv");
    options.missing_token = Some("?".into());
    let raw = load_table(SURVEY.as_bytes(), &schema, &options)?;
    println!("loaded {} rows, complete: {}", raw.len(), raw.is_complete());

    let predicates = [
        ConsistencyPredicate::births_without_pregnancy("gravidity", "parity"),
        ConsistencyPredicate::parity_exceeds_gravidity("gravidity", "parity"),
    ];
    let (clean, report) = clean_table(&raw, &predicates)?;
    println!(
        "removed {} missing and {} inconsistent, {} remain",
        report.removed_missing, report.removed_inconsistent, report.remaining
    );
    for (name, n) in &report.per_predicate {
        println!("  {name}: {n}");
    }
    for i in 0..clean.len() {
        println!(
            "{} {:?} -> {:?}",
            clean.object_ids()[i],
            clean.row_values(i).unwrap(),
            clean.decision(i)
        );
    }
    Ok(())
}
