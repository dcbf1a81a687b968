// Sample rough set models with the Metropolis chain and inspect diagnostics.

use bayes_rough::prelude::*;

fn main() -> Result<()> {
    let (table, _) = generate(&SynthSpec::checkerboard(2, 3, 0.1, 500, 1))?;
    let config = ChainConfig {
        burn_in: 100,
        retain: 200,
        seed: 42,
        ..ChainConfig::default()
    };
    let chain = run_chain(&table, &GranuleCounts::uniform(2, 3), &config)?;
    let d = chain_diagnostics(&chain, 10)?;
    println!(
        "{} proposals, acceptance {:.3}, {} retained",
        d.proposals, d.acceptance_rate, d.retained
    );
    println!(
        "accuracy mean {:.3} sd {:.3}",
        d.accuracy.mean, d.accuracy.std_dev
    );
    println!(
        "rule count mean {:.1} range {}..{}",
        d.rule_count.mean, d.rule_count.min, d.rule_count.max
    );

    let mut trace = Vec::new();
    chain.write_trace(&mut trace)?;
    for line in String::from_utf8_lossy(&trace).lines().take(4) {
        println!("{line}");
    }

    let regenerate = ChainConfig {
        rejection_mode: RejectionMode::Regenerate,
        ..config
    };
    let chain = run_chain(&table, &GranuleCounts::uniform(2, 3), &regenerate)?;
    println!(
        "regenerate mode: {} proposals for {} emitted states",
        chain.proposals,
        chain.config.burn_in + chain.len()
    );
    Ok(())
}
