//! Bayesian rough set classifiers.
//!
//! A rough set model is fixed by a granulization of the condition attributes
//! (per-attribute cut points). Discretizing a decision table through it yields
//! indiscernibility classes, and every class becomes one rule whose
//! plausibility is the fraction of its members with a positive decision.
//!
//! Models are scored by an unnormalized log posterior
//!
//! ```text
//! log P(M | D) = (A - 1) - lambda * N
//! ```
//!
//! where `A` is the predictive accuracy of the rules and `N` the number of
//! rules. A Metropolis chain over cut positions samples this posterior, and
//! predictions average the rule outputs of the retained models.
//!
//! ```no_run
//! use bayes_rough::prelude::*;
//!
//! let spec = SynthSpec::checkerboard(3, 3, 0.1, 2_000, 7);
//! let (table, _truth) = generate(&spec).unwrap();
//! let config = ChainConfig { burn_in: 100, retain: 100, ..ChainConfig::default() };
//! let chain = run_chain(&table, &GranuleCounts::uniform(3, 3), &config).unwrap();
//! let query = table.row_values(0).unwrap();
//! println!("mean plausibility {}", predict_mean(&chain, &query).unwrap());
//! ```

pub mod cli;
pub mod error;
pub mod granulation;
pub mod histogram;
pub mod posterior;
pub mod predictive;
pub mod roughcore;
pub mod sampler;
pub mod seed;
pub mod synth;
pub mod table;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::granulation::{
        discretize_value, granulate_table, perturb, random_granulization, GranularTable,
        GranuleCounts, GranuleSignature, Granulization,
    };
    pub use crate::posterior::{
        log_likelihood, log_posterior, log_prior, predictive_accuracy, AccuracySplit,
        PosteriorConfig, RoughModel,
    };
    pub use crate::predictive::{
        emit_report, predict_distribution, predict_mean, Histogram, PredictiveDistribution,
    };
    pub use crate::roughcore::{
        approximation_accuracy, classify, induce_rules, lower_approximation, partition_classes,
        rough_membership, upper_approximation, Approximation, EquivalenceClasses, Output, Rule,
        RuleSet,
    };
    pub use crate::sampler::{
        chain_diagnostics, metropolis_step, run_chain, Chain, ChainConfig, Diagnostics,
        RejectionMode,
    };
    pub use crate::synth::{generate, GroundTruth, SynthSpec};
    pub use crate::table::{
        clean_table, load_table, AttributeKind, AttributeSpec, CleanReport, ConsistencyPredicate,
        InformationTable, LoadOptions,
    };
}
