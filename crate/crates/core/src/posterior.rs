//! Bayesian scoring of rough set models.
//!
//! Normalizing constants never appear: the sampler only compares models, so
//! everything here is an unnormalized log density.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granulation::{granulate_table, GranularTable, Granulization};
use crate::roughcore::{classify, induce_rules, RuleSet};
use crate::seed;
use crate::table::{AttributeSpec, InformationTable};

pub const DEFAULT_LAMBDA: f64 = 0.001;

/// Fraction of objects the rules classify correctly.
///
/// An object is predicted positive when its rule output is strictly positive
/// and negative otherwise, so an evenly split class predicts 0. Objects whose
/// signature has no rule count as errors.
pub fn predictive_accuracy(rules: &RuleSet, gt: &GranularTable<'_>) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::Domain("accuracy of an empty table".into()));
    }
    let correct = gt
        .signatures()
        .iter()
        .zip(gt.decisions())
        .filter(|(sig, &d)| classify(rules, sig).predicted() == Some(d))
        .count();
    Ok(correct as f64 / gt.len() as f64)
}

/// `A - 1`.
pub fn log_likelihood(accuracy: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&accuracy) {
        return Err(Error::Domain(format!("accuracy {accuracy} outside [0, 1]")));
    }
    Ok(accuracy - 1.0)
}

/// `-lambda * N`.
pub fn log_prior(rule_count: usize, lambda: f64) -> f64 {
    -lambda * rule_count as f64
}

pub fn log_posterior(accuracy: f64, rule_count: usize, lambda: f64) -> Result<f64> {
    Ok(log_likelihood(accuracy)? + log_prior(rule_count, lambda))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccuracySplit {
    /// Rules are scored on the table they were induced from.
    #[default]
    Training,
    /// This fraction of objects is held out for scoring.
    Holdout(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorConfig {
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub accuracy_split: AccuracySplit,
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

impl Default for PosteriorConfig {
    fn default() -> Self {
        PosteriorConfig {
            lambda: DEFAULT_LAMBDA,
            accuracy_split: AccuracySplit::Training,
        }
    }
}

impl PosteriorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!(
                "lambda {} must be >= 0",
                self.lambda
            )));
        }
        if let AccuracySplit::Holdout(f) = self.accuracy_split {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!(
                    "holdout fraction {f} outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// One sampler state: a granulization, the rules it induces and its score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoughModel {
    pub granulization: Granulization,
    pub rules: RuleSet,
    pub rule_count: usize,
    pub accuracy: f64,
    pub log_posterior: f64,
}

/// Serialized form of a [`RoughModel`]; needs the schema to rebuild the granulization.
#[derive(Clone, Debug, Deserialize)]
pub struct RoughModelRecord {
    pub granulization: serde_json::Map<String, serde_json::Value>,
    pub rules: RuleSet,
    pub rule_count: usize,
    pub accuracy: f64,
    pub log_posterior: f64,
}

impl RoughModelRecord {
    pub fn into_model(self, schema: &[AttributeSpec]) -> Result<RoughModel> {
        let granulization = Granulization::from_cut_map(schema, &self.granulization)?;
        if self.rule_count != self.rules.len() {
            return Err(Error::Schema(format!(
                "rule count {} disagrees with {} stored rules",
                self.rule_count,
                self.rules.len()
            )));
        }
        Ok(RoughModel {
            granulization,
            rules: self.rules,
            rule_count: self.rule_count,
            accuracy: self.accuracy,
            log_posterior: self.log_posterior,
        })
    }
}

/// Scores granulizations against fixed data.
#[derive(Clone, Debug)]
pub struct ModelScorer {
    train: InformationTable,
    holdout: Option<InformationTable>,
    lambda: f64,
}

impl ModelScorer {
    /// Splits `table` according to the config; the holdout split is drawn from
    /// `seed` so it is reproducible.
    pub fn new(table: &InformationTable, config: &PosteriorConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        if table.is_empty() {
            return Err(Error::Domain(
                "cannot score models on an empty table".into(),
            ));
        }
        if !table.is_complete() {
            return Err(Error::Domain(
                "table has missing cells; clean it first".into(),
            ));
        }
        let (train, holdout) = match config.accuracy_split {
            AccuracySplit::Training => (table.clone(), None),
            AccuracySplit::Holdout(fraction) => {
                let mut order: Vec<usize> = (0..table.len()).collect();
                order.shuffle(&mut seed::rng(seed, seed::stream::HOLDOUT));
                let n_holdout = ((table.len() as f64) * fraction).round() as usize;
                if n_holdout == 0 || n_holdout == table.len() {
                    return Err(Error::Config(format!(
                        "holdout fraction {fraction} leaves an empty split of {} objects",
                        table.len()
                    )));
                }
                let (held, kept) = order.split_at(n_holdout);
                let (mut held, mut kept) = (held.to_vec(), kept.to_vec());
                held.sort_unstable();
                kept.sort_unstable();
                (table.select(&kept), Some(table.select(&held)))
            }
        };
        Ok(ModelScorer {
            train,
            holdout,
            lambda: config.lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn train(&self) -> &InformationTable {
        &self.train
    }

    pub fn holdout(&self) -> Option<&InformationTable> {
        self.holdout.as_ref()
    }

    pub fn score(&self, g: &Granulization) -> Result<RoughModel> {
        let train = granulate_table(&self.train, g)?;
        let rules = induce_rules(&train)?;
        let accuracy = match &self.holdout {
            None => predictive_accuracy(&rules, &train)?,
            Some(held) => predictive_accuracy(&rules, &granulate_table(held, g)?)?,
        };
        let rule_count = rules.len();
        Ok(RoughModel {
            granulization: g.clone(),
            log_posterior: log_posterior(accuracy, rule_count, self.lambda)?,
            rules,
            rule_count,
            accuracy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roughcore::RuleSet;
    use crate::seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn one_attr(rows: &[(f64, u8)]) -> InformationTable {
        let mut t =
            InformationTable::new(vec![AttributeSpec::numeric("x", 0.0, 10.0)], "d").unwrap();
        for (i, &(x, d)) in rows.iter().enumerate() {
            t.push_row(i.to_string(), vec![Some(x)], Some(d)).unwrap();
        }
        t
    }

    fn cuts(c: &[f64]) -> Granulization {
        Granulization::from_cuts(&[AttributeSpec::numeric("x", 0.0, 10.0)], vec![c.to_vec()])
            .unwrap()
    }

    #[test]
    fn accuracy_consistent_table() {
        let t = one_attr(&[(1.0, 1), (2.0, 1), (6.0, 0), (9.0, 0)]);
        let gt = granulate_table(&t, &cuts(&[5.0])).unwrap();
        let rules = induce_rules(&gt).unwrap();
        assert_eq!(predictive_accuracy(&rules, &gt).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_inconsistent_pair() {
        let t = one_attr(&[(1.0, 1), (2.0, 0)]);
        let gt = granulate_table(&t, &cuts(&[5.0])).unwrap();
        let rules = induce_rules(&gt).unwrap();
        assert_eq!(predictive_accuracy(&rules, &gt).unwrap(), 0.5);
    }

    #[test]
    fn accuracy_all_abstain() {
        let train = one_attr(&[(1.0, 1), (2.0, 0)]);
        let test = one_attr(&[(7.0, 1), (8.0, 0)]);
        let g = cuts(&[5.0]);
        let rules = induce_rules(&granulate_table(&train, &g).unwrap()).unwrap();
        assert_eq!(
            predictive_accuracy(&rules, &granulate_table(&test, &g).unwrap()).unwrap(),
            0.0
        );
        let empty = one_attr(&[]);
        assert!(
            predictive_accuracy(&RuleSet::default(), &granulate_table(&empty, &g).unwrap())
                .is_err()
        );
    }

    #[test]
    fn likelihood_prior_posterior_values() {
        assert_eq!(log_likelihood(1.0).unwrap(), 0.0);
        assert_eq!(log_likelihood(0.0).unwrap(), -1.0);
        assert!((log_likelihood(0.58).unwrap() + 0.42).abs() < 1e-15);
        assert!(log_likelihood(1.01).is_err());
        assert!(log_likelihood(f64::NAN).is_err());
        assert_eq!(log_prior(0, 0.5), 0.0);
        assert_eq!(log_prior(1000, 0.0), 0.0);
        assert!((log_prior(222, 0.001) + 0.222).abs() < 1e-15);
        assert_eq!(log_posterior(1.0, 0, 0.001).unwrap(), 0.0);
        assert!((log_posterior(0.58, 222, 0.001).unwrap() + 0.642).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn posterior_is_sum(a in 0.0f64..=1.0, n in 0usize..5000, lambda in 0.0f64..1.0) {
            let lp = log_posterior(a, n, lambda).unwrap();
            prop_assert_eq!(lp, log_likelihood(a).unwrap() + log_prior(n, lambda));
            prop_assert!((lp - ((a - 1.0) - lambda * n as f64)).abs() <= 4.0 * f64::EPSILON * (1.0 + lambda * n as f64));
        }
    }

    #[test]
    fn config_validation() {
        assert!(PosteriorConfig {
            lambda: -0.1,
            ..Default::default()
        }
        .validate()
        .is_err());
        let holdout = |f| PosteriorConfig {
            accuracy_split: AccuracySplit::Holdout(f),
            ..Default::default()
        };
        assert!(holdout(0.0).validate().is_err());
        assert!(holdout(1.0).validate().is_err());
        assert!(holdout(0.25).validate().is_ok());
        let json: PosteriorConfig =
            serde_json::from_str(r#"{"accuracy_split": {"holdout": 0.2}}"#).unwrap();
        assert_eq!(json, holdout(0.2));
        let json: PosteriorConfig = serde_json::from_str(r#"{"lambda": 0.01}"#).unwrap();
        assert_eq!(json.accuracy_split, AccuracySplit::Training);
    }

    #[test]
    fn scorer_holdout_split() {
        let mut rng = seed::rng(1, 1);
        let rows: Vec<(f64, u8)> = (0..40)
            .map(|_| (rng.random_range(0.0..10.0), rng.random_range(0..2)))
            .collect();
        let t = one_attr(&rows);
        let config = PosteriorConfig {
            accuracy_split: AccuracySplit::Holdout(0.25),
            ..Default::default()
        };
        let a = ModelScorer::new(&t, &config, 3).unwrap();
        let b = ModelScorer::new(&t, &config, 3).unwrap();
        assert_eq!(a.train().len(), 30);
        assert_eq!(a.holdout().unwrap().len(), 10);
        assert_eq!(a.train(), b.train());
        let m = a.score(&cuts(&[5.0])).unwrap();
        assert_eq!(m.rule_count, m.rules.len());
        assert_eq!(
            m.log_posterior,
            log_posterior(m.accuracy, m.rule_count, config.lambda).unwrap()
        );
    }

    #[test]
    fn scorer_refuses_empty() {
        assert!(matches!(
            ModelScorer::new(&one_attr(&[]), &PosteriorConfig::default(), 0),
            Err(Error::Domain(_))
        ));
    }
}
