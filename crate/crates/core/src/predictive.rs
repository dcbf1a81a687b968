//! Posterior predictive outputs: per-query plausibility averages and
//! distributions over the retained models, and the report bundle.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use crate::histogram::Histogram;

use crate::error::{Error, Result};
use crate::roughcore::{classify, Output};
use crate::sampler::{chain_diagnostics, Chain};

/// Raw attribute values for one object to predict.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub id: String,
    pub values: Vec<f64>,
}

impl Query {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        Query {
            id: id.into(),
            values,
        }
    }
}

/// Output of every retained model for `query`, in chain order.
pub fn model_outputs(chain: &Chain, query: &[f64]) -> Result<Vec<Output>> {
    if chain.is_empty() {
        return Err(Error::Domain("chain has no retained models".into()));
    }
    if query.len() != chain.schema.len() {
        return Err(Error::Domain(format!(
            "query has {} values, schema has {} attributes",
            query.len(),
            chain.schema.len()
        )));
    }
    for (attr, &v) in chain.schema.iter().zip(query) {
        if !attr.contains(v) {
            return Err(Error::Domain(format!(
                "query value {v} for `{}` outside [{}, {}]",
                attr.name,
                attr.lo(),
                attr.hi()
            )));
        }
    }
    Ok(chain
        .retained
        .iter()
        .map(|m| classify(&m.rules, &m.granulization.signature_of(query)))
        .collect())
}

fn mean_of(outputs: &[Output]) -> f64 {
    outputs.iter().map(|o| o.value_or_zero()).sum::<f64>() / outputs.len() as f64
}

/// Average model output; models without a matching rule contribute 0.
pub fn predict_mean(chain: &Chain, query: &[f64]) -> Result<f64> {
    Ok(mean_of(&model_outputs(chain, query)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictiveDistribution {
    pub query_id: String,
    /// One entry per retained model; `None` where the model abstained.
    pub outputs: Vec<Option<f64>>,
    pub mean: f64,
    /// Fraction of models with a matching rule.
    pub coverage: f64,
    /// Over the non-abstaining outputs, on `[-1, 1]`.
    pub histogram: Histogram,
}

impl PredictiveDistribution {
    pub fn abstentions(&self) -> usize {
        self.outputs.iter().filter(|o| o.is_none()).count()
    }

    pub fn no_support(&self) -> bool {
        self.outputs.iter().all(Option::is_none)
    }
}

pub fn predict_distribution(
    chain: &Chain,
    query: &Query,
    bins: usize,
) -> Result<PredictiveDistribution> {
    let outputs = model_outputs(chain, &query.values)?;
    let matched: Vec<f64> = outputs
        .iter()
        .filter_map(|o| match o {
            Output::Plausibility(v) => Some(*v),
            Output::Abstain => None,
        })
        .collect();
    Ok(PredictiveDistribution {
        query_id: query.id.clone(),
        mean: mean_of(&outputs),
        coverage: matched.len() as f64 / outputs.len() as f64,
        histogram: Histogram::with_range(&matched, bins, -1.0, 1.0)?,
        outputs: outputs
            .iter()
            .map(|o| match o {
                Output::Plausibility(v) => Some(*v),
                Output::Abstain => None,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySummary {
    pub id: String,
    pub file: String,
    pub mean: f64,
    pub coverage: f64,
    pub no_support: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub map_index: usize,
    pub map_log_posterior: f64,
    pub map_rule_count: usize,
    pub map_accuracy: f64,
    pub retained: usize,
    pub mean_accuracy: f64,
    pub mean_rule_count: f64,
    pub acceptance_rate: f64,
    pub queries: Vec<QuerySummary>,
}

/// File-system safe form of a query id.
pub fn query_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("pred_{safe}.csv")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_prediction(dist: &PredictiveDistribution, path: &Path) -> Result<()> {
    dist.histogram.write_csv(create(path)?)
}

/// Writes `rules_map.txt`, `hist_rules.csv`, `hist_accuracy.csv`, one
/// `pred_<id>.csv` per query and `summary.json` into `dir`.
pub fn emit_report(
    chain: &Chain,
    queries: &[Query],
    dir: &Path,
    bins: usize,
) -> Result<ReportSummary> {
    let diagnostics = chain_diagnostics(chain, bins)?;
    let map_index = chain
        .map_index()
        .ok_or_else(|| Error::Domain("chain has no retained models".into()))?;
    let map = &chain.retained[map_index];
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let rules_path = dir.join("rules_map.txt");
    let text = format!(
        "MAP model: retained index {map_index}, log posterior {}, accuracy {}\n{}",
        map.log_posterior,
        map.accuracy,
        map.rules.render(&map.granulization, &chain.decision_name)
    );
    fs::write(&rules_path, text).map_err(|e| Error::io(&rules_path, e))?;

    diagnostics
        .rule_count_histogram
        .write_csv(create(&dir.join("hist_rules.csv"))?)?;
    diagnostics
        .accuracy_histogram
        .write_csv(create(&dir.join("hist_accuracy.csv"))?)?;

    let mut summaries = Vec::with_capacity(queries.len());
    for query in queries {
        let dist = predict_distribution(chain, query, bins)?;
        let file = query_file_name(&query.id);
        write_prediction(&dist, &dir.join(&file))?;
        summaries.push(QuerySummary {
            id: query.id.clone(),
            file,
            mean: dist.mean,
            coverage: dist.coverage,
            no_support: dist.no_support(),
        });
    }

    let summary = ReportSummary {
        map_index,
        map_log_posterior: map.log_posterior,
        map_rule_count: map.rule_count,
        map_accuracy: map.accuracy,
        retained: chain.len(),
        mean_accuracy: chain.mean_accuracy(),
        mean_rule_count: chain.mean_rule_count(),
        acceptance_rate: chain.acceptance_rate(),
        queries: summaries,
    };
    let summary_path = dir.join("summary.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
        .map_err(|e| Error::io(&summary_path, e))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granulation::GranuleSignature;
    use crate::granulation::{GranuleCounts, Granulization};
    use crate::posterior::RoughModel;
    use crate::roughcore::{Rule, RuleSet};
    use crate::sampler::{run_chain, ChainConfig};
    use crate::table::{AttributeSpec, InformationTable};

    fn schema() -> Vec<AttributeSpec> {
        vec![AttributeSpec::numeric("x", 0.0, 10.0)]
    }

    fn model(cut: f64, low_positives: usize, low_support: usize) -> RoughModel {
        let g = Granulization::from_cuts(&schema(), vec![vec![cut]]).unwrap();
        let rule = Rule {
            signature: GranuleSignature(vec![0]),
            decision: u8::from(2 * low_positives > low_support),
            plausibility: low_positives as f64 / low_support as f64,
            support: low_support,
            positives: low_positives,
            certainty: if low_positives == 0 || low_positives == low_support {
                crate::roughcore::Certainty::Certain
            } else {
                crate::roughcore::Certainty::Possible
            },
            tie: 2 * low_positives == low_support,
        };
        RoughModel {
            granulization: g,
            rules: RuleSet::from(vec![rule]),
            rule_count: 1,
            accuracy: 0.5,
            log_posterior: -0.5,
        }
    }

    fn chain_of(models: Vec<RoughModel>) -> Chain {
        let t = {
            let mut t = InformationTable::new(schema(), "d").unwrap();
            t.push_row("a", vec![Some(1.0)], Some(1)).unwrap();
            t
        };
        let mut chain = run_chain(
            &t,
            &GranuleCounts::uniform(1, 2),
            &ChainConfig {
                burn_in: 0,
                retain: 1,
                ..Default::default()
            },
        )
        .unwrap();
        chain.retained = models;
        chain
    }

    #[test]
    fn all_positive_models() {
        let chain = chain_of(vec![model(5.0, 3, 3), model(6.0, 2, 2)]);
        assert_eq!(predict_mean(&chain, &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn mean_of_third_and_one() {
        let chain = chain_of(vec![model(5.0, 1, 3), model(5.0, 4, 4)]);
        let mean = predict_mean(&chain, &[1.0]).unwrap();
        assert!((mean - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn abstentions_count_zero() {
        // the second model only has a rule for the low granule below 0.5
        let chain = chain_of(vec![model(5.0, 3, 3), model(0.5, 3, 3)]);
        let dist = predict_distribution(&chain, &Query::new("q", vec![1.0]), 4).unwrap();
        assert_eq!(dist.outputs, vec![Some(1.0), None]);
        assert_eq!(dist.mean, 0.5);
        assert_eq!(dist.coverage, 0.5);
        assert_eq!(dist.histogram.total(), 1);
        assert_eq!(dist.mean, predict_mean(&chain, &[1.0]).unwrap());
    }

    #[test]
    fn no_support() {
        let chain = chain_of(vec![model(0.5, 3, 3), model(0.7, 0, 3)]);
        let dist = predict_distribution(&chain, &Query::new("q", vec![9.0]), 4).unwrap();
        assert!(dist.no_support());
        assert_eq!((dist.coverage, dist.mean), (0.0, 0.0));
        assert_eq!(dist.histogram.total(), 0);
    }

    #[test]
    fn out_of_range_query() {
        let chain = chain_of(vec![model(5.0, 3, 3)]);
        assert!(matches!(
            predict_mean(&chain, &[11.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            predict_mean(&chain, &[1.0, 2.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn adding_positive_model_never_lowers_mean() {
        let mut models = vec![model(5.0, 1, 3), model(0.5, 3, 3), model(5.0, 0, 2)];
        let before = predict_mean(&chain_of(models.clone()), &[1.0]).unwrap();
        models.push(model(5.0, 2, 2));
        let after = predict_mean(&chain_of(models), &[1.0]).unwrap();
        assert!(after >= before);
    }

    #[test]
    fn file_names() {
        assert_eq!(query_file_name("12"), "pred_12.csv");
        assert_eq!(query_file_name("a/b c"), "pred_a_b_c.csv");
    }

    #[test]
    fn report_bundle() {
        let chain = chain_of(vec![model(5.0, 1, 3), model(5.0, 3, 3), model(4.0, 3, 3)]);
        let dir = tempfile::tempdir().unwrap();
        let queries = [Query::new("q1", vec![1.0]), Query::new("q2", vec![9.0])];
        let summary = emit_report(&chain, &queries, dir.path(), 5).unwrap();
        assert_eq!(summary.map_index, 0);
        for f in [
            "rules_map.txt",
            "hist_rules.csv",
            "hist_accuracy.csv",
            "pred_q1.csv",
            "pred_q2.csv",
            "summary.json",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let hist =
            Histogram::read_csv(File::open(dir.path().join("pred_q1.csv")).unwrap()).unwrap();
        assert_eq!(hist.total(), 3);
        let rules = fs::read_to_string(dir.path().join("rules_map.txt")).unwrap();
        assert!(rules.contains("Upper Approximation Rules"));
        assert!(rules.contains("plausibility = 0.33333"));
    }
}
