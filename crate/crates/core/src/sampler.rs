//! Metropolis sampling over granulizations.
//!
//! Each step perturbs the current cut points, re-induces the rules, scores the
//! resulting model and accepts it with probability
//! `min(1, exp(log_post(proposal) - log_post(current)))`.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granulation::{
    perturb_with_budget, random_granulization, GranuleCounts, Granulization, DEFAULT_RETRY_BUDGET,
};
use crate::histogram::Histogram;
use crate::posterior::{ModelScorer, PosteriorConfig, RoughModel, RoughModelRecord};
use crate::seed;
use crate::table::{AttributeSpec, InformationTable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RejectionMode {
    /// A rejected proposal re-emits the current state.
    #[default]
    Standard,
    /// A rejected proposal emits nothing; a fresh proposal is drawn from the
    /// current state. The stationary distribution is then not the posterior
    /// in general.
    Regenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    /// Emitted states discarded before retention starts.
    pub burn_in: usize,
    pub retain: usize,
    /// Standard deviation of a cut move, as a fraction of the attribute range.
    pub step_fraction: f64,
    #[serde(flatten)]
    pub posterior: PosteriorConfig,
    pub seed: u64,
    pub rejection_mode: RejectionMode,
    pub retry_budget: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn_in: 500,
            retain: 500,
            step_fraction: 0.05,
            posterior: PosteriorConfig::default(),
            seed: 0,
            rejection_mode: RejectionMode::Standard,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.retain < 1 {
            return Err(Error::Config("retain must be at least 1".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "step fraction {} outside (0, 1]",
                self.step_fraction
            )));
        }
        if self.retry_budget < 1 {
            return Err(Error::Config("retry budget must be at least 1".into()));
        }
        self.posterior.validate()
    }

    pub fn lambda(&self) -> f64 {
        self.posterior.lambda
    }
}

/// A symmetric proposal kernel over granulizations.
///
/// `Err(Error::Proposal(_))` means no proposal could be produced; the sampler
/// counts it as a rejection.
pub trait Proposal {
    fn propose(&self, current: &Granulization, rng: &mut seed::Rng) -> Result<Granulization>;
}

/// Gaussian move of a single cut (see [`crate::granulation::perturb`]).
#[derive(Clone, Copy, Debug)]
pub struct GaussianCutProposal {
    pub step_fraction: f64,
    pub retry_budget: usize,
}

impl Proposal for GaussianCutProposal {
    fn propose(&self, current: &Granulization, rng: &mut seed::Rng) -> Result<Granulization> {
        perturb_with_budget(current, self.step_fraction, self.retry_budget, rng)
    }
}

/// Moves one cut to a uniformly chosen point of a fixed per-attribute grid,
/// which makes the state space finite.
#[derive(Clone, Debug)]
pub struct GridProposal {
    pub schema: Vec<AttributeSpec>,
    pub grids: Vec<Vec<f64>>,
}

impl Proposal for GridProposal {
    fn propose(&self, current: &Granulization, rng: &mut seed::Rng) -> Result<Granulization> {
        let a = rng.random_range(0..current.n_attributes());
        let j = rng.random_range(0..current.cuts(a).len());
        let point = self.grids[a][rng.random_range(0..self.grids[a].len())];
        let mut cuts: Vec<Vec<f64>> = (0..current.n_attributes())
            .map(|i| current.cuts(i).to_vec())
            .collect();
        if point != cuts[a][j] && cuts[a].contains(&point) {
            return Err(Error::Proposal("grid point already holds a cut".into()));
        }
        cuts[a][j] = point;
        cuts[a].sort_by(f64::total_cmp);
        Granulization::from_cuts(&self.schema, cuts).map_err(|e| Error::Proposal(e.to_string()))
    }
}

/// Metropolis test in log space for a uniform draw `xi` in (0, 1).
///
/// Improvements are always accepted; otherwise the proposal is accepted when
/// the posterior ratio exceeds `xi`.
pub fn accept(delta_log_posterior: f64, xi: f64) -> bool {
    delta_log_posterior > 0.0 || delta_log_posterior > xi.ln()
}

fn draw_xi<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let xi: f64 = rng.random();
        if xi > 0.0 {
            return xi;
        }
    }
}

fn metropolis_accepts<R: Rng + ?Sized>(current: f64, proposal: f64, rng: &mut R) -> bool {
    let delta = proposal - current;
    delta > 0.0 || accept(delta, draw_xi(rng))
}

/// One Metropolis decision. On rejection the current model is returned again.
pub fn metropolis_step<R: Rng + ?Sized>(
    current: &RoughModel,
    proposal: RoughModel,
    rng: &mut R,
) -> (RoughModel, bool) {
    if metropolis_accepts(current.log_posterior, proposal.log_posterior, rng) {
        (proposal, true)
    } else {
        (current.clone(), false)
    }
}

/// Retained models plus the bookkeeping needed to reproduce and diagnose a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub schema: Vec<AttributeSpec>,
    pub decision_name: String,
    pub granule_counts: GranuleCounts,
    pub config: ChainConfig,
    pub proposals: u64,
    pub accepted: u64,
    /// Proposals that could not be generated (counted as rejections).
    pub proposal_failures: u64,
    pub retained: Vec<RoughModel>,
    /// 1-based emission index of each retained model.
    #[serde(skip)]
    pub emitted_index: Vec<usize>,
}

#[derive(Debug, Deserialize)]
pub struct ChainRecord {
    pub schema: Vec<AttributeSpec>,
    pub decision_name: String,
    pub granule_counts: GranuleCounts,
    pub config: ChainConfig,
    pub proposals: u64,
    pub accepted: u64,
    pub proposal_failures: u64,
    pub retained: Vec<RoughModelRecord>,
}

impl ChainRecord {
    pub fn into_chain(self) -> Result<Chain> {
        let retained = self
            .retained
            .into_iter()
            .map(|m| m.into_model(&self.schema))
            .collect::<Result<Vec<_>>>()?;
        if retained.is_empty() {
            return Err(Error::Domain("chain file holds no retained models".into()));
        }
        let burn_in = self.config.burn_in;
        Ok(Chain {
            emitted_index: (1..=retained.len()).map(|i| burn_in + i).collect(),
            schema: self.schema,
            decision_name: self.decision_name,
            granule_counts: self.granule_counts,
            config: self.config,
            proposals: self.proposals,
            accepted: self.accepted,
            proposal_failures: self.proposal_failures,
            retained,
        })
    }
}

impl Chain {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }

    pub fn mean_accuracy(&self) -> f64 {
        self.retained.iter().map(|m| m.accuracy).sum::<f64>() / self.retained.len() as f64
    }

    pub fn mean_rule_count(&self) -> f64 {
        self.retained
            .iter()
            .map(|m| m.rule_count as f64)
            .sum::<f64>()
            / self.retained.len() as f64
    }

    /// Index of the retained model with the highest log posterior; ties go to the earliest.
    pub fn map_index(&self) -> Option<usize> {
        self.retained
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, m)| match best {
                Some((_, lp)) if lp >= m.log_posterior => best,
                _ => Some((i, m.log_posterior)),
            })
            .map(|(i, _)| i)
    }

    pub fn map_model(&self) -> Option<&RoughModel> {
        self.map_index().map(|i| &self.retained[i])
    }

    pub fn trace_header(&self) -> Vec<String> {
        let mut header = self
            .retained
            .first()
            .map(|m| m.granulization.column_names())
            .unwrap_or_default();
        header.extend(["accuracy", "n_rules", "log_posterior"].map(String::from));
        header
    }

    /// One CSV row per retained model: flattened cuts, accuracy, rule count, log posterior.
    pub fn write_trace<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(self.trace_header())?;
        for m in &self.retained {
            let mut row: Vec<String> = m
                .granulization
                .flattened()
                .iter()
                .map(f64::to_string)
                .collect();
            row.push(m.accuracy.to_string());
            row.push(m.rule_count.to_string());
            row.push(m.log_posterior.to_string());
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| Error::io("<trace writer>", e))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Chain> {
        serde_json::from_str::<ChainRecord>(text)?.into_chain()
    }
}

/// Runs a chain from a uniformly random granulization with the Gaussian cut kernel.
pub fn run_chain(
    table: &InformationTable,
    counts: &GranuleCounts,
    config: &ChainConfig,
) -> Result<Chain> {
    config.validate()?;
    counts.validate(table.schema())?;
    let initial = random_granulization(
        table.schema(),
        counts,
        &mut seed::rng(config.seed, seed::stream::INIT),
    )?;
    let proposal = GaussianCutProposal {
        step_fraction: config.step_fraction,
        retry_budget: config.retry_budget,
    };
    run_chain_from(table, initial, config, &proposal)
}

/// Proposal attempts allowed per emitted state before a chain in
/// [`RejectionMode::Regenerate`] is declared stuck.
const MAX_PROPOSALS_PER_STATE: u64 = 10_000;

pub fn run_chain_from<P: Proposal + ?Sized>(
    table: &InformationTable,
    initial: Granulization,
    config: &ChainConfig,
    proposal: &P,
) -> Result<Chain> {
    config.validate()?;
    if table.is_empty() {
        return Err(Error::Domain("cannot run a chain on an empty table".into()));
    }
    if !initial.covers(table.schema()) {
        return Err(Error::Schema(
            "initial granulization does not match the table".into(),
        ));
    }
    let scorer = ModelScorer::new(table, &config.posterior, config.seed)?;
    let mut rng = seed::rng(config.seed, seed::stream::CHAIN);

    let total = config.burn_in + config.retain;
    let max_proposals = MAX_PROPOSALS_PER_STATE.saturating_mul(total as u64);
    let mut current = scorer.score(&initial)?;
    let mut chain = Chain {
        schema: table.schema().to_vec(),
        decision_name: table.decision_name().to_string(),
        granule_counts: initial.granule_counts(),
        config: config.clone(),
        proposals: 0,
        accepted: 0,
        proposal_failures: 0,
        retained: Vec::with_capacity(config.retain),
        emitted_index: Vec::with_capacity(config.retain),
    };
    let mut emitted = 0usize;
    while emitted < total {
        if chain.proposals >= max_proposals {
            return Err(Error::Domain(format!(
                "chain stalled after {} proposals with {emitted} states emitted",
                chain.proposals
            )));
        }
        chain.proposals += 1;
        let accepted = match proposal.propose(&current.granulization, &mut rng) {
            Ok(g) => {
                let candidate = scorer.score(&g)?;
                if metropolis_accepts(current.log_posterior, candidate.log_posterior, &mut rng) {
                    current = candidate;
                    true
                } else {
                    false
                }
            }
            Err(Error::Proposal(msg)) => {
                log::debug!("proposal {} failed: {msg}", chain.proposals);
                chain.proposal_failures += 1;
                false
            }
            Err(e) => return Err(e),
        };
        if accepted {
            chain.accepted += 1;
        } else if config.rejection_mode == RejectionMode::Regenerate {
            continue;
        }
        emitted += 1;
        if emitted > config.burn_in {
            chain.retained.push(current.clone());
            chain.emitted_index.push(emitted);
        }
    }
    Ok(chain)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Summary {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary {
            mean,
            std_dev: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub acceptance_rate: f64,
    pub proposals: u64,
    pub proposal_failures: u64,
    pub retained: usize,
    pub rule_count: Summary,
    pub accuracy: Summary,
    pub log_posterior: Summary,
    pub rule_count_histogram: Histogram,
    pub accuracy_histogram: Histogram,
}

pub fn chain_diagnostics(chain: &Chain, bins: usize) -> Result<Diagnostics> {
    if bins < 1 {
        return Err(Error::Domain("histograms need at least one bin".into()));
    }
    if chain.is_empty() {
        return Err(Error::Domain("chain has no retained models".into()));
    }
    let rules: Vec<f64> = chain.retained.iter().map(|m| m.rule_count as f64).collect();
    let accuracy: Vec<f64> = chain.retained.iter().map(|m| m.accuracy).collect();
    let log_post: Vec<f64> = chain.retained.iter().map(|m| m.log_posterior).collect();
    Ok(Diagnostics {
        acceptance_rate: chain.acceptance_rate(),
        proposals: chain.proposals,
        proposal_failures: chain.proposal_failures,
        retained: chain.len(),
        rule_count: Summary::of(&rules),
        accuracy: Summary::of(&accuracy),
        log_posterior: Summary::of(&log_post),
        rule_count_histogram: Histogram::from_values(&rules, bins)?,
        accuracy_histogram: Histogram::from_values(&accuracy, bins)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::log_posterior;
    use crate::seed;

    fn step_table() -> InformationTable {
        let mut t =
            InformationTable::new(vec![AttributeSpec::numeric("x", 0.0, 10.0)], "d").unwrap();
        for i in 0..40 {
            let x = i as f64 / 4.0 + 0.1;
            t.push_row(i.to_string(), vec![Some(x)], Some(u8::from(x > 6.0)))
                .unwrap();
        }
        t
    }

    fn model(lp: f64) -> RoughModel {
        let g = Granulization::from_cuts(&[AttributeSpec::numeric("x", 0.0, 1.0)], vec![vec![0.5]])
            .unwrap();
        RoughModel {
            granulization: g,
            rules: Default::default(),
            rule_count: 0,
            accuracy: 1.0 + lp,
            log_posterior: lp,
        }
    }

    #[test]
    fn acceptance_examples() {
        assert!(accept(0.1, 0.999_999));
        assert!(accept(0.5f64.ln(), 0.3));
        assert!(!accept(0.5f64.ln(), 0.7));
        assert!(accept(0.0, 0.999_999));
    }

    #[test]
    fn step_improvement_always_accepted() {
        let mut rng = seed::rng(0, 0);
        for _ in 0..1000 {
            let (next, ok) = metropolis_step(&model(-0.5), model(-0.4), &mut rng);
            assert!(ok);
            assert_eq!(next.log_posterior, -0.4);
        }
    }

    #[test]
    fn step_rejection_returns_current() {
        let mut rng = seed::rng(1, 0);
        let mut rejected = 0;
        for _ in 0..10_000 {
            let (next, ok) = metropolis_step(&model(-0.2), model(-0.2 + 0.5f64.ln()), &mut rng);
            if !ok {
                rejected += 1;
                assert_eq!(next.log_posterior, -0.2);
            }
        }
        // acceptance probability 0.5
        assert!((4_700..=5_300).contains(&rejected), "{rejected}");
    }

    #[test]
    fn retain_counts_and_bookkeeping() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 7,
            retain: 13,
            seed: 3,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 3), &config).unwrap();
        assert_eq!(chain.len(), 13);
        assert_eq!(chain.emitted_index, (8..=20).collect::<Vec<_>>());
        assert_eq!(chain.proposals, 20);
        assert!(chain.accepted <= chain.proposals);
        for m in &chain.retained {
            assert_eq!(m.rule_count, m.rules.len());
            assert_eq!(
                m.log_posterior,
                log_posterior(m.accuracy, m.rule_count, config.lambda()).unwrap()
            );
        }
    }

    #[test]
    fn single_step_chain() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 0,
            retain: 1,
            seed: 5,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 2), &config).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain.proposals, 1);
    }

    #[test]
    fn regenerate_mode_emits_only_accepted() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 10,
            retain: 50,
            seed: 8,
            posterior: PosteriorConfig {
                lambda: 0.05,
                ..Default::default()
            },
            rejection_mode: RejectionMode::Regenerate,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 3), &config).unwrap();
        assert_eq!(chain.len(), 50);
        assert_eq!(chain.accepted, 60);
        assert!(chain.proposals >= 60);
    }

    #[test]
    fn seeded_runs_identical() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 20,
            retain: 30,
            seed: 99,
            ..Default::default()
        };
        let a = run_chain(&t, &GranuleCounts::uniform(1, 4), &config).unwrap();
        let b = run_chain(&t, &GranuleCounts::uniform(1, 4), &config).unwrap();
        assert_eq!(a, b);
        let (mut ta, mut tb) = (Vec::new(), Vec::new());
        a.write_trace(&mut ta).unwrap();
        b.write_trace(&mut tb).unwrap();
        assert_eq!(ta, tb);
    }

    #[test]
    fn empty_table_refused() {
        let t = InformationTable::new(vec![AttributeSpec::numeric("x", 0.0, 1.0)], "d").unwrap();
        assert!(matches!(
            run_chain(&t, &GranuleCounts::uniform(1, 2), &ChainConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn invalid_config() {
        let t = step_table();
        let counts = GranuleCounts::uniform(1, 2);
        for bad in [
            ChainConfig {
                retain: 0,
                ..Default::default()
            },
            ChainConfig {
                step_fraction: 0.0,
                ..Default::default()
            },
            ChainConfig {
                step_fraction: 1.5,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                run_chain(&t, &counts, &bad),
                Err(Error::Config(_))
            ));
        }
    }

    #[test]
    fn trace_and_json_round_trip() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 5,
            retain: 8,
            seed: 1,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 3), &config).unwrap();
        let mut buf = Vec::new();
        chain.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "x_cut1,x_cut2,accuracy,n_rules,log_posterior"
        );
        assert_eq!(lines.count(), 8);
        let back = Chain::from_json(&serde_json::to_string(&chain).unwrap()).unwrap();
        assert_eq!(back, chain);
    }

    #[test]
    fn map_ties_go_to_earliest() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 0,
            retain: 30,
            seed: 2,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 3), &config).unwrap();
        let best = chain
            .retained
            .iter()
            .map(|m| m.log_posterior)
            .fold(f64::NEG_INFINITY, f64::max);
        let first = chain
            .retained
            .iter()
            .position(|m| m.log_posterior == best)
            .unwrap();
        assert_eq!(chain.map_index(), Some(first));
    }

    #[test]
    fn diagnostics_conserve_mass() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 10,
            retain: 40,
            seed: 4,
            ..Default::default()
        };
        let chain = run_chain(&t, &GranuleCounts::uniform(1, 4), &config).unwrap();
        let d = chain_diagnostics(&chain, 6).unwrap();
        assert_eq!(d.rule_count_histogram.total(), 40);
        assert_eq!(d.accuracy_histogram.total(), 40);
        assert!((0.0..=1.0).contains(&d.acceptance_rate));
        assert!(chain_diagnostics(&chain, 0).is_err());
    }

    #[test]
    fn identical_models_single_bin() {
        let t = step_table();
        let config = ChainConfig {
            burn_in: 0,
            retain: 5,
            seed: 4,
            ..Default::default()
        };
        let mut chain = run_chain(&t, &GranuleCounts::uniform(1, 4), &config).unwrap();
        let first = chain.retained[0].clone();
        chain.retained.iter_mut().for_each(|m| *m = first.clone());
        let d = chain_diagnostics(&chain, 10).unwrap();
        assert_eq!(d.rule_count_histogram.bins(), 1);
        assert_eq!(d.accuracy_histogram.bins(), 1);
    }
}
