//! Synthetic decision tables with a planted granule structure.
//!
//! Attribute values are uniform over their ranges. Each object's decision is
//! drawn from the probability attached to its planted granule cell and then
//! flipped with probability `noise`.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granulation::{GranuleSignature, Granulization};
use crate::seed;
use crate::table::{AttributeKind, AttributeSpec, InformationTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedCell {
    pub signature: GranuleSignature,
    /// Probability of decision 1 before noise.
    pub p_positive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub attributes: Vec<AttributeSpec>,
    pub planted_cuts: Vec<Vec<f64>>,
    pub rule: Vec<PlantedCell>,
    /// Used for cells missing from `rule`.
    #[serde(default = "half")]
    pub default_probability: f64,
    /// Label-flip probability, in `[0, 0.5)`.
    #[serde(default)]
    pub noise: f64,
    pub n_objects: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_decision_name")]
    pub decision_name: String,
}

fn half() -> f64 {
    0.5
}

fn default_decision_name() -> String {
    "decision".into()
}

impl SynthSpec {
    /// `n_attributes` attributes on `[0, 100]`, each split into `k` equal
    /// granules; a cell is positive when its granule indices sum to an odd
    /// number, so every planted cut separates cells of opposite label.
    pub fn checkerboard(
        n_attributes: usize,
        k: usize,
        noise: f64,
        n_objects: usize,
        seed: u64,
    ) -> Self {
        let attributes: Vec<AttributeSpec> = (0..n_attributes)
            .map(|i| AttributeSpec::numeric(format!("x{}", i + 1), 0.0, 100.0))
            .collect();
        let planted_cuts =
            vec![(1..k).map(|j| 100.0 * j as f64 / k as f64).collect(); n_attributes];
        let rule = all_cells(&vec![k; n_attributes])
            .into_iter()
            .map(|sig| {
                let odd = sig.0.iter().map(|&i| i as usize).sum::<usize>() % 2 == 1;
                PlantedCell {
                    signature: sig,
                    p_positive: if odd { 1.0 } else { 0.0 },
                }
            })
            .collect();
        SynthSpec {
            attributes,
            planted_cuts,
            rule,
            default_probability: 0.5,
            noise,
            n_objects,
            seed,
            decision_name: "decision".into(),
        }
    }

    /// Six attributes shaped like an antenatal survey record with a planted
    /// risk structure on four granules each.
    pub fn demographic(n_objects: usize, noise: f64, seed: u64) -> Self {
        let attributes = vec![
            AttributeSpec::categorical("race", 1.0, 4.0),
            AttributeSpec::numeric("mothers_age", 14.0, 50.0),
            AttributeSpec::categorical("education", 0.0, 13.0),
            AttributeSpec::categorical("gravidity", 1.0, 11.0),
            AttributeSpec::categorical("parity", 0.0, 10.0),
            AttributeSpec::numeric("fathers_age", 15.0, 70.0),
        ];
        let planted_cuts = vec![
            vec![1.5, 2.5, 3.5],
            vec![20.0, 27.0, 33.0],
            vec![4.5, 8.5, 11.5],
            vec![1.5, 2.5, 4.5],
            vec![0.5, 1.5, 3.5],
            vec![22.0, 30.0, 40.0],
        ];
        let rule = all_cells(&[4; 6])
            .into_iter()
            .map(|sig| {
                let (race, age, edu, _, parity, father) = (
                    sig.get(0),
                    sig.get(1),
                    sig.get(2),
                    sig.get(3),
                    sig.get(4),
                    sig.get(5),
                );
                let mut score = 0;
                score += usize::from(race == 0);
                score += usize::from((1..=2).contains(&age));
                score += usize::from(edu <= 1);
                score += usize::from(parity >= 2);
                score += usize::from(father <= 1);
                let p_positive = match score {
                    0 | 1 => 0.1,
                    2 => 0.3,
                    3 => 0.6,
                    _ => 0.9,
                };
                PlantedCell {
                    signature: sig,
                    p_positive,
                }
            })
            .collect();
        SynthSpec {
            attributes,
            planted_cuts,
            rule,
            default_probability: 0.5,
            noise,
            n_objects,
            seed,
            decision_name: "hiv".into(),
        }
    }

    pub fn planted_granulization(&self) -> Result<Granulization> {
        Granulization::from_cuts(&self.attributes, self.planted_cuts.clone())
    }

    pub fn validate(&self) -> Result<Granulization> {
        let g = self.planted_granulization()?;
        if !(0.0..0.5).contains(&self.noise) {
            return Err(Error::Config(format!(
                "noise {} outside [0, 0.5)",
                self.noise
            )));
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(self.default_probability) {
            return Err(Error::Config("default probability outside [0, 1]".into()));
        }
        for cell in &self.rule {
            if !prob_ok(cell.p_positive) {
                return Err(Error::Config(format!(
                    "cell {} has probability outside [0, 1]",
                    cell.signature
                )));
            }
            let fits = cell.signature.len() == g.n_attributes()
                && (0..g.n_attributes()).all(|a| cell.signature.get(a) < g.granules(a));
            if !fits {
                return Err(Error::Config(format!(
                    "cell {} does not fit the planted cuts",
                    cell.signature
                )));
            }
        }
        Ok(g)
    }
}

/// Every granule cell for the given per-attribute granule counts, in
/// lexicographic order.
pub fn all_cells(counts: &[usize]) -> Vec<GranuleSignature> {
    let mut cells = vec![Vec::<u16>::new()];
    for &k in counts {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                (0..k as u16).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    cells.into_iter().map(GranuleSignature).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellCount {
    pub signature: GranuleSignature,
    pub count: usize,
    pub positives: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub planted_cuts: serde_json::Map<String, serde_json::Value>,
    pub rule: Vec<PlantedCell>,
    pub default_probability: f64,
    pub noise: f64,
    /// Occupied cells with their realized object and positive counts.
    pub signature_counts: Vec<CellCount>,
    /// Expected accuracy of predicting each cell's likelier label, averaged
    /// over the generated objects.
    pub bayes_accuracy: f64,
    pub seed: u64,
}

impl GroundTruth {
    pub fn occupied_cells(&self) -> usize {
        self.signature_counts.len()
    }
}

fn draw_value<R: Rng + ?Sized>(attr: &AttributeSpec, rng: &mut R) -> f64 {
    match attr.kind {
        AttributeKind::Numeric => rng.random_range(attr.lo()..=attr.hi()),
        AttributeKind::Categorical => {
            let lo = attr.lo().ceil() as i64;
            let hi = attr.hi().floor() as i64;
            rng.random_range(lo..=hi) as f64
        }
    }
}

pub fn generate(spec: &SynthSpec) -> Result<(InformationTable, GroundTruth)> {
    let g = spec.validate()?;
    let probabilities: HashMap<&GranuleSignature, f64> = spec
        .rule
        .iter()
        .map(|c| (&c.signature, c.p_positive))
        .collect();
    let mut table = InformationTable::new(spec.attributes.clone(), spec.decision_name.clone())?;
    let mut rng = seed::rng(spec.seed, seed::stream::SYNTH);
    let mut counts: BTreeMap<GranuleSignature, (usize, usize)> = BTreeMap::new();
    let mut bayes = 0.0;

    for i in 0..spec.n_objects {
        let values: Vec<f64> = spec
            .attributes
            .iter()
            .map(|a| draw_value(a, &mut rng))
            .collect();
        let sig = g.signature_of(&values);
        let p = probabilities
            .get(&sig)
            .copied()
            .unwrap_or(spec.default_probability);
        let mut positive = rng.random::<f64>() < p;
        if rng.random::<f64>() < spec.noise {
            positive = !positive;
        }
        let observed = p * (1.0 - spec.noise) + (1.0 - p) * spec.noise;
        bayes += observed.max(1.0 - observed);
        let entry = counts.entry(sig).or_default();
        entry.0 += 1;
        entry.1 += usize::from(positive);
        table.push_row(
            (i + 1).to_string(),
            values.into_iter().map(Some).collect(),
            Some(u8::from(positive)),
        )?;
    }

    let truth = GroundTruth {
        planted_cuts: g.to_cut_map(),
        rule: spec.rule.clone(),
        default_probability: spec.default_probability,
        noise: spec.noise,
        signature_counts: counts
            .into_iter()
            .map(|(signature, (count, positives))| CellCount {
                signature,
                count,
                positives,
            })
            .collect(),
        bayes_accuracy: if spec.n_objects == 0 {
            1.0
        } else {
            bayes / spec.n_objects as f64
        },
        seed: spec.seed,
    };
    Ok((table, truth))
}
