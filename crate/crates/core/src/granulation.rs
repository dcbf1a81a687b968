//! The granule space: per-attribute cut points and discretization through them.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::table::{AttributeSpec, InformationTable};

/// Minimum gap between adjacent cuts, as a fraction of the attribute's range width.
pub const MIN_SEPARATION: f64 = 1e-6;
pub const DEFAULT_GRANULES: usize = 4;
pub const DEFAULT_RETRY_BUDGET: usize = 100;

/// Index of the granule holding `value`.
///
/// Granule `i` is the half-open interval `[cuts[i-1], cuts[i])`; values below
/// the first cut fall in granule 0 and values at or above the last cut fall in
/// the top granule.
pub fn discretize_value(value: f64, cuts: &[f64]) -> usize {
    cuts.partition_point(|&c| c <= value)
}

/// Human-readable name of granule `index` out of `k`.
pub fn granule_label(index: usize, k: usize) -> String {
    let names: &[&str] = match k {
        2 => &["Low", "High"],
        3 => &["Low", "Med", "High"],
        4 => &["Low", "Med", "High", "Very High"],
        5 => &["Very Low", "Low", "Med", "High", "Very High"],
        _ => &[],
    };
    names
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("Level {}", index + 1))
}

/// Number of granules per attribute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GranuleCounts(Vec<usize>);

impl GranuleCounts {
    pub fn uniform(n_attributes: usize, k: usize) -> Self {
        GranuleCounts(vec![k; n_attributes])
    }

    pub fn per_attribute(counts: Vec<usize>) -> Self {
        GranuleCounts(counts)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn validate(&self, schema: &[AttributeSpec]) -> Result<()> {
        if self.0.len() != schema.len() {
            return Err(Error::Config(format!(
                "{} granule counts for {} attributes",
                self.0.len(),
                schema.len()
            )));
        }
        for (attr, &k) in schema.iter().zip(&self.0) {
            if k < 2 {
                return Err(Error::Config(format!(
                    "attribute `{}` needs at least 2 granules, got {k}",
                    attr.name
                )));
            }
            if k > u16::MAX as usize || (k as f64) * MIN_SEPARATION >= 1.0 {
                return Err(Error::Config(format!(
                    "range of `{}` cannot host {} cuts at the minimum separation",
                    attr.name,
                    k - 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Axis {
    name: String,
    lo: f64,
    hi: f64,
    cuts: Vec<f64>,
}

impl Axis {
    fn min_gap(&self) -> f64 {
        MIN_SEPARATION * (self.hi - self.lo)
    }

    fn check(&self) -> std::result::Result<(), String> {
        let delta = self.min_gap();
        for &c in &self.cuts {
            if !(c.is_finite() && c > self.lo && c < self.hi) {
                return Err(format!(
                    "cut {c} of `{}` is not strictly inside [{}, {}]",
                    self.name, self.lo, self.hi
                ));
            }
        }
        for pair in self.cuts.windows(2) {
            if pair[1] - pair[0] < delta {
                return Err(format!(
                    "cuts {} and {} of `{}` are closer than {delta}",
                    pair[0], pair[1], self.name
                ));
            }
        }
        Ok(())
    }
}

/// Ordered cut points for every condition attribute: one state of the sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct Granulization {
    axes: Vec<Axis>,
}

impl Granulization {
    pub fn from_cuts(schema: &[AttributeSpec], cuts: Vec<Vec<f64>>) -> Result<Self> {
        if cuts.len() != schema.len() {
            return Err(Error::Schema(format!(
                "{} cut vectors for {} attributes",
                cuts.len(),
                schema.len()
            )));
        }
        let axes = schema
            .iter()
            .zip(cuts)
            .map(|(a, cuts)| Axis {
                name: a.name.clone(),
                lo: a.lo(),
                hi: a.hi(),
                cuts,
            })
            .collect::<Vec<_>>();
        for axis in &axes {
            if axis.cuts.is_empty() {
                return Err(Error::Config(format!(
                    "attribute `{}` has no cuts",
                    axis.name
                )));
            }
            axis.check().map_err(Error::Config)?;
        }
        Ok(Granulization { axes })
    }

    /// Rebuilds a granulization from its JSON form (`{name: [cuts...]}`).
    pub fn from_cut_map(
        schema: &[AttributeSpec],
        map: &serde_json::Map<String, serde_json::Value>,
    ) -> Result<Self> {
        let cuts = schema
            .iter()
            .map(|a| {
                let value = map
                    .get(&a.name)
                    .ok_or_else(|| Error::Schema(format!("no cuts for attribute `{}`", a.name)))?;
                Ok(serde_json::from_value::<Vec<f64>>(value.clone())?)
            })
            .collect::<Result<Vec<_>>>()?;
        if map.len() != schema.len() {
            return Err(Error::Schema(
                "cut map names attributes outside the schema".into(),
            ));
        }
        Self::from_cuts(schema, cuts)
    }

    pub fn n_attributes(&self) -> usize {
        self.axes.len()
    }

    pub fn cuts(&self, attribute: usize) -> &[f64] {
        &self.axes[attribute].cuts
    }

    pub fn granules(&self, attribute: usize) -> usize {
        self.axes[attribute].cuts.len() + 1
    }

    pub fn granule_counts(&self) -> GranuleCounts {
        GranuleCounts((0..self.axes.len()).map(|i| self.granules(i)).collect())
    }

    pub fn attribute_name(&self, attribute: usize) -> &str {
        &self.axes[attribute].name
    }

    pub fn range(&self, attribute: usize) -> (f64, f64) {
        (self.axes[attribute].lo, self.axes[attribute].hi)
    }

    /// Whether every invariant (ordering, interior, separation) holds.
    pub fn is_valid(&self) -> bool {
        self.axes
            .iter()
            .all(|a| !a.cuts.is_empty() && a.check().is_ok())
    }

    /// Whether this granulization was built for exactly these attributes and ranges.
    pub fn covers(&self, schema: &[AttributeSpec]) -> bool {
        self.axes.len() == schema.len()
            && self
                .axes
                .iter()
                .zip(schema)
                .all(|(ax, a)| ax.name == a.name && ax.lo == a.lo() && ax.hi == a.hi())
    }

    /// All cuts in schema order, for trace rows.
    pub fn flattened(&self) -> Vec<f64> {
        self.axes
            .iter()
            .flat_map(|a| a.cuts.iter().copied())
            .collect()
    }

    /// Trace column names matching [`Granulization::flattened`].
    pub fn column_names(&self) -> Vec<String> {
        self.axes
            .iter()
            .flat_map(|a| (1..=a.cuts.len()).map(move |j| format!("{}_cut{j}", a.name)))
            .collect()
    }

    pub fn signature_of(&self, values: &[f64]) -> GranuleSignature {
        GranuleSignature(
            self.axes
                .iter()
                .zip(values)
                .map(|(a, &v)| discretize_value(v, &a.cuts) as u16)
                .collect(),
        )
    }

    pub fn to_cut_map(&self) -> serde_json::Map<String, serde_json::Value> {
        self.axes
            .iter()
            .map(|a| (a.name.clone(), serde_json::json!(a.cuts)))
            .collect()
    }
}

impl Serialize for Granulization {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.axes.len()))?;
        for a in &self.axes {
            map.serialize_entry(&a.name, &a.cuts)?;
        }
        map.end()
    }
}

/// Per-attribute granule indices of one object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GranuleSignature(pub Vec<u16>);

impl GranuleSignature {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, attribute: usize) -> usize {
        self.0[attribute] as usize
    }

    /// Restriction to a subset of attributes.
    pub fn project(&self, attributes: &[usize]) -> GranuleSignature {
        GranuleSignature(attributes.iter().map(|&a| self.0[a]).collect())
    }
}

impl fmt::Display for GranuleSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u16::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A clean table discretized through a granulization.
#[derive(Clone, Debug)]
pub struct GranularTable<'a> {
    table: &'a InformationTable,
    granulization: Granulization,
    signatures: Vec<GranuleSignature>,
    decisions: Vec<u8>,
}

impl<'a> GranularTable<'a> {
    pub fn table(&self) -> &'a InformationTable {
        self.table
    }

    pub fn granulization(&self) -> &Granulization {
        &self.granulization
    }

    pub fn signatures(&self) -> &[GranuleSignature] {
        &self.signatures
    }

    pub fn signature(&self, object: usize) -> &GranuleSignature {
        &self.signatures[object]
    }

    pub fn decisions(&self) -> &[u8] {
        &self.decisions
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.granulization.n_attributes()
    }

    /// Recomputes the signatures from the source table and compares them to the stored ones.
    pub fn is_consistent(&self) -> bool {
        (0..self.table.len()).all(|i| {
            self.table
                .row_values(i)
                .is_some_and(|v| self.granulization.signature_of(&v) == self.signatures[i])
        })
    }
}

pub fn granulate_table<'a>(
    table: &'a InformationTable,
    g: &Granulization,
) -> Result<GranularTable<'a>> {
    if !g.covers(table.schema()) {
        for attr in table.schema() {
            if !g.axes.iter().any(|a| a.name == attr.name) {
                return Err(Error::Schema(format!(
                    "granulization has no cuts for attribute `{}`",
                    attr.name
                )));
            }
        }
        return Err(Error::Schema(
            "granulization attributes or ranges do not match the table schema".into(),
        ));
    }
    let mut signatures = Vec::with_capacity(table.len());
    let mut decisions = Vec::with_capacity(table.len());
    for i in 0..table.len() {
        let values = table
            .row_values(i)
            .ok_or_else(|| Error::Domain(format!("object {} has missing cells", i + 1)))?;
        let decision = table
            .decision(i)
            .ok_or_else(|| Error::Domain(format!("object {} has no decision", i + 1)))?;
        signatures.push(g.signature_of(&values));
        decisions.push(decision);
    }
    Ok(GranularTable {
        table,
        granulization: g.clone(),
        signatures,
        decisions,
    })
}

const INIT_ATTEMPTS: usize = 1_000;

/// Draws `k - 1` uniform cuts per attribute, sorted.
pub fn random_granulization<R: Rng + ?Sized>(
    schema: &[AttributeSpec],
    counts: &GranuleCounts,
    rng: &mut R,
) -> Result<Granulization> {
    counts.validate(schema)?;
    let mut axes = Vec::with_capacity(schema.len());
    for (attr, &k) in schema.iter().zip(counts.as_slice()) {
        let mut axis = Axis {
            name: attr.name.clone(),
            lo: attr.lo(),
            hi: attr.hi(),
            cuts: Vec::with_capacity(k - 1),
        };
        let mut placed = false;
        for _ in 0..INIT_ATTEMPTS {
            axis.cuts.clear();
            while axis.cuts.len() < k - 1 {
                let c = rng.random_range(axis.lo..axis.hi);
                if c > axis.lo {
                    axis.cuts.push(c);
                }
            }
            axis.cuts.sort_by(f64::total_cmp);
            if axis.check().is_ok() {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Config(format!(
                "could not place {} separated cuts in the range of `{}`",
                k - 1,
                attr.name
            )));
        }
        axes.push(axis);
    }
    Ok(Granulization { axes })
}

/// Folds `x` into `[lo, hi]` by reflection at the ends.
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    let period = 2.0 * width;
    let t = (x - lo).rem_euclid(period);
    if t <= width {
        lo + t
    } else {
        lo + period - t
    }
}

/// Moves one uniformly chosen cut of one uniformly chosen attribute by a
/// Gaussian step with standard deviation `step_fraction` × range width.
///
/// Steps leaving the range are reflected back in, so the kernel is symmetric.
/// Draws that break the separation invariant are retried up to
/// [`DEFAULT_RETRY_BUDGET`] times.
pub fn perturb<R: Rng + ?Sized>(
    g: &Granulization,
    step_fraction: f64,
    rng: &mut R,
) -> Result<Granulization> {
    perturb_with_budget(g, step_fraction, DEFAULT_RETRY_BUDGET, rng)
}

pub fn perturb_with_budget<R: Rng + ?Sized>(
    g: &Granulization,
    step_fraction: f64,
    retry_budget: usize,
    rng: &mut R,
) -> Result<Granulization> {
    if !(0.0..=1.0).contains(&step_fraction) {
        return Err(Error::Config(format!(
            "step fraction {step_fraction} outside (0, 1]"
        )));
    }
    for _ in 0..retry_budget {
        let a = rng.random_range(0..g.axes.len());
        let axis = &g.axes[a];
        let j = rng.random_range(0..axis.cuts.len());
        let width = axis.hi - axis.lo;
        let step = Normal::new(0.0, step_fraction * width)
            .expect("finite non-negative standard deviation")
            .sample(rng);
        let moved = reflect(axis.cuts[j] + step, axis.lo, axis.hi);

        let mut next = g.clone();
        let cuts = &mut next.axes[a].cuts;
        cuts[j] = moved;
        cuts.sort_by(f64::total_cmp);
        if next.axes[a].check().is_ok() {
            return Ok(next);
        }
    }
    Err(Error::Proposal(format!(
        "no valid perturbation within {retry_budget} attempts"
    )))
}
