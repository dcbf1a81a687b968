//! Indiscernibility classes, approximations, rough membership and rule induction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granulation::{granule_label, GranularTable, GranuleSignature, Granulization};

pub type ObjectSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Signature restricted to the partitioning attributes.
    pub signature: GranuleSignature,
    pub members: Vec<usize>,
}

/// The partition of the universe induced by agreement on a set of attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClasses {
    attributes: Vec<usize>,
    classes: Vec<EquivalenceClass>,
    class_of: Vec<usize>,
}

impl EquivalenceClasses {
    /// Partitions objects by their signatures restricted to `attributes`.
    /// Classes come out ordered by signature; members in object order.
    pub fn from_signatures(signatures: &[GranuleSignature], attributes: &[usize]) -> Result<Self> {
        let attributes: Vec<usize> = attributes
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if attributes.is_empty() {
            return Err(Error::Domain("attribute subset is empty".into()));
        }
        if let Some(sig) = signatures.first() {
            if let Some(&bad) = attributes.iter().find(|&&a| a >= sig.len()) {
                return Err(Error::Domain(format!("attribute index {bad} out of range")));
            }
        }
        let mut groups: BTreeMap<GranuleSignature, Vec<usize>> = BTreeMap::new();
        for (i, sig) in signatures.iter().enumerate() {
            groups.entry(sig.project(&attributes)).or_default().push(i);
        }
        let mut class_of = vec![0; signatures.len()];
        let classes = groups
            .into_iter()
            .enumerate()
            .map(|(c, (signature, members))| {
                for &m in &members {
                    class_of[m] = c;
                }
                EquivalenceClass { signature, members }
            })
            .collect();
        Ok(EquivalenceClasses {
            attributes,
            classes,
            class_of,
        })
    }

    pub fn attributes(&self) -> &[usize] {
        &self.attributes
    }

    pub fn classes(&self) -> &[EquivalenceClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn universe_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_of(&self, object: usize) -> &EquivalenceClass {
        &self.classes[self.class_of[object]]
    }
}

pub fn partition_classes(
    gt: &GranularTable<'_>,
    attributes: &[usize],
) -> Result<EquivalenceClasses> {
    if let Some(&bad) = attributes.iter().find(|&&a| a >= gt.n_attributes()) {
        return Err(Error::Domain(format!("attribute index {bad} out of range")));
    }
    EquivalenceClasses::from_signatures(gt.signatures(), attributes)
}

fn union_where(
    classes: &EquivalenceClasses,
    keep: impl Fn(&EquivalenceClass) -> bool,
) -> ObjectSet {
    classes
        .classes
        .iter()
        .filter(|c| keep(c))
        .flat_map(|c| c.members.iter().copied())
        .collect()
}

/// Union of the classes wholly inside `concept`.
pub fn lower_approximation(classes: &EquivalenceClasses, concept: &ObjectSet) -> ObjectSet {
    union_where(classes, |c| c.members.iter().all(|m| concept.contains(m)))
}

/// Union of the classes meeting `concept`.
pub fn upper_approximation(classes: &EquivalenceClasses, concept: &ObjectSet) -> ObjectSet {
    union_where(classes, |c| c.members.iter().any(|m| concept.contains(m)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub lower: ObjectSet,
    pub upper: ObjectSet,
}

impl Approximation {
    pub fn of(classes: &EquivalenceClasses, concept: &ObjectSet) -> Self {
        Approximation {
            lower: lower_approximation(classes, concept),
            upper: upper_approximation(classes, concept),
        }
    }

    pub fn boundary(&self) -> ObjectSet {
        self.upper.difference(&self.lower).copied().collect()
    }

    pub fn is_crisp(&self) -> bool {
        self.lower == self.upper
    }
}

/// `(|class(x) ∩ X|, |class(x)|)`.
pub fn rough_membership_counts(
    classes: &EquivalenceClasses,
    object: usize,
    concept: &ObjectSet,
) -> (usize, usize) {
    let class = classes.class_of(object);
    let inside = class.members.iter().filter(|m| concept.contains(m)).count();
    (inside, class.members.len())
}

pub fn rough_membership(classes: &EquivalenceClasses, object: usize, concept: &ObjectSet) -> f64 {
    let (inside, size) = rough_membership_counts(classes, object, concept);
    inside as f64 / size as f64
}

/// `|lower| / |upper|`, taken as 1 when both are empty.
pub fn approximation_accuracy(approx: &Approximation) -> f64 {
    if approx.upper.is_empty() {
        1.0
    } else {
        approx.lower.len() as f64 / approx.upper.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    /// The class lies in the lower approximation of one decision.
    Certain,
    /// The class lies in the boundary region.
    Possible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub signature: GranuleSignature,
    pub decision: u8,
    /// Fraction of the class with decision 1.
    pub plausibility: f64,
    pub support: usize,
    pub positives: usize,
    pub certainty: Certainty,
    /// Set when the class splits evenly; the decision then defaults to 0.
    #[serde(default)]
    pub tie: bool,
}

impl Rule {
    fn from_counts(signature: GranuleSignature, positives: usize, support: usize) -> Self {
        let certainty = if positives == 0 || positives == support {
            Certainty::Certain
        } else {
            Certainty::Possible
        };
        Rule {
            signature,
            decision: u8::from(2 * positives > support),
            plausibility: positives as f64 / support as f64,
            support,
            positives,
            certainty,
            tie: 2 * positives == support,
        }
    }

    /// Rule output on the `[-1, 1]` plausibility scale.
    pub fn output(&self) -> f64 {
        2.0 * self.plausibility - 1.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Rule>", into = "Vec<Rule>")]
pub struct RuleSet {
    rules: BTreeMap<GranuleSignature, Rule>,
}

impl From<Vec<Rule>> for RuleSet {
    fn from(rules: Vec<Rule>) -> Self {
        RuleSet {
            rules: rules
                .into_iter()
                .map(|r| (r.signature.clone(), r))
                .collect(),
        }
    }
}

impl From<RuleSet> for Vec<Rule> {
    fn from(set: RuleSet) -> Self {
        set.rules.into_values().collect()
    }
}

impl RuleSet {
    /// The rule count N.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, signature: &GranuleSignature) -> Option<&Rule> {
        self.rules.get(signature)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    pub fn certain(&self) -> impl Iterator<Item = &Rule> {
        self.iter().filter(|r| r.certainty == Certainty::Certain)
    }

    pub fn possible(&self) -> impl Iterator<Item = &Rule> {
        self.iter().filter(|r| r.certainty == Certainty::Possible)
    }

    /// Renders the rules as "If ... Then ..." lines, certain rules first.
    pub fn render(&self, g: &Granulization, decision_name: &str) -> String {
        let condition = |rule: &Rule| {
            (0..g.n_attributes())
                .map(|a| {
                    format!(
                        "{} = {}",
                        g.attribute_name(a),
                        granule_label(rule.signature.get(a), g.granules(a))
                    )
                })
                .collect::<Vec<_>>()
                .join(" and ")
        };
        let certain: Vec<_> = self.certain().collect();
        let possible: Vec<_> = self.possible().collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Rule set: N = {} ({} certain, {} possible)",
            self.len(),
            certain.len(),
            possible.len()
        );
        let _ = writeln!(out, "\nLower Approximation Rules\n");
        if certain.is_empty() {
            let _ = writeln!(out, "(none)");
        }
        for (i, rule) in certain.iter().enumerate() {
            let class = if rule.decision == 1 {
                "Positive"
            } else {
                "Negative"
            };
            let _ = writeln!(
                out,
                "{}. If {} Then {decision_name} = Most Probably {class}",
                i + 1,
                condition(rule)
            );
        }
        let _ = writeln!(out, "\nUpper Approximation Rules\n");
        if possible.is_empty() {
            let _ = writeln!(out, "(none)");
        }
        for (i, rule) in possible.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}. If {} Then {decision_name} = Positive with plausibility = {}",
                i + 1,
                condition(rule),
                format_plausibility(rule.plausibility)
            );
        }
        out
    }
}

/// Five decimals, truncated rather than rounded (1/15 prints as 0.06666).
pub fn format_plausibility(p: f64) -> String {
    let truncated = ((p * 1e5) + 1e-7).floor() / 1e5;
    format!("{truncated:.5}")
}

/// One rule per indiscernibility class over all attributes.
pub fn induce_rules(gt: &GranularTable<'_>) -> Result<RuleSet> {
    if gt.is_empty() {
        return Err(Error::Domain(
            "cannot induce rules from an empty table".into(),
        ));
    }
    let mut counts: HashMap<&GranuleSignature, (usize, usize)> = HashMap::new();
    for (sig, &d) in gt.signatures().iter().zip(gt.decisions()) {
        let entry = counts.entry(sig).or_default();
        entry.0 += usize::from(d);
        entry.1 += 1;
    }
    let rules = counts
        .into_iter()
        .map(|(sig, (pos, n))| (sig.clone(), Rule::from_counts(sig.clone(), pos, n)))
        .collect();
    Ok(RuleSet { rules })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Output {
    /// `2p - 1` for the matched rule's plausibility `p`.
    Plausibility(f64),
    /// No rule matches the signature.
    Abstain,
}

impl Output {
    /// Contribution to a posterior average: abstentions count as 0.
    pub fn value_or_zero(self) -> f64 {
        match self {
            Output::Plausibility(v) => v,
            Output::Abstain => 0.0,
        }
    }

    /// Predicted decision: positive outputs predict 1, others 0.
    pub fn predicted(self) -> Option<u8> {
        match self {
            Output::Plausibility(v) => Some(u8::from(v > 0.0)),
            Output::Abstain => None,
        }
    }

    pub fn is_abstain(self) -> bool {
        matches!(self, Output::Abstain)
    }
}

pub fn classify(rules: &RuleSet, signature: &GranuleSignature) -> Output {
    rules
        .get(signature)
        .map_or(Output::Abstain, |r| Output::Plausibility(r.output()))
}
