//! Decision tables: loading, validation and cleaning.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    #[default]
    Numeric,
    /// Integer codes; non-integral cells are rejected at load time.
    Categorical,
}

/// A condition attribute and the closed interval its values live in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(default)]
    pub kind: AttributeKind,
    pub range: [f64; 2],
}

impl AttributeSpec {
    pub fn numeric(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Numeric,
            range: [lo, hi],
        }
    }

    pub fn categorical(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Categorical,
            range: [lo, hi],
        }
    }

    pub fn lo(&self) -> f64 {
        self.range[0]
    }

    pub fn hi(&self) -> f64 {
        self.range[1]
    }

    pub fn width(&self) -> f64 {
        self.range[1] - self.range[0]
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.range[0] && value <= self.range[1]
    }
}

pub fn validate_schema(schema: &[AttributeSpec]) -> Result<()> {
    if schema.is_empty() {
        return Err(Error::Schema("schema has no condition attributes".into()));
    }
    let mut seen = HashSet::new();
    for attr in schema {
        if attr.name.trim().is_empty() {
            return Err(Error::Schema("attribute with empty name".into()));
        }
        if !seen.insert(attr.name.as_str()) {
            return Err(Error::Schema(format!(
                "duplicate attribute `{}`",
                attr.name
            )));
        }
        let [lo, hi] = attr.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Schema(format!(
                "attribute `{}` has invalid range [{lo}, {hi}]",
                attr.name
            )));
        }
    }
    Ok(())
}

/// Objects × condition attributes plus a binary decision.
///
/// Cells are optional so that a freshly loaded table can carry missing
/// entries; [`clean_table`] produces a complete table.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationTable {
    schema: Vec<AttributeSpec>,
    decision_name: String,
    object_ids: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
    decisions: Vec<Option<u8>>,
}

impl InformationTable {
    pub fn new(schema: Vec<AttributeSpec>, decision_name: impl Into<String>) -> Result<Self> {
        validate_schema(&schema)?;
        let decision_name = decision_name.into();
        if schema.iter().any(|a| a.name == decision_name) {
            return Err(Error::Schema(format!(
                "decision column `{decision_name}` is also a condition attribute"
            )));
        }
        Ok(InformationTable {
            schema,
            decision_name,
            object_ids: Vec::new(),
            values: Vec::new(),
            decisions: Vec::new(),
        })
    }

    pub fn push_row(
        &mut self,
        id: impl Into<String>,
        values: Vec<Option<f64>>,
        decision: Option<u8>,
    ) -> Result<()> {
        if values.len() != self.schema.len() {
            return Err(Error::Schema(format!(
                "row has {} values, schema has {} attributes",
                values.len(),
                self.schema.len()
            )));
        }
        if let Some(d) = decision {
            if d > 1 {
                return Err(Error::Domain(format!("decision {d} is not 0 or 1")));
            }
        }
        self.object_ids.push(id.into());
        self.values.push(values);
        self.decisions.push(decision);
        Ok(())
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn decision_name(&self) -> &str {
        &self.decision_name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.name == name)
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn row(&self, object: usize) -> &[Option<f64>] {
        &self.values[object]
    }

    pub fn value(&self, object: usize, attribute: usize) -> Option<f64> {
        self.values[object][attribute]
    }

    /// The complete value vector of an object, or `None` if any cell is missing.
    pub fn row_values(&self, object: usize) -> Option<Vec<f64>> {
        self.values[object].iter().copied().collect()
    }

    pub fn decision(&self, object: usize) -> Option<u8> {
        self.decisions[object]
    }

    pub fn decisions(&self) -> &[Option<u8>] {
        &self.decisions
    }

    pub fn is_complete(&self) -> bool {
        self.decisions.iter().all(Option::is_some)
            && self
                .values
                .iter()
                .all(|row| row.iter().all(Option::is_some))
    }

    /// Sub-table of the given objects, in the given order.
    pub fn select(&self, objects: &[usize]) -> InformationTable {
        InformationTable {
            schema: self.schema.clone(),
            decision_name: self.decision_name.clone(),
            object_ids: objects
                .iter()
                .map(|&i| self.object_ids[i].clone())
                .collect(),
            values: objects.iter().map(|&i| self.values[i].clone()).collect(),
            decisions: objects.iter().map(|&i| self.decisions[i]).collect(),
        }
    }

    /// Writes the table in the format [`load_table`] reads. Missing cells are
    /// written as empty strings.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.schema.iter().map(|a| a.name.as_str()).collect();
        header.push(&self.decision_name);
        out.write_record(&header)?;
        for (row, decision) in self.values.iter().zip(&self.decisions) {
            let mut record: Vec<String> = row
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
                .collect();
            record.push(decision.map(|d| d.to_string()).unwrap_or_default());
            out.write_record(&record)?;
        }
        out.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub decision_column: String,
    /// Token marking a missing cell in addition to the empty string.
    #[serde(default)]
    pub missing_token: Option<String>,
    /// Column holding object identifiers; row numbers are used otherwise.
    #[serde(default)]
    pub id_column: Option<String>,
    /// Accept sources without the decision column (every decision is then missing).
    #[serde(default)]
    pub decision_optional: bool,
}

impl LoadOptions {
    pub fn new(decision_column: impl Into<String>) -> Self {
        LoadOptions {
            decision_column: decision_column.into(),
            missing_token: None,
            id_column: None,
            decision_optional: false,
        }
    }

    fn is_missing(&self, cell: &str) -> bool {
        cell.is_empty() || self.missing_token.as_deref() == Some(cell)
    }
}

/// Reads a comma-separated decision table with a header row.
///
/// Rows are numbered from 1 (the first line after the header) in error
/// messages. Missing cells are kept; use [`clean_table`] to drop them.
pub fn load_table<R: Read>(
    source: R,
    schema: &[AttributeSpec],
    options: &LoadOptions,
) -> Result<InformationTable> {
    let mut table = InformationTable::new(schema.to_vec(), options.decision_column.clone())?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("column `{name}` not found in header")))
    };
    let attr_columns = schema
        .iter()
        .map(|a| column(&a.name))
        .collect::<Result<Vec<_>>>()?;
    let decision_column = match column(&options.decision_column) {
        Err(_) if options.decision_optional => None,
        found => Some(found?),
    };
    let id_column = options.id_column.as_deref().map(column).transpose()?;

    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let row = idx + 1;
        let cell = |c: usize| record.get(c).unwrap_or("");

        let mut values = Vec::with_capacity(schema.len());
        for (attr, &c) in schema.iter().zip(&attr_columns) {
            let raw = cell(c);
            if options.is_missing(raw) {
                values.push(None);
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                row,
                column: attr.name.clone(),
                message,
            };
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_err(format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("`{raw}` is not finite")));
            }
            if attr.kind == AttributeKind::Categorical && v.fract() != 0.0 {
                return Err(parse_err(format!("`{raw}` is not an integer code")));
            }
            values.push(Some(v));
        }

        let raw = decision_column.map_or("", cell);
        let decision = if options.is_missing(raw) {
            None
        } else {
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                row,
                column: options.decision_column.clone(),
                message: format!("`{raw}` is not a number"),
            })?;
            if v == 0.0 {
                Some(0)
            } else if v == 1.0 {
                Some(1)
            } else {
                return Err(Error::Domain(format!(
                    "row {row}: decision `{raw}` is not 0 or 1"
                )));
            }
        };

        let id = match id_column {
            Some(c) => cell(c).to_string(),
            None => row.to_string(),
        };
        table.push_row(id, values, decision)?;
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Constant(f64),
    Attribute { attribute: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: String,
    pub op: CmpOp,
    pub value: Operand,
}

/// A conjunction of comparisons; a row satisfying all of them is invalid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyPredicate {
    pub name: String,
    pub all_of: Vec<Condition>,
}

impl ConsistencyPredicate {
    pub fn new(name: impl Into<String>, all_of: Vec<Condition>) -> Self {
        ConsistencyPredicate {
            name: name.into(),
            all_of,
        }
    }

    /// Zero pregnancies but at least one birth.
    pub fn births_without_pregnancy(gravidity: &str, parity: &str) -> Self {
        ConsistencyPredicate::new(
            "births_without_pregnancy",
            vec![
                Condition {
                    attribute: gravidity.into(),
                    op: CmpOp::Eq,
                    value: Operand::Constant(0.0),
                },
                Condition {
                    attribute: parity.into(),
                    op: CmpOp::Ge,
                    value: Operand::Constant(1.0),
                },
            ],
        )
    }

    /// More births than pregnancies. Not applied unless requested.
    pub fn parity_exceeds_gravidity(gravidity: &str, parity: &str) -> Self {
        ConsistencyPredicate::new(
            "parity_exceeds_gravidity",
            vec![Condition {
                attribute: parity.into(),
                op: CmpOp::Gt,
                value: Operand::Attribute {
                    attribute: gravidity.into(),
                },
            }],
        )
    }

    /// Looks up a built-in predicate by name, over attributes named
    /// `gravidity` and `parity`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "births_without_pregnancy" => {
                Some(Self::births_without_pregnancy("gravidity", "parity"))
            }
            "parity_exceeds_gravidity" => {
                Some(Self::parity_exceeds_gravidity("gravidity", "parity"))
            }
            _ => None,
        }
    }

    /// Fails with a schema error if the predicate names an attribute outside `schema`.
    pub fn check(&self, schema: &[AttributeSpec]) -> Result<()> {
        self.compile(schema).map(|_| ())
    }

    fn compile(&self, schema: &[AttributeSpec]) -> Result<Vec<(usize, CmpOp, CompiledOperand)>> {
        let index = |name: &str| {
            schema.iter().position(|a| a.name == name).ok_or_else(|| {
                Error::Schema(format!(
                    "predicate `{}` references unknown attribute `{name}`",
                    self.name
                ))
            })
        };
        self.all_of
            .iter()
            .map(|c| {
                let rhs = match &c.value {
                    Operand::Constant(v) => CompiledOperand::Constant(*v),
                    Operand::Attribute { attribute } => {
                        CompiledOperand::Attribute(index(attribute)?)
                    }
                };
                Ok((index(&c.attribute)?, c.op, rhs))
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum CompiledOperand {
    Constant(f64),
    Attribute(usize),
}

fn satisfies(row: &[f64], conditions: &[(usize, CmpOp, CompiledOperand)]) -> bool {
    !conditions.is_empty()
        && conditions.iter().all(|&(lhs, op, rhs)| {
            let rhs = match rhs {
                CompiledOperand::Constant(v) => v,
                CompiledOperand::Attribute(i) => row[i],
            };
            op.holds(row[lhs], rhs)
        })
}

/// Removal bucket for complete rows holding a value outside its declared range.
pub const OUT_OF_RANGE: &str = "out_of_range";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub total_in: usize,
    pub removed_missing: usize,
    pub removed_inconsistent: usize,
    pub remaining: usize,
    pub per_predicate: BTreeMap<String, usize>,
}

/// Drops rows with missing cells, then rows violating a declared range or
/// satisfying any predicate. Each removed row is charged to the first cause
/// that applies.
pub fn clean_table(
    table: &InformationTable,
    predicates: &[ConsistencyPredicate],
) -> Result<(InformationTable, CleanReport)> {
    let compiled = predicates
        .iter()
        .map(|p| p.compile(&table.schema))
        .collect::<Result<Vec<_>>>()?;

    let mut report = CleanReport {
        total_in: table.len(),
        per_predicate: predicates.iter().map(|p| (p.name.clone(), 0)).collect(),
        ..CleanReport::default()
    };
    let mut keep = Vec::with_capacity(table.len());
    for object in 0..table.len() {
        let Some(row) = table
            .row_values(object)
            .filter(|_| table.decisions[object].is_some())
        else {
            report.removed_missing += 1;
            continue;
        };
        let cause = if !table.schema.iter().zip(&row).all(|(a, &v)| a.contains(v)) {
            Some(OUT_OF_RANGE)
        } else {
            predicates
                .iter()
                .zip(&compiled)
                .find(|(_, c)| satisfies(&row, c))
                .map(|(p, _)| p.name.as_str())
        };
        match cause {
            Some(name) => {
                report.removed_inconsistent += 1;
                *report.per_predicate.entry(name.to_string()).or_default() += 1;
            }
            None => keep.push(object),
        }
    }
    report.remaining = keep.len();
    Ok((table.select(&keep), report))
}
