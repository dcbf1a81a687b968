//! Equal-width histograms with a plot-ready CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Spans the observed range. Identical values collapse into one bin.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        check_bins(bins)?;
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if values.is_empty() {
            return Ok(Histogram {
                edges: vec![0.0, 0.0],
                counts: vec![0],
            });
        }
        if lo == hi {
            return Ok(Histogram {
                edges: vec![lo, hi],
                counts: vec![values.len() as u64],
            });
        }
        Self::with_range(values, bins, lo, hi)
    }

    pub fn with_range(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        check_bins(bins)?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!(
                "invalid histogram range [{lo}, {hi}]"
            )));
        }
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        let mut counts = vec![0u64; bins];
        for &v in values {
            if !(lo..=hi).contains(&v) {
                return Err(Error::Domain(format!("value {v} outside [{lo}, {hi}]")));
            }
            let i = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
            counts[i.min(bins - 1)] += 1;
        }
        Ok(Histogram { edges, counts })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["bin_lo", "bin_hi", "count"])?;
        for (i, count) in self.counts.iter().enumerate() {
            out.write_record([
                self.edges[i].to_string(),
                self.edges[i + 1].to_string(),
                count.to_string(),
            ])?;
        }
        out.flush()
            .map_err(|e| Error::io("<histogram writer>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let mut edges = Vec::new();
        let mut counts = Vec::new();
        for (i, record) in input.deserialize::<(f64, f64, u64)>().enumerate() {
            let (lo, hi, count) = record?;
            if let Some(&prev) = edges.last() {
                if prev != lo {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: "bin_lo".into(),
                        message: "bins are not contiguous".into(),
                    });
                }
                edges.pop();
            }
            edges.push(lo);
            edges.push(hi);
            counts.push(count);
        }
        if counts.is_empty() {
            return Err(Error::Domain("histogram file has no bins".into()));
        }
        Ok(Histogram { edges, counts })
    }
}

fn check_bins(bins: usize) -> Result<()> {
    if bins < 1 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_value_single_bin() {
        let h = Histogram::from_values(&[3.0, 3.0, 3.0], 10).unwrap();
        assert_eq!(h.bins(), 1);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn right_edge_closed() {
        let h = Histogram::with_range(&[-1.0, 0.0, 1.0], 4, -1.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![1, 0, 1, 1]);
        assert!(Histogram::with_range(&[1.5], 4, -1.0, 1.0).is_err());
        assert!(Histogram::from_values(&[1.0], 0).is_err());
    }

    proptest! {
        #[test]
        fn mass_and_csv_round_trip(values in prop::collection::vec(-50.0f64..50.0, 0..200), bins in 1usize..30) {
            let h = Histogram::from_values(&values, bins).unwrap();
            prop_assert_eq!(h.total() as usize, values.len());
            let mut buf = Vec::new();
            h.write_csv(&mut buf).unwrap();
            let back = Histogram::read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, h);
        }
    }
}
