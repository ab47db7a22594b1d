//! Parsing and aggregation of tender award records.
//!
//! Turns transaction-level rows into the three analysis series: per-supplier
//! total revenues, per-authority total spendings, and per-tender bidder counts.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tender award.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcurementRecord {
    pub tender_id: String,
    pub authority_id: String,
    pub winner_id: String,
    /// Awarded price in currency units; strictly positive.
    pub price: f64,
    /// Number of bids placed; at least 1.
    pub n_bidders: u32,
    /// Award date (ISO-8601), informational only.
    pub date: Option<String>,
}

/// Dataset-level totals: M (money), C (suppliers), Z (authorities),
/// W (tenders), F (total bids).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationSummary {
    pub total_money: f64,
    pub n_suppliers: usize,
    pub n_authorities: usize,
    pub n_tenders: usize,
    pub n_bids_total: u64,
}

/// Which of the three analysis series a sample holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Revenues,
    Spendings,
    BidderCounts,
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleKind::Revenues => write!(f, "revenues"),
            SampleKind::Spendings => write!(f, "spendings"),
            SampleKind::BidderCounts => write!(f, "bidder_counts"),
        }
    }
}

/// An ordered series of positive magnitudes with provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    pub kind: SampleKind,
    pub unit: String,
}

impl Sample {
    /// Build a sample, rejecting empty input and non-positive values.
    pub fn new(values: Vec<f64>, kind: SampleKind, unit: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput(format!("{kind} sample has no values")));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: *bad,
                reason: "sample values must be finite and strictly positive",
            });
        }
        Ok(Self {
            values,
            kind,
            unit: unit.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sample standard deviation (n−1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Maps the required logical columns onto header names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub tender_id: String,
    pub authority_id: String,
    pub winner_id: String,
    pub price: String,
    pub n_bidders: String,
    pub date: Option<String>,
    /// Field delimiter, a single byte (default comma).
    pub delimiter: u8,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            tender_id: "tender_id".into(),
            authority_id: "authority_id".into(),
            winner_id: "winner_id".into(),
            price: "price".into(),
            n_bidders: "n_bidders".into(),
            date: Some("date".into()),
            delimiter: b',',
        }
    }
}

/// Why a row was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NonPositivePrice,
    InvalidPrice,
    InvalidBidderCount,
    NonPositiveBidderCount,
    DuplicateTenderId,
    EmptyTenderId,
    MalformedRow,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SkipReason::NonPositivePrice => "non-positive price",
            SkipReason::InvalidPrice => "non-numeric price",
            SkipReason::InvalidBidderCount => "non-integer bidder count",
            SkipReason::NonPositiveBidderCount => "bidder count below 1",
            SkipReason::DuplicateTenderId => "duplicate tender_id",
            SkipReason::EmptyTenderId => "empty tender_id",
            SkipReason::MalformedRow => "malformed row",
        };
        write!(f, "{s}")
    }
}

/// A rejected row: 1-based data line number (header excluded) plus reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRow {
    pub line: u64,
    pub reason: SkipReason,
}

/// Result of parsing: accepted records in row order plus the skip log.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub records: Vec<ProcurementRecord>,
    pub skipped: Vec<SkippedRow>,
}

/// Parse delimiter-separated records with a header row.
///
/// Rows that violate the record invariants are skipped with a reason rather
/// than aborting the whole file; a missing required column aborts with a
/// schema error.
pub fn parse_records<R: Read>(input: R, schema: &ColumnSchema) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);

    let mut missing = Vec::new();
    let required = [
        &schema.tender_id,
        &schema.authority_id,
        &schema.winner_id,
        &schema.price,
        &schema.n_bidders,
    ];
    for name in required {
        if find(name).is_none() {
            missing.push(name.clone());
        }
    }
    if !missing.is_empty() {
        return Err(Error::Schema { missing });
    }

    let idx_tender = find(&schema.tender_id).unwrap();
    let idx_authority = find(&schema.authority_id).unwrap();
    let idx_winner = find(&schema.winner_id).unwrap();
    let idx_price = find(&schema.price).unwrap();
    let idx_bidders = find(&schema.n_bidders).unwrap();
    let idx_date = schema.date.as_ref().and_then(|d| find(d));

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut line: u64 = 0;

    for row in reader.records() {
        line += 1;
        let row = match row {
            Ok(r) => r,
            Err(_) => {
                skipped.push(SkippedRow {
                    line,
                    reason: SkipReason::MalformedRow,
                });
                continue;
            }
        };
        let field = |i: usize| row.get(i).map(str::trim);

        let (tender, authority, winner, price_raw, bidders_raw) = match (
            field(idx_tender),
            field(idx_authority),
            field(idx_winner),
            field(idx_price),
            field(idx_bidders),
        ) {
            (Some(t), Some(a), Some(w), Some(p), Some(b)) => (t, a, w, p, b),
            _ => {
                skipped.push(SkippedRow {
                    line,
                    reason: SkipReason::MalformedRow,
                });
                continue;
            }
        };

        if tender.is_empty() {
            skipped.push(SkippedRow {
                line,
                reason: SkipReason::EmptyTenderId,
            });
            continue;
        }
        let price: f64 = match price_raw.parse() {
            Ok(p) => p,
            Err(_) => {
                skipped.push(SkippedRow {
                    line,
                    reason: SkipReason::InvalidPrice,
                });
                continue;
            }
        };
        if !(price > 0.0) || !price.is_finite() {
            skipped.push(SkippedRow {
                line,
                reason: SkipReason::NonPositivePrice,
            });
            continue;
        }
        let n_bidders: i64 = match bidders_raw.parse() {
            Ok(b) => b,
            Err(_) => {
                skipped.push(SkippedRow {
                    line,
                    reason: SkipReason::InvalidBidderCount,
                });
                continue;
            }
        };
        if n_bidders < 1 || n_bidders > u32::MAX as i64 {
            skipped.push(SkippedRow {
                line,
                reason: SkipReason::NonPositiveBidderCount,
            });
            continue;
        }
        if !seen_ids.insert(tender.to_string()) {
            skipped.push(SkippedRow {
                line,
                reason: SkipReason::DuplicateTenderId,
            });
            continue;
        }

        let date = idx_date
            .and_then(|i| field(i))
            .filter(|d| !d.is_empty())
            .map(str::to_string);

        records.push(ProcurementRecord {
            tender_id: tender.to_string(),
            authority_id: authority.to_string(),
            winner_id: winner.to_string(),
            price,
            n_bidders: n_bidders as u32,
            date,
        });
    }

    Ok(ParseOutcome { records, skipped })
}

/// The three aggregated series plus dataset totals.
#[derive(Debug, Clone)]
pub struct Aggregation {
    pub revenues: Sample,
    pub spendings: Sample,
    pub bidders: Sample,
    pub summary: AggregationSummary,
}

/// Aggregate records into per-winner revenues, per-authority spendings, and
/// the bidder-count series.
///
/// The floor applies to aggregated per-entity totals (entities whose total is
/// below `floor` are dropped from revenues/spendings); bidder counts are never
/// filtered. `summary.total_money` is the pre-filter money total, which is the
/// same for both aggregations.
pub fn aggregate(records: &[ProcurementRecord], floor: f64) -> Result<Aggregation> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records to aggregate".into()));
    }
    if !(floor >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "floor",
            value: floor,
            reason: "floor must be non-negative",
        });
    }

    // BTreeMap keeps entity order deterministic regardless of input order.
    let mut by_winner: BTreeMap<&str, f64> = BTreeMap::new();
    let mut by_authority: BTreeMap<&str, f64> = BTreeMap::new();
    let mut bidders = Vec::with_capacity(records.len());
    let mut total_money = 0.0;
    let mut n_bids_total: u64 = 0;

    for rec in records {
        *by_winner.entry(&rec.winner_id).or_insert(0.0) += rec.price;
        *by_authority.entry(&rec.authority_id).or_insert(0.0) += rec.price;
        total_money += rec.price;
        n_bids_total += rec.n_bidders as u64;
        bidders.push(rec.n_bidders as f64);
    }

    let filter = |m: &BTreeMap<&str, f64>| -> Vec<f64> {
        m.values().copied().filter(|v| *v >= floor).collect()
    };
    let revenue_values = filter(&by_winner);
    let spending_values = filter(&by_authority);

    if revenue_values.is_empty() {
        return Err(Error::EmptyInput(format!(
            "floor {floor} excludes every supplier total"
        )));
    }
    if spending_values.is_empty() {
        return Err(Error::EmptyInput(format!(
            "floor {floor} excludes every authority total"
        )));
    }

    let summary = AggregationSummary {
        total_money,
        n_suppliers: revenue_values.len(),
        n_authorities: spending_values.len(),
        n_tenders: records.len(),
        n_bids_total,
    };

    Ok(Aggregation {
        revenues: Sample::new(revenue_values, SampleKind::Revenues, "currency")?,
        spendings: Sample::new(spending_values, SampleKind::Spendings, "currency")?,
        bidders: Sample::new(bidders, SampleKind::BidderCounts, "bidders")?,
        summary,
    })
}

/// Divide every value by the sample standard deviation (n−1 denominator),
/// returning the rescaled sample and the scale that was divided out.
///
/// No mean subtraction: values stay strictly positive, expressed as a number
/// of standard deviations.
pub fn standardize(sample: &Sample) -> Result<(Sample, f64)> {
    if sample.len() < 2 {
        return Err(Error::EmptyInput(
            "standardization needs at least two values".into(),
        ));
    }
    let scale = sample.std_dev();
    if scale == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let values = sample.values().iter().map(|v| v / scale).collect();
    let standardized = Sample::new(values, sample.kind, format!("{} / sd", sample.unit))?;
    Ok((standardized, scale))
}
