//! End-to-end analysis pipeline and the structured report document.
//!
//! Every numeric field in the report is a pure function of the input records,
//! the configuration, and the seed; a rerun reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::concentration::{self, LorenzCurve};
use crate::error::{Error, Result};
use crate::gof::{self, BootstrapReport, RefitMode};
use crate::ingest::{self, AggregationSummary, ProcurementRecord, Sample, SampleKind};
use crate::tailfit::{self, TailFit, ZipfFit};

/// Version of the report document layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Top-share fractions tabulated per series.
pub const TOP_SHARE_FRACTIONS: [f64; 4] = [0.01, 0.05, 0.10, 0.20];

/// Analysis configuration; defaults mirror the reference study conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Entity totals below this are excluded from revenues/spendings.
    pub floor: f64,
    /// Tail cutoff in standardized units.
    pub cutoff: f64,
    /// Bootstrap replicate count.
    pub replicates: usize,
    /// Ranks entering the Zipf regression.
    pub top_k: usize,
    /// Re-estimate the exponent on each bootstrap replicate.
    pub refit: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            floor: 2_000_000.0,
            cutoff: tailfit::DEFAULT_CUTOFF,
            replicates: gof::DEFAULT_REPLICATES,
            top_k: tailfit::DEFAULT_TOP_K,
            refit: false,
        }
    }
}

/// Tail extent actually used by the fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub cutoff: f64,
    pub n_total: usize,
    pub n_tail: usize,
}

/// One fraction of the population and the share of money it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopShareEntry {
    pub fraction: f64,
    pub share: f64,
}

/// Everything computed for one of the three series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBlock {
    pub kind: SampleKind,
    pub n: usize,
    /// Standard deviation divided out before tail selection (revenues and
    /// spendings only).
    pub standardization_scale: Option<f64>,
    pub tail: TailSummary,
    pub fits: Vec<TailFit>,
    /// Absent when the series has too few values for a rank-size regression
    /// or no rank decay (e.g. small-integer bidder counts).
    pub zipf: Option<ZipfFit>,
    pub bootstrap: BootstrapReport,
    pub gini: f64,
    pub top_shares: Vec<TopShareEntry>,
    /// Smallest population fraction holding at least 80% of the total.
    pub p80: f64,
}

/// Published values for the Czech public procurement registry
/// (6/2006–8/2011). They depend on that proprietary dataset and are carried
/// as annotations only, never as computed targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceAnnotations {
    pub description: String,
    pub bidders_beta: f64,
    pub revenues_alpha: f64,
    pub revenues_zipf_gamma: f64,
    pub spendings_alpha: f64,
    pub spendings_zipf_gamma: f64,
    pub revenues_ks: f64,
    pub spendings_ks: f64,
    pub revenues_p_value: f64,
    pub spendings_p_value: f64,
    pub firms_top10_share: f64,
    pub firms_top1_share: f64,
    pub authorities_top10_share: f64,
    pub authorities_top1_share: f64,
}

pub fn reference_annotations() -> ReferenceAnnotations {
    ReferenceAnnotations {
        description: "Published reference values for the Czech public procurement registry, \
                      6/2006-8/2011; reproducing them requires that proprietary dataset."
            .into(),
        bidders_beta: 0.27,
        revenues_alpha: 1.236,
        revenues_zipf_gamma: 0.789,
        spendings_alpha: 0.993,
        spendings_zipf_gamma: 0.977,
        revenues_ks: 0.0014,
        spendings_ks: 0.0007,
        revenues_p_value: 0.3820,
        spendings_p_value: 0.7541,
        firms_top10_share: 0.80,
        firms_top1_share: 0.45,
        authorities_top10_share: 0.87,
        authorities_top1_share: 0.60,
    }
}

/// The full structured report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub config: AnalysisConfig,
    pub n_skipped_rows: usize,
    pub summary: AggregationSummary,
    pub bidders: SeriesBlock,
    pub revenues: SeriesBlock,
    pub spendings: SeriesBlock,
    pub reference: ReferenceAnnotations,
}

/// A two-column numeric table destined for a TSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotFile {
    pub name: String,
    pub column_x: String,
    pub column_y: String,
    pub rows: Vec<(f64, f64)>,
}

impl PlotFile {
    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 24 + 32);
        out.push_str(&self.column_x);
        out.push('\t');
        out.push_str(&self.column_y);
        out.push('\n');
        for (x, y) in &self.rows {
            out.push_str(&format!("{x}\t{y}\n"));
        }
        out
    }
}

/// Report plus plot tables and the full Lorenz curves (the curves are kept
/// out of the report document and exported separately on request).
#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    pub report: AnalysisReport,
    pub plots: Vec<PlotFile>,
    pub lorenz_curves: Vec<(SampleKind, LorenzCurve)>,
}

fn with_series<T>(series: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|e| Error::Series {
        series,
        source: Box::new(e),
    })
}

/// Run the whole pipeline: aggregate, standardize, select tails, fit, test,
/// and measure concentration for all three series.
pub fn run_analysis(
    records: &[ProcurementRecord],
    n_skipped_rows: usize,
    config: &AnalysisConfig,
    seed: u64,
) -> Result<AnalysisOutput> {
    let agg = ingest::aggregate(records, config.floor)?;
    let refit_mode = if config.refit {
        RefitMode::Refit
    } else {
        RefitMode::Fixed
    };

    let mut plots = Vec::new();
    let mut lorenz_curves = Vec::new();

    // Bidder counts: whole-distribution exponential fit with the tail pinned
    // to 1 at the smallest count, per-figure cdf and pdf tables.
    let bidders = with_series("bidders", {
        analyze_bidders(&agg.bidders, config, seed, refit_mode, &mut plots)
    })?;
    lorenz_curves.push((SampleKind::BidderCounts, concentration::lorenz(&agg.bidders)?));

    let revenues = with_series("revenues", {
        analyze_money_series(
            &agg.revenues,
            config,
            crate::seeding::derive(seed, 2),
            refit_mode,
            "fig2",
            &mut plots,
        )
    })?;
    lorenz_curves.push((SampleKind::Revenues, concentration::lorenz(&agg.revenues)?));

    let spendings = with_series("spendings", {
        analyze_money_series(
            &agg.spendings,
            config,
            crate::seeding::derive(seed, 3),
            refit_mode,
            "fig3",
            &mut plots,
        )
    })?;
    lorenz_curves.push((SampleKind::Spendings, concentration::lorenz(&agg.spendings)?));

    let report = AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: config.clone(),
        n_skipped_rows,
        summary: agg.summary,
        bidders,
        revenues,
        spendings,
        reference: reference_annotations(),
    };

    Ok(AnalysisOutput {
        report,
        plots,
        lorenz_curves,
    })
}

fn analyze_bidders(
    sample: &Sample,
    config: &AnalysisConfig,
    seed: u64,
    refit_mode: RefitMode,
    plots: &mut Vec<PlotFile>,
) -> Result<SeriesBlock> {
    let b0 = sample.min();
    let regression = tailfit::fit_exponential(sample, Some(b0))?;
    let mle = tailfit::fit_exponential(sample, None)?;

    let tail = tailfit::select_tail(sample, b0)?;
    let bootstrap = gof::bootstrap_test(
        &tail,
        &regression,
        config.replicates,
        crate::seeding::derive(seed, 1),
        refit_mode,
    )?;

    let (values, tail_probs, freqs) = distinct_value_table(sample);
    plots.push(PlotFile {
        name: "fig1_cdf.tsv".into(),
        column_x: "bidders".into(),
        column_y: "tail_probability".into(),
        rows: values.iter().copied().zip(tail_probs).collect(),
    });
    plots.push(PlotFile {
        name: "fig1_pdf.tsv".into(),
        column_x: "bidders".into(),
        column_y: "probability".into(),
        rows: values.iter().copied().zip(freqs).collect(),
    });

    let tail_summary = TailSummary {
        cutoff: tail.cutoff,
        n_total: tail.n_total,
        n_tail: tail.n_tail,
    };
    concentration_block(
        sample,
        SampleKind::BidderCounts,
        None,
        tail_summary,
        vec![regression, mle],
        None,
        bootstrap,
    )
}

fn analyze_money_series(
    sample: &Sample,
    config: &AnalysisConfig,
    seed: u64,
    refit_mode: RefitMode,
    fig: &str,
    plots: &mut Vec<PlotFile>,
) -> Result<SeriesBlock> {
    let (standardized, scale) = ingest::standardize(sample)?;
    let tail = tailfit::select_tail(&standardized, config.cutoff)?;
    let mle = tailfit::fit_power_mle(&tail)?;
    let regression = tailfit::fit_power_regression(&tail)?;

    let zipf = if standardized.len() >= 3 {
        let top_k = config.top_k.min(standardized.len());
        match tailfit::fit_zipf(&standardized, top_k) {
            Ok(z) => Some(z),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let bootstrap = gof::bootstrap_test(
        &tail,
        &mle,
        config.replicates,
        crate::seeding::derive(seed, 1),
        refit_mode,
    )?;

    // cdf table: every standardized value against its empirical tail
    // probability, F(x_(i)) = (n−i+1)/n on the ascending sort.
    let mut sorted = standardized.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let axis = match sample.kind {
        SampleKind::Spendings => "standardized_spending",
        _ => "standardized_revenue",
    };
    plots.push(PlotFile {
        name: format!("{fig}_cdf.tsv"),
        column_x: axis.into(),
        column_y: "tail_probability".into(),
        rows: sorted
            .iter()
            .enumerate()
            .map(|(i, x)| (*x, (n - i as f64) / n))
            .collect(),
    });
    let mut descending = sorted;
    descending.reverse();
    plots.push(PlotFile {
        name: format!("{fig}_zipf.tsv"),
        column_x: "rank".into(),
        column_y: axis.into(),
        rows: descending
            .iter()
            .enumerate()
            .map(|(i, x)| ((i + 1) as f64, *x))
            .collect(),
    });

    let tail_summary = TailSummary {
        cutoff: tail.cutoff,
        n_total: tail.n_total,
        n_tail: tail.n_tail,
    };
    concentration_block(
        sample,
        sample.kind,
        Some(scale),
        tail_summary,
        vec![mle, regression],
        zipf,
        bootstrap,
    )
}

fn concentration_block(
    sample: &Sample,
    kind: SampleKind,
    standardization_scale: Option<f64>,
    tail: TailSummary,
    fits: Vec<TailFit>,
    zipf: Option<ZipfFit>,
    bootstrap: BootstrapReport,
) -> Result<SeriesBlock> {
    let lorenz = concentration::lorenz(sample)?;
    let top_shares = TOP_SHARE_FRACTIONS
        .iter()
        .map(|f| {
            Ok(TopShareEntry {
                fraction: *f,
                share: concentration::top_share(sample, *f)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let p80 = concentration::pareto_rule_check(sample)?;

    Ok(SeriesBlock {
        kind,
        n: sample.len(),
        standardization_scale,
        tail,
        fits,
        zipf,
        bootstrap,
        gini: lorenz.gini,
        top_shares,
        p80,
    })
}

/// Distinct sorted values with their empirical tail probabilities and
/// relative frequencies.
fn distinct_value_table(sample: &Sample) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut sorted = sample.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut values = Vec::new();
    let mut tails = Vec::new();
    let mut freqs = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        values.push(v);
        tails.push((sorted.len() - i) as f64 / n);
        freqs.push((j - i) as f64 / n);
        i = j;
    }
    (values, tails, freqs)
}

/// One value per line, the plain-text sample exchange format.
pub fn sample_lines(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

/// Lorenz curve as two-column TSV.
pub fn lorenz_tsv(curve: &LorenzCurve) -> String {
    let mut out = String::from("population_share\tmoney_share\n");
    for (p, l) in &curve.points {
        out.push_str(&format!("{p}\t{l}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_records(n: usize) -> Vec<ProcurementRecord> {
        use crate::distributions::DistributionSpec;
        let prices = DistributionSpec::pareto(1.2, 1e6).unwrap().sample(n, 40).unwrap();
        let bidder_spec = DistributionSpec::exponential(0.3, 1.0).unwrap();
        let bidders = bidder_spec.sample(n, 41).unwrap();
        prices
            .values()
            .iter()
            .zip(bidders.values())
            .enumerate()
            .map(|(i, (p, b))| ProcurementRecord {
                tender_id: format!("t{i}"),
                authority_id: format!("A{}", i % 97),
                winner_id: format!("W{}", i % 403),
                price: *p,
                n_bidders: b.floor() as u32,
                date: None,
            })
            .collect()
    }

    fn fast_config() -> AnalysisConfig {
        AnalysisConfig {
            floor: 0.0,
            replicates: 100,
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn analysis_is_deterministic() {
        let records = synthetic_records(3000);
        let a = run_analysis(&records, 0, &fast_config(), 9).unwrap();
        let b = run_analysis(&records, 0, &fast_config(), 9).unwrap();
        let ja = serde_json::to_string_pretty(&a.report).unwrap();
        let jb = serde_json::to_string_pretty(&b.report).unwrap();
        assert_eq!(ja, jb);
        assert_eq!(a.plots, b.plots);
    }

    #[test]
    fn report_round_trips_through_json() {
        let records = synthetic_records(2000);
        let out = run_analysis(&records, 3, &fast_config(), 5).unwrap();
        let json = serde_json::to_string(&out.report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schema_version, REPORT_SCHEMA_VERSION);
        assert_eq!(back.summary, out.report.summary);
        assert_eq!(back.revenues.fits, out.report.revenues.fits);
        assert_eq!(back.n_skipped_rows, 3);
    }

    #[test]
    fn produces_six_plot_files_with_expected_names() {
        let records = synthetic_records(2000);
        let out = run_analysis(&records, 0, &fast_config(), 5).unwrap();
        let names: Vec<&str> = out.plots.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "fig1_cdf.tsv",
                "fig1_pdf.tsv",
                "fig2_cdf.tsv",
                "fig2_zipf.tsv",
                "fig3_cdf.tsv",
                "fig3_zipf.tsv"
            ]
        );
        for plot in &out.plots {
            assert!(!plot.rows.is_empty(), "{} is empty", plot.name);
            let tsv = plot.to_tsv();
            let mut lines = tsv.lines();
            assert_eq!(
                lines.next().unwrap(),
                format!("{}\t{}", plot.column_x, plot.column_y)
            );
            assert_eq!(lines.count(), plot.rows.len());
        }
    }

    #[test]
    fn cdf_plots_are_monotone() {
        let records = synthetic_records(2000);
        let out = run_analysis(&records, 0, &fast_config(), 5).unwrap();
        for plot in &out.plots {
            if plot.name.ends_with("_cdf.tsv") {
                for w in plot.rows.windows(2) {
                    assert!(w[1].0 >= w[0].0, "{}: x not sorted", plot.name);
                    assert!(w[1].1 <= w[0].1 + 1e-12, "{}: tail not decreasing", plot.name);
                }
            }
            if plot.name.ends_with("_zipf.tsv") {
                for w in plot.rows.windows(2) {
                    assert!(w[1].1 <= w[0].1 + 1e-12, "{}: size not decreasing", plot.name);
                }
            }
        }
    }

    #[test]
    fn series_errors_carry_the_series_name() {
        // Constant bidder counts make the exponential fit impossible.
        let records: Vec<ProcurementRecord> = (0..200)
            .map(|i| ProcurementRecord {
                tender_id: format!("t{i}"),
                authority_id: format!("A{i}"),
                winner_id: format!("W{i}"),
                price: 1e6 + i as f64 * 1e4,
                n_bidders: 4,
                date: None,
            })
            .collect();
        let err = run_analysis(&records, 0, &fast_config(), 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("bidders:"), "message was {msg}");
    }

    #[test]
    fn sample_lines_round_trip() {
        let text = sample_lines(&[1.5, 2.0, 0.25]);
        assert_eq!(text, "1.5\n2\n0.25\n");
    }
}
