//! Uniformity-of-P-values and proportion-of-passing analysis across sequences.

use serde::{Deserialize, Serialize};

use super::special::igamc;
use super::{TestId, TestResult};

pub const REPORT_TITLE: &str =
    "RESULTS FOR THE UNIFORMITY OF P-VALUES AND THE PROPORTION OF PASSING SEQUENCES";

/// Minimum number of passing sequences out of `sample_size` at level `alpha`.
pub fn pass_threshold(sample_size: usize, alpha: f64) -> usize {
    if sample_size == 0 {
        return 0;
    }
    let s = sample_size as f64;
    let p = 1.0 - alpha;
    let bound = s * (p - 3.0 * (p * (1.0 - p) / s).sqrt());
    bound.max(0.0).floor() as usize
}

/// Index of the tenth of [0, 1] holding `p`; 1.0 goes into the last bin.
fn decade(p: f64) -> usize {
    ((p * 10.0).floor() as usize).min(9)
}

/// Chi-square uniformity P-value of ten decade counts.
///
/// The expected count per bin is `total / 10` in integer arithmetic, as in the
/// reference assessment code; fewer than ten samples give `None`.
pub fn uniformity_pvalue(counts: &[usize; 10]) -> Option<f64> {
    let total: usize = counts.iter().sum();
    let expected = (total / 10) as f64;
    if expected == 0.0 {
        return None;
    }
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    Some(igamc(4.5, chi2 / 2.0).expect("chi-square statistic is finite and non-negative"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub test: TestId,
    /// Position of this statistic among the test's P-values.
    pub index: usize,
    pub counts: [usize; 10],
    /// `None` when fewer than ten sequences were applicable.
    pub uniformity_p: Option<f64>,
    pub passing: usize,
    pub total: usize,
    pub threshold: usize,
    pub passed: bool,
}

impl ReportRow {
    pub fn proportion(&self) -> String {
        format!("{}/{}", self.passing, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub alpha: f64,
    pub sequences: usize,
    pub rows: Vec<ReportRow>,
}

impl SuiteReport {
    /// True when every row meets its proportion threshold.
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    /// Tab-separated table in the classic suite layout.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_TITLE);
        out.push_str("\n\n");
        out.push_str("C1\tC2\tC3\tC4\tC5\tC6\tC7\tC8\tC9\tC10\tP-VALUE\tPROPORTION\tSTATISTICAL TEST\n");
        for row in &self.rows {
            for c in row.counts {
                out.push_str(&format!("{c}\t"));
            }
            match row.uniformity_p {
                Some(p) => out.push_str(&format!("{p:.6}\t")),
                None => out.push_str("----\t"),
            }
            out.push_str(&format!("{}\t{}\n", row.proportion(), row.test.name()));
        }
        out.push('\n');
        let full = pass_threshold(self.sequences, self.alpha);
        out.push_str(&format!(
            "The minimum pass rate for each statistical test with the exception of the random excursion (variant) test is approximately = {full} for a sample size = {} binary sequences.\n",
            self.sequences
        ));
        if let Some(row) = self
            .rows
            .iter()
            .find(|r| matches!(r.test, TestId::RandomExcursions | TestId::RandomExcursionsVariant))
        {
            out.push_str(&format!(
                "The minimum pass rate for the random excursion (variant) test is approximately {} for a sample size = {} binary sequences.\n",
                row.threshold, row.total
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Aggregates per-sequence results into one row per statistic.
///
/// `results[s]` holds the results for sequence `s`; every sequence must list
/// the same tests in the same order. Rows with no applicable sequence are
/// reported but do not count as failures.
pub fn analyze_suite(results: &[Vec<TestResult>], alpha: f64) -> SuiteReport {
    let mut rows = Vec::new();
    let Some(first) = results.first() else {
        return SuiteReport {
            alpha,
            sequences: 0,
            rows,
        };
    };
    for (t, template) in first.iter().enumerate() {
        for index in 0..template.pvalues.len() {
            let mut counts = [0usize; 10];
            let mut passing = 0;
            let mut total = 0;
            for seq in results {
                let r = &seq[t];
                debug_assert_eq!(r.test, template.test);
                if !r.applicable {
                    continue;
                }
                let p = r.pvalues[index];
                counts[decade(p)] += 1;
                total += 1;
                if p >= alpha {
                    passing += 1;
                }
            }
            let threshold = pass_threshold(total, alpha);
            rows.push(ReportRow {
                test: template.test,
                index,
                counts,
                uniformity_p: uniformity_pvalue(&counts),
                passing,
                total,
                threshold,
                passed: total == 0 || passing >= threshold,
            });
        }
    }
    SuiteReport {
        alpha,
        sequences: results.len(),
        rows,
    }
}
