//! Change-detection scoring: confusion counts against CDnet ground truth,
//! the seven standard metrics, and per-category / overall averaging.

use std::fmt::Write as _;
use std::ops::{Add, AddAssign};

use crate::bgmodel::Mask;
use crate::error::{Error, Result};
use crate::imageio::{Frame, GroundTruthFrame, Label, TemporalWindow};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        ConfusionCounts { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Adds one frame's pixels.
    ///
    /// Frames outside `window`, pixels where `roi` is zero, and pixels
    /// labeled outside-ROI (85) or unknown (170) are skipped. Motion (255) is
    /// positive; static (0) and hard shadow (50) are negative.
    pub fn accumulate(
        &mut self,
        mask: &Mask,
        gt: &GroundTruthFrame,
        roi: Option<&Frame>,
        window: Option<TemporalWindow>,
        frame_index: u32,
    ) -> Result<()> {
        if mask.dims() != gt.dims() {
            return Err(Error::dimension_mismatch(gt.dims(), mask.dims()));
        }
        if let Some(roi) = roi {
            roi.ensure_dims(gt.dims())?;
        }
        if window.is_some_and(|w| !w.contains(frame_index)) {
            return Ok(());
        }
        for i in 0..gt.labels().len() {
            if roi.is_some_and(|r| r.data()[i] == 0) {
                continue;
            }
            let predicted = mask.is_foreground(i);
            match gt.label(i) {
                Label::OutsideRoi | Label::Unknown => {}
                Label::Motion if predicted => self.tp += 1,
                Label::Motion => self.fn_ += 1,
                Label::Static | Label::HardShadow if predicted => self.fp += 1,
                Label::Static | Label::HardShadow => self.tn += 1,
            }
        }
        Ok(())
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, rhs: Self) -> Self {
        ConfusionCounts {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            tn: self.tn + rhs.tn,
            fn_: self.fn_ + rhs.fn_,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ConfusionCounts::default(), Add::add)
    }
}

/// The seven scores. PWC is a percentage; the others lie in [0, 1].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub recall: f64,
    pub specificity: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub pwc: f64,
    pub precision: f64,
    pub fmeasure: f64,
}

fn ratio(num: u64, den: u64, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

impl MetricsReport {
    pub const FIELDS: [&'static str; 7] = [
        "recall",
        "specificity",
        "fpr",
        "fnr",
        "pwc",
        "precision",
        "fmeasure",
    ];

    /// Scores from counts. A zero denominator yields 0, except specificity
    /// which is 1 when there are no negatives.
    pub fn compute(c: &ConfusionCounts) -> Self {
        let recall = ratio(c.tp, c.tp + c.fn_, 0.0);
        let precision = ratio(c.tp, c.tp + c.fp, 0.0);
        let fmeasure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        MetricsReport {
            recall,
            specificity: ratio(c.tn, c.tn + c.fp, 1.0),
            fpr: ratio(c.fp, c.fp + c.tn, 0.0),
            fnr: ratio(c.fn_, c.tp + c.fn_, 0.0),
            pwc: 100.0 * ratio(c.fn_ + c.fp, c.total(), 0.0),
            precision,
            fmeasure,
        }
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.recall,
            self.specificity,
            self.fpr,
            self.fnr,
            self.pwc,
            self.precision,
            self.fmeasure,
        ]
    }

    pub fn from_values(v: [f64; 7]) -> Self {
        MetricsReport {
            recall: v[0],
            specificity: v[1],
            fpr: v[2],
            fnr: v[3],
            pwc: v[4],
            precision: v[5],
            fmeasure: v[6],
        }
    }

    /// Field-wise arithmetic mean.
    pub fn mean(reports: &[MetricsReport]) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::EmptyAggregate);
        }
        let mut sum = [0.0; 7];
        for r in reports {
            for (s, v) in sum.iter_mut().zip(r.values()) {
                *s += v;
            }
        }
        Ok(Self::from_values(sum.map(|s| s / reports.len() as f64)))
    }
}

impl From<ConfusionCounts> for MetricsReport {
    fn from(c: ConfusionCounts) -> Self {
        MetricsReport::compute(&c)
    }
}

pub fn compute(counts: &ConfusionCounts) -> MetricsReport {
    MetricsReport::compute(counts)
}

/// How per-sequence counts are combined into category rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Averaging {
    /// Score each sequence, average sequences within a category, then
    /// average categories. This is how CDnet tables are built.
    #[default]
    MeanOfSequences,
    /// Sum counts within a category (and over everything for the overall
    /// row) before scoring.
    Pooled,
}

/// Category rows in first-seen order plus the overall row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportTable {
    pub categories: Vec<(String, MetricsReport)>,
    pub overall: MetricsReport,
}

fn group<T: Clone>(entries: &[(String, T)]) -> Vec<(String, Vec<T>)> {
    let mut groups: Vec<(String, Vec<T>)> = Vec::new();
    for (name, item) in entries {
        match groups.iter_mut().find(|(n, _)| n == name) {
            Some((_, items)) => items.push(item.clone()),
            None => groups.push((name.clone(), vec![item.clone()])),
        }
    }
    groups
}

/// Two-level mean over `(category, per-sequence report)` pairs.
pub fn aggregate(per_sequence: &[(String, MetricsReport)]) -> Result<ReportTable> {
    if per_sequence.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let categories = group(per_sequence)
        .into_iter()
        .map(|(name, reports)| Ok((name, MetricsReport::mean(&reports)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = categories.iter().map(|(_, r)| *r).collect();
    Ok(ReportTable {
        overall: MetricsReport::mean(&rows)?,
        categories,
    })
}

/// Aggregates `(category, per-sequence counts)` pairs.
pub fn aggregate_counts(
    per_sequence: &[(String, ConfusionCounts)],
    mode: Averaging,
) -> Result<ReportTable> {
    match mode {
        Averaging::MeanOfSequences => {
            let reports: Vec<_> = per_sequence
                .iter()
                .map(|(name, c)| (name.clone(), MetricsReport::compute(c)))
                .collect();
            aggregate(&reports)
        }
        Averaging::Pooled => {
            if per_sequence.is_empty() {
                return Err(Error::EmptyAggregate);
            }
            let categories = group(per_sequence)
                .into_iter()
                .map(|(name, counts)| (name, counts.into_iter().sum::<ConfusionCounts>().into()))
                .collect();
            let total: ConfusionCounts = per_sequence.iter().map(|(_, c)| *c).sum();
            Ok(ReportTable {
                categories,
                overall: total.into(),
            })
        }
    }
}

/// Formats to 4 decimal places, rounding half to even.
pub fn format_value(v: f64) -> String {
    let scaled = (v * 1e4).round_ties_even();
    format!("{:.4}", scaled / 1e4)
}

pub const CSV_HEADER: &str = "category,recall,specificity,fpr,fnr,pwc,precision,fmeasure";

impl ReportTable {
    /// CSV with one row per category and a final `overall` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        let rows = self
            .categories
            .iter()
            .map(|(n, r)| (n.as_str(), r))
            .chain(std::iter::once(("overall", &self.overall)));
        for (name, report) in rows {
            out.push_str(name);
            for v in report.values() {
                let _ = write!(out, ",{}", format_value(v));
            }
            out.push('\n');
        }
        out
    }
}
