//! Binary confusion matrices and classification reports.
//!
//! Conventions: rows are true classes, columns predicted classes, class
//! order (negative, positive). Empty rows or columns contribute 0 to the
//! affected rate instead of dividing by zero.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 2x2 matrix of counts, `counts[true][pred]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[usize; 2]; 2]) -> Self {
        ConfusionMatrix { counts }
    }

    /// Tally labels in {0, 1}.
    pub fn from_predictions(y_true: &[usize], y_pred: &[usize]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::DimensionMismatch {
                left: y_true.len(),
                right: y_pred.len(),
            });
        }
        let mut counts = [[0usize; 2]; 2];
        for (&t, &p) in y_true.iter().zip(y_pred.iter()) {
            if t > 1 {
                return Err(Error::ClassOutOfRange {
                    label: t,
                    n_classes: 2,
                });
            }
            if p > 1 {
                return Err(Error::ClassOutOfRange {
                    label: p,
                    n_classes: 2,
                });
            }
            counts[t][p] += 1;
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn count(&self, true_class: usize, predicted_class: usize) -> usize {
        self.counts[true_class][predicted_class]
    }

    pub fn counts(&self) -> [[usize; 2]; 2] {
        self.counts
    }

    /// Row sum: number of samples whose true class is `class`.
    pub fn support(&self, class: usize) -> usize {
        self.counts[class][0] + self.counts[class][1]
    }

    /// Column sum: number of samples predicted as `class`.
    pub fn predicted(&self, class: usize) -> usize {
        self.counts[0][class] + self.counts[1][class]
    }

    pub fn total(&self) -> usize {
        self.support(0) + self.support(1)
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }
}

/// Precision/recall/F1 and support of one class.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class metrics with accuracy and macro/weighted averages, the shape of
/// a standard accuracy report.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub classes: [ClassMetrics; 2],
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub total: usize,
}

/// Build the report for a confusion matrix. Fails on an all-zero matrix.
pub fn report(cm: &ConfusionMatrix, class_names: [&str; 2]) -> Result<ClassificationReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mut classes = Vec::with_capacity(2);
    for c in 0..2 {
        let precision = ratio(cm.count(c, c), cm.predicted(c));
        let recall = ratio(cm.count(c, c), cm.support(c));
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        classes.push(ClassMetrics {
            name: class_names[c].to_string(),
            precision,
            recall,
            f1,
            support: cm.support(c),
        });
    }
    let [neg, pos]: [ClassMetrics; 2] = classes.try_into().expect("two classes");
    let weight = |c: &ClassMetrics| c.support as f64 / total as f64;
    let (w0, w1) = (weight(&neg), weight(&pos));
    Ok(ClassificationReport {
        accuracy: cm.correct() as f64 / total as f64,
        macro_precision: (neg.precision + pos.precision) / 2.0,
        macro_recall: (neg.recall + pos.recall) / 2.0,
        macro_f1: (neg.f1 + pos.f1) / 2.0,
        weighted_precision: w0 * neg.precision + w1 * pos.precision,
        weighted_recall: w0 * neg.recall + w1 * pos.recall,
        weighted_f1: w0 * neg.f1 + w1 * pos.f1,
        total,
        classes: [neg, pos],
    })
}

impl ClassificationReport {
    /// Fixed-width text table: one row per class, then accuracy, macro and
    /// weighted averages, rounded to two decimals.
    pub fn render_text(&self) -> String {
        let name_width = self
            .classes
            .iter()
            .map(|c| c.name.len())
            .chain(["weighted avg".len()])
            .max()
            .unwrap_or(12);
        let mut out = String::new();
        out.push_str(&format!(
            "{:>name_width$} {:>10} {:>10} {:>10} {:>10}\n\n",
            "", "precision", "recall", "f1-score", "support"
        ));
        for class in &self.classes {
            out.push_str(&format!(
                "{:>name_width$} {:>10.2} {:>10.2} {:>10.2} {:>10}\n",
                class.name, class.precision, class.recall, class.f1, class.support
            ));
        }
        out.push('\n');
        out.push_str(&format!(
            "{:>name_width$} {:>10} {:>10} {:>10.2} {:>10}\n",
            "accuracy", "", "", self.accuracy, self.total
        ));
        out.push_str(&format!(
            "{:>name_width$} {:>10.2} {:>10.2} {:>10.2} {:>10}\n",
            "macro avg", self.macro_precision, self.macro_recall, self.macro_f1, self.total
        ));
        out.push_str(&format!(
            "{:>name_width$} {:>10.2} {:>10.2} {:>10.2} {:>10}\n",
            "weighted avg",
            self.weighted_precision,
            self.weighted_recall,
            self.weighted_f1,
            self.total
        ));
        out
    }
}
