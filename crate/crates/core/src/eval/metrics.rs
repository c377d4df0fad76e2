use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class metrics in the requested label order; macro figures are
/// unweighted means over those classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub classes: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub total: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Zero-denominator metrics are 0 with a logged warning. Samples whose true or
/// predicted label is outside `labels` only count towards accuracy.
pub fn classification_report<S: AsRef<str>>(y_true: &[S], y_pred: &[S], labels: &[S]) -> Result<ClassReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidInput(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::InvalidInput("classification report of zero samples".into()));
    }
    if labels.is_empty() {
        return Err(Error::InvalidInput("classification report needs at least one label".into()));
    }
    let labels: Vec<&str> = labels.iter().map(AsRef::as_ref).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::InvalidInput(format!("label `{l}` listed twice")));
        }
    }

    let mut classes = Vec::with_capacity(labels.len());
    for &label in &labels {
        let (mut tp, mut predicted, mut support) = (0, 0, 0);
        for (t, p) in y_true.iter().zip(y_pred) {
            let (t, p) = (t.as_ref() == label, p.as_ref() == label);
            tp += usize::from(t && p);
            predicted += usize::from(p);
            support += usize::from(t);
        }
        if support == 0 {
            warn!("label `{label}` has no true samples; recall and F1 set to 0");
        }
        if predicted == 0 {
            warn!("label `{label}` is never predicted; precision set to 0");
        }
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        classes.push(ClassMetrics {
            label: label.to_string(),
            precision,
            recall,
            f1,
            support,
        });
    }
    let n = classes.len() as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(f).sum::<f64>() / n;
    let correct = y_true.iter().zip(y_pred).filter(|(t, p)| t.as_ref() == p.as_ref()).count();
    Ok(ClassReport {
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        accuracy: ratio(correct, y_true.len()),
        total: y_true.len(),
        classes,
    })
}

impl ClassReport {
    pub fn class(&self, label: &str) -> Option<&ClassMetrics> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Percentages with two decimals, one row per class then the macro row.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {:>9} {:>9} {:>9} {:>8}", "", "precision", "recall", "f1-score", "support");
        for c in &self.classes {
            let _ = writeln!(
                s,
                "{:<10} {:>9.2} {:>9.2} {:>9.2} {:>8}",
                c.label,
                100.0 * c.precision,
                100.0 * c.recall,
                100.0 * c.f1,
                c.support
            );
        }
        let _ = writeln!(
            s,
            "{:<10} {:>9.2} {:>9.2} {:>9.2} {:>8}",
            "macro avg",
            100.0 * self.macro_precision,
            100.0 * self.macro_recall,
            100.0 * self.macro_f1,
            self.total
        );
        let _ = writeln!(s, "{:<10} {:>29.2} {:>8}", "accuracy", 100.0 * self.accuracy, self.total);
        s
    }
}
