//! Confusion matrix and the derived scalar metrics. `+1` is the positive class.

use crate::dataset::{Dataset, Label};
use crate::model::LinearModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Pos, Label::Pos) => self.tp += 1,
            (Label::Pos, Label::Neg) => self.fn_ += 1,
            (Label::Neg, Label::Pos) => self.fp += 1,
            (Label::Neg, Label::Neg) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn report(&self) -> EvalReport {
        EvalReport::from_confusion(*self)
    }
}

pub fn confusion<T: Scalar>(model: &LinearModel<T>, ds: &Dataset<T>) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::default();
    for s in ds.samples() {
        cm.record(s.label, model.decide(s));
    }
    cm
}

pub fn evaluate<T: Scalar>(model: &LinearModel<T>, ds: &Dataset<T>) -> EvalReport {
    confusion(model, ds).report()
}

/// Which ratios hit `0/0` and were reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegenerateFlags {
    pub accuracy: bool,
    pub precision: bool,
    pub recall: bool,
    pub specificity: bool,
    pub f1: bool,
}

impl DegenerateFlags {
    pub fn any(&self) -> bool {
        self.accuracy || self.precision || self.recall || self.specificity || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    /// `TP/(TP+FN)`, identical to recall.
    pub sensitivity: f64,
    /// `TP/(TP+FP)`, the alternative reading that coincides with precision.
    pub sensitivity_alt: f64,
    pub f1: f64,
    pub gmean: f64,
    pub degenerate: DegenerateFlags,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_confusion(cm: ConfusionMatrix) -> Self {
        let ConfusionMatrix { tp, fn_, fp, tn } = cm;
        let mut flags = DegenerateFlags::default();
        let accuracy = ratio(tp + tn, cm.total(), &mut flags.accuracy);
        let precision = ratio(tp, tp + fp, &mut flags.precision);
        let recall = ratio(tp, tp + fn_, &mut flags.recall);
        let specificity = ratio(tn, tn + fp, &mut flags.specificity);
        let f1 = if recall + precision > 0.0 {
            2.0 * recall * precision / (recall + precision)
        } else {
            flags.f1 = true;
            0.0
        };
        Self {
            confusion: cm,
            accuracy,
            precision,
            recall,
            specificity,
            sensitivity: recall,
            sensitivity_alt: precision,
            f1,
            gmean: (recall * specificity).sqrt(),
            degenerate: flags,
        }
    }

    /// `accuracy,precision,recall,specificity,f1,gmean`
    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.accuracy, self.precision, self.recall, self.specificity, self.f1, self.gmean
        )
    }
}
