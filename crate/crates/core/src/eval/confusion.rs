use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::raster::Mask;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    #[inline]
    pub fn record(&mut self, pred: bool, truth: bool) {
        match (pred, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    /// Counts over the pixels where `valid` is true (all pixels if `None`).
    pub fn from_masks(pred: &Mask, truth: &Mask, valid: Option<&[bool]>) -> Result<Self, EvalError> {
        if pred.shape() != truth.shape() || valid.is_some_and(|v| v.len() != pred.data().len()) {
            return Err(EvalError::ShapeMismatch(format!(
                "prediction {:?} vs ground truth {:?}",
                pred.shape(),
                truth.shape()
            )));
        }
        let mut c = Self::default();
        for (i, (p, t)) in pred.data().iter().zip(truth.data()).enumerate() {
            if valid.is_none_or(|v| v[i]) {
                c.record(*p, *t);
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    fn ratio(num: u64, den: u64) -> Option<f64> {
        (den > 0).then(|| 100.0 * num as f64 / den as f64)
    }

    pub fn precision(&self) -> Option<f64> {
        Self::ratio(self.tp, self.tp + self.fp)
    }
    pub fn recall(&self) -> Option<f64> {
        Self::ratio(self.tp, self.tp + self.fn_)
    }
    pub fn accuracy(&self) -> Option<f64> {
        Self::ratio(self.tp + self.tn, self.total())
    }
    pub fn iou(&self) -> Option<f64> {
        Self::ratio(self.tp, self.tp + self.fp + self.fn_)
    }
    /// Harmonic mean of precision and recall.
    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision().unwrap_or(0.0), self.recall().unwrap_or(0.0));
        if self.tp + self.fp + self.fn_ == 0 {
            None
        } else if p + r > 0.0 {
            Some(2.0 * p * r / (p + r))
        } else {
            Some(0.0)
        }
    }
}

impl Add for ConfusionCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_case() {
        let pred = Mask::new(1, 4, vec![true, true, false, false]).unwrap();
        let gt = Mask::new(1, 4, vec![true, false, true, true]).unwrap();
        let c = ConfusionCounts::from_masks(&pred, &gt, None).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 1, fn_: 2, tn: 0 });
        assert_eq!(c.precision(), Some(50.0));
        assert!((c.recall().unwrap() - 100.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.iou(), Some(25.0));
    }

    #[test]
    fn valid_mask_and_shapes() {
        let pred = Mask::new(1, 2, vec![true, true]).unwrap();
        let gt = Mask::new(1, 2, vec![false, false]).unwrap();
        let c = ConfusionCounts::from_masks(&pred, &gt, Some(&[true, false])).unwrap();
        assert_eq!(c.fp, 1);
        assert!(ConfusionCounts::from_masks(&pred, &Mask::zeros(2, 1), None).is_err());
    }

    #[test]
    fn empty_denominators() {
        let c = ConfusionCounts { tn: 5, ..Default::default() };
        assert_eq!((c.precision(), c.recall(), c.iou(), c.f1()), (None, None, None, None));
        assert_eq!(c.accuracy(), Some(100.0));
    }
}
