//! Exact box-overlap ratios.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};

use crate::label::BoundingBox;

/// Exact ratio of two pixel areas.
pub type AreaRatio = Ratio<u64>;

/// Area of the union of `boxes`, by coordinate compression along x and
/// interval merging along y in each slab.
pub fn union_area(boxes: &[BoundingBox]) -> u64 {
    if boxes.is_empty() {
        return 0;
    }
    let mut xs: Vec<u32> = boxes.iter().flat_map(|b| [b.xmin, b.xmax]).collect();
    xs.sort_unstable();
    xs.dedup();
    let mut total = 0u64;
    let mut spans: Vec<(u32, u32)> = Vec::with_capacity(boxes.len());
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        spans.clear();
        spans.extend(
            boxes
                .iter()
                .filter(|b| b.xmin <= x0 && b.xmax >= x1)
                .map(|b| (b.ymin, b.ymax)),
        );
        if spans.is_empty() {
            continue;
        }
        spans.sort_unstable();
        let mut covered = 0u64;
        let (mut lo, mut hi) = spans[0];
        for &(a, b) in &spans[1..] {
            if a > hi {
                covered += (hi - lo) as u64;
                lo = a;
                hi = b;
            } else {
                hi = hi.max(b);
            }
        }
        covered += (hi - lo) as u64;
        total += covered * (x1 - x0) as u64;
    }
    total
}

/// Area of `target ∩ (∪ others)`.
pub fn covered_area(target: &BoundingBox, others: &[BoundingBox]) -> u64 {
    let clipped: Vec<BoundingBox> = others.iter().filter_map(|o| target.intersect(o)).collect();
    union_area(&clipped)
}

/// Intersection over union.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> AreaRatio {
    let inter = a.intersect(b).map_or(0, |i| i.area());
    Ratio::new(inter, a.area() + b.area() - inter)
}

/// Intersection over prediction: share of `pb` covered by the ground-truth boxes.
pub fn iop(pb: &BoundingBox, gtbs: &[BoundingBox]) -> AreaRatio {
    Ratio::new(covered_area(pb, gtbs), pb.area())
}

/// Intersection over ground truth: share of `gtb` covered by the predictions.
pub fn iog(gtb: &BoundingBox, pbs: &[BoundingBox]) -> AreaRatio {
    Ratio::new(covered_area(gtb, pbs), gtb.area())
}

/// A matching threshold held as the exact rational value of an `f64`, so
/// `ratio >= threshold` is decided without rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    value: f64,
    exact: BigRational,
}

impl Threshold {
    /// Panics on NaN or infinite input.
    pub fn new(value: f64) -> Self {
        let exact = BigRational::from_float(value).expect("finite threshold");
        Self { value, exact }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_met_by(&self, r: &AreaRatio) -> bool {
        let r = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
        r >= self.exact
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1)
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&b(0, 0, 10, 10), &b(0, 0, 10, 10)), Ratio::from_integer(1));
        assert_eq!(iou(&b(0, 0, 10, 10), &b(20, 20, 30, 30)), Ratio::from_integer(0));
        assert_eq!(iou(&b(0, 0, 10, 10), &b(5, 5, 15, 15)), Ratio::new(1, 7));
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_area(&[]), 0);
        assert_eq!(union_area(&[b(0, 0, 10, 10), b(0, 0, 10, 10)]), 100);
        assert_eq!(union_area(&[b(0, 0, 10, 10), b(5, 5, 15, 15)]), 175);
    }

    #[test]
    fn iop_does_not_double_count() {
        let pb = b(0, 0, 10, 10);
        assert_eq!(iop(&pb, std::slice::from_ref(&pb)), Ratio::from_integer(1));
        assert_eq!(iop(&pb, &[]), Ratio::from_integer(0));
        assert_eq!(iop(&pb, &[b(5, 0, 15, 10), b(0, 5, 10, 15)]), Ratio::new(3, 4));
    }

    #[test]
    fn iog_examples() {
        let g = b(0, 0, 10, 10);
        assert_eq!(iog(&g, std::slice::from_ref(&g)), Ratio::from_integer(1));
        assert_eq!(iog(&g, &[]), Ratio::from_integer(0));
        assert_eq!(iog(&g, &[b(0, 0, 5, 10), b(5, 0, 10, 5)]), Ratio::new(3, 4));
    }

    #[test]
    fn threshold_is_exact() {
        let t = Threshold::new(0.5);
        assert!(t.is_met_by(&Ratio::new(1, 2)));
        assert!(!t.is_met_by(&Ratio::new(49_999_999, 100_000_000)));
        // 0.1 as f64 is slightly above 1/10
        assert!(!Threshold::new(0.1).is_met_by(&Ratio::new(1, 10)));
        assert!(Threshold::new(0.0).is_met_by(&Ratio::from_integer(0)));
    }
}
