//! Intervals, rectangles and cyclic partitions of the unit period.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("interval must satisfy 0 <= a < b <= a + 1 (got a={a}, b={b})")]
    BadInterval { a: f64, b: f64 },
    #[error("rectangle is degenerate")]
    DegenerateRectangle,
    #[error("partition points must be strictly increasing within [0, 1)")]
    BadPartition,
}

/// An interval `(a, b)` on the period; `b` may exceed 1 (wrap intervals from
/// cyclic partitions) but never by more than a full period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(0.0..1.0).contains(&a) || !(b > a) || b > a + 1.0 {
            return Err(GeometryError::BadInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x: Interval,
    pub y: Interval,
}

impl Rectangle {
    pub fn new(x: Interval, y: Interval) -> Self {
        Rectangle { x, y }
    }

    /// Interiors disjoint?
    pub fn overlaps(&self, other: &Rectangle) -> bool {
        self.x.a < other.x.b && other.x.a < self.x.b && self.y.a < other.y.b && other.y.a < self.y.b
    }
}

/// Points `t_1 < ... < t_m` in `[0, 1)`; the intervals are `(t_i, t_{i+1})`
/// plus the wrap interval `(t_m, t_1 + 1)`. Gaps are all positive and sum to
/// exactly one period.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CyclicPartition {
    points: Vec<f64>,
}

impl CyclicPartition {
    pub fn new(mut points: Vec<f64>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::BadPartition);
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if !points.iter().all(|t| (0.0..1.0).contains(t)) {
            return Err(GeometryError::BadPartition);
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GeometryError::BadPartition);
        }
        Ok(CyclicPartition { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The m intervals in cyclic order, wrap interval last.
    pub fn intervals(&self) -> Vec<Interval> {
        let m = self.points.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m - 1 {
            out.push(Interval { a: self.points[i], b: self.points[i + 1] });
        }
        out.push(Interval { a: self.points[m - 1], b: self.points[0] + 1.0 });
        out
    }

    pub fn min_gap(&self) -> f64 {
        self.intervals().iter().map(|i| i.length()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interval_validation() {
        assert!(Interval::new(0.2, 0.7).is_ok());
        assert!(Interval::new(0.2, 1.1).is_ok()); // wrap interval
        assert!(Interval::new(0.2, 1.3).is_err());
        assert!(Interval::new(0.5, 0.5).is_err());
        assert!(Interval::new(-0.1, 0.5).is_err());
    }

    #[test]
    fn partition_gaps_cover_the_period() {
        let p = CyclicPartition::new(vec![0.125, 0.5, 0.625]).unwrap();
        let total: f64 = p.intervals().iter().map(|i| i.length()).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.min_gap(), 0.125);
    }

    #[test]
    fn single_point_partition() {
        let p = CyclicPartition::new(vec![0.3]).unwrap();
        let iv = p.intervals();
        assert_eq!(iv.len(), 1);
        assert_relative_eq!(iv[0].length(), 1.0);
    }

    #[test]
    fn rectangle_overlap() {
        let a = Rectangle::new(Interval::new(0.0, 0.5).unwrap(), Interval::new(0.0, 0.5).unwrap());
        let b = Rectangle::new(Interval::new(0.5, 0.9).unwrap(), Interval::new(0.0, 0.5).unwrap());
        let c = Rectangle::new(Interval::new(0.2, 0.6).unwrap(), Interval::new(0.2, 0.6).unwrap());
        assert!(!a.overlaps(&b)); // shared edge only
        assert!(a.overlaps(&c));
    }
}
