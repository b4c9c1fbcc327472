//! 1-periodic piecewise-linear functions with dyadic breakpoints.

use super::dyadic::DyadicRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FunctionError {
    #[error("breakpoints must be strictly increasing within [0, 1)")]
    BadBreakpoints,
    #[error("breakpoint/value length mismatch: {bp} vs {vals}")]
    LengthMismatch { bp: usize, vals: usize },
    #[error("need at least one breakpoint")]
    Empty,
    #[error("invalid comb geometry: {0}")]
    BadComb(String),
}

/// Values at sorted dyadic breakpoints in `[0, 1)`, linearly interpolated and
/// extended with period 1 (the segment from the last breakpoint wraps to the
/// first).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PwlRepr", into = "PwlRepr")]
pub struct PiecewiseLinearPeriodic {
    breakpoints: Vec<DyadicRational>,
    xs: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PwlRepr {
    bp: Vec<(i64, u32)>,
    vals: Vec<f64>,
}

impl From<PiecewiseLinearPeriodic> for PwlRepr {
    fn from(p: PiecewiseLinearPeriodic) -> Self {
        PwlRepr {
            bp: p.breakpoints.iter().map(|d| (d.numerator(), d.exponent())).collect(),
            vals: p.values,
        }
    }
}

impl TryFrom<PwlRepr> for PiecewiseLinearPeriodic {
    type Error = FunctionError;

    fn try_from(r: PwlRepr) -> Result<Self, FunctionError> {
        let bps: Vec<DyadicRational> =
            r.bp.into_iter().map(|(n, e)| DyadicRational::new(n, e)).collect();
        PiecewiseLinearPeriodic::new(bps, r.vals)
    }
}

impl PiecewiseLinearPeriodic {
    pub fn new(
        breakpoints: Vec<DyadicRational>,
        values: Vec<f64>,
    ) -> Result<Self, FunctionError> {
        if breakpoints.is_empty() {
            return Err(FunctionError::Empty);
        }
        if breakpoints.len() != values.len() {
            return Err(FunctionError::LengthMismatch {
                bp: breakpoints.len(),
                vals: values.len(),
            });
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(FunctionError::BadBreakpoints);
            }
        }
        if !breakpoints.iter().all(|b| b.is_in_unit_interval()) {
            return Err(FunctionError::BadBreakpoints);
        }
        let xs = breakpoints.iter().map(|b| b.to_f64()).collect();
        Ok(PiecewiseLinearPeriodic { breakpoints, xs, values })
    }

    pub fn constant(v: f64) -> Self {
        Self::new(vec![DyadicRational::zero()], vec![v]).unwrap()
    }

    /// The symmetric triangle: 0 at 0, peak `h` at 1/2.
    pub fn triangle(h: f64) -> Self {
        Self::new(
            vec![DyadicRational::zero(), DyadicRational::new(1, 1)],
            vec![0.0, h],
        )
        .unwrap()
    }

    pub fn breakpoints(&self) -> &[DyadicRational] {
        &self.breakpoints
    }

    pub fn breakpoint_xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Points where `|f|` attains its maximum (always breakpoints).
    pub fn abs_sup_points(&self) -> Vec<f64> {
        let m = self.sup_norm();
        self.xs
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.abs() == m)
            .map(|(x, _)| *x)
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut u = x - x.floor();
        // exact hit fast path keeps witness evaluation free of interpolation
        // roundoff at the nodes
        match self.xs.binary_search_by(|b| b.partial_cmp(&u).unwrap()) {
            Ok(i) => self.values[i],
            Err(pos) => {
                let n = self.xs.len();
                let (x0, v0, x1, v1) = if pos == 0 || pos == n {
                    // wrap segment from the last breakpoint to the first + 1
                    if pos == 0 {
                        u += 1.0;
                    }
                    (self.xs[n - 1], self.values[n - 1], self.xs[0] + 1.0, self.values[0])
                } else {
                    (self.xs[pos - 1], self.values[pos - 1], self.xs[pos], self.values[pos])
                };
                if x1 == x0 {
                    v0
                } else {
                    v0 + (v1 - v0) * (u - x0) / (x1 - x0)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangle_values() {
        let t = PiecewiseLinearPeriodic::triangle(1.0);
        assert_relative_eq!(t.eval(0.25), 0.5);
        assert_relative_eq!(t.eval(0.5), 1.0);
        assert_relative_eq!(t.eval(0.75), 0.5);
        assert_relative_eq!(t.eval(1.25), 0.5); // periodic
        assert_relative_eq!(t.eval(-0.25), 0.5);
        assert_relative_eq!(t.sup_norm(), 1.0);
    }

    #[test]
    fn constant_function() {
        let c = PiecewiseLinearPeriodic::constant(3.5);
        assert_relative_eq!(c.eval(0.123), 3.5);
        assert_relative_eq!(c.eval(0.9), 3.5);
    }

    #[test]
    fn validation() {
        assert!(PiecewiseLinearPeriodic::new(vec![], vec![]).is_err());
        let bad = PiecewiseLinearPeriodic::new(
            vec![DyadicRational::new(1, 1), DyadicRational::new(1, 2)],
            vec![0.0, 1.0],
        );
        assert!(bad.is_err()); // 1/2 then 1/4 not increasing
    }

    #[test]
    fn periodicity_holds_by_construction() {
        let f = PiecewiseLinearPeriodic::new(
            vec![DyadicRational::zero(), DyadicRational::new(1, 2), DyadicRational::new(3, 2)],
            vec![0.2, -0.4, 0.9],
        )
        .unwrap();
        for x in [0.0, 0.1, 0.37, 0.61, 0.93] {
            assert_relative_eq!(f.eval(x), f.eval(x + 1.0), max_relative = 1e-12);
        }
    }
}
