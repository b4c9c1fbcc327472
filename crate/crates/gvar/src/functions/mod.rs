//! 1-periodic functions (piecewise-linear and dyadic-comb forms), tensor
//! sums of them, and the geometric vocabulary the variation functionals
//! quantify over.

mod comb;
mod dyadic;
mod geometry;
mod pwl;
mod tensor;

pub use comb::DyadicComb;
pub use dyadic::{DyadicRational, MAX_EXPONENT};
pub use geometry::{CyclicPartition, GeometryError, Interval, Rectangle};
pub use pwl::{FunctionError, PiecewiseLinearPeriodic};
pub use tensor::{TensorSum2D, TensorTerm};

use serde::{Deserialize, Serialize};

/// A 1-periodic function in one of the two supported closed forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Function1D {
    Pwl(PiecewiseLinearPeriodic),
    Comb(DyadicComb),
}

impl From<PiecewiseLinearPeriodic> for Function1D {
    fn from(p: PiecewiseLinearPeriodic) -> Self {
        Function1D::Pwl(p)
    }
}

impl From<DyadicComb> for Function1D {
    fn from(c: DyadicComb) -> Self {
        Function1D::Comb(c)
    }
}

impl Function1D {
    pub fn constant(v: f64) -> Self {
        Function1D::Pwl(PiecewiseLinearPeriodic::constant(v))
    }

    pub fn triangle(h: f64) -> Self {
        Function1D::Pwl(PiecewiseLinearPeriodic::triangle(h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Function1D::Pwl(p) => p.eval(x),
            Function1D::Comb(c) => c.eval(x),
        }
    }

    pub fn eval_dyadic(&self, x: &DyadicRational) -> f64 {
        match self {
            Function1D::Pwl(p) => p.eval(x.to_f64()),
            Function1D::Comb(c) => c.eval_dyadic(x),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Function1D::Pwl(p) => p.sup_norm(),
            Function1D::Comb(c) => c.amplitude(),
        }
    }

    /// Breakpoint abscissae in `[0, 1)` when finitely enumerable under the
    /// cap; combs past the cap return `None` (their geometry is handled in
    /// closed form instead).
    pub fn breakpoint_xs_capped(&self, max_points: usize) -> Option<Vec<f64>> {
        match self {
            Function1D::Pwl(p) => {
                let xs = p.breakpoint_xs();
                (xs.len() <= max_points).then(|| xs.to_vec())
            }
            Function1D::Comb(c) => {
                let twin = c.materialize((max_points / 3).max(1) as u128)?;
                Some(twin.breakpoint_xs().to_vec())
            }
        }
    }

    /// A few points where `|f|` attains its supremum.
    pub fn abs_sup_points(&self) -> Vec<f64> {
        match self {
            Function1D::Pwl(p) => {
                let mut pts = p.abs_sup_points();
                pts.truncate(8);
                pts
            }
            Function1D::Comb(c) => {
                // the first tooth peak: 2 j_lo / 2^s (tooth 0 peaks at x = 0)
                let lo = c.j_lo().to_f64();
                vec![(2.0 * lo / (c.scale() as f64).exp2()).fract()]
            }
        }
    }

    /// Monotone-piece swing magnitudes over the `[0, 1]` segment, when
    /// finitely enumerable.
    pub fn swing_magnitudes(&self, max_swings: usize) -> Option<Vec<f64>> {
        match self {
            Function1D::Pwl(p) => {
                let mut samples = Vec::with_capacity(p.breakpoint_xs().len() + 2);
                if p.breakpoint_xs().first() != Some(&0.0) {
                    samples.push(p.eval(0.0));
                }
                samples.extend_from_slice(p.values());
                samples.push(p.eval(0.0)); // f(1) = f(0)
                let swings = polyline_swings(&samples);
                (swings.len() <= max_swings).then_some(swings)
            }
            Function1D::Comb(c) => {
                let n = c.swing_count().exact()?;
                if n as usize > max_swings {
                    return None;
                }
                Some(vec![c.amplitude(); n as usize])
            }
        }
    }

    pub fn scaled(&self, k: f64) -> Function1D {
        match self {
            Function1D::Pwl(p) => {
                let vals: Vec<f64> = p.values().iter().map(|v| v * k).collect();
                Function1D::Pwl(
                    PiecewiseLinearPeriodic::new(p.breakpoints().to_vec(), vals).unwrap(),
                )
            }
            Function1D::Comb(c) => {
                // negative scaling leaves |increments| unchanged; keep the
                // amplitude nonnegative
                Function1D::Comb(
                    DyadicComb::new(c.scale(), *c.j_lo(), *c.j_hi(), c.amplitude() * k.abs())
                        .unwrap(),
                )
            }
        }
    }
}

/// Net swing magnitudes of the maximal monotone runs of a sampled polyline.
/// Plateaus are compressed; zero swings are dropped.
pub(crate) fn polyline_swings(values: &[f64]) -> Vec<f64> {
    let mut compressed: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if compressed.last() != Some(&v) {
            compressed.push(v);
        }
    }
    if compressed.len() < 2 {
        return Vec::new();
    }
    let mut swings = Vec::new();
    let mut run_start = compressed[0];
    let mut prev = compressed[0];
    let mut dir = 0i8;
    for &v in &compressed[1..] {
        let d = if v > prev { 1 } else { -1 };
        if dir != 0 && d != dir {
            swings.push((prev - run_start).abs());
            run_start = prev;
        }
        dir = d;
        prev = v;
    }
    swings.push((prev - run_start).abs());
    swings
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polyline_swing_extraction() {
        assert_eq!(polyline_swings(&[0.0, 1.0, 0.0]), vec![1.0, 1.0]);
        assert_eq!(polyline_swings(&[0.0, 0.5, 1.0, 0.25]), vec![1.0, 0.75]);
        assert_eq!(polyline_swings(&[0.3, 0.3, 0.3]), Vec::<f64>::new());
        assert_eq!(polyline_swings(&[0.0, 0.0, 1.0, 1.0, 0.5]), vec![1.0, 0.5]);
    }

    #[test]
    fn triangle_swings() {
        let t = Function1D::triangle(1.0);
        assert_eq!(t.swing_magnitudes(16).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn comb_swings_closed_form() {
        let c = Function1D::from(DyadicComb::from_indices(4, 0, 4, 0.5).unwrap());
        let swings = c.swing_magnitudes(64).unwrap();
        assert_eq!(swings.len(), 8);
        assert!(swings.iter().all(|s| *s == 0.5));
        assert_relative_eq!(c.sup_norm(), 0.5);
    }

    #[test]
    fn comb_swings_match_materialized_twin() {
        let comb = DyadicComb::from_indices(5, 2, 9, 0.8).unwrap();
        let direct = Function1D::from(comb.clone()).swing_magnitudes(256).unwrap();
        let twin = Function1D::from(comb.materialize(1 << 10).unwrap());
        let via_twin = twin.swing_magnitudes(256).unwrap();
        assert_eq!(direct.len(), via_twin.len());
        for (a, b) in direct.iter().zip(&via_twin) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn function_json_round_trip() {
        let f = Function1D::from(DyadicComb::from_indices(4, 1, 8, 0.25).unwrap());
        let s = serde_json::to_string(&f).unwrap();
        let back: Function1D = serde_json::from_str(&s).unwrap();
        for i in 0..64 {
            let x = i as f64 / 64.0;
            assert_relative_eq!(f.eval(x), back.eval(x), max_relative = 1e-15);
        }

        let g = Function1D::triangle(2.0);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"bp\""));
        let back: Function1D = serde_json::from_str(&s).unwrap();
        assert_relative_eq!(back.eval(0.25), 1.0);
    }
}
