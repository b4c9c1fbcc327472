//! Tensor sums `F(x, y) = sum_k u_k(x) v_k(y)` and the three increment
//! forms: an x-increment at fixed y, a y-increment at fixed x, and the
//! alternating four-corner rectangle increment.

use super::geometry::{Interval, Rectangle};
use super::Function1D;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorTerm {
    pub u: Function1D,
    pub v: Function1D,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorSum2D {
    pub terms: Vec<TensorTerm>,
}

impl TensorSum2D {
    pub fn new(terms: Vec<TensorTerm>) -> Self {
        TensorSum2D { terms }
    }

    pub fn zero() -> Self {
        TensorSum2D { terms: Vec::new() }
    }

    pub fn single(u: Function1D, v: Function1D) -> Self {
        TensorSum2D { terms: vec![TensorTerm { u, v }] }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| t.u.eval(x) * t.v.eval(y)).sum()
    }

    /// `F(b, y) - F(a, y)`.
    pub fn increment_x(&self, i: &Interval, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.u.eval(i.b) - t.u.eval(i.a)) * t.v.eval(y))
            .sum()
    }

    /// `F(x, d) - F(x, c)`.
    pub fn increment_y(&self, x: f64, j: &Interval) -> f64 {
        self.terms
            .iter()
            .map(|t| t.u.eval(x) * (t.v.eval(j.b) - t.v.eval(j.a)))
            .sum()
    }

    /// Four-corner increment `F(a,c) - F(a,d) - F(b,c) + F(b,d)`; for tensor
    /// terms this is exactly `sum_k u_k(I) v_k(J)`.
    pub fn rect_increment(&self, r: &Rectangle) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                (t.u.eval(r.x.b) - t.u.eval(r.x.a)) * (t.v.eval(r.y.b) - t.v.eval(r.y.a))
            })
            .sum()
    }

    /// Swap the roles of x and y.
    pub fn transposed(&self) -> TensorSum2D {
        TensorSum2D {
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm { u: t.v.clone(), v: t.u.clone() })
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> TensorSum2D {
        // scale through the u factors only so the tensor structure survives
        TensorSum2D {
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm { u: t.u.scaled(c), v: t.v.clone() })
                .collect(),
        }
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.u.sup_norm() * t.v.sup_norm()).sum()
    }
}
