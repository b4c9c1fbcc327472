//! Trains of triangular teeth at a single dyadic scale.
//!
//! A comb at scale `s` with amplitude `h` has one tooth per index
//! `j in [j_lo, j_hi)`: value 0 at the odd dyadics `(2j +- 1)/2^s`, peak `h`
//! at the even point `2j/2^s`, zero elsewhere. The counterexample
//! constructions use scales far past anything materializable (tooth counts
//! beyond 2^200), so evaluation is closed-form and tooth counts are
//! [`Count`]s; the witness arithmetic never enumerates teeth.
//!
//! Evaluation at a dyadic point of exponent <= 62 with scale <= 62 is exact
//! integer arithmetic; the float path is approximate once `2^s * x` exceeds
//! the 53-bit mantissa, which only arises for functions whose support is
//! itself below float granularity.

use super::dyadic::{DyadicRational, MAX_EXPONENT};
use super::pwl::{FunctionError, PiecewiseLinearPeriodic};
use crate::numeric::Count;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CombRepr", into = "CombRepr")]
pub struct DyadicComb {
    s: u32,
    j_lo: Count,
    j_hi: Count,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct CombRepr {
    s: u32,
    j_lo: Count,
    j_hi: Count,
    h: f64,
}

impl From<DyadicComb> for CombRepr {
    fn from(c: DyadicComb) -> Self {
        CombRepr { s: c.s, j_lo: c.j_lo, j_hi: c.j_hi, h: c.h }
    }
}

impl TryFrom<CombRepr> for DyadicComb {
    type Error = FunctionError;

    fn try_from(r: CombRepr) -> Result<Self, FunctionError> {
        DyadicComb::new(r.s, r.j_lo, r.j_hi, r.h)
    }
}

impl DyadicComb {
    pub fn new(s: u32, j_lo: Count, j_hi: Count, h: f64) -> Result<Self, FunctionError> {
        if s == 0 {
            return Err(FunctionError::BadComb("scale must be positive".into()));
        }
        if !(j_lo < j_hi) {
            return Err(FunctionError::BadComb(format!(
                "tooth range empty: log2 j_lo = {}, log2 j_hi = {}",
                j_lo.log2(),
                j_hi.log2()
            )));
        }
        let half = Count::pow2(s - 1);
        if j_hi > half {
            return Err(FunctionError::BadComb(format!(
                "j_hi (log2 = {}) exceeds 2^(s-1) with s = {s}",
                j_hi.log2()
            )));
        }
        if !h.is_finite() || h < 0.0 {
            return Err(FunctionError::BadComb(format!("amplitude must be >= 0 (got {h})")));
        }
        Ok(DyadicComb { s, j_lo, j_hi, h })
    }

    pub fn from_indices(s: u32, j_lo: u128, j_hi: u128, h: f64) -> Result<Self, FunctionError> {
        Self::new(s, Count::from_u128(j_lo), Count::from_u128(j_hi), h)
    }

    pub fn scale(&self) -> u32 {
        self.s
    }

    pub fn j_lo(&self) -> &Count {
        &self.j_lo
    }

    pub fn j_hi(&self) -> &Count {
        &self.j_hi
    }

    pub fn amplitude(&self) -> f64 {
        self.h
    }

    pub fn teeth(&self) -> Count {
        self.j_hi.checked_sub(&self.j_lo).expect("validated j_lo < j_hi")
    }

    /// Number of unit monotone swings: two per tooth, each of height `h`.
    pub fn swing_count(&self) -> Count {
        self.teeth().double()
    }

    /// Smallest x of the support (left foot of the first tooth), clamped at 0
    /// for the wrap tooth.
    pub fn support_lo(&self) -> f64 {
        let lo = self.j_lo.to_f64();
        ((2.0 * lo - 1.0) / (self.s as f64).exp2()).max(0.0)
    }

    pub fn support_hi(&self) -> f64 {
        let hi = self.j_hi.to_f64();
        ((2.0 * hi - 1.0) / (self.s as f64).exp2()).min(1.0)
    }

    fn in_range_f64(&self, j: f64) -> bool {
        j >= self.j_lo.to_f64() && j < self.j_hi.to_f64()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x - x.floor();
        let pow = (self.s as f64).exp2();
        let t = u * pow;
        let mut j = ((t + 1.0) / 2.0).floor();
        let mut t = t;
        // fold the wrap tooth: index 2^(s-1) is tooth 0 approached from the left
        if j >= pow / 2.0 {
            j = 0.0;
            t -= pow;
        }
        if !self.in_range_f64(j) {
            return 0.0;
        }
        (self.h * (1.0 - (t - 2.0 * j).abs())).clamp(0.0, self.h)
    }

    /// Exact evaluation at a dyadic point; requires `s <= 62`.
    pub fn eval_dyadic(&self, x: &DyadicRational) -> f64 {
        if self.s > MAX_EXPONENT {
            return self.eval(x.to_f64());
        }
        let e = x.exponent();
        // reduce into [0, 1): numerator mod 2^e
        let modulus = 1i128 << e;
        let num = (x.numerator() as i128).rem_euclid(modulus);
        // c = numerator * 2^s, so t = c / 2^e
        let c = num << self.s;
        let mut j = (c + modulus) >> (e + 1);
        let mut c = c;
        if j >= (1i128 << (self.s - 1)) {
            j = 0;
            c -= 1i128 << (self.s + e);
        }
        let (Some(lo), Some(hi)) = (self.j_lo.exact(), self.j_hi.exact()) else {
            return self.eval(x.to_f64());
        };
        if j < 0 || (j as u128) < lo || (j as u128) >= hi {
            return 0.0;
        }
        // value = h * (2^e - |c - j * 2^(e+1)|) / 2^e
        let dist = (c - (j << (e + 1))).abs();
        if dist >= modulus {
            return 0.0;
        }
        self.h * ((modulus - dist) as f64) / modulus as f64
    }

    /// Materialize as a piecewise-linear twin when the tooth count permits.
    pub fn materialize(&self, max_teeth: u128) -> Option<PiecewiseLinearPeriodic> {
        let teeth = self.teeth().exact()?;
        if teeth > max_teeth || self.s > MAX_EXPONENT {
            return None;
        }
        let lo = self.j_lo.exact()? as i64;
        let hi = self.j_hi.exact()? as i64;
        let modulus = 1i64 << self.s;
        let mut pts: Vec<(DyadicRational, f64)> = Vec::new();
        let push = |pts: &mut Vec<(DyadicRational, f64)>, num: i64, v: f64| {
            let num = num.rem_euclid(modulus);
            pts.push((DyadicRational::new(num, self.s), v));
        };
        for j in lo..hi {
            push(&mut pts, 2 * j - 1, 0.0);
            push(&mut pts, 2 * j, self.h);
            push(&mut pts, 2 * j + 1, 0.0);
        }
        // anchor the zero level away from the support
        push(&mut pts, 2 * hi + 1, 0.0);
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let (bps, vals): (Vec<_>, Vec<_>) = pts.into_iter().unzip();
        PiecewiseLinearPeriodic::new(bps, vals).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn comb(s: u32, lo: u128, hi: u128, h: f64) -> DyadicComb {
        DyadicComb::from_indices(s, lo, hi, h).unwrap()
    }

    #[test]
    fn tooth_peak_and_feet() {
        let c = comb(3, 1, 2, 1.0);
        assert_relative_eq!(c.eval(2.0 / 8.0), 1.0); // peak at 2j/2^s, j=1
        assert_relative_eq!(c.eval(1.0 / 8.0), 0.0); // left foot
        assert_relative_eq!(c.eval(3.0 / 8.0), 0.0); // right foot
        assert_relative_eq!(c.eval(0.5), 0.0); // outside the tooth range
        assert_relative_eq!(c.eval(2.0 / 8.0 + 1.0), 1.0); // periodic
    }

    #[test]
    fn wrap_tooth_is_continuous() {
        let c = comb(3, 0, 2, 1.0);
        assert_relative_eq!(c.eval(0.0), 1.0); // tooth 0 peaks at the origin
        assert_relative_eq!(c.eval(15.0 / 16.0), 0.5); // ascending into the wrap
        assert_relative_eq!(c.eval(7.0 / 8.0), 0.0);
        assert_relative_eq!(c.eval(1.0 / 16.0), 0.5);
    }

    #[test]
    fn dyadic_eval_matches_float_eval() {
        let c = comb(4, 0, 8, 0.7);
        for num in 0..64 {
            let x = DyadicRational::new(num, 6);
            assert_relative_eq!(c.eval_dyadic(&x), c.eval(x.to_f64()), max_relative = 1e-12);
        }
    }

    #[test]
    fn materialized_twin_agrees() {
        for (s, lo, hi) in [(3u32, 0u128, 2u128), (4, 1, 8), (5, 3, 11)] {
            let c = comb(s, lo, hi, 0.9);
            let twin = c.materialize(1 << 12).unwrap();
            for num in 0..(1i64 << (s + 2)) {
                let x = DyadicRational::new(num, s + 2);
                assert_relative_eq!(
                    c.eval_dyadic(&x),
                    twin.eval(x.to_f64()),
                    epsilon = 1e-12,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn bounded_by_amplitude() {
        let c = comb(5, 2, 13, 0.63);
        for i in 0..997 {
            let x = i as f64 / 997.0;
            let v = c.eval(x);
            assert!(v >= 0.0 && v <= 0.63 + 1e-15);
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(DyadicComb::from_indices(3, 2, 2, 1.0).is_err()); // empty range
        assert!(DyadicComb::from_indices(3, 0, 5, 1.0).is_err()); // j_hi > 2^(s-1)
        assert!(DyadicComb::from_indices(0, 0, 1, 1.0).is_err());
    }

    #[test]
    fn huge_scale_counts_stay_symbolic() {
        let c = DyadicComb::new(350, Count::pow2(78), Count::pow2(233), 0.016).unwrap();
        assert_relative_eq!(c.teeth().log2(), 233.0, max_relative = 1e-12);
        assert_relative_eq!(c.swing_count().log2(), 234.0, max_relative = 1e-12);
        assert!(c.support_hi() < 1e-30);
    }
}
