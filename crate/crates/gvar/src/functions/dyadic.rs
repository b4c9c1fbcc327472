//! Exact dyadic rationals for interval endpoints and witness points.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// `numerator / 2^exponent` in canonical form (odd numerator or exponent 0).
/// Comparisons are exact integer arithmetic.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(into = "(i64, u32)", try_from = "(i64, u32)")]
pub struct DyadicRational {
    num: i64,
    exp: u32,
}

pub const MAX_EXPONENT: u32 = 62;

impl DyadicRational {
    pub fn new(num: i64, exp: u32) -> Self {
        assert!(exp <= MAX_EXPONENT, "dyadic exponent {exp} exceeds {MAX_EXPONENT}");
        let mut num = num;
        let mut exp = exp;
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        DyadicRational { num, exp }
    }

    pub fn zero() -> Self {
        DyadicRational { num: 0, exp: 0 }
    }

    pub fn one() -> Self {
        DyadicRational { num: 1, exp: 0 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    pub fn is_in_unit_interval(&self) -> bool {
        self.num >= 0 && (self.num as i128) < (1i128 << self.exp)
    }
}

impl From<DyadicRational> for (i64, u32) {
    fn from(d: DyadicRational) -> Self {
        (d.num, d.exp)
    }
}

impl TryFrom<(i64, u32)> for DyadicRational {
    type Error = String;

    fn try_from((num, exp): (i64, u32)) -> Result<Self, String> {
        if exp > MAX_EXPONENT {
            return Err(format!("dyadic exponent {exp} exceeds {MAX_EXPONENT}"));
        }
        Ok(DyadicRational::new(num, exp))
    }
}

impl PartialEq for DyadicRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DyadicRational {}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare num_a / 2^ea with num_b / 2^eb by cross-shifting; i128 has
        // headroom for 62-bit numerators shifted by 62
        let (a, b) = if self.exp >= other.exp {
            (self.num as i128, (other.num as i128) << (self.exp - other.exp))
        } else {
            ((self.num as i128) << (other.exp - self.exp), other.num as i128)
        };
        a.cmp(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let d = DyadicRational::new(4, 3);
        assert_eq!((d.numerator(), d.exponent()), (1, 1));
        assert_eq!(d.to_f64(), 0.5);
        let z = DyadicRational::new(0, 5);
        assert_eq!((z.numerator(), z.exponent()), (0, 0));
    }

    #[test]
    fn exact_ordering() {
        let a = DyadicRational::new(1, 2); // 1/4
        let b = DyadicRational::new(3, 3); // 3/8
        let c = DyadicRational::new(2, 3); // 1/4 again
        assert!(a < b);
        assert_eq!(a, c);
        assert!(DyadicRational::new(5, 3) > b);
    }

    #[test]
    fn unit_interval_check() {
        assert!(DyadicRational::new(7, 3).is_in_unit_interval());
        assert!(!DyadicRational::new(8, 3).is_in_unit_interval());
        assert!(!DyadicRational::new(-1, 3).is_in_unit_interval());
    }
}
