//! Shared numeric machinery: compensated summation, log-space counts and
//! magnitudes, stable `l^p` norms, and the fixed-node Gauss-Legendre rule
//! used by the analytic partial-sum path.
//!
//! Counts of teeth, intervals and partition cells in this crate routinely
//! exceed `u128`, while their base-2 logarithms stay tiny. [`Count`] keeps
//! the exact integer as long as it fits and always carries `log2`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::LN_2;

/// A nonnegative count that is exact while it fits in `u128` and tracked in
/// base-2 log space beyond that.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "CountRepr", into = "CountRepr")]
pub struct Count {
    exact: Option<u128>,
    log2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CountRepr {
    Small(u64),
    Big(String),
    Log { log2: f64 },
}

impl From<Count> for CountRepr {
    fn from(c: Count) -> Self {
        match c.exact {
            Some(v) if v <= u64::MAX as u128 => CountRepr::Small(v as u64),
            Some(v) => CountRepr::Big(v.to_string()),
            None => CountRepr::Log { log2: c.log2 },
        }
    }
}

impl TryFrom<CountRepr> for Count {
    type Error = String;

    fn try_from(r: CountRepr) -> Result<Self, String> {
        match r {
            CountRepr::Small(v) => Ok(Count::from_u128(v as u128)),
            CountRepr::Big(s) => {
                let v: u128 = s.parse().map_err(|e| format!("bad count literal: {e}"))?;
                Ok(Count::from_u128(v))
            }
            CountRepr::Log { log2 } => {
                if !log2.is_finite() || log2 < 0.0 {
                    return Err("log2 count must be finite and nonnegative".into());
                }
                Ok(Count::from_log2(log2))
            }
        }
    }
}

impl Count {
    pub fn zero() -> Self {
        Count { exact: Some(0), log2: f64::NEG_INFINITY }
    }

    pub fn one() -> Self {
        Count { exact: Some(1), log2: 0.0 }
    }

    pub fn from_u128(v: u128) -> Self {
        Count { exact: Some(v), log2: u128_log2(v) }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_u128(v as u128)
    }

    /// 2^e, exact while the value fits in `u128`.
    pub fn pow2(e: u32) -> Self {
        if e < 128 {
            Count { exact: Some(1u128 << e), log2: e as f64 }
        } else {
            Count { exact: None, log2: e as f64 }
        }
    }

    /// Inexact count known only through its base-2 logarithm.
    pub fn from_log2(log2: f64) -> Self {
        assert!(log2.is_finite() && log2 >= 0.0);
        // Round-trip to an exact integer when the magnitude is small enough
        // for the rounding to be meaningful.
        if log2 < 52.0 {
            let v = log2.exp2().round() as u128;
            if v >= 1 && (u128_log2(v) - log2).abs() < 1e-12 {
                return Count { exact: Some(v), log2: u128_log2(v) };
            }
        }
        Count { exact: None, log2 }
    }

    pub fn exact(&self) -> Option<u128> {
        self.exact
    }

    pub fn log2(&self) -> f64 {
        self.log2
    }

    pub fn ln(&self) -> f64 {
        self.log2 * LN_2
    }

    /// Lossy conversion; may round for counts above 2^53 and overflows to
    /// `inf` past the f64 range.
    pub fn to_f64(&self) -> f64 {
        match self.exact {
            Some(v) => v as f64,
            None => self.log2.exp2(),
        }
    }

    pub fn double(&self) -> Count {
        match self.exact {
            Some(v) if v.leading_zeros() > 0 => Count::from_u128(v << 1),
            _ => Count { exact: None, log2: self.log2 + 1.0 },
        }
    }

    /// `self - rhs`; requires `self > rhs`.
    pub fn checked_sub(&self, rhs: &Count) -> Option<Count> {
        if let (Some(a), Some(b)) = (self.exact, rhs.exact) {
            if a > b {
                return Some(Count::from_u128(a - b));
            }
            return None;
        }
        if rhs.log2 >= self.log2 {
            return None;
        }
        // log2(a - b) = log2(a) + log2(1 - 2^(log2 b - log2 a))
        let delta = rhs.log2 - self.log2;
        let adj = (-delta.exp2()).ln_1p() / LN_2;
        Some(Count { exact: None, log2: self.log2 + adj })
    }

    pub fn is_zero(&self) -> bool {
        self.exact == Some(0)
    }

    /// `self / rhs` as a float, stable for huge operands.
    pub fn ratio_f64(&self, rhs: &Count) -> f64 {
        if let (Some(a), Some(b)) = (self.exact, rhs.exact) {
            if a <= (1u128 << 53) && b <= (1u128 << 53) {
                return a as f64 / b as f64;
            }
        }
        (self.log2 - rhs.log2).exp2()
    }
}

impl PartialEq for Count {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Count {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.exact, other.exact) {
            return Some(a.cmp(&b));
        }
        self.log2.partial_cmp(&other.log2)
    }
}

/// Base-2 logarithm of a `u128` with full f64 precision (the naive
/// `v as f64` cast loses bits past 2^53).
pub fn u128_log2(v: u128) -> f64 {
    if v == 0 {
        return f64::NEG_INFINITY;
    }
    let lz = v.leading_zeros();
    let width = 128 - lz; // number of significant bits
    if width <= 53 {
        return (v as f64).log2();
    }
    let shift = width - 53;
    let hi = (v >> shift) as u64 as f64;
    hi.log2() + shift as f64
}

/// A positive magnitude tracked through its natural logarithm, with the
/// linear value recoverable whenever it is representable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogVal {
    pub ln: f64,
}

impl LogVal {
    pub fn from_ln(ln: f64) -> Self {
        LogVal { ln }
    }

    pub fn from_value(v: f64) -> Self {
        LogVal { ln: v.ln() }
    }

    pub fn zero() -> Self {
        LogVal { ln: f64::NEG_INFINITY }
    }

    /// Linear value when `exp(ln)` is finite.
    pub fn value(&self) -> Option<f64> {
        let v = self.ln.exp();
        if v.is_finite() {
            Some(v)
        } else if self.ln == f64::NEG_INFINITY {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn value_or_inf(&self) -> f64 {
        self.ln.exp()
    }
}

/// Kahan compensated accumulator. Direct reciprocal sums run to 10^7 terms;
/// naive accumulation would eat the 1e-9 budget on its own.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    pub fn with(sum: f64) -> Self {
        Kahan { sum, c: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// `(sum_i |v_i|^p)^(1/p)` with the usual max-factoring so large `p` cannot
/// overflow: `M * (sum (|v_i|/M)^p)^(1/p)`.
pub fn lp_norm(values: &[f64], p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    let m = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let mut acc = Kahan::new();
    for v in values {
        acc.add((v.abs() / m).powf(p));
    }
    m * acc.value().powf(1.0 / p)
}

// 16-point Gauss-Legendre abscissae/weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Integrate a smooth function over `[a, b]` with composite 16-point
/// Gauss-Legendre panels of width at most `max_panel`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, max_panel: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let panels = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = Kahan::new();
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        for i in 0..8 {
            acc.add(GL16_W[i] * half * f(mid + half * GL16_X[i]));
            acc.add(GL16_W[i] * half * f(mid - half * GL16_X[i]));
        }
    }
    acc.value()
}

/// Deterministic seed derivation for restart streams.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
