//! Exact arithmetic helpers.
//!
//! Thresholds in the solvers are compared without floating point. A
//! positive `f64` parameter is an exact dyadic rational `mantissa / 2^shift`,
//! so comparisons of the form `a >= eps * b` with integer `a`, `b` reduce to
//! integer products. When those products overflow `u128` the comparison falls
//! back to `f64` with a relative guard band.

use num_rational::Ratio;

/// Relative guard band for the floating-point fallback.
pub const FLOAT_GUARD: f64 = 1e-12;

/// A nonnegative finite `f64` viewed as the exact rational `mantissa / 2^shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyadic {
    value: f64,
    mantissa: u64,
    shift: u32,
}

impl Dyadic {
    /// Panics on negative, NaN or infinite input.
    pub fn new(value: f64) -> Self {
        assert!(value.is_finite() && value >= 0.0, "dyadic value must be finite and >= 0");
        if value == 0.0 {
            return Dyadic { value, mantissa: 0, shift: 0 };
        }
        let bits = value.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut mantissa, mut exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        while mantissa & 1 == 0 {
            mantissa >>= 1;
            exp += 1;
        }
        if exp >= 0 {
            // Integers above 2^64 do not occur for the parameters used here.
            let mantissa = mantissa
                .checked_shl(exp as u32)
                .filter(|m| m >> (exp as u32) == mantissa)
                .expect("dyadic value too large");
            Dyadic { value, mantissa, shift: 0 }
        } else {
            Dyadic { value, mantissa, shift: (-exp) as u32 }
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `lhs <op> self * rhs` where `lhs = a`, `rhs = b` are integers.
    pub fn cmp_scaled(&self, a: u128, b: u128) -> std::cmp::Ordering {
        // a  vs  mantissa * b / 2^shift   <=>   a * 2^shift  vs  mantissa * b
        let left = if self.shift >= 128 { None } else { a.checked_mul(1u128 << self.shift) };
        let right = (self.mantissa as u128).checked_mul(b);
        match (left, right) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => {
                let l = a as f64;
                let r = self.value * b as f64;
                let guard = FLOAT_GUARD * l.abs().max(r.abs());
                if l > r + guard {
                    std::cmp::Ordering::Greater
                } else if l < r - guard {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            }
        }
    }

    /// `a > self * b`.
    pub fn exceeded_by(&self, a: u128, b: u128) -> bool {
        self.cmp_scaled(a, b) == std::cmp::Ordering::Greater
    }

    /// `a >= self * b`.
    pub fn reached_by(&self, a: u128, b: u128) -> bool {
        self.cmp_scaled(a, b) != std::cmp::Ordering::Less
    }

    /// Smallest integer `c` with `c > self * total`.
    pub fn min_count_above(&self, total: usize) -> usize {
        let approx = (self.value * total as f64).floor().max(0.0) as usize;
        let mut c = approx.saturating_sub(1);
        while !self.exceeded_by(c as u128, total as u128) {
            c += 1;
        }
        c
    }
}

/// Binomial coefficient `C(n, r)`, exact in `u128`; saturates on overflow.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub type Rational = Ratio<i128>;

pub fn binomial_i128(n: u64, r: u64) -> i128 {
    let b = binomial(n, r);
    i128::try_from(b).expect("binomial coefficient exceeds i128")
}

/// `value >= threshold` for an integer `value` and exact rational `threshold`.
pub fn int_at_least(value: u64, threshold: &Rational) -> bool {
    // Ratio keeps a positive denominator.
    (value as i128) * threshold.denom() >= *threshold.numer()
}
