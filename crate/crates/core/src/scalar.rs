//! Scalar abstraction for the ρ / chain-distance arithmetic.
//!
//! Graph distances stay integral (`ExtNat`); everything downstream of the
//! exponential transform e^{−ερ} is generic over a scalar that is either
//! `f64` (fast, 1e-9 comparison slack) or `BigRational` (exact, zero slack).
//! In the exact mode the transcendental base e^ε is replaced by a rational
//! base b > 1, so every constraint (including ε′ < √2, checked as ε′² < 2)
//! is decided exactly.

use crate::extnat::ExtNat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialOrd
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_u64(v: u64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Comparison slack for inequality checks: zero in exact mode.
    fn slack() -> Self;
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn slack() -> Self {
        1e-9
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn slack() -> Self {
        BigRational::zero()
    }

    fn is_exact() -> bool {
        true
    }
}

/// The decay map ρ ↦ base^{−ρ} sending depth to (0, 1], with ∞ ↦ 0.
/// With base = e^ε this is the literal e^{−ερ}; with a rational base the
/// same algebra runs exactly.
#[derive(Clone, Debug)]
pub struct Decay<S: Scalar> {
    base: S,
}

impl Decay<f64> {
    /// Base e^ε for the given ε > 0.
    pub fn from_epsilon(epsilon: f64) -> Self {
        assert!(epsilon > 0.0);
        Decay {
            base: epsilon.exp(),
        }
    }
}

impl<S: Scalar> Decay<S> {
    pub fn new(base: S) -> Self {
        assert!(base > S::one(), "decay base must exceed 1");
        Decay { base }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    /// base^k for integer k (negative exponents via reciprocal).
    pub fn pow(&self, k: i64) -> S {
        let mut acc = S::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc * self.base.clone();
        }
        if k < 0 {
            S::one() / acc
        } else {
            acc
        }
    }

    /// base^{−ρ}, with ∞ ↦ 0.
    pub fn decay(&self, rho: ExtNat) -> S {
        match rho {
            ExtNat::Fin(v) => {
                // guard against absurd exponents; depths at desk scale are tiny
                assert!(v < 1 << 20, "decay exponent out of range");
                self.pow(-(v as i64))
            }
            ExtNat::Inf => S::zero(),
        }
    }

    /// ε′ = base^{2k} where k is the triangle-control radius 6δ + 2δf(δ+1).
    pub fn epsilon_prime(&self, k: u64) -> S {
        self.pow(2 * k as i64)
    }

    /// Exact form of the Thm hypothesis ε′ < √2, decided as ε′² < 2.
    pub fn epsilon_prime_below_sqrt2(&self, k: u64) -> bool {
        let eps2 = self.pow(4 * k as i64);
        eps2 < S::from_u64(2)
    }
}

impl<S: Scalar> From<S> for Decay<S> {
    fn from(base: S) -> Self {
        Decay::new(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extnat::{Fin, Inf};

    #[test]
    fn rational_decay_is_exact() {
        let decay: Decay<BigRational> = Decay::new(BigRational::from_ratio(3, 2));
        assert_eq!(decay.decay(Fin(2)), BigRational::from_ratio(4, 9));
        assert_eq!(decay.decay(Inf), BigRational::zero());
        assert_eq!(decay.pow(3), BigRational::from_ratio(27, 8));
    }

    #[test]
    fn float_decay_matches_exp() {
        let decay = Decay::from_epsilon(0.25);
        let v = decay.decay(Fin(4));
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn sqrt2_constraint_is_exact() {
        // base^(4k) < 2 with k = 1: base^4 < 2, so base = 6/5 gives 1296/625 > 2 -> false
        let decay: Decay<BigRational> = Decay::new(BigRational::from_ratio(6, 5));
        assert!(!decay.epsilon_prime_below_sqrt2(1));
        let decay: Decay<BigRational> = Decay::new(BigRational::from_ratio(11, 10));
        // (11/10)^4 = 14641/10000 < 2
        assert!(decay.epsilon_prime_below_sqrt2(1));
    }
}
