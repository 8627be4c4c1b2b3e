//! Extended naturals: the value domain of directed distances, `[0, ∞]`.

use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::Add;

/// A natural number or infinity. Addition absorbs infinity; the order puts
/// every finite value below `Inf`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

pub use ExtNat::{Fin, Inf};

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(v) => Some(v),
            Inf => None,
        }
    }

    /// Finite value, panicking on infinity. For call sites that have already
    /// established finiteness.
    pub fn expect_finite(self, what: &str) -> u64 {
        match self {
            Fin(v) => v,
            Inf => panic!("expected finite {what}, got inf"),
        }
    }

    pub fn min(self, other: ExtNat) -> ExtNat {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: ExtNat) -> ExtNat {
        std::cmp::max(self, other)
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a + b),
            _ => Inf,
        }
    }
}

impl Add<u64> for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: u64) -> ExtNat {
        self + Fin(rhs)
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        Fin(v)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(v) => write!(f, "{v}"),
            Inf => write!(f, "inf"),
        }
    }
}

// Reports serialize infinity as the literal string "inf".
impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Fin(v) => serializer.serialize_u64(*v),
            Inf => serializer.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorbing_addition() {
        assert_eq!(Fin(2) + Fin(3), Fin(5));
        assert_eq!(Inf + Fin(7), Inf);
        assert_eq!(Fin(7) + Inf, Inf);
        assert_eq!(Inf + Inf, Inf);
    }

    #[test]
    fn total_order_finite_below_inf() {
        assert!(Fin(0) < Fin(1));
        assert!(Fin(u64::MAX) < Inf);
        assert_eq!(Fin(4).min(Inf), Fin(4));
        assert_eq!(Fin(4).max(Inf), Inf);
    }

    #[test]
    fn display_and_serialize() {
        assert_eq!(Fin(12).to_string(), "12");
        assert_eq!(Inf.to_string(), "inf");
        assert_eq!(serde_json::to_string(&Fin(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Inf).unwrap(), "\"inf\"");
    }
}
