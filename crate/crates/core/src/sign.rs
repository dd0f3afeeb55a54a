//! The qualitative sign domain `{+, -, 0, ?}`.
//!
//! Signs are ordered by information content: `0 ⊑ + , - ⊑ ?`. [`Sign::sum`]
//! is the join of that order and combines parallel trails; [`Sign::product`]
//! chains influences along a trail.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
    Question,
}

impl Sign {
    pub const ALL: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Question];

    /// Sign of an influence obtained by chaining `self` then `other`.
    pub fn product(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Question, _) | (_, Question) => Question,
            (a, b) if a == b => Plus,
            _ => Minus,
        }
    }

    /// Sign of two influences acting in parallel.
    pub fn sum(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, x) | (x, Zero) => x,
            (a, b) if a == b => a,
            _ => Question,
        }
    }

    /// Information order: `0 ⊑ {+, -} ⊑ ?`.
    pub fn le_info(self, other: Sign) -> bool {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Question) => true,
            (a, b) => a == b,
        }
    }

    pub fn is_definite(self) -> bool {
        matches!(self, Sign::Plus | Sign::Minus)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Question => "?",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        self.product(rhs)
    }
}

impl Add for Sign {
    type Output = Sign;

    fn add(self, rhs: Sign) -> Sign {
        self.sum(rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" | "−" => Ok(Sign::Minus),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Question),
            other => Err(Error::InvalidSign(other.to_string())),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
