//! Wolfram-coded truth tables for radius-1 binary automata.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule number {0} is outside 0..=255")]
    OutOfRange(i64),
    #[error("cannot parse rule number from {0:?}")]
    Parse(String),
}

/// Index of the neighborhood `(l, c, r)` in a Wolfram code: `4l + 2c + r`.
#[inline]
pub const fn neighborhood_index(l: bool, c: bool, r: bool) -> u8 {
    ((l as u8) << 2) | ((c as u8) << 1) | (r as u8)
}

/// An 8-entry truth table identified by its Wolfram number.
///
/// Bit `4l + 2c + r` of the number is the next state of a cell whose
/// neighborhood is `(l, c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleTable(u8);

impl RuleTable {
    pub const fn new(number: u8) -> Self {
        RuleTable(number)
    }

    /// Checked constructor for untrusted integers.
    pub fn from_number(n: i64) -> Result<Self, RuleError> {
        u8::try_from(n)
            .map(RuleTable)
            .map_err(|_| RuleError::OutOfRange(n))
    }

    /// Builds a table by evaluating `f` on all 8 neighborhoods.
    pub fn from_fn(f: impl Fn(bool, bool, bool) -> bool) -> Self {
        let mut number = 0u8;
        for idx in 0..8u8 {
            let (l, c, r) = Self::unpack(idx);
            if f(l, c, r) {
                number |= 1 << idx;
            }
        }
        RuleTable(number)
    }

    pub const fn number(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn apply(self, l: bool, c: bool, r: bool) -> bool {
        (self.0 >> neighborhood_index(l, c, r)) & 1 == 1
    }

    #[inline]
    pub const fn output_at(self, idx: u8) -> bool {
        (self.0 >> (idx & 7)) & 1 == 1
    }

    /// Outputs in the conventional 111, 110, ..., 000 order.
    pub fn outputs(self) -> [bool; 8] {
        let mut out = [false; 8];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.output_at(7 - k as u8);
        }
        out
    }

    /// Splits a neighborhood index back into `(l, c, r)`.
    pub const fn unpack(idx: u8) -> (bool, bool, bool) {
        (idx & 4 != 0, idx & 2 != 0, idx & 1 != 0)
    }
}

impl From<u8> for RuleTable {
    fn from(n: u8) -> Self {
        RuleTable(n)
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for RuleTable {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: i64 = s
            .trim()
            .parse()
            .map_err(|_| RuleError::Parse(s.to_string()))?;
        RuleTable::from_number(n)
    }
}

/// Applies `rule` to a single neighborhood.
pub fn apply_rule(rule: RuleTable, l: bool, c: bool, r: bool) -> bool {
    rule.apply(l, c, r)
}

/// Checked lookup of a rule by Wolfram number.
pub fn rule_from_number(n: i64) -> Result<RuleTable, RuleError> {
    RuleTable::from_number(n)
}

pub const RULE_0: RuleTable = RuleTable::new(0);
pub const RULE_22: RuleTable = RuleTable::new(22);
pub const RULE_30: RuleTable = RuleTable::new(30);
pub const RULE_86: RuleTable = RuleTable::new(86);
pub const RULE_90: RuleTable = RuleTable::new(90);
pub const RULE_150: RuleTable = RuleTable::new(150);
