//! Truth-table algebra over rules: composition, complement, reflection and
//! the neighborhoods on which two rules disagree.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::evolve::SpacetimeDiagram;
use crate::rule::{neighborhood_index, RuleTable, RULE_30};
use crate::tape::Tape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown boolean operator {0:?}, expected AND, OR or XOR")]
    BadOp(String),
    #[error("diagrams have {left} and {right} rows")]
    RowCountMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

impl BoolOp {
    #[inline]
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a & b,
            BoolOp::Or => a | b,
            BoolOp::Xor => a ^ b,
        }
    }

    #[inline]
    fn apply_bits(self, a: u8, b: u8) -> u8 {
        match self {
            BoolOp::And => a & b,
            BoolOp::Or => a | b,
            BoolOp::Xor => a ^ b,
        }
    }
}

impl fmt::Display for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoolOp::And => "AND",
            BoolOp::Or => "OR",
            BoolOp::Xor => "XOR",
        })
    }
}

impl FromStr for BoolOp {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AND" | "&" => Ok(BoolOp::And),
            "OR" | "|" => Ok(BoolOp::Or),
            "XOR" | "^" => Ok(BoolOp::Xor),
            _ => Err(AlgebraError::BadOp(s.to_string())),
        }
    }
}

/// A set of neighborhoods, bit `4l + 2c + r` for `(l, c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NeighborhoodMask(u8);

impl NeighborhoodMask {
    pub const EMPTY: NeighborhoodMask = NeighborhoodMask(0);
    pub const ALL: NeighborhoodMask = NeighborhoodMask(0xff);

    pub const fn from_bits(bits: u8) -> Self {
        NeighborhoodMask(bits)
    }

    pub fn from_fn(f: impl Fn(bool, bool, bool) -> bool) -> Self {
        NeighborhoodMask(RuleTable::from_fn(f).number())
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, l: bool, c: bool, r: bool) -> bool {
        self.0 >> neighborhood_index(l, c, r) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in increasing neighborhood index.
    pub fn members(self) -> impl Iterator<Item = (bool, bool, bool)> {
        (0..8u8)
            .filter(move |i| self.0 >> i & 1 == 1)
            .map(RuleTable::unpack)
    }
}

impl fmt::Display for NeighborhoodMask {
    /// `{011,111}` style, members written as `lcr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (l, c, r)) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}{}{}", l as u8, c as u8, r as u8)?;
        }
        f.write_str("}")
    }
}

pub fn combine(a: RuleTable, b: RuleTable, op: BoolOp) -> RuleTable {
    RuleTable::new(op.apply_bits(a.number(), b.number()))
}

pub fn complement(a: RuleTable) -> RuleTable {
    RuleTable::new(!a.number())
}

/// Swaps the left and right neighbor in every entry.
pub fn mirror(a: RuleTable) -> RuleTable {
    RuleTable::from_fn(|l, c, r| a.apply(r, c, l))
}

pub fn divergence_mask(a: RuleTable, b: RuleTable) -> NeighborhoodMask {
    NeighborhoodMask(a.number() ^ b.number())
}

/// Rule 30 with its operators exchanged structurally, `(l OR c) XOR r`.
/// This is the reflection of rule 30 (rule 86).
pub fn reverse_rule30() -> RuleTable {
    RuleTable::from_fn(|l, c, r| (l | c) ^ r)
}

/// Rule 30 with its operators exchanged in place, `l OR (c XOR r)` (rule 246).
/// Kept for comparison with [`reverse_rule30`]; it is not a reflection.
pub fn reverse_rule30_literal() -> RuleTable {
    RuleTable::from_fn(|l, c, r| l | (c ^ r))
}

/// Combines two diagrams cell by cell at aligned absolute positions.
///
/// Each output row covers the union of both input rows' positions; cells
/// missing from one side read as 0.
pub fn pointwise_combine(
    a: &SpacetimeDiagram,
    b: &SpacetimeDiagram,
    op: BoolOp,
) -> Result<SpacetimeDiagram, AlgebraError> {
    if a.len() != b.len() {
        return Err(AlgebraError::RowCountMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let rows = a
        .rows()
        .iter()
        .zip(b.rows())
        .map(|(x, y)| {
            let lo = x.first_position().min(y.first_position());
            let hi = x.last_position().max(y.last_position());
            let bits: Vec<bool> = (lo..=hi)
                .map(|pos| op.apply(x.get_abs(pos), y.get_abs(pos)))
                .collect();
            Tape::from_bits(&bits, -lo).expect("rows are non-empty")
        })
        .collect();
    Ok(SpacetimeDiagram::from_rows(rows))
}

/// Neighborhoods on which rule 30 departs from rule 150: centre = right = 1.
pub fn rule30_branch_mask() -> NeighborhoodMask {
    divergence_mask(RULE_30, crate::rule::RULE_150)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::evolve;
    use crate::rule::{RULE_150, RULE_86};
    use crate::tape::{single_seed, WindowPolicy};
    use proptest::prelude::*;

    /// Neighborhood-by-neighborhood reference, independent of the packed
    /// rule number arithmetic.
    fn combine_oracle(a: RuleTable, b: RuleTable, op: BoolOp) -> RuleTable {
        RuleTable::from_fn(|l, c, r| op.apply(a.apply(l, c, r), b.apply(l, c, r)))
    }

    fn r(n: u8) -> RuleTable {
        RuleTable::new(n)
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine(r(30), r(30), BoolOp::And), r(30));
        assert_eq!(combine(r(30), r(150), BoolOp::And), r(22));
        assert_eq!(combine(r(30), r(150), BoolOp::Xor), r(136));
        assert_eq!(combine_oracle(r(30), r(150), BoolOp::And), r(22));
        assert_eq!(combine_oracle(r(30), r(150), BoolOp::Xor), r(136));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(r(30)), r(225));
        assert_eq!(complement(r(0)), r(255));
        assert_eq!(complement(complement(r(150))), r(150));
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror(r(30)), r(86));
        assert_eq!(mirror(r(150)), r(150));
        assert_eq!(mirror(mirror(r(30))), r(30));
    }

    #[test]
    fn reverse_rule30_readings() {
        assert_eq!(reverse_rule30(), RULE_86);
        assert_eq!(reverse_rule30(), mirror(RULE_30));
        assert_eq!(reverse_rule30_literal(), r(246));
        // Only the structural reading diverges from 150 on c = l = 1.
        let cl = NeighborhoodMask::from_fn(|l, c, _| c & l);
        assert_eq!(divergence_mask(reverse_rule30(), RULE_150), cl);
        assert_ne!(divergence_mask(reverse_rule30_literal(), RULE_150), cl);
    }

    #[test]
    fn divergence_examples() {
        let m = divergence_mask(r(30), r(150));
        assert_eq!(m, NeighborhoodMask::from_fn(|_, c, r| c & r));
        assert_eq!(m.to_string(), "{011,111}");
        assert_eq!(m, rule30_branch_mask());
        let m = divergence_mask(r(86), r(150));
        assert_eq!(m, NeighborhoodMask::from_fn(|l, c, _| c & l));
        assert_eq!(m.to_string(), "{110,111}");
        assert_eq!(divergence_mask(r(30), r(30)), NeighborhoodMask::EMPTY);
        assert_eq!(NeighborhoodMask::EMPTY.to_string(), "{}");
    }

    #[test]
    fn xor_or_agree_off_the_double_one() {
        for (x, y) in [(false, false), (false, true), (true, false)] {
            assert_eq!(x ^ y, x | y);
        }
        assert_ne!(true ^ true, true | true);
    }

    #[test]
    fn op_parsing() {
        assert_eq!("and".parse(), Ok(BoolOp::And));
        assert_eq!("XOR".parse(), Ok(BoolOp::Xor));
        assert_eq!("|".parse(), Ok(BoolOp::Or));
        assert!(matches!(
            "nand".parse::<BoolOp>(),
            Err(AlgebraError::BadOp(_))
        ));
    }

    #[test]
    fn pointwise_examples() {
        let lc = WindowPolicy::LightCone;
        let seed = || single_seed(lc).unwrap();
        let d30 = evolve(seed(), RULE_30, lc, 2, &mut []).unwrap();
        let d150 = evolve(seed(), RULE_150, lc, 2, &mut []).unwrap();
        let both = pointwise_combine(&d30, &d150, BoolOp::And).unwrap();
        let rows: Vec<String> = both.rows().iter().map(|t| t.to_string()).collect();
        assert_eq!(rows, ["1", "111", "10001"]);
        assert_eq!(pointwise_combine(&d30, &d30, BoolOp::And).unwrap(), d30);

        let short = evolve(seed(), RULE_30, lc, 1, &mut []).unwrap();
        assert_eq!(
            pointwise_combine(&d30, &short, BoolOp::Or),
            Err(AlgebraError::RowCountMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn pointwise_pads_misaligned_rows() {
        let a = SpacetimeDiagram::from_rows(vec![Tape::parse("11", 0).unwrap()]);
        let b = SpacetimeDiagram::from_rows(vec![Tape::parse("101", 2).unwrap()]);
        let c = pointwise_combine(&a, &b, BoolOp::Or).unwrap();
        let row = &c.rows()[0];
        assert_eq!((row.first_position(), row.last_position()), (-2, 1));
        assert_eq!(row.to_string(), "1011");
    }

    fn op() -> impl Strategy<Value = BoolOp> {
        prop_oneof![Just(BoolOp::And), Just(BoolOp::Or), Just(BoolOp::Xor)]
    }

    proptest! {
        #[test]
        fn combine_matches_oracle(a in any::<u8>(), b in any::<u8>(), op in op()) {
            prop_assert_eq!(combine(r(a), r(b), op), combine_oracle(r(a), r(b), op));
        }

        #[test]
        fn combine_commutes(a in any::<u8>(), b in any::<u8>(), op in op()) {
            prop_assert_eq!(combine(r(a), r(b), op), combine(r(b), r(a), op));
            if op != BoolOp::Xor {
                prop_assert_eq!(combine(r(a), r(a), op), r(a));
            }
        }

        #[test]
        fn involutions_and_distribution(a in any::<u8>(), b in any::<u8>(), op in op()) {
            prop_assert_eq!(mirror(mirror(r(a))), r(a));
            prop_assert_eq!(complement(complement(r(a))), r(a));
            prop_assert_eq!(
                mirror(combine(r(a), r(b), op)),
                combine(mirror(r(a)), mirror(r(b)), op)
            );
        }

        #[test]
        fn divergence_laws(a in any::<u8>(), b in any::<u8>()) {
            prop_assert_eq!(divergence_mask(r(a), r(b)).is_empty(), a == b);
            prop_assert_eq!(divergence_mask(r(a), complement(r(a))), NeighborhoodMask::ALL);
            let m = divergence_mask(r(a), r(b));
            for idx in 0..8u8 {
                let (l, c, rr) = RuleTable::unpack(idx);
                prop_assert_eq!(m.contains(l, c, rr), r(a).apply(l, c, rr) != r(b).apply(l, c, rr));
            }
        }
    }
}
