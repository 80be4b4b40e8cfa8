//! Eventual-periodicity and balance checks on bit sequences such as the
//! central column.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColumnError {
    #[error("sequence has {0} bits, need at least 2")]
    TooShort(usize),
    #[error("max_period must be at least 1")]
    ZeroMaxPeriod,
    #[error("prefix length {n} outside 1..={len}")]
    BadPrefix { n: usize, len: usize },
    #[error("zeros/ones ratio undefined: prefix contains no ones")]
    UndefinedRatio,
    #[error("invalid bit character {0:?}")]
    BadBit(char),
}

/// Outcome of [`period_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeriodReport {
    /// `bits[i] == bits[i + period]` for every `i >= onset` in range.
    Found {
        period: usize,
        onset: usize,
    },
    NotFound,
}

impl PeriodReport {
    pub fn found(&self) -> bool {
        matches!(self, PeriodReport::Found { .. })
    }

    pub fn period(&self) -> Option<usize> {
        match *self {
            PeriodReport::Found { period, .. } => Some(period),
            PeriodReport::NotFound => None,
        }
    }

    pub fn onset(&self) -> Option<usize> {
        match *self {
            PeriodReport::Found { onset, .. } => Some(onset),
            PeriodReport::NotFound => None,
        }
    }
}

impl fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodReport::Found { period, onset } => {
                write!(f, "found eventual period p={period} s={onset}")
            }
            PeriodReport::NotFound => f.write_str("no eventual period found"),
        }
    }
}

struct Packed {
    words: Vec<u64>,
    len: usize,
}

impl Packed {
    fn new(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64) + 1];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[i / 64] |= 1 << (i % 64);
        }
        Packed {
            words,
            len: bits.len(),
        }
    }

    /// Bits `start .. start + 64`, zero past the end.
    #[inline]
    fn word_at(&self, start: usize) -> u64 {
        let (k, off) = (start / 64, start % 64);
        let lo = self.words.get(k).copied().unwrap_or(0);
        if off == 0 {
            lo
        } else {
            let hi = self.words.get(k + 1).copied().unwrap_or(0);
            (lo >> off) | (hi << (64 - off))
        }
    }

    /// Smallest onset for `period` if it does not exceed `limit`. The
    /// mismatch vector `bits[i] ^ bits[i + period]` is scanned from the top
    /// down, so aperiodic input usually fails on the first word.
    fn onset_for(&self, period: usize, limit: usize) -> Option<usize> {
        let mut end = self.len - period;
        while end > 0 {
            let start = end.saturating_sub(64);
            let width = end - start;
            let mut diff = self.word_at(start) ^ self.word_at(start + period);
            if width < 64 {
                diff &= (1u64 << width) - 1;
            }
            if diff != 0 {
                let onset = start + 64 - diff.leading_zeros() as usize;
                return (onset <= limit).then_some(onset);
            }
            end = start;
        }
        Some(0)
    }
}

/// Finds the canonical eventual period of `bits`: the smallest period
/// `p <= max_period`, and for it the smallest onset `s <= max_onset`, such
/// that `bits[i] == bits[i + p]` for all `s <= i < n - p` and the periodic
/// tail `n - s` spans at least two periods.
///
/// `max_onset` is clamped to `n`. Periods are checked in parallel; the result
/// does not depend on scheduling.
pub fn period_scan(
    bits: &[bool],
    max_period: usize,
    max_onset: usize,
) -> Result<PeriodReport, ColumnError> {
    let n = bits.len();
    if n < 2 {
        return Err(ColumnError::TooShort(n));
    }
    if max_period == 0 {
        return Err(ColumnError::ZeroMaxPeriod);
    }
    let packed = Packed::new(bits);
    let max_onset = max_onset.min(n);
    let top = max_period.min(n / 2);
    let hit = (1..=top).into_par_iter().find_map_first(|p| {
        let limit = max_onset.min(n - 2 * p);
        packed.onset_for(p, limit).map(|s| PeriodReport::Found {
            period: p,
            onset: s,
        })
    });
    Ok(hit.unwrap_or(PeriodReport::NotFound))
}

/// Zeros divided by ones over the first `n` bits.
pub fn prefix_ratio(bits: &[bool], n: usize) -> Result<f64, ColumnError> {
    if n == 0 || n > bits.len() {
        return Err(ColumnError::BadPrefix { n, len: bits.len() });
    }
    let ones = bits[..n].iter().filter(|&&b| b).count();
    if ones == 0 {
        return Err(ColumnError::UndefinedRatio);
    }
    Ok((n - ones) as f64 / ones as f64)
}

/// Parses `0`/`1` characters, skipping whitespace, commas and `#` comments.
pub fn parse_bits(text: &str) -> Result<Vec<bool>, ColumnError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for ch in line.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                c if c.is_whitespace() || c == ',' => {}
                c => return Err(ColumnError::BadBit(c)),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    /// Direct enumeration of (p, s) in canonical order.
    fn brute_force(b: &[bool], max_p: usize, max_s: usize) -> PeriodReport {
        let n = b.len();
        for p in 1..=max_p {
            for s in 0..=max_s.min(n) {
                if n < s || n - s < 2 * p {
                    continue;
                }
                if (s..n - p).all(|i| b[i] == b[i + p]) {
                    return PeriodReport::Found {
                        period: p,
                        onset: s,
                    };
                }
            }
        }
        PeriodReport::NotFound
    }

    #[test]
    fn alternating() {
        let r = period_scan(&bits("0101010101"), 8, 8).unwrap();
        assert_eq!(
            r,
            PeriodReport::Found {
                period: 2,
                onset: 0
            }
        );
    }

    #[test]
    fn alternating_after_prefix() {
        let r = period_scan(&bits("1110101010"), 8, 8).unwrap();
        assert_eq!(
            r,
            PeriodReport::Found {
                period: 2,
                onset: 2
            }
        );
        assert_eq!(r, brute_force(&bits("1110101010"), 8, 8));
    }

    #[test]
    fn seed_then_zeros() {
        let mut b = vec![true];
        b.extend([false; 16]);
        assert_eq!(
            period_scan(&b, 2048, 2048).unwrap(),
            PeriodReport::Found {
                period: 1,
                onset: 1
            }
        );
    }

    #[test]
    fn onset_limit_respected() {
        // Periodic only from index 5.
        let b = bits("10011 0000000000");
        assert_eq!(
            period_scan(&b, 3, 5).unwrap(),
            PeriodReport::Found {
                period: 1,
                onset: 5
            }
        );
        assert_eq!(period_scan(&b, 3, 4).unwrap(), brute_force(&b, 3, 4));
    }

    #[test]
    fn errors() {
        assert_eq!(period_scan(&[], 4, 4), Err(ColumnError::TooShort(0)));
        assert_eq!(period_scan(&[true], 4, 4), Err(ColumnError::TooShort(1)));
        assert_eq!(
            period_scan(&[true, false], 0, 1),
            Err(ColumnError::ZeroMaxPeriod)
        );
        assert_eq!(parse_bits("01a"), Err(ColumnError::BadBit('a')));
    }

    #[test]
    fn prefix_ratio_examples() {
        assert_eq!(prefix_ratio(&bits("11011"), 5), Ok(0.25));
        assert_eq!(prefix_ratio(&bits("1000"), 1), Ok(0.0));
        assert_eq!(prefix_ratio(&bits("0101"), 4), Ok(1.0));
        assert_eq!(
            prefix_ratio(&bits("0001"), 3),
            Err(ColumnError::UndefinedRatio)
        );
        assert_eq!(
            prefix_ratio(&bits("01"), 3),
            Err(ColumnError::BadPrefix { n: 3, len: 2 })
        );
        assert_eq!(
            prefix_ratio(&bits("01"), 0),
            Err(ColumnError::BadPrefix { n: 0, len: 2 })
        );
    }

    #[test]
    fn long_periodic_sequences_cross_words() {
        let unit = bits("1101001110");
        let mut b: Vec<bool> = (0..137).map(|i| i % 7 == 3).collect();
        for _ in 0..40 {
            b.extend(&unit);
        }
        let r = period_scan(&b, 64, 300).unwrap();
        assert_eq!(r, brute_force(&b, 64, 300));
        assert_eq!(r.period(), Some(10));
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            v in prop::collection::vec(any::<bool>(), 2..200),
            max_p in 1usize..40,
            max_s in 0usize..200,
        ) {
            prop_assert_eq!(period_scan(&v, max_p, max_s).unwrap(), brute_force(&v, max_p, max_s));
        }

        #[test]
        fn planted_period_found(
            prefix in prop::collection::vec(any::<bool>(), 0..80),
            unit in prop::collection::vec(any::<bool>(), 1..12),
            reps in 3usize..30,
        ) {
            let mut v = prefix.clone();
            for _ in 0..reps {
                v.extend(&unit);
            }
            let r = period_scan(&v, unit.len(), prefix.len()).unwrap();
            let p = r.period().expect("planted period");
            prop_assert!(p <= unit.len());
            prop_assert!(r.onset().unwrap() <= prefix.len());
            // Longer prefixes of the same sequence keep the report.
            let mut longer = v.clone();
            longer.extend(&unit);
            prop_assert_eq!(period_scan(&longer, unit.len(), prefix.len()).unwrap(), r);
        }
    }
}
