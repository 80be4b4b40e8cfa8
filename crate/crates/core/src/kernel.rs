//! Row update kernels.
//!
//! [`step`] updates 64 cells per word operation: the left, centre and right
//! neighbors of every cell in a word are assembled from the row by shifting
//! adjacent storage words, and the rule is applied as a three-level
//! multiplexer over constant output masks. [`step_naive`] is a per-cell table
//! lookup kept as an independent reference.

use crate::rule::RuleTable;
use crate::tape::{words_for, Tape, WindowPolicy, Word, WORD_BITS};

/// Rule outputs broadcast to full words, indexed by `4l + 2c + r`.
#[derive(Debug, Clone, Copy)]
struct RuleMasks([Word; 8]);

impl RuleMasks {
    fn new(rule: RuleTable) -> Self {
        let mut m = [0; 8];
        for (idx, slot) in m.iter_mut().enumerate() {
            if rule.output_at(idx as u8) {
                *slot = !0;
            }
        }
        RuleMasks(m)
    }

    #[inline(always)]
    fn eval(&self, l: Word, c: Word, r: Word) -> Word {
        let m = &self.0;
        let nr = !r;
        let a00 = (r & m[1]) | (nr & m[0]);
        let a01 = (r & m[3]) | (nr & m[2]);
        let a10 = (r & m[5]) | (nr & m[4]);
        let a11 = (r & m[7]) | (nr & m[6]);
        let b0 = (c & a01) | (!c & a00);
        let b1 = (c & a11) | (!c & a10);
        (l & b1) | (!l & b0)
    }
}

/// Bits `64k + s .. 64k + s + 64` of a row, given words `k-1`, `k`, `k+1`.
#[inline(always)]
fn pick(prev: Word, cur: Word, next: Word, s: i32) -> Word {
    match s {
        0 => cur,
        s if s > 0 => (cur >> s) | (next << (WORD_BITS as i32 - s)),
        s => (cur << -s) | (prev >> (WORD_BITS as i32 + s)),
    }
}

/// Output cell `j` reads input cells `j + D - 1`, `j + D`, `j + D + 1`, with
/// anything outside the input reading as 0.
fn kernel<const D: i32>(input: &[Word], out_width: usize, masks: &RuleMasks) -> Vec<Word> {
    let n_out = words_for(out_width);
    let mut out = vec![0; n_out];
    let at = |k: isize| -> Word {
        if k >= 0 && (k as usize) < input.len() {
            input[k as usize]
        } else {
            0
        }
    };
    let word = |prev, cur, next| {
        masks.eval(
            pick(prev, cur, next, D - 1),
            pick(prev, cur, next, D),
            pick(prev, cur, next, D + 1),
        )
    };

    // Interior words have both storage neighbors present.
    let interior_end = n_out.min(input.len().saturating_sub(1)).max(1);
    if interior_end > 1 {
        for (o, w) in out[1..interior_end].iter_mut().zip(input.windows(3)) {
            *o = word(w[0], w[1], w[2]);
        }
    }
    out[0] = word(0, at(0), at(1));
    for (k, o) in out.iter_mut().enumerate().skip(interior_end) {
        let k = k as isize;
        *o = word(at(k - 1), at(k), at(k + 1));
    }
    out
}

fn wrap_edges(input: &Tape, out: &mut Tape, rule: RuleTable) {
    let w = input.width();
    for j in [0, w - 1] {
        let l = input.get((j + w - 1) % w);
        let c = input.get(j);
        let r = input.get((j + 1) % w);
        out.set(j, rule.apply(l, c, r));
    }
}

/// Advances a row by one generation using word-parallel operations.
///
/// `FixedWidth` and `Cyclic` keep the width of the input tape.
pub fn step(tape: &Tape, rule: RuleTable, policy: WindowPolicy) -> Tape {
    let masks = RuleMasks::new(rule);
    let w = tape.width();
    match policy {
        WindowPolicy::LightCone => {
            let words = kernel::<-1>(tape.words(), w + 2, &masks);
            Tape::from_words(words, w + 2, tape.origin() + 1)
        }
        WindowPolicy::FixedWidth(_) => {
            let words = kernel::<0>(tape.words(), w, &masks);
            Tape::from_words(words, w, tape.origin())
        }
        WindowPolicy::Cyclic(_) => {
            let words = kernel::<0>(tape.words(), w, &masks);
            let mut out = Tape::from_words(words, w, tape.origin());
            wrap_edges(tape, &mut out, rule);
            out
        }
    }
}

/// Keeps only the output cells whose whole neighborhood lies inside the
/// input, so the row loses one cell per side. Returns `None` when fewer than
/// three cells remain to read from.
pub(crate) fn step_interior(tape: &Tape, rule: RuleTable) -> Option<Tape> {
    let w = tape.width();
    if w < 3 {
        return None;
    }
    let words = kernel::<1>(tape.words(), w - 2, &RuleMasks::new(rule));
    Some(Tape::from_words(words, w - 2, tape.origin() - 1))
}

/// Per-cell reference implementation of [`step`].
pub fn step_naive(tape: &Tape, rule: RuleTable, policy: WindowPolicy) -> Tape {
    let w = tape.width() as isize;
    let read = |i: isize| i >= 0 && i < w && tape.get(i as usize);
    match policy {
        WindowPolicy::LightCone => {
            let bits: Vec<bool> = (-1..=w)
                .map(|i| rule.apply(read(i - 1), read(i), read(i + 1)))
                .collect();
            Tape::from_bits(&bits, tape.origin() + 1).expect("non-empty")
        }
        WindowPolicy::FixedWidth(_) => {
            let bits: Vec<bool> = (0..w)
                .map(|i| rule.apply(read(i - 1), read(i), read(i + 1)))
                .collect();
            Tape::from_bits(&bits, tape.origin()).expect("non-empty")
        }
        WindowPolicy::Cyclic(_) => {
            let wrap = |i: isize| read(i.rem_euclid(w));
            let bits: Vec<bool> = (0..w)
                .map(|i| rule.apply(wrap(i - 1), wrap(i), wrap(i + 1)))
                .collect();
            Tape::from_bits(&bits, tape.origin()).expect("non-empty")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{RULE_0, RULE_150, RULE_30};
    use crate::tape::single_seed;
    use proptest::prelude::*;

    fn tape(s: &str, origin: isize) -> Tape {
        Tape::parse(s, origin).unwrap()
    }

    #[test]
    fn light_cone_examples() {
        let seed = single_seed(WindowPolicy::LightCone).unwrap();
        let row1 = step(&seed, RULE_30, WindowPolicy::LightCone);
        assert_eq!(row1.to_string(), "111");
        assert_eq!(row1.origin(), 1);
        let rule150 = step(&tape("111", 1), RULE_150, WindowPolicy::LightCone);
        assert_eq!(rule150.to_string(), "10101");
    }

    #[test]
    fn fixed_width_example() {
        let out = step(&tape("0010", 2), RULE_30, WindowPolicy::FixedWidth(4));
        assert_eq!(out.to_string(), "0111");
    }

    #[test]
    fn naive_examples() {
        let p = WindowPolicy::LightCone;
        assert_eq!(step_naive(&tape("1", 0), RULE_30, p).to_string(), "111");
        assert_eq!(step_naive(&tape("111", 1), RULE_30, p).to_string(), "11001");
        let z = step_naive(&tape("1011", 1), RULE_0, WindowPolicy::Cyclic(4));
        assert_eq!(z.count_ones(), 0);
    }

    #[test]
    fn cyclic_wraps_edges() {
        // 1000 under rule 30: cell 3 sees (0,0,1) across the seam.
        let out = step(&tape("1000", 0), RULE_30, WindowPolicy::Cyclic(4));
        assert_eq!(out.to_string(), "1101");
        let one = step(&tape("1", 0), RULE_150, WindowPolicy::Cyclic(1));
        assert_eq!(one.to_string(), "1");
    }

    #[test]
    fn word_boundaries() {
        // Widths straddling word edges, dense rows so carries matter.
        for w in [62, 63, 64, 65, 127, 128, 129, 191, 192, 193] {
            let bits: Vec<bool> = (0..w).map(|i| (i * 7 + i / 3) % 3 != 0).collect();
            let t = Tape::from_bits(&bits, (w / 2) as isize).unwrap();
            for rule in [RULE_30, RULE_150, RuleTable::new(1), RuleTable::new(255)] {
                for p in [
                    WindowPolicy::LightCone,
                    WindowPolicy::FixedWidth(w),
                    WindowPolicy::Cyclic(w),
                ] {
                    let fast = step(&t, rule, p);
                    assert_eq!(fast, step_naive(&t, rule, p), "w={w} rule={rule} {p}");
                    assert!(fast.padding_is_canonical());
                }
            }
        }
    }

    #[test]
    fn interior_step_matches_fixed_interior() {
        for w in [3, 4, 64, 65, 66, 130] {
            let bits: Vec<bool> = (0..w).map(|i| (i * 5 + 1) % 4 < 2).collect();
            let t = Tape::from_bits(&bits, 1).unwrap();
            for n in [30u8, 86, 1, 254] {
                let rule = RuleTable::new(n);
                let inner = step_interior(&t, rule).unwrap();
                let full = step_naive(&t, rule, WindowPolicy::FixedWidth(w));
                assert_eq!(inner.width(), w - 2);
                assert_eq!(inner.origin(), 0);
                assert!(inner.padding_is_canonical());
                for j in 0..w - 2 {
                    assert_eq!(inner.get(j), full.get(j + 1));
                }
            }
        }
        assert!(step_interior(&tape("11", 0), RULE_30).is_none());
    }

    fn arb_case() -> impl Strategy<Value = (u8, Vec<bool>, u8)> {
        (
            any::<u8>(),
            prop::collection::vec(any::<bool>(), 1..=129),
            0u8..3,
        )
    }

    proptest! {
        #[test]
        fn fast_step_equals_naive((rule, bits, kind) in arb_case()) {
            let w = bits.len();
            let policy = match kind {
                0 => WindowPolicy::LightCone,
                1 => WindowPolicy::FixedWidth(w),
                _ => WindowPolicy::Cyclic(w),
            };
            let rule = RuleTable::new(rule);
            let mut fast = Tape::from_bits(&bits, (w / 2) as isize).unwrap();
            let mut slow = fast.clone();
            for _ in 0..20 {
                fast = step(&fast, rule, policy);
                slow = step_naive(&slow, rule, policy);
                prop_assert_eq!(&fast, &slow);
                prop_assert!(fast.padding_is_canonical());
            }
        }
    }
}
