//! Bit-packed rows of cells and the boundary policies that govern them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub type Word = u64;
pub const WORD_BITS: usize = Word::BITS as usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapeError {
    #[error("tape width must be at least 1")]
    ZeroWidth,
    #[error("invalid cell character {0:?}, expected '0' or '1'")]
    BadCell(char),
    #[error("invalid window policy {0:?}, expected lightcone, fixed:<w> or cyclic:<w>")]
    BadPolicy(String),
}

#[inline]
pub(crate) fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// Mask of the valid bits in the final storage word of a `width`-cell tape.
#[inline]
pub(crate) fn tail_mask(width: usize) -> Word {
    match width % WORD_BITS {
        0 => !0,
        rem => (1 << rem) - 1,
    }
}

/// A row of cells packed LSB-first into 64-bit words.
///
/// `origin` is the storage index of absolute cell position 0, which lets rows
/// of differing widths line up in a spacetime diagram. Storage bits at
/// indices `>= width` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tape {
    words: Vec<Word>,
    width: usize,
    origin: isize,
}

impl Tape {
    pub fn zeros(width: usize, origin: isize) -> Result<Self, TapeError> {
        if width == 0 {
            return Err(TapeError::ZeroWidth);
        }
        Ok(Tape {
            words: vec![0; words_for(width)],
            width,
            origin,
        })
    }

    pub fn from_bits(bits: &[bool], origin: isize) -> Result<Self, TapeError> {
        let mut tape = Tape::zeros(bits.len(), origin)?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                tape.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(tape)
    }

    /// Parses a string of `0`/`1` characters, ignoring whitespace and commas.
    pub fn parse(cells: &str, origin: isize) -> Result<Self, TapeError> {
        let bits = cells
            .chars()
            .filter(|ch| !ch.is_whitespace() && *ch != ',')
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(TapeError::BadCell(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Tape::from_bits(&bits, origin)
    }

    /// Wraps raw storage, clearing any bits past `width`.
    pub(crate) fn from_words(mut words: Vec<Word>, width: usize, origin: isize) -> Self {
        debug_assert!(width > 0);
        debug_assert_eq!(words.len(), words_for(width));
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(width);
        }
        Tape {
            words,
            width,
            origin,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn origin(&self) -> isize {
        self.origin
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Absolute position of storage index 0.
    pub fn first_position(&self) -> isize {
        -self.origin
    }

    /// Absolute position of the last storage index.
    pub fn last_position(&self) -> isize {
        self.width as isize - 1 - self.origin
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.width,
            "cell {i} out of range for width {}",
            self.width
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.width,
            "cell {i} out of range for width {}",
            self.width
        );
        let mask = 1 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Cell at an absolute position; cells outside the tape read as 0.
    pub fn get_abs(&self, pos: isize) -> bool {
        let idx = pos + self.origin;
        idx >= 0 && (idx as usize) < self.width && self.get(idx as usize)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn count_zeros(&self) -> u64 {
        self.width as u64 - self.count_ones()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width).map(|i| self.get(i)).collect()
    }

    /// Left-right reflection; absolute position `x` maps to `-x`.
    pub fn reversed(&self) -> Tape {
        let mut out = Tape::zeros(self.width, self.width as isize - 1 - self.origin)
            .expect("width is non-zero");
        for i in 0..self.width {
            if self.get(i) {
                out.set(self.width - 1 - i, true);
            }
        }
        out
    }

    /// Whether storage past `width` is zero, as every operation guarantees.
    pub fn padding_is_canonical(&self) -> bool {
        self.words.len() == words_for(self.width)
            && self
                .words
                .last()
                .is_none_or(|w| w & !tail_mask(self.width) == 0)
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tape({self}, origin={})", self.origin)
    }
}

/// How the evaluated region of a row evolves from step to step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowPolicy {
    /// The row grows by one cell on each side per step; everything outside reads 0.
    LightCone,
    /// Constant width; cells beyond either edge read 0.
    FixedWidth(usize),
    /// Constant width; edges wrap around.
    Cyclic(usize),
}

impl WindowPolicy {
    /// Width of the row produced by stepping a row of `input_width` cells.
    pub fn next_width(self, input_width: usize) -> usize {
        match self {
            WindowPolicy::LightCone => input_width + 2,
            WindowPolicy::FixedWidth(_) | WindowPolicy::Cyclic(_) => input_width,
        }
    }

    /// Width of row `t` when starting from [`single_seed`].
    pub fn row_width(self, t: usize) -> usize {
        match self {
            WindowPolicy::LightCone => 2 * t + 1,
            WindowPolicy::FixedWidth(w) | WindowPolicy::Cyclic(w) => w,
        }
    }
}

impl fmt::Display for WindowPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowPolicy::LightCone => f.write_str("lightcone"),
            WindowPolicy::FixedWidth(w) => write!(f, "fixed:{w}"),
            WindowPolicy::Cyclic(w) => write!(f, "cyclic:{w}"),
        }
    }
}

impl FromStr for WindowPolicy {
    type Err = TapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TapeError::BadPolicy(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        if lower == "lightcone" || lower == "light-cone" {
            return Ok(WindowPolicy::LightCone);
        }
        let (kind, width) = lower.split_once(':').ok_or_else(bad)?;
        let width: usize = width.parse().map_err(|_| bad())?;
        if width == 0 {
            return Err(TapeError::ZeroWidth);
        }
        match kind {
            "fixed" => Ok(WindowPolicy::FixedWidth(width)),
            "cyclic" => Ok(WindowPolicy::Cyclic(width)),
            _ => Err(bad()),
        }
    }
}

/// A single live cell at absolute position 0.
///
/// Under `FixedWidth(w)` and `Cyclic(w)` the seed sits at index `w / 2`.
pub fn single_seed(policy: WindowPolicy) -> Result<Tape, TapeError> {
    let (width, origin) = match policy {
        WindowPolicy::LightCone => (1, 0),
        WindowPolicy::FixedWidth(w) | WindowPolicy::Cyclic(w) => (w, w / 2),
    };
    let mut tape = Tape::zeros(width, origin as isize)?;
    tape.set(origin, true);
    Ok(tape)
}
