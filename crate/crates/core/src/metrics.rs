//! Branch tallies, zeros/ones ratios and correlation between metric series.
//!
//! A branch hit is a cell evaluation whose neighborhood has centre = right =
//! 1, the only case where rule 30 departs from rule 150. The randomness count
//! after `t` steps is cumulative hits over cumulative evaluations.

use thiserror::Error;

use crate::evolve::{central_column, Evolution, ObserverError, RowObserver};
use crate::rule::RuleTable;
use crate::tape::{single_seed, Tape, TapeError, WindowPolicy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Tape(#[from] TapeError),
    #[error("at least one step is required")]
    NoSteps,
    #[error("zeros/ones ratio undefined at iteration {iteration}: no ones counted")]
    UndefinedRatio { iteration: usize },
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("series are not aligned at entry {index}")]
    AxisMismatch { index: usize },
    #[error("need at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("iterations must be strictly increasing (entry {index})")]
    NotIncreasing { index: usize },
    #[error("non-finite value at entry {index}")]
    NonFinite { index: usize },
}

/// Iteration-indexed sequence of real values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricSeries {
    entries: Vec<(usize, f64)>,
}

impl MetricSeries {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, MetricsError> {
        for (index, w) in entries.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(MetricsError::NotIncreasing { index: index + 1 });
            }
        }
        if let Some(index) = entries.iter().position(|(_, v)| !v.is_finite()) {
            return Err(MetricsError::NonFinite { index });
        }
        Ok(MetricSeries { entries })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iterations(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn last(&self) -> Option<(usize, f64)> {
        self.entries.last().copied()
    }

    /// Value recorded at `iteration`, if any.
    pub fn at(&self, iteration: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&iteration, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Cumulative branch hits and cell evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BranchTally {
    pub hits: u64,
    pub total: u64,
}

impl BranchTally {
    pub fn ratio(&self) -> Option<f64> {
        (self.total > 0).then(|| self.hits as f64 / self.total as f64)
    }
}

/// Number of evaluations with centre = right = 1 when `row` is stepped.
///
/// Under zero boundaries this is the count of adjacent `11` pairs in the row;
/// `Cyclic` adds the pair across the seam.
pub fn branch_hits(row: &Tape, policy: WindowPolicy) -> u64 {
    let w = row.words();
    let mut hits: u64 = w
        .iter()
        .enumerate()
        .map(|(k, &cur)| {
            let next = w.get(k + 1).copied().unwrap_or(0);
            let right = (cur >> 1) | (next << 63);
            (cur & right).count_ones() as u64
        })
        .sum();
    if let WindowPolicy::Cyclic(_) = policy {
        hits += (row.get(row.width() - 1) & row.get(0)) as u64;
    }
    hits
}

/// Tallies branch hits for every step of an evolution it observes.
///
/// The contribution of step `t` is measured on row `t - 1` and committed when
/// row `t` arrives, so the final observed row is never counted.
#[derive(Debug, Clone)]
pub struct BranchTallyObserver {
    policy: WindowPolicy,
    tally: BranchTally,
    pending: Option<BranchTally>,
    series: Vec<(usize, f64)>,
}

impl BranchTallyObserver {
    pub fn new(policy: WindowPolicy) -> Self {
        BranchTallyObserver {
            policy,
            tally: BranchTally::default(),
            pending: None,
            series: Vec::new(),
        }
    }

    pub fn tally(&self) -> BranchTally {
        self.tally
    }

    pub fn into_series(self) -> MetricSeries {
        MetricSeries {
            entries: self.series,
        }
    }
}

impl RowObserver for BranchTallyObserver {
    fn observe(&mut self, t: usize, row: &Tape) -> Result<(), ObserverError> {
        if let Some(p) = self.pending.take() {
            self.tally.hits += p.hits;
            self.tally.total += p.total;
            let value = self.tally.ratio().ok_or("no evaluations tallied")?;
            self.series.push((t, value));
        }
        self.pending = Some(BranchTally {
            hits: branch_hits(row, self.policy),
            total: self.policy.next_width(row.width()) as u64,
        });
        Ok(())
    }
}

/// Cumulative zeros/ones over whole rows, starting from row 0.
#[derive(Debug, Clone, Default)]
pub struct RatioObserver {
    zeros: u64,
    ones: u64,
    series: Vec<(usize, f64)>,
    undefined_at: Option<usize>,
}

impl RatioObserver {
    pub fn new() -> Self {
        RatioObserver::default()
    }

    pub fn counts(&self) -> (u64, u64) {
        (self.zeros, self.ones)
    }

    pub fn into_series(self) -> Result<MetricSeries, MetricsError> {
        match self.undefined_at {
            Some(iteration) => Err(MetricsError::UndefinedRatio { iteration }),
            None => Ok(MetricSeries {
                entries: self.series,
            }),
        }
    }
}

impl RowObserver for RatioObserver {
    fn observe(&mut self, t: usize, row: &Tape) -> Result<(), ObserverError> {
        self.ones += row.count_ones();
        self.zeros += row.count_zeros();
        if t == 0 {
            return Ok(());
        }
        if self.ones == 0 {
            self.undefined_at.get_or_insert(t);
        } else {
            self.series.push((t, self.zeros as f64 / self.ones as f64));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatioScope {
    FullWindow,
    CentralColumn,
}

impl std::fmt::Display for RatioScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RatioScope::FullWindow => "full-window",
            RatioScope::CentralColumn => "central-column",
        })
    }
}

impl std::str::FromStr for RatioScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "full-window" | "full" | "window" => Ok(RatioScope::FullWindow),
            "central-column" | "column" | "central" => Ok(RatioScope::CentralColumn),
            other => Err(format!(
                "unknown scope {other:?}, expected full-window or central-column"
            )),
        }
    }
}

fn run_observed(
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
    observers: &mut [&mut dyn RowObserver],
) -> Result<(), MetricsError> {
    if steps == 0 {
        return Err(MetricsError::NoSteps);
    }
    let seed = single_seed(policy)?;
    Evolution::new(rule, policy)
        .stream(seed, steps, observers)
        .map(drop)
        .map_err(|e| match e {
            crate::evolve::EvolveError::Tape(t) => MetricsError::Tape(t),
            // The metric observers never fail.
            other => panic!("metric observer failed: {other}"),
        })
}

/// Randomness count after each of steps `1..=steps` from a single seed.
pub fn randomness_count_series(
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
) -> Result<MetricSeries, MetricsError> {
    let mut tally = BranchTallyObserver::new(policy);
    run_observed(rule, policy, steps, &mut [&mut tally])?;
    Ok(tally.into_series())
}

/// Final branch tally after `steps` steps from a single seed.
pub fn branch_tally(
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
) -> Result<BranchTally, MetricsError> {
    let mut tally = BranchTallyObserver::new(policy);
    run_observed(rule, policy, steps, &mut [&mut tally])?;
    Ok(tally.tally())
}

/// Cumulative zeros/ones ratio at each of iterations `1..=steps`.
///
/// `FullWindow` counts every cell of rows `0..=t`; `CentralColumn` counts the
/// first `t + 1` central-column bits.
pub fn ratio_series(
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
    scope: RatioScope,
) -> Result<MetricSeries, MetricsError> {
    if steps == 0 {
        return Err(MetricsError::NoSteps);
    }
    match scope {
        RatioScope::FullWindow => {
            let mut ratio = RatioObserver::new();
            run_observed(rule, policy, steps, &mut [&mut ratio])?;
            ratio.into_series()
        }
        RatioScope::CentralColumn => {
            let column = central_column(rule, policy, steps)?;
            column_ratio_series(&column)
        }
    }
}

/// Ratio series over a bit sequence: entry `t` covers bits `0..=t`.
pub fn column_ratio_series(bits: &[bool]) -> Result<MetricSeries, MetricsError> {
    let mut ones = 0u64;
    let mut entries = Vec::with_capacity(bits.len().saturating_sub(1));
    for (t, &b) in bits.iter().enumerate() {
        ones += b as u64;
        if t == 0 {
            continue;
        }
        if ones == 0 {
            return Err(MetricsError::UndefinedRatio { iteration: t });
        }
        let zeros = (t as u64 + 1) - ones;
        entries.push((t, zeros as f64 / ones as f64));
    }
    Ok(MetricSeries { entries })
}

pub fn scale_series(s: &MetricSeries, factor: f64) -> MetricSeries {
    assert!(factor.is_finite(), "scale factor must be finite");
    MetricSeries {
        entries: s.entries.iter().map(|&(t, v)| (t, v * factor)).collect(),
    }
}

/// Pearson correlation of two series sharing an iteration axis.
///
/// Computed in two passes: means first, then centred cross and square sums.
pub fn pearson(x: &MetricSeries, y: &MetricSeries) -> Result<f64, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(MetricsError::TooShort(x.len()));
    }
    if let Some(index) = x.iterations().zip(y.iterations()).position(|(a, b)| a != b) {
        return Err(MetricsError::AxisMismatch { index });
    }
    let n = x.len() as f64;
    let mx = x.values().sum::<f64>() / n;
    let my = y.values().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.values().zip(y.values()) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Randomness count, ratio series and their correlation from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub randomness: MetricSeries,
    pub ratio: MetricSeries,
    pub tally: BranchTally,
    /// `None` when either series is constant.
    pub pearson: Option<f64>,
}

pub fn metrics_report(
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
    scope: RatioScope,
) -> Result<MetricsReport, MetricsError> {
    let mut tally = BranchTallyObserver::new(policy);
    let mut window = RatioObserver::new();
    match scope {
        RatioScope::FullWindow => {
            run_observed(rule, policy, steps, &mut [&mut tally, &mut window])?
        }
        RatioScope::CentralColumn => run_observed(rule, policy, steps, &mut [&mut tally])?,
    }
    let ratio = match scope {
        RatioScope::FullWindow => window.into_series()?,
        RatioScope::CentralColumn => column_ratio_series(&central_column(rule, policy, steps)?)?,
    };
    let final_tally = tally.tally();
    let randomness = tally.into_series();
    let pearson = match pearson(&randomness, &ratio) {
        Ok(r) => Some(r),
        Err(MetricsError::ZeroVariance) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        randomness,
        ratio,
        tally: final_tally,
        pearson,
    })
}

/// Final randomness count under `FixedWidth(2N)` after `N` steps, per `N`.
pub fn steady_state_values(
    rule: RuleTable,
    iterations: &[usize],
) -> Result<Vec<(usize, f64)>, MetricsError> {
    iterations
        .iter()
        .map(|&n| {
            let tally = branch_tally(rule, WindowPolicy::FixedWidth(2 * n), n)?;
            Ok((n, tally.ratio().ok_or(MetricsError::NoSteps)?))
        })
        .collect()
}
