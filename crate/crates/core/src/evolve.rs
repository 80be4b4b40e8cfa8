//! Multi-step evolution: retained spacetime diagrams, streaming observers and
//! central-column extraction.

use std::error::Error as StdError;

use thiserror::Error;

use crate::kernel::{step, step_interior};
use crate::rule::RuleTable;
use crate::tape::{single_seed, Tape, TapeError, WindowPolicy};

pub type ObserverError = Box<dyn StdError + Send + Sync>;

/// Rows beyond this count are not retained by [`evolve`].
pub const DEFAULT_RETENTION_LIMIT: usize = 4096;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error(transparent)]
    Tape(#[from] TapeError),
    #[error("observer failed at row {row}: {source}")]
    Observer { row: usize, source: ObserverError },
    #[error("{rows} rows exceed the retention limit of {limit}; stream the run through observers instead")]
    RetentionExceeded { rows: usize, limit: usize },
}

/// Receives each row of an evolution exactly once, in order.
pub trait RowObserver {
    fn observe(&mut self, t: usize, row: &Tape) -> Result<(), ObserverError>;
}

impl<F> RowObserver for F
where
    F: FnMut(usize, &Tape) -> Result<(), ObserverError>,
{
    fn observe(&mut self, t: usize, row: &Tape) -> Result<(), ObserverError> {
        self(t, row)
    }
}

/// Rows of an evolution, row 0 first. Each row carries its own origin so
/// absolute positions line up across rows of different widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacetimeDiagram {
    rows: Vec<Tape>,
}

impl SpacetimeDiagram {
    pub fn from_rows(rows: Vec<Tape>) -> Self {
        SpacetimeDiagram { rows }
    }

    pub fn rows(&self) -> &[Tape] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Tape> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Smallest and largest absolute positions covered by any row.
    pub fn span(&self) -> Option<(isize, isize)> {
        let lo = self.rows.iter().map(Tape::first_position).min()?;
        let hi = self.rows.iter().map(Tape::last_position).max()?;
        Some((lo, hi))
    }

    /// The cells at absolute position `pos`, one per row.
    pub fn column(&self, pos: isize) -> Vec<bool> {
        self.rows.iter().map(|r| r.get_abs(pos)).collect()
    }
}

/// Configured evolution of one rule under one window policy.
#[derive(Debug, Clone, Copy)]
pub struct Evolution {
    rule: RuleTable,
    policy: WindowPolicy,
    retention_limit: usize,
}

impl Evolution {
    pub fn new(rule: RuleTable, policy: WindowPolicy) -> Self {
        Evolution {
            rule,
            policy,
            retention_limit: DEFAULT_RETENTION_LIMIT,
        }
    }

    pub fn with_retention_limit(mut self, rows: usize) -> Self {
        self.retention_limit = rows;
        self
    }

    pub fn rule(&self) -> RuleTable {
        self.rule
    }

    pub fn policy(&self) -> WindowPolicy {
        self.policy
    }

    pub fn retention_limit(&self) -> usize {
        self.retention_limit
    }

    /// Whether a run of `steps` would keep every row in memory.
    pub fn retains(&self, steps: usize) -> bool {
        steps.saturating_add(1) <= self.retention_limit
    }

    /// Feeds rows `0..=steps` to the observers without keeping them and
    /// returns the final row.
    pub fn stream(
        &self,
        seed: Tape,
        steps: usize,
        observers: &mut [&mut dyn RowObserver],
    ) -> Result<Tape, EvolveError> {
        let mut row = seed;
        notify(observers, 0, &row)?;
        for t in 1..=steps {
            row = step(&row, self.rule, self.policy);
            notify(observers, t, &row)?;
        }
        Ok(row)
    }

    /// Retains rows `0..=steps`, also feeding them to the observers.
    pub fn run(
        &self,
        seed: Tape,
        steps: usize,
        observers: &mut [&mut dyn RowObserver],
    ) -> Result<SpacetimeDiagram, EvolveError> {
        let rows = steps.saturating_add(1);
        if !self.retains(steps) {
            return Err(EvolveError::RetentionExceeded {
                rows,
                limit: self.retention_limit,
            });
        }
        let mut kept = Vec::with_capacity(rows);
        let mut collect = |_t: usize, row: &Tape| -> Result<(), ObserverError> {
            kept.push(row.clone());
            Ok(())
        };
        {
            let mut all: Vec<&mut dyn RowObserver> = Vec::with_capacity(observers.len() + 1);
            all.push(&mut collect);
            for o in observers.iter_mut() {
                all.push(&mut **o);
            }
            self.stream(seed, steps, &mut all)?;
        }
        Ok(SpacetimeDiagram::from_rows(kept))
    }
}

fn notify(observers: &mut [&mut dyn RowObserver], t: usize, row: &Tape) -> Result<(), EvolveError> {
    for o in observers.iter_mut() {
        o.observe(t, row)
            .map_err(|source| EvolveError::Observer { row: t, source })?;
    }
    Ok(())
}

/// Evolves `seed` for `steps` generations and retains the diagram.
///
/// Fails with [`EvolveError::RetentionExceeded`] above
/// [`DEFAULT_RETENTION_LIMIT`] rows; use [`Evolution::stream`] for such runs.
pub fn evolve(
    seed: Tape,
    rule: RuleTable,
    policy: WindowPolicy,
    steps: usize,
    observers: &mut [&mut dyn RowObserver],
) -> Result<SpacetimeDiagram, EvolveError> {
    Evolution::new(rule, policy).run(seed, steps, observers)
}

/// Collects the cell at absolute position 0 from every row it observes.
#[derive(Debug, Default, Clone)]
pub struct CentralColumn {
    pub bits: Vec<bool>,
}

impl RowObserver for CentralColumn {
    fn observe(&mut self, _t: usize, row: &Tape) -> Result<(), ObserverError> {
        self.bits.push(row.get_abs(0));
        Ok(())
    }
}

/// Cells at absolute position 0 for rows `0..=n` from a single seed.
///
/// Under `LightCone` only the cells that can still influence position 0 by
/// row `n` are computed: the row grows until the halfway point and then
/// loses one cell per side per step.
pub fn central_column(
    rule: RuleTable,
    policy: WindowPolicy,
    n: usize,
) -> Result<Vec<bool>, TapeError> {
    let mut row = single_seed(policy)?;
    let mut bits = Vec::with_capacity(n + 1);
    bits.push(row.get_abs(0));
    match policy {
        WindowPolicy::LightCone => {
            let grow_until = n.div_ceil(2);
            for t in 1..=n {
                row = if t <= grow_until {
                    step(&row, rule, policy)
                } else {
                    step_interior(&row, rule).expect("row keeps at least three cells")
                };
                bits.push(row.get_abs(0));
            }
        }
        WindowPolicy::FixedWidth(_) | WindowPolicy::Cyclic(_) => {
            for _ in 0..n {
                row = step(&row, rule, policy);
                bits.push(row.get_abs(0));
            }
        }
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{RULE_0, RULE_150, RULE_30};

    fn seed() -> Tape {
        single_seed(WindowPolicy::LightCone).unwrap()
    }

    fn strings(d: &SpacetimeDiagram) -> Vec<String> {
        d.rows().iter().map(Tape::to_string).collect()
    }

    #[test]
    fn rule_30_first_rows() {
        let d = evolve(seed(), RULE_30, WindowPolicy::LightCone, 4, &mut []).unwrap();
        assert_eq!(strings(&d), ["1", "111", "11001", "1101111", "110010001"]);
        for (t, row) in d.rows().iter().enumerate() {
            assert_eq!(row.width(), 2 * t + 1);
            assert_eq!(row.origin(), t as isize);
        }
    }

    #[test]
    fn zero_steps_keeps_seed_only() {
        let d = evolve(seed(), RULE_150, WindowPolicy::LightCone, 0, &mut []).unwrap();
        assert_eq!(strings(&d), ["1"]);
    }

    #[test]
    fn observers_see_every_row_in_order() {
        let mut seen = Vec::new();
        let mut obs = |t: usize, row: &Tape| -> Result<(), ObserverError> {
            seen.push((t, row.width()));
            Ok(())
        };
        let d = evolve(seed(), RULE_30, WindowPolicy::LightCone, 3, &mut [&mut obs]).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(seen, [(0, 1), (1, 3), (2, 5), (3, 7)]);
    }

    #[test]
    fn observer_failure_aborts() {
        let mut count = 0;
        let mut obs = |t: usize, _: &Tape| -> Result<(), ObserverError> {
            count += 1;
            if t == 2 {
                Err("disk full".into())
            } else {
                Ok(())
            }
        };
        let err = Evolution::new(RULE_30, WindowPolicy::LightCone)
            .stream(seed(), 10, &mut [&mut obs])
            .unwrap_err();
        assert!(matches!(err, EvolveError::Observer { row: 2, .. }));
        assert_eq!(count, 3);
    }

    #[test]
    fn retention_limit_enforced() {
        let evo = Evolution::new(RULE_30, WindowPolicy::LightCone).with_retention_limit(5);
        assert!(evo.run(seed(), 4, &mut []).is_ok());
        let err = evo.run(seed(), 5, &mut []).unwrap_err();
        assert!(matches!(
            err,
            EvolveError::RetentionExceeded { rows: 6, limit: 5 }
        ));
        let mut col = CentralColumn::default();
        evo.stream(seed(), 5, &mut [&mut col]).unwrap();
        assert_eq!(col.bits.len(), 6);
    }

    #[test]
    fn central_column_examples() {
        let b = |v: &[u8]| v.iter().map(|&x| x == 1).collect::<Vec<_>>();
        let lc = WindowPolicy::LightCone;
        assert_eq!(
            central_column(RULE_30, lc, 5).unwrap(),
            b(&[1, 1, 0, 1, 1, 1])
        );
        assert_eq!(central_column(RULE_0, lc, 3).unwrap(), b(&[1, 0, 0, 0]));
        assert_eq!(central_column(RULE_150, lc, 2).unwrap(), b(&[1, 1, 1]));
        assert_eq!(central_column(RULE_30, lc, 0).unwrap(), b(&[1]));
    }

    #[test]
    fn trimmed_column_matches_full_diagram() {
        for n in [1usize, 2, 3, 10, 63, 64, 65, 200, 301] {
            for rule in [RULE_30, RuleTable::new(45), RuleTable::new(110), RULE_150] {
                let d = evolve(seed(), rule, WindowPolicy::LightCone, n, &mut []).unwrap();
                assert_eq!(
                    central_column(rule, WindowPolicy::LightCone, n).unwrap(),
                    d.column(0),
                    "rule {rule} n {n}"
                );
            }
        }
    }

    #[test]
    fn fixed_width_column_uses_seed_index() {
        let p = WindowPolicy::FixedWidth(64);
        let d = evolve(single_seed(p).unwrap(), RULE_30, p, 40, &mut []).unwrap();
        assert_eq!(central_column(RULE_30, p, 40).unwrap(), d.column(0));
    }
}
