use std::fmt;
use std::str::FromStr;

use rule30_lab::{RatioScope, RuleTable, WindowPolicy};

/// Parameter sets for the standard figure and table runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Table2,
}

pub const ALL: [Preset; 9] = [
    Preset::Fig1,
    Preset::Fig3,
    Preset::Fig4,
    Preset::Fig5,
    Preset::Fig6,
    Preset::Fig7,
    Preset::Fig8,
    Preset::Fig9,
    Preset::Table2,
];

/// Iteration counts of the steady-state table.
pub const TABLE2_ITERATIONS: [usize; 5] = [1024, 2048, 4096, 8192, 16384];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub rule: RuleTable,
    pub steps: usize,
    pub policy: WindowPolicy,
    pub scope: RatioScope,
}

impl Preset {
    pub fn params(self) -> Params {
        let figure = |rule: u8, steps| Params {
            rule: RuleTable::new(rule),
            steps,
            policy: WindowPolicy::LightCone,
            scope: RatioScope::CentralColumn,
        };
        let metrics = Params {
            rule: RuleTable::new(30),
            steps: 1024,
            policy: WindowPolicy::FixedWidth(2048),
            scope: RatioScope::CentralColumn,
        };
        match self {
            Preset::Fig1 => figure(150, 1024),
            Preset::Fig3 => figure(30, 256),
            Preset::Fig4 => figure(30, 1024),
            Preset::Fig5 => figure(86, 256),
            // 30 AND 150 as truth tables.
            Preset::Fig6 => figure(22, 256),
            Preset::Fig7 | Preset::Fig8 | Preset::Fig9 | Preset::Table2 => metrics,
        }
    }

    pub fn is_image(self) -> bool {
        matches!(
            self,
            Preset::Fig1 | Preset::Fig3 | Preset::Fig4 | Preset::Fig5 | Preset::Fig6
        )
    }

    pub fn has_metrics(self) -> bool {
        !self.is_image() || self == Preset::Fig3
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig1 => "fig1",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Table2 => "table2",
        })
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL.iter()
            .copied()
            .find(|p| p.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                let names: Vec<String> = ALL.iter().map(Preset::to_string).collect();
                format!("unknown preset {s:?}, expected one of {}", names.join(", "))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in ALL {
            assert_eq!(p.to_string().parse::<Preset>(), Ok(p));
        }
        assert!("fig2".parse::<Preset>().is_err());
    }

    #[test]
    fn figure_parameters() {
        assert_eq!(Preset::Fig1.params().rule.number(), 150);
        assert_eq!(Preset::Fig5.params().rule.number(), 86);
        assert_eq!(Preset::Fig6.params().rule.number(), 22);
        let m = Preset::Fig9.params();
        assert_eq!((m.steps, m.policy), (1024, WindowPolicy::FixedWidth(2048)));
    }
}
