//! Named verification suites, replayable instances, and the report builders
//! behind the command-line tool.

mod output;
mod suites;

pub use output::{to_csv, to_json, CSV_HEADER};
pub use suites::{
    check_instance, corpus, metrics_report, reduce_report, run_suite, tr3_exhaustive, ReduceOutput, Suite,
    SuiteConfig, SuiteReport,
};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arrowlab::{gswf_from_scf, neutral_tensor, BooleanFn, GswfIia};
use crate::error::{Error, Result};
use crate::prefcore::{pair_count, Voter};
use crate::scfzoo::{split_call, zoo_make, RuleSpec, ScfRule, ScfTable};

/// A Boolean table given by name or explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum BoolSpec {
    Majority { n: usize },
    Parity { n: usize },
    Dictator { n: usize, voter: Voter },
    RandomOdd { n: usize, seed: u64 },
    /// Inputs mapped to 1.
    Table { n: usize, ones: Vec<u64> },
}

impl BoolSpec {
    pub fn build(&self) -> Result<BooleanFn> {
        match self {
            BoolSpec::Majority { n } => BooleanFn::majority(*n),
            BoolSpec::Parity { n } => BooleanFn::parity(*n),
            BoolSpec::Dictator { n, voter } => BooleanFn::dictator(*n, *voter),
            BoolSpec::RandomOdd { n, seed } => BooleanFn::random_odd(*n, *seed),
            BoolSpec::Table { n, ones } => {
                if ones.iter().any(|&z| z >> *n != 0) {
                    return Err(Error::domain("table input out of range"));
                }
                BooleanFn::from_fn(*n, |z| ones.contains(&z))
            }
        }
    }
}

/// A GSWF given by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum GswfSpec {
    /// Independent random pairwise tables.
    Random { m: usize, n: usize, seed: u64 },
    Neutral { g: BoolSpec, m: usize },
    /// The same table on every pair, odd or not.
    Tensor { g: BoolSpec, m: usize },
    Dictator { m: usize, n: usize, voter: Voter },
    AntiDictator { m: usize, n: usize, voter: Voter },
    /// The reduction of a zoo rule on three alternatives.
    FromScf { rule: RuleSpec, n: usize, tie_voter: Voter },
}

impl GswfSpec {
    pub fn build(&self) -> Result<GswfIia> {
        match self {
            GswfSpec::Random { m, n, seed } => GswfIia::random(*m, *n, *seed),
            GswfSpec::Neutral { g, m } => Ok(neutral_tensor(&g.build()?, *m)?.to_gswf()),
            GswfSpec::Tensor { g, m } => {
                let g = g.build()?;
                GswfIia::new(*m, g.n(), vec![g; pair_count(*m)])
            }
            GswfSpec::Dictator { m, n, voter } => GswfIia::dictator(*m, *n, *voter),
            GswfSpec::AntiDictator { m, n, voter } => GswfIia::anti_dictator(*m, *n, *voter),
            GswfSpec::FromScf { rule, n, tie_voter } => {
                gswf_from_scf(&zoo_make(rule, *n, 3)?, *tie_voter)
            }
        }
    }

    /// Parse a command-line name: `majority`, `parity`, `dictator(i)`,
    /// `anti_dictator(i)`, `random(seed)`, `random_odd(seed)`, or
    /// `scf:<rule>` for the reduction of a zoo rule.
    pub fn parse(s: &str, m: usize, n: usize) -> Result<GswfSpec> {
        if let Some(rule) = s.trim().strip_prefix("scf:") {
            return Ok(GswfSpec::FromScf { rule: rule.parse()?, n, tie_voter: 0 });
        }
        let (name, arg) = split_call(s);
        let num = || -> Result<u64> {
            arg.as_deref()
                .ok_or_else(|| Error::domain(format!("`{name}` needs an argument")))?
                .parse()
                .map_err(|_| Error::domain(format!("`{s}`: bad argument")))
        };
        Ok(match name.replace('-', "_").as_str() {
            "majority" => GswfSpec::Neutral { g: BoolSpec::Majority { n }, m },
            "parity" => GswfSpec::Neutral { g: BoolSpec::Parity { n }, m },
            "random_odd" => GswfSpec::Neutral { g: BoolSpec::RandomOdd { n, seed: num()? }, m },
            "dictator" => GswfSpec::Dictator { m, n, voter: num()? as usize },
            "anti_dictator" => GswfSpec::AntiDictator { m, n, voter: num()? as usize },
            "random" => GswfSpec::Random { m, n, seed: num()? },
            _ => return Err(Error::Unknown(s.to_string())),
        })
    }
}

/// One input of a suite. A failing instance serializes to JSON and can be
/// re-run with [`check_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Instance {
    Scf { rule: RuleSpec, n: usize, m: usize },
    TernaryPair { n: usize, a: Vec<u64>, b: Vec<u64> },
    TernarySet { n: usize, members: Vec<u64> },
    Odd { g: BoolSpec, samples: u64, seed: u64 },
    Gswf { g: GswfSpec },
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(format!("bad instance: {e}")))
    }
}

/// An SCF named on the command line: a file in the SCF3 format, or a zoo
/// rule.
pub fn load_scf(source: &str, n: usize, m: usize) -> Result<ScfRule> {
    let path = Path::new(source);
    if path.is_file() {
        let table = ScfTable::read(path)?;
        return Ok(ScfRule::from_table(table, source));
    }
    zoo_make(&source.parse()?, n, m)
}

/// A GSWF named on the command line: a file in the GSWF format, or a name
/// accepted by [`GswfSpec::parse`].
pub fn load_gswf(source: &str, m: usize, n: usize) -> Result<GswfIia> {
    let path = Path::new(source);
    if path.is_file() {
        return GswfIia::read(path);
    }
    GswfSpec::parse(source, m, n)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let cases = [
            Instance::Scf { rule: RuleSpec::RandomTable(3), n: 2, m: 3 },
            Instance::TernaryPair { n: 2, a: vec![0, 4], b: vec![8] },
            Instance::Odd { g: BoolSpec::Majority { n: 3 }, samples: 10, seed: 1 },
            Instance::Gswf { g: GswfSpec::Neutral { g: BoolSpec::RandomOdd { n: 3, seed: 2 }, m: 6 } },
        ];
        for c in cases {
            assert_eq!(c.to_string().parse::<Instance>().unwrap(), c);
        }
        assert!("{\"kind\":\"nope\"}".parse::<Instance>().is_err());
    }

    #[test]
    fn gswf_names() {
        let g = GswfSpec::parse("majority", 3, 3).unwrap().build().unwrap();
        assert!(g.is_neutral());
        assert_eq!(
            GswfSpec::parse("dictator(1)", 4, 2).unwrap().build().unwrap(),
            GswfIia::dictator(4, 2, 1).unwrap()
        );
        assert!(GswfSpec::parse("majority", 3, 2).unwrap().build().is_err());
        assert!(GswfSpec::parse("what", 3, 2).is_err());
        let r = GswfSpec::parse("scf:plurality", 3, 3).unwrap();
        assert!(matches!(r, GswfSpec::FromScf { rule: RuleSpec::Plurality, .. }));
    }

    #[test]
    fn explicit_tables() {
        let t = BoolSpec::Table { n: 2, ones: vec![1, 3] }.build().unwrap();
        assert_eq!(t, BooleanFn::dictator(2, 0).unwrap());
        assert!(BoolSpec::Table { n: 2, ones: vec![4] }.build().is_err());
    }
}
