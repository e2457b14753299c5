//! Scenario file formats consumed by the CLI.

use anyhow::{bail, Context, Result};
use metagames::{
    AgentSpec, BimatrixGame, CournotScenario, GameFamily, Grids, JointDistribution,
    MetaGameScenario, MetaProfile, UtilityMode,
};
use serde::Deserialize;

/// A game by constructor name (with optional parameters) or inline payoffs.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GameRef {
    Named {
        name: String,
        #[serde(default)]
        c: Option<f64>,
        #[serde(default)]
        d: Option<f64>,
    },
    Inline(BimatrixGame),
}

impl GameRef {
    pub fn resolve(&self) -> Result<BimatrixGame> {
        match self {
            GameRef::Inline(g) => Ok(g.clone()),
            GameRef::Named { name, c, d } => match name.as_str() {
                "g_oi" => Ok(metagames::g_oi(c.unwrap_or(2.0), d.unwrap_or(3.0))),
                "g_ds" => Ok(metagames::g_ds(c.unwrap_or(1.0), d.unwrap_or(3.0))),
                "matching_pennies" => Ok(metagames::matching_pennies()),
                "battle_of_sexes" => Ok(metagames::battle_of_sexes()),
                "prisoners_dilemma" => Ok(metagames::prisoners_dilemma()),
                other => bail!("unknown game name {other:?}"),
            },
        }
    }
}

/// Reference distribution for error metrics and cell checks.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSpec {
    /// The string "declared_ne": the unique limit of the simulated game.
    Named(String),
    Cells {
        cells: Vec<Vec<f64>>,
    },
}

impl ReferenceSpec {
    pub fn resolve(&self, game: &BimatrixGame) -> Result<JointDistribution> {
        match self {
            ReferenceSpec::Named(name) if name == "declared_ne" => {
                Ok(metagames::limit_distribution(game)?)
            }
            ReferenceSpec::Named(other) => bail!("unknown reference {other:?}"),
            ReferenceSpec::Cells { cells } => Ok(JointDistribution::new(cells.clone())?),
        }
    }
}

fn default_cell_tol() -> f64 {
    0.02
}

fn default_regret_rate() -> f64 {
    0.05
}

fn default_pass_fraction() -> f64 {
    0.9
}

/// Checks evaluated under `--check` for simulate runs.
#[derive(Debug, Clone, Deserialize)]
pub struct SimChecks {
    #[serde(default = "default_cell_tol")]
    pub cell_tol: f64,
    #[serde(default = "default_regret_rate")]
    pub regret_per_round: f64,
    #[serde(default = "default_pass_fraction")]
    pub min_pass_fraction: f64,
}

impl Default for SimChecks {
    fn default() -> Self {
        SimChecks {
            cell_tol: default_cell_tol(),
            regret_per_round: default_regret_rate(),
            min_pass_fraction: default_pass_fraction(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct CournotSim {
    pub a: f64,
    pub b: f64,
    pub costs: [f64; 2],
    #[serde(default)]
    pub declared: Option<[f64; 2]>,
    /// Relative tolerance on time-average quantities vs the declared-game
    /// equilibrium, used under `--check`.
    #[serde(default)]
    pub quantity_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SimulateScenario {
    #[serde(default)]
    pub game: Option<GameRef>,
    #[serde(default)]
    pub cournot: Option<CournotSim>,
    pub agents: [AgentSpec; 2],
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub checks: Option<SimChecks>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EquilibriumScenario {
    #[serde(default)]
    pub game: Option<GameRef>,
    #[serde(default)]
    pub cournot: Option<CournotScenario>,
    /// Costs to solve the Cournot game at (defaults to the true costs).
    #[serde(default)]
    pub costs: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MetagameScenarioFile {
    pub family: GameFamily,
    #[serde(default)]
    pub grids: Option<Grids>,
    #[serde(default)]
    pub mode: Option<UtilityMode>,
    /// Optional declaration profile to certify.
    #[serde(default)]
    pub profile: Option<MetaProfile>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

impl MetagameScenarioFile {
    pub fn build(&self) -> Result<MetaGameScenario> {
        let grids = match (&self.grids, &self.family) {
            (Some(g), _) => g.clone(),
            (None, GameFamily::Cournot(c)) => {
                let g = metagames::GridSpec::new(0.0, c.a);
                Grids {
                    row: vec![g],
                    col: vec![g],
                }
            }
            (None, GameFamily::Matrix(_)) => {
                bail!("matrix meta-game scenarios need explicit grids")
            }
        };
        let scn = MetaGameScenario {
            family: self.family.clone(),
            grids,
            mode: self.mode.clone().unwrap_or(UtilityMode::AnalyticLimit),
        };
        scn.validate().context("invalid meta-game scenario")?;
        Ok(scn)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct OscillateScenario {
    pub game: GameRef,
    pub dist1: JointDistribution,
    pub dist2: JointDistribution,
    pub alpha: u64,
    pub phases: u32,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_mape_coeff() -> f64 {
    4.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScalingScenario {
    pub game: GameRef,
    pub agents: [AgentSpec; 2],
    pub horizons: Vec<u64>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default = "default_mape_coeff")]
    pub max_mape_coeff: f64,
    #[serde(default = "default_true")]
    pub require_monotone: bool,
}

/// Top-level scenario file, dispatched on `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Simulate(SimulateScenario),
    Equilibrium(EquilibriumScenario),
    Metagame(MetagameScenarioFile),
    Oscillate(OscillateScenario),
    Scaling(ScalingScenario),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Simulate(_) => "simulate",
            Scenario::Equilibrium(_) => "equilibrium",
            Scenario::Metagame(_) => "metagame",
            Scenario::Oscillate(_) => "oscillate",
            Scenario::Scaling(_) => "scaling",
        }
    }
}

/// Parse `a..b` (inclusive) or a single integer into a seed list.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().context("bad seed range start")?;
        let hi: u64 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .context("bad seed range end")?;
        if hi < lo {
            bail!("empty seed range {spec:?}");
        }
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![spec.parse().context("bad seed")?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("5").unwrap(), vec![5]);
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("3..=4").unwrap(), vec![3, 4]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn named_games_resolve() {
        let g: GameRef = serde_json::from_str(r#"{"name":"g_oi"}"#).unwrap();
        assert_eq!(g.resolve().unwrap(), metagames::g_oi_true());
        let g: GameRef = serde_json::from_str(r#"{"name":"g_oi","c":1.0}"#).unwrap();
        assert_eq!(g.resolve().unwrap(), metagames::g_oi(1.0, 3.0));
        let g: GameRef = serde_json::from_str(
            r#"{"rows":2,"cols":2,"u1":[[1,-1],[-1,1]],"u2":[[-1,1],[1,-1]]}"#,
        )
        .unwrap();
        assert_eq!(g.resolve().unwrap(), metagames::matching_pennies());
    }

    #[test]
    fn scenario_kind_dispatch() {
        let s: Scenario = serde_json::from_str(
            r#"{"kind":"simulate","game":{"name":"g_oi"},
                "agents":[{"algo":"mw","eta":0.01},{"algo":"mw","eta":0.01}],
                "horizon":1000}"#,
        )
        .unwrap();
        assert_eq!(s.kind(), "simulate");
        let s: Scenario = serde_json::from_str(
            r#"{"kind":"metagame","family":{"cournot":{"a":1.0,"b":1.0,"c1":0.5,"c2":0.5}}}"#,
        )
        .unwrap();
        let Scenario::Metagame(m) = &s else { panic!() };
        m.build().unwrap();
    }
}
