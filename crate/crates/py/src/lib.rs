//! Python bindings: games, solvers, dynamics, and meta-game reports.
//!
//! Structured reports come back as JSON strings (parse with `json.loads`);
//! scalar results map to native Python types.

use metagames as mg;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(err)
}

fn parse_player(name: &str) -> PyResult<mg::Player> {
    match name {
        "row" => Ok(mg::Player::Row),
        "col" | "column" => Ok(mg::Player::Col),
        other => Err(PyValueError::new_err(format!("unknown player {other:?}"))),
    }
}

fn parse_cells(names: Vec<String>) -> PyResult<Vec<mg::Cell>> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "A" => Ok(mg::Cell::A),
            "B" => Ok(mg::Cell::B),
            "C" => Ok(mg::Cell::C),
            "D" => Ok(mg::Cell::D),
            other => Err(PyValueError::new_err(format!("unknown cell {other:?}"))),
        })
        .collect()
}

fn dist(cells: Vec<Vec<f64>>) -> PyResult<mg::JointDistribution> {
    mg::JointDistribution::new(cells).map_err(err)
}

/// A finite two-player game.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Game {
    inner: mg::BimatrixGame,
}

#[pymethods]
impl Game {
    #[new]
    fn new(u1: Vec<Vec<f64>>, u2: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Game {
            inner: mg::BimatrixGame::new(u1, u2).map_err(err)?,
        })
    }

    #[staticmethod]
    fn g_oi(c: f64, d: f64) -> Self {
        Game {
            inner: mg::g_oi(c, d),
        }
    }

    #[staticmethod]
    fn g_ds(c: f64, d: f64) -> Self {
        Game {
            inner: mg::g_ds(c, d),
        }
    }

    #[staticmethod]
    fn matching_pennies() -> Self {
        Game {
            inner: mg::matching_pennies(),
        }
    }

    #[staticmethod]
    fn battle_of_sexes() -> Self {
        Game {
            inner: mg::battle_of_sexes(),
        }
    }

    #[staticmethod]
    fn prisoners_dilemma() -> Self {
        Game {
            inner: mg::prisoners_dilemma(),
        }
    }

    /// (p, q) of the fully mixed equilibrium, or None when absent.
    fn mixed_ne(&self) -> PyResult<Option<(f64, f64)>> {
        Ok(mg::mixed_ne_2x2(&self.inner)
            .map_err(err)?
            .map(|m| (m.p(), m.q())))
    }

    fn pure_ne(&self) -> Vec<(usize, usize)> {
        mg::pure_ne(&self.inner)
    }

    fn is_dominance_solvable(&self) -> bool {
        mg::is_dominance_solvable(&self.inner)
    }

    /// Elimination trace as JSON.
    fn iterated_elimination(&self) -> PyResult<String> {
        to_json(&mg::iterated_elimination(&self.inner, Default::default()))
    }

    /// (leader action, follower reply, leader value).
    fn stackelberg(&self, leader: &str) -> PyResult<(usize, usize, f64)> {
        let out = mg::stackelberg(&self.inner, parse_player(leader)?);
        Ok((out.leader_action, out.follower_reply, out.leader_value))
    }

    fn cce_violation(&self, cells: Vec<Vec<f64>>) -> PyResult<f64> {
        mg::cce_violation(&self.inner, &dist(cells)?).map_err(err)
    }

    fn expected_utilities(&self, p: f64, q: f64) -> PyResult<(f64, f64)> {
        let profile = mg::MixedProfile::from_pq(p, q).map_err(err)?;
        mg::expected_utilities_2x2(&self.inner, &profile).map_err(err)
    }

    fn joint_expected_utilities(&self, cells: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
        mg::joint_expected_utilities(&self.inner, &dist(cells)?).map_err(err)
    }

    fn payoffs(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let g = &self.inner;
        let u = |pick: &dyn Fn(usize, usize) -> f64| {
            (0..g.rows())
                .map(|i| (0..g.cols()).map(|j| pick(i, j)).collect())
                .collect()
        };
        (u(&|i, j| g.u1(i, j)), u(&|i, j| g.u2(i, j)))
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Game({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// A 2x2 game family with per-player free payoff cells.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Family {
    inner: mg::ParamGame2x2,
}

#[pymethods]
impl Family {
    #[new]
    fn new(game: &Game, free_row: Vec<String>, free_col: Vec<String>) -> PyResult<Self> {
        let fam = mg::ParamGame2x2::new(
            game.inner.clone(),
            parse_cells(free_row)?,
            parse_cells(free_col)?,
        )
        .map_err(err)?;
        Ok(Family { inner: fam })
    }

    #[staticmethod]
    fn g_oi_family() -> Self {
        Family {
            inner: mg::g_oi_family(),
        }
    }

    #[staticmethod]
    fn g_ds_family() -> Self {
        Family {
            inner: mg::g_ds_family(),
        }
    }

    #[staticmethod]
    fn g_ds_row_wide_family() -> Self {
        Family {
            inner: mg::g_ds_row_wide_family(),
        }
    }

    fn truth(&self, player: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.truth(parse_player(player)?).0)
    }

    fn instantiate(&self, row: Vec<f64>, col: Vec<f64>) -> PyResult<Game> {
        let profile = mg::DeclarationProfile {
            row: mg::Declaration(row),
            col: mg::Declaration(col),
        };
        Ok(Game {
            inner: self.inner.instantiate(&profile).map_err(err)?,
        })
    }

    /// Natural-parameter-space check as JSON.
    fn natural_space_check(&self) -> PyResult<String> {
        to_json(&mg::validate_natural_space(&self.inner).map_err(err)?)
    }

    /// Closed-form meta-equilibrium report (opposing-interests base), JSON.
    fn oi_meta_equilibrium(&self) -> PyResult<String> {
        to_json(&mg::oi_meta_equilibrium(&self.inner).map_err(err)?)
    }

    /// Declaration making `target` dominant for `player`, as JSON.
    fn construct_dominant_declaration(
        &self,
        player: &str,
        target: usize,
        margin: f64,
    ) -> PyResult<String> {
        let out =
            mg::construct_dominant_declaration(&self.inner, parse_player(player)?, target, margin)
                .map_err(err)?;
        to_json(&out)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }
}

/// Run repeated-play dynamics; agents are JSON specs like
/// `{"algo":"mw","eta":0.01}`. Returns a JSON summary with the final
/// empirical distribution, regrets, and average payoffs.
#[pyfunction]
fn run_dynamics(
    game: &Game,
    agent_row: &str,
    agent_col: &str,
    horizon: u64,
    seed: u64,
) -> PyResult<String> {
    let specs: [mg::AgentSpec; 2] = [
        serde_json::from_str(agent_row).map_err(err)?,
        serde_json::from_str(agent_col).map_err(err)?,
    ];
    let mut cfg = mg::DynamicsConfig::new(horizon, seed);
    cfg.keep_action_log = Some(false);
    let trace = mg::run_dynamics(&game.inner, &specs, &cfg).map_err(err)?;
    let summary = serde_json::json!({
        "seed": trace.seed,
        "horizon": trace.horizon,
        "final_distribution": trace.final_distribution(),
        "regrets": trace.final_regrets(),
        "regret_per_round": trace.regret_per_round(),
        "cum_payoffs": trace.cum_payoffs.last(),
    });
    Ok(summary.to_string())
}

/// Nash equilibrium of the Cournot game at unit costs (x1, x2), as JSON.
#[pyfunction]
fn cournot_ne(a: f64, b: f64, x1: f64, x2: f64) -> PyResult<String> {
    let scn = mg::CournotScenario::new(a, b, x1.max(0.0), x2.max(0.0)).map_err(err)?;
    to_json(&mg::cournot_ne(&scn, (x1, x2)))
}

/// True-cost utilities when agents play the declared-cost equilibrium.
#[pyfunction]
fn cournot_utilities_at(
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    x1: f64,
    x2: f64,
) -> PyResult<(f64, f64)> {
    let scn = mg::CournotScenario::new(a, b, c1, c2).map_err(err)?;
    Ok(mg::cournot_utilities_at(&scn, (c1, c2), (x1, x2)))
}

/// Closed-form meta-equilibrium of the Cournot declaration game, as JSON.
#[pyfunction]
fn cournot_meta_equilibrium(a: f64, b: f64, c1: f64, c2: f64) -> PyResult<String> {
    let scn = mg::CournotScenario::new(a, b, c1, c2).map_err(err)?;
    let meta = mg::MetaGameScenario::cournot(scn);
    to_json(&mg::cournot_meta_equilibrium(&meta).map_err(err)?)
}

/// Manipulation-freeness of the Cournot declaration game, as JSON.
#[pyfunction]
fn cournot_manipulation_free(a: f64, b: f64, c1: f64, c2: f64) -> PyResult<String> {
    let scn = mg::CournotScenario::new(a, b, c1, c2).map_err(err)?;
    let meta = mg::MetaGameScenario::cournot(scn);
    to_json(&mg::manipulation_free(&meta, 1e-9).map_err(err)?)
}

/// Time-average quantities of quantity-game dynamics (agents "ogd" or "mw").
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn run_cournot_dynamics(
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
    x1: f64,
    x2: f64,
    agent_json: &str,
    horizon: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let scn = mg::CournotScenario::new(a, b, c1, c2).map_err(err)?;
    let spec: mg::AgentSpec = serde_json::from_str(agent_json).map_err(err)?;
    let cfg = mg::CournotDynamicsConfig::new(horizon, seed);
    let trace =
        mg::run_cournot_dynamics(&scn, (x1, x2), &[spec.clone(), spec], &cfg).map_err(err)?;
    let [q1, q2] = trace.final_avg_quantities();
    Ok((q1, q2))
}

#[pymodule]
fn metagames_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_class::<Family>()?;
    m.add_function(wrap_pyfunction!(run_dynamics, m)?)?;
    m.add_function(wrap_pyfunction!(cournot_ne, m)?)?;
    m.add_function(wrap_pyfunction!(cournot_utilities_at, m)?)?;
    m.add_function(wrap_pyfunction!(cournot_meta_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(cournot_manipulation_free, m)?)?;
    m.add_function(wrap_pyfunction!(run_cournot_dynamics, m)?)?;
    Ok(())
}
