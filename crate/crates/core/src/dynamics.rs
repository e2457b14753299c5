//! Repeated-play engine over a fixed horizon with trace recording:
//! empirical-distribution snapshots, cumulative payoffs, external regrets,
//! and the convergence checks evaluated on traces.

use serde::{Deserialize, Serialize};

use crate::agents::{AgentRuntime, AgentSpec};
use crate::cournot::CournotScenario;
use crate::equilibrium::cce_violation;
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, JointDistribution, Player};

/// Action logs are kept by default only up to this horizon.
pub const ACTION_LOG_LIMIT: u64 = 1_000_000;

/// Checkpoint times: geometrically spaced points for log-scale coverage plus
/// linearly spaced points so the tail `(eps*T, T]` stays densely sampled,
/// plus the final round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointGrid {
    pub geometric: usize,
    pub linear: usize,
    #[serde(default)]
    pub extra: Vec<u64>,
}

impl Default for CheckpointGrid {
    fn default() -> Self {
        CheckpointGrid {
            geometric: 200,
            linear: 100,
            extra: Vec::new(),
        }
    }
}

impl CheckpointGrid {
    pub fn times(&self, horizon: u64) -> Vec<u64> {
        let mut ts = Vec::with_capacity(self.geometric + self.linear + self.extra.len() + 1);
        let t = horizon as f64;
        for j in 1..=self.geometric {
            let x = t.powf(j as f64 / self.geometric as f64).ceil() as u64;
            ts.push(x.clamp(1, horizon));
        }
        for j in 1..=self.linear {
            let x = (t * j as f64 / self.linear as f64).ceil() as u64;
            ts.push(x.clamp(1, horizon));
        }
        ts.extend(
            self.extra
                .iter()
                .copied()
                .filter(|&x| x >= 1 && x <= horizon),
        );
        ts.push(horizon);
        ts.sort_unstable();
        ts.dedup();
        ts
    }
}

/// Run configuration for a finite-game dynamics run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub horizon: u64,
    pub seed: u64,
    #[serde(default)]
    pub checkpoints: CheckpointGrid,
    /// Overrides the default keep-if-`T <= 1e6` rule.
    #[serde(default)]
    pub keep_action_log: Option<bool>,
}

impl DynamicsConfig {
    pub fn new(horizon: u64, seed: u64) -> Self {
        DynamicsConfig {
            horizon,
            seed,
            checkpoints: CheckpointGrid::default(),
            keep_action_log: None,
        }
    }
}

/// Full record of a repeated-play run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub seed: u64,
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    /// Empirical distribution `p_t^T` at each checkpoint.
    pub distributions: Vec<JointDistribution>,
    /// Cumulative raw payoff per player at each checkpoint.
    pub cum_payoffs: Vec<[f64; 2]>,
    /// External regret per player at each checkpoint, raw payoff units.
    pub regrets: Vec<[f64; 2]>,
    /// Per-player instantaneous mixed strategy at each checkpoint, for
    /// agents that expose one.
    pub strategies: Vec<[Option<Vec<f64>>; 2]>,
    /// Final action-profile counts.
    pub final_counts: Vec<Vec<u64>>,
    /// Joint action log, kept when the horizon is small or on request.
    pub action_log: Option<Vec<(u16, u16)>>,
}

impl DynamicsTrace {
    pub fn final_distribution(&self) -> &JointDistribution {
        self.distributions
            .last()
            .expect("trace has at least the final checkpoint")
    }

    pub fn final_regrets(&self) -> [f64; 2] {
        *self.regrets.last().expect("non-empty trace")
    }

    /// Per-round regret of each player at the end of the run.
    pub fn regret_per_round(&self) -> [f64; 2] {
        let [r1, r2] = self.final_regrets();
        [r1 / self.horizon as f64, r2 / self.horizon as f64]
    }
}

fn agent_seed(run_seed: u64, player: Player) -> u64 {
    run_seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(player.index() as u64 + 1))
}

/// Play `game` for `config.horizon` synchronous rounds: both agents act
/// simultaneously, then both observe the joint profile. The trace is fully
/// determined by `(game, specs, horizon, seed)`.
pub fn run_dynamics(
    game: &BimatrixGame,
    specs: &[AgentSpec; 2],
    config: &DynamicsConfig,
) -> Result<DynamicsTrace> {
    if config.horizon < 1 {
        return Err(Error::InvalidAgentSpec("horizon must be at least 1".into()));
    }
    if game.rows() > u16::MAX as usize || game.cols() > u16::MAX as usize {
        return Err(Error::AgentGameMismatch(
            "action space too large for the trace log".into(),
        ));
    }
    let horizon = config.horizon;
    let mut row = AgentRuntime::new(
        &specs[0],
        Player::Row,
        game.rows(),
        game.payoff_range(Player::Row),
        horizon,
        agent_seed(config.seed, Player::Row),
    )?;
    let mut col = AgentRuntime::new(
        &specs[1],
        Player::Col,
        game.cols(),
        game.payoff_range(Player::Col),
        horizon,
        agent_seed(config.seed, Player::Col),
    )?;

    let keep_log = config
        .keep_action_log
        .unwrap_or(horizon <= ACTION_LOG_LIMIT);
    let mut action_log = keep_log.then(|| Vec::with_capacity(horizon as usize));

    let checkpoint_times = config.checkpoints.times(horizon);
    let mut counts = vec![vec![0u64; game.cols()]; game.rows()];
    let mut cum_payoff = [0.0f64; 2];
    let mut cum_cf = [vec![0.0f64; game.rows()], vec![0.0f64; game.cols()]];
    let mut cf_row = vec![0.0f64; game.rows()];
    let mut cf_col = vec![0.0f64; game.cols()];

    let mut distributions = Vec::with_capacity(checkpoint_times.len());
    let mut cum_payoffs = Vec::with_capacity(checkpoint_times.len());
    let mut regrets = Vec::with_capacity(checkpoint_times.len());
    let mut strategies = Vec::with_capacity(checkpoint_times.len());
    let mut next_checkpoint = 0usize;

    for t in 1..=horizon {
        let i = row.act();
        let j = col.act();
        counts[i][j] += 1;
        if let Some(log) = action_log.as_mut() {
            log.push((i as u16, j as u16));
        }
        for (a, c) in cf_row.iter_mut().enumerate() {
            *c = game.u1(a, j);
        }
        for (a, c) in cf_col.iter_mut().enumerate() {
            *c = game.u2(i, a);
        }
        cum_payoff[0] += cf_row[i];
        cum_payoff[1] += cf_col[j];
        for (acc, &c) in cum_cf[0].iter_mut().zip(&cf_row) {
            *acc += c;
        }
        for (acc, &c) in cum_cf[1].iter_mut().zip(&cf_col) {
            *acc += c;
        }
        row.observe(i, j, &cf_row);
        col.observe(j, i, &cf_col);

        if next_checkpoint < checkpoint_times.len() && t == checkpoint_times[next_checkpoint] {
            next_checkpoint += 1;
            distributions.push(JointDistribution::from_counts(&counts)?);
            cum_payoffs.push(cum_payoff);
            let r1 = cum_cf[0].iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c)) - cum_payoff[0];
            let r2 = cum_cf[1].iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c)) - cum_payoff[1];
            regrets.push([r1, r2]);
            strategies.push([row.strategy(), col.strategy()]);
        }
    }

    Ok(DynamicsTrace {
        seed: config.seed,
        horizon,
        checkpoints: checkpoint_times,
        distributions,
        cum_payoffs,
        regrets,
        strategies,
        final_counts: counts,
        action_log,
    })
}

// ---------------------------------------------------------------------------
// Cournot (quantity) dynamics.
// ---------------------------------------------------------------------------

/// Grid resolution for multiplicative weights over quantities; the step is
/// `(a/b)/200`, well below the 5% tolerances used downstream.
pub const COURNOT_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotDynamicsConfig {
    pub horizon: u64,
    pub seed: u64,
    #[serde(default)]
    pub checkpoints: CheckpointGrid,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_grid_points() -> usize {
    COURNOT_GRID_POINTS
}

impl CournotDynamicsConfig {
    pub fn new(horizon: u64, seed: u64) -> Self {
        CournotDynamicsConfig {
            horizon,
            seed,
            checkpoints: CheckpointGrid::default(),
            grid_points: COURNOT_GRID_POINTS,
        }
    }
}

/// Trace of a quantity-game run: time-average quantities and time-average
/// user utilities (priced at true costs) at each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityTrace {
    pub seed: u64,
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub avg_quantities: Vec<[f64; 2]>,
    pub avg_true_utilities: Vec<[f64; 2]>,
}

impl QuantityTrace {
    pub fn final_avg_quantities(&self) -> [f64; 2] {
        *self.avg_quantities.last().expect("non-empty trace")
    }

    pub fn final_avg_true_utilities(&self) -> [f64; 2] {
        *self.avg_true_utilities.last().expect("non-empty trace")
    }
}

// Two agents per run; the size gap between variants is irrelevant.
#[allow(clippy::large_enum_variant)]
enum QuantityAgent {
    Grid {
        runtime: AgentRuntime,
        quantities: Vec<f64>,
        cf: Vec<f64>,
        declared: f64,
        last_idx: usize,
    },
    Ogd {
        point: f64,
        step0: f64,
        declared: f64,
        q_max: f64,
    },
}

impl QuantityAgent {
    fn act(&mut self) -> f64 {
        match self {
            QuantityAgent::Grid {
                runtime,
                quantities,
                last_idx,
                ..
            } => {
                *last_idx = runtime.act();
                quantities[*last_idx]
            }
            QuantityAgent::Ogd { point, .. } => *point,
        }
    }

    fn observe(&mut self, scn: &CournotScenario, t: u64, own_q: f64, opp_q: f64) {
        match self {
            QuantityAgent::Grid {
                runtime,
                quantities,
                cf,
                declared,
                last_idx,
            } => {
                for (&qk, c) in quantities.iter().zip(cf.iter_mut()) {
                    *c = qk * (scn.a - scn.b * (qk + opp_q) - *declared);
                }
                runtime.observe(*last_idx, 0, cf);
            }
            QuantityAgent::Ogd {
                point,
                step0,
                declared,
                q_max,
            } => {
                let grad = scn.a - 2.0 * scn.b * own_q - scn.b * opp_q - *declared;
                let step = *step0 / (t as f64).sqrt();
                *point = (*point + step * grad).clamp(0.0, *q_max);
            }
        }
    }
}

/// Repeated quantity competition at declared costs. Supported agents are
/// online gradient descent on `[0, a/b]` and multiplicative weights on a
/// uniform quantity grid.
pub fn run_cournot_dynamics(
    scn: &CournotScenario,
    declared: (f64, f64),
    specs: &[AgentSpec; 2],
    config: &CournotDynamicsConfig,
) -> Result<QuantityTrace> {
    if config.horizon < 1 {
        return Err(Error::InvalidAgentSpec("horizon must be at least 1".into()));
    }
    if config.grid_points < 2 {
        return Err(Error::InvalidAgentSpec(
            "grid needs at least 2 points".into(),
        ));
    }
    let q_max = scn.a / scn.b;
    let declared = (declared.0.clamp(0.0, scn.a), declared.1.clamp(0.0, scn.a));

    let mut agents: Vec<QuantityAgent> = Vec::with_capacity(2);
    for (idx, spec) in specs.iter().enumerate() {
        let player = if idx == 0 { Player::Row } else { Player::Col };
        let x = if idx == 0 { declared.0 } else { declared.1 };
        let agent = match spec {
            AgentSpec::Ogd { step0 } => QuantityAgent::Ogd {
                point: q_max / 2.0,
                step0: step0.unwrap_or(q_max / 2.0),
                declared: x,
                q_max,
            },
            AgentSpec::Mw { .. } => {
                let n = config.grid_points;
                let quantities: Vec<f64> =
                    (0..n).map(|k| q_max * k as f64 / (n - 1) as f64).collect();
                // Own payoff is linear in the opponent quantity, so extremes
                // over the grid sit at opponent 0 or q_max.
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &q in &quantities {
                    for opp in [0.0, q_max] {
                        let u = q * (scn.a - scn.b * (q + opp) - x);
                        lo = lo.min(u);
                        hi = hi.max(u);
                    }
                }
                QuantityAgent::Grid {
                    runtime: AgentRuntime::new(
                        spec,
                        player,
                        n,
                        (lo, hi),
                        config.horizon,
                        agent_seed(config.seed, player),
                    )?,
                    quantities,
                    cf: vec![0.0; n],
                    declared: x,
                    last_idx: 0,
                }
            }
            other => {
                return Err(Error::AgentGameMismatch(format!(
                    "{other:?} is not a quantity-game agent (use ogd or mw)"
                )));
            }
        };
        agents.push(agent);
    }
    let mut agents: [QuantityAgent; 2] = match agents.try_into() {
        Ok(a) => a,
        Err(_) => unreachable!("two specs"),
    };

    let checkpoint_times = config.checkpoints.times(config.horizon);
    let mut sum_q = [0.0f64; 2];
    let mut sum_u = [0.0f64; 2];
    let mut avg_quantities = Vec::with_capacity(checkpoint_times.len());
    let mut avg_true_utilities = Vec::with_capacity(checkpoint_times.len());
    let mut next_checkpoint = 0usize;

    for t in 1..=config.horizon {
        let q1 = agents[0].act();
        let q2 = agents[1].act();
        sum_q[0] += q1;
        sum_q[1] += q2;
        sum_u[0] += scn.utility(q1, q2, scn.c1);
        sum_u[1] += scn.utility(q2, q1, scn.c2);
        agents[0].observe(scn, t, q1, q2);
        agents[1].observe(scn, t, q2, q1);

        if next_checkpoint < checkpoint_times.len() && t == checkpoint_times[next_checkpoint] {
            next_checkpoint += 1;
            let tf = t as f64;
            avg_quantities.push([sum_q[0] / tf, sum_q[1] / tf]);
            avg_true_utilities.push([sum_u[0] / tf, sum_u[1] / tf]);
        }
    }

    Ok(QuantityTrace {
        seed: config.seed,
        horizon: config.horizon,
        checkpoints: checkpoint_times,
        avg_quantities,
        avg_true_utilities,
    })
}

// ---------------------------------------------------------------------------
// Convergence checks and error metrics.
// ---------------------------------------------------------------------------

/// What a trace is checked against in `check_approach`.
pub enum ApproachTarget<'a> {
    /// A finite set of distributions; distance is the minimum L1 distance.
    Distributions(&'a [JointDistribution]),
    /// The CCE polytope of a game, via the violation functional.
    CcePolytope(&'a BimatrixGame),
}

/// True when the final empirical distribution is within `eps` of the target
/// set (L1 for finite sets, violation value for the CCE polytope).
pub fn check_approach(
    trace: &DynamicsTrace,
    target: &ApproachTarget<'_>,
    eps: f64,
) -> Result<bool> {
    let fin = trace.final_distribution();
    match target {
        ApproachTarget::Distributions(set) => {
            if set.is_empty() {
                return Err(Error::InvalidDistribution("empty target set".into()));
            }
            let mut best = f64::INFINITY;
            for d in set.iter() {
                best = best.min(fin.l1_distance(d)?);
            }
            Ok(best < eps)
        }
        ApproachTarget::CcePolytope(game) => Ok(cce_violation(game, fin)? <= eps),
    }
}

/// Minimum number of checkpoints in `(eps*T, T]` for a meaningful
/// self-convergence verdict.
pub const SELF_CONVERGENCE_MIN_CHECKPOINTS: usize = 50;

/// True when `|p_t^T - p_T^T| < eps` (L1) for every checkpoint `t` in
/// `(eps*T, T]`. Errors when the trace has too few checkpoints there.
pub fn check_self_convergent(trace: &DynamicsTrace, eps: f64) -> Result<bool> {
    let horizon = trace.horizon as f64;
    let fin = trace.final_distribution();
    let in_window: Vec<usize> = trace
        .checkpoints
        .iter()
        .enumerate()
        .filter(|(_, &t)| (t as f64) > eps * horizon)
        .map(|(k, _)| k)
        .collect();
    if in_window.len() < SELF_CONVERGENCE_MIN_CHECKPOINTS {
        return Err(Error::InsufficientCheckpoints(format!(
            "{} checkpoints past eps*T, need {}",
            in_window.len(),
            SELF_CONVERGENCE_MIN_CHECKPOINTS
        )));
    }
    for k in in_window {
        if trace.distributions[k].l1_distance(fin)? >= eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mean absolute percentage error between distributions, cellwise:
/// `mean(|emp - ref| / ref)`. Every reference cell must be positive.
pub fn mape(empirical: &JointDistribution, reference: &JointDistribution) -> Result<f64> {
    if empirical.rows() != reference.rows() || empirical.cols() != reference.cols() {
        return Err(Error::DimensionMismatch(
            "distributions of different shape".into(),
        ));
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for i in 0..reference.rows() {
        for j in 0..reference.cols() {
            let r = reference.cell(i, j);
            if r <= 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "reference cell ({i},{j}) is not positive"
                )));
            }
            total += (empirical.cell(i, j) - r).abs() / r;
            n += 1;
        }
    }
    Ok(total / n as f64)
}

// ---------------------------------------------------------------------------
// Exports.
// ---------------------------------------------------------------------------

/// CSV with columns `t, cell_00.., cell_mn, regret_1, regret_2, payoff_1,
/// payoff_2`, one line per checkpoint. Floats print in shortest round-trip
/// form, so re-parsing recovers the in-memory values exactly.
pub fn trace_to_csv(trace: &DynamicsTrace) -> String {
    let rows = trace.final_counts.len();
    let cols = trace.final_counts[0].len();
    let mut out = String::new();
    out.push('t');
    for i in 0..rows {
        for j in 0..cols {
            out.push_str(&format!(",cell_{i}{j}"));
        }
    }
    out.push_str(",regret_1,regret_2,payoff_1,payoff_2\n");
    for (k, &t) in trace.checkpoints.iter().enumerate() {
        out.push_str(&t.to_string());
        for i in 0..rows {
            for j in 0..cols {
                out.push_str(&format!(",{}", trace.distributions[k].cell(i, j)));
            }
        }
        let [r1, r2] = trace.regrets[k];
        let [u1, u2] = trace.cum_payoffs[k];
        out.push_str(&format!(",{r1},{r2},{u1},{u2}\n"));
    }
    out
}

/// CSV for quantity traces: `t, qbar_1, qbar_2, ubar_1, ubar_2`.
pub fn quantity_trace_to_csv(trace: &QuantityTrace) -> String {
    let mut out = String::from("t,qbar_1,qbar_2,ubar_1,ubar_2\n");
    for (k, &t) in trace.checkpoints.iter().enumerate() {
        let [q1, q2] = trace.avg_quantities[k];
        let [u1, u2] = trace.avg_true_utilities[k];
        out.push_str(&format!("{t},{q1},{q2},{u1},{u2}\n"));
    }
    out
}
