//! Learning agents with a uniform act/observe interface under
//! full-information feedback.
//!
//! Payoffs are normalized internally: each agent affinely maps its own
//! payoff range to `[0,1]`, so step sizes like `eta = 0.01` mean the same
//! thing in every game. Normalization preserves argmaxes and regret ratios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, JointDistribution, Player};

/// Default FTPL perturbation scale; the noise is uniform on
/// `[0, scale * sqrt(T)]` in normalized payoff units.
pub const FTPL_DEFAULT_SCALE: f64 = 1.0;

fn default_ftpl_scale() -> f64 {
    FTPL_DEFAULT_SCALE
}

/// Algorithm choice plus hyperparameters for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum AgentSpec {
    /// Multiplicative weights with exponential update `w <- w * exp(eta * u)`.
    Mw { eta: f64 },
    /// Follow the perturbed leader with fresh uniform noise each round.
    Ftpl {
        #[serde(default = "default_ftpl_scale")]
        scale: f64,
    },
    /// Unconditional regret matching.
    Rm,
    /// Online gradient descent on an interval; only valid in quantity games.
    Ogd {
        #[serde(default)]
        step0: Option<f64>,
    },
    /// Deterministic cyclic play realizing a rational joint distribution.
    Schedule { dist: JointDistribution },
    /// Alternates between two schedules with exponentially growing phases.
    Oscillate {
        dist1: JointDistribution,
        dist2: JointDistribution,
        alpha: u64,
    },
}

impl AgentSpec {
    pub fn mw(eta: f64) -> Self {
        AgentSpec::Mw { eta }
    }

    pub fn ftpl() -> Self {
        AgentSpec::Ftpl {
            scale: FTPL_DEFAULT_SCALE,
        }
    }
}

/// Build an oscillating-schedule spec, checking that both distributions are
/// rational-valued coarse correlated equilibria of `game`. For accuracy
/// `epsilon`, callers should pass `alpha = ceil(1/epsilon^2)`.
pub fn make_oscillating_schedule(
    game: &BimatrixGame,
    dist1: JointDistribution,
    dist2: JointDistribution,
    alpha: u64,
) -> Result<AgentSpec> {
    if alpha < 1 {
        return Err(Error::InvalidAgentSpec(
            "alpha must be a positive integer".into(),
        ));
    }
    for (name, dist) in [("dist1", &dist1), ("dist2", &dist2)] {
        let violation = crate::equilibrium::cce_violation(game, dist)?;
        if violation > 1e-9 {
            return Err(Error::InvalidAgentSpec(format!(
                "{name} is not a coarse correlated equilibrium (violation {violation})"
            )));
        }
        ScheduleCycle::build(dist)?;
    }
    Ok(AgentSpec::Oscillate {
        dist1,
        dist2,
        alpha,
    })
}

/// Lengths in rounds of the first `phases` oscillation phases:
/// phase `c` lasts `(2 alpha)^c` full cycles of the schedule active in it.
pub fn oscillation_phase_lengths(
    dist1: &JointDistribution,
    dist2: &JointDistribution,
    alpha: u64,
    phases: u32,
) -> Result<Vec<u64>> {
    let tau1 = ScheduleCycle::build(dist1)?.len() as u128;
    let tau2 = ScheduleCycle::build(dist2)?.len() as u128;
    let mut out = Vec::with_capacity(phases as usize);
    let mut gamma: u128 = 1;
    for c in 1..=phases {
        gamma = gamma.saturating_mul(2 * alpha as u128);
        let tau = if c % 2 == 1 { tau1 } else { tau2 };
        let len = gamma.saturating_mul(tau);
        out.push(u64::try_from(len).map_err(|_| {
            Error::InvalidAgentSpec("oscillation phase length overflows u64".into())
        })?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Schedule cycles.
// ---------------------------------------------------------------------------

/// Largest accepted denominator for a single cell probability. Kept small
/// enough that typical irrationals cannot sneak under the tolerance (best
/// rational approximations with q <= 1e4 err by ~1/q^2 >> 1e-9).
const MAX_DENOM: u64 = 10_000;
/// Largest accepted common denominator (= cycle length bound).
const MAX_CYCLE: u64 = 1_000_000;
/// Tolerance for recognizing a float as a rational probability.
const RATIONAL_TOL: f64 = 1e-9;

/// Best rational approximation p/q with q <= max_den, within tol.
fn to_fraction(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    if x <= tol {
        return Some((0, 1));
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut y = x;
    for _ in 0..64 {
        let f = y.floor();
        if f >= max_den as f64 {
            return None;
        }
        let fi = f as u64;
        let p = fi.checked_mul(p1)?.checked_add(p0)?;
        let q = fi.checked_mul(q1)?.checked_add(q0)?;
        if q > max_den {
            return None;
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        if (p as f64 / q as f64 - x).abs() <= tol {
            return Some((p, q));
        }
        let frac = y - f;
        if frac < 1e-15 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A deterministic cycle of joint profiles whose empirical distribution over
/// each full pass equals the target distribution exactly.
///
/// Profiles are ordered by decreasing probability (ties broken toward the
/// higher flat index) and played in consecutive blocks. When all supported
/// probabilities equal `1/m`, the block length is `1/p = m` (cycle length
/// `m^2`); otherwise blocks have the minimal integer lengths `n_k` with
/// `p_k = n_k / N` over the reduced common denominator `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleCycle {
    profiles: Vec<(usize, usize)>,
}

impl ScheduleCycle {
    pub fn build(dist: &JointDistribution) -> Result<Self> {
        let (rows, cols) = (dist.rows(), dist.cols());
        let mut support: Vec<(usize, usize, f64, u64, u64)> = Vec::new();
        let mut denom_lcm: u64 = 1;
        for i in 0..rows {
            for j in 0..cols {
                let p = dist.cell(i, j);
                if p <= RATIONAL_TOL {
                    continue;
                }
                let (num, den) = to_fraction(p, MAX_DENOM, RATIONAL_TOL).ok_or_else(|| {
                    Error::InvalidAgentSpec(format!(
                        "cell ({i},{j}) probability {p} is not rational at denominator <= {MAX_DENOM}"
                    ))
                })?;
                let g = gcd(denom_lcm, den);
                denom_lcm = denom_lcm
                    .checked_mul(den / g)
                    .filter(|&n| n <= MAX_CYCLE)
                    .ok_or_else(|| {
                        Error::InvalidAgentSpec("schedule cycle would be too long".into())
                    })?;
                support.push((i, j, p, num, den));
            }
        }
        if support.is_empty() {
            return Err(Error::InvalidAgentSpec(
                "empty schedule distribution".into(),
            ));
        }
        // Descending probability, ties toward the higher flat index.
        support.sort_by(|a, b| {
            b.2.total_cmp(&a.2)
                .then_with(|| (b.0 * cols + b.1).cmp(&(a.0 * cols + a.1)))
        });

        let counts: Vec<u64> = support
            .iter()
            .map(|&(_, _, _, num, den)| num * (denom_lcm / den))
            .collect();
        debug_assert_eq!(counts.iter().sum::<u64>(), denom_lcm);

        let uniform_support = counts.iter().all(|&c| c == counts[0]);
        let block_lens: Vec<u64> = if uniform_support {
            // All supported probabilities are 1/m: block length 1/p = m.
            vec![support.len() as u64; support.len()]
        } else {
            counts
        };

        let total: u64 = block_lens.iter().sum();
        if total > MAX_CYCLE {
            return Err(Error::InvalidAgentSpec(
                "schedule cycle would be too long".into(),
            ));
        }
        let mut profiles = Vec::with_capacity(total as usize);
        for (k, &(i, j, _, _, _)) in support.iter().enumerate() {
            for _ in 0..block_lens[k] {
                profiles.push((i, j));
            }
        }
        Ok(ScheduleCycle { profiles })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profile(&self, pos: usize) -> (usize, usize) {
        self.profiles[pos % self.profiles.len()]
    }
}

// ---------------------------------------------------------------------------
// Agent state and the act/observe interface.
// ---------------------------------------------------------------------------

fn rm_probs(regrets: &[f64]) -> Vec<f64> {
    let pos: Vec<f64> = regrets.iter().map(|&r| r.max(0.0)).collect();
    let sum: f64 = pos.iter().sum();
    if sum <= 0.0 {
        vec![1.0 / regrets.len() as f64; regrets.len()]
    } else {
        pos.iter().map(|&r| r / sum).collect()
    }
}

fn sample_index(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn softmax(log_w: &[f64]) -> Vec<f64> {
    let m = log_w.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let w: Vec<f64> = log_w.iter().map(|&l| (l - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|&x| x / s).collect()
}

#[derive(Debug, Clone)]
struct RmFallback {
    regrets: Vec<f64>,
}

#[derive(Debug, Clone)]
enum AgentState {
    Mw {
        eta: f64,
        log_w: Vec<f64>,
    },
    Ftpl {
        noise_hi: f64,
        cum: Vec<f64>,
    },
    Rm {
        regrets: Vec<f64>,
    },
    Schedule {
        cycle: ScheduleCycle,
        pos: usize,
        deviated: bool,
        fallback: RmFallback,
    },
    Oscillating {
        cycle1: ScheduleCycle,
        cycle2: ScheduleCycle,
        alpha: u64,
        /// 1-based phase counter; odd phases play cycle1.
        phase: u32,
        gamma: u128,
        cycles_done: u128,
        pos: usize,
        deviated: bool,
        fallback: RmFallback,
    },
}

/// A live agent bound to one side of a game.
#[derive(Debug, Clone)]
pub struct AgentRuntime {
    player: Player,
    n_actions: usize,
    norm_lo: f64,
    norm_inv_range: f64,
    state: AgentState,
    rng: ChaCha8Rng,
}

impl AgentRuntime {
    /// `payoff_range` is the (min, max) of the agent's own payoffs; `horizon`
    /// is the fixed number of rounds the run will last.
    pub fn new(
        spec: &AgentSpec,
        player: Player,
        n_actions: usize,
        payoff_range: (f64, f64),
        horizon: u64,
        seed: u64,
    ) -> Result<Self> {
        if n_actions == 0 {
            return Err(Error::AgentGameMismatch("empty action space".into()));
        }
        let (lo, hi) = payoff_range;
        let norm_inv_range = if hi > lo { 1.0 / (hi - lo) } else { 0.0 };
        let state = match spec {
            AgentSpec::Mw { eta } => {
                if !(eta.is_finite() && *eta > 0.0) {
                    return Err(Error::InvalidAgentSpec(
                        "mw step eta must be positive".into(),
                    ));
                }
                AgentState::Mw {
                    eta: *eta,
                    log_w: vec![0.0; n_actions],
                }
            }
            AgentSpec::Ftpl { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidAgentSpec(
                        "ftpl scale must be positive".into(),
                    ));
                }
                AgentState::Ftpl {
                    noise_hi: scale * (horizon.max(1) as f64).sqrt(),
                    cum: vec![0.0; n_actions],
                }
            }
            AgentSpec::Rm => AgentState::Rm {
                regrets: vec![0.0; n_actions],
            },
            AgentSpec::Ogd { .. } => {
                return Err(Error::AgentGameMismatch(
                    "ogd plays on an interval, not a finite action set".into(),
                ));
            }
            AgentSpec::Schedule { dist } => AgentState::Schedule {
                cycle: ScheduleCycle::build(dist)?,
                pos: 0,
                deviated: false,
                fallback: RmFallback {
                    regrets: vec![0.0; n_actions],
                },
            },
            AgentSpec::Oscillate {
                dist1,
                dist2,
                alpha,
            } => {
                if *alpha < 1 {
                    return Err(Error::InvalidAgentSpec("alpha must be >= 1".into()));
                }
                AgentState::Oscillating {
                    cycle1: ScheduleCycle::build(dist1)?,
                    cycle2: ScheduleCycle::build(dist2)?,
                    alpha: *alpha,
                    phase: 1,
                    gamma: 2 * *alpha as u128,
                    cycles_done: 0,
                    pos: 0,
                    deviated: false,
                    fallback: RmFallback {
                        regrets: vec![0.0; n_actions],
                    },
                }
            }
        };
        Ok(AgentRuntime {
            player,
            n_actions,
            norm_lo: lo,
            norm_inv_range,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn own_of(&self, profile: (usize, usize)) -> usize {
        match self.player {
            Player::Row => profile.0,
            Player::Col => profile.1,
        }
    }

    fn opp_of(&self, profile: (usize, usize)) -> usize {
        match self.player {
            Player::Row => profile.1,
            Player::Col => profile.0,
        }
    }

    /// Choose the next action.
    pub fn act(&mut self) -> usize {
        match &mut self.state {
            AgentState::Mw { log_w, .. } => {
                let probs = softmax(log_w);
                sample_index(&probs, &mut self.rng)
            }
            AgentState::Ftpl { noise_hi, cum } => {
                let mut best = 0;
                let mut best_v = f64::NEG_INFINITY;
                for (a, &c) in cum.iter().enumerate() {
                    let v = c + self.rng.random::<f64>() * *noise_hi;
                    if v > best_v {
                        best_v = v;
                        best = a;
                    }
                }
                best
            }
            AgentState::Rm { regrets } => {
                let probs = rm_probs(regrets);
                sample_index(&probs, &mut self.rng)
            }
            AgentState::Schedule {
                cycle,
                pos,
                deviated,
                fallback,
            } => {
                if *deviated {
                    let probs = rm_probs(&fallback.regrets);
                    sample_index(&probs, &mut self.rng)
                } else {
                    let profile = cycle.profile(*pos);
                    match self.player {
                        Player::Row => profile.0,
                        Player::Col => profile.1,
                    }
                }
            }
            AgentState::Oscillating {
                cycle1,
                cycle2,
                phase,
                pos,
                deviated,
                fallback,
                ..
            } => {
                if *deviated {
                    let probs = rm_probs(&fallback.regrets);
                    sample_index(&probs, &mut self.rng)
                } else {
                    let cycle = if *phase % 2 == 1 { cycle1 } else { cycle2 };
                    let profile = cycle.profile(*pos);
                    match self.player {
                        Player::Row => profile.0,
                        Player::Col => profile.1,
                    }
                }
            }
        }
    }

    /// Digest the joint outcome of a round. `raw_cf[a]` is the raw payoff
    /// this agent would have received by playing `a` against the opponent's
    /// realized action; `own` is the action actually played.
    pub fn observe(&mut self, own: usize, opp: usize, raw_cf: &[f64]) {
        debug_assert_eq!(raw_cf.len(), self.n_actions);
        let norm_lo = self.norm_lo;
        let inv = self.norm_inv_range;
        let norm = |u: f64| if inv == 0.0 { 0.5 } else { (u - norm_lo) * inv };
        match &mut self.state {
            AgentState::Mw { eta, log_w } => {
                for (a, w) in log_w.iter_mut().enumerate() {
                    *w += *eta * norm(raw_cf[a]);
                }
            }
            AgentState::Ftpl { cum, .. } => {
                for (a, c) in cum.iter_mut().enumerate() {
                    *c += norm(raw_cf[a]);
                }
            }
            AgentState::Rm { regrets } => {
                let realized = norm(raw_cf[own]);
                for (a, r) in regrets.iter_mut().enumerate() {
                    *r += norm(raw_cf[a]) - realized;
                }
            }
            AgentState::Schedule {
                cycle,
                pos,
                deviated,
                fallback,
            } => {
                if !*deviated {
                    let scheduled = cycle.profile(*pos);
                    let scheduled_opp = match self.player {
                        Player::Row => scheduled.1,
                        Player::Col => scheduled.0,
                    };
                    if opp != scheduled_opp {
                        *deviated = true;
                    }
                    *pos = (*pos + 1) % cycle.len();
                }
                if *deviated {
                    let realized = norm(raw_cf[own]);
                    for (a, r) in fallback.regrets.iter_mut().enumerate() {
                        *r += norm(raw_cf[a]) - realized;
                    }
                }
            }
            AgentState::Oscillating {
                cycle1,
                cycle2,
                alpha,
                phase,
                gamma,
                cycles_done,
                pos,
                deviated,
                fallback,
            } => {
                if !*deviated {
                    let cycle: &ScheduleCycle = if *phase % 2 == 1 { cycle1 } else { cycle2 };
                    let scheduled = cycle.profile(*pos);
                    let scheduled_opp = match self.player {
                        Player::Row => scheduled.1,
                        Player::Col => scheduled.0,
                    };
                    if opp != scheduled_opp {
                        *deviated = true;
                    }
                    *pos += 1;
                    if *pos == cycle.len() {
                        *pos = 0;
                        *cycles_done += 1;
                        if *cycles_done == *gamma {
                            *phase += 1;
                            *cycles_done = 0;
                            *gamma = gamma.saturating_mul(2 * *alpha as u128);
                        }
                    }
                }
                if *deviated {
                    let realized = norm(raw_cf[own]);
                    for (a, r) in fallback.regrets.iter_mut().enumerate() {
                        *r += norm(raw_cf[a]) - realized;
                    }
                }
            }
        }
    }

    /// The agent's current mixed strategy, when it has a closed form
    /// (multiplicative weights, regret matching, schedules). FTPL's
    /// perturbation-induced distribution is not tracked.
    pub fn strategy(&self) -> Option<Vec<f64>> {
        match &self.state {
            AgentState::Mw { log_w, .. } => Some(softmax(log_w)),
            AgentState::Ftpl { .. } => None,
            AgentState::Rm { regrets } => Some(rm_probs(regrets)),
            AgentState::Schedule {
                cycle,
                pos,
                deviated,
                fallback,
            } => {
                if *deviated {
                    Some(rm_probs(&fallback.regrets))
                } else {
                    let mut v = vec![0.0; self.n_actions];
                    v[self.own_of(cycle.profile(*pos))] = 1.0;
                    Some(v)
                }
            }
            AgentState::Oscillating {
                cycle1,
                cycle2,
                phase,
                pos,
                deviated,
                fallback,
                ..
            } => {
                if *deviated {
                    Some(rm_probs(&fallback.regrets))
                } else {
                    let cycle = if *phase % 2 == 1 { cycle1 } else { cycle2 };
                    let mut v = vec![0.0; self.n_actions];
                    v[self.own_of(cycle.profile(*pos))] = 1.0;
                    Some(v)
                }
            }
        }
    }

    /// Expected opponent action under the agent's schedule, if it follows one
    /// and has not observed a deviation.
    pub fn scheduled_opponent_action(&self) -> Option<usize> {
        match &self.state {
            AgentState::Schedule {
                cycle,
                pos,
                deviated: false,
                ..
            } => Some(self.opp_of(cycle.profile(*pos))),
            AgentState::Oscillating {
                cycle1,
                cycle2,
                phase,
                pos,
                deviated: false,
                ..
            } => {
                let cycle = if *phase % 2 == 1 { cycle1 } else { cycle2 };
                Some(self.opp_of(cycle.profile(*pos)))
            }
            _ => None,
        }
    }

    pub fn has_deviated(&self) -> bool {
        match &self.state {
            AgentState::Schedule { deviated, .. } | AgentState::Oscillating { deviated, .. } => {
                *deviated
            }
            _ => false,
        }
    }
}

/// Hindsight external regret of `player` over a joint action history:
/// `max_a sum_t u(a, opp_t) - u(own_t, opp_t)`, in raw payoff units.
/// An empty history has zero regret.
pub fn external_regret(game: &BimatrixGame, history: &[(usize, usize)], player: Player) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    let n = game.actions(player);
    let mut cum_cf = vec![0.0; n];
    let mut realized = 0.0;
    for &(i, j) in history {
        match player {
            Player::Row => {
                for (a, c) in cum_cf.iter_mut().enumerate() {
                    *c += game.u1(a, j);
                }
                realized += game.u1(i, j);
            }
            Player::Col => {
                for (a, c) in cum_cf.iter_mut().enumerate() {
                    *c += game.u2(i, a);
                }
                realized += game.u2(i, j);
            }
        }
    }
    cum_cf.iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c)) - realized
}
