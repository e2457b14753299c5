//! The declaration game between users of learning agents: each user reports
//! parameters to their own agent, the agents' dynamics settle on the declared
//! game's limit distribution, and user utilities are evaluated at true types.
//!
//! Closed forms cover the three analyzed classes (dominance-solvable 2x2
//! families, Cournot competition, opposing-interests 2x2 families); generic
//! scenarios get grid search and grid certification only.

use serde::{Deserialize, Serialize};

use crate::agents::AgentSpec;
use crate::cournot::{
    cournot_best_response, cournot_ne, cournot_utilities_at, CournotOutcome, CournotScenario,
};
use crate::dynamics::{run_cournot_dynamics, run_dynamics, CournotDynamicsConfig, DynamicsConfig};
use crate::equilibrium::{iterated_elimination, mixed_ne_2x2, pure_ne};
use crate::error::{Error, Result};
use crate::family::{Cell, Declaration, DeclarationProfile, ParamGame2x2};
use crate::game::{
    expected_utilities_2x2, joint_expected_utilities, BimatrixGame, JointDistribution,
    MixedProfile, Player,
};

/// Default number of grid points per declaration dimension.
pub const DEFAULT_GRID_POINTS: usize = 200;

fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}

/// A closed interval of declared values with a grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        GridSpec {
            lo,
            hi,
            points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.lo];
        }
        (0..self.points)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.points - 1) as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        if self.points <= 1 {
            0.0
        } else {
            (self.hi - self.lo) / (self.points - 1) as f64
        }
    }
}

/// Per-player declaration grids (one spec per free dimension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub row: Vec<GridSpec>,
    pub col: Vec<GridSpec>,
}

impl Grids {
    pub fn player(&self, player: Player) -> &[GridSpec] {
        match player {
            Player::Row => &self.row,
            Player::Col => &self.col,
        }
    }
}

/// The game family a scenario ranges over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameFamily {
    Matrix(ParamGame2x2),
    Cournot(CournotScenario),
}

/// How meta-utilities are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityMode {
    /// Evaluate the declared game's unique limit distribution in closed form.
    #[serde(rename = "analytic")]
    AnalyticLimit,
    /// Average finite-horizon dynamics over seeds.
    Simulated {
        agents: [AgentSpec; 2],
        horizon: u64,
        seeds: Vec<u64>,
    },
}

/// True types, declaration grids, and the utility-evaluation mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGameScenario {
    pub family: GameFamily,
    pub grids: Grids,
    pub mode: UtilityMode,
}

/// A declaration profile in scenario form: one value vector per player
/// (payoff-cell values for matrix families, a single cost for Cournot).
pub type MetaProfile = [Vec<f64>; 2];

impl MetaGameScenario {
    pub fn cournot(scn: CournotScenario) -> Self {
        let grid = GridSpec::new(0.0, scn.a);
        MetaGameScenario {
            family: GameFamily::Cournot(scn),
            grids: Grids {
                row: vec![grid],
                col: vec![grid],
            },
            mode: UtilityMode::AnalyticLimit,
        }
    }

    pub fn matrix(family: ParamGame2x2, grids: Grids) -> Result<Self> {
        let scn = MetaGameScenario {
            family: GameFamily::Matrix(family),
            grids,
            mode: UtilityMode::AnalyticLimit,
        };
        scn.validate()?;
        Ok(scn)
    }

    pub fn with_mode(mut self, mode: UtilityMode) -> Self {
        self.mode = mode;
        self
    }

    /// Check grid shapes and that the true types lie inside the grids.
    pub fn validate(&self) -> Result<()> {
        for (player, grids) in [
            (Player::Row, &self.grids.row),
            (Player::Col, &self.grids.col),
        ] {
            let mut truth = self.truth(player);
            if let GameFamily::Cournot(c) = &self.family {
                // Costs above `a` declare like `a` (zero production), so the
                // effective truthful declaration is the clamped cost.
                truth[0] = truth[0].min(c.a);
            }
            if grids.len() != truth.len() {
                return Err(Error::UnsupportedScenario(format!(
                    "{player:?} has {} declaration dimensions but {} grids",
                    truth.len(),
                    grids.len()
                )));
            }
            for (g, &t) in grids.iter().zip(&truth) {
                if !g.lo.is_finite() || !g.hi.is_finite() || g.lo > g.hi || g.points < 2 {
                    return Err(Error::UnsupportedScenario(format!("bad grid {g:?}")));
                }
                if t < g.lo - 1e-12 || t > g.hi + 1e-12 {
                    return Err(Error::UnsupportedScenario(format!(
                        "true value {t} of {player:?} lies outside its grid [{}, {}]",
                        g.lo, g.hi
                    )));
                }
            }
        }
        Ok(())
    }

    /// True declared values of `player`.
    pub fn truth(&self, player: Player) -> Vec<f64> {
        match &self.family {
            GameFamily::Matrix(f) => f.truth(player).0,
            GameFamily::Cournot(c) => match player {
                Player::Row => vec![c.c1],
                Player::Col => vec![c.c2],
            },
        }
    }

    pub fn truth_profile(&self) -> MetaProfile {
        [self.truth(Player::Row), self.truth(Player::Col)]
    }
}

/// The unique limit distribution of regret-minimization dynamics on `game`,
/// when the game is in a class with a unique coarse correlated equilibrium:
/// dominance-solvable games (point mass on the survivor) and fully mixed 2x2
/// games (product of the mixed equilibrium marginals).
pub fn limit_distribution(game: &BimatrixGame) -> Result<JointDistribution> {
    let trace = iterated_elimination(game, Default::default());
    if let Some(profile) = trace.surviving_profile() {
        return JointDistribution::point_mass(game.rows(), game.cols(), profile);
    }
    if game.is_2x2() && pure_ne(game).is_empty() {
        if let Some(profile) = mixed_ne_2x2(game)? {
            let (p, q) = (profile.p(), profile.q());
            if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
                return Ok(profile.outer());
            }
        }
        return Err(Error::NoUniqueLimit(
            "degenerate 2x2 game without pure equilibria".into(),
        ));
    }
    Err(Error::NoUniqueLimit(
        "game is neither dominance-solvable nor fully mixed".into(),
    ))
}

fn matrix_profile(family: &ParamGame2x2, profile: &MetaProfile) -> DeclarationProfile {
    let _ = family;
    DeclarationProfile {
        row: Declaration(profile[0].clone()),
        col: Declaration(profile[1].clone()),
    }
}

/// Meta-utilities of a declaration profile, at the scenario's true types.
///
/// Analytic-limit mode evaluates the declared game's unique limit
/// distribution with true payoffs; simulated mode averages the final
/// empirical distribution of finite-horizon runs across seeds.
pub fn meta_utility(scn: &MetaGameScenario, profile: &MetaProfile) -> Result<[f64; 2]> {
    match &scn.family {
        GameFamily::Cournot(c) => {
            let declared = cournot_declared(profile)?;
            match &scn.mode {
                UtilityMode::AnalyticLimit => {
                    let (u1, u2) = cournot_utilities_at(c, c.true_costs(), declared);
                    Ok([u1, u2])
                }
                UtilityMode::Simulated {
                    agents,
                    horizon,
                    seeds,
                } => {
                    if seeds.is_empty() {
                        return Err(Error::UnsupportedScenario("no seeds".into()));
                    }
                    let mut acc = [0.0; 2];
                    for &seed in seeds {
                        let cfg = CournotDynamicsConfig::new(*horizon, seed);
                        let trace = run_cournot_dynamics(c, declared, agents, &cfg)?;
                        let [u1, u2] = trace.final_avg_true_utilities();
                        acc[0] += u1;
                        acc[1] += u2;
                    }
                    Ok([acc[0] / seeds.len() as f64, acc[1] / seeds.len() as f64])
                }
            }
        }
        GameFamily::Matrix(family) => {
            let declared = family.instantiate(&matrix_profile(family, profile))?;
            match &scn.mode {
                UtilityMode::AnalyticLimit => {
                    let dist = limit_distribution(&declared)?;
                    let (u1, u2) = joint_expected_utilities(family.base(), &dist)?;
                    Ok([u1, u2])
                }
                UtilityMode::Simulated {
                    agents,
                    horizon,
                    seeds,
                } => {
                    if seeds.is_empty() {
                        return Err(Error::UnsupportedScenario("no seeds".into()));
                    }
                    let mut acc = [0.0; 2];
                    for &seed in seeds {
                        let cfg = DynamicsConfig::new(*horizon, seed);
                        let trace = run_dynamics(&declared, agents, &cfg)?;
                        let (u1, u2) =
                            joint_expected_utilities(family.base(), trace.final_distribution())?;
                        acc[0] += u1;
                        acc[1] += u2;
                    }
                    Ok([acc[0] / seeds.len() as f64, acc[1] / seeds.len() as f64])
                }
            }
        }
    }
}

fn cournot_declared(profile: &MetaProfile) -> Result<(f64, f64)> {
    if profile[0].len() != 1 || profile[1].len() != 1 {
        return Err(Error::InvalidDeclaration(
            "Cournot declarations are scalar costs".into(),
        ));
    }
    let (x1, x2) = (profile[0][0], profile[1][0]);
    if !x1.is_finite() || !x2.is_finite() || x1 < 0.0 || x2 < 0.0 {
        return Err(Error::InvalidDeclaration(
            "declared costs must be nonnegative".into(),
        ));
    }
    Ok((x1, x2))
}

/// Best response of `player` in the meta-game, holding the opponent's
/// declaration fixed. Cournot uses the analytic candidate comparison;
/// matrix families grid-search `meta_utility` over the player's intervals
/// and refine the best bracket by golden section (no unimodality assumed).
/// Returns the declaration and its meta-utility.
pub fn meta_best_response(
    scn: &MetaGameScenario,
    player: Player,
    opp_declaration: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if let GameFamily::Cournot(c) = &scn.family {
        if opp_declaration.len() != 1 {
            return Err(Error::InvalidDeclaration(
                "Cournot declarations are scalar".into(),
            ));
        }
        let (x, u) = cournot_best_response(c, c.true_costs(), player.index(), opp_declaration[0]);
        return Ok((vec![x], u));
    }

    let own_utility = |decl: &[f64]| -> Option<f64> {
        let profile = match player {
            Player::Row => [decl.to_vec(), opp_declaration.to_vec()],
            Player::Col => [opp_declaration.to_vec(), decl.to_vec()],
        };
        meta_utility(scn, &profile).ok().map(|u| u[player.index()])
    };

    let grids = scn.grids.player(player);
    if grids.is_empty() {
        return Err(Error::UnsupportedScenario(
            "player has no declaration grid".into(),
        ));
    }
    let mut best = scn.truth(player);
    let mut best_u = own_utility(&best).unwrap_or(f64::NEG_INFINITY);

    // Coordinate sweeps over the grid, twice, then a golden-section refine
    // per dimension around the best grid point.
    for _pass in 0..2 {
        for dim in 0..grids.len() {
            for v in grids[dim].values() {
                let mut cand = best.clone();
                cand[dim] = v;
                if let Some(u) = own_utility(&cand) {
                    if u > best_u + 1e-15 {
                        best_u = u;
                        best = cand;
                    }
                }
            }
        }
    }
    for dim in 0..grids.len() {
        let step = grids[dim].step();
        let lo = (best[dim] - step).max(grids[dim].lo);
        let hi = (best[dim] + step).min(grids[dim].hi);
        let (v, u) = golden_max(
            |x| {
                let mut cand = best.clone();
                cand[dim] = x;
                own_utility(&cand).unwrap_or(f64::NEG_INFINITY)
            },
            lo,
            hi,
        );
        if u > best_u {
            best_u = u;
            best[dim] = v;
        }
    }
    Ok((best, best_u))
}

/// Result of iterated best response in the meta-game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointOutcome {
    Converged {
        profile: MetaProfile,
        iterations: usize,
    },
    Cycle {
        period: usize,
        profile: MetaProfile,
    },
    NoFixedPoint {
        iterations: usize,
        profile: MetaProfile,
    },
}

/// Iterated best response from truth, alternating players, declaring a
/// cycle when a profile repeats. This is the search tool for scenarios
/// outside the three analyzed classes, where no closed form exists.
pub fn meta_fixed_point_search(
    scn: &MetaGameScenario,
    max_iterations: usize,
) -> Result<FixedPointOutcome> {
    let mut profile = scn.truth_profile();
    let mut history: Vec<MetaProfile> = vec![profile.clone()];
    let same = |a: &MetaProfile, b: &MetaProfile| {
        a[0].iter().zip(&b[0]).all(|(x, y)| (x - y).abs() <= 1e-9)
            && a[1].iter().zip(&b[1]).all(|(x, y)| (x - y).abs() <= 1e-9)
    };
    for iteration in 1..=max_iterations {
        let (row_decl, _) = meta_best_response(scn, Player::Row, &profile[1])?;
        profile[0] = row_decl;
        let (col_decl, _) = meta_best_response(scn, Player::Col, &profile[0])?;
        profile[1] = col_decl;
        if same(&profile, history.last().unwrap()) {
            return Ok(FixedPointOutcome::Converged {
                profile,
                iterations: iteration,
            });
        }
        if let Some(pos) = history.iter().position(|p| same(p, &profile)) {
            return Ok(FixedPointOutcome::Cycle {
                period: history.len() - pos,
                profile,
            });
        }
        history.push(profile.clone());
    }
    Ok(FixedPointOutcome::NoFixedPoint {
        iterations: max_iterations,
        profile,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - PHI * (hi - lo);
    let mut x2 = lo + PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

/// The agents'-game outcome a declaration profile induces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InducedOutcome {
    Mixed(MixedProfile),
    Pure { profile: (usize, usize) },
    Cournot(CournotOutcome),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaClassification {
    Truthful,
    UnilateralManipulation,
    MetaNash,
    EpsilonNash,
}

/// A meta-equilibrium (or candidate profile) with its induced outcome and
/// true-type utilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEquilibriumReport {
    pub declarations: MetaProfile,
    pub induced: InducedOutcome,
    /// User utilities at true types.
    pub utilities: [f64; 2],
    pub classification: MetaClassification,
    /// Max grid deviation gain, when certified against the scenario grids.
    pub epsilon_certificate: Option<f64>,
}

/// A profitable unilateral deviation from truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationWitness {
    pub player: Player,
    pub declaration: Vec<f64>,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationMethod {
    CournotCharacterization,
    OpposingInterestsSymmetry,
    GridCertification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationReport {
    pub manipulation_free: bool,
    pub method: ClassificationMethod,
    pub witness: Option<ManipulationWitness>,
}

// ---------------------------------------------------------------------------
// Cournot meta-equilibrium (closed form).
// ---------------------------------------------------------------------------

/// Closed-form equilibrium of the Cournot declaration game.
///
/// When the truthful game already has a zero producer the truthful profile is
/// an equilibrium. Otherwise: if one cost is at least `a/2` and at least
/// `(2 c_other + a)/3`, the low-cost player drives the other out with
/// `x = 2 c_other - a`; otherwise both keep producing and the stationary
/// declarations are `x_i* = (8 c_i - 2 c_j - a)/5`, with zero-clamped
/// fallbacks `x_i = max(0, (6 c_i - a)/4)` when one stationary value is
/// negative.
pub fn cournot_meta_equilibrium(scn: &MetaGameScenario) -> Result<MetaEquilibriumReport> {
    let GameFamily::Cournot(c) = &scn.family else {
        return Err(Error::UnsupportedScenario("not a Cournot scenario".into()));
    };
    let (a, c1, c2) = (c.a, c.c1, c.c2);
    let truthful = cournot_ne(c, (c1, c2));
    let both_produce = truthful.q1 > 0.0 && truthful.q2 > 0.0;

    let (x1, x2) = if !both_produce {
        (c1.min(a), c2.min(a))
    } else if c2 >= a / 2.0 && 3.0 * c2 >= 2.0 * c1 + a {
        // Player 1 drives player 2 out; any x2 >= c2 is a best reply and the
        // truthful value is reported.
        (2.0 * c2 - a, c2)
    } else if c1 >= a / 2.0 && 3.0 * c1 >= 2.0 * c2 + a {
        (c1, 2.0 * c1 - a)
    } else {
        let x1s = (8.0 * c1 - 2.0 * c2 - a) / 5.0;
        let x2s = (8.0 * c2 - 2.0 * c1 - a) / 5.0;
        match (x1s >= 0.0, x2s >= 0.0) {
            (true, true) => (x1s, x2s),
            (true, false) => (((6.0 * c1 - a) / 4.0).max(0.0), 0.0),
            (false, true) => (0.0, ((6.0 * c2 - a) / 4.0).max(0.0)),
            (false, false) => (0.0, 0.0),
        }
    };

    let declarations: MetaProfile = [vec![x1], vec![x2]];
    let induced = cournot_ne(c, (x1, x2));
    let (u1, u2) = cournot_utilities_at(c, (c1, c2), (x1, x2));
    let truthful_decl = (x1 - c1.min(a)).abs() <= 1e-12 && (x2 - c2.min(a)).abs() <= 1e-12;
    let certificate = epsilon_equilibrium_check(scn, &declarations)?.max_gain;
    Ok(MetaEquilibriumReport {
        declarations,
        induced: InducedOutcome::Cournot(induced),
        utilities: [u1, u2],
        classification: if truthful_decl {
            MetaClassification::Truthful
        } else {
            MetaClassification::MetaNash
        },
        epsilon_certificate: Some(certificate),
    })
}

// ---------------------------------------------------------------------------
// Opposing-interests meta-equilibrium (closed form).
// ---------------------------------------------------------------------------

/// Closed-form meta-equilibrium of an opposing-interests family with a
/// natural parameter space. Every meta-equilibrium induces the same agents'
/// profile `p = (D1-C1)/(A1-B1+D1-C1)`, `q = (D2-B2)/(A2-B2+D2-C2)`, and the
/// user utilities equal the truthful-equilibrium utilities.
pub fn oi_meta_equilibrium(family: &ParamGame2x2) -> Result<MetaEquilibriumReport> {
    let base = family.base();
    if !base.is_opposing_interests() {
        return Err(Error::UnsupportedScenario(
            "base game is not opposing-interests".into(),
        ));
    }
    let check = crate::family::validate_natural_space(family)?;
    if !check.passed() {
        return Err(Error::UnsupportedScenario(format!(
            "family is not a natural parameter space: {check:?}"
        )));
    }
    let [a1, b1, c1, d1] = base.cells(Player::Row)?;
    let [a2, b2, c2, d2] = base.cells(Player::Col)?;
    let p = (d1 - c1) / (a1 - b1 + d1 - c1);
    let q = (d2 - b2) / (a2 - b2 + d2 - c2);
    let induced = MixedProfile::from_pq(p, q)?;
    let (u1, u2) = expected_utilities_2x2(base, &induced)?;

    // Declarations realizing (p, q): the row player's first free cell pins q,
    // the column player's pins p; remaining free cells stay truthful.
    let mut declarations: MetaProfile = [family.truth(Player::Row).0, family.truth(Player::Col).0];
    for (player, target) in [(Player::Row, q), (Player::Col, p)] {
        let free = family.free_cells(player);
        let cell = free[0];
        let v = family
            .indifference_declaration(player, cell, target)
            .ok_or_else(|| {
                Error::UnsupportedScenario("no declaration induces the stationary profile".into())
            })?;
        declarations[player.index()][0] = v;
    }

    // Truthful when the stationary profile coincides with the truthful
    // equilibrium (player-permutation symmetry).
    let truthful_ne = mixed_ne_2x2(base)?
        .ok_or_else(|| Error::UnsupportedScenario("no fully mixed equilibrium".into()))?;
    let symmetric = (truthful_ne.p() - p).abs() <= 1e-12 && (truthful_ne.q() - q).abs() <= 1e-12;

    Ok(MetaEquilibriumReport {
        declarations,
        induced: InducedOutcome::Mixed(induced),
        utilities: [u1, u2],
        classification: if symmetric {
            MetaClassification::Truthful
        } else {
            MetaClassification::MetaNash
        },
        epsilon_certificate: None,
    })
}

// ---------------------------------------------------------------------------
// Manipulation-freeness.
// ---------------------------------------------------------------------------

/// Decide whether truth-telling is a meta-game equilibrium.
///
/// Cournot and opposing-interests scenarios use their characterizations
/// (zero producer or both costs zero; player-permutation symmetry of the
/// mixed equilibrium). Generic matrix scenarios fall back to grid
/// certification: truth is manipulation-free when no unilateral grid
/// deviation gains more than `eps`. On a negative answer the report carries
/// a profitable deviation found by best-response search.
pub fn manipulation_free(scn: &MetaGameScenario, eps: f64) -> Result<ManipulationReport> {
    match &scn.family {
        GameFamily::Cournot(c) => {
            let truthful = cournot_ne(c, (c.c1, c.c2));
            let both_produce = truthful.q1 > 0.0 && truthful.q2 > 0.0;
            let free = !both_produce || (c.c1 == 0.0 && c.c2 == 0.0);
            let witness = if free { None } else { cournot_witness(scn, c) };
            Ok(ManipulationReport {
                manipulation_free: free,
                method: ClassificationMethod::CournotCharacterization,
                witness,
            })
        }
        GameFamily::Matrix(family) => {
            let natural = family.base().is_opposing_interests()
                && crate::family::validate_natural_space(family)?.passed();
            if natural {
                let base = family.base();
                let [a1, b1, c1, d1] = base.cells(Player::Row)?;
                let [a2, b2, c2, d2] = base.cells(Player::Col)?;
                let k1 = a1 - b1 + d1 - c1;
                let k2 = a2 - b2 + d2 - c2;
                // Symmetry of the equilibrium under player permutation.
                let free = ((d1 - c1) / k1 - (d2 - c2) / k2).abs() <= 1e-9
                    && ((d2 - b2) / k2 - (d1 - b1) / k1).abs() <= 1e-9;
                let witness = if free { None } else { grid_witness(scn)? };
                return Ok(ManipulationReport {
                    manipulation_free: free,
                    method: ClassificationMethod::OpposingInterestsSymmetry,
                    witness,
                });
            }
            let witness = grid_witness(scn)?;
            let max_gain = witness.as_ref().map_or(0.0, |w| w.gain);
            Ok(ManipulationReport {
                manipulation_free: max_gain <= eps,
                method: ClassificationMethod::GridCertification,
                witness: witness.filter(|w| w.gain > eps),
            })
        }
    }
}

fn cournot_witness(scn: &MetaGameScenario, c: &CournotScenario) -> Option<ManipulationWitness> {
    let truth = scn.truth_profile();
    let base = meta_utility(scn, &truth).ok()?;
    let mut best: Option<ManipulationWitness> = None;
    for player in [Player::Row, Player::Col] {
        let opp = truth[player.other().index()][0];
        let (x, u) = cournot_best_response(c, c.true_costs(), player.index(), opp);
        let gain = u - base[player.index()];
        if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(ManipulationWitness {
                player,
                declaration: vec![x],
                gain,
            });
        }
    }
    best
}

/// Best unilateral deviation from truth found by grid search, if profitable.
fn grid_witness(scn: &MetaGameScenario) -> Result<Option<ManipulationWitness>> {
    let truth = scn.truth_profile();
    let base = meta_utility(scn, &truth)?;
    let mut best: Option<ManipulationWitness> = None;
    for player in [Player::Row, Player::Col] {
        let opp = &truth[player.other().index()];
        let (decl, u) = meta_best_response(scn, player, opp)?;
        let gain = u - base[player.index()];
        if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(ManipulationWitness {
                player,
                declaration: decl,
                gain,
            });
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Dominant-declaration construction.
// ---------------------------------------------------------------------------

/// Safety margin used when raising the target action's payoffs.
pub const DEFAULT_DOMINANCE_MARGIN: f64 = 1.0;

/// Outcome of the dominant-declaration construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DominantConstruction {
    /// A declaration making the target action strictly dominant (the truth,
    /// when the action is already dominant).
    Declaration(Declaration),
    /// The family's space cannot make the target dominant; the first
    /// binding fixed cell is reported.
    TooNarrow { binding_cell: Cell, reason: String },
}

impl DominantConstruction {
    pub fn declaration(&self) -> Option<&Declaration> {
        match self {
            DominantConstruction::Declaration(d) => Some(d),
            DominantConstruction::TooNarrow { .. } => None,
        }
    }
}

/// Construct a declaration under which `target` strictly dominates for
/// `player` in the declared game, raising free target-row (or target-column)
/// cells by `margin` above the competing action and lowering free competitor
/// cells when the target cell is fixed.
pub fn construct_dominant_declaration(
    family: &ParamGame2x2,
    player: Player,
    target: usize,
    margin: f64,
) -> Result<DominantConstruction> {
    if target > 1 {
        return Err(Error::InvalidDeclaration("2x2 actions are 0 or 1".into()));
    }
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::InvalidDeclaration("margin must be positive".into()));
    }
    let other = 1 - target;
    let cells = family.base().cells(player)?;
    let cell_at = |own: usize, opp: usize| -> Cell {
        // Row player: own action selects the row; column player the column.
        let (i, j) = match player {
            Player::Row => (own, opp),
            Player::Col => (opp, own),
        };
        match (i, j) {
            (0, 0) => Cell::A,
            (0, 1) => Cell::B,
            (1, 0) => Cell::C,
            _ => Cell::D,
        }
    };
    let value = |c: Cell| {
        let (i, j) = c.coords();
        cells[i * 2 + j]
    };
    let free = family.free_cells(player);

    // Already dominant at truth?
    let dominant_at_truth =
        (0..2).all(|opp| value(cell_at(target, opp)) > value(cell_at(other, opp)));
    if dominant_at_truth {
        return Ok(DominantConstruction::Declaration(family.truth(player)));
    }

    let mut adjust: Vec<(Cell, f64)> = Vec::new();
    for opp in 0..2 {
        let t_cell = cell_at(target, opp);
        let o_cell = cell_at(other, opp);
        let (t_val, o_val) = (value(t_cell), value(o_cell));
        if free.contains(&t_cell) {
            adjust.push((t_cell, t_val.max(o_val + margin)));
        } else if t_val > o_val {
            // Fixed pair already strictly ordered the right way.
        } else if free.contains(&o_cell) {
            adjust.push((o_cell, t_val - margin));
        } else {
            return Ok(DominantConstruction::TooNarrow {
                binding_cell: t_cell,
                reason: format!(
                    "cell {t_cell:?} is fixed at {t_val} and cannot beat {o_cell:?} = {o_val}"
                ),
            });
        }
    }

    let mut decl = family.truth(player);
    for (cell, v) in adjust {
        let idx = free
            .iter()
            .position(|c| *c == cell)
            .expect("adjusted cells are free");
        decl.0[idx] = v;
    }
    family.validate_declaration(player, &decl)?;
    Ok(DominantConstruction::Declaration(decl))
}

// ---------------------------------------------------------------------------
// Epsilon-equilibrium certification.
// ---------------------------------------------------------------------------

/// Grid certificate for a declaration profile: the largest meta-utility gain
/// any player can realize by a unilateral grid deviation. Grid points whose
/// declared game has no unique limit (degenerate boundaries) are skipped and
/// counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCertificate {
    pub max_gain: f64,
    pub per_player: [f64; 2],
    pub skipped_points: usize,
}

impl EpsilonCertificate {
    pub fn passes(&self, eps: f64) -> bool {
        self.max_gain <= eps
    }
}

pub fn epsilon_equilibrium_check(
    scn: &MetaGameScenario,
    profile: &MetaProfile,
) -> Result<EpsilonCertificate> {
    let base = meta_utility(scn, profile)?;
    let mut per_player = [f64::NEG_INFINITY; 2];
    let mut skipped = 0usize;
    for player in [Player::Row, Player::Col] {
        let idx = player.index();
        let grids = scn.grids.player(player);
        let dims = profile[idx].len();
        if grids.len() != dims {
            return Err(Error::UnsupportedScenario(
                "grid/declaration arity mismatch".into(),
            ));
        }
        let mut best = 0.0f64;
        let mut sweep = |decl: Vec<f64>| {
            let cand = match player {
                Player::Row => [decl, profile[1].clone()],
                Player::Col => [profile[0].clone(), decl],
            };
            match meta_utility(scn, &cand) {
                Ok(u) => best = best.max(u[idx] - base[idx]),
                Err(_) => skipped += 1,
            }
        };
        if dims == 1 {
            for v in grids[0].values() {
                sweep(vec![v]);
            }
        } else if dims == 2 {
            for v0 in grids[0].values() {
                for v1 in grids[1].values() {
                    sweep(vec![v0, v1]);
                }
            }
        } else {
            // Coordinate deviations for higher-dimensional spaces.
            for dim in 0..dims {
                for v in grids[dim].values() {
                    let mut decl = profile[idx].clone();
                    decl[dim] = v;
                    sweep(decl);
                }
            }
        }
        per_player[idx] = best;
    }
    Ok(EpsilonCertificate {
        max_gain: per_player[0].max(per_player[1]),
        per_player,
        skipped_points: skipped,
    })
}
