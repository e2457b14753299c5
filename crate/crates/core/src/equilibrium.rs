//! Solvers for finite two-player games: the fully mixed 2x2 equilibrium,
//! pure equilibria, iterated elimination of strictly dominated actions,
//! pure-commitment Stackelberg values, and the coarse-correlated-equilibrium
//! violation functional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, JointDistribution, MixedProfile, Player};

/// Denominators smaller than this declare a weak-dominance degeneracy.
const DEGENERACY_TOL: f64 = 1e-12;

/// The fully mixed Nash equilibrium of a 2x2 game, when it exists:
/// `p = (D2-C2)/(A2-B2+D2-C2)`, `q = (D1-B1)/(A1-C1+D1-B1)`.
///
/// Returns `Ok(None)` when the formulas are well defined but land outside
/// `[0,1]`, and an error when a denominator vanishes (weak dominance).
pub fn mixed_ne_2x2(game: &BimatrixGame) -> Result<Option<MixedProfile>> {
    if !game.is_2x2() {
        return Err(Error::DimensionMismatch(
            "mixed_ne_2x2 needs a 2x2 game".into(),
        ));
    }
    let [a1, b1, c1, d1] = game.cells(Player::Row)?;
    let [a2, b2, c2, d2] = game.cells(Player::Col)?;
    let den_p = a2 - b2 + d2 - c2;
    let den_q = a1 - c1 + d1 - b1;
    if den_p.abs() < DEGENERACY_TOL || den_q.abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateGame(
            "indifference denominator vanishes".into(),
        ));
    }
    let p = (d2 - c2) / den_p;
    let q = (d1 - b1) / den_q;
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Ok(None);
    }
    Ok(Some(MixedProfile::from_pq(p, q)?))
}

/// All pure Nash equilibria: profiles where each action is a (weak) best
/// reply to the other.
pub fn pure_ne(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let row_best = (0..game.rows()).all(|i2| game.u1(i2, j) <= game.u1(i, j));
            let col_best = (0..game.cols()).all(|j2| game.u2(i, j2) <= game.u2(i, j));
            if row_best && col_best {
                out.push((i, j));
            }
        }
    }
    out
}

/// Order in which candidate eliminations are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationOrder {
    /// Lowest-index player first (row before column), lowest action first.
    #[default]
    RowFirst,
    ColumnFirst,
}

/// One elimination step: `eliminated` is strictly dominated by `dominator`
/// within the subgame surviving at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationStep {
    pub player: Player,
    pub eliminated: usize,
    pub dominator: usize,
}

/// Full record of an iterated-elimination run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub steps: Vec<EliminationStep>,
    /// Action indices of the original game that survive, per player.
    pub surviving_rows: Vec<usize>,
    pub surviving_cols: Vec<usize>,
}

impl EliminationTrace {
    /// True when a single profile survives.
    pub fn solved(&self) -> bool {
        self.surviving_rows.len() == 1 && self.surviving_cols.len() == 1
    }

    pub fn surviving_profile(&self) -> Option<(usize, usize)> {
        self.solved()
            .then(|| (self.surviving_rows[0], self.surviving_cols[0]))
    }
}

/// True iff `cand` strictly dominates `other` for `player` against every
/// surviving opponent action. Domination is tested against pure dominators
/// only.
fn strictly_dominates(
    game: &BimatrixGame,
    player: Player,
    cand: usize,
    other: usize,
    opp_surviving: &[usize],
) -> bool {
    opp_surviving.iter().all(|&k| match player {
        Player::Row => game.u1(cand, k) > game.u1(other, k),
        Player::Col => game.u2(k, cand) > game.u2(k, other),
    })
}

/// Iterated elimination of strictly dominated pure actions until fixpoint.
pub fn iterated_elimination(game: &BimatrixGame, order: EliminationOrder) -> EliminationTrace {
    let mut rows: Vec<usize> = (0..game.rows()).collect();
    let mut cols: Vec<usize> = (0..game.cols()).collect();
    let mut steps = Vec::new();

    let players = match order {
        EliminationOrder::RowFirst => [Player::Row, Player::Col],
        EliminationOrder::ColumnFirst => [Player::Col, Player::Row],
    };

    'outer: loop {
        for player in players {
            let (own, opp): (&mut Vec<usize>, &Vec<usize>) = match player {
                Player::Row => (&mut rows, &cols),
                Player::Col => (&mut cols, &rows),
            };
            if own.len() <= 1 {
                continue;
            }
            for idx in 0..own.len() {
                let victim = own[idx];
                let dominator = own
                    .iter()
                    .copied()
                    .find(|&d| d != victim && strictly_dominates(game, player, d, victim, opp));
                if let Some(dominator) = dominator {
                    steps.push(EliminationStep {
                        player,
                        eliminated: victim,
                        dominator,
                    });
                    own.remove(idx);
                    continue 'outer;
                }
            }
        }
        break;
    }

    EliminationTrace {
        steps,
        surviving_rows: rows,
        surviving_cols: cols,
    }
}

/// True iff iterated elimination reduces the game to a single profile.
/// Strict elimination is order independent in outcome, so the default order
/// suffices.
pub fn is_dominance_solvable(game: &BimatrixGame) -> bool {
    iterated_elimination(game, EliminationOrder::default()).solved()
}

/// Pure-commitment Stackelberg outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackelbergOutcome {
    pub leader: Player,
    pub leader_action: usize,
    pub follower_reply: usize,
    pub leader_value: f64,
}

/// The leader commits to a pure action and the follower best-replies;
/// follower ties break in the leader's favor, leader ties toward the lowest
/// action index.
pub fn stackelberg(game: &BimatrixGame, leader: Player) -> StackelbergOutcome {
    let follower = leader.other();
    let mut best: Option<StackelbergOutcome> = None;
    for a in 0..game.actions(leader) {
        let follower_payoff = |r: usize| match leader {
            Player::Row => game.u2(a, r),
            Player::Col => game.u1(r, a),
        };
        let leader_payoff = |r: usize| match leader {
            Player::Row => game.u1(a, r),
            Player::Col => game.u2(r, a),
        };
        let best_follower = (0..game.actions(follower))
            .map(follower_payoff)
            .fold(f64::NEG_INFINITY, f64::max);
        // Among the follower's best replies, take the one the leader prefers.
        let reply = (0..game.actions(follower))
            .filter(|&r| follower_payoff(r) == best_follower)
            .max_by(|&r1, &r2| leader_payoff(r1).total_cmp(&leader_payoff(r2)))
            .expect("non-empty action set");
        let value = leader_payoff(reply);
        if best.as_ref().is_none_or(|b| value > b.leader_value) {
            best = Some(StackelbergOutcome {
                leader,
                leader_action: a,
                follower_reply: reply,
                leader_value: value,
            });
        }
    }
    best.expect("non-empty action set")
}

/// Best unilateral fixed-action gain over `dist`:
/// `max_i max_a E[u_i(a, a_-i)] - E[u_i]`. Nonpositive iff `dist` is a
/// coarse correlated equilibrium.
pub fn cce_violation(game: &BimatrixGame, dist: &JointDistribution) -> Result<f64> {
    if dist.rows() != game.rows() || dist.cols() != game.cols() {
        return Err(Error::DimensionMismatch(
            "distribution does not match game".into(),
        ));
    }
    let mut realized = (0.0, 0.0);
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let w = dist.cell(i, j);
            realized.0 += w * game.u1(i, j);
            realized.1 += w * game.u2(i, j);
        }
    }
    let row_marginal = dist.marginal(Player::Row);
    let col_marginal = dist.marginal(Player::Col);
    let mut best = f64::NEG_INFINITY;
    for a in 0..game.rows() {
        let dev: f64 = (0..game.cols())
            .map(|j| col_marginal[j] * game.u1(a, j))
            .sum();
        best = best.max(dev - realized.0);
    }
    for a in 0..game.cols() {
        let dev: f64 = (0..game.rows())
            .map(|i| row_marginal[i] * game.u2(i, a))
            .sum();
        best = best.max(dev - realized.1);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{
        battle_of_sexes, g_ds, g_ds_true, g_oi, g_oi_true, matching_pennies, prisoners_dilemma,
    };

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn oi_mixed_ne() {
        let ne = mixed_ne_2x2(&g_oi_true()).unwrap().unwrap();
        assert!(close(ne.p(), 2.0 / 3.0));
        assert!(close(ne.q(), 2.0 / 5.0));
    }

    #[test]
    fn oi_declared_ne_formula() {
        for (c, d) in [
            (1.0, 3.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (3.0, 1.0 / 3.0),
            (5.0, 0.7),
        ] {
            let ne = mixed_ne_2x2(&g_oi(c, d)).unwrap().unwrap();
            assert!(
                close(ne.p(), (d + 1.0) / (d + 3.0)),
                "c={c} d={d} p={}",
                ne.p()
            );
            assert!(close(ne.q(), 2.0 / (c + 3.0)));
        }
    }

    #[test]
    fn matching_pennies_mixed_ne() {
        let ne = mixed_ne_2x2(&matching_pennies()).unwrap().unwrap();
        assert!(close(ne.p(), 0.5) && close(ne.q(), 0.5));
    }

    #[test]
    fn ds_declared_game_mixed_ne() {
        // Declaring c = 5 moves the agents to (p, q) = (1/2, 1/4).
        let ne = mixed_ne_2x2(&g_ds(5.0, 3.0)).unwrap().unwrap();
        assert!(close(ne.p(), 0.5));
        assert!(close(ne.q(), 0.25));
    }

    #[test]
    fn degenerate_game_reported() {
        let g = BimatrixGame::new(
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert!(matches!(mixed_ne_2x2(&g), Err(Error::DegenerateGame(_))));
    }

    #[test]
    fn vanishing_denominator_is_degenerate_even_under_strict_dominance() {
        // In the dominance-solvable example the row player's two comparisons
        // cancel (1-2+4-3 = 0), so the indifference formula has no solution.
        assert!(matches!(
            mixed_ne_2x2(&g_ds_true()),
            Err(Error::DegenerateGame(_))
        ));
    }

    #[test]
    fn formulas_outside_unit_interval_mean_no_mixed_ne() {
        let g = BimatrixGame::new(
            vec![vec![3.0, 0.0], vec![5.0, 1.0]],
            vec![vec![3.0, 5.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(mixed_ne_2x2(&g).unwrap(), None);
        assert!(is_dominance_solvable(&g));
    }

    #[test]
    fn pure_ne_examples() {
        let g = g_ds_true();
        assert_eq!(pure_ne(&g), vec![(1, 0)]);
        assert_eq!((g.u1(1, 0), g.u2(1, 0)), (2.0, 3.0));
        assert!(pure_ne(&matching_pennies()).is_empty());
        let coord = BimatrixGame::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(pure_ne(&coord), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn elimination_on_prisoners_dilemma() {
        let trace = iterated_elimination(&prisoners_dilemma(), EliminationOrder::default());
        assert_eq!(trace.surviving_profile(), Some((1, 1)));
        assert_eq!(trace.steps.len(), 2);
    }

    #[test]
    fn elimination_on_g_ds() {
        let trace = iterated_elimination(&g_ds_true(), EliminationOrder::default());
        assert_eq!(
            trace.steps,
            vec![
                EliminationStep {
                    player: Player::Row,
                    eliminated: 0,
                    dominator: 1
                },
                EliminationStep {
                    player: Player::Col,
                    eliminated: 1,
                    dominator: 0
                },
            ]
        );
        assert_eq!(trace.surviving_profile(), Some((1, 0)));
        assert_eq!(
            pure_ne(&g_ds_true()),
            vec![trace.surviving_profile().unwrap()]
        );
    }

    #[test]
    fn elimination_leaves_matching_pennies_alone() {
        let trace = iterated_elimination(&matching_pennies(), EliminationOrder::default());
        assert!(trace.steps.is_empty());
        assert_eq!(trace.surviving_rows, vec![0, 1]);
        assert_eq!(trace.surviving_cols, vec![0, 1]);
    }

    #[test]
    fn dominance_solvable_flags() {
        assert!(is_dominance_solvable(&prisoners_dilemma()));
        assert!(is_dominance_solvable(&g_ds_true()));
        assert!(!is_dominance_solvable(&matching_pennies()));
        assert!(!is_dominance_solvable(&battle_of_sexes()));
    }

    #[test]
    fn elimination_order_does_not_change_survivor() {
        let g = g_ds_true();
        let a = iterated_elimination(&g, EliminationOrder::RowFirst);
        let b = iterated_elimination(&g, EliminationOrder::ColumnFirst);
        assert_eq!(a.surviving_profile(), b.surviving_profile());
    }

    #[test]
    fn stackelberg_g_ds() {
        let row = stackelberg(&g_ds_true(), Player::Row);
        assert_eq!((row.leader_action, row.follower_reply), (0, 1));
        assert_eq!(row.leader_value, 3.0);

        // Column commitment cannot beat the truthful equilibrium payoff.
        let col = stackelberg(&g_ds_true(), Player::Col);
        assert_eq!(col.leader_value, 3.0);
        assert_eq!((col.leader_action, col.follower_reply), (0, 1));
    }

    #[test]
    fn stackelberg_prisoners_dilemma() {
        let out = stackelberg(&prisoners_dilemma(), Player::Row);
        assert_eq!(
            (out.leader_action, out.follower_reply, out.leader_value),
            (1, 1, 1.0)
        );
    }

    #[test]
    fn stackelberg_dominates_pure_ne_value() {
        for g in [g_ds_true(), prisoners_dilemma(), battle_of_sexes()] {
            for leader in [Player::Row, Player::Col] {
                let s = stackelberg(&g, leader);
                for (i, j) in pure_ne(&g) {
                    let ne_value = g.payoff(leader, i, j);
                    assert!(s.leader_value >= ne_value - 1e-12);
                }
            }
        }
    }

    #[test]
    fn cce_violation_examples() {
        let uniform = JointDistribution::uniform(2, 2);
        assert!(close(
            cce_violation(&matching_pennies(), &uniform).unwrap(),
            0.0
        ));

        let ne_mass = JointDistribution::point_mass(2, 2, (1, 0)).unwrap();
        assert!(cce_violation(&g_ds_true(), &ne_mass).unwrap() <= 1e-12);

        let off = JointDistribution::point_mass(2, 2, (0, 0)).unwrap();
        assert!(close(cce_violation(&g_ds_true(), &off).unwrap(), 1.0));
    }
}
