//! Shared generators and independent grid oracles for the test suites.
//! Each integration-test target compiles its own copy, so helpers used by
//! only one suite are fine.
#![allow(dead_code)]

use metagames::*;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random 2x2 game that is strictly dominance-solvable with every
/// elimination margin at least `min_margin`.
pub fn random_strict_ds_2x2(rng: &mut ChaCha8Rng, min_margin: f64) -> BimatrixGame {
    loop {
        let mut cell = || rng.random::<f64>();
        let g = BimatrixGame::new(
            vec![vec![cell(), cell()], vec![cell(), cell()]],
            vec![vec![cell(), cell()], vec![cell(), cell()]],
        )
        .unwrap();
        let trace = iterated_elimination(&g, EliminationOrder::default());
        let Some((si, sj)) = trace.surviving_profile() else {
            continue;
        };
        if trace.steps.len() != 2 {
            continue;
        }
        // Margins: the first elimination dominates across the whole opposing
        // action set, the second within the surviving line.
        let first = trace.steps[0];
        let second = trace.steps[1];
        let m1 = match first.player {
            Player::Row => (0..2)
                .map(|j| g.u1(first.dominator, j) - g.u1(first.eliminated, j))
                .fold(f64::INFINITY, f64::min),
            Player::Col => (0..2)
                .map(|i| g.u2(i, first.dominator) - g.u2(i, first.eliminated))
                .fold(f64::INFINITY, f64::min),
        };
        let m2 = match second.player {
            Player::Row => g.u1(second.dominator, sj) - g.u1(second.eliminated, sj),
            Player::Col => g.u2(si, second.dominator) - g.u2(si, second.eliminated),
        };
        if m1 >= min_margin && m2 >= min_margin {
            return g;
        }
    }
}

/// A random opposing-interests game; the orientation (which player prefers
/// the main diagonal) is itself random.
pub fn random_oi_2x2(rng: &mut ChaCha8Rng) -> BimatrixGame {
    let lo = |r: &mut ChaCha8Rng| r.random::<f64>();
    let hi = |r: &mut ChaCha8Rng| 1.0 + r.random::<f64>();
    let flip = rng.random::<bool>();
    let (a1, d1, b1, c1, a2, d2, b2, c2) = if flip {
        (
            hi(rng),
            hi(rng),
            lo(rng),
            lo(rng),
            lo(rng),
            lo(rng),
            hi(rng),
            hi(rng),
        )
    } else {
        (
            lo(rng),
            lo(rng),
            hi(rng),
            hi(rng),
            hi(rng),
            hi(rng),
            lo(rng),
            lo(rng),
        )
    };
    BimatrixGame::new(
        vec![vec![a1, b1], vec![c1, d1]],
        vec![vec![a2, b2], vec![c2, d2]],
    )
    .unwrap()
}

/// A random joint distribution (normalized exponentials).
pub fn random_joint(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> JointDistribution {
    loop {
        let mut cells = vec![vec![0.0f64; cols]; rows];
        let mut total = 0.0;
        for row in cells.iter_mut() {
            for c in row.iter_mut() {
                *c = -rng.random::<f64>().max(1e-12).ln();
                total += *c;
            }
        }
        for row in cells.iter_mut() {
            for c in row.iter_mut() {
                *c /= total;
            }
        }
        if let Ok(d) = JointDistribution::new(cells) {
            return d;
        }
    }
}

/// Independent grid oracle for Cournot: the best unilateral declaration of
/// `player` on a uniform grid over [0, a], holding the opponent fixed, with
/// utilities evaluated by the region formulas at true costs.
pub fn cournot_grid_best_response(
    scn: &CournotScenario,
    player: usize,
    opp_x: f64,
    points: usize,
) -> (f64, f64) {
    let truth = scn.true_costs();
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..points {
        let x = scn.a * k as f64 / (points - 1) as f64;
        let declared = if player == 0 { (x, opp_x) } else { (opp_x, x) };
        let u = cournot_utilities_at(scn, truth, declared);
        let u = if player == 0 { u.0 } else { u.1 };
        if u > best.1 {
            best = (x, u);
        }
    }
    best
}

/// Largest unilateral grid gain over a Cournot declaration profile.
pub fn cournot_grid_gain(scn: &CournotScenario, profile: (f64, f64), points: usize) -> f64 {
    let truth = scn.true_costs();
    let base = cournot_utilities_at(scn, truth, profile);
    let (_, u1) = cournot_grid_best_response(scn, 0, profile.1, points);
    let (_, u2) = cournot_grid_best_response(scn, 1, profile.0, points);
    (u1 - base.0).max(u2 - base.1)
}

/// Direct evaluation of a declared 2x2 game for the opposing-interests
/// oracle: solve the declared game (dominance first, then the interior mixed
/// profile) and price the outcome with the true payoffs.
pub fn declared_true_utilities(
    true_game: &BimatrixGame,
    declared: &BimatrixGame,
) -> Option<(f64, f64)> {
    let trace = iterated_elimination(declared, EliminationOrder::default());
    if let Some(profile) = trace.surviving_profile() {
        return Some((
            true_game.u1(profile.0, profile.1),
            true_game.u2(profile.0, profile.1),
        ));
    }
    if !pure_ne(declared).is_empty() {
        return None;
    }
    let profile = mixed_ne_2x2(declared).ok()??;
    if profile.p() <= 0.0 || profile.p() >= 1.0 || profile.q() <= 0.0 || profile.q() >= 1.0 {
        return None;
    }
    expected_utilities_2x2(true_game, &profile).ok()
}

/// Largest unilateral grid gain from the truthful profile of a single-free-
/// cell 2x2 family, sweeping each player's declared cell over `grid`.
pub fn matrix_grid_gain_from_truth(family: &ParamGame2x2, grids: &Grids, points: usize) -> f64 {
    let truth = family.truth_profile();
    let base_game = family.instantiate(&truth).unwrap();
    let base = declared_true_utilities(family.base(), &base_game).expect("true game solvable");
    let mut worst: f64 = 0.0;
    for player in [Player::Row, Player::Col] {
        let spec = grids.player(player)[0];
        for k in 0..points {
            let v = spec.lo + (spec.hi - spec.lo) * k as f64 / (points - 1) as f64;
            let mut profile = truth.clone();
            match player {
                Player::Row => profile.row.0[0] = v,
                Player::Col => profile.col.0[0] = v,
            }
            let Ok(declared) = family.instantiate(&profile) else {
                continue;
            };
            let Some(u) = declared_true_utilities(family.base(), &declared) else {
                continue;
            };
            let gain = match player {
                Player::Row => u.0 - base.0,
                Player::Col => u.1 - base.1,
            };
            worst = worst.max(gain);
        }
    }
    worst
}
