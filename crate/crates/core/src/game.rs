//! Finite two-player games, mixed profiles, and joint action distributions.
//!
//! Payoffs follow the usual 2x2 cell naming: for player `i`, `A_i` is the
//! top-left outcome, `B_i` top-right, `C_i` bottom-left, `D_i` bottom-right.
//! `p` is the probability that the row player plays the top row, `q` the
//! probability that the column player plays the left column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for exact-arithmetic probability checks.
pub const PROB_TOL: f64 = 1e-12;

/// The two players of a bimatrix game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Row => 0,
            Player::Col => 1,
        }
    }
}

/// A finite two-player game in normal form.
///
/// `u1` is the row player's payoff matrix, `u2` the column player's; both are
/// `rows x cols` and must contain only finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameWire", into = "GameWire")]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    u1: Vec<Vec<f64>>,
    u2: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GameWire {
    rows: usize,
    cols: usize,
    u1: Vec<Vec<f64>>,
    u2: Vec<Vec<f64>>,
}

impl TryFrom<GameWire> for BimatrixGame {
    type Error = Error;
    fn try_from(w: GameWire) -> Result<Self> {
        let g = BimatrixGame::new(w.u1, w.u2)?;
        if g.rows != w.rows || g.cols != w.cols {
            return Err(Error::InvalidGame(format!(
                "declared size {}x{} does not match matrices {}x{}",
                w.rows, w.cols, g.rows, g.cols
            )));
        }
        Ok(g)
    }
}

impl From<BimatrixGame> for GameWire {
    fn from(g: BimatrixGame) -> Self {
        GameWire {
            rows: g.rows,
            cols: g.cols,
            u1: g.u1,
            u2: g.u2,
        }
    }
}

impl BimatrixGame {
    pub fn new(u1: Vec<Vec<f64>>, u2: Vec<Vec<f64>>) -> Result<Self> {
        let rows = u1.len();
        if rows == 0 {
            return Err(Error::InvalidGame("payoff matrix has no rows".into()));
        }
        let cols = u1[0].len();
        if cols == 0 {
            return Err(Error::InvalidGame("payoff matrix has no columns".into()));
        }
        for m in [&u1, &u2] {
            if m.len() != rows {
                return Err(Error::InvalidGame(
                    "u1 and u2 have different dimensions".into(),
                ));
            }
            for r in m {
                if r.len() != cols {
                    return Err(Error::InvalidGame("ragged payoff matrix".into()));
                }
                if r.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidGame("non-finite payoff entry".into()));
                }
            }
        }
        Ok(BimatrixGame { rows, cols, u1, u2 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_2x2(&self) -> bool {
        self.rows == 2 && self.cols == 2
    }

    pub fn u1(&self, i: usize, j: usize) -> f64 {
        self.u1[i][j]
    }

    pub fn u2(&self, i: usize, j: usize) -> f64 {
        self.u2[i][j]
    }

    /// Payoff of `player` at the pure profile `(i, j)`.
    pub fn payoff(&self, player: Player, i: usize, j: usize) -> f64 {
        match player {
            Player::Row => self.u1[i][j],
            Player::Col => self.u2[i][j],
        }
    }

    pub fn actions(&self, player: Player) -> usize {
        match player {
            Player::Row => self.rows,
            Player::Col => self.cols,
        }
    }

    /// Min and max payoff of `player` over all cells of its own matrix.
    pub fn payoff_range(&self, player: Player) -> (f64, f64) {
        let m = match player {
            Player::Row => &self.u1,
            Player::Col => &self.u2,
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in m {
            for &v in row {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Counterfactual payoffs of `player` against the opponent's action:
    /// entry `a` is the payoff `player` would get by playing `a`.
    pub fn counterfactuals(&self, player: Player, opponent_action: usize) -> Vec<f64> {
        match player {
            Player::Row => (0..self.rows)
                .map(|i| self.u1[i][opponent_action])
                .collect(),
            Player::Col => (0..self.cols)
                .map(|j| self.u2[opponent_action][j])
                .collect(),
        }
    }

    /// 2x2 cell accessors by the conventional names.
    pub fn cells(&self, player: Player) -> Result<[f64; 4]> {
        if !self.is_2x2() {
            return Err(Error::DimensionMismatch(
                "cell names are defined for 2x2 games".into(),
            ));
        }
        let m = match player {
            Player::Row => &self.u1,
            Player::Col => &self.u2,
        };
        Ok([m[0][0], m[0][1], m[1][0], m[1][1]])
    }

    /// True when one player strictly prefers the main diagonal and the other
    /// strictly prefers the anti-diagonal (either orientation).
    pub fn is_opposing_interests(&self) -> bool {
        if !self.is_2x2() {
            return false;
        }
        let [a1, b1, c1, d1] = self.cells(Player::Row).unwrap();
        let [a2, b2, c2, d2] = self.cells(Player::Col).unwrap();
        let row_diag = a1.min(d1) > b1.max(c1);
        let row_anti = a1.max(d1) < b1.min(c1);
        let col_diag = a2.min(d2) > b2.max(c2);
        let col_anti = a2.max(d2) < b2.min(c2);
        (row_diag && col_anti) || (row_anti && col_diag)
    }
}

/// Independent mixed strategies, one probability vector per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    row: Vec<f64>,
    col: Vec<f64>,
}

fn validate_prob_vec(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidProfile(format!(
            "{what}: empty probability vector"
        )));
    }
    let mut sum = 0.0;
    for &x in v {
        if !x.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x) {
            return Err(Error::InvalidProfile(format!(
                "{what}: entry {x} outside [0,1]"
            )));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidProfile(format!("{what}: mass {sum} != 1")));
    }
    Ok(())
}

impl MixedProfile {
    pub fn new(row: Vec<f64>, col: Vec<f64>) -> Result<Self> {
        validate_prob_vec(&row, "row strategy")?;
        validate_prob_vec(&col, "column strategy")?;
        Ok(MixedProfile { row, col })
    }

    /// 2x2 shorthand: `p` = probability of the top row, `q` = probability of
    /// the left column.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        MixedProfile::new(vec![p, 1.0 - p], vec![q, 1.0 - q])
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn col(&self) -> &[f64] {
        &self.col
    }

    pub fn p(&self) -> f64 {
        self.row[0]
    }

    pub fn q(&self) -> f64 {
        self.col[0]
    }

    /// Product distribution of the two marginals.
    pub fn outer(&self) -> JointDistribution {
        let cells = self
            .row
            .iter()
            .map(|&pi| self.col.iter().map(|&qj| pi * qj).collect())
            .collect();
        JointDistribution::new(cells).expect("product of valid marginals is valid")
    }
}

/// A probability distribution over joint action profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct JointDistribution {
    cells: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for JointDistribution {
    type Error = Error;
    fn try_from(cells: Vec<Vec<f64>>) -> Result<Self> {
        JointDistribution::new(cells)
    }
}

impl From<JointDistribution> for Vec<Vec<f64>> {
    fn from(d: JointDistribution) -> Self {
        d.cells
    }
}

impl JointDistribution {
    pub fn new(cells: Vec<Vec<f64>>) -> Result<Self> {
        let rows = cells.len();
        if rows == 0 || cells[0].is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        let cols = cells[0].len();
        let mut sum = 0.0;
        for r in &cells {
            if r.len() != cols {
                return Err(Error::InvalidDistribution("ragged distribution".into()));
            }
            for &x in r {
                if !x.is_finite() || x < -PROB_TOL {
                    return Err(Error::InvalidDistribution(format!("negative cell {x}")));
                }
                sum += x;
            }
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {sum} != 1")));
        }
        Ok(JointDistribution { cells })
    }

    /// Point mass on a single profile.
    pub fn point_mass(rows: usize, cols: usize, profile: (usize, usize)) -> Result<Self> {
        if profile.0 >= rows || profile.1 >= cols {
            return Err(Error::InvalidDistribution("profile out of range".into()));
        }
        let mut cells = vec![vec![0.0; cols]; rows];
        cells[profile.0][profile.1] = 1.0;
        Ok(JointDistribution { cells })
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        let w = 1.0 / (rows * cols) as f64;
        JointDistribution {
            cells: vec![vec![w; cols]; rows],
        }
    }

    /// Empirical distribution from profile counts (total must be positive).
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let total: u64 = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("no observations".into()));
        }
        let cells = counts
            .iter()
            .map(|r| r.iter().map(|&c| c as f64 / total as f64).collect())
            .collect();
        Ok(JointDistribution { cells })
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i][j]
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// Marginal over the given player's actions.
    pub fn marginal(&self, player: Player) -> Vec<f64> {
        match player {
            Player::Row => self.cells.iter().map(|r| r.iter().sum()).collect(),
            Player::Col => (0..self.cols())
                .map(|j| self.cells.iter().map(|r| r[j]).sum())
                .collect(),
        }
    }

    /// L1 distance over cells.
    pub fn l1_distance(&self, other: &JointDistribution) -> Result<f64> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(
                "distributions of different shape".into(),
            ));
        }
        let mut d = 0.0;
        for (a, b) in self.cells.iter().zip(&other.cells) {
            for (x, y) in a.iter().zip(b) {
                d += (x - y).abs();
            }
        }
        Ok(d)
    }

    /// Total-variation distance (half the L1 distance).
    pub fn tv_distance(&self, other: &JointDistribution) -> Result<f64> {
        Ok(0.5 * self.l1_distance(other)?)
    }

    /// Convex mixture `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &JointDistribution, lambda: f64) -> Result<JointDistribution> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(
                "distributions of different shape".into(),
            ));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                    .collect()
            })
            .collect();
        JointDistribution::new(cells)
    }
}

/// Exact bilinear expected payoffs of a 2x2 game under independent mixing.
///
/// `u1 = pq(A1-C1+D1-B1) + p(B1-D1) + q(C1-D1) + D1`, and the analogous
/// expression with `A2-B2+D2-C2` for the column player.
pub fn expected_utilities_2x2(game: &BimatrixGame, profile: &MixedProfile) -> Result<(f64, f64)> {
    if !game.is_2x2() {
        return Err(Error::DimensionMismatch(
            "expected_utilities_2x2 needs a 2x2 game".into(),
        ));
    }
    if profile.row.len() != 2 || profile.col.len() != 2 {
        return Err(Error::DimensionMismatch(
            "profile does not fit a 2x2 game".into(),
        ));
    }
    let [a1, b1, c1, d1] = game.cells(Player::Row)?;
    let [a2, b2, c2, d2] = game.cells(Player::Col)?;
    let (p, q) = (profile.p(), profile.q());
    let u1 = p * q * (a1 - c1 + d1 - b1) + p * (b1 - d1) + q * (c1 - d1) + d1;
    let u2 = p * q * (a2 - b2 + d2 - c2) + p * (b2 - d2) + q * (c2 - d2) + d2;
    Ok((u1, u2))
}

/// Expected payoffs under an arbitrary joint distribution; linear in `dist`.
pub fn joint_expected_utilities(
    game: &BimatrixGame,
    dist: &JointDistribution,
) -> Result<(f64, f64)> {
    if dist.rows() != game.rows() || dist.cols() != game.cols() {
        return Err(Error::DimensionMismatch(format!(
            "distribution {}x{} does not match game {}x{}",
            dist.rows(),
            dist.cols(),
            game.rows(),
            game.cols()
        )));
    }
    let mut u1 = 0.0;
    let mut u2 = 0.0;
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let w = dist.cell(i, j);
            u1 += w * game.u1(i, j);
            u2 += w * game.u2(i, j);
        }
    }
    Ok((u1, u2))
}

// ---------------------------------------------------------------------------
// Canonical example games.
// ---------------------------------------------------------------------------

/// Opposing-interests example: row payoffs `[[c,-1],[-1,1]]`, column payoffs
/// `[[-1,1],[d,-1]]`. The true parameters are `c = 2`, `d = 3`.
pub fn g_oi(c: f64, d: f64) -> BimatrixGame {
    BimatrixGame::new(
        vec![vec![c, -1.0], vec![-1.0, 1.0]],
        vec![vec![-1.0, 1.0], vec![d, -1.0]],
    )
    .expect("finite 2x2")
}

pub fn g_oi_true() -> BimatrixGame {
    g_oi(2.0, 3.0)
}

/// Dominance-solvable example: row payoffs `[[c,3],[2,4]]`, column payoffs
/// `[[d,4],[3,2]]`. The true parameters are `c = 1`, `d = 3`; the bottom row
/// is then strictly dominant and the unique equilibrium is (bottom, left).
pub fn g_ds(c: f64, d: f64) -> BimatrixGame {
    BimatrixGame::new(
        vec![vec![c, 3.0], vec![2.0, 4.0]],
        vec![vec![d, 4.0], vec![3.0, 2.0]],
    )
    .expect("finite 2x2")
}

pub fn g_ds_true() -> BimatrixGame {
    g_ds(1.0, 3.0)
}

pub fn matching_pennies() -> BimatrixGame {
    BimatrixGame::new(
        vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
        vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
    )
    .expect("finite 2x2")
}

/// Battle of the sexes; two pure equilibria at (top,left) and (bottom,right).
pub fn battle_of_sexes() -> BimatrixGame {
    BimatrixGame::new(
        vec![vec![2.0, 0.0], vec![0.0, 1.0]],
        vec![vec![1.0, 0.0], vec![0.0, 2.0]],
    )
    .expect("finite 2x2")
}

/// Prisoner's dilemma with defection strictly dominant for both players.
pub fn prisoners_dilemma() -> BimatrixGame {
    BimatrixGame::new(
        vec![vec![3.0, 0.0], vec![4.0, 1.0]],
        vec![vec![3.0, 4.0], vec![0.0, 1.0]],
    )
    .expect("finite 2x2")
}
