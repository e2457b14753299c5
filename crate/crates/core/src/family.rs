//! Parameterized 2x2 game families: users declare values for a subset of
//! their own payoff cells, the rest stay fixed at the true values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Player};

/// 2x2 cell names: A = top-left, B = top-right, C = bottom-left,
/// D = bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    A,
    B,
    C,
    D,
}

impl Cell {
    pub fn coords(self) -> (usize, usize) {
        match self {
            Cell::A => (0, 0),
            Cell::B => (0, 1),
            Cell::C => (1, 0),
            Cell::D => (1, 1),
        }
    }

    pub const ALL: [Cell; 4] = [Cell::A, Cell::B, Cell::C, Cell::D];
}

/// One player's declared values for their free cells, in the order the family
/// lists those cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Declaration(pub Vec<f64>);

/// A declaration for each player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeclarationProfile {
    pub row: Declaration,
    pub col: Declaration,
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    rows: usize,
    cols: usize,
    u1: Vec<Vec<f64>>,
    u2: Vec<Vec<f64>>,
    free_cells: FreeCellsWire,
    truth: TruthWire,
    #[serde(default)]
    preserve_best_replies: bool,
}

#[derive(Serialize, Deserialize)]
struct FreeCellsWire {
    row: Vec<Cell>,
    col: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct TruthWire {
    row: Vec<f64>,
    col: Vec<f64>,
}

/// A 2x2 game family: a base (true) game plus, for each player, the list of
/// payoff cells of that player's own matrix that the player may redeclare.
///
/// Instantiating the family with the truthful declarations reproduces the
/// base game exactly. With `preserve_best_replies` set, only declarations
/// that keep the signs of both own best-reply comparisons are accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyWire", into = "FamilyWire")]
pub struct ParamGame2x2 {
    base: BimatrixGame,
    free_row: Vec<Cell>,
    free_col: Vec<Cell>,
    preserve_best_replies: bool,
}

impl TryFrom<FamilyWire> for ParamGame2x2 {
    type Error = Error;
    fn try_from(w: FamilyWire) -> Result<Self> {
        if (w.rows, w.cols) != (2, 2) {
            return Err(Error::InvalidGame(
                "families are defined for 2x2 games".into(),
            ));
        }
        let base = BimatrixGame::new(w.u1, w.u2)?;
        let fam = ParamGame2x2::new(base, w.free_cells.row, w.free_cells.col)?
            .with_preserve_best_replies(w.preserve_best_replies);
        // The wire truth values are redundant with the base game; insist they
        // agree so a hand-edited file cannot silently drift.
        for (player, truth) in [(Player::Row, &w.truth.row), (Player::Col, &w.truth.col)] {
            let expect = fam.truth(player);
            if truth.len() != expect.0.len()
                || truth
                    .iter()
                    .zip(&expect.0)
                    .any(|(a, b)| a.to_bits() != b.to_bits())
            {
                return Err(Error::InvalidDeclaration(
                    "truth values do not match the base game".into(),
                ));
            }
        }
        Ok(fam)
    }
}

impl From<ParamGame2x2> for FamilyWire {
    fn from(f: ParamGame2x2) -> Self {
        let truth = TruthWire {
            row: f.truth(Player::Row).0,
            col: f.truth(Player::Col).0,
        };
        FamilyWire {
            rows: 2,
            cols: 2,
            u1: (0..2)
                .map(|i| (0..2).map(|j| f.base.u1(i, j)).collect())
                .collect(),
            u2: (0..2)
                .map(|i| (0..2).map(|j| f.base.u2(i, j)).collect())
                .collect(),
            free_cells: FreeCellsWire {
                row: f.free_row,
                col: f.free_col,
            },
            truth,
            preserve_best_replies: f.preserve_best_replies,
        }
    }
}

/// Sign of the two own best-reply comparisons of a 2x2 player.
/// For the row player these are `A1 - C1` (against left) and `B1 - D1`
/// (against right); for the column player `A2 - B2` (against top) and
/// `C2 - D2` (against bottom).
fn best_reply_signs(cells: &[f64; 4], player: Player) -> (f64, f64) {
    let [a, b, c, d] = *cells;
    match player {
        Player::Row => ((a - c).signum(), (b - d).signum()),
        Player::Col => ((a - b).signum(), (c - d).signum()),
    }
}

impl ParamGame2x2 {
    pub fn new(base: BimatrixGame, free_row: Vec<Cell>, free_col: Vec<Cell>) -> Result<Self> {
        if !base.is_2x2() {
            return Err(Error::InvalidGame(
                "families are defined for 2x2 games".into(),
            ));
        }
        for cells in [&free_row, &free_col] {
            for (k, c) in cells.iter().enumerate() {
                if cells[..k].contains(c) {
                    return Err(Error::InvalidDeclaration(format!(
                        "duplicate free cell {c:?}"
                    )));
                }
            }
        }
        Ok(ParamGame2x2 {
            base,
            free_row,
            free_col,
            preserve_best_replies: false,
        })
    }

    pub fn with_preserve_best_replies(mut self, on: bool) -> Self {
        self.preserve_best_replies = on;
        self
    }

    pub fn base(&self) -> &BimatrixGame {
        &self.base
    }

    pub fn free_cells(&self, player: Player) -> &[Cell] {
        match player {
            Player::Row => &self.free_row,
            Player::Col => &self.free_col,
        }
    }

    pub fn preserves_best_replies(&self) -> bool {
        self.preserve_best_replies
    }

    /// The truthful declaration of `player` (base-game values of the free cells).
    pub fn truth(&self, player: Player) -> Declaration {
        let decl = self
            .free_cells(player)
            .iter()
            .map(|c| {
                let (i, j) = c.coords();
                self.base.payoff(player, i, j)
            })
            .collect();
        Declaration(decl)
    }

    pub fn truth_profile(&self) -> DeclarationProfile {
        DeclarationProfile {
            row: self.truth(Player::Row),
            col: self.truth(Player::Col),
        }
    }

    /// Validate a declaration for `player` against this family's space.
    pub fn validate_declaration(&self, player: Player, decl: &Declaration) -> Result<()> {
        let free = self.free_cells(player);
        if decl.0.len() != free.len() {
            return Err(Error::InvalidDeclaration(format!(
                "expected {} values, got {}",
                free.len(),
                decl.0.len()
            )));
        }
        if decl.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDeclaration(
                "non-finite declared value".into(),
            ));
        }
        if self.preserve_best_replies {
            let declared = self.declared_cells(player, decl)?;
            let truth = self.declared_cells(player, &self.truth(player))?;
            if best_reply_signs(&declared, player) != best_reply_signs(&truth, player) {
                return Err(Error::InvalidDeclaration(
                    "declaration changes a best-reply sign in a sign-preserving family".into(),
                ));
            }
        }
        Ok(())
    }

    /// The player's four own cells after applying a declaration.
    fn declared_cells(&self, player: Player, decl: &Declaration) -> Result<[f64; 4]> {
        let free = self.free_cells(player);
        if decl.0.len() != free.len() {
            return Err(Error::InvalidDeclaration(format!(
                "expected {} values, got {}",
                free.len(),
                decl.0.len()
            )));
        }
        let mut cells = self.base.cells(player)?;
        for (cell, &v) in free.iter().zip(&decl.0) {
            let (i, j) = cell.coords();
            cells[i * 2 + j] = v;
        }
        Ok(cells)
    }

    /// Build the declared game: free cells replaced by the declared values,
    /// fixed cells unchanged. The truthful profile reproduces the base game
    /// bit for bit.
    pub fn instantiate(&self, profile: &DeclarationProfile) -> Result<BimatrixGame> {
        self.validate_declaration(Player::Row, &profile.row)?;
        self.validate_declaration(Player::Col, &profile.col)?;
        let r = self.declared_cells(Player::Row, &profile.row)?;
        let c = self.declared_cells(Player::Col, &profile.col)?;
        BimatrixGame::new(
            vec![vec![r[0], r[1]], vec![r[2], r[3]]],
            vec![vec![c[0], c[1]], vec![c[2], c[3]]],
        )
    }

    /// Closed-form declared value for a single free `cell` of `player` that
    /// makes the player indifferent at the opponent mixing probability
    /// `target` (the row player pins `q`, the column player pins `p`), with
    /// every other cell at its true value. Returns `None` when the required
    /// coefficient vanishes.
    pub fn indifference_declaration(&self, player: Player, cell: Cell, target: f64) -> Option<f64> {
        if !(0.0..=1.0).contains(&target) || target == 0.0 || target == 1.0 {
            return None;
        }
        let [a, b, c, d] = self.base.cells(player).ok()?;
        // Row indifference at q: qA' + (1-q)B' = qC' + (1-q)D'.
        // Column indifference at p: pA' + (1-p)C' = pB' + (1-p)D'.
        let y = (1.0 - target) / target;
        let v = match (player, cell) {
            (Player::Row, Cell::A) => c + (d - b) * y,
            (Player::Row, Cell::C) => a - (d - b) * y,
            (Player::Row, Cell::D) => b + (a - c) / y,
            (Player::Row, Cell::B) => d - (a - c) / y,
            (Player::Col, Cell::A) => b + (d - c) * y,
            (Player::Col, Cell::B) => a - (d - c) * y,
            (Player::Col, Cell::D) => c + (a - b) / y,
            (Player::Col, Cell::C) => d - (a - b) / y,
        };
        v.is_finite().then_some(v)
    }
}

/// Outcome of the natural-parameter-space check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NaturalSpaceCheck {
    Pass,
    Fail { player: Player, reason: String },
}

impl NaturalSpaceCheck {
    pub fn passed(&self) -> bool {
        matches!(self, NaturalSpaceCheck::Pass)
    }
}

/// Check that a family over an opposing-interests base game is "natural":
///
/// 1. sufficient generality — for every opponent mixing probability in a
///    dense grid of (0,1) some declaration makes the player exactly
///    indifferent (solved in closed form cell by cell), and
/// 2. analyzability — every declaration either preserves both own
///    best-reply signs or hands the player a dominant strategy.
///
/// Property 2 is decided structurally: with unconstrained cell values, a
/// player whose free cells touch both comparison pairs can flip exactly one
/// best-reply sign without creating dominance, which breaks the property;
/// a single comparison pair (or a sign-preserving family) cannot.
pub fn validate_natural_space(family: &ParamGame2x2) -> Result<NaturalSpaceCheck> {
    if !family.base().is_opposing_interests() {
        return Err(Error::UnsupportedScenario(
            "natural-space check applies to opposing-interests base games".into(),
        ));
    }
    const GRID: usize = 199;
    for player in [Player::Row, Player::Col] {
        let free = family.free_cells(player);
        if free.is_empty() {
            return Ok(NaturalSpaceCheck::Fail {
                player,
                reason: "generality: no free cell, the induced opponent mix is fixed".into(),
            });
        }
        // Generality: verify the closed form lands on indifference across a
        // dense grid of targets, using the player's first free cell.
        let cell = free[0];
        for k in 1..=GRID {
            let target = k as f64 / (GRID + 1) as f64;
            let Some(v) = family.indifference_declaration(player, cell, target) else {
                return Ok(NaturalSpaceCheck::Fail {
                    player,
                    reason: format!("generality: no declaration reaches target {target}"),
                });
            };
            let mut decl = family.truth(player);
            let idx = free.iter().position(|c| *c == cell).unwrap();
            decl.0[idx] = v;
            let cells = family.declared_cells(player, &decl)?;
            let [a, b, c, d] = cells;
            let residual = match player {
                Player::Row => target * (a - c) + (1.0 - target) * (b - d),
                Player::Col => target * (a - b) + (1.0 - target) * (c - d),
            };
            if residual.abs() > 1e-9 * (1.0 + cells.iter().fold(0.0f64, |m, x| m.max(x.abs()))) {
                return Ok(NaturalSpaceCheck::Fail {
                    player,
                    reason: format!("generality: indifference residual {residual} at {target}"),
                });
            }
        }
        // Analyzability.
        if !family.preserves_best_replies() {
            let touches_first = free.iter().any(|c| {
                matches!(
                    (player, c),
                    (Player::Row, Cell::A | Cell::C) | (Player::Col, Cell::A | Cell::B)
                )
            });
            let touches_second = free.iter().any(|c| {
                matches!(
                    (player, c),
                    (Player::Row, Cell::B | Cell::D) | (Player::Col, Cell::C | Cell::D)
                )
            });
            if touches_first && touches_second {
                return Ok(NaturalSpaceCheck::Fail {
                    player,
                    reason: "analyzability: free cells span both best-reply comparisons, so a \
                             single sign can flip without creating dominance"
                        .into(),
                });
            }
        }
    }
    Ok(NaturalSpaceCheck::Pass)
}

// ---------------------------------------------------------------------------
// Canonical families.
// ---------------------------------------------------------------------------

/// Opposing-interests family: the row player declares cell A (true value 2),
/// the column player declares cell C (true value 3).
pub fn g_oi_family() -> ParamGame2x2 {
    ParamGame2x2::new(crate::game::g_oi_true(), vec![Cell::A], vec![Cell::C]).unwrap()
}

/// Dominance-solvable family: the row player declares cell A (true value 1),
/// the column player declares cell A (true value 3).
pub fn g_ds_family() -> ParamGame2x2 {
    ParamGame2x2::new(crate::game::g_ds_true(), vec![Cell::A], vec![Cell::A]).unwrap()
}

/// Variant of the dominance-solvable family whose row player may redeclare
/// his whole top row (cells A and B); wide enough to declare the top row
/// dominant.
pub fn g_ds_row_wide_family() -> ParamGame2x2 {
    ParamGame2x2::new(
        crate::game::g_ds_true(),
        vec![Cell::A, Cell::B],
        vec![Cell::A],
    )
    .unwrap()
}
