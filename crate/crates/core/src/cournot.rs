//! Two-firm Cournot competition with linear demand and linear costs.
//!
//! With quantities `q1, q2` the market price is `a - b(q1 + q2)` and firm `i`
//! earns `q_i (a - b(q1 + q2) - c_i)`. Declared costs above `a` are
//! equivalent to declaring `a` (zero production), so utilities clamp there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Market parameters and true per-unit production costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CournotScenario {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CournotScenario {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidGame(
                "demand parameters must be positive".into(),
            ));
        }
        if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::InvalidGame(
                "production costs must be nonnegative".into(),
            ));
        }
        Ok(CournotScenario { a, b, c1, c2 })
    }

    pub fn true_costs(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    /// Per-round utility of firm `i` at quantities `(q1, q2)` and unit cost.
    pub fn utility(&self, own_q: f64, other_q: f64, cost: f64) -> f64 {
        own_q * (self.a - self.b * (own_q + other_q) - cost)
    }
}

/// Which of the four cost regions the equilibrium falls in:
/// A — both firms produce, B — only firm 1, C — only firm 2, D — neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CournotRegion {
    A,
    B,
    C,
    D,
}

/// The Nash equilibrium of a Cournot game at some pair of unit costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CournotOutcome {
    pub q1: f64,
    pub q2: f64,
    pub price: f64,
    pub u1: f64,
    pub u2: f64,
    pub region: CournotRegion,
}

/// Nash equilibrium quantities of the game at unit costs `(x1, x2)`, with
/// utilities also evaluated at those costs.
///
/// Interior region: `q_i = (a + x_j - 2 x_i) / (3b)`, requiring both
/// numerators positive. If firm `i`'s interior quantity is nonpositive it
/// stays out and the other firm plays the monopoly quantity `(a - x_j)/(2b)`
/// (when `x_j < a`). Boundary ties resolve toward the interior formulas,
/// which coincide with the monopoly formulas there.
pub fn cournot_ne(scn: &CournotScenario, costs: (f64, f64)) -> CournotOutcome {
    let (a, b) = (scn.a, scn.b);
    let (x1, x2) = costs;
    let n1 = a + x2 - 2.0 * x1; // 3b * interior q1
    let n2 = a + x1 - 2.0 * x2;

    let (q1, q2, region) = if n1 >= 0.0 && n2 >= 0.0 {
        let region = if n1 > 0.0 && n2 > 0.0 {
            CournotRegion::A
        } else if n1 > 0.0 {
            CournotRegion::B
        } else if n2 > 0.0 {
            CournotRegion::C
        } else {
            CournotRegion::D
        };
        (n1 / (3.0 * b), n2 / (3.0 * b), region)
    } else if n2 < 0.0 && x1 < a {
        // Firm 2's interior quantity is negative: firm 1 alone.
        ((a - x1) / (2.0 * b), 0.0, CournotRegion::B)
    } else if n1 < 0.0 && x2 < a {
        (0.0, (a - x2) / (2.0 * b), CournotRegion::C)
    } else {
        (0.0, 0.0, CournotRegion::D)
    };

    let price = a - b * (q1 + q2);
    CournotOutcome {
        q1,
        q2,
        price,
        u1: q1 * (price - x1),
        u2: q2 * (price - x2),
        region,
    }
}

/// User utilities when the agents settle on the Nash equilibrium of the game
/// with declared costs `(x1, x2)` while production is costed at the true
/// costs. Declarations above `a` clamp to `a`.
pub fn cournot_utilities_at(
    scn: &CournotScenario,
    true_costs: (f64, f64),
    declared: (f64, f64),
) -> (f64, f64) {
    let x1 = declared.0.clamp(0.0, scn.a);
    let x2 = declared.1.clamp(0.0, scn.a);
    let out = cournot_ne(scn, (x1, x2));
    (
        out.q1 * (out.price - true_costs.0),
        out.q2 * (out.price - true_costs.1),
    )
}

/// Analytic best reply of `player` (0 or 1) in the declaration meta-game,
/// given the opponent's declared cost. Compares the interior stationary
/// declaration, the drive-out boundary `2 x_opp - a`, the monopoly-optimal
/// truth, zero, and staying out; returns the declaration and its utility.
pub fn cournot_best_response(
    scn: &CournotScenario,
    true_costs: (f64, f64),
    player: usize,
    opp_declared: f64,
) -> (f64, f64) {
    let a = scn.a;
    let c_own = if player == 0 {
        true_costs.0
    } else {
        true_costs.1
    };
    let x_opp = opp_declared.clamp(0.0, a);

    let mut candidates = vec![0.0, c_own.min(a), a];
    // Interior stationary point of the region-A utility.
    candidates.push(((6.0 * c_own - a - x_opp) / 4.0).clamp(0.0, a));
    // Monopoly branch: any x <= 2 x_opp - a keeps the opponent out; the
    // unconstrained optimum there is the truth.
    let drive_out = 2.0 * x_opp - a;
    if drive_out >= 0.0 {
        candidates.push(drive_out.min(a));
        candidates.push(c_own.clamp(0.0, drive_out.min(a)));
    }

    let eval = |x: f64| {
        let declared = if player == 0 { (x, x_opp) } else { (x_opp, x) };
        let u = cournot_utilities_at(scn, true_costs, declared);
        if player == 0 {
            u.0
        } else {
            u.1
        }
    };
    let mut best = (candidates[0], eval(candidates[0]));
    for &x in &candidates[1..] {
        let u = eval(x);
        let better = u > best.1 + 1e-15
            || (u >= best.1 - 1e-15 && (x - c_own).abs() < (best.0 - c_own).abs());
        if better {
            best = (x, u);
        }
    }
    best
}
