//! Repeated games between regret-minimizing agents, and the declaration
//! meta-game between the users who configure those agents.
//!
//! The crate provides:
//! - game representations and parameterized families ([`game`], [`family`],
//!   [`cournot`]),
//! - closed-form and combinatorial solvers ([`equilibrium`]),
//! - learning agents and a deterministic repeated-play engine ([`agents`],
//!   [`dynamics`]),
//! - the user-level declaration game: meta-utilities, best responses,
//!   closed-form meta-equilibria, and manipulation-freeness checks
//!   ([`metagame`]).

pub mod agents;
pub mod cournot;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod family;
pub mod game;
pub mod metagame;

pub use agents::{
    external_regret, make_oscillating_schedule, oscillation_phase_lengths, AgentRuntime, AgentSpec,
    ScheduleCycle,
};
pub use cournot::{
    cournot_best_response, cournot_ne, cournot_utilities_at, CournotOutcome, CournotRegion,
    CournotScenario,
};
pub use dynamics::{
    check_approach, check_self_convergent, mape, quantity_trace_to_csv, run_cournot_dynamics,
    run_dynamics, trace_to_csv, ApproachTarget, CheckpointGrid, CournotDynamicsConfig,
    DynamicsConfig, DynamicsTrace, QuantityTrace,
};
pub use equilibrium::{
    cce_violation, is_dominance_solvable, iterated_elimination, mixed_ne_2x2, pure_ne, stackelberg,
    EliminationOrder, EliminationStep, EliminationTrace, StackelbergOutcome,
};
pub use error::{Error, Result};
pub use family::{
    g_ds_family, g_ds_row_wide_family, g_oi_family, validate_natural_space, Cell, Declaration,
    DeclarationProfile, NaturalSpaceCheck, ParamGame2x2,
};
pub use game::{
    battle_of_sexes, expected_utilities_2x2, g_ds, g_ds_true, g_oi, g_oi_true,
    joint_expected_utilities, matching_pennies, prisoners_dilemma, BimatrixGame, JointDistribution,
    MixedProfile, Player,
};
pub use metagame::{
    construct_dominant_declaration, cournot_meta_equilibrium, epsilon_equilibrium_check,
    limit_distribution, manipulation_free, meta_best_response, meta_fixed_point_search,
    meta_utility, oi_meta_equilibrium, ClassificationMethod, DominantConstruction,
    EpsilonCertificate, FixedPointOutcome, GameFamily, GridSpec, Grids, InducedOutcome,
    ManipulationReport, ManipulationWitness, MetaClassification, MetaEquilibriumReport,
    MetaGameScenario, MetaProfile, UtilityMode,
};
