//! Competing-importers trade model and the sequential formation game for
//! free trade agreements.
//!
//! * [`economy`]: equilibrium prices, trade flows, welfare and its gradients
//!   for any tariff profile.
//! * [`tariff_game`]: Nash equilibrium of the simultaneous tariff game and
//!   the world-welfare optimum.
//! * [`regime`]: equilibrium tariffs and welfare under (possibly
//!   overlapping) FTA regimes.
//! * [`sequential`]: the sequential formation game under the two
//!   open-access rules, in closed form and by exhaustive backward induction.
//! * [`customs`] and [`stability`]: customs-union tariffs and pairwise
//!   stability of agreement networks.
//!
//! All computations are generic over [`Scalar`], implemented for `f64` and
//! for exact rationals ([`Exact`]).

// `!(x > y)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod customs;
pub mod economy;
pub mod error;
pub mod numeric;
pub mod params;
pub mod regime;
pub mod sequential;
pub mod stability;
pub mod tariff_game;

pub use customs::{cu_group_welfare_gradient, cu_tariffs, CuRegime};
pub use economy::{
    equilibrium_prices, marginal_welfare, trade_flows, welfare, welfare_closed_form,
    MarginalWelfare, PriceSystem, SquareMatrix, TariffProfile, TradeFlows, WelfareComponents,
    WelfareReport,
};
pub use error::{ModelError, Result};
pub use numeric::{format_sigfigs, parse_exact, Exact, NumericMode, Scalar};
pub use params::ModelParams;
pub use regime::{
    outsider_sets, regime_tariffs, regime_welfare, single_fta_welfare, trade_effect_report,
    FtaRegime, OutsiderIndex, SingleFtaWelfare, TradeEffectReport,
};
pub use sequential::{
    backward_induction, continuation_value, optimal_size, solve_closed_form, AccessRule,
    Decision, MoveOrder, SpeOutcome, Vote,
};
pub use stability::{pairwise_stability, StabilityVerdict};
pub use tariff_game::{
    best_response, nash_by_iteration, nash_closed_form, world_optimum_residuals,
    IterationSettings, NashSolution,
};
