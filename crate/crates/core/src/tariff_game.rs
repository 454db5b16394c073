//! The simultaneous non-cooperative tariff game and its world optimum.

use crate::economy::{self, SquareMatrix, TariffProfile};
use crate::error::{ModelError, Result};
use crate::numeric::{count, int, square, Scalar};
use crate::params::ModelParams;

/// Symmetric Nash equilibrium of the tariff game.
#[derive(Debug, Clone, PartialEq)]
pub struct NashSolution<T> {
    /// Common equilibrium tariff `t^NE`.
    pub tariff: T,
    pub profile: TariffProfile<T>,
    /// Welfare of every country at the equilibrium.
    pub welfare: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for IterationSettings {
    fn default() -> Self {
        IterationSettings {
            tol: 1e-12,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IteratedProfile {
    pub profile: TariffProfile<f64>,
    /// Number of sweeps that changed the profile by at least `tol`.
    pub iterations: usize,
    pub last_step: f64,
}

/// Country `i`'s optimal tariff on `j` given the other importers' tariffs on `j`.
pub fn best_response<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    params.check_pair(i, j)?;
    Ok(best_response_unchecked(params, t, i, j))
}

fn best_response_unchecked<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
    i: usize,
    j: usize,
) -> T {
    let slope = square(&params.price_denominator()) - int::<T>(4);
    (params.a().clone() * params.lambda().clone() + int::<T>(4) * t.sum_on(j, Some(i))) / slope
}

/// `t^NE = a lambda / (lambda^2 + 4 n lambda + 4 (n^2 - n + 1))`.
pub fn nash_tariff<T: Scalar>(params: &ModelParams<T>) -> T {
    params.a().clone() * params.lambda().clone() / params.tariff_denominator(params.n() - 1)
}

/// Nash welfare: free-trade welfare less `(n-1)(2+lambda)/(2n+lambda) (t^NE)^2`.
pub fn nash_welfare<T: Scalar>(params: &ModelParams<T>) -> T {
    let loss = count::<T>(params.n() - 1) * (int::<T>(2) + params.lambda().clone())
        / params.price_denominator()
        * square(&nash_tariff(params));
    params.free_trade_welfare() - loss
}

pub fn nash_closed_form<T: Scalar>(params: &ModelParams<T>) -> NashSolution<T> {
    let tariff = nash_tariff(params);
    let profile =
        TariffProfile::uniform(params.n(), tariff.clone()).expect("Nash tariff is positive");
    NashSolution {
        tariff,
        profile,
        welfare: nash_welfare(params),
    }
}

/// Jacobi best-response iteration from `initial` until the sup-norm step
/// falls below `tol`.
pub fn nash_by_iteration(
    params: &ModelParams<f64>,
    initial: &TariffProfile<f64>,
    settings: IterationSettings,
) -> Result<(NashSolution<f64>, usize)> {
    let result = constrained_best_response_iteration(params, initial, |_, _| false, settings)?;
    let n = params.n();
    let tariff = if n > 1 { *result.profile.get(0, 1) } else { 0.0 };
    let welfare = economy::welfare(params, &result.profile)?.welfare[0];
    Ok((
        NashSolution {
            tariff,
            profile: result.profile,
            welfare,
        },
        result.iterations,
    ))
}

/// Jacobi best-response iteration in which coordinates for which
/// `pinned(i, j)` holds stay at zero (internal tariffs of an agreement).
pub fn constrained_best_response_iteration(
    params: &ModelParams<f64>,
    initial: &TariffProfile<f64>,
    pinned: impl Fn(usize, usize) -> bool,
    settings: IterationSettings,
) -> Result<IteratedProfile> {
    if !(settings.tol > 0.0) {
        return Err(ModelError::InvalidParams(format!(
            "tolerance {} must be positive",
            settings.tol
        )));
    }
    let n = params.n();
    if initial.n() != n {
        return Err(ModelError::InvalidProfile(format!(
            "initial profile is {0}x{0} but n = {n}",
            initial.n()
        )));
    }
    let mut current = TariffProfile::from_fn(n, |i, j| {
        if pinned(i, j) {
            0.0
        } else {
            *initial.get(i, j)
        }
    })?;
    let mut iterations = 0;
    loop {
        let next = TariffProfile::from_fn(n, |i, j| {
            if pinned(i, j) {
                0.0
            } else {
                best_response_unchecked(params, &current, i, j)
            }
        })?;
        let step = next.max_abs_diff(&current);
        current = next;
        if step < settings.tol {
            return Ok(IteratedProfile {
                profile: current,
                iterations,
                last_step: step,
            });
        }
        iterations += 1;
        if iterations >= settings.max_iters {
            return Err(ModelError::NoConvergence {
                iterations,
                last_step: step,
            });
        }
    }
}

/// World welfare `sum_i W_i(t)`.
pub fn total_welfare<T: Scalar>(params: &ModelParams<T>, t: &TariffProfile<T>) -> Result<T> {
    Ok(economy::welfare(params, t)?.total())
}

/// Residuals `t_ij - (2/(2n+lambda)) sum_{k != j} t_kj` of the world-welfare
/// first-order conditions; zero on the diagonal.
pub fn world_optimum_residuals<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
) -> SquareMatrix<T> {
    let scale = int::<T>(2) / params.price_denominator();
    SquareMatrix::from_fn(params.n(), |i, j| {
        if i == j {
            T::zero()
        } else {
            t.get(i, j).clone() - scale.clone() * t.sum_on(j, None)
        }
    })
}

/// `d^2 W_i / dt_ij^2 = -2 + 8/(2n+lambda)^2`; negative for every admissible
/// parameter set, so the first-order conditions pick a maximum.
pub fn own_tariff_curvature<T: Scalar>(params: &ModelParams<T>) -> T {
    -int::<T>(2) + int::<T>(8) / square(&params.price_denominator())
}
