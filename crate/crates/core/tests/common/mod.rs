#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradebloc_core::{parse_exact, Exact, ModelParams, Scalar, TariffProfile};

pub const GRID_N: std::ops::RangeInclusive<usize> = 3..=12;
pub const GRID_LAMBDA: [&str; 4] = ["1/2", "1", "4", "36"];
pub const GRID_A: [&str; 2] = ["1", "12"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn exact(text: &str) -> Exact {
    parse_exact(text).unwrap()
}

pub fn exact_params(n: usize, a: &str, lambda: &str) -> ModelParams<Exact> {
    ModelParams::new(n, exact(a), exact(lambda)).unwrap()
}

/// Every (n, a, lambda) combination of the standard verification grid.
pub fn exact_grid() -> Vec<ModelParams<Exact>> {
    let mut out = Vec::new();
    for n in GRID_N {
        for lambda in GRID_LAMBDA {
            for a in GRID_A {
                out.push(exact_params(n, a, lambda));
            }
        }
    }
    out
}

pub fn float_grid() -> Vec<ModelParams<f64>> {
    exact_grid().iter().map(ModelParams::to_f64).collect()
}

/// Largest tariff for which no profile can be prohibitive: imports at zero
/// tariffs are `a lambda/(2n+lambda)` and tariffs only lower world prices.
pub fn safe_bound<T: Scalar>(p: &ModelParams<T>) -> T {
    p.a().clone() * p.lambda().clone() / (T::of_int(2) * p.price_denominator())
}

/// Random admissible profile with entries on a 1/1000 lattice of the safe bound.
pub fn random_profile<T: Scalar>(p: &ModelParams<T>, rng: &mut impl Rng) -> TariffProfile<T> {
    let bound = safe_bound(p);
    TariffProfile::from_fn(p.n(), |_, _| {
        let k: i64 = rng.gen_range(0..=1000);
        bound.clone() * T::of_int(k) / T::of_int(1000)
    })
    .unwrap()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}
