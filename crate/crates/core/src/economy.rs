//! Market equilibrium of the competing-importers economy.
//!
//! Country `i` is the sole exporter of good `I`; goods are therefore indexed
//! by their exporting country and every matrix below is `n x n` over
//! countries. Entry `(j, i)` of a price or flow matrix refers to good `I` in
//! country `j`.

use crate::error::{ModelError, Result};
use crate::numeric::{count, half, int, square, sum, Scalar};
use crate::params::ModelParams;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> SquareMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                data.push(f(row, col));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn filled(n: usize, value: T) -> Self {
        SquareMatrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.n..(row + 1) * self.n]
    }
}

/// `t[i][j]`: the tariff country `i` levies on imports of good `J` from `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffProfile<T> {
    t: SquareMatrix<T>,
}

impl<T: Scalar> TariffProfile<T> {
    /// Builds a profile; `f` is only called off the diagonal.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let t = SquareMatrix::from_fn(n, |i, j| if i == j { T::zero() } else { f(i, j) });
        Self::from_matrix(t)
    }

    /// Validates an explicit matrix: zero diagonal, no negative entries.
    pub fn from_matrix(t: SquareMatrix<T>) -> Result<Self> {
        for i in 0..t.n() {
            if !t.get(i, i).is_zero() {
                return Err(ModelError::InvalidProfile(format!(
                    "t[{i}][{i}] = {:?}; the diagonal must be zero",
                    t.get(i, i)
                )));
            }
            for j in 0..t.n() {
                if t.get(i, j) < &T::zero() {
                    return Err(ModelError::InvalidProfile(format!(
                        "t[{i}][{j}] = {:?} is negative",
                        t.get(i, j)
                    )));
                }
            }
        }
        Ok(TariffProfile { t })
    }

    pub fn zero(n: usize) -> Self {
        TariffProfile {
            t: SquareMatrix::filled(n, T::zero()),
        }
    }

    /// Every off-diagonal entry equal to `tariff`.
    pub fn uniform(n: usize, tariff: T) -> Result<Self> {
        Self::from_fn(n, |_, _| tariff.clone())
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn get(&self, importer: usize, exporter: usize) -> &T {
        self.t.get(importer, exporter)
    }

    /// Sets an off-diagonal entry. Panics on the diagonal.
    pub fn set(&mut self, importer: usize, exporter: usize, tariff: T) -> Result<()> {
        assert_ne!(importer, exporter, "diagonal tariffs are fixed at zero");
        if tariff < T::zero() {
            return Err(ModelError::InvalidProfile(format!(
                "t[{importer}][{exporter}] = {tariff:?} is negative"
            )));
        }
        self.t.set(importer, exporter, tariff);
        Ok(())
    }

    /// Sum of tariffs on exporter `j` over importers other than `skip`.
    pub fn sum_on(&self, exporter: usize, skip: Option<usize>) -> T {
        sum((0..self.n())
            .filter(|&k| k != exporter && Some(k) != skip)
            .map(|k| self.get(k, exporter).clone()))
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.t
    }

    pub fn max_abs_diff(&self, other: &TariffProfile<T>) -> T {
        self.t
            .data
            .iter()
            .zip(&other.t.data)
            .map(|(x, y)| (x.clone() - y.clone()).abs())
            .fold(T::zero(), |m, d| if d > m { d } else { m })
    }
}

/// Equilibrium prices: world (exporter) prices and domestic prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSystem<T> {
    world: Vec<T>,
    domestic: SquareMatrix<T>,
}

impl<T: Scalar> PriceSystem<T> {
    /// `p_i^I`, the exporter's domestic price of good `I`.
    pub fn world(&self, good: usize) -> &T {
        &self.world[good]
    }

    /// `p_j^I`, the price of good `I` in country `j`.
    pub fn domestic(&self, country: usize, good: usize) -> &T {
        self.domestic.get(country, good)
    }

    pub fn domestic_matrix(&self) -> &SquareMatrix<T> {
        &self.domestic
    }

    pub fn n(&self) -> usize {
        self.world.len()
    }
}

/// Demand, supply and bilateral trade at an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeFlows<T> {
    /// `d_j^I` at `(j, I)`.
    pub demand: SquareMatrix<T>,
    /// `s_j^I` at `(j, I)`.
    pub supply: SquareMatrix<T>,
    /// `m_j^I` at `(j, I)`, zero on the diagonal.
    pub imports: SquareMatrix<T>,
    /// `x_j^I` at `(j, I)`: exporter `I`'s shipments to `j`, zero on the diagonal.
    pub exports: SquareMatrix<T>,
}

impl<T: Scalar> TradeFlows<T> {
    /// `sum_j d_j^I - sum_j s_j^I`.
    pub fn clearing_residual(&self, good: usize) -> T {
        let n = self.demand.n();
        sum((0..n).map(|j| self.demand.get(j, good).clone() - self.supply.get(j, good).clone()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WelfareComponents<T> {
    pub consumer_surplus: T,
    pub producer_surplus: T,
    pub tariff_revenue: T,
}

impl<T: Scalar> WelfareComponents<T> {
    pub fn total(&self) -> T {
        self.consumer_surplus.clone() + self.producer_surplus.clone() + self.tariff_revenue.clone()
    }
}

/// Per-country welfare, with the surplus decomposition when it was computed
/// from prices.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareReport<T> {
    pub welfare: Vec<T>,
    pub components: Option<Vec<WelfareComponents<T>>>,
}

impl<T: Scalar> WelfareReport<T> {
    pub fn of(&self, country: usize) -> &T {
        &self.welfare[country]
    }

    pub fn total(&self) -> T {
        sum(self.welfare.iter().cloned())
    }
}

/// Derivatives of welfare with respect to one tariff `t_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalWelfare<T> {
    /// `dW_i/dt_ij` (the tariff setter).
    pub own: T,
    /// `dW_j/dt_ij` (the targeted exporter).
    pub exporter: T,
    /// `dW_k/dt_ij` for any third country `k`.
    pub third_party: T,
    /// `dW/dt_ij` for world welfare.
    pub world: T,
}

fn check_size<T: Scalar>(params: &ModelParams<T>, t: &TariffProfile<T>) -> Result<()> {
    if t.n() != params.n() {
        return Err(ModelError::InvalidProfile(format!(
            "profile is {0}x{0} but n = {1}",
            t.n(),
            params.n()
        )));
    }
    Ok(())
}

/// Solves no-arbitrage and world market clearing for every good.
///
/// Rejects profiles that leave some importer with negative imports or some
/// price non-positive.
pub fn equilibrium_prices<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
) -> Result<PriceSystem<T>> {
    check_size(params, t)?;
    let n = params.n();
    let na = count::<T>(n) * params.a().clone();
    let denom = params.price_denominator();
    let world: Vec<T> = (0..n)
        .map(|good| (na.clone() - int::<T>(2) * t.sum_on(good, None)) / denom.clone())
        .collect();
    let domestic = SquareMatrix::from_fn(n, |country, good| {
        world[good].clone() + t.get(country, good).clone()
    });
    for country in 0..n {
        for good in 0..n {
            let price = domestic.get(country, good);
            if price <= &T::zero() {
                return Err(ModelError::NonPositivePrice {
                    country,
                    good,
                    price: format!("{price:?}"),
                });
            }
            if country != good {
                let imports = params.a().clone() - int::<T>(2) * price.clone();
                if imports < T::zero() {
                    return Err(ModelError::ProhibitiveTariff {
                        importer: country,
                        good,
                        imports: format!("{imports:?}"),
                    });
                }
            }
        }
    }
    Ok(PriceSystem { world, domestic })
}

fn supply_slope<T: Scalar>(params: &ModelParams<T>, country: usize, good: usize) -> T {
    if country == good {
        T::one() + params.lambda().clone()
    } else {
        T::one()
    }
}

/// Demand, supply, imports and exports implied by a price system.
pub fn trade_flows<T: Scalar>(params: &ModelParams<T>, prices: &PriceSystem<T>) -> TradeFlows<T> {
    let n = prices.n();
    let a = params.a();
    let demand = SquareMatrix::from_fn(n, |j, good| a.clone() - prices.domestic(j, good).clone());
    let supply = SquareMatrix::from_fn(n, |j, good| {
        supply_slope(params, j, good) * prices.domestic(j, good).clone()
    });
    let imports = SquareMatrix::from_fn(n, |j, good| {
        if j == good {
            T::zero()
        } else {
            demand.get(j, good).clone() - supply.get(j, good).clone()
        }
    });
    let exports = SquareMatrix::from_fn(n, |j, good| {
        if j == good {
            return T::zero();
        }
        let surplus = supply.get(good, good).clone() - demand.get(good, good).clone();
        let others = sum(
            (0..n)
                .filter(|&k| k != good && k != j)
                .map(|k| imports.get(k, good).clone()),
        );
        surplus - others
    });
    TradeFlows {
        demand,
        supply,
        imports,
        exports,
    }
}

/// Welfare as consumer surplus + producer surplus + tariff revenue at the
/// equilibrium prices of `t`.
pub fn welfare<T: Scalar>(params: &ModelParams<T>, t: &TariffProfile<T>) -> Result<WelfareReport<T>> {
    let prices = equilibrium_prices(params, t)?;
    Ok(welfare_at_prices(params, t, &prices))
}

pub(crate) fn welfare_at_prices<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
    prices: &PriceSystem<T>,
) -> WelfareReport<T> {
    let n = params.n();
    let a = params.a();
    let components: Vec<WelfareComponents<T>> = (0..n)
        .map(|i| {
            let mut cs = T::zero();
            let mut ps = T::zero();
            let mut revenue = T::zero();
            for good in 0..n {
                let p = prices.domestic(i, good);
                cs = cs + half::<T>() * square(&(a.clone() - p.clone()));
                ps = ps + half::<T>() * supply_slope(params, i, good) * square(p);
                if good != i {
                    revenue = revenue
                        + t.get(i, good).clone() * (a.clone() - int::<T>(2) * p.clone());
                }
            }
            WelfareComponents {
                consumer_surplus: cs,
                producer_surplus: ps,
                tariff_revenue: revenue,
            }
        })
        .collect();
    WelfareReport {
        welfare: components.iter().map(WelfareComponents::total).collect(),
        components: Some(components),
    }
}

/// Welfare from the polynomial form `r W_i(t)` in the tariffs alone, without
/// going through prices. Admissibility is still checked on the profile.
pub fn welfare_closed_form<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
) -> Result<WelfareReport<T>> {
    equilibrium_prices(params, t)?;
    let n = params.n();
    let a = params.a().clone();
    let l = params.lambda().clone();
    let al4 = int::<T>(4) * a * l.clone();
    let own_sq_coef = int::<T>(2) * square(&params.price_denominator()) - int::<T>(8);
    let r = params.r();
    let welfare = (0..n)
        .map(|i| {
            let mut v = params.free_trade_scaled();
            let mut others_sum = T::zero();
            let mut others_sq = T::zero();
            for j in (0..n).filter(|&j| j != i) {
                let others_on_j = t.sum_on(j, Some(i));
                let tij = t.get(i, j).clone();
                v = v + tij.clone() * (al4.clone() + int::<T>(16) * others_on_j.clone());
                v = v - square(&tij) * own_sq_coef.clone();
                others_sq = others_sq + square(&others_on_j);
                others_sum = others_sum + others_on_j;
            }
            let on_i = t.sum_on(i, None);
            v = v + int::<T>(4) * (int::<T>(2) + l.clone()) * square(&on_i);
            v = v - al4.clone() * count::<T>(n - 1) * on_i;
            v = v + al4.clone() * others_sum + int::<T>(8) * others_sq;
            v / r.clone()
        })
        .collect();
    Ok(WelfareReport {
        welfare,
        components: None,
    })
}

/// Analytic welfare derivatives with respect to `t_ij`.
pub fn marginal_welfare<T: Scalar>(
    params: &ModelParams<T>,
    t: &TariffProfile<T>,
    i: usize,
    j: usize,
) -> Result<MarginalWelfare<T>> {
    params.check_pair(i, j)?;
    check_size(params, t)?;
    let denom = params.price_denominator();
    let a = params.a().clone();
    let pj = (count::<T>(params.n()) * a.clone() - int::<T>(2) * t.sum_on(j, None)) / denom.clone();
    let tij = t.get(i, j).clone();
    let scale = int::<T>(2) / denom.clone();
    let third_party = scale.clone() * (a.clone() - int::<T>(2) * pj.clone());
    let own = -int::<T>(2) * tij.clone() + third_party.clone();
    let exporter =
        scale.clone() * (a.clone() - (int::<T>(2) + params.lambda().clone()) * pj.clone());
    let world = -int::<T>(2) * tij
        + scale * (count::<T>(params.n()) * a - denom * pj);
    Ok(MarginalWelfare {
        own,
        exporter,
        third_party,
        world,
    })
}
