use crate::error::{ModelError, Result};
use crate::numeric::{count, int, square, NumericMode, Scalar};

/// World size `n`, demand intercept `a` and comparative-advantage degree
/// `lambda` of the symmetric competing-importers economy.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    n: usize,
    a: T,
    lambda: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Requires `n >= 3`, `a > 0` and `lambda > 0`.
    pub fn new(n: usize, a: T, lambda: T) -> Result<Self> {
        if n < 3 {
            return Err(ModelError::InvalidParams(format!(
                "n = {n}; at least 3 countries are required (use the two-country override for n = 2)"
            )));
        }
        Self::checked(n, a, lambda)
    }

    /// Like [`ModelParams::new`] but also admits `n = 2`. The formulas stay
    /// well defined there, but several results about the formation game
    /// assume three or more countries.
    pub fn with_two_country_override(n: usize, a: T, lambda: T) -> Result<Self> {
        if n < 2 {
            return Err(ModelError::InvalidParams(format!("n = {n}; need at least 2 countries")));
        }
        if n == 2 {
            log::warn!("running with n = 2: formation-game results assume n >= 3");
        }
        Self::checked(n, a, lambda)
    }

    fn checked(n: usize, a: T, lambda: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(ModelError::InvalidParams(format!("a = {a:?} must be positive")));
        }
        if !(lambda > T::zero()) {
            return Err(ModelError::InvalidParams(format!(
                "lambda = {lambda:?} must be positive"
            )));
        }
        Ok(ModelParams { n, a, lambda })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn lambda(&self) -> &T {
        &self.lambda
    }

    pub fn numeric_mode(&self) -> NumericMode {
        T::MODE
    }

    /// `2n + lambda`, the common denominator of every equilibrium price.
    pub fn price_denominator(&self) -> T {
        count::<T>(2 * self.n) + self.lambda.clone()
    }

    /// `r = 2(2n + lambda)^2`, the scale of the closed-form welfare polynomials.
    pub fn r(&self) -> T {
        int::<T>(2) * square(&self.price_denominator())
    }

    /// `lambda^2 + 4 n lambda + 4 (n^2 - outsiders)`: the denominator of the
    /// equilibrium tariff on a country that shares no agreement with
    /// `outsiders` others.
    pub fn tariff_denominator(&self, outsiders: usize) -> T {
        let n = self.n as i64;
        let l = &self.lambda;
        square(l)
            + int::<T>(4 * n) * l.clone()
            + int::<T>(4) * (int::<T>(n * n) - count::<T>(outsiders))
    }

    /// The world-wide free-trade welfare `n a^2 (n + lambda) / (2 (2n + lambda))`.
    pub fn free_trade_welfare(&self) -> T {
        let n: T = count(self.n);
        n.clone() * square(&self.a) * (n + self.lambda.clone())
            / (int::<T>(2) * self.price_denominator())
    }

    /// `n a^2 (n + lambda)(2n + lambda)`, the tariff-free term of `r W_i`.
    pub(crate) fn free_trade_scaled(&self) -> T {
        let n: T = count(self.n);
        n.clone() * square(&self.a) * (n + self.lambda.clone()) * self.price_denominator()
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams {
            n: self.n,
            a: self.a.as_f64(),
            lambda: self.lambda.as_f64(),
        }
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(ModelError::Index { i, j, n: self.n });
        }
        Ok(())
    }
}

impl ModelParams<f64> {
    /// `(n, a, lambda) = (8, 12, 36)`.
    pub fn example() -> Self {
        ModelParams::new(8, 12.0, 36.0).expect("example parameters are valid")
    }
}

impl ModelParams<crate::numeric::Exact> {
    pub fn example_exact() -> Self {
        ModelParams::new(8, int(12), int(36)).expect("example parameters are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Exact;

    #[test]
    fn rejects_small_worlds_and_nonpositive_constants() {
        assert!(ModelParams::new(2, 12.0, 36.0).is_err());
        assert!(ModelParams::new(8, 0.0, 36.0).is_err());
        assert!(ModelParams::new(8, 12.0, -1.0).is_err());
        assert!(ModelParams::new(8, 12.0, f64::NAN).is_err());
        assert!(ModelParams::with_two_country_override(2, 12.0, 36.0).is_ok());
        assert!(ModelParams::with_two_country_override(1, 12.0, 36.0).is_err());
    }

    #[test]
    fn derived_constants_at_example() {
        let p = ModelParams::example_exact();
        assert_eq!(p.price_denominator(), int::<Exact>(52));
        assert_eq!(p.r(), int::<Exact>(2 * 52 * 52));
        // lambda^2 + 4 n lambda + 4 (n^2 - n + 1) = 1296 + 1152 + 228
        assert_eq!(p.tariff_denominator(7), int::<Exact>(2676));
        assert_eq!(
            p.free_trade_welfare(),
            Exact::new(6336.into(), 13.into())
        );
        assert_eq!(p.numeric_mode(), NumericMode::ExactRational);
    }
}
