//! Numeric backends.
//!
//! Every closed form in the model is a rational function of `a`, `lambda` and
//! small integers, so the whole engine is generic over [`Scalar`]: `f64` for
//! speed and [`Exact`] (arbitrary-precision rationals) when a comparison must
//! be decided without tolerance.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{ModelError, Result};

/// Exact rational scalar.
pub type Exact = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericMode {
    Float64,
    ExactRational,
}

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    const MODE: NumericMode;

    fn of_int(v: i64) -> Self;

    fn of_usize(v: usize) -> Self {
        Self::of_int(i64::try_from(v).expect("count fits in i64"))
    }

    /// Converts an exact rational into this backend (rounding for `f64`).
    fn of_exact(v: &Exact) -> Self;

    fn as_f64(&self) -> f64;

    /// Exact value; `None` for non-finite floats.
    fn as_exact(&self) -> Option<Exact>;

    fn is_exact() -> bool {
        Self::MODE == NumericMode::ExactRational
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float64;

    fn of_int(v: i64) -> Self {
        v as f64
    }

    fn of_exact(v: &Exact) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn as_exact(&self) -> Option<Exact> {
        BigRational::from_float(*self)
    }
}

impl Scalar for Exact {
    const MODE: NumericMode = NumericMode::ExactRational;

    fn of_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn of_exact(v: &Exact) -> Self {
        v.clone()
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn as_exact(&self) -> Option<Exact> {
        Some(self.clone())
    }
}

pub(crate) fn int<T: Scalar>(v: i64) -> T {
    T::of_int(v)
}

pub(crate) fn count<T: Scalar>(v: usize) -> T {
    T::of_usize(v)
}

pub(crate) fn square<T: Scalar>(v: &T) -> T {
    v.clone() * v.clone()
}

pub(crate) fn half<T: Scalar>() -> T {
    T::one() / int(2)
}

/// Sum of an iterator of scalars.
pub(crate) fn sum<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

/// Parses an exact rational from `"12"`, `"-0.25"`, `"1/3"` or `"2.5e-1"`.
pub fn parse_exact(text: &str) -> Result<Exact> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ModelError::parse(text, 0, "empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_exact(num)?;
        let den = parse_exact(den)
            .map_err(|_| ModelError::parse(den, num_position(text, den), "bad denominator"))?;
        if den.is_zero() {
            return Err(ModelError::parse(text, 0, "zero denominator"));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| ModelError::parse(&s[pos + 1..], pos + 1, "bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ModelError::parse(text, 0, "no digits"));
    }
    if let Some(pos) = int_part
        .char_indices()
        .chain(frac_part.char_indices())
        .find(|(_, c)| !c.is_ascii_digit())
        .map(|(p, _)| p)
    {
        return Err(ModelError::parse(text, pos, "not a decimal number"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str_radix(&all_digits, 10)
        .map_err(|_| ModelError::parse(text, 0, "not a decimal number"))?;
    let scale = exponent - i32::try_from(frac_part.len()).unwrap_or(i32::MAX);
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

fn num_position(whole: &str, part: &str) -> usize {
    whole.find(part).unwrap_or(0)
}

/// Rounds a rational to `sigfigs` significant figures, half to even, and
/// renders it in plain decimal notation with trailing zeros removed.
/// Magnitudes below `1e-6` or from `1e21` up use scientific notation.
pub fn format_sigfigs(value: &Exact, sigfigs: usize) -> String {
    let sigfigs = sigfigs.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    // Decimal exponent e with 10^e <= |v| < 10^(e+1).
    let mut exponent = estimate_exponent(&magnitude);
    let ten = Exact::from_integer(BigInt::from(10));
    loop {
        let low = pow10(exponent, &ten);
        if magnitude < low {
            exponent -= 1;
            continue;
        }
        if magnitude >= low.clone() * ten.clone() {
            exponent += 1;
            continue;
        }
        break;
    }
    // Scale so the kept digits are the integer part.
    let shift = sigfigs as i64 - 1 - exponent;
    let scaled = magnitude * pow10(shift, &ten);
    let mut digits = round_half_even(&scaled);
    // Rounding may carry into an extra digit (9.99.. -> 10.0).
    let mut shift = shift;
    if digits.to_string().len() > sigfigs {
        digits /= BigInt::from(10);
        shift -= 1;
    }
    let exponent = sigfigs as i64 - 1 - shift;
    let text = if (-6..21).contains(&exponent) {
        render_scaled(&digits, shift)
    } else {
        format!("{}e{exponent}", render_scaled(&digits, sigfigs as i64 - 1))
    };
    if negative {
        format!("-{text}")
    } else {
        text
    }
}

fn estimate_exponent(v: &Exact) -> i64 {
    let f = v.to_f64().unwrap_or(1.0);
    if f.is_finite() && f > 0.0 {
        f.log10().floor() as i64
    } else {
        let digits_num = v.numer().to_string().len() as i64;
        let digits_den = v.denom().to_string().len() as i64;
        digits_num - digits_den
    }
}

fn pow10(exp: i64, ten: &Exact) -> Exact {
    if exp >= 0 {
        num_traits::pow(ten.clone(), exp as usize)
    } else {
        Exact::one() / num_traits::pow(ten.clone(), (-exp) as usize)
    }
}

fn round_half_even(v: &Exact) -> BigInt {
    let floor = v.floor();
    let frac = v - &floor;
    let half = Exact::new(BigInt::from(1), BigInt::from(2));
    let base = floor.to_integer();
    let odd = !(&base % BigInt::from(2)).is_zero();
    if frac > half || (frac == half && odd) {
        base + 1
    } else {
        base
    }
}

/// Renders `digits * 10^(-shift)`.
fn render_scaled(digits: &BigInt, shift: i64) -> String {
    let raw = digits.to_string();
    let text = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{raw}{zeros}")
    } else {
        let shift = shift as usize;
        if raw.len() > shift {
            let (int_part, frac_part) = raw.split_at(raw.len() - shift);
            format!("{int_part}.{frac_part}")
        } else {
            format!("0.{}{raw}", "0".repeat(shift - raw.len()))
        }
    };
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}
