//! The two arithmetic worlds: native binary64 with round-to-nearest-even and a
//! high-precision binary float standing in for the reals. Also the relative
//! precision metric and the rounding-model constants.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::typecheck::Grade;

/// Significand bits used for the ideal semantics unless configured otherwise.
pub const DEFAULT_IDEAL_BITS: usize = 256;
/// Lower limit for the ideal precision.
pub const MIN_IDEAL_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("allocating astro-float constant cache"));
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("floating-point overflow in {0}")]
    Overflow(ArithOp),
    #[error("{0} produced NaN")]
    NaN(ArithOp),
    #[error("non-finite number {0}")]
    NonFinite(String),
    #[error("invalid unit roundoff `{0}`: {1}")]
    BadRoundoff(String, &'static str),
    #[error("ideal precision must be at least {MIN_IDEAL_BITS} bits, got {0}")]
    BadPrecision(usize),
}

/// The four rounded arithmetic operations of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "add",
            ArithOp::Sub => "sub",
            ArithOp::Mul => "mul",
            ArithOp::Div => "div",
        })
    }
}

/// Result of an arithmetic operation. Division by zero is a value, not an
/// error: it is how `div` lands in the `unit` side of `num + unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<N> {
    Value(N),
    DivByZero,
}

/// Unit roundoff and ideal precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingConfig {
    pub unit_roundoff: BigRational,
    pub ideal_bits: usize,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            unit_roundoff: pow2(-53),
            ideal_bits: DEFAULT_IDEAL_BITS,
        }
    }
}

impl RoundingConfig {
    pub fn new(unit_roundoff: BigRational, ideal_bits: usize) -> Result<Self, NumError> {
        if !unit_roundoff.is_positive() || unit_roundoff >= BigRational::one() {
            return Err(NumError::BadRoundoff(
                unit_roundoff.to_string(),
                "must lie strictly between 0 and 1",
            ));
        }
        if ideal_bits < MIN_IDEAL_BITS {
            return Err(NumError::BadPrecision(ideal_bits));
        }
        Ok(RoundingConfig {
            unit_roundoff,
            ideal_bits,
        })
    }

    /// Config with `u = 2^k`.
    pub fn power_of_two(k: i64) -> Self {
        RoundingConfig {
            unit_roundoff: pow2(k),
            ..Default::default()
        }
    }

    pub fn eps(&self) -> BigRational {
        eps_value(self)
    }
}

/// `eps = u / (1 - u)`, the per-operation relative error bound of the
/// exponential rounding model.
pub fn eps_value(cfg: &RoundingConfig) -> BigRational {
    let u = &cfg.unit_roundoff;
    u / (BigRational::one() - u)
}

/// Exact `2^k`.
pub fn pow2(k: i64) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Parses a unit roundoff written as `2^-53`, `1/16777216`, `0.5` or `1e-3`.
pub fn parse_uroundoff(text: &str) -> Result<BigRational, NumError> {
    let s = text.trim();
    let bad = |why| NumError::BadRoundoff(text.to_string(), why);
    let value = if let Some(exp) = s.strip_prefix("2^") {
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        let k: i64 = exp.parse().map_err(|_| bad("exponent is not an integer"))?;
        if k.unsigned_abs() > 100_000 {
            return Err(bad("exponent out of range"));
        }
        pow2(k)
    } else if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        BigRational::new(n, d)
    } else {
        parse_decimal(s).ok_or_else(|| bad("not a number"))?
    };
    RoundingConfig::new(value.clone(), DEFAULT_IDEAL_BITS)?;
    Ok(value)
}

/// Exact rational value of a plain decimal literal such as `0.125` or `2.5e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return None;
    }
    let ten = BigInt::from(10u32);
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(digits * p)
    } else {
        BigRational::new(digits, p)
    })
}

/// Renders a rational in scientific notation with three significant digits,
/// e.g. `5.55e-14`. Zero renders as `0.00e0`.
pub fn format_sci3(q: &BigRational) -> String {
    if q.is_zero() {
        return "0.00e0".to_string();
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let (m, e) = sig_digits(&q.abs(), 3);
    let digits = m.to_string();
    format!("{sign}{}.{}e{e}", &digits[..1], &digits[1..])
}

fn pow10(k: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10u32), k.unsigned_abs() as usize);
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Positive `x` rounded to `n` significant decimal digits: `(m, e)` with
/// `x ~ m * 10^(e - n + 1)` and `m` exactly `n` digits long.
fn sig_digits(x: &BigRational, n: usize) -> (BigInt, i64) {
    // Estimate the decimal exponent from bit lengths, then correct it.
    let bits = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10(e) > *x {
        e -= 1;
    }
    while pow10(e + 1) <= *x {
        e += 1;
    }
    let scaled = x * pow10(n as i64 - 1 - e);
    let mut m = round_half_even(&scaled);
    if m == num_traits::pow(BigInt::from(10u32), n) {
        m /= 10u32;
        e += 1;
    }
    (m, e)
}

/// Decimal text with `n` significant digits, trailing zeros removed;
/// positional for moderate exponents, scientific otherwise.
fn format_decimal(q: &BigRational, n: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let (m, e) = sig_digits(&q.abs(), n);
    let digits = m.to_string();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let len = digits.len() as i64;
    if (-7..21).contains(&e) {
        if e < 0 {
            format!("{sign}0.{}{digits}", "0".repeat((-e - 1) as usize))
        } else if len <= e + 1 {
            format!("{sign}{digits}{}", "0".repeat((e + 1 - len) as usize))
        } else {
            let (int, frac) = digits.split_at((e + 1) as usize);
            format!("{sign}{int}.{frac}")
        }
    } else if len == 1 {
        format!("{sign}{digits}e{e}")
    } else {
        format!("{sign}{}.{}e{e}", &digits[..1], &digits[1..])
    }
}

/// Significant digits in the exact decimal expansion of a dyadic rational.
fn exact_digits(q: &BigRational) -> usize {
    let k = q.denom().bits().saturating_sub(1) as usize;
    let digits = (q.numer().magnitude() * num_traits::pow(BigUint::from(5u32), k)).to_string();
    digits.trim_end_matches('0').len().max(1)
}

fn round_half_even(q: &BigRational) -> BigInt {
    let (fl, rem) = q.numer().div_mod_floor(q.denom());
    let twice = rem * 2u32;
    match twice.cmp(q.denom()) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1u32,
        Ordering::Equal if fl.is_even() => fl,
        Ordering::Equal => fl + 1u32,
    }
}

/// `g * eps` under `cfg`, with three significant digits.
pub fn grade_to_decimal(g: &Grade, cfg: &RoundingConfig) -> String {
    format_sci3(&(g.coeff() * eps_value(cfg)))
}

/// Correctly rounded binary64 operation.
pub fn approx_op(op: ArithOp, a: f64, b: f64) -> Result<Outcome<f64>, NumError> {
    if !a.is_finite() {
        return Err(NumError::NonFinite(a.to_string()));
    }
    if !b.is_finite() {
        return Err(NumError::NonFinite(b.to_string()));
    }
    let r = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div if b == 0.0 => return Ok(Outcome::DivByZero),
        ArithOp::Div => a / b,
    };
    if r.is_nan() {
        Err(NumError::NaN(op))
    } else if r.is_infinite() {
        Err(NumError::Overflow(op))
    } else {
        Ok(Outcome::Value(r))
    }
}

/// The same operation at `bits` significand bits, rounded to nearest.
pub fn ideal_op(op: ArithOp, a: &BigNum, b: &BigNum, bits: usize) -> Outcome<BigNum> {
    match op {
        ArithOp::Add => Outcome::Value(a.add(b, bits)),
        ArithOp::Sub => Outcome::Value(a.sub(b, bits)),
        ArithOp::Mul => Outcome::Value(a.mul(b, bits)),
        ArithOp::Div if b.is_zero() => Outcome::DivByZero,
        ArithOp::Div => Outcome::Value(a.div(b, bits)),
    }
}

/// Arbitrary-precision binary floating-point number. Always finite.
#[derive(Clone, Debug)]
pub struct BigNum(BigFloat);

impl BigNum {
    pub fn zero() -> Self {
        BigNum(BigFloat::from_word(0, 64))
    }

    pub fn one() -> Self {
        BigNum(BigFloat::from_word(1, 64))
    }

    /// Exact conversion of a finite binary64 value. `-0.0` becomes `+0`.
    pub fn from_f64(f: f64) -> Result<Self, NumError> {
        if !f.is_finite() {
            return Err(NumError::NonFinite(f.to_string()));
        }
        if f == 0.0 {
            return Ok(Self::zero());
        }
        if f.is_subnormal() {
            // astro-float misplaces the exponent of subnormals by one; go
            // through the exact integer significand instead
            let m = BigRational::from_integer(BigInt::from(f.abs().to_bits())) * pow2(-1074);
            let m = if f < 0.0 { -m } else { m };
            return Ok(Self::from_rational(&m, 64));
        }
        Ok(BigNum(BigFloat::from_f64(f, 64)))
    }

    pub fn from_i64(i: i64) -> Self {
        BigNum(BigFloat::from_i64(i, 64))
    }

    /// `q` rounded to nearest at `bits` bits.
    pub fn from_rational(q: &BigRational, bits: usize) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let n = bigint_to_float(q.numer());
        let d = bigint_to_float(q.denom());
        BigNum(n.div(&d, bits, RM))
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> BigRational {
        let Some((words, _, sign, e, _)) = self.0.as_raw_parts() else {
            return BigRational::zero();
        };
        if self.0.is_zero() {
            return BigRational::zero();
        }
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        let m = BigUint::from_bytes_le(&bytes);
        let s = if sign == Sign::Neg {
            IntSign::Minus
        } else {
            IntSign::Plus
        };
        let int = BigRational::from_integer(BigInt::from_biguint(s, m));
        int * pow2(e as i64 - (words.len() * WORD_BIT_SIZE) as i64)
    }

    /// Nearest binary64 value (ties to even). Overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        let Some((words, _, sign, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        if self.0.is_zero() {
            return 0.0;
        }
        // Top 64 significand bits plus a sticky bit for everything below.
        let mut hi: u64 = 0;
        let mut taken = 0;
        let mut sticky = false;
        for w in words.iter().rev() {
            for bit in (0..WORD_BIT_SIZE).rev() {
                let b = (*w >> bit) & 1 == 1;
                if taken < 64 {
                    hi = (hi << 1) | b as u64;
                    taken += 1;
                } else if b {
                    sticky = true;
                }
            }
        }
        hi <<= 64 - taken;
        // value = hi * 2^(e - 64), hi in [2^63, 2^64)
        let e = e as i64;
        let magnitude = if e >= -1021 {
            if e > 1025 {
                f64::INFINITY
            } else {
                let r = (hi | sticky as u64) as f64;
                let k = e - 64;
                r * f64_pow2(k / 2) * f64_pow2(k - k / 2)
            }
        } else {
            // Subnormal range: round hi * 2^(e-64) to a multiple of 2^-1074.
            let shift = (-(e - 64 + 1074)) as u32;
            if shift >= 66 {
                0.0
            } else {
                let wide = (hi as u128) << 2;
                let s = shift + 2;
                let q = wide >> s;
                let rem = wide & ((1u128 << s) - 1);
                let half = 1u128 << (s - 1);
                let up = rem > half || (rem == half && (sticky || q & 1 == 1));
                let q = q as u64 + up as u64;
                f64::from_bits(q)
            }
        };
        if sign == Sign::Neg {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn add(&self, o: &BigNum, bits: usize) -> BigNum {
        BigNum(self.0.add(&o.0, bits, RM))
    }

    pub fn sub(&self, o: &BigNum, bits: usize) -> BigNum {
        BigNum(self.0.sub(&o.0, bits, RM))
    }

    pub fn mul(&self, o: &BigNum, bits: usize) -> BigNum {
        BigNum(self.0.mul(&o.0, bits, RM))
    }

    /// Division; the caller guarantees `o != 0`.
    pub fn div(&self, o: &BigNum, bits: usize) -> BigNum {
        debug_assert!(!o.is_zero());
        BigNum(self.0.div(&o.0, bits, RM))
    }

    /// Square root of a nonnegative number.
    pub fn sqrt(&self, bits: usize) -> BigNum {
        debug_assert!(!self.is_negative());
        BigNum(self.0.sqrt(bits, RM))
    }

    /// Natural logarithm of a positive number.
    pub fn ln(&self, bits: usize) -> BigNum {
        BigNum(CONSTS.with(|cc| self.0.ln(bits, RM, &mut cc.borrow_mut())))
    }

    pub fn exp(&self, bits: usize) -> BigNum {
        BigNum(CONSTS.with(|cc| self.0.exp(bits, RM, &mut cc.borrow_mut())))
    }

    pub fn neg(&self) -> BigNum {
        BigNum(self.0.neg())
    }

    pub fn abs(&self) -> BigNum {
        BigNum(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True for numbers strictly below zero.
    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    /// Exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.0.is_zero() {
            None
        } else {
            self.0.exponent().map(|e| e as i64)
        }
    }

    pub fn total_cmp(&self, o: &BigNum) -> Ordering {
        match self.0.cmp(&o.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            Some(_) => Ordering::Greater,
            None => unreachable!("BigNum is always finite"),
        }
    }

    /// Decimal rendering with enough significant digits to identify the
    /// value at its own precision.
    pub fn to_decimal(&self) -> String {
        let q = self.to_rational();
        if q.is_zero() {
            return "0".to_string();
        }
        // significant bits of the binary significand
        let mut mant = q.numer().magnitude().clone();
        let tz = mant.trailing_zeros().unwrap_or(0);
        mant >>= tz;
        let bits = mant.bits().max(1) as f64;
        let n = (bits * std::f64::consts::LOG10_2).ceil() as usize + 1;
        // short dyadics such as 0.375 are printed exactly
        let exact = exact_digits(&q);
        format_decimal(&q, if exact <= n.max(17) { exact } else { n })
    }
}

impl PartialEq for BigNum {
    fn eq(&self, o: &Self) -> bool {
        self.total_cmp(o) == Ordering::Equal
    }
}

impl fmt::Display for BigNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

fn f64_pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

fn bigint_to_float(i: &BigInt) -> BigFloat {
    let (sign, mag) = i.to_bytes_le();
    let wb = std::mem::size_of::<Word>();
    let words: Vec<Word> = mag
        .chunks(wb)
        .map(|c| {
            let mut buf = [0u8; std::mem::size_of::<Word>()];
            buf[..c.len()].copy_from_slice(c);
            Word::from_le_bytes(buf)
        })
        .collect();
    let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, s, (words.len() * WORD_BIT_SIZE) as i32)
}

/// A nonnegative extended real: finite or `+inf`.
#[derive(Clone, Debug)]
pub enum Distance {
    Finite(BigNum),
    Infinite,
}

impl Distance {
    pub fn zero() -> Self {
        Distance::Finite(BigNum::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Distance::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Distance::Finite(d) if d.is_zero())
    }

    /// `inf + a = inf`.
    pub fn add(&self, o: &Distance, bits: usize) -> Distance {
        match (self, o) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a.add(b, bits)),
            _ => Distance::Infinite,
        }
    }

    pub fn max(self, o: Distance) -> Distance {
        if self.cmp(&o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn cmp(&self, o: &Distance) -> Ordering {
        match (self, o) {
            (Distance::Finite(a), Distance::Finite(b)) => a.total_cmp(b),
            (Distance::Finite(_), Distance::Infinite) => Ordering::Less,
            (Distance::Infinite, Distance::Finite(_)) => Ordering::Greater,
            (Distance::Infinite, Distance::Infinite) => Ordering::Equal,
        }
    }

    pub fn le(&self, o: &Distance) -> bool {
        self.cmp(o) != Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Finite(d) => d.to_f64(),
            Distance::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Relative precision distance `|ln(x/y)|`: zero when both are zero, infinite
/// when exactly one is zero or the signs differ.
pub fn rp_distance(x: &BigNum, y: &BigNum, bits: usize) -> Distance {
    match (x.is_zero(), y.is_zero()) {
        (true, true) => return Distance::zero(),
        (true, false) | (false, true) => return Distance::Infinite,
        _ => {}
    }
    if x.is_negative() != y.is_negative() {
        return Distance::Infinite;
    }
    if x == y {
        return Distance::zero();
    }
    Distance::Finite(ln_ratio(x, y, bits).abs())
}

/// [`rp_distance`] on binary64 inputs.
pub fn rp_distance_f64(x: f64, y: f64, bits: usize) -> Result<Distance, NumError> {
    Ok(rp_distance(&BigNum::from_f64(x)?, &BigNum::from_f64(y)?, bits))
}

/// `ln(x/y)` for same-signed nonzero `x`, `y`. Ratios near 1, the common case
/// for rounding errors, go through `2 atanh((q-1)/(q+1))`, which converges in
/// a handful of terms.
fn ln_ratio(x: &BigNum, y: &BigNum, bits: usize) -> BigNum {
    let p = bits + 32;
    let q = x.div(y, p);
    let one = BigNum::one();
    let t = q.sub(&one, p);
    if t.is_zero() {
        return BigNum::zero();
    }
    match t.exponent() {
        Some(e) if e < -8 => {
            let s = t.div(&q.add(&one, p), p);
            let s2 = s.mul(&s, p);
            let mut sum = s.clone();
            let mut pow = s;
            let floor = sum.exponent().unwrap_or(0) - p as i64 - 4;
            let mut k = 3i64;
            loop {
                pow = pow.mul(&s2, p);
                let term = pow.div(&BigNum::from_i64(k), p);
                match term.exponent() {
                    Some(te) if te >= floor => sum = sum.add(&term, p),
                    _ => break,
                }
                k += 2;
            }
            BigNum(sum.0.mul(&BigFloat::from_word(2, 64), bits, RM))
        }
        _ => {
            let l = q.ln(p);
            BigNum(l.0.add(&BigFloat::from_word(0, 64), bits, RM))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci3_formats() {
        assert_eq!(format_sci3(&BigRational::zero()), "0.00e0");
        assert_eq!(format_sci3(&parse_decimal("0.000123456").unwrap()), "1.23e-4");
        assert_eq!(format_sci3(&parse_decimal("999.6").unwrap()), "1.00e3");
        assert_eq!(format_sci3(&parse_decimal("1").unwrap()), "1.00e0");
        assert_eq!(format_sci3(&parse_decimal("1.125").unwrap()), "1.12e0");
        assert_eq!(format_sci3(&parse_decimal("1.135").unwrap()), "1.14e0");
    }

    #[test]
    fn to_f64_roundtrips() {
        for f in [1.0, -0.75, 0.1, 1e300, 5e-324, 2.2250738585072014e-308, 123.456] {
            assert_eq!(BigNum::from_f64(f).unwrap().to_f64(), f);
        }
    }

    #[test]
    fn to_f64_rounds_ties_to_even() {
        let one_plus_half_ulp = BigRational::one() + pow2(-53);
        assert_eq!(BigNum::from_rational(&one_plus_half_ulp, 256).to_f64(), 1.0);
        let above = one_plus_half_ulp + pow2(-200);
        assert_eq!(BigNum::from_rational(&above, 256).to_f64(), 1.0 + f64::EPSILON);
    }

    #[test]
    fn rational_conversion_is_exact() {
        let q = BigRational::new(BigInt::from(-7), BigInt::from(16));
        assert_eq!(BigNum::from_rational(&q, 128).to_rational(), q);
    }

    #[test]
    fn uroundoff_forms() {
        assert_eq!(parse_uroundoff("2^-24").unwrap(), pow2(-24));
        assert_eq!(parse_uroundoff("1/8").unwrap(), pow2(-3));
        assert_eq!(parse_uroundoff("0.5").unwrap(), pow2(-1));
        assert!(parse_uroundoff("1").is_err());
        assert!(parse_uroundoff("abc").is_err());
    }
}
