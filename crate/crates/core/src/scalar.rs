//! Arithmetic kernel: exact rationals and emulated fixed-precision decimals.
//!
//! Fixed-precision values model desk calculators: every value written down is
//! a decimal with a fixed number of fractional or significant digits, rounded
//! half-to-even. An [`Accumulator`] models a machine register that sums
//! products of already-rounded operands exactly and is rounded once when read.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub(crate) const MINUS: char = '\u{2212}';

/// Builds an exact rational `num/den`.
///
/// # Panics
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), exp as usize)
}

/// `10^exp` as a rational, for any sign of `exp`.
pub(crate) fn pow10_rational(exp: i32) -> Rational {
    if exp >= 0 {
        Rational::from_integer(pow10(exp as u32))
    } else {
        Rational::new(BigInt::one(), pow10(exp.unsigned_abs()))
    }
}

/// Nearest integer to `q`, ties to the even neighbour.
pub(crate) fn round_half_even(q: &Rational) -> BigInt {
    let floor = q.floor().to_integer();
    let frac = q - Rational::from_integer(floor.clone());
    let half = ratio(1, 2);
    match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

/// Largest `L` with `10^L <= |q|`; `q` must be nonzero.
fn decimal_magnitude(q: &Rational) -> i32 {
    let num = q.numer().abs();
    let den = q.denom().clone();
    let a = num.to_str_radix(10).len() as i32;
    let b = den.to_str_radix(10).len() as i32;
    let guess = a - b;
    if q.abs() >= pow10_rational(guess) {
        guess
    } else {
        guess - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DigitMode {
    /// A fixed number of digits after the decimal point.
    Fractional,
    /// A fixed number of significant digits.
    Significant,
}

/// Working precision of an emulated hand computation. Rounding is always
/// half-to-even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionSpec {
    mode: DigitMode,
    digits: u32,
}

impl PrecisionSpec {
    pub fn new(mode: DigitMode, digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::InvalidPrecision);
        }
        Ok(Self { mode, digits })
    }

    pub fn fractional(digits: u32) -> Result<Self> {
        Self::new(DigitMode::Fractional, digits)
    }

    pub fn significant(digits: u32) -> Result<Self> {
        Self::new(DigitMode::Significant, digits)
    }

    pub fn mode(&self) -> DigitMode {
        self.mode
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Decimal exponent of the last kept digit for a value of this magnitude.
    fn quantum_exponent(&self, x: &Rational) -> i32 {
        match self.mode {
            DigitMode::Fractional => -(self.digits as i32),
            DigitMode::Significant => {
                if x.is_zero() {
                    0
                } else {
                    decimal_magnitude(x) - self.digits as i32 + 1
                }
            }
        }
    }

    /// One unit in the last place for a value of the magnitude of `x`.
    pub fn ulp(&self, x: &Rational) -> Rational {
        pow10_rational(self.quantum_exponent(x))
    }
}

impl fmt::Display for PrecisionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            DigitMode::Fractional => write!(f, "frac={}", self.digits),
            DigitMode::Significant => write!(f, "sig={}", self.digits),
        }
    }
}

impl FromStr for PrecisionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown precision spec `{s}`"));
        let (key, value) = s.split_once('=').ok_or_else(bad)?;
        let digits: u32 = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "frac" => Self::fractional(digits),
            "sig" => Self::significant(digits),
            _ => Err(bad()),
        }
    }
}

/// A decimal number `significand · 10^exponent` that is exactly representable
/// under its [`PrecisionSpec`].
#[derive(Clone, Debug)]
pub struct FixedDec {
    significand: BigInt,
    exponent: i32,
    spec: PrecisionSpec,
}

impl FixedDec {
    pub fn spec(&self) -> PrecisionSpec {
        self.spec
    }

    pub fn significand(&self) -> &BigInt {
        &self.significand
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(self.significand.clone()) * pow10_rational(self.exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.significand.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.significand.is_negative()
    }

    /// Digits of `|value|` with the decimal point placed; the integer part is
    /// `None` when it is zero.
    fn digit_parts(&self) -> (Option<String>, String) {
        let mag = self.significand.abs();
        if self.exponent >= 0 {
            let mut s = mag.to_str_radix(10);
            if !mag.is_zero() {
                s.push_str(&"0".repeat(self.exponent as usize));
            }
            let int = if mag.is_zero() { None } else { Some(s) };
            return (int, String::new());
        }
        let frac_len = self.exponent.unsigned_abs() as usize;
        let mut s = mag.to_str_radix(10);
        if s.len() <= frac_len {
            s = format!("{}{}", "0".repeat(frac_len + 1 - s.len()), s);
        }
        let (int, frac) = s.split_at(s.len() - frac_len);
        let int = if int.trim_start_matches('0').is_empty() {
            None
        } else {
            Some(int.to_string())
        };
        (int, frac.to_string())
    }

    /// Hand-table style: no leading zero, `−` for negatives (".7381", "−.1190").
    pub fn render_table(&self) -> String {
        let (int, frac) = self.digit_parts();
        let mut out = String::new();
        if self.is_negative() {
            out.push(MINUS);
        }
        match (int, frac.is_empty()) {
            (Some(i), true) => out.push_str(&i),
            (None, true) => out.push('0'),
            (Some(i), false) => {
                out.push_str(&i);
                out.push('.');
                out.push_str(&frac);
            }
            (None, false) => {
                out.push('.');
                out.push_str(&frac);
            }
        }
        out
    }

    /// Plain ASCII decimal ("0.7381", "-0.1190") used by structured output.
    pub fn render_plain(&self) -> String {
        let (int, frac) = self.digit_parts();
        let mut out = String::new();
        if self.is_negative() {
            out.push('-');
        }
        out.push_str(int.as_deref().unwrap_or("0"));
        if !frac.is_empty() {
            out.push('.');
            out.push_str(&frac);
        }
        out
    }
}

impl PartialEq for FixedDec {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.to_rational() == other.to_rational()
    }
}

impl Eq for FixedDec {}

impl fmt::Display for FixedDec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())
    }
}

/// Nearest value to `x` representable under `spec`, ties to even.
pub fn round_to(x: &Rational, spec: PrecisionSpec) -> FixedDec {
    if x.is_zero() {
        return FixedDec {
            significand: BigInt::zero(),
            exponent: spec.quantum_exponent(x),
            spec,
        };
    }
    let mut exponent = spec.quantum_exponent(x);
    let mut significand = round_half_even(&(x / pow10_rational(exponent)));
    if spec.mode == DigitMode::Significant && significand.abs() == pow10(spec.digits) {
        // Rounding carried into a new leading digit (e.g. 9.996 -> 10.0).
        significand /= 10;
        exponent += 1;
    }
    FixedDec {
        significand,
        exponent,
        spec,
    }
}

/// Square root of `x` rounded once to `spec`.
pub fn sqrt_rounded(x: &Rational, spec: PrecisionSpec) -> Result<FixedDec> {
    if x.is_negative() {
        return Err(Error::InvalidArgument("square root of a negative value".into()));
    }
    if x.is_zero() {
        return Ok(round_to(x, spec));
    }
    let mut exponent = match spec.mode {
        DigitMode::Fractional => -(spec.digits as i32),
        DigitMode::Significant => {
            // floor(log10 sqrt(x)) = floor(floor(log10 x) / 2)
            let mag = decimal_magnitude(x);
            num_integer::Integer::div_floor(&mag, &2) - spec.digits as i32 + 1
        }
    };
    let scaled = x / pow10_rational(2 * exponent);
    let mut significand = nearest_sqrt(&scaled);
    if spec.mode == DigitMode::Significant && significand == pow10(spec.digits) {
        significand /= 10;
        exponent += 1;
    }
    Ok(FixedDec {
        significand,
        exponent,
        spec,
    })
}

/// Nearest integer to `sqrt(q)` for `q >= 0`, ties to even.
fn nearest_sqrt(q: &Rational) -> BigInt {
    let floor_q = q.floor().to_integer();
    let m = floor_q.sqrt();
    // Compare q with (m + 1/2)^2 = m^2 + m + 1/4.
    let mid = Rational::from_integer(&m * &m + &m) + ratio(1, 4);
    match q.cmp(&mid) {
        Ordering::Less => m,
        Ordering::Greater => m + 1,
        Ordering::Equal => {
            if m.is_even() {
                m
            } else {
                m + 1
            }
        }
    }
}

/// Exact square root when `q` is the square of a rational.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Machine accumulator: exact running sum, rounded once on extraction.
#[derive(Clone, Debug)]
pub struct Accumulator {
    sum: Rational,
    spec: PrecisionSpec,
}

impl Accumulator {
    pub fn new(spec: PrecisionSpec) -> Self {
        Self {
            sum: Rational::zero(),
            spec,
        }
    }

    fn check(&self, x: &FixedDec) -> Result<()> {
        if x.spec != self.spec {
            return Err(Error::MixedKinds {
                left: self.spec.to_string(),
                right: x.spec.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&mut self, x: &FixedDec) -> Result<()> {
        self.check(x)?;
        self.sum += x.to_rational();
        Ok(())
    }

    pub fn add_product(&mut self, a: &FixedDec, b: &FixedDec) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        self.sum += a.to_rational() * b.to_rational();
        Ok(())
    }

    pub fn exact(&self) -> &Rational {
        &self.sum
    }

    pub fn finish(self) -> FixedDec {
        round_to(&self.sum, self.spec)
    }
}

/// `seed + Σ a·b` summed exactly and rounded once.
pub fn accumulate_dot(pairs: &[(FixedDec, FixedDec)], seed: &FixedDec) -> Result<FixedDec> {
    let mut acc = Accumulator::new(seed.spec);
    acc.add(seed)?;
    for (a, b) in pairs {
        acc.add_product(a, b)?;
    }
    Ok(acc.finish())
}

/// Arithmetic regime of a matrix or computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Exact,
    Fixed(PrecisionSpec),
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Exact => f.write_str("exact"),
            ScalarKind::Fixed(spec) => write!(f, "fixed {spec}"),
        }
    }
}

impl FromStr for ScalarKind {
    type Err = Error;

    /// Accepts `exact`, `frac=K`, `sig=K`, or `fixed frac=K`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exact" {
            return Ok(ScalarKind::Exact);
        }
        let spec = s.strip_prefix("fixed").unwrap_or(s).trim();
        Ok(ScalarKind::Fixed(spec.parse()?))
    }
}

/// A number of either arithmetic kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rational),
    Fixed(FixedDec),
}

impl Scalar {
    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Exact(_) => ScalarKind::Exact,
            Scalar::Fixed(d) => ScalarKind::Fixed(d.spec),
        }
    }

    /// Converts `q` into `kind`, rounding when the kind is fixed.
    pub fn from_rational(q: Rational, kind: ScalarKind) -> Scalar {
        match kind {
            ScalarKind::Exact => Scalar::Exact(q),
            ScalarKind::Fixed(spec) => Scalar::Fixed(round_to(&q, spec)),
        }
    }

    pub fn from_int(n: i64, kind: ScalarKind) -> Scalar {
        Scalar::from_rational(int(n), kind)
    }

    pub fn zero(kind: ScalarKind) -> Scalar {
        Scalar::from_int(0, kind)
    }

    pub fn one(kind: ScalarKind) -> Scalar {
        Scalar::from_int(1, kind)
    }

    pub fn exact(num: i64, den: i64) -> Scalar {
        Scalar::Exact(ratio(num, den))
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Scalar::Exact(q) => q.clone(),
            Scalar::Fixed(d) => d.to_rational(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Fixed(d) => d.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_one()
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Fixed(d) => d.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.to_rational().is_integer()
    }

    pub fn abs_rational(&self) -> Rational {
        self.to_rational().abs()
    }

    /// Re-expresses the value under another kind.
    pub fn convert(&self, kind: ScalarKind) -> Scalar {
        Scalar::from_rational(self.to_rational(), kind)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Parses one file token under `kind`. Exact files accept integers,
    /// `p/q`, and terminating decimals; fixed files accept integers and
    /// decimals that are representable under their spec.
    pub fn parse(token: &str, kind: ScalarKind) -> Result<Scalar> {
        let bad = |msg: &str| Error::InvalidArgument(format!("{msg} `{token}`"));
        let t = token.replace(MINUS, "-");
        let is_fraction = t.contains('/');
        let q = if is_fraction {
            let (n, d) = t.split_once('/').ok_or_else(|| bad("bad rational"))?;
            let n: BigInt = n.parse().map_err(|_| bad("bad numerator in"))?;
            let d: BigInt = d.parse().map_err(|_| bad("bad denominator in"))?;
            if d.is_zero() {
                return Err(bad("zero denominator in"));
            }
            Rational::new(n, d)
        } else {
            parse_decimal(&t).ok_or_else(|| bad("not a number:"))?
        };
        match kind {
            ScalarKind::Exact => Ok(Scalar::Exact(q)),
            ScalarKind::Fixed(spec) => {
                if is_fraction {
                    return Err(Error::MixedKinds {
                        left: kind.to_string(),
                        right: format!("exact token {token}"),
                    });
                }
                let d = round_to(&q, spec);
                if d.to_rational() != q {
                    return Err(bad(&format!("value not representable at {spec}:")));
                }
                Ok(Scalar::Fixed(d))
            }
        }
    }

    /// Printed-table rendering: `p/q` for exact values, leading-dot decimals
    /// for fixed values, `−` for negatives, never a negative zero.
    pub fn render_table(&self) -> String {
        match self {
            Scalar::Exact(q) => render_rational(q, true),
            Scalar::Fixed(d) => d.render_table(),
        }
    }

    /// ASCII rendering that [`Scalar::parse`] reads back exactly.
    pub fn render_plain(&self) -> String {
        match self {
            Scalar::Exact(q) => render_rational(q, false),
            Scalar::Fixed(d) => d.render_plain(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.to_rational().cmp(&other.to_rational()))
    }
}

fn render_rational(q: &Rational, unicode_minus: bool) -> String {
    let mut out = String::new();
    if q.is_negative() {
        out.push(if unicode_minus { MINUS } else { '-' });
    }
    out.push_str(&q.numer().abs().to_str_radix(10));
    if !q.denom().is_one() {
        out.push('/');
        out.push_str(&q.denom().to_str_radix(10));
    }
    out
}

/// Parses an optionally signed terminating decimal such as `-.1190` or `17`.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mag = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let signed = if neg {
        BigInt::from_biguint(Sign::Minus, mag.magnitude().clone())
    } else {
        mag
    };
    Some(Rational::from_integer(signed) * pow10_rational(-(frac_part.len() as i32)))
}
