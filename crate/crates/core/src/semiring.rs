//! Commutative semirings and the concrete weight types shipped with the crate.
//!
//! [`Semiring`] is the algebra every automaton computes in. [`Weight`] adds
//! what a semiring needs to appear in files and on the command line: a name,
//! literal parsing and JSON encoding. Rings additionally implement [`Ring`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Tolerance used for floating-point instances (absolute-or-relative).
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// A commutative semiring: `plus` and `times` are associative and
/// commutative, `times` distributes over `plus`, `zero` annihilates.
pub trait Semiring: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Equality up to the instance's tolerance.
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    /// A nonnegative measure of how far apart two values are; zero iff equal
    /// for exact instances.
    fn distance(&self, other: &Self) -> f64 {
        if self == other {
            0.0
        } else {
            1.0
        }
    }

    fn sum<'a, I>(iter: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        Self: 'a,
    {
        iter.into_iter().fold(Self::zero(), |acc, x| acc.plus(x))
    }
}

/// A commutative ring: a semiring with additive inverses.
pub trait Ring: Semiring {
    fn neg(&self) -> Self;

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.neg())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiringSpec {
    pub name: &'static str,
    pub is_ring: bool,
    pub is_exact: bool,
    pub equality_tolerance: f64,
}

/// Semirings that can be named, parsed and serialized.
pub trait Weight: Semiring + fmt::Display {
    const SPEC: SemiringSpec;

    fn from_literal(lit: &Literal) -> Result<Self>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    /// Additive inverse, for instances that are rings.
    fn checked_neg(&self) -> Option<Self> {
        None
    }
}

/// Identifiers accepted in files and on the command line.
pub const SEMIRING_NAMES: [&str; 5] = ["real", "rational", "boolean", "viterbi", "log"];

/// An exact decimal or fractional weight as written in a regex or on the
/// command line, e.g. `0.5`, `-2`, `1e-3` or `3/4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal(pub BigRational);

impl Literal {
    pub fn from_integer(n: i64) -> Self {
        Literal(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Literal(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Literal)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(&self.0)
    }
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_literal(s).ok_or_else(|| Error::Literal(s.to_string()))
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_literal(s: &str) -> Option<Literal> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let q = parse_digits(q)?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(parse_digits(p)?, q)
    } else {
        let (mantissa, exp) = match body.find(['e', 'E']) {
            Some(i) => {
                let e = &body[i + 1..];
                let (eneg, edigits) = match e.as_bytes().first() {
                    Some(b'-') => (true, &e[1..]),
                    Some(b'+') => (false, &e[1..]),
                    _ => (false, e),
                };
                let e: i32 = parse_digits(edigits)?.to_i32()?;
                (&body[..i], if eneg { -e } else { e })
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let int_val = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part)?
        };
        let mut value = BigRational::from_integer(int_val);
        if !frac_part.is_empty() {
            let frac = parse_digits(frac_part)?;
            let scale = num_traits::pow(BigInt::from(10), frac_part.len());
            value += BigRational::new(frac, scale);
        }
        if exp.unsigned_abs() > 400 {
            return None;
        }
        let ten = BigRational::from_integer(BigInt::from(10));
        let factor = num_traits::pow(ten, exp.unsigned_abs() as usize);
        if exp >= 0 {
            value * factor
        } else {
            value / factor
        }
    };
    Some(Literal(if neg { -value } else { value }))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.0))
    }
}

/// Prints a terminating decimal when the denominator allows it, `p/q` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    let mut den = r.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    let s = n.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (ip, fp) = s.split_at(s.len() - digits);
    let sign = if n.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

fn json_number(v: &Value) -> Result<Literal> {
    match v {
        Value::Number(n) => n.to_string().parse(),
        Value::String(s) => s.parse(),
        Value::Bool(b) => Ok(Literal::from_integer(*b as i64)),
        other => Err(Error::Literal(other.to_string())),
    }
}

fn float_json(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

fn float_from_json(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Literal(n.to_string())),
        Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            _ => Ok(s.parse::<Literal>()?.to_f64()),
        },
        other => Err(Error::Literal(other.to_string())),
    }
}

fn float_approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = 1f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= FLOAT_TOLERANCE * scale
}

fn float_distance(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

// ---------------------------------------------------------------- real

impl Semiring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn approx_eq(&self, other: &Self) -> bool {
        float_approx_eq(*self, *other)
    }
    fn distance(&self, other: &Self) -> f64 {
        float_distance(*self, *other)
    }
}

impl Ring for f64 {
    fn neg(&self) -> Self {
        -self
    }
}

impl Weight for f64 {
    const SPEC: SemiringSpec = SemiringSpec {
        name: "real",
        is_ring: true,
        is_exact: false,
        equality_tolerance: FLOAT_TOLERANCE,
    };

    fn from_literal(lit: &Literal) -> Result<Self> {
        Ok(lit.to_f64())
    }
    fn to_json(&self) -> Value {
        float_json(*self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        float_from_json(v)
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
}

// ---------------------------------------------------------------- rational

pub type Rational = BigRational;

impl Semiring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        if Zero::is_zero(self) || Zero::is_zero(rhs) {
            return Zero::zero();
        }
        self * rhs
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Ring for BigRational {
    fn neg(&self) -> Self {
        -self
    }
}

impl Weight for BigRational {
    const SPEC: SemiringSpec = SemiringSpec {
        name: "rational",
        is_ring: true,
        is_exact: true,
        equality_tolerance: 0.0,
    };

    fn from_literal(lit: &Literal) -> Result<Self> {
        Ok(lit.0.clone())
    }
    fn to_json(&self) -> Value {
        if self.denom().is_one() {
            if let Some(n) = self.numer().to_i64() {
                return Value::from(n);
            }
        }
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
    fn from_json(v: &Value) -> Result<Self> {
        Ok(json_number(v)?.0)
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
}

// ---------------------------------------------------------------- boolean

/// `bool` cannot implement `Display` as `0`/`1`, so the Boolean weight is a
/// thin newtype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Boolean(pub bool);

impl Semiring for Boolean {
    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn plus(&self, rhs: &Self) -> Self {
        Boolean(self.0 || rhs.0)
    }
    fn times(&self, rhs: &Self) -> Self {
        Boolean(self.0 && rhs.0)
    }
}

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

impl Weight for Boolean {
    const SPEC: SemiringSpec = SemiringSpec {
        name: "boolean",
        is_ring: false,
        is_exact: true,
        equality_tolerance: 0.0,
    };

    fn from_literal(lit: &Literal) -> Result<Self> {
        Ok(Boolean(!lit.is_zero()))
    }
    fn to_json(&self) -> Value {
        Value::from(self.0 as u8)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Bool(b) => Ok(Boolean(*b)),
            other => Ok(Boolean(!json_number(other)?.is_zero())),
        }
    }
}

// ---------------------------------------------------------------- viterbi

/// Max-times over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Viterbi(pub f64);

impl Semiring for Viterbi {
    fn zero() -> Self {
        Viterbi(0.0)
    }
    fn one() -> Self {
        Viterbi(1.0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        Viterbi(self.0.max(rhs.0))
    }
    fn times(&self, rhs: &Self) -> Self {
        Viterbi(self.0 * rhs.0)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        float_approx_eq(self.0, other.0)
    }
    fn distance(&self, other: &Self) -> f64 {
        float_distance(self.0, other.0)
    }
}

impl fmt::Display for Viterbi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Weight for Viterbi {
    const SPEC: SemiringSpec = SemiringSpec {
        name: "viterbi",
        is_ring: false,
        is_exact: false,
        equality_tolerance: FLOAT_TOLERANCE,
    };

    fn from_literal(lit: &Literal) -> Result<Self> {
        let x = lit.to_f64();
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Literal(format!("{lit} (viterbi weights lie in [0, 1])")));
        }
        Ok(Viterbi(x))
    }
    fn to_json(&self) -> Value {
        float_json(self.0)
    }
    fn from_json(v: &Value) -> Result<Self> {
        let x = float_from_json(v)?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Literal(format!("{x} (viterbi weights lie in [0, 1])")));
        }
        Ok(Viterbi(x))
    }
}

// ---------------------------------------------------------------- log

/// Log-domain weights: `plus` is log-sum-exp, `times` is addition.
/// Values are stored (and written) as logarithms; zero is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(pub f64);

impl Semiring for LogWeight {
    fn zero() -> Self {
        LogWeight(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        LogWeight(0.0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogWeight(hi);
        }
        LogWeight(hi + (lo - hi).exp().ln_1p())
    }
    fn times(&self, rhs: &Self) -> Self {
        LogWeight(self.0 + rhs.0)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        float_approx_eq(self.0, other.0)
    }
    fn distance(&self, other: &Self) -> f64 {
        float_distance(self.0, other.0)
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Weight for LogWeight {
    const SPEC: SemiringSpec = SemiringSpec {
        name: "log",
        is_ring: false,
        is_exact: false,
        equality_tolerance: FLOAT_TOLERANCE,
    };

    fn from_literal(lit: &Literal) -> Result<Self> {
        Ok(LogWeight(lit.to_f64()))
    }
    fn to_json(&self) -> Value {
        float_json(self.0)
    }
    fn from_json(v: &Value) -> Result<Self> {
        Ok(LogWeight(float_from_json(v)?))
    }
}

// ---------------------------------------------------------------- naturals

/// The natural numbers, used for semiring forms of the characteristic
/// equation. Not exposed through files.
impl Semiring for u64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

/// Integers, handy for exact ring tests without rational overhead.
impl Semiring for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Ring for i64 {
    fn neg(&self) -> Self {
        -self
    }
}

pub fn spec_by_name(name: &str) -> Option<SemiringSpec> {
    [
        f64::SPEC,
        BigRational::SPEC,
        Boolean::SPEC,
        Viterbi::SPEC,
        LogWeight::SPEC,
    ]
    .into_iter()
    .find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_axioms<S: Semiring>(mut gen: impl FnMut() -> S) {
        for _ in 0..1000 {
            let (x, y, z) = (gen(), gen(), gen());
            let ok = |a: S, b: S| assert!(a.approx_eq(&b), "{a:?} != {b:?}");
            ok(x.plus(&y).plus(&z), x.plus(&y.plus(&z)));
            ok(x.times(&y).times(&z), x.times(&y.times(&z)));
            ok(x.plus(&y), y.plus(&x));
            ok(x.times(&y), y.times(&x));
            ok(x.times(&y.plus(&z)), x.times(&y).plus(&x.times(&z)));
            ok(x.plus(&S::zero()), x.clone());
            ok(x.times(&S::one()), x.clone());
            ok(x.times(&S::zero()), S::zero());
        }
    }

    fn check_inverse<S: Ring>(mut gen: impl FnMut() -> S) {
        for _ in 0..1000 {
            let x = gen();
            assert!(x.plus(&x.neg()).approx_eq(&S::zero()));
        }
    }

    #[test]
    fn axioms_hold_for_every_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        check_axioms(|| rng.random_range(-10.0..10.0f64));
        check_inverse(|| rng.random_range(-10.0..10.0f64));
        check_axioms(|| {
            Literal::from_ratio(rng.random_range(-20..20), rng.random_range(1..9)).0
        });
        check_inverse(|| Literal::from_ratio(rng.random_range(-20..20), 3).0);
        check_axioms(|| Boolean(rng.random()));
        check_axioms(|| Viterbi(rng.random_range(0.0..=1.0)));
        check_axioms(|| {
            if rng.random_ratio(1, 10) {
                LogWeight::zero()
            } else {
                LogWeight(rng.random_range(-5.0..5.0))
            }
        });
        check_axioms(|| rng.random_range(0..100u64));
    }

    #[test]
    fn literal_parsing() {
        let p = |s: &str| s.parse::<Literal>().unwrap();
        assert_eq!(p("0.5"), Literal::from_ratio(1, 2));
        assert_eq!(p("-2"), Literal::from_integer(-2));
        assert_eq!(p("3/4"), Literal::from_ratio(3, 4));
        assert_eq!(p("1e-3"), Literal::from_ratio(1, 1000));
        assert_eq!(p("2.5E2"), Literal::from_integer(250));
        assert_eq!(p(".25"), Literal::from_ratio(1, 4));
        for bad in ["", "-", "1/0", "a", "1.2.3", "1e", "1/", "/2", "--1"] {
            assert!(bad.parse::<Literal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn literal_display_is_exact() {
        assert_eq!(Literal::from_ratio(1, 2).to_string(), "0.5");
        assert_eq!(Literal::from_ratio(-3, 40).to_string(), "-0.075");
        assert_eq!(Literal::from_ratio(1, 3).to_string(), "1/3");
        assert_eq!(Literal::from_integer(7).to_string(), "7");
    }

    #[test]
    fn viterbi_rejects_out_of_range() {
        assert!(Viterbi::from_literal(&Literal::from_integer(2)).is_err());
        assert!(Viterbi::from_literal(&Literal::from_ratio(1, 2)).is_ok());
    }

    #[test]
    fn rational_json_round_trip() {
        let r = Literal::from_ratio(-7, 3).0;
        assert_eq!(BigRational::from_json(&r.to_json()).unwrap(), r);
        let n = Literal::from_integer(5).0;
        assert_eq!(n.to_json(), Value::from(5));
        let half = BigRational::from_json(&serde_json::json!(0.5)).unwrap();
        assert_eq!(half, Literal::from_ratio(1, 2).0);
    }

    #[test]
    fn log_zero_survives_json() {
        let z = LogWeight::zero();
        assert_eq!(LogWeight::from_json(&z.to_json()).unwrap(), z);
    }
}
