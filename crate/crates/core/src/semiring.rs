//! Partial commutative semirings used both as branching weights and as
//! truth values.
//!
//! Four instances are supported:
//!
//! | instance            | carrier             | `+`          | `•`            | `⊑`          |
//! |---------------------|---------------------|--------------|----------------|--------------|
//! | boolean             | `{0, 1}`            | `∨`          | `∧`            | `≤`          |
//! | probabilistic       | `[0, 1] ∩ ℚ`        | `+` (partial)| `*`            | `≤`          |
//! | tropical            | `ℕ ∪ {∞}`           | `min`        | `+`            | `≥`          |
//! | bounded tropical B  | `{0..B} ∪ {∞}`      | `min`        | `+` capped at B| `≥`          |
//!
//! In every instance `0` (the additive unit) is the `⊑`-bottom and `1` (the
//! multiplicative unit) is the `⊑`-top. For the tropical instances this means
//! the additive unit is `∞` and the multiplicative unit is `0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Which semiring is active. Values carry no descriptor of their own, so all
/// algebra goes through this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semiring {
    Boolean,
    Probabilistic,
    Tropical,
    /// Tropical semiring truncated at `bound`; anything above it is `∞`.
    BoundedTropical {
        bound: u64,
    },
}

/// Element of `ℕ ∪ {∞}`. The derived order is the numeric one (`∞` largest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(n) => Some(n),
            Cost::Infinite => None,
        }
    }

    /// Numeric addition with `∞` absorbing. Overflowing `u64` is treated as `∞`.
    pub fn plus(self, other: Cost) -> Cost {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.checked_add(b).map_or(Cost::Infinite, Cost::Finite),
            _ => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(n) => write!(f, "{n}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

/// A scalar of some semiring carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Prob(BigRational),
    Cost(Cost),
}

impl Value {
    pub fn prob(numer: i64, denom: i64) -> Value {
        Value::Prob(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn cost(n: u64) -> Value {
        Value::Cost(Cost::Finite(n))
    }

    pub const INFINITY: Value = Value::Cost(Cost::Infinite);

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Prob(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_cost(&self) -> Option<Cost> {
        match self {
            Value::Cost(c) => Some(*c),
            _ => None,
        }
    }
}

/// Canonical text rendering; the same syntax is accepted by
/// [`Semiring::parse_scalar`].
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            Value::Prob(r) => write!(f, "{r}"),
            Value::Cost(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Distance between two carrier elements in the carrier's natural metric:
/// `|a - b|` on numbers, `∞` between a finite cost and `∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(BigRational),
    Infinite,
}

impl Distance {
    pub fn zero() -> Distance {
        Distance::Finite(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Distance::Finite(r) if r.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Finite(r) => rational_to_f64(r),
            Distance::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(r) => write!(f, "{r}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind}")]
pub struct ScalarError {
    /// 1-based column within the scalar text.
    pub column: usize,
    pub kind: ScalarErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarErrorKind {
    #[error("empty scalar")]
    Empty,
    #[error("malformed {expected} literal `{text}`")]
    Malformed { expected: &'static str, text: String },
    #[error("`{text}` lies outside the {semiring} carrier")]
    OutOfCarrier { text: String, semiring: Semiring },
    #[error("`{text}` exceeds the bound {bound}")]
    ExceedsBound { text: String, bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid semiring `{0}` (expected bool, prob, trop or trop[B] with B >= 1)")]
pub struct SemiringParseError(pub String);

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semiring::Boolean => f.write_str("bool"),
            Semiring::Probabilistic => f.write_str("prob"),
            Semiring::Tropical => f.write_str("trop"),
            Semiring::BoundedTropical { bound } => write!(f, "trop[{bound}]"),
        }
    }
}

impl FromStr for Semiring {
    type Err = SemiringParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SemiringParseError(s.to_string());
        match s {
            "bool" => Ok(Semiring::Boolean),
            "prob" => Ok(Semiring::Probabilistic),
            "trop" => Ok(Semiring::Tropical),
            _ => {
                let inner = s.strip_prefix("trop[").and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
                let bound: u64 = inner.trim().parse().map_err(|_| err())?;
                Semiring::bounded_tropical(bound).ok_or_else(err)
            }
        }
    }
}

#[track_caller]
fn mismatch(semiring: Semiring, values: &[&Value]) -> ! {
    panic!("semiring mismatch: {values:?} used with the {semiring} semiring")
}

impl Semiring {
    /// The bounded tropical semiring; `None` when `bound` is zero.
    pub fn bounded_tropical(bound: u64) -> Option<Semiring> {
        (bound >= 1).then_some(Semiring::BoundedTropical { bound })
    }

    pub fn zero(self) -> Value {
        match self {
            Semiring::Boolean => Value::Bool(false),
            Semiring::Probabilistic => Value::Prob(BigRational::zero()),
            Semiring::Tropical | Semiring::BoundedTropical { .. } => Value::Cost(Cost::Infinite),
        }
    }

    pub fn one(self) -> Value {
        match self {
            Semiring::Boolean => Value::Bool(true),
            Semiring::Probabilistic => Value::Prob(BigRational::one()),
            Semiring::Tropical | Semiring::BoundedTropical { .. } => Value::Cost(Cost::Finite(0)),
        }
    }

    pub fn is_zero(self, v: &Value) -> bool {
        *v == self.zero()
    }

    /// Whether the carrier is finite (exact Kleene stabilisation is guaranteed).
    pub fn is_finite(self) -> bool {
        matches!(self, Semiring::Boolean | Semiring::BoundedTropical { .. })
    }

    /// All elements of a finite carrier, in `⊑`-ascending order.
    pub fn carrier(self) -> Option<Vec<Value>> {
        match self {
            Semiring::Boolean => Some(vec![Value::Bool(false), Value::Bool(true)]),
            Semiring::BoundedTropical { bound } => {
                Some(std::iter::once(Value::Cost(Cost::Infinite)).chain((0..=bound).rev().map(Value::cost)).collect())
            }
            _ => None,
        }
    }

    /// Whether `v` belongs to this semiring's carrier.
    pub fn contains(self, v: &Value) -> bool {
        match (self, v) {
            (Semiring::Boolean, Value::Bool(_)) => true,
            (Semiring::Probabilistic, Value::Prob(r)) => !r.is_negative() && *r <= BigRational::one(),
            (Semiring::Tropical, Value::Cost(_)) => true,
            (Semiring::BoundedTropical { bound }, Value::Cost(c)) => match c {
                Cost::Finite(n) => *n <= bound,
                Cost::Infinite => true,
            },
            _ => false,
        }
    }

    /// Partial sum. `None` means the sum is undefined (probabilistic overflow
    /// past 1); it is not an error.
    pub fn plus(self, a: &Value, b: &Value) -> Option<Value> {
        match (self, a, b) {
            (Semiring::Boolean, Value::Bool(x), Value::Bool(y)) => Some(Value::Bool(*x || *y)),
            (Semiring::Probabilistic, Value::Prob(x), Value::Prob(y)) => {
                let s = x + y;
                (s <= BigRational::one()).then_some(Value::Prob(s))
            }
            (Semiring::Tropical | Semiring::BoundedTropical { .. }, Value::Cost(x), Value::Cost(y)) => {
                Some(Value::Cost(*x.min(y)))
            }
            _ => mismatch(self, &[a, b]),
        }
    }

    pub fn times(self, a: &Value, b: &Value) -> Value {
        match (self, a, b) {
            (Semiring::Boolean, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (Semiring::Probabilistic, Value::Prob(x), Value::Prob(y)) => Value::Prob(x * y),
            (Semiring::Tropical, Value::Cost(x), Value::Cost(y)) => Value::Cost(x.plus(*y)),
            (Semiring::BoundedTropical { bound }, Value::Cost(x), Value::Cost(y)) => match x.plus(*y) {
                Cost::Finite(n) if n <= bound => Value::cost(n),
                _ => Value::Cost(Cost::Infinite),
            },
            _ => mismatch(self, &[a, b]),
        }
    }

    /// Product of an arbitrary number of factors; the empty product is one.
    pub fn product<'a>(self, values: impl IntoIterator<Item = &'a Value>) -> Value {
        values.into_iter().fold(self.one(), |acc, v| self.times(&acc, v))
    }

    /// The semiring order `a ⊑ b`.
    pub fn leq(self, a: &Value, b: &Value) -> bool {
        match (self, a, b) {
            (Semiring::Boolean, Value::Bool(x), Value::Bool(y)) => x <= y,
            (Semiring::Probabilistic, Value::Prob(x), Value::Prob(y)) => x <= y,
            (Semiring::Tropical | Semiring::BoundedTropical { .. }, Value::Cost(x), Value::Cost(y)) => x >= y,
            _ => mismatch(self, &[a, b]),
        }
    }

    /// Left fold of [`plus`](Self::plus); the empty sum is zero.
    pub fn sum<'a>(self, values: impl IntoIterator<Item = &'a Value>) -> Option<Value> {
        values.into_iter().try_fold(self.zero(), |acc, v| self.plus(&acc, v))
    }

    /// Offsetting: `s ⊘ t = inf { u | u • t ⊒ s }`.
    pub fn oslash(self, s: &Value, t: &Value) -> Value {
        match (self, s, t) {
            (Semiring::Boolean, Value::Bool(_), Value::Bool(_)) => s.clone(),
            (Semiring::Probabilistic, Value::Prob(x), Value::Prob(y)) => {
                if x.is_zero() {
                    Value::Prob(BigRational::zero())
                } else if y.is_zero() {
                    Value::Prob(BigRational::one())
                } else {
                    Value::Prob((x / y).min(BigRational::one()))
                }
            }
            (Semiring::Tropical, Value::Cost(x), Value::Cost(y)) => Value::Cost(match (x, y) {
                (Cost::Infinite, Cost::Infinite) => Cost::Infinite,
                (Cost::Infinite, Cost::Finite(_)) => Cost::Infinite,
                (Cost::Finite(_), Cost::Infinite) => Cost::Finite(0),
                (Cost::Finite(n), Cost::Finite(m)) => Cost::Finite(n.saturating_sub(*m)),
            }),
            (Semiring::BoundedTropical { .. }, Value::Cost(_), Value::Cost(_)) => {
                // Carrier is ⊑-ascending, so the first qualifying element is the infimum.
                let carrier = self.carrier().expect("bounded tropical carrier is finite");
                carrier.into_iter().find(|u| self.leq(s, &self.times(u, t))).unwrap_or_else(|| self.one())
            }
            _ => mismatch(self, &[s, t]),
        }
    }

    /// Distance in the carrier's natural metric.
    pub fn distance(self, a: &Value, b: &Value) -> Distance {
        match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => {
                Distance::Finite(if x == y { BigRational::zero() } else { BigRational::one() })
            }
            (Value::Prob(x), Value::Prob(y)) => Distance::Finite((x - y).abs()),
            (Value::Cost(x), Value::Cost(y)) => match (x, y) {
                (Cost::Finite(n), Cost::Finite(m)) => {
                    Distance::Finite(BigRational::from_integer(BigInt::from(n.abs_diff(*m))))
                }
                (Cost::Infinite, Cost::Infinite) => Distance::zero(),
                _ => Distance::Infinite,
            },
            _ => mismatch(self, &[a, b]),
        }
    }

    /// Parse a scalar in this semiring's text syntax:
    /// boolean `0`/`1`; probabilistic `p/q` or a decimal literal; tropical
    /// family a decimal natural or `inf`.
    pub fn parse_scalar(self, text: &str) -> Result<Value, ScalarError> {
        let trimmed = text.trim_start();
        let offset = text.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        let at = |column: usize, kind| ScalarError { column: offset + column, kind };
        if trimmed.is_empty() {
            return Err(at(1, ScalarErrorKind::Empty));
        }
        match self {
            Semiring::Boolean => match trimmed {
                "0" => Ok(Value::Bool(false)),
                "1" => Ok(Value::Bool(true)),
                _ if trimmed.bytes().all(|b| b.is_ascii_digit()) => {
                    Err(at(1, ScalarErrorKind::OutOfCarrier { text: trimmed.to_string(), semiring: self }))
                }
                _ => Err(at(1, ScalarErrorKind::Malformed { expected: "boolean", text: trimmed.to_string() })),
            },
            Semiring::Probabilistic => {
                let r = parse_rational(trimmed).map_err(|column| {
                    at(column, ScalarErrorKind::Malformed { expected: "rational", text: trimmed.to_string() })
                })?;
                let v = Value::Prob(r);
                if self.contains(&v) {
                    Ok(v)
                } else {
                    Err(at(1, ScalarErrorKind::OutOfCarrier { text: trimmed.to_string(), semiring: self }))
                }
            }
            Semiring::Tropical | Semiring::BoundedTropical { .. } => {
                let c = if trimmed == "inf" {
                    Cost::Infinite
                } else {
                    if let Some(bad) = trimmed.bytes().position(|b| !b.is_ascii_digit()) {
                        return Err(at(
                            bad + 1,
                            ScalarErrorKind::Malformed { expected: "natural", text: trimmed.to_string() },
                        ));
                    }
                    Cost::Finite(trimmed.parse().map_err(|_| {
                        at(1, ScalarErrorKind::Malformed { expected: "natural", text: trimmed.to_string() })
                    })?)
                };
                match (self, c) {
                    (Semiring::BoundedTropical { bound }, Cost::Finite(n)) if n > bound => {
                        Err(at(1, ScalarErrorKind::ExceedsBound { text: trimmed.to_string(), bound }))
                    }
                    _ => Ok(Value::Cost(c)),
                }
            }
        }
    }
}

/// Parse `p/q`, an integer, or a decimal literal (`0.25`) into an exact
/// rational. On failure returns the 1-based column of the offending byte.
pub fn parse_rational(text: &str) -> Result<BigRational, usize> {
    let digits = |s: &str, base: usize| -> Result<BigInt, usize> {
        if s.is_empty() {
            return Err(base + 1);
        }
        match s.bytes().position(|b| !b.is_ascii_digit()) {
            Some(p) => Err(base + p + 1),
            None => Ok(s.parse().expect("ascii digits")),
        }
    };
    if let Some((n, d)) = text.split_once('/') {
        let numer = digits(n, 0)?;
        let denom = digits(d, n.len() + 1)?;
        if denom.is_zero() {
            return Err(n.len() + 2);
        }
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let int_part = if int.is_empty() { BigInt::zero() } else { digits(int, 0)? };
        let frac_part = digits(frac, int.len() + 1)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(int_part * &scale + frac_part, scale));
    }
    Ok(BigRational::from_integer(digits(text, 0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PROB: Semiring = Semiring::Probabilistic;
    const TROP: Semiring = Semiring::Tropical;

    fn b4() -> Semiring {
        Semiring::bounded_tropical(4).unwrap()
    }

    #[test]
    fn plus_examples() {
        assert_eq!(PROB.plus(&Value::prob(1, 2), &Value::prob(1, 4)), Some(Value::prob(3, 4)));
        assert_eq!(PROB.plus(&Value::prob(3, 4), &Value::prob(1, 2)), None);
        assert_eq!(TROP.plus(&Value::cost(3), &Value::cost(5)), Some(Value::cost(3)));
        assert_eq!(TROP.plus(&Value::INFINITY, &Value::cost(5)), Some(Value::cost(5)));
    }

    #[test]
    fn times_examples() {
        assert_eq!(PROB.times(&Value::prob(1, 2), &Value::prob(1, 2)), Value::prob(1, 4));
        assert_eq!(TROP.times(&Value::cost(2), &Value::cost(3)), Value::cost(5));
        assert_eq!(b4().times(&Value::cost(3), &Value::cost(2)), Value::INFINITY);
        assert_eq!(b4().times(&Value::cost(2), &Value::cost(2)), Value::cost(4));
    }

    #[test]
    fn leq_examples() {
        assert!(TROP.leq(&Value::cost(5), &Value::cost(3)));
        assert!(!TROP.leq(&Value::cost(3), &Value::cost(5)));
        assert!(PROB.leq(&Value::prob(1, 4), &Value::prob(1, 2)));
        for s in [Semiring::Boolean, PROB, TROP, b4()] {
            assert!(s.leq(&s.zero(), &s.one()));
        }
    }

    #[test]
    fn sum_examples() {
        let vals = [Value::prob(1, 2), Value::prob(1, 4), Value::prob(1, 4)];
        assert_eq!(PROB.sum(&vals), Some(Value::prob(1, 1)));
        assert_eq!(PROB.sum(&[]), Some(PROB.zero()));
        let costs = [Value::cost(4), Value::cost(2), Value::cost(7)];
        assert_eq!(TROP.sum(&costs), Some(Value::cost(2)));
        assert_eq!(PROB.sum(&[Value::prob(3, 4), Value::prob(1, 2), Value::prob(0, 1)]), None);
    }

    #[test]
    fn oslash_examples() {
        assert_eq!(TROP.oslash(&Value::cost(4), &Value::cost(1)), Value::cost(3));
        assert_eq!(TROP.oslash(&Value::cost(1), &Value::cost(4)), Value::cost(0));
        assert_eq!(TROP.oslash(&Value::INFINITY, &Value::INFINITY), Value::INFINITY);
        assert_eq!(TROP.oslash(&Value::cost(3), &Value::INFINITY), Value::cost(0));
        for s in [false, true] {
            for t in [false, true] {
                assert_eq!(Semiring::Boolean.oslash(&Value::Bool(s), &Value::Bool(t)), Value::Bool(s));
            }
        }
        assert_eq!(PROB.oslash(&Value::prob(1, 2), &Value::prob(1, 4)), Value::prob(1, 1));
        assert_eq!(PROB.oslash(&Value::prob(1, 4), &Value::prob(1, 2)), Value::prob(1, 2));
        assert_eq!(PROB.oslash(&Value::prob(1, 4), &Value::prob(0, 1)), Value::prob(1, 1));
        assert_eq!(PROB.oslash(&Value::prob(0, 1), &Value::prob(0, 1)), Value::prob(0, 1));
        assert_eq!(b4().oslash(&Value::cost(3), &Value::cost(1)), Value::cost(2));
        assert_eq!(b4().oslash(&Value::cost(1), &Value::cost(3)), Value::cost(0));
        assert_eq!(b4().oslash(&Value::INFINITY, &Value::cost(2)), Value::INFINITY);
    }

    #[test]
    fn parse_scalar_examples() {
        assert_eq!(PROB.parse_scalar("2/5"), Ok(Value::prob(2, 5)));
        assert_eq!(PROB.parse_scalar("0.25"), Ok(Value::prob(1, 4)));
        assert_eq!(PROB.parse_scalar("1"), Ok(Value::prob(1, 1)));
        assert_eq!(TROP.parse_scalar("inf"), Ok(Value::INFINITY));
        assert_eq!(TROP.parse_scalar("17"), Ok(Value::cost(17)));
        assert_eq!(Semiring::Boolean.parse_scalar("1"), Ok(Value::Bool(true)));

        let err = b4().parse_scalar("5").unwrap_err();
        assert!(matches!(err.kind, ScalarErrorKind::ExceedsBound { bound: 4, .. }));
        let err = PROB.parse_scalar("3/2").unwrap_err();
        assert!(matches!(err.kind, ScalarErrorKind::OutOfCarrier { .. }));
        let err = PROB.parse_scalar("1/x").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(PROB.parse_scalar("1/0").is_err());
        assert!(TROP.parse_scalar("-3").is_err());
        assert!(Semiring::Boolean.parse_scalar("2").is_err());
        assert!(matches!(PROB.parse_scalar("").unwrap_err().kind, ScalarErrorKind::Empty));
    }

    #[test]
    fn rendering_round_trips() {
        for (s, v) in [
            (PROB, Value::prob(2, 5)),
            (PROB, Value::prob(0, 1)),
            (PROB, Value::prob(1, 1)),
            (TROP, Value::INFINITY),
            (TROP, Value::cost(12)),
            (Semiring::Boolean, Value::Bool(false)),
        ] {
            assert_eq!(s.parse_scalar(&v.to_string()), Ok(v));
        }
        assert_eq!(Value::prob(2, 5).to_string(), "2/5");
        assert_eq!(Value::prob(4, 4).to_string(), "1");
    }

    #[test]
    fn semiring_names() {
        for s in ["bool", "prob", "trop", "trop[6]"] {
            assert_eq!(s.parse::<Semiring>().unwrap().to_string(), s);
        }
        assert!("trop[0]".parse::<Semiring>().is_err());
        assert!("real".parse::<Semiring>().is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(
            TROP.distance(&Value::cost(3), &Value::cost(7)),
            Distance::Finite(BigRational::from_integer(4.into()))
        );
        assert_eq!(TROP.distance(&Value::cost(3), &Value::INFINITY), Distance::Infinite);
        assert!(TROP.distance(&Value::INFINITY, &Value::INFINITY).is_zero());
        assert!(Distance::Infinite > Distance::Finite(BigRational::from_integer(1000.into())));
    }

    fn prob_value() -> impl Strategy<Value = Value> {
        (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| Value::prob(n, d)))
    }

    proptest! {
        #[test]
        fn prob_plus_commutes(a in prob_value(), b in prob_value()) {
            prop_assert_eq!(PROB.plus(&a, &b), PROB.plus(&b, &a));
        }

        #[test]
        fn prob_distributes_over_defined_sums(s in prob_value(), t in prob_value(), u in prob_value()) {
            if let Some(tu) = PROB.plus(&t, &u) {
                let lhs = PROB.plus(&PROB.times(&s, &t), &PROB.times(&s, &u));
                prop_assert_eq!(lhs, Some(PROB.times(&s, &tu)));
            }
        }

        #[test]
        fn oslash_by_one_is_identity(n in 0u64..50, a in prob_value()) {
            prop_assert_eq!(TROP.oslash(&Value::cost(n), &TROP.one()), Value::cost(n));
            prop_assert_eq!(PROB.oslash(&a, &PROB.one()), a);
        }
    }
}
