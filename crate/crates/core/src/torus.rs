//! Exact homology calculus for simple closed multicurves on an oriented torus.
//!
//! Classes are integer pairs `(p, q)` in the basis where the horizontal curve
//! is `(1, 0)` and the vertical (meridian) curve is `(0, 1)`, with
//! `î((1,0),(0,1)) = +1`.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("twisting curve is the empty class (0,0)")]
    ZeroTwister,
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("cannot parse torus class from {0:?} (expected `p,q`)")]
    Parse(String),
}

/// Oriented homology class of a multicurve on the torus.
///
/// `(0, 0)` is the empty multicurve. A connected essential curve has
/// `gcd(|p|, |q|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct TorusClass {
    pub p: i64,
    pub q: i64,
}

impl TorusClass {
    pub const EMPTY: TorusClass = TorusClass { p: 0, q: 0 };
    /// The meridian of a chart.
    pub const MERIDIAN: TorusClass = TorusClass { p: 0, q: 1 };
    pub const HORIZONTAL: TorusClass = TorusClass { p: 1, q: 0 };

    pub const fn new(p: i64, q: i64) -> Self {
        TorusClass { p, q }
    }

    pub fn is_empty(self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// Number of parallel components, `gcd(|p|, |q|)`.
    pub fn divisor(self) -> u64 {
        self.p.unsigned_abs().gcd(&self.q.unsigned_abs())
    }

    pub fn is_primitive(self) -> bool {
        self.divisor() == 1
    }

    /// Representative of `±self` with `p > 0`, or `p = 0` and `q >= 0`.
    pub fn sign_normalized(self) -> Self {
        if self.p < 0 || (self.p == 0 && self.q < 0) {
            -self
        } else {
            self
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self, TorusError> {
        Ok(TorusClass {
            p: self.p.checked_add(other.p).ok_or(TorusError::Overflow("sum"))?,
            q: self.q.checked_add(other.q).ok_or(TorusError::Overflow("sum"))?,
        })
    }

    pub fn checked_sub(self, other: Self) -> Result<Self, TorusError> {
        Ok(TorusClass {
            p: self.p.checked_sub(other.p).ok_or(TorusError::Overflow("difference"))?,
            q: self.q.checked_sub(other.q).ok_or(TorusError::Overflow("difference"))?,
        })
    }

    pub fn checked_scale(self, factor: i64) -> Result<Self, TorusError> {
        Ok(TorusClass {
            p: self.p.checked_mul(factor).ok_or(TorusError::Overflow("scaling"))?,
            q: self.q.checked_mul(factor).ok_or(TorusError::Overflow("scaling"))?,
        })
    }
}

impl Neg for TorusClass {
    type Output = TorusClass;
    fn neg(self) -> TorusClass {
        TorusClass::new(-self.p, -self.q)
    }
}

impl From<[i64; 2]> for TorusClass {
    fn from([p, q]: [i64; 2]) -> Self {
        TorusClass { p, q }
    }
}

impl From<TorusClass> for [i64; 2] {
    fn from(c: TorusClass) -> Self {
        [c.p, c.q]
    }
}

impl From<(i64, i64)> for TorusClass {
    fn from((p, q): (i64, i64)) -> Self {
        TorusClass { p, q }
    }
}

impl fmt::Display for TorusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl FromStr for TorusClass {
    type Err = TorusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TorusError::Parse(s.to_string());
        let (p, q) = s.trim().split_once(',').ok_or_else(err)?;
        let p = p.trim().parse().map_err(|_| err())?;
        let q = q.trim().parse().map_err(|_| err())?;
        Ok(TorusClass { p, q })
    }
}

/// Unoriented multicurve stored as `multiplicity × primitive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusMulticurve {
    pub multiplicity: u64,
    pub primitive: TorusClass,
}

impl TorusMulticurve {
    pub const EMPTY: TorusMulticurve = TorusMulticurve {
        multiplicity: 0,
        primitive: TorusClass::EMPTY,
    };

    pub fn is_empty(&self) -> bool {
        self.multiplicity == 0
    }

    /// The raw class `(m·p, m·q)` in normalized orientation.
    pub fn total(&self) -> TorusClass {
        let m = self.multiplicity as i64;
        TorusClass::new(self.primitive.p * m, self.primitive.q * m)
    }
}

impl fmt::Display for TorusMulticurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "empty")
        } else {
            write!(f, "{}x({})", self.multiplicity, self.primitive)
        }
    }
}

/// The two crossing resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Joins arcs so that local orientations agree (after orienting the
    /// second curve so every crossing has index +1).
    Sharp,
    /// Joins arcs whose local orientations disagree.
    Flat,
}

impl Mode {
    pub fn mirror(self) -> Mode {
        match self {
            Mode::Sharp => Mode::Flat,
            Mode::Flat => Mode::Sharp,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sharp => "sharp",
            Mode::Flat => "flat",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sharp" | "#" => Ok(Mode::Sharp),
            "flat" | "b" => Ok(Mode::Flat),
            other => Err(format!("unknown resolution mode {other:?} (expected sharp|flat)")),
        }
    }
}

/// Signed intersection `p·s − q·r` of `a = (p,q)` and `b = (r,s)`.
///
/// Computed in `i128`, which cannot overflow for `i64` entries.
pub fn algebraic_intersection(a: TorusClass, b: TorusClass) -> i128 {
    a.p as i128 * b.q as i128 - a.q as i128 * b.p as i128
}

/// Minimal crossing count `|p·s − q·r|` of straight representatives.
pub fn geometric_intersection(a: TorusClass, b: TorusClass) -> u128 {
    algebraic_intersection(a, b).unsigned_abs()
}

/// `k`-fold Dehn twist of `target` about `twister`: `b + k·î(b,a)·a`.
///
/// With this convention `T^k_(0,1)(1,0) = (1,k)`.
pub fn dehn_twist(target: TorusClass, twister: TorusClass, k: i64) -> Result<TorusClass, TorusError> {
    if twister.is_empty() {
        return Err(TorusError::ZeroTwister);
    }
    let coeff = (k as i128)
        .checked_mul(algebraic_intersection(target, twister))
        .ok_or(TorusError::Overflow("twist"))?;
    let shift = |base: i64, dir: i64| -> Result<i64, TorusError> {
        let v = (dir as i128)
            .checked_mul(coeff)
            .and_then(|d| d.checked_add(base as i128))
            .ok_or(TorusError::Overflow("twist"))?;
        i64::try_from(v).map_err(|_| TorusError::Overflow("twist"))
    };
    Ok(TorusClass::new(
        shift(target.p, twister.p)?,
        shift(target.q, twister.q)?,
    ))
}

/// Resolve every crossing of `first` and `second` in the given mode.
///
/// With `d = î(first, second)`: for `d > 0` sharp is the sum and flat the
/// difference; for `d < 0` the roles swap. Disjoint (parallel) curves have
/// no crossings, so both modes return the union.
pub fn resolve(first: TorusClass, second: TorusClass, mode: Mode) -> Result<TorusClass, TorusError> {
    let d = algebraic_intersection(first, second);
    let sum = matches!((d.signum(), mode), (0, _) | (1, Mode::Sharp) | (-1, Mode::Flat));
    if sum {
        first.checked_add(second)
    } else {
        first.checked_sub(second)
    }
}

/// Split a raw class into multiplicity and sign-normalized primitive part.
pub fn normalize(raw: TorusClass) -> TorusMulticurve {
    if raw.is_empty() {
        return TorusMulticurve::EMPTY;
    }
    let m = raw.divisor();
    let primitive = TorusClass::new(raw.p / m as i64, raw.q / m as i64).sign_normalized();
    TorusMulticurve {
        multiplicity: m,
        primitive,
    }
}

/// Equality of unoriented classes.
pub fn same_unoriented(a: TorusClass, b: TorusClass) -> bool {
    a.sign_normalized() == b.sign_normalized()
}
