//! Field elements used by every engine.
//!
//! Two backends implement [`Scalar`]: exact rationals ([`Exact`], GMP
//! rationals) and binary floats of arbitrary precision ([`BigFloat`], MPFR).
//! Engines are written once against the trait; trigonometric operations are
//! part of the trait but fail with [`Error::Unsupported`] on the exact
//! backend.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default float precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Precision used for integer constants created without a reference value.
/// Arithmetic takes the larger precision of its operands, so these never
/// lower the precision of a computation.
const INT_PREC: u32 = 128;

pub type Exact = Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

pub trait Scalar:
    Sized
    + Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    const BACKEND: Backend;

    fn from_i64(n: i64) -> Self;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    /// `p/q` at the precision of `self` (exact for rationals).
    fn from_ratio_like(&self, p: i64, q: i64) -> Self;

    fn is_zero(&self) -> bool;

    /// -1, 0 or 1.
    fn signum(&self) -> i32;

    fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn to_f64(&self) -> f64;

    /// `None` for the exact backend.
    fn precision(&self) -> Option<u32>;

    fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero"));
        }
        Ok(Self::one() / self)
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero("scalar division"));
        }
        Ok(self.clone() / rhs)
    }

    fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    /// Determinant of a non-empty square matrix given by rows.
    fn determinant(rows: &[Vec<Self>]) -> Self;

    fn sin(&self) -> Result<Self>;
    fn cos(&self) -> Result<Self>;
    fn atan(&self) -> Result<Self>;
    fn pi_like(&self) -> Result<Self>;

    /// Rationals as `"num/den"`; floats as a fixed-width decimal string.
    fn to_report_string(&self) -> String;
}

fn trig_unsupported<T>() -> Result<T> {
    Err(Error::Unsupported(
        "trigonometric parametrisation requires the float backend".into(),
    ))
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_i64(n: i64) -> Self {
        Rational::from(n)
    }

    fn from_ratio_like(&self, p: i64, q: i64) -> Self {
        Rational::from((p, q))
    }

    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }

    fn signum(&self) -> i32 {
        match self.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }

    fn precision(&self) -> Option<u32> {
        None
    }

    fn determinant(rows: &[Vec<Self>]) -> Self {
        bareiss_rational(rows)
    }

    fn sin(&self) -> Result<Self> {
        trig_unsupported()
    }

    fn cos(&self) -> Result<Self> {
        trig_unsupported()
    }

    fn atan(&self) -> Result<Self> {
        trig_unsupported()
    }

    fn pi_like(&self) -> Result<Self> {
        trig_unsupported()
    }

    fn to_report_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Fraction-free elimination: rows are scaled to integers, then Bareiss.
fn bareiss_rational(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    assert!(n > 0, "determinant of an empty matrix");
    let mut scale = Integer::from(1);
    let mut m: Vec<Vec<Integer>> = Vec::with_capacity(n);
    for row in rows {
        assert_eq!(row.len(), n, "determinant of a non-square matrix");
        let mut l = Integer::from(1);
        for x in row {
            l.lcm_mut(x.denom());
        }
        m.push(
            row.iter()
                .map(|x| x.numer() * Integer::from(&l / x.denom()))
                .collect(),
        );
        scale *= l;
    }
    let det = bareiss_integer(&mut m);
    Rational::from((det, scale))
}

/// Bareiss elimination in place; returns the determinant.
pub(crate) fn bareiss_integer(m: &mut [Vec<Integer>]) -> Integer {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].cmp0() == Ordering::Equal {
            match (k + 1..n).find(|&i| m[i][k].cmp0() != Ordering::Equal) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&m[i][j] * &m[k][k]) - Integer::from(&m[i][k] * &m[k][j]);
                // exact by Sylvester's identity
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Arbitrary-precision binary float. Binary operations round to the larger
/// precision of the two operands.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn from_f64(prec: u32, v: f64) -> Self {
        BigFloat(Float::with_val(prec, v))
    }

    pub fn from_int(prec: u32, n: i64) -> Self {
        BigFloat(Float::with_val(prec, n))
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        BigFloat(Float::with_val(prec, q))
    }

    /// Parses a decimal literal (`"0.35"`, `"1e-3"`) or a ratio `"p/q"`.
    pub fn parse(prec: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let q: Rational = parse_rational(&format!("{p}/{q}"))?;
            return Ok(Self::from_rational(prec, &q));
        }
        Float::parse(s)
            .map(|v| BigFloat(Float::with_val(prec, v)))
            .map_err(|_| Error::Parse {
                what: "float",
                input: s.to_string(),
            })
    }

    pub fn pi(prec: u32) -> Self {
        BigFloat(Float::with_val(prec, Constant::Pi))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    pub fn sqrt(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigFloat(Float::with_val(prec, &self.0))
    }

    /// |self - other| / max(|self|, |other|); zero when both are zero.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let d = (self.clone() - other).abs();
        let m = if self.0.cmp_abs(&other.0) == Some(Ordering::Greater) {
            self.abs()
        } else {
            other.abs()
        };
        if m.is_zero() {
            return 0.0;
        }
        (d / &m).to_f64()
    }

    /// Relative agreement with `reference`; an exactly-zero reference is
    /// matched absolutely instead.
    pub fn agrees_with(&self, reference: &Self, tol: f64) -> bool {
        if reference.is_zero() {
            self.abs().to_f64() <= tol
        } else {
            self.rel_diff(reference) <= tol
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_report_string())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_report_string())
    }
}

macro_rules! float_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                let p = self.0.prec().max(rhs.0.prec());
                BigFloat(Float::with_val(p, $tr::$method(&self.0, &rhs.0)))
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                $tr::$method(self, &rhs)
            }
        }
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                let p = self.0.prec().max(rhs.0.prec());
                BigFloat(Float::with_val(p, $tr::$method(&self.0, &rhs.0)))
            }
        }
    };
}

float_binop!(Add, add);
float_binop!(Sub, sub);
float_binop!(Mul, mul);
float_binop!(Div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Scalar for BigFloat {
    const BACKEND: Backend = Backend::Float;

    fn from_i64(n: i64) -> Self {
        BigFloat(Float::with_val(INT_PREC, n))
    }

    fn from_ratio_like(&self, p: i64, q: i64) -> Self {
        let prec = self.prec();
        BigFloat(Float::with_val(prec, p) / Float::with_val(prec, q))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn precision(&self) -> Option<u32> {
        Some(self.prec())
    }

    fn determinant(rows: &[Vec<Self>]) -> Self {
        pivoted_det(rows)
    }

    fn sin(&self) -> Result<Self> {
        Ok(BigFloat(Float::with_val(self.prec(), self.0.sin_ref())))
    }

    fn cos(&self) -> Result<Self> {
        Ok(BigFloat(Float::with_val(self.prec(), self.0.cos_ref())))
    }

    fn atan(&self) -> Result<Self> {
        Ok(BigFloat(Float::with_val(self.prec(), self.0.atan_ref())))
    }

    fn pi_like(&self) -> Result<Self> {
        Ok(BigFloat::pi(self.prec()))
    }

    fn to_report_string(&self) -> String {
        // enough digits to round-trip the binary mantissa
        let digits = (f64::from(self.prec()) * std::f64::consts::LOG10_2).ceil() as usize + 1;
        self.0.to_string_radix(10, Some(digits))
    }
}

/// Gaussian elimination with partial pivoting; row order fixes the summation
/// order, so results are reproducible bit for bit.
fn pivoted_det(rows: &[Vec<BigFloat>]) -> BigFloat {
    let n = rows.len();
    assert!(n > 0, "determinant of an empty matrix");
    let mut m: Vec<Vec<BigFloat>> = rows.to_vec();
    for row in &m {
        assert_eq!(row.len(), n, "determinant of a non-square matrix");
    }
    let mut det = BigFloat::one();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[i][k].0.cmp_abs(&m[p][k].0) == Some(Ordering::Greater) {
                p = i;
            }
        }
        if m[p][k].is_zero() {
            return BigFloat::zero() * &m[k][k];
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone() / &pivot;
            for j in k + 1..n {
                let t = f.clone() * &m[k][j];
                m[i][j] = m[i][j].clone() - &t;
            }
        }
        det = det * &pivot;
    }
    det
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: Integer = p.parse().map_err(|_| err())?;
    let q: Integer = q.parse().map_err(|_| err())?;
    if q.cmp0() == Ordering::Equal {
        return Err(Error::DivisionByZero("rational literal with zero denominator"));
    }
    Ok(Rational::from((p, q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_report_format() {
        assert_eq!(Rational::from(0).to_report_string(), "0/1");
        assert_eq!(Rational::from((6, -4)).to_report_string(), "-3/2");
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational(" -3 ").unwrap(), Rational::from(-3));
        assert!(matches!(parse_rational("0.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse_rational("1/0"), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn float_ops_take_larger_precision() {
        let a = BigFloat::from_f64(64, 1.5);
        let b = BigFloat::from_f64(256, 0.25);
        assert_eq!((a.clone() + &b).prec(), 256);
        assert_eq!((b * a).prec(), 256);
    }

    #[test]
    fn exact_rejects_trig() {
        assert!(matches!(Rational::from(1).sin(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bareiss_with_row_swap() {
        let m = vec![
            vec![Rational::from(0), Rational::from((1, 2))],
            vec![Rational::from(3), Rational::from(4)],
        ];
        assert_eq!(Rational::determinant(&m), Rational::from((-3, 2)));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Rational::from((-2, 3));
        assert_eq!(x.powi(5), Rational::from((-32, 243)));
        assert_eq!(x.powi(0), Rational::from(1));
    }
}
