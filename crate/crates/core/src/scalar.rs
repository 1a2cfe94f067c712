//! Parameter values that are either exact complex rationals or floats.
//!
//! Literals written without a decimal point or exponent (`3/2`, `-1+2i`, `i`)
//! parse as exact values; anything else becomes a float. Arithmetic between an
//! exact and a float value degrades to float.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{Field, QComplex};

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(QComplex),
    Float(Complex64),
}

impl Scalar {
    pub fn one() -> Self {
        Scalar::Exact(QComplex::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(QComplex::from_i64(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(QComplex::from_ratio(n, d))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => z.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_c64() * other.to_c64()),
        }
    }

    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(z) => z.recip().map(Scalar::Exact),
            Scalar::Float(z) => {
                if z.norm() == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(z.inv()))
                }
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.recip().map(|r| self.mul(&r))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z.clone()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn powi(&self, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            k >>= 1;
        }
        if !self.is_exact() {
            acc = Scalar::Float(acc.to_c64());
        }
        Some(acc)
    }

    /// Exact comparison for exact pairs, tolerance comparison otherwise.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let a = self.to_c64();
                let b = other.to_c64();
                (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
            }
        }
    }

    pub fn is_one(&self, tol: f64) -> bool {
        self.approx_eq(&Scalar::one(), tol)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => {
                if z.im.is_zero() {
                    write!(f, "{}", fmt_rational(&z.re))
                } else if z.re.is_zero() {
                    write!(f, "{}i", fmt_rational(&z.im))
                } else {
                    let sign = if z.im.is_negative() { "-" } else { "+" };
                    write!(f, "{}{}{}i", fmt_rational(&z.re), sign, fmt_rational(&z.im.abs()))
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", fmt_float(z.re))
                } else {
                    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
                    write!(f, "{}{}{}i", fmt_float(z.re), sign, fmt_float(z.im.abs()))
                }
            }
        }
    }
}

enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            Real::Float(x) => *x,
        }
    }
}

fn parse_real(s: &str) -> Result<Real, String> {
    if s.is_empty() {
        return Err("empty number".into());
    }
    let is_float = s.contains(['.', 'e', 'E']) || s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("nan");
    if is_float {
        if s.contains('/') {
            return Err(format!("cannot mix '/' with a decimal literal in '{s}'"));
        }
        return s
            .parse::<f64>()
            .map(Real::Float)
            .map_err(|_| format!("invalid decimal literal '{s}'"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| format!("invalid integer '{num}'"))?;
    let d = BigInt::from_str(den).map_err(|_| format!("invalid integer '{den}'"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(Real::Exact(BigRational::new(n, d)))
}

/// Splits `s` at the sign separating real and imaginary parts, if any.
fn split_complex(s: &str) -> Option<usize> {
    let b = s.as_bytes();
    (1..b.len())
        .rev()
        .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'))
}

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty scalar".into());
        }
        let (re_str, im_str) = if let Some(body) = s.strip_suffix('i') {
            match split_complex(body) {
                Some(k) => (&body[..k], Some(&body[k..])),
                None => ("", Some(body)),
            }
        } else {
            (s, None)
        };
        let re = if re_str.is_empty() {
            Real::Exact(BigRational::zero())
        } else {
            parse_real(re_str)?
        };
        let im = match im_str {
            None => Real::Exact(BigRational::zero()),
            Some(t) => {
                let t = match t {
                    "" | "+" => "1".to_string(),
                    "-" => "-1".to_string(),
                    _ => t.strip_prefix('+').unwrap_or(t).to_string(),
                };
                parse_real(&t)?
            }
        };
        Ok(match (re, im) {
            (Real::Exact(a), Real::Exact(b)) => Scalar::Exact(QComplex::new(a, b)),
            (a, b) => Scalar::Float(Complex64::new(a.to_f64(), b.to_f64())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn parses_literals() {
        assert_eq!(p("3/2"), Scalar::ratio(3, 2));
        assert_eq!(p("-1"), Scalar::int(-1));
        assert_eq!(p("i").to_c64(), Complex64::new(0.0, 1.0));
        assert_eq!(p("-i").to_c64(), Complex64::new(0.0, -1.0));
        assert_eq!(p("1/2-3/4i").to_c64(), Complex64::new(0.5, -0.75));
        assert!(p("1/2-3/4i").is_exact());
        assert_eq!(p("2.5"), Scalar::float(2.5, 0.0));
        assert_eq!(p("1e-3+2i"), Scalar::float(1e-3, 2.0));
        assert!(p("1.0").to_string().contains('.'));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["3/2", "-1", "2i", "1/2-3/4i", "-7/3+1i", "2.5", "1e-10-0.5i", "0"] {
            let v = p(s);
            assert_eq!(p(&v.to_string()), v, "{s}");
        }
    }

    #[test]
    fn powers() {
        let q = Scalar::ratio(3, 2);
        assert_eq!(q.powi(-2).unwrap(), Scalar::ratio(4, 9));
        assert_eq!(q.powi(0).unwrap(), Scalar::one());
        assert!(Scalar::int(0).powi(-1).is_none());
    }
}
