//! Exact arithmetic in the three shipped scalar domains: the rationals, the
//! Gaussian rationals, and the rational quaternions.
//!
//! Every component is an arbitrary-precision `BigRational`, so all identities
//! checked elsewhere in the crate are exact — there is no floating point
//! anywhere. The quaternions are the division algebra with `i^2 = j^2 = -1`
//! and `ij = k = -ji`; the standard involution negates the imaginary part in
//! both non-commutative cases and is the identity on the rationals.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldTag {
    Rational,
    GaussianRational,
    RationalQuaternion,
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FieldTag::Rational => "rational",
            FieldTag::GaussianRational => "gaussian-rational",
            FieldTag::RationalQuaternion => "rational-quaternion",
        };
        write!(f, "{name}")
    }
}

/// The involution paired with a field in a skew-field context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvolutionKind {
    Identity,
    Conjugation,
}

/// A scalar of one of the shipped fields. The variant is the representation
/// tag; operations on mixed variants are rejected, never coerced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkewScalar {
    Rational(BigRational),
    Gaussian {
        re: BigRational,
        im: BigRational,
    },
    /// `a + b i + c j + d k`.
    Quaternion {
        a: BigRational,
        b: BigRational,
        c: BigRational,
        d: BigRational,
    },
}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl SkewScalar {
    pub fn tag(&self) -> FieldTag {
        match self {
            SkewScalar::Rational(_) => FieldTag::Rational,
            SkewScalar::Gaussian { .. } => FieldTag::GaussianRational,
            SkewScalar::Quaternion { .. } => FieldTag::RationalQuaternion,
        }
    }

    pub fn zero(field: FieldTag) -> Self {
        SkewScalar::from_components(field, [rat(0), rat(0), rat(0), rat(0)])
    }

    pub fn one(field: FieldTag) -> Self {
        SkewScalar::from_components(field, [rat(1), rat(0), rat(0), rat(0)])
    }

    pub fn from_integer(field: FieldTag, n: i64) -> Self {
        SkewScalar::from_components(field, [rat(n), rat(0), rat(0), rat(0)])
    }

    pub fn from_rational(field: FieldTag, q: BigRational) -> Self {
        SkewScalar::from_components(field, [q, rat(0), rat(0), rat(0)])
    }

    /// Builds a scalar from up to four components `(1, i, j, k)`; components
    /// beyond the field's dimension must be zero.
    pub fn from_components(field: FieldTag, c: [BigRational; 4]) -> Self {
        let [a, b, cc, d] = c;
        match field {
            FieldTag::Rational => {
                assert!(b.is_zero() && cc.is_zero() && d.is_zero());
                SkewScalar::Rational(a)
            }
            FieldTag::GaussianRational => {
                assert!(cc.is_zero() && d.is_zero());
                SkewScalar::Gaussian { re: a, im: b }
            }
            FieldTag::RationalQuaternion => SkewScalar::Quaternion { a, b, c: cc, d },
        }
    }

    /// Components on the basis `(1, i, j, k)`, zero-padded.
    pub fn components(&self) -> [BigRational; 4] {
        match self {
            SkewScalar::Rational(a) => [a.clone(), rat(0), rat(0), rat(0)],
            SkewScalar::Gaussian { re, im } => [re.clone(), im.clone(), rat(0), rat(0)],
            SkewScalar::Quaternion { a, b, c, d } => {
                [a.clone(), b.clone(), c.clone(), d.clone()]
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        let [a, b, c, d] = self.components();
        a.is_one() && b.is_zero() && c.is_zero() && d.is_zero()
    }

    /// The rational value, if the scalar has zero imaginary part.
    pub fn as_rational(&self) -> Option<BigRational> {
        let [a, b, c, d] = self.components();
        (b.is_zero() && c.is_zero() && d.is_zero()).then_some(a)
    }

    fn check_same(&self, other: &SkewScalar) -> Result<()> {
        if self.tag() == other.tag() {
            Ok(())
        } else {
            Err(Error::RepresentationMismatch {
                left: self.tag(),
                right: other.tag(),
            })
        }
    }

    pub fn checked_add(&self, other: &SkewScalar) -> Result<SkewScalar> {
        self.check_same(other)?;
        let [a1, b1, c1, d1] = self.components();
        let [a2, b2, c2, d2] = other.components();
        Ok(SkewScalar::from_components(
            self.tag(),
            [a1 + a2, b1 + b2, c1 + c2, d1 + d2],
        ))
    }

    pub fn checked_sub(&self, other: &SkewScalar) -> Result<SkewScalar> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> SkewScalar {
        let [a, b, c, d] = self.components();
        SkewScalar::from_components(self.tag(), [-a, -b, -c, -d])
    }

    pub fn checked_mul(&self, other: &SkewScalar) -> Result<SkewScalar> {
        self.check_same(other)?;
        match (self, other) {
            (SkewScalar::Rational(x), SkewScalar::Rational(y)) => {
                Ok(SkewScalar::Rational(x * y))
            }
            (
                SkewScalar::Gaussian { re: x, im: y },
                SkewScalar::Gaussian { re: u, im: v },
            ) => Ok(SkewScalar::Gaussian {
                re: x * u - y * v,
                im: x * v + y * u,
            }),
            (
                SkewScalar::Quaternion {
                    a: a1,
                    b: b1,
                    c: c1,
                    d: d1,
                },
                SkewScalar::Quaternion {
                    a: a2,
                    b: b2,
                    c: c2,
                    d: d2,
                },
            ) => Ok(SkewScalar::Quaternion {
                a: a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                b: a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                c: a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                d: a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            }),
            _ => unreachable!("tags already checked"),
        }
    }

    /// The standard involution: identity on rationals, conjugation otherwise.
    pub fn conj(&self) -> SkewScalar {
        let [a, b, c, d] = self.components();
        SkewScalar::from_components(self.tag(), [a, -b, -c, -d])
    }

    /// Reduced norm `x * conj(x)`, always a rational.
    pub fn norm(&self) -> BigRational {
        let [a, b, c, d] = self.components();
        &a * &a + &b * &b + &c * &c + &d * &d
    }

    pub fn inv(&self) -> Result<SkewScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let [a, b, c, d] = self.conj().components();
        Ok(SkewScalar::from_components(
            self.tag(),
            [a / &n, b / &n, c / &n, d / &n],
        ))
    }

    /// Panicking convenience wrappers for internal use after tags have been
    /// validated at the boundary.
    pub fn add(&self, other: &SkewScalar) -> SkewScalar {
        self.checked_add(other).expect("mixed-field add")
    }

    pub fn sub(&self, other: &SkewScalar) -> SkewScalar {
        self.checked_sub(other).expect("mixed-field sub")
    }

    pub fn mul(&self, other: &SkewScalar) -> SkewScalar {
        self.checked_mul(other).expect("mixed-field mul")
    }
}

/// A skew field together with its involution. All shipped instances use the
/// standard conjugation (which degenerates to the identity on the rationals).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewFieldCtx {
    pub field: FieldTag,
    pub involution: InvolutionKind,
}

impl SkewFieldCtx {
    pub fn new(field: FieldTag, involution: InvolutionKind) -> Result<Self> {
        // The identity is an anti-automorphism only on a commutative field.
        if involution == InvolutionKind::Identity && field == FieldTag::RationalQuaternion {
            return Err(Error::Config(
                "identity is not an involution of a non-commutative field".into(),
            ));
        }
        Ok(SkewFieldCtx { field, involution })
    }

    pub fn standard(field: FieldTag) -> Self {
        let involution = match field {
            FieldTag::Rational => InvolutionKind::Identity,
            _ => InvolutionKind::Conjugation,
        };
        SkewFieldCtx { field, involution }
    }

    pub fn sigma(&self, x: &SkewScalar) -> SkewScalar {
        match self.involution {
            InvolutionKind::Identity => x.clone(),
            InvolutionKind::Conjugation => x.conj(),
        }
    }

    pub fn zero(&self) -> SkewScalar {
        SkewScalar::zero(self.field)
    }

    pub fn one(&self) -> SkewScalar {
        SkewScalar::one(self.field)
    }

    pub fn int(&self, n: i64) -> SkewScalar {
        SkewScalar::from_integer(self.field, n)
    }

    /// The distinguished imaginary unit, where the field has one.
    pub fn unit_i(&self) -> Result<SkewScalar> {
        match self.field {
            FieldTag::Rational => Err(Error::Config("field has no imaginary unit".into())),
            tag => Ok(SkewScalar::from_components(
                tag,
                [rat(0), rat(1), rat(0), rat(0)],
            )),
        }
    }
}

/// A multiplication view: either the field's own product or the opposite one
/// `a * b := ba`. Root-group layers for interior panels multiply through the
/// opposite view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulView {
    pub opposite: bool,
}

impl MulView {
    pub fn plain() -> Self {
        MulView { opposite: false }
    }

    pub fn opposite() -> Self {
        MulView { opposite: true }
    }

    pub fn mul(&self, a: &SkewScalar, b: &SkewScalar) -> SkewScalar {
        if self.opposite {
            b.mul(a)
        } else {
            a.mul(b)
        }
    }
}

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

/// Prints the canonical literal form: zero terms dropped, unit coefficients
/// on `i`, `j`, `k` elided, components ordered `1, i, j, k`.
impl fmt::Display for SkewScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps = self.components();
        let units = ["", "i", "j", "k"];
        let mut wrote = false;
        for (coef, unit) in comps.iter().zip(units) {
            if coef.is_zero() {
                continue;
            }
            if wrote {
                write!(f, "{}", if coef.is_negative() { "-" } else { "+" })?;
            } else if coef.is_negative() {
                write!(f, "-")?;
            }
            let mag = coef.abs();
            if unit.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{unit}")?;
            } else {
                write!(f, "{mag}*{unit}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("bad rational literal `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// Parses a scalar literal such as `-3/4`, `1+i`, `2-5*j`, `1/2+1/2*i+1/2*j+1/2*k`
/// into the given field. Units not present in the field are rejected.
pub fn parse_scalar(field: FieldTag, input: &str) -> Result<SkewScalar> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar literal".into()));
    }
    let mut comps = [rat(0), rat(0), rat(0), rat(0)];
    // Split into signed terms; every top-level '+'/'-' starts a new term.
    let mut terms: Vec<String> = Vec::new();
    for (idx, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && idx != 0 {
            terms.push(String::new());
        }
        if terms.is_empty() {
            terms.push(String::new());
        }
        terms.last_mut().unwrap().push(ch);
    }
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{input}`")));
        }
        let (coef_str, unit) = if let Some(stripped) = body.strip_suffix(['i', 'j', 'k']) {
            let unit = body.chars().last().unwrap();
            let coef = stripped.strip_suffix('*').unwrap_or(stripped);
            (coef, Some(unit))
        } else {
            (body, None)
        };
        let coef = if coef_str.is_empty() {
            if unit.is_none() {
                return Err(Error::Parse(format!("empty term in `{input}`")));
            }
            rat(1)
        } else {
            parse_rational(coef_str)?
        };
        let slot = match unit {
            None => 0,
            Some('i') => 1,
            Some('j') => 2,
            Some('k') => 3,
            Some(_) => unreachable!(),
        };
        let max_slot = match field {
            FieldTag::Rational => 0,
            FieldTag::GaussianRational => 1,
            FieldTag::RationalQuaternion => 3,
        };
        if slot > max_slot {
            return Err(Error::Parse(format!(
                "unit `{}` is not available in the {field} field",
                unit.unwrap()
            )));
        }
        comps[slot] += BigRational::from(BigInt::from(sign)) * coef;
    }
    Ok(SkewScalar::from_components(field, comps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(field: FieldTag, s: &str) -> SkewScalar {
        parse_scalar(field, s).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        let f = FieldTag::Rational;
        let sum = q(f, "1/2").add(&q(f, "1/3"));
        assert_eq!(sum, q(f, "5/6"));
    }

    #[test]
    fn quaternion_products_follow_the_sign_table() {
        let f = FieldTag::RationalQuaternion;
        let (i, j, k) = (q(f, "i"), q(f, "j"), q(f, "k"));
        assert_eq!(i.mul(&j), k);
        assert_eq!(j.mul(&i), k.neg());
        assert_eq!(j.mul(&k), i);
        assert_eq!(k.mul(&i), j);
        assert_eq!(i.mul(&i), q(f, "-1"));
    }

    #[test]
    fn quaternion_inverse_of_one_plus_i() {
        // (1+i)^{-1} = (1-i)/2, confirmed by multiplying back to 1.
        let f = FieldTag::RationalQuaternion;
        let x = q(f, "1+i");
        let inv = x.inv().unwrap();
        assert_eq!(inv, q(f, "1/2-1/2*i"));
        assert!(x.mul(&inv).is_one());
        assert!(inv.mul(&x).is_one());
    }

    #[test]
    fn inverse_of_zero_is_rejected() {
        assert_eq!(
            SkewScalar::zero(FieldTag::GaussianRational).inv(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn mixed_representations_are_rejected() {
        let a = SkewScalar::one(FieldTag::Rational);
        let b = SkewScalar::one(FieldTag::GaussianRational);
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn conjugation_reverses_products() {
        let f = FieldTag::RationalQuaternion;
        let a = q(f, "1+2*i-j");
        let b = q(f, "3-i+k");
        assert_eq!(a.mul(&b).conj(), b.conj().mul(&a.conj()));
    }

    #[test]
    fn norm_is_multiplicative() {
        let f = FieldTag::RationalQuaternion;
        let a = q(f, "1/2+i-3*k");
        let b = q(f, "2-j+k");
        assert_eq!(a.mul(&b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn opposite_view_reverses_the_product() {
        let f = FieldTag::RationalQuaternion;
        let (a, b) = (q(f, "i"), q(f, "j"));
        assert_eq!(MulView::opposite().mul(&a, &b), b.mul(&a));
        assert_eq!(MulView::plain().mul(&a, &b), a.mul(&b));
    }

    #[test]
    fn display_is_canonical() {
        let f = FieldTag::RationalQuaternion;
        for lit in ["0", "1", "-1", "i", "-i", "1/2", "1+i", "2-5*j", "-3/4+k", "7*i-j"] {
            assert_eq!(q(f, lit).to_string(), lit);
        }
    }

    #[test]
    fn parse_rejects_foreign_units() {
        assert!(parse_scalar(FieldTag::Rational, "i").is_err());
        assert!(parse_scalar(FieldTag::GaussianRational, "j").is_err());
        assert!(parse_scalar(FieldTag::GaussianRational, "1+i").is_ok());
    }
}
