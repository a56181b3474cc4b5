//! Reduced rational functions in one formal parameter.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1` and `den` monic. Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    /// The parameter itself.
    pub fn var() -> Self {
        Self::from_poly(UniPoly::var())
    }

    pub fn from_poly(num: UniPoly) -> Self {
        RatFunc {
            num,
            den: UniPoly::one(),
        }
    }

    /// Reduced representative of `num / den`.
    pub fn normalize(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        Ok(Self::with_monic_den(num, den))
    }

    /// Caller guarantees `gcd(num, den) = 1` and `den != 0`.
    fn with_monic_den(num: UniPoly, den: UniPoly) -> Self {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Returns the value when this is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    /// Value at the origin.
    pub fn eval_zero(&self) -> Result<Rational> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::PoleAtOrigin);
        }
        Ok(self.num.coeff(0) / d0)
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(t) / d)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::with_monic_den(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Derivative with respect to the parameter.
    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalize(n, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Substitutes `t -> t^(-k)` and returns the result as a rational function in `t`.
    pub fn substitute_inverse_power(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let p = self.num.degree().unwrap();
        let r = self.den.degree().unwrap();
        let mut num = self.num.reversed().inflate(k);
        let mut den = self.den.reversed().inflate(k);
        if r >= p {
            num = num.shift(k * (r - p));
        } else {
            den = den.shift(k * (p - r));
        }
        Self::normalize(num, den).expect("reversed denominator is nonzero")
    }

    /// Writes `f(psi)` as `E(z)` with `z = psi^(-k)`, verified by resubstitution.
    pub fn psi_to_z(&self, k: usize) -> Result<Self> {
        assert!(k >= 1, "k must be positive");
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let not_invariant = || Error::NotInvariantUnderMuK { k: k as u32 };
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        let n1 = self.num.unshift(vn).deflate(k).ok_or_else(not_invariant)?;
        let d1 = self.den.unshift(vd).deflate(k).ok_or_else(not_invariant)?;
        let diff = vn as i64 - vd as i64;
        if diff.rem_euclid(k as i64) != 0 {
            return Err(not_invariant());
        }
        // f = (psi^k)^e * n1(psi^k) / d1(psi^k), psi^k = 1/z
        let e = diff / k as i64;
        let s = d1.degree().unwrap() as i64 - n1.degree().unwrap() as i64 - e;
        let mut num = n1.reversed();
        let mut den = d1.reversed();
        if s >= 0 {
            num = num.shift(s as usize);
        } else {
            den = den.shift((-s) as usize);
        }
        let out = Self::normalize(num, den)?;
        if out.substitute_inverse_power(k) != *self {
            return Err(not_invariant());
        }
        Ok(out)
    }

    /// Formats with the given variable name, factoring out rational content:
    /// `1/(625*(z-1))`, `-15*(z+256)/(512*(z-256))`, `2*z/(z-1)`.
    pub fn display_in<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        RatFuncDisplay { f: self, var }
    }
}

struct RatFuncDisplay<'a> {
    f: &'a RatFunc,
    var: &'a str,
}

struct IntPoly<'a>(&'a [BigInt], &'a str);

impl fmt::Display for IntPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = UniPoly::from_coeffs(
            self.0
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        );
        p.fmt_in(self.1, f)
    }
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rf = self.f;
        if rf.is_zero() {
            return write!(f, "0");
        }
        let (cn, pn) = rf.num.primitive_decomposition();
        let (cd, pd) = rf.den.primitive_decomposition();
        let c = cn / cd;
        let (p, q) = (c.numer().clone(), c.denom().clone());
        let num_terms = rf.num.term_count();
        let num_const = pn.len() == 1;
        let den_const = pd.len() == 1;
        let has_den = !(den_const && q.is_one());

        // numerator
        if num_const {
            write!(f, "{p}")?;
        } else {
            let poly = IntPoly(&pn, self.var);
            if p.abs().is_one() {
                if p.is_negative() {
                    write!(f, "-")?;
                }
                if num_terms > 1 && (has_den || p.is_negative()) {
                    write!(f, "({poly})")?;
                } else {
                    write!(f, "{poly}")?;
                }
            } else if num_terms > 1 {
                write!(f, "{p}*({poly})")?;
            } else {
                write!(f, "{p}*{poly}")?;
            }
        }
        if !has_den {
            return Ok(());
        }
        write!(f, "/")?;
        let den_terms = rf.den.term_count();
        let dpoly = IntPoly(&pd, self.var);
        match (den_const, q.is_one()) {
            (true, _) => write!(f, "{q}"),
            (false, true) if den_terms == 1 => write!(f, "{dpoly}"),
            (false, true) => write!(f, "({dpoly})"),
            (false, false) if den_terms == 1 => write!(f, "({q}*{dpoly})"),
            (false, false) => write!(f, "({q}*({dpoly}))"),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("z"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RatFunc::from_poly(num);
            }
            return RatFunc::normalize(num, self.den.clone()).unwrap();
        }
        // Henrici: with g = gcd(b, d), the sum a/b + c/d has numerator
        // a*(d/g) + c*(b/g) over (b/g)*d, and only g can still cancel.
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::with_monic_den(num, &self.den * &rhs.den);
        }
        let b_g = self.den.div_exact(&g);
        let d_g = rhs.den.div_exact(&g);
        let num = &(&self.num * &d_g) + &(&rhs.num * &b_g);
        if num.is_zero() {
            return RatFunc::zero();
        }
        let h = num.gcd(&g);
        let den = &b_g * &rhs.den;
        if h.is_one() {
            RatFunc::with_monic_den(num, den)
        } else {
            RatFunc::with_monic_den(num.div_exact(&h), den.div_exact(&h))
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        // cross-cancel: (a/b)(c/d) with g1 = gcd(a, d), g2 = gcd(c, b)
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1), rhs.den.div_exact(&g1))
        };
        let (c, b) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        RatFunc::with_monic_den(&a * &c, &b * &d)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::inv`] for a checked variant.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.inv().expect("rational function division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    #[serde(with = "super::rational::vec_as_strings")]
    num: Vec<Rational>,
    #[serde(with = "super::rational::vec_as_strings")]
    den: Vec<Rational>,
}

impl Serialize for RatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncRepr {
            num: self.num.coeffs().to_vec(),
            den: self.den.coeffs().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RatFuncRepr::deserialize(d)?;
        RatFunc::normalize(UniPoly::from_coeffs(repr.num), UniPoly::from_coeffs(repr.den))
            .map_err(serde::de::Error::custom)
    }
}
