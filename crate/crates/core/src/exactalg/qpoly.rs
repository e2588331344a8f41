//! Quasi-polynomials: finite sums of c * x^e with e in (1/D) Z.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::dense::DensePoly;
use super::scalar::{qi, CycScalar, Q};
use super::AlgError;

/// Degree of a quasi-polynomial. The zero polynomial has its own variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    ZeroPoly,
    Exp(Rational64),
}

impl Degree {
    pub fn exp(self) -> Option<Rational64> {
        match self {
            Degree::ZeroPoly => None,
            Degree::Exp(e) => Some(e),
        }
    }
}

/// Sum of terms c * x^(k/denom), keyed by k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPoly {
    denom: i64,
    terms: BTreeMap<i64, CycScalar>,
}

pub fn r64(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl QuasiPoly {
    pub fn zero() -> Self {
        QuasiPoly { denom: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(CycScalar::one())
    }

    pub fn constant(c: CycScalar) -> Self {
        Self::monomial(c, Rational64::zero())
    }

    /// c * x^e.
    pub fn monomial(c: CycScalar, e: Rational64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(*e.numer(), c);
        }
        let mut p = QuasiPoly { denom: *e.denom(), terms };
        p.normalize();
        p
    }

    /// x^e.
    pub fn x_pow(e: Rational64) -> Self {
        Self::monomial(CycScalar::one(), e)
    }

    pub fn x() -> Self {
        Self::x_pow(Rational64::one())
    }

    /// Ordinary polynomial from integer coefficients, lowest degree first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| CycScalar::from_int(c)).collect())
    }

    /// Ordinary polynomial from scalar coefficients, lowest degree first.
    pub fn from_coeffs(coeffs: Vec<CycScalar>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                terms.insert(k as i64, c);
            }
        }
        QuasiPoly { denom: 1, terms }
    }

    /// Build from (exponent, coefficient) pairs; repeated exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (Rational64, CycScalar)>>(it: I) -> Self {
        let mut acc = Self::zero();
        for (e, c) in it {
            acc = &acc + &Self::monomial(c, e);
        }
        acc
    }

    /// Raw constructor from keyed numerators over a denominator.
    pub fn from_keyed(denom: i64, terms: BTreeMap<i64, CycScalar>) -> Self {
        assert!(denom >= 1);
        let mut p = QuasiPoly { denom, terms };
        p.terms.retain(|_, c| !c.is_zero());
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        if self.terms.is_empty() {
            self.denom = 1;
            return;
        }
        let mut g = self.denom;
        for k in self.terms.keys() {
            g = g.gcd(k);
        }
        if g > 1 {
            self.denom /= g;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(k, c)| (k / g, c)).collect();
        }
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn keyed_terms(&self) -> &BTreeMap<i64, CycScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate (exponent, coefficient) in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational64, &CycScalar)> + '_ {
        self.terms.iter().map(move |(k, c)| (r64(*k, self.denom), c))
    }

    pub fn coeff(&self, e: Rational64) -> CycScalar {
        let scaled = e * self.denom;
        if !scaled.is_integer() {
            return CycScalar::zero();
        }
        self.terms.get(&scaled.to_integer()).cloned().unwrap_or_else(CycScalar::zero)
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            None => Degree::ZeroPoly,
            Some(k) => Degree::Exp(r64(*k, self.denom)),
        }
    }

    /// Degree as an exponent; panics on the zero polynomial.
    pub fn deg(&self) -> Rational64 {
        self.degree().exp().expect("degree of zero quasi-polynomial")
    }

    pub fn low_exp(&self) -> Option<Rational64> {
        self.terms.keys().next().map(|k| r64(*k, self.denom))
    }

    pub fn leading_coeff(&self) -> CycScalar {
        self.terms.values().next_back().cloned().unwrap_or_else(CycScalar::zero)
    }

    /// Scale so that the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.inv().unwrap())
    }

    pub fn scale(&self, c: &CycScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QuasiPoly { denom: self.denom, terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiply by x^e.
    pub fn shift(&self, e: Rational64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let d = self.denom.lcm(e.denom());
        let f = d / self.denom;
        let add = (e * d).to_integer();
        let mut p = QuasiPoly { denom: d, terms: self.terms.iter().map(|(k, v)| (k * f + add, v.clone())).collect() };
        p.normalize();
        p
    }

    /// All exponents are nonnegative.
    pub fn is_quasi_polynomial(&self) -> bool {
        self.terms.keys().all(|k| *k >= 0)
    }

    /// All exponents are nonnegative integers.
    pub fn is_polynomial(&self) -> bool {
        self.denom == 1 && self.is_quasi_polynomial()
    }

    /// Every exponent lies in a single coset of Z (e.g. C[x] or x^{1/2} C[x]).
    pub fn exponent_coset(&self) -> Option<Rational64> {
        let mut out: Option<Rational64> = None;
        for (e, _) in self.terms() {
            let f = e - e.floor();
            match out {
                None => out = Some(f),
                Some(g) if g != f => return None,
                _ => {}
            }
        }
        out
    }

    /// Part of the support whose exponents are congruent to `coset` mod 1.
    pub fn coset_part(&self, coset: Rational64) -> Self {
        let terms =
            self.terms().filter(|(e, _)| (e - coset).is_integer()).map(|(e, c)| ((e * self.denom).to_integer(), c.clone())).collect();
        Self::from_keyed(self.denom, terms)
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, c)| (k - self.denom, c * &CycScalar::from_q(Q::new((*k).into(), self.denom.into()))))
            .collect();
        Self::from_keyed(self.denom, terms)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power allowing negative exponents only for monomials.
    pub fn pow_i(&self, n: i64) -> Result<Self, AlgError> {
        if n >= 0 {
            return Ok(self.pow(n as u32));
        }
        if self.len() == 1 {
            let (e, c) = self.terms().next().map(|(e, c)| (e, c.clone())).unwrap();
            return Ok(Self::monomial(c.pow(n), e * n));
        }
        Err(AlgError::InexactDivision)
    }

    /// Exact quotient; Laurent quotients are allowed, a nonzero remainder is not.
    pub fn exact_div(&self, other: &Self) -> Result<Self, AlgError> {
        assert!(!other.is_zero(), "division by zero quasi-polynomial");
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let d = self.denom.lcm(&other.denom);
        let (a, va) = self.to_dense(d);
        let (b, vb) = other.to_dense(d);
        let (quo, rem) = a.divrem(&b);
        if !rem.is_zero() {
            return Err(AlgError::InexactDivision);
        }
        Ok(Self::from_dense(&quo, va - vb, d))
    }

    /// Write as s^v * P(s) with s = x^{1/d}, P(0) != 0. `d` must be a multiple of denom.
    pub fn to_dense(&self, d: i64) -> (DensePoly, i64) {
        assert_eq!(d % self.denom, 0);
        let f = d / self.denom;
        let Some(&lo) = self.terms.keys().next() else {
            return (DensePoly::zero(), 0);
        };
        let hi = *self.terms.keys().next_back().unwrap();
        let mut v = vec![CycScalar::zero(); ((hi - lo) * f + 1) as usize];
        for (k, c) in &self.terms {
            v[((k - lo) * f) as usize] = c.clone();
        }
        (DensePoly::new(v), lo * f)
    }

    /// Inverse of [`to_dense`]: s^v * P(s) with s = x^{1/d}.
    pub fn from_dense(p: &DensePoly, v: i64, d: i64) -> Self {
        let terms = p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as i64 + v, c.clone())).collect();
        Self::from_keyed(d, terms)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            let ef = *e.numer() as f64 / *e.denom() as f64;
            let xp = if e.is_integer() { x.powi(e.to_integer() as i32) } else { x.powf(ef) };
            acc += c.to_complex() * xp;
        }
        acc
    }

    /// Value at x = 0 when the support is nonnegative.
    pub fn at_zero(&self) -> Option<CycScalar> {
        if !self.is_quasi_polynomial() {
            return None;
        }
        Some(self.coeff(Rational64::zero()))
    }

    /// Evaluate an ordinary polynomial at an exact scalar.
    pub fn eval(&self, x: &CycScalar) -> Option<CycScalar> {
        if !self.is_polynomial() {
            return None;
        }
        let mut acc = CycScalar::zero();
        for (k, c) in &self.terms {
            acc = &acc + &(c * &x.pow(*k));
        }
        Some(acc)
    }

    /// Proportional to `other` by a nonzero scalar.
    pub fn proportional(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.len() != other.len() {
            return false;
        }
        self.monic() == other.monic()
    }

    /// Scalar `c` with other = c * self, if any.
    pub fn ratio_to(&self, other: &Self) -> Option<CycScalar> {
        if self.is_zero() || other.is_zero() || !self.proportional(other) {
            return None;
        }
        Some(&other.leading_coeff() / &self.leading_coeff())
    }

    /// Apply a map to every coefficient.
    pub fn map_coeffs<F: Fn(Rational64, &CycScalar) -> CycScalar>(&self, f: F) -> Self {
        let terms = self.terms().map(|(e, c)| ((e * self.denom).to_integer(), f(e, c))).collect();
        Self::from_keyed(self.denom, terms)
    }

    /// Canonical text: `denom|k:coeff;k:coeff...` used as a dedup key.
    pub fn key(&self) -> String {
        let mut s = format!("{}|", self.denom);
        for (k, c) in &self.terms {
            s.push_str(&format!("{}:{};", k, c));
        }
        s
    }

    /// Lift coefficients of an integer-coefficient check: all coefficients rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }
}

impl<'a> Add<&'a QuasiPoly> for &'a QuasiPoly {
    type Output = QuasiPoly;
    fn add(self, rhs: &QuasiPoly) -> QuasiPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let d = self.denom.lcm(&rhs.denom);
        let (fa, fb) = (d / self.denom, d / rhs.denom);
        let mut terms: BTreeMap<i64, CycScalar> = self.terms.iter().map(|(k, c)| (k * fa, c.clone())).collect();
        for (k, c) in &rhs.terms {
            let e = terms.entry(k * fb).or_insert_with(CycScalar::zero);
            *e = &*e + c;
        }
        QuasiPoly::from_keyed(d, terms)
    }
}

impl<'a> Sub<&'a QuasiPoly> for &'a QuasiPoly {
    type Output = QuasiPoly;
    fn sub(self, rhs: &QuasiPoly) -> QuasiPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a QuasiPoly> for &'a QuasiPoly {
    type Output = QuasiPoly;
    fn mul(self, rhs: &QuasiPoly) -> QuasiPoly {
        if self.is_zero() || rhs.is_zero() {
            return QuasiPoly::zero();
        }
        let d = self.denom.lcm(&rhs.denom);
        let (fa, fb) = (d / self.denom, d / rhs.denom);
        let mut terms: BTreeMap<i64, CycScalar> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let e = terms.entry(ka * fa + kb * fb).or_insert_with(CycScalar::zero);
                *e = &*e + &(ca * cb);
            }
        }
        QuasiPoly::from_keyed(d, terms)
    }
}

impl Neg for &QuasiPoly {
    type Output = QuasiPoly;
    fn neg(self) -> QuasiPoly {
        QuasiPoly { denom: self.denom, terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuasiPoly> for QuasiPoly {
            type Output = QuasiPoly;
            fn $m(self, rhs: QuasiPoly) -> QuasiPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QuasiPoly> for QuasiPoly {
            type Output = QuasiPoly;
            fn $m(self, rhs: &QuasiPoly) -> QuasiPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuasiPoly {
    type Output = QuasiPoly;
    fn neg(self) -> QuasiPoly {
        -&self
    }
}

fn fmt_exp(e: Rational64) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for QuasiPoly {
    /// Highest exponent first, e.g. `x^3 - 1` or `(2/3)*x^(3/2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let e = r64(*k, self.denom);
            let mon = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "x".to_string()
            } else if e.is_integer() && e.is_positive() {
                format!("x^{}", fmt_exp(e))
            } else {
                format!("x^({})", fmt_exp(e))
            };
            let (neg, mag) = match c.to_q() {
                Some(r) if r.is_negative() => (true, CycScalar::from_q(-r)),
                _ => (false, c.clone()),
            };
            let cs = if mon.is_empty() {
                if mag.is_rational() {
                    mag.to_string()
                } else {
                    format!("({mag})")
                }
            } else if mag.is_one() {
                mon.clone()
            } else if mag.is_rational() && mag.to_q().unwrap().is_integer() {
                format!("{mag}*{mon}")
            } else {
                format!("({mag})*{mon}")
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            write!(f, "{cs}")?;
            first = false;
        }
        Ok(())
    }
}

/// Convenience: rational coefficient scalar.
pub fn cq(n: i64, d: i64) -> CycScalar {
    CycScalar::from_q(Q::new(n.into(), d.into()))
}

/// Convenience: integer scalar.
pub fn ci(n: i64) -> CycScalar {
    CycScalar::from_q(qi(n))
}
