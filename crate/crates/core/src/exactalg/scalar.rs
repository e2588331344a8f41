//! Exact scalars in cyclotomic fields Q(w_n), w_n = e^{2 pi i / n}.
//!
//! An element is a rational polynomial in `w` reduced modulo the n-th
//! cyclotomic polynomial. Orders congruent to 2 mod 4 are folded onto the
//! odd half (Q(w_2m) = Q(w_m)), and rational values always carry order 1.
//! Mixed-order arithmetic lifts both operands to the lcm field.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Element of Q(w_n), stored as coefficients of 1, w, w^2, ... (trailing zeros trimmed).
#[derive(Clone, Debug)]
pub struct CycScalar {
    order: u32,
    coeffs: Vec<Q>,
}

fn cyclotomic_poly(n: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let den = cyclotomic_poly(d);
            num = int_poly_div_exact(&num, &den);
        }
    }
    cache.lock().unwrap().insert(n, num.clone());
    num
}

fn int_poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let mut quo = vec![0i64; rem.len() - dn];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dn]; // den is monic
        quo[k] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    quo
}

fn totient(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

fn trim(v: &mut Vec<Q>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Reduce a rational polynomial modulo the (monic) cyclotomic polynomial.
fn reduce_mod(mut v: Vec<Q>, n: u32) -> Vec<Q> {
    let phi = cyclotomic_poly(n);
    let dphi = phi.len() - 1;
    if v.len() > dphi {
        for k in (dphi..v.len()).rev() {
            if v[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[k], Q::zero());
            for (j, &pj) in phi.iter().enumerate().take(dphi) {
                if pj != 0 {
                    v[k - dphi + j] -= &c * qi(pj);
                }
            }
        }
        v.truncate(dphi);
    }
    trim(&mut v);
    v
}

fn normalize_order(n: u32) -> u32 {
    if n % 4 == 2 {
        n / 2
    } else {
        n
    }
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar { order: 1, coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(r: Q) -> Self {
        let coeffs = if r.is_zero() { vec![] } else { vec![r] };
        CycScalar { order: 1, coeffs }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_q(q(n, d))
    }

    /// w_n^k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let mut v = vec![Q::zero(); k + 1];
        v[k] = Q::one();
        Self::from_raw(n, v)
    }

    /// The imaginary unit, w_4.
    pub fn i() -> Self {
        Self::root_of_unity(4, 1)
    }

    /// Build from coefficients in powers of w_n, reducing and normalizing.
    pub fn from_raw(n: u32, coeffs: Vec<Q>) -> Self {
        let v = reduce_mod(coeffs, n);
        let mut s = CycScalar { order: n, coeffs: v };
        s.settle();
        s
    }

    fn settle(&mut self) {
        if self.coeffs.len() <= 1 {
            self.order = 1;
            return;
        }
        if self.order % 4 == 2 {
            let m = self.order / 2;
            // w_2m = -w_m^{(m+1)/2}
            let e = m.div_ceil(2) as usize;
            let mut out = vec![Q::zero(); self.coeffs.len() * e + 1];
            for (k, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let sign = if k % 2 == 1 { -c.clone() } else { c.clone() };
                out[k * e] += sign;
            }
            self.order = m;
            self.coeffs = reduce_mod(out, m);
            if self.coeffs.len() <= 1 {
                self.order = 1;
            }
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn to_q(&self) -> Option<Q> {
        match self.coeffs.len() {
            0 => Some(Q::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn lift(&self, target: u32) -> Vec<Q> {
        if self.order == target || self.coeffs.len() <= 1 {
            return self.coeffs.clone();
        }
        debug_assert_eq!(target % self.order, 0);
        let step = (target / self.order) as usize;
        let mut v = vec![Q::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[k * step] = c.clone();
        }
        reduce_mod(v, target)
    }

    fn common(a: &Self, b: &Self) -> u32 {
        normalize_order(a.order.lcm(&b.order))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(Self::from_q(self.coeffs[0].recip()));
        }
        let phi: Vec<Q> = cyclotomic_poly(self.order).into_iter().map(qi).collect();
        let (g, s, _) = poly_gcdext(&self.coeffs, &phi);
        // g is a nonzero constant since Phi is irreducible
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let v: Vec<Q> = s.into_iter().map(|c| c * &ginv).collect();
        Some(Self::from_raw(self.order, v))
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("zero to negative power").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.order as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += p * c.to_f64().unwrap_or(f64::NAN);
            p *= w;
        }
        acc
    }

    /// Apply the Galois automorphism w -> w^k (k coprime to the order).
    pub fn galois(&self, k: i64) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order as i64;
        let mut v = vec![Q::zero(); self.order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = ((j as i64) * k).rem_euclid(n) as usize;
            v[e] += c;
        }
        Self::from_raw(self.order, v)
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Rewrite in the smallest cyclotomic field containing the value.
    pub fn canonical(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order;
        let mut divisors: Vec<u32> = (2..n).filter(|d| n.is_multiple_of(*d) && d % 4 != 2).collect();
        divisors.sort();
        for d in divisors {
            if let Some(v) = self.descend(d) {
                return v;
            }
        }
        self.clone()
    }

    fn descend(&self, d: u32) -> Option<Self> {
        // x lies in Q(w_d) iff fixed by every automorphism w -> w^k with k = 1 mod d
        let n = self.order as i64;
        for k in 1..n {
            if k.gcd(&n) == 1 && (k - 1) % d as i64 == 0 && k != 1 && self.galois(k) != *self {
                return None;
            }
        }
        // solve for the coordinates in the power basis of Q(w_d)
        let m = totient(d);
        let step = (self.order / d) as usize;
        let target = self.lift(self.order);
        let dim = totient(self.order);
        let mut rows: Vec<Vec<Q>> = vec![vec![Q::zero(); m + 1]; dim];
        for j in 0..m {
            let mut v = vec![Q::zero(); j * step + 1];
            v[j * step] = Q::one();
            let img = reduce_mod(v, self.order);
            for (r, c) in img.into_iter().enumerate() {
                rows[r][j] = c;
            }
        }
        for (r, c) in target.into_iter().enumerate() {
            rows[r][m] = c;
        }
        let sol = solve_dense_q(rows, m)?;
        Some(Self::from_raw(d, sol))
    }

    /// Square root of a value of the form (root of unity) x (rational), inside a
    /// larger cyclotomic field. Returns None for other shapes.
    pub fn sqrt_unit_rational(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.order.max(1) as i64;
        for k in 0..n {
            let t = self * &Self::root_of_unity(self.order, -k);
            if let Some(r) = t.to_q() {
                let root = sqrt_rational(&r)?;
                let half = Self::root_of_unity(2 * self.order, k);
                return Some(&half * &root);
            }
        }
        None
    }
}

/// Legendre symbol (a|p) for an odd prime p.
fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut b = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Exact square root of a positive squarefree integer as a cyclotomic element.
fn sqrt_squarefree(mut n: i64) -> CycScalar {
    let mut acc = CycScalar::one();
    if n % 2 == 0 {
        // sqrt 2 = w_8 + w_8^{-1}
        acc = &acc * &(&CycScalar::root_of_unity(8, 1) + &CycScalar::root_of_unity(8, -1));
        n /= 2;
    }
    let mut p = 3;
    while n > 1 {
        if n % p == 0 {
            // quadratic Gauss sum squares to (-1)^{(p-1)/2} p
            let mut g = CycScalar::zero();
            for a in 1..p {
                g = &g + &(&CycScalar::from_int(legendre(a, p)) * &CycScalar::root_of_unity(p as u32, a));
            }
            if p % 4 == 3 {
                g = &g * &CycScalar::root_of_unity(4, -1);
            }
            acc = &acc * &g;
            n /= p;
        }
        p += 2;
    }
    acc
}

fn sqrt_rational(r: &Q) -> Option<CycScalar> {
    if r.is_zero() {
        return Some(CycScalar::zero());
    }
    let neg = r.is_negative();
    let a = r.abs();
    // sqrt(p/q) = sqrt(p q)/q
    let pq = (a.numer() * a.denom()).to_i64()?;
    let mut square = 1i64;
    let mut free = 1i64;
    let mut m = pq;
    let mut f = 2i64;
    while f * f <= m {
        while m % (f * f) == 0 {
            square *= f;
            m /= f * f;
        }
        if m % f == 0 {
            free *= f;
            m /= f;
        }
        f += 1;
    }
    free *= m;
    let mut s = sqrt_squarefree(free);
    s = &s * &CycScalar::from_q(Q::new(BigInt::from(square), a.denom().clone()));
    if neg {
        s = &s * &CycScalar::i();
    }
    Some(s)
}

/// Gaussian elimination for a consistent square-or-tall rational system with a
/// unique solution; `rows` are augmented with the right-hand side in column `m`.
fn solve_dense_q(mut rows: Vec<Vec<Q>>, m: usize) -> Option<Vec<Q>> {
    let nr = rows.len();
    let mut piv_row = 0;
    let mut pivots = vec![usize::MAX; m];
    for col in 0..m {
        let Some(r) = (piv_row..nr).find(|&r| !rows[r][col].is_zero()) else {
            return None;
        };
        rows.swap(piv_row, r);
        let inv = rows[piv_row][col].recip();
        for c in col..=m {
            rows[piv_row][c] = &rows[piv_row][c] * &inv;
        }
        for r2 in 0..nr {
            if r2 != piv_row && !rows[r2][col].is_zero() {
                let f = rows[r2][col].clone();
                for c in col..=m {
                    let t = &rows[piv_row][c] * &f;
                    rows[r2][c] -= t;
                }
            }
        }
        pivots[col] = piv_row;
        piv_row += 1;
    }
    if rows[piv_row..].iter().any(|r| !r[m].is_zero()) {
        return None;
    }
    Some((0..m).map(|c| rows[pivots[c]][m].clone()).collect())
}

fn poly_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead_inv = b[db].recip();
    let mut quo = vec![Q::zero(); r.len() - db];
    for k in (0..quo.len()).rev() {
        let c = &r[k + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        quo[k] = c;
    }
    trim(&mut r);
    trim(&mut quo);
    (quo, r)
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out = vec![Q::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(&mut out);
    out
}

/// Extended Euclid: returns (g, s, t) with s a + t b = g.
fn poly_gcdext(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>, Vec<Q>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1) = (vec![Q::one()], vec![]);
    let (mut t0, mut t1) = (vec![], vec![Q::one()]);
    while !r1.is_empty() {
        let (qt, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&qt, &s1));
        let t2 = poly_sub(&t0, &poly_mul(&qt, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        if self.is_rational() && other.is_rational() {
            return self.coeffs == other.coeffs;
        }
        let n = Self::common(self, other);
        self.lift(n) == other.lift(n)
    }
}

impl Eq for CycScalar {}

impl Default for CycScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Q> for CycScalar {
    fn from(r: Q) -> Self {
        Self::from_q(r)
    }
}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        if self.order == 1 && rhs.order == 1 {
            let a = self.coeffs.first().cloned().unwrap_or_else(Q::zero);
            let b = rhs.coeffs.first().cloned().unwrap_or_else(Q::zero);
            return CycScalar::from_q(a + b);
        }
        let n = CycScalar::common(self, rhs);
        let (a, b) = (self.lift(n), rhs.lift(n));
        let mut v = vec![Q::zero(); a.len().max(b.len())];
        for (i, x) in a.into_iter().enumerate() {
            v[i] += x;
        }
        for (i, x) in b.into_iter().enumerate() {
            v[i] += x;
        }
        trim(&mut v);
        let mut s = CycScalar { order: n, coeffs: v };
        s.settle();
        s
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        if self.is_zero() || rhs.is_zero() {
            return CycScalar::zero();
        }
        if self.order == 1 && rhs.order == 1 {
            return CycScalar::from_q(&self.coeffs[0] * &rhs.coeffs[0]);
        }
        if self.order == 1 || rhs.order == 1 {
            let (r, c) = if self.order == 1 { (&self.coeffs[0], rhs) } else { (&rhs.coeffs[0], self) };
            return CycScalar { order: c.order, coeffs: c.coeffs.iter().map(|x| x * r).collect() };
        }
        let n = CycScalar::common(self, rhs);
        let prod = poly_mul(&self.lift(n), &rhs.lift(n));
        CycScalar::from_raw(n, prod)
    }
}

impl<'a> Div<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn div(self, rhs: &CycScalar) -> CycScalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

fn fmt_q(r: &Q) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycScalar {
    /// Rationals print as `p/q`; other values as `a + b*w^k @n` in powers of w_n.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        if c.order == 1 {
            return write!(f, "{}", fmt_q(c.coeffs.first().unwrap_or(&Q::zero())));
        }
        let mut parts = Vec::new();
        for (k, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mon = match k {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{k}"),
            };
            let s = if k == 0 {
                fmt_q(a)
            } else if a.is_one() {
                mon
            } else if (-a).is_one() {
                format!("-{mon}")
            } else {
                format!("{}*{}", fmt_q(a), mon)
            };
            parts.push(s);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{} @{}", out, c.order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar `{0}`")]
pub struct ScalarParseError(pub String);

fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        Some(Q::from_integer(s.parse().ok()?))
    }
}

impl CycScalar {
    /// Parse `p/q`, or a sum of terms `c*w^k` with an optional `@n` order
    /// suffix; `default_order` applies when `w` appears without a suffix.
    pub fn parse_with_order(s: &str, default_order: u32) -> Result<Self, ScalarParseError> {
        let err = || ScalarParseError(s.to_string());
        let (body, order) = match s.split_once('@') {
            Some((b, n)) => (b, n.trim().parse::<u32>().map_err(|_| err())?),
            None => (s, default_order),
        };
        if order == 0 {
            return Err(err());
        }
        // split into signed terms
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for ch in body.chars() {
            if (ch == '+' || ch == '-') && !cur.trim().is_empty() && !cur.trim_end().ends_with('*') && !cur.trim_end().ends_with('/') {
                terms.push(cur.clone());
                cur.clear();
            }
            if !ch.is_whitespace() {
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            terms.push(cur);
        }
        if terms.is_empty() {
            return Err(err());
        }
        let mut coeffs: Vec<Q> = Vec::new();
        for t in terms {
            let (sign, t) = if let Some(r) = t.strip_prefix('-') {
                (-1, r.to_string())
            } else if let Some(r) = t.strip_prefix('+') {
                (1, r.to_string())
            } else {
                (1, t)
            };
            let (coef, k) = if let Some(pos) = t.find('w') {
                let cpart = t[..pos].trim_end_matches('*');
                let c = if cpart.is_empty() { Q::one() } else { parse_q(cpart).ok_or_else(err)? };
                let rest = &t[pos + 1..];
                let k =
                    if rest.is_empty() { 1usize } else { rest.strip_prefix('^').ok_or_else(err)?.parse::<usize>().map_err(|_| err())? };
                (c, k)
            } else {
                (parse_q(&t).ok_or_else(err)?, 0)
            };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Q::zero());
            }
            coeffs[k] += coef * qi(sign);
        }
        Ok(Self::from_raw(order, coeffs))
    }
}

impl FromStr for CycScalar {
    type Err = ScalarParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_with_order(s, 1).and_then(|v| {
            if s.contains('w') && !s.contains('@') {
                Err(ScalarParseError(s.to_string()))
            } else {
                Ok(v)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn order_two_is_rational() {
        let m = CycScalar::root_of_unity(2, 1);
        assert!(m.is_rational());
        assert_eq!(m, CycScalar::from_int(-1));
        let w6 = CycScalar::root_of_unity(6, 1);
        assert_eq!(w6.order(), 3);
        assert_eq!(w6.pow(6), CycScalar::one());
        assert_eq!(w6.pow(3), CycScalar::from_int(-1));
    }

    #[test]
    fn field_ops() {
        let i = CycScalar::i();
        assert_eq!(&i * &i, CycScalar::from_int(-1));
        let a = &CycScalar::from_int(2) + &i;
        let b = a.inv().unwrap();
        assert_eq!(&a * &b, CycScalar::one());
        let w3 = CycScalar::root_of_unity(3, 1);
        let s = &(&CycScalar::one() + &w3) + &w3.pow(2);
        assert!(s.is_zero());
        // mixed fields: i * w3 lives in Q(w12)
        let m = &i * &w3;
        assert_eq!(m.order(), 12);
        assert_eq!(m.pow(12), CycScalar::one());
    }

    #[test]
    fn canonical_descends() {
        let i = CycScalar::i();
        let w3 = CycScalar::root_of_unity(3, 1);
        let m = &(&i * &w3) * &w3.inv().unwrap();
        assert_eq!(m.canonical().order(), 4);
        assert_eq!(m.to_string(), "w @4");
    }

    #[test]
    fn sqrt_of_rationals() {
        for r in [q(2, 1), q(3, 1), q(6, 1), q(-5, 7), q(9, 4), q(-1, 1)] {
            let s = sqrt_rational(&r).unwrap();
            assert_eq!(&s * &s, CycScalar::from_q(r));
        }
        let x = &CycScalar::i() * &CycScalar::frac(3, 2);
        let s = x.sqrt_unit_rational().unwrap();
        assert_eq!(&s * &s, x);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["3/4", "-2", "1 + 2*w @4", "-w^2 + 1/3 @5"] {
            let v: CycScalar = s.parse().unwrap();
            let back: CycScalar = v.to_string().parse().unwrap();
            assert_eq!(v, back);
        }
        assert_eq!(CycScalar::frac(-3, 6).to_string(), "-1/2");
        assert_eq!(CycScalar::i().to_string(), "w @4");
    }

    #[test]
    fn complex_image() {
        let w = CycScalar::root_of_unity(8, 1);
        let z = w.to_complex();
        assert!((z.re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((z.im - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
