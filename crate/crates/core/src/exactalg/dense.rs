//! Dense univariate polynomials over cyclotomic scalars.

use super::scalar::CycScalar;

/// Coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    c: Vec<CycScalar>,
}

impl DensePoly {
    pub fn new(mut c: Vec<CycScalar>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        DensePoly { c }
    }

    pub fn zero() -> Self {
        DensePoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        DensePoly { c: vec![CycScalar::one()] }
    }

    pub fn coeffs(&self) -> &[CycScalar] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or -1 for zero.
    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> CycScalar {
        self.c.last().cloned().unwrap_or_else(CycScalar::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().unwrap();
        DensePoly::new(self.c.iter().map(|x| x * &inv).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = CycScalar::zero();
        DensePoly::new((0..n).map(|k| self.c.get(k).unwrap_or(&z) + o.c.get(k).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let z = CycScalar::zero();
        DensePoly::new((0..n).map(|k| self.c.get(k).unwrap_or(&z) - o.c.get(k).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![CycScalar::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        DensePoly::new(out)
    }

    pub fn derivative(&self) -> Self {
        DensePoly::new(self.c.iter().enumerate().skip(1).map(|(k, a)| a * &CycScalar::from_int(k as i64)).collect())
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.c.clone();
        let dn = d.c.len();
        if r.len() < dn {
            return (Self::zero(), self.clone());
        }
        let inv = d.lead().inv().unwrap();
        let mut quo = vec![CycScalar::zero(); r.len() - dn + 1];
        for k in (0..quo.len()).rev() {
            let t = &r[k + dn - 1] * &inv;
            if t.is_zero() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&t * b);
            }
            quo[k] = t;
        }
        (DensePoly::new(quo), DensePoly::new(r))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &CycScalar) -> CycScalar {
        let mut acc = CycScalar::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> DensePoly {
        DensePoly::new(v.iter().map(|&k| CycScalar::from_int(k)).collect())
    }

    #[test]
    fn gcd_and_divrem() {
        assert_eq!(p(&[-1, 0, 0, 1]).gcd(&p(&[1, 0, 0, 1])), p(&[1]));
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-1, 1])), p(&[-1, 1]));
        let (q, r) = p(&[1, 0, 0, 1]).divrem(&p(&[1, 1]));
        assert_eq!(q, p(&[1, -1, 1]));
        assert!(r.is_zero());
    }
}
