//! Wronskians, divided Wronskians, the first-order Wronskian ODE, scaling substitutions.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::linalg::Matrix;
use super::qpoly::QuasiPoly;
use super::scalar::CycScalar;
use super::AlgError;

/// Wronskian determinant of `fs`, rows indexed by derivative order.
///
/// Laplace expansion along derivative rows with memoised minors over subsets,
/// so the cost is about 2^m * m products.
pub fn wronskian(fs: &[QuasiPoly]) -> QuasiPoly {
    let m = fs.len();
    assert!(m > 0, "wronskian of an empty list");
    assert!(m <= 20, "wronskian too large");
    let derivs: Vec<Vec<QuasiPoly>> = fs
        .iter()
        .map(|f| {
            let mut v = vec![f.clone()];
            for _ in 1..m {
                let d = v.last().unwrap().derivative();
                v.push(d);
            }
            v
        })
        .collect();
    // minor[S] = det of rows 0..|S| and columns S (S in increasing order).
    let mut minor = vec![QuasiPoly::zero(); 1 << m];
    minor[0] = QuasiPoly::one();
    for s in 1usize..(1 << m) {
        let row = s.count_ones() as usize - 1;
        let mut acc = QuasiPoly::zero();
        // expand along the last row: entry at column j has sign by its position in S
        let mut pos = 0;
        for j in 0..m {
            if s & (1 << j) == 0 {
                continue;
            }
            let rest = s & !(1 << j);
            if !minor[rest].is_zero() && !derivs[j][row].is_zero() {
                let t = &derivs[j][row] * &minor[rest];
                // cofactor sign (-1)^(row + pos)
                if (row + pos).is_multiple_of(2) {
                    acc = &acc + &t;
                } else {
                    acc = &acc - &t;
                }
            }
            pos += 1;
        }
        minor[s] = acc;
    }
    minor[(1 << m) - 1].clone()
}

/// Wronskian divided exactly by the product of `divisors`.
///
/// The quotient may carry negative exponents; check `is_quasi_polynomial` on it.
pub fn divided_wronskian(fs: &[QuasiPoly], divisors: &[QuasiPoly]) -> Result<QuasiPoly, AlgError> {
    if fs.is_empty() {
        return Err(AlgError::Empty);
    }
    let w = wronskian(fs);
    let mut den = QuasiPoly::one();
    for d in divisors {
        den = &den * d;
    }
    if den.is_zero() {
        return Err(AlgError::InexactDivision);
    }
    w.exact_div(&den)
}

/// How to pick the particular solution of Wr(f, Y) = W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// The coefficient of x^e in Y vanishes.
    CoeffZero(Rational64),
    /// x^{-shift} Y has only nonnegative integer exponents.
    HolomorphicAtZero { shift: Rational64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeSolution {
    pub particular: QuasiPoly,
    pub homogeneous: QuasiPoly,
}

/// Solve Wr(f, Y) = f Y' - f' Y = W for Y, by linear algebra on a bounded exponent grid.
pub fn wronskian_ode_solve(f: &QuasiPoly, w: &QuasiPoly, norm: &Normalization) -> Result<OdeSolution, AlgError> {
    assert!(!f.is_zero(), "ODE with zero f");
    if w.is_zero() {
        return pin(f, f.clone(), f, norm, true);
    }
    let mut den = f.denom().lcm(&w.denom());
    let extra = match norm {
        Normalization::CoeffZero(e) => *e.denom(),
        Normalization::HolomorphicAtZero { shift } => *shift.denom(),
    };
    den = den.lcm(&extra);
    let one = Rational64::one();
    let (lf, hf) = (f.low_exp().unwrap(), f.deg());
    let (lw, hw) = (w.low_exp().unwrap(), w.deg());
    let lo = (lw - lf + one).min(lf);
    let hi = (hw - hf + one).max(hf);
    let grid: Vec<Rational64> = {
        let (a, b) = ((lo * den).to_integer(), (hi * den).to_integer());
        (a..=b).map(|k| Rational64::new(k, den)).collect()
    };
    // equation rows keyed by exponent of x in f Y' - f' Y
    let row_lo = lo + lf - one;
    let row_hi = hi + hf - one;
    let nrows = ((row_hi - row_lo) * den).to_integer() as usize + 1;
    if (lw - row_lo) * den < Rational64::zero() || (hw - row_hi) * den > Rational64::zero() {
        return Err(AlgError::NoSolution);
    }
    let mut mat = Matrix::zeros(nrows, grid.len());
    for (col, &e) in grid.iter().enumerate() {
        for (a, c) in f.terms() {
            let k = e - a;
            if k.is_zero() {
                continue;
            }
            let r = ((a + e - one - row_lo) * den).to_integer() as usize;
            let v = c * &CycScalar::from_q(rat_to_q(k));
            mat[(r, col)] = &mat[(r, col)] + &v;
        }
    }
    let mut rhs = vec![CycScalar::zero(); nrows];
    for (e, c) in w.terms() {
        let r = (e - row_lo) * den;
        if !r.is_integer() {
            return Err(AlgError::NoSolution);
        }
        rhs[r.to_integer() as usize] = c.clone();
    }
    let sol = mat.solve(&rhs).ok_or(AlgError::NoSolution)?;
    let from_vec = |v: &[CycScalar]| QuasiPoly::from_terms(grid.iter().copied().zip(v.iter().cloned()));
    let particular = from_vec(&sol.particular);
    debug_assert!(sol.nullspace.len() <= 1);
    pin(f, particular, f, norm, false)
}

/// Apply the normalization to particular + t * hom.
fn pin(f: &QuasiPoly, p: QuasiPoly, hom: &QuasiPoly, norm: &Normalization, homogeneous_only: bool) -> Result<OdeSolution, AlgError> {
    let p = if homogeneous_only { QuasiPoly::zero() } else { p };
    let t = match norm {
        Normalization::CoeffZero(e) => {
            let fe = hom.coeff(*e);
            if fe.is_zero() {
                return Err(AlgError::AmbiguousNormalization);
            }
            -(&p.coeff(*e) / &fe)
        }
        Normalization::HolomorphicAtZero { shift } => {
            let bad = |e: Rational64| {
                let d = e - shift;
                !d.is_integer() || d.is_negative()
            };
            let pb: Vec<(Rational64, CycScalar)> = p.terms().filter(|(e, _)| bad(*e)).map(|(e, c)| (e, c.clone())).collect();
            let hb: Vec<(Rational64, CycScalar)> = hom.terms().filter(|(e, _)| bad(*e)).map(|(e, c)| (e, c.clone())).collect();
            if hb.is_empty() {
                if pb.is_empty() {
                    return Err(AlgError::AmbiguousNormalization);
                }
                return Err(AlgError::NoSolution);
            }
            // need p_e + t h_e = 0 at every bad exponent
            let (e0, h0) = &hb[0];
            let t = -(&p.coeff(*e0) / h0);
            for (e, _) in pb.iter().chain(hb.iter()) {
                if !(&p.coeff(*e) + &(&t * &hom.coeff(*e))).is_zero() {
                    return Err(AlgError::NoSolution);
                }
            }
            t
        }
    };
    let particular = &p + &hom.scale(&t);
    Ok(OdeSolution { particular, homogeneous: f.clone() })
}

fn rat_to_q(r: Rational64) -> super::scalar::Q {
    super::scalar::Q::new((*r.numer()).into(), (*r.denom()).into())
}

/// How fractional powers of a scale factor are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// s = e^{2 pi i theta} with theta in [0, 1) gives s^m = e^{2 pi i theta m}; so (-1)^{1/2} = i.
    #[default]
    Principal,
    /// Reject fractional exponents unless s = 1.
    IntegerOnly,
}

/// If `s` is a root of unity, return (n, k) with s = e^{2 pi i k / n}, 0 <= k < n.
pub fn root_of_unity_angle(s: &CycScalar) -> Option<(u32, u32)> {
    let n = s.order().max(1).lcm(&2);
    let base = CycScalar::root_of_unity(n, 1);
    let mut p = CycScalar::one();
    for k in 0..n {
        if &p == s {
            let g = k.gcd(&n);
            return Some((n / g, k / g));
        }
        p = &p * &base;
    }
    None
}

/// f(s x). Fractional exponents follow `branch`.
pub fn substitute_scale(f: &QuasiPoly, s: &CycScalar, branch: BranchRule) -> Result<QuasiPoly, AlgError> {
    assert!(!s.is_zero(), "scale by zero");
    let fractional = f.denom() > 1;
    let angle = if fractional && !s.is_one() {
        if branch == BranchRule::IntegerOnly {
            return Err(AlgError::BranchUndefined);
        }
        Some(root_of_unity_angle(s).ok_or(AlgError::BranchUndefined)?)
    } else {
        None
    };
    let mut terms = Vec::new();
    for (e, c) in f.terms() {
        let factor = if e.is_integer() {
            s.pow(e.to_integer())
        } else if let Some((n, k)) = angle {
            // e^{2 pi i k e / n}
            let num = (k as i64) * e.numer();
            let den = (n as i64) * e.denom();
            let g = num.gcd(&den);
            CycScalar::root_of_unity((den / g) as u32, num / g)
        } else {
            CycScalar::one()
        };
        terms.push((e, c * &factor));
    }
    Ok(QuasiPoly::from_terms(terms))
}

/// Greatest common divisor after x = s^D, monic; the monomial part is the common lowest power.
pub fn gcd_squarefree(f: &QuasiPoly, g: &QuasiPoly) -> QuasiPoly {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let d = f.denom().lcm(&g.denom());
    let (a, va) = f.to_dense(d);
    let (b, vb) = g.to_dense(d);
    QuasiPoly::from_dense(&a.gcd(&b), va.min(vb), d)
}

/// No repeated nonzero roots, and x = 0 is at most a simple root.
pub fn is_squarefree(f: &QuasiPoly) -> bool {
    if f.is_zero() {
        return false;
    }
    let (p, v) = f.to_dense(f.denom());
    if Rational64::new(v, f.denom()) > Rational64::one() {
        return false;
    }
    p.gcd(&p.derivative()).degree() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::qpoly::{cq, r64};

    fn xp(n: i64, d: i64) -> QuasiPoly {
        QuasiPoly::x_pow(r64(n, d))
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian(&[QuasiPoly::one(), QuasiPoly::x()]), QuasiPoly::one());
        assert_eq!(wronskian(&[xp(2, 1), xp(3, 1)]), xp(4, 1));
        assert_eq!(wronskian(&[xp(1, 2), xp(3, 2)]), QuasiPoly::x());
        // three monomials 0,1,3: x^{4-3} * (1)(3)(2)
        let w = wronskian(&[QuasiPoly::one(), xp(1, 1), xp(3, 1)]);
        assert_eq!(w, QuasiPoly::monomial(cq(6, 1), r64(1, 1)));
    }

    #[test]
    fn ode_examples() {
        let one = QuasiPoly::one();
        let s = wronskian_ode_solve(&one, &one, &Normalization::CoeffZero(r64(0, 1))).unwrap();
        assert_eq!(s.particular, QuasiPoly::x());
        let s = wronskian_ode_solve(&one, &xp(1, 2), &Normalization::CoeffZero(r64(0, 1))).unwrap();
        assert_eq!(s.particular, QuasiPoly::monomial(cq(2, 3), r64(3, 2)));
        let f = QuasiPoly::from_ints(&[-1, 0, 0, 1]);
        let w = &xp(1, 2) * &QuasiPoly::from_ints(&[1, 0, 0, 1]);
        match wronskian_ode_solve(&f, &w, &Normalization::CoeffZero(r64(3, 1))) {
            Ok(s) => assert_eq!(wronskian(&[f.clone(), s.particular]), w),
            Err(e) => assert_eq!(e, AlgError::NoSolution),
        }
    }

    #[test]
    fn ode_ambiguous_and_holomorphic() {
        let one = QuasiPoly::one();
        assert_eq!(wronskian_ode_solve(&one, &one, &Normalization::CoeffZero(r64(5, 1))), Err(AlgError::AmbiguousNormalization));
        // Y' = x^{1/2}, Y must be x^{3/2} times a polynomial: constant removed.
        let s = wronskian_ode_solve(&one, &xp(1, 2), &Normalization::HolomorphicAtZero { shift: r64(3, 2) }).unwrap();
        assert_eq!(s.particular, QuasiPoly::monomial(cq(2, 3), r64(3, 2)));
    }

    #[test]
    fn substitution() {
        let m1 = CycScalar::from_int(-1);
        assert_eq!(substitute_scale(&QuasiPoly::x(), &m1, BranchRule::Principal).unwrap(), -QuasiPoly::x());
        let h = substitute_scale(&xp(1, 2), &m1, BranchRule::Principal).unwrap();
        assert_eq!(h, QuasiPoly::monomial(CycScalar::i(), r64(1, 2)));
        let f = QuasiPoly::from_ints(&[1, 0, 0, 1]);
        assert_eq!(substitute_scale(&f, &m1, BranchRule::Principal).unwrap(), QuasiPoly::from_ints(&[1, 0, 0, -1]));
        assert_eq!(substitute_scale(&xp(1, 2), &CycScalar::from_int(2), BranchRule::Principal), Err(AlgError::BranchUndefined));
    }

    #[test]
    fn gcds() {
        let a = QuasiPoly::from_ints(&[-1, 0, 0, 1]);
        let b = QuasiPoly::from_ints(&[1, 0, 0, 1]);
        assert_eq!(gcd_squarefree(&a, &b), QuasiPoly::one());
        assert_eq!(gcd_squarefree(&QuasiPoly::from_ints(&[-1, 0, 1]), &QuasiPoly::from_ints(&[-1, 1])), QuasiPoly::from_ints(&[-1, 1]));
        assert!(is_squarefree(&a));
        assert!(!is_squarefree(&QuasiPoly::from_ints(&[1, 2, 1])));
    }
}
