//! Problem instances, frame polynomials, exact criticality and genericity tests,
//! weight bookkeeping and Gaudin eigenvalues.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cartan::{
    inner_product, is_sigma_invariant, orbit_data, sigma_pow_on_weight, CartanData, CartanError, DiagramAut, FoldedData, Weight,
};
use crate::exactalg::wronskian::root_of_unity_angle;
use crate::exactalg::{gcd_squarefree, is_squarefree, substitute_scale, AlgError, BranchRule, CycScalar, Matrix, QuasiPoly, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("negative exponent in frame polynomial at node {}", .0 + 1)]
    NegativeExponent(usize),
    #[error("tuple is not generic: {0:?}")]
    NotGeneric(GenericFailure),
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("tuple has {0} components, expected {1}")]
    WrongLength(usize, usize),
}

/// Cartan data, automorphism, marked points and weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub cartan: CartanData,
    pub aut: DiagramAut,
    /// omega = w^omega_power, w the standard primitive M-th root.
    pub omega_power: i64,
    pub omega: CycScalar,
    pub points: Vec<CycScalar>,
    pub site_weights: Vec<Weight>,
    pub lambda0: Weight,
}

impl ProblemInstance {
    /// Validated constructor.
    pub fn new(
        cartan: CartanData,
        aut: DiagramAut,
        omega_power: i64,
        points: Vec<CycScalar>,
        site_weights: Vec<Weight>,
        lambda0: Weight,
    ) -> Result<Self, FrameError> {
        let inst = Self::new_unchecked(cartan, aut, omega_power, points, site_weights, lambda0)?;
        if !is_sigma_invariant(&inst.aut, &inst.lambda0) {
            return Err(FrameError::InvalidInstance("lambda0 is not sigma-invariant".into()));
        }
        for (s, w) in inst.site_weights.iter().enumerate() {
            if !w.is_dominant_integral() {
                return Err(FrameError::InvalidInstance(format!("site weight {} is not dominant integral", s + 1)));
            }
        }
        Ok(inst)
    }

    /// Shape checks only. Used for auxiliary instances such as a shifted weight at the origin.
    pub fn new_unchecked(
        cartan: CartanData,
        aut: DiagramAut,
        omega_power: i64,
        points: Vec<CycScalar>,
        site_weights: Vec<Weight>,
        lambda0: Weight,
    ) -> Result<Self, FrameError> {
        let n = cartan.rank();
        let m = aut.order;
        if aut.perm.len() != n || lambda0.len() != n {
            return Err(FrameError::InvalidInstance("dimension mismatch".into()));
        }
        if omega_power.gcd(&(m as i64)) != 1 {
            return Err(FrameError::InvalidInstance("omega is not a primitive root of unity".into()));
        }
        if points.len() != site_weights.len() {
            return Err(FrameError::InvalidInstance("points and site weights differ in number".into()));
        }
        if site_weights.iter().any(|w| w.len() != n) {
            return Err(FrameError::InvalidInstance("site weight length mismatch".into()));
        }
        let omega = CycScalar::root_of_unity(m, omega_power);
        for (a, za) in points.iter().enumerate() {
            if za.is_zero() {
                return Err(FrameError::InvalidInstance(format!("point {} is zero", a + 1)));
            }
            for zb in points.iter().skip(a + 1) {
                let ratio = za / zb;
                if (0..m as i64).any(|k| ratio == omega.pow(k)) {
                    return Err(FrameError::InvalidInstance("omega-orbits of marked points intersect".into()));
                }
            }
        }
        Ok(ProblemInstance { cartan, aut, omega_power, omega, points, site_weights, lambda0 })
    }

    /// Same data with a different weight at the origin (no invariance check).
    pub fn with_lambda0(&self, lambda0: Weight) -> Self {
        ProblemInstance { lambda0, ..self.clone() }
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn order(&self) -> u32 {
        self.aut.order
    }

    pub fn fold(&self) -> Result<FoldedData, FrameError> {
        Ok(orbit_data(&self.cartan, &self.aut)?)
    }

    /// gamma_i: pairing of lambda0 with coroot i.
    pub fn gamma(&self, i: usize) -> Q {
        self.lambda0.pairings[i].clone()
    }

    pub fn gamma_exp(&self, i: usize) -> Rational64 {
        q_to_r64(&self.gamma(i))
    }
}

pub fn q_to_r64(x: &Q) -> Rational64 {
    let n = i64::try_from(x.numer()).expect("exponent numerator overflow");
    let d = i64::try_from(x.denom()).expect("exponent denominator overflow");
    Rational64::new(n, d)
}

pub fn r64_to_q(x: Rational64) -> Q {
    Q::new((*x.numer()).into(), (*x.denom()).into())
}

/// Tuple of monic quasi-polynomials, one per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetheTuple {
    pub polys: Vec<QuasiPoly>,
}

impl BetheTuple {
    /// Monic-normalizes every component; zero components are rejected.
    pub fn new(polys: Vec<QuasiPoly>) -> Result<Self, FrameError> {
        if polys.iter().any(|p| p.is_zero()) {
            return Err(FrameError::InvalidInstance("zero component in tuple".into()));
        }
        Ok(BetheTuple { polys: polys.iter().map(|p| p.monic()).collect() })
    }

    pub fn trivial(n: usize) -> Self {
        BetheTuple { polys: vec![QuasiPoly::one(); n] }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn degrees(&self) -> Vec<Rational64> {
        self.polys.iter().map(|p| p.deg()).collect()
    }

    /// Dedup key: ordered list of serialized monic components.
    pub fn key(&self) -> String {
        self.polys.iter().map(|p| p.key()).collect::<Vec<_>>().join(" # ")
    }

    pub fn replace(&self, i: usize, p: QuasiPoly) -> Result<Self, FrameError> {
        let mut polys = self.polys.clone();
        polys[i] = p;
        Self::new(polys)
    }
}

impl std::fmt::Display for BetheTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_len(inst: &ProblemInstance, y: &BetheTuple) -> Result<(), FrameError> {
    if y.len() != inst.rank() {
        return Err(FrameError::WrongLength(y.len(), inst.rank()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePolys {
    pub t: Vec<QuasiPoly>,
    /// x^{gamma_i} T_i.
    pub t_tilde: Vec<QuasiPoly>,
}

/// T_i(x) = prod_s prod_k (x - omega^k z_s)^{<sigma^k Lambda_s, coroot i>}.
pub fn frame_polys(inst: &ProblemInstance) -> Result<FramePolys, FrameError> {
    let n = inst.rank();
    let m = inst.order() as i64;
    let mut t = vec![QuasiPoly::one(); n];
    for (z, lam) in inst.points.iter().zip(&inst.site_weights) {
        for k in 0..m {
            let root = &inst.omega.pow(k) * z;
            let lin = QuasiPoly::from_coeffs(vec![-root, CycScalar::one()]);
            let sl = sigma_pow_on_weight(&inst.aut, lam, k);
            for (i, ti) in t.iter_mut().enumerate() {
                let e = &sl.pairings[i];
                if e.is_negative() || !e.is_integer() {
                    return Err(FrameError::NegativeExponent(i));
                }
                let e = u32::try_from(e.to_integer()).expect("exponent too large");
                if e > 0 {
                    *ti = &*ti * &lin.pow(e);
                }
            }
        }
    }
    let t_tilde = t.iter().enumerate().map(|(i, ti)| ti.shift(inst.gamma_exp(i))).collect();
    Ok(FramePolys { t, t_tilde })
}

/// Why a tuple fails genericity (0-based nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericFailure {
    SharesRootWithFrame(usize),
    SharedRoot(usize, usize),
    NotSquarefree(usize),
    RootAtZero(usize),
}

pub fn is_generic(inst: &ProblemInstance, y: &BetheTuple) -> Result<Option<GenericFailure>, FrameError> {
    check_len(inst, y)?;
    let fp = frame_polys(inst)?;
    let n = inst.rank();
    for i in 0..n {
        let yi = &y.polys[i];
        if yi.coeff(Rational64::zero()).is_zero() {
            return Ok(Some(GenericFailure::RootAtZero(i)));
        }
        if !is_squarefree(yi) {
            return Ok(Some(GenericFailure::NotSquarefree(i)));
        }
        if gcd_squarefree(yi, &fp.t[i]).deg() > Rational64::zero() {
            return Ok(Some(GenericFailure::SharesRootWithFrame(i)));
        }
        for j in 0..n {
            if j != i && inst.cartan.a[i][j] != 0 && gcd_squarefree(yi, &y.polys[j]).deg() > Rational64::zero() {
                return Ok(Some(GenericFailure::SharedRoot(i.min(j), i.max(j))));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalMode {
    Cyclotomic,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalReport {
    pub critical: bool,
    pub per_colour: Vec<bool>,
    /// The combination (gamma P + x P') y_i' - x P y_i'' whose divisibility by y_i is tested.
    pub witnesses: Vec<QuasiPoly>,
}

/// P_i = T_i prod_{j != i} y_j^{-a_ij}, without the power of x.
pub fn interaction_poly(inst: &ProblemInstance, t: &[QuasiPoly], y: &BetheTuple, i: usize) -> QuasiPoly {
    let mut p = t[i].clone();
    for (j, yj) in y.polys.iter().enumerate() {
        let e = inst.cartan.a[i][j];
        if j != i && e != 0 {
            p = &p * &yj.pow((-e) as u32);
        }
    }
    p
}

/// Residue-divisibility test of the Bethe equations, colour by colour.
pub fn is_critical_exact(inst: &ProblemInstance, y: &BetheTuple, _mode: CriticalMode) -> Result<CriticalReport, FrameError> {
    check_len(inst, y)?;
    if let Some(f) = is_generic(inst, y)? {
        return Err(FrameError::NotGeneric(f));
    }
    critical_unchecked(inst, y)
}

/// Divisibility test without the genericity precondition.
pub fn critical_unchecked(inst: &ProblemInstance, y: &BetheTuple) -> Result<CriticalReport, FrameError> {
    check_len(inst, y)?;
    let fp = frame_polys(inst)?;
    let x = QuasiPoly::x();
    let mut per_colour = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..inst.rank() {
        let yi = &y.polys[i];
        let p = interaction_poly(inst, &fp.t, y, i);
        let g = CycScalar::from_q(inst.gamma(i));
        let a = &p.scale(&g) + &(&x * &p.derivative());
        let w = &(&a * &yi.derivative()) - &(&(&x * &p) * &yi.nth_derivative(2));
        let ok = yi.deg().is_zero() || w.exact_div(yi).is_ok();
        per_colour.push(ok);
        witnesses.push(w);
    }
    Ok(CriticalReport { critical: per_colour.iter().all(|b| *b), per_colour, witnesses })
}

/// y_{sigma j}(omega x) is proportional to y_j(x) for all j.
pub fn is_cyclotomic_tuple(inst: &ProblemInstance, y: &BetheTuple) -> Result<bool, FrameError> {
    check_len(inst, y)?;
    for j in 0..inst.rank() {
        let sj = inst.aut.apply(j);
        let lhs = substitute_scale(&y.polys[sj], &inst.omega, BranchRule::Principal)?;
        if !lhs.proportional(&y.polys[j]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sum of the sigma-orbit images of all site weights.
pub fn total_site_weight(inst: &ProblemInstance) -> Weight {
    let mut acc = Weight::zero(inst.rank());
    for lam in &inst.site_weights {
        for k in 0..inst.order() as i64 {
            acc = &acc + &sigma_pow_on_weight(&inst.aut, lam, k);
        }
    }
    acc
}

/// Lambda_inf = Lambda_0 + sum_s sum_k sigma^k Lambda_s - sum_j deg(y_j) alpha_j.
pub fn weight_at_infinity(inst: &ProblemInstance, y: &BetheTuple) -> Result<Weight, FrameError> {
    check_len(inst, y)?;
    let degs: Vec<Q> = y.degrees().into_iter().map(r64_to_q).collect();
    let base = &inst.lambda0 + &total_site_weight(inst);
    Ok(&base - &inst.cartan.root_combination(&degs))
}

/// A violated condition on the weight at the origin (0-based nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda0Violation {
    NotSigmaInvariant,
    /// L_i = 1 node whose pairing is not a nonnegative integer.
    NotNonnegativeInteger(usize),
    /// L_i = 1 node where pairing + 1 is not divisible by M / M_i.
    CongruenceFails(usize),
    /// L_i = 2 node whose pairing is not a half-odd integer >= -1/2.
    NotHalfOdd(usize),
    /// Type-A condition with the chosen p fails at this node.
    TypeAFails(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda0Report {
    pub violations: Vec<Lambda0Violation>,
}

impl Lambda0Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_nonneg_int(x: &Q) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Check the conditions used by cyclotomic generation; with `type_a_p`, also the type-A family.
pub fn validate_lambda0(inst: &ProblemInstance, type_a_p: Option<usize>) -> Result<Lambda0Report, FrameError> {
    let fold = inst.fold()?;
    let mut v = Vec::new();
    if !is_sigma_invariant(&inst.aut, &inst.lambda0) {
        v.push(Lambda0Violation::NotSigmaInvariant);
    }
    let m = inst.order() as i64;
    for i in 0..inst.rank() {
        let g = inst.gamma(i);
        if fold.linking[i] == 1 {
            if !is_nonneg_int(&g) {
                v.push(Lambda0Violation::NotNonnegativeInteger(i));
            } else {
                let modulus = m / fold.orbit_len[i] as i64;
                let val: num_bigint::BigInt = g.to_integer() + 1;
                if !(val % num_bigint::BigInt::from(modulus)).is_zero() {
                    v.push(Lambda0Violation::CongruenceFails(i));
                }
            }
        } else {
            let two_g = &g * Q::from_integer(2.into());
            let ok = two_g.is_integer() && !g.is_integer() && !(&two_g + Q::one()).is_negative();
            if !ok {
                v.push(Lambda0Violation::NotHalfOdd(i));
            }
        }
    }
    if let Some(p) = type_a_p {
        let r = inst.rank();
        let n = r.div_ceil(2);
        if p > n {
            return Err(FrameError::UnsupportedType(format!("p = {p} exceeds {n}")));
        }
        for i in 1..=r {
            let g = inst.gamma(i - 1);
            let ok = if p >= 1 && (i == p || i == r + 1 - p) {
                if 2 * p <= r {
                    let two_g = &g * Q::from_integer(2.into());
                    two_g.is_integer() && !g.is_integer() && !(&two_g + Q::one()).is_negative()
                } else {
                    // middle node of odd rank
                    is_nonneg_int(&g) && g.to_integer().is_odd()
                }
            } else {
                // 2 Z_{>=0} / M_i
                let scaled = &g * Q::from_integer((fold.orbit_len[i - 1] as i64).into());
                is_nonneg_int(&scaled) && scaled.to_integer().is_even()
            };
            if !ok {
                v.push(Lambda0Violation::TypeAFails(i - 1));
            }
        }
    }
    Ok(Lambda0Report { violations: v })
}

/// Gaudin eigenvalues of the cyclotomic and the extended models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenvalues {
    /// E^(s) for each marked point s.
    pub cyclotomic: Vec<CycScalar>,
    /// Index 0 is the origin; then point s, rotation k at 1 + s*M + k.
    pub extended: Vec<CycScalar>,
    /// E^(s) = omega^k times the extended eigenvalue at (s, k), for all s, k.
    pub matches: bool,
    /// The extended eigenvalue at the origin vanishes.
    pub origin_zero: bool,
}

/// sum over roots r of y_c of 1/(z - r), i.e. y_c'(z)/y_c(z).
fn log_derivative(y: &QuasiPoly, z: &CycScalar) -> Result<CycScalar, FrameError> {
    let v = y.eval(z).ok_or(FrameError::UnsupportedType("eigenvalues need polynomial tuples".into()))?;
    if v.is_zero() {
        return Err(FrameError::NotGeneric(GenericFailure::SharesRootWithFrame(0)));
    }
    Ok(&y.derivative().eval(z).unwrap() / &v)
}

/// Evaluate both eigenvalue formulas exactly.
///
/// Sums over Bethe roots of colour c with weight 1/(z - t) are evaluated as the
/// logarithmic derivative of y_c at z, so no roots are extracted.
pub fn eigenvalues(inst: &ProblemInstance, y: &BetheTuple) -> Result<Eigenvalues, FrameError> {
    check_len(inst, y)?;
    let c = &inst.cartan;
    let m = inst.order() as i64;
    let n_pts = inst.points.len();
    let ip = |a: &Weight, b: &Weight| -> Result<CycScalar, FrameError> { Ok(CycScalar::from_q(inner_product(c, a, b)?)) };
    let om = |k: i64| inst.omega.pow(k);
    let roots: Vec<Weight> = (0..c.rank()).map(|j| c.root(j)).collect();
    let root_part = |lam: &Weight, z: &CycScalar| -> Result<CycScalar, FrameError> {
        let mut acc = CycScalar::zero();
        for (cc, yc) in y.polys.iter().enumerate() {
            if yc.deg().is_zero() {
                continue;
            }
            let w = ip(lam, &roots[cc])?;
            if !w.is_zero() {
                acc = &acc + &(&w * &log_derivative(yc, z)?);
            }
        }
        Ok(acc)
    };

    // cyclotomic model
    let mut cyc = Vec::with_capacity(n_pts);
    for s in 0..n_pts {
        let (zs, ls) = (&inst.points[s], &inst.site_weights[s]);
        let mut e = CycScalar::zero();
        for j in 0..n_pts {
            if j == s {
                continue;
            }
            for t in 0..m {
                let num = ip(ls, &sigma_pow_on_weight(&inst.aut, &inst.site_weights[j], t))?;
                e = &e + &(&num / &(zs - &(&om(t) * &inst.points[j])));
            }
        }
        e = &e - &root_part(ls, zs)?;
        let mut local = ip(ls, &inst.lambda0)?;
        for t in 1..m {
            let num = ip(ls, &sigma_pow_on_weight(&inst.aut, ls, t))?;
            local = &local + &(&num / &(&CycScalar::one() - &om(t)));
        }
        e = &e + &(&local / zs);
        cyc.push(e);
    }

    // extended model: origin plus all rotated points
    let mut pts: Vec<(CycScalar, Weight)> = vec![(CycScalar::zero(), inst.lambda0.clone())];
    for s in 0..n_pts {
        for k in 0..m {
            pts.push((&om(k) * &inst.points[s], sigma_pow_on_weight(&inst.aut, &inst.site_weights[s], k)));
        }
    }
    let mut ext = Vec::with_capacity(pts.len());
    for (p, (zp, lp)) in pts.iter().enumerate() {
        let mut e = CycScalar::zero();
        for (q, (zq, lq)) in pts.iter().enumerate() {
            if q != p {
                e = &e + &(&ip(lp, lq)? / &(zp - zq));
            }
        }
        // roots are nonzero, so the origin is fine here too
        let mut rp = CycScalar::zero();
        for (cc, yc) in y.polys.iter().enumerate() {
            if yc.deg().is_zero() {
                continue;
            }
            let w = ip(lp, &roots[cc])?;
            if !w.is_zero() {
                rp = &rp + &(&w * &log_derivative(yc, zp)?);
            }
        }
        ext.push(&e - &rp);
    }
    let mut matches = true;
    for s in 0..n_pts {
        for k in 0..m {
            let idx = 1 + s * m as usize + k as usize;
            if cyc[s] != &om(k) * &ext[idx] {
                matches = false;
            }
        }
    }
    let origin_zero = ext[0].is_zero();
    Ok(Eigenvalues { cyclotomic: cyc, extended: ext, matches, origin_zero })
}

/// Both sides of sum_k (l, s^k l)/(1 - w^k) = (1/2) sum_k (l, s^k l).
pub fn root_of_unity_sum_sides(
    cartan: &CartanData,
    aut: &DiagramAut,
    omega: &CycScalar,
    lambda: &Weight,
) -> Result<(CycScalar, CycScalar), FrameError> {
    let m = aut.order as i64;
    let mut lhs = CycScalar::zero();
    let mut rhs = CycScalar::zero();
    for k in 1..m {
        let v = CycScalar::from_q(inner_product(cartan, lambda, &sigma_pow_on_weight(aut, lambda, k))?);
        lhs = &lhs + &(&v / &(&CycScalar::one() - &omega.pow(k)));
        rhs = &rhs + &v;
    }
    Ok((lhs, &rhs * &CycScalar::frac(1, 2)))
}

pub fn root_of_unity_sum_check(cartan: &CartanData, aut: &DiagramAut, omega: &CycScalar, lambda: &Weight) -> Result<bool, FrameError> {
    if root_of_unity_angle(omega).map(|(n, _)| n) != Some(aut.order) && aut.order > 1 {
        return Err(FrameError::InvalidInstance("omega must be a primitive root of the automorphism order".into()));
    }
    let (l, r) = root_of_unity_sum_sides(cartan, aut, omega, lambda)?;
    Ok(l == r)
}

/// Canonical weight at the origin for type A_R with the involution realized as
/// X -> -J X^T J^{-1}, J anti-diagonal with entries +1, -1, +1, ... from the top row.
///
/// The pairing with coroot j is the trace of sigma^{-1} ad(h_j) on the strictly upper
/// triangular matrices, divided by 1 - omega = 2.
pub fn canonical_lambda0(rank: usize, m: u32) -> Result<Weight, FrameError> {
    if m == 1 {
        return Ok(Weight::zero(rank));
    }
    if m != 2 {
        return Err(FrameError::UnsupportedType(format!("canonical weight needs M = 2, got {m}")));
    }
    let n = rank + 1;
    let mut j = Matrix::zeros(n, n);
    for k in 0..n {
        j[(k, n - 1 - k)] = CycScalar::from_int(if k % 2 == 0 { 1 } else { -1 });
    }
    let jinv = j.inverse().expect("J is invertible");
    let sigma = |x: &Matrix| -> Matrix {
        let mut r = j.mul(&x.transpose()).mul(&jinv);
        for a in 0..n {
            for b in 0..n {
                r[(a, b)] = -&r[(a, b)];
            }
        }
        r
    };
    let mut out = Vec::with_capacity(rank);
    for jj in 0..rank {
        let mut h = Matrix::zeros(n, n);
        h[(jj, jj)] = CycScalar::one();
        h[(jj + 1, jj + 1)] = CycScalar::from_int(-1);
        let mut tr = CycScalar::zero();
        for a in 0..n {
            for b in a + 1..n {
                let mut e = Matrix::zeros(n, n);
                e[(a, b)] = CycScalar::one();
                let ad = &h.mul(&e) - &e.mul(&h);
                // sigma is an involution, so sigma^{-1} = sigma
                tr = &tr + &sigma(&ad)[(a, b)];
            }
        }
        out.push(tr.to_q().unwrap() / Q::from_integer(2.into()));
    }
    Ok(Weight::new(out))
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        let mut r = self.clone();
        for a in 0..r.rows {
            for b in 0..r.cols {
                r[(a, b)] = &self[(a, b)] - &o[(a, b)];
            }
        }
        r
    }
}
