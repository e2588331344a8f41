//! Type A_R with the diagram flip: spaces of quasi-polynomials with a frame, the
//! fundamental operator, the dual space, the bilinear form B, Witt bases, flags
//! and the flows that realize cyclotomic generation.
//!
//! Indices of basis vectors and nodes are 0-based in code; `k` in doc comments is
//! 1-based when it refers to the usual labelling u_1, ..., u_{R+1}.

use std::collections::BTreeSet;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cartan::{dominant_shifted_rep, CartanData, CartanError, DiagramAut, FoldedData, Weight};
use crate::exactalg::{
    divided_wronskian, gcd_squarefree, substitute_scale, wronskian_ode_solve, AlgError, BranchRule, CycScalar, Matrix, Normalization,
    QuasiPoly, Q,
};
use crate::frame::{
    frame_polys, is_critical_exact, is_cyclotomic_tuple, is_generic, q_to_r64, total_site_weight, weight_at_infinity, BetheTuple,
    CriticalMode, FrameError, GenericFailure, ProblemInstance,
};
use crate::genengine::cyclotomic_generate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeAError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("not a type A instance with the diagram flip: {0}")]
    NotTypeA(String),
    #[error("Lambda - Lambda_inf is not a nonnegative integral combination of simple roots")]
    NotInRootCone,
    #[error("Wronskian equation has no quasi-polynomial solution; the tuple is not critical")]
    NoSolution,
    #[error("no special basis: {0}")]
    NoSpecialBasis(String),
    #[error("space is not cyclotomically self-dual")]
    NotSelfDual,
    #[error("flag is not decomposable")]
    NotDecomposable,
    #[error("flag has type {0:?}, expected {1:?}")]
    WrongFlagType(Vec<usize>, Vec<usize>),
    #[error("vector does not lie in the space")]
    NotInSpace,
    #[error("generator {0} is out of range for this rank and p")]
    GeneratorOutOfRange(String),
    #[error("square root needed; enable quadratic-extension mode")]
    NeedsQuadratic,
    #[error("verification failed: {0}")]
    Verification(String),
}

type Res<T> = Result<T, TypeAError>;

fn map_solve(e: AlgError) -> TypeAError {
    match e {
        AlgError::NoSolution => TypeAError::NoSolution,
        other => TypeAError::Alg(other),
    }
}

/// (-1)^m = e^{i pi m} for rational m.
pub fn minus_one_pow(m: Rational64) -> CycScalar {
    let d = *m.denom();
    CycScalar::root_of_unity((2 * d) as u32, *m.numer())
}

/// Rank, after checking that the instance is A_R (R >= 2) with the flip and omega = -1.
pub fn check_type_a(inst: &ProblemInstance) -> Res<usize> {
    let r = inst.rank();
    if r < 2 {
        return Err(TypeAError::NotTypeA("rank must be at least 2".into()));
    }
    if inst.cartan.a != CartanData::type_a(r).a {
        return Err(TypeAError::NotTypeA("Cartan matrix is not A_R".into()));
    }
    if inst.aut.perm != DiagramAut::type_a_flip(&inst.cartan).perm {
        return Err(TypeAError::NotTypeA("automorphism is not the flip".into()));
    }
    if inst.omega != CycScalar::from_int(-1) {
        return Err(TypeAError::NotTypeA("omega must be -1".into()));
    }
    Ok(r)
}

/// The integer p of the type-A family, read off the weight at the origin.
///
/// p is the first node i <= R/2 with a non-integral pairing; for odd R the middle node
/// with an odd pairing gives p = n; otherwise p = 0.
pub fn infer_p(lambda0: &Weight) -> usize {
    let r = lambda0.len();
    for i in 1..=r / 2 {
        if !lambda0.get(i - 1).is_integer() {
            return i;
        }
    }
    if r % 2 == 1 {
        let n = r.div_ceil(2);
        let g = lambda0.get(n - 1);
        if g.is_integer() && (g.to_integer() % 2u32) != 0.into() {
            return n;
        }
    }
    0
}

/// Exponents at infinity and their duals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponents {
    pub d: Vec<Rational64>,
    pub ddag: Vec<Rational64>,
    pub d1: Rational64,
}

/// d_1 = <Lambda - L, sum_k (R+1-k) coroot_k>/(R+1), d_k = d_1 + <L + rho, coroot_1 + ... + coroot_{k-1}>,
/// and the dual exponents from the mirrored sums.
pub fn exponents(lambda: &Weight, lambda_inf_tilde: &Weight) -> Res<Exponents> {
    let r = lambda.len();
    let cartan = CartanData::type_a(r);
    let diff = lambda - lambda_inf_tilde;
    for c in cartan.root_coords(&diff)? {
        if !c.is_integer() || c.is_negative() {
            return Err(TypeAError::NotInRootCone);
        }
    }
    let rp1 = Q::from_integer((r as i64 + 1).into());
    let mut s1 = Q::zero();
    let mut s2 = Q::zero();
    for k in 1..=r {
        s1 += diff.get(k - 1) * Q::from_integer(((r + 1 - k) as i64).into());
        s2 += diff.get(k - 1) * Q::from_integer((k as i64).into());
    }
    let d1 = s1 / &rp1;
    let mut d = vec![d1.clone()];
    for k in 1..=r {
        let next = d[k - 1].clone() + lambda_inf_tilde.get(k - 1) + Q::one();
        d.push(next);
    }
    let last = s2 / &rp1;
    let mut ddag = vec![Q::zero(); r + 1];
    ddag[r] = last;
    for k in (0..r).rev() {
        ddag[k] = ddag[k + 1].clone() + lambda_inf_tilde.get(k) + Q::one();
    }
    Ok(Exponents { d1: q_to_r64(&d1), d: d.iter().map(q_to_r64).collect(), ddag: ddag.iter().map(q_to_r64).collect() })
}

/// T~_1..T~_R, Lambda, the dominant weight at infinity, p and the exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAFrame {
    pub r: usize,
    pub p: usize,
    pub t_tilde: Vec<QuasiPoly>,
    pub lambda: Weight,
    pub lambda_inf_tilde: Weight,
    pub d: Vec<Rational64>,
    pub ddag: Vec<Rational64>,
}

impl TypeAFrame {
    pub fn new(p: usize, t_tilde: Vec<QuasiPoly>, lambda: Weight, lambda_inf_tilde: Weight) -> Res<Self> {
        let r = t_tilde.len();
        if lambda.len() != r || lambda_inf_tilde.len() != r {
            return Err(TypeAError::NotTypeA("weight length differs from rank".into()));
        }
        if 2 * p > r + 1 {
            return Err(TypeAError::NotTypeA(format!("p = {p} too large for rank {r}")));
        }
        let ex = exponents(&lambda, &lambda_inf_tilde)?;
        Ok(TypeAFrame { r, p, t_tilde, lambda, lambda_inf_tilde, d: ex.d, ddag: ex.ddag })
    }

    /// Frame from an instance; `p` defaults to [`infer_p`].
    pub fn from_instance(inst: &ProblemInstance, p: Option<usize>, lambda_inf_tilde: Weight) -> Res<Self> {
        check_type_a(inst)?;
        let p = p.unwrap_or_else(|| infer_p(&inst.lambda0));
        let fp = frame_polys(inst)?;
        let lambda = &inst.lambda0 + &total_site_weight(inst);
        Self::new(p, fp.t_tilde, lambda, lambda_inf_tilde)
    }

    /// Frame whose weight at infinity is the dominant shifted representative of that of `y`.
    pub fn for_tuple(inst: &ProblemInstance, p: Option<usize>, y: &BetheTuple) -> Res<Self> {
        let li = weight_at_infinity(inst, y)?;
        let (dom, _) = dominant_shifted_rep(&inst.cartan, &li)?;
        Self::from_instance(inst, p, dom)
    }

    pub fn dim(&self) -> usize {
        self.r + 1
    }

    pub fn n(&self) -> usize {
        self.r.div_ceil(2)
    }

    /// Positions (0-based) of the symplectic part: 1..p and R+2-p..R+1.
    pub fn is_sp_position(&self, k: usize) -> bool {
        k < self.p || k > self.r - self.p
    }

    /// The subset S = {1..p, R+2-p..R+1}, 1-based.
    pub fn type_s(&self) -> Vec<usize> {
        (1..=self.dim()).filter(|&k| self.is_sp_position(k - 1)).collect()
    }

    /// Wr(fs) / (T~_1^{k-1} T~_2^{k-2} ... T~_{k-1}).
    pub fn wr_dag(&self, fs: &[QuasiPoly]) -> Result<QuasiPoly, AlgError> {
        let k = fs.len();
        let mut div = Vec::new();
        for j in 1..k {
            for _ in 0..(k - j) {
                div.push(self.t_tilde[j - 1].clone());
            }
        }
        divided_wronskian(fs, &div)
    }
}

// ---------- linear algebra on quasi-polynomials ----------

fn keys_of(vs: &[&QuasiPoly]) -> Vec<Rational64> {
    let mut s = BTreeSet::new();
    for v in vs {
        for (e, _) in v.terms() {
            s.insert(e);
        }
    }
    s.into_iter().rev().collect()
}

/// Coordinates of `v` in the independent family `basis`, if `v` lies in its span.
pub fn coords_in(basis: &[QuasiPoly], v: &QuasiPoly) -> Option<Vec<CycScalar>> {
    let mut all: Vec<&QuasiPoly> = basis.iter().collect();
    all.push(v);
    let keys = keys_of(&all);
    let m = Matrix::from_rows(keys.iter().map(|e| basis.iter().map(|b| b.coeff(*e)).collect()).collect());
    if keys.is_empty() {
        return Some(vec![CycScalar::zero(); basis.len()]);
    }
    let rhs: Vec<CycScalar> = keys.iter().map(|e| v.coeff(*e)).collect();
    m.solve(&rhs).map(|s| s.particular)
}

pub fn rank_of(vs: &[QuasiPoly]) -> usize {
    let refs: Vec<&QuasiPoly> = vs.iter().collect();
    let keys = keys_of(&refs);
    if keys.is_empty() {
        return 0;
    }
    Matrix::from_rows(vs.iter().map(|v| keys.iter().map(|e| v.coeff(*e)).collect()).collect()).rank()
}

pub fn combine(coeffs: &[CycScalar], vs: &[QuasiPoly]) -> QuasiPoly {
    let mut acc = QuasiPoly::zero();
    for (c, v) in coeffs.iter().zip(vs) {
        if !c.is_zero() {
            acc = &acc + &v.scale(c);
        }
    }
    acc
}

fn reflect(v: &QuasiPoly) -> Res<QuasiPoly> {
    Ok(substitute_scale(v, &CycScalar::from_int(-1), BranchRule::Principal)?)
}

/// Reduced echelon basis by descending exponent, sorted by degree, leading coefficients 1.
pub fn echelon_basis(vs: &[QuasiPoly]) -> Res<Vec<QuasiPoly>> {
    let refs: Vec<&QuasiPoly> = vs.iter().collect();
    let keys = keys_of(&refs);
    let m = Matrix::from_rows(vs.iter().map(|v| keys.iter().map(|e| v.coeff(*e)).collect()).collect());
    let (red, piv) = m.rref();
    if piv.len() < vs.len() {
        return Err(TypeAError::NoSpecialBasis("vectors are linearly dependent".into()));
    }
    let mut out: Vec<QuasiPoly> =
        (0..piv.len()).map(|i| QuasiPoly::from_terms(keys.iter().enumerate().map(|(j, e)| (*e, red[(i, j)].clone())))).collect();
    out.sort_by_key(|p| p.deg());
    Ok(out)
}

/// Decomposable basis with deg u_k = d_k, unique as a reduced echelon form.
pub fn special_basis(frame: &TypeAFrame, vs: &[QuasiPoly]) -> Res<Vec<QuasiPoly>> {
    if vs.len() != frame.dim() {
        return Err(TypeAError::NoSpecialBasis(format!("{} vectors for dimension {}", vs.len(), frame.dim())));
    }
    let b = echelon_basis(vs)?;
    let degs: Vec<Rational64> = b.iter().map(|u| u.deg()).collect();
    if degs != frame.d {
        return Err(TypeAError::NoSpecialBasis(format!("degrees {degs:?} differ from exponents {:?}", frame.d)));
    }
    if b.iter().any(|u| u.exponent_coset().is_none()) {
        return Err(TypeAError::NoSpecialBasis("space is not decomposable".into()));
    }
    Ok(b)
}

/// A space of quasi-polynomials with its frame; `basis` is special when built by [`QPSpace::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPSpace {
    pub frame: TypeAFrame,
    pub basis: Vec<QuasiPoly>,
}

impl QPSpace {
    pub fn new(frame: TypeAFrame, vs: &[QuasiPoly]) -> Res<Self> {
        let basis = special_basis(&frame, vs)?;
        Ok(QPSpace { frame, basis })
    }

    /// No special-basis requirement; only independence.
    pub fn unchecked(frame: TypeAFrame, vs: Vec<QuasiPoly>) -> Res<Self> {
        if rank_of(&vs) != vs.len() || vs.len() != frame.dim() {
            return Err(TypeAError::Verification("basis is not independent of the right size".into()));
        }
        Ok(QPSpace { frame, basis: vs })
    }

    pub fn sp_basis(&self) -> Vec<QuasiPoly> {
        (0..self.basis.len()).filter(|&k| self.frame.is_sp_position(k)).map(|k| self.basis[k].clone()).collect()
    }

    pub fn o_basis(&self) -> Vec<QuasiPoly> {
        (0..self.basis.len()).filter(|&k| !self.frame.is_sp_position(k)).map(|k| self.basis[k].clone()).collect()
    }

    pub fn contains(&self, v: &QuasiPoly) -> bool {
        coords_in(&self.basis, v).is_some()
    }

    pub fn special_flag(&self) -> Flag {
        Flag { basis: self.basis.clone() }
    }
}

/// Full flag given by an adjusted basis: F_k is the span of the first k vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub basis: Vec<QuasiPoly>,
}

// ---------- fundamental operator ----------

/// D(y) as an ordered product of factors (d - log'(num/den)), leftmost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalOperator {
    pub factors: Vec<(QuasiPoly, QuasiPoly)>,
}

pub fn fundamental_operator(frame: &TypeAFrame, y: &BetheTuple) -> FundamentalOperator {
    let r = frame.r;
    let ext = |k: usize| if k == 0 || k == r + 1 { QuasiPoly::one() } else { y.polys[k - 1].clone() };
    let factors = (0..=r)
        .map(|i| {
            let mut num = ext(r + 1 - i);
            for t in &frame.t_tilde[..r - i] {
                num = &num * t;
            }
            (num, ext(r - i))
        })
        .collect();
    FundamentalOperator { factors }
}

fn reduce_fraction(p: QuasiPoly, q: QuasiPoly) -> Result<(QuasiPoly, QuasiPoly), AlgError> {
    if p.is_zero() {
        return Ok((p, QuasiPoly::one()));
    }
    let g = gcd_squarefree(&p, &q);
    Ok((p.exact_div(&g)?, q.exact_div(&g)?))
}

impl FundamentalOperator {
    pub fn order(&self) -> usize {
        self.factors.len()
    }

    /// D(f) as a reduced fraction.
    pub fn apply(&self, f: &QuasiPoly) -> Result<(QuasiPoly, QuasiPoly), AlgError> {
        let (mut p, mut q) = (f.clone(), QuasiPoly::one());
        for (n, d) in self.factors.iter().rev() {
            // (d - g'/g) h = g (h/g)', with h = p/q and g = n/d
            let a = &p * d;
            let b = &q * n;
            let num = n * &(&(&a.derivative() * &b) - &(&a * &b.derivative()));
            let den = d * &(&b * &b);
            (p, q) = reduce_fraction(num, den)?;
        }
        Ok((p, q))
    }

    pub fn annihilates(&self, f: &QuasiPoly) -> Result<bool, AlgError> {
        Ok(self.apply(f)?.0.is_zero())
    }
}

// ---------- kernel construction ----------

/// Y with Wr(Y, f) = rhs, normalized so that Y has no x^{deg f} term.
fn solve_left(f: &QuasiPoly, rhs: &QuasiPoly) -> Res<QuasiPoly> {
    let sol = wronskian_ode_solve(f, &-rhs, &Normalization::CoeffZero(f.deg())).map_err(map_solve)?;
    Ok(sol.particular)
}

/// The space ker D(y) with the flag whose image under beta is `y`.
///
/// u_1 = y_1 and u_{k+1} is the end of the chain Wr(z_k, y_k) = y_{k-1} T~_k y_{k+1},
/// Wr(z_i, y_i) = y_{i-1} T~_i z_{i+1} for i = k-1, ..., 1.
pub fn kernel_basis(frame: &TypeAFrame, y: &BetheTuple) -> Res<(QPSpace, Flag)> {
    let r = frame.r;
    if y.len() != r {
        return Err(FrameError::WrongLength(y.len(), r).into());
    }
    let ext = |k: usize| if k == 0 || k == r + 1 { QuasiPoly::one() } else { y.polys[k - 1].clone() };
    let mut u = vec![ext(1)];
    for m in 1..=r {
        let mut z = solve_left(&ext(m), &(&(&ext(m - 1) * &frame.t_tilde[m - 1]) * &ext(m + 1)))?;
        for i in (1..m).rev() {
            z = solve_left(&ext(i), &(&(&ext(i - 1) * &frame.t_tilde[i - 1]) * &z))?;
        }
        u.push(z);
    }
    if u.iter().any(|v| !v.is_quasi_polynomial()) {
        return Err(TypeAError::Verification("kernel vector has a negative exponent".into()));
    }
    for k in 1..=r {
        let w = frame.wr_dag(&u[..k])?;
        if !w.proportional(&y.polys[k - 1]) {
            return Err(TypeAError::Verification(format!("divided Wronskian of the first {k} vectors is not y_{k}")));
        }
    }
    let space = QPSpace::new(frame.clone(), &u)?;
    Ok((space, Flag { basis: u }))
}

// ---------- frame conditions ----------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameReport {
    /// A basis with deg u_k = d_k exists.
    pub degrees: bool,
    /// Divided Wronskians are regular away from 0 and have no common nonzero root.
    pub regular: bool,
    /// Divided Wronskians expand in nonnegative half-integer powers at 0, some with nonzero constant term.
    pub at_zero: bool,
    pub notes: Vec<String>,
    /// Wr-dagger of the whole reduced echelon basis.
    pub top_wronskian: Option<CycScalar>,
}

impl FrameReport {
    pub fn ok(&self) -> bool {
        self.degrees && self.regular && self.at_zero
    }
}

/// Clause-by-clause frame check.
///
/// Divided Wronskians are multilinear, so subsets of a basis suffice for all three clauses.
pub fn frame_conditions_check(space: &QPSpace) -> FrameReport {
    let f = &space.frame;
    let n = space.basis.len();
    let mut notes = Vec::new();
    let ech = echelon_basis(&space.basis).ok();
    let degrees = match &ech {
        Some(b) => {
            let ds: Vec<Rational64> = b.iter().map(|u| u.deg()).collect();
            if ds != f.d {
                notes.push(format!("degrees {ds:?}, exponents {:?}", f.d));
            }
            ds == f.d
        }
        None => {
            notes.push("basis is dependent".into());
            false
        }
    };
    let mut regular = true;
    let mut at_zero = true;
    for k in 1..=n {
        let mut common: Option<QuasiPoly> = None;
        let mut const_term = false;
        for mask in 1u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let sub: Vec<QuasiPoly> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| space.basis[i].clone()).collect();
            match f.wr_dag(&sub) {
                Ok(w) => {
                    let half_ok = w.terms().all(|(e, _)| !e.is_negative() && (e * 2).is_integer());
                    if !half_ok {
                        at_zero = false;
                        notes.push(format!("Wr-dagger of subset {mask:b} is {w}, not a series in nonnegative half powers"));
                    }
                    if !w.coeff(Rational64::zero()).is_zero() {
                        const_term = true;
                    }
                    common = Some(match common {
                        None => w.monic(),
                        Some(g) => gcd_squarefree(&g, &w),
                    });
                }
                Err(_) => {
                    regular = false;
                    notes.push(format!("Wr-dagger of subset {mask:b} has a pole away from 0"));
                }
            }
        }
        if let Some(g) = common {
            if g.len() > 1 {
                regular = false;
                notes.push(format!("all Wr-daggers of size {k} vanish at the roots of {g}"));
            }
        }
        if !const_term {
            at_zero = false;
            notes.push(format!("no Wr-dagger of size {k} is nonzero at 0"));
        }
    }
    let top_wronskian = ech.and_then(|b| f.wr_dag(&b).ok()).and_then(|w| {
        if w.len() == 1 && w.deg().is_zero() {
            Some(w.coeff(Rational64::zero()))
        } else {
            None
        }
    });
    FrameReport { degrees, regular, at_zero, notes, top_wronskian }
}

// ---------- duality and the bilinear form ----------

/// W_i = Wr-dagger of the basis with u_i omitted.
pub fn dual_basis(frame: &TypeAFrame, basis: &[QuasiPoly]) -> Res<Vec<QuasiPoly>> {
    (0..basis.len())
        .map(|i| {
            let rest: Vec<QuasiPoly> = basis.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
            Ok(frame.wr_dag(&rest)?)
        })
        .collect()
}

/// Dual basis of the special basis, with its degree and decomposability assertions.
pub fn dual_of_space(space: &QPSpace) -> Res<Vec<QuasiPoly>> {
    let w = dual_basis(&space.frame, &space.basis)?;
    let degs: Vec<Rational64> = w.iter().map(|v| v.deg()).collect();
    if degs != space.frame.ddag {
        return Err(TypeAError::Verification(format!("dual degrees {degs:?} differ from {:?}", space.frame.ddag)));
    }
    if w.iter().any(|v| v.exponent_coset().is_none()) {
        return Err(TypeAError::Verification("dual basis is not decomposable".into()));
    }
    Ok(w)
}

/// (v, Wr-dagger(v_2..v_{R+1})) = Wr-dagger(v, v_2, ..., v_{R+1}).
pub fn pairing(frame: &TypeAFrame, v: &QuasiPoly, rest: &[QuasiPoly]) -> Res<CycScalar> {
    let mut all = vec![v.clone()];
    all.extend_from_slice(rest);
    constant_of(&frame.wr_dag(&all)?)
}

fn constant_of(w: &QuasiPoly) -> Res<CycScalar> {
    if w.is_zero() {
        return Ok(CycScalar::zero());
    }
    if w.len() != 1 || !w.deg().is_zero() {
        return Err(TypeAError::Verification(format!("top divided Wronskian {w} is not constant")));
    }
    Ok(w.coeff(Rational64::zero()))
}

/// v(-x) lies in the dual space for every basis vector v.
pub fn is_cyclotomically_self_dual(space: &QPSpace) -> Res<bool> {
    let w = dual_basis(&space.frame, &space.basis)?;
    for v in &space.basis {
        if coords_in(&w, &reflect(v)?).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gram matrix G_ij = B(b_i, b_j) of any basis of a self-dual space.
///
/// With b_j(-x) = sum_k C_jk W_k, G_ij = (-1)^i C_ji Wr-dagger(b) (0-based i).
pub fn gram_matrix(frame: &TypeAFrame, basis: &[QuasiPoly]) -> Res<Matrix> {
    let w = dual_basis(frame, basis)?;
    let top = constant_of(&frame.wr_dag(basis)?)?;
    let n = basis.len();
    let mut c = Vec::with_capacity(n);
    for b in basis {
        c.push(coords_in(&w, &reflect(b)?).ok_or(TypeAError::NotSelfDual)?);
    }
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        let sign = if i % 2 == 0 { top.clone() } else { -&top };
        for j in 0..n {
            g[(i, j)] = &c[j][i] * &sign;
        }
    }
    Ok(g)
}

/// The form B on a self-dual space, in the coordinates of its stored basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BForm {
    pub basis: Vec<QuasiPoly>,
    pub gram: Matrix,
}

pub fn bilinear_form(space: &QPSpace) -> Res<BForm> {
    if !is_cyclotomically_self_dual(space)? {
        return Err(TypeAError::NotSelfDual);
    }
    Ok(BForm { basis: space.basis.clone(), gram: gram_matrix(&space.frame, &space.basis)? })
}

impl BForm {
    pub fn eval(&self, u: &QuasiPoly, v: &QuasiPoly) -> Res<CycScalar> {
        let a = coords_in(&self.basis, u).ok_or(TypeAError::NotInSpace)?;
        let b = coords_in(&self.basis, v).ok_or(TypeAError::NotInSpace)?;
        let gb = self.gram.mul_vec(&b);
        Ok(a.iter().zip(&gb).fold(CycScalar::zero(), |acc, (x, y)| &acc + &(x * y)))
    }

    /// Gram matrix of another family in this space.
    pub fn gram_of(&self, vs: &[QuasiPoly]) -> Res<Matrix> {
        let rows: Vec<Vec<CycScalar>> = vs.iter().map(|v| coords_in(&self.basis, v).ok_or(TypeAError::NotInSpace)).collect::<Res<_>>()?;
        let a = Matrix::from_rows(rows);
        Ok(a.mul(&self.gram).mul(&a.transpose()))
    }
}

/// B(u, v) = (u, v(-x)).
pub fn bform(space: &QPSpace, u: &QuasiPoly, v: &QuasiPoly) -> Res<CycScalar> {
    bilinear_form(space)?.eval(u, v)
}

// ---------- Witt bases ----------

/// Lower-triangular T such that T G T^t is anti-diagonal.
///
/// Row k is u_k plus multiples of earlier rows; the multiple of row R+2-m kills B(r_k, r_m).
pub fn anti_diagonalize(g: &Matrix) -> Res<Matrix> {
    let n = g.rows;
    let bil = |a: &[CycScalar], b: &[CycScalar]| -> CycScalar {
        let gb = g.mul_vec(b);
        a.iter().zip(&gb).fold(CycScalar::zero(), |acc, (x, y)| &acc + &(x * y))
    };
    let mut t: Vec<Vec<CycScalar>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut base = vec![CycScalar::zero(); n];
        base[k] = CycScalar::one();
        let mut row = base.clone();
        for m in 0..k {
            if m + k < n {
                continue;
            }
            let j = n - 1 - m;
            let num = bil(&base, &t[m]);
            if num.is_zero() {
                continue;
            }
            let den = bil(&t[j], &t[m]);
            if den.is_zero() {
                return Err(TypeAError::Verification("form is degenerate".into()));
            }
            let a = -&(&num / &den);
            for (x, y) in row.iter_mut().zip(&t[j]) {
                *x = &*x + &(&a * y);
            }
        }
        t.push(row);
    }
    let tm = Matrix::from_rows(t);
    let gr = tm.mul(g).mul(&tm.transpose());
    for i in 0..n {
        for j in 0..n {
            let z = gr[(i, j)].is_zero();
            if i + j == n - 1 && z {
                return Err(TypeAError::Verification("form is degenerate".into()));
            }
            if i + j != n - 1 && !z {
                return Err(TypeAError::Verification("form is not anti-diagonalizable along this flag".into()));
            }
        }
    }
    Ok(tm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WittMode {
    /// Anti-diagonal Gram matrix, no rescaling.
    #[default]
    AntiDiagonal,
    /// Constants b_k; the middle vector only when `quadratic` is on.
    Reduced,
    /// The basis with Wr-dagger(r_1..r_{k-1}, r_{k+1}..) = (-1)^{-deg r_{R+2-k}} r_{R+2-k}(-x).
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct WittOptions {
    pub mode: WittMode,
    /// Allow square roots (adjoined as cyclotomic numbers).
    pub quadratic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittBasis {
    pub vectors: Vec<QuasiPoly>,
    /// B(r_k, r_{R+2-k}).
    pub constants: Vec<CycScalar>,
    /// For odd dimension without square roots: B(r_mid, r_mid), left unnormalized.
    pub middle_square: Option<CycScalar>,
    /// Wr-dagger(r_1, ..., r_{R+1}).
    pub top_wronskian: CycScalar,
}

/// b_k of a reduced Witt basis (0-based k).
pub fn reduced_constant(r: usize, p: usize, k: usize) -> CycScalar {
    let k1 = k + 1;
    let sgn = |e: usize| CycScalar::from_int(if e.is_multiple_of(2) { 1 } else { -1 });
    if k1 <= p {
        sgn(k1)
    } else if k1 >= r + 2 - p {
        sgn(r + 1 - k1)
    } else {
        CycScalar::one()
    }
}

/// Witt basis of the special flag.
pub fn witt_basis(space: &QPSpace, opts: WittOptions) -> Res<WittBasis> {
    witt_basis_for_flag(space, &space.special_flag(), opts)
}

/// Witt basis adapted to an isotropic flag.
pub fn witt_basis_for_flag(space: &QPSpace, flag: &Flag, opts: WittOptions) -> Res<WittBasis> {
    let form = bilinear_form(space)?;
    let (adj, _) = decomposable_adjusted_basis(space, flag)?;
    let g = form.gram_of(&adj)?;
    let t = anti_diagonalize(&g)?;
    let n = adj.len();
    let mut r: Vec<QuasiPoly> = (0..n).map(|k| combine(t.row(k), &adj)).collect();
    let gr = t.mul(&g).mul(&t.transpose());
    let mut c: Vec<CycScalar> = (0..n).map(|k| gr[(k, n - 1 - k)].clone()).collect();
    let mut middle_square = None;
    match opts.mode {
        WittMode::AntiDiagonal => {
            if n % 2 == 1 {
                middle_square = Some(c[n / 2].clone());
            }
        }
        WittMode::Reduced => {
            let ty = flag_type(space, flag)?;
            if ty != space.frame.type_s() {
                return Err(TypeAError::WrongFlagType(ty, space.frame.type_s()));
            }
            for k in 0..n / 2 {
                let j = n - 1 - k;
                let s = &reduced_constant(space.frame.r, space.frame.p, k) / &c[k];
                r[j] = r[j].scale(&s);
                c[k] = &c[k] * &s;
                c[j] = &c[j] * &s;
                if c[j] != reduced_constant(space.frame.r, space.frame.p, j) {
                    return Err(TypeAError::Verification(format!("mirror constant at {} is {}", j + 1, c[j])));
                }
            }
            if n % 2 == 1 {
                let m = n / 2;
                if opts.quadratic {
                    let s = c[m].inv().and_then(|x| x.sqrt_unit_rational()).ok_or(TypeAError::NeedsQuadratic)?;
                    r[m] = r[m].scale(&s);
                    c[m] = CycScalar::one();
                } else {
                    middle_square = Some(c[m].clone());
                }
            }
        }
        WittMode::Normalized => {
            let e = |k: usize, r: &[QuasiPoly]| minus_one_pow(r[n - 1 - k].deg() + Rational64::from_integer(k as i64 + 2));
            for k in 0..n / 2 {
                let j = n - 1 - k;
                let s = &e(k, &r) / &c[k];
                if &e(j, &r) / &c[j] != s {
                    return Err(TypeAError::Verification(format!("pair ({}, {}) cannot be normalized together", k + 1, j + 1)));
                }
                r[j] = r[j].scale(&s);
                c[k] = e(k, &r);
                c[j] = e(j, &r);
            }
            if n % 2 == 1 {
                if !opts.quadratic {
                    return Err(TypeAError::NeedsQuadratic);
                }
                let m = n / 2;
                let s = (&e(m, &r) / &c[m]).sqrt_unit_rational().ok_or(TypeAError::NeedsQuadratic)?;
                r[m] = r[m].scale(&s);
                c[m] = e(m, &r);
                let top = constant_of(&space.frame.wr_dag(&r)?)?;
                if top == CycScalar::from_int(-1) {
                    r[m] = -&r[m];
                }
            }
            let top = constant_of(&space.frame.wr_dag(&r)?)?;
            if !top.is_one() {
                return Err(TypeAError::Verification(format!("normalized Witt basis has Wr-dagger {top}")));
            }
        }
    }
    let top_wronskian = constant_of(&space.frame.wr_dag(&r)?)?;
    Ok(WittBasis { vectors: r, constants: c, middle_square, top_wronskian })
}

// ---------- flags ----------

/// y_k = Wr-dagger(u_1, ..., u_k), k = 1..R, monic.
pub fn beta(frame: &TypeAFrame, flag: &Flag) -> Res<BetheTuple> {
    let ys = (1..=frame.r).map(|k| frame.wr_dag(&flag.basis[..k]).map_err(TypeAError::from)).collect::<Res<Vec<_>>>()?;
    Ok(BetheTuple::new(ys)?)
}

/// y_k(-x) is proportional to y_{R+1-k}(x) for all k.
pub fn is_cyclotomic_qp(y: &BetheTuple) -> Res<bool> {
    let r = y.len();
    for k in 0..r {
        if !reflect(&y.polys[k])?.proportional(&y.polys[r - 1 - k]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Type Q of a decomposable flag, as the 1-based positions where the symplectic dimension jumps.
pub fn flag_type(space: &QPSpace, flag: &Flag) -> Res<Vec<usize>> {
    let sp = space.sp_basis();
    let o = space.o_basis();
    let mut q = Vec::new();
    let mut prev_sp = 0;
    for k in 1..=flag.basis.len() {
        let fk = &flag.basis[..k];
        let meet = |v: &[QuasiPoly]| {
            let mut all = fk.to_vec();
            all.extend_from_slice(v);
            k + v.len() - rank_of(&all)
        };
        let (a, b) = (meet(&sp), meet(&o));
        if a + b != k {
            return Err(TypeAError::NotDecomposable);
        }
        if a > prev_sp {
            q.push(k);
        }
        prev_sp = a;
    }
    Ok(q)
}

/// Adjusted basis whose vectors each lie in K_Sp or K_O; the flags agree.
pub fn decomposable_adjusted_basis(space: &QPSpace, flag: &Flag) -> Res<(Vec<QuasiPoly>, Vec<bool>)> {
    let q = flag_type(space, flag)?;
    let mut out = Vec::new();
    let mut is_sp = Vec::new();
    for (k, f) in flag.basis.iter().enumerate() {
        let c = coords_in(&space.basis, f).ok_or(TypeAError::NotInSpace)?;
        let want_sp = q.contains(&(k + 1));
        let part: Vec<CycScalar> = c
            .iter()
            .enumerate()
            .map(|(j, x)| if space.frame.is_sp_position(j) == want_sp { x.clone() } else { CycScalar::zero() })
            .collect();
        out.push(combine(&part, &space.basis));
        is_sp.push(want_sp);
    }
    for k in 1..=out.len() {
        let mut both = out[..k].to_vec();
        both.extend_from_slice(&flag.basis[..k]);
        if rank_of(&out[..k]) != k || rank_of(&both) != k {
            return Err(TypeAError::NotDecomposable);
        }
    }
    Ok((out, is_sp))
}

/// Interleave a flag of K_Sp and a flag of K_O according to the 1-based subset `q`.
pub fn eta_q(space: &QPSpace, plus: &[QuasiPoly], minus: &[QuasiPoly], q: &[usize]) -> Res<Flag> {
    let (sp, o) = (space.sp_basis(), space.o_basis());
    if plus.len() != sp.len() || minus.len() != o.len() || q.len() != sp.len() {
        return Err(TypeAError::NotDecomposable);
    }
    if plus.iter().any(|v| coords_in(&sp, v).is_none()) || minus.iter().any(|v| coords_in(&o, v).is_none()) {
        return Err(TypeAError::NotDecomposable);
    }
    let (mut a, mut b) = (plus.iter(), minus.iter());
    let basis =
        (1..=space.basis.len()).map(|k| if q.contains(&k) { a.next().unwrap().clone() } else { b.next().unwrap().clone() }).collect();
    Ok(Flag { basis })
}

/// F_k = F_{R+1-k}^perp for all k, i.e. B(f_a, f_b) = 0 whenever a + b <= R + 1 (1-based).
pub fn isotropy_check(space: &QPSpace, flag: &Flag) -> Res<bool> {
    let form = bilinear_form(space)?;
    let g = form.gram_of(&flag.basis)?;
    let n = flag.basis.len();
    for k in 1..n {
        // rows 1..R+1-k against columns 1..k
        let block = Matrix::from_rows((0..n - k).map(|a| (0..k).map(|b| g[(a, b)].clone()).collect()).collect());
        if block.rank() != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// span(u_1(-x)..u_k(-x)) = span(W_{R+1}, ..., W_{R+2-k}) for every k, W the dual basis of the flag.
pub fn span_chain_holds(space: &QPSpace, flag: &Flag) -> Res<bool> {
    let w = dual_basis(&space.frame, &flag.basis)?;
    let n = flag.basis.len();
    let refl: Vec<QuasiPoly> = flag.basis.iter().map(reflect).collect::<Res<_>>()?;
    for k in 1..=n {
        let tail: Vec<QuasiPoly> = w[n - k..].to_vec();
        let mut all = tail.clone();
        all.extend_from_slice(&refl[..k]);
        if rank_of(&all) != k {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------- flows ----------

/// Negative simple root generators of sp(K_Sp) + so(K_O) in a Witt basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowGenerator {
    /// Symplectic part, k = 1..p.
    X(usize),
    /// Orthogonal part for odd R, k = 1..n-p-1.
    Y(usize),
    /// The extra orthogonal generator for odd R.
    YTilde,
    /// Orthogonal part for even R, k = 1..n-p.
    Z(usize),
}

impl std::fmt::Display for FlowGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowGenerator::X(k) => write!(f, "X{k}"),
            FlowGenerator::Y(k) => write!(f, "Y{k}"),
            FlowGenerator::YTilde => write!(f, "Ytilde"),
            FlowGenerator::Z(k) => write!(f, "Z{k}"),
        }
    }
}

impl std::str::FromStr for FlowGenerator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        if lower == "ytilde" || lower == "y~" {
            return Ok(FlowGenerator::YTilde);
        }
        let (head, tail) = s.split_at(1);
        let k: usize = tail.trim_start_matches('_').parse().map_err(|_| format!("bad generator '{s}'"))?;
        match head {
            "X" | "x" => Ok(FlowGenerator::X(k)),
            "Y" | "y" => Ok(FlowGenerator::Y(k)),
            "Z" | "z" => Ok(FlowGenerator::Z(k)),
            _ => Err(format!("bad generator '{s}'")),
        }
    }
}

impl FlowGenerator {
    /// (from, to), 1-based: the generator sends r_from to r_to, with the compensating
    /// entry on the mirror pair.
    pub fn pair(&self, r: usize, p: usize) -> Res<(usize, usize)> {
        let n = r.div_ceil(2);
        let bad = || TypeAError::GeneratorOutOfRange(self.to_string());
        match *self {
            FlowGenerator::X(k) if k >= 1 && k < p => Ok((k, k + 1)),
            FlowGenerator::X(k) if k >= 1 && k == p => Ok((p, r + 2 - p)),
            FlowGenerator::Y(k) if r % 2 == 1 && k >= 1 && k + p < n => Ok((p + k, p + k + 1)),
            FlowGenerator::YTilde if r % 2 == 1 && n >= p + 2 => Ok((n - 1, n + 1)),
            FlowGenerator::Z(k) if r.is_multiple_of(2) && k >= 1 && k + p <= n => Ok((p + k, p + k + 1)),
            _ => Err(bad()),
        }
    }

    /// All generators for (R, p).
    pub fn all(r: usize, p: usize) -> Vec<FlowGenerator> {
        let n = r.div_ceil(2);
        let mut out: Vec<FlowGenerator> = (1..=p).map(FlowGenerator::X).collect();
        if r % 2 == 1 {
            out.extend((1..n.saturating_sub(p)).map(FlowGenerator::Y));
            if n >= p + 2 {
                out.push(FlowGenerator::YTilde);
            }
        } else {
            out.extend((1..=n - p).map(FlowGenerator::Z));
        }
        out
    }
}

/// Matrix (column = source) of the generator in the Witt basis with constants `c`.
fn generator_matrix(gen: FlowGenerator, r: usize, p: usize, c: &[CycScalar]) -> Res<Matrix> {
    let (i1, j1) = gen.pair(r, p)?;
    let n = r + 1;
    let (i, j) = (i1 - 1, j1 - 1);
    let (is, js) = (n - 1 - i, n - 1 - j);
    let mut x = Matrix::zeros(n, n);
    x[(j, i)] = CycScalar::one();
    if j != is {
        // X r_{j*} = lambda r_{i*} keeps B invariant
        let lambda = -&(&c[j] / &c[i]);
        x[(is, js)] = &x[(is, js)] + &lambda;
    }
    Ok(x)
}

fn exp_nilpotent(x: &Matrix, t: &CycScalar) -> Matrix {
    let n = x.rows;
    let mut out = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for m in 1..=n {
        term = term.mul(x);
        let mut s = Matrix::zeros(n, n);
        let f = &t.pow(m as i64) / &CycScalar::from_int((1..=m as i64).product());
        let mut any = false;
        for a in 0..n {
            for b in 0..n {
                if !term[(a, b)].is_zero() {
                    any = true;
                    s[(a, b)] = &term[(a, b)] * &f;
                }
            }
        }
        if !any {
            break;
        }
        for a in 0..n {
            for b in 0..n {
                out[(a, b)] = &out[(a, b)] + &s[(a, b)];
            }
        }
    }
    out
}

/// exp(c X) applied to the Witt basis.
pub fn flow_basis(witt: &WittBasis, gen: FlowGenerator, r: usize, p: usize, c: &CycScalar) -> Res<Vec<QuasiPoly>> {
    let e = exp_nilpotent(&generator_matrix(gen, r, p, &witt.constants)?, c);
    let n = witt.vectors.len();
    Ok((0..n).map(|s| combine(&(0..n).map(|t| e[(t, s)].clone()).collect::<Vec<_>>(), &witt.vectors)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub tuple: BetheTuple,
    pub flag: Flag,
}

/// beta(exp(c X) F) for an isotropic flag of type S, via a reduced Witt basis adapted to F.
pub fn apply_flow(space: &QPSpace, flag: &Flag, gen: FlowGenerator, c: &CycScalar) -> Res<FlowResult> {
    gen.pair(space.frame.r, space.frame.p)?;
    if !isotropy_check(space, flag)? {
        return Err(TypeAError::Verification("flag is not isotropic".into()));
    }
    let witt = witt_basis_for_flag(space, flag, WittOptions { mode: WittMode::Reduced, quadratic: false })?;
    let basis = flow_basis(&witt, gen, space.frame.r, space.frame.p, c)?;
    let out = Flag { basis };
    if !isotropy_check(space, &out)? {
        return Err(TypeAError::Verification("flow left the isotropic flags".into()));
    }
    Ok(FlowResult { tuple: beta(&space.frame, &out)?, flag: out })
}

/// Node of the generation direction matching a flow generator (0-based).
pub fn generator_node(gen: FlowGenerator, r: usize, p: usize) -> Res<usize> {
    gen.pair(r, p)?;
    Ok(match gen {
        FlowGenerator::X(k) => k - 1,
        FlowGenerator::Y(k) | FlowGenerator::Z(k) => p + k - 1,
        FlowGenerator::YTilde => r.div_ceil(2) - 1,
    })
}

/// The parameter c' with generate(y, node, c') = target, if the family contains the target.
///
/// After monic normalization every coefficient of the generated tuple is a Moebius function
/// of c, so c' is read off one varying coefficient by cross-ratio and then confirmed by
/// generating at c'.
pub fn generation_parameter_for(
    inst: &ProblemInstance,
    fold: &FoldedData,
    y: &BetheTuple,
    node: usize,
    target: &BetheTuple,
) -> Res<Option<CycScalar>> {
    let mut samples: Vec<(CycScalar, BetheTuple)> = Vec::new();
    for c in [1, 2, 3, 5, 7, -1, -2, -3] {
        let c = CycScalar::from_int(c);
        if let Ok((t, _)) = cyclotomic_generate(inst, fold, y, node, &c) {
            samples.push((c, t));
            if samples.len() == 3 {
                break;
            }
        }
    }
    if samples.len() < 3 {
        return Err(TypeAError::Verification("generation fails at every probe parameter".into()));
    }
    let mut candidate = None;
    'search: for k in 0..y.len() {
        let mut exps: Vec<Rational64> = target.polys[k].terms().map(|(e, _)| e).collect();
        for (_, t) in &samples {
            exps.extend(t.polys[k].terms().map(|(e, _)| e));
        }
        for e in exps {
            let v: Vec<CycScalar> = samples.iter().map(|(_, t)| t.polys[k].coeff(e)).collect();
            if v[0] == v[1] && v[1] == v[2] {
                continue;
            }
            candidate = moebius_preimage(&samples.iter().map(|(c, _)| c.clone()).collect::<Vec<_>>(), &v, &target.polys[k].coeff(e));
            break 'search;
        }
    }
    let Some(cp) = candidate else { return Ok(None) };
    match cyclotomic_generate(inst, fold, y, node, &cp) {
        Ok((t, _)) if &t == target => Ok(Some(cp)),
        _ => Ok(None),
    }
}

/// x with f(x) = t for the Moebius map f through (c_j, v_j), via equal cross-ratios.
fn moebius_preimage(c: &[CycScalar], v: &[CycScalar], t: &CycScalar) -> Option<CycScalar> {
    if let Some(j) = v.iter().position(|vj| vj == t) {
        return Some(c[j].clone());
    }
    // (x - c1)(c0 - c2) / ((x - c2)(c0 - c1)) = (t - v1)(v0 - v2) / ((t - v2)(v0 - v1)) =: k
    let den = &(t - &v[2]) * &(&v[0] - &v[1]);
    if den.is_zero() {
        return None;
    }
    let k = &(&(t - &v[1]) * &(&v[0] - &v[2])) / &den;
    let a = &c[0] - &c[2];
    let b = &k * &(&c[0] - &c[1]);
    // x a - c1 a = x b - c2 b
    let lead = &a - &b;
    if lead.is_zero() {
        return None;
    }
    Some(&(&(&c[1] * &a) - &(&c[2] * &b)) / &lead)
}

// ---------- populations ----------

/// Small rationals used for group-element sampling.
pub fn sample_pool() -> Vec<CycScalar> {
    [(1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1), (1, 3), (3, 1), (-2, 3)].iter().map(|&(a, b)| CycScalar::frac(a, b)).collect()
}

/// The variety of cyclotomic tuples through a seed, with a sampler.
#[derive(Clone, Debug)]
pub struct CyclotomicPopulation {
    pub space: QPSpace,
    pub seed_flag: Flag,
    pub witt: WittBasis,
    pub sp_dim: usize,
    pub o_dim: usize,
    /// Dimensions of the isotropic flag varieties of K_Sp and K_O.
    pub variety_dims: (usize, usize),
    pub generators: Vec<FlowGenerator>,
}

impl CyclotomicPopulation {
    pub fn description(&self) -> String {
        let kind = |m: usize| if m == 1 { "point".to_string() } else { format!("isotropic flags of dim {m}") };
        format!(
            "FL_perp(K_Sp) x FL_perp(K_O): symplectic dim {} ({}), orthogonal dim {} ({}); variety dimension {}",
            self.sp_dim,
            if self.sp_dim == 0 { "point".into() } else { kind(self.sp_dim) },
            self.o_dim,
            if self.o_dim <= 1 { "point".into() } else { kind(self.o_dim) },
            self.variety_dims.0 + self.variety_dims.1
        )
    }

    /// Apply exp(c_1 G_1) ... exp(c_m G_m) to the Witt flag of the seed.
    pub fn member(&self, params: &[CycScalar]) -> Res<FlowResult> {
        let (r, p) = (self.space.frame.r, self.space.frame.p);
        let n = r + 1;
        let mut g = Matrix::identity(n);
        for (gen, c) in self.generators.iter().zip(params) {
            if !c.is_zero() {
                g = g.mul(&exp_nilpotent(&generator_matrix(*gen, r, p, &self.witt.constants)?, c));
            }
        }
        let basis: Vec<QuasiPoly> =
            (0..n).map(|s| combine(&(0..n).map(|t| g[(t, s)].clone()).collect::<Vec<_>>(), &self.witt.vectors)).collect();
        let flag = Flag { basis };
        Ok(FlowResult { tuple: beta(&self.space.frame, &flag)?, flag })
    }

    /// Deterministic sampling; non-generic members are skipped within `retry_budget`.
    pub fn sample(&self, inst: &ProblemInstance, count: usize, seed: u64, retry_budget: usize) -> Res<PopulationSample> {
        let pool = sample_pool();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members = Vec::new();
        let mut skipped = Vec::new();
        while members.len() < count {
            let params: Vec<CycScalar> = self.generators.iter().map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
            let m = self.member(&params)?;
            if let Some(why) = is_generic(inst, &m.tuple)? {
                skipped.push((params, why));
                if skipped.len() > retry_budget {
                    return Err(TypeAError::Verification(format!("more than {retry_budget} non-generic samples")));
                }
                continue;
            }
            let critical = is_critical_exact(inst, &m.tuple, CriticalMode::Extended)?.critical;
            let cyclotomic = is_cyclotomic_tuple(inst, &m.tuple)?;
            members.push(SampledMember { params, tuple: m.tuple, critical, cyclotomic });
        }
        Ok(PopulationSample { members, skipped })
    }
}

#[derive(Clone, Debug)]
pub struct SampledMember {
    pub params: Vec<CycScalar>,
    pub tuple: BetheTuple,
    pub critical: bool,
    pub cyclotomic: bool,
}

#[derive(Clone, Debug)]
pub struct PopulationSample {
    pub members: Vec<SampledMember>,
    pub skipped: Vec<(Vec<CycScalar>, GenericFailure)>,
}

fn isotropic_flag_dim(m: usize, symplectic: bool) -> usize {
    let l = m / 2;
    if symplectic || m % 2 == 1 {
        l * l
    } else {
        l * l.saturating_sub(1)
    }
}

/// Kernel space of the seed, its self-duality, and the Witt flag of the seed.
pub fn cyclotomic_population(inst: &ProblemInstance, p: Option<usize>, seed: &BetheTuple) -> Res<CyclotomicPopulation> {
    let frame = TypeAFrame::for_tuple(inst, p, seed)?;
    let (space, flag) = kernel_basis(&frame, seed)?;
    if !is_cyclotomically_self_dual(&space)? {
        return Err(TypeAError::NotSelfDual);
    }
    if !isotropy_check(&space, &flag)? {
        return Err(TypeAError::Verification("seed flag is not isotropic".into()));
    }
    let witt = witt_basis_for_flag(&space, &flag, WittOptions { mode: WittMode::Reduced, quadratic: false })?;
    let sp_dim = 2 * frame.p;
    let o_dim = frame.dim() - sp_dim;
    let generators = FlowGenerator::all(frame.r, frame.p);
    Ok(CyclotomicPopulation {
        variety_dims: (isotropic_flag_dim(sp_dim, true), isotropic_flag_dim(o_dim, false)),
        space,
        seed_flag: flag,
        witt,
        sp_dim,
        o_dim,
        generators,
    })
}
