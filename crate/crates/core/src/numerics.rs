//! Floating-point cross-checks: Bethe roots by simultaneous iteration, residuals of the
//! extended Bethe equations, damped Newton refinement and finite-difference gradients
//! of the master functions.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::cartan::{inner_product, sigma_pow_on_weight, Weight};
use crate::exactalg::QuasiPoly;
use crate::frame::{eigenvalues, BetheTuple, FrameError, ProblemInstance};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum NumericError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("component {0} is not a polynomial")]
    NotPolynomial(usize),
    #[error("root extraction of component {component} is ill-conditioned (residual {residual:e})")]
    IllConditioned { component: usize, residual: f64 },
    #[error("two interacting points are closer than {0:e}")]
    DivisionNearZero(f64),
    #[error("Jacobian is singular")]
    SingularJacobian,
    #[error("Newton iteration did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("logarithm argument too close to zero")]
    BranchCollision,
}

type Res<T> = Result<T, NumericError>;

/// All numeric tolerances in one place.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative residual |y(root)| / scale accepted after root extraction.
    pub root_residual: f64,
    /// Minimal distance between interacting points.
    pub min_separation: f64,
    /// Residual below which a point counts as critical.
    pub critical: f64,
    /// Target residual of Newton refinement.
    pub newton: f64,
    pub newton_iters: usize,
    /// Finite-difference step.
    pub fd_step: f64,
    /// Accepted analytic vs finite-difference mismatch.
    pub gradient: f64,
    /// Minimal modulus of a logarithm argument.
    pub branch: f64,
    /// Accepted mismatch of numeric and exact eigenvalues.
    pub eigenvalue: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_residual: 1e-8,
            min_separation: 1e-12,
            critical: 1e-8,
            newton: 1e-10,
            newton_iters: 100,
            fd_step: 1e-5,
            gradient: 1e-6,
            branch: 1e-10,
            eigenvalue: 1e-8,
        }
    }
}

// ---------- polynomial roots ----------

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of sum c_k z^k (c_n != 0), Aberth iteration from a scaled circle, then one Newton pass.
pub fn aberth_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|a| a / lead).collect();
    // Fujiwara-type bound
    let radius = (0..n).map(|k| c[k].norm().powf(1.0 / (n - k) as f64)).fold(0.0f64, f64::max).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..1000 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if worst < 1e-16 {
            break;
        }
    }
    for zk in z.iter_mut() {
        let (p, dp) = horner(&c, *zk);
        let step = p / dp;
        if step.is_finite() {
            *zk -= step;
        }
    }
    z
}

fn complex_coeffs(p: &QuasiPoly, i: usize) -> Res<Vec<Complex64>> {
    if !p.is_polynomial() {
        return Err(NumericError::NotPolynomial(i));
    }
    let d = p.deg().to_integer();
    Ok((0..=d).map(|k| p.coeff(Rational64::from_integer(k)).to_complex()).collect())
}

// ---------- the extended system ----------

/// Float data of an instance in the extended picture: sites z~ with weights, the origin,
/// and the symmetric form on simple roots.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatInstance {
    pub rank: usize,
    pub order: usize,
    pub omega: Complex64,
    /// (alpha_i, alpha_j).
    pub roots_form: Vec<Vec<f64>>,
    /// (alpha_c, Lambda_0).
    pub origin: Vec<f64>,
    /// Extended sites omega^k z_s with (alpha_c, sigma^k Lambda_s).
    pub sites: Vec<(Complex64, Vec<f64>)>,
    /// Rotation orbit of colours: colour c goes to sigma(c).
    pub sigma: Vec<usize>,
}

fn qf(x: &crate::exactalg::Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

impl FloatInstance {
    pub fn new(inst: &ProblemInstance) -> Res<Self> {
        let c = &inst.cartan;
        let r = c.rank();
        let roots: Vec<Weight> = (0..r).map(|j| c.root(j)).collect();
        let ip = |a: &Weight, b: &Weight| -> Res<f64> { Ok(qf(&inner_product(c, a, b).map_err(FrameError::from)?)) };
        let mut roots_form = vec![vec![0.0; r]; r];
        for i in 0..r {
            for j in 0..r {
                roots_form[i][j] = ip(&roots[i], &roots[j])?;
            }
        }
        let origin = roots.iter().map(|a| ip(a, &inst.lambda0)).collect::<Res<_>>()?;
        let m = inst.order() as i64;
        let omega = inst.omega.to_complex();
        let mut sites = Vec::new();
        for (z, lam) in inst.points.iter().zip(&inst.site_weights) {
            for k in 0..m {
                let sl = sigma_pow_on_weight(&inst.aut, lam, k);
                let w = roots.iter().map(|a| ip(a, &sl)).collect::<Res<_>>()?;
                sites.push((omega.powi(k as i32) * z.to_complex(), w));
            }
        }
        Ok(FloatInstance { rank: r, order: m as usize, omega, roots_form, origin, sites, sigma: inst.aut.perm.clone() })
    }
}

/// Bethe roots with colours, the float image of a tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoint {
    pub roots: Vec<Complex64>,
    pub colours: Vec<usize>,
    pub inst: FloatInstance,
}

/// Numerical roots of every component.
pub fn embed(inst: &ProblemInstance, y: &BetheTuple, tol: &Tolerances) -> Res<FloatPoint> {
    let fi = FloatInstance::new(inst)?;
    let mut roots = Vec::new();
    let mut colours = Vec::new();
    for (i, p) in y.polys.iter().enumerate() {
        let c = complex_coeffs(p, i)?;
        for z in aberth_roots(&c) {
            let scale: f64 = c.iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum();
            let res = horner(&c, z).0.norm() / scale.max(f64::MIN_POSITIVE);
            if !(res <= tol.root_residual) {
                return Err(NumericError::IllConditioned { component: i, residual: res });
            }
            roots.push(z);
            colours.push(i);
        }
    }
    Ok(FloatPoint { roots, colours, inst: fi })
}

impl FloatPoint {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    fn check_separation(&self, tol: &Tolerances) -> Res<()> {
        let f = &self.inst;
        for (j, &t) in self.roots.iter().enumerate() {
            let c = self.colours[j];
            let near = |d: Complex64| d.norm() < tol.min_separation;
            if (f.origin[c] != 0.0 && near(t)) || f.sites.iter().any(|(z, w)| w[c] != 0.0 && near(t - z)) {
                return Err(NumericError::DivisionNearZero(tol.min_separation));
            }
            for (i, &s) in self.roots.iter().enumerate() {
                if i != j && f.roots_form[c][self.colours[i]] != 0.0 && near(t - s) {
                    return Err(NumericError::DivisionNearZero(tol.min_separation));
                }
            }
        }
        Ok(())
    }

    /// Left-hand sides of the extended Bethe equations, one per root.
    pub fn residuals(&self, tol: &Tolerances) -> Res<Vec<Complex64>> {
        self.check_separation(tol)?;
        let f = &self.inst;
        Ok(self
            .roots
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let c = self.colours[j];
                let mut acc = Complex64::new(f.origin[c], 0.0) / t;
                for (z, w) in &f.sites {
                    acc += w[c] / (t - z);
                }
                for (i, &s) in self.roots.iter().enumerate() {
                    if i != j {
                        acc -= f.roots_form[c][self.colours[i]] / (t - s);
                    }
                }
                acc
            })
            .collect())
    }

    fn jacobian(&self) -> Vec<Vec<Complex64>> {
        let f = &self.inst;
        let n = self.roots.len();
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for j in 0..n {
            let (t, c) = (self.roots[j], self.colours[j]);
            let mut d = -f.origin[c] / (t * t);
            for (z, w) in &f.sites {
                d -= w[c] / ((t - z) * (t - z));
            }
            for i in 0..n {
                if i != j {
                    let b = f.roots_form[c][self.colours[i]];
                    let q = b / ((t - self.roots[i]) * (t - self.roots[i]));
                    d += q;
                    jac[j][i] = -q;
                }
            }
            jac[j][j] = d;
        }
        jac
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// max_j |LHS_j| of the extended Bethe equations; 0 for the empty point.
pub fn residual_norm(point: &FloatPoint, tol: &Tolerances) -> Res<f64> {
    Ok(max_norm(&point.residuals(tol)?))
}

/// Gaussian elimination with partial pivoting.
fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))?;
        if a[piv][col].norm() == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f.norm() != 0.0 {
                for k in col..n {
                    let v = a[col][k];
                    a[r][k] -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refined {
    pub point: FloatPoint,
    pub norm: f64,
    pub steps: usize,
}

/// Damped (Levenberg-Marquardt) Newton on the extended equations.
///
/// Damping keeps the step well defined along families of critical points, where the
/// Jacobian drops rank.
pub fn newton_refine(point: &FloatPoint, iters: usize, tol: &Tolerances) -> Res<Refined> {
    let mut cur = point.clone();
    let mut f = cur.residuals(tol)?;
    let mut norm = max_norm(&f);
    let n = cur.len();
    let mut mu = 1e-10;
    let mut steps = 0;
    // residuals decay like 1/t, so a root running off to infinity is not convergence
    let escape = 1e6 * cur.roots.iter().chain(cur.inst.sites.iter().map(|(z, _)| z)).map(|z| z.norm()).fold(1.0, f64::max);
    while norm >= tol.newton && steps < iters {
        steps += 1;
        let j = cur.jacobian();
        if j.iter().flatten().any(|x| !x.is_finite()) || j.iter().all(|row| row.iter().all(|x| x.norm() == 0.0)) {
            return Err(NumericError::SingularJacobian);
        }
        // normal equations J^H J d = -J^H f
        let mut jhj = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..n {
            for b in 0..n {
                jhj[a][b] = (0..n).map(|k| j[k][a].conj() * j[k][b]).sum();
            }
            g[a] = -(0..n).map(|k| j[k][a].conj() * f[k]).sum::<Complex64>();
        }
        let scale = (0..n).map(|a| jhj[a][a].norm()).fold(0.0, f64::max).max(1e-300);
        let mut accepted = false;
        while mu < 1e12 {
            let mut m = jhj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += mu * scale;
            }
            let Some(d) = solve_complex(m, g.clone()) else {
                mu *= 10.0;
                continue;
            };
            let mut trial = cur.clone();
            for (t, dt) in trial.roots.iter_mut().zip(&d) {
                *t += dt;
            }
            if let Ok(ft) = trial.residuals(tol) {
                let nt = max_norm(&ft);
                if nt.is_finite() && nt < norm {
                    cur = trial;
                    f = ft;
                    norm = nt;
                    mu = (mu / 10.0).max(1e-16);
                    accepted = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !accepted || cur.roots.iter().any(|t| t.norm() > escape) {
            return Err(NumericError::NoConvergence(norm));
        }
    }
    if norm >= tol.newton {
        return Err(NumericError::NoConvergence(norm));
    }
    Ok(Refined { point: cur, norm, steps })
}

// ---------- master functions ----------

/// coef * log(constant + sum a_i t_i).
#[derive(Clone, Debug, PartialEq)]
struct LogTerm {
    coef: f64,
    lin: Vec<(usize, Complex64)>,
    constant: Complex64,
}

impl LogTerm {
    fn arg(&self, t: &[Complex64]) -> Complex64 {
        self.lin.iter().fold(self.constant, |acc, (i, a)| acc + a * t[*i])
    }
}

/// t-dependent part of a master function as a list of logarithms.
#[derive(Clone, Debug, PartialEq)]
struct MasterFunction {
    vars: usize,
    terms: Vec<LogTerm>,
}

impl MasterFunction {
    /// Real part, with one fixed branch per factor.
    fn value(&self, t: &[Complex64], tol: &Tolerances) -> Res<f64> {
        let mut acc = 0.0;
        for term in &self.terms {
            let a = term.arg(t);
            if a.norm() < tol.branch {
                return Err(NumericError::BranchCollision);
            }
            acc += term.coef * a.norm().ln();
        }
        Ok(acc)
    }

    fn gradient(&self, t: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.vars];
        for term in &self.terms {
            let a = term.arg(t);
            for (i, c) in &term.lin {
                g[*i] += term.coef * c / a;
            }
        }
        g
    }

    /// d/dt from central differences of the real part: d Re/dx - i d Re/dy.
    fn fd_gradient(&self, t: &[Complex64], h: f64, tol: &Tolerances) -> Res<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.vars);
        let mut s = t.to_vec();
        for j in 0..self.vars {
            let mut part = [0.0; 2];
            for (slot, dir) in [Complex64::new(h, 0.0), Complex64::new(0.0, h)].into_iter().enumerate() {
                s[j] = t[j] + dir;
                let plus = self.value(&s, tol)?;
                s[j] = t[j] - dir;
                let minus = self.value(&s, tol)?;
                s[j] = t[j];
                part[slot] = (plus - minus) / (2.0 * h);
            }
            out.push(Complex64::new(part[0], -part[1]));
        }
        Ok(out)
    }
}

fn extended_master(point: &FloatPoint) -> MasterFunction {
    let f = &point.inst;
    let one = Complex64::new(1.0, 0.0);
    let mut terms = Vec::new();
    for (j, &c) in point.colours.iter().enumerate() {
        terms.push(LogTerm { coef: -f.origin[c], lin: vec![(j, one)], constant: Complex64::new(0.0, 0.0) });
        for (z, w) in &f.sites {
            terms.push(LogTerm { coef: -w[c], lin: vec![(j, one)], constant: -z });
        }
        for i in 0..j {
            terms.push(LogTerm {
                coef: f.roots_form[point.colours[i]][c],
                lin: vec![(i, one), (j, -one)],
                constant: Complex64::new(0.0, 0.0),
            });
        }
    }
    terms.retain(|t| t.coef != 0.0);
    MasterFunction { vars: point.len(), terms }
}

/// Orbit representatives t, omega t, ..., of colours c, sigma c, ... if the point is cyclotomic.
fn orbit_representatives(point: &FloatPoint, tol: f64) -> Option<Vec<usize>> {
    let f = &point.inst;
    let n = point.len();
    let mut used = vec![false; n];
    let mut reps = Vec::new();
    for j in 0..n {
        if used[j] {
            continue;
        }
        used[j] = true;
        reps.push(j);
        let (mut t, mut c) = (point.roots[j], point.colours[j]);
        for _ in 1..f.order {
            t *= f.omega;
            c = f.sigma[c];
            let best = (0..n)
                .filter(|&i| !used[i] && point.colours[i] == c)
                .min_by(|&a, &b| (point.roots[a] - t).norm().total_cmp(&(point.roots[b] - t).norm()))?;
            if (point.roots[best] - t).norm() > tol * t.norm().max(1.0) {
                return None;
            }
            used[best] = true;
        }
    }
    Some(reps)
}

/// The cyclotomic master function in the orbit representatives.
fn cyclotomic_master(point: &FloatPoint, reps: &[usize]) -> MasterFunction {
    let f = &point.inst;
    let m = f.order;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let sig = |c: usize, k: usize| (0..k).fold(c, |acc, _| f.sigma[acc]);
    let mut terms = Vec::new();
    for (a, &ja) in reps.iter().enumerate() {
        let c = point.colours[ja];
        let self_pair: f64 = (1..m).map(|k| f.roots_form[c][sig(c, k)]).sum();
        terms.push(LogTerm { coef: 0.5 * self_pair - f.origin[c], lin: vec![(a, one)], constant: zero });
        for (z, w) in &f.sites {
            terms.push(LogTerm { coef: -w[c], lin: vec![(a, one)], constant: -z });
        }
        for (b, &jb) in reps.iter().enumerate().take(a) {
            let cb = point.colours[jb];
            for k in 0..m {
                terms.push(LogTerm {
                    coef: f.roots_form[cb][sig(c, k)],
                    lin: vec![(b, one), (a, -f.omega.powi(k as i32))],
                    constant: zero,
                });
            }
        }
    }
    terms.retain(|t| t.coef != 0.0);
    MasterFunction { vars: reps.len(), terms }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradReport {
    /// max |analytic - finite difference| for the extended master function.
    pub extended_mismatch: f64,
    /// max |d Phi^/dt~_j|.
    pub extended_max_gradient: f64,
    /// Same for the cyclotomic master function, when the point is cyclotomic.
    pub cyclotomic_mismatch: Option<f64>,
    pub cyclotomic_max_gradient: Option<f64>,
    /// max |analytic gradient + residual|; the two formulas are independent.
    pub residual_consistency: f64,
}

pub fn grad_check(point: &FloatPoint, h: f64, tol: &Tolerances) -> Res<GradReport> {
    let t = &point.roots;
    let ext = extended_master(point);
    let g = ext.gradient(t);
    let fd = ext.fd_gradient(t, h, tol)?;
    let res = point.residuals(tol)?;
    let diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let neg_res: Vec<Complex64> = res.iter().map(|r| -r).collect();
    let (mut cm, mut cg) = (None, None);
    if let Some(reps) = orbit_representatives(point, 1e-6) {
        let cyc = cyclotomic_master(point, &reps);
        let tr: Vec<Complex64> = reps.iter().map(|&j| t[j]).collect();
        let g2 = cyc.gradient(&tr);
        cm = Some(diff(&g2, &cyc.fd_gradient(&tr, h, tol)?));
        cg = Some(max_norm(&g2));
    }
    Ok(GradReport {
        extended_mismatch: diff(&g, &fd),
        extended_max_gradient: max_norm(&g),
        cyclotomic_mismatch: cm,
        cyclotomic_max_gradient: cg,
        residual_consistency: diff(&g, &neg_res),
    })
}

// ---------- reports ----------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub roots: usize,
    pub max_residual: f64,
    pub per_root_residuals: Vec<f64>,
    pub gradient_mismatch: f64,
    pub gradient: GradReport,
    /// max |numeric - exact| over cyclotomic and extended eigenvalues.
    pub eigenvalue_mismatch: Option<f64>,
    pub tolerances: Tolerances,
    pub passed: bool,
}

/// Eigenvalues of both models from the float roots, in the layout of the exact ones.
pub fn numeric_eigenvalues(inst: &ProblemInstance, point: &FloatPoint) -> Res<(Vec<Complex64>, Vec<Complex64>)> {
    let c = &inst.cartan;
    let m = inst.order() as i64;
    let om = inst.omega.to_complex();
    let roots: Vec<Weight> = (0..c.rank()).map(|j| c.root(j)).collect();
    let ip = |a: &Weight, b: &Weight| -> Res<f64> { Ok(qf(&inner_product(c, a, b).map_err(FrameError::from)?)) };
    let root_part = |lam: &Weight, z: Complex64| -> Res<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &col) in point.roots.iter().zip(&point.colours) {
            acc += ip(lam, &roots[col])? / (z - t);
        }
        Ok(acc)
    };
    let mut cyc = Vec::new();
    for (s, (zs, ls)) in inst.points.iter().zip(&inst.site_weights).enumerate() {
        let zs = zs.to_complex();
        let mut e = Complex64::new(0.0, 0.0);
        for (j, (zj, lj)) in inst.points.iter().zip(&inst.site_weights).enumerate() {
            if j != s {
                for t in 0..m {
                    e += ip(ls, &sigma_pow_on_weight(&inst.aut, lj, t))? / (zs - om.powi(t as i32) * zj.to_complex());
                }
            }
        }
        e -= root_part(ls, zs)?;
        let mut local = Complex64::new(ip(ls, &inst.lambda0)?, 0.0);
        for t in 1..m {
            local += ip(ls, &sigma_pow_on_weight(&inst.aut, ls, t))? / (1.0 - om.powi(t as i32));
        }
        cyc.push(e + local / zs);
    }
    let mut pts = vec![(Complex64::new(0.0, 0.0), inst.lambda0.clone())];
    for (z, l) in inst.points.iter().zip(&inst.site_weights) {
        for k in 0..m {
            pts.push((om.powi(k as i32) * z.to_complex(), sigma_pow_on_weight(&inst.aut, l, k)));
        }
    }
    let mut ext = Vec::new();
    for (p, (zp, lp)) in pts.iter().enumerate() {
        let mut e = Complex64::new(0.0, 0.0);
        for (q, (zq, lq)) in pts.iter().enumerate() {
            if q != p {
                e += ip(lp, lq)? / (zp - zq);
            }
        }
        ext.push(e - root_part(lp, *zp)?);
    }
    Ok((cyc, ext))
}

/// Embed, residual, gradients and eigenvalues in one report.
pub fn check_numeric(inst: &ProblemInstance, y: &BetheTuple, tol: &Tolerances) -> Res<NumericReport> {
    let point = embed(inst, y, tol)?;
    let res = point.residuals(tol)?;
    let per: Vec<f64> = res.iter().map(|r| r.norm()).collect();
    let max_residual = per.iter().cloned().fold(0.0, f64::max);
    let gradient = grad_check(&point, tol.fd_step, tol)?;
    let eigenvalue_mismatch = match eigenvalues(inst, y) {
        Ok(ex) => {
            let (cyc, ext) = numeric_eigenvalues(inst, &point)?;
            let d = |a: &[crate::exactalg::CycScalar], b: &[Complex64]| {
                a.iter().zip(b).map(|(x, y)| (x.to_complex() - y).norm()).fold(0.0, f64::max)
            };
            Some(d(&ex.cyclotomic, &cyc).max(d(&ex.extended, &ext)))
        }
        Err(_) => None,
    };
    let passed =
        max_residual < tol.critical && gradient.extended_mismatch < tol.gradient && eigenvalue_mismatch.is_none_or(|e| e < tol.eigenvalue);
    Ok(NumericReport {
        roots: point.len(),
        max_residual,
        per_root_residuals: per,
        gradient_mismatch: gradient.extended_mismatch,
        gradient,
        eigenvalue_mismatch,
        tolerances: tol.clone(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{CartanData, DiagramAut};
    use crate::exactalg::q;

    fn a2() -> ProblemInstance {
        let c = CartanData::type_a(2);
        let s = DiagramAut::type_a_flip(&c);
        ProblemInstance::new(c, s, 1, vec![], vec![], Weight::new(vec![q(1, 2), q(1, 2)])).unwrap()
    }

    fn a2_tuple(c: i64) -> BetheTuple {
        BetheTuple::new(vec![QuasiPoly::from_ints(&[-3 * c, 0, 0, 1]), QuasiPoly::from_ints(&[3 * c, 0, 0, 1])]).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn cube_roots_of_unity() {
        let c: Vec<Complex64> = [-1.0, 0.0, 0.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut r = aberth_roots(&c);
        r.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        let expect = [
            Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0),
        ];
        for (a, b) in r.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-10);
        }
        let sq: Vec<Complex64> = [-1.0, 0.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut r = aberth_roots(&sq);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] + 1.0).norm() < 1e-12 && (r[1] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn empty_point() {
        let p = embed(&a2(), &BetheTuple::trivial(2), &tol()).unwrap();
        assert!(p.is_empty());
        assert_eq!(residual_norm(&p, &tol()).unwrap(), 0.0);
        let g = grad_check(&p, 1e-5, &tol()).unwrap();
        assert_eq!(g.extended_mismatch, 0.0);
    }

    #[test]
    fn critical_point_residual_and_gradient() {
        let inst = a2();
        let p = embed(&inst, &a2_tuple(1), &tol()).unwrap();
        assert_eq!(p.len(), 6);
        assert!(residual_norm(&p, &tol()).unwrap() < 1e-8);
        let g = grad_check(&p, 1e-5, &tol()).unwrap();
        assert!(g.extended_mismatch < 1e-7, "{g:?}");
        assert!(g.extended_max_gradient < 1e-8);
        assert!(g.cyclotomic_max_gradient.unwrap() < 1e-8, "{g:?}");
        assert!(g.cyclotomic_mismatch.unwrap() < 1e-7);
        assert!(g.residual_consistency < 1e-12);
    }

    #[test]
    fn perturbation_is_detected_and_repaired() {
        let inst = a2();
        let p = embed(&inst, &a2_tuple(1), &tol()).unwrap();
        let mut bad = p.clone();
        for (k, t) in bad.roots.iter_mut().enumerate() {
            *t += Complex64::from_polar(1e-2, k as f64);
        }
        assert!(residual_norm(&bad, &tol()).unwrap() > 1e-4);
        let g = grad_check(&bad, 1e-5, &tol()).unwrap();
        assert!(g.extended_mismatch < 1e-6);
        let mut near = p.clone();
        for (k, t) in near.roots.iter_mut().enumerate() {
            *t += Complex64::from_polar(1e-3, 0.7 * k as f64);
        }
        let fixed = newton_refine(&near, 100, &tol()).unwrap();
        assert!(fixed.norm < 1e-10);
        let same = newton_refine(&p, 100, &tol()).unwrap();
        assert!(same.steps <= 1);
        let drift = same.point.roots.iter().zip(&p.roots).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(drift < 1e-12);
    }

    #[test]
    fn no_critical_point_of_this_degree() {
        // a single root of colour 1 only feels the origin: no finite critical point
        let inst = a2();
        let y = BetheTuple::new(vec![QuasiPoly::from_ints(&[-5, 1]), QuasiPoly::one()]).unwrap();
        let p = embed(&inst, &y, &tol()).unwrap();
        assert!(matches!(newton_refine(&p, 50, &tol()), Err(NumericError::NoConvergence(_))));
    }

    #[test]
    fn eigenvalues_match_exact() {
        use crate::exactalg::CycScalar;
        let c = CartanData::type_a(2);
        let s = DiagramAut::type_a_flip(&c);
        let inst = ProblemInstance::new(
            c,
            s,
            1,
            vec![CycScalar::from_int(1)],
            vec![Weight::from_ints(&[1, 0])],
            Weight::new(vec![q(1, 2), q(1, 2)]),
        )
        .unwrap();
        let y = BetheTuple::trivial(2);
        let r = check_numeric(&inst, &y, &tol()).unwrap();
        assert!(r.eigenvalue_mismatch.unwrap() < 1e-8);
    }
}
