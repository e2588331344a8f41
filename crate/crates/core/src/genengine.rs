//! Elementary and cyclotomic generation of critical points and bounded population exploration.

use std::collections::{HashMap, VecDeque};

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cartan::{folded_reflect, FoldedData, Weight};
use crate::exactalg::{substitute_scale, wronskian, wronskian_ode_solve, AlgError, BranchRule, CycScalar, Normalization, QuasiPoly};
use crate::frame::{
    frame_polys, is_critical_exact, is_cyclotomic_tuple, is_generic, weight_at_infinity, BetheTuple, CriticalMode, FrameError,
    GenericFailure, ProblemInstance,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("internal: Wronskian equation unsolvable ({0})")]
    Internal(AlgError),
    #[error("exceptional parameter c = {0}: {1:?}")]
    ExceptionalParameter(CycScalar, GenericFailure),
    #[error("direction {} is not an orbit representative with the required linking number", .0 + 1)]
    BadDirection(usize),
    #[error("generated tuple failed verification: {0}")]
    Verification(String),
    #[error("seed invalid: {0}")]
    SeedInvalid(String),
}

impl From<AlgError> for GenError {
    fn from(e: AlgError) -> Self {
        GenError::Internal(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    L1,
    L2,
}

/// Intermediates of the three-step construction for a linked pair (i, i-bar).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2Intermediates {
    /// New i-th component after the first step (monic).
    pub y_i: QuasiPoly,
    /// New i-bar component after the second step, with the parameter.
    pub y_ibar: QuasiPoly,
    /// New i-th component after the third step.
    pub y_i_final: QuasiPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationStep {
    pub direction: usize,
    pub c: CycScalar,
    pub kind: StepKind,
    pub intermediates: Option<L2Intermediates>,
}

/// Right-hand side x^gamma_i T_i prod_{j != i} y_j^{-a_ij} of the generation equation.
pub fn generation_rhs(inst: &ProblemInstance, y: &BetheTuple, i: usize) -> Result<QuasiPoly, GenError> {
    let fp = frame_polys(inst)?;
    let mut w = fp.t_tilde[i].clone();
    for (j, yj) in y.polys.iter().enumerate() {
        let e = inst.cartan.a[i][j];
        if j != i && e != 0 {
            w = &w * &yj.pow((-e) as u32);
        }
    }
    Ok(w)
}

/// Particular solution y_i^{(i)}(x; 0) with vanishing coefficient at x^{deg y_i}.
pub fn elementary_particular(inst: &ProblemInstance, y: &BetheTuple, i: usize) -> Result<QuasiPoly, GenError> {
    let w = generation_rhs(inst, y, i)?;
    let yi = &y.polys[i];
    Ok(wronskian_ode_solve(yi, &w, &Normalization::CoeffZero(yi.deg()))?.particular)
}

/// Replace y_i by y_i^{(i)}(x; 0) + c y_i (single node, no symmetry).
pub fn elementary_generate_l1(inst: &ProblemInstance, y: &BetheTuple, i: usize, c: &CycScalar) -> Result<BetheTuple, GenError> {
    let p = elementary_particular(inst, y, i)?;
    let yi = &p + &y.polys[i].scale(c);
    Ok(y.replace(i, yi)?)
}

fn check_generic(inst: &ProblemInstance, t: &BetheTuple, c: &CycScalar) -> Result<(), GenError> {
    if t.polys.iter().any(|p| p.is_zero()) {
        return Err(GenError::ExceptionalParameter(c.clone(), GenericFailure::RootAtZero(0)));
    }
    match is_generic(inst, t)? {
        Some(f) => Err(GenError::ExceptionalParameter(c.clone(), f)),
        None => Ok(()),
    }
}

fn omega_inv_pow(inst: &ProblemInstance, k: i64) -> CycScalar {
    inst.omega.pow(-k)
}

/// Cyclotomic generation along an orbit with linking number 1.
pub fn cyclotomic_generate_l1(
    inst: &ProblemInstance,
    fold: &FoldedData,
    y: &BetheTuple,
    i: usize,
    c: &CycScalar,
) -> Result<(BetheTuple, GenerationStep), GenError> {
    if fold.rep_of[i] != i || fold.linking[i] != 1 {
        return Err(GenError::BadDirection(i));
    }
    let p = elementary_particular(inst, y, i)?;
    let yi_c = &p + &y.polys[i].scale(c);
    if yi_c.is_zero() {
        return Err(GenError::ExceptionalParameter(c.clone(), GenericFailure::RootAtZero(i)));
    }
    let mut polys = y.polys.clone();
    for k in 0..fold.orbit_len[i] as i64 {
        let node = inst.aut.pow_apply(i, k);
        // y_{sigma^k i}(x) is proportional to y_i^{(i)}(omega^{-k} x; c)
        polys[node] = substitute_scale(&yi_c, &omega_inv_pow(inst, k), BranchRule::Principal)?;
    }
    let out = BetheTuple::new(polys)?;
    if fold.orbit_len[i] > 1 {
        cross_check_transport(inst, y, &out, inst.aut.apply(i))?;
    }
    check_generic(inst, &out, c)?;
    if !is_cyclotomic_tuple(inst, &out)? {
        return Err(GenError::Verification("L1 result is not cyclotomic".into()));
    }
    Ok((out, GenerationStep { direction: i, c: c.clone(), kind: StepKind::L1, intermediates: None }))
}

/// The transported component at `node` must lie in particular + span(y_node) of an independent solve,
/// up to an overall scale.
fn cross_check_transport(inst: &ProblemInstance, y: &BetheTuple, out: &BetheTuple, node: usize) -> Result<(), GenError> {
    let f = &y.polys[node];
    let w = generation_rhs(inst, y, node)?;
    let indep = wronskian_ode_solve(f, &w, &Normalization::CoeffZero(f.deg()))?.particular;
    let t = &out.polys[node];
    let wt = wronskian(&[f.clone(), t.clone()]);
    let lambda = w.ratio_to(&wt).ok_or_else(|| GenError::Verification("transported component fails the Wronskian equation".into()))?;
    let rest = t - &indep.scale(&lambda);
    if !rest.is_zero() && !rest.proportional(f) {
        return Err(GenError::Verification("transported component differs from an independent solve".into()));
    }
    Ok(())
}

/// Three-step generation for a linked pair, in the order (i, ibar, i).
pub fn l2_sequence(inst: &ProblemInstance, y: &BetheTuple, i: usize, ibar: usize, c: &CycScalar) -> Result<L2Intermediates, GenError> {
    let fp = frame_polys(inst)?;
    let gamma = inst.gamma_exp(i);
    let shift = gamma + Rational64::one();
    let a = &inst.cartan.a;

    // step 1: Wr(y_i, x^{gamma+1} Y) = x^gamma T_i prod_{j != i} y_j^{-a_ij}
    let w1 = generation_rhs(inst, y, i)?;
    let z1 = wronskian_ode_solve(&y.polys[i], &w1, &Normalization::HolomorphicAtZero { shift })?.particular;
    let y_i = z1.shift(-shift).monic();

    // step 2: Wr(y_ibar, Y) = x^{1 + 2 gamma} T_ibar y_i^{(i)} prod_{j != i, ibar} y_j^{-a_{ibar j}}
    let mut w2 = fp.t[ibar].shift(Rational64::one() + gamma * 2) * &y_i;
    for (j, yj) in y.polys.iter().enumerate() {
        if j != i && j != ibar && a[ibar][j] != 0 {
            w2 = &w2 * &yj.pow((-a[ibar][j]) as u32);
        }
    }
    let yb = &y.polys[ibar];
    let p2 = wronskian_ode_solve(yb, &w2, &Normalization::CoeffZero(yb.deg()))?.particular;
    let y_ibar = &p2 + &yb.scale(c);

    // step 3: Wr(x^{gamma+1} y_i^{(i)}, Z) = x^gamma T_i y_ibar(c) prod_{j != i, ibar} y_j^{-a_ij}, Z holomorphic at 0
    let mut w3 = fp.t_tilde[i].clone() * &y_ibar;
    for (j, yj) in y.polys.iter().enumerate() {
        if j != i && j != ibar && a[i][j] != 0 {
            w3 = &w3 * &yj.pow((-a[i][j]) as u32);
        }
    }
    let f3 = y_i.shift(shift);
    let y_i_final = wronskian_ode_solve(&f3, &w3, &Normalization::HolomorphicAtZero { shift: Rational64::zero() })?.particular;
    Ok(L2Intermediates { y_i, y_ibar, y_i_final })
}

/// Cyclotomic generation along an orbit with linking number 2.
pub fn cyclotomic_generate_l2(
    inst: &ProblemInstance,
    fold: &FoldedData,
    y: &BetheTuple,
    i: usize,
    c: &CycScalar,
) -> Result<(BetheTuple, GenerationStep), GenError> {
    if fold.rep_of[i] != i || fold.linking[i] != 2 {
        return Err(GenError::BadDirection(i));
    }
    let ibar = fold.partner(&inst.aut, i).unwrap();
    let inter = l2_sequence(inst, y, i, ibar, c)?;
    if inter.y_i_final.is_zero() || inter.y_ibar.is_zero() {
        return Err(GenError::ExceptionalParameter(c.clone(), GenericFailure::RootAtZero(i)));
    }
    let mut polys = y.polys.clone();
    for k in 0..fold.orbit_len[i] as i64 / 2 {
        let s = omega_inv_pow(inst, k);
        polys[inst.aut.pow_apply(i, k)] = substitute_scale(&inter.y_i_final, &s, BranchRule::Principal)?;
        polys[inst.aut.pow_apply(ibar, k)] = substitute_scale(&inter.y_ibar, &s, BranchRule::Principal)?;
    }
    let out = BetheTuple::new(polys)?;
    check_generic(inst, &out, c)?;
    if !is_cyclotomic_tuple(inst, &out)? {
        return Err(GenError::Verification("L2 result is not cyclotomic".into()));
    }
    Ok((out, GenerationStep { direction: i, c: c.clone(), kind: StepKind::L2, intermediates: Some(inter) }))
}

/// Dispatch on the linking number of the direction.
pub fn cyclotomic_generate(
    inst: &ProblemInstance,
    fold: &FoldedData,
    y: &BetheTuple,
    i: usize,
    c: &CycScalar,
) -> Result<(BetheTuple, GenerationStep), GenError> {
    match fold.linking.get(i) {
        Some(1) => cyclotomic_generate_l1(inst, fold, y, i, c),
        Some(2) => cyclotomic_generate_l2(inst, fold, y, i, c),
        _ => Err(GenError::BadDirection(i)),
    }
}

/// Small rationals in a fixed order.
pub fn default_samples() -> Vec<CycScalar> {
    [(0, 1), (1, 1), (-1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (-1, 2), (-2, 1), (2, 3)]
        .iter()
        .map(|&(n, d)| CycScalar::frac(n, d))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeFlags {
    pub generic: bool,
    pub cyclotomic: bool,
    pub critical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopulationNode {
    pub id: usize,
    pub tuple: BetheTuple,
    pub parent: Option<usize>,
    pub step: Option<GenerationStep>,
    pub lambda_inf: Weight,
    pub flags: NodeFlags,
    pub depth: usize,
}

/// A parameter value that was skipped, with the reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedSample {
    pub parent: usize,
    pub direction: usize,
    pub c: CycScalar,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PopulationGraph {
    pub nodes: Vec<PopulationNode>,
    pub skipped: Vec<SkippedSample>,
}

impl PopulationGraph {
    pub fn keys(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.tuple.key()).collect()
    }

    pub fn find(&self, t: &BetheTuple) -> Option<&PopulationNode> {
        let k = t.key();
        self.nodes.iter().find(|n| n.tuple.key() == k)
    }
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub depth: usize,
    pub samples: Vec<CycScalar>,
    /// Replacement values tried after an exceptional parameter.
    pub retry_budget: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { depth: 1, samples: default_samples(), retry_budget: 3 }
    }
}

fn verify_node(inst: &ProblemInstance, t: &BetheTuple) -> Result<NodeFlags, GenError> {
    let generic = is_generic(inst, t)?.is_none();
    let cyclotomic = is_cyclotomic_tuple(inst, t)?;
    let critical = generic && is_critical_exact(inst, t, CriticalMode::Extended)?.critical;
    Ok(NodeFlags { generic, cyclotomic, critical })
}

/// Bounded breadth-first exploration of the cyclotomic population of `seed`.
pub fn explore_population(
    inst: &ProblemInstance,
    fold: &FoldedData,
    seed: &BetheTuple,
    opts: &ExploreOptions,
) -> Result<PopulationGraph, GenError> {
    let flags = verify_node(inst, seed)?;
    if !(flags.generic && flags.cyclotomic && flags.critical) {
        return Err(GenError::SeedInvalid(format!("{flags:?}")));
    }
    let mut graph = PopulationGraph::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let lam = weight_at_infinity(inst, seed)?;
    graph.nodes.push(PopulationNode { id: 0, tuple: seed.clone(), parent: None, step: None, lambda_inf: lam, flags, depth: 0 });
    index.insert(seed.key(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let depth = graph.nodes[id].depth;
        if depth >= opts.depth {
            continue;
        }
        let parent = graph.nodes[id].tuple.clone();
        let parent_lam = graph.nodes[id].lambda_inf.clone();
        for &i in &fold.reps {
            for c0 in &opts.samples {
                let mut attempt = 0;
                let mut c = c0.clone();
                let result = loop {
                    match cyclotomic_generate(inst, fold, &parent, i, &c) {
                        Ok(r) => break Some(r),
                        Err(GenError::ExceptionalParameter(_, why)) => {
                            graph.skipped.push(SkippedSample { parent: id, direction: i, c: c.clone(), reason: format!("{why:?}") });
                            attempt += 1;
                            if attempt > opts.retry_budget {
                                break None;
                            }
                            c = c0 + &CycScalar::frac(attempt as i64, 97);
                        }
                        Err(e) => return Err(e),
                    }
                };
                let Some((t, step)) = result else { continue };
                let key = t.key();
                if index.contains_key(&key) {
                    continue;
                }
                let flags = verify_node(inst, &t)?;
                if !(flags.cyclotomic && flags.critical) {
                    return Err(GenError::Verification(format!("node {t} failed re-verification: {flags:?}")));
                }
                let lam = weight_at_infinity(inst, &t)?;
                let reflected = folded_reflect(&inst.cartan, fold, &inst.aut, i, &parent_lam);
                if lam != parent_lam && lam != reflected {
                    return Err(GenError::Verification(format!("weight at infinity {lam} leaves the folded orbit")));
                }
                let nid = graph.nodes.len();
                index.insert(key, nid);
                graph.nodes.push(PopulationNode {
                    id: nid,
                    tuple: t,
                    parent: Some(id),
                    step: Some(step),
                    lambda_inf: lam,
                    flags,
                    depth: depth + 1,
                });
                queue.push_back(nid);
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{CartanData, DiagramAut};
    use crate::exactalg::q;

    fn a3() -> (ProblemInstance, FoldedData) {
        let c = CartanData::type_a(3);
        let s = DiagramAut::type_a_flip(&c);
        let inst = ProblemInstance::new(c, s, 1, vec![], vec![], Weight::from_ints(&[0, 1, 0])).unwrap();
        let f = inst.fold().unwrap();
        (inst, f)
    }

    fn a2() -> (ProblemInstance, FoldedData) {
        let c = CartanData::type_a(2);
        let s = DiagramAut::type_a_flip(&c);
        let inst = ProblemInstance::new(c, s, 1, vec![], vec![], Weight::new(vec![q(1, 2), q(1, 2)])).unwrap();
        let f = inst.fold().unwrap();
        (inst, f)
    }

    fn p(v: &[i64]) -> QuasiPoly {
        QuasiPoly::from_ints(v)
    }

    #[test]
    fn a3_examples() {
        let (inst, fold) = a3();
        let seed = BetheTuple::trivial(3);
        let c = CycScalar::from_int(5);
        let e = elementary_generate_l1(&inst, &seed, 1, &c).unwrap();
        // Y' = x gives x^2/2 + c, monic x^2 + 2c
        assert_eq!(e.polys[1], p(&[10, 0, 1]));
        let (t, _) = cyclotomic_generate_l1(&inst, &fold, &seed, 0, &c).unwrap();
        assert_eq!(t.polys, vec![p(&[5, 1]), p(&[1]), p(&[-5, 1])]);
    }

    #[test]
    fn a2_l2_example() {
        let (inst, fold) = a2();
        let seed = BetheTuple::trivial(2);
        let c = CycScalar::frac(1, 3);
        let inter = l2_sequence(&inst, &seed, 0, 1, &c).unwrap();
        assert_eq!(inter.y_i, p(&[1]));
        assert!(inter.y_ibar.proportional(&p(&[1, 0, 0, 1])));
        assert!(inter.y_i_final.proportional(&p(&[-1, 0, 0, 1])));
        let (t, _) = cyclotomic_generate_l2(&inst, &fold, &seed, 0, &c).unwrap();
        assert_eq!(t.polys, vec![p(&[-1, 0, 0, 1]), p(&[1, 0, 0, 1])]);
        assert_eq!(weight_at_infinity(&inst, &t).unwrap(), Weight::new(vec![q(-5, 2), q(-5, 2)]));
    }

    #[test]
    fn a2_population_depth_one() {
        let (inst, fold) = a2();
        let opts = ExploreOptions { depth: 1, samples: vec![CycScalar::frac(1, 3), CycScalar::one()], retry_budget: 0 };
        let g = explore_population(&inst, &fold, &BetheTuple::trivial(2), &opts).unwrap();
        let got: Vec<String> = g.nodes.iter().map(|n| n.tuple.to_string()).collect();
        assert_eq!(got, vec!["(1, 1)", "(x^3 - 1, x^3 + 1)", "(x^3 - 3, x^3 + 3)"]);
    }
}
