//! Cartan data, the shifted Weyl action, diagram automorphisms and folding.
//!
//! Indices are 0-based internally; text formats are 1-based.
//! Convention: `a[i][j]` is the pairing of the simple root j with the coroot i,
//! so the simple root j as a weight is column j of `a`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{q, qi, CycScalar, Matrix, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("Cartan matrix is not symmetrizable")]
    NotSymmetrizable,
    #[error("invalid diagram automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("linking condition violated at node {} (L = {1})", .0 + 1)]
    LinkingViolation(usize, i64),
    #[error("Cartan matrix is singular")]
    SingularCartan,
    #[error("weight is not regular for the shifted action")]
    NonRegular,
    #[error("reduction to the dominant chamber did not terminate")]
    NonTerminating,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub labels: Vec<String>,
    pub a: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

impl CartanData {
    /// Validate `a` and compute coprime symmetrizers.
    pub fn from_matrix(a: Vec<Vec<i64>>) -> Result<Self, CartanError> {
        let n = a.len();
        if n == 0 {
            return Err(CartanError::InvalidCartan("empty".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(CartanError::InvalidCartan("not square".into()));
            }
            if row[i] != 2 {
                return Err(CartanError::InvalidCartan(format!("a[{0}][{0}] != 2", i + 1)));
            }
            for j in 0..n {
                if i != j && (row[j] > 0 || (row[j] == 0) != (a[j][i] == 0)) {
                    return Err(CartanError::InvalidCartan(format!("bad off-diagonal entry at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let d = symmetrizer(&a)?;
        Ok(CartanData { labels: (1..=n).map(|i| i.to_string()).collect(), a, d })
    }

    /// Finite type A_R.
    pub fn type_a(r: usize) -> Self {
        let a = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            2
                        } else if i.abs_diff(j) == 1 {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_matrix(a).expect("type A is valid")
    }

    /// Untwisted affine A_n^{(1)} on n+1 nodes arranged in a cycle.
    pub fn affine_a(n: usize) -> Self {
        assert!(n >= 1);
        let m = n + 1;
        let mut a = vec![vec![0i64; m]; m];
        for i in 0..m {
            a[i][i] = 2;
            if m == 2 {
                a[i][1 - i] = -2;
            } else {
                a[i][(i + 1) % m] = -1;
                a[i][(i + m - 1) % m] = -1;
            }
        }
        Self::from_matrix(a).expect("affine type A is valid")
    }

    /// "A3", "A3^(1)" (affine) or an explicit matrix "[[2,-1],[-1,2]]".
    pub fn parse(s: &str) -> Result<Self, CartanError> {
        let s = s.trim();
        if s.starts_with('[') {
            let a: Vec<Vec<i64>> = serde_json::from_str(s).map_err(|e| CartanError::Parse(e.to_string()))?;
            return Self::from_matrix(a);
        }
        let rest = s.strip_prefix('A').or_else(|| s.strip_prefix('a')).ok_or_else(|| CartanError::Parse(format!("unknown series {s}")))?;
        let (num, affine) = match rest.strip_suffix("^(1)") {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let r: usize = num.parse().map_err(|_| CartanError::Parse(format!("bad rank in {s}")))?;
        if r == 0 {
            return Err(CartanError::Parse("rank must be positive".into()));
        }
        Ok(if affine { Self::affine_a(r) } else { Self::type_a(r) })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_ints(&self.a)
    }

    pub fn is_invertible(&self) -> bool {
        !self.matrix().det().is_zero()
    }

    /// Inverse of `a` over Q.
    pub fn inverse(&self) -> Result<Vec<Vec<Q>>, CartanError> {
        let inv = self.matrix().inverse().ok_or(CartanError::SingularCartan)?;
        let n = self.rank();
        Ok((0..n).map(|i| (0..n).map(|j| inv[(i, j)].to_q().expect("rational inverse")).collect()).collect())
    }

    /// The simple root j as a weight (column j of `a`).
    pub fn root(&self, j: usize) -> Weight {
        Weight::new(self.a.iter().map(|row| qi(row[j])).collect())
    }

    /// Weyl vector: all pairings 1.
    pub fn rho(&self) -> Weight {
        Weight::new(vec![Q::one(); self.rank()])
    }

    /// sum_j n_j alpha_j.
    pub fn root_combination(&self, n: &[Q]) -> Weight {
        let mut w = Weight::zero(self.rank());
        for (j, c) in n.iter().enumerate() {
            if !c.is_zero() {
                w = &w + &self.root(j).scale(c);
            }
        }
        w
    }

    /// Coefficients of `w` in the simple roots (requires invertible `a`).
    pub fn root_coords(&self, w: &Weight) -> Result<Vec<Q>, CartanError> {
        let inv = self.inverse()?;
        Ok(inv.iter().map(|row| row.iter().zip(&w.pairings).map(|(a, b)| a * b).sum()).collect())
    }
}

fn symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>, CartanError> {
    let n = a.len();
    let mut d: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Q::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let di = d[i].clone().unwrap();
            for j in 0..n {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                // d_i a_ij = d_j a_ji
                let dj = &di * qi(a[i][j]) / qi(a[j][i]);
                match &d[j] {
                    None => {
                        d[j] = Some(dj);
                        stack.push(j);
                    }
                    Some(x) if *x != dj => return Err(CartanError::NotSymmetrizable),
                    _ => {}
                }
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(|x| x.unwrap()).collect();
    let mut l = num_bigint::BigInt::one();
    for x in &d {
        l = l.lcm(x.denom());
    }
    let ints: Vec<num_bigint::BigInt> = d.iter().map(|x| (x * Q::from(l.clone())).to_integer()).collect();
    let mut g = num_bigint::BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    Ok(ints.iter().map(|x| i64::try_from(x / &g).expect("symmetrizer fits in i64")).collect())
}

/// Weight stored by its coroot pairings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub pairings: Vec<Q>,
}

impl Weight {
    pub fn new(pairings: Vec<Q>) -> Self {
        Weight { pairings }
    }

    pub fn zero(n: usize) -> Self {
        Weight { pairings: vec![Q::zero(); n] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight { pairings: v.iter().map(|&x| qi(x)).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairings.is_empty()
    }

    pub fn get(&self, i: usize) -> &Q {
        &self.pairings[i]
    }

    pub fn scale(&self, c: &Q) -> Self {
        Weight { pairings: self.pairings.iter().map(|x| x * c).collect() }
    }

    pub fn is_dominant_integral(&self) -> bool {
        self.pairings.iter().all(|x| x.is_integer() && !x.is_negative())
    }

    /// Parse "1/2,1/2" or "[1/2, 1/2]".
    pub fn parse(s: &str) -> Result<Self, CartanError> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        if t.trim().is_empty() {
            return Ok(Weight { pairings: vec![] });
        }
        let pairings = t.split(',').map(|p| parse_q(p.trim().trim_matches('"'))).collect::<Result<Vec<_>, _>>()?;
        Ok(Weight { pairings })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.pairings.iter().map(|x| x.to_string()).collect()
    }
}

pub fn parse_q(s: &str) -> Result<Q, CartanError> {
    s.parse::<Q>().map_err(|_| CartanError::Parse(format!("bad rational {s:?}")))
}

impl std::ops::Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        assert_eq!(self.len(), o.len());
        Weight { pairings: self.pairings.iter().zip(&o.pairings).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        assert_eq!(self.len(), o.len());
        Weight { pairings: self.pairings.iter().zip(&o.pairings).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramAut {
    pub perm: Vec<usize>,
    pub order: u32,
}

impl DiagramAut {
    pub fn identity(n: usize) -> Self {
        DiagramAut { perm: (0..n).collect(), order: 1 }
    }

    /// Validate a 0-based permutation against the Cartan matrix.
    pub fn new(cartan: &CartanData, perm: Vec<usize>) -> Result<Self, CartanError> {
        let n = cartan.rank();
        if perm.len() != n {
            return Err(CartanError::InvalidAutomorphism("length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(CartanError::InvalidAutomorphism("not a permutation".into()));
            }
            seen[p] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if cartan.a[perm[i]][perm[j]] != cartan.a[i][j] {
                    return Err(CartanError::InvalidAutomorphism(format!("does not preserve a at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let mut order = 1u32;
        let mut cur = perm.clone();
        while cur.iter().enumerate().any(|(i, &p)| i != p) {
            cur = cur.iter().map(|&p| perm[p]).collect();
            order += 1;
        }
        Ok(DiagramAut { perm, order })
    }

    /// The involution i -> R+1-i of type A_R.
    pub fn type_a_flip(cartan: &CartanData) -> Self {
        let n = cartan.rank();
        Self::new(cartan, (0..n).rev().collect()).expect("flip is an automorphism of type A")
    }

    /// Cycle notation "(1 3)(2 4)", a 1-based image list "[3,2,1]", or "id".
    pub fn parse(cartan: &CartanData, s: &str) -> Result<Self, CartanError> {
        let n = cartan.rank();
        let s = s.trim();
        if s.is_empty() || s == "id" || s == "()" {
            return Ok(Self::identity(n));
        }
        let perm = if s.starts_with('[') {
            let v: Vec<usize> = serde_json::from_str(s).map_err(|e| CartanError::Parse(e.to_string()))?;
            if v.contains(&0) {
                return Err(CartanError::Parse("permutation is 1-based".into()));
            }
            v.into_iter().map(|x| x - 1).collect()
        } else {
            let mut perm: Vec<usize> = (0..n).collect();
            for cyc in s.split(')') {
                let cyc = cyc.trim().trim_start_matches('(');
                if cyc.trim().is_empty() {
                    continue;
                }
                let els: Vec<usize> = cyc
                    .split([' ', ','])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>().map_err(|_| CartanError::Parse(format!("bad cycle entry {t}"))))
                    .collect::<Result<_, _>>()?;
                for (k, &e) in els.iter().enumerate() {
                    if e == 0 || e > n {
                        return Err(CartanError::Parse(format!("node {e} out of range")));
                    }
                    perm[e - 1] = els[(k + 1) % els.len()] - 1;
                }
            }
            perm
        };
        Self::new(cartan, perm)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// sigma^k (i), k may be negative.
    pub fn pow_apply(&self, i: usize, k: i64) -> usize {
        let m = self.order as i64;
        let mut j = i;
        for _ in 0..k.rem_euclid(m) {
            j = self.perm[j];
        }
        j
    }

    pub fn inverse_apply(&self, i: usize) -> usize {
        self.pow_apply(i, -1)
    }

    /// Cycle notation, 1-based.
    pub fn to_cycles(&self) -> String {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for i in 0..n {
            if seen[i] || self.perm[i] == i {
                seen[i] = true;
                continue;
            }
            let mut cyc = vec![];
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                cyc.push((j + 1).to_string());
                j = self.perm[j];
            }
            out.push_str(&format!("({})", cyc.join(" ")));
        }
        if out.is_empty() {
            "id".into()
        } else {
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldedData {
    pub reps: Vec<usize>,
    /// M_i for every node.
    pub orbit_len: Vec<usize>,
    /// L_i for every node.
    pub linking: Vec<i64>,
    /// Representative of the orbit of every node.
    pub rep_of: Vec<usize>,
    pub a_fold: Vec<Vec<i64>>,
}

impl FoldedData {
    /// Position of a representative in `reps`.
    pub fn rep_index(&self, i: usize) -> Option<usize> {
        self.reps.iter().position(|&r| r == i)
    }

    pub fn orbit(&self, aut: &DiagramAut, i: usize) -> Vec<usize> {
        (0..self.orbit_len[i] as i64).map(|k| aut.pow_apply(i, k)).collect()
    }

    /// Partner i-bar = sigma^{M_i/2} i for an L_i = 2 node.
    pub fn partner(&self, aut: &DiagramAut, i: usize) -> Option<usize> {
        (self.linking[i] == 2).then(|| aut.pow_apply(i, self.orbit_len[i] as i64 / 2))
    }
}

pub fn orbit_data(cartan: &CartanData, aut: &DiagramAut) -> Result<FoldedData, CartanError> {
    let n = cartan.rank();
    let mut orbit_len = vec![0; n];
    let mut linking = vec![0; n];
    let mut rep_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        let mut m = 1;
        let mut j = aut.apply(i);
        let mut min = i;
        while j != i {
            min = min.min(j);
            j = aut.apply(j);
            m += 1;
        }
        orbit_len[i] = m;
        rep_of[i] = min;
        if min == i {
            reps.push(i);
        }
        let s: i64 = (1..m as i64).map(|k| cartan.a[aut.pow_apply(i, k)][i]).sum();
        linking[i] = 1 - s;
    }
    for i in 0..n {
        if linking[i] > 2 {
            return Err(CartanError::LinkingViolation(i, linking[i]));
        }
    }
    let a_fold = reps
        .iter()
        .map(|&i| {
            reps.iter().map(|&j| linking[i] * (0..orbit_len[i] as i64).map(|k| cartan.a[aut.pow_apply(i, k)][j]).sum::<i64>()).collect()
        })
        .collect();
    Ok(FoldedData { reps, orbit_len, linking, rep_of, a_fold })
}

/// (sigma lambda)_i = lambda_{sigma^{-1} i}.
pub fn sigma_on_weight(aut: &DiagramAut, lambda: &Weight) -> Weight {
    assert_eq!(aut.perm.len(), lambda.len());
    Weight::new((0..lambda.len()).map(|i| lambda.pairings[aut.inverse_apply(i)].clone()).collect())
}

/// sigma^k applied to a weight.
pub fn sigma_pow_on_weight(aut: &DiagramAut, lambda: &Weight, k: i64) -> Weight {
    Weight::new((0..lambda.len()).map(|i| lambda.pairings[aut.pow_apply(i, -k)].clone()).collect())
}

pub fn is_sigma_invariant(aut: &DiagramAut, lambda: &Weight) -> bool {
    sigma_on_weight(aut, lambda) == *lambda
}

/// Shifted action s_i . lambda = s_i(lambda + rho) - rho.
pub fn shifted_reflect(cartan: &CartanData, i: usize, lambda: &Weight) -> Weight {
    let c = &lambda.pairings[i] + Q::one();
    Weight::new(lambda.pairings.iter().enumerate().map(|(j, l)| l - qi(cartan.a[j][i]) * &c).collect())
}

/// Apply a word right to left: word [i1, i2, i3] gives s_i1 s_i2 s_i3 . lambda.
pub fn shifted_word(cartan: &CartanData, word: &[usize], lambda: &Weight) -> Weight {
    word.iter().rev().fold(lambda.clone(), |acc, &i| shifted_reflect(cartan, i, &acc))
}

/// The reduced word in the full Weyl group realizing the folded reflection at rep i.
pub fn folded_word(fold: &FoldedData, aut: &DiagramAut, i: usize) -> Vec<usize> {
    let m = fold.orbit_len[i] as i64;
    if fold.linking[i] == 1 {
        (0..m).map(|k| aut.pow_apply(i, k)).collect()
    } else {
        let h = m / 2;
        let first: Vec<usize> = (0..h).map(|k| aut.pow_apply(i, k)).collect();
        let second: Vec<usize> = (0..h).map(|k| aut.pow_apply(i, k + h)).collect();
        [first.clone(), second, first].concat()
    }
}

pub fn folded_reflect(cartan: &CartanData, fold: &FoldedData, aut: &DiagramAut, i: usize, lambda: &Weight) -> Weight {
    shifted_word(cartan, &folded_word(fold, aut, i), lambda)
}

/// Reduce lambda to the dominant shifted representative; returns it with the word applied
/// (first reflection first).
pub fn dominant_shifted_rep(cartan: &CartanData, lambda: &Weight) -> Result<(Weight, Vec<usize>), CartanError> {
    if !cartan.is_invertible() {
        return Err(CartanError::SingularCartan);
    }
    let mut cur = lambda.clone();
    let mut word = Vec::new();
    let guard = 100_000;
    loop {
        let shifted: Vec<Q> = cur.pairings.iter().map(|x| x + Q::one()).collect();
        match shifted.iter().position(|x| x.is_negative()) {
            Some(i) => {
                cur = shifted_reflect(cartan, i, &cur);
                word.push(i);
                if word.len() > guard {
                    return Err(CartanError::NonTerminating);
                }
            }
            None => {
                if shifted.iter().any(|x| x.is_zero()) {
                    return Err(CartanError::NonRegular);
                }
                return Ok((cur, word));
            }
        }
    }
}

/// Gram matrix of fundamental weights, G_ij = (a^{-1})_ij d_i.
pub fn gram_fundamental(cartan: &CartanData) -> Result<Vec<Vec<Q>>, CartanError> {
    let inv = cartan.inverse()?;
    Ok(inv.iter().enumerate().map(|(i, row)| row.iter().map(|x| x * qi(cartan.d[i])).collect()).collect())
}

pub fn inner_product(cartan: &CartanData, lambda: &Weight, mu: &Weight) -> Result<Q, CartanError> {
    let g = gram_fundamental(cartan)?;
    Ok(inner_with_gram(&g, lambda, mu))
}

pub fn inner_with_gram(g: &[Vec<Q>], lambda: &Weight, mu: &Weight) -> Q {
    let mut acc = Q::zero();
    for (i, li) in lambda.pairings.iter().enumerate() {
        if li.is_zero() {
            continue;
        }
        for (j, mj) in mu.pairings.iter().enumerate() {
            acc += li * mj * &g[i][j];
        }
    }
    acc
}

/// Weight as a cyclotomic vector, for callers mixing with omega.
pub fn weight_scalars(w: &Weight) -> Vec<CycScalar> {
    w.pairings.iter().map(|x| CycScalar::from_q(x.clone())).collect()
}

/// Half of an integer as a rational.
pub fn half(n: i64) -> Q {
    q(n, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_examples() {
        let a4 = CartanData::type_a(4);
        let f = orbit_data(&a4, &DiagramAut::type_a_flip(&a4)).unwrap();
        assert_eq!(f.linking, vec![1, 2, 2, 1]);
        let a3 = CartanData::type_a(3);
        let s = DiagramAut::parse(&a3, "(1 3)").unwrap();
        let f = orbit_data(&a3, &s).unwrap();
        assert_eq!(f.reps, vec![0, 1]);
        assert_eq!(f.a_fold, vec![vec![2, -2], vec![-1, 2]]);
        let id = orbit_data(&a3, &DiagramAut::identity(3)).unwrap();
        assert_eq!(id.a_fold, a3.a);
        let aff = CartanData::affine_a(2);
        let rot = DiagramAut::parse(&aff, "(1 2 3)").unwrap();
        assert_eq!(orbit_data(&aff, &rot), Err(CartanError::LinkingViolation(0, 3)));
    }

    #[test]
    fn weyl_examples() {
        let a2 = CartanData::type_a(2);
        assert_eq!(shifted_reflect(&a2, 0, &Weight::from_ints(&[0, 0])), Weight::from_ints(&[-2, 1]));
        let l = Weight::new(vec![q(-5, 2), q(-5, 2)]);
        let (dom, _) = dominant_shifted_rep(&a2, &l).unwrap();
        assert_eq!(dom, Weight::new(vec![q(1, 2), q(1, 2)]));
        let a1 = CartanData::type_a(1);
        assert_eq!(dominant_shifted_rep(&a1, &Weight::from_ints(&[-4])).unwrap().0, Weight::from_ints(&[2]));
        let w = Weight::from_ints(&[1, 2, 3]);
        let s = DiagramAut::parse(&CartanData::type_a(3), "(1 3)").unwrap();
        assert_eq!(sigma_on_weight(&s, &w), Weight::from_ints(&[3, 2, 1]));
    }

    #[test]
    fn inner_products() {
        let a1 = CartanData::type_a(1);
        assert_eq!(inner_product(&a1, &Weight::from_ints(&[1]), &Weight::from_ints(&[1])).unwrap(), q(1, 2));
        let b2 = CartanData::from_matrix(vec![vec![2, -2], vec![-1, 2]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let v = inner_product(&b2, &b2.root(i), &b2.root(j)).unwrap();
                assert_eq!(v, qi(b2.d[i] * b2.a[i][j]));
            }
        }
    }
}
