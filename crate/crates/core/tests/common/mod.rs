#![allow(dead_code)]

use cyclopop::cartan::{CartanData, DiagramAut, FoldedData, Weight};
use cyclopop::exactalg::q;
use cyclopop::frame::ProblemInstance;
use cyclopop::CycScalar;

pub const A2_SITES: [(i64, [i64; 2]); 2] = [(1, [1, 0]), (2, [0, 1])];
pub const A3_SITES: [(i64, [i64; 3]); 2] = [(1, [1, 0, 0]), (3, [0, 1, 0])];

/// A_2 with the flip, omega = -1, Lambda_0 = (1/2, 1/2) and the first `n` marked points.
pub fn a2(n: usize) -> (ProblemInstance, FoldedData) {
    let c = CartanData::type_a(2);
    let s = DiagramAut::type_a_flip(&c);
    let pts = A2_SITES[..n].iter().map(|&(z, _)| CycScalar::from_int(z)).collect();
    let ws = A2_SITES[..n].iter().map(|(_, w)| Weight::from_ints(w)).collect();
    let inst = ProblemInstance::new(c, s, 1, pts, ws, Weight::new(vec![q(1, 2), q(1, 2)])).unwrap();
    let fold = inst.fold().unwrap();
    (inst, fold)
}

/// A_3 with sigma = (1 3), Lambda_0 = (0, 1, 0) and the first `n` marked points.
pub fn a3(n: usize) -> (ProblemInstance, FoldedData) {
    let c = CartanData::type_a(3);
    let s = DiagramAut::parse(&c, "(1 3)").unwrap();
    let pts = A3_SITES[..n].iter().map(|&(z, _)| CycScalar::from_int(z)).collect();
    let ws = A3_SITES[..n].iter().map(|(_, w)| Weight::from_ints(w)).collect();
    let inst = ProblemInstance::new(c, s, 1, pts, ws, Weight::from_ints(&[0, 1, 0])).unwrap();
    let fold = inst.fold().unwrap();
    (inst, fold)
}

pub fn small_samples() -> Vec<CycScalar> {
    [(1, 1), (-1, 2), (2, 1), (1, 3)].iter().map(|&(n, d)| CycScalar::frac(n, d)).collect()
}
