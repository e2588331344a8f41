mod common;

use common::{a2, a3, small_samples};
use cyclopop::cartan::Weight;
use cyclopop::frame::{is_cyclotomic_tuple, BetheTuple, ProblemInstance};
use cyclopop::genengine::{explore_population, ExploreOptions};
use cyclopop::typea::*;
use cyclopop::CycScalar;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spaces() -> Vec<(ProblemInstance, CyclotomicPopulation)> {
    let mut out = Vec::new();
    for (inst, fold) in [a2(0), a2(1), a2(2), a3(0), a3(1)] {
        let opts = ExploreOptions { depth: 1, samples: small_samples()[..2].to_vec(), retry_budget: 2 };
        let g = explore_population(&inst, &fold, &BetheTuple::trivial(inst.rank()), &opts).unwrap();
        for node in g.nodes.iter().take(3) {
            out.push((inst.clone(), cyclotomic_population(&inst, None, &node.tuple).unwrap()));
        }
    }
    out
}

fn pick(rng: &mut ChaCha8Rng, zero_weight: usize) -> CycScalar {
    let pool = sample_pool();
    let k = rng.gen_range(0..pool.len() + zero_weight);
    pool.get(k).cloned().unwrap_or_else(CycScalar::zero)
}

/// f_k = r_k + sum_{j > k} c_kj r_j: moves the Witt flag, usually off the isotropic locus.
fn opposite_flag(witt: &[cyclopop::QuasiPoly], rng: &mut ChaCha8Rng) -> Flag {
    let n = witt.len();
    let basis = (0..n)
        .map(|k| {
            let coeffs: Vec<CycScalar> = (0..n)
                .map(|j| {
                    if j == k {
                        CycScalar::one()
                    } else if j > k {
                        pick(rng, 3)
                    } else {
                        CycScalar::zero()
                    }
                })
                .collect();
            combine(&coeffs, witt)
        })
        .collect();
    Flag { basis }
}

fn same_flag(a: &Flag, b: &Flag) -> bool {
    (1..=a.basis.len()).all(|k| {
        let mut both = a.basis[..k].to_vec();
        both.extend_from_slice(&b.basis[..k]);
        rank_of(&both) == k
    })
}

#[test]
fn isotropy_matches_cyclotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (inst, pop) in spaces() {
        let (mut iso, mut non) = (0, 0);
        let group: Vec<Flag> = (0..20)
            .map(|_| {
                let params: Vec<CycScalar> = pop.generators.iter().map(|_| pick(&mut rng, 1)).collect();
                pop.member(&params).unwrap().flag
            })
            .collect();
        let random: Vec<Flag> = (0..20).map(|_| opposite_flag(&pop.witt.vectors, &mut rng)).collect();
        let mut seen: Vec<(Flag, BetheTuple)> = Vec::new();
        for flag in group.iter().chain(&random) {
            let y = beta(&pop.space.frame, flag).unwrap();
            let isotropic = isotropy_check(&pop.space, flag).unwrap();
            let cyc = is_cyclotomic_qp(&y).unwrap();
            assert_eq!(isotropic, cyc, "flag of {y}");
            assert_eq!(cyc, is_cyclotomic_tuple(&inst, &y).unwrap());
            if isotropic {
                iso += 1;
                assert!(flag_type(&pop.space, flag).is_ok(), "isotropic flag not decomposable");
                assert!(span_chain_holds(&pop.space, flag).unwrap());
            } else {
                non += 1;
            }
            for (f, t) in &seen {
                if t == &y {
                    assert!(same_flag(f, flag), "two flags give {y}");
                }
            }
            seen.push((flag.clone(), y));
        }
        assert!(iso >= 20 && non > 0, "iso {iso}, non {non}");
    }
}

#[test]
fn witt_bases_are_decomposable() {
    for (_, pop) in spaces() {
        for mode in [WittMode::AntiDiagonal, WittMode::Reduced] {
            let w = witt_basis(&pop.space, WittOptions { mode, quadratic: false }).unwrap();
            let flag = Flag { basis: w.vectors.clone() };
            assert!(isotropy_check(&pop.space, &flag).unwrap());
            assert_eq!(flag_type(&pop.space, &flag).unwrap(), pop.space.frame.type_s());
        }
    }
}

#[test]
fn exponent_pairs_sum_to_constant() {
    for (_, pop) in spaces() {
        let f = &pop.space.frame;
        let r = f.r;
        let total = f.lambda.pairings.iter().fold(Rational64::from_integer(r as i64), |acc, x| acc + cyclopop::frame::q_to_r64(x));
        for k in 0..=r {
            assert_eq!(f.d[k] + f.d[r - k], total, "pair {k}");
        }
    }
}

#[test]
fn divided_wronskian_is_constant_on_every_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (_, pop) in spaces() {
        let base = &pop.space.basis;
        let n = base.len();
        let mut tried = 0;
        while tried < 5 {
            let coeffs: Vec<Vec<CycScalar>> = (0..n).map(|_| (0..n).map(|_| pick(&mut rng, 2)).collect()).collect();
            let vs: Vec<_> = coeffs.iter().map(|c| combine(c, base)).collect();
            if rank_of(&vs) < n {
                continue;
            }
            tried += 1;
            let w = pop.space.frame.wr_dag(&vs).unwrap();
            assert_eq!(w.deg(), Rational64::from_integer(0), "{w}");
            assert!(!w.is_zero());
        }
    }
}

#[test]
fn frame_checks_pass_on_population_spaces() {
    for (_, pop) in spaces() {
        let rep = frame_conditions_check(&pop.space);
        assert!(rep.ok(), "{:?}", rep.notes);
        assert!(is_cyclotomically_self_dual(&pop.space).unwrap());
        let form = bilinear_form(&pop.space).unwrap();
        let (sp, o) = (pop.space.sp_basis(), pop.space.o_basis());
        for u in &sp {
            for v in &sp {
                assert_eq!(form.eval(u, v).unwrap(), -form.eval(v, u).unwrap());
            }
            for v in &o {
                assert!(form.eval(u, v).unwrap().is_zero());
            }
        }
        for u in &o {
            for v in &o {
                assert_eq!(form.eval(u, v).unwrap(), form.eval(v, u).unwrap());
            }
        }
    }
}

#[test]
fn frame_weight_includes_site_orbits() {
    let (inst, _) = a2(2);
    let f = TypeAFrame::for_tuple(&inst, None, &BetheTuple::trivial(2)).unwrap();
    let expect = &inst.lambda0 + &Weight::from_ints(&[1, 1]).scale(&cyclopop::exactalg::q(2, 1));
    assert_eq!(f.lambda, expect);
}
