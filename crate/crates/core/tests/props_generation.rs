mod common;

use common::{a2, a3, small_samples};
use cyclopop::cartan::{folded_reflect, is_sigma_invariant, shifted_reflect};
use cyclopop::exactalg::{gcd_squarefree, substitute_scale, BranchRule};
use cyclopop::frame::*;
use cyclopop::genengine::*;
use cyclopop::{CycScalar, QuasiPoly};
use num_rational::Rational64;
use num_traits::Zero;
use proptest::prelude::*;

fn instances() -> Vec<(ProblemInstance, cyclopop::cartan::FoldedData)> {
    vec![a2(0), a2(1), a2(2), a3(0), a3(1), a3(2)]
}

fn population(depth: usize) -> Vec<(ProblemInstance, PopulationGraph)> {
    instances()
        .into_iter()
        .map(|(inst, fold)| {
            let opts = ExploreOptions { depth, samples: small_samples(), retry_budget: 2 };
            let g = explore_population(&inst, &fold, &BetheTuple::trivial(inst.rank()), &opts).unwrap();
            (inst, g)
        })
        .collect()
}

#[test]
fn frame_polys_rotate_with_sigma() {
    for (inst, _) in instances() {
        let fp = frame_polys(&inst).unwrap();
        let total = total_site_weight(&inst);
        for j in 0..inst.rank() {
            let lhs = substitute_scale(&fp.t[inst.aut.apply(j)], &inst.omega, BranchRule::Principal).unwrap();
            let e = total.pairings[j].to_integer();
            let e = i64::try_from(e).unwrap();
            assert_eq!(lhs, fp.t[j].scale(&inst.omega.pow(e)), "node {j}");
        }
    }
}

#[test]
fn population_nodes_are_verified_and_invariant() {
    for (inst, g) in population(2) {
        let fold = inst.fold().unwrap();
        assert!(g.nodes.len() > 1);
        for node in &g.nodes {
            assert!(node.flags.generic && node.flags.cyclotomic && node.flags.critical);
            assert!(is_critical_exact(&inst, &node.tuple, CriticalMode::Extended).unwrap().critical);
            assert_eq!(
                is_critical_exact(&inst, &node.tuple, CriticalMode::Extended).unwrap().critical,
                is_critical_exact(&inst, &node.tuple, CriticalMode::Cyclotomic).unwrap().critical
            );
            assert!(is_sigma_invariant(&inst.aut, &node.lambda_inf));
            assert_eq!(node.lambda_inf, weight_at_infinity(&inst, &node.tuple).unwrap());
            if let (Some(p), Some(step)) = (node.parent, &node.step) {
                let parent = &g.nodes[p];
                let reflected = folded_reflect(&inst.cartan, &fold, &inst.aut, step.direction, &parent.lambda_inf);
                let grew = node.tuple.polys[step.direction].deg() > parent.tuple.polys[step.direction].deg();
                // degree grows exactly when the weight is reflected
                if grew {
                    assert_eq!(node.lambda_inf, reflected);
                } else {
                    assert_eq!(node.lambda_inf, parent.lambda_inf);
                }
            }
            let ev = eigenvalues(&inst, &node.tuple).unwrap();
            assert!(ev.matches, "eigenvalue mismatch at {}", node.tuple);
            assert!(ev.origin_zero, "origin eigenvalue at {}", node.tuple);
        }
    }
}

#[test]
fn intermediate_solves_shifted_equations() {
    let mut checked = 0;
    for n in 0..=2 {
        let (inst, fold) = a2(n);
        let opts = ExploreOptions { depth: 1, samples: small_samples(), retry_budget: 2 };
        let g = explore_population(&inst, &fold, &BetheTuple::trivial(2), &opts).unwrap();
        for node in &g.nodes {
            for c in small_samples() {
                for (i, ib) in [(0, 1), (1, 0)] {
                    let Ok(inter) = l2_sequence(&inst, &node.tuple, i, ib, &c) else { continue };
                    let shifted = inst.with_lambda0(shifted_reflect(&inst.cartan, i, &inst.lambda0));
                    let y = node.tuple.replace(i, inter.y_i.clone()).unwrap();
                    if is_generic(&shifted, &y).unwrap().is_some() {
                        continue;
                    }
                    assert!(is_critical_exact(&shifted, &y, CriticalMode::Extended).unwrap().critical, "{y} on shifted weight");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 20, "only {checked} intermediates checked");
}

fn flip(p: &QuasiPoly) -> QuasiPoly {
    substitute_scale(p, &CycScalar::from_int(-1), BranchRule::Principal).unwrap()
}

#[test]
fn mirrored_order_flips_sign_of_parameter() {
    for n in 0..=2 {
        let (inst, _) = a2(n);
        let seeds = [BetheTuple::trivial(2), {
            let (fwd, _) = cyclotomic_generate(&inst, &inst.fold().unwrap(), &BetheTuple::trivial(2), 0, &CycScalar::one()).unwrap();
            fwd
        }];
        for y in &seeds {
            for c in small_samples() {
                let fwd = l2_sequence(&inst, y, 0, 1, &(-&c)).unwrap();
                let mir = l2_sequence(&inst, y, 1, 0, &c).unwrap();
                // mirrored step lands on node 1 last and on node 0 in the middle
                assert!(flip(&mir.y_i_final).proportional(&fwd.y_i_final));
                assert!(flip(&mir.y_ibar).proportional(&fwd.y_ibar));
            }
        }
    }
}

#[test]
fn partner_component_coprime_with_its_reflection() {
    let mut checked = 0;
    for n in 0..=2 {
        let (inst, _) = a2(n);
        for c in small_samples() {
            let Ok(inter) = l2_sequence(&inst, &BetheTuple::trivial(2), 0, 1, &c) else { continue };
            let g = gcd_squarefree(&inter.y_ibar, &flip(&inter.y_ibar));
            assert_eq!(g.deg(), Rational64::zero(), "c = {c}");
            checked += 1;
        }
    }
    assert!(checked >= 10);
}

#[test]
fn common_roots_have_multiplicity_two() {
    for n in 0..=2 {
        let (inst, _) = a2(n);
        for c in small_samples() {
            let Ok(inter) = l2_sequence(&inst, &BetheTuple::trivial(2), 0, 1, &c) else { continue };
            let g = gcd_squarefree(&inter.y_ibar, &inter.y_i);
            if g.deg() > Rational64::zero() {
                assert!(inter.y_i.exact_div(&(&g * &g)).map(|q| q.is_polynomial()).unwrap_or(false));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn disconnected_orbit_nodes_commute(a in -5i64..6, b in 1i64..5, n in 0usize..3) {
        let (inst, _) = a3(n);
        let (c0, c2) = (CycScalar::frac(a, b), CycScalar::frac(b, 3));
        let seed = BetheTuple::trivial(3);
        let one = elementary_generate_l1(&inst, &seed, 0, &c0).and_then(|t| elementary_generate_l1(&inst, &t, 2, &c2));
        let two = elementary_generate_l1(&inst, &seed, 2, &c2).and_then(|t| elementary_generate_l1(&inst, &t, 0, &c0));
        prop_assert_eq!(one.ok(), two.ok());
    }

    #[test]
    fn generated_a2_tuples_match_closed_form(num in -6i64..7, den in 1i64..5) {
        prop_assume!(num != 0);
        let (inst, fold) = a2(0);
        let c = CycScalar::frac(num, den);
        let (t, step) = cyclotomic_generate(&inst, &fold, &BetheTuple::trivial(2), 0, &c).unwrap();
        prop_assert_eq!(step.kind, StepKind::L2);
        let three_c = &CycScalar::from_int(3) * &c;
        let lo = QuasiPoly::from_coeffs(vec![-&three_c, CycScalar::zero(), CycScalar::zero(), CycScalar::one()]);
        let hi = QuasiPoly::from_coeffs(vec![three_c, CycScalar::zero(), CycScalar::zero(), CycScalar::one()]);
        prop_assert_eq!(t.polys, vec![lo, hi]);
    }
}

#[test]
fn a3_depth_two_with_default_samples() {
    let (inst, fold) = a3(0);
    let opts = ExploreOptions { depth: 2, ..ExploreOptions::default() };
    let g = explore_population(&inst, &fold, &BetheTuple::trivial(3), &opts).unwrap();
    assert_eq!(g.nodes.len(), 334);
    for node in &g.nodes {
        assert!(is_critical_exact(&inst, &node.tuple, CriticalMode::Extended).unwrap().critical);
        assert!(is_cyclotomic_tuple(&inst, &node.tuple).unwrap());
    }
}
