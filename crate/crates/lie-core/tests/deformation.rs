//! Deformation-family invariants: Jacobi at sampled ε, endpoint identities,
//! equality of the two product-difference routes on batches of random
//! rational pairs, ε-polynomiality of the tensor entries, and the lowest
//! ε-order bound from the alpha invariants.

mod common;

use common::*;
use lie_core::deform::DeformedFamily;
use lie_core::grading::Side;
use lie_core::invariants::{compute_alpha0, compute_alphas, AlphaValue};
use lie_core::rat::{rint, vis_zero, vsub, Rat};
use lie_core::subspace::Subspace;
use lie_core::tensor::heisenberg;
use num_traits::{One, Zero};

fn families() -> Vec<(String, DeformedFamily, Subspace)> {
    let mut out = Vec::new();
    for f in fixtures() {
        let g = deterministic_asymptotic(&f.tensor);
        out.push((
            format!("{}/asym", f.name),
            DeformedFamily::new(f.tensor.clone(), g, Side::Asymptotic).unwrap(),
            f.delta.clone(),
        ));
        let tg = deterministic_tangent(&f.tensor, &f.delta);
        out.push((
            format!("{}/tan", f.name),
            DeformedFamily::new(f.tensor.clone(), tg, Side::Tangent).unwrap(),
            f.delta.clone(),
        ));
    }
    out
}

#[test]
fn jacobi_and_endpoints() {
    for (name, family, _) in families() {
        for eps in eps_samples() {
            assert!(family.at(&eps).jacobi_ok(), "{name}: jacobi at {eps}");
        }
        assert_eq!(&family.at(&rint(1)), family.base(), "{name}: at(1)");
        assert_eq!(&family.at(&rint(0)), family.cone(), "{name}: at(0)");
    }
}

#[test]
fn difference_routes_agree_on_random_pairs() {
    let mut rng = rng(0xd1ff);
    for (name, family, _) in families() {
        let dim = family.base().dim();
        // 100 random rational pairs per family, exact equality.
        for trial in 0..100 {
            let x = random_vec(&mut rng, dim);
            let y = random_vec(&mut rng, dim);
            for eps in [rint(0), Rat::new(1.into(), 7.into()), Rat::new(1.into(), 2.into()), rint(1)]
            {
                let direct = vsub(
                    &family.product_at(&eps, &x, &y).unwrap(),
                    &family.product_at(&rint(0), &x, &y).unwrap(),
                );
                let layered = family.product_difference(&eps, &x, &y).unwrap();
                assert_eq!(direct, layered, "{name}: trial {trial}, eps = {eps}");
            }
        }
    }
}

#[test]
fn tensor_entries_are_polynomial_in_eps() {
    // Entries of at(ε), as functions of ε, interpolate exactly through s+1
    // sample points by a degree ≤ s polynomial; two extra fresh points must
    // agree with the interpolant.
    for (name, family, _) in families() {
        let s = family.grading().step();
        let dim = family.base().dim();
        let nodes: Vec<Rat> = (0..=s as i64)
            .map(|i| Rat::new(i.into(), (s as i64 + 1).into()))
            .collect();
        let samples: Vec<_> = nodes.iter().map(|e| family.at(e)).collect();
        let fresh: Vec<Rat> = vec![Rat::new(3.into(), 2.into()), Rat::new((-1).into(), 2.into())];
        for a in 0..dim {
            for b in (a + 1)..dim {
                for k in 0..dim {
                    let values: Vec<Rat> = samples
                        .iter()
                        .map(|t| t.bracket_basis(a, b)[k].clone())
                        .collect();
                    for x in &fresh {
                        let interp = lagrange_eval(&nodes, &values, x);
                        let actual = family.at(x).bracket_basis(a, b)[k].clone();
                        assert_eq!(interp, actual, "{name}: entry ({a},{b},{k}) at {x}");
                    }
                }
            }
        }
    }
}

fn lagrange_eval(nodes: &[Rat], values: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for (i, vi) in values.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        let mut term = vi.clone();
        for (j, nj) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            term *= (x - nj) / (&nodes[i] - nj);
        }
        acc += term;
    }
    acc
}

#[test]
fn difference_routes_agree_as_polynomials() {
    // The layered expansion and the direct subtraction agree not just at
    // sampled ε but coefficient by coefficient: interpolating the direct
    // route through more nodes than its degree pins the polynomial.
    let mut rng = rng(0x901f);
    for (name, family, _) in families() {
        let s = family.grading().step();
        let degree_bound = match family.side() {
            Side::Asymptotic => s.saturating_sub(2),
            Side::Tangent => s * family.step(),
        };
        let nodes: Vec<Rat> = (1..=degree_bound as i64 + 1)
            .map(|i| Rat::new(i.into(), (degree_bound as i64 + 2).into()))
            .collect();
        for _ in 0..3 {
            let x = random_vec(&mut rng, family.base().dim());
            let y = random_vec(&mut rng, family.base().dim());
            let layered = family.difference_polynomial(&x, &y).unwrap();
            let zero_prod = family.product_at(&rint(0), &x, &y).unwrap();
            let direct_at: Vec<Vec<Rat>> = nodes
                .iter()
                .map(|e| vsub(&family.product_at(e, &x, &y).unwrap(), &zero_prod))
                .collect();
            for coord in 0..family.base().dim() {
                for (m, coeff) in layered.iter().enumerate() {
                    // Coefficient of ε^m at this coordinate from exact
                    // Lagrange interpolation of the direct samples.
                    let mut interp = Rat::zero();
                    for (i, e_i) in nodes.iter().enumerate() {
                        // Lagrange basis polynomial coefficient extraction:
                        // evaluate the divided form by expanding on demand.
                        let mut basis_coeffs = vec![Rat::one()];
                        let mut denom = Rat::one();
                        for (j, e_j) in nodes.iter().enumerate() {
                            if i == j {
                                continue;
                            }
                            denom *= e_i - e_j;
                            // Multiply polynomial by (x - e_j).
                            let mut next = vec![Rat::zero(); basis_coeffs.len() + 1];
                            for (k, c) in basis_coeffs.iter().enumerate() {
                                next[k + 1] += c;
                                next[k] -= c * e_j;
                            }
                            basis_coeffs = next;
                        }
                        if m < basis_coeffs.len() {
                            interp += &direct_at[i][coord] * &basis_coeffs[m] / &denom;
                        }
                    }
                    assert_eq!(
                        interp, coeff[coord],
                        "{name}: coefficient of eps^{m} at coordinate {coord}"
                    );
                }
            }
        }
    }
}

#[test]
fn lowest_eps_order_respects_alpha() {
    let mut rng = rng(0xa1fa);
    for (name, family, delta) in families() {
        let bound = match family.side() {
            Side::Asymptotic => {
                compute_alphas(family.base(), family.grading(), &delta)
                    .unwrap()
                    .alpha1_inf
            }
            Side::Tangent => compute_alpha0(family.base(), family.grading()).unwrap(),
        };
        for _ in 0..20 {
            let x = random_vec(&mut rng, family.base().dim());
            let y = random_vec(&mut rng, family.base().dim());
            let poly = family.difference_polynomial(&x, &y).unwrap();
            let lowest = poly.iter().position(|c| !vis_zero(c));
            match (bound, lowest) {
                (AlphaValue::Infinity, Some(m)) => {
                    panic!("{name}: difference should vanish, has order {m}")
                }
                (AlphaValue::Finite(a), Some(m)) => {
                    assert!(m >= a, "{name}: order {m} below alpha = {a}")
                }
                (_, None) => {}
            }
        }
    }
}

#[test]
fn dilations_conjugate_the_product_for_positive_eps() {
    // For ε ≠ 0 the deformed product is the conjugate of the base product by
    // the dilation: x *_ε y = δ_ε(δ_ε^{-1} x * δ_ε^{-1} y) on the asymptotic
    // side.
    let mut rng = rng(0xd11a);
    for (name, family, _) in families() {
        if family.side() != Side::Asymptotic {
            continue;
        }
        let g = family.grading();
        for eps in [Rat::new(1.into(), 3.into()), Rat::new(2.into(), 5.into()), rint(1)] {
            let x = random_vec(&mut rng, family.base().dim());
            let y = random_vec(&mut rng, family.base().dim());
            let inv = Rat::one() / eps.clone();
            let inner = lie_core::bch::dynkin_product(
                family.base(),
                &g.dilate(&inv, &x),
                &g.dilate(&inv, &y),
            )
            .unwrap();
            let conjugated = g.dilate(&eps, &inner);
            let direct = family.product_at(&eps, &x, &y).unwrap();
            assert_eq!(conjugated, direct, "{name}: eps = {eps}");
        }
    }
}

#[test]
fn heisenberg_square_word_reaches_the_center() {
    // Four unit segments e1, e2, -e1, -e2 multiply to e3 exactly.
    let t = heisenberg();
    let e1 = lie_core::rat::basis_vec(3, 0);
    let e2 = lie_core::rat::basis_vec(3, 1);
    let table = lie_core::bch::bch_table(2).unwrap();
    let word = vec![
        e1.clone(),
        e2.clone(),
        lie_core::rat::vneg(&e1),
        lie_core::rat::vneg(&e2),
    ];
    let end = lie_core::bch::dynkin_product_seq(&t, 2, &table, &word).unwrap();
    assert_eq!(end, lie_core::rat::basis_vec(3, 2));
}
