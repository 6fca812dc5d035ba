//! The seven structural properties of tangent and asymptotic gradings,
//! checked exactly on every canned polarized algebra and on gradings with
//! randomized rational complements.

mod common;

use common::*;
use lie_core::grading::{classify_grading, Grading};
use lie_core::subspace::Subspace;
use lie_core::tensor::StructureTensor;

/// Iterated powers `Δ^j` computed independently of `delta_filtration`.
fn delta_power(tensor: &StructureTensor, delta: &Subspace, j: usize) -> Subspace {
    let mut p = delta.clone();
    for _ in 1..j {
        p = tensor.subspace_bracket(delta, &p).unwrap();
    }
    p
}

fn delta_flag(tensor: &StructureTensor, delta: &Subspace, j: usize) -> Subspace {
    let mut acc = Subspace::zero(delta.ambient_dim());
    for i in 1..=j {
        acc = acc.sum(&delta_power(tensor, delta, i)).unwrap();
    }
    acc
}

fn check_all_seven(
    name: &str,
    tensor: &StructureTensor,
    delta: &Subspace,
    asym: &Grading,
    tan: &Grading,
) {
    let report = tensor.validate();
    let s = report.step().expect("nilpotent fixture");
    let dim = tensor.dim();
    let q = tan.step();

    // (1) [W_i, W_j] ⊆ W_{≤ i+j}
    for i in 1..=q {
        for j in 1..=q {
            let b = tensor.subspace_bracket(&tan.layer(i), &tan.layer(j)).unwrap();
            assert!(
                tan.weight_leq(i + j).contains(&b),
                "{name}: [W_{i}, W_{j}] escapes W_(<= {})",
                i + j
            );
        }
    }

    // (2) The bracket conditions on W_1 imply (and are implied by) being a
    // stratification.
    let hyp2 = (1..q).all(|j| {
        tan.layer(j + 1)
            .contains(&tensor.subspace_bracket(&tan.layer(1), &tan.layer(j)).unwrap())
    }) && tensor
        .subspace_bracket(&tan.layer(1), &tan.layer(q))
        .unwrap()
        .is_zero();
    let tan_class = classify_grading(tensor, tan, Some(delta)).unwrap();
    assert_eq!(hyp2, tan_class.stratification, "{name}: claim (2)");

    // (3) tangent step ≤ nilpotency step
    assert!(q <= s, "{name}: claim (3)");

    // (4) g^(j) = Δ^j + g^(j+1)
    for j in 1..=s {
        let gj = StructureTensor::lcs_term(&report.lcs, j, dim);
        let gj1 = StructureTensor::lcs_term(&report.lcs, j + 1, dim);
        let lhs = delta_power(tensor, delta, j).sum(&gj1).unwrap();
        assert_eq!(lhs, gj, "{name}: claim (4) at j = {j}");
    }

    // (5) g = Δ^[j] + g^(j+1)
    for j in 1..=s {
        let gj1 = StructureTensor::lcs_term(&report.lcs, j + 1, dim);
        let lhs = delta_flag(tensor, delta, j).sum(&gj1).unwrap();
        assert_eq!(lhs, Subspace::full(dim), "{name}: claim (5) at j = {j}");
    }

    // (6) [V_i, V_j] ⊆ V_{≥ i+j}
    let sv = asym.step();
    for i in 1..=sv {
        for j in 1..=sv {
            let b = tensor.subspace_bracket(&asym.layer(i), &asym.layer(j)).unwrap();
            assert!(
                asym.weight_geq(i + j).contains(&b),
                "{name}: [V_{i}, V_{j}] escapes V_(>= {})",
                i + j
            );
        }
    }

    // (7) [V_1, V_j] ⊆ V_{1+j} for all j implies (iff) stratification.
    let hyp7 = (1..sv).all(|j| {
        asym.layer(j + 1)
            .contains(&tensor.subspace_bracket(&asym.layer(1), &asym.layer(j)).unwrap())
    }) && tensor
        .subspace_bracket(&asym.layer(1), &asym.layer(sv))
        .unwrap()
        .is_zero();
    let asym_class = classify_grading(tensor, asym, None).unwrap();
    assert_eq!(hyp7, asym_class.stratification, "{name}: claim (7)");
}

#[test]
fn seven_claims_on_canned_gradings() {
    for f in fixtures() {
        let asym = deterministic_asymptotic(&f.tensor);
        let tan = deterministic_tangent(&f.tensor, &f.delta);
        check_all_seven(f.name, &f.tensor, &f.delta, &asym, &tan);
    }
}

#[test]
fn seven_claims_on_fifty_randomized_gradings() {
    let mut rng = rng(0x9a4d_11);
    let fixtures = fixtures();
    let mut done = 0;
    'outer: loop {
        for f in &fixtures {
            let asym = random_asymptotic_grading(&mut rng, &f.tensor);
            let tan = random_tangent_grading(&mut rng, &f.tensor, &f.delta);
            check_all_seven(f.name, &f.tensor, &f.delta, &asym, &tan);
            done += 1;
            if done >= 50 {
                break 'outer;
            }
        }
    }
}

#[test]
fn lcs_matches_brute_force_word_spans() {
    // g^(j) equals the span of all left-iterated basis brackets of length j,
    // an independent route to the same series.
    for f in fixtures() {
        let dim = f.tensor.dim();
        let report = f.tensor.validate();
        let full = Subspace::full(dim);
        let mut words: Vec<Vec<lie_core::rat::Rat>> =
            full.basis().iter().cloned().collect();
        for j in 2..=report.step().unwrap() + 1 {
            let mut next = Vec::new();
            for w in &words {
                for b in full.basis() {
                    next.push(f.tensor.bracket(b, w).unwrap());
                }
            }
            words = next;
            let span = Subspace::span(dim, &words).unwrap();
            assert_eq!(
                span,
                StructureTensor::lcs_term(&report.lcs, j, dim),
                "{}: lcs term {j}",
                f.name
            );
        }
    }
}
