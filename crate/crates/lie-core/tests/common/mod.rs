#![allow(dead_code)]

//! Shared fixtures: canned polarized algebras and randomized gradings with
//! rational complements.

use lie_core::grading::{
    build_asymptotic_grading, build_tangent_grading, classify_grading, Grading, GradingKind,
};
use lie_core::rat::{rint, Rat};
use lie_core::subspace::Subspace;
use lie_core::tensor::{heisenberg, n521, n522, StructureTensor};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub name: &'static str,
    pub tensor: StructureTensor,
    pub delta: Subspace,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[allow(dead_code)]
pub fn product_n522_n521() -> StructureTensor {
    n522().direct_sum(&n521())
}

#[allow(dead_code)]
pub fn product_grading_layers() -> Vec<Subspace> {
    vec![
        Subspace::coordinate(10, &[0, 1, 2, 5, 6]),
        Subspace::coordinate(10, &[3, 7]),
        Subspace::coordinate(10, &[4, 8]),
        Subspace::coordinate(10, &[9]),
    ]
}

/// The canned polarized algebras the properties are exercised on.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![
        Fixture {
            name: "abelian_r3",
            tensor: StructureTensor::new(3, None),
            delta: Subspace::full(3),
        },
        Fixture {
            name: "heis_carnot",
            tensor: heisenberg(),
            delta: Subspace::coordinate(3, &[0, 1]),
        },
        Fixture {
            name: "heis_riem",
            tensor: heisenberg(),
            delta: Subspace::full(3),
        },
        Fixture {
            name: "n522",
            tensor: n522(),
            delta: Subspace::coordinate(5, &[0, 1, 2]),
        },
        Fixture {
            name: "n521_carnot",
            tensor: n521(),
            delta: Subspace::coordinate(5, &[0, 1]),
        },
        Fixture {
            name: "n521_v1v3",
            tensor: n521(),
            delta: Subspace::coordinate(5, &[0, 1, 3]),
        },
    ];
    out.push(Fixture {
        name: "n522_x_n521",
        tensor: product_n522_n521(),
        delta: Subspace::coordinate(10, &[0, 1, 2, 3, 4, 5, 6]),
    });
    out
}

fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=4);
    Rat::new(num.into(), den.into())
}

/// Random complement of `inner` inside `within`: mix the deterministic
/// complement basis by a random invertible matrix and shear by random inner
/// components.
fn random_complement<R: Rng>(
    rng: &mut R,
    inner: &Subspace,
    within: &Subspace,
) -> Subspace {
    let base = inner.complement_within(within, None).unwrap();
    let d = base.dim();
    let ambient = base.ambient_dim();
    if d == 0 {
        return base;
    }
    loop {
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let mut v = lie_core::rat::vzero(ambient);
            for bv in base.basis() {
                lie_core::rat::vaxpy(&mut v, &small_rat(rng), bv);
            }
            for iv in inner.basis() {
                lie_core::rat::vaxpy(&mut v, &small_rat(rng), iv);
            }
            rows.push(v);
        }
        let cand = Subspace::span(ambient, &rows).unwrap();
        if cand.dim() == d && cand.intersection(inner).unwrap().is_zero() {
            let direct = cand.sum(inner).unwrap();
            if &direct == within {
                return cand;
            }
        }
    }
}

/// Asymptotic grading with random rational complements along the lower
/// central series.
pub fn random_asymptotic_grading<R: Rng>(rng: &mut R, tensor: &StructureTensor) -> Grading {
    let report = tensor.validate();
    let step = report.step().expect("nilpotent fixture");
    let dim = tensor.dim();
    let mut layers = Vec::with_capacity(step);
    for j in 1..=step {
        let gj = StructureTensor::lcs_term(&report.lcs, j, dim);
        let gj1 = StructureTensor::lcs_term(&report.lcs, j + 1, dim);
        layers.push(random_complement(rng, &gj1, &gj));
    }
    let g = Grading::new(layers, GradingKind::Unverified).unwrap();
    let report = classify_grading(tensor, &g, None).unwrap();
    assert!(report.asymptotic, "random complement grading must verify");
    g.with_kind(if report.stratification {
        GradingKind::Stratification
    } else {
        GradingKind::Asymptotic
    })
}

/// Tangent grading with random rational complements along the distribution
/// filtration.
pub fn random_tangent_grading<R: Rng>(
    rng: &mut R,
    tensor: &StructureTensor,
    delta: &Subspace,
) -> Grading {
    let filtration = tensor.delta_filtration(delta).unwrap();
    assert!(filtration.bracket_generating);
    let flag = filtration.flag();
    let step = filtration.step().unwrap();
    let mut layers = vec![delta.clone()];
    for j in 2..=step {
        layers.push(random_complement(rng, &flag[j - 2], &flag[j - 1]));
    }
    let g = Grading::new(layers, GradingKind::Unverified).unwrap();
    let report = classify_grading(tensor, &g, Some(delta)).unwrap();
    assert_eq!(report.tangent, Some(true));
    g.with_kind(if report.stratification {
        GradingKind::Stratification
    } else {
        GradingKind::Tangent
    })
}

#[allow(dead_code)]
pub fn deterministic_asymptotic(tensor: &StructureTensor) -> Grading {
    build_asymptotic_grading(tensor, None).unwrap()
}

#[allow(dead_code)]
pub fn deterministic_tangent(tensor: &StructureTensor, delta: &Subspace) -> Grading {
    build_tangent_grading(tensor, delta, None).unwrap()
}

#[allow(dead_code)]
pub fn random_vec<R: Rng>(rng: &mut R, dim: usize) -> Vec<Rat> {
    (0..dim).map(|_| small_rat(rng)).collect()
}

#[allow(dead_code)]
pub fn eps_samples() -> Vec<Rat> {
    vec![
        rint(0),
        Rat::new(1.into(), 7.into()),
        Rat::new(1.into(), 3.into()),
        Rat::new(1.into(), 2.into()),
        rint(1),
    ]
}
