//! Exact endpoint closure.
//!
//! After optimization the flow endpoint differs from the target by a group
//! residual. The residual is absorbed layer by layer: a straight horizontal
//! segment fixes the first-layer component (the first-layer part of a
//! product is additive), and for each higher layer, nested group-commutator
//! words of horizontal segments produce leading components exactly in that
//! layer while only spilling upward. The spill is controlled because a
//! commutator word of ℓ segments lands in the weight-ℓ part of the
//! filtration, and scaling its factors scales the leading component
//! multilinearly, so the coefficients can be solved for exactly.
//!
//! On structures whose bracket does not respect the upward filtration (a
//! non-stratified tangent side), the sweep is iterated until the residual
//! falls below a hard floor; the leftover is reported, never hidden.

use crate::structure::MetricStructure;
use crate::MetricError;
use lie_core::linalg::solve_any;
use lie_core::rat::{vis_zero, vneg, vzero, Rat};
use num_traits::{One, Zero};

#[derive(Debug, Clone)]
pub struct ClosureOutcome {
    /// Correction segments (unit durations, distribution coordinates).
    pub segments: Vec<(Rat, Vec<Rat>)>,
    /// True when the final residual is identically zero.
    pub exact: bool,
    /// Quasi-norm of the leftover residual (zero when exact).
    pub residual_gap: f64,
}

/// Segment lists realizing nested group commutators; values are
/// distribution coordinates, durations are all one (normalized later).
fn word_segments(factors: &[Vec<Rat>]) -> Vec<(Rat, Vec<Rat>)> {
    fn inverse(list: &[(Rat, Vec<Rat>)]) -> Vec<(Rat, Vec<Rat>)> {
        list.iter()
            .rev()
            .map(|(d, v)| (d.clone(), vneg(v)))
            .collect()
    }
    if factors.len() == 1 {
        return vec![(Rat::one(), factors[0].clone())];
    }
    let head = vec![(Rat::one(), factors[0].clone())];
    let tail = word_segments(&factors[1..]);
    let mut out = head.clone();
    out.extend(tail.clone());
    out.extend(inverse(&head));
    out.extend(inverse(&tail));
    out
}

/// Leading layer-ℓ vector of the iterated deformed bracket of distribution
/// directions `tuple`.
fn leading_vector(structure: &MetricStructure, tuple: &[usize]) -> Vec<Rat> {
    let vs: Vec<Vec<Rat>> = tuple
        .iter()
        .map(|&i| structure.dist_basis[i].clone())
        .collect();
    let w = structure.tensor.iterated_bracket(&vs).expect("dims agree");
    structure.grading.component(&w, tuple.len())
}

/// Dyadic approximation of `|t|^(1/l)`, clamped away from zero.
fn dyadic_root(t: &Rat, l: usize) -> Rat {
    let x = lie_core::rat::to_f64(t).abs();
    let r = x.powf(1.0 / l as f64).max(1e-12);
    Rat::from_float(r).unwrap_or_else(Rat::one)
}

/// One sweep over the layers; returns appended segments. The endpoint and
/// residual bookkeeping is the caller's.
fn sweep(
    structure: &MetricStructure,
    residual: &[Rat],
) -> Result<Vec<(Rat, Vec<Rat>)>, MetricError> {
    let grading = &structure.grading;
    let s = grading.step();
    let dim = structure.dim;
    let mut appended: Vec<(Rat, Vec<Rat>)> = Vec::new();
    let mut current = residual.to_vec();

    // Layer 1: straight segment with matching first-layer part. Minimal
    // Euclidean-coordinate solution of A u = (residual)_1.
    let comp1 = grading.component(&current, 1);
    if !vis_zero(&comp1) {
        let a: Vec<Vec<Rat>> = {
            // Rows: first-layer coordinates of each distribution direction,
            // read at the pivots of the layer-one basis.
            let v1 = grading.layer(1);
            let pivots = v1.pivots();
            let mut rows = vec![Vec::with_capacity(structure.dist_dim); pivots.len()];
            for b in &structure.dist_basis {
                let p1 = grading.component(b, 1);
                for (r, &piv) in pivots.iter().enumerate() {
                    rows[r].push(p1[piv].clone());
                }
            }
            rows
        };
        let v1 = grading.layer(1);
        let target: Vec<Rat> = v1.pivots().iter().map(|&p| comp1[p].clone()).collect();
        // u = A^T (A A^T)^{-1} target: the minimal-norm preimage.
        let rows = a.len();
        let mut aat = vec![vzero(rows); rows];
        for i in 0..rows {
            for j in 0..rows {
                let mut acc = Rat::zero();
                for k in 0..structure.dist_dim {
                    acc += &a[i][k] * &a[j][k];
                }
                aat[i][j] = acc;
            }
        }
        let lam = solve_any(&aat, &target).ok_or_else(|| {
            MetricError::NoConvergence("first-layer lift system is singular".into())
        })?;
        let mut u = vzero(structure.dist_dim);
        for (i, l) in lam.iter().enumerate() {
            lie_core::rat::vaxpy(&mut u, l, &a[i]);
        }
        appended.push((Rat::one(), u));
    }

    // Higher layers: commutator words.
    let mut end = segments_endpoint(structure, &appended);
    current = residual_after(structure, &end, residual);
    for l in 2..=s {
        let comp = grading.component(&current, l);
        if vis_zero(&comp) {
            continue;
        }
        // Collect tuples whose leading vectors span enough to hit comp.
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut leads: Vec<Vec<Rat>> = Vec::new();
        let mut span = lie_core::subspace::Subspace::zero(dim);
        let mut stack: Vec<Vec<usize>> = (0..structure.dist_dim).map(|i| vec![i]).collect();
        // Breadth-limited enumeration of index tuples of length l.
        let mut frontier = stack.clone();
        for _ in 1..l {
            let mut next = Vec::new();
            for t in &frontier {
                for i in 0..structure.dist_dim {
                    let mut nt = vec![i];
                    nt.extend(t.iter().copied());
                    next.push(nt);
                }
            }
            frontier = next;
        }
        stack = frontier;
        for tuple in stack {
            if span.contains_vec(&comp) {
                break;
            }
            let lead = leading_vector(structure, &tuple);
            if vis_zero(&lead) || span.contains_vec(&lead) {
                continue;
            }
            span = span
                .sum(&lie_core::subspace::Subspace::span(dim, &[lead.clone()]).unwrap())
                .unwrap();
            tuples.push(tuple);
            leads.push(lead);
        }
        if !span.contains_vec(&comp) {
            return Err(MetricError::NoConvergence(format!(
                "layer {l} residual not reachable by bracket words"
            )));
        }
        // Solve sum t_i lead_i = comp.
        let mut cols = vec![vzero(leads.len()); dim];
        for (j, lead) in leads.iter().enumerate() {
            for i in 0..dim {
                cols[i][j] = lead[i].clone();
            }
        }
        let ts = solve_any(&cols, &comp).ok_or_else(|| {
            MetricError::NoConvergence("leading-vector system inconsistent".into())
        })?;
        for (tuple, t) in tuples.iter().zip(&ts) {
            if t.is_zero() {
                continue;
            }
            // Balance the factor scales: l-1 factors at a dyadic root, one
            // carrying the exact remainder, so the product of scales is t.
            let lam = dyadic_root(t, l);
            let mut mu = t.clone();
            for _ in 0..(l - 1) {
                mu /= &lam;
            }
            let mut factors: Vec<Vec<Rat>> = Vec::with_capacity(l);
            for (pos, &idx) in tuple.iter().enumerate() {
                let scale = if pos == 0 { mu.clone() } else { lam.clone() };
                let mut v = vzero(structure.dist_dim);
                v[idx] = scale;
                factors.push(v);
            }
            appended.extend(word_segments(&factors));
        }
        end = segments_endpoint(structure, &appended);
        current = residual_after(structure, &end, residual);
        // The layers below must stay closed; if the bracket disturbs them
        // the caller falls back to iterated sweeps.
        for lower in 1..=l {
            if !vis_zero(&grading.component(&current, lower)) {
                return Ok(appended);
            }
        }
    }
    Ok(appended)
}

fn segments_endpoint(structure: &MetricStructure, segments: &[(Rat, Vec<Rat>)]) -> Vec<Rat> {
    structure.flow_exact(segments, &vzero(structure.dim))
}

/// `(-w) * r` where `w` is the endpoint of the appended segments: what is
/// left of the residual after flowing through them.
fn residual_after(structure: &MetricStructure, end: &[Rat], residual: &[Rat]) -> Vec<Rat> {
    structure.product_exact(&vneg(end), residual)
}

/// Close the group residual `r` exactly (or to the hard floor on structures
/// where the layer sweep cannot terminate).
pub fn close_residual(
    structure: &MetricStructure,
    residual: &[Rat],
) -> Result<ClosureOutcome, MetricError> {
    const FLOOR: f64 = 1e-12;
    const MAX_SWEEPS: usize = 30;
    let mut segments: Vec<(Rat, Vec<Rat>)> = Vec::new();
    let mut current = residual.to_vec();
    for _ in 0..MAX_SWEEPS {
        if vis_zero(&current) {
            return Ok(ClosureOutcome {
                segments,
                exact: true,
                residual_gap: 0.0,
            });
        }
        let appended = sweep(structure, &current)?;
        if appended.is_empty() {
            break;
        }
        let end = segments_endpoint(structure, &appended);
        current = residual_after(structure, &end, &current);
        segments.extend(appended);
        let gap = structure.quasi_norm(&lie_core::rat::vec_to_f64(&current));
        if gap < FLOOR {
            return Ok(ClosureOutcome {
                segments,
                exact: vis_zero(&current),
                residual_gap: gap,
            });
        }
    }
    let gap = structure.quasi_norm(&lie_core::rat::vec_to_f64(&current));
    Ok(ClosureOutcome {
        segments,
        exact: vis_zero(&current),
        residual_gap: gap,
    })
}

/// Length of correction segments under the structure norm.
pub fn segments_length(structure: &MetricStructure, segments: &[(Rat, Vec<Rat>)]) -> f64 {
    segments
        .iter()
        .map(|(d, v)| {
            lie_core::rat::to_f64(d) * structure.norm_coords(&lie_core::rat::vec_to_f64(v))
        })
        .sum()
}
