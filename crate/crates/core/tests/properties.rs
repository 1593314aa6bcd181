//! Property tests for the algebraic invariants that do not depend on any
//! particular fixture.

use proptest::prelude::*;
use qgl_core::algebra::{flip, kron, span_equals, BlockAlgebra, Element, SpanRelation};
use qgl_core::linalg::{cx, CMat};
use qgl_core::weights::Weight;
use qgl_core::wire;
use std::sync::Arc;

fn element_strategy(dims: Vec<usize>) -> impl Strategy<Value = Element> {
    let total: usize = dims.iter().map(|d| d * d).sum();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), total).prop_map(move |entries| {
        let alg = BlockAlgebra::new(&dims).unwrap();
        let mut blocks = Vec::new();
        let mut it = entries.into_iter();
        for &d in alg.block_dims() {
            let mut m = CMat::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    let (re, im) = it.next().unwrap();
                    m[(r, c)] = cx(re, im);
                }
            }
            blocks.push(m);
        }
        Element::new(alg, blocks).unwrap()
    })
}

fn small_algebra_dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cstar_norm_identity((dims, seed) in small_algebra_dims().prop_flat_map(|d| {
        (Just(d.clone()), element_strategy(d))
    })) {
        let x = seed;
        let _ = dims;
        let n = x.op_norm();
        let xx = x.adjoint().mul(&x);
        prop_assert!((xx.op_norm() - n * n).abs() <= 1e-12 * (1.0 + n * n));
    }

    #[test]
    fn norm_is_submultiplicative((x, y) in small_algebra_dims().prop_flat_map(|d| {
        (element_strategy(d.clone()), element_strategy(d))
    })) {
        prop_assert!(x.mul(&y).op_norm() <= x.op_norm() * y.op_norm() + 1e-10);
    }

    #[test]
    fn flip_of_kron_swaps((x, y) in (element_strategy(vec![2]), element_strategy(vec![1, 2]))) {
        let k = kron(&x, &y);
        let f = flip(&k).unwrap();
        prop_assert!(f.rel_distance(&kron(&y, &x)) <= 1e-13);
        let ff = flip(&f).unwrap();
        prop_assert!(ff.rel_distance(&k) <= 1e-13);
    }

    #[test]
    fn span_verdict_is_symmetric((a, b, c) in (
        element_strategy(vec![2]),
        element_strategy(vec![2]),
        element_strategy(vec![2]),
    )) {
        let s1 = vec![a.clone(), b.clone()];
        let s2 = vec![b, c, a];
        let fwd = span_equals(&s1, &s2, 1e-9).unwrap();
        let bwd = span_equals(&s2, &s1, 1e-9).unwrap();
        let flipped = match fwd.relation {
            SpanRelation::Equal => SpanRelation::Equal,
            SpanRelation::LeftInRight => SpanRelation::RightInLeft,
            SpanRelation::RightInLeft => SpanRelation::LeftInRight,
            SpanRelation::Incomparable => SpanRelation::Incomparable,
        };
        prop_assert_eq!(bwd.relation, flipped);
        prop_assert_eq!(fwd.dim_left, bwd.dim_right);
    }

    #[test]
    fn modular_group_law((x, t1, t2) in (
        element_strategy(vec![2, 1]),
        -1.0f64..1.0,
        -1.0f64..1.0,
    )) {
        let alg: Arc<BlockAlgebra> = x.algebra().clone();
        // a fixed non-tracial faithful weight
        let mut density = alg.unit();
        density.block_mut(0)[(0, 0)] = cx(2.0, 0.0);
        density.block_mut(0)[(0, 1)] = cx(0.3, 0.1);
        density.block_mut(0)[(1, 0)] = cx(0.3, -0.1);
        let w = Weight::new(alg, density).unwrap();
        let z1 = cx(t1, 0.5 * t2);
        let z2 = cx(t2, -0.25 * t1);
        let lhs = w.modular(z1, &w.modular(z2, &x));
        let rhs = w.modular(z1 + z2, &x);
        prop_assert!(lhs.rel_distance(&rhs) <= 1e-9);
        // invariance of the weight under the real flow
        let real = w.value(&w.modular(cx(t1, 0.0), &x));
        prop_assert!((real - w.value(&x)).norm() <= 1e-10 * (1.0 + w.value(&x).norm()));
    }

    #[test]
    fn element_serialization_round_trips(x in small_algebra_dims().prop_flat_map(element_strategy)) {
        let wire_form = wire::element_to_wire(&x);
        let back = wire::element_from_wire(x.algebra(), &wire_form).unwrap();
        prop_assert!(back.rel_distance(&x) <= 1e-15);
    }
}
