//! Named example candidates used by the demos and the test suites.
//!
//! FX1: function algebra of a pair groupoid.
//! FX2: convolution algebra of a pair groupoid (a full matrix block).
//! FX3: function algebra of a cyclic group (the quantum group case).
//! FX4: the separability base (M_2, transpose, 2·Tr).
//! FX5: the obstruction base (ℂ², id, weights (1, 2)) with no idempotent.

use std::sync::Arc;

use crate::algebra::{BlockAlgebra, Element};
use crate::groupoid::{cyclic_group, pair_groupoid, FiniteGroupoid};
use crate::linalg::ONE;
use crate::linmap::{LinearMap, MapFlags};
use crate::models::{convolution_algebra_model, function_algebra_model, WeakHopfData};
use crate::qgroupoid::QuantumGroupoidData;
use crate::weights::{Functional, Weight};

/// FX1: commutative function-algebra model of the pair groupoid on n points.
pub fn fx1_pair_function(n: usize) -> QuantumGroupoidData {
    function_algebra_model(&pair_groupoid(n)).expect("pair groupoid model")
}

/// FX2: convolution model of the pair groupoid on n points: A = M_n with
/// grouplike Δ on matrix units, E = Σ e_ii⊗e_ii, φ = ψ = Tr.
pub fn fx2_matrix_convolution(n: usize) -> QuantumGroupoidData {
    convolution_algebra_model(&pair_groupoid(n)).expect("matrix model")
}

/// FX3: function algebra of ℤ_m; the quantum group case with B = ℂ and
/// E = 1⊗1.
pub fn fx3_cyclic_function(m: usize) -> QuantumGroupoidData {
    function_algebra_model(&cyclic_group(m)).expect("cyclic model")
}

/// Convolution form of ℤ_m (Fourier side).
pub fn fx3_cyclic_convolution(m: usize) -> QuantumGroupoidData {
    convolution_algebra_model(&cyclic_group(m)).expect("cyclic convolution model")
}

pub fn transpose_anti_iso(alg: &Arc<BlockAlgebra>) -> LinearMap {
    LinearMap::from_fn(alg.clone(), alg.clone(), |x| {
        Element::new(
            x.algebra().clone(),
            x.blocks().iter().map(|b| b.transpose()).collect(),
        )
        .unwrap()
    })
    .unwrap()
    .with_flags(MapFlags::star_anti_isomorphism())
    .expect("transpose flags")
}

/// FX4: the matrix separability base (B = C = M_2, R = transpose, ν = 2·Tr).
pub fn fx4_base() -> (Arc<BlockAlgebra>, Arc<BlockAlgebra>, LinearMap, Weight) {
    let m2 = BlockAlgebra::matrix(2);
    let r = transpose_anti_iso(&m2);
    let nu = Weight::scaled_trace(&m2, 2.0).expect("2Tr");
    (m2.clone(), m2, r, nu)
}

/// FX5: the commutative base with weights (1, 2); the solver must report
/// NoSolution with ‖E²−E‖ = 1/4 on the candidate.
pub fn fx5_base() -> (Arc<BlockAlgebra>, Arc<BlockAlgebra>, LinearMap, Weight) {
    let c2 = BlockAlgebra::abelian(2);
    let r = LinearMap::identity(&c2);
    let nu = Weight::diagonal(&c2, &[1.0, 2.0]).expect("diagonal weight");
    (c2.clone(), c2, r, nu)
}

/// The FX5-based assembly: the two-point pair groupoid candidate with the
/// base weight corrupted to (1, 2). Verification must fail at the
/// separability stage.
pub fn fx5_assembly() -> QuantumGroupoidData {
    let mut qg = fx1_pair_function(2);
    qg.nu = Weight::diagonal(&qg.base_b, &[1.0, 2.0]).expect("diagonal weight");
    qg
}

/// Disjoint union ℤ_2 ⊔ (pair groupoid on 2 points).
pub fn disjoint_union_groupoid() -> FiniteGroupoid {
    FiniteGroupoid::disjoint_union(&[&cyclic_group(2), &pair_groupoid(2)])
}

pub fn disjoint_union_function() -> QuantumGroupoidData {
    function_algebra_model(&disjoint_union_groupoid()).expect("union model")
}

pub fn disjoint_union_convolution() -> QuantumGroupoidData {
    convolution_algebra_model(&disjoint_union_groupoid()).expect("union model")
}

/// Weak Hopf data over M_n: grouplike Δ, ε(e_ij) = 1, S = transpose, and the
/// normalized Haar measure φ = Tr.
pub fn fx2_weak_hopf(n: usize) -> (WeakHopfData, Weight) {
    let qg = fx2_matrix_convolution(n);
    let mut all_ones = qg.a.zero();
    for r in 0..n {
        for c in 0..n {
            all_ones.block_mut(0)[(r, c)] = ONE;
        }
    }
    let epsilon = Functional::new(qg.a.clone(), all_ones).expect("counit");
    let antipode = transpose_anti_iso(&qg.a);
    let phi = qg.phi.clone();
    (
        WeakHopfData {
            a: qg.a,
            delta: qg.delta,
            epsilon,
            antipode,
        },
        phi,
    )
}

/// Weak Hopf data for the group algebra of ℤ_m in character coordinates:
/// ε = evaluation at the trivial character, S the block permutation χ ↦ χ̄
/// induced by the group inverse, φ = normalized Haar.
pub fn cyclic_weak_hopf(m: usize) -> (WeakHopfData, Weight) {
    let qg = fx3_cyclic_convolution(m);

    // ε(λ_g) = 1 for all g forces the representing element to be the
    // indicator of the trivial character block, which is the unique block
    // whose coordinate functional satisfies the counit law (ε⊗id)∘Δ = id.
    let trivial = (0..qg.a.num_blocks())
        .find(|&blk| {
            let eps = Functional::new(qg.a.clone(), qg.a.basis_unit(blk, 0, 0)).expect("counit");
            qg.a.basis().iter().all(|u| {
                eps.slice_left(&qg.delta.apply(u))
                    .expect("slice")
                    .rel_distance(u)
                    < 1e-9
            })
        })
        .expect("the trivial character block exists");
    let mut eps_rep = qg.a.zero();
    eps_rep.block_mut(trivial)[(0, 0)] = ONE;
    let epsilon = Functional::new(qg.a.clone(), eps_rep).expect("counit");

    // S(λ_g) = λ_{g⁻¹} acts on characters as χ ↦ χ̄. In the character basis
    // Δ(δ_χ) has support on {(χ', χ''): χ'χ'' = χ}, so the nonzero entries
    // of Δ(δ_trivial) read off the conjugation pairing of blocks.
    let d_triv = qg.delta.apply(&qg.a.basis_unit(trivial, 0, 0));
    let nb = qg.a.num_blocks();
    let mut pair = vec![usize::MAX; nb];
    for (b1, slot) in pair.iter_mut().enumerate() {
        for b2 in 0..nb {
            if d_triv.block(b1 * nb + b2)[(0, 0)].norm() > 1e-9 {
                *slot = b2;
            }
        }
    }
    let images: Vec<Element> = (0..nb).map(|b| qg.a.basis_unit(pair[b], 0, 0)).collect();
    let antipode = LinearMap::from_images(qg.a.clone(), qg.a.clone(), &images).expect("antipode");

    let phi = qg.phi.clone();
    (
        WeakHopfData {
            a: qg.a,
            delta: qg.delta,
            epsilon,
            antipode,
        },
        phi,
    )
}
