//! Faithful positive functionals and their modular theory at finite
//! dimension: the modular automorphism group at complex parameters, KMS
//! residuals, GNS data, slice maps, tensor weights, and the absolute value
//! of a functional.
//!
//! A weight is stored as a positive invertible density element ρ per block,
//! with value rule ψ(x) = Σ_k tr(ρ_k x_k). Its modular group is realized by
//! spectral calculus, σ_z(x) = ρ^{iz} x ρ^{-iz}, and the defining relations
//! are verified rather than assumed.

use std::sync::Arc;

use crate::algebra::{kron, BlockAlgebra, Element};
use crate::error::Error;
use crate::linalg::{cx, hermitian_eigen, hermitian_map, min_eig_hermitian, rel, CMat, I};
use crate::report::Check;
use crate::Result;
use nalgebra::DVector;
use num_complex::Complex64;

/// A faithful positive functional given by a Hermitian positive definite
/// density element per block.
#[derive(Debug, Clone)]
pub struct Weight {
    algebra: Arc<BlockAlgebra>,
    density: Element,
    eig: Vec<(DVector<f64>, CMat)>,
}

impl Weight {
    pub fn new(algebra: Arc<BlockAlgebra>, density: Element) -> Result<Self> {
        if !density.algebra().structural_eq(&algebra) {
            return Err(Error::AlgebraMismatch {
                left: algebra.block_dims().to_vec(),
                right: density.algebra().block_dims().to_vec(),
            });
        }
        let herm_res = density.rel_distance(&density.adjoint());
        if herm_res > 1e-10 {
            return Err(Error::NonHermitianDensity(herm_res));
        }
        let mut eig = Vec::with_capacity(density.blocks().len());
        let scale = density.op_norm().max(1.0);
        for b in density.blocks() {
            let (vals, vecs) = hermitian_eigen(b);
            let min = vals.iter().fold(f64::INFINITY, |a, &l| a.min(l));
            if min <= 1e-12 * scale {
                return Err(Error::NonPositiveDensity(min));
            }
            eig.push((vals, vecs));
        }
        Ok(Weight {
            algebra,
            density,
            eig,
        })
    }

    /// The (non-normalized) trace: density = 1.
    pub fn tracial(algebra: &Arc<BlockAlgebra>) -> Self {
        Self::new(algebra.clone(), algebra.unit()).expect("unit density")
    }

    /// Scaled trace: density = c·1.
    pub fn scaled_trace(algebra: &Arc<BlockAlgebra>, c: f64) -> Result<Self> {
        Self::new(algebra.clone(), algebra.unit().scale(cx(c, 0.0)))
    }

    /// Weight on a commutative algebra ℂⁿ with the given positive weights.
    pub fn diagonal(algebra: &Arc<BlockAlgebra>, weights: &[f64]) -> Result<Self> {
        if weights.len() != algebra.num_blocks() || algebra.block_dims().iter().any(|&d| d != 1) {
            return Err(Error::Format(
                "diagonal weights require a commutative algebra with one weight per point".into(),
            ));
        }
        let mut d = algebra.zero();
        for (k, &w) in weights.iter().enumerate() {
            d.block_mut(k)[(0, 0)] = cx(w, 0.0);
        }
        Self::new(algebra.clone(), d)
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    pub fn density(&self) -> &Element {
        &self.density
    }

    /// ψ(x) = Σ_k tr(ρ_k x_k).
    pub fn value(&self, x: &Element) -> Complex64 {
        assert!(x.algebra().structural_eq(&self.algebra));
        self.density
            .blocks()
            .iter()
            .zip(x.blocks())
            .map(|(rho, xb)| (rho * xb).trace())
            .sum()
    }

    /// ρ^z by spectral calculus (ρ > 0, z complex).
    pub fn density_power(&self, z: Complex64) -> Element {
        let blocks = self
            .eig
            .iter()
            .map(|(vals, vecs)| hermitian_map(vals, vecs, |l| (z * l.ln()).exp()))
            .collect();
        Element::new(self.algebra.clone(), blocks).expect("power blocks")
    }

    /// log ρ by spectral calculus.
    pub fn density_log(&self) -> Element {
        let blocks = self
            .eig
            .iter()
            .map(|(vals, vecs)| hermitian_map(vals, vecs, |l| cx(l.ln(), 0.0)))
            .collect();
        Element::new(self.algebra.clone(), blocks).expect("log blocks")
    }

    /// The modular automorphism group at complex parameter z:
    /// σ_z(x) = ρ^{iz} x ρ^{-iz}.
    pub fn modular(&self, z: Complex64, x: &Element) -> Element {
        let left = self.density_power(I * z);
        let right = self.density_power(-(I * z));
        left.mul(x).mul(&right)
    }

    /// σ_z as a linear map on the algebra.
    pub fn modular_map(&self, z: Complex64) -> crate::linmap::LinearMap {
        crate::linmap::LinearMap::from_fn(self.algebra.clone(), self.algebra.clone(), |x| {
            self.modular(z, x)
        })
        .expect("modular map")
    }

    /// Dual norm of the weight seen as a functional: Σ_k tr ρ_k.
    pub fn norm(&self) -> f64 {
        self.density.trace().re
    }

    pub fn as_functional(&self) -> Functional {
        Functional::new(self.algebra.clone(), self.density.clone()).expect("weight as functional")
    }

    /// (ψ⊗id)(x) for x in `self.algebra ⊗ other`.
    pub fn slice_left(&self, x: &Element) -> Result<Element> {
        slice_with(SliceSide::Left, &self.density, x)
    }

    /// (id⊗ψ)(x).
    pub fn slice_right(&self, x: &Element) -> Result<Element> {
        slice_with(SliceSide::Right, &self.density, x)
    }
}

/// Largest KMS residuals of `value_weight` when tested against the modular
/// group of `modular_weight`; splitting the two inputs lets tests corrupt
/// the modular group independently.
///
/// Returns (identity, invariance, shift) residuals:
///   identity:    ψ(a*a) = ψ(σ_{i/2}(a) σ_{i/2}(a)*)
///   invariance:  ψ∘σ_t = ψ at the sampled real t
///   shift:       ψ(ax) = ψ(x σ_{-i}(a))
pub fn kms_residuals(
    value_weight: &Weight,
    modular_weight: &Weight,
    t_samples: &[f64],
    rng: &mut impl rand::Rng,
    samples: usize,
) -> (f64, f64, f64) {
    let alg = value_weight.algebra();
    let mut probes = alg.basis();
    for _ in 0..samples {
        probes.push(crate::algebra::random_element(alg, rng));
    }

    let mut identity = 0.0f64;
    for a in &probes {
        let lhs = value_weight.value(&a.adjoint().mul(a));
        let s = modular_weight.modular(cx(0.0, 0.5), a);
        let rhs = value_weight.value(&s.mul(&s.adjoint()));
        identity = identity.max(rel((lhs - rhs).norm(), lhs.norm()));
    }

    let mut invariance = 0.0f64;
    for &t in t_samples {
        let z = cx(t, 0.0);
        for a in alg.basis() {
            let lhs = value_weight.value(&modular_weight.modular(z, &a));
            let rhs = value_weight.value(&a);
            invariance = invariance.max(rel((lhs - rhs).norm(), rhs.norm()));
        }
    }

    let mut shift = 0.0f64;
    for _ in 0..samples.max(4) {
        let a = crate::algebra::random_element(alg, rng);
        let x = crate::algebra::random_element(alg, rng);
        let lhs = value_weight.value(&a.mul(&x));
        let rhs = value_weight.value(&x.mul(&modular_weight.modular(cx(0.0, -1.0), &a)));
        shift = shift.max(rel((lhs - rhs).norm(), lhs.norm()));
    }

    (identity, invariance, shift)
}

/// KMS report fragment for a named weight.
pub fn check_kms(name: &str, w: &Weight, settings: &crate::RunSettings) -> Vec<Check> {
    let mut rng = settings.rng();
    let ts = [1.0, -1.0, 0.3, -0.3];
    let (identity, invariance, shift) =
        kms_residuals(w, w, &ts, &mut rng, settings.samples.min(12));
    vec![
        Check::residual(
            &format!("kms.{name}.identity"),
            "KMSweight: ψ(a*a) = ψ(σ_{i/2}(a)σ_{i/2}(a)*)",
            identity,
            settings.tolerance,
        ),
        Check::residual(
            &format!("kms.{name}.invariance"),
            "KMSweight: ψ∘σ_t = ψ at sampled t",
            invariance,
            settings.tolerance,
        ),
        Check::residual(
            &format!("kms.{name}.shift"),
            "lemKMS(2): ψ(ax) = ψ(xσ_{-i}(a))",
            shift,
            settings.tolerance,
        ),
    ]
}

/// GNS data of a weight: the coordinate map Λ, the representation by left
/// multiplication, the modular conjugation J and the modular operator ∇,
/// realized on the algebra itself with inner product ⟨Λa, Λb⟩ = ψ(b*a).
#[derive(Debug, Clone)]
pub struct GnsData {
    weight: Weight,
    pub hilbert_dim: usize,
    sqrt: Element,
    sqrt_inv: Element,
    inv: Element,
}

impl GnsData {
    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// Λ: the identity on coordinates.
    pub fn lambda(&self, x: &Element) -> crate::linalg::CVec {
        x.to_coords()
    }

    /// GNS inner product ⟨Λ(a), Λ(b)⟩ = ψ(b*a).
    pub fn inner(&self, a: &Element, b: &Element) -> Complex64 {
        self.weight.value(&b.adjoint().mul(a))
    }

    /// π(a): left multiplication b ↦ ab.
    pub fn pi(&self, a: &Element, vector: &Element) -> Element {
        a.mul(vector)
    }

    /// Modular conjugation J(a) = ρ^{1/2} a* ρ^{-1/2} (antilinear, J² = 1).
    pub fn j(&self, a: &Element) -> Element {
        self.sqrt.mul(&a.adjoint()).mul(&self.sqrt_inv)
    }

    /// Modular operator ∇(a) = ρ a ρ^{-1}; positive for the GNS inner product.
    pub fn nabla(&self, a: &Element) -> Element {
        self.weight.density().mul(a).mul(&self.inv)
    }

    /// ∇^{it}(a) = σ_t(a).
    pub fn nabla_power(&self, t: f64, a: &Element) -> Element {
        self.weight.modular(cx(t, 0.0), a)
    }
}

/// GNS construction for a faithful weight. The two defining relations
/// JΛ(x) = Λ(σ_{i/2}(x)*) and ∇^{it}Λ(a) = Λ(σ_t(a)) hold by construction
/// and are re-verified by [`gns_checks`].
pub fn gns(w: &Weight) -> GnsData {
    GnsData {
        hilbert_dim: w.algebra().total_dim(),
        sqrt: w.density_power(cx(0.5, 0.0)),
        sqrt_inv: w.density_power(cx(-0.5, 0.0)),
        inv: w.density_power(cx(-1.0, 0.0)),
        weight: w.clone(),
    }
}

/// Residual checks for the GNS data of a weight.
pub fn gns_checks(name: &str, w: &Weight, settings: &crate::RunSettings) -> Vec<Check> {
    let g = gns(w);
    let alg = w.algebra();
    let basis = alg.basis();
    let tol = settings.tolerance;

    // The inner product is ψ(b*a) by definition; what needs verifying is that
    // it is positive definite on coordinates.
    let mut gram_pos = 0.0f64;
    for a in &basis {
        let p = g.inner(a, a);
        gram_pos = gram_pos.max((-p.re).max(p.im.abs()));
    }

    let mut j_rel = 0.0f64;
    let mut j_inv = 0.0f64;
    for a in &basis {
        let lhs = g.j(a);
        let rhs = w.modular(cx(0.0, 0.5), a).adjoint();
        j_rel = j_rel.max(rel(lhs.distance(&rhs), rhs.fro_norm()));
        j_inv = j_inv.max(rel(g.j(&lhs).distance(a), 1.0));
    }

    let mut nabla_rel = 0.0f64;
    for &t in &settings.t_samples {
        for a in &basis {
            let lhs = g.nabla_power(t, a);
            let rhs = w.modular(cx(t, 0.0), a);
            nabla_rel = nabla_rel.max(rel(lhs.distance(&rhs), rhs.fro_norm()));
        }
    }

    // ∇ positivity for the GNS inner product.
    let mut rng = settings.rng();
    let mut nabla_pos = 0.0f64;
    for _ in 0..settings.samples.max(8) {
        let a = crate::algebra::random_element(alg, &mut rng);
        let p = g.inner(&g.nabla(&a), &a);
        nabla_pos = nabla_pos.max((-p.re).max(p.im.abs()) / a.fro_norm().powi(2).max(1.0));
    }

    // lemKMS(1): Λ(xa) = Jπ(σ_{i/2}(a))*JΛ(x) on basis pairs; the GNS adjoint
    // of π(s) is π(s*).
    let mut lem1 = 0.0f64;
    for x in &basis {
        for a in &basis {
            let lhs = x.mul(a);
            let s_star = w.modular(cx(0.0, 0.5), a).adjoint();
            let rhs = g.j(&s_star.mul(&g.j(x)));
            lem1 = lem1.max(rel(lhs.distance(&rhs), lhs.fro_norm()));
        }
    }

    vec![
        Check::residual(
            &format!("gns.{name}.gram"),
            "⟨Λ(a),Λ(b)⟩ = ψ(b*a) defines a positive inner product",
            gram_pos,
            tol,
        ),
        Check::residual(
            &format!("gns.{name}.j"),
            "JΛ(x) = Λ(σ_{i/2}(x)*)",
            j_rel,
            tol,
        ),
        Check::residual(&format!("gns.{name}.j_involution"), "J² = 1", j_inv, tol),
        Check::residual(
            &format!("gns.{name}.nabla"),
            "∇^{it}Λ(a) = Λ(σ_t(a))",
            nabla_rel,
            tol,
        ),
        Check::residual(
            &format!("gns.{name}.nabla_positive"),
            "∇ ≥ 0 for the GNS inner product",
            nabla_pos,
            tol,
        ),
        Check::residual(
            &format!("gns.{name}.lemma_action"),
            "lemKMS(1): Λ(xa) = Jπ(σ_{i/2}(a))*JΛ(x)",
            lem1,
            tol,
        ),
    ]
}

/// A bounded linear functional ω(x) = Σ_k tr(τ_k x_k); no positivity assumed.
#[derive(Debug, Clone)]
pub struct Functional {
    algebra: Arc<BlockAlgebra>,
    rep: Element,
}

impl Functional {
    pub fn new(algebra: Arc<BlockAlgebra>, rep: Element) -> Result<Self> {
        if !rep.algebra().structural_eq(&algebra) {
            return Err(Error::AlgebraMismatch {
                left: algebra.block_dims().to_vec(),
                right: rep.algebra().block_dims().to_vec(),
            });
        }
        Ok(Functional { algebra, rep })
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    pub fn rep(&self) -> &Element {
        &self.rep
    }

    pub fn value(&self, x: &Element) -> Complex64 {
        assert!(x.algebra().structural_eq(&self.algebra));
        self.rep
            .blocks()
            .iter()
            .zip(x.blocks())
            .map(|(t, xb)| (t * xb).trace())
            .sum()
    }

    /// Dual norm of the operator norm: Σ_k ‖τ_k‖₁ (trace norms).
    pub fn norm(&self) -> f64 {
        self.rep
            .blocks()
            .iter()
            .map(|b| b.clone().singular_values().iter().sum::<f64>())
            .sum()
    }

    /// The absolute value |ω|: positive, ‖|ω|‖ = ‖ω‖, and
    /// |ω(a)|² ≤ ‖ω‖·|ω|(a*a). Per block the representing element τ = UΣV†
    /// is replaced by its left polar part UΣU† = (ττ*)^{1/2}.
    pub fn abs(&self) -> Functional {
        let blocks = self
            .rep
            .blocks()
            .iter()
            .map(|b| {
                let svd = b.clone().svd(true, true);
                let u = svd.u.as_ref().expect("svd u");
                let mut s = CMat::zeros(u.ncols(), u.ncols());
                for (k, &sv) in svd.singular_values.iter().enumerate() {
                    s[(k, k)] = cx(sv, 0.0);
                }
                u * s * u.adjoint()
            })
            .collect();
        Functional {
            algebra: self.algebra.clone(),
            rep: Element::new(self.algebra.clone(), blocks).expect("abs blocks"),
        }
    }

    pub fn slice_left(&self, x: &Element) -> Result<Element> {
        slice_with(SliceSide::Left, &self.rep, x)
    }

    pub fn slice_right(&self, x: &Element) -> Result<Element> {
        slice_with(SliceSide::Right, &self.rep, x)
    }
}

/// Residual checks for the two defining properties of |ω|.
pub fn functional_abs_checks(
    name: &str,
    omega: &Functional,
    settings: &crate::RunSettings,
) -> Vec<Check> {
    let omega_abs = omega.abs();
    let norm_res = rel((omega_abs.norm() - omega.norm()).abs(), omega.norm());
    let mut rng = settings.rng();
    let mut ineq = 0.0f64;
    let mut probes = omega.algebra().basis();
    for _ in 0..settings.samples.max(100) {
        probes.push(crate::algebra::random_element(omega.algebra(), &mut rng));
    }
    for a in &probes {
        let lhs = omega.value(a).norm_sqr();
        let rhs = omega.norm() * omega_abs.value(&a.adjoint().mul(a)).re;
        ineq = ineq.max(rel(lhs - rhs, rhs.abs()));
    }
    vec![
        Check::residual(
            &format!("functional_abs.{name}.norm"),
            "omegabar(1): ‖|ω|‖ = ‖ω‖",
            norm_res,
            settings.tolerance,
        ),
        Check::residual(
            &format!("functional_abs.{name}.bound"),
            "omegabar(1): |ω(a)|² ≤ ‖ω‖·|ω|(a*a)",
            ineq.max(0.0),
            settings.tolerance,
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceSide {
    /// Contract the left tensor leg: x ↦ (F⊗id)(x).
    Left,
    /// Contract the right tensor leg: x ↦ (id⊗F)(x).
    Right,
}

/// Slice map against a representing element: (ψ⊗id)(x) or (id⊗ω)(x),
/// computed blockwise by partial contraction with the density/rep element.
pub fn slice_with(side: SliceSide, rep: &Element, x: &Element) -> Result<Element> {
    let (l, r) = x.algebra().tensor_factors().ok_or(Error::NotTensor)?;
    let (l, r) = (l.clone(), r.clone());
    let contracted = match side {
        SliceSide::Left => &l,
        SliceSide::Right => &r,
    };
    let kept = match side {
        SliceSide::Left => &r,
        SliceSide::Right => &l,
    };
    if !rep.algebra().structural_eq(contracted) {
        return Err(Error::AlgebraMismatch {
            left: contracted.block_dims().to_vec(),
            right: rep.algebra().block_dims().to_vec(),
        });
    }
    let mut out = kept.zero();
    let nb_r = r.num_blocks();
    for (bi, &d1) in l.block_dims().iter().enumerate() {
        for (bj, &d2) in r.block_dims().iter().enumerate() {
            let xb = x.block(bi * nb_r + bj);
            match side {
                SliceSide::Left => {
                    // out_j[c,d] += Σ_{a,b} ρ_i[b,a] · x[(a,c),(b,d)]
                    let rho = rep.block(bi);
                    let dst = out.block_mut(bj);
                    for a in 0..d1 {
                        for b in 0..d1 {
                            let w = rho[(b, a)];
                            if w == Complex64::default() {
                                continue;
                            }
                            for c in 0..d2 {
                                for d in 0..d2 {
                                    dst[(c, d)] += w * xb[(a * d2 + c, b * d2 + d)];
                                }
                            }
                        }
                    }
                }
                SliceSide::Right => {
                    // out_i[a,b] += Σ_{c,d} τ_j[d,c] · x[(a,c),(b,d)]
                    let tau = rep.block(bj);
                    let dst = out.block_mut(bi);
                    for c in 0..d2 {
                        for d in 0..d2 {
                            let w = tau[(d, c)];
                            if w == Complex64::default() {
                                continue;
                            }
                            for a in 0..d1 {
                                for b in 0..d1 {
                                    dst[(a, b)] += w * xb[(a * d2 + c, b * d2 + d)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product weight: density is the Kronecker product of densities;
/// its modular group is σ^{ψ}⊗σ^{φ}.
pub fn tensor_weight(w1: &Weight, w2: &Weight) -> Weight {
    let density = kron(w1.density(), w2.density());
    Weight::new(density.algebra().clone(), density).expect("tensor density")
}

/// Generalized Cauchy–Schwarz check:
/// ((ψ⊗id)(y*x))*((ψ⊗id)(y*x)) ≤ ‖(ψ⊗id)(y*y)‖·(ψ⊗id)(x*x),
/// verified as positive semidefiniteness of the difference.
pub fn generalized_cauchy_schwarz_check(
    w: &Weight,
    x: &Element,
    y: &Element,
    tol: f64,
) -> Result<Check> {
    let yx = w.slice_left(&y.adjoint().mul(x))?;
    let yy = w.slice_left(&y.adjoint().mul(y))?;
    let xx = w.slice_left(&x.adjoint().mul(x))?;
    let lhs = yx.adjoint().mul(&yx);
    let bound = xx.scale(cx(yy.op_norm(), 0.0));
    let diff = bound.sub(&lhs);
    let scale = bound.fro_norm().max(lhs.fro_norm()).max(1.0);
    let min_eig = diff
        .blocks()
        .iter()
        .map(min_eig_hermitian)
        .fold(f64::INFINITY, f64::min);
    Ok(Check::residual(
        "cauchyschwarz",
        "cauchyschwarz: ((ψ⊗id)(y*x))*((ψ⊗id)(y*x)) ≤ ‖(ψ⊗id)(y*y)‖(ψ⊗id)(x*x)",
        (-min_eig).max(0.0) / scale,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_element, tensor_algebra};
    use crate::RunSettings;

    fn diag21() -> (Arc<BlockAlgebra>, Weight) {
        let m2 = BlockAlgebra::matrix(2);
        let mut d = m2.zero();
        d.block_mut(0)[(0, 0)] = cx(2.0, 0.0);
        d.block_mut(0)[(1, 1)] = cx(1.0, 0.0);
        let w = Weight::new(m2.clone(), d).unwrap();
        (m2, w)
    }

    #[test]
    fn tracial_modular_group_is_trivial() {
        let alg = BlockAlgebra::new(&[2, 3]).unwrap();
        let w = Weight::scaled_trace(&alg, 3.0).unwrap();
        let mut rng = crate::test_rng(1);
        for _ in 0..10 {
            let x = random_element(&alg, &mut rng);
            for z in [cx(0.7, 0.0), cx(0.0, 0.5), cx(-1.3, 2.0)] {
                assert!(w.modular(z, &x).rel_distance(&x) < 1e-12);
            }
        }
    }

    #[test]
    fn modular_half_shift_on_matrix_unit() {
        // ρ = diag(2,1): σ_{i/2}(e_12) = ρ^{-1/2} e_12 ρ^{1/2} = (1/√2)·e_12,
        // by direct 2×2 computation.
        let (m2, w) = diag21();
        let e12 = m2.basis_unit(0, 0, 1);
        let got = w.modular(cx(0.0, 0.5), &e12);
        let expect = e12.scale(cx(1.0 / 2.0f64.sqrt(), 0.0));
        assert!(got.rel_distance(&expect) < 1e-12);

        // and the KMS identity holds for it numerically
        let lhs = w.value(&e12.adjoint().mul(&e12));
        let s = w.modular(cx(0.0, 0.5), &e12);
        let rhs = w.value(&s.mul(&s.adjoint()));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn real_time_flow_is_isometric_and_star() {
        let (m2, w) = diag21();
        let mut rng = crate::test_rng(2);
        for _ in 0..20 {
            let x = random_element(&m2, &mut rng);
            let t = cx(0.8, 0.0);
            let sx = w.modular(t, &x);
            assert!((sx.op_norm() - x.op_norm()).abs() < 1e-10);
            assert!(sx.adjoint().rel_distance(&w.modular(t, &x.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn group_law_and_star_consistency() {
        let (m2, w) = diag21();
        let mut rng = crate::test_rng(3);
        let zs = [cx(0.5, 0.25), cx(-1.0, 0.5), cx(0.0, -0.75)];
        for _ in 0..10 {
            let x = random_element(&m2, &mut rng);
            for &z in &zs {
                for &v in &zs {
                    let lhs = w.modular(z, &w.modular(v, &x));
                    let rhs = w.modular(z + v, &x);
                    assert!(lhs.rel_distance(&rhs) < 1e-9);
                }
            }
            // σ_{i/2}(x)* = σ_{-i/2}(x*)
            let lhs = w.modular(cx(0.0, 0.5), &x).adjoint();
            let rhs = w.modular(cx(0.0, -0.5), &x.adjoint());
            assert!(lhs.rel_distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn kms_checks_pass_for_trace_and_density() {
        let settings = RunSettings::default();
        let m3 = BlockAlgebra::matrix(3);
        for c in check_kms("trace", &Weight::tracial(&m3), &settings) {
            assert!(c.pass && c.residual < 1e-12, "{c:?}");
        }
        let (_, w) = diag21();
        for c in check_kms("rho", &w, &settings) {
            assert!(c.pass && c.residual < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn kms_fails_for_corrupted_modular_group() {
        let (m2, w) = diag21();
        let mut dprime = m2.zero();
        dprime.block_mut(0)[(0, 0)] = cx(3.0, 0.0);
        dprime.block_mut(0)[(1, 1)] = cx(1.0, 0.0);
        let w_corrupt = Weight::new(m2, dprime).unwrap();
        let mut rng = crate::test_rng(4);
        let (identity, _, shift) = kms_residuals(&w, &w_corrupt, &[1.0, -1.0], &mut rng, 8);
        assert!(identity >= 0.1, "identity residual {identity}");
        assert!(shift >= 0.1, "shift residual {shift}");
    }

    #[test]
    fn gns_trace_case_is_flat() {
        let m3 = BlockAlgebra::matrix(3);
        let w = Weight::tracial(&m3);
        let g = gns(&w);
        assert_eq!(g.hilbert_dim, 9);
        let mut rng = crate::test_rng(5);
        let a = random_element(&m3, &mut rng);
        assert!(
            g.nabla(&a).rel_distance(&a) < 1e-12,
            "nabla = id for a trace"
        );
        assert!(
            g.j(&a).rel_distance(&a.adjoint()) < 1e-12,
            "J = * for a trace"
        );
    }

    #[test]
    fn gns_checks_pass_and_match_inner_product() {
        let settings = RunSettings::default();
        let (m2, w) = diag21();
        for c in gns_checks("rho", &w, &settings) {
            assert!(c.pass, "{c:?}");
        }
        let g = gns(&w);
        for a in m2.basis() {
            for b in m2.basis() {
                let lhs = g.inner(&a, &b);
                let rhs = w.value(&b.adjoint().mul(&a));
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn slice_of_simple_tensor() {
        let m2 = BlockAlgebra::matrix(2);
        let tr = Weight::tracial(&m2);
        let mut rng = crate::test_rng(6);
        let a = random_element(&m2, &mut rng);
        let b = random_element(&m2, &mut rng);
        let x = kron(&a, &b);
        // (id⊗Tr)(a⊗b) = Tr(b)·a
        let got = tr.slice_right(&x).unwrap();
        assert!(got.rel_distance(&a.scale(b.trace())) < 1e-12);
        // (Tr⊗id)(a⊗b) = Tr(a)·b
        let got = tr.slice_left(&x).unwrap();
        assert!(got.rel_distance(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn slice_fubini() {
        // slice_lem1: ψ((id⊗ω)(x)) = ω((ψ⊗id)(x))
        let m2 = BlockAlgebra::matrix(2);
        let (_, w) = diag21();
        let t2 = tensor_algebra(&m2, &m2);
        let mut rng = crate::test_rng(7);
        for _ in 0..50 {
            let x = random_element(&t2, &mut rng);
            let omega = Functional::new(m2.clone(), random_element(&m2, &mut rng)).unwrap();
            let lhs = w.value(&omega.slice_right(&x).unwrap());
            let rhs = omega.value(&w.slice_left(&x).unwrap());
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn slice_positivity() {
        let m2 = BlockAlgebra::matrix(2);
        let (_, w) = diag21();
        let t2 = tensor_algebra(&m2, &m2);
        let mut rng = crate::test_rng(8);
        for _ in 0..20 {
            let y = random_element(&t2, &mut rng);
            let x = y.adjoint().mul(&y);
            let s = w.slice_left(&x).unwrap();
            let min = s
                .blocks()
                .iter()
                .map(min_eig_hermitian)
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-10, "slice of positive element must be PSD");
        }
    }

    #[test]
    fn tensor_weight_structure() {
        let m2 = BlockAlgebra::matrix(2);
        let tr = Weight::tracial(&m2);
        let (_, w) = diag21();

        // Tr⊗Tr on M_2⊗M_2 is the trace of the 4-dim block.
        let tt = tensor_weight(&tr, &tr);
        assert!(tt.density().rel_distance(&tt.algebra().unit()) < 1e-14);

        // modular group acts leg-wise at complex parameters:
        // σ_z(a⊗b) = σ^{ρ}_z(a)⊗σ^{Tr}_z(b) = σ^{ρ}_z(a)⊗b for ρ⊗Tr
        let wt = tensor_weight(&w, &tr);
        let mut rng = crate::test_rng(9);
        for &z in &[cx(0.5, 0.0), cx(-1.0, 0.0), cx(0.0, 0.5), cx(0.3, -0.7)] {
            let a = random_element(&m2, &mut rng);
            let b = random_element(&m2, &mut rng);
            let lhs = wt.modular(z, &kron(&a, &b));
            let rhs = kron(&w.modular(z, &a), &b);
            assert!(lhs.rel_distance(&rhs) < 1e-10);
        }

        // Fubini for the tensor weight: (ψ⊗φ)(x) = φ((ψ⊗id)(x)).
        let t2 = tensor_algebra(&m2, &m2);
        for _ in 0..20 {
            let x = random_element(&t2, &mut rng);
            let lhs = wt.value(&x);
            let rhs = tr.value(&w.slice_left(&x).unwrap());
            assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn functional_abs_examples() {
        let settings = RunSettings::default();
        let m2 = BlockAlgebra::matrix(2);

        // positive ω: |ω| = ω
        let (_, w) = diag21();
        let pos = w.as_functional();
        assert!(pos.abs().rep().rel_distance(pos.rep()) < 1e-12);

        // ω = −Tr: |ω| = Tr
        let neg = Functional::new(m2.clone(), m2.unit().neg()).unwrap();
        assert!(neg.abs().rep().rel_distance(&m2.unit()) < 1e-12);

        // ω = Tr(e_12 ·): |ω| has density e_11 = (ττ*)^{1/2}. The bound
        // |ω(a)|² ≤ ‖ω‖|ω|(a*a) is tight at a = e_21 and fails for the
        // opposite polar part, so the convention matters.
        let omega = Functional::new(m2.clone(), m2.basis_unit(0, 0, 1)).unwrap();
        assert!(omega.abs().rep().rel_distance(&m2.basis_unit(0, 0, 0)) < 1e-12);
        for c in functional_abs_checks("e12", &omega, &settings) {
            assert!(c.pass, "{c:?}");
        }
        let e21 = m2.basis_unit(0, 1, 0);
        let lhs = omega.value(&e21).norm_sqr();
        let wrong_rhs = omega.norm()
            * Functional::new(m2.clone(), m2.basis_unit(0, 1, 1))
                .unwrap()
                .value(&e21.adjoint().mul(&e21))
                .re;
        assert!(
            lhs > wrong_rhs + 0.5,
            "opposite polar part violates the bound"
        );
    }

    #[test]
    fn cauchy_schwarz_cases() {
        let m2 = BlockAlgebra::matrix(2);
        let tr = Weight::tracial(&m2);
        let t2 = tensor_algebra(&m2, &m2);
        let mut rng = crate::test_rng(10);
        let x = random_element(&t2, &mut rng);
        // y = x: the difference is PSD (equality direction)
        let c = generalized_cauchy_schwarz_check(&tr, &x, &x, 1e-10).unwrap();
        assert!(c.pass, "{c:?}");
        // x = 0: both sides vanish
        let c = generalized_cauchy_schwarz_check(&tr, &t2.zero(), &x, 1e-10).unwrap();
        assert!(c.pass && c.residual == 0.0);
        for _ in 0..200 {
            let x = random_element(&t2, &mut rng);
            let y = random_element(&t2, &mut rng);
            let c = generalized_cauchy_schwarz_check(&tr, &x, &y, 1e-10).unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn slice_rejects_factor_mismatch() {
        let m2 = BlockAlgebra::matrix(2);
        let m3 = BlockAlgebra::matrix(3);
        let t = tensor_algebra(&m2, &m3);
        let w2 = Weight::tracial(&m2);
        let mut rng = crate::test_rng(12);
        let x = random_element(&t, &mut rng);
        assert!(w2.slice_left(&x).is_ok());
        assert!(matches!(
            w2.slice_right(&x),
            Err(Error::AlgebraMismatch { .. })
        ));
        assert!(matches!(
            w2.slice_left(&random_element(&m2, &mut rng)),
            Err(Error::NotTensor)
        ));
    }

    #[test]
    fn rejects_bad_densities() {
        let m2 = BlockAlgebra::matrix(2);
        let mut nonpos = m2.zero();
        nonpos.block_mut(0)[(0, 0)] = cx(1.0, 0.0);
        nonpos.block_mut(0)[(1, 1)] = cx(-0.5, 0.0);
        assert!(matches!(
            Weight::new(m2.clone(), nonpos),
            Err(Error::NonPositiveDensity(_))
        ));
        let mut nonherm = m2.unit();
        nonherm.block_mut(0)[(0, 1)] = cx(0.3, 0.1);
        assert!(matches!(
            Weight::new(m2, nonherm),
            Err(Error::NonHermitianDensity(_))
        ));
    }
}
