//! Constructors: quantum groupoid candidates from finite groupoid tables
//! (the commutative function-algebra model and the convolution-algebra model
//! in Wedderburn form), plus weak Hopf data with its counital maps and Haar
//! residuals.

use std::sync::Arc;

use crate::algebra::{kron, kron_acc, tensor_algebra, BlockAlgebra, Element};
use crate::error::Error;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{cx, hermitian_eigen, rel, CMat, SpanBasis, ONE};
use crate::linmap::{LinearMap, MapFlags, SubalgebraEmbedding};
use crate::qgroupoid::{Comultiplication, QuantumGroupoidData};
use crate::report::Check;
use crate::weights::{Functional, Weight};
use crate::Result;
use num_complex::Complex64;

fn identity_anti_iso(alg: &Arc<BlockAlgebra>) -> LinearMap {
    // on a commutative algebra the identity is both an isomorphism and an
    // anti-isomorphism
    LinearMap::identity(alg)
        .with_flags(MapFlags {
            multiplicative: true,
            anti_multiplicative: true,
            star_preserving: true,
            unital: true,
            injective: true,
        })
        .expect("identity flags on a commutative algebra")
}

fn counting_pair_idempotent(base: &Arc<BlockAlgebra>) -> Element {
    let mut e = tensor_algebra(base, base).zero();
    for k in 0..base.num_blocks() {
        kron_acc(
            &mut e,
            ONE,
            &base.basis_unit(k, 0, 0),
            &base.basis_unit(k, 0, 0),
        );
    }
    e
}

/// The commutative model: A = functions on G, (Δf)(p,q) = f(pq) on
/// composable pairs, E the indicator of composability, B and C the pullbacks
/// of functions on the unit space along s and t, and counting weights.
pub fn function_algebra_model(g: &FiniteGroupoid) -> Result<QuantumGroupoidData> {
    let report = crate::groupoid::validate_groupoid(g);
    if !report.verdict {
        let bad = report.failing().next().expect("failing check");
        return Err(Error::InvalidGroupoid(format!(
            "{}: {}",
            bad.id,
            bad.detail.clone().unwrap_or_default()
        )));
    }
    let n = g.len();
    let a = BlockAlgebra::abelian(n);
    let target = tensor_algebra(&a, &a);

    let delta_unit = |k: usize| a.basis_unit(k, 0, 0);
    let mut images: Vec<Element> = (0..n).map(|_| target.zero()).collect();
    let mut e = target.zero();
    for (p, q, pq) in g.composable_pairs() {
        kron_acc(&mut images[pq], ONE, &delta_unit(p), &delta_unit(q));
        kron_acc(&mut e, ONE, &delta_unit(p), &delta_unit(q));
    }
    let delta = Comultiplication::from_images(&a, &images)?;

    let units = g.units().to_vec();
    let base = BlockAlgebra::abelian(units.len());
    let mut iota_b_images = Vec::with_capacity(units.len());
    let mut iota_c_images = Vec::with_capacity(units.len());
    for &u in &units {
        let mut ind_s = a.zero();
        let mut ind_t = a.zero();
        for p in 0..n {
            if g.source(p) == u {
                ind_s.block_mut(p)[(0, 0)] = ONE;
            }
            if g.target(p) == u {
                ind_t.block_mut(p)[(0, 0)] = ONE;
            }
        }
        iota_b_images.push(ind_s);
        iota_c_images.push(ind_t);
    }
    let iota_b = SubalgebraEmbedding::new(LinearMap::from_images(
        base.clone(),
        a.clone(),
        &iota_b_images,
    )?)?;
    let iota_c = SubalgebraEmbedding::new(LinearMap::from_images(
        base.clone(),
        a.clone(),
        &iota_c_images,
    )?)?;

    let nu = Weight::diagonal(&base, &vec![1.0; units.len()])?;
    let e_base = counting_pair_idempotent(&base);
    let phi = Weight::tracial(&a);
    let psi = Weight::tracial(&a);

    QuantumGroupoidData::new(
        a.clone(),
        delta,
        e,
        base.clone(),
        base,
        identity_anti_iso(&BlockAlgebra::abelian(units.len())),
        nu,
        e_base,
        iota_b,
        iota_c,
        phi,
        psi,
    )
}

/// As [`function_algebra_model`], but with a user-supplied base weight on
/// the unit space. The separability condition (ν⊗id)(E) = 1 forces the
/// counting weight in this model, so anything else is rejected with a
/// diagnostic rather than assembled into a failing candidate.
pub fn function_algebra_model_with_nu(
    g: &FiniteGroupoid,
    nu_weights: &[f64],
) -> Result<QuantumGroupoidData> {
    if nu_weights.len() != g.num_units() {
        return Err(Error::NonCountingBaseWeight(format!(
            "expected {} unit weights, got {}",
            g.num_units(),
            nu_weights.len()
        )));
    }
    for (k, &w) in nu_weights.iter().enumerate() {
        if (w - 1.0).abs() > 1e-12 {
            let unit = &g.elements()[g.units()[k]];
            return Err(Error::NonCountingBaseWeight(format!(
                "ν(1_{{s⁻¹({unit})}}) = {w}, but (ν⊗id)(E) = 1 forces every unit weight to be 1"
            )));
        }
    }
    function_algebra_model(g)
}

struct Component {
    objects: Vec<usize>,
    frames: Vec<usize>,
    isotropy: Vec<usize>,
    iso_pos: std::collections::HashMap<usize, usize>,
    characters: Vec<Vec<Complex64>>,
}

fn components_of(g: &FiniteGroupoid) -> Vec<Vec<usize>> {
    let units = g.units();
    let mut comp_of: std::collections::HashMap<usize, usize> =
        units.iter().map(|&u| (u, usize::MAX)).collect();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &u in units {
        if comp_of[&u] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![u];
        let mut members = Vec::new();
        comp_of.insert(u, id);
        while let Some(v) = stack.pop() {
            members.push(v);
            for p in 0..g.len() {
                for w in [g.source(p), g.target(p)] {
                    if (g.source(p) == v || g.target(p) == v) && comp_of[&w] == usize::MAX {
                        comp_of.insert(w, id);
                        stack.push(w);
                    }
                }
            }
        }
        members.sort_by_key(|&m| units.iter().position(|&x| x == m).unwrap());
        comps.push(members);
    }
    comps
}

/// Characters of a finite abelian group given by its composition table,
/// found as the joint eigenvectors of the (commuting, normal) regular
/// representation. Deterministic: characters are sorted by their value
/// tuples.
fn abelian_characters(
    g: &FiniteGroupoid,
    isotropy: &[usize],
    iso_pos: &std::collections::HashMap<usize, usize>,
) -> Result<Vec<Vec<Complex64>>> {
    let m = isotropy.len();
    if m == 1 {
        return Ok(vec![vec![ONE]]);
    }
    // abelian check
    for &h in isotropy {
        for &h2 in isotropy {
            if g.product(h, h2) != g.product(h2, h) {
                return Err(Error::UnsupportedIsotropy(format!(
                    "isotropy group is nonabelian: `{}`·`{}` != `{}`·`{}`",
                    g.elements()[h],
                    g.elements()[h2],
                    g.elements()[h2],
                    g.elements()[h]
                )));
            }
        }
    }
    let perm = |h: usize| -> CMat {
        let mut p = CMat::zeros(m, m);
        for (col, &h2) in isotropy.iter().enumerate() {
            let prod = g.product(h, h2).expect("isotropy closed");
            p[(iso_pos[&prod], col)] = ONE;
        }
        p
    };
    let mats: Vec<CMat> = isotropy.iter().map(|&h| perm(h)).collect();

    for attempt in 0..16u32 {
        // a generic Hermitian element of the commutative regular
        // representation algebra; its eigenvectors are the characters
        let mut k = CMat::zeros(m, m);
        for (t, p) in mats.iter().enumerate() {
            let phase = (t as f64 + 1.0) * (1.234 + 0.711 * attempt as f64);
            let c = phase.cos();
            let d = phase.sin();
            let pt = p.transpose();
            k += (p + &pt) * cx(c, 0.0);
            k += (p - &pt) * cx(0.0, d);
        }
        let (_, vecs) = hermitian_eigen(&k);
        let mut chars: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut ok = true;
        for col in 0..m {
            let v = vecs.column(col).into_owned();
            let chi: Vec<Complex64> = mats.iter().map(|p| v.dotc(&(p * &v))).collect();
            // must be a genuine character: unimodular and multiplicative
            for (hi, &h) in isotropy.iter().enumerate() {
                if (chi[hi].norm() - 1.0).abs() > 1e-8 {
                    ok = false;
                }
                for (hj, &h2) in isotropy.iter().enumerate() {
                    let prod = iso_pos[&g.product(h, h2).expect("closed")];
                    if (chi[hi] * chi[hj] - chi[prod]).norm() > 1e-8 {
                        ok = false;
                    }
                }
            }
            chars.push(chi);
        }
        // distinctness
        for i in 0..m {
            for j in (i + 1)..m {
                let close = chars[i]
                    .iter()
                    .zip(&chars[j])
                    .all(|(a, b)| (a - b).norm() < 1e-6);
                if close {
                    ok = false;
                }
            }
        }
        if ok {
            let mut cleaned: Vec<Vec<Complex64>> = chars
                .into_iter()
                .map(|chi| {
                    chi.into_iter()
                        .map(|z| {
                            // snap to the unit circle to kill eigenvector noise
                            let arg = z.arg();
                            Complex64::from_polar(1.0, arg)
                        })
                        .collect()
                })
                .collect();
            cleaned.sort_by(|a, b| {
                let key = |v: &Vec<Complex64>| -> Vec<(i64, i64)> {
                    v.iter()
                        .map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64))
                        .collect()
                };
                key(a).cmp(&key(b))
            });
            return Ok(cleaned);
        }
    }
    Err(Error::UnsupportedIsotropy(
        "failed to split the isotropy group into characters".into(),
    ))
}

/// The convolution model: each connected component with k objects and
/// abelian isotropy H contributes |H| full blocks M_k (one per character);
/// λ_g maps to χ(h_g)·e_{ij} blockwise, Δλ_g = λ_g⊗λ_g, E = Σ_u λ_u⊗λ_u,
/// B = C = span{λ_u}, and φ = ψ is the functional with φ(λ_g) = [g unit].
pub fn convolution_algebra_model(g: &FiniteGroupoid) -> Result<QuantumGroupoidData> {
    let report = crate::groupoid::validate_groupoid(g);
    if !report.verdict {
        let bad = report.failing().next().expect("failing check");
        return Err(Error::InvalidGroupoid(format!(
            "{}: {}",
            bad.id,
            bad.detail.clone().unwrap_or_default()
        )));
    }

    let comps_units = components_of(g);
    let mut comps = Vec::with_capacity(comps_units.len());
    for objects in comps_units {
        let base = objects[0];
        // frame: a path from the base object to each object
        let mut frames = Vec::with_capacity(objects.len());
        for &obj in &objects {
            if obj == base {
                frames.push(base);
                continue;
            }
            let path = (0..g.len())
                .find(|&p| g.source(p) == base && g.target(p) == obj)
                .ok_or_else(|| {
                    Error::InvalidGroupoid(format!(
                        "units `{}` and `{}` are connected but no direct arrow joins them",
                        g.elements()[base],
                        g.elements()[obj]
                    ))
                })?;
            frames.push(path);
        }
        let isotropy: Vec<usize> = (0..g.len())
            .filter(|&h| g.source(h) == base && g.target(h) == base)
            .collect();
        let iso_pos: std::collections::HashMap<usize, usize> = isotropy
            .iter()
            .enumerate()
            .map(|(pos, &h)| (h, pos))
            .collect();
        let characters = abelian_characters(g, &isotropy, &iso_pos)?;
        comps.push(Component {
            objects,
            frames,
            isotropy,
            iso_pos,
            characters,
        });
    }

    let mut dims = Vec::new();
    for comp in &comps {
        for _ in 0..comp.characters.len() {
            dims.push(comp.objects.len());
        }
    }
    let a = BlockAlgebra::new(&dims)?;

    // block offset of each component in the flat block list
    let mut comp_block_offset = Vec::with_capacity(comps.len());
    let mut off = 0usize;
    for comp in &comps {
        comp_block_offset.push(off);
        off += comp.characters.len();
    }
    let comp_of_unit: std::collections::HashMap<usize, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(ci, comp)| comp.objects.iter().map(move |&u| (u, ci)))
        .collect();

    // λ_g in block coordinates
    let lambda = |p: usize| -> Element {
        let ci = comp_of_unit[&g.target(p)];
        let comp = &comps[ci];
        let i = comp.objects.iter().position(|&u| u == g.target(p)).unwrap();
        let j = comp.objects.iter().position(|&u| u == g.source(p)).unwrap();
        let h = g
            .product(g.inverse(comp.frames[i]), p)
            .and_then(|x| g.product(x, comp.frames[j]))
            .expect("frame conjugation stays in the isotropy group");
        let hpos = comp.iso_pos[&h];
        let mut out = a.zero();
        for (chi_idx, chi) in comp.characters.iter().enumerate() {
            out.block_mut(comp_block_offset[ci] + chi_idx)[(i, j)] = chi[hpos];
        }
        out
    };

    let lambdas: Vec<Element> = (0..g.len()).map(lambda).collect();

    // invert the λ transform to express block basis units in the λ basis
    let mut transform = CMat::zeros(a.total_dim(), g.len());
    for (p, lam) in lambdas.iter().enumerate() {
        transform.set_column(p, &lam.to_coords());
    }
    let inv = transform
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidGroupoid("λ transform is singular".into()))?;

    let target = tensor_algebra(&a, &a);
    let mut images = Vec::with_capacity(a.total_dim());
    for unit_idx in 0..a.total_dim() {
        let mut img = target.zero();
        for p in 0..g.len() {
            let coeff = inv[(p, unit_idx)];
            if coeff != Complex64::default() {
                kron_acc(&mut img, coeff, &lambdas[p], &lambdas[p]);
            }
        }
        images.push(img);
    }
    let delta = Comultiplication::from_images(&a, &images)?;

    let mut e = target.zero();
    for &u in g.units() {
        kron_acc(&mut e, ONE, &lambdas[u], &lambdas[u]);
    }

    let units = g.units().to_vec();
    let base = BlockAlgebra::abelian(units.len());
    let iota_images: Vec<Element> = units.iter().map(|&u| lambdas[u].clone()).collect();
    let iota_b = SubalgebraEmbedding::new(LinearMap::from_images(
        base.clone(),
        a.clone(),
        &iota_images,
    )?)?;
    let iota_c = SubalgebraEmbedding::new(LinearMap::from_images(
        base.clone(),
        a.clone(),
        &iota_images,
    )?)?;
    let nu = Weight::diagonal(&base, &vec![1.0; units.len()])?;
    let e_base = counting_pair_idempotent(&base);

    // φ(λ_g) = [g ∈ G⁰]: per character block the density is I_k/|H|
    let mut density = a.zero();
    for (ci, comp) in comps.iter().enumerate() {
        let inv_h = 1.0 / comp.isotropy.len() as f64;
        for chi_idx in 0..comp.characters.len() {
            let blk = comp_block_offset[ci] + chi_idx;
            let d = comp.objects.len();
            for r in 0..d {
                density.block_mut(blk)[(r, r)] = cx(inv_h, 0.0);
            }
        }
    }
    let phi = Weight::new(a.clone(), density)?;
    let psi = phi.clone();

    QuantumGroupoidData::new(
        a.clone(),
        delta,
        e,
        base.clone(),
        base.clone(),
        identity_anti_iso(&base),
        nu,
        e_base,
        iota_b,
        iota_c,
        phi,
        psi,
    )
}

/// Weak Hopf data (A, Δ, ε, S).
#[derive(Debug, Clone)]
pub struct WeakHopfData {
    pub a: Arc<BlockAlgebra>,
    pub delta: Comultiplication,
    pub epsilon: Functional,
    pub antipode: LinearMap,
}

/// The counital maps ε_s(x) = (id⊗ε)((1⊗x)Δ(1)) and
/// ε_t(x) = (ε⊗id)(Δ(1)(x⊗1)), together with their images as embedded
/// subalgebras.
pub struct CounitalMaps {
    pub eps_s: LinearMap,
    pub eps_t: LinearMap,
    pub source_embedding: SubalgebraEmbedding,
    pub target_embedding: SubalgebraEmbedding,
}

/// Presents the span of a commutative *-closed family of host elements as an
/// abelian algebra embedded through its minimal projections.
fn commutative_image_embedding(
    host: &Arc<BlockAlgebra>,
    images: &[Element],
    tol: f64,
) -> Result<SubalgebraEmbedding> {
    let dim = host.total_dim();
    let mut span = SpanBasis::new(dim, 1e-10);
    let mut basis_elems: Vec<Element> = Vec::new();
    for img in images {
        if span.insert(&img.to_coords()) {
            basis_elems.push(img.clone());
        }
    }
    let m = span.rank();
    for x in &basis_elems {
        for y in &basis_elems {
            if rel(x.mul(y).distance(&y.mul(x)), 1.0) > tol {
                return Err(Error::BadEmbedding(
                    "counital image is noncommutative; only commutative bases are supported".into(),
                ));
            }
            if span.residual(&x.mul(y).to_coords()) > tol {
                return Err(Error::BadEmbedding(
                    "counital image is not closed under multiplication".into(),
                ));
            }
        }
        if span.residual(&x.adjoint().to_coords()) > tol {
            return Err(Error::BadEmbedding("counital image is not *-closed".into()));
        }
    }

    // Minimal projections = spectral projections of a generic Hermitian
    // element of the image span.
    for attempt in 0..16u32 {
        let mut generic = host.zero();
        for (k, x) in basis_elems.iter().enumerate() {
            let phase = (k as f64 + 1.0) * (0.913 + 0.577 * attempt as f64);
            let herm = x
                .add(&x.adjoint())
                .scale(cx(0.5 * phase.cos(), 0.0))
                .add(&x.sub(&x.adjoint()).scale(cx(0.0, -0.5 * phase.sin())));
            generic = generic.add(&herm);
        }
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut block_data: Vec<(Vec<f64>, CMat)> = Vec::new();
        for b in generic.blocks() {
            let (vals, vecs) = hermitian_eigen(b);
            eigenvalues.extend(vals.iter().copied());
            block_data.push((vals.iter().copied().collect(), vecs));
        }
        eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut clusters: Vec<f64> = Vec::new();
        for &v in &eigenvalues {
            if clusters
                .last()
                .map(|&c| (v - c).abs() > 1e-6)
                .unwrap_or(true)
            {
                clusters.push(v);
            }
        }
        if clusters.len() != m {
            continue;
        }
        let mut projections = Vec::with_capacity(m);
        let mut all_in_span = true;
        for &lam in &clusters {
            let mut proj = host.zero();
            for (blk, (vals, vecs)) in block_data.iter().enumerate() {
                for (k, &v) in vals.iter().enumerate() {
                    if (v - lam).abs() <= 1e-6 {
                        let col = vecs.column(k);
                        *proj.block_mut(blk) += col * col.adjoint();
                    }
                }
            }
            if span.residual(&proj.to_coords()) > tol.max(1e-8) {
                all_in_span = false;
                break;
            }
            projections.push(proj);
        }
        if !all_in_span {
            continue;
        }
        projections.sort_by(|a, b| {
            let key = |e: &Element| -> Vec<i64> {
                e.to_coords()
                    .iter()
                    .map(|z| (z.re * 1e9).round() as i64)
                    .collect()
            };
            key(a).cmp(&key(b))
        });
        let abstract_alg = BlockAlgebra::abelian(m);
        let iota = LinearMap::from_images(abstract_alg, host.clone(), &projections)?;
        return SubalgebraEmbedding::new(iota);
    }
    Err(Error::BadEmbedding(
        "could not split the counital image into minimal projections".into(),
    ))
}

pub fn counital_maps(w: &WeakHopfData, tol: f64) -> Result<CounitalMaps> {
    let one = w.a.unit();
    let delta_one = w.delta.apply(&one);
    let eps_s = LinearMap::from_fn(w.a.clone(), w.a.clone(), |x| {
        let prod = kron(&one, x).mul(&delta_one);
        w.epsilon.slice_right(&prod).expect("slice")
    })?;
    let eps_t = LinearMap::from_fn(w.a.clone(), w.a.clone(), |x| {
        let prod = delta_one.mul(&kron(x, &one));
        w.epsilon.slice_left(&prod).expect("slice")
    })?;
    let s_images: Vec<Element> = w.a.basis().iter().map(|u| eps_s.apply(u)).collect();
    let t_images: Vec<Element> = w.a.basis().iter().map(|u| eps_t.apply(u)).collect();
    let source_embedding = commutative_image_embedding(&w.a, &s_images, tol)?;
    let target_embedding = commutative_image_embedding(&w.a, &t_images, tol)?;
    Ok(CounitalMaps {
        eps_s,
        eps_t,
        source_embedding,
        target_embedding,
    })
}

/// Residuals for the normalized Haar measure of weak Hopf data:
/// φ∘S = φ and (id⊗φ)(Δ(1)) = 1.
pub fn check_weak_hopf_haar(w: &WeakHopfData, phi: &Weight, tol: f64) -> Vec<Check> {
    let mut res_s = 0.0f64;
    for u in w.a.basis() {
        let lhs = phi.value(&w.antipode.apply(&u));
        let rhs = phi.value(&u);
        res_s = res_s.max(rel((lhs - rhs).norm(), rhs.norm()));
    }
    let delta_one = w.delta.apply(&w.a.unit());
    let normalized = phi
        .slice_right(&delta_one)
        .map(|s| s.rel_distance(&w.a.unit()))
        .unwrap_or(f64::INFINITY);
    vec![
        Check::residual(
            "weak_hopf.haar_antipode",
            "finite quantum groupoids: φ∘S = φ",
            res_s,
            tol,
        ),
        Check::residual(
            "weak_hopf.haar_normalized",
            "finite quantum groupoids: (id⊗φ)(Δ(1)) = 1",
            normalized,
            tol,
        ),
    ]
}
