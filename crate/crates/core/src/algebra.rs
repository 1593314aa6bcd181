//! Finite-dimensional C*-algebras in Wedderburn form.
//!
//! A [`BlockAlgebra`] is a direct sum of full complex matrix blocks; an
//! [`Element`] stores one dense matrix per block. Tensor products are again
//! block algebras (block dimensions multiply pairwise, ordered
//! lexicographically) and remember their factors, so flips, slice maps and
//! leg-wise operations know where each leg lives.
//!
//! Coordinates follow a fixed convention throughout the crate: matrix units
//! e_{ij} per block in row-major order, blocks in the order given. All
//! serialized data uses this convention.

use std::sync::Arc;

use crate::error::Error;
use crate::linalg::{cx, fro_norm, op_norm, rel, CMat, CVec, SpanBasis};
use crate::Result;
use num_complex::Complex64;

#[derive(Debug, Clone)]
struct TensorInfo {
    left: Arc<BlockAlgebra>,
    right: Arc<BlockAlgebra>,
}

/// A finite-dimensional C*-algebra ⊕_k M_{d_k}(ℂ), presented by its block
/// dimensions.
#[derive(Debug, Clone)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    total_dim: usize,
    tensor: Option<TensorInfo>,
}

impl PartialEq for BlockAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.block_dims == other.block_dims
    }
}
impl Eq for BlockAlgebra {}

impl BlockAlgebra {
    pub fn new(block_dims: &[usize]) -> Result<Arc<Self>> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::EmptyAlgebra);
        }
        Ok(Arc::new(Self::raw(block_dims.to_vec(), None)))
    }

    fn raw(block_dims: Vec<usize>, tensor: Option<TensorInfo>) -> Self {
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut total = 0usize;
        for &d in &block_dims {
            offsets.push(total);
            total += d * d;
        }
        BlockAlgebra {
            block_dims,
            offsets,
            total_dim: total,
            tensor,
        }
    }

    /// The full matrix algebra M_n.
    pub fn matrix(n: usize) -> Arc<Self> {
        Self::new(&[n]).expect("n >= 1")
    }

    /// The commutative algebra ℂ^n (n blocks of dimension 1).
    pub fn abelian(n: usize) -> Arc<Self> {
        Self::new(&vec![1; n]).expect("n >= 1")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Linear dimension Σ d_k².
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn is_tensor(&self) -> bool {
        self.tensor.is_some()
    }

    pub fn tensor_factors(&self) -> Option<(&Arc<BlockAlgebra>, &Arc<BlockAlgebra>)> {
        self.tensor.as_ref().map(|t| (&t.left, &t.right))
    }

    /// The non-tensor leaves of a nested tensor product (the algebra itself
    /// when it is not a tensor product).
    pub fn flat_factors(self: &Arc<Self>) -> Vec<Arc<BlockAlgebra>> {
        match &self.tensor {
            None => vec![self.clone()],
            Some(t) => {
                let mut v = t.left.flat_factors();
                v.extend(t.right.flat_factors());
                v
            }
        }
    }

    pub fn structural_eq(&self, other: &BlockAlgebra) -> bool {
        self.block_dims == other.block_dims
    }

    /// Coordinate of the matrix unit e_{ij} in block `block` (0-based).
    pub fn coord_index(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets[block] + i * self.block_dims[block] + j
    }

    pub fn zero(self: &Arc<Self>) -> Element {
        let blocks = self.block_dims.iter().map(|&d| CMat::zeros(d, d)).collect();
        Element {
            algebra: self.clone(),
            blocks,
        }
    }

    pub fn unit(self: &Arc<Self>) -> Element {
        let blocks = self
            .block_dims
            .iter()
            .map(|&d| CMat::identity(d, d))
            .collect();
        Element {
            algebra: self.clone(),
            blocks,
        }
    }

    pub fn basis_unit(self: &Arc<Self>, block: usize, i: usize, j: usize) -> Element {
        let mut e = self.zero();
        e.blocks[block][(i, j)] = Complex64::new(1.0, 0.0);
        e
    }

    /// All matrix units in the coordinate convention order.
    pub fn basis(self: &Arc<Self>) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.total_dim);
        for (k, &d) in self.block_dims.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out.push(self.basis_unit(k, i, j));
                }
            }
        }
        out
    }

    pub fn element_from_coords(self: &Arc<Self>, coords: &CVec) -> Result<Element> {
        if coords.len() != self.total_dim {
            return Err(Error::MatrixShape {
                expected: (self.total_dim, 1),
                found: (coords.len(), 1),
            });
        }
        let mut e = self.zero();
        for (k, &d) in self.block_dims.iter().enumerate() {
            let off = self.offsets[k];
            for i in 0..d {
                for j in 0..d {
                    e.blocks[k][(i, j)] = coords[off + i * d + j];
                }
            }
        }
        Ok(e)
    }
}

/// Tensor product algebra A₁⊗A₂. Blocks are the pairwise Kronecker blocks
/// d_i·e_j ordered lexicographically; the result remembers its factors.
pub fn tensor_algebra(a1: &Arc<BlockAlgebra>, a2: &Arc<BlockAlgebra>) -> Arc<BlockAlgebra> {
    let mut dims = Vec::with_capacity(a1.num_blocks() * a2.num_blocks());
    for &d in a1.block_dims() {
        for &e in a2.block_dims() {
            dims.push(d * e);
        }
    }
    Arc::new(BlockAlgebra::raw(
        dims,
        Some(TensorInfo {
            left: a1.clone(),
            right: a2.clone(),
        }),
    ))
}

/// An element of a [`BlockAlgebra`]: one complex matrix per block.
#[derive(Debug, Clone)]
pub struct Element {
    algebra: Arc<BlockAlgebra>,
    blocks: Vec<CMat>,
}

impl Element {
    pub fn new(algebra: Arc<BlockAlgebra>, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::Format(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, b) in blocks.iter().enumerate() {
            let d = algebra.block_dims()[k];
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::BlockShape {
                    block: k,
                    expected: (d, d),
                    found: (b.nrows(), b.ncols()),
                });
            }
        }
        Ok(Element { algebra, blocks })
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut CMat {
        &mut self.blocks[k]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    fn assert_same(&self, other: &Element) {
        assert!(
            self.algebra.structural_eq(&other.algebra),
            "elements from different algebras: {:?} vs {:?}",
            self.algebra.block_dims(),
            other.algebra.block_dims()
        );
    }

    pub fn add(&self, other: &Element) -> Element {
        self.assert_same(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.assert_same(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        self.assert_same(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    pub fn scale(&self, c: Complex64) -> Element {
        let blocks = self.blocks.iter().map(|b| b * c).collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(cx(-1.0, 0.0))
    }

    /// Adjoint (conjugate transpose blockwise); the involution of the algebra.
    pub fn adjoint(&self) -> Element {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Entrywise complex conjugation. Antilinear; kept around as a test probe
    /// for maps that fail *-linearity.
    pub fn conj(&self) -> Element {
        let blocks = self.blocks.iter().map(|b| b.map(|z| z.conj())).collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// C*-norm: max over blocks of the largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(op_norm).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| fro_norm(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn set_zero(&mut self) {
        for b in &mut self.blocks {
            b.fill(Complex64::default());
        }
    }

    pub fn distance(&self, other: &Element) -> f64 {
        self.assert_same(other);
        let mut acc = 0.0f64;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                acc += (x - y).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Frobenius distance relative to max(1, ‖self‖, ‖other‖).
    pub fn rel_distance(&self, other: &Element) -> f64 {
        rel(self.distance(other), self.fro_norm().max(other.fro_norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rel_distance(&self.adjoint()) <= tol
    }

    pub fn to_coords(&self) -> CVec {
        let mut v = CVec::zeros(self.algebra.total_dim());
        for (k, &d) in self.algebra.block_dims().iter().enumerate() {
            let off = self.algebra.offsets[k];
            for i in 0..d {
                for j in 0..d {
                    v[off + i * d + j] = self.blocks[k][(i, j)];
                }
            }
        }
        v
    }
}

/// Kronecker product x⊗y, living in `tensor_algebra(x.algebra, y.algebra)`.
pub fn kron(x: &Element, y: &Element) -> Element {
    let target = tensor_algebra(x.algebra(), y.algebra());
    let mut blocks = Vec::with_capacity(target.num_blocks());
    for bx in x.blocks() {
        for by in y.blocks() {
            blocks.push(bx.kronecker(by));
        }
    }
    Element {
        algebra: target,
        blocks,
    }
}

/// Accumulates `coeff · (x ⊗ y)` into `dst`, which must live in a tensor
/// algebra with factor dims matching x and y. Skips exact zeros of `x`.
pub fn kron_acc(dst: &mut Element, coeff: Complex64, x: &Element, y: &Element) {
    let nb_y = y.algebra().num_blocks();
    for (bi, bx) in x.blocks().iter().enumerate() {
        for (bj, by) in y.blocks().iter().enumerate() {
            let target = &mut dst.blocks[bi * nb_y + bj];
            let (ry, cy) = (by.nrows(), by.ncols());
            for r1 in 0..bx.nrows() {
                for c1 in 0..bx.ncols() {
                    let v1 = bx[(r1, c1)];
                    if v1 == Complex64::default() {
                        continue;
                    }
                    let s = coeff * v1;
                    for r2 in 0..ry {
                        for c2 in 0..cy {
                            let v2 = by[(r2, c2)];
                            if v2 != Complex64::default() {
                                target[(r1 * ry + r2, c1 * cy + c2)] += s * v2;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// The flip map σ: A₁⊗A₂ → A₂⊗A₁, σ(x⊗y) = y⊗x.
pub fn flip(x: &Element) -> Result<Element> {
    let (a1, a2) = x.algebra().tensor_factors().ok_or(Error::NotTensor)?;
    let (a1, a2) = (a1.clone(), a2.clone());
    let target = tensor_algebra(&a2, &a1);
    let mut out = target.zero();
    let nb2 = a2.num_blocks();
    let nb1 = a1.num_blocks();
    for (bi, &d1) in a1.block_dims().iter().enumerate() {
        for (bj, &d2) in a2.block_dims().iter().enumerate() {
            let src = &x.blocks()[bi * nb2 + bj];
            let dstb = &mut out.blocks[bj * nb1 + bi];
            for a in 0..d1 {
                for c in 0..d2 {
                    for b in 0..d1 {
                        for d in 0..d2 {
                            dstb[(c * d1 + a, d * d1 + b)] = src[(a * d2 + c, b * d2 + d)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Indices locating one flat tensor factor inside a (possibly nested) tensor
/// algebra: for each tensor block, which leaf block the factor sits in and
/// the row/column stride of that leg.
struct FlatLeg {
    factor_dims: Vec<Vec<usize>>,
    nfactors: usize,
}

impl FlatLeg {
    fn new(alg: &Arc<BlockAlgebra>) -> Self {
        let factors = alg.flat_factors();
        FlatLeg {
            factor_dims: factors.iter().map(|f| f.block_dims().to_vec()).collect(),
            nfactors: factors.len(),
        }
    }

    /// Decomposes flat tensor block index into per-factor block indices.
    fn block_digits(&self, mut block: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.nfactors];
        for f in (0..self.nfactors).rev() {
            let n = self.factor_dims[f].len();
            digits[f] = block % n;
            block /= n;
        }
        digits
    }

    /// (dimension of leg `f` in this block, stride of leg `f`).
    fn leg_geometry(&self, digits: &[usize], f: usize) -> (usize, usize) {
        let d_f = self.factor_dims[f][digits[f]];
        let stride: usize = (f + 1..self.nfactors)
            .map(|t| self.factor_dims[t][digits[t]])
            .product();
        (d_f, stride)
    }
}

/// Left-multiplies `x` by the flat tensor basis element that is the matrix
/// unit e_{ij} of block `blk` in flat factor `factor`, and the identity in
/// every other factor.
pub fn unit_mul_left(x: &Element, factor: usize, blk: usize, i: usize, j: usize) -> Element {
    let mut out = x.algebra().zero();
    unit_mul_left_into(x, factor, blk, i, j, &mut out);
    out
}

/// As [`unit_mul_left`], writing into a caller-provided buffer.
pub fn unit_mul_left_into(
    x: &Element,
    factor: usize,
    blk: usize,
    i: usize,
    j: usize,
    out: &mut Element,
) {
    let legs = FlatLeg::new(x.algebra());
    out.set_zero();
    for bk in 0..x.algebra().num_blocks() {
        let digits = legs.block_digits(bk);
        if digits[factor] != blk {
            continue;
        }
        let (d_f, stride) = legs.leg_geometry(&digits, factor);
        let src = &x.blocks()[bk];
        let dst = &mut out.blocks[bk];
        let rows = src.nrows();
        let cols = src.ncols();
        for r in 0..rows {
            if (r / stride) % d_f != j {
                continue;
            }
            let r_target = (r as isize + (i as isize - j as isize) * stride as isize) as usize;
            for c in 0..cols {
                dst[(r_target, c)] = src[(r, c)];
            }
        }
    }
}

/// Right-multiplies `x` by the flat tensor basis element that is the matrix
/// unit e_{kl} of block `blk` in flat factor `factor`.
pub fn unit_mul_right(x: &Element, factor: usize, blk: usize, k: usize, l: usize) -> Element {
    let mut out = x.algebra().zero();
    unit_mul_right_into(x, factor, blk, k, l, &mut out);
    out
}

/// As [`unit_mul_right`], writing into a caller-provided buffer.
pub fn unit_mul_right_into(
    x: &Element,
    factor: usize,
    blk: usize,
    k: usize,
    l: usize,
    out: &mut Element,
) {
    let legs = FlatLeg::new(x.algebra());
    out.set_zero();
    for bk in 0..x.algebra().num_blocks() {
        let digits = legs.block_digits(bk);
        if digits[factor] != blk {
            continue;
        }
        let (d_f, stride) = legs.leg_geometry(&digits, factor);
        let src = &x.blocks()[bk];
        let dst = &mut out.blocks[bk];
        let rows = src.nrows();
        let cols = src.ncols();
        for c in 0..cols {
            if (c / stride) % d_f != k {
                continue;
            }
            let c_target = (c as isize + (l as isize - k as isize) * stride as isize) as usize;
            for r in 0..rows {
                dst[(r, c_target)] = src[(r, c)];
            }
        }
    }
}

/// A dense element with independent standard-normal real and imaginary parts
/// in every entry. Deterministic under the supplied generator.
pub fn random_element(alg: &Arc<BlockAlgebra>, rng: &mut impl rand::Rng) -> Element {
    let mut e = alg.zero();
    for b in &mut e.blocks {
        for v in b.iter_mut() {
            *v = cx(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
        }
    }
    e
}

/// Verdict of a span comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanRelation {
    Equal,
    LeftInRight,
    RightInLeft,
    Incomparable,
}

#[derive(Debug, Clone)]
pub struct SpanComparison {
    pub relation: SpanRelation,
    pub dim_left: usize,
    pub dim_right: usize,
    /// Largest projection residual of a left vector against the right span.
    pub residual_left_in_right: f64,
    pub residual_right_in_left: f64,
}

/// Compares the linear spans of two element sets in the same algebra.
///
/// Realizes the norm-density conditions of the theory, which at finite
/// dimension are exact span statements decided by rank-revealing
/// orthogonalization with a relative tolerance.
pub fn span_equals(s1: &[Element], s2: &[Element], tol: f64) -> Result<SpanComparison> {
    let alg = match (s1.first(), s2.first()) {
        (Some(e), _) => e.algebra().clone(),
        (None, Some(e)) => e.algebra().clone(),
        (None, None) => return Err(Error::Format("both spans empty".into())),
    };
    for e in s1.iter().chain(s2.iter()) {
        if !e.algebra().structural_eq(&alg) {
            return Err(Error::AlgebraMismatch {
                left: alg.block_dims().to_vec(),
                right: e.algebra().block_dims().to_vec(),
            });
        }
    }
    let dim = alg.total_dim();
    let c1: Vec<CVec> = s1.iter().map(|e| e.to_coords()).collect();
    let c2: Vec<CVec> = s2.iter().map(|e| e.to_coords()).collect();

    let mut b1 = SpanBasis::new(dim, tol);
    b1.insert_all(c1.iter());
    let mut b2 = SpanBasis::new(dim, tol);
    b2.insert_all(c2.iter());

    let r12 = c1.iter().map(|v| b2.residual(v)).fold(0.0, f64::max);
    let r21 = c2.iter().map(|v| b1.residual(v)).fold(0.0, f64::max);
    let left_in_right = r12 <= tol;
    let right_in_left = r21 <= tol;
    let relation = match (left_in_right, right_in_left) {
        (true, true) => SpanRelation::Equal,
        (true, false) => SpanRelation::LeftInRight,
        (false, true) => SpanRelation::RightInLeft,
        (false, false) => SpanRelation::Incomparable,
    };
    Ok(SpanComparison {
        relation,
        dim_left: b1.rank(),
        dim_right: b2.rank(),
        residual_left_in_right: r12,
        residual_right_in_left: r21,
    })
}
