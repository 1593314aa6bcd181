//! Separability idempotents: the solver for E from the data (B, C, R, ν),
//! the derived weight μ and the γ-map calculus, and the full battery of
//! property checks.
//!
//! The defining conditions
//!   (1) (ν⊗id)(E) = 1
//!   (2) (ν⊗id)(E(b⊗1)) = R(σ^ν_{i/2}(b))
//! are linear in the coordinates of E, and the solution is unique whenever
//! it exists, so the solver is a linear solve followed by residual tests of
//! the nonlinear requirements E = E* = E². A candidate failing those tests
//! is returned inside [`SolveError::NoSolution`]: the existence of a
//! separability idempotent is genuinely a condition on (B, ν).

use std::sync::Arc;

use crate::algebra::{flip, kron, kron_acc, tensor_algebra, BlockAlgebra, Element};
use crate::error::Error;
use crate::linalg::{cx, rel, CMat, CVec, SpanBasis};
use crate::linmap::{check_star_homomorphism, tensor_apply, LinearMap, MapFlags};
use crate::report::Check;
use crate::weights::Weight;
use crate::{Result, RunSettings};
use num_complex::Complex64;

/// Failure modes of the idempotent solver.
#[derive(Debug)]
pub enum SolveError {
    /// The linear system has a unique solution, but it is not a self-adjoint
    /// idempotent: no separability idempotent exists for this data. Residuals
    /// are absolute Frobenius norms on the candidate.
    NoSolution {
        candidate: Element,
        idempotency: f64,
        self_adjointness: f64,
    },
    /// Degenerate data: the linear system does not pin E down and no point
    /// of the affine solution family passes the idempotency test.
    RankDeficient { nullity: usize },
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::NoSolution {
                idempotency,
                self_adjointness,
                ..
            } => write!(
                f,
                "no separability idempotent: candidate has |E^2-E| = {idempotency:.6e}, |E-E*| = {self_adjointness:.6e}"
            ),
            SolveError::RankDeficient { nullity } => {
                write!(f, "separability system is rank deficient (nullity {nullity})")
            }
        }
    }
}

impl std::error::Error for SolveError {}

fn coefficient_matrix_to_element(
    b: &Arc<BlockAlgebra>,
    c: &Arc<BlockAlgebra>,
    coeffs: &CMat,
) -> Element {
    let target = tensor_algebra(b, c);
    let mut e = target.zero();
    let b_basis = b.basis();
    let c_basis = c.basis();
    for (p, ub) in b_basis.iter().enumerate() {
        for (q, fc) in c_basis.iter().enumerate() {
            let v = coeffs[(p, q)];
            if v != Complex64::default() {
                kron_acc(&mut e, v, ub, fc);
            }
        }
    }
    e
}

/// Solves the defining linear system for the coordinates of E in B⊗C, then
/// tests self-adjointness and idempotency.
pub fn solve_separability_idempotent(
    b: &Arc<BlockAlgebra>,
    c: &Arc<BlockAlgebra>,
    r: &LinearMap,
    nu: &Weight,
    tol: f64,
) -> std::result::Result<Element, SolveError> {
    let dim_b = b.total_dim();
    let dim_c = c.total_dim();
    let b_basis = b.basis();

    // Writing E = Σ ε_{pq} u_p⊗f_q, condition (2) for u_p reads
    //   Σ_{p'} ν(u_{p'} u_p) ε_{p'm} = coords(γ_B(u_p))[m]
    // for every C-coordinate m, and condition (1) adds the row
    //   Σ_{p'} ν(u_{p'}) ε_{p'm} = coords(1_C)[m].
    // The same (dim_b + 1) × dim_b matrix serves every column m.
    let mut sys = CMat::zeros(dim_b + 1, dim_b);
    for (p, up) in b_basis.iter().enumerate() {
        for (pp, upp) in b_basis.iter().enumerate() {
            sys[(p, pp)] = nu.value(&upp.mul(up));
        }
    }
    for (pp, upp) in b_basis.iter().enumerate() {
        sys[(dim_b, pp)] = nu.value(upp);
    }

    let mut rhs = CMat::zeros(dim_b + 1, dim_c);
    for (p, up) in b_basis.iter().enumerate() {
        let gamma = r.apply(&nu.modular(cx(0.0, 0.5), up));
        rhs.row_mut(p).tr_copy_from(&gamma.to_coords());
    }
    rhs.row_mut(dim_b).tr_copy_from(&c.unit().to_coords());

    let svd = sys.clone().svd(true, true);
    let top_sv = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-12 * top_sv.max(1.0))
        .count();

    let mut coeffs = CMat::zeros(dim_b, dim_c);
    for m in 0..dim_c {
        let col: CVec = rhs.column(m).into_owned();
        let sol = svd.solve(&col, 1e-12 * top_sv.max(1.0)).expect("svd solve");
        coeffs.set_column(m, &sol);
    }

    let residuals = |e: &Element| {
        let idem = e.mul(e).distance(e);
        let sa = e.distance(&e.adjoint());
        (idem, sa)
    };

    if rank < dim_b {
        // Affine solution family: sweep a bounded grid over the null space
        // looking for an idempotent representative.
        let nullity = dim_b - rank;
        let v_t = svd.v_t.as_ref().expect("svd vt");
        let free = nullity * dim_c;
        if free <= 4 {
            let null_dirs: Vec<CVec> = (rank..dim_b)
                .map(|k| v_t.row(k).adjoint().clone_owned())
                .collect();
            let grid: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.25).collect();
            let mut best: Option<(f64, Element)> = None;
            let total = grid.len().pow(free as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut trial = coeffs.clone();
                for slot in 0..free {
                    let g = grid[rem % grid.len()];
                    rem /= grid.len();
                    let m = slot / nullity;
                    let d = slot % nullity;
                    let coef = cx(g, 0.0);
                    for p in 0..dim_b {
                        trial[(p, m)] += coef * null_dirs[d][p];
                    }
                }
                let e = coefficient_matrix_to_element(b, c, &trial);
                let (idem, sa) = residuals(&e);
                let score = idem.max(sa);
                if best.as_ref().map(|(s, _)| score < *s).unwrap_or(true) {
                    best = Some((score, e));
                }
            }
            if let Some((score, e)) = best {
                let scale = e.fro_norm().max(1.0);
                if score <= tol * scale * scale {
                    return Ok(e);
                }
            }
        }
        return Err(SolveError::RankDeficient { nullity });
    }

    let e = coefficient_matrix_to_element(b, c, &coeffs);
    let (idem, sa) = residuals(&e);
    let scale = e.fro_norm().max(1.0);
    if idem <= tol * scale * scale && sa <= tol * scale {
        Ok(e)
    } else {
        Err(SolveError::NoSolution {
            candidate: e,
            idempotency: idem,
            self_adjointness: sa,
        })
    }
}

/// A solved and fully populated separability triple (B, C, R, ν) with its
/// idempotent E, derived weight μ = ν∘R⁻¹, and the γ-maps.
#[derive(Debug, Clone)]
pub struct SeparabilityTriple {
    b: Arc<BlockAlgebra>,
    c: Arc<BlockAlgebra>,
    r: LinearMap,
    r_inv: LinearMap,
    nu: Weight,
    mu: Weight,
    e: Element,
    gamma_b: LinearMap,
    gamma_b_inv: LinearMap,
    gamma_c: LinearMap,
    gamma_c_inv: LinearMap,
}

impl SeparabilityTriple {
    pub fn b(&self) -> &Arc<BlockAlgebra> {
        &self.b
    }
    pub fn c(&self) -> &Arc<BlockAlgebra> {
        &self.c
    }
    pub fn r(&self) -> &LinearMap {
        &self.r
    }
    pub fn r_inv(&self) -> &LinearMap {
        &self.r_inv
    }
    pub fn nu(&self) -> &Weight {
        &self.nu
    }
    pub fn mu(&self) -> &Weight {
        &self.mu
    }
    pub fn e(&self) -> &Element {
        &self.e
    }
    pub fn gamma_b(&self) -> &LinearMap {
        &self.gamma_b
    }
    pub fn gamma_c(&self) -> &LinearMap {
        &self.gamma_c
    }
    pub fn gamma_b_inv(&self) -> &LinearMap {
        &self.gamma_b_inv
    }
    pub fn gamma_c_inv(&self) -> &LinearMap {
        &self.gamma_c_inv
    }
}

/// The derived weight μ = ν∘R⁻¹ on C, extracted as a density element.
pub fn pull_back_weight(nu: &Weight, r_inv: &LinearMap) -> Result<Weight> {
    let c = r_inv.domain().clone();
    let mut density = c.zero();
    for (k, &d) in c.block_dims().iter().enumerate() {
        for ci in 0..d {
            for di in 0..d {
                let val = nu.value(&r_inv.apply(&c.basis_unit(k, ci, di)));
                density.block_mut(k)[(di, ci)] = val;
            }
        }
    }
    Weight::new(c, density)
}

/// Result of assembling and verifying a separability triple: the report
/// fragment, and the triple itself when the defining conditions held.
pub struct SepidOutcome {
    pub checks: Vec<Check>,
    pub triple: Option<SeparabilityTriple>,
}

/// Verifies the data (B, C, R, ν), solves for E, compares it with
/// `expected_e` when given, and populates the triple with μ and the γ-maps,
/// cross-checking all four γ formula variants.
pub fn verify_separability(
    b: &Arc<BlockAlgebra>,
    c: &Arc<BlockAlgebra>,
    r: &LinearMap,
    nu: &Weight,
    expected_e: Option<&Element>,
    settings: &RunSettings,
) -> SepidOutcome {
    let tol = settings.tolerance;
    let mut checks = Vec::new();

    checks.extend(check_star_homomorphism(
        "sepid.r",
        |x| r.apply(x),
        b,
        true,
        true,
        tol,
    ));
    let inj_rank = crate::linalg::rank(r.matrix(), 1e-10);
    checks.push(Check::residual(
        "sepid.r.bijective",
        "R is a bijection of B onto C",
        (b.total_dim() - inj_rank) as f64 + (b.total_dim() as f64 - c.total_dim() as f64).abs(),
        tol,
    ));

    let solved = solve_separability_idempotent(b, c, r, nu, tol);
    let e = match solved {
        Ok(e) => {
            checks.push(Check::residual(
                "sepid.solve",
                "E_unique: E solved from (B, ν, R); E = E* = E²",
                0.0,
                tol,
            ));
            e
        }
        Err(err) => {
            let detail = err.to_string();
            checks.push(Check::failed(
                "sepid.solve",
                "E_unique: E solved from (B, ν, R); E = E* = E²",
                tol,
                detail,
            ));
            if let SolveError::NoSolution { candidate, .. } = err {
                let scale = candidate.fro_norm().max(1.0);
                checks.push(Check::residual(
                    "sepid.e_idempotent",
                    "E² = E",
                    candidate.mul(&candidate).distance(&candidate) / (scale * scale),
                    tol,
                ));
                checks.push(Check::residual(
                    "sepid.e_self_adjoint",
                    "E = E*",
                    candidate.distance(&candidate.adjoint()) / scale,
                    tol,
                ));
            }
            return SepidOutcome {
                checks,
                triple: None,
            };
        }
    };

    let scale = e.fro_norm().max(1.0);
    checks.push(Check::residual(
        "sepid.e_idempotent",
        "E² = E",
        e.mul(&e).distance(&e) / (scale * scale),
        tol,
    ));
    checks.push(Check::residual(
        "sepid.e_self_adjoint",
        "E = E*",
        e.distance(&e.adjoint()) / scale,
        tol,
    ));
    if let Some(expected) = expected_e {
        checks.push(Check::residual(
            "sepid.e_matches",
            "solved E agrees with the supplied idempotent",
            e.rel_distance(expected),
            tol,
        ));
    }

    // Defining conditions, re-verified on the solution.
    let slice_one = nu
        .slice_left(&e)
        .map(|s| s.rel_distance(&c.unit()))
        .unwrap_or(f64::INFINITY);
    checks.push(Check::residual(
        "sepid.slice_one",
        "separabilitytriple(1): (ν⊗id)(E) = 1",
        slice_one,
        tol,
    ));
    let mut gamma_def = 0.0f64;
    for up in b.basis() {
        let lhs = nu.slice_left(&e.mul(&kron(&up, &c.unit()))).expect("slice");
        let rhs = r.apply(&nu.modular(cx(0.0, 0.5), &up));
        gamma_def = gamma_def.max(rel(lhs.distance(&rhs), rhs.fro_norm()));
    }
    checks.push(Check::residual(
        "sepid.gamma_defining",
        "separabilitytriple(2): (ν⊗id)(E(b⊗1)) = R(σ^ν_{i/2}(b))",
        gamma_def,
        tol,
    ));

    // Derived weight μ and the γ-maps.
    let r_inv = match r.inverse() {
        Ok(m) => m,
        Err(_) => {
            checks.push(Check::failed(
                "sepid.mu",
                "gammagamma'formuals(2): μ = ν∘R⁻¹",
                tol,
                "R is not invertible".into(),
            ));
            return SepidOutcome {
                checks,
                triple: None,
            };
        }
    };
    let mu = match pull_back_weight(nu, &r_inv) {
        Ok(w) => w,
        Err(err) => {
            checks.push(Check::failed(
                "sepid.mu",
                "gammagamma'formuals(2): μ = ν∘R⁻¹",
                tol,
                format!("μ is not a faithful positive weight: {err}"),
            ));
            return SepidOutcome {
                checks,
                triple: None,
            };
        }
    };
    let mut mu_res = 0.0f64;
    for fc in c.basis() {
        let lhs = mu.value(&fc);
        let rhs = nu.value(&r_inv.apply(&fc));
        mu_res = mu_res.max(rel((lhs - rhs).norm(), rhs.norm()));
    }
    checks.push(Check::residual(
        "sepid.mu",
        "gammagamma'formuals(2): μ = ν∘R⁻¹",
        mu_res,
        tol,
    ));

    let sigma_nu_half = nu.modular_map(cx(0.0, 0.5));
    let sigma_nu_neg_half = nu.modular_map(cx(0.0, -0.5));
    let sigma_mu_half = mu.modular_map(cx(0.0, 0.5));
    let sigma_mu_neg_half = mu.modular_map(cx(0.0, -0.5));

    let gamma_b = r.compose(&sigma_nu_half).expect("gamma_b");
    let gamma_b_inv = sigma_nu_neg_half.compose(&r_inv).expect("gamma_b_inv");
    let gamma_c = r_inv.compose(&sigma_mu_neg_half).expect("gamma_c");
    let gamma_c_inv = sigma_mu_half.compose(r).expect("gamma_c_inv");

    // All four alternative expressions of gammagamma'formuals(1).
    let map_residual = |m1: &LinearMap, m2: &LinearMap| {
        rel(
            crate::linalg::fro_norm(&(m1.matrix() - m2.matrix())),
            crate::linalg::fro_norm(m1.matrix()),
        )
    };
    let cross = [
        map_residual(&gamma_b, &sigma_mu_neg_half.compose(r).expect("cross")),
        map_residual(&gamma_b_inv, &r_inv.compose(&sigma_mu_half).expect("cross")),
        map_residual(&gamma_c, &sigma_nu_half.compose(&r_inv).expect("cross")),
        map_residual(&gamma_c_inv, &r.compose(&sigma_nu_neg_half).expect("cross")),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push(Check::residual(
        "sepid.gamma_cross",
        "gammagamma'formuals(1): γ_B = R∘σ^ν_{i/2} = σ^μ_{-i/2}∘R and companions",
        cross,
        tol,
    ));

    // γ-maps are injective unital anti-homomorphisms.
    let anti_flags = MapFlags {
        anti_multiplicative: true,
        unital: true,
        injective: true,
        ..Default::default()
    };
    let gb = match gamma_b.clone().with_flags(anti_flags) {
        Ok(_) => 0.0,
        Err(Error::FlagViolation { residual, .. }) => residual,
        Err(_) => f64::INFINITY,
    };
    let gc = match gamma_c.clone().with_flags(anti_flags) {
        Ok(_) => 0.0,
        Err(Error::FlagViolation { residual, .. }) => residual,
        Err(_) => f64::INFINITY,
    };
    checks.push(Check::residual(
        "sepid.gamma_anti",
        "gammamap(3)/gamma'map(2): γ_B, γ_C are injective anti-homomorphisms",
        gb.max(gc),
        tol,
    ));

    let triple = SeparabilityTriple {
        b: b.clone(),
        c: c.clone(),
        r: r.clone(),
        r_inv,
        nu: nu.clone(),
        mu,
        e,
        gamma_b,
        gamma_b_inv,
        gamma_c,
        gamma_c_inv,
    };
    SepidOutcome {
        checks,
        triple: Some(triple),
    }
}

/// Strict construction: solves for E (checking it against the supplied one
/// if any) and fails on the first violated condition.
pub fn build_triple(
    b: &Arc<BlockAlgebra>,
    c: &Arc<BlockAlgebra>,
    r: &LinearMap,
    nu: &Weight,
    e: Option<&Element>,
    settings: &RunSettings,
) -> Result<SeparabilityTriple> {
    let outcome = verify_separability(b, c, r, nu, e, settings);
    if let Some(bad) = outcome.checks.iter().find(|ch| !ch.pass) {
        return Err(Error::TripleRejected {
            check: bad.id.clone(),
            residual: bad.residual,
        });
    }
    Ok(outcome.triple.expect("all checks passed"))
}

/// The twelve property sub-checks of a verified separability triple.
pub fn check_sepid_properties(t: &SeparabilityTriple, settings: &RunSettings) -> Vec<Check> {
    let tol = settings.tolerance;
    let mut checks = Vec::new();
    let b_basis = t.b.basis();
    let c_basis = t.c.basis();
    let one_b = t.b.unit();
    let one_c = t.c.unit();
    let e = &t.e;
    let e_scale = e.fro_norm().max(1.0);

    // (a) E(b⊗1) = E(1⊗γ_B(b))
    let mut res = 0.0f64;
    for bb in &b_basis {
        let lhs = e.mul(&kron(bb, &one_c));
        let rhs = e.mul(&kron(&one_b, &t.gamma_b.apply(bb)));
        res = res.max(rel(lhs.distance(&rhs), e_scale));
    }
    checks.push(Check::residual(
        "sepid.props.leg_exchange_b",
        "sepidgamma(1): E(b⊗1) = E(1⊗γ_B(b))",
        res,
        tol,
    ));

    // (b) with c = γ_B(b): E(1⊗c) = E(γ_B⁻¹(c)⊗1)
    let mut res = 0.0f64;
    for bb in &b_basis {
        let cc = t.gamma_b.apply(bb);
        let lhs = e.mul(&kron(&one_b, &cc));
        let rhs = e.mul(&kron(&t.gamma_b_inv.apply(&cc), &one_c));
        res = res.max(rel(lhs.distance(&rhs), e_scale * cc.fro_norm().max(1.0)));
    }
    checks.push(Check::residual(
        "sepid.props.leg_exchange_c",
        "sepidgamma(2): E(1⊗c) = E(γ_B⁻¹(c)⊗1) at c = γ_B(b)",
        res,
        tol,
    ));

    // (c) (id⊗μ)(E) = 1
    let res =
        t.mu.slice_right(e)
            .map(|s| s.rel_distance(&one_b))
            .unwrap_or(f64::INFINITY);
    checks.push(Check::residual(
        "sepid.props.mu_slice_one",
        "gamma'map(1): (id⊗μ)(E) = 1",
        res,
        tol,
    ));

    // (d) (1⊗c)E = (γ_C(c)⊗1)E
    let mut res = 0.0f64;
    for cc in &c_basis {
        let lhs = kron(&one_b, cc).mul(e);
        let rhs = kron(&t.gamma_c.apply(cc), &one_c).mul(e);
        res = res.max(rel(lhs.distance(&rhs), e_scale));
    }
    checks.push(Check::residual(
        "sepid.props.left_leg_exchange",
        "gamma'map(3): (1⊗c)E = (γ_C(c)⊗1)E",
        res,
        tol,
    ));

    // (e) (id⊗μ)((1⊗c)E) = γ_C(c)
    let mut res = 0.0f64;
    for cc in &c_basis {
        let lhs = t.mu.slice_right(&kron(&one_b, cc).mul(e)).expect("slice");
        let rhs = t.gamma_c.apply(cc);
        res = res.max(rel(lhs.distance(&rhs), rhs.fro_norm()));
    }
    checks.push(Check::residual(
        "sepid.props.gamma_c_slice",
        "gamma'map(4): (id⊗μ)((1⊗c)E) = γ_C(c)",
        res,
        tol,
    ));

    // (f) γ_C(γ_B(b)*)* = b
    let mut res = 0.0f64;
    for bb in &b_basis {
        let lhs = t.gamma_c.apply(&t.gamma_b.apply(bb).adjoint()).adjoint();
        res = res.max(rel(lhs.distance(bb), 1.0));
    }
    checks.push(Check::residual(
        "sepid.props.gamma_star",
        "gamma*: γ_C(γ_B(b)*)* = b",
        res,
        tol,
    ));

    // (g) fullness: the four leg spans fill C, C, B, B.
    let mut missing = 0usize;
    let mut detail = Vec::new();
    {
        let span_dim = |elems: &[Element], target: &Arc<BlockAlgebra>| {
            let mut sb = SpanBasis::new(target.total_dim(), 1e-10);
            for el in elems {
                sb.insert(&el.to_coords());
            }
            sb.rank()
        };
        let mut set1 = Vec::new();
        let mut set2 = Vec::new();
        let mut set3 = Vec::new();
        let mut set4 = Vec::new();
        for bb in &b_basis {
            let e_b = e.mul(&kron(bb, &one_c));
            let b_e = kron(bb, &one_c).mul(e);
            for theta in &b_basis {
                let f = crate::weights::Functional::new(t.b.clone(), theta.clone()).unwrap();
                set1.push(f.slice_left(&e_b).expect("slice"));
                set2.push(f.slice_left(&b_e).expect("slice"));
            }
        }
        for cc in &c_basis {
            let c_e = kron(&one_b, cc).mul(e);
            let e_c = e.mul(&kron(&one_b, cc));
            for omega in &c_basis {
                let f = crate::weights::Functional::new(t.c.clone(), omega.clone()).unwrap();
                set3.push(f.slice_right(&c_e).expect("slice"));
                set4.push(f.slice_right(&e_c).expect("slice"));
            }
        }
        for (name, set, target) in [
            ("(θ⊗id)(E(b⊗1))", &set1, &t.c),
            ("(θ⊗id)((b⊗1)E)", &set2, &t.c),
            ("(id⊗ω)((1⊗c)E)", &set3, &t.b),
            ("(id⊗ω)(E(1⊗c))", &set4, &t.b),
        ] {
            let d = span_dim(set, target);
            if d != target.total_dim() {
                missing += target.total_dim() - d;
                detail.push(format!("{name} spans dim {d} of {}", target.total_dim()));
            }
        }
    }
    let mut full = Check::residual(
        "sepid.props.fullness",
        "Efull(3): the four leg spans of E are dense in C, C, B, B",
        missing as f64,
        tol,
    );
    if !detail.is_empty() {
        full = full.with_detail(detail.join("; "));
    }
    checks.push(full);

    // (h) injectivity of the four multiplication-by-E maps.
    let mut nullity = 0usize;
    {
        let rank_of = |images: Vec<Element>| {
            let mut sb = SpanBasis::new(images[0].algebra().total_dim(), 1e-10);
            for el in &images {
                sb.insert(&el.to_coords());
            }
            sb.rank()
        };
        let m1: Vec<Element> = b_basis.iter().map(|bb| e.mul(&kron(bb, &one_c))).collect();
        let m2: Vec<Element> = b_basis.iter().map(|bb| kron(bb, &one_c).mul(e)).collect();
        let m3: Vec<Element> = c_basis.iter().map(|cc| kron(&one_b, cc).mul(e)).collect();
        let m4: Vec<Element> = c_basis.iter().map(|cc| e.mul(&kron(&one_b, cc))).collect();
        nullity += t.b.total_dim() - rank_of(m1);
        nullity += t.b.total_dim() - rank_of(m2);
        nullity += t.c.total_dim() - rank_of(m3);
        nullity += t.c.total_dim() - rank_of(m4);
    }
    checks.push(Check::residual(
        "sepid.props.injectivity",
        "Efull(4): E(b⊗1), (b⊗1)E, (1⊗c)E, E(1⊗c) vanish only at 0",
        nullity as f64,
        tol,
    ));

    // (i) σ^μ_{-i} = γ_B∘γ_C and σ^ν_{-i} = γ_B⁻¹∘γ_C⁻¹
    let mut res = 0.0f64;
    for cc in &c_basis {
        let lhs = t.mu.modular(cx(0.0, -1.0), cc);
        let rhs = t.gamma_b.apply(&t.gamma_c.apply(cc));
        res = res.max(rel(lhs.distance(&rhs), lhs.fro_norm()));
    }
    for bb in &b_basis {
        let lhs = t.nu.modular(cx(0.0, -1.0), bb);
        let rhs = t.gamma_b_inv.apply(&t.gamma_c_inv.apply(bb));
        res = res.max(rel(lhs.distance(&rhs), lhs.fro_norm()));
    }
    checks.push(Check::residual(
        "sepid.props.modular_composition",
        "modularauto: σ^μ_{-i} = γ_B∘γ_C and σ^ν_{-i} = γ_B⁻¹∘γ_C⁻¹",
        res,
        tol,
    ));

    // (j) (σ^ν_t⊗σ^μ_{-t})(E) = E at sampled t
    let mut res = 0.0f64;
    for &ts in &settings.t_samples {
        let lhs = tensor_apply(
            &t.nu.modular_map(cx(ts, 0.0)),
            &t.mu.modular_map(cx(-ts, 0.0)),
            e,
        )
        .expect("tensor apply");
        res = res.max(rel(lhs.distance(e), e_scale));
    }
    checks.push(Check::residual(
        "sepid.props.sigma_invariance",
        "sigmasigmaE: (σ^ν_t⊗σ^μ_{-t})(E) = E",
        res,
        tol,
    ));

    // (k) (γ_C⊗γ_B)(σE) = E and (R⁻¹⊗R)(σE) = E
    let sigma_e = flip(e).expect("flip E");
    let lhs1 = tensor_apply(&t.gamma_c, &t.gamma_b, &sigma_e).expect("tensor apply");
    let lhs2 = tensor_apply(&t.r_inv, &t.r, &sigma_e).expect("tensor apply");
    let res = rel(lhs1.distance(e), e_scale).max(rel(lhs2.distance(e), e_scale));
    checks.push(Check::residual(
        "sepid.props.flip_identities",
        "sigmaE: (γ_C⊗γ_B)(σE) = E and (R⁻¹⊗R)(σE) = E",
        res,
        tol,
    ));

    // (l) the four product identities of thelemma on basis pairs (b, c)
    let mut res = 0.0f64;
    for bb in &b_basis {
        for cc in &c_basis {
            let gb_inv_c = t.gamma_b_inv.apply(cc); // in B
            let gc_inv_b = t.gamma_c_inv.apply(bb); // in C
            let scale = e_scale * gb_inv_c.fro_norm().max(1.0) * gc_inv_b.fro_norm().max(1.0);

            let x1 = kron(&gc_inv_b, &gb_inv_c).mul(&sigma_e);
            let lhs = tensor_apply(&t.gamma_c, &t.gamma_b, &x1).expect("tensor apply");
            let rhs = e.mul(&kron(bb, cc));
            res = res.max(rel(lhs.distance(&rhs), scale));

            let x2 = sigma_e.mul(&kron(&gc_inv_b, &gb_inv_c));
            let lhs = tensor_apply(&t.gamma_c, &t.gamma_b, &x2).expect("tensor apply");
            let rhs = kron(bb, cc).mul(e);
            res = res.max(rel(lhs.distance(&rhs), scale));

            let x3 = kron(&one_c, &gb_inv_c)
                .mul(&sigma_e)
                .mul(&kron(&gc_inv_b, &one_b));
            let lhs = tensor_apply(&t.gamma_c, &t.gamma_b, &x3).expect("tensor apply");
            let rhs = kron(bb, &one_c).mul(e).mul(&kron(&one_b, cc));
            res = res.max(rel(lhs.distance(&rhs), scale));

            let x4 = kron(&gc_inv_b, &one_b)
                .mul(&sigma_e)
                .mul(&kron(&one_c, &gb_inv_c));
            let lhs = tensor_apply(&t.gamma_c, &t.gamma_b, &x4).expect("tensor apply");
            let rhs = kron(&one_b, cc).mul(e).mul(&kron(bb, &one_c));
            res = res.max(rel(lhs.distance(&rhs), scale));
        }
    }
    checks.push(Check::residual(
        "sepid.props.flip_lemma",
        "thelemma: the four (γ_C⊗γ_B) product identities on basis pairs",
        res,
        tol,
    ));

    checks
}
