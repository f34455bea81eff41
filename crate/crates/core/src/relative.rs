//! One reference frame: relative operators, the refactorisation into the
//! frame's perspective, and the extra particle.

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::invariant::{invariant_algebra, TwirlSpec};
use crate::linalg::{
    frob_dist, hermiticity_residual, matrix_unit, max_abs_dist, permutation_matrix, random_matrix,
    CMatrix, C64,
};
use crate::report::VerificationReport;
use crate::repr::{fourier_unitary, right_perm, IrrepTable, UnitaryRep, CONSTRUCTION_TOL};
use crate::tensor::{
    partial_trace, subspace_equal, BlockMonomial, LabeledOperator, OperatorSubspace, ProductSpace,
    SpaceMap,
};

/// Tolerance for identities checked on random operators.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance for span equalities.
pub const SPAN_TOL: f64 = 1e-8;
/// Tolerance on density-matrix checks.
pub const STATE_TOL: f64 = 1e-10;

/// The frame `A` and system `S` in the standard partition `[A, S]`, and the
/// refactorisation `V` onto the perspective partition `[C, S|A]`.
#[derive(Debug, Clone)]
pub struct FramePerspective {
    table: IrrepTable,
    system: UnitaryRep,
    standard: ProductSpace,
    perspective: ProductSpace,
    v: SpaceMap,
    twirl: TwirlSpec,
    c_twirl: TwirlSpec,
}

/// `V = F ∘ Σ_g |g⟩⟨g|_A ⊗ U(g)†`, where `F` only renames `A → C`,
/// `S → S|A`. Checks unitarity, the gauge image of the transversal action
/// and transport of relative operators; any failure is a
/// [`Error::ValidationFailure`].
pub fn build_perspective(table: &IrrepTable, system: &UnitaryRep) -> Result<FramePerspective> {
    let group = table.group().clone();
    if system.group() != &group {
        return Err(Error::InvalidRepresentation(
            "system representation and irrep table belong to different groups".into(),
        ));
    }
    let order = group.order();
    let d = system.dim();
    let standard = ProductSpace::new([("A", order), ("S", d)])?;
    let perspective = standard.relabel(&[("A", "C"), ("S", "S|A")])?;
    let blocks = group
        .elements()
        .map(|g| system.matrix(g).adjoint())
        .collect();
    let controlled = BlockMonomial::new(d, (0..order).collect(), blocks)?;
    let v = SpaceMap::block_monomial(standard.clone(), perspective.clone(), controlled)?;
    let twirl = TwirlSpec::frame_and_system(group.clone(), system)?;
    let reg = UnitaryRep::regular(group.clone());
    let triv = UnitaryRep::trivial(group.clone(), d);
    let c_twirl = TwirlSpec::transversal(group.clone(), &[("C", &reg), ("S|A", &triv)])?;
    let persp = FramePerspective {
        table: table.clone(),
        system: system.clone(),
        standard,
        perspective,
        v,
        twirl,
        c_twirl,
    };
    let u = persp.v.unitarity_residual();
    if !(u <= CONSTRUCTION_TOL) {
        return Err(Error::ValidationFailure(format!(
            "V is not unitary (residual {u:.3e})"
        )));
    }
    let gi = gauge_image_residual(&persp);
    if !(gi <= CONSTRUCTION_TOL) {
        return Err(Error::ValidationFailure(format!(
            "V·(L⊗U)·V† ≠ L_C⊗I (residual {gi:.3e})"
        )));
    }
    let mut rng = crate::linalg::seeded_rng(0x7065);
    let tr = (0..5)
        .map(|_| transport_residual(&persp, &random_matrix(&mut rng, d)))
        .fold(0.0, f64::max);
    if !(tr <= CONSTRUCTION_TOL) {
        return Err(Error::ValidationFailure(format!(
            "V·relative(T)·V† ≠ I_C⊗T (residual {tr:.3e})"
        )));
    }
    Ok(persp)
}

impl FramePerspective {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.table.group()
    }

    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn system(&self) -> &UnitaryRep {
        &self.system
    }

    pub fn frame_label(&self) -> &str {
        "A"
    }

    pub fn standard_space(&self) -> &ProductSpace {
        &self.standard
    }

    pub fn perspective_space(&self) -> &ProductSpace {
        &self.perspective
    }

    pub fn v(&self) -> &SpaceMap {
        &self.v
    }

    /// The transversal action `L_A ⊗ U_S` on the standard partition.
    pub fn twirl_spec(&self) -> &TwirlSpec {
        &self.twirl
    }

    /// The image of the transversal action, `L_C ⊗ I`, on the perspective
    /// partition.
    pub fn perspective_twirl_spec(&self) -> &TwirlSpec {
        &self.c_twirl
    }

    /// `V T V†`.
    pub fn to_perspective(&self, op: &LabeledOperator) -> Result<LabeledOperator> {
        self.v.push(op)
    }

    /// `V† T V`.
    pub fn to_standard(&self, op: &LabeledOperator) -> Result<LabeledOperator> {
        self.v.pull(op)
    }

    pub fn system_space(&self) -> ProductSpace {
        ProductSpace::single("S", self.system.dim()).unwrap()
    }
}

/// Max over `g` of `|V(L_A(g)⊗U(g))V† − L_C(g)⊗I|` entrywise.
pub fn gauge_image_residual(persp: &FramePerspective) -> f64 {
    gauge_images(persp)
        .iter()
        .map(|(got, want)| max_abs_dist(got, want))
        .fold(0.0, f64::max)
}

fn gauge_images(persp: &FramePerspective) -> Vec<(CMatrix, CMatrix)> {
    let group = persp.group();
    let d = persp.system.dim();
    let vd = persp.v.adjoint();
    group
        .elements()
        .map(|g| {
            let got = persp
                .v
                .after(persp.twirl.action(g))
                .and_then(|m| m.after(&vd))
                .expect("matching spaces")
                .to_dense();
            let l = permutation_matrix(&crate::repr::left_perm(group, g));
            (got, l.kronecker(&CMatrix::identity(d, d)))
        })
        .collect()
}

/// Integer check of the gauge image: entries are rounded to the nearest
/// integer and compared exactly with `L_C(g) ⊗ I`. Returns the largest
/// rounding distance and the number of rounded entries that disagree.
pub fn gauge_image_integer_check(persp: &FramePerspective) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for (got, want) in gauge_images(persp) {
        for (z, w) in got.iter().zip(want.iter()) {
            let r = C64::new(z.re.round(), z.im.round());
            worst = worst.max((z - r).norm());
            if r != *w {
                mismatches += 1;
            }
        }
    }
    (worst, mismatches)
}

/// `Σ_g |g⟩⟨g|_A ⊗ U(g) T_S U(g)†` on `[A, S]`.
pub fn relative_operator(
    t_s: &LabeledOperator,
    persp: &FramePerspective,
) -> Result<LabeledOperator> {
    if t_s.space() != &persp.system_space() {
        return Err(Error::SpaceMismatch(format!(
            "relative operator needs an operator on {}, got {}",
            persp.system_space(),
            t_s.space()
        )));
    }
    let order = persp.group().order();
    let blocks: Vec<CMatrix> = persp
        .group()
        .elements()
        .map(|g| {
            let u = persp.system.matrix(g);
            u * t_s.matrix() * u.adjoint()
        })
        .collect();
    LabeledOperator::new(persp.standard.clone(), block_diagonal(&blocks, order))
}

fn block_diagonal(blocks: &[CMatrix], count: usize) -> CMatrix {
    let d = blocks[0].nrows();
    let mut m = CMatrix::zeros(count * d, count * d);
    for (g, b) in blocks.iter().enumerate() {
        m.view_mut((g * d, g * d), (d, d)).copy_from(b);
    }
    m
}

/// `‖V·relative(T_S)·V† − I_C ⊗ T_S‖_F`.
pub fn transport_residual(persp: &FramePerspective, t_s: &CMatrix) -> f64 {
    let op = LabeledOperator::new(persp.system_space(), t_s.clone()).unwrap();
    let rel = relative_operator(&op, persp).unwrap();
    let pushed = persp.v.push(&rel).unwrap();
    let order = persp.group().order();
    frob_dist(
        pushed.matrix(),
        &CMatrix::identity(order, order).kronecker(t_s),
    )
}

/// Twirl over the frame in the perspective partition, `T_C`.
pub fn twirl_c(op: &LabeledOperator, persp: &FramePerspective) -> Result<LabeledOperator> {
    crate::invariant::g_twirl(op, &persp.c_twirl)
}

/// Explicit form of "refactor, then remove the redundancy":
/// `(1/|G|) Σ_{g′,g} R_C(g′)† R_C(g) ⊗ U(g′)† T(g′,g) U(g)` where `T(g′,g)` is
/// the `(g′, g)` frame block of `T`.
pub fn e_map(op: &LabeledOperator, persp: &FramePerspective) -> Result<LabeledOperator> {
    if op.space() != &persp.standard {
        return Err(Error::SpaceMismatch(format!(
            "e_map needs an operator on {}, got {}",
            persp.standard,
            op.space()
        )));
    }
    let group = persp.group();
    let order = group.order();
    let d = persp.system.dim();
    let rights: Vec<CMatrix> = group
        .elements()
        .map(|g| permutation_matrix(&right_perm(group, g)))
        .collect();
    let m = op.matrix();
    let n = order * d;
    let mut out = CMatrix::zeros(n, n);
    for gp in group.elements() {
        for g in group.elements() {
            let block = m.view((gp * d, g * d), (d, d));
            let s = persp.system.matrix(gp).adjoint() * block * persp.system.matrix(g);
            let r = rights[gp].adjoint() * &rights[g];
            out += r.kronecker(&s);
        }
    }
    LabeledOperator::new(persp.perspective.clone(), out.unscale(order as f64))
}

/// Residuals of `e_map(T)` against `T_C(V T V†)` and `V T_AS(T) V†`.
pub fn e_map_residuals(op: &LabeledOperator, persp: &FramePerspective) -> Result<(f64, f64)> {
    let e = e_map(op, persp)?;
    let a = twirl_c(&persp.v.push(op)?, persp)?;
    let b = persp
        .v
        .push(&crate::invariant::g_twirl(op, &persp.twirl)?)?;
    Ok((e.distance(&a)?, e.distance(&b)?))
}

/// `span{R_C(g′)† R_C(g) ⊗ I_{S|A}}` in the perspective partition.
pub fn extra_particle_basis(persp: &FramePerspective) -> OperatorSubspace {
    let group = persp.group();
    let d = persp.system.dim();
    let perms: Vec<Vec<usize>> = group.elements().map(|g| right_perm(group, g)).collect();
    // Distinct products only; many pairs give the same permutation.
    let mut distinct = BTreeSet::new();
    for a in &perms {
        let mut inv = vec![0; a.len()];
        for (i, &p) in a.iter().enumerate() {
            inv[p] = i;
        }
        for b in &perms {
            let prod: Vec<usize> = b.iter().map(|&p| inv[p]).collect();
            distinct.insert(prod);
        }
    }
    let id = CMatrix::identity(d, d);
    let ops: Vec<CMatrix> = distinct
        .iter()
        .map(|p| permutation_matrix(p).kronecker(&id))
        .collect();
    OperatorSubspace::span(&persp.perspective, &ops).expect("matching shapes")
}

/// `I_C ⊗ L(H_{S|A})`, the relative algebra in the perspective partition.
pub fn relative_algebra_basis(persp: &FramePerspective) -> OperatorSubspace {
    let order = persp.group().order();
    let d = persp.system.dim();
    let id = CMatrix::identity(order, order);
    let ops: Vec<CMatrix> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| id.kronecker(&matrix_unit(d, i, j)))
        .collect();
    OperatorSubspace::span(&persp.perspective, &ops).expect("matching shapes")
}

/// Extra-particle operator in the standard partition, computed directly:
/// `Σ_{g′,g} |g′⟩⟨g′|T^R|g⟩⟨g| ⊗ U(g′)U(g)†`.
pub fn extra_particle_standard_form(t_r: &CMatrix, persp: &FramePerspective) -> CMatrix {
    let group = persp.group();
    let order = group.order();
    let d = persp.system.dim();
    let mut out = CMatrix::zeros(order * d, order * d);
    for gp in group.elements() {
        for g in group.elements() {
            let w = t_r[(gp, g)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let b = persp.system.matrix(gp) * persp.system.matrix(g).adjoint() * w;
            out.view_mut((gp * d, g * d), (d, d)).copy_from(&b);
        }
    }
    out
}

/// `Σ_q m_q²` with `m_q` the multiplicity of irrep `q` in `L ⊗ U`, from
/// characters alone.
pub fn invariant_dimension_oracle(table: &IrrepTable, system: &UnitaryRep) -> Result<usize> {
    let group = table.group();
    let chi: Vec<C64> = group
        .elements()
        .map(|g| {
            let left = if g == group.identity() {
                group.order() as f64
            } else {
                0.0
            };
            system.matrix(g).trace() * left
        })
        .collect();
    Ok(table.multiplicities(&chi)?.iter().map(|m| m * m).sum())
}

/// The state of a frame-plus-system after refactoring and removing the
/// redundancy, split into frame and system parts.
#[derive(Debug, Clone)]
pub struct FrameReduction {
    /// `T_C(V ρ V†)` on `[C, S|A]`.
    pub state: LabeledOperator,
    pub c_state: LabeledOperator,
    pub system_state: LabeledOperator,
    /// `‖state − c_state ⊗ system_state‖_F`.
    pub product_residual: f64,
    /// Weight of each charge sector of `C`, irrep-table order.
    pub sector_weights: Vec<f64>,
    /// Largest `‖ρ_q − I/d_q‖_F` over sectors with non-zero weight, where
    /// `ρ_q` is the normalised right-factor state of sector `q` of `C`.
    pub sector_mixedness_residual: f64,
    /// Norm of the `C` state's coherences between different sectors.
    pub sector_coherence: f64,
}

/// Checks `ρ` is a density matrix to [`STATE_TOL`].
pub fn check_state(rho: &CMatrix) -> Result<()> {
    let h = hermiticity_residual(rho);
    if !(h <= STATE_TOL) {
        return Err(Error::NotAState(format!("hermiticity residual {h:.3e}")));
    }
    let tr = rho.trace();
    if !((tr - C64::new(1.0, 0.0)).norm() <= STATE_TOL) {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let herm = (rho + rho.adjoint()).scale(0.5);
    let min = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(min >= -STATE_TOL) {
        return Err(Error::NotAState(format!("smallest eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Reduces an arbitrary state on `[A, S]`.
pub fn frame_state_reduction(
    rho: &LabeledOperator,
    persp: &FramePerspective,
) -> Result<FrameReduction> {
    if rho.space() != &persp.standard {
        return Err(Error::SpaceMismatch(format!(
            "state on {} for a frame on {}",
            rho.space(),
            persp.standard
        )));
    }
    check_state(rho.matrix())?;
    let state = twirl_c(&persp.v.push(rho)?, persp)?;
    let c_state = partial_trace(&state, &["S|A"])?;
    let system_state = partial_trace(&state, &["C"])?;
    let product_residual = state.distance(&c_state.kron(&system_state)?)?;
    let f = fourier_unitary(&persp.table)?.into_matrix();
    let fc = &f * c_state.matrix() * f.adjoint();
    let mut weights = Vec::new();
    let mut mixed: f64 = 0.0;
    let mut diag_norm_sq = 0.0;
    for (q, off) in persp
        .table
        .irreps()
        .iter()
        .zip(persp.table.sector_offsets())
    {
        let d = q.dim;
        let block = fc.view((off, off), (d * d, d * d)).into_owned();
        diag_norm_sq += block.norm_squared();
        let right = CMatrix::from_fn(d, d, |y, y2| {
            (0..d).map(|x| block[(x * d + y, x * d + y2)]).sum()
        });
        let w = right.trace().re;
        weights.push(w);
        if w > STATE_TOL {
            let id = CMatrix::identity(d, d).unscale(d as f64);
            mixed = mixed.max(frob_dist(&right.unscale(w), &id));
        }
    }
    let sector_coherence = (fc.norm_squared() - diag_norm_sq).max(0.0).sqrt();
    Ok(FrameReduction {
        state,
        c_state,
        system_state,
        product_residual,
        sector_weights: weights,
        sector_mixedness_residual: mixed,
        sector_coherence,
    })
}

/// `T_C ∘ V` applied to the classical frame state `|g0⟩⟨g0|_A ⊗ ρ_S`.
pub fn classical_frame_reduction(
    g0: Element,
    rho_s: &LabeledOperator,
    persp: &FramePerspective,
) -> Result<FrameReduction> {
    persp.group().check_element(g0)?;
    if rho_s.space() != &persp.system_space() {
        return Err(Error::SpaceMismatch(format!(
            "system state on {}, expected {}",
            rho_s.space(),
            persp.system_space()
        )));
    }
    check_state(rho_s.matrix())?;
    let order = persp.group().order();
    let frame = LabeledOperator::single("A", matrix_unit(order, g0, g0))?;
    frame_state_reduction(&frame.kron(rho_s)?, persp)
}

/// Every single-frame identity, on `trials` random operators each.
pub fn perspective_report<R: Rng + ?Sized>(
    persp: &FramePerspective,
    trials: usize,
    rng: &mut R,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let s = tolerance_scale;
    let mut report = VerificationReport::new("perspective");
    let group = persp.group().clone();
    let order = group.order();
    let d = persp.system.dim();
    let n = order * d;

    report.timed(
        "perspective map unitarity",
        "V unitary",
        CONSTRUCTION_TOL * s,
        || persp.v.unitarity_residual(),
    );
    report.timed(
        "gauge image identity",
        "V (L_A ⊗ U_S) V† = L_C ⊗ I",
        1e-12 * s,
        || gauge_image_residual(persp),
    );
    let (_, mismatches) = gauge_image_integer_check(persp);
    report.check(
        "gauge image integer pattern",
        "V (L_A ⊗ U_S) V† = L_C ⊗ I",
        mismatches as f64,
        0.0,
    );

    let samples: Vec<CMatrix> = (0..trials).map(|_| random_matrix(rng, d)).collect();
    report.timed(
        "representation transport",
        "V relative(T) V† = I_C ⊗ T",
        IDENTITY_TOL * s,
        || {
            samples
                .iter()
                .map(|t| transport_residual(persp, t))
                .fold(0.0, f64::max)
        },
    );
    report.timed(
        "relative operators are invariant",
        "relative operators under the transversal twirl",
        IDENTITY_TOL * s,
        || {
            samples
                .iter()
                .map(|t| {
                    let op = LabeledOperator::new(persp.system_space(), t.clone()).unwrap();
                    let rel = relative_operator(&op, persp).unwrap();
                    let tw = crate::invariant::g_twirl(&rel, &persp.twirl).unwrap();
                    rel.distance(&tw).unwrap()
                })
                .fold(0.0, f64::max)
        },
    );
    report.timed(
        "relative map is multiplicative",
        "relative operators form an algebra",
        IDENTITY_TOL * s,
        || {
            samples
                .windows(2)
                .map(|w| {
                    let sp = persp.system_space();
                    let a = LabeledOperator::new(sp.clone(), w[0].clone()).unwrap();
                    let b = LabeledOperator::new(sp, w[1].clone()).unwrap();
                    let ab = relative_operator(&a.product(&b).unwrap(), persp).unwrap();
                    let prod = relative_operator(&a, persp)
                        .unwrap()
                        .product(&relative_operator(&b, persp).unwrap())
                        .unwrap();
                    ab.distance(&prod).unwrap()
                })
                .fold(0.0, f64::max)
        },
    );

    let ops: Vec<LabeledOperator> = (0..trials)
        .map(|_| LabeledOperator::new(persp.standard.clone(), random_matrix(rng, n)).unwrap())
        .collect();
    let start = std::time::Instant::now();
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for op in &ops {
        let (a, b) = e_map_residuals(op, persp)?;
        worst_a = worst_a.max(a);
        worst_b = worst_b.max(b);
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "e_map equals frame twirl after refactorisation",
            "explicit redundancy-removal map: E_A = T_C ∘ V",
            worst_a,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms / 2.0;
    report
        .check(
            "e_map equals refactorisation after twirl",
            "explicit redundancy-removal map: E_A = V ∘ T_AS",
            worst_b,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms / 2.0;

    report.extend(extra_particle_report(persp, s)?);
    Ok(report)
}

/// Commutation, factorisation and standard-partition form of the extra
/// particle.
pub fn extra_particle_report(
    persp: &FramePerspective,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let s = tolerance_scale;
    let mut report = VerificationReport::new("extra particle");
    let start = std::time::Instant::now();
    let extra = extra_particle_basis(persp);
    let rel = relative_algebra_basis(persp);
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "extra particle dimension",
            "extra particle spanned by right-regular operators",
            (extra.dim() as f64 - persp.group().order() as f64).abs(),
            0.0,
        )
        .wall_time_ms = build_ms;
    report.timed(
        "extra particle commutes with relative algebra",
        "[extra particle, S|A] = 0",
        1e-10 * s,
        || extra.max_commutator(&rel).unwrap(),
    );

    let start = std::time::Instant::now();
    let inv = invariant_algebra(&persp.twirl);
    let inv_persp = inv.map(&persp.perspective, |x| persp.v.push_matrix(x))?;
    let products = extra.products(&rel)?;
    let (_, residual) = subspace_equal(&products, &inv_persp)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "invariant algebra factorises",
            "invariant subsystem = S|A ⊗ extra particle",
            residual,
            SPAN_TOL * s,
        )
        .wall_time_ms = ms;
    let oracle = invariant_dimension_oracle(&persp.table, &persp.system)?;
    let dims = [inv.dim(), products.dim()];
    let dim_gap = dims
        .iter()
        .map(|&k| (k as f64 - oracle as f64).abs())
        .fold(0.0, f64::max);
    report
        .check(
            "invariant algebra dimension matches characters",
            "Σ_q m_q² from character multiplicities",
            dim_gap,
            0.0,
        )
        .note = Some(format!(
        "twirl image {}, products {}, character oracle {oracle}",
        dims[0], dims[1]
    ));

    report.timed(
        "extra particle in the standard partition",
        "V† (T^R ⊗ I) V = Σ |g′⟩⟨g′|T^R|g⟩⟨g| ⊗ U(g′)U(g)†",
        IDENTITY_TOL * s,
        || {
            let group = persp.group();
            let d = persp.system.dim();
            group
                .elements()
                .map(|k| {
                    let r = permutation_matrix(&right_perm(group, k));
                    let op = r.kronecker(&CMatrix::identity(d, d));
                    let pulled = persp.v.adjoint().push_matrix(&op);
                    frob_dist(&pulled, &extra_particle_standard_form(&r, persp))
                })
                .fold(0.0, f64::max)
        },
    );
    Ok(report)
}

/// Classical-frame reduction on a sweep of frame elements and random
/// system states.
pub fn classical_frame_report<R: Rng + ?Sized>(
    persp: &FramePerspective,
    rng: &mut R,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let s = tolerance_scale;
    let mut report = VerificationReport::new("classical frame");
    let d = persp.system.dim();
    let start = std::time::Instant::now();
    let mut product: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    for g0 in persp.group().elements() {
        let rho = crate::linalg::random_density(rng, d);
        let rho = LabeledOperator::new(persp.system_space(), rho)?;
        let red = classical_frame_reduction(g0, &rho, persp)?;
        product = product.max(red.product_residual);
        mixed = mixed.max(red.sector_mixedness_residual);
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "classical frame gives a product state",
            "classical frame: extra particle uncorrelated with S|A",
            product,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms / 2.0;
    report
        .check(
            "classical frame leaves the extra particle maximally mixed per sector",
            "classical frame: extra particle maximally mixed",
            mixed,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms / 2.0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_cyclic;
    use crate::linalg::{seeded_rng, ONE, ZERO};
    use crate::repr::cyclic_irreps;

    fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    fn z2_x() -> (IrrepTable, UnitaryRep) {
        let g = Arc::new(build_cyclic(2));
        let table = cyclic_irreps(g.clone()).unwrap();
        let rep = UnitaryRep::new(g, "x", vec![CMatrix::identity(2, 2), x()]).unwrap();
        (table, rep)
    }

    #[test]
    fn z2_perspective_map_by_hand() {
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        let p0 = matrix_unit(2, 0, 0);
        let p1 = matrix_unit(2, 1, 1);
        let want = p0.kronecker(&CMatrix::identity(2, 2)) + p1.kronecker(&x());
        assert_eq!(p.v().to_dense(), want);
        assert_eq!(p.perspective_space().labels(), vec!["C", "S|A"]);
        assert_eq!(gauge_image_integer_check(&p), (0.0, 0));
    }

    #[test]
    fn trivial_system_gives_identity_map() {
        let g = Arc::new(build_cyclic(3));
        let table = cyclic_irreps(g.clone()).unwrap();
        let p = build_perspective(&table, &UnitaryRep::trivial(g, 2)).unwrap();
        assert_eq!(p.v().to_dense(), CMatrix::identity(6, 6));
        let t = LabeledOperator::single("S", z().scale(3.0)).unwrap();
        let rel = relative_operator(&t, &p).unwrap();
        assert_eq!(rel.matrix(), &CMatrix::identity(3, 3).kronecker(t.matrix()));
    }

    #[test]
    fn z2_relative_operator_by_hand() {
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        let t = LabeledOperator::single("S", z()).unwrap();
        let rel = relative_operator(&t, &p).unwrap();
        let want = matrix_unit(2, 0, 0).kronecker(&z()) - matrix_unit(2, 1, 1).kronecker(&z());
        assert!(frob_dist(rel.matrix(), &want) < 1e-15);
        let id = LabeledOperator::single("S", CMatrix::identity(2, 2)).unwrap();
        assert_eq!(
            relative_operator(&id, &p).unwrap(),
            LabeledOperator::identity(p.standard_space())
        );
        let wrong = LabeledOperator::single("A", z()).unwrap();
        assert!(matches!(
            relative_operator(&wrong, &p),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn z2_e_map_of_classical_projector() {
        // |0⟩⟨0| ⊗ I has a single (0, 0) frame block; R†R = I and U(0) = I,
        // so the explicit form gives I_C/2 ⊗ I.
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        let t = LabeledOperator::new(
            p.standard_space().clone(),
            matrix_unit(2, 0, 0).kronecker(&CMatrix::identity(2, 2)),
        )
        .unwrap();
        let e = e_map(&t, &p).unwrap();
        assert!(frob_dist(e.matrix(), &CMatrix::identity(4, 4).scale(0.5)) < 1e-15);
        let (a, b) = e_map_residuals(&t, &p).unwrap();
        assert!(a < 1e-14 && b < 1e-14);
    }

    #[test]
    fn z2_classical_frame_by_hand() {
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        let rho = LabeledOperator::single("S", matrix_unit(2, 0, 0)).unwrap();
        let red = classical_frame_reduction(0, &rho, &p).unwrap();
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(frob_dist(red.c_state.matrix(), &half) < 1e-15);
        assert!(frob_dist(red.system_state.matrix(), &matrix_unit(2, 0, 0)) < 1e-15);
        assert!(red.product_residual < 1e-15);
        assert!(red.sector_mixedness_residual < 1e-15);
        assert!(red.sector_weights.iter().all(|w| (w - 0.5).abs() < 1e-15));
        // On g0 = 1 the system part is rotated back by U(1)† = X.
        let red = classical_frame_reduction(1, &rho, &p).unwrap();
        assert!(frob_dist(red.system_state.matrix(), &matrix_unit(2, 1, 1)) < 1e-15);
    }

    #[test]
    fn non_states_are_rejected() {
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        let bad = LabeledOperator::single("S", z()).unwrap();
        assert!(matches!(
            classical_frame_reduction(0, &bad, &p),
            Err(Error::NotAState(_))
        ));
        let traced = LabeledOperator::single("S", CMatrix::identity(2, 2)).unwrap();
        assert!(matches!(
            classical_frame_reduction(0, &traced, &p),
            Err(Error::NotAState(_))
        ));
    }

    #[test]
    fn z2_extra_particle_is_two_dimensional() {
        let (table, rep) = z2_x();
        let p = build_perspective(&table, &rep).unwrap();
        assert_eq!(extra_particle_basis(&p).dim(), 2);
        let mut rng = seeded_rng(11);
        let r = perspective_report(&p, 10, &mut rng, 1.0).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }
}
