//! Two reference frames `A`, `B` and a system `S`: the change of
//! perspective from `A` to `B` and the identities it satisfies.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::invariant::TwirlSpec;
use crate::linalg::{
    frob_dist, frob_inner, permutation_matrix, purity, random_complex, random_matrix, CMatrix,
    CVector, C64,
};
use crate::relative::IDENTITY_TOL;
use crate::report::VerificationReport;
use crate::repr::{right_perm, IrrepTable, UnitaryRep, CONSTRUCTION_TOL};
use crate::tensor::{partial_trace, BlockMonomial, LabeledOperator, ProductSpace, SpaceMap};

/// Tolerance for the factored form and the frame-rotation scenario.
pub const EXACT_TOL: f64 = 1e-10;
/// Relative residual above which an operator is not in `span{R_C(g)}`.
pub const LEFT_INVARIANCE_TOL: f64 = 1e-9;

/// `[A, B, S]` with the perspectives of both frames.
///
/// * Alice: `[C, B|A, S|A]`, reached by `V_A`.
/// * Bob: `[A|B, D, S|B]`, reached by `V_B`.
/// * `S_AB = V_B V_A†` changes from Alice's to Bob's perspective.
#[derive(Debug, Clone)]
pub struct TwoFrameSetup {
    table: IrrepTable,
    system: UnitaryRep,
    standard: ProductSpace,
    alice: ProductSpace,
    bob: ProductSpace,
    v_a: SpaceMap,
    v_b: SpaceMap,
    s_ab: SpaceMap,
}

/// Builds the two-frame maps. The total dimension `|G|²·d_S` must not
/// exceed `dim_budget`.
pub fn build_two_frame(
    table: &IrrepTable,
    system: &UnitaryRep,
    dim_budget: usize,
) -> Result<TwoFrameSetup> {
    let group = table.group().clone();
    if system.group() != &group {
        return Err(Error::InvalidRepresentation(
            "system representation and irrep table belong to different groups".into(),
        ));
    }
    let n = group.order();
    let d = system.dim();
    let dim = n * n * d;
    if dim > dim_budget {
        return Err(Error::DimBudgetExceeded {
            dim,
            budget: dim_budget,
        });
    }
    let standard = ProductSpace::new([("A", n), ("B", n), ("S", d)])?;
    let alice = ProductSpace::new([("C", n), ("B|A", n), ("S|A", d)])?;
    let bob = ProductSpace::new([("A|B", n), ("D", n), ("S|B", d)])?;

    // V_A |g⟩|h⟩|α⟩ = |g⟩_C |g⁻¹h⟩_{B|A} U(g)†|α⟩: row block (g, k) reads
    // column block (g, g k).
    let mut pattern = vec![0; n * n];
    let mut blocks = Vec::with_capacity(n * n);
    for g in 0..n {
        for k in 0..n {
            pattern[g * n + k] = g * n + group.mul(g, k);
            blocks.push(system.matrix(g).adjoint());
        }
    }
    let v_a = SpaceMap::block_monomial(
        standard.clone(),
        alice.clone(),
        BlockMonomial::new(d, pattern, blocks)?,
    )?;

    // V_B |g⟩|h⟩|α⟩ = |h⁻¹g⟩_{A|B} |h⟩_D U(h)†|α⟩: row block (k, h) reads
    // column block (h k, h).
    let mut pattern = vec![0; n * n];
    let mut blocks = Vec::with_capacity(n * n);
    for k in 0..n {
        for h in 0..n {
            pattern[k * n + h] = group.mul(h, k) * n + h;
            blocks.push(system.matrix(h).adjoint());
        }
    }
    let v_b = SpaceMap::block_monomial(
        standard.clone(),
        bob.clone(),
        BlockMonomial::new(d, pattern, blocks)?,
    )?;
    let s_ab = v_b.after(&v_a.adjoint())?;
    let setup = TwoFrameSetup {
        table: table.clone(),
        system: system.clone(),
        standard,
        alice,
        bob,
        v_a,
        v_b,
        s_ab,
    };
    let u = [&setup.v_a, &setup.v_b, &setup.s_ab]
        .iter()
        .map(|m| m.unitarity_residual())
        .fold(0.0, f64::max);
    if !(u <= CONSTRUCTION_TOL) {
        return Err(Error::ValidationFailure(format!(
            "two-frame maps are not unitary (residual {u:.3e})"
        )));
    }
    Ok(setup)
}

impl TwoFrameSetup {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.table.group()
    }

    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn system(&self) -> &UnitaryRep {
        &self.system
    }

    pub fn standard_space(&self) -> &ProductSpace {
        &self.standard
    }

    pub fn alice_space(&self) -> &ProductSpace {
        &self.alice
    }

    pub fn bob_space(&self) -> &ProductSpace {
        &self.bob
    }

    pub fn v_a(&self) -> &SpaceMap {
        &self.v_a
    }

    pub fn v_b(&self) -> &SpaceMap {
        &self.v_b
    }

    pub fn s_ab(&self) -> &SpaceMap {
        &self.s_ab
    }

    pub fn dim(&self) -> usize {
        self.standard.dim()
    }

    fn order(&self) -> usize {
        self.group().order()
    }

    fn d(&self) -> usize {
        self.system.dim()
    }

    /// The transversal action `L_A ⊗ L_B ⊗ U_S` on the standard partition.
    pub fn twirl_spec(&self) -> Result<TwirlSpec> {
        let reg = UnitaryRep::regular(self.group().clone());
        TwirlSpec::transversal(
            self.group().clone(),
            &[("A", &reg), ("B", &reg), ("S", &self.system)],
        )
    }

    /// The action on Alice's side, `L_C ⊗ I ⊗ I`.
    pub fn alice_twirl_spec(&self) -> Result<TwirlSpec> {
        let reg = UnitaryRep::regular(self.group().clone());
        let triv_b = UnitaryRep::trivial(self.group().clone(), self.order());
        let triv_s = UnitaryRep::trivial(self.group().clone(), self.d());
        TwirlSpec::transversal(
            self.group().clone(),
            &[("C", &reg), ("B|A", &triv_b), ("S|A", &triv_s)],
        )
    }

    /// The action on Bob's side, `I ⊗ L_D ⊗ I`.
    pub fn bob_twirl_spec(&self) -> Result<TwirlSpec> {
        let reg = UnitaryRep::regular(self.group().clone());
        let triv_a = UnitaryRep::trivial(self.group().clone(), self.order());
        let triv_s = UnitaryRep::trivial(self.group().clone(), self.d());
        TwirlSpec::transversal(
            self.group().clone(),
            &[("A|B", &triv_a), ("D", &reg), ("S|B", &triv_s)],
        )
    }
}

/// Alice's description to Bob's: `S_AB T S_AB†`.
pub fn transform_operator(op: &LabeledOperator, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    setup.s_ab.push(op)
}

fn check_dim(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::SpaceMismatch(format!(
            "{what} must be {n}×{n}, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `I_C ⊗ I_{B|A} ⊗ T` on Alice's side.
pub fn class1_input(t_s: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_s, setup.d(), "system operator")?;
    let nn = setup.order() * setup.order();
    LabeledOperator::new(
        setup.alice.clone(),
        CMatrix::identity(nn, nn).kronecker(t_s),
    )
}

/// `I_C ⊗ T ⊗ I_{S|A}` on Alice's side.
pub fn class2_input(t_b: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_b, setup.order(), "frame operator")?;
    let n = setup.order();
    let d = setup.d();
    let m = CMatrix::identity(n, n)
        .kronecker(t_b)
        .kronecker(&CMatrix::identity(d, d));
    LabeledOperator::new(setup.alice.clone(), m)
}

/// `T^R ⊗ I_{B|A} ⊗ I_{S|A}` on Alice's side.
pub fn class3_input(t_r: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_r, setup.order(), "frame operator")?;
    let k = setup.order() * setup.d();
    LabeledOperator::new(setup.alice.clone(), t_r.kronecker(&CMatrix::identity(k, k)))
}

/// Bob's description of a system operator held by Alice:
/// `Σ_g |g⟩⟨g|_{A|B} ⊗ I_D ⊗ U(g) T U(g)†`.
pub fn class1_closed_form(t_s: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_s, setup.d(), "system operator")?;
    let n = setup.order();
    let d = setup.d();
    let mut out = CMatrix::zeros(n * n * d, n * n * d);
    for g in 0..n {
        let u = setup.system.matrix(g);
        let b = u * t_s * u.adjoint();
        for x in 0..n {
            let o = (g * n + x) * d;
            out.view_mut((o, o), (d, d)).copy_from(&b);
        }
    }
    LabeledOperator::new(setup.bob.clone(), out)
}

/// Bob's description of an operator on Alice's copy of `B`:
/// `Σ_{h,g} T(h,g) |h⁻¹⟩⟨g⁻¹|_{A|B} ⊗ R_D(h⁻¹g) ⊗ U(h⁻¹g)`.
pub fn class2_closed_form(t_b: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_b, setup.order(), "frame operator")?;
    let group = setup.group();
    let n = setup.order();
    let d = setup.d();
    let mut out = CMatrix::zeros(n * n * d, n * n * d);
    for h in 0..n {
        for g in 0..n {
            let w = t_b[(h, g)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let k = group.mul(group.inv(h), g);
            let u = setup.system.matrix(k) * w;
            let r = right_perm(group, k);
            let (row, col) = (group.inv(h), group.inv(g));
            // R(k)|x⟩ = |x k⁻¹⟩.
            for x in 0..n {
                let ro = (row * n + r[x]) * d;
                let co = (col * n + x) * d;
                let mut view = out.view_mut((ro, co), (d, d));
                view += &u;
            }
        }
    }
    LabeledOperator::new(setup.bob.clone(), out)
}

/// Coefficients `t_k` with `T = Σ_k t_k R(k)`, or
/// [`Error::NotLeftInvariant`] when `T` is not in that span.
pub fn right_regular_coefficients(t_r: &CMatrix, group: &FiniteGroup) -> Result<Vec<C64>> {
    let n = group.order() as f64;
    let rs: Vec<CMatrix> = group
        .elements()
        .map(|k| permutation_matrix(&right_perm(group, k)))
        .collect();
    let coeffs: Vec<C64> = rs.iter().map(|r| frob_inner(r, t_r) / n).collect();
    let mut proj = CMatrix::zeros(t_r.nrows(), t_r.ncols());
    for (r, c) in rs.iter().zip(&coeffs) {
        proj += r * *c;
    }
    let residual = frob_dist(t_r, &proj);
    if !(residual <= LEFT_INVARIANCE_TOL * t_r.norm().max(1.0)) {
        return Err(Error::NotLeftInvariant(residual));
    }
    Ok(coeffs)
}

/// Bob's description of Alice's extra-particle operator `T^R` (which must
/// lie in `span{R_C(g)}`):
/// `Σ_g |g⟩⟨g|_{A|B} ⊗ R_D(g) T^R R_D(g)† ⊗ I`.
pub fn class3_closed_form(t_r: &CMatrix, setup: &TwoFrameSetup) -> Result<LabeledOperator> {
    check_dim(t_r, setup.order(), "frame operator")?;
    let group = setup.group();
    right_regular_coefficients(t_r, group)?;
    let n = setup.order();
    let d = setup.d();
    let id = CMatrix::identity(d, d);
    let mut out = CMatrix::zeros(n * n * d, n * n * d);
    for g in 0..n {
        let r = permutation_matrix(&right_perm(group, g));
        let conj = &r * t_r * r.transpose();
        let o = g * n * d;
        out.view_mut((o, o), (n * d, n * d))
            .copy_from(&conj.kronecker(&id));
    }
    LabeledOperator::new(setup.bob.clone(), out)
}

/// `P · Σ_f |f⟩⟨f|_{B|A} ⊗ R_C(f)† ⊗ U(f)†`, with the parity swap
/// `P|h⟩_C|g⟩_{B|A} = |g⁻¹⟩_{A|B}|h⟩_D`, built independently of `V_A`,
/// `V_B`.
pub fn factored_form(setup: &TwoFrameSetup) -> Result<SpaceMap> {
    let group = setup.group();
    let n = setup.order();
    let d = setup.d();
    // Controlled shift: |c⟩|f⟩ ↦ |c f⟩|f⟩, so row block (x, f) reads
    // column block (x f⁻¹, f).
    let mut pattern = vec![0; n * n];
    let mut blocks = Vec::with_capacity(n * n);
    for x in 0..n {
        for f in 0..n {
            pattern[x * n + f] = group.mul(x, group.inv(f)) * n + f;
            blocks.push(setup.system.matrix(f).adjoint());
        }
    }
    let controlled = SpaceMap::block_monomial(
        setup.alice.clone(),
        setup.alice.clone(),
        BlockMonomial::new(d, pattern, blocks)?,
    )?;
    let swap = parity_swap(setup)?;
    swap.after(&controlled)
}

/// `|h⟩_C |g⟩_{B|A} |α⟩ ↦ |g⁻¹⟩_{A|B} |h⟩_D |α⟩`.
pub fn parity_swap(setup: &TwoFrameSetup) -> Result<SpaceMap> {
    let group = setup.group();
    let n = setup.order();
    let d = setup.d();
    let mut pattern = vec![0; n * n];
    for m in 0..n {
        for h in 0..n {
            pattern[m * n + h] = h * n + group.inv(m);
        }
    }
    let b = BlockMonomial::new(d, pattern, vec![CMatrix::identity(d, d); n * n])?;
    SpaceMap::block_monomial(setup.alice.clone(), setup.bob.clone(), b)
}

/// `‖factored_form − S_AB‖_F`.
pub fn factored_form_residual(setup: &TwoFrameSetup) -> Result<f64> {
    Ok(factored_form(setup)?.distance(&setup.s_ab))
}

/// `D̂ |c⟩_C |h⟩_{B|A} |α⟩ = |h⁻¹⟩_{A|B} |c⟩_D U(h)†|α⟩`: the map that
/// agrees with `S_AB` on the zero-charge sector.
pub fn zero_charge_map(setup: &TwoFrameSetup) -> Result<SpaceMap> {
    let group = setup.group();
    let n = setup.order();
    let d = setup.d();
    let mut pattern = vec![0; n * n];
    let mut blocks = Vec::with_capacity(n * n);
    for m in 0..n {
        for x in 0..n {
            let h = group.inv(m);
            pattern[m * n + x] = x * n + h;
            blocks.push(setup.system.matrix(h).adjoint());
        }
    }
    SpaceMap::block_monomial(
        setup.alice.clone(),
        setup.bob.clone(),
        BlockMonomial::new(d, pattern, blocks)?,
    )
}

/// `Σ_g (L⊗L⊗U)(g) φ`, normalised.
pub fn group_average(phi: &CVector, spec: &TwirlSpec) -> CVector {
    let mut psi = CVector::zeros(phi.len());
    for a in spec.actions() {
        psi += a.apply(phi);
    }
    let norm = psi.norm();
    if norm > 0.0 {
        psi.unscale(norm)
    } else {
        psi
    }
}

/// For one seed state `φ`: the invariance residual of its group average
/// `Ψ` and `‖D̂ V_A Ψ − V_B Ψ‖`. `None` when `φ` averages to zero.
pub fn zero_charge_trial(
    setup: &TwoFrameSetup,
    spec: &TwirlSpec,
    dhat: &SpaceMap,
    phi: &CVector,
) -> Option<(f64, f64)> {
    let psi = group_average(phi, spec);
    if psi.norm() == 0.0 {
        return None;
    }
    let invariance = spec
        .actions()
        .iter()
        .map(|a| (a.apply(&psi) - &psi).norm())
        .fold(0.0, f64::max);
    let lhs = dhat.apply(&setup.v_a.apply(&psi));
    let rhs = setup.v_b.apply(&psi);
    Some((invariance, (lhs - rhs).norm()))
}

/// Invariance of coherently averaged states and agreement of `D̂` with the
/// frame change on them, over `trials` random `φ`.
pub fn zero_charge_check<R: Rng + ?Sized>(
    setup: &TwoFrameSetup,
    trials: usize,
    rng: &mut R,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("zero charge");
    let spec = setup.twirl_spec()?;
    let dhat = zero_charge_map(setup)?;
    let start = std::time::Instant::now();
    let mut invariance: f64 = 0.0;
    let mut agreement: f64 = 0.0;
    let mut done = 0;
    while done < trials {
        let phi = CVector::from_fn(setup.dim(), |_, _| random_complex(rng));
        let Some((inv, agree)) = zero_charge_trial(setup, &spec, &dhat, &phi) else {
            continue;
        };
        invariance = invariance.max(inv);
        agreement = agreement.max(agree);
        done += 1;
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "group-averaged states are invariant",
            "coherent group averaging",
            invariance,
            IDENTITY_TOL * tolerance_scale,
        )
        .wall_time_ms = ms / 2.0;
    report
        .check(
            "zero-charge map agrees with the frame change",
            "zero-charge sector: D̂ V_A |Ψ⟩ = V_B |Ψ⟩",
            agreement,
            IDENTITY_TOL * tolerance_scale,
        )
        .wall_time_ms = ms / 2.0;
    Ok(report)
}

/// Outcome of the frame-rotation scenario.
#[derive(Debug, Clone)]
pub struct FrameRotation {
    /// `S_AB (|e⟩_C ⊗ |φ⟩_{B|A} ⊗ |ψ⟩_{S|A})` in Bob's perspective.
    pub global_state: CVector,
    /// `tr_D` of the global state, on `[A|B, S|B]`.
    pub reduced_state: LabeledOperator,
    /// `Σ_g |φ(g)|² |g⁻¹⟩⟨g⁻¹| ⊗ U(g)†|ψ⟩⟨ψ|U(g)`.
    pub closed_form: LabeledOperator,
    pub reduced_purity: f64,
    /// `Σ_g |φ(g)|⁴`.
    pub predicted_purity: f64,
    pub global_purity: f64,
    pub report: VerificationReport,
}

/// Alice holds a classical frame and sees `B` in `|φ⟩ = Σ_g φ(g)|g⟩` and
/// `S` in `|ψ⟩`; Bob's reduced state on `A|B ⊗ S|B` is mixed, and is
/// purified by the extra particle `D`.
pub fn frame_rotation_demo(
    setup: &TwoFrameSetup,
    phi: &[C64],
    psi: &CVector,
) -> Result<FrameRotation> {
    let group = setup.group();
    let n = setup.order();
    let d = setup.d();
    if phi.len() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: phi.len(),
        });
    }
    if psi.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            found: psi.len(),
        });
    }
    let norm_phi: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if !((norm_phi - 1.0).abs() <= EXACT_TOL) {
        return Err(Error::NotNormalized(norm_phi));
    }
    let norm_psi = psi.norm_squared();
    if !((norm_psi - 1.0).abs() <= EXACT_TOL) {
        return Err(Error::NotNormalized(norm_psi));
    }
    let e = group.identity();
    let mut alice = CVector::zeros(setup.dim());
    for (f, amp) in phi.iter().enumerate() {
        let o = (e * n + f) * d;
        alice.rows_mut(o, d).copy_from(&(psi * *amp));
    }
    let global = setup.s_ab.apply(&alice);
    let global_rho = LabeledOperator::new(setup.bob.clone(), &global * global.adjoint())?;
    let reduced = partial_trace(&global_rho, &["D"])?;

    let mut closed = CMatrix::zeros(n * d, n * d);
    let orbit: Vec<CVector> = group
        .elements()
        .map(|g| setup.system.matrix(g).adjoint() * psi)
        .collect();
    for g in group.elements() {
        let gi = group.inv(g);
        let o = gi * d;
        let b = &orbit[g] * orbit[g].adjoint() * C64::new(phi[g].norm_sqr(), 0.0);
        closed.view_mut((o, o), (d, d)).copy_from(&b);
    }
    let closed = LabeledOperator::new(reduced.space().clone(), closed)?;

    let mut report = VerificationReport::new("frame rotation");
    report.timed(
        "reduced state matches closed form",
        "frame rotation: ρ_{AS|B} = Σ |φ(g)|² |g⁻¹⟩⟨g⁻¹| ⊗ U(g)†|ψ⟩⟨ψ|U(g)",
        EXACT_TOL,
        || reduced.distance(&closed).unwrap(),
    );
    // Frame states |g⁻¹⟩ ⊗ U(g)†|ψ⟩ for distinct g must be orthogonal for
    // the purity formula.
    report.timed(
        "orbit states are orthogonal",
        "frame rotation: distinguishable orbit points",
        EXACT_TOL,
        || {
            let mut worst: f64 = 0.0;
            for g in group.elements() {
                for h in group.elements() {
                    if g != h {
                        let frame = if group.inv(g) == group.inv(h) {
                            1.0
                        } else {
                            0.0
                        };
                        worst = worst.max(frame * orbit[g].dotc(&orbit[h]).norm());
                    }
                }
            }
            worst
        },
    );
    let reduced_purity = purity(reduced.matrix());
    let predicted: f64 = phi.iter().map(|z| z.norm_sqr().powi(2)).sum();
    report.check(
        "reduced purity formula",
        "frame rotation: tr ρ² = Σ |φ(g)|⁴",
        (reduced_purity - predicted).abs(),
        EXACT_TOL,
    );
    let global_purity = purity(global_rho.matrix());
    report.check(
        "global state is pure",
        "frame rotation: purified on the extra particle",
        (global_purity - 1.0).abs(),
        EXACT_TOL,
    );
    Ok(FrameRotation {
        global_state: global,
        reduced_state: reduced,
        closed_form: closed,
        reduced_purity,
        predicted_purity: predicted,
        global_purity,
        report,
    })
}

/// Closed forms, reversibility and invariance preservation on `trials`
/// random inputs per check.
pub fn transform_report<R: Rng + ?Sized>(
    setup: &TwoFrameSetup,
    trials: usize,
    rng: &mut R,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let tol = IDENTITY_TOL * tolerance_scale;
    let mut report = VerificationReport::new("two frames");
    let n = setup.order();
    let d = setup.d();
    report.timed(
        "two-frame maps are unitary",
        "V_A, V_B, S_AB unitary",
        CONSTRUCTION_TOL * tolerance_scale,
        || {
            [&setup.v_a, &setup.v_b, &setup.s_ab]
                .iter()
                .map(|m| m.unitarity_residual())
                .fold(0.0, f64::max)
        },
    );

    let mut run = |name: &str, anchor: &str, f: &mut dyn FnMut() -> Result<f64>| -> Result<()> {
        let start = std::time::Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            worst = worst.max(f()?);
        }
        report.check(name, anchor, worst, tol).wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(())
    };

    let mut class1 = || -> Result<f64> {
        let t = random_matrix(&mut *rng, d);
        let got = transform_operator(&class1_input(&t, setup)?, setup)?;
        got.distance(&class1_closed_form(&t, setup)?)
    };
    run(
        "class 1 closed form",
        "frame change of system operators: Σ |g⟩⟨g| ⊗ I_D ⊗ U(g)TU(g)†",
        &mut class1,
    )?;
    let mut class2 = || -> Result<f64> {
        let t = random_matrix(&mut *rng, n);
        let got = transform_operator(&class2_input(&t, setup)?, setup)?;
        got.distance(&class2_closed_form(&t, setup)?)
    };
    run(
        "class 2 closed form",
        "frame change of frame operators: Σ T(h,g)|h⁻¹⟩⟨g⁻¹| ⊗ R_D(h⁻¹g) ⊗ U(h⁻¹g)",
        &mut class2,
    )?;
    let rs: Vec<CMatrix> = setup
        .group()
        .elements()
        .map(|k| permutation_matrix(&right_perm(setup.group(), k)))
        .collect();
    let mut class3 = || -> Result<f64> {
        let mut t = CMatrix::zeros(n, n);
        for r in &rs {
            t += r * random_complex(&mut *rng);
        }
        let got = transform_operator(&class3_input(&t, setup)?, setup)?;
        got.distance(&class3_closed_form(&t, setup)?)
    };
    run(
        "class 3 closed form",
        "frame change of extra-particle operators: Σ |g⟩⟨g| ⊗ R_D(g)T^R R_D(g)† ⊗ I",
        &mut class3,
    )?;

    let s_ba = setup.v_a.after(&setup.v_b.adjoint())?;
    let mut round_trip = || -> Result<f64> {
        let t = LabeledOperator::new(setup.alice.clone(), random_matrix(&mut *rng, setup.dim()))?;
        let back = s_ba.push(&transform_operator(&t, setup)?)?;
        Ok(back.distance(&t)? / t.norm().max(1.0))
    };
    run(
        "frame change round trip",
        "S_{B→A} S_{A→B} = id",
        &mut round_trip,
    )?;

    let alice_spec = setup.alice_twirl_spec()?;
    let bob_spec = setup.bob_twirl_spec()?;
    let mut invariance = || -> Result<f64> {
        let t = LabeledOperator::new(setup.alice.clone(), random_matrix(&mut *rng, setup.dim()))?;
        let inv = crate::invariant::g_twirl(&t, &alice_spec)?;
        let out = transform_operator(&inv, setup)?;
        let tw = crate::invariant::g_twirl(&out, &bob_spec)?;
        out.distance(&tw)
    };
    run(
        "frame change preserves invariance",
        "invariant operators map to invariant operators",
        &mut invariance,
    )?;

    let s = std::time::Instant::now();
    let r = factored_form_residual(setup)?;
    report
        .check(
            "factored form",
            "parity swap times controlled right shift equals V_B V_A†",
            r,
            EXACT_TOL * tolerance_scale,
        )
        .wall_time_ms = s.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Convenience: element `g` as an amplitude table concentrated on it.
pub fn point_amplitudes(group: &FiniteGroup, g: Element) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); group.order()];
    v[g] = C64::new(1.0, 0.0);
    v
}
