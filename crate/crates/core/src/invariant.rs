//! Group averaging: the G-twirl, its image (the invariant algebra), charge
//! projectors, and frame independence of the invariant algebra.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, EXHAUSTIVE_ASSOCIATIVITY_MAX};
use crate::linalg::{
    as_permutation, matrix_unit, random_matrix, seeded_rng, vectorize, CMatrix, C64,
};
use crate::report::VerificationReport;
use crate::repr::{block_diag_left, fourier_unitary, IrrepTable, UnitaryRep, CONSTRUCTION_TOL};
use crate::tensor::{
    subspace_equal, BlockMonomial, LabeledOperator, OperatorSubspace, ProductSpace, SpaceMap,
};

use rand::Rng;

/// Spaces up to this dimension get the twirl image of the full matrix-unit
/// basis; larger ones use a randomised range finder.
pub const FULL_BASIS_MAX_DIM: usize = 20;

/// Default cap on the total dimension of any constructed space.
pub const DEFAULT_DIM_BUDGET: usize = 4096;

/// A transversal action `g ↦ V(g)` on a product space.
#[derive(Debug, Clone)]
pub struct TwirlSpec {
    group: Arc<FiniteGroup>,
    space: ProductSpace,
    actions: Vec<SpaceMap>,
}

impl TwirlSpec {
    /// General action from explicit matrices, checked to be a unitary
    /// homomorphism to 1e-10.
    pub fn new(
        group: Arc<FiniteGroup>,
        space: ProductSpace,
        matrices: Vec<CMatrix>,
    ) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::InvalidRepresentation(format!(
                "{} action matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let actions = matrices
            .into_iter()
            .map(|m| SpaceMap::dense(space.clone(), space.clone(), m))
            .collect::<Result<Vec<_>>>()?;
        let spec = Self {
            group,
            space,
            actions,
        };
        spec.check()?;
        Ok(spec)
    }

    /// `V(g) = ⊗_k U_k(g)` over the listed factors. When every factor but
    /// the last acts by permutations the action is stored block-monomially.
    pub fn transversal(group: Arc<FiniteGroup>, factors: &[(&str, &UnitaryRep)]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for (label, rep) in factors {
            if rep.group() != &group {
                return Err(Error::InvalidRepresentation(format!(
                    "factor `{label}` carries a representation of a different group"
                )));
            }
        }
        let space = ProductSpace::new(factors.iter().map(|(l, r)| (l.to_string(), r.dim())))?;
        let last = factors[factors.len() - 1].1;
        let head = &factors[..factors.len() - 1];
        let head_perms: Option<Vec<Vec<Vec<usize>>>> = head
            .iter()
            .map(|(_, r)| r.matrices().iter().map(as_permutation).collect())
            .collect();
        let actions = match head_perms {
            Some(perms) => {
                let head_dims: Vec<usize> = head.iter().map(|(_, r)| r.dim()).collect();
                let nb: usize = head_dims.iter().product();
                group
                    .elements()
                    .map(|g| {
                        // perm sends basis block j to block p(j); the row
                        // block p(j) therefore reads column block j.
                        let mut pattern = vec![0; nb];
                        for j in 0..nb {
                            let mut rem = j;
                            let mut digits = vec![0; head_dims.len()];
                            for k in (0..head_dims.len()).rev() {
                                digits[k] = rem % head_dims[k];
                                rem /= head_dims[k];
                            }
                            let mut target = 0;
                            for k in 0..head_dims.len() {
                                target = target * head_dims[k] + perms[k][g][digits[k]];
                            }
                            pattern[target] = j;
                        }
                        let blocks = vec![last.matrix(g).clone(); nb];
                        let b = BlockMonomial::new(last.dim(), pattern, blocks)?;
                        SpaceMap::block_monomial(space.clone(), space.clone(), b)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None => group
                .elements()
                .map(|g| {
                    let m = factors
                        .iter()
                        .map(|(_, r)| r.matrix(g).clone())
                        .reduce(|a, b| a.kronecker(&b))
                        .unwrap();
                    SpaceMap::dense(space.clone(), space.clone(), m)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let spec = Self {
            group,
            space,
            actions,
        };
        spec.check()?;
        Ok(spec)
    }

    /// `L_A(g) ⊗ U_S(g)` on `[A, S]`.
    pub fn frame_and_system(group: Arc<FiniteGroup>, system: &UnitaryRep) -> Result<Self> {
        let reg = UnitaryRep::regular(group.clone());
        Self::transversal(group, &[("A", &reg), ("S", system)])
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn action(&self, g: usize) -> &SpaceMap {
        &self.actions[g]
    }

    pub fn actions(&self) -> &[SpaceMap] {
        &self.actions
    }

    pub fn action_operators(&self) -> Vec<LabeledOperator> {
        self.actions.iter().map(|a| a.as_operator()).collect()
    }

    fn check(&self) -> Result<()> {
        let n = self.group.order();
        let u = self
            .actions
            .iter()
            .map(|a| a.unitarity_residual())
            .fold(0.0, f64::max);
        let pairs: Vec<(usize, usize)> = if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX {
            (0..n).flat_map(|g| (0..n).map(move |h| (g, h))).collect()
        } else {
            let mut rng = seeded_rng(0x7477);
            (0..2000)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect()
        };
        let mut h: f64 = 0.0;
        for (a, b) in pairs {
            let prod = self.actions[a].after(&self.actions[b])?;
            h = h.max(prod.distance(&self.actions[self.group.mul(a, b)]));
        }
        if !(u <= CONSTRUCTION_TOL && h <= CONSTRUCTION_TOL) {
            return Err(Error::InvalidRepresentation(format!(
                "action on {}: unitarity residual {u:.3e}, homomorphism residual {h:.3e}",
                self.space
            )));
        }
        Ok(())
    }

    fn twirl_matrix(&self, x: &CMatrix) -> CMatrix {
        let n = self.space.dim();
        let mut acc = CMatrix::zeros(n, n);
        for a in &self.actions {
            acc += a.push_matrix(x);
        }
        acc.unscale(self.group.order() as f64)
    }
}

/// `(1/|G|) Σ_g V(g) T V(g)†`.
pub fn g_twirl(op: &LabeledOperator, spec: &TwirlSpec) -> Result<LabeledOperator> {
    if op.space() != spec.space() {
        return Err(Error::SpaceMismatch(format!(
            "operator on {} twirled over {}",
            op.space(),
            spec.space()
        )));
    }
    LabeledOperator::new(spec.space.clone(), spec.twirl_matrix(op.matrix()))
}

/// Image of the twirl, orthonormalised.
///
/// Small spaces twirl every matrix unit. Larger ones twirl batches of
/// seeded random operators, doubling the batch until the image rank falls
/// below the batch size (at which point the batch spans the image with
/// probability one).
pub fn invariant_algebra(spec: &TwirlSpec) -> OperatorSubspace {
    let n = spec.space.dim();
    if n <= FULL_BASIS_MAX_DIM {
        let mut cols = CMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                let t = spec.twirl_matrix(&matrix_unit(n, i, j));
                cols.set_column(j * n + i, &vectorize(&t));
            }
        }
        return OperatorSubspace::from_columns(&spec.space, &cols);
    }
    let mut rng = seeded_rng(0x696e76);
    let mut k = 64usize.min(n * n);
    let mut samples: Vec<CMatrix> = Vec::new();
    loop {
        while samples.len() < k {
            samples.push(spec.twirl_matrix(&random_matrix(&mut rng, n)));
        }
        let sub = OperatorSubspace::span(&spec.space, &samples).expect("matching shapes");
        if sub.dim() < k || k == n * n {
            return sub;
        }
        k = (2 * k).min(n * n);
    }
}

/// Central projectors `P_q = (d_q/|G|) Σ_g conj(χ_q(g)) U(g)` on a single
/// factor named `label`, in irrep-table order.
pub fn charge_projectors(
    rep: &UnitaryRep,
    table: &IrrepTable,
    label: &str,
) -> Result<Vec<LabeledOperator>> {
    table.require_complete()?;
    if rep.group() != table.group() {
        return Err(Error::InvalidRepresentation(
            "representation and irrep table belong to different groups".into(),
        ));
    }
    let n = rep.group().order() as f64;
    let d = rep.dim();
    table
        .irreps()
        .iter()
        .map(|q| {
            let mut p = CMatrix::zeros(d, d);
            for (u, dq) in rep.matrices().iter().zip(&q.matrices) {
                p += u * dq.trace().conj();
            }
            LabeledOperator::single(label, p * C64::new(q.dim as f64 / n, 0.0))
        })
        .collect()
}

/// For the regular action on a single frame: conjugate the twirl of `op`
/// by the Fourier unitary and measure how far it is from
/// `⊕_q I_{d_q}/d_q ⊗ M_q` with `M_q` the left-traced charge block (block
/// projection followed by left-factor depolarisation).
pub fn twirl_block_structure_residual(table: &IrrepTable, op: &CMatrix) -> Result<f64> {
    let group = table.group();
    let n = group.order();
    let f = fourier_unitary(table)?.into_matrix();
    let mut tw = CMatrix::zeros(n, n);
    for g in group.elements() {
        let l = block_diag_left(table, g);
        let l = f.adjoint() * l * &f;
        tw += &l * op * l.adjoint();
    }
    let tw = tw.unscale(n as f64);
    let fb = &f * tw * f.adjoint();
    let mut expected = CMatrix::zeros(n, n);
    for (q, off) in table.irreps().iter().zip(table.sector_offsets()) {
        let d = q.dim;
        let block = fb.view((off, off), (d * d, d * d)).into_owned();
        // tr over the left (colour) index of the d⊗d block.
        let m = CMatrix::from_fn(d, d, |y, y2| {
            (0..d).map(|x| block[(x * d + y, x * d + y2)]).sum()
        });
        let want = CMatrix::identity(d, d).kronecker(&m).unscale(d as f64);
        expected
            .view_mut((off, off), (d * d, d * d))
            .copy_from(&want);
    }
    Ok(crate::linalg::frob_dist(&fb, &expected))
}

/// Frame independence of the invariant algebra: on `E ⊗ F ⊗ Q` with both
/// frames carrying the regular representation, the algebra of `Q`
/// relative to `E` intersected with the algebra of `Q` relative to `F` is
/// `1_E ⊗ 1_F ⊗ (invariant algebra of Q)`.
pub fn common_subalgebra_check(
    system: &UnitaryRep,
    dim_budget: usize,
) -> Result<VerificationReport> {
    let group = system.group().clone();
    let order = group.order();
    let d = system.dim();
    let space = ProductSpace::new([("E", order), ("F", order), ("Q", d)])?;
    if space.dim() > dim_budget {
        return Err(Error::DimBudgetExceeded {
            dim: space.dim(),
            budget: dim_budget,
        });
    }
    let id_g = CMatrix::identity(order, order);
    let conj = |g: usize, t: &CMatrix| {
        let u = system.matrix(g);
        u * t * u.adjoint()
    };
    let mut rel_e = Vec::with_capacity(d * d);
    let mut rel_f = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let t = matrix_unit(d, i, j);
            let mut te = CMatrix::zeros(space.dim(), space.dim());
            let mut tf = te.clone();
            for g in group.elements() {
                let proj = matrix_unit(order, g, g);
                let ut = conj(g, &t);
                te += proj.kronecker(&id_g).kronecker(&ut);
                tf += id_g.kronecker(&proj).kronecker(&ut);
            }
            rel_e.push(te);
            rel_f.push(tf);
        }
    }
    let mut report = VerificationReport::new("common subalgebra");
    let start = std::time::Instant::now();
    let a = OperatorSubspace::span(&space, &rel_e)?;
    let b = OperatorSubspace::span(&space, &rel_f)?;
    let common = a.intersection(&b)?;
    let q_spec = TwirlSpec::transversal(group.clone(), &[("Q", system)])?;
    let inv_q = invariant_algebra(&q_spec);
    let id_ef = CMatrix::identity(order * order, order * order);
    let embedded = inv_q.map(&space, |x| id_ef.kronecker(x))?;
    let (_, residual) = subspace_equal(&common, &embedded)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    report
        .check(
            "common subalgebra equals embedded invariant algebra",
            "largest subalgebra common to both frames",
            residual,
            1e-8,
        )
        .wall_time_ms = elapsed;
    report.check(
        "common subalgebra dimension",
        "largest subalgebra common to both frames",
        (common.dim() as f64 - inv_q.dim() as f64).abs(),
        0.0,
    );
    report.timed(
        "common subalgebra closure",
        "largest subalgebra common to both frames",
        1e-8,
        || common.closure_residual(400),
    );
    Ok(report)
}
