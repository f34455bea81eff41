use super::operator::LabeledOperator;
use super::space::ProductSpace;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, orthonormal_span, unvectorize, vectorize, CMatrix, CVector, C64};

/// Mutual projection residual below which two subspaces are considered equal.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// A linear subspace of operators on a fixed space, stored as an
/// orthonormal (Frobenius) basis of column-major vectorised matrices.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    space: ProductSpace,
    columns: CMatrix,
    condition: f64,
}

impl OperatorSubspace {
    /// Span of the given operators. Dependent elements are dropped.
    pub fn span(space: &ProductSpace, ops: &[CMatrix]) -> Result<Self> {
        let n = space.dim();
        let mut stacked = CMatrix::zeros(n * n, ops.len());
        for (k, op) in ops.iter().enumerate() {
            if op.shape() != (n, n) {
                return Err(Error::DimMismatch {
                    expected: n,
                    found: op.nrows(),
                });
            }
            stacked.set_column(k, &vectorize(op));
        }
        Ok(Self::from_columns(space, &stacked))
    }

    pub fn span_operators(space: &ProductSpace, ops: &[LabeledOperator]) -> Result<Self> {
        for op in ops {
            if op.space() != space {
                return Err(Error::SpaceMismatch(format!("{} vs {}", op.space(), space)));
            }
        }
        let mats: Vec<CMatrix> = ops.iter().map(|o| o.matrix().clone()).collect();
        Self::span(space, &mats)
    }

    /// Span of the columns of `vecs` (each an `n²` vectorised operator).
    pub fn from_columns(space: &ProductSpace, vecs: &CMatrix) -> Self {
        let (columns, condition) = orthonormal_span(vecs);
        Self {
            space: space.clone(),
            columns,
            condition,
        }
    }

    /// Already-orthonormal columns, taken as is.
    pub(crate) fn from_orthonormal(space: &ProductSpace, columns: CMatrix) -> Self {
        Self {
            space: space.clone(),
            columns,
            condition: 1.0,
        }
    }

    pub fn full(space: &ProductSpace) -> Self {
        let n = space.dim();
        Self::from_orthonormal(space, CMatrix::identity(n * n, n * n))
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    /// Ratio of the largest to smallest retained singular value of the
    /// spanning set (1 for orthonormal input).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn basis_matrix(&self, k: usize) -> CMatrix {
        unvectorize(self.columns.column(k).as_slice(), self.space.dim())
    }

    pub fn basis(&self) -> Vec<LabeledOperator> {
        (0..self.dim())
            .map(|k| LabeledOperator::new(self.space.clone(), self.basis_matrix(k)).unwrap())
            .collect()
    }

    /// Orthogonal projection of `op` onto the subspace.
    pub fn project(&self, op: &CMatrix) -> CMatrix {
        let v = vectorize(op);
        let p: CVector = &self.columns * (self.columns.adjoint() * v);
        unvectorize(p.as_slice(), self.space.dim())
    }

    /// `‖op − P(op)‖_F`.
    pub fn residual(&self, op: &CMatrix) -> f64 {
        let v = vectorize(op);
        let p = &self.columns * (self.columns.adjoint() * &v);
        (v - p).norm()
    }

    pub fn contains(&self, op: &CMatrix, tol: f64) -> bool {
        self.residual(op) <= tol * op.norm().max(1.0)
    }

    /// Largest residual of projecting the columns of `vecs` onto this span.
    fn max_column_residual(&self, vecs: &CMatrix) -> f64 {
        if vecs.ncols() == 0 {
            return 0.0;
        }
        let proj = &self.columns * (self.columns.adjoint() * vecs);
        let diff = vecs - proj;
        (0..diff.ncols())
            .map(|k| diff.column(k).norm())
            .fold(0.0, f64::max)
    }

    /// Intersection as the nullspace of `[Q_a | −Q_b]`.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let ka = self.dim();
        let kb = other.dim();
        if ka == 0 || kb == 0 {
            return Ok(Self::from_orthonormal(
                &self.space,
                CMatrix::zeros(self.columns.nrows(), 0),
            ));
        }
        let mut stacked = CMatrix::zeros(self.columns.nrows(), ka + kb);
        stacked
            .view_mut((0, 0), (self.columns.nrows(), ka))
            .copy_from(&self.columns);
        stacked
            .view_mut((0, ka), (self.columns.nrows(), kb))
            .copy_from(&(-&other.columns));
        let null = nullspace(&stacked);
        let coeffs = null.rows(0, ka).into_owned();
        Ok(Self::from_columns(&self.space, &(&self.columns * coeffs)))
    }

    /// Span of all pairwise products `a_i b_j`.
    pub fn products(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let a = self.basis_mats();
        let b = other.basis_mats();
        let mut prods = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                prods.push(x * y);
            }
        }
        Self::span(&self.space, &prods)
    }

    fn basis_mats(&self) -> Vec<CMatrix> {
        (0..self.dim()).map(|k| self.basis_matrix(k)).collect()
    }

    /// Largest residual of re-projecting products of basis pairs; small
    /// values mean the span is closed under multiplication.
    pub fn closure_residual(&self, max_pairs: usize) -> f64 {
        let basis = self.basis_mats();
        let k = basis.len();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        'outer: for i in 0..k {
            for j in 0..k {
                if count >= max_pairs {
                    break 'outer;
                }
                // Walk pairs along a stride so a partial scan still mixes
                // distant basis elements.
                let jj = (j + i * 7) % k;
                worst = worst.max(self.residual(&(&basis[i] * &basis[jj])));
                count += 1;
            }
        }
        worst
    }

    /// Largest `‖[a, b]‖_F` over basis pairs.
    pub fn max_commutator(&self, other: &Self) -> Result<f64> {
        self.check_space(other)?;
        let a = self.basis_mats();
        let b = other.basis_mats();
        let mut worst: f64 = 0.0;
        for x in &a {
            for y in &b {
                worst = worst.max((x * y - y * x).norm());
            }
        }
        Ok(worst)
    }

    /// Image under `X ↦ f(X)` applied to each basis element.
    pub fn map<F: Fn(&CMatrix) -> CMatrix>(&self, space: &ProductSpace, f: F) -> Result<Self> {
        let mats: Vec<CMatrix> = self.basis_mats().iter().map(f).collect();
        Self::span(space, &mats)
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.space, other.space
            )));
        }
        Ok(())
    }
}

/// `{T : [T, X] = 0 for all X in gens}` as the nullspace of the stacked
/// commutator map `vec(T) ↦ (I⊗X − Xᵀ⊗I) vec(T)`.
pub fn commutant(gens: &[LabeledOperator]) -> Result<OperatorSubspace> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    let space = first.space().clone();
    let n = space.dim();
    let id = CMatrix::identity(n, n);
    let mut stacked = CMatrix::zeros(n * n * gens.len(), n * n);
    for (k, g) in gens.iter().enumerate() {
        if g.space() != &space {
            return Err(Error::SpaceMismatch(format!("{} vs {}", g.space(), space)));
        }
        let x = g.matrix();
        let block = id.kronecker(x) - x.transpose().kronecker(&id);
        stacked
            .view_mut((k * n * n, 0), (n * n, n * n))
            .copy_from(&block);
    }
    Ok(commutant_from_stack(&space, &stacked))
}

fn commutant_from_stack(space: &ProductSpace, stacked: &CMatrix) -> OperatorSubspace {
    OperatorSubspace::from_orthonormal(space, nullspace(stacked))
}

/// Equality test by mutual projection. Returns the verdict and the largest
/// residual; a dimension mismatch always reports at least 1.
pub fn subspace_equal(a: &OperatorSubspace, b: &OperatorSubspace) -> Result<(bool, f64)> {
    a.check_space(b)?;
    let mut residual = a
        .max_column_residual(&b.columns)
        .max(b.max_column_residual(&a.columns));
    if a.dim() != b.dim() {
        residual = residual.max(1.0);
    }
    Ok((residual < SUBSPACE_TOL, residual))
}

/// Coordinates of `op` in the subspace's orthonormal basis.
pub fn coordinates(sub: &OperatorSubspace, op: &CMatrix) -> Vec<C64> {
    (sub.columns.adjoint() * vectorize(op))
        .iter()
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};

    fn qubit() -> ProductSpace {
        ProductSpace::single("A", 2).unwrap()
    }

    fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let id = LabeledOperator::identity(&ProductSpace::single("A", 3).unwrap());
        assert_eq!(commutant(&[id]).unwrap().dim(), 9);
        assert!(matches!(commutant(&[]), Err(Error::EmptyGenerators)));
    }

    #[test]
    fn commutant_of_exchange() {
        let gens = [
            LabeledOperator::identity(&qubit()),
            LabeledOperator::new(qubit(), x()).unwrap(),
        ];
        let com = commutant(&gens).unwrap();
        assert_eq!(com.dim(), 2);
        let expected = OperatorSubspace::span(&qubit(), &[CMatrix::identity(2, 2), x()]).unwrap();
        let (eq, res) = subspace_equal(&com, &expected).unwrap();
        assert!(eq, "residual {res}");
        assert!(com.closure_residual(100) < 1e-10);
    }

    #[test]
    fn distinct_pauli_spans_differ() {
        let id = CMatrix::identity(2, 2);
        let a = OperatorSubspace::span(&qubit(), &[id.clone(), x()]).unwrap();
        let b = OperatorSubspace::span(&qubit(), &[id, z()]).unwrap();
        let (eq, res) = subspace_equal(&a, &b).unwrap();
        assert!(!eq);
        assert!(res > 0.5);
        let (same, res) = subspace_equal(&a, &a).unwrap();
        assert!(same && res < 1e-14);
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.residual(&CMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn span_drops_dependence_and_projects() {
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]);
        let combo = x().scale(2.0) + &y;
        let s = OperatorSubspace::span(&qubit(), &[x(), y.clone(), combo]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.residual(&(x() - y)) < 1e-12);
        assert!((s.residual(&z()) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = OperatorSubspace::full(&qubit());
        let b = OperatorSubspace::full(&ProductSpace::single("B", 2).unwrap());
        assert!(matches!(
            subspace_equal(&a, &b),
            Err(Error::SpaceMismatch(_))
        ));
    }
}
