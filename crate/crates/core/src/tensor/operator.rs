use serde::{Deserialize, Serialize};

use super::space::{reorder_indices, Factor, ProductSpace};
use crate::error::{Error, Result};
use crate::linalg::{frob_dist, CMatrix, C64};

/// A square complex matrix acting on a labelled product space.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    space: ProductSpace,
    matrix: CMatrix,
}

/// On-disk form of an operator file: factor list plus row-major
/// `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub space: Vec<Factor>,
    pub entries: Vec<[f64; 2]>,
}

impl LabeledOperator {
    pub fn new(space: ProductSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { space, matrix })
    }

    /// Operator on a fresh single-factor space.
    pub fn single(label: &str, matrix: CMatrix) -> Result<Self> {
        let space = ProductSpace::single(label, matrix.nrows())?;
        Self::new(space, matrix)
    }

    pub fn identity(space: &ProductSpace) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(space: &ProductSpace) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::zeros(n, n),
        }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.map(|z| z * s),
        }
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_space(other)?;
        Ok(frob_dist(&self.matrix, &other.matrix))
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::frob(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        crate::linalg::hermiticity_residual(&self.matrix) <= tol
    }

    /// `self ⊗ other` on the concatenated space.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let space = self.space.tensor(&other.space)?;
        Ok(Self {
            space,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn relabel(&self, renames: &[(&str, &str)]) -> Result<Self> {
        Ok(Self {
            space: self.space.relabel(renames)?,
            matrix: self.matrix.clone(),
        })
    }

    /// Reinterprets the matrix on another space with the same factor
    /// dimensions.
    pub fn on_space(&self, space: &ProductSpace) -> Result<Self> {
        if !self.space.same_shape(space) {
            return Err(Error::SpaceMismatch(format!(
                "{} cannot be relabelled as {}",
                self.space, space
            )));
        }
        Ok(Self {
            space: space.clone(),
            matrix: self.matrix.clone(),
        })
    }

    /// Reorders tensor factors to the given label order.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.space.len() {
            return Err(Error::SpaceMismatch(format!(
                "reorder of {} needs all {} labels",
                self.space,
                self.space.len()
            )));
        }
        let positions = order
            .iter()
            .map(|l| self.space.position(l))
            .collect::<Result<Vec<_>>>()?;
        let space = self.space.select(order)?;
        let map = reorder_indices(&self.space.dims(), &positions);
        let n = self.dim();
        let matrix = CMatrix::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self { space, matrix })
    }

    pub fn embed(&self, target: &ProductSpace) -> Result<Self> {
        embed(self, target)
    }

    pub fn partial_trace(&self, labels: &[&str]) -> Result<Self> {
        partial_trace(self, labels)
    }

    pub fn to_document(&self) -> OperatorDocument {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.matrix[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        OperatorDocument {
            space: self.space.factors().to_vec(),
            entries,
        }
    }

    pub fn from_document(doc: OperatorDocument) -> Result<Self> {
        let space = ProductSpace::from_factors(doc.space)?;
        let n = space.dim();
        if doc.entries.len() != n * n {
            return Err(Error::MalformedDocument(format!(
                "operator on {space} needs {} entries, found {}",
                n * n,
                doc.entries.len()
            )));
        }
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = doc.entries[i * n + j];
            C64::new(re, im)
        });
        Self::new(space, matrix)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("operator serialises")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: OperatorDocument =
            serde_json::from_str(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        Self::from_document(doc)
    }
}

/// Tensors `op` with identities on the factors of `target` it does not
/// cover, then reorders to `target`'s factor order.
pub fn embed(op: &LabeledOperator, target: &ProductSpace) -> Result<LabeledOperator> {
    for f in op.space().factors() {
        let dim = target.factor_dim(&f.label)?;
        if dim != f.dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: f.dim,
            });
        }
    }
    let missing: Vec<Factor> = target
        .factors()
        .iter()
        .filter(|f| !op.space().contains(&f.label))
        .cloned()
        .collect();
    let padded = if missing.is_empty() {
        op.clone()
    } else {
        let rest = ProductSpace::from_factors(missing)?;
        op.kron(&LabeledOperator::identity(&rest))?
    };
    padded.permute(&target.labels())
}

/// Traces out the named factors. The trace of the operator is preserved.
pub fn partial_trace(op: &LabeledOperator, labels: &[&str]) -> Result<LabeledOperator> {
    for l in labels {
        op.space().position(l)?;
    }
    let keep: Vec<&str> = op
        .space()
        .labels()
        .into_iter()
        .filter(|l| !labels.contains(l))
        .collect();
    if keep.is_empty() {
        return Err(Error::SpaceMismatch(
            "partial trace over every factor leaves no space; use trace()".into(),
        ));
    }
    let mut order = keep.clone();
    order.extend(labels.iter().copied());
    let arranged = op.permute(&order)?;
    let kept_space = op.space().select(&keep)?;
    let nk = kept_space.dim();
    let nt = op.dim() / nk;
    let m = arranged.matrix();
    let out = CMatrix::from_fn(nk, nk, |i, j| {
        (0..nt).map(|t| m[(i * nt + t, j * nt + t)]).sum()
    });
    LabeledOperator::new(kept_space, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_matrix, seeded_rng, ONE, ZERO};

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn embed_pads_with_identity() {
        let target = ProductSpace::new([("A", 2), ("S", 3)]).unwrap();
        let x = LabeledOperator::single("A", pauli_x()).unwrap();
        let e = embed(&x, &target).unwrap();
        assert_eq!(e.matrix(), &pauli_x().kronecker(&CMatrix::identity(3, 3)));
        let id = LabeledOperator::identity(&ProductSpace::single("A", 2).unwrap());
        assert_eq!(
            embed(&id, &target).unwrap(),
            LabeledOperator::identity(&target)
        );
    }

    #[test]
    fn embed_reorders_to_target() {
        let mut rng = seeded_rng(5);
        let m = random_matrix(&mut rng, 3);
        let s = LabeledOperator::single("S", m.clone()).unwrap();
        let target = ProductSpace::new([("A", 2), ("S", 3)]).unwrap();
        let e = embed(&s, &target).unwrap();
        assert_eq!(e.matrix(), &CMatrix::identity(2, 2).kronecker(&m));
    }

    #[test]
    fn embed_errors() {
        let target = ProductSpace::new([("A", 2), ("S", 3)]).unwrap();
        let b = LabeledOperator::single("B", pauli_x()).unwrap();
        assert!(matches!(embed(&b, &target), Err(Error::UnknownLabel(_))));
        let wrong = LabeledOperator::single("S", pauli_x()).unwrap();
        assert!(matches!(
            embed(&wrong, &target),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded_rng(6);
        let a = LabeledOperator::single("A", random_matrix(&mut rng, 2)).unwrap();
        let s = LabeledOperator::single("S", random_matrix(&mut rng, 3)).unwrap();
        let prod = a.kron(&s).unwrap();
        let reduced = partial_trace(&prod, &["S"]).unwrap();
        let expected = a.scale(s.trace());
        assert!(reduced.distance(&expected).unwrap() < 1e-12);
        let reduced_a = partial_trace(&prod, &["A"]).unwrap();
        assert!(reduced_a.distance(&s.scale(a.trace())).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let v = crate::linalg::CVector::from_vec(vec![h, ZERO, ZERO, h]);
        let rho = &v * v.adjoint();
        let space = ProductSpace::new([("A", 2), ("B", 2)]).unwrap();
        let op = LabeledOperator::new(space, rho).unwrap();
        let b = partial_trace(&op, &["A"]).unwrap();
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(crate::linalg::frob_dist(b.matrix(), &half) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_index_loop() {
        let mut rng = seeded_rng(7);
        let space = ProductSpace::new([("A", 2), ("B", 2), ("S", 3)]).unwrap();
        let m = random_matrix(&mut rng, 12);
        let op = LabeledOperator::new(space, m.clone()).unwrap();
        let r = partial_trace(&op, &["A", "B"]).unwrap();
        // Index-loop oracle: sum of the diagonal 3×3 blocks.
        let mut expected = CMatrix::zeros(3, 3);
        for blk in 0..4 {
            expected += m.view((3 * blk, 3 * blk), (3, 3));
        }
        assert!(crate::linalg::frob_dist(r.matrix(), &expected) < 1e-12);
        // Tracing a middle factor: oracle over explicit indices.
        let r = partial_trace(&op, &["B"]).unwrap();
        let idx = |a: usize, b: usize, s: usize| a * 6 + b * 3 + s;
        for a in 0..2 {
            for s in 0..3 {
                for a2 in 0..2 {
                    for s2 in 0..3 {
                        let want: C64 = (0..2).map(|b| m[(idx(a, b, s), idx(a2, b, s2))]).sum();
                        assert!((r.matrix()[(a * 3 + s, a2 * 3 + s2)] - want).norm() < 1e-12);
                    }
                }
            }
        }
        assert!((r.trace() - op.trace()).norm() < 1e-12);
    }

    #[test]
    fn document_round_trip() {
        let mut rng = seeded_rng(8);
        let space = ProductSpace::new([("C", 2), ("S|A", 2)]).unwrap();
        let op = LabeledOperator::new(space, random_matrix(&mut rng, 4)).unwrap();
        let back = LabeledOperator::from_json(&op.to_json()).unwrap();
        assert_eq!(back, op);
        let bad = r#"{"space":[{"label":"A","dim":2}],"entries":[[1,0]]}"#;
        assert!(matches!(
            LabeledOperator::from_json(bad),
            Err(Error::MalformedDocument(_))
        ));
    }
}
