use super::operator::LabeledOperator;
use super::space::ProductSpace;
use crate::error::{Error, Result};
use crate::linalg::{frob_dist, unitarity_residual, CMatrix, CVector};

/// A matrix with exactly one nonzero `block_dim × block_dim` block per
/// block row: row block `i` holds `blocks[i]` at column block `perm[i]`.
///
/// Controlled unitaries and regular-representation actions all have this
/// shape, and conjugation then costs `O(n² · block_dim)` instead of `O(n³)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMonomial {
    block_dim: usize,
    perm: Vec<usize>,
    blocks: Vec<CMatrix>,
}

impl BlockMonomial {
    pub fn new(block_dim: usize, perm: Vec<usize>, blocks: Vec<CMatrix>) -> Result<Self> {
        let nb = perm.len();
        if blocks.len() != nb {
            return Err(Error::DimMismatch {
                expected: nb,
                found: blocks.len(),
            });
        }
        let mut seen = vec![false; nb];
        for &p in &perm {
            if p >= nb || seen[p] {
                return Err(Error::InvalidRepresentation(
                    "block pattern is not a permutation".into(),
                ));
            }
            seen[p] = true;
        }
        for b in &blocks {
            if b.shape() != (block_dim, block_dim) {
                return Err(Error::DimMismatch {
                    expected: block_dim,
                    found: b.nrows(),
                });
            }
        }
        Ok(Self {
            block_dim,
            perm,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.block_dim * self.perm.len()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.block_dim;
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, (&p, b)) in self.perm.iter().zip(&self.blocks).enumerate() {
            m.view_mut((i * d, p * d), (d, d)).copy_from(b);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let nb = self.perm.len();
        let mut perm = vec![0; nb];
        let mut blocks = vec![CMatrix::zeros(0, 0); nb];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            blocks[p] = self.blocks[i].adjoint();
        }
        Self {
            block_dim: self.block_dim,
            perm,
            blocks,
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.block_dim != other.block_dim || self.perm.len() != other.perm.len() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let blocks = self
            .perm
            .iter()
            .zip(&self.blocks)
            .map(|(&p, b)| b * &other.blocks[p])
            .collect();
        Ok(Self {
            block_dim: self.block_dim,
            perm,
            blocks,
        })
    }

    /// `M X M†`, blockwise `B_i X[π i, π j] B_j†`.
    pub fn conjugate(&self, x: &CMatrix) -> CMatrix {
        let d = self.block_dim;
        let nb = self.perm.len();
        let n = self.dim();
        assert_eq!(x.shape(), (n, n), "conjugate shape mismatch");
        // Left multiply: rows of block i come from rows of block π i.
        let mut left = CMatrix::zeros(n, n);
        for i in 0..nb {
            let rows = x.rows(self.perm[i] * d, d);
            left.rows_mut(i * d, d).copy_from(&(&self.blocks[i] * rows));
        }
        let mut out = CMatrix::zeros(n, n);
        for j in 0..nb {
            let cols = left.columns(self.perm[j] * d, d);
            out.columns_mut(j * d, d)
                .copy_from(&(cols * self.blocks[j].adjoint()));
        }
        out
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let d = self.block_dim;
        let mut out = CVector::zeros(self.dim());
        for (i, (&p, b)) in self.perm.iter().zip(&self.blocks).enumerate() {
            out.rows_mut(i * d, d).copy_from(&(b * v.rows(p * d, d)));
        }
        out
    }

    /// Largest per-block unitarity residual (the whole map is unitary
    /// iff every block is).
    pub fn unitarity_residual(&self) -> f64 {
        let sq: f64 = self
            .blocks
            .iter()
            .map(|b| unitarity_residual(b).powi(2))
            .sum();
        sq.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapMatrix {
    Dense(CMatrix),
    Blocks(BlockMonomial),
}

/// A linear map between two product spaces of equal total dimension,
/// applied to operators by conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceMap {
    domain: ProductSpace,
    codomain: ProductSpace,
    matrix: MapMatrix,
}

impl SpaceMap {
    fn checked(domain: ProductSpace, codomain: ProductSpace, matrix: MapMatrix) -> Result<Self> {
        let n = match &matrix {
            MapMatrix::Dense(m) => {
                if m.nrows() != m.ncols() {
                    return Err(Error::DimMismatch {
                        expected: m.nrows(),
                        found: m.ncols(),
                    });
                }
                m.nrows()
            }
            MapMatrix::Blocks(b) => b.dim(),
        };
        for s in [&domain, &codomain] {
            if s.dim() != n {
                return Err(Error::DimMismatch {
                    expected: s.dim(),
                    found: n,
                });
            }
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn dense(domain: ProductSpace, codomain: ProductSpace, m: CMatrix) -> Result<Self> {
        Self::checked(domain, codomain, MapMatrix::Dense(m))
    }

    pub fn block_monomial(
        domain: ProductSpace,
        codomain: ProductSpace,
        b: BlockMonomial,
    ) -> Result<Self> {
        Self::checked(domain, codomain, MapMatrix::Blocks(b))
    }

    /// Identity matrix data with new labels.
    pub fn relabeling(domain: ProductSpace, codomain: ProductSpace) -> Result<Self> {
        if !domain.same_shape(&codomain) {
            return Err(Error::SpaceMismatch(format!(
                "relabeling {domain} as {codomain}"
            )));
        }
        let n = domain.dim();
        let b = BlockMonomial::new(1, (0..n).collect(), vec![CMatrix::identity(1, 1); n])?;
        Self::block_monomial(domain, codomain, b)
    }

    pub fn domain(&self) -> &ProductSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &ProductSpace {
        &self.codomain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn representation(&self) -> &MapMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.matrix {
            MapMatrix::Dense(m) => m.clone(),
            MapMatrix::Blocks(b) => b.to_dense(),
        }
    }

    /// Operator form on the codomain (labels of the codomain, matrix data
    /// of the map).
    pub fn as_operator(&self) -> LabeledOperator {
        LabeledOperator::new(self.codomain.clone(), self.to_dense()).unwrap()
    }

    pub fn adjoint(&self) -> Self {
        let matrix = match &self.matrix {
            MapMatrix::Dense(m) => MapMatrix::Dense(m.adjoint()),
            MapMatrix::Blocks(b) => MapMatrix::Blocks(b.adjoint()),
        };
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix,
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Result<Self> {
        if first.codomain != self.domain {
            return Err(Error::SpaceMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.domain, self.codomain, first.domain, first.codomain
            )));
        }
        let matrix = match (&self.matrix, &first.matrix) {
            (MapMatrix::Blocks(a), MapMatrix::Blocks(b)) if a.block_dim == b.block_dim => {
                MapMatrix::Blocks(a.compose(b)?)
            }
            _ => MapMatrix::Dense(self.to_dense() * first.to_dense()),
        };
        Ok(Self {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        })
    }

    fn conjugate(&self, x: &CMatrix) -> CMatrix {
        match &self.matrix {
            MapMatrix::Dense(m) => m * x * m.adjoint(),
            MapMatrix::Blocks(b) => b.conjugate(x),
        }
    }

    /// `M T M†` for `T` on the domain.
    pub fn push(&self, op: &LabeledOperator) -> Result<LabeledOperator> {
        if op.space() != &self.domain {
            return Err(Error::SpaceMismatch(format!(
                "operator on {} pushed through map from {}",
                op.space(),
                self.domain
            )));
        }
        LabeledOperator::new(self.codomain.clone(), self.conjugate(op.matrix()))
    }

    /// `M† T M` for `T` on the codomain.
    pub fn pull(&self, op: &LabeledOperator) -> Result<LabeledOperator> {
        self.adjoint().push(op)
    }

    /// Raw-matrix conjugation, caller guarantees the shape.
    pub fn push_matrix(&self, x: &CMatrix) -> CMatrix {
        self.conjugate(x)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match &self.matrix {
            MapMatrix::Dense(m) => m * v,
            MapMatrix::Blocks(b) => b.apply(v),
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        match &self.matrix {
            MapMatrix::Dense(m) => unitarity_residual(m),
            MapMatrix::Blocks(b) => b.unitarity_residual(),
        }
    }

    /// Frobenius distance between the matrix data of two maps.
    pub fn distance(&self, other: &Self) -> f64 {
        match (&self.matrix, &other.matrix) {
            (MapMatrix::Blocks(a), MapMatrix::Blocks(b))
                if a.block_dim == b.block_dim && a.perm == b.perm =>
            {
                a.blocks
                    .iter()
                    .zip(&b.blocks)
                    .map(|(x, y)| frob_dist(x, y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
            _ => frob_dist(&self.to_dense(), &other.to_dense()),
        }
    }
}
