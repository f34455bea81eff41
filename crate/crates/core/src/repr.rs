//! Unitary irreps, general unitary representations, regular
//! representations and the group Fourier transform.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, EXHAUSTIVE_ASSOCIATIVITY_MAX};
use crate::linalg::{frob_dist, permutation_matrix, seeded_rng, unitarity_residual, CMatrix, C64};
use crate::report::VerificationReport;
use crate::tensor::{LabeledOperator, ProductSpace};

use rand::Rng;

/// Construction-level tolerance (unitarity, homomorphism).
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for identities that accumulate a sum over the group.
pub const SUM_TOL: f64 = 1e-8;

const SAMPLED_PAIRS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    /// `matrices[g]` is `D(g)`.
    pub matrices: Vec<CMatrix>,
}

impl Irrep {
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// An ordered list of irreps of one group. Construction only checks shapes;
/// the mathematical invariants are checked by [`validate_irrep_table`].
#[derive(Debug, Clone)]
pub struct IrrepTable {
    group: Arc<FiniteGroup>,
    irreps: Vec<Irrep>,
}

impl IrrepTable {
    pub fn new(group: Arc<FiniteGroup>, irreps: Vec<Irrep>) -> Result<Self> {
        for (i, q) in irreps.iter().enumerate() {
            if irreps[..i].iter().any(|p| p.label == q.label) {
                return Err(Error::DuplicateLabel(q.label.clone()));
            }
            check_shapes(&group, &q.label, q.dim, &q.matrices)?;
        }
        Ok(Self { group, irreps })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn irrep(&self, label: &str) -> Result<&Irrep> {
        self.irreps
            .iter()
            .find(|q| q.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|q| q.dim).collect()
    }

    pub fn dim_square_sum(&self) -> usize {
        self.irreps.iter().map(|q| q.dim * q.dim).sum()
    }

    /// Errors unless `Σ d_q² = |G|`.
    pub fn require_complete(&self) -> Result<()> {
        let sum = self.dim_square_sum();
        if sum != self.group.order() {
            return Err(Error::IncompleteIrrepTable {
                sum,
                order: self.group.order(),
            });
        }
        Ok(())
    }

    /// Row offset of each charge block in the Fourier basis.
    pub fn sector_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.irreps.len());
        let mut acc = 0;
        for q in &self.irreps {
            off.push(acc);
            acc += q.dim * q.dim;
        }
        off
    }

    /// Multiplicity of each irrep in a representation with character `chi`,
    /// `m_q = (1/|G|) Σ_g conj(χ_q(g)) χ(g)`, rounded to the nearest integer
    /// (an error if it is not within 1e-6 of one).
    pub fn multiplicities(&self, chi: &[C64]) -> Result<Vec<usize>> {
        let n = self.group.order() as f64;
        self.irreps
            .iter()
            .map(|q| {
                let m: C64 = q
                    .matrices
                    .iter()
                    .zip(chi)
                    .map(|(d, x)| d.trace().conj() * x)
                    .sum::<C64>()
                    / n;
                let r = m.re.round();
                if (m - C64::new(r, 0.0)).norm() > 1e-6 || r < 0.0 {
                    return Err(Error::InvalidRepresentation(format!(
                        "multiplicity of {} is {m}, not a non-negative integer",
                        q.label
                    )));
                }
                Ok(r as usize)
            })
            .collect()
    }
}

/// A unitary representation `g ↦ U(g)`, checked to be unitary and
/// homomorphic to [`CONSTRUCTION_TOL`] on construction. Need not be
/// irreducible.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: Arc<FiniteGroup>,
    label: String,
    matrices: Vec<CMatrix>,
}

impl UnitaryRep {
    pub fn new(
        group: Arc<FiniteGroup>,
        label: impl Into<String>,
        matrices: Vec<CMatrix>,
    ) -> Result<Self> {
        let label = label.into();
        let dim = matrices.first().map(|m| m.nrows()).unwrap_or(0);
        check_shapes(&group, &label, dim, &matrices)?;
        let u = max_unitarity(&matrices);
        let h = homomorphism_residual(&group, &matrices);
        if !(u <= CONSTRUCTION_TOL && h <= CONSTRUCTION_TOL) {
            return Err(Error::InvalidRepresentation(format!(
                "`{label}`: unitarity residual {u:.3e}, homomorphism residual {h:.3e}"
            )));
        }
        Ok(Self {
            group,
            label,
            matrices,
        })
    }

    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let matrices = vec![CMatrix::identity(dim, dim); group.order()];
        Self {
            group,
            label: format!("trivial{dim}"),
            matrices,
        }
    }

    /// The left-regular representation as a system representation.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let matrices = group
            .elements()
            .map(|g| permutation_matrix(&left_perm(&group, g)))
            .collect();
        Self {
            group,
            label: "regular".into(),
            matrices,
        }
    }

    pub fn from_irrep(group: Arc<FiniteGroup>, irrep: &Irrep) -> Result<Self> {
        Self::new(group, irrep.label.clone(), irrep.matrices.clone())
    }

    pub fn direct_sum(&self, other: &UnitaryRep) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidRepresentation(
                "direct sum of representations of different groups".into(),
            ));
        }
        let (a, b) = (self.dim(), other.dim());
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(x, y)| {
                let mut m = CMatrix::zeros(a + b, a + b);
                m.view_mut((0, 0), (a, a)).copy_from(x);
                m.view_mut((a, a), (b, b)).copy_from(y);
                m
            })
            .collect();
        Ok(Self {
            group: self.group.clone(),
            label: format!("{}+{}", self.label, other.label),
            matrices,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrix(&self, g: Element) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        let id = CMatrix::identity(self.dim(), self.dim());
        self.matrices.iter().all(|m| *m == id)
    }
}

fn check_shapes(group: &FiniteGroup, label: &str, dim: usize, matrices: &[CMatrix]) -> Result<()> {
    if matrices.len() != group.order() {
        return Err(Error::InvalidRepresentation(format!(
            "`{label}` has {} matrices for a group of order {}",
            matrices.len(),
            group.order()
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidRepresentation(format!(
            "`{label}` has dimension 0"
        )));
    }
    for m in matrices {
        if m.shape() != (dim, dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: m.nrows().max(m.ncols()),
            });
        }
    }
    Ok(())
}

fn max_unitarity(matrices: &[CMatrix]) -> f64 {
    matrices.iter().map(unitarity_residual).fold(0.0, f64::max)
}

/// `max ‖D(g)D(h) − D(gh)‖_F`, exhaustive for small groups, sampled above.
fn homomorphism_residual(group: &FiniteGroup, matrices: &[CMatrix]) -> f64 {
    let n = group.order();
    let pair =
        |g: usize, h: usize| frob_dist(&(&matrices[g] * &matrices[h]), &matrices[group.mul(g, h)]);
    if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX {
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                worst = worst.max(pair(g, h));
            }
        }
        worst
    } else {
        let mut rng = seeded_rng(0x6f6d);
        (0..SAMPLED_PAIRS)
            .map(|_| pair(rng.random_range(0..n), rng.random_range(0..n)))
            .fold(0.0, f64::max)
    }
}

/// Checks every irrep and table invariant and reports the residuals.
///
/// Entries: per-irrep unitarity and homomorphism (1e-10) and
/// irreducibility (1e-8), then completeness (exact) and Schur
/// orthogonality (1e-8).
pub fn validate_irrep_table(table: &IrrepTable) -> VerificationReport {
    let mut report = VerificationReport::new("validate");
    let group = table.group();
    let n = group.order();
    for q in table.irreps() {
        report.timed(
            &format!("irrep unitarity [{}]", q.label),
            "unitary irrep matrices",
            CONSTRUCTION_TOL,
            || max_unitarity(&q.matrices),
        );
        report.timed(
            &format!("irrep homomorphism [{}]", q.label),
            "D(g)D(h) = D(gh)",
            CONSTRUCTION_TOL,
            || homomorphism_residual(group, &q.matrices),
        );
        report.timed(
            &format!("irreducibility [{}]", q.label),
            "(1/|G|) Σ|χ(g)|² = 1",
            SUM_TOL,
            || {
                let s: f64 = q.character().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
                (s - 1.0).abs()
            },
        );
    }
    report.timed("completeness", "Σ d_q² = |G|", 0.0, || {
        (table.dim_square_sum() as f64 - n as f64).abs()
    });
    report.timed(
        "schur orthogonality",
        "(1/|G|) Σ D^q_xy conj(D^q'_x'y') = δ/d_q",
        SUM_TOL,
        || schur_residual(table),
    );
    report
}

/// Largest entrywise deviation of the Schur orthogonality Gram matrix from
/// `diag(1/d_q)`.
fn schur_residual(table: &IrrepTable) -> f64 {
    let n = table.group().order();
    let rows: usize = table.dim_square_sum();
    let mut a = CMatrix::zeros(rows, n);
    let mut target = vec![0.0; rows];
    let mut row = 0;
    for q in table.irreps() {
        for x in 0..q.dim {
            for y in 0..q.dim {
                for g in 0..n {
                    a[(row, g)] = q.matrices[g][(x, y)];
                }
                target[row] = 1.0 / q.dim as f64;
                row += 1;
            }
        }
    }
    let gram = (&a * a.adjoint()).unscale(n as f64);
    let mut worst: f64 = 0.0;
    for i in 0..rows {
        for j in 0..rows {
            let want = if i == j { target[i] } else { 0.0 };
            worst = worst.max((gram[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// `perm[h] = g·h`.
pub fn left_perm(group: &FiniteGroup, g: Element) -> Vec<usize> {
    group.elements().map(|h| group.mul(g, h)).collect()
}

/// `perm[h] = h·g⁻¹`.
pub fn right_perm(group: &FiniteGroup, g: Element) -> Vec<usize> {
    let gi = group.inv(g);
    group.elements().map(|h| group.mul(h, gi)).collect()
}

/// `L(g)|h⟩ = |gh⟩` on a single factor named `label`.
pub fn regular_left(group: &FiniteGroup, g: Element, label: &str) -> Result<LabeledOperator> {
    group.check_element(g)?;
    LabeledOperator::single(label, permutation_matrix(&left_perm(group, g)))
}

/// `R(g)|h⟩ = |hg⁻¹⟩` on a single factor named `label`.
pub fn regular_right(group: &FiniteGroup, g: Element, label: &str) -> Result<LabeledOperator> {
    group.check_element(g)?;
    LabeledOperator::single(label, permutation_matrix(&right_perm(group, g)))
}

/// The Fourier unitary `⟨q;x,y|F|g⟩ = sqrt(d_q/|G|) D^q_xy(g)` on a single
/// factor `A`. Rows are grouped by irrep in table order, `(x, y)`
/// row-major inside each block.
pub fn fourier_unitary(table: &IrrepTable) -> Result<LabeledOperator> {
    let report = validate_irrep_table(table);
    if !report.passed() {
        let names: Vec<&str> = report.failures().map(|e| e.name.as_str()).collect();
        return Err(Error::InvalidTable(names.join(", ")));
    }
    let n = table.group().order();
    let mut f = CMatrix::zeros(n, n);
    let mut row = 0;
    for q in table.irreps() {
        let scale = (q.dim as f64 / n as f64).sqrt();
        for x in 0..q.dim {
            for y in 0..q.dim {
                for g in 0..n {
                    f[(row, g)] = q.matrices[g][(x, y)] * scale;
                }
                row += 1;
            }
        }
    }
    LabeledOperator::single("A", f)
}

/// `⊕_q D^q(g) ⊗ I_{d_q}`, the left-regular action in the Fourier basis.
pub fn block_diag_left(table: &IrrepTable, g: Element) -> CMatrix {
    block_diag(table, |q| {
        q.matrices[g].kronecker(&CMatrix::identity(q.dim, q.dim))
    })
}

/// `⊕_q I_{d_q} ⊗ conj(D^q(g))`, the right-regular action in the Fourier
/// basis.
pub fn block_diag_right(table: &IrrepTable, g: Element) -> CMatrix {
    block_diag(table, |q| {
        CMatrix::identity(q.dim, q.dim).kronecker(&q.matrices[g].conjugate())
    })
}

fn block_diag<F: Fn(&Irrep) -> CMatrix>(table: &IrrepTable, block: F) -> CMatrix {
    let n = table.dim_square_sum();
    let mut out = CMatrix::zeros(n, n);
    for (q, off) in table.irreps().iter().zip(table.sector_offsets()) {
        let d2 = q.dim * q.dim;
        out.view_mut((off, off), (d2, d2)).copy_from(&block(q));
    }
    out
}

/// The regular representation's space as a single factor.
pub fn regular_space(group: &FiniteGroup, label: &str) -> ProductSpace {
    ProductSpace::single(label, group.order()).expect("non-empty group")
}

// --- file formats ---------------------------------------------------------

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepDocument {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<MatrixDoc>,
}

/// Irrep file: the group name and the ordered irreps, each with one
/// matrix per element (element-indexed as in the group file).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepTableDocument {
    #[serde(default)]
    pub group: Option<String>,
    pub irreps: Vec<IrrepDocument>,
}

/// Representation file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepDocument {
    #[serde(default)]
    pub group: Option<String>,
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<MatrixDoc>,
}

fn matrix_from_doc(doc: &MatrixDoc, dim: usize, what: &str) -> Result<CMatrix> {
    if doc.len() != dim || doc.iter().any(|r| r.len() != dim) {
        return Err(Error::MalformedDocument(format!(
            "{what}: expected a {dim}×{dim} matrix"
        )));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = doc[i][j];
        C64::new(re, im)
    }))
}

fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn matrices_from_doc(
    group: &FiniteGroup,
    docs: &[MatrixDoc],
    dim: usize,
    label: &str,
) -> Result<Vec<CMatrix>> {
    if docs.len() != group.order() {
        return Err(Error::MalformedDocument(format!(
            "`{label}` lists {} matrices for a group of order {}",
            docs.len(),
            group.order()
        )));
    }
    docs.iter()
        .enumerate()
        .map(|(g, d)| matrix_from_doc(d, dim, &format!("`{label}` element {g}")))
        .collect()
}

pub fn load_irrep_table(group: Arc<FiniteGroup>, source: &str) -> Result<IrrepTable> {
    let doc: IrrepTableDocument =
        serde_json::from_str(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    let irreps = doc
        .irreps
        .iter()
        .map(|q| {
            if q.dim == 0 {
                return Err(Error::MalformedDocument(format!(
                    "`{}` has dimension 0",
                    q.label
                )));
            }
            Ok(Irrep {
                label: q.label.clone(),
                dim: q.dim,
                matrices: matrices_from_doc(&group, &q.matrices, q.dim, &q.label)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    IrrepTable::new(group, irreps)
}

pub fn load_rep(group: Arc<FiniteGroup>, source: &str) -> Result<UnitaryRep> {
    let doc: RepDocument =
        serde_json::from_str(source).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    if doc.dim == 0 {
        return Err(Error::MalformedDocument(format!(
            "`{}` has dimension 0",
            doc.label
        )));
    }
    let matrices = matrices_from_doc(&group, &doc.matrices, doc.dim, &doc.label)?;
    UnitaryRep::new(group, doc.label, matrices)
}

pub fn irrep_table_to_json(table: &IrrepTable) -> String {
    let doc = IrrepTableDocument {
        group: Some(table.group().name().to_string()),
        irreps: table
            .irreps()
            .iter()
            .map(|q| IrrepDocument {
                label: q.label.clone(),
                dim: q.dim,
                matrices: q.matrices.iter().map(matrix_to_doc).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("irreps serialise")
}

pub fn rep_to_json(rep: &UnitaryRep) -> String {
    let doc = RepDocument {
        group: Some(rep.group().name().to_string()),
        label: rep.label().to_string(),
        dim: rep.dim(),
        matrices: rep.matrices().iter().map(matrix_to_doc).collect(),
    };
    serde_json::to_string(&doc).expect("rep serialises")
}

/// Characters of `Z_n`, `χ_k(g) = exp(2πi kg/n)`, as an irrep table.
pub fn cyclic_irreps(group: Arc<FiniteGroup>) -> Result<IrrepTable> {
    let n = group.order();
    let irreps = (0..n)
        .map(|k| Irrep {
            label: format!("k{k}"),
            dim: 1,
            matrices: (0..n)
                .map(|g| {
                    let t = 2.0 * std::f64::consts::PI * ((k * g) % n) as f64 / n as f64;
                    CMatrix::from_element(1, 1, C64::from_polar(1.0, t))
                })
                .collect(),
        })
        .collect();
    IrrepTable::new(group, irreps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_cyclic;
    use crate::linalg::{c, ONE, ZERO};

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(build_cyclic(2))
    }

    #[test]
    fn z2_fourier_is_hadamard() {
        let t = cyclic_irreps(z2()).unwrap();
        let f = fourier_unitary(&t).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        assert!(frob_dist(f.matrix(), &want) < 1e-15);
    }

    #[test]
    fn cyclic_fourier_is_dft() {
        for n in [3usize, 5, 6] {
            let t = cyclic_irreps(Arc::new(build_cyclic(n))).unwrap();
            let f = fourier_unitary(&t).unwrap();
            let s = 1.0 / (n as f64).sqrt();
            for k in 0..n {
                for g in 0..n {
                    let w =
                        C64::from_polar(s, 2.0 * std::f64::consts::PI * (k * g) as f64 / n as f64);
                    assert!((f.matrix()[(k, g)] - w).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn regular_reps() {
        let g = build_cyclic(2);
        assert_eq!(
            regular_left(&g, 0, "A").unwrap(),
            LabeledOperator::identity(&regular_space(&g, "A"))
        );
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert_eq!(regular_left(&g, 1, "A").unwrap().matrix(), &x);
        assert!(matches!(
            regular_left(&g, 2, "A"),
            Err(Error::IndexOutOfRange { .. })
        ));
        let z4 = build_cyclic(4);
        for a in 0..4 {
            assert_eq!(
                regular_right(&z4, a, "A").unwrap(),
                regular_left(&z4, z4.inv(a), "A").unwrap()
            );
        }
    }

    #[test]
    fn missing_character_fails_completeness() {
        let t = cyclic_irreps(Arc::new(build_cyclic(3))).unwrap();
        let partial = IrrepTable::new(t.group().clone(), t.irreps()[..2].to_vec()).unwrap();
        let r = validate_irrep_table(&partial);
        assert!(!r.passed());
        assert!(!r.entry("completeness").unwrap().pass);
        assert!(matches!(
            partial.require_complete(),
            Err(Error::IncompleteIrrepTable { sum: 2, order: 3 })
        ));
        assert!(matches!(
            fourier_unitary(&partial),
            Err(Error::InvalidTable(_))
        ));
    }

    #[test]
    fn rep_validation() {
        let g = z2();
        let bad = vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2).scale(2.0)];
        assert!(matches!(
            UnitaryRep::new(g.clone(), "bad", bad),
            Err(Error::InvalidRepresentation(_))
        ));
        let reg = UnitaryRep::regular(g.clone());
        let t = cyclic_irreps(g.clone()).unwrap();
        assert_eq!(t.multiplicities(&reg.character()).unwrap(), vec![1, 1]);
        let sum = UnitaryRep::trivial(g.clone(), 1).direct_sum(&reg).unwrap();
        assert_eq!(t.multiplicities(&sum.character()).unwrap(), vec![2, 1]);
    }

    #[test]
    fn document_round_trip() {
        let t = cyclic_irreps(Arc::new(build_cyclic(3))).unwrap();
        let back = load_irrep_table(t.group().clone(), &irrep_table_to_json(&t)).unwrap();
        assert_eq!(back.irreps(), t.irreps());
        let reg = UnitaryRep::regular(t.group().clone());
        let r = load_rep(t.group().clone(), &rep_to_json(&reg)).unwrap();
        assert_eq!(r.matrices(), reg.matrices());
        assert!(matches!(
            load_rep(
                t.group().clone(),
                r#"{"label":"x","dim":1,"matrices":[[[[1,0]]]]}"#
            ),
            Err(Error::MalformedDocument(_))
        ));
    }
}
