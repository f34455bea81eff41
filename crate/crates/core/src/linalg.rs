//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative singular-value cutoff for every rank decision.
pub const RANK_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Frobenius norm.
pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius distance, `‖a − b‖_F`.
pub fn frob_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "frob_dist shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Frobenius inner product `tr(a† b)`.
pub fn frob_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `‖m m† − 1‖_F`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    frob_dist(&(m * m.adjoint()), &CMatrix::identity(n, n))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    frob_dist(m, &m.adjoint())
}

/// Column-major vectorisation.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &[C64], n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v)
}

/// `|i⟩⟨j|` on an `n`-dimensional space.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Permutation matrix sending basis vector `j` to `perm[j]`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = ONE;
    }
    m
}

/// Detects an exact 0/1 permutation matrix and returns `perm` with
/// `m e_j = e_{perm[j]}`.
pub fn as_permutation(m: &CMatrix) -> Option<Vec<usize>> {
    let n = m.nrows();
    if m.ncols() != n {
        return None;
    }
    let mut perm = vec![usize::MAX; n];
    let mut hit = vec![false; n];
    for j in 0..n {
        for i in 0..n {
            let z = m[(i, j)];
            if z == ONE {
                if perm[j] != usize::MAX || hit[i] {
                    return None;
                }
                perm[j] = i;
                hit[i] = true;
            } else if z != ZERO {
                return None;
            }
        }
        if perm[j] == usize::MAX {
            return None;
        }
    }
    Some(perm)
}

/// Orthonormal basis (as columns) for the column span of `a`, with the
/// conditioning of the kept part (`σ_max / σ_min` over retained singular
/// values).
pub fn orthonormal_span(a: &CMatrix) -> (CMatrix, f64) {
    let (rows, cols) = a.shape();
    if cols == 0 || rows == 0 {
        return (CMatrix::zeros(rows, 0), 1.0);
    }
    // Thin QR first so the SVD only sees a cols×cols factor.
    let (q, r) = if rows > cols {
        let qr = a.clone().qr();
        (Some(qr.q()), qr.r())
    } else {
        (None, a.clone())
    };
    let svd = r.svd(true, false);
    let u = svd.u.expect("svd with u");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return (CMatrix::zeros(rows, 0), 1.0);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > RANK_TOL * smax).collect();
    let smin = keep.iter().map(|&k| sv[k]).fold(f64::INFINITY, f64::min);
    let mut basis = CMatrix::zeros(u.nrows(), keep.len());
    for (col, &k) in keep.iter().enumerate() {
        basis.set_column(col, &u.column(k));
    }
    let basis = match q {
        Some(q) => q * basis,
        None => basis,
    };
    (basis, smax / smin)
}

/// Orthonormal basis (as columns) of the right nullspace of `a`, using the
/// relative cutoff [`RANK_TOL`].
pub fn nullspace(a: &CMatrix) -> CMatrix {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let r = if rows > cols {
        a.clone().qr().r()
    } else if rows < cols {
        // Pad so the SVD returns a complete right factor.
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("svd with v_t");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let null: Vec<usize> = (0..sv.len())
        .filter(|&k| smax == 0.0 || sv[k] <= RANK_TOL * smax)
        .collect();
    let mut out = CMatrix::zeros(cols, null.len());
    for (col, &k) in null.iter().enumerate() {
        let row = v_t.row(k);
        for i in 0..cols {
            out[(i, col)] = row[i].conj();
        }
    }
    out
}

/// Numerical rank with the relative cutoff [`RANK_TOL`].
pub fn rank(a: &CMatrix) -> usize {
    orthonormal_span(a).0.ncols()
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Ginibre matrix (i.i.d. standard complex Gaussian entries).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| random_complex(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let m = random_matrix(rng, n);
    (&m + m.adjoint()).scale(0.5)
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = random_matrix(rng, n).qr();
    let q = qr.q();
    let r = qr.r();
    // Fix column phases so the distribution is Haar.
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            out[(i, j)] *= phase;
        }
    }
    out
}

/// Random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| random_complex(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Random full-rank density matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = random_matrix(rng, n);
    let p = &g * g.adjoint();
    let tr = p.trace();
    p.unscale(tr.re)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// `tr(ρ²)` for a (not necessarily normalised) hermitian `ρ`.
pub fn purity(rho: &CMatrix) -> f64 {
    frob_inner(rho, rho).re
}

/// Largest entry-wise absolute deviation.
pub fn max_abs_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
