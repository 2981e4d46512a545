//! Dense complex operator matrices and the small linear-algebra kernel the
//! rest of the crate is built on.
//!
//! Everything downstream works with square operators on Hilbert spaces of at
//! most a few thousand dimensions, so a plain row-major `Vec<Complex64>`
//! buffer is the whole storage story. The two nontrivial kernels are
//! [`herm_eig`] (dense Hermitian eigendecomposition, delegated to `faer`'s
//! self-adjoint solver, run sequentially so results are bitwise reproducible)
//! and [`unitary_exp`] (matrix exponential of an anti-Hermitian generator via
//! its spectral decomposition). Both validate their symmetry preconditions
//! and report violations as typed errors rather than silently symmetrizing.

use crate::error::{Error, Result};
use crate::C64;

/// Largest dense dimension [`kron`] will produce. Two coupled sites at the
/// default truncations stay well below this; anything bigger signals a
/// misconfigured study rather than a legitimate workload.
pub const KRON_DIM_LIMIT: usize = 4096;

/// Default bound on `max |A - A^dag|` accepted by [`herm_eig`].
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-10;

/// Bound on `max |G + G^dag|` accepted by [`unitary_exp`].
pub const ANTI_HERMITICITY_TOL: f64 = 1e-10;

/// Tolerance on `| ||v|| - 1 |` for state vectors fed to [`expval`].
pub const STATE_NORM_TOL: f64 = 1e-8;

/// Dense square complex matrix in row-major order.
///
/// Cloning is a deep copy; all arithmetic allocates fresh output except the
/// explicitly in-place `scale` / `scaled_add` helpers used by Hamiltonian
/// assembly.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl OperatorMatrix {
    /// Zero operator on a `dim`-dimensional space.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be at least 1");
        OperatorMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity operator.
    pub fn identity(dim: usize) -> Self {
        let mut m = OperatorMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from an entry function `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = OperatorMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal operator with the given complex entries.
    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = OperatorMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Diagonal operator with the given real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = OperatorMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Borrow row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Copy of column `k`.
    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, k)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        OperatorMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Largest entry magnitude of `A - A^dag`; zero iff Hermitian.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                max = max.max(d);
            }
        }
        max
    }

    /// Largest entry magnitude of `A + A^dag`; zero iff anti-Hermitian.
    pub fn anti_hermiticity_deviation(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] + self[(j, i)].conj()).norm();
                max = max.max(d);
            }
        }
        max
    }

    /// `true` when `max |A - A^dag| <= tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm `sqrt(sum |a_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `A - B`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// In-place scaling `A <- c A`.
    pub fn scale(&mut self, c: C64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    /// In-place accumulation `A <- A + c B`. Panics on dimension mismatch.
    pub fn scaled_add(&mut self, c: C64, other: &OperatorMatrix) {
        assert_eq!(self.dim, other.dim, "scaled_add: dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Matrix-vector product `A v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "apply: dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<C64>()
            })
            .collect()
    }

    /// Matrix-vector product with the adjoint, `A^dag v`, without forming
    /// the adjoint matrix.
    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "apply_adjoint: dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (j, &x) in v.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self[(j, i)].conj() * x;
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl std::fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "OperatorMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim.min(8) {
            write!(f, "  ")?;
            for j in 0..self.dim.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.3}{:+.3}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.dim > 8 { "..." } else { "" })?;
        }
        if self.dim > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Add<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.scaled_add(C64::new(1.0, 0.0), rhs);
        out
    }
}

impl std::ops::Sub<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.scaled_add(C64::new(-1.0, 0.0), rhs);
        out
    }
}

impl std::ops::Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        let mut out = self.clone();
        out.scale(C64::new(-1.0, 0.0));
        out
    }
}

impl std::ops::Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;

    /// Naive O(n^3) matrix product; hot paths only multiply small matrices
    /// (basis changes and exponentials at dimension <= a few tens).
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = OperatorMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += aik * b;
                }
            }
        }
        out
    }
}

impl std::ops::Mul<&OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = rhs.clone();
        out.scale(C64::new(self, 0.0));
        out
    }
}

impl std::ops::Mul<&OperatorMatrix> for C64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = rhs.clone();
        out.scale(self);
        out
    }
}

/// Commutator `[A, B] = AB - BA`. Panics on dimension mismatch.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    &(a * b) - &(b * a)
}

/// Inner product `<a|b>` with the first argument conjugated.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "vdot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a state vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product `a (x) b` with entries
/// `(a (x) b)[(i1*db + i2, j1*db + j2)] = a[(i1, j1)] * b[(i2, j2)]`,
/// i.e. the first factor owns the slow index.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da
        .checked_mul(db)
        .filter(|&d| d <= KRON_DIM_LIMIT)
        .ok_or(Error::DimensionOverflow {
            dim: da.saturating_mul(db),
            limit: KRON_DIM_LIMIT,
        })?;
    let mut out = OperatorMatrix::zeros(dim);
    for i1 in 0..da {
        for j1 in 0..da {
            let aij = a[(i1, j1)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    out[(i1 * db + i2, j1 * db + j2)] = aij * b[(i2, j2)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are real and sorted ascending; `vectors` holds the matching
/// orthonormal eigenvectors as columns, so `A = V diag(lambda) V^dag`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: OperatorMatrix,
}

impl EigenDecomposition {
    /// Copy of the `k`-th eigenvector (ascending eigenvalue order).
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Number of eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    /// True for the (unused) zero-dimensional decomposition.
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `max |A - A^dag| <= hermiticity_tol`; the strict
/// lower triangle is then taken as authoritative. The backing solver runs
/// sequentially, so repeated calls on identical input give identical output.
pub fn herm_eig(a: &OperatorMatrix, hermiticity_tol: f64) -> Result<EigenDecomposition> {
    let dev = a.hermiticity_deviation();
    if dev > hermiticity_tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol: hermiticity_tol,
        });
    }
    let n = a.dim();
    let mut m: faer::Mat<faer::c64> = faer::Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(i, j)];
        }
    }
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::EigenFailure { dim: n })?;
    let s = evd.S();
    let u = evd.U();
    let mut eigenvalues: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let mut vectors = OperatorMatrix::from_fn(n, |i, k| u[(i, k)]);
    // The backend returns ascending eigenvalues already; sort defensively so
    // the ordering contract never depends on backend internals.
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
        let vals: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
        let vecs = OperatorMatrix::from_fn(n, |i, k| vectors[(i, order[k])]);
        eigenvalues = vals;
        vectors = vecs;
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Unitary `exp(G)` of an anti-Hermitian generator `G`.
///
/// Writes `G = i H` with `H = -i G` Hermitian and exponentiates through the
/// spectral decomposition of `H`, so the result is unitary to roundoff by
/// construction.
pub fn unitary_exp(g: &OperatorMatrix) -> Result<OperatorMatrix> {
    let dev = g.anti_hermiticity_deviation();
    if dev > ANTI_HERMITICITY_TOL {
        return Err(Error::NotAntiHermitian {
            deviation: dev,
            tol: ANTI_HERMITICITY_TOL,
        });
    }
    let minus_i = C64::new(0.0, -1.0);
    let h = OperatorMatrix::from_fn(g.dim(), |i, j| minus_i * g[(i, j)]);
    let eig = herm_eig(&h, ANTI_HERMITICITY_TOL)?;
    // exp(G) = V diag(e^{i lambda}) V^dag
    let n = g.dim();
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::new(0.0, l).exp())
        .collect();
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for k in 0..n {
        for i in 0..n {
            scaled[(i, k)] *= phases[k];
        }
    }
    Ok(&scaled * &v.adjoint())
}

/// Expectation value `<v|A|v>` of an operator in a normalized state.
pub fn expval(op: &OperatorMatrix, state: &[C64]) -> Result<C64> {
    if op.dim() != state.len() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: state.len(),
            context: "expval operator vs state",
        });
    }
    let norm = vec_norm(state);
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized {
            norm,
            tol: STATE_NORM_TOL,
        });
    }
    Ok(vdot(state, &op.apply(state)))
}

/// Real part of a Hermitian expectation value, asserting the imaginary part
/// is numerically negligible.
pub fn expval_real(op: &OperatorMatrix, state: &[C64]) -> Result<f64> {
    let v = expval(op, state)?;
    debug_assert!(
        v.im.abs() <= 1e-10 * v.re.abs().max(1.0),
        "expectation of a Hermitian operator came out complex: {v}"
    );
    Ok(v.re)
}
