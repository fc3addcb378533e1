//! Dense complex linear algebra with tolerance-aware rank decisions.
//!
//! Everything downstream works on [`ComplexMatrix`], a square matrix whose
//! entries are guaranteed finite. Decompositions are delegated to `faer`.

use std::ops::{Add, Index, Mul, Sub};

use faer::Mat;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(Mat<C64>);

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl ComplexMatrix {
    pub fn from_mat(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !finite(m[(i, j)]) {
                    return Err(Error::NonFinite);
                }
            }
        }
        Ok(Self(m))
    }

    // Callers guarantee a square matrix built from finite inputs.
    pub(crate) fn from_mat_unchecked(m: Mat<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_mat(Mat::from_fn(n, n, |i, j| f(i, j)))
    }

    /// Builds a matrix from row vectors; rejects ragged or non-square input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self(Mat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn diagonal(d: &[C64]) -> Result<Self> {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose().to_owned())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate().to_owned())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.n() {
            for i in 0..self.n() {
                m = m.max(self.0[(i, j)].norm());
            }
        }
        m
    }

    /// `self − omega·I`.
    pub fn shifted(&self, omega: C64) -> Self {
        let mut m = self.0.clone();
        for i in 0..self.n() {
            m[(i, i)] -= omega;
        }
        Self(m)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(Mat::from_fn(self.n(), self.n(), |i, j| self.0[(i, j)] * c))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n());
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, ij: (usize, usize)) -> &C64 {
        &self.0[ij]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Floating-point realization of exact rank and multiplicity conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TolerancePolicy {
    /// Singular values below `rank_rel·σ_max` count as zero.
    pub rank_rel: f64,
    /// Absolute floor, applied as `rank_abs·‖A‖_F`.
    pub rank_abs: f64,
    /// Relative threshold for the C_k / c_k / B_k vanishing tests.
    pub ck_rel: f64,
    /// Clustering radius in units of `1 + ‖H‖₂`.
    pub cluster_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rank_rel: 1e-8,
            rank_abs: 1e-12,
            ck_rel: 1e-9,
            cluster_tol: 1e-3,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_rel", self.rank_rel),
            ("rank_abs", self.rank_abs),
            ("ck_rel", self.ck_rel),
            ("cluster_tol", self.cluster_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidPolicy(format!("{name} must be positive, got {v}")));
            }
        }
        if self.rank_rel >= 1.0 {
            return Err(Error::InvalidPolicy(format!(
                "rank_rel must be below 1, got {}",
                self.rank_rel
            )));
        }
        Ok(())
    }

    /// Absolute clustering radius for a matrix of spectral norm `norm`.
    pub fn cluster_radius(&self, norm: f64) -> f64 {
        self.cluster_tol * (1.0 + norm)
    }

    /// Cutoff below which singular values of `a` count as zero.
    pub fn rank_cutoff(&self, sigma_max: f64, frobenius: f64) -> f64 {
        (self.rank_rel * sigma_max).max(self.rank_abs * frobenius)
    }
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.0.singular_values()
        .map_err(|e| Error::InvalidInput(format!("singular value decomposition failed: {e:?}")))
}

/// Thin SVD: singular values (nonincreasing) with left and right singular
/// vectors as columns.
pub fn svd(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix, ComplexMatrix)> {
    let d = a
        .0
        .svd()
        .map_err(|e| Error::InvalidInput(format!("singular value decomposition failed: {e:?}")))?;
    let s = d.S().column_vector();
    let sv: Vec<f64> = (0..a.n()).map(|i| s[i].re).collect();
    Ok((
        sv,
        ComplexMatrix(d.U().to_owned()),
        ComplexMatrix(d.V().to_owned()),
    ))
}

/// Counts singular values above `max(rank_rel·σ_max, rank_abs·‖A‖_F)`.
pub fn numerical_rank(a: &ComplexMatrix, policy: &TolerancePolicy) -> Result<usize> {
    policy.validate()?;
    let sv = singular_values(a)?;
    let cutoff = policy.rank_cutoff(sv.first().copied().unwrap_or(0.0), a.frobenius_norm());
    Ok(sv.iter().filter(|&&s| s > cutoff).count())
}

/// Rank with an extra absolute floor; used where a matrix has a known
/// vanishing scale.
pub(crate) fn rank_above(sv: &[f64], cutoff: f64) -> usize {
    sv.iter().filter(|&&s| s > cutoff).count()
}

pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub(crate) fn cmp_complex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues sorted by (real, imaginary).
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<C64>> {
    let mut ev = h.0.eigenvalues().map_err(|_| Error::EigenFailed)?;
    ev.sort_by(cmp_complex);
    Ok(ev)
}

/// Single-linkage clusters of `values` with linking radius `radius`.
/// Clusters are returned in order of their smallest member index.
pub fn clusters(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(i);
    }
    out
}

/// Right and left eigenvectors with biorthogonal normalization.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Columns are right eigenvectors.
    pub right_vectors: ComplexMatrix,
    /// Rows are left eigenvectors, scaled so that `V·U = I` where possible.
    pub left_vectors: ComplexMatrix,
    /// `max_i ‖H u_i − E_i u_i‖`.
    pub residual: f64,
    /// Eigenvalue indices whose biorthogonal normalization was ill-conditioned.
    pub ill_conditioned: Vec<usize>,
    /// `max |V·U − I|` over the computed sets.
    pub biorthogonality_defect: f64,
}

fn gauge_columns(vals: &[C64], u: &Mat<C64>, order: &[usize]) -> (Vec<C64>, Mat<C64>) {
    let n = u.nrows();
    let mut out = Mat::<C64>::zeros(n, order.len());
    let mut ev = Vec::with_capacity(order.len());
    for (c, &j) in order.iter().enumerate() {
        ev.push(vals[j]);
        let norm = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let mut arg = 0;
        for i in 0..n {
            if u[(i, j)].norm() > u[(arg, j)].norm() {
                arg = i;
            }
        }
        let pivot = u[(arg, j)];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let scale = if norm > 0.0 { phase / norm } else { phase };
        for i in 0..n {
            out[(i, c)] = u[(i, j)] * scale;
        }
        // Pin the pivot exactly on the real axis.
        out[(arg, c)] = C64::new(out[(arg, c)].norm(), 0.0);
    }
    (ev, out)
}

fn residual_of(h: &ComplexMatrix, ev: &[C64], u: &Mat<C64>) -> f64 {
    let hu = &h.0 * u;
    let mut worst = 0.0f64;
    for (j, e) in ev.iter().enumerate() {
        let r = (0..u.nrows())
            .map(|i| (hu[(i, j)] - *e * u[(i, j)]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Right eigenpairs only, sorted and gauge-fixed. Hermitian input is routed
/// to the self-adjoint solver.
pub fn eig_right(h: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    let (vals, u) = if h.is_hermitian(0.0) {
        let e = h
            .0
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| Error::EigenFailed)?;
        let s = e.S().column_vector();
        let vals: Vec<C64> = (0..h.n()).map(|i| C64::new(s[i].re, 0.0)).collect();
        (vals, e.U().to_owned())
    } else {
        let e = h.0.eigen().map_err(|_| Error::EigenFailed)?;
        let s = e.S().column_vector();
        let vals: Vec<C64> = (0..h.n()).map(|i| s[i]).collect();
        (vals, e.U().to_owned())
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| cmp_complex(&vals[a], &vals[b]));
    let (ev, u) = gauge_columns(&vals, &u, &order);
    Ok((ev, ComplexMatrix(u)))
}

/// Full eigendecomposition with left vectors taken from the adjoint problem.
pub fn eig(h: &ComplexMatrix, policy: &TolerancePolicy) -> Result<EigenDecomposition> {
    policy.validate()?;
    let n = h.n();
    let (ev, u) = eig_right(h)?;

    let adj = h.0.adjoint().to_owned();
    let ea = adj.eigen().map_err(|_| Error::EigenFailed)?;
    let sa = ea.S().column_vector();
    let wa = ea.U();

    // Pair each right eigenvalue with the nearest unused conj(μ).
    let mut used = vec![false; n];
    let mut pair = vec![0usize; n];
    for (i, e) in ev.iter().enumerate() {
        let mut best = usize::MAX;
        let mut dist = f64::INFINITY;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let d = (sa[j].conj() - *e).norm();
            if d < dist {
                dist = d;
                best = j;
            }
        }
        used[best] = true;
        pair[i] = best;
    }
    // Raw left rows v_i = w_j†.
    let mut v = Mat::<C64>::from_fn(n, n, |i, m| wa[(m, pair[i])].conj());

    let radius = policy.cluster_radius(spectral_norm(h)?);
    let mut ill = Vec::new();
    for group in clusters(&ev, radius) {
        let m = group.len();
        let block = Mat::<C64>::from_fn(m, m, |a, b| {
            (0..n).map(|r| v[(group[a], r)] * u.0[(r, group[b])]).sum()
        });
        let sv = block.singular_values().map_err(|_| Error::EigenFailed)?;
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if smin <= 1e-8 * smax.max(1.0) {
            ill.extend(group.iter().copied());
            continue;
        }
        use faer::linalg::solvers::DenseSolveCore;
        let inv = block.partial_piv_lu().inverse();
        let rows = Mat::<C64>::from_fn(m, n, |a, r| v[(group[a], r)]);
        let fixed = &inv * &rows;
        for (a, &gi) in group.iter().enumerate() {
            for r in 0..n {
                v[(gi, r)] = fixed[(a, r)];
            }
        }
    }
    ill.sort_unstable();

    let vu = &v * &u.0;
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((vu[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    let residual = residual_of(h, &ev, &u.0);
    Ok(EigenDecomposition {
        eigenvalues: ev,
        right_vectors: u,
        left_vectors: ComplexMatrix(v),
        residual,
        ill_conditioned: ill,
        biorthogonality_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![c(1.0), c(2.0)]]),
            Err(Error::NonSquare { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![c(f64::NAN)]]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn rank_of_trivial_matrices() {
        let p = TolerancePolicy::default();
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3), &p).unwrap(), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), &p).unwrap(), 3);
    }

    #[test]
    fn spectral_norms() {
        assert!((spectral_norm(&ComplexMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::diagonal(&[c(2.0), c(1.0)]).unwrap();
        assert!((spectral_norm(&d).unwrap() - 2.0).abs() < 1e-14);
        let z = C64::new(3.0, -4.0);
        let m = ComplexMatrix::from_rows(&[vec![c(0.0), z], vec![c(0.0), c(0.0)]]).unwrap();
        assert!((spectral_norm(&m).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_diagonal_and_pauli() {
        let p = TolerancePolicy::default();
        let d = ComplexMatrix::diagonal(&[c(3.0), c(1.0), c(2.0)]).unwrap();
        let e = eig(&d, &p).unwrap();
        let re: Vec<f64> = e.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        assert!(e.residual < 1e-12);
        assert!(e.biorthogonality_defect < 1e-12);

        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eig(&x, &p).unwrap();
        assert!((e.eigenvalues[0] - c(-1.0)).norm() < 1e-12);
        assert!((e.eigenvalues[1] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn gauge_makes_pivot_real_positive() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -2.0), c(1.0)],
        ])
        .unwrap();
        let (_, u) = eig_right(&h).unwrap();
        for j in 0..2 {
            let col: Vec<C64> = (0..2).map(|i| u[(i, j)]).collect();
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            let piv = col
                .iter()
                .copied()
                .fold(c(0.0), |a, z| if z.norm() > a.norm() { z } else { a });
            assert!(piv.im.abs() < 1e-15 && piv.re > 0.0);
        }
    }

    #[test]
    fn defective_matrix_is_reported_not_failed() {
        let j = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let e = eig(&j, &TolerancePolicy::default()).unwrap();
        assert_eq!(e.ill_conditioned, vec![0, 1]);
    }

    #[test]
    fn clusters_link_transitively() {
        let v = [c(0.0), c(0.9), c(5.0), c(1.8)];
        assert_eq!(clusters(&v, 1.0), vec![vec![0, 1, 3], vec![2]]);
    }

    #[test]
    fn policy_validation() {
        let mut p = TolerancePolicy::default();
        assert!(p.validate().is_ok());
        p.rank_rel = 1.0;
        assert!(p.validate().is_err());
        p.rank_rel = 1e-8;
        p.cluster_tol = 0.0;
        assert!(p.validate().is_err());
    }
}
