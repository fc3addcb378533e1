//! Random matrices with planted Jordan structure.

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::classify::PartialMultiplicityFunction;
use crate::matkit::{ComplexMatrix, C64};

/// Direct sum of nilpotent Jordan blocks (ones on the superdiagonal).
pub fn jordan_direct_sum(sizes: &[usize]) -> ComplexMatrix {
    let n: usize = sizes.iter().sum();
    let mut m = Mat::<C64>::zeros(n, n);
    let mut off = 0;
    for &s in sizes {
        for i in 0..s.saturating_sub(1) {
            m[(off + i, off + i + 1)] = C64::new(1.0, 0.0);
        }
        off += s;
    }
    ComplexMatrix::from_mat_unchecked(m)
}

/// Matrix with i.i.d. standard complex-normal entries.
pub fn complex_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = Mat::<C64>::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) / std::f64::consts::SQRT_2
    });
    ComplexMatrix::from_mat_unchecked(m)
}

/// Complex-normal matrix scaled to unit Frobenius norm.
pub fn unit_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let x = complex_normal(n, rng);
    let f = x.frobenius_norm();
    x.scale(C64::new(1.0 / f, 0.0))
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_normal(n, rng);
    let qr = g.as_mat().qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let q = Mat::<C64>::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    });
    ComplexMatrix::from_mat_unchecked(q)
}

/// `T·J·T⁻¹` together with the structure planted at eigenvalue 0.
#[derive(Clone, Debug)]
pub struct PlantedJordan {
    pub h: ComplexMatrix,
    pub beta: PartialMultiplicityFunction,
    /// Simple eigenvalues planted away from zero.
    pub others: Vec<C64>,
}

/// Plants Jordan blocks `sizes` at eigenvalue 0 plus `extra` simple
/// eigenvalues with modulus in [0.5, 1.5]. `cond` bounds the condition
/// number of the similarity; `cond = 1` gives a unitary similarity.
pub fn planted_jordan<R: Rng + ?Sized>(
    sizes: &[usize],
    extra: usize,
    cond: f64,
    rng: &mut R,
) -> PlantedJordan {
    let m: usize = sizes.iter().sum();
    let n = m + extra;
    let radius = Uniform::new(0.5, 1.5);
    let angle = Uniform::new(0.0, std::f64::consts::TAU);
    let others: Vec<C64> = (0..extra)
        .map(|_| C64::from_polar(radius.sample(rng), angle.sample(rng)))
        .collect();
    let j0 = jordan_direct_sum(sizes);
    let j = Mat::<C64>::from_fn(n, n, |a, b| {
        if a < m && b < m {
            j0[(a, b)]
        } else if a == b {
            others[a - m]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = random_unitary(n, rng);
    let h = if cond <= 1.0 {
        ComplexMatrix::from_mat_unchecked(u.as_mat() * &j * u.as_mat().adjoint())
    } else {
        // T = U·D·W with singular values log-uniform in [1, cond].
        let w = random_unitary(n, rng);
        let log = Uniform::new_inclusive(0.0, cond.ln());
        let mut d: Vec<f64> = (0..n).map(|_| log.sample(rng).exp()).collect();
        d[0] = 1.0;
        if n > 1 {
            d[n - 1] = cond;
        }
        let dm = Mat::<C64>::from_fn(n, n, |a, b| if a == b { C64::new(d[a], 0.0) } else { C64::new(0.0, 0.0) });
        let dinv =
            Mat::<C64>::from_fn(n, n, |a, b| if a == b { C64::new(1.0 / d[a], 0.0) } else { C64::new(0.0, 0.0) });
        let t = u.as_mat() * &dm * w.as_mat();
        let tinv = w.as_mat().adjoint() * &dinv * u.as_mat().adjoint();
        ComplexMatrix::from_mat_unchecked(&t * &j * &tinv)
    };
    PlantedJordan {
        h,
        beta: PartialMultiplicityFunction::from_partials(sizes).expect("positive block sizes"),
        others,
    }
}

/// Random partition of an integer in `1..=max_total` into block sizes.
pub fn random_partition<R: Rng + ?Sized>(max_total: usize, rng: &mut R) -> Vec<usize> {
    let total = rng.gen_range(1..=max_total);
    let mut left = total;
    let mut parts = Vec::new();
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(6, &mut rng);
        let e = &u.adjoint() * &u;
        assert!(e.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-13);
    }

    #[test]
    fn planted_has_expected_spectrum_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = planted_jordan(&[2, 1], 2, 1.0, &mut rng);
        assert_eq!(p.h.n(), 5);
        assert_eq!(p.beta.alpha(), 3);
        let tr: C64 = p.others.iter().sum();
        assert!((p.h.trace() - tr).norm() < 1e-12);
    }

    #[test]
    fn partitions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = random_partition(8, &mut rng);
            let s: usize = p.iter().sum();
            assert!((1..=8).contains(&s));
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
