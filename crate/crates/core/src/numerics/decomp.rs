use nalgebra::linalg::{Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use super::{ensure_finite, ensure_square, CMat};
use crate::error::{Error, Result};

/// Singular value decomposition `A = U diag(s) V^dagger` with `s` descending.
#[derive(Debug, Clone)]
pub struct SvdTriple {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

impl SvdTriple {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// `U diag(s) V^dagger`.
    pub fn reconstruct(&self) -> CMat {
        let mut us = self.u.clone();
        for (col, &sv) in self.s.iter().enumerate() {
            us.column_mut(col).scale_mut(sv);
        }
        us * self.v.adjoint()
    }

    /// Smallest singular value (`s_N` in descending order).
    pub fn smallest(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    /// Gap `s_{N-1} - s_N` between the two smallest singular values.
    pub fn edge_gap(&self) -> f64 {
        match self.s.len() {
            0 | 1 => 0.0,
            n => self.s[n - 2] - self.s[n - 1],
        }
    }
}

pub fn svd(a: &CMat) -> Result<SvdTriple> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Ok(SvdTriple { u: CMat::zeros(0, 0), s: vec![], v: CMat::zeros(0, 0) });
    }
    let dec = SVD::try_new(a.clone(), true, true, f64::EPSILON, 0).ok_or(Error::NoConvergence("svd"))?;
    let u = dec.u.ok_or(Error::NoConvergence("svd: U"))?;
    let v_t = dec.v_t.ok_or(Error::NoConvergence("svd: V"))?;
    let raw: Vec<f64> = dec.singular_values.iter().copied().collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw[y].total_cmp(&raw[x]));

    let mut su = CMat::zeros(n, n);
    let mut sv = CMat::zeros(n, n);
    let v = v_t.adjoint();
    let mut s = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sv.set_column(dst, &v.column(src));
        s.push(raw[src].max(0.0));
    }
    Ok(SvdTriple { u: su, s, v: sv })
}

/// Right eigensystem `A B = B diag(values)` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<Complex64>,
    /// Columns are unit-norm right eigenvectors.
    pub vectors: CMat,
    /// `||A B - B diag(values)||_F / ||A||_F`; large values flag a defective input.
    pub residual: f64,
}

impl EigenSystem {
    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// General eigendecomposition.
///
/// Exactly triangular inputs (upper or lower) are read off directly, which keeps
/// the highly degenerate spectra of uni-directional chains exact. Everything else
/// is balanced by a diagonal similarity, reduced to complex Schur form, and the
/// eigenvectors are recovered by triangular substitution.
pub fn eig(a: &CMat) -> Result<EigenSystem> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Ok(EigenSystem { values: vec![], vectors: CMat::zeros(0, 0), residual: 0.0 });
    }

    let (values, mut vectors) = if is_upper_triangular(a) {
        let vecs = upper_triangular_vectors(a);
        ((0..n).map(|k| a[(k, k)]).collect::<Vec<_>>(), vecs)
    } else if is_lower_triangular(a) {
        let vecs = lower_triangular_vectors(a);
        ((0..n).map(|k| a[(k, k)]).collect::<Vec<_>>(), vecs)
    } else {
        let (balanced, scale) = balance(a);
        let schur = Schur::try_new(balanced, f64::EPSILON, 0).ok_or(Error::NoConvergence("schur"))?;
        let (z, t) = schur.unpack();
        let y = upper_triangular_vectors(&t);
        let mut x = z * y;
        for (i, d) in scale.iter().enumerate() {
            x.row_mut(i).scale_mut(*d);
        }
        ((0..n).map(|k| t[(k, k)]).collect::<Vec<_>>(), x)
    };

    for mut col in vectors.column_iter_mut() {
        normalize_phase(col.as_mut_slice());
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| values[q].re.total_cmp(&values[p].re).then(values[q].im.total_cmp(&values[p].im)));
    let sorted_values: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }

    let mut bl = sorted_vectors.clone();
    for (col, lam) in sorted_values.iter().enumerate() {
        let mut c = bl.column_mut(col);
        c *= *lam;
    }
    let residual = (a * &sorted_vectors - bl).norm() / a.norm().max(f64::MIN_POSITIVE);

    Ok(EigenSystem { values: sorted_values, vectors: sorted_vectors, residual })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let dec =
        SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence("hermitian eigensolver"))?;
    let mut vals: Vec<f64> = dec.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn is_upper_triangular(a: &CMat) -> bool {
    let n = a.nrows();
    (0..n).all(|j| (j + 1..n).all(|i| a[(i, j)] == Complex64::ZERO))
}

fn is_lower_triangular(a: &CMat) -> bool {
    let n = a.nrows();
    (0..n).all(|j| (0..j).all(|i| a[(i, j)] == Complex64::ZERO))
}

const RESCALE: f64 = 1e100;

/// Guard for `T_ii - lambda_k` in triangular substitution (as in LAPACK's trevc).
fn guarded(den: Complex64, small: f64) -> Complex64 {
    if den.norm() < small {
        Complex64::new(small, 0.0)
    } else {
        den
    }
}

fn upper_triangular_vectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        let mut col = vec![Complex64::ZERO; n];
        col[k] = Complex64::ONE;
        for i in (0..k).rev() {
            let mut acc = Complex64::ZERO;
            for m in i + 1..=k {
                acc += t[(i, m)] * col[m];
            }
            col[i] = -acc / guarded(t[(i, i)] - lam, small);
            if col[i].norm() > RESCALE {
                col.iter_mut().for_each(|z| *z /= RESCALE);
            }
        }
        for (i, z) in col.into_iter().enumerate() {
            y[(i, k)] = z;
        }
    }
    y
}

fn lower_triangular_vectors(l: &CMat) -> CMat {
    let n = l.nrows();
    let small = f64::EPSILON * l.norm().max(f64::MIN_POSITIVE);
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        let lam = l[(k, k)];
        let mut col = vec![Complex64::ZERO; n];
        col[k] = Complex64::ONE;
        for i in k + 1..n {
            let mut acc = Complex64::ZERO;
            for m in k..i {
                acc += l[(i, m)] * col[m];
            }
            col[i] = -acc / guarded(l[(i, i)] - lam, small);
            if col[i].norm() > RESCALE {
                col.iter_mut().for_each(|z| *z /= RESCALE);
            }
        }
        for (i, z) in col.into_iter().enumerate() {
            x[(i, k)] = z;
        }
    }
    x
}

/// Unit 2-norm, first non-negligible component real and positive.
fn normalize_phase(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return;
    }
    let peak = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let pivot = v.iter().find(|z| z.norm() > 1e-12 * peak).copied().unwrap_or(Complex64::ONE);
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Parlett-Reinsch balancing: returns `D^{-1} A D` and the diagonal of `D`.
fn balance(a: &CMat) -> (CMat, Vec<f64>) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = a.nrows();
    let mut b = a.clone();
    let mut scale = vec![1.0; n];
    let l1 = |z: Complex64| z.re.abs() + z.im.abs();
    for _sweep in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += l1(b[(j, i)]);
                    row += l1(b[(i, j)]);
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut g = row / RADIX;
            while col < g {
                f *= RADIX;
                col *= SQRDX;
            }
            g = row * RADIX;
            while col > g {
                f /= RADIX;
                col /= SQRDX;
            }
            if (col + row) / f < 0.95 * total {
                done = false;
                scale[i] *= f;
                b.row_mut(i).scale_mut(1.0 / f);
                b.column_mut(i).scale_mut(f);
            }
        }
        if done {
            break;
        }
    }
    (b, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn svd_of_identity_and_diagonal() {
        let id = CMat::identity(4, 4);
        let d = svd(&id).unwrap();
        assert!(d.s.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!((d.reconstruct() - &id).norm() < 1e-13);

        let diag = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(3.0, 0.0)]));
        let d = svd(&diag).unwrap();
        assert!((d.s[0] - 3.0).abs() < 1e-14 && d.s[1].abs() < 1e-14);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut a = CMat::identity(2, 2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(svd(&a), Err(Error::NonFinite)));
    }

    #[test]
    fn svd_contract_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..=12);
            let a = random_matrix(&mut rng, n);
            let d = svd(&a).unwrap();
            let id = CMat::identity(n, n);
            assert!((d.u.adjoint() * &d.u - &id).norm() <= 1e-10);
            assert!((d.v.adjoint() * &d.v - &id).norm() <= 1e-10);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]) && d.s.iter().all(|&x| x >= 0.0));
            assert!((&a - d.reconstruct()).norm() <= 1e-10 * a.norm());
        }
    }

    #[test]
    fn hermitian_singular_values_are_absolute_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(2..=10);
            let a = random_matrix(&mut rng, n);
            let h = (&a + a.adjoint()) * c(0.5, 0.0);
            let mut abs_eigs: Vec<f64> = hermitian_eigenvalues(&h).unwrap().into_iter().map(f64::abs).collect();
            abs_eigs.sort_by(|x, y| y.total_cmp(x));
            let s = svd(&h).unwrap().s;
            for (x, y) in abs_eigs.iter().zip(&s) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn eig_diagonal() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(-2.0, 0.0)]));
        let e = eig(&a).unwrap();
        assert_eq!(e.values, vec![c(-1.0, 0.0), c(-2.0, 0.0)]);
        assert!(e.residual < 1e-15);
    }

    #[test]
    fn eig_random_residual_and_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..=12);
            let a = random_matrix(&mut rng, n);
            let e = eig(&a).unwrap();
            assert!(e.residual <= 1e-9, "residual {}", e.residual);
            for col in e.vectors.column_iter() {
                assert!((col.norm() - 1.0).abs() < 1e-12);
                let first = col.iter().find(|z| z.norm() > 1e-12).unwrap();
                assert!(first.im.abs() < 1e-12 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn eig_jordan_block_is_exact() {
        let n = 10;
        let mut a = CMat::from_diagonal_element(n, n, c(-1.0, 0.0));
        for j in 1..n {
            a[(j, j - 1)] = c(2.0, 0.0);
        }
        let e = eig(&a).unwrap();
        assert!(e.values.iter().all(|&l| l == c(-1.0, 0.0)));
        // The single true eigenvector of a lower Jordan block is e_N.
        assert!((e.vectors[(n - 1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn balancing_is_a_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut a = random_matrix(&mut rng, 6);
        a[(0, 5)] *= 1e6;
        a[(5, 0)] *= 1e-6;
        let (b, d) = balance(&a);
        let dm = CMat::from_diagonal(&nalgebra::DVector::from_iterator(6, d.iter().map(|&x| c(x, 0.0))));
        let dinv = CMat::from_diagonal(&nalgebra::DVector::from_iterator(6, d.iter().map(|&x| c(1.0 / x, 0.0))));
        assert!((dinv * &a * dm - &b).norm() <= 1e-12 * a.norm());
    }
}
