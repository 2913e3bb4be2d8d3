//! Small dense helpers shared by the numerical modules.
//!
//! Vectors are plain `[c64]` slices; dense matrices are `faer::Mat<c64>`.
//! Everything that needs a dense factorization goes through this module so the
//! size guard lives in one place.

use faer::{c64, Mat, Side};

use crate::{Error, Result};

/// Largest dimension for which dense factorizations are attempted.
pub const MAX_DENSE_DIM: usize = 4096;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn check_dense(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    Ok(())
}

/// `⟨u|v⟩`, conjugate-linear in the first argument.
pub fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm_sqr(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[c64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Distance `‖u - v‖`.
pub fn distance(u: &[c64], v: &[c64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Multiply every entry so the largest-magnitude amplitude is real and
/// positive. Eigenvectors are only defined up to a phase; this makes them
/// reproducible.
pub fn fix_phase(v: &mut [c64]) {
    let Some(pivot) = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
    else {
        return;
    };
    let mag = pivot.norm();
    if mag == 0.0 {
        return;
    }
    let phase = pivot.conj() / mag;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

pub fn column(m: &Mat<c64>, k: usize) -> Vec<c64> {
    (0..m.nrows()).map(|i| m[(i, k)]).collect()
}

pub fn matvec(m: &Mat<c64>, v: &[c64]) -> Vec<c64> {
    let mut out = vec![ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

/// `M† v`.
pub fn adjoint_matvec(m: &Mat<c64>, v: &[c64]) -> Vec<c64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).fold(ZERO, |acc, i| acc + m[(i, j)].conj() * v[i]))
        .collect()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    check_dense(m.nrows())?;
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("self-adjoint eigendecomposition: {e:?}")))?;
    let s = evd.S();
    let values: Vec<f64> = (0..m.nrows()).map(|k| s[k].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// General complex eigen-decomposition. Returns eigenvalues and unnormalized
/// right eigenvectors as columns.
pub fn general_eigen(m: &Mat<c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    check_dense(m.nrows())?;
    let evd = m
        .eigen()
        .map_err(|e| Error::Linalg(format!("eigendecomposition: {e:?}")))?;
    let s = evd.S();
    let values: Vec<c64> = (0..m.nrows()).map(|k| s[k]).collect();
    Ok((values, evd.U().to_owned()))
}

/// Right singular vector of the smallest singular value, with that value.
pub fn smallest_singular_vector(m: &Mat<c64>) -> Result<(f64, Vec<c64>)> {
    check_dense(m.nrows())?;
    let svd = m
        .svd()
        .map_err(|e| Error::Linalg(format!("singular value decomposition: {e:?}")))?;
    let s = svd.S();
    let n = m.ncols().min(m.nrows());
    let k = (0..n)
        .min_by(|&a, &b| s[a].re.total_cmp(&s[b].re))
        .ok_or_else(|| Error::Linalg("empty matrix".into()))?;
    let v = svd.V();
    Ok((s[k].re, (0..m.ncols()).map(|i| v[(i, k)]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_fix_makes_pivot_real() {
        let mut v = vec![c64::new(0.1, 0.0), c64::new(0.0, -2.0)];
        fix_phase(&mut v);
        assert!((v[1].re - 2.0).abs() < 1e-15 && v[1].im.abs() < 1e-15);
        assert!((v[0].norm() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn smallest_singular_vector_of_rank_deficient_matrix() {
        // [[1, 1], [1, 1]] has null vector (1, -1)/√2.
        let m = Mat::from_fn(2, 2, |_, _| ONE);
        let (s, v) = smallest_singular_vector(&m).unwrap();
        assert!(s < 1e-12);
        assert!((v[0] + v[1]).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_is_ascending() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                c64::new(3.0 - i as f64, 0.0)
            } else {
                ZERO
            }
        });
        let (vals, _) = hermitian_eigen(&m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }
}
