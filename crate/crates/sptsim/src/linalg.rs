//! Dense complex matrix helpers sized for reduced density matrices.
//!
//! Matrices are row-major `Vec<Complex<T>>` of dimension `dim * dim`.
//! Subsystems in this crate stay at or below 8 sites, so a cyclic Jacobi
//! eigensolver is plenty; it keeps the whole stack generic over the scalar
//! instead of pinning eigenvalue extraction to one float width.

use crate::error::{Error, Result};
use crate::real::Real;
use num_complex::Complex;

pub fn zeros<T: Real>(dim: usize) -> Vec<Complex<T>> {
    vec![Complex::new(T::zero(), T::zero()); dim * dim]
}

pub fn identity<T: Real>(dim: usize) -> Vec<Complex<T>> {
    let mut m = zeros(dim);
    for k in 0..dim {
        m[k * dim + k] = Complex::new(T::one(), T::zero());
    }
    m
}

pub fn matmul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    let mut out = zeros::<T>(dim);
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.norm_sqr() == T::zero() {
                continue;
            }
            let row = &b[k * dim..(k + 1) * dim];
            let dst = &mut out[i * dim..(i + 1) * dim];
            for (d, &bkj) in dst.iter_mut().zip(row) {
                *d += aik * bkj;
            }
        }
    }
    out
}

/// A ρ^n by repeated multiplication; n >= 1.
pub fn matrix_power<T: Real>(a: &[Complex<T>], dim: usize, n: u32) -> Vec<Complex<T>> {
    let mut out = a.to_vec();
    for _ in 1..n {
        out = matmul(&out, a, dim);
    }
    out
}

pub fn trace<T: Real>(a: &[Complex<T>], dim: usize) -> Complex<T> {
    (0..dim).map(|k| a[k * dim + k]).fold(
        Complex::new(T::zero(), T::zero()),
        |acc, x| acc + x,
    )
}

/// Largest entry magnitude of A - A†, the hermiticity witness.
pub fn hermiticity_witness<T: Real>(a: &[Complex<T>], dim: usize) -> T {
    let mut worst = T::zero();
    for i in 0..dim {
        for j in i..dim {
            let d = a[i * dim + j] - a[j * dim + i].conj();
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// Largest entry magnitude, used as the commutator norm.
pub fn max_entry_norm<T: Real>(a: &[Complex<T>], dim: usize) -> T {
    a[..dim * dim]
        .iter()
        .fold(T::zero(), |acc, x| acc.max(x.norm()))
}

pub fn kron<T: Real>(
    a: &[Complex<T>],
    dim_a: usize,
    b: &[Complex<T>],
    dim_b: usize,
) -> Vec<Complex<T>> {
    let dim = dim_a * dim_b;
    let mut out = zeros::<T>(dim);
    for ia in 0..dim_a {
        for ja in 0..dim_a {
            let f = a[ia * dim_a + ja];
            for ib in 0..dim_b {
                for jb in 0..dim_b {
                    out[(ia * dim_b + ib) * dim + (ja * dim_b + jb)] = f * b[ib * dim_b + jb];
                }
            }
        }
    }
    out
}

/// Eigenvalues of a hermitian matrix by cyclic Jacobi sweeps, descending.
///
/// Each sweep zeroes every off-diagonal pair through a complex Givens
/// rotation; convergence is quadratic and a handful of sweeps suffices at
/// these dimensions. Errors if the input fails the hermiticity check.
pub fn hermitian_eigenvalues<T: Real>(a: &[Complex<T>], dim: usize) -> Result<Vec<T>> {
    if a.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            got: a.len(),
            expected: dim * dim,
        });
    }
    let witness = hermiticity_witness(a, dim);
    if witness > T::tol_channel() {
        return Err(Error::NonHermitian {
            witness: witness.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut m = a.to_vec();
    // Work on the exactly hermitian average so rotations stay stable.
    for i in 0..dim {
        for j in 0..dim {
            let avg = (m[i * dim + j] + m[j * dim + i].conj())
                * Complex::new(T::of(0.5), T::zero());
            m[i * dim + j] = avg;
        }
    }
    let scale = max_entry_norm(&m, dim).max(T::one());
    let stop = scale * T::tol_strict() * T::of(1e-3);
    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off.max(m[p * dim + q].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = m[p * dim + q];
                let rho = apq.norm();
                if rho <= stop * T::of(1e-2) {
                    continue;
                }
                let phase = apq / Complex::new(rho, T::zero());
                let app = m[p * dim + p].re;
                let aqq = m[q * dim + q].re;
                // Stable small-angle root of t^2 - 2 tau t - 1 = 0, the
                // condition zeroing the off-diagonal of the 2x2 block
                // [[app, rho], [rho, aqq]] under this rotation convention.
                let tau = (aqq - app) / (rho + rho);
                let t = if tau >= T::zero() {
                    -T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let sp = Complex::new(s, T::zero()) * phase;
                let cc = Complex::new(c, T::zero());
                // Columns: A <- A U with U_pp = c, U_pq = -s e^{i a},
                // U_qp = s e^{-i a}, U_qq = c, where a = arg(apq).
                for k in 0..dim {
                    let akp = m[k * dim + p];
                    let akq = m[k * dim + q];
                    m[k * dim + p] = akp * cc + akq * sp.conj();
                    m[k * dim + q] = akq * cc - akp * sp;
                }
                // Rows: A <- U† A.
                for k in 0..dim {
                    let apk = m[p * dim + k];
                    let aqk = m[q * dim + k];
                    m[p * dim + k] = apk * cc + aqk * sp;
                    m[q * dim + k] = aqk * cc - apk * sp.conj();
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..dim).map(|k| m[k * dim + k].re).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eig)
}
