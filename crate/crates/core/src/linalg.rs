//! Dense symmetric eigendecomposition and a small general 2x2 eigensolver.
//!
//! The symmetric path is Householder tridiagonalization followed by the
//! implicit-shift QL iteration, with eigenvector accumulation. It is used
//! for the small Gram matrices of frame neighborhoods and for the
//! double-centered matrices of classical multidimensional scaling, so it
//! has to be robust for sizes from 2 up to a few thousand.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{hypot, sqrt};
use crate::{Error, Result};

/// Eigenvalues (descending) and matching unit eigenvectors of a symmetric
/// matrix. `vectors` is row-major n x n; column `j` is the eigenvector of
/// `values[j]`.
pub(crate) struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub n: usize,
}

impl SymEigen {
    #[inline]
    pub fn vector_component(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.n + j]
    }
}

#[inline]
fn same_sign_mag(mag: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        mag.abs()
    } else {
        -mag.abs()
    }
}

/// Full eigendecomposition of the symmetric matrix `a` (row-major n x n).
///
/// Only the lower triangle is read. Fails if the QL iteration does not
/// converge or produces non-finite values.
pub(crate) fn sym_eigen(n: usize, a: &[f64]) -> Result<SymEigen> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Vec::new(),
            n,
        });
    }
    let mut z: Vec<f64> = a.to_vec();
    // Symmetrize from the lower triangle so rounding asymmetries cannot leak in.
    for i in 0..n {
        for j in (i + 1)..n {
            z[i * n + j] = z[j * n + i];
        }
    }
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    tridiagonalize(n, &mut z, &mut d, &mut e);
    ql_implicit(n, &mut d, &mut e, &mut z)?;

    // Sort eigenpairs by descending eigenvalue; swap vector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        d[j].partial_cmp(&d[i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![0.0f64; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_j] = z[i * n + old_j];
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEigenvalue);
    }
    Ok(SymEigen { values, vectors, n })
}

/// Householder reduction to tridiagonal form, accumulating the orthogonal
/// transform in `z` for later eigenvector recovery.
fn tridiagonalize(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += z[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] /= scale;
                    h += z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                z[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += z[j * n + k] * z[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g_acc += z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[j * n + k] -= f * e[k] + g * z[i * n + k];
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    z[k * n + j] -= g * z[k * n + i];
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = 1.0;
        for j in 0..i {
            z[j * n + i] = 0.0;
            z[i * n + j] = 0.0;
        }
    }
}

/// Implicit-shift QL iteration on the tridiagonal (d, e), rotating the
/// columns of `z` so they end up as eigenvectors.
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::NonFiniteEigenvalue);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + same_sign_mag(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a general (possibly non-symmetric) real
/// 2x2 matrix, ordered by descending eigenvalue.
///
/// A discriminant more negative than `-(2 * imag_tol)^2` means the
/// eigenvalues are complex with imaginary part beyond `imag_tol`; smaller
/// violations are clamped to a repeated real eigenvalue. Near-isotropic
/// matrices (repeated eigenvalue) fall back to the coordinate axes.
pub(crate) fn eig2_general(m: [[f64; 2]; 2], imag_tol: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let [[a, b], [c, d]] = m;
    let tr = a + d;
    let det = a * d - b * c;
    let mut disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        let imag = sqrt(-disc) / 2.0;
        if imag > imag_tol {
            return Err(Error::ComplexCurvatures { imag });
        }
        disc = 0.0;
    }
    let root = sqrt(disc);
    let k1 = (tr + root) / 2.0;
    let k2 = (tr - root) / 2.0;

    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1e-300);
    if root <= 1e-9 * scale {
        // Repeated eigenvalue: for an (almost) isotropic map every direction
        // is principal, so use the coordinate axes.
        return Ok(([k1, k2], [[1.0, 0.0], [0.0, 1.0]]));
    }

    let vec_for = |k: f64| -> [f64; 2] {
        let cand1 = [b, k - a];
        let cand2 = [k - d, c];
        let n1 = hypot(cand1[0], cand1[1]);
        let n2 = hypot(cand2[0], cand2[1]);
        let (v, nv) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
        if nv == 0.0 {
            [1.0, 0.0]
        } else {
            [v[0] / nv, v[1] / nv]
        }
    };
    Ok(([k1, k2], [vec_for(k1), vec_for(k2)]))
}
