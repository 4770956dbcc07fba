//! Singular values of frame neighborhoods and the per-frame ratio series
//! `sigma_alpha / sigma_1`.
//!
//! Values come from the eigenvalues of the alpha x alpha Gram matrix of the
//! stacked member rows (`sigma_k = sqrt(max(0, eig_k))`), which carries the
//! same nonzero spectrum as the alpha x P stack at a fraction of the cost
//! since P (pixels) is typically far larger than alpha.
//!
//! Centering the stack (subtracting the mean frame) is available behind
//! [`SpectraConfig::center`] but is off by default: a centered stack of
//! alpha rows has rank at most alpha - 1, which pins `sigma_alpha` to zero
//! and flattens the whole ratio series. The raw stack keeps the smallest
//! singular value informative, which is what the detector feeds on.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::sym_eigen;
use crate::math::sqrt;
use crate::neighbors::{knn_all, FrameMatrix, NeighborSet};
use crate::{Error, Result};

/// Options for neighborhood spectra.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpectraConfig {
    /// Subtract the column mean of the neighborhood stack before the
    /// decomposition. Defaults to `false`; see the module docs.
    pub center: bool,
}

/// Per-frame ratio series `(sigma_alpha / sigma_1)_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioSeries {
    pub alpha: usize,
    /// Entry n-1 holds the ratio of frame n; each value lies in `[0, 1]`.
    pub ratios: Vec<f64>,
    /// Set where `sigma_1 = 0` (all member rows identical zero-information
    /// stacks); the ratio is reported as 0 there.
    pub degenerate: Vec<bool>,
}

/// Gram eigenvalues at or below this fraction of the largest one are
/// rounding artifacts of the alpha x P -> alpha x alpha compression (the
/// square root would inflate them to ~1e-6 of sigma_1), so they are taken
/// as exact zeros. Genuine rank deficiency (centering, collinear rows)
/// lands firmly below this.
const EIGEN_FLOOR_REL: f64 = 1e-12;

/// Singular values (descending, length alpha) of the stacked member rows of
/// a neighborhood, optionally centered.
///
/// All-equal neighborhoods are not an error: centering turns them into the
/// all-zero spectrum.
pub fn neighborhood_singular_values(
    d: &FrameMatrix,
    ns: &NeighborSet,
    cfg: SpectraConfig,
) -> Result<Vec<f64>> {
    let alpha = ns.members.len();
    let p = d.cols();
    debug_assert!(ns.members.iter().all(|&m| m >= 1 && m <= d.rows()));

    let gram = if cfg.center {
        let mut stack = vec![0.0f64; alpha * p];
        for (a, &m) in ns.members.iter().enumerate() {
            stack[a * p..(a + 1) * p].copy_from_slice(d.frame(m)?);
        }
        for col in 0..p {
            let mut mean = 0.0;
            for a in 0..alpha {
                mean += stack[a * p + col];
            }
            mean /= alpha as f64;
            for a in 0..alpha {
                stack[a * p + col] -= mean;
            }
        }
        gram_of(&stack, alpha, p)
    } else {
        let mut gram = vec![0.0f64; alpha * alpha];
        for a in 0..alpha {
            let row_a = d.frame(ns.members[a])?;
            for b in 0..=a {
                let row_b = d.frame(ns.members[b])?;
                let dot: f64 = row_a.iter().zip(row_b.iter()).map(|(x, y)| x * y).sum();
                gram[a * alpha + b] = dot;
                gram[b * alpha + a] = dot;
            }
        }
        gram
    };

    let eig = sym_eigen(alpha, &gram)?;
    let floor = EIGEN_FLOOR_REL * eig.values[0].max(0.0);
    Ok(eig
        .values
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { sqrt(l) })
        .collect())
}

fn gram_of(stack: &[f64], alpha: usize, p: usize) -> Vec<f64> {
    let mut gram = vec![0.0f64; alpha * alpha];
    for a in 0..alpha {
        for b in 0..=a {
            let dot: f64 = stack[a * p..(a + 1) * p]
                .iter()
                .zip(stack[b * p..(b + 1) * p].iter())
                .map(|(x, y)| x * y)
                .sum();
            gram[a * alpha + b] = dot;
            gram[b * alpha + a] = dot;
        }
    }
    gram
}

/// Ratio series with default options.
pub fn ratio_series(d: &FrameMatrix, alpha: usize) -> Result<RatioSeries> {
    ratio_series_with(d, alpha, SpectraConfig::default())
}

/// `sigma_alpha / sigma_1` over the alpha-neighborhood of every frame.
pub fn ratio_series_with(d: &FrameMatrix, alpha: usize, cfg: SpectraConfig) -> Result<RatioSeries> {
    if alpha < 2 || alpha > d.rows() {
        return Err(Error::AlphaOutOfRange {
            alpha,
            max: d.rows(),
        });
    }
    let sets = knn_all(d, alpha)?;
    let mut ratios = Vec::with_capacity(sets.len());
    let mut degenerate = Vec::with_capacity(sets.len());
    for ns in &sets {
        let svals = neighborhood_singular_values(d, ns, cfg)?;
        let sigma1 = svals[0];
        if sigma1 == 0.0 {
            ratios.push(0.0);
            degenerate.push(true);
        } else {
            ratios.push(svals[alpha - 1] / sigma1);
            degenerate.push(false);
        }
    }
    Ok(RatioSeries {
        alpha,
        ratios,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    const CENTERED: SpectraConfig = SpectraConfig { center: true };

    fn neighbor_set(center: usize, members: &[usize]) -> NeighborSet {
        NeighborSet {
            center,
            members: members.to_vec(),
            distances: vec![0.0; members.len()],
        }
    }

    #[test]
    fn identical_rows_centered_spectrum_is_zero() {
        let d = FrameMatrix::from_rows(&[[2.0, 5.0, 1.0]; 3]).unwrap();
        let ns = neighbor_set(1, &[1, 2, 3]);
        let svals = neighborhood_singular_values(&d, &ns, CENTERED).unwrap();
        assert_eq!(svals, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn collinear_rows_centered_rank_one() {
        // Rows on an affine line: after centering only one direction is left.
        let base = [1.0, 2.0, 0.5, -1.0, 3.0];
        let dir = [0.2, -0.4, 1.0, 0.3, -0.7];
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|k| {
                base.iter()
                    .zip(dir.iter())
                    .map(|(b, d)| b + k as f64 * d)
                    .collect()
            })
            .collect();
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let ns = neighbor_set(1, &[1, 2, 3, 4]);
        let svals = neighborhood_singular_values(&d, &ns, CENTERED).unwrap();
        for &s in &svals[1..] {
            assert!(s <= 1e-10 * svals[0], "spectrum {svals:?}");
        }
    }

    #[test]
    fn orthogonal_rows_known_spectrum() {
        let d = FrameMatrix::from_rows(&[
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ns = neighbor_set(1, &[1, 2, 3]);
        let svals = neighborhood_singular_values(&d, &ns, SpectraConfig::default()).unwrap();
        assert!((svals[0] - 3.0).abs() < 1e-12);
        assert!((svals[1] - 2.0).abs() < 1e-12);
        assert!((svals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_plane_alpha_three_centered_ratios_vanish() {
        // Rows on a 2-d affine subspace: centered rank <= 2, so the third
        // singular value (and with it every ratio) collapses.
        let mut rng = Rng::new(3);
        let origin: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let u: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let v: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|_| {
                let (a, b) = (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
                (0..12).map(|p| origin[p] + a * u[p] + b * v[p]).collect()
            })
            .collect();
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let rs = ratio_series_with(&d, 3, CENTERED).unwrap();
        for &r in &rs.ratios {
            assert!(r < 1e-5, "ratio {r}");
        }
    }

    #[test]
    fn ratios_in_unit_interval() {
        let mut rng = Rng::new(17);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..9).map(|_| rng.uniform(0.0, 255.0)).collect())
            .collect();
        let d = FrameMatrix::from_rows(&rows).unwrap();
        for alpha in [2, 4, 9] {
            let rs = ratio_series(&d, alpha).unwrap();
            assert_eq!(rs.ratios.len(), 20);
            for (&r, &flag) in rs.ratios.iter().zip(rs.degenerate.iter()) {
                assert!(!flag);
                assert!((0.0..=1.0).contains(&r));
            }
        }
    }

    #[test]
    fn scaling_leaves_ratios_unchanged() {
        let mut rng = Rng::new(21);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..7).map(|_| rng.uniform(0.0, 10.0)).collect())
            .collect();
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let scaled_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| 2.0 * x).collect())
            .collect();
        let d2 = FrameMatrix::from_rows(&scaled_rows).unwrap();
        let a = ratio_series(&d, 4).unwrap();
        let b = ratio_series(&d2, 4).unwrap();
        for (x, y) in a.ratios.iter().zip(b.ratios.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_column_offset_invariance_under_centering() {
        let mut rng = Rng::new(25);
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..6).map(|_| rng.uniform(0.0, 5.0)).collect())
            .collect();
        let mut shifted = rows.clone();
        for row in &mut shifted {
            row[2] += 100.0;
        }
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let d2 = FrameMatrix::from_rows(&shifted).unwrap();
        let ns = neighbor_set(1, &[1, 4, 5, 9]);
        let a = neighborhood_singular_values(&d, &ns, CENTERED).unwrap();
        let b = neighborhood_singular_values(&d2, &ns, CENTERED).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-10, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn degenerate_all_zero_rows_flagged() {
        let d = FrameMatrix::from_rows(&[[0.0, 0.0]; 4]).unwrap();
        let rs = ratio_series(&d, 3).unwrap();
        assert!(rs.degenerate.iter().all(|&f| f));
        assert!(rs.ratios.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn alpha_out_of_range() {
        let d = FrameMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(
            ratio_series(&d, 1),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            ratio_series(&d, 4),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }
}
