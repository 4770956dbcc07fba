//! Dual-route checks of the spectra path: the alpha x alpha Gram eigenvalue
//! route must match a direct SVD of the (optionally centered) stack.

use nalgebra::DMatrix;
use ptd_core::neighbors::{FrameMatrix, NeighborSet};
use ptd_core::rng::Rng;
use ptd_core::spectra::{neighborhood_singular_values, SpectraConfig};

fn direct_svd(stack: Vec<f64>, alpha: usize, p: usize, center: bool) -> Vec<f64> {
    let mut m = DMatrix::from_row_slice(alpha, p, &stack);
    if center {
        for col in 0..p {
            let mean: f64 = (0..alpha).map(|a| m[(a, col)]).sum::<f64>() / alpha as f64;
            for a in 0..alpha {
                m[(a, col)] -= mean;
            }
        }
    }
    let mut sv: Vec<f64> = m
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

#[test]
fn gram_spectrum_matches_direct_svd() {
    let mut rng = Rng::new(2024);
    for trial in 0..200 {
        let alpha = 2 + (rng.next_u64() % 7) as usize;
        let p = alpha + 1 + (rng.next_u64() % 50) as usize;
        let n = alpha.max(2);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.uniform(-50.0, 260.0)).collect())
            .collect();
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let members: Vec<usize> = (1..=alpha).collect();
        let ns = NeighborSet {
            center: 1,
            members: members.clone(),
            distances: vec![0.0; alpha],
        };
        let mut stack = Vec::with_capacity(alpha * p);
        for &m in &members {
            stack.extend_from_slice(d.frame(m).unwrap());
        }
        for center in [false, true] {
            let mine = neighborhood_singular_values(&d, &ns, SpectraConfig { center }).unwrap();
            let oracle = direct_svd(stack.clone(), alpha, p, center);
            assert_eq!(mine.len(), oracle.len());
            let scale = oracle[0].max(1.0);
            for (a, b) in mine.iter().zip(oracle.iter()) {
                assert!(
                    (a - b).abs() <= 1e-8 * scale,
                    "trial {trial} center {center}: {mine:?} vs {oracle:?}"
                );
            }
        }
    }
}

#[test]
fn sixbyforty_example_dimensions() {
    // The canonical stack shape: a 6-row neighborhood over 40 columns.
    let mut rng = Rng::new(7);
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..40).map(|_| rng.uniform(0.0, 255.0)).collect())
        .collect();
    let d = FrameMatrix::from_rows(&rows).unwrap();
    let ns = NeighborSet {
        center: 1,
        members: (1..=6).collect(),
        distances: vec![0.0; 6],
    };
    let mut stack = Vec::new();
    for m in 1..=6 {
        stack.extend_from_slice(d.frame(m).unwrap());
    }
    let mine = neighborhood_singular_values(&d, &ns, SpectraConfig { center: true }).unwrap();
    let oracle = direct_svd(stack, 6, 40, true);
    let scale = oracle[0].max(1.0);
    for (a, b) in mine.iter().zip(oracle.iter()) {
        assert!((a - b).abs() <= 1e-8 * scale);
    }
    // Centering a 6-row stack leaves at most 5 nonzero values.
    assert_eq!(mine[5], 0.0);
}
