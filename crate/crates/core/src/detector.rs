//! From a ratio series to ranked transition candidates: absolute moving
//! differences, an alpha-point moving sum, and greedy peak extraction with
//! non-maximum suppression.

use alloc::format;
use alloc::vec::Vec;

use crate::neighbors::FrameMatrix;
use crate::spectra::{ratio_series_with, RatioSeries, SpectraConfig};
use crate::{Error, Result};

/// Length of the ranked `top` list in a [`TransitionReport`].
pub const TOP_LIST_LEN: usize = 20;

/// Absolute consecutive differences `t_n = |r_{n+1} - r_n|`, n = 1..N-1.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffSeries {
    /// `values[i]` is `t_{i+1}`.
    pub values: Vec<f64>,
}

/// Windowed sums of a [`DiffSeries`]: for each n in `[w, N-1-w]` with
/// `w = ceil(alpha/2)`, the sum of `t_i` over `[n-w, n+w]` clipped to
/// `[1, N-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumSeries {
    pub alpha: usize,
    /// Window half-width `w = ceil(alpha/2)`.
    pub window: usize,
    /// First valid index n (always equals `window`).
    pub start: usize,
    /// `values[i]` is the sum at `n = start + i`.
    pub values: Vec<f64>,
}

impl SumSeries {
    /// The 1-based difference index n of `values[i]`; a peak at n marks a
    /// transition between frames n and n+1 and is reported as frame n.
    pub fn index_at(&self, i: usize) -> usize {
        self.start + i
    }
}

/// One transition candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub frame: usize,
    pub magnitude: f64,
}

/// Ranked transition candidates: the top list (up to 20, magnitude
/// descending, ties to the smaller frame) and the greedy non-maximum
/// suppressed selection drawn from it.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionReport {
    pub alpha: usize,
    pub suppression_window: usize,
    pub top: Vec<Peak>,
    pub selected: Vec<Peak>,
    /// Set when fewer than the requested k peaks survived suppression.
    pub truncated: bool,
}

/// Elementwise `|r_{n+1} - r_n|`. The series must hold at least 2 ratios.
pub fn moving_abs_diff(rs: &RatioSeries) -> DiffSeries {
    assert!(rs.ratios.len() >= 2, "need at least 2 frames");
    DiffSeries {
        values: rs.ratios.windows(2).map(|w| (w[1] - w[0]).abs()).collect(),
    }
}

/// Moving sum with half-width `w = ceil(alpha/2)`, maintained by a sliding
/// update. Requires `N - 1 > 2w` so the index range is non-trivial.
pub fn moving_sum(ds: &DiffSeries, alpha: usize) -> Result<SumSeries> {
    if alpha < 1 {
        return Err(Error::InvalidParameter("alpha must be at least 1".into()));
    }
    let len = ds.values.len();
    let w = alpha.div_ceil(2);
    if len <= 2 * w {
        return Err(Error::SeriesTooShort { len, window: w });
    }
    let t = |n: usize| ds.values[n - 1]; // 1-based t_n
    let lo = |n: usize| (n.saturating_sub(w)).max(1);
    let hi = |n: usize| n + w; // n <= len - w, so never clips right

    let start = w;
    let end = len - w;
    let mut values = Vec::with_capacity(end - start + 1);
    let mut current: f64 = (lo(start)..=hi(start)).map(t).sum();
    values.push(current);
    for n in start + 1..=end {
        current += t(hi(n));
        let old_lo = lo(n - 1);
        if old_lo < lo(n) {
            current -= t(old_lo);
        }
        values.push(current);
    }
    Ok(SumSeries {
        alpha,
        window: w,
        start,
        values,
    })
}

/// Top-list extraction and greedy selection.
///
/// The top list holds the 20 largest sums. Selection walks it in rank
/// order, skipping any candidate within `suppression_window` of an already
/// selected frame and any zero-magnitude candidate (a flat series carries
/// no transition); it stops after `k` picks and flags `truncated` when
/// fewer survive.
pub fn rank_transitions(
    ss: &SumSeries,
    k: usize,
    suppression_window: usize,
) -> Result<TransitionReport> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 1, got {k}"
        )));
    }
    let mut ranked: Vec<Peak> = ss
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| Peak {
            frame: ss.index_at(i),
            magnitude: v,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.magnitude
            .partial_cmp(&a.magnitude)
            .expect("finite magnitudes")
            .then(a.frame.cmp(&b.frame))
    });
    ranked.truncate(TOP_LIST_LEN);

    let mut selected: Vec<Peak> = Vec::with_capacity(k);
    for cand in &ranked {
        if selected.len() == k {
            break;
        }
        if cand.magnitude <= 0.0 {
            break; // ranked order: everything after is zero too
        }
        if selected
            .iter()
            .all(|s| s.frame.abs_diff(cand.frame) > suppression_window)
        {
            selected.push(*cand);
        }
    }
    let truncated = selected.len() < k;
    Ok(TransitionReport {
        alpha: ss.alpha,
        suppression_window,
        top: ranked,
        selected,
        truncated,
    })
}

/// The full pipeline: neighbor search, ratio series, moving difference,
/// moving sum, ranked selection. Suppression defaults to `alpha`.
pub fn detect(d: &FrameMatrix, alpha: usize, k: usize) -> Result<TransitionReport> {
    detect_with(d, alpha, k, alpha, SpectraConfig::default())
}

pub fn detect_with(
    d: &FrameMatrix,
    alpha: usize,
    k: usize,
    suppression_window: usize,
    cfg: SpectraConfig,
) -> Result<TransitionReport> {
    let rs = ratio_series_with(d, alpha, cfg)?;
    let ds = moving_abs_diff(&rs);
    let ss = moving_sum(&ds, alpha)?;
    rank_transitions(&ss, k, suppression_window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use alloc::vec;

    fn series(ratios: &[f64]) -> RatioSeries {
        RatioSeries {
            alpha: 2,
            ratios: ratios.to_vec(),
            degenerate: vec![false; ratios.len()],
        }
    }

    #[test]
    fn constant_ratios_zero_diffs() {
        let ds = moving_abs_diff(&series(&[0.3; 10]));
        assert!(ds.values.iter().all(|&t| t == 0.0));
        assert_eq!(ds.values.len(), 9);
    }

    #[test]
    fn diff_arithmetic() {
        let ds = moving_abs_diff(&series(&[0.1, 0.4, 0.2]));
        assert!((ds.values[0] - 0.3).abs() < 1e-15);
        assert!((ds.values[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn diff_total_variation_oracle() {
        let mut rng = Rng::new(77);
        let ratios: Vec<f64> = (0..50).map(|_| rng.next_f64()).collect();
        let ds = moving_abs_diff(&series(&ratios));
        let mut oracle = 0.0;
        for i in 1..ratios.len() {
            oracle += (ratios[i] - ratios[i - 1]).abs();
        }
        let total: f64 = ds.values.iter().sum();
        assert!((total - oracle).abs() < 1e-12);
    }

    #[test]
    fn all_ones_window() {
        // alpha = 4 gives w = 2: interior windows hold 2w + 1 = 5 ones, the
        // left edge (n = w) is clipped to [1, 2w] and holds 4.
        let ds = DiffSeries {
            values: vec![1.0; 20],
        };
        let ss = moving_sum(&ds, 4).unwrap();
        assert_eq!(ss.window, 2);
        assert_eq!(ss.start, 2);
        assert_eq!(ss.index_at(ss.values.len() - 1), 18);
        assert_eq!(ss.values[0], 4.0);
        for &v in &ss.values[1..] {
            assert_eq!(v, 5.0);
        }
    }

    #[test]
    fn impulse_window() {
        let mut values = vec![0.0; 30];
        values[14] = 1.0; // t_15
        let ss = moving_sum(&DiffSeries { values }, 4).unwrap();
        for (i, &v) in ss.values.iter().enumerate() {
            let n = ss.index_at(i);
            let expect = if (13..=17).contains(&n) { 1.0 } else { 0.0 };
            assert_eq!(v, expect, "n = {n}");
        }
    }

    #[test]
    fn sliding_matches_double_loop() {
        let mut rng = Rng::new(5);
        for alpha in [2, 3, 6, 9] {
            let len = 40 + (rng.next_u64() % 30) as usize;
            let values: Vec<f64> = (0..len).map(|_| rng.next_f64()).collect();
            let ds = DiffSeries { values };
            let ss = moving_sum(&ds, alpha).unwrap();
            let w = alpha.div_ceil(2);
            for (i, &v) in ss.values.iter().enumerate() {
                let n = ss.index_at(i);
                let mut brute = 0.0;
                for t_idx in 1..=len {
                    if t_idx + w >= n && t_idx <= n + w {
                        // t_idx in [n-w, n+w] without underflow
                        brute += ds.values[t_idx - 1];
                    }
                }
                assert!((v - brute).abs() < 1e-12, "n = {n}: {v} vs {brute}");
            }
        }
    }

    #[test]
    fn window_too_short() {
        let ds = DiffSeries {
            values: vec![1.0; 4],
        };
        assert!(matches!(
            moving_sum(&ds, 4),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(moving_sum(&ds, 2).is_ok()); // w = 1, 4 > 2
    }

    #[test]
    fn single_impulse_selected() {
        let mut values = vec![0.0; 30];
        values[14] = 1.0;
        let ss = moving_sum(&DiffSeries { values }, 4).unwrap();
        for k in [1, 2, 5] {
            let report = rank_transitions(&ss, k, 4).unwrap();
            assert_eq!(report.selected.len(), 1);
            // The impulse spreads over its window; ties resolve to the
            // earliest frame it covers.
            assert_eq!(report.selected[0].frame, 13);
            assert_eq!(report.truncated, k > 1);
        }
    }

    #[test]
    fn direct_impulse_sum_series() {
        let mut values = vec![0.0; 25];
        values[11] = 2.5;
        let ss = SumSeries {
            alpha: 4,
            window: 2,
            start: 2,
            values,
        };
        for k in [1, 3] {
            let report = rank_transitions(&ss, k, 4).unwrap();
            assert_eq!(report.selected.len(), 1);
            assert_eq!(report.selected[0].frame, 13);
            assert_eq!(report.selected[0].magnitude, 2.5);
        }
    }

    #[test]
    fn equal_peaks_ordered_by_frame() {
        let mut values = vec![0.0; 40];
        values[9] = 1.0; // t_10
        values[29] = 1.0; // t_30
        let ss = moving_sum(&DiffSeries { values }, 4).unwrap();
        let report = rank_transitions(&ss, 2, 4).unwrap();
        assert_eq!(report.selected.len(), 2);
        assert_eq!(report.selected[0].frame, 8);
        assert_eq!(report.selected[1].frame, 28);
        assert!(!report.truncated);
    }

    #[test]
    fn suppression_separates_selections() {
        let mut values = vec![0.0; 60];
        values[19] = 5.0;
        values[20] = 4.9;
        values[21] = 4.8;
        values[44] = 3.0;
        let ss = moving_sum(&DiffSeries { values }, 4).unwrap();
        let report = rank_transitions(&ss, 2, 4).unwrap();
        let frames: Vec<usize> = report.selected.iter().map(|p| p.frame).collect();
        for pair in frames.windows(2) {
            assert!(pair[0].abs_diff(pair[1]) > 4);
        }
        // The cluster contributes one pick, the far peak the other.
        assert!(frames.iter().any(|&f| (40..=47).contains(&f)));
        assert_eq!(report.selected.len(), 2);
    }

    #[test]
    fn report_is_sorted_and_selected_subset() {
        let mut rng = Rng::new(13);
        let values: Vec<f64> = (0..80).map(|_| rng.next_f64()).collect();
        let ss = moving_sum(&DiffSeries { values }, 5).unwrap();
        let report = rank_transitions(&ss, 4, 5).unwrap();
        assert!(report.top.len() <= TOP_LIST_LEN);
        for w in report.top.windows(2) {
            assert!(w[0].magnitude >= w[1].magnitude);
        }
        for s in &report.selected {
            assert!(report.top.contains(s));
        }
    }

    #[test]
    fn block_matrix_boundaries_reach_top_list() {
        // Three blocks of near-identical frames, the outer two copies of the
        // same level. Within a block every neighborhood looks alike, so the
        // ratio series is a two-level step and the only nonzero differences
        // sit at the block boundaries (frames 8 and 16).
        let p = 40;
        let blocks = [(0usize, 10.0f64), (1, 30.0), (0, 10.0)];
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (b, &(axis, level)) in blocks.iter().enumerate() {
            for i in 0..8 {
                let mut row = vec![0.0f64; p];
                row[axis] = level;
                row[2 + b * 8 + i] = 0.01; // one distinct jitter axis per frame
                rows.push(row);
            }
        }
        let d = FrameMatrix::from_rows(&rows).unwrap();
        let rs = crate::spectra::ratio_series(&d, 4).unwrap();
        let ds = moving_abs_diff(&rs);
        for (i, &t) in ds.values.iter().enumerate() {
            let n = i + 1;
            if n == 8 || n == 16 {
                assert!(t > 1e-6, "boundary t_{n} = {t}");
            } else {
                assert!(t < 1e-12, "interior t_{n} = {t}");
            }
        }
        let report = detect(&d, 4, 2).unwrap();
        let top_frames: Vec<usize> = report.top.iter().map(|p| p.frame).collect();
        assert!(top_frames.contains(&8), "top {top_frames:?}");
        assert!(top_frames.contains(&16), "top {top_frames:?}");
    }

    #[test]
    fn constant_matrix_empty_report() {
        let d = FrameMatrix::from_rows(&[[3.0, 3.0, 3.0]; 12]).unwrap();
        let report = detect(&d, 3, 2).unwrap();
        assert!(report.selected.is_empty());
        assert!(report.truncated);
        assert!(report.top.iter().all(|p| p.magnitude == 0.0));
        // Under centering the same matrix is outright degenerate.
        let rs = ratio_series_with(&d, 3, SpectraConfig { center: true }).unwrap();
        assert!(rs.degenerate.iter().all(|&f| f));
    }
}
